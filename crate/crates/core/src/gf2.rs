//! Dense matrices over GF(2) with bitset rows.

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Self { rows, cols, words, data: vec![0; rows * words] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.words + c / 64];
        if bit {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    /// Rank by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let w = self.words;
        let mut rank = 0;
        for c in 0..self.cols {
            let (word, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..self.rows).find(|&r| m[r * w + word] & bit != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..w {
                    m.swap(p * w + k, rank * w + k);
                }
            }
            for r in rank + 1..self.rows {
                if m[r * w + word] & bit != 0 {
                    for k in word..w {
                        m[r * w + k] ^= m[rank * w + k];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

#[cfg(test)]
mod test {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// Oracle: rank = log2 of the number of distinct row combinations.
    fn span_rank(m: &F2Matrix) -> usize {
        let rows: Vec<Vec<bool>> =
            (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c)).collect()).collect();
        let mut span = HashSet::new();
        for mask in 0u32..(1 << rows.len()) {
            let mut v = vec![false; m.cols()];
            for (i, row) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (a, b) in v.iter_mut().zip(row) {
                        *a ^= *b;
                    }
                }
            }
            span.insert(v);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn identity_and_zero() {
        let mut id = F2Matrix::zeros(70, 70);
        for i in 0..70 {
            id.set(i, i, true);
        }
        assert_eq!(id.rank(), 70);
        assert_eq!(F2Matrix::zeros(5, 9).rank(), 0);
        assert_eq!(F2Matrix::zeros(0, 0).rank(), 0);
    }

    proptest! {
        #[test]
        fn rank_matches_span(rows in 0usize..9, cols in 0usize..80, bits in proptest::collection::vec(any::<bool>(), 720)) {
            let mut m = F2Matrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, bits[(r * cols + c) % bits.len()] && bits[(r * 7 + c * 3) % bits.len()]);
                }
            }
            prop_assert_eq!(m.rank(), span_rank(&m));
        }
    }
}
