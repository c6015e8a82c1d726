//! Gaussian-side decoding onto a pruned reception set.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use super::prune::LiftedCode;
use crate::qarith::CNum;

/// Candidates examined before falling back to the known members.
pub const MAX_DECODE_POPS: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decoded {
    /// Block symbols of the chosen element of `S_j`.
    pub seq: Vec<u16>,
    pub cost: f64,
    pub pops: usize,
    /// The search hit [`MAX_DECODE_POPS`] and the answer came from the
    /// members of the pruned codebook instead.
    pub exhausted: bool,
}

struct State {
    cost: f64,
    seq: Vec<u16>,
    idx: Vec<u16>,
    last: usize,
}

impl PartialEq for State {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for State {}
impl PartialOrd for State {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for State {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost.total_cmp(&self.cost).then_with(|| o.seq.cmp(&self.seq))
    }
}

/// Nearest element of `S_j` to the Gaussian reception `y` (length `mN`),
/// measuring squared distance to each candidate's nominal noiseless mean.
/// Candidates are visited in increasing distance, so the first member of
/// `S_j` found is the minimizer; ties go to the lexicographically smaller
/// sequence.
pub fn lift_decode_step(lifted: &LiftedCode, pos: usize, y: &[CNum]) -> Decoded {
    let ext = lifted.extended();
    let nb = ext.base().block_len();
    let m = ext.m();
    assert_eq!(y.len(), m * nb, "reception length must be mN");
    let means = lifted.means(pos);
    let node = &lifted.nodes()[pos];
    // per block: symbols sorted by distance
    let sorted: Vec<Vec<(f64, u16)>> = (0..m)
        .map(|k| {
            let mut v: Vec<(f64, u16)> = means
                .iter()
                .enumerate()
                .map(|(b, mu)| {
                    let d: f64 = (0..nb).map(|t| (y[k * nb + t] - mu[t]).norm_sqr()).sum();
                    (d, b as u16)
                })
                .collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            v
        })
        .collect();
    let make = |idx: Vec<u16>, last: usize| {
        let seq: Vec<u16> = idx.iter().enumerate().map(|(k, &i)| sorted[k][i as usize].1).collect();
        let cost = idx.iter().enumerate().map(|(k, &i)| sorted[k][i as usize].0).sum();
        State { cost, seq, idx, last }
    };
    let mut heap = BinaryHeap::new();
    heap.push(make(vec![0; m], 0));
    let mut pops = 0;
    while let Some(s) = heap.pop() {
        pops += 1;
        if node.contains(&s.seq) {
            return Decoded { seq: s.seq, cost: s.cost, pops, exhausted: false };
        }
        if pops >= MAX_DECODE_POPS {
            break;
        }
        // each vector has one parent: decrement its last nonzero position
        for p in s.last..m {
            if (s.idx[p] as usize + 1) < sorted[p].len() {
                let mut idx = s.idx.clone();
                idx[p] += 1;
                heap.push(make(idx, p));
            }
        }
    }
    let cost_of = |seq: &[u16]| -> f64 {
        seq.iter()
            .enumerate()
            .map(|(k, &b)| (0..nb).map(|t| (y[k * nb + t] - means[b as usize][t]).norm_sqr()).sum::<f64>())
            .sum()
    };
    let fallback = lifted
        .codebook()
        .members
        .iter()
        .map(|w| ext.reception(pos, w))
        .map(|seq| (cost_of(&seq), seq))
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    match fallback {
        Some((cost, seq)) => Decoded { seq, cost, pops, exhausted: true },
        None => {
            let first: Vec<u16> = sorted.iter().map(|v| v[0].1).collect();
            let cost = cost_of(&first);
            Decoded { seq: first, cost, pops, exhausted: true }
        }
    }
}
