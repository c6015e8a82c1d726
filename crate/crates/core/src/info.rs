//! Entropy and plug-in mutual information helpers (all in bits).

use std::collections::HashMap;
use std::hash::Hash;

use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

use crate::rng;

/// Entropy of a weight vector; weights need not be normalized. Summation
/// follows the slice order, so callers pass weights in a canonical order.
pub fn entropy_of_weights(weights: &[f64]) -> f64 {
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &w in weights {
        if w > 0.0 {
            let p = w / total;
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

/// Entropy from integer counts.
pub fn entropy_of_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    let mut acc = 0.0;
    for &c in counts {
        if c > 0 {
            let c = c as f64;
            acc += c * c.log2();
        }
    }
    (t.log2() - acc / t).max(0.0)
}

/// Plug-in entropy of a sample of hashable values. Deterministic: counts are
/// summed in order of first appearance.
pub fn plugin_entropy<T: Hash + Eq>(samples: impl IntoIterator<Item = T>) -> f64 {
    let mut index: HashMap<T, usize> = HashMap::new();
    let mut counts: Vec<u64> = Vec::new();
    for s in samples {
        let next = counts.len();
        let k = *index.entry(s).or_insert(next);
        if k == counts.len() {
            counts.push(0);
        }
        counts[k] += 1;
    }
    entropy_of_counts(&counts)
}

/// Assigns dense ids to values in order of first appearance.
#[derive(Debug)]
pub struct Interner<T> {
    map: HashMap<T, u32>,
}

impl<T: Hash + Eq> Default for Interner<T> {
    fn default() -> Self {
        Self { map: HashMap::new() }
    }
}

impl<T: Hash + Eq> Interner<T> {
    pub fn id(&mut self, value: T) -> u32 {
        let next = self.map.len() as u32;
        *self.map.entry(value).or_insert(next)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PluginMi {
    pub value: f64,
    pub half_width: f64,
    pub distinct_x: usize,
    pub distinct_y: usize,
    pub distinct_pairs: usize,
}

/// Number of bootstrap replicates behind every reported half-width.
pub const BOOTSTRAP_REPLICATES: usize = 200;

/// Plug-in estimate of `I(X;Y)` from paired dense ids, with a bootstrap
/// half-width: the 95% quantile of `|I* − Î|` over resampled data sets.
pub fn plugin_mi(xs: &[u32], ys: &[u32], seed: u64) -> PluginMi {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let nx = xs.iter().map(|&x| x as usize + 1).max().unwrap_or(0);
    let ny = ys.iter().map(|&y| y as usize + 1).max().unwrap_or(0);
    let mut pairs = Interner::default();
    let joint: Vec<u32> = xs.iter().zip(ys).map(|(&x, &y)| pairs.id((x, y))).collect();
    let nj = pairs.len();
    let estimate = |idx: &mut dyn Iterator<Item = usize>| {
        let (mut cx, mut cy, mut cj) = (vec![0u64; nx], vec![0u64; ny], vec![0u64; nj]);
        for i in idx {
            cx[xs[i] as usize] += 1;
            cy[ys[i] as usize] += 1;
            cj[joint[i] as usize] += 1;
        }
        (entropy_of_counts(&cx) + entropy_of_counts(&cy) - entropy_of_counts(&cj)).max(0.0)
    };
    let value = estimate(&mut (0..n));
    let half_width = if n == 0 || nj <= 1 {
        0.0
    } else {
        let mut dev: Vec<f64> = (0..BOOTSTRAP_REPLICATES)
            .into_par_iter()
            .map(|b| {
                let mut r = rng::stream(seed, b as u64);
                let mut draws = (0..n).map(|_| r.random_range(0..n));
                (estimate(&mut draws) - value).abs()
            })
            .collect();
        dev.sort_by(f64::total_cmp);
        let k = ((0.95 * BOOTSTRAP_REPLICATES as f64).ceil() as usize).clamp(1, dev.len()) - 1;
        dev[k]
    };
    PluginMi { value, half_width, distinct_x: nx, distinct_y: ny, distinct_pairs: nj }
}

#[cfg(test)]
mod test {
    use super::*;

    #[test]
    fn entropies() {
        assert_eq!(entropy_of_counts(&[1, 1, 1, 1]), 2.0);
        assert_eq!(entropy_of_counts(&[5]), 0.0);
        assert_eq!(entropy_of_counts(&[]), 0.0);
        assert!((entropy_of_weights(&[0.5, 0.25, 0.25]) - 1.5).abs() < 1e-15);
        assert_eq!(plugin_entropy(["a", "b", "a", "b"]), 1.0);
    }

    #[test]
    fn plugin_mi_extremes() {
        let xs: Vec<u32> = (0..4000).map(|i| i % 4).collect();
        let same = plugin_mi(&xs, &xs, 1);
        assert!((same.value - 2.0).abs() < 1e-12);
        let zeros = vec![0u32; 4000];
        let none = plugin_mi(&xs, &zeros, 1);
        assert_eq!(none.value, 0.0);
        let c = plugin_mi(&zeros, &zeros, 1);
        assert_eq!((c.value, c.half_width), (0.0, 0.0));
        assert_eq!(plugin_mi(&xs, &xs, 9), plugin_mi(&xs, &xs, 9));
    }
}
