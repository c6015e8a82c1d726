//! Gap constants, the genie decomposition of a Gaussian reception, and the
//! maximum-entropy bounds on integer-valued variables.

use std::collections::BTreeMap;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::entropy_of_counts;
use crate::models::derive_dsm;
use crate::network::{random_relay_topology, NodeId, Topology};
use crate::qarith::{quantize, to_cnum, CNum, FixedInput, GInt};
use crate::rng;

/// All constants in bits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapConstants {
    pub m: u32,
    pub k: u32,
    pub l: u32,
    pub kappa_node: f64,
    pub kappa_relay: f64,
    pub kappa_ic: f64,
    pub kappa_ic_lift: f64,
    pub kappa_mimo_relay: f64,
    pub kappa_mimo_ic: f64,
    pub kappa_mimo_ic_lift: f64,
    pub kappa_multicast: f64,
}

/// Per-node side-information bound `log(6M − 1) + 10`.
pub fn kappa_node(m: u32) -> f64 {
    (6.0 * m as f64 - 1.0).log2() + 10.0
}

pub fn gap_constants(m: u32, k: u32, l: u32) -> Result<GapConstants> {
    if m == 0 || k == 0 || l == 0 {
        return Err(Error::Domain(format!("M, K and L must be positive (got {m}, {k}, {l})")));
    }
    let (mf, kf, lf) = (m as f64, k as f64, l as f64);
    Ok(GapConstants {
        m,
        k,
        l,
        kappa_node: kappa_node(m),
        kappa_relay: mf * kappa_node(m),
        kappa_ic: 6.0 * kf + (144.0 * kf + 1.0).log2(),
        kappa_ic_lift: (6.0 * kf - 1.0).log2() + 10.0,
        kappa_mimo_relay: lf * mf * ((6.0 * lf * mf - 1.0).log2() + 10.0),
        kappa_mimo_ic: 6.0 * lf * kf + lf * (144.0 * lf * kf + 1.0).log2(),
        kappa_mimo_ic_lift: lf * ((6.0 * lf * kf - 1.0).log2() + 10.0),
        kappa_multicast: mf * kappa_node(m),
    })
}

// ---------------------------------------------------------------- genie split

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenieSplit {
    pub qv: GInt,
    pub qz: GInt,
    pub carry: GInt,
}

impl GenieSplit {
    /// Recovers the deterministic reception from the Gaussian one.
    pub fn reconstruct(&self, y_gauss: CNum) -> Result<GInt> {
        Ok(quantize(y_gauss)? - self.qv - self.qz - self.carry)
    }
}

/// Splits `y = y' + v + z` into the side information `([v], [z], c)` that
/// recovers `y'` from `[y]`. The carry is the residual
/// `[y] − y' − [v] − [z]`, so the reconstruction is exact by construction.
pub fn genie_decompose(y_gauss: CNum, y_dsm: GInt, v: CNum, z: CNum) -> Result<GenieSplit> {
    let sum = to_cnum(y_dsm) + v + z;
    let tol = 1e-9 * 1f64.max(y_gauss.norm());
    if (sum.re - y_gauss.re).abs() > tol || (sum.im - y_gauss.im).abs() > tol {
        return Err(Error::Invariant(format!(
            "y = {y_gauss} is not y' + v + z = {sum} within {tol:e}"
        )));
    }
    let qv = quantize(v)?;
    let qz = quantize(z)?;
    let carry = quantize(y_gauss)? - y_dsm - qv - qz;
    Ok(GenieSplit { qv, qz, carry })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GenieNoise {
    /// CN(0,1) receiver noise.
    Unit,
    /// `z ≡ 0`.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenieEntropy {
    pub node: NodeId,
    pub samples: usize,
    pub in_degree: usize,
    pub h_qv: f64,
    pub h_qz: f64,
    pub h_carry: f64,
    pub total: f64,
    /// `kappa_node(M)`.
    pub bound: f64,
    pub within_bound: bool,
    /// `log2(6·indegree − 1)`, the counting bound on `[v]`.
    pub qv_count_bound: Option<f64>,
    pub carry_max_abs: i64,
    pub reconstruction_failures: u64,
}

const CHUNK: usize = 1 << 14;

#[derive(Default)]
struct Tally {
    qv: BTreeMap<(i64, i64), u64>,
    qz: BTreeMap<(i64, i64), u64>,
    carry: BTreeMap<(i64, i64), u64>,
    carry_max_abs: i64,
    failures: u64,
}

impl Tally {
    fn merge(mut self, o: Tally) -> Tally {
        for (dst, src) in [(&mut self.qv, o.qv), (&mut self.qz, o.qz), (&mut self.carry, o.carry)] {
            for (k, c) in src {
                *dst.entry(k).or_default() += c;
            }
        }
        self.carry_max_abs = self.carry_max_abs.max(o.carry_max_abs);
        self.failures += o.failures;
        self
    }
}

fn cn01(r: &mut rng::Rng) -> CNum {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    CNum::new(re * s, im * s)
}

fn entropy_of_map(m: &BTreeMap<(i64, i64), u64>) -> f64 {
    entropy_of_counts(&m.values().copied().collect::<Vec<_>>())
}

pub fn genie_side_info_entropy(t: &Topology, node: NodeId, samples: usize, seed: u64) -> Result<GenieEntropy> {
    genie_side_info_entropy_with(t, node, samples, seed, GenieNoise::Unit)
}

/// Plug-in entropies of `[v_j]`, `[z_j]` and the carry at `node` when every
/// transmitter into it sends uniform random symbols.
pub fn genie_side_info_entropy_with(
    t: &Topology,
    node: NodeId,
    samples: usize,
    seed: u64,
    noise: GenieNoise,
) -> Result<GenieEntropy> {
    if node >= t.node_count() {
        return Err(Error::Domain(format!("node {node} does not exist")));
    }
    let dsm = derive_dsm(t)?;
    let links: Vec<_> = dsm.incoming(node).cloned().collect();
    let bound = kappa_node(t.m().max(1) as u32);
    let n = dsm.n();
    let size = dsm.alphabet_size();
    let chunks = samples.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, c as u64);
            let mut tally = Tally::default();
            for _ in 0..CHUNK.min(samples - c * CHUNK) {
                let mut exact = CNum::new(0.0, 0.0);
                let mut y_dsm = GInt::new(0, 0);
                for l in &links {
                    let x = FixedInput::from_index(n, r.random_range(0..size)).expect("index in range");
                    exact += l.gain * x.value();
                    y_dsm += quantize(to_cnum(l.qgain) * x.value()).expect("bounded product");
                }
                let z = match noise {
                    GenieNoise::Unit => cn01(&mut r),
                    GenieNoise::None => CNum::new(0.0, 0.0),
                };
                let y = exact + z;
                let v = exact - to_cnum(y_dsm);
                let split = genie_decompose(y, y_dsm, v, z).expect("decomposition holds by construction");
                if split.reconstruct(y).expect("finite") != y_dsm {
                    tally.failures += 1;
                }
                *tally.qv.entry((split.qv.re, split.qv.im)).or_default() += 1;
                *tally.qz.entry((split.qz.re, split.qz.im)).or_default() += 1;
                *tally.carry.entry((split.carry.re, split.carry.im)).or_default() += 1;
                tally.carry_max_abs = tally.carry_max_abs.max(split.carry.re.abs()).max(split.carry.im.abs());
            }
            tally
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge);
    // a node that hears nothing needs no side information
    let (h_qv, h_qz, h_carry) = if samples == 0 || links.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        (entropy_of_map(&tally.qv), entropy_of_map(&tally.qz), entropy_of_map(&tally.carry))
    };
    let total = h_qv + h_qz + h_carry;
    Ok(GenieEntropy {
        node,
        samples,
        in_degree: links.len(),
        h_qv,
        h_qz,
        h_carry,
        total,
        bound,
        within_bound: total <= bound,
        qv_count_bound: (!links.is_empty()).then(|| (6.0 * links.len() as f64 - 1.0).log2()),
        carry_max_abs: tally.carry_max_abs,
        reconstruction_failures: tally.failures,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenieStress {
    pub draws: u64,
    pub networks: u64,
    pub reconstruction_failures: u64,
    /// Counts of carry component values (real and imaginary pooled).
    pub carry_histogram: BTreeMap<i64, u64>,
}

/// Exercises the reconstruction identity on random networks: every draw
/// picks a network, a receiving node, uniform symbols and CN(0,1) noise.
/// A fresh network is drawn every `per_network` draws.
pub fn genie_stress(draws: u64, nodes: usize, per_network: u64, seed: u64) -> Result<GenieStress> {
    let per_network = per_network.max(1);
    let networks = draws.div_ceil(per_network);
    let parts = (0..networks)
        .into_par_iter()
        .map(|k| -> Result<(u64, BTreeMap<i64, u64>)> {
            let t = random_relay_topology(nodes, 0.6, (0.5, 300.0), rng::derive_seed(seed, k))?;
            let dsm = derive_dsm(&t)?;
            let mut r = rng::stream(seed, k);
            let mut failures = 0;
            let mut hist = BTreeMap::new();
            for _ in 0..per_network.min(draws - k * per_network) {
                let j = r.random_range(1..t.node_count());
                let mut exact = CNum::new(0.0, 0.0);
                let mut y_dsm = GInt::new(0, 0);
                for l in dsm.incoming(j) {
                    let x = FixedInput::from_index(dsm.n(), r.random_range(0..dsm.alphabet_size()))?;
                    exact += l.gain * x.value();
                    y_dsm += quantize(to_cnum(l.qgain) * x.value())?;
                }
                let z = cn01(&mut r);
                let y = exact + z;
                let split = genie_decompose(y, y_dsm, exact - to_cnum(y_dsm), z)?;
                if split.reconstruct(y)? != y_dsm {
                    failures += 1;
                }
                *hist.entry(split.carry.re).or_default() += 1;
                *hist.entry(split.carry.im).or_default() += 1;
            }
            Ok((failures, hist))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = GenieStress { draws, networks, reconstruction_failures: 0, carry_histogram: BTreeMap::new() };
    for (f, h) in parts {
        out.reconstruction_failures += f;
        for (c, n) in h {
            *out.carry_histogram.entry(c).or_default() += n;
        }
    }
    Ok(out)
}

// ------------------------------------------------------------ max entropy

/// Entropy of the geometric law on {0, 1, …} with the given mean.
pub fn geometric_entropy(mean: f64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    (1.0 + mean) * (1.0 + mean).log2() - mean * mean.log2()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxEntropy {
    /// Entropy of the optimal law of `z = |x_R|²` on `{0, …, support_cap}`.
    pub h_z: f64,
    /// Ratio of consecutive probabilities of the optimal (truncated
    /// geometric) law.
    pub ratio: f64,
    /// `2·(1 + h_z)`, the bound on the entropy of the Gaussian integer.
    pub bound: f64,
}

fn truncated_geometric(ratio: f64, cap: u64) -> Vec<f64> {
    let mut p = Vec::with_capacity(cap as usize + 1);
    let mut w = 1.0;
    for _ in 0..=cap {
        p.push(w);
        w *= ratio;
    }
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

fn mean_of(p: &[f64]) -> f64 {
    p.iter().enumerate().map(|(k, &x)| k as f64 * x).sum()
}

/// Largest entropy of a law on `{0, …, support_cap}` with mean at most
/// `power_bound`. The maximizer is a truncated geometric law whose ratio is
/// found by bisection on the mean.
pub fn max_entropy_integer_power(power_bound: f64, support_cap: u64) -> Result<MaxEntropy> {
    if !(power_bound > 0.0 && power_bound.is_finite()) {
        return Err(Error::Domain(format!("power bound must be positive, got {power_bound}")));
    }
    if support_cap < 16 {
        return Err(Error::Domain(format!("support cap must be at least 16, got {support_cap}")));
    }
    let ratio = if power_bound >= support_cap as f64 / 2.0 {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mean_of(&truncated_geometric(mid, support_cap)) < power_bound {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    let p = truncated_geometric(ratio, support_cap);
    let h_z = crate::info::entropy_of_weights(&p);
    Ok(MaxEntropy { h_z, ratio, bound: 2.0 * (1.0 + h_z) })
}

/// Exact entropy of `quantize(z)` for a circular complex Gaussian with the
/// given variance per component. Truncation toward zero maps `(−1, 1)` to
/// 0 and `[k, k+1)` to `k`.
pub fn quantized_gaussian_entropy(variance_per_component: f64) -> Result<f64> {
    let v = variance_per_component;
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::Domain(format!("variance must be non-negative, got {v}")));
    }
    if v == 0.0 {
        return Ok(0.0);
    }
    let s = (2.0 * v).sqrt();
    // upper tail P(X ≥ a)
    let tail = |a: f64| 0.5 * libm::erfc(a / s);
    let mut probs = vec![1.0 - 2.0 * tail(1.0)];
    let mut k = 1.0;
    while 2.0 * tail(k) >= 1e-12 {
        let p = tail(k) - tail(k + 1.0);
        probs.push(p);
        probs.push(p);
        k += 1.0;
    }
    // components are independent
    Ok(2.0 * crate::info::entropy_of_weights(&probs))
}

#[cfg(test)]
mod test {
    use super::*;

    fn c(re: f64, im: f64) -> CNum {
        CNum::new(re, im)
    }

    #[test]
    fn constants_examples() {
        let g = gap_constants(2, 2, 1).unwrap();
        assert!((g.kappa_node - (11f64.log2() + 10.0)).abs() < 1e-12);
        assert!((g.kappa_node - 13.4594).abs() < 1e-4);
        assert!((g.kappa_relay - 26.9189).abs() < 1e-4);
        assert!((g.kappa_ic - (12.0 + 289f64.log2())).abs() < 1e-12);
        assert!((g.kappa_ic - 20.1752).abs() < 1e-3);
        assert_eq!(g.kappa_ic_lift, g.kappa_node);
        assert_eq!(g.kappa_mimo_relay, g.kappa_relay);
        assert_eq!(g.kappa_mimo_ic, g.kappa_ic);
        assert_eq!(g.kappa_mimo_ic_lift, g.kappa_ic_lift);
        assert!(gap_constants(0, 1, 1).is_err());
    }

    #[test]
    fn genie_examples() {
        let s = genie_decompose(c(2.3, 0.0), GInt::new(1, 0), c(0.7, 0.0), c(0.6, 0.0)).unwrap();
        assert_eq!((s.qv, s.qz, s.carry), (GInt::new(0, 0), GInt::new(0, 0), GInt::new(1, 0)));
        assert_eq!(s.reconstruct(c(2.3, 0.0)).unwrap(), GInt::new(1, 0));
        let s = genie_decompose(c(0.5, 0.0), GInt::new(1, 0), c(-0.6, 0.0), c(0.1, 0.0)).unwrap();
        assert_eq!(s.carry, GInt::new(-1, 0));
        let s = genie_decompose(c(3.7, -2.2), GInt::new(3, -2), c(0.0, 0.0), c(0.7, -0.2)).unwrap();
        assert_eq!(s.carry, GInt::new(0, 0));
        assert!(genie_decompose(c(5.0, 0.0), GInt::new(1, 0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn side_info_entropy() {
        let t = Topology::relay(3, &[(0, 1, c(7.3, 7.6)), (0, 2, c(2.0, 1.0)), (1, 2, c(-3.1, 4.4))]).unwrap();
        let e = genie_side_info_entropy(&t, 2, 20_000, 3).unwrap();
        assert_eq!(e.reconstruction_failures, 0);
        assert!(e.within_bound && e.carry_max_abs <= 2);
        let quiet = genie_side_info_entropy_with(&t, 2, 20_000, 3, GenieNoise::None).unwrap();
        assert_eq!(quiet.h_qz, 0.0);
        let none = genie_side_info_entropy(&t, 0, 20_000, 3).unwrap();
        assert_eq!(none.total, 0.0);
        assert_eq!(genie_side_info_entropy(&t, 2, 20_000, 3).unwrap(), e);
    }

    #[test]
    fn stress_small() {
        let s = genie_stress(20_000, 5, 1000, 11).unwrap();
        assert_eq!(s.reconstruction_failures, 0);
        assert!(s.carry_histogram.keys().all(|c| c.abs() <= 2));
        assert_eq!(s.carry_histogram.values().sum::<u64>(), 40_000);
    }

    #[test]
    fn entropy_bounds() {
        assert_eq!(geometric_entropy(1.0), 2.0);
        let m = max_entropy_integer_power(1.0, 4096).unwrap();
        assert!((m.h_z - 2.0).abs() < 1e-9, "{m:?}");
        assert!(m.bound <= 6.0 + 1e-9);
        let a = max_entropy_integer_power(1.0, 64).unwrap().h_z;
        assert!((a - m.h_z).abs() < 1e-6);
        assert!(max_entropy_integer_power(1e-9, 64).unwrap().h_z < 1e-6);
        assert!(max_entropy_integer_power(0.0, 64).is_err());
        assert!(max_entropy_integer_power(1.0, 8).is_err());
        let full = quantized_gaussian_entropy(0.5).unwrap();
        assert!(full > 0.0 && full <= 6.0);
        assert!(quantized_gaussian_entropy(1.0 / 16.0).unwrap() <= full);
        assert_eq!(quantized_gaussian_entropy(0.0).unwrap(), 0.0);
        assert!(quantized_gaussian_entropy(1e-6).unwrap() < 1e-9);
    }
}
