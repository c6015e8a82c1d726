//! Interference channels: the Gaussian-to-discrete input transformation
//! and the two-sided rate comparison between the Gaussian network and its
//! discrete superposition model.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{gap_constants, genie_side_info_entropy};
use crate::capacity::{dsm_mi_exact, InputLaw, InputProfile};
use crate::error::{Error, Result};
use crate::models::{derive_dsm, DsmModel};
use crate::network::{Mode, NodeId, Topology};
use crate::qarith::{quantize, to_cnum, CNum, FixedInput, MAX_BIT_DEPTH};
use crate::rng;

/// `x − [x]`, componentwise in (−1, 1).
pub fn fractional(x: CNum) -> Result<CNum> {
    Ok(x - to_cnum(quantize(x)?))
}

/// Maps a sample of a unit-power input to a valid discrete input:
/// fractional part, shifted by `1 + i`, scaled by `1/2√2`, truncated to
/// `n` bits. Fails only for non-finite `x` or an unsupported `n`.
pub fn ic_input_transform(x: CNum, n: u32) -> Result<FixedInput> {
    if n > MAX_BIT_DEPTH {
        return Err(Error::Domain(format!("bit depth {n} exceeds {MAX_BIT_DEPTH}")));
    }
    let f = fractional(x)?;
    // truncating (f + 1)/2√2 to n bits of √2·c is floor((f + 1)·2^{n−1});
    // computing it that way avoids rounding in the 1/2√2 factor
    let limit = 1u64 << n;
    let bits = |v: f64| (((v + 1.0) * (limit as f64 / 2.0)).floor().max(0.0) as u64).min(limit - 1);
    FixedInput::new(n, bits(f.re), bits(f.im))
}

// ------------------------------------------------------------ exact laws

/// `P(a ≤ frac(X) < c)` for `X ~ N(0, 1/2)` and `−1 ≤ a < c ≤ 1`.
fn frac_interval(a: f64, c: f64) -> f64 {
    let mut p = 0.0;
    // positive part: X ∈ [k + a, k + c); the CDF is 1 − erfc(t)/2
    let (pa, pc) = (a.max(0.0), c.max(0.0));
    if pc > pa {
        for k in 0..16 {
            let k = k as f64;
            p += 0.5 * (libm::erfc(k + pa) - libm::erfc(k + pc));
        }
    }
    // negative part: X ∈ [a − k, c − k); the CDF is erfc(−t)/2
    let (na, nc) = (a.min(0.0), c.min(0.0));
    if nc > na {
        for k in 0..16 {
            let k = k as f64;
            p += 0.5 * (libm::erfc(k - nc) - libm::erfc(k - na));
        }
    }
    p
}

/// Law of one bit-field of [`ic_input_transform`] applied to a CN(0,1)
/// sample: bits `b` occur iff `frac ∈ [b·2^{1−n} − 1, (b+1)·2^{1−n} − 1)`.
fn component_law(n: u32) -> Vec<f64> {
    let levels = 1usize << n;
    let step = 2.0 / levels as f64;
    (0..levels).map(|b| frac_interval(b as f64 * step - 1.0, (b + 1) as f64 * step - 1.0)).collect()
}

/// Exact law of `ic_input_transform(x, n)` for `x ~ CN(0,1)`.
pub fn transformed_gaussian_law(n: u32) -> Result<Vec<(FixedInput, f64)>> {
    let p = component_law(n);
    let total: f64 = p.iter().sum();
    let mut out = Vec::with_capacity(p.len() * p.len());
    for (re, &pr) in p.iter().enumerate() {
        for (im, &pi) in p.iter().enumerate() {
            out.push((FixedInput::new(n, re as u64, im as u64)?, pr * pi / (total * total)));
        }
    }
    Ok(out)
}

// ------------------------------------------------------------ surrogate

/// Small-alphabet stand-in for CN(0,1): each component on
/// `{−1.5, −1, …, 1.5}` with weights `∝ exp(−x²)`.
pub fn surrogate_law() -> Vec<(CNum, f64)> {
    let grid: Vec<f64> = (-3..=3).map(|i| i as f64 * 0.5).collect();
    let w: Vec<f64> = grid.iter().map(|x| (-x * x).exp()).collect();
    let z: f64 = w.iter().sum();
    let mut out = Vec::with_capacity(49);
    for (a, wa) in grid.iter().zip(&w) {
        for (b, wb) in grid.iter().zip(&w) {
            out.push((CNum::new(*a, *b), wa * wb / (z * z)));
        }
    }
    out
}

fn merge<K: Ord>(items: impl IntoIterator<Item = (K, f64)>) -> BTreeMap<K, f64> {
    let mut m = BTreeMap::new();
    for (k, p) in items {
        *m.entry(k).or_insert(0.0) += p;
    }
    m
}

fn frac_law(law: &[(CNum, f64)]) -> Result<Vec<(CNum, f64)>> {
    let keyed = law
        .iter()
        .map(|&(x, p)| fractional(x).map(|f| (((f.re * 4.0).round() as i64, (f.im * 4.0).round() as i64), p)))
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(keyed).into_iter().map(|((a, b), p)| (CNum::new(a as f64 / 4.0, b as f64 / 4.0), p)).collect())
}

fn transformed_law(law: &[(CNum, f64)], n: u32) -> Result<Vec<(FixedInput, f64)>> {
    let keyed = law
        .iter()
        .map(|&(x, p)| ic_input_transform(x, n).map(|f| (f.index(), p)))
        .collect::<Result<Vec<_>>>()?;
    merge(keyed).into_iter().map(|(i, p)| Ok((FixedInput::from_index(n, i)?, p))).collect()
}

/// Monte Carlo `I(u_k; y)` for `y = Σ_i h_i u_i + z`, discrete independent
/// `u_i`, `z ~ CN(0,1)`, using the exact mixture densities. Returns the
/// estimate and a 95% half-width.
fn gaussian_user_mi(h: &[CNum], laws: &[Vec<(CNum, f64)>], k: usize, samples: usize, seed: u64) -> (f64, f64) {
    if h[k].norm_sqr() == 0.0 || samples == 0 {
        return (0.0, 0.0);
    }
    let own: Vec<(CNum, f64)> = laws[k].iter().map(|&(u, p)| (h[k] * u, p)).collect();
    let mut other = vec![(CNum::new(0.0, 0.0), 1.0)];
    for (i, law) in laws.iter().enumerate() {
        if i == k || h[i].norm_sqr() == 0.0 {
            continue;
        }
        other = other.iter().flat_map(|&(s, p)| law.iter().map(move |&(u, q)| (s + h[i] * u, p * q))).collect();
    }
    let cum = |v: &[(CNum, f64)]| -> Vec<f64> {
        v.iter()
            .scan(0.0, |acc, &(_, p)| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    };
    let (own_cum, other_cum) = (cum(&own), cum(&other));
    let pick = |c: &[f64], u: f64| c.partition_point(|&x| x < u * c[c.len() - 1]).min(c.len() - 1);
    let chunk = 4096;
    let (sum, sum_sq) = (0..samples.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, c as u64);
            let mut d = vec![0.0; other.len()];
            let mut row = vec![0.0; own.len()];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..chunk.min(samples - c * chunk) {
                let a = pick(&own_cum, r.random());
                let b = pick(&other_cum, r.random());
                let zr: f64 = StandardNormal.sample(&mut r);
                let zi: f64 = StandardNormal.sample(&mut r);
                let y = own[a].0 + other[b].0 + CNum::new(zr, zi) * FRAC_1_SQRT_2;
                // log Σ_o w_o exp(−|y − μ_a − o|²) for every a
                for (ai, &(mu, _)) in own.iter().enumerate() {
                    let mut top = f64::NEG_INFINITY;
                    for (di, &(o, _)) in d.iter_mut().zip(&other) {
                        *di = -(y - mu - o).norm_sqr();
                        top = top.max(*di);
                    }
                    let acc: f64 = d.iter().zip(&other).map(|(di, &(_, w))| w * (di - top).exp()).sum();
                    row[ai] = top + acc.ln();
                }
                let top = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mix: f64 = row.iter().zip(&own).map(|(l, &(_, p))| p * (l - top).exp()).sum();
                let v = (row[a] - top - mix.ln()) / LN_2;
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (mean, 1.96 * (var / n).sqrt())
}

// ------------------------------------------------------------ sandwich

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichUser {
    pub user: usize,
    /// `I(x_k; y_k)` with CN(0,1) inputs, interference treated as noise.
    pub r_g: f64,
    /// `I(x'_k; y'_k)` with transformed CN(0,1) inputs (exact law).
    pub r_d: f64,
    /// `I(x'_k; y'_k)` with uniform discrete inputs.
    pub r_d_code: f64,
    /// Side information `H(y'_k | y_k)` bound from the genie decomposition.
    pub genie_bits: f64,
    /// `r_d_code − genie_bits`: lower bound on the Gaussian rate of the
    /// discrete inputs.
    pub r_g_prime: f64,
    pub forward_gap: f64,
    pub reverse_gap: f64,
    /// Surrogate: `I(x_k; y_k) − I(x̃_k; ỹ_k)` on the Gaussian channel.
    pub split_loss: f64,
    /// Surrogate: `I(x̃_k; ỹ_k) − I(x'_k; y'_k)`.
    pub residual_loss: f64,
    pub loss_half_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichPoint {
    pub scale: f64,
    pub n: u32,
    pub users: Vec<SandwichUser>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub k: usize,
    pub kappa_ic: f64,
    pub kappa_ic_lift: f64,
    /// `6K`.
    pub split_bound: f64,
    /// `log2(1 + 144K)`.
    pub residual_bound: f64,
    pub samples: usize,
    pub seed: u64,
    pub points: Vec<SandwichPoint>,
}

impl SandwichReport {
    pub fn forward_holds(&self) -> bool {
        self.users().all(|u| u.forward_gap <= self.kappa_ic)
    }

    pub fn reverse_holds(&self) -> bool {
        self.users().all(|u| u.reverse_gap <= self.kappa_ic_lift)
    }

    pub fn losses_hold(&self) -> bool {
        self.users().all(|u| u.split_loss <= self.split_bound && u.residual_loss <= self.residual_bound)
    }

    fn users(&self) -> impl Iterator<Item = &SandwichUser> {
        self.points.iter().flat_map(|p| p.users.iter())
    }
}

/// Compares Gaussian and discrete per-user rates of a K-user interference
/// network at each gain scale in `snr_grid`.
pub fn ic_sandwich(t: &Topology, snr_grid: &[f64], samples: usize, seed: u64) -> Result<SandwichReport> {
    if t.mode() != Mode::Interference || !t.is_single_antenna() {
        return Err(Error::Domain("the sandwich needs a single-antenna interference network".into()));
    }
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let pairs = t.user_pairs();
    let k = pairs.len();
    let c = gap_constants(1, k as u32, 1)?;
    let mut points = Vec::with_capacity(snr_grid.len());
    for (gi, &scale) in snr_grid.iter().enumerate() {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("grid scale {scale} must be positive")));
        }
        let s = t.scaled(scale)?;
        let point_seed = rng::derive_seed(seed, gi as u64);
        points.push(sandwich_point(&s, &pairs, scale, samples, point_seed)?);
    }
    Ok(SandwichReport {
        k,
        kappa_ic: c.kappa_ic,
        kappa_ic_lift: c.kappa_ic_lift,
        split_bound: 6.0 * k as f64,
        residual_bound: (1.0 + 144.0 * k as f64).log2(),
        samples,
        seed,
        points,
    })
}

fn sandwich_point(
    t: &Topology,
    pairs: &[(NodeId, NodeId)],
    scale: f64,
    samples: usize,
    seed: u64,
) -> Result<SandwichPoint> {
    if t.edges().is_empty() {
        let users = (0..pairs.len()).map(zero_user).collect();
        return Ok(SandwichPoint { scale, n: 0, users });
    }
    let model = derive_dsm(t)?;
    let n = model.n();
    let gauss = transformed_gaussian_law(n)?;
    let surrogate = surrogate_law();
    let frac = frac_law(&surrogate)?;
    let surrogate_dsm = transformed_law(&surrogate, n)?;
    let profile = |law: InputLaw| -> InputProfile { pairs.iter().map(|&(tx, _)| (tx, law.clone())).collect() };
    let p_gauss = profile(InputLaw::Pmf(gauss));
    let p_uniform = profile(InputLaw::Uniform);
    let p_surrogate = profile(InputLaw::Pmf(surrogate_dsm));
    let mut users = Vec::with_capacity(pairs.len());
    for (user, &(tx, rx)) in pairs.iter().enumerate() {
        let h: Vec<CNum> =
            pairs.iter().map(|&(i, _)| t.edge_between(i, rx).map_or(CNum::new(0.0, 0.0), |e| e.gain())).collect();
        let power: f64 = h.iter().map(|g| g.norm_sqr()).sum();
        let interference = power - h[user].norm_sqr();
        let r_g = (1.0 + power).log2() - (1.0 + interference).log2();
        let mi = |p: &InputProfile| -> Result<f64> { Ok(dsm_mi_exact(&model, p, &[tx], &[rx])?.value) };
        let r_d = mi(&p_gauss)?;
        let r_d_code = mi(&p_uniform)?;
        let genie_bits = genie_side_info_entropy(t, rx, samples, rng::derive_seed(seed, 0x6e + user as u64))?.total;
        let r_g_prime = r_d_code - genie_bits;
        let laws = vec![surrogate.clone(); pairs.len()];
        let fracs = vec![frac.clone(); pairs.len()];
        let (i_x, hw_x) = gaussian_user_mi(&h, &laws, user, samples, rng::derive_seed(seed, 0x100 + user as u64));
        let (i_f, hw_f) = gaussian_user_mi(&h, &fracs, user, samples, rng::derive_seed(seed, 0x200 + user as u64));
        let i_d = surrogate_mi(&model, &p_surrogate, tx, rx)?;
        users.push(SandwichUser {
            user,
            r_g,
            r_d,
            r_d_code,
            genie_bits,
            r_g_prime,
            forward_gap: r_g - r_d,
            reverse_gap: r_d_code - r_g_prime,
            split_loss: i_x - i_f,
            residual_loss: i_f - i_d,
            loss_half_width: hw_x + hw_f,
        });
    }
    Ok(SandwichPoint { scale, n, users })
}

fn surrogate_mi(model: &DsmModel, p: &InputProfile, tx: NodeId, rx: NodeId) -> Result<f64> {
    Ok(dsm_mi_exact(model, p, &[tx], &[rx])?.value)
}

fn zero_user(user: usize) -> SandwichUser {
    SandwichUser {
        user,
        r_g: 0.0,
        r_d: 0.0,
        r_d_code: 0.0,
        genie_bits: 0.0,
        r_g_prime: 0.0,
        forward_gap: 0.0,
        reverse_gap: 0.0,
        split_loss: 0.0,
        residual_loss: 0.0,
        loss_half_width: 0.0,
    }
}
