//! Running a lifted code over the Gaussian network, and measuring the side
//! information `H(y'_j | y_j)` that sets the prune exponents.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::code::DsmCode;
use super::decode::lift_decode_step;
use super::extend::{block_extend, ExtendedCode};
use super::prune::LiftedCode;
use crate::error::{Error, Result};
use crate::network::{NodeId, Role, Topology};
use crate::qarith::CNum;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Noise {
    /// CN(0,1) at every receiver.
    Unit,
    /// Noiseless Gaussian network.
    None,
}

fn cn01(r: &mut rng::Rng) -> CNum {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(r);
    let im: f64 = StandardNormal.sample(r);
    CNum::new(re * s, im * s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub trials: usize,
    pub block_errors: usize,
    pub block_error_rate: f64,
    /// `log2|C_G| / mN`.
    pub empirical_rate: f64,
    pub code_rate: f64,
    pub exponent_sum: f64,
    /// `R − Σ exponents − empirical_rate`: the finite-m loss beyond the
    /// pruning itself.
    pub slack: f64,
    pub codebook_log2_size: f64,
    pub codebook_exact: bool,
    pub decoder_exhaustions: usize,
    pub m: usize,
    pub block_len: usize,
    pub noise: Noise,
    pub seed: u64,
}

struct Outcome {
    error: bool,
    exhaustions: usize,
}

fn one_trial(lifted: &LiftedCode, r: &mut rng::Rng, noise: Noise) -> Result<Outcome> {
    let ext = lifted.extended();
    let t = ext.topology();
    let len = ext.block_len();
    let msgs = lifted.draw(r).ok_or_else(|| Error::Invariant("pruned codebook is empty".into()))?;
    let mut tx: Vec<Option<Vec<CNum>>> = vec![None; t.node_count()];
    let order = t.topological_order().expect("leveled network");
    let mut exhaustions = 0;
    let mut decoded_msgs = None;
    for j in order {
        if t.nodes()[j].role == Role::Source {
            tx[j] = Some(ext.codeword(&msgs).iter().map(|x| x.value()).collect());
            continue;
        }
        if t.in_edges(j).is_empty() {
            continue;
        }
        let mut y = vec![CNum::new(0.0, 0.0); len];
        for &k in t.in_edges(j) {
            let e = &t.edges()[k];
            if let Some(x) = &tx[e.from] {
                let h = e.gain();
                for (yt, xt) in y.iter_mut().zip(x) {
                    *yt += h * xt;
                }
            }
        }
        if noise == Noise::Unit {
            for yt in &mut y {
                *yt += cn01(r);
            }
        }
        let pos = ext.node_position(j)?;
        let d = lift_decode_step(lifted, pos, &y);
        exhaustions += d.exhausted as usize;
        if j == t.destination() {
            let alpha = &ext.table().alphabets[pos];
            decoded_msgs = Some(d.seq.iter().map(|&b| ext.base().decode(&alpha[b as usize])).collect::<Vec<_>>());
        } else if ext.base().relay_maps().contains_key(&j) {
            let x = lifted
                .relay_transmit(j, pos, &d.seq)
                .ok_or_else(|| Error::Invariant(format!("relay {j} cannot map its decoded reception")))?;
            tx[j] = Some(x.iter().map(|v| v.value()).collect());
        }
    }
    let sent: Vec<Option<usize>> = msgs.iter().map(|&w| Some(w)).collect();
    Ok(Outcome { error: decoded_msgs.as_ref() != Some(&sent), exhaustions })
}

/// Sends uniformly drawn codewords of the pruned codebook through the
/// Gaussian network; every receiving node decodes onto its pruned set and
/// relays re-encode blockwise. Deterministic given `seed`.
pub fn run_lifted(lifted: &LiftedCode, trials: usize, seed: u64, noise: Noise) -> Result<TrialReport> {
    if lifted.is_empty() {
        return Err(Error::Invariant("pruned codebook is empty; nothing to send".into()));
    }
    let base = rng::derive_seed(seed, 0x7a1a);
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|k| one_trial(lifted, &mut rng::stream(base, k as u64), noise))
        .collect::<Result<Vec<_>>>()?;
    let block_errors = outcomes.iter().filter(|o| o.error).count();
    let ext = lifted.extended();
    let code_rate = ext.rate();
    let exponent_sum = lifted.exponent_sum();
    let empirical_rate = lifted.rate();
    Ok(TrialReport {
        trials,
        block_errors,
        block_error_rate: if trials == 0 { 0.0 } else { block_errors as f64 / trials as f64 },
        empirical_rate,
        code_rate,
        exponent_sum,
        slack: code_rate - exponent_sum - empirical_rate,
        codebook_log2_size: lifted.codebook().log2_size,
        codebook_exact: lifted.codebook().exact,
        decoder_exhaustions: outcomes.iter().map(|o| o.exhaustions).sum(),
        m: ext.m(),
        block_len: ext.block_len(),
        noise,
        seed,
    })
}

// ----------------------------------------------------------- side information

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GenieExponent {
    pub node: NodeId,
    /// `H(y'_j | y_j)` for one base block, in bits.
    pub bits_per_block: f64,
    /// The same divided by N: the prune exponent.
    pub bits_per_use: f64,
}

/// Estimates `H(y'_j | y_j)` at every receiving node under the base code
/// with uniform messages and CN(0,1) noise, using the exact posterior over
/// base messages: `E[−log2 P(y'_j | y_j)]`.
pub fn genie_exponents(t: &Topology, code: &DsmCode, samples: usize, seed: u64) -> Result<Vec<GenieExponent>> {
    let ext = block_extend(t, code, 1)?;
    genie_exponents_for(&ext, samples, seed)
}

pub fn genie_exponents_for(ext: &ExtendedCode, samples: usize, seed: u64) -> Result<Vec<GenieExponent>> {
    if samples == 0 {
        return Err(Error::Domain("need at least one sample".into()));
    }
    let t = ext.topology();
    let table = ext.table();
    let nb = ext.base().block_len();
    let q = ext.base().size();
    let mut out = Vec::with_capacity(table.nodes.len());
    for (pos, &j) in table.nodes.iter().enumerate() {
        // exact noiseless mean of every base message at node j
        let means: Vec<Vec<CNum>> = table
            .traces
            .iter()
            .map(|tr| {
                let mut mu = vec![CNum::new(0.0, 0.0); nb];
                for &k in t.in_edges(j) {
                    let e = &t.edges()[k];
                    if let Some(x) = &tr.tx[e.from] {
                        for (m, xt) in mu.iter_mut().zip(x) {
                            *m += e.gain() * xt.value();
                        }
                    }
                }
                mu
            })
            .collect();
        let sym = &table.symbols[pos];
        let chunk = 4096;
        let total: f64 = (0..samples.div_ceil(chunk))
            .into_par_iter()
            .map(|c| {
                let mut r = rng::stream(rng::derive_seed(seed, j as u64), c as u64);
                let mut acc = 0.0;
                for _ in 0..chunk.min(samples - c * chunk) {
                    let w = r.random_range(0..q);
                    let y: Vec<CNum> = means[w].iter().map(|m| m + cn01(&mut r)).collect();
                    // log-likelihoods up to a constant: −|y − μ|²
                    let ll: Vec<f64> = means
                        .iter()
                        .map(|mu| -mu.iter().zip(&y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>())
                        .collect();
                    let top = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let mut all = 0.0;
                    let mut same = 0.0;
                    for (v, l) in ll.iter().enumerate() {
                        let p = (l - top).exp();
                        all += p;
                        if sym[v] == sym[w] {
                            same += p;
                        }
                    }
                    acc += -(same / all).log2();
                }
                acc
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        let bits = (total / samples as f64).max(0.0);
        out.push(GenieExponent { node: j, bits_per_block: bits, bits_per_use: bits / nb as f64 });
    }
    Ok(out)
}

// ------------------------------------------------------------- pipeline

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentChoice {
    /// Measure `H(y'_j | y_j)/N` at each node with this many samples.
    Measured { samples: usize },
    /// The same exponent at every node, in bits per use.
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftConfig {
    pub m: usize,
    pub exponent: ExponentChoice,
    pub epsilon: f64,
    pub eta: f64,
    pub trials: usize,
    pub noise: Noise,
    pub seed: u64,
}

impl Default for LiftConfig {
    fn default() -> Self {
        Self {
            m: 8,
            exponent: ExponentChoice::Measured { samples: 20_000 },
            epsilon: 0.25,
            eta: 0.0,
            trials: 200,
            noise: Noise::Unit,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrunedNodeSummary {
    pub node: NodeId,
    pub exponent: f64,
    pub typical_size: f64,
    pub kept_size: f64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftReport {
    pub purge: super::code::PurgeReport,
    pub base_rate: f64,
    pub genie: Vec<GenieExponent>,
    pub nodes: Vec<PrunedNodeSummary>,
    pub codebook: super::prune::PrunedCodebook,
    /// `R − Σ exponents − 0.5`: the rate the lifted code should reach.
    pub rate_floor: f64,
    pub trials: Option<TrialReport>,
}

/// Purge, extend, prune and (if the pruned codebook is non-empty) run the
/// lifted code.
pub fn lift_pipeline(t: &Topology, code: &DsmCode, cfg: &LiftConfig) -> Result<LiftReport> {
    let (code, purge) = super::code::purge_zero_error(t, code)?;
    if code.size() == 0 {
        return Err(Error::Invariant("no codeword survives the zero-error purge".into()));
    }
    let ext = block_extend(t, &code, cfg.m)?;
    let (genie, exponents) = match cfg.exponent {
        ExponentChoice::Measured { samples } => {
            let base = block_extend(t, &code, 1)?;
            let g = genie_exponents_for(&base, samples, rng::derive_seed(cfg.seed, 0x9e))?;
            let e = g.iter().map(|e| e.bits_per_use).collect();
            (g, e)
        }
        ExponentChoice::Fixed(e) => (Vec::new(), vec![e]),
    };
    let opts = super::prune::PruneOptions { epsilon: cfg.epsilon, eta: cfg.eta, seed: cfg.seed };
    let lifted = super::prune::prune(&ext, &exponents, &opts)?;
    let nodes = lifted
        .nodes()
        .iter()
        .map(|p| PrunedNodeSummary {
            node: p.node,
            exponent: p.exponent,
            typical_size: p.typical.size,
            kept_size: p.size,
            exact: p.exact_size,
        })
        .collect();
    let trials = if lifted.is_empty() { None } else { Some(run_lifted(&lifted, cfg.trials, cfg.seed, cfg.noise)?) };
    Ok(LiftReport {
        purge,
        base_rate: code.rate(),
        genie,
        nodes,
        codebook: lifted.codebook().clone(),
        rate_floor: code.rate() - lifted.exponent_sum() - 0.5,
        trials,
    })
}
