//! Random pruning of typical reception sets and the surviving codebook.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng as _;
use serde::Serialize;

use super::code::RelayMap;
use super::extend::{typical_outputs, ExtendedCode, TypicalSet};
use crate::error::{Error, Result};
use crate::network::NodeId;
use crate::qarith::CNum;
use crate::rng;

/// Typical sets up to this size are materialized and pruned to an exact
/// size; larger ones use a keyed hash to keep each sequence independently.
pub const EXACT_SELECTION_CAP: u64 = 1 << 20;
/// Extended codebooks up to this size are scanned exhaustively.
pub const EXACT_CODEBOOK_CAP: u64 = 1 << 20;
/// Codewords drawn to estimate the pruned codebook when it is not scanned.
pub const CODEBOOK_SAMPLES: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq)]
pub enum Selection {
    /// A uniformly chosen subset of exactly the stated size.
    Exact(HashSet<Vec<u16>>),
    /// Keep a typical sequence iff its keyed hash falls below `threshold`.
    Hashed { key: u64, threshold: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrunedNode {
    pub node: NodeId,
    pub typical: TypicalSet,
    /// Bits per channel use removed at this node.
    pub exponent: f64,
    /// `log2` of the kept fraction, `−m(N·exponent + 2η)`.
    pub keep_log2: f64,
    /// Exact size of `S_j`, or its expectation under hashed selection.
    pub size: f64,
    pub exact_size: bool,
    #[serde(skip)]
    pub selection: Selection,
}

impl PrunedNode {
    pub fn contains(&self, seq: &[u16]) -> bool {
        self.typical.contains(seq)
            && match &self.selection {
                Selection::Exact(set) => set.contains(seq),
                Selection::Hashed { key, threshold } => seq_hash(*key, seq) < *threshold,
            }
    }
}

fn seq_hash(key: u64, seq: &[u16]) -> u64 {
    seq.iter().fold(rng::derive_seed(key, seq.len() as u64), |h, &s| rng::derive_seed(h, s as u64 + 1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrunedCodebook {
    /// True when every codeword of the extended code was checked.
    pub exact: bool,
    /// Exact size, or the sampling estimate `|C_0|·hits/samples`.
    pub size: f64,
    pub log2_size: f64,
    pub samples: usize,
    pub hits: usize,
    /// Predicted `log2|C_G| ≈ log2|C_0| − m·N·Σ exponents` (plus typicality loss).
    pub predicted_log2_size: f64,
    /// Members found (all of them when `exact`), as message sequences.
    #[serde(skip)]
    pub members: Vec<Vec<usize>>,
}

/// A lifted code: the extended code, the pruned reception sets and the
/// codebook that survives them. Immutable once built.
#[derive(Clone, Debug)]
pub struct LiftedCode {
    ext: ExtendedCode,
    nodes: Vec<PrunedNode>,
    codebook: PrunedCodebook,
    epsilon: f64,
    eta: f64,
    seed: u64,
    /// Per receiving node, per block symbol: mean noiseless Gaussian
    /// reception over the base messages producing that symbol.
    means: Vec<Vec<Vec<CNum>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PruneOptions {
    pub epsilon: f64,
    pub eta: f64,
    pub seed: u64,
}

impl Default for PruneOptions {
    fn default() -> Self {
        Self { epsilon: 0.25, eta: 0.0, seed: 0 }
    }
}

/// Prunes every receiving node. `exponents` is either one value for every
/// node or one per receiving node (ascending node id), in bits per use.
pub fn prune(ext: &ExtendedCode, exponents: &[f64], opts: &PruneOptions) -> Result<LiftedCode> {
    let table = ext.table();
    let count = table.nodes.len();
    if !(exponents.len() == 1 || exponents.len() == count) {
        return Err(Error::Domain(format!("need 1 or {count} prune exponents, got {}", exponents.len())));
    }
    if exponents.iter().any(|e| !(*e >= 0.0 && e.is_finite())) || !(opts.eta >= 0.0) {
        return Err(Error::Domain("prune exponents and eta must be non-negative".into()));
    }
    let m = ext.m() as f64;
    let nb = ext.base().block_len() as f64;
    let mut nodes = Vec::with_capacity(count);
    let mut r = rng::stream(rng::derive_seed(opts.seed, 0x5e1e), 0);
    for (pos, &node) in table.nodes.iter().enumerate() {
        let typical = typical_outputs(ext, node, opts.epsilon)?;
        let exponent = exponents[if exponents.len() == 1 { 0 } else { pos }];
        let keep_log2 = -m * (nb * exponent + 2.0 * opts.eta);
        let (selection, size, exact_size) = if typical.size <= EXACT_SELECTION_CAP as f64 {
            let all = typical.enumerate(EXACT_SELECTION_CAP)?;
            let k = ((all.len() as f64 * keep_log2.exp2()).ceil() as usize).min(all.len());
            let chosen: HashSet<Vec<u16>> = sample(&mut r, all.len(), k).into_iter().map(|i| all[i].clone()).collect();
            (Selection::Exact(chosen), k as f64, true)
        } else {
            let threshold = if keep_log2 >= 0.0 { u64::MAX } else { (keep_log2.exp2() * u64::MAX as f64) as u64 };
            let key = r.random::<u64>();
            (Selection::Hashed { key, threshold }, typical.size * keep_log2.exp2().min(1.0), false)
        };
        nodes.push(PrunedNode { node, typical, exponent, keep_log2, size, exact_size, selection });
    }
    let member = |msgs: &[usize]| nodes.iter().enumerate().all(|(pos, p)| p.contains(&ext.reception(pos, msgs)));
    let predicted_log2_size = ext.log2_size() + nodes.iter().map(|p| p.keep_log2).sum::<f64>();
    let codebook = if ext.size() <= EXACT_CODEBOOK_CAP {
        let members: Vec<Vec<usize>> = (0..ext.size()).map(|i| ext.messages(i)).filter(|w| member(w)).collect();
        let size = members.len() as f64;
        PrunedCodebook {
            exact: true,
            size,
            log2_size: size.log2(),
            samples: ext.size() as usize,
            hits: members.len(),
            predicted_log2_size,
            members,
        }
    } else {
        let mut members = Vec::new();
        for _ in 0..CODEBOOK_SAMPLES {
            let w = ext.messages(r.random_range(0..ext.size()));
            if member(&w) {
                members.push(w);
            }
        }
        let hits = members.len();
        let size = ext.size() as f64 * hits as f64 / CODEBOOK_SAMPLES as f64;
        PrunedCodebook {
            exact: false,
            size,
            log2_size: size.log2(),
            samples: CODEBOOK_SAMPLES,
            hits,
            predicted_log2_size,
            members,
        }
    };
    let means = nominal_means(ext);
    Ok(LiftedCode {
        ext: ext.clone(),
        nodes,
        codebook,
        epsilon: opts.epsilon,
        eta: opts.eta,
        seed: opts.seed,
        means,
    })
}

fn nominal_means(ext: &ExtendedCode) -> Vec<Vec<Vec<CNum>>> {
    let t = ext.topology();
    let table = ext.table();
    let nb = ext.base().block_len();
    table
        .nodes
        .iter()
        .enumerate()
        .map(|(pos, &j)| {
            let alpha = table.alphabets[pos].len();
            let mut sum = vec![vec![CNum::new(0.0, 0.0); nb]; alpha];
            let mut count = vec![0usize; alpha];
            for (w, tr) in table.traces.iter().enumerate() {
                let b = table.symbols[pos][w] as usize;
                count[b] += 1;
                for &k in t.in_edges(j) {
                    let e = &t.edges()[k];
                    if let Some(x) = &tr.tx[e.from] {
                        for time in 0..nb {
                            sum[b][time] += e.gain() * x[time].value();
                        }
                    }
                }
            }
            sum.into_iter().zip(count).map(|(s, c)| s.into_iter().map(|v| v / c as f64).collect()).collect()
        })
        .collect()
}

impl LiftedCode {
    pub fn extended(&self) -> &ExtendedCode {
        &self.ext
    }

    pub fn nodes(&self) -> &[PrunedNode] {
        &self.nodes
    }

    pub fn codebook(&self) -> &PrunedCodebook {
        &self.codebook
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn means(&self, pos: usize) -> &[Vec<CNum>] {
        &self.means[pos]
    }

    pub fn is_empty(&self) -> bool {
        self.codebook.members.is_empty()
    }

    /// Whether a codeword of the extended code survives pruning.
    pub fn contains(&self, messages: &[usize]) -> bool {
        self.nodes.iter().enumerate().all(|(pos, p)| p.contains(&self.ext.reception(pos, messages)))
    }

    /// Rate `log2|C_G| / mN` in bits per use (0 when empty).
    pub fn rate(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.codebook.log2_size / self.ext.block_len() as f64
        }
    }

    /// Sum of the per-node prune exponents.
    pub fn exponent_sum(&self) -> f64 {
        self.nodes.iter().map(|p| p.exponent).sum()
    }

    /// Uniform draw from the pruned codebook (rejection sampling when it
    /// was not enumerated). `None` if no member can be found.
    pub fn draw(&self, r: &mut rng::Rng) -> Option<Vec<usize>> {
        if self.codebook.exact {
            if self.codebook.members.is_empty() {
                return None;
            }
            return Some(self.codebook.members[r.random_range(0..self.codebook.members.len())].clone());
        }
        if self.codebook.members.is_empty() {
            return None;
        }
        for _ in 0..1 << 22 {
            let w = self.ext.messages(r.random_range(0..self.ext.size()));
            if self.contains(&w) {
                return Some(w);
            }
        }
        None
    }

    /// Blockwise relay map of `node` applied to a decoded symbol sequence.
    pub(crate) fn relay_transmit(&self, node: NodeId, pos: usize, seq: &[u16]) -> Option<Vec<crate::qarith::FixedInput>> {
        let Some(RelayMap::Block(table)) = self.ext.base().relay_maps().get(&node) else {
            return None;
        };
        let alpha = &self.ext.table().alphabets[pos];
        let mut out = Vec::with_capacity(self.ext.block_len());
        for &b in seq {
            out.extend(table.get(&alpha[b as usize])?.iter().copied());
        }
        Some(out)
    }
}
