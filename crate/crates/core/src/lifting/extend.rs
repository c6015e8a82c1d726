//! Block extension of a code and strongly typical reception sets.

use serde::Serialize;

use super::code::{code_model, simulate, DsmCode, Rx, Trace};
use crate::error::{Error, Result};
use crate::models::DsmModel;
use crate::network::{NodeId, Role, Topology};

/// Noiseless traces of every base message plus, for each receiving node,
/// the alphabet of blocks it can receive.
#[derive(Clone, Debug)]
pub struct BaseTable {
    pub traces: Vec<Trace>,
    /// Receiving nodes (non-sources with in-edges), ascending.
    pub nodes: Vec<NodeId>,
    /// Per receiving node: sorted distinct received blocks.
    pub alphabets: Vec<Vec<Rx>>,
    /// Per receiving node, per message: index into the alphabet.
    pub symbols: Vec<Vec<u16>>,
}

pub fn base_table(t: &Topology, m: &DsmModel, code: &DsmCode) -> Result<BaseTable> {
    let traces = (0..code.size()).map(|w| simulate(t, m, code, w)).collect::<Result<Vec<_>>>()?;
    if let Some(w) = traces.iter().enumerate().position(|(w, tr)| tr.decoded != Some(w)) {
        return Err(Error::Invariant(format!(
            "codeword {w} is not decoded correctly; purge the code to zero error first"
        )));
    }
    let nodes: Vec<NodeId> = (0..t.node_count())
        .filter(|&j| t.nodes()[j].role != Role::Source && !t.in_edges(j).is_empty())
        .collect();
    let mut alphabets = Vec::with_capacity(nodes.len());
    let mut symbols = Vec::with_capacity(nodes.len());
    for &j in &nodes {
        let mut alpha: Vec<Rx> = traces.iter().map(|tr| tr.rx[j].clone().expect("receiving node")).collect();
        alpha.sort();
        alpha.dedup();
        if alpha.len() > u16::MAX as usize {
            return Err(Error::TooLarge {
                what: format!("reception alphabet of node {j}"),
                size: alpha.len() as u128,
                limit: u16::MAX as u128,
                hint: "use a smaller base code",
            });
        }
        let sym = traces
            .iter()
            .map(|tr| alpha.binary_search(tr.rx[j].as_ref().unwrap()).unwrap() as u16)
            .collect();
        alphabets.push(alpha);
        symbols.push(sym);
    }
    Ok(BaseTable { traces, nodes, alphabets, symbols })
}

/// The code used `m` times back to back: codewords are sequences of `m`
/// base messages. Codewords are never materialized unless asked for.
#[derive(Clone, Debug)]
pub struct ExtendedCode {
    topology: Topology,
    model: DsmModel,
    base: DsmCode,
    table: BaseTable,
    m: usize,
}

/// Largest extended codebook accepted: codewords are indexed by `u64`.
pub const MAX_EXTENDED_LOG2: f64 = 63.0;

pub fn block_extend(t: &Topology, code: &DsmCode, m: usize) -> Result<ExtendedCode> {
    if m == 0 {
        return Err(Error::Domain("extension factor m must be at least 1".into()));
    }
    let model = code_model(t, code)?;
    if !code.is_blockwise() {
        return Err(Error::Refused(
            "per-time relay maps need the interleaved schedule; block extension uses blockwise maps".into(),
        ));
    }
    let log2 = m as f64 * (code.size() as f64).log2();
    if log2 > MAX_EXTENDED_LOG2 {
        return Err(Error::TooLarge {
            what: "extended codebook".into(),
            size: 2f64.powf(log2) as u128,
            limit: 1 << 63,
            hint: "reduce m",
        });
    }
    let table = base_table(t, &model, code)?;
    Ok(ExtendedCode { topology: t.clone(), model, base: code.clone(), table, m })
}

impl ExtendedCode {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn base(&self) -> &DsmCode {
        &self.base
    }

    pub fn table(&self) -> &BaseTable {
        &self.table
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn model(&self) -> &DsmModel {
        &self.model
    }

    /// `mN`.
    pub fn block_len(&self) -> usize {
        self.m * self.base.block_len()
    }

    pub fn size(&self) -> u64 {
        (self.base.size() as u64).pow(self.m as u32)
    }

    pub fn log2_size(&self) -> f64 {
        self.m as f64 * (self.base.size() as f64).log2()
    }

    /// Same as the base rate.
    pub fn rate(&self) -> f64 {
        self.log2_size() / self.block_len() as f64
    }

    /// Messages of codeword `index` (mixed radix, first block least significant).
    pub fn messages(&self, mut index: u64) -> Vec<usize> {
        let q = self.base.size() as u64;
        (0..self.m)
            .map(|_| {
                let w = index % q;
                index /= q;
                w as usize
            })
            .collect()
    }

    pub fn index(&self, messages: &[usize]) -> u64 {
        let q = self.base.size() as u64;
        messages.iter().rev().fold(0, |acc, &w| acc * q + w as u64)
    }

    pub fn codeword(&self, messages: &[usize]) -> Vec<crate::qarith::FixedInput> {
        messages.iter().flat_map(|&w| self.base.codeword(w).iter().copied()).collect()
    }

    /// All codewords as message sequences, refusing above `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<Vec<usize>>> {
        if self.size() > cap {
            return Err(Error::TooLarge {
                what: "extended codebook".into(),
                size: self.size() as u128,
                limit: cap as u128,
                hint: "sample codewords instead",
            });
        }
        Ok((0..self.size()).map(|i| self.messages(i)).collect())
    }

    /// Position of `node` among the receiving nodes.
    pub fn node_position(&self, node: NodeId) -> Result<usize> {
        self.table
            .nodes
            .binary_search(&node)
            .map_err(|_| Error::Domain(format!("node {node} receives nothing")))
    }

    /// Received block symbols at the receiving node with position `pos`.
    pub fn reception(&self, pos: usize, messages: &[usize]) -> Vec<u16> {
        messages.iter().map(|&w| self.table.symbols[pos][w]).collect()
    }
}

// ---------------------------------------------------------------- typicality

/// Strongly typical received sequences at one node: sequences of `m` block
/// symbols whose symbol counts stay within `max(εm, 1)` of `m·p(b)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalSet {
    pub node: NodeId,
    pub m: usize,
    pub epsilon: f64,
    pub probs: Vec<f64>,
    pub lo: Vec<u32>,
    pub hi: Vec<u32>,
    /// Exact number of typical sequences.
    pub size: f64,
    /// `H(y'_j)` of one base block, in bits.
    pub block_entropy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TypicalSizeCheck {
    pub log2_size: f64,
    pub m_entropy: f64,
    /// `log2|T|/m − H`, the finite-m slack of the exponential size bounds.
    pub per_block_deviation: f64,
}

pub fn typical_outputs(ext: &ExtendedCode, node: NodeId, epsilon: f64) -> Result<TypicalSet> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let pos = ext.node_position(node)?;
    let alpha = ext.table.alphabets[pos].len();
    let mut counts = vec![0u64; alpha];
    for &s in &ext.table.symbols[pos] {
        counts[s as usize] += 1;
    }
    let total = ext.base.size() as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let m = ext.m;
    let slack = (epsilon * m as f64).max(1.0);
    let fuzz = 1e-9;
    let lo: Vec<u32> = probs.iter().map(|p| (m as f64 * p - slack - fuzz).ceil().max(0.0) as u32).collect();
    let hi: Vec<u32> = probs.iter().map(|p| (m as f64 * p + slack + fuzz).floor().min(m as f64) as u32).collect();
    let size = count_sequences(m, &lo, &hi);
    Ok(TypicalSet {
        node,
        m,
        epsilon,
        block_entropy: crate::info::entropy_of_counts(&counts),
        probs,
        lo,
        hi,
        size,
    })
}

/// Number of length-`m` sequences whose symbol counts lie in `[lo, hi]`.
fn count_sequences(m: usize, lo: &[u32], hi: &[u32]) -> f64 {
    // f[s] = number of arrangements of the first symbols using s positions
    let mut binom = vec![vec![0f64; m + 1]; m + 1];
    for a in 0..=m {
        binom[a][0] = 1.0;
        for b in 1..=a {
            binom[a][b] = binom[a - 1][b - 1] + if b < a { binom[a - 1][b] } else { 0.0 };
        }
    }
    let mut f = vec![0f64; m + 1];
    f[0] = 1.0;
    for (l, h) in lo.iter().zip(hi) {
        let mut g = vec![0f64; m + 1];
        for s in 0..=m {
            if f[s] == 0.0 {
                continue;
            }
            for c in *l as usize..=(*h as usize).min(m - s) {
                g[s + c] += f[s] * binom[s + c][c];
            }
        }
        f = g;
    }
    f[m]
}

impl TypicalSet {
    pub fn contains(&self, seq: &[u16]) -> bool {
        if seq.len() != self.m {
            return false;
        }
        let mut counts = vec![0u32; self.probs.len()];
        for &s in seq {
            match counts.get_mut(s as usize) {
                Some(c) => *c += 1,
                None => return false,
            }
        }
        counts.iter().zip(self.lo.iter().zip(&self.hi)).all(|(c, (l, h))| l <= c && c <= h)
    }

    pub fn size_check(&self) -> TypicalSizeCheck {
        let log2_size = self.size.log2();
        TypicalSizeCheck {
            log2_size,
            m_entropy: self.m as f64 * self.block_entropy,
            per_block_deviation: log2_size / self.m as f64 - self.block_entropy,
        }
    }

    /// Every typical sequence in lexicographic order, refusing above `cap`.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<Vec<u16>>> {
        if self.size > cap as f64 {
            return Err(Error::TooLarge {
                what: format!("typical set of node {}", self.node),
                size: self.size as u128,
                limit: cap as u128,
                hint: "use the hashed membership test",
            });
        }
        let mut out = Vec::with_capacity(self.size as usize);
        let mut seq = Vec::with_capacity(self.m);
        let mut counts = vec![0u32; self.probs.len()];
        self.walk(&mut seq, &mut counts, &mut out);
        Ok(out)
    }

    fn walk(&self, seq: &mut Vec<u16>, counts: &mut [u32], out: &mut Vec<Vec<u16>>) {
        let left = (self.m - seq.len()) as u32;
        let need: u32 = counts.iter().zip(&self.lo).map(|(c, l)| l.saturating_sub(*c)).sum();
        if need > left {
            return;
        }
        if left == 0 {
            out.push(seq.clone());
            return;
        }
        for s in 0..self.probs.len() {
            if counts[s] < self.hi[s] {
                counts[s] += 1;
                seq.push(s as u16);
                self.walk(seq, counts, out);
                seq.pop();
                counts[s] -= 1;
            }
        }
    }
}
