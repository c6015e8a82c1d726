//! Cut values in the three models and cross-model gap reports.
//!
//! Gaussian cuts use the closed-form log-det with i.i.d. CN(0,1) inputs, the
//! linear deterministic model uses the GF(2) rank of the cut's shift-matrix
//! transfer matrix, and the discrete superposition model uses the exact
//! mutual information under independent inputs (uniform by default).

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gf2::F2Matrix;
use crate::info::{entropy_of_weights, plugin_mi, Interner};
use crate::models::{derive_dsm, derive_dsm_with_depth, derive_ldm, BitVec, DsmModel, LdmModel};
use crate::network::{cut_transfer_matrix, enumerate_cuts_with_limit, Cut, NodeId, Topology, DEFAULT_CUT_LIMIT};
use crate::qarith::{bit_depth, to_cnum, CNum, FixedInput};
use crate::rng;

/// Default limit on exhaustive enumeration work (support sizes and
/// convolution products).
pub const DEFAULT_MI_CAP: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MiMethod {
    ExactEnumeration,
    MonteCarlo,
    ClosedForm,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McDiagnostics {
    pub samples: usize,
    pub distinct_inputs: usize,
    pub distinct_outputs: usize,
    pub distinct_pairs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MiEstimate {
    pub value: f64,
    pub half_width: f64,
    pub method: MiMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<McDiagnostics>,
}

impl MiEstimate {
    fn exact(value: f64, method: MiMethod) -> Self {
        Self { value: value.max(0.0), half_width: 0.0, method, diagnostics: None }
    }
}

/// Input distribution of one transmitting node.
#[derive(Clone, Debug, PartialEq)]
pub enum InputLaw {
    /// Uniform over all `4^n` symbols (or all `q`-bit vectors).
    Uniform,
    Point(FixedInput),
    /// Finite law; weights need not be normalized.
    Pmf(Vec<(FixedInput, f64)>),
    /// i.i.d. CN(0,1); only meaningful for Gaussian receivers.
    Gaussian,
}

/// Laws of the transmitting nodes. Nodes without an entry are silent.
pub type InputProfile = BTreeMap<NodeId, InputLaw>;

pub fn uniform_profile(nodes: &[NodeId]) -> InputProfile {
    nodes.iter().map(|&i| (i, InputLaw::Uniform)).collect()
}

// ------------------------------------------------------------------ Gaussian

/// `log2 det(I + H H†)`.
pub fn log2_det_i_plus(h: &DMatrix<CNum>) -> Result<f64> {
    if h.nrows() == 0 || h.ncols() == 0 {
        return Ok(0.0);
    }
    // the smaller Gram matrix has the same determinant
    let gram = if h.nrows() <= h.ncols() { h * h.adjoint() } else { h.adjoint() * h };
    let a = DMatrix::<CNum>::identity(gram.nrows(), gram.ncols()) + gram;
    let chol = a.cholesky().ok_or_else(|| {
        Error::Numerical("I + HH† is not numerically positive definite; rescale the gains".into())
    })?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for k in 0..l.nrows() {
        acc += l[(k, k)].re.log2();
    }
    let v = 2.0 * acc;
    if !v.is_finite() {
        return Err(Error::Numerical(
            "log-determinant is not finite; gains are too large for double precision, rescale".into(),
        ));
    }
    Ok(v.max(0.0))
}

/// Cut value with i.i.d. CN(0,1) inputs.
pub fn gaussian_cut_value(t: &Topology, c: &Cut) -> Result<MiEstimate> {
    let m = cut_transfer_matrix(t, c)?;
    Ok(MiEstimate::exact(log2_det_i_plus(&m.h)?, MiMethod::ClosedForm))
}

fn gain_matrix(t: &Topology, rows: &[NodeId], cols: &[NodeId]) -> DMatrix<CNum> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| {
        t.edge_between(cols[c], rows[r]).map_or(CNum::new(0.0, 0.0), |e| e.gain())
    })
}

// ------------------------------------------------------- linear deterministic

/// GF(2) rank of the cut's block transfer matrix of shift matrices.
pub fn ldm_cut_rank(m: &LdmModel, c: &Cut) -> Result<u32> {
    if c.omega().len() + c.complement().len() != m.node_count() {
        return Err(Error::Invariant("cut does not belong to this network".into()));
    }
    let q = m.q() as usize;
    let mut mat = F2Matrix::zeros(c.complement().len() * q, c.omega().len() * q);
    for l in m.links() {
        let (Ok(col), Ok(row)) =
            (c.omega().binary_search(&l.from), c.complement().binary_search(&l.to))
        else {
            continue;
        };
        let s = l.shift as usize;
        for k in 0..q - s {
            mat.set(row * q + k + s, col * q + k, true);
        }
    }
    Ok(mat.rank() as u32)
}

// ------------------------------------------------ discrete superposition, exact

type Key = SmallVec<[i64; 4]>;

#[inline]
fn link_out(qh: CNum, x: FixedInput) -> (i64, i64) {
    // same arithmetic as qarith::dsm_link_quantized, without the error path
    let p = qh * x.value();
    (p.re.trunc() as i64, p.im.trunc() as i64)
}

fn too_large(what: &str, size: u128, cap: u128) -> Error {
    Error::TooLarge {
        what: what.into(),
        size,
        limit: cap,
        hint: "use the Monte Carlo estimator instead",
    }
}

/// Distribution of the outputs a single node contributes to the receivers,
/// as `(output tuple, weight)` sorted by tuple.
fn node_contribution(
    m: &DsmModel,
    law: &InputLaw,
    slots: &[(usize, CNum)],
    width: usize,
    cap: u128,
) -> Result<Vec<(Key, f64)>> {
    let n = m.n();
    let key_of = |x: FixedInput| -> Key {
        let mut k: Key = SmallVec::from_elem(0, width);
        for &(slot, qh) in slots {
            let (re, im) = link_out(qh, x);
            k[2 * slot] += re;
            k[2 * slot + 1] += im;
        }
        k
    };
    let mut out: Vec<(Key, f64)> = match law {
        InputLaw::Uniform => {
            let size = 1u128 << (2 * n);
            if size > cap {
                return Err(too_large("input support", size, cap));
            }
            let side = 1u64 << n;
            let parts: Vec<HashMap<Key, f64>> = (0..side)
                .into_par_iter()
                .map(|re| {
                    let mut local = HashMap::new();
                    for im in 0..side {
                        let x = FixedInput::new(n, re, im).expect("bits within range");
                        *local.entry(key_of(x)).or_insert(0.0) += 1.0;
                    }
                    local
                })
                .collect();
            let mut all: HashMap<Key, f64> = HashMap::new();
            for part in parts {
                for (k, w) in part {
                    *all.entry(k).or_insert(0.0) += w;
                }
            }
            all.into_iter().collect()
        }
        InputLaw::Point(x) => {
            m.check_input(x)?;
            vec![(key_of(*x), 1.0)]
        }
        InputLaw::Pmf(entries) => {
            if entries.len() as u128 > cap {
                return Err(too_large("input support", entries.len() as u128, cap));
            }
            let mut all: HashMap<Key, f64> = HashMap::new();
            for (x, w) in entries {
                m.check_input(x)?;
                if !(w.is_finite() && *w >= 0.0) {
                    return Err(Error::Domain(format!("invalid probability {w} for symbol {x}")));
                }
                if *w > 0.0 {
                    *all.entry(key_of(*x)).or_insert(0.0) += w;
                }
            }
            if all.is_empty() {
                return Err(Error::Domain("input law has no mass".into()));
            }
            let mut v: Vec<(Key, f64)> = all.into_iter().collect();
            // sums above depend on entry order only through fixed input order
            v.sort_by(|a, b| a.0.cmp(&b.0));
            v
        }
        InputLaw::Gaussian => {
            return Err(Error::Refused(
                "Gaussian inputs are not symbols of the discrete superposition model".into(),
            ))
        }
    };
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

fn convolve(a: &[(Key, f64)], b: &[(Key, f64)], cap: u128) -> Result<Vec<(Key, f64)>> {
    let work = a.len() as u128 * b.len() as u128;
    if work > cap {
        return Err(too_large("output convolution", work, cap));
    }
    let mut acc: HashMap<Key, f64> = HashMap::with_capacity(a.len().max(b.len()));
    for (ka, wa) in a {
        for (kb, wb) in b {
            let k: Key = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
            *acc.entry(k).or_insert(0.0) += wa * wb;
        }
    }
    let mut v: Vec<(Key, f64)> = acc.into_iter().collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(v)
}

fn sum_of(parts: Vec<Vec<(Key, f64)>>, width: usize, cap: u128) -> Result<Vec<(Key, f64)>> {
    let mut acc = vec![(SmallVec::from_elem(0, width), 1.0)];
    for p in parts {
        acc = convolve(&acc, &p, cap)?;
    }
    Ok(acc)
}

fn weights(v: &[(Key, f64)]) -> Vec<f64> {
    v.iter().map(|(_, w)| *w).collect()
}

/// Exact `I(x_from; y'_to)` under independent inputs, with the default cap.
pub fn dsm_mi_exact(
    m: &DsmModel,
    inputs: &InputProfile,
    from: &[NodeId],
    to: &[NodeId],
) -> Result<MiEstimate> {
    dsm_mi_exact_with_cap(m, inputs, from, to, DEFAULT_MI_CAP)
}

/// Exact mutual information between the inputs of `from` and the
/// receptions at `to`. Transmitting nodes outside `from` act as independent
/// interference; nodes without a law are silent. Because receptions are sums
/// of per-node contributions, `I = H(S_from + S_other) − H(S_other)` where
/// each `S` is a sum of independent per-node output tuples.
///
/// `cap` bounds every enumeration: each node's support and each convolution
/// product.
pub fn dsm_mi_exact_with_cap(
    m: &DsmModel,
    inputs: &InputProfile,
    from: &[NodeId],
    to: &[NodeId],
    cap: u128,
) -> Result<MiEstimate> {
    for &i in from {
        if !inputs.contains_key(&i) {
            return Err(Error::Invariant(format!("node {i} is in `from` but has no input law")));
        }
    }
    let width = 2 * to.len();
    let mut ours = Vec::new();
    let mut theirs = Vec::new();
    for (&i, law) in inputs {
        let slots: Vec<(usize, CNum)> = to
            .iter()
            .enumerate()
            .filter_map(|(slot, &j)| m.qgain(i, j).map(|g| (slot, to_cnum(g))))
            .collect();
        if slots.is_empty() {
            continue;
        }
        let part = node_contribution(m, law, &slots, width, cap)?;
        if from.contains(&i) {
            ours.push(part);
        } else {
            theirs.push(part);
        }
    }
    if ours.is_empty() {
        return Ok(MiEstimate::exact(0.0, MiMethod::ExactEnumeration));
    }
    let other = sum_of(theirs, width, cap)?;
    let mut total = other.clone();
    for p in ours {
        total = convolve(&total, &p, cap)?;
    }
    let value = entropy_of_weights(&weights(&total)) - entropy_of_weights(&weights(&other));
    Ok(MiEstimate::exact(value, MiMethod::ExactEnumeration))
}

// ---------------------------------------------------------------- Monte Carlo

/// Channel model for [`mi_monte_carlo`].
#[derive(Clone, Copy, Debug)]
pub enum McModel<'a> {
    Dsm(&'a DsmModel),
    Ldm(&'a LdmModel),
    Gaussian(&'a Topology),
}

/// Minimum sample count accepted by [`mi_monte_carlo`].
pub const MIN_MC_SAMPLES: usize = 1000;

enum Sampler {
    Uniform(u64),
    Point(u64),
    Table { index: Vec<u64>, cumulative: Vec<f64> },
}

impl Sampler {
    fn new(law: &InputLaw, n: u32) -> Result<Self> {
        Ok(match law {
            InputLaw::Uniform => Sampler::Uniform(1u64 << (2 * n)),
            InputLaw::Point(x) => Sampler::Point(x.index()),
            InputLaw::Pmf(entries) => {
                let mut cumulative = Vec::with_capacity(entries.len());
                let mut index = Vec::with_capacity(entries.len());
                let mut acc = 0.0;
                for (x, w) in entries {
                    if x.n() != n || !(w.is_finite() && *w >= 0.0) {
                        return Err(Error::Domain(format!("invalid law entry {x}: {w}")));
                    }
                    acc += w;
                    cumulative.push(acc);
                    index.push(x.index());
                }
                if acc <= 0.0 {
                    return Err(Error::Domain("input law has no mass".into()));
                }
                Sampler::Table { index, cumulative }
            }
            InputLaw::Gaussian => {
                return Err(Error::Refused(
                    "Gaussian inputs cannot drive a deterministic model".into(),
                ))
            }
        })
    }

    fn draw(&self, r: &mut rng::Rng) -> u64 {
        match self {
            Sampler::Uniform(size) => r.random_range(0..*size),
            Sampler::Point(i) => *i,
            Sampler::Table { index, cumulative } => {
                let u = r.random::<f64>() * cumulative[cumulative.len() - 1];
                let k = cumulative.partition_point(|&c| c <= u).min(index.len() - 1);
                index[k]
            }
        }
    }
}

/// Plug-in Monte Carlo estimate of `I(x_from; y_to)` with a bootstrap
/// half-width. Gaussian receivers are only supported with Gaussian inputs,
/// where the closed form is returned.
pub fn mi_monte_carlo(
    model: McModel<'_>,
    inputs: &InputProfile,
    from: &[NodeId],
    to: &[NodeId],
    samples: usize,
    seed: u64,
) -> Result<MiEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::Domain(format!("need at least {MIN_MC_SAMPLES} samples, got {samples}")));
    }
    for &i in from {
        if !inputs.contains_key(&i) {
            return Err(Error::Invariant(format!("node {i} is in `from` but has no input law")));
        }
    }
    let mut r = rng::stream(seed, 0);
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    match model {
        McModel::Gaussian(t) => {
            if inputs.values().any(|l| *l != InputLaw::Gaussian) {
                return Err(Error::Refused(
                    "mutual information at Gaussian receivers needs Gaussian inputs; \
                     nonparametric continuous-output estimation is out of scope"
                        .into(),
                ));
            }
            let all: Vec<NodeId> = inputs.keys().copied().collect();
            let others: Vec<NodeId> = all.iter().copied().filter(|i| !from.contains(i)).collect();
            let v = log2_det_i_plus(&gain_matrix(t, to, &all))?
                - log2_det_i_plus(&gain_matrix(t, to, &others))?;
            return Ok(MiEstimate::exact(v, MiMethod::ClosedForm));
        }
        McModel::Dsm(m) => {
            let samplers: Vec<(NodeId, Sampler)> = inputs
                .iter()
                .map(|(&i, law)| Sampler::new(law, m.n()).map(|s| (i, s)))
                .collect::<Result<_>>()?;
            let mut tx: Vec<Option<FixedInput>> = vec![None; m.node_count()];
            let (mut xs_ids, mut ys_ids) = (Interner::default(), Interner::default());
            for _ in 0..samples {
                for (i, s) in &samplers {
                    tx[*i] = Some(FixedInput::from_index(m.n(), s.draw(&mut r))?);
                }
                let xkey: Vec<u64> = from.iter().map(|&i| tx[i].unwrap().index()).collect();
                let mut ykey = Vec::with_capacity(2 * to.len());
                for &j in to {
                    let mut y = (0i64, 0i64);
                    for l in m.incoming(j) {
                        if let Some(x) = tx[l.from] {
                            let (re, im) = link_out(to_cnum(l.qgain), x);
                            y.0 += re;
                            y.1 += im;
                        }
                    }
                    ykey.push(y.0);
                    ykey.push(y.1);
                }
                xs.push(xs_ids.id(xkey));
                ys.push(ys_ids.id(ykey));
            }
        }
        McModel::Ldm(m) => {
            if inputs.values().any(|l| *l != InputLaw::Uniform) {
                return Err(Error::Refused(
                    "the linear deterministic estimator supports uniform inputs only".into(),
                ));
            }
            let q = m.q() as usize;
            let mut tx: Vec<Option<BitVec>> = vec![None; m.node_count()];
            let (mut xs_ids, mut ys_ids) = (Interner::default(), Interner::default());
            for _ in 0..samples {
                for &i in inputs.keys() {
                    tx[i] = Some(BitVec::from_bits((0..q).map(|_| r.random::<bool>()).collect()));
                }
                let xkey: Vec<BitVec> = from.iter().map(|&i| tx[i].clone().unwrap()).collect();
                let mut ykey = Vec::with_capacity(to.len());
                for &j in to {
                    let mut y = BitVec::zeros(q);
                    for l in m.incoming(j) {
                        if let Some(x) = &tx[l.from] {
                            y = y.xor(&x.shift_down(l.shift as usize))?;
                        }
                    }
                    ykey.push(y);
                }
                xs.push(xs_ids.id(xkey));
                ys.push(ys_ids.id(ykey));
            }
        }
    }
    let est = plugin_mi(&xs, &ys, rng::derive_seed(seed, 0xb007));
    Ok(MiEstimate {
        value: est.value,
        half_width: est.half_width,
        method: MiMethod::MonteCarlo,
        diagnostics: Some(McDiagnostics {
            samples,
            distinct_inputs: est.distinct_x,
            distinct_outputs: est.distinct_y,
            distinct_pairs: est.distinct_pairs,
        }),
    })
}

// ---------------------------------------------------------------- gap report

/// How the discrete superposition bit depth is chosen for each cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DepthRule {
    /// One bit depth from every gain of the network.
    Global,
    /// Bit depth from the gains crossing the cut only.
    CutLocal,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapOptions {
    pub cut_limit: usize,
    pub mi_cap: u128,
    pub depth: DepthRule,
    /// Evaluate only these source-side sets instead of every cut.
    pub only_cuts: Option<Vec<Vec<NodeId>>>,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self { cut_limit: DEFAULT_CUT_LIMIT, mi_cap: DEFAULT_MI_CAP, depth: DepthRule::Global, only_cuts: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapRow {
    pub cut: String,
    pub omega: Vec<NodeId>,
    pub gaussian_bits: f64,
    pub ldm_bits: Option<u32>,
    pub dsm_bits: Option<f64>,
    pub dsm_depth: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dsm_note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelMinima {
    pub gaussian: f64,
    pub gaussian_cut: String,
    pub ldm: Option<u32>,
    pub ldm_cut: Option<String>,
    pub dsm: Option<f64>,
    pub dsm_cut: Option<String>,
    /// False when some cuts were refused, making `dsm` an upper bound.
    pub dsm_complete: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub rows: Vec<GapRow>,
    pub minima: ModelMinima,
    pub gaussian_minus_ldm: Option<f64>,
    pub gaussian_minus_dsm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ldm_note: Option<String>,
    pub options: GapOptions,
}

pub fn gap_report(t: &Topology, opts: &GapOptions) -> Result<GapReport> {
    let cuts = match &opts.only_cuts {
        Some(sets) => sets.iter().map(|s| Cut::new(t, s)).collect::<Result<Vec<_>>>()?,
        None => enumerate_cuts_with_limit(t, opts.cut_limit)?,
    };
    if cuts.is_empty() {
        return Err(Error::Invariant("no cuts to evaluate".into()));
    }
    let (ldm, ldm_note) = match derive_ldm(t) {
        Ok(m) => (Some(m), None),
        Err(Error::Domain(msg)) => (None, Some(msg)),
        Err(e) => return Err(e),
    };
    let global = match opts.depth {
        DepthRule::Global => Some(derive_dsm(t)?),
        DepthRule::CutLocal => None,
    };
    let mut rows = Vec::with_capacity(cuts.len());
    for c in &cuts {
        let gaussian_bits = gaussian_cut_value(t, c)?.value;
        let ldm_bits = ldm.as_ref().map(|m| ldm_cut_rank(m, c)).transpose()?;
        let local;
        let model = match &global {
            Some(m) => m,
            None => {
                let crossing: Vec<CNum> = t
                    .edges()
                    .iter()
                    .filter(|e| c.contains(e.from) && !c.contains(e.to))
                    .map(|e| e.gain())
                    .collect();
                let n = if crossing.is_empty() { 0 } else { bit_depth(&crossing)? };
                local = derive_dsm_with_depth(t, n)?;
                &local
            }
        };
        let profile = uniform_profile(c.omega());
        let (dsm_bits, dsm_note) =
            match dsm_mi_exact_with_cap(model, &profile, c.omega(), c.complement(), opts.mi_cap) {
                Ok(v) => (Some(v.value), None),
                Err(e @ Error::TooLarge { .. }) => (None, Some(e.to_string())),
                Err(e) => return Err(e),
            };
        rows.push(GapRow {
            cut: c.label(),
            omega: c.omega().to_vec(),
            gaussian_bits,
            ldm_bits,
            dsm_bits,
            dsm_depth: model.n(),
            dsm_note,
        });
    }
    let argmin_f = |f: &dyn Fn(&GapRow) -> Option<f64>| {
        rows.iter()
            .filter_map(|r| f(r).map(|v| (v, r.cut.clone())))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    };
    let (g, g_cut) = argmin_f(&|r| Some(r.gaussian_bits)).expect("at least one cut");
    let l = argmin_f(&|r| r.ldm_bits.map(f64::from));
    let d = argmin_f(&|r| r.dsm_bits);
    let minima = ModelMinima {
        gaussian: g,
        gaussian_cut: g_cut,
        ldm: l.as_ref().map(|x| x.0 as u32),
        ldm_cut: l.map(|x| x.1),
        dsm: d.as_ref().map(|x| x.0),
        dsm_cut: d.map(|x| x.1),
        dsm_complete: rows.iter().all(|r| r.dsm_bits.is_some()),
    };
    Ok(GapReport {
        gaussian_minus_ldm: minima.ldm.map(|l| g - l as f64),
        gaussian_minus_dsm: minima.dsm.map(|d| g - d),
        rows,
        minima,
        ldm_note,
        options: opts.clone(),
    })
}

impl GapReport {
    /// Per-cut CSV with header `cut,gaussian_bits,ldm_bits,dsm_bits`;
    /// refused or undefined values are left empty.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(["cut", "gaussian_bits", "ldm_bits", "dsm_bits"]).map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.cut.clone(),
                r.gaussian_bits.to_string(),
                r.ldm_bits.map(|v| v.to_string()).unwrap_or_default(),
                r.dsm_bits.map(|v| v.to_string()).unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Gaussian cut-set bound towards one sink (per-destination evaluation for
/// multicast), with the minimizing cut.
pub fn gaussian_cut_set_bound_to(t: &Topology, sink: NodeId, limit: usize) -> Result<(f64, Cut)> {
    let mut best: Option<(f64, Cut)> = None;
    for c in crate::network::enumerate_cuts_to(t, sink, limit)? {
        let v = gaussian_cut_value(t, &c)?.value;
        if best.as_ref().map_or(true, |(b, _)| v < *b) {
            best = Some((v, c));
        }
    }
    best.ok_or_else(|| Error::Invariant("no cuts".into()))
}
