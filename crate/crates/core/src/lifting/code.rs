//! Codes for discrete superposition networks: file format, noiseless
//! simulation and the zero-error purge.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{derive_dsm_with_depth, DsmModel};
use crate::network::{NodeId, Role, Topology};
use crate::qarith::{to_cnum, FixedInput, GInt};

/// A received block as `(re, im)` pairs; used as a lookup key.
pub type Rx = Vec<(i64, i64)>;

pub fn rx_of(v: &[GInt]) -> Rx {
    v.iter().map(|g| (g.re, g.im)).collect()
}

/// How a relay maps what it heard to what it sends.
#[derive(Clone, Debug, PartialEq)]
pub enum RelayMap {
    /// Time-invariant: the whole received block of length N maps to a
    /// transmitted block of length N. Needs a leveled network.
    Block(HashMap<Rx, Vec<FixedInput>>),
    /// Per-time maps: entry `t` maps the receptions at times `0..t` to the
    /// symbol sent at time `t`.
    PerTime(Vec<HashMap<Rx, FixedInput>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DsmCode {
    n: u32,
    block_len: usize,
    codebook: Vec<Vec<FixedInput>>,
    relay_maps: BTreeMap<NodeId, RelayMap>,
    decoder: HashMap<Rx, usize>,
    claimed_error: Option<f64>,
    description: Option<String>,
}

// ---------------------------------------------------------------- file format

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDoc {
    #[serde(rename = "N")]
    pub block_len: usize,
    pub n: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub codebook: Vec<Vec<String>>,
    #[serde(default)]
    pub relay_maps: BTreeMap<NodeId, RelayMapDoc>,
    pub decoder: Vec<DecoderEntry>,
    /// Average error probability the author claims for the code.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RelayMapDoc {
    Block { table: Vec<BlockEntry> },
    PerTime { tables: Vec<Vec<StepEntry>> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub rx: Vec<[i64; 2]>,
    pub tx: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepEntry {
    pub rx: Vec<[i64; 2]>,
    pub tx: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecoderEntry {
    pub rx: Vec<[i64; 2]>,
    pub message: usize,
}

fn key(rx: &[[i64; 2]]) -> Rx {
    rx.iter().map(|p| (p[0], p[1])).collect()
}

fn unkey(rx: &Rx) -> Vec<[i64; 2]> {
    rx.iter().map(|&(a, b)| [a, b]).collect()
}

impl CodeDoc {
    pub fn build(&self) -> Result<DsmCode> {
        let n = self.n;
        let nb = self.block_len;
        if nb == 0 {
            return Err(Error::Schema("block length N must be positive".into()));
        }
        let sym = |s: &String| FixedInput::from_hex(n, s);
        let block = |v: &[String], what: &str| -> Result<Vec<FixedInput>> {
            if v.len() != nb {
                return Err(Error::Schema(format!("{what} has {} symbols, expected N = {nb}", v.len())));
            }
            v.iter().map(sym).collect()
        };
        let codebook = self
            .codebook
            .iter()
            .enumerate()
            .map(|(w, c)| block(c, &format!("codeword {w}")))
            .collect::<Result<Vec<_>>>()?;
        if codebook.is_empty() {
            return Err(Error::Schema("empty codebook".into()));
        }
        let mut relay_maps = BTreeMap::new();
        for (&node, doc) in &self.relay_maps {
            let map = match doc {
                RelayMapDoc::Block { table } => {
                    let mut m = HashMap::new();
                    for e in table {
                        if e.rx.len() != nb {
                            return Err(Error::Schema(format!("relay {node}: reception of wrong length")));
                        }
                        if m.insert(key(&e.rx), block(&e.tx, &format!("relay {node} entry"))?).is_some() {
                            return Err(Error::Schema(format!("relay {node}: duplicate reception {:?}", e.rx)));
                        }
                    }
                    RelayMap::Block(m)
                }
                RelayMapDoc::PerTime { tables } => {
                    if tables.len() != nb {
                        return Err(Error::Schema(format!("relay {node}: need N = {nb} per-time tables")));
                    }
                    let mut out = Vec::with_capacity(nb);
                    for (t, table) in tables.iter().enumerate() {
                        let mut m = HashMap::new();
                        for e in table {
                            if e.rx.len() != t {
                                return Err(Error::Schema(format!(
                                    "relay {node}: time-{t} map keys must hold {t} receptions"
                                )));
                            }
                            if m.insert(key(&e.rx), sym(&e.tx)?).is_some() {
                                return Err(Error::Schema(format!("relay {node}: duplicate history at time {t}")));
                            }
                        }
                        out.push(m);
                    }
                    RelayMap::PerTime(out)
                }
            };
            relay_maps.insert(node, map);
        }
        let mut decoder = HashMap::new();
        for e in &self.decoder {
            if e.rx.len() != nb || e.message >= codebook.len() {
                return Err(Error::Schema(format!("decoder entry {:?} -> {} is invalid", e.rx, e.message)));
            }
            if decoder.insert(key(&e.rx), e.message).is_some() {
                return Err(Error::Schema(format!("decoder: duplicate reception {:?}", e.rx)));
            }
        }
        if let Some(d) = self.claimed_error {
            if !(0.0..=1.0).contains(&d) {
                return Err(Error::Schema(format!("claimed error {d} is not a probability")));
            }
        }
        Ok(DsmCode {
            n,
            block_len: nb,
            codebook,
            relay_maps,
            decoder,
            claimed_error: self.claimed_error,
            description: self.description.clone(),
        })
    }
}

pub fn load_code(document: &str) -> Result<DsmCode> {
    let doc: CodeDoc = serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    doc.build()
}

pub fn load_code_file(path: &Path) -> Result<DsmCode> {
    load_code(&std::fs::read_to_string(path)?)
}

// -------------------------------------------------------------------- access

impl DsmCode {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Block length N.
    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn size(&self) -> usize {
        self.codebook.len()
    }

    pub fn codeword(&self, w: usize) -> &[FixedInput] {
        &self.codebook[w]
    }

    /// Rate in bits per channel use.
    pub fn rate(&self) -> f64 {
        (self.size() as f64).log2() / self.block_len as f64
    }

    pub fn relay_maps(&self) -> &BTreeMap<NodeId, RelayMap> {
        &self.relay_maps
    }

    pub fn claimed_error(&self) -> Option<f64> {
        self.claimed_error
    }

    pub fn decode(&self, rx: &Rx) -> Option<usize> {
        self.decoder.get(rx).copied()
    }

    pub fn is_blockwise(&self) -> bool {
        self.relay_maps.values().all(|m| matches!(m, RelayMap::Block(_)))
    }

    pub fn is_per_time(&self) -> bool {
        !self.relay_maps.is_empty() && self.relay_maps.values().all(|m| matches!(m, RelayMap::PerTime(_)))
    }

    pub fn to_document(&self) -> CodeDoc {
        let hex = |b: &[FixedInput]| b.iter().map(FixedInput::to_hex).collect::<Vec<_>>();
        let mut relay_maps = BTreeMap::new();
        for (&node, m) in &self.relay_maps {
            let doc = match m {
                RelayMap::Block(table) => {
                    let mut entries: Vec<_> = table.iter().collect();
                    entries.sort_by(|a, b| a.0.cmp(b.0));
                    RelayMapDoc::Block {
                        table: entries.into_iter().map(|(k, v)| BlockEntry { rx: unkey(k), tx: hex(v) }).collect(),
                    }
                }
                RelayMap::PerTime(tables) => RelayMapDoc::PerTime {
                    tables: tables
                        .iter()
                        .map(|t| {
                            let mut entries: Vec<_> = t.iter().collect();
                            entries.sort_by(|a, b| a.0.cmp(b.0));
                            entries.into_iter().map(|(k, v)| StepEntry { rx: unkey(k), tx: v.to_hex() }).collect()
                        })
                        .collect(),
                },
            };
            relay_maps.insert(node, doc);
        }
        let mut decoder: Vec<_> = self.decoder.iter().collect();
        decoder.sort_by(|a, b| a.0.cmp(b.0));
        CodeDoc {
            block_len: self.block_len,
            n: self.n,
            description: self.description.clone(),
            codebook: self.codebook.iter().map(|c| hex(c)).collect(),
            relay_maps,
            decoder: decoder.into_iter().map(|(k, &m)| DecoderEntry { rx: unkey(k), message: m }).collect(),
            claimed_error: self.claimed_error,
        }
    }
}

// ---------------------------------------------------------------- simulation

/// Every signal of one noiseless transmission of a codeword.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    /// Received block per node (`None` for nodes that hear nothing).
    pub rx: Vec<Option<Rx>>,
    /// Transmitted block per node (`None` for silent nodes).
    pub tx: Vec<Option<Vec<FixedInput>>>,
    pub decoded: Option<usize>,
}

/// Level of each node (longest path from a source) if every edge joins
/// consecutive levels.
pub fn levels(t: &Topology) -> Option<Vec<usize>> {
    let order = t.topological_order()?;
    let mut level = vec![0usize; t.node_count()];
    for &j in &order {
        for &k in t.in_edges(j) {
            level[j] = level[j].max(level[t.edges()[k].from] + 1);
        }
    }
    t.edges().iter().all(|e| level[e.to] == level[e.from] + 1).then_some(level)
}

/// Discrete superposition model the code runs on; its bit depth must match
/// the network's.
pub fn code_model(t: &Topology, code: &DsmCode) -> Result<DsmModel> {
    let derived = crate::models::derive_dsm(t)?;
    if derived.n() != code.n {
        return Err(Error::Invariant(format!(
            "the code uses n = {} but the network's model has n = {}",
            code.n,
            derived.n()
        )));
    }
    for &r in code.relay_maps.keys() {
        if r >= t.node_count() || t.nodes()[r].role != Role::Relay {
            return Err(Error::Invariant(format!("relay map given for node {r}, which is not a relay")));
        }
    }
    for r in t.with_role(Role::Relay) {
        if !t.out_edges(r).is_empty() && !code.relay_maps.contains_key(&r) {
            return Err(Error::MissingTransmission(r));
        }
    }
    derive_dsm_with_depth(t, code.n)
}

fn receive(m: &DsmModel, j: NodeId, tx: &[Option<Vec<FixedInput>>], time: usize) -> (i64, i64) {
    let mut y = (0i64, 0i64);
    for l in m.incoming(j) {
        if let Some(x) = &tx[l.from] {
            let p = to_cnum(l.qgain) * x[time].value();
            y.0 += p.re.trunc() as i64;
            y.1 += p.im.trunc() as i64;
        }
    }
    y
}

/// Noiseless run of message `w`. Blockwise codes run level by level;
/// per-time codes run symbol by symbol with causal relay maps.
pub fn simulate(t: &Topology, m: &DsmModel, code: &DsmCode, w: usize) -> Result<Trace> {
    if w >= code.size() {
        return Err(Error::Domain(format!("message {w} out of range")));
    }
    let nodes = t.node_count();
    let nb = code.block_len;
    let sources = t.with_role(Role::Source);
    let mut tx: Vec<Option<Vec<FixedInput>>> = vec![None; nodes];
    let mut rx: Vec<Option<Rx>> = vec![None; nodes];
    if code.is_per_time() {
        let mut hist: Vec<Rx> = vec![Vec::new(); nodes];
        for &s in &sources {
            tx[s] = Some(code.codebook[w].clone());
        }
        for &r in code.relay_maps.keys() {
            tx[r] = Some(Vec::with_capacity(nb));
        }
        for time in 0..nb {
            for (&r, map) in &code.relay_maps {
                let RelayMap::PerTime(tables) = map else { unreachable!() };
                let x = *tables[time].get(&hist[r]).ok_or_else(|| {
                    Error::Invariant(format!("relay {r} has no time-{time} mapping for history {:?}", hist[r]))
                })?;
                tx[r].as_mut().unwrap().push(x);
            }
            let now = padded(&tx, time);
            for j in 0..nodes {
                if t.in_edges(j).is_empty() {
                    continue;
                }
                let y = receive(m, j, &now, time);
                hist[j].push(y);
            }
        }
        for j in 0..nodes {
            if !t.in_edges(j).is_empty() {
                rx[j] = Some(hist[j].clone());
            }
        }
    } else {
        if !code.relay_maps.is_empty() && levels(t).is_none() {
            return Err(Error::Refused(
                "blockwise relay maps need a leveled network; supply per-time maps and use the interleaved schedule"
                    .into(),
            ));
        }
        let order = t.topological_order().ok_or_else(|| Error::Invariant("network has a cycle".into()))?;
        for j in order {
            if sources.contains(&j) {
                tx[j] = Some(code.codebook[w].clone());
                continue;
            }
            if t.in_edges(j).is_empty() {
                continue;
            }
            let block: Rx = (0..nb).map(|time| receive(m, j, &tx, time)).collect();
            if let Some(RelayMap::Block(table)) = code.relay_maps.get(&j) {
                let x = table.get(&block).ok_or_else(|| {
                    Error::Invariant(format!("relay {j} has no mapping for reception {block:?}"))
                })?;
                tx[j] = Some(x.clone());
            }
            rx[j] = Some(block);
        }
    }
    let decoded = rx[t.destination()].as_ref().and_then(|y| code.decode(y));
    Ok(Trace { rx, tx, decoded })
}

fn padded(tx: &[Option<Vec<FixedInput>>], time: usize) -> Vec<Option<Vec<FixedInput>>> {
    tx.iter()
        .map(|x| x.as_ref().filter(|v| v.len() > time).cloned())
        .collect()
}

// -------------------------------------------------------------------- purge

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PurgeReport {
    pub original: usize,
    pub retained: usize,
    /// Messages (original numbering) that always decode incorrectly.
    pub removed: Vec<usize>,
    pub error_probability: f64,
    /// The code claimed a smaller error probability than measured.
    pub claim_mismatch: bool,
}

/// Keeps exactly the codewords that the destination decodes correctly;
/// the survivors are renumbered in their original order.
pub fn purge_zero_error(t: &Topology, code: &DsmCode) -> Result<(DsmCode, PurgeReport)> {
    let m = code_model(t, code)?;
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    let mut renumber = HashMap::new();
    for w in 0..code.size() {
        let ok = matches!(simulate(t, &m, code, w), Ok(tr) if tr.decoded == Some(w));
        if ok {
            renumber.insert(w, keep.len());
            keep.push(w);
        } else {
            removed.push(w);
        }
    }
    if keep.is_empty() {
        return Err(Error::Invariant("every codeword decodes incorrectly".into()));
    }
    let delta = removed.len() as f64 / code.size() as f64;
    let report = PurgeReport {
        original: code.size(),
        retained: keep.len(),
        claim_mismatch: code.claimed_error.is_some_and(|c| c + 1e-12 < delta),
        removed,
        error_probability: delta,
    };
    let decoder = code
        .decoder
        .iter()
        .filter_map(|(k, w)| renumber.get(w).map(|&nw| (k.clone(), nw)))
        .collect();
    let purged = DsmCode {
        codebook: keep.iter().map(|&w| code.codebook[w].clone()).collect(),
        decoder,
        claimed_error: Some(0.0),
        ..code.clone()
    };
    Ok((purged, report))
}

#[cfg(test)]
mod test {
    use super::*;
    use crate::qarith::CNum;

    fn c(re: f64, im: f64) -> CNum {
        CNum::new(re, im)
    }

    /// Source 0 → relay 1 → destination 2, n = 1, N = 1.
    fn line() -> Topology {
        Topology::relay(3, &[(0, 1, c(3.0, 0.0)), (1, 2, c(3.0, 0.0))]).unwrap()
    }

    const LINE: &str = r#"{"N":1,"n":1,
        "codebook":[["00"],["10"],["01"],["11"]],
        "relay_maps":{"1":{"kind":"block","table":[
            {"rx":[[0,0]],"tx":["00"]},{"rx":[[1,0]],"tx":["10"]},
            {"rx":[[0,1]],"tx":["01"]},{"rx":[[1,1]],"tx":["11"]}]}},
        "decoder":[{"rx":[[0,0]],"message":0},{"rx":[[1,0]],"message":1},
                   {"rx":[[0,1]],"message":2},{"rx":[[1,1]],"message":3}]}"#;

    #[test]
    fn line_code_roundtrip() {
        let t = line();
        let code = load_code(LINE).unwrap();
        assert_eq!(code.rate(), 2.0);
        let m = code_model(&t, &code).unwrap();
        for w in 0..4 {
            let tr = simulate(&t, &m, &code, w).unwrap();
            assert_eq!(tr.decoded, Some(w));
        }
        let again = code.to_document().build().unwrap();
        assert_eq!(again, code);
        let (same, rep) = purge_zero_error(&t, &code).unwrap();
        assert_eq!((rep.retained, rep.removed.len()), (4, 0));
        assert_eq!(same.size(), 4);
    }

    #[test]
    fn purge_removes_bad_codewords() {
        let t = line();
        let mut doc: CodeDoc = serde_json::from_str(LINE).unwrap();
        doc.decoder[3].message = 1;
        doc.claimed_error = Some(0.0);
        let code = doc.build().unwrap();
        let (p, rep) = purge_zero_error(&t, &code).unwrap();
        // message 3's reception now decodes to 1
        assert_eq!(rep.removed, vec![3]);
        assert!(rep.claim_mismatch);
        assert_eq!(p.size(), 3);
        let m = code_model(&t, &p).unwrap();
        for w in 0..3 {
            assert_eq!(simulate(&t, &m, &p, w).unwrap().decoded, Some(w));
        }
    }

    #[test]
    fn schema_and_model_errors() {
        assert!(matches!(load_code(r#"{"N":1,"n":1,"codebook":[["0"]],"decoder":[]}"#), Err(Error::Schema(_))));
        assert!(matches!(load_code(r#"{"N":1,"n":1,"codebook":[],"decoder":[],"x":1}"#), Err(Error::Schema(_))));
        let code = load_code(r#"{"N":1,"n":1,"codebook":[["10"]],"decoder":[]}"#).unwrap();
        assert!(matches!(code_model(&line(), &code), Err(Error::MissingTransmission(1))));
        let t = Topology::relay(2, &[(0, 1, c(9.0, 0.0))]).unwrap();
        assert!(matches!(code_model(&t, &code), Err(Error::Invariant(_))));
    }

    #[test]
    fn leveled_detection() {
        assert_eq!(levels(&line()), Some(vec![0, 1, 2]));
        let skip = Topology::relay(3, &[(0, 1, c(3.0, 0.0)), (1, 2, c(3.0, 0.0)), (0, 2, c(1.0, 0.0))]).unwrap();
        assert_eq!(levels(&skip), None);
    }
}
