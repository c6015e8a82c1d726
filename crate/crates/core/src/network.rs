//! Network descriptions: topology, gains, roles, cuts and MIMO expansion.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qarith::CNum;
use crate::rng;

pub type NodeId = usize;

/// Default cap on the number of free nodes when enumerating cuts.
pub const DEFAULT_CUT_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Relay,
    Interference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Relay,
    Destination,
    Transmitter,
    Receiver,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub role: Role,
    pub antennas: usize,
}

/// A directed link. `gains` holds one gain for single-antenna endpoints, or
/// `L_from · L_to` gains ordered transmit-antenna major.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub gains: Vec<CNum>,
}

impl Edge {
    /// The scalar gain of a single-antenna link.
    pub fn gain(&self) -> CNum {
        self.gains[0]
    }
}

#[derive(Clone, Debug)]
pub struct Topology {
    mode: Mode,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl Topology {
    /// Validates and builds a topology. Node ids must be `0..nodes.len()`.
    pub fn new(mode: Mode, mut nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Schema("node list is empty".into()));
        }
        nodes.sort_by_key(|n| n.id);
        for w in nodes.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::Schema(format!("duplicate node id {}", w[0].id)));
            }
        }
        for (k, n) in nodes.iter().enumerate() {
            if n.id != k {
                return Err(Error::Schema(format!(
                    "node ids must be contiguous from 0; id {k} is missing"
                )));
            }
            if n.antennas == 0 {
                return Err(Error::Invariant(format!("node {k} has zero antennas")));
            }
        }
        let count = nodes.len();
        let mut seen = BTreeSet::new();
        let mut in_edges = vec![Vec::new(); count];
        let mut out_edges = vec![Vec::new(); count];
        for (k, e) in edges.iter().enumerate() {
            let tag = format!("edge #{k} ({} -> {})", e.from, e.to);
            if e.from >= count || e.to >= count {
                return Err(Error::Schema(format!("{tag}: unknown endpoint")));
            }
            if e.from == e.to {
                return Err(Error::Invariant(format!("{tag}: self loop")));
            }
            if !seen.insert((e.from, e.to)) {
                return Err(Error::Schema(format!("{tag}: duplicate edge")));
            }
            let pairs = nodes[e.from].antennas * nodes[e.to].antennas;
            if e.gains.len() != 1 && e.gains.len() != pairs {
                return Err(Error::Schema(format!(
                    "{tag}: expected 1 or {pairs} gains, found {}",
                    e.gains.len()
                )));
            }
            if e.gains.is_empty() {
                return Err(Error::Schema(format!("{tag}: no gain given")));
            }
            for g in &e.gains {
                if !g.re.is_finite() || !g.im.is_finite() {
                    return Err(Error::Invariant(format!("{tag}: gain {g} is not finite")));
                }
                if g.re == 0.0 && g.im == 0.0 {
                    return Err(Error::Invariant(format!("{tag}: gain is zero")));
                }
            }
            in_edges[e.to].push(k);
            out_edges[e.from].push(k);
        }
        let t = Self { mode, nodes, edges, in_edges, out_edges };
        t.check_roles()?;
        Ok(t)
    }

    fn check_roles(&self) -> Result<()> {
        match self.mode {
            Mode::Relay => {
                let sources = self.with_role(Role::Source);
                let dests = self.with_role(Role::Destination);
                if sources.is_empty() || dests.is_empty() {
                    return Err(Error::Invariant(
                        "relay network needs a source and a destination".into(),
                    ));
                }
                if sources[0] != 0 {
                    return Err(Error::Invariant("node 0 must be the source".into()));
                }
                if *dests.last().unwrap() != self.nodes.len() - 1 {
                    return Err(Error::Invariant("the highest id must be a destination".into()));
                }
                for n in &self.nodes {
                    if matches!(n.role, Role::Transmitter | Role::Receiver) {
                        return Err(Error::Invariant(format!(
                            "node {} has role {:?}, not allowed in a relay network",
                            n.id, n.role
                        )));
                    }
                }
                for &d in &dests {
                    if self.in_edges[d].is_empty() {
                        return Err(Error::Invariant(format!(
                            "destination {d} has no incoming edge"
                        )));
                    }
                }
                if self.nodes.len() > 2 && self.nodes[1].role == Role::Relay {
                    let reach = self.reachable_from(&sources);
                    if !reach[1] {
                        return Err(Error::Invariant(
                            "node 1 is not reachable from the source".into(),
                        ));
                    }
                }
            }
            Mode::Interference => {
                let tx = self.with_role(Role::Transmitter);
                let rx = self.with_role(Role::Receiver);
                if tx.is_empty() || tx.len() != rx.len() || tx.len() + rx.len() != self.nodes.len()
                {
                    return Err(Error::Invariant(format!(
                        "interference network needs K >= 1 transmitters and K receivers \
                         (found {} and {} among {} nodes)",
                        tx.len(),
                        rx.len(),
                        self.nodes.len()
                    )));
                }
                for (k, e) in self.edges.iter().enumerate() {
                    if self.nodes[e.from].role != Role::Transmitter
                        || self.nodes[e.to].role != Role::Receiver
                    {
                        return Err(Error::Invariant(format!(
                            "edge #{k} ({} -> {}) must go from a transmitter to a receiver",
                            e.from, e.to
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn reachable_from(&self, start: &[NodeId]) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue: VecDeque<NodeId> = start.iter().copied().collect();
        for &s in start {
            seen[s] = true;
        }
        while let Some(i) = queue.pop_front() {
            for &k in &self.out_edges[i] {
                let j = self.edges[k].to;
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen
    }

    /// Single-antenna relay network with roles inferred from ids: 0 is the
    /// source, the last node the destination, everything else a relay.
    pub fn relay(node_count: usize, edges: &[(NodeId, NodeId, CNum)]) -> Result<Self> {
        if node_count < 2 {
            return Err(Error::Schema("a relay network needs at least two nodes".into()));
        }
        let nodes = (0..node_count)
            .map(|id| Node {
                id,
                role: if id == 0 {
                    Role::Source
                } else if id == node_count - 1 {
                    Role::Destination
                } else {
                    Role::Relay
                },
                antennas: 1,
            })
            .collect();
        let edges = edges
            .iter()
            .map(|&(from, to, g)| Edge { from, to, gains: vec![g] })
            .collect();
        Self::new(Mode::Relay, nodes, edges)
    }

    /// Single-antenna K-user interference network: transmitters `0..K`,
    /// receivers `K..2K`. Gains are indexed by user (`tx k`, `rx l`); zero
    /// gains are dropped.
    pub fn interference(k: usize, gains: &[(usize, usize, CNum)]) -> Result<Self> {
        let nodes = (0..2 * k)
            .map(|id| Node {
                id,
                role: if id < k { Role::Transmitter } else { Role::Receiver },
                antennas: 1,
            })
            .collect();
        let edges = gains
            .iter()
            .filter(|(_, _, g)| g.re != 0.0 || g.im != 0.0)
            .map(|&(a, b, g)| Edge { from: a, to: k + b, gains: vec![g] })
            .collect();
        Self::new(Mode::Interference, nodes, edges)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Incoming edge indices of node `j`.
    pub fn in_edges(&self, j: NodeId) -> &[usize] {
        &self.in_edges[j]
    }

    pub fn out_edges(&self, i: NodeId) -> &[usize] {
        &self.out_edges[i]
    }

    pub fn edge_between(&self, from: NodeId, to: NodeId) -> Option<&Edge> {
        self.out_edges
            .get(from)?
            .iter()
            .map(|&k| &self.edges[k])
            .find(|e| e.to == to)
    }

    pub fn with_role(&self, role: Role) -> Vec<NodeId> {
        self.nodes.iter().filter(|n| n.role == role).map(|n| n.id).collect()
    }

    /// Largest node id; the destination of a relay network.
    pub fn m(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn source(&self) -> NodeId {
        0
    }

    pub fn destination(&self) -> NodeId {
        self.nodes.len() - 1
    }

    pub fn is_single_antenna(&self) -> bool {
        self.nodes.iter().all(|n| n.antennas == 1)
    }

    pub fn gains(&self) -> Vec<CNum> {
        self.edges.iter().flat_map(|e| e.gains.iter().copied()).collect()
    }

    /// Same network with every gain multiplied by `gamma`.
    pub fn scaled(&self, gamma: f64) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { gains: e.gains.iter().map(|g| g * gamma).collect(), ..e.clone() })
            .collect();
        Self::new(self.mode, self.nodes.clone(), edges)
    }

    /// Transmitter/receiver pairs of an interference network, matched by sorted id.
    pub fn user_pairs(&self) -> Vec<(NodeId, NodeId)> {
        self.with_role(Role::Transmitter)
            .into_iter()
            .zip(self.with_role(Role::Receiver))
            .collect()
    }

    /// Nodes in an order where every edge that goes forward in the order
    /// respects dependencies, if the graph is acyclic.
    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<NodeId> = (0..self.nodes.len()).filter(|&j| indeg[j] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(&i) = ready.iter().next() {
            ready.remove(&i);
            order.push(i);
            for &k in &self.out_edges[i] {
                let j = self.edges[k].to;
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.insert(j);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    pub fn to_document(&self) -> NetworkDoc {
        NetworkDoc {
            mode: self.mode,
            description: None,
            params: BTreeMap::new(),
            nodes: self
                .nodes
                .iter()
                .map(|n| NodeDoc { id: n.id, role: n.role, antennas: n.antennas })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| {
                    if e.gains.len() == 1 {
                        EdgeDoc {
                            from: e.from,
                            to: e.to,
                            gain_re: Some(e.gains[0].re),
                            gain_im: Some(e.gains[0].im),
                            gains: None,
                            scale: None,
                        }
                    } else {
                        EdgeDoc {
                            from: e.from,
                            to: e.to,
                            gain_re: None,
                            gain_im: None,
                            gains: Some(e.gains.iter().map(|g| [g.re, g.im]).collect()),
                            scale: None,
                        }
                    }
                })
                .collect(),
        }
    }
}

// ---------------------------------------------------------------- file format

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Named multipliers that edges may reference through `scale`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, f64>,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: NodeId,
    pub role: Role,
    #[serde(default = "one")]
    pub antennas: usize,
}

fn one() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: NodeId,
    pub to: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain_im: Option<f64>,
    /// Per-antenna-pair gains `[re, im]`, transmit antenna major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<Vec<[f64; 2]>>,
    /// Name of a `params` entry multiplying this edge's gains.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}

impl NetworkDoc {
    /// Builds the topology, with `overrides` replacing entries of `params`.
    pub fn build(&self, overrides: &BTreeMap<String, f64>) -> Result<Topology> {
        let mut params = self.params.clone();
        for (k, v) in overrides {
            if !params.contains_key(k) {
                return Err(Error::Schema(format!("unknown parameter {k:?}")));
            }
            params.insert(k.clone(), *v);
        }
        let nodes = self
            .nodes
            .iter()
            .map(|n| Node { id: n.id, role: n.role, antennas: n.antennas })
            .collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, e) in self.edges.iter().enumerate() {
            let tag = format!("edge #{k} ({} -> {})", e.from, e.to);
            let mut gains = match (&e.gains, e.gain_re, e.gain_im) {
                (Some(list), None, None) => {
                    list.iter().map(|&[re, im]| CNum::new(re, im)).collect::<Vec<_>>()
                }
                (None, re, im) if re.is_some() || im.is_some() => {
                    vec![CNum::new(re.unwrap_or(0.0), im.unwrap_or(0.0))]
                }
                (None, _, _) => return Err(Error::Schema(format!("{tag}: no gain given"))),
                _ => {
                    return Err(Error::Schema(format!(
                        "{tag}: give either gain_re/gain_im or gains, not both"
                    )))
                }
            };
            if let Some(name) = &e.scale {
                let s = params
                    .get(name)
                    .ok_or_else(|| Error::Schema(format!("{tag}: unknown parameter {name:?}")))?;
                for g in &mut gains {
                    *g *= *s;
                }
            }
            edges.push(Edge { from: e.from, to: e.to, gains });
        }
        Topology::new(self.mode, nodes, edges)
    }
}

pub fn load_topology(document: &str) -> Result<Topology> {
    load_topology_with(document, &BTreeMap::new())
}

pub fn load_topology_with(document: &str, overrides: &BTreeMap<String, f64>) -> Result<Topology> {
    let doc: NetworkDoc =
        serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    doc.build(overrides)
}

pub fn load_topology_file(path: &Path) -> Result<Topology> {
    load_topology(&std::fs::read_to_string(path)?)
}

pub fn load_document_file(path: &Path) -> Result<NetworkDoc> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------- cuts

/// A source-side node set Ω.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cut {
    omega: Vec<NodeId>,
    complement: Vec<NodeId>,
}

impl Cut {
    /// Validates `omega` against a relay network: every source inside,
    /// every destination outside.
    pub fn new(t: &Topology, omega: &[NodeId]) -> Result<Self> {
        let c = Self::from_set(t.node_count(), omega)?;
        for n in t.nodes() {
            match n.role {
                Role::Source if !c.contains(n.id) => {
                    return Err(Error::Invariant(format!("source {} must be in the cut", n.id)))
                }
                Role::Destination if c.contains(n.id) => {
                    return Err(Error::Invariant(format!(
                        "destination {} must not be in the cut",
                        n.id
                    )))
                }
                _ => {}
            }
        }
        Ok(c)
    }

    /// A cut given only by its member set; no role checks.
    pub fn from_set(node_count: usize, omega: &[NodeId]) -> Result<Self> {
        let set: BTreeSet<NodeId> = omega.iter().copied().collect();
        if let Some(&bad) = set.iter().find(|&&i| i >= node_count) {
            return Err(Error::Invariant(format!("node {bad} is not in the network")));
        }
        Ok(Self {
            omega: set.iter().copied().collect(),
            complement: (0..node_count).filter(|i| !set.contains(i)).collect(),
        })
    }

    pub fn omega(&self) -> &[NodeId] {
        &self.omega
    }

    pub fn complement(&self) -> &[NodeId] {
        &self.complement
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.omega.binary_search(&id).is_ok()
    }

    /// `0;1;2`-style label used in reports.
    pub fn label(&self) -> String {
        self.omega.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.omega.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// All cuts separating the sources from the destinations of a relay network,
/// ordered by the bitmask of included relays.
pub fn enumerate_cuts(t: &Topology) -> Result<Vec<Cut>> {
    enumerate_cuts_with_limit(t, DEFAULT_CUT_LIMIT)
}

pub fn enumerate_cuts_with_limit(t: &Topology, limit: usize) -> Result<Vec<Cut>> {
    if t.mode() != Mode::Relay {
        return Err(Error::Refused("cut enumeration needs a relay network".into()));
    }
    let fixed = t.with_role(Role::Source);
    let free = t.with_role(Role::Relay);
    subsets(t.node_count(), &fixed, &free, limit)
}

/// Cuts separating the source from one chosen sink; every other non-source
/// node may fall on either side. Used for per-destination evaluation.
pub fn enumerate_cuts_to(t: &Topology, sink: NodeId, limit: usize) -> Result<Vec<Cut>> {
    if t.mode() != Mode::Relay {
        return Err(Error::Refused("cut enumeration needs a relay network".into()));
    }
    let fixed = t.with_role(Role::Source);
    if sink >= t.node_count() || fixed.contains(&sink) {
        return Err(Error::Invariant(format!("node {sink} cannot be a sink")));
    }
    let free: Vec<NodeId> =
        (0..t.node_count()).filter(|i| *i != sink && !fixed.contains(i)).collect();
    subsets(t.node_count(), &fixed, &free, limit)
}

fn subsets(count: usize, fixed: &[NodeId], free: &[NodeId], limit: usize) -> Result<Vec<Cut>> {
    if free.len() > limit || free.len() >= 63 {
        return Err(Error::TooLarge {
            what: "cut enumeration".into(),
            size: 1u128 << free.len().min(127),
            limit: 1u128 << limit.min(127),
            hint: "raise the cut limit explicitly if exhaustive enumeration is intended",
        });
    }
    let mut out = Vec::with_capacity(1 << free.len());
    for mask in 0u64..(1u64 << free.len()) {
        let mut omega = fixed.to_vec();
        omega.extend(free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i));
        out.push(Cut::from_set(count, &omega)?);
    }
    Ok(out)
}

/// Transfer matrix of a cut, rows indexed by `Ω^c`, columns by `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutMatrix {
    pub rows: Vec<NodeId>,
    pub cols: Vec<NodeId>,
    pub h: DMatrix<CNum>,
}

impl CutMatrix {
    /// Drops all-zero rows and columns (nodes without crossing edges).
    pub fn compact(&self) -> CutMatrix {
        let zero = CNum::new(0.0, 0.0);
        let rows: Vec<usize> =
            (0..self.h.nrows()).filter(|&r| self.h.row(r).iter().any(|&g| g != zero)).collect();
        let cols: Vec<usize> =
            (0..self.h.ncols()).filter(|&c| self.h.column(c).iter().any(|&g| g != zero)).collect();
        CutMatrix {
            rows: rows.iter().map(|&r| self.rows[r]).collect(),
            cols: cols.iter().map(|&c| self.cols[c]).collect(),
            h: DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.h[(rows[r], cols[c])]),
        }
    }
}

pub fn cut_transfer_matrix(t: &Topology, c: &Cut) -> Result<CutMatrix> {
    if !t.is_single_antenna() {
        return Err(Error::Refused(
            "multi-antenna network: expand to virtual nodes first".into(),
        ));
    }
    if c.omega.len() + c.complement.len() != t.node_count() {
        return Err(Error::Invariant("cut does not belong to this network".into()));
    }
    let mut h = DMatrix::from_element(c.complement.len(), c.omega.len(), CNum::new(0.0, 0.0));
    for e in t.edges() {
        if let (Ok(col), Ok(row)) = (c.omega.binary_search(&e.from), c.complement.binary_search(&e.to))
        {
            h[(row, col)] = e.gain();
        }
    }
    Ok(CutMatrix { rows: c.complement.clone(), cols: c.omega.clone(), h })
}

// ---------------------------------------------------------------------- MIMO

/// Replaces each `L`-antenna node with `L` single-antenna virtual nodes.
/// Virtual node ids follow the original order; antenna `a` of node `i` gets
/// id `base(i) + a`. Returns the topology and the origin of each virtual node.
pub fn mimo_expand(t: &Topology) -> Result<Topology> {
    Ok(mimo_expand_with_origin(t)?.0)
}

pub fn mimo_expand_with_origin(t: &Topology) -> Result<(Topology, Vec<NodeId>)> {
    let mut base = Vec::with_capacity(t.node_count());
    let mut origin = Vec::new();
    let mut nodes = Vec::new();
    for n in t.nodes() {
        base.push(nodes.len());
        for _ in 0..n.antennas {
            origin.push(n.id);
            nodes.push(Node { id: nodes.len(), role: n.role, antennas: 1 });
        }
    }
    let mut edges = Vec::new();
    for (k, e) in t.edges().iter().enumerate() {
        let (lf, lt) = (t.nodes()[e.from].antennas, t.nodes()[e.to].antennas);
        if e.gains.len() != lf * lt {
            return Err(Error::Schema(format!(
                "edge #{k} ({} -> {}): {} antenna pairs need per-antenna gains, found {}",
                e.from,
                e.to,
                lf * lt,
                e.gains.len()
            )));
        }
        for a in 0..lf {
            for b in 0..lt {
                edges.push(Edge {
                    from: base[e.from] + a,
                    to: base[e.to] + b,
                    gains: vec![e.gains[a * lt + b]],
                });
            }
        }
    }
    Ok((Topology::new(t.mode(), nodes, edges)?, origin))
}

// ------------------------------------------------------------ random networks

/// Seeded random single-antenna relay network on a DAG: each forward pair
/// `i < j` is linked with probability `edge_prob`; nodes left without an
/// incoming edge get one from a random earlier node. Gains have magnitude
/// uniform in `magnitude` and uniform phase.
pub fn random_relay_topology(
    node_count: usize,
    edge_prob: f64,
    magnitude: (f64, f64),
    seed: u64,
) -> Result<Topology> {
    if node_count < 2 || !(0.0..=1.0).contains(&edge_prob) || !(magnitude.0 > 0.0 && magnitude.0 <= magnitude.1) {
        return Err(Error::Domain("invalid random topology parameters".into()));
    }
    let mut r = rng::stream(seed, 0x7090);
    let gain = |r: &mut rng::Rng| {
        let mag = r.random_range(magnitude.0..=magnitude.1);
        let phase = r.random_range(0.0..std::f64::consts::TAU);
        CNum::from_polar(mag, phase)
    };
    let mut edges = Vec::new();
    for j in 1..node_count {
        let mut any = false;
        for i in 0..j {
            if r.random_bool(edge_prob) {
                edges.push((i, j, gain(&mut r)));
                any = true;
            }
        }
        if !any {
            let i = r.random_range(0..j);
            edges.push((i, j, gain(&mut r)));
        }
    }
    Topology::relay(node_count, &edges)
}
