//! Interleaved transmission of m copies of a per-time code, so relays can
//! buffer each copy's past receptions before they must answer.

use serde::Serialize;

use super::code::{code_model, DsmCode, RelayMap, Rx};
use crate::error::{Error, Result};
use crate::models::{dsm_receive, DsmModel};
use crate::network::{NodeId, Role, Topology};
use crate::qarith::FixedInput;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Slot {
    pub copy: usize,
    /// Symbol index within the copy's codeword.
    pub time: usize,
}

/// `N` rounds of `m` slots; round `t` carries symbol `t` of every copy.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Schedule {
    pub block_len: usize,
    pub m: usize,
    pub rounds: Vec<Vec<Slot>>,
    /// `deps[t]`: rounds whose receptions the relay maps of round `t` read,
    /// taken from the history length of the code's tables.
    pub deps: Vec<Vec<usize>>,
}

impl Schedule {
    /// Position of a slot in the serialized stream.
    pub fn stream_index(&self, s: Slot) -> usize {
        s.time * self.m + s.copy
    }

    /// Every relay output reads only strictly earlier rounds.
    pub fn is_causal(&self) -> bool {
        self.deps.iter().enumerate().all(|(t, d)| d.iter().all(|&r| r < t))
    }

    pub fn len(&self) -> usize {
        self.block_len * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn interleave_schedule(code: &DsmCode, m: usize) -> Result<Schedule> {
    if m == 0 {
        return Err(Error::Domain("interleaving needs m ≥ 1".into()));
    }
    if code.relay_maps().values().any(|r| matches!(r, RelayMap::Block(_))) {
        return Err(Error::Refused(
            "the code has time-invariant block maps; use the blockwise path (block_extend) instead".into(),
        ));
    }
    let nb = code.block_len();
    let mut deps = vec![Vec::new(); nb];
    for map in code.relay_maps().values() {
        let RelayMap::PerTime(tables) = map else { unreachable!() };
        for (t, table) in tables.iter().enumerate() {
            for hist in table.keys() {
                for r in 0..hist.len() {
                    if !deps[t].contains(&r) {
                        deps[t].push(r);
                    }
                }
            }
        }
    }
    for d in &mut deps {
        d.sort_unstable();
    }
    let rounds = (0..nb).map(|time| (0..m).map(|copy| Slot { copy, time }).collect()).collect();
    let s = Schedule { block_len: nb, m, rounds, deps };
    if !s.is_causal() {
        return Err(Error::Invariant("a relay map reads a reception from its own or a later round".into()));
    }
    Ok(s)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InterleavedRun {
    /// Serialized reception stream per node, length `mN`.
    pub stream: Vec<Option<Rx>>,
    /// `blocks[j][k]`: node `j`'s reception of copy `k` after de-interleaving.
    pub blocks: Vec<Vec<Rx>>,
    pub decoded: Vec<Option<usize>>,
}

/// Noiseless run of `messages.len()` copies following the schedule.
pub fn run_interleaved(t: &Topology, code: &DsmCode, messages: &[usize]) -> Result<InterleavedRun> {
    let model = code_model(t, code)?;
    let sched = interleave_schedule(code, messages.len())?;
    if let Some(&w) = messages.iter().find(|&&w| w >= code.size()) {
        return Err(Error::Domain(format!("message {w} out of range")));
    }
    run_schedule(t, &model, code, &sched, messages)
}

fn run_schedule(
    t: &Topology,
    model: &DsmModel,
    code: &DsmCode,
    sched: &Schedule,
    messages: &[usize],
) -> Result<InterleavedRun> {
    let nodes = t.node_count();
    let m = sched.m;
    let sources = t.with_role(Role::Source);
    let hears: Vec<bool> = (0..nodes).map(|j| !t.in_edges(j).is_empty()).collect();
    // hist[j][k]: node j's receptions of copy k so far
    let mut hist: Vec<Vec<Rx>> = vec![vec![Vec::new(); m]; nodes];
    let mut stream: Vec<Rx> = vec![Vec::with_capacity(sched.len()); nodes];
    for round in &sched.rounds {
        for &slot in round {
            let mut tx: Vec<Option<FixedInput>> = vec![None; nodes];
            for &s in &sources {
                tx[s] = Some(code.codeword(messages[slot.copy])[slot.time]);
            }
            for (&r, map) in code.relay_maps() {
                let RelayMap::PerTime(tables) = map else { unreachable!() };
                tx[r] = Some(relay_symbol(r, &tables[slot.time], &hist[r][slot.copy], slot.time)?);
            }
            for j in (0..nodes).filter(|&j| hears[j]) {
                let y = dsm_receive(model, j, &tx)?;
                hist[j][slot.copy].push((y.re, y.im));
                stream[j].push((y.re, y.im));
            }
        }
    }
    let blocks: Vec<Vec<Rx>> = (0..nodes).map(|j| deinterleave(sched, &stream[j])).collect();
    let decoded = blocks[t.destination()].iter().map(|b| code.decode(b)).collect();
    let stream = stream.into_iter().zip(&hears).map(|(s, &h)| h.then_some(s)).collect();
    Ok(InterleavedRun { stream, blocks, decoded })
}

fn relay_symbol(
    r: NodeId,
    table: &std::collections::HashMap<Rx, FixedInput>,
    hist: &Rx,
    time: usize,
) -> Result<FixedInput> {
    table
        .get(hist)
        .copied()
        .ok_or_else(|| Error::Invariant(format!("relay {r} has no time-{time} mapping for history {hist:?}")))
}

/// Splits a serialized stream back into per-copy blocks.
pub fn deinterleave(sched: &Schedule, stream: &[(i64, i64)]) -> Vec<Rx> {
    if stream.is_empty() {
        return vec![Vec::new(); sched.m];
    }
    (0..sched.m)
        .map(|copy| (0..sched.block_len).map(|time| stream[sched.stream_index(Slot { copy, time })]).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::code::{load_code, simulate};
    use crate::network::Topology;
    use crate::qarith::CNum;

    // 0 → 1 → 2 with gain 3 (n = 1). The relay sends nothing useful at
    // time 0 and forwards the first source symbol at time 1.
    fn line() -> (Topology, DsmCode) {
        let t = Topology::relay(3, &[(0, 1, CNum::new(3.0, 0.0)), (1, 2, CNum::new(3.0, 0.0))]).unwrap();
        let code = load_code(
            r#"{
              "N": 2, "n": 1,
              "codebook": [["00","00"],["10","00"]],
              "relay_maps": {"1": {"kind": "per-time", "tables": [
                 [{"rx": [], "tx": "00"}],
                 [{"rx": [[0,0]], "tx": "00"}, {"rx": [[1,0]], "tx": "10"}]
              ]}},
              "decoder": [{"rx": [[0,0],[0,0]], "message": 0}, {"rx": [[0,0],[1,0]], "message": 1}]
            }"#,
        )
        .unwrap();
        (t, code)
    }

    #[test]
    fn rounds_and_causality() {
        let (_, code) = line();
        let s = interleave_schedule(&code, 3).unwrap();
        assert_eq!(s.rounds.len(), 2);
        assert!(s.rounds.iter().all(|r| r.len() == 3));
        assert!(s.deps[0].is_empty());
        assert_eq!(s.deps[1], vec![0]);
        assert!(s.is_causal());
    }

    #[test]
    fn deinterleaving_matches_independent_runs() {
        let (t, code) = line();
        let model = code_model(&t, &code).unwrap();
        let msgs = [1, 0, 1, 1];
        let run = run_interleaved(&t, &code, &msgs).unwrap();
        for (k, &w) in msgs.iter().enumerate() {
            let tr = simulate(&t, &model, &code, w).unwrap();
            for j in 1..3 {
                assert_eq!(Some(&run.blocks[j][k]), tr.rx[j].as_ref());
            }
            assert_eq!(run.decoded[k], Some(w));
        }
    }

    #[test]
    fn block_codes_are_refused() {
        let code = load_code(
            r#"{"N": 1, "n": 1, "codebook": [["00"]],
                "relay_maps": {"1": {"kind": "block", "table": [{"rx": [[0,0]], "tx": ["00"]}]}},
                "decoder": [{"rx": [[0,0]], "message": 0}]}"#,
        )
        .unwrap();
        assert!(matches!(interleave_schedule(&code, 2), Err(Error::Refused(_))));
    }
}
