//! Self-check property suite: runs the model invariants end to end and
//! reports one line per property. Used by `dsmnet verify` and the
//! acceptance tests.

use rand::Rng as _;
use serde::Serialize;

use crate::bounds::genie_side_info_entropy;
use crate::capacity::{dsm_mi_exact, gap_report, mi_monte_carlo, uniform_profile, GapOptions, McModel};
use crate::error::Result;
use crate::lifting::{block_extend, load_code, prune, run_lifted, Noise, PruneOptions};
use crate::models::{derive_dsm, derive_ldm, ldm_receive, BitVec};
use crate::network::{random_relay_topology, Topology};
use crate::qarith::{quantize, to_cnum, CNum};
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, detail }
    }
}

/// `y(a ⊕ b) = y(a) ⊕ y(b)` at every receiver of random networks.
pub fn ldm_linearity(cases: usize, seed: u64) -> Result<Check> {
    let mut r = rng::stream(seed, 1);
    let mut failures = 0;
    for case in 0..cases {
        let t = random_relay_topology(5, 0.6, (1.0, 300.0), rng::derive_seed(seed, case as u64))?;
        let m = derive_ldm(&t)?;
        let q = m.q() as usize;
        let mut draw = || -> Vec<Option<BitVec>> {
            (0..t.node_count()).map(|_| Some(BitVec::from_bits((0..q).map(|_| r.random_bool(0.5)).collect()))).collect()
        };
        let (a, b) = (draw(), draw());
        let ab: Vec<Option<BitVec>> =
            a.iter().zip(&b).map(|(x, y)| Some(x.as_ref().unwrap().xor(y.as_ref().unwrap()).unwrap())).collect();
        for j in 0..t.node_count() {
            let lhs = ldm_receive(&m, j, &ab)?;
            let rhs = ldm_receive(&m, j, &a)?.xor(&ldm_receive(&m, j, &b)?)?;
            failures += (lhs != rhs) as usize;
        }
    }
    Ok(Check::new("ldm-linearity", failures == 0, format!("{cases} random networks, {failures} violations")))
}

/// `[−x] = −[x]` and `[[x]] = [x]` on a grid and on random points.
pub fn quantizer_symmetry(random: usize, seed: u64) -> Result<Check> {
    let check = |x: CNum| -> Result<bool> {
        let q = quantize(x)?;
        Ok(quantize(-x)? == -q && quantize(to_cnum(q))? == q)
    };
    let mut points = 0;
    let mut failures = 0;
    for a in -96..=96 {
        for b in -96..=96 {
            failures += !check(CNum::new(a as f64 / 8.0, b as f64 / 8.0))? as usize;
            points += 1;
        }
    }
    let mut r = rng::stream(seed, 2);
    for _ in 0..random {
        let scale = 10f64.powi(r.random_range(-3..9));
        let x = CNum::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)) * scale;
        failures += !check(x)? as usize;
        points += 1;
    }
    Ok(Check::new("quantizer-symmetry", failures == 0, format!("{points} points, {failures} violations")))
}

/// Monte Carlo MI covers the exact value within its half-width in at least
/// 90% of seeded runs on a two-transmitter fixture.
pub fn mc_vs_exact(runs: usize, samples: usize, seed: u64) -> Result<Check> {
    // two transmitters into one receiver
    let t = Topology::interference(2, &[(0, 0, CNum::new(2.5, 1.5)), (1, 0, CNum::new(-1.2, 2.8))])?;
    let m = derive_dsm(&t)?;
    let p = uniform_profile(&[0, 1]);
    let exact = dsm_mi_exact(&m, &p, &[0], &[2])?.value;
    let mut covered = 0;
    for k in 0..runs {
        let est = mi_monte_carlo(McModel::Dsm(&m), &p, &[0], &[2], samples, rng::derive_seed(seed, k as u64))?;
        covered += ((est.value - exact).abs() <= est.half_width) as usize;
    }
    let passed = covered as f64 >= 0.9 * runs as f64;
    Ok(Check::new("mc-vs-exact", passed, format!("exact {exact:.6} bits, covered in {covered}/{runs} runs")))
}

const LINE_CODE: &str = r#"{"N":1,"n":1,
    "codebook":[["00"],["10"],["01"],["11"]],
    "relay_maps":{"1":{"kind":"block","table":[
        {"rx":[[0,0]],"tx":["00"]},{"rx":[[1,0]],"tx":["10"]},
        {"rx":[[0,1]],"tx":["01"]},{"rx":[[1,1]],"tx":["11"]}]}},
    "decoder":[{"rx":[[0,0]],"message":0},{"rx":[[1,0]],"message":1},
               {"rx":[[0,1]],"message":2},{"rx":[[1,1]],"message":3}]}"#;

fn seeded_reports(seed: u64) -> Result<String> {
    let t = random_relay_topology(5, 0.6, (1.0, 20.0), seed)?;
    let gap = gap_report(&t, &GapOptions::default())?;
    let genie = genie_side_info_entropy(&t, t.destination(), 20_000, seed)?;
    let m = derive_dsm(&t)?;
    let mi = mi_monte_carlo(McModel::Dsm(&m), &uniform_profile(&[0]), &[0], &[t.destination()], 5000, seed)?;
    let line = Topology::relay(3, &[(0, 1, CNum::new(3.0, 0.0)), (1, 2, CNum::new(3.0, 0.0))])?;
    let code = load_code(LINE_CODE)?;
    let ext = block_extend(&line, &code, 4)?;
    let lifted = prune(&ext, &[0.1], &PruneOptions { seed, ..Default::default() })?;
    let trials = run_lifted(&lifted, 50, seed, Noise::Unit)?;
    Ok(serde_json::to_string(&(gap.to_csv()?, genie, mi, trials)).expect("reports serialize"))
}

/// Three runs with one seed give byte-identical reports.
pub fn determinism(seed: u64) -> Result<Check> {
    let first = seeded_reports(seed)?;
    let same = (0..2).map(|_| seeded_reports(seed)).collect::<Result<Vec<_>>>()?.iter().all(|s| *s == first);
    Ok(Check::new("determinism", same, format!("3 runs, {} bytes each", first.len())))
}

/// The whole suite at its standard sizes.
pub fn run_all(seed: u64) -> Result<Vec<Check>> {
    Ok(vec![
        ldm_linearity(1000, seed)?,
        quantizer_symmetry(100_000, seed)?,
        mc_vs_exact(100, 10_000, seed)?,
        determinism(seed)?,
    ])
}

#[cfg(test)]
mod test {
    use super::*;

    #[test]
    fn small_suite_passes() {
        assert!(ldm_linearity(50, 3).unwrap().passed);
        assert!(quantizer_symmetry(1000, 3).unwrap().passed);
        let mc = mc_vs_exact(20, 5000, 3).unwrap();
        assert!(mc.passed, "{}", mc.detail);
    }
}
