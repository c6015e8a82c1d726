use std::path::PathBuf;

use dsm_core::lifting::*;
use dsm_core::network::{load_topology_file, Topology};
use dsm_core::qarith::CNum;
use dsm_core::rng;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn diamond() -> (Topology, DsmCode) {
    let t = load_topology_file(&fixture("diamond.json")).unwrap();
    let code = load_code_file(&fixture("diamond_code.json")).unwrap();
    (t, code)
}

#[test]
fn shipped_code_is_zero_error_at_rate_two() {
    let (t, code) = diamond();
    assert_eq!((code.n(), code.block_len(), code.size()), (2, 2, 16));
    assert_eq!(code.rate(), 2.0);
    let (kept, rep) = purge_zero_error(&t, &code).unwrap();
    assert_eq!(rep.retained, 16);
    assert!(rep.removed.is_empty());
    assert_eq!(kept.size(), code.size());
    assert_eq!(kept.claimed_error(), Some(0.0));
}

#[test]
fn codebook_members_land_in_every_pruned_set() {
    let (t, code) = diamond();
    let ext = block_extend(&t, &code, 2).unwrap();
    assert_eq!(ext.size(), 256);
    for seed in 0..5 {
        let lifted = prune(&ext, &[0.3], &PruneOptions { seed, ..Default::default() }).unwrap();
        let cb = lifted.codebook();
        assert!(cb.exact);
        // exhaustive: members are exactly the codewords whose receptions survive
        let mut count = 0;
        for i in 0..ext.size() {
            let w = ext.messages(i);
            let inside = lifted
                .nodes()
                .iter()
                .enumerate()
                .all(|(pos, p)| p.typical.contains(&ext.reception(pos, &w)) && p.contains(&ext.reception(pos, &w)));
            assert_eq!(inside, lifted.contains(&w));
            count += inside as usize;
        }
        assert_eq!(count, cb.members.len());
    }
}

#[test]
fn zero_exponent_keeps_the_typical_codebook() {
    let (t, code) = diamond();
    let ext = block_extend(&t, &code, 2).unwrap();
    let lifted = prune(&ext, &[0.0], &PruneOptions::default()).unwrap();
    for w in &lifted.codebook().members {
        for (pos, p) in lifted.nodes().iter().enumerate() {
            assert!(p.typical.contains(&ext.reception(pos, w)));
        }
    }
    // with no pruning only atypical receptions are lost
    let typical = (0..ext.size())
        .map(|i| ext.messages(i))
        .filter(|w| lifted.nodes().iter().enumerate().all(|(pos, p)| p.typical.contains(&ext.reception(pos, w))))
        .count();
    assert_eq!(lifted.codebook().members.len(), typical);
}

#[test]
fn larger_exponents_shrink_the_codebook_on_average() {
    let (t, code) = diamond();
    let ext = block_extend(&t, &code, 2).unwrap();
    let mean_size = |e: f64| {
        (0..10)
            .map(|seed| prune(&ext, &[e], &PruneOptions { seed, ..Default::default() }).unwrap().codebook().size)
            .sum::<f64>()
            / 10.0
    };
    let sizes: Vec<f64> = [0.0, 0.1, 0.4, 1.0].iter().map(|&e| mean_size(e)).collect();
    assert!(sizes.windows(2).all(|w| w[1] <= w[0]), "{sizes:?}");
}

#[test]
fn noiseless_runs_never_fail() {
    let (t, code) = diamond();
    let ext = block_extend(&t, &code, 4).unwrap();
    let lifted = prune(&ext, &[0.05], &PruneOptions { seed: 9, ..Default::default() }).unwrap();
    let rep = run_lifted(&lifted, 300, 4, Noise::None).unwrap();
    assert_eq!(rep.block_errors, 0);
}

#[test]
fn decoder_recovers_noiseless_receptions() {
    let (t, code) = diamond();
    let ext = block_extend(&t, &code, 3).unwrap();
    let lifted = prune(&ext, &[0.0], &PruneOptions::default()).unwrap();
    let mut r = rng::stream(2, 0);
    for _ in 0..50 {
        let w = lifted.draw(&mut r).unwrap();
        for (pos, &j) in ext.table().nodes.iter().enumerate() {
            let seq = ext.reception(pos, &w);
            let means = lifted.means(pos);
            let y: Vec<CNum> = seq.iter().flat_map(|&b| means[b as usize].iter().copied()).collect();
            let d = lift_decode_step(&lifted, pos, &y);
            assert_eq!(d.seq, seq, "node {j}");
            assert!(!d.exhausted);
        }
    }
}

#[test]
fn trial_reports_are_reproducible() {
    let (t, code) = diamond();
    let cfg = LiftConfig { m: 4, trials: 50, seed: 21, ..Default::default() };
    let a = lift_pipeline(&t, &code, &cfg).unwrap();
    let b = lift_pipeline(&t, &code, &cfg).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn measured_side_information_is_small_for_strong_links() {
    let (t, code) = diamond();
    let g = genie_exponents(&t, &code, 20_000, 3).unwrap();
    assert_eq!(g.iter().map(|e| e.node).collect::<Vec<_>>(), vec![1, 2, 3]);
    assert!(g.iter().all(|e| e.bits_per_use >= 0.0 && e.bits_per_use < 0.05), "{g:?}");
}

#[test]
fn weakened_network_rejects_the_code() {
    let (t, code) = diamond();
    // the code needs n = 2, which the weakened network no longer supports
    let weak = t.scaled(0.45).unwrap();
    assert!(genie_exponents(&weak, &code, 1000, 0).is_err());
}

#[test]
fn rate_accounting_at_growing_m() {
    let (t, code) = diamond();
    let exps: Vec<f64> = genie_exponents(&t, &code, 20_000, 5).unwrap().iter().map(|e| e.bits_per_use).collect();
    let mut slacks = Vec::new();
    for m in [2usize, 4, 8] {
        let ext = block_extend(&t, &code, m).unwrap();
        let lifted = prune(&ext, &exps, &PruneOptions { seed: 1, ..Default::default() }).unwrap();
        let slack = ext.rate() - lifted.exponent_sum() - lifted.rate();
        slacks.push(slack);
        assert!(lifted.rate() >= ext.rate() - lifted.exponent_sum() - 0.5, "m = {m}: {slack}");
    }
    assert!(slacks[2] < slacks[0], "{slacks:?}");
}

#[test]
fn per_time_codes_refuse_block_extension() {
    let t = Topology::relay(3, &[(0, 1, CNum::new(3.0, 0.0)), (1, 2, CNum::new(3.0, 0.0))]).unwrap();
    let code = load_code(
        r#"{"N": 1, "n": 1, "codebook": [["00"], ["10"]],
            "relay_maps": {"1": {"kind": "per-time", "tables": [[{"rx": [], "tx": "00"}]]}},
            "decoder": [{"rx": [[0,0]], "message": 0}]}"#,
    )
    .unwrap();
    assert!(block_extend(&t, &code, 2).is_err());
    assert_eq!(interleave_schedule(&code, 2).unwrap().rounds.len(), 1);
}

#[test]
fn typical_set_size_tracks_entropy() {
    let (t, code) = diamond();
    let ext = block_extend(&t, &code, 8).unwrap();
    let ts = typical_outputs(&ext, 3, 0.25).unwrap();
    let c = ts.size_check();
    assert!(c.log2_size <= c.m_entropy + 1e-9);
    assert!(c.per_block_deviation > -1.0, "{c:?}");
}
