use std::collections::HashMap;

use dsm_core::capacity::*;
use dsm_core::models::{derive_dsm, dsm_receive};
use dsm_core::network::{enumerate_cuts, random_relay_topology, Cut, Topology};
use dsm_core::qarith::{CNum, FixedInput};
use proptest::prelude::*;

// brute-force I(x_from; y_to) by enumerating every joint input
fn brute_force_mi(t: &Topology, from: &[usize], to: &[usize]) -> f64 {
    let m = derive_dsm(t).unwrap();
    let a = m.alphabet_size();
    let total = a.pow(from.len() as u32);
    let mut ys: HashMap<Vec<(i64, i64)>, f64> = HashMap::new();
    for idx in 0..total {
        let mut tx = vec![Some(FixedInput::zero(m.n())); t.node_count()];
        let mut rest = idx;
        for &i in from {
            tx[i] = Some(FixedInput::from_index(m.n(), rest % a).unwrap());
            rest /= a;
        }
        let y: Vec<(i64, i64)> = to.iter().map(|&j| dsm_receive(&m, j, &tx).unwrap()).map(|g| (g.re, g.im)).collect();
        *ys.entry(y).or_default() += 1.0;
    }
    // deterministic channel: I = H(y)
    let n = total as f64;
    -ys.values().map(|&c| c / n * (c / n).log2()).sum::<f64>()
}

#[test]
fn exact_mi_matches_brute_force() {
    for seed in 0..15 {
        let t = random_relay_topology(4, 0.7, (1.0, 6.0), seed).unwrap();
        let m = derive_dsm(&t).unwrap();
        for c in enumerate_cuts(&t).unwrap() {
            let from = c.omega().to_vec();
            let to = c.complement().to_vec();
            if m.alphabet_size().pow(from.len() as u32) > 1 << 16 {
                continue;
            }
            let got = dsm_mi_exact(&m, &uniform_profile(&from), &from, &to).unwrap().value;
            let want = brute_force_mi(&t, &from, &to);
            assert!((got - want).abs() < 1e-9, "seed {seed} cut {}: {got} vs {want}", c.label());
        }
    }
}

#[test]
fn single_link_closed_forms() {
    let h = CNum::new(3.0, 4.0);
    let t = Topology::relay(2, &[(0, 1, h)]).unwrap();
    let c = Cut::new(&t, &[0]).unwrap();
    let g = gaussian_cut_value(&t, &c).unwrap();
    assert!((g.value - 26f64.log2()).abs() < 1e-12);
    let rep = gap_report(&t, &GapOptions::default()).unwrap();
    assert_eq!(rep.rows[0].ldm_bits, Some(4));
}

#[test]
fn monte_carlo_agrees_with_exact() {
    let t = Topology::interference(2, &[(0, 0, CNum::new(2.5, 1.5)), (1, 0, CNum::new(-1.2, 2.8))]).unwrap();
    let m = derive_dsm(&t).unwrap();
    let p = uniform_profile(&[0, 1]);
    let exact = dsm_mi_exact(&m, &p, &[0], &[2]).unwrap().value;
    let est = mi_monte_carlo(McModel::Dsm(&m), &p, &[0], &[2], 50_000, 4).unwrap();
    assert!((est.value - exact).abs() <= 3.0 * est.half_width.max(1e-3), "{est:?} vs {exact}");
}

#[test]
fn gaussian_inputs_give_the_log_det() {
    let t = Topology::relay(3, &[(0, 1, CNum::new(2.0, 0.0)), (0, 2, CNum::new(1.0, 1.0)), (1, 2, CNum::new(3.0, 0.0))])
        .unwrap();
    let p = [(0, InputLaw::Gaussian)].into_iter().collect();
    let est = mi_monte_carlo(McModel::Gaussian(&t), &p, &[0], &[1, 2], 1000, 0).unwrap();
    assert_eq!(est.method, MiMethod::ClosedForm);
    // H = [2, 1+i]ᵀ: log2(1 + |h|²) with |h|² = 6
    assert!((est.value - 7f64.log2()).abs() < 1e-12);
}

#[test]
fn oversized_enumerations_are_refused() {
    let t = Topology::relay(2, &[(0, 1, CNum::new(1e6, 0.0))]).unwrap();
    let m = derive_dsm(&t).unwrap();
    assert!(dsm_mi_exact_with_cap(&m, &uniform_profile(&[0]), &[0], &[1], 1 << 10).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn minima_bound_every_row(seed in any::<u64>()) {
        let t = random_relay_topology(4, 0.6, (1.0, 8.0), seed).unwrap();
        let rep = gap_report(&t, &GapOptions::default()).unwrap();
        for r in &rep.rows {
            prop_assert!(rep.minima.gaussian <= r.gaussian_bits + 1e-12);
            if let (Some(d), Some(min)) = (r.dsm_bits, rep.minima.dsm) {
                prop_assert!(min <= d + 1e-12);
            }
            prop_assert!(r.gaussian_bits >= 0.0);
        }
    }

    #[test]
    fn deterministic_mi_is_at_most_the_input_entropy(seed in any::<u64>()) {
        let t = random_relay_topology(3, 0.8, (1.0, 20.0), seed).unwrap();
        let m = derive_dsm(&t).unwrap();
        let v = dsm_mi_exact(&m, &uniform_profile(&[0]), &[0], &[1, 2]).unwrap().value;
        prop_assert!(v >= 0.0 && v <= 2.0 * m.n() as f64 + 1e-9);
    }
}
