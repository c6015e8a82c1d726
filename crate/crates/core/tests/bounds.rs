use dsm_core::bounds::*;
use dsm_core::network::random_relay_topology;
use dsm_core::qarith::{quantize, CNum, GInt};
use proptest::prelude::*;

#[test]
fn constants_at_two_nodes() {
    let c = gap_constants(2, 2, 1).unwrap();
    assert!((c.kappa_node - 13.459431618637296).abs() < 1e-12);
    assert!((c.kappa_relay - 26.918863237274593).abs() < 1e-12);
    assert!((c.kappa_ic - 20.174925682500678).abs() < 1e-12);
    assert!(gap_constants(0, 1, 1).is_err());
}

#[test]
fn geometric_entropy_matches_its_series() {
    for mean in [0.25f64, 1.0, 3.0, 10.0] {
        let p = 1.0 / (1.0 + mean);
        let series: f64 = (0..20_000)
            .map(|k| p * (1.0 - p).powi(k))
            .filter(|&q| q > 0.0)
            .map(|q| -q * q.log2())
            .sum();
        assert!((geometric_entropy(mean) - series).abs() < 1e-9, "mean {mean}");
    }
}

#[test]
fn max_entropy_law_meets_the_mean() {
    let m = max_entropy_integer_power(1.0, 4096).unwrap();
    assert!((m.ratio - 0.5).abs() < 1e-9);
    assert!((m.h_z - 2.0).abs() < 1e-9);
    assert!(m.bound <= 6.0);
    assert!(max_entropy_integer_power(0.0, 4096).is_err());
}

#[test]
fn quantized_gaussian_entropy_matches_sampling() {
    // oracle: plug-in entropy of quantized samples
    use rand_distr::{Distribution, Normal};
    let mut r = dsm_core::rng::stream(1, 0);
    let d = Normal::new(0.0, 0.5f64.sqrt()).unwrap();
    let mut counts = std::collections::HashMap::new();
    let n = 400_000;
    for _ in 0..n {
        let q = quantize(CNum::new(d.sample(&mut r), d.sample(&mut r))).unwrap();
        *counts.entry(q).or_insert(0u64) += 1;
    }
    let plug: f64 = counts.values().map(|&c| c as f64 / n as f64).map(|p| -p * p.log2()).sum();
    let exact = quantized_gaussian_entropy(0.5).unwrap();
    assert!((plug - exact).abs() < 0.01, "{plug} vs {exact}");
    assert_eq!(quantized_gaussian_entropy(0.0).unwrap(), 0.0);
}

#[test]
fn side_information_stays_below_the_node_constant() {
    for seed in 0..5 {
        let t = random_relay_topology(5, 0.6, (1.0, 300.0), seed).unwrap();
        for j in 1..5 {
            let g = genie_side_info_entropy(&t, j, 5000, seed).unwrap();
            assert_eq!(g.reconstruction_failures, 0);
            assert!(g.within_bound && g.total <= g.bound, "{g:?}");
            assert!(g.carry_max_abs <= 2);
        }
    }
}

#[test]
fn stress_carries_are_small() {
    let s = genie_stress(20_000, 5, 50, 3).unwrap();
    assert_eq!(s.draws, 20_000);
    assert_eq!(s.reconstruction_failures, 0);
    assert!(s.carry_histogram.keys().all(|c| c.abs() <= 2));
}

proptest! {
    #[test]
    fn decomposition_reconstructs(
        yr in -1000i64..1000, yi in -1000i64..1000,
        v in (-50.0..50.0f64, -50.0..50.0f64), z in (-5.0..5.0f64, -5.0..5.0f64),
    ) {
        let yd = GInt::new(yr, yi);
        let (v, z) = (CNum::new(v.0, v.1), CNum::new(z.0, z.1));
        let y = CNum::new(yr as f64, yi as f64) + v + z;
        let s = genie_decompose(y, yd, v, z).unwrap();
        prop_assert_eq!(s.reconstruct(y).unwrap(), yd);
        prop_assert!(s.carry.re.abs() <= 2 && s.carry.im.abs() <= 2);
    }

    #[test]
    fn constants_grow_with_size(m in 1u32..50, k in 1u32..50, l in 1u32..4) {
        let a = gap_constants(m, k, l).unwrap();
        let b = gap_constants(m + 1, k + 1, l).unwrap();
        prop_assert!(b.kappa_relay > a.kappa_relay && b.kappa_ic > a.kappa_ic);
        prop_assert!((a.kappa_relay - m as f64 * a.kappa_node).abs() < 1e-9);
    }
}
