use dsm_core::models::*;
use dsm_core::network::{random_relay_topology, Topology};
use dsm_core::qarith::{quantize, CNum, FixedInput, GInt};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #[test]
    fn dsm_reception_is_the_quantized_sum(seed in any::<u64>()) {
        let t = random_relay_topology(5, 0.6, (1.0, 40.0), seed).unwrap();
        let m = derive_dsm(&t).unwrap();
        let n = m.n();
        let mut r = dsm_core::rng::stream(seed, 9);
        let tx: Vec<Option<FixedInput>> = (0..5)
            .map(|_| Some(FixedInput::from_index(n, r.random_range(0..m.alphabet_size())).unwrap()))
            .collect();
        for j in 0..5 {
            // oracle: straight from the edge gains
            let mut want = GInt::new(0, 0);
            for &e in t.in_edges(j) {
                let e = &t.edges()[e];
                let qh = quantize(e.gain()).unwrap();
                let p = CNum::new(qh.re as f64, qh.im as f64) * tx[e.from].unwrap().value();
                want += GInt::new(p.re.trunc() as i64, p.im.trunc() as i64);
            }
            prop_assert_eq!(dsm_receive(&m, j, &tx).unwrap(), want);
        }
    }

    #[test]
    fn ldm_is_linear(seed in any::<u64>()) {
        let t = random_relay_topology(5, 0.6, (1.0, 300.0), seed).unwrap();
        let m = derive_ldm(&t).unwrap();
        let q = m.q() as usize;
        let mut r = dsm_core::rng::stream(seed, 3);
        let mut draw = || -> Vec<Option<BitVec>> {
            (0..5).map(|_| Some(BitVec::from_bits((0..q).map(|_| r.random_bool(0.5)).collect()))).collect()
        };
        let (a, b) = (draw(), draw());
        let ab: Vec<_> = a.iter().zip(&b).map(|(x, y)| Some(x.as_ref().unwrap().xor(y.as_ref().unwrap()).unwrap())).collect();
        for j in 0..5 {
            let lhs = ldm_receive(&m, j, &ab).unwrap();
            let rhs = ldm_receive(&m, j, &a).unwrap().xor(&ldm_receive(&m, j, &b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn ldm_passes_floor_log_power_bits(mag in 1.0..1e6f64, phase in 0.0..std::f64::consts::TAU) {
        let t = Topology::relay(2, &[(0, 1, CNum::from_polar(mag, phase))]).unwrap();
        let m = derive_ldm(&t).unwrap();
        prop_assert_eq!(m.links()[0].passed, (mag * mag).log2().floor() as u32);
    }
}

#[test]
fn ldm_shifts_out_low_bits() {
    // |h|² = 16 passes 4 of q = 6 bits, shifted down by 2
    let t = Topology::relay(3, &[(0, 1, CNum::new(4.0, 0.0)), (1, 2, CNum::new(8.0, 0.0))]).unwrap();
    let m = derive_ldm(&t).unwrap();
    assert_eq!(m.q(), 6);
    let x = BitVec::from_bits(vec![true, false, true, true, false, true]);
    let y = ldm_receive(&m, 1, &[Some(x), None, None]).unwrap();
    assert_eq!(y.bits(), &[false, false, true, false, true, true]);
}

#[test]
fn gaussian_reception_adds_noise() {
    let t = Topology::relay(2, &[(0, 1, CNum::new(2.0, 1.0))]).unwrap();
    let y = gaussian_receive(&t, 1, &[Some(CNum::new(0.5, 0.0)), None], CNum::new(0.1, -0.1)).unwrap();
    assert!((y - CNum::new(1.1, 0.4)).norm() < 1e-12);
}

#[test]
fn wrong_depth_inputs_are_rejected() {
    let t = Topology::relay(2, &[(0, 1, CNum::new(5.0, 0.0))]).unwrap();
    let m = derive_dsm(&t).unwrap();
    assert_eq!(m.n(), 2);
    assert!(dsm_receive(&m, 1, &[Some(FixedInput::zero(3)), None]).is_err());
}
