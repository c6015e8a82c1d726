//! Quantized complex arithmetic.
//!
//! Quantization truncates each component toward zero. Transmit symbols of the
//! discrete superposition model are fixed-point complex numbers with `n`
//! fractional bits per component, scaled by `1/√2` so their magnitude stays
//! below one.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CNum = Complex<f64>;
pub type GInt = Complex<i64>;

/// Largest supported bit depth; keeps `bits · 2^-n` exact in a double.
pub const MAX_BIT_DEPTH: u32 = 52;

/// Truncates each component toward zero.
pub fn quantize(c: CNum) -> Result<GInt> {
    Ok(GInt::new(trunc_component(c.re)?, trunc_component(c.im)?))
}

fn trunc_component(x: f64) -> Result<i64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot quantize non-finite value {x}")));
    }
    let t = x.trunc();
    // 2^63 is the first double outside the i64 range
    if t.abs() >= 9.223_372_036_854_776e18 {
        return Err(Error::Domain(format!("value {x} overflows a 64-bit integer")));
    }
    Ok(t as i64)
}

pub fn to_cnum(g: GInt) -> CNum {
    CNum::new(g.re as f64, g.im as f64)
}

/// Exact `floor(log2 x)` for finite `x > 0`, read off the binary exponent.
pub fn floor_log2(x: f64) -> i32 {
    debug_assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    if exp == 0 {
        let mant = bits & ((1u64 << 52) - 1);
        63 - mant.leading_zeros() as i32 - 1074
    } else {
        exp - 1023
    }
}

/// Bit depth of the discrete superposition model: the largest
/// `floor(log2 |component|)` over all gain components, ignoring zeros and
/// clamped below at zero.
pub fn bit_depth(gains: &[CNum]) -> Result<u32> {
    let mut best: Option<i32> = None;
    for (k, g) in gains.iter().enumerate() {
        for part in [g.re, g.im] {
            if !part.is_finite() {
                return Err(Error::Domain(format!("gain #{k} is not finite: {g}")));
            }
            if part != 0.0 {
                let l = floor_log2(part.abs());
                best = Some(best.map_or(l, |b| b.max(l)));
            }
        }
    }
    let raw = best.ok_or_else(|| Error::Degenerate("every gain component is zero".into()))?;
    if raw < 0 {
        log::warn!("all gains are below unit magnitude (raw bit depth {raw}); clamping to 0");
        return Ok(0);
    }
    let n = raw as u32;
    if n > MAX_BIT_DEPTH {
        return Err(Error::Domain(format!(
            "bit depth {n} exceeds the supported maximum {MAX_BIT_DEPTH}; rescale the gains"
        )));
    }
    Ok(n)
}

/// A transmit symbol: `n` fractional bits per component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FixedInput {
    n: u32,
    re_bits: u64,
    im_bits: u64,
}

impl FixedInput {
    pub fn new(n: u32, re_bits: u64, im_bits: u64) -> Result<Self> {
        if n > MAX_BIT_DEPTH {
            return Err(Error::Domain(format!("bit depth {n} exceeds {MAX_BIT_DEPTH}")));
        }
        let limit = 1u64 << n;
        if re_bits >= limit || im_bits >= limit {
            return Err(Error::Domain(format!(
                "bits ({re_bits}, {im_bits}) do not fit in {n} bits"
            )));
        }
        Ok(Self { n, re_bits, im_bits })
    }

    /// The all-zero symbol, which is what a silent node transmits.
    pub fn zero(n: u32) -> Self {
        Self { n: n.min(MAX_BIT_DEPTH), re_bits: 0, im_bits: 0 }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn re_bits(&self) -> u64 {
        self.re_bits
    }

    pub fn im_bits(&self) -> u64 {
        self.im_bits
    }

    /// Index of the symbol among all `4^n` symbols, real bits major.
    pub fn index(&self) -> u64 {
        (self.re_bits << self.n) | self.im_bits
    }

    pub fn from_index(n: u32, index: u64) -> Result<Self> {
        let mask = (1u64 << n) - 1;
        Self::new(n, (index >> n) & mask, index & mask).and_then(|x| {
            if (index >> (2 * n)) != 0 {
                Err(Error::Domain(format!("index {index} out of range for n = {n}")))
            } else {
                Ok(x)
            }
        })
    }

    pub fn value(&self) -> CNum {
        let scale = (-(self.n as f64)).exp2();
        CNum::new(
            self.re_bits as f64 * scale * FRAC_1_SQRT_2,
            self.im_bits as f64 * scale * FRAC_1_SQRT_2,
        )
    }

    /// Hex symbol notation used by code files: real then imaginary bits,
    /// each as `ceil(n / 4)` hex digits (at least one).
    pub fn to_hex(&self) -> String {
        let w = hex_width(self.n);
        format!("{:0w$x}{:0w$x}", self.re_bits, self.im_bits, w = w)
    }

    pub fn from_hex(n: u32, s: &str) -> Result<Self> {
        let w = hex_width(n);
        if s.len() != 2 * w || !s.is_ascii() {
            return Err(Error::Schema(format!(
                "symbol {s:?} should have {} hex digits for n = {n}",
                2 * w
            )));
        }
        let parse = |part: &str| {
            u64::from_str_radix(part, 16)
                .map_err(|_| Error::Schema(format!("symbol {s:?} is not hexadecimal")))
        };
        Self::new(n, parse(&s[..w])?, parse(&s[w..])?)
    }
}

fn hex_width(n: u32) -> usize {
    (n as usize).div_ceil(4).max(1)
}

impl fmt::Display for FixedInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Keeps the `n` most significant fractional bits of `√2·component`.
pub fn truncate_input(c: CNum, n: u32) -> Result<FixedInput> {
    if n > MAX_BIT_DEPTH {
        return Err(Error::Domain(format!("bit depth {n} exceeds {MAX_BIT_DEPTH}")));
    }
    let re = truncate_component(c.re, n)?;
    let im = truncate_component(c.im, n)?;
    FixedInput::new(n, re, im)
}

fn truncate_component(x: f64, n: u32) -> Result<u64> {
    if !(0.0..FRAC_1_SQRT_2).contains(&x) {
        return Err(Error::Domain(format!("component {x} is outside [0, 1/√2)")));
    }
    let limit = 1u64 << n;
    let mut bits = ((x * SQRT_2 * limit as f64).floor() as u64).min(limit - 1);
    // guard against the product rounding up across a bit boundary
    let scale = (-(n as f64)).exp2();
    while bits > 0 && bits as f64 * scale * FRAC_1_SQRT_2 > x {
        bits -= 1;
    }
    Ok(bits)
}

/// One summand of a discrete superposition reception: `[[h]·x]`.
pub fn dsm_link(h: CNum, x: FixedInput) -> Result<GInt> {
    dsm_link_quantized(quantize(h)?, x)
}

/// [`dsm_link`] with the gain already quantized.
pub fn dsm_link_quantized(qh: GInt, x: FixedInput) -> Result<GInt> {
    quantize(to_cnum(qh) * x.value())
}

#[cfg(test)]
mod test {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quantize_examples() {
        assert_eq!(quantize(CNum::new(2.7, -1.3)).unwrap(), GInt::new(2, -1));
        assert_eq!(quantize(CNum::new(0.0, 0.0)).unwrap(), GInt::new(0, 0));
        assert_eq!(quantize(CNum::new(-0.9, 0.9)).unwrap(), GInt::new(0, 0));
        assert!(quantize(CNum::new(f64::NAN, 0.0)).is_err());
        assert!(quantize(CNum::new(0.0, f64::INFINITY)).is_err());
    }

    #[test]
    fn bit_depth_examples() {
        assert_eq!(bit_depth(&[CNum::new(3.0, 4.0)]).unwrap(), 2);
        assert_eq!(bit_depth(&[CNum::new(1.0, 1.0)]).unwrap(), 0);
        assert_eq!(bit_depth(&[CNum::new(0.4, 0.3)]).unwrap(), 0);
        assert_eq!(bit_depth(&[CNum::new(0.0, -8.5), CNum::new(1.0, 0.0)]).unwrap(), 3);
        assert!(matches!(bit_depth(&[CNum::new(0.0, 0.0)]), Err(Error::Degenerate(_))));
        assert!(bit_depth(&[]).is_err());
    }

    #[test]
    fn floor_log2_matches_powers() {
        for k in -1074..1024 {
            let x = (k as f64).exp2();
            assert_eq!(floor_log2(x), k, "2^{k}");
            if k > -1000 {
                assert_eq!(floor_log2(x * 0.999_999), k - 1, "just below 2^{k}");
            }
        }
    }

    #[test]
    fn truncate_examples() {
        let x = truncate_input(CNum::new(0.6010, 0.2475), 2).unwrap();
        assert_eq!((x.re_bits(), x.im_bits()), (3, 1));
        assert!((x.value().re - 0.75 * FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((x.value().im - 0.25 * FRAC_1_SQRT_2).abs() < 1e-12);
        let z = truncate_input(CNum::new(0.0, 0.0), 4).unwrap();
        assert_eq!((z.re_bits(), z.im_bits()), (0, 0));
        assert!(truncate_input(CNum::new(FRAC_1_SQRT_2, 0.0), 3).is_err());
        assert!(truncate_input(CNum::new(-0.01, 0.0), 3).is_err());
    }

    #[test]
    fn dsm_link_examples() {
        let x = FixedInput::new(2, 3, 0).unwrap();
        assert_eq!(dsm_link(CNum::new(3.6, 0.0), x).unwrap(), GInt::new(1, 0));
        assert_eq!(dsm_link(CNum::new(3.6, 0.0), FixedInput::zero(2)).unwrap(), GInt::new(0, 0));
        let y = FixedInput::new(1, 1, 1).unwrap();
        assert_eq!(dsm_link(CNum::new(2.0, 2.0), y).unwrap(), GInt::new(0, 1));
    }

    #[test]
    fn fixed_input_bounds() {
        assert!(FixedInput::new(2, 4, 0).is_err());
        assert!(FixedInput::new(53, 0, 0).is_err());
        let top = FixedInput::new(3, 7, 7).unwrap();
        assert!(top.value().norm() <= 1.0);
        assert!((top.value().re - (1.0 - 0.125) * FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn hex_round_trip() {
        let x = FixedInput::new(2, 3, 0).unwrap();
        assert_eq!(x.to_hex(), "30");
        assert_eq!(FixedInput::from_hex(2, "30").unwrap(), x);
        let y = FixedInput::new(6, 0x2a, 0x3f).unwrap();
        assert_eq!(y.to_hex(), "2a3f");
        assert_eq!(FixedInput::from_hex(6, "2a3f").unwrap(), y);
        assert!(FixedInput::from_hex(2, "40").is_err());
        assert!(FixedInput::from_hex(2, "300").is_err());
    }

    #[test]
    fn index_round_trip() {
        for i in 0..256 {
            let x = FixedInput::from_index(4, i).unwrap();
            assert_eq!(x.index(), i);
        }
        assert!(FixedInput::from_index(2, 16).is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![-1e6f64..1e6, -4.0f64..4.0, (-50i64..50).prop_map(|k| k as f64)]
    }

    proptest! {
        #[test]
        fn quantize_is_odd_and_idempotent(re in finite(), im in finite()) {
            let c = CNum::new(re, im);
            let q = quantize(c).unwrap();
            prop_assert_eq!(quantize(-c).unwrap(), -q);
            prop_assert_eq!(quantize(to_cnum(q)).unwrap(), q);
            for (part, qpart) in [(re, q.re), (im, q.im)] {
                let r = part - qpart as f64;
                prop_assert!(r > -1.0 && r < 1.0);
                prop_assert!(r == 0.0 || r.signum() == part.signum());
            }
        }

        #[test]
        fn truncation_monotone_and_close(re in 0.0f64..FRAC_1_SQRT_2, im in 0.0f64..FRAC_1_SQRT_2) {
            let c = CNum::new(re, im);
            let mut prev = CNum::new(0.0, 0.0);
            for n in 0..=MAX_BIT_DEPTH {
                let v = truncate_input(c, n).unwrap().value();
                prop_assert!(v.re >= prev.re && v.im >= prev.im);
                prop_assert!(v.re <= re && v.im <= im);
                let tol = (-(n as f64)).exp2() * FRAC_1_SQRT_2;
                prop_assert!(re - v.re < tol && im - v.im < tol);
                prev = v;
            }
        }

        #[test]
        fn dsm_link_magnitude_bound(hre in -300.0f64..300.0, him in -300.0f64..300.0,
                                    n in 0u32..10, a in any::<u64>(), b in any::<u64>()) {
            let mask = (1u64 << n) - 1;
            let x = FixedInput::new(n, a & mask, b & mask).unwrap();
            let h = CNum::new(hre, him);
            let y = dsm_link(h, x).unwrap();
            let qh = to_cnum(quantize(h).unwrap());
            prop_assert!(to_cnum(y).norm() <= qh.norm() + SQRT_2);
        }
    }
}
