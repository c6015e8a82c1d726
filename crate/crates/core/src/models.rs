//! The Gaussian, linear deterministic and discrete superposition channel
//! models, and single-use signal propagation in each.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::network::{NodeId, Topology};
use crate::qarith::{bit_depth, dsm_link_quantized, floor_log2, quantize, CNum, FixedInput, GInt};

fn require_single_antenna(t: &Topology) -> Result<()> {
    if t.is_single_antenna() {
        Ok(())
    } else {
        Err(Error::Refused("multi-antenna network: expand to virtual nodes first".into()))
    }
}

/// `y_j = Σ h_ij x_i + z_j`. `tx` is indexed by node id.
pub fn gaussian_receive(t: &Topology, j: NodeId, tx: &[Option<CNum>], noise: CNum) -> Result<CNum> {
    require_single_antenna(t)?;
    let mut y = noise;
    for &k in t.in_edges(j) {
        let e = &t.edges()[k];
        let x = tx.get(e.from).copied().flatten().ok_or(Error::MissingTransmission(e.from))?;
        y += e.gain() * x;
    }
    Ok(y)
}

// ------------------------------------------------------- discrete superposition

#[derive(Clone, Debug, PartialEq)]
pub struct DsmLink {
    pub from: NodeId,
    pub to: NodeId,
    pub gain: CNum,
    pub qgain: GInt,
}

#[derive(Clone, Debug)]
pub struct DsmModel {
    n: u32,
    node_count: usize,
    links: Vec<DsmLink>,
    incoming: Vec<Vec<usize>>,
}

pub fn derive_dsm(t: &Topology) -> Result<DsmModel> {
    require_single_antenna(t)?;
    derive_dsm_with_depth(t, bit_depth(&t.gains())?)
}

/// Discrete superposition model with an explicitly chosen bit depth.
pub fn derive_dsm_with_depth(t: &Topology, n: u32) -> Result<DsmModel> {
    require_single_antenna(t)?;
    if n > crate::qarith::MAX_BIT_DEPTH {
        return Err(Error::Domain(format!("bit depth {n} is too large")));
    }
    let mut links = Vec::with_capacity(t.edges().len());
    let mut incoming = vec![Vec::new(); t.node_count()];
    for e in t.edges() {
        incoming[e.to].push(links.len());
        links.push(DsmLink { from: e.from, to: e.to, gain: e.gain(), qgain: quantize(e.gain())? });
    }
    Ok(DsmModel { n, node_count: t.node_count(), links, incoming })
}

impl DsmModel {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn links(&self) -> &[DsmLink] {
        &self.links
    }

    pub fn incoming(&self, j: NodeId) -> impl Iterator<Item = &DsmLink> {
        self.incoming[j].iter().map(|&k| &self.links[k])
    }

    pub fn qgain(&self, from: NodeId, to: NodeId) -> Option<GInt> {
        self.incoming.get(to)?.iter().map(|&k| &self.links[k]).find(|l| l.from == from).map(|l| l.qgain)
    }

    /// Number of distinct transmit symbols, `4^n`.
    pub fn alphabet_size(&self) -> u64 {
        1u64 << (2 * self.n)
    }

    pub fn check_input(&self, x: &FixedInput) -> Result<()> {
        if x.n() != self.n {
            return Err(Error::Domain(format!(
                "symbol {x} has {} bits per component, the model uses {}",
                x.n(),
                self.n
            )));
        }
        Ok(())
    }
}

/// `y'_j = Σ [[h_ij] x_i]`. `tx` is indexed by node id.
pub fn dsm_receive(m: &DsmModel, j: NodeId, tx: &[Option<FixedInput>]) -> Result<GInt> {
    let mut y = GInt::new(0, 0);
    for l in m.incoming(j) {
        let x = tx.get(l.from).copied().flatten().ok_or(Error::MissingTransmission(l.from))?;
        m.check_input(&x)?;
        y += dsm_link_quantized(l.qgain, x)?;
    }
    Ok(y)
}

// ----------------------------------------------------------- linear deterministic

/// A vector over GF(2); bit 0 is the most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    bits: Vec<bool>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![false; len] }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn xor(&self, other: &BitVec) -> Result<BitVec> {
        if self.len() != other.len() {
            return Err(Error::Domain(format!(
                "length mismatch: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        Ok(BitVec { bits: self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect() })
    }

    /// Shift toward the least significant end by `s`, dropping the bottom bits.
    pub fn shift_down(&self, s: usize) -> BitVec {
        let q = self.len();
        BitVec { bits: (0..q).map(|i| i >= s && self.bits[i - s]).collect() }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Domain(format!("{s:?} is not a bit string"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitVec::from_bits)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LdmLink {
    pub from: NodeId,
    pub to: NodeId,
    /// `floor(log2 |h|²)`: number of input bits that reach the receiver.
    pub passed: u32,
    pub shift: u32,
}

#[derive(Clone, Debug)]
pub struct LdmModel {
    q: u32,
    node_count: usize,
    links: Vec<LdmLink>,
    incoming: Vec<Vec<usize>>,
}

/// Linear deterministic counterpart; only gain magnitudes matter.
pub fn derive_ldm(t: &Topology) -> Result<LdmModel> {
    require_single_antenna(t)?;
    let mut passed = Vec::with_capacity(t.edges().len());
    for (k, e) in t.edges().iter().enumerate() {
        let p = e.gain().norm_sqr();
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!(
                "edge #{k} ({} -> {}): |h| = {} is below 1; the linear deterministic model is \
                 undefined for negative shifts",
                e.from,
                e.to,
                p.sqrt()
            )));
        }
        passed.push(floor_log2(p) as u32);
    }
    let q = passed.iter().copied().max().unwrap_or(0);
    let mut links = Vec::with_capacity(passed.len());
    let mut incoming = vec![Vec::new(); t.node_count()];
    for (e, p) in t.edges().iter().zip(passed) {
        incoming[e.to].push(links.len());
        links.push(LdmLink { from: e.from, to: e.to, passed: p, shift: q - p });
    }
    Ok(LdmModel { q, node_count: t.node_count(), links, incoming })
}

impl LdmModel {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn links(&self) -> &[LdmLink] {
        &self.links
    }

    pub fn incoming(&self, j: NodeId) -> impl Iterator<Item = &LdmLink> {
        self.incoming[j].iter().map(|&k| &self.links[k])
    }
}

/// XOR of every incoming vector shifted down by its link's shift.
pub fn ldm_receive(m: &LdmModel, j: NodeId, tx: &[Option<BitVec>]) -> Result<BitVec> {
    let q = m.q as usize;
    let mut y = BitVec::zeros(q);
    for l in m.incoming(j) {
        let x = tx.get(l.from).and_then(Option::as_ref).ok_or(Error::MissingTransmission(l.from))?;
        if x.len() != q {
            return Err(Error::Domain(format!(
                "node {} sent {} bits, the model uses {q}",
                l.from,
                x.len()
            )));
        }
        y = y.xor(&x.shift_down(l.shift as usize))?;
    }
    Ok(y)
}

#[cfg(test)]
mod test {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> CNum {
        CNum::new(re, im)
    }

    #[test]
    fn gaussian_examples() {
        let t = Topology::relay(3, &[(0, 1, c(2.0, 0.0)), (1, 2, c(1.0, 0.0)), (0, 2, c(-1.0, 0.0))])
            .unwrap();
        assert_eq!(gaussian_receive(&t, 0, &[None, None, None], c(0.3, 0.1)).unwrap(), c(0.3, 0.1));
        let y = gaussian_receive(&t, 1, &[Some(c(0.5, 0.0)), None, None], c(0.0, 0.1)).unwrap();
        assert!((y - c(1.0, 0.1)).norm() < 1e-15);
        let x = Some(c(0.4, 0.2));
        assert_eq!(gaussian_receive(&t, 2, &[x, x, None], c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(matches!(
            gaussian_receive(&t, 2, &[x, None, None], c(0.0, 0.0)),
            Err(Error::MissingTransmission(1))
        ));
    }

    #[test]
    fn dsm_examples() {
        let t = Topology::relay(3, &[(0, 1, c(3.6, 0.0)), (1, 2, c(2.3, 1.1))]).unwrap();
        let m = derive_dsm(&t).unwrap();
        assert_eq!(m.n(), 1);
        assert_eq!(m.qgain(0, 1), Some(GInt::new(3, 0)));
        assert_eq!(m.qgain(1, 2), Some(GInt::new(2, 1)));

        // two links taken from the single-link arithmetic examples: 1 and 0+1i
        let t = Topology::relay(3, &[(0, 2, c(3.6, 0.0)), (1, 2, c(2.0, 2.0)), (0, 1, c(1.0, 0.0))])
            .unwrap();
        let m = derive_dsm_with_depth(&t, 2).unwrap();
        let x0 = FixedInput::new(2, 3, 0).unwrap();
        let x1 = FixedInput::new(2, 2, 2).unwrap();
        assert_eq!(dsm_receive(&m, 2, &[Some(x0), Some(x1), None]).unwrap(), GInt::new(1, 1));
        assert_eq!(dsm_receive(&m, 0, &[None, None, None]).unwrap(), GInt::new(0, 0));
        let z = Some(FixedInput::zero(2));
        assert_eq!(dsm_receive(&m, 2, &[z, z, None]).unwrap(), GInt::new(0, 0));
        let wrong = Some(FixedInput::zero(3));
        assert!(dsm_receive(&m, 2, &[wrong, z, None]).is_err());
    }

    #[test]
    fn integer_gains_unchanged() {
        let t = Topology::relay(2, &[(0, 1, c(-5.0, 7.0))]).unwrap();
        assert_eq!(derive_dsm(&t).unwrap().qgain(0, 1), Some(GInt::new(-5, 7)));
    }

    #[test]
    fn ldm_examples() {
        let t = Topology::relay(2, &[(0, 1, c(8f64.sqrt(), 0.0))]).unwrap();
        let m = derive_ldm(&t).unwrap();
        assert_eq!((m.q(), m.links()[0].shift), (3, 0));

        let t = Topology::relay(3, &[(0, 1, c(2.0, 2.0)), (1, 2, c(1.0, 1.0))]).unwrap();
        let m = derive_ldm(&t).unwrap();
        assert_eq!(m.q(), 3);
        assert_eq!(m.links().iter().map(|l| l.shift).collect::<Vec<_>>(), vec![0, 2]);
        let x: BitVec = "101".parse().unwrap();
        assert_eq!(ldm_receive(&m, 2, &[None, Some(x.clone()), None]).unwrap().to_string(), "001");
        assert_eq!(ldm_receive(&m, 1, &[Some(x.clone()), None, None]).unwrap(), x);
        assert!(ldm_receive(&m, 1, &[Some("10".parse().unwrap()), None, None]).is_err());

        let unit = Topology::relay(2, &[(0, 1, c(1.0, 0.0))]).unwrap();
        assert_eq!(derive_ldm(&unit).unwrap().q(), 0);
        let weak = Topology::relay(2, &[(0, 1, c(0.5, 0.0))]).unwrap();
        assert!(derive_ldm(&weak).is_err());
    }

    #[test]
    fn ldm_same_signal_twice_cancels() {
        // two parallel links of equal strength from different nodes carrying the same vector
        let t = Topology::relay(3, &[(0, 1, c(4.0, 0.0)), (0, 2, c(3.0, 0.0)), (1, 2, c(0.0, 3.0))])
            .unwrap();
        let m = derive_ldm(&t).unwrap();
        let x: BitVec = "1011".parse().unwrap();
        let y = ldm_receive(&m, 2, &[Some(x.clone()), Some(x), None]).unwrap();
        assert!(y.bits().iter().all(|b| !b));
    }

    proptest! {
        #[test]
        fn ldm_is_linear(g in proptest::collection::vec(1.0f64..300.0, 3),
                         a in proptest::collection::vec(any::<bool>(), 48),
                         b in proptest::collection::vec(any::<bool>(), 48)) {
            let t = Topology::relay(3, &[(0, 1, c(g[0], 0.0)), (0, 2, c(0.0, g[1])), (1, 2, c(g[2], g[2]))]).unwrap();
            let m = derive_ldm(&t).unwrap();
            let q = m.q() as usize;
            let xa = [BitVec::from_bits(a[..q].to_vec()), BitVec::from_bits(a[q..2 * q].to_vec())];
            let xb = [BitVec::from_bits(b[..q].to_vec()), BitVec::from_bits(b[q..2 * q].to_vec())];
            let sum = [xa[0].xor(&xb[0]).unwrap(), xa[1].xor(&xb[1]).unwrap()];
            let rx = |x: &[BitVec; 2]| ldm_receive(&m, 2, &[Some(x[0].clone()), Some(x[1].clone()), None]).unwrap();
            prop_assert_eq!(rx(&sum), rx(&xa).xor(&rx(&xb)).unwrap());
        }
    }
}
