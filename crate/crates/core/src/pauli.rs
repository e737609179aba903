//! Bit-packed Pauli strings and sparse complex combinations of them.
//!
//! A [`PauliTerm`] stores one Pauli string on `n ≤ 64` qubits as an X mask, a
//! Z mask and a power of `i`. The string encoded by `(x, z)` is always the
//! Hermitian one, i.e. a site with both bits set carries `Y`, so
//! `term = i^phase · σ(x, z)` with `σ = ⊗_j {I, X, Y, Z}`.
//!
//! Site `j` (1-based, as in all printed labels) lives on bit `j - 1`, and the
//! same little-endian convention is used for dense matrices: site 1 is the
//! least significant bit of the basis index.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{max_dense_qubits, DenseOperator};

/// Largest qubit count representable by the bit masks.
pub const MAX_SITES: usize = 64;

/// Coefficients with magnitude at or below this are dropped after every operation.
pub const DEFAULT_PRUNE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

#[inline]
fn site_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn check_sites(n: usize) -> Result<()> {
    if n > MAX_SITES {
        return Err(Error::TooManyQubits { n, max: MAX_SITES });
    }
    Ok(())
}

/// `i^k` for any integer `k`.
#[inline]
pub fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A single Pauli string with an exact phase `i^phase`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliTerm {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

impl PauliTerm {
    pub fn identity(n: usize) -> Result<Self> {
        check_sites(n)?;
        Ok(PauliTerm { n, x: 0, z: 0, phase: 0 })
    }

    /// Builds a term from raw masks. Bits at positions `>= n` are rejected.
    pub fn from_masks(n: usize, x: u64, z: u64, phase: u8) -> Result<Self> {
        check_sites(n)?;
        let mask = site_mask(n);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::InvalidParameter(format!(
                "mask bits set beyond site {n}"
            )));
        }
        Ok(PauliTerm { n, x, z, phase: phase % 4 })
    }

    /// Single-site operator on 1-based `site`.
    pub fn single(n: usize, site: usize, p: Pauli) -> Result<Self> {
        Self::from_ops(n, &[(site, p)])
    }

    /// Product of single-site operators on distinct 1-based sites.
    pub fn from_ops(n: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut t = Self::identity(n)?;
        for &(site, p) in ops {
            if site == 0 || site > n {
                return Err(Error::IndexOutOfRange { index: site, max: n });
            }
            let bit = 1u64 << (site - 1);
            if (t.x | t.z) & bit != 0 {
                return Err(Error::InvalidParameter(format!("site {site} repeated")));
            }
            let (bx, bz) = p.bits();
            if bx {
                t.x |= bit;
            }
            if bz {
                t.z |= bit;
            }
        }
        Ok(t)
    }

    /// Parses labels such as `"X1X2"`, `"Z1 Y3"` or `"I"`.
    pub fn from_label(n: usize, label: &str) -> Result<Self> {
        let mut ops = Vec::new();
        let mut chars = label.chars().filter(|c| !c.is_whitespace()).peekable();
        while let Some(c) = chars.next() {
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unexpected character {other:?} in Pauli label {label:?}"
                    )))
                }
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            if digits.is_empty() {
                if p == Pauli::I {
                    continue;
                }
                return Err(Error::InvalidParameter(format!(
                    "missing site index in Pauli label {label:?}"
                )));
            }
            let site: usize = digits.parse().map_err(|_| {
                Error::InvalidParameter(format!("bad site index in {label:?}"))
            })?;
            if p != Pauli::I {
                ops.push((site, p));
            }
        }
        Self::from_ops(n, &ops)
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.phase == 0
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn phase(&self) -> Complex64 {
        i_pow(self.phase as i64)
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn pauli_at(&self, site: usize) -> Pauli {
        let bit = 1u64 << (site - 1);
        match (self.x & bit != 0, self.z & bit != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Group product with exact phase tracking.
    pub fn mul(&self, other: &PauliTerm) -> Result<PauliTerm> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        let (x, z, k) = mul_masks(self.x, self.z, other.x, other.z);
        let phase = (k + self.phase as i64 + other.phase as i64).rem_euclid(4) as u8;
        Ok(PauliTerm { n: self.n, x, z, phase })
    }

    pub fn commutes_with(&self, other: &PauliTerm) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Label of the Hermitian string, without the phase.
    pub fn label(&self) -> String {
        if self.x == 0 && self.z == 0 {
            return "I".to_string();
        }
        let mut s = String::new();
        for site in 1..=self.n {
            match self.pauli_at(site) {
                Pauli::I => {}
                p => s.push_str(&format!("{p:?}{site}")),
            }
        }
        s
    }
}

/// Product of the Hermitian strings `σ(xa, za) σ(xb, zb) = i^k σ(xa^xb, za^zb)`.
#[inline]
fn mul_masks(xa: u64, za: u64, xb: u64, zb: u64) -> (u64, u64, i64) {
    let x = xa ^ xb;
    let z = za ^ zb;
    let k = (xa & za).count_ones() as i64 + (xb & zb).count_ones() as i64
        + 2 * (za & xb).count_ones() as i64
        - (x & z).count_ones() as i64;
    (x, z, k)
}

/// Sparse complex linear combination of Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<(u64, u64), Complex64>,
    prune: f64,
}

impl PauliSum {
    pub fn zero(n: usize) -> Result<Self> {
        check_sites(n)?;
        Ok(PauliSum { n, terms: BTreeMap::new(), prune: DEFAULT_PRUNE })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self::from_term(PauliTerm::identity(n)?))
    }

    pub fn from_term(t: PauliTerm) -> Self {
        let mut s = PauliSum { n: t.n, terms: BTreeMap::new(), prune: DEFAULT_PRUNE };
        s.terms.insert((t.x, t.z), t.phase());
        s
    }

    /// Convenience for `coeff · label`, e.g. `PauliSum::from_label(3, "X1X2", 0.5.into())`.
    pub fn from_label(n: usize, label: &str, coeff: Complex64) -> Result<Self> {
        Ok(Self::from_term(PauliTerm::from_label(n, label)?).scale(coeff))
    }

    pub fn from_terms<It>(n: usize, terms: It) -> Result<Self>
    where
        It: IntoIterator<Item = (PauliTerm, Complex64)>,
    {
        let mut s = Self::zero(n)?;
        for (t, c) in terms {
            if t.n != n {
                return Err(Error::DimensionMismatch { left: n, right: t.n });
            }
            s.accumulate(t.x, t.z, c * t.phase());
        }
        s.canonicalize();
        Ok(s)
    }

    pub fn with_prune(mut self, threshold: f64) -> Self {
        self.prune = threshold;
        self.canonicalize();
        self
    }

    pub fn prune_threshold(&self) -> f64 {
        self.prune
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of the Hermitian string with masks `(x, z)`.
    pub fn coefficient(&self, x: u64, z: u64) -> Complex64 {
        self.terms.get(&(x, z)).copied().unwrap_or_default()
    }

    pub fn coefficient_of(&self, label: &str) -> Result<Complex64> {
        let t = PauliTerm::from_label(self.n, label)?;
        Ok(self.coefficient(t.x, t.z))
    }

    /// Terms in canonical `(x, z)` order, each with phase 0.
    pub fn iter(&self) -> impl Iterator<Item = (PauliTerm, Complex64)> + '_ {
        self.terms
            .iter()
            .map(move |(&(x, z), &c)| (PauliTerm { n: self.n, x, z, phase: 0 }, c))
    }

    fn accumulate(&mut self, x: u64, z: u64, c: Complex64) {
        *self.terms.entry((x, z)).or_default() += c;
    }

    fn canonicalize(&mut self) {
        let prune = self.prune;
        self.terms.retain(|_, c| c.norm() > prune);
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(())
    }

    pub fn scale(&self, c: Complex64) -> PauliSum {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.canonicalize();
        out
    }

    pub fn checked_add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&k, &c) in &other.terms {
            *out.terms.entry(k).or_default() += c;
        }
        out.canonicalize();
        Ok(out)
    }

    pub fn checked_sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.checked_add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Bilinear extension of the Pauli group product.
    pub fn checked_mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = PauliSum { n: self.n, terms: BTreeMap::new(), prune: self.prune };
        for (&(xa, za), &ca) in &self.terms {
            for (&(xb, zb), &cb) in &other.terms {
                let (x, z, k) = mul_masks(xa, za, xb, zb);
                out.accumulate(x, z, ca * cb * i_pow(k));
            }
        }
        out.canonicalize();
        Ok(out)
    }

    /// `ab - ba`. Only anticommuting string pairs contribute.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.bracket(other, true)
    }

    /// `ab + ba`. Only commuting string pairs contribute.
    pub fn anticommutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.bracket(other, false)
    }

    fn bracket(&self, other: &PauliSum, commutator: bool) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut out = PauliSum { n: self.n, terms: BTreeMap::new(), prune: self.prune };
        for (&(xa, za), &ca) in &self.terms {
            for (&(xb, zb), &cb) in &other.terms {
                let anti = ((xa & zb).count_ones() + (za & xb).count_ones()) % 2 == 1;
                if anti != commutator {
                    continue;
                }
                let (x, z, k) = mul_masks(xa, za, xb, zb);
                out.accumulate(x, z, 2.0 * ca * cb * i_pow(k));
            }
        }
        out.canonicalize();
        Ok(out)
    }

    pub fn dagger(&self) -> PauliSum {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = v.conj();
        }
        out
    }

    /// `2^n` times the identity coefficient.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(0, 0) * 2f64.powi(self.n as i32)
    }

    /// Frobenius norm of the operator, `sqrt(2^n Σ|c|²)`.
    pub fn frobenius_norm(&self) -> f64 {
        let s = self.terms.values().fold(0.0, |acc, c| acc + c.norm_sqr());
        (s * 2f64.powi(self.n as i32)).sqrt()
    }

    /// Largest coefficient magnitude; zero for the empty sum.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance `‖a - b‖_F`.
    pub fn distance(&self, other: &PauliSum) -> Result<f64> {
        Ok(self.checked_sub(other)?.frobenius_norm())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    /// Integer power by repeated multiplication.
    pub fn powi(&self, k: u32) -> PauliSum {
        let mut out = PauliSum::from_term(PauliTerm { n: self.n, x: 0, z: 0, phase: 0 });
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Ordered product `factors[0] · factors[1] · …`.
    pub fn product<'a, It>(n: usize, factors: It) -> Result<PauliSum>
    where
        It: IntoIterator<Item = &'a PauliSum>,
    {
        let mut out = PauliSum::identity(n)?;
        for f in factors {
            out = out.checked_mul(f)?;
        }
        Ok(out)
    }

    /// Dense `2^n × 2^n` matrix, little-endian in the site index.
    pub fn to_dense(&self) -> Result<DenseOperator> {
        let max = max_dense_qubits();
        if self.n > max {
            return Err(Error::TooManyQubits { n: self.n, max });
        }
        let dim = 1usize << self.n;
        let mut m = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        for (&(x, z), &c) in &self.terms {
            let base = c * i_pow((x & z).count_ones() as i64);
            for col in 0..dim {
                let sign = if (z & col as u64).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                m[(col ^ x as usize, col)] += base * sign;
            }
        }
        DenseOperator::from_matrix(m)
    }

    /// Pauli decomposition `c(x, z) = tr(σ(x, z) M) / 2^n` of a dense operator.
    pub fn from_dense(op: &DenseOperator) -> Result<PauliSum> {
        let n = op.n_qubits();
        let dim = op.dim();
        let mut out = PauliSum::zero(n)?;
        let m = op.matrix();
        for x in 0..dim {
            for z in 0..dim {
                let e = i_pow(-((x & z).count_ones() as i64));
                let mut acc = Complex64::default();
                for col in 0..dim {
                    let v = m[(col ^ x, col)];
                    if (z & col).count_ones() % 2 == 0 {
                        acc += v;
                    } else {
                        acc -= v;
                    }
                }
                let c = acc * e / dim as f64;
                if c.norm() > out.prune {
                    out.terms.insert((x as u64, z as u64), c);
                }
            }
        }
        Ok(out)
    }

    /// Applies the operator to a state vector of length `2^n`.
    pub fn apply(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.n >= usize::BITS as usize || state.len() != 1usize << self.n {
            return Err(Error::DimensionMismatch { left: 1usize << self.n.min(63), right: state.len() });
        }
        let mut out = vec![Complex64::default(); state.len()];
        for (&(x, z), &c) in &self.terms {
            let base = c * i_pow((x & z).count_ones() as i64);
            for (col, &amp) in state.iter().enumerate() {
                if amp == Complex64::default() {
                    continue;
                }
                let sign = if (z & col as u64).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                out[col ^ x as usize] += base * amp * sign;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PauliSum {
    /// Renders e.g. `(0.5+0i)·Z1 + (-0.5+0i)·X1X2`; the zero operator prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (t, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let re = if c.re == 0.0 { 0.0 } else { c.re };
            let im = if c.im == 0.0 { 0.0 } else { c.im };
            let sign = if im.is_sign_negative() { '-' } else { '+' };
            write!(f, "({re}{sign}{}i)·{}", im.abs(), t.label())?;
        }
        Ok(())
    }
}

impl From<PauliTerm> for PauliSum {
    fn from(t: PauliTerm) -> Self {
        PauliSum::from_term(t)
    }
}

// Operator sugar panics on mismatched qubit counts; use the `checked_*`
// methods where the sizes come from user input.

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        self.checked_add(rhs).expect("PauliSum + PauliSum")
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        self.checked_sub(rhs).expect("PauliSum - PauliSum")
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        self.checked_mul(rhs).expect("PauliSum * PauliSum")
    }
}

impl Mul<Complex64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: Complex64) -> PauliSum {
        self.scale(rhs)
    }
}

impl Mul<f64> for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: f64) -> PauliSum {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

/// The imaginary unit.
pub const IMAG: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense_pauli(p: Pauli) -> nalgebra::DMatrix<Complex64> {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let v = match p {
            Pauli::I => [one, z, z, one],
            Pauli::X => [z, one, one, z],
            Pauli::Y => [z, c(0.0, -1.0), c(0.0, 1.0), z],
            Pauli::Z => [one, z, z, -one],
        };
        nalgebra::DMatrix::from_row_slice(2, 2, &v)
    }

    /// Independent dense construction: kron with site n on the left (most significant).
    fn kron_oracle(t: &PauliTerm) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::from_element(1, 1, c(1.0, 0.0));
        for site in (1..=t.n_sites()).rev() {
            m = m.kronecker(&dense_pauli(t.pauli_at(site)));
        }
        m * t.phase()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let x = PauliTerm::single(1, 1, Pauli::X).unwrap();
        let z = PauliTerm::single(1, 1, Pauli::Z).unwrap();
        let p = x.mul(&z).unwrap();
        assert_eq!(p.label(), "Y1");
        assert_eq!(p.phase(), c(0.0, -1.0));
    }

    #[test]
    fn identity_is_neutral() {
        let id = PauliTerm::identity(3).unwrap();
        let p = PauliTerm::from_label(3, "X1Y2Z3").unwrap().with_phase(1);
        assert_eq!(id.mul(&p).unwrap(), p);
        assert_eq!(p.mul(&id).unwrap(), p);
        assert!(id.is_identity());
    }

    #[test]
    fn xx_times_zz_matches_dense() {
        let a = PauliTerm::from_label(2, "X1X2").unwrap();
        let b = PauliTerm::from_label(2, "Z1Z2").unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p.label(), "Y1Y2");
        assert_eq!(p.phase(), c(-1.0, 0.0));
        let dense = kron_oracle(&a) * kron_oracle(&b);
        assert_eq!(dense, kron_oracle(&p));
    }

    #[test]
    fn mismatched_sizes_are_rejected() {
        let a = PauliTerm::identity(2).unwrap();
        let b = PauliTerm::identity(3).unwrap();
        assert!(matches!(a.mul(&b), Err(Error::DimensionMismatch { .. })));
        let sa = PauliSum::identity(2).unwrap();
        let sb = PauliSum::identity(3).unwrap();
        assert!(sa.checked_mul(&sb).is_err());
        assert!(sa.commutator(&sb).is_err());
        assert!(PauliSum::zero(65).is_err());
        assert!(PauliTerm::from_masks(2, 0b100, 0, 0).is_err());
    }

    #[test]
    fn projectors_are_orthogonal() {
        let n = 3;
        let id = PauliSum::identity(n).unwrap();
        let p = PauliSum::from_label(n, "Z1Z2Z3", c(1.0, 0.0)).unwrap();
        let even = &(&id + &p) * 0.5;
        let odd = &(&id - &p) * 0.5;
        assert!((&even * &odd).is_empty());
        assert_eq!(&even * &id, even);
    }

    #[test]
    fn rational_gate_product() {
        let omega = 0.3;
        let id = PauliSum::identity(2).unwrap();
        let z = PauliSum::from_label(2, "Z1", c(0.0, omega)).unwrap();
        let prod = &(&id + &z) * &(&id - &z);
        let expected = &id * (1.0 + omega * omega);
        assert!(prod.distance(&expected).unwrap() < 1e-15);
        let dense = (&id + &z).to_dense().unwrap() * (&id - &z).to_dense().unwrap();
        assert!((dense - expected.to_dense().unwrap()).frobenius_norm() < 1e-14);
    }

    #[test]
    fn commuting_z_sites() {
        let a = PauliSum::from_label(2, "Z1", c(1.0, 0.0)).unwrap();
        let b = PauliSum::from_label(2, "Z2", c(1.0, 0.0)).unwrap();
        assert!(a.commutator(&b).unwrap().is_empty());
    }

    #[test]
    fn dagger_and_trace() {
        let a = PauliSum::from_label(1, "X1", c(0.0, 1.0)).unwrap();
        assert_eq!(a.dagger(), PauliSum::from_label(1, "X1", c(0.0, -1.0)).unwrap());
        assert_eq!(PauliSum::identity(3).unwrap().trace(), c(8.0, 0.0));
        assert_eq!(PauliSum::from_label(2, "X1X2", c(1.0, 0.0)).unwrap().trace(), c(0.0, 0.0));
    }

    #[test]
    fn dense_conventions() {
        let z = PauliSum::from_label(1, "Z1", c(1.0, 0.0)).unwrap().to_dense().unwrap();
        assert_eq!(z.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(z.matrix()[(1, 1)], c(-1.0, 0.0));
        let xx = PauliSum::from_label(2, "X1X2", c(1.0, 0.0)).unwrap().to_dense().unwrap();
        for r in 0..4 {
            for col in 0..4 {
                let want = if r + col == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx.matrix()[(r, col)], c(want, 0.0));
            }
        }
        // site 1 is the least significant bit
        let x1 = PauliSum::from_label(2, "X1", c(1.0, 0.0)).unwrap().to_dense().unwrap();
        assert_eq!(x1.matrix()[(1, 0)], c(1.0, 0.0));
    }

    #[test]
    fn display_format() {
        let s = &PauliSum::from_label(2, "Z1", c(0.5, 0.0)).unwrap()
            + &PauliSum::from_label(2, "X1X2", c(-0.5, 0.0)).unwrap();
        assert_eq!(s.to_string(), "(0.5+0i)·Z1 + (-0.5+0i)·X1X2");
        assert_eq!(PauliSum::zero(2).unwrap().to_string(), "0");
    }

    #[test]
    fn apply_matches_dense() {
        let s = &PauliSum::from_label(2, "Y1Z2", c(0.3, 0.1)).unwrap()
            + &PauliSum::from_label(2, "X2", c(1.0, 0.0)).unwrap();
        let state: Vec<Complex64> = (0..4).map(|k| c(k as f64, 1.0 - k as f64)).collect();
        let out = s.apply(&state).unwrap();
        let dense = s.to_dense().unwrap();
        let v = nalgebra::DVector::from_vec(state);
        let want = dense.matrix() * v;
        for k in 0..4 {
            assert!((out[k] - want[k]).norm() < 1e-14);
        }
    }

    #[test]
    fn prune_threshold_is_configurable() {
        let s = PauliSum::from_label(1, "X1", c(1e-12, 0.0)).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.with_prune(1e-10).is_empty());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn term(n: usize) -> impl Strategy<Value = PauliTerm> {
            let m = (1u64 << n) - 1;
            (0..=m, 0..=m, 0u8..4).prop_map(move |(x, z, p)| PauliTerm::from_masks(n, x, z, p).unwrap())
        }

        fn sum(n: usize) -> impl Strategy<Value = PauliSum> {
            proptest::collection::vec((term(n), -1.0..1.0f64, -1.0..1.0f64), 1..6).prop_map(move |v| {
                PauliSum::from_terms(n, v.into_iter().map(|(t, re, im)| (t, Complex64::new(re, im))))
                    .unwrap()
            })
        }

        proptest! {
            #[test]
            fn term_product_is_exact_against_kron(a in term(3), b in term(3)) {
                let p = a.mul(&b).unwrap();
                prop_assert_eq!(kron_oracle(&a) * kron_oracle(&b), kron_oracle(&p));
            }

            #[test]
            fn sum_mul_associative_and_distributive(a in sum(3), b in sum(3), c in sum(3)) {
                let l = &(&a * &b) * &c;
                let r = &a * &(&b * &c);
                prop_assert!(l.distance(&r).unwrap() < 1e-12);
                let d = &a * &(&b + &c);
                let e = &(&a * &b) + &(&a * &c);
                prop_assert!(d.distance(&e).unwrap() < 1e-12);
            }

            #[test]
            fn frobenius_positivity(a in sum(3)) {
                let t = (&a * &a.dagger()).trace();
                prop_assert!(t.re >= 0.0 && t.im.abs() < 1e-12);
            }

            #[test]
            fn dense_round_trip(a in sum(3)) {
                let back = PauliSum::from_dense(&a.to_dense().unwrap()).unwrap();
                prop_assert!(back.distance(&a).unwrap() < 1e-12);
            }

            #[test]
            fn sum_mul_matches_dense(a in sum(3), b in sum(3)) {
                let sparse = (&a * &b).to_dense().unwrap();
                let dense = a.to_dense().unwrap() * b.to_dense().unwrap();
                prop_assert!((sparse - dense).frobenius_norm() < 1e-12);
            }
        }
    }
}
