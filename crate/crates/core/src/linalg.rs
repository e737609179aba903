//! Dense complex operators on `n` qubits.
//!
//! Used wherever the sparse Pauli representation is not enough: inverses,
//! matrix exponentials and logarithms, partial traces over the auxiliary
//! qubit, and finite differences in the spectral parameter. Backed by
//! `nalgebra`; the qubit ordering is the same little-endian convention as
//! [`crate::pauli`].

use std::ops::{Add, Mul, Sub};

use nalgebra::linalg::Schur;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default upper bound on the condition number accepted by [`DenseOperator::inverse`].
pub const DEFAULT_MAX_CONDITION: f64 = 1e10;

/// Eigenvector condition bound for [`DenseOperator::log`].
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e8;

const DEFAULT_MAX_QUBITS: usize = 12;

/// Dense size cap, overridable through `ISING_LAB_MAX_QUBITS`.
pub fn max_dense_qubits() -> usize {
    std::env::var("ISING_LAB_MAX_QUBITS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n: usize,
    m: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if m.ncols() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: m.ncols() });
        }
        if !dim.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} is not a power of two"
            )));
        }
        Ok(DenseOperator { n: dim.trailing_zeros() as usize, m })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        let dim = 1usize << n;
        Ok(DenseOperator { n, m: DMatrix::identity(dim, dim) })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::check_size(n)?;
        let dim = 1usize << n;
        Ok(DenseOperator { n, m: DMatrix::zeros(dim, dim) })
    }

    fn check_size(n: usize) -> Result<()> {
        let max = max_dense_qubits();
        if n > max {
            return Err(Error::TooManyQubits { n, max });
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    fn same_dims(&self, other: &DenseOperator) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        Ok(())
    }

    pub fn mat_mul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.same_dims(other)?;
        Ok(DenseOperator { n: self.n, m: &self.m * &other.m })
    }

    pub fn mat_add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.same_dims(other)?;
        Ok(DenseOperator { n: self.n, m: &self.m + &other.m })
    }

    pub fn mat_sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.same_dims(other)?;
        Ok(DenseOperator { n: self.n, m: &self.m - &other.m })
    }

    pub fn scale(&self, c: Complex64) -> DenseOperator {
        DenseOperator { n: self.n, m: &self.m * c }
    }

    pub fn scale_re(&self, c: f64) -> DenseOperator {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator { n: self.n, m: self.m.adjoint() }
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    fn singular_values(&self) -> Vec<f64> {
        self.m.clone().svd(false, false).singular_values.iter().copied().collect()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.singular_values().into_iter().fold(0.0, f64::max)
    }

    /// Ratio of extreme singular values; infinite for singular matrices.
    pub fn condition_number(&self) -> f64 {
        let s = self.singular_values();
        let max = s.iter().copied().fold(0.0, f64::max);
        let min = s.iter().copied().fold(f64::INFINITY, f64::min);
        if min == 0.0 {
            f64::INFINITY
        } else {
            max / min
        }
    }

    /// Number of singular values above `tol` times the largest one.
    pub fn numerical_rank(&self, tol: f64) -> usize {
        let s = self.singular_values();
        let max = s.iter().copied().fold(0.0, f64::max);
        s.iter().filter(|&&v| v > tol * max.max(1e-300)).count()
    }

    pub fn commutator(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.same_dims(other)?;
        Ok(DenseOperator { n: self.n, m: &self.m * &other.m - &other.m * &self.m })
    }

    pub fn powi(&self, k: u32) -> DenseOperator {
        let mut out = DenseOperator { n: self.n, m: DMatrix::identity(self.dim(), self.dim()) };
        for _ in 0..k {
            out.m = &out.m * &self.m;
        }
        out
    }

    /// `self ⊗ other`, with `self` on the most significant qubits.
    pub fn kron(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator { n: self.n + other.n, m: self.m.kronecker(&other.m) }
    }

    /// Inverse with the default condition bound.
    pub fn inverse(&self) -> Result<DenseOperator> {
        self.inverse_with_bound(DEFAULT_MAX_CONDITION)
    }

    pub fn inverse_with_bound(&self, max_condition: f64) -> Result<DenseOperator> {
        if !self.is_finite() {
            return Err(Error::NonFinite("matrix inverse input"));
        }
        let condition = self.condition_number();
        if !(condition <= max_condition) {
            return Err(Error::IllConditioned { condition });
        }
        let inv = self.m.clone().try_inverse().ok_or(Error::IllConditioned { condition })?;
        Ok(DenseOperator { n: self.n, m: inv })
    }

    /// Matrix exponential (Padé scaling and squaring).
    pub fn exp(&self) -> Result<DenseOperator> {
        if !self.is_finite() {
            return Err(Error::NonFinite("matrix exponential input"));
        }
        let out = DenseOperator { n: self.n, m: self.m.exp() };
        if !out.is_finite() {
            return Err(Error::NonFinite("matrix exponential output"));
        }
        Ok(out)
    }

    /// Principal matrix logarithm through an eigendecomposition.
    ///
    /// The eigenbasis comes from the complex Schur form `A = Q T Q†` and the
    /// eigenvectors of the triangular factor. Eigenvalues on the closed
    /// negative real axis are rejected, as are eigenvector bases with
    /// condition number above [`MAX_EIGENVECTOR_CONDITION`].
    pub fn log(&self) -> Result<DenseOperator> {
        if !self.is_finite() {
            return Err(Error::NonFinite("matrix logarithm input"));
        }
        let dim = self.dim();
        let schur = Schur::try_new(self.m.clone(), 1e-15, 10_000)
            .ok_or_else(|| Error::NotDiagonalizable("Schur iteration did not converge".into()))?;
        let (q, t) = schur.unpack();
        let scale = t.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);

        let eig: Vec<Complex64> = (0..dim).map(|k| t[(k, k)]).collect();
        let offending: Vec<Complex64> = eig
            .iter()
            .copied()
            .filter(|l| l.norm() <= 1e-13 * scale || (l.re < 0.0 && l.im.abs() <= 1e-12 * l.norm()))
            .collect();
        if !offending.is_empty() {
            return Err(Error::BranchCut { eigenvalues: offending });
        }

        // eigenvectors of the upper-triangular factor by back substitution
        let mut v = DMatrix::<Complex64>::identity(dim, dim);
        for k in 0..dim {
            for i in (0..k).rev() {
                let mut num = Complex64::default();
                for j in (i + 1)..=k {
                    num += t[(i, j)] * v[(j, k)];
                }
                let gap = t[(i, i)] - t[(k, k)];
                if gap.norm() <= 1e-10 * scale {
                    if num.norm() > 1e-9 * scale {
                        return Err(Error::NotDiagonalizable(format!(
                            "coupled degenerate eigenvalues near {}",
                            t[(k, k)]
                        )));
                    }
                    v[(i, k)] = Complex64::default();
                } else {
                    v[(i, k)] = -num / gap;
                }
            }
            let norm = v.column(k).norm();
            v.column_mut(k).unscale_mut(norm);
        }
        let s = DenseOperator { n: self.n, m: &q * v };
        let condition = s.condition_number();
        if condition > MAX_EIGENVECTOR_CONDITION {
            return Err(Error::NotDiagonalizable(format!(
                "eigenvector condition number {condition:.3e}"
            )));
        }
        let s_inv = s.inverse_with_bound(MAX_EIGENVECTOR_CONDITION)?;
        let logs = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            eig.iter().map(|l| l.ln()),
        ));
        Ok(DenseOperator { n: self.n, m: &s.m * logs * &s_inv.m })
    }

    /// Partial trace over the most significant qubit (the auxiliary space).
    pub fn partial_trace_aux(&self) -> Result<DenseOperator> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("no auxiliary qubit to trace out".into()));
        }
        let half = self.dim() / 2;
        let m = self.m.view((0, 0), (half, half)) + self.m.view((half, half), (half, half));
        Ok(DenseOperator { n: self.n - 1, m })
    }

    /// Splits an operator on `aux ⊗ rest` into its Pauli components on the
    /// auxiliary qubit: returns `[B_I, B_X, B_Y, B_Z]` with
    /// `A = Σ_μ σ_μ ⊗ B_μ`.
    pub fn aux_components(&self) -> Result<[DenseOperator; 4]> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("no auxiliary qubit".into()));
        }
        let h = self.dim() / 2;
        let b = |r: usize, c: usize| self.m.view((r * h, c * h), (h, h)).into_owned();
        let (b00, b01, b10, b11) = (b(0, 0), b(0, 1), b(1, 0), b(1, 1));
        let half = Complex64::new(0.5, 0.0);
        let ihalf = Complex64::new(0.0, 0.5);
        let n = self.n - 1;
        Ok([
            DenseOperator { n, m: (&b00 + &b11) * half },
            DenseOperator { n, m: (&b01 + &b10) * half },
            DenseOperator { n, m: (&b01 - &b10) * ihalf },
            DenseOperator { n, m: (&b00 - &b11) * half },
        ])
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        unitarity_residual(self) <= tol
    }
}

/// `‖U†U − 1‖_F`.
pub fn unitarity_residual(u: &DenseOperator) -> f64 {
    let id = DMatrix::<Complex64>::identity(u.dim(), u.dim());
    let d = u.m.adjoint() * &u.m - id;
    d.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Relative Frobenius residual `‖a − b‖ / max(‖a‖, ‖b‖, 1e-30)`.
pub fn relative_residual(a: &DenseOperator, b: &DenseOperator) -> f64 {
    let diff = (&a.m - &b.m).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    diff / a.frobenius_norm().max(b.frobenius_norm()).max(1e-30)
}

/// Least-squares scalar `s` minimising `‖a − s b‖_F`, and the relative residual at `s`.
pub fn fit_scalar(a: &DenseOperator, b: &DenseOperator) -> (Complex64, f64) {
    let num: Complex64 = b.m.iter().zip(a.m.iter()).map(|(x, y)| x.conj() * y).sum();
    let den: f64 = b.m.iter().map(|x| x.norm_sqr()).sum();
    if den == 0.0 {
        return (Complex64::default(), if a.frobenius_norm() == 0.0 { 0.0 } else { 1.0 });
    }
    let s = num / den;
    let res = (&a.m - &b.m * s).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
        / a.frobenius_norm().max(1e-30);
    (s, res)
}

/// `A − tr(A)/d · 1`.
pub fn traceless_part(a: &DenseOperator) -> DenseOperator {
    let d = a.dim() as f64;
    let t = a.trace() / d;
    let mut m = a.m.clone();
    for k in 0..a.dim() {
        m[(k, k)] -= t;
    }
    DenseOperator { n: a.n, m }
}

/// Ordered product `ops[0] · ops[1] · …`.
pub fn product<'a, It>(n: usize, ops: It) -> Result<DenseOperator>
where
    It: IntoIterator<Item = &'a DenseOperator>,
{
    let mut out = DenseOperator::identity(n)?;
    for op in ops {
        out = out.mat_mul(op)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct FdOptions {
    pub step: f64,
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { step: 1e-4, richardson: true }
    }
}

#[derive(Clone, Debug)]
pub struct FdEstimate {
    pub value: DenseOperator,
    /// Frobenius size of the last refinement; a proxy for the truncation error.
    pub error_estimate: f64,
}

fn central_difference<F>(f: &mut F, x0: f64, order: u32, h: f64, f0: &DenseOperator) -> Result<DenseOperator>
where
    F: FnMut(f64) -> Result<DenseOperator>,
{
    let fp = f(x0 + h)?;
    let fm = f(x0 - h)?;
    if !fp.is_finite() || !fm.is_finite() {
        return Err(Error::NonFinite("finite-difference sample"));
    }
    Ok(match order {
        1 => fp.mat_sub(&fm)?.scale_re(1.0 / (2.0 * h)),
        _ => fp.mat_add(&fm)?.mat_sub(&f0.scale_re(2.0))?.scale_re(1.0 / (h * h)),
    })
}

/// Central finite-difference derivative of order 1 or 2 at `x0`.
///
/// With `richardson` set, the step is halved once and the two estimates are
/// combined as `(4 D(h/2) − D(h)) / 3`.
pub fn fd_derivative<F>(mut f: F, x0: f64, order: u32, opts: FdOptions) -> Result<FdEstimate>
where
    F: FnMut(f64) -> Result<DenseOperator>,
{
    if !(order == 1 || order == 2) {
        return Err(Error::InvalidParameter(format!("derivative order {order} not in {{1, 2}}")));
    }
    if !(1e-6..=1e-2).contains(&opts.step) {
        return Err(Error::InvalidParameter(format!("step {} outside [1e-6, 1e-2]", opts.step)));
    }
    let f0 = f(x0)?;
    if !f0.is_finite() {
        return Err(Error::NonFinite("finite-difference sample"));
    }
    let coarse = central_difference(&mut f, x0, order, opts.step, &f0)?;
    let fine = central_difference(&mut f, x0, order, opts.step / 2.0, &f0)?;
    let correction = fine.mat_sub(&coarse)?.scale_re(1.0 / 3.0);
    let error_estimate = correction.frobenius_norm();
    let value = if opts.richardson { fine.mat_add(&correction)? } else { fine };
    Ok(FdEstimate { value, error_estimate })
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.mat_mul(rhs).expect("DenseOperator * DenseOperator")
    }
}

impl Mul for DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: DenseOperator) -> DenseOperator {
        &self * &rhs
    }
}

impl Add for &DenseOperator {
    type Output = DenseOperator;
    fn add(self, rhs: &DenseOperator) -> DenseOperator {
        self.mat_add(rhs).expect("DenseOperator + DenseOperator")
    }
}

impl Sub for &DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: &DenseOperator) -> DenseOperator {
        self.mat_sub(rhs).expect("DenseOperator - DenseOperator")
    }
}

impl Sub for DenseOperator {
    type Output = DenseOperator;
    fn sub(self, rhs: DenseOperator) -> DenseOperator {
        &self - &rhs
    }
}

impl Mul<Complex64> for &DenseOperator {
    type Output = DenseOperator;
    fn mul(self, rhs: Complex64) -> DenseOperator {
        self.scale(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliSum;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pauli(n: usize, label: &str, coeff: Complex64) -> DenseOperator {
        PauliSum::from_label(n, label, coeff).unwrap().to_dense().unwrap()
    }

    fn random_op(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DenseOperator {
        let dim = 1 << n;
        let m = DMatrix::from_fn(dim, dim, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale);
        DenseOperator::from_matrix(m).unwrap()
    }

    #[test]
    fn inverse_of_well_conditioned_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = &random_op(&mut rng, 3, 0.1) + &DenseOperator::identity(3).unwrap();
        let inv = a.inverse().unwrap();
        assert!(relative_residual(&(&a * &inv), &DenseOperator::identity(3).unwrap()) < 1e-12);
        let id = DenseOperator::identity(2).unwrap();
        assert_eq!(id.inverse().unwrap(), id);
    }

    #[test]
    fn singular_matrix_reports_condition() {
        let p = pauli(2, "I", c(0.5, 0.0)).mat_add(&pauli(2, "Z1", c(0.5, 0.0))).unwrap();
        match p.inverse() {
            Err(Error::IllConditioned { condition }) => assert!(condition > 1e10),
            other => panic!("expected ill-conditioned error, got {other:?}"),
        }
    }

    #[test]
    fn scale_by_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_op(&mut rng, 2, 1.0);
        assert_eq!(a.scale(c(0.0, 0.0)).frobenius_norm(), 0.0);
    }

    #[test]
    fn exp_and_log_basics() {
        let zero = DenseOperator::zeros(2).unwrap();
        assert!(relative_residual(&zero.exp().unwrap(), &DenseOperator::identity(2).unwrap()) < 1e-15);
        let id = DenseOperator::identity(2).unwrap();
        assert!(id.log().unwrap().frobenius_norm() < 1e-14);

        let rot = pauli(1, "X1", c(0.0, std::f64::consts::FRAC_PI_2)).exp().unwrap();
        assert!(relative_residual(&rot, &pauli(1, "X1", c(0.0, 1.0))) < 1e-14);

        let theta = 0.4;
        let gen = pauli(1, "Z1", c(0.0, theta));
        let l = gen.exp().unwrap().log().unwrap();
        assert!((&l - &gen).frobenius_norm() < 1e-13);
    }

    #[test]
    fn log_rejects_negative_real_eigenvalues() {
        let a = pauli(1, "Z1", c(1.0, 0.0));
        match a.log() {
            Err(Error::BranchCut { eigenvalues }) => {
                assert_eq!(eigenvalues.len(), 1);
                assert!((eigenvalues[0] + 1.0).norm() < 1e-12);
            }
            other => panic!("expected branch error, got {other:?}"),
        }
    }

    #[test]
    fn log_rejects_jordan_block() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let a = DenseOperator::from_matrix(m).unwrap();
        assert!(matches!(a.log(), Err(Error::NotDiagonalizable(_))));
    }

    #[test]
    fn log_inverts_exp_on_anti_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let r = random_op(&mut rng, 3, 1.0);
            let h = (&r + &r.adjoint()).scale_re(0.5);
            let rho = h.spectral_norm();
            let gen = h.scale(c(0.0, 2.5 / rho));
            let l = gen.exp().unwrap().log().unwrap();
            assert!(relative_residual(&l, &gen) < 1e-10);
        }
    }

    #[test]
    fn log_of_non_normal_diagonalizable() {
        let m = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let a = DenseOperator::from_matrix(m).unwrap();
        let back = a.log().unwrap().exp().unwrap();
        assert!(relative_residual(&back, &a) < 1e-12);
    }

    #[test]
    fn exp_unitarity_of_hermitian_generator() {
        let n = 3;
        let mut h = PauliSum::zero(n).unwrap();
        for j in 1..=n {
            h = &h - &PauliSum::from_label(n, &format!("Z{j}"), c(1.0, 0.0)).unwrap();
            let k = j % n + 1;
            h = &h - &PauliSum::from_label(n, &format!("X{j}X{k}"), c(1.0, 0.0)).unwrap();
        }
        let u = h.to_dense().unwrap().scale(c(0.0, -1.0)).exp().unwrap();
        assert!(unitarity_residual(&u) < 1e-10);
        let back = &u * &h.to_dense().unwrap().scale(c(0.0, 1.0)).exp().unwrap();
        assert!(relative_residual(&back, &DenseOperator::identity(n).unwrap()) < 1e-10);
    }

    #[test]
    fn partial_trace_cases() {
        let id = DenseOperator::identity(3).unwrap();
        let pt = id.partial_trace_aux().unwrap();
        assert!(relative_residual(&pt, &DenseOperator::identity(2).unwrap().scale_re(2.0)) < 1e-15);
        let q = pauli(2, "X1Y2", c(0.3, 0.2));
        for label in ["Z1", "X1", "Y1"] {
            let aux = pauli(1, label, c(1.0, 0.0));
            assert!(aux.kron(&q).partial_trace_aux().unwrap().frobenius_norm() < 1e-15);
        }
        assert!(DenseOperator::identity(0).unwrap().partial_trace_aux().is_err());
    }

    #[test]
    fn partial_trace_of_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_op(&mut rng, 1, 1.0);
            let b = random_op(&mut rng, 2, 1.0);
            let pt = a.kron(&b).partial_trace_aux().unwrap();
            let want = b.scale(a.trace());
            assert!((&pt - &want).frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn aux_components_reassemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_op(&mut rng, 3, 1.0);
        let parts = a.aux_components().unwrap();
        let mut sum = DenseOperator::zeros(3).unwrap();
        for (label, p) in ["I", "X1", "Y1", "Z1"].iter().zip(parts.iter()) {
            sum = &sum + &pauli(1, label, c(1.0, 0.0)).kron(p);
        }
        assert!(relative_residual(&sum, &a) < 1e-14);
    }

    #[test]
    fn dense_product_matches_sparse_product() {
        let a = &PauliSum::from_label(3, "X1Z3", c(0.4, 0.1)).unwrap()
            + &PauliSum::from_label(3, "Y2", c(-1.0, 0.0)).unwrap();
        let b = &PauliSum::from_label(3, "Z1Z2", c(0.2, -0.7)).unwrap()
            + &PauliSum::from_label(3, "I", c(1.0, 0.0)).unwrap();
        let sparse = (&a * &b).to_dense().unwrap();
        let dense = a.to_dense().unwrap().mat_mul(&b.to_dense().unwrap()).unwrap();
        assert!(relative_residual(&sparse, &dense) < 1e-14);
        assert!(a.to_dense().unwrap().mat_mul(&DenseOperator::identity(2).unwrap()).is_err());
    }

    #[test]
    fn fd_simple_functions() {
        let id = DenseOperator::identity(1).unwrap();
        let d = fd_derivative(|x| Ok(id.scale_re(x.exp())), 0.0, 1, FdOptions::default()).unwrap();
        assert!(relative_residual(&d.value, &id) < 1e-10);
        let d2 = fd_derivative(|x| Ok(id.scale_re(x * x)), 0.3, 2, FdOptions::default()).unwrap();
        assert!(relative_residual(&d2.value, &id.scale_re(2.0)) < 1e-6);
        assert!(fd_derivative(|x| Ok(id.scale_re(x)), 0.0, 3, FdOptions::default()).is_err());
        let bad = FdOptions { step: 0.5, richardson: false };
        assert!(fd_derivative(|x| Ok(id.scale_re(x)), 0.0, 1, bad).is_err());
        let nan = fd_derivative(|x| Ok(id.scale_re(1.0 / (x - 1e-4))), 0.0, 1, FdOptions::default());
        assert!(nan.is_err());
    }

    #[test]
    fn fd_converges_at_second_order() {
        let id = DenseOperator::identity(1).unwrap();
        let f = |x: f64| Ok(id.scale_re((2.0 * x).sin()));
        let exact = 2.0 * (0.2f64 * 2.0).cos();
        let err = |h: f64| {
            let d = fd_derivative(f, 0.2, 1, FdOptions { step: h, richardson: false }).unwrap();
            (d.value.matrix()[(0, 0)].re - exact).abs()
        };
        // without Richardson the estimate uses h/2, so compare h and h/2 runs
        let ratio = err(1e-2) / err(5e-3);
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rank_and_condition() {
        let p = pauli(2, "I", c(0.5, 0.0)).mat_add(&pauli(2, "Z1Z2", c(0.5, 0.0))).unwrap();
        assert_eq!(p.numerical_rank(1e-10), 2);
        assert!((DenseOperator::identity(2).unwrap().condition_number() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_fit() {
        let a = pauli(2, "X1", c(1.0, 0.0));
        let (s, r) = fit_scalar(&a.scale(c(0.0, 2.0)), &a);
        assert!((s - c(0.0, 2.0)).norm() < 1e-15 && r < 1e-15);
    }

    #[test]
    fn size_cap() {
        assert!(DenseOperator::identity(40).is_err());
        assert!(PauliSum::identity(20).unwrap().to_dense().is_err());
    }
}
