//! Majorana R-operator, monodromy and transfer matrices.
//!
//! Everything lives on `N + 1` qubits: the physical sites `1..=N` plus one
//! auxiliary qubit at the most significant position (site `N + 1`). The two
//! auxiliary Majoranas are `γ_a = X_aux`, `γ_b = Y_aux`, and the physical ones
//! are dressed as `Φ(γ_j) = −Z_aux Γ_j` so the whole set anticommutes.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fermion::Majoranas;
use crate::linalg::{fit_scalar, relative_residual, DenseOperator};
use crate::pauli::{PauliSum, PauliTerm};
use crate::report::CheckReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeLabel {
    AuxA,
    AuxB,
    /// Physical Majorana `γ_j`, `1 ≤ j ≤ 2N`.
    Phys(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aux {
    A,
    B,
}

impl Aux {
    pub fn label(self) -> ModeLabel {
        match self {
            Aux::A => ModeLabel::AuxA,
            Aux::B => ModeLabel::AuxB,
        }
    }
}

/// Majorana modes `{a, b, 1..2N}` on `N + 1` qubits, sparse and dense.
#[derive(Clone, Debug)]
pub struct ModeRep {
    n: usize,
    sparse: Vec<PauliSum>,
    dense: Vec<DenseOperator>,
}

impl ModeRep {
    pub fn new(n: usize) -> Result<Self> {
        Self::from_majoranas(&Majoranas::new(n)?)
    }

    /// Dresses an arbitrary set of physical Majoranas (possibly defective).
    pub fn from_majoranas(m: &Majoranas) -> Result<Self> {
        let n = m.n_sites();
        let q = n + 1;
        let aux = 1u64 << n;
        let mut sparse = vec![
            PauliSum::from_term(PauliTerm::from_masks(q, aux, 0, 0)?),
            PauliSum::from_term(PauliTerm::from_masks(q, aux, aux, 0)?),
        ];
        let z_aux = PauliSum::from_term(PauliTerm::from_masks(q, 0, aux, 0)?);
        for g in m.iter() {
            let lifted = PauliSum::from_terms(
                q,
                g.iter().map(|(t, c)| {
                    (PauliTerm::from_masks(q, t.x_mask(), t.z_mask(), 0).expect("fits"), c)
                }),
            )?;
            sparse.push(-&(&z_aux * &lifted));
        }
        let dense = sparse.iter().map(|s| s.to_dense()).collect::<Result<_>>()?;
        Ok(ModeRep { n, sparse, dense })
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    fn slot(&self, label: ModeLabel) -> Result<usize> {
        match label {
            ModeLabel::AuxA => Ok(0),
            ModeLabel::AuxB => Ok(1),
            ModeLabel::Phys(j) if j >= 1 && j <= 2 * self.n => Ok(j + 1),
            ModeLabel::Phys(j) => Err(Error::IndexOutOfRange { index: j, max: 2 * self.n }),
        }
    }

    pub fn sparse(&self, label: ModeLabel) -> Result<&PauliSum> {
        Ok(&self.sparse[self.slot(label)?])
    }

    pub fn dense(&self, label: ModeLabel) -> Result<&DenseOperator> {
        Ok(&self.dense[self.slot(label)?])
    }

    pub fn labels(&self) -> Vec<ModeLabel> {
        let mut v = vec![ModeLabel::AuxA, ModeLabel::AuxB];
        v.extend((1..=2 * self.n).map(ModeLabel::Phys));
        v
    }

    /// Largest deviation from `{φ_u, φ_v} = 2δ_uv` over all labels.
    pub fn anticommutation_residual(&self) -> f64 {
        let id = PauliSum::identity(self.n + 1).expect("valid size").scale(2.0.into());
        let mut worst: f64 = 0.0;
        for (u, a) in self.sparse.iter().enumerate() {
            for (v, b) in self.sparse.iter().enumerate() {
                let ac = a.anticommutator(b).expect("same size");
                let dev = if u == v { &ac - &id } else { ac };
                worst = worst.max(dev.max_abs_coefficient());
            }
        }
        worst
    }
}

/// Spectral-parameter shifts `η_1 … η_{2N}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Inhomogeneity {
    values: Vec<f64>,
}

impl Inhomogeneity {
    pub fn new(values: Vec<f64>, n: usize) -> Result<Self> {
        if values.len() != 2 * n {
            return Err(Error::DimensionMismatch { left: values.len(), right: 2 * n });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("inhomogeneity"));
        }
        Ok(Inhomogeneity { values })
    }

    pub fn homogeneous(n: usize) -> Self {
        Inhomogeneity { values: vec![0.0; 2 * n] }
    }

    /// `η_j = (−1)^j ω/2`.
    pub fn staggered(omega: f64, n: usize) -> Self {
        let values = (1..=2 * n).map(|j| if j % 2 == 0 { omega / 2.0 } else { -omega / 2.0 }).collect();
        Inhomogeneity { values }
    }

    /// Uniform in `[−scale, scale]`.
    pub fn random<R: Rng>(n: usize, scale: f64, rng: &mut R) -> Self {
        Inhomogeneity { values: (0..2 * n).map(|_| rng.gen_range(-scale..=scale)).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `η_j`, 1-based.
    pub fn get(&self, j: usize) -> f64 {
        self.values[j - 1]
    }
}

fn r_from_dense(gu: &DenseOperator, gv: &DenseOperator, lambda: f64) -> Result<DenseOperator> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("spectral parameter"));
    }
    let t = lambda.tanh();
    let perm = gu.mat_sub(gv)?.scale_re(1.0 / SQRT_2);
    let id = DenseOperator::identity(gu.n_qubits())?;
    let braid = id.mat_add(&gu.mat_mul(gv)?.scale_re(t))?;
    Ok(perm.mat_mul(&braid)?.scale(Complex64::new(1.0, t).inv()))
}

/// `R_uv(λ) = (γ_u − γ_v)/√2 · (𝟙 + tanh λ γ_u γ_v)/(1 + i tanh λ)`.
pub fn r_operator(u: ModeLabel, v: ModeLabel, lambda: f64, rep: &ModeRep) -> Result<DenseOperator> {
    if u == v {
        return Err(Error::InvalidParameter(format!("R-operator needs distinct modes, got {u:?} twice")));
    }
    r_from_dense(rep.dense(u)?, rep.dense(v)?, lambda)
}

/// `Ř_uv(λ) = P⁻ R_uv(λ) = (𝟙 + tanh λ γ_u γ_v)/(1 + i tanh λ)`.
pub fn r_check_operator(u: ModeLabel, v: ModeLabel, lambda: f64, rep: &ModeRep) -> Result<DenseOperator> {
    let perm = rep.dense(u)?.mat_sub(rep.dense(v)?)?.scale_re(1.0 / SQRT_2);
    perm.mat_mul(&r_operator(u, v, lambda, rep)?)
}

/// `R12(λ−μ) R13(λ) R23(μ) = R23(μ) R13(λ) R12(λ−μ)` on the modes `(a, 1, 2)`.
pub fn ybe_check(lambda: f64, mu: f64, rep: &ModeRep) -> CheckReport {
    let (m1, m2, m3) = (ModeLabel::AuxA, ModeLabel::Phys(1), ModeLabel::Phys(2));
    crate::report::check("ybe.three_modes", "R12(λ−μ) R13(λ) R23(μ) = R23(μ) R13(λ) R12(λ−μ)", 1e-12, || {
        let r12 = r_operator(m1, m2, lambda - mu, rep)?;
        let r13 = r_operator(m1, m3, lambda, rep)?;
        let r23 = r_operator(m2, m3, mu, rep)?;
        let lhs = r12.mat_mul(&r13)?.mat_mul(&r23)?;
        let rhs = r23.mat_mul(&r13)?.mat_mul(&r12)?;
        Ok(relative_residual(&lhs, &rhs))
    })
    .param("lambda", lambda)
    .param("mu", mu)
}

/// `T_aux(λ) = R_{aux,2N}(λ−η_{2N}) ⋯ R_{aux,1}(λ−η_1)`.
pub fn monodromy(aux: Aux, lambda: f64, eta: &Inhomogeneity, rep: &ModeRep) -> Result<DenseOperator> {
    let n = rep.n_sites();
    if eta.len() != 2 * n {
        return Err(Error::DimensionMismatch { left: eta.len(), right: 2 * n });
    }
    let ga = rep.dense(aux.label())?;
    let mut t = DenseOperator::identity(n + 1)?;
    for j in (1..=2 * n).rev() {
        let r = r_from_dense(ga, rep.dense(ModeLabel::Phys(j))?, lambda - eta.get(j))?;
        t = t.mat_mul(&r)?;
    }
    Ok(t)
}

/// `τ(λ|η) = tr_aux T_a(λ)`.
pub fn transfer(lambda: f64, eta: &Inhomogeneity, rep: &ModeRep) -> Result<DenseOperator> {
    monodromy(Aux::A, lambda, eta, rep)?.partial_trace_aux()
}

/// Same trace taken with the `b` auxiliary mode; equals [`transfer`].
pub fn transfer_b(lambda: f64, eta: &Inhomogeneity, rep: &ModeRep) -> Result<DenseOperator> {
    monodromy(Aux::B, lambda, eta, rep)?.partial_trace_aux()
}

/// `R_ab(λ−μ) T_a(λ) T_b(μ) = T_b(μ) T_a(λ) R_ab(λ−μ)`.
pub fn rtt_check(lambda: f64, mu: f64, eta: &Inhomogeneity, rep: &ModeRep) -> CheckReport {
    crate::report::check("rtt.exchange", "R_ab(λ−μ) T_a(λ) T_b(μ) = T_b(μ) T_a(λ) R_ab(λ−μ)", 1e-10, || {
        let ta = monodromy(Aux::A, lambda, eta, rep)?;
        let tb = monodromy(Aux::B, mu, eta, rep)?;
        let rab = r_operator(ModeLabel::AuxA, ModeLabel::AuxB, lambda - mu, rep)?;
        let lhs = rab.mat_mul(&ta)?.mat_mul(&tb)?;
        let rhs = tb.mat_mul(&ta)?.mat_mul(&rab)?;
        Ok(relative_residual(&lhs, &rhs))
    })
    .param("lambda", lambda)
    .param("mu", mu)
    .param("N", rep.n_sites() as f64)
}

/// `[τ(λ|η), τ(μ|η)] = 0`, relative to `‖τ(λ)τ(μ)‖`.
pub fn transfer_commute_check(lambda: f64, mu: f64, eta: &Inhomogeneity, rep: &ModeRep) -> CheckReport {
    crate::report::check("transfer.commute", "[τ(λ|η), τ(μ|η)] = 0", 1e-10, || {
        let a = transfer(lambda, eta, rep)?;
        let b = transfer(mu, eta, rep)?;
        Ok(relative_residual(&a.mat_mul(&b)?, &b.mat_mul(&a)?))
    })
    .param("lambda", lambda)
    .param("mu", mu)
    .param("N", rep.n_sites() as f64)
}

/// The monodromy is even in the Majoranas, so only the `𝟙` and `Y` auxiliary
/// components survive, and twice the `𝟙` component is `τ`. Returns the largest
/// relative deviation from that structure.
pub fn monodromy_expansion_residual(lambda: f64, eta: &Inhomogeneity, rep: &ModeRep) -> Result<f64> {
    let t = monodromy(Aux::A, lambda, eta, rep)?;
    let scale = t.frobenius_norm().max(1e-30);
    let [ci, cx, _, cz] = t.aux_components()?;
    let tau = t.partial_trace_aux()?;
    Ok((cx.frobenius_norm() / scale)
        .max(cz.frobenius_norm() / scale)
        .max(relative_residual(&ci.scale_re(2.0), &tau)))
}

/// The scalar `c` with `τ(0|0) = c·U`, where `U` is the twisted translation.
///
/// The trace over the two-dimensional auxiliary space produces
/// `c = (−1)^{N+1} √2`. Anything else, or a non-proportional pair, is an error.
pub fn calibrate_trace_convention(n: usize) -> Result<Complex64> {
    let rep = ModeRep::new(n)?;
    let tau = transfer(0.0, &Inhomogeneity::homogeneous(n), &rep)?;
    let u = crate::duality::twisted_translation(n)?.to_dense()?;
    let (c, residual) = fit_scalar(&tau, &u);
    if residual > 1e-12 {
        return Err(Error::Convention(format!("τ(0|0) not proportional to U (residual {residual:.3e})")));
    }
    let expected = expected_calibration(n);
    if (c - expected).norm() > 1e-12 {
        return Err(Error::Convention(format!("calibration scalar {c} differs from {expected}")));
    }
    Ok(c)
}

/// `(−1)^{N+1} √2`.
pub fn expected_calibration(n: usize) -> Complex64 {
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    Complex64::new(sign * SQRT_2, 0.0)
}

/// Unitarity residual of `Ř(λ)`.
pub fn r_check_unitarity(lambda: f64, rep: &ModeRep) -> CheckReport {
    let start = Instant::now();
    let res = r_check_operator(ModeLabel::AuxA, ModeLabel::Phys(1), lambda, rep)
        .map(|r| crate::linalg::unitarity_residual(&r));
    match res {
        Ok(r) => CheckReport::new("r.check_unitary", "Ř(λ)†Ř(λ) = 𝟙", r, 1e-12),
        Err(e) => CheckReport::failed("r.check_unitary", "Ř(λ)†Ř(λ) = 𝟙", 1e-12, e.to_string()),
    }
    .param("lambda", lambda)
    .elapsed(start)
}

/// `Φ(γ_u)Φ(γ_v)` on the sparse side, handy for building closed forms.
pub fn mode_bilinear(rep: &ModeRep, u: ModeLabel, v: ModeLabel) -> Result<PauliSum> {
    rep.sparse(u)?.checked_mul(rep.sparse(v)?)
}
