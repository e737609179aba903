//! Kramers–Wannier duality operators, translations, and their identities.
//!
//! The continuous operator is normalized as
//! `D = e^{−2πiN/8} ∏_{j<N}[(𝟙+iZ_j)/√2 · (𝟙+iX_jX_{j+1})/√2] · (𝟙+iZ_N)/√2 · ½(𝟙+𝖯)`.
//! With this phase `D² = ½(𝟙+𝖯)T` holds for every `N`, and
//! `D = κ_N · ½U(𝟙+𝖯)` with `κ_N = e^{−iπ(3N−4)/4}` and `U` the twisted
//! translation. All trotterized and Floquet operators are built on this `D`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuits::{exp_h_a, exp_h_b, floquet, phase, second_order, v_a, v_b, v_first_order, xx_op, z_op, Sign};
use crate::error::{Error, Result};
use crate::fermion::{projector_even, projector_odd, spin_parity, Majoranas};
use crate::lax::{expected_calibration, transfer, Inhomogeneity, ModeRep};
use crate::linalg::{relative_residual, DenseOperator};
use crate::pauli::{PauliSum, IMAG};
use crate::report::{check, CheckReport};

/// Algebraic identities are checked against this bound.
pub const TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{−2πiN/8}`.
pub fn kw_phase(n: usize) -> Complex64 {
    phase(-2.0 * PI * n as f64 / 8.0)
}

/// `κ_N = e^{−iπ(3N−4)/4}`, the phase in `D = κ_N · ½U(𝟙+𝖯)`.
pub fn kappa(n: usize) -> Complex64 {
    phase(-PI * (3.0 * n as f64 - 4.0) / 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DualityKind {
    D,
    DMinus,
    DPlus,
    FloquetMinus,
    FloquetPlus,
}

#[derive(Clone, Debug)]
pub struct DualityOperator {
    pub kind: DualityKind,
    /// `Ω` for trotterized kinds, `t` for Floquet kinds, zero for `D`.
    pub param: f64,
    pub n: usize,
    pub matrix: DenseOperator,
    pub sparse: Option<PauliSum>,
}

impl DualityOperator {
    /// Numerical rank at relative threshold `1e-10`.
    pub fn rank(&self) -> usize {
        self.matrix.numerical_rank(1e-10)
    }

    /// `‖A · ½(𝟙−𝖯)‖ / ‖A‖`; zero when the odd sector is annihilated.
    pub fn odd_sector_leak(&self) -> Result<f64> {
        let odd = projector_odd(self.n)?.to_dense()?;
        Ok(self.matrix.mat_mul(&odd)?.frobenius_norm() / self.matrix.frobenius_norm().max(1e-30))
    }

    /// Relative residual of `A = A𝖯`.
    pub fn parity_absorption(&self) -> Result<f64> {
        let p = spin_parity(self.n)?.to_dense()?;
        Ok(relative_residual(&self.matrix, &self.matrix.mat_mul(&p)?))
    }

    pub fn adjoint(&self) -> DenseOperator {
        self.matrix.adjoint()
    }
}

fn half_rotation(op: &PauliSum) -> Result<PauliSum> {
    let n = op.n_sites();
    Ok(PauliSum::identity(n)?.checked_add(&op.scale(IMAG))?.scale(FRAC_1_SQRT_2.into()))
}

/// Product form of `D`, including the `e^{−2πiN/8}` normalization.
pub fn kw_product_form(n: usize) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("duality needs N ≥ 2, got {n}")));
    }
    let mut d = PauliSum::identity(n)?;
    for j in 1..n {
        d = d.checked_mul(&half_rotation(&z_op(j, n)?)?)?;
        d = d.checked_mul(&half_rotation(&xx_op(j, n)?)?)?;
    }
    d = d.checked_mul(&half_rotation(&z_op(n, n)?)?)?;
    d = d.checked_mul(&projector_even(n)?)?;
    Ok(d.scale(kw_phase(n)))
}

/// `U = 2^{−(N−1/2)} Γ_1 (Γ_1−Γ_2)(Γ_2−Γ_3)⋯(Γ_{2N−1}−Γ_{2N})`.
///
/// Conjugation shifts the Majoranas, `UΓ_jU⁻¹ = Γ_{j+1}` and `UΓ_{2N}U⁻¹ = −Γ_1`.
pub fn twisted_translation(n: usize) -> Result<PauliSum> {
    twisted_translation_from(&Majoranas::new(n)?)
}

pub fn twisted_translation_from(m: &Majoranas) -> Result<PauliSum> {
    let n = m.n_sites();
    let mut u = m.get(1).clone();
    for k in 1..2 * n {
        u = u.checked_mul(&m.get(k).checked_sub(m.get(k + 1))?)?;
    }
    Ok(u.scale(2f64.powf(-(n as f64 - 0.5)).into()))
}

/// Largest deviation in the conjugation table of `U`, computed sparsely.
pub fn twisted_translation_table_residual(m: &Majoranas) -> Result<f64> {
    let n = m.n_sites();
    let u = twisted_translation_from(m)?;
    let u_inv = u.dagger();
    let mut worst: f64 = 0.0;
    for j in 1..=2 * n {
        let lhs = u.checked_mul(m.get(j))?.checked_mul(&u_inv)?;
        let rhs = if j < 2 * n { m.get(j + 1).clone() } else { -m.get(1) };
        worst = worst.max(lhs.checked_sub(&rhs)?.max_abs_coefficient());
    }
    Ok(worst)
}

/// `P_{jk} = (𝟙 + X_jX_k + Y_jY_k + Z_jZ_k)/2`.
pub fn swap(j: usize, k: usize, n: usize) -> Result<PauliSum> {
    let mut s = PauliSum::identity(n)?;
    for p in ["X", "Y", "Z"] {
        s = s.checked_add(&PauliSum::from_label(n, &format!("{p}{j}{p}{k}"), c(1.0, 0.0))?)?;
    }
    Ok(s.scale(0.5.into()))
}

/// `T = P_{12} P_{23} ⋯ P_{N−1,N}`, with `T Z_j T⁻¹ = Z_{j+1}`.
pub fn translation(n: usize) -> Result<DenseOperator> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("translation needs N ≥ 2, got {n}")));
    }
    let mut t = DenseOperator::identity(n)?;
    for j in 1..n {
        t = t.mat_mul(&swap(j, j + 1, n)?.to_dense()?)?;
    }
    Ok(t)
}

/// Builds `D` both ways and insists they agree.
pub fn kw_continuous(n: usize) -> Result<DualityOperator> {
    let sparse = kw_product_form(n)?;
    let matrix = sparse.to_dense()?;
    let u = twisted_translation(n)?.to_dense()?;
    let proj = projector_even(n)?.to_dense()?;
    let via_u = u.mat_mul(&proj)?.scale(kappa(n));
    let r = relative_residual(&matrix, &via_u);
    if r > 1e-12 {
        return Err(Error::Consistency(format!("D product form vs ½U(𝟙+𝖯): residual {r:.3e}")));
    }
    Ok(DualityOperator { kind: DualityKind::D, param: 0.0, n, matrix, sparse: Some(sparse) })
}

/// Optional defects used to demonstrate that the checks can fail.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityDefect {
    /// Build `𝔇₊` with `(𝟙 − iΩX_jX_{j+1})` in place of `(𝟙 + iΩX_jX_{j+1})`.
    pub flip_plus_sign: bool,
}

/// `𝔇₋(Ω) = D ∏(𝟙−iΩZ_j)/(1−iΩ)` and `𝔇₊(Ω) = D ∏(𝟙+iΩX_jX_{j+1})/(1+iΩ)`.
pub fn kw_trotterized(omega: f64, sign: Sign, n: usize) -> Result<DualityOperator> {
    kw_trotterized_with(omega, sign, n, DualityDefect::default())
}

pub fn kw_trotterized_with(omega: f64, sign: Sign, n: usize, defect: DualityDefect) -> Result<DualityOperator> {
    let d = kw_continuous(n)?;
    let (kind, layer) = match sign {
        Sign::Minus => (DualityKind::DMinus, v_a(-omega, n)?),
        Sign::Plus if defect.flip_plus_sign => (DualityKind::DPlus, v_b(-omega, n)?),
        Sign::Plus => (DualityKind::DPlus, v_b(omega, n)?),
    };
    Ok(DualityOperator { kind, param: omega, n, matrix: d.matrix.mat_mul(&layer)?, sparse: None })
}

/// Transfer-matrix route: `𝔇±(Ω) = κ_N c⁻¹ · ½τ(±ω/2|ω)(𝟙+𝖯)` with `Ω = tanh ω`
/// and `c` the trace calibration scalar.
pub fn kw_from_transfer(omega: f64, sign: Sign, n: usize) -> Result<DenseOperator> {
    if omega.abs() >= 1.0 {
        return Err(Error::InvalidParameter(format!("transfer route needs |Ω| < 1, got {omega}")));
    }
    let w = omega.atanh();
    let rep = ModeRep::new(n)?;
    let tau = transfer(sign.value() * w / 2.0, &Inhomogeneity::staggered(w, n), &rep)?;
    let proj = projector_even(n)?.to_dense()?;
    Ok(tau.mat_mul(&proj)?.scale(kappa(n) / expected_calibration(n)))
}

/// `𝔇^F₋(t) = D e^{itH_A}`, `𝔇^F₊(t) = D e^{−itH_B}`.
pub fn kw_floquet(t: f64, sign: Sign, n: usize) -> Result<DualityOperator> {
    let d = kw_continuous(n)?;
    let (kind, layer) = match sign {
        Sign::Minus => (DualityKind::FloquetMinus, exp_h_a(-t, n)?),
        Sign::Plus => (DualityKind::FloquetPlus, exp_h_b(t, n)?),
    };
    Ok(DualityOperator { kind, param: t, n, matrix: d.matrix.mat_mul(&layer)?, sparse: None })
}

/// `A O = O' A`, relative to `max(‖AO‖, ‖O'A‖)`.
pub fn intertwine_residual(a: &DenseOperator, o: &DenseOperator, o_prime: &DenseOperator) -> Result<f64> {
    Ok(relative_residual(&a.mat_mul(o)?, &o_prime.mat_mul(a)?))
}

pub fn check_intertwine(id: &str, anchor: &str, a: &DenseOperator, o: &DenseOperator, o_prime: &DenseOperator) -> CheckReport {
    check(id, anchor, TOL, || intertwine_residual(a, o, o_prime))
}

fn check_equal(id: &str, anchor: &str, a: Result<DenseOperator>, b: Result<DenseOperator>) -> CheckReport {
    check(id, anchor, TOL, || Ok(relative_residual(&a?, &b?)))
}

/// Properties of `D` itself: intertwining of `H_A` and `H_B`, commutation with
/// `H_A + H_B`, `D² = ½(𝟙+𝖯)T`, `D†D = ½(𝟙+𝖯)`, rank `2^{N−1}` and the odd kernel.
pub fn continuous_suite(n: usize) -> Vec<CheckReport> {
    let built = (|| -> Result<_> {
        let d = kw_continuous(n)?;
        let ha = crate::circuits::h_a(n)?.to_dense()?;
        let hb = crate::circuits::h_b(n)?.to_dense()?;
        let proj = projector_even(n)?.to_dense()?;
        let t = translation(n)?;
        Ok((d, ha, hb, proj, t))
    })();
    let (d, ha, hb, proj, t) = match built {
        Ok(v) => v,
        Err(e) => return vec![CheckReport::failed("kw.construct", "D", TOL, e.to_string()).param("N", n as f64)],
    };
    let m = &d.matrix;
    let h = ha.mat_add(&hb).expect("same size");
    let rank = d.rank();
    let expected_rank = 1usize << (n - 1);
    let mut out = vec![
        check_intertwine("kw.d_maps_ha_to_hb", "D H_A = H_B D", m, &ha, &hb),
        check_intertwine("kw.d_maps_hb_to_ha", "D H_B = H_A D", m, &hb, &ha),
        check_intertwine("kw.d_commutes_with_h", "[D, H_A + H_B] = 0", m, &h, &h),
        check_equal("kw.d_squared", "D² = ½(𝟙+𝖯)T", m.mat_mul(m), proj.mat_mul(&t)),
        check_equal("kw.d_dagger_d", "D†D = ½(𝟙+𝖯)", m.adjoint().mat_mul(m), Ok(proj.clone())),
        check("kw.odd_kernel", "D ½(𝟙−𝖯) = 0", TOL, || d.odd_sector_leak()),
        check("kw.parity_absorption", "D = D𝖯", TOL, || d.parity_absorption()),
        CheckReport::new("kw.rank", "rank D = 2^{N−1}", (rank as f64 - expected_rank as f64).abs(), 0.0)
            .note(format!("rank {rank}")),
    ];
    for r in &mut out {
        r.params.insert("N".into(), n as f64);
    }
    out
}

/// Table of non-invertible actions of `𝔇±(Ω)` on the layers `V_A`, `V_B` and
/// on `V = V_A V_B`.
pub fn table_one(omega: f64, n: usize) -> Vec<CheckReport> {
    table_one_with(omega, n, DualityDefect::default())
}

pub fn table_one_with(omega: f64, n: usize, defect: DualityDefect) -> Vec<CheckReport> {
    let built = (|| -> Result<_> {
        let dm = kw_trotterized_with(omega, Sign::Minus, n, defect)?.matrix;
        let dp = kw_trotterized_with(omega, Sign::Plus, n, defect)?.matrix;
        let a = v_a(omega, n)?;
        let b = v_b(omega, n)?;
        Ok((dm, dp, a, b))
    })();
    let (dm, dp, a, b) = match built {
        Ok(v) => v,
        Err(e) => return vec![CheckReport::failed("table.construct", "𝔇±(Ω)", TOL, e.to_string())],
    };
    let v = a.mat_mul(&b).expect("same size");
    let bab = b.adjoint().mat_mul(&a).and_then(|x| x.mat_mul(&b)).expect("same size");
    let aba = a.mat_mul(&b).and_then(|x| x.mat_mul(&a.adjoint())).expect("same size");
    let mut out = vec![
        check_intertwine("table.minus_on_va", "𝔇₋ V_A = V_B 𝔇₋", &dm, &a, &b),
        check_intertwine("table.plus_on_vb", "𝔇₊ V_B = V_A 𝔇₊", &dp, &b, &a),
        check_intertwine("table.minus_on_vb", "𝔇₋ V_B = (V_B† V_A V_B) 𝔇₋", &dm, &b, &bab),
        check_intertwine("table.plus_on_va", "𝔇₊ V_A = (V_A V_B V_A†) 𝔇₊", &dp, &a, &aba),
        check_intertwine("table.minus_on_v", "𝔇₋ V = V 𝔇₋", &dm, &v, &v),
        check_intertwine("table.plus_on_v", "𝔇₊ V = V 𝔇₊", &dp, &v, &v),
    ];
    for r in &mut out {
        r.params.insert("N".into(), n as f64);
        r.params.insert("Omega".into(), omega);
    }
    out
}

/// `𝔇₋(Ω)V(Ω;1,J) = V(Ω;J,1)𝔇₋(Ω)` or `𝔇₊(Ω)V(Ω;h,1) = V(Ω;1,h)𝔇₊(Ω)`.
pub fn duality_on_generic_circuit(omega: f64, sign: Sign, coupling: f64, n: usize) -> CheckReport {
    duality_on_generic_circuit_with(omega, sign, coupling, n, DualityDefect::default())
}

pub fn duality_on_generic_circuit_with(omega: f64, sign: Sign, coupling: f64, n: usize, defect: DualityDefect) -> CheckReport {
    let (id, anchor) = match sign {
        Sign::Minus => ("generic.minus", "𝔇₋(Ω) V(Ω;1,J) = V(Ω;J,1) 𝔇₋(Ω)"),
        Sign::Plus => ("generic.plus", "𝔇₊(Ω) V(Ω;h,1) = V(Ω;1,h) 𝔇₊(Ω)"),
    };
    check(id, anchor, TOL, || {
        let a = kw_trotterized_with(omega, sign, n, defect)?.matrix;
        let (o, o_prime) = match sign {
            Sign::Minus => (v_first_order(omega, 1.0, coupling, n)?, v_first_order(omega, coupling, 1.0, n)?),
            Sign::Plus => (v_first_order(omega, coupling, 1.0, n)?, v_first_order(omega, 1.0, coupling, n)?),
        };
        intertwine_residual(&a, &o, &o_prime)
    })
    .param("N", n as f64)
    .param("Omega", omega)
    .param("coupling", coupling)
}

/// The algebra closed by `𝔇±(Ω)`, `T` and `V(Ω)`.
pub fn algebra_suite(omega: f64, n: usize) -> Vec<CheckReport> {
    algebra_suite_with(omega, n, DualityDefect::default())
}

pub fn algebra_suite_with(omega: f64, n: usize, defect: DualityDefect) -> Vec<CheckReport> {
    let built = (|| -> Result<_> {
        let dm = kw_trotterized_with(omega, Sign::Minus, n, defect)?.matrix;
        let dp = kw_trotterized_with(omega, Sign::Plus, n, defect)?.matrix;
        let v = v_first_order(omega, 1.0, 1.0, n)?;
        let proj = projector_even(n)?.to_dense()?;
        let pt = proj.mat_mul(&translation(n)?)?;
        Ok((dm, dp, v, proj, pt))
    })();
    let (dm, dp, v, proj, pt) = match built {
        Ok(x) => x,
        Err(e) => return vec![CheckReport::failed("algebra.construct", "𝔇±(Ω)", TOL, e.to_string())],
    };
    let mut out = vec![
        check_equal("algebra.plus_squared", "𝔇₊² = ½(𝟙+𝖯) T V(Ω)", dp.mat_mul(&dp), pt.mat_mul(&v)),
        check_equal("algebra.minus_squared", "𝔇₋² = ½(𝟙+𝖯) T V(Ω)†", dm.mat_mul(&dm), pt.mat_mul(&v.adjoint())),
        check_equal("algebra.plus_dagger_plus", "𝔇₊†𝔇₊ = ½(𝟙+𝖯)", dp.adjoint().mat_mul(&dp), Ok(proj.clone())),
        check_equal("algebra.minus_dagger_minus", "𝔇₋†𝔇₋ = ½(𝟙+𝖯)", dm.adjoint().mat_mul(&dm), Ok(proj.clone())),
        check_equal("algebra.minus_dagger_plus", "𝔇₋†𝔇₊ = ½(𝟙+𝖯) V(Ω)", dm.adjoint().mat_mul(&dp), proj.mat_mul(&v)),
        check_equal("algebra.plus_minus", "𝔇₊𝔇₋ = ½(𝟙+𝖯) T", dp.mat_mul(&dm), Ok(pt.clone())),
        check_equal("algebra.minus_plus", "𝔇₋𝔇₊ = ½(𝟙+𝖯) T", dm.mat_mul(&dp), Ok(pt.clone())),
    ];
    for r in &mut out {
        r.params.insert("N".into(), n as f64);
        r.params.insert("Omega".into(), omega);
    }
    out
}

/// Floquet duality relations at half-period `t`:
/// the phase links to `𝔇±(tan t)`, the general action on `V^F(t;h,J)`,
/// the three-step images at coupling 2, and the map onto second-order circuits.
pub fn floquet_duality_suite(t: f64, h: f64, j: f64, n: usize) -> Vec<CheckReport> {
    let nf = n as f64;
    let mut out = Vec::new();
    out.push(check("floquet.phase_link_minus", "𝔇^F₋(t) = e^{−iNt} 𝔇₋(tan t)", TOL, || {
        let f = kw_floquet(t, Sign::Minus, n)?.matrix;
        let d = kw_trotterized(t.tan(), Sign::Minus, n)?.matrix.scale(phase(-nf * t));
        Ok(relative_residual(&f, &d))
    }));
    out.push(check("floquet.phase_link_plus", "𝔇^F₊(t) = e^{iNt} 𝔇₊(tan t)", TOL, || {
        let f = kw_floquet(t, Sign::Plus, n)?.matrix;
        let d = kw_trotterized(t.tan(), Sign::Plus, n)?.matrix.scale(phase(nf * t));
        Ok(relative_residual(&f, &d))
    }));
    out.push(check("floquet.general_minus", "𝔇^F₋ V^F(t;h,J) = e^{−i(h−1)tH_B} V^F(t;J,1) 𝔇^F₋", TOL, || {
        let a = kw_floquet(t, Sign::Minus, n)?.matrix;
        let o = floquet(t, h, j, n)?;
        let o_prime = exp_h_b((h - 1.0) * t, n)?.mat_mul(&floquet(t, j, 1.0, n)?)?;
        intertwine_residual(&a, &o, &o_prime)
    }));
    out.push(check("floquet.general_plus", "𝔇^F₊ V^F(t;h,J) = V^F(t;1,h) e^{−i(J−1)tH_A} 𝔇^F₊", TOL, || {
        let a = kw_floquet(t, Sign::Plus, n)?.matrix;
        let o = floquet(t, h, j, n)?;
        let o_prime = floquet(t, 1.0, h, n)?.mat_mul(&exp_h_a((j - 1.0) * t, n)?)?;
        intertwine_residual(&a, &o, &o_prime)
    }));
    out.push(check("floquet.self_dual_minus", "𝔇^F₋ V^F(t;1,J) = V^F(t;J,1) 𝔇^F₋", TOL, || {
        let a = kw_floquet(t, Sign::Minus, n)?.matrix;
        intertwine_residual(&a, &floquet(t, 1.0, j, n)?, &floquet(t, j, 1.0, n)?)
    }));
    out.push(check("floquet.self_dual_plus", "𝔇^F₊ V^F(t;h,1) = V^F(t;1,h) 𝔇^F₊", TOL, || {
        let a = kw_floquet(t, Sign::Plus, n)?.matrix;
        intertwine_residual(&a, &floquet(t, h, 1.0, n)?, &floquet(t, 1.0, h, n)?)
    }));
    out.push(check("floquet.three_step_minus", "𝔇^F₋ V^F(t;2,J) = e^{−itH_B} e^{−iJtH_A} e^{−itH_B} 𝔇^F₋", TOL, || {
        let a = kw_floquet(t, Sign::Minus, n)?.matrix;
        let b = exp_h_b(t, n)?;
        let o_prime = b.mat_mul(&exp_h_a(j * t, n)?)?.mat_mul(&b)?;
        intertwine_residual(&a, &floquet(t, 2.0, j, n)?, &o_prime)
    }));
    out.push(check("floquet.three_step_plus", "𝔇^F₊ V^F(t;h,2) = e^{−itH_A} e^{−ihtH_B} e^{−itH_A} 𝔇^F₊", TOL, || {
        let a = kw_floquet(t, Sign::Plus, n)?.matrix;
        let ea = exp_h_a(t, n)?;
        let o_prime = ea.mat_mul(&exp_h_b(h * t, n)?)?.mat_mul(&ea)?;
        intertwine_residual(&a, &floquet(t, h, 2.0, n)?, &o_prime)
    }));
    out.push(check("floquet.second_order_minus", "𝔇₋(tan t) V^F(t;2,J) = V^F₋(t;J,2) 𝔇₋(tan t)", TOL, || {
        let a = kw_trotterized(t.tan(), Sign::Minus, n)?.matrix;
        intertwine_residual(&a, &floquet(t, 2.0, j, n)?, &second_order(t, j, 2.0, Sign::Minus, n)?)
    }));
    out.push(check("floquet.second_order_plus", "𝔇₊(tan t) V^F(t;h,2) = V^F₊(t;2,h) 𝔇₊(tan t)", TOL, || {
        let a = kw_trotterized(t.tan(), Sign::Plus, n)?.matrix;
        intertwine_residual(&a, &floquet(t, h, 2.0, n)?, &second_order(t, 2.0, h, Sign::Plus, n)?)
    }));
    for r in &mut out {
        r.params.insert("N".into(), nf);
        r.params.insert("t".into(), t);
        r.params.insert("h".into(), h);
        r.params.insert("J".into(), j);
    }
    out
}

/// Compares `½(𝟙+𝖯)U²` with `½(𝟙+𝖯)T`.
///
/// Returns `(operator, adjoint)`: the operator residual after removing the
/// global phase `(−i)^N`, and the largest residual between the adjoint actions
/// of `U²` and `T` on `Z_j` and `X_jX_{j+1}` inside the even sector.
pub fn half_translation_residuals(n: usize) -> Result<(f64, f64)> {
    let u = twisted_translation(n)?.to_dense()?;
    let u2 = u.mat_mul(&u)?;
    let t = translation(n)?;
    let proj = projector_even(n)?.to_dense()?;
    let lhs = proj.mat_mul(&u2)?;
    let rhs = proj.mat_mul(&t)?.scale(crate::pauli::i_pow(-(n as i64)));
    let operator = relative_residual(&lhs, &rhs);
    let mut adjoint: f64 = 0.0;
    for j in 1..=n {
        for o in [z_op(j, n)?, xx_op(j, n)?] {
            let o = o.to_dense()?;
            let a = proj.mat_mul(&u2)?.mat_mul(&o)?.mat_mul(&u2.adjoint())?;
            let b = proj.mat_mul(&t)?.mat_mul(&o)?.mat_mul(&t.adjoint())?;
            adjoint = adjoint.max(relative_residual(&a, &b));
        }
    }
    Ok((operator, adjoint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;

    fn all_pass(reports: &[CheckReport]) {
        for r in reports {
            assert!(r.pass, "{}", r.summary());
        }
    }

    #[test]
    fn translation_basics() {
        let t2 = translation(2).unwrap();
        let sw = PauliSum::from_dense(&t2).unwrap();
        assert_eq!(sw.len(), 4);
        let m = t2.matrix();
        assert!((m[(1, 2)] - c(1.0, 0.0)).norm() < 1e-15 && (m[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let n = 4;
        let t = translation(n).unwrap();
        assert!(relative_residual(&t.powi(n as u32), &DenseOperator::identity(n).unwrap()) < 1e-14);
        let x12 = PauliSum::from_label(n, "X1X2", c(1.0, 0.0)).unwrap().to_dense().unwrap();
        let x23 = PauliSum::from_label(n, "X2X3", c(1.0, 0.0)).unwrap().to_dense().unwrap();
        assert!(relative_residual(&(&(&t * &x12) * &t.adjoint()), &x23) < 1e-14);
        for j in 1..=n {
            let z = z_op(j, n).unwrap().to_dense().unwrap();
            let zn = z_op(j % n + 1, n).unwrap().to_dense().unwrap();
            assert!(relative_residual(&(&(&t * &z) * &t.adjoint()), &zn) < 1e-14);
        }
    }

    #[test]
    fn twisted_translation_properties() {
        for n in 2..=4 {
            let m = Majoranas::new(n).unwrap();
            assert!(twisted_translation_table_residual(&m).unwrap() < 1e-14);
            let u = twisted_translation(n).unwrap().to_dense().unwrap();
            assert!(unitarity_residual(&u) < 1e-13);
            let p = m.parity().to_dense().unwrap();
            let (s, r) = crate::linalg::fit_scalar(&u.powi(2 * n as u32), &p);
            assert!(r < 1e-12 && (s.norm() - 1.0).abs() < 1e-12);
        }
        let broken = Majoranas::with_phase_defect(3, 3).unwrap();
        assert!(twisted_translation_table_residual(&broken).unwrap() > 0.1);
    }

    #[test]
    fn d_constructions_agree() {
        for n in 2..=5 {
            let d = kw_continuous(n).unwrap();
            assert_eq!(d.rank(), 1 << (n - 1));
            assert!(d.odd_sector_leak().unwrap() < 1e-14);
        }
    }

    #[test]
    fn continuous_identities() {
        for n in [3, 4] {
            all_pass(&continuous_suite(n));
        }
    }

    #[test]
    fn homogeneous_limit() {
        let n = 3;
        let d = kw_continuous(n).unwrap().matrix;
        for s in Sign::both() {
            let t = kw_trotterized(0.0, s, n).unwrap().matrix;
            assert!(relative_residual(&d, &t) < 1e-15);
            let f = kw_floquet(0.0, s, n).unwrap().matrix;
            assert!(relative_residual(&d, &f) < 1e-15);
        }
    }

    #[test]
    fn transfer_route_matches_product_route() {
        for n in [2, 3, 4] {
            for s in Sign::both() {
                let a = kw_trotterized(0.3, s, n).unwrap().matrix;
                let b = kw_from_transfer(0.3, s, n).unwrap();
                assert!(relative_residual(&a, &b) < 1e-10, "N={n} {s:?}");
            }
        }
        assert!(kw_from_transfer(1.0, Sign::Plus, 3).is_err());
    }

    #[test]
    fn table_and_generic_couplings() {
        for n in [3, 4] {
            all_pass(&table_one(0.3, n));
            for s in Sign::both() {
                for g in [0.3, 0.7, 1.0, 1.5, 2.0] {
                    let r = duality_on_generic_circuit(0.25, s, g, n);
                    assert!(r.pass, "{}", r.summary());
                }
            }
        }
    }

    #[test]
    fn algebra_at_several_steps() {
        for (n, w) in [(3, 0.0), (3, 0.3), (4, 0.5)] {
            all_pass(&algebra_suite(w, n));
        }
    }

    #[test]
    fn floquet_suite_passes() {
        all_pass(&floquet_duality_suite(0.2, 0.7, 0.6, 3));
        all_pass(&floquet_duality_suite(0.3, 2.0, 0.5, 3));
    }

    #[test]
    fn trotterized_operators_are_parity_absorbing() {
        for s in Sign::both() {
            let d = kw_trotterized(0.4, s, 3).unwrap();
            assert!(d.parity_absorption().unwrap() < 1e-14);
            assert_eq!(d.rank(), 4);
        }
    }

    #[test]
    fn defect_breaks_plus_relations() {
        let defect = DualityDefect { flip_plus_sign: true };
        let failing = table_one_with(0.3, 3, defect).into_iter().filter(|r| !r.pass).count();
        assert!(failing >= 1);
        assert!(!duality_on_generic_circuit_with(0.3, Sign::Plus, 0.7, 3, defect).pass);
    }

    #[test]
    fn half_translation_phase() {
        for n in 2..=5 {
            let (op, adj) = half_translation_residuals(n).unwrap();
            assert!(op < 1e-12 && adj < 1e-12, "N={n}: {op} {adj}");
        }
    }
}
