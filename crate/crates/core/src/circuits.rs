//! Discrete-time evolution operators for the transverse-field Ising chain.
//!
//! `H_A = −Σ Z_j`, `H_B = −Σ X_jX_{j+1}` with periodic boundary, and
//! `H(h, J) = h H_A + J H_B`. Layer order is frozen: within a layer gates are
//! applied in ascending site order, and the A layer stands to the left of the
//! B layer, `V = V_A V_B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::{spin_parity, Majoranas};
use crate::linalg::DenseOperator;
use crate::pauli::PauliSum;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_site(j: usize, n: usize) -> Result<()> {
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, max: n });
    }
    Ok(())
}

/// `Z_j`.
pub fn z_op(j: usize, n: usize) -> Result<PauliSum> {
    check_site(j, n)?;
    PauliSum::from_label(n, &format!("Z{j}"), c(1.0, 0.0))
}

/// `X_j X_{j+1}` with `N + 1 ≡ 1`. For `N = 2` both bonds are `X_1X_2`.
pub fn xx_op(j: usize, n: usize) -> Result<PauliSum> {
    check_site(j, n)?;
    if n < 2 {
        return Err(Error::InvalidParameter("XX bond needs at least two sites".into()));
    }
    let k = j % n + 1;
    PauliSum::from_label(n, &format!("X{j}X{k}"), c(1.0, 0.0))
}

/// `H_A = −Σ_j Z_j`.
pub fn h_a(n: usize) -> Result<PauliSum> {
    let mut h = PauliSum::zero(n)?;
    for j in 1..=n {
        h = h.checked_sub(&z_op(j, n)?)?;
    }
    Ok(h)
}

/// `H_B = −Σ_j X_j X_{j+1}`, periodic.
pub fn h_b(n: usize) -> Result<PauliSum> {
    let mut h = PauliSum::zero(n)?;
    for j in 1..=n {
        h = h.checked_sub(&xx_op(j, n)?)?;
    }
    Ok(h)
}

/// `H(h, J) = h H_A + J H_B`.
pub fn tfim(h: f64, j: f64, n: usize) -> Result<PauliSum> {
    h_a(n)?.scale(h.into()).checked_add(&h_b(n)?.scale(j.into()))
}

fn rational_gate(op: &PauliSum, omega: f64) -> Result<PauliSum> {
    let n = op.n_sites();
    Ok(PauliSum::identity(n)?.checked_add(&op.scale(c(0.0, omega)))?.scale(c(1.0, omega).inv()))
}

/// `U^Z_j(Ω) = (𝟙 + iΩZ_j)/(1 + iΩ)`.
pub fn gate_uz(j: usize, omega: f64, n: usize) -> Result<PauliSum> {
    rational_gate(&z_op(j, n)?, omega)
}

/// `U^XX_j(Ω) = (𝟙 + iΩX_jX_{j+1})/(1 + iΩ)`.
pub fn gate_uxx(j: usize, omega: f64, n: usize) -> Result<PauliSum> {
    rational_gate(&xx_op(j, n)?, omega)
}

/// An ordered gate list; `gates[0]` is the leftmost factor of the product.
#[derive(Clone, Debug)]
pub struct Circuit {
    n: usize,
    gates: Vec<PauliSum>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit { n, gates: Vec::new() }
    }

    pub fn push(&mut self, gate: PauliSum) -> Result<()> {
        if gate.n_sites() != self.n {
            return Err(Error::DimensionMismatch { left: self.n, right: gate.n_sites() });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, other: Circuit) -> Result<()> {
        for g in other.gates {
            self.push(g)?;
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[PauliSum] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn to_dense(&self) -> Result<DenseOperator> {
        let mut out = DenseOperator::identity(self.n)?;
        for g in &self.gates {
            out = out.mat_mul(&g.to_dense()?)?;
        }
        Ok(out)
    }

    /// Applies the product to a state vector without forming the dense matrix.
    pub fn apply(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut psi = state.to_vec();
        for g in self.gates.iter().rev() {
            psi = g.apply(&psi)?;
        }
        Ok(psi)
    }
}

/// `V_A(Ω) = ∏_j U^Z_j(Ω)`.
pub fn layer_a(omega: f64, n: usize) -> Result<Circuit> {
    let mut circ = Circuit::new(n);
    for j in 1..=n {
        circ.push(gate_uz(j, omega, n)?)?;
    }
    Ok(circ)
}

/// `V_B(Ω) = ∏_j U^XX_j(Ω)`.
pub fn layer_b(omega: f64, n: usize) -> Result<Circuit> {
    let mut circ = Circuit::new(n);
    for j in 1..=n {
        circ.push(gate_uxx(j, omega, n)?)?;
    }
    Ok(circ)
}

pub fn v_a(omega: f64, n: usize) -> Result<DenseOperator> {
    layer_a(omega, n)?.to_dense()
}

pub fn v_b(omega: f64, n: usize) -> Result<DenseOperator> {
    layer_b(omega, n)?.to_dense()
}

/// Gate list of `V(Ω; h, J) = V_A(hΩ) V_B(JΩ)`.
pub fn first_order_circuit(omega: f64, h: f64, j: f64, n: usize) -> Result<Circuit> {
    let mut circ = layer_a(h * omega, n)?;
    circ.extend(layer_b(j * omega, n)?)?;
    Ok(circ)
}

/// `V(Ω; h, J) = ∏(𝟙 + ihΩZ_j)/(1 + ihΩ) · ∏(𝟙 + iJΩX_jX_{j+1})/(1 + iJΩ)`.
pub fn v_first_order(omega: f64, h: f64, j: f64, n: usize) -> Result<DenseOperator> {
    first_order_circuit(omega, h, j, n)?.to_dense()
}

/// Majorana circuit `𝒱(Ω) = ∏_j U_{2j−1,2j}(Ω) · ∏_j U_{2j,2j+1}(Ω)` with
/// `U_{k,k+1} = (𝟙 + (−1)^{δ_{k,2N}} Ω Γ_kΓ_{k+1})/(1 + iΩ)` and `Γ_{2N+1} = Γ_1`.
pub fn v_majorana_sparse(omega: f64, modes: &Majoranas) -> Result<PauliSum> {
    majorana_layer_a(omega, modes)?.checked_mul(&majorana_layer_b(omega, modes)?)
}

/// `∏_j (𝟙 + ΩΓ_{2j−1}Γ_{2j})/(1 + iΩ)`, which is `V_A(Ω)` for the standard modes.
pub fn majorana_layer_a(omega: f64, modes: &Majoranas) -> Result<PauliSum> {
    let n = modes.n_sites();
    let norm = c(1.0, omega).inv();
    let id = PauliSum::identity(n)?;
    let mut out = id.clone();
    for j in 1..=n {
        let g = id.checked_add(&modes.bilinear(2 * j - 1, 2 * j).scale(omega.into()))?.scale(norm);
        out = out.checked_mul(&g)?;
    }
    Ok(out)
}

/// `∏_j (𝟙 + (−1)^{δ_{j,N}} ΩΓ_{2j}Γ_{2j+1})/(1 + iΩ)` with `Γ_{2N+1} = Γ_1`.
pub fn majorana_layer_b(omega: f64, modes: &Majoranas) -> Result<PauliSum> {
    let n = modes.n_sites();
    let norm = c(1.0, omega).inv();
    let id = PauliSum::identity(n)?;
    let mut out = id.clone();
    for j in 1..=n {
        let sign = if j == n { -1.0 } else { 1.0 };
        let bil = modes.get(2 * j).checked_mul(modes.wrapped(2 * j + 1))?;
        let g = id.checked_add(&bil.scale((sign * omega).into()))?.scale(norm);
        out = out.checked_mul(&g)?;
    }
    Ok(out)
}

pub fn v_majorana(omega: f64, modes: &Majoranas) -> Result<DenseOperator> {
    v_majorana_sparse(omega, modes)?.to_dense()
}

/// Spin form of the Majorana circuit: the last bond gate carries the parity,
/// `(𝟙 + iΩ𝖯X_NX_1)/(1 + iΩ)`.
pub fn v_majorana_spin(omega: f64, n: usize) -> Result<DenseOperator> {
    let mut circ = layer_a(omega, n)?;
    for j in 1..n {
        circ.push(gate_uxx(j, omega, n)?)?;
    }
    let twisted = spin_parity(n)?.checked_mul(&xx_op(n, n)?)?;
    circ.push(rational_gate(&twisted, omega)?)?;
    circ.to_dense()
}

/// `∏_j (cos θ 𝟙 + i sin θ O_j)` for commuting involutions `O_j`.
fn rotation_layer(ops: &[PauliSum], theta: f64) -> Result<DenseOperator> {
    let n = ops[0].n_sites();
    let id = PauliSum::identity(n)?;
    let mut out = DenseOperator::identity(n)?;
    for o in ops {
        let g = id.scale(theta.cos().into()).checked_add(&o.scale(c(0.0, theta.sin())))?;
        out = out.mat_mul(&g.to_dense()?)?;
    }
    Ok(out)
}

/// `e^{−iθH_A} = ∏_j (cos θ + i sin θ Z_j)`.
pub fn exp_h_a(theta: f64, n: usize) -> Result<DenseOperator> {
    let ops = (1..=n).map(|j| z_op(j, n)).collect::<Result<Vec<_>>>()?;
    rotation_layer(&ops, theta)
}

/// `e^{−iθH_B} = ∏_j (cos θ + i sin θ X_jX_{j+1})`.
pub fn exp_h_b(theta: f64, n: usize) -> Result<DenseOperator> {
    let ops = (1..=n).map(|j| xx_op(j, n)).collect::<Result<Vec<_>>>()?;
    rotation_layer(&ops, theta)
}

/// `V^F(t; h, J) = e^{−ihtH_A} e^{−iJtH_B}`.
pub fn floquet(t: f64, h: f64, j: f64, n: usize) -> Result<DenseOperator> {
    exp_h_a(h * t, n)?.mat_mul(&exp_h_b(j * t, n)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Minus, Sign::Plus]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Minus => "minus",
            Sign::Plus => "plus",
        }
    }
}

/// `V^F_−(t; h, J) = e^{−iJtH_B/2} e^{−ihtH_A} e^{−iJtH_B/2}` and
/// `V^F_+(t; h, J) = e^{−ihtH_A/2} e^{−iJtH_B} e^{−ihtH_A/2}`.
pub fn second_order(t: f64, h: f64, j: f64, sign: Sign, n: usize) -> Result<DenseOperator> {
    match sign {
        Sign::Minus => {
            let half = exp_h_b(j * t / 2.0, n)?;
            half.mat_mul(&exp_h_a(h * t, n)?)?.mat_mul(&half)
        }
        Sign::Plus => {
            let half = exp_h_a(h * t / 2.0, n)?;
            half.mat_mul(&exp_h_b(j * t, n)?)?.mat_mul(&half)
        }
    }
}

/// `e^{−itH(h, J)}` by dense exponentiation.
pub fn reference_evolution(t: f64, h: f64, j: f64, n: usize) -> Result<DenseOperator> {
    tfim(h, j, n)?.to_dense()?.scale(c(0.0, -t)).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrotterScheme {
    /// `(e^{−ihΩH_A} e^{−iJΩH_B})^n`.
    FirstOrder,
    /// `V(Ω; h, J)^n` with its global phase `∏ e^{−iN arctan(·)}` removed.
    RationalFirstOrder,
    SecondOrderMinus,
    SecondOrderPlus,
}

impl TrotterScheme {
    pub fn all() -> [TrotterScheme; 4] {
        [
            TrotterScheme::FirstOrder,
            TrotterScheme::RationalFirstOrder,
            TrotterScheme::SecondOrderMinus,
            TrotterScheme::SecondOrderPlus,
        ]
    }

    pub fn order(self) -> u32 {
        match self {
            TrotterScheme::FirstOrder | TrotterScheme::RationalFirstOrder => 1,
            _ => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TrotterScheme::FirstOrder => "first_order",
            TrotterScheme::RationalFirstOrder => "rational_first_order",
            TrotterScheme::SecondOrderMinus => "second_order_minus",
            TrotterScheme::SecondOrderPlus => "second_order_plus",
        }
    }
}

/// One step of the scheme with step size `omega`.
pub fn trotter_step(scheme: TrotterScheme, omega: f64, h: f64, j: f64, n: usize) -> Result<DenseOperator> {
    match scheme {
        TrotterScheme::FirstOrder => floquet(omega, h, j, n),
        TrotterScheme::RationalFirstOrder => {
            let phase = n as f64 * ((h * omega).atan() + (j * omega).atan());
            Ok(v_first_order(omega, h, j, n)?.scale(Complex64::from_polar(1.0, phase)))
        }
        TrotterScheme::SecondOrderMinus => second_order(omega, h, j, Sign::Minus, n),
        TrotterScheme::SecondOrderPlus => second_order(omega, h, j, Sign::Plus, n),
    }
}

/// Spectral-norm distance between `steps` steps of size `t/steps` and `e^{−itH}`.
pub fn trotter_error(t: f64, steps: u32, h: f64, j: f64, scheme: TrotterScheme, n: usize) -> Result<f64> {
    if steps == 0 {
        return Err(Error::InvalidParameter("at least one Trotter step required".into()));
    }
    let step = trotter_step(scheme, t / steps as f64, h, j, n)?;
    let exact = reference_evolution(t, h, j, n)?;
    Ok(step.powi(steps).mat_sub(&exact)?.spectral_norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    FirstOrder,
    MajoranaFirstOrder,
    Floquet,
    SecondOrderMinus,
    SecondOrderPlus,
}

/// A circuit description that can be materialized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub n: usize,
    pub kind: CircuitKind,
    /// Trotter step `Ω`, or the half-period `t` for Floquet kinds.
    pub step: f64,
    pub h: f64,
    pub j: f64,
}

impl CircuitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("need N ≥ 2, got {}", self.n)));
        }
        if ![self.step, self.h, self.j].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("circuit parameters"));
        }
        Ok(())
    }

    /// Whether the Floquet half-period lies in the integrable window `|t| ≤ π/4`.
    pub fn in_integrable_window(&self) -> bool {
        self.step.abs() <= std::f64::consts::FRAC_PI_4
    }

    pub fn build(&self) -> Result<DenseOperator> {
        self.validate()?;
        let (s, h, j, n) = (self.step, self.h, self.j, self.n);
        match self.kind {
            CircuitKind::FirstOrder => v_first_order(s, h, j, n),
            CircuitKind::MajoranaFirstOrder => v_majorana(s, &Majoranas::new(n)?),
            CircuitKind::Floquet => floquet(s, h, j, n),
            CircuitKind::SecondOrderMinus => second_order(s, h, j, Sign::Minus, n),
            CircuitKind::SecondOrderPlus => second_order(s, h, j, Sign::Plus, n),
        }
    }
}

/// `e^{iθ}`-style scalar used throughout the phase links.
pub fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}
