//! Majorana modes on a spin chain via Jordan–Wigner.
//!
//! `Γ_{2j−1} = Z_1⋯Z_{j−1} X_j` and `Γ_{2j} = Z_1⋯Z_{j−1} Y_j`, so that
//! `Γ_{2j−1}Γ_{2j} = iZ_j` and `Γ_{2j}Γ_{2j+1} = iX_jX_{j+1}`.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliSum, PauliTerm, IMAG};
use crate::report::CheckReport;

/// `Γ_j` for `1 ≤ j ≤ 2n`.
pub fn jw_gamma(j: usize, n: usize) -> Result<PauliSum> {
    if j == 0 || j > 2 * n {
        return Err(Error::IndexOutOfRange { index: j, max: 2 * n });
    }
    let site = (j + 1) / 2;
    let string = (1u64 << (site - 1)) - 1;
    let bit = 1u64 << (site - 1);
    let z = if j % 2 == 0 { string | bit } else { string };
    Ok(PauliSum::from_term(PauliTerm::from_masks(n, bit, z, 0)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MajoranaMode {
    pub index: usize,
    pub n: usize,
    pub pauli: PauliSum,
}

impl MajoranaMode {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        Ok(MajoranaMode { index, n, pauli: jw_gamma(index, n)? })
    }
}

/// The full set `Γ_1 … Γ_{2N}` on `N` sites.
///
/// [`Majoranas::with_phase_defect`] builds a deliberately broken set used to
/// show that the algebra checks can fail.
#[derive(Clone, Debug)]
pub struct Majoranas {
    n: usize,
    modes: Vec<PauliSum>,
}

impl Majoranas {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one site".into()));
        }
        let modes = (1..=2 * n).map(|j| jw_gamma(j, n)).collect::<Result<_>>()?;
        Ok(Majoranas { n, modes })
    }

    /// Same as [`Majoranas::new`] but with `Γ_j` replaced by `iΓ_j`.
    pub fn with_phase_defect(n: usize, j: usize) -> Result<Self> {
        let mut m = Self::new(n)?;
        if j == 0 || j > 2 * n {
            return Err(Error::IndexOutOfRange { index: j, max: 2 * n });
        }
        m.modes[j - 1] = m.modes[j - 1].scale(IMAG);
        Ok(m)
    }

    pub fn n_sites(&self) -> usize {
        self.n
    }

    /// `Γ_j`, 1-based.
    pub fn get(&self, j: usize) -> &PauliSum {
        &self.modes[j - 1]
    }

    /// `Γ_k` with the index taken modulo `2N`, so `Γ_{2N+k} = Γ_k`.
    pub fn wrapped(&self, k: usize) -> &PauliSum {
        &self.modes[(k - 1) % (2 * self.n)]
    }

    pub fn iter(&self) -> impl Iterator<Item = &PauliSum> {
        self.modes.iter()
    }

    /// `Γ_j Γ_k`.
    pub fn bilinear(&self, j: usize, k: usize) -> PauliSum {
        self.get(j) * self.get(k)
    }

    /// `𝒫 = Γ_1 Γ_2 ⋯ Γ_{2N}`.
    pub fn parity(&self) -> PauliSum {
        PauliSum::product(self.n, self.modes.iter()).expect("modes share the site count")
    }
}

/// `𝒫 = ∏_j Γ_j`, which equals `i^N 𝖯`.
pub fn fermionic_parity(n: usize) -> Result<PauliSum> {
    Ok(Majoranas::new(n)?.parity())
}

/// `𝖯 = Z_1 Z_2 ⋯ Z_N`.
pub fn spin_parity(n: usize) -> Result<PauliSum> {
    if n == 0 {
        return PauliSum::identity(0);
    }
    let z = if n >= 64 { u64::MAX } else { (1u64 << n) - 1 };
    Ok(PauliSum::from_term(PauliTerm::from_masks(n, 0, z, 0)?))
}

/// `½(𝟙 + 𝖯)`.
pub fn projector_even(n: usize) -> Result<PauliSum> {
    Ok((&PauliSum::identity(n)? + &spin_parity(n)?).scale(0.5.into()))
}

/// `½(𝟙 − 𝖯)`.
pub fn projector_odd(n: usize) -> Result<PauliSum> {
    Ok((&PauliSum::identity(n)? - &spin_parity(n)?).scale(0.5.into()))
}

/// Checks `{Γ_j, Γ_k} = 2δ_{jk}` for all pairs; the residual is the largest
/// coefficient deviation over all `(2N)²` anticommutators.
pub fn clifford_check(modes: &Majoranas) -> CheckReport {
    let start = Instant::now();
    let n = modes.n_sites();
    let two = PauliSum::identity(n).expect("valid size").scale(2.0.into());
    let mut worst: f64 = 0.0;
    for j in 1..=2 * n {
        for k in 1..=2 * n {
            let ac = modes.get(j).anticommutator(modes.get(k)).expect("same size");
            let dev = if j == k { &ac - &two } else { ac };
            worst = worst.max(dev.max_abs_coefficient());
        }
    }
    CheckReport::new("clifford.anticommutators", "{Γ_j, Γ_k} = 2δ_jk 𝟙", worst, 1e-12)
        .param("N", n as f64)
        .elapsed(start)
}

/// Number of Majorana operators in the monomial that equals the Pauli string
/// `(x, z)` up to phase.
pub fn majorana_degree(x: u64, z: u64, n: usize) -> u32 {
    let mut parity = 0u64;
    let mut degree = 0;
    for site in (0..n).rev() {
        let xb = (x >> site) & 1;
        let zb = (z >> site) & 1;
        let b = zb ^ parity;
        let a = xb ^ b;
        degree += (a + b) as u32;
        parity ^= a ^ b;
    }
    degree
}

/// Largest Majorana degree among the terms of `op`.
pub fn max_majorana_degree(op: &PauliSum) -> u32 {
    op.iter()
        .map(|(t, _)| majorana_degree(t.x_mask(), t.z_mask(), op.n_sites()))
        .max()
        .unwrap_or(0)
}

/// `(i^N)`, the factor relating the two parities: `𝒫 = i^N 𝖯`.
pub fn parity_phase(n: usize) -> num_complex::Complex64 {
    i_pow(n as i64)
}
