//! Named verification suites, run configuration and parameter scans.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charges::{
    charge_identities, charge_suite, charge_table, hamiltonian_from_transfer_check, onsager_from_transfer, onsager_suite,
    scalar_profile_check, ChargeRow,
};
use crate::circuits::{
    floquet, majorana_layer_a, majorana_layer_b, phase, trotter_error, v_first_order, v_majorana, v_majorana_spin, Sign,
    TrotterScheme,
};
use crate::duality::{
    algebra_suite_with, continuous_suite, duality_on_generic_circuit_with, floquet_duality_suite, half_translation_residuals,
    kw_from_transfer, kw_trotterized_with, table_one_with, twisted_translation_from, twisted_translation_table_residual,
    DualityDefect,
};
use crate::error::{Error, Result};
use crate::fermion::{clifford_check, parity_phase, spin_parity, Majoranas};
use crate::lax::{
    calibrate_trace_convention, expected_calibration, monodromy_expansion_residual, r_check_unitarity, rtt_check, transfer,
    transfer_b, transfer_commute_check, ybe_check, Inhomogeneity, ModeRep,
};
use crate::linalg::{relative_residual, unitarity_residual, DenseOperator};
use crate::report::{check, CheckReport};

const TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Clifford,
    Ybe,
    Rtt,
    Transfer,
    Circuits,
    Duality,
    Algebra,
    Floquet,
    Charges,
    Onsager,
}

impl Suite {
    pub fn all() -> [Suite; 10] {
        use Suite::*;
        [Clifford, Ybe, Rtt, Transfer, Circuits, Duality, Algebra, Floquet, Charges, Onsager]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Clifford => "clifford",
            Suite::Ybe => "ybe",
            Suite::Rtt => "rtt",
            Suite::Transfer => "transfer",
            Suite::Circuits => "circuits",
            Suite::Duality => "duality",
            Suite::Algebra => "algebra",
            Suite::Floquet => "floquet",
            Suite::Charges => "charges",
            Suite::Onsager => "onsager",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::all()
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite '{s}'")))
    }
}

/// Deliberate defects that the checks must catch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutation {
    /// Flip the sign of `Ω` in the `X_jX_{j+1}` layer of `𝔇₊`.
    #[serde(default)]
    pub dplus_sign: bool,
    /// Replace `Γ_j` by `iΓ_j` in the Majorana set.
    #[serde(default)]
    pub jw_phase: Option<usize>,
}

impl Mutation {
    pub fn none() -> Self {
        Mutation::default()
    }

    /// Both defects, with the phase on `Γ_3`.
    pub fn all() -> Self {
        Mutation { dplus_sign: true, jw_phase: Some(3) }
    }

    pub fn is_active(&self) -> bool {
        self.dplus_sign || self.jw_phase.is_some()
    }

    pub fn defect(&self) -> DualityDefect {
        DualityDefect { flip_plus_sign: self.dplus_sign }
    }

    pub fn majoranas(&self, n: usize) -> Result<Majoranas> {
        match self.jw_phase {
            Some(j) => Majoranas::with_phase_defect(n, j.min(2 * n)),
            None => Majoranas::new(n),
        }
    }
}

impl FromStr for Mutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Mutation::none()),
            "dplus-sign" => Ok(Mutation { dplus_sign: true, jw_phase: None }),
            "jw-phase" => Ok(Mutation { dplus_sign: false, jw_phase: Some(3) }),
            "all" => Ok(Mutation::all()),
            other => Err(Error::Config(format!("unknown mutation '{other}' (none, dplus-sign, jw-phase, all)"))),
        }
    }
}

/// Parameters for a verification run. Every field has a default, so a TOML
/// file only needs the keys it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_sites: usize,
    /// Staggering `ω`; circuits use `Ω = tanh ω`.
    pub omega: Vec<f64>,
    pub floquet_t: Vec<f64>,
    pub h: Vec<f64>,
    pub j: Vec<f64>,
    /// Coupling grid for the duality relations on non-critical circuits.
    pub couplings: Vec<f64>,
    /// Replaces every nonzero tolerance at or below `1e-6`; exact checks and
    /// scaling windows keep their own bounds.
    pub tolerance: Option<f64>,
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub mutation: Mutation,
    pub ybe_samples: usize,
    pub random_inhomogeneities: usize,
    pub onsager_omega: f64,
    pub onsager_depth: i32,
    pub trotter_time: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_sites: 3,
            omega: vec![0.1, 0.3],
            floquet_t: vec![0.1, 0.2, 0.4, FRAC_PI_4 - 0.01],
            h: vec![0.5, 0.7, 2.0],
            j: vec![0.5, 0.7, 2.0],
            couplings: vec![0.3, 0.7, 1.0, 1.5, 2.0],
            tolerance: None,
            suites: Suite::all().to_vec(),
            seed: 7,
            mutation: Mutation::none(),
            ybe_samples: 100,
            random_inhomogeneities: 3,
            onsager_omega: 0.2,
            onsager_depth: 4,
            trotter_time: 1.0,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=6).contains(&self.n_sites) {
            return Err(Error::Config(format!("n_sites = {} outside 2..=6", self.n_sites)));
        }
        for (name, grid) in [
            ("omega", &self.omega),
            ("floquet_t", &self.floquet_t),
            ("h", &self.h),
            ("j", &self.j),
            ("couplings", &self.couplings),
        ] {
            if grid.is_empty() {
                return Err(Error::Config(format!("{name} grid is empty")));
            }
            if grid.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("{name} grid has a non-finite value")));
            }
        }
        if let Some(w) = self.omega.iter().find(|w| w.abs() > 0.5) {
            return Err(Error::Config(format!("|ω| = {} exceeds 0.5", w.abs())));
        }
        if self.suites.is_empty() {
            return Err(Error::Config("no suites selected".into()));
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::Config(format!("tolerance {t} must be positive")));
            }
        }
        if let Some(j) = self.mutation.jw_phase {
            if j == 0 || j > 2 * self.n_sites {
                return Err(Error::Config(format!("jw_phase index {j} outside 1..={}", 2 * self.n_sites)));
            }
        }
        Ok(())
    }
}

/// All checks from one run, sorted by id.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: RunConfig,
    pub total: usize,
    pub failed: usize,
    pub all_pass: bool,
    pub checks: Vec<CheckReport>,
}

impl VerifyReport {
    pub fn failing_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
        ids.dedup();
        ids
    }
}

/// Runs the selected suites in parallel and assembles a deterministic report.
pub fn verify(cfg: &RunConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    let mut checks: Vec<CheckReport> = suites.par_iter().map(|s| run_suite(*s, cfg)).collect::<Vec<_>>().concat();
    if let Some(t) = cfg.tolerance {
        for c in &mut checks {
            if c.tolerance > 0.0 && c.tolerance <= 1e-6 {
                c.tolerance = t;
                c.pass = c.residual <= t;
            }
        }
    }
    checks.sort_by(|a, b| a.id.cmp(&b.id));
    let failed = checks.iter().filter(|c| !c.pass).count();
    Ok(VerifyReport { config: cfg.clone(), total: checks.len(), failed, all_pass: failed == 0, checks })
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Vec<CheckReport> {
    let n = cfg.n_sites;
    match suite {
        Suite::Clifford => clifford_suite(n, cfg.mutation),
        Suite::Ybe => ybe_suite(cfg.ybe_samples, cfg.seed),
        Suite::Rtt => rtt_suite(n, &cfg.omega, cfg.random_inhomogeneities, cfg.seed),
        Suite::Transfer => cfg.omega.iter().flat_map(|&w| transfer_suite(w, n, cfg.mutation)).chain(calibration_suite(n)).collect(),
        Suite::Circuits => circuits_suite(n, &cfg.omega, &cfg.floquet_t, cfg.trotter_time, cfg.mutation),
        Suite::Duality => {
            let mut out = continuous_suite(n);
            for &w in &cfg.omega {
                out.extend(table_one_with(w.tanh(), n, cfg.mutation.defect()));
                for &g in &cfg.couplings {
                    for s in Sign::both() {
                        out.push(duality_on_generic_circuit_with(w.tanh(), s, g, n, cfg.mutation.defect()));
                    }
                }
            }
            out
        }
        Suite::Algebra => {
            let mut out = Vec::new();
            for &w in &cfg.omega {
                out.extend(algebra_suite_with(w.tanh(), n, cfg.mutation.defect()));
                out.extend(rank_checks(w.tanh(), n, cfg.mutation.defect()));
            }
            // Ω = 0 reduces to the algebra of D
            out.extend(algebra_suite_with(0.0, n, cfg.mutation.defect()));
            out.extend(rank_checks(0.0, n, cfg.mutation.defect()));
            out
        }
        Suite::Floquet => {
            let mut out = Vec::new();
            for &t in &cfg.floquet_t {
                for &h in &cfg.h {
                    for &j in &cfg.j {
                        out.extend(floquet_duality_suite(t, h, j, n));
                    }
                }
            }
            out
        }
        Suite::Charges => {
            let cn = n.min(5);
            let mut out = charge_identities(cn);
            out.push(hamiltonian_from_transfer_check(cn));
            for &w in &cfg.omega {
                out.extend(charge_suite(w, cn));
            }
            if cfg.omega.len() >= 2 {
                for r in [1, 2] {
                    for s in Sign::both() {
                        out.push(scalar_profile_check(r, s, &cfg.omega, cn));
                    }
                }
            }
            out
        }
        Suite::Onsager => {
            let mut out = onsager_suite(n.min(5), cfg.onsager_depth);
            match onsager_from_transfer(cfg.onsager_omega, n.min(5)) {
                Ok(ex) => out.extend(ex.reports),
                Err(e) => out.push(CheckReport::failed("onsager.extract", "A_0, A_1 from transfer matrices", 1e-8, e.to_string())),
            }
            out
        }
    }
}

/// Clifford relations and the parity product for the (possibly mutated) modes.
pub fn clifford_suite(n: usize, mutation: Mutation) -> Vec<CheckReport> {
    let m = match mutation.majoranas(n) {
        Ok(m) => m,
        Err(e) => return vec![CheckReport::failed("clifford.construct", "Γ_j", 0.0, e.to_string())],
    };
    let mut out = vec![clifford_check(&m)];
    out.push(
        check("clifford.parity_product", "Γ_1Γ_2⋯Γ_{2N} = i^N 𝖯", 1e-12, || {
            Ok(m.parity().distance(&spin_parity(n)?.scale(parity_phase(n)))?)
        })
        .param("N", n as f64),
    );
    out.push(
        check("clifford.mode_rep", "{γ_u, γ_v} = 2δ_uv with the auxiliary qubit", 1e-12, || {
            Ok(ModeRep::from_majoranas(&m)?.anticommutation_residual())
        })
        .param("N", n as f64),
    );
    out
}

/// Yang–Baxter over `samples` random `(λ, μ) ∈ [−1, 1]²`, reported as the worst sample.
pub fn ybe_suite(samples: usize, seed: u64) -> Vec<CheckReport> {
    let rep = match ModeRep::new(1) {
        Ok(r) => r,
        Err(e) => return vec![CheckReport::failed("ybe.construct", "modes (a, 1, 2)", 1e-12, e.to_string())],
    };
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = CheckReport::new("ybe.three_modes", "", 0.0, 1e-12);
    let mut unitary = CheckReport::new("r.unitarity", "", 0.0, 1e-12);
    for _ in 0..samples.max(1) {
        let l = rng.gen_range(-1.0..=1.0);
        let m = rng.gen_range(-1.0..=1.0);
        let r = ybe_check(l, m, &rep);
        if !(r.residual <= worst.residual) || worst.anchor.is_empty() {
            worst = r;
        }
        let u = r_check_unitarity(l, &rep);
        if !(u.residual <= unitary.residual) || unitary.anchor.is_empty() {
            unitary = u;
        }
    }
    vec![
        worst.param("samples", samples as f64).param("seed", seed as f64).elapsed(start),
        unitary.param("samples", samples as f64),
    ]
}

/// RTT, transfer commutativity, the auxiliary-mode choice and the monodromy
/// structure for staggered and random inhomogeneities.
pub fn rtt_suite(n: usize, omegas: &[f64], random: usize, seed: u64) -> Vec<CheckReport> {
    let rep = match ModeRep::new(n) {
        Ok(r) => r,
        Err(e) => return vec![CheckReport::failed("rtt.construct", "modes", 1e-10, e.to_string())],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut etas: Vec<(String, Inhomogeneity)> =
        omegas.iter().map(|&w| (format!("staggered {w}"), Inhomogeneity::staggered(w, n))).collect();
    for k in 0..random {
        etas.push((format!("random #{k}"), Inhomogeneity::random(n, 0.5, &mut rng)));
    }
    let pairs = [(0.3, -0.2), (0.7, 0.1), (-0.45, 0.55)];
    let mut out = Vec::new();
    for (label, eta) in &etas {
        for &(l, m) in &pairs {
            out.push(rtt_check(l, m, eta, &rep).note(label.clone()));
            out.push(transfer_commute_check(l, m, eta, &rep).note(label.clone()));
        }
        out.push(
            check("transfer.aux_choice", "tr_a T_a(λ) = tr_b T_b(λ)", TOL, || {
                Ok(relative_residual(&transfer(0.37, eta, &rep)?, &transfer_b(0.37, eta, &rep)?))
            })
            .note(label.clone()),
        );
        out.push(
            check("transfer.monodromy_structure", "T_a(λ) has only 𝟙 and Y auxiliary components", TOL, || {
                monodromy_expansion_residual(0.37, eta, &rep)
            })
            .note(label.clone()),
        );
    }
    for r in &mut out {
        r.params.insert("N".into(), n as f64);
    }
    out
}

fn calibration_suite(n: usize) -> Vec<CheckReport> {
    vec![check("transfer.calibration", "τ(0|0) = (−1)^{N+1}√2 U", 1e-12, || {
        let c = calibrate_trace_convention(n)?;
        Ok((c - expected_calibration(n)).norm())
    })
    .param("N", n as f64)]
}

/// Identities tying the staggered transfer matrix to the trotterized circuit,
/// the twisted translation and the duality operators, at `Ω = tanh ω`.
pub fn transfer_suite(omega: f64, n: usize, mutation: Mutation) -> Vec<CheckReport> {
    let built = (|| -> Result<_> {
        let m = mutation.majoranas(n)?;
        let rep = ModeRep::new(n)?;
        let eta = Inhomogeneity::staggered(omega, n);
        let tp = transfer(omega / 2.0, &eta, &rep)?;
        let tm = transfer(-omega / 2.0, &eta, &rep)?;
        let u = twisted_translation_from(&m)?.to_dense()?;
        Ok((m, tp, tm, u))
    })();
    let (m, tp, tm, u) = match built {
        Ok(x) => x,
        Err(e) => return vec![CheckReport::failed("transfer.construct", "τ(±ω/2|ω)", TOL, e.to_string())],
    };
    let big = omega.tanh();
    let c = expected_calibration(n);
    let cu = u.scale(c);
    let mut out = vec![
        check("transfer.plus_is_layer_b", "τ(ω/2|ω) = c U ∏(𝟙 ± ΩΓ_{2j}Γ_{2j+1})/(1+iΩ)", TOL, || {
            Ok(relative_residual(&tp, &cu.mat_mul(&majorana_layer_b(big, &m)?.to_dense()?)?))
        }),
        check("transfer.minus_is_layer_a", "τ(−ω/2|ω) = c U ∏(𝟙 − ΩΓ_{2j−1}Γ_{2j})/(1−iΩ)", TOL, || {
            Ok(relative_residual(&tm, &cu.mat_mul(&majorana_layer_a(-big, &m)?.to_dense()?)?))
        }),
        check("transfer.circuit", "𝒱(Ω) = τ(−ω/2|ω)⁻¹ τ(ω/2|ω)", TOL, || {
            let lhs = tm.inverse()?.mat_mul(&tp)?;
            Ok(relative_residual(&v_majorana(big, &m)?, &lhs))
        }),
        check("transfer.u_squared", "U² = τ(ω/2|ω) τ(−ω/2|ω) / c²", TOL, || {
            Ok(relative_residual(&u.mat_mul(&u)?, &tp.mat_mul(&tm)?.scale(c.powi(-2))))
        }),
        check("transfer.twisted_translation_table", "UΓ_jU⁻¹ = Γ_{j+1}, UΓ_{2N}U⁻¹ = −Γ_1", 1e-12, || {
            twisted_translation_table_residual(&m)
        }),
        check("transfer.u_unitary", "U†U = 𝟙", TOL, || Ok(unitarity_residual(&u))),
    ];
    for s in Sign::both() {
        out.push(check(
            &format!("transfer.duality_{}", s.as_str()),
            "𝔇±(Ω) = κ_N c⁻¹ ½τ(±ω/2|ω)(𝟙+𝖯)",
            TOL,
            || {
                let a = kw_trotterized_with(big, s, n, mutation.defect())?.matrix;
                Ok(relative_residual(&a, &kw_from_transfer(big, s, n)?))
            },
        ));
    }
    if let Ok((op, adj)) = half_translation_residuals(n) {
        out.push(CheckReport::new("transfer.u_squared_translation", "½(𝟙+𝖯)U² = (−i)^N ½(𝟙+𝖯)T", op, TOL));
        out.push(CheckReport::new("transfer.u_squared_translation_adjoint", "U² and T act alike on the even sector", adj, TOL));
    }
    for r in &mut out {
        r.params.insert("N".into(), n as f64);
        r.params.insert("omega".into(), omega);
    }
    out
}

fn rank_checks(big: f64, n: usize, defect: DualityDefect) -> Vec<CheckReport> {
    let expected = (1usize << (n - 1)) as f64;
    Sign::both()
        .into_iter()
        .map(|s| {
            check(&format!("algebra.rank_{}", s.as_str()), "rank 𝔇±(Ω) = 2^{N−1}", 0.0, || {
                Ok((kw_trotterized_with(big, s, n, defect)?.rank() as f64 - expected).abs())
            })
            .param("N", n as f64)
            .param("Omega", big)
        })
        .collect()
}

/// `V^F(t;1,1) = e^{2iNt} V(tan t)`.
pub fn floquet_phase_link(t: f64, n: usize) -> Result<f64> {
    let vf = floquet(t, 1.0, 1.0, n)?;
    let v = v_first_order(t.tan(), 1.0, 1.0, n)?.scale(phase(2.0 * n as f64 * t));
    Ok(relative_residual(&vf, &v))
}

/// `e(n)/e(2n)` for one scheme at `h = J = 1`.
pub fn trotter_ratio(t: f64, steps: u32, scheme: TrotterScheme, n: usize) -> Result<f64> {
    Ok(trotter_error(t, steps, 1.0, 1.0, scheme, n)? / trotter_error(t, 2 * steps, 1.0, 1.0, scheme, n)?)
}

/// Circuit-level identities: Majorana versus spin form, the projection
/// identity, parity conservation, the Floquet phase link and Trotter scaling.
pub fn circuits_suite(n: usize, omegas: &[f64], ts: &[f64], trotter_time: f64, mutation: Mutation) -> Vec<CheckReport> {
    let mut out = Vec::new();
    let m = match mutation.majoranas(n) {
        Ok(m) => m,
        Err(e) => return vec![CheckReport::failed("circuits.construct", "Γ_j", TOL, e.to_string())],
    };
    let setup = (|| -> Result<(DenseOperator, DenseOperator)> {
        let p = spin_parity(n)?.to_dense()?;
        Ok((DenseOperator::identity(n)?.mat_add(&p)?, p))
    })();
    let (one_plus_p, p) = match setup {
        Ok(x) => x,
        Err(e) => return vec![CheckReport::failed("circuits.construct", "𝖯", TOL, e.to_string())],
    };
    for &w in omegas {
        let big = w.tanh();
        let tag = |r: CheckReport| r.param("N", n as f64).param("Omega", big);
        out.push(tag(check("circuits.majorana_spin_form", "𝒱(Ω) = V_A(Ω) ∏(𝟙+iΩX_jX_{j+1})/(1+iΩ) with X_NX_1 → 𝖯X_NX_1", TOL, || {
            Ok(relative_residual(&v_majorana(big, &m)?, &v_majorana_spin(big, n)?))
        })));
        out.push(tag(check("circuits.projection", "𝒱(Ω)(𝟙+𝖯) = V(Ω)(𝟙+𝖯)", TOL, || {
            let lhs = v_majorana(big, &m)?.mat_mul(&one_plus_p)?;
            let rhs = v_first_order(big, 1.0, 1.0, n)?.mat_mul(&one_plus_p)?;
            Ok(relative_residual(&lhs, &rhs))
        })));
        out.push(tag(check("circuits.parity", "[V(Ω), 𝖯] = 0", TOL, || {
            let v = v_first_order(big, 1.0, 1.0, n)?;
            Ok(relative_residual(&v.mat_mul(&p)?, &p.mat_mul(&v)?))
        })));
        out.push(tag(check("circuits.unitary", "V(Ω)†V(Ω) = 𝟙", TOL, || Ok(unitarity_residual(&v_first_order(big, 1.0, 1.0, n)?)))));
    }
    for &t in ts {
        out.push(
            check("circuits.floquet_phase_link", "V^F(t;1,1) = e^{2iNt} V(tan t)", TOL, || floquet_phase_link(t, n))
                .param("N", n as f64)
                .param("t", t),
        );
    }
    let windows = [
        (TrotterScheme::FirstOrder, 2.0, 0.2),
        (TrotterScheme::RationalFirstOrder, 2.0, 0.2),
        (TrotterScheme::SecondOrderMinus, 4.0, 0.4),
        (TrotterScheme::SecondOrderPlus, 4.0, 0.4),
    ];
    for (scheme, target, half_width) in windows {
        let mut ratio = f64::NAN;
        let r = check(
            &format!("circuits.trotter_ratio_{}", scheme.as_str()),
            "e(n)/e(2n) ≈ 2^order for the splitting error",
            half_width,
            || {
                ratio = trotter_ratio(trotter_time, 16, scheme, n)?;
                Ok((ratio - target).abs())
            },
        );
        out.push(r.param("N", n as f64).param("t", trotter_time).param("steps", 16.0).param("ratio", ratio));
    }
    out
}

/// One CSV row of a scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n_sites: usize,
    pub quantity: String,
    pub param: String,
    pub value: f64,
    pub steps: u32,
    pub metric: f64,
    pub flag: String,
}

impl ScanRow {
    pub const HEADER: &'static str = "N,quantity,param,value,n,metric,flag";

    pub fn to_csv(&self) -> String {
        format!("{},{},{},{},{},{:e},{}", self.n_sites, self.quantity, self.param, self.value, self.steps, self.metric, self.flag)
    }
}

/// Trotter-error scaling for every scheme, and a sweep of the Floquet phase
/// link across `t ∈ [0, π/4]` plus points just outside the window.
///
/// Inside the window the transfer-route duality operator at `ω = artanh(tan t)`
/// is also compared; outside it that construction is skipped and flagged.
pub fn scan(cfg: &RunConfig) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    let n = cfg.n_sites;
    let mut rows = Vec::new();
    let steps_grid = [4u32, 8, 16, 32, 64];
    let trotter: Vec<Result<Vec<ScanRow>>> = TrotterScheme::all()
        .par_iter()
        .map(|&scheme| {
            steps_grid
                .iter()
                .map(|&s| {
                    Ok(ScanRow {
                        n_sites: n,
                        quantity: format!("trotter_error/{}", scheme.as_str()),
                        param: "t".into(),
                        value: cfg.trotter_time,
                        steps: s,
                        metric: trotter_error(cfg.trotter_time, s, 1.0, 1.0, scheme, n)?,
                        flag: String::new(),
                    })
                })
                .collect()
        })
        .collect();
    for r in trotter {
        rows.extend(r?);
    }
    let mut ts: Vec<f64> = (0..=16).map(|k| FRAC_PI_4 * k as f64 / 16.0).collect();
    ts.extend(cfg.floquet_t.iter().copied());
    ts.extend([FRAC_PI_4 + 0.01, FRAC_PI_4 + 0.05]);
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    for t in ts {
        let inside = t.abs() <= FRAC_PI_4;
        let flag = if inside { "" } else { "outside_window" };
        rows.push(ScanRow {
            n_sites: n,
            quantity: "floquet_phase_link".into(),
            param: "t".into(),
            value: t,
            steps: 1,
            metric: floquet_phase_link(t, n)?,
            flag: flag.into(),
        });
        // tan t = 1 sends ω to infinity
        let metric = if inside && t.tan().abs() < 1.0 - 1e-9 {
            let big = t.tan();
            let a = kw_trotterized_with(big, Sign::Minus, n, DualityDefect::default())?.matrix;
            relative_residual(&a, &kw_from_transfer(big, Sign::Minus, n)?)
        } else {
            f64::NAN
        };
        rows.push(ScanRow {
            n_sites: n,
            quantity: "duality_transfer_route".into(),
            param: "t".into(),
            value: t,
            steps: 1,
            metric,
            flag: match (metric.is_nan(), inside) {
                (false, _) => String::new(),
                (true, true) => "skipped_singular".into(),
                (true, false) => "skipped_outside_window".into(),
            },
        });
    }
    Ok(rows)
}

/// Charge table over `ω = 0` and the configured grid.
pub fn charges_report(cfg: &RunConfig) -> Result<Vec<ChargeRow>> {
    cfg.validate()?;
    let mut omegas = vec![0.0];
    omegas.extend(cfg.omega.iter().copied().filter(|w| *w != 0.0));
    let n = cfg.n_sites.min(5);
    let tables: Vec<Result<Vec<ChargeRow>>> = omegas.par_iter().map(|&w| charge_table(w, n)).collect();
    let mut rows = Vec::new();
    for t in tables {
        rows.extend(t?);
    }
    Ok(rows)
}
