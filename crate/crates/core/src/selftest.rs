//! Invariant suite run by the `selftest` command.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{quantum_expectation, ClosedForm};
use crate::entanglement::{linear_entropy_series, reduced_density_closed_form};
use crate::error::{Error, Result};
use crate::fockspace::{evolve, linear_entropy, observables, reduce, DEFAULT_TAIL_EPS};
use crate::model::{InitialConditions, Mode, ModelParams};
use crate::numeric::linspace;
use crate::resolution::{
    bin, coarse_newton_check, commutator_indicator, discrete_inner, gaussian_indicator_reference, gaussian_on_lattice,
    harmonic_ehrenfest, schmidt_at_resolution,
};
use crate::revivals::{cat_coefficients, cat_state_fidelity, parseval_sum, reconstruction_residual};
use crate::wavefunction::{sample, Grid, WavefunctionSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub module: &'static str,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn below(name: &'static str, module: &'static str, value: f64, limit: f64) -> Self {
        Self { name, module, value, limit, passed: value < limit }
    }

    fn above(name: &'static str, module: &'static str, value: f64, limit: f64) -> Self {
        Self { name, module, value, limit, passed: value > limit }
    }
}

pub const SELFTEST_HEADER: &str = "check,module,value,limit,passed";

impl CheckOutcome {
    pub fn to_csv(&self) -> String {
        format!("{},{},{:.6e},{:.6e},{}", self.name, self.module, self.value, self.limit, self.passed)
    }
}

fn kerr_case() -> (ModelParams, InitialConditions) {
    let params = ModelParams { omega1: 1.0, omega2: 1.0, g1: 0.05, g2: 0.05, g: 0.02, hbar: 1.0, mass: 1.0 };
    let ics = InitialConditions::from_amplitudes(Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0), 1.0);
    (params, ics)
}

fn norm_drift() -> Result<CheckOutcome> {
    let (p, i) = kerr_case();
    let base = evolve(&p, &i, 0.0, DEFAULT_TAIL_EPS)?.norm_sqr();
    let worst = linspace(0.0, 20.0, 11)
        .par_iter()
        .map(|&t| evolve(&p, &i, t, DEFAULT_TAIL_EPS).map(|s| (s.norm_sqr() - base).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(CheckOutcome::below("fock_norm_conservation", "fockspace", worst, 1e-12))
}

fn oracle_trajectory() -> Result<CheckOutcome> {
    let (p, i) = kerr_case();
    let worst = linspace(0.0, 20.0, 50)
        .par_iter()
        .map(|&t| {
            let obs = observables(&evolve(&p, &i, t, DEFAULT_TAIL_EPS)?, &p);
            let a = quantum_expectation(&p, &i, t, Mode::One, ClosedForm::OracleCorrected);
            let b = quantum_expectation(&p, &i, t, Mode::Two, ClosedForm::OracleCorrected);
            Ok([a.q - obs[0], a.p - obs[1], b.q - obs[2], b.p - obs[3]].iter().map(|d| d.abs()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(CheckOutcome::below("closed_form_vs_oracle", "dynamics", worst, 1e-6))
}

fn entropy_vs_oracle() -> Result<CheckOutcome> {
    let (p, i) = kerr_case();
    let worst = linspace(0.0, 20.0, 21)
        .par_iter()
        .map(|&t| {
            let series = linear_entropy_series(&p, &i, t, DEFAULT_TAIL_EPS)?;
            let oracle = linear_entropy(&reduce(&evolve(&p, &i, t, DEFAULT_TAIL_EPS)?, Mode::One));
            Ok((series - oracle).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(CheckOutcome::below("entropy_series_vs_oracle", "entanglement", worst, 1e-8))
}

fn density_matrix_validity() -> Result<CheckOutcome> {
    let (p, i) = kerr_case();
    let mut worst = 0.0f64;
    for &t in &[0.5, 7.0, 19.0] {
        for rho in [
            reduced_density_closed_form(&p, &i, t, DEFAULT_TAIL_EPS)?,
            reduce(&evolve(&p, &i, t, DEFAULT_TAIL_EPS)?, Mode::One),
        ] {
            rho.check(DEFAULT_TAIL_EPS)?;
            worst = worst
                .max((rho.trace() - 1.0).abs())
                .max(rho.hermiticity_defect())
                .max((-rho.min_eigenvalue()).max(0.0));
        }
    }
    Ok(CheckOutcome::below("reduced_density_validity", "fockspace", worst, 1e-9))
}

fn cat_fidelity() -> Result<CheckOutcome> {
    let p = ModelParams { g1: 0.05, ..Default::default() };
    let i = InitialConditions::from_amplitudes(Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0), 1.0);
    let worst = [(1, 2), (1, 3), (3, 2)]
        .iter()
        .map(|&(r, s)| cat_state_fidelity(&p, &i, r, s, DEFAULT_TAIL_EPS).map(|f| 1.0 - f))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(CheckOutcome::below("cat_state_infidelity", "revivals", worst, 1e-6))
}

fn cat_coefficients_exact() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for s in 1..=32u64 {
        for r in 1..=2 * s {
            if crate::numeric::gcd(r, s) != 1 {
                continue;
            }
            worst = worst.max((parseval_sum(&cat_coefficients(r, s)?) - 1.0).abs());
            if s <= 8 {
                worst = worst.max(reconstruction_residual(r, s, 100)?);
            }
        }
    }
    Ok(CheckOutcome::below("parseval_and_reconstruction", "revivals", worst, 1e-10))
}

fn cat_wavefunction_norm() -> Result<CheckOutcome> {
    let g = Grid::reference(1.0);
    let worst = [(1.0, 0.2), (3.0, 0.2), (0.0, 0.5), (2.0, 1.5)]
        .iter()
        .map(|&(q, l)| {
            let spec = WavefunctionSpec::cat(q, 1.0, l);
            (crate::wavefunction::SampledWavefunction::from_fn(g, |x| spec.eval(x)).norm_sqr() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    Ok(CheckOutcome::below("cat_wavefunction_norm", "wavefunction", worst, 1e-9))
}

fn binning_conservation() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for &dx in &[0.01, 0.2, 0.5, 3.5] {
        let det = Grid::detectors(14.0, dx)?;
        let fine = det.tiling_with_spacing(0.005)?;
        let psi = sample(&WavefunctionSpec::cat(3.0, 1.0, 0.2), &fine)?;
        worst = worst.max((bin(&psi, &det)?.total() - psi.norm_sqr()).abs());
    }
    Ok(CheckOutcome::below("binning_conserves_probability", "resolution", worst, 1e-12))
}

fn indicator_bounds() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for &r in &[0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let ind = commutator_indicator(&gaussian_on_lattice(1.0, r)?);
        if !(0.0..=1.0 + 1e-12).contains(&ind) {
            return Err(Error::invariant("resolution", format!("indicator {ind} outside [0,1]")));
        }
        worst = worst.max((ind - gaussian_indicator_reference(1.0, r)).abs());
    }
    Ok(CheckOutcome::below("commutator_indicator_reference", "resolution", worst, 1e-10))
}

fn schwartz_bound() -> Result<CheckOutcome> {
    let g = Grid::detectors(16.0, 0.05)?;
    let states: Vec<_> = [
        WavefunctionSpec::cat(3.0, 1.0, 0.2),
        WavefunctionSpec::coherent(2.0, 1.0, -0.5),
        WavefunctionSpec::number(4, 1.0),
        WavefunctionSpec::coherent(-1.0, 0.7, 2.0),
    ]
    .iter()
    .map(|s| sample(s, &g))
    .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for a in &states {
        for b in &states {
            worst = worst.max(discrete_inner(a, b)?.norm());
        }
    }
    Ok(CheckOutcome::below("schwartz_bound", "resolution", worst - 1.0, 1e-12))
}

fn ehrenfest() -> Result<CheckOutcome> {
    let r = harmonic_ehrenfest(2.0, 1.0, 1.0, 1.0, 100, 1e-3)?;
    Ok(CheckOutcome::below("ehrenfest_fine_residual", "resolution", r, 1e-3 * 2.0))
}

fn coarse_newton() -> Result<CheckOutcome> {
    let times = linspace(0.0, 2.0 * std::f64::consts::PI, 65);
    let r = coarse_newton_check(30.0, 1.0, 1.0, 10.0, &times, 0.05)?;
    let offset = if r.resolved == 0 { f64::INFINITY } else { r.max_bin_offset as f64 };
    Ok(CheckOutcome::below("coarse_newton_bin_offset", "resolution", offset, 1.5))
}

fn schmidt_coarse() -> Result<CheckOutcome> {
    let r = schmidt_at_resolution(0.5, 1.0, 10.0)?;
    Ok(CheckOutcome::below("schmidt_defect_coarse", "resolution", r.joint_distribution_defect, 1e-9))
}

fn schmidt_fine() -> Result<CheckOutcome> {
    let r = schmidt_at_resolution(0.5, 1.0, 0.1)?;
    Ok(CheckOutcome::above("schmidt_defect_fine", "resolution", r.joint_distribution_defect, 1e-3))
}

fn classical_limit() -> Result<CheckOutcome> {
    let (p, i) = kerr_case();
    let residuals: Vec<f64> = [1e-2, 1e-3, 1e-4]
        .iter()
        .map(|&h| {
            let q = quantum_expectation(&p.with_hbar(h), &i, 1.0, Mode::One, ClosedForm::OracleCorrected);
            let c = crate::dynamics::classical_trajectory(&p, &i, 1.0, Mode::One);
            q.point().distance(&c.point())
        })
        .collect();
    let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
    let last = if monotone { residuals[2] } else { f64::INFINITY };
    Ok(CheckOutcome::below("corrected_form_classical_limit", "dynamics", last, 1e-2))
}

/// Runs every check; a check that cannot be evaluated counts as failed.
pub fn run_all() -> Vec<CheckOutcome> {
    type Check = (&'static str, &'static str, fn() -> Result<CheckOutcome>);
    let checks: [Check; 15] = [
        ("fock_norm_conservation", "fockspace", norm_drift),
        ("closed_form_vs_oracle", "dynamics", oracle_trajectory),
        ("corrected_form_classical_limit", "dynamics", classical_limit),
        ("entropy_series_vs_oracle", "entanglement", entropy_vs_oracle),
        ("reduced_density_validity", "fockspace", density_matrix_validity),
        ("cat_state_infidelity", "revivals", cat_fidelity),
        ("parseval_and_reconstruction", "revivals", cat_coefficients_exact),
        ("cat_wavefunction_norm", "wavefunction", cat_wavefunction_norm),
        ("binning_conserves_probability", "resolution", binning_conservation),
        ("commutator_indicator_reference", "resolution", indicator_bounds),
        ("schwartz_bound", "resolution", schwartz_bound),
        ("ehrenfest_fine_residual", "resolution", ehrenfest),
        ("coarse_newton_bin_offset", "resolution", coarse_newton),
        ("schmidt_defect_coarse", "resolution", schmidt_coarse),
        ("schmidt_defect_fine", "resolution", schmidt_fine),
    ];
    checks
        .iter()
        .map(|(name, module, f)| {
            f().unwrap_or(CheckOutcome { name, module, value: f64::NAN, limit: f64::NAN, passed: false })
        })
        .collect()
}

/// `Ok` when every check passes, otherwise the first failure as an invariant error.
pub fn verdict(outcomes: &[CheckOutcome]) -> Result<()> {
    match outcomes.iter().find(|o| !o.passed) {
        None => Ok(()),
        Some(o) => Err(Error::Invariant {
            module: o.module,
            msg: format!("{} = {:e} against limit {:e}", o.name, o.value, o.limit),
        }),
    }
}
