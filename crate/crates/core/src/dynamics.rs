//! Classical trajectories, closed-form quantum expectations and the ħ → 0
//! residual scan.
//!
//! Two closed forms are exposed for `⟨R̂_k⟩(t) = A_k(t) M[φ_k(t)] R_{k0}`:
//!
//! * [`ClosedForm::AsPrinted`]: the textbook transcription,
//!   `A_k = exp[−(2S_k/ħ)sin²(ħg_k t/2) − (2S_j/ħ)sin²(ħgt/2)]` and
//!   `φ_k = ω_k t + 2ħg_k t + ħgt/2 + (S_k/2ħ)sin(ħg_k t) + (S_j/2ħ)sin(ħgt)`.
//! * [`ClosedForm::OracleCorrected`]: the resummation of the Fock-basis
//!   state, `A_k = exp[−(S_k/ħ)sin²(ħg_k t) − (S_j/ħ)sin²(ħgt/2)]` and
//!   `φ_k = ω_k t + 2ħg_k t + ħgt/2 + (S_k/2ħ)sin(2ħg_k t) + (S_j/2ħ)sin(ħgt)`.
//!
//! Only the corrected form agrees with the truncated-basis oracle. The two
//! differ in the self-Kerr terms: the printed form carries half the Kerr
//! phase velocity, which is what produces the residual angle `g_k S_k t/2`
//! in the ħ → 0 limit. With the corrected form that limit is the classical
//! trajectory.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{InitialConditions, Mode, ModelParams, PhaseSpacePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosedForm {
    AsPrinted,
    OracleCorrected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub mode: Mode,
    pub q: f64,
    pub p: f64,
    /// Contraction factor; identically 1 for classical points.
    pub amplitude: f64,
    pub phase: f64,
}

impl TrajectoryPoint {
    pub fn point(&self) -> PhaseSpacePoint {
        PhaseSpacePoint::new(self.q, self.p)
    }
}

/// `φ_k^cl(t) = ω_k t + g_k S_k t + g S_j t/2`.
pub fn classical_phase(params: &ModelParams, ics: &InitialConditions, t: f64, mode: Mode) -> f64 {
    let sk = ics.action(mode);
    let sj = ics.action(mode.other());
    (params.omega(mode) + params.kerr(mode) * sk + 0.5 * params.g * sj) * t
}

pub fn classical_trajectory(params: &ModelParams, ics: &InitialConditions, t: f64, mode: Mode) -> TrajectoryPoint {
    let phase = classical_phase(params, ics, t, mode);
    let pt = ics.point(mode).rotate(phase);
    TrajectoryPoint { t, mode, q: pt.q, p: pt.p, amplitude: 1.0, phase }
}

/// `(A_k(t), φ_k(t))` in the requested closed form.
pub fn quantum_amplitude_phase(
    params: &ModelParams,
    ics: &InitialConditions,
    t: f64,
    mode: Mode,
    form: ClosedForm,
) -> (f64, f64) {
    let h = params.hbar;
    let gk = params.kerr(mode);
    let g = params.g;
    let sk = ics.action(mode);
    let sj = ics.action(mode.other());
    let base = params.omega(mode) * t + 2.0 * h * gk * t + 0.5 * h * g * t;
    let coupling_phase = sj / (2.0 * h) * (h * g * t).sin();
    let coupling_sin2 = (0.5 * h * g * t).sin().powi(2);
    match form {
        ClosedForm::AsPrinted => {
            let phase = base + sk / (2.0 * h) * (h * gk * t).sin() + coupling_phase;
            let amp = (-(2.0 * sk / h) * (0.5 * h * gk * t).sin().powi(2) - (2.0 * sj / h) * coupling_sin2).exp();
            (amp, phase)
        }
        ClosedForm::OracleCorrected => {
            let phase = base + sk / (2.0 * h) * (2.0 * h * gk * t).sin() + coupling_phase;
            let amp = (-(sk / h) * (h * gk * t).sin().powi(2) - (sj / h) * coupling_sin2).exp();
            (amp, phase)
        }
    }
}

pub fn quantum_expectation(
    params: &ModelParams,
    ics: &InitialConditions,
    t: f64,
    mode: Mode,
    form: ClosedForm,
) -> TrajectoryPoint {
    let (amplitude, phase) = quantum_amplitude_phase(params, ics, t, mode, form);
    let pt = ics.point(mode).rotate(phase).scale(amplitude);
    TrajectoryPoint { t, mode, q: pt.q, p: pt.p, amplitude, phase }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HbarScanRow {
    pub hbar: f64,
    /// `φ_k^cl − φ_k`, the rotation taking `⟨R̂_k⟩/A_k` back onto `R_k^cl`.
    pub residual_angle: f64,
    /// `|⟨R̂_k⟩ − R_k^cl|`.
    pub residual_norm: f64,
}

/// Residual between the closed-form quantum expectation and the classical
/// trajectory at fixed `(q, p)` initial data for each ħ in `hbar_list`.
pub fn hbar_scan(
    params: &ModelParams,
    ics: &InitialConditions,
    t: f64,
    hbar_list: &[f64],
    mode: Mode,
    form: ClosedForm,
) -> Result<Vec<HbarScanRow>> {
    if hbar_list.is_empty() {
        return Err(Error::domain("hbar list is empty"));
    }
    if let Some(h) = hbar_list.iter().find(|&&h| !(h > 0.0 && h.is_finite())) {
        return Err(Error::domain(format!("hbar must be positive, got {h}")));
    }
    let cl = classical_trajectory(params, ics, t, mode);
    Ok(hbar_list
        .iter()
        .map(|&hbar| {
            let p = params.with_hbar(hbar);
            let qm = quantum_expectation(&p, ics, t, mode, form);
            HbarScanRow { hbar, residual_angle: cl.phase - qm.phase, residual_norm: qm.point().distance(&cl.point()) }
        })
        .collect())
}

/// One CSV row of the trajectory emitter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub classical: TrajectoryPoint,
    pub quantum: TrajectoryPoint,
    pub residual_norm: f64,
}

pub const TRAJECTORY_HEADER: &str = "t,mode,q_cl,p_cl,q_qm,p_qm,A,phi,residual_norm";

impl TrajectoryRow {
    pub fn to_csv(&self) -> String {
        let c = &self.classical;
        let q = &self.quantum;
        format!(
            "{:.12e},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            c.t,
            c.mode.index(),
            c.q,
            c.p,
            q.q,
            q.p,
            q.amplitude,
            q.phase,
            self.residual_norm
        )
    }
}

/// Rows for every `(t, mode)` pair, ordered by `t` then mode.
pub fn trajectory_table(
    params: &ModelParams,
    ics: &InitialConditions,
    times: &[f64],
    form: ClosedForm,
) -> Vec<TrajectoryRow> {
    times
        .par_iter()
        .flat_map_iter(|&t| {
            Mode::BOTH.into_iter().map(move |mode| {
                let classical = classical_trajectory(params, ics, t, mode);
                let quantum = quantum_expectation(params, ics, t, mode, form);
                TrajectoryRow { classical, quantum, residual_norm: quantum.point().distance(&classical.point()) }
            })
        })
        .collect()
}
