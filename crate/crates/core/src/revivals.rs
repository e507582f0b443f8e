//! Fractional revivals of the Kerr mode at `t_{r,s} = (r/s)·π/(g₁ħ)`.
//!
//! At these instants the Kerr phase `exp(−iπn²r/s)` is periodic in `n` with
//! period `l` and expands as `Σ_q a_q exp(−i2πnq/l)`, turning the evolved
//! coherent state into the superposition `Σ_q a_q |z_{1t} e^{−i2πq/l}⟩`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::entanglement::reduced_density_closed_form;
use crate::error::{Error, Result};
use crate::fockspace::{self, poisson_window, purity, DensityMatrix};
use crate::model::{derive_amplitudes, InitialConditions, Mode, ModelParams};
use crate::numeric::{coherent_amplitudes, gcd, poisson_pmf, CompensatedComplex, CompensatedSum};

/// Largest supported denominator.
pub const MAX_DENOMINATOR: u64 = 64;

fn check_fraction(r: u64, s: u64) -> Result<()> {
    if r == 0 || s == 0 {
        return Err(Error::domain(format!("r and s must be positive, got r={r}, s={s}")));
    }
    if gcd(r, s) != 1 {
        return Err(Error::domain(format!("r={r} and s={s} are not coprime")));
    }
    if s > MAX_DENOMINATOR {
        return Err(Error::domain(format!("s={s} exceeds {MAX_DENOMINATOR}")));
    }
    Ok(())
}

pub fn revival_time(r: u64, s: u64, params: &ModelParams) -> Result<f64> {
    check_fraction(r, s)?;
    if params.g1 == 0.0 {
        return Err(Error::domain("revival times need a nonzero Kerr nonlinearity g1"));
    }
    if !(params.hbar > 0.0) {
        return Err(Error::domain("hbar must be positive"));
    }
    Ok(r as f64 / s as f64 * PI / (params.g1 * params.hbar))
}

/// `s` when exactly one of `r, s` is even, `2s` when both are odd.
pub fn component_count(r: u64, s: u64) -> Result<usize> {
    check_fraction(r, s)?;
    Ok(if r % 2 == 1 && s % 2 == 1 { 2 * s as usize } else { s as usize })
}

/// `exp(−iπ k² r/s)` with the exponent reduced modulo 2 in exact arithmetic.
fn kerr_phase(k: u64, r: u64, s: u64) -> Complex64 {
    let residue = ((k as u128 * k as u128 * r as u128) % (2 * s as u128)) as f64;
    Complex64::from_polar(1.0, -PI * residue / s as f64)
}

/// `a_q = (1/l) Σ_k exp[−iπk(kr/s − 2q/l)]` for `q = 0..l`.
pub fn cat_coefficients(r: u64, s: u64) -> Result<Vec<Complex64>> {
    let l = component_count(r, s)? as u64;
    let phases: Vec<Complex64> = (0..l).map(|k| kerr_phase(k, r, s)).collect();
    Ok((0..l)
        .map(|q| {
            let mut acc = CompensatedComplex::new();
            for (k, ph) in phases.iter().enumerate() {
                let shift = ((k as u64 * q) % l) as f64;
                acc.add(ph * Complex64::from_polar(1.0, 2.0 * PI * shift / l as f64));
            }
            acc.value() / l as f64
        })
        .collect())
}

/// `max_n |exp(−iπn²r/s) − Σ_q a_q exp(−i2πnq/l)|` over `n < n_max`.
pub fn reconstruction_residual(r: u64, s: u64, n_max: u64) -> Result<f64> {
    let a = cat_coefficients(r, s)?;
    let l = a.len() as u64;
    let mut worst = 0.0f64;
    for n in 0..n_max {
        let mut acc = CompensatedComplex::new();
        for (q, aq) in a.iter().enumerate() {
            let shift = ((n * q as u64) % l) as f64;
            acc.add(aq * Complex64::from_polar(1.0, -2.0 * PI * shift / l as f64));
        }
        worst = worst.max((kerr_phase(n, r, s) - acc.value()).norm());
    }
    Ok(worst)
}

pub fn parseval_sum(coeffs: &[Complex64]) -> f64 {
    coeffs.iter().map(|a| a.norm_sqr()).collect::<CompensatedSum>().value()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatDecomposition {
    pub r: u64,
    pub s: u64,
    pub l: usize,
    pub coeffs: Vec<Complex64>,
    /// Ring center amplitude `z_{1t_{r,s}}`.
    pub center: Complex64,
}

impl CatDecomposition {
    pub fn new(params: &ModelParams, ics: &InitialConditions, r: u64, s: u64) -> Result<Self> {
        let t = revival_time(r, s, params)?;
        let coeffs = cat_coefficients(r, s)?;
        let z10 = derive_amplitudes(ics, params).z10;
        let center = z10 * Complex64::from_polar(1.0, -params.rotation_rate(Mode::One) * t);
        Ok(Self { r, s, l: coeffs.len(), coeffs, center })
    }

    /// `Σ_q a_q |center·e^{−i2πq/l}⟩` in the first `dim` number states.
    pub fn state_vector(&self, dim: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (q, aq) in self.coeffs.iter().enumerate() {
            let zq = self.center * Complex64::from_polar(1.0, -2.0 * PI * q as f64 / self.l as f64);
            for (o, c) in out.iter_mut().zip(coherent_amplitudes(zq, dim)) {
                *o += aq * c;
            }
        }
        out
    }
}

/// `⟨Ψ|ρ₁|Ψ⟩ / Tr ρ₁` with `ρ₁` the oracle reduction at `t_{r,s}`, for any `g`.
pub fn cat_overlap(params: &ModelParams, ics: &InitialConditions, r: u64, s: u64, eps_tail: f64) -> Result<f64> {
    let cat = CatDecomposition::new(params, ics, r, s)?;
    let t = revival_time(r, s, params)?;
    let st = fockspace::evolve(params, ics, t, eps_tail)?;
    let rho = fockspace::reduce(&st, Mode::One);
    Ok(overlap_with(&rho, &cat))
}

fn overlap_with(rho: &DensityMatrix, cat: &CatDecomposition) -> f64 {
    let psi = cat.state_vector(rho.dim());
    rho.expectation(&psi).re / rho.trace()
}

/// Fidelity of the generalized cat state with the decoupled (`g = 0`) reduction.
pub fn cat_state_fidelity(params: &ModelParams, ics: &InitialConditions, r: u64, s: u64, eps_tail: f64) -> Result<f64> {
    if params.g != 0.0 {
        return Err(Error::domain("cat-state construction holds only for g = 0"));
    }
    cat_overlap(params, ics, r, s, eps_tail)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureReport {
    pub purity: f64,
    /// `Σ_n P(n)²` for `P = Poisson(|z₁₀|²)`.
    pub mixture_purity: f64,
    pub max_offdiag: f64,
}

pub fn mixture_convergence(
    params: &ModelParams,
    ics: &InitialConditions,
    t: f64,
    eps_tail: f64,
) -> Result<MixtureReport> {
    let rho = reduced_density_closed_form(params, ics, t, eps_tail)?;
    Ok(MixtureReport {
        purity: purity(&rho),
        mixture_purity: mixture_purity(params, ics, eps_tail)?,
        max_offdiag: rho.max_offdiag(),
    })
}

pub fn mixture_purity(params: &ModelParams, ics: &InitialConditions, eps_tail: f64) -> Result<f64> {
    let mean = derive_amplitudes(ics, params).z10.norm_sqr();
    let (_, hi) = poisson_window(mean, eps_tail)?;
    Ok(poisson_pmf(mean, hi).iter().map(|p| p * p).collect::<CompensatedSum>().value())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalRow {
    pub r: u64,
    pub s: u64,
    pub l: usize,
    pub fidelity_g0: f64,
    pub fidelity_gon: f64,
    pub purity: f64,
    pub mixture_purity: f64,
}

pub const REVIVAL_HEADER: &str = "r,s,l,fidelity_g0,fidelity_gon,purity,mixture_purity";

impl RevivalRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.r, self.s, self.l, self.fidelity_g0, self.fidelity_gon, self.purity, self.mixture_purity
        )
    }
}

/// Coprime `(r, s)` with `s ≤ s_max` and `r < 2s` (one full Kerr period).
pub fn revival_fractions(s_max: u64) -> Vec<(u64, u64)> {
    (1..=s_max).flat_map(|s| (1..=2 * s).filter(move |&r| gcd(r, s) == 1).map(move |r| (r, s))).collect()
}

pub fn revival_table(
    params: &ModelParams,
    ics: &InitialConditions,
    s_max: u64,
    eps_tail: f64,
) -> Result<Vec<RevivalRow>> {
    let decoupled = ModelParams { g: 0.0, ..*params };
    let mix = mixture_purity(params, ics, eps_tail)?;
    revival_fractions(s_max)
        .par_iter()
        .map(|&(r, s)| {
            let t = revival_time(r, s, params)?;
            Ok(RevivalRow {
                r,
                s,
                l: component_count(r, s)?,
                fidelity_g0: cat_state_fidelity(&decoupled, ics, r, s, eps_tail)?,
                fidelity_gon: cat_overlap(params, ics, r, s, eps_tail)?,
                purity: purity(&reduced_density_closed_form(params, ics, t, eps_tail)?),
                mixture_purity: mix,
            })
        })
        .collect()
}
