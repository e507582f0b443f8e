//! Brute-force oracle: exact evolution of the joint two-mode state in a
//! truncated number basis.
//!
//! Nothing in this module uses a resummed closed form. Every observable,
//! reduced density and purity is obtained by explicit contraction of the
//! coefficient matrix `c_{nm}`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{derive_amplitudes, InitialConditions, Mode, ModelParams};
use crate::numeric::{coherent_amplitudes, poisson_pmf, CompensatedComplex, CompensatedSum};

pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

fn check_tail_args(mean: f64, eps_tail: f64) -> Result<()> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(Error::domain(format!("mean photon number must be finite and >= 0, got {mean}")));
    }
    if !(eps_tail > 0.0 && eps_tail < 1.0) {
        return Err(Error::domain(format!("eps_tail must lie in (0,1), got {eps_tail}")));
    }
    Ok(())
}

/// Upper tail masses `tail[n] = Σ_{k ≥ n} P(k; mean)` accumulated from far
/// above the bulk, so small tails do not suffer cancellation against 1.
fn poisson_upper_tails(mean: f64) -> Vec<f64> {
    let top = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize;
    let pmf = poisson_pmf(mean, top + 1);
    let mut tails = vec![0.0; top + 2];
    let mut acc = CompensatedSum::new();
    for n in (0..=top).rev() {
        acc.add(pmf[n]);
        tails[n] = acc.value();
    }
    tails
}

/// Smallest `N` such that the Poisson mass at indices `>= N` is below `eps_tail`.
pub fn truncation_bound(mean_photon: f64, eps_tail: f64) -> Result<usize> {
    check_tail_args(mean_photon, eps_tail)?;
    let tails = poisson_upper_tails(mean_photon);
    // tails is nonincreasing and ends with 0.0, so a cut always exists
    Ok(tails.iter().position(|&t| t < eps_tail).unwrap_or(tails.len()).max(1))
}

/// Index window `[lo, hi)` outside of which the Poisson mass is below
/// `eps_tail` (split evenly between the two tails).
pub fn poisson_window(mean_photon: f64, eps_tail: f64) -> Result<(usize, usize)> {
    check_tail_args(mean_photon, eps_tail)?;
    let hi = truncation_bound(mean_photon, 0.5 * eps_tail)?;
    let pmf = poisson_pmf(mean_photon, hi);
    let mut acc = CompensatedSum::new();
    let mut lo = 0;
    for (n, p) in pmf.iter().enumerate() {
        acc.add(*p);
        if acc.value() >= 0.5 * eps_tail {
            lo = n;
            break;
        }
    }
    Ok((lo, hi))
}

/// Truncated two-mode state `Σ c_{nm} |n⟩|m⟩`, row-major in `n`.
#[derive(Debug, Clone)]
pub struct JointFockState {
    n1: usize,
    n2: usize,
    coeffs: Vec<Complex64>,
    pub t: f64,
    pub eps_tail: f64,
}

impl JointFockState {
    pub fn from_coeffs(n1: usize, n2: usize, coeffs: Vec<Complex64>, t: f64, eps_tail: f64) -> Result<Self> {
        if n1 == 0 || n2 == 0 || coeffs.len() != n1 * n2 {
            return Err(Error::domain(format!(
                "coefficient matrix must be {n1}x{n2} (nonempty), got {} entries",
                coeffs.len()
            )));
        }
        Ok(Self { n1, n2, coeffs, t, eps_tail })
    }

    /// Product of two single-mode number-basis states.
    pub fn product(a: &[Complex64], b: &[Complex64], eps_tail: f64) -> Result<Self> {
        let coeffs = a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect();
        Self::from_coeffs(a.len(), b.len(), coeffs, 0.0, eps_tail)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n1, self.n2)
    }

    #[inline]
    pub fn coeff(&self, n: usize, m: usize) -> Complex64 {
        self.coeffs[n * self.n2 + m]
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect::<CompensatedSum>().value()
    }

    /// `(n, m, |c_{nm}|²)` triples in row-major order.
    pub fn probabilities(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(idx, c)| (idx / self.n2, idx % self.n2, c.norm_sqr()))
    }

    /// `⟨â_k⟩` by the `c*_{nm} c_{n+1,m} √(n+1)` contraction.
    pub fn lowering_expectation(&self, mode: Mode) -> Complex64 {
        let mut acc = CompensatedComplex::new();
        match mode {
            Mode::One => {
                for n in 0..self.n1.saturating_sub(1) {
                    let s = ((n + 1) as f64).sqrt();
                    for m in 0..self.n2 {
                        acc.add(self.coeff(n, m).conj() * self.coeff(n + 1, m) * s);
                    }
                }
            }
            Mode::Two => {
                for n in 0..self.n1 {
                    for m in 0..self.n2.saturating_sub(1) {
                        let s = ((m + 1) as f64).sqrt();
                        acc.add(self.coeff(n, m).conj() * self.coeff(n, m + 1) * s);
                    }
                }
            }
        }
        acc.value()
    }
}

/// Energy `E_{nm}/ħ` with the `n,m`-independent zero-point constant removed.
fn reduced_energy(params: &ModelParams, n: usize, m: usize) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    let h = params.hbar;
    params.omega1 * nf
        + params.omega2 * mf
        + h * params.g1 * (nf * nf + nf)
        + h * params.g2 * (mf * mf + mf)
        + h * params.g * (nf * mf + 0.5 * nf + 0.5 * mf)
}

/// Evolves the product coherent state `|z₁₀⟩|z₂₀⟩` to time `t`.
///
/// `c_{nm}(t) = c_{nm}(0) exp(−i E_{nm} t/ħ)` up to a global phase.
pub fn evolve(params: &ModelParams, ics: &InitialConditions, t: f64, eps_tail: f64) -> Result<JointFockState> {
    params.validate()?;
    let amps = derive_amplitudes(ics, params);
    let n1 = truncation_bound(amps.z10.norm_sqr(), eps_tail)?;
    let n2 = truncation_bound(amps.z20.norm_sqr(), eps_tail)?;
    let a = coherent_amplitudes(amps.z10, n1);
    let b = coherent_amplitudes(amps.z20, n2);
    let mut coeffs = Vec::with_capacity(n1 * n2);
    for (n, an) in a.iter().enumerate() {
        for (m, bm) in b.iter().enumerate() {
            let phase = -reduced_energy(params, n, m) * t;
            coeffs.push(an * bm * Complex64::from_polar(1.0, phase));
        }
    }
    JointFockState::from_coeffs(n1, n2, coeffs, t, eps_tail)
}

/// Phase-space expectations `(⟨q̂₁⟩, ⟨p̂₁⟩, ⟨q̂₂⟩, ⟨p̂₂⟩)`.
pub fn observables(state: &JointFockState, params: &ModelParams) -> [f64; 4] {
    let s = (2.0 * params.hbar).sqrt();
    let a1 = state.lowering_expectation(Mode::One);
    let a2 = state.lowering_expectation(Mode::Two);
    [s * a1.re, s * a1.im, s * a2.re, s * a2.im]
}

/// Reduced density matrix in a number basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::domain("density matrix must be square"));
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, n: usize, np: usize) -> Complex64 {
        self.entries[(n, np)]
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|n| self.entries[(n, n)].re).collect::<CompensatedSum>().value()
    }

    /// Largest `|ρ_{nn'} − conj(ρ_{n'n})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest off-diagonal modulus.
    pub fn max_offdiag(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// `⟨ψ|ρ|ψ⟩` for a number-basis vector, zero-padded to the common size.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let d = self.dim().min(psi.len());
        let mut acc = CompensatedComplex::new();
        for i in 0..d {
            for j in 0..d {
                acc.add(psi[i].conj() * self.entries[(i, j)] * psi[j]);
            }
        }
        acc.value()
    }

    /// Checks Hermiticity, trace window and positivity against tolerances.
    pub fn check(&self, eps_tail: f64) -> Result<()> {
        let h = self.hermiticity_defect();
        if h > 1e-12 {
            return Err(Error::invariant("fockspace", format!("density matrix not Hermitian (defect {h:e})")));
        }
        let tr = self.trace();
        if !(tr >= 1.0 - eps_tail - 1e-12 && tr <= 1.0 + 1e-12) {
            return Err(Error::invariant("fockspace", format!("trace {tr} outside [1-eps_tail, 1]")));
        }
        let ev = self.min_eigenvalue();
        if ev < -1e-10 {
            return Err(Error::invariant("fockspace", format!("negative eigenvalue {ev:e}")));
        }
        Ok(())
    }
}

/// Partial trace over the other mode.
pub fn reduce(state: &JointFockState, mode: Mode) -> DensityMatrix {
    let (n1, n2) = state.dims();
    let entries = match mode {
        Mode::One => DMatrix::from_fn(n1, n1, |n, np| {
            let mut acc = CompensatedComplex::new();
            for m in 0..n2 {
                acc.add(state.coeff(n, m) * state.coeff(np, m).conj());
            }
            acc.value()
        }),
        Mode::Two => DMatrix::from_fn(n2, n2, |m, mp| {
            let mut acc = CompensatedComplex::new();
            for n in 0..n1 {
                acc.add(state.coeff(n, m) * state.coeff(n, mp).conj());
            }
            acc.value()
        }),
    };
    DensityMatrix { entries }
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.entries.iter().map(|z| z.norm_sqr()).collect::<CompensatedSum>().value()
}

/// `1 − Tr ρ²`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    1.0 - purity(rho)
}
