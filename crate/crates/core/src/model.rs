//! Model parameters and initial-condition algebra for the two-mode Kerr system
//!
//! ```text
//! H = ω₁h₁ + g₁h₁² + ω₂h₂ + g₂h₂² + g h₁h₂,    h_k = ħ(n_k + ½)
//! ```
//!
//! The canonical pair `(q, p)` carries units of action^{1/2}; the usual
//! position/momentum pair is recovered with [`canonical_transform`] and its
//! inverse.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Oscillator mode label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    One,
    Two,
}

impl Mode {
    pub fn other(self) -> Mode {
        match self {
            Mode::One => Mode::Two,
            Mode::Two => Mode::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Mode::One => 1,
            Mode::Two => 2,
        }
    }

    pub fn from_index(k: usize) -> Result<Mode> {
        match k {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            _ => Err(Error::domain(format!("mode index must be 1 or 2, got {k}"))),
        }
    }

    pub const BOTH: [Mode; 2] = [Mode::One, Mode::Two];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega1: f64,
    pub omega2: f64,
    pub g1: f64,
    pub g2: f64,
    /// Cross-Kerr (phase) coupling.
    pub g: f64,
    pub hbar: f64,
    pub mass: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { omega1: 1.0, omega2: 1.0, g1: 0.0, g2: 0.0, g: 0.0, hbar: 1.0, mass: 1.0 }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("g1", self.g1),
            ("g2", self.g2),
            ("g", self.g),
            ("hbar", self.hbar),
            ("mass", self.mass),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite, got {v}")));
            }
        }
        if self.hbar <= 0.0 {
            return Err(Error::domain(format!("hbar must be positive, got {}", self.hbar)));
        }
        if self.mass <= 0.0 {
            return Err(Error::domain(format!("mass must be positive, got {}", self.mass)));
        }
        Ok(())
    }

    pub fn omega(&self, mode: Mode) -> f64 {
        match mode {
            Mode::One => self.omega1,
            Mode::Two => self.omega2,
        }
    }

    /// Self-Kerr nonlinearity of `mode`.
    pub fn kerr(&self, mode: Mode) -> f64 {
        match mode {
            Mode::One => self.g1,
            Mode::Two => self.g2,
        }
    }

    pub fn with_hbar(self, hbar: f64) -> Self {
        Self { hbar, ..self }
    }

    /// Linear rotation rate Ω_k = ω_k + ħg_k + ħg/2 of the coherent amplitude.
    pub fn rotation_rate(&self, mode: Mode) -> f64 {
        self.omega(mode) + self.hbar * self.kerr(mode) + 0.5 * self.hbar * self.g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InitialConditions {
    pub q10: f64,
    pub p10: f64,
    pub q20: f64,
    pub p20: f64,
}

impl InitialConditions {
    /// Initial conditions placing each mode at the given coherent amplitude.
    pub fn from_amplitudes(z1: Complex64, z2: Complex64, hbar: f64) -> Self {
        let s = (2.0 * hbar).sqrt();
        Self { q10: s * z1.re, p10: s * z1.im, q20: s * z2.re, p20: s * z2.im }
    }

    pub fn point(&self, mode: Mode) -> PhaseSpacePoint {
        match mode {
            Mode::One => PhaseSpacePoint { q: self.q10, p: self.p10 },
            Mode::Two => PhaseSpacePoint { q: self.q20, p: self.p20 },
        }
    }

    /// Action S_k = q_{k0}² + p_{k0}².
    pub fn action(&self, mode: Mode) -> f64 {
        self.point(mode).radius_sqr()
    }

    pub fn amplitude(&self, mode: Mode, hbar: f64) -> Complex64 {
        let pt = self.point(mode);
        Complex64::new(pt.q, pt.p) / (2.0 * hbar).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseSpacePoint {
    pub q: f64,
    pub p: f64,
}

impl PhaseSpacePoint {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q, p }
    }

    pub fn radius_sqr(&self) -> f64 {
        self.q * self.q + self.p * self.p
    }

    /// Applies M[φ] = [[cos φ, sin φ], [−sin φ, cos φ]].
    pub fn rotate(&self, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { q: c * self.q + s * self.p, p: -s * self.q + c * self.p }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { q: a * self.q, p: a * self.p }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.q - other.q).hypot(self.p - other.p)
    }
}

/// Coherent amplitudes and actions of both modes at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    pub z10: Complex64,
    pub z20: Complex64,
    pub s1: f64,
    pub s2: f64,
}

impl Amplitudes {
    pub fn z(&self, mode: Mode) -> Complex64 {
        match mode {
            Mode::One => self.z10,
            Mode::Two => self.z20,
        }
    }

    pub fn action(&self, mode: Mode) -> f64 {
        match mode {
            Mode::One => self.s1,
            Mode::Two => self.s2,
        }
    }
}

/// z_{k0} = (q_{k0} + i p_{k0})/√(2ħ) and S_k = q_{k0}² + p_{k0}².
pub fn derive_amplitudes(ics: &InitialConditions, params: &ModelParams) -> Amplitudes {
    Amplitudes {
        z10: ics.amplitude(Mode::One, params.hbar),
        z20: ics.amplitude(Mode::Two, params.hbar),
        s1: ics.action(Mode::One),
        s2: ics.action(Mode::Two),
    }
}

/// (Q, P) → (q, p) = (Q√(mω), P/√(mω)).
pub fn canonical_transform(big_q: f64, big_p: f64, mass: f64, omega: f64) -> Result<PhaseSpacePoint> {
    let s = scale_factor(mass, omega)?;
    Ok(PhaseSpacePoint { q: big_q * s, p: big_p / s })
}

/// (q, p) → (Q, P), inverse of [`canonical_transform`].
pub fn inverse_canonical_transform(pt: PhaseSpacePoint, mass: f64, omega: f64) -> Result<(f64, f64)> {
    let s = scale_factor(mass, omega)?;
    Ok((pt.q / s, pt.p * s))
}

fn scale_factor(mass: f64, omega: f64) -> Result<f64> {
    let mw = mass * omega;
    if !(mw > 0.0) || !mw.is_finite() {
        return Err(Error::domain(format!("mass*omega must be positive and finite, got {mw}")));
    }
    Ok(mw.sqrt())
}
