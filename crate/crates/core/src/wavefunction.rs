//! Position-representation states and their sampling on uniform grids.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavefunctionKind {
    Coherent,
    Cat,
    Number,
}

/// Parameters of a coherent, two-component cat, or number-state profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavefunctionSpec {
    pub kind: WavefunctionKind,
    /// Peak separation; coherent peaks sit at `q/2`, cat peaks at `±q/2`.
    pub q: f64,
    /// Width `b = √(ħ/mω)`.
    pub b: f64,
    /// Reduced wavelength `λ = ħ/p`; `f64::INFINITY` for no phase slope.
    pub lambda: f64,
    /// Excitation number, used by [`WavefunctionKind::Number`] only.
    pub n: usize,
}

impl WavefunctionSpec {
    pub fn coherent(q: f64, b: f64, lambda: f64) -> Self {
        Self { kind: WavefunctionKind::Coherent, q, b, lambda, n: 0 }
    }

    pub fn cat(q: f64, b: f64, lambda: f64) -> Self {
        Self { kind: WavefunctionKind::Cat, q, b, lambda, n: 0 }
    }

    pub fn number(n: usize, b: f64) -> Self {
        Self { kind: WavefunctionKind::Number, q: 0.0, b, lambda: f64::INFINITY, n }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b.is_finite()) {
            return Err(Error::domain(format!("width b must be positive, got {}", self.b)));
        }
        if !self.q.is_finite() {
            return Err(Error::domain("q must be finite"));
        }
        if self.kind != WavefunctionKind::Number && (self.lambda == 0.0 || self.lambda.is_nan()) {
            return Err(Error::domain("lambda must be nonzero"));
        }
        Ok(())
    }

    /// Distance from the origin beyond which the profile is a Gaussian tail.
    pub fn outer_extent(&self) -> f64 {
        match self.kind {
            WavefunctionKind::Coherent => (0.5 * self.q).abs(),
            WavefunctionKind::Cat => (0.5 * self.q).abs(),
            WavefunctionKind::Number => (2.0 * self.n as f64 + 1.0).sqrt() * self.b,
        }
    }

    /// Coherent amplitude `z` of the `+` component, consistent with the
    /// peak at `q/2` and phase slope `1/λ`: `z = (q/(2b) + i b/λ)/√2`.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(0.5 * self.q / self.b, self.b / self.lambda) / 2f64.sqrt()
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self.kind {
            WavefunctionKind::Coherent => coherent_xrep(self, x),
            WavefunctionKind::Cat => cat_xrep(self, x),
            WavefunctionKind::Number => Complex64::new(number_xrep(self.n, self.b, x), 0.0),
        }
    }
}

fn gaussian_packet(center: f64, b: f64, slope: f64, x: f64) -> Complex64 {
    let u = x - center;
    let modulus = (b * PI.sqrt()).powf(-0.5) * (-u * u / (2.0 * b * b)).exp();
    Complex64::from_polar(modulus, slope * u)
}

/// `⟨x|z⟩ = (b√π)^{−1/2} exp[−(x−q/2)²/(2b²)] exp[i(x−q/2)/λ]`.
pub fn coherent_xrep(spec: &WavefunctionSpec, x: f64) -> Complex64 {
    gaussian_packet(0.5 * spec.q, spec.b, 1.0 / spec.lambda, x)
}

/// `G(x) = [⟨x|z⟩ + ⟨x|−z⟩]/N` with `N = [2(1 + e^{−2|z|²})]^{1/2}`.
///
/// `⟨x|−z⟩` is centered at `−q/2` with phase slope `−1/λ`.
pub fn cat_xrep(spec: &WavefunctionSpec, x: f64) -> Complex64 {
    let slope = 1.0 / spec.lambda;
    let plus = gaussian_packet(0.5 * spec.q, spec.b, slope, x);
    let minus = gaussian_packet(-0.5 * spec.q, spec.b, -slope, x);
    let norm = (2.0 * (1.0 + (-2.0 * spec.amplitude().norm_sqr()).exp())).sqrt();
    (plus + minus) / norm
}

/// Normalized Hermite function of order `n` and width `b`.
pub fn number_xrep(n: usize, b: f64, x: f64) -> f64 {
    let xi = x / b;
    let mut prev = 0.0;
    let mut cur = (b * PI.sqrt()).powf(-0.5) * (-0.5 * xi * xi).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * xi * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Uniform grid of bin centers `x0 + k·dx`, `k = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(x0: f64, dx: f64, count: usize) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) || !x0.is_finite() || count == 0 {
            return Err(Error::domain(format!("invalid grid x0={x0} dx={dx} count={count}")));
        }
        Ok(Self { x0, dx, count })
    }

    /// Centers `k·dx` for integer `k` covering `[lo, hi]`.
    pub fn symmetric(lo: f64, hi: f64, dx: f64) -> Result<Self> {
        let k_lo = (lo / dx).floor() as i64;
        let k_hi = (hi / dx).ceil() as i64;
        Grid::new(k_lo as f64 * dx, dx, (k_hi - k_lo + 1) as usize)
    }

    /// Reference sampling over `[−12b, 12b]` at spacing `10⁻³ b`.
    pub fn reference(b: f64) -> Self {
        Grid::symmetric(-12.0 * b, 12.0 * b, 1e-3 * b).expect("b > 0")
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x0 + k as f64 * self.dx
    }

    pub fn xs(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.x(k))
    }

    pub fn lower_edge(&self) -> f64 {
        self.x0 - 0.5 * self.dx
    }

    pub fn upper_edge(&self) -> f64 {
        self.x(self.count - 1) + 0.5 * self.dx
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.count == other.count
            && (self.dx - other.dx).abs() <= 1e-12 * self.dx
            && (self.x0 - other.x0).abs() <= 1e-9 * self.dx
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledWavefunction {
    pub grid: Grid,
    pub amps: Vec<Complex64>,
}

impl SampledWavefunction {
    pub fn new(grid: Grid, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != grid.count {
            return Err(Error::domain(format!("{} amplitudes for a grid of {}", amps.len(), grid.count)));
        }
        Ok(Self { grid, amps })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let amps = grid.xs().map(f).collect();
        Self { grid, amps }
    }

    /// `Σ dx |ψ_k|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| self.grid.dx * a.norm_sqr()).collect::<CompensatedSum>().value()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::domain("cannot normalize a vanishing wavefunction"));
        }
        let s = n.sqrt().recip();
        for a in &mut self.amps {
            *a *= s;
        }
        Ok(self)
    }

    /// `Σ dx |ψ_k|² x_k`.
    pub fn mean_position(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(k, a)| self.grid.dx * a.norm_sqr() * self.grid.x(k))
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| self.grid.dx * a.norm_sqr()).collect()
    }
}

/// Samples `spec` at the bin centers of `grid` and renormalizes discretely.
///
/// The grid must extend at least `8b` beyond the outermost peak.
pub fn sample(spec: &WavefunctionSpec, grid: &Grid) -> Result<SampledWavefunction> {
    spec.validate()?;
    let reach = spec.outer_extent() + 8.0 * spec.b;
    if grid.x0 > -reach || grid.x(grid.count - 1) < reach {
        return Err(Error::domain(format!(
            "grid [{}, {}] does not cover ±{reach} (8b beyond the outer peak)",
            grid.x0,
            grid.x(grid.count - 1)
        )));
    }
    SampledWavefunction::from_fn(*grid, |x| spec.eval(x)).normalized()
}

pub const WAVEFUNCTION_HEADER: &str = "x,re,im,prob";

pub fn wavefunction_csv_rows(psi: &SampledWavefunction) -> impl Iterator<Item = String> + '_ {
    psi.grid.xs().zip(&psi.amps).map(|(x, a)| format!("{x:.12e},{:.12e},{:.12e},{:.12e}", a.re, a.im, a.norm_sqr()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(grid: &Grid, f: impl Fn(f64) -> f64) -> f64 {
        grid.xs().map(|x| grid.dx * f(x)).collect::<CompensatedSum>().value()
    }

    #[test]
    fn coherent_peak_value() {
        let spec = WavefunctionSpec::coherent(2.0, 1.3, 0.4);
        let v = coherent_xrep(&spec, 1.0);
        assert!((v.norm() - (1.3 * PI.sqrt()).powf(-0.5)).abs() < 1e-15);
        assert!(v.arg().abs() < 1e-15);
    }

    #[test]
    fn coherent_off_peak_value() {
        let spec = WavefunctionSpec::coherent(3.0, 1.0, 0.2);
        let v = coherent_xrep(&spec, 0.0);
        assert!((v.norm() - PI.powf(-0.25) * (-9.0f64 / 8.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn coherent_normalized() {
        let spec = WavefunctionSpec::coherent(3.0, 1.0, 0.2);
        let g = Grid::reference(1.0);
        assert!((quad(&g, |x| coherent_xrep(&spec, x).norm_sqr()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cat_normalized_on_reference_grid() {
        for &(q, lambda) in &[(3.0, 0.2), (1.0, 0.2), (0.0, 0.5), (2.0, 1.0), (0.5, 3.0)] {
            let spec = WavefunctionSpec::cat(q, 1.0, lambda);
            let g = Grid::reference(1.0);
            let n = quad(&g, |x| cat_xrep(&spec, x).norm_sqr());
            assert!((n - 1.0).abs() < 1e-9, "q={q} lambda={lambda} n={n}");
        }
    }

    #[test]
    fn cat_degenerate_centers_is_gaussian_cosine() {
        let spec = WavefunctionSpec::cat(0.0, 1.0, 0.5);
        for &x in &[-1.0, 0.0, 0.3, 2.0] {
            let g = cat_xrep(&spec, x);
            assert!(g.im.abs() < 1e-15);
            let env = PI.powf(-0.25) * (-x * x / 2.0).exp();
            let n = (2.0 * (1.0 + (-4.0f64).exp())).sqrt();
            assert!((g.re - 2.0 * env * (2.0 * x).cos() / n).abs() < 1e-14);
        }
    }

    #[test]
    fn cat_modulus_symmetric() {
        let spec = WavefunctionSpec::cat(3.0, 1.0, 0.2);
        for k in 0..500 {
            let x = 0.0173 * k as f64;
            assert!((cat_xrep(&spec, x).norm() - cat_xrep(&spec, -x).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn cat_cross_term_is_fringe() {
        let spec = WavefunctionSpec::cat(1.0, 1.0, 0.2);
        let n2 = 2.0 * (1.0 + (-2.0 * spec.amplitude().norm_sqr()).exp());
        for k in -300..=300 {
            let x = 0.005 * k as f64;
            let a = gaussian_packet(0.5, 1.0, 5.0, x).norm();
            let b = gaussian_packet(-0.5, 1.0, -5.0, x).norm();
            let cross = cat_xrep(&spec, x).norm_sqr() * n2 - a * a - b * b;
            assert!((cross - 2.0 * a * b * (10.0 * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn number_ground_state_and_parity() {
        assert!((number_xrep(0, 1.0, 0.0) - PI.powf(-0.25)).abs() < 1e-15);
        assert!((number_xrep(0, 2.0, 0.0) - (2.0 * PI.sqrt()).powf(-0.5)).abs() < 1e-15);
        for n in (1..20).step_by(2) {
            assert_eq!(number_xrep(n, 1.0, 0.0), 0.0);
        }
    }

    #[test]
    fn number_orthonormal() {
        let g = Grid::symmetric(-14.0, 14.0, 2e-3).unwrap();
        let table: Vec<Vec<f64>> = (0..=40).map(|n| g.xs().map(|x| number_xrep(n, 1.0, x)).collect()).collect();
        for n in 0..=40 {
            for m in n..=40 {
                let ip: f64 =
                    table[n].iter().zip(&table[m]).map(|(a, b)| g.dx * a * b).collect::<CompensatedSum>().value();
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-8, "n={n} m={m} ip={ip}");
            }
        }
    }

    #[test]
    fn sample_normalizes() {
        let spec = WavefunctionSpec::cat(3.0, 1.0, 0.2);
        let psi = sample(&spec, &Grid::symmetric(-12.0, 12.0, 0.05).unwrap()).unwrap();
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sample_rejects_narrow_grid() {
        let spec = WavefunctionSpec::cat(3.0, 1.0, 0.2);
        let narrow = Grid::symmetric(-5.0, 5.0, 0.01).unwrap();
        assert!(matches!(sample(&spec, &narrow), Err(Error::Domain(_))));
    }

    #[test]
    fn sample_converges_under_refinement() {
        let spec = WavefunctionSpec::coherent(1.0, 1.0, 0.7);
        let mut errs = Vec::new();
        for &dx in &[0.8, 0.4, 0.2] {
            let psi = sample(&spec, &Grid::symmetric(-10.0, 10.0, dx).unwrap()).unwrap();
            let err =
                psi.grid.xs().zip(&psi.amps).map(|(x, a)| (a - coherent_xrep(&spec, x)).norm()).fold(0.0, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < errs[0] && errs[2] <= errs[1]);
        assert!(errs[2] < 1e-12);
    }
}
