//! Finite-resolution position measurement with rectangular detectors.
//!
//! A detector of width `δx` centered at `x_k` collects the probability of
//! every fine-grid cell it contains; the reading is attributed to `x_k`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{CompensatedComplex, CompensatedSum};
use crate::wavefunction::{sample, Grid, SampledWavefunction, WavefunctionSpec};

pub type DetectorGrid = Grid;

const ALIGN_TOL: f64 = 1e-6;

/// Default mass-fraction tolerance for [`classical_position`].
pub const DEFAULT_EPS: f64 = 0.05;

impl Grid {
    /// Detectors centered at `k·dx` for every integer `k` with `|k·dx| ≤ reach`.
    pub fn detectors(reach: f64, dx: f64) -> Result<DetectorGrid> {
        if !(dx > 0.0) || !(reach >= 0.0) {
            return Err(Error::domain(format!("invalid detector layout reach={reach} dx={dx}")));
        }
        let k = (reach / dx).ceil() as i64;
        Grid::new(-(k as f64) * dx, dx, (2 * k + 1) as usize)
    }

    /// Fine grid that tiles these detectors with `cells` sub-cells each.
    pub fn tiling(&self, cells: usize) -> Result<Grid> {
        if cells == 0 {
            return Err(Error::domain("tiling needs at least one cell per detector"));
        }
        let dxf = self.dx / cells as f64;
        Grid::new(self.lower_edge() + 0.5 * dxf, dxf, self.count * cells)
    }

    /// Tiling with sub-cell spacing closest to `target_dx` from below.
    pub fn tiling_with_spacing(&self, target_dx: f64) -> Result<Grid> {
        self.tiling((self.dx / target_dx).ceil().max(1.0) as usize)
    }
}

/// Per-detector probabilities `P_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseDistribution {
    pub grid: DetectorGrid,
    pub probs: Vec<f64>,
}

impl CoarseDistribution {
    pub fn new(grid: DetectorGrid, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != grid.count {
            return Err(Error::domain(format!("{} probabilities for {} detectors", probs.len(), grid.count)));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::domain("detector probabilities must be nonnegative"));
        }
        Ok(Self { grid, probs })
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().copied().collect::<CompensatedSum>().value()
    }

    /// `P_k/δx`.
    pub fn density(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p / self.grid.dx).collect()
    }

    pub fn translated(&self, bins: i64) -> Self {
        let mut grid = self.grid;
        grid.x0 += bins as f64 * grid.dx;
        Self { grid, probs: self.probs.clone() }
    }

    /// Largest `P_k` and its index; the first wins on ties.
    pub fn max_bin(&self) -> (usize, f64) {
        self.probs
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, p)| if p > acc.1 { (k, p) } else { acc })
    }
}

/// Index range of fine cells inside each detector.
fn cell_map(fine: &Grid, grid: &DetectorGrid) -> Result<(usize, usize)> {
    let ratio = grid.dx / fine.dx;
    let cells = ratio.round();
    if cells < 1.0 || (ratio - cells).abs() > ALIGN_TOL {
        return Err(Error::domain(format!("detector width {} is not a multiple of fine spacing {}", grid.dx, fine.dx)));
    }
    let offset = (grid.lower_edge() - fine.lower_edge()) / fine.dx;
    let start = offset.round();
    if (offset - start).abs() > ALIGN_TOL {
        return Err(Error::domain("detector edges do not coincide with fine cell edges"));
    }
    let cells = cells as usize;
    if start < 0.0 || start as usize + cells * grid.count > fine.count {
        return Err(Error::domain(format!(
            "fine grid [{}, {}] does not span detectors [{}, {}]",
            fine.lower_edge(),
            fine.upper_edge(),
            grid.lower_edge(),
            grid.upper_edge()
        )));
    }
    Ok((start as usize, cells))
}

/// `P_k = Σ_{cells in k} dx_fine·|ψ|²`.
pub fn bin(psi: &SampledWavefunction, grid: &DetectorGrid) -> Result<CoarseDistribution> {
    let (start, cells) = cell_map(&psi.grid, grid)?;
    let probs = (0..grid.count)
        .map(|k| {
            let lo = start + k * cells;
            psi.amps[lo..lo + cells].iter().map(|a| psi.grid.dx * a.norm_sqr()).collect::<CompensatedSum>().value()
        })
        .collect();
    CoarseDistribution::new(*grid, probs)
}

fn interpolate(psi: &SampledWavefunction, x: f64) -> Complex64 {
    let u = ((x - psi.grid.x0) / psi.grid.dx).clamp(0.0, (psi.grid.count - 1) as f64);
    let j = (u.floor() as usize).min(psi.grid.count.saturating_sub(2));
    let w = u - j as f64;
    if psi.grid.count == 1 {
        return psi.amps[0];
    }
    psi.amps[j] * (1.0 - w) + psi.amps[j + 1] * w
}

/// Coarse amplitudes `√(P_k/δx)·e^{iθ_k}`, `θ_k` the fine phase at `x_k`.
pub fn coarse_amplitudes(psi: &SampledWavefunction, grid: &DetectorGrid) -> Result<SampledWavefunction> {
    let dist = bin(psi, grid)?;
    let amps = dist
        .probs
        .iter()
        .enumerate()
        .map(|(k, p)| Complex64::from_polar((p / grid.dx).sqrt(), interpolate(psi, grid.x(k)).arg()))
        .collect();
    SampledWavefunction::new(*grid, amps)
}

/// `Σ_k δx ψ*_k φ_k`.
pub fn discrete_inner(psi: &SampledWavefunction, phi: &SampledWavefunction) -> Result<Complex64> {
    if !psi.grid.same_as(&phi.grid) {
        return Err(Error::domain("inner product of wavefunctions on different grids"));
    }
    let mut acc = CompensatedComplex::new();
    for (a, b) in psi.amps.iter().zip(&phi.amps) {
        acc.add(a.conj() * b);
    }
    Ok(acc.value() * psi.grid.dx)
}

/// `(ħ/i)(ψ_{k+1} − ψ_k)/δx`; the last entry repeats its predecessor.
pub fn discrete_momentum(psi: &SampledWavefunction, hbar: f64) -> SampledWavefunction {
    let n = psi.amps.len();
    let scale = Complex64::new(0.0, -hbar / psi.grid.dx);
    let mut out: Vec<Complex64> = psi.amps.windows(2).map(|w| scale * (w[1] - w[0])).collect();
    if let Some(&last) = out.last() {
        out.push(last);
    } else if n == 1 {
        out.push(Complex64::new(0.0, 0.0));
    }
    SampledWavefunction { grid: psi.grid, amps: out }
}

/// Forward difference `(f_{k+1} − f_k)/δx` with the last entry repeated.
pub fn forward_difference(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]) / dx).collect();
    if let Some(&last) = out.last() {
        out.push(last);
    } else if !values.is_empty() {
        out.push(0.0);
    }
    out
}

/// `|Σ_k δx ψ*_k ψ_{k+1}|`: 1 for quantum resolution, 0 in the classical limit.
pub fn commutator_indicator(psi: &SampledWavefunction) -> f64 {
    let mut acc = CompensatedComplex::new();
    for w in psi.amps.windows(2) {
        acc.add(w[0].conj() * w[1]);
    }
    (acc.value() * psi.grid.dx).norm()
}

/// Gaussian with `|ψ|²` of standard deviation `sigma`, sampled at spacing `dx`.
///
/// The center sits a quarter cell from the nearest sample so the lattice
/// sums over `|ψ|²` and over neighbour products see the same offset.
pub fn gaussian_on_lattice(sigma: f64, dx: f64) -> Result<SampledWavefunction> {
    if !(sigma > 0.0 && dx > 0.0) {
        return Err(Error::domain("sigma and dx must be positive"));
    }
    let center = 0.25 * dx;
    let grid = Grid::detectors(14.0 * sigma + dx, dx)?;
    SampledWavefunction::from_fn(grid, |x| {
        let u = x - center;
        Complex64::new((-u * u / (4.0 * sigma * sigma)).exp(), 0.0)
    })
    .normalized()
}

/// Analytic lattice value `e^{−δx²/(8σ²)}`.
pub fn gaussian_indicator_reference(sigma: f64, dx: f64) -> f64 {
    (-dx * dx / (8.0 * sigma * sigma)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detection {
    Resolved(f64),
    Unresolved,
}

impl Detection {
    pub fn position(self) -> Option<f64> {
        match self {
            Detection::Resolved(x) => Some(x),
            Detection::Unresolved => None,
        }
    }
}

/// Center of the dominant bin when it holds at least `1 − eps` of the mass.
pub fn classical_position(dist: &CoarseDistribution, eps: f64) -> Result<Detection> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps must lie in (0, 1), got {eps}")));
    }
    let total = dist.total();
    let (k, p) = dist.max_bin();
    Ok(if total > 0.0 && p >= (1.0 - eps) * total {
        Detection::Resolved(dist.grid.x(k))
    } else {
        Detection::Unresolved
    })
}

/// `(P_max − P_min)/(P_max + P_min)` over detectors centered in `[lo, hi]`.
///
/// When fewer than two centers fall inside, every detector whose cell
/// overlaps the window is used instead.
pub fn fringe_visibility(dist: &CoarseDistribution, window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::domain(format!("empty visibility window [{lo}, {hi}]")));
    }
    let g = &dist.grid;
    let centered: Vec<f64> = (0..g.count).filter(|&k| (lo..=hi).contains(&g.x(k))).map(|k| dist.probs[k]).collect();
    let picked = if centered.len() >= 2 {
        centered
    } else {
        (0..g.count).filter(|&k| g.x(k) + 0.5 * g.dx > lo && g.x(k) - 0.5 * g.dx < hi).map(|k| dist.probs[k]).collect()
    };
    if picked.len() < 2 {
        return Err(Error::domain(format!("window [{lo}, {hi}] covers fewer than two detectors")));
    }
    let max = picked.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = picked.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(if max + min > 0.0 { (max - min) / (max + min) } else { 0.0 })
}

/// `[−(q/2 + b), q/2 + b]`.
pub fn default_window(q: f64, b: f64) -> (f64, f64) {
    let h = 0.5 * q.abs() + b;
    (-h, h)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    Harmonic {
        mass: f64,
        omega: f64,
    },
    /// Values `V(x_k)` on the wavefunction grid.
    Tabulated {
        mass: f64,
        values: Vec<f64>,
    },
}

impl Potential {
    pub fn mass(&self) -> f64 {
        match self {
            Potential::Harmonic { mass, .. } | Potential::Tabulated { mass, .. } => *mass,
        }
    }

    fn sampled(&self, grid: &Grid) -> Result<Vec<f64>> {
        match self {
            Potential::Harmonic { mass, omega } => Ok(grid.xs().map(|x| 0.5 * mass * omega * omega * x * x).collect()),
            Potential::Tabulated { values, .. } => {
                if values.len() != grid.count {
                    return Err(Error::domain(format!(
                        "{} potential values for a grid of {}",
                        values.len(),
                        grid.count
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

fn uniform_step(times: &[f64]) -> Result<f64> {
    if times.len() < 3 {
        return Err(Error::domain("need at least three time points"));
    }
    let dt = times[1] - times[0];
    if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1.0)) {
        return Err(Error::domain("time grid must be uniform and increasing"));
    }
    Ok(dt)
}

/// `max_t |m·d²⟨x⟩/dt² + Σ_k δx|ψ_k|² δV(x_k)/δx|` over interior times.
pub fn ehrenfest_residual(potential: &Potential, states: &[SampledWavefunction], times: &[f64]) -> Result<f64> {
    if states.len() != times.len() {
        return Err(Error::domain("one state per time point required"));
    }
    let dt = uniform_step(times)?;
    let means: Vec<f64> = states.iter().map(|s| s.mean_position()).collect();
    let mut worst = 0.0f64;
    for i in 1..states.len() - 1 {
        let s = &states[i];
        let dv = forward_difference(&potential.sampled(&s.grid)?, s.grid.dx);
        let force: f64 =
            s.amps.iter().zip(&dv).map(|(a, f)| s.grid.dx * a.norm_sqr() * f).collect::<CompensatedSum>().value();
        let accel = (means[i + 1] - 2.0 * means[i] + means[i - 1]) / (dt * dt);
        worst = worst.max((potential.mass() * accel + force).abs());
    }
    Ok(worst)
}

/// Harmonic coherent state `⟨x⟩ = x0 cos ωt` on `grid`, width `b = √(ħ/mω)`.
pub fn harmonic_coherent_state(x0: f64, b: f64, omega: f64, t: f64, grid: &Grid) -> Result<SampledWavefunction> {
    let (s, c) = (omega * t).sin_cos();
    let center = x0 * c;
    // p/ħ = −mω x0 sin ωt / (mω b²)
    let k = -x0 * s / (b * b);
    let spec = WavefunctionSpec::coherent(2.0 * center, b, if k == 0.0 { f64::INFINITY } else { 1.0 / k });
    sample(&spec, grid)
}

/// Fine-grid Ehrenfest residual of a harmonic coherent state over one period.
pub fn harmonic_ehrenfest(x0: f64, b: f64, mass: f64, omega: f64, time_steps: usize, dx: f64) -> Result<f64> {
    if time_steps < 2 {
        return Err(Error::domain("need at least two time steps per period"));
    }
    let period = 2.0 * std::f64::consts::PI / omega;
    let times: Vec<f64> = (0..=time_steps).map(|i| period * i as f64 / time_steps as f64).collect();
    let grid = Grid::detectors(x0.abs() + 8.0 * b + dx, dx)?;
    let states: Vec<SampledWavefunction> =
        times.par_iter().map(|&t| harmonic_coherent_state(x0, b, omega, t, &grid)).collect::<Result<_>>()?;
    ehrenfest_residual(&Potential::Harmonic { mass, omega }, &states, &times)
}

/// Detector reading of a harmonic coherent state at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSample {
    pub t: f64,
    /// Fine-grid `⟨x⟩`.
    pub mean: f64,
    pub reading: Detection,
    /// Solution of `m ẍ = −δV(x)/δx` from rest at `x0`.
    pub newton: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonReport {
    /// Largest `|x_c − x_N|` over resolved samples.
    pub max_deviation: f64,
    /// Largest gap between the detector index of `x_c` and that holding `x_N`.
    pub max_bin_offset: i64,
    pub detector_dx: f64,
    pub resolved: usize,
    pub samples: usize,
}

impl NewtonReport {
    /// Every resolved reading at most one detector away from the Newtonian path.
    pub fn within_one_bin(&self) -> bool {
        self.resolved > 0 && self.max_bin_offset <= 1
    }
}

/// Detector readings `x_c(t)` of a harmonic coherent state alongside
/// `m ẍ = −δV(x)/δx = −mω²(x + δx/2)`, solved by `−δx/2 + (x0 + δx/2) cos ωt`.
pub fn coarse_newton_trace(
    x0: f64,
    b: f64,
    omega: f64,
    detector_dx: f64,
    times: &[f64],
    eps: f64,
) -> Result<Vec<NewtonSample>> {
    let detectors = Grid::detectors(x0.abs() + 8.0 * b + detector_dx, detector_dx)?;
    let fine = detectors.tiling_with_spacing(0.02 * b)?;
    times
        .par_iter()
        .map(|&t| {
            let psi = harmonic_coherent_state(x0, b, omega, t, &fine)?;
            Ok(NewtonSample {
                t,
                mean: psi.mean_position(),
                reading: classical_position(&bin(&psi, &detectors)?, eps)?,
                newton: -0.5 * detector_dx + (x0 + 0.5 * detector_dx) * (omega * t).cos(),
            })
        })
        .collect()
}

pub fn coarse_newton_check(
    x0: f64,
    b: f64,
    omega: f64,
    detector_dx: f64,
    times: &[f64],
    eps: f64,
) -> Result<NewtonReport> {
    let trace = coarse_newton_trace(x0, b, omega, detector_dx, times, eps)?;
    let index = |x: f64| (x / detector_dx).round() as i64;
    let devs: Vec<(f64, i64)> = trace
        .iter()
        .filter_map(|s| s.reading.position().map(|xc| ((xc - s.newton).abs(), (index(xc) - index(s.newton)).abs())))
        .collect();
    Ok(NewtonReport {
        max_deviation: devs.iter().map(|d| d.0).fold(0.0, f64::max),
        max_bin_offset: devs.iter().map(|d| d.1).max().unwrap_or(0),
        detector_dx,
        resolved: devs.len(),
        samples: times.len(),
    })
}

pub const NEWTON_HEADER: &str = "t,mean_x,x_c,x_newton";

pub fn newton_csv_row(s: &NewtonSample) -> String {
    let xc = s.reading.position().map(|x| format!("{x:.12e}")).unwrap_or_default();
    format!("{:.12e},{:.12e},{},{:.12e}", s.t, s.mean, xc, s.newton)
}

/// `Σ_i √p_i Φ_i(x) Θ_i(y)` on fine grids.
#[derive(Debug, Clone)]
pub struct SchmidtPair {
    pub weights: Vec<f64>,
    pub phi: Vec<SampledWavefunction>,
    pub theta: Vec<SampledWavefunction>,
}

impl SchmidtPair {
    pub fn new(weights: Vec<f64>, phi: Vec<SampledWavefunction>, theta: Vec<SampledWavefunction>) -> Result<Self> {
        if weights.is_empty() || weights.len() != phi.len() || weights.len() != theta.len() {
            return Err(Error::domain("weights and mode families must have equal nonzero length"));
        }
        if weights.iter().any(|p| !(*p >= 0.0)) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::domain("Schmidt weights must be nonnegative and sum to 1"));
        }
        for family in [&phi, &theta] {
            for i in 0..family.len() {
                if !family[i].grid.same_as(&family[0].grid) {
                    return Err(Error::domain("modes of one family must share a grid"));
                }
                for j in 0..=i {
                    let ip = discrete_inner(&family[i], &family[j])?;
                    let expect = if i == j { 1.0 } else { 0.0 };
                    if (ip - expect).norm() > 1e-6 {
                        return Err(Error::domain(format!("modes {i},{j} not orthonormal: ⟨·|·⟩ = {ip}")));
                    }
                }
            }
        }
        Ok(Self { weights, phi, theta })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtReport {
    /// `max_{i≠j,k} |Σ_{cells in k} δx Φ_i*Φ_j|` over both families.
    pub max_offdiag_gram: f64,
    /// Largest entrywise gap between the coarse joint distribution of the
    /// pure state and that of `Σ p_i |Φ_iΘ_i⟩⟨Φ_iΘ_i|`.
    pub joint_distribution_defect: f64,
}

/// `G_ij(k) = Σ_{cells in k} dx_fine Φ_i* Φ_j`.
fn detector_grams(modes: &[SampledWavefunction], grid: &DetectorGrid) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let fine = modes[0].grid;
    let (start, cells) = cell_map(&fine, grid)?;
    let r = modes.len();
    Ok((0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    (0..grid.count)
                        .map(|k| {
                            let lo = start + k * cells;
                            let mut acc = CompensatedComplex::new();
                            for c in lo..lo + cells {
                                acc.add(modes[i].amps[c].conj() * modes[j].amps[c]);
                            }
                            acc.value() * fine.dx
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

pub fn schmidt_separability(pair: &SchmidtPair, grid: &DetectorGrid) -> Result<SchmidtReport> {
    let gx = detector_grams(&pair.phi, grid)?;
    let gy = detector_grams(&pair.theta, grid)?;
    let r = pair.weights.len();
    let mut max_offdiag = 0.0f64;
    for g in [&gx, &gy] {
        for i in 0..r {
            for j in 0..r {
                if i != j {
                    max_offdiag = g[i][j].iter().map(|c| c.norm()).fold(max_offdiag, f64::max);
                }
            }
        }
    }
    let defect = (0..grid.count)
        .into_par_iter()
        .map(|k| {
            (0..grid.count)
                .map(|l| {
                    let mut acc = CompensatedSum::new();
                    for i in 0..r {
                        for j in 0..r {
                            if i != j {
                                let w = (pair.weights[i] * pair.weights[j]).sqrt();
                                acc.add(w * (gx[i][j][k] * gy[i][j][l]).re);
                            }
                        }
                    }
                    acc.value().abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(SchmidtReport { max_offdiag_gram: max_offdiag, joint_distribution_defect: defect })
}

/// Two-term state `√p0 |0⟩|0⟩ + √p1 |1⟩|1⟩` in width-`b` number modes.
pub fn number_schmidt_pair(p0: f64, b: f64, fine: &Grid) -> Result<SchmidtPair> {
    let modes: Vec<SampledWavefunction> =
        (0..2).map(|n| sample(&WavefunctionSpec::number(n, b), fine)).collect::<Result<_>>()?;
    SchmidtPair::new(vec![p0, 1.0 - p0], modes.clone(), modes)
}

/// Schmidt diagnostics for a number-mode pair read by detectors of width `dx`.
pub fn schmidt_at_resolution(p0: f64, b: f64, dx: f64) -> Result<SchmidtReport> {
    let detectors = Grid::detectors(12.0 * b + dx, dx)?;
    let fine = detectors.tiling_with_spacing(0.02 * b)?;
    schmidt_separability(&number_schmidt_pair(p0, b, &fine)?, &detectors)
}

/// Cat profile binned by detectors of width `dx` centered at `k·dx`.
pub fn cat_distribution(q: f64, b: f64, lambda: f64, dx: f64, fine_dx: f64) -> Result<CoarseDistribution> {
    let spec = WavefunctionSpec::cat(q, b, lambda);
    let detectors = Grid::detectors(spec.outer_extent() + 8.0 * b + dx, dx)?;
    let fine = detectors.tiling_with_spacing(fine_dx)?;
    bin(&sample(&spec, &fine)?, &detectors)
}

pub const COMMUTATOR_HEADER: &str = "dx,indicator";
pub const COARSE_HEADER: &str = "x_k,P_k,density";
pub const VISIBILITY_HEADER: &str = "dx,visibility";
pub const SCHMIDT_HEADER: &str = "dx,max_offdiag,defect";

pub fn coarse_csv_rows(dist: &CoarseDistribution) -> Vec<String> {
    dist.probs
        .iter()
        .enumerate()
        .map(|(k, p)| format!("{:.12e},{:.12e},{:.12e}", dist.grid.x(k), p, p / dist.grid.dx))
        .collect()
}

pub fn pair_csv_row(dx: f64, value: f64) -> String {
    format!("{dx:.12e},{value:.12e}")
}

pub fn schmidt_csv_row(dx: f64, r: &SchmidtReport) -> String {
    format!("{dx:.12e},{:.12e},{:.12e}", r.max_offdiag_gram, r.joint_distribution_defect)
}
