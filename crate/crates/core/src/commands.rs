//! Named experiments that turn a run configuration into CSV artifacts.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::config::RunConfig;
use crate::dynamics::{hbar_scan, trajectory_table, ClosedForm, TRAJECTORY_HEADER};
use crate::entanglement::{
    entropy_table, linear_entropy_series, linear_entropy_short_time, reduced_density_closed_form, ENTROPY_HEADER,
};
use crate::error::{Error, Result};
use crate::fockspace::{evolve, reduce};
use crate::model::{Mode, ModelParams};
use crate::numeric::{gcd, linspace};
use crate::resolution::{
    cat_distribution, coarse_csv_rows, coarse_newton_trace, commutator_indicator, default_window, fringe_visibility,
    gaussian_on_lattice, harmonic_ehrenfest, newton_csv_row, pair_csv_row, schmidt_at_resolution, schmidt_csv_row,
    COARSE_HEADER, COMMUTATOR_HEADER, NEWTON_HEADER, SCHMIDT_HEADER, VISIBILITY_HEADER,
};
use crate::revivals::{
    cat_coefficients, cat_state_fidelity, component_count, parseval_sum, reconstruction_residual, revival_table,
    REVIVAL_HEADER,
};
use crate::selftest::{self, SELFTEST_HEADER};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Trajectory,
    HbarScan,
    Entropy,
    ReducedDensity,
    Revivals,
    CatFidelity,
    Fig2,
    CommutatorSweep,
    Ehrenfest,
    SchmidtSweep,
    Selftest,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Trajectory,
        Command::HbarScan,
        Command::Entropy,
        Command::ReducedDensity,
        Command::Revivals,
        Command::CatFidelity,
        Command::Fig2,
        Command::CommutatorSweep,
        Command::Ehrenfest,
        Command::SchmidtSweep,
        Command::Selftest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Trajectory => "trajectory",
            Command::HbarScan => "hbar-scan",
            Command::Entropy => "entropy",
            Command::ReducedDensity => "reduced-density",
            Command::Revivals => "revivals",
            Command::CatFidelity => "cat-fidelity",
            Command::Fig2 => "fig2",
            Command::CommutatorSweep => "commutator-sweep",
            Command::Ehrenfest => "ehrenfest",
            Command::SchmidtSweep => "schmidt-sweep",
            Command::Selftest => "selftest",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config { line: 0, msg: format!("unknown command `{s}`") })
    }
}

/// One invocation: command, optional config file, output directory, overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub command: Command,
    pub config: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub overrides: Vec<String>,
    pub tail_eps: Option<f64>,
}

impl RunSpec {
    pub fn new(command: Command, out_dir: impl Into<PathBuf>) -> Self {
        Self { command, config: None, out_dir: out_dir.into(), overrides: Vec::new(), tail_eps: None }
    }

    pub fn load_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        cfg.apply_overrides(&self.overrides)?;
        if let Some(eps) = self.tail_eps {
            cfg.apply_overrides(&[format!("tail_eps={eps}")])?;
        }
        Ok(cfg)
    }
}

/// CSV artifact with a comment header recording version, command and parameters.
struct Artifact<'a> {
    dir: &'a Path,
    command: Command,
    cfg: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl<'a> Artifact<'a> {
    fn write<I, S>(&mut self, file: &str, extra: &[(&str, String)], columns: &str, rows: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let path = self.dir.join(file);
        let mut out = std::io::BufWriter::new(fs::File::create(&path)?);
        writeln!(out, "# lowres {VERSION}")?;
        writeln!(out, "# command = {}", self.command)?;
        for (k, v) in self.cfg.to_key_values() {
            writeln!(out, "# {k} = {v}")?;
        }
        for (k, v) in extra {
            writeln!(out, "# {k} = {v}")?;
        }
        writeln!(out, "{columns}")?;
        for row in rows {
            writeln!(out, "{}", row.as_ref())?;
        }
        out.flush()?;
        self.written.push(path);
        Ok(())
    }
}

fn times(cfg: &RunConfig) -> Vec<f64> {
    linspace(0.0, cfg.t_max, cfg.t_steps)
}

fn form_name(form: ClosedForm) -> &'static str {
    match form {
        ClosedForm::AsPrinted => "printed",
        ClosedForm::OracleCorrected => "corrected",
    }
}

/// Executes `spec` and returns the artifact paths in write order.
pub fn run(spec: &RunSpec) -> Result<Vec<PathBuf>> {
    let cfg = spec.load_config()?;
    fs::create_dir_all(&spec.out_dir)?;
    let mut art = Artifact { dir: &spec.out_dir, command: spec.command, cfg: &cfg, written: Vec::new() };
    let p = &cfg.params;
    let i = &cfg.ics;
    match spec.command {
        Command::Trajectory => {
            let rows = trajectory_table(p, i, &times(&cfg), ClosedForm::OracleCorrected);
            art.write("trajectory.csv", &[], TRAJECTORY_HEADER, rows.iter().map(|r| r.to_csv()))?;
        }
        Command::HbarScan => {
            let entropies = cfg
                .hbar_list
                .par_iter()
                .map(|&h| {
                    let scaled = p.with_hbar(h);
                    Ok((
                        linear_entropy_series(&scaled, i, cfg.t_eval, cfg.tail_eps)?,
                        linear_entropy_short_time(&scaled, i, cfg.t_eval),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut rows = Vec::new();
            for form in [ClosedForm::AsPrinted, ClosedForm::OracleCorrected] {
                for mode in Mode::BOTH {
                    let scan = hbar_scan(p, i, cfg.t_eval, &cfg.hbar_list, mode, form)?;
                    for (r, (exact, short)) in scan.iter().zip(&entropies) {
                        rows.push(format!(
                            "{:.12e},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                            r.hbar,
                            mode.index(),
                            form_name(form),
                            r.residual_angle,
                            r.residual_norm,
                            exact,
                            short.z_form,
                            short.s_form
                        ));
                    }
                }
            }
            art.write(
                "hbar_scan.csv",
                &[],
                "hbar,mode,form,residual_angle,residual_norm,E_exact,E_short_zform,E_short_sform",
                rows,
            )?;
        }
        Command::Entropy => {
            let rows = entropy_table(p, i, &times(&cfg), cfg.tail_eps, true)?;
            art.write("entropy.csv", &[], ENTROPY_HEADER, rows.iter().map(|r| r.to_csv()))?;
        }
        Command::ReducedDensity => {
            let closed = reduced_density_closed_form(p, i, cfg.t_eval, cfg.tail_eps)?;
            let state = evolve(p, i, cfg.t_eval, cfg.tail_eps)?;
            let oracle = reduce(&state, Mode::One);
            closed.check(cfg.tail_eps)?;
            oracle.check(cfg.tail_eps)?;
            let dim = closed.dim().max(oracle.dim());
            let entry = |m: &crate::fockspace::DensityMatrix, n: usize, k: usize| {
                if n < m.dim() && k < m.dim() {
                    m.get(n, k)
                } else {
                    num_complex::Complex64::new(0.0, 0.0)
                }
            };
            let rows = (0..dim).flat_map(|n| (0..dim).map(move |k| (n, k))).map(|(n, k)| {
                let c = entry(&closed, n, k);
                let o = entry(&oracle, n, k);
                format!("{n},{k},{:.12e},{:.12e},{:.12e},{:.12e}", c.re, c.im, o.re, o.im)
            });
            art.write(
                "reduced_density.csv",
                &[("t", format!("{:e}", cfg.t_eval))],
                "n,np,re_closed,im_closed,re_oracle,im_oracle",
                rows,
            )?;
            art.write(
                "fock_probs.csv",
                &[("t", format!("{:e}", cfg.t_eval))],
                "n,m,prob",
                state.probabilities().map(|(n, m, pr)| format!("{n},{m},{pr:.12e}")),
            )?;
        }
        Command::Revivals => {
            let rows = revival_table(p, i, cfg.s_max, cfg.tail_eps)?;
            art.write("revivals.csv", &[], REVIVAL_HEADER, rows.iter().map(|r| r.to_csv()))?;
        }
        Command::CatFidelity => {
            let decoupled = ModelParams { g: 0.0, ..*p };
            let fractions: Vec<(u64, u64)> = (1..=cfg.s_max.min(8))
                .flat_map(|s| (1..2 * s).filter(move |&r| gcd(r, s) == 1).map(move |r| (r, s)))
                .collect();
            let rows = fractions
                .par_iter()
                .map(|&(r, s)| {
                    let f = cat_state_fidelity(&decoupled, i, r, s, cfg.tail_eps)?;
                    let parseval = (parseval_sum(&cat_coefficients(r, s)?) - 1.0).abs();
                    let recon = reconstruction_residual(r, s, 100)?;
                    Ok(format!("{r},{s},{},{f:.12e},{parseval:.12e},{recon:.12e}", component_count(r, s)?))
                })
                .collect::<Result<Vec<String>>>()?;
            art.write("cat_fidelity.csv", &[], "r,s,l,fidelity,parseval_residual,reconstruction_residual", rows)?;
        }
        Command::Fig2 => {
            let b = cfg.width_b;
            let panels = [
                ('a', 1.0, 0.01),
                ('b', 1.0, 0.2),
                ('c', 1.0, 0.5),
                ('d', 3.0, 0.01),
                ('e', 3.0, 0.5),
                ('f', 3.0, 3.5),
            ];
            let dists = panels
                .par_iter()
                .map(|&(_, q, dx)| cat_distribution(q * b, b, cfg.lambda, dx * b, 0.005 * b))
                .collect::<Result<Vec<_>>>()?;
            for ((tag, q, dx), dist) in panels.iter().zip(&dists) {
                let extra = [("q", format!("{:e}", q * b)), ("dx", format!("{:e}", dx * b))];
                art.write(&format!("fig2_{tag}.csv"), &extra, COARSE_HEADER, coarse_csv_rows(dist))?;
            }
            let window = default_window(cfg.q_sep, b);
            let vis = cfg
                .dx_list
                .par_iter()
                .map(|&dx| {
                    let dist = cat_distribution(cfg.q_sep, b, cfg.lambda, dx, (0.005 * b).min(dx))?;
                    // NaN marks widths where the window spans a single detector
                    Ok(pair_csv_row(dx, fringe_visibility(&dist, window).unwrap_or(f64::NAN)))
                })
                .collect::<Result<Vec<String>>>()?;
            art.write(
                "fig2_visibility.csv",
                &[("window", format!("{:e},{:e}", window.0, window.1))],
                VISIBILITY_HEADER,
                vis,
            )?;
        }
        Command::CommutatorSweep => {
            let sigma = cfg.width_b;
            let rows = cfg
                .dx_list
                .par_iter()
                .map(|&dx| Ok(pair_csv_row(dx, commutator_indicator(&gaussian_on_lattice(sigma, dx)?))))
                .collect::<Result<Vec<String>>>()?;
            art.write("commutator_sweep.csv", &[("sigma", format!("{sigma:e}"))], COMMUTATOR_HEADER, rows)?;
        }
        Command::Ehrenfest => {
            let omega = p.omega1;
            let b = (p.hbar / (p.mass * omega)).sqrt();
            let x0 = i.q10;
            let fine = [25usize, 50, 100, 200]
                .par_iter()
                .map(|&steps| {
                    let r = harmonic_ehrenfest(x0, b, p.mass, omega, steps, 1e-3 * b)?;
                    Ok(pair_csv_row(2.0 * std::f64::consts::PI / omega / steps as f64, r))
                })
                .collect::<Result<Vec<String>>>()?;
            art.write("ehrenfest_fine.csv", &[("amplitude", format!("{x0:e}"))], "dt,residual", fine)?;
            let coarse_dx = cfg.dx_list.iter().copied().fold(0.0, f64::max);
            let ts = linspace(0.0, 2.0 * std::f64::consts::PI / omega, cfg.t_steps.max(3));
            let trace = coarse_newton_trace(x0, b, omega, coarse_dx, &ts, cfg.eps_classical)?;
            art.write(
                "ehrenfest_coarse.csv",
                &[("detector_dx", format!("{coarse_dx:e}")), ("amplitude", format!("{x0:e}"))],
                NEWTON_HEADER,
                trace.iter().map(newton_csv_row),
            )?;
        }
        Command::SchmidtSweep => {
            let rows = cfg
                .dx_list
                .par_iter()
                .map(|&dx| Ok(schmidt_csv_row(dx, &schmidt_at_resolution(cfg.schmidt_p0, cfg.width_b, dx)?)))
                .collect::<Result<Vec<String>>>()?;
            art.write("schmidt_sweep.csv", &[], SCHMIDT_HEADER, rows)?;
        }
        Command::Selftest => {
            let outcomes = selftest::run_all();
            art.write("selftest.csv", &[], SELFTEST_HEADER, outcomes.iter().map(|o| o.to_csv()))?;
            selftest::verdict(&outcomes)?;
        }
    }
    Ok(art.written)
}
