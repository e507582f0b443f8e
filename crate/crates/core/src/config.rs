//! Plain-text run configuration: `key = value` lines, `#` comments.
//!
//! Unknown keys are rejected with the offending line number.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fockspace::DEFAULT_TAIL_EPS;
use crate::model::{InitialConditions, ModelParams};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub ics: InitialConditions,
    /// Neglected Poisson mass per mode in the Fock oracle.
    pub tail_eps: f64,
    pub t_max: f64,
    pub t_steps: usize,
    /// Evaluation time for single-time experiments (hbar scan).
    pub t_eval: f64,
    pub hbar_list: Vec<f64>,
    /// Largest denominator in the revival sweep.
    pub s_max: u64,
    /// Mass threshold for attributing a classical position.
    pub eps_classical: f64,
    /// Packet width for the position-space experiments.
    pub width_b: f64,
    /// Reduced wavelength of the cat fringes.
    pub lambda: f64,
    /// Cat peak separation.
    pub q_sep: f64,
    /// Detector widths swept by the resolution experiments.
    pub dx_list: Vec<f64>,
    /// Weight of the first Schmidt term.
    pub schmidt_p0: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            ics: InitialConditions::default(),
            tail_eps: DEFAULT_TAIL_EPS,
            t_max: 20.0,
            t_steps: 50,
            t_eval: 1.0,
            hbar_list: vec![1.0, 0.1, 0.01, 0.001],
            s_max: 8,
            eps_classical: 0.05,
            width_b: 1.0,
            lambda: 0.2,
            q_sep: 3.0,
            dx_list: vec![0.01, 0.1, 0.2, 0.5, 1.0, 2.0, 3.5, 5.0, 10.0],
            schmidt_p0: 0.5,
        }
    }
}

pub const KEYS: &[&str] = &[
    "omega1",
    "omega2",
    "g1",
    "g2",
    "g",
    "hbar",
    "mass",
    "q10",
    "p10",
    "q20",
    "p20",
    "tail_eps",
    "t_max",
    "t_steps",
    "t_eval",
    "hbar_list",
    "s_max",
    "eps_classical",
    "width_b",
    "lambda",
    "q_sep",
    "dx_list",
    "schmidt_p0",
];

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| Error::Config { line, msg: format!("expected `key = value`, got `{content}`") })?;
            cfg.set(key.trim(), value.trim(), line)?;
        }
        cfg.validate(0)?;
        Ok(cfg)
    }

    /// Applies `key=value` overrides; errors report line 0.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let o = o.as_ref();
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| Error::Config { line: 0, msg: format!("override must be key=value, got `{o}`") })?;
            self.set(key.trim(), value.trim(), 0)?;
        }
        self.validate(0)
    }

    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let real = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config { line, msg: format!("`{key}`: cannot parse `{value}` as a real number") })
        };
        let int = || -> Result<u64> {
            value.parse::<u64>().map_err(|_| Error::Config {
                line,
                msg: format!("`{key}`: cannot parse `{value}` as a nonnegative integer"),
            })
        };
        match key {
            "omega1" => self.params.omega1 = real()?,
            "omega2" => self.params.omega2 = real()?,
            "g1" => self.params.g1 = real()?,
            "g2" => self.params.g2 = real()?,
            "g" => self.params.g = real()?,
            "hbar" => self.params.hbar = real()?,
            "mass" => self.params.mass = real()?,
            "q10" => self.ics.q10 = real()?,
            "p10" => self.ics.p10 = real()?,
            "q20" => self.ics.q20 = real()?,
            "p20" => self.ics.p20 = real()?,
            "tail_eps" => self.tail_eps = real()?,
            "t_max" => self.t_max = real()?,
            "t_steps" => self.t_steps = int()? as usize,
            "t_eval" => self.t_eval = real()?,
            "s_max" => self.s_max = int()?,
            "eps_classical" => self.eps_classical = real()?,
            "width_b" => self.width_b = real()?,
            "lambda" => self.lambda = real()?,
            "q_sep" => self.q_sep = real()?,
            "schmidt_p0" => self.schmidt_p0 = real()?,
            "hbar_list" => self.hbar_list = parse_list(key, value, line)?,
            "dx_list" => self.dx_list = parse_list(key, value, line)?,
            _ => {
                return Err(Error::Config { line, msg: format!("unknown key `{key}`") });
            }
        }
        Ok(())
    }

    fn validate(&self, line: usize) -> Result<()> {
        let bad = |msg: String| Error::Config { line, msg };
        self.params.validate().map_err(|e| bad(e.to_string()))?;
        for (k, v) in [("q10", self.ics.q10), ("p10", self.ics.p10), ("q20", self.ics.q20), ("p20", self.ics.p20)] {
            if !v.is_finite() {
                return Err(bad(format!("{k} must be finite")));
            }
        }
        if !(self.tail_eps > 0.0 && self.tail_eps < 1.0) {
            return Err(bad(format!("tail_eps must lie in (0,1), got {}", self.tail_eps)));
        }
        if !(self.eps_classical > 0.0 && self.eps_classical < 1.0) {
            return Err(bad(format!("eps_classical must lie in (0,1), got {}", self.eps_classical)));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(bad("t_max must be a finite nonnegative time".into()));
        }
        if self.t_steps == 0 {
            return Err(bad("t_steps must be positive".into()));
        }
        if self.hbar_list.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
            return Err(bad("every hbar_list entry must be positive".into()));
        }
        if self.s_max == 0 || self.s_max > 64 {
            return Err(bad("s_max must lie in 1..=64".into()));
        }
        if !(self.width_b > 0.0 && self.width_b.is_finite()) {
            return Err(bad("width_b must be positive".into()));
        }
        if self.lambda == 0.0 || self.lambda.is_nan() {
            return Err(bad("lambda must be nonzero".into()));
        }
        if !self.q_sep.is_finite() {
            return Err(bad("q_sep must be finite".into()));
        }
        if self.dx_list.is_empty() || self.dx_list.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(bad("dx_list must hold positive widths".into()));
        }
        if !(0.0..=1.0).contains(&self.schmidt_p0) {
            return Err(bad("schmidt_p0 must lie in [0,1]".into()));
        }
        Ok(())
    }

    /// Full parameter set in config syntax, one `key = value` per entry.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let i = &self.ics;
        let mut out: Vec<(String, String)> = [
            ("omega1", p.omega1),
            ("omega2", p.omega2),
            ("g1", p.g1),
            ("g2", p.g2),
            ("g", p.g),
            ("hbar", p.hbar),
            ("mass", p.mass),
            ("q10", i.q10),
            ("p10", i.p10),
            ("q20", i.q20),
            ("p20", i.p20),
            ("tail_eps", self.tail_eps),
            ("t_max", self.t_max),
            ("t_eval", self.t_eval),
            ("eps_classical", self.eps_classical),
            ("width_b", self.width_b),
            ("lambda", self.lambda),
            ("q_sep", self.q_sep),
            ("schmidt_p0", self.schmidt_p0),
        ]
        .iter()
        .map(|(k, v)| (k.to_string(), format!("{v:e}")))
        .collect();
        out.push(("t_steps".into(), self.t_steps.to_string()));
        out.push(("s_max".into(), self.s_max.to_string()));
        out.push(("hbar_list".into(), join_list(&self.hbar_list)));
        out.push(("dx_list".into(), join_list(&self.dx_list)));
        out
    }
}

fn parse_list(key: &str, value: &str, line: usize) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config { line, msg: format!("`{key}`: cannot parse `{}`", s.trim()) })
        })
        .collect()
}

fn join_list(values: &[f64]) -> String {
    let mut out = String::new();
    for (n, v) in values.iter().enumerate() {
        if n > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v:e}");
    }
    out
}
