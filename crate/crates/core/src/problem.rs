//! Problem configuration: the equation, its controls and the numerical setup.
//!
//! A config is a TOML file:
//!
//! ```toml
//! n = 2
//! convention = "raw"      # or "normalized"
//! x0 = 0.0
//! horizon = 0.5           # T
//! points = 4097           # N
//! order = 12              # K
//!
//! [[coefficients]]
//! kind = "constant"
//! value = 1.0
//!
//! [[coefficients]]
//! kind = "poly"
//! coefficients = [0.0]
//!
//! [[coefficients]]
//! kind = "sine"
//! amp = 1.0
//! freq = 0.0
//! phase = 1.5707963267948966
//! ```
//!
//! Optional keys: `bound` (M override), `guard` (order guard), `ceiling`
//! (reference integrator blow-up threshold). Coefficients may also be given
//! as `kind = "samples"` with `values = [...]` on the grid, or as
//! `kind = "file"` with a CSV `path` whose column 0 is `t` and columns
//! `1..=n+1` hold the controls.

use std::path::{Path, PathBuf};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::quadrature::ControlGrid;
use crate::rk4::{rk4_polynomial, DEFAULT_CEILING};
use crate::series::{EquationSpec, DEFAULT_ORDER_GUARD};

/// How the configured coefficients enter the equation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `ẋ = Σ c_i x^i`
    #[default]
    Raw,
    /// `ẋ = Σ C(n,i) u_i x^i`
    Normalized,
}

/// One coefficient function of time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ControlSpec {
    Constant {
        value: f64,
    },
    /// `Σ_d coefficients[d] t^d`
    Poly {
        coefficients: Vec<f64>,
    },
    /// `amp sin(freq t + phase)`
    Sine {
        amp: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Values on the grid points, in order.
    Samples {
        values: Vec<f64>,
    },
    /// CSV samples, linearly interpolated onto the grid. `column` defaults to
    /// `i + 1` for coefficient `i`.
    File {
        path: PathBuf,
        #[serde(default)]
        column: Option<usize>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: usize,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default)]
    pub x0: f64,
    #[serde(alias = "T")]
    pub horizon: f64,
    #[serde(alias = "N")]
    pub points: usize,
    #[serde(alias = "K")]
    pub order: usize,
    #[serde(default, alias = "M_override")]
    pub bound: Option<f64>,
    #[serde(default)]
    pub guard: Option<usize>,
    #[serde(default)]
    pub ceiling: Option<f64>,
    pub coefficients: Vec<ControlSpec>,
    /// Directory that relative file paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ProblemConfig {
    /// Parses and validates a config; syntax errors carry line and column.
    pub fn from_toml_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: ProblemConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml_str(&text, base)
            .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_prefix(&e))))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, msg: String| Err(Error::Config(format!("field `{name}`: {msg}")));
        if self.coefficients.len() != self.n + 1 {
            return field(
                "coefficients",
                format!("expected n + 1 = {} entries, found {}", self.n + 1, self.coefficients.len()),
            );
        }
        if !self.horizon.is_finite() || self.horizon <= 0.0 {
            return field("horizon", format!("must be positive, got {}", self.horizon));
        }
        if self.points < 2 {
            return field("points", format!("must be at least 2, got {}", self.points));
        }
        if self.order < 1 {
            return field("order", "must be at least 1".into());
        }
        if !self.x0.is_finite() {
            return field("x0", "must be finite".into());
        }
        if let Some(m) = self.bound {
            if !m.is_finite() || m < 0.0 {
                return field("bound", format!("must be finite and non-negative, got {m}"));
            }
        }
        if let Some(c) = self.ceiling {
            if c.is_nan() || c <= 0.0 {
                return field("ceiling", format!("must be positive, got {c}"));
            }
        }
        for (i, c) in self.coefficients.iter().enumerate() {
            if let ControlSpec::Samples { values } = c {
                if values.len() != self.points {
                    return field(
                        &format!("coefficients[{i}].values"),
                        format!("expected {} samples, found {}", self.points, values.len()),
                    );
                }
            }
        }
        Ok(())
    }

    pub fn guard(&self) -> usize {
        self.guard.unwrap_or(DEFAULT_ORDER_GUARD)
    }

    pub fn ceiling(&self) -> f64 {
        self.ceiling.unwrap_or(DEFAULT_CEILING)
    }

    pub fn spec(&self) -> EquationSpec {
        EquationSpec::new(self.n).with_guard(self.guard())
    }

    pub fn step(&self) -> f64 {
        self.horizon / (self.points - 1) as f64
    }

    pub fn times(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.points).map(|j| j as f64 * h).collect()
    }

    /// Coefficient samples in the config's own convention.
    pub fn sample(&self) -> Result<Vec<Vec<f64>>> {
        let times = self.times();
        self.coefficients
            .iter()
            .enumerate()
            .map(|(i, c)| sample_control(c, i, &times, &self.base_dir))
            .collect()
    }

    /// Raw coefficient samples `c_i(t_j)`.
    pub fn sample_raw(&self) -> Result<Vec<Vec<f64>>> {
        let mut samples = self.sample()?;
        if self.convention == Convention::Normalized {
            for (i, s) in samples.iter_mut().enumerate() {
                let b = binomial_f64(self.n, i);
                s.iter_mut().for_each(|x| *x *= b);
            }
        }
        Ok(samples)
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(msg) => msg.clone(),
        other => other.to_string(),
    }
}

fn binomial_f64(n: usize, i: usize) -> f64 {
    binomial(n, i).to_f64().unwrap_or(f64::INFINITY)
}

fn sample_control(c: &ControlSpec, i: usize, times: &[f64], base: &Path) -> Result<Vec<f64>> {
    Ok(match c {
        ControlSpec::Constant { value } => vec![*value; times.len()],
        ControlSpec::Poly { coefficients } => times
            .iter()
            .map(|t| coefficients.iter().rev().fold(0.0, |acc, c| acc * t + c))
            .collect(),
        ControlSpec::Sine { amp, freq, phase } => {
            times.iter().map(|t| amp * (freq * t + phase).sin()).collect()
        }
        ControlSpec::Samples { values } => values.clone(),
        ControlSpec::File { path, column } => {
            let path = if path.is_absolute() { path.clone() } else { base.join(path) };
            let (t, u) = read_control_column(&path, column.unwrap_or(i + 1))?;
            interpolate(&t, &u, times).map_err(|msg| {
                Error::Config(format!("coefficients[{i}] ({}): {msg}", path.display()))
            })?
        }
    })
}

/// Reads `(t, column)` pairs from a control CSV. A non-numeric first row is
/// taken as a header.
pub fn read_control_column(path: &Path, column: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let (mut t, mut u) = (Vec::new(), Vec::new());
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |col: usize| -> Option<f64> { record.get(col)?.parse().ok() };
        match (parse(0), parse(column)) {
            (Some(a), Some(b)) => {
                t.push(a);
                u.push(b);
            }
            _ if row == 0 => continue,
            _ => {
                return Err(Error::Config(format!(
                    "{}: line {}: expected numeric t and column {column}",
                    path.display(),
                    row + 1
                )))
            }
        }
    }
    Ok((t, u))
}

/// Piecewise-linear interpolation of `(t, u)` at `at`; `t` must be increasing
/// and cover `at`.
fn interpolate(t: &[f64], u: &[f64], at: &[f64]) -> std::result::Result<Vec<f64>, String> {
    if t.len() < 2 {
        return Err("need at least two samples".into());
    }
    if t.windows(2).any(|w| w[1] <= w[0]) {
        return Err("sample times must be strictly increasing".into());
    }
    let (lo, hi) = (t[0], t[t.len() - 1]);
    let slack = 1e-9 * (hi - lo).abs().max(1.0);
    let mut out = Vec::with_capacity(at.len());
    let mut seg = 0;
    for &x in at {
        if x < lo - slack || x > hi + slack {
            return Err(format!("grid time {x} is outside the sampled range [{lo}, {hi}]"));
        }
        while seg + 2 < t.len() && x > t[seg + 1] {
            seg += 1;
        }
        let w = ((x - t[seg]) / (t[seg + 1] - t[seg])).clamp(0.0, 1.0);
        out.push(u[seg] + w * (u[seg + 1] - u[seg]));
    }
    Ok(out)
}

/// Equation spec and normalized control grid `u_i = c_i / C(n, i)`; the bound
/// `M` is the override if given, else the observed maximum of the `u_i`.
pub fn normalize_coefficients(cfg: &ProblemConfig) -> Result<(EquationSpec, ControlGrid)> {
    let mut samples = cfg.sample()?;
    if cfg.convention == Convention::Raw {
        for (i, s) in samples.iter_mut().enumerate() {
            let b = binomial_f64(cfg.n, i);
            s.iter_mut().for_each(|x| *x /= b);
        }
    }
    let grid = ControlGrid::new(cfg.horizon, samples, cfg.bound)
        .map_err(|e| Error::Config(format!("field `bound`: {}", strip_grid(&e))))?;
    Ok((cfg.spec(), grid))
}

fn strip_grid(e: &Error) -> String {
    match e {
        Error::Grid(msg) => msg.clone(),
        other => other.to_string(),
    }
}

/// Moves the initial value to zero with `y = x - x0`:
/// `c'_j = Σ_{i >= j} c_i C(i, j) x0^{i - j}`. The result is in the raw
/// convention with sampled coefficients; `x0 = 0` returns the config as is.
pub fn shift_initial_value(cfg: &ProblemConfig) -> Result<ProblemConfig> {
    if cfg.x0 == 0.0 {
        return Ok(cfg.clone());
    }
    let raw = cfg.sample_raw()?;
    let shifted = (0..=cfg.n)
        .map(|j| {
            (0..cfg.points)
                .map(|t| {
                    (j..=cfg.n)
                        .map(|i| raw[i][t] * binomial_f64(i, j) * cfg.x0.powi((i - j) as i32))
                        .sum()
                })
                .collect()
        })
        .map(|values| ControlSpec::Samples { values })
        .collect();
    Ok(ProblemConfig {
        convention: Convention::Raw,
        x0: 0.0,
        coefficients: shifted,
        ..cfg.clone()
    })
}

/// Reference solution of the configured equation, including `x0`.
pub fn rk4_oracle(cfg: &ProblemConfig) -> Result<Vec<f64>> {
    rk4_polynomial(&cfg.sample_raw()?, cfg.step(), cfg.x0, cfg.ceiling())
}
