//! Experiment configuration: spec strings for moduli, boundary data, point
//! sets and zero sets, plus the flat `key=value` config file with section
//! headers. Command-line flags override file values; every default is
//! documented in the CLI help.

use crate::boundary::{BoundaryFunction, ChordFactor};
use crate::carleson::CarlesonSet;
use crate::diagnostics::GridSpec;
use crate::modulus::Modulus;
use num_complex::Complex64;
use thiserror::Error;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown modulus spec `{0}` (expected power:ALPHA, logtype, or table:PATH)")]
    BadModulus(String),
    #[error("unknown boundary spec `{0}` (expected const:C, chord:ANGLE,EXP[;...][@SCALE], hE:SET,MODULUS, or table:PATH)")]
    BadBoundary(String),
    #[error("unknown set spec `{0}` (expected pm1, points:A;B;..., cantor:RATIO:DEPTH, or slowcantor:DEPTH)")]
    BadSet(String),
    #[error("unknown points spec `{0}` (expected grid:interior:N, boundary:N, or disk:N:J)")]
    BadPoints(String),
    #[error("bad number `{0}`")]
    BadNumber(String),
    #[error("config file line {line}: {msg}")]
    BadFile { line: usize, msg: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

/// Numeric tolerances shared across the pipeline.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Target relative accuracy of the quadratures.
    pub quad_rel: f64,
    /// Chord margin around the zero set inside which the boundary phase is
    /// refused rather than fabricated.
    pub margin: f64,
    /// Relative threshold below which tabulated samples count as zeros.
    pub zero_threshold: f64,
    /// Stability-ratio threshold for desk-scale finiteness verdicts.
    pub stability: f64,
    /// Fraction of the comparability arc sampled by the convergence probe.
    pub probe_fraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { quad_rel: 1e-8, margin: 1e-10, zero_threshold: 1e-12, stability: 1.1, probe_fraction: 0.125 }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub tol: Tolerances,
}

fn num(s: &str) -> Result<f64, ConfigError> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| ConfigError::BadNumber(s.into()))?;
        let q: f64 = q.trim().parse().map_err(|_| ConfigError::BadNumber(s.into()))?;
        if q == 0.0 {
            return Err(ConfigError::BadNumber(s.into()));
        }
        return Ok(p / q);
    }
    s.parse().map_err(|_| ConfigError::BadNumber(s.into()))
}

/// `power:0.5`, `power:1/4`, `logtype`, `table:knots.csv`.
pub fn parse_modulus(spec: &str) -> Result<Modulus, ConfigError> {
    let spec = spec.trim();
    if spec == "logtype" {
        return Ok(Modulus::logtype());
    }
    if let Some(alpha) = spec.strip_prefix("power:") {
        return Modulus::power(num(alpha)?).map_err(|e| ConfigError::Invalid(e.to_string()));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let text = std::fs::read_to_string(path.trim())?;
        return Modulus::from_csv(&text).map_err(|e| ConfigError::Invalid(e.to_string()));
    }
    Err(ConfigError::BadModulus(spec.into()))
}

/// `pm1`, `points:0;3.14;5`, `cantor:1/3:6`, `slowcantor:9`.
pub fn parse_carleson_set(spec: &str) -> Result<CarlesonSet, ConfigError> {
    let spec = spec.trim();
    if spec == "pm1" {
        return Ok(CarlesonSet::plus_minus_one());
    }
    if let Some(rest) = spec.strip_prefix("points:") {
        let pts: Result<Vec<f64>, _> = rest.split(';').map(num).collect();
        return CarlesonSet::from_points(&pts?).map_err(|e| ConfigError::Invalid(e.to_string()));
    }
    if let Some(rest) = spec.strip_prefix("cantor:") {
        let mut it = rest.split(':');
        let ratio = num(it.next().ok_or_else(|| ConfigError::BadSet(spec.into()))?)?;
        let depth = num(it.next().ok_or_else(|| ConfigError::BadSet(spec.into()))?)? as u32;
        return CarlesonSet::cantor(ratio, depth).map_err(|e| ConfigError::Invalid(e.to_string()));
    }
    if let Some(rest) = spec.strip_prefix("slowcantor:") {
        let depth = num(rest)? as u32;
        return CarlesonSet::slow_cantor(depth).map_err(|e| ConfigError::Invalid(e.to_string()));
    }
    Err(ConfigError::BadSet(spec.into()))
}

/// `const:1`, `chord:0,1`, `chord:0,0.5;3.14,1@2.0`, `hE:pm1,power:0.5`,
/// `table:samples.csv`.
pub fn parse_boundary(spec: &str, zero_threshold: f64) -> Result<BoundaryFunction, ConfigError> {
    let spec = spec.trim();
    if let Some(c) = spec.strip_prefix("const:") {
        return BoundaryFunction::constant(num(c)?).map_err(|e| ConfigError::Invalid(e.to_string()));
    }
    if let Some(rest) = spec.strip_prefix("chord:") {
        let (body, scale) = match rest.rsplit_once('@') {
            Some((b, s)) => (b, num(s)?),
            None => (rest, 1.0),
        };
        let mut factors = Vec::new();
        for part in body.split(';') {
            let (a, b) = part.split_once(',').ok_or_else(|| ConfigError::BadBoundary(spec.into()))?;
            factors.push(ChordFactor { angle: num(a)?, exponent: num(b)? });
        }
        return BoundaryFunction::chord_product(scale, factors).map_err(|e| ConfigError::Invalid(e.to_string()));
    }
    if let Some(rest) = spec.strip_prefix("hE:") {
        let (set_spec, mod_spec) = rest.rsplit_once(',').ok_or_else(|| ConfigError::BadBoundary(spec.into()))?;
        let set = parse_carleson_set(set_spec)?;
        let omega = parse_modulus(mod_spec)?;
        return Ok(set.build_h_e(&omega));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let text = std::fs::read_to_string(path.trim())?;
        return BoundaryFunction::from_csv(&text, zero_threshold).map_err(|e| ConfigError::Invalid(e.to_string()));
    }
    Err(ConfigError::BadBoundary(spec.into()))
}

/// Evaluation point sets for the batch evaluator.
#[derive(Debug, Clone)]
pub enum PointSet {
    /// N×N polar grid strictly inside the disk.
    Interior(usize),
    /// N equispaced boundary points.
    Boundary(usize),
    /// N angles × J interior layers 1-2^{-j} plus the boundary.
    Disk(usize, usize),
}

pub fn parse_points(spec: &str) -> Result<PointSet, ConfigError> {
    let spec = spec.trim();
    if let Some(n) = spec.strip_prefix("grid:interior:") {
        return Ok(PointSet::Interior(num(n)? as usize));
    }
    if let Some(n) = spec.strip_prefix("boundary:") {
        return Ok(PointSet::Boundary(num(n)? as usize));
    }
    if let Some(rest) = spec.strip_prefix("disk:") {
        let (n, j) = rest.split_once(':').ok_or_else(|| ConfigError::BadPoints(spec.into()))?;
        return Ok(PointSet::Disk(num(n)? as usize, num(j)? as usize));
    }
    Err(ConfigError::BadPoints(spec.into()))
}

impl PointSet {
    pub fn points(&self) -> Vec<Complex64> {
        match *self {
            PointSet::Interior(n) => {
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    let r = (i + 1) as f64 / (n + 1) as f64;
                    for j in 0..n {
                        let theta = TAU * (j as f64 + 0.5) / n as f64;
                        out.push(Complex64::from_polar(r, theta));
                    }
                }
                out
            }
            PointSet::Boundary(n) => (0..n).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / n as f64)).collect(),
            PointSet::Disk(n, layers) => {
                let mut out = Vec::with_capacity(n * (layers + 1));
                for j in 1..=layers {
                    let r = 1.0 - 0.5f64.powi(j as i32);
                    for i in 0..n {
                        out.push(Complex64::from_polar(r, TAU * i as f64 / n as f64));
                    }
                }
                for i in 0..n {
                    out.push(Complex64::from_polar(1.0, TAU * i as f64 / n as f64));
                }
                out
            }
        }
    }
}

/// Flat `key=value` file with `[section]` headers; `#` starts a comment.
pub fn parse_kv_file(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    let mut section = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or(ConfigError::BadFile { line: i + 1, msg: "unterminated section header".into() })?;
            section = name.trim().to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or(ConfigError::BadFile { line: i + 1, msg: "expected key=value".into() })?;
        let key = if section.is_empty() { k.trim().to_string() } else { format!("{section}.{}", k.trim()) };
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let kv = parse_kv_file(&text)?;
        let mut cfg = ExperimentConfig::default();
        for (key, value) in &kv {
            match key.as_str() {
                "grid.circle_n" => cfg.grid.circle_n = num(value)? as usize,
                "grid.disk_layers" => cfg.grid.disk_layers = num(value)? as usize,
                "grid.pair_depth" => cfg.grid.pair_depth = num(value)? as usize,
                "grid.levels" => cfg.grid.levels = num(value)? as u32,
                "tolerances.quad_rel" => cfg.tol.quad_rel = num(value)?,
                "tolerances.margin" => cfg.tol.margin = num(value)?,
                "tolerances.zero_threshold" => cfg.tol.zero_threshold = num(value)?,
                "tolerances.stability" => cfg.tol.stability = num(value)?,
                "tolerances.probe_fraction" => cfg.tol.probe_fraction = num(value)?,
                other => return Err(ConfigError::Invalid(format!("unknown config key `{other}`"))),
            }
        }
        if cfg.grid.levels < 2 {
            return Err(ConfigError::Invalid("grid.levels must be ≥ 2 so stability verdicts are defined".into()));
        }
        Ok(cfg)
    }
}
