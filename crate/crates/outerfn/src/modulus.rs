//! Moduli of continuity on [0, 2] and their growth classification.
//!
//! A modulus is a nondecreasing continuous ω with ω(0) = 0, ω(1) = 1 and
//! ω(t)/t nonincreasing. Three families are supported: the powers t^α, the
//! logarithmic modulus 1/(1+|log t|), and monotone piecewise-linear tables.
//! Classification estimates the Dini-type constant sup_s (∫_0^s ω(t)/t dt)/ω(s),
//! the tail constant sup_s (∫_s^2 ω(t)/t² dt)/(ω(s)/s), and the doubling
//! infimum inf_t ω(t²)/ω(t)^ρ, each with grid-refinement stability checks and
//! explicit divergence detection instead of silent non-convergence.

use crate::quad::{self, QuadError};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModulusError {
    #[error("power exponent must lie in (0, 1], got {0}")]
    BadExponent(f64),
    #[error("argument {0} outside the modulus domain [0, 2]")]
    Domain(f64),
    #[error("table: {0}")]
    BadTable(String),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("rho must lie in [1, 2], got {0}")]
    BadRho(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone)]
enum Family {
    Power { alpha: f64 },
    LogType,
    Table { knots: Vec<(f64, f64)> },
}

/// A validated modulus of continuity on [0, 2].
#[derive(Debug, Clone)]
pub struct Modulus {
    family: Family,
}

impl Modulus {
    /// ω(t) = t^α for α ∈ (0, 1].
    pub fn power(alpha: f64) -> Result<Self, ModulusError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(ModulusError::BadExponent(alpha));
        }
        Ok(Modulus { family: Family::Power { alpha } })
    }

    /// ω(t) = 1/(1 + |log t|) for t ≤ 1, extended by the constant 1 on (1, 2]
    /// (the raw formula would decrease past t = 1).
    pub fn logtype() -> Self {
        Modulus { family: Family::LogType }
    }

    /// Piecewise-linear modulus through the given knots.
    ///
    /// Knots must start at (0, 0), be strictly increasing in t, contain
    /// (1, 1), and satisfy the monotonicity axioms; a final knot short of
    /// t = 2 extends as a constant.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self, ModulusError> {
        if knots.len() < 2 {
            return Err(ModulusError::BadTable("need at least two knots".into()));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(ModulusError::BadTable("first knot must be (0, 0)".into()));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(ModulusError::BadTable(format!("knot abscissas not strictly increasing at t={}", w[1].0)));
            }
        }
        let last = knots.last().unwrap().0;
        if last > 2.0 + 1e-12 {
            return Err(ModulusError::BadTable(format!("knot t={last} outside [0, 2]")));
        }
        if !knots.iter().any(|&(t, w)| (t - 1.0).abs() < 1e-12 && (w - 1.0).abs() < 1e-12) {
            return Err(ModulusError::BadTable("table must contain the knot (1, 1)".into()));
        }
        let m = Modulus { family: Family::Table { knots } };
        let viol = m.validate();
        if !viol.is_empty() {
            return Err(ModulusError::BadTable(viol[0].to_string()));
        }
        Ok(m)
    }

    /// Load a table modulus from CSV with header `t,omega`.
    pub fn from_csv(text: &str) -> Result<Self, ModulusError> {
        let mut knots = Vec::new();
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "t,omega" => {}
            _ => return Err(ModulusError::Csv { line: 1, msg: "expected header `t,omega`".into() }),
        }
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64, ModulusError> {
                s.ok_or(ModulusError::Csv { line: i + 1, msg: "missing field".into() })?
                    .trim()
                    .parse()
                    .map_err(|e| ModulusError::Csv { line: i + 1, msg: format!("{e}") })
            };
            let t = parse(parts.next())?;
            let w = parse(parts.next())?;
            knots.push((t, w));
        }
        Self::from_knots(knots)
    }

    pub fn describe(&self) -> String {
        match &self.family {
            Family::Power { alpha } => format!("power:{alpha}"),
            Family::LogType => "logtype".into(),
            Family::Table { knots } => format!("table[{} knots]", knots.len()),
        }
    }

    /// ω(t) for t ∈ [0, 2].
    pub fn eval(&self, t: f64) -> Result<f64, ModulusError> {
        if !(0.0..=2.0 + 1e-12).contains(&t) {
            return Err(ModulusError::Domain(t));
        }
        Ok(self.val(t))
    }

    /// Unchecked evaluation; callers guarantee t ∈ [0, 2].
    pub(crate) fn val(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { alpha } => {
                if t <= 0.0 {
                    0.0
                } else {
                    t.powf(*alpha)
                }
            }
            Family::LogType => {
                if t <= 0.0 {
                    0.0
                } else if t >= 1.0 {
                    1.0
                } else {
                    1.0 / (1.0 - t.ln())
                }
            }
            Family::Table { knots } => {
                let t = t.min(knots.last().unwrap().0);
                let idx = knots.partition_point(|&(x, _)| x <= t);
                if idx == 0 {
                    return knots[0].1;
                }
                if idx == knots.len() {
                    return knots.last().unwrap().1;
                }
                let (t0, w0) = knots[idx - 1];
                let (t1, w1) = knots[idx];
                w0 + (w1 - w0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// log ω(e^lt) as a function of lt = log t, stable for arguments far
    /// below the floating-point range of t itself.
    pub(crate) fn log_val(&self, lt: f64) -> f64 {
        match &self.family {
            Family::Power { alpha } => alpha * lt,
            Family::LogType => {
                if lt >= 0.0 {
                    0.0
                } else {
                    -(-lt).ln_1p()
                }
            }
            Family::Table { knots } => {
                let t = lt.exp();
                let (t1, w1) = knots[1];
                if t < t1 {
                    // linear segment through the origin: ω(t) = (w1/t1)·t
                    (w1 / t1).ln() + lt
                } else {
                    self.val(t).ln()
                }
            }
        }
    }

    /// Leftmost preimage ω*(t) = inf{u ∈ [0,1] : ω(u) = t}, t ∈ [0, 1].
    ///
    /// Located by predicate bisection on log u, which keeps full relative
    /// accuracy down to preimages far below the absolute bisection scale.
    pub fn inverse_star(&self, t: f64) -> Result<f64, ModulusError> {
        if !(0.0..=1.0 + 1e-12).contains(&t) {
            return Err(ModulusError::Domain(t));
        }
        Ok(self.inv_star(t.min(1.0)))
    }

    pub(crate) fn inv_star(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        // closed forms where they exist; bisection otherwise
        match &self.family {
            Family::Power { alpha } => return t.powf(1.0 / alpha).min(1.0),
            Family::LogType => return if t >= 1.0 { 1.0 } else { (1.0 - 1.0 / t).exp() },
            Family::Table { .. } => {}
        }
        // predicate ω(e^v) ≥ t is monotone in v; bisect to the left edge
        let mut lo = -760.0;
        let mut hi = 0.0;
        if self.log_val(lo) >= t.ln() {
            return lo.exp();
        }
        for _ in 0..90 {
            let mid = 0.5 * (lo + hi);
            if self.val(mid.exp()) >= t {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi.exp()
    }

    /// Axiom check on a dense grid; an empty list means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.val(0.0).abs() > 1e-12 {
            out.push(Violation::NormalizationZero { got: self.val(0.0) });
        }
        if (self.val(1.0) - 1.0).abs() > 1e-12 {
            out.push(Violation::NormalizationOne { got: self.val(1.0) });
        }
        let grid = self.validation_grid();
        for w in grid.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            let (v0, v1) = (self.val(t0), self.val(t1));
            if v1 < v0 - 1e-12 {
                out.push(Violation::NotMonotone { t0, t1 });
            }
            if t0 > 0.0 && v1 / t1 > v0 / t0 + 1e-9 * (v0 / t0).max(1.0) {
                out.push(Violation::RatioIncreasing { t0, t1 });
            }
        }
        out
    }

    fn validation_grid(&self) -> Vec<f64> {
        let mut grid: Vec<f64> = match &self.family {
            Family::Table { knots } => {
                let mut g: Vec<f64> = knots.iter().map(|&(t, _)| t).collect();
                let mids: Vec<f64> = knots.windows(2).map(|w| 0.5 * (w[0].0 + w[1].0)).collect();
                g.extend(mids);
                g
            }
            _ => Vec::new(),
        };
        grid.extend((0..=512).map(|i| 2.0 * i as f64 / 512.0));
        grid.extend(log_grid(1e-12, 2.0, 16));
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        grid
    }

    /// Dini constant: sup_s of (∫_0^s ω(t)/t dt)/ω(s) with divergence detection.
    pub fn fast_constant(&self) -> Result<ClassificationResult, ModulusError> {
        self.fast_constant_with(&ClassifyConfig::default())
    }

    pub fn fast_constant_with(&self, cfg: &ClassifyConfig) -> Result<ClassificationResult, ModulusError> {
        let mut prev: Option<f64> = None;
        let mut levels = 0u32;
        let mut result = (0.0f64, 0.0f64); // (sup, witness)
        let mut stability = f64::INFINITY;
        for level in 0..cfg.max_levels {
            levels = level + 1;
            let grid = log_grid(cfg.fast_s_min, 2.0, cfg.per_decade << level);
            let mut sup = f64::NEG_INFINITY;
            let mut witness = grid[0];
            for &s in &grid {
                let mut f = |t: f64| self.val(t) / t;
                match quad::shell_integral(&mut f, s, 0.5, cfg.quad_rtol, cfg.max_shells, 0.0)? {
                    None => {
                        // divergence is a value, not an error; confirm on a finer grid point
                        return Ok(ClassificationResult {
                            kind: ClassKind::Fast,
                            constant: None,
                            witness: s,
                            grid_levels: levels,
                            stability: 0.0,
                        });
                    }
                    Some(integral) => {
                        let ratio = integral / self.val(s);
                        if ratio > sup {
                            sup = ratio;
                            witness = s;
                        }
                    }
                }
            }
            result = (sup, witness);
            if let Some(p) = prev {
                stability = (sup - p).abs() / sup.abs().max(1e-300);
                if stability <= cfg.grid_rtol {
                    break;
                }
            }
            prev = Some(sup);
        }
        Ok(ClassificationResult {
            kind: ClassKind::Fast,
            constant: Some(result.0),
            witness: result.1,
            grid_levels: levels,
            stability,
        })
    }

    /// Tail constant: sup_s of (∫_s^2 ω(t)/t² dt)/(ω(s)/s).
    ///
    /// The integral is proper for every s > 0, so there is no divergence
    /// branch; refinement extends the probe grid toward s = 0 until the sup
    /// stabilizes.
    pub fn slow_constant(&self) -> Result<ClassificationResult, ModulusError> {
        self.slow_constant_with(&ClassifyConfig::default())
    }

    pub fn slow_constant_with(&self, cfg: &ClassifyConfig) -> Result<ClassificationResult, ModulusError> {
        let mut prev: Option<f64> = None;
        let mut levels = 0u32;
        let mut result = (0.0f64, 0.0f64);
        let mut stability = f64::INFINITY;
        let mut s_min = cfg.slow_s_min;
        for level in 0..cfg.max_levels {
            levels = level + 1;
            let grid = log_grid(s_min, 2.0, cfg.slow_per_decade);
            let mut sup = f64::NEG_INFINITY;
            let mut witness = grid[0];
            for &s in &grid {
                if s >= 2.0 {
                    continue;
                }
                let ratio = self.tail_integral(s) / (self.val(s) / s);
                if ratio > sup {
                    sup = ratio;
                    witness = s;
                }
            }
            result = (sup, witness);
            if let Some(p) = prev {
                stability = (sup - p).abs() / sup.abs().max(1e-300);
                if stability <= cfg.grid_rtol {
                    break;
                }
            }
            prev = Some(sup);
            s_min = (s_min * s_min).max(1e-60);
        }
        Ok(ClassificationResult {
            kind: ClassKind::Slow,
            constant: Some(result.0),
            witness: result.1,
            grid_levels: levels,
            stability,
        })
    }

    /// ∫_s^2 ω(t)/t² dt over doubling shells.
    fn tail_integral(&self, s: f64) -> f64 {
        let mut f = |t: f64| self.val(t) / (t * t);
        let mut sum = 0.0;
        let mut lo = s;
        while lo < 2.0 {
            let hi = (2.0 * lo).min(2.0);
            sum += quad::gauss16(&mut f, lo, hi);
            lo = hi;
        }
        sum
    }

    /// Doubling infimum inf_t ω(t²)/ω(t)^ρ over t ∈ (0, √2].
    ///
    /// Evaluated in log space so the probe reaches scales far below the
    /// floating-point range of t; refinement extends the probe deeper until
    /// the infimum stabilizes. An infimum that keeps decaying toward zero is
    /// reported as the constant 0 (not ρ-slow), never as an error.
    pub fn rho_slow_eta(&self, rho: f64) -> Result<ClassificationResult, ModulusError> {
        self.rho_slow_eta_with(rho, &ClassifyConfig::default())
    }

    pub fn rho_slow_eta_with(&self, rho: f64, cfg: &ClassifyConfig) -> Result<ClassificationResult, ModulusError> {
        if !(1.0..=2.0).contains(&rho) {
            return Err(ModulusError::BadRho(rho));
        }
        let lt_max = 0.5 * std::f64::consts::LN_2; // log √2
        let mut prev: Option<f64> = None;
        let mut levels = 0u32;
        let mut inf = f64::INFINITY;
        let mut witness_lt = lt_max;
        let mut stability = f64::INFINITY;
        let mut depth = cfg.rho_depth;
        for level in 0..cfg.max_levels {
            levels = level + 1;
            // shallow probes in t, deep probes uniform in log t
            let mut probes: Vec<f64> = log_grid(1e-12, 1.0, cfg.per_decade).iter().map(|t| t.ln()).collect();
            probes.push(lt_max);
            let deep_n = 1024;
            for i in 0..=deep_n {
                probes.push(-depth * (i as f64 + 1.0) / (deep_n as f64 + 1.0));
            }
            for &lt in &probes {
                if lt > lt_max {
                    continue;
                }
                let ratio = (self.log_val(2.0 * lt) - rho * self.log_val(lt)).exp();
                if ratio < inf {
                    inf = ratio;
                    witness_lt = lt;
                }
            }
            if let Some(p) = prev {
                stability = (inf - p).abs() / inf.abs().max(1e-300);
                if stability <= cfg.grid_rtol {
                    break;
                }
            }
            prev = Some(inf);
            depth *= 100.0;
        }
        Ok(ClassificationResult {
            kind: ClassKind::RhoSlow,
            constant: Some(inf),
            witness: witness_lt.exp(),
            grid_levels: levels,
            stability,
        })
    }
}

/// Logarithmically spaced grid from `lo` to `hi` inclusive.
pub(crate) fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let lg_lo = lo.log10();
    let lg_hi = hi.log10();
    let n = ((lg_hi - lg_lo) * per_decade as f64).ceil().max(1.0) as usize;
    let mut g: Vec<f64> = (0..=n).map(|i| 10f64.powf(lg_lo + (lg_hi - lg_lo) * i as f64 / n as f64)).collect();
    *g.last_mut().unwrap() = hi;
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    Fast,
    Slow,
    RhoSlow,
}

/// Outcome of one classification sweep.
///
/// `constant` is `None` when the defining integral diverges; for the
/// doubling test a constant of 0 means the infimum collapsed (not ρ-slow).
#[derive(Debug, Clone)]
pub struct ClassificationResult {
    pub kind: ClassKind,
    pub constant: Option<f64>,
    pub witness: f64,
    pub grid_levels: u32,
    /// Relative disagreement between the last two refinement levels.
    pub stability: f64,
}

impl ClassificationResult {
    pub fn divergent(&self) -> bool {
        self.constant.is_none()
    }

    pub fn is_stable(&self, rtol: f64) -> bool {
        self.divergent() || self.stability <= rtol
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NormalizationZero { got: f64 },
    NormalizationOne { got: f64 },
    NotMonotone { t0: f64, t1: f64 },
    RatioIncreasing { t0: f64, t1: f64 },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NormalizationZero { got } => write!(f, "omega(0) = {got}, expected 0"),
            Violation::NormalizationOne { got } => write!(f, "omega(1) = {got}, expected 1"),
            Violation::NotMonotone { t0, t1 } => write!(f, "omega decreasing between t={t0} and t={t1}"),
            Violation::RatioIncreasing { t0, t1 } => write!(f, "omega(t)/t increasing between t={t0} and t={t1}"),
        }
    }
}

/// Knobs for the classification sweeps.
#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    /// Probe density for the shallow grids (points per decade).
    pub per_decade: usize,
    pub slow_per_decade: usize,
    pub fast_s_min: f64,
    /// Level-0 lower end of the tail-constant probe; squared per level.
    pub slow_s_min: f64,
    /// Level-0 depth of the doubling probe in -log t; ×100 per level.
    pub rho_depth: f64,
    pub max_levels: u32,
    /// Required agreement between successive refinement levels.
    pub grid_rtol: f64,
    pub quad_rtol: f64,
    pub max_shells: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            per_decade: 64,
            slow_per_decade: 16,
            fast_s_min: 1e-12,
            slow_s_min: 1e-12,
            rho_depth: 1e6,
            max_levels: 4,
            grid_rtol: 1e-5,
            quad_rtol: 1e-9,
            max_shells: 360,
        }
    }
}
