//! Nonnegative boundary data h on the circle with zero-set metadata.
//!
//! Three representations: closed-form chord products c·∏|ξ-e^{iθ_k}|^{β_k},
//! the arc-wise construction attached to a [`CarlesonSet`], and periodic
//! piecewise-linear tables. All evaluation goes through `log h`, which stays
//! finite-and-stable wherever h is positive and is -∞ exactly on the zero
//! set, so ratios log(h(ζ)/h(ξ)) cancel exactly for constant data.
//!
//! The module also hosts the pair-sampling seminorm engine (circle and
//! closed-disk variants) and the two windowed regularity constants: the
//! symmetric-difference Dini integral and the second-difference tail
//! integral, both restricted to the comparability window of each base
//! point and equipped with truncation divergence detection.

use crate::carleson::{chord_of_angle, CarlesonSet};
use crate::modulus::Modulus;
use crate::quad::{self, QuadError};
use num_complex::Complex64;
use thiserror::Error;

use std::f64::consts::TAU;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("boundary data must be nonnegative, got {value} at angle {theta}")]
    Negative { theta: f64, value: f64 },
    #[error("tabulated data needs at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("h vanishes at angle {0}; the operation needs h > 0 there")]
    ZeroPoint(f64),
    #[error("csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error("chord exponents must be positive, got {0}")]
    BadExponent(f64),
    #[error("scale must be positive, got {0}")]
    BadScale(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// One factor |ξ - e^{iθ}|^β of a chord product.
#[derive(Debug, Clone, Copy)]
pub struct ChordFactor {
    pub angle: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone)]
enum Repr {
    ChordProduct { log_scale: f64, scale: f64, factors: Vec<ChordFactor> },
    CarlesonHe { set: CarlesonSet, omega: Modulus },
    Tabulated { samples: Vec<f64>, step: f64 },
}

/// Nonnegative continuous boundary data with explicit zero-set metadata.
#[derive(Debug, Clone)]
pub struct BoundaryFunction {
    repr: Repr,
    zero_points: Vec<f64>,
    zero_arcs: Vec<(f64, f64)>,
}

pub(crate) fn reduce(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t == TAU {
        0.0
    } else {
        t
    }
}

/// Chord distance |e^{iθ} - e^{iφ}|.
pub fn chord(theta: f64, phi: f64) -> f64 {
    2.0 * (0.5 * (theta - phi)).sin().abs()
}

impl BoundaryFunction {
    pub fn constant(c: f64) -> Result<Self, BoundaryError> {
        if c <= 0.0 {
            return Err(BoundaryError::BadScale(c));
        }
        Ok(BoundaryFunction {
            repr: Repr::ChordProduct { log_scale: c.ln(), scale: c, factors: Vec::new() },
            zero_points: Vec::new(),
            zero_arcs: Vec::new(),
        })
    }

    /// h(e^{iθ}) = scale·∏ |e^{iθ} - e^{iθ_k}|^{β_k}.
    pub fn chord_product(scale: f64, factors: Vec<ChordFactor>) -> Result<Self, BoundaryError> {
        if scale <= 0.0 {
            return Err(BoundaryError::BadScale(scale));
        }
        for f in &factors {
            if f.exponent <= 0.0 {
                return Err(BoundaryError::BadExponent(f.exponent));
            }
        }
        let mut zero_points: Vec<f64> = factors.iter().map(|f| reduce(f.angle)).collect();
        zero_points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        zero_points.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        Ok(BoundaryFunction {
            repr: Repr::ChordProduct { log_scale: scale.ln(), scale, factors },
            zero_points,
            zero_arcs: Vec::new(),
        })
    }

    /// The arc-wise boundary function of a closed set: on each complementary
    /// arc γ = (a, b) the value ω(chord γ)·|ξ-e^{ia}||ξ-e^{ib}|/chord(γ)²,
    /// zero on the set itself.
    pub(crate) fn carleson_h_e(set: CarlesonSet, omega: Modulus) -> Self {
        let zero_points = set.endpoint_angles();
        let zero_arcs = set.residual_arcs();
        BoundaryFunction { repr: Repr::CarlesonHe { set, omega }, zero_points, zero_arcs }
    }

    /// Periodic linear interpolation of samples on the uniform grid
    /// θ_j = 2πj/n. Samples below `zero_threshold`·max are snapped to exact
    /// zeros and recorded in the zero-set metadata.
    pub fn tabulated(mut samples: Vec<f64>, zero_threshold: f64) -> Result<Self, BoundaryError> {
        if samples.len() < 4 {
            return Err(BoundaryError::TooFewSamples(samples.len()));
        }
        let n = samples.len();
        let step = TAU / n as f64;
        let max = samples.iter().cloned().fold(0.0f64, f64::max);
        for (j, s) in samples.iter_mut().enumerate() {
            if *s < 0.0 {
                if *s < -zero_threshold * max {
                    return Err(BoundaryError::Negative { theta: j as f64 * step, value: *s });
                }
                *s = 0.0;
            }
            if *s <= zero_threshold * max {
                *s = 0.0;
            }
        }
        let mut zero_points = Vec::new();
        let mut zero_arcs = Vec::new();
        let mut j = 0;
        while j < n {
            if samples[j] == 0.0 {
                let start = j;
                let mut end = j;
                while end + 1 < n && samples[end + 1] == 0.0 {
                    end += 1;
                }
                if end > start {
                    zero_arcs.push((start as f64 * step, end as f64 * step));
                } else {
                    zero_points.push(start as f64 * step);
                }
                j = end + 1;
            } else {
                j += 1;
            }
        }
        Ok(BoundaryFunction { repr: Repr::Tabulated { samples, step }, zero_points, zero_arcs })
    }

    /// Load tabulated data from CSV with header `theta,h` on a uniform grid.
    pub fn from_csv(text: &str, zero_threshold: f64) -> Result<Self, BoundaryError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "theta,h" => {}
            _ => return Err(BoundaryError::Csv { line: 1, msg: "expected header `theta,h`".into() }),
        }
        let mut samples = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let _theta: f64 = parts
                .next()
                .ok_or(BoundaryError::Csv { line: i + 1, msg: "missing theta".into() })?
                .trim()
                .parse()
                .map_err(|e| BoundaryError::Csv { line: i + 1, msg: format!("{e}") })?;
            let h: f64 = parts
                .next()
                .ok_or(BoundaryError::Csv { line: i + 1, msg: "missing h".into() })?
                .trim()
                .parse()
                .map_err(|e| BoundaryError::Csv { line: i + 1, msg: format!("{e}") })?;
            samples.push(h);
        }
        Self::tabulated(samples, zero_threshold)
    }

    pub fn describe(&self) -> String {
        match &self.repr {
            Repr::ChordProduct { scale, factors, .. } if factors.is_empty() => format!("const:{scale}"),
            Repr::ChordProduct { scale, factors, .. } => {
                let fs: Vec<String> = factors.iter().map(|f| format!("{},{}", f.angle, f.exponent)).collect();
                format!("chord[scale={scale};{}]", fs.join(";"))
            }
            Repr::CarlesonHe { set, omega } => {
                format!("hE[{} arcs, {}]", set.arcs().len(), omega.describe())
            }
            Repr::Tabulated { samples, .. } => format!("table[{} samples]", samples.len()),
        }
    }

    /// h(e^{iθ}); θ is reduced mod 2π.
    pub fn eval(&self, theta: f64) -> f64 {
        match &self.repr {
            Repr::ChordProduct { scale, factors, .. } if factors.is_empty() => *scale,
            _ => {
                let l = self.log_eval(theta);
                if l == f64::NEG_INFINITY {
                    0.0
                } else {
                    l.exp()
                }
            }
        }
    }

    /// log h(e^{iθ}), -∞ exactly on the zero set.
    pub fn log_eval(&self, theta: f64) -> f64 {
        let th = reduce(theta);
        match &self.repr {
            Repr::ChordProduct { log_scale, factors, .. } => {
                let mut acc = *log_scale;
                for f in factors {
                    let c = chord(th, f.angle);
                    if c == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    acc += f.exponent * c.ln();
                }
                acc
            }
            Repr::CarlesonHe { set, omega } => {
                match locate_arc(set.arcs(), th) {
                    None => f64::NEG_INFINITY,
                    Some(i) => {
                        let (a, b) = set.arcs()[i];
                        let ell = chord_of_angle(b - a);
                        let ca = chord(th, a);
                        let cb = chord(th, b);
                        if ca == 0.0 || cb == 0.0 {
                            return f64::NEG_INFINITY;
                        }
                        omega.log_val(ell.ln()) + ca.ln() + cb.ln() - 2.0 * ell.ln()
                    }
                }
            }
            Repr::Tabulated { samples, step } => {
                let n = samples.len();
                let x = th / step;
                let j = (x.floor() as usize).min(n - 1);
                let frac = x - j as f64;
                let v0 = samples[j];
                let v1 = samples[(j + 1) % n];
                let v = v0 + (v1 - v0) * frac;
                if v <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    v.ln()
                }
            }
        }
    }

    pub fn zero_points(&self) -> &[f64] {
        &self.zero_points
    }

    pub fn zero_arcs(&self) -> &[(f64, f64)] {
        &self.zero_arcs
    }

    pub fn has_zeros(&self) -> bool {
        !self.zero_points.is_empty() || !self.zero_arcs.is_empty()
    }

    /// Chord distance from e^{iθ} to the zero set (∞ when there is none).
    pub fn chord_dist_to_zeros(&self, theta: f64) -> f64 {
        let th = reduce(theta);
        let mut d = f64::INFINITY;
        for &z in &self.zero_points {
            d = d.min(chord(th, z));
        }
        for &(a, b) in &self.zero_arcs {
            if angle_in_arc(th, a, b) {
                return 0.0;
            }
            d = d.min(chord(th, a)).min(chord(th, b));
        }
        d
    }

    /// Grid estimate of max h, used for windowed maxima and thresholds.
    pub fn sup_estimate(&self, n: usize) -> f64 {
        (0..n).map(|i| self.eval(TAU * i as f64 / n as f64)).fold(0.0, f64::max)
    }

    /// (1/2π)∫ log h over the circle with grading toward every zero, or
    /// `Divergent` when the zero set has interior or the endpoint shells
    /// fail the decay test.
    pub fn log_integral(&self, rel_tol: f64) -> Result<LogIntegral, BoundaryError> {
        if !self.zero_arcs.is_empty() {
            return Ok(LogIntegral::Divergent);
        }
        match self.arcwise_log_integral(rel_tol)? {
            Some(v) => Ok(LogIntegral::Finite(v / TAU)),
            None => Ok(LogIntegral::Divergent),
        }
    }

    /// ∫ log h over the positive spans only (no 1/2π factor), `None` on
    /// shell divergence. For full tilings this is the whole circle.
    pub(crate) fn arcwise_log_integral(&self, rel_tol: f64) -> Result<Option<f64>, BoundaryError> {
        let spans = self.positive_spans();
        let mut total = 0.0;
        for (a, b, sing_a, sing_b) in spans {
            match self.span_log_integral(a, b, sing_a, sing_b, rel_tol)? {
                Some(v) => total += v,
                None => return Ok(None),
            }
        }
        Ok(Some(total))
    }

    /// Spans of positivity as (a, b, left-singular, right-singular).
    fn positive_spans(&self) -> Vec<(f64, f64, bool, bool)> {
        let mut bounds: Vec<f64> = self.zero_points.clone();
        for &(a, b) in &self.zero_arcs {
            bounds.push(reduce(a));
            bounds.push(reduce(b));
        }
        bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        bounds.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        if bounds.is_empty() {
            return vec![(0.0, TAU, false, false)];
        }
        let mut spans = Vec::with_capacity(bounds.len());
        for i in 0..bounds.len() {
            let a = bounds[i];
            let b = if i + 1 < bounds.len() { bounds[i + 1] } else { bounds[0] + TAU };
            if b - a < 1e-14 {
                continue;
            }
            // skip spans that are inside zero arcs
            let mid = reduce(0.5 * (a + b));
            if self.zero_arcs.iter().any(|&(za, zb)| angle_in_arc(mid, za, zb)) {
                continue;
            }
            spans.push((a, b, true, true));
        }
        spans
    }

    fn span_log_integral(
        &self,
        a: f64,
        b: f64,
        sing_a: bool,
        sing_b: bool,
        rel_tol: f64,
    ) -> Result<Option<f64>, BoundaryError> {
        let w = b - a;
        let mut smooth_lo = a;
        let mut smooth_hi = b;
        let mut total = 0.0;
        if sing_a {
            let mut f = |u: f64| self.log_eval(a + u);
            match quad::shell_integral(&mut f, 0.25 * w, 0.5, rel_tol, 200, 1e-14)? {
                Some(v) => total += v,
                None => return Ok(None),
            }
            smooth_lo = a + 0.25 * w;
        }
        if sing_b {
            let mut f = |u: f64| self.log_eval(b - u);
            match quad::shell_integral(&mut f, 0.25 * w, 0.5, rel_tol, 200, 1e-14)? {
                Some(v) => total += v,
                None => return Ok(None),
            }
            smooth_hi = b - 0.25 * w;
        }
        if smooth_hi > smooth_lo {
            let cells = quad::uniform_cells(smooth_lo, smooth_hi, w / 16.0);
            let mut f = |t: f64| self.log_eval(t);
            total += quad::adaptive_cells(&mut f, &cells, rel_tol)?;
        }
        Ok(Some(total))
    }

    /// Pair-sup estimate of sup |h(ξ)-h(ζ)|/ψ(|ξ-ζ|) over the circle,
    /// anchored at the zero set so the distance bound h ≤ ψ_T(h)·ψ(d(·,E))
    /// holds on the sampled grid by construction.
    pub fn psi_seminorm(&self, psi: &Modulus, scheme: &PairScheme) -> SeminormEstimate {
        let mut scheme = scheme.clone();
        scheme.anchors.extend_from_slice(&self.zero_points);
        for &(a, b) in &self.zero_arcs {
            scheme.anchors.push(a);
            scheme.anchors.push(b);
        }
        let f = |theta: f64| Some(Complex64::new(self.eval(theta), 0.0));
        seminorm_circle(f, |d| psi.val(d), &scheme)
    }

    /// Windowed symmetric-difference constant: sup over admissible (θ, s) of
    /// (lim_{ε→0} ∫_ε^s |h(θ+t)-h(θ-t)|/t dt) / ψ(s), with s running over
    /// dyadic fractions of the comparability radius ψ*(h(θ)/(2ψ_T)).
    /// `None` value means some admissible truncation sequence diverged.
    pub fn symmetric_dini_constant(
        &self,
        psi: &Modulus,
        psi_t: f64,
        n_theta: usize,
        s_levels: usize,
        rel_tol: f64,
    ) -> Result<WindowEstimate, BoundaryError> {
        let psi_t_eff = psi_t.max(1e-12);
        let mut sup = 0.0f64;
        let mut witness = (0.0, 0.0);
        for i in 0..n_theta {
            let theta = TAU * i as f64 / n_theta as f64;
            let h0 = self.eval(theta);
            if h0 <= 0.0 {
                continue;
            }
            let cap = psi.inv_star((h0 / (2.0 * psi_t_eff)).clamp(0.0, 1.0));
            if cap <= 1e-300 {
                continue;
            }
            for j in 0..s_levels {
                let s = cap * 0.5f64.powi(j as i32);
                // truncation shells ε_k = s·4^{-k}
                let mut f = |t: f64| (self.eval(theta + t) - self.eval(theta - t)).abs() / t;
                match quad::shell_integral(&mut f, s, 0.25, rel_tol, 26, 1e-14)? {
                    None => {
                        return Ok(WindowEstimate { value: None, witness_theta: theta, witness_s: s });
                    }
                    Some(integral) => {
                        let ratio = integral / psi.val(s);
                        if ratio > sup {
                            sup = ratio;
                            witness = (theta, s);
                        }
                    }
                }
            }
        }
        Ok(WindowEstimate { value: Some(sup), witness_theta: witness.0, witness_s: witness.1 })
    }

    /// Windowed second-difference tail constant: sup over admissible (θ, s)
    /// of (1/h(θ))·∫_s^{cap} |h(θ+t)h(θ-t) - h(θ)²|/t² dt divided by ψ(s)/s.
    pub fn product_tail_constant(
        &self,
        psi: &Modulus,
        psi_t: f64,
        n_theta: usize,
        s_levels: usize,
        _rel_tol: f64,
    ) -> Result<WindowEstimate, BoundaryError> {
        let psi_t_eff = psi_t.max(1e-12);
        let mut sup = 0.0f64;
        let mut witness = (0.0, 0.0);
        for i in 0..n_theta {
            let theta = TAU * i as f64 / n_theta as f64;
            let h0 = self.eval(theta);
            if h0 <= 0.0 {
                continue;
            }
            let cap = psi.inv_star((h0 / (2.0 * psi_t_eff)).clamp(0.0, 1.0));
            if cap <= 1e-300 {
                continue;
            }
            // doubling shells downward from the cap; suffix sums give every s
            let mut f = |t: f64| (self.eval(theta + t) * self.eval(theta - t) - h0 * h0).abs() / (t * t);
            let mut hi = cap;
            let mut suffix = 0.0;
            for j in 0..s_levels {
                let lo = 0.5 * hi;
                suffix += quad::gauss16(&mut f, lo, hi);
                hi = lo;
                let s = lo;
                let ratio = (suffix / h0) / (psi.val(s) / s);
                if ratio > sup {
                    sup = ratio;
                    witness = (theta, s);
                }
                let _ = j;
            }
        }
        Ok(WindowEstimate { value: Some(sup), witness_theta: witness.0, witness_s: witness.1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogIntegral {
    Finite(f64),
    Divergent,
}

impl LogIntegral {
    pub fn finite(self) -> Option<f64> {
        match self {
            LogIntegral::Finite(v) => Some(v),
            LogIntegral::Divergent => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WindowEstimate {
    /// `None` when a truncation sequence failed the decay test.
    pub value: Option<f64>,
    pub witness_theta: f64,
    pub witness_s: f64,
}

/// Is θ inside the arc (a, b) (arcs may extend past 2π)?
fn angle_in_arc(theta: f64, a: f64, b: f64) -> bool {
    let th = reduce(theta);
    (th >= a && th <= b) || (th + TAU >= a && th + TAU <= b)
}

/// Index of the arc containing θ, if any.
fn locate_arc(arcs: &[(f64, f64)], theta: f64) -> Option<usize> {
    let th = reduce(theta);
    let idx = arcs.partition_point(|&(a, _)| a <= th);
    if idx > 0 {
        let (a, b) = arcs[idx - 1];
        if th > a && th < b {
            return Some(idx - 1);
        }
    }
    // wrap-around arc extending past 2π
    if let Some(&(a, b)) = arcs.last() {
        if th + TAU > a && th + TAU < b {
            return Some(arcs.len() - 1);
        }
    }
    None
}

/// Deterministic pair-sampling plan: a uniform base grid plus partners at
/// dyadic chord separations; schemes nest under `refined`, which makes the
/// resulting estimates monotone nondecreasing in the level.
#[derive(Debug, Clone)]
pub struct PairScheme {
    pub circle_n: usize,
    /// Partner separations are chords 2·2^{-k}, k = 0..=dyadic_depth.
    pub dyadic_depth: usize,
    /// Interior layers 1 - 2^{-j}, j = 1..=radial_layers (disk variant).
    pub radial_layers: usize,
    /// Extra base angles, e.g. the zero set.
    pub anchors: Vec<f64>,
}

impl PairScheme {
    pub fn new(circle_n: usize, dyadic_depth: usize, radial_layers: usize) -> Self {
        PairScheme { circle_n, dyadic_depth, radial_layers, anchors: Vec::new() }
    }

    pub fn refined(&self, level: u32) -> Self {
        PairScheme {
            circle_n: self.circle_n << level,
            dyadic_depth: self.dyadic_depth + level as usize,
            radial_layers: self.radial_layers + level as usize,
            anchors: self.anchors.clone(),
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "circle:{} dyadic:{} layers:{} anchors:{}",
            self.circle_n,
            self.dyadic_depth,
            self.radial_layers,
            self.anchors.len()
        )
    }
}

/// Finite-pair lower bound of a seminorm sup together with the pair that
/// attains it.
#[derive(Debug, Clone)]
pub struct SeminormEstimate {
    pub value: f64,
    pub witness_pair: (Complex64, Complex64),
    pub pair_strategy: String,
    pub pairs_evaluated: usize,
}

/// sup |f(ξ)-f(ζ)|/ω(|ξ-ζ|) over circle pairs at dyadic chord separations.
/// Pairs where `f` declines to evaluate (margin zones) are skipped.
pub fn seminorm_circle<F>(mut f: F, omega: impl Fn(f64) -> f64, scheme: &PairScheme) -> SeminormEstimate
where
    F: FnMut(f64) -> Option<Complex64>,
{
    let mut bases: Vec<f64> = (0..scheme.circle_n).map(|i| TAU * i as f64 / scheme.circle_n as f64).collect();
    bases.extend(scheme.anchors.iter().map(|&a| reduce(a)));
    let mut best = 0.0f64;
    let mut witness = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let mut pairs = 0usize;
    for &theta in &bases {
        let fz = match f(theta) {
            Some(v) => v,
            None => continue,
        };
        let z = Complex64::from_polar(1.0, theta);
        let mut consider = |phi: f64| {
            let sep = chord(theta, phi);
            if sep == 0.0 {
                return None;
            }
            let fw = f(phi)?;
            pairs += 1;
            let ratio = (fz - fw).norm() / omega(sep);
            if ratio > best {
                best = ratio;
                witness = (z, Complex64::from_polar(1.0, phi));
            }
            Some(())
        };
        for k in 0..=scheme.dyadic_depth {
            let sep = 2.0 * 0.5f64.powi(k as i32);
            let arc = 2.0 * (0.5 * sep).asin();
            consider(theta + arc);
        }
        // direct pairs with every anchor (zero-set points in particular),
        // which is what pins h against the distance envelope on the grid
        for &a in &scheme.anchors {
            consider(a);
        }
    }
    SeminormEstimate {
        value: best,
        witness_pair: witness,
        pair_strategy: format!("circle dyadic [{}]", scheme.describe()),
        pairs_evaluated: pairs,
    }
}

/// Closed-disk variant: base points on the boundary and on the interior
/// layers 1-2^{-j}, partners at dyadic angular separations within a layer,
/// radially between consecutive layers, and layer-to-boundary.
pub fn seminorm_disk<FI, FB>(
    mut interior: FI,
    mut boundary: FB,
    omega: impl Fn(f64) -> f64,
    scheme: &PairScheme,
) -> SeminormEstimate
where
    FI: FnMut(Complex64) -> Option<Complex64>,
    FB: FnMut(f64) -> Option<Complex64>,
{
    let mut bases: Vec<f64> = (0..scheme.circle_n).map(|i| TAU * i as f64 / scheme.circle_n as f64).collect();
    bases.extend(scheme.anchors.iter().map(|&a| reduce(a)));
    let radii: Vec<f64> = (1..=scheme.radial_layers).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect();
    let mut best = 0.0f64;
    let mut witness = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut pairs = 0usize;
    let consider =
        |best: &mut f64, witness: &mut (Complex64, Complex64), pairs: &mut usize, z: Complex64, fz: Complex64, w: Complex64, fw: Complex64| {
            let d = (z - w).norm();
            if d == 0.0 {
                return;
            }
            *pairs += 1;
            let ratio = (fz - fw).norm() / omega(d.min(2.0));
            if ratio > *best {
                *best = ratio;
                *witness = (z, w);
            }
        };
    for &theta in &bases {
        // within-layer angular pairs and radial chains
        let mut prev: Option<(Complex64, Complex64)> = None;
        for &r in &radii {
            let z = Complex64::from_polar(r, theta);
            let fz = match interior(z) {
                Some(v) => v,
                None => continue,
            };
            for k in 0..=scheme.dyadic_depth {
                let sep = 2.0 * 0.5f64.powi(k as i32);
                let arc = 2.0 * (0.5 * sep).asin();
                let w = Complex64::from_polar(r, theta + arc);
                if let Some(fw) = interior(w) {
                    consider(&mut best, &mut witness, &mut pairs, z, fz, w, fw);
                }
            }
            if let Some((pz, pfz)) = prev {
                consider(&mut best, &mut witness, &mut pairs, z, fz, pz, pfz);
            }
            prev = Some((z, fz));
        }
        // boundary point above the chain
        if let Some(fb) = boundary(theta) {
            let zb = Complex64::from_polar(1.0, theta);
            if let Some((pz, pfz)) = prev {
                consider(&mut best, &mut witness, &mut pairs, zb, fb, pz, pfz);
            }
            for k in 0..=scheme.dyadic_depth {
                let sep = 2.0 * 0.5f64.powi(k as i32);
                let arc = 2.0 * (0.5 * sep).asin();
                if let Some(fw) = boundary(theta + arc) {
                    let w = Complex64::from_polar(1.0, theta + arc);
                    consider(&mut best, &mut witness, &mut pairs, zb, fb, w, fw);
                }
            }
        }
    }
    SeminormEstimate {
        value: best,
        witness_pair: witness,
        pair_strategy: format!("disk dyadic [{}]", scheme.describe()),
        pairs_evaluated: pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn chord_product_closed_values() {
        let h = BoundaryFunction::chord_product(1.0, vec![ChordFactor { angle: 0.0, exponent: 1.0 }]).unwrap();
        assert_relative_eq!(h.eval(PI), 2.0, max_relative = 1e-15);
        assert_relative_eq!(h.eval(FRAC_PI_2), 2f64.sqrt(), max_relative = 1e-14);
        assert_eq!(h.eval(0.0), 0.0);
        assert_eq!(h.log_eval(0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn h_e_closed_value_at_i() {
        // E = {1,-1}, ω = √t: h(i) = ω(2)·|i-1||i+1|/4 = √2·2/4
        let e = CarlesonSet::plus_minus_one();
        let w = Modulus::power(0.5).unwrap();
        let h = e.build_h_e(&w);
        assert_relative_eq!(h.eval(FRAC_PI_2), 2f64.sqrt() / 2.0, max_relative = 1e-13);
        assert_eq!(h.eval(0.0), 0.0);
        assert_eq!(h.eval(PI), 0.0);
        // arc midpoint: ω(2)·(√2·√2)/4 = ω(2)/2
        assert_relative_eq!(h.eval(FRAC_PI_2), w.val(2.0) / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn log_integral_mean_value() {
        // mean of log|1-e^{iθ}| over the circle is log|1-0| = 0
        let h = BoundaryFunction::chord_product(1.0, vec![ChordFactor { angle: 0.0, exponent: 1.0 }]).unwrap();
        let v = h.log_integral(1e-10).unwrap().finite().unwrap();
        assert!(v.abs() < 1e-8, "got {v}");
        // constant: log c
        let c = BoundaryFunction::constant(3.0).unwrap();
        assert_relative_eq!(c.log_integral(1e-10).unwrap().finite().unwrap(), 3f64.ln(), max_relative = 1e-12);
    }

    #[test]
    fn log_integral_flags_zero_arcs() {
        let mut s = vec![1.0; 64];
        for v in s.iter_mut().take(8) {
            *v = 0.0;
        }
        let h = BoundaryFunction::tabulated(s, 1e-12).unwrap();
        assert!(h.has_zeros());
        assert_eq!(h.log_integral(1e-8).unwrap(), LogIntegral::Divergent);
    }

    #[test]
    fn seminorm_closed_forms() {
        // |h(ξ)-0|/|ξ-1|^{1/2} = 1 exactly for h = |ξ-1|^{1/2} paired with the zero
        let h = BoundaryFunction::chord_product(1.0, vec![ChordFactor { angle: 0.0, exponent: 0.5 }]).unwrap();
        let psi = Modulus::power(0.5).unwrap();
        let est = h.psi_seminorm(&psi, &PairScheme::new(64, 8, 0));
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-6);

        // Lipschitz chord function against ω(t)=t: sup ratio 1, from below
        let h1 = BoundaryFunction::chord_product(1.0, vec![ChordFactor { angle: 0.0, exponent: 1.0 }]).unwrap();
        let one = Modulus::power(1.0).unwrap();
        let est = h1.psi_seminorm(&one, &PairScheme::new(128, 10, 0));
        assert!(est.value <= 1.0 + 1e-9 && est.value > 0.98, "got {}", est.value);

        let c = BoundaryFunction::constant(2.5).unwrap();
        let est = c.psi_seminorm(&one, &PairScheme::new(32, 4, 0));
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn seminorm_monotone_under_refinement() {
        let e = CarlesonSet::plus_minus_one();
        let w = Modulus::power(0.5).unwrap();
        let h = e.build_h_e(&w);
        let base = PairScheme::new(32, 4, 0);
        let mut prev = 0.0;
        for level in 0..3 {
            let est = h.psi_seminorm(&w, &base.refined(level));
            assert!(est.value >= prev - 1e-15);
            prev = est.value;
        }
        // structural bound: ψ_T(h_E) ≤ 2
        assert!(prev <= 2.0 + 1e-9);
    }

    #[test]
    fn windowed_constants_vanish_for_constant_data() {
        let c = BoundaryFunction::constant(1.0).unwrap();
        let psi = Modulus::power(1.0).unwrap();
        let z3 = c.symmetric_dini_constant(&psi, 0.0, 32, 6, 1e-9).unwrap();
        assert_eq!(z3.value.unwrap(), 0.0);
        let z4 = c.product_tail_constant(&psi, 0.0, 32, 6, 1e-9).unwrap();
        assert_eq!(z4.value.unwrap(), 0.0);
    }

    #[test]
    fn windowed_constants_finite_for_chord() {
        let h = BoundaryFunction::chord_product(1.0, vec![ChordFactor { angle: 0.0, exponent: 1.0 }]).unwrap();
        let psi = Modulus::power(1.0).unwrap();
        let psi_t = h.psi_seminorm(&psi, &PairScheme::new(128, 10, 0)).value;
        let z3 = h.symmetric_dini_constant(&psi, psi_t, 64, 8, 1e-9).unwrap();
        // |h(θ+t)-h(θ-t)| ≤ t for the chord function, so the ratio stays ≤ ~1
        let v = z3.value.unwrap();
        assert!(v > 0.0 && v < 3.0, "got {v}");
        let z4 = h.product_tail_constant(&psi, psi_t, 64, 8, 1e-9).unwrap();
        assert!(z4.value.unwrap().is_finite());
    }

    #[test]
    fn comparability_sandwich_on_window() {
        // h(θ)/2 ≤ h(θ+t) ≤ 3h(θ)/2 for |t| up to the comparability radius
        let e = CarlesonSet::plus_minus_one();
        let w = Modulus::power(0.5).unwrap();
        let h = e.build_h_e(&w);
        let psi_t = h.psi_seminorm(&w, &PairScheme::new(256, 12, 0)).value;
        for i in 1..64 {
            let theta = TAU * i as f64 / 64.0;
            let h0 = h.eval(theta);
            if h0 == 0.0 {
                continue;
            }
            let cap = w.inv_star((h0 / (2.0 * psi_t.max(1e-12))).clamp(0.0, 1.0));
            for m in 1..=8 {
                let t = cap * m as f64 / 8.0;
                for sgn in [-1.0, 1.0] {
                    let v = h.eval(theta + sgn * t);
                    assert!(v >= 0.5 * h0 - 1e-9, "lower sandwich failed at θ={theta}, t={t}");
                    assert!(v <= 1.5 * h0 + 1e-9, "upper sandwich failed at θ={theta}, t={t}");
                }
            }
        }
    }

    #[test]
    fn distance_envelope_holds_on_grid() {
        // h(ξ) ≤ ψ_T(h)·ψ(d(ξ, E)) with the zero-anchored seminorm estimate
        let e = CarlesonSet::plus_minus_one();
        let w = Modulus::power(0.5).unwrap();
        let h = e.build_h_e(&w);
        let psi_t = h.psi_seminorm(&w, &PairScheme::new(256, 12, 0)).value;
        for i in 0..512 {
            let theta = TAU * i as f64 / 512.0;
            let d = h.chord_dist_to_zeros(theta);
            assert!(h.eval(theta) <= psi_t * w.val(d.min(2.0)) + 1e-9);
        }
    }
}
