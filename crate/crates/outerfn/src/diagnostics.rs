//! Desk-scale evaluation of the membership conditions for O_h^ρ in the
//! weighted Lipschitz class Λ_ω.
//!
//! Every condition is a sup over a continuous family; what is computable is
//! a finite-grid lower bound together with its behavior under grid
//! refinement. Reports therefore carry the per-level values and the ratio
//! of the last two levels: a ratio near 1 is the desk-scale verdict
//! "finite", a ratio that keeps growing is the divergence signal. Grids
//! nest (base points double, dyadic pair depths extend, disk layers
//! deepen), which makes every estimate monotone nondecreasing in the level.

use crate::boundary::{chord, reduce, seminorm_circle, seminorm_disk, BoundaryError, PairScheme, WindowEstimate};
use crate::modulus::{ClassificationResult, Modulus, ModulusError};
use crate::outer::{OuterError, OuterEvaluator};
use crate::quad::{self, QuadError};
use num_complex::Complex64;
use serde::Serialize;
use std::cell::RefCell;
use std::collections::HashMap;
use thiserror::Error;

use std::f64::consts::TAU;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("h vanishes at angle {0}; the quantity needs h > 0 there")]
    ZeroPoint(f64),
    #[error("comparability window at angle {0} is below the resolvable scale")]
    WindowTooSmall(f64),
    #[error(transparent)]
    Outer(#[from] OuterError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Modulus(#[from] ModulusError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionId {
    #[serde(rename = "C1_seminorm")]
    C1Seminorm,
    #[serde(rename = "C2_modulus_seminorm")]
    C2ModulusSeminorm,
    #[serde(rename = "C3_log_ratio_sup")]
    C3LogRatioSup,
    #[serde(rename = "C4_ah_sup")]
    C4AhSup,
    #[serde(rename = "P11_sup")]
    P11Sup,
    #[serde(rename = "P12_Ah_sup")]
    P12AhSup,
    #[serde(rename = "SHIROKOV_sup")]
    ShirokovSup,
}

impl ConditionId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConditionId::C1Seminorm => "C1_seminorm",
            ConditionId::C2ModulusSeminorm => "C2_modulus_seminorm",
            ConditionId::C3LogRatioSup => "C3_log_ratio_sup",
            ConditionId::C4AhSup => "C4_ah_sup",
            ConditionId::P11Sup => "P11_sup",
            ConditionId::P12AhSup => "P12_Ah_sup",
            ConditionId::ShirokovSup => "SHIROKOV_sup",
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Angle(f64),
    Pair(f64, f64),
    Point { re: f64, im: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionParams {
    pub rho: f64,
    pub omega: String,
    pub psi: String,
    pub delta: Option<f64>,
    pub grid: String,
}

/// Finite-grid estimate of one condition with its refinement history.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub condition_id: ConditionId,
    /// `None` when a required truncation sequence diverged.
    pub value: Option<f64>,
    pub witness: Witness,
    pub params: ConditionParams,
    pub grid_levels: u32,
    /// value(last level)/value(previous level); grids nest so this is ≥ 1
    /// up to quadrature noise.
    pub stability_ratio: Option<f64>,
    pub level_values: Vec<f64>,
}

impl ConditionReport {
    pub fn divergent(&self) -> bool {
        self.value.is_none()
    }

    /// Desk-scale finiteness verdict at the given stability threshold.
    pub fn finite_at(&self, threshold: f64) -> bool {
        match (self.value, self.stability_ratio) {
            (Some(_), Some(r)) => r <= threshold,
            _ => false,
        }
    }
}

/// Nested grid sizes for the condition sweeps.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub circle_n: usize,
    pub disk_layers: usize,
    pub pair_depth: usize,
    pub levels: u32,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { circle_n: 128, disk_layers: 8, pair_depth: 10, levels: 3 }
    }
}

impl GridSpec {
    fn describe(&self) -> String {
        format!("circle:{} layers:{} dyadic:{} levels:{}", self.circle_n, self.disk_layers, self.pair_depth, self.levels)
    }
}

/// Session holding the evaluator, the moduli, and the measured seminorms of
/// h and h^ρ that every windowed quantity depends on.
pub struct Diagnostics<'a> {
    ev: &'a OuterEvaluator,
    psi: &'a Modulus,
    omega: &'a Modulus,
    rho: f64,
    psi_t: f64,
    psi_t_pow: f64,
    u_cache: RefCell<HashMap<(u64, u64), f64>>,
    v_cache: RefCell<HashMap<u64, Option<f64>>>,
}

impl<'a> Diagnostics<'a> {
    pub fn new(ev: &'a OuterEvaluator, psi: &'a Modulus, omega: &'a Modulus, rho: f64) -> Self {
        let scheme = PairScheme::new(256, 12, 0);
        let psi_t = ev.h().psi_seminorm(psi, &scheme).value;
        let rho_copy = rho;
        let hp = |theta: f64| Some(Complex64::new((rho_copy * ev.h().log_eval(theta)).exp(), 0.0));
        let mut anchored = scheme.clone();
        anchored.anchors.extend_from_slice(ev.h().zero_points());
        let psi_t_pow = seminorm_circle(hp, |d| psi.val(d), &anchored).value;
        Diagnostics {
            ev,
            psi,
            omega,
            rho,
            psi_t,
            psi_t_pow,
            u_cache: RefCell::new(HashMap::new()),
            v_cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn psi_t(&self) -> f64 {
        self.psi_t
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn params(&self, delta: Option<f64>, grid: &GridSpec) -> ConditionParams {
        ConditionParams {
            rho: self.rho,
            omega: self.omega.describe(),
            psi: self.psi.describe(),
            delta,
            grid: grid.describe(),
        }
    }

    /// Radius of the comparability window: ψ*(h(ξ)/(2ψ_T(h))), clipped into
    /// ψ*'s domain, zero at zeros of h.
    pub fn psi_arc_radius(&self, theta: f64) -> f64 {
        let h0 = self.ev.h().eval(theta);
        if h0 <= 0.0 {
            return 0.0;
        }
        self.psi.inv_star((h0 / (2.0 * self.psi_t.max(1e-12))).clamp(0.0, 1.0))
    }

    /// The nonlocal window integral ∫_{outside Ψ_ξ} |log(h(ζ)/h(ξ))|/|ζ-ξ|².
    pub fn a_h(&self, theta: f64) -> Result<f64, DiagnosticsError> {
        let th = reduce(theta);
        let lh0 = self.ev.h().log_eval(th);
        if !lh0.is_finite() {
            return Err(DiagnosticsError::ZeroPoint(th));
        }
        let r = self.psi_arc_radius(th);
        let w = 2.0 * (0.5 * r.min(2.0)).asin();
        if w < 1e-10 {
            return Err(DiagnosticsError::WindowTooSmall(th));
        }
        if w >= std::f64::consts::PI {
            return Ok(0.0);
        }
        // offset coordinate u = ζ-angle − θ, integrand graded toward the
        // window edges and broken at every zero of h
        let h = self.ev.h();
        let mut f = |u: f64| {
            let d = (h.log_eval(th + u) - lh0).abs();
            let c = 2.0 * (0.5 * u).sin();
            let v = d / (c * c);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let mut bounds: Vec<f64> = vec![w];
        for &z in h.zero_points() {
            let uz = reduce(z - th);
            if uz > w + 1e-13 && uz < TAU - w - 1e-13 {
                bounds.push(uz);
            }
        }
        bounds.push(TAU - w);
        bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut cells = Vec::new();
        for seg in bounds.windows(2) {
            if seg[1] - seg[0] > 1e-13 {
                cells.extend(quad::graded_span(seg[0], seg[1], true, true, 1e-13, TAU / 64.0));
            }
        }
        Ok(quad::adaptive_cells(&mut f, &cells, self.ev.tol().max(1e-9))?)
    }

    fn u_at(&self, z: Complex64) -> Result<f64, DiagnosticsError> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(&v) = self.u_cache.borrow().get(&key) {
            return Ok(v);
        }
        let v = self.ev.u(z)?;
        self.u_cache.borrow_mut().insert(key, v);
        Ok(v)
    }

    /// Boundary O^ρ with margin handling; `None` inside the margin band.
    /// A divergent phase is recorded in `divergent_at`.
    fn boundary_value(&self, theta: f64, divergent_at: &RefCell<Option<f64>>) -> Option<Complex64> {
        let th = reduce(theta);
        let d = self.ev.h().chord_dist_to_zeros(th);
        if d <= 1e-12 {
            return Some(Complex64::new(0.0, 0.0));
        }
        if d < self.ev.margin() {
            return None;
        }
        let key = th.to_bits();
        let cached = self.v_cache.borrow().get(&key).copied();
        let v = match cached {
            Some(v) => v,
            None => {
                let v = match self.ev.v_boundary(th) {
                    Ok(v) => Some(v),
                    Err(_) => None,
                };
                self.v_cache.borrow_mut().insert(key, v);
                v
            }
        };
        match v {
            Some(v) => {
                let modulus = (self.rho * self.ev.h().log_eval(th)).exp();
                Some(Complex64::from_polar(modulus, self.rho * v))
            }
            None => {
                *divergent_at.borrow_mut() = Some(th);
                None
            }
        }
    }

    /// Seminorm of O_h^ρ over circle pairs against ω (first condition).
    pub fn condition1(&self, grid: &GridSpec) -> Result<ConditionReport, DiagnosticsError> {
        let base = self.anchored_scheme(grid);
        let mut levels = Vec::new();
        let mut witness = Witness::Pair(0.0, 0.0);
        for level in 0..grid.levels {
            let scheme = base.refined(level);
            let divergent = RefCell::new(None);
            let est = seminorm_circle(
                |theta| self.boundary_value(theta, &divergent),
                |d| self.omega.val(d),
                &scheme,
            );
            if let Some(th) = *divergent.borrow() {
                return Ok(self.divergent_report(ConditionId::C1Seminorm, Witness::Angle(th), grid, levels));
            }
            witness = Witness::Pair(reduce(est.witness_pair.0.arg()), reduce(est.witness_pair.1.arg()));
            levels.push(est.value);
        }
        Ok(self.finite_report(ConditionId::C1Seminorm, witness, grid, levels, None))
    }

    /// Seminorm of |O_h^ρ| = exp(ρ·u_h) over closed-disk pairs (second
    /// condition).
    pub fn condition2(&self, grid: &GridSpec) -> Result<ConditionReport, DiagnosticsError> {
        let base = self.anchored_scheme(grid);
        let mut levels = Vec::new();
        let mut witness = Witness::Pair(0.0, 0.0);
        for level in 0..grid.levels {
            let scheme = base.refined(level);
            let err = RefCell::new(None::<DiagnosticsError>);
            let est = seminorm_disk(
                |z| match self.u_at(z) {
                    Ok(u) => Some(Complex64::new((self.rho * u).exp(), 0.0)),
                    Err(e) => {
                        *err.borrow_mut() = Some(e);
                        None
                    }
                },
                |theta| Some(Complex64::new((self.rho * self.ev.h().log_eval(theta)).exp(), 0.0)),
                |d| self.omega.val(d),
                &scheme,
            );
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
            let (wz, ww) = est.witness_pair;
            witness = Witness::Pair(reduce(wz.arg()), reduce(ww.arg()));
            levels.push(est.value);
        }
        Ok(self.finite_report(ConditionId::C2ModulusSeminorm, witness, grid, levels, None))
    }

    /// Default window size for the third condition:
    /// min{1/max(2, 2·C2), 1/(4ψ_T(h))^ρ}.
    pub fn default_delta(&self, c2_value: f64) -> f64 {
        let a = 1.0 / (2.0 * c2_value.max(1.0));
        let b = 1.0 / (4.0 * self.psi_t.max(1e-12)).powf(self.rho);
        a.min(b)
    }

    /// sup over ξ of sup over the cap D_ξ of |log(|O_h(z)|/h(ξ))| (third
    /// condition).
    pub fn condition3(&self, delta: f64, grid: &GridSpec) -> Result<ConditionReport, DiagnosticsError> {
        let mut levels = Vec::new();
        let mut witness = Witness::Angle(0.0);
        for level in 0..grid.levels {
            let n = grid.circle_n << level;
            let mut sup = 0.0f64;
            for i in 0..n {
                let theta = TAU * i as f64 / n as f64;
                let lh0 = self.ev.h().log_eval(theta);
                if !lh0.is_finite() {
                    continue;
                }
                let radius = self.omega.inv_star((delta * (self.rho * lh0).exp()).clamp(0.0, 1.0));
                if radius < 1e-11 {
                    continue;
                }
                let local = self.cap_log_ratio_sup(theta, lh0, radius)?;
                if local > sup {
                    sup = local;
                    witness = Witness::Angle(theta);
                }
            }
            levels.push(sup);
        }
        Ok(self.finite_report(ConditionId::C3LogRatioSup, witness, grid, levels, Some(delta)))
    }

    /// Max of |log|O_h| - log h(ξ)| over samples of the cap of chord radius
    /// `radius` at ξ: the radial ray with the extremal point (1-R)ξ, an
    /// angular fan at two interior depths, and the boundary slice.
    fn cap_log_ratio_sup(&self, theta: f64, lh0: f64, radius: f64) -> Result<f64, DiagnosticsError> {
        let mut sup = 0.0f64;
        let cap_angle = 2.0 * (0.5 * radius.min(2.0)).asin();
        for t in 1..=8 {
            let s = radius * t as f64 / 8.0;
            if s < 1e-12 {
                continue;
            }
            let z = Complex64::from_polar((1.0 - s).max(0.0), theta);
            let u = self.u_at(z)?;
            sup = sup.max((u - lh0).abs());
        }
        for m in 1..=8 {
            let x = cap_angle * m as f64 / 8.0;
            for sgn in [-1.0, 1.0] {
                let phi = theta + sgn * x;
                let lh = self.ev.h().log_eval(phi);
                if lh.is_finite() {
                    sup = sup.max((lh - lh0).abs());
                }
                let c = chord(phi, theta);
                let depth_max = (radius * radius - c * c).max(0.0).sqrt();
                for frac in [0.5, 1.0] {
                    let s = depth_max * frac;
                    if s < 1e-12 {
                        continue;
                    }
                    let z = Complex64::from_polar(1.0 - s, phi);
                    let u = self.u_at(z)?;
                    sup = sup.max((u - lh0).abs());
                }
            }
        }
        Ok(sup)
    }

    /// sup over ξ of h^ρ(ξ)/ω(min{1, 1/a_h(ξ)}) (fourth condition).
    pub fn condition4(&self, grid: &GridSpec) -> Result<ConditionReport, DiagnosticsError> {
        self.condition4_as(ConditionId::C4AhSup, grid)
    }

    fn condition4_as(&self, id: ConditionId, grid: &GridSpec) -> Result<ConditionReport, DiagnosticsError> {
        let mut levels = Vec::new();
        let mut witness = Witness::Angle(0.0);
        for level in 0..grid.levels {
            let n = grid.circle_n << level;
            let mut sup = 0.0f64;
            for i in 0..n {
                let theta = TAU * i as f64 / n as f64;
                let lh0 = self.ev.h().log_eval(theta);
                if !lh0.is_finite() {
                    continue;
                }
                let a = match self.a_h(theta) {
                    Ok(a) => a,
                    Err(DiagnosticsError::WindowTooSmall(_)) => continue,
                    Err(e) => return Err(e),
                };
                let arg = if a <= 1.0 { 1.0 } else { 1.0 / a };
                let term = (self.rho * lh0 - self.omega.log_val(arg.ln())).exp();
                if term > sup {
                    sup = term;
                    witness = Witness::Angle(theta);
                }
            }
            levels.push(sup);
        }
        Ok(self.finite_report(id, witness, grid, levels, None))
    }

    /// Infima over the arc [ξ, ζ] (smaller angle to larger) of the
    /// comparability radius of h^ρ and of h itself.
    pub fn lambda_and_inf(&self, xi: f64, zeta: f64) -> (f64, f64) {
        let (theta, phi) = order_arc(xi, zeta);
        let radius = |s: f64| {
            let hp = (self.rho * self.ev.h().log_eval(s)).exp();
            self.psi.inv_star((hp / (2.0 * self.psi_t_pow.max(1e-12))).clamp(0.0, 1.0))
        };
        let hval = |s: f64| self.ev.h().eval(s);
        (arc_infimum(theta, phi, radius), arc_infimum(theta, phi, hval))
    }

    /// |sin| of the principal-value phase-difference integral of h^ρ between
    /// ξ and ζ, cut off at λ_{h^ρ}(ξ, ζ). `None` when the truncation
    /// sequence diverges.
    pub fn a_big(&self, xi: f64, zeta: f64) -> Result<Option<f64>, DiagnosticsError> {
        let (lambda, _) = self.lambda_and_inf(xi, zeta);
        if lambda <= 1e-300 {
            return Ok(Some(0.0));
        }
        let (theta, phi) = order_arc(xi, zeta);
        let h = self.ev.h();
        let rho = self.rho;
        let mut g = |t: f64| {
            let d = rho * (h.log_eval(theta + t) - h.log_eval(theta - t))
                - rho * (h.log_eval(phi + t) - h.log_eval(phi - t));
            let v = d / (0.5 * t).tan();
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        match quad::shell_integral(&mut g, lambda, 0.5, self.ev.tol().max(1e-9), 200, 1e-14)? {
            Some(integral) => Ok(Some((integral / TAU).sin().abs())),
            None => Ok(None),
        }
    }

    /// The pair conditions: P11 is the fourth condition verbatim (pass a
    /// precomputed report to avoid the duplicate sweep); P12 is sup over
    /// sampled pairs of h^ρ(ξ,ζ)·A_{h^ρ}(ξ,ζ)/ω(|ξ-ζ|). Pairs whose arc
    /// meets the zero set contribute nothing (the arc infimum is 0).
    pub fn prop_conditions(
        &self,
        grid: &GridSpec,
        precomputed_c4: Option<&ConditionReport>,
    ) -> Result<(ConditionReport, ConditionReport), DiagnosticsError> {
        let p11 = match precomputed_c4 {
            Some(c4) => {
                let mut p = c4.clone();
                p.condition_id = ConditionId::P11Sup;
                p
            }
            None => self.condition4_as(ConditionId::P11Sup, grid)?,
        };
        let mut levels = Vec::new();
        let mut witness = Witness::Pair(0.0, 0.0);
        for level in 0..grid.levels {
            let n = grid.circle_n << level;
            let depth = grid.pair_depth + level as usize;
            let mut sup = 0.0f64;
            for i in 0..n {
                let theta = TAU * i as f64 / n as f64;
                for k in 0..=depth {
                    let sep = 2.0 * 0.5f64.powi(k as i32);
                    let arc = 2.0 * (0.5 * sep).asin();
                    let zeta = theta + arc;
                    let (lambda, h_inf) = self.lambda_and_inf(theta, zeta);
                    if lambda <= 1e-300 || h_inf <= 0.0 {
                        continue;
                    }
                    let a = match self.a_big(theta, zeta)? {
                        Some(a) => a,
                        None => {
                            let report =
                                self.divergent_report(ConditionId::P12AhSup, Witness::Pair(theta, reduce(zeta)), grid, levels);
                            return Ok((p11, report));
                        }
                    };
                    let term = h_inf.powf(self.rho) * a / self.omega.val(sep);
                    if term > sup {
                        sup = term;
                        witness = Witness::Pair(theta, reduce(zeta));
                    }
                }
            }
            levels.push(sup);
        }
        let p12 = self.finite_report(ConditionId::P12AhSup, witness, grid, levels, None);
        Ok((p11, p12))
    }

    /// sup over screened disk points of |log(|O_h(z)|/M_z)| where M_z is the
    /// windowed boundary maximum on chords ≤ 2(1-|z|); only points with
    /// M_z ≥ ω(1-|z|) enter.
    pub fn shirokov_criterion(&self, grid: &GridSpec) -> Result<ConditionReport, DiagnosticsError> {
        let mut levels = Vec::new();
        let mut witness = Witness::Point { re: 0.0, im: 0.0 };
        for level in 0..grid.levels {
            let n = grid.circle_n << level;
            let layers = grid.disk_layers + level as usize;
            let mut sup = 0.0f64;
            for j in 1..=layers {
                let r = 1.0 - 0.5f64.powi(j as i32);
                let window = 2.0 * (1.0 - r);
                for i in 0..n {
                    let theta = TAU * i as f64 / n as f64;
                    let m_z = self.windowed_max(theta, r, window);
                    if m_z <= 0.0 || m_z < self.omega.val((1.0 - r).min(2.0)) {
                        continue;
                    }
                    let z = Complex64::from_polar(r, theta);
                    let u = self.u_at(z)?;
                    let term = (u - m_z.ln()).abs();
                    if term > sup {
                        sup = term;
                        witness = Witness::Point { re: z.re, im: z.im };
                    }
                }
            }
            levels.push(sup);
        }
        Ok(self.finite_report(ConditionId::ShirokovSup, witness, grid, levels, None))
    }

    /// max h over the boundary window {|ξ - z| ≤ window} around z = re^{iθ}.
    fn windowed_max(&self, theta: f64, r: f64, window: f64) -> f64 {
        // |e^{is} - re^{iθ}|² = (1-r)² + 4r sin²((s-θ)/2)
        let q = (window * window - (1.0 - r) * (1.0 - r)).max(0.0) / (4.0 * r);
        let halfwidth = 2.0 * q.sqrt().min(1.0).asin();
        let mut best = 0.0f64;
        let samples = 48;
        for m in 0..=samples {
            let x = -halfwidth + 2.0 * halfwidth * m as f64 / samples as f64;
            best = best.max(self.ev.h().eval(theta + x));
        }
        best
    }

    fn anchored_scheme(&self, grid: &GridSpec) -> PairScheme {
        let mut scheme = PairScheme::new(grid.circle_n, grid.pair_depth, grid.disk_layers);
        scheme.anchors.extend_from_slice(self.ev.h().zero_points());
        scheme
    }

    fn finite_report(
        &self,
        id: ConditionId,
        witness: Witness,
        grid: &GridSpec,
        levels: Vec<f64>,
        delta: Option<f64>,
    ) -> ConditionReport {
        let n = levels.len();
        let stability = if n >= 2 && levels[n - 2] > 0.0 { Some(levels[n - 1] / levels[n - 2]) } else { None };
        ConditionReport {
            condition_id: id,
            value: levels.last().copied(),
            witness,
            params: self.params(delta, grid),
            grid_levels: n as u32,
            stability_ratio: stability,
            level_values: levels,
        }
    }

    fn divergent_report(
        &self,
        id: ConditionId,
        witness: Witness,
        grid: &GridSpec,
        levels: Vec<f64>,
    ) -> ConditionReport {
        ConditionReport {
            condition_id: id,
            value: None,
            witness,
            params: self.params(None, grid),
            grid_levels: levels.len() as u32,
            stability_ratio: None,
            level_values: levels,
        }
    }
}

/// Outcome of the regularity-transfer check: the doubling constant of ψ at
/// ρ, the windowed regularity constants of h, the fourth condition against
/// ω = ψ, and the measured seminorm of O_h against ψ^{1/ρ}.
#[derive(Debug)]
pub struct HscjReport {
    pub eta: ClassificationResult,
    pub dini: WindowEstimate,
    pub tail: WindowEstimate,
    pub c4_psi: ConditionReport,
    pub gain_levels: Vec<f64>,
    pub gain_value: f64,
    pub gain_stability: Option<f64>,
}

impl HscjReport {
    pub fn gain_stable_at(&self, threshold: f64) -> bool {
        matches!(self.gain_stability, Some(r) if r <= threshold)
    }
}

/// Measures the regularity-gain phenomenon: when ψ has a positive doubling
/// constant at ρ, the outer function built from ψ-regular boundary data
/// lands in the class of ψ^{1/ρ}; the measured seminorm of O_h against
/// ψ^{1/ρ} exhibits this as refinement-stable finiteness.
pub fn hscj_check(
    ev: &OuterEvaluator,
    psi: &Modulus,
    rho: f64,
    grid: &GridSpec,
) -> Result<HscjReport, DiagnosticsError> {
    let eta = psi.rho_slow_eta(rho)?;
    let scheme = PairScheme::new(256, 12, 0);
    let psi_t = ev.h().psi_seminorm(psi, &scheme).value;
    let dini = ev.h().symmetric_dini_constant(psi, psi_t, 128, 8, ev.tol().max(1e-9))?;
    let tail = ev.h().product_tail_constant(psi, psi_t, 128, 8, ev.tol().max(1e-9))?;

    let diag = Diagnostics::new(ev, psi, psi, rho);
    let c4_psi = diag.condition4(grid)?;

    // seminorm of O_h itself against ψ^{1/ρ}
    let one = Diagnostics::new(ev, psi, psi, 1.0);
    let mut base = PairScheme::new(grid.circle_n, grid.pair_depth, grid.disk_layers);
    base.anchors.extend_from_slice(ev.h().zero_points());
    let mut gain_levels = Vec::new();
    for level in 0..grid.levels {
        let divergent = RefCell::new(None);
        let est = seminorm_circle(
            |theta| one.boundary_value(theta, &divergent),
            |d| (psi.log_val(d.ln()) / rho).exp(),
            &base.refined(level),
        );
        gain_levels.push(est.value);
    }
    let n = gain_levels.len();
    let gain_stability =
        if n >= 2 && gain_levels[n - 2] > 0.0 { Some(gain_levels[n - 1] / gain_levels[n - 2]) } else { None };
    Ok(HscjReport {
        eta,
        dini,
        tail,
        c4_psi,
        gain_value: gain_levels.last().copied().unwrap_or(0.0),
        gain_levels,
        gain_stability,
    })
}

fn order_arc(xi: f64, zeta: f64) -> (f64, f64) {
    let a = reduce(xi);
    let b = reduce(zeta);
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Infimum of `f` over the arc [θ, φ]: dense scan plus local refinement
/// around the minimizer.
fn arc_infimum(theta: f64, phi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = 128;
    let mut lo = theta;
    let mut hi = phi;
    let mut best = f64::INFINITY;
    let mut best_s = theta;
    for _ in 0..3 {
        let step = (hi - lo) / n as f64;
        for i in 0..=n {
            let s = lo + step * i as f64;
            let v = f(s);
            if v < best {
                best = v;
                best_s = s;
            }
        }
        let w = step * 2.0;
        lo = (best_s - w).max(theta);
        hi = (best_s + w).min(phi);
        if hi - lo < 1e-14 {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{BoundaryFunction, ChordFactor};
    use crate::carleson::CarlesonSet;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn chord_setup(exponent: f64, psi_alpha: f64, omega_alpha: f64, rho: f64) -> (OuterEvaluator, Modulus, Modulus, f64) {
        let h = BoundaryFunction::chord_product(1.0, vec![ChordFactor { angle: 0.0, exponent }]).unwrap();
        let ev = OuterEvaluator::new(h, 1e-8).unwrap();
        (ev, Modulus::power(psi_alpha).unwrap(), Modulus::power(omega_alpha).unwrap(), rho)
    }

    #[test]
    fn a_h_is_exactly_zero_for_constant_h() {
        let ev = OuterEvaluator::new(BoundaryFunction::constant(1.0).unwrap(), 1e-8).unwrap();
        let psi = Modulus::power(1.0).unwrap();
        let omega = Modulus::power(1.0).unwrap();
        let d = Diagnostics::new(&ev, &psi, &omega, 1.0);
        for &th in &[0.0, 1.0, 2.5, 4.0] {
            assert_eq!(d.a_h(th).unwrap(), 0.0);
        }
    }

    #[test]
    fn condition4_for_constant_h_is_one() {
        // a_h ≡ 0 ⇒ each term is h^ρ/ω(1) = 1 for h ≡ 1
        let ev = OuterEvaluator::new(BoundaryFunction::constant(1.0).unwrap(), 1e-8).unwrap();
        let psi = Modulus::power(1.0).unwrap();
        let omega = Modulus::power(1.0).unwrap();
        let d = Diagnostics::new(&ev, &psi, &omega, 1.0);
        let grid = GridSpec { circle_n: 16, disk_layers: 4, pair_depth: 6, levels: 2 };
        let r = d.condition4(&grid).unwrap();
        assert_relative_eq!(r.value.unwrap(), 1.0, epsilon = 1e-12);
        assert!(r.finite_at(1.1));
    }

    #[test]
    fn psi_arc_radius_closed_form() {
        // h = |ξ-1|, ψ(t) = t: at ξ = -1, h = 2, ψ_T ≈ 1, so the radius ≈ 1
        let (ev, psi, omega, rho) = chord_setup(1.0, 1.0, 1.0, 1.0);
        let d = Diagnostics::new(&ev, &psi, &omega, rho);
        assert_relative_eq!(d.psi_arc_radius(PI), 1.0, max_relative = 1e-6);
        assert_eq!(d.psi_arc_radius(0.0), 0.0);
    }

    #[test]
    fn a_h_finite_and_grows_toward_the_zero() {
        let (ev, psi, omega, rho) = chord_setup(1.0, 1.0, 1.0, 1.0);
        let d = Diagnostics::new(&ev, &psi, &omega, rho);
        let far = d.a_h(PI).unwrap();
        assert!(far.is_finite() && far > 0.0);
        let mut prev = far;
        for &th in &[2.0, 1.0, 0.5, 0.25] {
            let a = d.a_h(th).unwrap();
            assert!(a > prev, "a_h should grow approaching the zero: {a} vs {prev}");
            prev = a;
        }
    }

    #[test]
    fn a_big_vanishes_when_h_is_symmetric_about_both_endpoints() {
        // h_E for E = {1,-1} is even around π/2 and around 3π/2, so both
        // symmetric-difference brackets vanish identically
        let e = CarlesonSet::plus_minus_one();
        let w = Modulus::power(0.5).unwrap();
        let ev = OuterEvaluator::new(e.build_h_e(&w), 1e-8).unwrap();
        let d = Diagnostics::new(&ev, &w, &w, 1.0);
        let a = d.a_big(PI / 2.0, 3.0 * PI / 2.0).unwrap().unwrap();
        assert!(a < 1e-8, "got {a}");
        // an asymmetric pair of the chord function: strictly inside (0, 1)
        let (ev2, psi, omega, rho) = chord_setup(1.0, 1.0, 1.0, 1.0);
        let d2 = Diagnostics::new(&ev2, &psi, &omega, rho);
        let a2 = d2.a_big(PI / 2.0, PI).unwrap().unwrap();
        assert!(a2 > 0.0 && a2 < 1.0);
    }

    #[test]
    fn lambda_and_inf_chord_case() {
        let (ev, psi, omega, rho) = chord_setup(1.0, 1.0, 1.0, 1.0);
        let d = Diagnostics::new(&ev, &psi, &omega, rho);
        // min of h over [π/2, 3π/2] sits at the endpoints: |i-1| = √2
        let (_, h_inf) = d.lambda_and_inf(PI / 2.0, 3.0 * PI / 2.0);
        assert_relative_eq!(h_inf, 2f64.sqrt(), max_relative = 1e-9);
        // arc with the zero at an endpoint
        let (l0, h0) = d.lambda_and_inf(0.0, 0.3);
        assert!(l0 < 1e-12 && h0 < 1e-12);
    }

    #[test]
    fn claire_conditions_all_finite() {
        let e = CarlesonSet::plus_minus_one();
        let w = Modulus::power(0.5).unwrap();
        let ev = OuterEvaluator::new(e.build_h_e(&w), 1e-8).unwrap();
        let d = Diagnostics::new(&ev, &w, &w, 2.0);
        let grid = GridSpec { circle_n: 64, disk_layers: 5, pair_depth: 8, levels: 2 };
        let c1 = d.condition1(&grid).unwrap();
        let c2 = d.condition2(&grid).unwrap();
        let c4 = d.condition4(&grid).unwrap();
        for (name, r) in [("c1", &c1), ("c2", &c2), ("c4", &c4)] {
            assert!(!r.divergent(), "{name} divergent");
            assert!(r.value.unwrap().is_finite());
            let ratio = r.stability_ratio.unwrap();
            assert!(ratio < 1.6, "{name} ratio {ratio}");
        }
        let delta = d.default_delta(c2.value.unwrap());
        let c3 = d.condition3(delta, &grid).unwrap();
        assert!(c3.value.unwrap().is_finite());
        let sh = d.shirokov_criterion(&grid).unwrap();
        assert!(sh.value.unwrap().is_finite());
    }
}
