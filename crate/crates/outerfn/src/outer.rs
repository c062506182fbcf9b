//! The outer function O_h = exp(u_h + i v_h) on the closed disk.
//!
//! `u_h` is the Poisson integral of log h, `v_h` its conjugate normalized to
//! v_h(0) = 0. Interior evaluation integrates both kernels over a fixed
//! quadrature plan graded toward the zeros of h, with on-the-fly cell
//! splitting that keeps every cell no wider than a quarter of the local
//! kernel scale max(1-|z|, distance to arg z). Boundary phase is the
//! principal-value integral in the symmetrized form
//! (1/2π)∫ (log h(θ-t) - log h(θ+t))/tan(t/2) dt, whose integrand is bounded
//! near t = 0 wherever h is positive and Hölder; the truncation shells
//! toward t = 0 carry the divergence test.

use crate::boundary::{reduce, BoundaryError, BoundaryFunction};
use crate::modulus::Modulus;
use crate::quad::{self, QuadError};
use num_complex::Complex64;
use thiserror::Error;

use std::f64::consts::{PI, TAU};

#[derive(Debug, Error)]
pub enum OuterError {
    #[error("log h is not integrable; no outer function exists for this data")]
    LogDivergent,
    #[error("interior evaluation needs |z| ≤ 1 - 1e-12, got |z| = {0}")]
    InteriorDomain(f64),
    #[error("point is outside the closed disk: |z| = {0}")]
    Domain(f64),
    #[error("angle {0} is inside the {1:e} margin around the zero set; boundary phase is not evaluated there")]
    Margin(f64, f64),
    #[error("boundary phase truncation diverges at angle {0}")]
    DivergentPhase(f64),
    #[error("power must satisfy rho ≥ 1, got {0}")]
    BadRho(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
}

struct PlanCell {
    a: f64,
    b: f64,
    /// (node, weight, log h(node)) triples of the 16-point rule on [a, b].
    nodes: [(f64, f64, f64); 16],
}

/// Precomputed quadrature plan for log h plus the evaluators built on it.
pub struct OuterEvaluator {
    h: BoundaryFunction,
    plan: Vec<PlanCell>,
    tol: f64,
    margin: f64,
    log_mean: f64,
}

const INTERIOR_EDGE: f64 = 1e-12;
const ZERO_SNAP: f64 = 1e-12;

impl OuterEvaluator {
    pub fn new(h: BoundaryFunction, tol: f64) -> Result<Self, OuterError> {
        Self::with_margin(h, tol, 1e-10)
    }

    pub fn with_margin(h: BoundaryFunction, tol: f64, margin: f64) -> Result<Self, OuterError> {
        let log_mean = match h.log_integral(tol)? {
            crate::boundary::LogIntegral::Finite(v) => v,
            crate::boundary::LogIntegral::Divergent => return Err(OuterError::LogDivergent),
        };
        let plan = build_plan(&h);
        Ok(OuterEvaluator { h, plan, tol, margin, log_mean })
    }

    pub fn h(&self) -> &BoundaryFunction {
        &self.h
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    /// (1/2π)∫ log h as reconstructed at plan construction.
    pub fn log_mean(&self) -> f64 {
        self.log_mean
    }

    /// Direct sum of the plan cells; agrees with `log_mean` within 2·tol
    /// (plan-consistency invariant).
    pub fn plan_log_mean(&self) -> f64 {
        let mut acc = 0.0;
        for cell in &self.plan {
            for &(_, w, lh) in &cell.nodes {
                acc += w * lh;
            }
        }
        acc / TAU
    }

    /// Harmonic extension u_h(z) = Poisson integral of log h, |z| < 1.
    pub fn u(&self, z: Complex64) -> Result<f64, OuterError> {
        Ok(self.poisson_pair(z)?.0)
    }

    /// Conjugate harmonic v_h(z) with v_h(0) = 0, |z| < 1.
    pub fn v_interior(&self, z: Complex64) -> Result<f64, OuterError> {
        Ok(self.poisson_pair(z)?.1)
    }

    fn poisson_pair(&self, z: Complex64) -> Result<(f64, f64), OuterError> {
        let r = z.norm();
        if r > 1.0 - INTERIOR_EDGE {
            return Err(OuterError::InteriorDomain(r));
        }
        let phi = reduce(z.arg());
        let mut acc_u = 0.0;
        let mut acc_v = 0.0;
        let scale0 = 1.0 - r;
        for cell in &self.plan {
            self.accumulate(cell.a, cell.b, Some(&cell.nodes), r, phi, scale0, &mut acc_u, &mut acc_v);
        }
        Ok((acc_u / TAU, acc_v / TAU))
    }

    #[allow(clippy::too_many_arguments)]
    fn accumulate(
        &self,
        a: f64,
        b: f64,
        cached: Option<&[(f64, f64, f64); 16]>,
        r: f64,
        phi: f64,
        scale0: f64,
        acc_u: &mut f64,
        acc_v: &mut f64,
    ) {
        let width = b - a;
        let dist = angular_distance_to_interval(phi, a, b);
        let scale = scale0.max(dist);
        if width > 0.25 * scale && width > 1e-13 {
            let m = 0.5 * (a + b);
            self.accumulate(a, m, None, r, phi, scale0, acc_u, acc_v);
            self.accumulate(m, b, None, r, phi, scale0, acc_u, acc_v);
            return;
        }
        let fresh;
        let nodes: &[(f64, f64, f64); 16] = match cached {
            Some(n) => n,
            None => {
                fresh = self.fresh_nodes(a, b);
                &fresh
            }
        };
        let one_minus_r = 1.0 - r;
        for &(s, w, lh) in nodes.iter() {
            let x = phi - s;
            // 1 - 2r cos x + r² in cancellation-free form
            let sh = (0.5 * x).sin();
            let denom = one_minus_r * one_minus_r + 4.0 * r * sh * sh;
            *acc_u += w * lh * ((1.0 + r) * one_minus_r) / denom;
            *acc_v += w * lh * (2.0 * r * x.sin()) / denom;
        }
    }

    fn fresh_nodes(&self, a: f64, b: f64) -> [(f64, f64, f64); 16] {
        let base = quad::gl16_nodes(a, b);
        let mut out = [(0.0, 0.0, 0.0); 16];
        for (i, &(s, w)) in base.iter().enumerate() {
            let lh = self.h.log_eval(s);
            // isolated node collisions with the zero set are integrable
            out[i] = (s, w, if lh.is_finite() { lh } else { 0.0 });
        }
        out
    }

    /// Boundary phase by the symmetrized principal-value integral; requires
    /// the point to sit outside the zero-margin.
    pub fn v_boundary(&self, theta: f64) -> Result<f64, OuterError> {
        let th = reduce(theta);
        let d = self.h.chord_dist_to_zeros(th);
        if d < self.margin {
            return Err(OuterError::Margin(th, self.margin));
        }
        let g = |t: f64| {
            let diff = self.h.log_eval(th - t) - self.h.log_eval(th + t);
            let v = diff / (0.5 * t).tan();
            // a node can round exactly onto a zero of h; the point is
            // integrable and contributes nothing at machine scale
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        // break the range at every t where θ ± t meets a zero
        let mut breaks: Vec<f64> = Vec::new();
        for &z in self.h.zero_points() {
            for cand in [reduce(z - th), reduce(th - z)] {
                if cand > 1e-13 && cand < PI - 1e-13 {
                    breaks.push(cand);
                }
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-13);

        let first = breaks.first().copied().unwrap_or(PI);
        let s0 = (0.5 * first).min(0.5);
        let mut g_shell = g;
        let head = match quad::shell_integral(&mut g_shell, s0, 0.5, self.tol, 200, 1e-14)? {
            Some(v) => v,
            None => return Err(OuterError::DivergentPhase(th)),
        };
        let mut cells: Vec<(f64, f64)> = Vec::new();
        let mut lo = s0;
        for (i, &bk) in breaks.iter().enumerate() {
            cells.extend(quad::graded_span(lo, bk, i > 0, true, 1e-12, PI / 8.0));
            lo = bk;
        }
        if lo < PI {
            let sing_left = !breaks.is_empty();
            cells.extend(quad::graded_span(lo, PI, sing_left, false, 1e-12, PI / 8.0));
        }
        // graded Gauss cells resolve the log singularities directly; the
        // truncation slivers contribute below 1e-10
        let mut g_rest = g_shell;
        let rest = quad::sum_cells(&mut g_rest, &cells);
        Ok((head + rest) / TAU)
    }

    /// O_h(z)^ρ on the closed disk: exp(ρ(u+iv)) inside, h^ρ e^{iρv} on the
    /// boundary off the zero set, 0 on the zero set itself. Points inside
    /// the margin band around the zeros are refused rather than fabricated.
    pub fn value(&self, z: Complex64, rho: f64) -> Result<Complex64, OuterError> {
        if rho < 1.0 {
            return Err(OuterError::BadRho(rho));
        }
        let r = z.norm();
        if r <= 1.0 - INTERIOR_EDGE {
            let (u, v) = self.poisson_pair(z)?;
            Ok(Complex64::from_polar((rho * u).exp(), rho * v))
        } else if r <= 1.0 + 1e-9 {
            let th = reduce(z.arg());
            let d = self.h.chord_dist_to_zeros(th);
            if d <= ZERO_SNAP {
                return Ok(Complex64::new(0.0, 0.0));
            }
            if d < self.margin {
                return Err(OuterError::Margin(th, self.margin));
            }
            let v = self.v_boundary(th)?;
            let modulus = (rho * self.h.log_eval(th)).exp();
            Ok(Complex64::from_polar(modulus, rho * v))
        } else {
            Err(OuterError::Domain(r))
        }
    }

    /// |O_h(z)^ρ| for interior z; by construction equals exp(ρ·u(z)).
    pub fn modulus_pow(&self, z: Complex64, rho: f64) -> Result<f64, OuterError> {
        Ok((rho * self.u(z)?).exp())
    }

    /// Max deviation |v(r e^{iφ}) - v(e^{iφ})| over φ sampled on the central
    /// `fraction` of the comparability arc around ξ, one entry per radius.
    /// The deviations must decrease as the radii approach 1.
    #[allow(clippy::too_many_arguments)]
    pub fn boundary_convergence_probe(
        &self,
        xi: f64,
        radii: &[f64],
        psi: &Modulus,
        psi_t: f64,
        fraction: f64,
        n_samples: usize,
    ) -> Result<Vec<f64>, OuterError> {
        let th = reduce(xi);
        let h0 = self.h.eval(th);
        if h0 <= 0.0 {
            return Err(OuterError::Margin(th, self.margin));
        }
        let cap_chord = psi.inv_star((h0 / (2.0 * psi_t.max(1e-12))).clamp(0.0, 1.0));
        let halfwidth = 2.0 * (0.5 * cap_chord.min(2.0)).asin() * fraction;
        let n = n_samples.max(3);
        let mut phis = Vec::with_capacity(n);
        let mut v_bdry = Vec::with_capacity(n);
        for m in 0..n {
            let x = -1.0 + 2.0 * m as f64 / (n - 1) as f64;
            let phi = th + halfwidth * x;
            v_bdry.push(self.v_boundary(phi)?);
            phis.push(phi);
        }
        let mut out = Vec::with_capacity(radii.len());
        for &r in radii {
            let mut dev = 0.0f64;
            for (phi, vb) in phis.iter().zip(&v_bdry) {
                let vi = self.v_interior(Complex64::from_polar(r, *phi))?;
                dev = dev.max((vi - vb).abs());
            }
            out.push(dev);
        }
        Ok(out)
    }
}

/// Angular distance from φ to the interval [a, b] on the circle.
fn angular_distance_to_interval(phi: f64, a: f64, b: f64) -> f64 {
    for shift in [-TAU, 0.0, TAU] {
        let p = phi + shift;
        if p >= a && p <= b {
            return 0.0;
        }
    }
    let mut d = f64::INFINITY;
    for shift in [-TAU, 0.0, TAU] {
        let p = phi + shift;
        d = d.min((p - a).abs()).min((p - b).abs());
    }
    d
}

fn build_plan(h: &BoundaryFunction) -> Vec<PlanCell> {
    let max_w = PI / 16.0;
    let spans = positive_cover(h);
    let mut cells: Vec<(f64, f64)> = Vec::new();
    for (a, b, sing_a, sing_b) in spans {
        cells.extend(quad::graded_span(a, b, sing_a, sing_b, (b - a) * 1e-14, max_w));
    }
    cells
        .into_iter()
        .map(|(a, b)| {
            let base = quad::gl16_nodes(a, b);
            let mut nodes = [(0.0, 0.0, 0.0); 16];
            for (i, &(s, w)) in base.iter().enumerate() {
                let lh = h.log_eval(s);
                nodes[i] = (s, w, if lh.is_finite() { lh } else { 0.0 });
            }
            PlanCell { a, b, nodes }
        })
        .collect()
}

/// Cover of the circle by spans whose endpoints include every zero of h.
fn positive_cover(h: &BoundaryFunction) -> Vec<(f64, f64, bool, bool)> {
    let mut bounds: Vec<f64> = h.zero_points().to_vec();
    for &(a, b) in h.zero_arcs() {
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
        if b - a > 1e-14 {
            spans.push((a, b, true, true));
        }
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::ChordFactor;
    use approx::assert_relative_eq;

    fn chord_h(exponent: f64) -> BoundaryFunction {
        BoundaryFunction::chord_product(1.0, vec![ChordFactor { angle: 0.0, exponent }]).unwrap()
    }

    #[test]
    fn constant_data_gives_constant_outer() {
        let ev = OuterEvaluator::new(BoundaryFunction::constant(1.0).unwrap(), 1e-9).unwrap();
        for &z in &[Complex64::new(0.3, 0.4), Complex64::new(0.0, 0.0), Complex64::new(-0.7, 0.1)] {
            assert!(ev.u(z).unwrap().abs() < 1e-12);
            assert!(ev.v_interior(z).unwrap().abs() < 1e-12);
            let o = ev.value(z, 1.0).unwrap();
            assert_relative_eq!(o.re, 1.0, epsilon = 1e-10);
            assert!(o.im.abs() < 1e-10);
        }
        assert!(ev.v_boundary(1.234).unwrap().abs() < 1e-10);
    }

    #[test]
    fn chord_outer_matches_one_minus_z() {
        let ev = OuterEvaluator::new(chord_h(1.0), 1e-9).unwrap();
        assert!(ev.u(Complex64::new(0.0, 0.0)).unwrap().abs() < 1e-9);
        let u = ev.u(Complex64::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(u, 0.5f64.ln(), epsilon = 1e-8);
        let v = ev.v_interior(Complex64::new(0.0, 0.5)).unwrap();
        assert_relative_eq!(v, Complex64::new(1.0, -0.5).arg(), epsilon = 1e-8);
        let o = ev.value(Complex64::new(0.5, 0.0), 1.0).unwrap();
        assert_relative_eq!(o.re, 0.5, epsilon = 1e-8);
        assert!(o.im.abs() < 1e-8);
        // near-boundary point
        let z = Complex64::from_polar(1.0 - 1e-6, 2.0);
        let o = ev.value(z, 1.0).unwrap();
        let want = Complex64::new(1.0, 0.0) - z;
        assert!((o - want).norm() < 1e-7, "near-boundary deviation {}", (o - want).norm());
    }

    #[test]
    fn boundary_phase_matches_closed_form() {
        let ev = OuterEvaluator::new(chord_h(1.0), 1e-10).unwrap();
        // v(θ) = (θ-π)/2 on (0, 2π)
        for &th in &[0.3, std::f64::consts::FRAC_PI_2, PI, 4.0, 6.0] {
            let v = ev.v_boundary(th).unwrap();
            assert_relative_eq!(v, (th - PI) / 2.0, epsilon = 1e-8);
        }
        assert!(matches!(ev.v_boundary(1e-14), Err(OuterError::Margin(..))));
    }

    #[test]
    fn square_root_outer_squares_back() {
        let ev = OuterEvaluator::new(chord_h(0.5), 1e-9).unwrap();
        let z = Complex64::new(0.3, -0.2);
        let o2 = ev.value(z, 2.0).unwrap();
        let want = Complex64::new(1.0, 0.0) - z;
        assert!((o2 - want).norm() < 1e-7);
        // boundary at z = -1: O² = 1-(-1) = 2
        let ob = ev.value(Complex64::new(-1.0, 0.0), 2.0).unwrap();
        assert_relative_eq!(ob.re, 2.0, epsilon = 1e-6);
        assert!(ob.im.abs() < 1e-6);
    }

    #[test]
    fn boundary_value_on_zero_set_is_zero() {
        let ev = OuterEvaluator::new(chord_h(1.0), 1e-9).unwrap();
        let o = ev.value(Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert_eq!(o, Complex64::new(0.0, 0.0));
        // inside the margin but off the zero: explicit refusal
        let th = 3e-11;
        let z = Complex64::from_polar(1.0, th);
        assert!(matches!(ev.value(z, 1.0), Err(OuterError::Margin(..))));
    }

    #[test]
    fn plan_reconstructs_log_integral() {
        let ev = OuterEvaluator::new(chord_h(1.0), 1e-9).unwrap();
        assert!((ev.plan_log_mean() - ev.log_mean()).abs() <= 2e-9 + 1e-12);
    }

    #[test]
    fn mean_value_property_of_u() {
        let ev = OuterEvaluator::new(chord_h(0.5), 1e-9).unwrap();
        let z = Complex64::new(0.2, 0.35);
        let r = (1.0 - z.norm()) / 4.0;
        let direct = ev.u(z).unwrap();
        let mut avg = 0.0;
        let n = 16;
        for k in 0..n {
            let w = Complex64::from_polar(r, TAU * k as f64 / n as f64);
            avg += ev.u(z + w).unwrap();
        }
        avg /= n as f64;
        assert_relative_eq!(direct, avg, epsilon = 1e-7);
    }

    #[test]
    fn interior_modulus_consistency() {
        let ev = OuterEvaluator::new(chord_h(0.5), 1e-9).unwrap();
        let z = Complex64::new(-0.4, 0.55);
        let o = ev.value(z, 2.0).unwrap();
        assert_relative_eq!(o.norm(), ev.modulus_pow(z, 2.0).unwrap(), max_relative = 4.0 * f64::EPSILON);
    }

    #[test]
    fn convergence_probe_decreases() {
        let ev = OuterEvaluator::new(chord_h(1.0), 1e-10).unwrap();
        let psi = Modulus::power(1.0).unwrap();
        let psi_t = ev.h().psi_seminorm(&psi, &crate::boundary::PairScheme::new(64, 8, 0)).value;
        let radii: Vec<f64> = (4..=10).map(|k| 1.0 - 0.5f64.powi(k)).collect();
        let devs = ev.boundary_convergence_probe(PI, &radii, &psi, psi_t, 0.125, 9).unwrap();
        for w in devs.windows(2) {
            assert!(w[1] < w[0], "deviations must decrease: {devs:?}");
        }
    }

    #[test]
    fn divergent_log_rejected() {
        let mut s = vec![1.0; 64];
        for v in s.iter_mut().take(8) {
            *v = 0.0;
        }
        let h = BoundaryFunction::tabulated(s, 1e-12).unwrap();
        assert!(matches!(OuterEvaluator::new(h, 1e-8), Err(OuterError::LogDivergent)));
    }
}
