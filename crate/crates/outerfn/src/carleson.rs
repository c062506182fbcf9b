//! Closed boundary zero sets represented by their complementary arcs.
//!
//! A set E on the circle is stored as the sorted list of open arcs making up
//! its complement. Finite generators tile the whole circle (E is the finite
//! endpoint set); Cantor-style generators at finite depth leave residual
//! closed arcs whose measure is reported, never hidden. The admissibility
//! sum Σ chord(γ)·log ω(chord(γ)) is evaluated per arc with per-level
//! partial sums so a drift toward -∞ is visible as a trend across depths.

use crate::boundary::BoundaryFunction;
use crate::modulus::Modulus;
use crate::quad;
use thiserror::Error;

use std::f64::consts::{PI, TAU};

#[derive(Debug, Error)]
pub enum CarlesonError {
    #[error("need at least two boundary points, got {0}")]
    TooFewPoints(usize),
    #[error("cantor ratio must lie in (0, 1/2), got {0}")]
    BadRatio(f64),
    #[error("depth must be at least 1")]
    BadDepth,
    #[error("arcs overlap near angle {0}")]
    Overlap(f64),
    #[error("arc index {0} out of range")]
    BadArcIndex(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Finite,
    Cantor { ratio: f64, depth: u32 },
    /// Middle gaps of length c/(2^n n²) at level n: the family whose
    /// admissibility sum drifts to -∞ for power-type ω as depth grows.
    SlowCantor { depth: u32 },
    Explicit,
}

/// A closed subset of the circle given by its complementary open arcs.
///
/// Arcs are stored as `(a, b)` with `a ∈ [0, 2π)`, `a < b ≤ a + 2π`, sorted
/// and pairwise disjoint. `level_of[i]` records the construction level of
/// arc `i` for generator families (0 for finite/explicit sets).
#[derive(Debug, Clone)]
pub struct CarlesonSet {
    arcs: Vec<(f64, f64)>,
    level_of: Vec<u32>,
    generator: Generator,
}

fn reduce(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t == TAU {
        0.0
    } else {
        t
    }
}

/// Chord length subtended by an angular gap `d ∈ [0, 2π]`.
pub fn chord_of_angle(d: f64) -> f64 {
    2.0 * (0.5 * d).sin().abs()
}

impl CarlesonSet {
    /// E = the given finite set of angles; complementary arcs tile the circle.
    pub fn from_points(points: &[f64]) -> Result<Self, CarlesonError> {
        if points.len() < 2 {
            return Err(CarlesonError::TooFewPoints(points.len()));
        }
        let mut ps: Vec<f64> = points.iter().map(|&p| reduce(p)).collect();
        ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ps.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        if ps.len() < 2 {
            return Err(CarlesonError::TooFewPoints(1));
        }
        let mut arcs = Vec::with_capacity(ps.len());
        for i in 0..ps.len() {
            let a = ps[i];
            let b = if i + 1 < ps.len() { ps[i + 1] } else { ps[0] + TAU };
            arcs.push((a, b));
        }
        let n = arcs.len();
        Ok(CarlesonSet { arcs, level_of: vec![0; n], generator: Generator::Finite })
    }

    /// The two-point set {1, -1}.
    pub fn plus_minus_one() -> Self {
        Self::from_points(&[0.0, PI]).unwrap()
    }

    pub fn from_arcs(mut arcs: Vec<(f64, f64)>) -> Result<Self, CarlesonError> {
        arcs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for w in arcs.windows(2) {
            if w[0].1 > w[1].0 + 1e-15 {
                return Err(CarlesonError::Overlap(w[1].0));
            }
        }
        if let (Some(first), Some(last)) = (arcs.first(), arcs.last()) {
            if last.1 - TAU > first.0 + 1e-15 {
                return Err(CarlesonError::Overlap(first.0));
            }
        }
        let n = arcs.len();
        Ok(CarlesonSet { arcs, level_of: vec![0; n], generator: Generator::Explicit })
    }

    /// Middle-proportion removal: at each level the middle `ratio` fraction
    /// of every remaining interval becomes a complementary arc, leaving
    /// 2^depth residual intervals of positive measure.
    pub fn cantor(ratio: f64, depth: u32) -> Result<Self, CarlesonError> {
        if !(ratio > 0.0 && ratio < 0.5) {
            return Err(CarlesonError::BadRatio(ratio));
        }
        if depth == 0 {
            return Err(CarlesonError::BadDepth);
        }
        let mut intervals = vec![(0.0, TAU)];
        let mut arcs = Vec::new();
        let mut level_of = Vec::new();
        for level in 1..=depth {
            let mut next = Vec::with_capacity(intervals.len() * 2);
            for (a, b) in intervals {
                let w = b - a;
                let gap = ratio * w;
                let ga = a + 0.5 * (w - gap);
                let gb = ga + gap;
                arcs.push((ga, gb));
                level_of.push(level);
                next.push((a, ga));
                next.push((gb, b));
            }
            intervals = next;
        }
        let mut idx: Vec<usize> = (0..arcs.len()).collect();
        idx.sort_by(|&i, &j| arcs[i].0.partial_cmp(&arcs[j].0).unwrap());
        let arcs_sorted: Vec<(f64, f64)> = idx.iter().map(|&i| arcs[i]).collect();
        let levels_sorted: Vec<u32> = idx.iter().map(|&i| level_of[i]).collect();
        Ok(CarlesonSet { arcs: arcs_sorted, level_of: levels_sorted, generator: Generator::Cantor { ratio, depth } })
    }

    /// Cantor-style set with level-n middle gaps of length c/(2^n n²),
    /// c = 2. The per-level admissibility deficit for ω = t^α decays only
    /// like α·log2/n, so the partial sums drift downward without bound as
    /// the depth grows.
    pub fn slow_cantor(depth: u32) -> Result<Self, CarlesonError> {
        if depth == 0 {
            return Err(CarlesonError::BadDepth);
        }
        let c = 2.0;
        let mut intervals = vec![(0.0, TAU)];
        let mut arcs = Vec::new();
        let mut level_of = Vec::new();
        for level in 1..=depth {
            let n = level as f64;
            let gap = c / ((2f64).powf(n) * n * n);
            let mut next = Vec::with_capacity(intervals.len() * 2);
            for (a, b) in intervals {
                let w = b - a;
                let g = gap.min(0.5 * w);
                let ga = a + 0.5 * (w - g);
                let gb = ga + g;
                arcs.push((ga, gb));
                level_of.push(level);
                next.push((a, ga));
                next.push((gb, b));
            }
            intervals = next;
        }
        let mut idx: Vec<usize> = (0..arcs.len()).collect();
        idx.sort_by(|&i, &j| arcs[i].0.partial_cmp(&arcs[j].0).unwrap());
        let arcs_sorted: Vec<(f64, f64)> = idx.iter().map(|&i| arcs[i]).collect();
        let levels_sorted: Vec<u32> = idx.iter().map(|&i| level_of[i]).collect();
        Ok(CarlesonSet { arcs: arcs_sorted, level_of: levels_sorted, generator: Generator::SlowCantor { depth } })
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn level_of_arc(&self, i: usize) -> u32 {
        self.level_of[i]
    }

    /// Measure of the circle not covered by the complementary arcs, i.e. the
    /// Lebesgue measure of E at this (finite) construction depth.
    pub fn residual_measure(&self) -> f64 {
        let covered: f64 = self.arcs.iter().map(|&(a, b)| b - a).sum();
        (TAU - covered).max(0.0)
    }

    /// Endpoints of the complementary arcs (the visible part of E).
    pub fn endpoint_angles(&self) -> Vec<f64> {
        let mut pts: Vec<f64> = self.arcs.iter().flat_map(|&(a, b)| [reduce(a), reduce(b)]).collect();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        pts
    }

    /// Residual closed intervals of E with positive measure (empty for
    /// full tilings such as finite sets).
    pub fn residual_arcs(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        if self.arcs.is_empty() {
            return vec![(0.0, TAU)];
        }
        for i in 0..self.arcs.len() {
            let end = self.arcs[i].1;
            let next_start = if i + 1 < self.arcs.len() { self.arcs[i + 1].0 } else { self.arcs[0].0 + TAU };
            if next_start - end > 1e-13 {
                out.push((end, next_start));
            }
        }
        out
    }

    /// Σ over arcs of chord(γ)·log ω(chord(γ)), with per-level subtotals for
    /// generator families. Always finite at finite depth; the trend of the
    /// per-level partial sums is the desk-scale divergence signal.
    pub fn carleson_sum(&self, omega: &Modulus) -> CarlesonSum {
        let max_level = self.level_of.iter().copied().max().unwrap_or(0);
        let mut by_level = vec![0.0f64; (max_level + 1) as usize];
        let mut total = 0.0;
        for (i, &(a, b)) in self.arcs.iter().enumerate() {
            let chord = chord_of_angle(b - a);
            if chord <= 0.0 {
                continue;
            }
            let term = chord * omega.log_val(chord.ln());
            total += term;
            by_level[self.level_of[i] as usize] += term;
        }
        let mut partial = Vec::with_capacity(by_level.len());
        let mut acc = 0.0;
        for v in &by_level {
            acc += v;
            partial.push(acc);
        }
        CarlesonSum { total, partial_by_level: partial }
    }

    /// The boundary function vanishing exactly on E: on each arc γ = (a, b)
    /// the value ω(chord(γ))·|ξ-e^{ia}||ξ-e^{ib}|/chord(γ)², zero on E.
    pub fn build_h_e(&self, omega: &Modulus) -> BoundaryFunction {
        BoundaryFunction::carleson_h_e(self.clone(), omega.clone())
    }

    /// Normalized derivative sups of k_E(θ) = h_E(e^{iθ}) on one arc:
    /// (sup|k'|·chord/ω(chord), sup|k''|·chord²/ω(chord)) by central
    /// differences at step arc/2048, one-sided on the outermost cells.
    pub fn derivative_bounds(&self, omega: &Modulus, arc_index: usize) -> Result<(f64, f64), CarlesonError> {
        if arc_index >= self.arcs.len() {
            return Err(CarlesonError::BadArcIndex(arc_index));
        }
        let (a, b) = self.arcs[arc_index];
        let chord = chord_of_angle(b - a);
        let lw = omega.log_val(chord.ln());
        let k = |theta: f64| -> f64 {
            let ca = chord_of_angle(theta - a);
            let cb = chord_of_angle(b - theta);
            (lw + ca.ln() + cb.ln() - 2.0 * chord.ln()).exp()
        };
        let n = 2048usize;
        let h = (b - a) / n as f64;
        let mut sup1 = 0.0f64;
        let mut sup2 = 0.0f64;
        for i in 0..=n {
            let t = a + i as f64 * h;
            let (d1, d2) = if i == 0 || i == 1 {
                let t0 = a + h;
                ((k(t0 + h) - k(t0 - h)) / (2.0 * h), (k(t0 + h) - 2.0 * k(t0) + k(t0 - h)) / (h * h))
            } else if i >= n - 1 {
                let t0 = b - h;
                ((k(t0 + h) - k(t0 - h)) / (2.0 * h), (k(t0 + h) - 2.0 * k(t0) + k(t0 - h)) / (h * h))
            } else {
                ((k(t + h) - k(t - h)) / (2.0 * h), (k(t + h) - 2.0 * k(t) + k(t - h)) / (h * h))
            };
            sup1 = sup1.max(d1.abs());
            sup2 = sup2.max(d2.abs());
        }
        let w = omega.val(chord);
        Ok((sup1 * chord / w, sup2 * chord * chord / w))
    }
}

#[derive(Debug, Clone)]
pub struct CarlesonSum {
    pub total: f64,
    /// Cumulative sums through each construction level.
    pub partial_by_level: Vec<f64>,
}

/// ∫_a^b log((b-t)(t-a)/(b-a)²) dt on the flat interval, evaluated with the
/// same shell engine as everything else. The exact value is 2(a-b).
///
/// The integrand is symmetric about the midpoint, so the integral is twice
/// the half-range shell sum in the offset coordinate u = t - a, which keeps
/// the endpoint singularity exactly representable.
pub fn flat_arc_log_integral(a: f64, b: f64, rel_tol: f64) -> Result<f64, quad::QuadError> {
    let w = b - a;
    let mut f = |u: f64| (((w - u) * u) / (w * w)).ln();
    match quad::shell_integral(&mut f, 0.5 * w, 0.5, rel_tol, 200, 1e-14)? {
        Some(half) => Ok(2.0 * half),
        None => Err(quad::QuadError::Undecided { shells: 200 }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn finite_set_tiles_the_circle() {
        let e = CarlesonSet::plus_minus_one();
        assert_eq!(e.arcs().len(), 2);
        assert!(e.residual_measure() < 1e-12);
        assert!(e.residual_arcs().is_empty());
        assert_eq!(e.endpoint_angles().len(), 2);
    }

    #[test]
    fn carleson_sum_two_semicircles() {
        // two arcs of chord 2, each contributing 2·log ω(2) = 2·log √2
        let e = CarlesonSet::plus_minus_one();
        let w = Modulus::power(0.5).unwrap();
        let s = e.carleson_sum(&w);
        assert_relative_eq!(s.total, 2.0 * std::f64::consts::LN_2, max_relative = 1e-12);
    }

    #[test]
    fn cantor_depths_and_lengths() {
        let c1 = CarlesonSet::cantor(1.0 / 3.0, 1).unwrap();
        assert_eq!(c1.arcs().len(), 1);
        assert_relative_eq!(c1.arcs()[0].1 - c1.arcs()[0].0, TAU / 3.0, max_relative = 1e-12);

        let c2 = CarlesonSet::cantor(1.0 / 3.0, 2).unwrap();
        assert_eq!(c2.arcs().len(), 3);
        let mut lens: Vec<f64> = c2.arcs().iter().map(|&(a, b)| b - a).collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // level-2 gaps are (1-λ)/2 as long as the level-1 gap
        assert_relative_eq!(lens[0] / lens[2], (1.0 - 1.0 / 3.0) / 2.0, max_relative = 1e-12);
        assert_relative_eq!(lens[0], lens[1], max_relative = 1e-12);
        assert!(c2.residual_measure() > 0.0);

        let depth = 6;
        let c6 = CarlesonSet::cantor(1.0 / 3.0, depth).unwrap();
        assert_eq!(c6.arcs().len(), (1 << depth) - 1);
    }

    #[test]
    fn slow_cantor_partial_sums_drift_down() {
        let w = Modulus::power(0.5).unwrap();
        let set = CarlesonSet::slow_cantor(10).unwrap();
        let sums = set.carleson_sum(&w).partial_by_level;
        for k in 2..sums.len() {
            assert!(sums[k] < sums[k - 1], "partial sums must keep decreasing");
        }
    }

    #[test]
    fn flat_log_identity() {
        let v = flat_arc_log_integral(0.3, 1.7, 1e-10).unwrap();
        assert_relative_eq!(v, 2.0 * (0.3 - 1.7), epsilon = 1e-8);
    }

    #[test]
    fn derivative_bounds_normalized_sups() {
        // closed form: sup|k'|·ℓ/ω(ℓ) = 1 and sup|k''|·ℓ²/ω(ℓ) = 2 exactly
        // for every arc of a full tiling
        let e = CarlesonSet::plus_minus_one();
        let w = Modulus::power(0.5).unwrap();
        let (c1, c2) = e.derivative_bounds(&w, 0).unwrap();
        assert_relative_eq!(c1, 1.0, max_relative = 1e-3);
        assert_relative_eq!(c2, 2.0, max_relative = 1e-3);
    }
}
