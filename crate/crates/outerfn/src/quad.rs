//! Quadrature engine shared by the integral estimators.
//!
//! Everything here works on explicit cell lists: callers first build a
//! partition of the integration range (usually geometrically graded toward
//! integrable singularities), then integrate with a fixed 16-point
//! Gauss-Legendre rule per cell, optionally refined adaptively. Truncation
//! sequences toward a singular endpoint are judged by the increment-decay
//! test in [`assess_increments`], which is how log-type divergence is told
//! apart from slow convergence without symbolic knowledge of the integrand.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("quadrature did not reach relative tolerance {tol:e}; residual estimate {residual:e}")]
    Accuracy { tol: f64, residual: f64 },
    #[error("truncation sequence undecided after {shells} shells")]
    Undecided { shells: usize },
}

/// Positive abscissas of the 16-point Gauss-Legendre rule on [-1, 1].
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

/// Nodes and weights of the 16-point rule mapped to `[a, b]`.
pub fn gl16_nodes(a: f64, b: f64) -> [(f64, f64); 16] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 16];
    for i in 0..8 {
        let dx = h * GL16_X[i];
        let w = h * GL16_W[i];
        out[2 * i] = (c - dx, w);
        out[2 * i + 1] = (c + dx, w);
    }
    out
}

pub fn gauss16<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        let dx = h * GL16_X[i];
        acc += GL16_W[i] * (f(c - dx) + f(c + dx));
    }
    acc * h
}

/// Split `[a, b]` into cells no wider than `max_w`.
pub fn uniform_cells(a: f64, b: f64, max_w: f64) -> Vec<(f64, f64)> {
    let n = ((b - a) / max_w).ceil().max(1.0) as usize;
    let w = (b - a) / n as f64;
    (0..n)
        .map(|i| (a + i as f64 * w, if i + 1 == n { b } else { a + (i + 1) as f64 * w }))
        .collect()
}

/// Geometric half-grading toward `a`: cell widths shrink by 1/2 until
/// they reach `min_w`; the last sliver `[a, a+min]` is kept as one cell.
fn graded_toward_left(a: f64, b: f64, min_w: f64) -> Vec<(f64, f64)> {
    let mut cells = Vec::new();
    let mut hi = b;
    let mut half = 0.5 * (b - a);
    while half > min_w && hi - a > 2.0 * min_w {
        let lo = hi - half;
        cells.push((lo, hi));
        hi = lo;
        half *= 0.5;
    }
    cells.push((a, hi));
    cells.reverse();
    cells
}

/// Partition `[a, b]` graded toward whichever endpoints are singular, with
/// smooth spans capped at `max_w`.
pub fn graded_span(a: f64, b: f64, sing_left: bool, sing_right: bool, min_w: f64, max_w: f64) -> Vec<(f64, f64)> {
    assert!(b > a, "empty span");
    // floor keeps quadrature nodes clear of the ULP neighborhood of the
    // singular endpoint, where they would round onto it
    let min_w = min_w.max(1e-13);
    let raw = match (sing_left, sing_right) {
        (false, false) => uniform_cells(a, b, max_w),
        (true, false) => graded_toward_left(a, b, min_w),
        (false, true) => {
            let mut cells: Vec<(f64, f64)> =
                graded_toward_left(0.0, b - a, min_w).iter().map(|&(x, y)| (b - y, b - x)).collect();
            cells.reverse();
            cells
        }
        (true, true) => {
            let mid = 0.5 * (a + b);
            let mut cells = graded_toward_left(a, mid, min_w);
            let mut right: Vec<(f64, f64)> =
                graded_toward_left(0.0, b - mid, min_w).iter().map(|&(x, y)| (b - y, b - x)).collect();
            right.reverse();
            cells.append(&mut right);
            cells
        }
    };
    // cap smooth-side widths
    let mut out = Vec::with_capacity(raw.len());
    for (lo, hi) in raw {
        if hi - lo > max_w {
            out.extend(uniform_cells(lo, hi, max_w));
        } else {
            out.push((lo, hi));
        }
    }
    out
}

/// Plain Gauss-Legendre sweep over a fixed cell list (no refinement); for
/// partitions already graded to the integrand's singularities.
pub fn sum_cells<F: FnMut(f64) -> f64>(f: &mut F, cells: &[(f64, f64)]) -> f64 {
    cells.iter().map(|&(a, b)| gauss16(f, a, b)).sum()
}

/// Integrate over the given cells, refining each cell by bisection until the
/// local correction falls under its share of the global tolerance.
pub fn adaptive_cells<F: FnMut(f64) -> f64>(
    f: &mut F,
    cells: &[(f64, f64)],
    rel_tol: f64,
) -> Result<f64, QuadError> {
    let mut coarse = Vec::with_capacity(cells.len());
    let mut mag = 0.0;
    for &(a, b) in cells {
        let v = gauss16(f, a, b);
        mag += v.abs();
        coarse.push(v);
    }
    let scale = mag.max(1e-300);
    let total_w: f64 = cells.iter().map(|&(a, b)| b - a).sum();
    let mut sum = 0.0;
    let mut residual: f64 = 0.0;
    let mut work: Vec<(f64, f64, f64)> = cells
        .iter()
        .zip(coarse)
        .map(|(&(a, b), v)| (a, b, v))
        .collect();
    let mut splits = 0usize;
    const MAX_SPLITS: usize = 400_000;
    while let Some((a, b, v)) = work.pop() {
        let m = 0.5 * (a + b);
        let v2 = gauss16(f, a, m) + gauss16(f, m, b);
        let err = (v2 - v).abs();
        let budget = rel_tol * scale * ((b - a) / total_w).max(1e-4);
        // never split below twice the node-safety floor of the graded
        // partitions, or nodes start rounding onto the singular endpoints
        if err <= budget || b - a < 2e-13 || splits >= MAX_SPLITS {
            sum += v2;
            residual += err;
        } else {
            splits += 2;
            work.push((a, m, gauss16(f, a, m)));
            work.push((m, b, gauss16(f, m, b)));
        }
    }
    if residual > 1e-14 && residual > rel_tol * sum.abs().max(scale) * 10.0 {
        return Err(QuadError::Accuracy { tol: rel_tol, residual });
    }
    Ok(sum)
}

/// Verdict on a sequence of truncation increments toward a singular endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Increments decay geometrically; `tail` extrapolates the remainder.
    Converged { tail: f64 },
    /// Increments fail the decay test persistently (log-type divergence).
    Diverging,
    Undecided,
}

const DECAY_LAG: usize = 4;
const DECAY_WINDOW: usize = 8;
/// An increment must shrink by at least this factor over `DECAY_LAG` shells.
const DECAY_FACTOR: f64 = 1.1;

/// Judge a truncation sequence by the decay of its recent increments.
///
/// Convergence requires every one of the last `DECAY_WINDOW` increments to be
/// smaller than the increment `DECAY_LAG` shells earlier by the factor 1.1;
/// persistent failure of that test on the whole window is the divergence
/// verdict. Anything mixed is undecided and the caller keeps deepening.
pub fn assess_increments(inc: &[f64]) -> Tail {
    let n = inc.len();
    if n < DECAY_LAG + DECAY_WINDOW {
        return Tail::Undecided;
    }
    let max_abs = inc.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    // increments at rounding-noise scale relative to the sequence count as
    // converged (an identically-cancelling integrand never decays cleanly)
    let noise = 1e-13 * max_abs;
    if inc[n - DECAY_LAG..].iter().all(|c| c.abs() <= noise) {
        return Tail::Converged { tail: 0.0 };
    }
    let thresh = 1.0 / DECAY_FACTOR;
    let mut all_fast = true;
    let mut all_slow = true;
    for i in (n - DECAY_WINDOW)..n {
        let num = inc[i].abs();
        let den = inc[i - DECAY_LAG].abs();
        let fast = num <= thresh * den || num <= noise;
        all_fast &= fast;
        all_slow &= !fast;
    }
    if all_fast {
        let num = inc[n - 1].abs();
        let den = inc[n - 1 - DECAY_LAG].abs();
        let q = if den > 0.0 { (num / den).powf(0.25).min(0.99) } else { 0.0 };
        let tail = inc[n - 1] * q / (1.0 - q);
        Tail::Converged { tail }
    } else if all_slow {
        Tail::Diverging
    } else {
        Tail::Undecided
    }
}

/// Sum geometric truncation shells `[s·r^{k+1}, s·r^k]` of `f` down toward
/// zero until the extrapolated tail is below `rel_tol`, or report divergence.
///
/// Returns `Ok(None)` when the increments show log-type divergence.
/// `abs_floor` is the caller's noise scale: an increment sequence that never
/// rises above it is a cancelling integrand and counts as converged.
pub fn shell_integral<F: FnMut(f64) -> f64>(
    f: &mut F,
    s: f64,
    ratio: f64,
    rel_tol: f64,
    max_shells: usize,
    abs_floor: f64,
) -> Result<Option<f64>, QuadError> {
    debug_assert!(ratio > 0.0 && ratio < 1.0);
    let mut sum = 0.0;
    let mut incs: Vec<f64> = Vec::with_capacity(64);
    let mut hi = s;
    for _ in 0..max_shells {
        let lo = hi * ratio;
        let c = gauss16(f, lo, hi);
        sum += c;
        incs.push(c);
        hi = lo;
        if incs.len() >= 8 && incs.iter().all(|c| c.abs() <= abs_floor) {
            return Ok(Some(sum));
        }
        match assess_increments(&incs) {
            Tail::Converged { tail } => {
                if tail.abs() <= rel_tol * sum.abs().max(1e-300) {
                    return Ok(Some(sum + tail));
                }
            }
            Tail::Diverging => return Ok(None),
            Tail::Undecided => {}
        }
        if hi < 1e-280 {
            // below any meaningful scale; whatever is left cannot matter
            return Ok(Some(sum));
        }
    }
    Err(QuadError::Undecided { shells: max_shells })
}
