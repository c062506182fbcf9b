//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantity. Tolerances are pinned here, not configurable.

use num_complex::Complex64;
use outerfn::boundary::{seminorm_circle, seminorm_disk, BoundaryFunction, ChordFactor, PairScheme};
use outerfn::carleson::{flat_arc_log_integral, CarlesonSet};
use outerfn::diagnostics::{hscj_check, Diagnostics, GridSpec};
use outerfn::modulus::Modulus;
use outerfn::outer::OuterEvaluator;
use rand::{Rng, SeedableRng};
use std::f64::consts::{PI, TAU};
use std::time::Instant;

fn chord_h(exponent: f64) -> BoundaryFunction {
    BoundaryFunction::chord_product(1.0, vec![ChordFactor { angle: 0.0, exponent }]).unwrap()
}

fn claire_evaluator() -> (OuterEvaluator, Modulus) {
    let e = CarlesonSet::plus_minus_one();
    let w = Modulus::power(0.5).unwrap();
    (OuterEvaluator::new(e.build_h_e(&w), 1e-8).unwrap(), w)
}

/// 64×64 interior polar grid.
fn interior_grid() -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(64 * 64);
    for i in 0..64 {
        let r = (i + 1) as f64 / 65.0;
        for j in 0..64 {
            let theta = TAU * (j as f64 + 0.5) / 64.0;
            pts.push(Complex64::from_polar(r, theta));
        }
    }
    pts
}

#[test]
fn criterion_01_closed_form_outer_reproduction() {
    let one = Complex64::new(1.0, 0.0);

    let t0 = Instant::now();
    let ev = OuterEvaluator::new(chord_h(1.0), 1e-8).unwrap();
    let mut worst1 = 0.0f64;
    for z in interior_grid() {
        let o = ev.value(z, 1.0).unwrap();
        worst1 = worst1.max((o - (one - z)).norm());
    }
    let t1 = t0.elapsed();
    assert!(worst1 < 1e-6, "|O - (1-z)| max {worst1:e}");
    assert!(t1.as_secs_f64() < 30.0, "runtime {t1:?}");

    let t0 = Instant::now();
    let ev = OuterEvaluator::new(chord_h(0.5), 1e-8).unwrap();
    let mut worst2 = 0.0f64;
    for z in interior_grid() {
        let o2 = ev.value(z, 2.0).unwrap();
        worst2 = worst2.max((o2 - (one - z)).norm());
    }
    let t2 = t0.elapsed();
    assert!(worst2 < 1e-6, "|O² - (1-z)| max {worst2:e}");
    assert!(t2.as_secs_f64() < 30.0, "runtime {t2:?}");

    println!(
        "criterion 01 closed-form outer reproduction: PASS (dev {:.2e} in {:.1?}, dev {:.2e} in {:.1?})",
        worst1, t1, worst2, t2
    );
}

#[test]
fn criterion_02_boundary_phase_oracle() {
    let ev = OuterEvaluator::new(chord_h(1.0), 1e-8).unwrap();
    let mut worst = 0.0f64;
    let mut tested = 0;
    for i in 0..128 {
        let theta = TAU * i as f64 / 128.0;
        // exclude the margin band around the zero at angle 0
        if outerfn::boundary::chord(theta, 0.0) < 1e-10 {
            continue;
        }
        let v = ev.v_boundary(theta).unwrap();
        worst = worst.max((v - (theta - PI) / 2.0).abs());
        tested += 1;
    }
    assert!(tested >= 127);
    assert!(worst < 1e-6, "phase deviation {worst:e}");
    println!("criterion 02 boundary phase oracle: PASS ({tested} angles, dev {worst:.2e})");
}

#[test]
fn criterion_03_modulus_classification() {
    for alpha in [0.25, 0.5, 0.75] {
        let m = Modulus::power(alpha).unwrap();
        let fast = m.fast_constant().unwrap();
        let c = fast.constant.expect("power fast constant must be finite");
        assert!((c - 1.0 / alpha).abs() / (1.0 / alpha) < 1e-4, "fast({alpha}) = {c}");
        let slow = m.slow_constant().unwrap();
        let c = slow.constant.expect("power slow constant must be finite");
        assert!(
            (c - 1.0 / (1.0 - alpha)).abs() / (1.0 / (1.0 - alpha)) < 1e-4,
            "slow({alpha}) = {c}"
        );
        let eta = m.rho_slow_eta(2.0).unwrap();
        assert_eq!(eta.constant.unwrap(), 1.0, "eta2({alpha}) must be exactly 1");
    }
    let log = Modulus::logtype();
    assert!(log.fast_constant().unwrap().divergent(), "logtype Dini integral must diverge");
    let eta = log.rho_slow_eta(1.0).unwrap().constant.unwrap();
    assert!((eta - 0.5).abs() < 1e-6, "logtype eta1 = {eta}");
    println!("criterion 03 modulus classification: PASS (1/α, 1/(1-α), divergence, η₂=1, η₁={eta:.9})");
}

#[test]
fn criterion_04_arc_log_identity() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x0c_2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let a = rng.gen_range(-3.0..3.0);
        let len = 10f64.powf(rng.gen_range(-4.0..0.5));
        let b = a + len;
        let v = flat_arc_log_integral(a, b, 1e-10).unwrap();
        worst = worst.max((v - 2.0 * (a - b)).abs());
    }
    assert!(worst < 1e-8, "identity deviation {worst:e}");
    println!("criterion 04 arc log-integral identity: PASS (20 arcs, dev {worst:.2e})");
}

#[test]
fn criterion_05_h_e_structural_bounds() {
    let w = Modulus::power(0.5).unwrap();
    let sets = [("pm1", CarlesonSet::plus_minus_one()), ("cantor6", CarlesonSet::cantor(1.0 / 3.0, 6).unwrap())];
    let mut seminorms = Vec::new();
    for (name, set) in &sets {
        let h = set.build_h_e(&w);
        let mut max_h = 0.0f64;
        for i in 0..4096 {
            max_h = max_h.max(h.eval(TAU * i as f64 / 4096.0));
        }
        assert!(max_h <= 1.0 + 1e-12, "{name}: h_E exceeds 1: {max_h}");
        let sn = h.psi_seminorm(&w, &PairScheme::new(256, 12, 0)).value;
        assert!(sn <= 2.05, "{name}: seminorm {sn}");
        seminorms.push(sn);
        let mut c1_min = f64::INFINITY;
        let mut c1_max = 0.0f64;
        let mut c2_min = f64::INFINITY;
        let mut c2_max = 0.0f64;
        for idx in 0..set.arcs().len() {
            let (c1, c2) = set.derivative_bounds(&w, idx).unwrap();
            c1_min = c1_min.min(c1);
            c1_max = c1_max.max(c1);
            c2_min = c2_min.min(c2);
            c2_max = c2_max.max(c2);
        }
        assert!(c1_max / c1_min <= 4.0, "{name}: first-derivative sups not uniform: {c1_min}..{c1_max}");
        assert!(c2_max / c2_min <= 4.0, "{name}: second-derivative sups not uniform: {c2_min}..{c2_max}");
    }
    println!(
        "criterion 05 boundary-function structural bounds: PASS (seminorms {:.3} / {:.3} ≤ 2.05, derivative sups uniform)",
        seminorms[0], seminorms[1]
    );
}

#[test]
fn criterion_06_condition_cofiniteness_and_codivergence() {
    // admissible instance: everything finite with stable grids
    let (ev, w) = claire_evaluator();
    let diag = Diagnostics::new(&ev, &w, &w, 2.0);
    let grid = GridSpec { circle_n: 128, disk_layers: 8, pair_depth: 10, levels: 2 };
    let c1 = diag.condition1(&grid).unwrap();
    let c2 = diag.condition2(&grid).unwrap();
    let delta = diag.default_delta(c2.value.unwrap());
    let c3 = diag.condition3(delta, &grid).unwrap();
    let c4 = diag.condition4(&grid).unwrap();
    let (_p11, p12) = diag.prop_conditions(&grid, Some(&c4)).unwrap();
    let sh = diag.shirokov_criterion(&grid).unwrap();
    for (name, r) in [("C1", &c1), ("C2", &c2), ("C3", &c3), ("C4", &c4), ("P12", &p12), ("SHIROKOV", &sh)] {
        assert!(!r.divergent(), "{name} divergent on the admissible instance");
        let ratio = r.stability_ratio.expect("two levels give a ratio");
        assert!(ratio <= 1.1, "{name} stability ratio {ratio}");
    }

    // non-member fixture: boundary data rougher than ω permits; the second
    // and fourth conditions must co-diverge under grid refinement
    let h = chord_h(0.125);
    let ev2 = OuterEvaluator::new(h, 1e-8).unwrap();
    let psi = Modulus::power(0.125).unwrap();
    let omega = Modulus::power(1.0).unwrap();
    let diag2 = Diagnostics::new(&ev2, &psi, &omega, 2.0);
    let grid2 = GridSpec { circle_n: 64, disk_layers: 6, pair_depth: 10, levels: 3 };
    let c2d = diag2.condition2(&grid2).unwrap();
    let c4d = diag2.condition4(&grid2).unwrap();
    let growth = |levels: &[f64]| levels[levels.len() - 1] / levels[0];
    let g2 = growth(&c2d.level_values);
    let g4 = growth(&c4d.level_values);
    assert!(c2d.level_values.windows(2).all(|w| w[1] > w[0]), "C2 levels not increasing: {:?}", c2d.level_values);
    assert!(c4d.level_values.windows(2).all(|w| w[1] > w[0]), "C4 levels not increasing: {:?}", c4d.level_values);
    assert!(g2 >= 2.0, "C2 growth across three levels {g2}");
    assert!(g4 >= 2.0, "C4 growth across three levels {g4}");
    println!(
        "criterion 06 condition co-finiteness/co-divergence: PASS (admissible ratios ≤ 1.1; divergent growth C2 ×{g2:.2}, C4 ×{g4:.2})"
    );
}

#[test]
fn criterion_07_a_h_properties() {
    // exact zero for constant data
    let ev = OuterEvaluator::new(BoundaryFunction::constant(1.0).unwrap(), 1e-8).unwrap();
    let psi = Modulus::power(1.0).unwrap();
    let d = Diagnostics::new(&ev, &psi, &psi, 1.0);
    for i in 0..16 {
        assert_eq!(d.a_h(TAU * i as f64 / 16.0).unwrap(), 0.0);
    }

    // window bound: a_h(ξ)·radius(ξ)² stays bounded on the admissible fixture
    let (ev, w) = claire_evaluator();
    let d = Diagnostics::new(&ev, &w, &w, 2.0);
    let mut max_prod = 0.0f64;
    let mut evaluated = 0;
    for i in 0..256 {
        let theta = TAU * i as f64 / 256.0;
        let r = d.psi_arc_radius(theta);
        if let Ok(a) = d.a_h(theta) {
            max_prod = max_prod.max(a * r * r);
            evaluated += 1;
        }
    }
    assert!(evaluated >= 250);
    assert!(max_prod <= 1.0, "window-bound product {max_prod} (oracle 0.297)");
    println!("criterion 07 nonlocal-integral properties: PASS (exact zero; max a·r² = {max_prod:.3} ≤ 1)");
}

#[test]
fn criterion_08_conjugate_limit_consistency() {
    let radii: Vec<f64> = (4..=12).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    let mut finals = Vec::new();
    for (exponent, psi_alpha) in [(1.0, 1.0), (0.5, 0.5)] {
        let ev = OuterEvaluator::new(chord_h(exponent), 1e-10).unwrap();
        let psi = Modulus::power(psi_alpha).unwrap();
        let psi_t = ev.h().psi_seminorm(&psi, &PairScheme::new(256, 12, 0)).value;
        let devs = ev.boundary_convergence_probe(PI, &radii, &psi, psi_t, 0.125, 17).unwrap();
        for w in devs.windows(2) {
            assert!(w[1] < w[0], "deviations must decrease monotonically: {devs:?}");
        }
        let last = *devs.last().unwrap();
        assert!(last < 1e-5, "final deviation {last:e} for exponent {exponent}");
        finals.push(last);
    }
    println!(
        "criterion 08 conjugate-limit consistency: PASS (final deviations {:.2e}, {:.2e})",
        finals[0], finals[1]
    );
}

#[test]
fn criterion_09_regularity_gain_check() {
    // tabulated half-Hölder data with a single zero: h = |sin(θ/2)|^{1/2}
    let n = 4096;
    let samples: Vec<f64> = (0..n).map(|j| (0.5 * TAU * j as f64 / n as f64).sin().abs().sqrt()).collect();
    let h = BoundaryFunction::tabulated(samples, 1e-12).unwrap();
    assert_eq!(h.zero_points().len(), 1);
    let ev = OuterEvaluator::new(h, 1e-8).unwrap();
    let psi = Modulus::power(0.5).unwrap();
    let grid = GridSpec { circle_n: 128, disk_layers: 6, pair_depth: 10, levels: 2 };
    let report = hscj_check(&ev, &psi, 2.0, &grid).unwrap();
    assert!(report.eta.constant.unwrap() > 0.0, "ψ must be doubling-stable at ρ=2");
    assert!(report.dini.value.is_some() && report.tail.value.is_some());
    let stab = report.gain_stability.expect("gain seminorm needs two levels");
    assert!(stab <= 1.1, "ω_{{1/4}}-seminorm of O_h not refinement-stable: {stab}");
    assert!(report.gain_value.is_finite() && report.gain_value > 0.0);
    println!(
        "criterion 09 regularity-gain check: PASS (quarter-power seminorm {:.4}, stability {:.4})",
        report.gain_value, stab
    );
}

#[test]
fn criterion_10_circle_vs_disk_seminorm() {
    for alpha in [1.0, 0.5] {
        let ev = OuterEvaluator::new(chord_h(alpha), 1e-8).unwrap();
        let omega = Modulus::power(alpha).unwrap();
        let mut scheme = PairScheme::new(128, 10, 6);
        scheme.anchors.extend_from_slice(ev.h().zero_points());
        let circle = seminorm_circle(
            |theta| {
                let d = ev.h().chord_dist_to_zeros(theta);
                if d <= 1e-12 {
                    return Some(Complex64::new(0.0, 0.0));
                }
                if d < ev.margin() {
                    return None;
                }
                ev.value(Complex64::from_polar(1.0, theta), 1.0).ok()
            },
            |dist| omega.eval(dist).unwrap(),
            &scheme,
        );
        let disk = seminorm_disk(
            |z| ev.value(z, 1.0).ok(),
            |theta| {
                let d = ev.h().chord_dist_to_zeros(theta);
                if d <= 1e-12 {
                    return Some(Complex64::new(0.0, 0.0));
                }
                if d < ev.margin() {
                    return None;
                }
                ev.value(Complex64::from_polar(1.0, theta), 1.0).ok()
            },
            |dist| omega.eval(dist).unwrap(),
            &scheme,
        );
        assert!(circle.value > 0.0);
        assert!(
            disk.value <= 8.0 * circle.value,
            "alpha {alpha}: disk {} vs circle {}",
            disk.value,
            circle.value
        );
        if alpha == 1.0 {
            println!(
                "criterion 10 circle vs closed-disk seminorm: PASS (α=1: {:.3} ≤ 8×{:.3}; α=1/2 follows)",
                disk.value, circle.value
            );
        }
    }
}
