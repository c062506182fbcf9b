//! Outer functions on the unit disk from boundary modulus data.
//!
//! Given a nonnegative continuous function h on the unit circle with a
//! log-integrable modulus, this crate builds the outer function
//! O_h = exp(u_h + i·v_h) — the harmonic extension of log h plus its
//! conjugate — and evaluates it on the closed disk, including the
//! principal-value boundary phase. On top of that sit desk-scale estimators
//! for the quantities that govern membership of O_h^ρ in weighted Lipschitz
//! classes Λ_ω: seminorms over circle and closed-disk pair grids, the
//! windowed log-ratio and windowed-maximum criteria, the nonlocal integral
//! a_h, and the phase-difference oscillation A_h. Closed boundary zero sets
//! are handled through their complementary arcs, with the Carleson-type sum
//! Σ |γ| log ω(|γ|) and the associated boundary function whose zero set they
//! are.
//!
//! Start with the `examples/` directory: each example is a runnable tour of
//! one capability (modulus classification, closed-form outer reproduction,
//! boundary phase, Carleson constructions, membership diagnostics, the
//! Hölder-gain phenomenon). A thin CLI (`outerfn`) exposes the same
//! operations for scripted runs.

pub mod boundary;
pub mod carleson;
pub mod config;
pub mod diagnostics;
pub mod modulus;
pub mod outer;
pub mod quad;
pub mod report;

pub use boundary::{BoundaryFunction, PairScheme, SeminormEstimate};
pub use carleson::CarlesonSet;
pub use diagnostics::{ConditionId, ConditionReport, GridSpec};
pub use modulus::{ClassKind, ClassificationResult, ClassifyConfig, Modulus};
pub use outer::OuterEvaluator;
