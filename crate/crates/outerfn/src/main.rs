//! Thin command-line front end over the library. Subcommands mirror the
//! library's main capabilities; all heavy lifting lives in the modules.
//!
//! Exit codes: 0 success, 2 configuration/validation failure, 3 accuracy
//! failure or divergence in a required quantity.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use outerfn::config::{self, ExperimentConfig};
use outerfn::diagnostics::{hscj_check, Diagnostics, GridSpec};
use outerfn::modulus::Modulus;
use outerfn::outer::{OuterError, OuterEvaluator};
use outerfn::report::{arcs_csv, outer_samples_csv, ClassificationRecord, ConditionRecord, OuterSample};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "outerfn", version, about = "Outer functions from boundary modulus data: construction, boundary phase, zero-set admissibility, and Lipschitz-class membership diagnostics")]
struct Cli {
    /// Flat key=value config file with [grid] and [tolerances] sections
    /// (defaults: circle_n=128 disk_layers=8 pair_depth=10 levels=3,
    /// quad_rel=1e-8 margin=1e-10 zero_threshold=1e-12 stability=1.1
    /// probe_fraction=0.125).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify or validate a modulus of continuity.
    Modulus(ModulusArgs),
    /// Evaluate the outer function over a point set and emit CSV.
    Outer(OuterArgs),
    /// Run the full membership-condition bundle and emit one JSON report.
    Check(CheckArgs),
    /// Build a boundary zero set, report its admissibility sum, emit arcs CSV.
    Carleson(CarlesonArgs),
}

#[derive(Args)]
struct ModulusArgs {
    /// Family: `power` or `logtype` (alternative to --table).
    #[arg(long)]
    family: Option<String>,
    /// Exponent for the power family.
    #[arg(long)]
    alpha: Option<f64>,
    /// CSV file with header `t,omega` for the table family.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Power for the doubling classification (default 2).
    #[arg(long, default_value_t = 2.0)]
    rho: f64,
    /// What to do with the modulus.
    #[arg(value_enum)]
    action: ModAction,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModAction {
    Classify,
    Validate,
}

#[derive(Args)]
struct OuterArgs {
    /// Boundary data: const:C | chord:ANGLE,EXP[;...][@SCALE] |
    /// hE:SET,MODULUS | table:PATH.
    #[arg(long = "h")]
    h: String,
    /// Point set: grid:interior:N | boundary:N | disk:N:J.
    #[arg(long)]
    points: String,
    /// Power ρ ≥ 1 applied to the outer function.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Boundary data (same grammar as `outer --h`).
    #[arg(long = "h")]
    h: String,
    /// Power ρ ≥ 1.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Membership modulus ω.
    #[arg(long)]
    omega: String,
    /// Regularity modulus ψ of h (defaults to ω).
    #[arg(long)]
    psi: Option<String>,
    /// Override the window size δ of the log-ratio condition.
    #[arg(long)]
    delta: Option<f64>,
    /// Override the number of nested grid levels (≥ 2).
    #[arg(long)]
    levels: Option<u32>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CarlesonArgs {
    /// Zero set: pm1 | points:A;B;... | cantor:RATIO:DEPTH | slowcantor:DEPTH.
    #[arg(long)]
    set: String,
    /// Modulus for the admissibility sum.
    #[arg(long)]
    omega: String,
    /// Write the arcs CSV here (JSON summary always goes to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.config.as_deref().map(ExperimentConfig::from_file).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.cmd {
        Cmd::Modulus(args) => cmd_modulus(&cfg, args),
        Cmd::Outer(args) => cmd_outer(&cfg, args),
        Cmd::Check(args) => cmd_check(&cfg, args),
        Cmd::Carleson(args) => cmd_carleson(&cfg, args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Accuracy(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Accuracy(_) => 3,
            CliError::Io(_) => 2,
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn build_modulus(args: &ModulusArgs) -> Result<Modulus, CliError> {
    if let Some(path) = &args.table {
        let text = std::fs::read_to_string(path)?;
        return Modulus::from_csv(&text).map_err(|e| CliError::Config(e.to_string()));
    }
    match args.family.as_deref() {
        Some("logtype") => Ok(Modulus::logtype()),
        Some("power") => {
            let alpha = args.alpha.ok_or(CliError::Config("power family needs --alpha".into()))?;
            Modulus::power(alpha).map_err(|e| CliError::Config(e.to_string()))
        }
        Some(other) => Err(CliError::Config(format!("unknown family `{other}`"))),
        None => Err(CliError::Config("need --family or --table".into())),
    }
}

fn cmd_modulus(_cfg: &ExperimentConfig, args: ModulusArgs) -> Result<ExitCode, CliError> {
    let m = build_modulus(&args)?;
    match args.action {
        ModAction::Validate => {
            let violations = m.validate();
            let doc = json!({
                "modulus": m.describe(),
                "valid": violations.is_empty(),
                "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            });
            emit(args.out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
            if violations.is_empty() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(2))
            }
        }
        ModAction::Classify => {
            let acc = |e: outerfn::modulus::ModulusError| CliError::Accuracy(e.to_string());
            let fast = m.fast_constant().map_err(acc)?;
            let slow = m.slow_constant().map_err(acc)?;
            let rho = m.rho_slow_eta(args.rho).map_err(acc)?;
            let doc = json!({
                "modulus": m.describe(),
                "fast": ClassificationRecord::from(&fast),
                "slow": ClassificationRecord::from(&slow),
                "rho_slow": { "rho": args.rho, "record": ClassificationRecord::from(&rho) },
            });
            emit(args.out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_outer(cfg: &ExperimentConfig, args: OuterArgs) -> Result<ExitCode, CliError> {
    let h = config::parse_boundary(&args.h, cfg.tol.zero_threshold).map_err(|e| CliError::Config(e.to_string()))?;
    let points = config::parse_points(&args.points).map_err(|e| CliError::Config(e.to_string()))?;
    let ev = OuterEvaluator::with_margin(h, cfg.tol.quad_rel, cfg.tol.margin)
        .map_err(|e| CliError::Accuracy(e.to_string()))?;
    let mut rows = Vec::new();
    for z in points.points() {
        rows.push(sample_point(&ev, z, args.rho)?);
    }
    emit(args.out.as_ref(), &outer_samples_csv(&rows))?;
    Ok(ExitCode::SUCCESS)
}

fn sample_point(ev: &OuterEvaluator, z: Complex64, rho: f64) -> Result<OuterSample, CliError> {
    let interior = z.norm() < 1.0 - 1e-12;
    let gap = |err_flag| OuterSample {
        re_z: z.re,
        im_z: z.im,
        re_o: None,
        im_o: None,
        abs_o: None,
        u: None,
        v: None,
        err_flag,
    };
    match ev.value(z, rho) {
        Ok(o) => {
            let (u, v, flag) = if interior {
                (
                    ev.u(z).map_err(|e| CliError::Accuracy(e.to_string()))?,
                    ev.v_interior(z).map_err(|e| CliError::Accuracy(e.to_string()))?,
                    "",
                )
            } else if o == Complex64::new(0.0, 0.0) {
                // on the zero set: log h = -∞, no phase
                return Ok(OuterSample {
                    re_z: z.re,
                    im_z: z.im,
                    re_o: Some(0.0),
                    im_o: Some(0.0),
                    abs_o: Some(0.0),
                    u: None,
                    v: None,
                    err_flag: "zero",
                });
            } else {
                let th = z.arg();
                (ev.h().log_eval(th), ev.v_boundary(th).map_err(|e| CliError::Accuracy(e.to_string()))?, "")
            };
            Ok(OuterSample {
                re_z: z.re,
                im_z: z.im,
                re_o: Some(o.re),
                im_o: Some(o.im),
                abs_o: Some(o.norm()),
                u: Some(u),
                v: Some(v),
                err_flag: flag,
            })
        }
        Err(OuterError::Margin(..)) => Ok(gap("margin")),
        Err(OuterError::DivergentPhase(..)) => Ok(gap("divergent")),
        Err(e) => Err(CliError::Accuracy(e.to_string())),
    }
}

fn cmd_check(cfg: &ExperimentConfig, args: CheckArgs) -> Result<ExitCode, CliError> {
    let h = config::parse_boundary(&args.h, cfg.tol.zero_threshold).map_err(|e| CliError::Config(e.to_string()))?;
    let omega = config::parse_modulus(&args.omega).map_err(|e| CliError::Config(e.to_string()))?;
    let psi = match &args.psi {
        Some(s) => config::parse_modulus(s).map_err(|e| CliError::Config(e.to_string()))?,
        None => omega.clone(),
    };
    let mut grid: GridSpec = cfg.grid;
    if let Some(levels) = args.levels {
        if levels < 2 {
            return Err(CliError::Config("--levels must be ≥ 2".into()));
        }
        grid.levels = levels;
    }
    let ev = OuterEvaluator::with_margin(h, cfg.tol.quad_rel, cfg.tol.margin)
        .map_err(|e| CliError::Accuracy(e.to_string()))?;
    let diag = Diagnostics::new(&ev, &psi, &omega, args.rho);
    let acc = |e: outerfn::diagnostics::DiagnosticsError| CliError::Accuracy(e.to_string());

    let c1 = diag.condition1(&grid).map_err(acc)?;
    let c2 = diag.condition2(&grid).map_err(acc)?;
    let delta = args.delta.unwrap_or_else(|| diag.default_delta(c2.value.unwrap_or(1.0)));
    let c3 = diag.condition3(delta, &grid).map_err(acc)?;
    let c4 = diag.condition4(&grid).map_err(acc)?;
    let (p11, p12) = diag.prop_conditions(&grid, Some(&c4)).map_err(acc)?;
    let shirokov = diag.shirokov_criterion(&grid).map_err(acc)?;
    let reports = [&c1, &c2, &c3, &c4, &p11, &p12, &shirokov];

    let hscj = if (1.0..=2.0).contains(&args.rho) {
        let r = hscj_check(&ev, &psi, args.rho, &grid).map_err(acc)?;
        Some(json!({
            "rho": args.rho,
            "eta": ClassificationRecord::from(&r.eta),
            "dini_constant": r.dini.value,
            "tail_constant": r.tail.value,
            "c4_psi": ConditionRecord::from(&r.c4_psi),
            "gain_seminorm": r.gain_value,
            "gain_levels": r.gain_levels,
            "gain_stability": r.gain_stability,
        }))
    } else {
        None
    };

    let doc = json!({
        "h": ev.h().describe(),
        "rho": args.rho,
        "omega": omega.describe(),
        "psi": psi.describe(),
        "delta": delta,
        "stability_threshold": cfg.tol.stability,
        "reports": reports.iter().map(|r| ConditionRecord::from(*r)).collect::<Vec<_>>(),
        "finite_verdicts": reports
            .iter()
            .map(|r| json!({ "condition_id": r.condition_id.as_str(), "finite": r.finite_at(cfg.tol.stability) }))
            .collect::<Vec<_>>(),
        "hscj": hscj,
    });
    emit(args.out.as_ref(), &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_carleson(_cfg: &ExperimentConfig, args: CarlesonArgs) -> Result<ExitCode, CliError> {
    let set = config::parse_carleson_set(&args.set).map_err(|e| CliError::Config(e.to_string()))?;
    let omega = config::parse_modulus(&args.omega).map_err(|e| CliError::Config(e.to_string()))?;
    let sum = set.carleson_sum(&omega);
    if let Some(path) = &args.out {
        std::fs::write(path, arcs_csv(&set))?;
    }
    let doc = json!({
        "arcs": set.arcs().len(),
        "residual_measure": set.residual_measure(),
        "carleson_sum": sum.total,
        "partial_by_level": sum.partial_by_level,
        "omega": omega.describe(),
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(ExitCode::SUCCESS)
}
