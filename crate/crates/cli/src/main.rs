//! `fkwave`: velocity diagrams, single fronts, hull inversion and the
//! verifier battery for bistable lattice equations.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod svg;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fkwave_core::analysis::{critical_velocities, linspace, run_wave, sweep_diagram, InitialShape, VelocityConfig};
use fkwave_core::export;
use fkwave_core::hull::{branch_probe, solve_hull, HullConfig};
use fkwave_core::specfile::{load_spec, load_spec_unchecked};
use fkwave_core::{Error, EvolutionConfig, GridParams, NonlinearitySpec};

const EXIT_VERIFY: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "fkwave", version, about = "Traveling fronts and velocity diagrams for bistable lattice equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    /// Frenkel-Kontorova chain with this pinning strength.
    #[arg(long, global = true, conflicts_with = "spec")]
    fk_beta: Option<f64>,
    /// TOML spec file.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, env = "FKWAVE_OUT", default_value = ".")]
    out: PathBuf,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 12)]
    seed: u64,
    #[command(flatten)]
    numerics: Numerics,
}

#[derive(Args, Debug, Clone, Default)]
struct Numerics {
    /// Grid spacing.
    #[arg(long, global = true)]
    h: Option<f64>,
    /// Time step (default: the monotonicity bound).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Evolution horizon.
    #[arg(long = "t-end", global = true)]
    t_end: Option<f64>,
    /// Grid extent on each side of 0.
    #[arg(long, global = true)]
    half_width: Option<f64>,
    /// Trailing fraction of the trace used for the velocity fit.
    #[arg(long, global = true)]
    window: Option<f64>,
    /// Samples per period for the hull solver.
    #[arg(long = "hull-m", global = true)]
    hull_m: Option<usize>,
    #[arg(long = "hull-dt", global = true)]
    hull_dt: Option<f64>,
    #[arg(long = "max-time", global = true)]
    max_time: Option<f64>,
    #[arg(long = "tol-lambda", global = true)]
    tol_lambda: Option<f64>,
    #[arg(long = "tol-sigma", global = true)]
    tol_sigma: Option<f64>,
    #[arg(long = "tol-match", global = true)]
    tol_match: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep c(σ) and write diagram.csv and diagram.svg.
    Diagram {
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Left end of the σ grid (default: σ⁻ plus the margin).
        #[arg(long, allow_negative_numbers = true)]
        lo: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        hi: Option<f64>,
        /// Distance of the default grid ends from σ±, as a fraction of σ⁺ − σ⁻.
        #[arg(long, default_value_t = 0.025)]
        margin: f64,
        /// Skip the critical-velocity refinement.
        #[arg(long)]
        no_critical: bool,
    },
    /// One front: writes profile.csv and trace.csv.
    Wave {
        #[arg(long, allow_negative_numbers = true)]
        sigma: f64,
        /// Expected velocity; the difference is reported.
        #[arg(long, allow_negative_numbers = true)]
        c: Option<f64>,
        #[arg(long, value_enum, default_value_t = Initial::Logistic)]
        initial: Initial,
    },
    /// Hull rotation speeds λ_p(σ): writes hull.csv.
    Hull {
        #[arg(long, value_parser = parse_list, default_value = "0.5")]
        p: List,
        #[arg(long, value_parser = parse_list, allow_hyphen_values = true)]
        sigma: List,
    },
    /// σ(c, p) along decreasing p: writes branch.csv.
    Branch {
        /// `auto` (the c⁺ estimate), `auto+x`, `auto-x` or a number.
        #[arg(long, allow_negative_numbers = true)]
        c: String,
        #[arg(long, value_parser = parse_list)]
        p: List,
    },
    /// Runs the verifier battery; exit 1 if any check fails.
    Verify {
        /// Supersolution scale (default: min(0.01, 1/M)).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Replaces the supersolution threshold M.
        #[arg(long = "super-m")]
        super_m: Option<f64>,
        /// Ordered pairs for the comparison check.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Initial {
    Logistic,
    Ramp,
}

/// Comma-separated numbers.
#[derive(Clone, Debug, PartialEq)]
struct List(Vec<f64>);

fn parse_list(s: &str) -> Result<List, String> {
    let out: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match out {
        Ok(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(List(v)),
        _ => Err(format!("expected a comma-separated list of numbers, got {s:?}")),
    }
}

impl Numerics {
    fn velocity(&self) -> anyhow::Result<VelocityConfig> {
        let d = VelocityConfig::default();
        let grid = GridParams {
            h: self.h.unwrap_or(d.evolution.grid.h),
            half_width: self.half_width.unwrap_or(d.evolution.grid.half_width),
        };
        grid.validate()?;
        let window = self.window.unwrap_or(d.window_fraction);
        if !(window > 0.0 && window <= 1.0) {
            bail!(Error::Input(format!("--window must lie in (0, 1], got {window}")));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                bail!(Error::Input(format!("--dt must be positive, got {dt}")));
            }
        }
        Ok(VelocityConfig {
            evolution: EvolutionConfig {
                grid,
                dt: self.dt,
                t_end: self.t_end.unwrap_or(d.evolution.t_end),
                ..d.evolution.clone()
            },
            window_fraction: window,
            ..d
        })
    }

    fn hull(&self) -> anyhow::Result<HullConfig> {
        let d = HullConfig::default();
        let cfg = HullConfig {
            m: self.hull_m.unwrap_or(d.m),
            dt: self.hull_dt,
            max_time: self.max_time.unwrap_or(d.max_time),
            tol_lambda: self.tol_lambda.unwrap_or(d.tol_lambda),
            tol_sigma: self.tol_sigma.unwrap_or(d.tol_sigma),
            tol_match: self.tol_match.unwrap_or(d.tol_match),
            ..d
        };
        let positive = [cfg.max_time, cfg.tol_lambda, cfg.tol_sigma, cfg.tol_match];
        if cfg.m < 4 || positive.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            bail!(Error::Input("hull settings must be positive (and --hull-m at least 4)".into()));
        }
        Ok(cfg)
    }
}

impl Common {
    fn spec(&self) -> anyhow::Result<NonlinearitySpec> {
        match (&self.spec, self.fk_beta) {
            (Some(path), _) => Ok(load_spec(path)?),
            (None, Some(beta)) => Ok(NonlinearitySpec::frenkel_kontorova(beta)?),
            (None, None) => bail!(Error::Input("give --fk-beta or --spec".into())),
        }
    }

    fn out_file(&self, name: &str) -> anyhow::Result<PathBuf> {
        std::fs::create_dir_all(&self.out)
            .with_context(|| format!("creating output directory {}", self.out.display()))?;
        Ok(self.out.join(name))
    }
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    export::write_file(path, text).with_context(|| format!("writing {}", path.display()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Numeric { .. } | Error::Estimation(_) | Error::DomainExhausted { .. }) => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

fn cmd_diagram(
    common: &Common,
    points: usize,
    lo: Option<f64>,
    hi: Option<f64>,
    margin: f64,
    no_critical: bool,
) -> anyhow::Result<u8> {
    let spec = common.spec()?;
    let cfg = common.numerics.velocity()?;
    let b = spec.sigma_bounds()?;
    if points < 2 {
        bail!(Error::Input(format!("--points must be at least 2, got {points}")));
    }
    if !(margin > 0.0 && margin < 0.5) {
        bail!(Error::Input(format!("--margin must lie in (0, 0.5), got {margin}")));
    }
    let m = margin * (b.sigma_plus - b.sigma_minus);
    let lo = lo.unwrap_or(b.sigma_minus + m);
    let hi = hi.unwrap_or(b.sigma_plus - m);
    if !(lo < hi) {
        bail!(Error::Input(format!("empty sweep interval [{lo}, {hi}]")));
    }
    let mut diagram = sweep_diagram(&spec, &linspace(lo, hi, points), &cfg)?;
    if !no_critical {
        diagram.critical = Some(critical_velocities(&spec, &cfg)?);
    }
    for p in diagram.points.iter().filter(|p| !p.ok()) {
        eprintln!("warning: sigma = {}: {}", p.sigma, p.failure.as_deref().unwrap_or(""));
    }
    let csv = common.out_file("diagram.csv")?;
    write(&csv, &export::diagram_csv(&diagram))?;
    let plot = common.out_file("diagram.svg")?;
    write(&plot, &svg::diagram_svg(&diagram, (b.sigma_minus, b.sigma_plus)))?;

    println!("sigma- = {}, sigma+ = {}", b.sigma_minus, b.sigma_plus);
    println!("{} points, {} failed", diagram.points.len(), diagram.failures());
    match diagram.plateau {
        Some((a, z)) => println!("plateau [{a}, {z}]"),
        None => println!("no pinned points"),
    }
    if let Some(cr) = &diagram.critical {
        println!(
            "c+ = {} in [{}, {}]{}",
            cr.c_plus.last,
            cr.c_plus.bracket.0,
            cr.c_plus.bracket.1,
            if cr.c_plus.monotone { "" } else { " (refinement not monotone)" }
        );
        println!(
            "c- = {} in [{}, {}]{}",
            cr.c_minus.last,
            cr.c_minus.bracket.0,
            cr.c_minus.bracket.1,
            if cr.c_minus.monotone { "" } else { " (refinement not monotone)" }
        );
    }
    println!("wrote {} and {}", csv.display(), plot.display());
    Ok(0)
}

fn cmd_wave(common: &Common, sigma: f64, hint: Option<f64>, initial: Initial) -> anyhow::Result<u8> {
    let spec = common.spec()?;
    let mut cfg = common.numerics.velocity()?;
    cfg.initial = match initial {
        Initial::Logistic => InitialShape::Logistic,
        Initial::Ramp => InitialShape::Ramp,
    };
    let run = run_wave(&spec, sigma, &cfg)?;
    let profile = common.out_file("profile.csv")?;
    write(&profile, &export::profile_csv(&run.profile))?;
    let trace = common.out_file("trace.csv")?;
    write(&trace, &export::trace_csv(&run.trace))?;
    println!("sigma = {sigma}");
    println!("c = {}", run.point.c);
    println!("stderr = {}", run.point.stderr);
    println!("pinned = {}", run.point.pinned);
    if let Some(c) = hint {
        println!("|c - hint| = {}", (run.point.c - c).abs());
    }
    println!("wrote {} and {}", profile.display(), trace.display());
    Ok(0)
}

fn cmd_hull(common: &Common, ps: &[f64], sigmas: &[f64]) -> anyhow::Result<u8> {
    let spec = common.spec()?;
    let cfg = common.numerics.hull()?;
    let mut results = Vec::new();
    for &p in ps {
        for &s in sigmas {
            results.push(solve_hull(&spec, p, s, &cfg)?);
        }
    }
    let path = common.out_file("hull.csv")?;
    write(&path, &export::hull_csv(&results))?;
    for r in &results {
        println!(
            "p = {}, sigma = {}: lambda_p = {:.8} (converged = {})",
            r.p, r.sigma, r.lambda_p, r.converged
        );
    }
    println!("wrote {}", path.display());
    Ok(if results.iter().all(|r| r.converged) { 0 } else { EXIT_NUMERIC })
}

/// `auto`, `auto+x`, `auto-x` or a plain number.
fn parse_c(text: &str) -> anyhow::Result<(bool, f64)> {
    let t = text.trim();
    let bad = || Error::Input(format!("--c expects auto, auto+x, auto-x or a number, got {text:?}"));
    if let Some(rest) = t.strip_prefix("auto") {
        let extra = match rest.chars().next() {
            None => 0.0,
            Some('+') => rest[1..].parse::<f64>().map_err(|_| bad())?,
            Some('-') => -rest[1..].parse::<f64>().map_err(|_| bad())?,
            Some(_) => return Err(bad().into()),
        };
        return Ok((true, extra));
    }
    let c = t.parse::<f64>().map_err(|_| bad())?;
    if !c.is_finite() {
        return Err(bad().into());
    }
    Ok((false, c))
}

fn cmd_branch(common: &Common, c_text: &str, ps: &[f64]) -> anyhow::Result<u8> {
    let spec = common.spec()?;
    let hull = common.numerics.hull()?;
    let c = match parse_c(c_text)? {
        (true, extra) => {
            let cr = critical_velocities(&spec, &common.numerics.velocity()?)?;
            println!("c+ estimate = {}", cr.c_plus.last);
            cr.c_plus.last + extra
        }
        (false, c) => c,
    };
    let rows = branch_probe(&spec, c, ps, &hull)?;
    let path = common.out_file("branch.csv")?;
    write(&path, &export::branch_csv(&rows))?;
    println!("c = {c}");
    for r in &rows {
        println!(
            "p = {}: sigma in [{}, {}], |sigma - sigma+| = {}",
            r.p, r.sigma_lo, r.sigma_hi, r.gap
        );
    }
    println!("wrote {}", path.display());
    Ok(if rows.iter().all(|r| r.all_converged) { 0 } else { EXIT_NUMERIC })
}

fn cmd_verify(common: &Common, epsilon: Option<f64>, super_m: Option<f64>, pairs: usize) -> anyhow::Result<u8> {
    // Axiom failures are part of the report, so the spec is loaded unchecked.
    let spec = match (&common.spec, common.fk_beta) {
        (Some(path), _) => load_spec_unchecked(path)?,
        _ => common.spec()?,
    };
    let opts = verify::Options {
        velocity: common.numerics.velocity()?,
        epsilon,
        super_m,
        pairs,
        seed: common.seed,
    };
    let checks = verify::run(&spec, &opts);
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
}

fn run(cli: &Cli) -> anyhow::Result<u8> {
    if let Some(n) = cli.common.jobs {
        if n == 0 {
            bail!(Error::Input("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let common = &cli.common;
    match &cli.command {
        Command::Diagram { points, lo, hi, margin, no_critical } => {
            cmd_diagram(common, *points, *lo, *hi, *margin, *no_critical)
        }
        Command::Wave { sigma, c, initial } => cmd_wave(common, *sigma, *c, *initial),
        Command::Hull { p, sigma } => cmd_hull(common, &p.0, &sigma.0),
        Command::Branch { c, p } => cmd_branch(common, c, &p.0),
        Command::Verify { epsilon, super_m, pairs } => cmd_verify(common, *epsilon, *super_m, *pairs),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
