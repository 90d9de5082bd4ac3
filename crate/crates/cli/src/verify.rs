//! The verifier battery behind `fkwave verify`.

use fkwave_core::analysis::{
    check_slope_bound, integral_identity_averaged, linspace, normalize_to_sigma_plus, run_wave,
    supersolution_threshold, sweep_diagram, verify_supersolution, VelocityConfig,
};
use fkwave_core::evolution::{build_stencil, step};
use fkwave_core::{GridProfile, NonlinearitySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Options {
    pub velocity: VelocityConfig,
    pub epsilon: Option<f64>,
    pub super_m: Option<f64>,
    pub pairs: usize,
    pub seed: u64,
}

pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, detail }
}

fn from_result(name: &str, r: fkwave_core::Result<(bool, String)>) -> Check {
    match r {
        Ok((passed, detail)) => check(name, passed, detail),
        Err(e) => check(name, false, e.to_string()),
    }
}

/// σ at fraction `t` of `(σ⁻, σ⁺)`.
fn at_fraction(spec: &NonlinearitySpec, t: f64) -> fkwave_core::Result<f64> {
    let b = spec.sigma_bounds()?;
    Ok(b.sigma_minus + t * (b.sigma_plus - b.sigma_minus))
}

fn comparison(spec: &NonlinearitySpec, opts: &Options) -> fkwave_core::Result<(bool, String)> {
    let sigma = at_fraction(spec, 0.625)?;
    let pair = spec.equilibria(sigma)?;
    let m = pair.m_sigma;
    let grid = opts.velocity.evolution.grid;
    let stencil = build_stencil(spec, grid.h);
    let horizon = 10.0;
    let steps = (horizon / stencil.dt_max()).ceil() as usize;
    let dt = horizon / steps as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..opts.pairs {
        let center: f64 = rng.gen_range(-0.2..0.2) * grid.half_width;
        let width: f64 = rng.gen_range(0.2..3.0);
        let mut u = GridProfile::from_fn(&grid, m, m + 1.0, |z| m + 1.0 / (1.0 + (-(z - center) / width).exp()));
        for v in u.values.iter_mut() {
            *v += rng.gen_range(-0.3..0.3);
        }
        let mut w = u.clone();
        let lift: f64 = rng.gen_range(0.0..0.5);
        w.left_limit += lift * rng.gen_range(0.0..1.0);
        w.right_limit += lift;
        for v in w.values.iter_mut() {
            *v += rng.gen_range(0.0..0.5);
        }
        for _ in 0..steps {
            u = step(&u, spec, sigma, dt, &stencil)?;
            w = step(&w, spec, sigma, dt, &stencil)?;
        }
        let d = u.values.iter().zip(&w.values).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        worst = worst.max(d);
    }
    Ok((
        worst <= 1e-12,
        format!("{} pairs at sigma = {sigma:.4}, max (u - v) after T = {horizon}: {worst:.2e}", opts.pairs),
    ))
}

fn supersolution(spec: &NonlinearitySpec, opts: &Options) -> fkwave_core::Result<(bool, String)> {
    let norm = normalize_to_sigma_plus(spec)?;
    let m = opts.super_m.unwrap_or_else(|| supersolution_threshold(&norm));
    let eps = opts.epsilon.unwrap_or_else(|| 0.01f64.min(1.0 / m));
    let r = verify_supersolution(&norm, eps, opts.super_m)?;
    Ok((
        r.passed,
        format!(
            "epsilon = {:.3e}, M = {:.4e} (threshold {:.4e}), mu = {:.5}, grid min residual = {:.2e}",
            r.epsilon, r.m, r.m_threshold, r.mu_epsilon, r.grid_min_residual
        ),
    ))
}

fn integral(spec: &NonlinearitySpec, opts: &Options) -> Option<fkwave_core::Result<(bool, String)>> {
    let (coefficients, _) = spec.as_affine_local();
    if coefficients.iter().sum::<f64>().abs() > 1e-12 {
        return None;
    }
    let run = || {
        let sigma = at_fraction(spec, 0.9)?;
        let mut cfg = opts.velocity.clone();
        cfg.evolution.track_mass = true;
        let w = run_wave(spec, sigma, &cfg)?;
        let r = integral_identity_averaged(&w, spec)?;
        let tol = (0.02 * w.point.c.abs()).max(1e-6);
        Ok((r <= tol, format!("sigma = {sigma:.4}, c = {:.5}, residual {r:.2e} (tol {tol:.2e})", w.point.c)))
    };
    Some(run())
}

fn slope(spec: &NonlinearitySpec, opts: &Options) -> fkwave_core::Result<(bool, String)> {
    let lo = at_fraction(spec, 0.8)?;
    let hi = at_fraction(spec, 0.975)?;
    let d = sweep_diagram(spec, &linspace(lo, hi, 8), &opts.velocity)?;
    let r = check_slope_bound(&d);
    let note = if r.applicable { "" } else { ", fewer than 5 consecutive unpinned points" };
    Ok((
        d.failures() == 0 && r.violations() == 0,
        format!(
            "sigma in [{lo:.4}, {hi:.4}], K = {:.4}, {} checks, {} violations{note}",
            d.k_mono,
            r.checks.len(),
            r.violations()
        ),
    ))
}

fn reflection(spec: &NonlinearitySpec, opts: &Options) -> fkwave_core::Result<(bool, String)> {
    let sigma = at_fraction(spec, 0.9)?;
    let a = run_wave(spec, sigma, &opts.velocity)?.point;
    let b = run_wave(&spec.reflect(), -sigma, &opts.velocity)?.point;
    let defect = (a.c + b.c).abs();
    let tol = 5e-3 + 3.0 * (a.stderr + b.stderr);
    Ok((
        defect <= tol,
        format!("c({sigma:.4}) = {:.5}, reflected c({:.4}) = {:.5}, |sum| = {defect:.2e}", a.c, -sigma, b.c),
    ))
}

/// Axioms first; if any fails the dynamic checks are skipped.
pub fn run(spec: &NonlinearitySpec, opts: &Options) -> Vec<Check> {
    let mut out: Vec<Check> = spec
        .check_axioms()
        .into_iter()
        .map(|a| check(&format!("axiom {}", a.axiom), a.passed, a.detail))
        .collect();
    if out.iter().any(|c| !c.passed) {
        out.push(check("dynamic checks", false, "skipped: the spec violates an axiom".into()));
        return out;
    }
    out.push(from_result("comparison preservation", comparison(spec, opts)));
    out.push(from_result("supersolution certificate", supersolution(spec, opts)));
    match integral(spec, opts) {
        Some(r) => out.push(from_result("integral identity", r)),
        None => out.push(check("integral identity", true, "not applicable: affine part does not sum to zero".into())),
    }
    out.push(from_result("slope bound", slope(spec, opts)));
    out.push(from_result("reflection conjugacy", reflection(spec, opts)));
    out
}
