//! Effective drift of the hull function and its inversion.
//!
//! For spatial frequency `p > 0` the hull `h_p(z) = z + ψ(z)`, `ψ` 1-periodic,
//! satisfies `λ_p h_p'(z) = F((h_p(z + p r_i))_i) + σ`. `λ_p(σ)` is measured as
//! the mean drift of the periodic relaxation `v_t = F((v(· + p r_i))_i) + σ`
//! started from `v(z) = z`, which shares the comparison structure of the wave
//! evolution and converges in pinned regimes too.

use std::cell::RefCell;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{build_stencil_scaled, ShiftStencil};
use crate::nonlinearity::NonlinearitySpec;
use crate::numeric::fit_line;

#[derive(Debug, Clone, PartialEq)]
pub struct HullConfig {
    /// Samples per period.
    pub m: usize,
    /// `None` uses the monotonicity bound of the `p`-scaled stencil.
    pub dt: Option<f64>,
    /// Length of the first run; later runs double it.
    pub t_chunk: f64,
    pub max_time: f64,
    pub tol_lambda: f64,
    /// Bracket width at which inversion stops.
    pub tol_sigma: f64,
    /// `|λ_p − cp|` below which a sample counts as on target.
    pub tol_match: f64,
}

impl Default for HullConfig {
    fn default() -> Self {
        HullConfig {
            m: 256,
            dt: None,
            t_chunk: 20.0,
            max_time: 5000.0,
            tol_lambda: 1e-4,
            tol_sigma: 1e-3,
            tol_match: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullState {
    pub p: f64,
    pub sigma: f64,
    /// Zero-mean periodic part on `z_j = j / m`.
    pub psi: Vec<f64>,
    pub m: usize,
}

impl HullState {
    pub fn amplitude(&self) -> f64 {
        let lo = self.psi.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.psi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo
    }

    /// `z + ψ(z)` non-decreasing on the grid and across the seam.
    pub fn is_monotone(&self, tol: f64) -> bool {
        let m = self.m;
        let h = 1.0 / m as f64;
        (0..m).all(|j| {
            let next = if j + 1 == m { 1.0 + self.psi[0] } else { (j + 1) as f64 * h + self.psi[j + 1] };
            next >= j as f64 * h + self.psi[j] - tol
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullResult {
    pub p: f64,
    pub sigma: f64,
    pub lambda_p: f64,
    /// RMS residual of the drift fit over the last window.
    pub fit_residual: f64,
    pub converged: bool,
    pub t_final: f64,
    pub state: HullState,
}

fn wrapped_fill(padded: &mut Vec<f64>, v: &[f64], pad: usize) {
    let m = v.len() as isize;
    padded.clear();
    padded.extend((0..v.len() + 2 * pad).map(|i| {
        let q = i as isize - pad as isize;
        v[q.rem_euclid(m) as usize] + q.div_euclid(m) as f64
    }));
}

fn validate_inputs(p: f64, config: &HullConfig) -> Result<()> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Input(format!("p must be positive, got {p}")));
    }
    if config.m < 64 {
        return Err(Error::Config(format!("hull grid needs m >= 64, got {}", config.m)));
    }
    if !(config.t_chunk > 0.0 && config.max_time >= config.t_chunk) {
        return Err(Error::Config("hull horizon must satisfy 0 < t_chunk <= max_time".into()));
    }
    Ok(())
}

fn hull_stencil(spec: &NonlinearitySpec, p: f64, config: &HullConfig) -> Result<(ShiftStencil, f64)> {
    let stencil = build_stencil_scaled(spec, 1.0 / config.m as f64, p);
    let limit = stencil.dt_max();
    let dt = config.dt.unwrap_or(limit);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Config(format!("dt = {dt} violates the monotonicity bound dt <= {limit}")));
    }
    if stencil.pad() > config.m * 64 {
        return Err(Error::Config(format!("p = {p} too large for the hull grid")));
    }
    Ok((stencil, dt))
}

fn slope_over(samples: &[(f64, f64)], t_from: f64) -> Option<(f64, f64)> {
    let start = samples.partition_point(|s| s.0 < t_from);
    let w = &samples[start..];
    let ts: Vec<f64> = w.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = w.iter().map(|s| s.1).collect();
    fit_line(&ts, &ys).map(|f| (f.slope, f.rms_residual))
}

/// Mean drift `λ_p(σ)` of the periodic relaxation. Runs of length
/// `t_chunk · 2^k` are fitted over their trailing half until two successive
/// estimates agree within `tol_lambda`; otherwise `converged = false`.
pub fn solve_hull(spec: &NonlinearitySpec, p: f64, sigma: f64, config: &HullConfig) -> Result<HullResult> {
    validate_inputs(p, config)?;
    let (stencil, dt) = hull_stencil(spec, p, config)?;
    let m = config.m;
    let h = 1.0 / m as f64;
    let pad = stencil.pad();
    let mut v: Vec<f64> = (0..m).map(|j| j as f64 * h).collect();
    let mut padded = Vec::with_capacity(m + 2 * pad);
    let mut offset = 0.0f64;
    let first_steps = (config.t_chunk / dt).ceil().max(1.0) as usize;
    let every = (first_steps / 200).max(1);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;

    let mut samples = vec![(0.0, mean(&v))];
    let mut step_count = 0usize;
    let mut horizon = config.t_chunk;
    let mut previous: Option<f64> = None;
    let (lambda, residual, converged) = loop {
        let target_steps = (horizon / dt).ceil() as usize;
        while step_count < target_steps {
            wrapped_fill(&mut padded, &v, pad);
            stencil.apply_padded(spec, sigma, dt, &padded, &mut v);
            step_count += 1;
            if step_count.is_multiple_of(every) {
                let mu = mean(&v);
                if mu.abs() > 1.0 {
                    let k = mu.floor();
                    v.iter_mut().for_each(|x| *x -= k);
                    offset += k;
                }
                samples.push((step_count as f64 * dt, mean(&v) + offset));
            }
        }
        let (slope, res) = slope_over(&samples, 0.5 * horizon)
            .ok_or_else(|| Error::Estimation("too few hull drift samples".into()))?;
        if previous.is_some_and(|prev| (slope - prev).abs() < config.tol_lambda) {
            break (slope, res, true);
        }
        previous = Some(slope);
        if 2.0 * horizon > config.max_time * (1.0 + 1e-12) {
            break (slope, res, false);
        }
        horizon *= 2.0;
    };
    let mut psi: Vec<f64> = v.iter().enumerate().map(|(j, x)| x - j as f64 * h).collect();
    let mu = mean(&psi);
    psi.iter_mut().for_each(|x| *x -= mu);
    Ok(HullResult {
        p,
        sigma,
        lambda_p: lambda,
        fit_residual: residual,
        converged,
        t_final: step_count as f64 * dt,
        state: HullState { p, sigma, psi, m },
    })
}

/// `K (1 + p)` with `K` the bound on `|F|`.
pub fn drift_bound(spec: &NonlinearitySpec, p: f64) -> f64 {
    spec.lipschitz_data().f_sup * (1.0 + p)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullInversion {
    pub p: f64,
    pub c: f64,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    /// The bracket is wider than `2 tol_sigma`, i.e. `λ_p ≈ cp` on an interval.
    pub plateau: bool,
    pub all_converged: bool,
    pub evaluations: usize,
}

impl HullInversion {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.sigma_lo + self.sigma_hi)
    }
}

struct Memo<'a> {
    spec: &'a NonlinearitySpec,
    p: f64,
    config: &'a HullConfig,
    seen: RefCell<Vec<(f64, f64, bool)>>,
}

impl Memo<'_> {
    fn lambda(&self, sigma: f64) -> Result<f64> {
        if let Some(&(_, l, _)) = self.seen.borrow().iter().find(|e| e.0 == sigma) {
            return Ok(l);
        }
        let r = solve_hull(self.spec, self.p, sigma, self.config)?;
        self.seen.borrow_mut().push((sigma, r.lambda_p, r.converged));
        Ok(r.lambda_p)
    }

    /// Boundary of the monotone predicate `pred(λ_p(σ))`, false below and
    /// true above, starting from the tightest bracket among cached samples.
    fn edge(&self, pred: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
        for &(s, l, _) in self.seen.borrow().iter() {
            if pred(l) {
                if s < hi && s > lo {
                    hi = s;
                }
            } else if s > lo && s < hi {
                lo = s;
            }
        }
        while hi - lo > self.config.tol_sigma {
            let mid = 0.5 * (lo + hi);
            if pred(self.lambda(mid)?) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo, hi))
    }
}

/// Bracket of `{σ : λ_p(σ) = cp}` by bisection on the non-decreasing map
/// `σ ↦ λ_p(σ)`. The initial bracket `cp ∓ (K(1+p) + 1)` follows from
/// `|λ_p − σ| ≤ K(1+p)`.
pub fn invert_hull(spec: &NonlinearitySpec, p: f64, c: f64, config: &HullConfig) -> Result<HullInversion> {
    validate_inputs(p, config)?;
    if !c.is_finite() {
        return Err(Error::Input(format!("velocity must be finite, got {c}")));
    }
    let target = c * p;
    let memo = Memo { spec, p, config, seen: RefCell::new(Vec::new()) };
    let reach = drift_bound(spec, p) + 1.0;
    let (mut lo, mut hi) = (target - reach, target + reach);
    let tol = config.tol_match;
    let mut expansions = 0;
    while memo.lambda(lo)? >= target - tol {
        lo -= reach;
        expansions += 1;
        if expansions > 8 {
            return Err(Error::Numeric { msg: "no lower bracket for hull inversion".into(), lo, hi });
        }
    }
    while memo.lambda(hi)? <= target + tol {
        hi += reach;
        expansions += 1;
        if expansions > 8 {
            return Err(Error::Numeric { msg: "no upper bracket for hull inversion".into(), lo, hi });
        }
    }
    let (lower, _) = memo.edge(|l| l >= target - tol, lo, hi)?;
    let (_, upper) = memo.edge(|l| l > target + tol, lower, hi)?;
    let seen = memo.seen.borrow();
    Ok(HullInversion {
        p,
        c,
        sigma_lo: lower,
        sigma_hi: upper,
        plateau: upper - lower > 2.0 * config.tol_sigma,
        all_converged: seen.iter().all(|e| e.2),
        evaluations: seen.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchRow {
    pub p: f64,
    pub sigma_lo: f64,
    pub sigma_hi: f64,
    pub sigma_mid: f64,
    /// `|σ_mid − σ⁺|`.
    pub gap: f64,
    pub all_converged: bool,
}

/// `σ(c, p)` along a decreasing sequence of `p`, solved concurrently.
pub fn branch_probe(
    spec: &NonlinearitySpec,
    c: f64,
    p_sequence: &[f64],
    config: &HullConfig,
) -> Result<Vec<BranchRow>> {
    if p_sequence.is_empty() {
        return Err(Error::Input("empty p sequence".into()));
    }
    if p_sequence.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Input(format!("p sequence must be strictly decreasing: {p_sequence:?}")));
    }
    let sigma_plus = spec.sigma_bounds()?.sigma_plus;
    p_sequence
        .par_iter()
        .map(|&p| {
            let inv = invert_hull(spec, p, c, config)?;
            let mid = inv.midpoint();
            Ok(BranchRow {
                p,
                sigma_lo: inv.sigma_lo,
                sigma_hi: inv.sigma_hi,
                sigma_mid: mid,
                gap: (mid - sigma_plus).abs(),
                all_converged: inv.all_converged,
            })
        })
        .collect()
}
