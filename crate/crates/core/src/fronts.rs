//! Front positions and velocity fits.

use crate::error::{Error, Result};
use crate::evolution::GridProfile;
use crate::nonlinearity::EquilibriumPair;
use crate::numeric::fit_line;

pub const C_TOL: f64 = 1e-3;
pub const MIN_WINDOW_SAMPLES: usize = 20;

/// Phase samples `(t, ξ)`; see [`crate::evolution::evolve`] for the sign of `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontTrace {
    pub samples: Vec<(f64, f64)>,
    pub level: f64,
    /// Window translation already folded into the samples.
    pub shift_accum: f64,
    pub grid_spacing: f64,
    /// Running time integral of the diagonal mass rate, one entry per
    /// sample; empty unless requested.
    pub mass: Vec<f64>,
}

impl FrontTrace {
    pub fn new(level: f64, grid_spacing: f64) -> Self {
        FrontTrace { samples: Vec::new(), level, shift_accum: 0.0, grid_spacing, mass: Vec::new() }
    }

    /// Appends a sample; times must increase strictly.
    pub fn push(&mut self, t: f64, xi: f64) {
        debug_assert!(self.samples.last().is_none_or(|&(s, _)| t > s));
        self.samples.push((t, xi));
    }

    /// `ξ(t_end) − ξ(0)`.
    pub fn total_displacement(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.1 - a.1,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityEstimate {
    pub c: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub pinned: bool,
    /// `max ξ − min ξ` over the fit window.
    pub displacement: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinThresholds {
    pub c_tol: f64,
    pub disp_tol: f64,
}

/// Crossing of `level` by the piecewise-linear interpolant of `u`, with one
/// ghost node at each end carrying the limits.
pub fn front_position(u: &GridProfile, level: f64) -> Result<f64> {
    if !(level > u.left_limit && level < u.right_limit) {
        return Err(Error::Domain(format!(
            "level {level} outside the limits ({}, {})",
            u.left_limit, u.right_limit
        )));
    }
    let n = u.values.len();
    let k = u.values.partition_point(|v| *v < level);
    // Extended index k + 1 is the first node at or above the level.
    let (z0, v0) = if k == 0 { (u.z_left - u.h, u.left_limit) } else { (u.z(k - 1), u.values[k - 1]) };
    let v1 = if k == n { u.right_limit } else { u.values[k] };
    let dv = v1 - v0;
    if dv <= 0.0 {
        return Ok(z0 + u.h);
    }
    Ok(z0 + u.h * (level - v0) / dv)
}

/// `m_σ + 1/2`, halfway between the limits `m_σ` and `m_σ + 1`.
pub fn level_for(pair: &EquilibriumPair) -> f64 {
    pair.m_sigma + 0.5
}

/// Least-squares slope of `ξ` against `t` over the trailing
/// `window_fraction` of samples, with pinning thresholds `c_tol = 1e−3` and
/// one grid cell of displacement.
pub fn estimate_velocity(trace: &FrontTrace, window_fraction: f64) -> Result<VelocityEstimate> {
    let th = PinThresholds { c_tol: C_TOL, disp_tol: trace.grid_spacing };
    estimate_velocity_with(trace, window_fraction, th)
}

pub fn estimate_velocity_with(
    trace: &FrontTrace,
    window_fraction: f64,
    th: PinThresholds,
) -> Result<VelocityEstimate> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::Estimation(format!("window fraction {window_fraction} not in (0, 1]")));
    }
    let n = trace.samples.len();
    let take = ((n as f64) * window_fraction).ceil() as usize;
    if take < MIN_WINDOW_SAMPLES {
        return Err(Error::Estimation(format!(
            "{take} samples in the fit window, need at least {MIN_WINDOW_SAMPLES}"
        )));
    }
    let window = &trace.samples[n - take..];
    let ts: Vec<f64> = window.iter().map(|s| s.0).collect();
    let xs: Vec<f64> = window.iter().map(|s| s.1).collect();
    let fit = fit_line(&ts, &xs)
        .ok_or_else(|| Error::Estimation("degenerate time samples in the fit window".into()))?;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let displacement = hi - lo;
    Ok(VelocityEstimate {
        c: fit.slope,
        stderr: fit.slope_stderr,
        window: (ts[0], ts[take - 1]),
        pinned: fit.slope.abs() <= th.c_tol && displacement <= th.disp_tol,
        displacement,
        samples: take,
    })
}
