//! Small scalar routines shared by the solvers.

use crate::error::{Error, Result};

/// Bisection for a sign change of `g` on `[lo, hi]`.
///
/// Stops once `|g| <= tol` at the midpoint or the bracket can no longer be
/// split in double precision; the returned point is the endpoint or midpoint
/// with smallest `|g|`.
pub(crate) fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo.abs() <= tol && g_lo.abs() <= g_hi.abs() {
        return Ok(lo);
    }
    if g_hi.abs() <= tol {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Numeric {
            msg: format!("no sign change for bisection (g(lo) = {g_lo}, g(hi) = {g_hi})"),
            lo,
            hi,
        });
    }
    let mut best = if g_lo.abs() < g_hi.abs() { (lo, g_lo) } else { (hi, g_hi) };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid.abs() < best.1.abs() {
            best = (mid, g_mid);
        }
        if g_mid == 0.0 {
            break;
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    if best.1.abs() > tol {
        return Err(Error::Numeric {
            msg: format!("bisection residual {} above tolerance {tol}", best.1.abs()),
            lo,
            hi,
        });
    }
    Ok(best.0)
}

/// Golden-section search for the minimum of a unimodal `g` on `[a, b]`.
pub(crate) fn golden_min<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..400 {
        if (b - a).abs() <= tol {
            return Ok(0.5 * (a + b));
        }
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    Err(Error::Numeric { msg: "golden-section search did not converge".into(), lo: a, hi: b })
}

/// Ordinary least-squares line through `(x, y)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LineFit {
    pub slope: f64,
    #[allow(dead_code)]
    pub intercept: f64,
    pub slope_stderr: f64,
    pub rms_residual: f64,
}

pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 3 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Some(LineFit {
        slope,
        intercept,
        slope_stderr: (ssr / (nf - 2.0) / sxx).sqrt(),
        rms_residual: (ssr / nf).sqrt(),
    })
}
