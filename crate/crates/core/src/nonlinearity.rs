//! The nonlinear operator `F`, its diagonal `f`, equilibria, the critical
//! forcings `σ±`, Lipschitz data and the reflection conjugation.
//!
//! Two kinds of operator are supported:
//!
//! - the overdamped Frenkel–Kontorova stencil
//!   `F(X_0, X_1, X_2) = X_1 + X_2 − 2 X_0 − β cos(2π X_0)` with shifts `(0, +1, −1)`;
//! - an affine-plus-local operator `F(X) = Σ a_i X_i + g(X_0)` with arbitrary
//!   real shifts and a 1-periodic local function `g`.
//!
//! Specs built through [`NonlinearitySpec::frenkel_kontorova`] and
//! [`NonlinearitySpec::affine_local`] are validated against every axiom;
//! [`NonlinearitySpec::unchecked`] skips validation so that individual axioms
//! can be inspected with [`NonlinearitySpec::check_axioms`].

use std::f64::consts::TAU;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Axiom, Error, Result};
use crate::numeric::{bisect, golden_min};

/// Residual tolerance for equilibria, `|f(s) + σ|`.
pub const TOL_ROOT: f64 = 1e-10;
/// Slack allowed on sampled neighbor differences of `F`.
pub const TOL_MONO: f64 = 1e-12;

const EXTREMA_SCAN: usize = 10_000;
const EXTREMA_TOL: f64 = 1e-12;
const BISTABILITY_GRID: usize = 4096;
const AXIOM_SAMPLES: usize = 2000;

/// `x − round(x)`, the representative of `x mod 1` in `[−1/2, 1/2]`.
#[inline]
pub(crate) fn centered_frac(x: f64) -> f64 {
    x - x.round()
}

/// A 1-periodic scalar function.
#[derive(Debug, Clone, PartialEq)]
pub enum LocalFn {
    /// `constant + Σ_k cos[k−1]·cos(2πkx) + sin[k−1]·sin(2πkx)`.
    Fourier { constant: f64, cos: Vec<f64>, sin: Vec<f64> },
    /// `offset + L(x + phase)`, with `L` the periodic piecewise-linear
    /// interpolant of `values` sampled at `j / values.len()`.
    Table { values: Vec<f64>, phase: f64, offset: f64 },
}

impl LocalFn {
    pub fn fourier(constant: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        LocalFn::Fourier { constant, cos, sin }
    }

    pub fn table(values: Vec<f64>) -> Self {
        LocalFn::Table { values, phase: 0.0, offset: 0.0 }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LocalFn::Fourier { constant, cos, sin } => {
                let y = centered_frac(x);
                let mut acc = *constant;
                let harmonics = cos.len().max(sin.len());
                for k in 0..harmonics {
                    let arg = TAU * (k + 1) as f64 * y;
                    let a = cos.get(k).copied().unwrap_or(0.0);
                    let b = sin.get(k).copied().unwrap_or(0.0);
                    if a != 0.0 {
                        acc += a * arg.cos();
                    }
                    if b != 0.0 {
                        acc += b * arg.sin();
                    }
                }
                acc
            }
            LocalFn::Table { values, phase, offset } => {
                let m = values.len();
                let y = (x + phase).rem_euclid(1.0) * m as f64;
                let j = (y.floor() as usize).min(m - 1);
                let t = y - j as f64;
                let a = values[j];
                let b = values[(j + 1) % m];
                offset + a + t * (b - a)
            }
        }
    }

    /// Upper bound on `|g'|`.
    pub fn derivative_bound(&self) -> f64 {
        match self {
            LocalFn::Fourier { cos, sin, .. } => (0..cos.len().max(sin.len()))
                .map(|k| {
                    let a = cos.get(k).copied().unwrap_or(0.0);
                    let b = sin.get(k).copied().unwrap_or(0.0);
                    TAU * (k + 1) as f64 * a.hypot(b)
                })
                .sum(),
            LocalFn::Table { values, .. } => {
                let m = values.len();
                (0..m)
                    .map(|j| (values[(j + 1) % m] - values[j]).abs() * m as f64)
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Upper bound on `|g|`.
    pub fn sup_abs(&self) -> f64 {
        match self {
            LocalFn::Fourier { constant, cos, sin } => {
                constant.abs()
                    + (0..cos.len().max(sin.len()))
                        .map(|k| {
                            cos.get(k).copied().unwrap_or(0.0).hypot(sin.get(k).copied().unwrap_or(0.0))
                        })
                        .sum::<f64>()
            }
            LocalFn::Table { values, offset, .. } => {
                values.iter().map(|v| (v + offset).abs()).fold(0.0, f64::max)
            }
        }
    }

    /// `x ↦ −g(1 − x)`.
    pub fn reflected(&self) -> Self {
        match self {
            LocalFn::Fourier { constant, cos, sin } => LocalFn::Fourier {
                constant: -constant,
                cos: cos.iter().map(|a| -a).collect(),
                sin: sin.clone(),
            },
            LocalFn::Table { values, phase, offset } => {
                let m = values.len();
                LocalFn::Table {
                    values: (0..m).map(|j| -values[(m - j) % m]).collect(),
                    phase: -phase,
                    offset: -offset,
                }
            }
        }
    }

    /// `x ↦ g(x + s)`.
    pub fn shifted(&self, s: f64) -> Self {
        match self {
            LocalFn::Fourier { constant, cos, sin } => {
                let harmonics = cos.len().max(sin.len());
                let mut new_cos = Vec::with_capacity(harmonics);
                let mut new_sin = Vec::with_capacity(harmonics);
                for k in 0..harmonics {
                    let a = cos.get(k).copied().unwrap_or(0.0);
                    let b = sin.get(k).copied().unwrap_or(0.0);
                    let (sn, cs) = (TAU * (k + 1) as f64 * centered_frac(s)).sin_cos();
                    new_cos.push(a * cs + b * sn);
                    new_sin.push(b * cs - a * sn);
                }
                LocalFn::Fourier { constant: *constant, cos: new_cos, sin: new_sin }
            }
            LocalFn::Table { values, phase, offset } => {
                LocalFn::Table { values: values.clone(), phase: phase + s, offset: *offset }
            }
        }
    }

    /// `x ↦ g(x) + c`.
    pub fn plus_constant(&self, c: f64) -> Self {
        match self {
            LocalFn::Fourier { constant, cos, sin } => {
                LocalFn::Fourier { constant: constant + c, cos: cos.clone(), sin: sin.clone() }
            }
            LocalFn::Table { values, phase, offset } => {
                LocalFn::Table { values: values.clone(), phase: *phase, offset: offset + c }
            }
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            LocalFn::Fourier { constant, cos, sin } => {
                constant.is_finite() && cos.iter().chain(sin).all(|v| v.is_finite())
            }
            LocalFn::Table { values, phase, offset } => {
                !values.is_empty()
                    && phase.is_finite()
                    && offset.is_finite()
                    && values.iter().all(|v| v.is_finite())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    /// `X_1 + X_2 − 2X_0 − β cos(2πX_0)` on shifts `(0, +1, −1)`.
    FrenkelKontorova { beta: f64 },
    /// `Σ a_i X_i + g(X_0)`.
    AffineLocal { coefficients: Vec<f64>, local: LocalFn },
}

/// `σ⁻ = −max f`, `σ⁺ = −min f`, with the locations of the extrema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaBounds {
    pub sigma_minus: f64,
    pub sigma_plus: f64,
    pub argmin: f64,
    pub argmax: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumPair {
    pub sigma: f64,
    /// Stable root on the decreasing branch of `f`.
    pub m_sigma: f64,
    /// Unstable root on the increasing branch of `f`.
    pub b_sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzData {
    /// Per-shift Lipschitz bound; entry 0 (the center) is unused and zero.
    pub neighbor: Vec<f64>,
    /// Lower bound on `∂F/∂X_0`.
    pub center_lower: f64,
    /// Bound on `|f'|`.
    pub f_prime_sup: f64,
    /// Bound on `|F|` over `[0,1]^{N+1}`.
    pub f_sup: f64,
}

impl LipschitzData {
    pub fn neighbor_sum(&self) -> f64 {
        self.neighbor.iter().skip(1).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct NonlinearitySpec {
    shifts: Vec<f64>,
    kind: OperatorKind,
    theta: f64,
    origin: f64,
    r_star: f64,
    bounds: OnceLock<SigmaBounds>,
}

impl NonlinearitySpec {
    pub fn frenkel_kontorova(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Input(format!("beta must be positive and finite, got {beta}")));
        }
        let spec = Self::unchecked(
            vec![0.0, 1.0, -1.0],
            OperatorKind::FrenkelKontorova { beta },
            0.5,
            0.0,
        );
        spec.validate()?;
        Ok(spec)
    }

    pub fn affine_local(
        shifts: Vec<f64>,
        coefficients: Vec<f64>,
        local: LocalFn,
        theta: f64,
    ) -> Result<Self> {
        let spec = Self::unchecked(
            shifts,
            OperatorKind::AffineLocal { coefficients, local },
            theta,
            0.0,
        );
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a spec without checking any axiom. `origin` is the location of
    /// the minimum of `f`; the increasing run of `f` is `(origin, origin + θ)`.
    pub fn unchecked(shifts: Vec<f64>, kind: OperatorKind, theta: f64, origin: f64) -> Self {
        let r_star = shifts.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        NonlinearitySpec { shifts, kind, theta, origin, r_star, bounds: OnceLock::new() }
    }

    pub fn shifts(&self) -> &[f64] {
        &self.shifts
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// `max_i |r_i|`.
    pub fn r_star(&self) -> f64 {
        self.r_star
    }

    /// Number of arguments, `N + 1`.
    pub fn arity(&self) -> usize {
        self.shifts.len()
    }

    /// `β` when this is the Frenkel–Kontorova stencil.
    pub fn fk_beta(&self) -> Option<f64> {
        match self.kind {
            OperatorKind::FrenkelKontorova { beta } => Some(beta),
            _ => None,
        }
    }

    /// `F(X)`, checking the argument count.
    pub fn eval_operator(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.arity() {
            return Err(Error::Input(format!(
                "operator takes {} arguments, got {}",
                self.arity(),
                x.len()
            )));
        }
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite operator argument {bad}")));
        }
        Ok(self.apply(x))
    }

    /// `F(X)` without argument checks; `x.len()` must equal [`Self::arity`].
    #[inline]
    pub fn apply(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.shifts.len());
        match &self.kind {
            OperatorKind::FrenkelKontorova { beta } => {
                (x[1] + x[2]) - 2.0 * x[0] - beta * (TAU * centered_frac(x[0])).cos()
            }
            OperatorKind::AffineLocal { coefficients, local } => {
                let mut acc = 0.0;
                for (a, v) in coefficients.iter().zip(x) {
                    acc += a * v;
                }
                acc + local.eval(x[0])
            }
        }
    }

    /// `f(v) = F(v, ..., v)`.
    #[inline]
    pub fn eval_diagonal(&self, v: f64) -> f64 {
        match &self.kind {
            OperatorKind::FrenkelKontorova { beta } => {
                (v + v) - 2.0 * v - beta * (TAU * centered_frac(v)).cos()
            }
            OperatorKind::AffineLocal { coefficients, local } => {
                let mut acc = 0.0;
                for a in coefficients {
                    acc += a * v;
                }
                acc + local.eval(v)
            }
        }
    }

    /// Extrema of `f` on one period: a `10^4`-point scan followed by
    /// golden-section refinement around the best samples.
    pub fn sigma_bounds(&self) -> Result<SigmaBounds> {
        if let Some(b) = self.bounds.get() {
            return Ok(*b);
        }
        let b = self.compute_sigma_bounds()?;
        Ok(*self.bounds.get_or_init(|| b))
    }

    fn compute_sigma_bounds(&self) -> Result<SigmaBounds> {
        let n = EXTREMA_SCAN;
        let step = 1.0 / n as f64;
        let sample = |k: usize| self.origin + k as f64 * step;
        let (mut kmin, mut kmax) = (0usize, 0usize);
        let (mut fmin, mut fmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..n {
            let v = self.eval_diagonal(sample(k));
            if v < fmin {
                fmin = v;
                kmin = k;
            }
            if v > fmax {
                fmax = v;
                kmax = k;
            }
        }
        let xmin0 = sample(kmin);
        let xmax0 = sample(kmax);
        let xmin = golden_min(|x| self.eval_diagonal(x), xmin0 - step, xmin0 + step, EXTREMA_TOL)?;
        let xmax = golden_min(|x| -self.eval_diagonal(x), xmax0 - step, xmax0 + step, EXTREMA_TOL)?;
        // Keep the scan point when refinement does not strictly improve on it.
        let (argmin, fmin) = match self.eval_diagonal(xmin) {
            v if v < fmin => (xmin, v),
            _ => (xmin0, fmin),
        };
        let (argmax, fmax) = match self.eval_diagonal(xmax) {
            v if v > fmax => (xmax, v),
            _ => (xmax0, fmax),
        };
        if !(fmin.is_finite() && fmax.is_finite()) {
            return Err(Error::Numeric {
                msg: "non-finite extremum of the diagonal".into(),
                lo: self.origin,
                hi: self.origin + 1.0,
            });
        }
        Ok(SigmaBounds { sigma_minus: -fmax, sigma_plus: -fmin, argmin, argmax })
    }

    /// Stable and unstable roots of `f(s) + σ = 0` for `σ ∈ [σ⁻, σ⁺]`.
    pub fn equilibria(&self, sigma: f64) -> Result<EquilibriumPair> {
        let b = self.sigma_bounds()?;
        let slack = 1e-12 * (1.0 + b.sigma_plus.abs().max(b.sigma_minus.abs()));
        if !sigma.is_finite() || sigma < b.sigma_minus - slack || sigma > b.sigma_plus + slack {
            return Err(Error::Domain(format!(
                "sigma = {sigma} outside [{}, {}]",
                b.sigma_minus, b.sigma_plus
            )));
        }
        let (argmin, mut argmax) = (b.argmin, b.argmax);
        if argmax < argmin {
            argmax += 1.0;
        }
        let g = |s: f64| self.eval_diagonal(s) + sigma;
        let m_sigma = bisect(g, argmax - 1.0, argmin, TOL_ROOT)?;
        let b_sigma = bisect(g, argmin, argmax, TOL_ROOT)?;
        Ok(EquilibriumPair { sigma, m_sigma, b_sigma })
    }

    pub fn lipschitz_data(&self) -> LipschitzData {
        match &self.kind {
            OperatorKind::FrenkelKontorova { beta } => LipschitzData {
                neighbor: vec![0.0, 1.0, 1.0],
                center_lower: -2.0 - TAU * beta,
                f_prime_sup: TAU * beta,
                f_sup: 2.0 + beta,
            },
            OperatorKind::AffineLocal { coefficients, local } => {
                let mut neighbor = vec![0.0; coefficients.len()];
                for (i, a) in coefficients.iter().enumerate().skip(1) {
                    neighbor[i] = a.abs();
                }
                let total: f64 = coefficients.iter().sum();
                let g_prime = local.derivative_bound();
                LipschitzData {
                    center_lower: coefficients[0] - g_prime,
                    f_prime_sup: total.abs() + g_prime,
                    f_sup: neighbor.iter().sum::<f64>() + total.abs() + local.sup_abs(),
                    neighbor,
                }
            }
        }
    }

    /// Coefficients and local part of the equivalent affine-plus-local form.
    pub fn as_affine_local(&self) -> (Vec<f64>, LocalFn) {
        match &self.kind {
            OperatorKind::FrenkelKontorova { beta } => {
                (vec![-2.0, 1.0, 1.0], LocalFn::fourier(0.0, vec![-beta], vec![0.0]))
            }
            OperatorKind::AffineLocal { coefficients, local } => (coefficients.clone(), local.clone()),
        }
    }

    /// The conjugate operator `F̄(X) = −F(E − X)` on shifts `−r_i`, so that
    /// `φ̄(z) = 1 − φ(−z)` solves the reflected problem with `c̄ = −c`, `σ̄ = −σ`.
    pub fn reflect(&self) -> Self {
        let (coefficients, local) = self.as_affine_local();
        let total: f64 = coefficients.iter().sum();
        let local = local.reflected().plus_constant(-total);
        let shifts = self.shifts.iter().map(|r| if *r == 0.0 { 0.0 } else { -r }).collect();
        let origin = (1.0 - self.origin - self.theta).rem_euclid(1.0);
        Self::unchecked(shifts, OperatorKind::AffineLocal { coefficients, local }, self.theta, origin)
    }

    /// `X ↦ F(X + sE) + add`, with the minimum of `f` moved to `origin − s`.
    pub fn translated(&self, s: f64, add: f64) -> Self {
        let (coefficients, local) = self.as_affine_local();
        let total: f64 = coefficients.iter().sum();
        let local = local.shifted(s).plus_constant(add + s * total);
        Self::unchecked(
            self.shifts.clone(),
            OperatorKind::AffineLocal { coefficients, local },
            self.theta,
            self.origin - s,
        )
    }

    /// Runs every axiom check and returns the first violation.
    pub fn validate(&self) -> Result<()> {
        match self.check_axioms().into_iter().find(|c| !c.passed) {
            Some(c) => Err(Error::Axiom { axiom: c.axiom, detail: c.detail }),
            None => Ok(()),
        }
    }

    /// All axiom checks, in order. Sampled checks use a fixed seed.
    pub fn check_axioms(&self) -> Vec<AxiomCheck> {
        let mut out = Vec::new();
        let mut push = |axiom, passed, detail: String| out.push(AxiomCheck { axiom, passed, detail });

        let finite = self.theta.is_finite()
            && self.origin.is_finite()
            && self.shifts.iter().all(|r| r.is_finite())
            && match &self.kind {
                OperatorKind::FrenkelKontorova { beta } => beta.is_finite() && *beta > 0.0,
                OperatorKind::AffineLocal { coefficients, local } => {
                    coefficients.len() == self.shifts.len()
                        && coefficients.iter().all(|a| a.is_finite())
                        && local.is_finite()
                }
            };
        push(
            Axiom::Finiteness,
            finite,
            if finite {
                "all parameters finite, one coefficient per shift".into()
            } else {
                "non-finite parameter or coefficient/shift count mismatch".into()
            },
        );
        if !finite {
            return out;
        }

        let zero = self.shifts.first() == Some(&0.0);
        push(Axiom::ZeroShift, zero, format!("r_0 = {:?}", self.shifts.first()));
        let mut distinct = true;
        for i in 0..self.shifts.len() {
            for j in (i + 1)..self.shifts.len() {
                if self.shifts[i] == self.shifts[j] {
                    distinct = false;
                }
            }
        }
        push(Axiom::DistinctShifts, distinct, format!("shifts {:?}", self.shifts));
        let theta_ok = self.theta > 0.0 && self.theta < 1.0;
        push(Axiom::Theta, theta_ok, format!("theta = {}", self.theta));

        let scale = 1.0 + self.lipschitz_data().f_sup;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f00d);
        let n = self.arity();
        let mut worst_mono = f64::INFINITY;
        let mut worst_mono_at = (0usize, 0.0f64);
        let mut worst_period = 0.0f64;
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for _ in 0..AXIOM_SAMPLES {
            for v in x.iter_mut() {
                *v = rng.gen_range(-1.0..2.0);
            }
            let base = self.apply(&x);
            for i in 1..n {
                for delta in [1e-6, 1e-2, 0.3] {
                    y.copy_from_slice(&x);
                    y[i] += delta;
                    let diff = self.apply(&y) - base;
                    if diff < worst_mono {
                        worst_mono = diff;
                        worst_mono_at = (i, delta);
                    }
                }
            }
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi = xi + 1.0;
            }
            worst_period = worst_period.max((self.apply(&y) - base).abs());
        }
        let mono_ok = n < 2 || worst_mono >= -TOL_MONO * scale;
        push(
            Axiom::Monotonicity,
            mono_ok,
            if mono_ok {
                "F non-decreasing in every neighbor argument".into()
            } else {
                format!(
                    "F decreases by {} when argument {} increases by {}",
                    -worst_mono, worst_mono_at.0, worst_mono_at.1
                )
            },
        );
        let period_ok = worst_period <= 1e-12 * scale;
        push(
            Axiom::Periodicity,
            period_ok,
            format!("max |F(X+E) - F(X)| = {worst_period:e}"),
        );

        if !theta_ok {
            push(Axiom::Bistability, false, "no bistability check without a valid theta".into());
            return out;
        }
        let m = BISTABILITY_GRID;
        let split = (self.theta * m as f64).round() as usize;
        let f: Vec<f64> =
            (0..=m).map(|k| self.eval_diagonal(self.origin + k as f64 / m as f64)).collect();
        let tol = TOL_MONO * scale;
        let rising_bad = (0..split).find(|&k| f[k + 1] < f[k] - tol);
        let falling_bad = (split..m).find(|&k| f[k + 1] > f[k] + tol);
        let gap = f[split] - f[0];
        let bistable = rising_bad.is_none() && falling_bad.is_none() && gap > 1e-9;
        let detail = if let Some(k) = rising_bad {
            format!("f decreases on (origin, origin+theta) near s = {}", self.origin + k as f64 / m as f64)
        } else if let Some(k) = falling_bad {
            format!("f increases on (origin+theta, origin+1) near s = {}", self.origin + k as f64 / m as f64)
        } else if gap <= 1e-9 {
            format!("f(origin+theta) - f(origin) = {gap} is not positive")
        } else {
            "f rises on (origin, origin+theta) and falls on (origin+theta, origin+1)".into()
        };
        push(Axiom::Bistability, bistable, detail);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fk(beta: f64) -> NonlinearitySpec {
        NonlinearitySpec::frenkel_kontorova(beta).unwrap()
    }

    #[test]
    fn fk_operator_values() {
        let s = fk(2.0);
        assert_eq!(s.eval_operator(&[0.0, 0.0, 0.0]).unwrap(), -2.0);
        assert!(s.eval_operator(&[0.25, 0.25, 0.25]).unwrap().abs() < 1e-15);
        let a = s.eval_operator(&[0.1, 0.2, 0.3]).unwrap();
        let b = s.eval_operator(&[1.1, 1.2, 1.3]).unwrap();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn operator_rejects_wrong_arity() {
        assert!(matches!(fk(1.0).eval_operator(&[0.0, 0.0]), Err(Error::Input(_))));
        assert!(matches!(fk(1.0).eval_operator(&[0.0, f64::NAN, 0.0]), Err(Error::Input(_))));
    }

    #[test]
    fn fk_diagonal_values() {
        let s = fk(2.0);
        assert_eq!(s.eval_diagonal(0.0), -2.0);
        assert_eq!(s.eval_diagonal(0.5), 2.0);
        for v in [-0.3, 0.1, 0.77] {
            assert!((s.eval_diagonal(v) - s.eval_diagonal(v + 1.0)).abs() < 1e-15);
            assert_eq!(s.eval_diagonal(v), s.apply(&[v, v, v]));
        }
    }

    #[test]
    fn fk_sigma_bounds_are_plus_minus_beta() {
        for beta in [0.5, 1.0, 2.0] {
            let b = fk(beta).sigma_bounds().unwrap();
            assert!((b.sigma_plus - beta).abs() < 1e-12);
            assert!((b.sigma_minus + beta).abs() < 1e-12);
            assert_eq!(b.argmin, 0.0);
            assert_eq!(b.argmax, 0.5);
        }
    }

    #[test]
    fn fk_equilibria_closed_form() {
        let p = fk(2.0).equilibria(0.0).unwrap();
        assert!((p.m_sigma + 0.25).abs() < 1e-12);
        assert!((p.b_sigma - 0.25).abs() < 1e-12);
        let p = fk(1.0).equilibria(0.5).unwrap();
        assert!((p.m_sigma + 1.0 / 6.0).abs() < 1e-12);
        assert!((p.b_sigma - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn equilibria_merge_at_sigma_plus() {
        for beta in [0.5, 2.0] {
            let p = fk(beta).equilibria(beta).unwrap();
            assert!(p.m_sigma.abs() < 1e-4 && p.b_sigma.abs() < 1e-4);
            assert!(p.m_sigma <= p.b_sigma);
        }
    }

    #[test]
    fn equilibria_outside_range_is_domain_error() {
        assert!(matches!(fk(2.0).equilibria(2.5), Err(Error::Domain(_))));
        assert!(matches!(fk(2.0).equilibria(-3.0), Err(Error::Domain(_))));
    }

    #[test]
    fn fk_lipschitz_constants() {
        let l = fk(2.0).lipschitz_data();
        assert_eq!(l.neighbor, vec![0.0, 1.0, 1.0]);
        assert!((l.center_lower - (-2.0 - 4.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!((l.f_prime_sup - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(l.f_sup, 4.0);
        assert_eq!(l.neighbor_sum(), 2.0);
    }

    #[test]
    fn fk_f_sup_dominates_grid_max() {
        let s = fk(2.0);
        let bound = s.lipschitz_data().f_sup;
        let n = 40;
        let mut worst = 0.0f64;
        for i in 0..=n {
            for j in 0..=n {
                for k in 0..=n {
                    let x = [i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64];
                    worst = worst.max(s.apply(&x).abs());
                }
            }
        }
        assert!(worst <= bound + 1e-12);
        assert!(worst > 3.9);
    }

    #[test]
    fn lipschitz_bounds_dominate_sampled_slopes() {
        let s = NonlinearitySpec::affine_local(
            vec![0.0, 0.7, -0.4],
            vec![-1.5, 1.0, 0.5],
            LocalFn::fourier(0.0, vec![-1.0], vec![0.0]),
            0.5,
        )
        .unwrap();
        let l = s.lipschitz_data();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let d = 1e-6;
        for _ in 0..500 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..2.0)).collect();
            let base = s.apply(&x);
            let mut y = x.clone();
            y[0] += d;
            assert!((s.apply(&y) - base) / d >= l.center_lower - 1e-5);
            for i in 1..3 {
                let mut y = x.clone();
                y[i] += d;
                assert!((s.apply(&y) - base) / d <= l.neighbor[i] + 1e-5);
            }
            let v = x[0];
            let slope = (s.eval_diagonal(v + d) - s.eval_diagonal(v)) / d;
            assert!(slope.abs() <= l.f_prime_sup + 1e-5);
        }
    }

    #[test]
    fn reflection_of_fk() {
        let s = fk(2.0);
        let r = s.reflect();
        for v in [0.0, 0.1, 0.33, 0.5, 0.9] {
            let expected = 2.0 * (TAU * v).cos();
            assert!((r.eval_diagonal(v) - expected).abs() < 1e-12);
            assert!((r.eval_diagonal(v) + s.eval_diagonal(v)).abs() < 1e-12);
        }
        let b = s.sigma_bounds().unwrap();
        let rb = r.sigma_bounds().unwrap();
        assert!((rb.sigma_plus + b.sigma_minus).abs() < 1e-12);
        assert!((rb.sigma_minus + b.sigma_plus).abs() < 1e-12);
        assert!(r.validate().is_ok());
        assert_eq!(r.origin(), 0.5);
    }

    #[test]
    fn reflection_is_an_involution() {
        let s = fk(1.3);
        let rr = s.reflect().reflect();
        assert_eq!(rr.shifts(), s.shifts());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            assert!((rr.apply(&x) - s.apply(&x)).abs() < 1e-12);
        }
        assert_eq!(rr.origin(), s.origin());
    }

    #[test]
    fn reflected_equilibria_mirror_the_original() {
        let s = fk(2.0);
        let r = s.reflect();
        let p = s.equilibria(0.7).unwrap();
        let q = r.equilibria(-0.7).unwrap();
        assert!((q.m_sigma + p.m_sigma).abs() < 1e-10);
    }

    #[test]
    fn perturbed_cosine_extrema_match_brute_force() {
        let local = LocalFn::fourier(0.0, vec![-1.0], vec![0.1]);
        let s = NonlinearitySpec::unchecked(
            vec![0.0, 1.0, -1.0],
            OperatorKind::AffineLocal { coefficients: vec![-2.0, 1.0, 1.0], local },
            0.5,
            0.0,
        );
        let n = 1_000_000;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..n {
            let x = k as f64 / n as f64;
            let v = -(TAU * x).cos() + 0.1 * (TAU * x).sin();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let b = s.sigma_bounds().unwrap();
        assert!((b.sigma_plus + lo).abs() < 1e-9);
        assert!((b.sigma_minus + hi).abs() < 1e-9);
        // |extremum| = sqrt(1.01) exactly
        assert!((b.sigma_plus - 1.01f64.sqrt()).abs() < 1e-12);
        assert!(s.check_axioms().iter().any(|c| c.axiom == Axiom::Bistability && !c.passed));
    }

    #[test]
    fn rejects_negative_neighbor_coefficient() {
        let err = NonlinearitySpec::affine_local(
            vec![0.0, 1.0, -1.0],
            vec![0.0, -1.0, 1.0],
            LocalFn::fourier(0.0, vec![-1.0], vec![0.0]),
            0.5,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Axiom { axiom: Axiom::Monotonicity, .. }));
    }

    #[test]
    fn rejects_non_periodic_affine_part() {
        let err = NonlinearitySpec::affine_local(
            vec![0.0, 1.0],
            vec![-0.5, 1.0],
            LocalFn::fourier(0.0, vec![-1.0], vec![0.0]),
            0.5,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Axiom { axiom: Axiom::Periodicity, .. }));
    }

    #[test]
    fn rejects_bad_shifts_and_theta() {
        let local = LocalFn::fourier(0.0, vec![-1.0], vec![0.0]);
        let e = NonlinearitySpec::affine_local(vec![0.5, 1.0], vec![-1.0, 1.0], local.clone(), 0.5);
        assert!(matches!(e, Err(Error::Axiom { axiom: Axiom::ZeroShift, .. })));
        let e = NonlinearitySpec::affine_local(vec![0.0, 1.0, 1.0], vec![-2.0, 1.0, 1.0], local.clone(), 0.5);
        assert!(matches!(e, Err(Error::Axiom { axiom: Axiom::DistinctShifts, .. })));
        let e = NonlinearitySpec::affine_local(vec![0.0, 1.0], vec![-1.0, 1.0], local.clone(), 0.3);
        assert!(matches!(e, Err(Error::Axiom { axiom: Axiom::Bistability, .. })));
        let e = NonlinearitySpec::affine_local(vec![0.0, 1.0], vec![-1.0, 1.0], local, 1.2);
        assert!(matches!(e, Err(Error::Axiom { axiom: Axiom::Theta, .. })));
        assert!(NonlinearitySpec::frenkel_kontorova(-1.0).is_err());
    }

    #[test]
    fn table_local_function_reflects_exactly() {
        let m = 64;
        let values: Vec<f64> = (0..m).map(|j| -(TAU * j as f64 / m as f64).cos()).collect();
        let g = LocalFn::table(values);
        let r = g.reflected();
        for x in [0.0, 0.013, 0.25, 0.4, 0.77] {
            assert!((r.eval(x) + g.eval(1.0 - x)).abs() < 1e-14);
        }
        let sh = g.shifted(0.1).plus_constant(0.5);
        assert!((sh.eval(0.2) - g.eval(0.3) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn fourier_shift_matches_direct_evaluation() {
        let g = LocalFn::fourier(0.2, vec![-1.0, 0.3], vec![0.1, -0.05]);
        let s = g.shifted(0.137);
        for x in [0.0, 0.2, 0.5, 0.9] {
            assert!((s.eval(x) - g.eval(x + 0.137)).abs() < 1e-13);
        }
    }

    #[test]
    fn translated_spec_moves_minimum() {
        let s = fk(1.0).translated(0.0, 1.0);
        assert_eq!(s.eval_diagonal(0.0), 0.0);
        assert_eq!(s.eval_diagonal(1.0), 0.0);
        let b = s.sigma_bounds().unwrap();
        assert!(b.sigma_plus.abs() < 1e-12);
        assert!((b.sigma_minus + 2.0).abs() < 1e-12);
    }
}
