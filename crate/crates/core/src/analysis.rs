//! Velocity diagram, critical velocities and the verifiers built on them.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{evolve, initial_front, initial_ramp, EvolutionConfig, GridProfile};
use crate::fronts::{estimate_velocity_with, FrontTrace, PinThresholds, VelocityEstimate, C_TOL};
use crate::nonlinearity::NonlinearitySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialShape {
    /// `m_σ + 1/(1 + e^{−4z})`.
    #[default]
    Logistic,
    /// `m_σ + clamp((z + 1)/2, 0, 1)`.
    Ramp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocityConfig {
    pub evolution: EvolutionConfig,
    pub window_fraction: f64,
    pub initial: InitialShape,
    /// Pinning thresholds; `disp_tol = None` means one grid cell.
    pub c_tol: f64,
    pub disp_tol: Option<f64>,
}

impl Default for VelocityConfig {
    fn default() -> Self {
        VelocityConfig {
            evolution: EvolutionConfig { recenter: true, ..Default::default() },
            window_fraction: 0.5,
            initial: InitialShape::Logistic,
            c_tol: C_TOL,
            disp_tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramPoint {
    pub sigma: f64,
    pub c: f64,
    pub stderr: f64,
    pub pinned: bool,
    pub m_sigma: f64,
    pub b_sigma: f64,
    /// Set when the run failed; the numeric fields are then NaN.
    pub failure: Option<String>,
}

impl DiagramPoint {
    fn failed(sigma: f64, err: &Error) -> Self {
        DiagramPoint {
            sigma,
            c: f64::NAN,
            stderr: f64::NAN,
            pinned: false,
            m_sigma: f64::NAN,
            b_sigma: f64::NAN,
            failure: Some(err.to_string()),
        }
    }

    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct WaveRun {
    pub point: DiagramPoint,
    pub estimate: VelocityEstimate,
    pub profile: GridProfile,
    pub trace: FrontTrace,
}

fn check_interior(spec: &NonlinearitySpec, sigma: f64) -> Result<()> {
    let b = spec.sigma_bounds()?;
    if !(sigma > b.sigma_minus && sigma < b.sigma_plus) {
        return Err(Error::Domain(format!(
            "sigma = {sigma} outside the open bistable range ({}, {}); no monotone traveling waves \
             for sigma outside [sigma-, sigma+]",
            b.sigma_minus, b.sigma_plus
        )));
    }
    Ok(())
}

/// Equilibria, initial front, evolution and velocity fit for one `σ`. A run
/// without recentring that exhausts the domain is repeated once with it.
pub fn run_wave(spec: &NonlinearitySpec, sigma: f64, config: &VelocityConfig) -> Result<WaveRun> {
    check_interior(spec, sigma)?;
    config.evolution.grid.validate()?;
    let pair = spec.equilibria(sigma)?;
    let u0 = match config.initial {
        InitialShape::Logistic => initial_front(&pair, &config.evolution.grid),
        InitialShape::Ramp => initial_ramp(&pair, &config.evolution.grid),
    };
    let (profile, trace) = match evolve(&u0, spec, sigma, &config.evolution) {
        Err(Error::DomainExhausted { .. }) if !config.evolution.recenter => {
            let cfg = EvolutionConfig { recenter: true, ..config.evolution.clone() };
            evolve(&u0, spec, sigma, &cfg)?
        }
        other => other?,
    };
    let th = PinThresholds { c_tol: config.c_tol, disp_tol: config.disp_tol.unwrap_or(u0.h) };
    let estimate = estimate_velocity_with(&trace, config.window_fraction, th)?;
    let point = DiagramPoint {
        sigma,
        c: estimate.c,
        stderr: estimate.stderr,
        pinned: estimate.pinned,
        m_sigma: pair.m_sigma,
        b_sigma: pair.b_sigma,
        failure: None,
    };
    Ok(WaveRun { point, estimate, profile, trace })
}

pub fn velocity_at(spec: &NonlinearitySpec, sigma: f64, config: &VelocityConfig) -> Result<DiagramPoint> {
    run_wave(spec, sigma, config).map(|r| r.point)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    pub points: Vec<DiagramPoint>,
    /// Extent of the longest contiguous pinned run.
    pub plateau: Option<(f64, f64)>,
    /// `1 / (F_sup + max |σ|)`.
    pub k_mono: f64,
    pub critical: Option<CriticalVelocities>,
}

impl Diagram {
    /// Consecutive pairs with `c_{k+1} < c_k − tol`.
    pub fn monotonicity_violations(&self, tol: f64) -> Vec<(f64, f64)> {
        self.points
            .windows(2)
            .filter(|w| w[0].ok() && w[1].ok() && w[1].c < w[0].c - tol)
            .map(|w| (w[0].sigma, w[1].sigma))
            .collect()
    }

    /// `max |c(σ) + c(−σ)|` over grid points whose mirror is also present.
    pub fn odd_symmetry_defect(&self) -> Option<f64> {
        let mut worst: Option<f64> = None;
        for p in self.points.iter().filter(|p| p.ok()) {
            if let Some(q) = self.points.iter().find(|q| q.ok() && (q.sigma + p.sigma).abs() < 1e-9) {
                let d = (p.c + q.c).abs();
                worst = Some(worst.map_or(d, |w| w.max(d)));
            }
        }
        worst
    }

    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.ok()).count()
    }
}

/// Velocities on `sigma_grid`, computed concurrently. Failed points are kept
/// as flagged rows.
pub fn sweep_diagram(spec: &NonlinearitySpec, sigma_grid: &[f64], config: &VelocityConfig) -> Result<Diagram> {
    let b = spec.sigma_bounds()?;
    if let Some(s) = sigma_grid.iter().find(|s| !(**s > b.sigma_minus && **s < b.sigma_plus)) {
        return Err(Error::Domain(format!(
            "grid point {s} outside ({}, {})",
            b.sigma_minus, b.sigma_plus
        )));
    }
    let mut grid = sigma_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let points: Vec<DiagramPoint> = grid
        .par_iter()
        .map(|&s| velocity_at(spec, s, config).unwrap_or_else(|e| DiagramPoint::failed(s, &e)))
        .collect();

    let mut plateau: Option<(usize, usize)> = None;
    let mut start = None;
    for (k, p) in points.iter().enumerate() {
        if p.ok() && p.pinned {
            let s = *start.get_or_insert(k);
            if plateau.is_none_or(|(a, b)| k - s > b - a) {
                plateau = Some((s, k));
            }
        } else {
            start = None;
        }
    }
    let sigma_max = grid.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    Ok(Diagram {
        plateau: plateau.map(|(a, b)| (points[a].sigma, points[b].sigma)),
        k_mono: 1.0 / (spec.lipschitz_data().f_sup + sigma_max),
        points,
        critical: None,
    })
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSide {
    /// `(σ, c, stderr)` approaching the end point.
    pub sequence: Vec<(f64, f64, f64)>,
    pub last: f64,
    /// The last two terms, ordered.
    pub bracket: (f64, f64),
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalVelocities {
    pub c_minus: CriticalSide,
    pub c_plus: CriticalSide,
}

pub const CRITICAL_STEPS: usize = 5;

/// `c(σ± ∓ δ_k)` for `δ_k = 0.1 (σ⁺ − σ⁻) 2^{−k}`, `k = 0..4`.
pub fn critical_velocities(spec: &NonlinearitySpec, config: &VelocityConfig) -> Result<CriticalVelocities> {
    let b = spec.sigma_bounds()?;
    let d0 = 0.1 * (b.sigma_plus - b.sigma_minus);
    let deltas: Vec<f64> = (0..CRITICAL_STEPS).map(|k| d0 * 0.5f64.powi(k as i32)).collect();
    let jobs: Vec<f64> = deltas
        .iter()
        .map(|d| b.sigma_plus - d)
        .chain(deltas.iter().map(|d| b.sigma_minus + d))
        .collect();
    let runs: Vec<DiagramPoint> =
        jobs.par_iter().map(|&s| velocity_at(spec, s, config)).collect::<Result<_>>()?;
    let side = |pts: &[DiagramPoint], increasing: bool| {
        let sequence: Vec<(f64, f64, f64)> = pts.iter().map(|p| (p.sigma, p.c, p.stderr)).collect();
        let monotone = sequence.windows(2).all(|w| {
            let tol = 2.0 * w[0].2.hypot(w[1].2);
            if increasing {
                w[1].1 >= w[0].1 - tol
            } else {
                w[1].1 <= w[0].1 + tol
            }
        });
        let n = sequence.len();
        let (a, z) = (sequence[n - 2].1, sequence[n - 1].1);
        CriticalSide { last: z, bracket: (a.min(z), a.max(z)), monotone, sequence }
    };
    Ok(CriticalVelocities {
        c_plus: side(&runs[..CRITICAL_STEPS], true),
        c_minus: side(&runs[CRITICAL_STEPS..], false),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeCheck {
    pub sigma: f64,
    pub slope: f64,
    pub bound: f64,
    pub tol: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    /// At least five consecutive unpinned points were available.
    pub applicable: bool,
    pub checks: Vec<SlopeCheck>,
}

impl SlopeReport {
    pub fn violations(&self) -> usize {
        self.checks.iter().filter(|c| !c.ok).count()
    }
}

/// Forward differences `Δc/Δσ ≥ K |c| − 3 stderr/Δσ` between consecutive
/// successful points; `|c|` is taken as the smaller endpoint value, so a pair
/// touching the plateau only asks for a non-negative slope.
pub fn check_slope_bound(diagram: &Diagram) -> SlopeReport {
    let k = diagram.k_mono;
    let mut checks = Vec::new();
    let mut run = 1usize;
    let mut longest = 0usize;
    for w in diagram.points.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if !(a.ok() && b.ok()) {
            run = 1;
            continue;
        }
        if a.pinned || b.pinned {
            run = 1;
        } else {
            run += 1;
            longest = longest.max(run);
        }
        let ds = b.sigma - a.sigma;
        let slope = (b.c - a.c) / ds;
        let bound = k * a.c.abs().min(b.c.abs());
        let tol = 3.0 * a.stderr.hypot(b.stderr) / ds;
        checks.push(SlopeCheck { sigma: a.sigma, slope, bound, tol, ok: slope >= bound - tol });
    }
    SlopeReport { applicable: longest >= 5, checks }
}

fn zero_sum_moment(spec: &NonlinearitySpec) -> Result<f64> {
    let (coefficients, _) = spec.as_affine_local();
    let total: f64 = coefficients.iter().sum();
    if total.abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "integral identity needs a zero-sum affine part, got sum {total}"
        )));
    }
    Ok(coefficients.iter().zip(spec.shifts()).map(|(a, r)| a * r).sum())
}

/// `|c (R − L) − (R − L) Σ a_i r_i − Σ_j (f(u_j) + σ) h|` for an affine part
/// with `Σ a_i = 0`; outside the grid `f + σ` vanishes at the limits.
///
/// This uses a single snapshot. When the shifts are multiples of the grid
/// spacing the grid splits into independent chains whose phases need not be
/// evenly spread, and the snapshot sum then oscillates around `c (R − L)`
/// with period `1/|c|`; [`integral_identity_averaged`] removes that.
pub fn integral_identity(point: &DiagramPoint, profile: &GridProfile, spec: &NonlinearitySpec) -> Result<f64> {
    let moment = zero_sum_moment(spec)?;
    let jump = profile.right_limit - profile.left_limit;
    let mass: f64 = profile.values.iter().map(|&u| spec.eval_diagonal(u) + point.sigma).sum::<f64>() * profile.h;
    Ok((point.c * jump - jump * moment - mass).abs())
}

/// Same residual with the mass rate averaged over the velocity fit window.
/// The run must have been made with `track_mass`.
pub fn integral_identity_averaged(run: &WaveRun, spec: &NonlinearitySpec) -> Result<f64> {
    let moment = zero_sum_moment(spec)?;
    let trace = &run.trace;
    if trace.mass.len() != trace.samples.len() {
        return Err(Error::Config("trace has no mass record; evolve with track_mass".into()));
    }
    let n = trace.samples.len();
    let a = n - run.estimate.samples;
    let (ta, tb) = (trace.samples[a].0, trace.samples[n - 1].0);
    if !(tb > ta) {
        return Err(Error::Estimation("empty averaging window".into()));
    }
    let rate = (trace.mass[n - 1] - trace.mass[a]) / (tb - ta);
    let jump = run.profile.right_limit - run.profile.left_limit;
    Ok((run.point.c * jump - jump * moment - rate).abs())
}

/// Translates the state to the minimum of `f` and absorbs `σ⁺`, so that
/// `f ≥ 0` with `f(0) = f(1) = 0`.
pub fn normalize_to_sigma_plus(spec: &NonlinearitySpec) -> Result<NonlinearitySpec> {
    let b = spec.sigma_bounds()?;
    Ok(spec.translated(b.argmin, b.sigma_plus))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupersolutionReport {
    pub epsilon: f64,
    pub m: f64,
    /// `K (2r*) e^{2 r* |f'|}`.
    pub m_threshold: f64,
    pub k: f64,
    pub a_epsilon: f64,
    pub mu_epsilon: f64,
    /// `min_z h_ε'(z) − F((h_ε(z + ε r_i))_i)` on the check grid.
    pub grid_min_residual: f64,
    pub passed: bool,
}

pub const TOL_SUPER: f64 = 1e-8;

/// Solution of `h' = f(h)`, `h(0) = θ`, tabulated by RK4 and read by cubic
/// Hermite interpolation.
struct ProfileOde {
    z0: f64,
    dz: f64,
    h: Vec<f64>,
    dh: Vec<f64>,
}

impl ProfileOde {
    fn solve(spec: &NonlinearitySpec, half_width: f64, dz: f64) -> Self {
        let f = |h: f64| spec.eval_diagonal(h);
        let n = (half_width / dz).round() as usize;
        let rk4 = |y: f64, d: f64| {
            let k1 = f(y);
            let k2 = f(y + 0.5 * d * k1);
            let k3 = f(y + 0.5 * d * k2);
            let k4 = f(y + d * k3);
            y + d / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        };
        let mut fwd = vec![spec.theta()];
        let mut bwd = vec![spec.theta()];
        for _ in 0..n {
            fwd.push(rk4(*fwd.last().unwrap(), dz));
            bwd.push(rk4(*bwd.last().unwrap(), -dz));
        }
        bwd.reverse();
        bwd.pop();
        bwd.extend(fwd);
        let dh = bwd.iter().map(|&y| f(y)).collect();
        ProfileOde { z0: -(n as f64) * dz, dz, h: bwd, dh }
    }

    fn z_max(&self) -> f64 {
        self.z0 + (self.h.len() - 1) as f64 * self.dz
    }

    fn eval(&self, z: f64) -> f64 {
        let x = ((z - self.z0) / self.dz).clamp(0.0, (self.h.len() - 1) as f64);
        let j = (x.floor() as usize).min(self.h.len() - 2);
        let t = x - j as f64;
        let (y0, y1) = (self.h[j], self.h[j + 1]);
        let (m0, m1) = (self.dh[j] * self.dz, self.dh[j + 1] * self.dz);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
    }
}

/// `K (2r*) e^{2 r* |f'|}` with `K = Σ_{i≠0} L_i`.
pub fn supersolution_threshold(spec: &NonlinearitySpec) -> f64 {
    let lip = spec.lipschitz_data();
    let r_star = spec.r_star();
    lip.neighbor_sum() * 2.0 * r_star * (2.0 * r_star * lip.f_prime_sup).exp()
}

/// Checks the large-velocity supersolution `h_ε(z) = h_0(a_ε z)`,
/// `a_ε = 1 + Mε`, for `h' = F((h(z + ε r_i))_i)` with `c = 1/ε`:
/// the constant `μ_ε = (1 + K max_i g(ε a_ε r_i)) / a_ε`, `g(b) = |b| e^{|f'| |b|}`,
/// and the pointwise inequality on a grid. `m_override` replaces the
/// threshold value of `M`.
pub fn verify_supersolution(
    spec_normalized: &NonlinearitySpec,
    epsilon: f64,
    m_override: Option<f64>,
) -> Result<SupersolutionReport> {
    let b = spec_normalized.sigma_bounds()?;
    let f0 = spec_normalized.eval_diagonal(0.0);
    let f1 = spec_normalized.eval_diagonal(1.0);
    if b.sigma_plus.abs() > 1e-9 || f0.abs() > 1e-9 || f1.abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "spec is not normalized (sigma+ = {}, f(0) = {f0}, f(1) = {f1})",
            b.sigma_plus
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Precondition(format!("epsilon = {epsilon} not in (0, 1]")));
    }
    let lip = spec_normalized.lipschitz_data();
    let k = lip.neighbor_sum();
    let r_star = spec_normalized.r_star();
    let fp = lip.f_prime_sup;
    let m_threshold = supersolution_threshold(spec_normalized);
    let m = m_override.unwrap_or(m_threshold);
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::Precondition(format!("M = {m} must be positive")));
    }
    let a = 1.0 + m * epsilon;
    if a > 2.0 {
        return Err(Error::Precondition(format!("a_epsilon = {a} exceeds 2")));
    }
    let g = |x: f64| x.abs() * (fp * x.abs()).exp();
    let gmax = spec_normalized.shifts().iter().map(|r| g(epsilon * a * r)).fold(0.0, f64::max);
    let mu = (1.0 + k * gmax) / a;

    let ode = ProfileOde::solve(spec_normalized, 100.0, 1e-3);
    let reach = a * epsilon * r_star;
    let y_lo = ode.z0 + reach;
    let y_hi = ode.z_max() - reach;
    let n = 20_000usize;
    let mut args = vec![0.0; spec_normalized.arity()];
    let mut worst = f64::INFINITY;
    for j in 0..=n {
        // z = y / a runs over the interior of the tabulated range
        let y = y_lo + (y_hi - y_lo) * j as f64 / n as f64;
        let z = y / a;
        for (x, r) in args.iter_mut().zip(spec_normalized.shifts()) {
            *x = ode.eval(a * (z + epsilon * r));
        }
        let lhs = a * spec_normalized.eval_diagonal(ode.eval(y));
        let rhs = spec_normalized.apply(&args);
        worst = worst.min(lhs - rhs);
    }
    Ok(SupersolutionReport {
        epsilon,
        m,
        m_threshold,
        k,
        a_epsilon: a,
        mu_epsilon: mu,
        grid_min_residual: worst,
        passed: mu <= 1.0 && worst >= -TOL_SUPER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::GridParams;

    fn fk(beta: f64) -> NonlinearitySpec {
        NonlinearitySpec::frenkel_kontorova(beta).unwrap()
    }

    fn small() -> VelocityConfig {
        VelocityConfig {
            evolution: EvolutionConfig {
                grid: GridParams { h: 0.05, half_width: 30.0 },
                t_end: 60.0,
                recenter: true,
                ..Default::default()
            },
            ..Default::default()
        }
    }

    #[test]
    fn normalized_fk_constants() {
        let n = normalize_to_sigma_plus(&fk(0.7)).unwrap();
        assert_eq!(n.eval_diagonal(0.0), 0.0);
        assert_eq!(n.eval_diagonal(1.0), 0.0);
        let b = n.sigma_bounds().unwrap();
        assert!(b.sigma_plus.abs() < 1e-15);
        assert!((b.sigma_minus + 1.4).abs() < 1e-12);
        for s in [0.1, 0.3, 0.5, 0.8] {
            let expected = 0.7 * (1.0 - (std::f64::consts::TAU * s).cos());
            assert!((n.eval_diagonal(s) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn normalization_of_a_shifted_minimum() {
        let spec = NonlinearitySpec::unchecked(
            vec![0.0, 1.0, -1.0],
            crate::nonlinearity::OperatorKind::AffineLocal {
                coefficients: vec![-2.0, 1.0, 1.0],
                local: crate::nonlinearity::LocalFn::fourier(0.0, vec![-1.0], vec![0.0]).shifted(0.2),
            },
            0.5,
            -0.2,
        );
        assert!(spec.validate().is_ok());
        let n = normalize_to_sigma_plus(&spec).unwrap();
        assert!(n.eval_diagonal(0.0).abs() < 1e-12);
        assert!(n.sigma_bounds().unwrap().sigma_plus.abs() < 1e-12);
        assert!(n.validate().is_ok());
    }

    #[test]
    fn supersolution_constants_from_the_formulas() {
        let n = normalize_to_sigma_plus(&fk(0.1)).unwrap();
        let r = verify_supersolution(&n, 0.01, None).unwrap();
        // Independent evaluation of the threshold and μ_ε.
        let fp = 0.2 * std::f64::consts::PI;
        let m = 2.0 * 2.0 * (2.0 * fp).exp();
        let a = 1.0 + m * 0.01;
        let b = 0.01 * a;
        let mu = (1.0 + 2.0 * b * (fp * b).exp()) / a;
        assert!((r.m - m).abs() < 1e-12);
        assert!((r.m - 14.05).abs() < 0.01);
        assert!((r.mu_epsilon - mu).abs() < 1e-14);
        assert!(r.mu_epsilon <= 1.0);
        assert!(r.grid_min_residual >= -1e-8);
        assert!(r.passed);
    }

    #[test]
    fn supersolution_fails_below_threshold() {
        let n = normalize_to_sigma_plus(&fk(0.1)).unwrap();
        let r = verify_supersolution(&n, 0.01, Some(1.0)).unwrap();
        let fp = 0.2 * std::f64::consts::PI;
        let a = 1.01;
        let mu = (1.0 + 2.0 * 0.01 * a * (fp * 0.01 * a).exp()) / a;
        assert!((r.mu_epsilon - mu).abs() < 1e-14);
        assert!(r.mu_epsilon > 1.0);
        assert!(!r.passed);
    }

    #[test]
    fn mu_tends_to_one_from_below() {
        let n = normalize_to_sigma_plus(&fk(0.1)).unwrap();
        let mut prev = 0.0;
        for eps in [1e-2, 1e-3, 1e-4, 1e-5] {
            let mu = verify_supersolution(&n, eps, None).unwrap().mu_epsilon;
            assert!(mu < 1.0 && mu > prev);
            prev = mu;
        }
        assert!(1.0 - prev < 1e-3);
    }

    #[test]
    fn supersolution_preconditions() {
        let n = normalize_to_sigma_plus(&fk(0.1)).unwrap();
        assert!(matches!(verify_supersolution(&fk(0.1), 0.01, None), Err(Error::Precondition(_))));
        assert!(matches!(verify_supersolution(&n, 1.5, None), Err(Error::Precondition(_))));
        assert!(matches!(verify_supersolution(&n, 0.5, None), Err(Error::Precondition(_))));
    }

    #[test]
    fn ode_profile_connects_zero_to_one() {
        let n = normalize_to_sigma_plus(&fk(0.5)).unwrap();
        let ode = ProfileOde::solve(&n, 100.0, 1e-3);
        assert_eq!(ode.eval(0.0), 0.5);
        assert!(ode.eval(-100.0) < 0.01 && ode.eval(100.0) > 0.99);
        let (z, d) = (3.0, 1e-4);
        let slope = (ode.eval(z + d) - ode.eval(z - d)) / (2.0 * d);
        assert!((slope - n.eval_diagonal(ode.eval(z))).abs() < 1e-7);
    }

    #[test]
    fn pinned_point_at_zero_forcing() {
        let p = velocity_at(&fk(2.0), 0.0, &small()).unwrap();
        assert!(p.pinned);
        assert!(p.c.abs() < 1e-12);
    }

    #[test]
    fn out_of_range_sigma() {
        assert!(matches!(velocity_at(&fk(2.0), 2.0, &small()), Err(Error::Domain(_))));
        assert!(matches!(sweep_diagram(&fk(2.0), &[0.0, 3.0], &small()), Err(Error::Domain(_))));
    }

    #[test]
    fn integral_identity_rejects_non_zero_sum() {
        let spec = NonlinearitySpec::unchecked(
            vec![0.0, 1.0],
            crate::nonlinearity::OperatorKind::AffineLocal {
                coefficients: vec![-0.5, 1.0],
                local: crate::nonlinearity::LocalFn::fourier(0.0, vec![-1.0], vec![]),
            },
            0.5,
            0.0,
        );
        let grid = GridParams { h: 0.5, half_width: 1.0 };
        let u = GridProfile::from_fn(&grid, 0.0, 1.0, |z| z);
        let p = DiagramPoint {
            sigma: 0.0,
            c: 0.0,
            stderr: 0.0,
            pinned: true,
            m_sigma: 0.0,
            b_sigma: 0.0,
            failure: None,
        };
        assert!(matches!(integral_identity(&p, &u, &spec), Err(Error::Unsupported(_))));
    }

    #[test]
    fn pinned_profile_balances_the_integral() {
        let run = run_wave(&fk(2.0), 0.5, &small()).unwrap();
        let r = integral_identity(&run.point, &run.profile, &fk(2.0)).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn synthetic_slope_bound_passes() {
        let k_mono = 0.5;
        let points = linspace(0.1, 1.9, 10)
            .into_iter()
            .map(|s| DiagramPoint {
                sigma: s,
                c: s,
                stderr: 0.0,
                pinned: false,
                m_sigma: 0.0,
                b_sigma: 0.0,
                failure: None,
            })
            .collect();
        let d = Diagram { points, plateau: None, k_mono, critical: None };
        let r = check_slope_bound(&d);
        assert!(r.applicable);
        assert_eq!(r.violations(), 0);
    }

    #[test]
    fn plateau_rows_hold_trivially() {
        let points = linspace(-0.5, 0.5, 6)
            .into_iter()
            .map(|s| DiagramPoint {
                sigma: s,
                c: 0.0,
                stderr: 0.0,
                pinned: true,
                m_sigma: 0.0,
                b_sigma: 0.0,
                failure: None,
            })
            .collect();
        let d = Diagram { points, plateau: None, k_mono: 0.2, critical: None };
        let r = check_slope_bound(&d);
        assert!(!r.applicable);
        assert_eq!(r.checks.len(), 5);
        assert_eq!(r.violations(), 0);
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(-1.9, 1.9, 41);
        assert_eq!(g.len(), 41);
        assert_eq!(g[0], -1.9);
        assert_eq!(g[40], 1.9);
        assert!((g[20]).abs() < 1e-15);
    }
}
