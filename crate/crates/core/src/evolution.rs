//! Monotone explicit Euler scheme for `u_t = F((u(·+r_i))_i) + σ` on a
//! uniform grid.
//!
//! Shifts that are not grid multiples are read by linear interpolation, whose
//! weights are nonnegative, so the update is non-decreasing in every stencil
//! value whenever `dt ≤ dt_max`. Cells outside the grid read the exact limits.

use crate::error::{Error, Result};
use crate::fronts::{front_position, FrontTrace};
use crate::nonlinearity::{EquilibriumPair, NonlinearitySpec};

/// Safety factor applied to the monotonicity limit `1 / L_eff`.
pub const DT_SAFETY: f64 = 0.9;
const SNAP: f64 = 1e-9;
const TARGET_SAMPLES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub h: f64,
    pub half_width: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams { h: 0.05, half_width: 100.0 }
    }
}

impl GridParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::Config(format!("grid spacing must be positive, got {}", self.h)));
        }
        if !(self.half_width.is_finite() && self.half_width >= 2.0 * self.h) {
            return Err(Error::Config(format!(
                "domain half width {} too small for h = {}",
                self.half_width, self.h
            )));
        }
        Ok(())
    }

    /// Samples `z_j = −W + j h` for `j = 0..=2W/h`.
    pub fn len(&self) -> usize {
        (2.0 * self.half_width / self.h).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn z_left(&self) -> f64 {
        -self.half_width
    }
}

/// Sampled profile with ghost values for reads beyond either end.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProfile {
    pub z_left: f64,
    pub h: f64,
    pub values: Vec<f64>,
    pub left_limit: f64,
    pub right_limit: f64,
}

impl GridProfile {
    pub fn from_fn(grid: &GridParams, left_limit: f64, right_limit: f64, u: impl Fn(f64) -> f64) -> Self {
        let z_left = grid.z_left();
        let values = (0..grid.len()).map(|j| u(z_left + j as f64 * grid.h)).collect();
        GridProfile { z_left, h: grid.h, values, left_limit, right_limit }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn z(&self, j: usize) -> f64 {
        self.z_left + j as f64 * self.h
    }

    pub fn z_right(&self) -> f64 {
        self.z(self.values.len().saturating_sub(1))
    }

    /// `values[j+1] ≥ values[j] − tol` and the limits bracket the samples.
    pub fn is_monotone(&self, tol: f64) -> bool {
        let inner = self.values.windows(2).all(|w| w[1] >= w[0] - tol);
        let ends = match (self.values.first(), self.values.last()) {
            (Some(a), Some(b)) => self.left_limit <= a + tol && *b <= self.right_limit + tol,
            _ => true,
        };
        inner && ends
    }

    /// Value at index `j`, extended by the limits.
    #[inline]
    pub fn at(&self, j: isize) -> f64 {
        if j < 0 {
            self.left_limit
        } else if j as usize >= self.values.len() {
            self.right_limit
        } else {
            self.values[j as usize]
        }
    }

    /// Moves the sampling window `k` cells to the right, keeping the
    /// underlying function: the new `values[j]` is the old `values[j + k]`.
    pub fn recenter_cells(&mut self, k: isize) {
        if k == 0 {
            return;
        }
        let n = self.values.len() as isize;
        let shifted: Vec<f64> = (0..n).map(|j| self.at(j + k)).collect();
        self.values = shifted;
        self.z_left += k as f64 * self.h;
    }

    /// The profile translated by `k` cells in `z` on the same grid:
    /// `new(z) = old(z − k h)`.
    pub fn translated_cells(&self, k: isize) -> Self {
        let n = self.values.len() as isize;
        GridProfile {
            values: (0..n).map(|j| self.at(j - k)).collect(),
            ..self.clone()
        }
    }

    pub fn plus_constant(&self, c: f64) -> Self {
        GridProfile {
            values: self.values.iter().map(|v| v + c).collect(),
            left_limit: self.left_limit + c,
            right_limit: self.right_limit + c,
            ..self.clone()
        }
    }
}

/// Discretized shifts: `u(z_j + s_i) ≈ (1 − t_i) u_{j+k_i} + t_i u_{j+k_i+1}`,
/// with `s_i = scale · r_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftStencil {
    pub offsets: Vec<isize>,
    pub weights: Vec<f64>,
    pub h: f64,
    /// Bound on the negative part of the diagonal coefficient of the update.
    pub l_eff: f64,
}

impl ShiftStencil {
    /// `DT_SAFETY / L_eff`.
    pub fn dt_max(&self) -> f64 {
        if self.l_eff > 0.0 {
            DT_SAFETY / self.l_eff
        } else {
            DT_SAFETY
        }
    }

    /// Ghost cells needed on each side.
    pub(crate) fn pad(&self) -> usize {
        self.offsets
            .iter()
            .map(|k| k.unsigned_abs().max((k + 1).unsigned_abs()))
            .max()
            .unwrap_or(0)
            + 1
    }

    /// In-place Euler update of `n` cells whose stencil reads come from
    /// `padded`, where `padded[pad + j]` holds cell `j`.
    pub(crate) fn apply_padded(
        &self,
        spec: &NonlinearitySpec,
        sigma: f64,
        dt: f64,
        padded: &[f64],
        out: &mut [f64],
    ) {
        let pad = self.pad() as isize;
        let arity = self.offsets.len();
        let mut args = [0.0f64; 16];
        let mut heap = Vec::new();
        let args: &mut [f64] = if arity <= args.len() {
            &mut args[..arity]
        } else {
            heap.resize(arity, 0.0);
            &mut heap
        };
        for (j, o) in out.iter_mut().enumerate() {
            let base = j as isize + pad;
            for (i, a) in args.iter_mut().enumerate() {
                let idx = (base + self.offsets[i]) as usize;
                let t = self.weights[i];
                *a = if t == 0.0 { padded[idx] } else { (1.0 - t) * padded[idx] + t * padded[idx + 1] };
            }
            *o = args[0] + dt * (spec.apply(args) + sigma);
        }
    }
}

pub fn build_stencil(spec: &NonlinearitySpec, h: f64) -> ShiftStencil {
    build_stencil_scaled(spec, h, 1.0)
}

/// Stencil for reads at `z + scale · r_i`.
pub fn build_stencil_scaled(spec: &NonlinearitySpec, h: f64, scale: f64) -> ShiftStencil {
    let mut offsets = Vec::with_capacity(spec.arity());
    let mut weights = Vec::with_capacity(spec.arity());
    for r in spec.shifts() {
        let q = scale * r / h;
        let (k, t) = if (q - q.round()).abs() < SNAP {
            (q.round() as isize, 0.0)
        } else {
            let k = q.floor();
            (k as isize, q - k)
        };
        offsets.push(k);
        weights.push(t);
    }
    let lip = spec.lipschitz_data();
    let mut overlap = 0.0;
    for i in 1..offsets.len() {
        let w = match offsets[i] {
            0 => 1.0 - weights[i],
            -1 => weights[i],
            _ => 0.0,
        };
        overlap += lip.neighbor[i] * w;
    }
    let l_eff = (-lip.center_lower + overlap).max(0.0);
    ShiftStencil { offsets, weights, h, l_eff }
}

pub fn dt_max(spec: &NonlinearitySpec, h: f64) -> f64 {
    build_stencil(spec, h).dt_max()
}

fn check_dt(dt: f64, stencil: &ShiftStencil) -> Result<()> {
    let limit = stencil.dt_max();
    if !(dt.is_finite() && dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::Config(format!(
            "dt = {dt} violates the monotonicity bound dt <= {limit}"
        )));
    }
    Ok(())
}

/// Reusable padded buffer for repeated steps.
#[derive(Debug, Default)]
pub(crate) struct StepBuffer {
    padded: Vec<f64>,
}

impl StepBuffer {
    fn advance(
        &mut self,
        u: &mut GridProfile,
        spec: &NonlinearitySpec,
        sigma: f64,
        dt: f64,
        stencil: &ShiftStencil,
    ) {
        let pad = stencil.pad();
        let n = u.values.len();
        self.padded.clear();
        self.padded.resize(pad, u.left_limit);
        self.padded.extend_from_slice(&u.values);
        self.padded.resize(n + 2 * pad, u.right_limit);
        stencil.apply_padded(spec, sigma, dt, &self.padded, &mut u.values);
    }
}

/// One Euler step `u_j + dt · (F(neighborhood) + σ)`.
pub fn step(
    u: &GridProfile,
    spec: &NonlinearitySpec,
    sigma: f64,
    dt: f64,
    stencil: &ShiftStencil,
) -> Result<GridProfile> {
    check_dt(dt, stencil)?;
    let mut next = u.clone();
    StepBuffer::default().advance(&mut next, spec, sigma, dt, stencil);
    Ok(next)
}

/// `m_σ + 1/(1 + e^{−4z})`.
pub fn initial_front(pair: &EquilibriumPair, grid: &GridParams) -> GridProfile {
    let m = pair.m_sigma;
    GridProfile::from_fn(grid, m, m + 1.0, |z| m + 1.0 / (1.0 + (-4.0 * z).exp()))
}

/// `m_σ + clamp((z + 1)/2, 0, 1)`.
pub fn initial_ramp(pair: &EquilibriumPair, grid: &GridParams) -> GridProfile {
    let m = pair.m_sigma;
    GridProfile::from_fn(grid, m, m + 1.0, |z| m + ((z + 1.0) / 2.0).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionConfig {
    pub grid: GridParams,
    /// `None` uses `dt_max`.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub recenter: bool,
    /// `None` aims for about 400 trace samples.
    pub record_every: Option<usize>,
    /// Accumulate `∫ Σ_j (F(u_j, …, u_j) + σ) h dt` into [`FrontTrace::mass`].
    pub track_mass: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            grid: GridParams::default(),
            dt: None,
            t_end: 200.0,
            recenter: false,
            record_every: None,
            track_mass: false,
        }
    }
}

impl EvolutionConfig {
    /// Step size and step count that land exactly on `t_end`.
    pub fn schedule(&self, stencil: &ShiftStencil) -> Result<(f64, usize, usize)> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.t_end)));
        }
        let dt_req = self.dt.unwrap_or_else(|| stencil.dt_max());
        check_dt(dt_req, stencil)?;
        let steps = (self.t_end / dt_req).ceil().max(1.0) as usize;
        let dt = self.t_end / steps as f64;
        let every = match self.record_every {
            Some(0) => return Err(Error::Config("record_every must be positive".into())),
            Some(k) => k,
            None => (steps / TARGET_SAMPLES).max(1),
        };
        Ok((dt, steps, every))
    }
}

/// Runs the scheme to `t_end`, recording the phase `ξ = −(crossing of the
/// midlevel)` every `record_every` steps, so a wave `φ(z + ct)` has `ξ ≈ ct`.
pub fn evolve(
    u0: &GridProfile,
    spec: &NonlinearitySpec,
    sigma: f64,
    config: &EvolutionConfig,
) -> Result<(GridProfile, FrontTrace)> {
    let stencil = build_stencil(spec, u0.h);
    let (dt, steps, every) = config.schedule(&stencil)?;
    let level = 0.5 * (u0.left_limit + u0.right_limit);
    let mut u = u0.clone();
    let z_origin = u.z_left;
    let mut offset: isize = 0;
    let margin = 2.0 * spec.r_star();
    let mut trace = FrontTrace::new(level, u.h);
    let mut buffer = StepBuffer::default();
    let n = u.len() as isize;

    let mut mass = 0.0;
    let record = |u: &mut GridProfile, offset: &mut isize, t: f64, mass: f64, trace: &mut FrontTrace| -> Result<()> {
        let pos = front_position(u, level)?;
        trace.push(t, -pos);
        if config.track_mass {
            trace.mass.push(mass);
        }
        let width = (n - 1) as f64 * u.h;
        let rel = pos - u.z_left;
        if config.recenter {
            if rel < width / 3.0 || rel > 2.0 * width / 3.0 {
                let k = ((rel - width / 2.0) / u.h).round() as isize;
                u.recenter_cells(k);
                *offset += k;
                u.z_left = z_origin + *offset as f64 * u.h;
                trace.shift_accum = *offset as f64 * u.h;
            }
        } else if rel < margin || width - rel < margin {
            return Err(Error::DomainExhausted { t, position: pos, margin });
        }
        Ok(())
    };

    record(&mut u, &mut offset, 0.0, mass, &mut trace)?;
    for s in 1..=steps {
        if config.track_mass {
            // Left endpoint, so the sum matches the Euler update exactly.
            mass += dt * u.h * u.values.iter().map(|&x| spec.eval_diagonal(x) + sigma).sum::<f64>();
        }
        buffer.advance(&mut u, spec, sigma, dt, &stencil);
        if s.is_multiple_of(every) || s == steps {
            record(&mut u, &mut offset, s as f64 * dt, mass, &mut trace)?;
        }
    }
    Ok((u, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::{LocalFn, NonlinearitySpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fk(beta: f64) -> NonlinearitySpec {
        NonlinearitySpec::frenkel_kontorova(beta).unwrap()
    }

    fn one_shift(r: f64, h: f64) -> (isize, f64) {
        let spec = NonlinearitySpec::affine_local(
            vec![0.0, r],
            vec![-1.0, 1.0],
            LocalFn::fourier(0.0, vec![-1.0], vec![0.0]),
            0.5,
        )
        .unwrap();
        let s = build_stencil(&spec, h);
        (s.offsets[1], s.weights[1])
    }

    #[test]
    fn stencil_offsets_and_weights() {
        assert_eq!(one_shift(1.0, 0.25), (4, 0.0));
        let (k, t) = one_shift(0.3, 0.25);
        assert_eq!(k, 1);
        assert!((t - 0.2).abs() < 1e-12);
        assert_eq!(one_shift(-1.0, 0.5), (-2, 0.0));
        let (k, t) = one_shift(-0.3, 0.25);
        assert_eq!(k, -2);
        assert!((t - 0.8).abs() < 1e-12);
    }

    #[test]
    fn interpolated_read_is_exact_on_linear_data() {
        let spec = NonlinearitySpec::unchecked(
            vec![0.0, 0.37],
            crate::nonlinearity::OperatorKind::AffineLocal {
                coefficients: vec![-1.0, 1.0],
                local: LocalFn::fourier(0.0, vec![], vec![]),
            },
            0.5,
            0.0,
        );
        let grid = GridParams { h: 0.1, half_width: 5.0 };
        let u = GridProfile::from_fn(&grid, -5.0, 5.0, |z| z);
        let st = build_stencil(&spec, grid.h);
        let next = step(&u, &spec, 0.0, 0.5, &st).unwrap();
        // u_t = u(z + 0.37) − u(z) = 0.37 away from the right edge
        for j in 0..90 {
            assert!((next.values[j] - u.values[j] - 0.5 * 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn fk_dt_max() {
        let s = build_stencil(&fk(2.0), 0.05);
        assert!((s.l_eff - (2.0 + 4.0 * std::f64::consts::PI)).abs() < 1e-12);
        assert!((s.dt_max() - 0.9 / s.l_eff).abs() < 1e-15);
        assert_eq!(s.offsets, vec![0, 20, -20]);
    }

    #[test]
    fn step_refuses_large_dt() {
        let spec = fk(2.0);
        let grid = GridParams { h: 0.05, half_width: 5.0 };
        let pair = spec.equilibria(0.0).unwrap();
        let u = initial_front(&pair, &grid);
        let st = build_stencil(&spec, grid.h);
        assert!(matches!(step(&u, &spec, 0.0, 2.0 * st.dt_max(), &st), Err(Error::Config(_))));
    }

    #[test]
    fn equilibria_are_fixed_points() {
        let spec = fk(2.0);
        let grid = GridParams { h: 0.05, half_width: 3.0 };
        let st = build_stencil(&spec, grid.h);
        for sigma in [-1.5, 0.0, 0.7] {
            let p = spec.equilibria(sigma).unwrap();
            for v in [p.m_sigma, p.b_sigma, p.m_sigma + 1.0] {
                let u = GridProfile::from_fn(&grid, v, v, |_| v);
                let next = step(&u, &spec, sigma, st.dt_max(), &st).unwrap();
                for (a, b) in next.values.iter().zip(&u.values) {
                    assert!((a - b).abs() <= 1e-14);
                }
            }
        }
    }

    #[test]
    fn normalized_zero_is_fixed() {
        let spec = fk(1.0).translated(0.0, 1.0);
        let grid = GridParams { h: 0.05, half_width: 3.0 };
        let st = build_stencil(&spec, grid.h);
        let u = GridProfile::from_fn(&grid, 0.0, 0.0, |_| 0.0);
        let next = step(&u, &spec, 0.0, st.dt_max(), &st).unwrap();
        assert!(next.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn initial_front_shape() {
        let spec = fk(2.0);
        let pair = spec.equilibria(0.0).unwrap();
        let grid = GridParams::default();
        let u = initial_front(&pair, &grid);
        let mid = grid.len() / 2;
        assert!(u.z(mid).abs() < 1e-12);
        assert!((u.values[mid] - (pair.m_sigma + 0.5)).abs() < 1e-15);
        for j in 0..u.len() {
            if u.z(j) <= -4.0 {
                assert!(u.values[j] - pair.m_sigma < 1e-6);
            }
        }
        assert!(u.is_monotone(0.0));
        assert!(initial_ramp(&pair, &grid).is_monotone(0.0));
    }

    #[test]
    fn translation_by_one_cell_shifts_trace_by_h() {
        let spec = fk(2.0);
        let sigma = 1.8;
        let pair = spec.equilibria(sigma).unwrap();
        let grid = GridParams { h: 0.05, half_width: 30.0 };
        let cfg = EvolutionConfig { grid, t_end: 10.0, ..Default::default() };
        let u0 = initial_front(&pair, &grid);
        let (_, a) = evolve(&u0, &spec, sigma, &cfg).unwrap();
        let (_, b) = evolve(&u0.translated_cells(1), &spec, sigma, &cfg).unwrap();
        assert_eq!(a.samples.len(), b.samples.len());
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert_eq!(x.0, y.0);
            // ξ is minus the crossing, which moved right by h
            assert!((x.1 - y.1 - grid.h).abs() < 1e-9, "{} vs {}", x.1, y.1);
        }
    }

    #[test]
    fn periodicity_equivariance() {
        let spec = fk(2.0);
        let sigma = 0.5;
        let pair = spec.equilibria(sigma).unwrap();
        let grid = GridParams { h: 0.05, half_width: 20.0 };
        let cfg = EvolutionConfig { grid, t_end: 5.0, ..Default::default() };
        let u0 = initial_front(&pair, &grid);
        let (a, _) = evolve(&u0, &spec, sigma, &cfg).unwrap();
        let (b, _) = evolve(&u0.plus_constant(1.0), &spec, sigma, &cfg).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x + 1.0 - y).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_exhaustion_without_recentering() {
        let spec = fk(2.0);
        let sigma = 1.9;
        let pair = spec.equilibria(sigma).unwrap();
        let grid = GridParams { h: 0.05, half_width: 5.0 };
        let cfg = EvolutionConfig { grid, t_end: 100.0, ..Default::default() };
        let u0 = initial_front(&pair, &grid);
        assert!(matches!(evolve(&u0, &spec, sigma, &cfg), Err(Error::DomainExhausted { .. })));
        let cfg = EvolutionConfig { recenter: true, ..cfg };
        let (_, trace) = evolve(&u0, &spec, sigma, &cfg).unwrap();
        assert!(trace.shift_accum < 0.0);
        let last = trace.samples.last().unwrap().1;
        assert!(last > 5.0);
    }

    #[test]
    fn recentering_is_exact_when_far_from_the_window_edge() {
        let spec = fk(2.0);
        let sigma = 1.8;
        let pair = spec.equilibria(sigma).unwrap();
        let grid = GridParams { h: 0.05, half_width: 60.0 };
        let base = EvolutionConfig { grid, t_end: 20.0, ..Default::default() };
        let u0 = initial_front(&pair, &grid);
        let (_, a) = evolve(&u0, &spec, sigma, &base).unwrap();
        let (_, b) = evolve(&u0, &spec, sigma, &EvolutionConfig { recenter: true, ..base }).unwrap();
        for (x, y) in a.samples.iter().zip(&b.samples) {
            assert!((x.1 - y.1).abs() < 1e-9);
        }
    }

    fn random_pair(rng: &mut ChaCha8Rng, grid: &GridParams, m: f64) -> (GridProfile, GridProfile) {
        let shift: f64 = rng.gen_range(-3.0..3.0);
        let u = GridProfile::from_fn(grid, m, m + 1.0, |z| m + 1.0 / (1.0 + (-2.0 * (z - shift)).exp()));
        let mut u = u;
        for v in u.values.iter_mut() {
            *v += rng.gen_range(-0.05..0.05);
        }
        let mut w = u.clone();
        for v in w.values.iter_mut() {
            *v += rng.gen_range(0.0..0.2);
        }
        (u, w)
    }

    #[test]
    fn comparison_is_preserved_for_random_pairs() {
        let spec = fk(2.0);
        let sigma = 0.5;
        let m = spec.equilibria(sigma).unwrap().m_sigma;
        let grid = GridParams { h: 0.05, half_width: 8.0 };
        let st = build_stencil(&spec, grid.h);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (mut u, mut w) = random_pair(&mut rng, &grid, m);
            for _ in 0..50 {
                u = step(&u, &spec, sigma, st.dt_max(), &st).unwrap();
                w = step(&w, &spec, sigma, st.dt_max(), &st).unwrap();
            }
            assert!(u.values.iter().zip(&w.values).all(|(a, b)| a <= &(b + 1e-12)));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn monotone_profiles_stay_monotone(beta in 0.3f64..3.0, sigma_frac in -0.95f64..0.95, steps in 1usize..60) {
            let spec = fk(beta);
            let sigma = sigma_frac * beta;
            let pair = spec.equilibria(sigma).unwrap();
            let grid = GridParams { h: 0.1, half_width: 6.0 };
            let st = build_stencil(&spec, grid.h);
            let mut u = initial_ramp(&pair, &grid);
            for _ in 0..steps {
                u = step(&u, &spec, sigma, st.dt_max(), &st).unwrap();
            }
            prop_assert!(u.is_monotone(1e-12));
        }

        #[test]
        fn fractional_shift_scheme_is_monotone(r in 0.05f64..1.5, sigma_frac in -0.9f64..0.9, seed in 0u64..1000) {
            let spec = NonlinearitySpec::affine_local(
                vec![0.0, r, -r],
                vec![-2.0, 1.0, 1.0],
                LocalFn::fourier(0.0, vec![-1.0], vec![0.0]),
                0.5,
            ).unwrap();
            let sigma = sigma_frac;
            let m = spec.equilibria(sigma).unwrap().m_sigma;
            let grid = GridParams { h: 0.1, half_width: 5.0 };
            let st = build_stencil(&spec, grid.h);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (mut u, mut w) = random_pair(&mut rng, &grid, m);
            for _ in 0..20 {
                u = step(&u, &spec, sigma, st.dt_max(), &st).unwrap();
                w = step(&w, &spec, sigma, st.dt_max(), &st).unwrap();
            }
            prop_assert!(u.values.iter().zip(&w.values).all(|(a, b)| a <= &(b + 1e-12)));
        }
    }
}
