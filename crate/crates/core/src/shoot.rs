//! Shooting for positive radial solutions of
//! u″ + (n−1)u′/t + f(t)|u|^{4/(n−2)}u + μu = 0, u′(0) = 0, u(1) = 0.

use rayon::prelude::*;
use serde::Serialize;

use crate::bubble::ProblemSpec;
use crate::error::{Error, Result};
use crate::numerics::{solve_ivp_with, IvpOptions, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootOptions {
    pub rtol: f64,
    /// Starting radius; `None` picks min(1e−4, 1e−2·α^{−2/(n−2)}).
    pub eps: Option<f64>,
    /// Ratio between consecutive α in the sweep.
    pub sweep_factor: f64,
    pub bisection_steps: usize,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self { rtol: 1e-11, eps: None, sweep_factor: 1.5, bisection_steps: 200 }
    }
}

fn power(spec: &ProblemSpec) -> f64 {
    spec.consts.critical_power()
}

/// Start radius scaled to the concentration length α^{−2/(n−2)}.
pub fn start_radius(spec: &ProblemSpec, alpha: f64, opts: &ShootOptions) -> f64 {
    opts.eps
        .unwrap_or_else(|| 1e-4f64.min(1e-2 * alpha.powf(-2.0 / (spec.n() as f64 - 2.0))))
}

/// Taylor coefficients (b, c) of u = α + bt² + ct⁴ near the origin.
fn series_coefficients(spec: &ProblemSpec, alpha: f64) -> (f64, f64) {
    let nf = spec.n() as f64;
    let p = power(spec);
    let k = &spec.kspec;
    let b = -(k.f0 * alpha.powf(p) + spec.mu * alpha) / (2.0 * nf);
    let k2 = k.eta * k.f1.coefficient(2);
    let c = -(k.f0 * p * alpha.powf(p - 1.0) * b + k2 * alpha.powf(p) + spec.mu * b)
        / (4.0 * (nf + 2.0));
    (b, c)
}

/// u and u′ from the origin series at radius t.
pub fn series_state(spec: &ProblemSpec, alpha: f64, t: f64) -> [f64; 2] {
    let (b, c) = series_coefficients(spec, alpha);
    let t2 = t * t;
    [alpha + b * t2 + c * t2 * t2, 2.0 * b * t + 4.0 * c * t2 * t]
}

fn nonlinearity(spec: &ProblemSpec, t: f64, u: f64) -> f64 {
    let p = power(spec);
    spec.kspec.value(t) * u.abs().powf(p - 1.0) * u + spec.mu * u
}

/// (n−1)u′/t and the source term, whose sum is −u″.
fn ode_terms(spec: &ProblemSpec, t: f64, u: f64, du: f64) -> (f64, f64) {
    ((spec.n() as f64 - 1.0) / t * du, nonlinearity(spec, t, u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    pub alpha: f64,
    pub eps: f64,
    pub trajectory: Trajectory,
    /// First zero of u in (ε, 1].
    pub first_zero: Option<f64>,
}

impl Shot {
    pub fn u_at_one(&self) -> f64 {
        self.trajectory.final_state()[0]
    }
}

/// Integrates from the series start to t = 1, recording the first zero of u.
pub fn integrate_profile(spec: &ProblemSpec, alpha: f64, opts: &ShootOptions) -> Result<Shot> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let eps = start_radius(spec, alpha, opts);
    let y0 = series_state(spec, alpha, eps);
    let mut ivp = IvpOptions::with_tol(opts.rtol);
    ivp.atol = opts.rtol * 1e-6 * alpha.min(1.0);
    ivp.event_component = Some(0);
    let trajectory = solve_ivp_with(
        |t, y, dy| {
            let (a, b) = ode_terms(spec, t, y[0], y[1]);
            dy[0] = y[1];
            dy[1] = -a - b;
        },
        eps,
        &y0,
        1.0,
        &ivp,
    )?;
    let first_zero = trajectory.event.as_ref().map(|e| e.t);
    Ok(Shot { alpha, eps, trajectory, first_zero })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub u: f64,
    pub du: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialSolution {
    pub alpha: f64,
    /// Radius below which u is given by the origin series.
    pub eps: f64,
    pub samples: Vec<Sample>,
    /// max |u″ − field| on a 10× refined grid, relative to the largest term.
    pub residual: f64,
    pub boundary_defect: f64,
    /// min u over [0, 1 − 10⁻⁶].
    pub interior_min: f64,
    #[serde(skip)]
    pub(crate) trajectory: Trajectory,
    #[serde(skip)]
    pub(crate) spec: ProblemSpec,
}

impl RadialSolution {
    pub fn from_shot(spec: &ProblemSpec, shot: Shot) -> Self {
        let tr = &shot.trajectory;
        let mut samples = vec![Sample { t: 0.0, u: shot.alpha, du: 0.0 }];
        samples.extend(
            tr.t.iter()
                .zip(&tr.states)
                .map(|(&t, s)| Sample { t, u: s[0], du: s[1] }),
        );
        let fine = refined_grid(tr.breakpoints(), 10);
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for &t in &fine {
            let y = tr.eval(t);
            let dy = tr.eval_derivative(t);
            let (a, b) = ode_terms(spec, t, y[0], y[1]);
            worst = worst.max((dy[1] + a + b).abs());
            scale = scale.max(a.abs() + b.abs());
        }
        let interior_min = fine
            .iter()
            .filter(|&&t| t <= 1.0 - 1e-6)
            .map(|&t| tr.eval(t)[0])
            .fold(f64::INFINITY, f64::min);
        Self {
            alpha: shot.alpha,
            eps: shot.eps,
            samples,
            residual: worst / scale.max(f64::MIN_POSITIVE),
            boundary_defect: shot.u_at_one().abs(),
            interior_min,
            trajectory: shot.trajectory,
            spec: spec.clone(),
        }
    }

    /// (u, u′) at t ∈ [0, 1].
    pub fn state(&self, t: f64) -> [f64; 2] {
        if t < self.eps {
            series_state(&self.spec, self.alpha, t)
        } else {
            let y = self.trajectory.eval(t);
            [y[0], y[1]]
        }
    }

    /// Accepted step boundaries, useful as quadrature breakpoints.
    pub fn breakpoints(&self) -> &[f64] {
        self.trajectory.breakpoints()
    }

    pub fn u_prime_at_one(&self) -> f64 {
        self.trajectory.final_state()[1]
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }
}

fn refined_grid(breaks: &[f64], per_step: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(breaks.len() * per_step);
    for w in breaks.windows(2) {
        for k in 0..per_step {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / per_step as f64);
        }
    }
    if let Some(&last) = breaks.last() {
        out.push(last);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub alpha: f64,
    pub first_zero: Option<f64>,
    pub u_at_one: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepDiagnostics {
    pub points: Vec<SweepPoint>,
    /// The zero-before-1 indicator switches at most once along the sweep.
    pub monotone: bool,
    /// Consecutive α pairs where the first zero crosses t = 1.
    pub brackets: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GroundState {
    Found { solution: Box<RadialSolution>, sweep: SweepDiagnostics },
    /// No sign change of u(1) along the sweep. Numerical evidence only.
    NotFound { sweep: SweepDiagnostics },
}

impl GroundState {
    pub fn sweep(&self) -> &SweepDiagnostics {
        match self {
            GroundState::Found { sweep, .. } | GroundState::NotFound { sweep } => sweep,
        }
    }

    pub fn solution(&self) -> Option<&RadialSolution> {
        match self {
            GroundState::Found { solution, .. } => Some(solution),
            GroundState::NotFound { .. } => None,
        }
    }
}

fn sweep_alphas(lo: f64, hi: f64, factor: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi * (1.0 - 1e-12) {
        out.push(a);
        a *= factor;
    }
    out.push(hi);
    out
}

/// Geometric α sweep, then bisection on "first zero ≤ 1" inside the first
/// bracket. The returned solution is the last iterate without a zero in (0, 1).
pub fn find_ground_state(
    spec: &ProblemSpec,
    alpha_min: f64,
    alpha_max: f64,
    opts: &ShootOptions,
) -> Result<GroundState> {
    if !(alpha_min > 0.0 && alpha_max > alpha_min) || !alpha_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "need 0 < alpha_min < alpha_max, got [{alpha_min}, {alpha_max}]"
        )));
    }
    if !(opts.sweep_factor > 1.0) {
        return Err(Error::InvalidParameter("sweep factor must exceed 1".into()));
    }
    let alphas = sweep_alphas(alpha_min, alpha_max, opts.sweep_factor);
    let points = alphas
        .par_iter()
        .map(|&alpha| {
            let s = integrate_profile(spec, alpha, opts)?;
            Ok(SweepPoint { alpha, first_zero: s.first_zero, u_at_one: s.u_at_one() })
        })
        .collect::<Result<Vec<_>>>()?;
    let hit = |p: &SweepPoint| p.first_zero.is_some();
    let mut brackets = Vec::new();
    let mut switches = 0;
    for w in points.windows(2) {
        if hit(&w[0]) != hit(&w[1]) {
            switches += 1;
            if !hit(&w[0]) {
                brackets.push((w[0].alpha, w[1].alpha));
            }
        }
    }
    let monotone = switches <= 1 && !(switches == 1 && hit(&points[0]));
    let sweep = SweepDiagnostics { points, monotone, brackets };
    let Some(&(mut lo, mut hi)) = sweep.brackets.first() else {
        return Ok(GroundState::NotFound { sweep });
    };
    let mut best = integrate_profile(spec, lo, opts)?;
    for _ in 0..opts.bisection_steps {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let s = integrate_profile(spec, mid, opts)?;
        if s.first_zero.is_some() {
            hi = mid;
        } else {
            lo = mid;
            best = s;
        }
    }
    let solution = RadialSolution::from_shot(spec, best);
    Ok(GroundState::Found { solution: Box::new(solution), sweep })
}
