use crate::error::{Error, Result};

/// Options for [`solve_ivp_with`]. `rtol`/`atol` enter the usual mixed error
/// scale `atol + rtol·max(|y_old|, |y_new|)` per component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IvpOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
    /// Record the first sign change of this state component.
    pub event_component: Option<usize>,
    /// Stop integrating at the recorded event.
    pub terminal_event: bool,
}

impl IvpOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-6,
            initial_step: None,
            max_steps: 500_000,
            event_component: None,
            terminal_event: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t: f64,
    pub state: Vec<f64>,
}

/// Continuous extension of one accepted step (Hairer's DOPRI5 dense output).
#[derive(Debug, Clone, PartialEq)]
struct Segment {
    t0: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

impl Segment {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.r;
        for i in 0..out.len() {
            out[i] = r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
        }
    }

    fn eval_derivative(&self, t: f64, out: &mut [f64]) {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let [_, r2, r3, r4, r5] = &self.r;
        for i in 0..out.len() {
            let tt = r4[i] + s1 * r5[i];
            let rr = r3[i] + s * tt;
            let qq = r2[i] + s1 * rr;
            let dt = -r5[i];
            let dr = tt + s * dt;
            let dq = -rr + s1 * dr;
            out[i] = (qq + s * dq) / self.h;
        }
    }
}

/// Samples at accepted steps plus a dense interpolant between them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub event: Option<Event>,
    segments: Vec<Segment>,
}

impl Trajectory {
    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().expect("trajectory has at least one sample")
    }

    pub fn final_state(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one sample")
    }

    /// Step boundaries, usable as quadrature breakpoints.
    pub fn breakpoints(&self) -> &[f64] {
        &self.t
    }

    fn segment_index(&self, t: f64) -> usize {
        match self.segments.binary_search_by(|s| s.t0.total_cmp(&t)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => (i - 1).min(self.segments.len() - 1),
        }
    }

    /// Dense-output state at `t`, clamped to the integrated range.
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        if self.segments.is_empty() {
            out.copy_from_slice(&self.states[0]);
            return out;
        }
        let t = t.clamp(self.t_start(), self.t_end());
        self.segments[self.segment_index(t)].eval(t, &mut out);
        out
    }

    /// Time derivative of the dense interpolant at `t`.
    pub fn eval_derivative(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        if self.segments.is_empty() {
            return out;
        }
        let t = t.clamp(self.t_start(), self.t_end());
        self.segments[self.segment_index(t)].eval_derivative(t, &mut out);
        out
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrate `y' = field(t, y)` from `t0` to `t1` at tolerance `tol`.
pub fn solve_ivp<F>(field: F, t0: f64, y0: &[f64], t1: f64, tol: f64) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    solve_ivp_with(field, t0, y0, t1, &IvpOptions::with_tol(tol))
}

fn error_norm(y0: &[f64], y1: &[f64], err: &[f64], opts: &IvpOptions) -> f64 {
    let mut acc = 0.0;
    for i in 0..y0.len() {
        let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        acc += (err[i] / sc).powi(2);
    }
    (acc / y0.len() as f64).sqrt()
}

fn initial_step<F>(field: &F, t0: f64, y0: &[f64], f0: &[f64], span: f64, opts: &IvpOptions) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let scale = |i: usize| opts.atol + opts.rtol * y0[i].abs();
    let d0 = (0..dim).map(|i| (y0[i] / scale(i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..dim).map(|i| (f0[i] / scale(i)).powi(2)).sum::<f64>().sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(span);
    let y1: Vec<f64> = (0..dim).map(|i| y0[i] + h0 * f0[i]).collect();
    let mut f1 = vec![0.0; dim];
    field(t0 + h0, &y1, &mut f1);
    let d2 = (0..dim)
        .map(|i| ((f1[i] - f0[i]) / scale(i)).powi(2))
        .sum::<f64>()
        .sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span)
}

/// Adaptive Dormand–Prince 5(4) with dense output and optional first
/// zero-crossing event on one component.
pub fn solve_ivp_with<F>(
    field: F,
    t0: f64,
    y0: &[f64],
    t1: f64,
    opts: &IvpOptions,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidParameter(format!("need finite t0 < t1, got [{t0}, {t1}]")));
    }
    if !(opts.rtol > 0.0) || opts.atol < 0.0 {
        return Err(Error::InvalidParameter("tolerances must be positive".into()));
    }
    if y0.is_empty() || y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("initial state must be finite and nonempty".into()));
    }
    let dim = y0.len();
    let mut traj = Trajectory {
        t: vec![t0],
        states: vec![y0.to_vec()],
        accepted_steps: 0,
        rejected_steps: 0,
        event: None,
        segments: Vec::new(),
    };

    let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; dim]);
    let mut y = y0.to_vec();
    let mut ytmp = vec![0.0; dim];
    let mut ynew = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut t = t0;
    field(t, &y, &mut k[0]);
    let mut h = opts
        .initial_step
        .unwrap_or_else(|| initial_step(&field, t0, &y, &k[0], t1 - t0, opts));
    let mut reject_streak = false;

    while t < t1 {
        if traj.accepted_steps + traj.rejected_steps >= opts.max_steps {
            return Err(Error::IntegrationFailure { t, partial: Box::new(traj) });
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        if h <= 1e-14 * t.abs().max(1e-300) || !h.is_finite() {
            return Err(Error::IntegrationFailure { t, partial: Box::new(traj) });
        }

        let stage = |coef: &[(usize, f64)], ytmp: &mut [f64], k: &[Vec<f64>; 7], y: &[f64]| {
            for i in 0..dim {
                let mut acc = 0.0;
                for &(j, a) in coef {
                    acc += a * k[j][i];
                }
                ytmp[i] = y[i] + h * acc;
            }
        };
        stage(&[(0, A21)], &mut ytmp, &k, &y);
        field(t + C2 * h, &ytmp, &mut k[1]);
        stage(&[(0, A31), (1, A32)], &mut ytmp, &k, &y);
        field(t + C3 * h, &ytmp, &mut k[2]);
        stage(&[(0, A41), (1, A42), (2, A43)], &mut ytmp, &k, &y);
        field(t + C4 * h, &ytmp, &mut k[3]);
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &mut ytmp, &k, &y);
        field(t + C5 * h, &ytmp, &mut k[4]);
        stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &mut ytmp, &k, &y);
        field(t + h, &ytmp, &mut k[5]);
        stage(&[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], &mut ynew, &k, &y);
        field(t + h, &ynew, &mut k[6]);
        for i in 0..dim {
            err[i] = h
                * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i]
                    + E7 * k[6][i]);
        }
        let en = error_norm(&y, &ynew, &err, opts);

        if !en.is_finite() || ynew.iter().any(|v| !v.is_finite()) {
            traj.rejected_steps += 1;
            h *= 0.2;
            reject_streak = true;
            continue;
        }

        if en <= 1.0 {
            let mut r2 = vec![0.0; dim];
            let mut r3 = vec![0.0; dim];
            let mut r4 = vec![0.0; dim];
            let mut r5 = vec![0.0; dim];
            for i in 0..dim {
                r2[i] = ynew[i] - y[i];
                r3[i] = h * k[0][i] - r2[i];
                r4[i] = r2[i] - h * k[6][i] - r3[i];
                r5[i] = h
                    * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i]
                        + D6 * k[5][i]
                        + D7 * k[6][i]);
            }
            let seg = Segment {
                t0: t,
                h,
                r: [y.clone(), r2, r3, r4, r5],
            };
            let t_new = if last { t1 } else { t + h };

            let crossing = opts.event_component.filter(|_| traj.event.is_none()).and_then(|c| {
                let (a, b) = (y[c], ynew[c]);
                if a != 0.0 && (b == 0.0 || (a < 0.0) != (b < 0.0)) {
                    Some(c)
                } else {
                    None
                }
            });
            traj.segments.push(seg);
            traj.accepted_steps += 1;

            if let Some(c) = crossing {
                let seg = traj.segments.last().expect("segment just pushed");
                let tz = super::bisect(
                    |s| {
                        let mut v = vec![0.0; dim];
                        seg.eval(s, &mut v);
                        v[c]
                    },
                    t,
                    t_new,
                );
                let mut buf = vec![0.0; dim];
                seg.eval(tz, &mut buf);
                traj.event = Some(Event { t: tz, state: buf.clone() });
                if opts.terminal_event {
                    // The last segment's polynomial stays valid on [t, tz].
                    if tz > t {
                        traj.t.push(tz);
                        traj.states.push(buf);
                    }
                    return Ok(traj);
                }
            }

            traj.t.push(t_new);
            traj.states.push(ynew.clone());
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            let (first, rest) = k.split_at_mut(6);
            first[0].copy_from_slice(&rest[0]);

            let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, if reject_streak { 1.0 } else { 5.0 });
            h *= fac;
            reject_streak = false;
        } else {
            traj.rejected_steps += 1;
            h *= (0.9 * en.powf(-0.2)).max(0.2);
            reject_streak = true;
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn exponential_growth() {
        let tr = solve_ivp(|_, y, dy| dy[0] = y[0], 0.0, &[1.0], 1.0, 1e-11).unwrap();
        assert!((tr.final_state()[0] - std::f64::consts::E).abs() <= 1e-8);
        assert!(tr.t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn harmonic_oscillator_half_period() {
        let tr = solve_ivp(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            PI,
            1e-11,
        )
        .unwrap();
        assert_relative_eq!(tr.final_state()[0], -1.0, epsilon = 1e-8);
        // Dense output between steps.
        for &s in &[0.3, 1.1, 2.9] {
            assert!((tr.eval(s)[0] - s.cos()).abs() < 1e-8);
            assert!((tr.eval_derivative(s)[0] + s.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn event_locates_first_zero_of_cosine() {
        let mut opts = IvpOptions::with_tol(1e-11);
        opts.event_component = Some(0);
        opts.terminal_event = true;
        let tr = solve_ivp_with(
            |_, y, dy| {
                dy[0] = y[1];
                dy[1] = -y[0];
            },
            0.0,
            &[1.0, 0.0],
            10.0,
            &opts,
        )
        .unwrap();
        let ev = tr.event.as_ref().unwrap();
        assert!((ev.t - PI / 2.0).abs() < 1e-9);
        assert_eq!(tr.t_end(), ev.t);
    }

    #[test]
    fn blow_up_reports_partial_trajectory() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let err = solve_ivp(|_, y, dy| dy[0] = y[0] * y[0], 0.0, &[1.0], 2.0, 1e-10).unwrap_err();
        match err {
            Error::IntegrationFailure { t, partial } => {
                assert!(t < 1.0 && t > 0.99);
                assert!(partial.t.len() > 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic_outputs() {
        let run = || {
            solve_ivp(|t, y, dy| dy[0] = -t * y[0], 0.0, &[1.0], 3.0, 1e-10)
                .unwrap()
                .final_state()[0]
        };
        assert_eq!(run().to_bits(), run().to_bits());
    }
}
