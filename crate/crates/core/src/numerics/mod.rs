//! Shared numerical kernels: adaptive Gauss–Kronrod quadrature on finite and
//! semi-infinite intervals, and an adaptive Dormand–Prince integrator with
//! dense output and zero-crossing events.

mod ivp;
mod quadrature;

pub use ivp::{solve_ivp, solve_ivp_with, Event, IvpOptions, Trajectory};
pub use quadrature::{
    integrate_adaptive, integrate_interval, integrate_radial, integrate_radial_with,
    integrate_semi_infinite, QuadOptions, QuadratureResult,
};

/// Bisection on a bracketing interval `[a, b]` where `f(a)` and `f(b)` differ in sign.
///
/// Stops when the interval is as narrow as floating point allows.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
