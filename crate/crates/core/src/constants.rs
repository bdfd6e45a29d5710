//! Dimension-dependent constants: sphere areas, bubble moments, the Sobolev
//! constant and the binomial coefficients of the energy expansion.
//!
//! Every moment is computed twice: in closed form through Beta functions and
//! by radial quadrature, and both values are kept.

use std::collections::BTreeMap;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{integrate_radial_with, solve_ivp_with, IvpOptions, QuadOptions};
use crate::special::{beta, gamma};

/// Relative tolerance for constant quadratures.
pub const CONSTANT_QUAD_TOL: f64 = 1e-12;

/// Surface area ω_{n−1} of the unit sphere in ℝⁿ.
pub fn sphere_area(n: u32) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

/// `∫_{ℝⁿ} |x|^a (1+|x|²)^{−b} dx` in closed form.
pub fn radial_moment(n: u32, a: f64, b: f64) -> f64 {
    let p = (n as f64 + a) / 2.0;
    0.5 * sphere_area(n) * beta(p, b - p)
}

/// Same moment by adaptive radial quadrature.
pub fn radial_moment_quadrature(n: u32, a: f64, b: f64) -> Result<(f64, f64)> {
    let r = integrate_radial_with(
        |r| r.powf(a) * (1.0 + r * r).powf(-b),
        n,
        &[0.25, 0.5],
        &QuadOptions::relative(CONSTANT_QUAD_TOL),
    )?;
    Ok((r.value, r.error_estimate))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossChecked {
    pub closed_form: f64,
    pub quadrature: f64,
    pub quadrature_error: f64,
}

impl CrossChecked {
    fn moment(n: u32, a: f64, b: f64) -> Result<Self> {
        let (quadrature, quadrature_error) = radial_moment_quadrature(n, a, b)?;
        Ok(Self {
            closed_form: radial_moment(n, a, b),
            quadrature,
            quadrature_error,
        })
    }

    pub fn value(&self) -> f64 {
        self.closed_form
    }

    pub fn relative_residual(&self) -> f64 {
        ((self.closed_form - self.quadrature) / self.closed_form).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaylorCoeff {
    pub k: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionConstants {
    pub n: u32,
    /// c_n = n² − 2n.
    pub cn: f64,
    /// ω_{n−1}.
    pub omega: f64,
    /// S_n = ∫(1+|x|²)^{−n}.
    pub sn: CrossChecked,
    /// c̄₁ = ∫(1+|x|²)^{−(n+2)/2}.
    pub c1: CrossChecked,
    /// c̄₂ = ∫|x|²(1+|x|²)^{−n}.
    pub c2: CrossChecked,
    /// c̄₃ = ∫(1+|x|²)^{−(n−2)}.
    pub c3: CrossChecked,
    /// Best Sobolev constant S = c_n S_n^{2/n}.
    pub sobolev: f64,
    /// β = c̄₃/(c_n S_n), the slope inside (1 − βt)^{n/(n−2)}.
    pub beta: f64,
    /// a_{n,k} for k = 2..⌊(n−2)/2⌋.
    pub taylor: Vec<TaylorCoeff>,
}

fn check_dimension(n: u32) -> Result<()> {
    if n < 5 {
        return Err(Error::UnsupportedDimension { n, reason: "need n >= 5" });
    }
    if n % 2 == 0 {
        return Err(Error::UnsupportedDimension { n, reason: "even dimensions are not supported" });
    }
    Ok(())
}

/// Generalized binomial coefficients of `(1 − βt)^q` for powers `2..=kmax`.
pub fn binomial_series(q: f64, beta: f64, kmax: u32) -> Vec<TaylorCoeff> {
    let mut out = Vec::new();
    let mut binom = 1.0;
    for k in 1..=kmax {
        binom *= (q - (k as f64 - 1.0)) / k as f64;
        if k >= 2 {
            out.push(TaylorCoeff {
                k,
                value: binom * (-beta).powi(k as i32),
            });
        }
    }
    out
}

fn exponent(n: u32) -> f64 {
    n as f64 / (n as f64 - 2.0)
}

fn closed_beta(n: u32) -> f64 {
    let cn = (n * n - 2 * n) as f64;
    radial_moment(n, 0.0, n as f64 - 2.0) / (cn * radial_moment(n, 0.0, n as f64))
}

/// a_{n,k}, k = 2..⌊(n−2)/2⌋; empty for n = 5.
pub fn taylor_coeffs(n: u32) -> Result<Vec<TaylorCoeff>> {
    check_dimension(n)?;
    Ok(binomial_series(exponent(n), closed_beta(n), (n - 2) / 2))
}

fn compute(n: u32) -> Result<DimensionConstants> {
    check_dimension(n)?;
    let nf = n as f64;
    let cn = nf * nf - 2.0 * nf;
    let sn = CrossChecked::moment(n, 0.0, nf)?;
    let c1 = CrossChecked::moment(n, 0.0, (nf + 2.0) / 2.0)?;
    let c2 = CrossChecked::moment(n, 2.0, nf)?;
    let c3 = CrossChecked::moment(n, 0.0, nf - 2.0)?;
    let beta = c3.value() / (cn * sn.value());
    Ok(DimensionConstants {
        n,
        cn,
        omega: sphere_area(n),
        sobolev: cn * sn.value().powf(2.0 / nf),
        beta,
        taylor: binomial_series(exponent(n), beta, (n - 2) / 2),
        sn,
        c1,
        c2,
        c3,
    })
}

static CACHE: OnceLock<Mutex<BTreeMap<u32, DimensionConstants>>> = OnceLock::new();

/// All constants for dimension `n` (odd, ≥ 5). Cached per `n`.
pub fn dimension_constants(n: u32) -> Result<DimensionConstants> {
    check_dimension(n)?;
    let cache = CACHE.get_or_init(|| Mutex::new(BTreeMap::new()));
    if let Some(c) = cache.lock().expect("constants cache poisoned").get(&n) {
        return Ok(c.clone());
    }
    let c = compute(n)?;
    cache
        .lock()
        .expect("constants cache poisoned")
        .insert(n, c.clone());
    Ok(c)
}

impl DimensionConstants {
    /// Critical exponent (n+2)/(n−2).
    pub fn critical_power(&self) -> f64 {
        (self.n as f64 + 2.0) / (self.n as f64 - 2.0)
    }

    /// n/(n−2).
    pub fn energy_power(&self) -> f64 {
        exponent(self.n)
    }

    /// c̄₂/c̄₃ predicted as n(n−4)/(4(n−1)(n−2)).
    pub fn ratio_identity(&self) -> f64 {
        let n = self.n as f64;
        n * (n - 4.0) / (4.0 * (n - 1.0) * (n - 2.0))
    }

    pub fn max_relative_residual(&self) -> f64 {
        [self.sn, self.c1, self.c2, self.c3]
            .iter()
            .map(CrossChecked::relative_residual)
            .fold(0.0, f64::max)
    }
}

/// First Dirichlet eigenvalue of −Δ on the unit ball of ℝⁿ, μ₁ = j²_{n/2−1,1},
/// from the first zero of the regular radial solution of u″ + (n−1)u′/t + u = 0.
pub fn ball_first_eigenvalue(n: u32) -> Result<f64> {
    let nf = n as f64;
    let eps = 1e-3;
    // Regular series u = 1 − t²/(2n) + t⁴/(8n(n+2)).
    let u0 = 1.0 - eps * eps / (2.0 * nf) + eps.powi(4) / (8.0 * nf * (nf + 2.0));
    let du0 = -eps / nf + eps.powi(3) / (2.0 * nf * (nf + 2.0));
    let mut opts = IvpOptions::with_tol(1e-13);
    opts.atol = 1e-16;
    opts.event_component = Some(0);
    opts.terminal_event = true;
    let tr = solve_ivp_with(
        |t, y, dy| {
            dy[0] = y[1];
            dy[1] = -(nf - 1.0) / t * y[1] - y[0];
        },
        eps,
        &[u0, du0],
        4.0 * nf,
        &opts,
    )?;
    let tz = tr
        .event
        .map(|e| e.t)
        .ok_or_else(|| Error::Domain("radial Bessel solution has no zero".into()))?;
    Ok(tz * tz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn five_dimensional_closed_forms() {
        let c = dimension_constants(5).unwrap();
        assert_relative_eq!(c.omega, 8.0 * PI * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(c.sn.value(), PI.powi(3) / 32.0, max_relative = 1e-14);
        assert_relative_eq!(c.c1.value(), 8.0 * PI * PI / 15.0, max_relative = 1e-14);
        assert_relative_eq!(c.c2.value(), 5.0 * PI.powi(3) / 96.0, max_relative = 1e-14);
        assert_relative_eq!(c.c3.value(), PI.powi(3) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(c.c2.value() / c.c3.value(), 5.0 / 48.0, max_relative = 1e-14);
        assert_relative_eq!(
            c.sobolev,
            15.0 * (PI.powi(3) / 32.0).powf(0.4),
            max_relative = 1e-14
        );
        assert!((c.sobolev - 14.81).abs() < 5e-3);
        assert!(c.taylor.is_empty());
        assert!(c.max_relative_residual() < 1e-10);
    }

    #[test]
    fn rejects_bad_dimensions() {
        for n in [3, 4, 6, 8] {
            assert!(matches!(
                dimension_constants(n),
                Err(Error::UnsupportedDimension { .. })
            ));
        }
    }

    #[test]
    fn seven_dimensional_taylor_coefficient() {
        let c = dimension_constants(7).unwrap();
        assert_eq!(c.taylor.len(), 1);
        let b = c.c3.value() / (35.0 * c.sn.value());
        assert_relative_eq!(c.taylor[0].value, 7.0 / 25.0 * b * b, max_relative = 1e-14);

        // Finite-difference oracle: second derivative of (1 − βt)^{7/5} at 0 is 2·a_{7,2}.
        let g = |t: f64| (1.0 - b * t).powf(1.4);
        let h = 1e-3;
        let second = (g(h) - 2.0 * g(0.0) + g(-h)) / (h * h);
        assert_relative_eq!(second / 2.0, c.taylor[0].value, max_relative = 1e-5);
    }

    #[test]
    fn truncated_expansion_order() {
        for n in [7u32, 9, 21] {
            let c = dimension_constants(n).unwrap();
            let q = n as f64 / (n as f64 - 2.0);
            let t: f64 = 1e-3;
            let mut series = 1.0 - q * c.beta * t;
            for tc in &c.taylor {
                series += tc.value * t.powi(tc.k as i32);
            }
            let direct = (1.0 - c.beta * t).powf(q);
            let order = (n as i32 - 2) / 2 + 1;
            assert!((series - direct).abs() <= 10.0 * t.powi(order), "n = {n}");
        }
    }

    #[test]
    fn sn_decreases_with_dimension() {
        let vals: Vec<f64> = [5u32, 7, 9, 21, 23]
            .iter()
            .map(|&n| dimension_constants(n).unwrap().sn.value())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn first_eigenvalue_of_five_ball() {
        // Smallest positive root of tan x = x by bisection.
        let x = crate::numerics::bisect(|x: f64| x.tan() - x, 4.0, 4.6);
        let mu1 = ball_first_eigenvalue(5).unwrap();
        assert_relative_eq!(mu1, x * x, max_relative = 1e-9);
        assert!((mu1 - 20.1907).abs() < 1e-3);
    }
}
