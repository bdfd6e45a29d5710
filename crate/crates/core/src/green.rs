//! Regular part of the Dirichlet Green's function of the unit ball (method of
//! images) and the boundary constants c̄̄₅, c̄₆, c̄₄ entering the energy expansion.
//!
//! Convention: G(x, y) = |x − y|^{2−n} − H(x, y), no (n−2)ω_{n−1} normalizer.

use std::cell::RefCell;

use serde::Serialize;

use crate::constants::{sphere_area, DimensionConstants};
use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, integrate_semi_infinite, QuadOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallGeometry {
    pub n: u32,
    pub y0: Vec<f64>,
    /// Distance from y0 to the unit sphere.
    pub d0: f64,
}

impl BallGeometry {
    pub fn new(n: u32, y0: Vec<f64>) -> Result<Self> {
        if y0.len() != n as usize {
            return Err(Error::InvalidParameter(format!(
                "y0 has {} coordinates, expected {n}",
                y0.len()
            )));
        }
        let rho = norm(&y0);
        if !(rho < 1.0) {
            return Err(Error::Domain(format!("|y0| = {rho} is not inside the unit ball")));
        }
        Ok(Self { n, y0, d0: 1.0 - rho })
    }

    pub fn centered(n: u32) -> Self {
        Self { n, y0: vec![0.0; n as usize], d0: 1.0 }
    }

    pub fn rho(&self) -> f64 {
        1.0 - self.d0
    }

    pub fn is_centered(&self) -> bool {
        self.y0.iter().all(|&v| v == 0.0)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// H(y, x) = (|x|²|y|² − 2⟨x, y⟩ + 1)^{(2−n)/2} with n = dimension of the points.
pub fn regular_part(y: &[f64], x: &[f64]) -> Result<f64> {
    if y.len() != x.len() {
        return Err(Error::InvalidParameter("points of different dimension".into()));
    }
    let ny = norm(y);
    if !(ny < 1.0) {
        return Err(Error::Domain(format!("|y| = {ny} must be < 1")));
    }
    let nx2: f64 = x.iter().map(|v| v * v).sum();
    let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let n = x.len() as f64;
    Ok((nx2 * ny * ny - 2.0 * dot + 1.0).powf((2.0 - n) / 2.0))
}

/// H(y0, y0 + r·ω) where ω makes angle θ (cos θ = `c`) with y0, |y0| = ρ.
fn regular_part_polar(n: u32, rho: f64, r: f64, c: f64) -> f64 {
    let nx2 = rho * rho + 2.0 * r * rho * c + r * r;
    let dot = rho * rho + r * rho * c;
    (nx2 * rho * rho - 2.0 * dot + 1.0).powf((2.0 - n as f64) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometryConstants {
    /// c̄̄₅ = ∫_{ℝⁿ∖B} |x − y0|^{4−2n}.
    pub c5bb: Estimate,
    /// c̄₆ = ∫_B [2H(y0,x)|x − y0|^{2−n} − H²(y0,x)] + c̄̄₅.
    pub c6b: Estimate,
    /// c̄₄ = −c̄₁H(y0,y0) + μ c̄₆/c_n, as defined alongside the expansion.
    pub c4b: f64,
    /// Coefficient that actually multiplies −n/((n−2)S_n λ^{n−2}) in the
    /// expansion of A^{n/(n−2)}: −c̄₁H(y0,y0) − μ c̄₆/c_n.
    pub c4_expansion: f64,
    pub h_y0y0: f64,
    pub mu: f64,
}

pub const GEOMETRY_TOL: f64 = 1e-11;

fn assemble(
    c5bb: Estimate,
    c6b: Estimate,
    h_y0y0: f64,
    mu: f64,
    consts: &DimensionConstants,
) -> GeometryConstants {
    let c1 = consts.c1.value();
    GeometryConstants {
        c5bb,
        c6b,
        c4b: -c1 * h_y0y0 + mu * c6b.value / consts.cn,
        c4_expansion: -c1 * h_y0y0 - mu * c6b.value / consts.cn,
        h_y0y0,
        mu,
    }
}

/// Geometry constants for `geom` at linear coefficient `mu`. Centered balls use
/// the 1-D radial path; off-center points use axisymmetric 2-D quadrature.
pub fn geometry_constants(
    geom: &BallGeometry,
    mu: f64,
    consts: &DimensionConstants,
) -> Result<GeometryConstants> {
    if !(mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be >= 0, got {mu}")));
    }
    if geom.n != consts.n {
        return Err(Error::InvalidParameter("geometry and constants dimensions differ".into()));
    }
    if geom.is_centered() {
        geometry_constants_radial(geom.n, mu, consts)
    } else {
        geometry_constants_axisymmetric(geom, mu, consts)
    }
}

pub fn geometry_constants_radial(
    n: u32,
    mu: f64,
    consts: &DimensionConstants,
) -> Result<GeometryConstants> {
    let omega = sphere_area(n);
    let opts = QuadOptions::relative(GEOMETRY_TOL);
    let ni = n as i32;
    // |x|^{4−2n} r^{n−1} = r^{3−n}.
    let outer = integrate_semi_infinite(|r| r.powi(3 - ni), 1.0, &opts)?;
    // H(0,·) ≡ 1: (2 r^{2−n} − 1) r^{n−1} = 2r − r^{n−1}.
    let inner = integrate_adaptive(|r| 2.0 * r - r.powi(ni - 1), 0.0, 1.0, &[], &opts)?;
    let c5bb = Estimate {
        value: omega * outer.value,
        error: omega * outer.error_estimate,
    };
    let c6b = Estimate {
        value: omega * inner.value + c5bb.value,
        error: omega * inner.error_estimate + c5bb.error,
    };
    Ok(assemble(c5bb, c6b, 1.0, mu, consts))
}

/// Polar coordinates centered at y0 with axis along y0. The volume element is
/// r^{n−1} ω_{n−2} sin^{n−2}θ dr dθ, which also cancels the |x−y0|^{2−n}
/// singularity at the r = 0 panel endpoint.
pub fn geometry_constants_axisymmetric(
    geom: &BallGeometry,
    mu: f64,
    consts: &DimensionConstants,
) -> Result<GeometryConstants> {
    let n = geom.n;
    let ni = n as i32;
    let rho = geom.rho();
    let omega_axis = sphere_area(n - 1);
    let opts = QuadOptions::relative(GEOMETRY_TOL);
    let exit_radius = |c: f64| -rho * c + (1.0 - rho * rho * (1.0 - c * c)).sqrt();
    let angular = |theta: f64| theta.sin().powi(ni - 2);

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let outer_theta = |theta: f64| {
        let big_r = exit_radius(theta.cos());
        match integrate_semi_infinite(|r| r.powi(3 - ni), big_r, &opts) {
            Ok(v) => v.value * angular(theta),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let c5 = integrate_adaptive(outer_theta, 0.0, std::f64::consts::PI, &[], &opts);
    if let Some(e) = failure.borrow_mut().take() {
        return Err(e);
    }
    let c5 = c5?;
    let inner_theta = |theta: f64| {
        let c = theta.cos();
        let big_r = exit_radius(c);
        let integrand = |r: f64| {
            let h = regular_part_polar(n, rho, r, c);
            2.0 * h * r - h * h * r.powi(ni - 1)
        };
        match integrate_adaptive(integrand, 0.0, big_r, &[], &opts) {
            Ok(v) => v.value * angular(theta),
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };
    let c6 = integrate_adaptive(inner_theta, 0.0, std::f64::consts::PI, &[], &opts);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let c6 = c6?;
    let c5bb = Estimate {
        value: omega_axis * c5.value,
        error: omega_axis * c5.error_estimate,
    };
    let c6b = Estimate {
        value: omega_axis * c6.value + c5bb.value,
        error: omega_axis * c6.error_estimate + c5bb.error,
    };
    let h = (1.0 - rho * rho).powi(2 - ni);
    Ok(assemble(c5bb, c6b, h, mu, consts))
}
