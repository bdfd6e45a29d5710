use serde::Serialize;

use super::profile::ProblemSpec;
use crate::constants::DimensionConstants;
use crate::error::{Error, Result};
use crate::green::{geometry_constants, GeometryConstants};
use crate::numerics::{integrate_adaptive, QuadOptions};

pub const ENERGY_TOL: f64 = 1e-13;

/// δ_{y0,λ}(x) = c_n^{(n−2)/4}(λ/(1+λ²|x−y0|²))^{(n−2)/2}, n = x.len().
pub fn bubble_value(x: &[f64], y0: &[f64], lambda: f64) -> Result<f64> {
    if x.len() != y0.len() {
        return Err(Error::InvalidParameter("points of different dimension".into()));
    }
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
    }
    let d2: f64 = x.iter().zip(y0).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(bubble_radial(x.len() as u32, d2.sqrt(), lambda))
}

/// Bubble as a function of the distance to its center.
pub fn bubble_radial(n: u32, r: f64, lambda: f64) -> f64 {
    let nf = n as f64;
    let cn = nf * nf - 2.0 * nf;
    cn.powf((nf - 2.0) / 4.0) * (lambda / (1.0 + lambda * lambda * r * r)).powf((nf - 2.0) / 2.0)
}

/// Pδ for a bubble centered at the origin: δ(r) − δ(1).
pub fn projected_bubble_centered(r: f64, lambda: f64, consts: &DimensionConstants) -> f64 {
    bubble_radial(consts.n, r, lambda) - bubble_radial(consts.n, 1.0, lambda)
}

/// Pδ at distance r, refusing off-center points where Pδ has no closed form.
pub fn projected_bubble(spec: &ProblemSpec, r: f64, lambda: f64) -> Result<f64> {
    if !spec.geom.is_centered() {
        return Err(Error::Unsupported(
            "closed-form projection only exists for a centered bubble".into(),
        ));
    }
    Ok(projected_bubble_centered(r, lambda, &spec.consts))
}

/// Breakpoints 1, 2, 4, … below `upper` in the scaled variable s = λr.
fn dyadic_breaks(upper: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut s = 1.0;
    while s < upper {
        out.push(s);
        s *= 2.0;
    }
    out
}

fn scaled_integral<F: Fn(f64) -> f64>(g: F, upper: f64) -> Result<f64> {
    let breaks = dyadic_breaks(upper);
    Ok(integrate_adaptive(g, 0.0, upper, &breaks, &QuadOptions::relative(ENERGY_TOL))?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectEnergy {
    pub lambda: f64,
    /// ∫|∇Pδ|².
    pub gradient: f64,
    /// ∫(Pδ)².
    pub mass: f64,
    /// ∫K(Pδ)^{2n/(n−2)}.
    pub weighted: f64,
    /// A(λ).
    pub ratio: f64,
    /// A^{n/(n−2)}, sign kept when the numerator is negative.
    pub powered: f64,
    pub negative_numerator: bool,
}

/// Energy ratio A(λ) of the projected bubble by 1-D radial quadrature.
pub fn energy_ratio_direct(spec: &ProblemSpec, lambda: f64) -> Result<DirectEnergy> {
    if !spec.geom.is_centered() {
        return Err(Error::Unsupported("direct energy quadrature needs y0 = 0".into()));
    }
    if !(lambda >= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 1, got {lambda}")));
    }
    let n = spec.n();
    let nf = n as f64;
    let c = &spec.consts;
    let amp2 = c.cn.powf((nf - 2.0) / 2.0); // (c_n^{(n−2)/4})²
    let edge = (1.0 + lambda * lambda).powf(-(nf - 2.0) / 2.0);
    let profile = |s: f64| (1.0 + s * s).powf(-(nf - 2.0) / 2.0) - edge;
    let q = 2.0 * nf / (nf - 2.0);

    let gradient = c.omega
        * (nf - 2.0).powi(2)
        * amp2
        * scaled_integral(|s| s.powf(nf + 1.0) * (1.0 + s * s).powf(-nf), lambda)?;
    let mass = c.omega
        * amp2
        * scaled_integral(|s| profile(s).powi(2) * s.powf(nf - 1.0), lambda)?
        / (lambda * lambda);
    let weighted = c.omega
        * c.cn.powf(nf / 2.0)
        * scaled_integral(
            |s| spec.kspec.value(s / lambda) * profile(s).max(0.0).powf(q) * s.powf(nf - 1.0),
            lambda,
        )?;
    let numerator = gradient - spec.mu * mass;
    let ratio = numerator / weighted.powf((nf - 2.0) / nf);
    let powered = ratio.signum() * ratio.abs().powf(nf / (nf - 2.0));
    Ok(DirectEnergy {
        lambda,
        gradient,
        mass,
        weighted,
        ratio,
        powered,
        negative_numerator: numerator < 0.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Remainder {
    pub lambda: f64,
    pub value: f64,
    /// λ²·value, which must vanish as λ → ∞.
    pub lambda2_scaled: f64,
}

/// ∫_{B₀}(K/K(y0) − 1 − ΔK(y0)|x−y0|²/(2nK(y0)))·λⁿ(1+λ²|x−y0|²)^{−n} dx over
/// the largest ball B₀ around y0 inside the unit ball.
pub fn remainder_integral(spec: &ProblemSpec, lambda: f64) -> Result<Remainder> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be > 0, got {lambda}")));
    }
    let nf = spec.n() as f64;
    let k = &spec.kspec;
    let value = if k.eta == 0.0 || k.f1.coeffs.len() < 2 {
        0.0
    } else {
        spec.consts.omega
            * scaled_integral(
                |s| k.taylor_remainder(s / lambda) * (1.0 + s * s).powf(-nf) * s.powf(nf - 1.0),
                lambda * spec.geom.d0,
            )?
    };
    Ok(Remainder { lambda, value, lambda2_scaled: lambda * lambda * value })
}

/// Leading factor S_n^{2/(n−2)}c_n^{n/(n−2)}/K(y0) = S^{n/(n−2)}/K(y0).
pub fn expansion_prefactor(spec: &ProblemSpec) -> f64 {
    let nf = spec.n() as f64;
    let c = &spec.consts;
    c.sn.value().powf(2.0 / (nf - 2.0)) * c.cn.powf(nf / (nf - 2.0)) / spec.k0()
}

/// Σ a_{n,k} μ^k λ^{−2k}.
pub fn taylor_sum(spec: &ProblemSpec, lambda: f64) -> f64 {
    spec.consts
        .taylor
        .iter()
        .map(|t| t.value * (spec.mu / (lambda * lambda)).powi(t.k as i32))
        .sum()
}

/// Coefficient X of the λ^{−2} term (before the 1/S_n factor).
pub fn second_order_coefficient(spec: &ProblemSpec) -> f64 {
    let n = spec.n();
    let nf = n as f64;
    let c = &spec.consts;
    c.c2.value() * spec.kspec.laplacian_at_center(n) / (2.0 * nf * spec.k0())
        + spec.mu * c.c3.value() / (nf - 2.0).powi(2)
}

/// Asymptotic expansion of A^{n/(n−2)} with the o-terms dropped.
pub fn energy_ratio_expansion(spec: &ProblemSpec, lambda: f64) -> Result<f64> {
    let geo = geometry_constants(&spec.geom, spec.mu, &spec.consts)?;
    energy_ratio_expansion_with(spec, &geo, lambda)
}

/// Same as [`energy_ratio_expansion`] with precomputed geometry constants.
pub fn energy_ratio_expansion_with(
    spec: &ProblemSpec,
    geo: &GeometryConstants,
    lambda: f64,
) -> Result<f64> {
    if !(lambda >= 1.0) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 1, got {lambda}")));
    }
    let nf = spec.n() as f64;
    let sn = spec.consts.sn.value();
    let rem = remainder_integral(spec, lambda)?.value;
    let bracket = 1.0 - second_order_coefficient(spec) / (sn * lambda * lambda)
        - nf * geo.c4_expansion / ((nf - 2.0) * sn * lambda.powf(nf - 2.0))
        - rem / sn
        + taylor_sum(spec, lambda);
    Ok(expansion_prefactor(spec) * bracket)
}
