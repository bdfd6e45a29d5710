use rayon::prelude::*;
use serde::Serialize;

use super::energy::{
    energy_ratio_direct, energy_ratio_expansion_with, expansion_prefactor, remainder_integral,
    taylor_sum, DirectEnergy,
};
use super::profile::{KSpec, ProblemSpec, RadialProfile};
use crate::constants::{dimension_constants, radial_moment};
use crate::error::{Error, Result};
use crate::green::{geometry_constants, GeometryConstants};
use crate::numerics::integrate_radial;

/// Relative tolerance for declaring lhs_i = rhs_i.
pub const EQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Strict,
    Equality,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LimitValue {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl LimitValue {
    pub fn below(&self, threshold: f64) -> bool {
        match *self {
            LimitValue::Finite(v) => v < threshold,
            LimitValue::PlusInfinity => false,
            LimitValue::MinusInfinity => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionOne {
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs.
    pub margin: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

/// Compares −(n−2)²c̄₂ΔK(y0)/(2nK(y0)) with μc̄₃.
pub fn condition_one(spec: &ProblemSpec) -> ConditionOne {
    let n = spec.n();
    let nf = n as f64;
    let c = &spec.consts;
    let lhs = -(nf - 2.0).powi(2) * c.c2.value() * spec.kspec.laplacian_at_center(n)
        / (2.0 * nf * spec.k0());
    let rhs = spec.mu * c.c3.value();
    let verdict = if (lhs - rhs).abs() <= EQUALITY_TOL * lhs.abs().max(rhs.abs()) {
        Verdict::Equality
    } else if lhs < rhs {
        Verdict::Strict
    } else {
        Verdict::Violated
    };
    ConditionOne { lhs, rhs, margin: rhs - lhs, verdict, tolerance: EQUALITY_TOL }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionTwoSample {
    pub lambda: f64,
    /// λ^{n−2}[−R(λ) + S_n Σ a_{n,k} μ^k/λ^{2k}].
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionTwo {
    pub samples: Vec<ConditionTwoSample>,
    /// Minimum over the grid, standing in for the liminf.
    pub grid_min: f64,
    /// Exact λ → ∞ limit when the profile is a polynomial on a centered ball.
    pub asymptotic: Option<LimitValue>,
    /// n c̄₄/(n−2) with the coefficient that enters the expansion.
    pub threshold: f64,
    /// Same threshold built from c̄₄ exactly as defined next to the expansion.
    pub threshold_as_defined: f64,
    pub holds: bool,
    /// Last two grid values differ by more than 1% relative.
    pub refinement_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyCheck {
    pub lambda: f64,
    pub expansion: f64,
    pub direct: Option<DirectEnergy>,
    /// S^{n/(n−2)}/K(y0).
    pub target: f64,
    /// A^{n/(n−2)} < target, from the direct value when available.
    pub below_target: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub condition_i: ConditionOne,
    pub condition_ii: Option<ConditionTwo>,
    pub geometry: GeometryConstants,
    pub energy: Vec<EnergyCheck>,
    /// Condition (i) strict, or equality with condition (ii).
    pub sufficient_condition_holds: bool,
    pub admissible_mu: bool,
}

fn condition_two_value(spec: &ProblemSpec, lambda: f64) -> Result<f64> {
    let nf = spec.n() as f64;
    let rem = remainder_integral(spec, lambda)?.value;
    Ok(lambda.powf(nf - 2.0) * (-rem + spec.consts.sn.value() * taylor_sum(spec, lambda)))
}

/// λ → ∞ limit of the condition (ii) quantity for a polynomial profile around
/// the center of the ball. Powers below n−2 in f₁ and the binomial sum grow
/// like λ^{n−2−k}; the t^{n−2} coefficient gives the finite part.
pub fn condition_two_limit(spec: &ProblemSpec) -> Option<LimitValue> {
    if !spec.geom.is_centered() {
        return None;
    }
    let n = spec.n() as i64;
    let k = &spec.kspec;
    let scale = k.eta / k.f0;
    let sn = spec.consts.sn.value();
    // Coefficient of λ^e for e = n−3 down to 1.
    for e in (1..=n - 3).rev() {
        let power = n - 2 - e;
        let mut coeff = 0.0;
        if power >= 3 {
            coeff -= scale
                * k.f1.coefficient(power as usize)
                * radial_moment(n as u32, power as f64, n as f64);
        }
        if power % 2 == 0 {
            if let Some(t) = spec.consts.taylor.iter().find(|t| t.k as i64 == power / 2) {
                coeff += sn * t.value * spec.mu.powi(t.k as i32);
            }
        }
        if coeff > 0.0 {
            return Some(LimitValue::PlusInfinity);
        }
        if coeff < 0.0 {
            return Some(LimitValue::MinusInfinity);
        }
    }
    let top = (n - 2) as usize;
    Some(LimitValue::Finite(
        -scale * k.f1.coefficient(top) * radial_moment(n as u32, top as f64, n as f64),
    ))
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("lambda grid is empty".into()));
    }
    if grid.iter().any(|l| !(*l >= 1.0) || !l.is_finite()) {
        return Err(Error::InvalidParameter("lambda values must be finite and >= 1".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("lambda grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Condition (ii) on a λ grid.
pub fn condition_two(
    spec: &ProblemSpec,
    geo: &GeometryConstants,
    grid: &[f64],
) -> Result<ConditionTwo> {
    check_grid(grid)?;
    let nf = spec.n() as f64;
    let samples = grid
        .par_iter()
        .map(|&lambda| Ok(ConditionTwoSample { lambda, value: condition_two_value(spec, lambda)? }))
        .collect::<Result<Vec<_>>>()?;
    let grid_min = samples.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let threshold = nf * geo.c4_expansion / (nf - 2.0);
    let threshold_as_defined = nf * geo.c4b / (nf - 2.0);
    let asymptotic = condition_two_limit(spec);
    let holds = match asymptotic {
        Some(l) => l.below(threshold),
        None => grid_min < threshold,
    };
    let refinement_warning = match samples.as_slice() {
        [.., a, b] => (a.value - b.value).abs() > 1e-2 * b.value.abs().max(1e-300),
        _ => true,
    };
    Ok(ConditionTwo {
        samples,
        grid_min,
        asymptotic,
        threshold,
        threshold_as_defined,
        holds,
        refinement_warning,
    })
}

/// Conditions (i) and (ii) and the raw energy inequality on a λ grid.
pub fn evaluate_criteria(spec: &ProblemSpec, grid: &[f64]) -> Result<CriterionReport> {
    check_grid(grid)?;
    let geometry = geometry_constants(&spec.geom, spec.mu, &spec.consts)?;
    let condition_i = condition_one(spec);
    let condition_ii = match condition_i.verdict {
        Verdict::Equality => Some(condition_two(spec, &geometry, grid)?),
        _ => None,
    };
    let target = expansion_prefactor(spec);
    let energy = grid
        .par_iter()
        .map(|&lambda| {
            let expansion = energy_ratio_expansion_with(spec, &geometry, lambda)?;
            let direct = if spec.geom.is_centered() {
                Some(energy_ratio_direct(spec, lambda)?)
            } else {
                None
            };
            let value = direct.map_or(expansion, |d| d.powered);
            Ok(EnergyCheck { lambda, expansion, direct, target, below_target: value < target })
        })
        .collect::<Result<Vec<_>>>()?;
    let sufficient_condition_holds = match condition_i.verdict {
        Verdict::Strict => true,
        Verdict::Equality => condition_ii.as_ref().is_some_and(|c| c.holds),
        Verdict::Violated => false,
    };
    Ok(CriterionReport {
        condition_i,
        condition_ii,
        geometry,
        energy,
        sufficient_condition_holds,
        admissible_mu: spec.admissible(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Example11 {
    pub a: f64,
    pub b: f64,
    pub mu: f64,
    pub f0: f64,
    /// ∫_{ℝ⁵}|x|³(1+|x|²)^{−5} by quadrature.
    pub cubic_moment: f64,
    pub first_lhs: f64,
    pub first_rhs: f64,
    pub first_holds: bool,
    pub second_lhs: f64,
    /// 5c̄₄f(0) with the coefficient entering the expansion.
    pub second_rhs: f64,
    pub second_margin: f64,
    pub second_holds: bool,
    /// 5c̄₄f(0) with c̄₄ as defined next to the expansion.
    pub second_rhs_as_defined: f64,
    pub geometry: GeometryConstants,
}

/// K = f(0) + a t² + b t³ in five dimensions, centered:
/// −9c̄₂a = μc̄₃f(0) and −3b∫|x|³(1+|x|²)^{−5} < 5c̄₄f(0).
pub fn example_11_check(a: f64, b: f64, mu: f64, f0: f64) -> Result<Example11> {
    if !(f0 > 0.0) {
        return Err(Error::InvalidParameter(format!("f0 must be > 0, got {f0}")));
    }
    let consts = dimension_constants(5)?;
    let geom = crate::green::BallGeometry::centered(5);
    let geometry = geometry_constants(&geom, mu, &consts)?;
    let cubic_moment = integrate_radial(|r| r.powi(3) * (1.0 + r * r).powi(-5), 5, 1e-13)?.value;
    let first_lhs = -9.0 * consts.c2.value() * a;
    let first_rhs = mu * consts.c3.value() * f0;
    let first_holds =
        (first_lhs - first_rhs).abs() <= EQUALITY_TOL * first_lhs.abs().max(first_rhs.abs());
    let second_lhs = -3.0 * b * cubic_moment;
    let second_rhs = 5.0 * geometry.c4_expansion * f0;
    Ok(Example11 {
        a,
        b,
        mu,
        f0,
        cubic_moment,
        first_lhs,
        first_rhs,
        first_holds,
        second_lhs,
        second_rhs,
        second_margin: second_rhs - second_lhs,
        second_holds: second_lhs < second_rhs,
        second_rhs_as_defined: 5.0 * geometry.c4b * f0,
        geometry,
    })
}

/// The profile of [`example_11_check`] as a [`ProblemSpec`] with η = 1; it is
/// generally not monotone.
pub fn example_11_spec(a: f64, b: f64, mu: f64, f0: f64) -> Result<ProblemSpec> {
    let k = KSpec::general(f0, 1.0, RadialProfile::polynomial(vec![a, b]), None)?;
    ProblemSpec::centered(5, k, mu)
}
