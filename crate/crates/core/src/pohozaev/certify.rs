use serde::Serialize;

use super::multiplier::{build_psibar, grid_min, Multiplier, PsiBar, PsiBarCertificate, SCAN_POINTS};
use crate::bubble::{condition_one, ConditionOne, KSpec, ProblemSpec};
use crate::error::{Error, Result};

/// The nonexistence argument only runs for odd n with n = 5 or n ≥ 21.
pub fn check_theorem_scope(n: u32) -> Result<()> {
    if n % 2 == 1 && (n == 5 || n >= 21) {
        Ok(())
    } else {
        Err(Error::DimensionOutOfScope { n })
    }
}

/// F(t)/t³ where F(t) = −((n−2)/2n)tηf₁′ψ̄ + ((n−1)/n)(f(0)+ηf₁)(ψ̄ − tψ̄′).
pub fn positivity_normalized(psibar: &PsiBar, kspec: &KSpec, t: f64) -> f64 {
    let n = psibar.n() as f64;
    let jet = psibar.jet(t);
    let cbar = (n - 2.0) / (2.0 * n);
    -cbar * kspec.eta * kspec.f1.derivative_over_t(t) * jet.value_over_t
        + (n - 1.0) / n * kspec.value(t) * jet.defect_over_t3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Positivity {
    /// Minimum of F(t)/t³ over [0, 1]; t = 0 stands for the limit t → 0⁺.
    pub min_normalized: f64,
    pub argmin_t: f64,
    /// Bound on the error of F/t³ from truncating the series.
    pub truncation_bound: f64,
    /// min_normalized − truncation_bound.
    pub margin: f64,
}

/// Grid minimum of F/t³ followed by golden-section refinement around it.
pub fn positivity_functional(psibar: &PsiBar, kspec: &KSpec) -> Positivity {
    let f = |t: f64| positivity_normalized(psibar, kspec, t);
    let (mut best, mut arg) = grid_min(f, 0);
    let h = 1.0 / SCAN_POINTS as f64;
    let (mut a, mut b) = ((arg - h).max(0.0), (arg + h).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1) <= f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    let x = 0.5 * (a + b);
    if f(x) < best {
        best = f(x);
        arg = x;
    }
    // |tail of ψ̄/t| and |tail of (ψ̄ − tψ̄′)/t³| are at most Σ j|a_j| over the
    // dropped indices, since every dropped power of t is ≥ 3 on [0, 1].
    let n = psibar.n() as f64;
    let sup_slope = (0..=200)
        .map(|i| (kspec.eta * kspec.f1.derivative_over_t(i as f64 / 200.0)).abs())
        .fold(0.0, f64::max);
    let sup_k = (0..=200).map(|i| kspec.value(i as f64 / 200.0).abs()).fold(0.0, f64::max);
    let truncation_bound = (n - 2.0) / (2.0 * n) * sup_slope * psibar.tail_bound()
        + (n - 1.0) / n * sup_k * psibar.derivative_tail_bound();
    Positivity { min_normalized: best, argmin_t: arg, truncation_bound, margin: best - truncation_bound }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVerdict {
    NonexistenceCertified,
    CriterionStrict,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    MonotoneProfile,
    K3,
    ReversedCondition,
    PsiBar,
    Positivity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub verdict: CertificateVerdict,
    pub failed_stage: Option<Stage>,
    pub detail: Option<String>,
    pub condition: ConditionOne,
    /// lhs_i − rhs_i, which must be ≥ 0.
    pub reversed_margin: f64,
    pub k3_holds: bool,
    pub psibar: Option<PsiBarCertificate>,
    pub positivity: Option<Positivity>,
}

/// Runs the nonexistence chain for a radial K on the unit ball.
pub fn certify_nonexistence(spec: &ProblemSpec) -> Result<Certificate> {
    let n = spec.n();
    check_theorem_scope(n)?;
    if !spec.geom.is_centered() {
        return Err(Error::Unsupported("the nonexistence chain needs y0 = 0".into()));
    }
    if !spec.admissible() {
        return Err(Error::Domain(format!(
            "mu = {} outside (0, mu1) with mu1 = {}",
            spec.mu, spec.mu1
        )));
    }
    let condition = condition_one(spec);
    let k3_holds = spec.kspec.k3_holds(n);
    let mut cert = Certificate {
        verdict: CertificateVerdict::Inconclusive,
        failed_stage: None,
        detail: None,
        reversed_margin: condition.lhs - condition.rhs,
        condition,
        k3_holds,
        psibar: None,
        positivity: None,
    };
    let reversed = cert.reversed_margin >= 0.0
        || cert.condition.verdict == crate::bubble::Verdict::Equality;
    if !reversed {
        cert.verdict = CertificateVerdict::CriterionStrict;
        cert.failed_stage = Some(Stage::ReversedCondition);
        return Ok(cert);
    }
    if !spec.kspec.monotone {
        cert.failed_stage = Some(Stage::MonotoneProfile);
        return Ok(cert);
    }
    if !k3_holds {
        cert.failed_stage = Some(Stage::K3);
        return Ok(cert);
    }
    let pb = match build_psibar(n, spec.mu) {
        Ok(pb) => pb,
        Err(Error::PsiBarConstruction(msg)) => {
            cert.failed_stage = Some(Stage::PsiBar);
            cert.detail = Some(msg);
            return Ok(cert);
        }
        Err(e) => return Err(e),
    };
    let pos = positivity_functional(&pb.psibar, &spec.kspec);
    let signs_ok = pb.psi1.passed && pb.psi2.passed && pb.nonnegativity_margin >= 0.0;
    cert.psibar = Some(pb);
    cert.positivity = Some(pos);
    if signs_ok && pos.margin > 0.0 {
        cert.verdict = CertificateVerdict::NonexistenceCertified;
    } else {
        cert.failed_stage = Some(Stage::Positivity);
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::RadialProfile;
    use approx::assert_relative_eq;

    fn quadratic(eta: f64, mu: f64) -> ProblemSpec {
        let k = KSpec::new(1.0, eta, RadialProfile::neg_t2(), None).unwrap();
        ProblemSpec::centered(5, k, mu).unwrap()
    }

    #[test]
    fn scope_gate() {
        assert!(check_theorem_scope(5).is_ok());
        assert!(check_theorem_scope(21).is_ok());
        for n in [6, 7, 9, 19, 22] {
            assert!(matches!(check_theorem_scope(n), Err(Error::DimensionOutOfScope { .. })));
        }
    }

    #[test]
    fn flat_zero_mu_functional() {
        let pb = PsiBar::from_seeds(5, 0.0, 1.0, -1.0).unwrap();
        let k = KSpec::constant(2.0).unwrap();
        for &t in &[0.1f64, 0.5, 1.0] {
            let expected = 4.0 * 3.0 / 5.0 * 2.0 * t.powi(4) / t.powi(3);
            assert_relative_eq!(positivity_normalized(&pb, &k, t), expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn leading_coefficient_at_origin() {
        let (eta, mu) = (0.05, 0.02);
        let pb = PsiBar::from_seeds(5, mu, 1.0, -1.0).unwrap();
        let k = KSpec::new(1.0, eta, RadialProfile::neg_t2(), None).unwrap();
        assert_relative_eq!(
            positivity_normalized(&pb, &k, 0.0),
            0.6 * eta - 0.64 * mu,
            max_relative = 1e-13
        );
    }

    #[test]
    fn small_eta_positive_minimum() {
        let pb = build_psibar(5, 0.005).unwrap();
        let k = KSpec::new(1.0, 0.01, RadialProfile::neg_t2(), None).unwrap();
        let p = positivity_functional(&pb.psibar, &k);
        assert!(p.margin > 0.0, "{p:?}");
    }

    #[test]
    fn certifies_below_threshold() {
        let c = certify_nonexistence(&quadratic(0.05, 0.8 * 0.046875)).unwrap();
        assert_eq!(c.verdict, CertificateVerdict::NonexistenceCertified, "{c:?}");
        assert!(c.reversed_margin > 0.0);
        assert!(c.positivity.unwrap().margin > 0.0);
    }

    #[test]
    fn flat_k_is_existence_side() {
        let s = ProblemSpec::centered(5, KSpec::constant(1.0).unwrap(), 1.0).unwrap();
        let c = certify_nonexistence(&s).unwrap();
        assert_eq!(c.verdict, CertificateVerdict::CriterionStrict);
    }

    #[test]
    fn out_of_scope_dimension() {
        let s = ProblemSpec::centered(9, KSpec::constant(1.0).unwrap(), 1.0).unwrap();
        assert!(matches!(certify_nonexistence(&s), Err(Error::DimensionOutOfScope { n: 9 })));
    }
}
