use rayon::prelude::*;
use serde::Serialize;

use super::series::{PsiSeries, SeriesKind, DEFAULT_DEGREE};
use crate::error::{Error, Result};

/// ψ and its derivatives at one point, with the two quotients that stay finite
/// at t = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// ψ(t)/t.
    pub value_over_t: f64,
    /// (ψ − tψ′)/t³.
    pub defect_over_t3: f64,
}

impl Jet {
    fn add(self, o: Jet) -> Jet {
        Jet {
            value: self.value + o.value,
            d1: self.d1 + o.d1,
            d2: self.d2 + o.d2,
            d3: self.d3 + o.d3,
            value_over_t: self.value_over_t + o.value_over_t,
            defect_over_t3: self.defect_over_t3 + o.defect_over_t3,
        }
    }
}

/// A multiplier ψ with ψ(0) = 0 for the generalized Pohozaev identity.
pub trait Multiplier: Sync {
    fn jet(&self, t: f64) -> Jet;
}

/// ψ(t) = t, which gives back the classical identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Multiplier for Identity {
    fn jet(&self, t: f64) -> Jet {
        Jet { value: t, d1: 1.0, d2: 0.0, d3: 0.0, value_over_t: 1.0, defect_over_t3: 0.0 }
    }
}

impl Multiplier for PsiSeries {
    fn jet(&self, t: f64) -> Jet {
        let mut jet = Jet { value: 0.0, d1: 0.0, d2: 0.0, d3: 0.0, value_over_t: 0.0, defect_over_t3: 0.0 };
        for j in (self.leading_power()..=self.last_index()).step_by(2) {
            let a = self.coeffs[j];
            let jf = j as f64;
            let p = |k: i32| if k < 0 { 0.0 } else { t.powi(k) };
            let ji = j as i32;
            jet.value += a * p(ji);
            jet.d1 += a * jf * p(ji - 1);
            jet.d2 += a * jf * (jf - 1.0) * p(ji - 2);
            jet.d3 += a * jf * (jf - 1.0) * (jf - 2.0) * p(ji - 3);
            jet.value_over_t += a * p(ji - 1);
            if j > 1 {
                jet.defect_over_t3 += a * (1.0 - jf) * p(ji - 3);
            }
        }
        jet
    }
}

/// μψ′ + ¼ψ‴ + ¼(n−1)(n−3)(ψ − tψ′)/t³.
pub fn ode_residual(m: &dyn Multiplier, n: u32, mu: f64, t: f64) -> f64 {
    let j = m.jet(t);
    let c = ((n - 1) * (n - 3)) as f64;
    mu * j.d1 + 0.25 * j.d3 + 0.25 * c * j.defect_over_t3
}

pub fn eval_psi_jet(m: &dyn Multiplier, n: u32, mu: f64, t: f64) -> (Jet, f64) {
    (m.jet(t), ode_residual(m, n, mu, t))
}

/// ψ̄ = ψ₁ + ψ₂.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiBar {
    pub psi1: PsiSeries,
    pub psi2: PsiSeries,
}

impl PsiBar {
    /// Combination with the given seeds and no sign checks.
    pub fn from_seeds(n: u32, mu: f64, a1: f64, a_top: f64) -> Result<Self> {
        Ok(Self {
            psi1: PsiSeries::new(n, mu, SeriesKind::Odd, a1, DEFAULT_DEGREE)?,
            psi2: PsiSeries::new(n, mu, SeriesKind::Even, a_top, DEFAULT_DEGREE)?,
        })
    }

    pub fn n(&self) -> u32 {
        self.psi1.n
    }

    pub fn mu(&self) -> f64 {
        self.psi1.mu
    }

    pub fn a1(&self) -> f64 {
        self.psi1.seed
    }

    pub fn a_top(&self) -> f64 {
        self.psi2.seed
    }

    pub fn tail_bound(&self) -> f64 {
        self.psi1.tail_bound + self.psi2.tail_bound
    }

    pub fn derivative_tail_bound(&self) -> f64 {
        self.psi1.derivative_tail_bound + self.psi2.derivative_tail_bound
    }

    /// ψ̄(t)/t.
    pub fn normalized(&self, t: f64) -> f64 {
        self.psi1.normalized(t) + t.powi(self.n() as i32 - 2) * self.psi2.normalized(t)
    }
}

impl Multiplier for PsiBar {
    fn jet(&self, t: f64) -> Jet {
        self.psi1.jet(t).add(self.psi2.jet(t))
    }
}

/// Grid resolution of the sign and positivity scans.
pub const SCAN_POINTS: usize = 4000;

/// Minimum of `f` over t_i = i/N, i = from..=N, lowest t on ties.
pub(crate) fn grid_min<F: Fn(f64) -> f64 + Sync>(f: F, from: usize) -> (f64, f64) {
    let vals: Vec<(f64, f64)> = (from..=SCAN_POINTS)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / SCAN_POINTS as f64;
            (f(t), t)
        })
        .collect();
    vals.into_iter().fold((f64::INFINITY, 0.0), |best, cur| {
        if cur.0 < best.0 || cur.0.is_nan() {
            cur
        } else {
            best
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignCertificate {
    pub expected: Sign,
    pub passed: bool,
    /// min of sign·ψ/t^{lead} − tail over the grid.
    pub margin: f64,
    pub argmin_t: f64,
    /// First grid point where the certificate fails.
    pub violating_t: Option<f64>,
}

/// Checks sign·ψ(t)/t^{lead} − tail > 0 on a dense grid of (0, 1].
pub fn sign_certificate(series: &PsiSeries, expected: Sign) -> SignCertificate {
    let s = expected.factor();
    let tail = series.tail_bound;
    let check = |t: f64| s * series.normalized(t) - tail;
    let (margin, argmin_t) = grid_min(check, 1);
    let passed = margin > 0.0;
    let violating_t = if passed {
        None
    } else {
        (1..=SCAN_POINTS)
            .map(|i| i as f64 / SCAN_POINTS as f64)
            .find(|&t| !(check(t) > 0.0))
    };
    SignCertificate { expected, passed, margin, argmin_t, violating_t }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiBarCertificate {
    pub psibar: PsiBar,
    pub psi1: SignCertificate,
    pub psi2: SignCertificate,
    /// min of ψ̄/t − tail over [0, 1].
    pub nonnegativity_margin: f64,
    pub argmin_t: f64,
    pub value_at_one: f64,
    /// Number of dyadic trial seeds tried.
    pub trials: usize,
}

/// Largest number of halvings in the a_{n−1} scan.
pub const SEED_SCAN_DEPTH: u32 = 40;

/// Fixes a₁ = 1 and takes the first a_{n−1} ∈ {−1, −½, −¼, …} for which ψ̄ ≥ 0
/// is certified on [0, 1].
pub fn build_psibar(n: u32, mu: f64) -> Result<PsiBarCertificate> {
    let psi1 = PsiSeries::odd(n, mu, 1.0)?;
    let c1 = sign_certificate(&psi1, Sign::Positive);
    let probe = PsiSeries::even(n, mu, -1.0)?;
    let c2 = sign_certificate(&probe, Sign::Negative);
    if !c1.passed || !c2.passed {
        return Err(Error::PsiBarConstruction(format!(
            "sign certificates fail at mu = {mu} (psi1 margin {:.3e}, psi2 margin {:.3e})",
            c1.margin, c2.margin
        )));
    }
    for k in 0..=SEED_SCAN_DEPTH {
        let a_top = -(0.5f64).powi(k as i32);
        let psibar = PsiBar::from_seeds(n, mu, 1.0, a_top)?;
        let tail = psibar.tail_bound();
        let (margin, argmin_t) = grid_min(|t| psibar.normalized(t) - tail, 0);
        if margin >= 0.0 {
            let psi2 = sign_certificate(&psibar.psi2, Sign::Negative);
            let value_at_one = psibar.jet(1.0).value;
            return Ok(PsiBarCertificate {
                psibar,
                psi1: c1,
                psi2,
                nonnegativity_margin: margin,
                argmin_t,
                value_at_one,
                trials: k as usize + 1,
            });
        }
    }
    Err(Error::PsiBarConstruction(format!(
        "no a_(n-1) in -2^-k, k <= {SEED_SCAN_DEPTH}, keeps psibar >= 0 at mu = {mu}"
    )))
}

/// Both sign certificates pass at μ.
pub fn signs_certified(n: u32, mu: f64) -> Result<bool> {
    let a = sign_certificate(&PsiSeries::odd(n, mu, 1.0)?, Sign::Positive);
    let b = sign_certificate(&PsiSeries::even(n, mu, -1.0)?, Sign::Negative);
    Ok(a.passed && b.passed)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuEstimate {
    pub n: u32,
    /// Largest μ found where both certificates pass.
    pub passing: f64,
    /// Smallest μ found where one fails.
    pub failing: f64,
}

/// Bisection for the largest μ at which both sign certificates hold.
pub fn estimate_mu_n(n: u32) -> Result<MuEstimate> {
    let mut lo = 0.0;
    let mut hi = 0.125;
    while signs_certified(n, hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e3 {
            return Err(Error::Domain("sign certificates pass up to mu = 1e3".into()));
        }
    }
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if signs_certified(n, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MuEstimate { n, passing: lo, failing: hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_residual_is_mu() {
        for &t in &[0.0, 0.2, 0.9, 1.0] {
            assert_eq!(ode_residual(&Identity, 5, 0.0, t), 0.0);
            assert!((ode_residual(&Identity, 5, 2.5, t) - 2.5).abs() <= 1e-12);
        }
    }

    #[test]
    fn series_residual_small() {
        let s = PsiSeries::new(5, 1.0, SeriesKind::Odd, 1.0, 60).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..=200 {
            let t = 0.01 + 0.99 * i as f64 / 200.0;
            worst = worst.max(ode_residual(&s, 5, 1.0, t).abs());
        }
        assert!(worst <= 1e-8, "{worst}");
        let e = PsiSeries::new(21, 3.0, SeriesKind::Even, -1.0, 60).unwrap();
        for &t in &[0.1, 0.5, 1.0] {
            assert!(ode_residual(&e, 21, 3.0, t).abs() <= 1e-8);
        }
    }

    #[test]
    fn jet_matches_finite_differences() {
        let s = PsiBar::from_seeds(5, 2.0, 1.0, -0.5).unwrap();
        let t = 0.6;
        let h = 1e-4;
        let j = s.jet(t);
        let (jp, jm) = (s.jet(t + h), s.jet(t - h));
        assert_relative_eq!(j.d1, (jp.value - jm.value) / (2.0 * h), max_relative = 1e-7);
        assert_relative_eq!(j.d3, (jp.d2 - jm.d2) / (2.0 * h), max_relative = 1e-7);
        assert_relative_eq!(j.defect_over_t3, (j.value - t * j.d1) / t.powi(3), max_relative = 1e-12);
        assert_relative_eq!(s.normalized(t), j.value / t, max_relative = 1e-13);
    }

    #[test]
    fn jet_limits_at_origin() {
        let s = PsiBar::from_seeds(5, 0.5, 1.0, -1.0).unwrap();
        let j = s.jet(0.0);
        assert_eq!(j.value, 0.0);
        assert_eq!(j.d1, 1.0);
        assert_relative_eq!(j.defect_over_t3, -2.0 * 0.2, max_relative = 1e-14);
    }

    #[test]
    fn sign_certificates_small_mu() {
        let p1 = PsiSeries::odd(5, 0.01, 1.0).unwrap();
        assert!(sign_certificate(&p1, Sign::Positive).passed);
        let p2 = PsiSeries::even(5, 0.01, -1.0).unwrap();
        assert!(sign_certificate(&p2, Sign::Negative).passed);
        let flipped = PsiSeries::even(5, 0.01, 1.0).unwrap();
        let c = sign_certificate(&flipped, Sign::Negative);
        assert!(!c.passed);
        assert_eq!(c.violating_t, Some(1.0 / SCAN_POINTS as f64));
        assert!(sign_certificate(&flipped, Sign::Positive).passed);
    }

    #[test]
    fn psibar_at_zero_mu() {
        let c = build_psibar(5, 0.0).unwrap();
        assert_eq!(c.psibar.a_top(), -1.0);
        assert_eq!(c.trials, 1);
        assert!(c.nonnegativity_margin.abs() < 1e-15);
    }

    #[test]
    fn psibar_small_mu() {
        let c = build_psibar(5, 0.01).unwrap();
        assert!(c.nonnegativity_margin >= 0.0);
        assert!(c.value_at_one >= 0.0);
        assert!(c.psibar.a_top() < 0.0);
    }

    #[test]
    fn psibar_fails_for_large_mu() {
        let est = estimate_mu_n(5).unwrap();
        assert!(est.passing > 0.0 && est.failing > est.passing);
        assert!(est.failing - est.passing < 1e-9 * est.failing.max(1.0));
        assert!(matches!(
            build_psibar(5, est.failing * 1.01),
            Err(Error::PsiBarConstruction(_))
        ));
    }
}
