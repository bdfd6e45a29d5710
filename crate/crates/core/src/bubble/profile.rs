use serde::Serialize;

use crate::constants::{ball_first_eigenvalue, dimension_constants, DimensionConstants};
use crate::error::{Error, Result};
use crate::green::BallGeometry;

/// Polynomial radial profile f₁(t) = Σ_{k≥2} c_k t^k; `coeffs[i]` multiplies
/// t^{i+2}. Starting at t² forces f₁(0) = f₁′(0) = 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialProfile {
    pub coeffs: Vec<f64>,
}

impl RadialProfile {
    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// f₁(t) = −t².
    pub fn neg_t2() -> Self {
        Self { coeffs: vec![-1.0] }
    }

    /// Coefficient of t^k.
    pub fn coefficient(&self, k: usize) -> f64 {
        if k < 2 {
            0.0
        } else {
            self.coeffs.get(k - 2).copied().unwrap_or(0.0)
        }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() + 1
    }

    pub fn value(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c)
            * t
            * t
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.derivative_over_t(t) * t
    }

    /// f₁′(t)/t, finite at t = 0.
    pub fn derivative_over_t(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, &c)| acc * t + (i as f64 + 2.0) * c)
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, &c)| {
                let k = i as f64 + 2.0;
                acc * t + k * (k - 1.0) * c
            })
    }

    pub fn second_at_zero(&self) -> f64 {
        2.0 * self.coefficient(2)
    }

    /// f₁(t) − f₁″(0)t²/2, i.e. the terms of degree ≥ 3.
    pub fn cubic_tail(&self, t: f64) -> f64 {
        if self.coeffs.len() < 2 {
            return 0.0;
        }
        self.coeffs[1..]
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c)
            * t.powi(3)
    }
}

/// Local constants of the (K₃) condition: 0 ≤ f₁′ − t f₁″(0) ≤ M₀ t^{n−3} or
/// f₁′ − t f₁″(0) ≤ 0 on (0, δ].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct K3Data {
    pub delta: f64,
    pub m0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KSpec {
    /// K(y0).
    pub f0: f64,
    pub eta: f64,
    pub f1: RadialProfile,
    pub k3: Option<K3Data>,
    /// f₁ non-increasing on [0, 1].
    pub monotone: bool,
}

pub const VALIDATION_GRID: usize = 2000;

impl KSpec {
    /// K = f0 + η f₁(|x − y0|) with f₁ non-increasing on [0, 1].
    pub fn new(f0: f64, eta: f64, f1: RadialProfile, k3: Option<K3Data>) -> Result<Self> {
        let spec = Self::general(f0, eta, f1, k3)?;
        if !spec.monotone {
            return Err(Error::InvalidParameter(
                "f1 must be non-increasing on [0, 1]".into(),
            ));
        }
        Ok(spec)
    }

    /// A C² profile that need not be monotone; only K ≥ 0 is enforced.
    pub fn general(f0: f64, eta: f64, f1: RadialProfile, k3: Option<K3Data>) -> Result<Self> {
        if !(f0 > 0.0) {
            return Err(Error::InvalidParameter(format!("f0 must be > 0, got {f0}")));
        }
        if !(eta >= 0.0) {
            return Err(Error::InvalidParameter(format!("eta must be >= 0, got {eta}")));
        }
        if f1.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("f1 coefficients must be finite".into()));
        }
        if let Some(d) = k3 {
            if !(d.delta > 0.0 && d.delta <= 1.0 && d.m0 >= 0.0) {
                return Err(Error::InvalidParameter("K3 data needs 0 < delta <= 1, M0 >= 0".into()));
            }
        }
        let mut monotone = true;
        let scale = 1.0 + f1.coeffs.iter().map(|c| c.abs()).sum::<f64>();
        for i in 0..=VALIDATION_GRID {
            let t = i as f64 / VALIDATION_GRID as f64;
            if eta * f1.derivative(t) > 1e-12 * scale {
                monotone = false;
            }
        }
        let spec = Self { f0, eta, f1, k3, monotone };
        spec.check_range(1.0)?;
        if monotone {
            spec.check_peak(1.0)?;
        }
        Ok(spec)
    }

    /// Uniform K ≡ f0.
    pub fn constant(f0: f64) -> Result<Self> {
        Self::new(f0, 0.0, RadialProfile::zero(), None)
    }

    /// K ≥ 0 on distances [0, reach].
    pub(crate) fn check_range(&self, reach: f64) -> Result<()> {
        let tol = 1e-12 * self.f0;
        for i in 0..=VALIDATION_GRID {
            let t = reach * i as f64 / VALIDATION_GRID as f64;
            let k = self.value(t);
            if k < -tol {
                return Err(Error::InvalidParameter(format!("K(t = {t}) = {k} is negative")));
            }
        }
        Ok(())
    }

    /// K ≤ K(y0) on distances [0, reach].
    pub(crate) fn check_peak(&self, reach: f64) -> Result<()> {
        let tol = 1e-12 * self.f0;
        for i in 0..=VALIDATION_GRID {
            let t = reach * i as f64 / VALIDATION_GRID as f64;
            let k = self.value(t);
            if k > self.f0 + tol {
                return Err(Error::InvalidParameter(format!(
                    "K(t = {t}) = {k} exceeds K(y0) = {}",
                    self.f0
                )));
            }
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        self.f0 + self.eta * self.f1.value(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.eta * self.f1.derivative(t)
    }

    /// ΔK(y0) = n η f₁″(0).
    pub fn laplacian_at_center(&self, n: u32) -> f64 {
        n as f64 * self.eta * self.f1.second_at_zero()
    }

    /// K(x)/K(y0) − 1 − ΔK(y0)|x−y0|²/(2nK(y0)) at distance t.
    pub fn taylor_remainder(&self, t: f64) -> f64 {
        self.eta * self.f1.cubic_tail(t) / self.f0
    }

    /// (K₃) for the polynomial profile: no terms of degree 3..=n−3.
    pub fn k3_holds(&self, n: u32) -> bool {
        let structural = (3..=(n as usize).saturating_sub(3))
            .all(|k| self.eta == 0.0 || self.f1.coefficient(k) == 0.0);
        let local = match self.k3 {
            None => true,
            Some(d) => (1..=VALIDATION_GRID).all(|i| {
                let t = d.delta * i as f64 / VALIDATION_GRID as f64;
                let g = self.f1.derivative(t) - t * self.f1.second_at_zero();
                let bound = d.m0 * t.powi(n as i32 - 3);
                g <= 1e-14 || g <= bound * (1.0 + 1e-12)
            }),
        };
        structural && local
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub consts: DimensionConstants,
    pub geom: BallGeometry,
    pub kspec: KSpec,
    pub mu: f64,
    /// First Dirichlet eigenvalue of the unit ball.
    pub mu1: f64,
}

impl ProblemSpec {
    pub fn new(geom: BallGeometry, kspec: KSpec, mu: f64) -> Result<Self> {
        let consts = dimension_constants(geom.n)?;
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be finite and >= 0, got {mu}")));
        }
        kspec.check_range(1.0 + geom.rho())?;
        if kspec.monotone {
            kspec.check_peak(1.0 + geom.rho())?;
        }
        let mu1 = ball_first_eigenvalue(geom.n)?;
        Ok(Self { consts, geom, kspec, mu, mu1 })
    }

    pub fn centered(n: u32, kspec: KSpec, mu: f64) -> Result<Self> {
        Self::new(BallGeometry::centered(n), kspec, mu)
    }

    pub fn n(&self) -> u32 {
        self.geom.n
    }

    pub fn k0(&self) -> f64 {
        self.kspec.f0
    }

    /// 0 < μ < μ₁(B).
    pub fn admissible(&self) -> bool {
        self.mu > 0.0 && self.mu < self.mu1
    }

    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be finite and >= 0, got {mu}")));
        }
        Ok(Self { mu, ..self.clone() })
    }
}
