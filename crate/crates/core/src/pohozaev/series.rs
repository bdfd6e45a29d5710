use serde::Serialize;

use crate::error::{Error, Result};

/// Default truncation degree.
pub const DEFAULT_DEGREE: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// Odd powers, seeded by a₁.
    Odd,
    /// Even powers from t^{n−1} on, seeded by a_{n−1}.
    Even,
}

/// Truncated power series solution of
/// μψ′ + ¼ψ‴ + ¼(n−1)(n−3)t^{−3}(ψ − tψ′) = 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiSeries {
    pub n: u32,
    pub mu: f64,
    pub kind: SeriesKind,
    pub seed: f64,
    /// `coeffs[j]` multiplies t^j, j = 0..=degree.
    pub coeffs: Vec<f64>,
    /// Bound on |Σ_{j>degree} a_j t^j| for t ∈ [0, 1].
    pub tail_bound: f64,
    /// Bound on Σ_{j>degree} j|a_j|, which dominates every first-order tail
    /// on [0, 1].
    pub derivative_tail_bound: f64,
}

/// a_j / a_{j−2} from the recurrence, with c = (n−1)(n−3).
fn ratio(j: usize, mu: f64, c: f64) -> Result<f64> {
    let jf = j as f64;
    let bracket = jf * (jf - 2.0) - c;
    if bracket == 0.0 {
        return Err(Error::VanishingDenominator { n: 0 });
    }
    Ok(-4.0 * mu * (jf - 2.0) / ((jf - 1.0) * bracket))
}

/// Leading power of the series: 1 (odd) or n−1 (even).
pub fn leading_power(n: u32, kind: SeriesKind) -> usize {
    match kind {
        SeriesKind::Odd => 1,
        SeriesKind::Even => n as usize - 1,
    }
}

impl PsiSeries {
    pub fn new(n: u32, mu: f64, kind: SeriesKind, seed: f64, degree: usize) -> Result<Self> {
        if n < 5 || n % 2 == 0 {
            return Err(Error::VanishingDenominator { n });
        }
        if degree < n as usize + 1 {
            return Err(Error::InvalidParameter(format!(
                "truncation degree {degree} must be at least n + 1 = {}",
                n + 1
            )));
        }
        if seed == 0.0 || !seed.is_finite() {
            return Err(Error::InvalidParameter("series seed must be finite and nonzero".into()));
        }
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("mu must be finite and >= 0, got {mu}")));
        }
        let c = ((n - 1) * (n - 3)) as f64;
        let lead = leading_power(n, kind);
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[lead] = seed;
        let mut j = lead + 2;
        while j <= degree {
            coeffs[j] = ratio(j, mu, c).map_err(|_| Error::VanishingDenominator { n })? * coeffs[j - 2];
            j += 2;
        }
        let last = j - 2;
        let (tail_bound, derivative_tail_bound) = tail_bounds(coeffs[last], last, mu, c);
        Ok(Self { n, mu, kind, seed, coeffs, tail_bound, derivative_tail_bound })
    }

    pub fn odd(n: u32, mu: f64, a1: f64) -> Result<Self> {
        Self::new(n, mu, SeriesKind::Odd, a1, DEFAULT_DEGREE)
    }

    pub fn even(n: u32, mu: f64, a_top: f64) -> Result<Self> {
        Self::new(n, mu, SeriesKind::Even, a_top, DEFAULT_DEGREE)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading_power(&self) -> usize {
        leading_power(self.n, self.kind)
    }

    /// Highest nonzero-parity index kept.
    pub fn last_index(&self) -> usize {
        let d = self.degree();
        if (d - self.leading_power()) % 2 == 0 {
            d
        } else {
            d - 1
        }
    }

    pub fn coefficient(&self, j: usize) -> f64 {
        self.coeffs.get(j).copied().unwrap_or(0.0)
    }

    /// ψ(t)/t^{lead}, finite at t = 0.
    pub fn normalized(&self, t: f64) -> f64 {
        let lead = self.leading_power();
        let mut acc = 0.0;
        for j in (lead..=self.last_index()).rev().step_by(2) {
            acc = acc * t * t + self.coeffs[j];
        }
        acc
    }

    /// Remainder of the truncated series in the ODE: μ·J·a_J·t^{J−1} with J the
    /// last kept index.
    pub fn truncation_residual(&self, t: f64) -> f64 {
        let j = self.last_index();
        self.mu * j as f64 * self.coeffs[j] * t.powi(j as i32 - 1)
    }
}

/// Σ_{m≥1}|a_{J+2m}| and Σ_{m≥1}(J+2m)|a_{J+2m}| from the exact ratio, which
/// is decreasing beyond J once J(J+2) exceeds (n−1)(n−3).
fn tail_bounds(a_last: f64, last: usize, mu: f64, c: f64) -> (f64, f64) {
    if a_last == 0.0 || mu == 0.0 {
        return (0.0, 0.0);
    }
    let rho = (1..=200)
        .map(|m| ratio(last + 2 * m, mu, c).map(f64::abs).unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    if rho >= 1.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let a = a_last.abs();
    let geometric = rho / (1.0 - rho);
    let weighted = last as f64 * geometric + 2.0 * rho / (1.0 - rho).powi(2);
    (a * geometric, a * weighted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn odd_coefficients_five() {
        let mu = 0.7;
        let s = PsiSeries::odd(5, mu, 1.0).unwrap();
        assert_relative_eq!(s.coefficient(3), 2.0 * mu / 5.0, max_relative = 1e-15);
        assert_relative_eq!(s.coefficient(5), -6.0 * mu * mu / 35.0, max_relative = 1e-14);
        assert!(s.coeffs.iter().step_by(2).all(|&c| c == 0.0));
    }

    #[test]
    fn even_coefficients_five() {
        let mu = 0.3;
        let s = PsiSeries::even(5, mu, -1.0).unwrap();
        assert_eq!(s.coefficient(0), 0.0);
        assert_eq!(s.coefficient(2), 0.0);
        assert_relative_eq!(s.coefficient(6), mu / 5.0, max_relative = 1e-15);
        assert!(s.coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0));
    }

    #[test]
    fn zero_mu_truncates_to_monomials() {
        let a = PsiSeries::odd(5, 0.0, 1.0).unwrap();
        assert_eq!(a.coeffs.iter().filter(|c| **c != 0.0).count(), 1);
        assert_eq!(a.tail_bound, 0.0);
        let b = PsiSeries::even(21, 0.0, -2.0).unwrap();
        assert_eq!(b.coefficient(20), -2.0);
        assert_eq!(b.coeffs.iter().filter(|c| **c != 0.0).count(), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            PsiSeries::odd(6, 1.0, 1.0),
            Err(Error::VanishingDenominator { n: 6 })
        ));
        assert!(PsiSeries::odd(5, 1.0, 0.0).is_err());
        assert!(PsiSeries::new(5, 1.0, SeriesKind::Odd, 1.0, 5).is_err());
    }

    #[test]
    fn denominators_never_vanish_in_odd_dimensions() {
        for n in [5u32, 21, 23, 25, 41] {
            let c = ((n - 1) * (n - 3)) as f64;
            let used = (3..=201usize).step_by(2).chain((n as usize + 1..=200).step_by(2));
            for j in used {
                assert!(ratio(j, 1.0, c).is_ok(), "n = {n}, j = {j}");
            }
        }
    }

    #[test]
    fn tail_bound_dominates_extension() {
        let mu = 5.0;
        let short = PsiSeries::new(5, mu, SeriesKind::Odd, 1.0, 21).unwrap();
        let long = PsiSeries::new(5, mu, SeriesKind::Odd, 1.0, 201).unwrap();
        let actual: f64 = long.coeffs[22..].iter().map(|c| c.abs()).sum();
        assert!(actual <= short.tail_bound);
        assert!(short.tail_bound < 10.0 * actual);
    }
}
