use critex_core::bubble::{
    bubble_radial, condition_one, energy_ratio_direct, evaluate_criteria, expansion_prefactor,
    KSpec, ProblemSpec, RadialProfile,
};
use critex_core::constants::dimension_constants;
use critex_core::green::{geometry_constants, BallGeometry};
use critex_core::pohozaev::{ode_residual, Multiplier, PsiBar, PsiSeries, SeriesKind};
use proptest::prelude::*;

fn quadratic(f0: f64, eta: f64, mu: f64) -> ProblemSpec {
    let k = KSpec::new(f0, eta, RadialProfile::neg_t2(), None).unwrap();
    ProblemSpec::centered(5, k, mu).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn series_is_linear_in_seed(mu in 0.0f64..8.0, seed in 0.1f64..10.0, odd in any::<bool>()) {
        let kind = if odd { SeriesKind::Odd } else { SeriesKind::Even };
        let one = PsiSeries::new(5, mu, kind, 1.0, 80).unwrap();
        let scaled = PsiSeries::new(5, mu, kind, seed, 80).unwrap();
        for (a, b) in one.coeffs.iter().zip(&scaled.coeffs) {
            prop_assert!((seed * a - b).abs() <= 1e-13 * b.abs().max(f64::MIN_POSITIVE));
        }
        prop_assert!((seed * one.tail_bound - scaled.tail_bound).abs() <= 1e-12 * scaled.tail_bound.max(1e-300));
    }

    #[test]
    fn multiplier_solves_its_ode(mu in 0.0f64..5.0, t in 0.01f64..1.0, top in -2.0f64..-0.01) {
        let bar = PsiBar::from_seeds(5, mu, 1.0, top).unwrap();
        let scale = bar.jet(t).value.abs().max(1.0);
        prop_assert!(ode_residual(&bar, 5, mu, t).abs() <= 1e-9 * scale);
    }

    #[test]
    fn condition_margin_grows_with_mu(eta in 0.0f64..0.5, mu in 0.0f64..10.0, dmu in 0.01f64..5.0) {
        let lo = condition_one(&quadratic(1.0, eta, mu));
        let hi = condition_one(&quadratic(1.0, eta, mu + dmu));
        prop_assert!(hi.margin > lo.margin);
        prop_assert_eq!(lo.lhs, hi.lhs);
    }

    #[test]
    fn scaling_k_leaves_conditions_and_rescales_energy(c in 0.2f64..5.0, eta in 0.0f64..0.5, mu in 0.1f64..5.0) {
        let base = quadratic(1.0, eta, mu);
        let scaled = quadratic(c, c * eta, mu);
        let (a, b) = (condition_one(&base), condition_one(&scaled));
        prop_assert!((a.lhs - b.lhs).abs() <= 1e-12 * a.lhs.abs().max(1e-300));
        prop_assert_eq!(a.verdict, b.verdict);
        prop_assert!((expansion_prefactor(&base) - c * expansion_prefactor(&scaled)).abs() <= 1e-12 * expansion_prefactor(&base));
        let (da, db) = (energy_ratio_direct(&base, 20.0).unwrap(), energy_ratio_direct(&scaled, 20.0).unwrap());
        prop_assert!((da.powered - c * db.powered).abs() <= 1e-9 * da.powered.abs());
    }

    #[test]
    fn bubble_is_positive_and_decreasing(r in 0.0f64..1.0, dr in 1e-3f64..0.5, lambda in 1.0f64..100.0) {
        let a = bubble_radial(5, r, lambda);
        let b = bubble_radial(5, r + dr, lambda);
        prop_assert!(a > b && b > 0.0);
    }

    #[test]
    fn geometry_is_affine_in_mu(mu in 0.0f64..20.0) {
        let consts = dimension_constants(5).unwrap();
        let g = BallGeometry::centered(5);
        let zero = geometry_constants(&g, 0.0, &consts).unwrap();
        let at = geometry_constants(&g, mu, &consts).unwrap();
        let slope = -at.c6b.value / consts.cn;
        prop_assert!((at.c4_expansion - (zero.c4_expansion + mu * slope)).abs() <= 1e-12 * at.c4_expansion.abs());
        prop_assert!((at.c4b - at.c4_expansion - 2.0 * mu * at.c6b.value / consts.cn).abs() <= 1e-12 * at.c4b.abs().max(1.0));
    }
}

#[test]
fn criteria_are_deterministic() {
    let s = quadratic(1.0, 0.05, 0.046875);
    let a = evaluate_criteria(&s, &[10.0, 20.0, 40.0]).unwrap();
    let b = evaluate_criteria(&s, &[10.0, 20.0, 40.0]).unwrap();
    assert_eq!(a, b);
}

#[test]
fn increasing_profile_is_not_monotone() {
    let k = KSpec::general(1.0, 0.1, RadialProfile::polynomial(vec![1.0]), None).unwrap();
    assert!(!k.monotone);
    assert!(KSpec::new(1.0, 0.1, RadialProfile::polynomial(vec![1.0]), None).is_err());
}
