use critex_core::bubble::{evaluate_criteria, KSpec, ProblemSpec, RadialProfile};
use critex_core::pohozaev::{certify_nonexistence, CertificateVerdict};
use critex_core::shoot::{find_ground_state, ShootOptions};

fn quadratic(eta: f64, mu: f64) -> ProblemSpec {
    let k = KSpec::new(1.0, eta, RadialProfile::neg_t2(), None).unwrap();
    ProblemSpec::centered(5, k, mu).unwrap()
}

#[test]
fn certified_problems_have_no_ground_state() {
    let opts = ShootOptions::default();
    let mut certified = 0;
    for eta in [0.05, 0.2] {
        let star = 15.0 * eta / 16.0;
        for frac in [0.2, 0.5, 0.8, 0.95] {
            let spec = quadratic(eta, frac * star);
            let cert = certify_nonexistence(&spec).unwrap();
            if cert.verdict != CertificateVerdict::NonexistenceCertified {
                continue;
            }
            certified += 1;
            let g = find_ground_state(&spec, 0.1, 1e6, &opts).unwrap();
            assert!(g.solution().is_none(), "eta = {eta}, mu = {}", spec.mu);
        }
    }
    assert!(certified >= 6);
}

#[test]
fn strict_criterion_problems_have_a_ground_state() {
    let opts = ShootOptions::default();
    for mu in [0.1, 1.0, 10.0] {
        let spec = quadratic(0.05, mu);
        assert!(evaluate_criteria(&spec, &[10.0]).unwrap().sufficient_condition_holds);
        assert_eq!(certify_nonexistence(&spec).unwrap().verdict, CertificateVerdict::CriterionStrict);
        let g = find_ground_state(&spec, 0.1, 1e7, &opts).unwrap();
        let u = g.solution().expect("ground state");
        assert!(u.interior_min > 0.0);
        assert!(u.boundary_defect <= 1e-8);
    }
}
