use degenpde::analysis::fit_power_law;
use degenpde::regimes::{balance_alpha, big_d, c_star, ell_star, gamma_decay};
use degenpde::{classify, CaseId, ConstantsRequest, Error, InterfaceTrace, Params, ShapeFunction, ShapeKind};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn any_params() -> impl Strategy<Value = Params> {
    (0.05f64..4.0, 0.2f64..4.0, -3.0f64..3.0, 0.05f64..2.0, 0.1f64..20.0, 0.01f64..10.0)
        .prop_map(|(m, p, b, beta, alpha, c)| Params::new(m, p, b, beta, alpha, c))
}

// (m, p, b, beta) with 0 < beta < mp < 1, b > 0.
fn weak_absorption() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.3f64..3.0, 0.2f64..0.95, 0.05f64..0.8, 0.2f64..5.0).prop_map(|(p, mp, frac, b)| (mp / p, p, b, mp * frac))
}

// Predicate restatement of the case table, used as the partition oracle.
fn expected_case(q: &Params) -> CaseId {
    let mp = q.m * q.p;
    if q.b <= 0.0 || q.beta > mp {
        return CaseId::V;
    }
    if q.beta == mp {
        return CaseId::IV;
    }
    let ab = (1.0 + q.p) / (mp - q.beta);
    if q.alpha < ab {
        CaseId::I
    } else {
        CaseId::III
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn classification_is_total_and_matches_the_table(q in any_params()) {
        let mp = q.m * q.p;
        match classify(&q) {
            Ok(c) => {
                prop_assert!(mp > 0.0 && mp < 1.0);
                prop_assert!(!(q.b < 0.0 && q.beta < 1.0));
                // generic draws never hit the measure-zero balance set
                prop_assert_eq!(c.case_id, expected_case(&q));
            }
            Err(Error::InvalidRegime(_)) => prop_assert!(!(mp > 0.0 && mp < 1.0)),
            Err(Error::ExcludedCase) => prop_assert!(q.b < 0.0 && q.beta < 1.0),
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn validate_is_idempotent(q in any_params()) {
        if let Ok(v) = q.validate() {
            prop_assert_eq!(v.validate().unwrap(), v);
            prop_assert_eq!(v, q);
        }
    }

    #[test]
    fn balance_line_is_case_two((m, p, b, beta) in weak_absorption(), k in 0.2f64..5.0) {
        let base = Params::new(m, p, b, beta, 1.0, 1.0);
        let q = base.with_alpha(balance_alpha(&base));
        let cs = c_star(&q).unwrap();
        let id = classify(&q.with_c(k * cs)).unwrap().case_id;
        prop_assert!(id.is_balance());
        prop_assert_eq!(classify(&q.with_c(cs)).unwrap().case_id, CaseId::IIStationary);
    }

    #[test]
    fn expanding_bounds_are_ordered((m, p, b, beta) in weak_absorption(), frac in 0.05f64..0.99, c in 0.1f64..10.0) {
        let base = Params::new(m, p, b, beta, 1.0, c);
        let q = base.with_alpha(frac * balance_alpha(&base));
        let case = classify(&q).unwrap();
        prop_assert_eq!(case.case_id, CaseId::I);
        let (z1, z2) = case.predicted_coefficient_bounds.unwrap();
        prop_assert!(z1 > 0.0 && z1 <= z2 * (1.0 + 1e-12), "zeta_1 {} zeta_2 {}", z1, z2);
    }

    // C* |x|^{(1+p)/(mp-beta)} is a stationary solution: check the
    // equation with nested central differences.
    #[test]
    fn c_star_profile_is_stationary((m, p, b, beta) in weak_absorption(), x in 0.5f64..2.0) {
        let q = Params::new(m, p, b, beta, 1.0, 1.0);
        let cs = c_star(&q).unwrap();
        let a = balance_alpha(&q);
        let w = |y: f64| (cs * y.powf(a)).powf(m);
        let h = 1e-4 * x;
        let flux = |y: f64| {
            let g = (w(y + h) - w(y - h)) / (2.0 * h);
            g.abs().powf(p - 1.0) * g
        };
        let lhs = (flux(x + h) - flux(x - h)) / (2.0 * h);
        let rhs = b * (cs * x.powf(a)).powf(beta);
        prop_assert!((lhs - rhs).abs() <= 1e-4 * rhs, "{} vs {}", lhs, rhs);
    }

    // D t^{1/(1-mp)} x^{(1+p)/(mp-1)} solves the b = 0 equation.
    #[test]
    fn d_profile_solves_fast_diffusion(p in 0.3f64..3.0, mp in 0.1f64..0.9, x in 0.5f64..2.0, t in 0.5f64..2.0) {
        let m = mp / p;
        let q = Params::new(m, p, 0.0, 1.0, 1.0, 1.0);
        let d = big_d(&q);
        let u = |y: f64, s: f64| d * s.powf(1.0 / (1.0 - mp)) * y.powf((1.0 + p) / (mp - 1.0));
        let h = 1e-4 * x;
        let flux = |y: f64| {
            let g = (u(y + h, t).powf(m) - u(y - h, t).powf(m)) / (2.0 * h);
            g.abs().powf(p - 1.0) * g
        };
        let div = (flux(x + h) - flux(x - h)) / (2.0 * h);
        let ut = (u(x, t + 1e-5) - u(x, t - 1e-5)) / 2e-5;
        prop_assert!((ut - div).abs() <= 1e-4 * ut.abs(), "{} vs {}", ut, div);
    }

    // The absorption-only profile vanishes exactly on x = -ell* t^{1/(alpha(1-beta))}.
    #[test]
    fn ell_star_zero_of_pure_absorption((m, p, b, beta) in weak_absorption(), over in 1.05f64..3.0, c in 0.1f64..10.0) {
        let base = Params::new(m, p, b, beta, 1.0, c);
        let q = base.with_alpha(over * balance_alpha(&base));
        let ls = ell_star(&q).unwrap();
        let lhs = c.powf(1.0 - beta) * ls.powf(q.alpha * (1.0 - beta));
        prop_assert!((lhs - b * (1.0 - beta)).abs() <= 1e-12 * lhs);
    }

    // phi = e^{-gamma x} balances the flux divergence p (m gamma)^{1+p} phi^{mp}
    // against b phi^{mp}, the leading terms as phi -> 0.
    #[test]
    fn gamma_linear_tail(p in 0.3f64..3.0, m in 0.05f64..0.3, b in 0.1f64..5.0) {
        let q = Params::new(m, p, b, m * p, 1.0, 1.0);
        let g = gamma_decay(&q).unwrap();
        prop_assert!((p * (m * g).powf(1.0 + p) - b).abs() <= 1e-12 * b);
    }

    #[test]
    fn pchip_preserves_monotonicity(steps in prop::collection::vec((0.01f64..1.0, 0.0f64..1.0), 3..40)) {
        let mut xs = vec![0.0];
        let mut ys = vec![0.0];
        for (dx, dy) in &steps {
            xs.push(xs.last().unwrap() + dx);
            ys.push(ys.last().unwrap() + dy * dy * dy);
        }
        let f = ShapeFunction::new(xs.clone(), ys, ShapeKind::FSelfsim, 0.0).unwrap();
        let hi = *xs.last().unwrap();
        let mut prev = f.interp(0.0).unwrap();
        for k in 1..=2000 {
            let v = f.interp((hi * k as f64 / 2000.0).min(hi)).unwrap();
            prop_assert!(v >= prev - 1e-14, "drop at {}", k);
            prev = v;
        }
    }
}

#[test]
fn constants_request_rejects_bad_epsilon() {
    let q = Params::new(0.5, 1.0, 1.0, 0.25, 1.0, 1.0);
    assert!(degenpde::regimes::appendix_constants(&ConstantsRequest::new(q, 1.5)).is_err());
}

// 1% multiplicative noise on an exact law moves the fitted exponent by
// well under 0.01.
#[test]
fn fit_noise_calibration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let noise = Normal::new(0.0, 0.01).unwrap();
    for _ in 0..50 {
        let samples = (0..25)
            .map(|i| {
                let t = 1e-3 * 50f64.powf(i as f64 / 24.0);
                (t, 3.0 * t.powf(1.0 / 6.0) * (1.0 + noise.sample(&mut rng)))
            })
            .collect();
        let trace = InterfaceTrace { samples, ..Default::default() };
        let fit = fit_power_law(&trace, (1e-3, 5e-2), 1e-6).unwrap();
        assert!((fit.exponent - 1.0 / 6.0).abs() < 0.01, "{}", fit.exponent);
    }
}
