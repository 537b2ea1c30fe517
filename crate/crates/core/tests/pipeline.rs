use nls_lab::asymptotics::{self, SizePolicy, SweepRecord};
use nls_lab::quadrature::{default_n, rule_on_interval};
use nls_lab::{nystrom, spectral, wienerhopf};
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn sweep_records_match_direct_solves() {
    let recs = asymptotics::sweep(&[30.0, 5.0, 12.0], SizePolicy::Default).unwrap();
    assert_eq!(
        recs.iter().map(|r| r.q_half_width).collect::<Vec<_>>(),
        vec![5.0, 12.0, 30.0]
    );
    for r in &recs {
        let s = nystrom::solve_rescaled(r.q_half_width, None).unwrap();
        assert_eq!(*r, SweepRecord::from_solve(&s));
        assert_eq!(r.n_points, default_n(r.q_half_width));
    }
}

#[test]
fn best_richardson_triple_lands_near_c_star() {
    let recs = asymptotics::sweep(&[50.0, 80.0, 100.0, 150.0, 200.0], SizePolicy::Default).unwrap();
    let rep = asymptotics::constant_c_report(&recs).unwrap();
    assert_eq!(rep.best_triples.len(), 10);
    // with Q <= 200 the triples sit 3e-6 to 6e-6 below C*
    assert!((rep.best_triples[0].c_extrapolated - asymptotics::C_STAR).abs() < 5e-6);
    assert!(rep
        .best_triples
        .iter()
        .all(|t| (t.c_extrapolated - asymptotics::C_STAR).abs() < 1e-5));
    // C_eff approaches C* from above
    assert!(rep.rows.iter().all(|r| r.deviation > 0.0));
    assert!(rep.rows.windows(2).all(|w| w[1].deviation < w[0].deviation));
}

#[test]
fn solver_and_spectrum_share_the_rule() {
    let q = 15.0;
    let s = nystrom::solve_rescaled(q, None).unwrap();
    let rule = rule_on_interval(q, s.n_points).unwrap();
    assert_eq!(rule.nodes, s.nodes);
    let spec = spectral::spectrum_on_rule(&rule, 1).unwrap();
    // the solve matrix 2πI − KW has smallest eigenvalue Δ₀, so its
    // inverse has norm at least 1/Δ₀
    assert!(
        s.condition_estimate
            >= (2.0 * PI - spec.all_eigenvalues.last().unwrap()) / spec.gaps[0] * 0.5
    );
}

#[test]
fn wh_prediction_tracks_solution() {
    let mut prev = f64::INFINITY;
    for q in [20.0, 40.0, 80.0] {
        let d = (wienerhopf::wh_peak_density(q).unwrap()
            - nystrom::solve_rescaled(q, None).unwrap().rho0)
            .abs();
        assert!(d < prev);
        prev = d;
    }
}

#[test]
fn density_fit_on_solver_data() {
    let recs =
        asymptotics::sweep(&asymptotics::log_grid(20.0, 300.0, 10), SizePolicy::Default).unwrap();
    let fixed = asymptotics::density_fit(&recs, Some(1.0 / (2.0 * PI))).unwrap();
    assert!(fixed.residual_max < 1e-3);
    assert_eq!(fixed.stability.len(), 3);
    assert!(asymptotics::density_fit(&recs[..4], None).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solution_is_positive_and_even(q in 0.01f64..40.0) {
        let s = nystrom::solve_rescaled(q, None).unwrap();
        prop_assert!(s.rho_at_nodes.iter().all(|&r| r > 0.0));
        let n = s.n_points;
        for i in 0..n / 2 {
            prop_assert!((s.rho_at_nodes[i] - s.rho_at_nodes[n - 1 - i]).abs() <= 1e-12 * s.rho0);
        }
        prop_assert!(s.rho0 >= s.density_at(q));
    }

    #[test]
    fn love_duality_everywhere(q in 0.05f64..60.0) {
        let love = nystrom::solve_love(q, None).unwrap();
        let d = nystrom::solve_rescaled(q, None).unwrap().total_density;
        prop_assert!((love.f0 - 1.0 - d).abs() <= 1e-10 * (1.0 + d));
        prop_assert!((love.duality_integral() - d).abs() <= 1e-10 * (1.0 + d));
    }

    #[test]
    fn peak_grows_with_q(q in 0.1f64..50.0, factor in 1.05f64..3.0) {
        let a = nystrom::solve_rescaled(q, None).unwrap().rho0;
        let b = nystrom::solve_rescaled(q * factor, None).unwrap().rho0;
        prop_assert!(b > a);
    }

    #[test]
    fn leading_eigenvalue_grows_towards_norm(q in 0.5f64..30.0, factor in 1.1f64..2.0) {
        let a = spectral::eigen_spectrum(q, None, 1).unwrap().eigenvalues[0];
        let b = spectral::eigen_spectrum(q * factor, None, 1).unwrap().eigenvalues[0];
        prop_assert!(a < b && b < 2.0 * PI);
    }

    #[test]
    fn wh_product_on_real_axis(p in 1e-3f64..30.0, neg in any::<bool>()) {
        let p = if neg { -p } else { p };
        let f = wienerhopf::wh_factors_real(p).unwrap();
        let sigma = wienerhopf::symbol_sigma(p);
        prop_assert!((f.k_plus * f.k_minus - sigma).norm() <= 1e-10);
        prop_assert!((f.k_minus - f.k_plus.conj()).norm() <= 1e-12 * f.k_plus.norm().max(1.0));
    }
}
