//! Property tests over random profile parameters and immersion seeds.

use godel_geo::geometry::{
    bracket_residual, connection_oracle_gap, dot_g, frame_of, metric_compat_residual, metric_of,
    torsion_residual,
};
use godel_geo::hypersurfaces::Engine;
use godel_geo::profiles::{invariants_of, linspace, DerivativeMode, ProfilePair};
use proptest::prelude::*;

fn homogeneous_profile() -> impl Strategy<Value = (ProfilePair, f64, f64)> {
    // (profile, alpha, omega) over all four classes
    prop_oneof![
        (0.4f64..2.0, 0.2f64..1.5).prop_map(|(m, om)| {
            (ProfilePair::class1(m, om).unwrap(), m * m, om)
        }),
        (0.2f64..1.5).prop_map(|om| (ProfilePair::class2(om).unwrap(), 0.0, om)),
        (0.4f64..1.6, 0.2f64..1.5).prop_map(|(mu, om)| {
            (ProfilePair::class3(mu, om).unwrap(), -mu * mu, om)
        }),
        (0.4f64..2.0).prop_map(|a| (ProfilePair::class4(a).unwrap(), a, 0.0)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneous_invariants_and_fit((p, alpha, omega) in homogeneous_profile(), r in 0.3f64..1.2) {
        prop_assume!(r < 0.9 * p.r_max);
        let f = p.invariants(r).unwrap();
        prop_assert!(f.f2.abs() < 1e-12);
        prop_assert!((f.f1 - omega * omega).abs() < 1e-10);
        prop_assert!((f.f3 - (3.0 * omega * omega - alpha)).abs() < 1e-10);
        let grid = linspace(0.3, (0.9 * p.r_max).min(1.4), 7);
        let h = p.detect_homogeneous(&grid, 1e-8).expect("homogeneous fit");
        prop_assert!((h.alpha - alpha).abs() < 1e-8);
        prop_assert!((h.omega - omega).abs() < 1e-8);
    }

    #[test]
    fn frame_tables_consistent((p, _, _) in homogeneous_profile(), r in 0.3f64..1.2) {
        prop_assume!(r < 0.9 * p.r_max);
        prop_assert!(torsion_residual(&p, r).unwrap() < 1e-12);
        prop_assert!(metric_compat_residual(&p, r).unwrap() < 1e-12);
        prop_assert!(bracket_residual(&p, r).unwrap() < 1e-8);
        prop_assert!(connection_oracle_gap(&p, r).unwrap() < 1e-6);
        // pseudo-orthonormality of the frame
        let s = p.sample(r).unwrap();
        let g = metric_of(&s);
        let fr = frame_of(&s);
        for a in 0..4 {
            for b in 0..4 {
                let want = if a == b { if a == 0 { 1.0 } else { -1.0 } } else { 0.0 };
                prop_assert!((dot_g(&g, fr.e[a], fr.e[b]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn central_difference_tracks_closed_form(
        (p, _, _) in homogeneous_profile(),
        r in 0.4f64..1.1,
        step in 1e-5f64..1e-3,
    ) {
        prop_assume!(r < 0.9 * p.r_max);
        let exact = p.sample(r).unwrap();
        let fd = p.clone()
            .with_mode(DerivativeMode::CentralDifference { step })
            .sample(r)
            .unwrap();
        // second-order accuracy with a conservative constant
        let bound = 50.0 * step * step + 1e-9;
        prop_assert!((fd.hp - exact.hp).abs() < bound, "hp err {}", (fd.hp - exact.hp).abs());
        prop_assert!((fd.dp - exact.dp).abs() < bound);
    }

    #[test]
    fn custom_polynomial_profiles_round_trip(a in 0.1f64..0.8, b in -0.5f64..0.5, c in 1.5f64..3.0) {
        // H = a r^2 + b r, D = c + b sin(r): D stays positive
        let h = format!("{a}*r^2 + {b}*r");
        let d = format!("{c} + {b}*sin(r)");
        let p = ProfilePair::custom(&h, &d).unwrap();
        for r in [0.4, 0.9, 1.3] {
            let s = p.sample(r).unwrap();
            prop_assert!((s.h - (a * r * r + b * r)).abs() < 1e-12);
            prop_assert!((s.hp - (2.0 * a * r + b)).abs() < 1e-12);
            prop_assert!((s.dp - b * r.cos()).abs() < 1e-12);
            prop_assert!((s.dpp + b * r.sin()).abs() < 1e-12);
            // invariants defined and finite
            let f = invariants_of(&s);
            prop_assert!(f.f1.is_finite() && f.f2.is_finite() && f.f3.is_finite());
            prop_assert!(f.f1 >= 0.0);
        }
    }

    #[test]
    fn normals_of_random_immersions_are_unit_and_orthogonal(seed in 0u64..300) {
        let p = ProfilePair::class1(1.0, 1.0).unwrap();
        let imm = godel_geo::catalog::random_immersion(seed, 1.2);
        let eng = Engine::new(&p, &imm);
        let u = [0.05, -0.04, 0.08];
        let nd = eng.normal(u).unwrap();
        let s = p.sample(imm.eval(u)[1]).unwrap();
        let g = metric_of(&s);
        prop_assert!((dot_g(&g, nd.xi_coord, nd.xi_coord) - nd.eps).abs() < 1e-9);
        for t in eng.tangent_frame(u).unwrap() {
            prop_assert!(dot_g(&g, t, nd.xi_coord).abs() < 1e-7);
        }
        // analytic vs FD Jacobian gap
        let ja = imm.jacobian(u);
        let jf = imm.jacobian_fd(u);
        for i in 0..3 {
            for l in 0..4 {
                prop_assert!((ja[i][l] - jf[i][l]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn verdict_implication_chain(seed in 0u64..40) {
        // totally_geodesic => parallel => codazzi and semi_parallel, on
        // whatever the random immersion turns out to be
        let p = ProfilePair::class1(1.0, 1.0).unwrap();
        let imm = godel_geo::catalog::random_immersion(seed, 1.2);
        let eng = Engine::new(&p, &imm);
        let grid = [[0.0, 0.0, 0.0], [0.1, -0.05, 0.05]];
        let v = eng.classify(&grid, &Default::default()).unwrap();
        if v.totally_geodesic {
            prop_assert!(v.parallel);
        }
        if v.parallel {
            prop_assert!(v.codazzi && v.semi_parallel);
        }
    }
}
