//! Catalog-level properties: declared normals, flatness of the slice
//! families, enumeration consistency, and the negative control.

use godel_geo::catalog::{self, catalog_enumerate, certify};
use godel_geo::geometry::Vec4;
use godel_geo::hypersurfaces::{normalize_sign, Causal, Engine, Tolerances};
use godel_geo::profiles::ProfilePair;

fn close(a: Vec4, b: Vec4, tol: f64) -> bool {
    (0..4).all(|l| (a[l] - b[l]).abs() < tol)
}

#[test]
fn engine_normals_match_declared_families() {
    // z-slice: xi = E4, eps = -1
    let p = ProfilePair::class1(2f64.sqrt(), 1.0).unwrap();
    let e = catalog::tg_a(&p, 0.8, 1.4).unwrap();
    let eng = Engine::new(&p, e.immersion().unwrap());
    let nd = eng.normal([0.1, 1.0, -0.2]).unwrap();
    assert_eq!(nd.eps, -1.0);
    assert!(close(nd.coeffs, [0.0, 0.0, 0.0, 1.0], 1e-10));

    // r-slice: xi = E2, eps = -1
    let p = ProfilePair::class2(1.0).unwrap();
    let e = catalog::par_1(&p, 1.0).unwrap();
    let eng = Engine::new(&p, e.immersion().unwrap());
    let nd = eng.normal([0.1, -0.1, 0.2]).unwrap();
    assert_eq!(nd.eps, -1.0);
    assert!(close(nd.coeffs, [0.0, 1.0, 0.0, 0.0], 1e-9));

    // twist slice: xi = cos(theta) E2 + sin(theta) E3 with
    // cos(theta) = rho / D at the realized radius
    let p = ProfilePair::class1(1.0, 1.0).unwrap();
    let rho = 0.5;
    let e = catalog::tg_b(&p, rho, 1.2, 0.3).unwrap();
    let imm = e.immersion().unwrap();
    let eng = Engine::new(&p, imm);
    for u in [[0.0, 0.0, 0.0], [0.1, 0.2, -0.1]] {
        let nd = eng.normal(u).unwrap();
        let r = imm.eval(u)[1];
        let d = p.sample(r).unwrap().d;
        let ct = rho / d;
        let mut want = [0.0, ct, (1.0 - ct * ct).sqrt(), 0.0];
        normalize_sign(&mut want);
        assert_eq!(nd.eps, -1.0);
        assert!(close(nd.coeffs, want, 1e-8), "{:?} vs {:?}", nd.coeffs, want);
    }

    // ruled slice on a homogeneous profile: xi = E3 (tilt angle zero)
    let p = ProfilePair::class2(0.4).unwrap();
    let e = catalog::par_3(&p, None, true, Causal::Timelike, 1.0, 1.8).unwrap();
    let eng = Engine::new(&p, e.immersion().unwrap());
    let nd = eng.normal([1.3, 0.1, -0.15]).unwrap();
    assert_eq!(nd.eps, -1.0);
    assert!(close(nd.coeffs, [0.0, 0.0, 1.0, 0.0], 1e-8));

    // ruled slice on the limiting case: xi = sinh(theta) E1 + cosh(theta) E3
    // with theta = -m r / 2
    let p = ProfilePair::class1(2.0, 1.0).unwrap();
    let e = catalog::tg_c(&p, Causal::Timelike, 0.8, 1.4).unwrap();
    let eng = Engine::new(&p, e.immersion().unwrap());
    for u in [[0.9, 0.0, 0.1], [1.2, 0.1, -0.2]] {
        let nd = eng.normal(u).unwrap();
        let th = -u[0]; // m = 2
        let mut want = [th.sinh(), 0.0, th.cosh(), 0.0];
        normalize_sign(&mut want);
        assert_eq!(nd.eps, -1.0);
        assert!(close(nd.coeffs, want, 1e-8), "{:?} vs {:?}", nd.coeffs, want);
    }

    // exponential plane: xi = cosh(theta) E1 + sinh(theta) E4,
    // theta = k1 u1 + k2, eps = +1
    let p = ProfilePair::class4(1.0).unwrap();
    let (k1, k2) = (0.8, 0.2);
    let e = catalog::par_4(&p, k1, k2, Causal::Spacelike, 0.7, 1.3).unwrap();
    let eng = Engine::new(&p, e.immersion().unwrap());
    for u in [[0.0, 0.9, 0.0], [0.2, 1.1, -0.1]] {
        let nd = eng.normal(u).unwrap();
        let th = k1 * u[0] + k2;
        let mut want = [th.cosh(), 0.0, 0.0, th.sinh()];
        normalize_sign(&mut want);
        assert_eq!(nd.eps, 1.0);
        assert!(close(nd.coeffs, want, 1e-8), "{:?} vs {:?}", nd.coeffs, want);
    }
}

#[test]
fn slice_families_are_flat_to_1e6() {
    // tighter than the certificate level: r-slices and twist slices carry
    // identically flat induced metrics
    let tol = Tolerances::default();
    let p = ProfilePair::class1(1.0, 1.0).unwrap();
    for e in [
        catalog::par_1(&p, 1.2).unwrap(),
        catalog::tg_b(&p, 0.5, 1.2, 0.3).unwrap(),
        catalog::par_2(&p, 0.5, 0.3, 1.2, 0.3).unwrap(),
    ] {
        let rep = certify(&p, &e, 3, &tol).unwrap();
        let v = rep.verdict.unwrap();
        assert!(
            v.residuals["max_rm"] < 1e-6,
            "{}: max_rm = {:.3e}",
            e.id,
            v.residuals["max_rm"]
        );
    }
}

#[test]
fn enumeration_respects_flags_across_profiles() {
    // rotating class III: no ruled tg, no plane families
    let p = ProfilePair::class3(1.0, 0.8).unwrap();
    let en = catalog_enumerate(&p, 0.6, 1.4).unwrap();
    let ids: Vec<&str> = en.entries.iter().map(|e| e.id.as_str()).collect();
    assert!(ids.contains(&"TG-a") && ids.contains(&"PAR-1") && ids.contains(&"PAR-2"));
    assert!(!ids.iter().any(|i| i.starts_with("TG-c") || i.starts_with("PAR-4")));

    // the limiting case picks up the product-decomposition entries
    let p = ProfilePair::class1(2.0, 1.0).unwrap();
    let en = catalog_enumerate(&p, 0.8, 1.4).unwrap();
    let ids: Vec<&str> = en.entries.iter().map(|e| e.id.as_str()).collect();
    assert!(ids.contains(&"VI-E1") && ids.contains(&"VI-E2"));
    assert!(ids.contains(&"TG-cT") && ids.contains(&"TG-cS"));

    // a non-homogeneous custom profile keeps only the universal families
    let p = ProfilePair::custom("sin(r)", "2+0.5*sin(r)").unwrap();
    let en = catalog_enumerate(&p, 0.6, 1.4).unwrap();
    let ids: Vec<&str> = en.entries.iter().map(|e| e.id.as_str()).collect();
    assert!(ids.contains(&"TG-a") && ids.contains(&"PAR-1"));
    assert!(!ids.contains(&"TG-b") && !ids.contains(&"PAR-2"));
    assert!(en.skipped.iter().any(|(id, _)| id == "TG-b"));
}

#[test]
fn negative_control_bump() {
    // a non-admissible tilt bump on the parallel twist slice pushes
    // nabla h above 1e-2 while the structural identities stay small
    let p = ProfilePair::class1(1.0, 1.0).unwrap();
    let e = catalog::par_2_bumped(&p, 0.5, 0.3, 1.2, 0.3, 0.4, 0.0, 0.12).unwrap();
    let imm = e.immersion().unwrap();
    let eng = Engine::new(&p, imm);
    let v = eng.classify(&imm.ubox.grid(3), &Tolerances::default()).unwrap();
    assert!(v.residuals["max_nabla_h"] > 1e-2);
    assert!(!v.parallel);
    for u in [[0.0, 0.02, 0.0], [0.1, -0.07, 0.1]] {
        let (g, c) = eng.gauss_codazzi(u).unwrap();
        assert!(g < 1e-4 && c < 1e-4, "identities: {g:.2e} {c:.2e}");
    }
}

#[test]
fn table_backed_jacobians_match_fd() {
    // the interpolated "analytic" partials and the central-difference
    // Jacobian are two routes to the same derivative
    let p = ProfilePair::class1(1.0, 1.0).unwrap();
    let e = catalog::tg_b(&p, 0.5, 1.2, 0.3).unwrap();
    let imm = e.immersion().unwrap();
    for u in imm.ubox.grid(3) {
        let a = imm.jacobian(u);
        let f = imm.jacobian_fd(u);
        for i in 0..3 {
            for l in 0..4 {
                assert!(
                    (a[i][l] - f[i][l]).abs() < 1e-8,
                    "axis {i} comp {l}: {} vs {}",
                    a[i][l],
                    f[i][l]
                );
            }
        }
    }
}

#[test]
fn tangent_frame_rejects_rank_deficient_maps() {
    use godel_geo::expr;
    use godel_geo::hypersurfaces::{Component, Immersion, UBox};
    let p = ProfilePair::class1(1.0, 1.0).unwrap();
    // third column is a multiple of the first: rank 2
    let imm = Immersion::new(
        [
            Component::expr(expr::parse("u1 + 2*u3", &["u1", "u2", "u3"]).unwrap()),
            Component::expr(expr::parse("1.2 + u2", &["u1", "u2", "u3"]).unwrap()),
            Component::Const(0.0),
            Component::expr(expr::parse("3*u1 + 6*u3", &["u1", "u2", "u3"]).unwrap()),
        ],
        UBox::centered([0.2, 0.2, 0.2]),
    );
    let eng = Engine::new(&p, &imm);
    assert!(matches!(
        eng.tangent_frame([0.0, 0.0, 0.0]),
        Err(godel_geo::GeoError::Degenerate(..))
    ));
}

#[test]
fn certificates_invariant_under_t_and_z_translations() {
    // t and z translations are ambient isometries: every residual of a
    // translated entry matches the original to machine precision
    let p = ProfilePair::class1(1.0, 1.0).unwrap();
    let e = catalog::par_2(&p, 0.5, 0.3, 1.2, 0.3).unwrap();
    let base = e.immersion().unwrap().clone();
    let shifted = base.clone().translated(0.7, -1.3);
    let tol = Tolerances::default();
    let vb = Engine::new(&p, &base).classify(&base.ubox.grid(3), &tol).unwrap();
    let vs = Engine::new(&p, &shifted).classify(&shifted.ubox.grid(3), &tol).unwrap();
    for (k, b) in &vb.residuals {
        let s = vs.residuals[k];
        assert!(
            (b - s).abs() < 1e-10 * (1.0 + b.abs()),
            "{k}: {b} vs {s}"
        );
    }
    assert_eq!(vb.causal, vs.causal);
    assert!((vb.mean_curvature - vs.mean_curvature).abs() < 1e-10);
}

#[test]
fn generic_twist_slice_h_follows_the_tilt_law() {
    // COD-3 prescribes theta(u2) = theta0 + wobble sin(2 u2); the engine's
    // h(Y2,Y2) must equal theta' - (D'/D) cos(theta) pointwise, and
    // h(Y1,Y2) must equal omega
    let p = ProfilePair::class1(1.0, 1.0).unwrap();
    let (theta0, wobble, r0) = (0.4, 0.15, 1.2);
    let e = catalog::cod_3(&p, theta0, wobble, r0, 0.3).unwrap();
    let imm = e.immersion().unwrap();
    let eng = Engine::new(&p, imm);
    for u in [[0.0, 0.0, 0.0], [0.1, 0.18, -0.1], [-0.2, -0.22, 0.2]] {
        let (h, _) = eng.second_form(u).unwrap();
        let th = theta0 + wobble * (2.0 * u[1]).sin();
        let thp = 2.0 * wobble * (2.0 * u[1]).cos();
        let s = p.sample(imm.eval(u)[1]).unwrap();
        let want = thp - s.dp / s.d * th.cos();
        assert!((h[1][1] - want).abs() < 1e-8, "h(Y2,Y2) = {} want {want}", h[1][1]);
        assert!((h[0][1] - 1.0).abs() < 1e-8, "h(Y1,Y2) = {}", h[0][1]);
    }
}

#[test]
fn r_slice_with_constant_d_is_minimal_and_proper() {
    // D constant: mean curvature D'/D vanishes identically while the
    // rotation keeps h(E1,E3) nonzero
    let p = ProfilePair::custom("-r^2", "2").unwrap();
    let e = catalog::par_1(&p, 1.1).unwrap();
    assert_eq!(e.expected.minimal, Some(true));
    let rep = certify(&p, &e, 3, &Tolerances::default()).unwrap();
    assert!(rep.pass, "{:#?}", rep.checks);
    let v = rep.verdict.unwrap();
    assert!(v.minimal && !v.totally_geodesic && v.parallel);
    assert!(v.residuals["max_h"] > 0.5); // |h(E1,E3)| = |H'/2D| = 0.55
}

#[test]
fn identities_hold_on_the_pure_fd_path() {
    // same Gauss/Codazzi self-test with the finite-difference Jacobian
    // engine, the path with no analytic partials at all; its noise floor
    // sits a few times higher than the analytic path (differences of
    // differences), hence the looser bound here
    let p = ProfilePair::class1(1.0, 1.0).unwrap();
    let imm = catalog::random_immersion(3, 1.2);
    let eng = Engine::new(&p, &imm).with_fd_jacobian();
    for u in [[0.0, 0.0, 0.0], [0.08, -0.05, 0.1]] {
        let (g, c) = eng.gauss_codazzi(u).unwrap();
        assert!(g < 5e-4, "gauss {g:.3e}");
        assert!(c < 5e-4, "codazzi {c:.3e}");
    }
}

#[test]
fn fundamental_forms_bundle_is_consistent() {
    let p = ProfilePair::class2(1.0).unwrap();
    let e = catalog::par_1(&p, 1.0).unwrap();
    let eng = Engine::new(&p, e.immersion().unwrap());
    let ff = eng.fundamental_forms([0.1, -0.1, 0.2]).unwrap();
    assert_eq!(ff.eps, -1.0);
    assert!((ff.mean_curvature - 1.0).abs() < 1e-8); // D'/D at c=1
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(ff.h[i][j], ff.h[j][i]);
            for k in 0..3 {
                // nabla_h symmetric in its last two slots
                assert!((ff.nabla_h[i][j][k] - ff.nabla_h[i][k][j]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn certified_eps_matches_expected_causal_everywhere() {
    for p in [
        ProfilePair::class1(1.0, 1.0).unwrap(),
        ProfilePair::class1(2.0, 1.0).unwrap(),
        ProfilePair::class4(1.0).unwrap(),
    ] {
        let en = catalog_enumerate(&p, 0.8, 1.4).unwrap();
        for e in &en.entries {
            if e.immersion().is_none() {
                continue;
            }
            let rep = certify(&p, e, 3, &Tolerances::default()).unwrap();
            let v = rep.verdict.unwrap();
            if let Some(c) = e.expected.causal {
                assert_eq!(v.causal, c, "{} on {}", e.id, p.describe());
            }
        }
    }
}
