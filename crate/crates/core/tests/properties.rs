mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sphere_paradox::audit::{
    run_noshow_audit, run_twin_audit, solve_twin_degree_system, AuditConfig, AuditStatus,
    SystemStatus,
};
use sphere_paradox::conditions::{
    antipodal_residual, check_outsider_stability, check_participation, find_antipodal_point,
    scan_nau, search_noshow_violation, search_twin_violation, unanimity_twin_witness,
    AntipodeConfig, OutsiderStability, SearchConfig, Verdict,
};
use sphere_paradox::degree::{
    additivity_check, coordinate_degrees, homotopy_certificate_nau, simplicial_degree_s2,
    winding_number, Additivity, DegreeConfig, SimplicialConfig, WindingConfig,
};
use sphere_paradox::rules::{
    diagonal, insert_voter, make_builtin, restrict_coordinate, restrict_pair, twin_embedding,
    Builtin, Profile, RuleFamily, SphereSelfMap, TotalityClaim,
};
use sphere_paradox::sphere::{
    antipode, build_net, chord_homotopy, geodesic_distance, normalize, random_point, NetKind,
    SpherePoint,
};

fn point(n: usize) -> impl Strategy<Value = SpherePoint> {
    prop::collection::vec(-1.0f64..1.0, n + 1)
        .prop_filter("near zero", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-2)
        .prop_map(|v| normalize(&v).unwrap())
}

fn profile(k: usize, n: usize) -> impl Strategy<Value = Profile> {
    prop::collection::vec(point(n), k).prop_map(|p| Profile::new(p).unwrap())
}

fn d(x: &SpherePoint, y: &SpherePoint) -> f64 {
    geodesic_distance(x, y).unwrap()
}

fn continuous_builtins(n: usize, winner: usize, angle: f64) -> Vec<Builtin> {
    vec![
        Builtin::Dictator { winner },
        Builtin::RotatedDictator { winner, angle },
        Builtin::Constant {
            c: SpherePoint::basepoint(n).rotate_12(angle),
        },
    ]
}

proptest! {
    #[test]
    fn metric_axioms(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y, z) = (random_point(n, &mut rng), random_point(n, &mut rng), random_point(n, &mut rng));
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() <= 1e-12);
        prop_assert!((0.0..=PI).contains(&d(&x, &y)));
        prop_assert!(d(&x, &x) == 0.0);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
    }

    #[test]
    fn antipode_is_an_involution_at_distance_pi(x in point(2)) {
        prop_assert_eq!(antipode(&antipode(&x)), x.clone());
        prop_assert!((d(&x, &antipode(&x)) - PI).abs() <= 1e-12);
    }

    #[test]
    fn distance_agrees_with_clamped_arccos(x in point(3), y in point(3)) {
        let dd = d(&x, &y);
        prop_assume!(dd > 1e-3 && dd < PI - 1e-3);
        prop_assert!((dd - x.dot(&y).clamp(-1.0, 1.0).acos()).abs() <= 1e-12);
    }

    #[test]
    fn distance_matches_oracle(x in point(2), y in point(2)) {
        prop_assert!((d(&x, &y) - common::dist(x.coords(), y.coords())).abs() <= 1e-14);
    }

    #[test]
    fn chord_homotopy_stays_on_sphere(x in point(2), gx in point(2), t in 0.0f64..=1.0) {
        prop_assume!(d(&gx, &antipode(&x)) > 1e-3);
        let h = chord_homotopy(t, &x, &gx).unwrap();
        prop_assert!((common::norm(h.coords()) - 1.0).abs() <= 1e-12);
        prop_assert!(chord_homotopy(0.0, &x, &gx).unwrap().approx_eq(&x));
        prop_assert!(chord_homotopy(1.0, &x, &gx).unwrap().approx_eq(&gx));
        // Lipschitz in t, with constant governed by the shortest chord
        let dt = 1e-6;
        let t2 = (t + dt).min(1.0);
        let h2 = chord_homotopy(t2, &x, &gx).unwrap();
        let min_chord = (1.0 + gx.dot(&x)).max(1e-12).sqrt() / 2f64.sqrt();
        prop_assert!(d(&h, &h2) <= 2.0 * dt / min_chord.powi(2) + 1e-12);
    }

    #[test]
    fn circle_grid_mesh_covers(size in 3usize..512, theta in 0.0f64..(2.0 * PI)) {
        let net = build_net(1, size, NetKind::CircleGrid, None).unwrap();
        let x = SpherePoint::from_angle(theta);
        let nearest = net.points.iter().map(|p| d(p, &x)).fold(f64::INFINITY, f64::min);
        prop_assert!(nearest <= net.mesh + 1e-12);
    }
}

#[test]
fn pair_restriction_is_the_rule_on_the_twin_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, b) in [
        (1, Builtin::NormalizedMean),
        (2, Builtin::AntagonisticMean),
        (2, Builtin::Dictator { winner: 3 }),
    ] {
        let rule = make_builtin(b, 4, n).unwrap();
        for _ in 0..1000 {
            let x = random_point(n, &mut rng);
            for (i, j) in [(1, 2), (2, 4), (3, 1)] {
                let via_map = restrict_pair(&rule, i, j).unwrap().eval(&x);
                let direct = rule.evaluate(&twin_embedding(4, i, j, &x).unwrap());
                match (via_map, direct) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b),
                    (Err(_), Err(_)) => {}
                    (a, b) => panic!("restriction disagrees: {a:?} vs {b:?}"),
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn karcher_mean_is_stationary(center in point(2), spread in prop::collection::vec((-0.6f64..0.6, -0.6f64..0.6), 3..6)) {
        let pts: Vec<SpherePoint> = spread.iter().map(|(a, b)| {
            let basis = center.tangent_basis();
            let v: Vec<f64> = (0..3).map(|c| a * basis[0][c] + b * basis[1][c]).collect();
            center.exp(&v)
        }).collect();
        let k = pts.len();
        let rule = make_builtin(Builtin::KarcherMean { max_iter: 200, step_tol: 1e-10 }, k, 2).unwrap();
        let m = rule.evaluate(&Profile::new(pts.clone()).unwrap()).unwrap();
        let mut grad = [0.0; 3];
        for p in &pts {
            let l = m.log(p).unwrap();
            grad.iter_mut().zip(&l).for_each(|(g, v)| *g += v);
        }
        prop_assert!(common::norm(&grad) <= 1e-8);
        let oracle = common::eval(&Builtin::KarcherMean { max_iter: 0, step_tol: 0.0 },
            &pts.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>()).unwrap();
        prop_assert!(common::dist(m.coords(), &oracle) <= 1e-8);
    }

    #[test]
    fn searched_certificates_reverify(seed in 0u64..1000, n in 1usize..=2, which in 0usize..5) {
        let b = [
            Builtin::Dictator { winner: 2 },
            Builtin::RotatedDictator { winner: 1, angle: 2.0 },
            Builtin::NormalizedMean,
            Builtin::AntagonisticMean,
            Builtin::Constant { c: SpherePoint::basepoint(n) },
        ][which].clone();
        let cfg = SearchConfig { net_size: 8, refine_steps: 10, restarts: 4, seed };
        let rule = make_builtin(b.clone(), 3, n).unwrap();
        if let Some(c) = search_twin_violation(&rule, &cfg).unwrap().certificate {
            prop_assert!(c.verified);
            prop_assert_eq!(common::reverify(&c, &b, 1e-9), Ok(()));
        }
        let family = RuleFamily::from_builtin(b.clone(), n).unwrap();
        if let Some(c) = search_noshow_violation(&family, 2, &cfg).unwrap().certificate {
            prop_assert!(c.verified);
            prop_assert_eq!(common::reverify(&c, &b, 1e-9), Ok(()));
        }
    }

    #[test]
    fn certified_nau_excludes_antipodes(a in 0.0f64..4.0, m in 1u32..=3, phase in 0.0f64..(2.0 * PI)) {
        let mf = m as f64;
        let g = SphereSelfMap::new("perturbed identity", 1, move |x| {
            let t = x.coords()[1].atan2(x.coords()[0]);
            Ok(SpherePoint::from_angle(t + a * (mf * t + phase).sin()))
        });
        let net = build_net(1, 2048, NetKind::CircleGrid, None).unwrap();
        let cert = homotopy_certificate_nau(&g, 1.0 + a * mf, &net).unwrap();
        let hit = find_antipodal_point(&g, &AntipodeConfig { multistarts: 8, ..AntipodeConfig::default() }).unwrap();
        prop_assert!(!(cert.is_certified() && hit.is_some()));
        // past π the displacement must reach π somewhere
        if a > PI + 0.01 {
            prop_assert!(!cert.is_certified());
        }
    }

    #[test]
    fn unanimity_antipode_gives_twin_witness(x0 in point(2), y in point(2), i in 1usize..=3, j in 1usize..=3) {
        prop_assume!(i != j && d(&x0, &y) > 0.5);
        // the antagonistic mean sends every unanimous profile to its antipode
        let rule = make_builtin(Builtin::AntagonisticMean, 3, 2).unwrap();
        prop_assert!(antipodal_residual(&diagonal(&rule), &x0).unwrap() <= 1e-15);
        let cert = unanimity_twin_witness(&rule, i, j, &x0, &y).unwrap();
        prop_assert!(cert.verified);
        prop_assert!((cert.d_after.0 - PI).abs() <= 1e-9);
        prop_assert_eq!(common::reverify(&cert, &Builtin::AntagonisticMean, 1e-9), Ok(()));
    }

    #[test]
    fn participation_implies_outsider_stability(p in profile(3, 2), i in 1usize..=4, angle in -PI..PI, which in 0usize..3) {
        let b = [
            Builtin::RotatedDictator { winner: 1, angle },
            Builtin::Constant { c: SpherePoint::basepoint(2) },
            Builtin::NormalizedMean,
        ][which].clone();
        let family = RuleFamily::from_builtin(b, 2).unwrap();
        let Ok(y) = family.rule(3).unwrap().evaluate(&p) else { return Ok(()) };
        let q = insert_voter(&p, i, y).unwrap();
        let (Ok(part), Ok(stab)) = (check_participation(&family, &q, i), check_outsider_stability(&family, &p, i)) else {
            return Ok(());
        };
        if part == Verdict::Holds {
            prop_assert_eq!(stab, OutsiderStability::Holds);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn winding_is_homotopy_invariant(m in -4i64..=4, eps in -0.3f64..0.3, freq in 1u32..4, phase in 0.0f64..(2.0 * PI)) {
        let f = freq as f64;
        let g = SphereSelfMap::new("perturbed power", 1, move |x| {
            let t = x.coords()[1].atan2(x.coords()[0]);
            Ok(SpherePoint::from_angle(m as f64 * t + eps * (f * t + phase).sin()))
        });
        prop_assert_eq!(winding_number(&g, &WindingConfig::default()).unwrap().value, m);
    }

    #[test]
    fn winding_is_multiplicative(a in -4i64..=4, b in -4i64..=4) {
        let g = SphereSelfMap::power(a).compose(&SphereSelfMap::power(b));
        prop_assert_eq!(winding_number(&g, &WindingConfig::default()).unwrap().value, a * b);
    }

    #[test]
    fn certified_nau_agrees_with_winding(a in 0.0f64..1.0, freq in 1u32..4) {
        let f = freq as f64;
        let g = SphereSelfMap::new("perturbed identity", 1, move |x| {
            let t = x.coords()[1].atan2(x.coords()[0]);
            Ok(SpherePoint::from_angle(t + a * (f * t).sin()))
        });
        let net = build_net(1, 1024, NetKind::CircleGrid, None).unwrap();
        let cert = homotopy_certificate_nau(&g, 1.0 + a * f, &net).unwrap();
        prop_assert!(cert.is_certified());
        prop_assert_eq!(cert.degree_result(&net).unwrap().value, winding_number(&g, &WindingConfig::default()).unwrap().value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn simplicial_degree_is_homotopy_invariant(eps in 0.0f64..0.3, axis in point(2), antipodal in any::<bool>()) {
        // x ↦ ±normalize(x + ε·(a × x)) stays within π/2 of ±x
        let a = axis.coords().to_vec();
        let sign = if antipodal { -1.0 } else { 1.0 };
        let g = SphereSelfMap::new("perturbed", 2, move |x| {
            let c = x.coords();
            let cross = [a[1] * c[2] - a[2] * c[1], a[2] * c[0] - a[0] * c[2], a[0] * c[1] - a[1] * c[0]];
            let v: Vec<f64> = (0..3).map(|t| sign * (c[t] + eps * cross[t])).collect();
            normalize(&v)
        });
        let cfg = SimplicialConfig { subdivision_level: 3, ..SimplicialConfig::default() };
        prop_assert_eq!(simplicial_degree_s2(&g, &cfg).unwrap().value, if antipodal { -1 } else { 1 });
        let net = build_net(2, 2000, NetKind::FibonacciS2, None).unwrap();
        let cert = homotopy_certificate_nau(&g, 1.0 + eps, &net).unwrap();
        if cert.is_certified() {
            prop_assert!(!antipodal);
        }
    }

    #[test]
    fn additivity_holds_for_continuous_rules(k in 3usize..=5, n in 1usize..=2, winner in 1usize..=3, angle in -PI..PI) {
        for b in continuous_builtins(n, winner, angle) {
            let rule = make_builtin(b, k, n).unwrap();
            prop_assert_eq!(rule.totality_claim, TotalityClaim::TotalContinuous);
            let rep = coordinate_degrees(&rule, &DegreeConfig::default()).unwrap();
            prop_assert_eq!(additivity_check(&rep).unwrap(), Additivity::Consistent);
            // pair existence
            prop_assert!(rep.pair_degrees.iter().any(|p| p.deg != Some(1)));
        }
    }

    #[test]
    fn twin_audit_is_sound_and_complete(k in 3usize..=4, n in 1usize..=2, winner in 1usize..=3, angle in -PI..PI, seed in 0u64..100) {
        for b in continuous_builtins(n, winner, angle) {
            let rule = make_builtin(b.clone(), k, n).unwrap();
            let rep = run_twin_audit(&rule, &AuditConfig::with_seed(seed)).unwrap();
            prop_assert_eq!(rep.status, AuditStatus::ProvedWithWitness);
            let cert = rep.certificate.unwrap();
            prop_assert!(cert.verified);
            prop_assert_eq!(common::reverify(&cert, &b, 1e-9), Ok(()));
            let [i, j] = rep.pair.unwrap();
            prop_assert!(rep.degrees.pair(i, j) != Some(1));
        }
    }

    #[test]
    fn noshow_audit_is_sound(n in 1usize..=2, winner in 1usize..=2, angle in -PI..PI, seed in 0u64..100) {
        for b in continuous_builtins(n, winner, angle) {
            let family = RuleFamily::from_builtin(b.clone(), n).unwrap();
            let rep = run_noshow_audit(&family, 2, &AuditConfig::with_seed(seed)).unwrap();
            prop_assert_eq!(rep.status, AuditStatus::ProvedWithWitness);
            let cert = rep.certificate.unwrap();
            prop_assert_eq!(common::reverify(&cert, &b, 1e-9), Ok(()));
        }
    }
}

#[test]
fn degree_of_identity_and_composition_on_s2() {
    let cfg = SimplicialConfig::default();
    let anti = SphereSelfMap::antipodal(2);
    assert_eq!(
        simplicial_degree_s2(&SphereSelfMap::identity(2), &cfg)
            .unwrap()
            .value,
        1
    );
    assert_eq!(
        simplicial_degree_s2(&anti.compose(&anti), &cfg)
            .unwrap()
            .value,
        1
    );
    let coord = restrict_coordinate(
        &make_builtin(Builtin::Dictator { winner: 2 }, 3, 2).unwrap(),
        2,
    )
    .unwrap();
    assert_eq!(
        simplicial_degree_s2(&anti.compose(&coord), &cfg)
            .unwrap()
            .value,
        -1
    );
}

#[test]
fn degree_system_verdict_law() {
    for k in 2..=64 {
        let v = solve_twin_degree_system(k).unwrap();
        assert_eq!(v.status == SystemStatus::Unsat, k >= 3, "k={k}");
        if let Some(w) = &v.witness_solution {
            assert!(w
                .iter()
                .enumerate()
                .all(|(a, da)| w.iter().skip(a + 1).all(|db| da + db == 1)));
        }
    }
}

#[test]
fn nau_scan_and_antipode_search_disagree_on_antipodal_map() {
    let net = build_net(2, 500, NetKind::FibonacciS2, None).unwrap();
    let scan = scan_nau(&SphereSelfMap::antipodal(2), &net, Some(1.0)).unwrap();
    assert!(!scan.certified && scan.gap == 0.0);
    assert!(
        find_antipodal_point(&SphereSelfMap::antipodal(2), &AntipodeConfig::default())
            .unwrap()
            .is_some()
    );
}
