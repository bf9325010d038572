mod common;

use ak4::chart::{catalog_chart, product_surfaces};
use ak4::gray::{ReversedOutcome, Verdict};
use ak4::report::{analyze_chart, run_report, PointAnalysis, Status};
use ak4::{ChartSpec, RunConfig};

fn analyse(spec: &ChartSpec, points: usize, seed: u64) -> Vec<PointAnalysis> {
    let cfg = RunConfig {
        chart: spec.name.clone(),
        points,
        seed,
        ..Default::default()
    };
    analyze_chart(spec, &cfg).unwrap()
}

#[test]
fn every_chart_passes_every_applicable_identity() {
    for spec in common::all_charts() {
        let cfg = RunConfig {
            chart: spec.name.clone(),
            ..Default::default()
        };
        let doc = run_report(&spec, &cfg).unwrap();
        for (name, agg) in &doc.aggregate.checks {
            assert_ne!(agg.status, Status::Fail, "{}: {name} {agg:?}", spec.name);
        }
        assert!(doc.points.iter().all(|p| p.structure.max() < 1e-9));
    }
}

#[test]
fn verdicts_of_the_catalog() {
    let expect = [
        ("flat", Verdict::Kahler, true),
        ("product-surfaces", Verdict::Kahler, false),
        ("fubini-study", Verdict::Kahler, true),
        ("complex-hyperbolic", Verdict::Kahler, true),
        ("kodaira-thurston", Verdict::Ak, false),
    ];
    for (name, verdict, einstein) in expect {
        let pts = analyse(&catalog_chart(name).unwrap(), 8, 1);
        let c = ak4::report::classify_points(&pts);
        assert_eq!((c.verdict, c.einstein), (verdict, einstein), "{name}");
    }
    let pts = analyse(&common::fixture("conformal-hermitian"), 8, 1);
    assert_eq!(ak4::report::classify_points(&pts).verdict, Verdict::AlmostHermitian);
}

#[test]
fn kodaira_thurston_is_strictly_almost_kahler() {
    for p in analyse(&catalog_chart("kodaira-thurston").unwrap(), 32, 7) {
        let h = &p.first_order;
        let d = &p.decomp;
        assert!(h.d_omega_norm() < 1e-10);
        assert!(h.nabla_j_sq > 0.1);
        assert!(h.theta_norm() < 1e-9);
        assert!(h.ak_residual < 1e-9);
        let a2: f64 = h.a.iter().map(|v| v * v).sum();
        assert!((a2 - (d.s_star - d.s) / 4.0).abs() < 1e-8);
        assert!(d.s_star - d.s > 0.1);
        assert!((d.s_star - d.s - 0.5 * h.nabla_j_sq).abs() < 1e-8);
        assert!(p.gray.gamma0.antisymmetry_residual < 1e-8);
        // not G2, so Prop 1 does not apply and the reversed structure is diagnostic
        assert!(p.gray.prop1.is_none());
        match &p.gray.reversed {
            ReversedOutcome::Computed(r) => {
                assert!(r.j_bar_square < 1e-12 && r.j_bar_orthogonality < 1e-12 && r.omega_bar_consistency < 1e-12);
                assert!((r.a_norm_sq - (d.s_star - d.s) / 4.0).abs() < 1e-8);
            }
            other => panic!("expected a reversed structure, got {other:?}"),
        }
    }
}

#[test]
fn totally_real_curvature_on_fubini_study_and_product_surfaces() {
    for p in analyse(&catalog_chart("fubini-study").unwrap(), 32, 3) {
        let t = &p.gray.totally_real;
        assert!(t.spread() < 1e-7);
        assert!(t.formula_residual() < 1e-7);
    }
    let spec = product_surfaces("2/(1 + x1^2 + x2^2)", "2/(1 + 0.25*(x3^2 + x4^2))");
    for p in analyse(&spec, 16, 3) {
        assert!(p.gray.totally_real.spread() > 1e-3);
        assert!(p.decomp.w_minus_norm() > 1e-3);
        assert!(p.gray.lemma6_consistent);
    }
}

#[test]
fn lemma1_and_beta_on_a_non_kahler_chart_with_invariant_ricci() {
    for p in analyse(&common::fixture("conformal-hermitian"), 32, 9) {
        let so = p.second_order.as_ref().unwrap();
        assert!(p.decomp.ric_anti_norm < 1e-9);
        assert!(p.first_order.theta_norm() > 1e-2 || p.decomp.ricci0_norm() < 1e-6);
        assert!(so.lemma1_residual < 1e-7 && so.beta0_residual < 1e-7);
        // conformally flat: W = 0, so δW and B vanish
        assert!(so.delta_w.max_abs() < 1e-7);
        assert!(so.bach.as_ref().unwrap().norm() < 1e-6);
    }
}

#[test]
fn lemma1_fails_without_its_hypothesis() {
    for p in analyse(&common::fixture("rescaled-sphere-plane"), 32, 9) {
        let so = p.second_order.as_ref().unwrap();
        assert!(p.decomp.ric_anti_norm > 1e-3);
        assert!(so.lemma1_residual > 1e-2, "{}", so.lemma1_residual);
        assert_eq!(p.checks["lemma1-alpha"].status, Status::Skipped);
        assert!(so.delta_w_residual < 1e-7);
    }
}

#[test]
fn bach_vanishes_on_einstein_and_self_dual_charts() {
    for name in ["fubini-study", "complex-hyperbolic", "flat"] {
        for p in analyse(&catalog_chart(name).unwrap(), 16, 4) {
            let b = p.second_order.as_ref().unwrap().bach.as_ref().unwrap();
            assert!(b.norm() < 1e-6, "{name}");
            assert!(b.agreement_residual < 1e-6);
            assert!(b.almost_kahler.is_some() && b.ricci_form.is_some());
        }
    }
}

#[test]
fn bach_routes_agree_on_non_einstein_charts() {
    for spec in [
        catalog_chart("product-surfaces").unwrap(),
        common::fixture("rescaled-sphere-plane"),
    ] {
        for p in analyse(&spec, 16, 4) {
            let b = p.second_order.as_ref().unwrap().bach.as_ref().unwrap();
            assert!(b.agreement_residual < 1e-6, "{}", spec.name);
            assert!(b.norm() > 1e-4, "{}: Bach unexpectedly zero", spec.name);
        }
    }
}

#[test]
fn kahler_charts_have_the_doubled_weyl_eigenvalue() {
    for name in ["product-surfaces", "fubini-study", "complex-hyperbolic"] {
        for p in analyse(&catalog_chart(name).unwrap(), 8, 6) {
            let k = p.decomp.kappa;
            let mut expected = [k / 6.0, -k / 12.0, -k / 12.0];
            expected.sort_by(f64::total_cmp);
            let ev = p.gray.degeneracy.eigenvalues;
            for i in 0..3 {
                assert!((ev[i] - expected[i]).abs() < 1e-8, "{name}");
            }
            assert!(p.gray.degeneracy.gap < 1e-8);
            assert!((p.decomp.kappa - p.decomp.s).abs() < 1e-8);
            assert!(p.gray.gamma0.kahler_residual < 1e-8);
        }
    }
}

#[test]
fn unit_factors_give_flat_curvature() {
    let spec = product_surfaces("1", "1");
    for p in analyse(&spec, 4, 1) {
        assert!(p.decomp.operator.iter().flatten().all(|v| v.abs() < 1e-14));
    }
}

#[test]
fn chart_files_round_trip_through_the_loader() {
    for name in common::FIXTURES {
        let spec = common::fixture(name);
        let again = ChartSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again.name, name);
        assert_eq!(again.domain, spec.domain);
    }
}
