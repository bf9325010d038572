//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::time::Instant;

use ak4::chart::product_surfaces;
use ak4::report::{analyze_chart, run_report, run_sandbox_check, PointAnalysis, Status};
use ak4::riemann::{connection, curvature};
use ak4::{structure_at, ChartSpec, RunConfig};
use serde_json::Value;

const POINTS: usize = 32;
const SEED: u64 = 42;

struct Chart {
    spec: ChartSpec,
    points: Vec<PointAnalysis>,
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn config(spec: &ChartSpec) -> RunConfig {
    RunConfig {
        chart: spec.name.clone(),
        points: POINTS,
        seed: SEED,
        ..Default::default()
    }
}

fn analyse(spec: ChartSpec) -> Chart {
    let points = analyze_chart(&spec, &config(&spec)).expect("chart analyses");
    Chart { spec, points }
}

fn worst<'a>(charts: impl IntoIterator<Item = &'a Chart>, f: impl Fn(&PointAnalysis) -> f64) -> f64 {
    charts
        .into_iter()
        .flat_map(|c| c.points.iter().map(&f))
        .fold(0.0, f64::max)
}

fn least<'a>(charts: impl IntoIterator<Item = &'a Chart>, f: impl Fn(&PointAnalysis) -> f64) -> f64 {
    charts
        .into_iter()
        .flat_map(|c| c.points.iter().map(&f))
        .fold(f64::INFINITY, f64::min)
}

fn named<'a>(charts: &'a [Chart], name: &str) -> &'a Chart {
    charts.iter().find(|c| c.spec.name == name).expect("chart present")
}

fn second<T: Default>(p: &PointAnalysis, f: impl Fn(&ak4::bianchi_bach::SecondOrderReport) -> T) -> T {
    p.second_order.as_ref().map(f).unwrap_or_default()
}

fn structure(catalog: &[Chart]) -> Verdict {
    let w = worst(catalog, |p| p.checks["structure"].residual.unwrap_or(f64::INFINITY));
    let n: usize = catalog.iter().map(|c| c.points.len()).sum();
    verdict(
        catalog.len() == 5 && n == 5 * POINTS && w < 1e-9,
        format!("{n} points, worst {w:.2e}"),
    )
}

fn reconstruction(catalog: &[Chart]) -> Verdict {
    let w = worst(catalog, |p| {
        p.decomp.reconstruction_residual.max(p.decomp.reassembly_residual)
    });
    let proj = run_sandbox_check("sandbox-projectors", 1000, SEED).unwrap();
    let pw = proj.aggregate.worst_residual.unwrap_or(f64::INFINITY);
    verdict(
        w < 1e-8 && pw < 1e-10 && proj.aggregate.failed == 0,
        format!("charts {w:.2e}, projectors {pw:.2e} over {} tensors", proj.tensors),
    )
}

fn kappa_and_star(catalog: &[Chart]) -> Verdict {
    let k = worst(catalog, |p| p.decomp.kappa_residual);
    let ak: Vec<&Chart> = catalog
        .iter()
        .filter(|c| c.points.iter().all(|p| p.first_order.d_omega_norm() < 1e-9))
        .collect();
    let star = worst(ak.iter().copied(), |p| {
        (p.decomp.s_star - p.decomp.s - 0.5 * p.first_order.nabla_j_sq).abs()
    });
    let kt = named(catalog, "kodaira-thurston");
    let gap = least([kt], |p| p.decomp.s_star - p.decomp.s);
    let kt_in = ak.iter().any(|c| c.spec.name == "kodaira-thurston");
    verdict(
        k < 1e-9 && star < 1e-8 && kt_in && gap > 0.0,
        format!(
            "kappa {k:.2e}, s*-s {star:.2e} on {} charts, kodaira-thurston s*-s >= {gap:.3}",
            ak.len()
        ),
    )
}

fn second_bianchi(all: &[Chart]) -> Verdict {
    let missing = all
        .iter()
        .flat_map(|c| &c.points)
        .filter(|p| p.second_order.is_none())
        .count();
    let w = worst(all, |p| second(p, |s| s.delta_w_residual));
    let ps = worst([named(all, "product-surfaces")], |p| second(p, |s| s.cotton_norm()));
    verdict(
        missing == 0 && w < 1e-7 && ps > 1e-3,
        format!(
            "worst {w:.2e} on {} charts, product-surfaces |C| up to {ps:.2e}",
            all.len()
        ),
    )
}

fn lemma1(all: &[Chart]) -> Verdict {
    let invariant = |p: &PointAnalysis| p.decomp.ric_anti_norm < 1e-8;
    let mut applicable = 0;
    let mut w: f64 = 0.0;
    for p in all.iter().flat_map(|c| &c.points).filter(|p| invariant(p)) {
        applicable += 1;
        w = w.max(second(p, |s| s.lemma1_residual.max(s.beta0_residual)));
    }
    let non_kahler = worst([named(all, "conformal-hermitian")], |p| p.first_order.theta_norm());
    let violated = least([named(all, "rescaled-sphere-plane")], |p| {
        second(p, |s| s.lemma1_residual)
    });
    verdict(
        w < 1e-7 && non_kahler > 1e-2 && violated > 1e-2,
        format!("worst {w:.2e} at {applicable} points, violation raw residual >= {violated:.2e}"),
    )
}

fn bach(all: &[Chart]) -> Verdict {
    let agree = worst(all, |p| {
        second(p, |s| s.bach.as_ref().map_or(f64::INFINITY, |b| b.agreement_residual))
    });
    let zero_charts = ["flat", "fubini-study", "complex-hyperbolic", "conformal-hermitian"];
    let zero = worst(
        all.iter().filter(|c| zero_charts.contains(&c.spec.name.as_str())),
        |p| second(p, |s| s.bach.as_ref().map_or(f64::INFINITY, |b| b.norm())),
    );
    let nonzero = least([named(all, "product-surfaces")], |p| {
        second(p, |s| s.bach.as_ref().map_or(0.0, |b| b.norm()))
    });
    verdict(
        agree < 1e-6 && zero < 1e-6 && nonzero > 1e-6,
        format!("agreement {agree:.2e}, |B| on Einstein/self-dual {zero:.2e}, product-surfaces |B| >= {nonzero:.2e}"),
    )
}

fn lemma5_chain() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["sandbox-lemma5", "sandbox-gray-chain"] {
        let s = run_sandbox_check(name, 1000, SEED).unwrap();
        let ok = s.aggregate.status == Status::Pass && s.vanishing_side > 0 && s.vanishing_side < s.tensors;
        pass &= ok;
        parts.push(format!(
            "{name} {} ({} vanishing of {})",
            if ok { "ok" } else { "bad" },
            s.vanishing_side,
            s.tensors
        ));
    }
    verdict(pass, parts.join(", "))
}

fn lemma6(catalog: &[Chart]) -> Verdict {
    let fs = named(catalog, "fubini-study");
    // constant factor curvatures 1 and 1/4
    let ps = &analyse(product_surfaces("2/(1 + x1^2 + x2^2)", "4/(1 + x3^2 + x4^2)"));
    let spread = worst([fs], |p| p.gray.totally_real.spread());
    let formula = worst([fs], |p| p.gray.totally_real.formula_residual());
    let ps_spread = least([ps], |p| p.gray.totally_real.spread());
    let ps_wm = least([ps], |p| p.decomp.w_minus_norm());
    verdict(
        spread < 1e-7 && formula < 1e-7 && ps_spread > 1e-3 && ps_wm > 1e-3,
        format!("fubini-study spread {spread:.2e}, mu {formula:.2e}; product-surfaces spread >= {ps_spread:.2e}, |W-| >= {ps_wm:.2e}"),
    )
}

fn ricci_weitzenboeck(all: &[Chart]) -> Verdict {
    let ric = worst(all, |p| p.ricci_identity);
    let wz = worst(all, |p| p.weitzenboeck.omega.max(p.weitzenboeck.polynomial));
    verdict(
        ric < 1e-8 && wz < 1e-6,
        format!("ricci identity {ric:.2e}, Weitzenboeck {wz:.2e}"),
    )
}

fn without_timing(json: &str) -> String {
    let mut v: Value = serde_json::from_str(json).expect("report is JSON");
    v.as_object_mut().expect("object").remove("timing");
    serde_json::to_string(&v).expect("serializes")
}

fn determinism(catalog: &[Chart]) -> Verdict {
    let mut identical = 0;
    for c in catalog {
        let a = run_report(&c.spec, &config(&c.spec)).unwrap().to_json();
        let b = run_report(&c.spec, &config(&c.spec)).unwrap().to_json();
        if without_timing(&a) == without_timing(&b) {
            identical += 1;
        }
    }
    verdict(
        identical == catalog.len(),
        format!("{identical}/{} charts identical modulo timing", catalog.len()),
    )
}

fn finite_differences(catalog: &[Chart]) -> Verdict {
    let mut worst_rel: f64 = 0.0;
    let mut pass = true;
    for c in catalog {
        for p in c.spec.sample_points(8, SEED) {
            let sp = structure_at(&c.spec, p, 2).unwrap();
            let curv = curvature(&sp, &connection(&sp).unwrap()).unwrap();
            let fd = common::riemann_frame(&c.spec, &p, 1e-3);
            let scale = curv.riemann.max_abs();
            for a in 0..4 {
                for b in 0..4 {
                    for cc in 0..4 {
                        for d in 0..4 {
                            let diff = (curv.riemann.at(&[a, b, cc, d]) - fd[a][b][cc][d]).abs();
                            pass &= diff <= 1e-4 * scale + 1e-12;
                            if scale > 0.0 {
                                worst_rel = worst_rel.max(diff / scale);
                            }
                        }
                    }
                }
            }
        }
    }
    verdict(
        pass,
        format!("worst relative difference {worst_rel:.2e} over 8 points per chart"),
    )
}

fn main() {
    let start = Instant::now();
    let catalog: Vec<Chart> = ak4::catalog().into_iter().map(analyse).collect();
    let mut all: Vec<Chart> = common::FIXTURES.iter().map(|n| analyse(common::fixture(n))).collect();
    all.extend(ak4::catalog().into_iter().map(analyse));

    let results = [
        ("structure validation", structure(&catalog)),
        ("reconstruction and U(2) reassembly", reconstruction(&catalog)),
        ("kappa and s*-s", kappa_and_star(&catalog)),
        ("second Bianchi dW = C", second_bianchi(&all)),
        ("alpha/beta formulas and hypothesis sensitivity", lemma1(&all)),
        ("Bach three-way agreement and vanishing", bach(&all)),
        ("Lemma 5 and Gray chain on sandbox tensors", lemma5_chain()),
        ("Lemma 6 totally real curvature", lemma6(&catalog)),
        ("Ricci and Weitzenboeck identities", ricci_weitzenboeck(&all)),
        ("determinism", determinism(&catalog)),
        ("jets vs finite differences", finite_differences(&catalog)),
    ];

    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!(
            "{} {:>2}. {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    let secs = start.elapsed().as_secs_f64();
    println!(
        "{} of {} criteria passed in {secs:.1} s",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
