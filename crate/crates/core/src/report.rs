//! Per-point analysis pipeline, the named identity checks, sandbox suites and
//! the versioned JSON report.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{self, Mat4};
use crate::bianchi_bach::{polynomial_two_form, second_order, weitzenboeck_check, SecondOrderReport};
use crate::chart::{structure_at, ChartSpec, StructureResiduals};
use crate::decomp::{decompose, projector_residual, DecompReport};
use crate::error::GeometryError;
use crate::gray::{
    gray_report, gray_residuals, lemma5_triple, lemma6_triple, prop2i_residual, totally_real_curvature,
    wplus_degeneracy_of, GrayReport, ReversedOutcome, Verdict,
};
use crate::riemann::{connection, curvature, hermitian_first_order, ricci_identity_check, HermitianFirstOrder};
use crate::sandbox::{curvature_with_blocks, random_blocks, random_curvature, Blocks};
use crate::tolerance::Tolerances;

pub const SCHEMA: &str = "ak4/1";

/// Smallest number of tensors a sandbox check draws.
pub const SANDBOX_MIN_TENSORS: usize = 1000;

pub const CHART_CHECKS: &[&str] = &[
    "structure",
    "reconstruction",
    "kappa",
    "s-star",
    "nabla-j",
    "bianchi",
    "lemma1-alpha",
    "beta0",
    "bach-3way",
    "bach-zero",
    "lemma5",
    "lemma6",
    "gray-chain",
    "prop1",
    "prop2i",
    "degeneracy",
    "gamma0",
    "ric-id",
    "weitzenboeck",
];

pub const SANDBOX_CHECKS: &[&str] = &[
    "sandbox-projectors",
    "sandbox-lemma5",
    "sandbox-gray-chain",
    "sandbox-lemma6",
    "sandbox-prop2i",
    "sandbox-degeneracy",
];

pub fn check_names() -> Vec<&'static str> {
    CHART_CHECKS.iter().chain(SANDBOX_CHECKS).copied().collect()
}

pub fn is_known_check(name: &str) -> bool {
    check_names().contains(&name)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    /// Catalog name or chart file path.
    pub chart: String,
    pub points: usize,
    pub seed: u64,
    pub order: usize,
    pub tolerances: Tolerances,
    pub planes: usize,
    #[serde(skip)]
    pub output: Option<std::path::PathBuf>,
    /// Empty selects every chart check.
    pub checks: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            chart: "flat".to_string(),
            points: 32,
            seed: 42,
            order: 4,
            tolerances: Tolerances::default(),
            planes: 64,
            output: None,
            checks: Vec::new(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), GeometryError> {
        let bad = |m: String| Err(GeometryError::InvalidArgument(m));
        if self.points == 0 {
            return bad("point count must be at least 1".into());
        }
        if !(2..=4).contains(&self.order) {
            return bad(format!("jet order {} outside 2..=4", self.order));
        }
        let t = &self.tolerances;
        if [t.algebraic, t.first_order, t.second_order, t.bach, t.verdict]
            .iter()
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return bad("tolerances must be positive".into());
        }
        if self.planes < 16 {
            return bad(format!("{} Lagrangian planes, need at least 16", self.planes));
        }
        if let Some(c) = self.checks.iter().find(|c| !CHART_CHECKS.contains(&c.as_str())) {
            return bad(format!("unknown chart check {c}"));
        }
        Ok(())
    }

    fn enabled(&self, name: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|c| c == name)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub status: Status,
    pub residual: Option<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CheckOutcome {
    pub fn measured(residual: f64, tolerance: f64) -> Self {
        let status = if residual.is_finite() && residual < tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckOutcome {
            status,
            residual: Some(residual),
            tolerance,
            reason: None,
        }
    }

    /// A pass/fail decision that is not a single threshold comparison.
    pub fn decided(passed: bool, residual: f64, tolerance: f64, reason: Option<String>) -> Self {
        CheckOutcome {
            status: if passed && residual.is_finite() {
                Status::Pass
            } else {
                Status::Fail
            },
            residual: Some(residual),
            tolerance,
            reason,
        }
    }

    pub fn skipped(tolerance: f64, reason: impl Into<String>) -> Self {
        CheckOutcome {
            status: Status::Skipped,
            residual: None,
            tolerance,
            reason: Some(reason.into()),
        }
    }
}

/// Two-sided equivalence `lhs < tl ⇔ rhs < tr`. The residual is whichever
/// side should vanish because the other one does, or 0 if neither does.
pub fn equivalence(lhs: f64, tl: f64, rhs: f64, tr: f64) -> (bool, f64) {
    let (l, r) = (lhs < tl, rhs < tr);
    let residual = if l {
        rhs
    } else if r {
        lhs
    } else {
        0.0
    };
    (l == r, residual)
}

#[derive(Clone, Debug, Serialize)]
pub struct WeitzenboeckResiduals {
    pub omega: f64,
    pub polynomial: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointAnalysis {
    pub index: usize,
    pub point: [f64; 4],
    pub structure: StructureResiduals,
    pub torsion_residual: f64,
    pub metric_residual: f64,
    pub curvature_symmetry_residual: f64,
    pub first_order: HermitianFirstOrder,
    pub decomp: DecompReport,
    pub second_order: Option<SecondOrderReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_order_skipped: Option<String>,
    pub gray: GrayReport,
    pub ricci_identity: f64,
    pub weitzenboeck: WeitzenboeckResiduals,
    pub checks: BTreeMap<String, CheckOutcome>,
}

fn point_seed(seed: u64, index: usize, salt: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add((index as u64).wrapping_mul(0xbf58_476d_1ce4_e5b9))
        .wrapping_add(salt)
}

pub fn analyze_point(
    spec: &ChartSpec,
    p: [f64; 4],
    index: usize,
    cfg: &RunConfig,
) -> Result<PointAnalysis, GeometryError> {
    let tol = &cfg.tolerances;
    let sp = structure_at(spec, p, cfg.order)?;
    let cd = connection(&sp)?;
    let curv = curvature(&sp, &cd)?;
    let first = hermitian_first_order(&sp, &cd)?;
    let d = decompose(&curv.riemann);
    let (second, second_skipped) = match second_order(&sp, &cd, &curv, &first, &d, tol) {
        Ok(r) => (Some(r), None),
        Err(e @ GeometryError::InsufficientOrder { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let gray = gray_report(
        &sp,
        &cd,
        &curv,
        &first,
        &d,
        tol,
        cfg.planes,
        point_seed(cfg.seed, index, 1),
    )?;
    let ricci_identity = ricci_identity_check(&sp, &cd, &curv)?;
    let poly = polynomial_two_form(&p, cfg.order, point_seed(cfg.seed, index, 2));
    let weitzenboeck = WeitzenboeckResiduals {
        omega: weitzenboeck_check(&sp, &cd, &curv, &sp.omega)?,
        polynomial: weitzenboeck_check(&sp, &cd, &curv, &poly)?,
    };
    let mut a = PointAnalysis {
        index,
        point: p,
        structure: sp.residuals,
        torsion_residual: cd.torsion_residual(),
        metric_residual: cd.metric_residual(&sp)?,
        curvature_symmetry_residual: curv.symmetry_residual,
        first_order: first,
        decomp: d,
        second_order: second,
        second_order_skipped: second_skipped,
        gray,
        ricci_identity,
        weitzenboeck,
        checks: BTreeMap::new(),
    };
    for name in CHART_CHECKS {
        if cfg.enabled(name) {
            let outcome = chart_check(name, &a, cfg.order, tol);
            a.checks.insert(name.to_string(), outcome);
        }
    }
    Ok(a)
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| if x.is_nan() { f64::NAN } else { m.max(*x) })
}

/// Evaluates one named identity on an analysed point.
pub fn chart_check(name: &str, a: &PointAnalysis, order: usize, tol: &Tolerances) -> CheckOutcome {
    let d = &a.decomp;
    let h = &a.first_order;
    let g = &a.gray;
    let so = a.second_order.as_ref();
    let no_second = || a.second_order_skipped.clone().unwrap_or_default();
    let j_invariant_ricci = d.ric_anti_norm < tol.first_order;
    let almost_kahler = h.d_omega_norm() < tol.verdict;
    match name {
        "structure" => CheckOutcome::measured(
            max_of(&[
                a.structure.max(),
                a.torsion_residual,
                a.metric_residual,
                a.curvature_symmetry_residual,
            ]),
            tol.algebraic,
        ),
        "reconstruction" => CheckOutcome::measured(
            max_of(&[
                d.reconstruction_residual,
                d.reassembly_residual,
                d.ricci_block_residual,
                d.orthogonality_residual,
                d.psi_residual,
                d.w_plus_split_residual,
            ]),
            tol.first_order,
        ),
        "kappa" => CheckOutcome::measured(d.kappa_residual, tol.algebraic),
        "s-star" => {
            if almost_kahler {
                CheckOutcome::measured(((d.s_star - d.s) - 0.5 * h.nabla_j_sq).abs(), tol.first_order)
            } else {
                CheckOutcome::skipped(
                    tol.first_order,
                    format!("|dΩ| = {:.3e}, not almost Kähler", h.d_omega_norm()),
                )
            }
        }
        "nabla-j" => CheckOutcome::measured(max_of(&[h.nabla_j_identity, h.shape_residual]), tol.first_order),
        "bianchi" => match so {
            Some(s) => CheckOutcome::measured(
                max_of(&[
                    s.delta_w_residual,
                    s.delta_w_plus_residual,
                    s.split_residual,
                    s.trace_residual,
                ]),
                tol.second_order,
            ),
            None => CheckOutcome::skipped(tol.second_order, no_second()),
        },
        "lemma1-alpha" | "beta0" => match so {
            Some(_) if !j_invariant_ricci => CheckOutcome::skipped(
                tol.second_order,
                format!("|Ric^anti| = {:.3e}, Ricci not J-invariant", d.ric_anti_norm),
            ),
            Some(s) => CheckOutcome::measured(
                if name == "beta0" {
                    s.beta0_residual
                } else {
                    s.lemma1_residual
                },
                tol.second_order,
            ),
            None => CheckOutcome::skipped(tol.second_order, no_second()),
        },
        "bach-3way" => match so.and_then(|s| s.bach.as_ref()) {
            Some(b) => {
                let mut r = vec![b.agreement_residual, b.symmetry_residual, b.trace_residual];
                r.extend(b.constant_scalar_residual);
                CheckOutcome::decided(max_of(&r) < tol.bach, max_of(&r), tol.bach, b.skipped.clone())
            }
            None => CheckOutcome::skipped(tol.bach, format!("Bach tensor needs jet order 4, have {order}")),
        },
        "bach-zero" => match so.and_then(|s| s.bach.as_ref()) {
            Some(b) => {
                let einstein = d.ricci0_norm() < tol.verdict;
                let self_dual = d.w_minus_norm() < tol.verdict;
                if einstein || self_dual {
                    CheckOutcome::measured(b.norm(), tol.bach)
                } else {
                    CheckOutcome::skipped(tol.bach, "neither Einstein nor self-dual")
                }
            }
            None => CheckOutcome::skipped(tol.bach, format!("Bach tensor needs jet order 4, have {order}")),
        },
        "lemma5" => {
            let (ok, r) = equivalence(g.g2, tol.first_order, max_of(&lemma5_triple(d)), tol.first_order);
            CheckOutcome::decided(ok && g.lemma5_consistent, r, tol.first_order, None)
        }
        "lemma6" => {
            let t = &g.totally_real;
            let (ok, mut r) = equivalence(t.spread(), tol.verdict, max_of(&t.lemma6_triple), tol.first_order);
            if max_of(&t.lemma6_triple) < tol.first_order {
                r = r.max(t.formula_residual());
            }
            CheckOutcome::decided(ok && g.lemma6_consistent, r, tol.verdict, None)
        }
        "gray-chain" => {
            let mut implied = Vec::new();
            if g.g1 < tol.verdict {
                implied.push(g.g2);
            }
            if g.g2 < tol.verdict {
                implied.push(g.g3);
            }
            if implied.is_empty() {
                CheckOutcome::skipped(tol.verdict, "neither G1 nor G2 holds")
            } else {
                CheckOutcome::measured(max_of(&implied), tol.verdict)
            }
        }
        "prop1" => match (&g.prop1, &g.prop1_skipped) {
            (Some(p), _) => {
                let mut r = vec![p.residual, p.star_scalar_mismatch];
                r.extend(p.gradient);
                CheckOutcome::measured(max_of(&r), tol.second_order)
            }
            (None, reason) => CheckOutcome::skipped(tol.second_order, reason.clone().unwrap_or_default()),
        },
        "prop2i" => match &g.reversed {
            ReversedOutcome::Computed(rs) if g.g2 < tol.verdict => CheckOutcome::measured(
                max_of(&[
                    rs.prop2i_residual,
                    rs.d_omega_bar,
                    rs.nullity_residual,
                    rs.a_length_residual,
                    max_of(&rs.g2_structure_residuals),
                ]),
                tol.second_order,
            ),
            ReversedOutcome::Computed(_) => CheckOutcome::skipped(
                tol.second_order,
                format!("G2 residual {:.3e}, hypothesis not met", g.g2),
            ),
            ReversedOutcome::NullityUndefined { a_norm_sq } => {
                CheckOutcome::skipped(tol.second_order, format!("|a|² = {a_norm_sq:.3e}, Kähler point"))
            }
            ReversedOutcome::NotAlmostKahler { d_omega } => {
                CheckOutcome::skipped(tol.second_order, format!("|dΩ| = {d_omega:.3e}, not almost Kähler"))
            }
        },
        "degeneracy" => match g.degeneracy.dichotomy_consistent {
            Some(ok) => {
                let (_, r) = equivalence(g.degeneracy.gap, tol.verdict, d.w2_norm(), tol.verdict);
                CheckOutcome::decided(ok, r, tol.verdict, None)
            }
            None => CheckOutcome::skipped(tol.verdict, format!("|W₃⁺| = {:.3e}", d.w3_norm())),
        },
        "gamma0" => {
            let mut r = vec![g.gamma0.antisymmetry_residual];
            if g.verdict == Verdict::Kahler {
                r.push(g.gamma0.kahler_residual);
            }
            CheckOutcome::measured(max_of(&r), tol.first_order)
        }
        "ric-id" => CheckOutcome::measured(a.ricci_identity, tol.first_order),
        "weitzenboeck" => CheckOutcome::measured(max_of(&[a.weitzenboeck.omega, a.weitzenboeck.polynomial]), tol.bach),
        _ => CheckOutcome::skipped(0.0, format!("unknown check {name}")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckAggregate {
    pub status: Status,
    pub worst_residual: Option<f64>,
    /// Index of the point (or tensor) with the worst residual.
    pub worst_at: Option<usize>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub tolerance: f64,
}

pub fn aggregate<'a>(outcomes: impl IntoIterator<Item = &'a CheckOutcome>) -> CheckAggregate {
    let mut agg = CheckAggregate {
        status: Status::Skipped,
        worst_residual: None,
        worst_at: None,
        passed: 0,
        failed: 0,
        skipped: 0,
        tolerance: 0.0,
    };
    for (i, o) in outcomes.into_iter().enumerate() {
        agg.tolerance = o.tolerance;
        match o.status {
            Status::Pass => agg.passed += 1,
            Status::Fail => agg.failed += 1,
            Status::Skipped => agg.skipped += 1,
        }
        if let Some(r) = o.residual {
            let worse = match agg.worst_residual {
                None => true,
                Some(w) => r.is_nan() || r > w,
            };
            if worse && !agg.worst_residual.is_some_and(f64::is_nan) {
                agg.worst_residual = Some(r);
                agg.worst_at = Some(i);
            }
        }
    }
    agg.status = if agg.failed > 0 {
        Status::Fail
    } else if agg.passed > 0 {
        Status::Pass
    } else {
        Status::Skipped
    };
    agg
}

/// The largest value of each quantity behind the verdict ladder.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Ladder {
    pub nabla_omega: f64,
    pub nijenhuis: f64,
    pub d_omega: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub ricci0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub einstein: bool,
    pub ladder: Ladder,
}

/// Weakest pointwise verdict; Einstein only if every point is.
pub fn classify_points(points: &[PointAnalysis]) -> Classification {
    let verdict = points
        .iter()
        .map(|p| p.gray.verdict)
        .max_by_key(Verdict::rank)
        .unwrap_or(Verdict::AlmostHermitian);
    let mut ladder = Ladder::default();
    for p in points {
        let m = |a: &mut f64, v: f64| *a = a.max(v);
        m(&mut ladder.nabla_omega, p.first_order.nabla_omega.max_abs());
        m(&mut ladder.nijenhuis, p.first_order.nijenhuis_norm());
        m(&mut ladder.d_omega, p.first_order.d_omega_norm());
        m(&mut ladder.g1, p.gray.g1);
        m(&mut ladder.g2, p.gray.g2);
        m(&mut ladder.g3, p.gray.g3);
        m(&mut ladder.ricci0, p.decomp.ricci0_norm());
    }
    Classification {
        verdict,
        einstein: !points.is_empty() && points.iter().all(|p| p.gray.einstein),
        ladder,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartInfo {
    pub name: String,
    pub coords: [String; 4],
    pub domain: [[f64; 2]; 4],
    pub tags: Vec<String>,
}

impl From<&ChartSpec> for ChartInfo {
    fn from(s: &ChartSpec) -> Self {
        ChartInfo {
            name: s.name.clone(),
            coords: s.coords.clone(),
            domain: s.domain,
            tags: s.tags.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Aggregate {
    pub passed: bool,
    pub checks: BTreeMap<String, CheckAggregate>,
    pub classification: Classification,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub schema: &'static str,
    pub tool: ToolInfo,
    pub chart: ChartInfo,
    pub config: RunConfig,
    pub points: Vec<PointAnalysis>,
    pub aggregate: Aggregate,
    pub timing: Timing,
}

impl ReportDocument {
    pub fn passed(&self) -> bool {
        self.aggregate.passed
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn tool_info() -> ToolInfo {
    ToolInfo {
        name: "ak4",
        version: env!("CARGO_PKG_VERSION"),
    }
}

/// Analyses every sample point in parallel, keeping the sample order.
pub fn analyze_chart(spec: &ChartSpec, cfg: &RunConfig) -> Result<Vec<PointAnalysis>, GeometryError> {
    cfg.validate()?;
    let pts = spec.sample_points(cfg.points, cfg.seed);
    pts.into_par_iter()
        .enumerate()
        .map(|(i, p)| analyze_point(spec, p, i, cfg))
        .collect()
}

pub fn run_report(spec: &ChartSpec, cfg: &RunConfig) -> Result<ReportDocument, GeometryError> {
    let start = std::time::Instant::now();
    let points = analyze_chart(spec, cfg)?;
    let mut checks = BTreeMap::new();
    for name in CHART_CHECKS.iter().filter(|n| cfg.enabled(n)) {
        checks.insert(name.to_string(), aggregate(points.iter().map(|p| &p.checks[*name])));
    }
    let passed = checks.values().all(|c| c.status != Status::Fail);
    let classification = classify_points(&points);
    Ok(ReportDocument {
        schema: SCHEMA,
        tool: tool_info(),
        chart: ChartInfo::from(spec),
        config: cfg.clone(),
        points,
        aggregate: Aggregate {
            passed,
            checks,
            classification,
        },
        timing: Timing {
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    })
}

/// Summands kept by a seeded random mask, in the order of [`random_blocks`].
fn random_mask(rng: &mut ChaCha8Rng) -> [bool; 7] {
    std::array::from_fn(|_| rng.gen_bool(0.5))
}

/// Blocks cycling through Kähler-type, G2-type and arbitrary masks, so both
/// sides of every equivalence get exercised.
pub fn sandbox_blocks(seed: u64, i: usize) -> Blocks {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, i, 3));
    let tseed = rng.gen();
    match i % 3 {
        0 => {
            let mut b = random_blocks(tseed, [true, true, false, false, false, false, true]);
            b.kappa = b.s;
            b
        }
        1 => random_blocks(tseed, [true, true, false, true, false, false, true]),
        _ => random_blocks(tseed, random_mask(&mut rng)),
    }
}

fn sandbox_tensor(seed: u64, i: usize) -> crate::tensor::Tensor {
    curvature_with_blocks(&sandbox_blocks(seed, i))
        .expect("generated blocks are well formed")
        .tensor
}

/// Lemma 6 needs its own mix: constant totally real curvature asks for
/// `Ric^anti = W₃⁺ = W⁻ = 0`, which the generic masks rarely produce.
fn lemma6_blocks(seed: u64, i: usize) -> Blocks {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, i, 4));
    let tseed = rng.gen();
    match i % 3 {
        0 => random_blocks(tseed, [true, true, false, true, true, false, false]),
        1 => random_blocks(tseed, [true, false, false, true, false, false, false]),
        _ => random_blocks(tseed, random_mask(&mut rng)),
    }
}

/// A G2 configuration whose traceless Ricci tensor has `span{a, Ja}` as an
/// eigenspace with eigenvalue `κ/4`, the value forced by comparing the two
/// expressions for `β`. Returns the tensor and `a`.
pub fn prop2i_configuration(seed: u64) -> (crate::tensor::Tensor, [f64; 4]) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = || rng.gen_range(-1.0..=1.0);
    let a: [f64; 4] = loop {
        let v = [u(), u(), u(), u()];
        if algebra::dot(&v, &v) > 1e-2 {
            break v;
        }
    };
    let kappa = u();
    let ja = algebra::j_one(&a);
    let n = algebra::dot(&a, &a);
    let p: Mat4 = std::array::from_fn(|i| std::array::from_fn(|k| (a[i] * a[k] + ja[i] * ja[k]) / n));
    let q = algebra::sub(&algebra::identity4(), &p);
    // any J-invariant symmetric endomorphism of D is a multiple of the identity;
    // tracelessness then fixes it to −κ/4
    let mut raw: Mat4 = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in i..4 {
            raw[i][k] = u();
            raw[k][i] = raw[i][k];
        }
    }
    let on_d = algebra::j_part(&algebra::matmul(&q, &algebra::matmul(&raw, &q)), 1.0);
    let shift = (-kappa / 2.0 - algebra::trace(&on_d)) / 2.0;
    let ricci0 = algebra::add(
        &algebra::scale(&p, kappa / 4.0),
        &algebra::add(&on_d, &algebra::scale(&q, shift)),
    );
    let mut b = random_blocks(seed ^ 0x5bd1_e995, [true, false, false, true, false, false, true]);
    b.ricci0 = ricci0;
    b.kappa = kappa;
    let t = curvature_with_blocks(&b).expect("configuration is well formed").tensor;
    (t, a)
}

#[derive(Clone, Debug, Serialize)]
pub struct SandboxSummary {
    pub check: String,
    pub tensors: usize,
    pub seed: u64,
    pub aggregate: CheckAggregate,
    /// How many tensors landed on the vanishing side of the tested condition.
    pub vanishing_side: usize,
}

/// Runs a sandbox identity over `n` seeded tensors.
pub fn run_sandbox_check(name: &str, n: usize, seed: u64) -> Option<SandboxSummary> {
    let outcomes: Vec<(CheckOutcome, bool)> = match name {
        "sandbox-projectors" => (0..n)
            .into_par_iter()
            .map(|i| {
                let r = random_curvature(point_seed(seed, i, 5)).tensor;
                let d = decompose(&r);
                let res = max_of(&[projector_residual(&algebra::operator_matrix(&r)), d.reassembly_residual]);
                (CheckOutcome::measured(res, 1e-10), true)
            })
            .collect(),
        "sandbox-lemma5" => (0..n)
            .into_par_iter()
            .map(|i| {
                let r = sandbox_tensor(seed, i);
                let d = decompose(&r);
                let g2 = gray_residuals(&r)[1];
                let (ok, res) = equivalence(g2, 1e-12, max_of(&lemma5_triple(&d)), 1e-10);
                (CheckOutcome::decided(ok, res, 1e-10, None), g2 < 1e-12)
            })
            .collect(),
        "sandbox-gray-chain" => (0..n)
            .into_par_iter()
            .map(|i| {
                let [g1, g2, g3] = gray_residuals(&sandbox_tensor(seed, i));
                let mut res = 0.0f64;
                if g1 < 1e-12 {
                    res = res.max(g2);
                }
                if g2 < 1e-10 {
                    res = res.max(g3);
                }
                (CheckOutcome::measured(res, 1e-10), g1 < 1e-12)
            })
            .collect(),
        "sandbox-lemma6" => (0..n)
            .into_par_iter()
            .map(|i| {
                let r = curvature_with_blocks(&lemma6_blocks(seed, i))
                    .expect("generated blocks are well formed")
                    .tensor;
                let d = decompose(&r);
                let t = totally_real_curvature(&r, &d, 64, point_seed(seed, i, 6)).expect("enough planes");
                let triple = max_of(&lemma6_triple(&d));
                let (ok, mut res) = equivalence(t.spread(), 1e-8, triple, 1e-8);
                if triple < 1e-8 {
                    res = res.max(t.formula_residual());
                }
                (CheckOutcome::decided(ok && res < 1e-7, res, 1e-7, None), triple < 1e-8)
            })
            .collect(),
        "sandbox-prop2i" => (0..n)
            .into_par_iter()
            .map(|i| {
                let (r, a) = prop2i_configuration(point_seed(seed, i, 7));
                let d = decompose(&r);
                let g2 = gray_residuals(&r)[1];
                // β from Lemma 2 with b = −Ja, and from the G2 computation
                let ra: [f64; 4] = std::array::from_fn(|x| (0..4).map(|k| a[k] * d.ricci0[k][x]).sum());
                let beta_gap = max_of(&std::array::from_fn::<f64, 4, _>(|x| {
                    (-0.5 * ra[x] + d.kappa / 8.0 * a[x]).abs()
                }));
                let res = max_of(&[prop2i_residual(&d.ricci0, d.kappa, &a), beta_gap, g2]);
                (CheckOutcome::measured(res, 1e-10), true)
            })
            .collect(),
        "sandbox-degeneracy" => (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, i, 8));
                let mut b = random_blocks(rng.gen(), random_mask(&mut rng));
                b.w3 = [[0.0; 2]; 2];
                let d = decompose(&curvature_with_blocks(&b).expect("well formed").tensor);
                let deg = wplus_degeneracy_of(&d.w_plus_matrix(), d.w2_norm(), d.w3_norm(), 1e-8);
                let (ok, res) = equivalence(deg.gap, 1e-8, d.w2_norm(), 1e-8);
                let ok = ok && deg.dichotomy_consistent == Some(true);
                (CheckOutcome::decided(ok, res, 1e-8, None), d.w2_norm() < 1e-8)
            })
            .collect(),
        _ => return None,
    };
    Some(SandboxSummary {
        check: name.to_string(),
        tensors: n,
        seed,
        vanishing_side: outcomes.iter().filter(|(_, v)| *v).count(),
        aggregate: aggregate(outcomes.iter().map(|(o, _)| o)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::catalog_chart;

    fn small(chart: &str, order: usize) -> RunConfig {
        RunConfig {
            chart: chart.into(),
            points: 3,
            seed: 5,
            order,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        for bad in [
            RunConfig {
                points: 0,
                ..Default::default()
            },
            RunConfig {
                order: 5,
                ..Default::default()
            },
            RunConfig {
                tolerances: Tolerances::scaled(-1.0),
                ..Default::default()
            },
            RunConfig {
                checks: vec!["nosuch".into()],
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn equivalence_residual_picks_the_implied_side() {
        assert_eq!(equivalence(0.0, 1e-9, 0.5, 1e-9), (false, 0.5));
        assert_eq!(equivalence(1.0, 1e-9, 1e-12, 1e-9), (false, 1.0));
        assert_eq!(equivalence(1.0, 1e-9, 2.0, 1e-9), (true, 0.0));
    }

    #[test]
    fn flat_report_passes_and_is_kahler() {
        let spec = catalog_chart("flat").unwrap();
        let doc = run_report(&spec, &small("flat", 4)).unwrap();
        assert!(doc.passed());
        assert_eq!(doc.aggregate.classification.verdict, Verdict::Kahler);
        assert!(doc.aggregate.classification.einstein);
        assert_eq!(doc.aggregate.checks.len(), CHART_CHECKS.len());
    }

    #[test]
    fn low_order_skips_second_order_checks_explicitly() {
        let spec = catalog_chart("fubini-study").unwrap();
        let doc = run_report(&spec, &small("fubini-study", 2)).unwrap();
        for name in ["bianchi", "bach-3way", "lemma1-alpha", "prop1"] {
            assert_eq!(doc.aggregate.checks[name].status, Status::Skipped, "{name}");
        }
        let doc = run_report(&spec, &small("fubini-study", 3)).unwrap();
        assert_eq!(doc.aggregate.checks["bianchi"].status, Status::Pass);
        assert_eq!(doc.aggregate.checks["bach-3way"].status, Status::Skipped);
    }

    #[test]
    fn sandbox_checks_exercise_both_sides() {
        for name in SANDBOX_CHECKS {
            let s = run_sandbox_check(name, 60, 1).unwrap();
            assert_eq!(s.aggregate.status, Status::Pass, "{name}: {:?}", s.aggregate);
            assert!(s.vanishing_side > 0, "{name}");
        }
        assert!(run_sandbox_check("sandbox-nosuch", 1, 1).is_none());
    }
}
