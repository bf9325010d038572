//! Gray's curvature conditions, totally real sectional curvature, the
//! reversed structure of a strictly almost Kähler point, the Ricci form of
//! the first canonical connection, and the classification ladder.

use nalgebra::{Matrix3, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{self, Mat4, J_STD};
use crate::chart::StructurePoint;
use crate::decomp::DecompReport;
use crate::error::GeometryError;
use crate::jet::Jet;
use crate::riemann::{nabla_omega_field, ConnectionData, CurvatureData, HermitianFirstOrder};
use crate::tensor::{wedge_field, Field, Tensor};
use crate::tolerance::Tolerances;

/// `R` with `J` applied to the flagged slots.
pub fn j_slots(r: &Tensor, slots: [bool; 4]) -> Tensor {
    let mut t = r.clone();
    for (s, &on) in slots.iter().enumerate() {
        if !on {
            continue;
        }
        let src = t.clone();
        t = Tensor::from_fn(4, |ix| {
            let mut idx = [ix[0], ix[1], ix[2], ix[3]];
            let x = idx[s];
            let mut acc = 0.0;
            for c in 0..4 {
                let jc = J_STD[c][x];
                if jc != 0.0 {
                    idx[s] = c;
                    acc += jc * src.at(&idx);
                }
            }
            acc
        });
    }
    t
}

/// Max-norm violations of G1, G2 and G3.
pub fn gray_residuals(r: &Tensor) -> [f64; 3] {
    let g1 = r.max_diff(&j_slots(r, [false, false, true, true]));
    let g2 = r
        .sub(&j_slots(r, [true, true, false, false]))
        .sub(&j_slots(r, [true, false, true, false]))
        .sub(&j_slots(r, [true, false, false, true]))
        .max_abs();
    let g3 = r.max_diff(&j_slots(r, [true, true, true, true]));
    [g1, g2, g3]
}

/// `(|Ric^anti|, |W₂⁺|, |W₃⁺|)`, all zero exactly under G2.
pub fn lemma5_triple(d: &DecompReport) -> [f64; 3] {
    [d.ric_anti_norm, d.w2_norm(), d.w3_norm()]
}

/// `(|Ric^anti|, |W₃⁺|, |W⁻|)`, all zero exactly for constant totally real curvature.
pub fn lemma6_triple(d: &DecompReport) -> [f64; 3] {
    [d.ric_anti_norm, d.w3_norm(), d.w_minus_norm()]
}

fn max3(t: &[f64; 3]) -> f64 {
    t.iter().fold(0.0, |m, v| m.max(*v))
}

#[derive(Clone, Debug, Serialize)]
pub struct TotallyReal {
    pub planes: usize,
    /// `(2s − κ)/24`.
    pub mu_formula: f64,
    pub mu_min: f64,
    pub mu_max: f64,
    pub lemma6_triple: [f64; 3],
}

impl TotallyReal {
    pub fn spread(&self) -> f64 {
        self.mu_max - self.mu_min
    }

    /// Largest deviation of a sampled value from the formula.
    pub fn formula_residual(&self) -> f64 {
        (self.mu_max - self.mu_formula)
            .abs()
            .max((self.mu_min - self.mu_formula).abs())
    }
}

fn normalize(v: [f64; 4]) -> [f64; 4] {
    let n = algebra::dot(&v, &v).sqrt();
    v.map(|x| x / n)
}

/// An orthonormal pair spanning a Lagrangian plane, from seeded Gaussian-free
/// uniform draws: `Y` is projected off `span{X, JX}`.
fn lagrangian_pair(rng: &mut ChaCha8Rng) -> ([f64; 4], [f64; 4]) {
    loop {
        let x: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        let y: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..=1.0));
        if algebra::dot(&x, &x) < 1e-6 {
            continue;
        }
        let x = normalize(x);
        let jx = algebra::matvec(&J_STD, &x);
        let (cx, cj) = (algebra::dot(&y, &x), algebra::dot(&y, &jx));
        let y: [f64; 4] = std::array::from_fn(|i| y[i] - cx * x[i] - cj * jx[i]);
        if algebra::dot(&y, &y) < 1e-6 {
            continue;
        }
        return (x, normalize(y));
    }
}

fn sectional(r: &Tensor, x: &[f64; 4], y: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let ab = x[a] * y[b];
            if ab == 0.0 {
                continue;
            }
            for c in 0..4 {
                for d in 0..4 {
                    acc += ab * x[c] * y[d] * r.at(&[a, b, c, d]);
                }
            }
        }
    }
    acc
}

pub fn totally_real_curvature(
    r: &Tensor,
    d: &DecompReport,
    n_planes: usize,
    seed: u64,
) -> Result<TotallyReal, GeometryError> {
    if n_planes < 16 {
        return Err(GeometryError::InvalidArgument(format!(
            "need at least 16 planes, got {n_planes}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for _ in 0..n_planes {
        let (x, y) = lagrangian_pair(&mut rng);
        let k = sectional(r, &x, &y);
        lo = lo.min(k);
        hi = hi.max(k);
    }
    Ok(TotallyReal {
        planes: n_planes,
        mu_formula: (2.0 * d.s - d.kappa) / 24.0,
        mu_min: lo,
        mu_max: hi,
        lemma6_triple: lemma6_triple(d),
    })
}

/// `s* = ½ R_ijkl Ω^ij Ω^kl` as a scalar jet field.
pub fn star_scalar_field(sp: &StructurePoint, curv: &CurvatureData) -> Field {
    let gi = &sp.g_inv;
    let om = &sp.omega;
    let order = curv.riemann_field.order();
    let up = Field::from_fn(2, |ix| {
        let mut acc = Jet::zero(order);
        for k in 0..4 {
            for l in 0..4 {
                acc += gi[ix[0]][k] * gi[ix[1]][l] * om.at(&[k, l]);
            }
        }
        acc
    });
    let rf = &curv.riemann_field;
    let mut acc = Jet::zero(order);
    for i in 0..4 {
        for j in 0..4 {
            let uij = up.at(&[i, j]);
            for k in 0..4 {
                for l in 0..4 {
                    acc += uij * up.at(&[k, l]) * rf.at(&[i, j, k, l]);
                }
            }
        }
    }
    Field::scalar(acc * 0.5)
}

#[derive(Clone, Debug, Serialize)]
pub struct Prop1Report {
    /// `d(s − s*) − κθ − 4Ric₀(θ)`.
    pub residual: f64,
    /// `|d(s* − s)|` at almost Kähler points.
    pub gradient: Option<f64>,
    /// `s*` recomputed from its jet, against the algebraic value.
    pub star_scalar_mismatch: f64,
}

/// Evaluates the G2 identity for `d(s − s*)`; the caller decides whether G2
/// holds at the point.
pub fn prop1_check(
    sp: &StructurePoint,
    curv: &CurvatureData,
    first: &HermitianFirstOrder,
    d: &DecompReport,
    tol: &Tolerances,
) -> Result<Prop1Report, GeometryError> {
    if sp.order < 3 {
        return Err(GeometryError::InsufficientOrder {
            what: "d(s - s*)",
            needed: 3,
            available: sp.order,
        });
    }
    let s_star = star_scalar_field(sp, curv);
    let diff = curv.scalar_field.sub(&s_star);
    let dd = sp.to_frame(&diff.partial()?).to_vec();
    let th = &first.theta;
    let ric_theta: [f64; 4] = std::array::from_fn(|x| (0..4).map(|k| th[k] * d.ricci0[k][x]).sum());
    let res: [f64; 4] = std::array::from_fn(|i| dd[i] - d.kappa * th[i] - 4.0 * ric_theta[i]);
    Ok(Prop1Report {
        residual: algebra::max_abs_vec(&res),
        gradient: (first.d_omega_norm() < tol.first_order).then(|| algebra::max_abs_vec(&dd)),
        star_scalar_mismatch: (s_star.as_scalar().value() - d.s_star).abs(),
    })
}

/// Kähler nullity, reversed structure and structure equations at a strictly
/// almost Kähler point.
#[derive(Clone, Debug, Serialize)]
pub struct ReversedStructure {
    pub a: [f64; 4],
    pub a_norm_sq: f64,
    /// `|a|² − (s* − s)/4`.
    pub a_length_residual: f64,
    /// `J̄` as a matrix acting on frame components.
    pub j_bar: Mat4,
    pub omega_bar: Mat4,
    /// `J̄² + I`, `J̄ᵀJ̄ − I`, and `Ω̄ − g(J̄·, ·)`.
    pub j_bar_square: f64,
    pub j_bar_orthogonality: f64,
    pub omega_bar_consistency: f64,
    /// `|∇_X J|` over `X ∈ D`.
    pub nullity_residual: f64,
    pub xi: [f64; 4],
    /// `|dΩ̄|`.
    pub d_omega_bar: f64,
    /// `da − Ja∧ξ + R(𝒥φ)` and `d(Ja) + a∧ξ + R(φ)`.
    pub structure_residuals: [f64; 2],
    /// The same with `R(φ)`, `R(𝒥φ)` replaced by their G2 values.
    pub g2_structure_residuals: [f64; 2],
    /// `Ric₀ − κ/4 (−g^D + g^{D⊥})`.
    pub prop2i_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub enum ReversedOutcome {
    NullityUndefined { a_norm_sq: f64 },
    NotAlmostKahler { d_omega: f64 },
    Computed(Box<ReversedStructure>),
}

/// Projection onto `span{a, Ja}` in the frame.
fn d_perp_projection(a: &[f64; 4]) -> Mat4 {
    let ja = algebra::j_one(a);
    let n = algebra::dot(a, a);
    std::array::from_fn(|i| std::array::from_fn(|k| (a[i] * a[k] + ja[i] * ja[k]) / n))
}

/// `Ric₀ − κ/4 (−g^D + g^{D⊥})` for `D⊥ = span{a, Ja}` in an orthonormal frame.
pub fn prop2i_residual(ricci0: &Mat4, kappa: f64, a: &[f64; 4]) -> f64 {
    let p = d_perp_projection(a);
    let g = algebra::identity4();
    let model = algebra::scale(&algebra::sub(&p, &algebra::sub(&g, &p)), kappa / 4.0);
    algebra::max_abs(&algebra::sub(ricci0, &model))
}

pub fn reversed_structure(
    sp: &StructurePoint,
    cd: &ConnectionData,
    curv: &CurvatureData,
    first: &HermitianFirstOrder,
    d: &DecompReport,
    tol: &Tolerances,
) -> Result<ReversedOutcome, GeometryError> {
    let a = first.a;
    let a_norm_sq = algebra::dot(&a, &a);
    if a_norm_sq <= 1e-10 {
        return Ok(ReversedOutcome::NullityUndefined { a_norm_sq });
    }
    if first.d_omega_norm() >= tol.first_order {
        return Ok(ReversedOutcome::NotAlmostKahler {
            d_omega: first.d_omega_norm(),
        });
    }
    if sp.order < 2 {
        return Err(GeometryError::InsufficientOrder {
            what: "reversed structure",
            needed: 2,
            available: sp.order,
        });
    }
    let ja = algebra::j_one(&a);
    let p = d_perp_projection(&a);
    let g = algebra::identity4();
    let j_bar = algebra::matmul(&J_STD, &algebra::sub(&g, &algebra::scale(&p, 2.0)));
    let omega_bar = algebra::sub(
        &algebra::omega(),
        &algebra::scale(&algebra::wedge(&a, &ja), 2.0 / a_norm_sq),
    );
    let jj = algebra::matmul(&j_bar, &j_bar);
    let j_bar_square = algebra::max_abs(&algebra::add(&jj, &g));
    let j_bar_orthogonality =
        algebra::max_abs(&algebra::sub(&algebra::matmul(&algebra::transpose(&j_bar), &j_bar), &g));
    // Ω̄(X, Y) = g(J̄X, Y): column X of J̄, row Y
    let from_j = algebra::transpose(&j_bar);
    let omega_bar_consistency = algebra::max_abs(&algebra::sub(&omega_bar, &from_j));

    let mut nullity: f64 = 0.0;
    for v in [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ] {
        let pv = algebra::matvec(&p, &v);
        let w: [f64; 4] = std::array::from_fn(|i| v[i] - pv[i]);
        for y in 0..4 {
            for z in 0..4 {
                let val: f64 = (0..4).map(|x| w[x] * first.nabla_omega.at(&[x, y, z])).sum();
                nullity = nullity.max(val.abs());
            }
        }
    }

    // jets of a, Ja, φ, ξ
    let nab = nabla_omega_field(sp, cd)?;
    let phi = sp.frame_two_form(&algebra::phi());
    let jphi = sp.j_two_form(&phi);
    let half = |f: Field| {
        let o = f.order();
        f.scale(&Jet::constant(0.5, o))
    };
    let a_field = half(sp.pair_forms(&nab, &phi));
    let ja_field = sp.j_one_form(&a_field);
    let xi_field = half(sp.pair_forms(&cd.covariant(&phi)?, &jphi));
    let xi = sp.to_frame(&xi_field).to_vec();

    let da = sp.to_frame(&a_field.exterior()?).to_mat();
    let dja = sp.to_frame(&ja_field.exterior()?).to_mat();
    let r_phi = algebra::apply(&curv.riemann, &algebra::phi());
    let r_jphi = algebra::apply(&curv.riemann, &algebra::j_phi());
    let ja_xi = algebra::wedge(&ja, &xi);
    let a_xi = algebra::wedge(&a, &xi);
    let e1 = algebra::sub(&da, &ja_xi);
    let e2 = algebra::add(&dja, &a_xi);
    let structure_residuals = [
        algebra::max_abs(&algebra::add(&e1, &r_jphi)),
        algebra::max_abs(&algebra::add(&e2, &r_phi)),
    ];
    let c = (d.s_star - d.s) / 8.0;
    let g2_structure_residuals = [
        algebra::max_abs(&algebra::sub(&e1, &algebra::scale(&algebra::j_phi(), c))),
        algebra::max_abs(&algebra::sub(&e2, &algebra::scale(&algebra::phi(), c))),
    ];

    let norm_sq = {
        let mut acc = Jet::zero(a_field.order());
        for i in 0..4 {
            for k in 0..4 {
                acc += sp.g_inv[i][k] * a_field.at(&[i]) * a_field.at(&[k]);
            }
        }
        acc
    };
    let coef = norm_sq.recip()? * -2.0;
    let omega_bar_field = sp.omega.add(&wedge_field(&a_field, &ja_field).scale(&coef));
    let d_omega_bar = sp.to_frame(&omega_bar_field.exterior()?).max_abs();

    Ok(ReversedOutcome::Computed(Box::new(ReversedStructure {
        a,
        a_norm_sq,
        a_length_residual: (a_norm_sq - (d.s_star - d.s) / 4.0).abs(),
        j_bar,
        omega_bar,
        j_bar_square,
        j_bar_orthogonality,
        omega_bar_consistency,
        nullity_residual: nullity,
        xi,
        d_omega_bar,
        structure_residuals,
        g2_structure_residuals,
        prop2i_residual: prop2i_residual(&d.ricci0, d.kappa, &a),
    })))
}

#[derive(Clone, Debug, Serialize)]
pub struct Gamma0 {
    pub form: Mat4,
    pub antisymmetry_residual: f64,
    /// `γ⁰ − 4ρ` with `ρ = Ric(J·, ·)`, meaningful at Kähler points.
    pub kahler_residual: f64,
}

/// `γ⁰(X, Y) = 4Ric*(JX, Y) + ⟨J∇_X J, ∇_Y J⟩`.
pub fn canonical_ricci_form(first: &HermitianFirstOrder, d: &DecompReport) -> Gamma0 {
    // (∇_x J) as a matrix: entry [i][k] is component i of (∇_x J)e_k
    let nj: Vec<Mat4> = (0..4)
        .map(|x| std::array::from_fn(|i| std::array::from_fn(|k| first.nabla_omega.at(&[x, k, i]))))
        .collect();
    let form: Mat4 = std::array::from_fn(|x| {
        std::array::from_fn(|y| {
            let star: f64 = (0..4).map(|c| J_STD[c][x] * d.ric_star[c][y]).sum();
            let jn = algebra::matmul(&J_STD, &nj[x]);
            4.0 * star + algebra::inner(&jn, &nj[y])
        })
    });
    let ric = algebra::add(&d.ricci0, &algebra::scale(&algebra::identity4(), d.s / 4.0));
    let rho: Mat4 = std::array::from_fn(|x| std::array::from_fn(|y| (0..4).map(|c| J_STD[c][x] * ric[c][y]).sum()));
    Gamma0 {
        antisymmetry_residual: algebra::max_abs(&algebra::sym_part(&form)),
        kahler_residual: algebra::max_abs(&algebra::sub(&form, &algebra::scale(&rho, 4.0))),
        form,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Degeneracy {
    pub eigenvalues: [f64; 3],
    pub gap: f64,
    /// With `W₃⁺ = 0`: whether "degenerate ⇔ W₂⁺ = 0" held at this point.
    pub dichotomy_consistent: Option<bool>,
}

pub fn wplus_degeneracy(d: &DecompReport, tol: &Tolerances) -> Degeneracy {
    wplus_degeneracy_of(&d.w_plus_matrix(), d.w2_norm(), d.w3_norm(), tol.verdict)
}

pub fn wplus_degeneracy_of(w: &Matrix3<f64>, w2: f64, w3: f64, tol: f64) -> Degeneracy {
    let eig = SymmetricEigen::new(*w);
    let mut ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2]];
    ev.sort_by(f64::total_cmp);
    let gap = (ev[1] - ev[0]).min(ev[2] - ev[1]);
    Degeneracy {
        eigenvalues: ev,
        gap,
        dichotomy_consistent: (w3 < tol).then_some((gap < tol) == (w2 < tol)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "KAHLER")]
    Kahler,
    #[serde(rename = "AK-G1")]
    AkG1,
    #[serde(rename = "AK-G2")]
    AkG2,
    #[serde(rename = "AK-G3")]
    AkG3,
    #[serde(rename = "AK")]
    Ak,
    #[serde(rename = "ALMOST-HERMITIAN")]
    AlmostHermitian,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Kahler => "KAHLER",
            Verdict::AkG1 => "AK-G1",
            Verdict::AkG2 => "AK-G2",
            Verdict::AkG3 => "AK-G3",
            Verdict::Ak => "AK",
            Verdict::AlmostHermitian => "ALMOST-HERMITIAN",
        }
    }

    /// Position in the ladder, 0 for Kähler; combining points keeps the weakest class.
    pub fn rank(&self) -> usize {
        match self {
            Verdict::Kahler => 0,
            Verdict::AkG1 => 1,
            Verdict::AkG2 => 2,
            Verdict::AkG3 => 3,
            Verdict::Ak => 4,
            Verdict::AlmostHermitian => 5,
        }
    }
}

pub fn classify(first: &HermitianFirstOrder, gray: &[f64; 3], tol: f64) -> Verdict {
    let nabla = first.nabla_omega.max_abs();
    if nabla < tol && first.nijenhuis_norm() < tol {
        Verdict::Kahler
    } else if first.d_omega_norm() < tol {
        if gray[0] < tol {
            Verdict::AkG1
        } else if gray[1] < tol {
            Verdict::AkG2
        } else if gray[2] < tol {
            Verdict::AkG3
        } else {
            Verdict::Ak
        }
    } else {
        Verdict::AlmostHermitian
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GrayReport {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub lemma5_triple: [f64; 3],
    /// `g2 < tol ⇔ triple < tol`.
    pub lemma5_consistent: bool,
    pub prop1: Option<Prop1Report>,
    pub prop1_skipped: Option<String>,
    pub totally_real: TotallyReal,
    /// Constant sampled curvature ⇔ vanishing triple, and the μ formula when it applies.
    pub lemma6_consistent: bool,
    pub reversed: ReversedOutcome,
    pub gamma0: Gamma0,
    pub degeneracy: Degeneracy,
    pub verdict: Verdict,
    pub einstein: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn gray_report(
    sp: &StructurePoint,
    cd: &ConnectionData,
    curv: &CurvatureData,
    first: &HermitianFirstOrder,
    d: &DecompReport,
    tol: &Tolerances,
    n_planes: usize,
    plane_seed: u64,
) -> Result<GrayReport, GeometryError> {
    let [g1, g2, g3] = gray_residuals(&curv.riemann);
    let l5 = lemma5_triple(d);
    let lemma5_consistent = (g2 < tol.first_order) == (max3(&l5) < tol.first_order);
    let (prop1, prop1_skipped) = if g2 >= tol.verdict {
        (None, Some(format!("hypothesis not met: G2 residual {g2:.3e}")))
    } else if sp.order < 3 {
        (None, Some("needs jet order 3".to_string()))
    } else {
        (Some(prop1_check(sp, curv, first, d, tol)?), None)
    };
    let totally_real = totally_real_curvature(&curv.riemann, d, n_planes, plane_seed)?;
    let constant = totally_real.spread() < tol.verdict;
    let vanishing = max3(&totally_real.lemma6_triple) < tol.first_order;
    let lemma6_consistent = constant == vanishing && (!vanishing || totally_real.formula_residual() < tol.verdict);
    let gray = [g1, g2, g3];
    Ok(GrayReport {
        g1,
        g2,
        g3,
        lemma5_triple: l5,
        lemma5_consistent,
        prop1,
        prop1_skipped,
        totally_real,
        lemma6_consistent,
        reversed: reversed_structure(sp, cd, curv, first, d, tol)?,
        gamma0: canonical_ricci_form(first, d),
        degeneracy: wplus_degeneracy(d, tol),
        verdict: classify(first, &gray, tol.verdict),
        einstein: d.ricci0_norm() < tol.verdict,
    })
}
