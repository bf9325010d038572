//! Second Bianchi identity in the form `δW = C`, the `V⁺ ⊕ V⁻` split of
//! `δW⁺`, the Bach tensor by several routes and the Weitzenböck formula on
//! 2-forms.

use serde::Serialize;

use crate::algebra::{self, Mat4};
use crate::chart::StructurePoint;
use crate::decomp::DecompReport;
use crate::error::GeometryError;
use crate::jet::Jet;
use crate::riemann::{ConnectionData, CurvatureData, HermitianFirstOrder};
use crate::tensor::{Field, Tensor};
use crate::tolerance::Tolerances;

/// Kulkarni–Nomizu product of symmetric jet fields.
pub fn kulkarni_nomizu_field(h: &Field, k: &Field) -> Field {
    Field::from_fn(4, |ix| {
        let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
        h.at(&[a, c]) * k.at(&[b, d]) + h.at(&[b, d]) * k.at(&[a, c])
            - h.at(&[a, d]) * k.at(&[b, c])
            - h.at(&[b, c]) * k.at(&[a, d])
    })
}

/// Coordinate jets derived from curvature: `g`, `Ric₀`, `h = ½(Ric − s/6 g)`
/// and the Weyl tensor.
#[derive(Clone, Debug)]
pub struct CurvatureJets {
    pub metric: Field,
    pub ricci0: Field,
    pub h: Field,
    pub weyl: Field,
}

pub fn curvature_jets(sp: &StructurePoint, curv: &CurvatureData) -> CurvatureJets {
    let metric = Field::from_fn(2, |ix| sp.g[ix[0]][ix[1]]);
    let s = curv.scalar_field.as_scalar();
    let ricci0 = curv.ricci_field.sub(&metric.scale(&(s * 0.25)));
    let h = curv
        .ricci_field
        .sub(&metric.scale(&(s * (1.0 / 6.0))))
        .scale(&Jet::constant(0.5, s.order()));
    let weyl = curv
        .riemann_field
        .sub(&kulkarni_nomizu_field(&metric, &metric).scale(&(s * (1.0 / 24.0))))
        .sub(&kulkarni_nomizu_field(&ricci0, &metric).scale(&Jet::constant(0.5, s.order())));
    CurvatureJets {
        metric,
        ricci0,
        h,
        weyl,
    }
}

/// `C_XYZ = ∇_Z h(Y, X) − ∇_Y h(Z, X)`, as a coordinate field `[x][y][z]`.
pub fn cotton_york(cd: &ConnectionData, cj: &CurvatureJets) -> Result<Field, GeometryError> {
    let dh = cd.covariant(&cj.h)?;
    Ok(Field::from_fn(3, |ix| {
        let (x, y, z) = (ix[0], ix[1], ix[2]);
        dh.at(&[z, y, x]) - dh.at(&[y, z, x])
    }))
}

/// `(δW)(X; Y, Z) = −Σ_a (∇_{e_a} W)(e_a, X, Y, Z)`.
pub fn delta_weyl(sp: &StructurePoint, cd: &ConnectionData, cj: &CurvatureJets) -> Result<Field, GeometryError> {
    let dw = cd.covariant(&cj.weyl)?;
    let tr = dw.trace(&sp.g_inv, 0, 1);
    Ok(tr.scale(&Jet::constant(-1.0, tr.order())))
}

/// Self-dual (`sign = 1`) or anti-self-dual part in the last two slots of a
/// frame tensor.
pub fn project_last_pair(t: &Tensor, sign: f64) -> Tensor {
    let r = t.rank();
    let mut out = Tensor::zeros(r);
    let lead = 4usize.pow(r as u32 - 2);
    let mut idx = vec![0; r];
    for n in 0..lead {
        let mut m = n;
        for slot in (0..r - 2).rev() {
            idx[slot] = m % 4;
            m /= 4;
        }
        let mut form: Mat4 = [[0.0; 4]; 4];
        for (y, row) in form.iter_mut().enumerate() {
            for (z, v) in row.iter_mut().enumerate() {
                idx[r - 2] = y;
                idx[r - 1] = z;
                *v = t.at(&idx);
            }
        }
        let p = algebra::dual_part(&form, sign);
        for (y, row) in p.iter().enumerate() {
            for (z, v) in row.iter().enumerate() {
                idx[r - 2] = y;
                idx[r - 1] = z;
                out.set(&idx, *v);
            }
        }
    }
    out
}

fn slot_form(t: &Tensor, x: usize) -> Mat4 {
    std::array::from_fn(|y| std::array::from_fn(|z| t.at(&[x, y, z])))
}

fn unit(x: usize) -> [f64; 4] {
    std::array::from_fn(|i| if i == x { 1.0 } else { 0.0 })
}

/// `A = Jα⊗Ω − ½ Σ e_i⊗(α∧e_i − Jα∧Je_i)`, as a frame tensor `[x][y][z]`.
pub fn v_plus_from_alpha(alpha: &[f64; 4]) -> Tensor {
    let ja = algebra::j_one(alpha);
    let om = algebra::omega();
    let mut t = Tensor::zeros(3);
    for x in 0..4 {
        let ex = unit(x);
        let jx = algebra::j_one(&ex);
        let form = algebra::sub(
            &algebra::scale(&om, ja[x]),
            &algebra::scale(
                &algebra::sub(&algebra::wedge(alpha, &ex), &algebra::wedge(&ja, &jx)),
                0.5,
            ),
        );
        for y in 0..4 {
            for z in 0..4 {
                t.set(&[x, y, z], form[y][z]);
            }
        }
    }
    t
}

/// `B = Σ e_i⊗(Jβ∧φ(e_i) + β∧𝒥φ(e_i))`, as a frame tensor `[x][y][z]`.
pub fn v_minus_from_beta(beta: &[f64; 4], phi: &Mat4) -> Tensor {
    let jb = algebra::j_one(beta);
    let jphi = algebra::j_two(phi);
    let mut t = Tensor::zeros(3);
    for x in 0..4 {
        let form = algebra::add(&algebra::wedge(&jb, &phi[x]), &algebra::wedge(beta, &jphi[x]));
        for y in 0..4 {
            for z in 0..4 {
                t.set(&[x, y, z], form[y][z]);
            }
        }
    }
    t
}

/// `X ↦ ⟨T_X, ψ⟩` for a frame tensor `T[x][y][z]`.
fn pair_with(t: &Tensor, psi: &Mat4) -> [f64; 4] {
    std::array::from_fn(|x| algebra::inner(&slot_form(t, x), psi))
}

/// Splits `δW⁺ ∈ V` into `α` (V⁺ component) and `β` (V⁻ component, relative
/// to `φ`), returning them with the reconstruction residual.
pub fn split_delta_wplus(dwp: &Tensor) -> ([f64; 4], [f64; 4], f64) {
    let phi = algebra::phi();
    let jo = algebra::j_one(&pair_with(dwp, &algebra::omega()));
    let alpha = jo.map(|v| -0.5 * v);
    let rest = dwp.sub(&v_plus_from_alpha(&alpha));
    let norm = algebra::inner(&phi, &phi);
    let jp = algebra::j_one(&pair_with(&rest, &phi));
    let beta = jp.map(|v| -v / norm);
    let rebuilt = v_plus_from_alpha(&alpha).add(&v_minus_from_beta(&beta, &phi));
    (alpha, beta, rebuilt.max_diff(dwp))
}

#[derive(Clone, Debug, Serialize)]
pub struct BachReport {
    pub direct: Mat4,
    pub gauduchon_plus: Mat4,
    pub gauduchon_minus: Mat4,
    /// Closed form for almost Kähler structures with J-invariant Ricci tensor.
    pub almost_kahler: Option<Mat4>,
    /// `½∇*∇Ric₀ + Δs/24 g + ⅙∇ds + s/6 Ric₀ − W̊(Ric₀)`, for J-invariant Ricci.
    pub ricci_form: Option<Mat4>,
    /// Why the closed forms were skipped, if they were.
    pub skipped: Option<String>,
    pub symmetry_residual: f64,
    pub trace_residual: f64,
    /// Largest pairwise difference between the computed routes.
    pub agreement_residual: f64,
    /// `|B^inv + s/6 Ric₀|` where `ds` vanishes and the closed form applies.
    pub constant_scalar_residual: Option<f64>,
}

impl BachReport {
    pub fn norm(&self) -> f64 {
        algebra::max_abs(&self.direct)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondOrderReport {
    pub cotton: Tensor,
    pub delta_w: Tensor,
    pub delta_w_plus: Tensor,
    pub h: Mat4,
    pub alpha: [f64; 4],
    pub beta: [f64; 4],
    /// `|δW − C|` and `|δW⁺ − C⁺|`.
    pub delta_w_residual: f64,
    pub delta_w_plus_residual: f64,
    /// `δW⁺ = A(α) + B(β)`.
    pub split_residual: f64,
    /// `Σ_x δW⁺(e_x; e_x, ·)`, zero for sections of V.
    pub trace_residual: f64,
    /// `α − (−ds/12 + ½Ric₀(θ))` and `β + ¼Ric₀(a + Jb)`.
    pub lemma1_residual: f64,
    pub beta0_residual: f64,
    pub ds: [f64; 4],
    pub bach: Option<BachReport>,
}

impl SecondOrderReport {
    pub fn cotton_norm(&self) -> f64 {
        self.cotton.max_abs()
    }

    pub fn beta_norm(&self) -> f64 {
        algebra::max_abs_vec(&self.beta)
    }
}

fn contract_ricci0(r0: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|x| (0..4).map(|k| v[k] * r0[k][x]).sum())
}

/// `Σ_ij W(x, e_i, e_j, y) t_ij`.
fn weyl_contract(w: &Tensor, t: &Mat4) -> Mat4 {
    std::array::from_fn(|x| {
        std::array::from_fn(|y| {
            let mut acc = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    acc += w.at(&[x, i, j, y]) * t[i][j];
                }
            }
            acc
        })
    })
}

/// `Σ_i (∇_{e_i} T)(x, e_i, y)` for a frame tensor `[i][x][y][z]`.
fn divergence_middle(t: &Tensor) -> Mat4 {
    std::array::from_fn(|x| std::array::from_fn(|y| (0..4).map(|i| t.at(&[i, x, i, y])).sum()))
}

fn j_invariant_ricci(decomp: &DecompReport, tol: &Tolerances) -> bool {
    decomp.ric_anti_norm < tol.first_order
}

pub fn second_order(
    sp: &StructurePoint,
    cd: &ConnectionData,
    curv: &CurvatureData,
    first: &HermitianFirstOrder,
    decomp: &DecompReport,
    tol: &Tolerances,
) -> Result<SecondOrderReport, GeometryError> {
    if sp.order < 3 {
        return Err(GeometryError::InsufficientOrder {
            what: "Cotton-York tensor",
            needed: 3,
            available: sp.order,
        });
    }
    let cj = curvature_jets(sp, curv);
    let c_field = cotton_york(cd, &cj)?;
    let dw_field = delta_weyl(sp, cd, &cj)?;
    let cotton = sp.to_frame(&c_field);
    let delta_w = sp.to_frame(&dw_field);
    let delta_w_plus = project_last_pair(&delta_w, 1.0);
    let cotton_plus = project_last_pair(&cotton, 1.0);

    let (alpha, beta, split_residual) = split_delta_wplus(&delta_w_plus);
    let trace_residual = (0..4)
        .map(|z| (0..4).map(|x| delta_w_plus.at(&[x, x, z])).sum::<f64>().abs())
        .fold(0.0, f64::max);

    let ds_frame = sp.to_frame(&curv.scalar_field.partial()?).to_vec();
    let r0 = &decomp.ricci0;
    let ric_theta = contract_ricci0(r0, &first.theta);
    let expected_alpha: [f64; 4] = std::array::from_fn(|i| -ds_frame[i] / 12.0 + 0.5 * ric_theta[i]);
    let lemma1_residual = algebra::max_abs_vec(&std::array::from_fn(|i| alpha[i] - expected_alpha[i]));
    let jb = algebra::j_one(&first.b);
    let apjb: [f64; 4] = std::array::from_fn(|i| first.a[i] + jb[i]);
    let ric_ab = contract_ricci0(r0, &apjb);
    let beta0_residual = algebra::max_abs_vec(&std::array::from_fn(|i| beta[i] + 0.25 * ric_ab[i]));

    let h = sp.to_frame(&cj.h).to_mat();
    let bach = if sp.order >= 4 {
        Some(bach(sp, cd, curv, first, decomp, &cj, &dw_field, &h, tol)?)
    } else {
        None
    };

    Ok(SecondOrderReport {
        delta_w_residual: delta_w.max_diff(&cotton),
        delta_w_plus_residual: delta_w_plus.max_diff(&cotton_plus),
        cotton,
        delta_w,
        delta_w_plus,
        h,
        alpha,
        beta,
        split_residual,
        trace_residual,
        lemma1_residual,
        beta0_residual,
        ds: ds_frame,
        bach,
    })
}

#[allow(clippy::too_many_arguments)]
fn bach(
    sp: &StructurePoint,
    cd: &ConnectionData,
    curv: &CurvatureData,
    first: &HermitianFirstOrder,
    decomp: &DecompReport,
    cj: &CurvatureJets,
    dw_field: &Field,
    h: &Mat4,
    tol: &Tolerances,
) -> Result<BachReport, GeometryError> {
    let ddw = sp.to_frame(&cd.covariant(dw_field)?);
    let weyl = sp.to_frame(&cj.weyl);

    let direct = algebra::add(&divergence_middle(&ddw), &weyl_contract(&weyl, h));
    let half = |sign: f64| {
        let b = algebra::add(
            &divergence_middle(&project_last_pair(&ddw, sign)),
            &weyl_contract(&project_last_pair(&weyl, sign), h),
        );
        algebra::scale(&b, 2.0)
    };
    let gauduchon_plus = half(1.0);
    let gauduchon_minus = half(-1.0);

    let s = curv.scalar;
    let r0 = &decomp.ricci0;
    let g = algebra::identity4();
    let mut routes = vec![direct, gauduchon_plus, gauduchon_minus];
    let mut skipped = Vec::new();
    let mut ricci_form = None;
    let mut almost_kahler = None;
    let mut constant_scalar_residual = None;

    if j_invariant_ricci(decomp, tol) {
        let dds = sp.to_frame(&cd.covariant(&curv.scalar_field.partial()?)?).to_mat();
        let lap_s = -algebra::trace(&dds);
        let ddr = sp.to_frame(&cd.covariant(&cd.covariant(&cj.ricci0)?)?);
        let rough: Mat4 =
            std::array::from_fn(|x| std::array::from_fn(|y| -(0..4).map(|i| ddr.at(&[i, i, x, y])).sum::<f64>()));
        let b = algebra::add(
            &algebra::add(&algebra::scale(&rough, 0.5), &algebra::scale(&g, lap_s / 24.0)),
            &algebra::add(
                &algebra::add(&algebra::scale(&dds, 1.0 / 6.0), &algebra::scale(r0, s / 6.0)),
                &weyl_contract(&weyl, r0),
            ),
        );
        ricci_form = Some(b);
        routes.push(b);

        if first.d_omega_norm() < tol.first_order {
            // ρ₀(X, Y) = Ric₀(JX, Y)
            let rho0 = Field::from_fn(2, |ix| {
                let mut acc = Jet::zero(cj.ricci0.order());
                for k in 0..4 {
                    acc += sp.j[k][ix[0]] * cj.ricci0.at(&[k, ix[1]]);
                }
                acc
            });
            let drho = sp.to_frame(&cd.covariant(&rho0)?);
            let nab = &first.nabla_omega;
            let s_term: Mat4 = std::array::from_fn(|x| {
                std::array::from_fn(|y| {
                    let mut acc = 0.0;
                    for i in 0..4 {
                        for k in 0..4 {
                            acc += nab.at(&[i, x, k]) * drho.at(&[i, k, y]);
                        }
                    }
                    acc
                })
            });
            let inv = algebra::j_part(&dds, 1.0);
            let anti = algebra::j_part(&dds, -1.0);
            let b = [
                algebra::scale(&inv, -1.0 / 3.0),
                algebra::scale(&anti, 1.0 / 6.0),
                algebra::scale(&g, -lap_s / 12.0),
                algebra::scale(r0, -s / 6.0),
                s_term,
            ]
            .iter()
            .fold([[0.0; 4]; 4], |acc, t| algebra::add(&acc, t));
            almost_kahler = Some(b);
            routes.push(b);
            let ds = sp.to_frame(&curv.scalar_field.partial()?).to_vec();
            if algebra::max_abs_vec(&ds) < tol.first_order && algebra::max_abs(&dds) < tol.first_order {
                let binv = algebra::j_part(&direct, 1.0);
                constant_scalar_residual = Some(algebra::max_abs(&algebra::add(&binv, &algebra::scale(r0, s / 6.0))));
            }
        } else {
            skipped.push(format!("|dΩ| = {:.3e} (not almost Kähler)", first.d_omega_norm()));
        }
    } else {
        skipped.push(format!(
            "|Ric^anti| = {:.3e} (Ricci not J-invariant)",
            decomp.ric_anti_norm
        ));
    }

    let mut agreement: f64 = 0.0;
    for i in 0..routes.len() {
        for j in i + 1..routes.len() {
            agreement = agreement.max(algebra::max_abs(&algebra::sub(&routes[i], &routes[j])));
        }
    }
    Ok(BachReport {
        symmetry_residual: algebra::max_abs(&algebra::skew_part(&direct)),
        trace_residual: algebra::trace(&direct).abs(),
        direct,
        gauduchon_plus,
        gauduchon_minus,
        almost_kahler,
        ricci_form,
        skipped: if skipped.is_empty() {
            None
        } else {
            Some(skipped.join("; "))
        },
        agreement_residual: agreement,
        constant_scalar_residual,
    })
}

/// Hodge–de Rham Laplacian `dδφ + δdφ` against `∇*∇φ + s/3 φ − 2W(φ)` for a
/// 2-form jet field, in the frame.
pub fn weitzenboeck_check(
    sp: &StructurePoint,
    cd: &ConnectionData,
    curv: &CurvatureData,
    phi: &Field,
) -> Result<f64, GeometryError> {
    if phi.order() < 2 || sp.order < 2 {
        return Err(GeometryError::InsufficientOrder {
            what: "Weitzenböck formula",
            needed: 2,
            available: phi.order().min(sp.order),
        });
    }
    let neg = |f: Field| {
        let o = f.order();
        f.scale(&Jet::constant(-1.0, o))
    };
    let codiff = |f: &Field| -> Result<Field, GeometryError> { Ok(neg(cd.covariant(f)?.trace(&sp.g_inv, 0, 1))) };
    let d_delta = codiff(phi)?.exterior()?;
    let delta_d = codiff(&phi.exterior()?)?;
    let hodge_lap = sp.to_frame(&d_delta.add(&delta_d)).to_mat();
    let rough = sp
        .to_frame(&neg(cd.covariant(&cd.covariant(phi)?)?.trace(&sp.g_inv, 0, 1)))
        .to_mat();

    let r = &curv.riemann;
    let g = algebra::identity4();
    let s = curv.scalar;
    let weyl = r
        .sub(&algebra::kulkarni_nomizu(&g, &g).scale(s / 24.0))
        .sub(&algebra::kulkarni_nomizu(&curv.ricci0, &g).scale(0.5));
    let pf = sp.to_frame(phi).to_mat();
    let rhs = algebra::add(
        &algebra::add(&rough, &algebra::scale(&pf, s / 3.0)),
        &algebra::scale(&algebra::apply(&weyl, &pf), -2.0),
    );
    Ok(algebra::max_abs(&algebra::sub(&hodge_lap, &rhs)))
}

/// A 2-form field with seeded quadratic polynomial coefficients, expanded at `p`.
pub fn polynomial_two_form(p: &[f64; 4], order: usize, seed: u64) -> Field {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let x: [Jet; 4] = std::array::from_fn(|i| Jet::variable(i, p[i], order));
    let mut comps: [[Jet; 4]; 4] = [[Jet::zero(order); 4]; 4];
    for a in 0..4 {
        for b in a + 1..4 {
            let mut f = Jet::constant(rng.gen_range(-1.0..=1.0), order);
            for i in 0..4 {
                f += x[i] * rng.gen_range(-1.0..=1.0);
                for j in i..4 {
                    f += x[i] * x[j] * rng.gen_range(-1.0..=1.0);
                }
            }
            comps[a][b] = f;
            comps[b][a] = f * -1.0;
        }
    }
    Field::from_fn(2, |ix| comps[ix[0]][ix[1]])
}
