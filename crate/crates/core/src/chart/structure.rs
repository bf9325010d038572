use nalgebra::{Matrix4, SymmetricEigen};

use super::ChartSpec;
use crate::algebra;
use crate::error::GeometryError;
use crate::jet::{Jet, MAX_ORDER};
use crate::tensor::Mat4;
use crate::tensor::{invert, Field, Tensor};

/// Tolerance for the pointwise structure invariants, relative to the metric scale.
pub const STRUCTURE_TOL: f64 = 1e-9;
/// Independence threshold when choosing the coordinate vector behind `e3`.
pub const FRAME_INDEPENDENCE_TOL: f64 = 1e-10;

/// Largest violation of each algebraic invariant at the base point.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct StructureResiduals {
    pub j_squared: f64,
    pub compatibility: f64,
    pub omega_skew: f64,
    pub frame_orthonormal: f64,
    pub frame_j: f64,
    pub frame_omega: f64,
    /// Smallest metric eigenvalue; must be positive.
    pub min_eigenvalue: f64,
}

impl StructureResiduals {
    pub fn max(&self) -> f64 {
        [
            self.j_squared,
            self.compatibility,
            self.omega_skew,
            self.frame_orthonormal,
            self.frame_j,
            self.frame_omega,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Adapted orthonormal frame `(e1, Je1, e3, Je3)` with its jets.
#[derive(Clone, Debug)]
pub struct Frame {
    /// `e[i][a]`: coordinate `i` of `e_a`.
    pub e: Mat4,
    /// `coframe[a][i] = g(e_a, ∂_i)`.
    pub coframe: Mat4,
    /// Coordinate vector Gram–Schmidt'ed into `e3`.
    pub third_index: usize,
    /// Sign of `det e`: `+1` when the coordinate orientation agrees with `Ω∧Ω/2`.
    pub orientation: f64,
    e_jets: [[Jet; 4]; 4],
    coframe_jets: [[Jet; 4]; 4],
}

/// Metric, structure and fundamental form jets at one point.
#[derive(Clone, Debug)]
pub struct StructurePoint {
    pub p: [f64; 4],
    pub order: usize,
    pub g: [[Jet; 4]; 4],
    pub g_inv: [[Jet; 4]; 4],
    /// `j[i][k] = J^i_k`.
    pub j: [[Jet; 4]; 4],
    /// `Ω_ij = Σ_k J^k_i g_kj`.
    pub omega: Field,
    pub frame: Frame,
    pub residuals: StructureResiduals,
}

fn inner_jet(g: &[[Jet; 4]; 4], u: &[Jet; 4], v: &[Jet; 4]) -> Jet {
    let mut acc = Jet::zero(u[0].order());
    for i in 0..4 {
        for k in 0..4 {
            acc += u[i] * g[i][k] * v[k];
        }
    }
    acc
}

fn apply_jet(j: &[[Jet; 4]; 4], u: &[Jet; 4]) -> [Jet; 4] {
    std::array::from_fn(|i| {
        let mut acc = Jet::zero(u[0].order());
        for k in 0..4 {
            acc += j[i][k] * u[k];
        }
        acc
    })
}

fn normalize(g: &[[Jet; 4]; 4], u: &[Jet; 4]) -> Result<[Jet; 4], GeometryError> {
    let inv = inner_jet(g, u, u).sqrt()?.recip()?;
    Ok(u.map(|c| c * inv))
}

fn build_frame(g: &[[Jet; 4]; 4], j: &[[Jet; 4]; 4], order: usize) -> Result<Frame, GeometryError> {
    let basis =
        |k: usize| -> [Jet; 4] { std::array::from_fn(|i| Jet::constant(if i == k { 1.0 } else { 0.0 }, order)) };
    let e1 = normalize(g, &basis(0))?;
    let e2 = apply_jet(j, &e1);
    let mut chosen = None;
    for k in 1..4 {
        let v = basis(k);
        let c1 = inner_jet(g, &v, &e1);
        let c2 = inner_jet(g, &v, &e2);
        let w: [Jet; 4] = std::array::from_fn(|i| v[i] - c1 * e1[i] - c2 * e2[i]);
        let len = inner_jet(g, &w, &w).value().max(0.0).sqrt();
        let scale = inner_jet(g, &v, &v).value().sqrt();
        if len > FRAME_INDEPENDENCE_TOL * scale {
            chosen = Some((k, w));
            break;
        }
    }
    let (third_index, w) = chosen.ok_or(GeometryError::DegenerateFrame)?;
    let e3 = normalize(g, &w)?;
    let e4 = apply_jet(j, &e3);
    let cols = [e1, e2, e3, e4];
    let e_jets: [[Jet; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|a| cols[a][i]));
    let coframe_jets: [[Jet; 4]; 4] = std::array::from_fn(|a| {
        std::array::from_fn(|i| {
            let mut acc = Jet::zero(order);
            for k in 0..4 {
                acc += g[i][k] * cols[a][k];
            }
            acc
        })
    });
    let e: Mat4 = e_jets.map(|row| row.map(|x| x.value()));
    let coframe: Mat4 = coframe_jets.map(|row| row.map(|x| x.value()));
    let det = Matrix4::from_fn(|r, c| e[r][c]).determinant();
    Ok(Frame {
        e,
        coframe,
        third_index,
        orientation: det.signum(),
        e_jets,
        coframe_jets,
    })
}

/// Evaluates all structure jets at `p` and checks the algebraic invariants.
pub fn structure_at(spec: &ChartSpec, p: [f64; 4], order: usize) -> Result<StructurePoint, GeometryError> {
    if order > MAX_ORDER {
        return Err(GeometryError::InvalidArgument(format!(
            "jet order {order} above {MAX_ORDER}"
        )));
    }
    if !spec.contains(&p) {
        return Err(GeometryError::OutsideDomain(p));
    }
    let eval = |e: &crate::expr::Expr, key: String| {
        e.eval_jet(&p, order)
            .map_err(|source| GeometryError::Evaluation { key, source })
    };
    let mut g = [[Jet::zero(order); 4]; 4];
    let mut jm = [[Jet::zero(order); 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            g[i][k] = eval(&spec.g[i][k], format!("g {}", super::metric_key(i.min(k), i.max(k))))?;
            jm[i][k] = eval(&spec.j[i][k], format!("J {}", super::structure_key(i, k)))?;
        }
    }
    let gv: Mat4 = g.map(|r| r.map(|x| x.value()));
    let jv: Mat4 = jm.map(|r| r.map(|x| x.value()));
    let scale = algebra::max_abs(&gv).max(1.0);

    let eig = SymmetricEigen::new(Matrix4::from_fn(|r, c| gv[r][c]));
    let min_eigenvalue = eig.eigenvalues.min();
    if min_eigenvalue.is_nan() || min_eigenvalue <= 0.0 {
        return Err(GeometryError::StructureViolation {
            invariant: "g positive definite",
            residual: min_eigenvalue,
        });
    }
    let jj = algebra::matmul(&jv, &jv);
    let j_squared = algebra::max_abs(&algebra::add(&jj, &algebra::identity4()));
    if j_squared > STRUCTURE_TOL {
        return Err(GeometryError::StructureViolation {
            invariant: "J∘J = -Id",
            residual: j_squared,
        });
    }
    let pulled = algebra::matmul(&algebra::transpose(&jv), &algebra::matmul(&gv, &jv));
    let compatibility = algebra::max_abs(&algebra::sub(&pulled, &gv)) / scale;
    if compatibility > STRUCTURE_TOL {
        return Err(GeometryError::StructureViolation {
            invariant: "g(J·, J·) = g",
            residual: compatibility,
        });
    }

    let g_inv = invert(&g)?;
    let omega = Field::from_fn(2, |ix| {
        let mut acc = Jet::zero(order);
        for k in 0..4 {
            acc += jm[k][ix[0]] * g[k][ix[1]];
        }
        acc
    });
    let ov = omega.values().to_mat();
    let omega_skew = algebra::max_abs(&algebra::add(&ov, &algebra::transpose(&ov))) / scale;

    let frame = build_frame(&g, &jm, order)?;
    let gram = algebra::matmul(&algebra::transpose(&frame.e), &algebra::matmul(&gv, &frame.e));
    let frame_orthonormal = algebra::max_abs(&algebra::sub(&gram, &algebra::identity4()));
    // θ^a(J e_b) must be the standard rotation
    let j_frame = algebra::matmul(&frame.coframe, &algebra::matmul(&jv, &frame.e));
    let frame_j = algebra::max_abs(&algebra::sub(&j_frame, &algebra::J_STD));
    let om_frame = Tensor::from_mat(&ov).change_basis(&frame.e).to_mat();
    let frame_omega = algebra::max_abs(&algebra::sub(&om_frame, &algebra::omega()));

    let residuals = StructureResiduals {
        j_squared,
        compatibility,
        omega_skew,
        frame_orthonormal,
        frame_j,
        frame_omega,
        min_eigenvalue,
    };
    for (name, v) in [
        ("Ω antisymmetric", omega_skew),
        ("frame orthonormal", frame_orthonormal),
        ("frame adapted to J", frame_j),
        ("Ω = e1∧e2 + e3∧e4", frame_omega),
    ] {
        if v.is_nan() || v > STRUCTURE_TOL {
            return Err(GeometryError::StructureViolation {
                invariant: name,
                residual: v,
            });
        }
    }
    Ok(StructurePoint {
        p,
        order,
        g,
        g_inv,
        j: jm,
        omega,
        frame,
        residuals,
    })
}

impl StructurePoint {
    pub fn g_values(&self) -> Mat4 {
        self.g.map(|r| r.map(|x| x.value()))
    }

    pub fn j_values(&self) -> Mat4 {
        self.j.map(|r| r.map(|x| x.value()))
    }

    /// Frame components at the base point.
    pub fn to_frame(&self, f: &Field) -> Tensor {
        f.frame(&self.frame.e)
    }

    /// Coordinate field of a two-form with constant frame components.
    pub fn frame_two_form(&self, psi: &Mat4) -> Field {
        let th = &self.frame.coframe_jets;
        Field::from_fn(2, |ix| {
            let mut acc = Jet::zero(self.order);
            for a in 0..4 {
                for b in 0..4 {
                    if psi[a][b] != 0.0 {
                        acc += th[a][ix[0]] * th[b][ix[1]] * psi[a][b];
                    }
                }
            }
            acc
        })
    }

    /// Coordinate components of a frame vector field as jets.
    pub fn frame_vector_jets(&self) -> &[[Jet; 4]; 4] {
        &self.frame.e_jets
    }

    /// `(Jα)_i = −Σ_k J^k_i α_k` for a one-form field.
    pub fn j_one_form(&self, a: &Field) -> Field {
        Field::from_fn(1, |ix| {
            let mut acc = Jet::zero(a.order());
            for k in 0..4 {
                acc -= self.j[k][ix[0]] * a.at(&[k]);
            }
            acc
        })
    }

    /// `𝒥ψ(X, Y) = −ψ(JX, Y)` for a two-form field.
    pub fn j_two_form(&self, psi: &Field) -> Field {
        Field::from_fn(2, |ix| {
            let mut acc = Jet::zero(psi.order());
            for k in 0..4 {
                acc -= self.j[k][ix[0]] * psi.at(&[k, ix[1]]);
            }
            acc
        })
    }

    /// One-form `X ↦ ⟨A_X, ψ⟩ = ½ Σ A_{x;ij} ψ^{ij}` for a form-valued one-form `A`.
    pub fn pair_forms(&self, a: &Field, psi: &Field) -> Field {
        assert_eq!(a.rank(), 3);
        assert_eq!(psi.rank(), 2);
        let gi = &self.g_inv;
        let raised = Field::from_fn(2, |ix| {
            let mut acc = Jet::zero(psi.order());
            for k in 0..4 {
                for l in 0..4 {
                    acc += gi[ix[0]][k] * gi[ix[1]][l] * psi.at(&[k, l]);
                }
            }
            acc
        });
        Field::from_fn(1, |ix| {
            let mut acc = Jet::zero(a.order());
            for k in 0..4 {
                for l in 0..4 {
                    acc += a.at(&[ix[0], k, l]) * raised.at(&[k, l]);
                }
            }
            acc * 0.5
        })
    }
}

/// The frame two-forms of an adapted frame, in coordinate components.
#[derive(Clone, Debug)]
pub struct FormBasis {
    /// `(Ω, φ, 𝒥φ, Λ⁻ basis)` each normalized to `|ω|² = 1`.
    pub forms: [Mat4; 6],
    pub omega: Mat4,
    pub phi: Mat4,
    pub j_phi: Mat4,
    /// Largest component of a basis form on the complementary factor of
    /// `Λ⁺ = RΩ ⊕ Λ^anti`, `Λ⁻ = Λ₀^inv`.
    pub splitting_residual: f64,
    /// Largest deviation from `*ω = ±ω`.
    pub star_residual: f64,
}

/// Frame forms of `sp`, with the self-dual/J-type splitting verified.
pub fn adapted_frame(sp: &StructurePoint) -> FormBasis {
    let th = &sp.frame.coframe;
    let to_coords = |psi: &Mat4| algebra::matmul(&algebra::transpose(th), &algebra::matmul(psi, th));
    let back = |c: &Mat4| Tensor::from_mat(c).change_basis(&sp.frame.e).to_mat();
    let frame_forms = algebra::form_basis();
    let forms = frame_forms.map(|w| to_coords(&w));
    let mut splitting: f64 = 0.0;
    let mut star: f64 = 0.0;
    for (i, c) in forms.iter().enumerate() {
        let w = back(c);
        let sign = if i < 3 { 1.0 } else { -1.0 };
        star = star.max(algebra::max_abs(&algebra::sub(
            &algebra::hodge(&w),
            &algebra::scale(&w, sign),
        )));
        // Ω and Λ⁻ are J-invariant, φ and 𝒥φ anti-invariant; Ω ⟂ Λ^anti.
        let j_sign = if i == 1 || i == 2 { -1.0 } else { 1.0 };
        let wrong = algebra::j_part(&w, -j_sign);
        splitting = splitting.max(algebra::max_abs(&wrong));
        if i == 0 {
            splitting = splitting
                .max(algebra::inner(&w, &algebra::phi()).abs())
                .max(algebra::inner(&w, &algebra::j_phi()).abs());
        }
    }
    FormBasis {
        forms,
        omega: to_coords(&algebra::omega()),
        phi: to_coords(&algebra::phi()),
        j_phi: to_coords(&algebra::j_phi()),
        splitting_residual: splitting,
        star_residual: star,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::catalog_chart;

    #[test]
    fn flat_frame_is_coordinate_basis() {
        let spec = catalog_chart("flat").unwrap();
        let sp = structure_at(&spec, [0.1, 0.2, 0.3, 0.4], 2).unwrap();
        assert_eq!(sp.frame.e, algebra::identity4());
        assert_eq!(sp.omega.values().to_mat(), algebra::omega());
        assert_eq!(sp.frame.orientation, 1.0);
        let fb = adapted_frame(&sp);
        assert!(fb.splitting_residual < 1e-15 && fb.star_residual < 1e-15);
    }

    #[test]
    fn broken_structure_is_reported() {
        let mut file = catalog_chart("flat").unwrap().file().clone();
        file.j.insert("2_1".into(), "2".into());
        let spec = crate::chart::ChartSpec::from_file(file).unwrap();
        match structure_at(&spec, [0.0; 4], 1) {
            Err(GeometryError::StructureViolation { invariant, residual }) => {
                assert_eq!(invariant, "J∘J = -Id");
                assert!(residual > 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn outside_domain() {
        let spec = catalog_chart("complex-hyperbolic").unwrap();
        assert!(matches!(
            structure_at(&spec, [0.9, 0.0, 0.0, 0.0], 1),
            Err(GeometryError::OutsideDomain(_))
        ));
    }

    #[test]
    fn frame_is_bitwise_deterministic() {
        let spec = catalog_chart("kodaira-thurston").unwrap();
        let p = [0.3, -0.7, 0.2, 0.9];
        let a = structure_at(&spec, p, 3).unwrap();
        let b = structure_at(&spec, p, 3).unwrap();
        assert_eq!(a.frame.e, b.frame.e);
        assert!(a.residuals.max() < 1e-12);
    }

    #[test]
    fn frame_two_form_reproduces_omega() {
        let spec = catalog_chart("fubini-study").unwrap();
        let sp = structure_at(&spec, [0.2, -0.4, 0.5, 0.1], 3).unwrap();
        let om = sp.frame_two_form(&algebra::omega());
        for ix in 0..16 {
            let (i, k) = (ix / 4, ix % 4);
            let d = om.at(&[i, k]) - sp.omega.at(&[i, k]);
            assert!(d.max_abs() < 1e-12);
        }
    }
}
