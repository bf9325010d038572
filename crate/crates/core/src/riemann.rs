//! Levi-Civita connection, curvature, and first-order invariants of `(g, J)`.
//!
//! Curvature convention: `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]` and
//! `R_XYZW = g(R(X,Y)W, Z)`, so that round spheres have `R_XYXY > 0` and
//! `Ric(Y,W) = Σ_i R(e_i,Y,e_i,W)`.

use nalgebra::Matrix6;
use serde::Serialize;

use crate::algebra::{self, Mat4, J_STD};
use crate::chart::StructurePoint;
use crate::error::GeometryError;
use crate::jet::Jet;
use crate::tensor::{Field, Tensor};

fn require(what: &'static str, needed: usize, available: usize) -> Result<(), GeometryError> {
    if available < needed {
        return Err(GeometryError::InsufficientOrder {
            what,
            needed,
            available,
        });
    }
    Ok(())
}

/// Christoffel symbols `gamma[k][i][j] = Γ^k_ij`.
#[derive(Clone, Debug)]
pub struct ConnectionData {
    pub gamma: Field,
}

impl ConnectionData {
    pub fn order(&self) -> usize {
        self.gamma.order()
    }

    pub fn covariant(&self, f: &Field) -> Result<Field, GeometryError> {
        f.covariant(&self.gamma)
    }

    /// Largest `|Γ^k_ij − Γ^k_ji|` at the base point.
    pub fn torsion_residual(&self) -> f64 {
        let v = self.gamma.values();
        let mut worst: f64 = 0.0;
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    worst = worst.max((v.at(&[k, i, j]) - v.at(&[k, j, i])).abs());
                }
            }
        }
        worst
    }

    /// Largest component of `∇g` at the base point.
    pub fn metric_residual(&self, sp: &StructurePoint) -> Result<f64, GeometryError> {
        let g = Field::from_fn(2, |ix| sp.g[ix[0]][ix[1]]);
        Ok(self.covariant(&g)?.values().max_abs())
    }
}

pub fn connection(sp: &StructurePoint) -> Result<ConnectionData, GeometryError> {
    require("connection", 1, sp.order)?;
    let g = Field::from_fn(2, |ix| sp.g[ix[0]][ix[1]]);
    let dg = g.partial()?;
    // first kind: Γ_lij = ½(∂_i g_lj + ∂_j g_li − ∂_l g_ij)
    let first = Field::from_fn(3, |ix| {
        let (l, i, j) = (ix[0], ix[1], ix[2]);
        (dg.at(&[i, l, j]) + dg.at(&[j, l, i]) - dg.at(&[l, i, j])) * 0.5
    });
    let gamma = Field::from_fn(3, |ix| {
        let mut acc = Jet::zero(first.order());
        for l in 0..4 {
            acc += sp.g_inv[ix[0]][l] * first.at(&[l, ix[1], ix[2]]);
        }
        acc
    });
    Ok(ConnectionData { gamma })
}

/// Curvature at a point: frame components plus the coordinate jets needed
/// for further differentiation.
#[derive(Clone, Debug)]
pub struct CurvatureData {
    /// `R_abcd` in the adapted frame.
    pub riemann: Tensor,
    /// `R` as an operator on two-forms in the frame form basis.
    pub operator: Matrix6<f64>,
    pub ricci: Mat4,
    pub ricci0: Mat4,
    pub scalar: f64,
    /// Coordinate jets `R_ijkl`, `Ric_ij`, `s`.
    pub riemann_field: Field,
    pub ricci_field: Field,
    pub scalar_field: Field,
    /// Symmetries and first Bianchi identity.
    pub symmetry_residual: f64,
    pub operator_asymmetry: f64,
}

pub fn curvature(sp: &StructurePoint, cd: &ConnectionData) -> Result<CurvatureData, GeometryError> {
    require("curvature", 2, sp.order)?;
    let gm = &cd.gamma;
    let dgm = gm.partial()?;
    // R^m_lij = ∂_i Γ^m_jl − ∂_j Γ^m_il + Γ^m_in Γ^n_jl − Γ^m_jn Γ^n_il
    let mixed = Field::from_fn(4, |ix| {
        let (m, l, i, j) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = dgm.at(&[i, m, j, l]) - dgm.at(&[j, m, i, l]);
        for n in 0..4 {
            acc += gm.at(&[m, i, n]) * gm.at(&[n, j, l]) - gm.at(&[m, j, n]) * gm.at(&[n, i, l]);
        }
        acc
    });
    // R_ijkl = g_km R^m_lij
    let riemann_field = Field::from_fn(4, |ix| {
        let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
        let mut acc = Jet::zero(mixed.order());
        for m in 0..4 {
            acc += sp.g[k][m] * mixed.at(&[m, l, i, j]);
        }
        acc
    });
    let ricci_field = riemann_field.trace(&sp.g_inv, 0, 2);
    let scalar_field = ricci_field.trace(&sp.g_inv, 0, 1);

    let riemann = sp.to_frame(&riemann_field);
    let ricci = sp.to_frame(&ricci_field).to_mat();
    let scalar = scalar_field.as_scalar().value();
    let ricci0 = algebra::sub(&ricci, &algebra::scale(&algebra::identity4(), scalar / 4.0));
    let operator = algebra::operator_matrix(&riemann);
    let operator_asymmetry = (operator - operator.transpose()).abs().max();
    Ok(CurvatureData {
        symmetry_residual: algebra::symmetry_residual(&riemann),
        riemann,
        operator,
        ricci,
        ricci0,
        scalar,
        riemann_field,
        ricci_field,
        scalar_field,
        operator_asymmetry,
    })
}

/// `∇J`, `dΩ`, the Lee form, the Nijenhuis tensor and the `a`, `b` forms.
#[derive(Clone, Debug, Serialize)]
pub struct HermitianFirstOrder {
    /// `(∇_x Ω)(y, z)` in the frame; equals `g((∇_x J)y, z)`.
    pub nabla_omega: Tensor,
    /// `(dΩ)_xyz` in the frame.
    pub d_omega: Tensor,
    pub delta_omega: [f64; 4],
    /// `θ = J δΩ`.
    pub theta: [f64; 4],
    /// `N_x(y, z) = g(N(y, z), x)`.
    pub nijenhuis: Tensor,
    /// `a(X) = ½⟨∇_X Ω, φ⟩`.
    pub a: [f64; 4],
    /// `b(X) = ½⟨∇_X Ω, 𝒥φ⟩`.
    pub b: [f64; 4],
    /// Tensor norm `|∇J|²`.
    pub nabla_j_sq: f64,
    /// `|b + Ja|`, zero for almost Kähler structures.
    pub ak_residual: f64,
    /// `|b − Ja|`, zero for integrable structures.
    pub integrable_residual: f64,
    /// `∇Ω − (a⊗φ + b⊗𝒥φ)`: the part of `∇Ω` outside `Λ^anti`.
    pub shape_residual: f64,
    /// `∇_X J = ½(X∧Jθ + JX∧θ) + ½N_JX`.
    pub nabla_j_identity: f64,
}

impl HermitianFirstOrder {
    pub fn d_omega_norm(&self) -> f64 {
        self.d_omega.max_abs()
    }

    pub fn nijenhuis_norm(&self) -> f64 {
        self.nijenhuis.max_abs()
    }

    pub fn theta_norm(&self) -> f64 {
        algebra::max_abs_vec(&self.theta)
    }

    pub fn nabla_omega_at(&self, x: usize) -> Mat4 {
        std::array::from_fn(|y| std::array::from_fn(|z| self.nabla_omega.at(&[x, y, z])))
    }
}

/// `∇Ω` as a coordinate jet field.
pub fn nabla_omega_field(sp: &StructurePoint, cd: &ConnectionData) -> Result<Field, GeometryError> {
    cd.covariant(&sp.omega)
}

pub fn hermitian_first_order(sp: &StructurePoint, cd: &ConnectionData) -> Result<HermitianFirstOrder, GeometryError> {
    require("first-order invariants", 1, sp.order)?;
    let nabla = sp.to_frame(&nabla_omega_field(sp, cd)?);
    let d_omega = sp.to_frame(&sp.omega.exterior()?);

    let delta_omega: [f64; 4] = std::array::from_fn(|b| -(0..4).map(|a| nabla.at(&[a, a, b])).sum::<f64>());
    let theta = algebra::j_one(&delta_omega);

    // N^k_ij from coordinate partials of J, then lowered and framed.
    let jf = Field::from_fn(2, |ix| sp.j[ix[0]][ix[1]]);
    let dj = jf.partial()?.values();
    let jv = sp.j_values();
    let gv = sp.g_values();
    let n_up = Tensor::from_fn(3, |ix| {
        let (k, i, j) = (ix[0], ix[1], ix[2]);
        let mut acc = 0.0;
        for m in 0..4 {
            acc += jv[m][i] * dj.at(&[m, k, j]) - jv[m][j] * dj.at(&[m, k, i]);
            acc -= jv[k][m] * (dj.at(&[i, m, j]) - dj.at(&[j, m, i]));
        }
        acc
    });
    let n_low = Tensor::from_fn(3, |ix| (0..4).map(|k| gv[ix[0]][k] * n_up.at(&[k, ix[1], ix[2]])).sum());
    let nijenhuis = n_low.change_basis(&sp.frame.e);

    let phi = algebra::phi();
    let jphi = algebra::j_phi();
    let mut a = [0.0; 4];
    let mut b = [0.0; 4];
    let mut shape: f64 = 0.0;
    for x in 0..4 {
        let nx: Mat4 = std::array::from_fn(|y| std::array::from_fn(|z| nabla.at(&[x, y, z])));
        a[x] = 0.5 * algebra::inner(&nx, &phi);
        b[x] = 0.5 * algebra::inner(&nx, &jphi);
        let fit = algebra::add(&algebra::scale(&phi, a[x]), &algebra::scale(&jphi, b[x]));
        shape = shape.max(algebra::max_abs(&algebra::sub(&nx, &fit)));
    }
    let ja = algebra::j_one(&a);
    let ak_residual = algebra::max_abs_vec(&std::array::from_fn(|i| b[i] + ja[i]));
    let integrable_residual = algebra::max_abs_vec(&std::array::from_fn(|i| b[i] - ja[i]));
    let nabla_j_sq = nabla.data().iter().map(|v| v * v).sum();

    // ∇_X Ω = ½(X∧Jθ + JX∧θ) + ½ N_{JX}, all as two-forms in the frame.
    let jtheta = algebra::j_one(&theta);
    let mut identity: f64 = 0.0;
    for x in 0..4 {
        let ex: [f64; 4] = std::array::from_fn(|i| if i == x { 1.0 } else { 0.0 });
        let jx = algebra::matvec(&J_STD, &ex);
        let mut rhs = algebra::scale(
            &algebra::add(&algebra::wedge(&ex, &jtheta), &algebra::wedge(&jx, &theta)),
            0.5,
        );
        for c in 0..4 {
            if jx[c] != 0.0 {
                let nc: Mat4 = std::array::from_fn(|y| std::array::from_fn(|z| nijenhuis.at(&[c, y, z])));
                rhs = algebra::add(&rhs, &algebra::scale(&nc, 0.5 * jx[c]));
            }
        }
        let nx: Mat4 = std::array::from_fn(|y| std::array::from_fn(|z| nabla.at(&[x, y, z])));
        identity = identity.max(algebra::max_abs(&algebra::sub(&nx, &rhs)));
    }

    Ok(HermitianFirstOrder {
        nabla_omega: nabla,
        d_omega,
        delta_omega,
        theta,
        nijenhuis,
        a,
        b,
        nabla_j_sq,
        ak_residual,
        integrable_residual,
        shape_residual: shape,
        nabla_j_identity: identity,
    })
}

/// Largest violation of `(∇²_{X,Y} − ∇²_{Y,X})Ω(Z,T) = −R_{XYJZT} − R_{XYZJT}`
/// over frame indices.
pub fn ricci_identity_check(
    sp: &StructurePoint,
    cd: &ConnectionData,
    curv: &CurvatureData,
) -> Result<f64, GeometryError> {
    require("Ricci identity", 2, sp.order)?;
    let nn = sp.to_frame(&cd.covariant(&nabla_omega_field(sp, cd)?)?);
    let r = &curv.riemann;
    let rj = |x: usize, y: usize, z: usize, t: usize, slot: usize| -> f64 {
        (0..4)
            .map(|c| {
                let jc = if slot == 2 { J_STD[c][z] } else { J_STD[c][t] };
                if jc == 0.0 {
                    0.0
                } else if slot == 2 {
                    jc * r.at(&[x, y, c, t])
                } else {
                    jc * r.at(&[x, y, z, c])
                }
            })
            .sum()
    };
    let mut worst: f64 = 0.0;
    for x in 0..4 {
        for y in 0..4 {
            for z in 0..4 {
                for t in 0..4 {
                    let lhs = nn.at(&[x, y, z, t]) - nn.at(&[y, x, z, t]);
                    let rhs = -rj(x, y, z, t, 2) - rj(x, y, z, t, 3);
                    worst = worst.max((lhs - rhs).abs());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{catalog_chart, product_surfaces, structure_at};

    #[test]
    fn flat_connection_and_curvature_vanish() {
        let spec = catalog_chart("flat").unwrap();
        let sp = structure_at(&spec, [0.1, 0.2, -0.3, 0.4], 3).unwrap();
        let cd = connection(&sp).unwrap();
        assert_eq!(cd.gamma.values().max_abs(), 0.0);
        let curv = curvature(&sp, &cd).unwrap();
        assert_eq!(curv.riemann.max_abs(), 0.0);
        assert_eq!(curv.scalar, 0.0);
        assert_eq!(ricci_identity_check(&sp, &cd, &curv).unwrap(), 0.0);
    }

    #[test]
    fn round_sphere_factor_is_positive() {
        // 2/(1 + r²) is the unit-sphere conformal factor
        let spec = product_surfaces("2/(1 + x1^2 + x2^2)", "1");
        let sp = structure_at(&spec, [0.3, -0.2, 0.5, 0.1], 2).unwrap();
        let cd = connection(&sp).unwrap();
        let curv = curvature(&sp, &cd).unwrap();
        assert!((curv.riemann.at(&[0, 1, 0, 1]) - 1.0).abs() < 1e-12);
        assert!((curv.scalar - 2.0).abs() < 1e-12);
    }

    #[test]
    fn order_contract() {
        let spec = catalog_chart("flat").unwrap();
        let sp = structure_at(&spec, [0.0; 4], 1).unwrap();
        let cd = connection(&sp).unwrap();
        assert!(matches!(
            curvature(&sp, &cd),
            Err(GeometryError::InsufficientOrder {
                needed: 2,
                available: 1,
                ..
            })
        ));
        let sp0 = structure_at(&spec, [0.0; 4], 0).unwrap();
        assert!(connection(&sp0).is_err());
    }
}
