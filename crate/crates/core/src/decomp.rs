//! SO(4) and U(2) decompositions of a curvature operator given by its
//! components in an adapted orthonormal frame (`J = J_STD`).
//!
//! Operators live in the basis of [`algebra::form_basis`]: indices 0..3 span
//! Λ⁺ = RΩ ⊕ Λ^anti, indices 3..6 span Λ⁻.

use nalgebra::{Matrix3, Matrix6};
use serde::Serialize;

use crate::algebra::{self, Mat4, J_STD};
use crate::tensor::Tensor;

pub type Block = [[f64; 3]; 3];

fn block(m: &Matrix6<f64>, r0: usize, c0: usize) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[(r0 + i, c0 + j)])
}

fn to_block(m: &Matrix3<f64>) -> Block {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

/// Frobenius inner product of operator matrices.
fn frob(a: &Matrix6<f64>, b: &Matrix6<f64>) -> f64 {
    a.component_mul(b).sum()
}

/// Labels of the summands returned by [`u2_components`], in order.
pub const COMPONENT_NAMES: [&str; 7] = ["scalar", "ric0-inv", "ric0-anti", "w1+", "w2+", "w3+", "w-"];

/// Splits a symmetric operator on Λ² into the seven summands
/// `s/12 id + Ric̃₀^inv + Ric̃₀^anti + W₁⁺ + W₂⁺ + W₃⁺ + W⁻`.
///
/// The summands add back to the input exactly when the operator satisfies
/// the first Bianchi identity (equal traces on Λ⁺ and Λ⁻).
pub fn u2_components(m: &Matrix6<f64>) -> [Matrix6<f64>; 7] {
    let m = (m + m.transpose()) * 0.5;
    let s12 = m.trace() / 6.0;
    let scalar = Matrix6::identity() * s12;

    let mut ric_inv = Matrix6::zeros();
    let mut ric_anti = Matrix6::zeros();
    for j in 3..6 {
        ric_inv[(0, j)] = m[(0, j)];
        ric_inv[(j, 0)] = m[(j, 0)];
        for i in 1..3 {
            ric_anti[(i, j)] = m[(i, j)];
            ric_anti[(j, i)] = m[(j, i)];
        }
    }

    let mut w1 = Matrix6::zeros();
    let mut w2 = Matrix6::zeros();
    let mut w3 = Matrix6::zeros();
    let mut wm = Matrix6::zeros();
    let w11 = m[(0, 0)] - s12;
    w1[(0, 0)] = w11;
    w1[(1, 1)] = -0.5 * w11;
    w1[(2, 2)] = -0.5 * w11;
    for i in 1..3 {
        w2[(0, i)] = m[(0, i)];
        w2[(i, 0)] = m[(i, 0)];
    }
    // traceless part of the Λ^anti block
    let half = 0.5 * (m[(1, 1)] + m[(2, 2)]);
    w3[(1, 1)] = m[(1, 1)] - half;
    w3[(2, 2)] = m[(2, 2)] - half;
    w3[(1, 2)] = m[(1, 2)];
    w3[(2, 1)] = m[(2, 1)];
    let tc = (m[(3, 3)] + m[(4, 4)] + m[(5, 5)]) / 3.0;
    for i in 3..6 {
        for j in 3..6 {
            wm[(i, j)] = m[(i, j)] - if i == j { tc } else { 0.0 };
        }
    }
    [scalar, ric_inv, ric_anti, w1, w2, w3, wm]
}

/// Largest failure of `P_i P_j = δ_ij P_i` over the seven projections,
/// measured on the given operator.
pub fn projector_residual(m: &Matrix6<f64>) -> f64 {
    let parts = u2_components(m);
    let mut worst: f64 = 0.0;
    for (i, p) in parts.iter().enumerate() {
        let again = u2_components(p);
        for (j, q) in again.iter().enumerate() {
            let expect = if i == j { *p } else { Matrix6::zeros() };
            worst = worst.max((q - expect).abs().max());
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompReport {
    pub s: f64,
    pub ricci0: Mat4,
    pub ricci0_inv: Mat4,
    pub ricci0_anti: Mat4,
    pub w_plus: Block,
    pub w_minus: Block,
    pub w1: Block,
    pub w2: Block,
    pub w3: Block,
    pub kappa: f64,
    /// `Ψ` as a two-form, and its components along `(φ, 𝒥φ)`.
    pub psi: Mat4,
    pub psi_coords: [f64; 2],
    pub ric_star: Mat4,
    pub s_star: f64,
    /// `|Ric^anti|` and the `⟨R(Λ^anti), Λ⁻⟩` block.
    pub ric_anti_norm: f64,
    pub anti_minus_norm: f64,
    /// `s/12 id + Ric̃₀ + W⁺ + W⁻` against the input tensor.
    pub reconstruction_residual: f64,
    /// Sum of the seven U(2) summands against the input operator.
    pub reassembly_residual: f64,
    /// The Kulkarni–Nomizu lift of `Ric₀` against the star-anticommuting blocks.
    pub ricci_block_residual: f64,
    /// Largest pairwise inner product between distinct summands.
    pub orthogonality_residual: f64,
    /// `skew(Ric*) + ½𝒥Ψ`.
    pub psi_residual: f64,
    /// `κ − ½(3s* − s)`.
    pub kappa_residual: f64,
    /// `W⁺ = W₁⁺ + W₂⁺ + W₃⁺` and tracelessness of `W±`.
    pub w_plus_split_residual: f64,
    pub operator: [[f64; 6]; 6],
}

impl DecompReport {
    pub fn w_minus_norm(&self) -> f64 {
        self.w_minus.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn w2_norm(&self) -> f64 {
        self.w2.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn w3_norm(&self) -> f64 {
        self.w3.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn ricci0_norm(&self) -> f64 {
        algebra::max_abs(&self.ricci0)
    }

    pub fn w_plus_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.w_plus[i][j])
    }
}

/// `Ric*(X, Y) = −R(Ω)(JX, Y)` in the frame.
pub fn star_ricci(r: &Tensor) -> Mat4 {
    let ro = algebra::apply(r, &algebra::omega());
    std::array::from_fn(|x| std::array::from_fn(|y| -(0..4).map(|c| J_STD[c][x] * ro[c][y]).sum::<f64>()))
}

/// `W₂⁺ = −¼(Ψ⊗Ω + Ω⊗Ψ)` inverted on the first row of `W⁺`.
pub fn psi_from_w_plus(w: &Matrix3<f64>) -> [f64; 2] {
    [-2.0 * w[(1, 0)], -2.0 * w[(2, 0)]]
}

pub fn psi_form(c: &[f64; 2]) -> Mat4 {
    algebra::add(
        &algebra::scale(&algebra::phi(), c[0]),
        &algebra::scale(&algebra::j_phi(), c[1]),
    )
}

/// The `⟨R(Λ^anti), Λ⁻⟩` block: rows `φ, 𝒥φ`, columns Λ⁻.
pub fn anti_minus_block(m: &Matrix6<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 1..3 {
        for j in 3..6 {
            worst = worst.max(m[(i, j)].abs());
        }
    }
    worst
}

pub fn decompose(r: &Tensor) -> DecompReport {
    let m = algebra::operator_matrix(r);
    let ric = algebra::ricci(r);
    let s = algebra::trace(&ric);
    let ricci0 = algebra::sub(&ric, &algebra::scale(&algebra::identity4(), s / 4.0));
    let ricci0_inv = algebra::j_part(&ricci0, 1.0);
    let ricci0_anti = algebra::j_part(&ricci0, -1.0);

    let parts = u2_components(&m);
    let sum = parts.iter().fold(Matrix6::zeros(), |acc, p| acc + p);
    let reassembly_residual = (sum - m).abs().max();

    let mut orthogonality: f64 = 0.0;
    for i in 0..7 {
        for j in i + 1..7 {
            orthogonality = orthogonality.max(frob(&parts[i], &parts[j]).abs());
        }
    }

    let g = algebra::identity4();
    let ric_lift = algebra::operator_matrix(&algebra::kulkarni_nomizu(&ricci0, &g).scale(0.5));
    let ricci_block_residual = (ric_lift - parts[1] - parts[2]).abs().max();

    let scalar_part = algebra::kulkarni_nomizu(&g, &g).scale(s / 24.0);
    let w_plus6 = parts[3] + parts[4] + parts[5];
    let rebuilt = scalar_part
        .add(&algebra::kulkarni_nomizu(&ricci0, &g).scale(0.5))
        .add(&algebra::tensor_from_operator(&w_plus6))
        .add(&algebra::tensor_from_operator(&parts[6]));
    let reconstruction_residual = rebuilt.max_diff(r);

    let w_plus = block(&m, 0, 0) - Matrix3::identity() * (s / 12.0);
    let w_minus = block(&m, 3, 3) - Matrix3::identity() * (s / 12.0);
    let w1 = block(&parts[3], 0, 0);
    let w2 = block(&parts[4], 0, 0);
    let w3 = block(&parts[5], 0, 0);
    let w_plus_split_residual = (w1 + w2 + w3 - w_plus)
        .abs()
        .max()
        .max(w_plus.trace().abs())
        .max(w_minus.trace().abs());

    let kappa = 6.0 * w_plus[(0, 0)];
    let psi_coords = psi_from_w_plus(&w_plus);
    let psi = psi_form(&psi_coords);

    let ric_star = star_ricci(r);
    let s_star = algebra::trace(&ric_star);
    let skew = algebra::skew_part(&ric_star);
    let psi_residual = algebra::max_abs(&algebra::add(&skew, &algebra::scale(&algebra::j_two(&psi), 0.5)));
    let kappa_residual = (kappa - 0.5 * (3.0 * s_star - s)).abs();

    DecompReport {
        s,
        ricci0,
        ricci0_inv,
        ricci0_anti,
        w_plus: to_block(&w_plus),
        w_minus: to_block(&w_minus),
        w1: to_block(&w1),
        w2: to_block(&w2),
        w3: to_block(&w3),
        kappa,
        psi,
        psi_coords,
        ric_star,
        s_star,
        ric_anti_norm: algebra::max_abs(&ricci0_anti),
        anti_minus_norm: anti_minus_block(&m),
        reconstruction_residual,
        reassembly_residual,
        ricci_block_residual,
        orthogonality_residual: orthogonality,
        psi_residual,
        kappa_residual,
        w_plus_split_residual,
        operator: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])),
    }
}
