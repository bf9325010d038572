//! Pointwise algebra in an adapted orthonormal frame `(e1, Je1, e3, Je3)`.
//!
//! Two-forms are antisymmetric 4×4 arrays. Their inner product is half the
//! tensor contraction, so `e1∧e2` has unit length and `|Ω|² = 2`. A curvature
//! tensor `R[a][b][c][d]` acts on two-forms by
//! `R(e_a∧e_b) = Σ_{c<d} R_abcd e_c∧e_d`.

use nalgebra::Matrix6;

pub use crate::tensor::Mat4;
use crate::tensor::Tensor;

/// Inner product of two-forms is `TWO_FORM_NORM · Σ ψ_ab χ_ab`.
pub const TWO_FORM_NORM: f64 = 0.5;

/// Standard complex structure on the frame: column `a` is `J e_a`.
pub const J_STD: Mat4 = [
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
];

pub fn wedge(a: &[f64; 4], b: &[f64; 4]) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i] * b[j] - a[j] * b[i]))
}

fn unit(i: usize) -> [f64; 4] {
    std::array::from_fn(|k| if k == i { 1.0 } else { 0.0 })
}

/// `e_i ∧ e_j`.
pub fn e2(i: usize, j: usize) -> Mat4 {
    wedge(&unit(i), &unit(j))
}

pub fn add(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] + b[i][j]))
}

pub fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][j] - b[i][j]))
}

pub fn scale(a: &Mat4, c: f64) -> Mat4 {
    a.map(|row| row.map(|x| c * x))
}

pub fn matmul(a: &Mat4, b: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| (0..4).map(|k| a[i][k] * b[k][j]).sum()))
}

pub fn transpose(a: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[j][i]))
}

pub fn matvec(a: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).map(|k| a[i][k] * v[k]).sum())
}

pub fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|i| a[i] * b[i]).sum()
}

pub fn max_abs(a: &Mat4) -> f64 {
    a.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs_vec(a: &[f64; 4]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn inner(a: &Mat4, b: &Mat4) -> f64 {
    TWO_FORM_NORM
        * (0..4)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * b[i][j])
            .sum::<f64>()
}

fn levi_civita(i: usize, j: usize, k: usize, l: usize) -> f64 {
    let p = [i, j, k, l];
    let mut sign = 1.0;
    for a in 0..4 {
        for b in a + 1..4 {
            if p[a] == p[b] {
                return 0.0;
            }
            if p[a] > p[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// Hodge star with `e1∧e2∧e3∧e4` positive.
pub fn hodge(a: &Mat4) -> Mat4 {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = 0.0;
            for k in 0..4 {
                for l in 0..4 {
                    acc += levi_civita(i, j, k, l) * a[k][l];
                }
            }
            0.5 * acc
        })
    })
}

/// Self-dual (`sign = 1`) or anti-self-dual (`sign = -1`) part.
pub fn dual_part(a: &Mat4, sign: f64) -> Mat4 {
    scale(&add(a, &scale(&hodge(a), sign)), 0.5)
}

/// `(Jα)(X) = −α(JX)`.
pub fn j_one(a: &[f64; 4]) -> [f64; 4] {
    matvec(&J_STD, a)
}

/// `𝒥ψ(X, Y) = −ψ(JX, Y)`.
pub fn j_two(a: &Mat4) -> Mat4 {
    std::array::from_fn(|x| std::array::from_fn(|y| -(0..4).map(|c| J_STD[c][x] * a[c][y]).sum::<f64>()))
}

/// J-invariant part of a bilinear form, `½(t(X,Y) + t(JX,JY))`; `sign = -1`
/// gives the anti-invariant part.
pub fn j_part(t: &Mat4, sign: f64) -> Mat4 {
    let tj = conj_j(t);
    std::array::from_fn(|x| std::array::from_fn(|y| 0.5 * (t[x][y] + sign * tj[x][y])))
}

/// `t(JX, JY)`.
pub fn conj_j(t: &Mat4) -> Mat4 {
    std::array::from_fn(|x| {
        std::array::from_fn(|y| {
            let mut acc = 0.0;
            for c in 0..4 {
                for d in 0..4 {
                    acc += J_STD[c][x] * J_STD[d][y] * t[c][d];
                }
            }
            acc
        })
    })
}

/// The Kähler form `e1∧e2 + e3∧e4`.
pub fn omega() -> Mat4 {
    add(&e2(0, 1), &e2(2, 3))
}

/// `e1∧e3 − e2∧e4`, a section of the anti-invariant self-dual forms with `|φ|² = 2`.
pub fn phi() -> Mat4 {
    sub(&e2(0, 2), &e2(1, 3))
}

/// `𝒥φ = e1∧e4 + e2∧e3`.
pub fn j_phi() -> Mat4 {
    j_two(&phi())
}

/// Orthonormal basis of two-forms: `(Ω, φ, 𝒥φ)/√2` spanning Λ⁺, then
/// `(e12 − e34, e13 + e24, e14 − e23)/√2` spanning Λ⁻.
pub fn form_basis() -> [Mat4; 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        scale(&omega(), r),
        scale(&phi(), r),
        scale(&j_phi(), r),
        scale(&sub(&e2(0, 1), &e2(2, 3)), r),
        scale(&add(&e2(0, 2), &e2(1, 3)), r),
        scale(&sub(&e2(0, 3), &e2(1, 2)), r),
    ]
}

/// Components of a two-form in [`form_basis`].
pub fn form_coords(a: &Mat4) -> [f64; 6] {
    let b = form_basis();
    std::array::from_fn(|i| inner(&b[i], a))
}

pub fn form_from_coords(c: &[f64]) -> Mat4 {
    let b = form_basis();
    let mut out = [[0.0; 4]; 4];
    for (ci, bi) in c.iter().zip(b.iter()) {
        out = add(&out, &scale(bi, *ci));
    }
    out
}

/// `R(ψ)` as a two-form: `R(ψ)_cd = ½ Σ ψ_ab R_abcd`.
pub fn apply(r: &Tensor, a: &Mat4) -> Mat4 {
    std::array::from_fn(|c| {
        std::array::from_fn(|d| {
            let mut acc = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    acc += a[i][j] * r.at(&[i, j, c, d]);
                }
            }
            0.5 * acc
        })
    })
}

/// Operator matrix of a curvature-type tensor in [`form_basis`].
pub fn operator_matrix(r: &Tensor) -> Matrix6<f64> {
    let b = form_basis();
    let images: Vec<Mat4> = b.iter().map(|w| apply(r, w)).collect();
    Matrix6::from_fn(|i, j| inner(&b[i], &images[j]))
}

/// Inverse of [`operator_matrix`]: `R_abcd = Σ ω_I[ab] M_IJ ω_J[cd]`.
pub fn tensor_from_operator(m: &Matrix6<f64>) -> Tensor {
    let b = form_basis();
    Tensor::from_fn(4, |ix| {
        let mut acc = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                acc += b[i][ix[0]][ix[1]] * m[(i, j)] * b[j][ix[2]][ix[3]];
            }
        }
        acc
    })
}

/// Kulkarni–Nomizu product `(h ⊙ k)_abcd = h_ac k_bd + h_bd k_ac − h_ad k_bc − h_bc k_ad`.
pub fn kulkarni_nomizu(h: &Mat4, k: &Mat4) -> Tensor {
    Tensor::from_fn(4, |ix| {
        let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
        h[a][c] * k[b][d] + h[b][d] * k[a][c] - h[a][d] * k[b][c] - h[b][c] * k[a][d]
    })
}

pub fn identity4() -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

/// Ricci contraction `Ric_bd = Σ_a R_abad` in an orthonormal frame.
pub fn ricci(r: &Tensor) -> Mat4 {
    std::array::from_fn(|b| std::array::from_fn(|d| (0..4).map(|a| r.at(&[a, b, a, d])).sum()))
}

pub fn trace(t: &Mat4) -> f64 {
    (0..4).map(|i| t[i][i]).sum()
}

pub fn sym_part(t: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (t[i][j] + t[j][i])))
}

pub fn skew_part(t: &Mat4) -> Mat4 {
    std::array::from_fn(|i| std::array::from_fn(|j| 0.5 * (t[i][j] - t[j][i])))
}

/// Largest violation of the algebraic curvature symmetries and first Bianchi.
pub fn symmetry_residual(r: &Tensor) -> f64 {
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let v = r.at(&[a, b, c, d]);
                    worst = worst
                        .max((v + r.at(&[b, a, c, d])).abs())
                        .max((v + r.at(&[a, b, d, c])).abs())
                        .max((v - r.at(&[c, d, a, b])).abs())
                        .max((v + r.at(&[a, c, d, b]) + r.at(&[a, d, b, c])).abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_basis_is_orthonormal_and_split_by_star() {
        let b = form_basis();
        for i in 0..6 {
            for j in 0..6 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((inner(&b[i], &b[j]) - target).abs() < 1e-15);
            }
            let sign = if i < 3 { 1.0 } else { -1.0 };
            assert!(max_abs(&sub(&hodge(&b[i]), &scale(&b[i], sign))) < 1e-15);
        }
        assert!((inner(&omega(), &omega()) - 2.0).abs() < 1e-15);
        assert!((inner(&phi(), &phi()) - 2.0).abs() < 1e-15);
        assert!(max_abs(&sub(&j_phi(), &add(&e2(0, 3), &e2(1, 2)))) < 1e-15);
    }

    #[test]
    fn omega_matches_j() {
        // Ω(X, Y) = g(JX, Y)
        let om = omega();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(om[x][y], J_STD[y][x]);
            }
        }
    }

    #[test]
    fn anti_invariant_forms() {
        // φ(JX, JY) = −φ(X, Y); Ω and Λ⁻ are invariant.
        let b = form_basis();
        for (i, w) in b.iter().enumerate() {
            let sign = if i == 1 || i == 2 { -1.0 } else { 1.0 };
            assert!(max_abs(&sub(&conj_j(w), &scale(w, sign))) < 1e-15);
        }
    }

    #[test]
    fn operator_round_trip() {
        let m = Matrix6::from_fn(|i, j| ((i * 7 + j * 3) % 5) as f64 + ((j * 7 + i * 3) % 5) as f64);
        let r = tensor_from_operator(&m);
        assert!((operator_matrix(&r) - m).abs().max() < 1e-13);
    }

    #[test]
    fn constant_curvature_via_kulkarni_nomizu() {
        let g = identity4();
        let r = kulkarni_nomizu(&g, &g).scale(0.5);
        assert!(symmetry_residual(&r) < 1e-15);
        assert_eq!(r.at(&[0, 1, 0, 1]), 1.0);
        let ric = ricci(&r);
        assert_eq!(ric[2][2], 3.0);
        assert!((operator_matrix(&r) - Matrix6::identity()).abs().max() < 1e-15);
    }
}
