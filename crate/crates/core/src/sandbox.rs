//! Algebraic curvature tensors on the standard Hermitian R⁴, built either at
//! random or from prescribed U(2) blocks. Nothing here touches charts or jets.

use nalgebra::Matrix6;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{self, Mat4};
use crate::error::SandboxError;
use crate::tensor::Tensor;

const BLOCK_TOL: f64 = 1e-12;

/// Prescribed summands: `s`, `Ric₀`, `W₁⁺` through `κ`, `W₂⁺` through `Ψ`
/// (components along `φ, 𝒥φ`), `W₃⁺` on `span(φ, 𝒥φ)` and `W⁻`, all in the
/// orthonormal form basis.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Blocks {
    pub s: f64,
    pub ricci0: Mat4,
    pub kappa: f64,
    pub psi: [f64; 2],
    pub w3: [[f64; 2]; 2],
    pub w_minus: [[f64; 3]; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Recipe {
    Random { seed: u64 },
    Blocks(Box<Blocks>),
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicCurvature {
    pub tensor: Tensor,
    pub recipe: Recipe,
}

/// Projects an arbitrary rank-4 tensor onto the algebraic curvature tensors:
/// symmetrize under `abcd → −bacd, −abdc, cdab`, then remove the totally
/// antisymmetric part `⅓(R_abcd + R_acdb + R_adbc)`.
pub fn project_curvature(t: &Tensor) -> Tensor {
    let sym = Tensor::from_fn(4, |ix| {
        let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
        let one = |a, b, c, d| t.at(&[a, b, c, d]) - t.at(&[b, a, c, d]) - t.at(&[a, b, d, c]) + t.at(&[b, a, d, c]);
        (one(a, b, c, d) + one(c, d, a, b)) / 8.0
    });
    Tensor::from_fn(4, |ix| {
        let (a, b, c, d) = (ix[0], ix[1], ix[2], ix[3]);
        let cyc = sym.at(&[a, b, c, d]) + sym.at(&[a, c, d, b]) + sym.at(&[a, d, b, c]);
        sym.at(&[a, b, c, d]) - cyc / 3.0
    })
}

pub fn random_curvature(seed: u64) -> AlgebraicCurvature {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw = Tensor::from_fn(4, |_| rng.gen_range(-1.0..=1.0));
    AlgebraicCurvature {
        tensor: project_curvature(&raw),
        recipe: Recipe::Random { seed },
    }
}

fn malformed(block: &'static str, reason: impl Into<String>) -> SandboxError {
    SandboxError::MalformedBlock {
        block,
        reason: reason.into(),
    }
}

fn validate(b: &Blocks) -> Result<(), SandboxError> {
    let finite = b.s.is_finite()
        && b.kappa.is_finite()
        && b.psi.iter().all(|v| v.is_finite())
        && b.ricci0.iter().flatten().all(|v| v.is_finite())
        && b.w3.iter().flatten().all(|v| v.is_finite())
        && b.w_minus.iter().flatten().all(|v| v.is_finite());
    if !finite {
        return Err(malformed("input", "non-finite entry"));
    }
    let scale = |it: &mut dyn Iterator<Item = f64>| it.fold(1.0f64, |m, v| m.max(v.abs())) * BLOCK_TOL;
    let r = &b.ricci0;
    let tol = scale(&mut r.iter().flatten().copied());
    if algebra::max_abs(&algebra::skew_part(r)) > tol {
        return Err(malformed("ricci0", "not symmetric"));
    }
    if algebra::trace(r).abs() > tol {
        return Err(malformed("ricci0", "not traceless"));
    }
    let w = &b.w3;
    let tol = scale(&mut w.iter().flatten().copied());
    if (w[0][1] - w[1][0]).abs() > tol || (w[0][0] + w[1][1]).abs() > tol {
        return Err(malformed("w3+", "not symmetric traceless on span(φ, 𝒥φ)"));
    }
    let w = &b.w_minus;
    let tol = scale(&mut w.iter().flatten().copied());
    let asym = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .any(|(i, j)| (w[i][j] - w[j][i]).abs() > tol);
    if asym || (w[0][0] + w[1][1] + w[2][2]).abs() > tol {
        return Err(malformed("w-", "not symmetric traceless"));
    }
    Ok(())
}

/// Weyl part of the operator for the given blocks.
fn weyl_operator(b: &Blocks) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    let w11 = b.kappa / 6.0;
    m[(0, 0)] = w11;
    m[(1, 1)] = -0.5 * w11 + b.w3[0][0];
    m[(2, 2)] = -0.5 * w11 + b.w3[1][1];
    m[(1, 2)] = b.w3[0][1];
    m[(2, 1)] = b.w3[1][0];
    for i in 0..2 {
        m[(0, i + 1)] = -0.5 * b.psi[i];
        m[(i + 1, 0)] = -0.5 * b.psi[i];
    }
    for i in 0..3 {
        for j in 0..3 {
            m[(3 + i, 3 + j)] = b.w_minus[i][j];
        }
    }
    m
}

pub fn curvature_with_blocks(b: &Blocks) -> Result<AlgebraicCurvature, SandboxError> {
    validate(b)?;
    let g = algebra::identity4();
    let tensor = algebra::kulkarni_nomizu(&g, &g)
        .scale(b.s / 24.0)
        .add(&algebra::kulkarni_nomizu(&b.ricci0, &g).scale(0.5))
        .add(&algebra::tensor_from_operator(&weyl_operator(b)));
    Ok(AlgebraicCurvature {
        tensor,
        recipe: Recipe::Blocks(Box::new(b.clone())),
    })
}

/// Random blocks drawn from `seed`; `mask` selects which summands are kept,
/// in the order `s, Ric₀^inv, Ric₀^anti, W₁⁺, W₂⁺, W₃⁺, W⁻`.
pub fn random_blocks(seed: u64, mask: [bool; 7]) -> Blocks {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = || rng.gen_range(-1.0..=1.0);
    let mut raw: Mat4 = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            raw[i][j] = u();
            raw[j][i] = raw[i][j];
        }
    }
    let tr = algebra::trace(&raw) / 4.0;
    let ric0 = algebra::sub(&raw, &algebra::scale(&algebra::identity4(), tr));
    let inv = algebra::j_part(&ric0, 1.0);
    let anti = algebra::j_part(&ric0, -1.0);
    let zero: Mat4 = [[0.0; 4]; 4];
    let s = u();
    let kappa = u();
    let psi = [u(), u()];
    let (p, q) = (u(), u());
    let w3 = [[p, q], [q, -p]];
    let (a, b2, c, d, e) = (u(), u(), u(), u(), u());
    let w_minus = [[a, c, d], [c, b2, e], [d, e, -a - b2]];
    Blocks {
        s: if mask[0] { s } else { 0.0 },
        ricci0: algebra::add(&if mask[1] { inv } else { zero }, &if mask[2] { anti } else { zero }),
        kappa: if mask[3] { kappa } else { 0.0 },
        psi: if mask[4] { psi } else { [0.0; 2] },
        w3: if mask[5] { w3 } else { [[0.0; 2]; 2] },
        w_minus: if mask[6] { w_minus } else { [[0.0; 3]; 3] },
    }
}
