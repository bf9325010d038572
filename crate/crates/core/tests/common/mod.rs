//! Shared fixtures and a finite-difference curvature oracle that uses only
//! plain `f64` evaluation of the chart expressions.

#![allow(dead_code)]

use std::path::PathBuf;

use ak4::{load_chart, ChartSpec};
use nalgebra::Matrix4;

pub const FIXTURES: [&str; 2] = ["conformal-hermitian", "rescaled-sphere-plane"];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> ChartSpec {
    load_chart(&fixture_path(name)).expect("fixture loads")
}

/// Catalog charts followed by the fixtures.
pub fn all_charts() -> Vec<ChartSpec> {
    let mut v = ak4::catalog();
    v.extend(FIXTURES.iter().map(|n| fixture(n)));
    v
}

type M4 = [[f64; 4]; 4];

fn eval_matrix(exprs: &[[ak4::Expr; 4]; 4], p: &[f64; 4]) -> M4 {
    std::array::from_fn(|i| std::array::from_fn(|j| exprs[i][j].eval(p).expect("chart evaluates")))
}

pub fn metric(spec: &ChartSpec, p: &[f64; 4]) -> M4 {
    eval_matrix(&spec.g, p)
}

fn inverse(m: &M4) -> M4 {
    let inv = Matrix4::from_fn(|r, c| m[r][c])
        .try_inverse()
        .expect("metric invertible");
    std::array::from_fn(|r| std::array::from_fn(|c| inv[(r, c)]))
}

fn shifted(p: &[f64; 4], i: usize, d: f64) -> [f64; 4] {
    let mut q = *p;
    q[i] += d;
    q
}

/// `Γ^k_ij` from central differences of `g`.
pub fn christoffel(spec: &ChartSpec, p: &[f64; 4], h: f64) -> [[[f64; 4]; 4]; 4] {
    let dg: [M4; 4] = std::array::from_fn(|a| {
        let (gp, gm) = (metric(spec, &shifted(p, a, h)), metric(spec, &shifted(p, a, -h)));
        std::array::from_fn(|i| std::array::from_fn(|j| (gp[i][j] - gm[i][j]) / (2.0 * h)))
    });
    let ginv = inverse(&metric(spec, p));
    std::array::from_fn(|k| {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                (0..4)
                    .map(|l| 0.5 * ginv[k][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]))
                    .sum()
            })
        })
    })
}

/// Coordinate components `R_ijkl = g(R(∂_i, ∂_j)∂_l, ∂_k)` with
/// `R(X,Y) = [∇_X, ∇_Y] − ∇_[X,Y]`, differentiating `Γ` by central differences.
pub fn riemann_coordinates(spec: &ChartSpec, p: &[f64; 4], h: f64) -> [[M4; 4]; 4] {
    let gam = christoffel(spec, p, h);
    let dgam: [[[[f64; 4]; 4]; 4]; 4] = std::array::from_fn(|a| {
        let (gp, gm) = (
            christoffel(spec, &shifted(p, a, h), h),
            christoffel(spec, &shifted(p, a, -h), h),
        );
        std::array::from_fn(|k| {
            std::array::from_fn(|i| std::array::from_fn(|j| (gp[k][i][j] - gm[k][i][j]) / (2.0 * h)))
        })
    });
    let g = metric(spec, p);
    // (R(∂_i, ∂_j)∂_l)^m
    let up = |m: usize, l: usize, i: usize, j: usize| -> f64 {
        let mut v = dgam[i][m][j][l] - dgam[j][m][i][l];
        for n in 0..4 {
            v += gam[m][i][n] * gam[n][j][l] - gam[m][j][n] * gam[n][i][l];
        }
        v
    };
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| std::array::from_fn(|l| (0..4).map(|m| g[k][m] * up(m, l, i, j)).sum()))
        })
    })
}

/// Adapted orthonormal frame built from scratch: `e1 ∝ ∂_1`, `e2 = Je1`,
/// `e3` from Gram–Schmidt of the first independent coordinate vector, `e4 = Je3`.
/// Columns are frame vectors.
pub fn frame(spec: &ChartSpec, p: &[f64; 4]) -> M4 {
    let g = metric(spec, p);
    let j = eval_matrix(&spec.j, p);
    let ip = |u: &[f64; 4], v: &[f64; 4]| -> f64 {
        (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .map(|(a, b)| u[a] * g[a][b] * v[b])
            .sum()
    };
    let apply = |v: &[f64; 4]| -> [f64; 4] { std::array::from_fn(|i| (0..4).map(|k| j[i][k] * v[k]).sum()) };
    let unit = |v: [f64; 4]| {
        let n = ip(&v, &v).sqrt();
        v.map(|x| x / n)
    };
    let e1 = unit([1.0, 0.0, 0.0, 0.0]);
    let e2 = apply(&e1);
    let mut e3 = [0.0; 4];
    for k in 1..4 {
        let mut v = [0.0; 4];
        v[k] = 1.0;
        let (c1, c2) = (ip(&v, &e1), ip(&v, &e2));
        let w: [f64; 4] = std::array::from_fn(|i| v[i] - c1 * e1[i] - c2 * e2[i]);
        if ip(&w, &w).sqrt() > 1e-10 * ip(&v, &v).sqrt() {
            e3 = unit(w);
            break;
        }
    }
    let e4 = apply(&e3);
    let cols = [e1, e2, e3, e4];
    std::array::from_fn(|i| std::array::from_fn(|a| cols[a][i]))
}

/// Frame components of `R` from the finite-difference pipeline.
pub fn riemann_frame(spec: &ChartSpec, p: &[f64; 4], h: f64) -> [[M4; 4]; 4] {
    let r = riemann_coordinates(spec, p, h);
    let e = frame(spec, p);
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            std::array::from_fn(|c| {
                std::array::from_fn(|d| {
                    let mut acc = 0.0;
                    for i in 0..4 {
                        for j in 0..4 {
                            for k in 0..4 {
                                for l in 0..4 {
                                    acc += e[i][a] * e[j][b] * e[k][c] * e[l][d] * r[i][j][k][l];
                                }
                            }
                        }
                    }
                    acc
                })
            })
        })
    })
}

/// Scalar curvature from frame components.
pub fn scalar_from_frame(r: &[[M4; 4]; 4]) -> f64 {
    (0..4)
        .flat_map(|a| (0..4).map(move |b| (a, b)))
        .map(|(a, b)| r[a][b][a][b])
        .sum()
}
