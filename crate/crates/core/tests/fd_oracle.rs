mod common;

use ak4::chart::{catalog_chart, product_surfaces};
use ak4::riemann::{connection, curvature};
use ak4::structure_at;

const H: f64 = 1e-3;

#[test]
fn jet_curvature_matches_finite_differences_on_every_chart() {
    for spec in common::all_charts() {
        for (n, p) in spec.sample_points(8, 11).into_iter().enumerate() {
            let sp = structure_at(&spec, p, 2).unwrap();
            let curv = curvature(&sp, &connection(&sp).unwrap()).unwrap();
            let fd = common::riemann_frame(&spec, &p, H);
            let scale = curv.riemann.max_abs();
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let jet = curv.riemann.at(&[a, b, c, d]);
                            let diff = (jet - fd[a][b][c][d]).abs();
                            assert!(
                                diff <= 1e-4 * scale + 1e-12,
                                "{} point {n}: R_{a}{b}{c}{d} jet {jet} vs {}",
                                spec.name,
                                fd[a][b][c][d]
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn christoffel_symbols_match_finite_differences() {
    for spec in common::all_charts() {
        for p in spec.sample_points(4, 3) {
            let sp = structure_at(&spec, p, 1).unwrap();
            let g = connection(&sp).unwrap().gamma.values();
            let fd = common::christoffel(&spec, &p, H);
            let scale = g.max_abs().max(1.0);
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        assert!((g.at(&[k, i, j]) - fd[k][i][j]).abs() <= 1e-5 * scale, "{}", spec.name);
                    }
                }
            }
        }
    }
}

#[test]
fn conformal_factor_christoffels_by_hand() {
    // g = e^{2u}(dx1² + dx2²) + dx3² + dx4² with u = x1:
    // Γ^k_ij = δ_ik ∂_j u + δ_jk ∂_i u − δ_ij ∂_k u on the first factor
    let spec = product_surfaces("exp(x1)", "1");
    let du = [1.0, 0.0];
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    for p in [[0.1, 0.2, 0.3, 0.4], [-0.5, 0.0, 0.7, -0.2], [0.9, -0.9, 0.0, 0.0]] {
        let sp = structure_at(&spec, p, 1).unwrap();
        let g = connection(&sp).unwrap().gamma.values();
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    let expected = if i < 2 && j < 2 && k < 2 {
                        delta(i, k) * du[j] + delta(j, k) * du[i] - delta(i, j) * du[k]
                    } else {
                        0.0
                    };
                    assert!((g.at(&[k, i, j]) - expected).abs() < 1e-12, "Γ^{k}_{i}{j} at {p:?}");
                }
            }
        }
    }
}

#[test]
fn unit_sphere_times_plane_has_scalar_curvature_two() {
    let spec = product_surfaces("2/(1 + x1^2 + x2^2)", "1");
    for p in spec.sample_points(16, 5) {
        let sp = structure_at(&spec, p, 2).unwrap();
        let curv = curvature(&sp, &connection(&sp).unwrap()).unwrap();
        assert!((curv.scalar - 2.0).abs() < 1e-8);
        let fd = common::scalar_from_frame(&common::riemann_frame(&spec, &p, H));
        assert!((fd - 2.0).abs() < 1e-4);
    }
}

#[test]
fn complex_hyperbolic_is_negative_einstein_by_both_pipelines() {
    let spec = catalog_chart("complex-hyperbolic").unwrap();
    for p in spec.sample_points(8, 2) {
        let sp = structure_at(&spec, p, 2).unwrap();
        let curv = curvature(&sp, &connection(&sp).unwrap()).unwrap();
        assert!(curv.scalar < 0.0);
        assert!(ak4::algebra::max_abs(&curv.ricci0) < 1e-8);
        let fd = common::riemann_frame(&spec, &p, H);
        let ric: [[f64; 4]; 4] = std::array::from_fn(|b| std::array::from_fn(|d| (0..4).map(|a| fd[a][b][a][d]).sum()));
        let s = common::scalar_from_frame(&fd);
        assert!((s - curv.scalar).abs() < 1e-4 * s.abs());
        for (b, row) in ric.iter().enumerate() {
            for (d, v) in row.iter().enumerate() {
                let expected = if b == d { s / 4.0 } else { 0.0 };
                assert!((v - expected).abs() < 1e-4 * s.abs());
            }
        }
    }
}
