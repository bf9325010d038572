use ak4::decomp::decompose;
use ak4::report::{run_sandbox_check, Status, SANDBOX_CHECKS};
use ak4::sandbox::{curvature_with_blocks, project_curvature, random_blocks, random_curvature};

const N: usize = 1000;

#[test]
fn every_sandbox_suite_passes_on_a_thousand_tensors() {
    for name in SANDBOX_CHECKS {
        let s = run_sandbox_check(name, N, 42).unwrap();
        let a = &s.aggregate;
        assert_eq!(s.tensors, N);
        assert_eq!(a.status, Status::Pass, "{name}: {a:?}");
        assert_eq!(a.failed, 0, "{name}");
        assert_eq!(a.passed + a.skipped, N, "{name}");
    }
}

#[test]
fn conditional_suites_exercise_both_sides() {
    for name in [
        "sandbox-lemma5",
        "sandbox-gray-chain",
        "sandbox-lemma6",
        "sandbox-degeneracy",
    ] {
        let s = run_sandbox_check(name, N, 7).unwrap();
        assert!(
            s.vanishing_side > 0 && s.vanishing_side < N,
            "{name}: {}",
            s.vanishing_side
        );
    }
}

#[test]
fn suites_are_reproducible_from_the_seed() {
    for name in SANDBOX_CHECKS {
        let a = serde_json::to_string(&run_sandbox_check(name, 200, 3).unwrap()).unwrap();
        let b = serde_json::to_string(&run_sandbox_check(name, 200, 3).unwrap()).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn unknown_sandbox_names_are_rejected() {
    assert!(run_sandbox_check("sandbox-nosuch", 10, 1).is_none());
}

#[test]
fn random_tensors_have_curvature_symmetries() {
    for seed in 0..200 {
        let r = random_curvature(seed).tensor;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = r.at(&[a, b, c, d]);
                        assert!((v + r.at(&[b, a, c, d])).abs() < 1e-14);
                        assert!((v + r.at(&[a, b, d, c])).abs() < 1e-14);
                        assert!((v - r.at(&[c, d, a, b])).abs() < 1e-14);
                        assert!((v + r.at(&[a, c, d, b]) + r.at(&[a, d, b, c])).abs() < 1e-14);
                    }
                }
            }
        }
        assert!(project_curvature(&r).sub(&r).max_abs() < 1e-14);
    }
}

#[test]
fn prescribed_blocks_are_recovered_by_the_decomposition() {
    for seed in 0..200 {
        let b = random_blocks(seed, [true; 7]);
        let d = decompose(&curvature_with_blocks(&b).unwrap().tensor);
        assert!((d.s - b.s).abs() < 1e-12);
        assert!((d.kappa - b.kappa).abs() < 1e-12);
        assert!((d.psi_coords[0] - b.psi[0]).abs() < 1e-12 && (d.psi_coords[1] - b.psi[1]).abs() < 1e-12);
        for i in 0..4 {
            for j in 0..4 {
                assert!((d.ricci0[i][j] - b.ricci0[i][j]).abs() < 1e-12);
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((d.w_minus[i][j] - b.w_minus[i][j]).abs() < 1e-12);
            }
        }
        assert!(d.reconstruction_residual < 1e-12);
    }
}

#[test]
fn different_seeds_give_different_tensors() {
    let a = random_curvature(0).tensor;
    let b = random_curvature(1).tensor;
    assert!(a.sub(&b).max_abs() > 1e-3);
}
