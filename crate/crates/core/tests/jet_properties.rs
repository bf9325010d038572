use ak4::jet::multi_index_at;
use ak4::{parse_expr, Jet};
use proptest::prelude::*;

const NCOEFFS4: usize = 70;

fn jet4() -> impl Strategy<Value = Jet> {
    prop::collection::vec(-2.0f64..2.0, NCOEFFS4).prop_map(|c| Jet::from_coeffs(4, &c).unwrap())
}

fn close(a: &Jet, b: &Jet, rel: f64) -> bool {
    let scale = 1.0f64.max(a.max_abs()).max(b.max_abs());
    a.coeffs()
        .iter()
        .zip(b.coeffs())
        .all(|(x, y)| (x - y).abs() <= rel * scale)
}

/// Expression text that is defined everywhere: restricted functions get
/// arguments squashed into their domain.
fn safe_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0usize..4).prop_map(|i| format!("x{}", i + 1)),
        (-3.0f64..3.0).prop_map(|v| format!("{v:.3}")),
    ];
    leaf.prop_recursive(6, 48, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} / (1 + ({b})^2))")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("exp(tanh({a}))")),
            inner.clone().prop_map(|a| format!("log(1 + ({a})^2)")),
            inner.clone().prop_map(|a| format!("sqrt(2 + sin({a}))")),
            inner.clone().prop_map(|a| format!("tan(atan({a}) / 2)")),
            inner.clone().prop_map(|a| format!("sinh(tanh({a}))")),
            inner.clone().prop_map(|a| format!("cosh(cos({a}))")),
            inner.clone().prop_map(|a| format!("(1.5 + cos({a}))^1.5")),
            inner.prop_map(|a| format!("(-{a})^3")),
        ]
    })
}

fn point() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0f64..1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_axioms(a in jet4(), b in jet4(), c in jet4()) {
        prop_assert!(close(&((a * b) * c), &(a * (b * c)), 1e-12));
        prop_assert!(close(&(a * (b + c)), &(a * b + a * c), 1e-12));
        prop_assert!(close(&(a * b), &(b * a), 1e-12));
        prop_assert!(close(&(a + (b + c)), &((a + b) + c), 1e-12));
        prop_assert!(close(&(a - a), &Jet::zero(4), 1e-12));
        prop_assert!(close(&(a * Jet::constant(1.0, 4)), &a, 0.0));
    }

    #[test]
    fn reciprocal_inverts(a in jet4()) {
        let shifted = a + (3.0 - a.value());
        let r = shifted.recip().unwrap();
        prop_assert!(close(&(shifted * r), &Jet::constant(1.0, 4), 1e-12));
    }

    #[test]
    fn truncation_commutes_with_evaluation(text in safe_expr(), p in point(), k in 1usize..=4) {
        let e = parse_expr(&text).unwrap();
        let high = e.eval_jet(&p, k).unwrap().truncate(k - 1);
        let low = e.eval_jet(&p, k - 1).unwrap();
        prop_assert_eq!(high.coeffs(), low.coeffs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Order-2 coefficients against central second differences with step 1e-4.
    #[test]
    fn second_derivatives_match_finite_differences(text in safe_expr(), p in point()) {
        let e = parse_expr(&text).unwrap();
        let jet = e.eval_jet(&p, 2).unwrap();
        let f = |q: [f64; 4]| e.eval(&q).unwrap();
        prop_assert!((jet.value() - f(p)).abs() <= 1e-12 * 1.0f64.max(jet.value().abs()));
        let h = 1e-4;
        let shift = |mut q: [f64; 4], i: usize, d: f64| { q[i] += d; q };
        let scale = 1.0f64.max(jet.max_abs());
        for pos in 0..jet.coeffs().len() {
            let alpha = multi_index_at(pos);
            if alpha.iter().sum::<u8>() != 2 {
                continue;
            }
            let idx: Vec<usize> = (0..4).flat_map(|i| (0..alpha[i]).map(move |_| i)).collect();
            let (i, j) = (idx[0], idx[1]);
            let fd = if i == j {
                (f(shift(p, i, h)) - 2.0 * f(p) + f(shift(p, i, -h))) / (h * h)
            } else {
                (f(shift(shift(p, i, h), j, h)) - f(shift(shift(p, i, h), j, -h))
                    - f(shift(shift(p, i, -h), j, h)) + f(shift(shift(p, i, -h), j, -h)))
                    / (4.0 * h * h)
            };
            let ad = jet.derivative_value(alpha);
            prop_assert!(
                (ad - fd).abs() <= 1e-5 * scale.max(ad.abs()),
                "{text} at {p:?}, d{i}d{j}: jet {ad}, difference {fd}"
            );
        }
    }
}
