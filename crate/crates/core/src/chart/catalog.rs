use std::collections::BTreeMap;

use super::{metric_key, structure_key, ChartFile, ChartSpec};

pub const CATALOG_NAMES: [&str; 5] = [
    "flat",
    "product-surfaces",
    "fubini-study",
    "complex-hyperbolic",
    "kodaira-thurston",
];

/// Standard structure `J∂1 = ∂2, J∂3 = ∂4`, indexed as `[i][k] = J^i_k`.
const J_STANDARD: [[&str; 4]; 4] = [
    ["0", "-1", "0", "0"],
    ["1", "0", "0", "0"],
    ["0", "0", "0", "-1"],
    ["0", "0", "1", "0"],
];

fn coords() -> Vec<String> {
    (1..=4).map(|i| format!("x{i}")).collect()
}

fn build(name: &str, g: [[&str; 4]; 4], j: [[&str; 4]; 4], half_width: f64, tags: &[&str]) -> ChartSpec {
    let mut gm = BTreeMap::new();
    for i in 0..4 {
        for k in i..4 {
            gm.insert(metric_key(i, k), g[i][k].to_string());
        }
    }
    let mut jm = BTreeMap::new();
    for i in 0..4 {
        for k in 0..4 {
            jm.insert(structure_key(i, k), j[i][k].to_string());
        }
    }
    let file = ChartFile {
        name: name.to_string(),
        coords: coords(),
        domain: vec![[-half_width, half_width]; 4],
        g: gm,
        j: jm,
        tags: tags.iter().map(|t| t.to_string()).collect(),
    };
    ChartSpec::from_file(file).expect("catalog chart is valid")
}

fn owned(g: &[[String; 4]; 4]) -> [[&str; 4]; 4] {
    std::array::from_fn(|i| std::array::from_fn(|k| g[i][k].as_str()))
}

/// `f1(x1,x2)²(dx1² + dx2²) + f2(x3,x4)²(dx3² + dx4²)` with the product structure.
pub fn product_surfaces(f1: &str, f2: &str) -> ChartSpec {
    let a = format!("({f1})^2");
    let b = format!("({f2})^2");
    let z = "0".to_string();
    let g = [
        [a.clone(), z.clone(), z.clone(), z.clone()],
        [z.clone(), a.clone(), z.clone(), z.clone()],
        [z.clone(), z.clone(), b.clone(), z.clone()],
        [z.clone(), z.clone(), z.clone(), b.clone()],
    ];
    build("product-surfaces", owned(&g), J_STANDARD, 1.0, &["kahler", "product"])
}

/// Fubini–Study (`sign = 1`) or complex hyperbolic (`sign = -1`) metric in the
/// affine chart: `g = δ/ρ ∓ (x xᵀ + y yᵀ)/ρ²`, `ρ = 1 ± |x|²`, `y = J x`.
fn projective(name: &str, sign: f64, half_width: f64, tags: &[&str]) -> ChartSpec {
    let rho = if sign > 0.0 {
        "(1 + x1^2 + x2^2 + x3^2 + x4^2)"
    } else {
        "(1 - x1^2 - x2^2 - x3^2 - x4^2)"
    };
    let x = ["x1", "x2", "x3", "x4"];
    let y = ["(-x2)", "x1", "(-x4)", "x3"];
    let op = if sign > 0.0 { "-" } else { "+" };
    let g: [[String; 4]; 4] = std::array::from_fn(|i| {
        std::array::from_fn(|k| {
            let cross = format!("({}*{} + {}*{})/{rho}^2", x[i], x[k], y[i], y[k]);
            if i == k {
                format!("1/{rho} {op} {cross}")
            } else {
                format!("{op}{cross}")
            }
        })
    });
    build(name, owned(&g), J_STANDARD, half_width, tags)
}

fn flat() -> ChartSpec {
    let g = [
        ["1", "0", "0", "0"],
        ["0", "1", "0", "0"],
        ["0", "0", "1", "0"],
        ["0", "0", "0", "1"],
    ];
    build("flat", g, J_STANDARD, 1.0, &["kahler", "flat"])
}

/// Left-invariant structure on a nilmanifold chart: coframe
/// `dx1, dx2, dx3 − x1 dx4, dx4`, with `J` rotating the first two and last
/// two coframe vectors. The fundamental form is `dx1∧dx2 + dx3∧dx4`.
fn kodaira_thurston() -> ChartSpec {
    let g = [
        ["1", "0", "0", "0"],
        ["0", "1", "0", "0"],
        ["0", "0", "1", "-x1"],
        ["0", "0", "-x1", "1 + x1^2"],
    ];
    let j = [
        ["0", "-1", "0", "0"],
        ["1", "0", "0", "0"],
        ["0", "0", "x1", "-(1 + x1^2)"],
        ["0", "0", "1", "-x1"],
    ];
    build("kodaira-thurston", g, j, 1.0, &["almost-kahler", "nilmanifold"])
}

/// All built-in charts, in a fixed order.
pub fn catalog() -> Vec<ChartSpec> {
    CATALOG_NAMES
        .iter()
        .map(|n| catalog_chart(n).expect("listed chart exists"))
        .collect()
}

pub fn catalog_chart(name: &str) -> Option<ChartSpec> {
    Some(match name {
        "flat" => flat(),
        "product-surfaces" => product_surfaces("exp(0.25*sin(x1) + 0.15*x2^2)", "exp(0.2*cos(x4) + 0.1*x3*x4)"),
        "fubini-study" => projective("fubini-study", 1.0, 1.0, &["kahler", "einstein", "self-dual"]),
        "complex-hyperbolic" => projective("complex-hyperbolic", -1.0, 0.4, &["kahler", "einstein", "self-dual"]),
        "kodaira-thurston" => kodaira_thurston(),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_five_named_charts() {
        let all = catalog();
        assert_eq!(all.len(), 5);
        for (spec, name) in all.iter().zip(CATALOG_NAMES) {
            assert_eq!(spec.name, name);
        }
        assert!(catalog_chart("nope").is_none());
    }

    #[test]
    fn fubini_study_is_identity_at_origin() {
        let spec = catalog_chart("fubini-study").unwrap();
        for i in 0..4 {
            for k in 0..4 {
                let v = spec.g[i][k].eval(&[0.0; 4]).unwrap();
                assert_eq!(v, if i == k { 1.0 } else { 0.0 });
            }
        }
    }
}
