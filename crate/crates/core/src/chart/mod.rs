//! Coordinate charts carrying a metric and an almost complex structure.

mod catalog;
mod structure;

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ChartError;
use crate::expr::{parse_expr, Expr};

pub use catalog::{catalog, catalog_chart, product_surfaces, CATALOG_NAMES};
pub use structure::{adapted_frame, structure_at, FormBasis, Frame, StructurePoint, StructureResiduals};

/// On-disk layout of a chart file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartFile {
    pub name: String,
    pub coords: Vec<String>,
    pub domain: Vec<[f64; 2]>,
    pub g: BTreeMap<String, String>,
    #[serde(rename = "J")]
    pub j: BTreeMap<String, String>,
    #[serde(default)]
    pub tags: Vec<String>,
}

/// A validated chart: parsed metric and structure components plus a domain box.
#[derive(Clone, Debug)]
pub struct ChartSpec {
    pub name: String,
    pub coords: [String; 4],
    pub domain: [[f64; 2]; 4],
    pub tags: Vec<String>,
    /// `g[i][j]`, filled symmetrically from the upper triangle.
    pub g: [[Expr; 4]; 4],
    /// `j[i][k] = J^i_k`, the `i`-th component of `J ∂_k`.
    pub j: [[Expr; 4]; 4],
    source: ChartFile,
}

pub fn metric_key(i: usize, j: usize) -> String {
    format!("{}{}", i + 1, j + 1)
}

pub fn structure_key(i: usize, k: usize) -> String {
    format!("{}_{}", i + 1, k + 1)
}

fn parse_component(map: &BTreeMap<String, String>, key: &str) -> Result<Expr, ChartError> {
    let text = map
        .get(key)
        .ok_or_else(|| ChartError::MissingComponent(key.to_string()))?;
    parse_expr(text).map_err(|source| ChartError::Expression {
        key: key.to_string(),
        source,
    })
}

impl ChartSpec {
    pub fn from_file(file: ChartFile) -> Result<Self, ChartError> {
        if file.coords.len() != 4 {
            return Err(ChartError::BadDomain(format!(
                "expected 4 coordinate names, got {}",
                file.coords.len()
            )));
        }
        if file.domain.len() != 4 {
            return Err(ChartError::BadDomain(format!(
                "expected 4 intervals, got {}",
                file.domain.len()
            )));
        }
        for (i, [lo, hi]) in file.domain.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ChartError::BadDomain(format!("interval {} is [{lo}, {hi}]", i + 1)));
            }
        }
        let g_keys: Vec<String> = (0..4).flat_map(|i| (i..4).map(move |j| metric_key(i, j))).collect();
        let j_keys: Vec<String> = (0..4).flat_map(|i| (0..4).map(move |k| structure_key(i, k))).collect();
        for key in file.g.keys() {
            if !g_keys.contains(key) {
                return Err(ChartError::UnexpectedComponent(format!("g {key}")));
            }
        }
        for key in file.j.keys() {
            if !j_keys.contains(key) {
                return Err(ChartError::UnexpectedComponent(format!("J {key}")));
            }
        }
        let mut g: [[Expr; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| Expr::Num(0.0)));
        for i in 0..4 {
            for j in i..4 {
                let e = parse_component(&file.g, &metric_key(i, j))?;
                g[j][i] = e.clone();
                g[i][j] = e;
            }
        }
        let mut jm: [[Expr; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| Expr::Num(0.0)));
        for (i, row) in jm.iter_mut().enumerate() {
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = parse_component(&file.j, &structure_key(i, k))?;
            }
        }
        let coords = std::array::from_fn(|i| file.coords[i].clone());
        let domain = std::array::from_fn(|i| file.domain[i]);
        Ok(ChartSpec {
            name: file.name.clone(),
            coords,
            domain,
            tags: file.tags.clone(),
            g,
            j: jm,
            source: file,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ChartError> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn file(&self) -> &ChartFile {
        &self.source
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.source).expect("chart file serializes")
    }

    pub fn contains(&self, p: &[f64; 4]) -> bool {
        p.iter().zip(&self.domain).all(|(x, [lo, hi])| *lo <= *x && *x <= *hi)
    }

    /// Seeded uniform sample of the domain box.
    pub fn sample_points(&self, n: usize, seed: u64) -> Vec<[f64; 4]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                std::array::from_fn(|i| {
                    let [lo, hi] = self.domain[i];
                    lo + (hi - lo) * rng.gen::<f64>()
                })
            })
            .collect()
    }
}

/// Reads and validates a chart file.
pub fn load_chart(path: &Path) -> Result<ChartSpec, ChartError> {
    let text = std::fs::read_to_string(path).map_err(|source| ChartError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ChartSpec::from_json(&text)
}

/// A catalog name or, failing that, a path to a chart file.
pub fn resolve_chart(name_or_path: &str) -> Result<ChartSpec, ChartError> {
    if let Some(spec) = catalog_chart(name_or_path) {
        return Ok(spec);
    }
    let path = Path::new(name_or_path);
    if path.exists() || name_or_path.ends_with(".json") {
        return load_chart(path);
    }
    Err(ChartError::UnknownChart(name_or_path.to_string()))
}
