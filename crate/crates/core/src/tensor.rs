//! Covariant tensors with all indices down, either as jet-valued coordinate
//! fields ([`Field`]) or as plain numbers at a point ([`Tensor`]).
//!
//! Components are stored row-major; for derivatives the new index goes first,
//! so `(∇T)[m][i..]` is `(∇_m T)(∂_i, ..)`.

use crate::error::GeometryError;
use crate::jet::Jet;

pub type Mat4 = [[f64; 4]; 4];

fn decode(mut n: usize, rank: usize, idx: &mut [usize]) {
    for slot in (0..rank).rev() {
        idx[slot] = n % 4;
        n /= 4;
    }
}

fn encode(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 4 + i)
}

/// Numeric tensor of rank `r` in dimension four.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Tensor {
    rank: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rank: usize) -> Self {
        Tensor {
            rank,
            data: vec![0.0; 4usize.pow(rank as u32)],
        }
    }

    pub fn from_fn(rank: usize, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut idx = vec![0; rank];
        let data = (0..4usize.pow(rank as u32))
            .map(|n| {
                decode(n, rank, &mut idx);
                f(&idx)
            })
            .collect();
        Tensor { rank, data }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn at(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank);
        self.data[encode(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        self.data[encode(idx)] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_diff(&self, other: &Tensor) -> f64 {
        assert_eq!(self.rank, other.rank);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scale(&self, c: f64) -> Tensor {
        Tensor {
            rank: self.rank,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.rank, other.rank);
        Tensor {
            rank: self.rank,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Tensor) -> Tensor {
        self.add(&other.scale(-1.0))
    }

    /// Components in another basis: `T'_{a..} = Σ T_{i..} e[i][a] ..`, where
    /// column `a` of `e` holds the coordinates of the new basis vector.
    pub fn change_basis(&self, e: &Mat4) -> Tensor {
        let mut cur = self.clone();
        let mut idx = vec![0; self.rank];
        for slot in 0..self.rank {
            let mut next = Tensor::zeros(self.rank);
            for n in 0..cur.data.len() {
                decode(n, self.rank, &mut idx);
                let a = idx[slot];
                let mut acc = 0.0;
                for (i, row) in e.iter().enumerate() {
                    idx[slot] = i;
                    acc += cur.data[encode(&idx)] * row[a];
                }
                next.data[n] = acc;
            }
            cur = next;
        }
        cur
    }

    /// Rank-2 view as a matrix.
    pub fn to_mat(&self) -> Mat4 {
        assert_eq!(self.rank, 2);
        std::array::from_fn(|i| std::array::from_fn(|j| self.data[4 * i + j]))
    }

    pub fn from_mat(m: &Mat4) -> Tensor {
        Tensor::from_fn(2, |ix| m[ix[0]][ix[1]])
    }

    pub fn from_vec(v: &[f64; 4]) -> Tensor {
        Tensor::from_fn(1, |ix| v[ix[0]])
    }

    pub fn to_vec(&self) -> [f64; 4] {
        assert_eq!(self.rank, 1);
        std::array::from_fn(|i| self.data[i])
    }
}

/// Jet-valued covariant tensor field in coordinate components.
#[derive(Clone, Debug)]
pub struct Field {
    rank: usize,
    order: usize,
    data: Vec<Jet>,
}

impl Field {
    pub fn from_fn(rank: usize, mut f: impl FnMut(&[usize]) -> Jet) -> Self {
        let mut idx = vec![0; rank];
        let data: Vec<Jet> = (0..4usize.pow(rank as u32))
            .map(|n| {
                decode(n, rank, &mut idx);
                f(&idx)
            })
            .collect();
        let order = data.iter().map(Jet::order).min().unwrap_or(0);
        let data = data.into_iter().map(|j| j.truncate(order)).collect();
        Field { rank, order, data }
    }

    pub fn scalar(j: Jet) -> Self {
        Field {
            rank: 0,
            order: j.order(),
            data: vec![j],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn at(&self, idx: &[usize]) -> Jet {
        self.data[encode(idx)]
    }

    pub fn as_scalar(&self) -> Jet {
        assert_eq!(self.rank, 0);
        self.data[0]
    }

    /// Base-point values.
    pub fn values(&self) -> Tensor {
        Tensor {
            rank: self.rank,
            data: self.data.iter().map(Jet::value).collect(),
        }
    }

    /// Base-point values in the basis given by the columns of `e`.
    pub fn frame(&self, e: &Mat4) -> Tensor {
        self.values().change_basis(e)
    }

    fn require(&self, what: &'static str, needed: usize) -> Result<(), GeometryError> {
        if self.order < needed {
            return Err(GeometryError::InsufficientOrder {
                what,
                needed,
                available: self.order,
            });
        }
        Ok(())
    }

    /// Coordinate partial derivatives, derivative index first.
    pub fn partial(&self) -> Result<Field, GeometryError> {
        self.require("partial derivative", 1)?;
        let n = self.data.len();
        let mut data = Vec::with_capacity(4 * n);
        for m in 0..4 {
            for j in &self.data {
                data.push(j.partial(m)?);
            }
        }
        Ok(Field {
            rank: self.rank + 1,
            order: self.order - 1,
            data,
        })
    }

    /// Levi-Civita covariant derivative; `gamma[k][i][j]` is `Γ^k_ij`.
    pub fn covariant(&self, gamma: &Field) -> Result<Field, GeometryError> {
        self.require("covariant derivative", 1)?;
        let d = self.partial()?;
        let r = self.rank;
        let mut idx = vec![0; r + 1];
        let mut sub = vec![0; r];
        let mut data = d.data;
        for (n, slot) in data.iter_mut().enumerate() {
            decode(n, r + 1, &mut idx);
            let m = idx[0];
            for s in 0..r {
                sub.copy_from_slice(&idx[1..]);
                for k in 0..4 {
                    sub[s] = k;
                    let g = gamma.data[16 * k + 4 * m + idx[1 + s]];
                    *slot -= g * self.data[encode(&sub)];
                }
            }
        }
        let order = data.iter().map(Jet::order).min().unwrap_or(0);
        Ok(Field {
            rank: r + 1,
            order,
            data,
        })
    }

    /// Exterior derivative of a form stored as a fully antisymmetric field:
    /// `(dω)_{i0..ip} = Σ_s (-1)^s ∂_{is} ω_{i0..îs..ip}`.
    pub fn exterior(&self) -> Result<Field, GeometryError> {
        let d = self.partial()?;
        let r = self.rank;
        Ok(Field::from_fn(r + 1, |idx| {
            let mut acc = Jet::zero(d.order);
            let mut sub = vec![0; r + 1];
            for s in 0..=r {
                sub[0] = idx[s];
                let mut t = 1;
                for (q, &i) in idx.iter().enumerate() {
                    if q != s {
                        sub[t] = i;
                        t += 1;
                    }
                }
                let term = d.at(&sub);
                if s % 2 == 0 {
                    acc += term;
                } else {
                    acc -= term;
                }
            }
            acc
        }))
    }

    /// Contracts slots `a < b` with the inverse metric.
    pub fn trace(&self, ginv: &[[Jet; 4]; 4], a: usize, b: usize) -> Field {
        assert!(a < b && b < self.rank);
        let r = self.rank;
        Field::from_fn(r - 2, |idx| {
            let mut full = vec![0; r];
            let mut acc = Jet::zero(self.order);
            for (p, row) in ginv.iter().enumerate() {
                for (q, gpq) in row.iter().enumerate() {
                    let mut t = 0;
                    for (s, slot) in full.iter_mut().enumerate() {
                        *slot = if s == a {
                            p
                        } else if s == b {
                            q
                        } else {
                            t += 1;
                            idx[t - 1]
                        };
                    }
                    acc += *gpq * self.at(&full);
                }
            }
            acc
        })
    }

    pub fn add(&self, other: &Field) -> Field {
        assert_eq!(self.rank, other.rank);
        Field::from_fn(self.rank, |idx| self.at(idx) + other.at(idx))
    }

    pub fn sub(&self, other: &Field) -> Field {
        assert_eq!(self.rank, other.rank);
        Field::from_fn(self.rank, |idx| self.at(idx) - other.at(idx))
    }

    pub fn scale(&self, c: &Jet) -> Field {
        Field::from_fn(self.rank, |idx| self.at(idx) * *c)
    }
}

/// Wedge of two 1-form fields, `(α∧β)_ij = α_i β_j − α_j β_i`.
pub fn wedge_field(a: &Field, b: &Field) -> Field {
    Field::from_fn(2, |ix| {
        a.at(&ix[..1]) * b.at(&ix[1..]) - a.at(&ix[1..]) * b.at(&ix[..1])
    })
}

/// Inverse of a jet matrix by Gauss–Jordan elimination, pivoting on values.
pub fn invert(m: &[[Jet; 4]; 4]) -> Result<[[Jet; 4]; 4], GeometryError> {
    let order = m.iter().flatten().map(Jet::order).min().unwrap_or(0);
    let mut a = *m;
    let mut inv: [[Jet; 4]; 4] =
        std::array::from_fn(|i| std::array::from_fn(|j| Jet::constant(if i == j { 1.0 } else { 0.0 }, order)));
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&x, &y| a[x][col].value().abs().total_cmp(&a[y][col].value().abs()))
            .expect("non-empty range");
        if a[pivot][col].value().abs() < 1e-14 {
            return Err(GeometryError::StructureViolation {
                invariant: "metric invertible",
                residual: a[pivot][col].value().abs(),
            });
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let r = a[col][col].recip()?;
        for k in 0..4 {
            a[col][k] = a[col][k] * r;
            inv[col][k] = inv[col][k] * r;
        }
        for row in 0..4 {
            if row != col {
                let f = a[row][col];
                for k in 0..4 {
                    let (ack, ick) = (a[col][k], inv[col][k]);
                    a[row][k] -= f * ack;
                    inv[row][k] -= f * ick;
                }
            }
        }
    }
    Ok(inv)
}
