//! Truncated multivariate Taylor polynomials in four variables.
//!
//! A [`Jet`] of order `n` stores the Taylor coefficients `∂^α f / α!` of a
//! scalar function at a base point for every multi-index `|α| ≤ n`. The raw
//! partial derivative is recovered as `coeff(α) · α!` (see
//! [`Jet::derivative_value`]). Arithmetic is exact truncated-polynomial
//! arithmetic: products are coefficient convolutions cut at the order.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use crate::error::JetError;

/// Highest supported jet order.
pub const MAX_ORDER: usize = 4;
/// Number of coefficients of an order-4 jet in four variables.
pub const MAX_COEFFS: usize = 70;
/// Number of independent variables.
pub const NVARS: usize = 4;

/// Number of coefficients of a jet of the given order.
pub const fn coeff_count(order: usize) -> usize {
    match order {
        0 => 1,
        1 => 5,
        2 => 15,
        3 => 35,
        _ => 70,
    }
}

struct Tables {
    /// Multi-indices ordered by total degree, then lexicographically.
    monomials: Vec<[u8; NVARS]>,
    degree: Vec<u8>,
    /// `raise[k][v]`: index of `monomials[k] + e_v`, if it still fits.
    raise: Vec<[Option<u8>; NVARS]>,
    /// Convolution triples `(i, j, k)` with `α_i + α_j = α_k`, sorted by the
    /// degree of `k` so that an order-`n` product uses a prefix.
    products: Vec<(u8, u8, u8)>,
    product_prefix: [usize; MAX_ORDER + 1],
    factorial: Vec<f64>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let mut monomials = Vec::with_capacity(MAX_COEFFS);
        for deg in 0..=MAX_ORDER as u8 {
            for a in (0..=deg).rev() {
                for b in (0..=deg - a).rev() {
                    for c in (0..=deg - a - b).rev() {
                        monomials.push([a, b, c, deg - a - b - c]);
                    }
                }
            }
        }
        debug_assert_eq!(monomials.len(), MAX_COEFFS);
        let find = |m: [u8; NVARS]| monomials.iter().position(|x| *x == m).map(|i| i as u8);
        let degree: Vec<u8> = monomials.iter().map(|m| m.iter().sum()).collect();
        let raise = monomials
            .iter()
            .map(|m| {
                let mut r = [None; NVARS];
                for (v, slot) in r.iter_mut().enumerate() {
                    let mut up = *m;
                    up[v] += 1;
                    *slot = find(up);
                }
                r
            })
            .collect();
        let mut products = Vec::new();
        for (i, mi) in monomials.iter().enumerate() {
            for (j, mj) in monomials.iter().enumerate() {
                let sum = [mi[0] + mj[0], mi[1] + mj[1], mi[2] + mj[2], mi[3] + mj[3]];
                if let Some(k) = find(sum) {
                    products.push((i as u8, j as u8, k));
                }
            }
        }
        products.sort_by_key(|&(_, _, k)| degree[k as usize]);
        let mut product_prefix = [0; MAX_ORDER + 1];
        for (n, prefix) in product_prefix.iter_mut().enumerate() {
            *prefix = products
                .iter()
                .take_while(|&&(_, _, k)| degree[k as usize] as usize <= n)
                .count();
        }
        let factorial = monomials
            .iter()
            .map(|m| m.iter().map(|&a| (1..=a as u32).product::<u32>() as f64).product())
            .collect();
        Tables {
            monomials,
            degree,
            raise,
            products,
            product_prefix,
            factorial,
        }
    })
}

/// Index of a multi-index in the coefficient array, if `|α| ≤ 4`.
pub fn multi_index_position(alpha: [u8; NVARS]) -> Option<usize> {
    tables().monomials.iter().position(|m| *m == alpha)
}

/// Multi-index stored at a coefficient position.
pub fn multi_index_at(pos: usize) -> [u8; NVARS] {
    tables().monomials[pos]
}

/// Truncated Taylor expansion of a scalar function of four variables.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet {
    order: u8,
    coeffs: [f64; MAX_COEFFS],
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("order", &self.order)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl Jet {
    /// Constant jet.
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = [0.0; MAX_COEFFS];
        coeffs[0] = value;
        Jet {
            order: order.min(MAX_ORDER) as u8,
            coeffs,
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(0.0, order)
    }

    /// The coordinate function `x_var` expanded at a point where it equals `value`.
    pub fn variable(var: usize, value: f64, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// Builds a jet from its Taylor coefficients in storage order.
    pub fn from_coeffs(order: usize, coeffs: &[f64]) -> Result<Self, JetError> {
        if order > MAX_ORDER {
            return Err(JetError::OrderOutOfRange(order));
        }
        if coeffs.len() != coeff_count(order) {
            return Err(JetError::CoefficientCount {
                expected: coeff_count(order),
                got: coeffs.len(),
            });
        }
        let mut j = Self::zero(order);
        j.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(j)
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..coeff_count(self.order())]
    }

    /// Value at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient `∂^α f / α!`; zero beyond the order.
    pub fn coeff(&self, alpha: [u8; NVARS]) -> f64 {
        match multi_index_position(alpha) {
            Some(k) if (tables().degree[k] as usize) <= self.order() => self.coeffs[k],
            _ => 0.0,
        }
    }

    /// Raw partial derivative `∂^α f` at the base point (coefficient times `α!`).
    pub fn derivative_value(&self, alpha: [u8; NVARS]) -> f64 {
        match multi_index_position(alpha) {
            Some(k) => self.coeff(alpha) * tables().factorial[k],
            None => 0.0,
        }
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        let mut j = Self::zero(order);
        let n = coeff_count(order);
        j.coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        j
    }

    /// Partial derivative along variable `var`; the result has one order less.
    pub fn partial(&self, var: usize) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::InsufficientOrder {
                needed: 1,
                available: 0,
            });
        }
        let t = tables();
        let order = self.order() - 1;
        let mut out = Self::zero(order);
        for k in 0..coeff_count(order) {
            let up = t.raise[k][var].expect("raised index within order 4") as usize;
            out.coeffs[k] = (t.monomials[k][var] as f64 + 1.0) * self.coeffs[up];
        }
        Ok(out)
    }

    /// Gradient at the base point.
    pub fn gradient(&self) -> [f64; NVARS] {
        std::array::from_fn(|v| if self.order >= 1 { self.coeffs[1 + v] } else { 0.0 })
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = *self;
        for x in out.coeffs[..coeff_count(self.order())].iter_mut() {
            *x *= c;
        }
        out
    }

    /// `1 / self`; fails when the constant term vanishes.
    pub fn recip(&self) -> Result<Self, JetError> {
        let u0 = self.value();
        if u0 == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        let mut c = [0.0; MAX_ORDER + 1];
        let inv = 1.0 / u0;
        let mut p = inv;
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = if k % 2 == 0 { p } else { -p };
            p *= inv;
        }
        Ok(self.compose(&c))
    }

    /// Truncated quotient; fails when `rhs` has zero constant term.
    pub fn try_div(&self, rhs: &Jet) -> Result<Self, JetError> {
        Ok(*self * rhs.recip()?)
    }

    /// Applies a univariate function given by its Taylor coefficients at the
    /// base value: `Σ_k c_k (self − self(0))^k`.
    pub fn compose(&self, series: &[f64; MAX_ORDER + 1]) -> Self {
        let order = self.order();
        let mut shifted = *self;
        shifted.coeffs[0] = 0.0;
        let mut acc = Self::constant(series[0], order);
        let mut power = shifted;
        for ck in series.iter().take(order + 1).skip(1) {
            acc += power.scale(*ck);
            power = power * shifted;
        }
        acc
    }

    /// Integer power by repeated multiplication; negative exponents go through [`Jet::recip`].
    pub fn powi(&self, n: i32) -> Result<Self, JetError> {
        let mut base = if n < 0 { self.recip()? } else { *self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::constant(1.0, self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Square root; fails unless the constant term is positive.
    pub fn sqrt(&self) -> Result<Self, JetError> {
        if self.value() <= 0.0 {
            return Err(JetError::DivisionByZero);
        }
        Ok(self.compose(&binomial_series(self.value(), 0.5)))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

fn combine(a: &Jet, b: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
    let order = a.order.min(b.order);
    let mut out = Jet::zero(order as usize);
    for k in 0..coeff_count(order as usize) {
        out.coeffs[k] = f(a.coeffs[k], b.coeffs[k]);
    }
    out
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        combine(&self, &rhs, |x, y| x + y)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        combine(&self, &rhs, |x, y| x - y)
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let t = tables();
        let order = self.order.min(rhs.order) as usize;
        let mut out = Jet::zero(order);
        for &(i, j, k) in &t.products[..t.product_prefix[order]] {
            out.coeffs[k as usize] += self.coeffs[i as usize] * rhs.coeffs[j as usize];
        }
        out
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

/// Taylor coefficients of `u^p` at `u0 > 0`.
pub(crate) fn binomial_series(u0: f64, p: f64) -> [f64; MAX_ORDER + 1] {
    let mut out = [0.0; MAX_ORDER + 1];
    let mut binom = 1.0;
    let base = u0.powf(p);
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = base * binom / u0.powi(k as i32);
        binom *= (p - k as f64) / (k as f64 + 1.0);
    }
    out
}

/// Univariate Taylor series of length five, used to build the coefficient
/// lists fed to [`Jet::compose`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Series(pub [f64; MAX_ORDER + 1]);

impl Series {
    pub fn div(&self, rhs: &Series) -> Series {
        let mut q = [0.0; MAX_ORDER + 1];
        for k in 0..=MAX_ORDER {
            let mut acc = self.0[k];
            for j in 1..=k {
                acc -= rhs.0[j] * q[k - j];
            }
            q[k] = acc / rhs.0[0];
        }
        Series(q)
    }

    /// Antiderivative with constant term `c0`; the top coefficient is dropped.
    pub fn integrate(&self, c0: f64) -> Series {
        let mut out = [0.0; MAX_ORDER + 1];
        out[0] = c0;
        for k in 1..=MAX_ORDER {
            out[k] = self.0[k - 1] / k as f64;
        }
        Series(out)
    }
}
