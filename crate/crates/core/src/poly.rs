//! Sparse real polynomials in the ambient coordinates `x_0, …, x_{k-1}`.
//!
//! Every field the library builds (constant spinors, Killing fields `x ↦ Fx`,
//! projections `I - x xᵀ`, products of those) is polynomial, so derivatives are
//! taken by manipulating coefficients. Monomials are packed into a `u128`
//! with eight bits per exponent, which bounds the number of variables by
//! [`MAX_VARS`] and every single exponent by 255.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Largest supported number of ambient coordinates (`ℝ^16 ⊃ S^15`).
pub const MAX_VARS: usize = 16;

const BITS: u32 = 8;
const MASK: u128 = 0xff;

/// Exponent vector packed into a single integer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn var(i: usize) -> Self {
        assert!(i < MAX_VARS, "variable index {i} out of range");
        Monomial(1u128 << (BITS as usize * i))
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(exps.len() <= MAX_VARS);
        let mut m = 0u128;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= MASK as u32, "exponent {e} overflows monomial packing");
            m |= (e as u128) << (BITS as usize * i);
        }
        Monomial(m)
    }

    #[inline]
    pub fn exponent(self, i: usize) -> u32 {
        ((self.0 >> (BITS as usize * i)) & MASK) as u32
    }

    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exponent(i)).sum()
    }

    #[inline]
    fn times(self, other: Monomial) -> Monomial {
        // exponents stay below 256 for every field this crate builds
        Monomial(self.0 + other.0)
    }

    #[inline]
    fn lower(self, i: usize) -> Option<(u32, Monomial)> {
        let e = self.exponent(i);
        (e > 0).then(|| (e, Monomial(self.0 - (1u128 << (BITS as usize * i)))))
    }
}

/// A polynomial with `f64` coefficients; terms are sorted and never zero.
#[derive(Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: Vec<(Monomial, f64)>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for i in 0..self.nvars {
                match m.exponent(i) {
                    0 => {}
                    1 => write!(f, "·x{i}")?,
                    e => write!(f, "·x{i}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables supported");
        Poly { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Poly::zero(nvars);
        if c != 0.0 {
            p.terms.push((Monomial::ONE, c));
        }
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        Poly { nvars, terms: vec![(Monomial::var(i), 1.0)] }
    }

    /// Linear form `Σ c_i x_i`.
    pub fn linear(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        Poly::from_terms(n, coeffs.iter().enumerate().map(|(i, &c)| (Monomial::var(i), c)))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, f64)>) -> Self {
        let mut acc: BTreeMap<Monomial, f64> = BTreeMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert(0.0) += c;
        }
        Poly {
            nvars,
            terms: acc.into_iter().filter(|&(_, c)| c != 0.0).collect(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: f64) -> Poly {
        if s == 0.0 {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|&(m, c)| (m, c * s)).collect(),
        }
    }

    /// `self + s·other` by sorted merge.
    pub fn axpy(&self, s: f64, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                let c = s * b[j].1;
                if c != 0.0 {
                    out.push((b[j].0, c));
                }
                j += 1;
            } else {
                let c = a[i].1 + s * b[j].1;
                if c != 0.0 {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Poly { nvars: self.nvars, terms: out }
    }

    pub fn mul_poly(&self, other: &Poly) -> Poly {
        debug_assert_eq!(self.nvars, other.nvars);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut prods: Vec<(Monomial, f64)> = Vec::with_capacity(self.terms.len() * other.terms.len());
        for &(ma, ca) in &self.terms {
            for &(mb, cb) in &other.terms {
                prods.push((ma.times(mb), ca * cb));
            }
        }
        prods.sort_unstable_by_key(|t| t.0);
        let mut terms: Vec<(Monomial, f64)> = Vec::with_capacity(prods.len());
        for (m, c) in prods {
            match terms.last_mut() {
                Some(last) if last.0 == m => last.1 += c,
                _ => terms.push((m, c)),
            }
        }
        terms.retain(|&(_, c)| c != 0.0);
        Poly { nvars: self.nvars, terms }
    }

    /// Exact partial derivative `∂/∂x_i`.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.nvars);
        // lowering one exponent keeps the sort order among surviving terms
        let terms = self
            .terms
            .iter()
            .filter_map(|&(m, c)| m.lower(i).map(|(e, low)| (low, c * e as f64)))
            .collect();
        Poly { nvars: self.nvars, terms }
    }

    /// Derivative along a polynomial vector field: `Σ_a v_a ∂_a p`.
    pub fn derivative_along(&self, v: &[Poly]) -> Poly {
        assert_eq!(v.len(), self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (a, va) in v.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            let d = self.partial(a);
            if !d.is_zero() {
                out = out.axpy(1.0, &va.mul_poly(&d));
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let pw = Powers::new(x, self.degree());
        self.eval_with(&pw)
    }

    pub fn eval_with(&self, pw: &Powers) -> f64 {
        self.terms.iter().map(|&(m, c)| c * pw.monomial(m)).sum()
    }

    /// Value and gradient at `x`, written into `grad` (length `nvars`).
    pub fn eval_grad_with(&self, pw: &Powers, grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut value = 0.0;
        for &(m, c) in &self.terms {
            value += c * pw.monomial(m);
            for i in 0..self.nvars {
                if let Some((e, low)) = m.lower(i) {
                    grad[i] += c * e as f64 * pw.monomial(low);
                }
            }
        }
        value
    }

    /// Substitute `x_last^2 = 1 - Σ_{i<last} x_i^2` until every term is at most
    /// linear in the last coordinate. The result agrees with `self` on the
    /// unit sphere, so all tangential derivatives are unchanged.
    pub fn reduce_on_sphere(&self) -> Poly {
        let last = self.nvars - 1;
        let mut pending: BTreeMap<Monomial, f64> = self.terms.iter().copied().collect();
        let mut done: BTreeMap<Monomial, f64> = BTreeMap::new();
        while let Some((m, c)) = pending.pop_last() {
            if c == 0.0 {
                continue;
            }
            let e = m.exponent(last);
            if e < 2 {
                *done.entry(m).or_insert(0.0) += c;
                continue;
            }
            let base = Monomial(m.0 - (2u128 << (BITS as usize * last)));
            *pending.entry(base).or_insert(0.0) += c;
            for i in 0..last {
                let mi = Monomial(base.0 + (2u128 << (BITS as usize * i)));
                *pending.entry(mi).or_insert(0.0) -= c;
            }
        }
        Poly::from_terms(self.nvars, done)
    }
}

/// Table of coordinate powers shared by many polynomial evaluations at one point.
pub struct Powers {
    nvars: usize,
    stride: usize,
    table: Vec<f64>,
}

impl Powers {
    pub fn new(x: &[f64], max_degree: u32) -> Self {
        let stride = max_degree as usize + 1;
        let mut table = vec![1.0; x.len() * stride];
        for (i, &xi) in x.iter().enumerate() {
            for e in 1..stride {
                table[i * stride + e] = table[i * stride + e - 1] * xi;
            }
        }
        Powers { nvars: x.len(), stride, table }
    }

    #[inline]
    pub fn monomial(&self, m: Monomial) -> f64 {
        let mut v = 1.0;
        for i in 0..self.nvars {
            let e = m.exponent(i) as usize;
            if e > 0 {
                v *= self.table[i * self.stride + e];
            }
        }
        v
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.axpy(-1.0, rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_poly(rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        *self = self.axpy(1.0, rhs);
    }
}
