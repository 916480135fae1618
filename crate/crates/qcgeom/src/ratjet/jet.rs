use std::collections::BTreeMap;
use std::fmt;

use super::multiindex::{MultiIndex, MAX_TOTAL_DEGREE, MAX_VARIABLES};
use super::scalar::Scalar;
use crate::{Error, Result};

/// Truncated Taylor expansion of a smooth function at a fixed sample point:
/// the exact coefficients `c_alpha` of `sum c_alpha (x - p)^alpha` for all
/// `|alpha| <= order`, stored sparsely (zero coefficients are never kept).
///
/// Ring operations truncate to the smaller operand order, matching the rule
/// for composing functions known only up to that order.  Extracting a
/// partial derivative costs one order: the derivative of an order-`r` jet is
/// determined only to order `r - 1`, and asking for more is an error rather
/// than a silent wrong answer.
#[derive(Clone, PartialEq, Eq)]
pub struct Jet<S: Scalar> {
    dim: u8,
    order: u8,
    coeffs: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> Jet<S> {
    fn check_shape(dim: usize, order: u32) {
        assert!(
            dim <= MAX_VARIABLES,
            "jet dimension {dim} exceeds the packed multi-index capacity"
        );
        assert!(
            order <= MAX_TOTAL_DEGREE,
            "jet order {order} exceeds the packed multi-index capacity"
        );
    }

    pub fn zero(dim: usize, order: u32) -> Self {
        Self::check_shape(dim, order);
        Jet {
            dim: dim as u8,
            order: order as u8,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, order: u32, value: S) -> Self {
        let mut jet = Self::zero(dim, order);
        if !value.is_zero() {
            jet.coeffs.insert(MultiIndex::ZERO, value);
        }
        jet
    }

    pub fn one(dim: usize, order: u32) -> Self {
        Self::constant(dim, order, S::one())
    }

    /// The coordinate function `x_var` expanded at a point where it takes
    /// `value`: constant part `value`, linear part `(x - p)_var`.
    pub fn coordinate(dim: usize, order: u32, var: usize, value: S) -> Self {
        assert!(var < dim, "coordinate index {var} out of range for dim {dim}");
        let mut jet = Self::constant(dim, order, value);
        if order >= 1 {
            jet.coeffs.insert(MultiIndex::unit(var), S::one());
        }
        jet
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn order(&self) -> u32 {
        u32::from(self.order)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The value of the function at the sample point.
    pub fn value(&self) -> S {
        self.coeff(MultiIndex::ZERO)
    }

    pub fn coeff(&self, index: MultiIndex) -> S {
        self.coeffs.get(&index).cloned().unwrap_or_else(S::zero)
    }

    pub fn set_coeff(&mut self, index: MultiIndex, value: S) {
        assert!(index.degree() <= self.order());
        if value.is_zero() {
            self.coeffs.remove(&index);
        } else {
            self.coeffs.insert(index, value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &S)> {
        self.coeffs.iter()
    }

    /// First nonzero coefficient in packed index order, as a witness.
    pub fn first_nonzero(&self) -> Option<(MultiIndex, &S)> {
        self.coeffs.iter().next().map(|(i, c)| (*i, c))
    }

    fn assert_same_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "jet dimension mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let order = self.order().min(other.order());
        let mut out = Jet::zero(self.dim(), order);
        for (idx, c) in &self.coeffs {
            if idx.degree() <= order {
                out.coeffs.insert(*idx, c.clone());
            }
        }
        for (idx, c) in &other.coeffs {
            if idx.degree() > order {
                continue;
            }
            let merged = match out.coeffs.remove(idx) {
                Some(existing) => existing.add(c),
                None => c.clone(),
            };
            if !merged.is_zero() {
                out.coeffs.insert(*idx, merged);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, factor: &S) -> Self {
        if factor.is_zero() {
            return Jet::zero(self.dim(), self.order());
        }
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.mul(factor);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_dim(other);
        let order = self.order().min(other.order());
        // Bucket the right factor by total degree so each left term only
        // meets right terms it can combine with inside the truncation.
        let mut by_degree: Vec<Vec<(MultiIndex, &S)>> = vec![Vec::new(); order as usize + 1];
        for (idx, c) in &other.coeffs {
            let d = idx.degree();
            if d <= order {
                by_degree[d as usize].push((*idx, c));
            }
        }
        let mut out = Self::zero(self.dim(), order);
        for (lidx, lc) in &self.coeffs {
            let ld = lidx.degree();
            if ld > order {
                continue;
            }
            for bucket in by_degree.iter().take((order - ld) as usize + 1) {
                for (ridx, rc) in bucket {
                    let idx = lidx.add(ridx);
                    let term = lc.mul(rc);
                    if term.is_zero() {
                        continue;
                    }
                    let merged = match out.coeffs.remove(&idx) {
                        Some(existing) => existing.add(&term),
                        None => term,
                    };
                    if !merged.is_zero() {
                        out.coeffs.insert(idx, merged);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Jet::one(self.dim(), self.order());
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse, by the graded recursion
    /// `c_gamma = -c_0^{-1} * sum_{0 < beta <= gamma} a_beta c_{gamma-beta}`.
    /// Fails when the value part is zero (the function has a zero at the
    /// sample point, so its reciprocal has no Taylor expansion there).
    pub fn recip(&self) -> Result<Self> {
        let v0 = self.value().inv().ok_or_else(|| Error::DivisionByZero {
            expr: "jet with zero value part".to_string(),
        })?;
        let mut out = Jet::zero(self.dim(), self.order());
        out.coeffs.insert(MultiIndex::ZERO, v0.clone());
        for degree in 1..=self.order() {
            for gamma in MultiIndex::all_of_degree(self.dim(), degree) {
                let mut acc = S::zero();
                for (beta, a) in &self.coeffs {
                    if beta.degree() == 0 {
                        continue;
                    }
                    if let Some(rest) = gamma.checked_sub(beta) {
                        if let Some(c) = out.coeffs.get(&rest) {
                            acc = acc.add(&a.mul(c));
                        }
                    }
                }
                if !acc.is_zero() {
                    out.coeffs.insert(gamma, v0.neg().mul(&acc));
                }
            }
        }
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Taylor expansion of `d(self)/d(x_var)`, one order lower.
    pub fn partial(&self, var: usize) -> Result<Self> {
        assert!(var < self.dim());
        if self.order() == 0 {
            return Err(Error::InsufficientJetOrder {
                order: 0,
                context: "cannot differentiate an order-zero jet".to_string(),
            });
        }
        let mut out = Jet::zero(self.dim(), self.order() - 1);
        for (idx, c) in &self.coeffs {
            if let Some(lower) = idx.decrement(var) {
                let factor = S::from_int(i64::from(idx.get(var)));
                let coeff = c.mul(&factor);
                if !coeff.is_zero() {
                    out.coeffs.insert(lower, coeff);
                }
            }
        }
        Ok(out)
    }

    /// Forgets coefficients above `order`.  Lowering the order is always
    /// sound; raising it would invent unknown coefficients and is refused.
    pub fn truncate(&self, order: u32) -> Self {
        assert!(order <= self.order(), "cannot raise a jet's order");
        let mut out = Jet::zero(self.dim(), order);
        for (idx, c) in &self.coeffs {
            if idx.degree() <= order {
                out.coeffs.insert(*idx, c.clone());
            }
        }
        out
    }

    /// Reinterprets the jet in a larger variable set; the new trailing
    /// variables do not occur, which represents exact independence of them.
    pub fn extend_dim(&self, dim: usize) -> Self {
        assert!(dim >= self.dim());
        Self::check_shape(dim, self.order());
        let mut out = self.clone();
        out.dim = dim as u8;
        out
    }

    /// Renders the leading terms with the supplied coordinate names, for
    /// witnesses in reports and error messages.
    pub fn describe(&self, coords: &[String]) -> String {
        match self.first_nonzero() {
            None => "0".to_string(),
            Some((idx, c)) => {
                let mut monomial = String::new();
                for (var, name) in coords.iter().enumerate().take(self.dim()) {
                    let e = idx.get(var);
                    if e > 0 {
                        if !monomial.is_empty() {
                            monomial.push('*');
                        }
                        monomial.push_str(&format!("d{name}^{e}"));
                    }
                }
                let more = if self.coeffs.len() > 1 { " + ..." } else { "" };
                if monomial.is_empty() {
                    format!("{c}{more}")
                } else {
                    format!("{c}*{monomial}{more}")
                }
            }
        }
    }
}

impl<S: Scalar> fmt::Debug for Jet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(dim={}, order={}; ", self.dim, self.order)?;
        if self.coeffs.is_empty() {
            write!(f, "0)")
        } else {
            let terms: Vec<String> = self
                .coeffs
                .iter()
                .map(|(idx, c)| format!("{}{}", c, idx.format(self.dim())))
                .collect();
            write!(f, "{})", terms.join(" + "))
        }
    }
}
