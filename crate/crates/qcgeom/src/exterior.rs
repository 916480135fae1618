//! Exterior calculus over the jet ring.
//!
//! A differential form is stored by its components in the coordinate
//! coframe: a map from strictly increasing index tuples (packed as bit
//! masks) to coefficient jets.  All the classical operators — wedge,
//! exterior derivative, interior product, Lie derivative, Lie bracket —
//! reduce to sign bookkeeping on masks plus jet arithmetic, so they inherit
//! exactness from the scalars.
//!
//! Signs follow the convention `(dx^I ∧ dx^J) = (-1)^{inv(I,J)} dx^{I∪J}`
//! with `inv` the number of transpositions needed to sort `I` before `J`,
//! and `(ι_V ω)` contracts `V` into the *first* slot, so
//! `ω(V_1, ..., V_k) = (ι_{V_k} ··· ι_{V_1} ω)`.

use std::collections::BTreeMap;

use crate::ratjet::{Jet, JetMatrix, Scalar};
use crate::{Error, Result};

/// Number of transpositions to merge two disjoint ascending index masks.
fn merge_sign(left: u32, right: u32) -> bool {
    debug_assert_eq!(left & right, 0);
    let mut odd = false;
    let mut r = right;
    while r != 0 {
        let j = r.trailing_zeros();
        if (left >> (j + 1)).count_ones() % 2 == 1 {
            odd = !odd;
        }
        r &= r - 1;
    }
    odd
}

/// Position of `bit` inside the ascending tuple encoded by `mask`.
fn position(mask: u32, bit: u32) -> u32 {
    (mask & ((1 << bit) - 1)).count_ones()
}

/// Vector field known to jet order: one coefficient jet per coordinate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VectorJet<S: Scalar> {
    comps: Vec<Jet<S>>,
}

impl<S: Scalar> VectorJet<S> {
    pub fn new(comps: Vec<Jet<S>>) -> Self {
        assert!(!comps.is_empty());
        let dim = comps[0].dim();
        assert!(comps.len() == dim, "vector needs one component per variable");
        assert!(comps.iter().all(|j| j.dim() == dim));
        VectorJet { comps }
    }

    pub fn zero(dim: usize, order: u32) -> Self {
        VectorJet {
            comps: vec![Jet::zero(dim, order); dim],
        }
    }

    /// The coordinate vector field `∂/∂x_var`.
    pub fn coordinate_axis(dim: usize, order: u32, var: usize) -> Self {
        let mut v = Self::zero(dim, order);
        v.comps[var] = Jet::one(dim, order);
        v
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn order(&self) -> u32 {
        self.comps.iter().map(Jet::order).min().expect("nonempty")
    }

    pub fn component(&self, var: usize) -> &Jet<S> {
        &self.comps[var]
    }

    pub fn components(&self) -> &[Jet<S>] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Jet::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        VectorJet {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        VectorJet {
            comps: self.comps.iter().map(Jet::neg).collect(),
        }
    }

    pub fn scale(&self, factor: &Jet<S>) -> Self {
        VectorJet {
            comps: self.comps.iter().map(|c| c.mul(factor)).collect(),
        }
    }

    pub fn scale_scalar(&self, factor: &S) -> Self {
        VectorJet {
            comps: self.comps.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    /// Lie bracket `[self, other]`, one jet order lower.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.dim(), other.dim());
        let dim = self.dim();
        let mut comps = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut acc: Option<Jet<S>> = None;
            for j in 0..dim {
                let push = self.comps[j]
                    .mul(&other.comps[i].partial(j)?)
                    .sub(&other.comps[j].mul(&self.comps[i].partial(j)?));
                acc = Some(match acc {
                    None => push,
                    Some(a) => a.add(&push),
                });
            }
            comps.push(acc.expect("positive dimension"));
        }
        Ok(VectorJet { comps })
    }

    /// Directional derivative of a function jet.
    pub fn derive(&self, f: &Jet<S>) -> Result<Jet<S>> {
        assert_eq!(self.dim(), f.dim());
        let mut acc = Jet::zero(self.dim(), f.order().saturating_sub(1));
        for (i, c) in self.comps.iter().enumerate() {
            acc = acc.add(&c.mul(&f.partial(i)?));
        }
        Ok(acc)
    }

    pub fn extend_dim(&self, dim: usize) -> Self {
        let mut comps: Vec<Jet<S>> = self.comps.iter().map(|j| j.extend_dim(dim)).collect();
        let order = comps.iter().map(Jet::order).min().expect("nonempty");
        comps.resize(dim, Jet::zero(dim, order));
        VectorJet { comps }
    }
}

/// Differential form with jet coefficients.
///
/// `comps` maps a packed ascending index tuple (bit `i` set means `dx_i` is
/// a factor) to the coefficient jet; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormJet<S: Scalar> {
    dim: usize,
    degree: u8,
    order: u32,
    comps: BTreeMap<u32, Jet<S>>,
}

impl<S: Scalar> FormJet<S> {
    /// Degrees above `dim` are legal (the form is then identically zero),
    /// so that wedges and derivatives of top-degree forms stay total.
    pub fn zero(dim: usize, degree: usize, order: u32) -> Self {
        assert!(degree <= 32);
        FormJet {
            dim,
            degree: degree as u8,
            order,
            comps: BTreeMap::new(),
        }
    }

    /// Wraps a function jet as a 0-form.
    pub fn from_jet(jet: &Jet<S>) -> Self {
        let mut form = FormJet::zero(jet.dim(), 0, jet.order());
        form.set(0, jet.clone());
        form
    }

    /// Builds a 1-form from its coefficient jets.
    pub fn one_form(comps: Vec<Jet<S>>) -> Self {
        assert!(!comps.is_empty());
        let dim = comps[0].dim();
        assert_eq!(comps.len(), dim);
        let order = comps.iter().map(Jet::order).min().expect("nonempty");
        let mut form = FormJet::zero(dim, 1, order);
        for (i, jet) in comps.into_iter().enumerate() {
            form.set(1 << i, jet);
        }
        form
    }

    /// The coordinate differential `dx_var`.
    pub fn coordinate_differential(dim: usize, order: u32, var: usize) -> Self {
        assert!(var < dim);
        let mut form = FormJet::zero(dim, 1, order);
        form.set(1 << var, Jet::one(dim, order));
        form
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        usize::from(self.degree)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn component(&self, mask: u32) -> Jet<S> {
        debug_assert_eq!(mask.count_ones() as usize, self.degree());
        self.comps
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| Jet::zero(self.dim, self.order))
    }

    pub fn set(&mut self, mask: u32, jet: Jet<S>) {
        assert_eq!(mask.count_ones() as usize, self.degree());
        assert!(mask == 0 || (mask >> self.dim) == 0, "mask out of range");
        assert_eq!(jet.dim(), self.dim);
        self.order = self.order.min(jet.order());
        if jet.is_zero() {
            self.comps.remove(&mask);
        } else {
            self.comps.insert(mask, jet);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &Jet<S>)> {
        self.comps.iter()
    }

    /// The unique coefficient of a 0-form as a function jet.
    pub fn to_jet(&self) -> Jet<S> {
        assert_eq!(self.degree, 0, "only 0-forms collapse to jets");
        self.component(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        assert_eq!(self.degree, other.degree);
        let mut out = FormJet::zero(self.dim, self.degree(), self.order.min(other.order));
        for (mask, jet) in &self.comps {
            out.set(*mask, jet.truncate(jet.order().min(out.order)));
        }
        for (mask, jet) in &other.comps {
            let sum = out.component(*mask).add(jet);
            out.set(*mask, sum);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for jet in out.comps.values_mut() {
            *jet = jet.neg();
        }
        out
    }

    pub fn scale_scalar(&self, factor: &S) -> Self {
        let mut out = FormJet::zero(self.dim, self.degree(), self.order);
        for (mask, jet) in &self.comps {
            out.set(*mask, jet.scale(factor));
        }
        out
    }

    /// Multiplies by a function jet (equivalently, wedges with a 0-form).
    pub fn scale(&self, factor: &Jet<S>) -> Self {
        let mut out = FormJet::zero(self.dim, self.degree(), self.order.min(factor.order()));
        for (mask, jet) in &self.comps {
            out.set(*mask, jet.mul(factor));
        }
        out
    }

    pub fn truncate(&self, order: u32) -> Self {
        let mut out = FormJet::zero(self.dim, self.degree(), order.min(self.order));
        for (mask, jet) in &self.comps {
            out.set(*mask, jet.truncate(order.min(jet.order())));
        }
        out
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let degree = self.degree() + other.degree();
        let mut out = FormJet::zero(self.dim, degree, self.order.min(other.order));
        if degree > self.dim {
            return out;
        }
        for (lmask, ljet) in &self.comps {
            for (rmask, rjet) in &other.comps {
                if lmask & rmask != 0 {
                    continue;
                }
                let mut term = ljet.mul(rjet);
                if merge_sign(*lmask, *rmask) {
                    term = term.neg();
                }
                let mask = lmask | rmask;
                let sum = out.component(mask).add(&term);
                out.set(mask, sum);
            }
        }
        out
    }

    /// Exterior derivative, one jet order lower.
    pub fn d(&self) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::InsufficientJetOrder {
                order: 0,
                context: format!(
                    "exterior derivative of a degree-{} form of order 0",
                    self.degree
                ),
            });
        }
        let mut out = FormJet::zero(self.dim, self.degree() + 1, self.order - 1);
        if self.degree() + 1 > self.dim {
            return Ok(out);
        }
        for (mask, jet) in &self.comps {
            for var in 0..self.dim as u32 {
                if mask & (1 << var) != 0 {
                    continue;
                }
                let mut term = jet.partial(var as usize)?;
                if term.is_zero() {
                    continue;
                }
                if position(*mask, var) % 2 == 1 {
                    term = term.neg();
                }
                let new_mask = mask | (1 << var);
                let sum = out.component(new_mask).add(&term);
                out.set(new_mask, sum);
            }
        }
        Ok(out)
    }

    /// Interior product `ι_V self`: contraction of `V` into the first slot.
    pub fn interior(&self, vector: &VectorJet<S>) -> Self {
        assert_eq!(self.dim, vector.dim());
        assert!(self.degree >= 1, "interior product needs degree >= 1");
        let order = self.order.min(vector.order());
        let mut out = FormJet::zero(self.dim, self.degree() - 1, order);
        for (mask, jet) in &self.comps {
            let mut bits = *mask;
            while bits != 0 {
                let var = bits.trailing_zeros();
                bits &= bits - 1;
                let vcomp = vector.component(var as usize);
                if vcomp.is_zero() {
                    continue;
                }
                let mut term = jet.mul(vcomp);
                if position(*mask, var) % 2 == 1 {
                    term = term.neg();
                }
                let new_mask = mask & !(1 << var);
                let sum = out.component(new_mask).add(&term);
                out.set(new_mask, sum);
            }
        }
        out
    }

    /// Full evaluation on `degree` many vector fields.
    pub fn evaluate(&self, vectors: &[&VectorJet<S>]) -> Jet<S> {
        assert_eq!(vectors.len(), self.degree());
        let mut acc = self.clone();
        for v in vectors {
            acc = acc.interior(v);
        }
        acc.to_jet()
    }

    /// Lie derivative along `V` by Cartan's formula `ι_V d + d ι_V`.
    pub fn lie_derivative(&self, vector: &VectorJet<S>) -> Result<Self> {
        let pull = self.d()?.interior(vector);
        if self.degree() == 0 {
            return Ok(pull);
        }
        Ok(pull.add(&self.interior(vector).d()?))
    }

    pub fn extend_dim(&self, dim: usize) -> Self {
        assert!(dim >= self.dim);
        let mut out = FormJet::zero(dim, self.degree(), self.order);
        for (mask, jet) in &self.comps {
            out.set(*mask, jet.extend_dim(dim));
        }
        out
    }

    /// Pullback along the inclusion of a slice `{x_last = const}`: drops
    /// every `dx_last` factor and every Taylor coefficient that varies in
    /// the last variable, then forgets the variable.
    pub fn restrict_last_var(&self) -> Self {
        let dim = self.dim - 1;
        let mut out = FormJet::zero(dim, self.degree(), self.order);
        for (mask, jet) in &self.comps {
            if mask & (1 << dim) != 0 {
                continue;
            }
            let mut restricted = Jet::zero(dim, jet.order());
            for (idx, c) in jet.iter() {
                if idx.get(dim) == 0 {
                    restricted.set_coeff(*idx, c.clone());
                }
            }
            out.set(*mask, restricted);
        }
        out
    }

    /// Human-readable witness: the first stored component and its leading
    /// coefficient.
    pub fn describe(&self, coords: &[String]) -> String {
        match self.comps.iter().next() {
            None => "0".to_string(),
            Some((mask, jet)) => {
                let mut names = Vec::new();
                let mut bits = *mask;
                while bits != 0 {
                    let var = bits.trailing_zeros();
                    bits &= bits - 1;
                    names.push(format!("d{}", coords[var as usize]));
                }
                let slot = if names.is_empty() {
                    String::new()
                } else {
                    format!("[{}] ", names.join("^"))
                };
                format!("{slot}{}", jet.describe(coords))
            }
        }
    }
}

/// A form pulled back onto an ordered list of frame vectors: a totally
/// antisymmetric array of jets indexed by ascending frame-index tuples.
#[derive(Clone, Debug)]
pub struct FrameForm<S: Scalar> {
    arity: usize,
    degree: usize,
    jet_dim: usize,
    order: u32,
    comps: BTreeMap<u32, Jet<S>>,
}

impl<S: Scalar> FrameForm<S> {
    /// Evaluates `form` on all ascending `degree`-tuples from `frame`,
    /// sharing interior products across tuples with a common prefix.
    pub fn pullback(form: &FormJet<S>, frame: &[VectorJet<S>]) -> Self {
        let degree = form.degree();
        let arity = frame.len();
        assert!(arity as u32 <= 32);
        let order = frame
            .iter()
            .map(VectorJet::order)
            .min()
            .unwrap_or(form.order())
            .min(form.order());
        // level p holds ι_{F_{a_p}} ... ι_{F_{a_1}} form for a_1 < ... < a_p
        let mut level: BTreeMap<u32, FormJet<S>> = BTreeMap::new();
        level.insert(0, form.clone());
        for _ in 0..degree {
            let mut next = BTreeMap::new();
            for (mask, partial) in &level {
                let highest = 32 - mask.leading_zeros(); // 0 for empty mask
                for idx in highest as usize..arity {
                    next.insert(mask | (1 << idx), partial.interior(&frame[idx]));
                }
            }
            level = next;
        }
        let mut comps = BTreeMap::new();
        for (mask, zero_form) in level {
            let jet = zero_form.to_jet();
            if !jet.is_zero() {
                comps.insert(mask, jet);
            }
        }
        FrameForm {
            arity,
            degree,
            jet_dim: form.dim(),
            order,
            comps,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Component at an arbitrary (not necessarily sorted) index tuple,
    /// with the antisymmetry sign; repeated indices give zero.
    pub fn at(&self, indices: &[usize]) -> Jet<S> {
        assert_eq!(indices.len(), self.degree);
        let mut sorted: Vec<usize> = indices.to_vec();
        // insertion sort, counting transpositions
        let mut odd = false;
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                sorted.swap(j - 1, j);
                odd = !odd;
                j -= 1;
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Jet::zero(self.jet_dim, self.order);
        }
        let mask = sorted.iter().fold(0u32, |m, &i| m | (1 << i));
        let jet = self
            .comps
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| Jet::zero(self.jet_dim, self.order));
        if odd {
            jet.neg()
        } else {
            jet
        }
    }

    /// Degree-2 frame forms as antisymmetric matrices.
    pub fn to_matrix(&self) -> JetMatrix<S> {
        assert_eq!(self.degree, 2);
        JetMatrix::from_fn(self.arity, self.arity, |r, c| self.at(&[r, c]))
    }
}
