use std::cmp::Ordering;

use super::jet::Jet;
use super::scalar::Scalar;
use crate::{Error, Result};

/// Dense matrix with jet entries, the workhorse behind Reeb-field solves,
/// frame metrics, and the almost complex structures.
///
/// Row reduction pivots on entries whose *value part* is nonzero: such a jet
/// is a unit in the truncated polynomial ring, so every elimination step is
/// exact and reversible, and any equation left over after elimination can be
/// checked for exact vanishing instead of being trusted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct JetMatrix<S: Scalar> {
    rows: usize,
    cols: usize,
    jet_dim: usize,
    entries: Vec<Jet<S>>,
}

impl<S: Scalar> JetMatrix<S> {
    pub fn zeros(rows: usize, cols: usize, jet_dim: usize, order: u32) -> Self {
        JetMatrix {
            rows,
            cols,
            jet_dim,
            entries: vec![Jet::zero(jet_dim, order); rows * cols],
        }
    }

    pub fn identity(size: usize, jet_dim: usize, order: u32) -> Self {
        let mut out = Self::zeros(size, size, jet_dim, order);
        for i in 0..size {
            *out.get_mut(i, i) = Jet::one(jet_dim, order);
        }
        out
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut entry: impl FnMut(usize, usize) -> Jet<S>,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(entry(r, c));
            }
        }
        let jet_dim = entries.first().map_or(0, Jet::dim);
        assert!(entries.iter().all(|j| j.dim() == jet_dim));
        JetMatrix {
            rows,
            cols,
            jet_dim,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn jet_dim(&self) -> usize {
        self.jet_dim
    }

    pub fn get(&self, row: usize, col: usize) -> &Jet<S> {
        assert!(row < self.rows && col < self.cols);
        &self.entries[row * self.cols + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut Jet<S> {
        assert!(row < self.rows && col < self.cols);
        &mut self.entries[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Jet<S>) {
        assert_eq!(value.dim(), self.jet_dim);
        *self.get_mut(row, col) = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Jet::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Jet<S>) -> Jet<S>) -> Self {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            jet_dim: self.jet_dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            jet_dim: self.jet_dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(Jet::neg)
    }

    pub fn scale(&self, factor: &Jet<S>) -> Self {
        self.map(|j| j.mul(factor))
    }

    pub fn scale_scalar(&self, factor: &S) -> Self {
        self.map(|j| j.scale(factor))
    }

    pub fn transpose(&self) -> Self {
        JetMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        JetMatrix::from_fn(self.rows, other.cols, |r, c| {
            let mut acc: Option<Jet<S>> = None;
            for k in 0..self.cols {
                let term = self.get(r, k).mul(other.get(k, c));
                acc = Some(match acc {
                    None => term,
                    Some(a) => a.add(&term),
                });
            }
            acc.expect("nonempty contraction")
        })
    }

    pub fn trace(&self) -> Jet<S> {
        assert_eq!(self.rows, self.cols);
        let mut acc = self.get(0, 0).clone();
        for i in 1..self.rows {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// Applies the matrix to a vector of jets.
    pub fn apply(&self, vector: &[Jet<S>]) -> Vec<Jet<S>> {
        assert_eq!(vector.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                let mut acc = self.get(r, 0).mul(&vector[0]);
                for c in 1..self.cols {
                    acc = acc.add(&self.get(r, c).mul(&vector[c]));
                }
                acc
            })
            .collect()
    }

    pub fn value_matrix(&self) -> Vec<Vec<S>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c).value()).collect())
            .collect()
    }

    /// Row-reduces `[self | rhs]` and returns the unique solution of
    /// `self * X = rhs`.
    ///
    /// Requires full column rank of the value part (otherwise
    /// [`Error::SingularValuePart`]).  Extra rows of an overdetermined
    /// system must reduce to exactly zero, including all higher jet
    /// coefficients; a nonzero leftover is reported with a witness.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        assert_eq!(self.rows, rhs.rows, "solve shape mismatch");
        let (reduced, pivots) = self.reduce_augmented(rhs)?;
        if pivots.len() < self.cols {
            return Err(Error::SingularValuePart {
                context: format!(
                    "system of {} equations has column rank {} < {}",
                    self.rows,
                    pivots.len(),
                    self.cols
                ),
            });
        }
        // Any row beyond the pivot rows must have vanished identically.
        for row in pivots.len()..self.rows {
            for col in 0..reduced.cols {
                let jet = reduced.get(row, col);
                if !jet.is_zero() {
                    return Err(Error::InconsistentSystem {
                        witness: format!(
                            "equation {row} leaves residual {:?} in column {col}",
                            jet
                        ),
                    });
                }
            }
        }
        let mut solution = JetMatrix::zeros(self.cols, rhs.cols, self.jet_dim, reduced_order(&reduced));
        for (pivot_row, &pivot_col) in pivots.iter().enumerate() {
            for c in 0..rhs.cols {
                solution.set(pivot_col, c, reduced.get(pivot_row, self.cols + c).clone());
            }
        }
        Ok(solution)
    }

    /// Matrix inverse via Gauss-Jordan on `[self | I]`.
    pub fn invert(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols, "only square matrices invert");
        let order = self
            .entries
            .iter()
            .map(Jet::order)
            .min()
            .expect("nonempty matrix");
        self.solve(&JetMatrix::identity(self.rows, self.jet_dim, order))
    }

    /// Basis of the solution space of `self * x = 0`, one vector per
    /// non-pivot column, ordered by ascending column index.  Entry `f` of
    /// the basis vector for free column `f` is one, so the basis is in
    /// echelon form and visibly linearly independent.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<Jet<S>>>> {
        let order = self
            .entries
            .iter()
            .map(Jet::order)
            .min()
            .expect("nonempty matrix");
        let empty = JetMatrix::zeros(self.rows, 0, self.jet_dim, order);
        let (reduced, pivots) = self.reduce_augmented(&empty)?;
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.contains(&free) {
                continue;
            }
            let mut vector = vec![Jet::zero(self.jet_dim, order); self.cols];
            vector[free] = Jet::one(self.jet_dim, order);
            for (pivot_row, &pivot_col) in pivots.iter().enumerate() {
                vector[pivot_col] = reduced.get(pivot_row, free).neg();
            }
            basis.push(vector);
        }
        Ok(basis)
    }

    /// Gauss-Jordan elimination of `[self | rhs]` with value-part pivoting.
    /// Returns the reduced matrix and the pivot columns in row order.
    fn reduce_augmented(&self, rhs: &Self) -> Result<(Self, Vec<usize>)> {
        let order = self
            .entries
            .iter()
            .chain(&rhs.entries)
            .map(Jet::order)
            .min()
            .expect("nonempty system");
        let mut work = JetMatrix::zeros(self.rows, self.cols + rhs.cols, self.jet_dim, order);
        for r in 0..self.rows {
            for c in 0..self.cols {
                work.set(r, c, self.get(r, c).truncate(order));
            }
            for c in 0..rhs.cols {
                work.set(r, self.cols + c, rhs.get(r, c).truncate(order));
            }
        }
        let mut pivots: Vec<usize> = Vec::new();
        for col in 0..self.cols {
            let pivot_row = pivots.len();
            let Some(found) = (pivot_row..self.rows)
                .find(|&r| !work.get(r, col).value().is_zero())
            else {
                continue;
            };
            work.swap_rows(pivot_row, found);
            let inv = work
                .get(pivot_row, col)
                .recip()
                .expect("pivot has nonzero value part");
            // Sweep every column: a skipped (free) column to the left may
            // still hold nonzero higher-order coefficients, and those must
            // participate in the reduction for the result to be an exact
            // reduced echelon form over the jet ring.
            for c in 0..work.cols {
                let scaled = work.get(pivot_row, c).mul(&inv);
                work.set(pivot_row, c, scaled);
            }
            for r in 0..self.rows {
                if r == pivot_row || work.get(r, col).is_zero() {
                    continue;
                }
                let factor = work.get(r, col).clone();
                for c in 0..work.cols {
                    let updated = work.get(r, c).sub(&factor.mul(work.get(pivot_row, c)));
                    work.set(r, c, updated);
                }
            }
            pivots.push(col);
        }
        Ok((work, pivots))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

fn reduced_order<S: Scalar>(m: &JetMatrix<S>) -> u32 {
    m.entries.iter().map(Jet::order).min().unwrap_or(0)
}

/// Exact signature `(positive, negative, zero)` of a symmetric scalar
/// matrix, by congruence elimination (Sylvester's law of inertia).  Returns
/// `None` when the field is unordered, in which case definiteness simply
/// cannot be decided there.
pub fn symmetric_signature<S: Scalar>(matrix: &[Vec<S>]) -> Option<(usize, usize, usize)> {
    let k = matrix.len();
    let mut m: Vec<Vec<S>> = matrix.to_vec();
    for row in &m {
        assert_eq!(row.len(), k, "signature of a non-square matrix");
    }
    let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
    let mut step = 0;
    while step < k {
        // Prefer a nonzero diagonal pivot.
        let diag = (step..k).find(|&i| !m[i][i].is_zero());
        let pivot = match diag {
            Some(i) => i,
            None => {
                // All remaining diagonal entries vanish.  If the whole block
                // vanishes we are done; otherwise make a diagonal entry by a
                // symmetric row+column addition.
                let off = (step..k)
                    .flat_map(|i| ((i + 1)..k).map(move |j| (i, j)))
                    .find(|&(i, j)| !m[i][j].is_zero());
                match off {
                    None => {
                        zero += k - step;
                        break;
                    }
                    Some((i, j)) => {
                        for c in 0..k {
                            let sum = m[i][c].add(&m[j][c]);
                            m[i][c] = sum;
                        }
                        for r in 0..k {
                            let sum = m[r][i].add(&m[r][j]);
                            m[r][i] = sum;
                        }
                        i
                    }
                }
            }
        };
        m.swap(step, pivot);
        for r in 0..k {
            m[r].swap(step, pivot);
        }
        let d = m[step][step].clone();
        match d.sign()? {
            Ordering::Greater => pos += 1,
            Ordering::Less => neg += 1,
            Ordering::Equal => unreachable!("pivot is nonzero"),
        }
        // One-sided row elimination is enough: for the symmetric input the
        // congruence E*M*E^T has the same trailing block, and the cleared
        // row/column of the pivot is never read again.
        let dinv = d.inv().expect("nonzero pivot");
        for r in (step + 1)..k {
            if m[r][step].is_zero() {
                continue;
            }
            let factor = m[r][step].mul(&dinv);
            for c in (step + 1)..k {
                let updated = m[r][c].sub(&factor.mul(&m[step][c]));
                m[r][c] = updated;
            }
            m[r][step] = S::zero();
        }
        for c in (step + 1)..k {
            m[step][c] = S::zero();
        }
        step += 1;
    }
    Some((pos, neg, zero))
}

/// Determinant of a scalar matrix by fraction-free-ish elimination; used
/// only on small matrices (frame remixing, sample validation).
pub fn value_det<S: Scalar>(matrix: &[Vec<S>]) -> S {
    let k = matrix.len();
    let mut m: Vec<Vec<S>> = matrix.to_vec();
    let mut det = S::one();
    for col in 0..k {
        let Some(pivot) = (col..k).find(|&r| !m[r][col].is_zero()) else {
            return S::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            det = det.neg();
        }
        let d = m[col][col].clone();
        det = det.mul(&d);
        let dinv = d.inv().expect("nonzero pivot");
        for r in (col + 1)..k {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].mul(&dinv);
            for c in col..k {
                let updated = m[r][c].sub(&factor.mul(&m[col][c]));
                m[r][c] = updated;
            }
        }
    }
    det
}
