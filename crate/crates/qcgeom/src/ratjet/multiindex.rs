use std::fmt;

/// Maximum number of jet variables: one nibble of the packed word each.
pub const MAX_VARIABLES: usize = 16;

/// Maximum total degree of a stored Taylor coefficient.  Bounded by the
/// nibble width: every per-variable exponent is at most the total degree.
pub const MAX_TOTAL_DEGREE: u32 = 15;

/// Exponent vector of a Taylor monomial, packed four bits per variable into
/// one machine word.  Variable `i` occupies bits `4i..4i+4`, so comparison,
/// hashing, and map ordering are single integer operations.  The dimension
/// is not stored: trailing variables simply carry exponent zero, which is
/// exactly what extending a jet by a new variable requires.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct MultiIndex(u64);

const LOW_NIBBLES: u64 = 0x0F0F_0F0F_0F0F_0F0F;

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex(0);

    /// The exponent vector of the bare variable `var`.
    pub fn unit(var: usize) -> Self {
        assert!(var < MAX_VARIABLES, "variable index {var} out of range");
        MultiIndex(1 << (4 * var))
    }

    pub fn get(&self, var: usize) -> u32 {
        debug_assert!(var < MAX_VARIABLES);
        ((self.0 >> (4 * var)) & 0xF) as u32
    }

    /// Total degree, i.e. the sum of all sixteen nibbles.
    pub fn degree(&self) -> u32 {
        let bytes = (self.0 & LOW_NIBBLES) + ((self.0 >> 4) & LOW_NIBBLES);
        (bytes.wrapping_mul(0x0101_0101_0101_0101) >> 56) as u32
    }

    /// Componentwise sum.  Callers guarantee `self.degree() + other.degree()
    /// <= MAX_TOTAL_DEGREE`, which makes every nibble addition carry-free.
    pub fn add(&self, other: &Self) -> Self {
        debug_assert!(self.degree() + other.degree() <= MAX_TOTAL_DEGREE);
        MultiIndex(self.0 + other.0)
    }

    /// Componentwise difference, or `None` if any component would go
    /// negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = 0u64;
        for var in 0..MAX_VARIABLES {
            let shift = 4 * var;
            let a = (self.0 >> shift) & 0xF;
            let b = (other.0 >> shift) & 0xF;
            if a < b {
                return None;
            }
            out |= (a - b) << shift;
        }
        Some(MultiIndex(out))
    }

    /// Decrements variable `var`, or `None` if its exponent is zero.
    pub fn decrement(&self, var: usize) -> Option<Self> {
        if self.get(var) == 0 {
            None
        } else {
            Some(MultiIndex(self.0 - (1 << (4 * var))))
        }
    }

    pub fn increment(&self, var: usize) -> Self {
        self.add(&MultiIndex::unit(var))
    }

    pub fn exponents(&self, dim: usize) -> Vec<u32> {
        (0..dim).map(|v| self.get(v)).collect()
    }

    /// All exponent vectors in `dim` variables of total degree exactly
    /// `degree`, in ascending packed order.
    pub fn all_of_degree(dim: usize, degree: u32) -> Vec<MultiIndex> {
        assert!(dim <= MAX_VARIABLES && degree <= MAX_TOTAL_DEGREE);
        fn recurse(out: &mut Vec<MultiIndex>, acc: u64, var: usize, dim: usize, left: u32) {
            if var == dim {
                if left == 0 {
                    out.push(MultiIndex(acc));
                }
                return;
            }
            for e in 0..=left {
                recurse(out, acc | (u64::from(e) << (4 * var)), var + 1, dim, left - e);
            }
        }
        let mut out = Vec::new();
        recurse(&mut out, 0, 0, dim, degree);
        out.sort();
        out
    }

    pub fn format(&self, dim: usize) -> String {
        let parts: Vec<String> = self.exponents(dim).iter().map(u32::to_string).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format(MAX_VARIABLES))
    }
}
