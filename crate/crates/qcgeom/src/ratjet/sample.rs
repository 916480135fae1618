use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::linalg::value_det;
use super::scalar::{rat, Rational};

/// Deterministic source of small rational sample data.
///
/// Every sampled point gets its own ChaCha stream derived from `(seed,
/// point_index)`, so points are independent of each other and of how many
/// draws earlier points consumed: retrying point 3 never shifts point 4,
/// and running points in parallel yields the same data as running them in
/// sequence.
pub struct SampleStream {
    rng: ChaCha8Rng,
    bound: i64,
}

impl SampleStream {
    pub fn for_point(seed: u64, point_index: u64, coeff_bound: u32) -> Self {
        assert!(coeff_bound >= 1, "coefficient bound must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(point_index);
        SampleStream {
            rng,
            bound: i64::from(coeff_bound),
        }
    }

    /// A rational with numerator in `[-bound, bound]` and denominator in
    /// `[1, bound]`.
    pub fn rational(&mut self) -> Rational {
        let numer = self.rng.gen_range(-self.bound..=self.bound);
        let denom = self.rng.gen_range(1..=self.bound);
        rat(numer, denom)
    }

    /// A rational guaranteed nonzero, for deformation factors and times.
    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if r != rat(0, 1) {
                return r;
            }
        }
    }

    pub fn point(&mut self, dim: usize) -> Vec<Rational> {
        (0..dim).map(|_| self.rational()).collect()
    }

    /// An exactly invertible square matrix with small rational entries,
    /// used to remix frames in the frame-independence checks.
    pub fn invertible_matrix(&mut self, size: usize) -> Vec<Vec<Rational>> {
        loop {
            let m: Vec<Vec<Rational>> =
                (0..size).map(|_| self.point(size)).collect();
            if !num_traits::Zero::is_zero(&value_det(&m)) {
                return m;
            }
        }
    }
}
