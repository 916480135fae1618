//! Randomized algebraic laws of the computational kernel: jet ring
//! axioms, exterior-calculus identities, and exactness of the linear
//! solver.  Every law is checked on hundreds of generated cases.

use proptest::prelude::*;

use qcgeom::exterior::{FormJet, VectorJet};
use qcgeom::ratjet::{rat, Jet, JetMatrix, MultiIndex, Rational};

const DIM: usize = 3;
const ORDER: u32 = 3;

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(numer, denom)| rat(numer, denom))
}

fn jet() -> impl Strategy<Value = Jet<Rational>> {
    let indices: Vec<MultiIndex> = (0..=ORDER)
        .flat_map(|degree| MultiIndex::all_of_degree(DIM, degree))
        .collect();
    proptest::collection::vec(rational(), indices.len()).prop_map(move |coeffs| {
        let mut out = Jet::zero(DIM, ORDER);
        for (index, coeff) in indices.iter().zip(coeffs) {
            out.set_coeff(*index, coeff);
        }
        out
    })
}

fn form(degree: usize) -> impl Strategy<Value = FormJet<Rational>> {
    let masks: Vec<u32> = (0..1u32 << DIM)
        .filter(|m| m.count_ones() as usize == degree)
        .collect();
    proptest::collection::vec(jet(), masks.len()).prop_map(move |jets| {
        let mut out = FormJet::zero(DIM, degree, ORDER);
        for (mask, component) in masks.iter().zip(jets) {
            out.set(*mask, component);
        }
        out
    })
}

fn vector() -> impl Strategy<Value = VectorJet<Rational>> {
    proptest::collection::vec(jet(), DIM).prop_map(VectorJet::new)
}

proptest! {
    #[test]
    fn jet_ring_laws(a in jet(), b in jet(), c in jet()) {
        prop_assert!(a.add(&b).sub(&b.add(&a)).is_zero(), "commutative addition");
        prop_assert!(a.mul(&b).sub(&b.mul(&a)).is_zero(), "commutative multiplication");
        prop_assert!(
            a.add(&b).add(&c).sub(&a.add(&b.add(&c))).is_zero(),
            "associative addition"
        );
        prop_assert!(
            a.mul(&b).mul(&c).sub(&a.mul(&b.mul(&c))).is_zero(),
            "associative multiplication"
        );
        prop_assert!(
            a.mul(&b.add(&c)).sub(&a.mul(&b).add(&a.mul(&c))).is_zero(),
            "distributivity"
        );
        prop_assert!(a.mul(&Jet::one(DIM, ORDER)).sub(&a).is_zero(), "unit");
    }

    #[test]
    fn jet_leibniz_and_reciprocal(a in jet(), b in jet()) {
        for var in 0..DIM {
            let lhs = a.mul(&b).partial(var).unwrap();
            let rhs = a
                .partial(var)
                .unwrap()
                .mul(&b.truncate(ORDER - 1))
                .add(&a.truncate(ORDER - 1).mul(&b.partial(var).unwrap()));
            prop_assert!(lhs.sub(&rhs).is_zero(), "Leibniz rule in variable {var}");
        }
        if !a.value().eq(&rat(0, 1)) {
            let inverse = a.recip().unwrap();
            prop_assert!(
                a.mul(&inverse).sub(&Jet::one(DIM, ORDER)).is_zero(),
                "a * a^-1 = 1"
            );
        }
    }

    #[test]
    fn exterior_derivative_squares_to_zero(f in jet(), omega in form(1)) {
        prop_assert!(FormJet::from_jet(&f).d().unwrap().d().unwrap().is_zero());
        prop_assert!(omega.d().unwrap().d().unwrap().is_zero());
    }

    #[test]
    fn wedge_is_graded_commutative(
        a1 in form(1), b1 in form(1), a2 in form(2), b2 in form(2)
    ) {
        // Odd * odd anticommutes; anything involving even degree commutes.
        prop_assert!(a1.wedge(&b1).add(&b1.wedge(&a1)).is_zero());
        prop_assert!(a1.wedge(&a2).sub(&a2.wedge(&a1)).is_zero());
        prop_assert!(a2.wedge(&b2).sub(&b2.wedge(&a2)).is_zero());
        // And d is an odd derivation of the product.
        let left = a1.wedge(&b1).d().unwrap();
        let right = a1
            .d()
            .unwrap()
            .wedge(&b1.truncate(ORDER - 1))
            .sub(&a1.truncate(ORDER - 1).wedge(&b1.d().unwrap()));
        prop_assert!(left.sub(&right).is_zero(), "d(a ∧ b) = da ∧ b - a ∧ db");
    }

    #[test]
    fn cartan_identity(x in vector(), omega1 in form(1), omega2 in form(2)) {
        for omega in [&omega1, &omega2] {
            let lie = omega.lie_derivative(&x).unwrap();
            let homotopy = omega
                .interior(&x)
                .d()
                .unwrap()
                .add(&omega.d().unwrap().interior(&x));
            prop_assert!(lie.sub(&homotopy).is_zero(), "L_X = d ι_X + ι_X d");
        }
    }

    #[test]
    fn solver_is_exact_on_consistent_systems(
        entries in proptest::collection::vec(jet(), 9),
        solution in proptest::collection::vec(jet(), 3),
    ) {
        let matrix = JetMatrix::from_fn(3, 3, |r, c| entries[3 * r + c].clone());
        let x = JetMatrix::from_fn(3, 1, |r, _| solution[r].clone());
        let rhs = matrix.matmul(&x);
        // Singular value parts are legitimately rejected; solvable systems
        // must be solved exactly.
        if let Ok(solved) = matrix.solve(&rhs) {
            let residual = matrix.matmul(&solved).sub(&rhs);
            prop_assert!(residual.is_zero(), "A x - b = 0 as jets");
        }
    }
}
