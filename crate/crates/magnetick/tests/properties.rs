//! Property tests for the exact-arithmetic substrate.

use num::bigint::BigInt;
use num::{Signed, Zero};
use proptest::prelude::*;

use magnetick::abelian::{
    cokernel, kernel, smith_normal_form, AbMorphism, FgAbelianGroup, Mat, Presentation,
};
use magnetick::cyclotomic::Cyclotomic;

fn mat_strategy(max_dim: usize, bound: i64) -> impl Strategy<Value = Mat> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-bound..=bound, r * c)
            .prop_map(move |vals| Mat::from_fn(r, c, |i, j| BigInt::from(vals[i * c + j])))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn snf_diagonalizes_with_unimodular_transforms(m in mat_strategy(6, 1000)) {
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d.clone());
        prop_assert_eq!(snf.u.mul(&snf.u_inv), Mat::identity(m.rows));
        prop_assert_eq!(snf.v.mul(&snf.v_inv), Mat::identity(m.cols));
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn rank_splits_between_kernel_and_image(m in mat_strategy(5, 50)) {
        let f = AbMorphism::new(
            Presentation::free(m.cols),
            Presentation::free(m.rows),
            m.clone(),
        ).unwrap();
        let ker = kernel(&f);
        let image_rank = smith_normal_form(&m).rank();
        prop_assert_eq!(ker.group.rank + image_rank, m.cols);
        // cokernel rank is the corank of the image
        let coker = cokernel(&f);
        prop_assert_eq!(coker.group.rank, m.rows - image_rank);
    }

    #[test]
    fn exact_pairs_have_no_homology(m in mat_strategy(5, 20)) {
        let h = AbMorphism::new(
            Presentation::free(m.cols),
            Presentation::free(m.rows),
            m,
        ).unwrap();
        let ker = kernel(&h);
        let incl = AbMorphism::new(
            ker.presentation.clone(),
            h.source.clone(),
            ker.inclusion.clone(),
        ).unwrap();
        let sq = magnetick::abelian::subquotient(&incl, &h).unwrap();
        prop_assert!(sq.group.is_zero());
    }

    #[test]
    fn canonical_form_is_idempotent(rank in 0usize..4, tors in proptest::collection::vec(2i64..30, 0..4)) {
        let g = FgAbelianGroup::with(rank, &tors);
        let again = g.direct_sum(&FgAbelianGroup::zero());
        // canonicalizing twice changes nothing
        prop_assert_eq!(again.direct_sum(&FgAbelianGroup::zero()), again.clone());
        prop_assert_eq!(again.rank, rank);
    }

    #[test]
    fn cyclotomic_ring_laws(n in 1u64..16, a in 0u64..16, b in 0u64..16) {
        let x = Cyclotomic::root_of_unity(n, a % n.max(1));
        let y = Cyclotomic::root_of_unity(n, b % n.max(1));
        // conjugation is a ring involution
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!(x.mul(&y).conj(), x.conj().mul(&y.conj()));
        prop_assert_eq!(x.add(&y).conj(), x.conj().add(&y.conj()));
        // norm of a root of unity is 1
        prop_assert_eq!(x.mul(&x.conj()), Cyclotomic::from_integer(1));
    }
}
