use glsm_lab::linalg::{
    cone_member, cone_membership, finite_group_elements, kernel_basis, smith_normal_form, ConeMembership,
};
use glsm_lab::{IntMatrix, PhaseVector, Rat, RatVector};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn vectors(dim: usize, count: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<i64>>> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, dim), count)
}

fn rv(xs: &[i64]) -> RatVector {
    RatVector::from_ints(xs)
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(prop::collection::vec(-5i64..=5, cols), rows).prop_map(|r| IntMatrix::new(r).unwrap())
}

proptest! {
    #[test]
    fn cone_membership_is_monotone(gens in vectors(3, 0..5), extra in vectors(3, 1..3), v in prop::collection::vec(-5i64..=5, 3)) {
        let small: Vec<RatVector> = gens.iter().map(|g| rv(g)).collect();
        let mut big = small.clone();
        big.extend(extra.iter().map(|g| rv(g)));
        if cone_member(&small, &rv(&v)).unwrap() {
            prop_assert!(cone_member(&big, &rv(&v)).unwrap());
        }
    }

    #[test]
    fn cone_certificates_verify(gens in vectors(2, 0..5), v in prop::collection::vec(-5i64..=5, 2)) {
        let gens: Vec<RatVector> = gens.iter().map(|g| rv(g)).collect();
        let v = rv(&v);
        match cone_membership(&gens, &v).unwrap() {
            ConeMembership::Inside { coefficients } => {
                prop_assert!(coefficients.0.iter().all(|c| !c.is_negative()));
                let mut sum = RatVector::zeros(2);
                for (g, c) in gens.iter().zip(&coefficients.0) {
                    sum = sum.add(&g.scale(c));
                }
                prop_assert_eq!(sum, v);
            }
            ConeMembership::Outside { separator } => {
                for g in &gens {
                    prop_assert!(!separator.dot(g).is_negative());
                }
                prop_assert!(separator.dot(&v).is_negative());
            }
        }
    }

    #[test]
    fn kernel_vectors_are_annihilated(m in (1usize..3, 1usize..6).prop_flat_map(|(r, c)| matrix(r, c))) {
        let k = kernel_basis(&m).unwrap();
        prop_assert_eq!(k.len(), m.cols() - m.rank());
        for v in &k {
            prop_assert!(m.mul_vec(v).iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn finite_groups_are_closed(m in (1usize..3, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        let Ok(elements) = finite_group_elements(&m) else {
            prop_assert!(m.rank() < m.rows());
            return Ok(());
        };
        let order: i64 = smith_normal_form(&m.transpose()).unwrap().divisors.iter().product();
        prop_assert_eq!(elements.len() as i64, order);
        prop_assert!(elements.contains(&PhaseVector::identity(m.rows())));
        for t in &elements {
            for j in 0..m.cols() {
                let col = rv(&m.column(j));
                let pairing: Rat = col.dot(&RatVector(t.entries().to_vec()));
                prop_assert!(pairing.is_integer());
            }
            prop_assert!(elements.contains(&t.inverse()));
            for s in &elements {
                prop_assert!(elements.contains(&t.mul(s)));
            }
        }
    }

    #[test]
    fn snf_reconstructs(m in (1usize..4, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        let f = smith_normal_form(&m).unwrap();
        let s = f.u.mul(&m).mul(&f.v);
        prop_assert_eq!(&s, &f.s);
        for w in f.divisors.windows(2) {
            prop_assert!(w[1] % w[0] == 0);
        }
        prop_assert!(f.divisors.iter().all(|d| !d.is_zero()));
    }
}
