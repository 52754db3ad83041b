use glsm_lab::git::{
    chambers, covers, is_semistable, is_strongly_regular, semistable_supports, tau_from_ints, unstable_subspaces,
    Level, Support,
};
use glsm_lab::rational::rat;
use glsm_lab::{IntMatrix, RatVector};
use proptest::prelude::*;

fn weights() -> impl Strategy<Value = IntMatrix> {
    (1usize..=2, 1usize..=5).prop_flat_map(|(m, n)| {
        prop::collection::vec(prop::collection::vec(-5i64..=5, n), m).prop_map(|r| IntMatrix::new(r).unwrap())
    })
}

fn model() -> impl Strategy<Value = (IntMatrix, Level)> {
    weights().prop_flat_map(|q| {
        let m = q.rows();
        (Just(q), prop::collection::vec(-3i64..=3, m)).prop_map(|(q, t)| (q, tau_from_ints(&t)))
    })
}

fn all_supports(n: usize) -> impl Iterator<Item = Support> {
    (0u64..(1 << n)).map(Support::from_mask)
}

proptest! {
    #[test]
    fn semistability_is_upward_closed((q, tau) in model()) {
        let n = q.cols();
        for s in all_supports(n) {
            if is_semistable(&q, &tau, &s).unwrap() {
                for j in 0..n {
                    let bigger = s.union(&Support::new(vec![j]));
                    prop_assert!(is_semistable(&q, &tau, &bigger).unwrap());
                }
            }
        }
    }

    #[test]
    fn minimal_family_classifies((q, tau) in model()) {
        let minimal = semistable_supports(&q, &tau).unwrap();
        for s in all_supports(q.cols()) {
            prop_assert_eq!(covers(&minimal, &s), is_semistable(&q, &tau, &s).unwrap());
        }
    }

    #[test]
    fn maximal_unstable_are_maximal((q, tau) in model()) {
        let n = q.cols();
        for s in unstable_subspaces(&q, &tau).unwrap() {
            prop_assert!(!is_semistable(&q, &tau, &s).unwrap());
            for j in s.complement(n).indices() {
                let bigger = s.union(&Support::new(vec![*j]));
                prop_assert!(is_semistable(&q, &tau, &bigger).unwrap());
            }
        }
    }

    #[test]
    fn strongly_regular_minimal_supports_are_bases((q, tau) in model()) {
        if is_strongly_regular(&q, &tau).unwrap().strongly_regular {
            let minimal = semistable_supports(&q, &tau).unwrap();
            prop_assert!(!minimal.is_empty());
            for s in minimal {
                prop_assert_eq!(s.len(), q.rows());
                prop_assert_eq!(q.select_columns(s.indices()).rank(), q.rows());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn chamber_samples_share_the_family(q in weights(), seeds in prop::collection::vec((1i64..50, 1i64..50, 1i64..7), 100)) {
        let Ok(found) = chambers(&q) else { return Ok(()); };
        for c in &found {
            let samples: Vec<RatVector> = match c.walls.as_slice() {
                [w] => seeds.iter().map(|&(a, b, _)| {
                    let sign = &c.representative[0] - &w[0];
                    RatVector(vec![&w[0] + sign * glsm_lab::rational::ratio(a, b)])
                }).collect(),
                [a, b] => seeds.iter().map(|&(x, y, z)| {
                    a.scale(&glsm_lab::rational::ratio(x, z)).add(&b.scale(&glsm_lab::rational::ratio(y, z)))
                }).collect(),
                _ => vec![c.representative.clone()],
            };
            for s in samples {
                prop_assert!(c.contains(&s) || c.walls.is_empty());
                let fam = semistable_supports(&q, &Level(s)).unwrap();
                prop_assert_eq!(&fam, &c.minimal_semistable);
            }
        }
    }
}

#[test]
fn zero_level_makes_everything_semistable() {
    let q = IntMatrix::new(vec![vec![1, 1, 1, 1, 1, -5]]).unwrap();
    let tau = Level(RatVector(vec![rat(0)]));
    assert_eq!(semistable_supports(&q, &tau).unwrap(), vec![Support::empty()]);
}
