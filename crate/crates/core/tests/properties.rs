use std::sync::Arc;

use proptest::prelude::*;

use singdist_core::bezout::{self, DegreeMatrix};
use singdist_core::field::QI;
use singdist_core::geometry::{MotionGroup, MotionRep, RepKind};
use singdist_core::poly::{vars, Monomial, Polynomial, Vars};
use singdist_core::polysys;
use singdist_core::ratfunc::RationalFunc;
use singdist_core::reference::reference_instance;

fn ring() -> Vars {
    vars(&["x", "y", "z"])
}

fn poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0u16..3, 0u16..3, 0u16..3), (-5i64..=5, -5i64..=5)), 0..5).prop_map(|terms| {
        Polynomial::from_terms(
            &ring(),
            terms.into_iter().map(|((a, b, c), (re, im))| (Monomial(vec![a, b, c]), QI::from_ints(re, im))),
        )
    })
}

fn gaussian() -> impl Strategy<Value = QI> {
    (-20i64..=20, -20i64..=20, 1i64..=7).prop_map(|(re, im, d)| QI::ratio(re, d) + QI::ratio(im, d) * QI::i())
}

/// A square degree matrix with a random composition of its size into group dimensions.
fn degree_problem() -> impl Strategy<Value = (DegreeMatrix, Vec<usize>)> {
    (1usize..=6)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(1usize..=6, n)))
        .prop_map(|(n, cuts)| {
            let mut dims = Vec::new();
            let mut left = n;
            for c in cuts {
                if left == 0 {
                    break;
                }
                let d = c.min(left);
                dims.push(d);
                left -= d;
            }
            (n, dims)
        })
        .prop_flat_map(|(n, dims)| {
            let k = dims.len();
            (prop::collection::vec(prop::collection::vec(0u32..=4, k), n), Just(dims))
        })
        .prop_map(|(rows, dims)| (DegreeMatrix { rows }, dims))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn product_rule(f in poly(), g in poly(), i in 0usize..3) {
        let lhs = (&f * &g).derivative(i);
        let rhs = &(&f * &g.derivative(i)) + &(&g * &f.derivative(i));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_is_idempotent(f in poly(), k in 0u32..3, e in 0u32..4) {
        let r = ring();
        let x = Polynomial::var(&r, 0);
        let y = Polynomial::var(&r, 1);
        let atom = &(&x * &x) + &(&y * &y);
        let atoms: Arc<[Polynomial]> = vec![atom.clone()].into();
        let num = &f * &atom.pow(k);
        let once = RationalFunc::new(num, &atoms, vec![e]).reduced();
        prop_assert_eq!(once.reduced(), once);
    }

    #[test]
    fn bezout_matches_bruteforce((m, dims) in degree_problem()) {
        prop_assert_eq!(bezout::bezout_from_degrees(&m, &dims).unwrap(), bezout::bezout_bruteforce(&m, &dims).unwrap());
    }

    #[test]
    fn bezout_is_permutation_invariant((m, dims) in degree_problem(), seed in any::<u64>()) {
        let n = m.rows.len();
        let k = dims.len();
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..k).collect();
        rows.rotate_left((seed as usize) % n);
        cols.rotate_left((seed as usize / 7) % k);
        if seed % 2 == 0 {
            rows.reverse();
        }
        let permuted = DegreeMatrix {
            rows: rows.iter().map(|&r| cols.iter().map(|&c| m.rows[r][c]).collect()).collect(),
        };
        let pdims: Vec<usize> = cols.iter().map(|&c| dims[c]).collect();
        prop_assert_eq!(bezout::bezout_from_degrees(&m, &dims).unwrap(), bezout::bezout_from_degrees(&permuted, &pdims).unwrap());
    }

    #[test]
    fn single_group_is_total_degree(ds in prop::collection::vec(0u32..=4, 1..=6)) {
        let n = ds.len();
        let m = DegreeMatrix { rows: ds.iter().map(|&d| vec![d]).collect() };
        let product: u128 = ds.iter().map(|&d| d as u128).product();
        prop_assert_eq!(bezout::bezout_from_degrees(&m, &[n]).unwrap(), product);
    }
}

fn lagrange(kind: RepKind, group: MotionGroup) -> RationalFunc {
    polysys::lagrange(&reference_instance(), &MotionRep::new(kind, group).unwrap()).unwrap()
}

fn index(l: &RationalFunc, name: &str) -> usize {
    l.vars().iter().position(|v| v == name).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perr_se2_sign_symmetry(p in prop::collection::vec(gaussian(), 6)) {
        let l = lagrange(RepKind::Perr, MotionGroup::Se2);
        let mut q = p.clone();
        for name in ["a1", "a2"] {
            let i = index(&l, name);
            q[i] = -&p[i];
        }
        prop_assert_eq!(l.eval(&q), l.eval(&p));
    }

    #[test]
    fn perr_s2_rotation_symmetry(p in prop::collection::vec(gaussian(), 5)) {
        let l = lagrange(RepKind::Perr, MotionGroup::S2);
        let (a1, a2) = (index(&l, "a1"), index(&l, "a2"));
        let mut q = p.clone();
        q[a1] = -(&QI::i() * &p[a2]);
        q[a2] = &QI::i() * &p[a1];
        prop_assert_eq!(l.eval(&q), l.eval(&p));
    }

    #[test]
    fn icr_conjugation_involution(p in prop::collection::vec(gaussian(), 6)) {
        let l = lagrange(RepKind::Icr, MotionGroup::Se2);
        let mut q: Vec<QI> = p.iter().map(QI::conj).collect();
        for (a, b) in [("k", "kt"), ("tau", "taut")] {
            q.swap(index(&l, a), index(&l, b));
        }
        prop_assert_eq!(l.eval(&q), l.eval(&p).map(|v| v.conj()));
    }
}
