use invlim_core::arith::{rat, snf};
use invlim_core::systems::{Division, EventuallyIntegerSeq};
use invlim_core::{Atom, AtomElement, IntMatrix, Integer, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(-25i64..=25, c), r).prop_map(|rows| {
            IntMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(Integer::from).collect()).collect())
                .unwrap()
        })
    })
}

fn atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        Just(Atom::ZZ),
        (2i64..=12).prop_map(|d| Atom::cyclic(d).unwrap()),
        Just(Atom::QQ),
        Just(Atom::QmodZ),
        prop_oneof![Just(2i64), Just(3), Just(5)].prop_map(|p| Atom::pruefer(p).unwrap()),
    ]
}

/// A value of the right kind for `atom`.
fn value(atom: &Atom) -> BoxedStrategy<Rational> {
    match atom {
        Atom::ZZ | Atom::Cyclic(_) => (-40i64..=40).prop_map(|n| rat(n, 1)).boxed(),
        Atom::Pruefer(p) => {
            let p = i64::try_from(p).unwrap();
            (-40i64..=40, 0u32..=4).prop_map(move |(n, e)| rat(n, p.pow(e))).boxed()
        }
        _ => (-40i64..=40, 1i64..=30).prop_map(|(n, d)| rat(n, d)).boxed(),
    }
}

fn atom_with_values() -> impl Strategy<Value = (AtomElement, AtomElement, AtomElement)> {
    atom().prop_flat_map(|a| {
        let v = value(&a);
        (Just(a), v.clone(), v.clone(), v).prop_map(|(a, x, y, z)| {
            let e = |q| AtomElement::new(a.clone(), q).unwrap();
            (e(x), e(y), e(z))
        })
    })
}

proptest! {
    #[test]
    fn snf_diagonalizes(a in matrix()) {
        let r = snf(&a);
        prop_assert_eq!(&(&r.u * &a) * &r.v, r.s.clone());
        prop_assert!(r.u.det().unwrap().abs().is_one());
        prop_assert!(r.v.det().unwrap().abs().is_one());
        let d = r.s.diagonal();
        for w in d.windows(2) {
            let ok = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            prop_assert!(ok);
        }
        prop_assert!(d.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn snf_of_transpose_has_same_factors(a in matrix()) {
        prop_assert_eq!(snf(&a).invariant_factors(), snf(&a.transpose()).invariant_factors());
    }

    #[test]
    fn atom_group_laws((x, y, z) in atom_with_values()) {
        let zero = AtomElement::zero(x.atom().clone());
        prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
        prop_assert_eq!(x.add(&y).unwrap().add(&z).unwrap(), x.add(&y.add(&z).unwrap()).unwrap());
        prop_assert_eq!(x.add(&zero).unwrap(), x.clone());
        prop_assert!(x.add(&x.neg()).unwrap().is_zero());
        prop_assert_eq!(x.sub(&y).unwrap(), x.add(&y.neg()).unwrap());
    }

    #[test]
    fn scalars_distribute((x, y, _) in atom_with_values(), n in -9i64..=9) {
        let n = Integer::from(n);
        prop_assert_eq!(x.add(&y).unwrap().scalar_mul(&n), x.scalar_mul(&n).add(&y.scalar_mul(&n)).unwrap());
    }

    #[test]
    fn division_witnesses((x, _, _) in atom_with_values(), n in 1i64..=12) {
        let n = Integer::from(n);
        match x.divide(&n) {
            Ok(q) => prop_assert_eq!(q.scalar_mul(&n), x.clone()),
            Err(_) => prop_assert!(!x.atom().is_divisible()),
        }
    }

    #[test]
    fn sequence_division_law(
        head in prop::collection::vec((-20i64..=20, 1i64..=12), 0..5),
        tail in -30i64..=30,
        k in 1i64..=12,
    ) {
        let head: Vec<Rational> = head.into_iter().map(|(n, d)| rat(n, d)).collect();
        let s = EventuallyIntegerSeq::new(head, tail.into());
        let k = Integer::from(k);
        match s.divide(&k).unwrap() {
            Division::Quotient(q) => {
                prop_assert!((Integer::from(tail) % &k).is_zero());
                prop_assert_eq!(q.scalar_mul(&k), s);
            }
            Division::Refuted { .. } => prop_assert!(!(Integer::from(tail) % &k).is_zero()),
        }
    }
}
