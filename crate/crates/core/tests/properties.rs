//! Property-based invariants for the arithmetic, polynomial, lattice and
//! Groebner layers.

use proptest::prelude::*;

use stci_core::exactmath::{ext_gcd, factorize, gcd, PrimeField};
use stci_core::family::{equations, phi, FamilyParams};
use stci_core::groebner::{buchberger, BuchbergerConfig, Ideal};
use stci_core::lattice::{kernel_vectors, rank, IntMatrix};
use stci_core::polyring::{
    binomial_from_vector, divide, BinomialVector, CoeffField, Coeff, Monomial, Polynomial, Ring,
    TermOrder,
};
use stci_core::Int;

fn monomial_strategy(nvars: usize, max_exp: u64) -> impl Strategy<Value = Monomial> {
    proptest::collection::vec(0..=max_exp, nvars).prop_map(Monomial::from_exponents)
}

fn order_strategy(nvars: usize) -> impl Strategy<Value = TermOrder> {
    prop_oneof![
        Just(TermOrder::Lex),
        Just(TermOrder::Grevlex),
        proptest::collection::btree_set(0..nvars, 1..nvars)
            .prop_map(TermOrder::eliminating),
    ]
}

proptest! {
    #[test]
    fn term_orders_are_multiplicative_with_one_minimal(
        a in monomial_strategy(4, 5),
        b in monomial_strategy(4, 5),
        c in monomial_strategy(4, 5),
        order in order_strategy(4),
    ) {
        use std::cmp::Ordering;
        let one = Monomial::one(4);
        // 1 is minimal
        prop_assert_ne!(order.cmp(&one, &a), Ordering::Greater);
        // multiplicativity: a < b implies a*c < b*c
        let ab = order.cmp(&a, &b);
        let acbc = order.cmp(&a.mul(&c), &b.mul(&c));
        prop_assert_eq!(ab, acbc);
        // antisymmetry
        prop_assert_eq!(order.cmp(&b, &a), ab.reverse());
    }

    #[test]
    fn ext_gcd_identity(a in -100_000i64..100_000, b in -100_000i64..100_000) {
        let (ai, bi) = (Int::from(a), Int::from(b));
        let (g, s, t) = ext_gcd(&ai, &bi);
        prop_assert_eq!(&s * &ai + &t * &bi, g.clone());
        prop_assert_eq!(g, gcd(&ai, &bi));
    }

    #[test]
    fn factorize_recomposes(a in 1u64..1_000_000) {
        let fs = factorize(&Int::from(a)).unwrap();
        let mut back = Int::from(1u32);
        for (p, k) in &fs {
            for _ in 0..*k {
                back *= p;
            }
        }
        prop_assert_eq!(back, Int::from(a));
        for w in fs.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
    }

    #[test]
    fn division_postcondition(
        seed_p in proptest::collection::vec((monomial_strategy(4, 4), -9i64..=9), 1..6),
        seed_d in proptest::collection::vec((monomial_strategy(4, 3), -9i64..=9), 1..3),
        order in order_strategy(4),
    ) {
        let ring = Ring::xy(2, CoeffField::Q);
        let to_poly = |terms: Vec<(Monomial, i64)>| {
            Polynomial::from_terms(
                ring.clone(),
                terms.into_iter().map(|(m, c)| (m, ring.field().from_int(&Int::from(c)))),
            )
        };
        let p = to_poly(seed_p);
        let divisors: Vec<Polynomial> = seed_d
            .into_iter()
            .map(|t| to_poly(vec![t]))
            .filter(|d| !d.is_zero())
            .collect();
        prop_assume!(!divisors.is_empty());
        let (qs, r) = divide(&p, &divisors, &order);
        // p - sum q_i d_i - r == 0, re-checked by plain arithmetic
        let mut acc = r.clone();
        for (q, d) in qs.iter().zip(&divisors) {
            acc = &acc + &(q * d);
        }
        prop_assert_eq!(acc, p);
        // no term of r is divisible by any divisor lead
        for (m, _) in r.terms() {
            for d in &divisors {
                let (dm, _) = d.leading(&order).unwrap();
                prop_assert!(!dm.divides(m));
            }
        }
    }

    #[test]
    fn text_round_trips(seed in proptest::collection::vec((monomial_strategy(6, 4), -9i64..=9), 1..6)) {
        for field in [CoeffField::Q, CoeffField::fp(7).unwrap()] {
            let ring = Ring::xy(3, field.clone());
            let p = Polynomial::from_terms(
                ring.clone(),
                seed.iter().map(|(m, c)| (m.clone(), field.from_int(&Int::from(*c)))),
            );
            for order in [TermOrder::Lex, TermOrder::Grevlex] {
                let text = p.to_text(&order);
                let back = Polynomial::parse(&ring, &text).unwrap();
                prop_assert_eq!(&back, &p, "through {}", text);
            }
        }
    }

    #[test]
    fn kernel_vectors_are_annihilated(
        entries in proptest::collection::vec(-6i64..=6, 8),
    ) {
        let m = IntMatrix::from_rows(&[
            entries[0..4].to_vec(),
            entries[4..8].to_vec(),
        ]);
        let kernel = kernel_vectors(&m);
        prop_assert_eq!(kernel.len(), 4 - rank(&m));
        for v in &kernel {
            let image = m.mul_vec(v);
            prop_assert!(image.iter().all(|x| x == &Int::from(0)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn groebner_members_and_radicals(
        seed in proptest::collection::vec((monomial_strategy(4, 3), monomial_strategy(4, 3)), 2..4),
    ) {
        let ring = Ring::xy(2, CoeffField::Q);
        let gens: Vec<Polynomial> = seed
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| {
                Polynomial::from_terms(
                    ring.clone(),
                    vec![
                        (a, ring.field().one()),
                        (b, ring.field().neg(&ring.field().one())),
                    ],
                )
            })
            .collect();
        prop_assume!(!gens.is_empty());
        let ideal = Ideal::new(ring.clone(), gens.clone()).unwrap();
        for g in &gens {
            // generators are members, and membership implies radical membership
            prop_assert!(ideal.member(g, &TermOrder::Grevlex).unwrap());
            prop_assert!(ideal.radical_member(g).unwrap());
        }
        // the product of two generators is a member
        if gens.len() >= 2 {
            let prod = &gens[0] * &gens[1];
            prop_assert!(ideal.member(&prod, &TermOrder::Grevlex).unwrap());
        }
    }

    #[test]
    fn groebner_reduced_basis_shuffle_invariant(
        seed in proptest::collection::vec((monomial_strategy(4, 3), monomial_strategy(4, 3)), 2..5),
        moves in proptest::collection::vec((0usize..8, 0usize..8), 0..8),
    ) {
        let ring = Ring::xy(2, CoeffField::Q);
        let mut gens: Vec<Polynomial> = seed
            .into_iter()
            .filter(|(a, b)| a != b)
            .map(|(a, b)| {
                Polynomial::from_terms(
                    ring.clone(),
                    vec![
                        (a, ring.field().one()),
                        (b, ring.field().neg(&ring.field().one())),
                    ],
                )
            })
            .collect();
        prop_assume!(!gens.is_empty());
        let config = BuchbergerConfig::default();
        let reference = buchberger(&gens, &TermOrder::Grevlex, &config).unwrap();
        for (a, b) in moves {
            let (a, b) = (a % gens.len(), b % gens.len());
            gens.swap(a, b);
        }
        let shuffled = buchberger(&gens, &TermOrder::Grevlex, &config).unwrap();
        prop_assert_eq!(reference, shuffled);
    }

    #[test]
    fn relation_binomials_vanish_on_parametrized_points(
        useed in proptest::collection::vec(0u64..11, 3),
        combo in proptest::collection::vec(-2i64..=2, 3),
    ) {
        // any integer combination of kernel basis vectors is a relation and
        // its binomial vanishes on phi(u)
        let params = FamilyParams::example1();
        let matrix = stci_core::family::exponent_matrix(&params);
        let kernel = kernel_vectors(&matrix);
        let mut flat = vec![Int::from(0); 6];
        for (c, v) in combo.iter().zip(&kernel) {
            for (slot, x) in flat.iter_mut().zip(v) {
                *slot += Int::from(*c) * x;
            }
        }
        let v = BinomialVector::from_flat(&flat);
        prop_assume!(!v.is_zero());
        prop_assert!(stci_core::lattice::check_relation(&v, &params).unwrap());

        let f11 = PrimeField::new(11).unwrap();
        let ring = Ring::xy(3, CoeffField::Fp(f11.clone()));
        let b = binomial_from_vector(&ring, &v).unwrap();
        let u: Vec<_> = useed.iter().map(|&x| f11.elem(x)).collect();
        let w = phi(&params, &u).unwrap();
        prop_assert_eq!(b.evaluate(&w).unwrap().value(), 0);
    }

    #[test]
    fn equation_sets_vanish_for_sampled_families(
        d in proptest::collection::vec(1u64..=7, 2),
        f in proptest::collection::vec(1u64..=7, 2),
        g in proptest::collection::vec(1u64..=7, 2),
        h in proptest::collection::vec(1u64..=7, 2),
        useed in proptest::collection::vec(0u64..5, 3),
    ) {
        let params = FamilyParams::new(3, d, f, g, h).unwrap();
        prop_assume!(params.is_valid());
        let f5 = PrimeField::new(5).unwrap();
        let field = CoeffField::Fp(f5.clone());
        let eqs = equations(&params, &field).unwrap();
        let u: Vec<_> = useed.iter().map(|&x| f5.elem(x)).collect();
        let w = phi(&params, &u).unwrap();
        for (_, e) in eqs.iter() {
            prop_assert_eq!(e.evaluate(&w).unwrap().value(), 0);
        }
    }
}

// structural spot checks that don't need proptest

#[test]
fn coeff_field_embeds_integers() {
    let f5 = CoeffField::fp(5).unwrap();
    assert_eq!(f5.from_int(&Int::from(-3)), Coeff::Fp(2));
    assert_eq!(
        CoeffField::Q.from_int(&Int::from(-3)),
        Coeff::Q(stci_core::Rat::from_integer(Int::from(-3)))
    );
}
