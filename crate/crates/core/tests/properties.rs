mod common;

use abel_core::algebra::{shuffle_words, Alphabet, Coeff, NCPolynomial, Word};
use abel_core::combinatorics::{
    bounded_partition_count, cf_coefficient, enumerate_m0, tree_count_product, tree_count_recurrence,
};
use abel_core::series::{
    expand_general, rearrangement_count, two_term_expand, verify_algebraic_equation, EquationSpec,
    MultiIndexSet,
};
use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;

fn word(max_letter: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..=max_letter, 0..=max_len)
        .prop_map(move |ix| Alphabet::new(max_letter).unwrap().word(&ix).unwrap())
}

fn polynomial(max_letter: usize, max_len: usize) -> impl Strategy<Value = NCPolynomial> {
    prop::collection::vec((word(max_letter, max_len), -5i64..=5, 1i64..=3), 0..4).prop_map(|terms| {
        NCPolynomial::from_terms(
            terms
                .into_iter()
                .map(|(w, a, b)| (w, Coeff::new(BigInt::from(a), BigInt::from(b)))),
        )
    })
}

proptest! {
    #[test]
    fn shuffle_is_commutative(p in polynomial(2, 3), q in polynomial(2, 3)) {
        prop_assert_eq!(p.shuffle(&q), q.shuffle(&p));
    }

    #[test]
    fn shuffle_is_associative(p in polynomial(2, 2), q in polynomial(2, 2), r in polynomial(2, 2)) {
        prop_assert_eq!(p.shuffle(&q).shuffle(&r), p.shuffle(&q.shuffle(&r)));
    }

    #[test]
    fn empty_word_is_the_unit(p in polynomial(3, 4)) {
        prop_assert_eq!(p.shuffle(&NCPolynomial::one()), p);
    }

    #[test]
    fn shuffle_distributes_over_sums(p in polynomial(2, 3), q in polynomial(2, 3), r in polynomial(2, 2)) {
        prop_assert_eq!(p.add(&q).shuffle(&r), p.shuffle(&r).add(&q.shuffle(&r)));
    }

    #[test]
    fn riffle_count(v in word(3, 6), w in word(3, 6)) {
        let total: u64 = shuffle_words(&v, &w).values().sum();
        prop_assert_eq!(total, common::binomial_u64((v.len() + w.len()) as u64, v.len() as u64));
    }

    #[test]
    fn recursion_matches_interleavings(v in word(2, 6), w in word(2, 6)) {
        prop_assert_eq!(shuffle_words(&v, &w), common::interleavings(&v, &w));
    }

    #[test]
    fn shuffle_is_graded(v in word(3, 5), w in word(3, 5)) {
        for u in shuffle_words(&v, &w).keys() {
            prop_assert_eq!(u.len(), v.len() + w.len());
        }
    }

    #[test]
    fn cross_law_against_operator_oracle(ix in prop::collection::vec(0usize..=4, 1..=6)) {
        let n = 4;
        let z = expand_general(&EquationSpec::new(n), ix.len()).unwrap();
        let v = Alphabet::new(n).unwrap().word(&ix).unwrap();
        let weight: BigUint = ix.iter().map(|&i| abel_core::combinatorics::binomial(n, i)).product();
        let expected = Coeff::from_integer(BigInt::from(weight * common::cf_by_operators(&v)));
        prop_assert_eq!(z.part(ix.len()).coefficient(&v), expected);
    }

    #[test]
    fn cf_coefficient_matches_operator_oracle(ix in prop::collection::vec(0usize..=4, 1..=7)) {
        let v = Alphabet::new(4).unwrap().word(&ix).unwrap();
        prop_assert_eq!(cf_coefficient(&v, true), common::cf_by_operators(&v));
    }
}

#[test]
fn solution_words_obey_degree_sum_and_letter_structure() {
    for n in 1..=4 {
        let z = expand_general(&EquationSpec::new(n), 7).unwrap();
        for k in 1..=7 {
            for (w, c) in z.part(k).terms() {
                assert_eq!(w.len(), k);
                assert_eq!(w.index_sum(), k - 1, "n={n} word {w}");
                assert_eq!(w.first().unwrap().index(), 0);
                if k >= 2 {
                    assert!(w.last().unwrap().index() >= 1, "n={n} word {w}");
                }
                assert!(c.is_integer() && *c > Coeff::zero());
            }
        }
    }
}

#[test]
fn solution_support_is_m0() {
    // every word with a nonzero coefficient is an M0 index and vice versa
    for n in 1..=3 {
        let z = expand_general(&EquationSpec::new(n), 7).unwrap();
        let alphabet = Alphabet::new(n).unwrap();
        for k in 1..=7 {
            let mut from_m0: Vec<Word> = enumerate_m0(k, n)
                .iter()
                .map(|i| i.word(&alphabet).unwrap())
                .filter(|w| !cf_coefficient(w, true).is_zero())
                .collect();
            from_m0.sort();
            let support: Vec<Word> = z.part(k).words().cloned().collect();
            assert_eq!(support, from_m0, "n={n} k={k}");
        }
    }
}

#[test]
fn algebraic_equation_holds() {
    for n in 0..=4 {
        let z = expand_general(&EquationSpec::new(n), 6).unwrap();
        assert!(verify_algebraic_equation(&z, &EquationSpec::new(n)).unwrap());
    }
}

#[test]
fn brute_force_trees_match_both_counts() {
    for n in 1..=3 {
        let recurrence = tree_count_recurrence(n, 4).unwrap();
        for k in 0..=4 {
            let trees = common::increasing_trees(n, k);
            assert_eq!(BigUint::from(trees.len()), tree_count_product(n, k), "n={n} k={k}");
            assert_eq!(BigUint::from(trees.len()), recurrence.counts[k]);
            assert!(trees.iter().all(|&leaves| leaves == (n - 1) * k + 1));
        }
    }
}

#[test]
fn permutation_count_identity() {
    for k in 1..=10 {
        for i in 1..=k {
            let via_partitions: u64 = MultiIndexSet::partitions(k, i)
                .elements
                .iter()
                .map(|l| rearrangement_count(l))
                .sum();
            let compositions = MultiIndexSet::compositions(k, i).len() as u64;
            assert_eq!(via_partitions, compositions, "k={k} i={i}");
            assert_eq!(compositions, common::binomial_u64(k as u64 - 1, i as u64 - 1));
        }
    }
}

#[test]
fn partition_sets_have_bounded_partition_size() {
    for n in 1..=5 {
        for k in 1..=10 {
            let total: usize = (1..=n.min(k)).map(|i| MultiIndexSet::partitions(k, i).len()).sum();
            assert_eq!(BigUint::from(total), bounded_partition_count(k, n));
        }
    }
}

#[test]
fn two_term_parts_sit_on_the_progression() {
    for n in 2..=4 {
        let z = two_term_expand(n, 10).unwrap();
        for d in 1..=10 {
            let on = (d - 1) % n == 0;
            assert_eq!(!z.part(d).is_zero(), on, "n={n} degree {d}");
        }
        // Z_{n+1} = a0^⧢n · a_n = n! a0...a0 a_n
        let alphabet = Alphabet::new(n).unwrap();
        let mut expected = vec![0; n];
        expected.push(n);
        assert_eq!(
            z.part(n + 1).coefficient(&alphabet.word(&expected).unwrap()),
            Coeff::from_integer(BigInt::from((1..=n as i64).product::<i64>()))
        );
        assert_eq!(z.part(n + 1).len(), 1);
    }
}
