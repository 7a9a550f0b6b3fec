//! Seeded corpora of small semigroups for property suites.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::Alphabet;
use crate::dfa::Dfa;
use crate::semigroup::{transition_semigroup, Element, FiniteSemigroup};

/// Uniformly random tables of order `n`, kept when associative. Only
/// practical for `n <= 3`; associative tables are too rare beyond that.
pub fn random_tables(count: usize, n: usize, seed: u64) -> Vec<FiniteSemigroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let table: Vec<Element> = (0..n * n).map(|_| rng.gen_range(0..n as Element)).collect();
        if let Ok(s) = FiniteSemigroup::from_cayley_table(table) {
            out.push(s);
        }
    }
    out
}

/// Semigroups generated by random transformations of a small set, kept when
/// their order is at most `max_order`. Every finite semigroup arises this way.
pub fn random_transformation_semigroups(
    count: usize,
    max_order: usize,
    seed: u64,
) -> Vec<FiniteSemigroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let states = rng.gen_range(1..=4);
        let letters = rng.gen_range(1..=3);
        let alphabet = Alphabet::new((0..letters).map(|i| format!("g{i}"))).expect("fresh names");
        let delta = (0..states)
            .map(|_| (0..letters).map(|_| rng.gen_range(0..states)).collect())
            .collect();
        let d = Dfa::new(alphabet, 0, vec![false; states], delta).expect("total table");
        if let Ok(s) = transition_semigroup(&d, max_order) {
            out.push(s);
        }
    }
    out
}

pub fn direct_product(s: &FiniteSemigroup, t: &FiniteSemigroup) -> FiniteSemigroup {
    let (n, m) = (s.order(), t.order());
    let k = n * m;
    let mut table = Vec::with_capacity(k * k);
    for x in 0..k {
        for y in 0..k {
            let a = s.mul((x / m) as Element, (y / m) as Element);
            let b = t.mul((x % m) as Element, (y % m) as Element);
            table.push(a * m as Element + b);
        }
    }
    FiniteSemigroup::from_cayley_table(table).expect("products of semigroups are semigroups")
}

/// Hand-picked small semigroups: trivial, semilattices, zero and null
/// semigroups, left and right zero bands, cyclic groups and monogenic
/// semigroups with a tail.
pub fn named_small() -> Vec<(&'static str, FiniteSemigroup)> {
    let cayley = |t: Vec<Element>| FiniteSemigroup::from_cayley_table(t).expect("associative");
    let cyclic = |n: usize| {
        cayley(
            (0..n * n)
                .map(|i| ((i / n + i % n) % n) as Element)
                .collect(),
        )
    };
    vec![
        ("trivial", cayley(vec![0])),
        ("semilattice2", cayley(vec![0, 1, 1, 1])),
        ("null2", cayley(vec![1, 1, 1, 1])),
        ("left_zero2", cayley(vec![0, 0, 1, 1])),
        ("right_zero2", cayley(vec![0, 1, 0, 1])),
        ("z2", cyclic(2)),
        ("z3", cyclic(3)),
        // a, a², a³ = a⁴
        ("monogenic_3_1", cayley(vec![1, 2, 2, 2, 2, 2, 2, 2, 2])),
        // a, a², a³ with a⁴ = a²
        ("monogenic_2_2", cayley(vec![1, 2, 1, 2, 1, 2, 1, 2, 1])),
        ("chain3", cayley(vec![0, 1, 2, 1, 1, 2, 2, 2, 2])),
    ]
}

/// The corpus used by the property suites: named semigroups, their monoids
/// `S^I`, random tables of orders 1-3, random transformation semigroups of
/// order at most 8 and a few direct products, deduplicated by table.
pub fn standard_corpus(seed: u64) -> Vec<FiniteSemigroup> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut add = |s: FiniteSemigroup, out: &mut Vec<FiniteSemigroup>| {
        if s.order() <= 8 && seen.insert((s.table().to_vec(), s.identity())) {
            out.push(s);
        }
    };
    let named: Vec<FiniteSemigroup> = named_small().into_iter().map(|(_, s)| s).collect();
    for s in &named {
        add(s.clone(), &mut out);
        add(s.adjoin_identity(), &mut out);
    }
    for n in 1..=3 {
        for s in random_tables(40, n, seed ^ n as u64) {
            add(s, &mut out);
        }
    }
    for s in random_transformation_semigroups(300, 8, seed.wrapping_add(1)) {
        add(s.adjoin_identity(), &mut out);
        add(s, &mut out);
    }
    for (i, s) in named.iter().enumerate() {
        for t in &named[i..] {
            add(direct_product(s, t), &mut out);
        }
    }
    out
}

/// Monoid members of [`standard_corpus`].
pub fn monoid_corpus(seed: u64) -> Vec<FiniteSemigroup> {
    standard_corpus(seed)
        .into_iter()
        .filter(FiniteSemigroup::is_monoid)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpora_are_valid_and_seeded() {
        let a = standard_corpus(3);
        let b = standard_corpus(3);
        assert_eq!(a, b);
        assert!(a.len() > 100, "{}", a.len());
        for s in &a {
            assert!(s.order() <= 8);
            assert!(s.is_associative());
        }
        assert!(monoid_corpus(3).len() > 50);
    }

    #[test]
    fn named_orders() {
        for (name, s) in named_small() {
            match name {
                "monogenic_3_1" => assert_eq!(s.index_period(0), (3, 1)),
                "monogenic_2_2" => assert_eq!(s.index_period(0), (2, 2)),
                _ => {}
            }
        }
    }

    #[test]
    fn product_order() {
        let named = named_small();
        let p = direct_product(&named[5].1, &named[6].1);
        assert_eq!(p.order(), 6);
        assert_eq!(p.identity(), Some(0));
    }
}
