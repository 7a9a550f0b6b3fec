//! Content functions: homomorphisms onto the free semilattice of letter sets.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::alphabet::Letter;
use crate::semigroup::{Element, FiniteSemigroup};

/// Letter sets indexed by element, stored as bit masks over the alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentMap {
    masks: Vec<u128>,
}

impl ContentMap {
    pub fn mask(&self, x: Element) -> u128 {
        self.masks[x as usize]
    }

    pub fn letters(&self, x: Element) -> BTreeSet<Letter> {
        let m = self.mask(x);
        (0..128).filter(|i| m >> i & 1 == 1).collect()
    }
}

/// Two words with the same value but different letter sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoContentFunction {
    pub element: Element,
    pub word: String,
    pub other_word: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Content {
    Map(ContentMap),
    None(NoContentFunction),
}

fn word_mask(word: &[Letter]) -> u128 {
    word.iter().fold(0, |m, &a| m | 1u128 << a)
}

/// Assigns every element the letter set of its witness word and verifies that
/// `c(x·a) = c(x) ∪ {a}` for every letter `a` and element `x`; by induction on
/// word length that makes `c` well defined on all of `A⁺` (or `A*` for a
/// monoid, where the identity gets `∅`).
///
/// # Panics
/// For alphabets with more than 128 letters.
pub fn content_map(s: &FiniteSemigroup) -> Content {
    assert!(
        s.alphabet().len() <= 128,
        "content masks hold at most 128 letters"
    );
    let masks: Vec<u128> = s.elements().map(|x| word_mask(s.witness(x))).collect();
    for a in 0..s.alphabet().len() {
        let g = s.generator(a);
        for x in s.elements() {
            let y = s.mul(x, g);
            let expected = masks[x as usize] | 1u128 << a;
            if masks[y as usize] != expected {
                let mut via = s.witness(x).to_vec();
                via.push(a);
                return Content::None(NoContentFunction {
                    element: y,
                    word: s.witness_string(y),
                    other_word: s.alphabet().render_word(&via),
                });
            }
        }
    }
    Content::Map(ContentMap { masks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;

    #[test]
    fn free_semilattice_has_identity_content() {
        // {a}=0, {b}=1, {a,b}=2, ∅=3 under union
        let ab = Alphabet::new(["a", "b"]).unwrap();
        let sets = [0b01u8, 0b10, 0b11, 0b00];
        let idx = |m: u8| sets.iter().position(|&s| s == m).unwrap() as Element;
        let table: Vec<Element> = (0..16).map(|i| idx(sets[i / 4] | sets[i % 4])).collect();
        let s = FiniteSemigroup::from_table_checked(table, ab, vec![0, 1], Some(3)).unwrap();
        let Content::Map(c) = content_map(&s) else {
            panic!("expected a content function")
        };
        for x in s.elements() {
            assert_eq!(c.mask(x), sets[x as usize] as u128);
        }
        for x in s.elements() {
            for y in s.elements() {
                assert_eq!(c.mask(s.mul(x, y)), c.mask(x) | c.mask(y));
            }
        }
    }

    #[test]
    fn right_zero_has_no_content_function() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        // p=0, q=1, xy = y
        let s = FiniteSemigroup::from_table(vec![0, 1, 0, 1], ab, vec![0, 1], None).unwrap();
        assert_eq!(
            content_map(&s),
            Content::None(NoContentFunction {
                element: 0,
                word: "a".into(),
                other_word: "ba".into()
            })
        );
    }

    #[test]
    fn trivial_semigroup() {
        let s = FiniteSemigroup::from_table(vec![0], Alphabet::new(["a"]).unwrap(), vec![0], None)
            .unwrap();
        let Content::Map(c) = content_map(&s) else {
            panic!()
        };
        assert_eq!(c.letters(0), BTreeSet::from([0]));
    }
}
