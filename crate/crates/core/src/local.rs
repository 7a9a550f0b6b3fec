//! Local monoids `eSe` of a finite semigroup.

use crate::semigroup::{Element, FiniteSemigroup, SemigroupError};

/// The monoid `eSe` for an idempotent `e`, kept as a subset of its parent.
#[derive(Debug, Clone)]
pub struct LocalMonoid<'a> {
    parent: &'a FiniteSemigroup,
    idempotent: Element,
    carrier: Vec<Element>,
    idempotents: Vec<Element>,
}

pub fn local_monoid(s: &FiniteSemigroup, e: Element) -> Result<LocalMonoid<'_>, SemigroupError> {
    if !s.contains(e) {
        return Err(SemigroupError::OutOfRange(e));
    }
    if !s.is_idempotent(e) {
        return Err(SemigroupError::NotIdempotent(e));
    }
    let mut member = vec![false; s.order()];
    for x in s.elements() {
        member[s.mul(s.mul(e, x), e) as usize] = true;
    }
    let carrier: Vec<Element> = s.elements().filter(|&x| member[x as usize]).collect();
    let idempotents = carrier
        .iter()
        .copied()
        .filter(|&x| s.is_idempotent(x))
        .collect();
    Ok(LocalMonoid {
        parent: s,
        idempotent: e,
        carrier,
        idempotents,
    })
}

impl<'a> LocalMonoid<'a> {
    pub fn parent(&self) -> &'a FiniteSemigroup {
        self.parent
    }

    /// The idempotent `e`, which is the identity of `eSe`.
    pub fn identity(&self) -> Element {
        self.idempotent
    }

    /// Elements of `eSe` (parent indices, ascending).
    pub fn carrier(&self) -> &[Element] {
        &self.carrier
    }

    pub fn order(&self) -> usize {
        self.carrier.len()
    }

    /// Idempotents of `eSe`, i.e. `E(S) ∩ eSe`.
    pub fn idempotents(&self) -> &[Element] {
        &self.idempotents
    }

    pub fn contains(&self, x: Element) -> bool {
        self.carrier.binary_search(&x).is_ok()
    }

    /// Checks closure under the parent product and that `e` is a two-sided
    /// identity on the carrier.
    pub fn verify(&self) -> bool {
        let s = self.parent;
        let e = self.idempotent;
        self.carrier.iter().all(|&u| {
            s.mul(s.mul(e, u), e) == u
                && s.mul(e, u) == u
                && s.mul(u, e) == u
                && self.carrier.iter().all(|&v| self.contains(s.mul(u, v)))
        })
    }

    /// `eSe` as a standalone monoid (elements renumbered in carrier order).
    pub fn to_semigroup(&self) -> FiniteSemigroup {
        self.parent.restrict(&self.carrier, Some(self.idempotent))
    }
}
