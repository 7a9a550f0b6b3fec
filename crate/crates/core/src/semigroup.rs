//! Finite semigroups given by multiplication tables, together with the
//! letter-to-element map that makes them `A`-generated.
//!
//! Elements are dense indices `0..order`. Every semigroup carries a shortest
//! word witness for each element (shortlex-least over the alphabet order), and
//! the ω and ω−1 powers of every element are precomputed at construction.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Letter};
use crate::dfa::Dfa;

pub type Element = u32;

pub const DEFAULT_ORDER_CAP: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("semigroup order exceeds the cap of {cap}")]
    OrderCap { cap: usize },
    #[error("malformed semigroup: {0}")]
    Malformed(String),
    #[error("element {0} is not a product of generators")]
    NotGenerated(Element),
    #[error("element {0} is out of range")]
    OutOfRange(Element),
    #[error("element {0} is not idempotent")]
    NotIdempotent(Element),
    #[error("the empty word has no value in a semigroup without identity")]
    EmptyWord,
    #[error("multiplication is not associative: ({x}*{y})*{z} != {x}*({y}*{z})")]
    NotAssociative { x: Element, y: Element, z: Element },
    #[error(transparent)]
    Word(#[from] AlphabetError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSemigroup {
    order: usize,
    table: Vec<Element>,
    alphabet: Alphabet,
    generators: Vec<Element>,
    identity: Option<Element>,
    witnesses: Vec<Vec<Letter>>,
    omega: Vec<Element>,
    omega_minus_one: Vec<Element>,
    idempotents: Vec<Element>,
}

impl FiniteSemigroup {
    /// Builds a semigroup from a row-major table. Associativity is not checked
    /// here (see [`FiniteSemigroup::from_table_checked`]).
    ///
    /// `generators[a]` is the image of letter `a`. When `identity` is given it
    /// must be a two-sided identity; it is the only element allowed to be
    /// unreachable from the generators and its witness is the empty word.
    pub fn from_table(
        table: Vec<Element>,
        alphabet: Alphabet,
        generators: Vec<Element>,
        identity: Option<Element>,
    ) -> Result<Self, SemigroupError> {
        let order = (table.len() as f64).sqrt().round() as usize;
        if order == 0 || order * order != table.len() {
            return Err(SemigroupError::Malformed(format!(
                "table length {} is not a positive square",
                table.len()
            )));
        }
        if generators.len() != alphabet.len() {
            return Err(SemigroupError::Malformed(
                "one generator image per letter required".into(),
            ));
        }
        let n = order as Element;
        if let Some(&bad) = table.iter().chain(&generators).find(|&&x| x >= n) {
            return Err(SemigroupError::OutOfRange(bad));
        }
        if let Some(one) = identity {
            if one >= n {
                return Err(SemigroupError::OutOfRange(one));
            }
            for x in 0..order {
                if table[one as usize * order + x] != x as Element
                    || table[x * order + one as usize] != x as Element
                {
                    return Err(SemigroupError::Malformed(format!(
                        "element {one} is not a two-sided identity"
                    )));
                }
            }
        }
        let witnesses = shortest_witnesses(order, &table, &generators, identity)?;
        Ok(Self::assemble(
            order, table, alphabet, generators, identity, witnesses,
        ))
    }

    /// [`FiniteSemigroup::from_table`] followed by an associativity check.
    pub fn from_table_checked(
        table: Vec<Element>,
        alphabet: Alphabet,
        generators: Vec<Element>,
        identity: Option<Element>,
    ) -> Result<Self, SemigroupError> {
        let s = Self::from_table(table, alphabet, generators, identity)?;
        s.check_associative_light()?;
        Ok(s)
    }

    /// A semigroup given only by its table, generated by all of its elements
    /// (letter `g{i}` is element `i`). A two-sided identity, if present, is
    /// detected. Associativity is checked.
    pub fn from_cayley_table(table: Vec<Element>) -> Result<Self, SemigroupError> {
        let order = (table.len() as f64).sqrt().round() as usize;
        let alphabet =
            Alphabet::new((0..order).map(|i| format!("g{i}"))).map_err(SemigroupError::Word)?;
        let identity = (0..order).find(|&e| {
            (0..order).all(|x| {
                table[e * order + x] == x as Element && table[x * order + e] == x as Element
            })
        });
        let generators = (0..order as Element).collect();
        Self::from_table_checked(table, alphabet, generators, identity.map(|e| e as Element))
    }

    fn assemble(
        order: usize,
        table: Vec<Element>,
        alphabet: Alphabet,
        generators: Vec<Element>,
        identity: Option<Element>,
        witnesses: Vec<Vec<Letter>>,
    ) -> Self {
        let mut s = FiniteSemigroup {
            order,
            table,
            alphabet,
            generators,
            identity,
            witnesses,
            omega: Vec::new(),
            omega_minus_one: Vec::new(),
            idempotents: Vec::new(),
        };
        let (omega, omm): (Vec<_>, Vec<_>) = (0..order as Element)
            .map(|x| s.compute_omega_pair(x))
            .unzip();
        s.omega = omega;
        s.omega_minus_one = omm;
        s.idempotents = (0..order as Element)
            .filter(|&x| s.mul(x, x) == x)
            .collect();
        s
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn identity(&self) -> Option<Element> {
        self.identity
    }

    pub fn is_monoid(&self) -> bool {
        self.identity.is_some()
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        0..self.order as Element
    }

    #[inline]
    pub fn mul(&self, x: Element, y: Element) -> Element {
        self.table[x as usize * self.order + y as usize]
    }

    pub fn table(&self) -> &[Element] {
        &self.table
    }

    pub fn generator(&self, a: Letter) -> Element {
        self.generators[a]
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn witness(&self, x: Element) -> &[Letter] {
        &self.witnesses[x as usize]
    }

    pub fn witness_string(&self, x: Element) -> String {
        self.alphabet.render_word(self.witness(x))
    }

    pub fn contains(&self, x: Element) -> bool {
        (x as usize) < self.order
    }

    /// Image of a word under the generator homomorphism.
    pub fn eval_letters(&self, word: &[Letter]) -> Result<Element, SemigroupError> {
        let (&first, rest) = match word.split_first() {
            Some(p) => p,
            None => return self.identity.ok_or(SemigroupError::EmptyWord),
        };
        Ok(rest.iter().fold(self.generators[first], |acc, &a| {
            self.mul(acc, self.generators[a])
        }))
    }

    pub fn eval_word(&self, word: &str) -> Result<Element, SemigroupError> {
        let w = self.alphabet.parse_word(word)?;
        self.eval_letters(&w)
    }

    pub fn is_idempotent(&self, x: Element) -> bool {
        self.mul(x, x) == x
    }

    /// All idempotents in index order.
    pub fn idempotents(&self) -> &[Element] {
        &self.idempotents
    }

    /// `x^k` for `k >= 1` by repeated squaring.
    pub fn pow(&self, x: Element, k: u64) -> Element {
        assert!(k >= 1, "semigroup powers start at 1");
        let mut result: Option<Element> = None;
        let mut base = x;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = Some(result.map_or(base, |r| self.mul(r, base)));
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        result.unwrap()
    }

    /// Index `i` and period `p` of `x`: the least `i, p >= 1` with
    /// `x^(i+p) = x^i`.
    pub fn index_period(&self, x: Element) -> (u64, u64) {
        let mut first_seen: HashMap<Element, u64> = HashMap::new();
        let mut cur = x;
        let mut k = 1u64;
        loop {
            if let Some(&i) = first_seen.get(&cur) {
                return (i, k - i);
            }
            first_seen.insert(cur, k);
            cur = self.mul(cur, x);
            k += 1;
        }
    }

    fn compute_omega_pair(&self, x: Element) -> (Element, Element) {
        let (i, p) = self.index_period(x);
        // least multiple of p that is >= i
        let k_omega = i.div_ceil(p) * p;
        // least multiple of p that is >= max(i + 1, 2)
        let lo = (i + 1).max(2);
        let k_minus = lo.div_ceil(p) * p;
        (self.pow(x, k_omega), self.pow(x, k_minus - 1))
    }

    /// The unique idempotent power of `x`.
    #[inline]
    pub fn omega_power(&self, x: Element) -> Element {
        self.omega[x as usize]
    }

    /// The element `x^(k-1)` of the maximal subgroup of `<x>` with
    /// `x^(k-1) * x = x^ω`, where `k` is the least multiple of the period with
    /// `k >= max(index + 1, 2)`.
    #[inline]
    pub fn omega_minus_one(&self, x: Element) -> Element {
        self.omega_minus_one[x as usize]
    }

    /// Full O(n³) associativity scan.
    pub fn check_associative(&self) -> Result<(), SemigroupError> {
        for x in self.elements() {
            for y in self.elements() {
                let xy = self.mul(x, y);
                for z in self.elements() {
                    if self.mul(xy, z) != self.mul(x, self.mul(y, z)) {
                        return Err(SemigroupError::NotAssociative { x, y, z });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_associative(&self) -> bool {
        self.check_associative().is_ok()
    }

    /// Light's test: `(x·a)·y = x·(a·y)` for every generator `a`. Since every
    /// element is a product of generators (or the identity), this is
    /// equivalent to associativity and costs O(n²·|A|).
    pub fn check_associative_light(&self) -> Result<(), SemigroupError> {
        for &a in &self.generators {
            for x in self.elements() {
                let xa = self.mul(x, a);
                for y in self.elements() {
                    if self.mul(xa, y) != self.mul(x, self.mul(a, y)) {
                        return Err(SemigroupError::NotAssociative { x, y: a, z: y });
                    }
                }
            }
        }
        Ok(())
    }

    /// `S^I`: adjoins a fresh identity (index `order`) regardless of whether
    /// `S` already has one. The generators are kept unless the old identity
    /// is not a product of them, in which case every element becomes a
    /// generator as in [`FiniteSemigroup::from_cayley_table`].
    pub fn adjoin_identity(&self) -> FiniteSemigroup {
        let n = self.order;
        let m = n + 1;
        let one = n as Element;
        let mut table = vec![0; m * m];
        for x in 0..m {
            for y in 0..m {
                table[x * m + y] = if x == n {
                    y as Element
                } else if y == n {
                    x as Element
                } else {
                    self.table[x * n + y]
                };
            }
        }
        match shortest_witnesses(m, &table, &self.generators, Some(one)) {
            Ok(witnesses) => Self::assemble(
                m,
                table,
                self.alphabet.clone(),
                self.generators.clone(),
                Some(one),
                witnesses,
            ),
            // a former identity that no nonempty word reaches
            Err(_) => Self::from_cayley_table(table).expect("S^I is a monoid"),
        }
    }

    /// Restriction to the elements `keep` (which must be closed under
    /// multiplication), renumbered in the given order. The result is
    /// generated by its own elements: letter `g{i}` maps to element `i`.
    pub fn restrict(&self, keep: &[Element], identity: Option<Element>) -> FiniteSemigroup {
        let pos: HashMap<Element, Element> = keep
            .iter()
            .enumerate()
            .map(|(i, &x)| (x, i as Element))
            .collect();
        let m = keep.len();
        let mut table = Vec::with_capacity(m * m);
        for &x in keep {
            for &y in keep {
                table.push(pos[&self.mul(x, y)]);
            }
        }
        let alphabet = Alphabet::new((0..m).map(|i| format!("g{i}"))).expect("fresh names");
        let generators: Vec<Element> = (0..m as Element).collect();
        let identity = identity.map(|e| pos[&e]);
        let witnesses = (0..m)
            .map(|i| {
                if Some(i as Element) == identity {
                    Vec::new()
                } else {
                    vec![i]
                }
            })
            .collect();
        Self::assemble(m, table, alphabet, generators, identity, witnesses)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SemigroupJson::from(self)).expect("semigroup serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SemigroupError> {
        let j: SemigroupJson =
            serde_json::from_str(text).map_err(|e| SemigroupError::Malformed(e.to_string()))?;
        Self::try_from(j)
    }
}

/// BFS over right multiplication by generators; the first word found for each
/// element is its shortlex-least representative.
fn shortest_witnesses(
    order: usize,
    table: &[Element],
    generators: &[Element],
    identity: Option<Element>,
) -> Result<Vec<Vec<Letter>>, SemigroupError> {
    let mut witness: Vec<Option<Vec<Letter>>> = vec![None; order];
    let mut queue = Vec::new();
    if let Some(one) = identity {
        witness[one as usize] = Some(Vec::new());
    }
    for (a, &g) in generators.iter().enumerate() {
        if witness[g as usize].is_none() {
            witness[g as usize] = Some(vec![a]);
            queue.push(g);
        }
    }
    let mut i = 0;
    while i < queue.len() {
        let x = queue[i];
        i += 1;
        for (a, &g) in generators.iter().enumerate() {
            let y = table[x as usize * order + g as usize];
            if witness[y as usize].is_none() {
                let mut w = witness[x as usize].clone().unwrap();
                w.push(a);
                witness[y as usize] = Some(w);
                queue.push(y);
            }
        }
    }
    witness
        .into_iter()
        .enumerate()
        .map(|(x, w)| w.ok_or(SemigroupError::NotGenerated(x as Element)))
        .collect()
}

fn transformation_closure(
    d: &Dfa,
    with_identity: bool,
    cap: usize,
) -> Result<FiniteSemigroup, SemigroupError> {
    let states = d.num_states();
    let k = d.alphabet().len();
    let mut ids: HashMap<Vec<u32>, Element> = HashMap::new();
    let mut elems: Vec<Vec<u32>> = Vec::new();
    // parent element and last letter of each witness; None for roots
    let mut parent: Vec<Option<(Element, Letter)>> = Vec::new();
    let mut witnesses: Vec<Vec<Letter>> = Vec::new();

    let mut intern = |t: Vec<u32>,
                      from: Option<(Element, Letter)>,
                      word: Vec<Letter>,
                      elems: &mut Vec<Vec<u32>>,
                      parent: &mut Vec<Option<(Element, Letter)>>,
                      witnesses: &mut Vec<Vec<Letter>>|
     -> Result<Element, SemigroupError> {
        if let Some(&id) = ids.get(&t) {
            return Ok(id);
        }
        if elems.len() >= cap {
            return Err(SemigroupError::OrderCap { cap });
        }
        let id = elems.len() as Element;
        ids.insert(t.clone(), id);
        elems.push(t);
        parent.push(from);
        witnesses.push(word);
        Ok(id)
    };

    let identity = if with_identity {
        let t: Vec<u32> = (0..states as u32).collect();
        Some(intern(
            t,
            None,
            Vec::new(),
            &mut elems,
            &mut parent,
            &mut witnesses,
        )?)
    } else {
        None
    };
    let mut generators = Vec::with_capacity(k);
    for a in 0..k {
        let t: Vec<u32> = (0..states).map(|q| d.step(q, a) as u32).collect();
        generators.push(intern(
            t,
            None,
            vec![a],
            &mut elems,
            &mut parent,
            &mut witnesses,
        )?);
    }
    // right Cayley graph, filled in BFS order
    let mut right: Vec<Vec<Element>> = Vec::new();
    let mut i = 0;
    while i < elems.len() {
        let mut row = Vec::with_capacity(k);
        for a in 0..k {
            let t: Vec<u32> = elems[i]
                .iter()
                .map(|&q| d.step(q as usize, a) as u32)
                .collect();
            let mut w = witnesses[i].clone();
            w.push(a);
            row.push(intern(
                t,
                Some((i as Element, a)),
                w,
                &mut elems,
                &mut parent,
                &mut witnesses,
            )?);
        }
        right.push(row);
        i += 1;
    }

    let n = elems.len();
    let mut table = vec![0 as Element; n * n];
    for x in 0..n {
        let row = &mut table[x * n..(x + 1) * n];
        // elements are numbered in discovery order, so parents precede children
        for y in 0..n {
            row[y] = if Some(y as Element) == identity {
                x as Element
            } else {
                match parent[y] {
                    None => {
                        let a = witnesses[y][0];
                        right[x][a]
                    }
                    Some((p, a)) => right[row[p as usize] as usize][a],
                }
            };
        }
    }
    Ok(FiniteSemigroup::assemble(
        n,
        table,
        d.alphabet().clone(),
        generators,
        identity,
        witnesses,
    ))
}

/// The semigroup of transformations induced on the states of `d` by nonempty
/// words. For a minimal complete DFA this is the syntactic semigroup of its
/// language.
pub fn transition_semigroup(d: &Dfa, order_cap: usize) -> Result<FiniteSemigroup, SemigroupError> {
    transformation_closure(d, false, order_cap)
}

/// As [`transition_semigroup`] but including the empty word, whose
/// transformation is the identity element (index 0).
pub fn syntactic_monoid(d: &Dfa, order_cap: usize) -> Result<FiniteSemigroup, SemigroupError> {
    transformation_closure(d, true, order_cap)
}

#[derive(Serialize, Deserialize)]
struct SemigroupJson {
    order: usize,
    identity: Option<Element>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<Alphabet>,
    /// absent: a bare Cayley table, every element a generator
    #[serde(default)]
    generators: Option<BTreeMap<String, Element>>,
    table: Vec<Element>,
    #[serde(default)]
    witness: Option<Vec<String>>,
}

impl From<&FiniteSemigroup> for SemigroupJson {
    fn from(s: &FiniteSemigroup) -> Self {
        SemigroupJson {
            order: s.order,
            identity: s.identity,
            alphabet: Some(s.alphabet.clone()),
            generators: Some(
                s.alphabet
                    .letters()
                    .iter()
                    .cloned()
                    .zip(s.generators.iter().copied())
                    .collect(),
            ),
            table: s.table.clone(),
            witness: Some(s.elements().map(|x| s.witness_string(x)).collect()),
        }
    }
}

impl Serialize for FiniteSemigroup {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SemigroupJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FiniteSemigroup {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = SemigroupJson::deserialize(de)?;
        FiniteSemigroup::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<SemigroupJson> for FiniteSemigroup {
    type Error = SemigroupError;

    fn try_from(j: SemigroupJson) -> Result<Self, Self::Error> {
        if j.order * j.order != j.table.len() {
            return Err(SemigroupError::Malformed(
                "order does not match table".into(),
            ));
        }
        let Some(gens) = j.generators else {
            if j.alphabet.is_some() || j.witness.is_some() {
                return Err(SemigroupError::Malformed(
                    "alphabet or witness given without generators".into(),
                ));
            }
            let s = FiniteSemigroup::from_cayley_table(j.table)?;
            if j.identity.is_some() && j.identity != s.identity {
                return Err(SemigroupError::Malformed(format!(
                    "element {} is not the identity",
                    j.identity.unwrap_or_default()
                )));
            }
            return Ok(s);
        };
        let alphabet = match j.alphabet {
            Some(a) => a,
            None => Alphabet::new(gens.keys().cloned())?,
        };
        if alphabet.len() != gens.len() {
            return Err(SemigroupError::Malformed(
                "alphabet and generator map disagree".into(),
            ));
        }
        let generators = alphabet
            .letters()
            .iter()
            .map(|l| {
                gens.get(l)
                    .copied()
                    .ok_or_else(|| SemigroupError::Malformed(format!("no image for letter {l}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let s = FiniteSemigroup::from_table(j.table, alphabet, generators, j.identity)?;
        s.check_associative_light()?;
        if let Some(words) = j.witness {
            if words.len() != s.order {
                return Err(SemigroupError::Malformed(
                    "one witness per element required".into(),
                ));
            }
            for (x, w) in words.iter().enumerate() {
                if s.eval_word(w)? != x as Element {
                    return Err(SemigroupError::Malformed(format!(
                        "witness `{w}` does not evaluate to element {x}"
                    )));
                }
            }
        }
        Ok(s)
    }
}
