//! Complete deterministic automata and the regex compiler.
//!
//! Compilation goes regex -> Thompson NFA -> subset construction -> Moore
//! partition refinement. States of the result are renumbered in breadth-first
//! order from the initial state (letters taken in alphabet order), so two
//! regexes denote the same language over the same alphabet iff their compiled
//! automata are equal.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Letter};
use crate::regex::RegexAst;

pub const DEFAULT_STATE_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DfaError {
    #[error("automaton exceeds the state cap of {cap}")]
    StateCap { cap: usize },
    #[error("letter `{0}` of the expression is not in the alphabet")]
    LetterNotInAlphabet(String),
    #[error(transparent)]
    Word(#[from] AlphabetError),
    #[error("malformed automaton: {0}")]
    Malformed(String),
}

/// A complete DFA. `delta[q][a]` is the successor of state `q` on letter `a`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DfaJson", into = "DfaJson")]
pub struct Dfa {
    alphabet: Alphabet,
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct DfaJson {
    alphabet: Alphabet,
    states: usize,
    initial: usize,
    accepting: Vec<usize>,
    delta: Vec<Vec<usize>>,
}

impl From<Dfa> for DfaJson {
    fn from(d: Dfa) -> Self {
        DfaJson {
            states: d.delta.len(),
            initial: d.initial,
            accepting: (0..d.delta.len()).filter(|&q| d.accepting[q]).collect(),
            delta: d.delta,
            alphabet: d.alphabet,
        }
    }
}

impl TryFrom<DfaJson> for Dfa {
    type Error = DfaError;

    fn try_from(j: DfaJson) -> Result<Self, Self::Error> {
        if j.delta.len() != j.states {
            return Err(DfaError::Malformed("delta row count != states".into()));
        }
        let mut accepting = vec![false; j.states];
        for q in j.accepting {
            *accepting.get_mut(q).ok_or_else(|| {
                DfaError::Malformed(format!("accepting state {q} out of range"))
            })? = true;
        }
        Dfa::new(j.alphabet, j.initial, accepting, j.delta)
    }
}

impl Dfa {
    pub fn new(
        alphabet: Alphabet,
        initial: usize,
        accepting: Vec<bool>,
        delta: Vec<Vec<usize>>,
    ) -> Result<Self, DfaError> {
        let n = delta.len();
        if n == 0 {
            return Err(DfaError::Malformed("no states".into()));
        }
        if initial >= n || accepting.len() != n {
            return Err(DfaError::Malformed("initial/accepting out of range".into()));
        }
        for row in &delta {
            if row.len() != alphabet.len() || row.iter().any(|&q| q >= n) {
                return Err(DfaError::Malformed("transition table is not total".into()));
            }
        }
        Ok(Dfa {
            alphabet,
            initial,
            accepting,
            delta,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn step(&self, q: usize, a: Letter) -> usize {
        self.delta[q][a]
    }

    pub fn run(&self, from: usize, word: &[Letter]) -> usize {
        word.iter().fold(from, |q, &a| self.delta[q][a])
    }

    pub fn accepts_letters(&self, word: &[Letter]) -> bool {
        self.accepting[self.run(self.initial, word)]
    }

    /// Membership of a word written as letter names (`"abd"`, `"x3 a d"`).
    pub fn accepts(&self, word: &str) -> Result<bool, DfaError> {
        let w = self.alphabet.parse_word(word)?;
        Ok(self.accepts_letters(&w))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("dfa serializes")
    }

    /// Minimizes by Moore refinement and renumbers canonically. Unreachable
    /// states are dropped.
    pub fn minimize(&self) -> Dfa {
        let k = self.alphabet.len();
        let reach = self.bfs_order(self.initial);
        let mut class: Vec<usize> = vec![usize::MAX; self.num_states()];
        for &q in &reach {
            class[q] = usize::from(self.accepting[q]);
        }
        let mut num_classes = reach
            .iter()
            .map(|&q| class[q])
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        loop {
            let mut sig_ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next = vec![usize::MAX; self.num_states()];
            for &q in &reach {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[q]);
                sig.extend(self.delta[q].iter().map(|&r| class[r]));
                let fresh = sig_ids.len();
                next[q] = *sig_ids.entry(sig).or_insert(fresh);
            }
            let n = sig_ids.len();
            class = next;
            if n == num_classes {
                break;
            }
            num_classes = n;
        }
        // Quotient, then canonical renumbering.
        let mut rep = vec![usize::MAX; num_classes];
        for &q in &reach {
            if rep[class[q]] == usize::MAX {
                rep[class[q]] = q;
            }
        }
        let quotient = Dfa {
            alphabet: self.alphabet.clone(),
            initial: class[self.initial],
            accepting: rep.iter().map(|&q| self.accepting[q]).collect(),
            delta: rep
                .iter()
                .map(|&q| self.delta[q].iter().map(|&r| class[r]).collect())
                .collect(),
        };
        quotient.renumbered()
    }

    fn bfs_order(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![start];
        seen[start] = true;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for &r in &self.delta[q] {
                if !seen[r] {
                    seen[r] = true;
                    order.push(r);
                }
            }
        }
        order
    }

    fn renumbered(&self) -> Dfa {
        let order = self.bfs_order(self.initial);
        let mut new_id = vec![usize::MAX; self.num_states()];
        for (i, &q) in order.iter().enumerate() {
            new_id[q] = i;
        }
        Dfa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            accepting: order.iter().map(|&q| self.accepting[q]).collect(),
            delta: order
                .iter()
                .map(|&q| self.delta[q].iter().map(|&r| new_id[r]).collect())
                .collect(),
        }
    }
}

#[derive(Default)]
struct Nfa {
    eps: Vec<Vec<usize>>,
    trans: Vec<Vec<(Letter, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.trans.push(Vec::new());
        self.eps.len() - 1
    }

    /// Thompson fragment for `r`; returns (entry, exit).
    fn build(&mut self, r: &RegexAst, alphabet: &Alphabet) -> Result<(usize, usize), DfaError> {
        Ok(match r {
            RegexAst::Epsilon => {
                let s = self.state();
                (s, s)
            }
            RegexAst::Literal(l) => {
                let a = alphabet
                    .index_of(l)
                    .ok_or_else(|| DfaError::LetterNotInAlphabet(l.clone()))?;
                let (s, t) = (self.state(), self.state());
                self.trans[s].push((a, t));
                (s, t)
            }
            RegexAst::Concat(cs) => {
                let (start, mut end) = self.build(&cs[0], alphabet)?;
                for c in &cs[1..] {
                    let (s, t) = self.build(c, alphabet)?;
                    self.eps[end].push(s);
                    end = t;
                }
                (start, end)
            }
            RegexAst::Union(cs) => {
                let (s, t) = (self.state(), self.state());
                for c in cs {
                    let (cs_, ct) = self.build(c, alphabet)?;
                    self.eps[s].push(cs_);
                    self.eps[ct].push(t);
                }
                (s, t)
            }
            RegexAst::Star(c) => {
                let (s, t) = (self.state(), self.state());
                let (cs_, ct) = self.build(c, alphabet)?;
                self.eps[s].extend([cs_, t]);
                self.eps[ct].extend([cs_, t]);
                (s, t)
            }
            RegexAst::Plus(c) => {
                let (s, t) = (self.state(), self.state());
                let (cs_, ct) = self.build(c, alphabet)?;
                self.eps[s].push(cs_);
                self.eps[ct].extend([cs_, t]);
                (s, t)
            }
        })
    }

    fn closure(&self, set: &mut Vec<usize>, mark: &mut [bool]) {
        let mut stack: Vec<usize> = set.clone();
        while let Some(q) = stack.pop() {
            for &r in &self.eps[q] {
                if !mark[r] {
                    mark[r] = true;
                    set.push(r);
                    stack.push(r);
                }
            }
        }
        set.sort_unstable();
    }
}

/// Compiles `r` over `alphabet` to its minimal complete DFA.
pub fn compile_min_dfa(
    r: &RegexAst,
    alphabet: &Alphabet,
    state_cap: usize,
) -> Result<Dfa, DfaError> {
    let mut nfa = Nfa::default();
    let (start, accept) = nfa.build(r, alphabet)?;
    let n = nfa.eps.len();
    let k = alphabet.len();

    let mut mark = vec![false; n];
    let mut init = vec![start];
    mark[start] = true;
    nfa.closure(&mut init, &mut mark);

    let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut delta: Vec<Vec<usize>> = Vec::new();
    ids.insert(init.clone(), 0);
    sets.push(init);
    let mut queue = VecDeque::from([0usize]);
    while let Some(d) = queue.pop_front() {
        let mut row = Vec::with_capacity(k);
        for a in 0..k {
            mark.iter_mut().for_each(|m| *m = false);
            let mut next = Vec::new();
            for &q in &sets[d] {
                for &(b, r) in &nfa.trans[q] {
                    if b == a && !mark[r] {
                        mark[r] = true;
                        next.push(r);
                    }
                }
            }
            nfa.closure(&mut next, &mut mark);
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    let id = sets.len();
                    if id >= state_cap {
                        return Err(DfaError::StateCap { cap: state_cap });
                    }
                    ids.insert(next.clone(), id);
                    sets.push(next);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
    }
    let accepting = sets
        .iter()
        .map(|s| s.binary_search(&accept).is_ok())
        .collect();
    let dfa = Dfa {
        alphabet: alphabet.clone(),
        initial: 0,
        accepting,
        delta,
    };
    Ok(dfa.minimize())
}
