//! Reference implementations used as test oracles. They share no code with
//! the library beyond its public data types.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use twh_core::dfa::Dfa;
use twh_core::regex::RegexAst;
use twh_core::semigroup::{Element, FiniteSemigroup};
use twh_core::term::{OmegaTerm, TermNode};

// ---------------------------------------------------------------------------
// Brzozowski derivatives

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Re {
    Empty,
    Eps,
    Sym(usize),
    Cat(Box<Re>, Box<Re>),
    Alt(Vec<Re>),
    Star(Box<Re>),
}

pub fn cat(a: Re, b: Re) -> Re {
    match (a, b) {
        (Re::Empty, _) | (_, Re::Empty) => Re::Empty,
        (Re::Eps, r) | (r, Re::Eps) => r,
        (Re::Cat(x, y), z) => cat(*x, cat(*y, z)),
        (a, b) => Re::Cat(Box::new(a), Box::new(b)),
    }
}

pub fn alt(parts: Vec<Re>) -> Re {
    let mut flat = Vec::new();
    for p in parts {
        match p {
            Re::Empty => {}
            Re::Alt(inner) => flat.extend(inner),
            other => flat.push(other),
        }
    }
    flat.sort();
    flat.dedup();
    match flat.len() {
        0 => Re::Empty,
        1 => flat.pop().unwrap(),
        _ => Re::Alt(flat),
    }
}

pub fn star(r: Re) -> Re {
    match r {
        Re::Empty | Re::Eps => Re::Eps,
        s @ Re::Star(_) => s,
        r => Re::Star(Box::new(r)),
    }
}

pub fn from_ast(ast: &RegexAst, letter: &dyn Fn(&str) -> usize) -> Re {
    match ast {
        RegexAst::Epsilon => Re::Eps,
        RegexAst::Literal(name) => Re::Sym(letter(name)),
        RegexAst::Concat(parts) => parts
            .iter()
            .rev()
            .fold(Re::Eps, |acc, p| cat(from_ast(p, letter), acc)),
        RegexAst::Union(parts) => alt(parts.iter().map(|p| from_ast(p, letter)).collect()),
        RegexAst::Star(inner) => star(from_ast(inner, letter)),
        RegexAst::Plus(inner) => {
            let r = from_ast(inner, letter);
            cat(r.clone(), star(r))
        }
    }
}

pub fn nullable(r: &Re) -> bool {
    match r {
        Re::Empty | Re::Sym(_) => false,
        Re::Eps | Re::Star(_) => true,
        Re::Cat(a, b) => nullable(a) && nullable(b),
        Re::Alt(rs) => rs.iter().any(nullable),
    }
}

pub fn derive(r: &Re, a: usize) -> Re {
    match r {
        Re::Empty | Re::Eps => Re::Empty,
        Re::Sym(b) => {
            if *b == a {
                Re::Eps
            } else {
                Re::Empty
            }
        }
        Re::Cat(x, y) => {
            let left = cat(derive(x, a), (**y).clone());
            if nullable(x) {
                alt(vec![left, derive(y, a)])
            } else {
                left
            }
        }
        Re::Alt(rs) => alt(rs.iter().map(|x| derive(x, a)).collect()),
        Re::Star(x) => cat(derive(x, a), r.clone()),
    }
}

pub fn matches(r: &Re, word: &[usize]) -> bool {
    let mut cur = r.clone();
    for &a in word {
        cur = derive(&cur, a);
    }
    nullable(&cur)
}

/// Deterministic automaton whose states are the (similarity-normalised)
/// derivatives of `r`. Not minimal in general.
pub struct DerivativeDfa {
    pub delta: Vec<Vec<usize>>,
    pub accepting: Vec<bool>,
}

impl DerivativeDfa {
    pub fn build(r: &Re, letters: usize, cap: usize) -> Self {
        let mut ids: HashMap<Re, usize> = HashMap::new();
        let mut states = vec![r.clone()];
        ids.insert(r.clone(), 0);
        let mut delta = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut row = Vec::with_capacity(letters);
            for a in 0..letters {
                let d = derive(&states[i], a);
                let next = match ids.get(&d) {
                    Some(&id) => id,
                    None => {
                        assert!(states.len() < cap, "derivative automaton too large");
                        ids.insert(d.clone(), states.len());
                        states.push(d);
                        states.len() - 1
                    }
                };
                row.push(next);
            }
            delta.push(row);
            i += 1;
        }
        let accepting = states.iter().map(nullable).collect();
        DerivativeDfa { delta, accepting }
    }

    pub fn run(&self, word: &[usize]) -> usize {
        word.iter().fold(0, |q, &a| self.delta[q][a])
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.accepting[self.run(word)]
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }
}

/// All words over `letters` symbols of length `<= max_len`, shortlex order.
pub fn words_up_to(letters: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * letters);
        for w in &layer {
            for a in 0..letters {
                let mut v = w.clone();
                v.push(a);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Visits every word of length `<= max_len` together with the derivative of
/// `r` by it, sharing prefixes.
pub fn for_each_derivative(
    r: &Re,
    letters: usize,
    max_len: usize,
    f: &mut dyn FnMut(&[usize], &Re),
) {
    fn go(
        r: &Re,
        word: &mut Vec<usize>,
        letters: usize,
        max_len: usize,
        f: &mut dyn FnMut(&[usize], &Re),
    ) {
        f(word, r);
        if word.len() == max_len {
            return;
        }
        for a in 0..letters {
            let d = derive(r, a);
            word.push(a);
            go(&d, word, letters, max_len, f);
            word.pop();
        }
    }
    go(r, &mut Vec::new(), letters, max_len, f);
}

// ---------------------------------------------------------------------------
// Automaton structure

pub fn reachable(delta: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; delta.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(q) = stack.pop() {
        for &p in &delta[q] {
            if !seen[p] {
                seen[p] = true;
                stack.push(p);
            }
        }
    }
    seen
}

/// Table filling: `marked[p][q]` iff some word separates `p` and `q`.
pub fn distinguishable_pairs(delta: &[Vec<usize>], accepting: &[bool]) -> Vec<Vec<bool>> {
    let n = delta.len();
    let k = delta.first().map_or(0, Vec::len);
    let mut marked: Vec<Vec<bool>> = (0..n)
        .map(|p| (0..n).map(|q| accepting[p] != accepting[q]).collect())
        .collect();
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if !marked[p][q] && (0..k).any(|a| marked[delta[p][a]][delta[q][a]]) {
                    marked[p][q] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return marked;
        }
    }
}

pub fn delta_of(d: &Dfa) -> (Vec<Vec<usize>>, Vec<bool>) {
    let n = d.num_states();
    let k = d.alphabet().len();
    let delta = (0..n)
        .map(|q| (0..k).map(|a| d.step(q, a)).collect())
        .collect();
    let acc = (0..n).map(|q| d.is_accepting(q)).collect();
    (delta, acc)
}

/// Every pair of distinct states of `d` is separated by some word.
pub fn all_states_distinguishable(d: &Dfa) -> bool {
    let (delta, acc) = delta_of(d);
    let marked = distinguishable_pairs(&delta, &acc);
    (0..delta.len()).all(|p| (0..delta.len()).all(|q| p == q || marked[p][q]))
}

/// Myhill-Nerode class of every state of a derivative automaton (classes
/// numbered by first occurrence), and the number of classes among
/// reachable states.
pub fn nerode_classes(dd: &DerivativeDfa) -> (Vec<usize>, usize) {
    let marked = distinguishable_pairs(&dd.delta, &dd.accepting);
    let reach = reachable(&dd.delta, 0);
    let n = dd.len();
    let mut class = vec![usize::MAX; n];
    let mut count = 0;
    for q in 0..n {
        if class[q] != usize::MAX {
            continue;
        }
        for p in q..n {
            if !marked[q][p] {
                class[p] = count;
            }
        }
        count += 1;
    }
    let reachable_classes: HashSet<usize> =
        (0..n).filter(|&q| reach[q]).map(|q| class[q]).collect();
    (class, reachable_classes.len())
}

/// One access word per reachable state, found breadth-first.
pub fn access_words(delta: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut word: Vec<Option<Vec<usize>>> = vec![None; delta.len()];
    word[0] = Some(Vec::new());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        for (a, &p) in delta[q].iter().enumerate() {
            if word[p].is_none() {
                let mut w = word[q].clone().unwrap();
                w.push(a);
                word[p] = Some(w);
                queue.push_back(p);
            }
        }
    }
    word.into_iter().flatten().collect()
}

// ---------------------------------------------------------------------------
// Syntactic semigroup by words

/// `Synt(L)` computed from membership alone: nonempty words are enumerated
/// breadth-first and `u`, `v` are identified when `p u t ∈ L ⇔ p v t ∈ L`
/// for all words `p`, `t`. Prefixes range over one access word per left
/// quotient; suffixes are accounted for by comparing Nerode classes.
/// Returns the shortlex-least representative of each class.
pub fn syntactic_classes_by_words(dd: &DerivativeDfa, letters: usize) -> Vec<Vec<usize>> {
    let (class, _) = nerode_classes(dd);
    let prefixes = access_words(&dd.delta);
    let signature = |u: &[usize]| -> Vec<usize> {
        prefixes
            .iter()
            .map(|p| {
                let q = u.iter().fold(dd.run(p), |s, &a| dd.delta[s][a]);
                class[q]
            })
            .collect()
    };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut reps: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    loop {
        let mut next = Vec::new();
        for w in &frontier {
            for a in 0..letters {
                let mut u = w.clone();
                u.push(a);
                if seen.insert(signature(&u)) {
                    reps.push(u.clone());
                    next.push(u);
                }
            }
        }
        // extensions of known classes by a letter are known classes
        if next.is_empty() {
            return reps;
        }
        frontier = next;
    }
}

// ---------------------------------------------------------------------------
// Powers and naive term evaluation

pub fn naive_pow(s: &FiniteSemigroup, x: Element, k: u64) -> Element {
    let mut acc = x;
    for _ in 1..k {
        acc = s.mul(acc, x);
    }
    acc
}

/// `x^(n!)` for `n = |S|`, computed as `((x^2)^3 ...)^n`.
pub fn factorial_power(s: &FiniteSemigroup, x: Element) -> Element {
    let mut y = x;
    for k in 2..=s.order() as u64 {
        y = naive_pow(s, y, k);
    }
    y
}

/// Square-and-multiply, `k >= 1`.
pub fn binary_pow(s: &FiniteSemigroup, x: Element, mut k: u64) -> Element {
    let mut base = x;
    let mut acc: Option<Element> = None;
    while k > 0 {
        if k & 1 == 1 {
            acc = Some(acc.map_or(base, |a| s.mul(a, base)));
        }
        base = s.mul(base, base);
        k >>= 1;
    }
    acc.expect("k >= 1")
}

/// `x^(2·n! - 1)`, which lies in the maximal subgroup at `x^ω` and is
/// congruent to `-1` modulo the period.
pub fn factorial_power_minus_one(s: &FiniteSemigroup, x: Element) -> Element {
    let n_fact: u64 = (1..=s.order() as u64).product();
    binary_pow(s, x, 2 * n_fact - 1)
}

/// Tree-walking evaluation with factorial powers, no sharing.
pub fn naive_eval(t: &OmegaTerm, s: &FiniteSemigroup, a: &HashMap<String, Element>) -> Element {
    match t.node() {
        TermNode::Var(name) => a[name],
        TermNode::Concat(parts) => parts
            .iter()
            .map(|p| naive_eval(p, s, a))
            .reduce(|x, y| s.mul(x, y))
            .expect("nonempty"),
        TermNode::Omega(inner) => factorial_power(s, naive_eval(inner, s, a)),
        TermNode::OmegaMinusOne(inner) => factorial_power_minus_one(s, naive_eval(inner, s, a)),
    }
}

/// First assignment (odometer order over sorted variables, last fastest)
/// under which the two sides differ, with its 0-based position.
pub fn naive_first_failure(
    lhs: &OmegaTerm,
    rhs: &OmegaTerm,
    vars: &[String],
    s: &FiniteSemigroup,
) -> Option<(u64, Vec<Element>)> {
    let n = s.order() as u64;
    let total = n.pow(vars.len() as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut values = vec![0; vars.len()];
        for slot in (0..vars.len()).rev() {
            values[slot] = (rest % n) as Element;
            rest /= n;
        }
        let a: HashMap<String, Element> =
            vars.iter().cloned().zip(values.iter().copied()).collect();
        if naive_eval(lhs, s, &a) != naive_eval(rhs, s, &a) {
            return Some((idx, values));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Shared corpora

/// Twenty expressions over at most four letters, including `ℓ_2`.
pub const REGEX_CORPUS: [&str; 20] = [
    twh_core::regex::ELL2_SOURCE,
    "a",
    "(a | b)*",
    "a+",
    "(a b)+",
    "(a b)* | b",
    "a* b a*",
    "(a | b)* a b (a | b)*",
    "a (b | c)* d",
    "(a b+ | a c+)*",
    "(b+ d | c+ d)*",
    "((a | b) (a | b))*",
    "(a | b b)* c",
    "() | a b",
    "a* b* c* d*",
    "(a b* c)+ d",
    "((a b)* c)* | d+",
    "(a | b | c)* a (a | b | c) (a | b | c)",
    "(a+ b+)+ | (c d)*",
    "(a1 | b)* a1",
];

pub fn oracle_of(ast: &RegexAst, alphabet: &twh_core::alphabet::Alphabet) -> Re {
    from_ast(ast, &|name| {
        alphabet.index_of(name).expect("letter in alphabet")
    })
}
