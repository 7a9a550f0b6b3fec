//! Evaluation of ω-terms in finite semigroups.
//!
//! Terms are compiled into a flat program of binary products and ω / ω−1
//! steps. Compilation hash-conses structurally equal subterms, so a
//! subterm shared between both sides of an identity (or repeated across
//! recursion levels) is evaluated once per assignment. Each instruction
//! records the highest variable slot it depends on; the odometer search in
//! [`crate::check`] uses that to recompute only what an increment touched.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::semigroup::{Element, FiniteSemigroup, SemigroupError};
use crate::term::{OmegaTerm, Pseudoidentity, TermNode};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not assigned")]
    Unbound(String),
    #[error("variable `{var}` is assigned element {value}, outside the semigroup")]
    OutOfRange { var: String, value: Element },
    #[error("word for variable `{var}`: {source}")]
    Word {
        var: String,
        #[source]
        source: SemigroupError,
    },
}

/// A value bound to a variable: an element index or a word over the
/// semigroup's alphabet (mapped through the generator homomorphism).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AssignedValue {
    Element(Element),
    Word(String),
}

pub type Assignment = BTreeMap<String, AssignedValue>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Op {
    Var(usize),
    Mul(usize, usize),
    Omega(usize),
    OmegaMinusOne(usize),
}

/// Straight-line program computing one or more terms.
#[derive(Debug, Clone)]
pub struct Program {
    pub(crate) ops: Vec<Op>,
    /// highest variable slot each op depends on
    pub(crate) max_slot: Vec<usize>,
    pub(crate) vars: Vec<String>,
    pub(crate) outputs: Vec<usize>,
    /// variables all of whose occurrences are immediately under an ω
    pub(crate) omega_only: Vec<bool>,
}

struct Compiler {
    ops: Vec<Op>,
    max_slot: Vec<usize>,
    interned: HashMap<Op, usize>,
    by_ptr: HashMap<*const TermNode, usize>,
    slot_of: HashMap<String, usize>,
    bare: Vec<bool>,
}

impl Compiler {
    fn push(&mut self, op: Op) -> usize {
        if let Some(&id) = self.interned.get(&op) {
            return id;
        }
        let dep = match op {
            Op::Var(s) => s,
            Op::Mul(a, b) => self.max_slot[a].max(self.max_slot[b]),
            Op::Omega(a) | Op::OmegaMinusOne(a) => self.max_slot[a],
        };
        let id = self.ops.len();
        self.ops.push(op);
        self.max_slot.push(dep);
        self.interned.insert(op, id);
        id
    }

    fn compile(&mut self, t: &OmegaTerm) -> usize {
        if let Some(&id) = self.by_ptr.get(&t.ptr()) {
            return id;
        }
        let id = match t.node() {
            TermNode::Var(name) => {
                let slot = self.slot_of[name];
                self.bare[slot] = true;
                self.push(Op::Var(slot))
            }
            TermNode::Concat(cs) => {
                let mut acc = self.compile(&cs[0]);
                for c in &cs[1..] {
                    let next = self.compile(c);
                    acc = self.push(Op::Mul(acc, next));
                }
                acc
            }
            TermNode::Omega(c) => {
                let inner = match c.node() {
                    // an occurrence directly under ω does not make a variable bare
                    TermNode::Var(name) => self.push(Op::Var(self.slot_of[name])),
                    _ => self.compile(c),
                };
                self.push(Op::Omega(inner))
            }
            TermNode::OmegaMinusOne(c) => {
                let inner = self.compile(c);
                self.push(Op::OmegaMinusOne(inner))
            }
        };
        self.by_ptr.insert(t.ptr(), id);
        id
    }
}

impl Program {
    /// Compiles `terms` over the variables `vars` (slot order). Every variable
    /// of the terms must be listed.
    pub fn new(terms: &[&OmegaTerm], vars: Vec<String>) -> Self {
        let slot_of: HashMap<String, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        let mut c = Compiler {
            ops: Vec::new(),
            max_slot: Vec::new(),
            interned: HashMap::new(),
            by_ptr: HashMap::new(),
            bare: vec![false; vars.len()],
            slot_of,
        };
        let outputs = terms.iter().map(|t| c.compile(t)).collect();
        let omega_only = c.bare.iter().map(|&b| !b).collect();
        Program {
            ops: c.ops,
            max_slot: c.max_slot,
            vars,
            outputs,
            omega_only,
        }
    }

    /// Program for both sides of `id`; outputs are `[lhs, rhs]` and variable
    /// slots follow [`Pseudoidentity::variables`].
    pub fn for_identity(id: &Pseudoidentity) -> Self {
        Program::new(&[&id.lhs, &id.rhs], id.variables())
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Whether every occurrence of the variable in slot `slot` is of the form
    /// `v^ω`. Such a variable may range over idempotents only, since
    /// `{x^ω : x ∈ S} = E(S)`.
    pub fn is_omega_only(&self, slot: usize) -> bool {
        self.omega_only[slot]
    }

    #[inline]
    fn step(s: &FiniteSemigroup, op: Op, regs: &[Element], values: &[Element]) -> Element {
        match op {
            Op::Var(slot) => values[slot],
            Op::Mul(a, b) => s.mul(regs[a], regs[b]),
            Op::Omega(a) => s.omega_power(regs[a]),
            Op::OmegaMinusOne(a) => s.omega_minus_one(regs[a]),
        }
    }

    /// Evaluates every instruction for the given slot values.
    pub(crate) fn run_full(&self, s: &FiniteSemigroup, values: &[Element], regs: &mut [Element]) {
        for (i, &op) in self.ops.iter().enumerate() {
            regs[i] = Self::step(s, op, regs, values);
        }
    }

    /// Re-evaluates the instructions that depend on a slot `>= from_slot`.
    #[inline]
    pub(crate) fn run_from(
        &self,
        s: &FiniteSemigroup,
        values: &[Element],
        regs: &mut [Element],
        from_slot: usize,
    ) {
        for (i, &op) in self.ops.iter().enumerate() {
            if self.max_slot[i] >= from_slot {
                regs[i] = Self::step(s, op, regs, values);
            }
        }
    }

    pub fn eval_values(&self, s: &FiniteSemigroup, values: &[Element]) -> Vec<Element> {
        let mut regs = vec![0; self.ops.len()];
        self.run_full(s, values, &mut regs);
        self.outputs.iter().map(|&o| regs[o]).collect()
    }

    /// Resolves an assignment into slot values.
    pub fn bind(&self, s: &FiniteSemigroup, a: &Assignment) -> Result<Vec<Element>, EvalError> {
        self.vars
            .iter()
            .map(|var| {
                let value = a.get(var).ok_or_else(|| EvalError::Unbound(var.clone()))?;
                resolve_value(s, var, value)
            })
            .collect()
    }
}

pub(crate) fn resolve_value(
    s: &FiniteSemigroup,
    var: &str,
    value: &AssignedValue,
) -> Result<Element, EvalError> {
    match value {
        AssignedValue::Element(x) if s.contains(*x) => Ok(*x),
        AssignedValue::Element(x) => Err(EvalError::OutOfRange {
            var: var.to_string(),
            value: *x,
        }),
        AssignedValue::Word(w) => s.eval_word(w).map_err(|source| EvalError::Word {
            var: var.to_string(),
            source,
        }),
    }
}

/// Value of `t` in `s` under `a`.
pub fn eval(t: &OmegaTerm, s: &FiniteSemigroup, a: &Assignment) -> Result<Element, EvalError> {
    let prog = Program::new(&[t], t.content().into_iter().collect());
    let values = prog.bind(s, a)?;
    Ok(prog.eval_values(s, &values)[0])
}
