//! Pseudoidentity checking in finite semigroups.
//!
//! Exhaustive search walks an odometer over the variables in sorted order,
//! last variable fastest. The odometer is cut into fixed-size blocks which
//! rayon workers take in any order; the smallest failing odometer position is
//! kept, so reports do not depend on scheduling or thread count. Sampling uses
//! one ChaCha stream per block for the same reason.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::eval::{AssignedValue, Assignment, EvalError, Program};
use crate::local::local_monoid;
use crate::semigroup::{Element, FiniteSemigroup};
use crate::term::Pseudoidentity;

pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

const BLOCK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CheckMode {
    Exhaustive,
    IdempotentOptimized,
    Sampled { samples: u64, seed: u64 },
}

impl CheckMode {
    pub fn name(&self) -> &'static str {
        match self {
            CheckMode::Exhaustive => "exhaustive",
            CheckMode::IdempotentOptimized => "idempotent-optimized",
            CheckMode::Sampled { .. } => "sampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    SampledNoViolation,
}

impl Verdict {
    /// Holds or no violation found.
    pub fn passed(self) -> bool {
        !matches!(self, Verdict::Fails)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(
        "assignment space of {space} exceeds the budget of {budget}; use sampled or witness mode"
    )]
    BudgetExceeded { space: u128, budget: u64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("identity has no variables")]
    NoVariables,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub budget: u64,
    /// Record wall time in reports (makes them run-dependent).
    pub timings: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            budget: DEFAULT_BUDGET,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalSummary {
    pub idempotent: Element,
    pub local_order: usize,
    pub verdict: Verdict,
    pub assignments_checked: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub identity: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Assignment>,
    /// Values of the two sides under the counterexample.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sides: Option<(Element, Element)>,
    pub assignments_checked: u64,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_idempotent: Option<Element>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub local: Vec<LocalSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl CheckReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn fails(&self) -> bool {
        self.verdict == Verdict::Fails
    }
}

/// Variable domains for one search.
struct Space<'a> {
    prog: &'a Program,
    domains: Vec<&'a [Element]>,
}

impl Space<'_> {
    fn size(&self) -> u128 {
        self.domains.iter().map(|d| d.len() as u128).product()
    }

    fn decode(&self, mut idx: u64, digits: &mut [usize]) {
        for slot in (0..digits.len()).rev() {
            let base = self.domains[slot].len() as u64;
            digits[slot] = (idx % base) as usize;
            idx /= base;
        }
    }

    fn values(&self, digits: &[usize]) -> Vec<Element> {
        digits
            .iter()
            .enumerate()
            .map(|(slot, &d)| self.domains[slot][d])
            .collect()
    }

    fn outputs_differ(&self, regs: &[Element]) -> bool {
        regs[self.prog.outputs[0]] != regs[self.prog.outputs[1]]
    }

    /// Smallest odometer index in `[0, total)` whose assignment separates the
    /// two sides.
    fn first_failure(&self, s: &FiniteSemigroup, total: u64) -> Option<u64> {
        let best = AtomicU64::new(u64::MAX);
        let blocks = total.div_ceil(BLOCK);
        (0..blocks).into_par_iter().for_each(|b| {
            let start = b * BLOCK;
            if start > best.load(Ordering::Relaxed) {
                return;
            }
            let end = (start + BLOCK).min(total);
            let k = self.domains.len();
            let mut digits = vec![0usize; k];
            self.decode(start, &mut digits);
            let mut values = self.values(&digits);
            let mut regs = vec![0; self.prog.len()];
            self.prog.run_full(s, &values, &mut regs);
            let mut idx = start;
            loop {
                if self.outputs_differ(&regs) {
                    best.fetch_min(idx, Ordering::Relaxed);
                    return;
                }
                idx += 1;
                if idx >= end {
                    return;
                }
                // advance the odometer, last slot fastest
                let mut slot = k - 1;
                loop {
                    digits[slot] += 1;
                    if digits[slot] < self.domains[slot].len() {
                        values[slot] = self.domains[slot][digits[slot]];
                        break;
                    }
                    digits[slot] = 0;
                    values[slot] = self.domains[slot][0];
                    slot -= 1;
                }
                self.prog.run_from(s, &values, &mut regs, slot);
            }
        });
        let b = best.into_inner();
        (b != u64::MAX).then_some(b)
    }

    /// Smallest sample index whose random assignment separates the sides.
    fn first_sampled_failure(
        &self,
        s: &FiniteSemigroup,
        samples: u64,
        seed: u64,
    ) -> Option<(u64, Vec<Element>)> {
        let best = AtomicU64::new(u64::MAX);
        let blocks = samples.div_ceil(BLOCK);
        let found: Vec<(u64, Vec<Element>)> = (0..blocks)
            .into_par_iter()
            .filter_map(|b| {
                let start = b * BLOCK;
                if start > best.load(Ordering::Relaxed) {
                    return None;
                }
                let end = (start + BLOCK).min(samples);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(b);
                let mut values = vec![0; self.domains.len()];
                let mut regs = vec![0; self.prog.len()];
                for idx in start..end {
                    for (slot, v) in values.iter_mut().enumerate() {
                        let d = self.domains[slot];
                        *v = d[rng.gen_range(0..d.len())];
                    }
                    self.prog.run_full(s, &values, &mut regs);
                    if self.outputs_differ(&regs) {
                        best.fetch_min(idx, Ordering::Relaxed);
                        return Some((idx, values));
                    }
                }
                None
            })
            .collect();
        found.into_iter().min_by_key(|(i, _)| *i)
    }
}

fn element_assignment(prog: &Program, values: &[Element]) -> Assignment {
    prog.variables()
        .iter()
        .cloned()
        .zip(values.iter().map(|&x| AssignedValue::Element(x)))
        .collect()
}

/// Outcome of one search over a universe.
struct Found {
    verdict: Verdict,
    counterexample: Option<Vec<Element>>,
    sides: Option<(Element, Element)>,
    checked: u64,
}

fn search(
    prog: &Program,
    s: &FiniteSemigroup,
    universe: &[Element],
    idempotents: &[Element],
    mode: CheckMode,
    budget: u64,
) -> Result<Found, CheckError> {
    let k = prog.variables().len();
    if k == 0 {
        return Err(CheckError::NoVariables);
    }
    let restrict = !matches!(mode, CheckMode::Exhaustive);
    let domains = (0..k)
        .map(|slot| {
            if restrict && prog.is_omega_only(slot) {
                idempotents
            } else {
                universe
            }
        })
        .collect();
    let space = Space { prog, domains };
    let finish = |values: Vec<Element>, checked: u64| {
        let out = prog.eval_values(s, &values);
        Found {
            verdict: Verdict::Fails,
            sides: Some((out[0], out[1])),
            counterexample: Some(values),
            checked,
        }
    };
    match mode {
        CheckMode::Exhaustive | CheckMode::IdempotentOptimized => {
            let total = space.size();
            if total > budget as u128 {
                return Err(CheckError::BudgetExceeded {
                    space: total,
                    budget,
                });
            }
            let total = total as u64;
            Ok(match space.first_failure(s, total) {
                Some(idx) => {
                    let mut digits = vec![0; k];
                    space.decode(idx, &mut digits);
                    finish(space.values(&digits), idx + 1)
                }
                None => Found {
                    verdict: Verdict::Holds,
                    counterexample: None,
                    sides: None,
                    checked: total,
                },
            })
        }
        CheckMode::Sampled { samples, seed } => {
            Ok(match space.first_sampled_failure(s, samples, seed) {
                Some((idx, values)) => finish(values, idx + 1),
                None => Found {
                    verdict: Verdict::SampledNoViolation,
                    counterexample: None,
                    sides: None,
                    checked: samples,
                },
            })
        }
    }
}

fn elapsed_ms(start: Instant, opts: &CheckOptions) -> Option<f64> {
    opts.timings.then(|| start.elapsed().as_secs_f64() * 1000.0)
}

/// Checks `id` on `s` with variables ranging over all of `s`.
pub fn check_identity(
    id: &Pseudoidentity,
    s: &FiniteSemigroup,
    mode: CheckMode,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let start = Instant::now();
    let prog = Program::for_identity(id);
    let universe: Vec<Element> = s.elements().collect();
    let found = search(&prog, s, &universe, s.idempotents(), mode, opts.budget)?;
    Ok(CheckReport {
        identity: id.to_string(),
        verdict: found.verdict,
        counterexample: found.counterexample.map(|v| element_assignment(&prog, &v)),
        sides: found.sides,
        assignments_checked: found.checked,
        mode: mode.name().to_string(),
        failing_idempotent: None,
        local: Vec::new(),
        wall_time_ms: elapsed_ms(start, opts),
    })
}

fn mix_seed(seed: u64, e: Element) -> u64 {
    // splitmix64 finalizer over (seed, idempotent)
    let mut z = seed ^ (u64::from(e) + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Checks `id` on every local monoid `eSe`, idempotents in index order.
/// Stops at the first local monoid that fails.
pub fn check_local(
    id: &Pseudoidentity,
    s: &FiniteSemigroup,
    mode: CheckMode,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let start = Instant::now();
    let prog = Program::for_identity(id);
    let mut local = Vec::new();
    let mut checked = 0u64;
    let all_pass = if matches!(mode, CheckMode::Sampled { .. }) {
        Verdict::SampledNoViolation
    } else {
        Verdict::Holds
    };
    for &e in s.idempotents() {
        let lm = local_monoid(s, e).expect("listed idempotents are idempotent");
        let m = match mode {
            CheckMode::Sampled { samples, seed } => CheckMode::Sampled {
                samples,
                seed: mix_seed(seed, e),
            },
            other => other,
        };
        let found = search(&prog, s, lm.carrier(), lm.idempotents(), m, opts.budget)?;
        checked += found.checked;
        local.push(LocalSummary {
            idempotent: e,
            local_order: lm.order(),
            verdict: found.verdict,
            assignments_checked: found.checked,
        });
        if found.verdict == Verdict::Fails {
            return Ok(CheckReport {
                identity: id.to_string(),
                verdict: Verdict::Fails,
                counterexample: found.counterexample.map(|v| element_assignment(&prog, &v)),
                sides: found.sides,
                assignments_checked: checked,
                mode: format!("local/{}", mode.name()),
                failing_idempotent: Some(e),
                local,
                wall_time_ms: elapsed_ms(start, opts),
            });
        }
    }
    Ok(CheckReport {
        identity: id.to_string(),
        verdict: all_pass,
        counterexample: None,
        sides: None,
        assignments_checked: checked,
        mode: format!("local/{}", mode.name()),
        failing_idempotent: None,
        local,
        wall_time_ms: elapsed_ms(start, opts),
    })
}

/// Evaluates both sides under a single assignment. `Fails` iff they differ;
/// otherwise the single sample found no violation.
pub fn check_witness(
    id: &Pseudoidentity,
    s: &FiniteSemigroup,
    a: &Assignment,
    opts: &CheckOptions,
) -> Result<CheckReport, CheckError> {
    let start = Instant::now();
    let prog = Program::for_identity(id);
    let values = prog.bind(s, a)?;
    let out = prog.eval_values(s, &values);
    let fails = out[0] != out[1];
    // keep only the variables of the identity, in their given form
    let used: BTreeMap<String, AssignedValue> = prog
        .variables()
        .iter()
        .map(|v| (v.clone(), a[v].clone()))
        .collect();
    Ok(CheckReport {
        identity: id.to_string(),
        verdict: if fails {
            Verdict::Fails
        } else {
            Verdict::SampledNoViolation
        },
        counterexample: fails.then_some(used),
        sides: Some((out[0], out[1])),
        assignments_checked: 1,
        mode: "witness".to_string(),
        failing_idempotent: None,
        local: Vec::new(),
        wall_time_ms: elapsed_ms(start, opts),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::term::parse_identity;

    fn right_zero() -> FiniteSemigroup {
        let ab = Alphabet::new(["p", "q"]).unwrap();
        FiniteSemigroup::from_table(vec![0, 1, 0, 1], ab, vec![0, 1], None).unwrap()
    }

    fn semilattice2() -> FiniteSemigroup {
        // {0 = top, 1 = bottom}, min
        let ab = Alphabet::new(["a", "b"]).unwrap();
        FiniteSemigroup::from_table(vec![0, 1, 1, 1], ab, vec![0, 1], Some(0)).unwrap()
    }

    #[test]
    fn right_zero_fails_commuting_omegas() {
        let id = parse_identity("(x y)^w = (y x)^w").unwrap();
        let r = check_identity(
            &id,
            &right_zero(),
            CheckMode::Exhaustive,
            &Default::default(),
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let ce = r.counterexample.unwrap();
        assert_eq!(ce["x"], AssignedValue::Element(0));
        assert_eq!(ce["y"], AssignedValue::Element(1));
        assert_eq!(r.sides, Some((1, 0)));
        // (0,0) passes, (0,1) is the second odometer position
        assert_eq!(r.assignments_checked, 2);
    }

    #[test]
    fn semilattice_satisfies_j() {
        let s = semilattice2();
        for text in ["(x y)^w = (y x)^w", "x^w x = x^w"] {
            let id = parse_identity(text).unwrap();
            for mode in [CheckMode::Exhaustive, CheckMode::IdempotentOptimized] {
                let r = check_identity(&id, &s, mode, &Default::default()).unwrap();
                assert_eq!(r.verdict, Verdict::Holds, "{text}");
            }
            let r = check_identity(
                &id,
                &s,
                CheckMode::Sampled {
                    samples: 100,
                    seed: 1,
                },
                &Default::default(),
            )
            .unwrap();
            assert_eq!(r.verdict, Verdict::SampledNoViolation);
            assert_eq!(r.assignments_checked, 100);
        }
    }

    #[test]
    fn budget_guard() {
        let id = parse_identity("x y z = z y x").unwrap();
        let opts = CheckOptions {
            budget: 7,
            ..Default::default()
        };
        assert_eq!(
            check_identity(&id, &right_zero(), CheckMode::Exhaustive, &opts).unwrap_err(),
            CheckError::BudgetExceeded {
                space: 8,
                budget: 7
            }
        );
    }

    #[test]
    fn local_failure_at_identity() {
        let m = right_zero().adjoin_identity();
        let id = parse_identity("(x y)^w = (y x)^w").unwrap();
        let r = check_local(&id, &m, CheckMode::Exhaustive, &Default::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        // idempotents 0 and 1 have trivial local monoids; 2 is the identity
        assert_eq!(r.failing_idempotent, Some(2));
        assert_eq!(r.local.len(), 3);
        assert_eq!(r.local[0].verdict, Verdict::Holds);
    }

    #[test]
    fn witness_check() {
        let id = parse_identity("(x y)^w = (y x)^w").unwrap();
        let s = right_zero();
        let a: Assignment = [
            ("x".to_string(), AssignedValue::Word("p".into())),
            ("y".to_string(), AssignedValue::Word("q".into())),
        ]
        .into();
        let r = check_witness(&id, &s, &a, &Default::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let same: Assignment = [
            ("x".to_string(), AssignedValue::Element(0)),
            ("y".to_string(), AssignedValue::Element(0)),
        ]
        .into();
        let r = check_witness(&id, &s, &same, &Default::default()).unwrap();
        assert_eq!(r.verdict, Verdict::SampledNoViolation);
    }

    #[test]
    fn report_json_shape() {
        let id = parse_identity("(x y)^w = (y x)^w").unwrap();
        let r = check_identity(
            &id,
            &right_zero(),
            CheckMode::Exhaustive,
            &Default::default(),
        )
        .unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["verdict"], "fails");
        assert_eq!(v["counterexample"], serde_json::json!({"x": 0, "y": 1}));
        assert_eq!(v["assignments_checked"], 2);
        assert_eq!(v["mode"], "exhaustive");
        assert!(v.get("wall_time_ms").is_none());
    }
}
