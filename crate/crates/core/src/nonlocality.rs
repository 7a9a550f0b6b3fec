//! The end-to-end check that `Synt(ℓ_m)` lies in `L(R_m ∩ L_m)` but not in
//! `(R_m ∩ L_m)*D`, and the embedding `Synt(ℓ_{m-1}) ↪ Synt(ℓ_m)`.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::check::{
    check_identity, check_witness, CheckMode, CheckOptions, LocalSummary, Verdict, DEFAULT_BUDGET,
};
use crate::dfa::{compile_min_dfa, DEFAULT_STATE_CAP};
use crate::embedding::{find_embedding, inclusion, EmbeddingFailure};
use crate::eval::{AssignedValue, Assignment};
use crate::regex::build_ell;
use crate::semigroup::{transition_semigroup, Element, FiniteSemigroup, DEFAULT_ORDER_CAP};
use crate::term::{build_pq, Pseudoidentity};
use crate::variety::{member_local, VarietySpec};

pub const WITNESSED: &str = "nonlocality witnessed";
pub const NOT_WITNESSED: &str = "not witnessed";
pub const INCOMPLETE: &str = "incomplete";

pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub order_cap: usize,
    pub state_cap: usize,
    /// Mode for the local half; `None` picks exhaustive for `m = 2` and
    /// sampling for larger `m`.
    pub local_mode: Option<CheckMode>,
    pub samples: u64,
    pub seed: u64,
    pub budget: u64,
    pub timings: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            order_cap: DEFAULT_ORDER_CAP,
            state_cap: DEFAULT_STATE_CAP,
            local_mode: None,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            budget: DEFAULT_BUDGET,
            timings: false,
        }
    }
}

impl PipelineConfig {
    pub fn local_mode_for(&self, m: usize) -> CheckMode {
        self.local_mode.unwrap_or(if m == 2 {
            CheckMode::Exhaustive
        } else {
            CheckMode::Sampled {
                samples: self.samples,
                seed: self.seed,
            }
        })
    }

    fn check_options(&self) -> CheckOptions {
        CheckOptions {
            budget: self.budget,
            timings: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("level {0} is out of range (need m >= {1})")]
    BadLevel(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageError {
    pub stage: String,
    pub message: String,
}

fn stage_error(stage: &str, e: impl ToString) -> StageError {
    StageError {
        stage: stage.to_string(),
        message: e.to_string(),
    }
}

/// `φ_m` on `Σ_{m-1}` as words over `A_m`.
pub fn phi(m: usize) -> Result<BTreeMap<String, String>, PipelineError> {
    if m < 2 {
        return Err(PipelineError::BadLevel(m, 2));
    }
    let mut out: BTreeMap<String, String> = [
        ("e", "b"),
        ("f", "c"),
        ("s", "a"),
        ("x1", "a"),
        ("t", "d"),
        ("y1", "d"),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect();
    if m >= 3 {
        out.insert("x2".into(), "x3a".into());
        out.insert("y2".into(), "dy3".into());
    }
    for k in 4..=m {
        out.insert(format!("x{}", k - 1), format!("x{k}"));
        out.insert(format!("y{}", k - 1), format!("y{k}"));
    }
    Ok(out)
}

/// `ℓ_m` as printed, the size of its minimal DFA, and `Synt(ℓ_m)`.
pub struct EllArtifacts {
    pub regex: String,
    pub dfa_states: usize,
    pub semigroup: FiniteSemigroup,
}

pub fn ell_semigroup(m: usize, config: &PipelineConfig) -> Result<EllArtifacts, StageError> {
    let (alphabet, ast) = build_ell(m).map_err(|e| stage_error("regex", e))?;
    let dfa =
        compile_min_dfa(&ast, &alphabet, config.state_cap).map_err(|e| stage_error("dfa", e))?;
    let semigroup =
        transition_semigroup(&dfa, config.order_cap).map_err(|e| stage_error("semigroup", e))?;
    Ok(EllArtifacts {
        regex: ast.to_string(),
        dfa_states: dfa.num_states(),
        semigroup,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfA {
    pub identity: String,
    pub verdict: Verdict,
    pub mode: String,
    /// The values assigned to the variables: words for the `φ_m` witness,
    /// element indices for a fallback search.
    pub assignment: Assignment,
    pub sides: Option<(Element, Element)>,
    /// Shortest words representing the two sides.
    pub side_words: Option<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfB {
    pub identity: String,
    pub verdict: Verdict,
    pub mode: String,
    pub assignments_checked: u64,
    pub failing_idempotent: Option<Element>,
    pub counterexample: Option<Assignment>,
    pub local: Vec<LocalSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonlocalityReport {
    pub m: usize,
    pub language: String,
    pub dfa_states: Option<usize>,
    pub semigroup_order: Option<usize>,
    pub idempotents: Option<usize>,
    pub half_a: Option<HalfA>,
    pub half_b: Option<HalfB>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<StageError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl NonlocalityReport {
    pub fn witnessed(&self) -> bool {
        self.verdict == WITNESSED
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Clock {
    on: bool,
    last: Instant,
    stages: BTreeMap<String, f64>,
}

impl Clock {
    fn lap(&mut self, stage: &str) {
        if self.on {
            let now = Instant::now();
            self.stages
                .insert(stage.to_string(), (now - self.last).as_secs_f64() * 1000.0);
            self.last = now;
        }
    }
}

fn half_a(m: usize, s: &FiniteSemigroup, config: &PipelineConfig) -> Result<HalfA, StageError> {
    let name = format!("P{k} = Q{k}", k = m - 1);
    let (p, q) = build_pq(m - 1).map_err(|e| stage_error("half-a", e))?;
    let id = Pseudoidentity::new(p, q);
    let words = phi(m).map_err(|e| stage_error("half-a", e))?;
    let assignment: Assignment = words
        .into_iter()
        .map(|(k, w)| (k, AssignedValue::Word(w)))
        .collect();
    let opts = config.check_options();
    let witness =
        check_witness(&id, s, &assignment, &opts).map_err(|e| stage_error("half-a", e))?;
    let report = if witness.fails() {
        witness
    } else {
        // the witness unexpectedly agrees: search instead
        check_identity(&id, s, CheckMode::IdempotentOptimized, &opts)
            .map_err(|e| stage_error("half-a", e))?
    };
    let side_words = report
        .sides
        .map(|(x, y)| (s.witness_string(x), s.witness_string(y)));
    Ok(HalfA {
        identity: name,
        verdict: report.verdict,
        mode: report.mode,
        assignment: report.counterexample.unwrap_or(assignment),
        sides: report.sides,
        side_words,
    })
}

fn half_b(m: usize, s: &FiniteSemigroup, config: &PipelineConfig) -> Result<HalfB, StageError> {
    let v = VarietySpec::rmlm(m).map_err(|e| stage_error("half-b", e))?;
    let mode = config.local_mode_for(m);
    let r =
        member_local(s, &v, mode, &config.check_options()).map_err(|e| stage_error("half-b", e))?;
    Ok(HalfB {
        identity: format!("U{k} = V{k}", k = m - 1),
        verdict: r.verdict,
        mode: r.mode,
        assignments_checked: r.assignments_checked,
        failing_idempotent: r.failing_idempotent,
        counterexample: r.counterexample,
        local: r.local,
    })
}

/// Runs both halves for `ℓ_m`. Resource errors end the run early and are
/// recorded in the report, which is returned either way.
pub fn verify_nonlocality(
    m: usize,
    config: &PipelineConfig,
) -> Result<NonlocalityReport, PipelineError> {
    if m < 2 {
        return Err(PipelineError::BadLevel(m, 2));
    }
    let mut clock = Clock {
        on: config.timings,
        last: Instant::now(),
        stages: BTreeMap::new(),
    };
    let mut report = NonlocalityReport {
        m,
        language: String::new(),
        dfa_states: None,
        semigroup_order: None,
        idempotents: None,
        half_a: None,
        half_b: None,
        verdict: INCOMPLETE.to_string(),
        error: None,
        timings_ms: None,
    };
    let run = |report: &mut NonlocalityReport, clock: &mut Clock| -> Result<(), StageError> {
        let art = ell_semigroup(m, config)?;
        report.language = art.regex;
        report.dfa_states = Some(art.dfa_states);
        report.semigroup_order = Some(art.semigroup.order());
        report.idempotents = Some(art.semigroup.idempotents().len());
        clock.lap("build");
        let a = half_a(m, &art.semigroup, config)?;
        report.half_a = Some(a);
        clock.lap("half_a");
        let b = half_b(m, &art.semigroup, config)?;
        report.half_b = Some(b);
        clock.lap("half_b");
        Ok(())
    };
    match run(&mut report, &mut clock) {
        Ok(()) => {
            let a_fails = report
                .half_a
                .as_ref()
                .is_some_and(|a| a.verdict == Verdict::Fails);
            let b_passes = report.half_b.as_ref().is_some_and(|b| b.verdict.passed());
            report.verdict = if a_fails && b_passes {
                WITNESSED
            } else {
                NOT_WITNESSED
            }
            .to_string();
        }
        Err(e) => {
            if report.language.is_empty() {
                if let Ok((_, ast)) = build_ell(m) {
                    report.language = ast.to_string();
                }
            }
            report.error = Some(e);
        }
    }
    if config.timings {
        report.timings_ms = Some(clock.stages);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum EmbeddingOutcome {
    InjectiveHomomorphism { images: Vec<Element> },
    Failure { failure: EmbeddingFailure },
    Error { error: StageError },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub small: String,
    pub big: String,
    pub small_order: Option<usize>,
    pub big_order: Option<usize>,
    pub letter_map: BTreeMap<String, String>,
    #[serde(flatten)]
    pub outcome: EmbeddingOutcome,
}

impl EmbeddingReport {
    pub fn is_embedding(&self) -> bool {
        matches!(self.outcome, EmbeddingOutcome::InjectiveHomomorphism { .. })
    }
}

/// `Synt(ℓ_{small}) → Synt(ℓ_{big})` along `letter_map`.
pub fn embedding_check_with<F>(
    small: usize,
    big: usize,
    config: &PipelineConfig,
    letter_map: F,
) -> Result<EmbeddingReport, PipelineError>
where
    F: Fn(&str) -> Option<String>,
{
    if small < 2 || big < 2 {
        return Err(PipelineError::BadLevel(small.min(big), 2));
    }
    let mut report = EmbeddingReport {
        small: format!("Synt(ell_{small})"),
        big: format!("Synt(ell_{big})"),
        small_order: None,
        big_order: None,
        letter_map: BTreeMap::new(),
        outcome: EmbeddingOutcome::Error {
            error: stage_error("setup", "not run"),
        },
    };
    let s = match ell_semigroup(small, config) {
        Ok(a) => a.semigroup,
        Err(error) => {
            report.outcome = EmbeddingOutcome::Error { error };
            return Ok(report);
        }
    };
    report.small_order = Some(s.order());
    report.letter_map = s
        .alphabet()
        .letters()
        .iter()
        .filter_map(|a| letter_map(a).map(|b| (a.clone(), b)))
        .collect();
    let b = match ell_semigroup(big, config) {
        Ok(a) => a.semigroup,
        Err(error) => {
            report.outcome = EmbeddingOutcome::Error { error };
            return Ok(report);
        }
    };
    report.big_order = Some(b.order());
    report.outcome = match find_embedding(&s, &b, letter_map) {
        Ok(e) => EmbeddingOutcome::InjectiveHomomorphism { images: e.images },
        Err(failure) => EmbeddingOutcome::Failure { failure },
    };
    Ok(report)
}

/// `Synt(ℓ_{m-1}) ↪ Synt(ℓ_m)` under letter inclusion, `m >= 3`.
pub fn embedding_check(
    m: usize,
    config: &PipelineConfig,
) -> Result<EmbeddingReport, PipelineError> {
    if m < 3 {
        return Err(PipelineError::BadLevel(m, 3));
    }
    embedding_check_with(m - 1, m, config, inclusion)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_chain() {
        let p2 = phi(2).unwrap();
        assert_eq!(p2.len(), 6);
        assert_eq!(p2["e"], "b");
        assert_eq!(p2["y1"], "d");
        let p3 = phi(3).unwrap();
        assert_eq!(p3["x2"], "x3a");
        assert_eq!(p3["y2"], "dy3");
        let p5 = phi(5).unwrap();
        assert_eq!(p5["x2"], "x3a");
        assert_eq!(p5["x3"], "x4");
        assert_eq!(p5["y4"], "y5");
        assert_eq!(p5.len(), 6 + 2 * 3);
        assert!(phi(1).is_err());
    }

    #[test]
    fn knast_case() {
        let r = verify_nonlocality(2, &PipelineConfig::default()).unwrap();
        assert_eq!(r.verdict, WITNESSED, "{}", r.to_json_pretty());
        let a = r.half_a.as_ref().unwrap();
        assert_eq!(a.verdict, Verdict::Fails);
        assert_eq!(a.mode, "witness");
        let b = r.half_b.as_ref().unwrap();
        assert_eq!(b.verdict, Verdict::Holds);
        assert_eq!(b.local.len(), r.idempotents.unwrap());
        assert!(r.timings_ms.is_none());
    }

    #[test]
    fn order_cap_is_reported() {
        let cfg = PipelineConfig {
            order_cap: 1,
            ..Default::default()
        };
        let r = verify_nonlocality(2, &cfg).unwrap();
        assert_eq!(r.verdict, INCOMPLETE);
        assert_eq!(r.error.as_ref().unwrap().stage, "semigroup");
        assert!(r.language.contains("a b+"));
        assert!(verify_nonlocality(1, &cfg).is_err());
    }

    #[test]
    fn identity_embedding_of_ell2() {
        let r = embedding_check_with(2, 2, &PipelineConfig::default(), inclusion).unwrap();
        let EmbeddingOutcome::InjectiveHomomorphism { images } = &r.outcome else {
            panic!("{r:?}")
        };
        assert_eq!(
            *images,
            (0..r.small_order.unwrap() as Element).collect::<Vec<_>>()
        );
    }
}
