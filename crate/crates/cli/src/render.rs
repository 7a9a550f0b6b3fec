//! Plain-text renderings for `--format table`.

use std::fmt::Write;

use twh_core::check::CheckReport;
use twh_core::eval::{AssignedValue, Assignment};
use twh_core::nonlocality::{EmbeddingOutcome, EmbeddingReport, NonlocalityReport};

use crate::cache::SyntacticEntry;

fn assignment(a: &Assignment) -> String {
    a.iter()
        .map(|(k, v)| match v {
            AssignedValue::Element(x) => format!("{k}={x}"),
            AssignedValue::Word(w) => format!("{k}=\"{w}\""),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn verdict(v: impl serde::Serialize) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn syntactic(e: &SyntacticEntry) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "regex:       {}", e.provenance.regex);
    let _ = writeln!(out, "alphabet:    {}", e.alphabet.join(" "));
    let _ = writeln!(out, "dfa states:  {}", e.dfa_states);
    let _ = writeln!(
        out,
        "semigroup:   order {}, {} idempotents",
        e.semigroup.order(),
        e.semigroup.idempotents().len()
    );
    let _ = write!(
        out,
        "monoid:      order {}, {} idempotents",
        e.monoid.order(),
        e.monoid.idempotents().len()
    );
    out
}

pub fn check(r: &CheckReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "identity:    {}", r.identity);
    let _ = writeln!(out, "verdict:     {}", verdict(r.verdict));
    let _ = writeln!(out, "mode:        {}", r.mode);
    let _ = write!(out, "assignments: {}", r.assignments_checked);
    if let Some(e) = r.failing_idempotent {
        let _ = write!(out, "\nidempotent:  {e}");
    }
    if let Some(a) = &r.counterexample {
        let _ = write!(out, "\ncounter:     {}", assignment(a));
    }
    if let Some((x, y)) = r.sides {
        let _ = write!(out, "\nsides:       {x} vs {y}");
    }
    out
}

pub fn nonlocality(r: &NonlocalityReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "m:           {}", r.m);
    let _ = writeln!(out, "language:    {}", r.language);
    if let (Some(n), Some(e)) = (r.semigroup_order, r.idempotents) {
        let _ = writeln!(out, "semigroup:   order {n}, {e} idempotents");
    }
    if let Some(a) = &r.half_a {
        let _ = writeln!(
            out,
            "half A:      {} {} ({}) under {}",
            a.identity,
            verdict(a.verdict),
            a.mode,
            assignment(&a.assignment)
        );
    }
    if let Some(b) = &r.half_b {
        let _ = writeln!(
            out,
            "half B:      local {} {} ({}, {} assignments over {} local monoids)",
            b.identity,
            verdict(b.verdict),
            b.mode,
            b.assignments_checked,
            b.local.len()
        );
    }
    if let Some(e) = &r.error {
        let _ = writeln!(out, "error:       {}: {}", e.stage, e.message);
    }
    let _ = write!(out, "verdict:     {}", r.verdict);
    out
}

pub fn embedding(r: &EmbeddingReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} -> {}", r.small, r.big);
    let map: Vec<String> = r
        .letter_map
        .iter()
        .map(|(a, b)| format!("{a}->{b}"))
        .collect();
    let _ = writeln!(out, "letters:     {}", map.join(" "));
    let _ = write!(
        out,
        "outcome:     {}",
        match &r.outcome {
            EmbeddingOutcome::InjectiveHomomorphism { images } =>
                format!("injective homomorphism ({} elements)", images.len()),
            EmbeddingOutcome::Failure { failure } => format!("{failure:?}"),
            EmbeddingOutcome::Error { error } => format!("{}: {}", error.stage, error.message),
        }
    );
    out
}
