//! Syntactic semigroups cached on disk, keyed by the SHA-256 of the minimal
//! DFA's JSON.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use twh_core::alphabet::Alphabet;
use twh_core::dfa::compile_min_dfa;
use twh_core::regex::RegexAst;
use twh_core::semigroup::{syntactic_monoid, transition_semigroup, FiniteSemigroup};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub regex: String,
    pub regex_sha256: String,
    pub dfa_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntacticEntry {
    pub provenance: Provenance,
    pub alphabet: Vec<String>,
    pub dfa_states: usize,
    pub semigroup: FiniteSemigroup,
    pub monoid: FiniteSemigroup,
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn load(path: &Path, dfa_sha: &str) -> Option<SyntacticEntry> {
    let text = std::fs::read_to_string(path).ok()?;
    let entry: SyntacticEntry = serde_json::from_str(&text).ok()?;
    (entry.provenance.dfa_sha256 == dfa_sha
        && entry.provenance.tool_version == env!("CARGO_PKG_VERSION"))
    .then_some(entry)
}

/// `Synt(L)` and `M(L)` for the language of `ast`, read from or written to
/// `dir` when one is given. A cached entry is only used when its DFA hash
/// and tool version match; the provenance always describes this request.
pub fn syntactic(
    dir: Option<&Path>,
    alphabet: &Alphabet,
    ast: &RegexAst,
    state_cap: usize,
    order_cap: usize,
) -> Result<SyntacticEntry> {
    let dfa = compile_min_dfa(ast, alphabet, state_cap)?;
    let dfa_json = dfa.to_json();
    let regex = ast.to_string();
    let provenance = Provenance {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        regex_sha256: sha256_hex(&regex),
        regex,
        dfa_sha256: sha256_hex(&dfa_json),
    };
    let path = dir.map(|d| d.join(format!("{}.json", provenance.dfa_sha256)));
    if let Some(mut entry) = path
        .as_deref()
        .and_then(|p| load(p, &provenance.dfa_sha256))
    {
        if entry.monoid.order() > order_cap {
            bail!("semigroup order exceeds the cap of {order_cap}");
        }
        entry.provenance = provenance;
        return Ok(entry);
    }
    let entry = SyntacticEntry {
        provenance,
        alphabet: alphabet.letters().to_vec(),
        dfa_states: dfa.num_states(),
        semigroup: transition_semigroup(&dfa, order_cap)?,
        monoid: syntactic_monoid(&dfa, order_cap)?,
    };
    if let (Some(dir), Some(path)) = (dir, path) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string(&entry)?)
            .with_context(|| format!("writing {}", tmp.display()))?;
        std::fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(entry)
}
