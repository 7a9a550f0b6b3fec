use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use twh_core::check::{
    check_identity, check_local, check_witness, CheckMode, CheckOptions, CheckReport, Verdict,
};
use twh_core::eval::Assignment;
use twh_core::nonlocality::{
    embedding_check_with, verify_nonlocality, EmbeddingOutcome, PipelineConfig,
};
use twh_core::regex::{build_ell, parse_regex, parse_regex_infer};
use twh_core::semigroup::FiniteSemigroup;
use twh_core::term::{builtin_term, parse_identity_file, parse_identity_with, Pseudoidentity};
use twh_core::variety::{lookup, member};

mod cache;
mod render;

#[derive(Parser, Debug)]
#[command(
    name = "twh",
    version,
    about = "Syntactic semigroups, pseudoidentities and the Trotter-Weil hierarchy"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Global {
    /// Output format.
    #[arg(
        long,
        global = true,
        value_enum,
        default_value = "json",
        env = "TWH_FORMAT"
    )]
    format: Format,
    /// Directory for cached syntactic semigroups.
    #[arg(long, global = true, env = "TWH_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads for identity checks (default: all cores).
    #[arg(long, global = true, env = "TWH_THREADS")]
    threads: Option<usize>,
    /// Largest assignment space searched exhaustively.
    #[arg(long, global = true, env = "TWH_BUDGET", default_value_t = twh_core::check::DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, global = true, env = "TWH_SEED", default_value_t = 0)]
    seed: u64,
    /// Samples per check (per idempotent for local checks) in sampled mode.
    #[arg(long, global = true, env = "TWH_SAMPLES", default_value_t = twh_core::nonlocality::DEFAULT_SAMPLES)]
    samples: u64,
    #[arg(long, global = true, env = "TWH_STATE_CAP", default_value_t = twh_core::dfa::DEFAULT_STATE_CAP)]
    state_cap: usize,
    #[arg(long, global = true, env = "TWH_ORDER_CAP", default_value_t = twh_core::semigroup::DEFAULT_ORDER_CAP)]
    order_cap: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Table,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Exhaustive,
    Optimized,
    Sampled,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the regular expression and alphabet of ell_m.
    Ell {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        m: u32,
    },
    /// Compute the syntactic semigroup and monoid of a language.
    Syntactic {
        /// Regular expression; letters are a-z optionally followed by digits.
        regex: Option<String>,
        /// Use ell_m instead of a regex.
        #[arg(long, conflicts_with = "regex", value_parser = clap::value_parser!(u32).range(2..))]
        ell: Option<u32>,
        /// Comma-separated alphabet (default: the letters of the regex, sorted).
        #[arg(long, value_delimiter = ',')]
        alphabet: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a pseudoidentity or a named variety on a semigroup.
    Check {
        /// Semigroup JSON, or the output of `syntactic`.
        semigroup: PathBuf,
        /// Identity such as "(x y)^w = (y x)^w"; U<m>, V<m>, P<m>, Q<m> expand.
        identity: Option<String>,
        /// File with one identity per line.
        #[arg(long, conflicts_with_all = ["identity", "variety"])]
        identity_file: Option<PathBuf>,
        /// Named variety: J, R, L, DA, K, D, Rm(m), Lm(m), RmLm(m), RmLm_star_D(m), L(...).
        #[arg(long, conflicts_with = "identity")]
        variety: Option<String>,
        /// Check on every local monoid eSe.
        #[arg(long)]
        local: bool,
        #[arg(long, value_enum, default_value = "optimized")]
        mode: Mode,
        /// JSON map from variables to words or element indices.
        #[arg(long, conflicts_with_all = ["local", "variety"])]
        witness_file: Option<PathBuf>,
        /// With a `syntactic` output file, use the monoid instead of the semigroup.
        #[arg(long)]
        monoid: bool,
    },
    /// Check that Synt(ell_m) is in L(R_m ∩ L_m) but not in (R_m ∩ L_m)*D.
    VerifyNonlocality {
        #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
        m: u32,
        /// Mode of the local half (default: exhaustive for m = 2, sampled above).
        #[arg(long, value_enum)]
        local_mode: Option<Mode>,
        /// Include per-stage wall times (makes the report run-dependent).
        #[arg(long)]
        timings: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that Synt(ell_{m-1}) embeds into Synt(ell_m) along letter inclusion.
    Embed {
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        m: u32,
        /// Override letter images, e.g. "a=b,b=a".
        #[arg(long, value_delimiter = ',')]
        map: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let g = cli.global;
    match cli.command {
        Command::Ell { m } => cmd_ell(&g, m as usize),
        Command::Syntactic {
            regex,
            ell,
            alphabet,
            out,
        } => cmd_syntactic(&g, regex, ell, alphabet, out),
        Command::Check {
            semigroup,
            identity,
            identity_file,
            variety,
            local,
            mode,
            witness_file,
            monoid,
        } => {
            let s = load_semigroup(&semigroup, monoid)?;
            let target = if let Some(name) = variety {
                Target::Variety(name)
            } else if let Some(path) = identity_file {
                let text = std::fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let ids = parse_identity_file(&text, &builtin_term)
                    .map_err(|(line, e)| anyhow::anyhow!("{}:{line}: {e}", path.display()))?;
                if ids.is_empty() {
                    bail!("{} contains no identities", path.display());
                }
                Target::Identities(ids)
            } else if let Some(text) = identity {
                Target::Identities(vec![parse_identity_with(&text, &builtin_term)?])
            } else {
                bail!("give an identity, --identity-file or --variety");
            };
            cmd_check(&g, &s, target, local, mode, witness_file)
        }
        Command::VerifyNonlocality {
            m,
            local_mode,
            timings,
            out,
        } => cmd_verify(&g, m as usize, local_mode, timings, out),
        Command::Embed { m, map } => cmd_embed(&g, m as usize, &map),
    }
}

fn emit<T: Serialize>(g: &Global, value: &T, table: impl FnOnce() -> String) -> Result<()> {
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(value)?,
        Format::Table => table(),
    };
    println!("{text}");
    Ok(())
}

fn pipeline_config(g: &Global) -> PipelineConfig {
    PipelineConfig {
        order_cap: g.order_cap,
        state_cap: g.state_cap,
        local_mode: None,
        samples: g.samples,
        seed: g.seed,
        budget: g.budget,
        timings: false,
    }
}

fn check_mode(g: &Global, mode: Mode) -> CheckMode {
    match mode {
        Mode::Exhaustive => CheckMode::Exhaustive,
        Mode::Optimized => CheckMode::IdempotentOptimized,
        Mode::Sampled => CheckMode::Sampled {
            samples: g.samples,
            seed: g.seed,
        },
    }
}

fn cmd_ell(g: &Global, m: usize) -> Result<u8> {
    let (alphabet, ast) = build_ell(m)?;
    #[derive(Serialize)]
    struct Ell<'a> {
        m: usize,
        alphabet: &'a [String],
        regex: String,
    }
    let out = Ell {
        m,
        alphabet: alphabet.letters(),
        regex: ast.to_string(),
    };
    emit(g, &out, || {
        format!(
            "alphabet: {}\nregex:    {}",
            out.alphabet.join(" "),
            out.regex
        )
    })?;
    Ok(0)
}

fn cmd_syntactic(
    g: &Global,
    regex: Option<String>,
    ell: Option<u32>,
    alphabet: Option<Vec<String>>,
    out: Option<PathBuf>,
) -> Result<u8> {
    let (alphabet, ast) = match (regex, ell) {
        (_, Some(m)) => build_ell(m as usize)?,
        (Some(text), None) => match alphabet {
            Some(letters) => {
                let a = twh_core::alphabet::Alphabet::new(letters)?;
                let ast = parse_regex(&text, &a)?;
                (a, ast)
            }
            None => parse_regex_infer(&text)?,
        },
        (None, None) => bail!("give a regular expression or --ell"),
    };
    let entry = cache::syntactic(
        g.cache_dir.as_deref(),
        &alphabet,
        &ast,
        g.state_cap,
        g.order_cap,
    )?;
    emit(g, &entry, || render::syntactic(&entry))?;
    if let Some(path) = out {
        let json = serde_json::to_string_pretty(&entry)?;
        std::fs::write(&path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

/// Reads a semigroup file, or the `semigroup` / `monoid` member of a
/// `syntactic` output.
fn load_semigroup(path: &Path, monoid: bool) -> Result<FiniteSemigroup> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let key = if monoid { "monoid" } else { "semigroup" };
    let body = match value.get(key) {
        Some(inner) => inner.clone(),
        None if monoid => bail!("{} has no `monoid` member", path.display()),
        None => value,
    };
    serde_json::from_value(body)
        .with_context(|| format!("loading semigroup from {}", path.display()))
}

enum Target {
    Variety(String),
    Identities(Vec<Pseudoidentity>),
}

fn verdict_code(v: Verdict) -> u8 {
    if v.passed() {
        0
    } else {
        1
    }
}

fn cmd_check(
    g: &Global,
    s: &FiniteSemigroup,
    target: Target,
    local: bool,
    mode: Mode,
    witness_file: Option<PathBuf>,
) -> Result<u8> {
    let opts = CheckOptions {
        budget: g.budget,
        timings: false,
    };
    let mode = check_mode(g, mode);
    let reports: Vec<CheckReport> = match target {
        Target::Variety(name) => {
            let mut v = lookup(&name)?;
            if local {
                v = v.localized();
            }
            vec![member(s, &v, mode, &opts)?]
        }
        Target::Identities(ids) => {
            let witness: Option<Assignment> = match &witness_file {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    Some(
                        serde_json::from_str(&text)
                            .with_context(|| format!("parsing {}", path.display()))?,
                    )
                }
                None => None,
            };
            ids.iter()
                .map(|id| match (&witness, local) {
                    (Some(a), _) => check_witness(id, s, a, &opts),
                    (None, true) => check_local(id, s, mode, &opts),
                    (None, false) => check_identity(id, s, mode, &opts),
                })
                .collect::<Result<_, _>>()?
        }
    };
    let code = reports
        .iter()
        .map(|r| verdict_code(r.verdict))
        .max()
        .unwrap_or(0);
    if let [single] = reports.as_slice() {
        emit(g, single, || render::check(single))?;
    } else {
        emit(g, &reports, || {
            reports
                .iter()
                .map(render::check)
                .collect::<Vec<_>>()
                .join("\n\n")
        })?;
    }
    Ok(code)
}

fn cmd_verify(
    g: &Global,
    m: usize,
    local_mode: Option<Mode>,
    timings: bool,
    out: Option<PathBuf>,
) -> Result<u8> {
    let mut config = pipeline_config(g);
    config.local_mode = local_mode.map(|mode| check_mode(g, mode));
    config.timings = timings;
    let report = verify_nonlocality(m, &config)?;
    emit(g, &report, || render::nonlocality(&report))?;
    if let Some(path) = out {
        std::fs::write(&path, report.to_json_pretty() + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(e) = &report.error {
        eprintln!("error: stage {}: {}", e.stage, e.message);
        return Ok(2);
    }
    Ok(if report.witnessed() { 0 } else { 1 })
}

fn cmd_embed(g: &Global, m: usize, overrides: &[String]) -> Result<u8> {
    let mut map = std::collections::BTreeMap::new();
    for pair in overrides {
        let (from, to) = pair
            .split_once('=')
            .with_context(|| format!("expected letter=letter, got `{pair}`"))?;
        map.insert(from.trim().to_string(), to.trim().to_string());
    }
    let letter_map = |a: &str| Some(map.get(a).cloned().unwrap_or_else(|| a.to_string()));
    let report = embedding_check_with(m - 1, m, &pipeline_config(g), letter_map)?;
    emit(g, &report, || render::embedding(&report))?;
    Ok(match report.outcome {
        EmbeddingOutcome::InjectiveHomomorphism { .. } => 0,
        EmbeddingOutcome::Failure { .. } => 1,
        EmbeddingOutcome::Error { .. } => 2,
    })
}
