//! Named pseudovarieties given by defining pseudoidentities.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::check::{
    check_identity, check_local, CheckError, CheckMode, CheckOptions, CheckReport, Verdict,
};
use crate::semigroup::FiniteSemigroup;
use crate::term::{build_pq, build_uv, parse_identity, OmegaTerm, Pseudoidentity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarietyKind {
    SemigroupVariety,
    MonoidVariety,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Surface {
    /// Identities checked on the semigroup itself.
    Global,
    /// Identities checked on every local monoid `eSe`.
    Local,
    /// `P_m = Q_m` style identities for `V*D`, checked globally.
    GlobalPq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarietySpec {
    pub name: String,
    pub identities: Vec<Pseudoidentity>,
    pub kind: VarietyKind,
    pub surface: Surface,
}

impl fmt::Display for VarietySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = [[", self.name)?;
        for (i, id) in self.identities.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{id}")?;
        }
        f.write_str("]]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VarietyError {
    #[error("unknown variety `{0}`")]
    Unknown(String),
    #[error("level {level} is out of range for `{family}`")]
    BadLevel { family: String, level: usize },
    #[error("`{0}` is a monoid variety and the semigroup has no identity; check its local monoids or adjoin an identity explicitly")]
    NotAMonoid(String),
    #[error(transparent)]
    Check(#[from] CheckError),
}

impl VarietySpec {
    fn fixed(name: &str, kind: VarietyKind, ids: &[&str]) -> Self {
        VarietySpec {
            name: name.to_string(),
            identities: ids
                .iter()
                .map(|t| parse_identity(t).expect("builtin identities parse"))
                .collect(),
            kind,
            surface: Surface::Global,
        }
    }

    fn single(
        name: String,
        kind: VarietyKind,
        surface: Surface,
        lhs: OmegaTerm,
        rhs: OmegaTerm,
    ) -> Self {
        VarietySpec {
            name,
            identities: vec![Pseudoidentity::new(lhs, rhs)],
            kind,
            surface,
        }
    }

    /// `LV`: the same identities, checked on local monoids.
    pub fn localized(&self) -> Self {
        VarietySpec {
            name: format!("L({})", self.name),
            surface: Surface::Local,
            kind: VarietyKind::SemigroupVariety,
            ..self.clone()
        }
    }

    pub fn j() -> Self {
        Self::fixed(
            "J",
            VarietyKind::MonoidVariety,
            &["(x y)^w = (y x)^w", "x^w x = x^w"],
        )
    }

    pub fn r() -> Self {
        Self::fixed("R", VarietyKind::MonoidVariety, &["(x y)^w x = (x y)^w"])
    }

    pub fn l() -> Self {
        Self::fixed("L", VarietyKind::MonoidVariety, &["y (x y)^w = (x y)^w"])
    }

    pub fn da() -> Self {
        Self::fixed(
            "DA",
            VarietyKind::MonoidVariety,
            &["(x y)^w x (x y)^w = (x y)^w"],
        )
    }

    pub fn d() -> Self {
        Self::fixed("D", VarietyKind::SemigroupVariety, &["y x^w = x^w"])
    }

    pub fn k() -> Self {
        Self::fixed("K", VarietyKind::SemigroupVariety, &["x^w y = x^w"])
    }

    /// `R_m`; `R_1 = [[U_1 = V_1]]`.
    pub fn rm(m: usize) -> Result<Self, VarietyError> {
        Self::rl(m, "Rm", true)
    }

    /// `L_m`; `L_1 = [[U_1 = V_1]]`.
    pub fn lm(m: usize) -> Result<Self, VarietyError> {
        Self::rl(m, "Lm", false)
    }

    fn rl(m: usize, family: &str, right: bool) -> Result<Self, VarietyError> {
        let name = format!("{family}({m})");
        let kind = VarietyKind::MonoidVariety;
        if m == 0 {
            return Err(VarietyError::BadLevel {
                family: family.into(),
                level: m,
            });
        }
        if m == 1 {
            let (u, v) = build_uv(1).expect("level 1");
            return Ok(Self::single(name, kind, Surface::Global, u, v));
        }
        let (u, v) = build_uv(m - 1).expect("level >= 1");
        let (lhs, rhs) = if right {
            let ux = OmegaTerm::concat([u.clone(), OmegaTerm::var(format!("x{m}"))]).omega();
            (
                OmegaTerm::concat([ux.clone(), u]),
                OmegaTerm::concat([ux, v]),
            )
        } else {
            let yu = OmegaTerm::concat([OmegaTerm::var(format!("y{m}")), u.clone()]).omega();
            (
                OmegaTerm::concat([u, yu.clone()]),
                OmegaTerm::concat([v, yu]),
            )
        };
        Ok(Self::single(name, kind, Surface::Global, lhs, rhs))
    }

    /// `R_m ∩ L_m = [[U_{m-1} = V_{m-1}]]` for `m >= 2`; `RmLm(1)` is `J`.
    pub fn rmlm(m: usize) -> Result<Self, VarietyError> {
        match m {
            0 => Err(VarietyError::BadLevel {
                family: "RmLm".into(),
                level: m,
            }),
            1 => Ok(VarietySpec {
                name: "RmLm(1)".into(),
                ..Self::j()
            }),
            _ => {
                let (u, v) = build_uv(m - 1).expect("level >= 1");
                Ok(Self::single(
                    format!("RmLm({m})"),
                    VarietyKind::MonoidVariety,
                    Surface::Global,
                    u,
                    v,
                ))
            }
        }
    }

    /// `(R_m ∩ L_m)*D = [[P_{m-1} = Q_{m-1}]]` for `m >= 2`.
    pub fn rmlm_star_d(m: usize) -> Result<Self, VarietyError> {
        if m < 2 {
            return Err(VarietyError::BadLevel {
                family: "RmLm_star_D".into(),
                level: m,
            });
        }
        let (p, q) = build_pq(m - 1).expect("level >= 1");
        Ok(Self::single(
            format!("RmLm_star_D({m})"),
            VarietyKind::SemigroupVariety,
            Surface::GlobalPq,
            p,
            q,
        ))
    }
}

/// The fixed varieties plus the parametric families at levels `1..=max_level`.
pub fn builtin_varieties(max_level: usize) -> Vec<VarietySpec> {
    let mut out = vec![
        VarietySpec::j(),
        VarietySpec::r(),
        VarietySpec::l(),
        VarietySpec::da(),
        VarietySpec::k(),
        VarietySpec::d(),
    ];
    for m in 1..=max_level {
        out.push(VarietySpec::rm(m).expect("m >= 1"));
        out.push(VarietySpec::lm(m).expect("m >= 1"));
        out.push(VarietySpec::rmlm(m).expect("m >= 1"));
        if m >= 2 {
            out.push(VarietySpec::rmlm_star_d(m).expect("m >= 2"));
        }
    }
    out
}

/// Looks up `J`, `R`, `L`, `DA`, `K`, `D`, `Rm(m)`, `Lm(m)`, `RmLm(m)`,
/// `RmLm_star_D(m)`, or `L(<name>)` for the local version of any of these.
pub fn lookup(name: &str) -> Result<VarietySpec, VarietyError> {
    let name = name.trim();
    if let Some(inner) = name.strip_prefix("L(").and_then(|r| r.strip_suffix(')')) {
        return Ok(lookup(inner)?.localized());
    }
    match name {
        "J" => return Ok(VarietySpec::j()),
        "R" => return Ok(VarietySpec::r()),
        "L" => return Ok(VarietySpec::l()),
        "DA" => return Ok(VarietySpec::da()),
        "K" => return Ok(VarietySpec::k()),
        "D" => return Ok(VarietySpec::d()),
        _ => {}
    }
    let unknown = || VarietyError::Unknown(name.to_string());
    let (family, rest) = name.split_once('(').ok_or_else(unknown)?;
    let level: usize = rest
        .strip_suffix(')')
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(unknown)?;
    match family {
        "Rm" => VarietySpec::rm(level),
        "Lm" => VarietySpec::lm(level),
        "RmLm" => VarietySpec::rmlm(level),
        "RmLm_star_D" => VarietySpec::rmlm_star_d(level),
        _ => Err(unknown()),
    }
}

/// Aggregate of the per-identity reports: the first failing report, or the
/// last one with the summed assignment count.
fn conjunction(reports: Vec<CheckReport>) -> CheckReport {
    let total: u64 = reports.iter().map(|r| r.assignments_checked).sum();
    let mut pick = match reports.iter().position(|r| r.verdict == Verdict::Fails) {
        Some(i) => reports[i].clone(),
        None => {
            let mut last = reports.last().expect("varieties have identities").clone();
            // any sampled pass weakens the conjunction
            if reports
                .iter()
                .any(|r| r.verdict == Verdict::SampledNoViolation)
            {
                last.verdict = Verdict::SampledNoViolation;
            }
            last.identity = reports
                .iter()
                .map(|r| r.identity.as_str())
                .collect::<Vec<_>>()
                .join(", ");
            last
        }
    };
    pick.assignments_checked = total;
    pick
}

/// Membership of `s` in `v` (on `v`'s surface): the conjunction of its
/// identities, stopping at the first that fails.
pub fn member(
    s: &FiniteSemigroup,
    v: &VarietySpec,
    mode: CheckMode,
    opts: &CheckOptions,
) -> Result<CheckReport, VarietyError> {
    if v.surface == Surface::Local {
        return member_local(s, v, mode, opts);
    }
    if v.kind == VarietyKind::MonoidVariety && !s.is_monoid() {
        return Err(VarietyError::NotAMonoid(v.name.clone()));
    }
    let mut reports = Vec::new();
    for id in &v.identities {
        let r = check_identity(id, s, mode, opts)?;
        let failed = r.fails();
        reports.push(r);
        if failed {
            break;
        }
    }
    Ok(conjunction(reports))
}

/// Membership of every local monoid `eSe` of `s` in `v`.
pub fn member_local(
    s: &FiniteSemigroup,
    v: &VarietySpec,
    mode: CheckMode,
    opts: &CheckOptions,
) -> Result<CheckReport, VarietyError> {
    let mut reports = Vec::new();
    for id in &v.identities {
        let r = check_local(id, s, mode, opts)?;
        let failed = r.fails();
        reports.push(r);
        if failed {
            break;
        }
    }
    Ok(conjunction(reports))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyViolation {
    pub member_index: usize,
    pub order: usize,
    pub property: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierarchyReport {
    pub members: usize,
    pub implications_checked: usize,
    pub violations: Vec<HierarchyViolation>,
}

/// Checks the containments among J, R, L, DA and the hierarchy levels up to
/// `max_level` on every monoid of `corpus` (non-monoids are skipped):
///
/// * `J ⇒ R ∧ L`, `J ⇔ Rm(1)`, `J ⇔ Lm(1)`
/// * `R ⇔ Rm(2)`, `L ⇔ Lm(2)`
/// * `Rm(m) ∨ Lm(m) ⇒ RmLm(m+1)` and `Rm(m) ∧ Lm(m) ⇔ RmLm(m)`
/// * `Rm(m) ⇒ Rm(m+1)`, `Lm(m) ⇒ Lm(m+1)`, `Rm(m) ∨ Lm(m) ⇒ DA`
pub fn hierarchy_containment_suite(
    corpus: &[FiniteSemigroup],
    max_level: usize,
) -> Result<HierarchyReport, VarietyError> {
    let opts = CheckOptions::default();
    let mode = CheckMode::IdempotentOptimized;
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut members = 0;
    for (idx, s) in corpus.iter().enumerate() {
        if !s.is_monoid() {
            continue;
        }
        members += 1;
        let is = |v: &VarietySpec| -> Result<bool, VarietyError> {
            Ok(member(s, v, mode, &opts)?.holds())
        };
        let j = is(&VarietySpec::j())?;
        let r = is(&VarietySpec::r())?;
        let l = is(&VarietySpec::l())?;
        let da = is(&VarietySpec::da())?;
        let mut rm = vec![false; max_level + 2];
        let mut lm = vec![false; max_level + 2];
        let mut rmlm = vec![false; max_level + 2];
        for m in 1..=max_level + 1 {
            rm[m] = is(&VarietySpec::rm(m)?)?;
            lm[m] = is(&VarietySpec::lm(m)?)?;
            rmlm[m] = is(&VarietySpec::rmlm(m)?)?;
        }
        let mut props: Vec<(String, bool)> = vec![
            ("J => R and L".into(), !j || (r && l)),
            ("J <=> Rm(1)".into(), j == rm[1]),
            ("J <=> Lm(1)".into(), j == lm[1]),
            ("R <=> Rm(2)".into(), r == rm[2]),
            ("L <=> Lm(2)".into(), l == lm[2]),
        ];
        for m in 1..=max_level {
            props.push((
                format!("Rm({m}) or Lm({m}) => RmLm({})", m + 1),
                !(rm[m] || lm[m]) || rmlm[m + 1],
            ));
            props.push((
                format!("Rm({m}) and Lm({m}) <=> RmLm({m})"),
                (rm[m] && lm[m]) == rmlm[m],
            ));
            props.push((format!("Rm({m}) => Rm({})", m + 1), !rm[m] || rm[m + 1]));
            props.push((format!("Lm({m}) => Lm({})", m + 1), !lm[m] || lm[m + 1]));
            props.push((format!("Rm({m}) => DA"), !rm[m] || da));
            props.push((format!("Lm({m}) => DA"), !lm[m] || da));
        }
        checked += props.len();
        for (property, ok) in props {
            if !ok {
                violations.push(HierarchyViolation {
                    member_index: idx,
                    order: s.order(),
                    property,
                });
            }
        }
    }
    Ok(HierarchyReport {
        members,
        implications_checked: checked,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cayley(t: Vec<u32>) -> FiniteSemigroup {
        FiniteSemigroup::from_cayley_table(t).unwrap()
    }

    #[test]
    fn lookup_names() {
        let j = lookup("J").unwrap();
        assert_eq!(j.identities.len(), 2);
        assert_eq!(j.identities[0].to_string(), "(x y)^w = (y x)^w");
        assert_eq!(j.identities[1].to_string(), "x^w x = x^w");
        let rl2 = lookup("RmLm(2)").unwrap();
        assert_eq!(rl2.identities.len(), 1);
        assert_eq!(
            rl2.identities[0].to_string(),
            "(s x1)^w s (y1 t)^w = (s x1)^w t (y1 t)^w"
        );
        assert_eq!(lookup("RmLm(1)").unwrap().identities, j.identities);
        assert_eq!(
            lookup("Rm(2)").unwrap().identities[0].to_string(),
            "((s x1)^w s (y1 t)^w x2)^w (s x1)^w s (y1 t)^w = ((s x1)^w s (y1 t)^w x2)^w (s x1)^w t (y1 t)^w"
        );
        assert_eq!(lookup("L(J)").unwrap().surface, Surface::Local);
        assert_eq!(lookup("RmLm_star_D(2)").unwrap().surface, Surface::GlobalPq);
        assert!(matches!(
            lookup("Rm(0)"),
            Err(VarietyError::BadLevel { .. })
        ));
        assert!(matches!(
            lookup("RmLm_star_D(1)"),
            Err(VarietyError::BadLevel { .. })
        ));
        assert!(matches!(lookup("Q"), Err(VarietyError::Unknown(_))));
        assert!(matches!(lookup("Rm(x)"), Err(VarietyError::Unknown(_))));
    }

    #[test]
    fn trivial_monoid_is_in_everything() {
        let t = cayley(vec![0]);
        for v in builtin_varieties(3) {
            let r = member(&t, &v, CheckMode::Exhaustive, &Default::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{}", v.name);
            let r = member_local(&t, &v, CheckMode::Exhaustive, &Default::default()).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{}", v.name);
        }
    }

    #[test]
    fn right_zero_monoid_not_in_j() {
        let m = cayley(vec![0, 1, 0, 1]).adjoin_identity();
        let j = VarietySpec::j();
        let r = member(&m, &j, CheckMode::Exhaustive, &Default::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        let loc = member_local(&m, &j, CheckMode::Exhaustive, &Default::default()).unwrap();
        assert_eq!(loc.verdict, Verdict::Fails);
        assert_eq!(loc.failing_idempotent, m.identity());
        // xy = y for x, y != 1, so (xy)^w x = x
        assert!(!member(
            &m,
            &VarietySpec::r(),
            CheckMode::Exhaustive,
            &Default::default()
        )
        .unwrap()
        .holds());
        assert!(member(
            &m,
            &VarietySpec::l(),
            CheckMode::Exhaustive,
            &Default::default()
        )
        .unwrap()
        .holds());
    }

    #[test]
    fn monoid_variety_rejects_plain_semigroup() {
        let rz = cayley(vec![0, 1, 0, 1]);
        assert!(matches!(
            member(
                &rz,
                &VarietySpec::j(),
                CheckMode::Exhaustive,
                &Default::default()
            ),
            Err(VarietyError::NotAMonoid(_))
        ));
        // D is a semigroup variety: y x^w = x^w holds in a right zero semigroup
        assert!(member(
            &rz,
            &VarietySpec::d(),
            CheckMode::Exhaustive,
            &Default::default()
        )
        .unwrap()
        .holds());
        assert!(!member(
            &rz,
            &VarietySpec::k(),
            CheckMode::Exhaustive,
            &Default::default()
        )
        .unwrap()
        .holds());
    }

    #[test]
    fn semilattice_in_all_levels() {
        let s = cayley(vec![0, 1, 1, 1]);
        for v in builtin_varieties(3) {
            if v.kind == VarietyKind::MonoidVariety {
                assert!(
                    member(&s, &v, CheckMode::Exhaustive, &Default::default())
                        .unwrap()
                        .holds(),
                    "{}",
                    v.name
                );
            }
        }
        let rep = hierarchy_containment_suite(&[s, cayley(vec![0])], 2).unwrap();
        assert_eq!(rep.members, 2);
        assert!(rep.violations.is_empty());
    }
}
