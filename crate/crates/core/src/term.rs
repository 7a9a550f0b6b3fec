//! ω-terms and pseudoidentities.
//!
//! Terms are immutable and reference counted, so the recursive builders
//! ([`build_uv`], [`build_pq`]) return DAGs whose size is linear in the level
//! even though the printed form grows exponentially. Products are kept flat:
//! a `Concat` never has a `Concat` child.
//!
//! Concrete syntax:
//!
//! ```text
//! term   := factor+
//! factor := atom ('^w' | '^(w-1)')?
//! atom   := IDENT | '(' term ')'
//! IDENT  := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! An identity is `lhs = rhs`; identity files hold one per line with `#`
//! comments.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, PartialEq, Eq)]
pub enum TermNode {
    Var(String),
    Concat(Vec<OmegaTerm>),
    Omega(OmegaTerm),
    OmegaMinusOne(OmegaTerm),
}

/// Cheap to clone; equality short-circuits on shared subterms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaTerm(Arc<TermNode>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("level must be at least 1 (got {0})")]
    BadLevel(usize),
}

impl OmegaTerm {
    pub fn var(name: impl Into<String>) -> Self {
        OmegaTerm(Arc::new(TermNode::Var(name.into())))
    }

    /// Product of `parts`, flattening nested products.
    ///
    /// # Panics
    /// If `parts` is empty.
    pub fn concat(parts: impl IntoIterator<Item = OmegaTerm>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p.node() {
                TermNode::Concat(cs) => out.extend(cs.iter().cloned()),
                _ => out.push(p),
            }
        }
        assert!(!out.is_empty(), "empty product");
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            OmegaTerm(Arc::new(TermNode::Concat(out)))
        }
    }

    pub fn omega(&self) -> Self {
        OmegaTerm(Arc::new(TermNode::Omega(self.clone())))
    }

    pub fn omega_minus_one(&self) -> Self {
        OmegaTerm(Arc::new(TermNode::OmegaMinusOne(self.clone())))
    }

    pub fn node(&self) -> &TermNode {
        &self.0
    }

    /// Stable identity of the shared node, used for memoization.
    pub fn ptr(&self) -> *const TermNode {
        Arc::as_ptr(&self.0)
    }

    /// Variables occurring in the term.
    pub fn content(&self) -> BTreeSet<String> {
        let mut seen = HashSet::new();
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if !seen.insert(t.ptr()) {
                continue;
            }
            match t.node() {
                TermNode::Var(v) => {
                    out.insert(v.clone());
                }
                TermNode::Concat(cs) => stack.extend(cs.iter()),
                TermNode::Omega(c) | TermNode::OmegaMinusOne(c) => stack.push(c),
            }
        }
        out
    }

    /// Number of distinct shared nodes.
    pub fn dag_size(&self) -> usize {
        let mut seen = HashSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            if !seen.insert(t.ptr()) {
                continue;
            }
            match t.node() {
                TermNode::Var(_) => {}
                TermNode::Concat(cs) => stack.extend(cs.iter()),
                TermNode::Omega(c) | TermNode::OmegaMinusOne(c) => stack.push(c),
            }
        }
        seen.len()
    }

    fn fmt_factor(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            TermNode::Var(v) => f.write_str(v),
            TermNode::Concat(_) => write!(f, "({self})"),
            TermNode::Omega(c) => {
                c.fmt_atom(f)?;
                f.write_str("^w")
            }
            TermNode::OmegaMinusOne(c) => {
                c.fmt_atom(f)?;
                f.write_str("^(w-1)")
            }
        }
    }

    fn fmt_atom(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            TermNode::Var(v) => f.write_str(v),
            _ => write!(f, "({self})"),
        }
    }
}

impl fmt::Display for OmegaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            TermNode::Concat(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    c.fmt_factor(f)?;
                }
                Ok(())
            }
            _ => self.fmt_factor(f),
        }
    }
}

/// `lhs = rhs` over the union of both sides' variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pseudoidentity {
    pub lhs: OmegaTerm,
    pub rhs: OmegaTerm,
}

impl Pseudoidentity {
    pub fn new(lhs: OmegaTerm, rhs: OmegaTerm) -> Self {
        Pseudoidentity { lhs, rhs }
    }

    /// Variables of both sides, sorted lexicographically.
    pub fn variables(&self) -> Vec<String> {
        let mut vars = self.lhs.content();
        vars.extend(self.rhs.content());
        vars.into_iter().collect()
    }
}

impl fmt::Display for Pseudoidentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Omega,
    OmegaMinusOne,
    Equals,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, TermError> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let skip_ws = |mut j: usize| {
        while j < b.len() && b[j].is_ascii_whitespace() {
            j += 1;
        }
        j
    };
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'=' => {
                i += 1;
                Tok::Equals
            }
            b'^' => {
                let j = skip_ws(i + 1);
                if j < b.len() && b[j] == b'w' && (j + 1 == b.len() || !is_ident_char(b[j + 1])) {
                    i = j + 1;
                    Tok::Omega
                } else if j < b.len() && b[j] == b'(' {
                    let mut k = skip_ws(j + 1);
                    let mut ok = true;
                    for expect in *b"w-1)" {
                        if k < b.len() && b[k] == expect {
                            k = skip_ws(k + 1);
                        } else {
                            ok = false;
                            break;
                        }
                    }
                    if !ok {
                        return Err(TermError::Syntax {
                            pos: start,
                            msg: "expected `^(w-1)`".into(),
                        });
                    }
                    i = k;
                    Tok::OmegaMinusOne
                } else {
                    return Err(TermError::Syntax {
                        pos: start,
                        msg: "expected `^w` or `^(w-1)`".into(),
                    });
                }
            }
            c if is_ident_start(c) => {
                while i < b.len() && is_ident_char(b[i]) {
                    i += 1;
                }
                Tok::Ident(text[start..i].to_string())
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(TermError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    resolve: &'a dyn Fn(&str) -> Option<OmegaTerm>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn term(&mut self) -> Result<OmegaTerm, TermError> {
        let mut parts = Vec::new();
        while matches!(self.peek(), Some(Tok::Ident(_) | Tok::LParen)) {
            parts.push(self.factor()?);
        }
        if parts.is_empty() {
            return Err(TermError::Syntax {
                pos: self.pos(),
                msg: "expected a variable or `(`".into(),
            });
        }
        Ok(OmegaTerm::concat(parts))
    }

    fn factor(&mut self) -> Result<OmegaTerm, TermError> {
        let atom = self.atom()?;
        Ok(match self.peek() {
            Some(Tok::Omega) => {
                self.at += 1;
                atom.omega()
            }
            Some(Tok::OmegaMinusOne) => {
                self.at += 1;
                atom.omega_minus_one()
            }
            _ => atom,
        })
    }

    fn atom(&mut self) -> Result<OmegaTerm, TermError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Ok((self.resolve)(&name).unwrap_or_else(|| OmegaTerm::var(name)))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.term()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(TermError::Syntax {
                        pos,
                        msg: "unmatched `(`".into(),
                    });
                }
                self.at += 1;
                Ok(inner)
            }
            _ => Err(TermError::Syntax {
                pos,
                msg: "expected a variable or `(`".into(),
            }),
        }
    }

    fn finish(&self) -> Result<(), TermError> {
        if self.at == self.toks.len() {
            Ok(())
        } else {
            Err(TermError::Syntax {
                pos: self.pos(),
                msg: "unexpected trailing input".into(),
            })
        }
    }
}

fn no_builtins(_: &str) -> Option<OmegaTerm> {
    None
}

/// Parses a term; every identifier is a variable.
pub fn parse_term(text: &str) -> Result<OmegaTerm, TermError> {
    parse_term_with(text, &no_builtins)
}

/// Parses a term, replacing identifiers for which `resolve` returns a term.
pub fn parse_term_with(
    text: &str,
    resolve: &dyn Fn(&str) -> Option<OmegaTerm>,
) -> Result<OmegaTerm, TermError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
        resolve,
    };
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_identity(text: &str) -> Result<Pseudoidentity, TermError> {
    parse_identity_with(text, &no_builtins)
}

pub fn parse_identity_with(
    text: &str,
    resolve: &dyn Fn(&str) -> Option<OmegaTerm>,
) -> Result<Pseudoidentity, TermError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
        resolve,
    };
    let lhs = p.term()?;
    if p.peek() != Some(&Tok::Equals) {
        return Err(TermError::Syntax {
            pos: p.pos(),
            msg: "expected `=`".into(),
        });
    }
    p.at += 1;
    let rhs = p.term()?;
    p.finish()?;
    Ok(Pseudoidentity::new(lhs, rhs))
}

/// Parses an identity file: one identity per line, `#` starts a comment.
pub fn parse_identity_file(
    text: &str,
    resolve: &dyn Fn(&str) -> Option<OmegaTerm>,
) -> Result<Vec<Pseudoidentity>, (usize, TermError)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.split('#').next().unwrap_or("").trim();
            (!line.is_empty()).then_some((i + 1, line))
        })
        .map(|(lineno, line)| parse_identity_with(line, resolve).map_err(|e| (lineno, e)))
        .collect()
}

/// Resolves `U<m>`, `V<m>`, `P<m>` and `Q<m>` (m >= 1) to the builder terms.
pub fn builtin_term(name: &str) -> Option<OmegaTerm> {
    let (head, digits) = name.split_at(1);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    let m: usize = digits.parse().ok()?;
    match head {
        "U" => build_uv(m).ok().map(|(u, _)| u),
        "V" => build_uv(m).ok().map(|(_, v)| v),
        "P" => build_pq(m).ok().map(|(p, _)| p),
        "Q" => build_pq(m).ok().map(|(_, q)| q),
        _ => None,
    }
}

fn v(name: &str) -> OmegaTerm {
    OmegaTerm::var(name)
}

/// One step of the shared recursion
/// `W_m = (B x_m)^ω W' (y_m B)^ω` where `B` is the previous left term.
fn lift(base: &OmegaTerm, middle: &OmegaTerm, m: usize) -> OmegaTerm {
    let x = v(&format!("x{m}"));
    let y = v(&format!("y{m}"));
    OmegaTerm::concat([
        OmegaTerm::concat([base.clone(), x]).omega(),
        middle.clone(),
        OmegaTerm::concat([y, base.clone()]).omega(),
    ])
}

/// The terms `U_m, V_m` over `s, t, x_1..x_m, y_1..y_m`.
pub fn build_uv(m: usize) -> Result<(OmegaTerm, OmegaTerm), TermError> {
    if m < 1 {
        return Err(TermError::BadLevel(m));
    }
    let left = OmegaTerm::concat([v("s"), v("x1")]).omega();
    let right = OmegaTerm::concat([v("y1"), v("t")]).omega();
    let mut u = OmegaTerm::concat([left.clone(), v("s"), right.clone()]);
    let mut w = OmegaTerm::concat([left, v("t"), right]);
    for k in 2..=m {
        let next_u = lift(&u, &u, k);
        let next_w = lift(&u, &w, k);
        u = next_u;
        w = next_w;
    }
    Ok((u, w))
}

/// The terms `P_m, Q_m` over `e, f, s, t, x_1..x_m, y_1..y_m`.
pub fn build_pq(m: usize) -> Result<(OmegaTerm, OmegaTerm), TermError> {
    if m < 1 {
        return Err(TermError::BadLevel(m));
    }
    let e = v("e").omega();
    let f = v("f").omega();
    let esf = OmegaTerm::concat([e.clone(), v("s"), f.clone()]);
    let etf = OmegaTerm::concat([e, v("t"), f]);
    let left = OmegaTerm::concat([esf.clone(), v("x1")]).omega();
    let right = OmegaTerm::concat([v("y1"), etf.clone()]).omega();
    let mut p = OmegaTerm::concat([left.clone(), esf, right.clone()]);
    let mut q = OmegaTerm::concat([left, etf, right]);
    for k in 2..=m {
        let next_p = lift(&p, &p, k);
        let next_q = lift(&p, &q, k);
        p = next_p;
        q = next_q;
    }
    Ok((p, q))
}

/// The variable set `Σ_m`: `{s,t,x_i,y_i}` plus `{e,f}` when `with_ef`.
pub fn sigma(m: usize, with_ef: bool) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = ["s", "t"].iter().map(|s| s.to_string()).collect();
    if with_ef {
        out.insert("e".into());
        out.insert("f".into());
    }
    for k in 1..=m {
        out.insert(format!("x{k}"));
        out.insert(format!("y{k}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u1_v1_shapes() {
        let (u, w) = build_uv(1).unwrap();
        assert_eq!(u.to_string(), "(s x1)^w s (y1 t)^w");
        assert_eq!(w.to_string(), "(s x1)^w t (y1 t)^w");
        assert_eq!(parse_term("(s x1)^w s (y1 t)^w").unwrap(), u);
    }

    #[test]
    fn u2_follows_recursion() {
        let (u1, v1) = build_uv(1).unwrap();
        let (u2, v2) = build_uv(2).unwrap();
        let expected_u2 = OmegaTerm::concat([
            OmegaTerm::concat([u1.clone(), v("x2")]).omega(),
            u1.clone(),
            OmegaTerm::concat([v("y2"), u1.clone()]).omega(),
        ]);
        assert_eq!(u2, expected_u2);
        let expected_v2 = OmegaTerm::concat([
            OmegaTerm::concat([u1.clone(), v("x2")]).omega(),
            v1,
            OmegaTerm::concat([v("y2"), u1]).omega(),
        ]);
        assert_eq!(v2, expected_v2);
        assert_eq!(
            u2.to_string(),
            "((s x1)^w s (y1 t)^w x2)^w (s x1)^w s (y1 t)^w (y2 (s x1)^w s (y1 t)^w)^w"
        );
    }

    #[test]
    fn p1_q1_shapes() {
        let (p, q) = build_pq(1).unwrap();
        assert_eq!(p.to_string(), "(e^w s f^w x1)^w e^w s f^w (y1 e^w t f^w)^w");
        assert_eq!(q.to_string(), "(e^w s f^w x1)^w e^w t f^w (y1 e^w t f^w)^w");
        assert_eq!(p.content().len(), 6);
        let (p2, _) = build_pq(2).unwrap();
        let (p1, _) = build_pq(1).unwrap();
        assert_eq!(
            p2,
            OmegaTerm::concat([
                OmegaTerm::concat([p1.clone(), v("x2")]).omega(),
                p1.clone(),
                OmegaTerm::concat([v("y2"), p1]).omega(),
            ])
        );
    }

    #[test]
    fn contents_match_sigma() {
        for m in 1..=6 {
            let (u, w) = build_uv(m).unwrap();
            assert_eq!(u.content(), sigma(m, false));
            assert_eq!(w.content(), u.content());
            assert_eq!(u.content().len(), 2 * m + 2);
            let (p, q) = build_pq(m).unwrap();
            assert_eq!(p.content(), sigma(m, true));
            assert_eq!(q.content(), p.content());
        }
        assert_eq!(
            parse_term("s").unwrap().content(),
            BTreeSet::from(["s".to_string()])
        );
    }

    #[test]
    fn builders_share_subterms() {
        // printed size doubles per level, the DAG grows linearly
        let (u6, _) = build_uv(6).unwrap();
        assert!(u6.dag_size() < 200, "dag size {}", u6.dag_size());
        assert!(u6.to_string().len() > 1000);
        assert_eq!(build_uv(0).unwrap_err(), TermError::BadLevel(0));
        assert_eq!(build_pq(0).unwrap_err(), TermError::BadLevel(0));
    }

    #[test]
    fn omega_minus_one_syntax() {
        let t = parse_term("x^(w-1) x").unwrap();
        assert_eq!(t, OmegaTerm::concat([v("x").omega_minus_one(), v("x")]));
        assert_eq!(t.to_string(), "x^(w-1) x");
        assert_eq!(parse_term("x ^ ( w - 1 )").unwrap().to_string(), "x^(w-1)");
        assert_eq!(parse_term("(x^w)^w").unwrap().to_string(), "(x^w)^w");
        // `w` is an ordinary variable name outside of exponents
        assert_eq!(parse_term("w^w").unwrap(), v("w").omega());
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_term("(("), Err(TermError::Syntax { .. })));
        assert!(matches!(
            parse_term("x^2"),
            Err(TermError::Syntax { pos: 1, .. })
        ));
        assert!(matches!(
            parse_term("x)"),
            Err(TermError::Syntax { pos: 1, .. })
        ));
        assert!(matches!(
            parse_term(""),
            Err(TermError::Syntax { pos: 0, .. })
        ));
        assert!(parse_identity("x = ").is_err());
        assert!(parse_identity("x y").is_err());
    }

    #[test]
    fn identities_and_builtins() {
        let id = parse_identity("(x y)^w x = (x y)^w").unwrap();
        assert_eq!(id.variables(), vec!["x", "y"]);
        assert_eq!(id.to_string(), "(x y)^w x = (x y)^w");
        let pq = parse_identity_with("P1 = Q1", &builtin_term).unwrap();
        let (p, q) = build_pq(1).unwrap();
        assert_eq!((pq.lhs, pq.rhs), (p, q));
        assert!(builtin_term("U0").is_none());
        assert!(builtin_term("X1").is_none());
        assert!(builtin_term("U").is_none());
        let file = "# comment\n\n(x y)^w = (y x)^w  # J\nx^w x = x^w\n";
        let ids = parse_identity_file(file, &no_builtins).unwrap();
        assert_eq!(ids.len(), 2);
        let err = parse_identity_file("x = y\nx = \n", &no_builtins).unwrap_err();
        assert_eq!(err.0, 2);
    }
}
