//! Regular-expression syntax trees over a finite [`Alphabet`].
//!
//! Concrete syntax:
//!
//! ```text
//! expr   := alt
//! alt    := cat ('|' cat)*
//! cat    := rep+
//! rep    := atom ('*' | '+')?
//! atom   := LETTER | '(' expr ')' | '(' ')'
//! LETTER := [a-z] | [a-z][0-9]+
//! ```
//!
//! Whitespace is insignificant. `()` denotes the empty word.
//!
//! Trees are kept in canonical form: a `Concat` never has a `Concat` child and
//! a `Union` never has a `Union` child, and both have at least two children.
//! The parser and the smart constructors [`RegexAst::concat`] and
//! [`RegexAst::union`] maintain this, so `parse(print(r)) == r`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::alphabet::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RegexAst {
    Epsilon,
    Literal(String),
    Concat(Vec<RegexAst>),
    Union(Vec<RegexAst>),
    Star(Box<RegexAst>),
    Plus(Box<RegexAst>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegexError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("letter `{letter}` at position {pos} is not in the alphabet")]
    UnknownLetter { letter: String, pos: usize },
    #[error("the language family is defined for m >= 2 (got {0})")]
    BadLevel(usize),
}

impl RegexAst {
    pub fn lit(name: impl Into<String>) -> Self {
        RegexAst::Literal(name.into())
    }

    /// Concatenation, flattening nested concatenations. An empty list yields
    /// `Epsilon` and a singleton yields its only element.
    pub fn concat(parts: impl IntoIterator<Item = RegexAst>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                RegexAst::Concat(children) => out.extend(children),
                RegexAst::Epsilon => {}
                other => out.push(other),
            }
        }
        match out.len() {
            0 => RegexAst::Epsilon,
            1 => out.pop().unwrap(),
            _ => RegexAst::Concat(out),
        }
    }

    /// Union, flattening nested unions.
    ///
    /// # Panics
    /// If `parts` is empty (there is no empty-language node).
    pub fn union(parts: impl IntoIterator<Item = RegexAst>) -> Self {
        let mut out = Vec::new();
        for p in parts {
            match p {
                RegexAst::Union(children) => out.extend(children),
                other => out.push(other),
            }
        }
        assert!(!out.is_empty(), "union of no alternatives");
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            RegexAst::Union(out)
        }
    }

    pub fn star(self) -> Self {
        RegexAst::Star(Box::new(self))
    }

    pub fn plus(self) -> Self {
        RegexAst::Plus(Box::new(self))
    }

    /// Letters occurring in the expression.
    pub fn letters(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_letters(&mut out);
        out
    }

    fn collect_letters<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            RegexAst::Epsilon => {}
            RegexAst::Literal(l) => {
                out.insert(l.as_str());
            }
            RegexAst::Concat(cs) | RegexAst::Union(cs) => {
                cs.iter().for_each(|c| c.collect_letters(out));
            }
            RegexAst::Star(c) | RegexAst::Plus(c) => c.collect_letters(out),
        }
    }

    /// Whether the tree is in canonical form and all letters are in `alphabet`.
    pub fn is_well_formed(&self, alphabet: &Alphabet) -> bool {
        match self {
            RegexAst::Epsilon => true,
            RegexAst::Literal(l) => alphabet.contains(l),
            RegexAst::Concat(cs) => {
                cs.len() >= 2
                    && cs.iter().all(|c| {
                        !matches!(c, RegexAst::Concat(_) | RegexAst::Epsilon)
                            && c.is_well_formed(alphabet)
                    })
            }
            RegexAst::Union(cs) => {
                cs.len() >= 2
                    && cs
                        .iter()
                        .all(|c| !matches!(c, RegexAst::Union(_)) && c.is_well_formed(alphabet))
            }
            RegexAst::Star(c) | RegexAst::Plus(c) => c.is_well_formed(alphabet),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            RegexAst::Union(_) => 0,
            RegexAst::Concat(_) => 1,
            RegexAst::Star(_) | RegexAst::Plus(_) => 2,
            RegexAst::Epsilon | RegexAst::Literal(_) => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let paren = self.precedence() < min_prec;
        if paren {
            f.write_str("(")?;
        }
        match self {
            RegexAst::Epsilon => f.write_str("()")?,
            RegexAst::Literal(l) => f.write_str(l)?,
            RegexAst::Concat(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    c.fmt_at(f, 2)?;
                }
            }
            RegexAst::Union(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" | ")?;
                    }
                    c.fmt_at(f, 1)?;
                }
            }
            RegexAst::Star(c) => {
                c.fmt_at(f, 3)?;
                f.write_str("*")?;
            }
            RegexAst::Plus(c) => {
                c.fmt_at(f, 3)?;
                f.write_str("+")?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for RegexAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Letter(String),
    LParen,
    RParen,
    Bar,
    Star,
    Plus,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, RegexError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        let tok = match c {
            c if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '|' => Tok::Bar,
            '*' => Tok::Star,
            '+' => Tok::Plus,
            c if c.is_ascii_lowercase() => {
                chars.next();
                let mut end = pos + 1;
                while let Some(&(p, d)) = chars.peek() {
                    if d.is_ascii_digit() {
                        chars.next();
                        end = p + 1;
                    } else {
                        break;
                    }
                }
                out.push((pos, Tok::Letter(text[pos..end].to_string())));
                continue;
            }
            other => {
                return Err(RegexError::Syntax {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        chars.next();
        out.push((pos, tok));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, RegexError> {
        Err(RegexError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn alt(&mut self) -> Result<RegexAst, RegexError> {
        let mut parts = vec![self.cat()?];
        while self.peek() == Some(&Tok::Bar) {
            self.at += 1;
            parts.push(self.cat()?);
        }
        Ok(RegexAst::union(parts))
    }

    fn cat(&mut self) -> Result<RegexAst, RegexError> {
        let mut parts = Vec::new();
        while matches!(self.peek(), Some(Tok::Letter(_) | Tok::LParen)) {
            parts.push(self.rep()?);
        }
        if parts.is_empty() {
            return self.err("expected a letter or `(`");
        }
        // `concat` would drop explicit epsilons; a lone `()` must survive.
        if parts.len() == 1 {
            return Ok(parts.pop().unwrap());
        }
        Ok(RegexAst::concat(parts))
    }

    fn rep(&mut self) -> Result<RegexAst, RegexError> {
        let atom = self.atom()?;
        Ok(match self.peek() {
            Some(Tok::Star) => {
                self.at += 1;
                atom.star()
            }
            Some(Tok::Plus) => {
                self.at += 1;
                atom.plus()
            }
            _ => atom,
        })
    }

    fn atom(&mut self) -> Result<RegexAst, RegexError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Letter(l)) => {
                self.at += 1;
                if !self.alphabet.contains(&l) {
                    return Err(RegexError::UnknownLetter { letter: l, pos });
                }
                Ok(RegexAst::Literal(l))
            }
            Some(Tok::LParen) => {
                self.at += 1;
                if self.peek() == Some(&Tok::RParen) {
                    self.at += 1;
                    return Ok(RegexAst::Epsilon);
                }
                let inner = self.alt()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(RegexError::Syntax {
                        pos,
                        msg: "unmatched `(`".into(),
                    });
                }
                self.at += 1;
                Ok(inner)
            }
            _ => self.err("expected a letter or `(`"),
        }
    }
}

pub fn parse_regex(text: &str, alphabet: &Alphabet) -> Result<RegexAst, RegexError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        at: 0,
        end: text.len(),
        alphabet,
    };
    let ast = p.alt()?;
    if p.at != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(ast)
}

/// Infers an alphabet from the letters of `text`, sorted by name, then parses.
pub fn parse_regex_infer(text: &str) -> Result<(Alphabet, RegexAst), RegexError> {
    let names: BTreeSet<String> = lex(text)?
        .into_iter()
        .filter_map(|(_, t)| match t {
            Tok::Letter(l) => Some(l),
            _ => None,
        })
        .collect();
    let alphabet = Alphabet::new(names).expect("lexer only yields valid distinct letters");
    let ast = parse_regex(text, &alphabet)?;
    Ok((alphabet, ast))
}

/// Source text of the base language, over `{a, b, c, d}`.
pub const ELL2_SOURCE: &str = "(a b+ | a c+)* a b+ d (b+ d | c+ d)*";

/// The alphabet `A_m`: `{a,b,c,d}` extended by `x3,y3,...,xm,ym`.
pub fn ell_alphabet(m: usize) -> Result<Alphabet, RegexError> {
    if m < 2 {
        return Err(RegexError::BadLevel(m));
    }
    let mut names: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
    for k in 3..=m {
        names.push(format!("x{k}"));
        names.push(format!("y{k}"));
    }
    Ok(Alphabet::new(names).expect("generated names are valid and distinct"))
}

/// The language family: `ell_2` is [`ELL2_SOURCE`], and for `m > 2`
/// `ell_m = (A_{m-1} | xm)* xm ell_{m-1} ym (A_{m-1} | ym)*`.
pub fn build_ell(m: usize) -> Result<(Alphabet, RegexAst), RegexError> {
    let alphabet = ell_alphabet(m)?;
    let base_alphabet = ell_alphabet(2)?;
    let mut ast = parse_regex(ELL2_SOURCE, &base_alphabet)?;
    for k in 3..=m {
        let prev = ell_alphabet(k - 1)?;
        let x = format!("x{k}");
        let y = format!("y{k}");
        let block = |extra: &str| {
            RegexAst::union(
                prev.letters()
                    .iter()
                    .map(RegexAst::lit)
                    .chain(std::iter::once(RegexAst::lit(extra))),
            )
            .star()
        };
        ast = RegexAst::concat([
            block(&x),
            RegexAst::lit(&x),
            ast,
            RegexAst::lit(&y),
            block(&y),
        ]);
    }
    Ok((alphabet, ast))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abcd() -> Alphabet {
        Alphabet::new(["a", "b", "c", "d"]).unwrap()
    }

    #[test]
    fn parses_ell2() {
        let r = parse_regex(ELL2_SOURCE, &abcd()).unwrap();
        let l = RegexAst::lit;
        let expected = RegexAst::Concat(vec![
            RegexAst::Union(vec![
                RegexAst::Concat(vec![l("a"), l("b").plus()]),
                RegexAst::Concat(vec![l("a"), l("c").plus()]),
            ])
            .star(),
            l("a"),
            l("b").plus(),
            l("d"),
            RegexAst::Union(vec![
                RegexAst::Concat(vec![l("b").plus(), l("d")]),
                RegexAst::Concat(vec![l("c").plus(), l("d")]),
            ])
            .star(),
        ]);
        assert_eq!(r, expected);
        assert_eq!(r.to_string(), ELL2_SOURCE);
    }

    #[test]
    fn single_literal() {
        let a = Alphabet::new(["a"]).unwrap();
        assert_eq!(parse_regex("a", &a).unwrap(), RegexAst::lit("a"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_regex("(a", &abcd()).unwrap_err();
        assert!(matches!(err, RegexError::Syntax { pos: 0, .. }), "{err:?}");
        assert!(matches!(
            parse_regex("a |", &abcd()),
            Err(RegexError::Syntax { pos: 3, .. })
        ));
        assert!(matches!(
            parse_regex("a)", &abcd()),
            Err(RegexError::Syntax { pos: 1, .. })
        ));
        assert!(matches!(
            parse_regex("a e", &abcd()),
            Err(RegexError::UnknownLetter { pos: 2, .. })
        ));
        assert!(matches!(
            parse_regex("a & b", &abcd()),
            Err(RegexError::Syntax { pos: 2, .. })
        ));
        assert!(parse_regex("", &abcd()).is_err());
    }

    #[test]
    fn nested_groups_flatten() {
        let r = parse_regex("a (b c) ((d))", &abcd()).unwrap();
        assert_eq!(
            r,
            RegexAst::Concat(vec![
                RegexAst::lit("a"),
                RegexAst::lit("b"),
                RegexAst::lit("c"),
                RegexAst::lit("d")
            ])
        );
        let u = parse_regex("a | (b | c)", &abcd()).unwrap();
        assert!(matches!(&u, RegexAst::Union(cs) if cs.len() == 3));
    }

    #[test]
    fn printing_parenthesizes_where_needed() {
        let a = abcd();
        for src in [
            "(a*)*",
            "(a b)+",
            "a | b c",
            "(a | b) c",
            "()",
            "a ()*",
            "(a+)+",
        ] {
            let r = parse_regex(src, &a).unwrap();
            assert_eq!(r.to_string(), src);
            assert_eq!(parse_regex(&r.to_string(), &a).unwrap(), r);
        }
    }

    #[test]
    fn ell_levels() {
        let (a2, r2) = build_ell(2).unwrap();
        assert_eq!(a2.letters(), ["a", "b", "c", "d"]);
        assert_eq!(r2, parse_regex(ELL2_SOURCE, &a2).unwrap());

        let (a3, r3) = build_ell(3).unwrap();
        assert_eq!(a3.letters(), ["a", "b", "c", "d", "x3", "y3"]);
        let text = r3.to_string();
        assert_eq!(
            text,
            "(a | b | c | d | x3)* x3 (a b+ | a c+)* a b+ d (b+ d | c+ d)* y3 (a | b | c | d | y3)*"
        );
        assert_eq!(parse_regex(&text, &a3).unwrap(), r3);

        let (a4, r4) = build_ell(4).unwrap();
        assert_eq!(a4.len(), 8);
        let RegexAst::Concat(parts) = &r4 else {
            panic!("not a concat")
        };
        assert_eq!(parts[1], RegexAst::lit("x4"));
        assert_eq!(parts[parts.len() - 2], RegexAst::lit("y4"));
        assert!(r4
            .to_string()
            .starts_with("(a | b | c | d | x3 | y3 | x4)* x4 "));

        assert_eq!(build_ell(1).unwrap_err(), RegexError::BadLevel(1));
    }

    #[test]
    fn ell_letters_cover_alphabet() {
        for m in 2..=6 {
            let (a, r) = build_ell(m).unwrap();
            assert_eq!(a.len(), 2 * m);
            let used: Vec<&str> = r.letters().into_iter().collect();
            let mut all: Vec<&str> = a.letters().iter().map(String::as_str).collect();
            all.sort();
            assert_eq!(used, all);
            assert!(r.is_well_formed(&a));
        }
    }

    #[test]
    fn infer_alphabet_sorts_letters() {
        let (a, _) = parse_regex_infer("(b | a)* x3").unwrap();
        assert_eq!(a.letters(), ["a", "b", "x3"]);
    }
}
