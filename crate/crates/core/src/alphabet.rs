//! Ordered finite alphabets whose letters are short ASCII names.
//!
//! A letter is a lowercase ASCII letter optionally followed by decimal digits
//! (`a`, `d`, `x3`, `y12`). Because digits may only trail a letter, a word can
//! be written with or without separating whitespace and still tokenizes
//! uniquely: `x3ad` is the three-letter word `x3 a d`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a letter inside its [`Alphabet`].
pub type Letter = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlphabetError {
    #[error("invalid letter name `{0}` (expected [a-z] or [a-z][0-9]+)")]
    InvalidLetter(String),
    #[error("duplicate letter `{0}`")]
    Duplicate(String),
    #[error("unknown letter `{letter}` at position {pos}")]
    UnknownLetter { letter: String, pos: usize },
    #[error("unexpected character `{ch}` at position {pos} in word")]
    BadChar { ch: char, pos: usize },
}

#[derive(Clone, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    letters: Vec<String>,
    index: HashMap<String, Letter>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.letters.iter()).finish()
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = AlphabetError;

    fn try_from(letters: Vec<String>) -> Result<Self, Self::Error> {
        Alphabet::new(letters)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.letters
    }
}

pub fn is_letter_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => chars.all(|c| c.is_ascii_digit()),
        _ => false,
    }
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = Alphabet::default();
        for l in letters {
            out.push(l.into())?;
        }
        Ok(out)
    }

    pub fn push(&mut self, letter: String) -> Result<Letter, AlphabetError> {
        if !is_letter_name(&letter) {
            return Err(AlphabetError::InvalidLetter(letter));
        }
        if self.index.contains_key(&letter) {
            return Err(AlphabetError::Duplicate(letter));
        }
        let id = self.letters.len();
        self.index.insert(letter.clone(), id);
        self.letters.push(letter);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn name(&self, letter: Letter) -> &str {
        &self.letters[letter]
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn index_of(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Splits `word` into letters of this alphabet. Whitespace is ignored.
    pub fn parse_word(&self, word: &str) -> Result<Vec<Letter>, AlphabetError> {
        tokenize_letters(word)?
            .into_iter()
            .map(|(pos, name)| {
                self.index_of(&name)
                    .ok_or(AlphabetError::UnknownLetter { letter: name, pos })
            })
            .collect()
    }

    /// Concatenates letter names without separators (the form read back by
    /// [`Alphabet::parse_word`]).
    pub fn render_word(&self, word: &[Letter]) -> String {
        word.iter().map(|&l| self.name(l)).collect()
    }
}

/// Splits a string into letter-name tokens with their byte offsets.
pub fn tokenize_letters(word: &str) -> Result<Vec<(usize, String)>, AlphabetError> {
    let bytes = word.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_lowercase() {
            let start = i;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, word[start..i].to_string()));
        } else {
            let ch = word[i..].chars().next().unwrap_or('?');
            return Err(AlphabetError::BadChar { ch, pos: i });
        }
    }
    Ok(out)
}
