//! Letters over signed alphabets, plain words and the textual word syntax.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a generator inside an [`Alphabet`].
pub type GenId = u32;

/// A generator or its formal inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    gen: GenId,
    inverted: bool,
}

impl Letter {
    pub const fn new(gen: GenId, sign: i8) -> Self {
        Letter { gen, inverted: sign < 0 }
    }

    pub const fn pos(gen: GenId) -> Self {
        Letter { gen, inverted: false }
    }

    pub const fn neg(gen: GenId) -> Self {
        Letter { gen, inverted: true }
    }

    pub const fn gen(self) -> GenId {
        self.gen
    }

    /// `+1` or `-1`.
    pub const fn sign(self) -> i8 {
        if self.inverted {
            -1
        } else {
            1
        }
    }

    pub const fn is_inverse(self) -> bool {
        self.inverted
    }

    pub const fn inverse(self) -> Self {
        Letter { gen: self.gen, inverted: !self.inverted }
    }

    /// Dense code `2 * gen + (inverted as u32)`, handy for hashing tables.
    pub const fn code(self) -> u64 {
        (self.gen as u64) * 2 + self.inverted as u64
    }
}

/// Generator names, interned to dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, GenId>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut a = Alphabet::new();
        for n in names {
            a.intern(&n.into());
        }
        a
    }

    /// Returns the id of `name`, registering it if needed.
    pub fn intern(&mut self, name: &str) -> GenId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as GenId;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<GenId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, gen: GenId) -> &str {
        &self.names[gen as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn letter_name(&self, l: Letter) -> String {
        if l.is_inverse() {
            format!("{}^-1", self.name(l.gen()))
        } else {
            self.name(l.gen()).to_string()
        }
    }

    pub fn display_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter().map(|&l| self.letter_name(l)).collect::<Vec<_>>().join(" ")
    }

    /// Parses a word in this alphabet; see [`parse_word`].
    pub fn parse_word(&self, text: &str) -> Result<Word, WordParseError> {
        parse_word(text, self, DEFAULT_WORD_CAP)
    }
}

/// A plain (uncompressed) word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The reverse-inverse word.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `self^q` as a plain word (negative `q` repeats the inverse).
    pub fn pow(&self, q: i64) -> Word {
        let base = if q < 0 { self.inverse() } else { self.clone() };
        let n = q.unsigned_abs() as usize;
        let mut v = Vec::with_capacity(base.len() * n);
        for _ in 0..n {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.inverse().concat(&y.inverse()).concat(x).concat(y)
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Letter> {
        self.0.iter()
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverted {
            write!(f, "g{}^-1", self.gen)
        } else {
            write!(f, "g{}", self.gen)
        }
    }
}

/// Default cap on the length of a parsed word, in letters.
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordParseError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed exponent near `{0}`")]
    BadExponent(String),
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("word longer than the cap of {0} letters")]
    TooLong(usize),
}

/// Parses the word syntax: whitespace-separated generator names, each
/// optionally followed by `^<int>`, with parenthesised groups that also
/// accept exponents, e.g. `a (a b)^11 t^-1`. The empty string, `1` and `e`
/// (when not a generator) denote the empty word. An identifier that is not a
/// generator name is split into known names by longest match, so `(ab)^3`
/// works over generators `a`, `b`.
pub fn parse_word(text: &str, alphabet: &Alphabet, cap: usize) -> Result<Word, WordParseError> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let w = parse_seq(&tokens, &mut pos, alphabet, cap, 0)?;
    if pos != tokens.len() {
        return Err(WordParseError::Unbalanced);
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Open,
    Close,
    Exp(i64),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, WordParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' || c == '.' {
            i += 1;
        } else if c == '(' {
            out.push(Tok::Open);
            i += 1;
        } else if c == ')' {
            out.push(Tok::Close);
            i += 1;
        } else if c == '^' {
            i += 1;
            let start = i;
            if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let e = s.parse::<i64>().map_err(|_| WordParseError::BadExponent(s.clone()))?;
            out.push(Tok::Exp(e));
        } else if is_ident_char(c) {
            let start = i;
            while i < chars.len() && is_ident_char(chars[i]) {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else {
            return Err(WordParseError::UnexpectedChar(c));
        }
    }
    Ok(out)
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

fn parse_seq(
    toks: &[Tok],
    pos: &mut usize,
    alphabet: &Alphabet,
    cap: usize,
    depth: usize,
) -> Result<Word, WordParseError> {
    let mut out = Word::new();
    while *pos < toks.len() {
        let atom = match &toks[*pos] {
            Tok::Close => {
                if depth == 0 {
                    return Err(WordParseError::Unbalanced);
                }
                break;
            }
            Tok::Open => {
                *pos += 1;
                let inner = parse_seq(toks, pos, alphabet, cap, depth + 1)?;
                if *pos >= toks.len() || toks[*pos] != Tok::Close {
                    return Err(WordParseError::Unbalanced);
                }
                *pos += 1;
                inner
            }
            Tok::Ident(name) => {
                *pos += 1;
                resolve_ident(name, alphabet)?
            }
            Tok::Exp(e) => return Err(WordParseError::BadExponent(format!("^{e}"))),
        };
        let mut atom = atom;
        if let Some(Tok::Exp(e)) = toks.get(*pos) {
            *pos += 1;
            let total = atom.len().saturating_mul(e.unsigned_abs() as usize);
            if total > cap {
                return Err(WordParseError::TooLong(cap));
            }
            atom = atom.pow(*e);
        }
        if out.len() + atom.len() > cap {
            return Err(WordParseError::TooLong(cap));
        }
        out.0.extend(atom.0);
    }
    Ok(out)
}

fn resolve_ident(name: &str, alphabet: &Alphabet) -> Result<Word, WordParseError> {
    if let Some(g) = alphabet.lookup(name) {
        return Ok(Word(vec![Letter::pos(g)]));
    }
    if name == "1" || name == "e" {
        return Ok(Word::new());
    }
    // longest-match segmentation into known generator names
    let chars: Vec<char> = name.chars().collect();
    let n = chars.len();
    // best[i] = Some(split point) if chars[i..] can be segmented
    let mut next: Vec<Option<usize>> = vec![None; n + 1];
    let mut ok = vec![false; n + 1];
    ok[n] = true;
    for i in (0..n).rev() {
        for j in (i + 1..=n).rev() {
            if ok[j] {
                let piece: String = chars[i..j].iter().collect();
                if alphabet.contains(&piece) {
                    ok[i] = true;
                    next[i] = Some(j);
                    break;
                }
            }
        }
    }
    if !ok[0] {
        return Err(WordParseError::UnknownGenerator(name.to_string()));
    }
    let mut w = Word::new();
    let mut i = 0;
    while i < n {
        let j = next[i].expect("segmentation");
        let piece: String = chars[i..j].iter().collect();
        w.push(Letter::pos(alphabet.lookup(&piece).expect("segmented name")));
        i = j;
    }
    Ok(w)
}
