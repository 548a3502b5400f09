//! Towers `F = G_0 < G_1 < ... < G_n` of extensions of cyclic centralizers.
//!
//! Level `k` adjoins, for each centralizer entry `u` (a word over the
//! alphabet of level `k - 1`), `count` stable letters `t_{u,1..count}` that
//! commute with `u` and with each other. Generator ids are assigned in order:
//! base generators first, then the stable letters level by level, so the
//! alphabet of level `k` is a prefix of the full alphabet.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::free_group::free_reduce;
use crate::word::{is_ident_char, Alphabet, GenId, Letter, Word, WordParseError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("level {level}: malformed word `{text}`: {source}")]
    MalformedWord {
        level: usize,
        text: String,
        #[source]
        source: WordParseError,
    },
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("level {level}: centralizer word is empty or trivial")]
    TrivialCentralizer { level: usize },
    #[error("level {level}: entry needs at least one stable letter")]
    NoLetters { level: usize },
    #[error("level {level}: count {count} does not match {letters} letter names")]
    CountMismatch { level: usize, count: usize, letters: usize },
    #[error("level 1: `{0}` is not freely reduced")]
    NotReduced(String),
    #[error("level 1: `{0}` is a proper power")]
    ProperPower(String),
    #[error("level 1: `{0}` and `{1}` are conjugate (up to inversion)")]
    Conjugate(String, String),
    #[error("level {0} is out of range")]
    LevelOutOfRange(usize),
}

/// One centralizer generator together with its stable letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralizerEntry {
    /// The centralizer generator, as given.
    pub u: Word,
    /// Stable letters `t_{u,1} .. t_{u,count}`.
    pub letters: Vec<GenId>,
    /// Cyclically reduced core of `u` (level 1 only) with
    /// `u = conjugator * core * conjugator^-1` in the free group.
    pub core: Option<Word>,
    pub conjugator: Option<Word>,
}

impl CentralizerEntry {
    pub fn count(&self) -> usize {
        self.letters.len()
    }
}

/// Where a stable letter lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StableRef {
    /// 1-based level.
    pub level: usize,
    pub entry: usize,
    /// 1-based index `i` of `t_{u,i}`.
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TowerConstants {
    /// Longest centralizer word.
    pub l: usize,
    /// One more than the largest letter count.
    pub n: usize,
    /// Largest number of entries on one level.
    pub m: usize,
    /// Number of levels.
    pub levels: usize,
}

/// Input description of one entry, names still unresolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntrySpec {
    pub u: String,
    pub letters: Vec<String>,
}

impl EntrySpec {
    pub fn new(u: &str, letters: &[&str]) -> Self {
        EntrySpec { u: u.to_string(), letters: letters.iter().map(|s| s.to_string()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tower {
    alphabet: Alphabet,
    base: Vec<GenId>,
    levels: Vec<Vec<CentralizerEntry>>,
    stable: HashMap<GenId, StableRef>,
    warnings: Vec<String>,
}

impl Tower {
    /// The free group on `names`, with no levels.
    pub fn free<I, S>(names: I) -> Tower
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        Tower::new(&names, &[]).expect("free tower")
    }

    pub fn new(base: &[String], levels: &[Vec<EntrySpec>]) -> Result<Tower, TowerError> {
        let mut alphabet = Alphabet::new();
        for b in base {
            if alphabet.contains(b) {
                return Err(TowerError::DuplicateLetter(b.clone()));
            }
            alphabet.intern(b);
        }
        let base_ids: Vec<GenId> = (0..alphabet.len() as GenId).collect();
        let mut tower = Tower { alphabet, base: base_ids, levels: Vec::new(), stable: HashMap::new(), warnings: Vec::new() };
        for (li, specs) in levels.iter().enumerate() {
            let level = li + 1;
            // words are read over the previous level's alphabet
            let prev = tower.alphabet.clone();
            let mut entries = Vec::with_capacity(specs.len());
            for spec in specs {
                let u = prev.parse_word(&spec.u).map_err(|source| TowerError::MalformedWord {
                    level,
                    text: spec.u.clone(),
                    source,
                })?;
                if spec.letters.is_empty() {
                    return Err(TowerError::NoLetters { level });
                }
                entries.push((u, spec.letters.clone()));
            }
            let mut built = Vec::with_capacity(entries.len());
            for (ei, (u, names)) in entries.into_iter().enumerate() {
                if free_reduce(u.letters()).is_empty() {
                    return Err(TowerError::TrivialCentralizer { level });
                }
                let mut letters = Vec::with_capacity(names.len());
                for (i, name) in names.iter().enumerate() {
                    if tower.alphabet.contains(name) {
                        return Err(TowerError::DuplicateLetter(name.clone()));
                    }
                    let g = tower.alphabet.intern(name);
                    tower.stable.insert(g, StableRef { level, entry: ei, index: i + 1 });
                    letters.push(g);
                }
                built.push(CentralizerEntry { u, letters, core: None, conjugator: None });
            }
            if level == 1 {
                check_level_one(&mut built, &prev, &mut tower.warnings)?;
            } else {
                tower.warnings.push(format!(
                    "level {level}: centralizer generators are trusted input (cyclic centralizers not verified)"
                ));
            }
            tower.levels.push(built);
        }
        Ok(tower)
    }

    /// Parses the tower text format:
    ///
    /// ```text
    /// base a b
    /// level { centralizer u="a b" count=2 letters t1 t2 }
    /// ```
    ///
    /// Several `centralizer` statements may share a level, separated by
    /// newlines or `;`. `count` is optional when `letters` is given.
    pub fn parse(text: &str) -> Result<Tower, TowerError> {
        let toks = tokenize(text)?;
        let mut i = 0;
        let mut base: Option<Vec<String>> = None;
        let mut levels: Vec<Vec<EntrySpec>> = Vec::new();
        let syntax = |line: usize, msg: &str| TowerError::Syntax { line, msg: msg.to_string() };
        while i < toks.len() {
            let (line, ref t) = toks[i];
            match t {
                Tok::Word(w) if w == "base" => {
                    if base.is_some() {
                        return Err(syntax(line, "`base` given twice"));
                    }
                    i += 1;
                    let mut names = Vec::new();
                    while let Some((l2, Tok::Word(n))) = toks.get(i) {
                        if *l2 != line || n == "level" {
                            break;
                        }
                        names.push(n.clone());
                        i += 1;
                    }
                    base = Some(names);
                }
                Tok::Word(w) if w == "level" => {
                    i += 1;
                    if !matches!(toks.get(i), Some((_, Tok::Open))) {
                        return Err(syntax(line, "expected `{` after `level`"));
                    }
                    i += 1;
                    let mut entries = Vec::new();
                    loop {
                        match toks.get(i) {
                            Some((_, Tok::Close)) => {
                                i += 1;
                                break;
                            }
                            Some((_, Tok::Semi)) => i += 1,
                            Some((l, Tok::Word(w))) if w == "centralizer" => {
                                let l = *l;
                                i += 1;
                                entries.push(parse_entry(&toks, &mut i, l, levels.len() + 1)?);
                            }
                            Some((l, _)) => return Err(syntax(*l, "expected `centralizer` or `}`")),
                            None => return Err(syntax(line, "unterminated level block")),
                        }
                    }
                    levels.push(entries);
                }
                _ => return Err(syntax(line, "expected `base` or `level`")),
            }
        }
        let base = base.ok_or_else(|| syntax(0, "missing `base` line"))?;
        Tower::new(&base, &levels)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let base: Vec<&str> = self.base.iter().map(|&g| self.alphabet.name(g)).collect();
        let _ = writeln!(s, "base {}", base.join(" "));
        for entries in &self.levels {
            let _ = writeln!(s, "level {{");
            for e in entries {
                let letters: Vec<&str> = e.letters.iter().map(|&g| self.alphabet.name(g)).collect();
                let _ = writeln!(
                    s,
                    "  centralizer u=\"{}\" count={} letters {}",
                    self.alphabet.display_word(e.u.letters()),
                    e.count(),
                    letters.join(" ")
                );
            }
            let _ = writeln!(s, "}}");
        }
        s
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn base_generators(&self) -> &[GenId] {
        &self.base
    }

    /// Number of levels `n`.
    pub fn height(&self) -> usize {
        self.levels.len()
    }

    /// Entries of level `k` (1-based).
    pub fn level(&self, k: usize) -> &[CentralizerEntry] {
        &self.levels[k - 1]
    }

    pub fn entry(&self, level: usize, entry: usize) -> &CentralizerEntry {
        &self.levels[level - 1][entry]
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn stable_info(&self, g: GenId) -> Option<StableRef> {
        self.stable.get(&g).copied()
    }

    /// Level at which a generator is introduced (0 for base generators).
    pub fn level_of(&self, g: GenId) -> usize {
        self.stable.get(&g).map_or(0, |s| s.level)
    }

    /// Generators of `X_k`.
    pub fn generators_at(&self, k: usize) -> Result<Vec<GenId>, TowerError> {
        if k > self.height() {
            return Err(TowerError::LevelOutOfRange(k));
        }
        Ok((0..self.alphabet.len() as GenId).filter(|&g| self.level_of(g) <= k).collect())
    }

    /// The signed alphabet `X_k^±`.
    pub fn alphabet_at(&self, k: usize) -> Result<Vec<Letter>, TowerError> {
        Ok(self.generators_at(k)?.into_iter().flat_map(|g| [Letter::pos(g), Letter::neg(g)]).collect())
    }

    /// All generators of the top group `G_n`.
    pub fn generators(&self) -> Vec<GenId> {
        (0..self.alphabet.len() as GenId).collect()
    }

    /// Largest level among the letters of `w`.
    pub fn word_level(&self, w: &[Letter]) -> usize {
        w.iter().map(|l| self.level_of(l.gen())).max().unwrap_or(0)
    }

    pub fn constants(&self) -> TowerConstants {
        let entries = self.levels.iter().flatten();
        TowerConstants {
            l: entries.clone().map(|e| e.u.len()).max().unwrap_or(0),
            n: 1 + entries.map(|e| e.count()).max().unwrap_or(0),
            m: self.levels.iter().map(Vec::len).max().unwrap_or(0),
            levels: self.levels.len(),
        }
    }

    /// Total number of stable letters on level `k` (1-based).
    pub fn letters_on_level(&self, k: usize) -> usize {
        self.levels[k - 1].iter().map(CentralizerEntry::count).sum()
    }

    /// The tower cut down to levels `1..=k`, with the same generator ids.
    pub fn truncated(&self, k: usize) -> Tower {
        let k = k.min(self.height());
        let keep = self.alphabet.names().iter().enumerate().filter(|(g, _)| self.level_of(*g as GenId) <= k);
        let alphabet = Alphabet::from_names(keep.map(|(_, n)| n.clone()));
        let stable = self.stable.iter().filter(|(_, s)| s.level <= k).map(|(g, s)| (*g, *s)).collect();
        Tower {
            alphabet,
            base: self.base.clone(),
            levels: self.levels[..k].to_vec(),
            stable,
            warnings: self.warnings.iter().filter(|w| level_of_warning(w) <= k).cloned().collect(),
        }
    }

    /// The defining relators `[u, t_{u,i}]` and `[t_{u,i}, t_{u,j}]` (`i < j`).
    pub fn relators(&self) -> Vec<Word> {
        let mut out = Vec::new();
        for entries in &self.levels {
            for e in entries {
                for (i, &t) in e.letters.iter().enumerate() {
                    let tw = Word(vec![Letter::pos(t)]);
                    out.push(Word::commutator(&e.u, &tw));
                    for &s in &e.letters[i + 1..] {
                        out.push(Word::commutator(&tw, &Word(vec![Letter::pos(s)])));
                    }
                }
            }
        }
        out
    }
}

fn level_of_warning(w: &str) -> usize {
    w.strip_prefix("level ")
        .and_then(|r| r.split(':').next())
        .and_then(|n| n.parse().ok())
        .unwrap_or(0)
}

/// `(conjugator, core)` with `w = conjugator * core * conjugator^-1` and
/// `core` cyclically reduced; `w` must be freely reduced.
pub fn cyclic_reduction(w: &[Letter]) -> (Word, Word) {
    let mut i = 0;
    let mut j = w.len();
    while j >= i + 2 && w[i] == w[j - 1].inverse() {
        i += 1;
        j -= 1;
    }
    (Word(w[..i].to_vec()), Word(w[i..j].to_vec()))
}

/// Smallest `p` dividing `|w|` with `w` equal to its rotation by `p`.
pub fn primitive_period(w: &[Letter]) -> usize {
    let n = w.len();
    (1..=n).find(|&p| n.is_multiple_of(p) && (0..n).all(|i| w[i] == w[(i + p) % n])).unwrap_or(n)
}

/// Are two cyclically reduced words cyclic rotations of each other?
pub fn cyclic_rotation_equal(a: &[Letter], b: &[Letter]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let doubled: Vec<Letter> = a.iter().chain(a.iter()).copied().collect();
    doubled.windows(b.len()).any(|win| win == b)
}

fn check_level_one(
    entries: &mut [CentralizerEntry],
    alphabet: &Alphabet,
    warnings: &mut Vec<String>,
) -> Result<(), TowerError> {
    for e in entries.iter_mut() {
        let shown = alphabet.display_word(e.u.letters());
        if free_reduce(e.u.letters()) != e.u {
            return Err(TowerError::NotReduced(shown));
        }
        let (conj, core) = cyclic_reduction(e.u.letters());
        if primitive_period(core.letters()) < core.len() {
            return Err(TowerError::ProperPower(shown));
        }
        if !conj.is_empty() {
            warnings.push(format!(
                "level 1: `{}` is not cyclically reduced; core `{}`, conjugator `{}`",
                shown,
                alphabet.display_word(core.letters()),
                alphabet.display_word(conj.letters())
            ));
        }
        e.core = Some(core);
        e.conjugator = Some(conj);
    }
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            let a = entries[i].core.as_ref().unwrap();
            let b = entries[j].core.as_ref().unwrap();
            if cyclic_rotation_equal(a.letters(), b.letters()) || cyclic_rotation_equal(a.letters(), b.inverse().letters()) {
                return Err(TowerError::Conjugate(
                    alphabet.display_word(entries[i].u.letters()),
                    alphabet.display_word(entries[j].u.letters()),
                ));
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Open,
    Close,
    Semi,
    Eq,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, TowerError> {
    let mut out = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = body.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            match c {
                c if c.is_whitespace() => i += 1,
                '{' => {
                    out.push((line, Tok::Open));
                    i += 1;
                }
                '}' => {
                    out.push((line, Tok::Close));
                    i += 1;
                }
                ';' => {
                    out.push((line, Tok::Semi));
                    i += 1;
                }
                '=' => {
                    out.push((line, Tok::Eq));
                    i += 1;
                }
                '"' => {
                    let start = i + 1;
                    let end = chars[start..].iter().position(|&c| c == '"').map(|p| start + p).ok_or(
                        TowerError::Syntax { line, msg: "unterminated string".into() },
                    )?;
                    out.push((line, Tok::Str(chars[start..end].iter().collect())));
                    i = end + 1;
                }
                c if is_ident_char(c) => {
                    let start = i;
                    while i < chars.len() && is_ident_char(chars[i]) {
                        i += 1;
                    }
                    out.push((line, Tok::Word(chars[start..i].iter().collect())));
                }
                other => {
                    return Err(TowerError::Syntax { line, msg: format!("unexpected character `{other}`") })
                }
            }
        }
    }
    Ok(out)
}

fn parse_entry(toks: &[(usize, Tok)], i: &mut usize, line: usize, level: usize) -> Result<EntrySpec, TowerError> {
    let syntax = |l: usize, msg: String| TowerError::Syntax { line: l, msg };
    let mut u: Option<String> = None;
    let mut count: Option<usize> = None;
    let mut letters: Vec<String> = Vec::new();
    loop {
        match toks.get(*i) {
            None | Some((_, Tok::Close)) | Some((_, Tok::Semi)) => break,
            Some((_, Tok::Word(w))) if w == "centralizer" => break,
            Some((l, Tok::Word(key))) if key == "u" || key == "count" => {
                let l = *l;
                if !matches!(toks.get(*i + 1), Some((_, Tok::Eq))) {
                    return Err(syntax(l, format!("expected `=` after `{key}`")));
                }
                let val = match toks.get(*i + 2) {
                    Some((_, Tok::Str(s))) | Some((_, Tok::Word(s))) => s.clone(),
                    _ => return Err(syntax(l, format!("missing value for `{key}`"))),
                };
                if key == "u" {
                    u = Some(val);
                } else {
                    count = Some(val.parse().map_err(|_| syntax(l, format!("bad count `{val}`")))?);
                }
                *i += 3;
            }
            Some((l, Tok::Word(w))) if w == "letters" => {
                let l = *l;
                *i += 1;
                while let Some((_, Tok::Word(n))) = toks.get(*i) {
                    if n == "centralizer" || matches!(toks.get(*i + 1), Some((_, Tok::Eq))) {
                        break;
                    }
                    letters.push(n.clone());
                    *i += 1;
                }
                if letters.is_empty() {
                    return Err(syntax(l, "`letters` needs at least one name".into()));
                }
            }
            Some((l, t)) => return Err(syntax(*l, format!("unexpected token {t:?}"))),
        }
    }
    let u = u.ok_or_else(|| syntax(line, "centralizer needs `u=`".into()))?;
    if let Some(c) = count {
        if letters.is_empty() {
            letters = (1..=c).map(|j| format!("t{level}_{j}")).collect();
        } else if c != letters.len() {
            return Err(TowerError::CountMismatch { level, count: c, letters: letters.len() });
        }
    }
    Ok(EntrySpec { u, letters })
}
