//! Straight-line programs over signed alphabets.
//!
//! An [`Slp`] is a list of productions `A_1 .. A_n` where a pair production
//! only refers to strictly smaller indices; the last production is the
//! root. Sizes are counted in nonterminals.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arena::Arena;
use crate::word::{is_ident_char, Alphabet, GenId, Letter, Word};

/// Right-hand side of a production. Indices are 0-based here and printed
/// 1-based in the text format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Production {
    Pair(usize, usize),
    Terminal(Letter),
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slp {
    productions: Vec<Production>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlpError {
    #[error("invalid program: {0}")]
    Invalid(ValidationReport),
    #[error("cut length {k} exceeds produced length {len}")]
    CutOutOfRange { k: BigUint, len: BigUint },
    #[error("produced word is longer than the cap of {0} letters")]
    Overflow(usize),
    #[error("no image given for generator {0}")]
    MissingImage(GenId),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A pair production refers to an index that is not strictly smaller.
    IndexOrder,
    /// A pair production refers to an undefined nonterminal.
    Undefined,
    /// Nonterminal numbering skips this index.
    Gap,
    /// The root is not the last nonterminal.
    Root,
    /// The program has no productions at all.
    NoProductions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    /// 1-based index of the offending nonterminal.
    pub nonterminal: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> =
            self.violations.iter().map(|v| format!("A{}: {:?}", v.nonterminal, v.kind)).collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Checks a numbered rule set with explicit root. Indices are 1-based as in
/// the text format; numbering must be contiguous `1..=n` with root `n`.
pub fn validate_rules(rules: &BTreeMap<usize, Production1>, root: usize) -> ValidationReport {
    let mut violations = Vec::new();
    if rules.is_empty() {
        violations.push(Violation { nonterminal: root, kind: ViolationKind::NoProductions });
        return ValidationReport { violations };
    }
    let max = *rules.keys().next_back().unwrap();
    for i in 1..=max {
        if !rules.contains_key(&i) {
            violations.push(Violation { nonterminal: i, kind: ViolationKind::Gap });
        }
    }
    for (&i, p) in rules {
        if let Production1::Pair(j, k) = *p {
            for c in [j, k] {
                if c >= i {
                    violations.push(Violation { nonterminal: i, kind: ViolationKind::IndexOrder });
                } else if !rules.contains_key(&c) {
                    violations.push(Violation { nonterminal: i, kind: ViolationKind::Undefined });
                }
            }
        }
    }
    if root != max {
        violations.push(Violation { nonterminal: root, kind: ViolationKind::Root });
    }
    violations.dedup();
    ValidationReport { violations }
}

/// A production with 1-based references, as written in program files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Production1 {
    Pair(usize, usize),
    Terminal(Letter),
    Empty,
}

impl Slp {
    /// Builds a program, rejecting it if any invariant fails.
    pub fn new(productions: Vec<Production>) -> Result<Slp, SlpError> {
        let slp = Slp { productions };
        let report = slp.validate();
        if report.is_ok() {
            Ok(slp)
        } else {
            Err(SlpError::Invalid(report))
        }
    }

    pub fn from_productions_unchecked(productions: Vec<Production>) -> Slp {
        Slp { productions }
    }

    /// The one-production program for the empty word.
    pub fn empty() -> Slp {
        Slp { productions: vec![Production::Empty] }
    }

    pub fn letter(l: Letter) -> Slp {
        Slp { productions: vec![Production::Terminal(l)] }
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    /// Number of nonterminals.
    pub fn size(&self) -> usize {
        self.productions.len()
    }

    /// Bits needed to write the program down with fixed-width indices:
    /// a two-bit tag per production plus two index fields for pairs and one
    /// letter field for terminals.
    pub fn bit_size(&self) -> usize {
        let n = self.productions.len().max(2);
        let index_bits = usize::BITS as usize - (n - 1).leading_zeros() as usize;
        let max_gen = self
            .productions
            .iter()
            .filter_map(|p| match p {
                Production::Terminal(l) => Some(l.gen() as usize),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let letter_bits = 1 + usize::BITS as usize - max_gen.leading_zeros() as usize;
        self.productions
            .iter()
            .map(|p| {
                2 + match p {
                    Production::Pair(..) => 2 * index_bits,
                    Production::Terminal(_) => letter_bits,
                    Production::Empty => 0,
                }
            })
            .sum()
    }

    pub fn root(&self) -> usize {
        self.productions.len() - 1
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.productions.is_empty() {
            violations.push(Violation { nonterminal: 0, kind: ViolationKind::NoProductions });
        }
        for (i, p) in self.productions.iter().enumerate() {
            if let Production::Pair(j, k) = *p {
                if j >= i || k >= i {
                    violations.push(Violation { nonterminal: i + 1, kind: ViolationKind::IndexOrder });
                }
            }
        }
        ValidationReport { violations }
    }

    /// Produced length of every nonterminal, bottom-up.
    pub fn lengths(&self) -> Vec<BigUint> {
        let mut out: Vec<BigUint> = Vec::with_capacity(self.productions.len());
        for p in &self.productions {
            let l = match *p {
                Production::Empty => BigUint::zero(),
                Production::Terminal(_) => BigUint::one(),
                Production::Pair(j, k) => &out[j] + &out[k],
            };
            out.push(l);
        }
        out
    }

    pub fn produced_length(&self) -> BigUint {
        self.lengths().pop().unwrap_or_default()
    }

    pub fn height(&self) -> usize {
        let mut h: Vec<usize> = Vec::with_capacity(self.productions.len());
        for p in &self.productions {
            let v = match *p {
                Production::Pair(j, k) => h[j].max(h[k]) + 1,
                _ => 1,
            };
            h.push(v);
        }
        h.pop().unwrap_or(0)
    }

    /// The produced word, or [`SlpError::Overflow`] when it would exceed
    /// `cap` letters (checked before anything is allocated).
    pub fn expand(&self, cap: usize) -> Result<Word, SlpError> {
        let len = self.produced_length();
        match len.to_usize() {
            Some(n) if n <= cap => {}
            _ => return Err(SlpError::Overflow(cap)),
        }
        let mut out = Vec::with_capacity(len.to_usize().unwrap_or(0));
        let mut stack = vec![self.root()];
        while let Some(i) = stack.pop() {
            match self.productions[i] {
                Production::Empty => {}
                Production::Terminal(l) => out.push(l),
                Production::Pair(j, k) => {
                    stack.push(k);
                    stack.push(j);
                }
            }
        }
        Ok(Word(out))
    }

    /// Program of size at most `2|w| - 1` built by halving `w`; the empty
    /// word gives the one-production empty program.
    pub fn from_word(w: &Word) -> Slp {
        if w.is_empty() {
            return Slp::empty();
        }
        let mut arena = Arena::new();
        let root = arena.word(w.letters());
        arena.export(root)
    }

    /// Program for `w^q`; a negative `q` powers the reverse-inverse word.
    ///
    /// Size is at most `2|w| + floor(log2|q|) + (popcount(|q|) - 1)`: the
    /// word program, one doubling per bit below the leading one, and one
    /// correction pair per additional set bit. With `c = popcount(|q|) - 1`
    /// this is within `2|w| + ceil(log2|q|) + c`, and `c <= ceil(log2|q|)`.
    pub fn power(w: &Word, q: &BigInt) -> Slp {
        if q.is_zero() || w.is_empty() {
            return Slp::empty();
        }
        let base = if q.sign() == Sign::Minus { w.inverse() } else { w.clone() };
        let mut arena = Arena::new();
        let x = arena.word(base.letters());
        let root = arena.power(x, q.magnitude());
        arena.export(root)
    }

    /// The first `k` letters.
    pub fn cut_prefix(&self, k: &BigUint) -> Result<Slp, SlpError> {
        let len = self.produced_length();
        if *k > len {
            return Err(SlpError::CutOutOfRange { k: k.clone(), len });
        }
        let mut arena = Arena::new();
        let root = arena.import(self);
        let p = arena.prefix(root, k);
        Ok(arena.export(p))
    }

    /// The last `k` letters.
    pub fn cut_suffix(&self, k: &BigUint) -> Result<Slp, SlpError> {
        let len = self.produced_length();
        if *k > len {
            return Err(SlpError::CutOutOfRange { k: k.clone(), len });
        }
        let mut arena = Arena::new();
        let root = arena.import(self);
        let s = arena.suffix(root, k);
        Ok(arena.export(s))
    }

    /// Program for the reverse-inverse word: children of every pair are
    /// swapped and terminals inverted, so the size is unchanged.
    pub fn reverse_inverse(&self) -> Slp {
        let productions = self
            .productions
            .iter()
            .map(|p| match *p {
                Production::Pair(j, k) => Production::Pair(k, j),
                Production::Terminal(l) => Production::Terminal(l.inverse()),
                Production::Empty => Production::Empty,
            })
            .collect();
        Slp { productions }
    }

    /// `w_a w_b`, of size `|a| + |b| + 1`.
    pub fn concat(&self, other: &Slp) -> Slp {
        let off = self.productions.len();
        let mut productions = self.productions.clone();
        productions.extend(other.productions.iter().map(|p| match *p {
            Production::Pair(j, k) => Production::Pair(j + off, k + off),
            q => q,
        }));
        productions.push(Production::Pair(off - 1, productions.len() - 1));
        Slp { productions }
    }

    /// Applies the homomorphism sending generator `g` to the word of
    /// `images[g]` (and `g^-1` to its reverse-inverse). Image programs are
    /// copied once per signed letter that occurs, and terminal productions
    /// are redirected to the copied roots.
    pub fn substitute(&self, images: &HashMap<GenId, Slp>) -> Result<Slp, SlpError> {
        let mut productions: Vec<Production> = Vec::new();
        let mut image_root: HashMap<Letter, usize> = HashMap::new();
        for p in &self.productions {
            if let Production::Terminal(l) = *p {
                if image_root.contains_key(&l) {
                    continue;
                }
                let img = images.get(&l.gen()).ok_or(SlpError::MissingImage(l.gen()))?;
                let img = if l.is_inverse() { img.reverse_inverse() } else { img.clone() };
                let off = productions.len();
                productions.extend(img.productions.iter().map(|q| match *q {
                    Production::Pair(j, k) => Production::Pair(j + off, k + off),
                    q => q,
                }));
                image_root.insert(l, productions.len() - 1);
            }
        }
        let mut map: Vec<usize> = Vec::with_capacity(self.productions.len());
        for p in &self.productions {
            let idx = match *p {
                Production::Terminal(l) => image_root[&l],
                Production::Pair(j, k) => {
                    productions.push(Production::Pair(map[j], map[k]));
                    productions.len() - 1
                }
                Production::Empty => {
                    productions.push(Production::Empty);
                    productions.len() - 1
                }
            };
            map.push(idx);
        }
        // the root must come last
        let root = *map.last().expect("nonempty program");
        if root != productions.len() - 1 {
            return Ok(reroot(productions, root));
        }
        Ok(Slp { productions })
    }

    /// Rebuilds the program with height `O(log length)` by re-encoding its
    /// word as a balanced concatenation of maximal shared subtrees. Only
    /// used when cut chains grow tall; the word is unchanged.
    pub fn rebalanced(&self) -> Slp {
        let mut arena = Arena::new();
        let root = arena.import(self);
        let balanced = arena.rebalance(root);
        arena.export(balanced)
    }

    /// Renders the program in the text format.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut s = String::new();
        for (i, p) in self.productions.iter().enumerate() {
            let rhs = match *p {
                Production::Pair(j, k) => format!("A{} A{}", j + 1, k + 1),
                Production::Terminal(l) => alphabet.letter_name(l),
                Production::Empty => "^".to_string(),
            };
            let _ = writeln!(s, "A{} -> {}", i + 1, rhs);
        }
        let _ = writeln!(s, "root A{}", self.productions.len());
        s
    }

    /// Parses the text format, resolving letters in `alphabet`; unknown
    /// generator names are registered when `open` is set and rejected
    /// otherwise.
    pub fn parse(text: &str, alphabet: &mut Alphabet, open: bool) -> Result<Slp, SlpError> {
        let (rules, root) = parse_rules(text, alphabet, open)?;
        let report = validate_rules(&rules, root);
        if !report.is_ok() {
            return Err(SlpError::Invalid(report));
        }
        let productions = rules
            .into_values()
            .map(|p| match p {
                Production1::Pair(j, k) => Production::Pair(j - 1, k - 1),
                Production1::Terminal(l) => Production::Terminal(l),
                Production1::Empty => Production::Empty,
            })
            .collect();
        Ok(Slp { productions })
    }
}

fn reroot(productions: Vec<Production>, root: usize) -> Slp {
    let mut arena = Arena::new();
    let mut map = Vec::with_capacity(productions.len());
    for p in &productions {
        let id = match *p {
            Production::Empty => crate::arena::EMPTY,
            Production::Terminal(l) => arena.letter(l),
            Production::Pair(j, k) => arena.raw_pair(map[j], map[k]),
        };
        map.push(id);
    }
    arena.export(map[root])
}

fn parse_nonterminal(tok: &str) -> Option<usize> {
    let rest = tok.strip_prefix('A')?;
    if rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn parse_letter(tok: &str, alphabet: &mut Alphabet, open: bool) -> Result<Letter, String> {
    let (name, sign) = match tok.split_once('^') {
        Some((n, e)) => match e.trim() {
            "-1" => (n, -1),
            "1" | "+1" => (n, 1),
            other => return Err(format!("bad exponent `{other}` (only ^-1 allowed)")),
        },
        None => (tok, 1),
    };
    let name = name.trim();
    if name.is_empty() || !name.chars().all(is_ident_char) {
        return Err(format!("bad letter `{tok}`"));
    }
    let gen = match alphabet.lookup(name) {
        Some(g) => g,
        None if open => alphabet.intern(name),
        None => return Err(format!("unknown generator `{name}`")),
    };
    Ok(Letter::new(gen, sign))
}

/// Parses program text into numbered rules without validating them.
pub fn parse_rules(
    text: &str,
    alphabet: &mut Alphabet,
    open: bool,
) -> Result<(BTreeMap<usize, Production1>, usize), SlpError> {
    let mut rules = BTreeMap::new();
    let mut root = None;
    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let err = |msg: String| SlpError::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if root.is_some() {
            return Err(err("content after the root line".into()));
        }
        if let Some(rest) = line.strip_prefix("root") {
            let r = parse_nonterminal(rest.trim()).ok_or_else(|| err(format!("bad root `{}`", rest.trim())))?;
            root = Some(r);
            continue;
        }
        let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("expected `->`".into()))?;
        let i = parse_nonterminal(lhs.trim()).ok_or_else(|| err(format!("bad nonterminal `{}`", lhs.trim())))?;
        if i == 0 {
            return Err(err("nonterminals are numbered from 1".into()));
        }
        let toks: Vec<&str> = rhs.split_whitespace().collect();
        let prod = match toks.as_slice() {
            ["^"] => Production1::Empty,
            [a, b] => {
                let j = parse_nonterminal(a).ok_or_else(|| err(format!("bad nonterminal `{a}`")))?;
                let k = parse_nonterminal(b).ok_or_else(|| err(format!("bad nonterminal `{b}`")))?;
                Production1::Pair(j, k)
            }
            [t] => {
                if parse_nonterminal(t).is_some() {
                    return Err(err("unit productions are not allowed".into()));
                }
                Production1::Terminal(parse_letter(t, alphabet, open).map_err(err)?)
            }
            _ => {
                // `name ^-1` with spaces
                let joined = toks.concat();
                Production1::Terminal(parse_letter(&joined, alphabet, open).map_err(err)?)
            }
        };
        if rules.insert(i, prod).is_some() {
            return Err(err(format!("A{i} defined twice")));
        }
    }
    let root = root.ok_or(SlpError::Parse { line: 0, msg: "missing `root` line".into() })?;
    Ok((rules, root))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al() -> Alphabet {
        Alphabet::from_names(["a", "b"])
    }

    fn word(s: &str) -> Word {
        al().parse_word(s).unwrap()
    }

    fn doubling(k: usize) -> Slp {
        let mut p = vec![Production::Terminal(Letter::pos(0))];
        for i in 0..k {
            p.push(Production::Pair(i, i));
        }
        Slp::new(p).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(Slp::letter(Letter::pos(0)).validate().is_ok());
        let bad = Slp::from_productions_unchecked(vec![Production::Terminal(Letter::pos(0)), Production::Pair(1, 0)]);
        assert_eq!(bad.validate().violations, vec![Violation { nonterminal: 2, kind: ViolationKind::IndexOrder }]);
        let mut a = al();
        let gap = parse_rules("A1 -> a\nA3 -> A1 A1\nroot A3\n", &mut a, false).unwrap();
        let rep = validate_rules(&gap.0, gap.1);
        assert_eq!(rep.violations, vec![Violation { nonterminal: 2, kind: ViolationKind::Gap }]);
    }

    #[test]
    fn expand_and_length() {
        assert_eq!(Slp::letter(Letter::pos(0)).expand(10).unwrap(), word("a"));
        assert!(Slp::empty().expand(10).unwrap().is_empty());
        assert_eq!(Slp::empty().produced_length(), BigUint::zero());
        let d = doubling(10);
        assert_eq!(d.produced_length(), BigUint::from(1024u32));
        assert_eq!(d.expand(2000).unwrap(), word("a^1024"));
        assert_eq!(d.expand(1000), Err(SlpError::Overflow(1000)));
        assert_eq!(doubling(300).produced_length(), BigUint::one() << 300);
    }

    #[test]
    fn from_word_sizes() {
        let s = Slp::from_word(&word("a b"));
        assert!(s.size() <= 4);
        assert_eq!(s.expand(10).unwrap(), word("a b"));
        assert_eq!(Slp::from_word(&word("a")).size(), 1);
        assert_eq!(Slp::from_word(&Word::new()), Slp::empty());
    }

    #[test]
    fn power_examples() {
        let w = word("a b");
        assert_eq!(Slp::power(&w, &BigInt::from(1)).expand(100).unwrap(), w);
        let p4 = Slp::power(&w, &BigInt::from(4));
        assert_eq!(p4.expand(100).unwrap(), word("(a b)^4"));
        assert!(p4.size() <= 4 + 2 + 1);
        assert_eq!(Slp::power(&w, &BigInt::from(-2)).expand(100).unwrap(), word("b^-1 a^-1 b^-1 a^-1"));
        assert_eq!(Slp::power(&w, &BigInt::zero()), Slp::empty());
    }

    #[test]
    fn cuts() {
        let d = doubling(3);
        assert_eq!(d.cut_prefix(&BigUint::zero()).unwrap(), Slp::empty());
        assert_eq!(d.cut_prefix(&BigUint::from(8u32)).unwrap().expand(10).unwrap(), word("a^8"));
        assert_eq!(d.cut_suffix(&BigUint::from(3u32)).unwrap().expand(10).unwrap(), word("a^3"));
        assert!(matches!(d.cut_suffix(&BigUint::from(9u32)), Err(SlpError::CutOutOfRange { .. })));
    }

    #[test]
    fn reverse_inverse_examples() {
        let s = Slp::from_word(&word("a b"));
        assert_eq!(s.reverse_inverse().expand(10).unwrap(), word("b^-1 a^-1"));
        assert_eq!(s.reverse_inverse().reverse_inverse(), s);
        assert_eq!(Slp::empty().reverse_inverse(), Slp::empty());
    }

    #[test]
    fn concat_and_substitute() {
        let a = Slp::letter(Letter::pos(0));
        let b = Slp::letter(Letter::pos(1));
        let ab = a.concat(&b);
        assert_eq!(ab.expand(10).unwrap(), word("a b"));
        assert_eq!(ab.size(), 3);
        let t = Slp::letter(Letter::pos(2));
        let images = HashMap::from([(2, Slp::from_word(&word("a b a b")))]);
        assert_eq!(t.substitute(&images).unwrap().expand(10).unwrap(), word("a b a b"));
        let id = HashMap::from([(0, a.clone()), (1, b.clone())]);
        let x = Slp::from_word(&word("a b^-1 a a"));
        assert_eq!(x.substitute(&id).unwrap().expand(10).unwrap(), word("a b^-1 a a"));
        assert_eq!(x.substitute(&HashMap::new()), Err(SlpError::MissingImage(0)));
    }

    #[test]
    fn text_round_trip() {
        let mut a = al();
        let text = "A1 -> a\nA2 -> b^-1\nA3 -> A1 A2\nA4 -> ^\nA5 -> A3 A4\nroot A5\n";
        let s = Slp::parse(text, &mut a, false).unwrap();
        assert_eq!(s.to_text(&a), text);
        assert_eq!(s.expand(10).unwrap(), word("a b^-1"));
        assert!(Slp::parse("A1 -> c\nroot A1", &mut a, false).is_err());
        assert!(Slp::parse("A1 -> c\nroot A1", &mut a, true).is_ok());
        assert!(matches!(Slp::parse("A2 -> A2 A1\nA1 -> a\nroot A2", &mut a, false), Err(SlpError::Invalid(_))));
    }
}
