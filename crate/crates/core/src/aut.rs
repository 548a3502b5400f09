//! Word problem in finitely generated subgroups of the automorphism group of
//! a tower group.
//!
//! A composition `phi_{i_1} ... phi_{i_m}` is compressed by the productions
//! `A_{j,0} -> g_j` and `A_{j,p} -> w_{i_p j}(A_{1,p-1}, ..., A_{n,p-1})`,
//! with a paired program `Abar_{j,p}` for the inverse of each word. The
//! composition is the identity iff every `A_{j,m} g_j^-1` is trivial.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::arena::{Arena, NodeId};
use crate::phi;
use crate::slp::Slp;
use crate::tower::Tower;
use crate::word::{is_ident_char, Alphabet, GenId, Letter, Word, WordParseError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AutError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("automorphism `{name}`: bad image for `{gen}`: {source}")]
    BadImage {
        name: String,
        gen: String,
        #[source]
        source: WordParseError,
    },
    #[error("automorphism `{0}` defined twice")]
    Duplicate(String),
    #[error("unknown automorphism `{0}`")]
    Unknown(String),
    #[error("automorphism `{0}` has no declared inverse")]
    MissingInverse(String),
    #[error("bad composition word: {0}")]
    Composition(WordParseError),
    #[error("automorphism `{0}` does not preserve the defining relators")]
    NotHomomorphism(String),
    #[error("factors overlap on `{0}`")]
    Overlap(String),
}

/// Images `g_j -> w_j` of every generator; unlisted generators are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismSpec {
    pub name: String,
    images: BTreeMap<GenId, Word>,
}

impl AutomorphismSpec {
    pub fn new(name: impl Into<String>, images: impl IntoIterator<Item = (GenId, Word)>) -> Self {
        AutomorphismSpec { name: name.into(), images: images.into_iter().collect() }
    }

    pub fn identity(name: impl Into<String>) -> Self {
        AutomorphismSpec::new(name, [])
    }

    /// The image of generator `g`, or `None` when `g` is fixed.
    pub fn image(&self, g: GenId) -> Option<&Word> {
        self.images.get(&g)
    }

    pub fn image_word(&self, g: GenId) -> Word {
        self.images.get(&g).cloned().unwrap_or_else(|| Word(vec![Letter::pos(g)]))
    }

    /// Explicitly listed images.
    pub fn listed(&self) -> impl Iterator<Item = (GenId, &Word)> {
        self.images.iter().map(|(g, w)| (*g, w))
    }

    /// Letterwise image of a plain word.
    pub fn apply(&self, w: &[Letter]) -> Word {
        let mut out = Vec::new();
        for &l in w {
            match self.images.get(&l.gen()) {
                Some(img) if l.is_inverse() => out.extend(img.inverse().0),
                Some(img) => out.extend_from_slice(img.letters()),
                None => out.push(l),
            }
        }
        Word(out)
    }
}

/// A named collection of automorphisms with their declared inverses.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AutSet {
    specs: Vec<AutomorphismSpec>,
    inverse: Vec<Option<usize>>,
    names: Alphabet,
}

impl AutSet {
    pub fn new() -> Self {
        AutSet::default()
    }

    pub fn len(&self) -> usize {
        self.specs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.specs.is_empty()
    }

    pub fn specs(&self) -> &[AutomorphismSpec] {
        &self.specs
    }

    pub fn get(&self, i: usize) -> &AutomorphismSpec {
        &self.specs[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.lookup(name).map(|g| g as usize)
    }

    pub fn inverse_of(&self, i: usize) -> Option<usize> {
        self.inverse[i]
    }

    pub fn push(&mut self, spec: AutomorphismSpec) -> Result<usize, AutError> {
        if self.names.contains(&spec.name) {
            return Err(AutError::Duplicate(spec.name));
        }
        self.names.intern(&spec.name);
        self.specs.push(spec);
        self.inverse.push(None);
        Ok(self.specs.len() - 1)
    }

    /// Declares `a` and `b` mutually inverse (`a == b` for involutions).
    pub fn set_inverse(&mut self, a: usize, b: usize) {
        self.inverse[a] = Some(b);
        self.inverse[b] = Some(a);
    }

    /// Adds a spec together with its inverse.
    pub fn push_pair(&mut self, spec: AutomorphismSpec, inv: AutomorphismSpec) -> Result<(), AutError> {
        let a = self.push(spec)?;
        let b = self.push(inv)?;
        self.set_inverse(a, b);
        Ok(())
    }

    pub fn push_involution(&mut self, spec: AutomorphismSpec) -> Result<(), AutError> {
        let a = self.push(spec)?;
        self.set_inverse(a, a);
        Ok(())
    }

    pub fn extend(&mut self, other: AutSet) -> Result<(), AutError> {
        let off = self.specs.len();
        for (i, s) in other.specs.into_iter().enumerate() {
            self.push(s)?;
            if let Some(j) = other.inverse[i] {
                self.inverse[off + i] = Some(off + j);
            }
        }
        Ok(())
    }

    /// Parses a composition word such as `beta12 (alpha1 beta21^-1)^3`; each
    /// letter is `(spec index, inverted)`.
    pub fn parse_composition(&self, text: &str) -> Result<Vec<(usize, bool)>, AutError> {
        let w = self.names.parse_word(text).map_err(AutError::Composition)?;
        Ok(w.iter().map(|l| (l.gen() as usize, l.is_inverse())).collect())
    }

    /// Parses automorphism definitions:
    ///
    /// ```text
    /// aut beta12 { x1 -> x1 x2 }
    /// aut beta12_inv inverse of beta12 { x1 -> x1 x2^-1 }
    /// ```
    ///
    /// Images are separated by `;` or newlines; unlisted generators are fixed.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<AutSet, AutError> {
        let clean: String = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .collect::<Vec<_>>()
            .join("\n");
        let chars: Vec<char> = clean.chars().collect();
        let line_at = |i: usize| chars[..i.min(chars.len())].iter().filter(|&&c| c == '\n').count() + 1;
        let mut set = AutSet::new();
        let mut pending: Vec<(usize, String, usize)> = Vec::new();
        let mut i = 0;
        let ident = |i: &mut usize| -> String {
            while *i < chars.len() && chars[*i].is_whitespace() {
                *i += 1;
            }
            let start = *i;
            while *i < chars.len() && is_ident_char(chars[*i]) {
                *i += 1;
            }
            chars[start..*i].iter().collect()
        };
        loop {
            let kw_pos = i;
            let kw = ident(&mut i);
            if kw.is_empty() {
                while i < chars.len() && chars[i].is_whitespace() {
                    i += 1;
                }
                if i >= chars.len() {
                    break;
                }
                return Err(AutError::Syntax { line: line_at(i), msg: format!("unexpected `{}`", chars[i]) });
            }
            if kw != "aut" {
                return Err(AutError::Syntax { line: line_at(kw_pos), msg: format!("expected `aut`, found `{kw}`") });
            }
            let name = ident(&mut i);
            if name.is_empty() {
                return Err(AutError::Syntax { line: line_at(i), msg: "missing automorphism name".into() });
            }
            let mut inverse_of = None;
            let save = i;
            if ident(&mut i) == "inverse" {
                if ident(&mut i) != "of" {
                    return Err(AutError::Syntax { line: line_at(i), msg: "expected `inverse of <name>`".into() });
                }
                let target = ident(&mut i);
                if target.is_empty() {
                    return Err(AutError::Syntax { line: line_at(i), msg: "missing name after `inverse of`".into() });
                }
                inverse_of = Some(target);
            } else {
                i = save;
            }
            while i < chars.len() && chars[i].is_whitespace() {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '{' {
                return Err(AutError::Syntax { line: line_at(i), msg: "expected `{`".into() });
            }
            let open = i;
            let close = chars[open..]
                .iter()
                .position(|&c| c == '}')
                .map(|p| open + p)
                .ok_or(AutError::Syntax { line: line_at(open), msg: "unterminated block".into() })?;
            let body: String = chars[open + 1..close].iter().collect();
            let mut images = Vec::new();
            for item in body.split([';', '\n']) {
                let item = item.trim();
                if item.is_empty() {
                    continue;
                }
                let (lhs, rhs) = item.split_once("->").ok_or(AutError::Syntax {
                    line: line_at(open),
                    msg: format!("expected `g -> word` in `{item}`"),
                })?;
                let gen = lhs.trim();
                let g = alphabet.lookup(gen).ok_or_else(|| AutError::BadImage {
                    name: name.clone(),
                    gen: gen.to_string(),
                    source: WordParseError::UnknownGenerator(gen.to_string()),
                })?;
                let w = alphabet.parse_word(rhs).map_err(|source| AutError::BadImage {
                    name: name.clone(),
                    gen: gen.to_string(),
                    source,
                })?;
                images.push((g, w));
            }
            let idx = set.push(AutomorphismSpec::new(name.clone(), images))?;
            if let Some(t) = inverse_of {
                pending.push((idx, t, line_at(kw_pos)));
            }
            i = close + 1;
        }
        for (idx, target, _) in pending {
            let j = set.index_of(&target).ok_or(AutError::Unknown(target))?;
            set.set_inverse(idx, j);
        }
        Ok(set)
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut s = String::new();
        for (i, spec) in self.specs.iter().enumerate() {
            s.push_str("aut ");
            s.push_str(&spec.name);
            if let Some(j) = self.inverse[i] {
                if j <= i {
                    s.push_str(" inverse of ");
                    s.push_str(&self.specs[j].name);
                }
            }
            let items: Vec<String> = spec
                .listed()
                .map(|(g, w)| format!("{} -> {}", alphabet.name(g), alphabet.display_word(w.letters())))
                .collect();
            s.push_str(&format!(" {{ {} }}\n", items.join(" ; ")));
        }
        s
    }
}

/// Does `spec` send every defining relator of the tower to the identity?
pub fn check_homomorphism(tower: &Tower, spec: &AutomorphismSpec) -> bool {
    tower.relators().iter().all(|r| phi::word_problem(tower, spec.apply(r.letters()).letters()))
}

/// Per-generator programs `A_{j,m}` and `Abar_{j,m}` sharing one arena.
#[derive(Debug, Clone)]
pub struct CompositionProgram {
    arena: Arena,
    gens: Vec<GenId>,
    roots: Vec<NodeId>,
    bar_roots: Vec<NodeId>,
    steps: usize,
}

impl CompositionProgram {
    pub fn generators(&self) -> &[GenId] {
        &self.gens
    }

    /// Number of composed automorphisms `m`.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Program producing `phi_{i_1} ... phi_{i_m}(g_j)` for the `j`-th generator.
    pub fn program(&self, j: usize) -> Slp {
        self.arena.export(self.roots[j])
    }

    pub fn bar_program(&self, j: usize) -> Slp {
        self.arena.export(self.bar_roots[j])
    }

    /// Distinct nonterminals over all generator programs.
    pub fn size(&self) -> usize {
        let all: Vec<NodeId> = self.roots.iter().chain(&self.bar_roots).copied().collect();
        self.arena.reachable(&all).len()
    }

    /// Produced lengths of the generator images.
    pub fn image_lengths(&self) -> Vec<num_bigint::BigUint> {
        self.roots.iter().map(|&r| self.arena.len(r).clone()).collect()
    }
}

/// Resolves signed composition letters to spec indices.
fn resolve(set: &AutSet, word: &[(usize, bool)]) -> Result<Vec<usize>, AutError> {
    word.iter()
        .map(|&(i, inv)| {
            if inv {
                set.inverse_of(i).ok_or_else(|| AutError::MissingInverse(set.get(i).name.clone()))
            } else {
                Ok(i)
            }
        })
        .collect()
}

/// Builds `A_{j,m}` for the composition `phi_{i_1} ... phi_{i_m}` given by
/// `word`, over the generators `gens`.
pub fn compose_slp(gens: &[GenId], set: &AutSet, word: &[(usize, bool)]) -> Result<CompositionProgram, AutError> {
    let steps = resolve(set, word)?;
    let mut arena = Arena::new();
    let pos: HashMap<GenId, usize> = gens.iter().enumerate().map(|(j, &g)| (g, j)).collect();
    let mut cur: Vec<NodeId> = gens.iter().map(|&g| arena.letter(Letter::pos(g))).collect();
    let mut bar: Vec<NodeId> = gens.iter().map(|&g| arena.letter(Letter::neg(g))).collect();
    for &i in &steps {
        let spec = set.get(i);
        let mut next = cur.clone();
        let mut next_bar = bar.clone();
        for (j, &g) in gens.iter().enumerate() {
            let Some(img) = spec.image(g) else { continue };
            let pick = |l: &Letter, flip: bool| {
                let k = pos[&l.gen()];
                if l.is_inverse() != flip {
                    bar[k]
                } else {
                    cur[k]
                }
            };
            let parts: Vec<NodeId> = img.iter().map(|l| pick(l, false)).collect();
            let bar_parts: Vec<NodeId> = img.iter().rev().map(|l| pick(l, true)).collect();
            next[j] = arena.concat_all(parts);
            next_bar[j] = arena.concat_all(bar_parts);
        }
        cur = next;
        bar = next_bar;
    }
    Ok(CompositionProgram { arena, gens: gens.to_vec(), roots: cur, bar_roots: bar, steps: steps.len() })
}

/// Outcome of one automorphism word problem.
#[derive(Debug, Clone)]
pub struct AutReport {
    pub identity: bool,
    /// Generators whose image differs from themselves.
    pub moved: Vec<GenId>,
    pub program_size: usize,
}

/// Is the composition the identity automorphism of the tower group?
pub fn aut_word_problem(tower: &Tower, set: &AutSet, word: &[(usize, bool)]) -> Result<bool, AutError> {
    Ok(aut_word_problem_report(tower, set, word)?.identity)
}

pub fn aut_word_problem_report(tower: &Tower, set: &AutSet, word: &[(usize, bool)]) -> Result<AutReport, AutError> {
    let gens = tower.generators();
    let prog = compose_slp(&gens, set, word)?;
    let moved: Vec<GenId> = std::thread::scope(|scope| {
        let handles: Vec<_> = gens
            .iter()
            .enumerate()
            .map(|(j, &g)| {
                let prog = &prog;
                scope.spawn(move || {
                    let check = prog.program(j).concat(&Slp::letter(Letter::neg(g)));
                    (g, phi::compressed_word_problem(tower, &check))
                })
            })
            .collect();
        handles.into_iter().filter_map(|h| {
            let (g, ok) = h.join().expect("worker panicked");
            (!ok).then_some(g)
        })
        .collect()
    });
    Ok(AutReport { identity: moved.is_empty(), moved, program_size: prog.size() })
}

/// Checks every spec named in `word` (and the inverses used) against the
/// relators before deciding.
pub fn checked_aut_word_problem(tower: &Tower, set: &AutSet, word: &[(usize, bool)]) -> Result<AutReport, AutError> {
    for i in resolve(set, word)? {
        if !check_homomorphism(tower, set.get(i)) {
            return Err(AutError::NotHomomorphism(set.get(i).name.clone()));
        }
    }
    aut_word_problem_report(tower, set, word)
}

fn nielsen_name(prefix: &str, i: usize, j: usize, r: usize) -> String {
    if r < 10 {
        format!("{prefix}{i}{j}")
    } else {
        format!("{prefix}{i}_{j}")
    }
}

/// Nielsen automorphisms of the free group on `gens`: `alpha_i` inverts
/// `x_i`, `beta_ij` sends `x_i` to `x_i x_j`, and `beta_ij_inv` sends `x_i`
/// to `x_i x_j^-1`. Names use 1-based positions in `gens`.
pub fn nielsen_catalog(gens: &[GenId]) -> AutSet {
    let r = gens.len();
    let mut set = AutSet::new();
    for (i, &x) in gens.iter().enumerate() {
        let spec = AutomorphismSpec::new(format!("alpha{}", i + 1), [(x, Word(vec![Letter::neg(x)]))]);
        set.push_involution(spec).expect("fresh names");
    }
    for (i, &x) in gens.iter().enumerate() {
        for (j, &y) in gens.iter().enumerate() {
            if i == j {
                continue;
            }
            let name = nielsen_name("beta", i + 1, j + 1, r);
            let fwd = AutomorphismSpec::new(name.clone(), [(x, Word(vec![Letter::pos(x), Letter::pos(y)]))]);
            let inv = AutomorphismSpec::new(format!("{name}_inv"), [(x, Word(vec![Letter::pos(x), Letter::neg(y)]))]);
            set.push_pair(fwd, inv).expect("fresh names");
        }
    }
    set
}

/// `(factor index, factor index, generator bijection)`.
pub type FactorIso = (usize, usize, Vec<(GenId, GenId)>);

/// A declared free-product decomposition `G = F_1 * ... * F_k * F(S)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Decomposition {
    /// `(factor name, generators)` of the freely indecomposable factors.
    pub factors: Vec<(String, Vec<GenId>)>,
    /// Basis `S` of the free part.
    pub free: Vec<GenId>,
    /// Declared isomorphisms between factors, as generator bijections.
    pub isos: Vec<FactorIso>,
}

impl Decomposition {
    /// Parses
    ///
    /// ```text
    /// factor A a b
    /// factor B c d
    /// free s1 s2
    /// iso A B a -> c, b -> d
    /// ```
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Decomposition, AutError> {
        let mut d = Decomposition::default();
        let mut seen: HashMap<GenId, ()> = HashMap::new();
        let lookup = |name: &str, line: usize| {
            alphabet
                .lookup(name)
                .ok_or(AutError::Syntax { line, msg: format!("unknown generator `{name}`") })
        };
        for (ln, raw) in text.lines().enumerate() {
            let line = ln + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut parts = body.split_whitespace();
            match parts.next() {
                Some("factor") => {
                    let name = parts.next().ok_or(AutError::Syntax { line, msg: "missing factor name".into() })?;
                    let mut gens = Vec::new();
                    for g in parts {
                        let id = lookup(g, line)?;
                        if seen.insert(id, ()).is_some() {
                            return Err(AutError::Overlap(g.to_string()));
                        }
                        gens.push(id);
                    }
                    d.factors.push((name.to_string(), gens));
                }
                Some("free") => {
                    for g in parts {
                        let id = lookup(g, line)?;
                        if seen.insert(id, ()).is_some() {
                            return Err(AutError::Overlap(g.to_string()));
                        }
                        d.free.push(id);
                    }
                }
                Some("iso") => {
                    let find = |n: Option<&str>| {
                        let n = n.ok_or(AutError::Syntax { line, msg: "missing factor name".into() })?;
                        d.factors
                            .iter()
                            .position(|(f, _)| f == n)
                            .ok_or(AutError::Syntax { line, msg: format!("unknown factor `{n}`") })
                    };
                    let a = find(parts.next())?;
                    let b = find(parts.next())?;
                    let rest: Vec<&str> = parts.collect();
                    let mut map = Vec::new();
                    for item in rest.join(" ").split(',') {
                        let (x, y) = item.split_once("->").ok_or(AutError::Syntax {
                            line,
                            msg: format!("expected `g -> h` in `{}`", item.trim()),
                        })?;
                        map.push((lookup(x.trim(), line)?, lookup(y.trim(), line)?));
                    }
                    d.isos.push((a, b, map));
                }
                Some(other) => return Err(AutError::Syntax { line, msg: format!("unexpected `{other}`") }),
                None => {}
            }
        }
        Ok(d)
    }
}

/// Generators of the automorphism group determined by a free-product
/// decomposition: factor permutations along declared isomorphisms,
/// conjugation of one factor by an element `x`, the transvections
/// `s -> s x` and `s -> x^-1 s` of free basis elements, and the Nielsen
/// automorphisms of the free part. With no non-free factors this is exactly
/// the Nielsen catalog of `S`.
pub fn whitehead_catalog(d: &Decomposition, alphabet: &Alphabet) -> Result<AutSet, AutError> {
    let mut set = nielsen_catalog(&d.free);
    if d.factors.is_empty() {
        return Ok(set);
    }
    let letter_name = |l: Letter| {
        let n = alphabet.name(l.gen());
        if l.is_inverse() {
            format!("{n}inv")
        } else {
            n.to_string()
        }
    };
    let all_gens: Vec<GenId> = d.factors.iter().flat_map(|(_, g)| g.iter().copied()).chain(d.free.iter().copied()).collect();
    let signed: Vec<Letter> = all_gens.iter().flat_map(|&g| [Letter::pos(g), Letter::neg(g)]).collect();
    for (a, b, map) in &d.isos {
        let name = format!("swap_{}_{}", d.factors[*a].0, d.factors[*b].0);
        let mut images = Vec::new();
        for &(x, y) in map {
            images.push((x, Word(vec![Letter::pos(y)])));
            images.push((y, Word(vec![Letter::pos(x)])));
        }
        set.push_involution(AutomorphismSpec::new(name, images))?;
    }
    for (fname, fgens) in &d.factors {
        for &x in &signed {
            if fgens.contains(&x.gen()) {
                continue;
            }
            let conj = |x: Letter| -> Vec<(GenId, Word)> {
                fgens.iter().map(|&f| (f, Word(vec![x.inverse(), Letter::pos(f), x]))).collect()
            };
            let name = format!("conj_{fname}_{}", letter_name(x));
            if set.index_of(&name).is_some() {
                continue;
            }
            let fwd = AutomorphismSpec::new(name, conj(x));
            let inv = AutomorphismSpec::new(format!("conj_{fname}_{}", letter_name(x.inverse())), conj(x.inverse()));
            set.push_pair(fwd, inv)?;
        }
    }
    for &s in &d.free {
        let sl = Letter::pos(s);
        let sname = alphabet.name(s);
        for &x in signed.iter().filter(|x| x.gen() != s && !x.is_inverse()) {
            // right transvections inside the free part are already Nielsen moves
            if !d.free.contains(&x.gen()) {
                let right = |x: Letter| AutomorphismSpec::new(format!("rmul_{sname}_{}", letter_name(x)), [(s, Word(vec![sl, x]))]);
                set.push_pair(right(x), right(x.inverse()))?;
            }
            let left = |x: Letter| AutomorphismSpec::new(format!("lmul_{sname}_{}", letter_name(x)), [(s, Word(vec![x.inverse(), sl]))]);
            set.push_pair(left(x), left(x.inverse()))?;
        }
    }
    Ok(set)
}
