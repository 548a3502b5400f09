//! Equality of grammar-compressed words by recompression.
//!
//! Both words live in one grammar whose rule bodies are strings of letters
//! and nonterminals. Each phase compresses maximal blocks `a^l` into fresh
//! letters and then compresses pairs `ab` for a partition of the current
//! letters into left and right halves. Letters that straddle a nonterminal
//! boundary are first popped out of that nonterminal into its parents, so
//! every occurrence is compressed the same way. Both transformations are
//! injective on words, so the two texts stay equal exactly when the inputs
//! were; once neither text mentions a nonterminal they are compared
//! directly. Nothing is ever expanded: block lengths are kept as big
//! integers.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::arena::{splitmix, Arena, NodeId, Rhs};

type Lt = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sym {
    Letter(Lt),
    Run(Lt, BigUint),
    Nt(u32),
}

/// Statistics of one equality run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecompressionStats {
    pub phases: usize,
    pub initial_rules: usize,
    pub peak_body_symbols: usize,
}

struct Grammar {
    bodies: Vec<Vec<Sym>>,
    /// index of the first of the two top rules (the compared texts)
    tops: usize,
    next_letter: Lt,
    phase: u64,
    stats: RecompressionStats,
}

/// Decides whether the words of two (possibly reverse-inverted) arena
/// nodes coincide. `(id, true)` stands for the reverse-inverse of `id`.
pub fn equal_nodes(arena: &Arena, a: (NodeId, bool), b: (NodeId, bool)) -> bool {
    equal_nodes_with_stats(arena, a, b).0
}

pub fn equal_nodes_with_stats(
    arena: &Arena,
    a: (NodeId, bool),
    b: (NodeId, bool),
) -> (bool, RecompressionStats) {
    if arena.len(a.0) != arena.len(b.0) {
        return (false, RecompressionStats::default());
    }
    let mut g = Grammar::import(arena, a, b);
    let eq = g.run();
    (eq, g.stats)
}

impl Grammar {
    fn import(arena: &Arena, a: (NodeId, bool), b: (NodeId, bool)) -> Grammar {
        // (node, inverted) pairs needed, discovered from the roots
        let mut needed: HashMap<(NodeId, bool), u32> = HashMap::new();
        let mut stack = vec![a, b];
        let mut keys = Vec::new();
        while let Some(k) = stack.pop() {
            if needed.contains_key(&k) {
                continue;
            }
            needed.insert(k, 0);
            keys.push(k);
            if let Rhs::Pair(x, y) = arena.rhs(k.0) {
                stack.push((x, k.1));
                stack.push((y, k.1));
            }
        }
        keys.sort_unstable();
        for (i, k) in keys.iter().enumerate() {
            needed.insert(*k, i as u32);
        }
        let mut max_letter = 0;
        let mut bodies = Vec::with_capacity(keys.len() + 2);
        for &(id, inv) in &keys {
            let body = match arena.rhs(id) {
                Rhs::Empty => vec![],
                Rhs::Letter(l) => {
                    let l = if inv { l.inverse() } else { l };
                    let c = l.code() as Lt;
                    max_letter = max_letter.max(c);
                    vec![Sym::Letter(c)]
                }
                Rhs::Pair(x, y) => {
                    let (x, y) = if inv { (y, x) } else { (x, y) };
                    vec![Sym::Nt(needed[&(x, inv)]), Sym::Nt(needed[&(y, inv)])]
                }
            };
            bodies.push(body);
        }
        let tops = bodies.len();
        bodies.push(vec![Sym::Nt(needed[&a])]);
        bodies.push(vec![Sym::Nt(needed[&b])]);
        let initial_rules = tops;
        Grammar {
            bodies,
            tops,
            next_letter: max_letter + 1,
            phase: 0,
            stats: RecompressionStats { initial_rules, ..Default::default() },
        }
    }

    fn is_top(&self, x: usize) -> bool {
        x >= self.tops
    }

    fn texts_explicit(&self) -> bool {
        self.bodies[self.tops..]
            .iter()
            .all(|b| b.iter().all(|s| !matches!(s, Sym::Nt(_))))
    }

    fn compare_texts(&self) -> bool {
        normalize_runs(&self.bodies[self.tops]) == normalize_runs(&self.bodies[self.tops + 1])
    }

    fn fresh(&mut self) -> Lt {
        let l = self.next_letter;
        self.next_letter += 1;
        l
    }

    fn run(&mut self) -> bool {
        self.inline_small();
        loop {
            if self.texts_explicit() {
                return self.compare_texts();
            }
            self.stats.phases += 1;
            self.phase += 1;
            self.block_phase();
            self.inline_small();
            if self.texts_explicit() {
                return self.compare_texts();
            }
            self.pair_phase();
            self.inline_small();
            let total: usize = self.bodies.iter().map(Vec::len).sum();
            self.stats.peak_body_symbols = self.stats.peak_body_symbols.max(total);
        }
    }

    /// Replaces references to rules whose body has at most one symbol.
    fn inline_small(&mut self) {
        for x in 0..self.bodies.len() {
            if !self.bodies[x].iter().any(|s| matches!(s, Sym::Nt(y) if self.bodies[*y as usize].len() <= 1)) {
                continue;
            }
            let old = std::mem::take(&mut self.bodies[x]);
            let mut body = Vec::with_capacity(old.len());
            for s in old {
                match s {
                    Sym::Nt(y) if self.bodies[y as usize].len() <= 1 => {
                        if let Some(inner) = self.bodies[y as usize].first() {
                            push_sym(&mut body, inner.clone());
                        }
                    }
                    other => push_sym(&mut body, other),
                }
            }
            self.bodies[x] = body;
        }
    }

    fn block_phase(&mut self) {
        let n = self.bodies.len();
        let mut pre: Vec<Option<(Lt, BigUint)>> = vec![None; n];
        let mut suf: Vec<Option<(Lt, BigUint)>> = vec![None; n];
        for x in 0..n {
            let old = std::mem::take(&mut self.bodies[x]);
            let mut body: Vec<Sym> = Vec::with_capacity(old.len() + 4);
            for s in old {
                match s {
                    Sym::Nt(y) => {
                        let y = y as usize;
                        if let Some((a, c)) = &pre[y] {
                            push_run(&mut body, *a, c.clone());
                        }
                        if !self.bodies[y].is_empty() {
                            body.push(Sym::Nt(y as u32));
                        }
                        if let Some((a, c)) = &suf[y] {
                            push_run(&mut body, *a, c.clone());
                        }
                    }
                    Sym::Letter(a) => push_run(&mut body, a, BigUint::one()),
                    Sym::Run(a, c) => push_run(&mut body, a, c),
                }
            }
            if !self.is_top(x) {
                if let Some(first) = body.first() {
                    if let Some(r) = as_run(first) {
                        pre[x] = Some(r);
                        body.remove(0);
                    }
                }
                if let Some(last) = body.last() {
                    if let Some(r) = as_run(last) {
                        suf[x] = Some(r);
                        body.pop();
                    }
                }
            }
            self.bodies[x] = body;
        }
        // every maximal block now sits inside one body
        let mut names: HashMap<(Lt, BigUint), Lt> = HashMap::new();
        for x in 0..n {
            if !self.bodies[x].iter().any(|s| matches!(s, Sym::Run(..))) {
                continue;
            }
            let old = std::mem::take(&mut self.bodies[x]);
            let mut body = Vec::with_capacity(old.len());
            for s in old {
                match s {
                    Sym::Run(a, c) => {
                        let key = (a, c);
                        let l = match names.get(&key) {
                            Some(&l) => l,
                            None => {
                                let l = self.fresh();
                                names.insert(key, l);
                                l
                            }
                        };
                        body.push(Sym::Letter(l));
                    }
                    other => body.push(other),
                }
            }
            self.bodies[x] = body;
        }
    }

    fn is_left(&self, a: Lt) -> bool {
        splitmix((a as u64) ^ (self.phase << 40)) & 1 == 0
    }

    fn pair_phase(&mut self) {
        let n = self.bodies.len();
        let mut lpop: Vec<Option<Lt>> = vec![None; n];
        let mut rpop: Vec<Option<Lt>> = vec![None; n];
        let mut names: HashMap<(Lt, Lt), Lt> = HashMap::new();
        for x in 0..n {
            let old = std::mem::take(&mut self.bodies[x]);
            let mut body: Vec<Sym> = Vec::with_capacity(old.len() + 4);
            for s in old {
                match s {
                    Sym::Nt(y) => {
                        let yi = y as usize;
                        if let Some(b) = lpop[yi] {
                            body.push(Sym::Letter(b));
                        }
                        if !self.bodies[yi].is_empty() {
                            body.push(Sym::Nt(y));
                        }
                        if let Some(a) = rpop[yi] {
                            body.push(Sym::Letter(a));
                        }
                    }
                    Sym::Run(..) => unreachable!("runs are compressed before pairing"),
                    letter => body.push(letter),
                }
            }
            if !self.is_top(x) {
                if let Some(&Sym::Letter(b)) = body.first() {
                    if !self.is_left(b) {
                        lpop[x] = Some(b);
                        body.remove(0);
                    }
                }
                if let Some(&Sym::Letter(a)) = body.last() {
                    if self.is_left(a) {
                        rpop[x] = Some(a);
                        body.pop();
                    }
                }
            }
            // compress left-right pairs; they cannot overlap
            let mut out = Vec::with_capacity(body.len());
            let mut i = 0;
            while i < body.len() {
                if let (Sym::Letter(a), Some(Sym::Letter(b))) = (&body[i], body.get(i + 1)) {
                    if self.is_left(*a) && !self.is_left(*b) {
                        let key = (*a, *b);
                        let l = match names.get(&key) {
                            Some(&l) => l,
                            None => {
                                let l = self.fresh();
                                names.insert(key, l);
                                l
                            }
                        };
                        out.push(Sym::Letter(l));
                        i += 2;
                        continue;
                    }
                }
                out.push(body[i].clone());
                i += 1;
            }
            self.bodies[x] = out;
        }
    }
}

fn as_run(s: &Sym) -> Option<(Lt, BigUint)> {
    match s {
        Sym::Letter(a) => Some((*a, BigUint::one())),
        Sym::Run(a, c) => Some((*a, c.clone())),
        Sym::Nt(_) => None,
    }
}

fn push_run(body: &mut Vec<Sym>, a: Lt, c: BigUint) {
    match body.last_mut() {
        Some(Sym::Letter(b)) if *b == a => {
            *body.last_mut().unwrap() = Sym::Run(a, c + 1u32);
        }
        Some(Sym::Run(b, d)) if *b == a => {
            *d += c;
        }
        _ => {
            if c.is_one() {
                body.push(Sym::Letter(a));
            } else {
                body.push(Sym::Run(a, c));
            }
        }
    }
}

fn push_sym(body: &mut Vec<Sym>, s: Sym) {
    match s {
        Sym::Run(a, c) => push_run(body, a, c),
        Sym::Letter(a) => match body.last() {
            Some(Sym::Letter(b)) | Some(Sym::Run(b, _)) if *b == a => push_run(body, a, BigUint::one()),
            _ => body.push(Sym::Letter(a)),
        },
        nt => body.push(nt),
    }
}

fn normalize_runs(body: &[Sym]) -> Vec<(Lt, BigUint)> {
    let mut out: Vec<(Lt, BigUint)> = Vec::with_capacity(body.len());
    for s in body {
        let (a, c) = as_run(s).expect("explicit text");
        match out.last_mut() {
            Some((b, d)) if *b == a => *d += c,
            _ => out.push((a, c)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Letter;

    fn w(s: &str) -> Vec<Letter> {
        s.chars()
            .map(|c| {
                if c.is_ascii_uppercase() {
                    Letter::neg(c.to_ascii_lowercase() as u32 - 'a' as u32)
                } else {
                    Letter::pos(c as u32 - 'a' as u32)
                }
            })
            .collect()
    }

    #[test]
    fn equal_words_with_different_grammars() {
        let mut ar = Arena::new();
        let x = ar.word(&w("abaababaab"));
        let ab = ar.word(&w("ab"));
        let aba = ar.word(&w("aba"));
        let abaab = ar.pair(aba, ab);
        let y = ar.pair(abaab, abaab);
        assert!(equal_nodes(&ar, (x, false), (y, false)));
        let z = ar.word(&w("abaababaaa"));
        assert!(!equal_nodes(&ar, (x, false), (z, false)));
    }

    #[test]
    fn huge_blocks() {
        let mut ar = Arena::new();
        let a = ar.word(&w("a"));
        let aa = ar.word(&w("aa"));
        let big = BigUint::one() << 100;
        let x = ar.power(a, &(&big * 2u32));
        let y = ar.power(aa, &big);
        assert!(equal_nodes(&ar, (x, false), (y, false)));
        let y2 = ar.power(aa, &(&big - 1u32));
        let y3 = ar.pair(y2, a);
        let y4 = ar.pair(y3, a);
        assert!(equal_nodes(&ar, (x, false), (y4, false)));
        let b = ar.word(&w("b"));
        let y5 = ar.pair(y3, b);
        assert!(!equal_nodes(&ar, (x, false), (y5, false)));
    }

    #[test]
    fn inverted_orientation() {
        let mut ar = Arena::new();
        let x = ar.word(&w("abC"));
        let y = ar.word(&w("cBA"));
        assert!(equal_nodes(&ar, (x, true), (y, false)));
        assert!(!equal_nodes(&ar, (x, false), (y, false)));
    }

    #[test]
    fn empty_words() {
        let mut ar = Arena::new();
        let e = crate::arena::EMPTY;
        assert!(equal_nodes(&ar, (e, false), (e, true)));
        let a = ar.word(&w("a"));
        assert!(!equal_nodes(&ar, (e, false), (a, false)));
    }
}
