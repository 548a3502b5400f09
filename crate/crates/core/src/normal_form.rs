//! Normal forms `g_1 u_1^{c_1} tau_1^{alpha_1} g_2 ... g_m u_m^{c_m}
//! tau_m^{alpha_m} g_{m+1}` of plain words over a tower.
//!
//! A word is first collected into blocks of commuting stable letters
//! separated by words `h_i` of the level below, merging two blocks over the
//! same `u` whenever the separating word commutes with `u`. Each block then
//! borrows `r_i = (10L)^(k-1)|h_i| + 1` copies of `u` from either side:
//! `g_i = u_{i-1}^{sigma_{i-1} r_i} h_i u_i^{sigma_i r_i}` and
//! `c_i = fold_i - sigma_i (r_i + r_{i+1})`.

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::free_group::free_reduce;
use crate::phi;
use crate::tower::{cyclic_reduction, Tower};
use crate::word::{Letter, Word};

/// Sign of the highest nonzero coordinate, or 0 for the zero vector.
pub fn sigma(alpha: &[i64]) -> i64 {
    alpha.iter().rev().find(|&&a| a != 0).map_or(0, |a| a.signum())
}

/// `tau^alpha = t_{u,1}^{alpha_1} ... t_{u,d}^{alpha_d}`.
pub fn tau_word(tower: &Tower, level: usize, entry: usize, alpha: &[i64]) -> Word {
    let e = tower.entry(level, entry);
    let mut out = Vec::new();
    for (&t, &a) in e.letters.iter().zip(alpha) {
        let l = if a < 0 { Letter::neg(t) } else { Letter::pos(t) };
        out.extend(std::iter::repeat_n(l, a.unsigned_abs() as usize));
    }
    Word(out)
}

/// One block `h u^fold tau^alpha` of a collected word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub h: Word,
    pub fold: i64,
    pub entry: usize,
    pub alpha: Vec<i64>,
}

/// `h_1 u_1^{fold_1} tau_1^{alpha_1} ... h_m u_m^{fold_m} tau_m^{alpha_m} h_{m+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Collected {
    pub level: usize,
    pub blocks: Vec<Block>,
    pub tail: Word,
}

impl Collected {
    pub fn flatten(&self, tower: &Tower) -> Word {
        let mut out = Vec::new();
        for b in &self.blocks {
            out.extend_from_slice(b.h.letters());
            out.extend(tower.entry(self.level, b.entry).u.pow(b.fold).0);
            out.extend(tau_word(tower, self.level, b.entry, &b.alpha).0);
        }
        out.extend_from_slice(self.tail.letters());
        Word(out)
    }
}

/// Decides `[u, h] = 1` and `h = u^c` in `G_{k-1}`.
struct LowerLevel {
    k: usize,
    lower: Tower,
}

impl LowerLevel {
    fn new(tower: &Tower, k: usize) -> Self {
        LowerLevel { k, lower: tower.truncated(k - 1) }
    }

    fn trivial(&self, w: &[Letter]) -> bool {
        if self.k == 1 {
            free_reduce(w).is_empty()
        } else {
            phi::word_problem(&self.lower, w)
        }
    }

    fn commute(&self, x: &Word, y: &Word) -> bool {
        self.trivial(Word::commutator(x, y).letters())
    }

    /// `c` with `h = u^c` and `|c||u| <= |h|`, if one exists.
    fn exponent(&self, u: &Word, h: &Word) -> Option<i64> {
        let h = free_reduce(h.letters());
        if h.is_empty() {
            return Some(0);
        }
        if self.k == 1 {
            let u = free_reduce(u.letters());
            let (x, v) = cyclic_reduction(u.letters());
            let conj = free_reduce(x.inverse().concat(&h).concat(&x).letters());
            if v.is_empty() || !conj.len().is_multiple_of(v.len()) {
                return None;
            }
            let c = (conj.len() / v.len()) as i64;
            return [c, -c].into_iter().find(|&c| v.pow(c) == conj && (c.unsigned_abs() as usize) * u.len() <= h.len());
        }
        let max = (h.len() / u.len().max(1)) as i64;
        (1..=max)
            .flat_map(|c| [c, -c])
            .find(|&c| self.trivial(u.pow(-c).concat(&h).letters()))
    }
}

/// Brings `w` into collected form at level `k` (letters of level above `k`
/// are not allowed). Never increases the length.
pub fn britton_collect(tower: &Tower, k: usize, w: &[Letter]) -> Collected {
    assert!(tower.word_level(w) <= k, "word above level {k}");
    if k == 0 {
        return Collected { level: 0, blocks: Vec::new(), tail: Word(w.to_vec()) };
    }
    let lower = LowerLevel::new(tower, k);
    let mut stack: Vec<Block> = Vec::new();
    let mut cur: Vec<Letter> = Vec::new();
    for &l in w {
        let s = match tower.stable_info(l.gen()) {
            Some(s) if s.level == k => s,
            _ => {
                cur.push(l);
                continue;
            }
        };
        let d = if l.is_inverse() { -1 } else { 1 };
        let u = &tower.entry(k, s.entry).u;
        let h = Word(std::mem::take(&mut cur));
        let merge = stack.last().is_some_and(|top| top.entry == s.entry) && lower.commute(u, &h);
        if !merge {
            let mut alpha = vec![0; tower.entry(k, s.entry).count()];
            alpha[s.index - 1] = d;
            stack.push(Block { h: free_reduce(h.letters()), fold: 0, entry: s.entry, alpha });
            continue;
        }
        // tau h tau' = h tau tau' since h commutes with u and the t's
        let top = stack.last_mut().expect("checked above");
        match lower.exponent(u, &h) {
            Some(c) => top.fold += c,
            // h also commutes with u^fold
            None => top.h = free_reduce(top.h.concat(&h).letters()),
        }
        top.alpha[s.index - 1] += d;
        if top.alpha.iter().all(|&a| a == 0) {
            let b = stack.pop().expect("nonempty");
            let mut h = b.h.0;
            h.extend(u.pow(b.fold).0);
            cur = h;
        }
    }
    let tail = free_reduce(&cur);
    Collected { level: k, blocks: stack, tail }
}

/// One syllable `g u^c tau^alpha`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syllable {
    pub g: Word,
    pub entry: usize,
    pub c: i64,
    pub alpha: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub level: usize,
    pub syllables: Vec<Syllable>,
    pub tail: Word,
}

impl NormalForm {
    pub fn syllable_count(&self) -> usize {
        self.syllables.len()
    }

    pub fn flatten(&self, tower: &Tower) -> Word {
        let mut out = Vec::new();
        for s in &self.syllables {
            out.extend_from_slice(s.g.letters());
            out.extend(tower.entry(self.level, s.entry).u.pow(s.c).0);
            out.extend(tau_word(tower, self.level, s.entry, &s.alpha).0);
        }
        out.extend_from_slice(self.tail.letters());
        Word(out)
    }

    /// Length of the flattened word, without building it.
    pub fn flat_len(&self, tower: &Tower) -> usize {
        self.syllables
            .iter()
            .map(|s| {
                let u = &tower.entry(self.level, s.entry).u;
                s.g.len() + s.c.unsigned_abs() as usize * u.len() + s.alpha.iter().map(|a| a.unsigned_abs() as usize).sum::<usize>()
            })
            .sum::<usize>()
            + self.tail.len()
    }

    /// The base words `g_1, ..., g_{m+1}`.
    pub fn gs(&self) -> Vec<&Word> {
        self.syllables.iter().map(|s| &s.g).chain(std::iter::once(&self.tail)).collect()
    }

    pub fn display(&self, tower: &Tower) -> String {
        let al = tower.alphabet();
        let mut s = String::new();
        for (i, syl) in self.syllables.iter().enumerate() {
            let u = &tower.entry(self.level, syl.entry).u;
            let _ = writeln!(
                s,
                "g{} = {}\nu{} = {}  c{} = {}  alpha{} = {:?}",
                i + 1,
                al.display_word(syl.g.letters()),
                i + 1,
                al.display_word(u.letters()),
                i + 1,
                syl.c,
                i + 1,
                syl.alpha
            );
        }
        let _ = writeln!(s, "g{} = {}", self.syllables.len() + 1, al.display_word(self.tail.letters()));
        s
    }
}

/// `(10L)^e`.
fn ten_l_pow(tower: &Tower, e: usize) -> BigUint {
    BigUint::from(10 * tower.constants().l).pow(e as u32)
}

/// Normal form of `w` at the top level of the tower.
pub fn normal_form(tower: &Tower, w: &[Letter]) -> NormalForm {
    normal_form_at(tower, tower.height(), w)
}

/// Normal form of a word over `X_k`.
pub fn normal_form_at(tower: &Tower, k: usize, w: &[Letter]) -> NormalForm {
    if k == 0 {
        return NormalForm { level: 0, syllables: Vec::new(), tail: free_reduce(w) };
    }
    let col = britton_collect(tower, k, w);
    let m = col.blocks.len();
    let scale = ten_l_pow(tower, k - 1);
    let hs: Vec<&Word> = col.blocks.iter().map(|b| &b.h).chain(std::iter::once(&col.tail)).collect();
    // r_1 .. r_{m+1}
    let r: Vec<i64> = hs
        .iter()
        .map(|h| (&scale * BigUint::from(h.len()) + 1u32).to_i64().expect("exponent fits in i64"))
        .collect();
    let sig: Vec<i64> = col.blocks.iter().map(|b| sigma(&b.alpha)).collect();
    let u_of = |i: usize| &tower.entry(k, col.blocks[i].entry).u;
    let mut syllables = Vec::with_capacity(m);
    let mut g_words = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let mut g = Vec::new();
        if i > 0 {
            g.extend(u_of(i - 1).pow(sig[i - 1] * r[i]).0);
        }
        g.extend_from_slice(hs[i].letters());
        if i < m {
            g.extend(u_of(i).pow(sig[i] * r[i]).0);
        }
        g_words.push(free_reduce(&g));
    }
    let tail = g_words.pop().expect("m + 1 words");
    for (i, (b, g)) in col.blocks.iter().zip(g_words).enumerate() {
        syllables.push(Syllable { g, entry: b.entry, c: b.fold - sig[i] * (r[i] + r[i + 1]), alpha: b.alpha.clone() });
    }
    NormalForm { level: k, syllables, tail }
}

/// Outcome of checking the structural conditions of a normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// Every `alpha_i` is nonzero.
    pub nonzero_alpha: bool,
    /// Every `g_i` lies over the alphabet one level down.
    pub lower_alphabet: bool,
    /// Consecutive syllables do not commute past each other.
    pub no_commuting_neighbours: bool,
    /// The flattened word equals the input in the group.
    pub equal_to_input: bool,
    pub flat_len: usize,
    /// `(10L)^k |w|`.
    pub length_bound: BigUint,
}

impl ConditionReport {
    pub fn all_ok(&self) -> bool {
        self.nonzero_alpha
            && self.lower_alphabet
            && self.no_commuting_neighbours
            && self.equal_to_input
            && BigUint::from(self.flat_len) <= self.length_bound
    }
}

/// Checks conditions (i)-(iii), equality with `w` and the length bound.
pub fn check_conditions(tower: &Tower, w: &[Letter], nf: &NormalForm) -> ConditionReport {
    let k = nf.level;
    let nonzero_alpha = nf.syllables.iter().all(|s| s.alpha.iter().any(|&a| a != 0));
    let lower_alphabet = nf.gs().iter().all(|g| tower.word_level(g.letters()) < k.max(1));
    let no_commuting_neighbours = if k == 0 {
        true
    } else {
        let lower = LowerLevel::new(tower, k);
        nf.syllables.windows(2).all(|p| {
            let ui = &tower.entry(k, p[0].entry).u;
            let uj = &tower.entry(k, p[1].entry).u;
            !lower.commute(ui, uj) || !lower.commute(ui, &p[1].g)
        })
    };
    let flat = nf.flatten(tower);
    let check = flat.concat(&Word(w.to_vec()).inverse());
    let equal_to_input = phi::word_problem(tower, check.letters());
    ConditionReport {
        nonzero_alpha,
        lower_alphabet,
        no_commuting_neighbours,
        equal_to_input,
        flat_len: flat.len(),
        length_bound: ten_l_pow(tower, k) * BigUint::from(w.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const G1: &str = "base a b\nlevel { centralizer u=\"a b\" count=1 letters t }\n";

    #[test]
    fn sigma_uses_leading_coordinate() {
        assert_eq!(sigma(&[3, -1]), -1);
        assert_eq!(sigma(&[-2, 0]), -1);
        assert_eq!(sigma(&[0, 0, 5]), 1);
        assert_eq!(sigma(&[0]), 0);
    }

    #[test]
    fn collect_examples() {
        let t = Tower::parse(G1).unwrap();
        let al = t.alphabet();
        let w = |s: &str| al.parse_word(s).unwrap();
        let c = britton_collect(&t, 1, w("a b a").letters());
        assert!(c.blocks.is_empty());
        let c = britton_collect(&t, 1, w("t a b t").letters());
        assert_eq!(c.blocks.len(), 1);
        assert_eq!(c.blocks[0].alpha, vec![2]);
        assert_eq!(c.blocks[0].fold, 1);
        let c = britton_collect(&t, 1, w("t a t").letters());
        assert_eq!(c.blocks.len(), 2);
        let c = britton_collect(&t, 1, w("b t (a b)^2 t^-1 a").letters());
        assert!(c.blocks.is_empty());
        assert_eq!(c.tail, w("b (a b)^2 a"));
        for s in ["t a b t", "b t (a b)^2 t^-1 a", "t a t^-1 b t b^-1 a^-1 b a t^-1"] {
            let x = w(s);
            let c = britton_collect(&t, 1, x.letters());
            assert!(c.flatten(&t).len() <= x.len());
            assert!(phi::word_problem(&t, c.flatten(&t).concat(&x.inverse()).letters()));
        }
    }

    #[test]
    fn two_syllables_over_ab() {
        let t = Tower::parse(G1).unwrap();
        let w = t.alphabet().parse_word("a (a b)^11 t^-1 a a b a^-1 t").unwrap();
        let nf = normal_form(&t, w.letters());
        assert_eq!(nf.syllable_count(), 2);
        assert_eq!(nf.syllables[0].alpha, vec![-1]);
        assert_eq!(nf.syllables[1].alpha, vec![1]);
        let rep = check_conditions(&t, w.letters(), &nf);
        assert!(rep.all_ok(), "{rep:?}");
        assert!(rep.flat_len <= 20 * 29);
    }

    #[test]
    fn base_words_reduce() {
        let t = Tower::parse(G1).unwrap();
        let w = t.alphabet().parse_word("a b b^-1 a").unwrap();
        let nf = normal_form(&t, w.letters());
        assert_eq!(nf.syllable_count(), 0);
        assert_eq!(nf.tail, t.alphabet().parse_word("a a").unwrap());
        let nf0 = normal_form(&Tower::free(["a", "b"]), w.letters());
        assert_eq!(nf0.tail.len(), 2);
    }
}
