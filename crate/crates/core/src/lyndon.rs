//! A Lyndon length function `l: G -> Z[t]` on a single extension of a
//! centralizer `G = <F, t | [u, t] = 1>`.
//!
//! For `w = g_1 t^{a_1} g_2 ... g_m t^{a_m} g_{m+1}` in reduced form,
//! `l(w) = (l_1(w, M), sum |a_i|)` where
//! `l_1(w, M) = |g_1 u^{e_1 M} g_2 ... u^{e_m M} g_{m+1}| - m |u^M|`
//! (free lengths, `e_i = sgn a_i`) does not depend on `M > |w|`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::free_group::free_reduce;
use crate::normal_form::britton_collect;
use crate::tower::{EntrySpec, Tower};
use crate::word::{Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LyndonError {
    #[error("the length function needs one level with one centralizer and one stable letter")]
    Shape,
    #[error("common prefix length {0} is not integral")]
    NotIntegral(LengthVector),
}

/// Finitely supported integer sequence, ordered right-lexicographically
/// (the highest nonzero coordinate decides).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LengthVector(Vec<i64>);

impl LengthVector {
    pub fn new(mut coeffs: Vec<i64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        LengthVector(coeffs)
    }

    pub fn zero() -> Self {
        LengthVector(Vec::new())
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    /// Index of the last nonzero coordinate.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Sign of the leading coordinate.
    pub fn sigma(&self) -> i64 {
        self.0.last().map_or(0, |c| c.signum())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Halves every coordinate, if all are even.
    pub fn half(&self) -> Option<LengthVector> {
        self.0.iter().all(|c| c % 2 == 0).then(|| LengthVector(self.0.iter().map(|c| c / 2).collect()))
    }

    /// The first `n` coordinates, zero padded.
    pub fn to_array(&self, n: usize) -> Vec<i64> {
        (0..n).map(|i| self.coeff(i)).collect()
    }
}

impl Ord for LengthVector {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len().max(other.0.len());
        for i in (0..n).rev() {
            match self.coeff(i).cmp(&other.coeff(i)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for LengthVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &LengthVector {
    type Output = LengthVector;
    fn add(self, rhs: &LengthVector) -> LengthVector {
        let n = self.0.len().max(rhs.0.len());
        LengthVector::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &LengthVector {
    type Output = LengthVector;
    fn sub(self, rhs: &LengthVector) -> LengthVector {
        self + &-rhs
    }
}

impl Neg for &LengthVector {
    type Output = LengthVector;
    fn neg(self) -> LengthVector {
        LengthVector(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for LengthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_array(self.0.len().max(2)).iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// `w = g_1 t^{a_1} ... g_m t^{a_m} g_{m+1}` with no pinches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HnnForm {
    pub gs: Vec<Word>,
    pub exps: Vec<i64>,
}

/// A single-extension tower with `u` cyclically reduced, together with the
/// rewriting of words of the original tower into it.
pub struct LyndonGroup {
    tower: Tower,
    u: Word,
    t: u32,
    /// `u = x core x^-1` in the original tower; words are conjugated by `x`.
    conjugator: Word,
}

impl LyndonGroup {
    pub fn new(tower: &Tower) -> Result<Self, LyndonError> {
        if tower.height() != 1 || tower.level(1).len() != 1 || tower.level(1)[0].count() != 1 {
            return Err(LyndonError::Shape);
        }
        let e = &tower.level(1)[0];
        let core = e.core.clone().unwrap_or_else(|| e.u.clone());
        let conjugator = e.conjugator.clone().unwrap_or_default();
        let tower = if conjugator.is_empty() {
            tower.clone()
        } else {
            // t = x t' x^-1 turns [x core x^-1, t] into [core, t']
            let al = tower.alphabet();
            let base: Vec<String> = tower.base_generators().iter().map(|&g| al.name(g).to_string()).collect();
            let spec = EntrySpec { u: al.display_word(core.letters()), letters: vec![al.name(e.letters[0]).to_string()] };
            Tower::new(&base, &[vec![spec]]).expect("core of a valid entry")
        };
        Ok(LyndonGroup { u: core, t: e.letters[0], tower, conjugator })
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    fn rewrite(&self, w: &[Letter]) -> Word {
        if self.conjugator.is_empty() {
            return Word(w.to_vec());
        }
        let x = &self.conjugator;
        let mut out = Vec::new();
        for &l in w {
            if l.gen() == self.t {
                out.extend_from_slice(x.letters());
                out.push(l);
                out.extend(x.inverse().0);
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Reduced HNN form by Britton collection.
    pub fn reduced_form(&self, w: &[Letter]) -> HnnForm {
        let w = self.rewrite(w);
        let col = britton_collect(&self.tower, 1, w.letters());
        let mut gs = Vec::with_capacity(col.blocks.len() + 1);
        let mut exps = Vec::with_capacity(col.blocks.len());
        for b in &col.blocks {
            gs.push(free_reduce(b.h.concat(&self.u.pow(b.fold)).letters()));
            exps.push(b.alpha[0]);
        }
        gs.push(col.tail);
        HnnForm { gs, exps }
    }

    /// `l_1(w, M)` for a word already in reduced form.
    pub fn l1(&self, form: &HnnForm, m: u64) -> i64 {
        let m_i = m as i64;
        let mut word = Vec::new();
        for (g, &a) in form.gs.iter().zip(&form.exps) {
            word.extend_from_slice(g.letters());
            word.extend(self.u.pow(a.signum() * m_i).0);
        }
        word.extend_from_slice(form.gs.last().expect("m + 1 words").letters());
        let uf = free_reduce(self.u.pow(m_i).letters()).len() as i64;
        free_reduce(&word).len() as i64 - form.exps.len() as i64 * uf
    }

    pub fn length(&self, w: &[Letter]) -> LengthVector {
        let form = self.reduced_form(w);
        let m = self.rewrite(w).len() as u64 + 1;
        LengthVector::new(vec![self.l1(&form, m), form.exps.iter().map(|a| a.abs()).sum()])
    }

    /// `c_p(g1, g2) = (l(g1) + l(g2) - l(g1^-1 g2)) / 2`.
    pub fn common_prefix_length(&self, g1: &[Letter], g2: &[Letter]) -> Result<LengthVector, LyndonError> {
        let mut q: Vec<Letter> = g1.iter().rev().map(|l| l.inverse()).collect();
        q.extend_from_slice(g2);
        let twice = &(&self.length(g1) + &self.length(g2)) - &self.length(&q);
        twice.half().ok_or(LyndonError::NotIntegral(twice))
    }

    /// Does the product of `parts` have length equal to the sum of their
    /// lengths (`parts[0] o parts[1] o ...`)?
    pub fn is_circ_product(&self, parts: &[Word]) -> bool {
        let total: Vec<Letter> = parts.iter().flat_map(|p| p.letters().iter().copied()).collect();
        let sum = parts.iter().fold(LengthVector::zero(), |acc, p| &acc + &self.length(p.letters()));
        self.length(&total) == sum
    }
}

pub fn lyndon_length(tower: &Tower, w: &[Letter]) -> Result<LengthVector, LyndonError> {
    Ok(LyndonGroup::new(tower)?.length(w))
}

/// `l_1(w, M)` after bringing `w` into reduced form.
pub fn l1(tower: &Tower, w: &[Letter], m: u64) -> Result<i64, LyndonError> {
    let g = LyndonGroup::new(tower)?;
    Ok(g.l1(&g.reduced_form(w), m))
}

pub fn common_prefix_length(tower: &Tower, g1: &[Letter], g2: &[Letter]) -> Result<LengthVector, LyndonError> {
    LyndonGroup::new(tower)?.common_prefix_length(g1, g2)
}

#[cfg(test)]
mod tests {
    use super::*;

    const G1: &str = "base a b\nlevel { centralizer u=\"a b\" count=1 letters t }\n";

    fn w(t: &Tower, s: &str) -> Word {
        t.alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn right_lex_order() {
        let a = LengthVector::new(vec![100, 0]);
        let b = LengthVector::new(vec![-5, 1]);
        assert!(a < b);
        assert!(LengthVector::new(vec![0, 0]) == LengthVector::zero());
        assert!(LengthVector::new(vec![3]) > LengthVector::new(vec![2]));
        assert_eq!(LengthVector::new(vec![-21, 2]).to_string(), "(-21, 2)");
        assert_eq!(LengthVector::zero().to_string(), "(0, 0)");
        assert_eq!(b.sigma(), 1);
        assert_eq!(b.degree(), Some(1));
    }

    #[test]
    fn golden_length() {
        let t = Tower::parse(G1).unwrap();
        let x = w(&t, "a (a b)^11 t^-1 a a b a^-1 t");
        assert_eq!(x.len(), 29);
        assert_eq!(lyndon_length(&t, x.letters()).unwrap(), LengthVector::new(vec![-21, 2]));
        assert_eq!(l1(&t, x.letters(), 30).unwrap(), -21);
        assert_eq!(l1(&t, x.letters(), 47).unwrap(), -21);
    }

    #[test]
    fn simple_values() {
        let t = Tower::parse(G1).unwrap();
        assert_eq!(lyndon_length(&t, &[]).unwrap(), LengthVector::zero());
        assert_eq!(lyndon_length(&t, w(&t, "a").letters()).unwrap(), LengthVector::new(vec![1, 0]));
        assert_eq!(lyndon_length(&t, w(&t, "a a^-1 b").letters()).unwrap(), LengthVector::new(vec![1]));
        // t commutes with ab, so t ab t^-1 = ab
        assert_eq!(lyndon_length(&t, w(&t, "t a b t^-1").letters()).unwrap(), LengthVector::new(vec![2]));
        let g = w(&t, "a t b");
        assert_eq!(common_prefix_length(&t, g.letters(), g.letters()).unwrap(), lyndon_length(&t, g.letters()).unwrap());
        assert_eq!(common_prefix_length(&t, g.letters(), &[]).unwrap(), LengthVector::zero());
    }

    #[test]
    fn shape_errors() {
        let two = Tower::parse("base a b\nlevel { centralizer u=\"a b\" count=2 letters t s }").unwrap();
        assert_eq!(lyndon_length(&two, &[]), Err(LyndonError::Shape));
        assert_eq!(lyndon_length(&Tower::free(["a"]), &[]), Err(LyndonError::Shape));
    }

    #[test]
    fn conjugated_generator() {
        let t = Tower::parse("base a b\nlevel { centralizer u=\"a b a^-1\" letters t }").unwrap();
        let x = w(&t, "t a b a^-1 t^-1");
        // equals a b a^-1 in the group
        assert_eq!(lyndon_length(&t, x.letters()).unwrap(), LengthVector::new(vec![3]));
        assert!(lyndon_length(&t, w(&t, "t").letters()).unwrap() > LengthVector::new(vec![1000]));
    }
}
