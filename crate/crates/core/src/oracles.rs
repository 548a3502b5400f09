//! Brute-force reference implementations used to cross-check the
//! compressed algorithms. Nothing here calls into the compressed code
//! paths: expansion, free reduction and Britton reduction are written out
//! again on plain letter vectors.

use std::collections::HashMap;

use thiserror::Error;

use crate::aut::AutSet;
use crate::slp::{Production, Slp};
use crate::tower::Tower;
use crate::word::{GenId, Letter, Word};

/// Default cap for oracle expansions, in letters.
pub const ORACLE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("expansion exceeds the oracle cap of {0} letters")]
    Overflow(usize),
    #[error("the oracle needs a tower with exactly one level")]
    NotSingleLevel,
    #[error("composition uses `{0}` inverted but it has no declared inverse")]
    MissingInverse(String),
}

/// Plain expansion, refusing anything longer than `cap`.
pub fn expand_oracle(a: &Slp, cap: usize) -> Result<Vec<Letter>, OracleError> {
    let prods = a.productions();
    let mut lens: Vec<u128> = Vec::with_capacity(prods.len());
    for p in prods {
        lens.push(match *p {
            Production::Empty => 0,
            Production::Terminal(_) => 1,
            Production::Pair(j, k) => lens[j].saturating_add(lens[k]),
        });
    }
    let total = *lens.last().unwrap_or(&0);
    if total > cap as u128 {
        return Err(OracleError::Overflow(cap));
    }
    let mut memo: HashMap<usize, Vec<Letter>> = HashMap::new();
    fn go(i: usize, prods: &[Production], memo: &mut HashMap<usize, Vec<Letter>>) -> Vec<Letter> {
        if let Some(w) = memo.get(&i) {
            return w.clone();
        }
        let w = match prods[i] {
            Production::Empty => Vec::new(),
            Production::Terminal(l) => vec![l],
            Production::Pair(j, k) => {
                let mut w = go(j, prods, memo);
                w.extend(go(k, prods, memo));
                w
            }
        };
        memo.insert(i, w.clone());
        w
    }
    if prods.is_empty() {
        return Ok(Vec::new());
    }
    Ok(go(prods.len() - 1, prods, &mut memo))
}

/// Free reduction by repeatedly deleting the leftmost cancelling pair,
/// using a cursor that steps back after each deletion.
pub fn reduce_oracle(w: &[Letter]) -> Vec<Letter> {
    let mut v: Vec<Letter> = w.to_vec();
    let mut i = 0;
    while i + 1 < v.len() {
        if v[i].gen() == v[i + 1].gen() && v[i].is_inverse() != v[i + 1].is_inverse() {
            v.drain(i..i + 2);
            i = i.saturating_sub(1);
        } else {
            i += 1;
        }
    }
    v
}

/// The freely reduced word of `w_a`.
pub fn expand_reduce_oracle(a: &Slp, cap: usize) -> Result<Vec<Letter>, OracleError> {
    expand_oracle(a, cap).map(|w| reduce_oracle(&w))
}

/// Letter-for-letter equality of the two expansions.
pub fn equal_oracle(a: &Slp, b: &Slp, cap: usize) -> Result<bool, OracleError> {
    Ok(expand_oracle(a, cap)? == expand_oracle(b, cap)?)
}

/// Longest suffix of `w_a` that is the inverse of the prefix of `w_b`, by a
/// linear scan.
pub fn cancellation_oracle(a: &Slp, b: &Slp, cap: usize) -> Result<usize, OracleError> {
    let x = expand_oracle(a, cap)?;
    let y = expand_oracle(b, cap)?;
    let mut l = 0;
    while l < x.len() && l < y.len() && x[x.len() - 1 - l] == y[l].inverse() {
        l += 1;
    }
    Ok(l)
}

/// `c` with `g = u^c` in the free group, if any. `u` must be nontrivial.
pub fn power_membership(u: &[Letter], g: &[Letter]) -> Option<i64> {
    let u = reduce_oracle(u);
    let g = reduce_oracle(g);
    if g.is_empty() {
        return Some(0);
    }
    // u = x v x^-1 with v cyclically reduced; test x^-1 g x against powers of v
    let mut s = 0;
    while s < u.len() / 2 && u[s].gen() == u[u.len() - 1 - s].gen() && u[s].is_inverse() != u[u.len() - 1 - s].is_inverse() {
        s += 1;
    }
    let x = &u[..s];
    let v = &u[s..u.len() - s];
    let mut h: Vec<Letter> = x.iter().rev().map(|l| l.inverse()).collect();
    h.extend_from_slice(&g);
    h.extend_from_slice(x);
    let h = reduce_oracle(&h);
    if v.is_empty() || !h.len().is_multiple_of(v.len()) {
        return None;
    }
    let c = h.len() / v.len();
    let vinv: Vec<Letter> = v.iter().rev().map(|l| l.inverse()).collect();
    if h.chunks(v.len()).all(|ch| ch == v) {
        Some(c as i64)
    } else if h.chunks(v.len()).all(|ch| ch == vinv.as_slice()) {
        Some(-(c as i64))
    } else {
        None
    }
}

#[derive(Debug, Clone)]
struct Block {
    entry: usize,
    exps: Vec<i64>,
}

/// Word problem in a one-level tower by Britton reduction.
///
/// The word is cut into base segments and maximal blocks of stable letters
/// of one entry (an exponent vector, since those letters commute). A block
/// with zero vector is dropped; two blocks of the same entry separated by a
/// segment `g = u^c` merge, with `u^c` moved to the left. When nothing
/// applies, the word is trivial iff no block is left and the remaining base
/// word freely reduces to the empty word.
pub fn britton_wp_level1(tower: &Tower, w: &[Letter]) -> Result<bool, OracleError> {
    if tower.height() != 1 {
        return Err(OracleError::NotSingleLevel);
    }
    let mut segs: Vec<Vec<Letter>> = vec![Vec::new()];
    let mut blocks: Vec<Block> = Vec::new();
    for &l in w {
        match tower.stable_info(l.gen()) {
            None => segs.last_mut().unwrap().push(l),
            Some(s) => {
                let e = tower.entry(1, s.entry);
                let d = if l.is_inverse() { -1 } else { 1 };
                let extend = segs.last().unwrap().is_empty() && blocks.last().is_some_and(|b| b.entry == s.entry);
                if extend && segs.len() > 1 {
                    blocks.last_mut().unwrap().exps[s.index - 1] += d;
                } else {
                    let mut exps = vec![0; e.count()];
                    exps[s.index - 1] = d;
                    blocks.push(Block { entry: s.entry, exps });
                    segs.push(Vec::new());
                }
            }
        }
    }
    // segs[i] precedes blocks[i]; segs[blocks.len()] is the tail
    loop {
        let mut changed = false;
        if let Some(i) = blocks.iter().position(|b| b.exps.iter().all(|&x| x == 0)) {
            blocks.remove(i);
            let right = segs.remove(i + 1);
            segs[i].extend(right);
            changed = true;
        } else {
            for i in 0..blocks.len().saturating_sub(1) {
                if blocks[i].entry != blocks[i + 1].entry {
                    continue;
                }
                let u = &tower.entry(1, blocks[i].entry).u;
                if let Some(c) = power_membership(u.letters(), &segs[i + 1]) {
                    let moved = u.pow(c);
                    segs[i].extend_from_slice(moved.letters());
                    let nb = blocks.remove(i + 1);
                    for (a, b) in blocks[i].exps.iter_mut().zip(nb.exps) {
                        *a += b;
                    }
                    let right = segs.remove(i + 2);
                    segs[i + 1] = right;
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok(blocks.is_empty() && reduce_oracle(&segs[0]).is_empty())
}

/// `phi_{i_1}(... phi_{i_m}(g_j))` by literal substitution, innermost first.
pub fn naive_aut_compose(set: &AutSet, word: &[(usize, bool)], gen: GenId, cap: usize) -> Result<Word, OracleError> {
    let mut w: Vec<Letter> = vec![Letter::pos(gen)];
    for &(i, inv) in word.iter().rev() {
        let idx = if inv {
            set.inverse_of(i).ok_or_else(|| OracleError::MissingInverse(set.get(i).name.clone()))?
        } else {
            i
        };
        let spec = set.get(idx);
        let mut next = Vec::new();
        for &l in &w {
            match spec.image(l.gen()) {
                None => next.push(l),
                Some(img) if !l.is_inverse() => next.extend_from_slice(img.letters()),
                Some(img) => next.extend(img.letters().iter().rev().map(|x| x.inverse())),
            }
            if next.len() > cap {
                return Err(OracleError::Overflow(cap));
            }
        }
        w = next;
    }
    Ok(Word(w))
}
