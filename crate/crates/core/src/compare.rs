//! Equality of compressed words and the cancellation length between two
//! compressed reduced words.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::arena::{Arena, NodeId};
use crate::recompression;
use crate::slp::Slp;

/// Prefixes up to this length are compared letter by letter.
const DIRECT_LIMIT: u64 = 64;

/// `w_a == w_b` as words.
pub fn equal(a: &Slp, b: &Slp) -> bool {
    let mut arena = Arena::new();
    let x = arena.import(a);
    let y = arena.import(b);
    nodes_equal(&arena, (x, false), (y, false))
}

/// Same as [`equal`] but always runs recompression, skipping the
/// fingerprint shortcut.
pub fn equal_by_recompression(a: &Slp, b: &Slp) -> bool {
    let mut arena = Arena::new();
    let x = arena.import(a);
    let y = arena.import(b);
    recompression::equal_nodes(&arena, (x, false), (y, false))
}

fn oriented_fingerprint(arena: &Arena, (id, inv): (NodeId, bool)) -> u64 {
    if inv {
        arena.inverse_fingerprint(id)
    } else {
        arena.fingerprint(id)
    }
}

/// Word equality of two oriented arena nodes (`inv` means reverse-inverse).
pub(crate) fn nodes_equal(arena: &Arena, x: (NodeId, bool), y: (NodeId, bool)) -> bool {
    if arena.len(x.0) != arena.len(y.0) {
        return false;
    }
    if oriented_fingerprint(arena, x) != oriented_fingerprint(arena, y) {
        return false;
    }
    if x == y {
        return true;
    }
    if let Some(n) = arena.small_len(x.0) {
        if n <= DIRECT_LIMIT {
            return oriented_expand(arena, x) == oriented_expand(arena, y);
        }
    }
    recompression::equal_nodes(arena, x, y)
}

fn oriented_expand(arena: &Arena, (id, inv): (NodeId, bool)) -> Vec<crate::word::Letter> {
    let w = arena.expand_prefix(id, usize::MAX);
    if inv {
        w.into_iter().rev().map(|l| l.inverse()).collect()
    } else {
        w
    }
}

/// Largest `l` such that the length-`l` suffix of `w_a` is the
/// reverse-inverse of the length-`l` prefix of `w_b`.
pub fn cancellation_length(a: &Slp, b: &Slp) -> BigUint {
    let mut arena = Arena::new();
    let x = arena.import(a);
    let y = arena.import(b);
    cancellation(&mut arena, x, y)
}

/// Arena form of [`cancellation_length`].
///
/// The predicate "suffix of `a` of length `l` cancels the prefix of `b`" is
/// monotone in `l`. Fingerprints locate the boundary by galloping and
/// bisection; a fingerprint mismatch is exact, so only the final match is
/// confirmed, directly for short lengths and by recompression otherwise.
/// Should that confirmation fail, the search is redone with exact probes.
pub(crate) fn cancellation(arena: &mut Arena, a: NodeId, b: NodeId) -> BigUint {
    let m = arena.len(a).min(arena.len(b)).clone();
    if m.is_zero() {
        return m;
    }
    match (arena.last_letter(a), arena.first_letter(b)) {
        (Some(x), Some(y)) if x.inverse() == y => {}
        _ => return BigUint::zero(),
    }
    let probe = |arena: &Arena, l: &BigUint| arena.inverse_suffix_fingerprint(a, l) == arena.prefix_fingerprint(b, l);
    let found = monotone_boundary(&m, |l| probe(arena, l));
    if confirm(arena, a, b, &found) {
        return found;
    }
    monotone_boundary(&m, |l| confirm(arena, a, b, l))
}

fn confirm(arena: &mut Arena, a: NodeId, b: NodeId, l: &BigUint) -> bool {
    if l.is_zero() {
        return true;
    }
    if let Some(n) = l.to_u64() {
        if n <= DIRECT_LIMIT {
            let s: Vec<_> = arena.expand_suffix(a, n as usize).into_iter().rev().map(|x| x.inverse()).collect();
            let p = arena.expand_prefix(b, n as usize);
            return s == p;
        }
    }
    let s = arena.suffix(a, l);
    let p = arena.prefix(b, l);
    recompression::equal_nodes(arena, (s, true), (p, false))
}

/// Largest `l` in `[1, m]` with `pred(l)`, given `pred(1)` and monotonicity
/// (true on an initial segment).
fn monotone_boundary<F: FnMut(&BigUint) -> bool>(m: &BigUint, mut pred: F) -> BigUint {
    let mut lo = BigUint::one();
    let mut step = BigUint::one();
    // gallop
    let hi = loop {
        step <<= 1;
        let cand = &lo + &step - 1u32;
        if cand >= *m {
            if pred(m) {
                return m.clone();
            }
            break m.clone();
        }
        if pred(&cand) {
            lo = cand;
        } else {
            break cand;
        }
    };
    // pred(lo) holds, pred(hi) fails
    let mut hi = hi;
    while &hi - &lo > BigUint::one() {
        let mid: BigUint = (&lo + &hi) >> 1;
        if pred(&mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
