#![allow(dead_code)]

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use slpwp_core::slp::Production;
use slpwp_core::tower::Tower;
use slpwp_core::{Letter, Slp, Word};

pub const G1: &str = "base a b\nlevel { centralizer u=\"a b\" count=1 letters t }\n";
pub const G1_WIDE: &str =
    "base a b\nlevel {\n  centralizer u=\"a b\" count=2 letters t1 t2\n  centralizer u=\"a b^-1 a b a\" letters s\n}\n";
pub const G2: &str = "base a b\nlevel { centralizer u=\"a b\" count=2 letters t1 t2 }\nlevel { centralizer u=\"a t1\" letters s }\n";

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_letter(rng: &mut StdRng, gens: &[u32]) -> Letter {
    Letter::new(*gens.choose(rng).unwrap(), if rng.gen_bool(0.5) { 1 } else { -1 })
}

pub fn random_word(rng: &mut StdRng, gens: &[u32], len: usize) -> Word {
    (0..len).map(|_| random_letter(rng, gens)).collect()
}

/// Word mixing base letters and stable letters, the latter with probability `density`.
pub fn random_tower_word(rng: &mut StdRng, tower: &Tower, len: usize, density: f64) -> Word {
    let base: Vec<u32> = tower.base_generators().to_vec();
    let stable: Vec<u32> = tower.generators().into_iter().filter(|&g| tower.stable_info(g).is_some()).collect();
    (0..len)
        .map(|_| {
            if !stable.is_empty() && rng.gen_bool(density) {
                random_letter(rng, &stable)
            } else {
                random_letter(rng, &base)
            }
        })
        .collect()
}

/// A word equal to 1 in the tower: a product of conjugates of relators and of
/// commutators of stable letters with powers of their `u`.
pub fn random_trivial_word(rng: &mut StdRng, tower: &Tower, max_len: usize) -> Word {
    let gens = tower.generators();
    let mut out = Word::new();
    loop {
        let glen = rng.gen_range(0..3);
        let g = random_word(rng, &gens, glen);
        let core = if rng.gen_bool(0.5) {
            tower.relators().choose(rng).unwrap().clone()
        } else {
            let t = *gens.iter().filter(|&&g| tower.stable_info(g).is_some()).collect::<Vec<_>>().choose(rng).unwrap();
            let s = tower.stable_info(*t).unwrap();
            let u = &tower.entry(s.level, s.entry).u;
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let (e, c) = (rng.gen_range(1..3), rng.gen_range(-2..3));
            Word::commutator(&Word(vec![Letter::new(*t, sign)]).pow(e), &u.pow(c))
        };
        let piece = g.concat(&core).concat(&g.inverse());
        if out.len() + piece.len() > max_len {
            break;
        }
        out = out.concat(&piece);
        if rng.gen_bool(0.3) {
            break;
        }
    }
    if rng.gen_bool(0.5) && !out.is_empty() {
        // a cyclic rotation of a trivial word is still trivial
        let k = rng.gen_range(0..out.len());
        let mut v = out.0[k..].to_vec();
        v.extend_from_slice(&out.0[..k]);
        out = Word(v);
    }
    out
}

/// Random program: a few leaves, then pairs over earlier nonterminals.
pub fn random_slp(rng: &mut StdRng, gens: &[u32], leaves: usize, pairs: usize) -> Slp {
    let mut prods: Vec<Production> = (0..leaves).map(|_| Production::Terminal(random_letter(rng, gens))).collect();
    for _ in 0..pairs {
        let n = prods.len();
        // bias towards recent nonterminals so lengths grow
        let j = if rng.gen_bool(0.6) { rng.gen_range(n.saturating_sub(4)..n) } else { rng.gen_range(0..n) };
        let k = if rng.gen_bool(0.6) { rng.gen_range(n.saturating_sub(4)..n) } else { rng.gen_range(0..n) };
        prods.push(Production::Pair(j, k));
    }
    Slp::new(prods).unwrap()
}

/// Random program with produced length at most `max_len`.
pub fn bounded_random_slp(rng: &mut StdRng, gens: &[u32], max_len: u64) -> Slp {
    loop {
        let leaves = rng.gen_range(1..6);
        let pairs = rng.gen_range(0..30);
        let s = random_slp(rng, gens, leaves, pairs);
        if s.produced_length() <= max_len.into() {
            return s;
        }
    }
}

pub fn doubling_chain(w: &Word, k: usize) -> Slp {
    Slp::power(w, &(BigInt::from(1) << k))
}
