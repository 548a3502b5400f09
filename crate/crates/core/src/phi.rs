//! The maps `phi_(k, P_k)` sending each stable letter `t_{u,i}` of level `k`
//! to `u^(P_k^i)`, their composite `Phi = phi_1 ... phi_n` into the base free
//! group, and the word problem deciders for the top group of a tower.
//!
//! With `P = (10L)^n |w| + 1` and `P_{i-1} = P_i^N L`, a word is trivial in
//! `G_n` exactly when its image under `Phi` is freely trivial.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arena::{Arena, NodeId, Rhs, EMPTY};
use crate::free_group;
use crate::slp::Slp;
use crate::tower::{Tower, TowerConstants};
use crate::word::{Letter, Word};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhiError {
    #[error("image length {len} exceeds cap {cap}")]
    Overflow { len: BigUint, cap: usize },
    #[error("letter of level {found} in a word of level {level}")]
    LevelTooHigh { level: usize, found: usize },
}

/// `P_n, ..., P_0` for a starting value `P = P_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PSequence {
    /// `values[k] = P_k`.
    values: Vec<BigUint>,
}

impl PSequence {
    pub fn p(&self) -> &BigUint {
        self.values.last().expect("nonempty sequence")
    }

    /// `P_k` for `0 <= k <= n`.
    pub fn get(&self, k: usize) -> &BigUint {
        &self.values[k]
    }

    pub fn levels(&self) -> usize {
        self.values.len() - 1
    }

    /// `P_n, P_{n-1}, ..., P_0`.
    pub fn descending(&self) -> impl Iterator<Item = &BigUint> {
        self.values.iter().rev()
    }
}

/// The sequence defined by `P_n = P` and `P_{i-1} = P_i^N * L`.
pub fn p_sequence(consts: &TowerConstants, p: &BigUint) -> PSequence {
    let n = consts.levels;
    let mut values = vec![BigUint::zero(); n + 1];
    values[n] = p.clone();
    for i in (1..=n).rev() {
        values[i - 1] = values[i].pow(consts.n as u32) * BigUint::from(consts.l);
    }
    PSequence { values }
}

/// `P_{n-i} = P^(N^i) * L^(N^(i-1)) * ... * L^(N^0)`.
pub fn p_closed_form(consts: &TowerConstants, p: &BigUint, i: usize) -> BigUint {
    let nn = consts.n as u32;
    let mut v = p.pow(nn.pow(i as u32));
    for j in 0..i {
        v *= BigUint::from(consts.l).pow(nn.pow(j as u32));
    }
    v
}

/// `(10L)^n * len + 1`.
pub fn starting_p(consts: &TowerConstants, len: &BigUint) -> BigUint {
    BigUint::from(10 * consts.l).pow(consts.levels as u32) * len + 1u32
}

/// Image of a plain word over `X_k` under `phi_(k, P_k)`.
pub fn phi_level_word(tower: &Tower, k: usize, pk: &BigUint, w: &[Letter], cap: usize) -> Result<Word, PhiError> {
    let mut len = BigUint::zero();
    for &l in w {
        let lv = tower.level_of(l.gen());
        if lv > k {
            return Err(PhiError::LevelTooHigh { level: k, found: lv });
        }
        len += match tower.stable_info(l.gen()) {
            Some(s) if s.level == k => pk.pow(s.index as u32) * tower.entry(k, s.entry).u.len(),
            _ => BigUint::one(),
        };
        if len > BigUint::from(cap) {
            return Err(PhiError::Overflow { len, cap });
        }
    }
    let mut out = Vec::with_capacity(len.to_usize().unwrap_or(0));
    for &l in w {
        match tower.stable_info(l.gen()) {
            Some(s) if s.level == k => {
                let e = pk.pow(s.index as u32).to_i64().expect("bounded by cap");
                let u = &tower.entry(k, s.entry).u;
                out.extend_from_slice(u.pow(if l.is_inverse() { -e } else { e }).letters());
            }
            _ => out.push(l),
        }
    }
    Ok(Word(out))
}

/// Image of a plain word under the full composite `Phi` for a given `P`.
pub fn phi_word(tower: &Tower, p: &BigUint, w: &[Letter], cap: usize) -> Result<Word, PhiError> {
    let ps = p_sequence(&tower.constants(), p);
    let mut cur = Word(w.to_vec());
    for k in (1..=tower.height()).rev() {
        cur = phi_level_word(tower, k, ps.get(k), cur.letters(), cap)?;
    }
    Ok(cur)
}

/// Shared power programs `u^(P_k^i)` and their inverses for one level.
struct PowerCache {
    k: usize,
    pk: BigUint,
    /// `(entry, i, inverted) -> node`
    nodes: HashMap<(usize, usize, bool), NodeId>,
}

impl PowerCache {
    fn get(&mut self, arena: &mut Arena, tower: &Tower, entry: usize, i: usize, inv: bool) -> NodeId {
        if let Some(&n) = self.nodes.get(&(entry, i, inv)) {
            return n;
        }
        let n = if inv {
            let pos = self.get(arena, tower, entry, i, false);
            arena.reverse_inverse(pos)
        } else if i == 0 {
            arena.word(tower.entry(self.k, entry).u.letters())
        } else {
            // u^(P^i) = (u^(P^(i-1)))^P
            let prev = self.get(arena, tower, entry, i - 1, false);
            arena.power(prev, &self.pk)
        };
        self.nodes.insert((entry, i, inv), n);
        n
    }
}

/// Applies `phi_(k, P_k)` to the program rooted at `root` inside `arena`.
pub(crate) fn phi_level_node(arena: &mut Arena, tower: &Tower, k: usize, pk: &BigUint, root: NodeId) -> NodeId {
    let mut cache = PowerCache { k, pk: pk.clone(), nodes: HashMap::new() };
    let order = arena.reachable(&[root]);
    let mut image: HashMap<NodeId, NodeId> = HashMap::with_capacity(order.len());
    for n in order {
        let r = match arena.rhs(n) {
            Rhs::Empty => EMPTY,
            Rhs::Letter(l) => match tower.stable_info(l.gen()) {
                Some(s) if s.level == k => cache.get(arena, tower, s.entry, s.index, l.is_inverse()),
                _ => n,
            },
            Rhs::Pair(x, y) => {
                let (ix, iy) = (image[&x], image[&y]);
                if ix == x && iy == y {
                    n
                } else {
                    arena.pair(ix, iy)
                }
            }
        };
        image.insert(n, r);
    }
    image[&root]
}

/// Program-level form of [`phi_level_word`].
pub fn phi_level_slp(tower: &Tower, k: usize, pk: &BigUint, a: &Slp) -> Slp {
    let mut arena = Arena::new();
    let root = arena.import(a);
    let r = phi_level_node(&mut arena, tower, k, pk, root);
    arena.export(r)
}

/// Everything measured while mapping a program down to the base group.
#[derive(Debug, Clone)]
pub struct CwpReport {
    /// Whether the word is trivial; `None` when only the reduction was run.
    pub trivial: Option<bool>,
    pub produced_length: BigUint,
    pub p: PSequence,
    pub input_size: usize,
    /// Program size after applying each level map, from level `n` down to 1.
    pub level_sizes: Vec<usize>,
    /// Size of the program over the base alphabet, before free reduction.
    pub base_size: usize,
    /// The program `A_1` over the base alphabet, when requested.
    pub base_program: Option<Slp>,
}

/// Is `w_a = 1` in the top group of the tower?
pub fn compressed_word_problem(tower: &Tower, a: &Slp) -> bool {
    run(tower, a, false, true).trivial.expect("decided")
}

/// Decides triviality and reports sizes and parameters.
pub fn compressed_word_problem_report(tower: &Tower, a: &Slp, keep_program: bool) -> CwpReport {
    run(tower, a, keep_program, true)
}

/// Builds `A_1 = Phi(A)` without deciding triviality.
pub fn reduce_to_base(tower: &Tower, a: &Slp, keep_program: bool) -> CwpReport {
    run(tower, a, keep_program, false)
}

fn run(tower: &Tower, a: &Slp, keep_program: bool, decide: bool) -> CwpReport {
    let consts = tower.constants();
    let mut arena = Arena::new();
    let root = arena.import(a);
    let len = arena.len(root).clone();
    let p = starting_p(&consts, &len);
    let ps = p_sequence(&consts, &p);
    let input_size = a.size();
    let mut cur = root;
    let mut level_sizes = Vec::with_capacity(tower.height());
    for k in (1..=tower.height()).rev() {
        cur = phi_level_node(&mut arena, tower, k, ps.get(k), cur);
        level_sizes.push(arena.program_size(cur));
    }
    let base_size = arena.program_size(cur);
    let base_program = keep_program.then(|| arena.export(cur));
    let trivial = decide.then(|| len.is_zero() || free_group::is_trivial_node(&mut arena, cur));
    CwpReport { trivial, produced_length: len, p: ps, input_size, level_sizes, base_size, base_program }
}

/// Word problem for a plain word.
pub fn word_problem(tower: &Tower, w: &[Letter]) -> bool {
    if w.is_empty() {
        return true;
    }
    compressed_word_problem(tower, &Slp::from_word(&Word(w.to_vec())))
}

/// Upper bound on the program size after all level maps, from the
/// power-program construction: each replaced letter shares one chain
/// `u, u^P, u^(P^2), ...` per sign, and every other node maps to at most
/// one new node.
pub fn size_bound(tower: &Tower, input_size: usize, ps: &PSequence) -> BigUint {
    let mut bound = BigUint::from(input_size);
    for k in 1..=tower.height() {
        let pk = ps.get(k);
        let step = BigUint::from(pk.bits().saturating_sub(1)) + BigUint::from(popcount(pk).saturating_sub(1));
        for e in tower.level(k) {
            let word_prog = BigUint::from(2 * e.u.len() - 1);
            bound += (word_prog + &step * BigUint::from(e.count())) * 2u32;
        }
    }
    bound
}

/// Coefficients `(c1, c2)` with `size_bound <= c1 * |A| + c2` for every
/// program `A` over the tower, from `log2 P <= n log2(10L) + |A|` and
/// `log2 P_{k-1} = N log2 P_k + log2 L`.
pub fn linear_size_coefficients(tower: &Tower) -> (f64, f64) {
    let c = tower.constants();
    let n = c.levels;
    if n == 0 {
        return (1.0, 0.0);
    }
    let nn = c.n as f64;
    let log_l = (c.l as f64).log2();
    let base = n as f64 * (10.0 * c.l as f64).log2();
    let mut c1 = 1.0;
    let mut c2 = 0.0;
    for k in 1..=n {
        let d: usize = tower.letters_on_level(k);
        let scale = nn.powi((n - k) as i32);
        // 1 + N + ... + N^(n-k-1)
        let geo: f64 = (0..n - k).map(|j| nn.powi(j as i32)).sum();
        c1 += 4.0 * d as f64 * scale;
        c2 += 4.0 * d as f64 * (scale * base + geo * log_l);
        for e in tower.level(k) {
            c2 += 2.0 * (2 * e.u.len() - 1) as f64;
        }
    }
    (c1, c2)
}

fn popcount(x: &BigUint) -> u64 {
    x.iter_u64_digits().map(|d| d.count_ones() as u64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_group::free_reduce;

    const G1: &str = "base a b\nlevel { centralizer u=\"a b\" count=1 letters t }\n";
    const G2: &str = "base a b\nlevel { centralizer u=\"a b\" count=2 letters t1 t2 }\nlevel { centralizer u=\"a t1\" letters s }\n";

    fn consts(l: usize, n: usize, levels: usize) -> TowerConstants {
        TowerConstants { l, n, m: 1, levels }
    }

    #[test]
    fn p_sequence_examples() {
        let s = p_sequence(&consts(2, 2, 1), &BigUint::from(100u32));
        assert_eq!(s.get(1), &BigUint::from(100u32));
        assert_eq!(s.get(0), &BigUint::from(20000u32));
        let s = p_sequence(&consts(2, 2, 2), &BigUint::from(10u32));
        let v: Vec<u64> = s.descending().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(v, [10, 200, 80000]);
    }

    #[test]
    fn p_sequence_matches_closed_form() {
        for l in 1..5 {
            for n in 2..5 {
                for levels in 0..4 {
                    let c = consts(l, n, levels);
                    let p = BigUint::from(7u32 + l as u32);
                    let s = p_sequence(&c, &p);
                    for i in 0..=levels {
                        assert_eq!(s.get(levels - i), &p_closed_form(&c, &p, i));
                    }
                    for k in 1..=levels {
                        assert!(s.get(k - 1) > s.get(k));
                    }
                }
            }
        }
    }

    #[test]
    fn phi_word_examples() {
        let t = Tower::parse(G1).unwrap();
        let al = t.alphabet();
        let w = al.parse_word("a b a").unwrap();
        assert_eq!(phi_level_word(&t, 1, &BigUint::from(5u32), w.letters(), 100).unwrap(), w);
        let img = phi_level_word(&t, 1, &BigUint::from(5u32), al.parse_word("t").unwrap().letters(), 100).unwrap();
        assert_eq!(img, al.parse_word("(a b)^5").unwrap());
        let rel = t.relators()[0].clone();
        let img = phi_level_word(&t, 1, &BigUint::from(5u32), rel.letters(), 100).unwrap();
        assert!(free_reduce(img.letters()).is_empty());
        assert!(matches!(
            phi_level_word(&t, 1, &BigUint::from(5u32), al.parse_word("t").unwrap().letters(), 9),
            Err(PhiError::Overflow { .. })
        ));
    }

    #[test]
    fn phi_slp_matches_word() {
        let t = Tower::parse(G1).unwrap();
        let al = t.alphabet();
        let a = Slp::from_word(&al.parse_word("t").unwrap());
        let img = phi_level_slp(&t, 1, &BigUint::from(4u32), &a);
        assert_eq!(img.expand(100).unwrap(), al.parse_word("(a b)^4").unwrap());
        let w = al.parse_word("a t^-1 b t t a^-1").unwrap();
        let img = phi_level_slp(&t, 1, &BigUint::from(3u32), &Slp::from_word(&w));
        assert_eq!(img.expand(1000).unwrap(), phi_level_word(&t, 1, &BigUint::from(3u32), w.letters(), 1000).unwrap());
        let plain = Slp::from_word(&al.parse_word("a b b").unwrap());
        assert_eq!(phi_level_slp(&t, 1, &BigUint::from(3u32), &plain), plain);
    }

    #[test]
    fn word_problem_examples() {
        let t = Tower::parse(G1).unwrap();
        let al = t.alphabet();
        let wp = |s: &str| word_problem(&t, al.parse_word(s).unwrap().letters());
        assert!(wp("1"));
        assert!(wp("t a b t^-1 b^-1 a^-1"));
        assert!(!wp("a t a^-1 t^-1"));
        assert!(!wp("t"));
        assert!(!wp("a"));
        assert!(wp("t (a b)^3 t^-2 (a b)^-3 t"));
    }

    #[test]
    fn two_level_relators() {
        let t = Tower::parse(G2).unwrap();
        for r in t.relators() {
            assert!(word_problem(&t, r.letters()));
        }
        for g in t.generators() {
            assert!(!word_problem(&t, &[Letter::pos(g)]));
        }
        let al = t.alphabet();
        assert!(!word_problem(&t, al.parse_word("s a s^-1 a^-1").unwrap().letters()));
        assert!(!word_problem(&t, al.parse_word("s t1 s^-1 t1^-1").unwrap().letters()));
        assert!(word_problem(&t, al.parse_word("s a t1 s^-1 t1^-1 a^-1").unwrap().letters()));
    }

    #[test]
    fn size_bound_holds_on_report() {
        let t = Tower::parse(G2).unwrap();
        let al = t.alphabet();
        let w = al.parse_word("s t1 a t2^-1 s^-1 b t1").unwrap();
        let r = compressed_word_problem_report(&t, &Slp::from_word(&w), true);
        assert!(BigUint::from(r.base_size) <= size_bound(&t, r.input_size, &r.p));
        assert_eq!(r.base_program.unwrap().size(), r.base_size);
    }
}
