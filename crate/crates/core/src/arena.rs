//! Hash-consed grammar store shared by the compressed algorithms.
//!
//! Every node is a production over earlier nodes, so node ids are a
//! topological order. Each node caches its produced length, height and two
//! polynomial fingerprints (of its word and of the reverse-inverse word).
//! Fingerprints only ever answer "different" with certainty; equal
//! fingerprints are confirmed by [`crate::recompression`].

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::slp::{Production, Slp};
use crate::word::{Letter, Word};

pub type NodeId = u32;

/// The node producing the empty word. Always present.
pub const EMPTY: NodeId = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rhs {
    Empty,
    Letter(Letter),
    Pair(NodeId, NodeId),
}

#[derive(Debug, Clone)]
struct Node {
    rhs: Rhs,
    len: BigUint,
    /// `len` when it fits, for the fast paths.
    small: Option<u64>,
    height: u32,
    hash: u64,
    rhash: u64,
    bpow: u64,
}

const MOD: u64 = (1 << 61) - 1;
const BASE: u64 = 0x1d3c_5a7b_9e2f_4861 % MOD;

fn mulmod(a: u64, b: u64) -> u64 {
    let p = (a as u128) * (b as u128);
    let lo = (p as u64) & MOD;
    let hi = (p >> 61) as u64;
    let s = lo + hi;
    if s >= MOD {
        s - MOD
    } else {
        s
    }
}

fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MOD {
        s - MOD
    } else {
        s
    }
}

pub(crate) fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn letter_value(l: Letter) -> u64 {
    (splitmix(l.code() ^ 0x5eed_0000_0000_0000) % (MOD - 1)) + 1
}

/// Length argument for the descent routines: a `u64` fast path with a
/// big-integer fallback.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Rem {
    Small(u64),
    Big(BigUint),
}

impl Rem {
    fn new(k: &BigUint) -> Rem {
        match k.to_u64() {
            Some(v) => Rem::Small(v),
            None => Rem::Big(k.clone()),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rem::Small(0))
    }
}

#[derive(Debug, Clone)]
pub struct Arena {
    nodes: Vec<Node>,
    dedup: HashMap<Rhs, NodeId>,
    rinv_memo: HashMap<NodeId, NodeId>,
}

impl Default for Arena {
    fn default() -> Self {
        Self::new()
    }
}

impl Arena {
    pub fn new() -> Self {
        let mut a = Arena { nodes: Vec::new(), dedup: HashMap::new(), rinv_memo: HashMap::new() };
        a.nodes.push(Node {
            rhs: Rhs::Empty,
            len: BigUint::zero(),
            small: Some(0),
            height: 0,
            hash: 0,
            rhash: 0,
            bpow: 1,
        });
        a.dedup.insert(Rhs::Empty, EMPTY);
        a
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn rhs(&self, id: NodeId) -> Rhs {
        self.nodes[id as usize].rhs
    }

    pub fn len(&self, id: NodeId) -> &BigUint {
        &self.nodes[id as usize].len
    }

    pub fn small_len(&self, id: NodeId) -> Option<u64> {
        self.nodes[id as usize].small
    }

    pub fn height(&self, id: NodeId) -> u32 {
        self.nodes[id as usize].height
    }

    pub fn fingerprint(&self, id: NodeId) -> u64 {
        self.nodes[id as usize].hash
    }

    pub fn inverse_fingerprint(&self, id: NodeId) -> u64 {
        self.nodes[id as usize].rhash
    }

    pub fn letter(&mut self, l: Letter) -> NodeId {
        let rhs = Rhs::Letter(l);
        if let Some(&id) = self.dedup.get(&rhs) {
            return id;
        }
        let v = letter_value(l);
        let rv = letter_value(l.inverse());
        self.push(Node {
            rhs,
            len: BigUint::one(),
            small: Some(1),
            height: 1,
            hash: v,
            rhash: rv,
            bpow: BASE,
        })
    }

    /// Concatenation node; the empty node is absorbed.
    pub fn pair(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == EMPTY {
            return b;
        }
        if b == EMPTY {
            return a;
        }
        self.raw_pair(a, b)
    }

    /// Concatenation node without absorbing empty children.
    pub fn raw_pair(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let rhs = Rhs::Pair(a, b);
        if let Some(&id) = self.dedup.get(&rhs) {
            return id;
        }
        let (na, nb) = (&self.nodes[a as usize], &self.nodes[b as usize]);
        let len = &na.len + &nb.len;
        let small = match (na.small, nb.small) {
            (Some(x), Some(y)) => x.checked_add(y),
            _ => None,
        };
        let node = Node {
            rhs,
            small,
            len,
            height: na.height.max(nb.height) + 1,
            hash: addmod(na.hash, mulmod(na.bpow, nb.hash)),
            rhash: addmod(nb.rhash, mulmod(nb.bpow, na.rhash)),
            bpow: mulmod(na.bpow, nb.bpow),
        };
        self.push(node)
    }

    fn push(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.dedup.insert(node.rhs, id);
        self.nodes.push(node);
        id
    }

    /// Left-associated concatenation of a sequence of nodes.
    pub fn concat_all<I: IntoIterator<Item = NodeId>>(&mut self, parts: I) -> NodeId {
        let mut acc = EMPTY;
        for p in parts {
            acc = self.pair(acc, p);
        }
        acc
    }

    /// Balanced program for a plain word (halving construction).
    pub fn word(&mut self, w: &[Letter]) -> NodeId {
        match w.len() {
            0 => EMPTY,
            1 => self.letter(w[0]),
            n => {
                let (l, r) = w.split_at(n / 2);
                let a = self.word(l);
                let b = self.word(r);
                self.pair(a, b)
            }
        }
    }

    /// `x^q` by binary powering: one doubling per bit below the leading one
    /// and one correction pair per further set bit.
    pub fn power(&mut self, x: NodeId, q: &BigUint) -> NodeId {
        if q.is_zero() || x == EMPTY {
            return EMPTY;
        }
        let bits = q.bits();
        let mut acc = x;
        for i in (0..bits - 1).rev() {
            acc = self.pair(acc, acc);
            if q.bit(i) {
                acc = self.pair(acc, x);
            }
        }
        acc
    }

    /// Node producing the reverse-inverse word of `id`.
    pub fn reverse_inverse(&mut self, id: NodeId) -> NodeId {
        if let Some(&r) = self.rinv_memo.get(&id) {
            return r;
        }
        let order = self.reachable(&[id]);
        for n in order {
            if self.rinv_memo.contains_key(&n) {
                continue;
            }
            let r = match self.rhs(n) {
                Rhs::Empty => EMPTY,
                Rhs::Letter(l) => self.letter(l.inverse()),
                Rhs::Pair(a, b) => {
                    let ra = self.rinv_memo[&a];
                    let rb = self.rinv_memo[&b];
                    self.raw_pair(rb, ra)
                }
            };
            self.rinv_memo.insert(n, r);
            self.rinv_memo.insert(r, n);
        }
        self.rinv_memo[&id]
    }

    /// Nodes reachable from `roots`, in increasing (topological) order.
    pub fn reachable(&self, roots: &[NodeId]) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = roots.to_vec();
        let mut out = Vec::new();
        while let Some(n) = stack.pop() {
            if seen[n as usize] {
                continue;
            }
            seen[n as usize] = true;
            out.push(n);
            if let Rhs::Pair(a, b) = self.rhs(n) {
                stack.push(a);
                stack.push(b);
            }
        }
        out.sort_unstable();
        out
    }

    /// First `k` letters of `id` (clamped to its length).
    pub fn prefix(&mut self, id: NodeId, k: &BigUint) -> NodeId {
        let mut pending = Vec::new();
        let mut cur = id;
        let mut rem = Rem::new(k);
        let result = loop {
            if rem.is_zero() {
                break EMPTY;
            }
            if self.covers(cur, &rem) {
                break cur;
            }
            match self.rhs(cur) {
                Rhs::Pair(x, y) => {
                    if self.fits_in(&rem, x) {
                        cur = x;
                    } else {
                        rem = self.minus_len(rem, x);
                        pending.push(x);
                        cur = y;
                    }
                }
                _ => unreachable!("leaf shorter than remaining length"),
            }
        };
        pending.into_iter().rev().fold(result, |acc, x| self.pair(x, acc))
    }

    /// Last `k` letters of `id` (clamped to its length).
    pub fn suffix(&mut self, id: NodeId, k: &BigUint) -> NodeId {
        let mut pending = Vec::new();
        let mut cur = id;
        let mut rem = Rem::new(k);
        let result = loop {
            if rem.is_zero() {
                break EMPTY;
            }
            if self.covers(cur, &rem) {
                break cur;
            }
            match self.rhs(cur) {
                Rhs::Pair(x, y) => {
                    if self.fits_in(&rem, y) {
                        cur = y;
                    } else {
                        rem = self.minus_len(rem, y);
                        pending.push(y);
                        cur = x;
                    }
                }
                _ => unreachable!("leaf shorter than remaining length"),
            }
        };
        pending.into_iter().rev().fold(result, |acc, y| self.pair(acc, y))
    }

    /// `rem >= len(id)`
    fn covers(&self, id: NodeId, rem: &Rem) -> bool {
        let n = &self.nodes[id as usize];
        match (rem, n.small) {
            (Rem::Small(r), Some(l)) => *r >= l,
            (Rem::Small(_), None) => false,
            (Rem::Big(r), _) => *r >= n.len,
        }
    }

    /// `rem <= len(id)`
    fn fits_in(&self, rem: &Rem, id: NodeId) -> bool {
        let n = &self.nodes[id as usize];
        match (rem, n.small) {
            (Rem::Small(r), Some(l)) => *r <= l,
            (Rem::Small(_), None) => true,
            (Rem::Big(r), _) => *r <= n.len,
        }
    }

    /// `rem - len(id)`, assuming `rem > len(id)`.
    fn minus_len(&self, rem: Rem, id: NodeId) -> Rem {
        let n = &self.nodes[id as usize];
        match (rem, n.small) {
            (Rem::Small(r), Some(l)) => Rem::Small(r - l),
            (Rem::Big(r), _) => Rem::new(&(r - &n.len)),
            (Rem::Small(_), None) => unreachable!("remaining length below child length"),
        }
    }

    /// Fingerprint of the length-`k` prefix of `id`.
    pub fn prefix_fingerprint(&self, id: NodeId, k: &BigUint) -> u64 {
        let mut acc = 0u64;
        let mut mult = 1u64;
        let mut cur = id;
        let mut rem = Rem::new(k);
        loop {
            if rem.is_zero() {
                return acc;
            }
            if self.covers(cur, &rem) {
                return addmod(acc, mulmod(mult, self.nodes[cur as usize].hash));
            }
            match self.rhs(cur) {
                Rhs::Pair(x, y) => {
                    if self.fits_in(&rem, x) {
                        cur = x;
                    } else {
                        let nx = &self.nodes[x as usize];
                        acc = addmod(acc, mulmod(mult, nx.hash));
                        mult = mulmod(mult, nx.bpow);
                        rem = self.minus_len(rem, x);
                        cur = y;
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    /// Fingerprint of the length-`k` prefix of the reverse-inverse of `id`,
    /// i.e. of the inverse of its length-`k` suffix.
    pub fn inverse_suffix_fingerprint(&self, id: NodeId, k: &BigUint) -> u64 {
        let mut acc = 0u64;
        let mut mult = 1u64;
        let mut cur = id;
        let mut rem = Rem::new(k);
        loop {
            if rem.is_zero() {
                return acc;
            }
            if self.covers(cur, &rem) {
                return addmod(acc, mulmod(mult, self.nodes[cur as usize].rhash));
            }
            match self.rhs(cur) {
                Rhs::Pair(x, y) => {
                    if self.fits_in(&rem, y) {
                        cur = y;
                    } else {
                        let ny = &self.nodes[y as usize];
                        acc = addmod(acc, mulmod(mult, ny.rhash));
                        mult = mulmod(mult, ny.bpow);
                        rem = self.minus_len(rem, y);
                        cur = x;
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    /// First letter of a nonempty node.
    pub fn first_letter(&self, mut id: NodeId) -> Option<Letter> {
        loop {
            match self.rhs(id) {
                Rhs::Empty => return None,
                Rhs::Letter(l) => return Some(l),
                Rhs::Pair(a, b) => id = if self.len(a).is_zero() { b } else { a },
            }
        }
    }

    /// Last letter of a nonempty node.
    pub fn last_letter(&self, mut id: NodeId) -> Option<Letter> {
        loop {
            match self.rhs(id) {
                Rhs::Empty => return None,
                Rhs::Letter(l) => return Some(l),
                Rhs::Pair(a, b) => id = if self.len(b).is_zero() { a } else { b },
            }
        }
    }

    /// Up to `limit` leading letters, without expanding the rest.
    pub fn expand_prefix(&self, id: NodeId, limit: usize) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if out.len() >= limit {
                break;
            }
            match self.rhs(n) {
                Rhs::Empty => {}
                Rhs::Letter(l) => out.push(l),
                Rhs::Pair(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
            }
        }
        out
    }

    /// Up to `limit` trailing letters, in reading order.
    pub fn expand_suffix(&self, id: NodeId, limit: usize) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(n) = stack.pop() {
            if out.len() >= limit {
                break;
            }
            match self.rhs(n) {
                Rhs::Empty => {}
                Rhs::Letter(l) => out.push(l),
                Rhs::Pair(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out.reverse();
        out
    }

    /// Full expansion, or `None` when the word is longer than `cap`.
    pub fn expand(&self, id: NodeId, cap: usize) -> Option<Word> {
        match self.small_len(id) {
            Some(l) if l <= cap as u64 => {}
            _ => return None,
        }
        let mut w = self.expand_prefix(id, usize::MAX);
        w.shrink_to_fit();
        Some(Word(w))
    }

    /// AVL-style concatenation: the result has height at most
    /// `max(height) + 1` and only `O(|height(a) - height(b)|)` new nodes.
    pub fn join(&mut self, a: NodeId, b: NodeId) -> NodeId {
        if a == EMPTY {
            return b;
        }
        if b == EMPTY {
            return a;
        }
        let (ha, hb) = (self.height(a), self.height(b));
        if ha > hb + 1 {
            let Rhs::Pair(l, r) = self.rhs(a) else { unreachable!() };
            let t = self.join(r, b);
            if self.height(t) <= self.height(l) + 1 {
                return self.pair(l, t);
            }
            let Rhs::Pair(tl, tr) = self.rhs(t) else { unreachable!() };
            if self.height(tr) >= self.height(tl) {
                let left = self.pair(l, tl);
                self.pair(left, tr)
            } else {
                let Rhs::Pair(tll, tlr) = self.rhs(tl) else { unreachable!() };
                let left = self.pair(l, tll);
                let right = self.pair(tlr, tr);
                self.pair(left, right)
            }
        } else if hb > ha + 1 {
            let Rhs::Pair(l, r) = self.rhs(b) else { unreachable!() };
            let t = self.join(a, l);
            if self.height(t) <= self.height(r) + 1 {
                return self.pair(t, r);
            }
            let Rhs::Pair(tl, tr) = self.rhs(t) else { unreachable!() };
            if self.height(tl) >= self.height(tr) {
                let right = self.pair(tr, r);
                self.pair(tl, right)
            } else {
                let Rhs::Pair(trl, trr) = self.rhs(tr) else { unreachable!() };
                let left = self.pair(tl, trl);
                let right = self.pair(trr, r);
                self.pair(left, right)
            }
        } else {
            self.pair(a, b)
        }
    }

    /// Height-balanced node for the same word as `root`.
    pub fn rebalance(&mut self, root: NodeId) -> NodeId {
        let mut memo: HashMap<NodeId, NodeId> = HashMap::new();
        for n in self.reachable(&[root]) {
            let b = match self.rhs(n) {
                Rhs::Pair(x, y) => {
                    let (bx, by) = (memo[&x], memo[&y]);
                    self.join(bx, by)
                }
                _ => n,
            };
            memo.insert(n, b);
        }
        memo[&root]
    }

    /// Copies an [`Slp`] in, returning the node of its root.
    pub fn import(&mut self, slp: &Slp) -> NodeId {
        let mut map: Vec<NodeId> = Vec::with_capacity(slp.size());
        for p in slp.productions() {
            let id = match *p {
                Production::Empty => EMPTY,
                Production::Terminal(l) => self.letter(l),
                Production::Pair(j, k) => self.raw_pair(map[j], map[k]),
            };
            map.push(id);
        }
        *map.last().expect("nonempty program")
    }

    /// The program rooted at `root`, renumbered contiguously.
    pub fn export(&self, root: NodeId) -> Slp {
        let order = self.reachable(&[root]);
        let mut index: HashMap<NodeId, usize> = HashMap::with_capacity(order.len());
        let mut prods = Vec::with_capacity(order.len());
        for n in order {
            let p = match self.rhs(n) {
                Rhs::Empty => Production::Empty,
                Rhs::Letter(l) => Production::Terminal(l),
                Rhs::Pair(a, b) => Production::Pair(index[&a], index[&b]),
            };
            index.insert(n, prods.len());
            prods.push(p);
        }
        Slp::from_productions_unchecked(prods)
    }

    /// Number of nodes reachable from `root`: the size of the exported program.
    pub fn program_size(&self, root: NodeId) -> usize {
        self.reachable(&[root]).len()
    }
}
