//! Free reduction of plain words and the compressed word problem in free
//! groups.

use num_traits::Zero;

use crate::arena::{Arena, NodeId, Rhs};
use crate::compare;
use crate::slp::Slp;
use crate::word::{Letter, Word};

/// The freely reduced form of `w`, by a single stack scan.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

pub fn is_freely_reduced(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] != p[1].inverse())
}

/// Program for the freely reduced form of `w_a`.
pub fn reduced_slp(a: &Slp) -> Slp {
    let mut arena = Arena::new();
    let root = arena.import(a);
    let r = reduce_node(&mut arena, root);
    arena.export(r)
}

/// Is `w_a` trivial in the free group?
pub fn is_trivial_compressed(a: &Slp) -> bool {
    let mut arena = Arena::new();
    let root = arena.import(a);
    is_trivial_node(&mut arena, root)
}

pub(crate) fn is_trivial_node(arena: &mut Arena, root: NodeId) -> bool {
    let r = reduce_node(arena, root);
    arena.len(r).is_zero()
}

/// Bottom-up reduction: each pair node becomes the concatenation of its
/// reduced children with the maximal cancelling overlap cut away.
pub(crate) fn reduce_node(arena: &mut Arena, root: NodeId) -> NodeId {
    let order = arena.reachable(&[root]);
    let mut reduced: std::collections::HashMap<NodeId, NodeId> =
        std::collections::HashMap::with_capacity(order.len());
    for n in order {
        let r = match arena.rhs(n) {
            Rhs::Empty | Rhs::Letter(_) => n,
            Rhs::Pair(x, y) => {
                let (rx, ry) = (reduced[&x], reduced[&y]);
                let l = compare::cancellation(arena, rx, ry);
                if l.is_zero() {
                    arena.pair(rx, ry)
                } else {
                    let keep_x = arena.len(rx) - &l;
                    let keep_y = arena.len(ry) - &l;
                    let px = arena.prefix(rx, &keep_x);
                    let sy = arena.suffix(ry, &keep_y);
                    arena.pair(px, sy)
                }
            }
        };
        reduced.insert(n, r);
    }
    reduced[&root]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;
    use num_bigint::BigInt;

    fn al() -> Alphabet {
        Alphabet::from_names(["a", "b"])
    }

    fn w(s: &str) -> Word {
        al().parse_word(s).unwrap()
    }

    #[test]
    fn free_reduce_examples() {
        assert!(free_reduce(w("a a^-1").letters()).is_empty());
        assert_eq!(free_reduce(w("a b b^-1 a").letters()), w("a a"));
        assert!(free_reduce(w("b a a^-1 b^-1").letters()).is_empty());
    }

    #[test]
    fn reduced_slp_examples() {
        let s = Slp::from_word(&w("a a^-1"));
        assert!(reduced_slp(&s).expand(10).unwrap().is_empty());
        let p = Slp::power(&w("a"), &BigInt::from(8));
        assert_eq!(reduced_slp(&p).expand(10).unwrap(), w("a^8"));
    }

    #[test]
    fn trivial_examples() {
        assert!(is_trivial_compressed(&Slp::from_word(&w("a a^-1"))));
        let big = Slp::power(&w("a"), &(BigInt::from(1) << 20));
        assert!(!is_trivial_compressed(&big));
        let x = Slp::power(&w("a b"), &(BigInt::from(1) << 70));
        assert!(is_trivial_compressed(&x.concat(&x.reverse_inverse())));
        assert!(!is_trivial_compressed(&x.concat(&x)));
    }
}
