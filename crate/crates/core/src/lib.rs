//! Word problems through grammar-compressed words.
//!
//! The crate decides triviality of words given as straight-line programs in
//! free groups and in groups built from a free group by finitely many
//! extensions of cyclic centralizers, and decides the word problem in
//! finitely generated subgroups of their automorphism groups.

pub mod arena;
pub mod aut;
pub mod bench;
pub mod compare;
pub mod free_group;
pub mod lyndon;
pub mod normal_form;
pub mod oracles;
pub mod phi;
pub mod recompression;
pub mod slp;
pub mod tower;
pub mod word;

pub use slp::{Production, Slp, SlpError};
pub use word::{Alphabet, GenId, Letter, Word};
