//! A proof-net engine for the logic of strongly compact closed categories
//! with biproducts.
//!
//! * [`atoms`]: the finite generating category with involution and its loop classes.
//! * [`formula`]: formulas, duality and additive normal forms.
//! * [`net`]: slices and nets, parsing, printing and DOT export.
//! * [`rewrite`]: cut elimination, canonical normal forms, β-equality.
//! * [`freecat`]: the free category as matrices of Kelly-Laplaza triples,
//!   net denotation, and reconstruction of nets from arrows.
//! * [`model`]: exact matrix models used to evaluate nets and arrows.
//! * [`testing`]: seeded generators of random nets and free arrows.

pub mod atoms;
pub mod fixtures;
pub mod formula;
pub mod freecat;
pub mod model;
pub mod net;
pub mod rewrite;
pub mod syntax;
pub mod testing;
