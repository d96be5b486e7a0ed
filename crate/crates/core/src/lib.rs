//! Computational toolkit for hyperfocused k-arcs in PG(2,2^h).
//!
//! The crate covers the full pipeline: GF(2^m) arithmetic ([`gf2m`]),
//! incidence geometry of PG(2,q) ([`pg2`]), arcs and their focus sets
//! ([`arcs`]), 1-factorizations of complete graphs ([`onefact`]), the two
//! geometric necessary-condition filters ([`filters`]), and the
//! constraint-propagation embeddability solver ([`embed`]).

pub mod arcs;
pub mod embed;
pub mod filters;
pub mod gf2m;
pub mod onefact;
pub mod pg2;
