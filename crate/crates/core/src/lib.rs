//! Building NIL-focused entity-linking datasets from a hyperlinked corpus, and
//! training desk-scale bi-encoder / cross-encoder linkers that can answer NIL.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function of its inputs and an explicit RNG seed; file formats, the
//! annotation HTTP service and the command line live in the `nilink` crate.
//!
//! Pipeline overview:
//!
//! ```text
//! corpus ──► alias table ──► seed entities ──► entries ──► filter ──► annotate
//!                                                                     │
//!                    eval ◄── model (bi / cross + typing) ◄── mask / split
//! ```
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod annotate;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod kb;
pub mod model;
pub mod rng;
pub mod toy;
pub mod typesys;

pub use error::{Error, Result};
pub use kb::{Answer, Entity, EntityId, EntryId, KnowledgeBase, NilPattern, Provenance};
