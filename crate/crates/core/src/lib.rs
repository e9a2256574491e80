//! Topological invariants of symmetric parameter families of one-dimensional
//! quantum states.
//!
//! Families live on triangulated parameter spaces ([`gcomplex`]). Pure states
//! ([`purestate`]) carry Berry phases, Chern numbers and symmetry charges.
//! Injective matrix product states ([`mps`]) additionally carry the higher Berry
//! connection and the DDKS number, and with a symmetry group ([`equivariant`])
//! the full tower of SPT, pump and fixed-point invariants. [`models`] supplies
//! exactly solvable families and [`pipeline`] drives configured runs.

pub mod config;
pub mod equivariant;
pub mod error;
pub mod gcomplex;
pub mod models;
pub mod mps;
pub mod numerics;
pub mod pipeline;
pub mod purestate;

pub use config::Tolerances;
pub use error::{Error, Result};
