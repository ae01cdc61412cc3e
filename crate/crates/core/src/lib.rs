//! Simulation and numerical verification for shift selfsimilar additive
//! sequences and the b-decomposable laws they generate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bdecomp;
pub mod config;
pub mod distributions;
pub mod error;
pub mod escape;
pub mod harness;
pub mod levy_lil;
pub mod quadrature;
pub mod seeds;
pub mod sequences;
pub mod stats;

pub use distributions::{IncrementLaw, LawSpec, Points};
pub use error::{Error, Result};
