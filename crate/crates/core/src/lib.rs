//! Noise-robust noncontextuality analysis for Kochen-Specker type scenarios.
//!
//! The crate builds contextuality hypergraphs and the objects derived from
//! them, classifies probabilistic models, computes the graph invariants
//! α, θ, α* and the weighted max-predictability β, simulates small quantum
//! realizations and evaluates the Corr/R/p₀ tradeoff inequalities.
//!
//! Everything that has to be exact (polytopes, α, α*, β, classical bounds) is
//! computed over arbitrary-precision rationals. Only θ and Born-rule data use
//! floating point.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod invariants;
pub mod models;
pub mod noncontextuality;
pub mod quantum;
pub mod rational;
pub mod scenario;
pub mod solvers;

pub use error::{Error, Result};
pub use rational::Rational;
