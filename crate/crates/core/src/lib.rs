//! Cheap prediction of an iterative learner's converged accuracy from its
//! first few epoch accuracies, and a probability-vector hyper-parameter
//! explorer driven by that predictor.
//!
//! The crate is `no_std` and needs only `alloc`. Everything that touches a
//! filesystem (CSV databases, model files, plots, the CLI) lives in the
//! `epochcast` companion crate.
//!
//! - [`curves_db`]: hyper-parameter axes, settings, learning curves and the
//!   database of full-training records.
//! - [`power_fit`]: constrained least-squares fit of `g(x) = alpha * x^beta`.
//! - [`svr`]: epsilon-SVR trained in the dual by a two-variable working-set solver.
//! - [`predictor`]: the SVR / curve-fit gate.
//! - [`explorer`]: probability-vector exploration of the hyper-parameter grid.
//! - [`trainers`]: the [`trainers::Trainer`] contract, a synthetic
//!   learning-curve simulator and a small from-scratch classifier.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod curves_db;
pub mod error;
pub mod explorer;
pub mod power_fit;
pub mod predictor;
pub mod svr;
pub mod trainers;

pub use error::{Error, Result};
