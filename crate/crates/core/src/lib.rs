//! Dynamic mean-field model of academic collaboration.
//!
//! A single ego author writes papers at the events of an inhomogeneous
//! Poisson process ([`process`]). At each event every author of a pool of
//! size `L` joins the paper independently, with a probability that depends on
//! the event index and on how many earlier papers the two have written
//! together ([`collab_model`]). On top of this the crate provides the
//! scientometric indices ([`indices`]), exact distributional quantities and
//! first-order limits ([`closed_form`]), conditional maximum-likelihood
//! estimators with asymptotic intervals ([`estimators`]) and a seeded Monte
//! Carlo harness ([`experiments`]).

pub mod closed_form;
pub mod collab_model;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod indices;
pub mod process;
pub mod seed;

pub use error::{Error, Result};
