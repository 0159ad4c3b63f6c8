//! Uniqueness of pure multipartite states given subsets of their marginals.
//!
//! The crate is organised around a handful of modules:
//!
//! * [`states`]: dense pure states and density operators over labelled qudits,
//!   partial traces, Schmidt decompositions, the JSON state format.
//! * [`sampling`]: Haar-random unitaries and states, generic states drawn
//!   directly in Schmidt form, genericity diagnostics.
//! * [`certifier`]: the algebraic uniqueness certificate for four-party states
//!   with a marginal configuration `{AB, CD, X}`, corroborated by a
//!   phase-torus optimisation.
//! * [`families`]: explicit four-qubit families that share all two-body
//!   marginals.
//! * [`search`]: direct numerical search for distinct compatible pure
//!   states, the marginal survey, and the `n`-party reduction check.
//! * [`cli`]: the `marginal-udp` command-line front end.

pub mod certifier;
pub mod cli;
pub mod error;
pub mod families;
pub mod linalg;
pub mod objective;
pub mod optim;
pub mod sampling;
pub mod search;
pub mod states;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
