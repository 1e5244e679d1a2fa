//! satcon: simulation and analysis of multi-agent consensus under output
//! saturation.
//!
//! Agents exchange saturated measurements of their states over fixed or
//! switching networks. Whether they can still agree depends only on the
//! initial (weighted) average: consensus is achieved exactly when that
//! average lies within the smallest saturation level. This crate simulates
//! the dynamics, evaluates the exact consensus conditions, predicts the
//! stable but unachievable equilibria that block agreement, and verifies the
//! predictions against trajectories with conservation and Lyapunov monitors.
//!
//! Modules:
//! - [`graph`]: weighted graphs, Laplacians, switching schedules, integral
//!   connectivity, spectral helpers.
//! - [`dynamics`]: the saturation nonlinearity, single/double-integrator
//!   right-hand sides, and a deterministic fixed-step integrator.
//! - [`analysis`]: consensus predicates, equilibrium prediction, Lyapunov
//!   functions, ranking statistics, and trajectory verification.
//! - [`harness`]: scenario files, built-in experiment reproductions, CSV and
//!   summary export, and the randomized oracle-equivalence sweep.

pub mod analysis;
pub mod dynamics;
pub mod graph;
pub mod harness;
