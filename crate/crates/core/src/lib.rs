//! Contingency-constrained navigation toolkit.
//!
//! The crate computes finite-horizon reach-avoid value functions over sensed
//! occupancy grids and uses them as an exact feasibility certificate inside a
//! sampling-based MPC planner (MPPI) with group-local resampling rollouts.
//! A closed-loop simulator and benchmark harness sit on top.
//!
//! Module map:
//! - [`env`]: ground-truth worlds, sensed occupancy grids, signed distance
//!   fields, random environment generation.
//! - [`dynamics`]: unicycle and single-integrator models, steppers, and the
//!   Hamiltonian/optimal-control ingredients shared by solver and planner.
//! - [`solver`]: backward level-set integration of the reach-avoid value
//!   function over a 3-D state grid, plus the online recomputation policy.
//! - [`value`]: continuous-state queries on a value function (interpolation,
//!   gradients, feasibility margin, optimal controller).
//! - [`ancillary`]: homotopy-distinct path search and tracking controllers
//!   that seed extra MPPI proposal means.
//! - [`planner`]: the contingency-constrained MPPI step with resampling-based
//!   rollouts, clean re-evaluation, and the control-selection hierarchy.
//! - [`sim`]: closed-loop episodes, contingency execution, metrics, and the
//!   multi-environment benchmark.
//! - [`config`]: run configuration structures.
//! - [`dump`]: bit-exact binary dump formats for maps and value functions.

pub mod ancillary;
pub mod config;
pub mod dump;
pub mod dynamics;
pub mod env;
pub mod geom;
pub mod planner;
pub mod rng;
pub mod sim;
pub mod solver;
pub mod value;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("environment generation failed after {attempts} attempts")]
    GenerationFailed { attempts: u32 },
    #[error("safe set list is empty")]
    EmptySafeSets,
    #[error("CFL time step is not positive; check solver config and control bounds")]
    CflViolation,
    #[error("malformed dump: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
