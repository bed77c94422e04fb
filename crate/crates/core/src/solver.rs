//! Finite-horizon reach-avoid value functions by backward level-set
//! integration.
//!
//! The discrete recursion starts from `V0 = max(l, g)` and iterates
//!
//! ```text
//! V_{k+1}(x) = max( g(x), V_k(x) + dtau * min(0, H_lf(x, D-V, D+V)) )
//! ```
//!
//! until the accumulated pseudo-time reaches the contingency horizon. `l` is
//! the signed distance to the union of safe zones (negative inside), `g` is
//! positive exactly where the robot disc overlaps an occupied or unknown
//! cell. The `min(0, .)` freezes the value once the target is reachable
//! ("reach at some time within the horizon"), and the outer `max` enforces
//! avoidance throughout. `H_lf` is the Lax-Friedrichs numerical Hamiltonian
//! `H(x, (D- + D+)/2) + sum_d alpha_d (D+_d - D-_d)/2` with first-order
//! upwind one-sided differences, dissipation coefficients taken analytically
//! from the control bounds, copy-extrapolation ghost nodes at non-periodic
//! boundaries, and periodic wrap in theta. Note the dissipation sign: the
//! update adds `dtau * min(0, H_lf)` rather than subtracting, so the
//! stabilizing direction is `+`. The scheme is monotone under the CFL bound,
//! which is what makes the certified-set monotonicity under map reveals hold
//! pointwise.
//!
//! Recomputation is always from scratch: warm-starting from a stale solution
//! can over-approximate the feasible set, which is unsafe for a reach
//! certificate. The stale function stays in use while a new one is solved;
//! pessimistic unknown-as-occupied sensing makes it a conservative
//! certificate for the newer map.

use crate::dynamics::Model;
use crate::env::{GridGeometry, SafeZone, ScalarField2D};
use crate::geom::Vec2;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Node lattice for the value function: x, y (non-periodic) and theta
/// (periodic). A theta dimension of 1 encodes heading-free 2-D models; the
/// planar dimensions require at least 3 nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateGrid {
    pub dims: [usize; 3],
    pub lower: [f64; 3],
    pub upper: [f64; 3],
    pub periodic: [bool; 3],
    pub spacing: [f64; 3],
}

impl StateGrid {
    /// Grid over `[0, extent] x [0, extent] x (-pi, pi]`.
    pub fn new(dims: [usize; 3], lower: [f64; 3], upper: [f64; 3]) -> Self {
        assert!(dims[0] >= 3 && dims[1] >= 3, "planar dims need >= 3 nodes");
        assert!(dims[2] >= 1);
        let periodic = [false, false, true];
        let mut spacing = [0.0; 3];
        for d in 0..3 {
            assert!(upper[d] > lower[d]);
            spacing[d] = if periodic[d] {
                (upper[d] - lower[d]) / dims[d] as f64
            } else {
                (upper[d] - lower[d]) / (dims[d] - 1) as f64
            };
        }
        Self {
            dims,
            lower,
            upper,
            periodic,
            spacing,
        }
    }

    /// Standard grid covering a workspace with the usual heading range.
    pub fn for_workspace(nx: usize, ny: usize, ntheta: usize, extent: Vec2) -> Self {
        use std::f64::consts::PI;
        Self::new(
            [nx, ny, ntheta],
            [0.0, 0.0, -PI],
            [extent.x, extent.y, PI],
        )
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major with theta fastest.
    pub fn index(&self, ix: usize, iy: usize, it: usize) -> usize {
        debug_assert!(ix < self.dims[0] && iy < self.dims[1] && it < self.dims[2]);
        (ix * self.dims[1] + iy) * self.dims[2] + it
    }

    pub fn coord(&self, d: usize, i: usize) -> f64 {
        self.lower[d] + i as f64 * self.spacing[d]
    }

    /// Clamp magnitude used for out-of-grid and degenerate values: well above
    /// anything a signed-distance-scaled field can reach.
    pub fn value_clamp(&self) -> f64 {
        let wx = self.upper[0] - self.lower[0];
        let wy = self.upper[1] - self.lower[1];
        20.0 * wx.hypot(wy)
    }
}

/// The solved reach-avoid value function. Immutable once returned; planner
/// workers share it freely.
#[derive(Debug, Clone)]
pub struct ValueFunction {
    pub grid: StateGrid,
    /// Node values, row-major with theta fastest.
    pub values: Vec<f64>,
    /// Contingency horizon the function was solved for, seconds.
    pub horizon: f64,
    /// Occupancy-grid revision the obstacle function was built from.
    pub map_revision: u64,
    /// Wall time of the solve, seconds.
    pub solve_wall_time: f64,
}

impl ValueFunction {
    pub fn value_at(&self, ix: usize, iy: usize, it: usize) -> f64 {
        self.values[self.grid.index(ix, iy, it)]
    }

    /// Sentinel returned for queries outside the planar bounds: treated as
    /// infeasible everywhere downstream.
    pub fn infeasible_sentinel(&self) -> f64 {
        self.grid.value_clamp()
    }
}

/// Solver parameters. Dissipation bounds come from the dynamics model, not
/// from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Contingency horizon T_c, seconds.
    pub horizon: f64,
    /// CFL number in (0, 1].
    pub cfl_number: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            horizon: 2.5,
            cfl_number: 0.8,
        }
    }
}

/// Trigger policy for online recomputation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecomputePolicy {
    /// Recompute when at least this many cells changed since the last solve.
    pub cell_threshold: usize,
    /// ... or when this much (simulation) time elapsed since the last solve.
    pub interval: f64,
}

impl Default for RecomputePolicy {
    fn default() -> Self {
        Self {
            cell_threshold: 120,
            interval: 1.5,
        }
    }
}

/// True iff either trigger fired.
pub fn should_recompute(
    policy: &RecomputePolicy,
    changed_cells_since_last: usize,
    elapsed_since_last: f64,
) -> bool {
    changed_cells_since_last >= policy.cell_threshold || elapsed_since_last >= policy.interval
}

/// Scalar field over the state grid's planar (x, y) node lattice. Target and
/// obstacle functions are heading-independent, so they are stored once per
/// planar node and broadcast over theta; index is `ix * ny + iy`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarNodeField {
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl PlanarNodeField {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.ny + iy]
    }
}

/// Target function: pointwise minimum of exact signed distances to the safe
/// zones, evaluated at planar grid nodes. Non-positive exactly on the union.
pub fn build_target_function(grid: &StateGrid, safe_sets: &[SafeZone]) -> Result<PlanarNodeField> {
    if safe_sets.is_empty() {
        return Err(Error::EmptySafeSets);
    }
    let (nx, ny) = (grid.dims[0], grid.dims[1]);
    let mut values = vec![0.0; nx * ny];
    for ix in 0..nx {
        for iy in 0..ny {
            let p = Vec2::new(grid.coord(0, ix), grid.coord(1, iy));
            values[ix * ny + iy] = safe_sets
                .iter()
                .map(|z| z.signed_distance(p))
                .fold(f64::INFINITY, f64::min);
        }
    }
    Ok(PlanarNodeField { nx, ny, values })
}

/// Obstacle function: `g = -sdf(occupied) + robot_radius`, positive exactly
/// where the robot disc overlaps an occupied or unknown cell. The occupancy
/// signed distance field is sampled bilinearly at planar grid nodes.
pub fn build_obstacle_function(
    grid: &StateGrid,
    occupancy: &[bool],
    occ_geometry: &GridGeometry,
    robot_radius: f64,
) -> PlanarNodeField {
    let sdf = crate::env::signed_distance(occupancy, occ_geometry);
    obstacle_function_from_sdf(grid, &sdf, robot_radius)
}

/// Same as [`build_obstacle_function`] with a precomputed occupancy SDF.
pub fn obstacle_function_from_sdf(
    grid: &StateGrid,
    occupancy_sdf: &ScalarField2D,
    robot_radius: f64,
) -> PlanarNodeField {
    let (nx, ny) = (grid.dims[0], grid.dims[1]);
    let mut values = vec![0.0; nx * ny];
    for ix in 0..nx {
        for iy in 0..ny {
            let p = Vec2::new(grid.coord(0, ix), grid.coord(1, iy));
            values[ix * ny + iy] = -occupancy_sdf.interpolate(p) + robot_radius;
        }
    }
    PlanarNodeField { nx, ny, values }
}

/// Solve the reach-avoid recursion up to the configured horizon.
///
/// Sweeps are pure Jacobi updates (each output node reads only the previous
/// iterate), parallelized over x-slabs; results are bitwise independent of
/// the thread schedule.
pub fn solve_reach_avoid<M: Model>(
    target: &PlanarNodeField,
    obstacle: &PlanarNodeField,
    model: &M,
    grid: &StateGrid,
    config: &SolverConfig,
    map_revision: u64,
) -> Result<ValueFunction> {
    assert_eq!(target.nx, grid.dims[0]);
    assert_eq!(target.ny, grid.dims[1]);
    assert_eq!(obstacle.nx, grid.dims[0]);
    assert_eq!(obstacle.ny, grid.dims[1]);
    assert!(config.horizon >= 0.0);

    let t_start = std::time::Instant::now();
    let (nx, ny, nt) = (grid.dims[0], grid.dims[1], grid.dims[2]);

    // V0 = max(l, g), broadcast over theta.
    let mut current = vec![0.0f64; grid.len()];
    for ix in 0..nx {
        for iy in 0..ny {
            let v0 = target.value(ix, iy).max(obstacle.value(ix, iy));
            let base = (ix * ny + iy) * nt;
            current[base..base + nt].fill(v0);
        }
    }

    if config.horizon == 0.0 {
        return Ok(ValueFunction {
            grid: *grid,
            values: current,
            horizon: 0.0,
            map_revision,
            solve_wall_time: t_start.elapsed().as_secs_f64(),
        });
    }

    let alphas = model.dissipation_bounds();
    let mut rate = 0.0;
    for d in 0..3 {
        if grid.dims[d] > 1 {
            rate += alphas[d] / grid.spacing[d];
        }
    }
    let dtau_max = config.cfl_number / rate;
    if !dtau_max.is_finite() || dtau_max <= 0.0 {
        return Err(Error::CflViolation);
    }

    let cos_t: Vec<f64> = (0..nt).map(|it| grid.coord(2, it).cos()).collect();
    let sin_t: Vec<f64> = (0..nt).map(|it| grid.coord(2, it).sin()).collect();
    let inv_dx = 1.0 / grid.spacing[0];
    let inv_dy = 1.0 / grid.spacing[1];
    let inv_dt = 1.0 / grid.spacing[2];
    let clamp = grid.value_clamp() * 5.0;
    let slab = ny * nt;

    let mut next = current.clone();
    let mut elapsed = 0.0f64;
    while elapsed < config.horizon {
        let dtau = dtau_max.min(config.horizon - elapsed);
        if dtau <= f64::EPSILON * config.horizon {
            break;
        }
        {
            let cur = &current;
            next.par_chunks_mut(slab).enumerate().for_each(|(ix, out)| {
                let x_lo = if ix == 0 { 0 } else { ix - 1 };
                let x_hi = if ix + 1 == nx { ix } else { ix + 1 };
                for iy in 0..ny {
                    let y_lo = if iy == 0 { 0 } else { iy - 1 };
                    let y_hi = if iy + 1 == ny { iy } else { iy + 1 };
                    let g_val = obstacle.value(ix, iy);
                    for it in 0..nt {
                        let v = cur[(ix * ny + iy) * nt + it];
                        let v_xm = cur[(x_lo * ny + iy) * nt + it];
                        let v_xp = cur[(x_hi * ny + iy) * nt + it];
                        let v_ym = cur[(ix * ny + y_lo) * nt + it];
                        let v_yp = cur[(ix * ny + y_hi) * nt + it];
                        let (t_lo, t_hi) = if nt == 1 {
                            (0, 0)
                        } else {
                            (
                                if it == 0 { nt - 1 } else { it - 1 },
                                if it + 1 == nt { 0 } else { it + 1 },
                            )
                        };
                        let v_tm = cur[(ix * ny + iy) * nt + t_lo];
                        let v_tp = cur[(ix * ny + iy) * nt + t_hi];

                        let dmx = (v - v_xm) * inv_dx;
                        let dpx = (v_xp - v) * inv_dx;
                        let dmy = (v - v_ym) * inv_dy;
                        let dpy = (v_yp - v) * inv_dy;
                        let dmt = (v - v_tm) * inv_dt;
                        let dpt = (v_tp - v) * inv_dt;

                        let p = [
                            0.5 * (dmx + dpx),
                            0.5 * (dmy + dpy),
                            0.5 * (dmt + dpt),
                        ];
                        let h = model.hamiltonian_trig(cos_t[it], sin_t[it], p);
                        let dissipation = 0.5
                            * (alphas[0] * (dpx - dmx)
                                + alphas[1] * (dpy - dmy)
                                + alphas[2] * (dpt - dmt));
                        let h_lf = h + dissipation;
                        let cand = (v + dtau * h_lf.min(0.0)).clamp(-clamp, clamp);
                        out[iy * nt + it] = g_val.max(cand);
                    }
                }
            });
        }
        std::mem::swap(&mut current, &mut next);
        elapsed += dtau;
    }

    Ok(ValueFunction {
        grid: *grid,
        values: current,
        horizon: config.horizon,
        map_revision,
        solve_wall_time: t_start.elapsed().as_secs_f64(),
    })
}
