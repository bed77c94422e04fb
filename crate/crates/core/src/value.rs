//! Continuous-state access to a solved value function.
//!
//! Queries outside the planar grid bounds return a large positive sentinel:
//! rollouts that exit the grid are infeasible, not errors. All feasibility
//! checks use the tightened condition `V(x) < -delta`; the margin absorbs
//! zero-order-hold drift between planning steps and grid interpolation
//! error.

use crate::dynamics::Model;
use crate::solver::ValueFunction;
use serde::{Deserialize, Serialize};

/// Tightening margin for feasibility checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityMargin {
    pub delta: f64,
}

impl FeasibilityMargin {
    pub fn new(delta: f64) -> Self {
        assert!(delta > 0.0);
        Self { delta }
    }
}

/// Conservative margin bound: `L_V * eps_zoh + L_V * dx * sqrt(n) / 2`,
/// combining unmonitored drift between planning steps with grid
/// interpolation error.
pub fn compute_margin(value_slope: f64, eps_zoh: f64, grid_spacing: f64, dims: usize) -> f64 {
    value_slope * eps_zoh + value_slope * grid_spacing * (dims as f64).sqrt() / 2.0
}

/// Fractional node coordinate along one axis, snapped to the lattice when
/// within rounding distance so on-node queries are exact.
fn fractional(coord: f64, lower: f64, spacing: f64) -> f64 {
    let f = (coord - lower) / spacing;
    let r = f.round();
    if (f - r).abs() < 1e-9 {
        r
    } else {
        f
    }
}

/// Trilinear interpolation with periodic wrap in theta. Planar queries
/// outside the grid return the infeasible sentinel.
pub fn interpolate(vf: &ValueFunction, state: [f64; 3]) -> f64 {
    let g = &vf.grid;
    if state[0] < g.lower[0]
        || state[0] > g.upper[0]
        || state[1] < g.lower[1]
        || state[1] > g.upper[1]
        || !state[0].is_finite()
        || !state[1].is_finite()
    {
        return vf.infeasible_sentinel();
    }
    let (nx, ny, nt) = (g.dims[0], g.dims[1], g.dims[2]);

    let fx = fractional(state[0], g.lower[0], g.spacing[0]).clamp(0.0, (nx - 1) as f64);
    let fy = fractional(state[1], g.lower[1], g.spacing[1]).clamp(0.0, (ny - 1) as f64);
    let ix = (fx.floor() as usize).min(nx - 2);
    let iy = (fy.floor() as usize).min(ny - 2);
    let tx = fx - ix as f64;
    let ty = fy - iy as f64;

    let (it, it1, tt) = if nt == 1 {
        (0, 0, 0.0)
    } else {
        let ft = fractional(state[2], g.lower[2], g.spacing[2]).rem_euclid(nt as f64);
        let it = (ft.floor() as usize).min(nt - 1);
        (it, (it + 1) % nt, ft - it as f64)
    };

    let corner = |dx: usize, dy: usize, itc: usize| vf.values[g.index(ix + dx, iy + dy, itc)];
    let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;

    let c00 = lerp(corner(0, 0, it), corner(0, 0, it1), tt);
    let c01 = lerp(corner(0, 1, it), corner(0, 1, it1), tt);
    let c10 = lerp(corner(1, 0, it), corner(1, 0, it1), tt);
    let c11 = lerp(corner(1, 1, it), corner(1, 1, it1), tt);
    let c0 = lerp(c00, c01, ty);
    let c1 = lerp(c10, c11, ty);
    lerp(c0, c1, tx)
}

/// Central differences of the interpolated field with step equal to one grid
/// spacing per dimension; the theta component respects the periodic wrap.
pub fn gradient(vf: &ValueFunction, state: [f64; 3]) -> [f64; 3] {
    let g = &vf.grid;
    let mut out = [0.0; 3];
    for d in 0..3 {
        if g.dims[d] == 1 {
            out[d] = 0.0;
            continue;
        }
        let h = g.spacing[d];
        let mut plus = state;
        let mut minus = state;
        plus[d] += h;
        minus[d] -= h;
        out[d] = (interpolate(vf, plus) - interpolate(vf, minus)) / (2.0 * h);
    }
    out
}

/// Tightened membership in the contingency-feasible set.
pub fn is_feasible(vf: &ValueFunction, state: [f64; 3], margin: FeasibilityMargin) -> bool {
    interpolate(vf, state) < -margin.delta
}

/// The reach-avoid optimal controller: the control-set vertex minimizing
/// `grad V . f(x, u)`. Drives the state toward the safe set at the maximum
/// rate whenever the state is feasible.
pub fn optimal_control<M: Model>(vf: &ValueFunction, model: &M, state: &M::State) -> M::Control {
    let p = gradient(vf, model.to_grid(state));
    model.control_from_costate(state, p)
}
