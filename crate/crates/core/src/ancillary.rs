//! Ancillary proposal means: homotopy-distinct routes to the goal, tracked
//! into dynamically feasible control sequences.
//!
//! The planner grid masks every cell that is occupied, unknown, or
//! contingency-infeasible for all headings, so ancillary routes never leave
//! the certified set. Distinct homotopy classes are found by repeated A*
//! with a growing detour penalty around already-found routes; each
//! candidate's class is identified by its reduced crossing signature against
//! vertical rays anchored at interior obstacle-component centroids, and
//! duplicates are dropped. Tracking uses pure pursuit: ancillary sequences
//! only seed sampling distributions, so closed-loop fidelity matters more
//! than open-loop optimality.

use crate::dynamics::{ControlSequence, Model, Unicycle, UnicycleControl, UnicycleState};
use crate::env::{obstacle_occupancy, GridGeometry, OccupancyGrid};
use crate::geom::{normalize_angle, Vec2};
use crate::solver::ValueFunction;
use crate::value::{interpolate, FeasibilityMargin};
use serde::{Deserialize, Serialize};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// A grid route with its homotopy signature.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPath {
    /// Cell-center waypoints; consecutive waypoints are 8-neighbors.
    pub waypoints: Vec<Vec2>,
    /// Reduced ray-crossing word: entries are +/-(component id + 1).
    pub signature: Vec<i32>,
}

/// Ancillary proposal means for one planning step.
#[derive(Debug, Clone, Default)]
pub struct AncillaryMeans {
    pub sequences: Vec<ControlSequence>,
    pub paths: Vec<PlanarPath>,
}

/// Pure-pursuit tracker parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackerParams {
    /// Proportional gain on the heading error, 1/s.
    pub gain: f64,
    /// Lookahead distance along the path, meters.
    pub lookahead: f64,
}

impl Default for TrackerParams {
    fn default() -> Self {
        Self {
            gain: 2.5,
            lookahead: 0.4,
        }
    }
}

/// Mask for the ancillary planning grid: a cell is blocked when occupied or
/// unknown, or when even the best heading at its center fails the tightened
/// feasibility check.
pub fn masked_planning_grid(
    grid: &OccupancyGrid,
    vf: &ValueFunction,
    margin: FeasibilityMargin,
) -> Vec<bool> {
    let occ = obstacle_occupancy(grid);
    let g = grid.geometry;
    let ntheta = vf.grid.dims[2];
    let mut masked = vec![false; g.len()];
    for iy in 0..g.height_cells {
        for ix in 0..g.width_cells {
            let idx = g.index(ix, iy);
            if occ[idx] {
                masked[idx] = true;
                continue;
            }
            let c = g.cell_center(ix, iy);
            let mut best = f64::INFINITY;
            for it in 0..ntheta {
                let v = interpolate(vf, [c.x, c.y, vf.grid.coord(2, it)]);
                best = best.min(v);
            }
            masked[idx] = best >= -margin.delta;
        }
    }
    masked
}

/// Up to `max_paths` shortest grid routes with pairwise-distinct homotopy
/// signatures. Returns an empty list when the goal is unreachable on the
/// masked grid. Deterministic for fixed inputs.
pub fn find_homotopy_paths(
    masked: &[bool],
    geometry: &GridGeometry,
    start: Vec2,
    goal: Vec2,
    max_paths: usize,
) -> Vec<PlanarPath> {
    assert_eq!(masked.len(), geometry.len());
    if max_paths == 0 {
        return Vec::new();
    }
    let Some(start_cell) = geometry.cell_at(start) else {
        return Vec::new();
    };
    let Some(goal_cell) = geometry.cell_at(goal) else {
        return Vec::new();
    };
    if masked[geometry.index(start_cell.0, start_cell.1)]
        || masked[geometry.index(goal_cell.0, goal_cell.1)]
    {
        return Vec::new();
    }

    let anchors = interior_component_anchors(masked, geometry);
    let mut penalty = vec![0u32; geometry.len()];
    // Strong enough that a full detour beats re-entering a penalized band.
    let detour_penalty = 5 * (geometry.width_cells + geometry.height_cells) as u32;

    let mut found: Vec<PlanarPath> = Vec::new();
    let attempts = (4 * max_paths).max(8);
    for _ in 0..attempts {
        let Some(cells) = astar(masked, &penalty, geometry, start_cell, goal_cell) else {
            break;
        };
        // Penalize a band around this route so the next search detours.
        for &(ix, iy) in &cells {
            for dy in -2i64..=2 {
                for dx in -2i64..=2 {
                    let nx = ix as i64 + dx;
                    let ny = iy as i64 + dy;
                    if nx >= 0
                        && ny >= 0
                        && (nx as usize) < geometry.width_cells
                        && (ny as usize) < geometry.height_cells
                    {
                        penalty[geometry.index(nx as usize, ny as usize)] += detour_penalty;
                    }
                }
            }
        }
        let waypoints: Vec<Vec2> = cells
            .iter()
            .map(|&(ix, iy)| geometry.cell_center(ix, iy))
            .collect();
        let signature = path_signature(&waypoints, &anchors);
        if found.iter().any(|p| p.signature == signature) {
            continue;
        }
        found.push(PlanarPath {
            waypoints,
            signature,
        });
        if found.len() == max_paths {
            break;
        }
    }
    found
}

/// Upward-ray anchors: centroids of masked components that do not touch the
/// map border (routes cannot pass around border-attached blobs, so they do
/// not distinguish homotopy classes).
fn interior_component_anchors(masked: &[bool], g: &GridGeometry) -> Vec<Vec2> {
    let mut label = vec![u32::MAX; g.len()];
    let mut anchors = Vec::new();
    let mut stack = Vec::new();
    for sy in 0..g.height_cells {
        for sx in 0..g.width_cells {
            let sidx = g.index(sx, sy);
            if !masked[sidx] || label[sidx] != u32::MAX {
                continue;
            }
            let id = anchors.len() as u32;
            label[sidx] = id;
            stack.push((sx, sy));
            let mut sum = Vec2::new(0.0, 0.0);
            let mut count = 0usize;
            let mut touches_border = false;
            while let Some((ix, iy)) = stack.pop() {
                let c = g.cell_center(ix, iy);
                sum = sum + c;
                count += 1;
                if ix == 0 || iy == 0 || ix == g.width_cells - 1 || iy == g.height_cells - 1 {
                    touches_border = true;
                }
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let nx = ix as i64 + dx;
                        let ny = iy as i64 + dy;
                        if nx < 0
                            || ny < 0
                            || nx as usize >= g.width_cells
                            || ny as usize >= g.height_cells
                        {
                            continue;
                        }
                        let nidx = g.index(nx as usize, ny as usize);
                        if masked[nidx] && label[nidx] == u32::MAX {
                            label[nidx] = id;
                            stack.push((nx as usize, ny as usize));
                        }
                    }
                }
            }
            anchors.push(if touches_border {
                None
            } else {
                Some(sum.scale(1.0 / count as f64))
            });
        }
    }
    // Compact: keep interior anchors only, order stable.
    anchors.into_iter().flatten().collect()
}

/// Reduced word of signed ray crossings along a polyline. Ray `k` points in
/// +y from `anchors[k]`; crossing left-to-right appends +(k+1), the reverse
/// appends -(k+1), and adjacent inverses cancel.
fn path_signature(waypoints: &[Vec2], anchors: &[Vec2]) -> Vec<i32> {
    let mut word: Vec<i32> = Vec::new();
    for seg in waypoints.windows(2) {
        let (p, q) = (seg[0], seg[1]);
        for (k, a) in anchors.iter().enumerate() {
            let p_left = p.x < a.x;
            let q_left = q.x < a.x;
            if p_left == q_left {
                continue;
            }
            let t = (a.x - p.x) / (q.x - p.x);
            let y_cross = p.y + (q.y - p.y) * t;
            if y_cross <= a.y {
                continue;
            }
            let letter = if p_left { k as i32 + 1 } else { -(k as i32 + 1) };
            if word.last() == Some(&-letter) {
                word.pop();
            } else {
                word.push(letter);
            }
        }
    }
    word
}

/// 8-connected A* with integer 5/7 edge costs plus per-cell penalties.
/// Deterministic: ties in f break by insertion order.
fn astar(
    masked: &[bool],
    penalty: &[u32],
    g: &GridGeometry,
    start: (usize, usize),
    goal: (usize, usize),
) -> Option<Vec<(usize, usize)>> {
    const STRAIGHT: u32 = 5;
    const DIAGONAL: u32 = 7;
    let octile = |(ix, iy): (usize, usize)| -> u32 {
        let dx = (ix as i64 - goal.0 as i64).unsigned_abs() as u32;
        let dy = (iy as i64 - goal.1 as i64).unsigned_abs() as u32;
        STRAIGHT * dx.max(dy) + (DIAGONAL - STRAIGHT) * dx.min(dy)
    };

    let mut dist = vec![u32::MAX; g.len()];
    let mut parent = vec![u32::MAX; g.len()];
    let mut heap: BinaryHeap<Reverse<(u32, u64, u32)>> = BinaryHeap::new();
    let mut counter = 0u64;
    let sidx = g.index(start.0, start.1) as u32;
    dist[sidx as usize] = 0;
    heap.push(Reverse((octile(start), counter, sidx)));

    while let Some(Reverse((_, _, idx))) = heap.pop() {
        let (ix, iy) = ((idx as usize) % g.width_cells, (idx as usize) / g.width_cells);
        if (ix, iy) == goal {
            let mut cells = vec![goal];
            let mut cur = idx as usize;
            while parent[cur] != u32::MAX {
                cur = parent[cur] as usize;
                cells.push((cur % g.width_cells, cur / g.width_cells));
            }
            cells.reverse();
            return Some(cells);
        }
        let d = dist[idx as usize];
        for (dx, dy, step) in [
            (1i64, 0i64, STRAIGHT),
            (-1, 0, STRAIGHT),
            (0, 1, STRAIGHT),
            (0, -1, STRAIGHT),
            (1, 1, DIAGONAL),
            (1, -1, DIAGONAL),
            (-1, 1, DIAGONAL),
            (-1, -1, DIAGONAL),
        ] {
            let nx = ix as i64 + dx;
            let ny = iy as i64 + dy;
            if nx < 0 || ny < 0 || nx as usize >= g.width_cells || ny as usize >= g.height_cells {
                continue;
            }
            let nidx = g.index(nx as usize, ny as usize);
            if masked[nidx] {
                continue;
            }
            let nd = d + step + penalty[nidx];
            if nd < dist[nidx] {
                dist[nidx] = nd;
                parent[nidx] = idx;
                counter += 1;
                heap.push(Reverse((
                    nd + octile((nx as usize, ny as usize)),
                    counter,
                    nidx as u32,
                )));
            }
        }
    }
    None
}

/// Track a route with pure pursuit, rolling the unicycle out from the
/// current state: steer proportionally to the heading error toward a
/// lookahead point, slow down as the error grows.
pub fn path_to_controls(
    path: &PlanarPath,
    model: &Unicycle,
    from: &UnicycleState,
    steps: usize,
    dt: f64,
    tracker: &TrackerParams,
) -> ControlSequence {
    assert!(!path.waypoints.is_empty());
    let mut controls = Vec::with_capacity(steps);
    let mut state = *from;
    let mut progress = 0usize;
    for _ in 0..steps {
        let pos = state.position();
        // Monotone progress: advance to the nearest waypoint ahead.
        while progress + 1 < path.waypoints.len()
            && path.waypoints[progress + 1].dist(pos) <= path.waypoints[progress].dist(pos)
        {
            progress += 1;
        }
        let target = lookahead_point(&path.waypoints, progress, pos, tracker.lookahead);
        let to_target = target - pos;
        let u = if to_target.norm() < 1e-6 {
            UnicycleControl { v: 0.0, omega: 0.0 }
        } else {
            let heading_error = normalize_angle(to_target.y.atan2(to_target.x) - state.theta);
            let omega = (tracker.gain * heading_error)
                .clamp(-model.bounds.omega_max, model.bounds.omega_max);
            let v = (model.bounds.v_max * heading_error.cos().max(0.0))
                .min(to_target.norm() / dt)
                .clamp(model.bounds.v_min.max(0.0), model.bounds.v_max);
            UnicycleControl { v, omega }
        };
        let u = model.saturate(u);
        controls.push(u);
        state = model.step(&state, u, dt);
    }
    ControlSequence(controls)
}

fn lookahead_point(waypoints: &[Vec2], from_idx: usize, pos: Vec2, lookahead: f64) -> Vec2 {
    let mut acc = 0.0;
    let mut prev = pos;
    for &w in &waypoints[from_idx..] {
        acc += prev.dist(w);
        if acc >= lookahead {
            return w;
        }
        prev = w;
    }
    *waypoints.last().unwrap()
}

/// Build per-step ancillary means: re-track the stored routes from the
/// robot's current state. Routes themselves are refreshed only when the
/// value function is recomputed.
pub fn ancillary_means(
    paths: &[PlanarPath],
    model: &Unicycle,
    from: &UnicycleState,
    steps: usize,
    dt: f64,
    tracker: &TrackerParams,
) -> AncillaryMeans {
    let sequences = paths
        .iter()
        .map(|p| path_to_controls(p, model, from, steps, dt, tracker))
        .collect();
    AncillaryMeans {
        sequences,
        paths: paths.to_vec(),
    }
}
