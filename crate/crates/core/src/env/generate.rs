//! Random cluttered-environment generation.
//!
//! Maps are a pure function of (seed, params): failed attempts retry with a
//! perturbed sub-seed in a fixed order, so the result is reproducible. Every
//! returned map has occupied borders, a start and goal connected through
//! clear free space, and safe zones strung along a feasible route (one close
//! enough to the start that the first sensing sweep certifies a contingency).

use super::{free_space_reachability, GoalRegion, GridGeometry, GroundTruthMap, SafeZone};
use super::sdf::signed_distance;
use crate::geom::Vec2;
use crate::rng;
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

const TAG_ENVGEN: u64 = 3;

/// Tunable knobs for [`generate_random_environment`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvGenParams {
    pub width_cells: usize,
    pub height_cells: usize,
    pub cell_size: f64,
    pub obstacle_count: usize,
    /// Obstacle rectangle edge lengths, meters.
    pub obstacle_min_size: f64,
    pub obstacle_max_size: f64,
    pub safe_zone_count: usize,
    pub safe_zone_radius: f64,
    pub goal_radius: f64,
    /// Clearance (meters) used both for connectivity checks and to keep
    /// obstacles away from the start/goal neighborhoods.
    pub min_clearance: f64,
    /// Maximum along-route distance from the start to the first safe zone.
    pub near_zone_dist: f64,
    pub max_attempts: u32,
}

impl Default for EnvGenParams {
    fn default() -> Self {
        Self {
            width_cells: 64,
            height_cells: 64,
            cell_size: 0.1,
            obstacle_count: 8,
            obstacle_min_size: 0.3,
            obstacle_max_size: 1.0,
            safe_zone_count: 4,
            safe_zone_radius: 0.35,
            goal_radius: 0.3,
            min_clearance: 0.35,
            near_zone_dist: 1.2,
            max_attempts: 50,
        }
    }
}

/// Generate a cluttered world with sparse safe zones. Deterministic for a
/// fixed (seed, params) pair.
pub fn generate_random_environment(seed: u64, params: &EnvGenParams) -> Result<GroundTruthMap> {
    for attempt in 0..params.max_attempts {
        if let Some(map) = try_generate(seed, attempt, params) {
            debug_assert!(map.check_invariants(params.min_clearance));
            return Ok(map);
        }
    }
    Err(Error::GenerationFailed {
        attempts: params.max_attempts,
    })
}

fn try_generate(seed: u64, attempt: u32, params: &EnvGenParams) -> Option<GroundTruthMap> {
    let g = GridGeometry::new(params.width_cells, params.height_cells, params.cell_size);
    let extent = g.extent();
    let mut rng = rng::stream(seed, TAG_ENVGEN, attempt as u64, 0);

    let start = Vec2::new(
        extent.x * rng.gen_range(0.10..0.20),
        extent.y * rng.gen_range(0.20..0.80),
    );
    let goal_center = Vec2::new(
        extent.x * rng.gen_range(0.80..0.90),
        extent.y * rng.gen_range(0.20..0.80),
    );

    let mut occupied = vec![false; g.len()];
    mark_borders(&mut occupied, &g);

    // Keep the start neighborhood open so the first safe zone and the route
    // to it are sensed (and certified) before the robot moves.
    let start_reserve =
        params.near_zone_dist + params.safe_zone_radius + params.min_clearance;
    let goal_reserve = params.goal_radius + params.min_clearance;

    for _ in 0..params.obstacle_count {
        for _try in 0..20 {
            let w = rng.gen_range(params.obstacle_min_size..=params.obstacle_max_size);
            let h = rng.gen_range(params.obstacle_min_size..=params.obstacle_max_size);
            let cx = rng.gen_range(0.0..extent.x);
            let cy = rng.gen_range(0.0..extent.y);
            let min = Vec2::new(cx - w * 0.5, cy - h * 0.5);
            let max = Vec2::new(cx + w * 0.5, cy + h * 0.5);
            let infl = params.min_clearance;
            if rect_intersects_disc(min, max, infl, start, start_reserve)
                || rect_intersects_disc(min, max, infl, goal_center, goal_reserve)
            {
                continue;
            }
            mark_rect(&mut occupied, &g, min, max);
            break;
        }
    }

    // Route feasibility with clearance.
    let sdf = signed_distance(&occupied, &g);
    let traversable: Vec<bool> = sdf.values.iter().map(|&d| d > params.min_clearance).collect();
    let start_cell = g.cell_at(start)?;
    let goal_cell = g.cell_at(goal_center)?;
    let path = bfs_path(&traversable, &g, start_cell, goal_cell)?;

    let safe_sets = place_zones_along_path(&path, &sdf, &g, params)?;

    let map = GroundTruthMap {
        geometry: g,
        occupied,
        safe_sets,
        goal: GoalRegion {
            center: goal_center,
            radius: params.goal_radius,
        },
        start,
    };

    // Goal region must sit on free cells.
    if !goal_on_free_cells(&map) {
        return None;
    }
    // A zone must be reachable from the start through clear space.
    let reach = free_space_reachability(&map, params.min_clearance, start);
    let zone_reachable = map.safe_sets.iter().any(|z| {
        (0..g.height_cells).any(|iy| {
            (0..g.width_cells)
                .any(|ix| reach[g.index(ix, iy)] && z.contains(g.cell_center(ix, iy)))
        })
    });
    if !zone_reachable {
        return None;
    }
    Some(map)
}

fn mark_borders(occupied: &mut [bool], g: &GridGeometry) {
    for ix in 0..g.width_cells {
        occupied[g.index(ix, 0)] = true;
        occupied[g.index(ix, g.height_cells - 1)] = true;
    }
    for iy in 0..g.height_cells {
        occupied[g.index(0, iy)] = true;
        occupied[g.index(g.width_cells - 1, iy)] = true;
    }
}

fn mark_rect(occupied: &mut [bool], g: &GridGeometry, min: Vec2, max: Vec2) {
    for iy in 0..g.height_cells {
        for ix in 0..g.width_cells {
            let c = g.cell_center(ix, iy);
            if c.x >= min.x && c.x <= max.x && c.y >= min.y && c.y <= max.y {
                occupied[g.index(ix, iy)] = true;
            }
        }
    }
}

fn rect_intersects_disc(min: Vec2, max: Vec2, inflate: f64, center: Vec2, radius: f64) -> bool {
    let nx = center.x.clamp(min.x - inflate, max.x + inflate);
    let ny = center.y.clamp(min.y - inflate, max.y + inflate);
    Vec2::new(nx, ny).dist(center) <= radius
}

fn goal_on_free_cells(map: &GroundTruthMap) -> bool {
    let g = &map.geometry;
    for iy in 0..g.height_cells {
        for ix in 0..g.width_cells {
            if map.goal.contains(g.cell_center(ix, iy)) && map.occupied[g.index(ix, iy)] {
                return false;
            }
        }
    }
    true
}

/// Shortest 4-connected path between two cells on a traversability mask.
fn bfs_path(
    traversable: &[bool],
    g: &GridGeometry,
    from: (usize, usize),
    to: (usize, usize),
) -> Option<Vec<(usize, usize)>> {
    if !traversable[g.index(from.0, from.1)] || !traversable[g.index(to.0, to.1)] {
        return None;
    }
    let mut parent: Vec<u32> = vec![u32::MAX; g.len()];
    let mut queue = VecDeque::new();
    parent[g.index(from.0, from.1)] = g.index(from.0, from.1) as u32;
    queue.push_back(from);
    while let Some((ix, iy)) = queue.pop_front() {
        if (ix, iy) == to {
            let mut path = vec![to];
            let mut cur = g.index(to.0, to.1);
            while parent[cur] as usize != cur {
                cur = parent[cur] as usize;
                path.push((cur % g.width_cells, cur / g.width_cells));
            }
            path.reverse();
            return Some(path);
        }
        let neighbors = [
            (ix.wrapping_sub(1), iy),
            (ix + 1, iy),
            (ix, iy.wrapping_sub(1)),
            (ix, iy + 1),
        ];
        for (nx, ny) in neighbors {
            if nx >= g.width_cells || ny >= g.height_cells {
                continue;
            }
            let idx = g.index(nx, ny);
            if traversable[idx] && parent[idx] == u32::MAX {
                parent[idx] = g.index(ix, iy) as u32;
                queue.push_back((nx, ny));
            }
        }
    }
    None
}

/// String safe zones along the route: the first within `near_zone_dist` of
/// the start, the rest at even arc-length spacing. Each zone center slides
/// within a window to the locally clearest cell; radii shrink to fit but
/// never below 0.15 m.
fn place_zones_along_path(
    path: &[(usize, usize)],
    sdf: &super::ScalarField2D,
    g: &GridGeometry,
    params: &EnvGenParams,
) -> Option<Vec<SafeZone>> {
    let count = params.safe_zone_count.max(1);
    let arc_len = (path.len().saturating_sub(1)) as f64 * g.cell_size;
    let first_arc = params.near_zone_dist.min(0.35 * arc_len);
    let last_arc = 0.92 * arc_len;
    let window = (1.0 / g.cell_size).round() as isize;

    let mut zones = Vec::with_capacity(count);
    for j in 0..count {
        let target_arc = if count == 1 {
            first_arc
        } else {
            first_arc + (last_arc - first_arc) * j as f64 / (count - 1) as f64
        };
        let center_idx = (target_arc / g.cell_size).round() as isize;
        let lo = (center_idx - window).max(0) as usize;
        let hi = ((center_idx + window) as usize).min(path.len() - 1);
        // For the near-start zone, never slide past the allowed distance.
        let hi = if j == 0 {
            hi.min((params.near_zone_dist / g.cell_size).floor() as usize)
                .max(lo)
        } else {
            hi
        };
        let (best_ix, best_iy) = path[lo..=hi]
            .iter()
            .copied()
            .max_by(|&a, &b| {
                sdf.value(a.0, a.1)
                    .partial_cmp(&sdf.value(b.0, b.1))
                    .unwrap()
            })?;
        let clear = sdf.value(best_ix, best_iy);
        let radius = params.safe_zone_radius.min(clear - 0.5 * g.cell_size - 0.02);
        if radius < 0.15 {
            return None;
        }
        zones.push(SafeZone::Disc {
            center: g.cell_center(best_ix, best_iy),
            radius,
        });
    }
    Some(zones)
}
