//! Worlds and the robot's sensed view of them.
//!
//! A [`GroundTruthMap`] is the complete static environment: occupied cells,
//! safe zones the robot may retreat to, and the goal region. The robot never
//! reads it directly; it senses through [`reveal`], which updates an
//! [`OccupancyGrid`] by ray casting within a limited radius. Unknown cells are
//! treated as occupied everywhere downstream, so the obstacle set can only
//! shrink as the world is revealed.

mod generate;
mod sdf;

pub use generate::{generate_random_environment, EnvGenParams};
pub use sdf::signed_distance;

use crate::geom::Vec2;
use serde::{Deserialize, Serialize};

/// Sensed state of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
}

/// Shared cell geometry for all grid-shaped data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub width_cells: usize,
    pub height_cells: usize,
    /// Cell edge length in meters.
    pub cell_size: f64,
}

impl GridGeometry {
    pub fn new(width_cells: usize, height_cells: usize, cell_size: f64) -> Self {
        assert!(width_cells > 0 && height_cells > 0 && cell_size > 0.0);
        Self {
            width_cells,
            height_cells,
            cell_size,
        }
    }

    pub fn len(&self) -> usize {
        self.width_cells * self.height_cells
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.width_cells && iy < self.height_cells);
        iy * self.width_cells + ix
    }

    /// Center of cell (ix, iy) in workspace meters.
    pub fn cell_center(&self, ix: usize, iy: usize) -> Vec2 {
        Vec2::new(
            (ix as f64 + 0.5) * self.cell_size,
            (iy as f64 + 0.5) * self.cell_size,
        )
    }

    /// Cell containing a workspace point, or None when outside the map.
    pub fn cell_at(&self, p: Vec2) -> Option<(usize, usize)> {
        if p.x < 0.0 || p.y < 0.0 {
            return None;
        }
        let ix = (p.x / self.cell_size).floor() as usize;
        let iy = (p.y / self.cell_size).floor() as usize;
        if ix < self.width_cells && iy < self.height_cells {
            Some((ix, iy))
        } else {
            None
        }
    }

    /// Workspace extent in meters.
    pub fn extent(&self) -> Vec2 {
        Vec2::new(
            self.width_cells as f64 * self.cell_size,
            self.height_cells as f64 * self.cell_size,
        )
    }
}

/// A designated retreat region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SafeZone {
    Rect { min: Vec2, max: Vec2 },
    Disc { center: Vec2, radius: f64 },
}

impl SafeZone {
    pub fn contains(&self, p: Vec2) -> bool {
        match *self {
            SafeZone::Rect { min, max } => {
                p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y
            }
            SafeZone::Disc { center, radius } => p.dist(center) <= radius,
        }
    }

    /// Exact signed distance to the zone boundary (negative inside).
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        match *self {
            SafeZone::Disc { center, radius } => p.dist(center) - radius,
            SafeZone::Rect { min, max } => {
                let c = Vec2::new((min.x + max.x) * 0.5, (min.y + max.y) * 0.5);
                let half = Vec2::new((max.x - min.x) * 0.5, (max.y - min.y) * 0.5);
                let qx = (p.x - c.x).abs() - half.x;
                let qy = (p.y - c.y).abs() - half.y;
                let outside = Vec2::new(qx.max(0.0), qy.max(0.0)).norm();
                outside + qx.max(qy).min(0.0)
            }
        }
    }
}

/// The primary objective region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalRegion {
    pub center: Vec2,
    pub radius: f64,
}

impl GoalRegion {
    pub fn contains(&self, p: Vec2) -> bool {
        p.dist(self.center) <= self.radius
    }
}

/// The complete static world. Map borders are always occupied so dynamics
/// rollouts stay inside the grid without separate bounds checks.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthMap {
    pub geometry: GridGeometry,
    pub occupied: Vec<bool>,
    pub safe_sets: Vec<SafeZone>,
    pub goal: GoalRegion,
    pub start: Vec2,
}

impl GroundTruthMap {
    pub fn is_occupied(&self, ix: usize, iy: usize) -> bool {
        self.occupied[self.geometry.index(ix, iy)]
    }

    /// Check the structural invariants: zones and goal on free cells, at
    /// least one zone connected to the start through free space.
    pub fn check_invariants(&self, clearance: f64) -> bool {
        if self.safe_sets.is_empty() {
            return false;
        }
        let g = &self.geometry;
        // Every zone and the goal must avoid occupied cells.
        for iy in 0..g.height_cells {
            for ix in 0..g.width_cells {
                let c = g.cell_center(ix, iy);
                let inside_zone = self.safe_sets.iter().any(|z| z.contains(c));
                let inside_goal = self.goal.contains(c);
                if (inside_zone || inside_goal) && self.occupied[g.index(ix, iy)] {
                    return false;
                }
            }
        }
        // Start must connect to at least one zone cell through clear space.
        let reach = free_space_reachability(self, clearance, self.start);
        self.safe_sets.iter().any(|z| {
            (0..g.height_cells).any(|iy| {
                (0..g.width_cells).any(|ix| {
                    reach[g.index(ix, iy)] && z.contains(g.cell_center(ix, iy))
                })
            })
        })
    }
}

/// Flood fill of the free space traversable with the given clearance,
/// starting from a workspace point. Returns a per-cell reachability mask.
pub fn free_space_reachability(map: &GroundTruthMap, clearance: f64, from: Vec2) -> Vec<bool> {
    let g = &map.geometry;
    let sdf = signed_distance(&map.occupied, g);
    let traversable: Vec<bool> = sdf.values.iter().map(|&d| d > clearance).collect();
    let mut reach = vec![false; g.len()];
    let Some((sx, sy)) = g.cell_at(from) else {
        return reach;
    };
    if !traversable[g.index(sx, sy)] {
        return reach;
    }
    let mut queue = std::collections::VecDeque::new();
    reach[g.index(sx, sy)] = true;
    queue.push_back((sx, sy));
    while let Some((ix, iy)) = queue.pop_front() {
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
            if traversable[idx] && !reach[idx] {
                reach[idx] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    reach
}

/// The robot's evolving belief about the world.
///
/// Cells only ever transition Unknown -> Free or Unknown -> Occupied; the
/// revision counter increases whenever any cell changes.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub geometry: GridGeometry,
    cells: Vec<CellState>,
    revision: u64,
}

impl OccupancyGrid {
    /// Fresh all-unknown grid matching a geometry.
    pub fn unknown(geometry: GridGeometry) -> Self {
        Self {
            cells: vec![CellState::Unknown; geometry.len()],
            geometry,
            revision: 0,
        }
    }

    /// Fully revealed view of a ground-truth map (used by the standalone
    /// solver command and tests).
    pub fn fully_revealed(truth: &GroundTruthMap) -> Self {
        let cells = truth
            .occupied
            .iter()
            .map(|&o| if o { CellState::Occupied } else { CellState::Free })
            .collect();
        Self {
            geometry: truth.geometry,
            cells,
            revision: 1,
        }
    }

    /// Construct from raw cells (dump readers, fixtures).
    pub fn from_cells(geometry: GridGeometry, cells: Vec<CellState>, revision: u64) -> Self {
        assert_eq!(cells.len(), geometry.len());
        Self {
            geometry,
            cells,
            revision,
        }
    }

    pub fn cell(&self, ix: usize, iy: usize) -> CellState {
        self.cells[self.geometry.index(ix, iy)]
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|&&c| c == state).count()
    }
}

/// Reveal every unknown cell within `sensing_radius` of `position` that is
/// visible by straight-line ray casting over the ground truth (no occupied
/// ground-truth cell strictly between the robot's cell and the target cell).
/// Returns the number of cells changed; the revision is bumped iff any did.
pub fn reveal(
    grid: &mut OccupancyGrid,
    truth: &GroundTruthMap,
    position: Vec2,
    sensing_radius: f64,
) -> usize {
    assert_eq!(grid.geometry, truth.geometry);
    if sensing_radius <= 0.0 {
        return 0;
    }
    let g = grid.geometry;
    let Some((rx, ry)) = g.cell_at(position) else {
        return 0;
    };
    let radius_cells = (sensing_radius / g.cell_size).ceil() as isize + 1;
    let mut changed = 0usize;
    let x_lo = (rx as isize - radius_cells).max(0) as usize;
    let x_hi = ((rx as isize + radius_cells) as usize).min(g.width_cells - 1);
    let y_lo = (ry as isize - radius_cells).max(0) as usize;
    let y_hi = ((ry as isize + radius_cells) as usize).min(g.height_cells - 1);
    for iy in y_lo..=y_hi {
        for ix in x_lo..=x_hi {
            let idx = g.index(ix, iy);
            if grid.cells[idx] != CellState::Unknown {
                continue;
            }
            if g.cell_center(ix, iy).dist(position) > sensing_radius {
                continue;
            }
            if !line_of_sight(truth, (rx, ry), (ix, iy)) {
                continue;
            }
            grid.cells[idx] = if truth.occupied[idx] {
                CellState::Occupied
            } else {
                CellState::Free
            };
            changed += 1;
        }
    }
    if changed > 0 {
        grid.revision += 1;
    }
    changed
}

/// True when no occupied ground-truth cell lies strictly between the two
/// cells along the Bresenham line.
fn line_of_sight(truth: &GroundTruthMap, from: (usize, usize), to: (usize, usize)) -> bool {
    let mut blocked = false;
    bresenham_between(from, to, |ix, iy| {
        if truth.is_occupied(ix, iy) {
            blocked = true;
        }
    });
    !blocked
}

/// Visit the cells strictly between two endpoints along the Bresenham line.
fn bresenham_between(
    (x0, y0): (usize, usize),
    (x1, y1): (usize, usize),
    mut visit: impl FnMut(usize, usize),
) {
    let (mut x, mut y) = (x0 as isize, y0 as isize);
    let (tx, ty) = (x1 as isize, y1 as isize);
    let dx = (tx - x).abs();
    let dy = -(ty - y).abs();
    let sx = if x < tx { 1 } else { -1 };
    let sy = if y < ty { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        if x == tx && y == ty {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
        if x == tx && y == ty {
            break;
        }
        visit(x as usize, y as usize);
    }
}

/// Per-cell obstacle mask: occupied or still unknown (pessimistic).
pub fn obstacle_occupancy(grid: &OccupancyGrid) -> Vec<bool> {
    grid.cells
        .iter()
        .map(|&c| matches!(c, CellState::Occupied | CellState::Unknown))
        .collect()
}

/// A real-valued field sampled at cell centers (signed-distance convention).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    pub geometry: GridGeometry,
    pub values: Vec<f64>,
}

impl ScalarField2D {
    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[self.geometry.index(ix, iy)]
    }

    /// Bilinear interpolation at a workspace point. Queries outside the cell
    /// center lattice clamp to the nearest sample.
    pub fn interpolate(&self, p: Vec2) -> f64 {
        let g = &self.geometry;
        let fx = (p.x / g.cell_size - 0.5)
            .clamp(0.0, (g.width_cells - 1) as f64);
        let fy = (p.y / g.cell_size - 0.5)
            .clamp(0.0, (g.height_cells - 1) as f64);
        let ix = (fx.floor() as usize).min(g.width_cells.saturating_sub(2));
        let iy = (fy.floor() as usize).min(g.height_cells.saturating_sub(2));
        let tx = fx - ix as f64;
        let ty = fy - iy as f64;
        let ix1 = (ix + 1).min(g.width_cells - 1);
        let iy1 = (iy + 1).min(g.height_cells - 1);
        let v00 = self.value(ix, iy);
        let v10 = self.value(ix1, iy);
        let v01 = self.value(ix, iy1);
        let v11 = self.value(ix1, iy1);
        let a = v00 + (v10 - v00) * tx;
        let b = v01 + (v11 - v01) * tx;
        a + (b - a) * ty
    }
}
