use scramppi::ancillary::*;
use scramppi::dynamics::*;
use scramppi::env::*;
use scramppi::geom::Vec2;
use scramppi::planner::*;
use scramppi::sim::*;
use scramppi::solver::*;
use scramppi::value::*;

fn main() {
    let params = SimParams {
        planner: PlannerConfig { samples: 64, horizon_steps: 25, goal_weight: 0.5, terminal_weight: 8.0, ..PlannerConfig::default() },
        grid_nodes: (48, 48, 12),
        recompute: RecomputePolicy { cell_threshold: 200, interval: 1.5 },
        ..SimParams::default()
    };
    let map = trap_fixture(0);
    let geom = map.geometry;
    let model = Unicycle::new(params.bounds);

    // Robot parked at the observed hover point, fully sensed around it.
    let state = UnicycleState::new(3.0, 3.3, 0.5);
    let mut grid = OccupancyGrid::unknown(geom);
    // Simulate the sensing history: reveal from start, then along the way.
    for p in [Vec2::new(1.0,3.2), Vec2::new(1.7,3.2), Vec2::new(2.4,3.2), Vec2::new(3.0,3.3)] {
        reveal(&mut grid, &map, p, params.sensing_radius);
    }
    let sg = StateGrid::for_workspace(48, 48, 12, geom.extent());
    let l = build_target_function(&sg, &map.safe_sets).unwrap();
    let occ = obstacle_occupancy(&grid);
    let sdf = signed_distance(&occ, &geom);
    let g = obstacle_function_from_sdf(&sg, &sdf, params.robot_radius);
    let vf = solve_reach_avoid(&l, &g, &model, &sg, &params.solver, 0).unwrap();
    println!("V at robot: {:.3}", interpolate(&vf, [3.0, 3.3, 0.5]));
    println!("V at gap zone: {:.3}", interpolate(&vf, [3.5, 4.8, 0.0]));
    let masked = masked_planning_grid(&grid, &vf, FeasibilityMargin::new(params.planner.delta));

    // ASCII: # occupied-or-unknown, x masked by value, . free-certified
    for iy in (0..64).rev() {
        let mut row = String::new();
        for ix in 0..64 {
            let idx = geom.index(ix, iy);
            let c = geom.cell_center(ix, iy);
            let ch = if matches!(grid.cell(ix, iy), CellState::Occupied) { '#' }
                else if matches!(grid.cell(ix, iy), CellState::Unknown) { '~' }
                else if masked[idx] { 'x' }
                else { '.' };
            let ch = if c.dist(Vec2::new(3.0,3.3)) < 0.1 { 'R' }
                else if map.goal.contains(c) { 'G' }
                else if map.safe_sets.iter().any(|z| z.contains(c)) { 'S' }
                else { ch };
            row.push(ch);
        }
        println!("{row}");
    }
    let paths = find_homotopy_paths(&masked, &geom, Vec2::new(3.0,3.3), map.goal.center, 2);
    println!("paths to goal: {}", paths.len());
}
