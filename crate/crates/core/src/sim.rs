//! Closed-loop episodes and the multi-environment benchmark.
//!
//! An episode loops: sense (ray-cast reveal) -> recompute the value function
//! when the trigger policy fires (full recomputation, never warm-started;
//! the stale function remains a conservative certificate meanwhile) ->
//! refresh ancillary routes -> one planner step -> execute -> record
//! metrics. Every variant is audited against the current value function,
//! including vanilla MPPI, which does not use it for planning. A scripted
//! trigger switches the loop to contingency mode: the robot follows the
//! reach-avoid optimal controller until it enters a safe zone.

use crate::ancillary::{ancillary_means, find_homotopy_paths, masked_planning_grid, PlanarPath, TrackerParams};
use crate::dynamics::{ControlBounds, ControlSequence, Model, Unicycle, UnicycleControl, UnicycleState};
use crate::env::{
    generate_random_environment, obstacle_occupancy, reveal, signed_distance, EnvGenParams,
    GoalRegion, GridGeometry, GroundTruthMap, OccupancyGrid, SafeZone, ScalarField2D,
};
use crate::geom::Vec2;
use crate::planner::{plan_step, PlanContext, PlannerConfig, PlannerVariant, SelectionBranch};
use crate::rng;
use crate::solver::{
    build_target_function, obstacle_function_from_sdf, should_recompute, solve_reach_avoid,
    RecomputePolicy, SolverConfig, StateGrid, ValueFunction,
};
use crate::value::{interpolate, optimal_control};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const TAG_PLAN_SEED: u64 = 40;
const TAG_ENV_SEED: u64 = 41;

/// How an episode's world is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvSource {
    Random { seed: u64 },
    /// Hand-built trap fixture (see [`trap_fixture`]).
    Trap { kind: usize },
}

impl EnvSource {
    pub fn describe(&self) -> String {
        match self {
            EnvSource::Random { seed } => format!("random:{seed}"),
            EnvSource::Trap { kind } => format!("trap:{kind}"),
        }
    }
}

/// Episode-independent simulation parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub env: EnvGenParams,
    pub bounds: ControlBounds,
    pub planner: PlannerConfig,
    pub solver: SolverConfig,
    pub recompute: RecomputePolicy,
    pub tracker: TrackerParams,
    /// Value grid dimensions (x, y, theta nodes).
    pub grid_nodes: (usize, usize, usize),
    pub robot_radius: f64,
    pub sensing_radius: f64,
    /// Episode step budget as a multiple of the straight-line kinematic
    /// lower bound.
    pub max_steps_factor: f64,
    /// Keep a copy of every recomputed value function in the result
    /// (monotonicity audits); off by default.
    #[serde(default)]
    pub capture_value_snapshots: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            env: EnvGenParams::default(),
            bounds: ControlBounds::new(0.0, 1.0, 2.5),
            planner: PlannerConfig::default(),
            solver: SolverConfig {
                horizon: 3.0,
                cfl_number: 0.8,
            },
            recompute: RecomputePolicy::default(),
            tracker: TrackerParams::default(),
            grid_nodes: (64, 64, 16),
            robot_radius: 0.15,
            sensing_radius: 2.5,
            max_steps_factor: 4.0,
            capture_value_snapshots: false,
        }
    }
}

/// One episode to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpisodeConfig {
    pub env: EnvSource,
    pub variant: PlannerVariant,
    /// Scripted contingency trigger (step index), if any.
    pub contingency_trigger_step: Option<usize>,
}

/// Execution mode of a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Nominal,
    Contingency,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Nominal => "NOMINAL",
            Mode::Contingency => "CONTINGENCY",
        }
    }
}

/// Per-step record for logs and audits.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub state: UnicycleState,
    pub control: UnicycleControl,
    /// Value of the current certificate at the state (the audit field).
    pub value_at_state: f64,
    pub branch: Option<SelectionBranch>,
    pub ess: f64,
    pub alive_counts: Vec<usize>,
    pub recompute: bool,
    pub mode: Mode,
}

/// Outcome of a scripted contingency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContingencyOutcome {
    pub triggered_step: usize,
    pub reached_zone: bool,
    pub elapsed: f64,
}

/// Closed-loop metrics for one episode.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub success: bool,
    pub steps: usize,
    pub unsafe_states: usize,
    pub valid_contingency_fraction: f64,
    pub mean_ess: f64,
    /// Mean wall time of one planner step, milliseconds.
    pub plan_time_ms: f64,
    /// Mean wall time of one value solve, milliseconds.
    pub solve_time_ms: f64,
    pub solves: usize,
    pub contingency: Option<ContingencyOutcome>,
    pub log: Vec<StepRecord>,
    pub value_snapshots: Vec<ValueFunction>,
}

/// Build the world for an episode.
pub fn build_environment(params: &SimParams, source: EnvSource) -> crate::Result<GroundTruthMap> {
    match source {
        EnvSource::Random { seed } => generate_random_environment(seed, &params.env),
        EnvSource::Trap { kind } => Ok(trap_fixture(kind)),
    }
}

/// Run one closed-loop episode. Deterministic for fixed inputs.
pub fn run_episode(
    params: &SimParams,
    episode: &EpisodeConfig,
    seed: u64,
) -> crate::Result<EpisodeResult> {
    let map = build_environment(params, episode.env)?;
    run_episode_on_map(params, &map, episode, seed)
}

/// Same as [`run_episode`] with a caller-provided world.
pub fn run_episode_on_map(
    params: &SimParams,
    map: &GroundTruthMap,
    episode: &EpisodeConfig,
    seed: u64,
) -> crate::Result<EpisodeResult> {
    let model = Unicycle::new(params.bounds);
    let geom = map.geometry;
    let extent = geom.extent();
    let (nx, ny, ntheta) = params.grid_nodes;
    let state_grid = StateGrid::for_workspace(nx, ny, ntheta, extent);
    let target = build_target_function(&state_grid, &map.safe_sets)?;
    let margin_delta = params.planner.delta;

    let plan_seed = rng::mix(seed, TAG_PLAN_SEED, 0, 0);
    let mut grid = OccupancyGrid::unknown(geom);
    let start_heading = {
        let d = map.goal.center - map.start;
        d.y.atan2(d.x)
    };
    let mut state = UnicycleState::new(map.start.x, map.start.y, start_heading);
    let mut mean = ControlSequence::zeros(params.planner.horizon_steps);

    let straight_steps =
        (map.start.dist(map.goal.center) / (params.bounds.v_max * params.planner.dt)).ceil();
    let max_steps = (params.max_steps_factor * straight_steps).ceil() as usize;

    let mut vf: Option<ValueFunction> = None;
    let mut occ_sdf: Option<ScalarField2D> = None;
    let mut paths: Vec<PlanarPath> = Vec::new();
    let mut changed_since = 0usize;
    let mut elapsed_since = 0.0f64;

    let mut log: Vec<StepRecord> = Vec::new();
    let mut snapshots: Vec<ValueFunction> = Vec::new();
    let mut unsafe_states = 0usize;
    let mut valid_count = 0usize;
    let mut ess_sum = 0.0;
    let mut ess_count = 0usize;
    let mut plan_time = 0.0f64;
    let mut plan_count = 0usize;
    let mut solve_time = 0.0f64;
    let mut solves = 0usize;
    let mut mode = Mode::Nominal;
    let mut contingency: Option<ContingencyOutcome> = None;
    let mut success = false;
    let mut steps = 0usize;

    for step in 0..max_steps {
        changed_since += reveal(&mut grid, map, state.position(), params.sensing_radius);

        let trigger = vf.is_none()
            || should_recompute(&params.recompute, changed_since, elapsed_since);
        if trigger {
            let occ = obstacle_occupancy(&grid);
            let sdf = signed_distance(&occ, &geom);
            let g = obstacle_function_from_sdf(&state_grid, &sdf, params.robot_radius);
            let solved = solve_reach_avoid(
                &target,
                &g,
                &model,
                &state_grid,
                &params.solver,
                grid.revision(),
            )?;
            solve_time += solved.solve_wall_time * 1e3;
            solves += 1;
            if params.capture_value_snapshots {
                snapshots.push(solved.clone());
            }
            if episode.variant != PlannerVariant::VanillaMppi {
                let masked = masked_planning_grid(
                    &grid,
                    &solved,
                    crate::value::FeasibilityMargin::new(margin_delta),
                );
                paths = frontier_paths(
                    &masked,
                    &geom,
                    state.position(),
                    map.goal.center,
                    params.planner.ancillary_groups,
                );
            }
            occ_sdf = Some(sdf);
            vf = Some(solved);
            changed_since = 0;
            elapsed_since = 0.0;
        }
        let value = vf.as_ref().expect("value function exists after first solve");
        let sdf = occ_sdf.as_ref().expect("obstacle field exists after first solve");

        // Audit against the current certificate (all variants).
        let v_state = interpolate(value, [state.x, state.y, state.theta]);
        if v_state > 0.0 {
            unsafe_states += 1;
        } else {
            valid_count += 1;
        }

        if mode == Mode::Nominal && episode.contingency_trigger_step == Some(step) {
            mode = Mode::Contingency;
            contingency = Some(ContingencyOutcome {
                triggered_step: step,
                reached_zone: false,
                elapsed: 0.0,
            });
        }

        let (control, branch, ess, alive_counts) = match mode {
            Mode::Contingency => {
                if map.safe_sets.iter().any(|z| z.contains(state.position())) {
                    if let Some(c) = contingency.as_mut() {
                        c.reached_zone = true;
                    }
                    steps = step;
                    break;
                }
                (crate::planner::contingency_execute(value, &model, &state), None, 0.0, Vec::new())
            }
            Mode::Nominal => {
                let anc = if episode.variant == PlannerVariant::VanillaMppi {
                    Vec::new()
                } else {
                    ancillary_means(
                        &paths,
                        &model,
                        &state,
                        params.planner.horizon_steps,
                        params.planner.dt,
                        &params.tracker,
                    )
                    .sequences
                };
                let ctx = PlanContext {
                    model: &model,
                    goal: map.goal.center,
                    variant: episode.variant,
                    value: Some(value),
                    obstacle_sdf: Some(sdf),
                    robot_radius: params.robot_radius,
                };
                let t0 = std::time::Instant::now();
                let plan = plan_step(
                    &ctx,
                    &state,
                    &mean,
                    &anc,
                    &params.planner,
                    rng::mix(plan_seed, 42, step as u64, 0),
                );
                plan_time += t0.elapsed().as_secs_f64() * 1e3;
                plan_count += 1;
                if !plan.update_skipped {
                    ess_sum += plan.ess;
                    ess_count += 1;
                }
                mean = plan.mean.shifted();
                let alive = plan
                    .survivors
                    .last()
                    .cloned()
                    .unwrap_or_default();
                (plan.executed, Some(plan.branch), plan.ess, alive)
            }
        };

        log.push(StepRecord {
            step,
            state,
            control,
            value_at_state: v_state,
            branch,
            ess,
            alive_counts,
            recompute: trigger,
            mode,
        });

        state = model.step(&state, control, params.planner.dt);
        elapsed_since += params.planner.dt;
        if let Some(c) = contingency.as_mut() {
            if mode == Mode::Contingency {
                c.elapsed += params.planner.dt;
            }
        }
        steps = step + 1;

        if mode == Mode::Contingency {
            if map.safe_sets.iter().any(|z| z.contains(state.position())) {
                if let Some(c) = contingency.as_mut() {
                    c.reached_zone = true;
                }
                break;
            }
            continue;
        }
        if map.goal.contains(state.position()) {
            success = true;
            break;
        }
    }

    let audited = (unsafe_states + valid_count).max(1);
    Ok(EpisodeResult {
        success,
        steps,
        unsafe_states,
        valid_contingency_fraction: valid_count as f64 / audited as f64,
        mean_ess: if ess_count > 0 {
            ess_sum / ess_count as f64
        } else {
            0.0
        },
        plan_time_ms: if plan_count > 0 {
            plan_time / plan_count as f64
        } else {
            0.0
        },
        solve_time_ms: if solves > 0 {
            solve_time / solves as f64
        } else {
            0.0
        },
        solves,
        contingency,
        log,
        value_snapshots: snapshots,
    })
}

/// Ancillary routes toward the goal. While the goal itself is outside the
/// certified set (typical until late in an episode: unknown cells are
/// pessimistically occupied), routes instead target the certified cell
/// closest to the goal, so proposals pull the robot along the certified
/// frontier and sensing keeps opening it. Every route stays on unmasked
/// cells either way.
fn frontier_paths(
    masked: &[bool],
    geom: &GridGeometry,
    start: Vec2,
    goal: Vec2,
    max_paths: usize,
) -> Vec<PlanarPath> {
    // Start cell, or the nearest unmasked cell within a small window (the
    // robot can sit marginally outside the cell-center certified set).
    let Some(start_cell) = nearest_unmasked(masked, geom, start, 3) else {
        return Vec::new();
    };
    let start_point = geom.cell_center(start_cell.0, start_cell.1);

    // Reachable set from the start over unmasked cells, tracking the cell
    // closest to the goal.
    let mut seen = vec![false; geom.len()];
    let mut queue = std::collections::VecDeque::new();
    seen[geom.index(start_cell.0, start_cell.1)] = true;
    queue.push_back(start_cell);
    let mut best = (start_cell, geom.cell_center(start_cell.0, start_cell.1).dist(goal));
    let mut goal_reachable = false;
    while let Some((ix, iy)) = queue.pop_front() {
        let c = geom.cell_center(ix, iy);
        let d = c.dist(goal);
        if d < best.1 {
            best = ((ix, iy), d);
        }
        if geom.cell_at(goal) == Some((ix, iy)) {
            goal_reachable = true;
        }
        for (nx, ny) in [
            (ix.wrapping_sub(1), iy),
            (ix + 1, iy),
            (ix, iy.wrapping_sub(1)),
            (ix, iy + 1),
        ] {
            if nx >= geom.width_cells || ny >= geom.height_cells {
                continue;
            }
            let idx = geom.index(nx, ny);
            if !masked[idx] && !seen[idx] {
                seen[idx] = true;
                queue.push_back((nx, ny));
            }
        }
    }
    let target = if goal_reachable {
        goal
    } else {
        geom.cell_center(best.0 .0, best.0 .1)
    };
    find_homotopy_paths(masked, geom, start_point, target, max_paths)
}

fn nearest_unmasked(
    masked: &[bool],
    geom: &GridGeometry,
    p: Vec2,
    window: i64,
) -> Option<(usize, usize)> {
    let (cx, cy) = geom.cell_at(p)?;
    let mut best: Option<((usize, usize), f64)> = None;
    for dy in -window..=window {
        for dx in -window..=window {
            let nx = cx as i64 + dx;
            let ny = cy as i64 + dy;
            if nx < 0 || ny < 0 || nx as usize >= geom.width_cells || ny as usize >= geom.height_cells
            {
                continue;
            }
            let cell = (nx as usize, ny as usize);
            if masked[geom.index(cell.0, cell.1)] {
                continue;
            }
            let d = geom.cell_center(cell.0, cell.1).dist(p);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((cell, d));
            }
        }
    }
    best.map(|(c, _)| c)
}

/// Validity audit: the certificate holds at a state iff `V(x) <= 0`.
pub fn audit_contingency_validity(vf: &ValueFunction, state: &UnicycleState) -> bool {
    interpolate(vf, [state.x, state.y, state.theta]) <= 0.0
}

/// Outcome of executing the contingency controller from one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOutcome {
    pub reached: bool,
    pub collided: bool,
    pub elapsed: f64,
}

/// Execute the reach-avoid optimal controller closed-loop (fine stepping)
/// from a state. Succeeds iff a safe zone is entered within the horizon
/// without the robot disc ever overlapping an occupied or unknown cell of
/// the map the value function was computed on.
#[allow(clippy::too_many_arguments)]
pub fn verify_contingency_by_execution(
    vf: &ValueFunction,
    model: &Unicycle,
    occ_sdf: &ScalarField2D,
    safe_sets: &[SafeZone],
    robot_radius: f64,
    start: &UnicycleState,
    horizon: f64,
    dt_sim: f64,
) -> VerifyOutcome {
    let mut state = *start;
    let mut t = 0.0;
    let mut collided = false;
    loop {
        if safe_sets.iter().any(|z| z.contains(state.position())) {
            return VerifyOutcome {
                reached: true,
                collided,
                elapsed: t,
            };
        }
        if t >= horizon {
            return VerifyOutcome {
                reached: false,
                collided,
                elapsed: t,
            };
        }
        let u = optimal_control(vf, model, &state);
        state = model.step(&state, u, dt_sim);
        t += dt_sim;
        if occ_sdf.interpolate(state.position()) < robot_radius {
            collided = true;
        }
    }
}

/// One row of the benchmark table.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantRow {
    pub variant: PlannerVariant,
    pub success_rate_pct: f64,
    pub avg_steps: f64,
    pub avg_ess: f64,
    pub valid_cont_pct: f64,
    pub avg_unsafe_states: f64,
    pub mppi_time_ms: f64,
    pub solve_time_ms: f64,
}

/// Per-episode summary kept alongside the aggregate rows.
#[derive(Debug, Clone)]
pub struct EpisodeSummary {
    pub env_index: usize,
    pub source: EnvSource,
    pub variant: PlannerVariant,
    pub result: EpisodeResult,
}

/// Benchmark output: aggregate rows plus the environment manifest.
#[derive(Debug, Clone)]
pub struct BenchmarkTable {
    pub rows: Vec<VariantRow>,
    pub episodes: Vec<EpisodeSummary>,
    pub manifest: Vec<(usize, EnvSource)>,
}

/// Environment source for benchmark slot `i`: every fourth slot is a trap
/// fixture, the rest are random worlds seeded from the base seed.
pub fn benchmark_env_source(base_seed: u64, index: usize) -> EnvSource {
    if index % 4 == 3 {
        EnvSource::Trap {
            kind: (index / 4) % TRAP_FIXTURES,
        }
    } else {
        EnvSource::Random {
            seed: rng::mix(base_seed, TAG_ENV_SEED, index as u64, 0),
        }
    }
}

/// Paired multi-environment benchmark: every variant sees the same
/// environments and the same per-episode seeds. Episodes run in parallel;
/// aggregation order is fixed by (environment, variant) so the output is
/// deterministic.
pub fn run_benchmark(
    params: &SimParams,
    n_envs: usize,
    variants: &[PlannerVariant],
    base_seed: u64,
) -> crate::Result<BenchmarkTable> {
    assert!(n_envs >= 1);
    let manifest: Vec<(usize, EnvSource)> = (0..n_envs)
        .map(|i| (i, benchmark_env_source(base_seed, i)))
        .collect();

    let jobs: Vec<(usize, EnvSource, PlannerVariant)> = manifest
        .iter()
        .flat_map(|&(i, src)| variants.iter().map(move |&v| (i, src, v)))
        .collect();

    let results: Vec<crate::Result<EpisodeSummary>> = jobs
        .par_iter()
        .map(|&(env_index, source, variant)| {
            let episode = EpisodeConfig {
                env: source,
                variant,
                contingency_trigger_step: None,
            };
            let seed = rng::mix(base_seed, TAG_ENV_SEED, env_index as u64, 1);
            run_episode(params, &episode, seed).map(|result| EpisodeSummary {
                env_index,
                source,
                variant,
                result,
            })
        })
        .collect();

    let mut episodes = Vec::with_capacity(results.len());
    for r in results {
        episodes.push(r?);
    }
    // Fixed aggregation order.
    episodes.sort_by_key(|e| (e.env_index, variant_rank(e.variant)));

    let rows = variants
        .iter()
        .map(|&variant| {
            let mine: Vec<&EpisodeSummary> =
                episodes.iter().filter(|e| e.variant == variant).collect();
            let n = mine.len().max(1) as f64;
            let mean = |f: &dyn Fn(&EpisodeResult) -> f64| -> f64 {
                mine.iter().map(|e| f(&e.result)).sum::<f64>() / n
            };
            VariantRow {
                variant,
                success_rate_pct: 100.0 * mine.iter().filter(|e| e.result.success).count() as f64 / n,
                avg_steps: mean(&|r| r.steps as f64),
                avg_ess: mean(&|r| r.mean_ess),
                valid_cont_pct: 100.0 * mean(&|r| r.valid_contingency_fraction),
                avg_unsafe_states: mean(&|r| r.unsafe_states as f64),
                mppi_time_ms: mean(&|r| r.plan_time_ms),
                solve_time_ms: mean(&|r| r.solve_time_ms),
            }
        })
        .collect();

    Ok(BenchmarkTable {
        rows,
        episodes,
        manifest,
    })
}

fn variant_rank(v: PlannerVariant) -> u8 {
    match v {
        PlannerVariant::Scramppi => 0,
        PlannerVariant::ScramppiNoRbr => 1,
        PlannerVariant::VanillaMppi => 2,
    }
}

/// Number of distinct trap fixture layouts.
pub const TRAP_FIXTURES: usize = 5;

/// Hand-built trap worlds where chasing pure goal distance drives through
/// certified-infeasible states while a covered detour exists.
///
/// Kinds 0-2 are gap walls: a wall blocks the straight line with two gaps;
/// only the far gap's corridor is covered by safe zones, and the near gap
/// (the one a goal-distance planner prefers) has none, so crossing it incurs
/// certified-infeasible states. Kinds 3-4 are dead-end pockets on the
/// straight line: the pocket interior is collision-free but beyond
/// contingency reach of every zone; the only route to the goal passes over
/// the pocket along zone-covered ground.
pub fn trap_fixture(kind: usize) -> GroundTruthMap {
    let kind = kind % TRAP_FIXTURES;
    let geom = GridGeometry::new(64, 64, 0.1);
    let size = 6.4;
    let mut occupied = vec![false; geom.len()];
    for ix in 0..64 {
        occupied[geom.index(ix, 0)] = true;
        occupied[geom.index(ix, 63)] = true;
    }
    for iy in 0..64 {
        occupied[geom.index(0, iy)] = true;
        occupied[geom.index(63, iy)] = true;
    }

    let mirror = kind == 1 || kind == 4;
    let my = |y: f64| if mirror { size - y } else { y };
    let mut fill = |x0: f64, x1: f64, y0: f64, y1: f64| {
        let (y0, y1) = if mirror {
            (size - y1, size - y0)
        } else {
            (y0, y1)
        };
        for iy in 0..64 {
            for ix in 0..64 {
                let c = geom.cell_center(ix, iy);
                if c.x >= x0 && c.x <= x1 && c.y >= y0 && c.y <= y1 {
                    occupied[geom.index(ix, iy)] = true;
                }
            }
        }
    };

    let mut safe_sets = Vec::new();
    let mut zone = |x: f64, y: f64| {
        safe_sets.push(SafeZone::Disc {
            center: Vec2::new(x, my(y)),
            radius: 0.35,
        });
    };

    if kind <= 2 {
        // Gap wall. The near (bottom) gap is closer to the straight line
        // but has no zone coverage; the far (top) gap does.
        let wx = if kind == 2 { 3.8 } else { 3.4 };
        let (gap_w, wall_t) = if kind == 2 { (0.7, 0.2) } else { (0.8, 0.2) };
        let top_gap = (4.4, 4.4 + gap_w);
        let bottom_gap = (1.6, 1.6 + gap_w);
        fill(wx, wx + wall_t, 0.0, bottom_gap.0);
        fill(wx, wx + wall_t, bottom_gap.1, top_gap.0);
        fill(wx, wx + wall_t, top_gap.1, size);
        zone(1.8, 3.8); // near start
        zone(wx + 0.1, 0.5 * (top_gap.0 + top_gap.1)); // inside the far gap
        zone(5.2, 3.8); // near goal
    } else {
        // Dead-end pocket opening toward the start; the region below it is
        // walled to the border so the only way around is over the top.
        let x1 = 2.6;
        let x2 = 4.2;
        let yc = 3.2;
        let half = 0.5;
        fill(x1, x2 + 0.2, yc + half, yc + half + 0.2); // top arm
        fill(x1, x2 + 0.2, 0.0, yc - half); // bottom block to the border
        fill(x2, x2 + 0.2, yc - half, yc + half); // closing wall
        zone(1.6, 4.0); // near start
        zone(2.6, 4.9);
        zone(4.6, 4.9);
        zone(5.5, 3.9); // near goal
    }

    GroundTruthMap {
        geometry: geom,
        occupied,
        safe_sets,
        goal: GoalRegion {
            center: Vec2::new(5.8, my(3.2)),
            radius: 0.3,
        },
        start: Vec2::new(1.0, my(3.2)),
    }
}
