use super::*;
use crate::dynamics::ControlBounds;
use crate::solver::StateGrid;
use std::f64::consts::PI;

fn unicycle() -> Unicycle {
    Unicycle::new(ControlBounds::new(0.0, 1.0, 2.5))
}

/// Synthetic value function over [0,4]^2 from a planar closure.
fn synthetic_vf(f: impl Fn(f64, f64) -> f64) -> ValueFunction {
    let grid = StateGrid::new([41, 41, 8], [0.0, 0.0, -PI], [4.0, 4.0, PI]);
    let mut values = vec![0.0; grid.len()];
    for ix in 0..41 {
        for iy in 0..41 {
            for it in 0..8 {
                values[grid.index(ix, iy, it)] = f(grid.coord(0, ix), grid.coord(1, iy));
            }
        }
    }
    ValueFunction {
        grid,
        values,
        horizon: 1.0,
        map_revision: 0,
        solve_wall_time: 0.0,
    }
}

fn all_feasible_vf() -> ValueFunction {
    synthetic_vf(|_, _| -1.0)
}

fn small_config() -> PlannerConfig {
    PlannerConfig {
        samples: 24,
        ancillary_groups: 2,
        horizon_steps: 8,
        ..PlannerConfig::default()
    }
}

fn mean_seq(n: usize, v: f64, omega: f64) -> ControlSequence {
    ControlSequence(vec![UnicycleControl { v, omega }; n])
}

#[test]
fn group_assignment_partitions_evenly_with_remainder_to_zero() {
    let g = assign_groups(10, 3);
    assert_eq!(g.iter().filter(|&&x| x == 0).count(), 4);
    assert_eq!(g.iter().filter(|&&x| x == 1).count(), 3);
    assert_eq!(g.iter().filter(|&&x| x == 2).count(), 3);
    assert_eq!(assign_groups(6, 1), vec![0; 6]);
}

#[test]
fn tiny_noise_reproduces_the_mean_rollout() {
    let model = unicycle();
    let vf = all_feasible_vf();
    let cfg = PlannerConfig {
        sigma_v: 1e-18,
        sigma_omega: 1e-18,
        ..small_config()
    };
    let x0 = UnicycleState::new(1.0, 1.0, 0.3);
    let mean = mean_seq(cfg.horizon_steps, 0.5, 0.2);
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.1,
    };
    let batch = sample_and_rollout(
        &model,
        &x0,
        &[mean.clone()],
        &cfg,
        criterion,
        true,
        Vec2::new(3.0, 3.0),
        7,
    );
    // Reference: roll the mean itself.
    let mut s = x0;
    for i in 0..cfg.horizon_steps {
        s = model.step(&s, mean.0[i], cfg.dt);
        for m in 0..cfg.samples {
            let bs = batch.state(m, i + 1);
            assert!((bs.x - s.x).abs() < 1e-6 && (bs.y - s.y).abs() < 1e-6);
        }
    }
}

#[test]
fn fixed_seed_is_bitwise_reproducible() {
    let model = unicycle();
    let vf = all_feasible_vf();
    let cfg = small_config();
    let x0 = UnicycleState::new(1.0, 1.0, 0.0);
    let means = [mean_seq(cfg.horizon_steps, 0.4, 0.0)];
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.1,
    };
    let a = sample_and_rollout(&model, &x0, &means, &cfg, criterion, true, Vec2::new(3.0, 3.0), 42);
    let b = sample_and_rollout(&model, &x0, &means, &cfg, criterion, true, Vec2::new(3.0, 3.0), 42);
    assert_eq!(a.costs, b.costs);
    assert!(a
        .states
        .iter()
        .zip(&b.states)
        .all(|(x, y)| x.x == y.x && x.y == y.y && x.theta == y.theta));
    assert_eq!(a.noises, b.noises);
}

#[test]
fn all_feasible_world_never_resamples() {
    let model = unicycle();
    let vf = all_feasible_vf();
    let cfg = small_config();
    let x0 = UnicycleState::new(2.0, 2.0, 0.0);
    let means = [
        mean_seq(cfg.horizon_steps, 0.3, 0.1),
        mean_seq(cfg.horizon_steps, 0.3, -0.1),
    ];
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.1,
    };
    let batch = sample_and_rollout(&model, &x0, &means, &cfg, criterion, true, Vec2::new(3.0, 3.0), 5);
    assert!(batch.resample_events.is_empty());
    assert!(batch.alive.iter().all(|&a| a));
    for (i, counts) in batch.survivors.iter().enumerate() {
        assert_eq!(counts.iter().sum::<usize>(), cfg.samples, "step {i}");
    }
}

/// Exactly one survivor: every dead group member clones it.
#[test]
fn single_survivor_forces_cloning() {
    let model = unicycle();
    // Feasible only in a thin column around x = 1.05 and behind the start.
    let vf = synthetic_vf(|x, _| if x < 1.08 { -1.0 } else { 1.0 });
    let mut cfg = small_config();
    cfg.samples = 12;
    cfg.ancillary_groups = 0;
    cfg.horizon_steps = 1;
    cfg.sigma_v = 0.25;
    let x0 = UnicycleState::new(1.0, 2.0, 0.0);
    let mean = mean_seq(1, 0.5, 0.0);
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.01,
    };
    let batch = sample_and_rollout(&model, &x0, &[mean], &cfg, criterion, true, Vec2::new(3.0, 2.0), 977);
    let survivors = batch.survivors[0][0];
    if survivors == 0 {
        // Whole group froze; nothing to check for cloning.
        assert!(batch.alive.iter().skip(1).step_by(2).all(|&a| !a));
        return;
    }
    if survivors == 1 {
        let donor_state = (0..12)
            .find(|&m| !criterion.violated(&batch.state(m, 1)))
            .map(|m| batch.state(m, 1))
            .unwrap();
        for m in 0..12 {
            let s = batch.state(m, 1);
            assert!((s.x - donor_state.x).abs() < 1e-15 && (s.y - donor_state.y).abs() < 1e-15);
        }
    }
}

/// Kill one group entirely while the other survives: no state may leak
/// across groups and the dead group freezes.
#[test]
fn resampling_never_crosses_groups() {
    let model = unicycle();
    // Feasible only in the lower half-plane.
    let vf = synthetic_vf(|_, y| if y < 2.0 { -1.0 } else { 1.0 });
    let mut cfg = small_config();
    cfg.samples = 20;
    cfg.ancillary_groups = 1;
    cfg.horizon_steps = 8;
    cfg.sigma_v = 0.0025;
    cfg.sigma_omega = 0.01;
    let x0 = UnicycleState::new(0.8, 1.9, 0.0);
    // Group 0 drives straight (stays feasible); group 1 arcs up into the
    // infeasible half with too little noise for any member to escape.
    let means = [mean_seq(8, 0.6, 0.0), mean_seq(8, 0.6, 2.5)];
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.05,
    };
    let batch = sample_and_rollout(&model, &x0, &means, &cfg, criterion, true, Vec2::new(3.5, 1.8), 13);

    for ev in &batch.resample_events {
        assert_eq!(batch.group_of[ev.dead], batch.group_of[ev.donor]);
        assert_eq!(ev.group, batch.group_of[ev.dead]);
    }
    // Group 1 must freeze entirely...
    let g1: Vec<usize> = (0..20).filter(|&m| batch.group_of[m] == 1).collect();
    assert!(!g1.is_empty());
    assert!(g1.iter().all(|&m| !batch.is_alive(m, 8)));
    // ...and its states never coincide with any group-0 state at any step.
    let g0: Vec<usize> = (0..20).filter(|&m| batch.group_of[m] == 0).collect();
    for i in 1..=8 {
        for &m1 in &g1 {
            for &m0 in &g0 {
                let (a, b) = (batch.state(m1, i), batch.state(m0, i));
                assert!(
                    (a.x, a.y, a.theta) != (b.x, b.y, b.theta),
                    "state leaked across groups at step {i}"
                );
            }
        }
    }
    // Frozen samples keep accruing the penalty sentinel.
    for &m in &g1 {
        assert!(batch.costs[m] >= PENALTY_SENTINEL);
    }
}

#[test]
fn clean_reevaluation_is_idempotent_without_resampling() {
    let model = unicycle();
    let vf = all_feasible_vf();
    let cfg = small_config();
    let x0 = UnicycleState::new(1.5, 1.5, 0.4);
    let means = [mean_seq(cfg.horizon_steps, 0.5, 0.1)];
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.1,
    };
    let goal = Vec2::new(3.0, 3.0);
    let batch = sample_and_rollout(&model, &x0, &means, &cfg, criterion, true, goal, 3);
    assert!(batch.resample_events.is_empty());
    let clean = clean_reevaluation(&model, &batch, &x0, &cfg, criterion, goal);
    for m in 0..cfg.samples {
        assert_eq!(clean.costs[m], batch.costs[m], "sample {m}");
        assert!(clean.fully_feasible[m]);
    }
}

#[test]
fn leaving_the_feasible_set_costs_at_least_the_sentinel() {
    let model = unicycle();
    let vf = synthetic_vf(|x, _| if x < 2.0 { -1.0 } else { 1.0 });
    let mut cfg = small_config();
    cfg.samples = 1;
    cfg.ancillary_groups = 0;
    cfg.horizon_steps = 10;
    cfg.sigma_v = 1e-12;
    cfg.sigma_omega = 1e-12;
    let x0 = UnicycleState::new(1.5, 2.0, 0.0);
    let mean = mean_seq(10, 1.0, 0.0); // drives straight into x >= 2
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.05,
    };
    let batch = sample_and_rollout(&model, &x0, &[mean], &cfg, criterion, false, Vec2::new(3.9, 2.0), 1);
    let clean = clean_reevaluation(&model, &batch, &x0, &cfg, criterion, Vec2::new(3.9, 2.0));
    assert!(batch.costs[0] >= PENALTY_SENTINEL);
    assert!(clean.costs[0] >= PENALTY_SENTINEL);
    assert!(!clean.fully_feasible[0]);
}

/// Two-step hand computation of the stage cost. The whitened control cost
/// is scale-invariant in the noise, so it is reconstructed from the recorded
/// displacements rather than assumed negligible.
#[test]
fn hand_computed_two_step_cost() {
    let model = unicycle();
    let vf = all_feasible_vf();
    let mut cfg = small_config();
    cfg.samples = 1;
    cfg.ancillary_groups = 0;
    cfg.horizon_steps = 2;
    cfg.sigma_v = 1e-16;
    cfg.sigma_omega = 1e-16;
    cfg.lambda = 0.7;
    cfg.goal_weight = 2.0;
    cfg.terminal_weight = 3.0;
    let goal = Vec2::new(3.0, 1.0);
    let x0 = UnicycleState::new(1.0, 1.0, 0.0);
    let mean = mean_seq(2, 0.5, 0.0);
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.1,
    };
    let batch = sample_and_rollout(&model, &x0, &[mean], &cfg, criterion, true, goal, 11);
    // States: x0 = (1,1), x1 ~= (1.05,1), x2 ~= (1.10,1) with v ~= 0.5.
    let noise = cfg.noise_model();
    let control_cost: f64 = (0..2)
        .map(|i| cfg.lambda * (1.0 - cfg.alpha) * noise.quadratic(batch.noises[i]))
        .sum();
    let expected = 2.0 * (2.0 + 1.95) + 3.0 * 1.90 + control_cost;
    assert!(
        (batch.costs[0] - expected).abs() < 1e-6,
        "{} vs {expected}",
        batch.costs[0]
    );
}

#[test]
fn single_sample_update_lands_on_its_controls() {
    let model = unicycle();
    let vf = all_feasible_vf();
    let mut cfg = small_config();
    cfg.samples = 1;
    cfg.ancillary_groups = 0;
    cfg.horizon_steps = 4;
    let x0 = UnicycleState::new(2.0, 2.0, 0.0);
    let mean = mean_seq(4, 0.5, 0.0);
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.1,
    };
    let batch = sample_and_rollout(&model, &x0, &[mean.clone()], &cfg, criterion, true, Vec2::new(3.0, 2.0), 21);
    let mut updated = mean;
    let w = mppi_update(&model, &mut updated, &batch, &batch.costs, cfg.lambda).unwrap();
    assert_eq!(w, vec![1.0]);
    for t in 0..4 {
        let u = batch.control(0, t);
        assert!((updated.0[t].v - u.v).abs() < 1e-12);
        assert!((updated.0[t].omega - u.omega).abs() < 1e-12);
    }
}

#[test]
fn equal_costs_average_the_noises() {
    let model = unicycle();
    let mean = mean_seq(1, 0.5, 0.0);
    let batch = RolloutBatch {
        samples: 2,
        steps: 1,
        group_of: vec![0, 0],
        means: vec![mean.clone()],
        states: vec![UnicycleState::new(0.0, 0.0, 0.0); 4],
        controls: vec![
            UnicycleControl { v: 0.6, omega: 0.2 },
            UnicycleControl { v: 0.4, omega: -0.4 },
        ],
        noises: vec![[0.1, 0.2], [-0.1, -0.4]],
        alive: vec![true; 4],
        costs: vec![3.0, 3.0],
        survivors: vec![],
        resample_events: vec![],
    };
    let mut updated = mean;
    mppi_update(&model, &mut updated, &batch, &batch.costs, 1.0).unwrap();
    assert!((updated.0[0].v - 0.5).abs() < 1e-15);
    assert!((updated.0[0].omega - (-0.1)).abs() < 1e-15);
}

#[test]
fn small_lambda_converges_to_the_argmin_sample() {
    let model = unicycle();
    let vf = all_feasible_vf();
    let mut cfg = small_config();
    cfg.samples = 16;
    cfg.ancillary_groups = 0;
    cfg.horizon_steps = 5;
    cfg.lambda = 1e-6;
    let x0 = UnicycleState::new(1.0, 2.0, 0.0);
    let mean = mean_seq(5, 0.5, 0.0);
    let goal = Vec2::new(3.5, 2.0);
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.1,
    };
    let batch = sample_and_rollout(&model, &x0, &[mean.clone()], &cfg, criterion, true, goal, 8);
    let clean = clean_reevaluation(&model, &batch, &x0, &cfg, criterion, goal);
    let argmin = (0..16)
        .min_by(|&a, &b| clean.costs[a].partial_cmp(&clean.costs[b]).unwrap())
        .unwrap();
    let mut updated = mean;
    mppi_update(&model, &mut updated, &batch, &clean.costs, cfg.lambda).unwrap();
    for t in 0..5 {
        let u = batch.control(argmin, t);
        assert!((updated.0[t].v - u.v).abs() < 1e-9);
        assert!((updated.0[t].omega - u.omega).abs() < 1e-9);
    }
}

#[test]
fn all_penalized_batch_skips_the_update() {
    let model = unicycle();
    let vf = synthetic_vf(|_, _| 1.0); // infeasible everywhere
    let mut cfg = small_config();
    cfg.samples = 4;
    cfg.ancillary_groups = 0;
    cfg.horizon_steps = 3;
    let x0 = UnicycleState::new(2.0, 2.0, 0.0);
    let mean = mean_seq(3, 0.5, 0.0);
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: 0.1,
    };
    let batch = sample_and_rollout(&model, &x0, &[mean.clone()], &cfg, criterion, true, Vec2::new(3.0, 2.0), 2);
    let mut updated = mean.clone();
    assert!(mppi_update(&model, &mut updated, &batch, &batch.costs, cfg.lambda).is_none());
    assert_eq!(updated, mean);
}

#[test]
fn ess_closed_forms() {
    assert_eq!(normalized_ess(&vec![0.3; 10]), 1.0);
    let mut one_hot = vec![0.0; 50];
    one_hot[7] = 1.0;
    assert!((normalized_ess(&one_hot) - 0.02).abs() < 1e-15);
    assert!((normalized_ess(&[1.0, 1.0, 0.0, 0.0]) - 0.5).abs() < 1e-15);
    assert_eq!(normalized_ess(&[0.0, 0.0]), 0.0);
}

fn plan_ctx<'a>(model: &'a Unicycle, vf: &'a ValueFunction, variant: PlannerVariant) -> PlanContext<'a> {
    PlanContext {
        model,
        goal: Vec2::new(3.5, 2.0),
        variant,
        value: Some(vf),
        obstacle_sdf: None,
        robot_radius: 0.15,
    }
}

#[test]
fn open_space_selects_the_weighted_mean() {
    let model = unicycle();
    let vf = all_feasible_vf();
    let cfg = small_config();
    let ctx = plan_ctx(&model, &vf, PlannerVariant::Scramppi);
    let x0 = UnicycleState::new(1.0, 2.0, 0.0);
    let result = plan_step(&ctx, &x0, &mean_seq(cfg.horizon_steps, 0.5, 0.0), &[], &cfg, 99);
    assert_eq!(result.branch, SelectionBranch::WeightedMean);
    assert!(result.ess > 0.0 && result.ess <= 1.0);
}

/// Mean one-step successor infeasible while one sample's whole rollout is
/// certified: selection must return that sample's first control. Drives
/// `select_control` directly with a crafted two-sample batch.
#[test]
fn blocked_mean_falls_back_to_best_sample() {
    let model = unicycle();
    // Feasible strictly below y = 1.98.
    let vf = synthetic_vf(|_, y| if y < 1.98 { -1.0 } else { 1.0 });
    let mut cfg = small_config();
    cfg.samples = 2;
    cfg.ancillary_groups = 0;
    cfg.horizon_steps = 3;
    let ctx = plan_ctx(&model, &vf, PlannerVariant::Scramppi);
    // Facing the infeasible half: driving forward crosses y = 1.98.
    let x0 = UnicycleState::new(1.0, 1.9, std::f64::consts::FRAC_PI_2);
    let mean = mean_seq(3, 1.0, 0.0);

    // Sample 0 rotates in place (stays feasible), sample 1 drives in.
    let spin = UnicycleControl { v: 0.0, omega: -2.5 };
    let push = UnicycleControl { v: 1.0, omega: 0.0 };
    let mut batch = RolloutBatch {
        samples: 2,
        steps: 3,
        group_of: vec![0, 0],
        means: vec![mean.clone()],
        states: vec![x0; 2 * 4],
        controls: vec![spin, spin, spin, push, push, push],
        noises: vec![[0.0, 0.0]; 6],
        alive: vec![true; 2 * 4],
        costs: vec![0.0; 2],
        survivors: vec![],
        resample_events: vec![],
    };
    for m in 0..2 {
        let mut s = x0;
        for i in 0..3 {
            s = model.step(&s, batch.controls[m * 3 + i], cfg.dt);
            batch.states[m * 4 + i + 1] = s;
        }
    }
    let criterion = SafetyCriterion::Value {
        vf: &vf,
        delta: cfg.delta,
    };
    let clean = clean_reevaluation(&model, &batch, &x0, &cfg, criterion, ctx.goal);
    assert!(clean.fully_feasible[0]);
    assert!(!clean.fully_feasible[1]);

    let (executed, branch, _) = select_control(&ctx, &x0, &mean, &batch, &clean, &cfg);
    assert_eq!(branch, SelectionBranch::BestSample);
    assert_eq!(executed.v, spin.v);
    assert_eq!(executed.omega, spin.omega);
}

/// Everything infeasible: the fallback controller fires and matches the
/// reach-avoid optimal control.
#[test]
fn all_infeasible_falls_back_to_optimal_controller() {
    let model = unicycle();
    let vf = synthetic_vf(|x, y| 0.5 + 0.1 * (x + y)); // infeasible everywhere
    let mut cfg = small_config();
    cfg.samples = 8;
    cfg.ancillary_groups = 0;
    let ctx = plan_ctx(&model, &vf, PlannerVariant::Scramppi);
    let x0 = UnicycleState::new(2.0, 2.0, 0.7);
    let result = plan_step(&ctx, &x0, &mean_seq(cfg.horizon_steps, 0.5, 0.0), &[], &cfg, 5);
    assert_eq!(result.branch, SelectionBranch::HjFallback);
    let expected = optimal_control(&vf, &model, &x0);
    assert_eq!(result.executed.v, expected.v);
    assert_eq!(result.executed.omega, expected.omega);
    assert!(result.update_skipped);
}

/// With every rollout state feasible, a SCRAMPPI step and a vanilla step
/// driven by the same seed produce the same updated mean: the resampling
/// machinery must be a no-op on all-alive batches.
#[test]
fn rbr_degenerates_to_plain_mppi_when_everything_survives() {
    let model = unicycle();
    let vf = all_feasible_vf();
    // Vanilla needs an obstacle field; an empty map keeps it collision-free.
    let geom = crate::env::GridGeometry::new(40, 40, 0.1);
    let sdf = crate::env::signed_distance(&vec![false; geom.len()], &geom);
    let cfg = small_config();
    let x0 = UnicycleState::new(1.0, 2.0, 0.0);
    let mean = mean_seq(cfg.horizon_steps, 0.4, 0.0);

    let scram_ctx = PlanContext {
        model: &model,
        goal: Vec2::new(3.5, 2.0),
        variant: PlannerVariant::Scramppi,
        value: Some(&vf),
        obstacle_sdf: None,
        robot_radius: 0.15,
    };
    let vanilla_ctx = PlanContext {
        model: &model,
        goal: Vec2::new(3.5, 2.0),
        variant: PlannerVariant::VanillaMppi,
        value: None,
        obstacle_sdf: Some(&sdf),
        robot_radius: 0.15,
    };
    let a = plan_step(&scram_ctx, &x0, &mean, &[], &cfg, 31);
    let b = plan_step(&vanilla_ctx, &x0, &mean, &[], &cfg, 31);
    for t in 0..cfg.horizon_steps {
        assert!((a.mean.0[t].v - b.mean.0[t].v).abs() < 1e-9);
        assert!((a.mean.0[t].omega - b.mean.0[t].omega).abs() < 1e-9);
    }
    assert!((a.ess - b.ess).abs() < 1e-12);
}

#[test]
fn weights_normalize_and_ess_stays_in_range() {
    let model = unicycle();
    let vf = synthetic_vf(|x, _| if x > 3.0 { 1.0 } else { -1.0 });
    let mut cfg = small_config();
    cfg.samples = 40;
    let ctx = plan_ctx(&model, &vf, PlannerVariant::Scramppi);
    let x0 = UnicycleState::new(1.0, 2.0, 0.0);
    for seed in 0..5 {
        let r = plan_step(&ctx, &x0, &mean_seq(cfg.horizon_steps, 0.6, 0.0), &[], &cfg, seed);
        if !r.update_skipped {
            assert!(r.ess > 0.0 && r.ess <= 1.0 + 1e-12);
        }
    }
}

/// Closed-loop contingency run on an obstacle-free single-integrator world:
/// the optimal controller reaches the zone within the kinematic time bound.
#[test]
fn contingency_execution_meets_the_kinematic_bound() {
    use crate::dynamics::{SingleIntegrator, SingleIntegratorState};
    use crate::env::{GridGeometry, SafeZone};
    use crate::solver::{build_obstacle_function, build_target_function, solve_reach_avoid, SolverConfig};

    let extent = Vec2::new(4.0, 4.0);
    let grid = StateGrid::for_workspace(81, 81, 1, extent);
    let geom = GridGeometry::new(80, 80, 0.05);
    let occ = vec![false; geom.len()];
    let g = build_obstacle_function(&grid, &occ, &geom, 0.0);
    let zone = SafeZone::Disc {
        center: Vec2::new(2.0, 2.0),
        radius: 0.4,
    };
    let l = build_target_function(&grid, &[zone]).unwrap();
    let model = SingleIntegrator::new(1.0);
    let vf = solve_reach_avoid(
        &l,
        &g,
        &model,
        &grid,
        &SolverConfig {
            horizon: 2.5,
            cfl_number: 0.8,
        },
        0,
    )
    .unwrap();

    let dt = 0.02;
    let start = SingleIntegratorState { x: 0.8, y: 3.1 };
    let dist = Vec2::new(start.x, start.y).dist(Vec2::new(2.0, 2.0)) - 0.4;
    let mut s = start;
    let mut t = 0.0;
    while !zone.contains(Vec2::new(s.x, s.y)) {
        let u = optimal_control(&vf, &model, &s);
        s = model.step(&s, u, dt);
        t += dt;
        assert!(t < 3.0, "did not reach the zone in time");
    }
    assert!(
        t <= dist / 1.0 + 10.0 * dt,
        "took {t}, kinematic bound {}",
        dist / 1.0
    );
}
