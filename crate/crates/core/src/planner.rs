//! The contingency-constrained MPPI planning step.
//!
//! One step runs: multimodal sampling around the previous mean plus up to
//! `M_a` ancillary means, group-local resampling-based rollouts gated by the
//! value function, clean re-evaluation of the evolved sequences from the
//! start state, the exponentially cost-weighted mean update, and a
//! three-branch control selection hierarchy (mean if its one-step successor
//! is certified, else best fully-certified sample, else the reach-avoid
//! optimal controller, which is total).
//!
//! Resampling is restricted to within each proposal group: a dead sample may
//! only clone a survivor that shares its mean, so easy homotopy classes
//! cannot absorb the sample budget of classes threading narrow corridors. A
//! group whose survivor set empties is frozen for the remainder of the
//! horizon (its members already carry the infeasibility penalty) and is
//! reseeded naturally at the next planning step.
//!
//! Noise streams are keyed by (seed, sample, step), so results are bitwise
//! reproducible under any parallel schedule.

use crate::dynamics::{ControlSequence, Model, Unicycle, UnicycleControl, UnicycleState};
use crate::env::ScalarField2D;
use crate::geom::Vec2;
use crate::rng;
use crate::solver::ValueFunction;
use crate::value::{interpolate, optimal_control};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Cost sentinel standing in for the infeasibility indicator: large enough
/// that `exp(-(S - rho)/lambda)` underflows to exactly zero whenever any
/// unpenalized sample exists.
pub const PENALTY_SENTINEL: f64 = 1e12;

const TAG_NOISE: u64 = 11;
const TAG_RESAMPLE: u64 = 12;

/// Which planner runs an episode step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlannerVariant {
    /// Full method: value-gated group-local resampling rollouts.
    Scramppi,
    /// Value function as a cost penalty only; no resampling.
    ScramppiNoRbr,
    /// Plain goal-seeking MPPI with a collision penalty; no value function.
    VanillaMppi,
}

impl PlannerVariant {
    pub fn label(&self) -> &'static str {
        match self {
            PlannerVariant::Scramppi => "SCRAMPPI",
            PlannerVariant::ScramppiNoRbr => "SCRAMPPI_NoRBR",
            PlannerVariant::VanillaMppi => "VanillaMPPI",
        }
    }
}

/// Planner parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    /// Total sample budget M.
    pub samples: usize,
    /// Maximum number of ancillary proposal groups M_a.
    pub ancillary_groups: usize,
    /// Horizon length N in steps.
    pub horizon_steps: usize,
    /// Planner period, seconds.
    pub dt: f64,
    /// Noise covariance entries (control units squared).
    pub sigma_v: f64,
    pub sigma_omega: f64,
    pub sigma_cross: f64,
    /// Temperature.
    pub lambda: f64,
    /// Control-cost shaping in [0, 1).
    pub alpha: f64,
    /// Feasibility margin delta.
    pub delta: f64,
    /// Stage weight on distance to goal.
    pub goal_weight: f64,
    /// Terminal weight on distance to goal.
    pub terminal_weight: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            ancillary_groups: 2,
            horizon_steps: 25,
            dt: 0.1,
            sigma_v: 0.09,
            sigma_omega: 0.36,
            sigma_cross: 0.0,
            lambda: 0.5,
            alpha: 0.0,
            delta: 0.1,
            goal_weight: 1.0,
            terminal_weight: 5.0,
        }
    }
}

impl PlannerConfig {
    /// Cholesky factor and inverse of the 2x2 noise covariance.
    /// Panics if the covariance is not symmetric positive definite.
    pub fn noise_model(&self) -> NoiseModel {
        let (a, b, c) = (self.sigma_v, self.sigma_cross, self.sigma_omega);
        let det = a * c - b * b;
        assert!(a > 0.0 && det > 0.0, "noise covariance must be SPD");
        assert!(self.lambda > 0.0);
        assert!((0.0..1.0).contains(&self.alpha));
        assert!(self.samples > self.ancillary_groups);
        let l00 = a.sqrt();
        let l10 = b / l00;
        let l11 = (c - l10 * l10).sqrt();
        NoiseModel {
            chol: [[l00, 0.0], [l10, l11]],
            inv: [[c / det, -b / det], [-b / det, a / det]],
        }
    }
}

/// Precomputed factorizations of the sampling covariance.
#[derive(Debug, Clone, Copy)]
pub struct NoiseModel {
    chol: [[f64; 2]; 2],
    inv: [[f64; 2]; 2],
}

impl NoiseModel {
    fn sample(&self, seed: u64, m: usize, step: usize) -> [f64; 2] {
        let mut rng = rng::stream(seed, TAG_NOISE, m as u64, step as u64);
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        [
            self.chol[0][0] * z0,
            self.chol[1][0] * z0 + self.chol[1][1] * z1,
        ]
    }

    fn quadratic(&self, eps: [f64; 2]) -> f64 {
        eps[0] * (self.inv[0][0] * eps[0] + self.inv[0][1] * eps[1])
            + eps[1] * (self.inv[1][0] * eps[0] + self.inv[1][1] * eps[1])
    }
}

/// Per-step safety test applied to rollout states.
#[derive(Clone, Copy)]
pub enum SafetyCriterion<'a> {
    /// Contingency certificate: infeasible when `V(x) >= -delta`.
    Value { vf: &'a ValueFunction, delta: f64 },
    /// Plain collision test: infeasible when the robot disc overlaps an
    /// occupied or unknown cell.
    Collision {
        sdf: &'a ScalarField2D,
        robot_radius: f64,
    },
}

impl SafetyCriterion<'_> {
    pub fn violated(&self, state: &UnicycleState) -> bool {
        match *self {
            SafetyCriterion::Value { vf, delta } => {
                interpolate(vf, [state.x, state.y, state.theta]) >= -delta
            }
            SafetyCriterion::Collision { sdf, robot_radius } => {
                sdf.interpolate(state.position()) < robot_radius
            }
        }
    }
}

/// One recorded clone event (diagnostics and isolation checks).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResampleEvent {
    pub step: usize,
    pub group: usize,
    pub dead: usize,
    pub donor: usize,
}

/// Everything produced by the sampling phase of one planning step.
#[derive(Debug, Clone)]
pub struct RolloutBatch {
    pub samples: usize,
    pub steps: usize,
    /// Group id per sample; group 0 is the previous mean.
    pub group_of: Vec<usize>,
    /// Proposal mean per group.
    pub means: Vec<ControlSequence>,
    /// States, sample-major: `states[m * (steps + 1) + i]`.
    pub states: Vec<UnicycleState>,
    /// Controls and recorded noises, sample-major: `[m * steps + i]`.
    pub controls: Vec<UnicycleControl>,
    pub noises: Vec<[f64; 2]>,
    /// Alive flag per sample per step (frozen groups go false).
    pub alive: Vec<bool>,
    /// Rollout-phase accumulated costs.
    pub costs: Vec<f64>,
    /// Survivor count per step per group (only filled when resampling ran).
    pub survivors: Vec<Vec<usize>>,
    pub resample_events: Vec<ResampleEvent>,
}

impl RolloutBatch {
    pub fn state(&self, m: usize, i: usize) -> UnicycleState {
        self.states[m * (self.steps + 1) + i]
    }

    pub fn control(&self, m: usize, i: usize) -> UnicycleControl {
        self.controls[m * self.steps + i]
    }

    pub fn is_alive(&self, m: usize, i: usize) -> bool {
        self.alive[m * (self.steps + 1) + i]
    }

    /// Final control sequence of one sample.
    pub fn sequence(&self, m: usize) -> ControlSequence {
        ControlSequence(self.controls[m * self.steps..(m + 1) * self.steps].to_vec())
    }
}

/// Even partition of the sample budget over groups, remainder to group 0.
pub fn assign_groups(samples: usize, n_groups: usize) -> Vec<usize> {
    assert!(n_groups >= 1 && samples >= n_groups);
    let base = samples / n_groups;
    let rem = samples % n_groups;
    let mut out = Vec::with_capacity(samples);
    for g in 0..n_groups {
        let size = base + if g == 0 { rem } else { 0 };
        out.extend(std::iter::repeat_n(g, size));
    }
    out
}

struct StageCost<'a> {
    goal: Vec2,
    goal_weight: f64,
    terminal_weight: f64,
    control_weight: f64,
    noise: &'a NoiseModel,
    criterion: SafetyCriterion<'a>,
}

impl StageCost<'_> {
    fn stage(&self, state: &UnicycleState, eps: [f64; 2]) -> f64 {
        let mut c = self.goal_weight * state.position().dist(self.goal);
        if self.criterion.violated(state) {
            c += PENALTY_SENTINEL;
        }
        c + self.control_weight * self.noise.quadratic(eps)
    }

    fn terminal(&self, state: &UnicycleState) -> f64 {
        self.terminal_weight * state.position().dist(self.goal)
    }
}

/// Sample perturbed sequences around each group mean, roll them out with
/// per-step group-local resampling (when enabled), and accumulate stage
/// costs. The survival criterion and the cost penalty share the same test.
#[allow(clippy::too_many_arguments)]
pub fn sample_and_rollout(
    model: &Unicycle,
    x0: &UnicycleState,
    means: &[ControlSequence],
    config: &PlannerConfig,
    criterion: SafetyCriterion<'_>,
    use_rbr: bool,
    goal: Vec2,
    seed: u64,
) -> RolloutBatch {
    let m_total = config.samples;
    let n = config.horizon_steps;
    assert!(!means.is_empty());
    for mean in means {
        assert_eq!(mean.len(), n, "proposal means must match the horizon");
    }
    let noise = config.noise_model();
    let group_of = assign_groups(m_total, means.len());
    let cost_fn = StageCost {
        goal,
        goal_weight: config.goal_weight,
        terminal_weight: config.terminal_weight,
        control_weight: config.lambda * (1.0 - config.alpha),
        noise: &noise,
        criterion,
    };

    let mut batch = RolloutBatch {
        samples: m_total,
        steps: n,
        group_of,
        means: means.to_vec(),
        states: vec![*x0; m_total * (n + 1)],
        controls: vec![UnicycleControl::default(); m_total * n],
        noises: vec![[0.0, 0.0]; m_total * n],
        alive: vec![true; m_total * (n + 1)],
        costs: vec![0.0; m_total],
        survivors: Vec::new(),
        resample_events: Vec::new(),
    };

    let mut group_members: Vec<Vec<usize>> = vec![Vec::new(); means.len()];
    for (m, &g) in batch.group_of.iter().enumerate() {
        group_members[g].push(m);
    }

    for i in 0..n {
        // Propagate.
        for m in 0..m_total {
            let g = batch.group_of[m];
            let si = m * (n + 1) + i;
            if !batch.alive[si] {
                batch.states[si + 1] = batch.states[si];
                batch.alive[si + 1] = false;
                batch.controls[m * n + i] = model.saturate(batch.means[g].0[i]);
                continue;
            }
            let eps = noise.sample(seed, m, i);
            let mu = batch.means[g].0[i];
            let u = model.saturate(UnicycleControl {
                v: mu.v + eps[0],
                omega: mu.omega + eps[1],
            });
            // Record the post-saturation displacement so `mu + eps == u`.
            batch.noises[m * n + i] = [u.v - mu.v, u.omega - mu.omega];
            batch.controls[m * n + i] = u;
            batch.states[si + 1] = model.step(&batch.states[si], u, config.dt);
        }

        if use_rbr {
            group_local_resample(&mut batch, &group_members, i, &criterion, seed);
        }

        // Accumulate: stage cost uses the step's starting state and the
        // (possibly rewritten) noise.
        for m in 0..m_total {
            let s = batch.states[m * (n + 1) + i];
            batch.costs[m] += cost_fn.stage(&s, batch.noises[m * n + i]);
        }
    }
    for m in 0..m_total {
        let s = batch.states[m * (n + 1) + n];
        batch.costs[m] += cost_fn.terminal(&s);
    }
    batch
}

/// Rewire samples whose propagated state fails the survival criterion onto a
/// uniformly chosen survivor of the same group: copy its state and control,
/// record the noise displacement against the group mean. Groups with no
/// survivors freeze for the remaining steps.
fn group_local_resample(
    batch: &mut RolloutBatch,
    group_members: &[Vec<usize>],
    step: usize,
    criterion: &SafetyCriterion<'_>,
    seed: u64,
) {
    let n = batch.steps;
    let mut counts = vec![0usize; group_members.len()];
    for (g, members) in group_members.iter().enumerate() {
        let survivors: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&m| {
                batch.alive[m * (n + 1) + step + 1]
                    && !criterion.violated(&batch.states[m * (n + 1) + step + 1])
            })
            .collect();
        counts[g] = survivors.len();
        if survivors.is_empty() {
            // Whole group frozen dead; costs keep accruing the penalty.
            for &m in members {
                batch.alive[m * (n + 1) + step + 1] = false;
            }
            continue;
        }
        for &m in members {
            let si = m * (n + 1) + step + 1;
            if !batch.alive[si] || !criterion.violated(&batch.states[si]) {
                continue;
            }
            let mut rng = rng::stream(seed, TAG_RESAMPLE, m as u64, step as u64);
            let donor = survivors[rng.gen_range(0..survivors.len())];
            batch.states[si] = batch.states[donor * (n + 1) + step + 1];
            let donor_u = batch.controls[donor * n + step];
            batch.controls[m * n + step] = donor_u;
            let mu = batch.means[g].0[step];
            batch.noises[m * n + step] = [donor_u.v - mu.v, donor_u.omega - mu.omega];
            batch.resample_events.push(ResampleEvent {
                step,
                group: g,
                dead: m,
                donor,
            });
        }
    }
    batch.survivors.push(counts);
}

/// Clean re-evaluation output.
#[derive(Debug, Clone)]
pub struct CleanEvaluation {
    pub costs: Vec<f64>,
    /// True when every re-rolled state after the start passes the criterion.
    pub fully_feasible: Vec<bool>,
}

/// Re-roll every sample's final control sequence from the start state with
/// no resampling and recompute its cost; these clean costs replace the
/// rollout-phase costs for weighting. Also reports, per sample, whether
/// every re-rolled state after the start satisfies the safety criterion.
pub fn clean_reevaluation(
    model: &Unicycle,
    batch: &RolloutBatch,
    x0: &UnicycleState,
    config: &PlannerConfig,
    criterion: SafetyCriterion<'_>,
    goal: Vec2,
) -> CleanEvaluation {
    let n = batch.steps;
    let noise = config.noise_model();
    let cost_fn = StageCost {
        goal,
        goal_weight: config.goal_weight,
        terminal_weight: config.terminal_weight,
        control_weight: config.lambda * (1.0 - config.alpha),
        noise: &noise,
        criterion,
    };
    let mut costs = vec![0.0; batch.samples];
    let mut fully_feasible = vec![false; batch.samples];
    costs
        .par_iter_mut()
        .zip(fully_feasible.par_iter_mut())
        .enumerate()
        .for_each(|(m, (cost, feasible))| {
            let mut state = *x0;
            let mut ok = true;
            let mut acc = 0.0;
            for i in 0..n {
                acc += cost_fn.stage(&state, batch.noises[m * n + i]);
                state = model.step(&state, batch.control(m, i), config.dt);
                if criterion.violated(&state) {
                    ok = false;
                }
            }
            acc += cost_fn.terminal(&state);
            *cost = acc;
            *feasible = ok;
        });
    CleanEvaluation {
        costs,
        fully_feasible,
    }
}

/// Exponentially weighted mean update. Each sample contributes its control
/// displacement from the nominal mean, so a single dominant sample pulls the
/// mean exactly onto its own controls (this is the cost-weighted average of
/// sampled sequences, which for samples of the nominal group reduces to the
/// weighted noise sum). Returns the weights; `None` when every cost carries
/// the penalty sentinel (update skipped).
pub fn mppi_update(
    model: &Unicycle,
    mean: &mut ControlSequence,
    batch: &RolloutBatch,
    costs: &[f64],
    lambda: f64,
) -> Option<Vec<f64>> {
    assert_eq!(costs.len(), batch.samples);
    let rho = costs.iter().cloned().fold(f64::INFINITY, f64::min);
    if rho >= PENALTY_SENTINEL {
        return None;
    }
    let weights: Vec<f64> = costs.iter().map(|&s| (-(s - rho) / lambda).exp()).collect();
    let total: f64 = weights.iter().sum();
    let n = batch.steps;
    for t in 0..n {
        let mut dv = 0.0;
        let mut dw = 0.0;
        for m in 0..batch.samples {
            let u = batch.control(m, t);
            dv += weights[m] * (u.v - mean.0[t].v);
            dw += weights[m] * (u.omega - mean.0[t].omega);
        }
        let updated = UnicycleControl {
            v: mean.0[t].v + dv / total,
            omega: mean.0[t].omega + dw / total,
        };
        mean.0[t] = model.saturate(updated);
    }
    Some(weights)
}

/// Normalized effective sample size in (0, 1]; 0 for all-zero weights.
pub fn normalized_ess(weights: &[f64]) -> f64 {
    let sum: f64 = weights.iter().sum();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    if sum_sq == 0.0 {
        return 0.0;
    }
    (sum * sum) / (weights.len() as f64 * sum_sq)
}

/// Which rung of the selection hierarchy produced the executed control.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionBranch {
    WeightedMean,
    BestSample,
    HjFallback,
}

impl SelectionBranch {
    pub fn label(&self) -> &'static str {
        match self {
            SelectionBranch::WeightedMean => "WeightedMean",
            SelectionBranch::BestSample => "BestSample",
            SelectionBranch::HjFallback => "HJFallback",
        }
    }
}

/// Outcome of one planning step.
#[derive(Debug, Clone)]
pub struct PlanResult {
    pub executed: UnicycleControl,
    pub mean: ControlSequence,
    pub branch: SelectionBranch,
    pub ess: f64,
    /// Survivor counts per step per group (empty without resampling).
    pub survivors: Vec<Vec<usize>>,
    /// Value at the one-step successor of the executed control (when a
    /// value function was available).
    pub successor_value: Option<f64>,
    pub update_skipped: bool,
}

/// Inputs shared by every planning step of an episode.
pub struct PlanContext<'a> {
    pub model: &'a Unicycle,
    pub goal: Vec2,
    pub variant: PlannerVariant,
    /// Required for the SCRAMPPI variants.
    pub value: Option<&'a ValueFunction>,
    /// Occupancy signed distance, required for the vanilla variant.
    pub obstacle_sdf: Option<&'a ScalarField2D>,
    pub robot_radius: f64,
}

impl<'a> PlanContext<'a> {
    fn criterion(&self, config: &PlannerConfig) -> SafetyCriterion<'a> {
        match self.variant {
            PlannerVariant::Scramppi | PlannerVariant::ScramppiNoRbr => SafetyCriterion::Value {
                vf: self.value.expect("SCRAMPPI variants need a value function"),
                delta: config.delta,
            },
            PlannerVariant::VanillaMppi => SafetyCriterion::Collision {
                sdf: self
                    .obstacle_sdf
                    .expect("vanilla MPPI needs an obstacle field"),
                robot_radius: self.robot_radius,
            },
        }
    }
}

/// Run one full planning step: sample, (optionally) resample, clean
/// re-evaluate, update the mean, and select the executed control.
pub fn plan_step(
    ctx: &PlanContext<'_>,
    x0: &UnicycleState,
    prev_mean: &ControlSequence,
    ancillary: &[ControlSequence],
    config: &PlannerConfig,
    seed: u64,
) -> PlanResult {
    let n = config.horizon_steps;
    let mut nominal = prev_mean.clone();
    nominal
        .0
        .resize(n, prev_mean.0.last().copied().unwrap_or_default());

    let mut means = vec![nominal.clone()];
    if ctx.variant != PlannerVariant::VanillaMppi {
        for seq in ancillary.iter().take(config.ancillary_groups) {
            let mut s = seq.clone();
            s.0.resize(n, seq.0.last().copied().unwrap_or_default());
            means.push(s);
        }
    }

    let criterion = ctx.criterion(config);
    let use_rbr = ctx.variant == PlannerVariant::Scramppi;
    let batch = sample_and_rollout(
        ctx.model, x0, &means, config, criterion, use_rbr, ctx.goal, seed,
    );
    let clean = clean_reevaluation(ctx.model, &batch, x0, config, criterion, ctx.goal);

    let mut mean = nominal;
    let weights = mppi_update(ctx.model, &mut mean, &batch, &clean.costs, config.lambda);
    let (ess, update_skipped) = match &weights {
        Some(w) => (normalized_ess(w), false),
        None => (0.0, true),
    };

    let (executed, branch, successor_value) =
        select_control(ctx, x0, &mean, &batch, &clean, config);

    PlanResult {
        executed,
        mean,
        branch,
        ess,
        survivors: batch.survivors.clone(),
        successor_value,
        update_skipped,
    }
}

/// The control-selection hierarchy. Branch 1: execute the weighted mean if
/// its one-step successor stays certified. Branch 2: else the first control
/// of the lowest-clean-cost sample whose whole rollout is certified. Branch
/// 3: else the reach-avoid optimal controller (always defined). The vanilla
/// variant has no certificate and always executes its mean.
fn select_control(
    ctx: &PlanContext<'_>,
    x0: &UnicycleState,
    mean: &ControlSequence,
    batch: &RolloutBatch,
    clean: &CleanEvaluation,
    config: &PlannerConfig,
) -> (UnicycleControl, SelectionBranch, Option<f64>) {
    let first = ctx.model.saturate(mean.0[0]);
    if ctx.variant == PlannerVariant::VanillaMppi {
        return (first, SelectionBranch::WeightedMean, None);
    }
    let vf = ctx.value.expect("SCRAMPPI variants need a value function");
    let successor = ctx.model.step(x0, first, config.dt);
    let v_succ = interpolate(vf, [successor.x, successor.y, successor.theta]);
    if v_succ < -config.delta {
        return (first, SelectionBranch::WeightedMean, Some(v_succ));
    }

    // Lowest clean cost among fully certified samples.
    let mut best: Option<(f64, usize)> = None;
    for m in 0..batch.samples {
        if !clean.fully_feasible[m] {
            continue;
        }
        if best.is_none_or(|(c, _)| clean.costs[m] < c) {
            best = Some((clean.costs[m], m));
        }
    }
    if let Some((_, m)) = best {
        let u = batch.control(m, 0);
        let succ = ctx.model.step(x0, u, config.dt);
        let v = interpolate(vf, [succ.x, succ.y, succ.theta]);
        return (u, SelectionBranch::BestSample, Some(v));
    }

    let u = optimal_control(vf, ctx.model, x0);
    let succ = ctx.model.step(x0, u, config.dt);
    let v = interpolate(vf, [succ.x, succ.y, succ.theta]);
    (u, SelectionBranch::HjFallback, Some(v))
}

/// Contingency-mode control: follow the reach-avoid optimal controller. The
/// caller loops until the workspace position enters a safe zone.
pub fn contingency_execute(
    vf: &ValueFunction,
    model: &Unicycle,
    state: &UnicycleState,
) -> UnicycleControl {
    optimal_control(vf, model, state)
}

#[cfg(test)]
mod tests;
