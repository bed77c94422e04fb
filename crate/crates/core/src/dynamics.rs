//! Control-affine dynamics models and their optimal-control ingredients.
//!
//! Both the level-set solver and the planner consume the same model objects:
//! the solver needs the lower Hamiltonian `min_u p . f(x, u)` and per-axis
//! dissipation bounds, the planner needs saturation and explicit-Euler
//! stepping, and the contingency controller needs the minimizing control for
//! a given costate. The Hamiltonian is linear in the control, so minimizers
//! sit at the vertices of the control set.

use crate::geom::{normalize_angle, Vec2};
use serde::{Deserialize, Serialize};

/// Unicycle pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnicycleState {
    pub x: f64,
    pub y: f64,
    /// Heading, normalized to (-pi, pi].
    pub theta: f64,
}

impl UnicycleState {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Unicycle input: forward speed and turn rate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct UnicycleControl {
    pub v: f64,
    pub omega: f64,
}

/// A horizon-length array of unicycle controls; the planner's decision
/// variable and the shape of every proposal mean.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ControlSequence(pub Vec<UnicycleControl>);

impl ControlSequence {
    pub fn zeros(len: usize) -> Self {
        Self(vec![UnicycleControl::default(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Receding-horizon shift: drop the first control, repeat the last.
    pub fn shifted(&self) -> Self {
        if self.0.len() <= 1 {
            return self.clone();
        }
        let mut v = self.0[1..].to_vec();
        v.push(*v.last().unwrap());
        Self(v)
    }
}

/// Box control set for the unicycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlBounds {
    pub v_min: f64,
    pub v_max: f64,
    pub omega_max: f64,
}

impl ControlBounds {
    pub fn new(v_min: f64, v_max: f64, omega_max: f64) -> Self {
        assert!(v_min <= v_max && omega_max > 0.0);
        Self {
            v_min,
            v_max,
            omega_max,
        }
    }
}

/// Planar single integrator with a disc control set; the analytic test
/// model (reachable sets are exact discs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleIntegratorState {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SingleIntegratorControl {
    pub ux: f64,
    pub uy: f64,
}

/// Common surface shared by solver, value queries, and closed-loop rollout.
pub trait Model: Sync {
    type State: Copy + Send + Sync;
    type Control: Copy + Send + Sync;

    /// Embed a state into value-grid coordinates (x, y, theta).
    fn to_grid(&self, state: &Self::State) -> [f64; 3];

    /// Clamp a control into the admissible set.
    fn saturate(&self, control: Self::Control) -> Self::Control;

    /// One explicit-Euler step; the control is saturated first.
    fn step(&self, state: &Self::State, control: Self::Control, dt: f64) -> Self::State;

    /// Lower Hamiltonian `min_u p . f(x, u)` at grid coordinates.
    fn hamiltonian(&self, state: [f64; 3], costate: [f64; 3]) -> f64;

    /// Hamiltonian with the heading trig precomputed; hot path for grid
    /// sweeps (neither model's Hamiltonian depends on x or y).
    fn hamiltonian_trig(&self, cos_theta: f64, sin_theta: f64, costate: [f64; 3]) -> f64 {
        self.hamiltonian([0.0, 0.0, sin_theta.atan2(cos_theta)], costate)
    }

    /// Per-axis bounds `sup |dH/dp_d|`, used as Lax-Friedrichs dissipation.
    fn dissipation_bounds(&self) -> [f64; 3];

    /// The control-set vertex achieving the lower Hamiltonian. Ties break
    /// deterministically (unicycle: toward (v_max, +omega_max)).
    fn control_from_costate(&self, state: &Self::State, costate: [f64; 3]) -> Self::Control;
}

/// Forward-only-capable unicycle: `f = (v cos(theta), v sin(theta), omega)`.
#[derive(Debug, Clone, Copy)]
pub struct Unicycle {
    pub bounds: ControlBounds,
}

impl Unicycle {
    pub fn new(bounds: ControlBounds) -> Self {
        Self { bounds }
    }

    /// State derivative (x_dot, y_dot, theta_dot).
    pub fn flow(&self, state: &UnicycleState, control: UnicycleControl) -> (f64, f64, f64) {
        (
            control.v * state.theta.cos(),
            control.v * state.theta.sin(),
            control.omega,
        )
    }
}

impl Model for Unicycle {
    type State = UnicycleState;
    type Control = UnicycleControl;

    fn to_grid(&self, state: &Self::State) -> [f64; 3] {
        [state.x, state.y, state.theta]
    }

    fn saturate(&self, control: Self::Control) -> Self::Control {
        UnicycleControl {
            v: control.v.clamp(self.bounds.v_min, self.bounds.v_max),
            omega: control.omega.clamp(-self.bounds.omega_max, self.bounds.omega_max),
        }
    }

    fn step(&self, state: &Self::State, control: Self::Control, dt: f64) -> Self::State {
        debug_assert!(dt > 0.0);
        let u = self.saturate(control);
        let (dx, dy, dtheta) = self.flow(state, u);
        UnicycleState {
            x: state.x + dx * dt,
            y: state.y + dy * dt,
            theta: normalize_angle(state.theta + dtheta * dt),
        }
    }

    fn hamiltonian(&self, state: [f64; 3], p: [f64; 3]) -> f64 {
        self.hamiltonian_trig(state[2].cos(), state[2].sin(), p)
    }

    fn hamiltonian_trig(&self, cos_theta: f64, sin_theta: f64, p: [f64; 3]) -> f64 {
        let a = p[0] * cos_theta + p[1] * sin_theta;
        let v_term = (self.bounds.v_min * a).min(self.bounds.v_max * a);
        v_term - self.bounds.omega_max * p[2].abs()
    }

    fn dissipation_bounds(&self) -> [f64; 3] {
        let speed = self.bounds.v_max.abs().max(self.bounds.v_min.abs());
        [speed, speed, self.bounds.omega_max]
    }

    fn control_from_costate(&self, state: &Self::State, p: [f64; 3]) -> Self::Control {
        let a = p[0] * state.theta.cos() + p[1] * state.theta.sin();
        let v = if self.bounds.v_min * a < self.bounds.v_max * a {
            self.bounds.v_min
        } else {
            self.bounds.v_max
        };
        let omega = if p[2] > 0.0 {
            -self.bounds.omega_max
        } else {
            self.bounds.omega_max
        };
        UnicycleControl { v, omega }
    }
}

/// Single integrator: `f = u`, `||u|| <= v_max`.
#[derive(Debug, Clone, Copy)]
pub struct SingleIntegrator {
    pub v_max: f64,
}

impl SingleIntegrator {
    pub fn new(v_max: f64) -> Self {
        assert!(v_max > 0.0);
        Self { v_max }
    }
}

impl Model for SingleIntegrator {
    type State = SingleIntegratorState;
    type Control = SingleIntegratorControl;

    fn to_grid(&self, state: &Self::State) -> [f64; 3] {
        [state.x, state.y, 0.0]
    }

    fn saturate(&self, control: Self::Control) -> Self::Control {
        let norm = control.ux.hypot(control.uy);
        if norm <= self.v_max || norm == 0.0 {
            control
        } else {
            let s = self.v_max / norm;
            SingleIntegratorControl {
                ux: control.ux * s,
                uy: control.uy * s,
            }
        }
    }

    fn step(&self, state: &Self::State, control: Self::Control, dt: f64) -> Self::State {
        debug_assert!(dt > 0.0);
        let u = self.saturate(control);
        SingleIntegratorState {
            x: state.x + u.ux * dt,
            y: state.y + u.uy * dt,
        }
    }

    fn hamiltonian(&self, _state: [f64; 3], p: [f64; 3]) -> f64 {
        -self.v_max * p[0].hypot(p[1])
    }

    fn hamiltonian_trig(&self, _cos_theta: f64, _sin_theta: f64, p: [f64; 3]) -> f64 {
        -self.v_max * p[0].hypot(p[1])
    }

    fn dissipation_bounds(&self) -> [f64; 3] {
        [self.v_max, self.v_max, 0.0]
    }

    fn control_from_costate(&self, _state: &Self::State, p: [f64; 3]) -> Self::Control {
        let norm = p[0].hypot(p[1]);
        if norm == 0.0 {
            // Flat costate: deterministic vertex.
            return SingleIntegratorControl {
                ux: self.v_max,
                uy: 0.0,
            };
        }
        SingleIntegratorControl {
            ux: -self.v_max * p[0] / norm,
            uy: -self.v_max * p[1] / norm,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn unicycle() -> Unicycle {
        Unicycle::new(ControlBounds::new(0.0, 1.0, 1.0))
    }

    /// RK4 reference stepper, used only to bound Euler drift.
    fn rk4_step(m: &Unicycle, s: &UnicycleState, u: UnicycleControl, dt: f64) -> UnicycleState {
        let f = |s: &UnicycleState| m.flow(s, u);
        let k1 = f(s);
        let mid1 = UnicycleState::new(s.x + 0.5 * dt * k1.0, s.y + 0.5 * dt * k1.1, s.theta + 0.5 * dt * k1.2);
        let k2 = f(&mid1);
        let mid2 = UnicycleState::new(s.x + 0.5 * dt * k2.0, s.y + 0.5 * dt * k2.1, s.theta + 0.5 * dt * k2.2);
        let k3 = f(&mid2);
        let end = UnicycleState::new(s.x + dt * k3.0, s.y + dt * k3.1, s.theta + dt * k3.2);
        let k4 = f(&end);
        UnicycleState::new(
            s.x + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            s.y + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
            s.theta + dt / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2),
        )
    }

    #[test]
    fn flow_closed_forms() {
        let m = unicycle();
        let f = m.flow(&UnicycleState::new(0.0, 0.0, 0.0), UnicycleControl { v: 1.0, omega: 0.0 });
        assert_eq!(f, (1.0, 0.0, 0.0));
        let f = m.flow(&UnicycleState::new(0.0, 0.0, FRAC_PI_2), UnicycleControl { v: 1.0, omega: 0.0 });
        assert!((f.0).abs() < 1e-15 && (f.1 - 1.0).abs() < 1e-15);
        let f = m.flow(
            &UnicycleState::new(0.0, 0.0, FRAC_PI_4),
            UnicycleControl { v: 2.0, omega: 0.5 },
        );
        assert!((f.0 - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((f.1 - 2.0f64.sqrt()).abs() < 1e-12);
        assert_eq!(f.2, 0.5);
    }

    #[test]
    fn euler_step_moves_exactly() {
        let m = unicycle();
        let s = m.step(
            &UnicycleState::new(2.0, 1.0, 0.0),
            UnicycleControl { v: 1.0, omega: 0.0 },
            0.1,
        );
        assert_eq!(s.x, 2.1);
        assert_eq!(s.y, 1.0);
        assert_eq!(s.theta, 0.0);
    }

    #[test]
    fn step_wraps_heading() {
        let m = unicycle();
        let s = m.step(
            &UnicycleState::new(0.0, 0.0, PI - 0.05),
            UnicycleControl { v: 0.0, omega: 1.0 },
            0.1,
        );
        assert!((s.theta - (-PI + 0.05)).abs() < 1e-12);
    }

    #[test]
    fn hundred_euler_steps_stay_near_rk4_circle() {
        let m = unicycle();
        let u = UnicycleControl { v: 1.0, omega: 1.0 };
        let dt = 0.01;
        let mut euler = UnicycleState::new(0.0, 0.0, 0.0);
        let mut reference = UnicycleState::new(0.0, 0.0, 0.0);
        for _ in 0..100 {
            euler = m.step(&euler, u, dt);
            for _ in 0..100 {
                reference = rk4_step(&m, &reference, u, dt / 100.0);
            }
        }
        // Reference lies on the radius-1 circle centered at (0, 1).
        let r = (reference.x.powi(2) + (reference.y - 1.0).powi(2)).sqrt();
        assert!((r - 1.0).abs() < 1e-9);
        let err = ((euler.x - reference.x).powi(2) + (euler.y - reference.y).powi(2)).sqrt();
        assert!(err < 10.0 * dt, "Euler drift {err} exceeds O(dt) bound");
    }

    #[test]
    fn straight_line_steps_compose() {
        let m = unicycle();
        let u = UnicycleControl { v: 0.7, omega: 0.0 };
        let s0 = UnicycleState::new(0.13, -2.4, 0.9);
        let twice = m.step(&m.step(&s0, u, 0.05), u, 0.05);
        let once = m.step(&s0, u, 0.1);
        assert!((twice.x - once.x).abs() < 1e-15);
        assert!((twice.y - once.y).abs() < 1e-15);
        assert_eq!(twice.theta, once.theta);
    }

    #[test]
    fn hamiltonian_closed_forms() {
        let m = unicycle();
        assert_eq!(m.hamiltonian([0.0, 0.0, 0.0], [0.0, 0.0, 0.0]), 0.0);
        let si = SingleIntegrator::new(1.0);
        assert_eq!(si.hamiltonian([0.0; 3], [3.0, 4.0, 0.0]), -5.0);
        // theta=0, p=(1,0,2), v in [0,1], omega_max=1: min(0, 1) - 2 = -2.
        assert_eq!(m.hamiltonian([0.0, 0.0, 0.0], [1.0, 0.0, 2.0]), -2.0);
    }

    #[test]
    fn costate_sign_rules() {
        let m = unicycle();
        let s = UnicycleState::new(0.0, 0.0, 0.0);
        let u = m.control_from_costate(&s, [0.0, 0.0, 0.5]);
        assert_eq!(u.omega, -1.0);
        let u = m.control_from_costate(&s, [-1.0, 0.0, 0.0]);
        assert_eq!(u.v, 1.0);
        // Ties go to (v_max, +omega_max).
        let u = m.control_from_costate(&s, [0.0, 0.0, 0.0]);
        assert_eq!((u.v, u.omega), (1.0, 1.0));
    }

    fn dot_flow(m: &Unicycle, s: &UnicycleState, u: UnicycleControl, p: [f64; 3]) -> f64 {
        let f = m.flow(s, u);
        p[0] * f.0 + p[1] * f.1 + p[2] * f.2
    }

    proptest! {
        /// The returned vertex achieves the Hamiltonian and beats sampled
        /// admissible controls.
        #[test]
        fn costate_control_achieves_hamiltonian(
            x in -3.0f64..3.0, y in -3.0f64..3.0, th in -3.1f64..3.1,
            p0 in -2.0f64..2.0, p1 in -2.0f64..2.0, p2 in -2.0f64..2.0,
            seed in 0u64..1000,
        ) {
            let m = unicycle();
            let s = UnicycleState::new(x, y, th);
            let p = [p0, p1, p2];
            let u_star = m.control_from_costate(&s, p);
            let h = m.hamiltonian(m.to_grid(&s), p);
            prop_assert!((dot_flow(&m, &s, u_star, p) - h).abs() < 1e-12);

            // Vertex enumeration oracle.
            let mut best = f64::INFINITY;
            for &v in &[m.bounds.v_min, m.bounds.v_max] {
                for &w in &[-m.bounds.omega_max, m.bounds.omega_max] {
                    best = best.min(dot_flow(&m, &s, UnicycleControl { v, omega: w }, p));
                }
            }
            prop_assert!((h - best).abs() < 1e-12);

            use rand::Rng;
            let mut rng = crate::rng::stream(seed, 92, 0, 0);
            for _ in 0..100 {
                let u = UnicycleControl {
                    v: rng.gen_range(m.bounds.v_min..=m.bounds.v_max),
                    omega: rng.gen_range(-m.bounds.omega_max..=m.bounds.omega_max),
                };
                prop_assert!(dot_flow(&m, &s, u_star, p) <= dot_flow(&m, &s, u, p) + 1e-12);
            }
        }

        /// Positive homogeneity of degree one in the costate.
        #[test]
        fn hamiltonian_is_positively_homogeneous(
            th in -3.1f64..3.1,
            p0 in -2.0f64..2.0, p1 in -2.0f64..2.0, p2 in -2.0f64..2.0,
            lambda in 0.01f64..50.0,
        ) {
            let m = unicycle();
            let h1 = m.hamiltonian([0.0, 0.0, th], [p0, p1, p2]);
            let h2 = m.hamiltonian([0.0, 0.0, th], [lambda * p0, lambda * p1, lambda * p2]);
            prop_assert!((h2 - lambda * h1).abs() < 1e-9 * (1.0 + h1.abs() * lambda));

            let si = SingleIntegrator::new(1.3);
            let h1 = si.hamiltonian([0.0; 3], [p0, p1, 0.0]);
            let h2 = si.hamiltonian([0.0; 3], [lambda * p0, lambda * p1, 0.0]);
            prop_assert!((h2 - lambda * h1).abs() < 1e-9 * (1.0 + h1.abs() * lambda));
        }

        /// Saturation always lands inside the admissible set.
        #[test]
        fn saturation_is_admissible(v in -5.0f64..5.0, w in -5.0f64..5.0) {
            let m = unicycle();
            let u = m.saturate(UnicycleControl { v, omega: w });
            prop_assert!(u.v >= m.bounds.v_min && u.v <= m.bounds.v_max);
            prop_assert!(u.omega.abs() <= m.bounds.omega_max);

            let si = SingleIntegrator::new(0.8);
            let u = si.saturate(SingleIntegratorControl { ux: v, uy: w });
            prop_assert!(u.ux.hypot(u.uy) <= 0.8 + 1e-12);
        }
    }
}
