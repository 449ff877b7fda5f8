//! Shared fixtures for the benchmark targets.

use stonewalk_core::model::{ComState, ContactPoint, PendulumParams, SlopeGradient};
use stonewalk_core::planner::{build_problem, MpcProblem, PlannerConfig, TerrainPlan};
use stonewalk_core::terrain::{generate_scenario, ScenarioConfig};

pub fn params() -> PendulumParams {
    PendulumParams::default_robot(0.0).unwrap()
}

pub fn flat_plan(n_stones: usize) -> TerrainPlan {
    let layout = generate_scenario(&ScenarioConfig { n_stones, ..Default::default() });
    TerrainPlan::new(&layout, 0.2)
}

/// A mildly perturbed mid-gait problem with the requested horizon.
pub fn perturbed_problem(horizon: usize) -> MpcProblem {
    let p = params();
    let cfg = PlannerConfig { horizon, ..Default::default() };
    let plan = flat_plan(horizon + 8);
    let pivot = plan.pivot(3);
    let contact = ContactPoint::new(pivot[0], pivot[1], pivot[2], plan.side(3));
    let state = ComState {
        x: pivot[0] + 0.03,
        y: pivot[1] - 0.02,
        z: pivot[2] + p.z_tilde_nom,
        vx: 0.4,
        vy: 0.05,
        vz: 0.0,
        lcom_x: 0.0,
        lcom_y: 0.0,
    };
    build_problem(&state, &contact, &plan, 4, 0.0, false, true, &p, &cfg).unwrap()
}

pub fn transition_state() -> (ComState, SlopeGradient, SlopeGradient, ContactPoint) {
    let contact = ContactPoint::new(0.0, 0.0, 0.0, stonewalk_core::model::Side::Right);
    let g_pre = SlopeGradient::new(-0.4, 0.3).unwrap();
    let g_post = SlopeGradient::new(0.4, 0.3).unwrap();
    let state = ComState {
        x: 0.01,
        y: -0.06,
        z: 0.78,
        vx: 0.35,
        vy: 0.1,
        vz: g_pre.kx() * 0.35 + g_pre.ky() * 0.1,
        lcom_x: 0.0,
        lcom_y: 0.0,
    };
    (state, g_pre, g_post, contact)
}
