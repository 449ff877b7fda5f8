//! Deterministic closed-loop simulation of the hybrid reduced-order model.
//!
//! The plant integrates the true centroidal dynamics: horizontal pendulum
//! flow about the pivot, external pushes as constant-force windows, and
//! first-order decay of centroidal angular momentum. Internal torques cannot
//! change the momentum about the pivot, so decayed angular momentum
//! reappears as CoM acceleration (`a += λ·L/(m·z)` per axis). The planner's
//! velocity blend `alpha` is purely an abstraction over this plant; the
//! physics never read it.
//!
//! Height is a kinematic coordinate slaved to the active virtual plane
//! anchored at the current pivot. The planar state is continuous across
//! support exchange; the height re-anchors to the new support's plane.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dcm::{dcm_from_state, DcmState};
use crate::model::{
    guard_value, reset_map, ComState, ContactPoint, PendulumParams, SlopeGradient,
};
use crate::planner::{
    build_problem, extract_command, solve, PlannerConfig, StepCommand, TerrainPlan,
};
use crate::terrain::{generate_scenario, stone_contains, CamImpulse, Push, ScenarioConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("trace holds no step events")]
    EmptyTrace,
}

/// Simulator timing and plant constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Control tick in s.
    pub dt: f64,
    /// Replanning rate in Hz; must divide the tick rate evenly.
    pub replan_hz: f64,
    /// Decay rate of centroidal angular momentum in 1/s.
    pub cam_decay_lambda: f64,
    pub max_steps: usize,
    /// DCM-offset norm beyond which the run is declared a fall, in m.
    pub fall_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            replan_hz: 100.0,
            cam_decay_lambda: 5.0,
            max_steps: 200,
            fall_threshold: 1.0,
        }
    }
}

impl SimConfig {
    pub fn ticks_per_plan(&self) -> Result<usize, SimError> {
        let ratio = 1.0 / (self.dt * self.replan_hz);
        let rounded = ratio.round();
        if (ratio - rounded).abs() > 1e-9 || rounded < 1.0 {
            return Err(SimError::InvalidConfig(format!(
                "replan rate {} Hz does not divide the tick rate {} Hz evenly",
                self.replan_hz,
                1.0 / self.dt
            )));
        }
        Ok(rounded as usize)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SimError::InvalidConfig("dt must be positive".into()));
        }
        if self.cam_decay_lambda < 0.0 {
            return Err(SimError::InvalidConfig("cam_decay_lambda must be nonnegative".into()));
        }
        if self.fall_threshold <= 0.0 {
            return Err(SimError::InvalidConfig("fall_threshold must be positive".into()));
        }
        self.ticks_per_plan().map(|_| ())
    }
}

/// Closed-form solution of `u' = v, v' = ω²u + a + q·e^{-λt}` (one axis).
fn forced_pendulum_axis(
    u0: f64,
    v0: f64,
    omega: f64,
    a: f64,
    q: f64,
    lambda: f64,
    t: f64,
) -> (f64, f64) {
    let (ch, sh) = (f64::cosh(omega * t), f64::sinh(omega * t));
    let ua = a / (omega * omega);
    if (lambda - omega).abs() > 1e-9 * omega.max(1.0) {
        let p = q / (lambda * lambda - omega * omega);
        let e = (-lambda * t).exp();
        let big_a = u0 + ua - p;
        let big_b = (v0 + lambda * p) / omega;
        (
            big_a * ch + big_b * sh + p * e - ua,
            big_a * omega * sh + big_b * omega * ch - lambda * p * e,
        )
    } else {
        // resonant decay rate: particular solution -q·t·e^{-ωt}/(2ω)
        let e = (-omega * t).exp();
        let big_a = u0 + ua;
        let big_b = (v0 + q / (2.0 * omega)) / omega;
        (
            big_a * ch + big_b * sh - q * t * e / (2.0 * omega) - ua,
            big_a * omega * sh + big_b * omega * ch - q * (1.0 - omega * t) * e / (2.0 * omega),
        )
    }
}

/// Advances the plant by `dt` under a constant external force. The momentum
/// conversion height is frozen at the state's height over the interval.
pub fn integrate_tick(
    state: &ComState,
    contact: &ContactPoint,
    g_active: SlopeGradient,
    params: &PendulumParams,
    cam_decay_lambda: f64,
    external_force: [f64; 3],
    dt: f64,
) -> ComState {
    let omega = params.omega;
    let mh = params.mass * state.z;
    let q_x = cam_decay_lambda * state.lcom_y / mh;
    let q_y = -cam_decay_lambda * state.lcom_x / mh;
    let (ux, vx) = forced_pendulum_axis(
        state.x - contact.sx,
        state.vx,
        omega,
        external_force[0] / params.mass,
        q_x,
        cam_decay_lambda,
        dt,
    );
    let (uy, vy) = forced_pendulum_axis(
        state.y - contact.sy,
        state.vy,
        omega,
        external_force[1] / params.mass,
        q_y,
        cam_decay_lambda,
        dt,
    );
    let decay = (-cam_decay_lambda * dt).exp();
    let x = contact.sx + ux;
    let y = contact.sy + uy;
    ComState {
        x,
        y,
        z: state.z + g_active.kx() * (x - state.x) + g_active.ky() * (y - state.y),
        vx,
        vy,
        vz: g_active.kx() * vx + g_active.ky() * vy,
        lcom_x: state.lcom_x * decay,
        lcom_y: state.lcom_y * decay,
    }
}

/// Adds an angular-momentum impulse to the state.
pub fn inject_cam(state: &ComState, impulse: [f64; 2]) -> ComState {
    ComState {
        lcom_x: state.lcom_x + impulse[0],
        lcom_y: state.lcom_y + impulse[1],
        ..*state
    }
}

/// Locates a guard crossing inside `(0, dt]` along `flow`, where `flow(s)` is
/// the plant state `s` seconds ahead. Returns the crossing time refined by
/// bisection to 1e-8 s, or `None` when the guard value does not change sign.
pub fn detect_transition(
    flow: &dyn Fn(f64) -> ComState,
    dt: f64,
    g_post: SlopeGradient,
    z_tilde: f64,
    contact: &ContactPoint,
) -> Option<f64> {
    let g = |s: f64| guard_value(&flow(s), g_post, z_tilde, contact);
    let g0 = g(0.0);
    let g1 = g(dt);
    if g0 == 0.0 || g0.signum() == g1.signum() {
        return None;
    }
    if g1 == 0.0 {
        return Some(dt);
    }
    let (mut lo, mut hi) = (0.0, dt);
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if g(mid).signum() == g0.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Support exchange onto a commanded landing. The planar state is continuous;
/// the height snaps onto the incoming plane of the new support.
pub fn touchdown(
    state: &ComState,
    command: &StepCommand,
    plan: &TerrainPlan,
    params: &PendulumParams,
) -> (ComState, ContactPoint, SlopeGradient) {
    let contact = ContactPoint::new(command.pivot[0], command.pivot[1], command.pivot[2], command.side);
    let (g_pre, _) = plan.gradients_for_support(command.stone_index);
    let z = contact.sz
        + g_pre.kx() * (state.x - contact.sx)
        + g_pre.ky() * (state.y - contact.sy)
        + params.z_tilde_nom;
    let new_state = ComState {
        z,
        vz: g_pre.kx() * state.vx + g_pre.ky() * state.vy,
        ..*state
    };
    (new_state, contact, g_pre)
}

/// One recorded step landing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepEvent {
    /// Layout index of the landed foothold.
    pub index: usize,
    pub touchdown_time: f64,
    pub planned_duration: f64,
    /// Commanded foot position (world), and the stone-center target.
    pub commanded_position: [f64; 3],
    pub desired_position: [f64; 3],
    /// Planar distance between commanded and desired, in m.
    pub deviation: f64,
    /// Commanded foot lies outside its target stone.
    pub infeasible: bool,
}

/// A fired slope transition, with both sides of the reset for auditing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionEvent {
    pub t: f64,
    pub support_index: usize,
    pub pre_state: ComState,
    pub post_state: ComState,
    pub g_pre: SlopeGradient,
    pub g_post: SlopeGradient,
    pub contact: ContactPoint,
}

/// DCM offset bookkeeping at the start of each support phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepStart {
    pub index: usize,
    pub t: f64,
    /// DCM offset relative to the new pivot.
    pub offset: [f64; 2],
    /// Layout-consistent nominal offset for this support.
    pub offset_nom: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub t: f64,
    pub iterations: usize,
    pub constraint_residual: f64,
    pub converged: bool,
    pub wall_us: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: ComState,
    pub dcm: DcmState,
    pub contact: ContactPoint,
    pub step_index: usize,
    pub active: SlopeGradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SimMetrics {
    pub e_avg: f64,
    pub e_max: f64,
    pub steps_completed: usize,
    pub fell: bool,
    /// Mean distance between the step-start DCM prediction and the realized
    /// DCM at the following touchdown, in m.
    pub pred_err_mean: f64,
    pub mean_solve_us: f64,
    pub max_solve_us: f64,
    pub solve_count: usize,
    pub no_convergence_count: usize,
    pub infeasible_count: usize,
}

/// Complete log of one closed-loop run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub samples: Vec<Sample>,
    pub events: Vec<StepEvent>,
    pub transitions: Vec<TransitionEvent>,
    pub step_starts: Vec<StepStart>,
    pub solves: Vec<SolveRecord>,
    pub pred_errors: Vec<f64>,
    pub pushes: Vec<Push>,
    pub cam_impulses: Vec<CamImpulse>,
    pub fell: bool,
    pub metrics: SimMetrics,
}

/// Aggregates the quality metrics of a finished run.
pub fn compute_metrics(trace: &SimTrace) -> Result<SimMetrics, SimError> {
    if trace.events.is_empty() {
        return Err(SimError::EmptyTrace);
    }
    let deviations: Vec<f64> = trace.events.iter().map(|e| e.deviation).collect();
    let e_avg = deviations.iter().sum::<f64>() / deviations.len() as f64;
    let e_max = deviations.iter().cloned().fold(0.0, f64::max);
    let pred_err_mean = if trace.pred_errors.is_empty() {
        0.0
    } else {
        trace.pred_errors.iter().sum::<f64>() / trace.pred_errors.len() as f64
    };
    let solve_count = trace.solves.len();
    let (mean_solve_us, max_solve_us) = if solve_count == 0 {
        (0.0, 0.0)
    } else {
        (
            trace.solves.iter().map(|s| s.wall_us).sum::<f64>() / solve_count as f64,
            trace.solves.iter().map(|s| s.wall_us).fold(0.0, f64::max),
        )
    };
    Ok(SimMetrics {
        e_avg,
        e_max,
        steps_completed: trace.events.len(),
        fell: trace.fell,
        pred_err_mean,
        mean_solve_us,
        max_solve_us,
        solve_count,
        no_convergence_count: trace.solves.iter().filter(|s| !s.converged).count(),
        infeasible_count: trace.events.iter().filter(|e| e.infeasible).count(),
    })
}

struct PendingPrediction {
    landing_index: usize,
    xi_pred: [f64; 2],
}

/// Runs the scenario closed loop: replan at the configured rate, integrate at
/// the control tick, fire guard resets at bisected crossing times, exchange
/// support at commanded durations. The run ends at the final stone, at
/// `max_steps`, or at a fall.
pub fn run_closed_loop(
    scenario: &ScenarioConfig,
    sim: &SimConfig,
    params: &PendulumParams,
    planner: &PlannerConfig,
) -> Result<SimTrace, SimError> {
    scenario.validate().map_err(SimError::InvalidConfig)?;
    sim.validate()?;
    planner.validate().map_err(SimError::InvalidConfig)?;

    let layout = generate_scenario(scenario);
    let plan = TerrainPlan::new(&layout, params.stance_width);
    let ticks_per_plan = sim.ticks_per_plan()?;
    let t_nom = planner.t_nom;
    let tau_nom_full = (params.omega * t_nom).exp();

    // initial support: foothold 0 at the nominal orbit midpoint of its cycle
    let mut support = 0usize;
    let pivot0 = plan.pivot(0);
    let mut contact = ContactPoint::new(pivot0[0], pivot0[1], pivot0[2], plan.side(0));
    let (g_start, _) = plan.gradients_for_support(0);
    let mut g_active = g_start;
    let mut state = {
        let oc = plan.orbit_decomposition(0);
        let half = 0.5 * params.omega * t_nom;
        let x = pivot0[0] + oc.alternation[0] / (2.0 * half.cosh());
        let y = pivot0[1] + oc.alternation[1] / (2.0 * half.cosh());
        let vx = params.omega * oc.progression[0] / (2.0 * half.sinh());
        let vy = params.omega * oc.progression[1] / (2.0 * half.sinh());
        ComState {
            x,
            y,
            z: pivot0[2]
                + g_active.kx() * (x - pivot0[0])
                + g_active.ky() * (y - pivot0[1])
                + params.z_tilde_nom,
            vx,
            vy,
            vz: g_active.kx() * vx + g_active.ky() * vy,
            lcom_x: 0.0,
            lcom_y: 0.0,
        }
    };

    // the run starts at the midpoint of step 0, past its slope transition
    let mut step_start_t = -t_nom / 2.0;
    let mut jump_done = true;
    let mut command = {
        let target = plan.pivot(1);
        let side = plan.side(1);
        let half_w = side.signed_width(params.stance_width) / 2.0;
        StepCommand {
            foot: [target[0], target[1] - half_w, target[2]],
            pivot: target,
            side,
            duration: t_nom,
            stone_index: 1,
            off_stone: false,
        }
    };

    let mut push_boundaries: Vec<f64> = scenario
        .pushes
        .iter()
        .flat_map(|p| [p.t_start, p.t_start + p.duration])
        .collect();
    push_boundaries.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut cam_queue: Vec<CamImpulse> = scenario.cam_impulses.clone();
    cam_queue.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
    let mut next_cam = 0usize;

    let force_at = |t: f64| -> [f64; 3] {
        let mut f = [0.0, 0.0, 0.0];
        for p in &scenario.pushes {
            if t >= p.t_start && t < p.t_start + p.duration {
                f[0] += p.force[0];
                f[1] += p.force[1];
                f[2] += p.force[2];
            }
        }
        f
    };

    let mut trace = SimTrace {
        samples: Vec::new(),
        events: Vec::new(),
        transitions: Vec::new(),
        step_starts: Vec::new(),
        solves: Vec::new(),
        pred_errors: Vec::new(),
        pushes: scenario.pushes.clone(),
        cam_impulses: scenario.cam_impulses.clone(),
        fell: false,
        metrics: SimMetrics::default(),
    };

    let record_sample = |trace: &mut SimTrace, t: f64, state: &ComState, contact: &ContactPoint, support: usize, g: SlopeGradient| {
        trace.samples.push(Sample {
            t,
            state: *state,
            dcm: dcm_from_state(state, params),
            contact: *contact,
            step_index: support,
            active: g,
        });
    };

    {
        let xi = dcm_from_state(&state, params);
        trace.step_starts.push(StepStart {
            index: 0,
            t: 0.0,
            offset: [xi.xi_x - contact.sx, xi.xi_y - contact.sy],
            offset_nom: plan.nominal_offset(0, tau_nom_full),
        });
    }

    let mut pending_pred: Option<PendingPrediction> = None;
    let mut plan_fresh_for_step = false;
    let tick_limit = (((sim.max_steps as f64 + 2.0) * planner.t_max + 5.0) / sim.dt).ceil() as usize;
    let mut completed = false;

    'ticks: for tick in 0..tick_limit {
        let t0 = tick as f64 * sim.dt;
        record_sample(&mut trace, t0, &state, &contact, support, g_active);

        // replan, unless the committed touchdown is inside the lockout
        // window (re-commanding there would keep deferring it)
        let remaining = step_start_t + command.duration - t0;
        if tick % ticks_per_plan == 0 && remaining > planner.min_remaining + 1e-12 {
            let elapsed = t0 - step_start_t;
            let upcoming = support + 1;
            match build_problem(
                &state,
                &contact,
                &plan,
                upcoming,
                elapsed,
                jump_done,
                scenario.pslip_enabled,
                params,
                planner,
            ) {
                Ok(problem) => {
                    let sol = solve(&problem);
                    trace.solves.push(SolveRecord {
                        t: t0,
                        iterations: sol.iterations,
                        constraint_residual: sol.constraint_residual,
                        converged: sol.converged,
                        wall_us: sol.wall_us,
                    });
                    // a non-converged solve still returns its best iterate,
                    // which descends from the nominal initialization
                    command = extract_command(&sol, &plan, upcoming, &contact);
                    if !plan_fresh_for_step {
                        plan_fresh_for_step = true;
                        pending_pred = Some(PendingPrediction {
                            landing_index: upcoming,
                            xi_pred: [
                                contact.sx + sol.u[0][0] + sol.b[0][0],
                                contact.sy + sol.u[0][1] + sol.b[0][1],
                            ],
                        });
                    }
                }
                Err(_) => {
                    // keep the previous command; the transition prediction was
                    // singular, which the bounded layouts cannot produce
                    trace.solves.push(SolveRecord {
                        t: t0,
                        iterations: 0,
                        constraint_residual: f64::INFINITY,
                        converged: false,
                        wall_us: 0.0,
                    });
                }
            }
        }

        // integrate the tick with sub-tick events
        let tick_end = t0 + sim.dt;
        let mut tc = t0;
        while tc < tick_end - 1e-12 {
            // apply due momentum impulses
            while next_cam < cam_queue.len() && cam_queue[next_cam].t <= tc + 1e-12 {
                state = inject_cam(&state, [cam_queue[next_cam].lx, cam_queue[next_cam].ly]);
                next_cam += 1;
            }

            let t_touchdown = step_start_t + command.duration;
            let mut seg_end = tick_end.min(t_touchdown.max(tc));
            for b in &push_boundaries {
                if *b > tc + 1e-12 && *b < seg_end {
                    seg_end = *b;
                }
            }
            if next_cam < cam_queue.len() && cam_queue[next_cam].t > tc + 1e-12 {
                seg_end = seg_end.min(cam_queue[next_cam].t);
            }
            let seg_end = seg_end.min(tick_end);
            let touchdown_now = t_touchdown <= seg_end + 1e-12 && t_touchdown >= tc - 1e-12;
            let seg_end = if touchdown_now { t_touchdown.clamp(tc, tick_end) } else { seg_end };
            let dt_seg = seg_end - tc;

            let force = force_at(tc + 0.5 * dt_seg.max(1e-12));
            let frozen = state;
            let flow = move |s: f64| {
                integrate_tick(&frozen, &contact, g_active, params, sim.cam_decay_lambda, force, s)
            };

            // guard crossing inside this segment
            let (g_pre, g_post) = plan.gradients_for_support(support);
            if !jump_done && g_pre != g_post && dt_seg > 1e-12 {
                if let Some(s_cross) =
                    detect_transition(&flow, dt_seg, g_post, params.z_tilde_nom, &contact)
                {
                    let pre = flow(s_cross);
                    match reset_map(&pre, g_pre, g_post, &contact) {
                        Ok(post) => {
                            trace.transitions.push(TransitionEvent {
                                t: tc + s_cross,
                                support_index: support,
                                pre_state: pre,
                                post_state: post,
                                g_pre,
                                g_post,
                                contact,
                            });
                            state = post;
                            g_active = g_post;
                            jump_done = true;
                            tc += s_cross;
                            continue;
                        }
                        Err(_) => {
                            // off-plane by more than the reset tolerates;
                            // ride the incoming plane until touchdown
                            jump_done = true;
                        }
                    }
                }
            }

            if dt_seg > 1e-12 {
                state = flow(dt_seg);
            }
            tc = seg_end;

            if touchdown_now {
                // a transition that never crossed the guard inside the step
                // (the crossing line can run alongside the path on irregular
                // layouts) still switches slopes; fire it at the boundary so
                // the plane bookkeeping and the velocity jump stay paired
                let (g_pre, g_post) = plan.gradients_for_support(support);
                if !jump_done && g_pre != g_post {
                    if let Ok(post) = reset_map(&state, g_pre, g_post, &contact) {
                        trace.transitions.push(TransitionEvent {
                            t: tc,
                            support_index: support,
                            pre_state: state,
                            post_state: post,
                            g_pre,
                            g_post,
                            contact,
                        });
                        state = post;
                    }
                }
                let landing = command.stone_index;
                let desired = layout.desired_footholds[landing.min(layout.len() - 1)].position;
                let deviation = ((command.foot[0] - desired[0]).powi(2)
                    + (command.foot[1] - desired[1]).powi(2))
                .sqrt();
                let stone = &plan.stones[landing.min(plan.stones.len() - 1)];
                trace.events.push(StepEvent {
                    index: landing,
                    touchdown_time: tc,
                    planned_duration: command.duration,
                    commanded_position: command.foot,
                    desired_position: desired,
                    deviation,
                    infeasible: !stone_contains(stone, [command.foot[0], command.foot[1]]),
                });

                let (new_state, new_contact, new_g) = touchdown(&state, &command, &plan, params);
                state = new_state;
                contact = new_contact;
                g_active = new_g;
                support = landing;
                step_start_t = tc;
                jump_done = false;
                plan_fresh_for_step = false;

                let xi = dcm_from_state(&state, params);
                if let Some(pred) = pending_pred.take() {
                    if pred.landing_index == landing {
                        let err = ((xi.xi_x - pred.xi_pred[0]).powi(2)
                            + (xi.xi_y - pred.xi_pred[1]).powi(2))
                        .sqrt();
                        trace.pred_errors.push(err);
                    }
                }
                trace.step_starts.push(StepStart {
                    index: landing,
                    t: tc,
                    offset: [xi.xi_x - contact.sx, xi.xi_y - contact.sy],
                    offset_nom: plan.nominal_offset(landing, tau_nom_full),
                });

                // hold the nominal duration toward the next desired foothold
                // until the next replan refines it
                let next = landing + 1;
                let target = plan.pivot(next);
                let side = plan.side(next);
                let half_w = side.signed_width(params.stance_width) / 2.0;
                command = StepCommand {
                    foot: [target[0], target[1] - half_w, target[2]],
                    pivot: target,
                    side,
                    duration: t_nom,
                    stone_index: next,
                    off_stone: false,
                };

                if support + 1 >= plan.len() || trace.events.len() >= sim.max_steps {
                    completed = true;
                    break 'ticks;
                }
            }
        }

        // fall detection on the DCM offset
        let xi = dcm_from_state(&state, params);
        let offset =
            ((xi.xi_x - contact.sx).powi(2) + (xi.xi_y - contact.sy).powi(2)).sqrt();
        if !state.is_finite() || offset > sim.fall_threshold {
            trace.fell = true;
            record_sample(&mut trace, tick_end, &state, &contact, support, g_active);
            break;
        }
    }

    if completed {
        let t_final = trace.samples.last().map(|s| s.t).unwrap_or(0.0);
        record_sample(&mut trace, t_final + sim.dt, &state, &contact, support, g_active);
    }

    if !trace.events.is_empty() {
        trace.metrics = compute_metrics(&trace)?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Side;
    use crate::terrain::ElevationPattern;
    use approx::assert_relative_eq;

    fn params() -> PendulumParams {
        PendulumParams::default_robot(0.0).unwrap()
    }

    fn flat_contact() -> ContactPoint {
        ContactPoint::new(0.0, 0.0, 0.0, Side::Right)
    }

    fn row_c(n_stones: usize) -> ScenarioConfig {
        ScenarioConfig { n_stones, ..Default::default() }
    }

    #[test]
    fn tick_without_force_or_momentum_matches_flow() {
        let p = params();
        let s = ComState {
            x: 0.04,
            y: -0.02,
            z: 0.78,
            vx: 0.3,
            vy: 0.1,
            vz: 0.0,
            lcom_x: 0.0,
            lcom_y: 0.0,
        };
        let c = flat_contact();
        let g = SlopeGradient::flat();
        let a = integrate_tick(&s, &c, g, &p, 5.0, [0.0; 3], 1e-3);
        let b = crate::model::com_flow(&s, &c, g, &p, 1e-3);
        assert_relative_eq!(a.x, b.x, epsilon = 1e-14);
        assert_relative_eq!(a.vx, b.vx, epsilon = 1e-13);
        assert_relative_eq!(a.y, b.y, epsilon = 1e-14);
    }

    #[test]
    fn constant_force_adds_analytic_particular_solution() {
        // Superposition: forced minus free response equals the closed-form
        // constant-force particular solution (a/ω)·sinh(ωt) in velocity.
        let p = params();
        let c = flat_contact();
        let g = SlopeGradient::flat();
        let s = ComState {
            x: 0.0,
            y: 0.0,
            z: 0.78,
            vx: 0.0,
            vy: 0.0,
            vz: 0.0,
            lcom_x: 0.0,
            lcom_y: 0.0,
        };
        let f = [-50.0, 0.0, 0.0];
        let t = 0.3;
        let forced = integrate_tick(&s, &c, g, &p, 0.0, f, t);
        let free = integrate_tick(&s, &c, g, &p, 0.0, [0.0; 3], t);
        let a = f[0] / p.mass;
        assert_relative_eq!(a, -50.0 / 44.9, max_relative = 1e-12); // -1.1136 m/s²
        let dv_expected = a / p.omega * (p.omega * t).sinh();
        let dx_expected = a / (p.omega * p.omega) * ((p.omega * t).cosh() - 1.0);
        assert_relative_eq!(forced.vx - free.vx, dv_expected, epsilon = 1e-9);
        assert_relative_eq!(forced.x - free.x, dx_expected, epsilon = 1e-9);
    }

    #[test]
    fn forced_flow_matches_rk4() {
        // the full plant (force + momentum transfer + decay) against RK4
        let p = params();
        let c = flat_contact();
        let g = SlopeGradient::flat();
        let lambda = 5.0;
        let s = ComState {
            x: 0.03,
            y: -0.01,
            z: 0.78,
            vx: 0.25,
            vy: -0.1,
            vz: 0.0,
            lcom_x: 1.5,
            lcom_y: 3.0,
        };
        let f = [20.0, -10.0, 0.0];
        let t_end = 0.2;
        let out = integrate_tick(&s, &c, g, &p, lambda, f, t_end);

        // RK4 on (x, vx, l) per axis with constant conversion height
        let h = s.z;
        let ode = |u: f64, v: f64, l: f64, a: f64| {
            (v, p.omega * p.omega * u + a + lambda * l / (p.mass * h), -lambda * l)
        };
        let dt = 1e-6;
        let (mut u, mut v, mut l) = (s.x, s.vx, s.lcom_y);
        let a = f[0] / p.mass;
        for _ in 0..(t_end / dt).round() as usize {
            let (k1u, k1v, k1l) = ode(u, v, l, a);
            let (k2u, k2v, k2l) = ode(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v, l + 0.5 * dt * k1l, a);
            let (k3u, k3v, k3l) = ode(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v, l + 0.5 * dt * k2l, a);
            let (k4u, k4v, k4l) = ode(u + dt * k3u, v + dt * k3v, l + dt * k3l, a);
            u += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            l += dt / 6.0 * (k1l + 2.0 * k2l + 2.0 * k3l + k4l);
        }
        assert!((out.x - u).abs() < 1e-8, "x {} vs {}", out.x, u);
        assert!((out.vx - v).abs() < 1e-8);
        assert!((out.lcom_y - l).abs() < 1e-9);
    }

    #[test]
    fn resonant_decay_rate_is_finite() {
        let p = params();
        let c = flat_contact();
        let s = ComState {
            x: 0.01,
            y: 0.0,
            z: 0.78,
            vx: 0.1,
            vy: 0.0,
            vz: 0.0,
            lcom_x: 0.0,
            lcom_y: 2.0,
        };
        let out = integrate_tick(&s, &c, SlopeGradient::flat(), &p, p.omega, [0.0; 3], 0.1);
        assert!(out.is_finite());
        // continuity against a nearby non-resonant rate
        let near = integrate_tick(&s, &c, SlopeGradient::flat(), &p, p.omega + 1e-6, [0.0; 3], 0.1);
        assert_relative_eq!(out.x, near.x, epsilon = 1e-7);
        assert_relative_eq!(out.vx, near.vx, epsilon = 1e-6);
    }

    #[test]
    fn cam_injection_and_decay() {
        let p = params();
        let s = ComState {
            x: 0.0,
            y: 0.0,
            z: 0.78,
            vx: 0.0,
            vy: 0.0,
            vz: 0.0,
            lcom_x: 0.0,
            lcom_y: 0.0,
        };
        let s = inject_cam(&s, [0.0, 3.0]);
        assert_eq!(s.lcom_y, 3.0);
        assert_eq!(inject_cam(&s, [0.0, 0.0]), s);
        let mut cur = s;
        let c = flat_contact();
        for _ in 0..1000 {
            cur = integrate_tick(&cur, &c, SlopeGradient::flat(), &p, 5.0, [0.0; 3], 1e-3);
        }
        assert_relative_eq!(cur.lcom_y, 3.0 * (-5.0f64).exp(), max_relative = 1e-9);
    }

    #[test]
    fn guard_detection_and_grazing() {
        let p = params();
        let c = flat_contact();
        let g_post = SlopeGradient::new(0.3, 0.0).unwrap();
        let s = ComState {
            x: -0.02,
            y: 0.0,
            z: 0.78,
            vx: 0.4,
            vy: 0.0,
            vz: 0.0,
            lcom_x: 0.0,
            lcom_y: 0.0,
        };
        let flow = |t: f64| integrate_tick(&s, &c, SlopeGradient::flat(), &p, 0.0, [0.0; 3], t);
        // crossing where x(t) = 0
        let t_cross = detect_transition(&flow, 0.2, g_post, p.z_tilde_nom, &c).expect("crossing");
        assert!(flow(t_cross).x.abs() < 1e-7);
        // flat-to-flat never fires
        let none = detect_transition(&flow, 0.2, SlopeGradient::flat(), p.z_tilde_nom, &c);
        assert!(none.is_none());
        // no sign change inside a short window
        let none = detect_transition(&flow, 0.01, g_post, p.z_tilde_nom, &c);
        assert!(none.is_none());
    }

    #[test]
    fn flat_run_is_stable_and_exact() {
        let scenario = row_c(30);
        let sim = SimConfig { max_steps: 25, ..Default::default() };
        let p = params();
        let planner = PlannerConfig::default();
        let trace = run_closed_loop(&scenario, &sim, &p, &planner).unwrap();
        assert!(!trace.fell);
        assert_eq!(trace.metrics.steps_completed, 25);
        assert!(trace.metrics.e_avg < 1e-6, "e_avg {}", trace.metrics.e_avg);
        assert!(trace.metrics.pred_err_mean < 1e-6, "pred {}", trace.metrics.pred_err_mean);
        // timestamps strictly increasing
        for w in trace.samples.windows(2) {
            assert!(w[1].t > w[0].t);
        }
    }

    #[test]
    fn flat_run_is_deterministic() {
        let scenario = row_c(15);
        let sim = SimConfig { max_steps: 10, ..Default::default() };
        let p = params();
        let planner = PlannerConfig::default();
        let a = run_closed_loop(&scenario, &sim, &p, &planner).unwrap();
        let b = run_closed_loop(&scenario, &sim, &p, &planner).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.events, b.events);
    }

    #[test]
    fn periodic_elevation_fires_guards_near_midstep() {
        let scenario = ScenarioConfig {
            elevation: ElevationPattern::Periodic { amplitude: 0.17 },
            n_stones: 14,
            ..Default::default()
        };
        let sim = SimConfig { max_steps: 10, ..Default::default() };
        let p = params();
        let planner = PlannerConfig::default();
        let trace = run_closed_loop(&scenario, &sim, &p, &planner).unwrap();
        assert!(!trace.fell);
        assert!(trace.transitions.len() >= 8);
        // transitions sit within 10 ms of the temporal midpoint of their step
        for tr in &trace.transitions {
            let start = trace
                .step_starts
                .iter()
                .find(|s| s.index == tr.support_index)
                .map(|s| s.t)
                .unwrap_or(-planner.t_nom / 2.0);
            let event = trace
                .events
                .iter()
                .find(|e| e.index == tr.support_index + 1)
                .expect("step completion");
            let midpoint = start + (event.touchdown_time - start) / 2.0;
            assert!(
                (tr.t - midpoint).abs() < 0.01,
                "transition at {} vs midpoint {}",
                tr.t,
                midpoint
            );
        }
    }

    #[test]
    fn transitions_conserve_momentum_and_land_on_new_plane() {
        let scenario = ScenarioConfig {
            elevation: ElevationPattern::Periodic { amplitude: 0.17 },
            n_stones: 14,
            ..Default::default()
        };
        let sim = SimConfig { max_steps: 10, ..Default::default() };
        let p = params();
        let trace = run_closed_loop(&scenario, &sim, &p, &PlannerConfig::default()).unwrap();
        assert!(!trace.transitions.is_empty());
        for tr in &trace.transitions {
            let (pre, post, c) = (&tr.pre_state, &tr.post_state, &tr.contact);
            let rel = |s: &ComState| (s.x - c.sx, s.y - c.sy, s.z - c.sz);
            let (x, y, z) = rel(pre);
            let ly_pre = z * pre.vx - x * pre.vz;
            let ly_post = z * post.vx - x * post.vz;
            let lx_pre = y * pre.vz - z * pre.vy;
            let lx_post = y * post.vz - z * post.vy;
            assert_relative_eq!(ly_pre, ly_post, epsilon = 1e-9);
            assert_relative_eq!(lx_pre, lx_post, epsilon = 1e-9);
            let post_res =
                post.vz - tr.g_post.kx() * post.vx - tr.g_post.ky() * post.vy;
            assert!(post_res.abs() < 1e-9);
        }
    }

    #[test]
    fn touchdown_keeps_planar_state_continuous() {
        let scenario = row_c(12);
        let sim = SimConfig { max_steps: 8, ..Default::default() };
        let p = params();
        let trace = run_closed_loop(&scenario, &sim, &p, &PlannerConfig::default()).unwrap();
        for e in &trace.events {
            // find the samples straddling the touchdown
            let before = trace.samples.iter().rev().find(|s| s.t <= e.touchdown_time).unwrap();
            let Some(after) = trace.samples.iter().find(|s| s.t > e.touchdown_time) else {
                continue;
            };
            let dt = after.t - before.t;
            assert!((after.state.x - before.state.x).abs() < 1.0 * dt + 1e-6);
            assert!((after.state.vx - before.state.vx).abs() < 10.0 * dt + 1e-6);
        }
    }

    #[test]
    fn push_recovery_on_flat_ground() {
        let scenario = ScenarioConfig {
            n_stones: 40,
            pushes: vec![Push { t_start: 6.0, force: [-50.0, 0.0, 0.0], duration: 0.3 }],
            ..Default::default()
        };
        let sim = SimConfig { max_steps: 35, ..Default::default() };
        let p = params();
        let trace = run_closed_loop(&scenario, &sim, &p, &PlannerConfig::default()).unwrap();
        assert!(!trace.fell);
        // the offset error decays back below 5% of the nominal within 4 steps
        let push_end = 6.3;
        let rel_err = |s: &StepStart| {
            let dx = s.offset[0] - s.offset_nom[0];
            let dy = s.offset[1] - s.offset_nom[1];
            let nom = (s.offset_nom[0].powi(2) + s.offset_nom[1].powi(2)).sqrt();
            (dx * dx + dy * dy).sqrt() / nom
        };
        let recovered = trace
            .step_starts
            .iter()
            .filter(|s| s.t > push_end)
            .take(4)
            .any(|s| rel_err(s) < 0.05);
        assert!(recovered, "offsets: {:?}", trace.step_starts.iter().filter(|s| s.t > push_end).take(4).map(rel_err).collect::<Vec<_>>());
    }

    #[test]
    fn compute_metrics_rejects_empty_trace() {
        let trace = SimTrace {
            samples: vec![],
            events: vec![],
            transitions: vec![],
            step_starts: vec![],
            solves: vec![],
            pred_errors: vec![],
            pushes: vec![],
            cam_impulses: vec![],
            fell: false,
            metrics: SimMetrics::default(),
        };
        assert_eq!(compute_metrics(&trace), Err(SimError::EmptyTrace));
    }

    #[test]
    fn metrics_mean_of_deviations() {
        let mk = |d: f64| StepEvent {
            index: 0,
            touchdown_time: 0.0,
            planned_duration: 0.5,
            commanded_position: [0.0; 3],
            desired_position: [0.0; 3],
            deviation: d,
            infeasible: false,
        };
        let trace = SimTrace {
            samples: vec![],
            events: vec![mk(0.01), mk(0.03)],
            transitions: vec![],
            step_starts: vec![],
            solves: vec![],
            pred_errors: vec![],
            pushes: vec![],
            cam_impulses: vec![],
            fell: false,
            metrics: SimMetrics::default(),
        };
        let m = compute_metrics(&trace).unwrap();
        assert_relative_eq!(m.e_avg, 0.02, max_relative = 1e-14);
        assert_relative_eq!(m.e_max, 0.03, max_relative = 1e-14);
    }
}
