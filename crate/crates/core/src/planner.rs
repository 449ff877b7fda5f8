//! Receding-horizon optimization of step positions and step durations.
//!
//! Per step `i` the decision variables are the temporal variable
//! `τ_i = e^{ω T_i}` and the planar displacement `u_i` from the current pivot
//! to the i-th landing pivot. The DCM offset obeys the step-to-step recursion
//!
//! `b_i = τ_i·b_{i-1} - (u_i - u_{i-1}) + (Δv_i/ω)·e^{ω T_nom/2}`
//!
//! where `Δv_i` is the predicted effective-velocity jump at the mid-step
//! slope transition. Offsets are eliminated through the recursion, leaving a
//! small bounded nonlinear least-squares in `(τ_i, u_i)` that a damped
//! Gauss-Newton iteration solves from the nominal initialization.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::model::{
    reset_map, ComState, ContactPoint, ModelError, PendulumParams, Side, SlopeGradient,
};
use crate::terrain::{gradient_pair, SteppingStone, StoneLayout, VirtualSlopeSegment};

/// Planner tuning shared across replans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Horizon length in steps. Two steps span a full stride.
    pub horizon: usize,
    pub w_tau: f64,
    pub w_b: f64,
    pub w_u: f64,
    /// Offset weight on the last horizon step. The divergent mode must be
    /// close to nominal by the end of the horizon or errors the short
    /// horizon cannot see are left to compound.
    pub w_b_terminal: f64,
    /// Step-duration bounds and nominal, in s.
    pub t_min: f64,
    pub t_nom: f64,
    pub t_max: f64,
    /// Shortest allowed time from "now" to the commanded touchdown, in s.
    pub min_remaining: f64,
    /// Consecutive-step displacement beyond which a reach warning is raised, in m.
    pub leg_reach_warn: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            horizon: 2,
            // Duration is the flexible parameter: its weight must be small
            // enough that the τ·b feedback dominates the per-step DCM error
            // gain τ_nom, or the loop amplifies noise step over step.
            w_tau: 1e-4,
            w_b: 1.0,
            w_u: 10.0,
            w_b_terminal: 300.0,
            t_min: 0.3,
            t_nom: 0.5,
            t_max: 0.8,
            min_remaining: 0.05,
            leg_reach_warn: 0.5,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.horizon == 0 {
            return Err("horizon must be at least 1".into());
        }
        if !(self.w_tau >= 0.0 && self.w_b >= 0.0 && self.w_u >= 0.0) {
            return Err("weights must be nonnegative".into());
        }
        if self.w_u <= self.w_tau {
            return Err("w_u must exceed w_tau (step position dominates timing)".into());
        }
        if !(0.0 < self.t_min && self.t_min <= self.t_nom && self.t_nom <= self.t_max) {
            return Err("need 0 < t_min <= t_nom <= t_max".into());
        }
        Ok(())
    }
}

/// Terrain data pre-resolved into pivot space for planning: desired pivots,
/// their support sides, virtual slope segments and the underlying stones.
#[derive(Debug, Clone)]
pub struct TerrainPlan {
    pub pivots: Vec<[f64; 3]>,
    pub sides: Vec<Side>,
    pub segments: Vec<VirtualSlopeSegment>,
    pub stones: Vec<SteppingStone>,
    pub stance_width: f64,
}

impl TerrainPlan {
    pub fn new(layout: &StoneLayout, stance_width: f64) -> Self {
        let pivots = (0..layout.len())
            .map(|i| layout.adjusted_desired(i, stance_width))
            .collect();
        Self {
            pivots,
            sides: layout.desired_footholds.iter().map(|f| f.side).collect(),
            segments: layout.virtual_slopes(stance_width),
            stones: layout.stones.clone(),
            stance_width,
        }
    }

    pub fn len(&self) -> usize {
        self.pivots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn side(&self, i: usize) -> Side {
        if i < self.sides.len() {
            self.sides[i]
        } else {
            // terminal extension keeps alternating
            let last = *self.sides.last().expect("nonempty plan");
            if (i - (self.sides.len() - 1)).is_multiple_of(2) {
                last
            } else {
                last.other()
            }
        }
    }

    /// Index of the segment whose displacement stands in for segment `i`,
    /// continuing the period-two pattern of the last two segments past the
    /// end of the layout (the alternating gait keeps alternating).
    fn delta_index(&self, i: usize) -> usize {
        let last = self.pivots.len() - 2;
        if i <= last {
            i
        } else if last >= 1 && (i - last) % 2 == 1 {
            last - 1
        } else {
            last
        }
    }

    fn delta3(&self, i: usize) -> [f64; 3] {
        let j = self.delta_index(i);
        [
            self.pivots[j + 1][0] - self.pivots[j][0],
            self.pivots[j + 1][1] - self.pivots[j][1],
            self.pivots[j + 1][2] - self.pivots[j][2],
        ]
    }

    /// Planar displacement from desired pivot `i` to `i+1`, extended past the
    /// last pivot with the period-two continuation.
    pub fn pivot_delta(&self, i: usize) -> [f64; 2] {
        let d = self.delta3(i);
        [d[0], d[1]]
    }

    /// Desired pivot `i`, extrapolated past the end of the layout.
    pub fn pivot(&self, i: usize) -> [f64; 3] {
        let n = self.pivots.len();
        if i < n {
            return self.pivots[i];
        }
        let mut p = self.pivots[n - 1];
        for j in (n - 1)..i {
            let d = self.delta3(j);
            p = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
        }
        p
    }

    pub fn gradients_for_support(&self, support: usize) -> (SlopeGradient, SlopeGradient) {
        gradient_pair(&self.segments, support)
    }

    /// DCM offset at the start of the step standing on desired pivot `j`,
    /// consistent with the desired pivot grid and the nominal duration:
    /// `b_j = (τ·Δ_j + Δ_{j+1}) / (τ² - 1)` per axis.
    ///
    /// For an alternating gait with constant lateral progression this is the
    /// periodic-orbit offset `[px/(τ-1), w/(τ+1) + py/(τ-1)]`; the two-step
    /// form stays a fixed point of the offset recursion on any layout whose
    /// displacements have period two.
    pub fn nominal_offset(&self, j: usize, tau_nom: f64) -> [f64; 2] {
        let d0 = self.pivot_delta(j);
        let d1 = self.pivot_delta(j + 1);
        let denom = tau_nom * tau_nom - 1.0;
        [
            (tau_nom * d0[0] + d1[0]) / denom,
            (tau_nom * d0[1] + d1[1]) / denom,
        ]
    }

    /// Period-two decomposition of the displacement pair at support `j` into
    /// an even (progression) part and an odd (alternating) part per axis.
    pub fn orbit_decomposition(&self, j: usize) -> OrbitComponents {
        let d0 = self.pivot_delta(j);
        let d1 = self.pivot_delta(j + 1);
        OrbitComponents {
            progression: [(d0[0] + d1[0]) / 2.0, (d0[1] + d1[1]) / 2.0],
            alternation: [(d0[0] - d1[0]) / 2.0, (d0[1] - d1[1]) / 2.0],
        }
    }
}

/// Even/odd split of consecutive pivot displacements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitComponents {
    /// Per-step progression (same every step).
    pub progression: [f64; 2],
    /// Alternating component (flips sign every step); the lateral entry plays
    /// the role of the signed stance width.
    pub alternation: [f64; 2],
}

/// Predicted effective-velocity jump at the mid-step slope transition of a
/// nominal cycle with forward displacement `px`, lateral progression `py` and
/// signed stance width `w_signed`.
///
/// The nominal midpoint sits directly over the pivot in x with
/// `y_m = w_signed/(2cosh(ωT/2))`, moving at the periodic-orbit midpoint
/// velocity on the incoming slope; the reset map supplies the jump.
pub fn predicted_velocity_jump(
    px: f64,
    py: f64,
    w_signed: f64,
    t_nom: f64,
    g_pre: SlopeGradient,
    g_post: SlopeGradient,
    params: &PendulumParams,
) -> Result<(f64, f64), ModelError> {
    if g_pre == g_post {
        return Ok((0.0, 0.0));
    }
    let orbit = crate::dcm::nominal_orbit(px, py, w_signed, t_nom, params);
    let pivot = ContactPoint::new(0.0, 0.0, 0.0, Side::Right);
    let y_m = orbit.y_m;
    let z_m = params.z_tilde_nom + g_pre.ky() * y_m;
    let vx = orbit.xdot_m;
    let vy = orbit.ydot_m;
    let mid = ComState {
        x: 0.0,
        y: y_m,
        z: z_m,
        vx,
        vy,
        vz: g_pre.kx() * vx + g_pre.ky() * vy,
        lcom_x: 0.0,
        lcom_y: 0.0,
    };
    let post = reset_map(&mid, g_pre, g_post, &pivot)?;
    Ok((post.vx - mid.vx, post.vy - mid.vy))
}

/// One assembled MPC instance.
#[derive(Debug, Clone, PartialEq)]
pub struct MpcProblem {
    pub n_steps: usize,
    /// Current DCM offset relative to the current pivot.
    pub b0: [f64; 2],
    /// Per-step temporal targets; the first accounts for time already spent
    /// in the current step.
    pub tau_nom: Vec<f64>,
    pub tau_min: Vec<f64>,
    pub tau_max: Vec<f64>,
    pub b_nom: Vec<[f64; 2]>,
    pub u_nom: Vec<[f64; 2]>,
    pub dv_mid: Vec<[f64; 2]>,
    pub w_tau: Vec<f64>,
    pub w_b: Vec<f64>,
    pub w_u: Vec<f64>,
    pub omega: f64,
    /// `e^{ω T_nom / 2}`, the fixed amplification of the midpoint jump.
    pub jump_scale: f64,
    /// Time already elapsed in the current step, in s.
    pub elapsed: f64,
    pub leg_reach_warn: f64,
}

impl MpcProblem {
    /// Offsets produced by the recursion for the given decision variables.
    pub fn propagate(&self, tau: &[f64], u: &[[f64; 2]]) -> Vec<[f64; 2]> {
        let mut b = Vec::with_capacity(self.n_steps);
        let mut prev_b = self.b0;
        let mut prev_u = [0.0, 0.0];
        for i in 0..self.n_steps {
            let jump = [
                self.dv_mid[i][0] / self.omega * self.jump_scale,
                self.dv_mid[i][1] / self.omega * self.jump_scale,
            ];
            let bi = [
                tau[i] * prev_b[0] - (u[i][0] - prev_u[0]) + jump[0],
                tau[i] * prev_b[1] - (u[i][1] - prev_u[1]) + jump[1],
            ];
            b.push(bi);
            prev_b = bi;
            prev_u = u[i];
        }
        b
    }

    /// Largest per-step violation of the offset recursion (diagnostic; zero
    /// by construction for solutions produced through `propagate`).
    pub fn constraint_residual(&self, tau: &[f64], u: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
        let mut worst: f64 = 0.0;
        let mut prev_b = self.b0;
        let mut prev_u = [0.0, 0.0];
        for i in 0..self.n_steps {
            let jump_x = self.dv_mid[i][0] / self.omega * self.jump_scale;
            let jump_y = self.dv_mid[i][1] / self.omega * self.jump_scale;
            let rx = tau[i] * prev_b[0] - b[i][0] - (u[i][0] - prev_u[0]) + jump_x;
            let ry = tau[i] * prev_b[1] - b[i][1] - (u[i][1] - prev_u[1]) + jump_y;
            worst = worst.max((rx * rx + ry * ry).sqrt());
            prev_b = b[i];
            prev_u = u[i];
        }
        worst
    }

    /// Total cost of a candidate point (offsets from the recursion).
    pub fn cost_of(&self, tau: &[f64], u: &[[f64; 2]]) -> f64 {
        self.cost(tau, u)
    }

    fn cost(&self, tau: &[f64], u: &[[f64; 2]]) -> f64 {
        let b = self.propagate(tau, u);
        let mut c = 0.0;
        for i in 0..self.n_steps {
            let dt = tau[i] - self.tau_nom[i];
            c += self.w_tau[i] * dt * dt;
            let db = [b[i][0] - self.b_nom[i][0], b[i][1] - self.b_nom[i][1]];
            c += self.w_b[i] * (db[0] * db[0] + db[1] * db[1]);
            let du = [u[i][0] - self.u_nom[i][0], u[i][1] - self.u_nom[i][1]];
            c += self.w_u[i] * (du[0] * du[0] + du[1] * du[1]);
        }
        c
    }
}

/// Result of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpcSolution {
    pub tau: Vec<f64>,
    pub u: Vec<[f64; 2]>,
    pub b: Vec<[f64; 2]>,
    /// Total step durations in s; the first includes the elapsed portion.
    pub t_step: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub constraint_residual: f64,
    pub cost: f64,
    pub wall_us: f64,
    /// Steps whose displacement from the previous one exceeds the reach limit.
    pub reach_warnings: Vec<usize>,
}

/// Assembles the MPC for the current state.
///
/// `upcoming` is the layout index of the next landing foothold; `elapsed` is
/// the time already spent in the current step; `jump_done` marks the current
/// step's slope transition as already fired (its predicted jump is dropped);
/// `pslip_enabled = false` zeroes every predicted jump (comparison mode).
#[allow(clippy::too_many_arguments)]
pub fn build_problem(
    state: &ComState,
    contact: &ContactPoint,
    plan: &TerrainPlan,
    upcoming: usize,
    elapsed: f64,
    jump_done: bool,
    pslip_enabled: bool,
    params: &PendulumParams,
    cfg: &PlannerConfig,
) -> Result<MpcProblem, ModelError> {
    let n = cfg.horizon;
    let omega = params.omega;
    let xi = crate::dcm::dcm_from_state(state, params);
    let b0 = [xi.xi_x - contact.sx, xi.xi_y - contact.sy];

    let tau_of = |t: f64| (omega * t).exp();
    let tau_nom_full = tau_of(cfg.t_nom);

    let mut tau_nom = Vec::with_capacity(n);
    let mut tau_min = Vec::with_capacity(n);
    let mut tau_max = Vec::with_capacity(n);
    let mut b_nom = Vec::with_capacity(n);
    let mut u_nom = Vec::with_capacity(n);
    let mut dv_mid = Vec::with_capacity(n);

    for i in 0..n {
        if i == 0 {
            // remaining-time window: the commanded touchdown never precedes
            // the present by less than `min_remaining`
            let lo = (cfg.t_min - elapsed).max(cfg.min_remaining);
            let hi = (cfg.t_max - elapsed).max(cfg.min_remaining + 1e-3);
            let nom = (cfg.t_nom - elapsed).clamp(lo, hi);
            tau_min.push(tau_of(lo));
            tau_max.push(tau_of(hi));
            tau_nom.push(tau_of(nom));
        } else {
            tau_min.push(tau_of(cfg.t_min));
            tau_max.push(tau_of(cfg.t_max));
            tau_nom.push(tau_nom_full);
        }

        let land = upcoming + i;
        let target = plan.pivot(land);
        u_nom.push([target[0] - contact.sx, target[1] - contact.sy]);
        b_nom.push(plan.nominal_offset(land, tau_nom_full));

        // the step's transition happens on the support it starts from
        let support = land.saturating_sub(1);
        let dv = if !pslip_enabled || (i == 0 && jump_done) {
            (0.0, 0.0)
        } else {
            let (g_pre, g_post) = plan.gradients_for_support(support);
            let oc = plan.orbit_decomposition(support);
            predicted_velocity_jump(
                oc.progression[0],
                oc.progression[1],
                oc.alternation[1],
                cfg.t_nom,
                g_pre,
                g_post,
                params,
            )?
        };
        dv_mid.push([dv.0, dv.1]);
    }

    let mut w_b = vec![cfg.w_b; n];
    w_b[n - 1] = cfg.w_b_terminal.max(cfg.w_b);
    Ok(MpcProblem {
        n_steps: n,
        b0,
        tau_nom,
        tau_min,
        tau_max,
        b_nom,
        u_nom,
        dv_mid,
        w_tau: vec![cfg.w_tau; n],
        w_b,
        w_u: vec![cfg.w_u; n],
        omega,
        jump_scale: (0.5 * omega * cfg.t_nom).exp(),
        elapsed,
        leg_reach_warn: cfg.leg_reach_warn,
    })
}

/// Damped Gauss-Newton over the offset-eliminated problem, initialized at the
/// nominal variables and projected onto the τ box after every accepted step.
pub fn solve(problem: &MpcProblem) -> MpcSolution {
    let start = Instant::now();
    let n = problem.n_steps;
    let nv = 3 * n;
    let nr = 5 * n;

    let clamp_tau = |tau: &mut [f64]| {
        for (i, t) in tau.iter_mut().enumerate() {
            *t = t.clamp(problem.tau_min[i], problem.tau_max[i]);
        }
    };

    let mut tau: Vec<f64> = problem.tau_nom.clone();
    clamp_tau(&mut tau);
    let mut u: Vec<[f64; 2]> = problem.u_nom.clone();
    let mut cost = problem.cost(&tau, &u);

    let sw_tau: Vec<f64> = problem.w_tau.iter().map(|w| w.sqrt()).collect();
    let sw_b: Vec<f64> = problem.w_b.iter().map(|w| w.sqrt()).collect();
    let sw_u: Vec<f64> = problem.w_u.iter().map(|w| w.sqrt()).collect();

    let mut converged = false;
    let mut iterations = 0;
    let mut mu = 0.0_f64;

    for iter in 0..50 {
        iterations = iter + 1;

        // residuals and dense Jacobian, offsets propagated forward
        let mut r = DVector::zeros(nr);
        let mut jac = DMatrix::zeros(nr, nv);
        let b = problem.propagate(&tau, &u);
        // db[axis] = gradient of b_i w.r.t. all variables
        let mut db_prev = DMatrix::zeros(2, nv);
        let mut db = DMatrix::zeros(2, nv);
        for i in 0..n {
            let prev_b = if i == 0 { problem.b0 } else { b[i - 1] };
            // b_i = tau_i * b_{i-1} - u_i + u_{i-1} + jump_i
            db.copy_from(&(&db_prev * tau[i]));
            db[(0, 3 * i)] += prev_b[0];
            db[(1, 3 * i)] += prev_b[1];
            db[(0, 3 * i + 1)] -= 1.0;
            db[(1, 3 * i + 2)] -= 1.0;
            if i > 0 {
                db[(0, 3 * (i - 1) + 1)] += 1.0;
                db[(1, 3 * (i - 1) + 2)] += 1.0;
            }

            let row = 5 * i;
            r[row] = sw_tau[i] * (tau[i] - problem.tau_nom[i]);
            jac[(row, 3 * i)] = sw_tau[i];
            for axis in 0..2 {
                r[row + 1 + axis] = sw_b[i] * (b[i][axis] - problem.b_nom[i][axis]);
                for v in 0..nv {
                    jac[(row + 1 + axis, v)] = sw_b[i] * db[(axis, v)];
                }
                r[row + 3 + axis] = sw_u[i] * (u[i][axis] - problem.u_nom[i][axis]);
                jac[(row + 3 + axis, 3 * i + 1 + axis)] = sw_u[i];
            }
            std::mem::swap(&mut db_prev, &mut db);
        }

        let grad = jac.transpose() * &r;
        let jtj = jac.transpose() * &jac;

        // active set: τ variables pinned at a bound with the gradient
        // pushing outward are frozen for this iteration
        let mut frozen = vec![false; nv];
        for i in 0..n {
            let gi = grad[3 * i];
            let at_lo = tau[i] <= problem.tau_min[i] + 1e-12;
            let at_hi = tau[i] >= problem.tau_max[i] - 1e-12;
            frozen[3 * i] = (at_lo && gi > 0.0) || (at_hi && gi < 0.0);
        }
        let mut grad_f = grad.clone();
        let mut jtj_f = jtj.clone();
        for v in 0..nv {
            if frozen[v] {
                grad_f[v] = 0.0;
                for w in 0..nv {
                    jtj_f[(v, w)] = 0.0;
                    jtj_f[(w, v)] = 0.0;
                }
                jtj_f[(v, v)] = 1.0;
            }
        }
        if grad_f.norm() < 1e-12 * (1.0 + cost) {
            converged = true;
            break;
        }

        // damped step with retry on cost increase
        let mut accepted = false;
        for _ in 0..16 {
            let mut lhs = jtj_f.clone();
            for d in 0..nv {
                if !frozen[d] {
                    lhs[(d, d)] += mu;
                }
            }
            let Some(delta) = lhs.lu().solve(&(-&grad_f)) else {
                mu = (mu * 10.0).max(1e-8);
                continue;
            };
            let mut tau_new = tau.clone();
            let mut u_new = u.clone();
            for i in 0..n {
                if !frozen[3 * i] {
                    tau_new[i] += delta[3 * i];
                }
                u_new[i][0] += delta[3 * i + 1];
                u_new[i][1] += delta[3 * i + 2];
            }
            clamp_tau(&mut tau_new);
            let cost_new = problem.cost(&tau_new, &u_new);
            if cost_new <= cost + 1e-30 {
                let step_norm: f64 = (0..n)
                    .map(|i| {
                        (tau_new[i] - tau[i]).powi(2)
                            + (u_new[i][0] - u[i][0]).powi(2)
                            + (u_new[i][1] - u[i][1]).powi(2)
                    })
                    .sum::<f64>()
                    .sqrt();
                let reduction = cost - cost_new;
                tau = tau_new;
                u = u_new;
                cost = cost_new;
                mu *= 0.3;
                accepted = true;
                if step_norm < 1e-10 || reduction < 1e-18 * (1.0 + cost) {
                    converged = true;
                }
                break;
            }
            mu = (mu * 10.0).max(1e-8);
        }
        if !accepted {
            // no damping level improves the cost: stationary within bounds
            converged = true;
        }
        if converged {
            break;
        }
    }

    let b = problem.propagate(&tau, &u);
    let residual = problem.constraint_residual(&tau, &u, &b);
    let mut t_step = Vec::with_capacity(n);
    for (i, &t) in tau.iter().enumerate() {
        let dur = t.ln() / problem.omega;
        t_step.push(if i == 0 { problem.elapsed + dur } else { dur });
    }
    let mut reach_warnings = Vec::new();
    let mut prev = [0.0, 0.0];
    for (i, ui) in u.iter().enumerate() {
        let d = ((ui[0] - prev[0]).powi(2) + (ui[1] - prev[1]).powi(2)).sqrt();
        if d > problem.leg_reach_warn {
            reach_warnings.push(i + 1);
        }
        prev = *ui;
    }

    MpcSolution {
        tau,
        u,
        b,
        t_step,
        converged,
        iterations,
        constraint_residual: residual,
        cost,
        wall_us: start.elapsed().as_secs_f64() * 1e6,
        reach_warnings,
    }
}

/// First-step command extracted from a solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepCommand {
    /// Landing foot position (world), z snapped to the target stone surface.
    pub foot: [f64; 3],
    /// Landing pivot (foot shifted by half the signed stance width).
    pub pivot: [f64; 3],
    pub side: Side,
    /// Total duration of the current step, measured from its start.
    pub duration: f64,
    pub stone_index: usize,
    /// Feasibility warning: the commanded foot leaves its target stone.
    pub off_stone: bool,
}

/// Turns the first optimized step into a touchdown command. The planar
/// position comes from `u_1`; the height comes from the target stone.
pub fn extract_command(
    solution: &MpcSolution,
    plan: &TerrainPlan,
    upcoming: usize,
    contact: &ContactPoint,
) -> StepCommand {
    let stone_index = upcoming.min(plan.stones.len() - 1);
    let stone = &plan.stones[stone_index];
    let z = stone.center[2];
    let side = plan.side(upcoming);
    let pivot = [contact.sx + solution.u[0][0], contact.sy + solution.u[0][1], z];
    let half = side.signed_width(plan.stance_width) / 2.0;
    let foot = [pivot[0], pivot[1] - half, z];
    StepCommand {
        foot,
        pivot,
        side,
        duration: solution.t_step[0],
        stone_index,
        off_stone: !crate::terrain::stone_contains(stone, [foot[0], foot[1]]),
    }
}
