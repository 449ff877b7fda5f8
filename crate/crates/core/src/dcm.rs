//! Divergent component of motion: definition, closed-form evolution, the
//! nominal periodic orbit, and the step-to-step map used by the planner.
//!
//! All DCM algebra is written in the effective (momentum-blended) velocity,
//! so a nonzero `alpha` shifts where the DCM sits for the same raw state.

use serde::{Deserialize, Serialize};

use crate::model::{galip_velocity, ComState, ContactPoint, PendulumParams};

/// Horizontal DCM position in the world frame: `ξ = p + v_eff/ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcmState {
    pub xi_x: f64,
    pub xi_y: f64,
}

impl DcmState {
    pub fn offset_from(&self, contact: &ContactPoint) -> [f64; 2] {
        [self.xi_x - contact.sx, self.xi_y - contact.sy]
    }
}

/// DCM of a centroidal state.
pub fn dcm_from_state(state: &ComState, params: &PendulumParams) -> DcmState {
    let (vx_t, vy_t) = galip_velocity(state, params);
    DcmState {
        xi_x: state.x + vx_t / params.omega,
        xi_y: state.y + vy_t / params.omega,
    }
}

/// Closed-form DCM evolution about a fixed contact:
/// `ξ(t) = (ξ0 - S)·e^{ωt} + S` per axis.
pub fn dcm_evolve(xi0: DcmState, contact: &ContactPoint, params: &PendulumParams, t: f64) -> DcmState {
    let e = (params.omega * t).exp();
    DcmState {
        xi_x: (xi0.xi_x - contact.sx) * e + contact.sx,
        xi_y: (xi0.xi_y - contact.sy) * e + contact.sy,
    }
}

/// DCM jump across a velocity discontinuity: `ξ⁺ = ξ⁻ + (v_eff⁺ - v_eff⁻)/ω`.
pub fn dcm_reset(
    xi_pre: DcmState,
    v_eff_pre: (f64, f64),
    v_eff_post: (f64, f64),
    params: &PendulumParams,
) -> DcmState {
    DcmState {
        xi_x: xi_pre.xi_x + (v_eff_post.0 - v_eff_pre.0) / params.omega,
        xi_y: xi_pre.xi_y + (v_eff_post.1 - v_eff_pre.1) / params.omega,
    }
}

/// Periodic single-step orbit for step displacement `(px, py)`, signed stance
/// width `w_signed` and duration `t_step`, parameterized by its midpoint.
///
/// The midpoint sits at `t = 0` of the domain `[-T/2, T/2]`, directly over the
/// contact in x:
/// `vx_m = ω·px / (2·sinh(ωT/2))`, `y_m = w_signed / (2·cosh(ωT/2))`,
/// `vy_m = ω·py / (2·sinh(ωT/2))`.
///
/// The DCM offset at the start of the cycle is
/// `b_x = px/(e^{ωT}-1)`, `b_y = w_signed/(e^{ωT}+1) + py/(e^{ωT}-1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NominalOrbit {
    pub px: f64,
    pub py: f64,
    pub w_signed: f64,
    pub t_step: f64,
    pub xdot_m: f64,
    pub y_m: f64,
    pub ydot_m: f64,
    pub b_nom_x: f64,
    pub b_nom_y: f64,
}

pub fn nominal_orbit(
    px: f64,
    py: f64,
    w_signed: f64,
    t_step: f64,
    params: &PendulumParams,
) -> NominalOrbit {
    let omega = params.omega;
    let half = 0.5 * omega * t_step;
    let tau = (omega * t_step).exp();
    NominalOrbit {
        px,
        py,
        w_signed,
        t_step,
        xdot_m: omega * px / (2.0 * half.sinh()),
        y_m: w_signed / (2.0 * half.cosh()),
        ydot_m: omega * py / (2.0 * half.sinh()),
        b_nom_x: px / (tau - 1.0),
        b_nom_y: w_signed / (tau + 1.0) + py / (tau - 1.0),
    }
}

/// Step-to-step DCM map with a velocity jump at the temporal midpoint:
/// `ξ_end = (ξ_start - S)·e^{ωT} + (Δv_mid/ω)·e^{ωT/2} + S` per axis,
/// where `Δv_mid` is the effective-velocity jump (post minus pre).
pub fn step_to_step(
    xi_start: DcmState,
    contact: &ContactPoint,
    t_step: f64,
    dv_mid: (f64, f64),
    params: &PendulumParams,
) -> DcmState {
    let omega = params.omega;
    let e_full = (omega * t_step).exp();
    let e_half = (0.5 * omega * t_step).exp();
    DcmState {
        xi_x: (xi_start.xi_x - contact.sx) * e_full + dv_mid.0 / omega * e_half + contact.sx,
        xi_y: (xi_start.xi_y - contact.sy) * e_full + dv_mid.1 / omega * e_half + contact.sy,
    }
}

/// Closed-form end-of-step position of a cycle started with position
/// deviation `x_dev` at `t = -T/2`: `x(T/2) = px/2 + e^{-ωT}·x_dev`.
///
/// Executable form of the convergence lemma; tests pit it against the
/// boundary-value construction of the perturbed cycle.
pub fn deviation_decay(x_dev: f64, px: f64, t_step: f64, params: &PendulumParams) -> f64 {
    px / 2.0 + (-params.omega * t_step).exp() * x_dev
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{com_flow, ContactPoint, Side, SlopeGradient};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params(alpha: f64) -> PendulumParams {
        PendulumParams::default_robot(alpha).unwrap()
    }

    fn contact_at(sx: f64, sy: f64) -> ContactPoint {
        ContactPoint::new(sx, sy, 0.0, Side::Right)
    }

    #[test]
    fn dcm_collapses_to_position_at_rest() {
        let s = ComState {
            x: 0.3,
            y: -0.1,
            z: 0.78,
            vx: 0.0,
            vy: 0.0,
            vz: 0.0,
            lcom_x: 0.0,
            lcom_y: 0.0,
        };
        let xi = dcm_from_state(&s, &params(0.7));
        assert_eq!(xi.xi_x, 0.3);
        assert_eq!(xi.xi_y, -0.1);
    }

    #[test]
    fn dcm_direct_evaluation() {
        let p = params(0.0);
        let s = ComState {
            x: 0.1,
            y: 0.0,
            z: 0.78,
            vx: 0.2,
            vy: 0.0,
            vz: 0.0,
            lcom_x: 0.0,
            lcom_y: 0.0,
        };
        let xi = dcm_from_state(&s, &p);
        assert_relative_eq!(xi.xi_x, 0.1 + 0.2 / p.omega, max_relative = 1e-15);
    }

    #[test]
    fn dcm_alpha_shift_is_momentum_term() {
        let mut s = ComState {
            x: 0.0,
            y: 0.0,
            z: 0.78,
            vx: 0.1,
            vy: 0.0,
            vz: 0.0,
            lcom_x: 0.0,
            lcom_y: 6.0,
        };
        s.lcom_x = -2.0;
        let p0 = params(0.0);
        let p1 = params(1.0);
        let xi0 = dcm_from_state(&s, &p0);
        let xi1 = dcm_from_state(&s, &p1);
        let mz = p0.mass * s.z;
        assert_relative_eq!(xi1.xi_x - xi0.xi_x, s.lcom_y / (mz * p0.omega), max_relative = 1e-13);
        assert_relative_eq!(xi1.xi_y - xi0.xi_y, -s.lcom_x / (mz * p0.omega), max_relative = 1e-13);
    }

    #[test]
    fn evolve_fixed_point_at_contact() {
        let p = params(0.0);
        let c = contact_at(0.4, -0.1);
        let xi = DcmState { xi_x: 0.4, xi_y: -0.1 };
        let out = dcm_evolve(xi, &c, &p, 0.7);
        assert_eq!(out, xi);
    }

    #[test]
    fn evolve_matches_ode_integration() {
        let p = params(0.0);
        let c = contact_at(0.0, 0.0);
        let xi0 = DcmState { xi_x: 0.02, xi_y: -0.015 };
        let t_end = 0.5;
        // RK4 on xi' = omega (xi - S)
        let mut xi = xi0.xi_x;
        let dt = 1e-5_f64;
        let f = |x: f64| p.omega * x;
        for _ in 0..(t_end / dt).round() as usize {
            let k1 = f(xi);
            let k2 = f(xi + 0.5 * dt * k1);
            let k3 = f(xi + 0.5 * dt * k2);
            let k4 = f(xi + dt * k3);
            xi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        let out = dcm_evolve(xi0, &c, &p, t_end);
        assert!((out.xi_x - xi).abs() < 1e-9);
        assert_relative_eq!(out.xi_x, 0.02 * (p.omega * t_end).exp(), max_relative = 1e-14);
    }

    #[test]
    fn reset_is_velocity_jump_over_omega() {
        let p = params(0.0);
        let xi = DcmState { xi_x: 0.1, xi_y: 0.05 };
        let out = dcm_reset(xi, (0.3, 0.1), (0.4, 0.1), &p);
        assert_relative_eq!(out.xi_x - xi.xi_x, 0.1 / p.omega, max_relative = 1e-13);
        assert_eq!(out.xi_y, xi.xi_y);
        let id = dcm_reset(xi, (0.3, 0.1), (0.3, 0.1), &p);
        assert_eq!(id, xi);
    }

    #[test]
    fn orbit_midpoint_formulas() {
        let p = params(0.0);
        let orbit = nominal_orbit(0.2, 0.0, 0.2, 0.5, &p);
        let half = 0.5 * p.omega * 0.5;
        assert_relative_eq!(orbit.xdot_m, p.omega * 0.2 / (2.0 * half.sinh()), max_relative = 1e-15);
        assert_relative_eq!(orbit.y_m, 0.2 / (2.0 * half.cosh()), max_relative = 1e-15);
        assert_eq!(orbit.ydot_m, 0.0);
        let tau = (p.omega * 0.5).exp();
        assert_relative_eq!(orbit.b_nom_x, 0.2 / (tau - 1.0), max_relative = 1e-15);
        assert_relative_eq!(orbit.b_nom_y, 0.2 / (tau + 1.0), max_relative = 1e-15);
    }

    #[test]
    fn orbit_stepping_in_place() {
        let p = params(0.0);
        let orbit = nominal_orbit(0.0, 0.0, 0.2, 0.5, &p);
        let tau = (p.omega * 0.5).exp();
        assert_eq!(orbit.xdot_m, 0.0);
        assert_eq!(orbit.b_nom_x, 0.0);
        assert_relative_eq!(orbit.b_nom_y, 0.2 / (tau + 1.0), max_relative = 1e-15);
    }

    /// Orbit closure: flowing the midpoint state forward and backward by T/2
    /// lands at ±px/2 with equal velocities at both ends.
    #[test]
    fn orbit_closure_under_flow() {
        let p = params(0.0);
        let c = contact_at(0.0, 0.0);
        for (px, py, w, t) in [
            (0.2, 0.0, 0.2, 0.5),
            (0.15, 0.05, -0.2, 0.4),
            (0.3, -0.02, 0.25, 0.65),
        ] {
            let orbit = nominal_orbit(px, py, w, t, &p);
            let mid = ComState {
                x: 0.0,
                y: orbit.y_m,
                z: p.z_tilde_nom,
                vx: orbit.xdot_m,
                vy: orbit.ydot_m,
                vz: 0.0,
                lcom_x: 0.0,
                lcom_y: 0.0,
            };
            let fwd = com_flow(&mid, &c, SlopeGradient::flat(), &p, t / 2.0);
            let bwd = com_flow(&mid, &c, SlopeGradient::flat(), &p, -t / 2.0);
            assert_relative_eq!(fwd.x, px / 2.0, epsilon = 1e-9);
            assert_relative_eq!(bwd.x, -px / 2.0, epsilon = 1e-9);
            assert_relative_eq!(fwd.vx, bwd.vx, epsilon = 1e-9);
            // lateral progression over one step is py
            assert_relative_eq!(fwd.y - bwd.y, py, epsilon = 1e-9);
            // continuity into the next cycle with the stance side flipped:
            // end velocity here equals the start velocity of the -w orbit
            let next = nominal_orbit(px, py, -w, t, &p);
            let next_mid = ComState {
                x: 0.0,
                y: next.y_m,
                z: p.z_tilde_nom,
                vx: next.xdot_m,
                vy: next.ydot_m,
                vz: 0.0,
                lcom_x: 0.0,
                lcom_y: 0.0,
            };
            let next_start = com_flow(&next_mid, &c, SlopeGradient::flat(), &p, -t / 2.0);
            assert_relative_eq!(fwd.vy, next_start.vy, epsilon = 1e-9);
        }
    }

    /// The orbit's start DCM offset equals the closed form, and stepping with
    /// a zero midpoint jump maps the offset onto the next support's nominal
    /// offset (with the stance side flipped).
    #[test]
    fn orbit_offset_is_step_map_fixed_point() {
        let p = params(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..50 {
            let px = rng.gen_range(0.05..0.35);
            let py = rng.gen_range(-0.08..0.08);
            let w: f64 = rng.gen_range(0.12..0.3) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let t = rng.gen_range(0.3..0.8);
            let orbit = nominal_orbit(px, py, w, t, &p);
            let c0 = contact_at(0.0, 0.0);
            let xi0 = DcmState { xi_x: orbit.b_nom_x, xi_y: orbit.b_nom_y };
            let end = step_to_step(xi0, &c0, t, (0.0, 0.0), &p);
            // next support: advance by (px, w + py), flip the stance side
            let next = contact_at(px, w + py);
            let next_orbit = nominal_orbit(px, py, -w, t, &p);
            assert_relative_eq!(end.xi_x - next.sx, next_orbit.b_nom_x, epsilon = 1e-9);
            assert_relative_eq!(end.xi_y - next.sy, next_orbit.b_nom_y, epsilon = 1e-9);
        }
    }

    #[test]
    fn step_map_reduces_to_evolve_without_jump() {
        let p = params(0.0);
        let c = contact_at(0.1, 0.0);
        let xi = DcmState { xi_x: 0.14, xi_y: 0.02 };
        let a = step_to_step(xi, &c, 0.5, (0.0, 0.0), &p);
        let b = dcm_evolve(xi, &c, &p, 0.5);
        assert_eq!(a, b);
    }

    #[test]
    fn step_map_is_evolve_reset_evolve() {
        let p = params(0.0);
        let c = contact_at(0.0, 0.0);
        let xi = DcmState { xi_x: 0.05, xi_y: -0.01 };
        let dv = (0.12, -0.07);
        let direct = step_to_step(xi, &c, 0.5, dv, &p);
        let half = dcm_evolve(xi, &c, &p, 0.25);
        let jumped = dcm_reset(half, (0.0, 0.0), dv, &p);
        let composed = dcm_evolve(jumped, &c, &p, 0.25);
        assert_relative_eq!(direct.xi_x, composed.xi_x, epsilon = 1e-14);
        assert_relative_eq!(direct.xi_y, composed.xi_y, epsilon = 1e-14);
    }

    /// One simulated step on flat ground with a forced midpoint velocity jump
    /// matches the step-to-step prediction.
    #[test]
    fn step_map_matches_simulated_step() {
        let p = params(0.0);
        let c = contact_at(0.0, 0.0);
        let t_step = 0.5;
        let orbit = nominal_orbit(0.2, 0.0, 0.2, t_step, &p);
        let g0 = SlopeGradient::flat();
        let g1 = SlopeGradient::new(0.25, -0.1).unwrap();
        // start at the cycle boundary
        let start = {
            let mid = ComState {
                x: 0.0,
                y: orbit.y_m,
                z: p.z_tilde_nom,
                vx: orbit.xdot_m,
                vy: orbit.ydot_m,
                vz: 0.0,
                lcom_x: 0.0,
                lcom_y: 0.0,
            };
            com_flow(&mid, &c, g0, &p, -t_step / 2.0)
        };
        let xi_start = dcm_from_state(&start, &p);
        // simulate: flow half, reset at the midpoint, flow half
        let mid_pre = com_flow(&start, &c, g0, &p, t_step / 2.0);
        let mid_post = crate::model::reset_map(&mid_pre, g0, g1, &c).unwrap();
        let end = com_flow(&mid_post, &c, g1, &p, t_step / 2.0);
        let xi_end = dcm_from_state(&end, &p);
        let dv = (mid_post.vx - mid_pre.vx, mid_post.vy - mid_pre.vy);
        let predicted = step_to_step(xi_start, &c, t_step, dv, &p);
        assert_relative_eq!(predicted.xi_x, xi_end.xi_x, epsilon = 1e-8);
        assert_relative_eq!(predicted.xi_y, xi_end.xi_y, epsilon = 1e-8);
    }

    #[test]
    fn decay_lemma_trivial_values() {
        let p = params(0.0);
        assert_relative_eq!(deviation_decay(0.0, 0.2, 0.5, &p), 0.1, max_relative = 1e-15);
        let one = deviation_decay(0.05, 0.2, 0.5, &p);
        assert_relative_eq!(one, 0.1 + 0.05 * (-p.omega * 0.5).exp(), max_relative = 1e-15);
    }

    /// Boundary-value oracle: build the perturbed cycle start from the nominal
    /// start DCM, propagate with the closed-form flow, compare end positions.
    #[test]
    fn decay_lemma_matches_boundary_value_solution() {
        let p = params(0.0);
        let c = contact_at(0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let x_dev = rng.gen_range(-0.1..0.1);
            let px = rng.gen_range(0.05..0.35);
            let t = rng.gen_range(0.3..0.8);
            let tau = (p.omega * t).exp();
            let x0 = -px / 2.0 + x_dev;
            let xi0 = px / (tau - 1.0);
            let v0 = p.omega * (xi0 - x0);
            let start = ComState {
                x: x0,
                y: 0.0,
                z: p.z_tilde_nom,
                vx: v0,
                vy: 0.0,
                vz: 0.0,
                lcom_x: 0.0,
                lcom_y: 0.0,
            };
            let end = com_flow(&start, &c, SlopeGradient::flat(), &p, t);
            assert_relative_eq!(end.x, deviation_decay(x_dev, px, t, &p), epsilon = 1e-9);
        }
    }

    #[test]
    fn two_steps_square_the_decay() {
        let p = params(0.0);
        let (px, t) = (0.2, 0.5);
        let once = deviation_decay(0.05, px, t, &p) - px / 2.0;
        let twice = deviation_decay(once, px, t, &p) - px / 2.0;
        assert_relative_eq!(twice, 0.05 * (-2.0 * p.omega * t).exp(), max_relative = 1e-12);
    }
}
