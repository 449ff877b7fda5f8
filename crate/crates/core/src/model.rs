//! Piecewise-slope pendulum model: continuous flow, the slope-transition
//! reset map, and the angular-momentum velocity blend.
//!
//! All operations work in the world frame. Positions are converted to
//! coordinates relative to the active support pivot internally, so the same
//! state can be carried across many steps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gravitational acceleration in m/s².
pub const GRAVITY: f64 = 9.81;

/// Absolute tolerance on the guard function, in meters.
pub const GUARD_TOLERANCE: f64 = 1e-6;

/// Absolute tolerance on the pre-transition slope constraint, in m/s.
pub const PRE_SLOPE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    /// The slope-transition denominator `1 - kx·x/z - ky·y/z` is too close to
    /// zero for the velocity jump to be well defined.
    #[error("singular slope transition (denominator {denominator:.3e})")]
    SingularTransition { denominator: f64 },

    /// The pre-transition state does not satisfy `vz = kx·vx + ky·vy` on the
    /// incoming slope.
    #[error("pre-transition state off its slope plane (residual {residual:.3e} m/s)")]
    PreSlopeViolation { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Which foot carries the robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    /// Signed stance width `W_{l/r}` for this support side: `-w` for a left
    /// support, `+w` for a right support.
    pub fn signed_width(self, w: f64) -> f64 {
        match self {
            Side::Left => -w,
            Side::Right => w,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// Dimensionless surface gradient of a virtual slope, per horizontal axis.
///
/// Gradients are rejected at construction when either component reaches 1 in
/// magnitude; the transition formulas lose meaning well before a vertical
/// surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeGradient {
    kx: f64,
    ky: f64,
}

impl SlopeGradient {
    pub fn new(kx: f64, ky: f64) -> Result<Self, ModelError> {
        if !(kx.is_finite() && ky.is_finite()) || kx.abs() >= 1.0 || ky.abs() >= 1.0 {
            return Err(ModelError::InvalidParameter(format!(
                "slope gradient ({kx}, {ky}) out of range (|k| < 1)"
            )));
        }
        Ok(Self { kx, ky })
    }

    pub fn flat() -> Self {
        Self { kx: 0.0, ky: 0.0 }
    }

    pub fn kx(&self) -> f64 {
        self.kx
    }

    pub fn ky(&self) -> f64 {
        self.ky
    }
}

/// Full centroidal state in the world frame.
///
/// `lcom_x` and `lcom_y` are the horizontal components of centroidal angular
/// momentum (about the CoM itself), in kg·m²/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub vx: f64,
    pub vy: f64,
    pub vz: f64,
    pub lcom_x: f64,
    pub lcom_y: f64,
}

impl ComState {
    pub fn is_finite(&self) -> bool {
        [
            self.x,
            self.y,
            self.z,
            self.vx,
            self.vy,
            self.vz,
            self.lcom_x,
            self.lcom_y,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

/// Sign convention for converting the x-component of centroidal angular
/// momentum into an equivalent lateral velocity.
///
/// `Standard` follows the cross-product convention (`vy_eff = vy - α·Lx/(m·z)`),
/// which is what the slope-transition reset map conserves. `Mirrored` flips
/// the sign of the lateral term and exists so the two conventions can be
/// compared experimentally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CamYConvention {
    #[default]
    Standard,
    Mirrored,
}

/// Pendulum parameters shared by the model, the planner and the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumParams {
    /// Total mass in kg.
    pub mass: f64,
    /// Nominal pendulum height in m; fixes the natural frequency for the whole
    /// pipeline even while the true CoM height rides the active slope.
    pub z_tilde_nom: f64,
    /// Natural frequency `sqrt(g / z_tilde_nom)` in 1/s.
    pub omega: f64,
    /// Blend coefficient in [0, 1] converting centroidal angular momentum into
    /// equivalent CoM velocity.
    pub alpha: f64,
    /// Lateral distance between the feet in m (stance width).
    pub stance_width: f64,
    /// Sign convention for the lateral momentum term.
    pub cam_y_convention: CamYConvention,
}

impl PendulumParams {
    pub fn new(mass: f64, z_tilde_nom: f64, alpha: f64) -> Result<Self, ModelError> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(ModelError::InvalidParameter(format!("mass {mass} must be positive")));
        }
        if !(z_tilde_nom.is_finite() && z_tilde_nom > 0.0) {
            return Err(ModelError::InvalidParameter(format!(
                "pendulum height {z_tilde_nom} must be positive"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(ModelError::InvalidParameter(format!("alpha {alpha} outside [0, 1]")));
        }
        Ok(Self {
            mass,
            z_tilde_nom,
            omega: (GRAVITY / z_tilde_nom).sqrt(),
            alpha,
            stance_width: 0.2,
            cam_y_convention: CamYConvention::Standard,
        })
    }

    /// Table of defaults used throughout: 44.9 kg, 0.78 m pendulum height,
    /// 0.2 m stance width.
    pub fn default_robot(alpha: f64) -> Result<Self, ModelError> {
        Self::new(44.9, 0.78, alpha)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(ModelError::InvalidParameter(format!("alpha {alpha} outside [0, 1]")));
        }
        self.alpha = alpha;
        Ok(self)
    }
}

/// Support pivot of the pendulum, in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactPoint {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    pub side: Side,
}

impl ContactPoint {
    pub fn new(sx: f64, sy: f64, sz: f64, side: Side) -> Self {
        Self { sx, sy, sz, side }
    }
}

/// Effective CoM velocity with the angular-momentum contribution blended in:
/// `vx_eff = vx + α·Ly/(m·z)` and `vy_eff = vy - α·Lx/(m·z)` under the
/// standard convention.
pub fn galip_velocity(state: &ComState, params: &PendulumParams) -> (f64, f64) {
    let mz = params.mass * state.z;
    let vx_t = state.vx + params.alpha * state.lcom_y / mz;
    let sign = match params.cam_y_convention {
        CamYConvention::Standard => -1.0,
        CamYConvention::Mirrored => 1.0,
    };
    let vy_t = state.vy + sign * params.alpha * state.lcom_x / mz;
    (vx_t, vy_t)
}

/// Closed-form pendulum flow over `t` seconds about `contact`, on the plane
/// with gradient `gradient`.
///
/// The horizontal coordinates advance with the effective (momentum-blended)
/// velocity:
/// `x(t) - Sx = (x0 - Sx)·cosh(ωt) + (vx_eff0/ω)·sinh(ωt)`.
/// Height integrates the plane constraint `vz = kx·vx + ky·vy` from the
/// state's own height; angular momentum is carried unchanged (its decay is a
/// simulator concern). The momentum/velocity split at the output reuses the
/// initial height.
pub fn com_flow(
    state: &ComState,
    contact: &ContactPoint,
    gradient: SlopeGradient,
    params: &PendulumParams,
    t: f64,
) -> ComState {
    let omega = params.omega;
    let (ch, sh) = (f64::cosh(omega * t), f64::sinh(omega * t));
    let (vx_t0, vy_t0) = galip_velocity(state, params);

    let ux0 = state.x - contact.sx;
    let uy0 = state.y - contact.sy;
    let ux = ux0 * ch + vx_t0 / omega * sh;
    let uy = uy0 * ch + vy_t0 / omega * sh;
    let vx_t = ux0 * omega * sh + vx_t0 * ch;
    let vy_t = uy0 * omega * sh + vy_t0 * ch;

    let mz = params.mass * state.z;
    let vx = vx_t - params.alpha * state.lcom_y / mz;
    let sign = match params.cam_y_convention {
        CamYConvention::Standard => -1.0,
        CamYConvention::Mirrored => 1.0,
    };
    let vy = vy_t - sign * params.alpha * state.lcom_x / mz;

    let x = contact.sx + ux;
    let y = contact.sy + uy;
    let z = state.z + gradient.kx() * (x - state.x) + gradient.ky() * (y - state.y);
    let vz = gradient.kx() * vx + gradient.ky() * vy;

    ComState {
        x,
        y,
        z,
        vx,
        vy,
        vz,
        lcom_x: state.lcom_x,
        lcom_y: state.lcom_y,
    }
}

/// Vertical velocity jump at a slope transition:
/// `Δvz = ((kx⁺-kx⁻)·vx⁻ + (ky⁺-ky⁻)·vy⁻) / (1 - kx⁺·x/z - ky⁺·y/z)`
/// with `x`, `y`, `z` relative to the contact.
pub fn delta_z_dot(
    state: &ComState,
    g_pre: SlopeGradient,
    g_post: SlopeGradient,
    contact: &ContactPoint,
) -> Result<f64, ModelError> {
    let x = state.x - contact.sx;
    let y = state.y - contact.sy;
    let z = state.z - contact.sz;
    if z <= 1e-9 {
        return Err(ModelError::SingularTransition { denominator: z });
    }
    let denominator = 1.0 - g_post.kx() * x / z - g_post.ky() * y / z;
    if denominator.abs() <= 1e-6 {
        return Err(ModelError::SingularTransition { denominator });
    }
    let numerator =
        (g_post.kx() - g_pre.kx()) * state.vx + (g_post.ky() - g_pre.ky()) * state.vy;
    Ok(numerator / denominator)
}

/// Instantaneous velocity reset when the CoM crosses from the `g_pre` slope
/// to the `g_post` slope:
/// `vx⁺ = (x/z)·Δvz + vx⁻`, `vy⁺ = (y/z)·Δvz + vy⁻`, `vz⁺ = vz⁻ + Δvz`.
///
/// Positions and angular momentum are unchanged. The map conserves angular
/// momentum about the contact (`m(z·vx - x·vz)` and `m(y·vz - z·vy)`), and
/// the post state satisfies the outgoing slope constraint exactly.
pub fn reset_map(
    state: &ComState,
    g_pre: SlopeGradient,
    g_post: SlopeGradient,
    contact: &ContactPoint,
) -> Result<ComState, ModelError> {
    if g_pre == g_post {
        return Ok(*state);
    }
    let pre_residual = state.vz - g_pre.kx() * state.vx - g_pre.ky() * state.vy;
    if pre_residual.abs() > PRE_SLOPE_TOLERANCE {
        return Err(ModelError::PreSlopeViolation { residual: pre_residual });
    }
    let dz = delta_z_dot(state, g_pre, g_post, contact)?;
    let x = state.x - contact.sx;
    let y = state.y - contact.sy;
    let z = state.z - contact.sz;
    Ok(ComState {
        vx: state.vx + x / z * dz,
        vy: state.vy + y / z * dz,
        vz: state.vz + dz,
        ..*state
    })
}

/// Signed distance of the state from the guard surface: the plane with the
/// outgoing gradient anchored at the contact, offset vertically by the
/// pendulum height `z_tilde`.
pub fn guard_value(
    state: &ComState,
    g_post: SlopeGradient,
    z_tilde: f64,
    contact: &ContactPoint,
) -> f64 {
    state.z
        - (contact.sz
            + g_post.kx() * (state.x - contact.sx)
            + g_post.ky() * (state.y - contact.sy)
            + z_tilde)
}

/// True when the state lies on the guard surface within [`GUARD_TOLERANCE`].
pub fn guard_check(
    state: &ComState,
    g_post: SlopeGradient,
    z_tilde: f64,
    contact: &ContactPoint,
) -> bool {
    guard_value(state, g_post, z_tilde, contact).abs() <= GUARD_TOLERANCE
}
