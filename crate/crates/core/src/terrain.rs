//! Stepping-stone layouts, pivot-adjusted footholds, virtual-slope synthesis
//! and seeded scenario generation.
//!
//! The planner and simulator pivot the pendulum about the *adjusted*
//! foothold: the desired foot position shifted laterally by half the stance
//! width toward the gait centerline (`S̃ = S + [0, W_{l/r}/2, 0]`). Virtual
//! slopes connect consecutive adjusted footholds, so a line of stones turns
//! into an ordinary alternating-gait geometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Side, SlopeGradient};

/// One rigid stepping stone: a flat rectangular pad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteppingStone {
    /// Center of the walking surface, world frame (z is the surface height).
    pub center: [f64; 3],
    /// Rotation about the world z axis in rad.
    pub yaw: f64,
    /// Half extents of the pad in its own frame, in m.
    pub half_extents: [f64; 2],
}

impl SteppingStone {
    pub const DEFAULT_HALF_EXTENTS: [f64; 2] = [0.10, 0.07];
}

/// A desired foot placement, tied to one stone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Foothold {
    pub position: [f64; 3],
    pub side: Side,
}

/// Ordered stones plus the desired foothold sequence (one per stone, at the
/// stone center, sides alternating).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoneLayout {
    pub stones: Vec<SteppingStone>,
    pub desired_footholds: Vec<Foothold>,
}

impl StoneLayout {
    pub fn len(&self) -> usize {
        self.desired_footholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.desired_footholds.is_empty()
    }

    /// Pivot-space desired position of foothold `i` for stance width `w`.
    pub fn adjusted_desired(&self, i: usize, w: f64) -> [f64; 3] {
        let f = &self.desired_footholds[i];
        adjusted_foothold(f.position, f.side, w)
    }

    /// Virtual slope segments between consecutive adjusted footholds.
    pub fn virtual_slopes(&self, w: f64) -> Vec<VirtualSlopeSegment> {
        (0..self.len().saturating_sub(1))
            .map(|i| virtual_slope(self.adjusted_desired(i, w), self.adjusted_desired(i + 1, w)))
            .collect()
    }
}

/// Adjusted foothold shifted toward the gait centerline by half the signed
/// stance width of its support side.
pub fn adjusted_foothold(desired: [f64; 3], side: Side, w: f64) -> [f64; 3] {
    [desired[0], desired[1] + side.signed_width(w) / 2.0, desired[2]]
}

/// Inclined virtual surface between two adjusted footholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VirtualSlopeSegment {
    pub s_adj_from: [f64; 3],
    pub s_adj_to: [f64; 3],
    pub p_vec: [f64; 3],
    pub gradient: SlopeGradient,
}

/// Builds the virtual slope for a foothold pair:
/// `kx = Px·Pz/(Px²+Pz²)`, `ky = Py·Pz/(Py²+Pz²)`, each zero when its plane
/// projection is degenerate. Both gradients are bounded by 1/2 in magnitude,
/// so construction cannot fail.
pub fn virtual_slope(s_adj_from: [f64; 3], s_adj_to: [f64; 3]) -> VirtualSlopeSegment {
    let p = [
        s_adj_to[0] - s_adj_from[0],
        s_adj_to[1] - s_adj_from[1],
        s_adj_to[2] - s_adj_from[2],
    ];
    let comp = |ph: f64, pz: f64| {
        let denom = ph * ph + pz * pz;
        if denom == 0.0 {
            0.0
        } else {
            ph * pz / denom
        }
    };
    VirtualSlopeSegment {
        s_adj_from,
        s_adj_to,
        p_vec: p,
        gradient: SlopeGradient::new(comp(p[0], p[2]), comp(p[1], p[2]))
            .expect("virtual slope gradients are bounded by 1/2"),
    }
}

/// Gradients flanking the transition that occurs while standing on foothold
/// `i`: the incoming segment `i-1` and the outgoing segment `i`. Indices past
/// either end repeat the nearest segment (walk-in/walk-out extension).
pub fn gradient_pair(segments: &[VirtualSlopeSegment], i: usize) -> (SlopeGradient, SlopeGradient) {
    assert!(!segments.is_empty(), "gradient_pair needs at least one segment");
    let pre = if i == 0 { segments[0].gradient } else { segments[(i - 1).min(segments.len() - 1)].gradient };
    let post = segments.get(i).map(|s| s.gradient).unwrap_or(segments[segments.len() - 1].gradient);
    (pre, post)
}

/// Elevation pattern applied on top of the nominal stone grid.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElevationPattern {
    #[default]
    None,
    /// Alternating `+amplitude` / `-amplitude` on consecutive stones.
    Periodic { amplitude: f64 },
    /// Independent uniform draw from `[-amplitude, amplitude]` per stone.
    Random { amplitude: f64 },
}

/// Uniform per-axis disturbance ranges in m, applied independently per stone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceRanges {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

impl Default for DisturbanceRanges {
    fn default() -> Self {
        Self { x: [0.0, 0.0], y: [0.0, 0.0], z: [0.0, 0.0] }
    }
}

impl DisturbanceRanges {
    pub fn is_zero(&self) -> bool {
        self.x == [0.0, 0.0] && self.y == [0.0, 0.0] && self.z == [0.0, 0.0]
    }

    fn well_ordered(&self) -> bool {
        self.x[0] <= self.x[1] && self.y[0] <= self.y[1] && self.z[0] <= self.z[1]
    }
}

/// Constant external force applied to the CoM over a time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Push {
    pub t_start: f64,
    /// Force in N; the vertical component has no effect on the reduced model.
    pub force: [f64; 3],
    pub duration: f64,
}

/// Instantaneous injection of centroidal angular momentum, in kg·m²/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CamImpulse {
    pub t: f64,
    pub lx: f64,
    pub ly: f64,
}

/// Terrain and disturbance description for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Nominal offset between consecutive stone centers, in m.
    pub p_init: [f64; 3],
    /// Yaw applied as +/- on alternating stones, in rad.
    pub yaw_step: f64,
    pub disturbance: DisturbanceRanges,
    pub elevation: ElevationPattern,
    pub n_stones: usize,
    pub seed: u64,
    /// Support side of the first foothold.
    pub first_side: Side,
    pub pushes: Vec<Push>,
    pub cam_impulses: Vec<CamImpulse>,
    /// When false, the planner's predicted slope-transition jumps are zeroed
    /// (plain-pendulum comparison mode). The simulated physics are unchanged.
    pub pslip_enabled: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            p_init: [0.2, 0.0, 0.0],
            yaw_step: 0.0,
            disturbance: DisturbanceRanges::default(),
            elevation: ElevationPattern::None,
            n_stones: 20,
            seed: 0,
            first_side: Side::Right,
            pushes: Vec::new(),
            cam_impulses: Vec::new(),
            pslip_enabled: true,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_stones < 2 {
            return Err(format!("n_stones {} must be at least 2", self.n_stones));
        }
        if !self.disturbance.well_ordered() {
            return Err("disturbance ranges must be well ordered (lo <= hi)".into());
        }
        for p in &self.pushes {
            if p.duration <= 0.0 || p.t_start < 0.0 {
                return Err("pushes need t_start >= 0 and duration > 0".into());
            }
        }
        Ok(())
    }
}

/// Deterministic layout generation. Stone `i` sits at `i·p_init` plus an
/// independent disturbance draw and the elevation pattern; yaw alternates
/// `±yaw_step`. Identical `(config, seed)` always produce identical layouts.
pub fn generate_scenario(config: &ScenarioConfig) -> StoneLayout {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let draw = |range: [f64; 2], rng: &mut ChaCha8Rng| -> f64 {
        if range[0] == range[1] {
            range[0]
        } else {
            rng.gen_range(range[0]..range[1])
        }
    };
    let mut stones = Vec::with_capacity(config.n_stones);
    let mut footholds = Vec::with_capacity(config.n_stones);
    for i in 0..config.n_stones {
        let fi = i as f64;
        let mut center = [
            fi * config.p_init[0] + draw(config.disturbance.x, &mut rng),
            fi * config.p_init[1] + draw(config.disturbance.y, &mut rng),
            fi * config.p_init[2] + draw(config.disturbance.z, &mut rng),
        ];
        match config.elevation {
            ElevationPattern::None => {}
            ElevationPattern::Periodic { amplitude } => {
                center[2] += if i % 2 == 0 { amplitude } else { -amplitude };
            }
            ElevationPattern::Random { amplitude } => {
                if amplitude != 0.0 {
                    center[2] += rng.gen_range(-amplitude..amplitude);
                }
            }
        }
        let yaw = if config.yaw_step == 0.0 {
            0.0
        } else if i % 2 == 0 {
            config.yaw_step
        } else {
            -config.yaw_step
        };
        let side = if i % 2 == 0 { config.first_side } else { config.first_side.other() };
        stones.push(SteppingStone {
            center,
            yaw,
            half_extents: SteppingStone::DEFAULT_HALF_EXTENTS,
        });
        footholds.push(Foothold { position: center, side });
    }
    StoneLayout { stones, desired_footholds: footholds }
}

/// Point-in-stone test in the horizontal plane, boundary inclusive (with a
/// nanometer slack so exact corners survive rounding).
pub fn stone_contains(stone: &SteppingStone, point_xy: [f64; 2]) -> bool {
    let dx = point_xy[0] - stone.center[0];
    let dy = point_xy[1] - stone.center[1];
    let (s, c) = stone.yaw.sin_cos();
    let local_x = c * dx + s * dy;
    let local_y = -s * dx + c * dy;
    local_x.abs() <= stone.half_extents[0] + 1e-9 && local_y.abs() <= stone.half_extents[1] + 1e-9
}
