//! Reduced-order bipedal gait planning and closed-loop simulation over
//! uneven stepping stones.
//!
//! The library models the walking robot as a point-mass linear inverted
//! pendulum whose support surface is a sequence of virtual inclined planes
//! synthesized from the stone layout. Slope changes inside a step induce an
//! instantaneous velocity reset that conserves angular momentum about the
//! support pivot. Centroidal angular momentum is carried as extra state and
//! blended into an effective CoM velocity by a coefficient `alpha`, which
//! interpolates between the plain pendulum (`alpha = 0`) and the full
//! angular-momentum pendulum (`alpha = 1`).
//!
//! Modules:
//! - [`model`]: continuous pendulum flow, slope-transition reset map, guard set
//! - [`dcm`]: divergent component of motion, nominal periodic orbit, step-to-step map
//! - [`terrain`]: stepping-stone layouts, virtual slopes, scenario generation
//! - [`planner`]: MPC over step positions and step durations
//! - [`sim`]: deterministic closed-loop simulator with pushes and momentum injections

pub mod dcm;
pub mod model;
pub mod planner;
pub mod sim;
pub mod terrain;

pub use dcm::{DcmState, NominalOrbit};
pub use model::{CamYConvention, ComState, ContactPoint, ModelError, PendulumParams, Side, SlopeGradient};
pub use planner::{MpcProblem, MpcSolution, PlannerConfig, StepCommand};
pub use sim::{SimConfig, SimTrace, StepEvent};
pub use terrain::{CamImpulse, Push, ScenarioConfig, SteppingStone, StoneLayout, VirtualSlopeSegment};
