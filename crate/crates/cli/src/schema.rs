//! Scenario file format: a strict JSON document mirroring the library
//! configuration structs, with defaults applied for absent optional fields
//! and unknown keys rejected.

use serde::{Deserialize, Serialize};

use crate::CliError;
use stonewalk_core::model::{CamYConvention, PendulumParams};
use stonewalk_core::planner::PlannerConfig;
use stonewalk_core::sim::SimConfig;
use stonewalk_core::terrain::{ElevationPattern, Push, ScenarioConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Robot parameters as written in scenario files; the natural frequency is
/// derived, never stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PendulumSpec {
    pub mass: f64,
    pub z_tilde_nom: f64,
    pub alpha: f64,
    pub stance_width: f64,
    pub cam_y_convention: CamYConvention,
}

impl Default for PendulumSpec {
    fn default() -> Self {
        Self {
            mass: 44.9,
            z_tilde_nom: 0.78,
            alpha: 0.0,
            stance_width: 0.2,
            cam_y_convention: CamYConvention::Standard,
        }
    }
}

impl PendulumSpec {
    pub fn build(&self) -> Result<PendulumParams, CliError> {
        let mut p = PendulumParams::new(self.mass, self.z_tilde_nom, self.alpha)
            .map_err(|e| CliError::Config(e.to_string()))?;
        p.stance_width = self.stance_width;
        p.cam_y_convention = self.cam_y_convention;
        Ok(p)
    }
}

/// One complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub scenario: ScenarioConfig,
    pub sim: SimConfig,
    pub pendulum: PendulumSpec,
    pub planner: PlannerConfig,
}

impl ScenarioFile {
    pub fn resolve(
        &self,
    ) -> Result<(ScenarioConfig, SimConfig, PendulumParams, PlannerConfig), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        self.scenario.validate().map_err(CliError::Config)?;
        self.sim.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.planner.validate().map_err(CliError::Config)?;
        Ok((self.scenario.clone(), self.sim, self.pendulum.build()?, self.planner))
    }
}

/// Strict parse: unknown keys anywhere are an error.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

pub fn to_json(file: &ScenarioFile) -> String {
    serde_json::to_string_pretty(file).expect("scenario files always serialize")
}

/// Applies a dotted-path override (`sim.dt=0.0005`) onto the serialized form
/// and re-parses strictly, so misspelled paths fail loudly.
pub fn apply_override(file: &ScenarioFile, key: &str, value: &str) -> Result<ScenarioFile, CliError> {
    let mut doc = serde_json::to_value(file).expect("scenario files always serialize");
    let parts: Vec<&str> = key.split('.').collect();
    let (last, parents) = parts.split_last().expect("split always yields one part");
    let pointer: String = parents.iter().map(|p| format!("/{p}")).collect();
    let parent = if pointer.is_empty() {
        &mut doc
    } else {
        doc.pointer_mut(&pointer).ok_or_else(|| {
            CliError::Config(format!("override path {key} does not exist"))
        })?
    };
    let map = parent.as_object_mut().ok_or_else(|| {
        CliError::Config(format!("override path {key} does not address an object"))
    })?;
    if !map.contains_key(*last) {
        return Err(CliError::Config(format!("override path {key} has no field {last}")));
    }
    let parsed: serde_json::Value =
        serde_json::from_str(value).unwrap_or(serde_json::Value::String(value.to_string()));
    map.insert((*last).to_string(), parsed);
    serde_json::from_value(doc).map_err(|e| CliError::Config(e.to_string()))
}

/// Parses a push specification of the form `t=6,fx=-50,dur=0.3` (optional
/// `fy` and `fz` components).
pub fn parse_push(spec: &str) -> Result<Push, CliError> {
    let mut t = None;
    let mut f = [0.0, 0.0, 0.0];
    let mut dur = None;
    for field in spec.split(',') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("push field `{field}` is not key=value")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("push field `{field}` has a non-numeric value")))?;
        match key.trim() {
            "t" => t = Some(value),
            "fx" => f[0] = value,
            "fy" => f[1] = value,
            "fz" => f[2] = value,
            "dur" => dur = Some(value),
            other => return Err(CliError::Config(format!("unknown push field `{other}`"))),
        }
    }
    Ok(Push {
        t_start: t.ok_or_else(|| CliError::Config("push needs t=<s>".into()))?,
        force: f,
        duration: dur.ok_or_else(|| CliError::Config("push needs dur=<s>".into()))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    A,
    B,
    C,
}

impl Preset {
    pub fn all() -> [Preset; 3] {
        [Preset::A, Preset::B, Preset::C]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::A => "a",
            Preset::B => "b",
            Preset::C => "c",
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Preset::A => "periodic elevation: 0.2 m spacing, stones alternating +/-0.17 m in z",
            Preset::B => {
                "random 3d: 0.2 m spacing climbing 0.10 m per stone, yaw +/-0.2 rad, \
                 xy disturbance U[-2.5,2.5] cm, z disturbance U[-5,5] cm"
            }
            Preset::C => {
                "flat with pushes: 0.2 m spacing, -50 N backward at 6 s and +60 N forward \
                 at 10 s, 0.3 s each"
            }
        }
    }

    pub fn file(&self) -> ScenarioFile {
        let scenario = match self {
            Preset::A => ScenarioConfig {
                elevation: ElevationPattern::Periodic { amplitude: 0.17 },
                n_stones: 50,
                ..Default::default()
            },
            Preset::B => ScenarioConfig {
                p_init: [0.2, 0.0, 0.10],
                yaw_step: 0.2,
                disturbance: stonewalk_core::terrain::DisturbanceRanges {
                    x: [-0.025, 0.025],
                    y: [-0.025, 0.025],
                    z: [-0.05, 0.05],
                },
                n_stones: 30,
                ..Default::default()
            },
            Preset::C => ScenarioConfig {
                n_stones: 60,
                pushes: vec![
                    Push { t_start: 6.0, force: [-50.0, 0.0, 0.0], duration: 0.3 },
                    Push { t_start: 10.0, force: [60.0, 0.0, 0.0], duration: 0.3 },
                ],
                ..Default::default()
            },
        };
        let max_steps = scenario.n_stones.saturating_sub(2);
        ScenarioFile {
            schema_version: SCHEMA_VERSION,
            scenario,
            sim: SimConfig { max_steps, ..Default::default() },
            pendulum: PendulumSpec::default(),
            planner: PlannerConfig::default(),
        }
    }
}

pub fn preset_by_name(name: &str) -> Option<ScenarioFile> {
    let short = name.strip_prefix("scenario-").unwrap_or(name);
    Preset::all()
        .into_iter()
        .find(|p| p.name() == short)
        .map(|p| p.file())
}

pub fn preset_listing() -> String {
    let mut out = String::from("built-in scenarios:\n");
    for p in Preset::all() {
        let f = p.file();
        out.push_str(&format!(
            "  {:<2} {}\n     p_init [{:.2}, {:.2}, {:.2}] m, {} stones, seed {}\n",
            p.name(),
            p.describe(),
            f.scenario.p_init[0],
            f.scenario.p_init[1],
            f.scenario.p_init[2],
            f.scenario.n_stones,
            f.scenario.seed,
        ));
        for push in &f.scenario.pushes {
            out.push_str(&format!(
                "     push at {:.1} s: [{:.0}, {:.0}, {:.0}] N for {:.1} s\n",
                push.t_start, push.force[0], push.force[1], push.force[2], push.duration
            ));
        }
    }
    out
}
