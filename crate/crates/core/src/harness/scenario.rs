//! Scenario files.
//!
//! TOML with a fixed set of sections (`object`, `gripper`, `contact`,
//! `stiffness_profile`, `schedule`, `simulation`) and a top-level
//! `schema_version`. Unknown keys are rejected. Optional values are filled in
//! on load, and [`Scenario::to_toml`] writes every resolved value back out so
//! a saved scenario reloads to an equal one.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::compliance::{StiffnessProfile, DEFAULT_HEIGHTS};
use crate::contact::{self, ContactParams, DEFAULT_V_EPS};
use crate::dynamics::{DEFAULT_DT, MAX_DT};
use crate::error::{ensure, Error, Result};
use crate::model::{kgcm_to_nm, BodyState, GripperConfig, ObjectSpec, Shape, DEFAULT_FINGER_HEIGHT};
use crate::schedule::{BeltSchedule, Segment};

pub const SCHEMA_VERSION: u32 = 1;

/// Motor torque limit when none is given, kg·cm.
pub const DEFAULT_TORQUE_KGCM: f64 = 3.4;
/// Motor shaft to contact distance when none is given, m.
pub const DEFAULT_LEVER_ARM: f64 = 0.05965;
pub const DEFAULT_BELT_SPEED_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub object: ObjectSpec,
    pub gripper: GripperConfig,
    pub contact: ContactParams,
    pub initial: BodyState,
    pub schedule: BeltSchedule,
    pub dt: f64,
    pub t_end: f64,
    /// Keep every n-th step in logged trajectories.
    pub decimation: usize,
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        object: ObjectSpec,
        gripper: GripperConfig,
        contact: ContactParams,
        initial: BodyState,
        schedule: BeltSchedule,
        dt: f64,
        t_end: f64,
        decimation: usize,
    ) -> Result<Self> {
        gripper.validate()?;
        schedule.check_speed_limit(gripper.belt_speed_limit)?;
        ensure(dt > 0.0 && dt <= MAX_DT, || format!("dt in (0, {MAX_DT}] violated (dt = {dt})"))?;
        ensure(t_end.is_finite() && t_end >= schedule.total_duration() - 1e-12, || {
            format!(
                "t_end >= schedule duration violated (t_end = {t_end}, schedule = {})",
                schedule.total_duration()
            )
        })?;
        ensure(decimation >= 1, || "decimation >= 1 violated".into())?;
        initial.validate()?;
        let (lo, hi) = gripper.contact_range();
        ensure(initial.x >= lo && initial.x <= hi, || {
            format!("initial height within [h1, h4] violated (x = {}, range [{lo}, {hi}])", initial.x)
        })?;
        let touching = contact::penetration(&object, &gripper)? > 0.0;
        Ok(Self {
            object,
            gripper,
            contact,
            initial: BodyState {
                in_contact: (touching, touching),
                ..initial
            },
            schedule,
            dt,
            t_end,
            decimation,
        })
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.message().to_string()))?;
        file.resolve()
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&ScenarioFile::from(self)).expect("scenario serializes")
    }

    /// Copy with a different schedule and horizon; the horizon is stretched to cover the schedule.
    pub fn with_schedule(&self, schedule: BeltSchedule, t_end: f64) -> Result<Self> {
        let t_end = t_end.max(schedule.total_duration());
        Self::new(
            self.object,
            self.gripper.clone(),
            self.contact,
            self.initial,
            schedule,
            self.dt,
            t_end,
            self.decimation,
        )
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scenario::from_toml(&text)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    schema_version: u32,
    object: ObjectSection,
    gripper: GripperSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    contact: Option<ContactSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stiffness_profile: Option<StiffnessSection>,
    simulation: SimulationSection,
    #[serde(default)]
    schedule: Vec<SegmentSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectSection {
    shape: Shape,
    /// kg
    mass: f64,
    /// m
    length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    inertia: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    friction: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GripperSection {
    gap: f64,
    mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    finger_height: Option<f64>,
    /// N·m
    #[serde(default, skip_serializing_if = "Option::is_none")]
    torque_limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    torque_limit_kgcm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lever_arm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    belt_speed_limit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pulley_radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContactSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v_eps: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StiffnessSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angles: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    heights: Option<Vec<f64>>,
    /// N/mm, one row per angle
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale_45: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    scale_90: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentSection {
    duration: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v_left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v_right: Option<f64>,
    /// rad/s, needs gripper.pulley_radius
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega_left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega_right: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationSection {
    initial_height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_velocity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decimation: Option<usize>,
}

fn exactly_one(name: &str, a: Option<f64>, b: Option<f64>, a_name: &str, b_name: &str) -> Result<Option<f64>> {
    match (a, b) {
        (Some(_), Some(_)) => Err(Error::Parse(format!("{name}: give only one of `{a_name}` and `{b_name}`"))),
        (x, None) | (None, x) => Ok(x),
    }
}

impl ScenarioFile {
    fn resolve(self) -> Result<Scenario> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }

        let o = &self.object;
        let radius = match (o.radius, o.shape.radius_from_length()) {
            (Some(r), _) => r,
            (None, true) => o.length / 2.0,
            (None, false) => {
                return Err(Error::Parse(format!("object: `radius` is required for shape {:?}", o.shape)))
            }
        };
        let mut object = ObjectSpec::new(o.shape, o.mass, radius, o.length, o.inertia)?;
        if let Some(mu) = o.friction {
            object = object.with_friction(mu)?;
        }

        let stiffness = match self.stiffness_profile {
            None => StiffnessProfile::default(),
            Some(s) => match s.k {
                Some(k) => {
                    if s.scale_45.is_some() || s.scale_90.is_some() {
                        return Err(Error::Parse(
                            "stiffness_profile: `scale_45`/`scale_90` only apply to the built-in table".into(),
                        ));
                    }
                    let angles = s.angles.ok_or_else(|| Error::Parse("stiffness_profile: `angles` required with `k`".into()))?;
                    let heights = s.heights.ok_or_else(|| Error::Parse("stiffness_profile: `heights` required with `k`".into()))?;
                    StiffnessProfile::new(angles, heights, k)?
                }
                None => {
                    if s.angles.is_some() {
                        return Err(Error::Parse("stiffness_profile: `angles` requires `k`".into()));
                    }
                    let heights = match s.heights {
                        None => DEFAULT_HEIGHTS,
                        Some(h) => h.try_into().map_err(|h: Vec<f64>| {
                            Error::Parse(format!("stiffness_profile: built-in table needs 4 heights, got {}", h.len()))
                        })?,
                    };
                    StiffnessProfile::measured(heights, s.scale_45.unwrap_or(1.0), s.scale_90.unwrap_or(1.0))?
                }
            },
        };

        let g = &self.gripper;
        let tau_m = exactly_one("gripper", g.torque_limit, g.torque_limit_kgcm.map(kgcm_to_nm), "torque_limit", "torque_limit_kgcm")?
            .unwrap_or_else(|| kgcm_to_nm(DEFAULT_TORQUE_KGCM));
        let gripper = GripperConfig {
            gap: g.gap,
            finger_height: g.finger_height.unwrap_or(DEFAULT_FINGER_HEIGHT),
            mu_bo: g.mu,
            tau_m,
            lever_arm: g.lever_arm.unwrap_or(DEFAULT_LEVER_ARM),
            belt_speed_limit: g.belt_speed_limit.unwrap_or(DEFAULT_BELT_SPEED_LIMIT),
            pulley_radius: g.pulley_radius,
            stiffness,
        };
        gripper.validate()?;

        let v_eps = self.contact.and_then(|c| c.v_eps).unwrap_or(DEFAULT_V_EPS);
        let contact = ContactParams::for_grasp(&object, &gripper, v_eps)?;

        let segments = self
            .schedule
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let speed = |v: Option<f64>, w: Option<f64>, side: &str| -> Result<f64> {
                    let w = match (w, gripper.pulley_radius) {
                        (Some(_), None) => {
                            return Err(Error::Parse(format!(
                                "schedule[{i}]: `omega_{side}` needs gripper.pulley_radius"
                            )))
                        }
                        (w, Some(rp)) => w.map(|w| w * rp),
                        (None, None) => None,
                    };
                    exactly_one(&format!("schedule[{i}]"), v, w, &format!("v_{side}"), &format!("omega_{side}"))?
                        .ok_or_else(|| Error::Parse(format!("schedule[{i}]: missing `v_{side}`")))
                };
                Ok(Segment {
                    duration: s.duration,
                    v_left: speed(s.v_left, s.omega_left, "left")?,
                    v_right: speed(s.v_right, s.omega_right, "right")?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let schedule = BeltSchedule::new(segments)?;

        let sim = &self.simulation;
        let initial = BodyState {
            x: sim.initial_height,
            v: sim.initial_velocity.unwrap_or(0.0),
            alpha: sim.initial_alpha.unwrap_or(0.0),
            omega: sim.initial_omega.unwrap_or(0.0),
            in_contact: (false, false),
        };
        let t_end = sim.t_end.unwrap_or_else(|| schedule.total_duration());
        Scenario::new(
            object,
            gripper,
            contact,
            initial,
            schedule,
            sim.dt.unwrap_or(DEFAULT_DT),
            t_end,
            sim.decimation.unwrap_or(1),
        )
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        let o = &s.object;
        let g = &s.gripper;
        let p = &g.stiffness;
        Self {
            schema_version: SCHEMA_VERSION,
            object: ObjectSection {
                shape: o.shape(),
                mass: o.mass(),
                length: o.length(),
                radius: Some(o.radius()),
                inertia: o.inertia_is_explicit().then_some(o.inertia()),
                friction: o.friction_override(),
            },
            gripper: GripperSection {
                gap: g.gap,
                mu: g.mu_bo,
                finger_height: Some(g.finger_height),
                torque_limit: Some(g.tau_m),
                torque_limit_kgcm: None,
                lever_arm: Some(g.lever_arm),
                belt_speed_limit: Some(g.belt_speed_limit),
                pulley_radius: g.pulley_radius,
            },
            contact: Some(ContactSection {
                v_eps: Some(s.contact.v_eps),
            }),
            stiffness_profile: Some(StiffnessSection {
                angles: Some(p.angles().to_vec()),
                heights: Some(p.heights().to_vec()),
                k: Some(p.values().to_vec()),
                scale_45: None,
                scale_90: None,
            }),
            simulation: SimulationSection {
                initial_height: s.initial.x,
                initial_velocity: Some(s.initial.v),
                initial_alpha: Some(s.initial.alpha),
                initial_omega: Some(s.initial.omega),
                dt: Some(s.dt),
                t_end: Some(s.t_end),
                decimation: Some(s.decimation),
            },
            schedule: s
                .schedule
                .segments()
                .iter()
                .map(|seg| SegmentSection {
                    duration: seg.duration,
                    v_left: Some(seg.v_left),
                    v_right: Some(seg.v_right),
                    omega_left: None,
                    omega_right: None,
                })
                .collect(),
        }
    }
}
