//! Shared domain types and unit conventions.
//!
//! Everything is SI internally. The only non-SI quantities that cross the
//! boundary are motor torque in kg·cm (converted once, see [`kgcm_to_nm`])
//! and stiffness in N/mm with penetration in mm, which the compliance module
//! keeps in the units the finger was characterized in.

use serde::{Deserialize, Serialize};

use crate::compliance::StiffnessProfile;
use crate::error::{ensure, Error, Result};

/// Gravitational acceleration used by the dynamics, m/s².
pub const GRAVITY: f64 = 9.81;

/// Standard gravity, the constant that defines the kilogram-force.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// 1 kg·cm expressed in N·m.
pub const NM_PER_KGCM: f64 = 0.0980665;

/// Height of the soft finger, m.
pub const DEFAULT_FINGER_HEIGHT: f64 = 0.125;

pub fn kgcm_to_nm(torque_kgcm: f64) -> f64 {
    torque_kgcm * NM_PER_KGCM
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Cube,
    Cylinder,
    Sphere,
    IrregularConvexProfile,
}

impl Shape {
    /// Whether the contact half-width can be derived from the published length.
    pub fn radius_from_length(self) -> bool {
        matches!(self, Shape::Cube | Shape::Sphere)
    }
}

/// Standard-formula moment of inertia about the grip axis.
///
/// Sphere `2/5·m·r²`, cylinder about its long axis `1/2·m·r²`, cube with side
/// `s = 2r` `1/6·m·s²`. Irregular profiles have no closed form.
pub fn auto_inertia(shape: Shape, mass: f64, radius: f64) -> Result<f64> {
    ensure(mass > 0.0 && mass.is_finite(), || format!("m_c > 0 violated (mass = {mass})"))?;
    ensure(radius > 0.0 && radius.is_finite(), || format!("r > 0 violated (radius = {radius})"))?;
    match shape {
        Shape::Sphere => Ok(0.4 * mass * radius * radius),
        Shape::Cylinder => Ok(0.5 * mass * radius * radius),
        Shape::Cube => {
            let side = 2.0 * radius;
            Ok(mass * side * side / 6.0)
        }
        Shape::IrregularConvexProfile => Err(Error::InertiaRequired),
    }
}

/// The grasped body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectSpec {
    shape: Shape,
    mass: f64,
    radius: f64,
    length: f64,
    inertia: f64,
    inertia_explicit: bool,
    friction_override: Option<f64>,
}

impl ObjectSpec {
    /// Builds an object, computing the inertia from its shape when `inertia` is `None`.
    pub fn new(
        shape: Shape,
        mass: f64,
        radius: f64,
        length: f64,
        inertia: Option<f64>,
    ) -> Result<Self> {
        ensure(mass > 0.0 && mass.is_finite(), || format!("m_c > 0 violated (mass = {mass})"))?;
        ensure(radius > 0.0 && radius.is_finite(), || format!("r > 0 violated (radius = {radius})"))?;
        ensure(length > 0.0 && length.is_finite(), || format!("length > 0 violated (length = {length})"))?;
        let (inertia, inertia_explicit) = match inertia {
            Some(i) => {
                ensure(i > 0.0 && i.is_finite(), || format!("I > 0 violated (inertia = {i})"))?;
                (i, true)
            }
            None => (auto_inertia(shape, mass, radius)?, false),
        };
        Ok(Self {
            shape,
            mass,
            radius,
            length,
            inertia,
            inertia_explicit,
            friction_override: None,
        })
    }

    /// Cube or sphere described only by its published length; the half-width is `length / 2`.
    pub fn from_length(shape: Shape, mass: f64, length: f64) -> Result<Self> {
        if !shape.radius_from_length() {
            return Err(Error::Invariant(format!(
                "{shape:?} needs an explicit radius; only cube and sphere derive it from length"
            )));
        }
        Self::new(shape, mass, length / 2.0, length, None)
    }

    pub fn with_friction(mut self, mu: f64) -> Result<Self> {
        ensure(mu > 0.0 && mu <= 2.0, || format!("friction override in (0, 2] violated (mu = {mu})"))?;
        self.friction_override = Some(mu);
        Ok(self)
    }

    /// Same object with a different contact radius. Auto-computed inertia follows the radius;
    /// an explicit inertia is kept.
    pub fn with_radius(self, radius: f64) -> Result<Self> {
        let inertia = self.inertia_explicit.then_some(self.inertia);
        let out = Self::new(self.shape, self.mass, radius, self.length, inertia)?;
        Ok(Self {
            friction_override: self.friction_override,
            ..out
        })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn length(&self) -> f64 {
        self.length
    }
    pub fn inertia(&self) -> f64 {
        self.inertia
    }
    /// True when the inertia was supplied rather than computed from the shape.
    pub fn inertia_is_explicit(&self) -> bool {
        self.inertia_explicit
    }
    pub fn friction_override(&self) -> Option<f64> {
        self.friction_override
    }
    pub fn weight(&self) -> f64 {
        self.mass * GRAVITY
    }
}

/// Geometry, actuation limits and finger compliance of the two-finger gripper.
#[derive(Debug, Clone, PartialEq)]
pub struct GripperConfig {
    /// Distance between the two undeformed belt contact planes, m.
    pub gap: f64,
    pub finger_height: f64,
    /// Belt-object friction coefficient.
    pub mu_bo: f64,
    /// Motor torque limit, N·m.
    pub tau_m: f64,
    /// Lever arm from motor shaft to contact, m.
    pub lever_arm: f64,
    /// Belt surface speed limit, m/s.
    pub belt_speed_limit: f64,
    /// Pulley radius, m. Only needed to convert rad/s belt commands.
    pub pulley_radius: Option<f64>,
    pub stiffness: StiffnessProfile,
}

impl GripperConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(self.gap > 0.0 && self.gap.is_finite(), || format!("gap > 0 violated (gap = {})", self.gap))?;
        ensure(self.finger_height > 0.0 && self.finger_height.is_finite(), || {
            format!("finger_height > 0 violated (finger_height = {})", self.finger_height)
        })?;
        ensure(self.mu_bo > 0.0 && self.mu_bo <= 2.0, || {
            format!("mu_bo in (0, 2] violated (mu_bo = {})", self.mu_bo)
        })?;
        ensure(self.tau_m > 0.0 && self.tau_m.is_finite(), || format!("tau_m > 0 violated (tau_m = {})", self.tau_m))?;
        ensure(self.lever_arm > 0.0 && self.lever_arm.is_finite(), || {
            format!("L_c > 0 violated (lever_arm = {})", self.lever_arm)
        })?;
        ensure(self.belt_speed_limit > 0.0 && self.belt_speed_limit.is_finite(), || {
            format!("belt_speed_limit > 0 violated (belt_speed_limit = {})", self.belt_speed_limit)
        })?;
        if let Some(rp) = self.pulley_radius {
            ensure(rp > 0.0 && rp.is_finite(), || format!("pulley_radius > 0 violated (pulley_radius = {rp})"))?;
        }
        let heights = self.stiffness.heights();
        let (lo, hi) = (heights[0], heights[heights.len() - 1]);
        ensure(lo > 0.0 && hi < self.finger_height, || {
            format!(
                "stiffness heights within (0, finger_height) violated ([{lo}, {hi}] vs finger_height = {})",
                self.finger_height
            )
        })
    }

    /// Lowest and highest characterized contact heights `[h1, h4]`.
    pub fn contact_range(&self) -> (f64, f64) {
        self.stiffness.height_range()
    }
}

/// Planar state of the grasped body in the finger frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyState {
    /// Height of the object centre along the finger axis, m.
    pub x: f64,
    pub v: f64,
    /// Rotation about the grip axis, rad, unwrapped.
    pub alpha: f64,
    pub omega: f64,
    /// Contact flags, (left, right).
    pub in_contact: (bool, bool),
}

impl BodyState {
    pub fn at_rest(x: f64) -> Self {
        Self {
            x,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("x", self.x), ("v", self.v), ("alpha", self.alpha), ("omega", self.omega)] {
            ensure(value.is_finite(), || format!("body state {name} must be finite (got {value})"))?;
        }
        Ok(())
    }
}

/// One belt. Positive speed moves the belt surface upward.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BeltState {
    pub v_cmd: f64,
    /// Commanded speed after the speed-limit clamp.
    pub v_actual: f64,
    /// Accumulated signed surface displacement, m.
    pub displacement: f64,
}

impl BeltState {
    /// Applies a new command. Speeds beyond the limit are clamped, not rejected.
    pub fn command(self, v_cmd: f64, speed_limit: f64) -> Self {
        Self {
            v_cmd,
            v_actual: v_cmd.clamp(-speed_limit, speed_limit),
            displacement: self.displacement,
        }
    }

    pub fn advance(self, dt: f64) -> Self {
        Self {
            displacement: self.displacement + self.v_actual * dt,
            ..self
        }
    }
}

/// Forces on the object at the two belt contacts. Shear is positive upward.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ContactForces {
    pub normal_left: f64,
    pub normal_right: f64,
    pub shear_left: f64,
    pub shear_right: f64,
}

impl ContactForces {
    pub fn net_shear(&self) -> f64 {
        self.shear_left + self.shear_right
    }

    /// Torque about the grip axis from the shear couple at radius `r`.
    pub fn couple(&self, r: f64) -> f64 {
        r * (self.shear_right - self.shear_left)
    }

    /// Checks `|F_s| <= mu * F_N` on both sides.
    pub fn within_cone(&self, mu: f64) -> bool {
        let ok = |n: f64, s: f64| n >= 0.0 && s.abs() <= mu * n + 1e-12;
        ok(self.normal_left, self.shear_left) && ok(self.normal_right, self.shear_right)
    }
}
