//! Belt-object contact: normal load from finger compression and shear from a
//! regularized Coulomb law.
//!
//! Shear on each side is `mu * F_N * tanh(v_slip / v_eps)`, where the slip is
//! the belt surface velocity minus the object surface velocity at that
//! contact, both signed positive upward. With a positive rotation `omega` the
//! right contact surface of the object moves at `v + omega * r` and the left
//! one at `v - omega * r`, so rolling without slip gives
//! `v = (v_L + v_R) / 2` and `omega = (v_R - v_L) / (2 r)`.

use crate::error::{ensure, Error, Result};
use crate::model::{BeltState, BodyState, ContactForces, GripperConfig, ObjectSpec};

/// Propulsion angle the grasp presses on, deg.
pub const FRONTAL_ANGLE: f64 = 0.0;

/// Default regularization velocity, m/s.
pub const DEFAULT_V_EPS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactParams {
    pub mu_bo: f64,
    pub v_eps: f64,
}

impl ContactParams {
    pub fn new(mu_bo: f64, v_eps: f64) -> Result<Self> {
        ensure(mu_bo > 0.0 && mu_bo.is_finite(), || format!("mu_bo > 0 violated (mu_bo = {mu_bo})"))?;
        ensure(v_eps > 0.0 && v_eps.is_finite(), || format!("v_eps > 0 violated (v_eps = {v_eps})"))?;
        Ok(Self { mu_bo, v_eps })
    }

    /// Friction from the object's override if it has one, otherwise the gripper's.
    pub fn for_grasp(spec: &ObjectSpec, gripper: &GripperConfig, v_eps: f64) -> Result<Self> {
        Self::new(spec.friction_override().unwrap_or(gripper.mu_bo), v_eps)
    }
}

/// Finger compression per side, mm. Zero when the object is narrower than the gap.
pub fn penetration(spec: &ObjectSpec, gripper: &GripperConfig) -> Result<f64> {
    let overlap = 2.0 * spec.radius() - gripper.gap;
    if overlap <= 0.0 {
        return Ok(0.0);
    }
    let per_side_mm = overlap / 2.0 * 1000.0;
    if per_side_mm > crate::compliance::MAX_COMPRESSION_MM {
        return Err(Error::BeyondCompressionDepth {
            penetration_mm: per_side_mm,
            limit_mm: crate::compliance::MAX_COMPRESSION_MM,
        });
    }
    Ok(per_side_mm)
}

/// Gap that produces a per-side normal force `normal_force` for an object centred at height `h`.
pub fn gap_for_normal_force(
    spec: &ObjectSpec,
    gripper: &GripperConfig,
    h: f64,
    normal_force: f64,
) -> Result<f64> {
    let k = gripper.stiffness.stiffness_at(h, FRONTAL_ANGLE)?;
    let delta_m = normal_force / k / 1000.0;
    Ok(2.0 * spec.radius() - 2.0 * delta_m)
}

pub fn shear_force(normal: f64, v_slip: f64, params: &ContactParams) -> f64 {
    params.mu_bo * normal * (v_slip / params.v_eps).tanh()
}

/// d(shear)/d(slip).
pub(crate) fn shear_slope(normal: f64, v_slip: f64, params: &ContactParams) -> f64 {
    let c = (v_slip / params.v_eps).cosh();
    if c.is_finite() {
        params.mu_bo * normal / params.v_eps / (c * c)
    } else {
        0.0
    }
}

/// Slip at the (left, right) contacts.
pub fn slip_velocities(v: f64, omega: f64, r: f64, v_left: f64, v_right: f64) -> (f64, f64) {
    (v_left - (v - omega * r), v_right - (v + omega * r))
}

/// Per-side normal force at height `x`. Fails outside the characterized finger region.
pub fn normal_force_at(x: f64, spec: &ObjectSpec, gripper: &GripperConfig) -> Result<f64> {
    let (min, max) = gripper.contact_range();
    if !(x >= min && x <= max) {
        return Err(Error::ContactOutsideFinger { x, min, max });
    }
    let delta = penetration(spec, gripper)?;
    gripper.stiffness.normal_force(delta, x, FRONTAL_ANGLE)
}

pub fn contact_forces(
    body: &BodyState,
    belts: (&BeltState, &BeltState),
    spec: &ObjectSpec,
    gripper: &GripperConfig,
    params: &ContactParams,
) -> Result<ContactForces> {
    let normal = normal_force_at(body.x, spec, gripper)?;
    let (slip_l, slip_r) =
        slip_velocities(body.v, body.omega, spec.radius(), belts.0.v_actual, belts.1.v_actual);
    Ok(ContactForces {
        normal_left: normal,
        normal_right: normal,
        shear_left: shear_force(normal, slip_l, params),
        shear_right: shear_force(normal, slip_r, params),
    })
}
