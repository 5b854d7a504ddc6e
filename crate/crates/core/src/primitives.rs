//! Manipulation primitives: payload estimate, open-loop reposition and
//! reorientation plans, belt-displacement kinematics, and phase detection on
//! logged runs.

use std::f64::consts::PI;

use crate::contact::{self, FRONTAL_ANGLE};
use crate::dynamics::{Sample, Trajectory};
use crate::error::{Error, Result};
use crate::model::{GripperConfig, ObjectSpec, Shape, NM_PER_KGCM, STANDARD_GRAVITY};

pub use crate::schedule::{BeltSchedule, Segment};

/// Degree-to-radian factor used by the sign-branched angle form.
pub const ETA: f64 = PI / 180.0;

/// Heaviest object the two belts can carry before the motors stall, kg.
///
/// `2 mu tau_m / L_c` is a force; it is divided by standard gravity so that
/// torque in kg·cm over lever arm in cm gives the same number directly.
pub fn max_payload(mu_bo: f64, tau_m: f64, lever_arm: f64) -> Result<f64> {
    if !(mu_bo >= 0.0 && mu_bo.is_finite()) {
        return Err(Error::InvalidArgument(format!("mu_bo must be >= 0 (got {mu_bo})")));
    }
    if !(tau_m > 0.0 && tau_m.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau_m must be > 0 (got {tau_m})")));
    }
    if !(lever_arm > 0.0 && lever_arm.is_finite()) {
        return Err(Error::InvalidArgument(format!("L_c must be > 0 (got {lever_arm})")));
    }
    Ok(2.0 * mu_bo * tau_m / (lever_arm * STANDARD_GRAVITY))
}

/// [`max_payload`] with torque in kg·cm and lever arm in cm.
pub fn max_payload_kgcm(mu_bo: f64, tau_kgcm: f64, lever_arm_cm: f64) -> Result<f64> {
    max_payload(mu_bo, tau_kgcm * NM_PER_KGCM, lever_arm_cm / 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReorientationMode {
    /// Rolling without slip: `alpha = (S_R - S_L) / (2 r)`.
    Rolling,
    /// `r / (S_L -+ S_R) * eta`, branch chosen by the sign of `v_L * v_R`.
    /// Dimensionally inconsistent; kept for comparison.
    SignBranched { v_left: f64, v_right: f64 },
}

pub fn reorientation_angle(s_left: f64, s_right: f64, r: f64, mode: ReorientationMode) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("r must be > 0 (got {r})")));
    }
    match mode {
        ReorientationMode::Rolling => Ok((s_right - s_left) / (2.0 * r)),
        ReorientationMode::SignBranched { v_left, v_right } => {
            let (den, what) = if v_left * v_right > 0.0 {
                (s_left - s_right, "difference")
            } else {
                (s_left + s_right, "sum")
            };
            if den == 0.0 {
                return Err(Error::ZeroDisplacement(what));
            }
            Ok(r / den * ETA)
        }
    }
}

/// Minimum per-side normal force while the object travels between heights `a` and `b`.
fn min_normal_force(spec: &ObjectSpec, gripper: &GripperConfig, a: f64, b: f64) -> Result<f64> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let delta = contact::penetration(spec, gripper)?;
    let mut heights = vec![lo, hi];
    heights.extend(gripper.stiffness.heights().iter().copied().filter(|h| *h > lo && *h < hi));
    heights
        .into_iter()
        .map(|h| gripper.stiffness.normal_force(delta, h, FRONTAL_ANGLE))
        .try_fold(f64::INFINITY, |acc, f| f.map(|f| acc.min(f)))
}

fn check_speed(speed: f64, gripper: &GripperConfig) -> Result<()> {
    if !(speed != 0.0 && speed.abs() <= gripper.belt_speed_limit) {
        return Err(Error::InvalidArgument(format!(
            "speed must be non-zero and within belt_speed_limit {} (got {speed})",
            gripper.belt_speed_limit
        )));
    }
    Ok(())
}

/// Both belts at the same speed for `|dx| / |speed|`, assuming no slip.
///
/// Fails when the grip cannot carry the object anywhere along the path
/// (`2 mu F_N < m g`).
pub fn plan_reposition(
    start_x: f64,
    target_dx: f64,
    speed: f64,
    gripper: &GripperConfig,
    spec: &ObjectSpec,
) -> Result<BeltSchedule> {
    let (h_lo, h_hi) = gripper.contact_range();
    let end_x = start_x + target_dx;
    for (what, x) in [("start", start_x), ("end", end_x)] {
        if !(x >= h_lo && x <= h_hi) {
            return Err(Error::OutsideCharacterizedRegion {
                quantity: what,
                value: x,
                min: h_lo,
                max: h_hi,
            });
        }
    }
    if target_dx == 0.0 {
        return Ok(BeltSchedule::empty());
    }
    check_speed(speed, gripper)?;
    let mu = spec.friction_override().unwrap_or(gripper.mu_bo);
    let available = 2.0 * mu * min_normal_force(spec, gripper, start_x, end_x)?;
    let required = spec.weight();
    if available < required {
        return Err(Error::Infeasible { required, available });
    }
    let v = target_dx.signum() * speed.abs();
    BeltSchedule::new(vec![Segment {
        duration: target_dx.abs() / speed.abs(),
        v_left: v,
        v_right: v,
    }])
}

/// Per-side normal force needed to hold the object: `m g / (2 mu)`.
pub fn holding_normal_force(spec: &ObjectSpec, mu: f64) -> f64 {
    spec.weight() / (2.0 * mu)
}

/// Opposed belts, right belt up for positive `target_alpha`, for `|alpha| r / |speed|`.
pub fn plan_reorient(
    target_alpha: f64,
    speed: f64,
    spec: &ObjectSpec,
    gripper: &GripperConfig,
) -> Result<BeltSchedule> {
    if spec.shape() == Shape::IrregularConvexProfile {
        return Err(Error::RadiusRequired);
    }
    if target_alpha == 0.0 {
        return Ok(BeltSchedule::empty());
    }
    check_speed(speed, gripper)?;
    let v = target_alpha.signum() * speed.abs();
    BeltSchedule::new(vec![Segment {
        duration: target_alpha.abs() * spec.radius() / speed.abs(),
        v_left: -v,
        v_right: v,
    }])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseThresholds {
    /// m/s
    pub v_min: f64,
    /// rad/s
    pub omega_min: f64,
    /// s
    pub dwell: f64,
}

impl Default for PhaseThresholds {
    fn default() -> Self {
        Self {
            v_min: 1e-3,
            omega_min: 0.01,
            dwell: 0.2,
        }
    }
}

/// Timestamps of the lift / orient / descend / settle sequence. `None` means not reached.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Phases {
    pub contact_lift: Option<f64>,
    pub orient_start: Option<f64>,
    pub descent_start: Option<f64>,
    pub stable_placement: Option<f64>,
}

impl Phases {
    /// True when all four phases are reached in strictly increasing order.
    pub fn complete_and_ordered(&self) -> bool {
        match (self.contact_lift, self.orient_start, self.descent_start, self.stable_placement) {
            (Some(a), Some(b), Some(c), Some(d)) => a < b && b < c && c < d,
            _ => false,
        }
    }
}

pub fn detect_phases(traj: &Trajectory, th: &PhaseThresholds) -> Result<Phases> {
    let samples: Vec<&Sample> = traj.all_samples().collect();
    if samples.is_empty() {
        return Err(Error::InvalidArgument("trajectory is empty".into()));
    }
    let both_touching = |s: &Sample| s.body.in_contact.0 && s.body.in_contact.1;
    let first = |from: Option<f64>, pred: &dyn Fn(&Sample) -> bool| {
        samples
            .iter()
            .filter(|s| from.is_none_or(|t0| s.t > t0))
            .find(|s| pred(s))
            .map(|s| s.t)
    };

    let contact_lift = first(None, &|s| both_touching(s) && s.body.v > th.v_min);
    let orient_start = first(None, &|s| s.body.omega.abs() > th.omega_min);
    let descent_start = contact_lift.and_then(|t| first(Some(t), &|s| s.body.v < -th.v_min));

    let settle_from = descent_start.or(contact_lift);
    let still = |s: &Sample| s.body.v.abs() < th.v_min && s.body.omega.abs() < th.omega_min;
    let mut run_start: Option<f64> = None;
    let mut stable_placement = None;
    for s in samples.iter().filter(|s| settle_from.is_none_or(|t0| s.t > t0)) {
        if still(s) {
            let start = *run_start.get_or_insert(s.t);
            if s.t - start >= th.dwell - 1e-9 {
                stable_placement = Some(s.t);
                break;
            }
        } else {
            run_start = None;
        }
    }
    Ok(Phases {
        contact_lift,
        orient_start,
        descent_start,
        stable_placement,
    })
}
