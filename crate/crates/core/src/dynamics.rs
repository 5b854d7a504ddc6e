//! Planar object dynamics between the two belts.
//!
//! The object translates along the finger axis and rotates about the grip
//! axis:
//!
//! ```text
//! m  * x''     = F_sL + F_sR - m g
//! I  * alpha'' = r (F_sR - F_sL)
//! ```
//!
//! with the signed, regularized shear of [`crate::contact`]. Both sign
//! branches of the usual "belts up" / "belts down" case split fall out of the
//! signed law, as do the mixed-direction cases.
//!
//! Time stepping is fixed-step and first order. Within a step the normal load
//! is taken at the start-of-step height, the friction is evaluated at the
//! end-of-step velocities, and positions then advance with those new
//! velocities. The friction slope `mu F_N / v_eps` is far too steep for an
//! explicit velocity update at millisecond-scale steps, so the velocity
//! update is solved as a small convex minimization (see [`solve_velocities`]).
//! A side effect is that the discrete belt work never falls below the change
//! in mechanical energy.

use crate::contact::{self, ContactParams};
use crate::error::{Error, Result};
use crate::harness::Scenario;
use crate::model::{BeltState, BodyState, ContactForces, GripperConfig, ObjectSpec, GRAVITY};
use crate::schedule::BeltSchedule;

pub const DEFAULT_DT: f64 = 1e-4;
pub const MAX_DT: f64 = 1e-3;

pub fn vertical_acceleration(forces: &ContactForces, spec: &ObjectSpec) -> f64 {
    (forces.net_shear() - spec.mass() * GRAVITY) / spec.mass()
}

pub fn angular_acceleration(forces: &ContactForces, spec: &ObjectSpec) -> f64 {
    forces.couple(spec.radius()) / spec.inertia()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutput {
    pub body: BodyState,
    pub belts: (BeltState, BeltState),
    /// Forces applied over the step.
    pub forces: ContactForces,
}

/// Advances the body and both belts by `dt`. Belt commands must already be set.
pub fn step(
    body: &BodyState,
    belts: (&BeltState, &BeltState),
    spec: &ObjectSpec,
    gripper: &GripperConfig,
    params: &ContactParams,
    dt: f64,
) -> Result<StepOutput> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(Error::InvalidArgument(format!("dt must be in (0, {MAX_DT}] s (got {dt})")));
    }
    let penetration = contact::penetration(spec, gripper)?;
    let touching = penetration > 0.0;
    let normal = if touching {
        contact::normal_force_at(body.x, spec, gripper)?
    } else {
        0.0
    };
    let (vl, vr) = (belts.0.v_actual, belts.1.v_actual);

    let (v, omega) = if normal > 0.0 {
        solve_velocities(body, vl, vr, normal, spec, params, dt)
    } else {
        (body.v - GRAVITY * dt, body.omega)
    };

    let (slip_l, slip_r) = contact::slip_velocities(v, omega, spec.radius(), vl, vr);
    let forces = ContactForces {
        normal_left: normal,
        normal_right: normal,
        shear_left: contact::shear_force(normal, slip_l, params),
        shear_right: contact::shear_force(normal, slip_r, params),
    };
    let next = BodyState {
        x: body.x + v * dt,
        v,
        alpha: body.alpha + omega * dt,
        omega,
        in_contact: (touching, touching),
    };
    for (name, value) in [
        ("v", next.v),
        ("omega", next.omega),
        ("x", next.x),
        ("alpha", next.alpha),
        ("shear_left", forces.shear_left),
        ("shear_right", forces.shear_right),
    ] {
        if !value.is_finite() {
            return Err(Error::Diverged { quantity: name, t: f64::NAN });
        }
    }
    Ok(StepOutput {
        body: next,
        belts: (belts.0.advance(dt), belts.1.advance(dt)),
        forces,
    })
}

/// End-of-step velocities `(v, omega)`.
///
/// They are the minimizer of
///
/// ```text
/// m/2 (v - v0)^2 + I/2 (w - w0)^2 + dt m g v
///     + dt * sum_sides mu N v_eps logcosh(slip_side / v_eps)
/// ```
///
/// whose stationarity condition is exactly the backward-Euler velocity update
/// with friction evaluated at the new slip. The objective is strictly convex,
/// so damped Newton converges from any start.
fn solve_velocities(
    body: &BodyState,
    v_left: f64,
    v_right: f64,
    normal: f64,
    spec: &ObjectSpec,
    params: &ContactParams,
    dt: f64,
) -> (f64, f64) {
    let m = spec.mass();
    let inertia = spec.inertia();
    let r = spec.radius();
    let (v0, w0) = (body.v, body.omega);
    let friction_scale = params.mu_bo * normal * params.v_eps;

    let objective = |v: f64, w: f64| {
        let (sl, sr) = contact::slip_velocities(v, w, r, v_left, v_right);
        0.5 * m * (v - v0) * (v - v0)
            + 0.5 * inertia * (w - w0) * (w - w0)
            + dt * m * GRAVITY * v
            + dt * friction_scale * (log_cosh(sl / params.v_eps) + log_cosh(sr / params.v_eps))
    };

    let (mut v, mut w) = (v0, w0);
    let mut phi = objective(v, w);
    for _ in 0..100 {
        let (sl, sr) = contact::slip_velocities(v, w, r, v_left, v_right);
        let fl = contact::shear_force(normal, sl, params);
        let fr = contact::shear_force(normal, sr, params);
        let gl = contact::shear_slope(normal, sl, params);
        let gr = contact::shear_slope(normal, sr, params);

        let grad_v = m * (v - v0) + dt * m * GRAVITY - dt * (fl + fr);
        let grad_w = inertia * (w - w0) - dt * r * (fr - fl);
        let h_vv = m + dt * (gl + gr);
        let h_vw = dt * r * (gr - gl);
        let h_ww = inertia + dt * r * r * (gl + gr);
        let det = h_vv * h_ww - h_vw * h_vw;
        let dv = -(h_ww * grad_v - h_vw * grad_w) / det;
        let dw = -(h_vv * grad_w - h_vw * grad_v) / det;

        let descent = grad_v * dv + grad_w * dw;
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-12 {
            let (nv, nw) = (v + t * dv, w + t * dw);
            let nphi = objective(nv, nw);
            if nphi <= phi + 1e-4 * t * descent {
                v = nv;
                w = nw;
                phi = nphi;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        let moved_v = (t * dv).abs();
        let moved_w = (t * dw).abs() * r;
        if !accepted {
            // at the rounding floor of the objective; take the Newton step and stop
            v += dv;
            w += dw;
            break;
        }
        let scale = 1e-14 + 1e-13 * (v.abs() + (w * r).abs() + v_left.abs() + v_right.abs());
        if moved_v <= scale && moved_w <= scale {
            break;
        }
    }
    (v, w)
}

fn log_cosh(z: f64) -> f64 {
    let a = z.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Completed,
    /// Slid out below the lowest characterized contact height.
    Dropped,
    /// Pushed out above the highest characterized contact height.
    Ejected,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Completed => "completed",
            Outcome::Dropped => "dropped",
            Outcome::Ejected => "ejected",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "completed" => Some(Outcome::Completed),
            "dropped" => Some(Outcome::Dropped),
            "ejected" => Some(Outcome::Ejected),
            _ => None,
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// State at one logged instant. Forces are the ones applied over the step
/// that ended at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Sample {
    pub t: f64,
    pub body: BodyState,
    pub s_left: f64,
    pub s_right: f64,
    pub v_belt_left: f64,
    pub v_belt_right: f64,
    pub forces: ContactForces,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// State at t = 0, when known (not part of the CSV export).
    pub initial: Option<Sample>,
    pub samples: Vec<Sample>,
    pub outcome: Outcome,
}

impl Trajectory {
    pub fn final_sample(&self) -> Option<&Sample> {
        self.samples.last().or(self.initial.as_ref())
    }

    /// Initial sample (if any) followed by the logged ones.
    pub fn all_samples(&self) -> impl Iterator<Item = &Sample> {
        self.initial.iter().chain(self.samples.iter())
    }
}

/// End state of a run, for callers that do not need the full log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSummary {
    pub last: Sample,
    pub outcome: Outcome,
    pub steps: usize,
}

/// Number of fixed steps covering `[0, t_end]`.
pub fn step_count(dt: f64, t_end: f64) -> usize {
    ((t_end / dt) - 1e-9).ceil().max(0.0) as usize
}

/// Runs the scenario's body under `schedule`, calling `observe` after each step.
///
/// Stops early when the object leaves the characterized finger region. The
/// callback receives the step index (1-based) and the new sample.
pub fn run<F>(
    scenario: &Scenario,
    schedule: &BeltSchedule,
    dt: f64,
    t_end: f64,
    mut observe: F,
) -> Result<RunSummary>
where
    F: FnMut(usize, &Sample, Option<Outcome>),
{
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(Error::InvalidArgument(format!("dt must be in (0, {MAX_DT}] s (got {dt})")));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end must be >= 0 (got {t_end})")));
    }
    let spec = &scenario.object;
    let gripper = &scenario.gripper;
    let params = &scenario.contact;
    let limit = gripper.belt_speed_limit;
    let (h_lo, h_hi) = gripper.contact_range();

    let mut body = scenario.initial;
    let mut belts = (BeltState::default(), BeltState::default());
    let mut cursor = schedule.cursor();
    let n = step_count(dt, t_end);
    let mut last = initial_sample(scenario)?;

    for k in 0..n {
        let t0 = k as f64 * dt;
        let (cmd_l, cmd_r) = cursor.speeds_at(t0 + 0.5 * dt);
        belts = (belts.0.command(cmd_l, limit), belts.1.command(cmd_r, limit));
        let out = step(&body, (&belts.0, &belts.1), spec, gripper, params, dt).map_err(|e| match e {
            Error::Diverged { quantity, .. } => Error::Diverged { quantity, t: t0 },
            other => other,
        })?;
        body = out.body;
        belts = out.belts;
        last = Sample {
            t: (k + 1) as f64 * dt,
            body,
            s_left: belts.0.displacement,
            s_right: belts.1.displacement,
            v_belt_left: belts.0.v_actual,
            v_belt_right: belts.1.v_actual,
            forces: out.forces,
        };
        let exit = if body.x < h_lo {
            Some(Outcome::Dropped)
        } else if body.x > h_hi {
            Some(Outcome::Ejected)
        } else if k + 1 == n {
            Some(Outcome::Completed)
        } else {
            None
        };
        observe(k + 1, &last, exit);
        if let Some(outcome) = exit {
            return Ok(RunSummary { last, outcome, steps: k + 1 });
        }
    }
    Ok(RunSummary {
        last,
        outcome: Outcome::Completed,
        steps: n,
    })
}

/// t = 0 sample with start-of-run contact forces.
pub fn initial_sample(scenario: &Scenario) -> Result<Sample> {
    let body = scenario.initial;
    let still = BeltState::default();
    let touching = contact::penetration(&scenario.object, &scenario.gripper)? > 0.0;
    let forces = if touching {
        contact::contact_forces(&body, (&still, &still), &scenario.object, &scenario.gripper, &scenario.contact)?
    } else {
        ContactForces::default()
    };
    Ok(Sample {
        t: 0.0,
        body: BodyState {
            in_contact: (touching, touching),
            ..body
        },
        forces,
        ..Sample::default()
    })
}

/// Full logged trajectory, keeping every `scenario.decimation`-th step and the last one.
pub fn simulate(scenario: &Scenario, schedule: &BeltSchedule, dt: f64, t_end: f64) -> Result<Trajectory> {
    let every = scenario.decimation.max(1);
    let mut samples = Vec::with_capacity(step_count(dt, t_end) / every + 1);
    let summary = run(scenario, schedule, dt, t_end, |k, sample, exit| {
        if k % every == 0 || exit.is_some() {
            samples.push(*sample);
        }
    })?;
    Ok(Trajectory {
        initial: Some(initial_sample(scenario)?),
        samples,
        outcome: summary.outcome,
    })
}

/// Runs the scenario with its own schedule, step and horizon.
pub fn simulate_scenario(scenario: &Scenario) -> Result<Trajectory> {
    simulate(scenario, &scenario.schedule, scenario.dt, scenario.t_end)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compliance::StiffnessProfile;
    use crate::model::Shape;
    use crate::schedule::Segment;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sphere() -> ObjectSpec {
        ObjectSpec::from_length(Shape::Sphere, 0.04215, 0.055).unwrap()
    }

    fn gripper() -> GripperConfig {
        GripperConfig {
            gap: 0.050,
            finger_height: 0.125,
            mu_bo: 0.5,
            tau_m: 0.3334,
            lever_arm: 0.05965,
            belt_speed_limit: 0.5,
            pulley_radius: None,
            stiffness: StiffnessProfile::default(),
        }
    }

    fn params(mu: f64) -> ContactParams {
        ContactParams::new(mu, contact::DEFAULT_V_EPS).unwrap()
    }

    fn belt(v: f64) -> BeltState {
        BeltState::default().command(v, 1.0)
    }

    fn scenario(mu: f64, x0: f64) -> Scenario {
        Scenario::new(
            sphere(),
            gripper(),
            params(mu),
            BodyState::at_rest(x0),
            BeltSchedule::empty(),
            DEFAULT_DT,
            1.0,
            1,
        )
        .unwrap()
    }

    #[test]
    fn free_fall_acceleration() {
        assert_eq!(vertical_acceleration(&ContactForces::default(), &sphere()), -9.81);
    }

    #[test]
    fn saturated_upward_lift() {
        let f = ContactForces {
            normal_left: 2.0,
            normal_right: 2.0,
            shear_left: 1.0,
            shear_right: 1.0,
        };
        let a = vertical_acceleration(&f, &sphere());
        assert_relative_eq!(a, (2.0 - 0.04215 * 9.81) / 0.04215, max_relative = 1e-12);
        assert_relative_eq!(a, 37.64, epsilon = 5e-3);
    }

    #[test]
    fn equilibrium_shear_holds() {
        let spec = sphere();
        let half = 0.5 * spec.mass() * GRAVITY;
        let f = ContactForces {
            shear_left: half,
            shear_right: half,
            ..Default::default()
        };
        assert!(vertical_acceleration(&f, &spec).abs() < 1e-12);
        assert_eq!(angular_acceleration(&f, &spec), 0.0);
    }

    #[test]
    fn couple_spins_sphere() {
        let spec = sphere();
        let f = ContactForces {
            shear_left: -1.0,
            shear_right: 1.0,
            ..Default::default()
        };
        let a = angular_acceleration(&f, &spec);
        assert_relative_eq!(a, 0.0275 * 2.0 / spec.inertia(), max_relative = 1e-12);
        assert_relative_eq!(a, 4313.7, max_relative = 1e-4);
        let big = ObjectSpec::new(Shape::Sphere, spec.mass(), 0.055, 0.11, Some(spec.inertia())).unwrap();
        assert_relative_eq!(angular_acceleration(&f, &big), 2.0 * a, max_relative = 1e-12);
    }

    #[test]
    fn one_free_fall_step() {
        let mut g = gripper();
        g.gap = 0.06;
        let out = step(&BodyState::at_rest(0.05), (&belt(0.0), &belt(0.0)), &sphere(), &g, &params(0.5), 1e-4).unwrap();
        assert_relative_eq!(out.body.v, -9.81e-4, max_relative = 1e-12);
        assert_eq!(out.body.in_contact, (false, false));
        assert_eq!(out.forces, ContactForces::default());
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let spec = sphere();
        let g = gripper();
        let p = params(0.5);
        let x = 0.05;
        let normal = contact::normal_force_at(x, &spec, &g).unwrap();
        // belt speed whose slip against a resting object carries the weight
        let slip = p.v_eps * (spec.mass() * GRAVITY / (2.0 * p.mu_bo * normal)).atanh();
        let b = belt(slip);
        let body = BodyState {
            in_contact: (true, true),
            ..BodyState::at_rest(x)
        };
        let out = step(&body, (&b, &b), &spec, &g, &p, 1e-4).unwrap();
        assert!(out.body.v.abs() < 1e-15, "v = {}", out.body.v);
        assert!((out.body.x - x).abs() < 1e-18);
        assert_eq!(out.body.omega, 0.0);
        assert_eq!(out.body.alpha, 0.0);
        assert_relative_eq!(out.belts.0.displacement, slip * 1e-4, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_dt() {
        let r = step(&BodyState::at_rest(0.05), (&belt(0.0), &belt(0.0)), &sphere(), &gripper(), &params(0.5), 2e-3);
        assert!(r.is_err());
        assert!(step(&BodyState::at_rest(0.05), (&belt(0.0), &belt(0.0)), &sphere(), &gripper(), &params(0.5), 0.0).is_err());
    }

    #[test]
    fn nonfinite_state_reports_quantity() {
        let body = BodyState {
            v: f64::INFINITY,
            ..BodyState::at_rest(0.05)
        };
        let mut g = gripper();
        g.gap = 0.06;
        let err = step(&body, (&belt(0.0), &belt(0.0)), &sphere(), &g, &params(0.5), 1e-4).unwrap_err();
        assert!(err.to_string().contains("integration diverged"), "{err}");
        assert!(err.to_string().contains('v'));
    }

    #[test]
    fn sticking_limit_matches_rolling() {
        let spec = sphere();
        let g = gripper();
        let p = params(10.0);
        let (vl, vr) = (0.03, 0.05);
        let mut body = BodyState::at_rest(0.04);
        let (mut bl, mut br) = (belt(vl), belt(vr));
        for _ in 0..2000 {
            let out = step(&body, (&bl, &br), &spec, &g, &p, 1e-4).unwrap();
            body = out.body;
            (bl, br) = out.belts;
        }
        assert_relative_eq!(body.v, 0.5 * (vl + vr), max_relative = 0.01);
        assert_relative_eq!(body.omega, (vr - vl) / (2.0 * spec.radius()), max_relative = 0.01);
    }

    #[test]
    fn static_hold_creeps_slowly() {
        let s = scenario(0.5, 0.05);
        let summary = run(&s, &BeltSchedule::empty(), 1e-4, 5.0, |_, _, _| {}).unwrap();
        assert_eq!(summary.outcome, Outcome::Completed);
        assert!((summary.last.body.x - 0.05).abs() < 1e-4, "dx = {}", summary.last.body.x - 0.05);
    }

    #[test]
    fn lift_hold_lower_pattern() {
        let s = scenario(0.5, 0.04);
        let sched = BeltSchedule::new(vec![
            Segment { duration: 0.5, v_left: 0.04, v_right: 0.04 },
            Segment { duration: 0.3, v_left: 0.0, v_right: 0.0 },
            Segment { duration: 0.5, v_left: -0.04, v_right: -0.04 },
        ])
        .unwrap();
        let traj = simulate(&s, &sched, 1e-4, 1.5).unwrap();
        let at = |t: f64| traj.samples.iter().find(|p| p.t >= t - 1e-9).unwrap().body.x;
        assert!(at(0.5) > at(0.05) + 0.015);
        assert!((at(0.75) - at(0.55)).abs() < 1e-4);
        assert!(at(1.3) < at(0.75) - 0.015);
        assert_eq!(traj.outcome, Outcome::Completed);
    }

    #[test]
    fn drops_below_finger() {
        let mut s = scenario(0.5, 0.04);
        s.gripper.gap = 0.06;
        let traj = simulate(&s, &BeltSchedule::empty(), 1e-4, 1.0).unwrap();
        assert_eq!(traj.outcome, Outcome::Dropped);
        assert!(traj.samples.last().unwrap().body.x < 0.025);
    }

    #[test]
    fn decimation_keeps_last_step() {
        let mut s = scenario(0.5, 0.05);
        s.decimation = 7;
        let traj = simulate(&s, &BeltSchedule::empty(), 1e-4, 0.002).unwrap();
        assert_eq!(traj.samples.len(), 20 / 7 + 1);
        assert_relative_eq!(traj.samples.last().unwrap().t, 0.002, max_relative = 1e-12);
        s.decimation = 1;
        assert_eq!(simulate(&s, &BeltSchedule::empty(), 1e-4, 10.0 * 1e-4).unwrap().samples.len(), 10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Both belts up and faster than the object with enough grip: the object speeds up.
        #[test]
        fn upward_regime_accelerates(mu in 0.2f64..2.0, vb in 0.01f64..0.4, frac in 0.0f64..0.5) {
            let spec = sphere();
            let g = gripper();
            let p = params(mu);
            let body = BodyState { v: frac * vb, ..BodyState::at_rest(0.05) };
            let f = contact::contact_forces(&body, (&belt(vb), &belt(vb)), &spec, &g, &p).unwrap();
            prop_assume!(2.0 * mu * f.normal_left > spec.weight());
            prop_assume!(f.shear_left > 0.99 * mu * f.normal_left);
            prop_assert!(vertical_acceleration(&f, &spec) > 0.0);
        }

        #[test]
        fn steps_stay_in_cone(mu in 0.1f64..5.0, vl in -0.3f64..0.3, vr in -0.3f64..0.3, v in -0.3f64..0.3, w in -20.0f64..20.0) {
            let spec = sphere();
            let g = gripper();
            let p = params(mu);
            let body = BodyState { v, omega: w, ..BodyState::at_rest(0.05) };
            let out = step(&body, (&belt(vl), &belt(vr)), &spec, &g, &p, 1e-4).unwrap();
            prop_assert!(out.forces.within_cone(mu));
        }
    }
}
