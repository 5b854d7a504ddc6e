use beltgrip::dynamics::{self, Outcome};
use beltgrip::harness::{
    bundled, export_trajectory, import_trajectory, load_scenario, run_trials, write_trajectory, PerturbationModel,
    Scenario, SuccessSpec, TRAJECTORY_HEADER,
};
use beltgrip::primitives::{detect_phases, PhaseThresholds};
use beltgrip::Error;

#[test]
fn scenario_files_round_trip_on_disk() {
    let dir = tempfile::tempdir().unwrap();
    for (name, s) in bundled::all() {
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, s.to_toml()).unwrap();
        let back = load_scenario(&path).unwrap();
        assert_eq!(back, s, "{name}");
    }
}

#[test]
fn missing_scenario_names_the_path() {
    let err = load_scenario("/nonexistent/dir/x.toml").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert!(err.to_string().contains("/nonexistent/dir/x.toml"));
}

#[test]
fn unknown_keys_are_rejected() {
    let text = format!("{}\n[extra]\nfoo = 1\n", bundled::cube_reposition().to_toml());
    assert!(matches!(Scenario::from_toml(&text), Err(Error::Parse(_))));
}

#[test]
fn export_is_deterministic_and_reexports_identically() {
    let s = bundled::cube_reposition();
    let a = dynamics::simulate_scenario(&s).unwrap();
    let b = dynamics::simulate_scenario(&s).unwrap();
    let (mut bytes_a, mut bytes_b) = (Vec::new(), Vec::new());
    write_trajectory(&a, &mut bytes_a).unwrap();
    write_trajectory(&b, &mut bytes_b).unwrap();
    assert_eq!(bytes_a, bytes_b);

    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    export_trajectory(&a, &first).unwrap();
    let back = import_trajectory(&first).unwrap();
    assert_eq!(back.outcome, a.outcome);
    assert_eq!(back.samples.len(), a.samples.len());
    export_trajectory(&back, &second).unwrap();
    assert_eq!(std::fs::read(&first).unwrap(), std::fs::read(&second).unwrap());
    let text = String::from_utf8(bytes_a).unwrap();
    assert_eq!(text.lines().next().unwrap(), TRAJECTORY_HEADER);
}

#[test]
fn ten_steps_give_ten_rows() {
    let s = bundled::cube_reposition();
    let traj = dynamics::simulate(&s, &s.schedule, 1e-4, 1e-3).unwrap();
    let mut out = Vec::new();
    write_trajectory(&traj, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.lines().last().unwrap().ends_with(",completed"));
}

#[test]
fn belt_displacement_reintegrates() {
    for (name, s) in bundled::all() {
        let dt = s.dt;
        let mut sum = (0.0, 0.0);
        let mut worst: f64 = 0.0;
        dynamics::run(&s, &s.schedule, dt, s.t_end, |_, p, _| {
            sum.0 += p.v_belt_left * dt;
            sum.1 += p.v_belt_right * dt;
            worst = worst.max((sum.0 - p.s_left).abs()).max((sum.1 - p.s_right).abs());
        })
        .unwrap();
        assert!(worst <= 1e-9 * s.t_end.max(1.0), "{name}: {worst:e}");
    }
}

#[test]
fn phases_stable_under_resampling() {
    let base = bundled::sphere_reorient();
    let fine = dynamics::simulate_scenario(&base).unwrap();
    let reference = detect_phases(&fine, &PhaseThresholds::default()).unwrap();
    assert!(reference.complete_and_ordered());
    // 100 Hz log
    let coarse_s = Scenario { decimation: 100, ..base.clone() };
    let coarse = dynamics::simulate_scenario(&coarse_s).unwrap();
    let p = detect_phases(&coarse, &PhaseThresholds::default()).unwrap();
    assert!(p.complete_and_ordered());
    let pairs = [
        (reference.contact_lift, p.contact_lift),
        (reference.orient_start, p.orient_start),
        (reference.descent_start, p.descent_start),
        (reference.stable_placement, p.stable_placement),
    ];
    for (a, b) in pairs {
        assert!((a.unwrap() - b.unwrap()).abs() <= 0.02, "{a:?} vs {b:?}");
    }
}

#[test]
fn light_grip_drops_without_friction_margin() {
    let mut s = bundled::cube_light_grip();
    s.contact.mu_bo = 0.2;
    let traj = dynamics::simulate_scenario(&s).unwrap();
    assert_eq!(traj.outcome, Outcome::Dropped);
}

#[test]
fn seeds_reproduce_and_differ() {
    let s = bundled::cube_light_grip();
    let spec = SuccessSpec::dx(0.02);
    let p = PerturbationModel::none(99).with_mu_jitter(0.3);
    let a = run_trials(&s, &p, 16, &spec).unwrap();
    let b = run_trials(&s, &p, 16, &spec).unwrap();
    assert_eq!(a, b);
    let c = run_trials(&s, &PerturbationModel { seed: 100, ..p }, 16, &spec).unwrap();
    assert_ne!(a.trials, c.trials);
}
