use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use beltgrip::dynamics;
use beltgrip::harness::{
    export_trajectory, import_trajectory, load_scenario, run_trials, write_trajectory, PerturbationModel,
    SuccessSpec, Target,
};
use beltgrip::primitives::{self, detect_phases, plan_reorient, plan_reposition, BeltSchedule, PhaseThresholds};
use beltgrip::{Error, Result};
use clap::{ArgGroup, Parser, Subcommand};

/// Simulate and plan in-hand manipulation with belt-driven compliant fingers.
#[derive(Parser)]
#[command(name = "beltgrip", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write the trajectory as CSV.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        /// Step size, s (overrides the scenario).
        #[arg(long)]
        dt: Option<f64>,
        /// Horizon, s (overrides the scenario).
        #[arg(long)]
        t_end: Option<f64>,
        /// CSV destination. Without it the CSV goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan belt commands for a scenario's object and gripper.
    Plan {
        #[command(subcommand)]
        primitive: Plan,
    },
    /// Largest liftable mass, kg.
    Payload {
        #[arg(long, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, allow_negative_numbers = true)]
        torque_kgcm: f64,
        #[arg(long, allow_negative_numbers = true)]
        lc_cm: f64,
    },
    /// Seeded Monte Carlo trials over a scenario.
    #[command(group(ArgGroup::new("target").required(true).args(["target_dx", "target_alpha"])))]
    Trials {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        mu_jitter: f64,
        /// m
        #[arg(long, default_value_t = 0.0)]
        x0_jitter: f64,
        /// m
        #[arg(long, default_value_t = 0.0)]
        r_jitter: f64,
        /// Target height change, m.
        #[arg(long, allow_negative_numbers = true)]
        target_dx: Option<f64>,
        /// Target rotation, deg.
        #[arg(long, allow_negative_numbers = true)]
        target_alpha: Option<f64>,
        /// m for --target-dx, deg for --target-alpha. Defaults to 5 mm or 5 deg.
        #[arg(long)]
        tol: Option<f64>,
        /// Also print one CSV row per trial.
        #[arg(long)]
        csv: bool,
    },
    /// Detect manipulation phases in an exported trajectory.
    Phases {
        #[arg(long)]
        traj: PathBuf,
    },
}

#[derive(Subcommand)]
enum Plan {
    Reposition {
        #[arg(long)]
        scenario: PathBuf,
        /// m
        #[arg(long, allow_negative_numbers = true)]
        dx: f64,
        /// Belt speed, m/s.
        #[arg(long, allow_negative_numbers = true)]
        speed: f64,
    },
    Reorient {
        #[arg(long)]
        scenario: PathBuf,
        /// deg
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Belt speed, m/s.
        #[arg(long, allow_negative_numbers = true)]
        speed: f64,
    },
}

fn print_schedule(schedule: &BeltSchedule) {
    println!("duration,v_left,v_right");
    for s in schedule.segments() {
        println!("{},{},{}", s.duration, s.v_left, s.v_right);
    }
}

fn fmt_time(t: Option<f64>) -> String {
    t.map_or_else(|| "none".to_string(), |t| format!("{t:.4}"))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Simulate { scenario, dt, t_end, out } => {
            let s = load_scenario(&scenario)?;
            let traj = dynamics::simulate(&s, &s.schedule, dt.unwrap_or(s.dt), t_end.unwrap_or(s.t_end))?;
            match out {
                Some(path) => {
                    export_trajectory(&traj, &path)?;
                    let last = traj.final_sample().expect("trajectory has an initial sample");
                    println!(
                        "outcome={} t={} x={} alpha={} rows={}",
                        traj.outcome,
                        last.t,
                        last.body.x,
                        last.body.alpha,
                        traj.samples.len()
                    );
                }
                None => {
                    let stdout = std::io::stdout();
                    write_trajectory(&traj, stdout.lock())
                        .map_err(|source| Error::Io { path: "<stdout>".into(), source })?;
                }
            }
            Ok(())
        }
        Command::Plan { primitive } => {
            let schedule = match primitive {
                Plan::Reposition { scenario, dx, speed } => {
                    let s = load_scenario(&scenario)?;
                    plan_reposition(s.initial.x, dx, speed, &s.gripper, &s.object)?
                }
                Plan::Reorient { scenario, alpha, speed } => {
                    let s = load_scenario(&scenario)?;
                    plan_reorient(alpha.to_radians(), speed, &s.object, &s.gripper)?
                }
            };
            print_schedule(&schedule);
            Ok(())
        }
        Command::Payload { mu, torque_kgcm, lc_cm } => {
            println!("max_payload_kg={:.4}", primitives::max_payload_kgcm(mu, torque_kgcm, lc_cm)?);
            Ok(())
        }
        Command::Trials {
            scenario,
            n,
            seed,
            mu_jitter,
            x0_jitter,
            r_jitter,
            target_dx,
            target_alpha,
            tol,
            csv,
        } => {
            let s = load_scenario(&scenario)?;
            let mut spec = match (target_dx, target_alpha) {
                (Some(dx), _) => SuccessSpec::dx(dx),
                (None, Some(deg)) => SuccessSpec::alpha(deg.to_radians()),
                (None, None) => unreachable!("clap requires one target"),
            };
            if let Some(t) = tol {
                spec.tolerance = match spec.target {
                    Target::Dx(_) => t,
                    Target::Alpha(_) => t.to_radians(),
                };
            }
            let model = PerturbationModel { mu_jitter, x0_jitter, r_jitter, seed };
            let report = run_trials(&s, &model, n, &spec)?;
            if csv {
                println!("index,outcome,mu,x0,radius,final_x,final_alpha");
                for t in &report.trials {
                    println!(
                        "{},{},{},{},{},{},{}",
                        t.index,
                        t.outcome.label(),
                        t.mu,
                        t.x0,
                        t.radius,
                        t.final_x,
                        t.final_alpha
                    );
                }
            }
            println!("{}", report.summary_line());
            Ok(())
        }
        Command::Phases { traj } => {
            let t = import_trajectory(&traj)?;
            let p = detect_phases(&t, &PhaseThresholds::default())?;
            println!(
                "contact_lift={} orient_start={} descent_start={} stable_placement={} ordered={} outcome={}",
                fmt_time(p.contact_lift),
                fmt_time(p.orient_start),
                fmt_time(p.descent_start),
                fmt_time(p.stable_placement),
                p.complete_and_ordered(),
                t.outcome
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error kind={}: {e}", e.kind());
            ExitCode::FAILURE
        }
    }
}

