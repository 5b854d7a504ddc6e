//! Seeded Monte Carlo trials.
//!
//! Each trial perturbs the scenario (friction, start height, contact radius),
//! runs it to the end, and is scored against a target displacement or
//! rotation. Trial `i` draws from its own ChaCha stream `(seed, i)`, so a
//! report does not depend on how trials are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contact::ContactParams;
use crate::dynamics::{self, Outcome};
use crate::error::{ensure, Error, Result};
use crate::harness::Scenario;
use crate::model::BodyState;

/// Uniform perturbation half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationModel {
    pub mu_jitter: f64,
    /// m
    pub x0_jitter: f64,
    /// m
    pub r_jitter: f64,
    pub seed: u64,
}

impl PerturbationModel {
    pub fn none(seed: u64) -> Self {
        Self {
            mu_jitter: 0.0,
            x0_jitter: 0.0,
            r_jitter: 0.0,
            seed,
        }
    }

    pub fn with_mu_jitter(self, mu_jitter: f64) -> Self {
        Self { mu_jitter, ..self }
    }

    /// Checks jitters are non-negative and that every perturbed friction stays positive.
    pub fn validate_for(&self, scenario: &Scenario) -> Result<()> {
        for (name, j) in [("mu_jitter", self.mu_jitter), ("x0_jitter", self.x0_jitter), ("r_jitter", self.r_jitter)] {
            ensure(j >= 0.0 && j.is_finite(), || format!("{name} >= 0 violated ({name} = {j})"))?;
        }
        let mu = scenario.contact.mu_bo;
        ensure(mu - self.mu_jitter > 0.0, || {
            format!("perturbed mu > 0 violated (mu = {mu}, mu_jitter = {})", self.mu_jitter)
        })?;
        ensure(scenario.object.radius() - self.r_jitter > 0.0, || {
            format!("perturbed r > 0 violated (r = {}, r_jitter = {})", scenario.object.radius(), self.r_jitter)
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Net height change, m.
    Dx(f64),
    /// Net rotation, rad.
    Alpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuccessSpec {
    pub target: Target,
    /// Same unit as the target.
    pub tolerance: f64,
}

impl SuccessSpec {
    /// |dx| within 5 mm.
    pub fn dx(target: f64) -> Self {
        Self {
            target: Target::Dx(target),
            tolerance: 5e-3,
        }
    }

    /// |dalpha| within 5 degrees.
    pub fn alpha(target: f64) -> Self {
        Self {
            target: Target::Alpha(target),
            tolerance: 5f64.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Success,
    Dropped,
    Ejected,
    OffTarget,
    /// The perturbed scenario could not be built or simulated.
    Failed(String),
}

impl TrialOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            TrialOutcome::Success => "success",
            TrialOutcome::Dropped => "dropped",
            TrialOutcome::Ejected => "ejected",
            TrialOutcome::OffTarget => "off-target",
            TrialOutcome::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub index: u64,
    pub outcome: TrialOutcome,
    pub mu: f64,
    pub x0: f64,
    pub radius: f64,
    pub final_x: f64,
    pub final_alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialReport {
    pub n: usize,
    pub successes: usize,
    pub seed: u64,
    pub trials: Vec<TrialResult>,
}

impl TrialReport {
    pub fn count(&self, label: &str) -> usize {
        self.trials.iter().filter(|t| t.outcome.label() == label).count()
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.n as f64
    }

    /// One-line `key=value` summary.
    pub fn summary_line(&self) -> String {
        format!(
            "n={} successes={} dropped={} ejected={} off_target={} failed={} seed={}",
            self.n,
            self.successes,
            self.count("dropped"),
            self.count("ejected"),
            self.count("off-target"),
            self.count("failed"),
            self.seed
        )
    }
}

fn centered(rng: &mut ChaCha8Rng, half_width: f64) -> f64 {
    half_width * (2.0 * rng.random::<f64>() - 1.0)
}

/// Runs trial `index`. Never fails: errors are folded into [`TrialOutcome::Failed`].
pub fn run_trial(
    scenario: &Scenario,
    perturbation: &PerturbationModel,
    success: &SuccessSpec,
    index: u64,
) -> TrialResult {
    let mut rng = ChaCha8Rng::seed_from_u64(perturbation.seed);
    rng.set_stream(index);
    // draw all three regardless of which jitters are zero, so streams line up across models
    let d_mu = centered(&mut rng, perturbation.mu_jitter);
    let d_x0 = centered(&mut rng, perturbation.x0_jitter);
    let d_r = centered(&mut rng, perturbation.r_jitter);

    let mu = scenario.contact.mu_bo + d_mu;
    let x0 = scenario.initial.x + d_x0;
    let radius = scenario.object.radius() + d_r;
    let mut result = TrialResult {
        index,
        outcome: TrialOutcome::Success,
        mu,
        x0,
        radius,
        final_x: f64::NAN,
        final_alpha: f64::NAN,
    };

    let perturbed = (|| -> Result<Scenario> {
        let object = scenario.object.with_radius(radius)?;
        Scenario::new(
            object,
            scenario.gripper.clone(),
            ContactParams::new(mu, scenario.contact.v_eps)?,
            BodyState { x: x0, ..scenario.initial },
            scenario.schedule.clone(),
            scenario.dt,
            scenario.t_end,
            scenario.decimation,
        )
    })();
    let run = perturbed.and_then(|s| dynamics::run(&s, &s.schedule, s.dt, s.t_end, |_, _, _| {}));
    match run {
        Err(e) => result.outcome = TrialOutcome::Failed(e.to_string()),
        Ok(summary) => {
            let body = summary.last.body;
            result.final_x = body.x;
            result.final_alpha = body.alpha;
            result.outcome = match summary.outcome {
                Outcome::Dropped => TrialOutcome::Dropped,
                Outcome::Ejected => TrialOutcome::Ejected,
                Outcome::Completed => {
                    let error = match success.target {
                        Target::Dx(dx) => (body.x - x0) - dx,
                        Target::Alpha(a) => body.alpha - scenario.initial.alpha - a,
                    };
                    if error.abs() <= success.tolerance {
                        TrialOutcome::Success
                    } else {
                        TrialOutcome::OffTarget
                    }
                }
            };
        }
    }
    result
}

fn check(scenario: &Scenario, perturbation: &PerturbationModel, n: usize, success: &SuccessSpec) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be >= 1".into()));
    }
    if !(success.tolerance >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be >= 0 (got {})", success.tolerance)));
    }
    perturbation.validate_for(scenario)
}

fn report(n: usize, seed: u64, trials: Vec<TrialResult>) -> TrialReport {
    let successes = trials.iter().filter(|t| t.outcome == TrialOutcome::Success).count();
    TrialReport { n, successes, seed, trials }
}

pub fn run_trials_sequential(
    scenario: &Scenario,
    perturbation: &PerturbationModel,
    n: usize,
    success: &SuccessSpec,
) -> Result<TrialReport> {
    check(scenario, perturbation, n, success)?;
    let trials = (0..n as u64)
        .map(|i| run_trial(scenario, perturbation, success, i))
        .collect();
    Ok(report(n, perturbation.seed, trials))
}

#[cfg(feature = "parallel")]
pub fn run_trials_parallel(
    scenario: &Scenario,
    perturbation: &PerturbationModel,
    n: usize,
    success: &SuccessSpec,
) -> Result<TrialReport> {
    use rayon::prelude::*;

    check(scenario, perturbation, n, success)?;
    let trials = (0..n as u64)
        .into_par_iter()
        .map(|i| run_trial(scenario, perturbation, success, i))
        .collect();
    Ok(report(n, perturbation.seed, trials))
}

/// Runs `n` trials, in parallel when the `parallel` feature is on.
pub fn run_trials(
    scenario: &Scenario,
    perturbation: &PerturbationModel,
    n: usize,
    success: &SuccessSpec,
) -> Result<TrialReport> {
    #[cfg(feature = "parallel")]
    {
        run_trials_parallel(scenario, perturbation, n, success)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_sequential(scenario, perturbation, n, success)
    }
}
