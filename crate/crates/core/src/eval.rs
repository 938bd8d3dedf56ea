//! Map-accuracy and servoing metrics, and the success-rate study.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{RunConfig, TrainingSource};
use crate::error::{Error, Result};
use crate::network::{prepare_samples, DmsnnNetwork};
use crate::robotsim::{
    generate_babbling, norm, run_servo_trial, sample_inverse_map, trial_battery, ArmModel, BabbleSample, Controller,
    ServoConfig, TrialRecord, TrialSpec, Vec2,
};

/// Mean Euclidean distance between desired and achieved velocities.
pub fn xi_metric(pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InsufficientData("xi needs at least one velocity pair".into()));
    }
    let mut total = 0.0;
    for (d, e) in pairs {
        if d.len() != e.len() {
            return Err(Error::Contract(format!(
                "velocity dimensions differ ({} vs {})",
                d.len(),
                e.len()
            )));
        }
        total += d
            .iter()
            .zip(e)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
    }
    Ok(total / pairs.len() as f64)
}

/// Largest distance from a point of the executed path to its nearest point
/// of the reference path.
pub fn max_deviation(path: &[Vec2], reference: &[Vec2]) -> Result<f64> {
    if path.is_empty() || reference.is_empty() {
        return Err(Error::InsufficientData("paths must be non-empty".into()));
    }
    let mut e_j = 0.0;
    for c in path {
        let mut e_k = norm([c[0] - reference[0][0], c[1] - reference[0][1]]);
        for w in &reference[1..] {
            let e_ij = norm([c[0] - w[0], c[1] - w[1]]);
            if e_ij <= e_k {
                e_k = e_ij;
            }
        }
        if e_k >= e_j {
            e_j = e_k;
        }
    }
    Ok(e_j)
}

/// Average of the per-trial maximum deviations.
pub fn mean_error(deviations: &[f64]) -> Result<f64> {
    if deviations.is_empty() {
        return Err(Error::InsufficientData("no trials to average".into()));
    }
    Ok(deviations.iter().sum::<f64>() / deviations.len() as f64)
}

/// Sample standard deviation of the per-trial maximum deviations around `e_mean`.
pub fn sigma_servoing(deviations: &[f64], e_mean: f64) -> Result<f64> {
    if deviations.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "standard deviation needs at least 2 trials, got {}",
            deviations.len()
        )));
    }
    let ss: f64 = deviations.iter().map(|d| (d - e_mean) * (d - e_mean)).sum();
    Ok((ss / (deviations.len() - 1) as f64).sqrt())
}

/// Outcome of a servo battery.
#[derive(Debug, Clone, PartialEq)]
pub struct BatterySummary {
    pub trials: Vec<TrialRecord>,
    pub success_pct: f64,
    /// Mean maximum deviation over the successful trials.
    pub e_mean: Option<f64>,
    pub sigma: Option<f64>,
}

impl BatterySummary {
    pub fn from_trials(trials: Vec<TrialRecord>) -> Self {
        let devs: Vec<f64> = trials.iter().filter(|t| t.reached).map(|t| t.delta_max).collect();
        let success_pct = if trials.is_empty() {
            0.0
        } else {
            100.0 * devs.len() as f64 / trials.len() as f64
        };
        let e_mean = mean_error(&devs).ok();
        let sigma = e_mean.and_then(|m| sigma_servoing(&devs, m).ok());
        BatterySummary {
            trials,
            success_pct,
            e_mean,
            sigma,
        }
    }

    pub fn successes(&self) -> usize {
        self.trials.iter().filter(|t| t.reached).count()
    }
}

/// Runs every trial on its own clone of `controller`, on at most `jobs`
/// worker threads. Results come back in trial order whatever `jobs` is.
pub fn run_battery<C>(
    controller: &C,
    arm: &ArmModel,
    specs: &[TrialSpec],
    servo: &ServoConfig,
    jobs: usize,
) -> Result<BatterySummary>
where
    C: Controller + Clone + Send + Sync,
{
    let run = |spec: &TrialSpec| {
        let mut c = controller.clone();
        run_servo_trial(&mut c, arm, spec.theta_0, spec.x_d, servo, spec.seed)
    };
    let trials = if jobs <= 1 {
        specs.iter().map(run).collect::<Result<Vec<_>>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
        pool.install(|| specs.par_iter().map(run).collect::<Result<Vec<_>>>())?
    };
    Ok(BatterySummary::from_trials(trials))
}

/// The battery described by `cfg`: `targets x repeats` approaches.
pub fn battery_specs(cfg: &RunConfig) -> Vec<TrialSpec> {
    trial_battery(
        &cfg.arm,
        cfg.targets,
        cfg.repeats,
        cfg.min_target_distance,
        cfg.network.seed,
    )
}

/// Babbling samples prepared for training as `cfg` prescribes.
pub fn training_samples(cfg: &RunConfig) -> Result<Vec<BabbleSample>> {
    let raw = match cfg.training_source {
        TrainingSource::Babbling => generate_babbling(&cfg.arm, &cfg.babbling)?,
        TrainingSource::RandomPose => {
            let count = cfg.iterations.max(cfg.checkpoints.last().copied().unwrap_or(0));
            sample_inverse_map(&cfg.arm, count, cfg.servo.kappa_x, cfg.babbling.seed)?
        }
    };
    let speed = cfg.normalize_xdot.then_some(cfg.servo.kappa_x);
    let mut samples = prepare_samples(&cfg.network, &raw, speed);
    if cfg.shuffle_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.babbling.seed);
        rng.set_stream(2);
        samples.shuffle(&mut rng);
    }
    if samples.is_empty() {
        return Err(Error::InsufficientData(
            "no babbling sample falls inside the configured ranges".into(),
        ));
    }
    Ok(samples)
}

/// One point of a success-rate curve.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    /// Motor `b` of the run.
    pub b: f64,
    pub checkpoint: usize,
    pub success_pct: f64,
    /// Reported only when more than 80% of the trials succeed.
    pub e_mean: Option<f64>,
    pub sigma: Option<f64>,
}

/// Success rate against training iterations, one curve per motor `b`.
///
/// Each curve trains one network and runs the battery from a frozen copy at
/// every checkpoint. `on_point` sees each point as soon as it is measured.
pub fn success_curve<F>(cfg: &RunConfig, b_values: &[f64], jobs: usize, mut on_point: F) -> Result<Vec<CurvePoint>>
where
    F: FnMut(&CurvePoint),
{
    if cfg.checkpoints.is_empty() {
        return Err(Error::Config("no checkpoints".into()));
    }
    if b_values.is_empty() {
        return Err(Error::Config("no motor b values".into()));
    }
    let samples = training_samples(cfg)?;
    let specs = battery_specs(cfg);
    if specs.is_empty() {
        return Err(Error::Config("the battery has no trials".into()));
    }
    let mut points = Vec::new();
    for &b in b_values {
        let mut net_cfg = cfg.network.clone();
        net_cfg.motor.b = b;
        let mut net = DmsnnNetwork::build(net_cfg)?;
        for &checkpoint in &cfg.checkpoints {
            let todo = checkpoint.saturating_sub(net.iterations());
            net.train(&samples, todo, |_, _| {})?;
            let summary = run_battery(&net, &cfg.arm, &specs, &cfg.servo, jobs)?;
            let report = summary.success_pct > 80.0;
            let point = CurvePoint {
                b,
                checkpoint,
                success_pct: summary.success_pct,
                e_mean: summary.e_mean.filter(|_| report),
                sigma: summary.sigma.filter(|_| report),
            };
            on_point(&point);
            points.push(point);
        }
    }
    Ok(points)
}

pub const CURVE_CSV_HEADER: &str = "b,checkpoint,success_pct,e_mean,sigma";
pub const TRIALS_CSV_HEADER: &str = "trial,target_x1,target_x2,reached,delta_max,time_s";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

pub fn write_curve_csv<W: Write>(out: &mut W, points: &[CurvePoint]) -> std::io::Result<()> {
    writeln!(out, "{CURVE_CSV_HEADER}")?;
    for p in points {
        writeln!(
            out,
            "{},{},{:.2},{},{}",
            p.b,
            p.checkpoint,
            p.success_pct,
            opt(p.e_mean),
            opt(p.sigma)
        )?;
    }
    Ok(())
}

pub fn write_trials_csv<W: Write>(out: &mut W, trials: &[TrialRecord]) -> std::io::Result<()> {
    writeln!(out, "{TRIALS_CSV_HEADER}")?;
    for (i, t) in trials.iter().enumerate() {
        writeln!(
            out,
            "{},{:.9},{:.9},{},{:.9e},{:.2}",
            i, t.x_d[0], t.x_d[1], t.reached, t.delta_max, t.time_s
        )?;
    }
    Ok(())
}

/// Averages of every `width` consecutive values.
pub fn moving_average(values: &[f64], width: usize) -> Vec<f64> {
    if width == 0 || values.len() < width {
        return Vec::new();
    }
    values
        .windows(width)
        .map(|w| w.iter().sum::<f64>() / width as f64)
        .collect()
}
