//! Two-link planar arm: kinematics, motor babbling and the servo loop.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{ensure_finite, Error, Result};
use crate::izhikevich::Mat2;

pub type Vec2 = [f64; 2];

/// Regularizer added to the Jacobian determinant near singular poses.
pub const DET_EPSILON: f64 = 1e-5;

#[inline]
pub fn norm(v: Vec2) -> f64 {
    v[0].hypot(v[1])
}

#[inline]
fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn mat_vec(m: &Mat2, v: Vec2) -> Vec2 {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmModel {
    pub l1: f64,
    pub l2: f64,
    pub joint_limits: [(f64, f64); 2],
    pub det_epsilon: f64,
}

impl Default for ArmModel {
    fn default() -> Self {
        ArmModel {
            l1: 0.3,
            l2: 0.25,
            joint_limits: [(0.0, std::f64::consts::FRAC_PI_3), (0.6, 1.8)],
            det_epsilon: DET_EPSILON,
        }
    }
}

impl ArmModel {
    pub fn new(l1: f64, l2: f64, joint_limits: [(f64, f64); 2]) -> Result<Self> {
        let arm = ArmModel {
            l1,
            l2,
            joint_limits,
            det_epsilon: DET_EPSILON,
        };
        arm.validate()?;
        Ok(arm)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l1 > 0.0 && self.l2 > 0.0) {
            return Err(Error::Config(format!(
                "link lengths must be positive, got ({}, {})",
                self.l1, self.l2
            )));
        }
        if !(self.det_epsilon > 0.0) {
            return Err(Error::Config("det_epsilon must be positive".into()));
        }
        for (i, (lo, hi)) in self.joint_limits.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("joint {} limits [{lo}, {hi}] are invalid", i + 1)));
            }
        }
        Ok(())
    }

    pub fn forward_kinematics(&self, theta: Vec2) -> Vec2 {
        let t12 = theta[0] + theta[1];
        [
            self.l1 * theta[0].cos() + self.l2 * t12.cos(),
            self.l1 * theta[0].sin() + self.l2 * t12.sin(),
        ]
    }

    pub fn jacobian(&self, theta: Vec2) -> Mat2 {
        let (s1, c1) = theta[0].sin_cos();
        let (s12, c12) = (theta[0] + theta[1]).sin_cos();
        [
            [-self.l1 * s1 - self.l2 * s12, -self.l2 * s12],
            [self.l1 * c1 + self.l2 * c12, self.l2 * c12],
        ]
    }

    /// Inverse of the Jacobian with `det_epsilon` added to the determinant
    /// (away from zero), so singular poses give bounded joint velocities.
    pub fn inverse_jacobian(&self, theta: Vec2) -> Mat2 {
        let j = self.jacobian(theta);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let sign = if det < 0.0 { -1.0 } else { 1.0 };
        let inv = 1.0 / (det + self.det_epsilon * sign);
        [
            [j[1][1] * inv, -j[0][1] * inv],
            [-j[1][0] * inv, j[0][0] * inv],
        ]
    }

    pub fn clamp_to_limits(&self, theta: Vec2) -> Vec2 {
        [
            theta[0].clamp(self.joint_limits[0].0, self.joint_limits[0].1),
            theta[1].clamp(self.joint_limits[1].0, self.joint_limits[1].1),
        ]
    }

    pub fn within_limits(&self, theta: Vec2) -> bool {
        theta
            .iter()
            .zip(&self.joint_limits)
            .all(|(t, (lo, hi))| *t >= *lo && *t <= *hi)
    }

    /// Joint angles within limits that place the end effector at `x`, if any.
    pub fn inverse_kinematics(&self, x: Vec2) -> Option<Vec2> {
        let r2 = x[0] * x[0] + x[1] * x[1];
        let c2 = (r2 - self.l1 * self.l1 - self.l2 * self.l2) / (2.0 * self.l1 * self.l2);
        if !(-1.0..=1.0).contains(&c2) {
            return None;
        }
        let tau = std::f64::consts::TAU;
        for elbow in [1.0, -1.0] {
            let t2 = elbow * c2.acos();
            let t1 = x[1].atan2(x[0]) - (self.l2 * t2.sin()).atan2(self.l1 + self.l2 * t2.cos());
            for k in [-1.0, 0.0, 1.0] {
                let cand = [t1 + k * tau, t2];
                if self.within_limits(cand) {
                    return Some(cand);
                }
            }
        }
        None
    }

    /// Uniform joint configuration within limits.
    pub fn sample_configuration<R: Rng>(&self, rng: &mut R) -> Vec2 {
        let [(a0, a1), (b0, b1)] = self.joint_limits;
        [rng.random_range(a0..=a1), rng.random_range(b0..=b1)]
    }

    /// True when the straight segment from `a` to `b` stays inside the
    /// reachable workspace (checked at `checks` evenly spaced points).
    pub fn segment_reachable(&self, a: Vec2, b: Vec2, checks: usize) -> bool {
        (0..=checks).all(|k| {
            let s = k as f64 / checks as f64;
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            self.inverse_kinematics(p).is_some()
        })
    }
}

/// Joint-space babbling command `kappa * e / |e|`; zero once on target.
pub fn babble_command(theta: Vec2, theta_d: Vec2, kappa_theta: f64) -> Vec2 {
    unit_command(sub(theta_d, theta), kappa_theta)
}

/// Task-space servo command `kappa * e / |e|`; zero once on target.
pub fn servo_command(x: Vec2, x_d: Vec2, kappa_x: f64) -> Vec2 {
    unit_command(sub(x_d, x), kappa_x)
}

fn unit_command(e: Vec2, kappa: f64) -> Vec2 {
    let n = norm(e);
    if n < 1e-9 {
        [0.0, 0.0]
    } else {
        [kappa * e[0] / n, kappa * e[1] / n]
    }
}

/// First-order measurement filter `s_f - lambda (s_f - s)`.
pub fn low_pass(s_f: f64, s: f64, lambda: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Config(format!("filter gain must lie in [0, 1], got {lambda}")));
    }
    Ok(s_f - lambda * (s_f - s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BabbleSample {
    /// Seconds since the start of babbling.
    pub t: f64,
    pub theta: Vec2,
    pub xdot: Vec2,
    pub thetadot: Vec2,
}

impl BabbleSample {
    /// Rescales the sample so that `|xdot| = speed`; the ratio `xdot / thetadot`
    /// (the differential map) is preserved. Returns `None` for a stalled sample.
    pub fn normalized(&self, speed: f64) -> Option<BabbleSample> {
        let n = norm(self.xdot);
        if n < 1e-9 {
            return None;
        }
        let k = speed / n;
        Some(BabbleSample {
            xdot: [self.xdot[0] * k, self.xdot[1] * k],
            thetadot: [self.thetadot[0] * k, self.thetadot[1] * k],
            ..*self
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BabblingConfig {
    pub n_targets: usize,
    /// Range of the joint-space babbling gain (rad/s).
    pub kappa_range: (f64, f64),
    /// Sampling period (s).
    pub dt: f64,
    /// Standard deviation of the additive noise on measured `xdot` (m/s).
    pub noise_sigma: f64,
    /// Gain of the first-order filter applied to noisy measurements.
    pub filter_lambda: f64,
    pub seed: u64,
}

impl Default for BabblingConfig {
    fn default() -> Self {
        BabblingConfig {
            n_targets: 100,
            kappa_range: (0.2, 1.0),
            dt: 0.04,
            noise_sigma: 0.005,
            filter_lambda: 0.3,
            seed: 1,
        }
    }
}

/// Drives the arm linearly in joint space through random targets and
/// records joint angles, measured spatial velocity and joint velocity.
///
/// Noisy measurements pass through [`low_pass`]; with `noise_sigma = 0` the
/// measurement is exact and `xdot = J(theta) thetadot` holds for every sample.
pub fn generate_babbling(arm: &ArmModel, cfg: &BabblingConfig) -> Result<Vec<BabbleSample>> {
    let (k_lo, k_hi) = cfg.kappa_range;
    if !(k_lo > 0.0 && k_lo <= k_hi && k_hi.is_finite()) {
        return Err(Error::Config(format!("kappa range [{k_lo}, {k_hi}] is empty or non-positive")));
    }
    if cfg.n_targets == 0 {
        return Err(Error::Config("babbling needs at least one target".into()));
    }
    if !(cfg.dt > 0.0) {
        return Err(Error::Config(format!("sampling period must be positive, got {}", cfg.dt)));
    }
    if !(cfg.noise_sigma >= 0.0) {
        return Err(Error::Config("noise sigma must be non-negative".into()));
    }
    low_pass(0.0, 0.0, cfg.filter_lambda)?;
    arm.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, cfg.noise_sigma.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Config(e.to_string()))?;
    let mut theta = [
        0.5 * (arm.joint_limits[0].0 + arm.joint_limits[0].1),
        0.5 * (arm.joint_limits[1].0 + arm.joint_limits[1].1),
    ];
    let mut filtered: Option<Vec2> = None;
    let mut samples = Vec::new();
    let mut t = 0.0;
    for _ in 0..cfg.n_targets {
        let theta_d = arm.sample_configuration(&mut rng);
        let kappa = if k_hi > k_lo { rng.random_range(k_lo..=k_hi) } else { k_lo };
        loop {
            let remaining = norm(sub(theta_d, theta));
            if remaining <= kappa * cfg.dt {
                theta = theta_d;
                break;
            }
            let omega = babble_command(theta, theta_d, kappa);
            let true_xdot = mat_vec(&arm.jacobian(theta), omega);
            let xdot = if cfg.noise_sigma > 0.0 {
                let raw = [
                    true_xdot[0] + noise.sample(&mut rng),
                    true_xdot[1] + noise.sample(&mut rng),
                ];
                let f = match filtered {
                    None => raw,
                    Some(prev) => [
                        low_pass(prev[0], raw[0], cfg.filter_lambda)?,
                        low_pass(prev[1], raw[1], cfg.filter_lambda)?,
                    ],
                };
                filtered = Some(f);
                f
            } else {
                true_xdot
            };
            samples.push(BabbleSample {
                t,
                theta,
                xdot,
                thetadot: omega,
            });
            theta = arm.clamp_to_limits([theta[0] + omega[0] * cfg.dt, theta[1] + omega[1] * cfg.dt]);
            t += cfg.dt;
        }
    }
    Ok(samples)
}

/// Samples of the inverse differential map at random poses: `theta` uniform
/// within the joint limits, `xdot` of norm `speed` in a uniformly random
/// direction, and `thetadot = J#(theta) xdot`.
pub fn sample_inverse_map(arm: &ArmModel, count: usize, speed: f64, seed: u64) -> Result<Vec<BabbleSample>> {
    arm.validate()?;
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(Error::Config(format!("speed must be positive, got {speed}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let theta = arm.sample_configuration(&mut rng);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let xdot = [speed * phi.cos(), speed * phi.sin()];
        out.push(BabbleSample {
            t: k as f64,
            theta,
            xdot,
            thetadot: mat_vec(&arm.inverse_jacobian(theta), xdot),
        });
    }
    Ok(out)
}

pub const BABBLING_CSV_HEADER: &str = "t,theta1,theta2,xdot1,xdot2,thetadot1,thetadot2";

pub fn write_babbling_csv<W: Write>(out: &mut W, samples: &[BabbleSample]) -> std::io::Result<()> {
    writeln!(out, "{BABBLING_CSV_HEADER}")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.t, s.theta[0], s.theta[1], s.xdot[0], s.xdot[1], s.thetadot[0], s.thetadot[1]
        )?;
    }
    Ok(())
}

/// Anything that turns a joint state and desired spatial velocity into a
/// joint-velocity command.
pub trait Controller {
    fn joint_velocity(&mut self, theta: Vec2, v_d: Vec2) -> Result<Vec2>;

    /// Called before each trial.
    fn reset(&mut self) {}
}

/// Analytic controller `thetadot = J#(theta) v_d`; validates the servo
/// harness independently of any learned map.
#[derive(Debug, Clone, Copy)]
pub struct OracleController {
    pub arm: ArmModel,
}

impl Controller for OracleController {
    fn joint_velocity(&mut self, theta: Vec2, v_d: Vec2) -> Result<Vec2> {
        Ok(mat_vec(&self.arm.inverse_jacobian(theta), v_d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServoConfig {
    /// Success radius around the target (m).
    pub threshold: f64,
    /// Simulated time budget per trial (s).
    pub max_time: f64,
    /// Control period (s).
    pub dt_ctrl: f64,
    /// Task-space speed of the servo command (m/s).
    pub kappa_x: f64,
    /// Standard deviation of position measurement noise (m); 0 disables it.
    pub measurement_noise: f64,
    pub filter_lambda: f64,
    /// Spacing of the discretized reference segment used for deviations (m).
    pub reference_spacing: f64,
}

impl Default for ServoConfig {
    fn default() -> Self {
        ServoConfig {
            threshold: 1e-3,
            max_time: 60.0,
            dt_ctrl: 0.02,
            kappa_x: 0.05,
            measurement_noise: 0.0,
            filter_lambda: 0.3,
            reference_spacing: 2e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub x_i: Vec2,
    pub x_d: Vec2,
    /// `(t, x)` samples, starting at the initial position.
    pub path: Vec<(f64, Vec2)>,
    pub reached: bool,
    pub delta_max: f64,
    pub time_s: f64,
    pub final_error: f64,
}

/// Straight reference segment from `a` to `b` as evenly spaced points.
pub fn reference_segment(a: Vec2, b: Vec2, spacing: f64) -> Vec<Vec2> {
    let n = ((norm(sub(b, a)) / spacing).ceil() as usize).max(1);
    (0..=n)
        .map(|k| {
            let s = k as f64 / n as f64;
            [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
        })
        .collect()
}

/// Servos the arm from `theta_0` towards `x_d` until the end effector is
/// within `threshold` or the time budget runs out.
pub fn run_servo_trial<C: Controller + ?Sized>(
    controller: &mut C,
    arm: &ArmModel,
    theta_0: Vec2,
    x_d: Vec2,
    cfg: &ServoConfig,
    seed: u64,
) -> Result<TrialRecord> {
    ensure_finite(x_d[0], "target")?;
    ensure_finite(x_d[1], "target")?;
    controller.reset();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, cfg.measurement_noise.max(f64::MIN_POSITIVE))
        .map_err(|e| Error::Config(e.to_string()))?;

    let mut theta = arm.clamp_to_limits(theta_0);
    let x_i = arm.forward_kinematics(theta);
    let mut path = vec![(0.0, x_i)];
    let mut measured = x_i;
    let max_steps = (cfg.max_time / cfg.dt_ctrl).round() as usize;
    let mut step = 0;
    let mut reached = false;
    loop {
        let x = arm.forward_kinematics(theta);
        if norm(sub(x_d, x)) < cfg.threshold {
            reached = true;
            break;
        }
        if step >= max_steps {
            break;
        }
        if cfg.measurement_noise > 0.0 {
            let raw = [x[0] + noise.sample(&mut rng), x[1] + noise.sample(&mut rng)];
            measured = [
                low_pass(measured[0], raw[0], cfg.filter_lambda)?,
                low_pass(measured[1], raw[1], cfg.filter_lambda)?,
            ];
        } else {
            measured = x;
        }
        let v_d = servo_command(measured, x_d, cfg.kappa_x);
        let thetadot = controller.joint_velocity(theta, v_d)?;
        theta = arm.clamp_to_limits([
            theta[0] + thetadot[0] * cfg.dt_ctrl,
            theta[1] + thetadot[1] * cfg.dt_ctrl,
        ]);
        step += 1;
        path.push((step as f64 * cfg.dt_ctrl, arm.forward_kinematics(theta)));
    }
    let points: Vec<Vec2> = path.iter().map(|p| p.1).collect();
    let reference = reference_segment(x_i, x_d, cfg.reference_spacing);
    let delta_max = crate::eval::max_deviation(&points, &reference)?;
    let last = path.last().map(|p| p.1).unwrap_or(x_i);
    Ok(TrialRecord {
        x_i,
        x_d,
        reached,
        delta_max,
        time_s: step as f64 * cfg.dt_ctrl,
        final_error: norm(sub(x_d, last)),
        path,
    })
}

pub const TRAJECTORY_CSV_HEADER: &str = "t,x1,x2,e_norm";

pub fn write_trajectory_csv<W: Write>(out: &mut W, trial: &TrialRecord) -> std::io::Result<()> {
    writeln!(out, "{TRAJECTORY_CSV_HEADER}")?;
    for (t, x) in &trial.path {
        writeln!(out, "{},{},{},{}", t, x[0], x[1], norm(sub(trial.x_d, *x)))?;
    }
    Ok(())
}

/// One trial of a servo battery: a start pose and a target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    pub index: usize,
    pub theta_0: Vec2,
    pub x_d: Vec2,
    pub seed: u64,
}

/// `targets` random targets, each approached `repeats` times from a fresh
/// random start. Every start/target segment lies inside the workspace and
/// is at least `min_distance` long.
pub fn trial_battery(
    arm: &ArmModel,
    targets: usize,
    repeats: usize,
    min_distance: f64,
    seed: u64,
) -> Vec<TrialSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut specs = Vec::with_capacity(targets * repeats);
    for _ in 0..targets {
        let x_d = arm.forward_kinematics(arm.sample_configuration(&mut rng));
        for _ in 0..repeats {
            let theta_0 = loop {
                let cand = arm.sample_configuration(&mut rng);
                let x0 = arm.forward_kinematics(cand);
                if norm(sub(x_d, x0)) >= min_distance && arm.segment_reachable(x0, x_d, 40) {
                    break cand;
                }
            };
            let index = specs.len();
            specs.push(TrialSpec {
                index,
                theta_0,
                x_d,
                seed: seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index as u64 + 1)),
            });
        }
    }
    specs
}
