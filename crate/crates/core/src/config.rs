//! Flat `key = value` configuration.
//!
//! One format serves the run configuration read by the command-line tool and
//! the effective-configuration header echoed into every output file. Lines
//! starting with `#` are comments; unknown keys are rejected and missing keys
//! keep their defaults.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::izhikevich::NeuronParams;
use crate::network::NetworkConfig;
use crate::plasticity::{ExponentSign, PairingScheme, StdpRule};
use crate::robotsim::{ArmModel, BabblingConfig, ServoConfig};

/// Where training samples come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainingSource {
    /// Joint-space babbling trajectories.
    Babbling,
    /// Independent random poses with random task-space directions.
    RandomPose,
}

/// Everything one experiment run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub network: NetworkConfig,
    pub arm: ArmModel,
    pub babbling: BabblingConfig,
    pub servo: ServoConfig,
    /// Training iterations.
    pub iterations: usize,
    /// Targets of the servo battery.
    pub targets: usize,
    /// Approaches per target.
    pub repeats: usize,
    /// Shortest start-to-target distance in the battery (m).
    pub min_target_distance: f64,
    /// Rescale training samples to the servo speed before encoding them.
    pub normalize_xdot: bool,
    /// Present the babbling samples in a seeded random order.
    pub shuffle_samples: bool,
    pub training_source: TrainingSource,
    /// Success-curve checkpoints (training iterations).
    pub checkpoints: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            network: NetworkConfig::planar_2dof(),
            arm: ArmModel::default(),
            babbling: BabblingConfig::default(),
            servo: ServoConfig::default(),
            iterations: 3000,
            targets: 15,
            repeats: 5,
            min_target_distance: 0.02,
            normalize_xdot: true,
            shuffle_samples: true,
            training_source: TrainingSource::RandomPose,
            checkpoints: (2..=12).map(|k| k * 250).collect(),
        }
    }
}

/// A parsed `key = value` line with its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Splits `key = value` text into entries; blank lines and `#` comments
/// are skipped.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(split_entry(line, idx + 1)?);
    }
    Ok(out)
}

pub(crate) fn split_entry(line: &str, number: usize) -> Result<Entry> {
    let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
        line: number,
        message: format!("expected `key = value`, found `{line}`"),
    })?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Parse {
            line: number,
            message: "empty key".into(),
        });
    }
    Ok(Entry {
        key: key.to_string(),
        value: value.trim().to_string(),
        line: number,
    })
}

fn bad(entry: &Entry, what: &str) -> Error {
    Error::Parse {
        line: entry.line,
        message: format!("`{}` for key `{}`: {what}", entry.value, entry.key),
    }
}

fn f(entry: &Entry) -> Result<f64> {
    entry
        .value
        .parse::<f64>()
        .map_err(|_| bad(entry, "expected a number"))
}

fn u(entry: &Entry) -> Result<usize> {
    entry
        .value
        .parse::<usize>()
        .map_err(|_| bad(entry, "expected a non-negative integer"))
}

fn u64_of(entry: &Entry) -> Result<u64> {
    entry
        .value
        .parse::<u64>()
        .map_err(|_| bad(entry, "expected a non-negative integer"))
}

fn boolean(entry: &Entry) -> Result<bool> {
    match entry.value.as_str() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(bad(entry, "expected true or false")),
    }
}

fn parse_range(s: &str) -> Option<(f64, f64)> {
    let (a, b) = s.split_once(':')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn ranges(entry: &Entry) -> Result<Vec<(f64, f64)>> {
    entry
        .value
        .split(';')
        .map(|r| parse_range(r).ok_or_else(|| bad(entry, "expected `lo:hi;lo:hi;...`")))
        .collect()
}

fn fmt_ranges(r: &[(f64, f64)]) -> String {
    r.iter()
        .map(|(a, b)| format!("{a:?}:{b:?}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Parses a checkpoint list, either `a,b,c` or `start:stop:step`.
pub fn parse_checkpoints(s: &str) -> Option<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Some(Vec::new());
    }
    if let Some((start, rest)) = s.split_once(':') {
        let (stop, step) = rest.split_once(':')?;
        let (start, stop, step): (usize, usize, usize) =
            (start.trim().parse().ok()?, stop.trim().parse().ok()?, step.trim().parse().ok()?);
        if step == 0 {
            return None;
        }
        return Some((start..=stop).step_by(step).collect());
    }
    s.split(',').map(|x| x.trim().parse().ok()).collect()
}

fn apply_params(p: &mut NeuronParams, field: &str, v: f64) -> bool {
    match field {
        "a" => p.a = v,
        "b" => p.b = v,
        "c" => p.c = v,
        "d" => p.d = v,
        _ => return false,
    }
    true
}

/// Applies one network key; returns `Ok(false)` if the key is not a network key.
pub fn apply_network_entry(cfg: &mut NetworkConfig, e: &Entry) -> Result<bool> {
    let s = &mut cfg.stdp;
    match e.key.as_str() {
        "n" => cfg.n = u(e)?,
        "m" => cfg.m = u(e)?,
        "n_l" => cfg.n_l = u(e)?,
        k if k.starts_with("sensory_") => {
            if !apply_params(&mut cfg.sensory, &k["sensory_".len()..], f(e)?) {
                return Ok(false);
            }
        }
        k if k.starts_with("motor_") => {
            if !apply_params(&mut cfg.motor, &k["motor_".len()..], f(e)?) {
                return Ok(false);
            }
        }
        "stdp_rule" => {
            s.rule = match e.value.as_str() {
                "symmetric" => StdpRule::Symmetric,
                "asymmetric" => StdpRule::Asymmetric,
                _ => return Err(bad(e, "expected symmetric or asymmetric")),
            }
        }
        "stdp_s" => s.s = f(e)?,
        "stdp_tau1" => s.tau1 = f(e)?,
        "stdp_tau2" => s.tau2 = f(e)?,
        "stdp_s_a" => s.s_a = f(e)?,
        "stdp_s_b" => s.s_b = f(e)?,
        "stdp_tau_a" => s.tau_a = f(e)?,
        "stdp_tau_b" => s.tau_b = f(e)?,
        "stdp_window" => s.window = f(e)?,
        "stdp_exponent" => {
            s.exponent_sign = match e.value.as_str() {
                "decay" => ExponentSign::Decay,
                "growth" => ExponentSign::Growth,
                _ => return Err(bad(e, "expected decay or growth")),
            }
        }
        "stdp_pairing" => {
            s.pairing = match e.value.as_str() {
                "nearest" => PairingScheme::Nearest,
                "all-to-all" => PairingScheme::AllToAll,
                _ => return Err(bad(e, "expected nearest or all-to-all")),
            }
        }
        "c_i" => cfg.c_i = f(e)?,
        "c_e" => cfg.c_e = f(e)?,
        "sigma_n" => cfg.sigma_n = f(e)?,
        "iteration_ms" => cfg.iteration_ms = f(e)?,
        "decode_window_ms" => cfg.decode_window_ms = f(e)?,
        "dt" => cfg.dt = f(e)?,
        "gain" => cfg.gain = f(e)?,
        "sigma_scale" => cfg.sigma_scale = f(e)?,
        "theta_ranges" => cfg.theta_ranges = ranges(e)?,
        "xdot_ranges" => cfg.xdot_ranges = ranges(e)?,
        "thetadot_ranges" => cfg.thetadot_ranges = ranges(e)?,
        "syn_gain" => cfg.syn_gain = f(e)?,
        "syn_tau_ms" => cfg.syn_tau_ms = f(e)?,
        "lateral_gain" => cfg.lateral_gain = f(e)?,
        "lateral_tau_ms" => cfg.lateral_tau_ms = f(e)?,
        "noise_current" => cfg.noise_current = f(e)?,
        "init_weight_fraction" => cfg.init_weight_fraction = f(e)?,
        "seed" => cfg.seed = u64_of(e)?,
        _ => return Ok(false),
    }
    Ok(true)
}

/// Network configuration as ordered `(key, value)` pairs. Floats use the
/// shortest representation that parses back to the same bits.
pub fn network_pairs(cfg: &NetworkConfig) -> Vec<(String, String)> {
    let s = &cfg.stdp;
    let mut v: Vec<(&str, String)> = vec![
        ("n", cfg.n.to_string()),
        ("m", cfg.m.to_string()),
        ("n_l", cfg.n_l.to_string()),
    ];
    for (prefix, p) in [("sensory", &cfg.sensory), ("motor", &cfg.motor)] {
        for (name, x) in [("a", p.a), ("b", p.b), ("c", p.c), ("d", p.d)] {
            v.push((
                match (prefix, name) {
                    ("sensory", "a") => "sensory_a",
                    ("sensory", "b") => "sensory_b",
                    ("sensory", "c") => "sensory_c",
                    ("sensory", _) => "sensory_d",
                    (_, "a") => "motor_a",
                    (_, "b") => "motor_b",
                    (_, "c") => "motor_c",
                    _ => "motor_d",
                },
                format!("{x:?}"),
            ));
        }
    }
    v.extend([
        (
            "stdp_rule",
            match s.rule {
                StdpRule::Symmetric => "symmetric",
                StdpRule::Asymmetric => "asymmetric",
            }
            .to_string(),
        ),
        ("stdp_s", format!("{:?}", s.s)),
        ("stdp_tau1", format!("{:?}", s.tau1)),
        ("stdp_tau2", format!("{:?}", s.tau2)),
        ("stdp_s_a", format!("{:?}", s.s_a)),
        ("stdp_s_b", format!("{:?}", s.s_b)),
        ("stdp_tau_a", format!("{:?}", s.tau_a)),
        ("stdp_tau_b", format!("{:?}", s.tau_b)),
        ("stdp_window", format!("{:?}", s.window)),
        (
            "stdp_exponent",
            match s.exponent_sign {
                ExponentSign::Decay => "decay",
                ExponentSign::Growth => "growth",
            }
            .to_string(),
        ),
        (
            "stdp_pairing",
            match s.pairing {
                PairingScheme::Nearest => "nearest",
                PairingScheme::AllToAll => "all-to-all",
            }
            .to_string(),
        ),
        ("c_i", format!("{:?}", cfg.c_i)),
        ("c_e", format!("{:?}", cfg.c_e)),
        ("sigma_n", format!("{:?}", cfg.sigma_n)),
        ("iteration_ms", format!("{:?}", cfg.iteration_ms)),
        ("decode_window_ms", format!("{:?}", cfg.decode_window_ms)),
        ("dt", format!("{:?}", cfg.dt)),
        ("gain", format!("{:?}", cfg.gain)),
        ("sigma_scale", format!("{:?}", cfg.sigma_scale)),
        ("theta_ranges", fmt_ranges(&cfg.theta_ranges)),
        ("xdot_ranges", fmt_ranges(&cfg.xdot_ranges)),
        ("thetadot_ranges", fmt_ranges(&cfg.thetadot_ranges)),
        ("syn_gain", format!("{:?}", cfg.syn_gain)),
        ("syn_tau_ms", format!("{:?}", cfg.syn_tau_ms)),
        ("lateral_gain", format!("{:?}", cfg.lateral_gain)),
        ("lateral_tau_ms", format!("{:?}", cfg.lateral_tau_ms)),
        ("noise_current", format!("{:?}", cfg.noise_current)),
        ("init_weight_fraction", format!("{:?}", cfg.init_weight_fraction)),
        ("seed", cfg.seed.to_string()),
    ]);
    v.into_iter().map(|(k, x)| (k.to_string(), x)).collect()
}

impl RunConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for e in parse_entries(text)? {
            cfg.apply(&e)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.arm.validate()?;
        if self.network.n != 2 || self.network.m != 2 {
            return Err(Error::Config("the planar arm experiments need n = m = 2".into()));
        }
        if !(self.servo.dt_ctrl > 0.0 && self.servo.threshold > 0.0 && self.servo.max_time > 0.0) {
            return Err(Error::Config("servo period, threshold and time budget must be positive".into()));
        }
        if !self.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config("checkpoints must be strictly ascending".into()));
        }
        Ok(())
    }

    /// Applies one entry, rejecting unknown keys.
    pub fn apply(&mut self, e: &Entry) -> Result<()> {
        if apply_network_entry(&mut self.network, e)? {
            return Ok(());
        }
        match e.key.as_str() {
            "l1" => self.arm.l1 = f(e)?,
            "l2" => self.arm.l2 = f(e)?,
            "joint_limits" => {
                let r = ranges(e)?;
                if r.len() != 2 {
                    return Err(bad(e, "expected two joint ranges"));
                }
                self.arm.joint_limits = [r[0], r[1]];
            }
            "det_epsilon" => self.arm.det_epsilon = f(e)?,
            "babble_targets" => self.babbling.n_targets = u(e)?,
            "babble_kappa" => {
                self.babbling.kappa_range =
                    parse_range(&e.value).ok_or_else(|| bad(e, "expected `lo:hi`"))?
            }
            "babble_dt" => self.babbling.dt = f(e)?,
            "babble_noise" => self.babbling.noise_sigma = f(e)?,
            "babble_seed" => self.babbling.seed = u64_of(e)?,
            "filter_lambda" => {
                self.babbling.filter_lambda = f(e)?;
                self.servo.filter_lambda = self.babbling.filter_lambda;
            }
            "threshold" => self.servo.threshold = f(e)?,
            "max_time" => self.servo.max_time = f(e)?,
            "dt_ctrl" => self.servo.dt_ctrl = f(e)?,
            "kappa_x" => self.servo.kappa_x = f(e)?,
            "measurement_noise" => self.servo.measurement_noise = f(e)?,
            "reference_spacing" => self.servo.reference_spacing = f(e)?,
            "iterations" => self.iterations = u(e)?,
            "targets" => self.targets = u(e)?,
            "repeats" => self.repeats = u(e)?,
            "min_target_distance" => self.min_target_distance = f(e)?,
            "normalize_xdot" => self.normalize_xdot = boolean(e)?,
            "shuffle_samples" => self.shuffle_samples = boolean(e)?,
            "training_source" => {
                self.training_source = match e.value.as_str() {
                    "babbling" => TrainingSource::Babbling,
                    "random-pose" => TrainingSource::RandomPose,
                    _ => return Err(bad(e, "expected babbling or random-pose")),
                }
            }
            "checkpoints" => {
                self.checkpoints = parse_checkpoints(&e.value)
                    .ok_or_else(|| bad(e, "expected `a,b,c` or `start:stop:step`"))?
            }
            _ => {
                return Err(Error::Parse {
                    line: e.line,
                    message: format!("unknown key `{}`", e.key),
                })
            }
        }
        Ok(())
    }

    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut v = network_pairs(&self.network);
        let b = &self.babbling;
        let s = &self.servo;
        let extra: Vec<(&str, String)> = vec![
            ("l1", format!("{:?}", self.arm.l1)),
            ("l2", format!("{:?}", self.arm.l2)),
            ("joint_limits", fmt_ranges(&self.arm.joint_limits)),
            ("det_epsilon", format!("{:?}", self.arm.det_epsilon)),
            ("babble_targets", b.n_targets.to_string()),
            ("babble_kappa", format!("{:?}:{:?}", b.kappa_range.0, b.kappa_range.1)),
            ("babble_dt", format!("{:?}", b.dt)),
            ("babble_noise", format!("{:?}", b.noise_sigma)),
            ("babble_seed", b.seed.to_string()),
            ("filter_lambda", format!("{:?}", b.filter_lambda)),
            ("threshold", format!("{:?}", s.threshold)),
            ("max_time", format!("{:?}", s.max_time)),
            ("dt_ctrl", format!("{:?}", s.dt_ctrl)),
            ("kappa_x", format!("{:?}", s.kappa_x)),
            ("measurement_noise", format!("{:?}", s.measurement_noise)),
            ("reference_spacing", format!("{:?}", s.reference_spacing)),
            ("iterations", self.iterations.to_string()),
            ("targets", self.targets.to_string()),
            ("repeats", self.repeats.to_string()),
            ("min_target_distance", format!("{:?}", self.min_target_distance)),
            ("normalize_xdot", self.normalize_xdot.to_string()),
            ("shuffle_samples", self.shuffle_samples.to_string()),
            (
                "training_source",
                match self.training_source {
                    TrainingSource::Babbling => "babbling",
                    TrainingSource::RandomPose => "random-pose",
                }
                .to_string(),
            ),
            (
                "checkpoints",
                self.checkpoints
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        ];
        v.extend(extra.into_iter().map(|(k, x)| (k.to_string(), x)));
        v
    }

    /// The effective configuration as `key = value` text.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.pairs() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    /// The effective configuration as `#key=value` header comments.
    pub fn header(&self) -> String {
        header_lines(&self.pairs())
    }

    /// Sets the seed of the network, the babbling stream and the battery.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.network.seed = seed;
        self.babbling.seed = seed;
        self
    }
}

pub(crate) fn header_lines(pairs: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        let _ = writeln!(s, "#{k}={v}");
    }
    s
}
