//! Learning `n1 + n2` with the same two-layer machinery as the arm map.
//!
//! Two layouts are compared: two one-dimensional input bundles (`2 N`
//! neurons) and one joint layer of `N x N` neurons driven by the outer
//! product of the two encodings. Either way the output is a bundle over
//! `[2 lo, 2 hi]` taught with the true sum during training.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::engine::SpikingCore;
use super::NetworkConfig;
use crate::coding::{activation_to_current, encode_joint_2d, Bundle};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Separate1d,
    Joint2d,
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1d" | "separate-1d" => Ok(Layout::Separate1d),
            "2d" | "joint-2d" => Ok(Layout::Joint2d),
            other => Err(Error::Config(format!("unknown layout `{other}`, expected 1d or 2d"))),
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Separate1d => "separate-1d",
            Layout::Joint2d => "joint-2d",
        })
    }
}

/// Fewest training trials accepted.
pub const MIN_TRIALS: usize = 100;

/// Training trials used when the caller has no preference.
pub const DEFAULT_TRIALS: usize = 2500;

#[derive(Debug, Clone, PartialEq)]
pub struct SummationConfig {
    pub layout: Layout,
    pub trials: usize,
    /// Held-out evaluations.
    pub evaluations: usize,
    /// Neurons per input dimension.
    pub n_l: usize,
    /// Neurons of the output bundle.
    pub n_out: usize,
    /// Range of each addend.
    pub input_range: (f64, f64),
    /// Simulated time per held-out evaluation (ms).
    pub eval_window_ms: f64,
    /// Neuron, plasticity and timing settings; sizes and ranges are ignored.
    pub base: NetworkConfig,
    pub seed: u64,
}

impl SummationConfig {
    /// Synaptic gain for `layout`: one saturated input bundle of the
    /// separate layout stays below the output rheobase while two coincident
    /// ones exceed it; the sparser joint layer needs more.
    pub fn syn_gain(layout: Layout) -> f64 {
        match layout {
            Layout::Separate1d => 1.5,
            Layout::Joint2d => 8.0,
        }
    }

    pub fn new(layout: Layout, trials: usize, seed: u64) -> Self {
        let base = NetworkConfig {
            syn_gain: Self::syn_gain(layout),
            ..NetworkConfig::planar_2dof()
        };
        SummationConfig {
            layout,
            trials,
            evaluations: 500,
            n_l: 20,
            n_out: 36,
            input_range: (0.0, 1.0),
            eval_window_ms: 80.0,
            base,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummationReport {
    /// Mean `|decoded - true| / range` of the output bundle.
    pub mean_error: f64,
    /// Evaluations in which the output bundle stayed silent.
    pub silent: usize,
    pub evaluations: usize,
}

impl SummationReport {
    pub fn percent(&self) -> f64 {
        100.0 * self.mean_error
    }
}

struct SumNet {
    core: SpikingCore,
    inputs: Vec<Bundle>,
    current: Vec<f64>,
    i_star: f64,
    gain: f64,
    layout: Layout,
}

impl SumNet {
    fn build(cfg: &SummationConfig) -> Result<Self> {
        let b = &cfg.base;
        b.validate()?;
        let (lo, hi) = cfg.input_range;
        let inputs = vec![
            Bundle::new((lo, hi), cfg.n_l, b.sensory, b.sigma_scale)?,
            Bundle::new((lo, hi), cfg.n_l, b.sensory, b.sigma_scale)?,
        ];
        let sensory = match cfg.layout {
            Layout::Separate1d => inputs.clone(),
            // A bundle used only as storage for the N x N joint layer.
            Layout::Joint2d => vec![Bundle::new((lo, hi), cfg.n_l * cfg.n_l, b.sensory, 1.0)?],
        };
        let output = Bundle::new((2.0 * lo, 2.0 * hi), cfg.n_out, b.motor, b.sigma_scale)?;
        let core = SpikingCore::new(sensory, vec![output], b.core_params(), b.init_weight_fraction, cfg.seed);
        Ok(SumNet {
            current: vec![0.0; core.n_pre],
            core,
            inputs,
            i_star: b.sensory.rheobase(),
            gain: b.gain,
            layout: cfg.layout,
        })
    }

    fn set_inputs(&mut self, n1: f64, n2: f64) -> Result<()> {
        match self.layout {
            Layout::Separate1d => {
                let n = self.inputs[0].len();
                self.inputs[0].encode_into(n1, &mut self.current[..n])?;
                self.inputs[1].encode_into(n2, &mut self.current[n..])?;
            }
            Layout::Joint2d => {
                let joint = encode_joint_2d(&self.inputs[0], &self.inputs[1], n1, n2)?;
                for (o, a) in self.current.iter_mut().zip(joint.iter().flatten()) {
                    *o = *a;
                }
            }
        }
        let (i_star, gain) = (self.i_star, self.gain);
        self.current
            .iter_mut()
            .for_each(|a| *a = activation_to_current(*a, i_star, gain));
        Ok(())
    }
}

/// Trains the chosen layout on random `(n1, n2, n1 + n2)` triples, then
/// decodes the sum for fresh inputs.
pub fn summation_experiment(cfg: &SummationConfig) -> Result<SummationReport> {
    if cfg.trials < MIN_TRIALS {
        return Err(Error::Config(format!(
            "summation needs at least {MIN_TRIALS} training trials, got {}",
            cfg.trials
        )));
    }
    if cfg.evaluations == 0 {
        return Err(Error::Config("summation needs at least one evaluation".into()));
    }
    let mut net = SumNet::build(cfg)?;
    let (lo, hi) = cfg.input_range;
    let base = &cfg.base;
    let out_range = 2.0 * (hi - lo);
    let motor_i_star = base.motor.rheobase();
    let mut teacher = vec![0.0; cfg.n_out];
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);

    for _ in 0..cfg.trials {
        let n1 = rng.random_range(lo..=hi);
        let n2 = rng.random_range(lo..=hi);
        net.set_inputs(n1, n2)?;
        net.core.motor[0].encode_into(n1 + n2, &mut teacher)?;
        teacher
            .iter_mut()
            .for_each(|a| *a = activation_to_current(*a, motor_i_star, base.gain));
        net.core.run(base.iteration_ms, &net.current, Some(&teacher), true, None)?;
    }

    let mut total = 0.0;
    let mut silent = 0;
    let midpoint = lo + hi;
    for _ in 0..cfg.evaluations {
        let n1 = rng.random_range(lo..=hi);
        let n2 = rng.random_range(lo..=hi);
        net.set_inputs(n1, n2)?;
        net.core.reset_state();
        let out = net.core.run(cfg.eval_window_ms, &net.current, None, false, None)?;
        let decoded = match net.core.motor[0].decode_counts(&out.motor_counts) {
            Ok(v) => v,
            Err(Error::NoActivity) => {
                silent += 1;
                midpoint
            }
            Err(e) => return Err(e),
        };
        total += (decoded - (n1 + n2)).abs() / out_range;
    }
    Ok(SummationReport {
        mean_error: total / cfg.evaluations as f64,
        silent,
        evaluations: cfg.evaluations,
    })
}
