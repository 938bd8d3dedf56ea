//! The differential-mapping network.
//!
//! Sensory bundles encode the joint angles `theta_1..m` and the spatial
//! velocity `xdot_1..n`; motor bundles encode the joint velocities
//! `thetadot_1..m`. Every sensory neuron reaches every motor neuron through a
//! plastic synapse, and neurons of one motor bundle inhibit each other with a
//! strength that grows with their distance in the bundle.

mod archive;
pub(crate) mod engine;
pub mod summation;

use crate::coding::{activation_to_current, Bundle};
use crate::error::{ensure_finite, Error, Result};
use crate::izhikevich::NeuronParams;
use crate::plasticity::{NeuronId, PlasticSynapse, StdpConfig};
use crate::robotsim::{BabbleSample, Controller, Vec2};

pub use archive::ARCHIVE_VERSION;
pub use engine::{SpikeRecord, WeightDeltaSummary};
use engine::{CoreParams, SpikingCore};

/// Every tunable of the network.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    /// Task-space dimensions.
    pub n: usize,
    /// Joint-space dimensions.
    pub m: usize,
    /// Neurons per bundle.
    pub n_l: usize,
    pub sensory: NeuronParams,
    pub motor: NeuronParams,
    pub stdp: StdpConfig,
    pub c_i: f64,
    pub c_e: f64,
    /// Width of the lateral inhibition kernel as a fraction of `n_l`.
    pub sigma_n: f64,
    /// Duration of one training stimulus (ms).
    pub iteration_ms: f64,
    /// Spike-count window of one control decision (ms).
    pub decode_window_ms: f64,
    /// Integration step (ms).
    pub dt: f64,
    /// Activation-to-current multiplier applied on top of the rheobase.
    pub gain: f64,
    /// Multiplier of the default tuning width `range / n_l`.
    pub sigma_scale: f64,
    pub theta_ranges: Vec<(f64, f64)>,
    pub xdot_ranges: Vec<(f64, f64)>,
    pub thetadot_ranges: Vec<(f64, f64)>,
    /// Current per unit weight carried by the synaptic trace.
    pub syn_gain: f64,
    /// Decay constant of the synaptic trace (ms).
    pub syn_tau_ms: f64,
    /// Lateral inhibition current per unit kernel weight, in units of `|C_I|`.
    pub lateral_gain: f64,
    /// Decay constant of the lateral inhibition trace (ms).
    pub lateral_tau_ms: f64,
    /// Standard deviation of the current noise injected into every neuron.
    pub noise_current: f64,
    /// Initial weights are uniform in `[0, init_weight_fraction * C_E]`.
    pub init_weight_fraction: f64,
    pub seed: u64,
}

impl NetworkConfig {
    /// The simulated two-link planar arm: 6 bundles of 36 neurons.
    pub fn planar_2dof() -> Self {
        NetworkConfig {
            n: 2,
            m: 2,
            n_l: 36,
            sensory: NeuronParams::FAST_SPIKING,
            motor: NeuronParams::MOTOR,
            stdp: StdpConfig::default(),
            c_i: -4.0,
            c_e: 4.0,
            sigma_n: 0.2,
            iteration_ms: 80.0,
            decode_window_ms: 20.0,
            dt: 1.0,
            gain: 1.5,
            sigma_scale: 1.0,
            theta_ranges: vec![(0.0, std::f64::consts::FRAC_PI_3), (0.6, 1.8)],
            xdot_ranges: vec![(-0.05, 0.05); 2],
            thetadot_ranges: vec![(-0.4, 0.4); 2],
            syn_gain: 1.0,
            syn_tau_ms: 5.0,
            lateral_gain: 1.0,
            lateral_tau_ms: 5.0,
            noise_current: 0.0,
            init_weight_fraction: 0.05,
            seed: 1,
        }
    }

    /// Parameter set of the three-joint planar arm (68 neurons per bundle).
    pub fn planar_3dof() -> Self {
        let deg = std::f64::consts::PI / 180.0;
        NetworkConfig {
            m: 3,
            n_l: 68,
            theta_ranges: vec![(-180.0 * deg, -90.0 * deg), (-45.0 * deg, 0.0), (90.0 * deg, 180.0 * deg)],
            thetadot_ranges: vec![(-0.4, 0.4); 3],
            ..Self::planar_2dof()
        }
    }

    /// Parameter set of the four-joint spatial arm (136 neurons per bundle).
    pub fn spatial_4dof() -> Self {
        let deg = std::f64::consts::PI / 180.0;
        NetworkConfig {
            n: 3,
            m: 4,
            n_l: 136,
            stdp: StdpConfig {
                s: 0.03,
                ..StdpConfig::default()
            },
            c_i: -5.0,
            c_e: 5.0,
            theta_ranges: vec![
                (-200.0 * deg, -170.0 * deg),
                (-75.0 * deg, -45.0 * deg),
                (90.0 * deg, 110.0 * deg),
                (-200.0 * deg, -160.0 * deg),
            ],
            xdot_ranges: vec![(-0.05, 0.05); 3],
            thetadot_ranges: vec![(-0.4, 0.4); 4],
            ..Self::planar_2dof()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.m < self.n {
            return Err(Error::Config(format!(
                "need n >= 1 and m >= n, got n = {}, m = {}",
                self.n, self.m
            )));
        }
        if self.n_l < 2 {
            return Err(Error::Config(format!("n_l must be at least 2, got {}", self.n_l)));
        }
        self.sensory.validate()?;
        self.motor.validate()?;
        self.stdp.validate()?;
        if !(self.c_i <= 0.0 && self.c_e > 0.0) {
            return Err(Error::Config(format!(
                "weight bounds must satisfy C_I <= 0 < C_E, got [{}, {}]",
                self.c_i, self.c_e
            )));
        }
        if !(self.dt > 0.0 && self.dt <= 1.0) {
            return Err(Error::Config(format!("dt must lie in (0, 1] ms, got {}", self.dt)));
        }
        if !(self.decode_window_ms >= self.dt && self.iteration_ms >= self.decode_window_ms) {
            return Err(Error::Config(format!(
                "need dt <= decode_window_ms <= iteration_ms, got {} / {} / {}",
                self.dt, self.decode_window_ms, self.iteration_ms
            )));
        }
        if !(self.gain > 1.0) {
            return Err(Error::Config(format!("gain must exceed 1, got {}", self.gain)));
        }
        let positive = [
            ("sigma_n", self.sigma_n),
            ("sigma_scale", self.sigma_scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("syn_gain", self.syn_gain),
            ("syn_tau_ms", self.syn_tau_ms),
            ("lateral_gain", self.lateral_gain),
            ("lateral_tau_ms", self.lateral_tau_ms),
            ("noise_current", self.noise_current),
            ("init_weight_fraction", self.init_weight_fraction),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        let dims = [
            ("theta_ranges", self.theta_ranges.len(), self.m),
            ("xdot_ranges", self.xdot_ranges.len(), self.n),
            ("thetadot_ranges", self.thetadot_ranges.len(), self.m),
        ];
        for (name, got, want) in dims {
            if got != want {
                return Err(Error::Config(format!("{name} has {got} entries, expected {want}")));
            }
        }
        Ok(())
    }

    pub fn bundle_count(&self) -> usize {
        self.n + 2 * self.m
    }

    pub fn neuron_count(&self) -> usize {
        self.bundle_count() * self.n_l
    }

    pub fn plastic_synapse_count(&self) -> usize {
        (self.n + self.m) * self.n_l * self.m * self.n_l
    }

    pub(crate) fn core_params(&self) -> CoreParams {
        CoreParams {
            dt: self.dt,
            stdp: self.stdp,
            bounds: (self.c_i, self.c_e),
            sigma_n: self.sigma_n,
            syn_gain: self.syn_gain,
            syn_tau: self.syn_tau_ms,
            lateral_gain: self.lateral_gain,
            lateral_tau: self.lateral_tau_ms,
            noise: self.noise_current,
        }
    }
}

/// Role of a bundle in the layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleRole {
    JointAngle(usize),
    SpatialVelocity(usize),
    JointVelocity(usize),
}

/// Output of one training iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingOutput {
    pub spikes: Vec<SpikeRecord>,
    pub delta: WeightDeltaSummary,
}

#[derive(Debug, Clone)]
pub struct DmsnnNetwork {
    config: NetworkConfig,
    core: SpikingCore,
    sensory_current: Vec<f64>,
    teacher_current: Vec<f64>,
    iterations: usize,
}

impl DmsnnNetwork {
    pub fn build(config: NetworkConfig) -> Result<Self> {
        config.validate()?;
        let bundle = |range: (f64, f64), params: NeuronParams| {
            Bundle::new(range, config.n_l, params, config.sigma_scale)
        };
        let mut sensory = Vec::with_capacity(config.n + config.m);
        for &r in &config.theta_ranges {
            sensory.push(bundle(r, config.sensory)?);
        }
        for &r in &config.xdot_ranges {
            sensory.push(bundle(r, config.sensory)?);
        }
        let motor = config
            .thetadot_ranges
            .iter()
            .map(|&r| bundle(r, config.motor))
            .collect::<Result<Vec<_>>>()?;
        let core = SpikingCore::new(
            sensory,
            motor,
            config.core_params(),
            config.init_weight_fraction,
            config.seed,
        );
        Ok(DmsnnNetwork {
            sensory_current: vec![0.0; core.n_pre],
            teacher_current: vec![0.0; core.n_post],
            config,
            core,
            iterations: 0,
        })
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    /// Training iterations run so far.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Simulation clock (ms).
    pub fn clock(&self) -> f64 {
        self.core.clock
    }

    pub fn bundle_count(&self) -> usize {
        self.core.sensory.len() + self.core.motor.len()
    }

    pub fn neuron_count(&self) -> usize {
        self.core.n_pre + self.core.n_post
    }

    /// Bundles in global order: joint angles, spatial velocities, joint velocities.
    pub fn bundles(&self) -> impl Iterator<Item = &Bundle> {
        self.core.sensory.iter().chain(self.core.motor.iter())
    }

    pub fn bundle(&self, id: usize) -> Option<&Bundle> {
        self.bundles().nth(id)
    }

    pub fn role(&self, id: usize) -> Option<BundleRole> {
        let (n, m) = (self.config.n, self.config.m);
        if id < m {
            Some(BundleRole::JointAngle(id))
        } else if id < m + n {
            Some(BundleRole::SpatialVelocity(id - m))
        } else if id < n + 2 * m {
            Some(BundleRole::JointVelocity(id - m - n))
        } else {
            None
        }
    }

    pub fn sensory_bundle_count(&self) -> usize {
        self.core.sensory.len()
    }

    fn pre_index(&self, (bundle, idx): NeuronId) -> Option<usize> {
        let g = self.core.sensory.get(bundle)?;
        (idx < g.len()).then(|| self.core.pre_offsets()[bundle] + idx)
    }

    fn post_index(&self, (bundle, idx): NeuronId) -> Option<usize> {
        let g = bundle.checked_sub(self.core.sensory.len())?;
        let group = self.core.motor.get(g)?;
        (idx < group.len()).then(|| self.core.post_offsets()[g] + idx)
    }

    /// Plastic weight between a sensory and a motor neuron (global bundle ids).
    pub fn weight(&self, pre: NeuronId, post: NeuronId) -> Option<f64> {
        let i = self.pre_index(pre)?;
        let j = self.post_index(post)?;
        Some(self.core.weights[i * self.core.n_post + j])
    }

    pub(crate) fn set_weight(&mut self, pre: NeuronId, post: NeuronId, w: f64) -> Result<()> {
        let (i, j) = self
            .pre_index(pre)
            .zip(self.post_index(post))
            .ok_or_else(|| Error::Contract(format!("no plastic synapse {pre:?} -> {post:?}")))?;
        self.core.weights[i * self.core.n_post + j] = w;
        Ok(())
    }

    /// Raw weight matrix, one row per sensory neuron.
    pub fn weights(&self) -> &[f64] {
        &self.core.weights
    }

    /// Every plastic synapse, ordered by presynaptic then postsynaptic neuron.
    pub fn synapses(&self) -> impl Iterator<Item = PlasticSynapse> + '_ {
        let bounds = (self.config.c_i, self.config.c_e);
        let pre: Vec<NeuronId> = self.neuron_ids(&self.core.sensory, 0);
        let post: Vec<NeuronId> = self.neuron_ids(&self.core.motor, self.core.sensory.len());
        let n_post = self.core.n_post;
        pre.into_iter().enumerate().flat_map(move |(i, p)| {
            let post = post.clone();
            post.into_iter().enumerate().map(move |(j, q)| PlasticSynapse {
                pre: p,
                post: q,
                weight: self.core.weights[i * n_post + j],
                bounds,
            })
        })
    }

    fn neuron_ids(&self, groups: &[Bundle], first: usize) -> Vec<NeuronId> {
        groups
            .iter()
            .enumerate()
            .flat_map(|(g, b)| (0..b.len()).map(move |k| (first + g, k)))
            .collect()
    }

    /// Neuron states back to rest; weights untouched.
    pub fn reset_state(&mut self) {
        self.core.reset_state();
    }

    fn set_sensory_inputs(&mut self, theta: &[f64], xdot: &[f64]) -> Result<()> {
        if theta.len() != self.config.m || xdot.len() != self.config.n {
            return Err(Error::Contract(format!(
                "expected {} joint angles and {} spatial velocities, got {} and {}",
                self.config.m,
                self.config.n,
                theta.len(),
                xdot.len()
            )));
        }
        let i_star = self.config.sensory.rheobase();
        let gain = self.config.gain;
        let offsets = self.core.pre_offsets().to_vec();
        for (g, &value) in theta.iter().chain(xdot).enumerate() {
            ensure_finite(value, "sensory input")?;
            let bundle = &self.core.sensory[g];
            let out = &mut self.sensory_current[offsets[g]..offsets[g] + bundle.len()];
            bundle.encode_into(value, out)?;
            out.iter_mut().for_each(|a| *a = activation_to_current(*a, i_star, gain));
        }
        Ok(())
    }

    fn set_teacher(&mut self, thetadot: &[f64]) -> Result<()> {
        if thetadot.len() != self.config.m {
            return Err(Error::Contract(format!(
                "expected {} joint velocities, got {}",
                self.config.m,
                thetadot.len()
            )));
        }
        let i_star = self.config.motor.rheobase();
        let gain = self.config.gain;
        let offsets = self.core.post_offsets().to_vec();
        for (g, &value) in thetadot.iter().enumerate() {
            ensure_finite(value, "teacher input")?;
            let bundle = &self.core.motor[g];
            let out = &mut self.teacher_current[offsets[g]..offsets[g] + bundle.len()];
            bundle.encode_into(value, out)?;
            out.iter_mut().for_each(|a| *a = activation_to_current(*a, i_star, gain));
        }
        Ok(())
    }

    /// One training stimulus: sensory bundles encode `(theta, xdot)`, motor
    /// bundles are driven by the teacher `thetadot`, and after
    /// `iteration_ms` the collected spike pairs update the plastic weights.
    pub fn training_step(
        &mut self,
        theta: &[f64],
        xdot: &[f64],
        thetadot_teacher: &[f64],
    ) -> Result<TrainingOutput> {
        self.set_sensory_inputs(theta, xdot)?;
        self.set_teacher(thetadot_teacher)?;
        let mut spikes = Vec::new();
        let out = self.core.run(
            self.config.iteration_ms,
            &self.sensory_current,
            Some(&self.teacher_current),
            true,
            Some(&mut spikes),
        )?;
        self.iterations += 1;
        Ok(TrainingOutput {
            spikes,
            delta: out.delta,
        })
    }

    /// Runs the frozen network for one decode window and returns the joint
    /// velocities voted by the motor bundles. A silent bundle commands 0.
    pub fn control_step(&mut self, theta: &[f64], v_d: &[f64]) -> Result<Vec<f64>> {
        Ok(self.control_step_counts(theta, v_d)?.0)
    }

    /// Like [`control_step`](Self::control_step), also returning the motor
    /// spike counts of the window.
    pub fn control_step_counts(&mut self, theta: &[f64], v_d: &[f64]) -> Result<(Vec<f64>, Vec<u32>)> {
        self.set_sensory_inputs(theta, v_d)?;
        let out = self.core.run(
            self.config.decode_window_ms,
            &self.sensory_current,
            None,
            false,
            None,
        )?;
        let offsets = self.core.post_offsets();
        let mut command = Vec::with_capacity(self.core.motor.len());
        for (g, bundle) in self.core.motor.iter().enumerate() {
            let counts = &out.motor_counts[offsets[g]..offsets[g] + bundle.len()];
            command.push(match bundle.decode_counts(counts) {
                Ok(v) => v,
                Err(Error::NoActivity) => 0.0,
                Err(e) => return Err(e),
            });
        }
        Ok((command, out.motor_counts))
    }

    /// Runs `iterations` training steps, cycling through `samples`.
    /// `on_iteration` sees the 1-based iteration count and its weight change.
    pub fn train<F>(&mut self, samples: &[BabbleSample], iterations: usize, mut on_iteration: F) -> Result<()>
    where
        F: FnMut(usize, &TrainingOutput),
    {
        if samples.is_empty() {
            return Err(Error::InsufficientData("no training samples".into()));
        }
        if self.config.n != 2 || self.config.m != 2 {
            return Err(Error::Config("babbling samples need a 2-DOF network".into()));
        }
        for _ in 0..iterations {
            let s = &samples[self.iterations % samples.len()];
            let out = self.training_step(&s.theta, &s.xdot, &s.thetadot)?;
            on_iteration(self.iterations, &out);
        }
        Ok(())
    }

    /// Weight archive text (see [`ARCHIVE_VERSION`]).
    pub fn snapshot(&self) -> String {
        archive::write(self)
    }

    /// Rebuilds a network from [`snapshot`](Self::snapshot) output. Neuron
    /// states start at rest.
    pub fn restore(text: &str) -> Result<Self> {
        archive::read(text)
    }

    pub(crate) fn set_iterations(&mut self, iterations: usize) {
        self.iterations = iterations;
    }
}

impl Controller for DmsnnNetwork {
    fn joint_velocity(&mut self, theta: Vec2, v_d: Vec2) -> Result<Vec2> {
        let cmd = self.control_step(&theta, &v_d)?;
        Ok([cmd[0], cmd[1]])
    }

    fn reset(&mut self) {
        self.reset_state();
    }
}

/// Keeps samples whose values fall inside the configured ranges, optionally
/// rescaling each to spatial speed `speed` first.
pub fn prepare_samples(
    config: &NetworkConfig,
    samples: &[BabbleSample],
    speed: Option<f64>,
) -> Vec<BabbleSample> {
    let inside = |v: f64, (lo, hi): (f64, f64)| v >= lo && v <= hi;
    samples
        .iter()
        .filter_map(|s| match speed {
            Some(k) => s.normalized(k),
            None => Some(*s),
        })
        .filter(|s| {
            s.theta.iter().zip(&config.theta_ranges).all(|(v, r)| inside(*v, *r))
                && s.xdot.iter().zip(&config.xdot_ranges).all(|(v, r)| inside(*v, *r))
                && s.thetadot.iter().zip(&config.thetadot_ranges).all(|(v, r)| inside(*v, *r))
        })
        .collect()
}
