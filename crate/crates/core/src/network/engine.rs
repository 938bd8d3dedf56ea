//! Two-layer spiking simulator shared by the sensorimotor map and the
//! summation benchmark: sensory groups fully connected to motor groups
//! through plastic synapses, with fixed lateral inhibition inside each motor
//! group.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::coding::Bundle;
use crate::error::Result;
use crate::izhikevich::integrate;
use crate::plasticity::{clamp_weight, lateral_weight, pair_spikes, StdpConfig};

/// One spike, stamped with the simulation time at the start of its step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikeRecord {
    pub time: f64,
    pub bundle: usize,
    pub neuron: usize,
}

/// How the weights moved during one learning window.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeightDeltaSummary {
    pub potentiated: usize,
    pub depressed: usize,
    /// Euclidean norm of the applied weight changes.
    pub l2: f64,
    pub max_abs: f64,
}

/// Synaptic and noise settings of the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct CoreParams {
    pub dt: f64,
    pub stdp: StdpConfig,
    pub bounds: (f64, f64),
    pub sigma_n: f64,
    /// Current injected per unit weight of the synaptic trace.
    pub syn_gain: f64,
    /// Decay constant of the synaptic trace (ms); 0 keeps only the last step.
    pub syn_tau: f64,
    /// Scale of the lateral inhibition current relative to `|C_I|`.
    pub lateral_gain: f64,
    /// Decay constant of the lateral inhibition trace (ms).
    pub lateral_tau: f64,
    /// Standard deviation of the per-step current noise.
    pub noise: f64,
}

fn decay_factor(tau: f64, dt: f64) -> f64 {
    if tau > 0.0 {
        (-dt / tau).exp()
    } else {
        0.0
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SpikingCore {
    pub sensory: Vec<Bundle>,
    pub motor: Vec<Bundle>,
    pub params: CoreParams,
    /// Dense plastic weights, row `i` holds the synapses leaving sensory neuron `i`.
    pub weights: Vec<f64>,
    pub n_pre: usize,
    pub n_post: usize,
    pre_offsets: Vec<usize>,
    post_offsets: Vec<usize>,
    /// Lateral kernel per motor group, `n_l x n_l`, zero diagonal.
    lateral: Vec<Vec<f64>>,
    syn_trace: Vec<f64>,
    inh_trace: Vec<f64>,
    pub clock: f64,
    pub rng: ChaCha8Rng,
}

/// Per-run spike bookkeeping.
pub(crate) struct RunOutput {
    pub motor_counts: Vec<u32>,
    pub delta: WeightDeltaSummary,
}

impl SpikingCore {
    /// Weights start uniform in `[0, init_fraction * C_E]`, drawn first from
    /// the seeded generator.
    pub fn new(
        sensory: Vec<Bundle>,
        motor: Vec<Bundle>,
        params: CoreParams,
        init_fraction: f64,
        seed: u64,
    ) -> Self {
        let offsets = |groups: &[Bundle]| {
            let mut acc = 0;
            groups
                .iter()
                .map(|g| {
                    let o = acc;
                    acc += g.len();
                    o
                })
                .collect::<Vec<_>>()
        };
        let pre_offsets = offsets(&sensory);
        let post_offsets = offsets(&motor);
        let n_pre = sensory.iter().map(Bundle::len).sum();
        let n_post = motor.iter().map(Bundle::len).sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hi = init_fraction * params.bounds.1;
        let weights = if hi > 0.0 {
            let dist = Uniform::new_inclusive(0.0, hi).expect("valid weight range");
            (0..n_pre * n_post).map(|_| dist.sample(&mut rng)).collect()
        } else {
            vec![0.0; n_pre * n_post]
        };
        let lateral = motor
            .iter()
            .map(|g| {
                let n = g.len();
                let mut k = vec![0.0; n * n];
                for a in 0..n {
                    for b in 0..n {
                        if a != b {
                            k[a * n + b] = lateral_weight(a, b, params.sigma_n, n);
                        }
                    }
                }
                k
            })
            .collect();
        SpikingCore {
            sensory,
            motor,
            params,
            weights,
            n_pre,
            n_post,
            pre_offsets,
            post_offsets,
            lateral,
            syn_trace: vec![0.0; n_post],
            inh_trace: vec![0.0; n_post],
            clock: 0.0,
            rng,
        }
    }

    pub fn pre_offsets(&self) -> &[usize] {
        &self.pre_offsets
    }

    pub fn post_offsets(&self) -> &[usize] {
        &self.post_offsets
    }

    /// Neuron states back to rest and synaptic traces cleared; weights kept.
    pub fn reset_state(&mut self) {
        for g in self.sensory.iter_mut().chain(self.motor.iter_mut()) {
            g.reset_states();
        }
        self.syn_trace.iter_mut().for_each(|x| *x = 0.0);
        self.inh_trace.iter_mut().for_each(|x| *x = 0.0);
    }

    /// Simulates `duration_ms` with constant sensory currents and optional
    /// teacher currents on the motor neurons. With `learn` set, spike pairs
    /// collected over the window update the plastic weights at its end.
    pub fn run(
        &mut self,
        duration_ms: f64,
        sensory_current: &[f64],
        teacher_current: Option<&[f64]>,
        learn: bool,
        mut raster: Option<&mut Vec<SpikeRecord>>,
    ) -> Result<RunOutput> {
        debug_assert_eq!(sensory_current.len(), self.n_pre);
        let p = self.params;
        let steps = (duration_ms / p.dt).round() as usize;
        let syn_decay = decay_factor(p.syn_tau, p.dt);
        let inh_decay = decay_factor(p.lateral_tau, p.dt);
        let inh_scale = p.lateral_gain * p.bounds.0.abs();
        let noise = if p.noise > 0.0 {
            Some(Normal::new(0.0, p.noise).expect("positive noise"))
        } else {
            None
        };

        let mut pre_times: Vec<Vec<f64>> = if learn { vec![Vec::new(); self.n_pre] } else { Vec::new() };
        let mut post_times: Vec<Vec<f64>> = if learn { vec![Vec::new(); self.n_post] } else { Vec::new() };
        let mut counts = vec![0u32; self.n_post];
        let mut pre_spikes: Vec<usize> = Vec::new();
        let mut post_spikes: Vec<usize> = Vec::new();
        let n_sensory = self.sensory.len();

        for _ in 0..steps {
            let now = self.clock;
            pre_spikes.clear();
            post_spikes.clear();

            for (g, group) in self.sensory.iter_mut().enumerate() {
                let base = self.pre_offsets[g];
                let params = group.params;
                for (k, s) in group.states.iter_mut().enumerate() {
                    let mut i_ext = sensory_current[base + k];
                    if let Some(n) = &noise {
                        i_ext += n.sample(&mut self.rng);
                    }
                    let (v, u, spiked) = integrate(s.v, s.u, &params, i_ext, p.dt);
                    s.v = v;
                    s.u = u;
                    if spiked {
                        s.last_spike = Some(now);
                        pre_spikes.push(base + k);
                        if let Some(r) = raster.as_deref_mut() {
                            r.push(SpikeRecord { time: now, bundle: g, neuron: k });
                        }
                    }
                }
            }

            for (g, group) in self.motor.iter_mut().enumerate() {
                let base = self.post_offsets[g];
                let params = group.params;
                for (k, s) in group.states.iter_mut().enumerate() {
                    let j = base + k;
                    let mut i_ext = p.syn_gain * self.syn_trace[j] + inh_scale * self.inh_trace[j];
                    if let Some(t) = teacher_current {
                        i_ext += t[j];
                    }
                    if let Some(n) = &noise {
                        i_ext += n.sample(&mut self.rng);
                    }
                    let (v, u, spiked) = integrate(s.v, s.u, &params, i_ext, p.dt);
                    s.v = v;
                    s.u = u;
                    if spiked {
                        s.last_spike = Some(now);
                        post_spikes.push(j);
                        counts[j] += 1;
                        if let Some(r) = raster.as_deref_mut() {
                            r.push(SpikeRecord { time: now, bundle: n_sensory + g, neuron: k });
                        }
                    }
                }
            }

            // Spikes of this step reach their targets on the next one.
            if syn_decay > 0.0 {
                self.syn_trace.iter_mut().for_each(|x| *x *= syn_decay);
            } else {
                self.syn_trace.iter_mut().for_each(|x| *x = 0.0);
            }
            for &i in &pre_spikes {
                let row = &self.weights[i * self.n_post..(i + 1) * self.n_post];
                for (t, w) in self.syn_trace.iter_mut().zip(row) {
                    *t += w;
                }
            }
            if inh_decay > 0.0 {
                self.inh_trace.iter_mut().for_each(|x| *x *= inh_decay);
            } else {
                self.inh_trace.iter_mut().for_each(|x| *x = 0.0);
            }
            for &j in &post_spikes {
                let g = self.post_offsets.partition_point(|&o| o <= j) - 1;
                let base = self.post_offsets[g];
                let n = self.motor[g].len();
                let k = j - base;
                let kernel = &self.lateral[g][k * n..(k + 1) * n];
                for (t, e) in self.inh_trace[base..base + n].iter_mut().zip(kernel) {
                    *t += e;
                }
            }

            if learn {
                for &i in &pre_spikes {
                    pre_times[i].push(now);
                }
                for &j in &post_spikes {
                    post_times[j].push(now);
                }
            }
            self.clock += p.dt;
        }

        let mut delta = WeightDeltaSummary::default();
        if learn {
            let mut sq = 0.0;
            for (i, pre) in pre_times.iter().enumerate() {
                if pre.is_empty() {
                    continue;
                }
                for (j, post) in post_times.iter().enumerate() {
                    if post.is_empty() {
                        continue;
                    }
                    let dw: f64 = pair_spikes(pre, post, p.stdp.window, p.stdp.pairing)?
                        .into_iter()
                        .map(|d| p.stdp.delta(d))
                        .sum();
                    let w = &mut self.weights[i * self.n_post + j];
                    let old = *w;
                    *w = clamp_weight(old + dw, p.bounds);
                    let applied = *w - old;
                    if applied > 0.0 {
                        delta.potentiated += 1;
                    } else if applied < 0.0 {
                        delta.depressed += 1;
                    }
                    sq += applied * applied;
                    delta.max_abs = delta.max_abs.max(applied.abs());
                }
            }
            delta.l2 = sq.sqrt();
        }
        Ok(RunOutput {
            motor_counts: counts,
            delta,
        })
    }
}
