//! Spike-timing-dependent plasticity and the fixed lateral-inhibition kernel.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StdpRule {
    /// Mexican-hat rule driven by `|dt|` only.
    Symmetric,
    /// Classic depression/potentiation rule driven by the sign of `dt`.
    Asymmetric,
}

/// Sign of the exponential factor of the symmetric rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentSign {
    /// `exp(-|dt| / tau2)`: the kernel decays away from coincidence.
    Decay,
    /// `exp(+|dt| / tau2)`: grows with `|dt|` up to the window edge.
    Growth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairingScheme {
    Nearest,
    AllToAll,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdpConfig {
    pub rule: StdpRule,
    /// Peak magnitude of the symmetric rule.
    pub s: f64,
    /// Zero crossing of the symmetric rule (ms).
    pub tau1: f64,
    /// Decay constant of the symmetric rule (ms).
    pub tau2: f64,
    pub s_a: f64,
    pub s_b: f64,
    pub tau_a: f64,
    pub tau_b: f64,
    /// Spike pairs further apart than this (ms) do not interact.
    pub window: f64,
    pub exponent_sign: ExponentSign,
    pub pairing: PairingScheme,
}

impl Default for StdpConfig {
    fn default() -> Self {
        StdpConfig {
            rule: StdpRule::Symmetric,
            s: 0.05,
            tau1: 20.0,
            tau2: 18.0,
            s_a: 0.05,
            s_b: 0.05,
            tau_a: 20.0,
            tau_b: 20.0,
            window: 30.0,
            exponent_sign: ExponentSign::Decay,
            pairing: PairingScheme::Nearest,
        }
    }
}

impl StdpConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("window", self.window),
            ("tau1", self.tau1),
            ("tau2", self.tau2),
            ("tau_a", self.tau_a),
            ("tau_b", self.tau_b),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("S", self.s), ("S_a", self.s_a), ("S_b", self.s_b)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    /// Weight change for one spike pair under the configured rule.
    pub fn delta(&self, dt_spike: f64) -> f64 {
        match self.rule {
            StdpRule::Symmetric => stdp_symmetric(dt_spike, self),
            StdpRule::Asymmetric => stdp_asymmetric(dt_spike, self),
        }
    }
}

/// `S (1 - (dt/tau1)^2) exp(-|dt|/tau2)` inside the window, zero outside.
pub fn stdp_symmetric(dt_spike: f64, cfg: &StdpConfig) -> f64 {
    let abs = dt_spike.abs();
    if abs > cfg.window {
        return 0.0;
    }
    let r = dt_spike / cfg.tau1;
    let e = match cfg.exponent_sign {
        ExponentSign::Decay => (-abs / cfg.tau2).exp(),
        ExponentSign::Growth => (abs / cfg.tau2).exp(),
    };
    cfg.s * (1.0 - r * r) * e
}

/// Depression `-S_a exp(-|dt|/tau_a)` for `dt <= 0`, potentiation
/// `S_b exp(-dt/tau_b)` for `dt > 0`; zero outside the window.
pub fn stdp_asymmetric(dt_spike: f64, cfg: &StdpConfig) -> f64 {
    if dt_spike.abs() > cfg.window {
        0.0
    } else if dt_spike <= 0.0 {
        -cfg.s_a * (-dt_spike.abs() / cfg.tau_a).exp()
    } else {
        cfg.s_b * (-dt_spike / cfg.tau_b).exp()
    }
}

fn ensure_sorted(times: &[f64], what: &str) -> Result<()> {
    if times.windows(2).all(|w| w[0] <= w[1]) {
        Ok(())
    } else {
        Err(Error::Contract(format!("{what} spike times must be sorted ascending")))
    }
}

/// Index of the entry of sorted `times` closest to `t`; ties go to the earlier spike.
fn nearest(times: &[f64], t: f64) -> Option<usize> {
    if times.is_empty() {
        return None;
    }
    let idx = times.partition_point(|&x| x < t);
    match (idx.checked_sub(1), times.get(idx)) {
        (Some(before), Some(&after)) => {
            if t - times[before] <= after - t {
                Some(before)
            } else {
                Some(idx)
            }
        }
        (Some(before), None) => Some(before),
        (None, Some(_)) => Some(idx),
        (None, None) => None,
    }
}

/// Pairs pre- and postsynaptic spikes and returns `t_post - t_pre` for each
/// pair with `|dt| < window`.
///
/// Under [`PairingScheme::Nearest`] each post spike is paired with its
/// nearest pre spike and each pre spike with its nearest post spike; pairs
/// found from both sides are counted once. Results are ordered by
/// (pre index, post index).
pub fn pair_spikes(
    pre: &[f64],
    post: &[f64],
    window: f64,
    scheme: PairingScheme,
) -> Result<Vec<f64>> {
    ensure_sorted(pre, "presynaptic")?;
    ensure_sorted(post, "postsynaptic")?;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    match scheme {
        PairingScheme::AllToAll => {
            for (i, &tp) in pre.iter().enumerate() {
                let lo = post.partition_point(|&t| t <= tp - window);
                for (j, &tq) in post.iter().enumerate().skip(lo) {
                    if tq - tp >= window {
                        break;
                    }
                    pairs.push((i, j));
                }
            }
        }
        PairingScheme::Nearest => {
            for (j, &tq) in post.iter().enumerate() {
                if let Some(i) = nearest(pre, tq) {
                    if (tq - pre[i]).abs() < window {
                        pairs.push((i, j));
                    }
                }
            }
            for (i, &tp) in pre.iter().enumerate() {
                if let Some(j) = nearest(post, tp) {
                    if (post[j] - tp).abs() < window {
                        pairs.push((i, j));
                    }
                }
            }
            pairs.sort_unstable();
            pairs.dedup();
        }
    }
    Ok(pairs.into_iter().map(|(i, j)| post[j] - pre[i]).collect())
}

/// Identifies one neuron: (bundle id, neuron index within the bundle).
pub type NeuronId = (usize, usize);

/// A plastic sensory-to-motor synapse with a signed, bounded weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlasticSynapse {
    pub pre: NeuronId,
    pub post: NeuronId,
    pub weight: f64,
    /// `(C_I, C_E)`: most inhibitory and most excitatory admissible weight.
    pub bounds: (f64, f64),
}

impl PlasticSynapse {
    pub fn new(pre: NeuronId, post: NeuronId, weight: f64, bounds: (f64, f64)) -> Self {
        PlasticSynapse {
            pre,
            post,
            weight: weight.clamp(bounds.0, bounds.1),
            bounds,
        }
    }
}

/// `weight <- clamp(weight + delta, C_I, C_E)`.
pub fn apply_update(syn: PlasticSynapse, delta: f64) -> PlasticSynapse {
    PlasticSynapse {
        weight: clamp_weight(syn.weight + delta, syn.bounds),
        ..syn
    }
}

#[inline]
pub fn clamp_weight(w: f64, (lo, hi): (f64, f64)) -> f64 {
    w.clamp(lo, hi)
}

/// Fixed inhibitory strength between neurons `k` and `j` of one motor bundle:
/// `exp(-(k - j)^2 / (sigma_n n_l)^2) - 1`.
pub fn lateral_weight(k: usize, j: usize, sigma_n: f64, n_l: usize) -> f64 {
    let d = k as f64 - j as f64;
    let w = sigma_n * n_l as f64;
    (-(d * d) / (w * w)).exp() - 1.0
}
