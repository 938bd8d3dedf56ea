use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dmsnn::config::RunConfig;
use dmsnn::eval::training_samples;
use dmsnn::network::{BundleRole, DmsnnNetwork, NetworkConfig};
use dmsnn::Error;

fn short_samples() -> Vec<dmsnn::robotsim::BabbleSample> {
    let cfg = RunConfig {
        iterations: 200,
        checkpoints: vec![200],
        ..RunConfig::default()
    };
    training_samples(&cfg).unwrap()
}

/// One joint, one spatial dimension, taught `thetadot = xdot`.
fn identity_config() -> NetworkConfig {
    NetworkConfig {
        n: 1,
        m: 1,
        theta_ranges: vec![(0.0, 1.0)],
        xdot_ranges: vec![(-1.0, 1.0)],
        thetadot_ranges: vec![(-1.0, 1.0)],
        syn_gain: 2.5,
        decode_window_ms: 80.0,
        ..NetworkConfig::planar_2dof()
    }
}

fn trained_identity_net() -> DmsnnNetwork {
    let mut net = DmsnnNetwork::build(identity_config()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1500 {
        let theta = rng.random_range(0.0..1.0);
        let v = rng.random_range(-0.9..0.9);
        net.training_step(&[theta], &[v], &[v]).unwrap();
    }
    net
}

#[test]
fn planar_layout_has_216_neurons_and_10368_synapses() {
    let net = DmsnnNetwork::build(NetworkConfig::planar_2dof()).unwrap();
    assert_eq!(net.bundle_count(), 6);
    assert_eq!(net.neuron_count(), 216);
    assert_eq!(net.weights().len(), 10368);
    assert_eq!(net.synapses().count(), 10368);
    let roles: Vec<_> = (0..6).map(|b| net.role(b).unwrap()).collect();
    assert_eq!(
        roles,
        [
            BundleRole::JointAngle(0),
            BundleRole::JointAngle(1),
            BundleRole::SpatialVelocity(0),
            BundleRole::SpatialVelocity(1),
            BundleRole::JointVelocity(0),
            BundleRole::JointVelocity(1),
        ]
    );
}

#[test]
fn larger_arm_presets_build_and_train() {
    for (cfg, neurons) in [(NetworkConfig::planar_3dof(), 8 * 68), (NetworkConfig::spatial_4dof(), 11 * 136)] {
        let (m, n) = (cfg.m, cfg.n);
        let mid = |r: &[(f64, f64)]| r.iter().map(|(a, b)| 0.5 * (a + b)).collect::<Vec<_>>();
        let theta = mid(&cfg.theta_ranges);
        let xdot = mid(&cfg.xdot_ranges);
        let thetadot = mid(&cfg.thetadot_ranges);
        let mut net = DmsnnNetwork::build(cfg).unwrap();
        assert_eq!(net.neuron_count(), neurons);
        let out = net.training_step(&theta, &xdot, &thetadot).unwrap();
        assert!(!out.spikes.is_empty());
        assert_eq!(net.control_step(&theta, &xdot).unwrap().len(), m);
        assert!(net.control_step(&theta, &xdot[..n - 1]).is_err());
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        NetworkConfig { n: 3, m: 2, ..NetworkConfig::planar_2dof() },
        NetworkConfig { n_l: 1, ..NetworkConfig::planar_2dof() },
        NetworkConfig { c_i: 1.0, ..NetworkConfig::planar_2dof() },
        NetworkConfig { decode_window_ms: 100.0, ..NetworkConfig::planar_2dof() },
        NetworkConfig { theta_ranges: vec![(0.0, 1.0)], ..NetworkConfig::planar_2dof() },
    ];
    for cfg in bad {
        assert!(matches!(DmsnnNetwork::build(cfg), Err(Error::Config(_))));
    }
}

#[test]
fn untrained_network_commands_zero() {
    let mut net = DmsnnNetwork::build(NetworkConfig::planar_2dof()).unwrap();
    let (cmd, counts) = net.control_step_counts(&[0.5, 1.2], &[0.03, -0.02]).unwrap();
    assert_eq!(cmd, vec![0.0, 0.0]);
    assert!(counts.iter().all(|&c| c == 0));
}

#[test]
fn control_never_changes_weights() {
    let mut net = DmsnnNetwork::build(NetworkConfig::planar_2dof()).unwrap();
    net.train(&short_samples(), 200, |_, _| {}).unwrap();
    let before = net.snapshot();
    for k in 0..50 {
        let s = k as f64 / 50.0;
        net.control_step(&[s, 0.6 + s], &[0.04 * (s - 0.5), 0.02]).unwrap();
    }
    assert_eq!(net.snapshot(), before);
}

#[test]
fn training_is_deterministic() {
    let samples = short_samples();
    let run = || {
        let mut net = DmsnnNetwork::build(NetworkConfig::planar_2dof()).unwrap();
        let mut spikes = Vec::new();
        net.train(&samples, 100, |_, out| spikes.extend(out.spikes.iter().copied())).unwrap();
        (net.weights().to_vec(), spikes)
    };
    let (w1, s1) = run();
    let (w2, s2) = run();
    assert_eq!(w1, w2);
    assert_eq!(s1, s2);
    assert!(!s1.is_empty());

    let other = DmsnnNetwork::build(NetworkConfig { seed: 2, ..NetworkConfig::planar_2dof() }).unwrap();
    assert_ne!(other.weights(), &w1[..]);
}

#[test]
fn weights_stay_within_bounds() {
    let cfg = NetworkConfig {
        stdp: dmsnn::plasticity::StdpConfig { s: 0.5, ..Default::default() },
        syn_gain: 3.0,
        ..NetworkConfig::planar_2dof()
    };
    let (lo, hi) = (cfg.c_i, cfg.c_e);
    let mut net = DmsnnNetwork::build(cfg).unwrap();
    net.train(&short_samples(), 300, |_, _| {}).unwrap();
    assert!(net.weights().iter().all(|w| (lo..=hi).contains(w)));
    assert!(net.weights().contains(&hi));
}

#[test]
fn raster_times_never_decrease() {
    let mut net = DmsnnNetwork::build(NetworkConfig::planar_2dof()).unwrap();
    let mut last = f64::NEG_INFINITY;
    let mut total = 0;
    net.train(&short_samples(), 20, |_, out| {
        for s in &out.spikes {
            assert!(s.time >= last);
            last = s.time;
        }
        total += out.spikes.len();
    })
    .unwrap();
    assert!(total > 0);
    assert!(net.clock() >= 20.0 * 80.0 - 1e-9);
}

#[test]
fn snapshot_round_trips_fresh_and_trained_networks() {
    let mut net = DmsnnNetwork::build(NetworkConfig::planar_2dof()).unwrap();
    let fresh = DmsnnNetwork::restore(&net.snapshot()).unwrap();
    assert_eq!(fresh.weights(), net.weights());
    assert_eq!(fresh.config(), net.config());

    net.train(&short_samples(), 100, |_, _| {}).unwrap();
    let back = DmsnnNetwork::restore(&net.snapshot()).unwrap();
    assert_eq!(back.iterations(), 100);
    assert_eq!(back.config(), net.config());
    for (a, b) in back.weights().iter().zip(net.weights()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(back.snapshot(), net.snapshot());
}

#[test]
fn identity_map_is_learned_and_readout_is_local() {
    let mut net = trained_identity_net();
    let mut worst: f64 = 0.0;
    for v in [-0.6, -0.3, 0.0, 0.25, 0.5, 0.7] {
        net.reset_state();
        let (cmd, counts) = net.control_step_counts(&[0.5], &[v]).unwrap();
        worst = worst.max((cmd[0] - v).abs());

        let max = *counts.iter().max().unwrap();
        assert!(max > 0, "no output for v = {v}");
        let first = counts.iter().position(|&c| c == max).unwrap();
        let last = counts.iter().rposition(|&c| c == max).unwrap();
        let peak = (first + last) / 2;
        for (k, &c) in counts.iter().enumerate() {
            if c > 0 {
                assert!(k.abs_diff(peak) <= 3, "v = {v}: neuron {k} active, peak at {peak}: {counts:?}");
            }
        }
        for k in 1..=first {
            assert!(counts[k - 1] <= counts[k], "v = {v}: not unimodal: {counts:?}");
        }
        for k in last..counts.len() - 1 {
            assert!(counts[k + 1] <= counts[k], "v = {v}: not unimodal: {counts:?}");
        }
    }
    assert!(worst < 0.15, "identity map error {worst}");
}
