use proptest::prelude::*;

use dmsnn::coding::Bundle;
use dmsnn::eval::{max_deviation, mean_error, sigma_servoing};
use dmsnn::izhikevich::{count_spikes, Mat2, NeuronParams};
use dmsnn::plasticity::{
    apply_update, clamp_weight, pair_spikes, stdp_asymmetric, stdp_symmetric, PairingScheme, PlasticSynapse,
    StdpConfig, StdpRule,
};
use dmsnn::robotsim::{mat_vec, ArmModel, Vec2};

fn naive_max_deviation(path: &[Vec2], reference: &[Vec2]) -> f64 {
    path.iter()
        .map(|c| {
            reference
                .iter()
                .map(|w| (c[0] - w[0]).hypot(c[1] - w[1]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

fn points(max: usize) -> impl Strategy<Value = Vec<Vec2>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| [a, b]), 1..max)
}

fn sorted_times() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..200.0f64, 0..12).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v
    })
}

proptest! {
    #[test]
    fn symmetric_kernel_is_even(dt in -40.0..40.0f64) {
        let cfg = StdpConfig::default();
        prop_assert_eq!(stdp_symmetric(dt, &cfg), stdp_symmetric(-dt, &cfg));
    }

    #[test]
    fn symmetric_kernel_sign_structure(dt in 0.0..40.0f64) {
        let cfg = StdpConfig::default();
        let w = stdp_symmetric(dt, &cfg);
        if dt > cfg.window {
            prop_assert_eq!(w, 0.0);
        } else if dt < cfg.tau1 - 1e-9 {
            prop_assert!(w > 0.0);
        } else if dt > cfg.tau1 + 1e-9 {
            prop_assert!(w < 0.0);
        }
        prop_assert!(w <= cfg.s);
    }

    #[test]
    fn asymmetric_kernel_is_odd_with_equal_sides(dt in 0.001..40.0f64) {
        let cfg = StdpConfig { rule: StdpRule::Asymmetric, ..StdpConfig::default() };
        let p = stdp_asymmetric(dt, &cfg);
        let d = stdp_asymmetric(-dt, &cfg);
        if dt <= cfg.window {
            prop_assert!(p > 0.0 && d < 0.0);
            prop_assert!((p + d).abs() < 1e-15);
        } else {
            prop_assert_eq!(p, 0.0);
            prop_assert_eq!(d, 0.0);
        }
    }

    #[test]
    fn clamped_weight_stays_in_bounds(w in -10.0..10.0f64, delta in -10.0..10.0f64) {
        let syn = PlasticSynapse::new((0, 0), (4, 0), clamp_weight(w, (-4.0, 4.0)), (-4.0, 4.0));
        let out = apply_update(syn, delta);
        prop_assert!(out.weight >= -4.0 && out.weight <= 4.0);
    }

    #[test]
    fn paired_intervals_respect_the_window(pre in sorted_times(), post in sorted_times()) {
        for scheme in [PairingScheme::Nearest, PairingScheme::AllToAll] {
            let pairs = pair_spikes(&pre, &post, 30.0, scheme).unwrap();
            prop_assert!(pairs.iter().all(|d| d.abs() < 30.0));
        }
        let nearest = pair_spikes(&pre, &post, 30.0, PairingScheme::Nearest).unwrap();
        let all = pair_spikes(&pre, &post, 30.0, PairingScheme::AllToAll).unwrap();
        prop_assert!(nearest.len() <= all.len());
    }

    #[test]
    fn coding_round_trip(n_l in 10usize..80, lo in -5.0..5.0f64, width in 0.1..10.0f64, u in 0.05..0.95f64) {
        let bundle = Bundle::new((lo, lo + width), n_l, NeuronParams::FAST_SPIKING, 1.0).unwrap();
        let psi = lo + u * width;
        let back = bundle.decode(&bundle.encode(psi).unwrap()).unwrap();
        prop_assert!((back - psi).abs() <= width / n_l as f64);
    }

    #[test]
    fn encoding_peaks_at_the_nearest_center(u in 0.0..1.0f64) {
        let bundle = Bundle::new((0.0, 1.0), 36, NeuronParams::FAST_SPIKING, 1.0).unwrap();
        let a = bundle.encode(u).unwrap();
        let peak = (0..a.len()).max_by(|&i, &j| a[i].total_cmp(&a[j])).unwrap();
        let nearest = (0..a.len())
            .min_by(|&i, &j| (bundle.centers()[i] - u).abs().total_cmp(&(bundle.centers()[j] - u).abs()))
            .unwrap();
        prop_assert_eq!(peak, nearest);
        prop_assert!(a.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn jacobian_matches_finite_differences(
        l1 in 0.1..1.0f64, l2 in 0.1..1.0f64, t1 in -3.0..3.0f64, t2 in -3.0..3.0f64,
    ) {
        let arm = ArmModel::new(l1, l2, [(-3.2, 3.2), (-3.2, 3.2)]).unwrap();
        let j = arm.jacobian([t1, t2]);
        let h = 1e-6;
        for col in 0..2 {
            let mut plus = [t1, t2];
            let mut minus = [t1, t2];
            plus[col] += h;
            minus[col] -= h;
            let (xp, xm) = (arm.forward_kinematics(plus), arm.forward_kinematics(minus));
            for row in 0..2 {
                let fd = (xp[row] - xm[row]) / (2.0 * h);
                prop_assert!((fd - j[row][col]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn inverse_jacobian_inverts_away_from_singularity(
        l1 in 0.3..1.5f64, l2 in 0.3..1.5f64, t1 in -3.0..3.0f64, t2 in 0.3..2.8f64,
        v in (-1.0..1.0f64, -1.0..1.0f64),
    ) {
        let arm = ArmModel::new(l1, l2, [(-3.2, 3.2), (-3.2, 3.2)]).unwrap();
        let j: Mat2 = arm.jacobian([t1, t2]);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        prop_assume!(det.abs() > 0.1);
        let back = mat_vec(&j, mat_vec(&arm.inverse_jacobian([t1, t2]), [v.0, v.1]));
        prop_assert!((back[0] - v.0).abs() < 1e-3 && (back[1] - v.1).abs() < 1e-3);
    }

    #[test]
    fn max_deviation_matches_naive_oracle(path in points(30), reference in points(30)) {
        prop_assert_eq!(max_deviation(&path, &reference).unwrap(), naive_max_deviation(&path, &reference));
    }

    #[test]
    fn deviation_is_zero_on_the_reference(reference in points(20)) {
        prop_assert_eq!(max_deviation(&reference, &reference).unwrap(), 0.0);
    }

    #[test]
    fn spread_is_shift_invariant(d in prop::collection::vec(0.0..0.01f64, 2..40), shift in 0.0..0.01f64) {
        let shifted: Vec<f64> = d.iter().map(|x| x + shift).collect();
        let s1 = sigma_servoing(&d, mean_error(&d).unwrap()).unwrap();
        let s2 = sigma_servoing(&shifted, mean_error(&shifted).unwrap()).unwrap();
        prop_assert!((s1 - s2).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rheobase_brackets_tonic_firing(b in 0.05..0.25f64) {
        let p = NeuronParams { b, ..NeuronParams::MOTOR };
        let i_star = p.rheobase();
        prop_assert!(count_spikes(&p, i_star - 0.5, 1000.0, 200.0, 0.1) <= 1);
        prop_assert!(count_spikes(&p, i_star + 2.0, 1000.0, 200.0, 0.1) >= 5);
    }
}
