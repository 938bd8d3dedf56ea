//! End-to-end acceptance checks. Runs as a plain program (no test harness)
//! so that every criterion prints one PASS/FAIL line; exits non-zero if any
//! criterion fails.

use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dmsnn::coding::Bundle;
use dmsnn::config::RunConfig;
use dmsnn::eval::{max_deviation, mean_error, moving_average, run_battery, sigma_servoing, success_curve};
use dmsnn::izhikevich::{classify, count_spikes, equilibria, rheobase, Mat2, NeuronParams, StabilityKind};
use dmsnn::network::summation::{summation_experiment, Layout, SummationConfig, DEFAULT_TRIALS};
use dmsnn::plasticity::{apply_update, stdp_symmetric, PlasticSynapse, StdpConfig};
use dmsnn::robotsim::{mat_vec, trial_battery, ArmModel, OracleController, ServoConfig, Vec2};

const SEEDS: [u64; 3] = [1, 2, 3];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn rheobase_exactness() -> Outcome {
    let fs = NeuronParams::FAST_SPIKING;
    let motor = NeuronParams::MOTOR;
    let exact = (rheobase(&fs) - 4.0).abs() < 1e-9 && (rheobase(&motor) - 7.015625).abs() < 1e-9;
    let mut sim = Vec::new();
    for p in [fs, motor] {
        let i = p.rheobase();
        let above = count_spikes(&p, i + 0.5, 1000.0, 0.0, 0.1);
        // Onset transient: the first 100 ms are not counted below threshold.
        let below = count_spikes(&p, i - 0.5, 1000.0, 100.0, 0.1);
        sim.push((p.b, above, below));
    }
    let sim_ok = sim.iter().all(|&(_, above, below)| above >= 5 && below <= 1);
    let detail = sim
        .iter()
        .map(|(b, a, bl)| format!("b={b}: {a} spikes above, {bl} below"))
        .collect::<Vec<_>>()
        .join("; ");
    outcome(exact && sim_ok, format!("I*(0.2)=4, I*(0.15)=7.015625; {detail}"))
}

/// Eigenvalue-based classification, independent of the trace/determinant rules.
fn eigen_oracle(m: &Mat2) -> StabilityKind {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let (l1, l2) = (tr / 2.0 - disc.sqrt(), tr / 2.0 + disc.sqrt());
        if l1 < 0.0 && l2 > 0.0 {
            StabilityKind::Saddle
        } else if l2 < 0.0 {
            StabilityKind::StableNode
        } else {
            StabilityKind::UnstableNode
        }
    } else if tr < 0.0 {
        StabilityKind::StableFocus
    } else {
        StabilityKind::UnstableFocus
    }
}

fn phase_plane() -> Outcome {
    let eq = equilibria(&NeuronParams::FAST_SPIKING, 0.0);
    let eq_ok = eq.len() == 2
        && (eq[0].v_star + 70.0).abs() < 1e-9
        && eq[0].kind == StabilityKind::StableNode
        && (eq[1].v_star + 50.0).abs() < 1e-9
        && eq[1].kind == StabilityKind::Saddle;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = 0;
    for _ in 0..1000 {
        let m: Mat2 = [
            [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
            [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)],
        ];
        if classify(&m) != eigen_oracle(&m) {
            mismatches += 1;
        }
    }
    outcome(
        eq_ok && mismatches == 0,
        format!(
            "equilibria {:?}; {mismatches}/1000 classification mismatches",
            eq.iter().map(|e| (e.v_star, e.kind.label())).collect::<Vec<_>>()
        ),
    )
}

fn stdp_properties() -> Outcome {
    let cfg = StdpConfig::default();
    let k = |dt: f64| stdp_symmetric(dt, &cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let parity = (0..10_000).all(|_| {
        let dt = rng.random_range(0.0..40.0);
        k(dt) == k(-dt)
    });
    let crossing = k(20.0) == 0.0 && k(19.9) > 0.0 && k(20.1) < 0.0 && k(-19.9) > 0.0 && k(-20.1) < 0.0;
    let cutoff = k(30.0) != 0.0 && k(30.001) == 0.0 && k(-30.001) == 0.0 && k(100.0) == 0.0;
    let grid_max = (-3000..=3000).map(|i| k(i as f64 * 0.01)).fold(f64::MIN, f64::max);
    let peak = k(0.0) == 0.05 && grid_max == 0.05;
    let (lo, hi) = (-4.0, 4.0);
    let mut syn = PlasticSynapse::new((0, 0), (4, 0), 0.0, (lo, hi));
    let mut bounded = true;
    for _ in 0..1_000_000 {
        let delta = k(rng.random_range(-40.0..40.0)) * rng.random_range(0.0..200.0);
        syn = apply_update(syn, delta);
        bounded &= (lo..=hi).contains(&syn.weight);
    }
    outcome(
        parity && crossing && cutoff && peak && bounded,
        format!("parity {parity}, zero crossing at 20 ms {crossing}, cutoff at 30 ms {cutoff}, peak 0.05 {peak}, 1e6 clamped updates bounded {bounded}"),
    )
}

fn coding_round_trip() -> Outcome {
    let bundle = Bundle::new((0.0, 1.0), 36, NeuronParams::FAST_SPIKING, 1.0).expect("bundle");
    let worst = (0..1000)
        .map(|i| {
            let psi = 0.05 + 0.9 * i as f64 / 999.0;
            (bundle.decode(&bundle.encode(psi).expect("encode")).expect("decode") - psi).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst <= 1.0 / 36.0, format!("worst round-trip error {worst:.3e} (limit {:.3e})", 1.0 / 36.0))
}

fn kinematics() -> Outcome {
    let arm = ArmModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut fd_err: f64 = 0.0;
    for _ in 0..100 {
        let th = arm.sample_configuration(&mut rng);
        let j = arm.jacobian(th);
        let h = 1e-6;
        for col in 0..2 {
            let (mut p, mut m) = (th, th);
            p[col] += h;
            m[col] -= h;
            let (xp, xm) = (arm.forward_kinematics(p), arm.forward_kinematics(m));
            for row in 0..2 {
                fd_err = fd_err.max(((xp[row] - xm[row]) / (2.0 * h) - j[row][col]).abs());
            }
        }
    }
    // The default arm never reaches |det J| > 0.1, so longer links are sampled.
    let mut inv_err: f64 = 0.0;
    let mut kept = 0;
    while kept < 100 {
        let big = ArmModel::new(
            rng.random_range(0.5..1.5),
            rng.random_range(0.5..1.5),
            [(-3.2, 3.2), (-3.2, 3.2)],
        )
        .expect("arm");
        let th: Vec2 = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let j = big.jacobian(th);
        if (j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs() <= 0.1 {
            continue;
        }
        kept += 1;
        let inv = big.inverse_jacobian(th);
        for c in 0..2 {
            let mut e = [0.0; 2];
            e[c] = 1.0;
            let col = mat_vec(&j, mat_vec(&inv, e));
            inv_err = inv_err.max((col[0] - e[0]).abs()).max((col[1] - e[1]).abs());
        }
    }
    let servo = ServoConfig::default();
    let specs = trial_battery(&arm, 15, 5, 0.02, 1);
    let battery = run_battery(&OracleController { arm }, &arm, &specs, &servo, jobs()).expect("battery");
    outcome(
        fd_err <= 1e-4 && inv_err <= 1e-3 && battery.successes() == 75,
        format!(
            "max |J - FD| {fd_err:.2e}, max |J#J - I| {inv_err:.2e}, oracle reached {}/75",
            battery.successes()
        ),
    )
}

fn summation() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (layout, limit) in [(Layout::Separate1d, 10.0), (Layout::Joint2d, 4.0)] {
        let errs: Vec<f64> = SEEDS
            .iter()
            .map(|&s| {
                let cfg = SummationConfig::new(layout, DEFAULT_TRIALS, s);
                assert_eq!(cfg.evaluations, 500);
                summation_experiment(&cfg).expect("summation").percent()
            })
            .collect();
        pass &= errs.iter().all(|&e| e <= limit);
        lines.push(format!(
            "{layout} {} (limit {limit}%)",
            errs.iter().map(|e| format!("{e:.2}%")).collect::<Vec<_>>().join("/")
        ));
    }
    outcome(pass, lines.join(", "))
}

fn success_curves(at_3000: &mut Vec<f64>) -> Outcome {
    at_3000.clear();
    let mut trend_ok = true;
    let mut slow = false;
    let mut curves = Vec::new();
    for &seed in &SEEDS {
        let start = Instant::now();
        let cfg = RunConfig::default().with_seed(seed);
        let points = success_curve(&cfg, &[0.15], jobs(), |_| {}).expect("curve");
        slow |= start.elapsed().as_secs_f64() > 300.0;
        let values: Vec<f64> = points.iter().map(|p| p.success_pct).collect();
        let smooth = moving_average(&values, 3);
        trend_ok &= smooth.windows(2).all(|w| w[1] >= w[0]);
        at_3000.push(*values.last().expect("points"));
        curves.push(format!(
            "seed {seed}: {}",
            values.iter().map(|v| format!("{v:.0}")).collect::<Vec<_>>().join(" ")
        ));
    }
    let over_80 = at_3000.iter().filter(|&&v| v >= 80.0).count();
    outcome(
        over_80 >= 2 && at_3000.iter().all(|&v| v >= 70.0) && trend_ok && !slow,
        format!(
            "b=0.15 success at 3000: {:?}%, smoothed curves non-decreasing {trend_ok}, under 5 min per seed {}; curves 500..3000 step 250 [{}]",
            at_3000,
            !slow,
            curves.join("; ")
        ),
    )
}

fn b_sensitivity(at_3000: &[f64]) -> Outcome {
    if at_3000.len() != SEEDS.len() {
        return outcome(false, "no b=0.15 results to compare against");
    }
    let mut pass = true;
    let mut rows = Vec::new();
    for (i, &seed) in SEEDS.iter().enumerate() {
        let mut cfg = RunConfig::default().with_seed(seed);
        cfg.checkpoints = vec![3000];
        let pts = success_curve(&cfg, &[0.1, 0.2], jobs(), |_| {}).expect("curve");
        let (low, high) = (pts[0].success_pct, pts[1].success_pct);
        pass &= low <= at_3000[i] - 20.0 && high <= at_3000[i] - 20.0;
        rows.push(format!("seed {seed}: b=0.1 {low:.1}%, b=0.15 {:.1}%, b=0.2 {high:.1}%", at_3000[i]));
    }
    outcome(pass, rows.join("; "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = |n: &str| dir.path().join(n).to_str().expect("utf-8 path").to_owned();
    let run = |args: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_dmsnn"))
            .args(args)
            .env_remove("DMSNN_SEED")
            .output()
            .expect("binary runs");
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    let (w1, w2) = (path("w1"), path("w2"));
    run(&["train", "--out", &w1, "--seed", "7"]);
    run(&["train", "--out", &w2, "--seed", "7"]);
    let archives = std::fs::read(&w1).expect("w1") == std::fs::read(&w2).expect("w2");
    let (t1, t2, t8) = (path("t1"), path("t2"), path("t8"));
    run(&["servo", "--weights", &w1, "--out", &t1, "--seed", "7", "--no-timestamp"]);
    run(&["servo", "--weights", &w2, "--out", &t2, "--seed", "7", "--no-timestamp"]);
    run(&["servo", "--weights", &w1, "--out", &t8, "--seed", "7", "--no-timestamp", "--jobs", "8"]);
    let read = |p: &str| std::fs::read(p).expect("trials");
    let reruns = read(&t1) == read(&t2);
    let jobs = read(&t1) == read(&t8);
    outcome(
        archives && reruns && jobs,
        format!("archives identical {archives}, trial CSVs identical {reruns}, --jobs 1 == --jobs 8 {jobs}"),
    )
}

fn naive_max_deviation(path: &[Vec2], reference: &[Vec2]) -> f64 {
    let mut worst = 0.0;
    for c in path {
        let mut best = f64::INFINITY;
        for w in reference {
            let d = (c[0] - w[0]).hypot(c[1] - w[1]);
            if d < best {
                best = d;
            }
        }
        if best > worst {
            worst = best;
        }
    }
    worst
}

fn textbook_std(x: &[f64]) -> f64 {
    // Welford's running update.
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for &v in x {
        n += 1.0;
        let d = v - mean;
        mean += d / n;
        m2 += d * (v - mean);
    }
    (m2 / (n - 1.0)).sqrt()
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pts = |rng: &mut ChaCha8Rng| -> Vec<Vec2> {
        let n = rng.random_range(1..60);
        (0..n).map(|_| [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)]).collect()
    };
    let mut mismatches = 0;
    for _ in 0..200 {
        let (a, b) = (pts(&mut rng), pts(&mut rng));
        if max_deviation(&a, &b).expect("paths") != naive_max_deviation(&a, &b) {
            mismatches += 1;
        }
    }
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..100);
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.01)).collect();
        let s = sigma_servoing(&d, mean_error(&d).expect("mean")).expect("sigma");
        worst = worst.max((s - textbook_std(&d)).abs());
    }
    outcome(
        mismatches == 0 && worst <= 1e-12,
        format!("{mismatches}/200 deviation mismatches, max sigma difference {worst:.1e}"),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} {verdict} {name}: {} [{:.1} s]",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass {
            failed += 1;
        }
    };
    report(1, "rheobase exactness", &mut rheobase_exactness);
    report(2, "phase plane", &mut phase_plane);
    report(3, "STDP properties", &mut stdp_properties);
    report(4, "coding round trip", &mut coding_round_trip);
    report(5, "kinematics and oracle servo", &mut kinematics);
    report(6, "summation benchmark", &mut summation);
    let mut at_3000 = Vec::new();
    report(7, "2-DOF success curve", &mut || success_curves(&mut at_3000));
    report(8, "motor b sensitivity", &mut || b_sensitivity(&at_3000));
    report(9, "determinism", &mut determinism);
    report(10, "metric oracles", &mut metric_oracles);
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
