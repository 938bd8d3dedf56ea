//! Train the 216-neuron network on the simulated arm, save and reload its
//! weights, and servo to 75 targets with the frozen map.
//!
//! ```text
//! cargo run --release --example train_and_servo [seed] [trajectory.csv]
//! ```

use std::fs::File;
use std::io::{BufWriter, Write};

use dmsnn::config::RunConfig;
use dmsnn::eval::{battery_specs, run_battery, training_samples};
use dmsnn::network::DmsnnNetwork;
use dmsnn::robotsim::write_trajectory_csv;

fn main() -> dmsnn::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(1);
    let cfg = RunConfig::default().with_seed(seed);

    let samples = training_samples(&cfg)?;
    let mut net = DmsnnNetwork::build(cfg.network.clone())?;
    println!(
        "{} neurons, {} plastic synapses, {} training samples",
        net.neuron_count(),
        cfg.network.plastic_synapse_count(),
        samples.len()
    );
    net.train(&samples, cfg.iterations, |it, out| {
        if it % 500 == 0 {
            println!("  iteration {it:>4}: {} synapses potentiated", out.delta.potentiated);
        }
    })?;

    let restored = DmsnnNetwork::restore(&net.snapshot())?;
    assert_eq!(restored.weights(), net.weights());

    let specs = battery_specs(&cfg);
    let summary = run_battery(&restored, &cfg.arm, &specs, &cfg.servo, 1)?;
    println!("success {:.1}% ({}/{})", summary.success_pct, summary.successes(), specs.len());
    if let (Some(m), Some(s)) = (summary.e_mean, summary.sigma) {
        println!("e_mean {:.2} mm, sigma {:.2} mm", m * 1e3, s * 1e3);
    }

    if let Some(path) = args.next() {
        let trial = &summary.trials[0];
        let mut w = BufWriter::new(File::create(&path).map_err(|e| dmsnn::Error::io(&path, e))?);
        write_trajectory_csv(&mut w, trial)
            .and_then(|_| w.flush())
            .map_err(|e| dmsnn::Error::io(&path, e))?;
        println!("first trajectory written to {path}");
    }
    Ok(())
}
