//! Motor babbling on the simulated arm, written as CSV, alongside the
//! random-pose samples the default training run uses.
//!
//! ```text
//! cargo run --example babbling_dataset [out.csv]
//! ```

use std::fs::File;
use std::io::{self, BufWriter, Write};

use dmsnn::robotsim::{
    generate_babbling, mat_vec, norm, sample_inverse_map, write_babbling_csv, ArmModel, BabblingConfig,
};

fn main() -> dmsnn::Result<()> {
    let arm = ArmModel::default();
    let cfg = BabblingConfig {
        n_targets: 20,
        ..BabblingConfig::default()
    };
    let samples = generate_babbling(&arm, &cfg)?;

    // With noisy, filtered measurements xdot only approximates J thetadot.
    let residual = samples
        .iter()
        .map(|s| {
            let predicted = mat_vec(&arm.jacobian(s.theta), s.thetadot);
            norm([predicted[0] - s.xdot[0], predicted[1] - s.xdot[1]])
        })
        .sum::<f64>()
        / samples.len() as f64;
    eprintln!(
        "{} babbling samples over {:.1} s, mean |J thetadot - xdot| = {:.2} mm/s",
        samples.len(),
        samples.last().map(|s| s.t).unwrap_or(0.0),
        residual * 1e3
    );

    let poses = sample_inverse_map(&arm, 5, 0.05, 7)?;
    eprintln!("random-pose samples (|xdot| = 5 cm/s):");
    for s in &poses {
        eprintln!(
            "  theta ({:.3}, {:.3})  xdot ({:+.4}, {:+.4})  thetadot ({:+.4}, {:+.4})",
            s.theta[0], s.theta[1], s.xdot[0], s.xdot[1], s.thetadot[0], s.thetadot[1]
        );
    }

    let io_err = |e| dmsnn::Error::io("babbling output", e);
    match std::env::args().nth(1) {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path).map_err(|e| dmsnn::Error::io(&path, e))?);
            write_babbling_csv(&mut w, &samples).and_then(|_| w.flush()).map_err(io_err)?;
            eprintln!("wrote {path}");
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write_babbling_csv(&mut w, &samples[..samples.len().min(10)]).map_err(io_err)?;
        }
    }
    Ok(())
}
