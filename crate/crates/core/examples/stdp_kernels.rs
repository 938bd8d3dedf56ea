//! The plasticity kernels and spike pairing, plus the lateral inhibition
//! profile inside a motor bundle.
//!
//! ```text
//! cargo run --example stdp_kernels
//! ```

use dmsnn::plasticity::{
    lateral_weight, pair_spikes, stdp_asymmetric, stdp_symmetric, ExponentSign, PairingScheme, StdpConfig,
    StdpRule,
};

fn main() -> dmsnn::Result<()> {
    let sym = StdpConfig::default();
    let growth = StdpConfig {
        exponent_sign: ExponentSign::Growth,
        ..sym
    };
    let asym = StdpConfig {
        rule: StdpRule::Asymmetric,
        ..sym
    };
    println!("{:>6} {:>12} {:>12} {:>12}", "dt", "symmetric", "sym(growth)", "asymmetric");
    for dt in (-35..=35).step_by(5) {
        let dt = dt as f64;
        println!(
            "{dt:>6} {:>12.5} {:>12.5} {:>12.5}",
            stdp_symmetric(dt, &sym),
            stdp_symmetric(dt, &growth),
            stdp_asymmetric(dt, &asym)
        );
    }

    let pre = [0.0, 50.0];
    let post = [20.0, 60.0];
    for scheme in [PairingScheme::Nearest, PairingScheme::AllToAll] {
        let pairs = pair_spikes(&pre, &post, sym.window, scheme)?;
        let total: f64 = pairs.iter().map(|&d| sym.delta(d)).sum();
        println!("\n{scheme:?} pairing of pre {pre:?} / post {post:?}: dt = {pairs:?}, total dw = {total:.5}");
    }

    println!("\nlateral weight from neuron 18 of 36 (sigma_n = 0.2):");
    for j in [18, 19, 20, 22, 25, 30, 35] {
        println!("  -> {j:<2} {:>9.5}", lateral_weight(18, j, 0.2, 36));
    }
    Ok(())
}
