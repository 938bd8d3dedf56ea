//! Gaussian population coding: encode a value over a bundle, decode it back,
//! and build the joint two-dimensional activity used by the 2-D summation
//! layout.
//!
//! ```text
//! cargo run --example population_coding
//! ```

use dmsnn::coding::{activation_to_current, encode_joint_2d, Bundle, DEFAULT_GAIN};
use dmsnn::izhikevich::NeuronParams;

fn main() -> dmsnn::Result<()> {
    let bundle = Bundle::new((0.0, 1.0), 36, NeuronParams::FAST_SPIKING, 1.0)?;
    println!("36 neurons over [0, 1], sigma = {:.4}", bundle.sigma());

    let psi = 0.4;
    let activity = bundle.encode(psi)?;
    let i_star = NeuronParams::FAST_SPIKING.rheobase();
    println!("\nencode({psi}): neurons above 1% activation");
    for (k, a) in activity.iter().enumerate().filter(|(_, a)| **a > 0.01) {
        let current = activation_to_current(*a, i_star, DEFAULT_GAIN);
        let fires = if current > i_star { "fires" } else { "" };
        println!("  #{k:<2} center {:.3}  activation {a:.3}  current {current:6.3} {fires}", bundle.centers()[k]);
    }

    println!("\nround trip:");
    let mut worst: f64 = 0.0;
    for k in 0..=20 {
        let psi = 0.05 + 0.9 * k as f64 / 20.0;
        let back = bundle.decode(&bundle.encode(psi)?)?;
        worst = worst.max((back - psi).abs());
    }
    println!("  worst |decode(encode(psi)) - psi| over the central 90%: {worst:.2e}");

    let a = Bundle::new((0.0, 1.0), 8, NeuronParams::FAST_SPIKING, 1.0)?;
    let joint = encode_joint_2d(&a, &a, 0.3, 0.7)?;
    println!("\njoint activity of (0.3, 0.7) on an 8 x 8 layer:");
    for row in &joint {
        let line: String = row
            .iter()
            .map(|x| match *x {
                x if x > 0.5 => '#',
                x if x > 0.1 => '+',
                x if x > 0.01 => '.',
                _ => ' ',
            })
            .collect();
        println!("  |{line}|");
    }
    Ok(())
}
