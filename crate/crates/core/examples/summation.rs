//! Learning `n1 + n2` with two input layouts: two separate 1-D bundles, or
//! one joint 2-D layer. The joint layer is more accurate but needs `N^2`
//! input neurons instead of `2 N`.
//!
//! ```text
//! cargo run --release --example summation [trials]
//! ```

use dmsnn::network::summation::{summation_experiment, Layout, SummationConfig, DEFAULT_TRIALS};

fn main() -> dmsnn::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("trials must be an integer"))
        .unwrap_or(DEFAULT_TRIALS);
    for layout in [Layout::Separate1d, Layout::Joint2d] {
        for seed in 1..=3 {
            let cfg = SummationConfig::new(layout, trials, seed);
            let inputs = match layout {
                Layout::Separate1d => 2 * cfg.n_l,
                Layout::Joint2d => cfg.n_l * cfg.n_l,
            };
            let r = summation_experiment(&cfg)?;
            println!(
                "{layout:<12} seed {seed}  {inputs:>3} inputs  mean error {:5.2}%  ({} of {} evaluations silent)",
                r.percent(),
                r.silent,
                r.evaluations
            );
        }
    }
    Ok(())
}
