//! Success rate against training iterations for three values of the motor
//! neurons' `b`: only the tuned value learns a stable map.
//!
//! ```text
//! cargo run --release --example success_curve [seed]
//! ```

use dmsnn::config::RunConfig;
use dmsnn::eval::success_curve;

fn main() -> dmsnn::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("seed must be an integer"))
        .unwrap_or(1);
    let mut cfg = RunConfig::default().with_seed(seed);
    cfg.checkpoints = vec![1000, 1500, 2000, 2500, 3000];
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let points = success_curve(&cfg, &[0.1, 0.15, 0.2], jobs, |p| {
        let bar = "#".repeat((p.success_pct / 5.0).round() as usize);
        println!("b = {:<4}  {:>4} it  {:5.1}%  {bar}", p.b, p.checkpoint, p.success_pct);
    })?;
    let last = |b: f64| {
        points
            .iter()
            .rev()
            .find(|p| p.b == b)
            .map_or(0.0, |p| p.success_pct)
    };
    println!(
        "\nat 3000 iterations: b=0.1 {:.1}%, b=0.15 {:.1}%, b=0.2 {:.1}%",
        last(0.1),
        last(0.15),
        last(0.2)
    );
    Ok(())
}
