//! Visual servoing with the analytic inverse Jacobian: the reference the
//! learned controller is measured against.
//!
//! ```text
//! cargo run --example oracle_servo
//! ```

use dmsnn::eval::run_battery;
use dmsnn::robotsim::{run_servo_trial, trial_battery, ArmModel, OracleController, ServoConfig};

fn main() -> dmsnn::Result<()> {
    let arm = ArmModel::default();
    let servo = ServoConfig::default();
    let theta = [0.5, 1.2];
    let j = arm.jacobian(theta);
    println!("x({theta:?}) = {:?}", arm.forward_kinematics(theta));
    println!("J = {j:?}");
    println!("J# = {:?}", arm.inverse_jacobian(theta));

    let mut oracle = OracleController { arm };
    let trial = run_servo_trial(&mut oracle, &arm, [0.2, 1.6], [0.35, 0.3], &servo, 1)?;
    println!(
        "\nsingle trial: reached {} after {:.2} s, final error {:.3} mm, max deviation {:.4} mm",
        trial.reached,
        trial.time_s,
        trial.final_error * 1e3,
        trial.delta_max * 1e3
    );

    let specs = trial_battery(&arm, 15, 5, 0.02, 1);
    let summary = run_battery(&oracle, &arm, &specs, &servo, 1)?;
    println!(
        "battery: {}/{} reached, e_mean {:.4} mm",
        summary.successes(),
        summary.trials.len(),
        summary.e_mean.unwrap_or(f64::NAN) * 1e3
    );
    Ok(())
}
