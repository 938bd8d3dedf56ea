//! Phase-plane analysis of the two neuron types used by the network, and
//! their firing-rate response to constant current.
//!
//! ```text
//! cargo run --example neuron_phase_plane
//! ```

use dmsnn::izhikevich::{count_spikes, NeuronParams, TuningReport};

fn main() -> dmsnn::Result<()> {
    for (name, params) in [
        ("fast-spiking (sensory)", NeuronParams::FAST_SPIKING),
        ("motor", NeuronParams::MOTOR),
    ] {
        println!("== {name}");
        println!("{}\n", TuningReport::analyze(params, 0.0)?);
    }

    // Motor output is sensitive to b only near threshold: rates converge at
    // high current.
    let currents = [5.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0, 50.0];
    print!("{:>6}", "b \\ I");
    for i in currents {
        print!("{i:>7}");
    }
    println!("   rheobase");
    for b in [0.1, 0.15, 0.2] {
        let p = NeuronParams { b, ..NeuronParams::MOTOR };
        print!("{b:>6}");
        for i in currents {
            // 1 s run, first 200 ms discarded.
            let hz = count_spikes(&p, i, 1200.0, 200.0, 1.0);
            print!("{hz:>7}");
        }
        println!("   {:.4}", p.rheobase());
    }
    Ok(())
}
