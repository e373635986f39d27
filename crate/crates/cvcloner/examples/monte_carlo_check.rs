//! Monte Carlo trajectories versus the exact routes.
//!
//! Samples measurement outcomes one trajectory at a time, conditions and
//! displaces the clone accordingly, and averages the overlap with the input.
//! The estimate must land within a few standard errors of the closed form.
//! Also shows the two heterodyne realizations agreeing, the reproducibility
//! of counter-keyed trajectory streams, and worker-count independence.

use cvcloner::cloners::{symmetric_clone, CloneParams, Machine};
use cvcloner::mc::{mc_fidelity, mc_moments, HeterodyneModel, McConfig};
use cvcloner::CloneCount;
use nalgebra::Complex;

fn main() -> Result<(), cvcloner::Error> {
    let params = CloneParams::new(1, CloneCount::Finite(2)).with_alpha(Complex::new(0.7, 0.2));
    let exact = symmetric_clone(&params)?;
    let cfg = McConfig::new(Machine::Symmetric, params).with_trajectories(1_000_000).with_seed(7);

    let direct = mc_fidelity(&cfg)?;
    let ancilla = mc_fidelity(&cfg.with_heterodyne(HeterodyneModel::AncillaCircuit))?;
    println!("closed form fidelity:       {:.10}", exact.fidelity_analytic);
    println!(
        "circuit route:              {:.10}",
        exact.fidelity_circuit.expect("finite M has a circuit route")
    );
    println!("mc, direct heterodyne:      {:.10} ± {:.2e}", direct.mean, direct.stderr);
    println!("mc, ancilla-circuit:        {:.10} ± {:.2e}", ancilla.mean, ancilla.stderr);
    for est in [&direct, &ancilla] {
        let gap = (est.mean - exact.fidelity_analytic).abs();
        assert!(gap < 4.0 * est.stderr + 1e-12, "mc off by {gap:.2e}");
    }

    let moments = mc_moments(&cfg)?;
    println!();
    println!(
        "sampled clone mean: ({:.4} ± {:.0e}, {:.4} ± {:.0e}); input was (0.7, 0.2)",
        moments.mean[0], moments.mean_stderr[0], moments.mean[1], moments.mean_stderr[1]
    );
    println!(
        "sampled clone variances: ({:.4} ± {:.0e}, {:.4} ± {:.0e}); exact {:.4}",
        moments.cov[(0, 0)],
        moments.var_stderr[0],
        moments.cov[(1, 1)],
        moments.var_stderr[1],
        exact.var_x
    );

    // Same seed, same bits, no matter how many threads run the blocks.
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool builds")
        .install(|| mc_fidelity(&cfg))?;
    assert_eq!(single.mean.to_bits(), direct.mean.to_bits());
    println!();
    println!("1-thread and default-pool runs agree to the bit: {:.17}", single.mean);
    Ok(())
}
