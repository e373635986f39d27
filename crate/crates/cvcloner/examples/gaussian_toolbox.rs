//! The Gaussian layer underneath the cloners, piece by piece.
//!
//! Builds the cloning pipeline by hand from the public toolbox: coherent
//! states, the concentration cascade, a tunable split, heterodyne detection
//! with feed-forward, and distribution over output modes. Ends with the
//! overlap computation and a look at symplectic invariants.

use cvcloner::gaussian::{concentrate, distribute, symplectic_deviation};
use cvcloner::measurement::{measure, MeasurementKind};
use cvcloner::{GaussianState, SymplecticOp};
use nalgebra::{Complex, DMatrix};

fn main() -> Result<(), cvcloner::Error> {
    let alpha = Complex::new(0.6, -0.2);
    let n = 2u32;
    let m = 3u32;

    // N identical copies in, one bright mode out.
    let copies = GaussianState::coherent(&vec![alpha; n as usize])?;
    let bright = concentrate(&copies);
    println!(
        "concentrated amplitude: ({:.6}, {:.6}) = sqrt({n}) * alpha",
        bright.mean()[0],
        bright.mean()[1]
    );

    // Keep eps = N/M of it, measure the rest.
    let eps = f64::from(n) / f64::from(m);
    let split = SymplecticOp::beam_splitter(eps, 0, 1, 2)?
        .apply(&bright.reduced(&[0])?.append_vacuum(1))?;
    println!(
        "split arms: kept ({:+.6}, {:+.6}), measured ({:+.6}, {:+.6})",
        split.mean()[0],
        split.mean()[1],
        split.mean()[2],
        split.mean()[3]
    );

    // Heterodyne the measured arm; apply the joint feed-forward gain.
    let model = measure(&split, 1, MeasurementKind::Heterodyne)?;
    let g = (f64::from(m) / ((1.0 - eps) * f64::from(n))).sqrt()
        * (1.0 - (eps * f64::from(n) / f64::from(m)).sqrt());
    // This convention's measured arm carries -sqrt((1-eps)N) alpha, so the
    // displacement compensates with -g.
    let ens = model.ensemble_after_feedforward(&(DMatrix::identity(2, 2) * -g))?;
    println!("after feed-forward: mean ({:.6}, {:.6}), var {:.6}", ens.mean()[0], ens.mean()[1], ens.cov()[(0, 0)]);

    // Spread over M clones and take one.
    let clones = distribute(&ens, 0, m)?;
    let clone = clones.reduced(&[0])?;
    let fidelity = clone.overlap_with_coherent(alpha)?;
    println!(
        "clone: mean ({:.6}, {:.6}), variance {:.6}, fidelity {:.10}",
        clone.mean()[0],
        clone.mean()[1],
        clone.cov()[(0, 0)],
        fidelity
    );
    let expect = f64::from(m * n) / f64::from(m * n + m - n);
    assert!((fidelity - expect).abs() < 1e-10, "hand-built pipeline must hit MN/(MN+M-N)");

    // Invariants: the pipeline is symplectic, so purity only leaves through
    // the measurement; every state stays physical.
    let nu = clones.min_symplectic_eigenvalue();
    println!();
    println!("smallest symplectic eigenvalue of the output ensemble: {nu:.6} (>= 1/4)");
    let op = SymplecticOp::beam_splitter(0.37, 0, 2, 3)?
        .then(&SymplecticOp::squeezer(0.4, 1, 3)?)?
        .then(&SymplecticOp::phase_rotation(1.1, 2, 3)?)?;
    println!(
        "chained op deviation from the symplectic form: {:.2e}",
        symplectic_deviation(op.matrix())
    );
    Ok(())
}
