//! Gaussian quantum-optics toolkit for coherent-state cloning circuits.
//!
//! The crate simulates multimode Gaussian states in the covariance-matrix
//! picture and uses them to build two concrete cloning machines for coherent
//! states:
//!
//! * a **symmetric N→M cloner** (beam-splitter concentration, heterodyne
//!   detection, displacement feed-forward, beam-splitter distribution), and
//! * a **known-phase N→M cloner** for real amplitudes (homodyne detection
//!   plus per-copy squeezing).
//!
//! Every reported quantity is computed along independent routes and checked
//! for agreement:
//!
//! 1. closed-form expressions ([`analysis`]),
//! 2. exact covariance propagation through the measurement circuit
//!    ([`gaussian`], [`measurement`], [`cloners`]),
//! 3. Monte Carlo trajectory sampling with a counter-keyed deterministic
//!    generator ([`mc`], [`rng`]).
//!
//! The primary interface is the `examples/` directory (one runnable example
//! per capability, `cargo run --example <name>`); a thin `cvcloner` binary
//! exposes the same functionality as subcommands for scripting ([`cli`]).
//!
//! # Conventions
//!
//! Quadratures are ordered `(x1, p1, ..., xn, pn)` with `x = (a + a†)/2`, so
//! the vacuum has variance 1/4 per quadrature and a coherent state `|α⟩` has
//! mean `(Re α, Im α)` with vacuum covariance.
//!
//! ```
//! use cvcloner::cloners::{symmetric_clone, CloneParams};
//! use cvcloner::CloneCount;
//!
//! let report = symmetric_clone(&CloneParams::new(1, CloneCount::Finite(2))).unwrap();
//! assert!((report.fidelity_analytic - 2.0 / 3.0).abs() < 1e-12);
//! assert!((report.fidelity_circuit.unwrap() - 2.0 / 3.0).abs() < 1e-10);
//! ```

pub mod analysis;
pub mod cli;
pub mod cloners;
mod error;
pub mod gaussian;
pub mod mc;
pub mod measurement;
pub mod report;
pub mod rng;

pub use error::Error;
pub use gaussian::{GaussianState, SymplecticOp};

pub type Result<T> = std::result::Result<T, Error>;

/// Number of output copies requested from a cloning machine: a finite count
/// or the measure-and-prepare limit `M → ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CloneCount {
    Finite(u32),
    Inf,
}

impl CloneCount {
    /// `1/M`, exactly 0 in the infinite limit. The closed forms below are
    /// all rational in `1/M`, so the limit needs no special-casing.
    pub fn inverse(self) -> f64 {
        match self {
            CloneCount::Finite(m) => 1.0 / f64::from(m),
            CloneCount::Inf => 0.0,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, CloneCount::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            CloneCount::Finite(m) => Some(m),
            CloneCount::Inf => None,
        }
    }
}

impl std::fmt::Display for CloneCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CloneCount::Finite(m) => write!(f, "{m}"),
            CloneCount::Inf => write!(f, "inf"),
        }
    }
}

impl std::str::FromStr for CloneCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(CloneCount::Inf);
        }
        s.parse::<u32>()
            .map(CloneCount::Finite)
            .map_err(|_| Error::InvalidParams(format!("clone count must be an integer or \"inf\", got {s:?}")))
    }
}

/// Checks the cloning precondition `1 <= N < M` (INF counts as `M > N`).
pub(crate) fn ensure_clonable(n: u32, m: CloneCount) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParams("input copy count N must be at least 1".into()));
    }
    if let CloneCount::Finite(mf) = m {
        if mf <= n {
            return Err(Error::InvalidParams(format!(
                "output copy count M must exceed N, got N = {n}, M = {mf}"
            )));
        }
    }
    Ok(())
}
