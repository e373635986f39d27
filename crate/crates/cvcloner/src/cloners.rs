//! The two coherent-state cloning machines.
//!
//! Both machines share a skeleton: concentrate the N input copies into one
//! mode (`|α⟩⊗N → |√N α⟩`), split off a measured arm on a beam splitter of
//! transmittance ε, detect that arm, displace what is kept by a gain times
//! the outcome, and distribute the result over M output modes.
//!
//! * [`symmetric_clone`]: heterodyne detection, phase-insensitive. At the
//!   optimal split `ε = N/M` every clone reaches fidelity
//!   `MN/(MN + M - N)` with per-quadrature variance `1/4 + (1/2)(1/N - 1/M)`.
//!   The displacement can be applied jointly before distribution or
//!   individually per clone; both give identical output states.
//! * [`known_phase_clone`]: for real amplitudes. Homodyne detection of the
//!   x quadrature plus a squeezer of parameter `r` on every output arm;
//!   feed-forward acts on x only. `ε = N e^{2r}/M` keeps the machine at unit
//!   gain with clone variances `((1/4)(1/N + (1 - 1/M)e^{2r}), e^{-2r}/4)`.
//!
//! Sign bookkeeping: with this crate's beam-splitter convention the measured
//! arm carries amplitude `-√((1-ε)N)·α`, so the feed-forward gain matrices
//! apply the published gains with a compensating minus sign. Only magnitudes
//! enter the reported quantities; the unit-gain condition (clone mean = α)
//! is asserted on every report.
//!
//! Every finite-M report carries the fidelity along two routes (closed form
//! and exact circuit propagation) and errors if they disagree beyond 1e-10.
//! `M = INF` reports are analytic-only; the closed forms are exact limits.

use nalgebra::{Complex, DMatrix};

use crate::analysis;
use crate::gaussian::{concentrate, distribute, distributed_modes, GaussianState, SymplecticOp};
use crate::measurement::{measure, MeasurementKind};
use crate::{ensure_clonable, CloneCount, Error, Result};

/// Tolerance on the agreement between the analytic and circuit fidelity routes.
pub const ROUTE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Machine {
    Symmetric,
    KnownPhase,
}

impl std::fmt::Display for Machine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Machine::Symmetric => write!(f, "symmetric"),
            Machine::KnownPhase => write!(f, "known-phase"),
        }
    }
}

/// Beam-splitter split parameter: resolved automatically to the unit-gain
/// optimum, or fixed explicitly (deliberately suboptimal machines are valid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Epsilon {
    Auto,
    Explicit(f64),
}

/// Squeezing policy of the known-phase machine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SqueezePolicy {
    /// No squeezing (r = 0).
    None,
    /// Fidelity-maximizing squeezing.
    Optimal,
    /// Squeezing that equalizes the two clone variances.
    SymmetricNoise,
    /// A caller-chosen squeezing parameter.
    Explicit(f64),
}

impl std::fmt::Display for SqueezePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SqueezePolicy::None => write!(f, "none"),
            SqueezePolicy::Optimal => write!(f, "optimal"),
            SqueezePolicy::SymmetricNoise => write!(f, "symmetric-noise"),
            SqueezePolicy::Explicit(r) => write!(f, "r={r}"),
        }
    }
}

/// Where the symmetric machine applies its feed-forward displacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisplacementMode {
    /// One displacement on the kept mode before distribution.
    Joint,
    /// Per-clone displacements (gain scaled by 1/√M) after distribution.
    Individual,
}

/// Inputs of a cloning run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloneParams {
    pub n: u32,
    pub m: CloneCount,
    /// Input amplitude; must be real for the known-phase machine.
    pub alpha: Complex<f64>,
    pub epsilon: Epsilon,
    /// Known-phase machine only.
    pub squeeze: SqueezePolicy,
    /// Symmetric machine only; the known-phase machine always displaces
    /// per-arm and ignores this.
    pub displacement: DisplacementMode,
}

impl CloneParams {
    pub fn new(n: u32, m: CloneCount) -> Self {
        Self {
            n,
            m,
            alpha: Complex::new(0.0, 0.0),
            epsilon: Epsilon::Auto,
            squeeze: SqueezePolicy::None,
            displacement: DisplacementMode::Joint,
        }
    }

    pub fn with_alpha(mut self, alpha: Complex<f64>) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = Epsilon::Explicit(epsilon);
        self
    }

    pub fn with_squeeze(mut self, policy: SqueezePolicy) -> Self {
        self.squeeze = policy;
        self
    }

    pub fn with_displacement(mut self, mode: DisplacementMode) -> Self {
        self.displacement = mode;
        self
    }
}

/// Parameters with ε and r resolved to concrete values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedParams {
    pub n: u32,
    pub m: CloneCount,
    pub alpha: Complex<f64>,
    pub epsilon: f64,
    pub r: f64,
    pub squeeze: SqueezePolicy,
    pub displacement: DisplacementMode,
    /// True when ε came from [`Epsilon::Auto`].
    pub(crate) eps_auto: bool,
    /// Feed-forward gain as applied by the run mode (joint gain for
    /// symmetric-joint, per-clone gain otherwise).
    pub(crate) gain: f64,
    /// Gain seen by a single clone (`g/√M`, `g'`, or the M→∞ limit).
    pub(crate) per_clone_gain: f64,
}

/// Result of one cloning run. `fidelity_circuit` is `None` for `M = INF`
/// (the circuit route needs a finite mode count); `fidelity_mc` is filled by
/// [`crate::mc::attach_mc_fidelity`] when a Monte Carlo run is requested.
#[derive(Debug, Clone)]
pub struct CloneReport {
    pub machine: Machine,
    pub params: ResolvedParams,
    /// Feed-forward gain as applied (see [`ResolvedParams::gain`]).
    pub gain: f64,
    /// Reduced state of one clone (all M are identical).
    pub clone_state: GaussianState,
    pub var_x: f64,
    pub var_p: f64,
    pub fidelity_analytic: f64,
    pub fidelity_circuit: Option<f64>,
    /// Monte Carlo estimate and standard error, when run.
    pub fidelity_mc: Option<(f64, f64)>,
}

/// Resolves a squeezing policy to a concrete parameter for the known-phase
/// machine: 0, the fidelity optimum, the variance-equalizing point, or the
/// explicit value.
pub fn resolve_squeezing(n: u32, m: CloneCount, policy: SqueezePolicy) -> Result<f64> {
    ensure_clonable(n, m)?;
    match policy {
        SqueezePolicy::None => Ok(0.0),
        SqueezePolicy::Optimal => analysis::kp_optimal_squeezing(n, m),
        SqueezePolicy::SymmetricNoise => analysis::kp_symmetric_noise_squeezing(n, m),
        SqueezePolicy::Explicit(r) => Ok(r),
    }
}

/// Runs the symmetric N→M cloner and reports gains, clone moments, and the
/// fidelity along every available route.
pub fn symmetric_clone(params: &CloneParams) -> Result<CloneReport> {
    let rp = resolve(Machine::Symmetric, params)?;
    finish_report(Machine::Symmetric, rp)
}

/// Runs the known-phase N→M cloner (real α) and reports gains, clone
/// moments, and the fidelity along every available route.
pub fn known_phase_clone(params: &CloneParams) -> Result<CloneReport> {
    let rp = resolve(Machine::KnownPhase, params)?;
    finish_report(Machine::KnownPhase, rp)
}

/// Exact M-mode output ensemble of a finite-M cloning run (all clones plus
/// their correlations). Mode k is clone k.
pub fn clone_ensemble(machine: Machine, params: &CloneParams) -> Result<GaussianState> {
    let rp = resolve(machine, params)?;
    if rp.m.finite().is_none() {
        return Err(Error::InvalidParams(
            "the circuit route needs a finite clone count M".into(),
        ));
    }
    run_circuit(&build_circuit(machine, &rp)?)
}

// ---------------------------------------------------------------------------
// Parameter resolution

pub(crate) fn resolve(machine: Machine, p: &CloneParams) -> Result<ResolvedParams> {
    ensure_clonable(p.n, p.m)?;
    let nf = f64::from(p.n);
    let inv_m = p.m.inverse();

    let r = match machine {
        Machine::Symmetric => {
            if p.squeeze != SqueezePolicy::None {
                return Err(Error::InvalidParams(
                    "squeezing policies apply to the known-phase machine only".into(),
                ));
            }
            0.0
        }
        Machine::KnownPhase => {
            if p.alpha.im != 0.0 {
                return Err(Error::InvalidParams(format!(
                    "the known-phase machine requires a real amplitude, got {}",
                    p.alpha
                )));
            }
            resolve_squeezing(p.n, p.m, p.squeeze)?
        }
    };

    let (epsilon, eps_auto) = match p.epsilon {
        Epsilon::Auto => {
            let e = match machine {
                Machine::Symmetric => nf * inv_m,
                Machine::KnownPhase => nf * (2.0 * r).exp() * inv_m,
            };
            if e > 1.0 + 1e-9 {
                return Err(Error::InvalidParams(format!(
                    "unit gain requires N e^{{2r}} <= M, got N e^{{2r}}/M = {e:.6}"
                )));
            }
            // The optimal known-phase split saturates ε = 1 exactly whenever
            // M = N + 1; clamp the round-off.
            (e.min(1.0), true)
        }
        Epsilon::Explicit(e) => {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::InvalidParams(format!(
                    "split parameter epsilon must lie in [0, 1], got {e}"
                )));
            }
            (e, false)
        }
    };

    // Feed-forward gains. The numerator of the gain vanishes exactly when
    // the split is the unit-gain optimum at ε = 1; any other ε = 1 request
    // asks for an infinite gain.
    let per_clone_gain = match machine {
        Machine::Symmetric => {
            let numerator = 1.0 - (epsilon * nf * inv_m).sqrt();
            gain_from(numerator, epsilon, nf)?
        }
        Machine::KnownPhase => {
            if eps_auto {
                ((1.0 - epsilon) / nf).sqrt()
            } else {
                let numerator = 1.0 - r.exp() * (epsilon * nf * inv_m).sqrt();
                gain_from(numerator, epsilon, nf)?
            }
        }
    };
    let gain = match (machine, p.m, p.displacement) {
        (Machine::Symmetric, CloneCount::Finite(mf), DisplacementMode::Joint) => {
            per_clone_gain * f64::from(mf).sqrt()
        }
        _ => per_clone_gain,
    };

    Ok(ResolvedParams {
        n: p.n,
        m: p.m,
        alpha: p.alpha,
        epsilon,
        r,
        squeeze: p.squeeze,
        displacement: p.displacement,
        eps_auto,
        gain,
        per_clone_gain,
    })
}

/// Per-clone gain `numerator / √((1-ε)N)`, guarding the ε → 1 divergence.
fn gain_from(numerator: f64, epsilon: f64, nf: f64) -> Result<f64> {
    if epsilon >= 1.0 - 1e-12 {
        if numerator.abs() < 1e-9 {
            return Ok(0.0);
        }
        return Err(Error::DegenerateParameter(
            "the feed-forward gain diverges as epsilon approaches 1 away from the unit-gain optimum"
                .into(),
        ));
    }
    Ok(numerator / ((1.0 - epsilon) * nf).sqrt())
}

// ---------------------------------------------------------------------------
// Circuit construction (finite M)

/// A fully prepared measurement circuit: the pre-detection state, the
/// detection, the feed-forward gain matrix on the remaining modes, and an
/// optional trailing distribution (joint displacement mode).
pub(crate) struct Circuit {
    pub(crate) state: GaussianState,
    pub(crate) measured_mode: usize,
    pub(crate) kind: MeasurementKind,
    pub(crate) gain: DMatrix<f64>,
    pub(crate) post_distribute: Option<u32>,
}

pub(crate) fn build_circuit(machine: Machine, rp: &ResolvedParams) -> Result<Circuit> {
    let mf = rp
        .m
        .finite()
        .ok_or_else(|| Error::InvalidParams("the circuit route needs a finite clone count M".into()))?;
    let split = prepare_split(rp)?;
    match machine {
        Machine::Symmetric => match rp.displacement {
            DisplacementMode::Joint => Ok(Circuit {
                state: split,
                measured_mode: 1,
                kind: MeasurementKind::Heterodyne,
                gain: DMatrix::identity(2, 2) * -rp.gain,
                post_distribute: Some(mf),
            }),
            DisplacementMode::Individual => {
                let spread = distribute(&split, 0, mf)?;
                let d = 2 * mf as usize;
                let mut gain = DMatrix::zeros(d, 2);
                for arm in 0..mf as usize {
                    gain[(2 * arm, 0)] = -rp.gain;
                    gain[(2 * arm + 1, 1)] = -rp.gain;
                }
                Ok(Circuit {
                    state: spread,
                    measured_mode: 1,
                    kind: MeasurementKind::Heterodyne,
                    gain,
                    post_distribute: None,
                })
            }
        },
        Machine::KnownPhase => {
            let spread = distribute(&split, 0, mf)?;
            let n_modes = mf as usize + 1;
            let arms = distributed_modes(2, 0, mf);
            let mut op = SymplecticOp::identity(n_modes);
            for &arm in &arms {
                op = op.then(&SymplecticOp::squeezer(rp.r, arm, n_modes)?)?;
            }
            let state = op.apply(&spread)?;
            debug_assert_arm_amplitudes(&state, &arms, rp);
            // Feed-forward acts on x only.
            let d = 2 * mf as usize;
            let mut gain = DMatrix::zeros(d, 1);
            for arm in 0..mf as usize {
                gain[(2 * arm, 0)] = -rp.gain;
            }
            Ok(Circuit {
                state,
                measured_mode: 1,
                kind: MeasurementKind::HomodyneX,
                gain,
                post_distribute: None,
            })
        }
    }
}

/// Concentrates the N copies and splits off the measured arm: returns a
/// two-mode state with the kept arm `|√(εN) α⟩` in mode 0 and the measured
/// arm `|-√((1-ε)N) α⟩` in mode 1.
fn prepare_split(rp: &ResolvedParams) -> Result<GaussianState> {
    let alphas = vec![rp.alpha; rp.n as usize];
    let input = GaussianState::coherent(&alphas)?;
    let concentrated = concentrate(&input);
    let nf = f64::from(rp.n);
    debug_assert!(
        (concentrated.mean()[0] - nf.sqrt() * rp.alpha.re).abs() < 1e-12
            && (concentrated.mean()[1] - nf.sqrt() * rp.alpha.im).abs() < 1e-12,
        "concentration must yield amplitude √N·α"
    );
    let kept = concentrated.reduced(&[0])?.append_vacuum(1);
    let split = SymplecticOp::beam_splitter(rp.epsilon, 0, 1, 2)?.apply(&kept)?;
    debug_assert!(
        (split.mean()[0] - (rp.epsilon * nf).sqrt() * rp.alpha.re).abs() < 1e-12
            && (split.mean()[2] + ((1.0 - rp.epsilon) * nf).sqrt() * rp.alpha.re).abs() < 1e-12,
        "split arms must carry √(εN)·α and -√((1-ε)N)·α"
    );
    Ok(split)
}

fn debug_assert_arm_amplitudes(state: &GaussianState, arms: &[usize], rp: &ResolvedParams) {
    if cfg!(debug_assertions) {
        let nf = f64::from(rp.n);
        let expect = rp.r.exp() * (rp.epsilon * nf * rp.m.inverse()).sqrt() * rp.alpha.re;
        for &arm in arms {
            let (x, _) = state.mode_mean(arm).expect("arm index is valid");
            debug_assert!(
                (x - expect).abs() < 1e-12,
                "arm {arm} amplitude {x} != e^r √(εN/M)·α = {expect}"
            );
        }
    }
}

/// Measures, feeds forward, and (for the joint mode) distributes; returns
/// the M-mode ensemble.
pub(crate) fn run_circuit(circuit: &Circuit) -> Result<GaussianState> {
    let model = measure(&circuit.state, circuit.measured_mode, circuit.kind)?;
    let ens = model.ensemble_after_feedforward(&circuit.gain)?;
    match circuit.post_distribute {
        Some(parts) => distribute(&ens, 0, parts),
        None => Ok(ens),
    }
}

// ---------------------------------------------------------------------------
// Report assembly

fn finish_report(machine: Machine, rp: ResolvedParams) -> Result<CloneReport> {
    let fidelity_analytic = analytic_fidelity(machine, &rp)?;
    let (ana_var_x, ana_var_p) = analytic_variances(machine, &rp)?;

    if rp.m.is_finite() {
        let ensemble = run_circuit(&build_circuit(machine, &rp)?)?;
        let clone_state = ensemble.reduced(&[0])?;
        let var_x = clone_state.cov()[(0, 0)];
        let var_p = clone_state.cov()[(1, 1)];
        let fidelity_circuit = clone_state.overlap_with_coherent(rp.alpha)?;

        let dx = clone_state.mean()[0] - rp.alpha.re;
        let dp = clone_state.mean()[1] - rp.alpha.im;
        if dx.abs() >= ROUTE_TOL || dp.abs() >= ROUTE_TOL {
            return Err(Error::RouteDisagreement(format!(
                "unit-gain condition violated: clone mean offset ({dx:.3e}, {dp:.3e})"
            )));
        }
        if (fidelity_circuit - fidelity_analytic).abs() >= ROUTE_TOL {
            return Err(Error::RouteDisagreement(format!(
                "fidelity routes disagree: circuit {fidelity_circuit:.15} vs analytic {fidelity_analytic:.15}"
            )));
        }
        debug_assert!((var_x - ana_var_x).abs() < 1e-10 && (var_p - ana_var_p).abs() < 1e-10);
        Ok(CloneReport {
            machine,
            params: rp,
            gain: rp.gain,
            clone_state,
            var_x,
            var_p,
            fidelity_analytic,
            fidelity_circuit: Some(fidelity_circuit),
            fidelity_mc: None,
        })
    } else {
        // M = INF: analytic-only; the clone state is the exact limit.
        let cov = DMatrix::from_diagonal(&nalgebra::dvector![ana_var_x, ana_var_p]);
        let clone_state =
            GaussianState::new(nalgebra::dvector![rp.alpha.re, rp.alpha.im], cov)?;
        Ok(CloneReport {
            machine,
            params: rp,
            gain: rp.gain,
            clone_state,
            var_x: ana_var_x,
            var_p: ana_var_p,
            fidelity_analytic,
            fidelity_circuit: None,
            fidelity_mc: None,
        })
    }
}

/// Closed-form fidelity. At the automatic split this is the named optimum;
/// at an explicit split it is the ensemble-averaged overlap in closed form,
/// which reduces to the former at ε = ε_opt.
fn analytic_fidelity(machine: Machine, rp: &ResolvedParams) -> Result<f64> {
    match machine {
        Machine::Symmetric => {
            if rp.eps_auto {
                analysis::fidelity_symmetric(rp.n, rp.m)
            } else {
                // Per-quadrature clone variance 1/4 + g_pc²/2 with outcome
                // variance 1/2 folded in; F = 1/(1 + g_pc²).
                Ok(1.0 / (1.0 + rp.per_clone_gain * rp.per_clone_gain))
            }
        }
        Machine::KnownPhase => {
            if rp.eps_auto {
                analysis::fidelity_kp(rp.n, rp.m, rp.r)
            } else {
                let (vx, vp) = analytic_variances(machine, rp)?;
                Ok(1.0 / (2.0 * ((vx + 0.25) * (vp + 0.25)).sqrt()))
            }
        }
    }
}

fn analytic_variances(machine: Machine, rp: &ResolvedParams) -> Result<(f64, f64)> {
    match machine {
        Machine::Symmetric => {
            if rp.eps_auto {
                let v = analysis::variance_symmetric(rp.n, rp.m)?;
                Ok((v, v))
            } else {
                let v = 0.25 + 0.5 * rp.per_clone_gain * rp.per_clone_gain;
                Ok((v, v))
            }
        }
        Machine::KnownPhase => {
            if rp.eps_auto {
                analysis::variances_kp(rp.n, rp.m, rp.r)
            } else {
                let g = rp.per_clone_gain;
                Ok((
                    0.25 * ((2.0 * rp.r).exp() + g * g),
                    0.25 * (-2.0 * rp.r).exp(),
                ))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const INF: CloneCount = CloneCount::Inf;

    fn fin(m: u32) -> CloneCount {
        CloneCount::Finite(m)
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn symmetric_one_to_two_reaches_two_thirds() {
        let p = CloneParams::new(1, fin(2)).with_alpha(c(0.8, -0.3));
        let rep = symmetric_clone(&p).unwrap();
        assert_relative_eq!(rep.params.epsilon, 0.5, epsilon = 1e-15);
        assert_relative_eq!(rep.gain, 1.0, epsilon = 1e-14); // joint gain g_{1,2}
        assert_relative_eq!(rep.params.per_clone_gain, 0.5f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(rep.fidelity_analytic, 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(rep.fidelity_circuit.unwrap(), 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(rep.var_x, 0.5, epsilon = 1e-12);
        assert_relative_eq!(rep.var_p, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_two_to_three_reaches_six_sevenths() {
        let rep = symmetric_clone(&CloneParams::new(2, fin(3)).with_alpha(c(-1.2, 0.4))).unwrap();
        assert_relative_eq!(rep.fidelity_analytic, 6.0 / 7.0, epsilon = 1e-15);
        assert_relative_eq!(rep.fidelity_circuit.unwrap(), 6.0 / 7.0, epsilon = 1e-11);
        assert_relative_eq!(rep.var_x, 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_suboptimal_split_degrades_fidelity_but_routes_agree() {
        let p = CloneParams::new(1, fin(2)).with_alpha(c(0.5, 0.5)).with_epsilon(0.3);
        let rep = symmetric_clone(&p).unwrap();
        assert!(rep.fidelity_analytic < 2.0 / 3.0);
        let diff = (rep.fidelity_circuit.unwrap() - rep.fidelity_analytic).abs();
        assert!(diff < ROUTE_TOL, "routes differ by {diff}");
        // Unit gain holds for any split.
        assert_relative_eq!(rep.clone_state.mean()[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_displacement_modes_agree_exactly() {
        for (n, m) in [(1, 2u32), (2, 5), (3, 4)] {
            let base = CloneParams::new(n, fin(m)).with_alpha(c(0.3, 0.9));
            let joint = clone_ensemble(Machine::Symmetric, &base).unwrap();
            let individual = clone_ensemble(
                Machine::Symmetric,
                &base.with_displacement(DisplacementMode::Individual),
            )
            .unwrap();
            for k in 0..m as usize {
                let a = joint.reduced(&[k]).unwrap();
                let b = individual.reduced(&[k]).unwrap();
                let dm = (a.mean() - b.mean()).amax();
                let dc = (a.cov() - b.cov()).amax();
                assert!(dm < 1e-12 && dc < 1e-12, "clone {k} differs: {dm:.2e}/{dc:.2e}");
            }
        }
    }

    #[test]
    fn all_clones_of_the_ensemble_are_identical() {
        for machine in [Machine::Symmetric, Machine::KnownPhase] {
            let p = CloneParams::new(2, fin(4)).with_alpha(c(0.6, 0.0));
            let ens = clone_ensemble(machine, &p).unwrap();
            assert_eq!(ens.n_modes(), 4);
            let first = ens.reduced(&[0]).unwrap();
            for k in 1..4 {
                let other = ens.reduced(&[k]).unwrap();
                assert!((first.mean() - other.mean()).amax() < 1e-12);
                assert!((first.cov() - other.cov()).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn explicit_unit_epsilon_with_nonzero_gain_is_degenerate() {
        let p = CloneParams::new(1, fin(2)).with_epsilon(1.0);
        assert!(matches!(symmetric_clone(&p), Err(Error::DegenerateParameter(_))));
        assert!(matches!(known_phase_clone(&p), Err(Error::DegenerateParameter(_))));
    }

    #[test]
    fn symmetric_inf_is_analytic_only() {
        let rep = symmetric_clone(&CloneParams::new(1, INF).with_alpha(c(1.0, 2.0))).unwrap();
        assert_eq!(rep.fidelity_circuit, None);
        assert_relative_eq!(rep.fidelity_analytic, 0.5, epsilon = 1e-15);
        assert_relative_eq!(rep.var_x, 0.75, epsilon = 1e-15);
        assert_relative_eq!(rep.params.epsilon, 0.0, epsilon = 1e-15);
        assert_relative_eq!(rep.gain, 1.0, epsilon = 1e-15); // per-clone limit 1/√N
        assert_relative_eq!(rep.clone_state.mean()[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn known_phase_golden_one_to_two_policies() {
        let base = CloneParams::new(1, fin(2)).with_alpha(c(0.7, 0.0));

        let none = known_phase_clone(&base).unwrap();
        assert_relative_eq!(none.fidelity_analytic, (4.0f64 / 5.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(none.var_x, 3.0 / 8.0, epsilon = 1e-12);
        assert_relative_eq!(none.var_p, 0.25, epsilon = 1e-12);
        assert_relative_eq!(none.params.epsilon, 0.5, epsilon = 1e-15);

        let opt = known_phase_clone(&base.with_squeeze(SqueezePolicy::Optimal)).unwrap();
        assert_relative_eq!(opt.params.r, 2.0f64.ln() / 2.0, epsilon = 1e-14);
        assert_relative_eq!(opt.fidelity_analytic, 2.0 * 2.0f64.sqrt() / 3.0, epsilon = 1e-14);
        // The optimal 1→2 split saturates ε = 1: measured arm is vacuum, gain 0.
        assert_relative_eq!(opt.params.epsilon, 1.0, epsilon = 1e-12);
        assert_eq!(opt.gain, 0.0);
        assert_relative_eq!(
            opt.fidelity_circuit.unwrap(),
            2.0 * 2.0f64.sqrt() / 3.0,
            epsilon = 1e-11
        );

        let sym = known_phase_clone(&base.with_squeeze(SqueezePolicy::SymmetricNoise)).unwrap();
        assert_relative_eq!(sym.fidelity_analytic, 4.0 / (3.0 + 3.0f64.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(sym.var_x, sym.var_p, epsilon = 1e-11);
    }

    #[test]
    fn known_phase_circuit_is_continuous_at_the_degenerate_split() {
        // Approach ε = 1 along explicit splits with the matching squeezing:
        // fidelity must converge to the ε = 1 value the AUTO path produces.
        let r = 2.0f64.ln() / 2.0;
        let base = CloneParams::new(1, fin(2))
            .with_alpha(c(0.4, 0.0))
            .with_squeeze(SqueezePolicy::Explicit(r));
        let at_one = known_phase_clone(&base).unwrap(); // AUTO resolves to ε = 1
        assert_relative_eq!(at_one.params.epsilon, 1.0, epsilon = 1e-12);
        let mut prev_gap = f64::INFINITY;
        for eps in [0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999] {
            let rep = known_phase_clone(&base.with_epsilon(eps)).unwrap();
            let gap = (rep.fidelity_circuit.unwrap() - at_one.fidelity_circuit.unwrap()).abs();
            assert!(gap < prev_gap, "fidelity should approach the ε = 1 value");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-7);
    }

    #[test]
    fn known_phase_requires_real_amplitude_and_feasible_squeezing() {
        let complex_amp = CloneParams::new(1, fin(2)).with_alpha(c(0.3, 0.1));
        assert!(matches!(known_phase_clone(&complex_amp), Err(Error::InvalidParams(_))));
        // N e^{2r} > M has no unit-gain split.
        let too_much = CloneParams::new(2, fin(3)).with_squeeze(SqueezePolicy::Explicit(1.0));
        let err = known_phase_clone(&too_much).unwrap_err();
        assert!(err.to_string().contains("N e^{2r} <= M"), "got: {err}");
    }

    #[test]
    fn symmetric_rejects_squeezing_requests() {
        let p = CloneParams::new(1, fin(2)).with_squeeze(SqueezePolicy::Optimal);
        assert!(matches!(symmetric_clone(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn known_phase_inf_limits() {
        let none = known_phase_clone(&CloneParams::new(1, INF).with_alpha(c(0.2, 0.0))).unwrap();
        assert_relative_eq!(none.fidelity_analytic, (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        assert_eq!(none.fidelity_circuit, None);
        let sym = known_phase_clone(
            &CloneParams::new(1, INF).with_squeeze(SqueezePolicy::SymmetricNoise),
        )
        .unwrap();
        let expect = (5.0f64.sqrt() + 1.0) / 8.0;
        assert_relative_eq!(sym.var_x, expect, epsilon = 1e-14);
        assert_relative_eq!(sym.var_p, expect, epsilon = 1e-14);
    }

    #[test]
    fn reports_are_independent_of_alpha() {
        for machine in [Machine::Symmetric, Machine::KnownPhase] {
            let runner = match machine {
                Machine::Symmetric => symmetric_clone,
                Machine::KnownPhase => known_phase_clone,
            };
            let a = runner(&CloneParams::new(1, fin(3)).with_alpha(c(0.0, 0.0))).unwrap();
            let b = runner(&CloneParams::new(1, fin(3)).with_alpha(c(3.0, 0.0))).unwrap();
            assert_relative_eq!(a.fidelity_analytic, b.fidelity_analytic, epsilon = 1e-12);
            assert_relative_eq!(
                a.fidelity_circuit.unwrap(),
                b.fidelity_circuit.unwrap(),
                epsilon = 1e-10
            );
            assert_relative_eq!(a.var_x, b.var_x, epsilon = 1e-12);
        }
    }

    #[test]
    fn resolve_squeezing_matches_named_points() {
        assert_eq!(resolve_squeezing(1, fin(2), SqueezePolicy::None).unwrap(), 0.0);
        assert_relative_eq!(
            resolve_squeezing(1, fin(2), SqueezePolicy::Optimal).unwrap(),
            2.0f64.ln() / 2.0,
            epsilon = 1e-15
        );
        let r = resolve_squeezing(1, INF, SqueezePolicy::SymmetricNoise).unwrap();
        assert_relative_eq!((-2.0 * r).exp(), (1.0 + 5.0f64.sqrt()) / 2.0, epsilon = 1e-14);
        assert_eq!(resolve_squeezing(2, fin(5), SqueezePolicy::Explicit(-0.3)).unwrap(), -0.3);
        assert!(resolve_squeezing(2, fin(2), SqueezePolicy::None).is_err());
    }

    #[test]
    fn epsilon_auto_maximizes_fidelity_on_a_grid() {
        for machine in [Machine::Symmetric, Machine::KnownPhase] {
            let runner = match machine {
                Machine::Symmetric => symmetric_clone,
                Machine::KnownPhase => known_phase_clone,
            };
            let auto = runner(&CloneParams::new(1, fin(3)).with_alpha(c(0.4, 0.0))).unwrap();
            for k in 1..20 {
                let eps = k as f64 / 20.0;
                let sub = runner(
                    &CloneParams::new(1, fin(3)).with_alpha(c(0.4, 0.0)).with_epsilon(eps),
                )
                .unwrap();
                assert!(
                    auto.fidelity_analytic >= sub.fidelity_analytic - 1e-12,
                    "{machine}: ε = {eps} beat the automatic split"
                );
            }
        }
    }
}
