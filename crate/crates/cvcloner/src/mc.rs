//! Monte Carlo cross-check of the cloning circuits.
//!
//! Instead of propagating covariance matrices in closed form, this route
//! samples concrete detection outcomes trajectory by trajectory, applies the
//! feed-forward displacement to the outcome-conditioned state, and averages
//! the per-trajectory overlap with the input amplitude. The estimate must
//! agree with the other two routes within its own standard error.
//!
//! Trajectory t draws its randomness from an independent counter-keyed
//! stream ([`crate::rng::Stream::for_trajectory`]), and trajectories are
//! summed in fixed blocks of [`BLOCK`] whose partial sums are reduced in
//! block order. Results are therefore bit-identical for a given seed no
//! matter how many worker threads run the blocks.
//!
//! Gaussian conditioning makes the clone mean exactly affine in the outcome
//! while the clone covariance stays fixed, so each trajectory reduces to one
//! affine map plus one closed-form overlap. [`TrajectoryKernel`] probes that
//! affine map from the honest conditional-state machinery once per run and
//! asserts the affinity it relies on.
//!
//! Heterodyne outcomes can be drawn from the outcome distribution directly
//! or from an explicit ancilla circuit (balanced beam splitter, π/2 rotation,
//! two sequential x detections), which checks the double-homodyne picture of
//! heterodyne detection against its one-shot statistics.

use std::f64::consts::SQRT_2;

use nalgebra::{Cholesky, DMatrix, DVector, Matrix2, Vector2};
use rayon::prelude::*;

use crate::cloners::{build_circuit, resolve, CloneParams, CloneReport, Machine, ResolvedParams};
use crate::gaussian::{distribute, GaussianState, SymplecticOp};
use crate::measurement::{measure, MeasurementKind, MeasurementModel};
use crate::rng::Stream;
use crate::{Error, Result};

/// Trajectories per reduction block. Fixed so that the partial-sum layout,
/// and hence the result bit pattern, is independent of the worker count.
pub const BLOCK: u64 = 8192;

/// How heterodyne outcomes are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeterodyneModel {
    /// Sample the smoothed outcome distribution directly.
    Direct,
    /// Split on a balanced beam splitter with a vacuum ancilla, rotate the
    /// ancilla arm by π/2, and detect x on both arms sequentially.
    AncillaCircuit,
}

/// A Monte Carlo run specification.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub machine: Machine,
    pub params: CloneParams,
    pub trajectories: u64,
    pub seed: u64,
    /// Ignored when the machine detects by homodyne.
    pub heterodyne: HeterodyneModel,
}

impl McConfig {
    pub fn new(machine: Machine, params: CloneParams) -> Self {
        Self {
            machine,
            params,
            trajectories: 100_000,
            seed: 42,
            heterodyne: HeterodyneModel::Direct,
        }
    }

    pub fn with_trajectories(mut self, trajectories: u64) -> Self {
        self.trajectories = trajectories;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_heterodyne(mut self, model: HeterodyneModel) -> Self {
        self.heterodyne = model;
        self
    }
}

/// Sample mean and standard error of the per-trajectory fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trajectories: u64,
    /// True when too few trajectories were run to estimate a spread.
    pub degenerate: bool,
}

/// Sampled clone quadrature moments with their standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McMoments {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
    pub mean_stderr: Vector2<f64>,
    /// Standard errors of the two diagonal covariance entries, from the
    /// fourth central moments.
    pub var_stderr: Vector2<f64>,
    pub trajectories: u64,
    pub degenerate: bool,
}

/// Estimates the clone fidelity by trajectory sampling.
pub fn mc_fidelity(config: &McConfig) -> Result<McEstimate> {
    let rp = resolve(config.machine, &config.params)?;
    mc_fidelity_resolved(config.machine, &rp, config.trajectories, config.seed, config.heterodyne)
}

/// Estimates the clone mean and covariance by sampling one phase-space point
/// per trajectory from the conditioned clone state.
pub fn mc_moments(config: &McConfig) -> Result<McMoments> {
    let rp = resolve(config.machine, &config.params)?;
    let kernel = TrajectoryKernel::build(config.machine, &rp, config.heterodyne)?;
    let t = check_trajectories(config.trajectories)?;

    let sums = reduce_blocks::<9>(t, |block| {
        let mut acc = [Kahan::default(); 9];
        for traj in block {
            let mut stream = Stream::for_trajectory(config.seed, traj);
            let (x, p) = kernel.sample_point(&mut stream);
            let contributions =
                [x, p, x * x, p * p, x * p, x * x * x, p * p * p, x * x * x * x, p * p * p * p];
            for (a, v) in acc.iter_mut().zip(contributions) {
                a.add(v);
            }
        }
        acc.map(Kahan::value)
    });

    let tf = t as f64;
    let [sx, sp, sx2, sp2, sxp, sx3, sp3, sx4, sp4] = sums;
    let mx = sx / tf;
    let mp = sp / tf;
    if t < 2 {
        return Ok(McMoments {
            mean: Vector2::new(mx, mp),
            cov: Matrix2::zeros(),
            mean_stderr: Vector2::zeros(),
            var_stderr: Vector2::zeros(),
            trajectories: t,
            degenerate: true,
        });
    }
    let var_x = (sx2 - tf * mx * mx) / (tf - 1.0);
    let var_p = (sp2 - tf * mp * mp) / (tf - 1.0);
    let cov_xp = (sxp - tf * mx * mp) / (tf - 1.0);
    // Fourth central moments from the raw power sums.
    let m4 = |s4: f64, s3: f64, s2: f64, m: f64| {
        (s4 - 4.0 * m * s3 + 6.0 * m * m * s2 - 3.0 * m * m * m * m * tf) / tf
    };
    let m4x = m4(sx4, sx3, sx2, mx);
    let m4p = m4(sp4, sp3, sp2, mp);
    Ok(McMoments {
        mean: Vector2::new(mx, mp),
        cov: Matrix2::new(var_x, cov_xp, cov_xp, var_p),
        mean_stderr: Vector2::new((var_x / tf).sqrt(), (var_p / tf).sqrt()),
        var_stderr: Vector2::new(
            ((m4x - var_x * var_x).max(0.0) / tf).sqrt(),
            ((m4p - var_p * var_p).max(0.0) / tf).sqrt(),
        ),
        trajectories: t,
        degenerate: false,
    })
}

/// Runs [`mc_fidelity`] for an existing report and stores the estimate in
/// its `fidelity_mc` field.
pub fn attach_mc_fidelity(
    report: &mut CloneReport,
    trajectories: u64,
    seed: u64,
    heterodyne: HeterodyneModel,
) -> Result<McEstimate> {
    let est =
        mc_fidelity_resolved(report.machine, &report.params, trajectories, seed, heterodyne)?;
    report.fidelity_mc = Some((est.mean, est.stderr));
    Ok(est)
}

pub(crate) fn mc_fidelity_resolved(
    machine: Machine,
    rp: &ResolvedParams,
    trajectories: u64,
    seed: u64,
    heterodyne: HeterodyneModel,
) -> Result<McEstimate> {
    let kernel = TrajectoryKernel::build(machine, rp, heterodyne)?;
    let t = check_trajectories(trajectories)?;

    let [sum, sum_sq] = reduce_blocks::<2>(t, |block| {
        let mut acc = [Kahan::default(); 2];
        for traj in block {
            let mut stream = Stream::for_trajectory(seed, traj);
            let f = kernel.sample_fidelity(&mut stream);
            acc[0].add(f);
            acc[1].add(f * f);
        }
        acc.map(Kahan::value)
    });

    let tf = t as f64;
    let mean = sum / tf;
    if t < 2 {
        return Ok(McEstimate { mean, stderr: 0.0, trajectories: t, degenerate: true });
    }
    let var = ((sum_sq - tf * mean * mean) / (tf - 1.0)).max(0.0);
    Ok(McEstimate { mean, stderr: (var / tf).sqrt(), trajectories: t, degenerate: false })
}

fn check_trajectories(trajectories: u64) -> Result<u64> {
    if trajectories == 0 {
        return Err(Error::InvalidParams("at least one trajectory is required".into()));
    }
    Ok(trajectories)
}

/// Maps `body` over fixed trajectory blocks in parallel and folds the partial
/// sums sequentially in block order.
fn reduce_blocks<const K: usize>(
    trajectories: u64,
    body: impl Fn(std::ops::Range<u64>) -> [f64; K] + Sync,
) -> [f64; K] {
    let blocks = trajectories.div_ceil(BLOCK) as usize;
    let partials: Vec<[f64; K]> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = b as u64 * BLOCK;
            let hi = (lo + BLOCK).min(trajectories);
            body(lo..hi)
        })
        .collect();
    let mut acc = [Kahan::default(); K];
    for partial in partials {
        for (a, v) in acc.iter_mut().zip(partial) {
            a.add(v);
        }
    }
    acc.map(Kahan::value)
}

/// Compensated accumulator; keeps block sums independent of summand count.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum
    }
}

// ---------------------------------------------------------------------------
// Trajectory kernel

/// The exact affine reduction of one trajectory: outcome deviation `δ`
/// (sampled through the outcome Cholesky factor) maps to the clone mean
/// `base + response·δ`; the clone covariance is outcome-independent. Probed
/// from the conditional-state machinery, never written down by hand.
pub(crate) struct TrajectoryKernel {
    dim: usize,
    #[cfg_attr(not(test), allow(dead_code))]
    outcome_mean: [f64; 2],
    /// Lower Cholesky factor of the outcome covariance.
    l: [[f64; 2]; 2],
    /// Clone mean at the average outcome.
    base: [f64; 2],
    /// d(clone mean)/d(outcome), 2 × dim.
    response: [[f64; 2]; 2],
    #[cfg_attr(not(test), allow(dead_code))]
    clone_cov: Matrix2<f64>,
    /// Lower Cholesky factor of the clone covariance (moment sampling).
    cchol: [[f64; 2]; 2],
    /// Inverse of clone covariance + vacuum quarter (overlap quadratic form).
    ainv: [[f64; 2]; 2],
    prefactor: f64,
    alpha: [f64; 2],
}

impl TrajectoryKernel {
    pub(crate) fn build(
        machine: Machine,
        rp: &ResolvedParams,
        heterodyne: HeterodyneModel,
    ) -> Result<Self> {
        let circuit = build_circuit(machine, rp)?;
        match (circuit.kind, heterodyne) {
            (MeasurementKind::Heterodyne, HeterodyneModel::AncillaCircuit) => {
                let chain = AncillaChain::prepare(
                    &circuit.state,
                    circuit.measured_mode,
                    circuit.gain.clone(),
                    circuit.post_distribute,
                )?;
                let (omean, ochol) = chain.outcome_distribution()?;
                Self::from_chain(&omean, &ochol, rp.alpha.re, rp.alpha.im, |o| chain.clone_at(o))
            }
            _ => {
                let model = measure(&circuit.state, circuit.measured_mode, circuit.kind)?;
                let omean = model.outcome_mean.clone();
                let ochol = model.outcome_chol().clone();
                let chain = DirectChain {
                    model,
                    gain: circuit.gain.clone(),
                    post_distribute: circuit.post_distribute,
                };
                Self::from_chain(&omean, &ochol, rp.alpha.re, rp.alpha.im, |o| chain.clone_at(o))
            }
        }
    }

    /// Probes the affine outcome-to-clone map of `clone_at` at the average
    /// outcome and one unit step per outcome component.
    fn from_chain(
        outcome_mean: &DVector<f64>,
        outcome_chol: &DMatrix<f64>,
        alpha_x: f64,
        alpha_p: f64,
        clone_at: impl Fn(&DVector<f64>) -> Result<GaussianState>,
    ) -> Result<Self> {
        let dim = outcome_mean.len();
        debug_assert!(dim == 1 || dim == 2);
        let base_state = clone_at(outcome_mean)?;
        let clone_cov_dyn = base_state.cov();
        let mut response = [[0.0; 2]; 2];
        for i in 0..dim {
            let mut o = outcome_mean.clone();
            o[i] += 1.0;
            let probed = clone_at(&o)?;
            debug_assert!(
                (probed.cov() - clone_cov_dyn).amax() < 1e-10,
                "outcome conditioning must leave the clone covariance fixed"
            );
            response[0][i] = probed.mean()[0] - base_state.mean()[0];
            response[1][i] = probed.mean()[1] - base_state.mean()[1];
        }

        let clone_cov = Matrix2::new(
            clone_cov_dyn[(0, 0)],
            clone_cov_dyn[(0, 1)],
            clone_cov_dyn[(1, 0)],
            clone_cov_dyn[(1, 1)],
        );
        let a = clone_cov + Matrix2::identity() * 0.25;
        let chol_a = Cholesky::new(a).ok_or(Error::NotPositiveDefinite)?;
        let prefactor = 1.0 / (2.0 * chol_a.determinant().sqrt());
        let ainv_m = chol_a.inverse();
        let cchol_m = Cholesky::new(clone_cov).ok_or(Error::NotPositiveDefinite)?.l();

        let mut l = [[0.0; 2]; 2];
        let mut omean = [0.0; 2];
        for i in 0..dim {
            omean[i] = outcome_mean[i];
            for j in 0..=i {
                l[i][j] = outcome_chol[(i, j)];
            }
        }
        Ok(Self {
            dim,
            outcome_mean: omean,
            l,
            base: [base_state.mean()[0], base_state.mean()[1]],
            response,
            clone_cov,
            cchol: [[cchol_m[(0, 0)], 0.0], [cchol_m[(1, 0)], cchol_m[(1, 1)]]],
            ainv: [
                [ainv_m[(0, 0)], ainv_m[(0, 1)]],
                [ainv_m[(1, 0)], ainv_m[(1, 1)]],
            ],
            prefactor,
            alpha: [alpha_x, alpha_p],
        })
    }

    /// Draws one outcome deviation `o - ō` through the Cholesky factor.
    fn sample_outcome_dev(&self, stream: &mut Stream) -> (f64, f64) {
        let z0 = stream.standard_normal();
        if self.dim == 1 {
            (self.l[0][0] * z0, 0.0)
        } else {
            let z1 = stream.standard_normal();
            (self.l[0][0] * z0, self.l[1][0] * z0 + self.l[1][1] * z1)
        }
    }

    /// One trajectory: sampled outcome, conditioned-and-displaced clone,
    /// closed-form overlap with the input amplitude.
    pub(crate) fn sample_fidelity(&self, stream: &mut Stream) -> f64 {
        let (d0, d1) = self.sample_outcome_dev(stream);
        let ex = self.base[0] + self.response[0][0] * d0 + self.response[0][1] * d1 - self.alpha[0];
        let ep = self.base[1] + self.response[1][0] * d0 + self.response[1][1] * d1 - self.alpha[1];
        let q = ex * (self.ainv[0][0] * ex + self.ainv[0][1] * ep)
            + ep * (self.ainv[1][0] * ex + self.ainv[1][1] * ep);
        self.prefactor * (-0.5 * q).exp()
    }

    /// One trajectory for moment estimation: a phase-space point drawn from
    /// the trajectory's clone state.
    pub(crate) fn sample_point(&self, stream: &mut Stream) -> (f64, f64) {
        let (d0, d1) = self.sample_outcome_dev(stream);
        let mx = self.base[0] + self.response[0][0] * d0 + self.response[0][1] * d1;
        let mp = self.base[1] + self.response[1][0] * d0 + self.response[1][1] * d1;
        let w0 = stream.standard_normal();
        let w1 = stream.standard_normal();
        (mx + self.cchol[0][0] * w0, mp + self.cchol[1][0] * w0 + self.cchol[1][1] * w1)
    }

    /// Clone mean at an absolute outcome (test hook).
    #[cfg(test)]
    fn clone_mean_at(&self, outcome: &[f64]) -> (f64, f64) {
        let d0 = outcome[0] - self.outcome_mean[0];
        let d1 = if self.dim == 2 { outcome[1] - self.outcome_mean[1] } else { 0.0 };
        (
            self.base[0] + self.response[0][0] * d0 + self.response[0][1] * d1,
            self.base[1] + self.response[1][0] * d0 + self.response[1][1] * d1,
        )
    }

    /// Covariance of the clone mean over the outcome distribution (test hook).
    #[cfg(test)]
    fn mean_scatter(&self) -> Matrix2<f64> {
        let l = Matrix2::new(self.l[0][0], 0.0, self.l[1][0], self.l[1][1]);
        let r = Matrix2::new(
            self.response[0][0],
            self.response[0][1],
            self.response[1][0],
            self.response[1][1],
        );
        let rl = r * l;
        rl * rl.transpose()
    }
}

/// Per-trajectory chain for a directly sampled detection.
struct DirectChain {
    model: MeasurementModel,
    gain: DMatrix<f64>,
    post_distribute: Option<u32>,
}

impl DirectChain {
    /// Conditions on `outcome`, displaces by `gain·outcome`, distributes when
    /// the circuit displaces jointly, and reduces to clone 0.
    fn clone_at(&self, outcome: &DVector<f64>) -> Result<GaussianState> {
        let cond = self.model.conditional_state(outcome)?;
        let mean = cond.mean() + &self.gain * outcome;
        let shifted = GaussianState::new(mean, cond.cov().clone())?;
        finish_clone(shifted, self.post_distribute)
    }
}

/// Per-trajectory chain realizing heterodyne as a balanced split with two
/// sequential x detections. Outcomes are the raw detector readings
/// `(x₁, x₂)`; the heterodyne outcome they encode is `(√2·x₁, -√2·x₂)`.
struct AncillaChain {
    first: MeasurementModel,
    ancilla_index: usize,
    gain: DMatrix<f64>,
    post_distribute: Option<u32>,
}

impl AncillaChain {
    fn prepare(
        state: &GaussianState,
        measured_mode: usize,
        gain: DMatrix<f64>,
        post_distribute: Option<u32>,
    ) -> Result<Self> {
        let n = state.n_modes();
        let ancilla = n;
        let op = SymplecticOp::beam_splitter(0.5, measured_mode, ancilla, n + 1)?
            .then(&SymplecticOp::phase_rotation(std::f64::consts::FRAC_PI_2, ancilla, n + 1)?)?;
        let prepared = op.apply(&state.append_vacuum(1))?;
        let first = measure(&prepared, measured_mode, MeasurementKind::HomodyneX)?;
        // The ancilla was appended last, so after removing the measured mode
        // it sits at the end of the remaining state.
        let ancilla_index = first.remaining.n_modes() - 1;
        Ok(Self { first, ancilla_index, gain, post_distribute })
    }

    /// Joint distribution of the two detector readings, as mean and lower
    /// Cholesky factor (the second reading is conditioned on the first).
    fn outcome_distribution(&self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let o1 = self.first.outcome_mean[0];
        let s1 = self.first.outcome_cov[(0, 0)].sqrt();
        let at = |x1: f64| -> Result<MeasurementModel> {
            let cond = self.first.conditional_state(&nalgebra::dvector![x1])?;
            measure(&cond, self.ancilla_index, MeasurementKind::HomodyneX)
        };
        let second = at(o1)?;
        let o2 = second.outcome_mean[0];
        let slope = at(o1 + 1.0)?.outcome_mean[0] - o2;
        let s2 = second.outcome_cov[(0, 0)].sqrt();
        Ok((
            nalgebra::dvector![o1, o2],
            DMatrix::from_row_slice(2, 2, &[s1, 0.0, slope * s1, s2]),
        ))
    }

    fn clone_at(&self, outcome: &DVector<f64>) -> Result<GaussianState> {
        let (x1, x2) = (outcome[0], outcome[1]);
        let cond1 = self.first.conditional_state(&nalgebra::dvector![x1])?;
        let second = measure(&cond1, self.ancilla_index, MeasurementKind::HomodyneX)?;
        let cond2 = second.conditional_state(&nalgebra::dvector![x2])?;
        let beta = nalgebra::dvector![SQRT_2 * x1, -SQRT_2 * x2];
        let mean = cond2.mean() + &self.gain * beta;
        let shifted = GaussianState::new(mean, cond2.cov().clone())?;
        finish_clone(shifted, self.post_distribute)
    }
}

fn finish_clone(state: GaussianState, post_distribute: Option<u32>) -> Result<GaussianState> {
    match post_distribute {
        Some(parts) => distribute(&state, 0, parts)?.reduced(&[0]),
        None => state.reduced(&[0]),
    }
}
