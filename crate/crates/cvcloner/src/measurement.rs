//! Gaussian measurements and displacement feed-forward.
//!
//! [`measure`] builds the exact outcome statistics and the outcome-conditioned
//! remaining state for a homodyne-x or heterodyne detection on one mode.
//! Gaussian conditioning leaves the remaining covariance outcome-independent;
//! only the mean responds, linearly, through the [`MeasurementModel::response`]
//! matrix. [`MeasurementModel::ensemble_after_feedforward`] averages the
//! conditioned-and-displaced states over the outcome distribution in closed
//! form (law of total covariance), which is the exact circuit route used by
//! the cloners; [`MeasurementModel::sample_outcome`] draws concrete outcomes
//! for the Monte Carlo route.
//!
//! Outcome conventions: homodyne-x yields the scalar `x`; heterodyne yields
//! `(Re β, Im β)` with the familiar smoothed statistics (covariance
//! `Σ_B + I/4`, so a coherent input gives per-quadrature outcome variance 1/2).

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::gaussian::{GaussianState, VACUUM_VARIANCE};
use crate::rng::Stream;
use crate::{Error, Result};

/// Guard on the measured quadrature variance; conditioning on an (almost)
/// deterministic quadrature is numerically meaningless.
pub const CONDITIONING_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementKind {
    /// Projective x-quadrature detection; one real outcome.
    HomodyneX,
    /// Double-quadrature (heterodyne) detection; outcome `(Re β, Im β)`.
    Heterodyne,
}

impl MeasurementKind {
    pub fn outcome_dim(self) -> usize {
        match self {
            MeasurementKind::HomodyneX => 1,
            MeasurementKind::Heterodyne => 2,
        }
    }
}

/// Exact Gaussian statistics of one detection: the outcome distribution,
/// the remaining modes' conditional covariance (outcome-independent), and the
/// linear response of the remaining means to the outcome deviation.
#[derive(Debug, Clone)]
pub struct MeasurementModel {
    pub kind: MeasurementKind,
    /// Mean of the outcome distribution.
    pub outcome_mean: DVector<f64>,
    /// Covariance of the outcome distribution.
    pub outcome_cov: DMatrix<f64>,
    /// Remaining modes with the conditional covariance; the stored mean is
    /// the unconditional one (= conditional mean at the average outcome).
    pub remaining: GaussianState,
    /// Maps outcome deviation to the conditional-mean deviation of the
    /// remaining modes: `μ(o) = remaining.mean + response·(o - outcome_mean)`.
    pub response: DMatrix<f64>,
    outcome_chol: DMatrix<f64>,
}

/// Measures `mode` of `state` and returns the full Gaussian model.
pub fn measure(state: &GaussianState, mode: usize, kind: MeasurementKind) -> Result<MeasurementModel> {
    let n = state.n_modes();
    if mode >= n {
        return Err(Error::ModeOutOfRange { mode, n_modes: n });
    }
    let rem_q: Vec<usize> = (0..2 * n).filter(|q| q / 2 != mode).collect();
    let cov = state.cov();
    let mean = state.mean();
    let rem_mean = DVector::from_fn(rem_q.len(), |i, _| mean[rem_q[i]]);
    let sigma_aa = pick(cov, &rem_q, &rem_q);

    let (outcome_mean, outcome_cov, response, rem_cov) = match kind {
        MeasurementKind::Heterodyne => {
            let bq = [2 * mode, 2 * mode + 1];
            let sigma_bb = pick(cov, &bq, &bq) + DMatrix::identity(2, 2) * VACUUM_VARIANCE;
            let cross = pick(cov, &rem_q, &bq);
            let inv = Cholesky::new(sigma_bb.clone())
                .ok_or(Error::NotPositiveDefinite)?
                .inverse();
            let response = &cross * inv;
            let rem_cov = &sigma_aa - &response * cross.transpose();
            let outcome_mean = DVector::from_vec(vec![mean[bq[0]], mean[bq[1]]]);
            (outcome_mean, sigma_bb, response, rem_cov)
        }
        MeasurementKind::HomodyneX => {
            let xq = 2 * mode;
            let var = cov[(xq, xq)];
            if var < CONDITIONING_GUARD {
                return Err(Error::DegenerateQuadrature(var));
            }
            let cross = DVector::from_fn(rem_q.len(), |i, _| cov[(rem_q[i], xq)]);
            let response = DMatrix::from_column_slice(rem_q.len(), 1, cross.as_slice()) / var;
            let rem_cov = &sigma_aa - &cross * cross.transpose() / var;
            let outcome_mean = DVector::from_vec(vec![mean[xq]]);
            let outcome_cov = DMatrix::from_element(1, 1, var);
            (outcome_mean, outcome_cov, response, rem_cov)
        }
    };

    let outcome_chol = Cholesky::new(outcome_cov.clone())
        .ok_or(Error::NotPositiveDefinite)?
        .l();
    Ok(MeasurementModel {
        kind,
        outcome_mean,
        outcome_cov,
        remaining: GaussianState::new(rem_mean, rem_cov)?,
        response,
        outcome_chol,
    })
}

impl MeasurementModel {
    pub fn outcome_dim(&self) -> usize {
        self.outcome_mean.len()
    }

    /// Remaining state conditioned on a concrete outcome: the covariance is
    /// unchanged, the mean shifts by `response·(outcome - outcome_mean)`.
    pub fn conditional_state(&self, outcome: &DVector<f64>) -> Result<GaussianState> {
        if outcome.len() != self.outcome_dim() {
            return Err(Error::DimensionMismatch(format!(
                "outcome length {} does not match outcome dimension {}",
                outcome.len(),
                self.outcome_dim()
            )));
        }
        let mean = self.remaining.mean() + &self.response * (outcome - &self.outcome_mean);
        GaussianState::new(mean, self.remaining.cov().clone())
    }

    /// Lower Cholesky factor of the outcome covariance.
    pub(crate) fn outcome_chol(&self) -> &DMatrix<f64> {
        &self.outcome_chol
    }

    /// Draws one outcome from the exact outcome distribution.
    pub fn sample_outcome(&self, stream: &mut Stream) -> DVector<f64> {
        let z = stream.normal_vector(self.outcome_dim());
        &self.outcome_mean + &self.outcome_chol * z
    }

    /// Ensemble state of the remaining modes after displacing them by
    /// `gain · outcome` and averaging over all outcomes:
    /// `mean = remaining.mean + gain·outcome_mean`,
    /// `cov = remaining.cov + (response + gain)·outcome_cov·(response + gain)ᵀ`.
    pub fn ensemble_after_feedforward(&self, gain: &DMatrix<f64>) -> Result<GaussianState> {
        let d_rem = self.remaining.mean().len();
        if gain.nrows() != d_rem || gain.ncols() != self.outcome_dim() {
            return Err(Error::DimensionMismatch(format!(
                "gain must be {d_rem}×{}, got {}×{}",
                self.outcome_dim(),
                gain.nrows(),
                gain.ncols()
            )));
        }
        let mean = self.remaining.mean() + gain * &self.outcome_mean;
        let total = &self.response + gain;
        let cov = self.remaining.cov() + &total * &self.outcome_cov * total.transpose();
        GaussianState::new(mean, cov)
    }
}

fn pick(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}
