//! Multimode Gaussian states and Gaussian unitaries in the quadrature
//! (covariance-matrix) representation.
//!
//! Quadratures are ordered `(x1, p1, ..., xn, pn)` with `x = (a + a†)/2` and
//! `p = (a - a†)/(2i)`, so the vacuum has covariance `I/4` and a coherent
//! state `|α⟩` has mean `(Re α, Im α)` with vacuum covariance. A Gaussian
//! unitary acts as `mean ↦ M·mean + s`, `cov ↦ M·cov·Mᵀ` with `M` symplectic
//! for the form `Ω = diag([[0, 1], [-1, 0]], ...)`.
//!
//! Beyond the primitive elements (beam splitters, squeezers, phase rotations,
//! displacements) the module provides the two beam-splitter networks used by
//! the cloning circuits: [`concentrate`] folds N modes into one
//! (`|α⟩⊗N → |√N α⟩ ⊗ vacuum`) and [`distribute`] splits one mode into M
//! equal-amplitude parts.

use nalgebra::{Cholesky, Complex, DMatrix, DVector};

use crate::{Error, Result};

/// Per-quadrature variance of the vacuum in this convention.
pub const VACUUM_VARIANCE: f64 = 0.25;

/// Tolerance on the symplectic form condition `M·Ω·Mᵀ = Ω`.
pub const SYMPLECTIC_TOL: f64 = 1e-12;

/// Uncertainty-principle slack: symplectic eigenvalues must stay above
/// `VACUUM_VARIANCE - UNCERTAINTY_SLACK`.
pub const UNCERTAINTY_SLACK: f64 = 1e-10;

/// The symplectic form, block diagonal with `[[0, 1], [-1, 0]]` per mode.
pub fn omega(n_modes: usize) -> DMatrix<f64> {
    let mut w = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        w[(2 * k, 2 * k + 1)] = 1.0;
        w[(2 * k + 1, 2 * k)] = -1.0;
    }
    w
}

/// A Gaussian state: mean vector of length `2n` and symmetric `2n × 2n`
/// covariance. The covariance is symmetrized on every construction so
/// downstream solvers see an exactly symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state from raw parts. Requires matching even dimensions;
    /// the covariance is symmetrized. A zero-mode state is permitted (it is
    /// what remains after measuring the last mode).
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if d % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "mean length must be even, got {d}"
            )));
        }
        if cov.nrows() != d || cov.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "covariance must be {d}×{d} to match the mean, got {}×{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let cov = symmetrized(cov);
        Ok(Self { mean, cov })
    }

    /// The n-mode vacuum: zero mean, covariance `I/4`.
    pub fn vacuum(n_modes: usize) -> Self {
        Self {
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * VACUUM_VARIANCE,
        }
    }

    /// Product of coherent states `|α_1⟩ ⊗ ... ⊗ |α_n⟩`.
    pub fn coherent(alphas: &[Complex<f64>]) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParams("coherent state needs at least one mode".into()));
        }
        let mut s = Self::vacuum(alphas.len());
        for (k, a) in alphas.iter().enumerate() {
            s.mean[2 * k] = a.re;
            s.mean[2 * k + 1] = a.im;
        }
        Ok(s)
    }

    pub fn n_modes(&self) -> usize {
        self.mean.len() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Mean of mode `k` as `(⟨x⟩, ⟨p⟩)`.
    pub fn mode_mean(&self, k: usize) -> Result<(f64, f64)> {
        self.check_mode(k)?;
        Ok((self.mean[2 * k], self.mean[2 * k + 1]))
    }

    /// The `2×2` covariance block of mode `k`.
    pub fn mode_cov(&self, k: usize) -> Result<DMatrix<f64>> {
        self.check_mode(k)?;
        Ok(self.cov.view((2 * k, 2 * k), (2, 2)).into_owned())
    }

    /// Appends `extra` vacuum modes after the existing ones.
    pub fn append_vacuum(&self, extra: usize) -> Self {
        let d0 = self.mean.len();
        let d = d0 + 2 * extra;
        let mut mean = DVector::zeros(d);
        mean.rows_mut(0, d0).copy_from(&self.mean);
        let mut cov = DMatrix::zeros(d, d);
        cov.view_mut((0, 0), (d0, d0)).copy_from(&self.cov);
        for i in d0..d {
            cov[(i, i)] = VACUUM_VARIANCE;
        }
        Self { mean, cov }
    }

    /// Reduced state over `keep`, in the listed order; the discarded modes
    /// are traced out (their rows and columns simply dropped).
    pub fn reduced(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidKeep("empty".into()));
        }
        let n = self.n_modes();
        let mut seen = vec![false; n];
        for &k in keep {
            if k >= n {
                return Err(Error::InvalidKeep(format!("mode {k} out of range for {n} modes")));
            }
            if seen[k] {
                return Err(Error::InvalidKeep(format!("mode {k} listed twice")));
            }
            seen[k] = true;
        }
        let idx: Vec<usize> = keep.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        let d = idx.len();
        let mut mean = DVector::zeros(d);
        let mut cov = DMatrix::zeros(d, d);
        for (i, &qi) in idx.iter().enumerate() {
            mean[i] = self.mean[qi];
            for (j, &qj) in idx.iter().enumerate() {
                cov[(i, j)] = self.cov[(qi, qj)];
            }
        }
        Self::new(mean, cov)
    }

    /// Fidelity-style overlap `⟨α|ρ|α⟩` of a single-mode state with a
    /// coherent state. For Gaussian ρ this is
    /// `exp(-d·(Σ + I/4)⁻¹·d / 2) / (2·√det(Σ + I/4))` with `d = μ - (Re α, Im α)`.
    pub fn overlap_with_coherent(&self, alpha: Complex<f64>) -> Result<f64> {
        if self.n_modes() != 1 {
            return Err(Error::NotSingleMode(self.n_modes()));
        }
        let p = &self.cov + DMatrix::identity(2, 2) * VACUUM_VARIANCE;
        let chol = Cholesky::new(p).ok_or(Error::NotPositiveDefinite)?;
        let det = chol.determinant();
        let d = DVector::from_vec(vec![self.mean[0] - alpha.re, self.mean[1] - alpha.im]);
        let solved = chol.solve(&d);
        let q = d.dot(&solved);
        Ok(((-0.5 * q).exp() / (2.0 * det.sqrt())).min(1.0))
    }

    /// Symplectic spectrum of the covariance: the magnitudes of the
    /// eigenvalues of `Ω·Σ` (each physical eigenvalue appears twice).
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.n_modes();
        if n == 0 {
            return Vec::new();
        }
        let m = omega(n) * &self.cov;
        let mut eigs: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        eigs
    }

    /// Smallest symplectic eigenvalue; at least `VACUUM_VARIANCE` (up to
    /// numerical slack) for any physical state.
    pub fn min_symplectic_eigenvalue(&self) -> f64 {
        self.symplectic_eigenvalues().first().copied().unwrap_or(f64::INFINITY)
    }

    fn check_mode(&self, k: usize) -> Result<()> {
        if k >= self.n_modes() {
            return Err(Error::ModeOutOfRange { mode: k, n_modes: self.n_modes() });
        }
        Ok(())
    }
}

fn symmetrized(cov: DMatrix<f64>) -> DMatrix<f64> {
    let t = cov.transpose();
    (cov + t) * 0.5
}

/// An affine Gaussian unitary: `mean ↦ matrix·mean + shift`,
/// `cov ↦ matrix·cov·matrixᵀ`, with `matrix` symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticOp {
    matrix: DMatrix<f64>,
    shift: DVector<f64>,
}

impl SymplecticOp {
    /// Validates the form condition `M·Ω·Mᵀ = Ω` before accepting the parts.
    pub fn from_parts(matrix: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if d % 2 != 0 || matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "symplectic matrix must be square with even dimension, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if shift.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "shift length {} does not match matrix dimension {d}",
                shift.len()
            )));
        }
        let dev = symplectic_deviation(&matrix);
        if dev > SYMPLECTIC_TOL {
            return Err(Error::NotSymplectic(dev));
        }
        Ok(Self { matrix, shift })
    }

    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
            shift: DVector::zeros(2 * n_modes),
        }
    }

    /// Pure phase-space displacement by `shift`.
    pub fn displacement(shift: DVector<f64>) -> Result<Self> {
        if shift.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "displacement length must be even, got {}",
                shift.len()
            )));
        }
        let d = shift.len();
        Ok(Self { matrix: DMatrix::identity(d, d), shift })
    }

    /// Beam splitter of transmittance `t` on modes `(i, j)` of an n-mode
    /// system. Acting on means:
    /// `x_i' = √t·x_i + √(1-t)·x_j`, `x_j' = -√(1-t)·x_i + √t·x_j`
    /// (identically for p). The reflected arm carries the minus sign.
    pub fn beam_splitter(t: f64, i: usize, j: usize, n_modes: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidTransmittance(t));
        }
        if i == j {
            return Err(Error::InvalidParams(format!(
                "beam splitter needs two distinct modes, got ({i}, {j})"
            )));
        }
        if i >= n_modes || j >= n_modes {
            return Err(Error::ModeOutOfRange { mode: i.max(j), n_modes });
        }
        let (c, s) = (t.sqrt(), (1.0 - t).sqrt());
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        for q in 0..2 {
            let (qi, qj) = (2 * i + q, 2 * j + q);
            m[(qi, qi)] = c;
            m[(qi, qj)] = s;
            m[(qj, qi)] = -s;
            m[(qj, qj)] = c;
        }
        Ok(Self { matrix: m, shift: DVector::zeros(2 * n_modes) })
    }

    /// Single-mode squeezer: `x ↦ e^r·x`, `p ↦ e^{-r}·p` on mode `k`.
    pub fn squeezer(r: f64, k: usize, n_modes: usize) -> Result<Self> {
        if k >= n_modes {
            return Err(Error::ModeOutOfRange { mode: k, n_modes });
        }
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        m[(2 * k, 2 * k)] = r.exp();
        m[(2 * k + 1, 2 * k + 1)] = (-r).exp();
        Ok(Self { matrix: m, shift: DVector::zeros(2 * n_modes) })
    }

    /// Single-mode phase rotation: `x ↦ cos θ·x + sin θ·p`,
    /// `p ↦ -sin θ·x + cos θ·p` on mode `k`. At `θ = π/2` the rotated `x`
    /// reads out the original `p`, which is how a p-homodyne is built from
    /// an x-homodyne.
    pub fn phase_rotation(theta: f64, k: usize, n_modes: usize) -> Result<Self> {
        if k >= n_modes {
            return Err(Error::ModeOutOfRange { mode: k, n_modes });
        }
        let (c, s) = (theta.cos(), theta.sin());
        let mut m = DMatrix::identity(2 * n_modes, 2 * n_modes);
        m[(2 * k, 2 * k)] = c;
        m[(2 * k, 2 * k + 1)] = s;
        m[(2 * k + 1, 2 * k)] = -s;
        m[(2 * k + 1, 2 * k + 1)] = c;
        Ok(Self { matrix: m, shift: DVector::zeros(2 * n_modes) })
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn shift(&self) -> &DVector<f64> {
        &self.shift
    }

    /// Composition "self first, then `next`".
    pub fn then(&self, next: &SymplecticOp) -> Result<SymplecticOp> {
        if self.n_modes() != next.n_modes() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose ops on {} and {} modes",
                self.n_modes(),
                next.n_modes()
            )));
        }
        Ok(SymplecticOp {
            matrix: &next.matrix * &self.matrix,
            shift: &next.matrix * &self.shift + &next.shift,
        })
    }

    /// Exact symplectic inverse via `M⁻¹ = -Ω·Mᵀ·Ω`.
    pub fn inverse(&self) -> SymplecticOp {
        let w = omega(self.n_modes());
        let minv = -(&w * self.matrix.transpose() * &w);
        let shift = -(&minv * &self.shift);
        SymplecticOp { matrix: minv, shift }
    }

    /// Applies the op: `mean ↦ M·mean + s`, `cov ↦ M·cov·Mᵀ` (symmetrized).
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.n_modes() != self.n_modes() {
            return Err(Error::DimensionMismatch(format!(
                "op on {} modes applied to a {}-mode state",
                self.n_modes(),
                state.n_modes()
            )));
        }
        let mean = &self.matrix * &state.mean + &self.shift;
        let cov = &self.matrix * &state.cov * self.matrix.transpose();
        GaussianState::new(mean, cov)
    }
}

/// Max deviation of `M·Ω·Mᵀ` from `Ω`.
pub fn symplectic_deviation(matrix: &DMatrix<f64>) -> f64 {
    let n = matrix.nrows() / 2;
    let w = omega(n);
    let dev = matrix * &w * matrix.transpose() - &w;
    dev.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// The concentration cascade on `n` modes: step `k` (k = 1..n-1) combines
/// the accumulator mode 0 with mode `k` through a beam splitter of
/// transmittance `k/(k+1)`. On `|α⟩⊗n` it produces `|√n α⟩` in mode 0 and
/// vacuum elsewhere.
pub fn concentration_network(n_modes: usize) -> SymplecticOp {
    let mut op = SymplecticOp::identity(n_modes);
    for k in 1..n_modes {
        let t = k as f64 / (k as f64 + 1.0);
        let bs = SymplecticOp::beam_splitter(t, 0, k, n_modes)
            .expect("cascade transmittances lie in (0, 1)");
        op = op.then(&bs).expect("cascade ops share the mode count");
    }
    op
}

/// Applies the concentration cascade to all modes of `state`.
pub fn concentrate(state: &GaussianState) -> GaussianState {
    concentration_network(state.n_modes())
        .apply(state)
        .expect("network is built for this mode count")
}

/// Splits mode `source` into `parts` equal-amplitude modes by running the
/// concentration cascade backwards; `parts - 1` vacuum modes are appended at
/// the end and the outputs land on `source` plus the appended modes. A
/// coherent amplitude γ on the source becomes γ/√parts on every output, and
/// any excess variance of the source is inherited at weight `1/parts`.
pub fn distribute(state: &GaussianState, source: usize, parts: u32) -> Result<GaussianState> {
    if source >= state.n_modes() {
        return Err(Error::ModeOutOfRange { mode: source, n_modes: state.n_modes() });
    }
    if parts == 0 {
        return Err(Error::InvalidParams("cannot distribute into zero parts".into()));
    }
    if parts == 1 {
        return Ok(state.clone());
    }
    let n0 = state.n_modes();
    let parts = parts as usize;
    let n = n0 + parts - 1;
    let expanded = state.append_vacuum(parts - 1);
    // Inverse cascade: undo the concentration steps in reverse order, with
    // cascade mode k mapped to appended mode n0 + k - 1.
    let mut op = SymplecticOp::identity(n);
    for k in (1..parts).rev() {
        let t = k as f64 / (k as f64 + 1.0);
        let bs = SymplecticOp::beam_splitter(t, source, n0 + k - 1, n)
            .expect("cascade transmittances lie in (0, 1)");
        op = op.then(&bs.inverse()).expect("cascade ops share the mode count");
    }
    op.apply(&expanded)
}

/// Output mode indices of [`distribute`] for a state that had `n0` modes:
/// the source plus the appended modes, in cascade order.
pub fn distributed_modes(n0: usize, source: usize, parts: u32) -> Vec<usize> {
    let mut modes = vec![source];
    modes.extend((0..parts.saturating_sub(1) as usize).map(|k| n0 + k));
    modes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    #[test]
    fn coherent_state_has_vacuum_covariance_and_expected_mean() {
        let s = GaussianState::coherent(&[c(0.5, -0.25), c(0.0, 1.0)]).unwrap();
        assert_eq!(s.n_modes(), 2);
        assert_eq!(s.mode_mean(0).unwrap(), (0.5, -0.25));
        assert_eq!(s.mode_mean(1).unwrap(), (0.0, 1.0));
        let vac = DMatrix::identity(4, 4) * VACUUM_VARIANCE;
        assert_eq!(max_abs_diff(s.cov(), &vac), 0.0);
        assert!(GaussianState::coherent(&[]).is_err());
    }

    #[test]
    fn construction_symmetrizes_covariance() {
        let mut cov = DMatrix::identity(2, 2) * VACUUM_VARIANCE;
        cov[(0, 1)] = 0.1;
        cov[(1, 0)] = 0.1 + 1.0e-13;
        let s = GaussianState::new(DVector::zeros(2), cov).unwrap();
        assert_eq!(s.cov()[(0, 1)], s.cov()[(1, 0)]);
    }

    #[test]
    fn beam_splitter_unit_transmittance_is_identity() {
        let bs = SymplecticOp::beam_splitter(1.0, 0, 1, 2).unwrap();
        let s = GaussianState::coherent(&[c(0.3, 0.4), c(-1.0, 0.2)]).unwrap();
        let out = bs.apply(&s).unwrap();
        assert_relative_eq!(out.mean(), s.mean(), epsilon = 1e-15);
    }

    #[test]
    fn balanced_beam_splitter_mixes_amplitudes() {
        // (√2, 0) ⊗ vacuum → both modes at mean x = 1.
        let s = GaussianState::coherent(&[c(2.0f64.sqrt(), 0.0), c(0.0, 0.0)]).unwrap();
        let bs = SymplecticOp::beam_splitter(0.5, 0, 1, 2).unwrap();
        let out = bs.apply(&s).unwrap();
        assert_relative_eq!(out.mean()[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(out.mean()[2], -1.0, epsilon = 1e-14);
        assert_relative_eq!(out.mean()[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn splitting_a_concentrated_amplitude_matches_the_stated_arms() {
        // t = ε on |√N α⟩ ⊗ |0⟩: kept arm √(εN)·α, reflected arm -√((1-ε)N)·α.
        let (eps, nf): (f64, f64) = (0.3, 4.0);
        let alpha = c(0.8, -0.2);
        let s = GaussianState::coherent(&[alpha * nf.sqrt(), c(0.0, 0.0)]).unwrap();
        let bs = SymplecticOp::beam_splitter(eps, 0, 1, 2).unwrap();
        let out = bs.apply(&s).unwrap();
        let kept = (eps * nf).sqrt();
        let refl = -((1.0 - eps) * nf).sqrt();
        assert_relative_eq!(out.mean()[0], kept * alpha.re, epsilon = 1e-14);
        assert_relative_eq!(out.mean()[1], kept * alpha.im, epsilon = 1e-14);
        assert_relative_eq!(out.mean()[2], refl * alpha.re, epsilon = 1e-14);
        assert_relative_eq!(out.mean()[3], refl * alpha.im, epsilon = 1e-14);
    }

    #[test]
    fn beam_splitter_rejects_bad_parameters() {
        assert!(matches!(
            SymplecticOp::beam_splitter(-0.1, 0, 1, 2),
            Err(Error::InvalidTransmittance(_))
        ));
        assert!(matches!(
            SymplecticOp::beam_splitter(1.1, 0, 1, 2),
            Err(Error::InvalidTransmittance(_))
        ));
        assert!(SymplecticOp::beam_splitter(0.5, 1, 1, 2).is_err());
        assert!(SymplecticOp::beam_splitter(0.5, 0, 2, 2).is_err());
    }

    #[test]
    fn squeezer_scales_vacuum_variances() {
        let r = 0.5 * 2.0f64.ln();
        let sq = SymplecticOp::squeezer(r, 0, 1).unwrap();
        let out = sq.apply(&GaussianState::vacuum(1)).unwrap();
        assert_relative_eq!(out.cov()[(0, 0)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(out.cov()[(1, 1)], 0.125, epsilon = 1e-15);
    }

    #[test]
    fn squeezer_zero_is_identity_and_inverse_composes_to_identity() {
        let s0 = SymplecticOp::squeezer(0.0, 0, 2).unwrap();
        assert_eq!(max_abs_diff(s0.matrix(), &DMatrix::identity(4, 4)), 0.0);
        let sq = SymplecticOp::squeezer(0.37, 1, 2).unwrap();
        let round = sq.then(&sq.inverse()).unwrap();
        assert!(max_abs_diff(round.matrix(), &DMatrix::identity(4, 4)) < 1e-14);
    }

    #[test]
    fn displacement_turns_vacuum_into_coherent() {
        let d = SymplecticOp::displacement(DVector::from_vec(vec![0.7, -0.1])).unwrap();
        let out = d.apply(&GaussianState::vacuum(1)).unwrap();
        let expect = GaussianState::coherent(&[c(0.7, -0.1)]).unwrap();
        assert_relative_eq!(out.mean(), expect.mean(), epsilon = 1e-15);
        assert_eq!(max_abs_diff(out.cov(), expect.cov()), 0.0);
    }

    #[test]
    fn phase_rotation_quarter_turn_swaps_quadratures() {
        let rot = SymplecticOp::phase_rotation(std::f64::consts::FRAC_PI_2, 0, 1).unwrap();
        let s = GaussianState::coherent(&[c(0.3, 0.8)]).unwrap();
        let out = rot.apply(&s).unwrap();
        assert_relative_eq!(out.mean()[0], 0.8, epsilon = 1e-15);
        assert_relative_eq!(out.mean()[1], -0.3, epsilon = 1e-15);
    }

    #[test]
    fn concentrate_folds_copies_into_the_first_mode() {
        // |1⟩⊗4 → mode 0 at amplitude 2, modes 1..3 vacuum.
        let s = GaussianState::coherent(&[c(1.0, 0.0); 4]).unwrap();
        let out = concentrate(&s);
        assert_relative_eq!(out.mean()[0], 2.0, epsilon = 1e-14);
        for q in 1..8 {
            assert!(out.mean()[q].abs() < 1e-14, "quadrature {q} should be empty");
        }
        let vac = DMatrix::identity(8, 8) * VACUUM_VARIANCE;
        assert!(max_abs_diff(out.cov(), &vac) < 1e-14);
    }

    #[test]
    fn concentrate_matches_per_step_two_mode_arithmetic() {
        // Oracle: track (x, p) means of the accumulator and of each copy by
        // hand through the cascade, independent of the matrix machinery.
        let alpha = c(0.3, 0.7);
        for n in [2usize, 3, 5] {
            let mut acc = (alpha.re, alpha.im);
            for k in 1..n {
                let t = k as f64 / (k as f64 + 1.0);
                let (c_, s_) = (t.sqrt(), (1.0 - t).sqrt());
                // Copy k enters at amplitude α; the reflected output must vanish.
                let new_acc = (c_ * acc.0 + s_ * alpha.re, c_ * acc.1 + s_ * alpha.im);
                let refl = (-s_ * acc.0 + c_ * alpha.re, -s_ * acc.1 + c_ * alpha.im);
                assert!(refl.0.abs() < 1e-12 && refl.1.abs() < 1e-12);
                acc = new_acc;
            }
            let nf = n as f64;
            assert_relative_eq!(acc.0, nf.sqrt() * alpha.re, epsilon = 1e-12);

            let s = GaussianState::coherent(&vec![alpha; n]).unwrap();
            let out = concentrate(&s);
            assert_relative_eq!(out.mean()[0], acc.0, epsilon = 1e-12);
            assert_relative_eq!(out.mean()[1], acc.1, epsilon = 1e-12);
            assert_relative_eq!(out.mean()[0], nf.sqrt() * alpha.re, epsilon = 1e-12);
            assert_relative_eq!(out.mean()[1], nf.sqrt() * alpha.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn distribute_splits_amplitude_equally() {
        let s = GaussianState::coherent(&[c(2.0, 0.0)]).unwrap();
        let out = distribute(&s, 0, 4).unwrap();
        assert_eq!(out.n_modes(), 4);
        for k in 0..4 {
            let (x, p) = out.mode_mean(k).unwrap();
            assert_relative_eq!(x, 1.0, epsilon = 1e-14);
            assert!(p.abs() < 1e-14);
        }
    }

    #[test]
    fn distribute_into_one_part_is_identity() {
        let s = GaussianState::coherent(&[c(0.4, 0.1)]).unwrap();
        let out = distribute(&s, 0, 1).unwrap();
        assert_eq!(&out, &s);
    }

    #[test]
    fn distribute_splits_excess_variance_evenly() {
        // Source with x-variance 3/4 (excess 1/2): each of 2 outputs gets
        // x-variance 1/4 + (1/2)/2 = 1/2 while p stays at vacuum.
        // Oracle: the explicit 4×4 inverted balanced beam splitter.
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![0.75, 0.25]));
        let s = GaussianState::new(DVector::zeros(2), cov).unwrap();
        let out = distribute(&s, 0, 2).unwrap();

        let h = 0.5f64.sqrt();
        #[rustfmt::skip]
        let minv = DMatrix::from_row_slice(4, 4, &[
            h, 0.0, -h, 0.0,
            0.0, h, 0.0, -h,
            h, 0.0, h, 0.0,
            0.0, h, 0.0, h,
        ]);
        let big = {
            let mut c0 = DMatrix::identity(4, 4) * VACUUM_VARIANCE;
            c0[(0, 0)] = 0.75;
            &minv * c0 * minv.transpose()
        };
        assert!(max_abs_diff(out.cov(), &big) < 1e-14);
        for k in 0..2 {
            let blk = out.mode_cov(k).unwrap();
            assert_relative_eq!(blk[(0, 0)], 0.5, epsilon = 1e-14);
            assert_relative_eq!(blk[(1, 1)], 0.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn distribute_then_reconcentrate_recovers_the_source() {
        let s = GaussianState::coherent(&[c(1.3, -0.6)]).unwrap();
        let spread = distribute(&s, 0, 5).unwrap();
        let back = concentrate(&spread);
        assert_relative_eq!(back.mean()[0], 1.3, epsilon = 1e-12);
        assert_relative_eq!(back.mean()[1], -0.6, epsilon = 1e-12);
        let vac = DMatrix::identity(10, 10) * VACUUM_VARIANCE;
        assert!(max_abs_diff(back.cov(), &vac) < 1e-12);
    }

    #[test]
    fn reduced_keeps_blocks_and_validates_input() {
        let s = GaussianState::coherent(&[c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.5)]).unwrap();
        let r = s.reduced(&[2, 0]).unwrap();
        assert_eq!(r.mode_mean(0).unwrap(), (-1.0, 0.5));
        assert_eq!(r.mode_mean(1).unwrap(), (1.0, 0.0));
        assert!(s.reduced(&[]).is_err());
        assert!(s.reduced(&[3]).is_err());
        assert!(s.reduced(&[1, 1]).is_err());
    }

    #[test]
    fn reduced_discards_cross_correlations() {
        // Correlate two modes with a beam splitter acting on a squeezed input.
        let sq = SymplecticOp::squeezer(0.6, 0, 2).unwrap();
        let bs = SymplecticOp::beam_splitter(0.5, 0, 1, 2).unwrap();
        let s = sq.then(&bs).unwrap().apply(&GaussianState::vacuum(2)).unwrap();
        assert!(s.cov()[(0, 2)].abs() > 1e-3, "setup should correlate the modes");
        let r = s.reduced(&[0]).unwrap();
        assert_eq!(r.n_modes(), 1);
        assert_relative_eq!(r.cov()[(0, 0)], s.cov()[(0, 0)], epsilon = 1e-15);
    }

    #[test]
    fn overlap_reproduces_coherent_state_inner_products() {
        let vac = GaussianState::vacuum(1);
        assert_relative_eq!(vac.overlap_with_coherent(c(0.0, 0.0)).unwrap(), 1.0, epsilon = 1e-15);
        // |⟨α|0⟩|² = e^{-|α|²}.
        let a = c(0.6, -0.3);
        let expect = (-(a.norm_sqr())).exp();
        assert_relative_eq!(vac.overlap_with_coherent(a).unwrap(), expect, epsilon = 1e-14);
    }

    #[test]
    fn overlap_of_noisy_clone_state_is_two_thirds() {
        // Mean-preserving state with both variances at 1/2.
        let cov = DMatrix::identity(2, 2) * 0.5;
        let s = GaussianState::new(DVector::from_vec(vec![0.9, 0.4]), cov).unwrap();
        assert_relative_eq!(
            s.overlap_with_coherent(c(0.9, 0.4)).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn overlap_requires_single_mode() {
        let s = GaussianState::vacuum(2);
        assert!(matches!(s.overlap_with_coherent(c(0.0, 0.0)), Err(Error::NotSingleMode(2))));
    }

    #[test]
    fn vacuum_symplectic_eigenvalues_sit_at_the_uncertainty_floor() {
        let s = GaussianState::vacuum(3);
        for nu in s.symplectic_eigenvalues() {
            assert_relative_eq!(nu, VACUUM_VARIANCE, epsilon = 1e-12);
        }
    }

    #[test]
    fn from_parts_rejects_non_symplectic_matrices() {
        let bad = DMatrix::identity(2, 2) * 2.0; // uniform scaling is not symplectic
        assert!(matches!(
            SymplecticOp::from_parts(bad, DVector::zeros(2)),
            Err(Error::NotSymplectic(_))
        ));
    }

    #[test]
    fn then_applies_left_to_right() {
        let sq = SymplecticOp::squeezer(0.3, 0, 1).unwrap();
        let d = SymplecticOp::displacement(DVector::from_vec(vec![1.0, 0.0])).unwrap();
        // Squeeze first, then displace: mean ends exactly at the shift.
        let out = sq.then(&d).unwrap().apply(&GaussianState::vacuum(1)).unwrap();
        assert_relative_eq!(out.mean()[0], 1.0, epsilon = 1e-15);
        // Displace first, then squeeze: the shift gets stretched.
        let out2 = d.then(&sq).unwrap().apply(&GaussianState::vacuum(1)).unwrap();
        assert_relative_eq!(out2.mean()[0], 0.3f64.exp(), epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn prop_primitive_ops_are_symplectic(
            t in 0.0f64..=1.0,
            r in -2.0f64..2.0,
            theta in -6.3f64..6.3,
        ) {
            let bs = SymplecticOp::beam_splitter(t, 0, 2, 3).unwrap();
            let sq = SymplecticOp::squeezer(r, 1, 3).unwrap();
            let rot = SymplecticOp::phase_rotation(theta, 2, 3).unwrap();
            for op in [&bs, &sq, &rot] {
                prop_assert!(symplectic_deviation(op.matrix()) < SYMPLECTIC_TOL);
            }
            let chain = bs.then(&sq).unwrap().then(&rot).unwrap();
            prop_assert!(symplectic_deviation(chain.matrix()) < SYMPLECTIC_TOL);
        }

        #[test]
        fn prop_inverse_round_trips_states(
            t in 0.01f64..=0.99,
            r in -1.5f64..1.5,
            x in -2.0f64..2.0,
            p in -2.0f64..2.0,
        ) {
            let op = SymplecticOp::beam_splitter(t, 0, 1, 2).unwrap()
                .then(&SymplecticOp::squeezer(r, 0, 2).unwrap()).unwrap();
            let s = GaussianState::coherent(&[c(x, p), c(-p, x)]).unwrap();
            let back = op.inverse().apply(&op.apply(&s).unwrap()).unwrap();
            for i in 0..4 {
                prop_assert!((back.mean()[i] - s.mean()[i]).abs() < 1e-10);
            }
            prop_assert!(max_abs_diff(back.cov(), s.cov()) < 1e-10);
        }

        #[test]
        fn prop_passive_and_active_ops_preserve_purity(
            t in 0.0f64..=1.0,
            r in -1.5f64..1.5,
        ) {
            // Pure Gaussian states keep det(cov) = (1/16)^n under unitaries.
            let op = SymplecticOp::beam_splitter(t, 0, 1, 2).unwrap()
                .then(&SymplecticOp::squeezer(r, 1, 2).unwrap()).unwrap();
            let out = op.apply(&GaussianState::vacuum(2)).unwrap();
            let det = out.cov().determinant();
            prop_assert!((det - VACUUM_VARIANCE.powi(4)).abs() < 1e-12);
            let nu_min = out.min_symplectic_eigenvalue();
            prop_assert!(nu_min >= VACUUM_VARIANCE - UNCERTAINTY_SLACK);
        }

        #[test]
        fn prop_overlap_invariant_under_joint_rotation(
            theta in 0.0f64..6.3,
            x in -1.5f64..1.5,
            p in -1.5f64..1.5,
            vx in 0.26f64..1.0,
        ) {
            // Rotating both the state and the reference coherent amplitude
            // leaves the overlap unchanged.
            let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![vx, 0.26]));
            let s = GaussianState::new(DVector::from_vec(vec![x, p]), cov).unwrap();
            let alpha = c(0.4, -0.2);
            let f0 = s.overlap_with_coherent(alpha).unwrap();
            let rot = SymplecticOp::phase_rotation(theta, 0, 1).unwrap();
            let s_rot = rot.apply(&s).unwrap();
            // The mean transforms with the matrix, so the reference must too.
            let m = rot.matrix();
            let a_rot = c(
                m[(0, 0)] * alpha.re + m[(0, 1)] * alpha.im,
                m[(1, 0)] * alpha.re + m[(1, 1)] * alpha.im,
            );
            let f1 = s_rot.overlap_with_coherent(a_rot).unwrap();
            prop_assert!((f0 - f1).abs() < 1e-12);
        }

        #[test]
        fn prop_distribute_then_concentrate_is_identity(
            x in -2.0f64..2.0,
            p in -2.0f64..2.0,
            parts in 2u32..8,
        ) {
            let s = GaussianState::coherent(&[c(x, p)]).unwrap();
            let back = concentrate(&distribute(&s, 0, parts).unwrap());
            prop_assert!((back.mean()[0] - x).abs() < 1e-12);
            prop_assert!((back.mean()[1] - p).abs() < 1e-12);
            let vac = DMatrix::identity(back.mean().len(), back.mean().len()) * VACUUM_VARIANCE;
            prop_assert!(max_abs_diff(back.cov(), &vac) < 1e-12);
        }
    }
}
