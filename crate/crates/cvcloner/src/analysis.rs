//! Closed-form fidelities, variances, optimal squeezing, and the noise
//! thresholds they imply for intercept-resend attacks on coherent-state
//! channels.
//!
//! Everything here is a direct formula evaluation, independent of the
//! covariance-matrix circuit route; the two are compared in tests and in
//! `paper-check`. All formulas are rational in `1/M`, so the infinite-copy
//! limit is handled exactly via [`CloneCount::inverse`].

use crate::{ensure_clonable, CloneCount, Error, Result};

/// Fidelity of the optimal symmetric N→M coherent-state cloner:
/// `F = MN / (MN + M - N)`, i.e. `1 / (1 + 1/N - 1/M)`.
pub fn fidelity_symmetric(n: u32, m: CloneCount) -> Result<f64> {
    ensure_clonable(n, m)?;
    let nf = f64::from(n);
    Ok(1.0 / (1.0 + 1.0 / nf - m.inverse()))
}

/// Per-quadrature clone variance of the symmetric cloner at the optimal
/// split: `1/4 + (1/2)(1/N - 1/M)`.
pub fn variance_symmetric(n: u32, m: CloneCount) -> Result<f64> {
    ensure_clonable(n, m)?;
    let nf = f64::from(n);
    Ok(0.25 + 0.5 * (1.0 / nf - m.inverse()))
}

/// Fidelity of the known-phase N→M cloner at squeezing `r` (real input
/// amplitudes, optimally chosen split):
/// `F = 2 / √((2 + 1/N - 1/M) + (1 + 1/N)e^{-2r} + (1 - 1/M)e^{2r})`.
pub fn fidelity_kp(n: u32, m: CloneCount, r: f64) -> Result<f64> {
    ensure_clonable(n, m)?;
    let nf = f64::from(n);
    let inv_m = m.inverse();
    let s = (2.0 + 1.0 / nf - inv_m)
        + (1.0 + 1.0 / nf) * (-2.0 * r).exp()
        + (1.0 - inv_m) * (2.0 * r).exp();
    Ok(2.0 / s.sqrt())
}

/// Clone variances `(var_x, var_p)` of the known-phase cloner at squeezing
/// `r`: `var_x = (1/4)(1/N + (1 - 1/M)e^{2r})`, `var_p = e^{-2r}/4`.
pub fn variances_kp(n: u32, m: CloneCount, r: f64) -> Result<(f64, f64)> {
    ensure_clonable(n, m)?;
    let nf = f64::from(n);
    let var_x = 0.25 * (1.0 / nf + (1.0 - m.inverse()) * (2.0 * r).exp());
    let var_p = 0.25 * (-2.0 * r).exp();
    Ok((var_x, var_p))
}

/// Fidelity of the known-phase cloner maximized over squeezing:
/// `F = 2 / (√(1 + 1/N) + √(1 - 1/M))`, attained at
/// `e^{2r} = √((1 + 1/N)/(1 - 1/M))`.
pub fn kp_bound(n: u32, m: CloneCount) -> Result<f64> {
    ensure_clonable(n, m)?;
    let nf = f64::from(n);
    Ok(2.0 / ((1.0 + 1.0 / nf).sqrt() + (1.0 - m.inverse()).sqrt()))
}

/// Squeezing that attains [`kp_bound`]: `r = (1/4)·ln((1 + 1/N)/(1 - 1/M))`.
pub fn kp_optimal_squeezing(n: u32, m: CloneCount) -> Result<f64> {
    ensure_clonable(n, m)?;
    let nf = f64::from(n);
    Ok(0.25 * ((1.0 + 1.0 / nf) / (1.0 - m.inverse())).ln())
}

/// Squeezing that equalizes the two clone variances:
/// `e^{-2r} = (1 + √(1 + 4N²(1 - 1/M))) / (2N)`.
pub fn kp_symmetric_noise_squeezing(n: u32, m: CloneCount) -> Result<f64> {
    ensure_clonable(n, m)?;
    let nf = f64::from(n);
    let y = (1.0 + (1.0 + 4.0 * nf * nf * (1.0 - m.inverse())).sqrt()) / (2.0 * nf);
    Ok(-0.5 * y.ln())
}

/// Fidelity at the symmetric-noise squeezing point:
/// `F = 4N / (2N + 1 + √(1 + 4N²(1 - 1/M)))`.
pub fn fidelity_kp_symmetric_noise(n: u32, m: CloneCount) -> Result<f64> {
    ensure_clonable(n, m)?;
    let nf = f64::from(n);
    Ok(4.0 * nf / (2.0 * nf + 1.0 + (1.0 + 4.0 * nf * nf * (1.0 - m.inverse())).sqrt()))
}

/// Largest excess noise an intercept-resend (measure-and-prepare) channel
/// can avoid adding, in vacuum units, at unit transmission: 2 when the
/// phase is unknown, `(√5 - 1)/2` when the phase is known. These follow
/// from the 1→∞ clone variances (symmetric-noise squeezing in the
/// known-phase case).
pub fn excess_noise_classical(phase_known: bool) -> f64 {
    if phase_known {
        (5.0f64.sqrt() - 1.0) / 2.0
    } else {
        2.0
    }
}

/// Noise threshold for ruling out intercept-resend attacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QkdBound {
    pub eta: f64,
    pub phase_known: bool,
    /// Observed excess noise δ (in vacuum units, scaled by the line
    /// transmission η) must stay strictly below this for the correlations
    /// to be unreachable by any entanglement-breaking channel.
    pub delta_max: f64,
}

/// Threshold on the observed excess noise δ at line transmission `eta`:
/// δ < η·2 (phase unknown) resp. δ < η·(√5 - 1)/2 (phase known).
pub fn qkd_threshold(eta: f64, phase_known: bool) -> Result<QkdBound> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParams(format!(
            "transmission eta must lie in (0, 1], got {eta}"
        )));
    }
    Ok(QkdBound {
        eta,
        phase_known,
        delta_max: eta * excess_noise_classical(phase_known),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const INF: CloneCount = CloneCount::Inf;

    fn fin(m: u32) -> CloneCount {
        CloneCount::Finite(m)
    }

    #[test]
    fn symmetric_fidelity_golden_values() {
        assert_relative_eq!(fidelity_symmetric(1, fin(2)).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(fidelity_symmetric(2, fin(3)).unwrap(), 6.0 / 7.0, epsilon = 1e-15);
        assert_relative_eq!(fidelity_symmetric(1, INF).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(fidelity_symmetric(3, INF).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_variance_golden_values() {
        assert_relative_eq!(variance_symmetric(1, fin(2)).unwrap(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(variance_symmetric(1, INF).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn preconditions_are_enforced() {
        assert!(fidelity_symmetric(3, fin(3)).is_err());
        assert!(fidelity_kp(0, INF, 0.0).is_err());
        assert!(variances_kp(2, fin(2), 0.1).is_err());
    }

    #[test]
    fn kp_fidelity_golden_values() {
        // No squeezing: F(0) = √(2MN/(2MN + M - N)).
        assert_relative_eq!(fidelity_kp(1, fin(2), 0.0).unwrap(), (4.0f64 / 5.0).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(fidelity_kp(1, INF, 0.0).unwrap(), (2.0f64 / 3.0).sqrt(), epsilon = 1e-15);
        // Optimal squeezing for 1→2: F = 2√2/3 at r = ln(2)/2.
        let r = kp_optimal_squeezing(1, fin(2)).unwrap();
        assert_relative_eq!(r, 2.0f64.ln() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(fidelity_kp(1, fin(2), r).unwrap(), 2.0 * 2.0f64.sqrt() / 3.0, epsilon = 1e-15);
        assert_relative_eq!(kp_bound(1, fin(2)).unwrap(), 2.0 * 2.0f64.sqrt() / 3.0, epsilon = 1e-15);
        // Symmetric-noise point for 1→2: F = 4/(3 + √3).
        let rs = kp_symmetric_noise_squeezing(1, fin(2)).unwrap();
        assert_relative_eq!(
            fidelity_kp(1, fin(2), rs).unwrap(),
            4.0 / (3.0 + 3.0f64.sqrt()),
            epsilon = 1e-14
        );
        assert_relative_eq!(
            fidelity_kp_symmetric_noise(1, fin(2)).unwrap(),
            4.0 / (3.0 + 3.0f64.sqrt()),
            epsilon = 1e-15
        );
    }

    #[test]
    fn kp_closed_form_fidelities_agree_with_the_general_expression() {
        for n in [1u32, 2, 3, 7] {
            for m in [fin(n + 1), fin(2 * n + 3), INF] {
                let r_o = kp_optimal_squeezing(n, m).unwrap();
                assert_relative_eq!(
                    fidelity_kp(n, m, r_o).unwrap(),
                    kp_bound(n, m).unwrap(),
                    epsilon = 1e-13
                );
                let r_s = kp_symmetric_noise_squeezing(n, m).unwrap();
                assert_relative_eq!(
                    fidelity_kp(n, m, r_s).unwrap(),
                    fidelity_kp_symmetric_noise(n, m).unwrap(),
                    epsilon = 1e-13
                );
                let (vx, vp) = variances_kp(n, m, r_s).unwrap();
                assert!((vx - vp).abs() < 1e-12, "noise should be symmetric at r_*");
            }
        }
    }

    #[test]
    fn kp_variances_golden_values() {
        let (vx, vp) = variances_kp(1, fin(2), 0.0).unwrap();
        assert_relative_eq!(vx, 3.0 / 8.0, epsilon = 1e-15);
        assert_relative_eq!(vp, 0.25, epsilon = 1e-15);
        // 1→∞ symmetric-noise variance: (√5 + 1)/8 in both quadratures.
        let rs = kp_symmetric_noise_squeezing(1, INF).unwrap();
        assert_relative_eq!((-2.0 * rs).exp(), (1.0 + 5.0f64.sqrt()) / 2.0, epsilon = 1e-14);
        let (vx, vp) = variances_kp(1, INF, rs).unwrap();
        assert_relative_eq!(vx, (5.0f64.sqrt() + 1.0) / 8.0, epsilon = 1e-14);
        assert_relative_eq!(vp, (5.0f64.sqrt() + 1.0) / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn kp_beats_the_phase_covariant_comparator_for_one_to_two() {
        for f in [
            fidelity_kp(1, fin(2), 0.0).unwrap(),
            kp_bound(1, fin(2)).unwrap(),
            fidelity_kp_symmetric_noise(1, fin(2)).unwrap(),
        ] {
            assert!(f > 0.8, "known-phase 1→2 fidelity {f} should beat 4/5");
        }
    }

    #[test]
    fn fidelity_orderings_hold() {
        for n in [1u32, 2, 5, 9] {
            for m in [fin(n + 1), fin(3 * n), INF] {
                let bound = kp_bound(n, m).unwrap();
                let f0 = fidelity_kp(n, m, 0.0).unwrap();
                let fs = fidelity_kp_symmetric_noise(n, m).unwrap();
                assert!(bound >= f0 - 1e-15 && f0 >= fs - 1e-15);
                // Known phase always helps.
                assert!(bound > fidelity_symmetric(n, m).unwrap());
            }
        }
    }

    #[test]
    fn classical_excess_noise_and_thresholds() {
        assert_relative_eq!(excess_noise_classical(false), 2.0, epsilon = 1e-15);
        assert_relative_eq!(excess_noise_classical(true), (5.0f64.sqrt() - 1.0) / 2.0, epsilon = 1e-15);
        let b = qkd_threshold(1.0, true).unwrap();
        assert_relative_eq!(b.delta_max, (5.0f64.sqrt() - 1.0) / 2.0, epsilon = 1e-15);
        let b = qkd_threshold(0.25, false).unwrap();
        assert_relative_eq!(b.delta_max, 0.5, epsilon = 1e-15);
        assert!(qkd_threshold(0.0, true).is_err());
        assert!(qkd_threshold(1.5, true).is_err());
        // The unknown-phase threshold is more than 3× the known-phase one.
        let ratio = excess_noise_classical(false) / excess_noise_classical(true);
        assert!(ratio > 3.0);
        assert_relative_eq!(ratio, 5.0f64.sqrt() + 1.0, epsilon = 1e-12);
    }

    #[test]
    fn thresholds_scale_linearly_with_transmission() {
        for eta in [0.1, 0.37, 0.8, 1.0] {
            for pk in [false, true] {
                let b = qkd_threshold(eta, pk).unwrap();
                assert_relative_eq!(b.delta_max, eta * excess_noise_classical(pk), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn kp_bound_monotonicity() {
        // Bound improves with more input copies, degrades with more outputs.
        assert!(kp_bound(2, fin(5)).unwrap() > kp_bound(1, fin(5)).unwrap());
        assert!(kp_bound(2, fin(4)).unwrap() > kp_bound(2, fin(5)).unwrap());
        assert!(kp_bound(2, fin(5)).unwrap() > kp_bound(2, INF).unwrap());
    }
}
