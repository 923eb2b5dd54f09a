//! Scalar parameters of the asymptotic regime derived from `(n, alpha, beta)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Degree and shape parameters together with the derived quantities
/// `kappa = n + (alpha+beta+1)/2`, `sigma = (alpha+beta)/(2 kappa)`,
/// `tau = (alpha-beta)/(2 kappa)` and the turning points
/// `x_± = -sigma tau ± sqrt((1-sigma^2)(1-tau^2))`.
///
/// All zeros of the degree-`n` Jacobi polynomial lie in `(x_minus, x_plus)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobiParams {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub tau: f64,
    pub x_minus: f64,
    pub x_plus: f64,
}

impl JacobiParams {
    /// Derives all regime parameters. Fails when `alpha` or `beta` is not
    /// a finite number greater than -1.
    pub fn new(n: u32, alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::Domain(format!(
                "alpha must be finite and > -1, got {alpha}"
            )));
        }
        if !beta.is_finite() || beta <= -1.0 {
            return Err(Error::Domain(format!(
                "beta must be finite and > -1, got {beta}"
            )));
        }
        let kappa = n as f64 + 0.5 * (alpha + beta + 1.0);
        let sigma = (alpha + beta) / (2.0 * kappa);
        let tau = (alpha - beta) / (2.0 * kappa);
        let disc = (1.0 - sigma * sigma) * (1.0 - tau * tau);
        debug_assert!(disc >= 0.0, "sigma, tau must lie in (-1, 1)");
        if disc < 0.0 {
            return Err(Error::Domain(format!(
                "degenerate oscillatory interval for alpha={alpha}, beta={beta}"
            )));
        }
        let root = disc.sqrt();
        Ok(Self {
            n,
            alpha,
            beta,
            kappa,
            sigma,
            tau,
            x_minus: -sigma * tau - root,
            x_plus: -sigma * tau + root,
        })
    }

    /// Width of the oscillatory interval.
    pub fn span(&self) -> f64 {
        self.x_plus - self.x_minus
    }

    /// `U(x)^2` in the factored form `(x_+ - x)(x - x_-)`.
    pub fn u_squared(&self, x: f64) -> f64 {
        (self.x_plus - x) * (x - self.x_minus)
    }
}

/// Margins defining where the elementary-function expansion is trusted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeConfig {
    /// Relative interior margin around each turning point, as a fraction
    /// of the interval width.
    pub delta: f64,
    /// Largest trusted `sigma`.
    pub sigma0: f64,
    /// Largest trusted `|tau|`.
    pub tau0: f64,
    /// Truncation order of the asymptotic series.
    pub truncation: usize,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        Self {
            delta: 0.02,
            sigma0: 0.95,
            tau0: 0.95,
            truncation: 3,
        }
    }
}

/// Report-only classification of an evaluation point against the regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RegimeReport {
    pub in_bulk: bool,
    pub near_left_tp: bool,
    pub near_right_tp: bool,
    pub out_of_regime: bool,
}

/// Classifies `x` against the bulk window
/// `[x_- + delta*span, x_+ - delta*span]` and the parameters against
/// `(sigma0, tau0)`. Never fails; violations are reported, not raised.
pub fn validate_regime(p: &JacobiParams, cfg: &RegimeConfig, x: f64) -> RegimeReport {
    let span = p.span();
    let lo = p.x_minus + cfg.delta * span;
    let hi = p.x_plus - cfg.delta * span;
    let edge_tol = 4.0 * f64::EPSILON * span.max(1.0);
    let params_bad = p.sigma > cfg.sigma0 || p.tau.abs() > cfg.tau0;

    let mut r = RegimeReport::default();
    if x < p.x_minus - edge_tol || x > p.x_plus + edge_tol {
        r.out_of_regime = true;
        return r;
    }
    if x < lo {
        r.near_left_tp = true;
    } else if x > hi {
        r.near_right_tp = true;
    } else {
        r.in_bulk = true;
    }
    r.out_of_regime = params_bad;
    r
}

impl RegimeConfig {
    /// Whether `(sigma, tau)` themselves are inside the trusted box.
    pub fn params_in_regime(&self, p: &JacobiParams) -> bool {
        p.sigma <= self.sigma0 && p.tau.abs() <= self.tau0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_1_parameters() {
        let p = JacobiParams::new(25, 50.0, 41.0).unwrap();
        assert_eq!(p.kappa, 71.0);
        assert_eq!(p.sigma, 91.0 / 142.0);
        assert_eq!(p.tau, 9.0 / 142.0);
    }

    #[test]
    fn figure_1_parameters() {
        let p = JacobiParams::new(125, 90.0, 75.0).unwrap();
        assert_eq!(p.kappa, 208.0);
        assert_eq!(p.sigma, 165.0 / 416.0);
        assert_eq!(p.tau, 15.0 / 416.0);
        // printed values are truncated to three decimals
        assert!((p.x_minus - (-0.931)).abs() < 1e-3);
        assert!((p.x_plus - 0.903).abs() < 1e-3);
    }

    #[test]
    fn legendre_parameters() {
        let p = JacobiParams::new(10, 0.0, 0.0).unwrap();
        assert_eq!(p.kappa, 10.5);
        assert_eq!(p.sigma, 0.0);
        assert_eq!(p.tau, 0.0);
        assert_eq!(p.x_minus, -1.0);
        assert_eq!(p.x_plus, 1.0);
    }

    #[test]
    fn rejects_bad_shape_parameters() {
        assert!(JacobiParams::new(5, -1.0, 0.0).is_err());
        assert!(JacobiParams::new(5, 0.0, -1.5).is_err());
        assert!(JacobiParams::new(5, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn turning_points_are_roots_of_u() {
        for &(n, a, b) in &[(25u32, 50.0, 41.0), (125, 90.0, 75.0), (40, 0.3, 7.0)] {
            let p = JacobiParams::new(n, a, b).unwrap();
            // unfactored radical at the turning points
            for x in [p.x_minus, p.x_plus] {
                let direct = 1.0 - 2.0 * p.sigma * p.tau * x - p.tau * p.tau - p.sigma * p.sigma
                    - x * x;
                assert!(direct.abs() <= 4.0 * f64::EPSILON * (1.0 + x * x));
            }
        }
    }

    #[test]
    fn swap_symmetry() {
        let p = JacobiParams::new(25, 50.0, 41.0).unwrap();
        let q = JacobiParams::new(25, 41.0, 50.0).unwrap();
        assert_eq!(p.kappa, q.kappa);
        assert_eq!(p.sigma, q.sigma);
        assert_eq!(p.tau, -q.tau);
        assert_eq!(p.x_plus, -q.x_minus);
        assert_eq!(p.x_minus, -q.x_plus);
    }

    #[test]
    fn regime_classification() {
        let cfg = RegimeConfig {
            delta: 0.05,
            ..Default::default()
        };
        let ex1 = JacobiParams::new(25, 50.0, 41.0).unwrap();
        assert!(validate_regime(&ex1, &cfg, 0.0).in_bulk);
        assert!(validate_regime(&ex1, &cfg, ex1.x_minus).near_left_tp);
        let fig1 = JacobiParams::new(125, 90.0, 75.0).unwrap();
        assert!(validate_regime(&fig1, &cfg, 0.95).out_of_regime);
    }

    #[test]
    fn sigma_tau_bound() {
        for &(n, a, b) in &[(5u32, 0.0, 0.0), (25, 50.0, 41.0), (10, 300.0, 0.0)] {
            let p = JacobiParams::new(n, a, b).unwrap();
            assert!(p.sigma * p.sigma + p.tau * p.tau <= 1.0 + 2.0 * (p.sigma * p.tau).abs());
            let want_nonneg = -p.sigma * p.tau
                >= ((1.0 - p.sigma * p.sigma) * (1.0 - p.tau * p.tau)).sqrt();
            assert_eq!(p.x_minus >= 0.0, want_nonneg);
        }
    }
}
