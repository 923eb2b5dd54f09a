//! Classical weights `w_ell = M / ((1-x^2) P'(x)^2)` and scaled weights
//! `omega_ell = 1 / v'(x_ell)^2`, with the gamma-function normalization
//! assembled in log space so nothing overflows before it has to.

use serde::{Deserialize, Serialize};

use crate::coeffs;
use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::evaluator;
use crate::oracle;
use crate::params::JacobiParams;

/// `ln w` beyond this is flagged non-representable in plain precision.
const LOG_REPRESENTABLE: f64 = 708.0;

/// The scaled gamma function `Gamma*(z) = sqrt(z/(2 pi)) e^z z^{-z}
/// Gamma(z)`, tending to 1 as `z` grows.
pub fn gamma_star(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::Domain(format!("gamma_star requires z > 0, got {z}")));
    }
    Ok(dd::ln_gamma_star(Dd::from_f64(z)).exp().to_f64())
}

/// The combination `M_{n,alpha,beta} C^2_{n,alpha,beta}` linking classical
/// and scaled weights; tends to 1 when all parameters are large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingConstant {
    pub value: f64,
    pub log_value: f64,
}

/// Evaluates the gamma-ratio form of the scaling constant in log space,
/// with the scaled gamma functions covering the growing parts.
pub fn scaling_constant(p: &JacobiParams) -> Result<ScalingConstant> {
    if p.alpha == 0.0 && p.beta == 0.0 {
        // Legendre: M = 2 and C^2 = 1/2 exactly
        return Ok(ScalingConstant {
            value: 1.0,
            log_value: 0.0,
        });
    }
    let nf = p.n as f64;
    let s = Dd::from_sum(p.alpha, p.beta);
    let na1 = Dd::from_sum(p.alpha, nf + 1.0);
    let nb1 = Dd::from_sum(p.beta, nf + 1.0);
    let na_half = Dd::from_sum(p.alpha, nf + 0.5);
    let nb_half = Dd::from_sum(p.beta, nf + 0.5);
    let nab_half = s.add_f64(nf + 0.5);
    let nab1 = s.add_f64(nf + 1.0);
    let n_half = Dd::from_f64(nf + 0.5);
    let n1 = Dd::from_f64(nf + 1.0);
    let log = dd::lgamma(na1) + dd::lgamma(nb1) + dd::lgamma(nab_half) + dd::lgamma(n_half)
        - dd::lgamma(na_half)
        - dd::lgamma(nb_half)
        - dd::lgamma(nab1)
        - dd::lgamma(n1)
        + dd::ln_gamma_star(na_half)
        + dd::ln_gamma_star(nb_half)
        - dd::ln_gamma_star(nab_half)
        - dd::ln_gamma_star(n_half)
        + (nab_half.ln() + n_half.ln() - na_half.ln() - nb_half.ln()).mul_f64(0.5);
    Ok(ScalingConstant {
        value: log.exp().to_f64(),
        log_value: log.to_f64(),
    })
}

/// A classical weight with its always-representable log form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightValue {
    /// `exp(log_value)`; `NaN` when flagged non-representable.
    pub value: f64,
    pub log_value: f64,
    pub representable: bool,
}

/// Classical weight from the derivative expansion at one node estimate.
pub fn classical_weight(p: &JacobiParams, x_ell: f64, j: usize) -> Result<WeightValue> {
    let deriv = evaluator::eval_jacobi_deriv(p, x_ell, j, evaluator::DerivMethod::SameParams)?;
    classical_from_deriv(p, x_ell, &deriv)
}

fn classical_from_deriv(
    p: &JacobiParams,
    x_ell: f64,
    deriv: &evaluator::DerivEval,
) -> Result<WeightValue> {
    if x_ell.abs() >= 1.0 {
        return Err(Error::Domain(format!("node {x_ell} outside (-1, 1)")));
    }
    if deriv.w_osc == 0.0 {
        return Err(Error::Domain(format!(
            "vanishing derivative estimate at node {x_ell}"
        )));
    }
    let log_m = oracle::log_norm_constant(p.n, p.alpha, p.beta).to_f64();
    let log_dp = deriv.log_envelope + deriv.w_osc.abs().ln();
    let log_value = log_m - (1.0 - x_ell * x_ell).ln() - 2.0 * log_dp;
    let representable = log_value.abs() <= LOG_REPRESENTABLE;
    Ok(WeightValue {
        value: if representable { log_value.exp() } else { f64::NAN },
        log_value,
        representable,
    })
}

/// Scaled weight `omega = 1/v'(x_ell)^2`; order one across the bulk for
/// any parameter size.
pub fn scaled_weight(p: &JacobiParams, x_ell: f64, j: usize) -> Result<f64> {
    let vp = evaluator::eval_v_prime(p, x_ell, j)?;
    if vp == 0.0 {
        return Err(Error::Domain(format!(
            "vanishing scaled derivative at node {x_ell}"
        )));
    }
    Ok(1.0 / (vp * vp))
}

/// Which weight families to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightKind {
    Classical,
    Scaled,
    Both,
}

/// Weights at one node; fields are present according to the requested
/// kind.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WeightPair {
    pub ell: u32,
    /// Classical weight; `None` when not requested or not representable.
    pub w_classical: Option<f64>,
    /// `ln w`, always representable when classical weights are requested.
    pub log_w: Option<f64>,
    pub omega_scaled: Option<f64>,
}

/// Weights for a sorted node sequence. With [`WeightKind::Both`] the two
/// families share each node's coefficient tables.
pub fn all_weights(
    p: &JacobiParams,
    nodes: &[f64],
    j: usize,
    kind: WeightKind,
) -> Result<Vec<WeightPair>> {
    nodes
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let ell = i as u32 + 1;
            let (classical, omega) = match kind {
                WeightKind::Classical => {
                    let mut table = coeffs::c_coeffs(p, x, j)?;
                    coeffs::rs_coeffs(&mut table, p)?;
                    let deriv = evaluator::eval_jacobi_deriv_with_table(p, &table)?;
                    (Some(classical_from_deriv(p, x, &deriv)?), None)
                }
                WeightKind::Scaled => {
                    let mut table = coeffs::c_coeffs(p, x, j)?;
                    coeffs::mn_coeffs(&mut table, p)?;
                    let vp = evaluator::eval_v_prime_with_table(p, &table)?;
                    (None, Some(1.0 / (vp * vp)))
                }
                WeightKind::Both => {
                    let table = coeffs::full_table(p, x, j)?;
                    let deriv = evaluator::eval_jacobi_deriv_with_table(p, &table)?;
                    let vp = evaluator::eval_v_prime_with_table(p, &table)?;
                    (
                        Some(classical_from_deriv(p, x, &deriv)?),
                        Some(1.0 / (vp * vp)),
                    )
                }
            };
            Ok(WeightPair {
                ell,
                w_classical: classical.and_then(|w| w.representable.then_some(w.value)),
                log_w: classical.map(|w| w.log_value),
                omega_scaled: omega,
            })
        })
        .collect()
}
