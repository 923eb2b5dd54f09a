//! Evaluation of the Jacobi polynomial, its derivative, and the scaled
//! function `v` from the asymptotic expansion: an envelope carrying all
//! growth, times an order-one oscillatory factor.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::coeffs::{self, CoeffTable};
use crate::error::{Error, Result};
use crate::params::{validate_regime, JacobiParams, RegimeConfig, RegimeReport};
use crate::phase;

/// Envelope magnitudes beyond `exp(±700)` are flagged non-representable;
/// the logarithmic parts stay valid.
const LOG_REPRESENTABLE: f64 = 700.0;

/// Polynomial value split as `value = envelope * w_osc`.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    /// `envelope * w_osc`; `NaN` when not representable.
    pub value: f64,
    /// The positive prefactor `2^{(alpha+beta+1)/2} e^{-kappa psi} /
    /// sqrt(pi kappa w(x) U(x))`; `inf`/`0` when out of range.
    pub envelope: f64,
    /// Natural log of the envelope, always finite in the regime.
    pub log_envelope: f64,
    /// The oscillatory factor `cos(kappa chi + pi/4) P + sin(...) Q`.
    pub w_osc: f64,
    pub order_used: usize,
    pub representable: bool,
    pub regime: RegimeReport,
}

/// Which expansion evaluates the derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivMethod {
    /// Derivative expansion in the same `(n, alpha, beta)`.
    SameParams,
    /// The identity `P' = (alpha+beta+n+1)/2 * P_{n-1}^{(alpha+1,beta+1)}`.
    ShiftedParams,
}

/// Derivative value in the same envelope/oscillation split.
#[derive(Debug, Clone, Copy)]
pub struct DerivEval {
    pub value: f64,
    pub log_envelope: f64,
    pub w_osc: f64,
    pub representable: bool,
}

fn truncated_sums(table: &CoeffTable, kappa: f64) -> (f64, f64) {
    let mut pw = 1.0;
    let mut psum = 0.0;
    let mut qsum = 0.0;
    for (pj, qj) in table.p.iter().zip(&table.q) {
        psum += pj / pw;
        qsum += qj / pw;
        pw *= kappa;
    }
    (psum, qsum)
}

/// Oscillation argument `kappa chi + pi/4`, with the product fused.
fn phase_arg(p: &JacobiParams, x: f64) -> Result<f64> {
    Ok(p.kappa.mul_add(phase::chi(p, x)?, FRAC_PI_4))
}

fn log_envelope_value(p: &JacobiParams, x: f64, u: f64) -> Result<f64> {
    let psi = phase::psi(p)?.psi;
    let log_w = p.alpha * (1.0 - x).ln() + p.beta * (1.0 + x).ln();
    Ok(0.5 * (p.alpha + p.beta + 1.0) * std::f64::consts::LN_2 - p.kappa * psi
        - 0.5 * (PI * p.kappa * u).ln()
        - 0.5 * log_w)
}

/// Evaluates `P_n^{(alpha,beta)}(x)` from the truncated expansion.
pub fn eval_jacobi(p: &JacobiParams, x: f64, j: usize) -> Result<EvalResult> {
    let table = coeffs::c_coeffs(p, x, j)?;
    eval_jacobi_with_table(p, &table)
}

/// Same as [`eval_jacobi`] reusing a prepared coefficient table.
pub fn eval_jacobi_with_table(p: &JacobiParams, table: &CoeffTable) -> Result<EvalResult> {
    let x = table.x;
    let u = phase::u_func(p, x)?;
    if u == 0.0 {
        return Err(Error::DegenerateSaddle { x });
    }
    let (psum, qsum) = truncated_sums(table, p.kappa);
    let arg = phase_arg(p, x)?;
    let w_osc = arg.cos() * psum + arg.sin() * qsum;
    let log_envelope = log_envelope_value(p, x, u)?;
    let representable = log_envelope.abs() <= LOG_REPRESENTABLE;
    let envelope = log_envelope.exp();
    Ok(EvalResult {
        value: if representable {
            envelope * w_osc
        } else {
            f64::NAN
        },
        envelope,
        log_envelope,
        w_osc,
        order_used: table.truncation,
        representable,
        regime: validate_regime(p, &RegimeConfig::default(), x),
    })
}

/// Evaluates `d/dx P_n^{(alpha,beta)}(x)`.
pub fn eval_jacobi_deriv(p: &JacobiParams, x: f64, j: usize, method: DerivMethod) -> Result<DerivEval> {
    match method {
        DerivMethod::SameParams => {
            let mut table = coeffs::c_coeffs(p, x, j)?;
            coeffs::rs_coeffs(&mut table, p)?;
            eval_jacobi_deriv_with_table(p, &table)
        }
        DerivMethod::ShiftedParams => {
            if p.n == 0 {
                return Ok(DerivEval {
                    value: 0.0,
                    log_envelope: f64::NEG_INFINITY,
                    w_osc: 0.0,
                    representable: true,
                });
            }
            let shifted = JacobiParams::new(p.n - 1, p.alpha + 1.0, p.beta + 1.0)?;
            let factor = 0.5 * (p.alpha + p.beta + p.n as f64 + 1.0);
            let inner = eval_jacobi(&shifted, x, j)?;
            let log_envelope = inner.log_envelope + factor.ln();
            let representable = log_envelope.abs() <= LOG_REPRESENTABLE;
            Ok(DerivEval {
                value: if representable {
                    factor * inner.value
                } else {
                    f64::NAN
                },
                log_envelope,
                w_osc: inner.w_osc,
                representable,
            })
        }
    }
}

/// Derivative from a table whose `r`/`s` columns are filled.
pub fn eval_jacobi_deriv_with_table(p: &JacobiParams, table: &CoeffTable) -> Result<DerivEval> {
    assert!(
        !table.r.is_empty(),
        "derivative evaluation needs the r/s coefficients"
    );
    let x = table.x;
    let u = phase::u_func(p, x)?;
    let cp = phase::chi_prime(p, x)?;
    let kappa = p.kappa;
    let mut pw = 1.0;
    let mut rsum = 0.0;
    let mut ssum = 0.0;
    for (rj, sj) in table.r.iter().zip(&table.s) {
        rsum += rj / pw;
        ssum += sj / pw;
        pw *= kappa;
    }
    let arg = phase_arg(p, x)?;
    // overall minus sign folded into the oscillatory factor
    let w_osc = arg.cos() * ssum - arg.sin() * rsum;
    // envelope: sqrt(kappa/pi) 2^{(a+b+1)/2} e^{-kappa psi} chi' A,
    // A = 1/sqrt(w U)
    let psi = phase::psi(p)?.psi;
    let log_w = p.alpha * (1.0 - x).ln() + p.beta * (1.0 + x).ln();
    let log_envelope = 0.5 * (kappa / PI).ln()
        + 0.5 * (p.alpha + p.beta + 1.0) * std::f64::consts::LN_2
        - kappa * psi
        + cp.ln()
        - 0.5 * (log_w + u.ln());
    let representable = log_envelope.abs() <= LOG_REPRESENTABLE;
    Ok(DerivEval {
        value: if representable {
            log_envelope.exp() * w_osc
        } else {
            f64::NAN
        },
        log_envelope,
        w_osc,
        representable,
    })
}

/// The scaled function `v(x) = Z(x) W(x) / sqrt(pi kappa)`, order one
/// across the bulk for any parameter size.
pub fn eval_v(p: &JacobiParams, x: f64, j: usize) -> Result<f64> {
    let table = coeffs::c_coeffs(p, x, j)?;
    eval_v_with_table(p, &table)
}

pub fn eval_v_with_table(p: &JacobiParams, table: &CoeffTable) -> Result<f64> {
    let x = table.x;
    let u = phase::u_func(p, x)?;
    if u == 0.0 {
        return Err(Error::DegenerateSaddle { x });
    }
    let (psum, qsum) = truncated_sums(table, p.kappa);
    let arg = phase_arg(p, x)?;
    let w_osc = arg.cos() * psum + arg.sin() * qsum;
    let z = ((1.0 - x * x) / u).sqrt();
    Ok(z * w_osc / (PI * p.kappa).sqrt())
}

/// `v'(x)` from the derivative expansion with the `m`/`n` coefficients.
pub fn eval_v_prime(p: &JacobiParams, x: f64, j: usize) -> Result<f64> {
    let mut table = coeffs::c_coeffs(p, x, j)?;
    coeffs::mn_coeffs(&mut table, p)?;
    eval_v_prime_with_table(p, &table)
}

pub fn eval_v_prime_with_table(p: &JacobiParams, table: &CoeffTable) -> Result<f64> {
    assert!(
        !table.m.is_empty(),
        "scaled-derivative evaluation needs the m/n coefficients"
    );
    let x = table.x;
    let u = phase::u_func(p, x)?;
    let cp = phase::chi_prime(p, x)?;
    let kappa = p.kappa;
    let mut pw = 1.0;
    let mut msum = 0.0;
    let mut nsum = 0.0;
    for (mj, nj) in table.m.iter().zip(&table.nn) {
        msum += mj / pw;
        nsum += nj / pw;
        pw *= kappa;
    }
    let arg = phase_arg(p, x)?;
    let z = ((1.0 - x * x) / u).sqrt();
    Ok(-(kappa / PI).sqrt() * cp * z * (arg.sin() * msum - arg.cos() * nsum))
}
