//! Phase and envelope functions of the oscillatory representation:
//! `U`, `chi`, `chi'`, `psi`, `xi`, and the safeguarded Newton inversion
//! of `chi`.

use crate::error::{Error, Result};
use crate::params::JacobiParams;

/// Maximum Newton/bisection iterations in [`invert_chi`].
const MAX_INVERT_ITERS: usize = 100;

/// `chi`, `chi'`, `xi` and `U` evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseValue {
    pub x: f64,
    pub u: f64,
    pub chi: f64,
    pub chi_prime: f64,
    pub xi: f64,
}

impl PhaseValue {
    pub fn evaluate(p: &JacobiParams, x: f64) -> Result<Self> {
        Ok(Self {
            x,
            u: u_func(p, x)?,
            chi: chi(p, x)?,
            chi_prime: chi_prime(p, x)?,
            xi: xi(p, x)?,
        })
    }
}

/// The parameter-only phase constant `psi` together with `2 kappa psi`,
/// which feeds the scaled-weight normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiValue {
    pub psi: f64,
    pub two_kappa_psi: f64,
}

fn check_interval(p: &JacobiParams, x: f64) -> Result<()> {
    let tol = 4.0 * f64::EPSILON * p.span().max(1.0);
    if x < p.x_minus - tol || x > p.x_plus + tol {
        return Err(Error::OutsideOscillatory {
            x,
            x_minus: p.x_minus,
            x_plus: p.x_plus,
        });
    }
    Ok(())
}

/// `U(x) = sqrt((x_+ - x)(x - x_-))`, the envelope radical.
///
/// The factored form is stable near the turning points; a small
/// tolerance past them clamps to zero so endpoint evaluations are exact.
pub fn u_func(p: &JacobiParams, x: f64) -> Result<f64> {
    check_interval(p, x)?;
    Ok(p.u_squared(x).max(0.0).sqrt())
}

/// The oscillation phase `chi(x)`, increasing from `-(1-sigma)pi` at `x_-`
/// to `0` at `x_+`.
///
/// The first two arctangent terms have denominators that stay positive on
/// the interval; the third term needs the two-argument arctangent because
/// `tau + x sigma` changes sign.
pub fn chi(p: &JacobiParams, x: f64) -> Result<f64> {
    check_interval(p, x)?;
    let (sigma, tau) = (p.sigma, p.tau);
    // Exact limits at the turning points keep endpoint handling
    // deterministic (the atan2 term is discontinuous in rounding there).
    if x == p.x_minus {
        return Ok(-(1.0 - sigma) * std::f64::consts::PI);
    }
    if x == p.x_plus {
        return Ok(0.0);
    }
    let u = u_func(p, x)?;
    let t1 = (tau + 1.0) * (u / (1.0 - x + sigma + tau)).atan();
    let t2 = (tau - 1.0) * (u / (1.0 + x + sigma - tau)).atan();
    let t3 = (1.0 - sigma) * (-u).atan2(tau + x * sigma);
    Ok(t1 + t2 + t3)
}

/// `chi'(x) = U(x)/(1 - x^2)`, strictly positive inside `(x_-, x_+)`.
pub fn chi_prime(p: &JacobiParams, x: f64) -> Result<f64> {
    check_interval(p, x)?;
    if x <= p.x_minus || x >= p.x_plus {
        return Err(Error::Domain(format!(
            "chi' vanishes at the turning points; got x = {x}"
        )));
    }
    if x.abs() >= 1.0 {
        return Err(Error::Domain(format!("chi' undefined at x = {x}")));
    }
    Ok(u_func(p, x)? / (1.0 - x * x))
}

/// `(1-y)ln(1-y) + (1+y)ln(1+y)`, via the even series for small `|y|`.
fn sym_entropy(y: f64) -> f64 {
    if y.abs() < 0.125 {
        // sum_{k>=1} y^{2k} / (k (2k-1)), truncated at 1e-18 relative
        let y2 = y * y;
        let mut term = y2;
        let mut sum = y2;
        let mut k = 1.0f64;
        while term.abs() > 1e-18 * sum.abs() {
            k += 1.0;
            term *= y2;
            sum += term / (k * (2.0 * k - 1.0));
            if k > 24.0 {
                break;
            }
        }
        // first term has k=1 denominator 1*(2-1)=1 already included
        sum
    } else {
        (1.0 - y) * (1.0 - y).ln() + (1.0 + y) * (1.0 + y).ln()
    }
}

/// The parameter phase `psi(sigma, tau)`, even in `tau`, zero at the
/// Legendre point `sigma = tau = 0`.
pub fn psi(p: &JacobiParams) -> Result<PsiValue> {
    if p.sigma.abs() >= 1.0 || p.tau.abs() >= 1.0 {
        return Err(Error::Domain(format!(
            "psi requires |sigma|, |tau| < 1; got sigma={}, tau={}",
            p.sigma, p.tau
        )));
    }
    let v = 0.5 * (sym_entropy(p.sigma) - sym_entropy(p.tau));
    Ok(PsiValue {
        psi: v,
        two_kappa_psi: 2.0 * p.kappa * v,
    })
}

/// `xi(x) = -(sigma+tau)/2 ln(1-x) - (sigma-tau)/2 ln(1+x)`, satisfying
/// `exp(-kappa xi) = sqrt(w(x))`.
pub fn xi(p: &JacobiParams, x: f64) -> Result<f64> {
    if x.abs() >= 1.0 {
        return Err(Error::Domain(format!("xi undefined at x = {x}")));
    }
    Ok(-0.5 * (p.sigma + p.tau) * (1.0 - x).ln() - 0.5 * (p.sigma - p.tau) * (1.0 + x).ln())
}

/// Solves `chi(x) = target` by Newton iteration clamped to a maintained
/// bracket, falling back to bisection when a step leaves it. `chi'` tends
/// to zero at the turning points, so raw Newton diverges near the ends.
pub fn invert_chi(p: &JacobiParams, target: f64, x0: f64) -> Result<f64> {
    let chi_min = -(1.0 - p.sigma) * std::f64::consts::PI;
    let range_tol = 1e-12 * chi_min.abs().max(1.0);
    if target < chi_min - range_tol || target > range_tol {
        return Err(Error::Domain(format!(
            "chi target {target} outside [{chi_min}, 0]"
        )));
    }
    let mut lo = p.x_minus;
    let mut hi = p.x_plus;
    let mut x = x0.clamp(
        p.x_minus + f64::EPSILON * p.span(),
        p.x_plus - f64::EPSILON * p.span(),
    );
    // tighter than the contract tolerance so converged nodes sit at the
    // evaluation noise floor of chi
    let tol = 1e-15 * target.abs().max(1.0);
    let step_floor = f64::EPSILON * p.span();
    for _ in 0..MAX_INVERT_ITERS {
        let f = chi(p, x)? - target;
        if f.abs() <= tol {
            return Ok(x);
        }
        // chi is strictly increasing: shrink the bracket
        if f > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let u = u_func(p, x)?;
        let mut next = if u > 0.0 {
            x - f * (1.0 - x * x) / u
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= step_floor {
            return Ok(next);
        }
        x = next;
    }
    // The bracket may collapse to adjacent floats before |f| <= tol for
    // targets very close to the endpoints; accept the midpoint then.
    if (hi - lo).abs() <= 4.0 * f64::EPSILON * p.span() {
        return Ok(0.5 * (lo + hi));
    }
    Err(Error::NoConvergence {
        op: "invert_chi",
        iterations: MAX_INVERT_ITERS,
    })
}
