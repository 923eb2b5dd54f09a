//! Extended-precision ground truth: polynomial values by the three-term
//! recurrence in double-double arithmetic, zeros by bracketed Newton,
//! weights by the derivative formula, and per-index comparison reports.

use serde::Serialize;

use crate::dd::{self, Dd};
use crate::error::{Error, Result};
use crate::nodes::{self, CorrectionOrder};
use crate::params::JacobiParams;
use crate::weights;

/// Default degree cap for oracle computations.
pub const ORACLE_SIZE_GUARD: u32 = 5000;

/// Rescale threshold `2^600` for the recurrence overflow guard.
const SCALE_LIMIT: f64 = 4.149515568880993e180;
const SCALE_SHIFT: i32 = 600;

/// Newton stopping criteria for zero refinement.
const NEWTON_STEP_TOL: f64 = 1e-28;
const NEWTON_MAX_ITERS: usize = 60;

/// Polynomial value and derivative as double-doubles with a shared
/// power-of-two exponent guard against overflow.
#[derive(Debug, Clone, Copy)]
pub struct OracleValue {
    pub value: Dd,
    pub value_exp2: i32,
    pub derivative: Dd,
    pub derivative_exp2: i32,
}

impl OracleValue {
    /// Plain-precision value (`inf` when out of range).
    pub fn value_f64(&self) -> f64 {
        ldexp_f64(self.value.to_f64(), self.value_exp2)
    }

    pub fn derivative_f64(&self) -> f64 {
        ldexp_f64(self.derivative.to_f64(), self.derivative_exp2)
    }

    /// `ln |value|` assembled from the scaled representation.
    pub fn log_abs_value(&self) -> Dd {
        self.value.abs().ln() + dd::LN2.mul_f64(self.value_exp2 as f64)
    }

    pub fn log_abs_derivative(&self) -> Dd {
        self.derivative.abs().ln() + dd::LN2.mul_f64(self.derivative_exp2 as f64)
    }
}

fn ldexp_f64(v: f64, e: i32) -> f64 {
    if e == 0 {
        return v;
    }
    v * 2f64.powi(e)
}

fn renorm(v: Dd, w: Dd, e: i32) -> (Dd, Dd, i32) {
    let m = v.hi.abs().max(w.hi.abs());
    if m > SCALE_LIMIT {
        (v.ldexp(-SCALE_SHIFT), w.ldexp(-SCALE_SHIFT), e + SCALE_SHIFT)
    } else if m > 0.0 && m < 1.0 / SCALE_LIMIT {
        (v.ldexp(SCALE_SHIFT), w.ldexp(SCALE_SHIFT), e - SCALE_SHIFT)
    } else {
        (v, w, e)
    }
}

fn check_shape(alpha: f64, beta: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= -1.0 || !beta.is_finite() || beta <= -1.0 {
        return Err(Error::Domain(format!(
            "oracle requires alpha, beta > -1; got ({alpha}, {beta})"
        )));
    }
    Ok(())
}

/// `P_n^{(alpha,beta)}(x)` by the standard three-term recurrence in
/// double-double, returned as `value * 2^exp2`.
pub(crate) fn eval_scaled(n: u32, alpha: f64, beta: f64, x: Dd) -> (Dd, i32) {
    if n == 0 {
        return (Dd::ONE, 0);
    }
    let s = Dd::from_sum(alpha, beta);
    let a_minus_b = Dd::from_sum(alpha, -beta);
    // P_1 = ((alpha+beta+2) x + (alpha-beta)) / 2
    let mut pk = (s.add_f64(2.0) * x + a_minus_b).mul_f64(0.5);
    let mut pm1 = Dd::ONE;
    let mut e = 0i32;
    for k in 2..=n {
        let kf = k as f64;
        let t = s.add_f64(2.0 * kf); // 2k + a + b
        let c1 = (s.add_f64(kf) * t.add_f64(-2.0)).mul_f64(2.0 * kf);
        let c2 = t.add_f64(-1.0) * a_minus_b * s;
        let c3 = t.add_f64(-2.0) * t.add_f64(-1.0) * t;
        let c4 = (Dd::from_sum(alpha, kf - 1.0) * Dd::from_sum(beta, kf - 1.0) * t)
            .mul_f64(2.0);
        let pnew = ((c2 + c3 * x) * pk - c4 * pm1) / c1;
        pm1 = pk;
        pk = pnew;
        (pk, pm1, e) = renorm(pk, pm1, e);
    }
    (pk, e)
}

/// Derivative through the parameter-shift identity
/// `P' = (alpha+beta+n+1)/2 * P_{n-1}^{(alpha+1,beta+1)}`.
pub(crate) fn deriv_scaled(n: u32, alpha: f64, beta: f64, x: Dd) -> (Dd, i32) {
    if n == 0 {
        return (Dd::ZERO, 0);
    }
    let factor = Dd::from_sum(alpha, beta).add_f64(n as f64 + 1.0).mul_f64(0.5);
    let (v, e) = eval_scaled(n - 1, alpha + 1.0, beta + 1.0, x);
    (factor * v, e)
}

/// Value and derivative of the degree-`n` polynomial at `x`.
pub fn oracle_eval(n: u32, alpha: f64, beta: f64, x: f64) -> Result<OracleValue> {
    check_shape(alpha, beta)?;
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("oracle evaluation needs |x| <= 1, got {x}")));
    }
    let xd = Dd::from_f64(x);
    let (value, value_exp2) = eval_scaled(n, alpha, beta, xd);
    let (derivative, derivative_exp2) = deriv_scaled(n, alpha, beta, xd);
    Ok(OracleValue {
        value,
        value_exp2,
        derivative,
        derivative_exp2,
    })
}

fn sign_of(v: Dd) -> f64 {
    if v.hi > 0.0 {
        1.0
    } else if v.hi < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Sign of the polynomial at `x`, nudging off the point when the
/// evaluation lands exactly on a zero (so brackets stay strict).
fn sign_at(n: u32, alpha: f64, beta: f64, x: Dd, nudge: f64) -> (Dd, f64) {
    let mut x = x;
    let mut step = nudge;
    for _ in 0..8 {
        let s = sign_of(eval_scaled(n, alpha, beta, x).0);
        if s != 0.0 {
            return (x, s);
        }
        x = x.add_f64(step);
        step *= 2.0;
    }
    (x, 0.0)
}

/// Bracketed double-double Newton refinement of one zero.
fn refine_zero(n: u32, alpha: f64, beta: f64, mut lo: Dd, mut hi: Dd, start: Dd, sign_lo: f64) -> Dd {
    let mut x = start;
    if x <= lo || x >= hi {
        x = (lo + hi).mul_f64(0.5);
    }
    for _ in 0..NEWTON_MAX_ITERS {
        let (v, ve) = eval_scaled(n, alpha, beta, x);
        if v.is_zero() {
            return x;
        }
        if sign_of(v) == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        let (d, de) = deriv_scaled(n, alpha, beta, x);
        let mut next = if d.is_zero() {
            (lo + hi).mul_f64(0.5)
        } else {
            let shift = (ve - de).clamp(-1000, 1000);
            x - (v / d).ldexp(shift)
        };
        if next <= lo || next >= hi {
            next = (lo + hi).mul_f64(0.5);
        }
        let step = (next - x).abs();
        x = next;
        if step.hi < NEWTON_STEP_TOL {
            break;
        }
    }
    x
}

/// Grid scan for sign-change brackets; used for small degrees and
/// whenever the asymptotic sweep is unavailable.
fn grid_brackets(n: u32, alpha: f64, beta: f64, p: &JacobiParams) -> Result<Vec<(Dd, Dd, f64)>> {
    let span = p.span();
    let lo = (p.x_minus - 0.1 * span).max(-1.0 + 1e-9);
    let hi = (p.x_plus + 0.1 * span).min(1.0 - 1e-9);
    let mut points = (200 * n as usize).max(4000);
    for _ in 0..3 {
        let cell = (hi - lo) / points as f64;
        let nudge = cell / 64.0;
        let mut brackets = Vec::with_capacity(n as usize);
        let (mut prev_x, mut prev_s) = sign_at(n, alpha, beta, Dd::from_f64(lo), nudge);
        for i in 1..=points {
            let grid = Dd::from_f64(lo + (hi - lo) * i as f64 / points as f64);
            let (x, s) = sign_at(n, alpha, beta, grid, nudge);
            if s != prev_s && prev_s != 0.0 && s != 0.0 && prev_x < x {
                brackets.push((prev_x, x, prev_s));
            }
            prev_x = x;
            prev_s = s;
        }
        if brackets.len() == n as usize {
            return Ok(brackets);
        }
        points *= 4;
    }
    Err(Error::BracketFailure { ell: 0 })
}

/// Brackets from the asymptotic order-2 sweep: cell boundaries halfway
/// between consecutive node estimates, signs verified by evaluation.
fn asymptotic_brackets(
    n: u32,
    alpha: f64,
    beta: f64,
    p: &JacobiParams,
) -> Result<Vec<(Dd, Dd, f64, f64)>> {
    let est = nodes::all_nodes(p, CorrectionOrder::Two)?;
    let mut bounds = Vec::with_capacity(n as usize + 1);
    bounds.push(p.x_minus);
    for pair in est.windows(2) {
        bounds.push(0.5 * (pair[0].value() + pair[1].value()));
    }
    bounds.push(p.x_plus);
    let nudge = p.span() * 1e-12;
    let marked: Vec<(Dd, f64)> = bounds
        .iter()
        .map(|&b| sign_at(n, alpha, beta, Dd::from_f64(b), nudge))
        .collect();
    let mut out = Vec::with_capacity(n as usize);
    for (i, window) in marked.windows(2).enumerate() {
        let (mut blo, slo0) = window[0];
        let (mut bhi, shi0) = window[1];
        let mut slo = slo0;
        if slo == 0.0 || shi0 == 0.0 || slo == shi0 || !(blo < bhi) {
            // the cell boundary landed on or past the zero: rescan
            let mut found = false;
            let mut prev_x = blo;
            let mut prev_s = sign_of(eval_scaled(n, alpha, beta, prev_x).0);
            for k in 1..=64 {
                let x = blo + (bhi - blo).mul_f64(k as f64 / 64.0);
                let s = sign_of(eval_scaled(n, alpha, beta, x).0);
                if s != prev_s && prev_s != 0.0 && s != 0.0 {
                    blo = prev_x;
                    bhi = x;
                    slo = prev_s;
                    found = true;
                    break;
                }
                prev_x = x;
                prev_s = s;
            }
            if !found {
                return Err(Error::BracketFailure { ell: i as u32 + 1 });
            }
        }
        out.push((blo, bhi, slo, est[i].value()));
    }
    Ok(out)
}

/// All `n` zeros at oracle precision, smallest first.
pub fn oracle_nodes(n: u32, alpha: f64, beta: f64) -> Result<Vec<Dd>> {
    check_shape(alpha, beta)?;
    if n == 0 {
        return Err(Error::Domain("degree must be at least 1".into()));
    }
    if n > ORACLE_SIZE_GUARD {
        return Err(Error::OracleSizeGuard {
            n,
            limit: ORACLE_SIZE_GUARD,
        });
    }
    let p = JacobiParams::new(n, alpha, beta)?;
    let use_asymptotic = n >= 20 && alpha >= 0.0 && beta >= 0.0;
    let mut zeros = Vec::with_capacity(n as usize);
    if use_asymptotic {
        match asymptotic_brackets(n, alpha, beta, &p) {
            Ok(brackets) => {
                for (lo, hi, slo, start) in brackets {
                    zeros.push(refine_zero(n, alpha, beta, lo, hi, Dd::from_f64(start), slo));
                }
            }
            Err(_) if n <= 500 => {
                for (lo, hi, slo) in grid_brackets(n, alpha, beta, &p)? {
                    let start = (lo + hi).mul_f64(0.5);
                    zeros.push(refine_zero(n, alpha, beta, lo, hi, start, slo));
                }
            }
            Err(e) => return Err(e),
        }
    } else {
        for (lo, hi, slo) in grid_brackets(n, alpha, beta, &p)? {
            let start = (lo + hi).mul_f64(0.5);
            zeros.push(refine_zero(n, alpha, beta, lo, hi, start, slo));
        }
    }
    // ordering and simple-zero sign alternation
    for (i, pair) in zeros.windows(2).enumerate() {
        if !(pair[0] < pair[1]) {
            return Err(Error::NodeOrdering { ell: i as u32 + 2 });
        }
    }
    for (i, z) in zeros.iter().enumerate() {
        let (d, _) = deriv_scaled(n, alpha, beta, *z);
        let expect = if (n as usize - 1 - i) % 2 == 0 { 1.0 } else { -1.0 };
        if sign_of(d) != expect {
            return Err(Error::NodeOrdering { ell: i as u32 + 1 });
        }
    }
    Ok(zeros)
}

/// One classical weight at oracle precision.
#[derive(Debug, Clone, Copy)]
pub struct OracleWeight {
    /// `w` rounded through the log form; `inf`/`0` when out of f64 range.
    pub value: Dd,
    /// `ln w`, always finite.
    pub log_value: Dd,
}

/// `ln M_{n,alpha,beta}` with the gamma factors at extended precision.
pub(crate) fn log_norm_constant(n: u32, alpha: f64, beta: f64) -> Dd {
    let nf = n as f64;
    let s = Dd::from_sum(alpha, beta);
    dd::LN2 * s.add_f64(1.0)
        + dd::lgamma(Dd::from_sum(alpha, nf + 1.0))
        + dd::lgamma(Dd::from_sum(beta, nf + 1.0))
        - dd::lgamma(Dd::from_f64(nf + 1.0))
        - dd::lgamma(s.add_f64(nf + 1.0))
}

/// Classical weights `w = M / ((1-x^2) P'(x)^2)` at the given oracle
/// nodes.
pub fn oracle_weights(n: u32, alpha: f64, beta: f64, nodes: &[Dd]) -> Result<Vec<OracleWeight>> {
    check_shape(alpha, beta)?;
    let log_m = log_norm_constant(n, alpha, beta);
    nodes
        .iter()
        .map(|&x| {
            let one_minus_x2 = (Dd::ONE - x) * (Dd::ONE + x);
            if !(one_minus_x2.hi > 0.0) {
                return Err(Error::Domain(format!(
                    "node {} outside (-1, 1)",
                    x.to_f64()
                )));
            }
            let (d, de) = deriv_scaled(n, alpha, beta, x);
            if d.is_zero() {
                return Err(Error::Domain(format!(
                    "vanishing derivative at node {}",
                    x.to_f64()
                )));
            }
            let log_dp = d.abs().ln() + dd::LN2.mul_f64(de as f64);
            let log_value = log_m - one_minus_x2.ln() - log_dp.mul_f64(2.0);
            Ok(OracleWeight {
                value: log_value.exp(),
                log_value,
            })
        })
        .collect()
}

/// Moments `I_k = integral of x^k (1-x)^alpha (1+x)^beta over [-1, 1]`
/// for `k = 0..=k_max`, by the boundary-term recurrence
/// `I_k = ((k-1) I_{k-2} + (beta-alpha) I_{k-1}) / (k+alpha+beta+1)`.
pub fn moments(alpha: f64, beta: f64, k_max: usize) -> Result<Vec<Dd>> {
    check_shape(alpha, beta)?;
    let s = Dd::from_sum(alpha, beta);
    let log_i0 = dd::LN2 * s.add_f64(1.0) + dd::lgamma(Dd::from_f64(alpha + 1.0))
        + dd::lgamma(Dd::from_f64(beta + 1.0))
        - dd::lgamma(s.add_f64(2.0));
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(log_i0.exp());
    if k_max == 0 {
        return Ok(out);
    }
    let b_minus_a = Dd::from_sum(beta, -alpha);
    for k in 1..=k_max {
        let kf = k as f64;
        let prev2 = if k >= 2 { out[k - 2] } else { Dd::ZERO };
        let v = (prev2.mul_f64(kf - 1.0) + b_minus_a * out[k - 1]) / s.add_f64(kf + 1.0);
        out.push(v);
    }
    Ok(out)
}

/// Per-index accuracy of the asymptotic pipeline against the oracle.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub ell: u32,
    pub x_oracle: f64,
    pub node_err_abs: f64,
    pub node_err_rel: f64,
    pub w_err_rel: f64,
    pub omega_err_rel: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
    pub order: u8,
    #[serde(rename = "J")]
    pub truncation: usize,
    pub rows: Vec<CompareRow>,
}

/// Runs the full asymptotic pipeline at the requested order and
/// truncation and measures every node and weight against the oracle.
pub fn compare_report(p: &JacobiParams, order: CorrectionOrder, j: usize) -> Result<ComparisonReport> {
    if p.n > ORACLE_SIZE_GUARD {
        return Err(Error::OracleSizeGuard {
            n: p.n,
            limit: ORACLE_SIZE_GUARD,
        });
    }
    let asym_nodes = nodes::all_nodes(p, order)?;
    let node_values: Vec<f64> = asym_nodes.iter().map(|e| e.value()).collect();
    let asym_weights = weights::all_weights(p, &node_values, j, weights::WeightKind::Both)?;
    let exact_nodes = oracle_nodes(p.n, p.alpha, p.beta)?;
    let exact_weights = oracle_weights(p.n, p.alpha, p.beta, &exact_nodes)?;
    let scaling = weights::scaling_constant(p)?;
    let rows = asym_nodes
        .iter()
        .zip(&asym_weights)
        .zip(exact_nodes.iter().zip(&exact_weights))
        .map(|((est, aw), (xo, wo))| {
            let diff = (Dd::from_f64(est.value()) - *xo).to_f64();
            let x_oracle = xo.to_f64();
            let log_w_asym = aw.log_w.expect("both-kind weights carry the log form");
            let w_err_rel = ((log_w_asym - wo.log_value.to_f64()).exp() - 1.0).abs();
            // scaled weight of the oracle through the conversion identity
            let log_omega_oracle = wo.log_value.to_f64()
                - scaling.log_value
                - p.alpha * (1.0 - x_oracle).ln()
                - p.beta * (1.0 + x_oracle).ln();
            let omega_asym = aw.omega_scaled.expect("both-kind weights carry omega");
            let omega_err_rel = (omega_asym.ln() - log_omega_oracle).exp_m1().abs();
            CompareRow {
                ell: est.ell,
                x_oracle,
                node_err_abs: diff.abs(),
                node_err_rel: if x_oracle != 0.0 {
                    (diff / x_oracle).abs()
                } else {
                    f64::NAN
                },
                w_err_rel,
                omega_err_rel,
            }
        })
        .collect();
    Ok(ComparisonReport {
        n: p.n,
        alpha: p.alpha,
        beta: p.beta,
        order: order.as_u8(),
        truncation: j,
        rows,
    })
}
