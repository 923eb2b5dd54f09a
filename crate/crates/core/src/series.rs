//! Truncated complex power series on dense coefficient slices, enough for
//! the saddle-point reversion: product, quotient, square root, derivative.
//! Index `k` holds the coefficient of `w^k`.

use num_complex::Complex64;

pub(crate) type CSeries = Vec<Complex64>;

pub(crate) fn zeros(len: usize) -> CSeries {
    vec![Complex64::ZERO; len]
}

/// Truncated product; output length equals the shorter input length.
pub(crate) fn mul(a: &[Complex64], b: &[Complex64]) -> CSeries {
    let n = a.len().min(b.len());
    let mut out = zeros(n);
    for (i, &ai) in a.iter().enumerate().take(n) {
        if ai == Complex64::ZERO {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Quotient `a / b` with `b[0] != 0`, by forward substitution.
pub(crate) fn div(a: &[Complex64], b: &[Complex64]) -> CSeries {
    let n = a.len().min(b.len());
    let mut out = zeros(n);
    for k in 0..n {
        let mut acc = a[k];
        for i in 0..k {
            acc -= out[i] * b[k - i];
        }
        out[k] = acc / b[0];
    }
    out
}

/// Square root with the principal branch at the constant term.
pub(crate) fn sqrt(a: &[Complex64]) -> CSeries {
    let n = a.len();
    let mut out = zeros(n);
    out[0] = a[0].sqrt();
    for k in 1..n {
        let mut acc = a[k];
        for i in 1..k {
            acc -= out[i] * out[k - i];
        }
        out[k] = acc / (2.0 * out[0]);
    }
    out
}

/// Derivative with respect to the expansion variable (length shrinks by 1
/// conceptually; kept same length with a trailing zero).
pub(crate) fn derivative(a: &[Complex64]) -> CSeries {
    let n = a.len();
    let mut out = zeros(n);
    for k in 1..n {
        out[k - 1] = a[k] * k as f64;
    }
    out
}
