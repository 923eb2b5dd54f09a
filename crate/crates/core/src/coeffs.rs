//! Saddle-point data and asymptotic series coefficients.
//!
//! The expansion coefficients come from reverting the transformation
//! `phi(z) - phi(z_+) = w^2/2` into a power series `z = z_+ + sum z_j w^j`,
//! composing it with the algebraic prefactor of the integrand, and reading
//! off even coefficients. All of it is numeric per evaluation point; the
//! printed closed forms for `z_2..z_4` and `c_1` exist only as
//! cross-checks (see [`closed_form`]).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::JacobiParams;
use crate::phase;
use crate::series;

/// Largest supported truncation order of the asymptotic series.
pub const MAX_TRUNCATION: usize = 6;

/// `2^j (1/2)_j = (2j-1)!!` for `j = 0..=6`.
const ODD_DOUBLE_FACTORIAL: [f64; 7] = [1.0, 1.0, 3.0, 15.0, 105.0, 945.0, 10395.0];

/// The saddle point `z_+`, the derivatives of `phi` there, and the leading
/// reversion coefficient `z_1 = 1/sqrt(phi''(z_+))` with its branch pinned
/// so that `f_0 = e^{i pi/4} / sqrt(2 U(x))`.
#[derive(Debug, Clone)]
pub struct SaddleData {
    pub z_plus: Complex64,
    /// `phi_derivs[k]` is the `k`-th derivative at `z_+`; entries `0` and
    /// `1` are unused (the first derivative vanishes by construction).
    pub phi_derivs: Vec<Complex64>,
    pub z1: Complex64,
    x: f64,
}

impl SaddleData {
    /// Evaluation point this data belongs to.
    pub fn x(&self) -> f64 {
        self.x
    }
}

/// Per-point table of series coefficients: `p_j + i q_j` for the value,
/// `r_j + i s_j` for the derivative, `m_j + i n_j` for the scaled-function
/// derivative. The derived triples are empty until filled by
/// [`rs_coeffs`] / [`mn_coeffs`].
#[derive(Debug, Clone, Default)]
pub struct CoeffTable {
    pub x: f64,
    pub truncation: usize,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub m: Vec<f64>,
    pub nn: Vec<f64>,
}

fn check_truncation(j: usize) -> Result<()> {
    if j > MAX_TRUNCATION {
        return Err(Error::Domain(format!(
            "truncation order {j} exceeds the supported maximum {MAX_TRUNCATION}"
        )));
    }
    Ok(())
}

/// `k`-th derivative of `phi` at `z` (`k >= 1`), from the closed form of
/// the logarithmic derivatives.
fn phi_deriv(p: &JacobiParams, x: f64, z: Complex64, k: u32) -> Complex64 {
    let mut fact = 1.0;
    for i in 2..k {
        fact *= i as f64;
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let one = Complex64::ONE;
    fact * ((1.0 + p.tau) * (one - z).powu(k).inv()
        + sign * (1.0 - p.tau) * (one + z).powu(k).inv()
        - (1.0 - p.sigma) * (Complex64::from(x) - z).powu(k).inv())
}

/// Saddle point and `phi` derivatives up to order `2j + 3`.
pub fn saddle(p: &JacobiParams, x: f64, j: usize) -> Result<SaddleData> {
    check_truncation(j)?;
    let u = phase::u_func(p, x)?;
    if x <= p.x_minus || x >= p.x_plus || u == 0.0 {
        return Err(Error::DegenerateSaddle { x });
    }
    let z_plus = Complex64::new(x - p.tau, u) / (1.0 + p.sigma);
    let max_order = 2 * j + 3;
    let mut phi_derivs = vec![Complex64::ZERO; max_order + 1];
    for (k, d) in phi_derivs.iter_mut().enumerate().skip(2) {
        *d = phi_deriv(p, x, z_plus, k as u32);
    }
    let phi2 = phi_derivs[2];
    if phi2.norm() < 1e-300 {
        return Err(Error::DegenerateSaddle { x });
    }
    let mut z1 = phi2.sqrt().inv();
    // pin the square-root branch: f_0 = z_1 / sqrt((1-z_+^2)(x-z_+))
    // must equal e^{i pi/4} / sqrt(2 U)
    let g0 = (Complex64::ONE - z_plus * z_plus) * (Complex64::from(x) - z_plus);
    let f0 = z1 / g0.sqrt();
    let target = Complex64::from_polar(1.0 / (2.0 * u).sqrt(), std::f64::consts::FRAC_PI_4);
    if (f0 - target).norm() > (f0 + target).norm() {
        z1 = -z1;
    }
    Ok(SaddleData {
        z_plus,
        phi_derivs,
        z1,
        x,
    })
}

/// Coefficients of the reverted series `z = z_+ + sum_{k>=1} z_k w^k`
/// satisfying `phi(z(w)) - phi(z_+) = w^2/2` as a formal series.
///
/// Index `k` of the result holds `z_k`; entry `0` is zero. Coefficients
/// run through `z_{2j+2}` so the defining identity holds coefficientwise
/// through order `w^{2j+3}`.
pub fn z_coeffs(s: &SaddleData, j: usize) -> Result<Vec<Complex64>> {
    check_truncation(j)?;
    let m_top = 2 * j + 2;
    assert!(
        s.phi_derivs.len() > m_top,
        "saddle data truncated below the requested order"
    );
    let len = m_top + 2; // orders 0..=m_top+1
    let mut zc = vec![Complex64::ZERO; m_top + 1];
    zc[1] = s.z1;
    // factorials for phi_k / k!
    let mut inv_fact = vec![1.0f64; m_top + 2];
    for k in 2..inv_fact.len() {
        inv_fact[k] = inv_fact[k - 1] / k as f64;
    }
    for m in 2..=m_top {
        // residual of order w^{m+1} with z_m = 0
        let mut sser = series::zeros(len);
        for (k, &z) in zc.iter().enumerate().take(m) {
            sser[k] = z;
        }
        let mut spow = series::mul(&sser, &sser);
        let mut coef = Complex64::ZERO;
        for k in 2..=(m + 1) {
            coef += s.phi_derivs[k] * inv_fact[k] * spow[m + 1];
            if k < m + 1 {
                spow = series::mul(&spow, &sser);
            }
        }
        zc[m] = -coef / (s.phi_derivs[2] * s.z1);
    }
    Ok(zc)
}

/// The even integrand coefficients split into `c_j = p_j + i q_j`.
/// Fills only the `p`/`q` columns of the table.
pub fn c_coeffs(p: &JacobiParams, x: f64, j: usize) -> Result<CoeffTable> {
    let s = saddle(p, x, j)?;
    let zc = z_coeffs(&s, j)?;
    let cs = c_from_saddle(&s, &zc, j);
    Ok(CoeffTable {
        x,
        truncation: j,
        p: cs.iter().map(|c| c.re).collect(),
        q: cs.iter().map(|c| c.im).collect(),
        ..Default::default()
    })
}

/// Expands `f(w) = dz/dw / sqrt((1-z^2)(x-z))` along the reverted series
/// and forms `c_j = (2j-1)!! f_{2j} / f_0`.
pub(crate) fn c_from_saddle(s: &SaddleData, zc: &[Complex64], j: usize) -> Vec<Complex64> {
    let len = 2 * j + 1; // orders 0..=2j
    let mut sser = series::zeros(len);
    let mut dz = series::zeros(len);
    for k in 1..len.min(zc.len()) {
        sser[k] = zc[k];
    }
    for k in 0..len {
        if k + 1 < zc.len() {
            dz[k] = zc[k + 1] * (k + 1) as f64;
        }
    }
    let s2 = series::mul(&sser, &sser);
    let mut one_minus_z2 = series::zeros(len);
    one_minus_z2[0] = Complex64::ONE - s.z_plus * s.z_plus;
    for k in 1..len {
        one_minus_z2[k] = -2.0 * s.z_plus * sser[k] - s2[k];
    }
    let mut xmz = series::zeros(len);
    xmz[0] = Complex64::from(s.x) - s.z_plus;
    for k in 1..len {
        xmz[k] = -sser[k];
    }
    let g = series::mul(&one_minus_z2, &xmz);
    let h = series::sqrt(&g);
    let f = series::div(&dz, &h);
    (0..=j)
        .map(|jj| ODD_DOUBLE_FACTORIAL[jj] * f[2 * jj] / f[0])
        .collect()
}

/// Central-difference step for the coefficient derivatives, shrunk when
/// the evaluation point sits close to a turning point.
fn fd_step(p: &JacobiParams, x: f64) -> f64 {
    let h = p.span() * 1e-5;
    let edge = 0.25 * (x - p.x_minus).min(p.x_plus - x);
    h.min(edge).max(f64::MIN_POSITIVE)
}

/// `d p_j/dx`, `d q_j/dx` by fourth-order central differences of the
/// coefficient pipeline.
pub(crate) fn coeff_derivs(p: &JacobiParams, x: f64, j: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = fd_step(p, x);
    let tm2 = c_coeffs(p, x - 2.0 * h, j)?;
    let tm1 = c_coeffs(p, x - h, j)?;
    let tp1 = c_coeffs(p, x + h, j)?;
    let tp2 = c_coeffs(p, x + 2.0 * h, j)?;
    let d = |a: &[f64], b: &[f64], c: &[f64], e: &[f64]| -> Vec<f64> {
        (0..=j)
            .map(|k| (a[k] - 8.0 * b[k] + 8.0 * c[k] - e[k]) / (12.0 * h))
            .collect()
    };
    Ok((
        d(&tm2.p, &tm1.p, &tp1.p, &tp2.p),
        d(&tm2.q, &tm1.q, &tp1.q, &tp2.q),
    ))
}

/// `A'(x)/A(x)` for `A = 1/sqrt(w U)`.
fn a_log_deriv(p: &JacobiParams, x: f64, u: f64) -> f64 {
    let wpw = -p.alpha / (1.0 - x) + p.beta / (1.0 + x);
    let upu = -(x + p.sigma * p.tau) / (u * u);
    -0.5 * (wpw + upu)
}

/// Fills the derivative-expansion coefficients `r_j`, `s_j`.
pub fn rs_coeffs(table: &mut CoeffTable, p: &JacobiParams) -> Result<()> {
    let (pd, qd) = coeff_derivs(p, table.x, table.truncation)?;
    fill_rs(table, p, &pd, &qd)
}

fn fill_rs(table: &mut CoeffTable, p: &JacobiParams, pd: &[f64], qd: &[f64]) -> Result<()> {
    let x = table.x;
    let u = phase::u_func(p, x)?;
    let cp = phase::chi_prime(p, x)?;
    let aa = a_log_deriv(p, x, u);
    let j = table.truncation;
    table.r = vec![0.0; j + 1];
    table.s = vec![0.0; j + 1];
    table.r[0] = table.p[0];
    table.s[0] = table.q[0];
    for k in 1..=j {
        table.r[k] = table.p[k] - qd[k - 1] / cp - aa * table.q[k - 1] / cp;
        table.s[k] = table.q[k] + pd[k - 1] / cp + aa * table.p[k - 1] / cp;
    }
    Ok(())
}

/// Fills the scaled-derivative coefficients `m_j`, `n_j`.
pub fn mn_coeffs(table: &mut CoeffTable, p: &JacobiParams) -> Result<()> {
    let (pd, qd) = coeff_derivs(p, table.x, table.truncation)?;
    fill_mn(table, p, &pd, &qd)
}

fn fill_mn(table: &mut CoeffTable, p: &JacobiParams, pd: &[f64], qd: &[f64]) -> Result<()> {
    let x = table.x;
    let u = phase::u_func(p, x)?;
    let px = (1.0 - x * x) / u;
    let qx = ((1.0 - x * x) * (x + p.sigma * p.tau) - 2.0 * x * u * u) / (2.0 * u * u * u);
    let j = table.truncation;
    table.m = vec![0.0; j + 1];
    table.nn = vec![0.0; j + 1];
    table.m[0] = table.p[0];
    table.nn[0] = table.q[0];
    for k in 1..=j {
        table.m[k] = table.p[k] - px * qd[k - 1] - qx * table.q[k - 1];
        table.nn[k] = table.q[k] + px * pd[k - 1] + qx * table.p[k - 1];
    }
    Ok(())
}

/// One-shot table with `p`, `q`, `r`, `s`, `m`, `n` sharing a single set
/// of finite-difference evaluations.
pub fn full_table(p: &JacobiParams, x: f64, j: usize) -> Result<CoeffTable> {
    let mut table = c_coeffs(p, x, j)?;
    let (pd, qd) = coeff_derivs(p, x, j)?;
    fill_rs(&mut table, p, &pd, &qd)?;
    fill_mn(&mut table, p, &pd, &qd)?;
    Ok(table)
}

/// Closed forms for the first reversion and integrand coefficients, kept
/// as an independent cross-check of the generic machinery. Two details
/// are corrected relative to their usual printed shape: the `z_4` form
/// needs `phi_3^3` (not `phi_3^2`) in its last term, and the `c_1`
/// prefactor is `1/(8 z_1 ...)` rather than `-z_+/(8 z_1 ...)`; both
/// follow from dimensional consistency and are confirmed against the
/// reversion identity.
pub mod closed_form {
    use super::SaddleData;
    use num_complex::Complex64;

    /// `z_2 = -z_1^4 phi_3 / 6`.
    pub fn z2(s: &SaddleData) -> Complex64 {
        let z1 = s.z1;
        -z1.powu(4) * s.phi_derivs[3] / 6.0
    }

    /// `z_3 = z_1^5 (5 z_1^2 phi_3^2 - 3 phi_4) / 72`.
    pub fn z3(s: &SaddleData) -> Complex64 {
        let z1 = s.z1;
        let p3 = s.phi_derivs[3];
        let p4 = s.phi_derivs[4];
        z1.powu(5) * (5.0 * z1 * z1 * p3 * p3 - 3.0 * p4) / 72.0
    }

    /// `z_4 = -z_1^6 (9 phi_5 - 45 z_1^2 phi_3 phi_4 + 40 z_1^4 phi_3^3) / 1080`.
    pub fn z4(s: &SaddleData) -> Complex64 {
        let z1 = s.z1;
        let p3 = s.phi_derivs[3];
        let p4 = s.phi_derivs[4];
        let p5 = s.phi_derivs[5];
        -z1.powu(6) * (9.0 * p5 - 45.0 * z1 * z1 * p3 * p4 + 40.0 * z1.powu(4) * p3.powu(3))
            / 1080.0
    }

    /// The 24-term polynomial form of `c_1`.
    pub fn c1(s: &SaddleData, zc: &[Complex64]) -> Complex64 {
        let (z1, z2, z3) = (zc[1], zc[2], zc[3]);
        let zp = s.z_plus;
        let x = Complex64::from(s.x());
        let t = -6.0 * z1.powu(3) * zp.powu(2)
            + 3.0 * z1.powu(3)
            - 72.0 * z1 * z2 * zp.powu(2) * x
            + 24.0 * z1 * zp * z2 * x * x
            - 24.0 * z1 * zp.powu(3) * z2 * x * x
            - 48.0 * z3 * x * zp
            - 48.0 * z3 * zp.powu(2) * x * x
            + 96.0 * z3 * zp.powu(3) * x
            + 24.0 * z3 * zp.powu(4) * x * x
            - 48.0 * z3 * zp.powu(5) * x
            - 12.0 * z1 * zp * z2
            + 48.0 * z1 * zp.powu(3) * z2
            - 48.0 * z3 * zp.powu(4)
            + 24.0 * z3 * zp.powu(6)
            + 12.0 * z1 * z2 * x
            - 36.0 * z1 * z2 * zp.powu(5)
            - 4.0 * z1.powu(3) * x * zp
            + 8.0 * z1.powu(3) * zp.powu(2) * x * x
            - 20.0 * z1.powu(3) * zp.powu(3) * x
            + 4.0 * z1.powu(3) * x * x
            + 15.0 * z1.powu(3) * zp.powu(4)
            + 24.0 * z3 * x * x
            + 24.0 * z3 * zp.powu(2)
            + 60.0 * z1 * z2 * zp.powu(4) * x;
        let denom = 8.0 * z1 * (Complex64::ONE - zp * zp).powu(2) * (x - zp).powu(2);
        t / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::JacobiParams;
    use num_complex::Complex64 as C;

    fn ex1() -> JacobiParams {
        JacobiParams::new(25, 50.0, 41.0).unwrap()
    }

    #[test]
    fn saddle_kills_first_derivative() {
        let p = ex1();
        for &x in &[-0.7415548, -0.5, 0.0, 0.3, 0.55] {
            let s = saddle(&p, x, 3).unwrap();
            let d1 = phi_deriv(&p, x, s.z_plus, 1);
            let scale = (s.phi_derivs[2] * s.z_plus).norm();
            assert!(
                d1.norm() <= 1e-12 * scale.max(1.0),
                "phi'(z_+) = {d1} at x = {x}"
            );
            assert!(s.z_plus.im > 0.0);
        }
    }

    #[test]
    fn saddle_legendre_origin_is_i() {
        let p = JacobiParams::new(30, 0.0, 0.0).unwrap();
        let s = saddle(&p, 0.0, 2).unwrap();
        assert!((s.z_plus - C::i()).norm() < 1e-15);
    }

    #[test]
    fn saddle_fig1_origin_formula() {
        let p = JacobiParams::new(125, 90.0, 75.0).unwrap();
        let s = saddle(&p, 0.0, 2).unwrap();
        let u0 = (1.0 - p.sigma * p.sigma - p.tau * p.tau).sqrt();
        let want = C::new(-p.tau, u0) / (1.0 + p.sigma);
        assert!((s.z_plus - want).norm() < 1e-15);
    }

    #[test]
    fn saddle_rejects_turning_points() {
        let p = ex1();
        assert!(saddle(&p, p.x_plus, 3).is_err());
        assert!(saddle(&p, p.x_minus, 3).is_err());
    }

    #[test]
    fn f0_branch_is_pinned() {
        let p = ex1();
        for &x in &[-0.7, -0.2, 0.1, 0.5] {
            let s = saddle(&p, x, 3).unwrap();
            let g0 = (C::ONE - s.z_plus * s.z_plus) * (C::from(x) - s.z_plus);
            let f0 = s.z1 / g0.sqrt();
            let u = crate::phase::u_func(&p, x).unwrap();
            let target = C::from_polar(1.0 / (2.0 * u).sqrt(), std::f64::consts::FRAC_PI_4);
            assert!(
                (f0 - target).norm() <= 1e-12 * target.norm(),
                "f0 branch off at x = {x}"
            );
        }
    }

    #[test]
    fn reversion_identity_holds() {
        let p = ex1();
        let j = 3;
        let s = saddle(&p, -0.5, j).unwrap();
        let zc = z_coeffs(&s, j).unwrap();
        let top = 2 * j + 3;
        let len = top + 1;
        let mut sser = series::zeros(len);
        for (k, &z) in zc.iter().enumerate() {
            sser[k] = z;
        }
        let mut inv_fact = vec![1.0f64; len + 1];
        for k in 2..inv_fact.len() {
            inv_fact[k] = inv_fact[k - 1] / k as f64;
        }
        let mut total = series::zeros(len);
        let mut spow = series::mul(&sser, &sser);
        for k in 2..=top {
            for (t, &sp) in total.iter_mut().zip(spow.iter()) {
                *t += s.phi_derivs[k] * inv_fact[k] * sp;
            }
            if k < top {
                spow = series::mul(&spow, &sser);
            }
        }
        total[2] -= C::from(0.5);
        let scale = s.phi_derivs[2].norm();
        for (k, c) in total.iter().enumerate() {
            assert!(
                c.norm() <= 1e-12 * scale,
                "reversion residual {c} at order {k}"
            );
        }
    }

    #[test]
    fn closed_forms_match_generic_reversion() {
        let p = ex1();
        let s = saddle(&p, -0.5, 3).unwrap();
        let zc = z_coeffs(&s, 3).unwrap();
        let checks = [
            (closed_form::z2(&s), zc[2]),
            (closed_form::z3(&s), zc[3]),
            (closed_form::z4(&s), zc[4]),
        ];
        for (want, got) in checks {
            assert!(
                (want - got).norm() <= 1e-11 * got.norm(),
                "closed form {want} vs generic {got}"
            );
        }
        let cs = c_from_saddle(&s, &zc, 3);
        let c1 = closed_form::c1(&s, &zc);
        assert!(
            (c1 - cs[1]).norm() <= 1e-10 * cs[1].norm(),
            "c1 closed {c1} vs generic {}",
            cs[1]
        );
    }

    #[test]
    fn first_coefficients_are_unit() {
        let p = ex1();
        let t = c_coeffs(&p, -0.5, 3).unwrap();
        assert_eq!(t.p[0], 1.0);
        assert_eq!(t.q[0], 0.0);
    }

    #[test]
    fn example_1_c1_frozen_value() {
        // frozen from a 40-digit evaluation of the reversion pipeline
        let p = ex1();
        let t = c_coeffs(&p, -0.5, 3).unwrap();
        assert!((t.p[1] - 0.028868526284381763).abs() < 1e-12);
        assert!((t.q[1] - 0.2598298277366645).abs() < 1e-12);
    }

    #[test]
    fn conjugate_saddle_gives_conjugate_coefficients() {
        let p = ex1();
        let x = -0.3;
        let j = 3;
        let s = saddle(&p, x, j).unwrap();
        let conj = SaddleData {
            z_plus: s.z_plus.conj(),
            phi_derivs: s.phi_derivs.iter().map(|d| d.conj()).collect(),
            z1: s.z1.conj(),
            x,
        };
        let zc = z_coeffs(&s, j).unwrap();
        let zc_conj = z_coeffs(&conj, j).unwrap();
        for (a, b) in zc.iter().zip(&zc_conj) {
            assert!((a.conj() - b).norm() < 1e-13 * (a.norm() + 1e-30));
        }
        let cs = c_from_saddle(&s, &zc, j);
        let cs_conj = c_from_saddle(&conj, &zc_conj, j);
        for (a, b) in cs.iter().zip(&cs_conj) {
            assert!((a.re - b.re).abs() <= 1e-12 * a.norm().max(1.0));
            assert!((a.im + b.im).abs() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn rs_first_coefficients() {
        let p = ex1();
        let mut t = c_coeffs(&p, -0.5, 3).unwrap();
        rs_coeffs(&mut t, &p).unwrap();
        assert_eq!(t.r[0], 1.0);
        assert_eq!(t.s[0], 0.0);
        assert_eq!(t.r[1], t.p[1]);
        // s_1 = q_1 + A'/(A chi') with the logarithmic derivative analytic
        let u = crate::phase::u_func(&p, -0.5).unwrap();
        let cp = crate::phase::chi_prime(&p, -0.5).unwrap();
        let aa = a_log_deriv(&p, -0.5, u);
        assert!((t.s[1] - (t.q[1] + aa / cp)).abs() < 1e-12 * t.s[1].abs().max(1.0));
    }

    #[test]
    fn mn_first_coefficients() {
        let p = ex1();
        let x = -0.5;
        let mut t = c_coeffs(&p, x, 3).unwrap();
        mn_coeffs(&mut t, &p).unwrap();
        assert_eq!(t.m[0], 1.0);
        assert_eq!(t.nn[0], 0.0);
        // q_0 = 0 kills two terms of m_1; p_0 = 1 leaves q(x) in n_1
        assert_eq!(t.m[1], t.p[1]);
        let u = crate::phase::u_func(&p, x).unwrap();
        let qx =
            ((1.0 - x * x) * (x + p.sigma * p.tau) - 2.0 * x * u * u) / (2.0 * u * u * u);
        assert!((t.nn[1] - (t.q[1] + qx)).abs() < 1e-12 * t.nn[1].abs().max(1.0));
    }

    #[test]
    fn full_table_matches_individual_fills() {
        let p = ex1();
        let x = 0.2;
        let full = full_table(&p, x, 3).unwrap();
        let mut t = c_coeffs(&p, x, 3).unwrap();
        rs_coeffs(&mut t, &p).unwrap();
        mn_coeffs(&mut t, &p).unwrap();
        assert_eq!(full.r, t.r);
        assert_eq!(full.s, t.s);
        assert_eq!(full.m, t.m);
        assert_eq!(full.nn, t.nn);
    }

    #[test]
    fn rejects_oversized_truncation() {
        let p = ex1();
        assert!(c_coeffs(&p, 0.0, 7).is_err());
    }
}
