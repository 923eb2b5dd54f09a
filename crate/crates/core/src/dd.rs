//! Double-double arithmetic: unevaluated sums of two `f64`s giving about
//! 32 significant digits. Algorithms are the classic error-free
//! transformations (Dekker splitting, Knuth two-sum) plus the usual
//! exp/ln/log-gamma built on them. This backs the validation oracle and
//! the log-gamma factors of the weight normalization.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// A double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub const fn new(hi: f64, lo: f64) -> Self {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    #[inline]
    pub fn from_u32(v: u32) -> Self {
        Dd {
            hi: v as f64,
            lo: 0.0,
        }
    }

    /// Exact product of two `f64`s.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        Dd { hi: p, lo: e }
    }

    /// Exact sum of two `f64`s.
    #[inline]
    pub fn from_sum(a: f64, b: f64) -> Self {
        let (s, e) = two_sum(a, b);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    #[inline]
    pub fn is_sign_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }

    #[inline]
    pub fn add_f64(self, b: f64) -> Self {
        let (s1, s2) = two_sum(self.hi, b);
        let (r1, r2) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi: r1, lo: r2 }
    }

    #[inline]
    pub fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let (r1, r2) = quick_two_sum(p1, p2 + self.lo * b);
        Dd { hi: r1, lo: r2 }
    }

    #[inline]
    pub fn div_f64(self, b: f64) -> Self {
        self / Dd::from_f64(b)
    }

    /// Exact scaling by a power of two (no rounding while in range).
    #[inline]
    pub fn ldexp(self, k: i32) -> Self {
        let f = exp2i(k);
        Dd {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    pub fn recip(self) -> Self {
        Dd::ONE / self
    }

    pub fn sqr(self) -> Self {
        let (p1, mut p2) = two_prod(self.hi, self.hi);
        p2 += 2.0 * self.hi * self.lo;
        p2 += self.lo * self.lo;
        let (r1, r2) = quick_two_sum(p1, p2);
        Dd { hi: r1, lo: r2 }
    }

    pub fn sqrt(self) -> Self {
        if self.is_zero() {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0, "sqrt of a negative double-double");
        // Karp's trick: one Newton step on the f64 approximation carried
        // out in double-double.
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let err = self - Dd::from_prod(ax, ax);
        Dd::from_f64(ax).add_f64(err.hi * (x * 0.5))
    }

    /// Integer power by binary exponentiation.
    pub fn powi(self, mut e: i32) -> Self {
        if e == 0 {
            return Dd::ONE;
        }
        let invert = e < 0;
        e = e.abs();
        let mut base = self;
        let mut acc = Dd::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base.sqr();
            e >>= 1;
        }
        if invert {
            acc.recip()
        } else {
            acc
        }
    }

    pub fn exp(self) -> Self {
        if self.hi <= -709.0 {
            return Dd::ZERO;
        }
        if self.hi >= 709.0 {
            return Dd::new(f64::INFINITY, 0.0);
        }
        if self.is_zero() {
            return Dd::ONE;
        }
        let m = (self.hi / LN2.hi).round();
        // r = (a - m ln2) / 512, |r| small enough for a short Taylor sum
        let r = (self - LN2.mul_f64(m)).ldexp(-9);
        let mut p = r.sqr();
        let mut s = r + p.mul_f64(0.5);
        p = p * r;
        let mut t = p * INV_FACT[0];
        let mut i = 0usize;
        loop {
            s = s + t;
            p = p * r;
            i += 1;
            if i >= INV_FACT.len() {
                break;
            }
            t = p * INV_FACT[i];
            if t.hi.abs() <= 1e-35 {
                s = s + t;
                break;
            }
        }
        // undo the 2^9 argument reduction: s holds exp(r) - 1
        for _ in 0..9 {
            s = s.mul_f64(2.0) + s.sqr();
        }
        s.add_f64(1.0).ldexp(m as i32)
    }

    pub fn ln(self) -> Self {
        debug_assert!(self.hi > 0.0, "ln of a non-positive double-double");
        if self.hi == 1.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        // Newton iteration on exp(y) = x from the f64 logarithm; each
        // step doubles the correct digits.
        let mut y = Dd::from_f64(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - Dd::ONE;
        }
        y
    }
}

#[inline]
fn exp2i(k: i32) -> f64 {
    f64::from_bits(((1023 + k) as u64) << 52)
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (r1, r2) = quick_two_sum(s1, s2 + t2);
        Dd { hi: r1, lo: r2 }
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, b: Dd) -> Dd {
        let (p1, mut p2) = two_prod(self.hi, b.hi);
        p2 += self.hi * b.lo + self.lo * b.hi;
        let (r1, r2) = quick_two_sum(p1, p2);
        Dd { hi: r1, lo: r2 }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        debug_assert!(b.hi != 0.0, "double-double division by zero");
        let q1 = self.hi / b.hi;
        let mut r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s1, s2) = quick_two_sum(q1, q2);
        Dd { hi: s1, lo: s2 }.add_f64(q3)
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Self) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd::from_f64(v)
    }
}

// B_{2k}/(2k(2k-1)) for the Stirling tail, k = 1..=15
const STIRLING: [Dd; 15] = [
    Dd::new(0.08333333333333333, 4.625929269271485e-18),
    Dd::new(-0.002777777777777778, 1.0601087908747154e-19),
    Dd::new(0.0007936507936507937, 6.883823317368282e-22),
    Dd::new(-0.0005952380952380953, 5.36938218754726e-20),
    Dd::new(0.0008417508417508417, 3.6870174889237694e-20),
    Dd::new(-0.0019175269175269176, 1.0675702776872475e-19),
    Dd::new(0.00641025641025641, 2.2240044563805217e-19),
    Dd::new(-0.029550653594771242, 4.861760957508855e-19),
    Dd::new(0.17964437236883057, -6.401600482710946e-19),
    Dd::new(-1.3924322169059011, 1.5837056989230303e-17),
    Dd::new(13.402864044168393, -6.154114101993966e-16),
    Dd::new(-156.84828462600203, 9.391823141715389e-15),
    Dd::new(2193.1033333333335, -1.3339255626002948e-13),
    Dd::new(-36108.77125372499, 5.897583353514365e-13),
    Dd::new(691472.268851313, 2.5585296305158e-11),
];

// 1/k! for k = 3..=17
const INV_FACT: [Dd; 15] = [
    Dd::new(0.16666666666666666, 9.25185853854297e-18),
    Dd::new(0.041666666666666664, 2.3129646346357427e-18),
    Dd::new(0.008333333333333333, 1.1564823173178714e-19),
    Dd::new(0.001388888888888889, -5.300543954373577e-20),
    Dd::new(0.0001984126984126984, 1.7209558293420705e-22),
    Dd::new(2.48015873015873e-05, 2.1511947866775882e-23),
    Dd::new(2.7557319223985893e-06, -1.858393274046472e-22),
    Dd::new(2.755731922398589e-07, 2.3767714622250297e-23),
    Dd::new(2.505210838544172e-08, -1.448814070935912e-24),
    Dd::new(2.08767569878681e-09, -1.20734505911326e-25),
    Dd::new(1.6059043836821613e-10, 1.2585294588752098e-26),
    Dd::new(1.1470745597729725e-11, 2.0655512752830745e-28),
    Dd::new(7.647163731819816e-13, 7.03872877733453e-30),
    Dd::new(4.779477332387385e-14, 4.399205485834081e-31),
    Dd::new(2.8114572543455206e-15, 1.6508842730861433e-31),
];

pub(crate) const LN2: Dd = Dd::new(0.6931471805599453, 2.3190468138462996e-17);
pub(crate) const HALF_LN_2PI: Dd = Dd::new(0.9189385332046728, -3.8782941580672414e-17);

/// Degree above which the Stirling tail reaches double-double accuracy.
const STIRLING_CUT: f64 = 40.0;

/// `ln Gamma(z)` for `z > 0` at double-double accuracy: upward recurrence
/// into the Stirling range, then the Bernoulli tail.
pub fn lgamma(z: Dd) -> Dd {
    assert!(z.hi > 0.0, "lgamma requires a positive argument");
    let mut shift = Dd::ZERO;
    let mut zz = z;
    while zz.hi < STIRLING_CUT {
        shift = shift + zz.ln();
        zz = zz.add_f64(1.0);
    }
    stirling_main(zz) + stirling_tail(zz) - shift
}

fn stirling_main(z: Dd) -> Dd {
    (z - Dd::new(0.5, 0.0)) * z.ln() - z + HALF_LN_2PI
}

fn stirling_tail(z: Dd) -> Dd {
    let inv = z.recip();
    let inv2 = inv.sqr();
    let mut acc = STIRLING[STIRLING.len() - 1];
    for k in (0..STIRLING.len() - 1).rev() {
        acc = acc * inv2 + STIRLING[k];
    }
    acc * inv
}

/// `ln Gamma*(z)` where `Gamma*(z) = sqrt(z/(2 pi)) e^z z^{-z} Gamma(z)`,
/// the scaled gamma function tending to 1 at infinity.
pub fn ln_gamma_star(z: Dd) -> Dd {
    assert!(z.hi > 0.0, "ln_gamma_star requires a positive argument");
    if z.hi >= STIRLING_CUT {
        stirling_tail(z)
    } else {
        lgamma(z) - stirling_main(z)
    }
}

/// Formats a double-double with `digits` significant decimal digits
/// (capped at 32) in scientific notation.
pub fn to_decimal_string(v: Dd, digits: usize) -> String {
    let digits = digits.clamp(1, 32);
    if v.hi.is_nan() {
        return "NaN".to_string();
    }
    if v.hi.is_infinite() {
        return if v.hi > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if v.is_zero() {
        return format!("{:.*e}", digits - 1, 0.0);
    }
    let neg = v.is_sign_negative();
    let mut r = v.abs();
    let mut e10: i32 = r.hi.abs().log10().floor() as i32;
    let ten = Dd::new(10.0, 0.0);
    r = r / ten.powi(e10);
    while r.hi >= 10.0 {
        r = r / ten;
        e10 += 1;
    }
    while r.hi < 1.0 {
        r = r * ten;
        e10 -= 1;
    }
    let mut ds: Vec<u8> = Vec::with_capacity(digits + 1);
    for _ in 0..=digits {
        let d = (r.hi.floor() as i64).clamp(0, 9) as u8;
        ds.push(d);
        r = (r - Dd::from_f64(d as f64)) * ten;
    }
    // round on the guard digit
    if ds[digits] >= 5 {
        let mut i = digits;
        loop {
            if i == 0 {
                // 9.99... rolled over
                ds.insert(0, 1);
                for d in ds.iter_mut().skip(1) {
                    *d = 0;
                }
                e10 += 1;
                break;
            }
            i -= 1;
            if ds[i] == 9 {
                ds[i] = 0;
            } else {
                ds[i] += 1;
                break;
            }
        }
    }
    ds.truncate(digits);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push((b'0' + ds[0]) as char);
    if digits > 1 {
        out.push('.');
        for &d in &ds[1..] {
            out.push((b'0' + d) as char);
        }
    }
    out.push('e');
    out.push_str(&e10.to_string());
    out
}
