//! Extended-range real scalar.
//!
//! A [`LogScalar`] stores `sign · m · 2^e` with `m ∈ [1, 2)` and an `i64`
//! binary exponent, so magnitudes such as `2^(-2^40)` survive products,
//! quotients and sums. Conversion to and from `f64` is exact whenever the
//! value is representable as a normal float.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Largest binary exponent magnitude accepted by the constructors.
pub const MAX_EXPONENT: i64 = 1 << 60;

/// Exponent differences beyond this leave the smaller addend below the
/// mantissa resolution.
const ALIGN_CUTOFF: i64 = 64;

#[derive(Clone, Copy, Debug)]
pub struct LogScalar {
    sign: i8,
    mant: f64,
    exp: i64,
}

impl LogScalar {
    pub const ZERO: Self = Self { sign: 0, mant: 1.0, exp: 0 };
    pub const ONE: Self = Self { sign: 1, mant: 1.0, exp: 0 };

    /// Builds the value from an `f64`; non-finite inputs map to a saturated
    /// magnitude with the input's sign.
    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 || x.is_nan() {
            return Self::ZERO;
        }
        let sign = if x < 0.0 { -1 } else { 1 };
        if x.is_infinite() {
            return Self { sign, mant: 1.0, exp: MAX_EXPONENT };
        }
        let (m, e) = frexp(libm::fabs(x));
        Self { sign, mant: m, exp: e }
    }

    /// Positive value `2^l`. `l = -inf` gives zero.
    pub fn exp2(l: f64) -> Self {
        if l == f64::NEG_INFINITY || l.is_nan() {
            return Self::ZERO;
        }
        if l == f64::INFINITY || l >= MAX_EXPONENT as f64 {
            return Self { sign: 1, mant: 1.0, exp: MAX_EXPONENT };
        }
        if l <= -(MAX_EXPONENT as f64) {
            return Self::ZERO;
        }
        let e = libm::floor(l);
        Self::normalized(1, libm::exp2(l - e), e as i64)
    }

    /// Positive value `2^(hi + lo)` where `hi + lo` is an unevaluated sum;
    /// keeps the fractional digits of `lo` when `hi` is huge.
    pub fn exp2_split(hi: f64, lo: f64) -> Self {
        if hi == f64::NEG_INFINITY || lo == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if !hi.is_finite() || hi.abs() >= MAX_EXPONENT as f64 {
            return Self::exp2(hi);
        }
        let e = libm::floor(hi);
        let frac = (hi - e) + lo;
        let e2 = libm::floor(frac);
        Self::normalized(1, libm::exp2(frac - e2), e as i64 + e2 as i64)
    }

    /// Positive value `e^x`.
    pub fn exp(x: f64) -> Self {
        if x == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        // split x·log2(e) into an exactly representable head and a tail
        let hi = x * core::f64::consts::LOG2_E;
        let lo = libm::fma(x, core::f64::consts::LOG2_E, -hi);
        Self::exp2_split(hi, lo)
    }

    fn normalized(sign: i8, mant: f64, exp: i64) -> Self {
        if sign == 0 || mant == 0.0 {
            return Self::ZERO;
        }
        let (m, e) = frexp(mant);
        let exp = exp.saturating_add(e);
        if exp <= -MAX_EXPONENT {
            return Self::ZERO;
        }
        Self { sign, mant: m, exp: exp.min(MAX_EXPONENT) }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_positive(self) -> bool {
        self.sign > 0
    }

    /// Base-2 logarithm of the magnitude; `-inf` for zero.
    pub fn log2_mag(self) -> f64 {
        if self.sign == 0 {
            return f64::NEG_INFINITY;
        }
        self.exp as f64 + libm::log2(self.mant)
    }

    /// Natural logarithm of the magnitude; `-inf` for zero.
    pub fn ln_mag(self) -> f64 {
        if self.sign == 0 {
            return f64::NEG_INFINITY;
        }
        self.exp as f64 * core::f64::consts::LN_2 + libm::log(self.mant)
    }

    /// Mantissa in `[1, 2)` and exponent of the magnitude.
    pub fn parts(self) -> (f64, i64) {
        (self.mant, self.exp)
    }

    /// Nearest `f64`; saturates to `±inf` or flushes to `±0`.
    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let s = self.sign as f64;
        if self.exp > 1023 {
            return s * f64::INFINITY;
        }
        if self.exp < -1080 {
            return s * 0.0;
        }
        s * ldexp(self.mant, self.exp as i32)
    }

    pub fn abs(self) -> Self {
        Self { sign: self.sign.abs(), ..self }
    }

    /// `|self|^p` for `p` real; `0^p = 0` for `p > 0` and `1` for `p = 0`.
    pub fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return if p > 0.0 { Self::ZERO } else { Self::exp2(f64::INFINITY) };
        }
        let e = self.exp as f64;
        let hi = p * e;
        let lo = libm::fma(p, e, -hi) + p * libm::log2(self.mant);
        Self::exp2_split(hi, lo)
    }

    /// `|self|^k` for integer `k`, exact in the exponent.
    pub fn powi(self, k: i32) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        if self.sign == 0 {
            return Self::ZERO;
        }
        self.powf(k as f64)
    }

    pub fn sqrt(self) -> Self {
        if self.sign <= 0 {
            return Self::ZERO;
        }
        let half = self.exp.div_euclid(2);
        let odd = self.exp.rem_euclid(2);
        let m = libm::sqrt(self.mant * if odd == 1 { 2.0 } else { 1.0 });
        Self::normalized(1, m, half)
    }

    /// Multiplies by `2^k`.
    pub fn scale2(self, k: i64) -> Self {
        if self.sign == 0 {
            return self;
        }
        Self::normalized(self.sign, self.mant, self.exp.saturating_add(k))
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Relative difference `|a − b| / max(|a|, |b|)`; zero when both vanish.
    pub fn rel_diff(self, other: Self) -> f64 {
        let scale = self.abs().max(other.abs());
        if scale.is_zero() {
            return 0.0;
        }
        ((self - other).abs() / scale).to_f64()
    }
}

fn frexp(x: f64) -> (f64, i64) {
    // returns m in [1,2) with x = m·2^e
    let (m, e) = libm::frexp(x);
    (m * 2.0, e as i64 - 1)
}

fn ldexp(m: f64, e: i32) -> f64 {
    libm::ldexp(m, e)
}

impl Default for LogScalar {
    fn default() -> Self {
        Self::ZERO
    }
}

impl From<f64> for LogScalar {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl PartialEq for LogScalar {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.sign != other.sign {
            return self.sign.partial_cmp(&other.sign);
        }
        if self.sign == 0 {
            return Some(Ordering::Equal);
        }
        let mag = self.exp.cmp(&other.exp).then(self.mant.partial_cmp(&other.mant)?);
        Some(if self.sign > 0 { mag } else { mag.reverse() })
    }
}

impl Neg for LogScalar {
    type Output = Self;
    fn neg(self) -> Self {
        Self { sign: -self.sign, ..self }
    }
}

impl Mul for LogScalar {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        Self::normalized(self.sign * rhs.sign, self.mant * rhs.mant, self.exp.saturating_add(rhs.exp))
    }
}

impl Div for LogScalar {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return Self::ZERO;
        }
        if rhs.sign == 0 {
            return Self { sign: self.sign, mant: 1.0, exp: MAX_EXPONENT };
        }
        Self::normalized(self.sign * rhs.sign, self.mant / rhs.mant, self.exp.saturating_sub(rhs.exp))
    }
}

impl Add for LogScalar {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.sign == 0 {
            return rhs;
        }
        if rhs.sign == 0 {
            return self;
        }
        let (big, small) = if (self.exp, self.mant) >= (rhs.exp, rhs.mant) { (self, rhs) } else { (rhs, self) };
        let d = big.exp - small.exp;
        if d > ALIGN_CUTOFF {
            return big;
        }
        let shifted = ldexp(small.mant, -(d as i32));
        let m = if big.sign == small.sign { big.mant + shifted } else { big.mant - shifted };
        Self::normalized(big.sign, m, big.exp)
    }
}

impl Sub for LogScalar {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl core::iter::Sum for LogScalar {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        let v: alloc::vec::Vec<Self> = iter.collect();
        pairwise_sum(&v)
    }
}

/// Pairwise summation over the slice in index order; the reduction tree
/// depends only on the length.
pub fn pairwise_sum(xs: &[LogScalar]) -> LogScalar {
    match xs.len() {
        0 => LogScalar::ZERO,
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Pairwise summation of plain floats, same tree shape as [`pairwise_sum`].
pub fn pairwise_sum_f64(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => {
            let mid = n / 2;
            pairwise_sum_f64(&xs[..mid]) + pairwise_sum_f64(&xs[mid..])
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => {
                let v = self.to_f64();
                if v.is_finite() && v != 0.0 {
                    write!(f, "{v:e}")
                } else {
                    write!(f, "{}2^{}", if s < 0 { "-" } else { "" }, self.log2_mag())
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    sign: i8,
    log2_mag: f64,
}

impl Serialize for LogScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let log2_mag = if self.sign == 0 { 0.0 } else { self.log2_mag() };
        Wire { sign: self.sign, log2_mag }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let w = Wire::deserialize(d)?;
        Ok(match w.sign {
            0 => Self::ZERO,
            s if s < 0 => -Self::exp2(w.log2_mag),
            _ => Self::exp2(w.log2_mag),
        })
    }
}
