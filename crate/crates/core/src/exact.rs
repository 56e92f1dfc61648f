//! Exact integer, rational and Gaussian-rational arithmetic.
//!
//! Everything downstream of the element matrices is built on these types so
//! that series coefficients stay exact up to the point where they are handed
//! to the numeric layer. Rationals are kept in lowest terms with positive
//! denominator after every operation, which makes equality structural.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Arbitrary-precision integer.
pub type Int = BigInt;

/// Arbitrary-precision rational, always normalized.
pub type Rational = BigRational;

/// Shorthand for a rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Int::from(num), Int::from(den))
}

/// Rational from an integer.
pub fn rat_int(num: i64) -> Rational {
    Rational::from_integer(Int::from(num))
}

/// Binomial coefficient C(n, k); zero for k < 0 or k > n.
pub fn binomial(n: usize, k: i64) -> Int {
    if k < 0 || k as usize > n {
        return Int::zero();
    }
    let k = k as usize;
    let k = k.min(n - k);
    let mut acc = Int::one();
    for i in 0..k {
        acc = acc * Int::from(n - i) / Int::from(i + 1);
    }
    acc
}

/// n! as a big integer.
pub fn factorial(n: usize) -> Int {
    let mut acc = Int::one();
    for i in 2..=n {
        acc *= Int::from(i);
    }
    acc
}

/// Double factorial n!! = n (n-2) (n-4) ... with (-1)!! = 0!! = 1.
///
/// The n = -1 case keeps formulas involving (2p-3)!! total at p = 1.
pub fn double_factorial(n: i64) -> Int {
    assert!(n >= -1, "double factorial needs n >= -1");
    let mut acc = Int::one();
    let mut m = n;
    while m >= 2 {
        acc *= Int::from(m);
        m -= 2;
    }
    acc
}

/// Integer power with unsigned exponent.
pub fn int_pow(base: i64, exp: usize) -> Int {
    num_traits::pow::pow(Int::from(base), exp)
}

/// Render a rational to the nearest f64.
///
/// Scales numerator and denominator into the exactly-representable range
/// first, so values like (p!/(2p)!)^2 for large p do not overflow to NaN.
pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let num_bits = r.numer().bits() as i64;
    let den_bits = r.denom().bits() as i64;
    // Keep ~80 bits of headroom in both operands.
    let shift = (num_bits.max(den_bits) - 900).max(0) as u64;
    let num = r.numer() >> shift;
    let den = r.denom() >> shift;
    match (num.to_f64(), den.to_f64()) {
        (Some(n), Some(d)) if d != 0.0 && n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Fall back to an exponent-split evaluation.
            let nb = r.numer().bits() as i64;
            let db = r.denom().bits() as i64;
            let ns = (nb - 500).max(0) as u64;
            let ds = (db - 500).max(0) as u64;
            let n = (r.numer() >> ns).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> ds).to_f64().unwrap_or(f64::NAN);
            n / d * 2f64.powi(ns as i32 - ds as i32)
        }
    }
}

/// Exact element of Q(i): re + im * i with rational parts.
#[derive(Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn one() -> Self {
        Self::new(Rational::one(), Rational::zero())
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::new(Rational::zero(), Rational::one())
    }

    pub fn from_rational(re: Rational) -> Self {
        Self::new(re, Rational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_int(n))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Complex conjugate; an involution.
    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Multiply by the imaginary unit.
    pub fn mul_i(&self) -> Self {
        Self::new(-self.im.clone(), self.re.clone())
    }

    /// |z|^2 = z * conj(z), a rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Exact division; fails on a zero divisor.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::DegenerateInput(
                "division of Gaussian rationals by zero".into(),
            ));
        }
        let n = rhs.norm_sqr();
        let prod = self * &rhs.conj();
        Ok(Self::new(prod.re / &n, prod.im / n))
    }

    pub fn to_complex(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(to_f64(&self.re), to_f64(&self.im))
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}{}i", self.re, self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: Self) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

impl Div for &GaussianRational {
    type Output = GaussianRational;
    /// Panics on a zero divisor; use [`GaussianRational::checked_div`] to
    /// surface the error instead.
    fn div(self, rhs: Self) -> GaussianRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

/// Sign of a big integer as -1, 0, 1 for closed-form parity factors.
pub fn sign_i64(n: &Int) -> i64 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
