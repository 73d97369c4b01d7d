//! Scalar backends.
//!
//! Two implementations of [`Scalar`] are provided: [`Rational`] (exact,
//! canonical fractions) and [`BigFloat`] (binary floating point with a fixed
//! mantissa width per computation). Vectors are generic over the backend, so
//! mixing backends is a type error rather than a runtime check.

use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use dashu::base::{Abs, Approximation, BitTest, SquareRoot, UnsignedAbs};
use dashu::float::round::mode::HalfEven;
use dashu::float::{Context, FBig};
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;

use crate::error::Error;

/// Exact rational scalar (always reduced, positive denominator).
pub type Rational = RBig;

/// Default mantissa width for [`BigFloat`] computations.
pub const DEFAULT_PRECISION: usize = 256;

/// Common interface of the scalar backends.
///
/// Constructors take a context (`()`-like marker for rationals, the mantissa
/// width for floats) so that every value created inside a computation carries
/// the same precision.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Construction context.
    type Ctx: Clone + fmt::Debug + PartialEq + Send + Sync + 'static;

    /// Context this value was built with.
    fn ctx(&self) -> Self::Ctx;
    fn from_int(ctx: &Self::Ctx, v: IBig) -> Self;
    fn from_rational(ctx: &Self::Ctx, q: &Rational) -> Self;
    /// Whether arithmetic in this backend is exact.
    fn is_exact() -> bool;
    /// Relative tolerance used by approximate predicates, `None` when exact.
    fn tolerance(ctx: &Self::Ctx) -> Option<Self>;
    /// Short description recorded in output metadata, e.g. `exact` or `float:256`.
    fn describe(ctx: &Self::Ctx) -> String;
    /// Mantissa width used for derived irrational quantities (square roots,
    /// logarithms); [`DEFAULT_PRECISION`] for the exact backend.
    fn working_bits(ctx: &Self::Ctx) -> usize;

    /// -1, 0 or 1.
    fn signum(&self) -> i8;
    fn floor(&self) -> IBig;
    fn ceil(&self) -> IBig;
    /// Natural logarithm as `f64`, accurate for values far outside the `f64`
    /// exponent range. Returns `-inf` for zero and NaN for negative values.
    fn ln(&self) -> f64;
    fn to_f64(&self) -> f64;
    fn to_bigfloat(&self, bits: usize) -> BigFloat;
    /// Lossless (rationals) or full-precision (floats) decimal rendering.
    fn to_decimal(&self) -> String;
    /// Parses a decimal (`-1.25e-3`) or fraction (`3/7`) string.
    fn parse(ctx: &Self::Ctx, s: &str) -> Result<Self, Error>;

    fn zero(ctx: &Self::Ctx) -> Self {
        Self::from_int(ctx, IBig::ZERO)
    }
    fn one(ctx: &Self::Ctx) -> Self {
        Self::from_int(ctx, IBig::ONE)
    }
    fn from_i64(ctx: &Self::Ctx, v: i64) -> Self {
        Self::from_int(ctx, IBig::from(v))
    }
    fn from_u64(ctx: &Self::Ctx, v: u64) -> Self {
        Self::from_int(ctx, IBig::from(v))
    }
    fn from_frac(ctx: &Self::Ctx, num: i64, den: i64) -> Self {
        Self::from_rational(ctx, &RBig::from_parts(IBig::from(num), UBig::from(den.unsigned_abs())))
            * Self::from_i64(ctx, den.signum())
    }
    fn is_zero(&self) -> bool {
        self.signum() == 0
    }
    fn is_negative(&self) -> bool {
        self.signum() < 0
    }
    fn is_positive(&self) -> bool {
        self.signum() > 0
    }
    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
    /// Same-context constant.
    fn lift(&self, v: i64) -> Self {
        Self::from_i64(&self.ctx(), v)
    }
}

/// Marker context of the exact backend.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Exact;

/// `ln |x|` for a big integer.
pub fn ln_ubig(x: &UBig) -> f64 {
    let bits = x.bit_len();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return x.to_f64().value().ln();
    }
    let shift = bits - 64;
    let top = x >> shift;
    top.to_f64().value().ln() + shift as f64 * LN_2
}

fn ln_ibig(x: &IBig) -> f64 {
    match x.signum().cmp(&IBig::ZERO) {
        Ordering::Less => f64::NAN,
        Ordering::Equal => f64::NEG_INFINITY,
        Ordering::Greater => ln_ubig(&x.unsigned_abs()),
    }
}

/// Parses a decimal literal exactly.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty scalar".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = IBig::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let d = IBig::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if d == IBig::ZERO {
            return Err(Error::Parse(format!("{s}: zero denominator")));
        }
        return Ok(RBig::from(n) / RBig::from(d));
    }
    if let Ok(i) = IBig::from_str(s) {
        return Ok(RBig::from(i));
    }
    let d = FBig::<HalfEven, 10>::from_str(s).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
    let repr = d.repr();
    let sig = RBig::from(repr.significand().clone());
    let exp = repr.exponent();
    let ten = UBig::from(10u8);
    let scale = RBig::from(ten.pow(exp.unsigned_abs()));
    Ok(if exp >= 0 { sig * scale } else { sig / scale })
}

impl Scalar for Rational {
    type Ctx = Exact;

    fn ctx(&self) -> Exact {
        Exact
    }
    fn from_int(_: &Exact, v: IBig) -> Self {
        RBig::from(v)
    }
    fn from_rational(_: &Exact, q: &Rational) -> Self {
        q.clone()
    }
    fn is_exact() -> bool {
        true
    }
    fn tolerance(_: &Exact) -> Option<Self> {
        None
    }
    fn working_bits(_: &Exact) -> usize {
        DEFAULT_PRECISION
    }
    fn describe(_: &Exact) -> String {
        "exact".into()
    }
    fn signum(&self) -> i8 {
        match self.numerator().signum().cmp(&IBig::ZERO) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }
    fn floor(&self) -> IBig {
        RBig::floor(self)
    }
    fn ceil(&self) -> IBig {
        RBig::ceil(self)
    }
    fn ln(&self) -> f64 {
        if self.is_negative() {
            return f64::NAN;
        }
        ln_ibig(self.numerator()) - ln_ubig(self.denominator())
    }
    fn to_f64(&self) -> f64 {
        RBig::to_f64(self).value()
    }
    fn to_bigfloat(&self, bits: usize) -> BigFloat {
        BigFloat::from_rational(&bits, self)
    }
    fn to_decimal(&self) -> String {
        if self.denominator() == &UBig::ONE {
            self.numerator().to_string()
        } else {
            format!("{}/{}", self.numerator(), self.denominator())
        }
    }
    fn parse(_: &Exact, s: &str) -> Result<Self, Error> {
        parse_rational(s)
    }
}

type F = FBig<HalfEven>;

/// Binary floating point with a fixed mantissa width.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigFloat(F);

impl BigFloat {
    /// Wraps a value, forcing the given mantissa width.
    pub fn from_fbig(x: F, bits: usize) -> Self {
        BigFloat(x.with_precision(bits).value())
    }
    pub fn precision(&self) -> usize {
        self.0.precision()
    }
    pub fn inner(&self) -> &F {
        &self.0
    }
    fn context(&self) -> Context<HalfEven> {
        Context::new(self.precision())
    }
    pub fn sqrt(&self) -> Self {
        BigFloat(self.0.sqrt())
    }
    /// Full-precision natural logarithm.
    pub fn ln_full(&self) -> Self {
        BigFloat(self.0.ln())
    }
    /// Full-precision exponential.
    pub fn exp(&self) -> Self {
        BigFloat(self.context().exp(self.0.repr()).value())
    }
    /// `pi` to the given precision (Machin's formula).
    pub fn pi(bits: usize) -> Self {
        let work = bits + 32;
        let atan_inv = |k: i64| -> F {
            // atan(1/k) = sum (-1)^j / ((2j+1) k^(2j+1))
            let kf = F::from(k).with_precision(work).value();
            let k2 = kf.clone() * kf.clone();
            let mut power = F::ONE.with_precision(work).value() / kf;
            let mut sum = F::ZERO.with_precision(work).value();
            let mut j = 0i64;
            let stop = F::from(2).with_precision(work).value().powi(IBig::from(-(work as i64)));
            loop {
                let term = power.clone() / F::from(2 * j + 1).with_precision(work).value();
                if term < stop {
                    break;
                }
                if j % 2 == 0 {
                    sum += term;
                } else {
                    sum -= term;
                }
                power /= k2.clone();
                j += 1;
            }
            sum
        };
        let pi = (atan_inv(5) * F::from(16) - atan_inv(239) * F::from(4)).with_precision(bits).value();
        BigFloat(pi)
    }
    /// Cosine and sine by Taylor series with guard bits; intended for
    /// arguments of modest size (|x| ≤ 8).
    pub fn cos_sin(&self) -> (Self, Self) {
        let bits = self.precision();
        let work = bits + 64;
        let x = self.0.clone().with_precision(work).value();
        let x2 = x.clone() * x.clone();
        let stop = F::from(2).with_precision(work).value().powi(IBig::from(-(work as i64)));
        let mut cos = F::ONE.with_precision(work).value();
        let mut sin = x.clone();
        let mut term_c = F::ONE.with_precision(work).value();
        let mut term_s = x;
        let mut k = 1i64;
        loop {
            term_c = -term_c * x2.clone() / F::from((2 * k - 1) * (2 * k)).with_precision(work).value();
            term_s = -term_s * x2.clone() / F::from((2 * k) * (2 * k + 1)).with_precision(work).value();
            cos += term_c.clone();
            sin += term_s.clone();
            if term_c.clone().abs() < stop && term_s.clone().abs() < stop {
                break;
            }
            k += 1;
        }
        (
            BigFloat(cos.with_precision(bits).value()),
            BigFloat(sin.with_precision(bits).value()),
        )
    }
    /// Exact conversion of the binary value to a rational.
    pub fn to_rational(&self) -> Rational {
        let repr = self.0.repr();
        let sig = RBig::from(repr.significand().clone());
        let e = repr.exponent();
        let scale = RBig::from(UBig::ONE << e.unsigned_abs());
        if e >= 0 {
            sig * scale
        } else {
            sig / scale
        }
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BigFloat({})", self.to_decimal())
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: BigFloat) -> BigFloat {
                BigFloat($tr::$m(self.0, rhs.0))
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat(-self.0)
    }
}

fn approx_value<T, E>(a: Approximation<T, E>) -> T {
    a.value()
}

impl Scalar for BigFloat {
    /// Mantissa width in bits.
    type Ctx = usize;

    fn ctx(&self) -> usize {
        self.precision()
    }
    fn from_int(bits: &usize, v: IBig) -> Self {
        BigFloat(approx_value(F::from(v).with_precision(*bits)))
    }
    fn from_rational(bits: &usize, q: &Rational) -> Self {
        let n = F::from(q.numerator().clone()).with_precision(*bits).value();
        let d = F::from(q.denominator().clone()).with_precision(*bits).value();
        BigFloat(n / d)
    }
    fn is_exact() -> bool {
        false
    }
    fn tolerance(bits: &usize) -> Option<Self> {
        let two = F::from(2).with_precision(*bits).value();
        Some(BigFloat(two.powi(IBig::from(-((*bits / 2) as i64)))))
    }
    fn working_bits(bits: &usize) -> usize {
        *bits
    }
    fn describe(bits: &usize) -> String {
        format!("float:{bits}")
    }
    fn signum(&self) -> i8 {
        if self.0.repr().is_zero() {
            0
        } else if self.0.repr().significand() < &IBig::ZERO {
            -1
        } else {
            1
        }
    }
    fn floor(&self) -> IBig {
        self.0.floor().to_int().value()
    }
    fn ceil(&self) -> IBig {
        self.0.ceil().to_int().value()
    }
    fn ln(&self) -> f64 {
        let repr = self.0.repr();
        ln_ibig(repr.significand()) + repr.exponent() as f64 * LN_2
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().value()
    }
    fn to_bigfloat(&self, bits: usize) -> BigFloat {
        BigFloat(self.0.clone().with_precision(bits).value())
    }
    fn to_decimal(&self) -> String {
        // Enough decimal digits to round-trip the binary mantissa.
        let digits = (self.precision() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        let d = self.0.clone().with_base_and_precision::<10>(digits).value();
        d.to_string()
    }
    fn parse(bits: &usize, s: &str) -> Result<Self, Error> {
        Ok(Self::from_rational(bits, &parse_rational(s)?))
    }
}

/// Runtime backend selector used by front ends.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float { bits: usize },
}

impl Backend {
    pub fn describe(&self) -> String {
        match self {
            Backend::Exact => Rational::describe(&Exact),
            Backend::Float { bits } => BigFloat::describe(bits),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// `n!` as a big integer.
pub fn factorial(n: usize) -> IBig {
    (1..=n).fold(IBig::ONE, |acc, k| acc * IBig::from(k))
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: usize, k: usize) -> IBig {
    if k > n {
        return IBig::ZERO;
    }
    let k = k.min(n - k);
    let mut acc = IBig::ONE;
    for i in 0..k {
        acc = acc * IBig::from(n - i) / IBig::from(i + 1);
    }
    acc
}

/// Integer square root (floor) of a nonnegative integer.
pub fn isqrt(x: &IBig) -> IBig {
    IBig::from(x.unsigned_abs().sqrt())
}
