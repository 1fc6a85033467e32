//! Exact money arithmetic.
//!
//! Amounts are kept as rationals in cents so that halving, doubling and the
//! 5/4 scaling of the naive argument never round. [`Money`] is non-negative;
//! signed gains and losses are [`GainDelta`]. [`Ratio`] is a non-negative
//! exact rational used for scale factors and probabilities.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Parses an unsigned decimal literal (`12`, `12.5`, `.25`) into an exact rational.
fn parse_decimal(s: &str) -> std::result::Result<BigRational, &'static str> {
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err("no digits");
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return Err("expected decimal digits");
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = digits.parse().map_err(|_| "expected decimal digits")?;
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

/// Renders `value` as a terminating decimal if it has one.
fn terminating_decimal(value: &BigRational) -> Option<String> {
    let mut den = value.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_multiple_of(&two) {
        den /= &two;
        twos += 1;
    }
    while den.is_multiple_of(&five) {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = value * BigRational::from_integer(num_traits::pow(BigInt::from(10u32), places));
    let scaled = scaled.to_integer();
    let sign = if scaled.is_negative() { "-" } else { "" };
    let digits = scaled.abs().to_string();
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = padded.split_at(padded.len() - places);
    Some(format!("{sign}{int_part}.{frac_part}"))
}

/// Formats a rational number of cents as `d.cc` dollars, when it is a whole number of cents.
fn cents_to_dollars(cents: &BigRational) -> Option<String> {
    if !cents.is_integer() {
        return None;
    }
    let c = cents.to_integer();
    let sign = if c.is_negative() { "-" } else { "" };
    let (d, r) = c.abs().div_rem(&BigInt::from(100u32));
    Some(format!("{sign}{d}.{:02}", r.to_u32().unwrap_or_default()))
}

fn fmt_cents(cents: &BigRational, f: &mut fmt::Formatter<'_>, signed: bool) -> fmt::Result {
    let plus = if signed && cents.is_positive() {
        "+"
    } else {
        ""
    };
    match cents_to_dollars(cents) {
        Some(d) => match d.strip_prefix('-') {
            Some(abs) => write!(f, "-${abs}"),
            None => write!(f, "{plus}${d}"),
        },
        None => write!(f, "{plus}{cents} cents"),
    }
}

/// Wire form shared by [`Money`] and [`GainDelta`].
#[derive(Serialize, Deserialize)]
struct CentsJson {
    num: String,
    den: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dollars: Option<String>,
}

impl CentsJson {
    fn from_cents(cents: &BigRational) -> Self {
        CentsJson {
            num: cents.numer().to_string(),
            den: cents.denom().to_string(),
            dollars: cents_to_dollars(cents),
        }
    }

    fn into_cents<E: serde::de::Error>(self) -> std::result::Result<BigRational, E> {
        let num: BigInt = self.num.parse().map_err(E::custom)?;
        let den: BigInt = self.den.parse().map_err(E::custom)?;
        if !den.is_positive() {
            return Err(E::custom("denominator must be positive"));
        }
        Ok(BigRational::new(num, den))
    }
}

/// Non-negative exact rational.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(BigRational);

impl Ratio {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::ParseRatio {
                input: format!("{numer}/{denom}"),
                reason: "zero denominator",
            });
        }
        Ok(Ratio(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_rational(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::ParseRatio {
                input: value.to_string(),
                reason: "negative",
            });
        }
        Ok(Ratio(value))
    }

    pub fn integer(n: u64) -> Self {
        Ratio(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Ratio(BigRational::zero())
    }

    pub fn one() -> Self {
        Ratio(BigRational::one())
    }

    pub fn half() -> Self {
        Ratio(BigRational::new(1.into(), 2.into()))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn mul(&self, other: &Ratio) -> Ratio {
        Ratio(&self.0 * &other.0)
    }

    pub fn add(&self, other: &Ratio) -> Ratio {
        Ratio(&self.0 + &other.0)
    }

    /// `self - other`, or `None` if that would be negative.
    pub fn checked_sub(&self, other: &Ratio) -> Option<Ratio> {
        (self.0 >= other.0).then(|| Ratio(&self.0 - &other.0))
    }

    /// `self / other`, or `None` when `other` is zero.
    pub fn checked_div(&self, other: &Ratio) -> Option<Ratio> {
        (!other.is_zero()).then(|| Ratio(&self.0 / &other.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering (`15/8` -> `1.875`) when the expansion terminates.
    pub fn to_decimal_string(&self) -> Option<String> {
        terminating_decimal(&self.0)
    }

    /// `ceil(self * 2^64)`, the number of 64-bit draws `u` with `u / 2^64 < self`
    /// (capped at 2^64).
    pub(crate) fn u64_threshold(&self) -> u128 {
        let scaled = &self.0 * BigRational::from_integer(BigInt::one() << 64);
        let ceil = scaled.ceil().to_integer();
        ceil.to_u128().map_or(1u128 << 64, |t| t.min(1u128 << 64))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Ratio {
    type Err = Error;

    /// Accepts `a/b` fractions and plain decimals, both parsed exactly.
    fn from_str(s: &str) -> Result<Self> {
        let input = s.trim();
        let err = |reason| Error::ParseRatio {
            input: input.to_string(),
            reason,
        };
        let value = match input.split_once('/') {
            Some((n, d)) => {
                let n = parse_decimal(n.trim()).map_err(err)?;
                let d = parse_decimal(d.trim()).map_err(err)?;
                if d.is_zero() {
                    return Err(err("zero denominator"));
                }
                n / d
            }
            None => parse_decimal(input).map_err(err)?,
        };
        Ok(Ratio(value))
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Non-negative amount of money, held exactly as a rational number of cents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Money(BigRational);

impl Money {
    pub fn zero() -> Self {
        Money(BigRational::zero())
    }

    pub fn from_cents(cents: u64) -> Self {
        Money(BigRational::from_integer(cents.into()))
    }

    /// Whole dollars.
    pub fn from_dollars(dollars: u64) -> Self {
        Money::from_cents(dollars * 100)
    }

    pub fn from_cents_rational(cents: BigRational) -> Result<Self> {
        if cents.is_negative() {
            return Err(Error::NegativeMoney(format!("{cents} cents")));
        }
        Ok(Money(cents))
    }

    /// Cents as a reduced fraction `numer / denom`.
    pub fn cents(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn scale(&self, ratio: &Ratio) -> Money {
        Money(&self.0 * ratio.as_rational())
    }

    pub fn checked_sub(&self, other: &Money) -> Result<Money> {
        Money::from_cents_rational(&self.0 - &other.0)
    }

    /// Applies a signed change; fails if the result would be negative.
    pub fn apply(&self, delta: &GainDelta) -> Result<Money> {
        Money::from_cents_rational(&self.0 + delta.cents())
    }

    /// How many times `unit` fits into `self`, exactly. `None` when `unit` is zero.
    pub fn ratio_to(&self, unit: &Money) -> Option<Ratio> {
        (!unit.is_zero()).then(|| Ratio(&self.0 / &unit.0))
    }

    /// `d.cc` when the amount is a whole number of cents.
    pub fn dollars(&self) -> Option<String> {
        cents_to_dollars(&self.0)
    }

    /// `d.cc`, falling back to the exact `n/d cents` form.
    pub fn to_plain_string(&self) -> String {
        self.dollars()
            .unwrap_or_else(|| format!("{} cents", self.0))
    }

    pub fn to_dollars_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN) / 100.0
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_cents(&self.0, f, false)
    }
}

impl FromStr for Money {
    type Err = Error;

    /// Parses dollars, e.g. `5`, `5.00`, `$7.375`. No float parsing is involved.
    fn from_str(s: &str) -> Result<Self> {
        let input = s.trim();
        let digits = input.strip_prefix('$').unwrap_or(input);
        let dollars = parse_decimal(digits).map_err(|reason| Error::ParseAmount {
            input: input.to_string(),
            reason,
        })?;
        Ok(Money(dollars * BigRational::from_integer(100.into())))
    }
}

impl Add for &Money {
    type Output = Money;
    fn add(self, rhs: &Money) -> Money {
        Money(&self.0 + &rhs.0)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::zero(), Add::add)
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CentsJson::from_cents(&self.0).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let cents = CentsJson::deserialize(deserializer)?.into_cents()?;
        Money::from_cents_rational(cents).map_err(D::Error::custom)
    }
}

/// Signed exact change in money, in cents. Positive is a gain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GainDelta(BigRational);

impl GainDelta {
    pub fn zero() -> Self {
        GainDelta(BigRational::zero())
    }

    pub fn from_cents(cents: i64) -> Self {
        GainDelta(BigRational::from_integer(cents.into()))
    }

    pub fn from_cents_rational(cents: BigRational) -> Self {
        GainDelta(cents)
    }

    pub fn gain(amount: &Money) -> Self {
        GainDelta(amount.0.clone())
    }

    pub fn loss(amount: &Money) -> Self {
        GainDelta(-amount.0.clone())
    }

    pub fn cents(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn sign(&self) -> Sign {
        match () {
            _ if self.0.is_positive() => Sign::Plus,
            _ if self.0.is_negative() => Sign::Minus,
            _ => Sign::NoSign,
        }
    }

    pub fn scale(&self, ratio: &Ratio) -> GainDelta {
        GainDelta(&self.0 * ratio.as_rational())
    }

    pub fn magnitude(&self) -> Money {
        Money(self.0.abs())
    }

    pub fn dollars(&self) -> Option<String> {
        cents_to_dollars(&self.0)
    }

    pub fn to_dollars_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN) / 100.0
    }
}

impl fmt::Display for GainDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_cents(&self.0, f, true)
    }
}

impl Add for &GainDelta {
    type Output = GainDelta;
    fn add(self, rhs: &GainDelta) -> GainDelta {
        GainDelta(&self.0 + &rhs.0)
    }
}

impl Add for GainDelta {
    type Output = GainDelta;
    fn add(self, rhs: GainDelta) -> GainDelta {
        GainDelta(self.0 + rhs.0)
    }
}

impl Sub for &GainDelta {
    type Output = GainDelta;
    fn sub(self, rhs: &GainDelta) -> GainDelta {
        GainDelta(&self.0 - &rhs.0)
    }
}

impl Neg for GainDelta {
    type Output = GainDelta;
    fn neg(self) -> GainDelta {
        GainDelta(-self.0)
    }
}

impl Sum for GainDelta {
    fn sum<I: Iterator<Item = GainDelta>>(iter: I) -> GainDelta {
        iter.fold(GainDelta::zero(), Add::add)
    }
}

impl Serialize for GainDelta {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CentsJson::from_cents(&self.0).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GainDelta {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(GainDelta(
            CentsJson::deserialize(deserializer)?.into_cents()?,
        ))
    }
}

pub fn scale(amount: &Money, ratio: &Ratio) -> Money {
    amount.scale(ratio)
}

/// `to - from`.
pub fn delta(from: &Money, to: &Money) -> GainDelta {
    GainDelta(&to.0 - &from.0)
}
