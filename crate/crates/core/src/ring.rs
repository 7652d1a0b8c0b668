//! Coefficient arithmetic at a primitive 4th root of unity.
//!
//! [`CycCoeff`] lives in `Z[A]/(A^2 + 1)`, the universal coefficient ring for
//! every identity in this crate; any ring with a primitive 4th root of unity
//! receives it by a ring map. [`Z4Exp`] is an exponent of `A`, and
//! [`QuarterFrac`] is an element of `(1/m)Z/4Z`, the home of the lifted
//! linking form and of the defects `d` and `D` before they are known to be
//! integral.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed coefficient {0:?}, expected \"a+bA\"")]
    Coeff(String),
    #[error("malformed fraction {0:?}, expected \"num/den\"")]
    Fraction(String),
    #[error("fraction {0:?} has a non-positive denominator")]
    Denominator(String),
}

/// `re + im*A` with `A^2 = -1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycCoeff {
    pub re: i64,
    pub im: i64,
}

impl CycCoeff {
    pub const ZERO: CycCoeff = CycCoeff { re: 0, im: 0 };
    pub const ONE: CycCoeff = CycCoeff { re: 1, im: 0 };
    pub const A: CycCoeff = CycCoeff { re: 0, im: 1 };

    pub const fn new(re: i64, im: i64) -> Self {
        CycCoeff { re, im }
    }

    pub const fn int(n: i64) -> Self {
        CycCoeff { re: n, im: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    /// Image under `A -> -A`, which is also `A -> A^{-1}`.
    pub fn conj(&self) -> Self {
        CycCoeff::new(self.re, -self.im)
    }

    /// `A^e`.
    pub fn a_pow(e: Z4Exp) -> Self {
        a_pow(e)
    }
}

/// Evaluates `A^e`.
pub fn a_pow(e: Z4Exp) -> CycCoeff {
    match e.value() {
        0 => CycCoeff::new(1, 0),
        1 => CycCoeff::new(0, 1),
        2 => CycCoeff::new(-1, 0),
        _ => CycCoeff::new(0, -1),
    }
}

impl Add for CycCoeff {
    type Output = CycCoeff;
    fn add(self, rhs: CycCoeff) -> CycCoeff {
        CycCoeff::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for CycCoeff {
    type Output = CycCoeff;
    fn sub(self, rhs: CycCoeff) -> CycCoeff {
        CycCoeff::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Neg for CycCoeff {
    type Output = CycCoeff;
    fn neg(self) -> CycCoeff {
        CycCoeff::new(-self.re, -self.im)
    }
}

impl Mul for CycCoeff {
    type Output = CycCoeff;
    fn mul(self, rhs: CycCoeff) -> CycCoeff {
        CycCoeff::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Mul<i64> for CycCoeff {
    type Output = CycCoeff;
    fn mul(self, rhs: i64) -> CycCoeff {
        CycCoeff::new(self.re * rhs, self.im * rhs)
    }
}

impl AddAssign for CycCoeff {
    fn add_assign(&mut self, rhs: CycCoeff) {
        *self = *self + rhs;
    }
}

impl SubAssign for CycCoeff {
    fn sub_assign(&mut self, rhs: CycCoeff) {
        *self = *self - rhs;
    }
}

impl MulAssign for CycCoeff {
    fn mul_assign(&mut self, rhs: CycCoeff) {
        *self = *self * rhs;
    }
}

impl Sum for CycCoeff {
    fn sum<I: Iterator<Item = CycCoeff>>(iter: I) -> CycCoeff {
        iter.fold(CycCoeff::ZERO, |acc, c| acc + c)
    }
}

impl fmt::Display for CycCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im < 0 {
            write!(f, "{}-{}A", self.re, -self.im)
        } else {
            write!(f, "{}+{}A", self.re, self.im)
        }
    }
}

impl FromStr for CycCoeff {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseError::Coeff(s.to_string());
        let t = s.trim();
        let body = t.strip_suffix('A').ok_or_else(bad)?;
        // the separator is the last sign that is not the leading one
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last()
            .ok_or_else(bad)?;
        let re: i64 = body[..split].trim().parse().map_err(|_| bad())?;
        let sign = if &body[split..split + 1] == "-" { -1 } else { 1 };
        let mag = body[split + 1..].trim();
        if mag.starts_with('+') || mag.starts_with('-') {
            return Err(bad());
        }
        let im: i64 = if mag.is_empty() { 1 } else { mag.parse().map_err(|_| bad())? };
        Ok(CycCoeff::new(re, sign * im))
    }
}

/// An integer class mod 4, stored as its representative in `{0,1,2,3}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Z4Exp(u8);

impl Z4Exp {
    pub const ZERO: Z4Exp = Z4Exp(0);

    pub fn new(n: i64) -> Self {
        Z4Exp(n.rem_euclid(4) as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn parity(self) -> u8 {
        self.0 % 2
    }
}

impl Add for Z4Exp {
    type Output = Z4Exp;
    fn add(self, rhs: Z4Exp) -> Z4Exp {
        Z4Exp((self.0 + rhs.0) % 4)
    }
}

impl Sub for Z4Exp {
    type Output = Z4Exp;
    fn sub(self, rhs: Z4Exp) -> Z4Exp {
        Z4Exp((self.0 + 4 - rhs.0) % 4)
    }
}

impl Neg for Z4Exp {
    type Output = Z4Exp;
    fn neg(self) -> Z4Exp {
        Z4Exp((4 - self.0) % 4)
    }
}

impl Mul<i64> for Z4Exp {
    type Output = Z4Exp;
    fn mul(self, rhs: i64) -> Z4Exp {
        Z4Exp::new(self.0 as i64 * rhs.rem_euclid(4))
    }
}

impl AddAssign for Z4Exp {
    fn add_assign(&mut self, rhs: Z4Exp) {
        *self = *self + rhs;
    }
}

impl Sum for Z4Exp {
    fn sum<I: Iterator<Item = Z4Exp>>(iter: I) -> Z4Exp {
        iter.fold(Z4Exp::ZERO, |acc, e| acc + e)
    }
}

impl From<i64> for Z4Exp {
    fn from(n: i64) -> Self {
        Z4Exp::new(n)
    }
}

impl fmt::Display for Z4Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `num/den` as an element of `(1/den)Z/4Z`.
///
/// The denominator is structural and never reduced; `num` is kept in
/// `[0, 4*den)`. Equality compares values, so `0/2 == 0/1`.
#[derive(Clone, Copy, Debug)]
pub struct QuarterFrac {
    num: i64,
    den: i64,
}

impl QuarterFrac {
    /// Panics if `den <= 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den > 0, "QuarterFrac denominator must be positive");
        QuarterFrac { num: num.rem_euclid(4 * den), den }
    }

    pub fn zero() -> Self {
        QuarterFrac { num: 0, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// The class mod 4 when the value is an integer.
    pub fn to_z4(&self) -> Option<Z4Exp> {
        (self.num % self.den == 0).then(|| Z4Exp::new(self.num / self.den))
    }

    /// Fractional part as a reduced pair `(k, l)` with `0 <= k < l`.
    pub fn frac_part(&self) -> (i64, i64) {
        let k = self.num.rem_euclid(self.den);
        let g = gcd(k, self.den);
        (k / g, self.den / g)
    }

    fn reduced(&self) -> (i64, i64) {
        let g = gcd(self.num, self.den);
        (self.num / g, self.den / g)
    }
}

impl From<Z4Exp> for QuarterFrac {
    fn from(e: Z4Exp) -> Self {
        QuarterFrac::new(e.value() as i64, 1)
    }
}

/// Sum over the least common denominator.
pub fn qf_add(x: QuarterFrac, y: QuarterFrac) -> QuarterFrac {
    let den = lcm(x.den, y.den);
    QuarterFrac::new(x.num * (den / x.den) + y.num * (den / y.den), den)
}

impl Add for QuarterFrac {
    type Output = QuarterFrac;
    fn add(self, rhs: QuarterFrac) -> QuarterFrac {
        qf_add(self, rhs)
    }
}

impl Neg for QuarterFrac {
    type Output = QuarterFrac;
    fn neg(self) -> QuarterFrac {
        QuarterFrac::new(-self.num, self.den)
    }
}

impl Sub for QuarterFrac {
    type Output = QuarterFrac;
    fn sub(self, rhs: QuarterFrac) -> QuarterFrac {
        qf_add(self, -rhs)
    }
}

impl Mul<i64> for QuarterFrac {
    type Output = QuarterFrac;
    fn mul(self, rhs: i64) -> QuarterFrac {
        QuarterFrac::new(self.num * rhs.rem_euclid(4 * self.den), self.den)
    }
}

impl Sum for QuarterFrac {
    fn sum<I: Iterator<Item = QuarterFrac>>(iter: I) -> QuarterFrac {
        iter.fold(QuarterFrac::zero(), qf_add)
    }
}

impl PartialEq for QuarterFrac {
    fn eq(&self, other: &Self) -> bool {
        let den = lcm(self.den, other.den);
        (self.num * (den / self.den) - other.num * (den / other.den)).rem_euclid(4 * den) == 0
    }
}

impl Eq for QuarterFrac {}

impl Hash for QuarterFrac {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.reduced().hash(state);
    }
}

impl fmt::Display for QuarterFrac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for QuarterFrac {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = parse_fraction(s)?;
        Ok(QuarterFrac::new(num, den))
    }
}

macro_rules! serde_via_str {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_str!(CycCoeff);
serde_via_str!(QuarterFrac);

/// Parses `"num/den"` or a bare integer into a pair with `den > 0`.
pub fn parse_fraction(s: &str) -> Result<(i64, i64), ParseError> {
    let bad = || ParseError::Fraction(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<i64>().map_err(|_| bad())?,
            d.trim().parse::<i64>().map_err(|_| bad())?,
        ),
        None => (t.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if den <= 0 {
        return Err(ParseError::Denominator(s.to_string()));
    }
    Ok((num, den))
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    if a == 0 {
        1
    } else {
        a
    }
}

pub fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn a_pow_values() {
        assert_eq!(a_pow(Z4Exp::new(0)), CycCoeff::new(1, 0));
        assert_eq!(a_pow(Z4Exp::new(2)), CycCoeff::new(-1, 0));
        assert_eq!(a_pow(Z4Exp::new(3)), CycCoeff::new(0, -1));
        assert_eq!(CycCoeff::A * CycCoeff::A, CycCoeff::int(-1));
    }

    #[test]
    fn minus_a_cubed_is_a() {
        let a3 = a_pow(Z4Exp::new(3));
        assert_eq!(-a3, CycCoeff::A);
    }

    #[test]
    fn qf_add_examples() {
        let x = QuarterFrac::new(1, 5);
        assert_eq!(qf_add(x, QuarterFrac::new(0, 1)), QuarterFrac::new(1, 5));
        let y = qf_add(QuarterFrac::new(16, 5), QuarterFrac::new(16, 5));
        assert_eq!(y, QuarterFrac::new(12, 5));
        assert_eq!((y.num(), y.den()), (12, 5));
        let z = qf_add(QuarterFrac::new(1, 2), QuarterFrac::new(7, 2));
        assert_eq!(z, QuarterFrac::new(0, 1));
        assert_eq!(z.to_z4(), Some(Z4Exp::new(0)));
    }

    #[test]
    fn denominators_are_not_reduced() {
        let x = QuarterFrac::new(10, 5);
        assert_eq!(x.den(), 5);
        assert_eq!(x, QuarterFrac::new(2, 1));
        assert_eq!(x.to_z4(), Some(Z4Exp::new(2)));
        assert_eq!(QuarterFrac::new(3, 5).to_z4(), None);
    }

    #[test]
    fn render_and_parse() {
        assert_eq!(CycCoeff::new(0, -1).to_string(), "0-1A");
        assert_eq!(CycCoeff::new(2, 0).to_string(), "2+0A");
        assert_eq!(CycCoeff::new(-3, 4).to_string(), "-3+4A");
        for s in ["0-1A", "2+0A", "-3+4A", "-3-4A", "7+12A"] {
            assert_eq!(s.parse::<CycCoeff>().unwrap().to_string(), s);
        }
        assert!("3".parse::<CycCoeff>().is_err());
        assert!("1+A".parse::<CycCoeff>().is_ok());
        assert!("1+-2A".parse::<CycCoeff>().is_err());
        assert_eq!(QuarterFrac::new(16, 5).to_string(), "16/5");
        assert_eq!("16/5".parse::<QuarterFrac>().unwrap(), QuarterFrac::new(16, 5));
        assert_eq!("-1/5".parse::<QuarterFrac>().unwrap(), QuarterFrac::new(19, 5));
        assert!("1/0".parse::<QuarterFrac>().is_err());
        assert!("x/2".parse::<QuarterFrac>().is_err());
    }

    fn coeff() -> impl Strategy<Value = CycCoeff> {
        (-50i64..50, -50i64..50).prop_map(|(a, b)| CycCoeff::new(a, b))
    }

    fn qf() -> impl Strategy<Value = QuarterFrac> {
        (-200i64..200, prop::sample::select(vec![1i64, 2, 3, 5, 7, 9, 15, 21]))
            .prop_map(|(n, d)| QuarterFrac::new(n, d))
    }

    proptest! {
        #[test]
        fn a_pow_is_a_homomorphism(e in -20i64..20, f in -20i64..20) {
            let (e, f) = (Z4Exp::new(e), Z4Exp::new(f));
            prop_assert_eq!(a_pow(e) * a_pow(f), a_pow(e + f));
            prop_assert_eq!(a_pow(e) * a_pow(-e), CycCoeff::ONE);
            prop_assert_eq!(a_pow(e + Z4Exp::new(2)), -a_pow(e));
        }

        #[test]
        fn ring_laws(x in coeff(), y in coeff(), z in coeff()) {
            prop_assert_eq!((x * y) * z, x * (y * z));
            prop_assert_eq!(x * (y + z), x * y + x * z);
            prop_assert_eq!(x * y, y * x);
        }

        #[test]
        fn coeff_text_round_trip(x in coeff()) {
            prop_assert_eq!(x.to_string().parse::<CycCoeff>().unwrap(), x);
        }

        #[test]
        fn qf_group_laws(x in qf(), y in qf(), z in qf()) {
            prop_assert_eq!(qf_add(qf_add(x, y), z), qf_add(x, qf_add(y, z)));
            prop_assert_eq!(qf_add(x, y), qf_add(y, x));
            prop_assert_eq!(qf_add(x, -x), QuarterFrac::zero());
            prop_assert_eq!(x * 3, qf_add(x, qf_add(x, x)));
        }

        #[test]
        fn z4_embeds(a in -30i64..30, b in -30i64..30) {
            let (ea, eb) = (Z4Exp::new(a), Z4Exp::new(b));
            prop_assert_eq!(
                QuarterFrac::from(ea + eb),
                qf_add(QuarterFrac::from(ea), QuarterFrac::from(eb))
            );
        }
    }
}
