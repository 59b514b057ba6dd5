//! Exact rational arithmetic, rational residues, and the small integer
//! helpers (divisor sums, triangular numbers) the engines share.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact fraction, always in lowest terms with a positive denominator.
///
/// Equality is structural because the representation is canonical.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
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

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, if the denominator is 1.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    /// Exact quotient; `None` when dividing by zero.
    pub fn checked_div(&self, rhs: &Rational) -> Option<Rational> {
        if rhs.is_zero() {
            None
        } else {
            Some(Rational(&self.0 / &rhs.0))
        }
    }

    pub fn scale(&self, k: &BigInt) -> Rational {
        Rational(&self.0 * BigRational::from_integer(k.clone()))
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }

        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    /// `a/b` in lowest terms, or just `a` for integers.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `a/b` or a plain integer. Decimals are rejected.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_int = |t: &str| {
            let t = t.trim();
            // BigInt accepts a leading '+', which we also allow; anything else is an error.
            BigInt::from_str(t).map_err(|_| Error::Parse(format!("invalid rational literal {s:?}")))
        };
        match s.split_once('/') {
            Some((a, b)) => {
                let numer = parse_int(a)?;
                let denom = parse_int(b)?;
                if denom.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Rational(BigRational::new(numer, denom)))
            }
            None => Ok(Rational::from_integer(parse_int(s)?)),
        }
    }
}

/// An element of Z/mZ with `0 <= value < modulus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: i64, modulus: u64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::Domain(format!(
                "modulus must be >= 2, got {modulus}"
            )));
        }
        let value = value.rem_euclid(modulus as i64) as u64;
        Ok(Residue { value, modulus })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

fn mod_u64(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("remainder below modulus")
}

/// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
fn inverse_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m as i128) as u64)
}

/// Reduces `q = a/b` to `a * b^-1 mod m`.
pub fn reduce_mod(q: &Rational, m: u64) -> Result<Residue> {
    if m < 2 {
        return Err(Error::Domain(format!("modulus must be >= 2, got {m}")));
    }
    let b = mod_u64(q.denom(), m);
    let inv = inverse_mod(b, m).ok_or_else(|| Error::DenominatorNotInvertible {
        denominator: q.denom().to_string(),
        modulus: m,
        index: None,
    })?;
    let a = mod_u64(q.numer(), m) as u128;
    let value = (a * inv as u128 % m as u128) as u64;
    Ok(Residue { value, modulus: m })
}

/// Sum of the positive divisors of `n`, by trial division up to sqrt(n).
pub fn sigma(n: u64) -> Result<u64> {
    if n < 1 {
        return Err(Error::Domain("sigma is defined for n >= 1".into()));
    }
    let mut total = 0u64;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            total += d;
            let e = n / d;
            if e != d {
                total += e;
            }
        }
        d += 1;
    }
    Ok(total)
}

/// `k(k+1)/2`.
pub fn triangular(k: u64) -> u64 {
    k * (k + 1) / 2
}

/// Returns `k` with `triangular(k) == n`, if `n` is triangular.
///
/// `n = k(k+1)/2` exactly when `8n + 1` is the odd square `(2k+1)^2`.
pub fn triangular_root(n: u64) -> Option<u64> {
    let disc = 8u128 * n as u128 + 1;
    let s = disc.sqrt();
    (s * s == disc).then(|| ((s - 1) / 2) as u64)
}

/// Number of `j >= 1` with `triangular(j) <= n`, i.e. `floor((sqrt(8n+1) - 1) / 2)`.
pub fn triangular_count(n: u64) -> u64 {
    let s = (8u128 * n as u128 + 1).sqrt();
    ((s - 1) / 2) as u64
}

/// Accumulates `sum w_i * (a_i / b_i)` over a running common denominator,
/// so the result is reduced once instead of after every addition.
#[derive(Debug, Clone)]
pub(crate) struct FractionSum {
    numer: BigInt,
    denom: BigInt,
}

impl FractionSum {
    pub(crate) fn new() -> Self {
        FractionSum {
            numer: BigInt::zero(),
            denom: BigInt::one(),
        }
    }

    /// Adds `weight * numer / denom`; `denom` must be positive.
    pub(crate) fn add_term(&mut self, weight: &BigInt, numer: &BigInt, denom: &BigInt) {
        if weight.is_zero() || numer.is_zero() {
            return;
        }
        if denom.is_one() {
            self.numer += weight * numer * &self.denom;
            return;
        }
        let g = self.denom.gcd(denom);
        if &g != denom {
            let lift = denom / &g;
            self.numer *= &lift;
            self.denom *= &lift;
        }
        let scale = &self.denom / denom;
        self.numer += weight * numer * scale;
    }

    pub(crate) fn add_rational(&mut self, weight: &BigInt, q: &Rational) {
        self.add_term(weight, q.numer(), q.denom());
    }

    /// Numerator over the running denominator, unreduced.
    pub(crate) fn parts(&self) -> (&BigInt, &BigInt) {
        (&self.numer, &self.denom)
    }

    pub(crate) fn into_rational(self) -> Rational {
        Rational(BigRational::new(self.numer, self.denom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn reduce_mod_examples() {
        assert_eq!(reduce_mod(&q("-24"), 5).unwrap().value(), 1);
        assert_eq!(reduce_mod(&q("1/6"), 5).unwrap().value(), 1);
        assert_eq!(reduce_mod(&q("3/2"), 5).unwrap().value(), 4);
        assert!(matches!(
            reduce_mod(&q("1/5"), 5),
            Err(Error::DenominatorNotInvertible { modulus: 5, .. })
        ));
    }

    #[test]
    fn reduce_mod_three_halves_by_multiplication() {
        // 2 * 4 = 8 = 3 (mod 5)
        let x = reduce_mod(&q("3/2"), 5).unwrap().value();
        assert_eq!((2 * x) % 5, 3);
    }

    #[test]
    fn reduce_mod_rejects_small_modulus() {
        assert!(matches!(reduce_mod(&q("3"), 1), Err(Error::Domain(_))));
    }

    #[test]
    fn reduce_mod_composite_modulus() {
        assert_eq!(reduce_mod(&q("1/7"), 12).unwrap().value(), 7);
        assert!(reduce_mod(&q("1/4"), 12).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(1).unwrap(), 1);
        assert_eq!(sigma(4).unwrap(), 7);
        assert_eq!(sigma(6).unwrap(), 12);
        assert!(matches!(sigma(0), Err(Error::Domain(_))));
    }

    #[test]
    fn sigma_matches_divisor_enumeration() {
        for n in 1..=500u64 {
            let brute: u64 = (1..=n).filter(|d| n % d == 0).sum();
            assert_eq!(sigma(n).unwrap(), brute, "n = {n}");
        }
    }

    #[test]
    fn triangular_examples() {
        assert_eq!(triangular(0), 0);
        assert_eq!(triangular(1), 1);
        assert_eq!(triangular(4), 10);
    }

    #[test]
    fn triangular_root_and_count() {
        for k in 0..2000 {
            assert_eq!(triangular_root(triangular(k)), Some(k));
        }
        assert_eq!(triangular_root(2), None);
        assert_eq!(triangular_root(9), None);
        for n in 0..3000u64 {
            let brute = (1..).take_while(|&j| triangular(j) <= n).count() as u64;
            assert_eq!(triangular_count(n), brute, "n = {n}");
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(q("4/-6").to_string(), "-2/3");
        assert_eq!(q("6/3").to_string(), "2");
        assert_eq!(q(" -24 ").to_string(), "-24");
        assert!("1.5".parse::<Rational>().is_err());
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        assert!("".parse::<Rational>().is_err());
    }

    #[test]
    fn fraction_sum_matches_rational_addition() {
        let terms = [(3, "1/6"), (-2, "5/4"), (7, "2"), (1, "-9/10"), (4, "1/6")];
        let mut acc = FractionSum::new();
        let mut expected = Rational::zero();
        for (w, t) in terms {
            acc.add_rational(&BigInt::from(w), &q(t));
            expected = expected + Rational::from(w as i64) * q(t);
        }
        assert_eq!(acc.into_rational(), expected);
    }

    #[test]
    fn residue_normalizes() {
        let r = Residue::new(-1, 5).unwrap();
        assert_eq!(r.value(), 4);
        assert!(Residue::new(0, 1).is_err());
    }
}
