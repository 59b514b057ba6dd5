//! Truncated formal power series with exact coefficients, and the slow
//! product-expansion oracles the fast engines are checked against.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::Rational;
use crate::error::{Error, Result};

/// `c_0 + c_1 q + ... + c_N q^N`, with the order `N` fixed for life.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    coefficients: Vec<Rational>,
}

impl TruncatedSeries {
    /// Builds a series of order `coefficients.len() - 1`. Panics on an empty vector.
    pub fn new(coefficients: Vec<Rational>) -> Self {
        assert!(
            !coefficients.is_empty(),
            "a truncated series needs at least one coefficient"
        );
        TruncatedSeries { coefficients }
    }

    /// Pads or truncates `coefficients` to exactly `order + 1` entries.
    pub fn from_coefficients(mut coefficients: Vec<Rational>, order: usize) -> Self {
        coefficients.resize(order + 1, Rational::zero());
        TruncatedSeries { coefficients }
    }

    pub fn one(order: usize) -> Self {
        let mut c = vec![Rational::zero(); order + 1];
        c[0] = Rational::one();
        TruncatedSeries { coefficients: c }
    }

    pub(crate) fn from_integers(coefficients: Vec<BigInt>) -> Self {
        TruncatedSeries::new(
            coefficients
                .into_iter()
                .map(Rational::from_integer)
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn coefficient(&self, n: usize) -> &Rational {
        &self.coefficients[n]
    }

    pub fn into_coefficients(self) -> Vec<Rational> {
        self.coefficients
    }

    /// Cauchy product truncated to the common order.
    pub fn multiply(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let n = self.order();
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coefficients.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        Ok(TruncatedSeries { coefficients: out })
    }
}

/// Truncated product of integer coefficient vectors of equal length,
/// skipping zero entries of either side. Returns the product and the
/// number of multiply-adds performed.
fn int_multiply(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, u64) {
    let n = a.len();
    debug_assert_eq!(n, b.len());
    let mut out = vec![BigInt::zero(); n];
    let mut terms = 0u64;
    let b_support: Vec<usize> = (0..n).filter(|&j| !b[j].is_zero()).collect();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for &j in b_support.iter().take_while(|&&j| i + j < n) {
            out[i + j] += ai * &b[j];
            terms += 1;
        }
    }
    (out, terms)
}

/// Partition numbers `p(0..=order)` by the classic dynamic program over part sizes.
pub fn partition_series_oracle(order: usize) -> TruncatedSeries {
    TruncatedSeries::from_integers(partition_counts(order).0)
}

pub(crate) fn partition_counts(order: usize) -> (Vec<BigInt>, u64) {
    let mut c = vec![BigInt::zero(); order + 1];
    c[0] = BigInt::one();
    let mut terms = 0u64;
    for part in 1..=order {
        for n in part..=order {
            let prev = c[n - part].clone();
            c[n] += prev;
            terms += 1;
        }
    }
    (c, terms)
}

/// `prod_{k=1}^{order} (1 - q^k)^t` truncated to `order`, built factor by factor.
///
/// For negative `t` each `1/(1 - q^k)` is the truncated geometric series
/// `1 + q^k + q^{2k} + ...`, multiplied in `|t|` times.
pub fn product_power_oracle(t: i64, order: usize) -> TruncatedSeries {
    TruncatedSeries::from_integers(product_power_counts(t, order).0)
}

pub(crate) fn product_power_counts(t: i64, order: usize) -> (Vec<BigInt>, u64) {
    let len = order + 1;
    let mut acc = vec![BigInt::zero(); len];
    acc[0] = BigInt::one();
    let mut terms = 0u64;
    for k in 1..=order {
        let mut factor = vec![BigInt::zero(); len];
        factor[0] = BigInt::one();
        if t > 0 {
            factor[k] = BigInt::from(-1);
        } else {
            for i in (k..len).step_by(k) {
                factor[i] = BigInt::one();
            }
        }
        for _ in 0..t.unsigned_abs() {
            let (next, count) = int_multiply(&acc, &factor);
            acc = next;
            terms += count;
        }
    }
    (acc, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::triangular;

    fn ints(v: &[i64]) -> TruncatedSeries {
        TruncatedSeries::new(v.iter().map(|&x| Rational::from(x)).collect())
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(
            ints(&[1, 1, 0]).multiply(&ints(&[1, -1, 0])).unwrap(),
            ints(&[1, 0, -1])
        );
        let s = ints(&[3, -1, 7, 2]);
        assert_eq!(TruncatedSeries::one(3).multiply(&s).unwrap(), s);
        // (1 + q + 2q^2)(1 - q + q^2): q^1: 1 - 1 = 0; q^2: 1 - 1 + 2 = 2
        assert_eq!(
            ints(&[1, 1, 2]).multiply(&ints(&[1, -1, 1])).unwrap(),
            ints(&[1, 0, 2])
        );
    }

    #[test]
    fn multiply_rejects_mixed_orders() {
        let err = ints(&[1, 1]).multiply(&ints(&[1, 1, 1])).unwrap_err();
        assert_eq!(err, Error::OrderMismatch { left: 1, right: 2 });
    }

    #[test]
    fn partition_oracle_examples() {
        assert_eq!(partition_series_oracle(0), ints(&[1]));
        assert_eq!(partition_series_oracle(4), ints(&[1, 1, 2, 3, 5]));
        assert_eq!(
            partition_series_oracle(9).coefficient(9),
            &Rational::from(30)
        );
    }

    #[test]
    fn partition_oracle_matches_enumeration() {
        // Count partitions of n with parts at most m, recursively.
        fn count(n: u32, max_part: u32) -> u64 {
            if n == 0 {
                return 1;
            }
            (1..=max_part.min(n)).map(|k| count(n - k, k)).sum()
        }
        let dp = partition_series_oracle(25);
        for n in 0..=25u32 {
            assert_eq!(
                dp.coefficient(n as usize),
                &Rational::from(count(n, n) as i64)
            );
        }
    }

    #[test]
    fn product_power_examples() {
        assert_eq!(product_power_oracle(3, 6), ints(&[1, -3, 0, 5, 0, 0, -7]));
        assert_eq!(product_power_oracle(24, 1), ints(&[1, -24]));
        assert_eq!(product_power_oracle(-1, 4), ints(&[1, 1, 2, 3, 5]));
        assert_eq!(product_power_oracle(0, 3), TruncatedSeries::one(3));
    }

    #[test]
    fn product_power_cubed_is_jacobi() {
        let s = product_power_oracle(3, 300);
        for (n, c) in s.coefficients().iter().enumerate() {
            let expected = (0..)
                .take_while(|&k| triangular(k) <= n as u64)
                .find(|&k| triangular(k) == n as u64)
                .map(|k| {
                    if k % 2 == 0 {
                        2 * k as i64 + 1
                    } else {
                        -(2 * k as i64 + 1)
                    }
                })
                .unwrap_or(0);
            assert_eq!(c, &Rational::from(expected), "n = {n}");
        }
    }

    #[test]
    fn two_routes_to_partition_series() {
        for n in [0, 1, 7, 60] {
            assert_eq!(product_power_oracle(-1, n), partition_series_oracle(n));
        }
    }
}
