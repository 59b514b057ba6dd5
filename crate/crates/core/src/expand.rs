//! Coefficient engines for `P(q)^r`, where `P(q) = prod 1/(1 - q^k)`.
//!
//! Three independent routes produce the table `P_r(0..=N)`:
//!
//! * [`expand_sparse`] uses the cube of the Euler product, whose coefficients
//!   vanish off the triangular numbers, so coefficient `n` costs `O(sqrt n)`:
//!
//!   ```text
//!   n P_r(n) = sum_{j >= 1, T_j <= n} (-1)^(j+1) (2j+1) (n + (r/3 - 1) T_j) P_r(n - T_j)
//!   ```
//!
//! * [`expand_lemma`] solves the general convolution identity between two
//!   powers `r` and `s` of the same series,
//!
//!   ```text
//!   sum_{k=0}^{n} (n - (r/s + 1) k) P_r(n - k) P_s(k) = 0,
//!   ```
//!
//!   for `P_r(n)` given a table of `P_s`. This is `O(n)` per coefficient.
//!
//! * [`expand_oracle`] multiplies out the product directly (integer `r` only).
//!
//! All engines divide in exact rational arithmetic. Working modulo a prime
//! would be unsound here, since the recurrences divide by `n`.

use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::arith::{sigma, triangular, triangular_root, FractionSum, Rational};
use crate::error::{Error, Result};
use crate::report::{Counterexample, Observed, VerificationReport};
use crate::series::{partition_counts, product_power_counts, TruncatedSeries};

/// Which algorithm produced an expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    SparseRecurrence,
    LemmaRecurrence,
    DirectOracle,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::SparseRecurrence => "sparse",
            Engine::LemmaRecurrence => "lemma",
            Engine::DirectOracle => "oracle",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The table `P_r(0..=order)` together with the engine that computed it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesExpansion {
    exponent: Rational,
    coefficients: Vec<Rational>,
    engine: Engine,
    terms: u64,
}

impl SeriesExpansion {
    /// Wraps an externally supplied table. The constant term must be 1.
    pub fn from_coefficients(
        exponent: Rational,
        coefficients: Vec<Rational>,
        engine: Engine,
    ) -> Result<Self> {
        match coefficients.first() {
            Some(c) if *c == Rational::one() => Ok(SeriesExpansion {
                exponent,
                coefficients,
                engine,
                terms: 0,
            }),
            Some(c) => Err(Error::Domain(format!("constant term must be 1, got {c}"))),
            None => Err(Error::Domain("empty coefficient table".into())),
        }
    }

    pub fn exponent(&self) -> &Rational {
        &self.exponent
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

    pub fn engine(&self) -> Engine {
        self.engine
    }

    /// Inner-loop terms evaluated while building the table.
    pub fn terms(&self) -> u64 {
        self.terms
    }

    pub fn to_series(&self) -> TruncatedSeries {
        TruncatedSeries::new(self.coefficients.clone())
    }

    /// Replaces coefficient `n`. Used to seed faults in verification tests.
    pub fn with_coefficient(mut self, n: usize, value: Rational) -> Self {
        self.coefficients[n] = value;
        self
    }

    pub(crate) fn require_order(&self, need: usize) -> Result<()> {
        if self.order() < need {
            Err(Error::OrderTooSmall {
                have: self.order(),
                need,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn require_exponent(&self, expected: &Rational) -> Result<()> {
        if &self.exponent != expected {
            Err(Error::ExponentMismatch {
                have: self.exponent.to_string(),
                expected: expected.to_string(),
            })
        } else {
            Ok(())
        }
    }
}

/// Coefficient of `q^n` in `prod (1 - q^k)^3`: `(-1)^k (2k+1)` at `n = k(k+1)/2`, else 0.
pub fn jacobi_coefficient(n: u64) -> i64 {
    match triangular_root(n) {
        Some(k) if k % 2 == 0 => 2 * k as i64 + 1,
        Some(k) => -(2 * k as i64 + 1),
        None => 0,
    }
}

/// `P_{-3}(0..=order)` from the closed form.
pub fn jacobi_expansion(order: usize) -> SeriesExpansion {
    SeriesExpansion {
        exponent: Rational::from(-3),
        coefficients: (0..=order as u64)
            .map(|n| Rational::from(jacobi_coefficient(n)))
            .collect(),
        engine: Engine::DirectOracle,
        terms: 0,
    }
}

/// Number of inner-loop terms [`expand_sparse`] evaluates for coefficients `1..=order`.
pub fn sparse_term_count(order: usize) -> u64 {
    (1..=order as u64).map(crate::arith::triangular_count).sum()
}

/// `P_r(0..=order)` by the sparse triangular-number recurrence.
///
/// With `r = a/b`, the recurrence is scaled by `3b` so every weight is an integer:
/// `3bn P_r(n) = sum (-1)^(j+1) (2j+1) (3bn + (a - 3b) T_j) P_r(n - T_j)`.
pub fn expand_sparse(r: &Rational, order: usize) -> Result<SeriesExpansion> {
    let a = r.numer();
    let b = r.denom();
    let three_b: BigInt = b * 3;
    let shift: BigInt = a - &three_b;
    let integral = r.is_integer();

    let mut coefficients = Vec::with_capacity(order + 1);
    coefficients.push(Rational::one());
    let mut terms = 0u64;

    for n in 1..=order {
        let scale_n: BigInt = &three_b * n;
        let mut acc = FractionSum::new();
        for j in 1u64.. {
            let t = triangular(j) as usize;
            if t > n {
                break;
            }
            let mut weight: BigInt = (&scale_n + &shift * t) * (2 * j + 1);
            if j % 2 == 0 {
                weight = -weight;
            }
            acc.add_rational(&weight, &coefficients[n - t]);
            terms += 1;
        }
        if integral {
            let (sum, denom) = acc.parts();
            debug_assert!(denom.is_one());
            let (quot, rem) = sum.div_rem(&scale_n);
            if !rem.is_zero() {
                return Err(Error::IntegralityViolation {
                    index: n,
                    value: acc
                        .into_rational()
                        .checked_div(&Rational::from(scale_n))
                        .unwrap()
                        .to_string(),
                });
            }
            coefficients.push(Rational::from_integer(quot));
        } else {
            let (sum, denom) = acc.parts();
            coefficients.push(Rational::new(sum.clone(), denom * &scale_n)?);
        }
    }

    Ok(SeriesExpansion {
        exponent: r.clone(),
        coefficients,
        engine: Engine::SparseRecurrence,
        terms,
    })
}

/// `P_r(0..=order)` from a table of `P_s` via the two-exponent convolution identity.
///
/// With `r/s = c/d`, the `k = 0` term isolates `P_r(n)`:
/// `d n P_r(n) = sum_{k=1}^{n} ((c + d) k - d n) P_r(n - k) P_s(k)`.
/// Zero entries of the `P_s` table are skipped.
pub fn expand_lemma(
    r: &Rational,
    s: &Rational,
    base_s: &SeriesExpansion,
    order: usize,
) -> Result<SeriesExpansion> {
    if r.is_zero() || s.is_zero() {
        return Err(Error::ZeroExponent);
    }
    base_s.require_exponent(s)?;
    base_s.require_order(order)?;

    let ratio = r.checked_div(s).expect("s is non-zero");
    let c_plus_d: BigInt = ratio.numer() + ratio.denom();
    let d = ratio.denom();
    let support: Vec<usize> = (1..=order)
        .filter(|&k| !base_s.coefficients[k].is_zero())
        .collect();

    let mut coefficients = Vec::with_capacity(order + 1);
    coefficients.push(Rational::one());
    let mut terms = 0u64;

    for n in 1..=order {
        let dn: BigInt = d * n;
        let mut acc = FractionSum::new();
        for &k in support.iter().take_while(|&&k| k <= n) {
            let weight: BigInt = &c_plus_d * k - &dn;
            let lhs = &coefficients[n - k];
            let rhs = &base_s.coefficients[k];
            acc.add_term(
                &weight,
                &(lhs.numer() * rhs.numer()),
                &(lhs.denom() * rhs.denom()),
            );
            terms += 1;
        }
        let (sum, denom) = acc.parts();
        coefficients.push(Rational::new(sum.clone(), denom * &dn)?);
    }

    Ok(SeriesExpansion {
        exponent: r.clone(),
        coefficients,
        engine: Engine::LemmaRecurrence,
        terms,
    })
}

/// `P_r(0..=order)` by multiplying out `prod (1 - q^k)^{-r}`. Integer `r` only.
pub fn expand_oracle(r: &Rational, order: usize) -> Result<SeriesExpansion> {
    let r_int = r
        .to_integer()
        .and_then(|v| i64::try_from(v).ok())
        .ok_or_else(|| {
            Error::Domain(format!(
                "the product oracle needs a machine-size integer exponent, got {r}"
            ))
        })?;
    let (values, terms) = product_power_counts(-r_int, order);
    Ok(SeriesExpansion {
        exponent: r.clone(),
        coefficients: values.into_iter().map(Rational::from_integer).collect(),
        engine: Engine::DirectOracle,
        terms,
    })
}

/// The partition table `p(0..=order)` as an expansion with exponent 1.
pub fn partition_expansion(order: usize) -> SeriesExpansion {
    let (values, terms) = partition_counts(order);
    SeriesExpansion {
        exponent: Rational::one(),
        coefficients: values.into_iter().map(Rational::from_integer).collect(),
        engine: Engine::DirectOracle,
        terms,
    }
}

fn integral_values(expansion: &SeriesExpansion) -> Result<Vec<BigInt>> {
    expansion
        .coefficients
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.to_integer().ok_or_else(|| Error::IntegralityViolation {
                index: i,
                value: c.to_string(),
            })
        })
        .collect()
}

/// `tau(1..=n_max)`, read off `P_{-24}(0..n_max)`.
pub fn tau_values(n_max: u64) -> Result<Vec<BigInt>> {
    if n_max < 1 {
        return Err(Error::Domain("tau is defined for n >= 1".into()));
    }
    let expansion = expand_sparse(&Rational::from(-24), (n_max - 1) as usize)?;
    integral_values(&expansion)
}

/// Ramanujan's `tau(n)`, the coefficient of `q^n` in `q prod (1 - q^k)^24`.
pub fn tau(n: u64) -> Result<BigInt> {
    Ok(tau_values(n)?
        .pop()
        .expect("n >= 1 gives a non-empty table"))
}

fn run_checks<F>(
    description: String,
    engine: String,
    range: (usize, usize),
    check: F,
) -> VerificationReport
where
    F: Fn(usize) -> Option<Observed> + Sync,
{
    let start = Instant::now();
    let counterexamples = (range.0..=range.1)
        .into_par_iter()
        .filter_map(|n| check(n).map(|observed| Counterexample { index: n, observed }))
        .collect();
    let mut report = VerificationReport {
        description,
        range,
        counterexamples,
        elapsed: start.elapsed(),
        engine,
    };
    report.sort();
    report
}

/// Evaluates `sum_{k=0}^{n} (n - (r/s + 1) k) P_r(n - k) P_s(k)` for every `n <= order`
/// and reports each `n` where it is nonzero.
pub fn verify_lemma_identity(
    r: &Rational,
    s: &Rational,
    exp_r: &SeriesExpansion,
    exp_s: &SeriesExpansion,
    order: usize,
) -> Result<VerificationReport> {
    if s.is_zero() {
        return Err(Error::ZeroExponent);
    }
    exp_r.require_exponent(r)?;
    exp_s.require_exponent(s)?;
    exp_r.require_order(order)?;
    exp_s.require_order(order)?;

    let ratio = r.checked_div(s).expect("s is non-zero");
    let c_plus_d: BigInt = ratio.numer() + ratio.denom();
    let d = ratio.denom().clone();

    let description = format!("sum (n - (r/s + 1)k) P_r(n-k) P_s(k) = 0 for r = {r}, s = {s}");
    let engine = format!("{} x {}", exp_r.engine, exp_s.engine);
    Ok(run_checks(description, engine, (0, order), |n| {
        let mut acc = FractionSum::new();
        let dn: BigInt = &d * n;
        for k in 0..=n {
            let lhs = &exp_r.coefficients[n - k];
            let rhs = &exp_s.coefficients[k];
            let weight: BigInt = &dn - &c_plus_d * k;
            acc.add_term(
                &weight,
                &(lhs.numer() * rhs.numer()),
                &(lhs.denom() * rhs.denom()),
            );
        }
        let defect = acc.into_rational();
        (!defect.is_zero()).then(|| {
            Observed::Value(
                defect
                    .checked_div(&Rational::from_integer(d.clone()))
                    .unwrap(),
            )
        })
    }))
}

/// Checks `sum_{d=1}^{n} sigma(d) p(n - d) = n p(n)` for `1 <= n <= order`.
pub fn verify_sigma_identity(order: usize) -> Result<VerificationReport> {
    if order < 1 {
        return Err(Error::Domain("sigma identity needs order >= 1".into()));
    }
    let p = partition_counts(order).0;
    let sigmas: Vec<BigInt> = (1..=order as u64)
        .map(|d| sigma(d).map(BigInt::from))
        .collect::<Result<_>>()?;
    let description = "sum_{d=1}^{n} sigma(d) p(n-d) = n p(n)".to_string();
    Ok(run_checks(description, "oracle".into(), (1, order), |n| {
        let lhs: BigInt = (1..=n).map(|d| &sigmas[d - 1] * &p[n - d]).sum();
        let defect = lhs - &p[n] * n;
        (!defect.is_zero()).then(|| Observed::Value(Rational::from_integer(defect)))
    }))
}

/// Checks `sum_{k=0}^{n} (n + 23k) tau(n - k + 1) p(k) = 0` for `n <= order`,
/// with `tau` from the sparse engine and `p` from the partition oracle.
pub fn verify_tau_partition_identity(order: usize) -> Result<VerificationReport> {
    let tau = integral_values(&expand_sparse(&Rational::from(-24), order)?)?;
    let p = partition_counts(order).0;
    let description = "sum (n + 23k) tau(n-k+1) p(k) = 0".to_string();
    Ok(run_checks(
        description,
        "sparse x oracle".into(),
        (0, order),
        |n| {
            let defect: BigInt = (0..=n)
                .map(|k| BigInt::from(n + 23 * k) * &tau[n - k] * &p[k])
                .sum();
            (!defect.is_zero()).then(|| Observed::Value(Rational::from_integer(defect)))
        },
    ))
}

/// Compares the multiplied-out cube of the Euler product against [`jacobi_coefficient`].
pub fn verify_jacobi_identity(order: usize) -> Result<VerificationReport> {
    let (product, _) = product_power_counts(3, order);
    let description = "prod (1 - q^k)^3 = sum (-1)^k (2k+1) q^(k(k+1)/2)".to_string();
    Ok(run_checks(description, "oracle".into(), (0, order), |n| {
        let defect = &product[n] - BigInt::from(jacobi_coefficient(n as u64));
        (!defect.is_zero()).then(|| Observed::Value(Rational::from_integer(defect)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{partition_series_oracle, product_power_oracle};

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from(x)).collect()
    }

    #[test]
    fn jacobi_coefficient_examples() {
        assert_eq!(jacobi_coefficient(0), 1);
        assert_eq!(jacobi_coefficient(1), -3);
        assert_eq!(jacobi_coefficient(2), 0);
        assert_eq!(jacobi_coefficient(10), 9);
    }

    #[test]
    fn sparse_partition_numbers() {
        let e = expand_sparse(&q("1"), 4).unwrap();
        assert_eq!(e.coefficients(), &ints(&[1, 1, 2, 3, 5])[..]);
        assert_eq!(e.engine(), Engine::SparseRecurrence);
    }

    #[test]
    fn sparse_constant_term() {
        for r in ["0", "7/3", "-24", "1/2"] {
            let e = expand_sparse(&q(r), 0).unwrap();
            assert_eq!(e.coefficients(), &[Rational::one()][..]);
        }
    }

    #[test]
    fn sparse_base_case_identity() {
        // 4 P(4) = (9 + r) P(3) - 5 (r + 1) P(1): the j = 2 term reads P(4 - T_2) = P(1).
        let e = expand_sparse(&q("1"), 4).unwrap();
        let rhs = Rational::from(10) * e.coefficient(3).clone()
            - Rational::from(10) * e.coefficient(1).clone();
        assert_eq!(rhs, Rational::from(20));
        assert_eq!(e.coefficient(4), &Rational::from(5));
    }

    #[test]
    fn sparse_tau_five_matches_product() {
        let e = expand_sparse(&q("-24"), 5).unwrap();
        let oracle = product_power_oracle(24, 5);
        assert_eq!(e.coefficient(4), oracle.coefficient(4));
        assert_eq!(e.coefficient(4), &Rational::from(4830));
    }

    #[test]
    fn sparse_zero_exponent_is_one() {
        let e = expand_sparse(&q("0"), 30).unwrap();
        assert_eq!(e.to_series(), TruncatedSeries::one(30));
    }

    #[test]
    fn sparse_term_count_matches_instrumentation() {
        for n in [0, 1, 2, 3, 50, 333] {
            assert_eq!(
                expand_sparse(&q("1"), n).unwrap().terms(),
                sparse_term_count(n)
            );
        }
    }

    #[test]
    fn lemma_with_jacobi_base() {
        let e = expand_lemma(&q("1"), &q("-3"), &jacobi_expansion(4), 4).unwrap();
        assert_eq!(e.coefficients(), &ints(&[1, 1, 2, 3, 5])[..]);
        assert_eq!(e.engine(), Engine::LemmaRecurrence);
    }

    #[test]
    fn lemma_with_equal_exponents_reproduces_base() {
        let base = expand_sparse(&q("5/7"), 40).unwrap();
        let e = expand_lemma(&q("5/7"), &q("5/7"), &base, 40).unwrap();
        assert_eq!(e.coefficients(), base.coefficients());
    }

    #[test]
    fn lemma_tau_from_partitions() {
        let e = expand_lemma(&q("-24"), &q("1"), &partition_expansion(3), 3).unwrap();
        assert_eq!(e.to_series(), product_power_oracle(24, 3));
    }

    #[test]
    fn lemma_errors() {
        let base = partition_expansion(5);
        assert_eq!(
            expand_lemma(&q("0"), &q("1"), &base, 5),
            Err(Error::ZeroExponent)
        );
        assert_eq!(
            expand_lemma(&q("1"), &q("0"), &base, 5),
            Err(Error::ZeroExponent)
        );
        assert_eq!(
            expand_lemma(&q("2"), &q("1"), &base, 6),
            Err(Error::OrderTooSmall { have: 5, need: 6 })
        );
        assert!(matches!(
            expand_lemma(&q("2"), &q("3"), &base, 5),
            Err(Error::ExponentMismatch { .. })
        ));
    }

    #[test]
    fn oracle_engine() {
        assert_eq!(
            expand_oracle(&q("1"), 9).unwrap().coefficient(9),
            &Rational::from(30)
        );
        assert_eq!(expand_oracle(&q("-3"), 10).unwrap(), {
            let mut j = jacobi_expansion(10);
            j.terms = expand_oracle(&q("-3"), 10).unwrap().terms;
            j
        });
        assert!(expand_oracle(&q("1/2"), 3).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(1).unwrap(), BigInt::from(1));
        assert_eq!(tau(2).unwrap(), BigInt::from(-24));
        let five = product_power_oracle(24, 4)
            .coefficient(4)
            .to_integer()
            .unwrap();
        assert_eq!(tau(5).unwrap(), five);
        assert_eq!(&five % 5, BigInt::zero());
        assert!(matches!(tau(0), Err(Error::Domain(_))));
    }

    #[test]
    fn square_root_squares_to_partitions() {
        let half = expand_sparse(&q("1/2"), 40).unwrap().to_series();
        assert_eq!(half.multiply(&half).unwrap(), partition_series_oracle(40));
        // (1 + q/2 + c q^2)^2 has q^2 coefficient 2c + 1/4 = p(2) = 2, so c = 7/8.
        assert_eq!(half.coefficients()[..3], [q("1"), q("1/2"), q("7/8")]);
    }

    #[test]
    fn lemma_identity_examples() {
        let n = 50;
        let r2 = expand_oracle(&q("2"), n).unwrap();
        let r1 = partition_expansion(n);
        let report = verify_lemma_identity(&q("2"), &q("1"), &r2, &r1, n).unwrap();
        assert!(report.passed(), "{:?}", report.counterexamples);
        assert_eq!(report.range, (0, n));

        let bad = r2.clone().with_coefficient(7, q("0"));
        let report = verify_lemma_identity(&q("2"), &q("1"), &bad, &r1, n).unwrap();
        assert_eq!(report.counterexamples.first().map(|c| c.index), Some(7));

        assert_eq!(
            verify_lemma_identity(&q("2"), &q("0"), &r2, &r1, n).unwrap_err(),
            Error::ZeroExponent
        );
    }

    #[test]
    fn sigma_identity_small() {
        let report = verify_sigma_identity(1).unwrap();
        assert!(report.passed());
        assert_eq!(report.range, (1, 1));
        // n = 4: 3 + 6 + 4 + 7 = 20 = 4 * 5
        assert!(verify_sigma_identity(4).unwrap().passed());
        assert!(verify_sigma_identity(0).is_err());
    }

    #[test]
    fn tau_partition_relation_small() {
        assert!(verify_tau_partition_identity(60).unwrap().passed());
    }

    #[test]
    fn jacobi_identity_small() {
        assert!(verify_jacobi_identity(200).unwrap().passed());
    }

    #[test]
    fn denominators_divide_b_pow_n_times_factorial() {
        let r = q("7/6");
        let e = expand_sparse(&r, 25).unwrap();
        let mut bound = BigInt::one();
        for (n, c) in e.coefficients().iter().enumerate() {
            if n > 0 {
                bound *= r.denom() * n;
            }
            assert!(
                (&bound % c.denom()).is_zero(),
                "n = {n}, denominator {}",
                c.denom()
            );
        }
    }
}
