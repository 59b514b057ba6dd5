//! The mod-5 congruence family `P_r(5m + a) = 0 (mod 5)` as executable checks,
//! and a term-by-term decomposition of the sparse recurrence that mirrors the
//! inductive argument behind it.
//!
//! Residues of rationals follow `a/b -> a * b^-1 (mod 5)`, so the checks only
//! make sense when the denominators involved are prime to 5. Scans report
//! [`Error::DenominatorNotInvertible`] instead of skipping such coefficients.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::arith::{reduce_mod, triangular, Rational, Residue};
use crate::error::{Error, Result};
use crate::expand::SeriesExpansion;
use crate::report::{Counterexample, Observed, VerificationReport};

pub const MODULUS: u64 = 5;

/// `P_r(n) = 0 (mod modulus)` whenever `n = n_residue` and `r = r_residue`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CongruenceFamily {
    n_residue: Residue,
    r_residue: Residue,
}

impl CongruenceFamily {
    pub fn new(n_residue: Residue, r_residue: Residue) -> Result<Self> {
        if n_residue.modulus() != r_residue.modulus() {
            return Err(Error::Domain(format!(
                "residue moduli differ: {} vs {}",
                n_residue.modulus(),
                r_residue.modulus()
            )));
        }
        Ok(CongruenceFamily {
            n_residue,
            r_residue,
        })
    }

    fn mod5(n: u64, r: u64) -> Self {
        CongruenceFamily {
            n_residue: Residue::new(n as i64, MODULUS).unwrap(),
            r_residue: Residue::new(r as i64, MODULUS).unwrap(),
        }
    }

    pub fn modulus(&self) -> u64 {
        self.n_residue.modulus()
    }

    pub fn n_residue(&self) -> Residue {
        self.n_residue
    }

    pub fn r_residue(&self) -> Residue {
        self.r_residue
    }

    /// Short label such as `5m+4`.
    pub fn label(&self) -> String {
        format!("{}m+{}", self.modulus(), self.n_residue.value())
    }

    /// The preset whose required `r` residue matches `r`, if any.
    pub fn for_exponent(r: &Rational) -> Result<Option<Self>> {
        let residue = reduce_mod(r, MODULUS)?;
        Ok(companion_presets()
            .into_iter()
            .find(|f| f.r_residue == residue))
    }
}

impl fmt::Display for CongruenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P_r({}) = 0 (mod {}) for r = {} (mod {})",
            self.label(),
            self.modulus(),
            self.r_residue.value(),
            self.modulus()
        )
    }
}

impl FromStr for CongruenceFamily {
    type Err = Error;

    /// Parses a preset label: `5m+4`, `5m+1`, `5m+2` or `5m+3`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        companion_presets()
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown congruence family {s:?}")))
    }
}

/// The four mod-5 families: `(n = 4, r = 1)`, `(n = 1, r = 0)`, `(n = 2, r = 2)`, `(n = 3, r = 4)`.
pub fn companion_presets() -> Vec<CongruenceFamily> {
    vec![
        CongruenceFamily::mod5(4, 1),
        CongruenceFamily::mod5(1, 0),
        CongruenceFamily::mod5(2, 2),
        CongruenceFamily::mod5(3, 4),
    ]
}

/// Reduces `P_r(modulus * m + a)` for each `m` in `0..=m_max` and reports every nonzero residue.
pub fn scan_family(
    family: &CongruenceFamily,
    r: &Rational,
    m_max: usize,
    expansion: &SeriesExpansion,
) -> Result<VerificationReport> {
    let modulus = family.modulus();
    let r_residue = reduce_mod(r, modulus)?;
    if r_residue != family.r_residue {
        return Err(Error::ResidueMismatch {
            r: r.to_string(),
            r_residue: r_residue.value(),
            required: family.r_residue.value(),
            modulus,
        });
    }
    expansion.require_exponent(r)?;
    let step = modulus as usize;
    let offset = family.n_residue.value() as usize;
    expansion.require_order(step * m_max + offset)?;

    let start = Instant::now();
    let outcomes: Vec<Result<Option<Counterexample>>> = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let n = step * m + offset;
            let residue = reduce_mod(expansion.coefficient(n), modulus).map_err(|e| e.at(n))?;
            Ok((!residue.is_zero()).then_some(Counterexample {
                index: n,
                observed: Observed::Residue(residue),
            }))
        })
        .collect();
    let counterexamples = outcomes
        .into_iter()
        .filter_map(Result::transpose)
        .collect::<Result<Vec<_>>>()?;

    let mut report = VerificationReport {
        description: format!("{family}, r = {r}"),
        range: (0, m_max),
        counterexamples,
        elapsed: start.elapsed(),
        engine: expansion.engine().to_string(),
    };
    report.sort();
    Ok(report)
}

/// How a term of the recurrence is disposed of in the induction, by `j mod 5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseLabel {
    /// `j = 1`: factor reduces to `9 + r`.
    J1Factor9PlusR,
    /// `j = 2`: `2j + 1` is divisible by 5.
    J2FactorFiveTimes,
    /// `j = 3`: factor reduces to `2(2r - 2)`.
    J3Factor2TwoRMinus2,
    /// `j = 4, 0`: `T_j = 0 (mod 5)`, so the argument stays in the class of `n`.
    J45InductionIndex,
}

impl CaseLabel {
    pub fn for_j(j: u64) -> Self {
        match j % 5 {
            1 => CaseLabel::J1Factor9PlusR,
            2 => CaseLabel::J2FactorFiveTimes,
            3 => CaseLabel::J3Factor2TwoRMinus2,
            _ => CaseLabel::J45InductionIndex,
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            CaseLabel::J1Factor9PlusR => "J1",
            CaseLabel::J2FactorFiveTimes => "J2",
            CaseLabel::J3Factor2TwoRMinus2 => "J3",
            CaseLabel::J45InductionIndex => "J45",
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceTerm {
    pub j: u64,
    pub triangular: u64,
    /// `(-1)^(j+1)`.
    pub sign: i8,
    /// `(2j + 1)(n + (r/3 - 1) T_j)`, exact.
    pub factor: Rational,
    pub factor_residue: Residue,
    pub case: CaseLabel,
    /// `n - T_j`.
    pub argument_index: u64,
}

/// The sparse recurrence at one `n`, split into its terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTrace {
    pub n: u64,
    pub r: Rational,
    pub terms: Vec<TraceTerm>,
    /// Whether `sum sign * factor * P_r(argument_index)` equals `n P_r(n)`.
    pub reconstructs: bool,
    /// For `n = 4 (mod 5)` and `r = 1 (mod 5)`: whether every J1/J2/J3 factor vanishes mod 5
    /// and every J45 argument is again `4 (mod 5)`. `None` outside that case.
    pub classification_holds: Option<bool>,
}

impl ProofTrace {
    /// Every term either has a factor divisible by 5 or an argument index `= 4 (mod 5)`.
    pub fn dichotomy_holds(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.factor_residue.is_zero() || t.argument_index % MODULUS == 4)
    }
}

/// Decomposes `n P_r(n)` into the terms of the sparse recurrence and classifies each mod 5.
pub fn trace_proof_step(n: u64, r: &Rational, expansion: &SeriesExpansion) -> Result<ProofTrace> {
    if n < 1 {
        return Err(Error::Domain("trace needs n >= 1".into()));
    }
    expansion.require_exponent(r)?;
    expansion.require_order(n as usize)?;
    let r_residue = reduce_mod(r, MODULUS)?;

    let shift = r.checked_div(&Rational::from(3)).unwrap() - Rational::one();
    let n_q = Rational::from_integer(n);
    let mut terms = Vec::new();
    let mut sum = Rational::zero();
    for j in (1u64..).take_while(|&j| triangular(j) <= n) {
        let t = triangular(j);
        let factor =
            Rational::from_integer(2 * j + 1) * (&n_q + &(&shift * &Rational::from_integer(t)));
        let factor_residue = reduce_mod(&factor, MODULUS)?;
        let sign: i8 = if j % 2 == 1 { 1 } else { -1 };
        let argument_index = n - t;
        let contribution = &factor * expansion.coefficient(argument_index as usize);
        sum = if sign > 0 {
            sum + contribution
        } else {
            sum - contribution
        };
        terms.push(TraceTerm {
            j,
            triangular: t,
            sign,
            factor,
            factor_residue,
            case: CaseLabel::for_j(j),
            argument_index,
        });
    }

    let reconstructs = sum == &n_q * expansion.coefficient(n as usize);
    let classification_holds = (n % MODULUS == 4 && r_residue.value() == 1).then(|| {
        terms.iter().all(|t| match t.case {
            CaseLabel::J45InductionIndex => t.argument_index % MODULUS == 4,
            _ => t.factor_residue.is_zero(),
        })
    });

    Ok(ProofTrace {
        n,
        r: r.clone(),
        terms,
        reconstructs,
        classification_holds,
    })
}
