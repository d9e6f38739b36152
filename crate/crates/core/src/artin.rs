//! The Artin map `f -> {1/f}` on X^-1 O and continued-fraction expansions.

use std::fmt;

use serde::Serialize;

use crate::algebra::{Poly, RationalFunction};
use crate::error::{Error, Result};
use crate::laurent::{LaurentSeries, Valuation};
use crate::moebius::Homography;

/// Default cap on the number of emitted partial quotients.
pub const DEFAULT_MAX_TERMS: usize = 64;

/// A partial quotient: a polynomial of degree at least 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PartialQuotient(Poly);

impl PartialQuotient {
    pub fn new(a: Poly) -> Result<Self> {
        match a.deg() {
            Some(d) if d >= 1 => Ok(PartialQuotient(a)),
            _ => Err(Error::Domain(format!(
                "partial quotient {a} must have positive degree"
            ))),
        }
    }

    pub fn poly(&self) -> &Poly {
        &self.0
    }

    pub fn into_poly(self) -> Poly {
        self.0
    }

    pub fn degree(&self) -> usize {
        self.0.deg().expect("nonzero by construction")
    }
}

impl fmt::Display for PartialQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for PartialQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialQuotient({})", self.0)
    }
}

/// Why an expansion stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    ExactRational,
    PrecisionExhausted,
    RequestedLengthReached,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::ExactRational => "exact-rational",
            Termination::PrecisionExhausted => "precision-exhausted",
            Termination::RequestedLengthReached => "requested-length-reached",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CfExpansion {
    pub terms: Vec<PartialQuotient>,
    pub terminated: Termination,
    /// Precision of the input series.
    pub initial_prec: i64,
    /// Precision of the last iterate.
    pub final_prec: i64,
}

#[derive(Serialize)]
struct CfJson<'a> {
    terms: Vec<String>,
    terminated: &'a str,
    budget_spent: i64,
}

impl CfExpansion {
    /// `2 * sum(deg a_i)`, the precision consumed by the emitted terms.
    pub fn budget_spent(&self) -> i64 {
        2 * self.terms.iter().map(|a| a.degree() as i64).sum::<i64>()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CfJson {
            terms: self.terms.iter().map(|a| a.to_string()).collect(),
            terminated: self.terminated.as_str(),
            budget_spent: self.budget_spent(),
        })
        .expect("plain data")
    }
}

fn require_unit_ball(f: &LaurentSeries) -> Result<()> {
    match f.valuation() {
        Valuation::Finite(v) if v <= 0 => Err(Error::Domain(format!(
            "series has valuation {v}, not in X^-1 O"
        ))),
        Valuation::AtLeast(v) if v <= 0 => Err(Error::PrecisionExhausted {
            needed: 0,
            available: f.prec(),
        }),
        _ => Ok(()),
    }
}

/// One step of the Artin map: returns `([1/f], {1/f})`.
pub fn artin_step(f: &LaurentSeries) -> Result<(PartialQuotient, LaurentSeries)> {
    require_unit_ball(f)?;
    let inv = f.invert()?;
    let a = PartialQuotient::new(inv.integer_part()?)?;
    Ok((a, inv.fractional_part()?))
}

/// The Artin map `f -> 1/f - [1/f]`; precision drops by `2 val(f)`.
pub fn artin_map(f: &LaurentSeries) -> Result<LaurentSeries> {
    artin_step(f).map(|(_, g)| g)
}

/// A term is only emitted while the next iterate keeps a certified coefficient
/// (remaining budget at least 1), unless that iterate is exactly zero.
pub(crate) fn budget_allows(next: &LaurentSeries) -> bool {
    next.prec() >= 1 || next.is_exact_zero()
}

/// Continued-fraction expansion of `f` in X^-1 O.
///
/// Stops at an exact zero iterate (`ExactRational`), at an iterate whose
/// valuation is no longer certified (`PrecisionExhausted`), or after `max_terms`.
pub fn cf_expand(f: &LaurentSeries, max_terms: usize) -> Result<CfExpansion> {
    require_unit_ball(f)?;
    let mut terms = Vec::new();
    let mut cur = f.clone();
    let terminated = loop {
        if cur.is_exact_zero() {
            break Termination::ExactRational;
        }
        if cur.is_zero_to_precision() {
            break Termination::PrecisionExhausted;
        }
        if terms.len() >= max_terms {
            break Termination::RequestedLengthReached;
        }
        let (a, next) = match artin_step(&cur) {
            Ok(step) => step,
            // the leading terms of 1/f are known but its integer part is not
            Err(Error::PrecisionExhausted { .. }) => break Termination::PrecisionExhausted,
            Err(e) => return Err(e),
        };
        if !budget_allows(&next) {
            break Termination::PrecisionExhausted;
        }
        terms.push(a);
        cur = next;
    };
    Ok(CfExpansion {
        terms,
        terminated,
        initial_prec: f.prec(),
        final_prec: cur.prec(),
    })
}

/// Splits a general series as `[f] + {f}` and expands the fractional part.
pub fn cf_expand_general(f: &LaurentSeries, max_terms: usize) -> Result<(Poly, CfExpansion)> {
    let a0 = f.integer_part()?;
    let frac = f.fractional_part()?;
    Ok((a0, cf_expand(&frac, max_terms)?))
}

/// Exact value of `[0; a1, ..., am]`, computed as the image of 0 under
/// `i t_{a1} i t_{a2} ... i t_{am}`. The empty expansion evaluates to 0.
pub fn cf_eval(terms: &[PartialQuotient]) -> RationalFunction {
    let Some(first) = terms.first() else {
        panic!("cf_eval needs at least one term");
    };
    let k = first.poly().field();
    let inv = Homography::inversion(k);
    let h = terms.iter().fold(Homography::identity(k), |h, a| {
        h.compose(&inv).compose(&Homography::translation(a.poly()))
    });
    h.apply(&crate::moebius::ProjPoint::zero(k))
        .finite()
        .expect("a continued fraction with positive-degree terms is finite")
}

/// Remaining precision after emitting `terms` from a series of precision `prec`.
pub fn cf_budget(prec: i64, terms: &[PartialQuotient]) -> i64 {
    prec - 2 * terms.iter().map(|a| a.degree() as i64).sum::<i64>()
}
