//! Truncated elements of k((X^-1)) with exact valuation and a certified precision index.
//!
//! The coefficient at index `i` is the coefficient of `X^-i`, so polynomials live
//! at non-positive indices and the open unit ball X^-1 O at positive ones. A series
//! with precision `N` knows every coefficient of index `<= N` exactly.
//!
//! Three kinds of "zero" are kept apart:
//! * a certified nonzero series has a nonzero coefficient at its valuation;
//! * the exact zero is known to vanish identically;
//! * a zero-to-precision series only has vanishing known coefficients, so its
//!   valuation is merely bounded below by `prec + 1`.
//!
//! A series may also carry the exact rational function it expands. This is what
//! lets the Artin map certify that an iterate of a rational input is exactly zero.

use std::fmt;

use serde::Serialize;

use crate::algebra::{parse_terms, FieldElement, FieldSpec, Poly, RationalFunction};
use crate::error::{Error, Result};

/// Default working precision for series built from user input.
pub const DEFAULT_PRECISION: i64 = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    /// The exact zero (valuation +infinity).
    Infinite,
    /// Zero to precision: only a lower bound is known.
    AtLeast(i64),
}

/// Absolute value `|f| = q^(-v(f))`, stored by exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AbsValue {
    Zero,
    QPower(i64),
}

#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: FieldSpec,
    /// Index of `coeffs[0]`; the valuation when `coeffs` is nonempty, `prec + 1` otherwise.
    start: i64,
    prec: i64,
    coeffs: Vec<FieldElement>,
    exact: Option<RationalFunction>,
}

#[derive(Serialize)]
struct SeriesJson {
    val: i64,
    prec: i64,
    coeffs: Vec<String>,
}

impl LaurentSeries {
    fn build(
        field: &FieldSpec,
        start: i64,
        prec: i64,
        mut coeffs: Vec<FieldElement>,
        exact: Option<RationalFunction>,
    ) -> Self {
        let lead = coeffs.iter().position(|c| !c.is_zero());
        let (start, coeffs) = match lead {
            Some(0) => (start, coeffs),
            Some(z) => {
                coeffs.drain(..z);
                (start + z as i64, coeffs)
            }
            None => (prec + 1, Vec::new()),
        };
        LaurentSeries {
            field: field.clone(),
            start,
            prec,
            coeffs,
            exact,
        }
    }

    /// Series with the given coefficients for indices `start, start + 1, ...`,
    /// zero-padded or truncated to `prec`.
    pub fn from_coeffs(
        field: &FieldSpec,
        start: i64,
        mut coeffs: Vec<FieldElement>,
        prec: i64,
    ) -> Self {
        let len = (prec - start + 1).max(0) as usize;
        coeffs.resize(len, FieldElement::ZERO);
        Self::build(field, start, prec, coeffs, None)
    }

    pub fn exact_zero(field: &FieldSpec, prec: i64) -> Self {
        Self::build(
            field,
            prec + 1,
            prec,
            Vec::new(),
            Some(RationalFunction::zero(field)),
        )
    }

    pub fn zero_to_precision(field: &FieldSpec, prec: i64) -> Self {
        Self::build(field, prec + 1, prec, Vec::new(), None)
    }

    pub fn from_poly(p: &Poly, prec: i64) -> Result<Self> {
        Self::from_rational(&RationalFunction::from_poly(p.clone()), prec)
    }

    /// Expansion of a rational function at infinity through index `prec`.
    pub fn from_rational(f: &RationalFunction, prec: i64) -> Result<Self> {
        let k = f.field();
        let Some(v) = f.valuation() else {
            return Ok(Self::exact_zero(k, prec));
        };
        if prec < v {
            return Err(Error::InvalidArgument(format!(
                "precision {prec} is below the valuation {v}"
            )));
        }
        let (num, den) = (f.num(), f.den());
        let (m, d) = (num.deg().unwrap(), den.deg().unwrap());
        // power series in y = 1/X: num_rev(y) / den_rev(y)
        let num_rev: Vec<FieldElement> = (0..=m).map(|i| num.coeff(m - i)).collect();
        let den_rev: Vec<FieldElement> = (0..=d).map(|i| den.coeff(d - i)).collect();
        let len = (prec - v + 1) as usize;
        let lead_inv = k.inv(den_rev[0])?;
        let mut c: Vec<FieldElement> = Vec::with_capacity(len);
        for i in 0..len {
            let hi = i.min(d);
            let s = if hi == 0 {
                FieldElement::ZERO
            } else {
                k.dot_rev(&den_rev[1..=hi], &c[i - hi..i])
            };
            let n_i = num_rev.get(i).copied().unwrap_or(FieldElement::ZERO);
            c.push(k.mul(k.sub(n_i, s), lead_inv));
        }
        Ok(Self::build(k, v, prec, c, Some(f.clone())))
    }

    /// Parses the polynomial grammar with negative exponents; a trailing `O(X^-m)`
    /// sets the precision to `m - 1`, otherwise `default_prec` is used.
    pub fn parse(field: &FieldSpec, s: &str, default_prec: i64) -> Result<Self> {
        let parsed = parse_terms(field, s)?;
        let prec = parsed.big_o.map_or(default_prec, |e| -e - 1);
        let Some(&(top, _)) = parsed.terms.first() else {
            return Ok(Self::zero_to_precision(field, prec));
        };
        let start = -top;
        if prec < start {
            return Err(Error::InvalidArgument(format!(
                "precision {prec} is below the leading index {start}"
            )));
        }
        let mut coeffs = vec![FieldElement::ZERO; (prec - start + 1) as usize];
        for (e, c) in parsed.terms {
            let idx = -e - start;
            if idx < coeffs.len() as i64 {
                coeffs[idx as usize] = c;
            }
        }
        Ok(Self::build(field, start, prec, coeffs, None))
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// The exact rational function this series expands, when known.
    pub fn exact_value(&self) -> Option<&RationalFunction> {
        self.exact.as_ref()
    }

    /// Forgets the exact value, keeping only the certified coefficients.
    pub fn without_exact(&self) -> Self {
        let mut s = self.clone();
        if !s.is_exact_zero() {
            s.exact = None;
        }
        s
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.exact.as_ref().is_some_and(|r| r.is_zero())
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty() && !self.is_exact_zero()
    }

    pub fn valuation(&self) -> Valuation {
        if !self.coeffs.is_empty() {
            Valuation::Finite(self.start)
        } else if self.is_exact_zero() {
            Valuation::Infinite
        } else {
            Valuation::AtLeast(self.start)
        }
    }

    /// Certified valuation of a nonzero series.
    pub fn val(&self) -> Result<i64> {
        match self.valuation() {
            Valuation::Finite(v) => Ok(v),
            Valuation::Infinite => Err(Error::DivisionByZero),
            Valuation::AtLeast(_) => Err(Error::UncertainValuation),
        }
    }

    pub fn abs_val(&self) -> Result<AbsValue> {
        match self.valuation() {
            Valuation::Finite(v) => Ok(AbsValue::QPower(-v)),
            Valuation::Infinite => Ok(AbsValue::Zero),
            Valuation::AtLeast(_) => Err(Error::UncertainValuation),
        }
    }

    /// Coefficient of `X^-i`; `None` past the precision.
    pub fn coeff(&self, i: i64) -> Option<FieldElement> {
        if i > self.prec {
            None
        } else if i < self.start {
            Some(FieldElement::ZERO)
        } else {
            Some(self.coeffs[(i - self.start) as usize])
        }
    }

    /// Certified coefficients for indices `from..=prec`.
    pub fn coeffs_from(&self, from: i64) -> Vec<FieldElement> {
        (from..=self.prec).map(|i| self.coeff(i).unwrap()).collect()
    }

    /// Lowers the precision to `prec` (no-op if already lower).
    pub fn truncate(&self, prec: i64) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        let keep = (prec - self.start + 1).max(0) as usize;
        let coeffs = self.coeffs.iter().take(keep).copied().collect();
        Self::build(&self.field, self.start, prec, coeffs, self.exact.clone())
    }

    /// Whether both series have equal coefficients through the smaller precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let prec = self.prec.min(other.prec);
        let lo = self.start.min(other.start);
        (lo..=prec).all(|i| self.coeff(i) == other.coeff(i))
    }

    fn check_field(&self, other: &Self) {
        assert!(self.field == other.field, "series over different fields");
    }

    pub fn neg(&self) -> Self {
        let k = &self.field;
        Self::build(
            k,
            self.start,
            self.prec,
            self.coeffs.iter().map(|&c| k.neg(c)).collect(),
            self.exact.as_ref().map(|r| -r),
        )
    }

    /// Sum; precision is the smaller of the two.
    pub fn add(&self, other: &Self) -> Self {
        self.check_field(other);
        let k = &self.field;
        let prec = self.prec.min(other.prec);
        let start = self.start.min(other.start).min(prec + 1);
        let coeffs = (start..=prec)
            .map(|i| k.add(self.coeff(i).unwrap(), other.coeff(i).unwrap()))
            .collect();
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        Self::build(k, start, prec, coeffs, exact)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn convolve(
        k: &FieldSpec,
        a_start: i64,
        a: &[FieldElement],
        b_start: i64,
        b: &[FieldElement],
        prec: i64,
    ) -> (i64, Vec<FieldElement>) {
        let start = a_start + b_start;
        let len = (prec - start + 1).max(0) as usize;
        let mut out = Vec::with_capacity(len);
        for t in 0..len {
            // sum over i + j = t with i < a.len(), j < b.len()
            let lo = t.saturating_sub(b.len().saturating_sub(1));
            let hi = t.min(a.len().saturating_sub(1));
            if a.is_empty() || b.is_empty() || lo > hi {
                out.push(FieldElement::ZERO);
                continue;
            }
            out.push(k.dot_rev(&a[lo..=hi], &b[t - hi..=t - lo]));
        }
        (start, out)
    }

    /// Product; precision `min(prec f + val g, prec g + val f)`.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_field(other);
        let k = &self.field;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::exact_zero(k, self.prec.min(other.prec));
        }
        let prec = (self.prec + other.start).min(other.prec + self.start);
        let (start, coeffs) =
            Self::convolve(k, self.start, &self.coeffs, other.start, &other.coeffs, prec);
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        Self::build(k, start, prec, coeffs, exact)
    }

    /// Product with an exact polynomial; precision drops by `deg p`.
    pub fn mul_poly(&self, p: &Poly) -> Self {
        let k = &self.field;
        let Some(d) = p.deg() else {
            return Self::exact_zero(k, self.prec);
        };
        if self.is_exact_zero() {
            return self.clone();
        }
        let prec = self.prec - d as i64;
        let rev: Vec<FieldElement> = (0..=d).map(|i| p.coeff(d - i)).collect();
        let (start, coeffs) =
            Self::convolve(k, self.start, &self.coeffs, -(d as i64), &rev, prec);
        let exact = self
            .exact
            .as_ref()
            .map(|r| r * &RationalFunction::from_poly(p.clone()));
        Self::build(k, start, prec, coeffs, exact)
    }

    /// Sum with an exact polynomial; precision unchanged.
    pub fn add_poly(&self, p: &Poly) -> Self {
        let ps = Self::from_poly(p, self.prec.max(-(p.deg().unwrap_or(0) as i64)))
            .expect("precision covers the polynomial");
        let mut s = self.add(&ps);
        if s.prec > self.prec {
            s = s.truncate(self.prec);
        }
        s
    }

    pub fn scale(&self, c: FieldElement) -> Self {
        let k = &self.field;
        if c.is_zero() {
            return Self::exact_zero(k, self.prec);
        }
        Self::build(
            k,
            self.start,
            self.prec,
            self.coeffs.iter().map(|&a| k.mul(a, c)).collect(),
            self.exact
                .as_ref()
                .map(|r| r * &RationalFunction::from_poly(Poly::constant(k, c))),
        )
    }

    /// Multiplicative inverse: valuation `-v`, precision `N - 2v`.
    pub fn invert(&self) -> Result<Self> {
        let k = &self.field;
        let v = self.val()?;
        let new_prec = self.prec - 2 * v;
        if new_prec < -v {
            return Err(Error::PrecisionExhausted {
                needed: -v,
                available: new_prec,
            });
        }
        let len = (new_prec + v + 1) as usize;
        let c = &self.coeffs;
        let h0 = k.inv(c[0])?;
        let neg_h0 = k.neg(h0);
        let mut h: Vec<FieldElement> = Vec::with_capacity(len);
        h.push(h0);
        for t in 1..len {
            // sum_{j=1..t} c[j] h[t - j]
            let hi = t.min(c.len() - 1);
            let s = if hi == 0 {
                FieldElement::ZERO
            } else {
                k.dot_rev(&c[1..=hi], &h[t - hi..t])
            };
            h.push(k.mul(neg_h0, s));
        }
        let exact = match &self.exact {
            Some(r) => Some(r.inv()?),
            None => None,
        };
        Ok(Self::build(k, -v, new_prec, h, exact))
    }

    /// Polynomial part: coefficients of index `<= 0`. Needs `prec >= 0`.
    pub fn integer_part(&self) -> Result<Poly> {
        if self.prec < 0 {
            return Err(Error::PrecisionExhausted {
                needed: 0,
                available: self.prec,
            });
        }
        if self.start > 0 {
            return Ok(Poly::zero(&self.field));
        }
        let top = (-self.start) as usize;
        let coeffs = (0..=top).map(|d| self.coeff(-(d as i64)).unwrap()).collect();
        Ok(Poly::from_coeffs(&self.field, coeffs))
    }

    /// `f - [f]`, an element of X^-1 O with the same precision. Needs `prec >= 0`.
    pub fn fractional_part(&self) -> Result<Self> {
        if self.prec < 0 {
            return Err(Error::PrecisionExhausted {
                needed: 0,
                available: self.prec,
            });
        }
        let from = self.start.max(1);
        let coeffs = self.coeffs_from(from);
        let exact = self.exact.as_ref().map(|r| r.fractional_part());
        Ok(Self::build(&self.field, from, self.prec, coeffs, exact))
    }

    /// `|self - other|` as a power of q.
    pub fn distance(&self, other: &Self) -> Result<AbsValue> {
        self.sub(other).abs_val()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(SeriesJson {
            val: self.start,
            prec: self.prec,
            coeffs: self.coeffs.iter().map(|&c| self.field.render(c)).collect(),
        })
        .expect("plain data")
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(i64, FieldElement)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (-(self.start + i as i64), c))
            .collect();
        if self.is_exact_zero() {
            return f.write_str("0");
        }
        if !terms.is_empty() {
            write!(
                f,
                "{} + ",
                crate::algebra::parse::render_terms(&self.field, &terms)
            )?;
        }
        write!(f, "O(X^{})", -(self.prec + 1))
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentSeries({self})")
    }
}
