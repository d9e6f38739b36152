//! The polynomial ring A = k[X].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::{FieldElement, FieldSpec};
use crate::error::{Error, Result};

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial over k, coefficients little-endian (index = degree), no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    field: FieldSpec,
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(i64, FieldElement)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, &c)| (k as i64, c))
            .collect();
        f.write_str(&super::parse::render_terms(&self.field, &terms))
    }
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl Poly {
    pub fn zero(field: &FieldSpec) -> Self {
        Poly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::constant(field, FieldElement::ONE)
    }

    pub fn constant(field: &FieldSpec, c: FieldElement) -> Self {
        Self::from_coeffs(field, vec![c])
    }

    /// The indeterminate X.
    pub fn x(field: &FieldSpec) -> Self {
        Self::monomial(field, FieldElement::ONE, 1)
    }

    pub fn monomial(field: &FieldSpec, c: FieldElement, deg: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(field, coeffs)
    }

    /// Builds a polynomial from little-endian coefficients, trimming trailing zeros.
    pub fn from_coeffs(field: &FieldSpec, mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly {
            field: field.clone(),
            coeffs,
        }
    }

    /// Convenience constructor from integer coefficients (prime-subfield residues).
    pub fn from_ints(field: &FieldSpec, coeffs: &[i64]) -> Self {
        Self::from_coeffs(field, coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Coefficient of X^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FieldElement::ONE
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree as an integer, `None` for zero.
    pub fn deg(&self) -> Option<usize> {
        self.degree().finite()
    }

    /// Whether the polynomial is a nonzero constant, i.e. a unit of A.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn leading(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == FieldElement::ONE
    }

    fn check_field(&self, other: &Poly) {
        assert!(self.field == other.field, "polynomials over different fields");
    }

    pub fn scale(&self, c: FieldElement) -> Poly {
        let k = &self.field;
        Poly::from_coeffs(k, self.coeffs.iter().map(|&a| k.mul(a, c)).collect())
    }

    /// Multiplication by X^s.
    pub fn shift(&self, s: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![FieldElement::ZERO; s];
        coeffs.extend_from_slice(&self.coeffs);
        Poly {
            field: self.field.clone(),
            coeffs,
        }
    }

    /// Scales to a monic polynomial; zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.field.inv(self.leading()) {
            Ok(li) => self.scale(li),
            Err(_) => self.clone(),
        }
    }

    /// Euclidean division: `self = q * b + r` with `deg r < deg b`.
    pub fn divmod(&self, b: &Poly) -> Result<(Poly, Poly)> {
        self.check_field(b);
        let k = &self.field;
        let db = b.deg().ok_or(Error::DivisionByZero)?;
        let lead_inv = k.inv(b.leading())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(k), self.clone()));
        }
        let mut quo = vec![FieldElement::ZERO; rem.len() - db];
        for i in (db..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let f = k.mul(c, lead_inv);
            quo[i - db] = f;
            for (j, &bj) in b.coeffs.iter().enumerate() {
                let idx = i - db + j;
                rem[idx] = k.sub(rem[idx], k.mul(f, bj));
            }
        }
        rem.truncate(db);
        Ok((Poly::from_coeffs(k, quo), Poly::from_coeffs(k, rem)))
    }

    pub fn div_exact(&self, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divmod(b)?;
        if !r.is_zero() {
            return Err(Error::Consistency(format!("{b} does not divide {self}")));
        }
        Ok(q)
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.check_field(other);
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.divmod(&b).expect("nonzero divisor").1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Evaluation at a point of k (Horner).
    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let k = &self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| k.add(k.mul(acc, x), c))
    }

    /// Total order used for canonical forms: by degree, then coefficients from the top.
    pub fn cmp_canonical(&self, other: &Poly) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_field(rhs);
        let k = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs(k, (0..n).map(|i| k.add(self.coeff(i), rhs.coeff(i))).collect())
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_field(rhs);
        let k = &self.field;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs(k, (0..n).map(|i| k.sub(self.coeff(i), rhs.coeff(i))).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        let k = &self.field;
        Poly::from_coeffs(k, self.coeffs.iter().map(|&c| k.neg(c)).collect())
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_field(rhs);
        let k = &self.field;
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(k);
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = k.add(out[i + j], k.mul(a, b));
            }
        }
        Poly::from_coeffs(k, out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Number of polynomials of exact degree `n >= 1` over F_q, namely (q - 1) q^n.
pub fn poly_count_of_degree(field: &FieldSpec, n: i64) -> Result<u128> {
    if n <= 0 {
        return Err(Error::InvalidArgument(format!(
            "degree must be positive, got {n}"
        )));
    }
    let q = field.order() as u128;
    u32::try_from(n)
        .ok()
        .and_then(|n| q.checked_pow(n))
        .map(|qn| (q - 1) * qn)
        .ok_or_else(|| Error::InvalidArgument(format!("count overflows for degree {n}")))
}
