//! The finite field k = F_q, prime or prime-power.
//!
//! Elements are stored as a packed base-p integer: digit `i` is the
//! coefficient of `t^i` in the representation modulo the defining polynomial.
//! All arithmetic goes through the [`FieldSpec`] handle, which is cheap to clone.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Extension fields up to this order get full addition/multiplication tables.
const TABLE_ORDER: u32 = 256;

/// An element of F_q, meaningful only together with its [`FieldSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// The packed index in `0..q`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    add: Vec<u16>,
    mul: Vec<u16>,
    inv: Vec<u16>,
    neg: Vec<u16>,
}

struct Inner {
    p: u32,
    n: u32,
    q: u32,
    /// Monic defining polynomial over F_p, low-to-high, length n + 1. `[0, 1]` for prime fields.
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// Description of k = F_q with q = p^n.
#[derive(Clone)]
pub struct FieldSpec(Arc<Inner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.n == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(
                f,
                "F_{}[t]/({})",
                self.0.p,
                render_fp_poly(&self.0.modulus, "t")
            )
        }
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn inv_mod_p(a: u32, p: u32) -> u32 {
    // a != 0 mod p
    let (mut r0, mut r1) = (p as i64, a as i64);
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let quo = r0 / r1;
        (r0, r1) = (r1, r0 - quo * r1);
        (s0, s1) = (s1, s0 - quo * s1);
    }
    s0.rem_euclid(p as i64) as u32
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p (both low-to-high).
fn fp_poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let sub = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn render_fp_poly(c: &[u32], var: &str) -> String {
    let mut terms = Vec::new();
    for (k, &v) in c.iter().enumerate().rev() {
        if v == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{k}"),
        };
        terms.push(match (v, k) {
            (_, 0) => v.to_string(),
            (1, _) => mono,
            _ => format!("{v}*{mono}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

impl FieldSpec {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// F_{p^n} defined by `modulus` (coefficients over F_p, low-to-high, degree n).
    ///
    /// The modulus is normalized to be monic and checked for irreducibility by
    /// trial division against every monic polynomial of degree at most n/2.
    pub fn new(p: u32, n: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        let q = (p as u64)
            .checked_pow(n)
            .filter(|&q| q <= MAX_ORDER as u64)
            .ok_or_else(|| Error::InvalidField(format!("{p}^{n} exceeds {MAX_ORDER}")))?
            as u32;
        let modulus = match (n, modulus) {
            (1, None) => vec![0, 1],
            (1, Some(m)) => {
                // a degree-1 modulus is accepted but irrelevant
                let m: Vec<u32> = m.into_iter().map(|c| c % p).collect();
                if m.len() != 2 || m[1] == 0 {
                    return Err(Error::InvalidField("modulus must have degree 1".into()));
                }
                vec![0, 1]
            }
            (_, None) => {
                return Err(Error::InvalidField(format!(
                    "modulus required for extension degree {n}"
                )))
            }
            (_, Some(m)) => {
                let mut m: Vec<u32> = m.into_iter().map(|c| c % p).collect();
                while m.last() == Some(&0) {
                    m.pop();
                }
                if m.len() != n as usize + 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus must have degree {n}"
                    )));
                }
                let li = inv_mod_p(m[n as usize], p);
                for c in m.iter_mut() {
                    *c = (*c as u64 * li as u64 % p as u64) as u32;
                }
                if !Self::is_irreducible(&m, p) {
                    return Err(Error::InvalidField(format!(
                        "modulus {} is reducible over F_{p}",
                        render_fp_poly(&m, "t")
                    )));
                }
                m
            }
        };
        let mut inner = Inner {
            p,
            n,
            q,
            modulus,
            tables: None,
        };
        if n > 1 && q <= TABLE_ORDER {
            inner.tables = Some(Self::build_tables(&inner));
        }
        Ok(FieldSpec(Arc::new(inner)))
    }

    fn is_irreducible(m: &[u32], p: u32) -> bool {
        let n = m.len() - 1;
        for d in 1..=n / 2 {
            // all monic polynomials of degree d
            let count = (p as u64).pow(d as u32);
            for code in 0..count {
                let mut cand = Vec::with_capacity(d + 1);
                let mut c = code;
                for _ in 0..d {
                    cand.push((c % p as u64) as u32);
                    c /= p as u64;
                }
                cand.push(1);
                if fp_poly_rem(m, &cand, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    fn build_tables(inner: &Inner) -> Tables {
        let q = inner.q as usize;
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        let mut neg = vec![0u16; q];
        let mut inv = vec![0u16; q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = Self::add_digits(inner, a as u32, b as u32) as u16;
                mul[a * q + b] = Self::mul_schoolbook(inner, a as u32, b as u32) as u16;
            }
            neg[a] = Self::neg_digits(inner, a as u32) as u16;
        }
        for a in 1..q {
            for b in 1..q {
                if mul[a * q + b] == 1 {
                    inv[a] = b as u16;
                    break;
                }
            }
        }
        Tables { add, mul, inv, neg }
    }

    fn digits_of(inner: &Inner, mut a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(inner.n as usize);
        for _ in 0..inner.n {
            d.push(a % inner.p);
            a /= inner.p;
        }
        d
    }

    fn pack(inner: &Inner, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * inner.p + c)
    }

    fn add_digits(inner: &Inner, a: u32, b: u32) -> u32 {
        let (da, db) = (Self::digits_of(inner, a), Self::digits_of(inner, b));
        let s: Vec<u32> = da
            .iter()
            .zip(&db)
            .map(|(x, y)| (x + y) % inner.p)
            .collect();
        Self::pack(inner, &s)
    }

    fn neg_digits(inner: &Inner, a: u32) -> u32 {
        let s: Vec<u32> = Self::digits_of(inner, a)
            .iter()
            .map(|&x| (inner.p - x) % inner.p)
            .collect();
        Self::pack(inner, &s)
    }

    fn mul_schoolbook(inner: &Inner, a: u32, b: u32) -> u32 {
        let (da, db) = (Self::digits_of(inner, a), Self::digits_of(inner, b));
        let p = inner.p as u64;
        let mut prod = vec![0u32; 2 * inner.n as usize - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p) as u32;
            }
        }
        let mut r = fp_poly_rem(&prod, &inner.modulus, inner.p);
        r.resize(inner.n as usize, 0);
        Self::pack(inner, &r)
    }

    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.n
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.n == 1
    }

    /// The monic defining polynomial over F_p, low-to-high.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.0.p as i64) as u32)
    }

    /// Element from its packed index; `None` if out of range.
    pub fn element(&self, index: u32) -> Option<FieldElement> {
        (index < self.0.q).then_some(FieldElement(index))
    }

    /// Element from its coordinates in the basis `1, t, ..., t^(n-1)`.
    pub fn from_digits(&self, digits: &[u32]) -> Result<FieldElement> {
        let inner = &self.0;
        if digits.len() > inner.n as usize {
            let reduced = fp_poly_rem(
                &digits.iter().map(|d| d % inner.p).collect::<Vec<_>>(),
                &inner.modulus,
                inner.p,
            );
            return self.from_digits(&reduced);
        }
        let mut d: Vec<u32> = digits.iter().map(|x| x % inner.p).collect();
        d.resize(inner.n as usize, 0);
        Ok(FieldElement(Self::pack(inner, &d)))
    }

    pub fn digits(&self, a: FieldElement) -> Vec<u32> {
        Self::digits_of(&self.0, a.0)
    }

    /// All q elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.0.q).map(FieldElement)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.0;
        if inner.n == 1 {
            let s = a.0 + b.0;
            FieldElement(if s >= inner.p { s - inner.p } else { s })
        } else if let Some(t) = &inner.tables {
            FieldElement(t.add[(a.0 * inner.q + b.0) as usize] as u32)
        } else {
            FieldElement(Self::add_digits(inner, a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let inner = &*self.0;
        if inner.n == 1 {
            FieldElement(if a.0 == 0 { 0 } else { inner.p - a.0 })
        } else if let Some(t) = &inner.tables {
            FieldElement(t.neg[a.0 as usize] as u32)
        } else {
            FieldElement(Self::neg_digits(inner, a.0))
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let inner = &*self.0;
        if inner.n == 1 {
            FieldElement((a.0 as u64 * b.0 as u64 % inner.p as u64) as u32)
        } else if let Some(t) = &inner.tables {
            FieldElement(t.mul[(a.0 * inner.q + b.0) as usize] as u32)
        } else {
            FieldElement(Self::mul_schoolbook(inner, a.0, b.0))
        }
    }

    /// Multiplicative inverse; `DivisionByZero` for zero.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inner = &*self.0;
        Ok(if inner.n == 1 {
            FieldElement(inv_mod_p(a.0, inner.p))
        } else if let Some(t) = &inner.tables {
            FieldElement(t.inv[a.0 as usize] as u32)
        } else {
            self.pow(a, inner.q as u64 - 2)
        })
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Convolution term `sum_i a[i] * b[len - 1 - i]` over equal-length slices.
    pub fn dot_rev(&self, a: &[FieldElement], b: &[FieldElement]) -> FieldElement {
        debug_assert_eq!(a.len(), b.len());
        let inner = &*self.0;
        if inner.n == 1 {
            // products are below 2^32, so 2^32 of them fit in a u64
            let acc: u64 = a
                .iter()
                .zip(b.iter().rev())
                .map(|(x, y)| x.0 as u64 * y.0 as u64)
                .sum();
            FieldElement((acc % inner.p as u64) as u32)
        } else {
            a.iter()
                .zip(b.iter().rev())
                .fold(FieldElement::ZERO, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
        }
    }

    /// Whether `a` lies in the prime subfield F_p.
    pub fn in_prime_subfield(&self, a: FieldElement) -> bool {
        a.0 < self.0.p
    }

    /// Text form: a decimal residue for prime-subfield elements, `[poly in t]` otherwise.
    pub fn render(&self, a: FieldElement) -> String {
        if self.in_prime_subfield(a) {
            a.0.to_string()
        } else {
            format!("[{}]", render_fp_poly(&self.digits(a), "t"))
        }
    }
}
