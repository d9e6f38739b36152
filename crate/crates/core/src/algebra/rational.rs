//! The field of rational functions K = k(X).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::field::FieldSpec;
use super::poly::Poly;
use crate::error::{Error, Result};

/// A reduced fraction `num / den` with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl RationalFunction {
    /// Canonical form of `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = num.gcd(&den);
        let (mut num, mut den) = (num.div_exact(&g)?, den.div_exact(&g)?);
        let lc = den.leading();
        if lc != num.field().one() {
            let li = den.field().inv(lc)?;
            num = num.scale(li);
            den = den.scale(li);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_poly(p: Poly) -> Self {
        let den = Poly::one(p.field());
        RationalFunction { num: p, den }
    }

    pub fn zero(field: &FieldSpec) -> Self {
        Self::from_poly(Poly::zero(field))
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::from_poly(Poly::one(field))
    }

    pub fn field(&self) -> &FieldSpec {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    /// v_inf(num/den) = deg den - deg num; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        Some(self.den.deg()? as i64 - self.num.deg()? as i64)
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Self::new(&self.num * &other.den, &self.den * &other.num)
    }

    /// Euclidean quotient of num by den, i.e. the polynomial part.
    pub fn integer_part(&self) -> Poly {
        self.num.divmod(&self.den).expect("nonzero denominator").0
    }

    /// `self - integer_part(self)`, which has positive valuation or is zero.
    pub fn fractional_part(&self) -> Self {
        let r = self.num.divmod(&self.den).expect("nonzero denominator").1;
        RationalFunction {
            num: r,
            den: self.den.clone(),
        }
    }
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("nonzero denominator")
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominator")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

/// Finite continued fraction `[a0; a1, ..., am]` of a rational function by repeated
/// Euclidean division; `deg a_i >= 1` for `i >= 1`.
pub fn euclid_cf(f: &RationalFunction) -> Vec<Poly> {
    let mut out = Vec::new();
    let (mut a, mut b) = (f.num.clone(), f.den.clone());
    loop {
        let (q, r) = a.divmod(&b).expect("nonzero divisor");
        out.push(q);
        if r.is_zero() {
            break;
        }
        a = b;
        b = r;
    }
    out
}

/// Value of `a0 + 1/(a1 + 1/(... + 1/am))`, evaluated from the innermost term out.
pub fn eval_cf(terms: &[Poly]) -> Result<RationalFunction> {
    let (last, rest) = terms
        .split_last()
        .ok_or_else(|| Error::InvalidArgument("empty continued fraction".into()))?;
    let mut acc = RationalFunction::from_poly(last.clone());
    for a in rest.iter().rev() {
        acc = &RationalFunction::from_poly(a.clone()) + &acc.inv()?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_poly(k: &FieldSpec, rng: &mut impl Rng, max_deg: usize) -> Poly {
        let d = rng.gen_range(0..=max_deg);
        Poly::from_coeffs(
            k,
            (0..=d)
                .map(|_| k.element(rng.gen_range(0..k.order())).unwrap())
                .collect(),
        )
    }

    #[test]
    fn canonical_form() {
        let k = FieldSpec::prime(3).unwrap();
        // (2X^2 + 2X) / (2X) = X + 1
        let f = RationalFunction::new(
            Poly::from_ints(&k, &[0, 2, 2]),
            Poly::from_ints(&k, &[0, 2]),
        )
        .unwrap();
        assert_eq!(f.num(), &Poly::from_ints(&k, &[1, 1]));
        assert!(f.den().is_one());
        assert!(RationalFunction::new(Poly::x(&k), Poly::zero(&k)).is_err());
    }

    #[test]
    fn euclid_examples() {
        let k = FieldSpec::prime(2).unwrap();
        let x = Poly::x(&k);
        let f = RationalFunction::new(Poly::from_ints(&k, &[1, 0, 1]), x.clone()).unwrap();
        assert_eq!(euclid_cf(&f), vec![x.clone(), x.clone()]);
        assert_eq!(euclid_cf(&RationalFunction::from_poly(x.clone())), vec![x]);
    }

    #[test]
    fn euclid_round_trip_f3() {
        let k = FieldSpec::prime(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let num = random_poly(&k, &mut rng, 10);
            let mut den = random_poly(&k, &mut rng, 10);
            if den.is_zero() {
                den = Poly::one(&k);
            }
            let f = RationalFunction::new(num, den).unwrap();
            let terms = euclid_cf(&f);
            assert!(terms[1..].iter().all(|a| a.deg().unwrap_or(0) >= 1));
            assert_eq!(eval_cf(&terms).unwrap(), f);
        }
    }

    #[test]
    fn parts_split() {
        let k = FieldSpec::prime(3).unwrap();
        let f = RationalFunction::new(
            Poly::from_ints(&k, &[1, 0, 0, 1]),
            Poly::from_ints(&k, &[2, 1]),
        )
        .unwrap();
        let sum = &RationalFunction::from_poly(f.integer_part()) + &f.fractional_part();
        assert_eq!(sum, f);
        assert!(f.fractional_part().valuation().is_none_or(|v| v >= 1));
    }
}
