//! The projective line P^1(K) and homographies with entries in A = k[X].

use std::fmt;

use crate::algebra::{FieldElement, FieldSpec, Poly, RationalFunction};
use crate::error::{Error, Result};
use crate::laurent::{LaurentSeries, Valuation};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ProjPoint {
    Finite(RationalFunction),
    Infinity,
}

impl ProjPoint {
    pub fn zero(k: &FieldSpec) -> Self {
        ProjPoint::Finite(RationalFunction::zero(k))
    }

    pub fn one(k: &FieldSpec) -> Self {
        ProjPoint::Finite(RationalFunction::one(k))
    }

    pub fn from_poly(p: Poly) -> Self {
        ProjPoint::Finite(RationalFunction::from_poly(p))
    }

    pub fn finite(self) -> Option<RationalFunction> {
        match self {
            ProjPoint::Finite(f) => Some(f),
            ProjPoint::Infinity => None,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, ProjPoint::Infinity)
    }

    /// Homogeneous coordinates `(x, y)` with `x / y` the point.
    fn homogeneous(&self, k: &FieldSpec) -> (Poly, Poly) {
        match self {
            ProjPoint::Finite(f) => (f.num().clone(), f.den().clone()),
            ProjPoint::Infinity => (Poly::one(k), Poly::zero(k)),
        }
    }

    fn from_homogeneous(x: Poly, y: Poly) -> Self {
        if y.is_zero() {
            ProjPoint::Infinity
        } else {
            ProjPoint::Finite(RationalFunction::new(x, y).expect("nonzero denominator"))
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjPoint::Finite(r) => r.fmt(f),
            ProjPoint::Infinity => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjPoint({self})")
    }
}

fn det2(x: &(Poly, Poly), y: &(Poly, Poly)) -> Poly {
    &(&x.0 * &y.1) - &(&x.1 * &y.0)
}

/// `z -> (a z + b) / (c z + d)`, stored in canonical form: the entries have no
/// common factor and the first nonzero one (in the order a, b, c, d) is monic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Homography {
    a: Poly,
    b: Poly,
    c: Poly,
    d: Poly,
}

impl Homography {
    pub fn new(a: Poly, b: Poly, c: Poly, d: Poly) -> Result<Self> {
        let det = &(&a * &d) - &(&b * &c);
        if det.is_zero() {
            return Err(Error::InvalidArgument("singular matrix".into()));
        }
        Ok(Self::canonical(a, b, c, d))
    }

    fn canonical(a: Poly, b: Poly, c: Poly, d: Poly) -> Self {
        let g = a.gcd(&b).gcd(&c).gcd(&d);
        let [a, b, c, d] = [a, b, c, d].map(|e| e.div_exact(&g).expect("content divides"));
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|e| !e.is_zero())
            .expect("nonsingular")
            .leading();
        let k = a.field().clone();
        let s = k.inv(lead).expect("nonzero leading coefficient");
        let [a, b, c, d] = [a, b, c, d].map(|e| e.scale(s));
        Homography { a, b, c, d }
    }

    pub fn identity(k: &FieldSpec) -> Self {
        Homography {
            a: Poly::one(k),
            b: Poly::zero(k),
            c: Poly::zero(k),
            d: Poly::one(k),
        }
    }

    /// The involution `i: z -> 1/z`.
    pub fn inversion(k: &FieldSpec) -> Self {
        Homography {
            a: Poly::zero(k),
            b: Poly::one(k),
            c: Poly::one(k),
            d: Poly::zero(k),
        }
    }

    /// `t_a: z -> z + a`.
    pub fn translation(a: &Poly) -> Self {
        let k = a.field();
        Homography {
            a: Poly::one(k),
            b: a.clone(),
            c: Poly::zero(k),
            d: Poly::one(k),
        }
    }

    /// `z -> u z` for `u` in k^x.
    pub fn dilation(k: &FieldSpec, u: FieldElement) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::InvalidArgument("dilation by zero".into()));
        }
        Ok(Self::canonical(
            Poly::constant(k, u),
            Poly::zero(k),
            Poly::zero(k),
            Poly::one(k),
        ))
    }

    /// `lambda_alpha = diag(alpha, 1/alpha)`, i.e. `z -> alpha^2 z`.
    pub fn lambda(k: &FieldSpec, alpha: FieldElement) -> Result<Self> {
        Self::dilation(k, k.mul(alpha, alpha))
    }

    pub fn field(&self) -> &FieldSpec {
        self.a.field()
    }

    pub fn entries(&self) -> [&Poly; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn det(&self) -> Poly {
        &(&self.a * &self.d) - &(&self.b * &self.c)
    }

    /// Membership in PGL(2, A): the determinant of the canonical form is a unit.
    pub fn is_in_gamma(&self) -> bool {
        self.det().is_unit()
    }

    /// Matrix product `self * other`, i.e. `self` after `other`.
    pub fn compose(&self, o: &Self) -> Self {
        let m = |x: &Poly, y: &Poly, z: &Poly, w: &Poly| &(x * y) + &(z * w);
        Self::canonical(
            m(&self.a, &o.a, &self.b, &o.c),
            m(&self.a, &o.b, &self.b, &o.d),
            m(&self.c, &o.a, &self.d, &o.c),
            m(&self.c, &o.b, &self.d, &o.d),
        )
    }

    pub fn inverse(&self) -> Self {
        Self::canonical(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let (x, y) = p.homogeneous(self.field());
        ProjPoint::from_homogeneous(
            &(&self.a * &x) + &(&self.b * &y),
            &(&self.c * &x) + &(&self.d * &y),
        )
    }

    /// Image of a series; fails with `Pole` when `c f + d` is exactly zero.
    pub fn apply_series(&self, f: &LaurentSeries) -> Result<LaurentSeries> {
        let num = f.mul_poly(&self.a).add_poly(&self.b);
        let den = f.mul_poly(&self.c).add_poly(&self.d);
        if den.is_exact_zero() {
            return Err(Error::Pole);
        }
        Ok(num.mul(&den.invert()?))
    }

    /// Exponent `e` with `|h'(f)| = q^e`, i.e. `deg det + 2 v(c f + d)`.
    pub fn j_infinity(&self, f: &LaurentSeries) -> Result<i64> {
        let den = f.mul_poly(&self.c).add_poly(&self.d);
        let v = match den.valuation() {
            Valuation::Finite(v) => v,
            Valuation::Infinite => return Err(Error::Pole),
            Valuation::AtLeast(_) => return Err(Error::UncertainValuation),
        };
        let det = self.det().deg().expect("nonsingular") as i64;
        Ok(det + 2 * v)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let s = |p: &Poly| serde_json::Value::String(p.to_string());
        serde_json::json!([[s(&self.a), s(&self.b)], [s(&self.c), s(&self.d)]])
    }
}

impl fmt::Display for Homography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Debug for Homography {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Homography{self}")
    }
}

/// The unique homography sending `inf, 1, 0` to `p, r, s`.
pub fn homography_from_triple(p: &ProjPoint, r: &ProjPoint, s: &ProjPoint) -> Result<Homography> {
    let k = match (p, r, s) {
        (ProjPoint::Finite(f), _, _) | (_, ProjPoint::Finite(f), _) | (_, _, ProjPoint::Finite(f)) => {
            f.field().clone()
        }
        _ => return Err(Error::DegeneratePoints),
    };
    let (p, r, s) = (p.homogeneous(&k), r.homogeneous(&k), s.homogeneous(&k));
    let alpha = det2(&r, &s);
    let beta = det2(&p, &r);
    if alpha.is_zero() || beta.is_zero() || det2(&p, &s).is_zero() {
        return Err(Error::DegeneratePoints);
    }
    // columns: alpha * P (image of inf) and beta * S (image of 0); their sum is R
    Ok(Homography::canonical(
        &alpha * &p.0,
        &beta * &s.0,
        &alpha * &p.1,
        &beta * &s.1,
    ))
}

/// The involution fixing `fix` and exchanging the two points of `swap`.
pub fn involution_through(fix: &ProjPoint, swap: (&ProjPoint, &ProjPoint)) -> Result<Homography> {
    let g = homography_from_triple(swap.0, fix, swap.1)?;
    let k = g.field().clone();
    Ok(g.compose(&Homography::inversion(&k)).compose(&g.inverse()))
}

/// `z -> u z + a` with `u` in k^x.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub u: FieldElement,
    pub a: Poly,
}

impl AffineMap {
    pub fn new(u: FieldElement, a: Poly) -> Result<Self> {
        if u.is_zero() {
            return Err(Error::InvalidArgument("affine multiplier must be nonzero".into()));
        }
        Ok(AffineMap { u, a })
    }

    pub fn identity(k: &FieldSpec) -> Self {
        AffineMap {
            u: k.one(),
            a: Poly::zero(k),
        }
    }

    pub fn field(&self) -> &FieldSpec {
        self.a.field()
    }

    /// `(u, a) o (u', a') = (u u', u a' + a)`.
    pub fn compose(&self, o: &Self) -> Self {
        let k = self.field();
        AffineMap {
            u: k.mul(self.u, o.u),
            a: &o.a.scale(self.u) + &self.a,
        }
    }

    /// `(u, a)^-1 = (1/u, -a/u)`.
    pub fn inverse(&self) -> Self {
        let k = self.field();
        let w = k.inv(self.u).expect("nonzero multiplier");
        AffineMap {
            u: w,
            a: (-&self.a).scale(w),
        }
    }

    /// Membership in the subgroup of affine maps with a non-constant translation part.
    pub fn in_gamma_prime(&self) -> bool {
        self.a.deg().is_some_and(|d| d >= 1)
    }

    pub fn to_homography(&self) -> Homography {
        let k = self.field();
        Homography::canonical(
            Poly::constant(k, self.u),
            self.a.clone(),
            Poly::zero(k),
            Poly::one(k),
        )
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.field().render(self.u), self.a)
    }
}

impl fmt::Debug for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineMap{self}")
    }
}

/// Reads `h` as `z -> u z + a` with `a` in A.
pub fn affine_decompose(h: &Homography) -> Result<AffineMap> {
    if !h.c.is_zero() {
        return Err(Error::NotAffine);
    }
    if !h.a.is_unit() || !h.d.is_unit() {
        return Err(Error::NotInGamma);
    }
    let k = h.field();
    let dinv = k.inv(h.d.leading())?;
    AffineMap::new(k.mul(h.a.leading(), dinv), h.b.scale(dinv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(k: &FieldSpec, num: &[i64], den: &[i64]) -> ProjPoint {
        ProjPoint::Finite(
            RationalFunction::new(Poly::from_ints(k, num), Poly::from_ints(k, den)).unwrap(),
        )
    }

    #[test]
    fn inversion_swaps_zero_and_infinity() {
        let k = FieldSpec::prime(3).unwrap();
        let i = Homography::inversion(&k);
        assert_eq!(i.apply(&ProjPoint::zero(&k)), ProjPoint::Infinity);
        assert_eq!(i.apply(&ProjPoint::Infinity), ProjPoint::zero(&k));
        assert_eq!(i.apply(&ProjPoint::one(&k)), ProjPoint::one(&k));
        assert_eq!(i.compose(&i), Homography::identity(&k));
        let t = Homography::translation(&Poly::x(&k));
        assert_eq!(t.apply(&ProjPoint::zero(&k)), ProjPoint::from_poly(Poly::x(&k)));
    }

    #[test]
    fn series_image_under_i_t_x() {
        let k = FieldSpec::prime(2).unwrap();
        let x = Poly::x(&k);
        let f = LaurentSeries::parse(&k, "X^-1 + X^-3 + X^-5 + O(X^-21)", 0).unwrap();
        let h = Homography::inversion(&k).compose(&Homography::translation(&x));
        let g = h.apply_series(&f).unwrap();
        // multiply back: g * (X + f) = 1
        let back = g.mul(&f.add_poly(&x));
        assert!(back.agrees_with(&LaurentSeries::from_poly(&Poly::one(&k), back.prec()).unwrap()));
        assert!(back.prec() >= 18);
        assert!(matches!(
            Homography::inversion(&k).apply_series(&LaurentSeries::exact_zero(&k, 4)),
            Err(Error::Pole)
        ));
    }

    #[test]
    fn affine_group_law() {
        let k = FieldSpec::prime(3).unwrap();
        let m = AffineMap::new(k.one(), Poly::x(&k)).unwrap();
        assert_eq!(m.inverse(), AffineMap::new(k.one(), Poly::from_ints(&k, &[0, 2])).unwrap());
        let n = AffineMap::new(k.from_int(2), Poly::from_ints(&k, &[1, 1, 1])).unwrap();
        assert_eq!(
            m.compose(&n).to_homography(),
            m.to_homography().compose(&n.to_homography())
        );
        assert_eq!(n.compose(&n.inverse()), AffineMap::identity(&k));
        // t_a lambda_alpha = lambda_alpha t_{a / alpha^2}
        let alpha = k.from_int(2);
        let a = Poly::from_ints(&k, &[1, 2]);
        let lam = Homography::lambda(&k, alpha).unwrap();
        let a2 = a.scale(k.inv(k.mul(alpha, alpha)).unwrap());
        assert_eq!(
            Homography::translation(&a).compose(&lam),
            lam.compose(&Homography::translation(&a2))
        );
    }

    #[test]
    fn decompose() {
        let k = FieldSpec::prime(5).unwrap();
        let x = Poly::x(&k);
        let t = Homography::translation(&x);
        let m = affine_decompose(&t).unwrap();
        assert_eq!((m.u, m.a.clone()), (k.one(), x.clone()));
        assert!(m.in_gamma_prime());
        let d = Homography::dilation(&k, k.from_int(3)).unwrap();
        let m = affine_decompose(&d).unwrap();
        assert_eq!((m.u, m.a.is_zero()), (k.from_int(3), true));
        assert!(!m.in_gamma_prime());
        let i = Homography::inversion(&k);
        assert_eq!(affine_decompose(&i.compose(&t).compose(&i)), Err(Error::NotAffine));
        // scaled representatives decompose the same way
        let h = Homography::new(
            Poly::constant(&k, k.from_int(2)),
            x.scale(k.from_int(4)),
            Poly::zero(&k),
            Poly::constant(&k, k.from_int(4)),
        )
        .unwrap();
        let m = affine_decompose(&h).unwrap();
        assert_eq!((m.u, m.a), (k.from_int(3), x));
    }

    #[test]
    fn triples() {
        let k = FieldSpec::prime(2).unwrap();
        let (zero, one, inf) = (ProjPoint::zero(&k), ProjPoint::one(&k), ProjPoint::Infinity);
        assert_eq!(
            homography_from_triple(&inf, &one, &zero).unwrap(),
            Homography::identity(&k)
        );
        assert_eq!(
            homography_from_triple(&zero, &one, &inf).unwrap(),
            Homography::inversion(&k)
        );
        assert_eq!(
            homography_from_triple(&zero, &zero, &inf),
            Err(Error::DegeneratePoints)
        );
        assert_eq!(
            involution_through(&one, (&zero, &inf)).unwrap(),
            Homography::inversion(&k)
        );
    }

    #[test]
    fn involution_fixing_zero() {
        let k = FieldSpec::prime(2).unwrap();
        let zero = ProjPoint::zero(&k);
        let p = rat(&k, &[1], &[0, 1]);
        let m = involution_through(&zero, (&ProjPoint::Infinity, &p)).unwrap();
        // z -> z / (X z + 1)
        let expect = Homography::new(
            Poly::one(&k),
            Poly::zero(&k),
            Poly::x(&k),
            Poly::one(&k),
        )
        .unwrap();
        assert_eq!(m, expect);
        assert_eq!(m.apply(&zero), zero);
        assert_eq!(m.apply(&ProjPoint::Infinity), p);
        assert_eq!(m.apply(&p), ProjPoint::Infinity);
        assert_eq!(m.compose(&m), Homography::identity(&k));
    }

    #[test]
    fn cocycle_examples() {
        let k = FieldSpec::prime(3).unwrap();
        let f = LaurentSeries::parse(&k, "X^-1 + 2*X^-4 + O(X^-30)", 0).unwrap();
        assert_eq!(Homography::inversion(&k).j_infinity(&f).unwrap(), 2);
        let a = Poly::from_ints(&k, &[1, 0, 2]);
        assert_eq!(Homography::translation(&a).j_infinity(&f).unwrap(), 0);
        // z -> X^-1 z + 2 has derivative X^-1
        let h = Homography::new(
            Poly::one(&k),
            Poly::from_ints(&k, &[0, 2]),
            Poly::zero(&k),
            Poly::x(&k),
        )
        .unwrap();
        let g = LaurentSeries::parse(&k, "2 + X^-2 + O(X^-30)", 0).unwrap();
        assert_eq!(h.j_infinity(&g).unwrap(), -1);
        assert_eq!(
            Homography::inversion(&k).j_infinity(&LaurentSeries::exact_zero(&k, 3)),
            Err(Error::Pole)
        );
    }

    #[test]
    fn json_form() {
        let k = FieldSpec::prime(2).unwrap();
        assert_eq!(
            Homography::translation(&Poly::x(&k)).to_json(),
            serde_json::json!([["1", "X"], ["0", "1"]])
        );
    }
}
