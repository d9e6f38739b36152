#![allow(dead_code)]

use artin_flow::algebra::{FieldSpec, Poly, RationalFunction};
use artin_flow::measure::RngStream;

pub fn field(q: u32) -> FieldSpec {
    match q {
        4 => FieldSpec::new(2, 2, Some(vec![1, 1, 1])).unwrap(),
        9 => FieldSpec::new(3, 2, Some(vec![1, 0, 1])).unwrap(),
        p => FieldSpec::prime(p).unwrap(),
    }
}

/// Uniform polynomial of degree exactly `deg`.
pub fn poly_of_degree(k: &FieldSpec, rng: &mut RngStream, deg: usize) -> Poly {
    let mut c: Vec<_> = (0..deg).map(|_| rng.element(k)).collect();
    c.push(rng.nonzero_element(k));
    Poly::from_coeffs(k, c)
}

/// Polynomial of degree `< bound` (possibly zero).
pub fn poly_below(k: &FieldSpec, rng: &mut RngStream, bound: usize) -> Poly {
    Poly::from_coeffs(k, (0..bound).map(|_| rng.element(k)).collect())
}

/// A nonzero `P/Q` in X^-1 O with `1 <= deg Q <= max_den_deg`.
pub fn rational_in_unit_ball(k: &FieldSpec, rng: &mut RngStream, max_den_deg: u32) -> RationalFunction {
    let dq = 1 + rng.below(max_den_deg) as usize;
    let q = poly_of_degree(k, rng, dq);
    loop {
        let p = poly_below(k, rng, dq);
        if !p.is_zero() {
            return RationalFunction::new(p, q).unwrap();
        }
    }
}

/// Valuation at infinity of a nonzero rational function.
pub fn val(r: &RationalFunction) -> i64 {
    r.den().deg().unwrap() as i64 - r.num().deg().unwrap() as i64
}

/// Elementary divisors over O = k[[1/X]] of a nonsingular 2x2 matrix over K,
/// by pivoting on an entry of minimal valuation; returns `v(d2) - v(d1)`, the
/// tree distance between the standard vertex and its image.
pub fn smith_distance(m: [[RationalFunction; 2]; 2]) -> i64 {
    let mut m = m;
    let (mut bi, mut bj) = (0, 0);
    let mut best = i64::MAX;
    for i in 0..2 {
        for j in 0..2 {
            if !m[i][j].is_zero() && val(&m[i][j]) < best {
                best = val(&m[i][j]);
                (bi, bj) = (i, j);
            }
        }
    }
    m.swap(0, bi);
    for row in m.iter_mut() {
        row.swap(0, bj);
    }
    let p = m[0][0].clone();
    // row and column operations with multipliers in O (valuation >= 0)
    let r = m[1][0].div(&p).unwrap();
    assert!(r.is_zero() || val(&r) >= 0);
    let new11 = &m[1][1] - &(&r * &m[0][1]);
    let c = m[0][1].div(&p).unwrap();
    assert!(c.is_zero() || val(&c) >= 0);
    // after clearing m[1][0], clearing m[0][1] leaves m[1][1] unchanged
    let _ = c;
    val(&new11) - val(&p)
}

/// Polynomial of uniformly chosen exact degree in `lo..hi`.
pub fn poly_deg_in(k: &FieldSpec, rng: &mut RngStream, lo: usize, hi: usize) -> Poly {
    let d = lo + rng.below((hi - lo) as u32) as usize;
    poly_of_degree(k, rng, d)
}
