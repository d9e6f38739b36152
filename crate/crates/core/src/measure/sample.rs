//! Exact samplers for nu, Haar measure and the invariant measure m.

use super::RngStream;
use crate::algebra::{FieldSpec, Poly};
use crate::coding::GeodesicSection;
use crate::laurent::LaurentSeries;
use crate::moebius::Homography;

/// Draws `a` in A - k with probability `q^(-2 deg a)`: the degree is geometric
/// with `P(deg = n) = (q-1) q^-n`, then `a` is uniform among the `(q-1) q^n`
/// polynomials of that degree.
pub fn sample_nu(k: &FieldSpec, rng: &mut RngStream) -> Poly {
    let q = k.order();
    let mut n = 1;
    while rng.below(q) == 0 {
        n += 1;
    }
    let mut coeffs: Vec<_> = (0..n).map(|_| rng.element(k)).collect();
    coeffs.push(rng.nonzero_element(k));
    Poly::from_coeffs(k, coeffs)
}

/// Haar measure on X^-1 O: independent uniform coefficients at indices `1..=prec`.
pub fn sample_haar(k: &FieldSpec, rng: &mut RngStream, prec: i64) -> LaurentSeries {
    sample_ball(k, rng, 1, prec)
}

/// Haar measure on the ball `X^-from O`.
pub fn sample_ball(k: &FieldSpec, rng: &mut RngStream, from: i64, prec: i64) -> LaurentSeries {
    let coeffs = (from..=prec).map(|_| rng.element(k)).collect();
    LaurentSeries::from_coeffs(k, from, coeffs, prec)
}

/// A section drawn from m.
///
/// On the rectangle `{[xi_minus] = a}` the density `1/|xi_plus - xi_minus|^2`
/// is the constant `|a|^-2`, so m restricted to it is the product of Haar
/// measures with total mass `nu(a)`. Hence: draw `a ~ nu`, then the fractional
/// part of `xi_minus` and `xi_plus` independently from Haar. A forward endpoint
/// that vanishes to precision (probability `q^-prec`) is redrawn.
pub fn sample_m(k: &FieldSpec, rng: &mut RngStream, prec: i64) -> GeodesicSection {
    let a = sample_nu(k, rng);
    let xi_minus = sample_haar(k, rng, prec).add_poly(&a);
    loop {
        let xi_plus = sample_haar(k, rng, prec);
        if !xi_plus.is_zero_to_precision() {
            return GeodesicSection::new(xi_minus, xi_plus).expect("admissible by construction");
        }
    }
}

/// A random element of PGL(2, A) as a product of at most `max_len` generators
/// `i`, `t_a` (`deg a <= 3`) and `lambda_alpha`.
pub fn sample_gamma(k: &FieldSpec, rng: &mut RngStream, max_len: u32) -> Homography {
    let len = 1 + rng.below(max_len);
    let mut h = Homography::identity(k);
    for _ in 0..len {
        let g = match rng.below(3) {
            0 => Homography::inversion(k),
            1 => {
                let deg = rng.below(4) as usize;
                let coeffs = (0..=deg).map(|_| rng.element(k)).collect();
                Homography::translation(&Poly::from_coeffs(k, coeffs))
            }
            _ => Homography::lambda(k, rng.nonzero_element(k)).expect("nonzero"),
        };
        h = h.compose(&g);
    }
    h
}
