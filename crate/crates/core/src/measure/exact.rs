//! Closed-form identities: total mass of nu, entropy, mean sojourn, and the
//! integral of `|g|^-2` over J.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{poly_count_of_degree, FieldSpec};

fn q_rat(k: &FieldSpec) -> BigRational {
    BigRational::from_integer(BigInt::from(k.order()))
}

fn q_pow_inv(k: &FieldSpec, e: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(k.order()).pow(e))
}

/// `sum_{deg a <= max_degree} nu(a)`, summed degree by degree.
pub fn nu_mass_partial(k: &FieldSpec, max_degree: u32) -> BigRational {
    (1..=max_degree).fold(BigRational::zero(), |acc, n| {
        let count = poly_count_of_degree(k, n as i64).expect("n >= 1");
        acc + BigRational::from_integer(BigInt::from(count)) * q_pow_inv(k, 2 * n)
    })
}

/// Partial sum `sum_{n <= max_degree} (q-1) q^n q^-2n (1/q)` of the integral
/// of `|g|^-2` over J: each degree-n translate of X^-1 O has mass `1/q` and
/// `|g|^-2 = q^-2n` on it.
pub fn verify_calcintegral(k: &FieldSpec, max_degree: u32) -> BigRational {
    let cell = BigRational::one() / q_rat(k);
    (1..=max_degree).fold(BigRational::zero(), |acc, n| {
        let count = poly_count_of_degree(k, n as i64).expect("n >= 1");
        acc + BigRational::from_integer(BigInt::from(count)) * q_pow_inv(k, 2 * n) * &cell
    })
}

/// `2 q ln q / (q - 1)`.
pub fn entropy_closed_form(k: &FieldSpec) -> f64 {
    let q = k.order() as f64;
    2.0 * q * q.ln() / (q - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropySeries {
    pub value: f64,
    /// The omitted tail `2 ln q sum_{n > D} n (q-1) q^-n`, bounding the error.
    pub tail_bound: f64,
}

/// `-sum_{deg a <= D} nu(a) ln nu(a) = 2 ln q sum_{n <= D} n (q-1) q^-n`.
pub fn entropy_series(k: &FieldSpec, tail_degree: u32) -> EntropySeries {
    let q = k.order() as f64;
    let lnq = q.ln();
    let value = (1..=tail_degree)
        .map(|n| 2.0 * lnq * n as f64 * (q - 1.0) * q.powi(-(n as i32)))
        .sum();
    // sum_{n > D} n x^n = x^(D+1) ((D+1) - D x) / (1-x)^2 with x = 1/q
    let x = 1.0 / q;
    let d = tail_degree as f64;
    let tail = x.powf(d + 1.0) * ((d + 1.0) - d * x) / (1.0 - x).powi(2);
    EntropySeries {
        value,
        tail_bound: 2.0 * lnq * (q - 1.0) * tail,
    }
}

/// Expected sojourn length `E[2 deg a] = 2q / (q - 1)` under nu.
pub fn mean_sojourn(k: &FieldSpec) -> BigRational {
    let q = BigInt::from(k.order());
    BigRational::new(BigInt::from(2) * &q, q - 1)
}
