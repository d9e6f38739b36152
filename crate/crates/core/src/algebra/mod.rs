//! Exact arithmetic in k = F_q, A = k[X] and K = k(X).

pub mod field;
pub mod parse;
pub mod poly;
pub mod rational;

pub use field::{FieldElement, FieldSpec};
pub use parse::{caret_diagnostic, parse_fp_poly, parse_poly, parse_terms};
pub use poly::{poly_count_of_degree, Degree, Poly};
pub use rational::{euclid_cf, eval_cf, RationalFunction};
