//! Artin continued fractions over F_q((1/X)) and the symbolic coding of the
//! geodesic flow on the Bruhat-Tits tree modulo PGL(2, F_q[X]).

pub mod algebra;
pub mod error;

pub use error::{Error, Result};
pub mod laurent;
pub mod artin;
pub mod moebius;
pub mod coding;
pub mod tree;
pub mod measure;
