//! Scattered linearized polynomials ψ^(k) over GF(q^{2t}), the maximum
//! scattered linear sets they define on PG(1, q^n), and the MRD codes built
//! from them, with exhaustive checkers for small fields.

pub mod acceptance;
pub mod error;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod linear_sets;
pub mod linpoly;
pub mod rank_codes;
pub mod scattered;

pub use error::{Error, Result};
pub use field::{build_field, Felt, FieldCtx, FieldSpec, Level};
pub use linpoly::LinPoly;

/// Greatest common divisor.
pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
