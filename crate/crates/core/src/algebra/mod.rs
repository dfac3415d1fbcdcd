//! Finite fields, polynomials and the algorithms built on them.

pub mod factor;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod resultant;

pub use factor::{factor, is_irreducible, squarefree, Factorization};
pub use field::{ExtField, FiniteField, FqField};
pub use poly::{Poly, PolyRing};
pub use resultant::resultant;
