//! Exact arithmetic for F_q and its extensions, polynomial arithmetic,
//! factorization-adjacent predicates, and the arithmetic functions built on
//! prime enumeration.
//!
//! Everything here is immutable after construction and safe to share across
//! threads; prime tables and square tables are built once and read many
//! times.

pub mod ext;
pub mod factor;
pub mod fp;
pub mod poly;
pub mod primes;

pub use ext::{poly_eval, ExtField, FieldSpec};
pub use factor::{factorize, is_irreducible, is_squarefree, mobius, von_mangoldt};
pub use poly::Poly;
pub use primes::{lambda_degree_sum, prime_count_formula, primes_of_degree, PrimeTable};
