//! Exact-arithmetic criteria for nefness and semiampleness of (para)symmetric
//! divisors on the moduli spaces of stable `n`-pointed rational curves.
//!
//! Everything here is combinatorial: symmetric functions on finite cyclic
//! groups, circulant quadratic forms and their balancedness, weightings on
//! complete graphs, divisor classes in psi/boundary coordinates, and the
//! symmetric F-cone. All arithmetic is exact (arbitrary-precision rationals);
//! no verdict ever depends on floating point.

pub mod budget;
pub mod criteria;
pub mod divisors;
pub mod fcone;
pub mod groupfn;
pub mod quadforms;
pub mod rat;
pub mod weightings;

pub use budget::Budget;
pub use rat::Rat;
