//! Number fields: orders, elements, ideals, primes, residue rings, units and
//! CM quadratic extensions.

pub mod cm;
pub mod enumerate;
pub mod field;
pub mod ideal;
pub mod order;
pub mod primes;
pub mod residue;
pub mod units;

pub use field::FieldOrder;
pub use ideal::IdealLattice;
pub use order::{FieldElement, Order};
