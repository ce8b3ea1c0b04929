//! Local constants: characters of residue rings, Gauss sums, epsilon
//! factors, conductor bookkeeping along a tower, and the Euler-factor
//! identity.

pub mod chars;
pub mod diff;
pub mod epsilon;
pub mod euler;
pub mod ramified;

pub use chars::{DirichletChar, LocalChar, QpChar};
pub use epsilon::{
    check_katz_deligne, epsilon_tate, gauss_sum, katz_local, DeltaNormalization, EpsilonInput, EpsilonValue,
    MeasureMode, SignMode,
};
