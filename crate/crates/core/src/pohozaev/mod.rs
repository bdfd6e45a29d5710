//! Multipliers for the generalized Pohozaev identity of radial solutions and
//! the nonexistence certificate built on them.

mod certify;
mod identity;
mod multiplier;
mod series;

pub use certify::*;
pub use identity::*;
pub use multiplier::*;
pub use series::*;
