//! Projected bubble test functions, the energy ratio and the sufficient
//! conditions for the energy inequality.

mod criteria;
mod energy;
mod profile;

pub use criteria::*;
pub use energy::*;
pub use profile::*;
