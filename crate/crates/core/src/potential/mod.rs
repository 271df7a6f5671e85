//! Potential kernel of the walk and the objects built from it: Green
//! functions, hitting probabilities and the harmonic function of a finite set.

mod finite;
mod table;

pub use finite::FiniteSetPotential;
pub use table::{c_plus, potential_a, CPlus, PotentialTable};
