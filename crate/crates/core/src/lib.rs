pub mod asymptotics;
pub mod error;
pub mod killed;
pub mod law;
pub mod montecarlo;
pub mod potential;
pub mod presets;
pub mod quad;
pub mod special;
pub mod stable;

pub use error::{Error, Result};
pub use law::{AtomRule, Family, TailSpec, WalkLaw};
pub use stable::StableParams;
