//! Numerics for the limiting stable process.

pub mod constants;
mod density;
mod hitting;
mod params;
mod table;

pub use density::{
    abs_moment_quadrature, stable_cdf, stable_density, stable_density_derivative, tail_integral,
    total_mass, Estimate, SERIES_THRESHOLD,
};
pub use hitting::{
    entrance_density_small, hitting_density, hitting_density_by, hitting_density_tabulated,
    kappa_hitting_quadrature, meander_density, HittingRoute,
};
pub use params::StableParams;
pub use table::StableTable;
