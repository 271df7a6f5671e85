//! Named step laws used by the verification reports.
//!
//! Scales and atom rules were picked so that the finite-`n` corrections are
//! small enough for the default grids `n in {256, 1024, 4096}`.

use crate::error::{Error, Result};
use crate::law::{AtomRule, Family, TailSpec, WalkLaw};

/// Symmetric law of index `alpha` in {1.2, 1.5, 1.8}.
pub fn symmetric(alpha: f64) -> TailSpec {
    let base = TailSpec::new(alpha, Family::TwoSidedPareto, 1.0);
    if alpha < 1.35 {
        base
    } else if alpha < 1.65 {
        TailSpec { b_scale: 0.2, ..base }.with_atom_rule(AtomRule::SecondOrder)
    } else {
        TailSpec { b_scale: 0.08, ..base }.with_atom_rule(AtomRule::SecondOrder)
    }
}

/// Law with only a light negative tail, index `alpha` in {1.2, 1.5, 1.8}.
pub fn spectrally_positive(alpha: f64) -> TailSpec {
    let base = TailSpec::new(alpha, Family::SpectrallyPositive, 0.15);
    if alpha < 1.35 {
        TailSpec { b_scale: 0.04, ..base }
    } else if alpha < 1.65 {
        base
    } else {
        TailSpec { b_scale: 0.05, ..base }.with_atom_rule(AtomRule::SecondOrder)
    }
}

/// Asymmetric two-sided law, `alpha = 1.6`, three quarters of the tail upwards.
pub fn skewed() -> TailSpec {
    TailSpec::new(1.6, Family::TwoSidedPareto, 0.3).with_weights(0.75, 0.25)
}

/// Spectrally positive law with finite `C+`, `alpha = 1.5`.
pub fn bounded_potential() -> TailSpec {
    TailSpec::new(1.5, Family::BoundedPotential, 0.15)
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 10] = [
    "symmetric-1.2",
    "symmetric-1.5",
    "symmetric-1.8",
    "spectrally-positive-1.2",
    "spectrally-positive-1.5",
    "spectrally-positive-1.8",
    "skewed-1.6",
    "bounded-potential-1.5",
    "two-sided-1.5",
    "left-continuous-1.5",
];

pub fn by_name(name: &str) -> Result<TailSpec> {
    Ok(match name {
        "symmetric-1.2" => symmetric(1.2),
        "symmetric-1.5" | "two-sided-1.5" => symmetric(1.5),
        "symmetric-1.8" => symmetric(1.8),
        "spectrally-positive-1.2" => spectrally_positive(1.2),
        "spectrally-positive-1.5" => spectrally_positive(1.5),
        "spectrally-positive-1.8" => spectrally_positive(1.8),
        "skewed-1.6" => skewed(),
        "bounded-potential-1.5" => bounded_potential(),
        "left-continuous-1.5" => TailSpec::new(1.5, Family::LeftContinuous, 0.15),
        other => {
            return Err(Error::Config(format!(
                "unknown law {other:?}; known: {}",
                NAMES.join(", ")
            )))
        }
    })
}

pub fn build(name: &str) -> Result<WalkLaw> {
    WalkLaw::build(&by_name(name)?)
}
