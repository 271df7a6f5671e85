use crate::error::{Error, Result};
use crate::special::{cos_pi, gamma, sin_pi};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of the limiting stable process: index `alpha`, skewness
/// `gamma` (|gamma| <= 2 - alpha), scale `c0` and positivity `rho`.
///
/// The characteristic exponent is `psi(t) = exp(i sgn(t) pi gamma / 2)|t|^alpha`
/// and the walk scaled by `n^{1/alpha}` converges to the process at time `c0`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct StableParams {
    pub alpha: f64,
    pub gamma: f64,
    pub c0: f64,
    pub rho: f64,
}

impl StableParams {
    pub fn new(alpha: f64, gamma: f64, c0: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidTailSpec(format!("alpha={alpha} not in (1,2)")));
        }
        if gamma.abs() > 2.0 - alpha + 1e-14 {
            return Err(Error::InvalidTailSpec(format!(
                "|gamma|={} exceeds 2-alpha",
                gamma.abs()
            )));
        }
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::InvalidTailSpec(format!("c0={c0} must be positive")));
        }
        Ok(StableParams {
            alpha,
            gamma,
            c0,
            rho: 0.5 * (1.0 - gamma / alpha),
        })
    }

    /// Parameters for tails `P[X>x] ~ q+ B x^-alpha`, `P[X<-x] ~ q- B x^-alpha`.
    pub fn from_tails(alpha: f64, b: f64, q_plus: f64, q_minus: f64) -> Result<Self> {
        let gamma = if q_minus == 0.0 {
            2.0 - alpha
        } else if q_plus == 0.0 {
            alpha - 2.0
        } else {
            2.0 / PI * ((q_plus - q_minus) * (-(0.5 * PI * alpha).tan())).atan()
        };
        let c0 = if q_minus == 0.0 || q_plus == 0.0 {
            -b * gamma_one_minus(alpha)
        } else {
            b * gamma_one_minus(alpha) * cos_pi(0.5 * alpha) / cos_pi(0.5 * gamma)
        };
        StableParams::new(alpha, gamma, c0)
    }

    /// Same law with the role of positive and negative jumps exchanged.
    pub fn reflected(&self) -> Self {
        StableParams {
            gamma: -self.gamma,
            rho: 1.0 - self.rho,
            ..*self
        }
    }

    pub fn with_c0(&self, c0: f64) -> Self {
        StableParams { c0, ..*self }
    }

    /// No negative jumps in the limit (`gamma = 2 - alpha`).
    pub fn is_spectrally_positive(&self) -> bool {
        (self.gamma - (2.0 - self.alpha)).abs() < 1e-12
    }

    pub fn is_spectrally_negative(&self) -> bool {
        (self.gamma + (2.0 - self.alpha)).abs() < 1e-12
    }

    /// `|gamma| < 2 - alpha`: both tails heavy.
    pub fn is_two_sided(&self) -> bool {
        !self.is_spectrally_positive() && !self.is_spectrally_negative()
    }

    pub fn cos_half_gamma(&self) -> f64 {
        cos_pi(0.5 * self.gamma)
    }

    pub fn sin_half_gamma(&self) -> f64 {
        sin_pi(0.5 * self.gamma)
    }
}

fn gamma_one_minus(alpha: f64) -> f64 {
    gamma(1.0 - alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_scale_matches_closed_form() {
        let p = StableParams::from_tails(1.5, 1.0, 0.5, 0.5).unwrap();
        assert_eq!(p.gamma, 0.0);
        let expect = gamma(-0.5) * (0.75 * PI).cos();
        assert!((p.c0 - expect).abs() < 1e-14);
        assert!((p.c0 - 2.506_628_274_631).abs() < 1e-11);
        assert_eq!(p.rho, 0.5);
    }

    #[test]
    fn one_sided_tails_give_extreme_skewness() {
        let p = StableParams::from_tails(1.5, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(p.gamma, 0.5);
        assert!(p.is_spectrally_positive());
        assert!((p.c0 + gamma(-0.5)).abs() < 1e-15);
        assert!((p.rho - (1.0 - 1.0 / 1.5)).abs() < 1e-15);
        // limit of the two-sided formula agrees
        let q = StableParams::from_tails(1.5, 1.0, 1.0 - 1e-12, 1e-12).unwrap();
        assert!((q.gamma - p.gamma).abs() < 1e-10);
        assert!((q.c0 - p.c0).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(StableParams::new(2.0, 0.0, 1.0).is_err());
        assert!(StableParams::new(1.5, 0.6, 1.0).is_err());
        assert!(StableParams::new(1.5, 0.0, -1.0).is_err());
    }
}
