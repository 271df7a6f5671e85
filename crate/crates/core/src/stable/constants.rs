//! Closed-form constants attached to a stable law.

use super::StableParams;
use crate::error::{Error, Result};
use crate::special::{gamma, sin_pi};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `p_1(0) = Gamma(1/alpha) sin(pi(alpha-gamma)/(2 alpha)) / (pi alpha)`.
pub fn density_at_zero(p: &StableParams) -> f64 {
    let a = p.alpha;
    gamma(1.0 / a) * sin_pi((a - p.gamma) / (2.0 * a)) / (PI * a)
}

/// Constant of the first-return asymptotics `f^0(n) ~ kappa c0^{1/alpha} n^{1/alpha-2}`.
pub fn kappa(p: &StableParams) -> f64 {
    let a = p.alpha;
    (a - 1.0) * sin_pi(1.0 / a) / (gamma(1.0 / a) * sin_pi((a - p.gamma) / (2.0 * a)))
}

/// The same constant written through `p_1(0)`.
pub fn kappa_from_density(p: &StableParams, p1_zero: f64) -> f64 {
    let a = p.alpha;
    (1.0 - 1.0 / a) * sin_pi(1.0 / a) / (p1_zero * PI)
}

/// Large-time constant of the stable hitting density, `f^1(t) ~ kappa_f t^{1/alpha-2}`
/// (zero for spectrally positive laws).
pub fn kappa_hitting(p: &StableParams) -> f64 {
    let a = p.alpha;
    gamma(2.0 - a) * sin_pi(1.0 / a) * sin_pi(0.5 * (a + p.gamma))
        / (a * PI * PI * density_at_zero(p))
}

/// Potential-kernel growth constants `(kappa_plus, kappa_minus)`:
/// `c0 a(x) / |x|^{alpha-1} -> kappa_{sgn x}`.
pub fn kappa_potential(p: &StableParams) -> (f64, f64) {
    let a = p.alpha;
    let g = gamma(1.0 - a) / PI;
    (-g * sin_pi(0.5 * (a + p.gamma)), -g * sin_pi(0.5 * (a - p.gamma)))
}

/// `(b_plus, b_minus) = -Gamma(1-alpha)/pi * sin(pi(alpha -+ gamma)/2)`.
pub fn b_pair(p: &StableParams) -> (f64, f64) {
    let (kp, km) = kappa_potential(p);
    (km, kp)
}

/// `int |x| p_t(x) dx = (2 t^{1/alpha}/pi) Gamma(1-1/alpha) sin(pi(alpha-gamma)/(2 alpha))`.
pub fn abs_moment(p: &StableParams, t: f64) -> f64 {
    let a = p.alpha;
    2.0 * t.powf(1.0 / a) / PI * gamma(1.0 - 1.0 / a) * sin_pi((a - p.gamma) / (2.0 * a))
}

/// Constants that exist only when the law has no negative jumps.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct OneSidedConstants {
    /// `b = 1/(c0^{1/alpha} Gamma(1-1/alpha))`.
    pub b: f64,
    /// `kappa_V = 1/(c0 Gamma(alpha))`.
    pub kappa_v: f64,
    /// `-1/Gamma(-1/alpha)`, the large-time constant of `t^{1+1/alpha} f^1(t)`.
    pub hitting_tail: f64,
}

pub fn one_sided_constants(p: &StableParams) -> Result<OneSidedConstants> {
    if !p.is_spectrally_positive() {
        return Err(Error::NotSpectrallyPositive(format!("gamma={}", p.gamma)));
    }
    let a = p.alpha;
    Ok(OneSidedConstants {
        b: 1.0 / (p.c0.powf(1.0 / a) * gamma(1.0 - 1.0 / a)),
        kappa_v: 1.0 / (p.c0 * gamma(a)),
        hitting_tail: -1.0 / gamma(-1.0 / a),
    })
}

/// All constants in one record.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConstantsTable {
    pub params: StableParams,
    pub density_at_zero: f64,
    pub kappa: f64,
    pub kappa_hitting: f64,
    pub kappa_potential_plus: f64,
    pub kappa_potential_minus: f64,
    pub b_plus: f64,
    pub b_minus: f64,
    pub one_sided: Option<OneSidedConstants>,
}

pub fn constants(p: &StableParams) -> ConstantsTable {
    let (kp, km) = kappa_potential(p);
    let (bp, bm) = b_pair(p);
    ConstantsTable {
        params: *p,
        density_at_zero: density_at_zero(p),
        kappa: kappa(p),
        kappa_hitting: kappa_hitting(p),
        kappa_potential_plus: kp,
        kappa_potential_minus: km,
        b_plus: bp,
        b_minus: bm,
        one_sided: one_sided_constants(p).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<StableParams> {
        let mut v = Vec::new();
        for &a in &[1.2, 1.5, 1.8] {
            let m = 2.0 - a;
            for &g in &[0.0, 0.5 * m, -0.5 * m, m, -m] {
                v.push(StableParams::new(a, g, 1.0).unwrap());
            }
        }
        v
    }

    #[test]
    fn kappa_forms_agree() {
        for p in grid() {
            let k1 = kappa(&p);
            let k2 = kappa_from_density(&p, density_at_zero(&p));
            assert!((k1 - k2).abs() < 1e-13);
            // symmetric in gamma
            assert!((k1 - kappa(&p.reflected())).abs() < 1e-13);
        }
    }

    #[test]
    fn extreme_skewness_values() {
        for &a in &[1.2, 1.5, 1.8] {
            let p = StableParams::new(a, 2.0 - a, 1.0).unwrap();
            assert!((kappa(&p) - (a - 1.0) / gamma(1.0 / a)).abs() < 1e-13);
            assert!((density_at_zero(&p) - 1.0 / (a * gamma(1.0 - 1.0 / a))).abs() < 1e-13);
            assert!(kappa_hitting(&p).abs() < 1e-15);
            let (kp, km) = kappa_potential(&p);
            assert!(kp.abs() < 1e-15);
            assert!((km - 1.0 / gamma(a)).abs() < 1e-13);
            let (bp, bm) = b_pair(&p);
            assert!(bm.abs() < 1e-15 && (bp - 1.0 / gamma(a)).abs() < 1e-13);
            let c = one_sided_constants(&p).unwrap();
            assert!((c.hitting_tail - density_at_zero(&p)).abs() < 1e-13);
        }
    }

    #[test]
    fn two_sided_constants_are_positive() {
        for p in grid().into_iter().filter(|p| p.is_two_sided()) {
            let (kp, km) = kappa_potential(&p);
            assert!(kp > 0.0 && km > 0.0);
            assert!(kappa_hitting(&p) > 0.0);
            assert!(one_sided_constants(&p).is_err());
        }
    }
}
