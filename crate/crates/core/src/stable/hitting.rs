//! Density of the first hitting time of the origin by the stable process,
//! plus the meander and entrance densities used by the killed-walk
//! asymptotics.

use super::constants::{density_at_zero, one_sided_constants};
use super::density::{stable_density, stable_density_derivative, Estimate, SERIES_THRESHOLD};
use super::table::StableTable;
use super::StableParams;
use crate::error::{Error, Result};
use crate::quad::{adaptive, Tolerance};
use crate::special::{gamma, sin_pi};
use std::f64::consts::PI;

/// Which formula produced a hitting density.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HittingRoute {
    /// `x t^{-1} p_t(-x)`, available when the process started at `x` has no
    /// jumps towards the origin.
    Creeping,
    /// Convolution formula through `p_1'`.
    Integral,
}

/// `f^x(t)`: density at `t` of the hitting time of 0 for the process
/// started at `x`.
pub fn hitting_density(p: &StableParams, x: f64, t: f64) -> Result<Estimate> {
    let route = if creeps(p, x) { HittingRoute::Creeping } else { HittingRoute::Integral };
    hitting_density_by(p, x, t, route)
}

fn creeps(p: &StableParams, x: f64) -> bool {
    (x > 0.0 && p.is_spectrally_positive()) || (x < 0.0 && p.is_spectrally_negative())
}

/// Hitting density by a prescribed route (the creeping route requires that
/// the process cannot jump over the origin).
pub fn hitting_density_by(p: &StableParams, x: f64, t: f64, route: HittingRoute) -> Result<Estimate> {
    hitting_with(p, x, t, route, None)
}

/// Hitting density using a prebuilt density table for the inner integrand.
pub fn hitting_density_tabulated(table: &StableTable, x: f64, t: f64) -> Result<Estimate> {
    let p = table.params();
    let route = if creeps(p, x) { HittingRoute::Creeping } else { HittingRoute::Integral };
    hitting_with(p, x, t, route, Some(table))
}

fn hitting_with(
    p: &StableParams,
    x: f64,
    t: f64,
    route: HittingRoute,
    table: Option<&StableTable>,
) -> Result<Estimate> {
    if x == 0.0 || !x.is_finite() {
        return Err(Error::OutOfRegime(format!("hitting density needs x != 0, got {x}")));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::OutOfRegime(format!("time t={t} must be positive")));
    }
    // reduce to a positive starting point
    let (q, y) = if x > 0.0 { (*p, x) } else { (p.reflected(), -x) };
    match route {
        HittingRoute::Creeping => {
            if !q.is_spectrally_positive() {
                return Err(Error::NotSpectrallyPositive(
                    "creeping route needs no jumps towards the origin".into(),
                ));
            }
            let d = match table {
                Some(tab) if x > 0.0 => tab.density_estimate(t, -y),
                _ => stable_density(&q, t, -y)?,
            };
            Ok(Estimate {
                value: y / t * d.value,
                abs_error: y / t * d.abs_error,
            })
        }
        HittingRoute::Integral => {
            // f^y(t) = f^1(t / y^alpha) / y^alpha
            let ya = y.powf(q.alpha);
            let e = match table {
                Some(tab) => {
                    let neg = x < 0.0;
                    unit_hitting(&q, t / ya, |z| {
                        // reflected law: p'_{-}(z) = -p'(-z)
                        let v = if neg { -tab.unit_derivative(-z) } else { tab.unit_derivative(z) };
                        Ok(Estimate { value: v, abs_error: tab.interpolation_error })
                    })?
                }
                None => unit_hitting(&q, t / ya, |z| stable_density_derivative(&q, 1.0, z))?,
            };
            Ok(Estimate {
                value: e.value / ya,
                abs_error: e.abs_error / ya,
            })
        }
    }
}

/// `f^1(t) = C t^{-1-1/alpha} int_0^1 u^{-2/alpha} p_1'(-(t u)^{-1/alpha}) dv`
/// with `u = 1 - v^alpha` and `C = sin(pi/alpha)/(pi p_1(0))`.
fn unit_hitting<D>(p: &StableParams, t: f64, derivative: D) -> Result<Estimate>
where
    D: Fn(f64) -> Result<Estimate>,
{
    let a = p.alpha;
    let c = sin_pi(1.0 / a) / (PI * density_at_zero(p));
    let mut failure = None;
    let mut inner_err = 0.0;
    let f = |v: f64| -> f64 {
        let u = 1.0 - v.powf(a);
        if u <= 0.0 {
            return 0.0;
        }
        let arg = -(t * u).powf(-1.0 / a);
        match derivative(arg) {
            Ok(e) => {
                let w = u.powf(-2.0 / a);
                inner_err += w * e.abs_error;
                w * e.value
            }
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let mut breaks = vec![0.0];
    for k in (1..=12).rev() {
        breaks.push(0.5f64.powi(k));
    }
    for k in 2..=30 {
        breaks.push(1.0 - 0.5f64.powi(k));
    }
    breaks.push(1.0);
    let r = adaptive(f, &breaks, Tolerance::new(1e-15, 1e-13));
    if let Some(e) = failure {
        return Err(e);
    }
    // accept an unconverged pass whose own error estimate is still small
    if !r.converged && !(r.abs_error <= 1e-10 * r.value.abs()) {
        return Err(Error::QuadratureNonConvergence(format!(
            "hitting density integral at t={t}: error {:.3e}",
            r.abs_error
        )));
    }
    let scale = c * t.powf(-1.0 - 1.0 / a);
    Ok(Estimate {
        value: scale * r.value,
        abs_error: scale * (r.abs_error + 1e-3 * inner_err / 30.0 + 1e-14 * r.value.abs()),
    })
}

/// `kappa_f` by quadrature: `sin(pi/alpha)/(pi p_1(0)) int_0^inf u^{1-alpha} p_1'(-u) du`.
pub fn kappa_hitting_quadrature(p: &StableParams) -> Result<Estimate> {
    let a = p.alpha;
    let big = SERIES_THRESHOLD;
    let mut failure = None;
    let f = |u: f64| -> f64 {
        if u == 0.0 {
            return 0.0;
        }
        match stable_density_derivative(p, 1.0, -u) {
            Ok(e) => u.powf(1.0 - a) * e.value,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let mut breaks = crate::quad::geometric_breaks(1.0, 40);
    for k in 2..=(big as i64) {
        breaks.push(k as f64);
    }
    let r = adaptive(f, &breaks, Tolerance::new(1e-14, 1e-12));
    if let Some(e) = failure {
        return Err(e);
    }
    // series tail: p_1'(-u) = sum d_k (k a + 1) u^{-k a - 2} on the reflected side
    let q = p.reflected();
    let mut tail = 0.0;
    let mut fact = 1.0;
    for k in 1..=12 {
        let kf = k as f64;
        fact *= kf;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let d = sign * gamma(kf * a + 1.0) / fact * sin_pi(0.5 * kf * (q.gamma - a)) / PI;
        let e = kf * a + a;
        tail += d * (kf * a + 1.0) * big.powf(-e) / e;
    }
    let c = sin_pi(1.0 / a) / (PI * density_at_zero(p));
    Ok(Estimate {
        value: c * (r.value + tail),
        abs_error: c * r.abs_error,
    })
}

/// Meander-type density `Q^_t'(eta) = t^{-1/alpha} Gamma(1/alpha) p_t(-eta) eta`
/// (spectrally positive laws only).
pub fn meander_density(p: &StableParams, t: f64, eta: f64) -> Result<Estimate> {
    one_sided_constants(p)?;
    if eta < 0.0 {
        return Err(Error::OutOfRegime(format!("meander density needs eta >= 0, got {eta}")));
    }
    let a = p.alpha;
    let d = stable_density(p, t, -eta)?;
    let s = t.powf(-1.0 / a) * gamma(1.0 / a) * eta;
    Ok(Estimate {
        value: s * d.value,
        abs_error: s * d.abs_error,
    })
}

/// Small-`eta` form of the entrance density at time `t`:
/// `K_t(eta) ~ p_t(0) eta^{alpha-1} / (t Gamma(alpha))` (spectrally positive).
pub fn entrance_density_small(p: &StableParams, t: f64, eta: f64) -> Result<f64> {
    one_sided_constants(p)?;
    let p0 = stable_density(p, t, 0.0)?.value;
    Ok(p0 * eta.powf(p.alpha - 1.0) / (t * gamma(p.alpha)))
}
