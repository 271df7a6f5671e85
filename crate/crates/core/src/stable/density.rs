//! Density, derivative and distribution function of the stable law at time
//! `t`, by Fourier inversion with a large-`|x|` asymptotic series.

use super::StableParams;
use crate::error::{Error, Result};
use crate::quad::{adaptive, geometric_breaks, Tolerance};
use crate::special::gamma;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A value with an absolute error estimate.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, abs_error: 0.0 }
    }
}

/// Beyond this point (in units of `t^{1/alpha}`) the asymptotic series is used.
pub const SERIES_THRESHOLD: f64 = 40.0;
const SERIES_TERMS: usize = 12;
/// The integrand is dropped where `cos(pi gamma/2) theta^alpha` exceeds this.
const DECAY_CUTOFF: f64 = 42.0;
const QUAD_ABS_TOL: f64 = 3e-14;

#[derive(Clone, Copy)]
enum Kind {
    Density,
    Derivative,
    /// `F(x) - 1/2`
    Cdf,
}

fn cutoff(p: &StableParams) -> f64 {
    (DECAY_CUTOFF / p.cos_half_gamma()).powf(1.0 / p.alpha)
}

/// Fourier integral at `t = 1`.
fn fourier(p: &StableParams, x: f64, kind: Kind) -> Result<Estimate> {
    let a = p.alpha;
    let cg = p.cos_half_gamma();
    let sg = p.sin_half_gamma();
    let top = cutoff(p);
    let freq = x.abs() + a * sg.abs() * top.powf(a - 1.0) + 1.0;
    let width = (PI / freq).min(0.25);
    let head = width.min(1.0);
    let mut breaks = geometric_breaks(head, 40);
    let mut b = head;
    while b < top {
        b = (b + width).min(top);
        breaks.push(b);
    }
    let integrand = |th: f64| -> f64 {
        let ta = th.powf(a);
        let damp = (-cg * ta).exp();
        let ph = x * th + sg * ta;
        match kind {
            Kind::Density => damp * ph.cos(),
            Kind::Derivative => -th * damp * ph.sin(),
            Kind::Cdf => {
                if th == 0.0 {
                    x
                } else {
                    damp * ph.sin() / th
                }
            }
        }
    };
    let r = adaptive(integrand, &breaks, Tolerance::new(QUAD_ABS_TOL, 0.0));
    if !r.converged {
        return Err(Error::QuadratureNonConvergence(format!(
            "stable Fourier integral at x={x}: error {:.3e}",
            r.abs_error
        )));
    }
    // tail beyond the cutoff: int_top^inf th^m e^{-cg th^a}
    let m = match kind {
        Kind::Density => 0.0,
        Kind::Derivative => 1.0,
        Kind::Cdf => -1.0,
    };
    let trunc = (-cg * top.powf(a)).exp() * top.powf(m + 1.0 - a) / (cg * a);
    Ok(Estimate {
        value: r.value / PI,
        abs_error: (r.abs_error + trunc) / PI + 4.0 * f64::EPSILON * r.value.abs(),
    })
}

/// Coefficients `d_k` with `p_1(x) ~ sum_k d_k x^{-k alpha - 1}` as `x -> +inf`.
fn series_coefficients(alpha: f64, gamma_skew: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(SERIES_TERMS);
    let mut fact = 1.0;
    for k in 1..=SERIES_TERMS {
        fact *= k as f64;
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let s = crate::special::sin_pi(0.5 * kf * (gamma_skew - alpha));
        out.push(sign * gamma(kf * alpha + 1.0) / fact * s / PI);
    }
    out
}

/// Asymptotic series for the density (order 0) or its derivative (order 1)
/// at `t = 1`, valid for `|x| >= SERIES_THRESHOLD`.
fn series(p: &StableParams, x: f64, derivative: bool) -> Estimate {
    let (y, g, sgn) = if x > 0.0 { (x, p.gamma, 1.0) } else { (-x, -p.gamma, -1.0) };
    let d = series_coefficients(p.alpha, g);
    let mut acc = 0.0;
    let mut last = 0.0;
    for (i, c) in d.iter().enumerate() {
        let e = (i + 1) as f64 * p.alpha + 1.0;
        let term = if derivative {
            -c * e * y.powf(-e - 1.0) * sgn
        } else {
            c * y.powf(-e)
        };
        acc += term;
        last = term;
    }
    Estimate {
        value: acc,
        abs_error: last.abs() + 4.0 * f64::EPSILON * acc.abs(),
    }
}

/// `int_X^inf y^m p_1(y) dy` from the asymptotic series (m = 0 or 1), on the
/// side selected by `positive`.
pub fn tail_integral(p: &StableParams, big_x: f64, m: f64, positive: bool) -> Estimate {
    let g = if positive { p.gamma } else { -p.gamma };
    let d = series_coefficients(p.alpha, g);
    let mut acc = 0.0;
    let mut last = 0.0;
    for (i, c) in d.iter().enumerate() {
        let e = (i + 1) as f64 * p.alpha + 1.0 - m;
        let term = c * big_x.powf(1.0 - e) / (e - 1.0);
        acc += term;
        last = term;
    }
    Estimate {
        value: acc,
        abs_error: last.abs(),
    }
}

fn unit_density(p: &StableParams, x: f64) -> Result<Estimate> {
    if x.abs() >= SERIES_THRESHOLD {
        Ok(series(p, x, false))
    } else {
        fourier(p, x, Kind::Density)
    }
}

fn unit_derivative(p: &StableParams, x: f64) -> Result<Estimate> {
    if x.abs() >= SERIES_THRESHOLD {
        Ok(series(p, x, true))
    } else {
        fourier(p, x, Kind::Derivative)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRegime(format!("time t={t} must be positive")))
    }
}

/// Density `p_t(x)` of `Y_t` where `E e^{i theta Y_t} = e^{-t psi(theta)}`.
pub fn stable_density(p: &StableParams, t: f64, x: f64) -> Result<Estimate> {
    check_time(t)?;
    let s = t.powf(1.0 / p.alpha);
    let e = unit_density(p, x / s)?;
    Ok(Estimate {
        value: e.value / s,
        abs_error: e.abs_error / s,
    })
}

/// `d/dx p_t(x)`.
pub fn stable_density_derivative(p: &StableParams, t: f64, x: f64) -> Result<Estimate> {
    check_time(t)?;
    let s = t.powf(1.0 / p.alpha);
    let e = unit_derivative(p, x / s)?;
    Ok(Estimate {
        value: e.value / (s * s),
        abs_error: e.abs_error / (s * s),
    })
}

/// `P[Y_t <= x]` by the Gil-Pelaez formula.
pub fn stable_cdf(p: &StableParams, t: f64, x: f64) -> Result<Estimate> {
    check_time(t)?;
    let s = t.powf(1.0 / p.alpha);
    let y = x / s;
    if y.abs() >= SERIES_THRESHOLD {
        let tail = tail_integral(p, y.abs(), 0.0, y > 0.0);
        let v = if y > 0.0 { 1.0 - tail.value } else { tail.value };
        return Ok(Estimate {
            value: v,
            abs_error: tail.abs_error,
        });
    }
    let e = fourier(p, y, Kind::Cdf)?;
    Ok(Estimate {
        value: 0.5 + e.value,
        abs_error: e.abs_error,
    })
}

/// Normalisation check: `int_{-X}^{X} p_1` by quadrature of the density plus
/// the two tail masses from the series, with `X = SERIES_THRESHOLD`.
pub fn total_mass(p: &StableParams) -> Result<Estimate> {
    let big = SERIES_THRESHOLD;
    let mut failure = None;
    let f = |x: f64| match unit_density(p, x) {
        Ok(e) => e.value,
        Err(e) => {
            failure = Some(e);
            0.0
        }
    };
    let mut breaks: Vec<f64> = (-40..=40).map(|k| k as f64 * big / 40.0).collect();
    breaks.dedup();
    let r = adaptive(f, &breaks, Tolerance::new(1e-10, 0.0));
    if let Some(e) = failure {
        return Err(e);
    }
    let up = tail_integral(p, big, 0.0, true);
    let down = tail_integral(p, big, 0.0, false);
    Ok(Estimate {
        value: r.value + up.value + down.value,
        abs_error: r.abs_error + up.abs_error + down.abs_error,
    })
}

/// `int |x| p_t(x) dx` by quadrature (series tails beyond `X`).
pub fn abs_moment_quadrature(p: &StableParams, t: f64) -> Result<Estimate> {
    check_time(t)?;
    let big = SERIES_THRESHOLD;
    let mut failure = None;
    let f = |x: f64| match unit_density(p, x) {
        Ok(e) => x.abs() * e.value,
        Err(e) => {
            failure = Some(e);
            0.0
        }
    };
    let breaks: Vec<f64> = (-40..=40).map(|k| k as f64 * big / 40.0).collect();
    let r = adaptive(f, &breaks, Tolerance::new(1e-10, 0.0));
    if let Some(e) = failure {
        return Err(e);
    }
    let up = tail_integral(p, big, 1.0, true);
    let down = tail_integral(p, big, 1.0, false);
    let s = t.powf(1.0 / p.alpha);
    Ok(Estimate {
        value: s * (r.value + up.value + down.value),
        abs_error: s * (r.abs_error + up.abs_error + down.abs_error),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64, gamma: f64) -> StableParams {
        StableParams::new(alpha, gamma, 1.0).unwrap()
    }

    #[test]
    fn near_gaussian_edge_matches_normal_density() {
        // alpha close to 2 and gamma = 0: density near N(0, 2)
        let p = params(1.999, 0.0);
        let v = stable_density(&p, 1.0, 0.0).unwrap().value;
        let gauss = 1.0 / (4.0 * PI).sqrt();
        assert!((v - gauss).abs() < 2e-3);
    }

    #[test]
    fn density_at_zero_matches_closed_form() {
        for &a in &[1.2, 1.5, 1.8] {
            for &g in &[0.0, 0.5 * (2.0 - a), -(2.0 - a)] {
                let p = params(a, g);
                let v = stable_density(&p, 1.0, 0.0).unwrap();
                let exact = gamma(1.0 / a) * crate::special::sin_pi((a - g) / (2.0 * a)) / (PI * a);
                assert!((v.value - exact).abs() < 1e-12, "a={a} g={g}");
            }
        }
    }

    #[test]
    fn series_and_fourier_agree_near_threshold() {
        for &a in &[1.2, 1.5, 1.8] {
            for &g in &[0.0, 2.0 - a, -(2.0 - a), 0.3 * (2.0 - a)] {
                let p = params(a, g);
                for &x in &[-36.0, -25.0, 25.0, 36.0] {
                    let f = fourier(&p, x, Kind::Density).unwrap().value;
                    let s = series(&p, x, false).value;
                    assert!((f - s).abs() < 1e-11, "a={a} g={g} x={x} {f} {s}");
                    let fd = fourier(&p, x, Kind::Derivative).unwrap().value;
                    let sd = series(&p, x, true).value;
                    assert!((fd - sd).abs() < 1e-12, "a={a} g={g} x={x} {fd} {sd}");
                }
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = params(1.4, 0.3);
        for &x in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
            let h = 1e-4;
            let fd = (stable_density(&p, 2.0, x + h).unwrap().value
                - stable_density(&p, 2.0, x - h).unwrap().value)
                / (2.0 * h);
            let d = stable_density_derivative(&p, 2.0, x).unwrap().value;
            assert!((fd - d).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn cdf_is_consistent_with_density() {
        let p = params(1.5, 0.5);
        let a = stable_cdf(&p, 1.0, -1.0).unwrap().value;
        let b = stable_cdf(&p, 1.0, 2.0).unwrap().value;
        let r = adaptive(
            |x: f64| stable_density(&p, 1.0, x).unwrap().value,
            &[-1.0, 0.0, 1.0, 2.0],
            Tolerance::new(1e-13, 0.0),
        );
        assert!((b - a - r.value).abs() < 1e-11);
    }

    #[test]
    fn spectrally_positive_has_no_far_left_mass() {
        let p = params(1.5, 0.5);
        let v = stable_density(&p, 1.0, -8.0).unwrap().value;
        assert!(v.abs() < 1e-12);
    }
}
