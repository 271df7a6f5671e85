//! Ladder heights and their renewal functions.
//!
//! Weakly ascending heights are `Z = S_{sigma[0,inf)}` from 0, strictly
//! descending heights `Zh = S_{sigma(-inf,0)}`. For a recurrent walk both are
//! proper and `1 - phi = (1 - E z^Z)(1 - E z^Zh)` on `|z| = 1`. We split
//! `log(1 - phi)` after removing the two algebraic singularities at `theta = 0`:
//!
//! `log(1 - phi) = a log(1 - e^{i theta}) + b log(1 - e^{-i theta}) + R(theta)`
//!
//! with `a = (alpha - gamma)/2`, `b = (alpha + gamma)/2` and `R` continuous.
//! Nonnegative Fourier modes of `R` belong to the ascending factor, negative
//! ones to the descending factor. A time-truncated dynamic programme over the
//! half-line entrance laws is the independent cross-check.

use super::engine::{KilledWalk, KillingSet, Propagator};
use crate::error::{Error, Result};
use crate::law::WalkLaw;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default number of Fourier modes of `R`.
pub const DEFAULT_MODES: usize = 1 << 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LadderRoute {
    WienerHopf,
    TruncatedEntrance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LadderTables {
    pub route: LadderRoute,
    /// `u_ds[x]`: expected number of strictly descending ladder heights in `[-x, 0]`,
    /// counting the zeroth.
    pub u_ds: Vec<f64>,
    /// `v_as[x]`: expected number of weakly ascending ladder heights in `[0, x]`.
    pub v_as: Vec<f64>,
    /// `ascending_pmf[j] = P[Z = j]`
    pub ascending_pmf: Vec<f64>,
    /// `descending_pmf[j] = P[Zh = -j]`, entry 0 is zero
    pub descending_pmf: Vec<f64>,
    /// `E|Zh|`; infinite unless the negative tail has a finite mean
    pub mean_descending: f64,
    /// ladder-height mass not represented in the pmfs (beyond `x_max`, or
    /// not yet arrived by the time horizon for the truncated route)
    pub truncation_tail: f64,
}

impl LadderTables {
    pub fn x_max(&self) -> usize {
        self.u_ds.len() - 1
    }

    /// `sum_{j <= x_max} j P[Zh = -j]`.
    pub fn mean_descending_partial(&self) -> f64 {
        self.descending_pmf
            .iter()
            .enumerate()
            .map(|(j, p)| j as f64 * p)
            .sum()
    }
}

/// Fourier modes of the regular part `R` of `log(1 - phi)`.
pub struct WienerHopf {
    pub ascending_exponent: f64,
    pub descending_exponent: f64,
    /// `modes[k] = r_k` for `k >= 0`
    pub nonnegative: Vec<f64>,
    /// `negative[k] = r_{-k}`, entry 0 unused
    pub negative: Vec<f64>,
    /// largest `|r_k|` over the top eighth of the computed modes, times their count
    pub alias_bound: f64,
}

fn log_one_minus_expi(theta: f64) -> Complex64 {
    crate::law::one_minus_expi(theta).ln()
}

impl WienerHopf {
    pub fn new(law: &WalkLaw, modes: usize) -> Result<Self> {
        let modes = modes.next_power_of_two().max(1024);
        let p = law.stable_params();
        let a = 0.5 * (p.alpha - p.gamma);
        let b = 0.5 * (p.alpha + p.gamma);
        let regular = |theta: f64| -> Complex64 {
            law.one_minus_char(theta).ln()
                - a * log_one_minus_expi(theta)
                - b * log_one_minus_expi(-theta)
        };
        let mut buf = vec![Complex64::new(0.0, 0.0); modes];
        buf[0] = Complex64::new(p.c0.ln(), 0.0);
        let half = modes / 2;
        for j in 1..=half {
            let v = regular(2.0 * PI * j as f64 / modes as f64);
            buf[j] = v;
            if j < half {
                buf[modes - j] = v.conj();
            }
        }
        if buf.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::QuadratureNonConvergence(
                "log(1 - phi) is not finite on the grid".into(),
            ));
        }
        FftPlanner::new().plan_fft_forward(modes).process(&mut buf);
        let scale = 1.0 / modes as f64;
        let nonnegative: Vec<f64> = (0..half).map(|k| buf[k].re * scale).collect();
        let mut negative = vec![0.0];
        negative.extend((1..half).map(|k| buf[modes - k].re * scale));
        let top = half - half / 8;
        let alias_bound = (top..half)
            .map(|k| nonnegative[k].abs().max(negative[k].abs()))
            .fold(0.0, f64::max)
            * (half / 8) as f64;
        Ok(WienerHopf {
            ascending_exponent: a,
            descending_exponent: b,
            nonnegative,
            negative,
            alias_bound,
        })
    }

    /// `E|Zh| = exp(sum_{k >= 1} r_{-k})` when the descending factor is
    /// exactly linear at `z = 1` (`b = 1`); infinite otherwise.
    pub fn mean_descending(&self) -> f64 {
        if (self.descending_exponent - 1.0).abs() < 1e-12 {
            self.negative[1..].iter().sum::<f64>().exp()
        } else if self.descending_exponent < 1.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    pub fn tables(&self, x_max: usize) -> Result<LadderTables> {
        let len = x_max + 1;
        if len > self.negative.len() {
            return Err(Error::TruncationTooCoarse(format!(
                "x_max {x_max} needs more than {} Fourier modes",
                2 * self.negative.len()
            )));
        }
        let r0 = self.nonnegative[0];
        let a = self.ascending_exponent;
        let b = self.descending_exponent;
        let up: Vec<f64> = self.nonnegative[..len].to_vec();
        let mut down: Vec<f64> = self.negative[..len].to_vec();
        down[0] = 0.0;

        // 1 - E z^Z = e^{r0} (1 - z)^a exp(R+)
        let factor_up = convolve(&binomial(a, len), &series_exp(&up, 1.0, len));
        let mut ascending_pmf: Vec<f64> = factor_up.iter().map(|c| -c).collect();
        ascending_pmf[0] = 1.0 - r0.exp();
        let factor_down = convolve(&binomial(b, len), &series_exp(&down, 1.0, len));
        let mut descending_pmf: Vec<f64> = factor_down.iter().map(|c| -c).collect();
        descending_pmf[0] = 0.0;

        let v_as = convolve(&binomial(-1.0 - a, len), &series_exp(&up, -1.0, len));
        let u_ds = convolve(&binomial(-1.0 - b, len), &series_exp(&down, -1.0, len));

        let tail_up = 1.0 - ascending_pmf.iter().sum::<f64>();
        let tail_down = 1.0 - descending_pmf.iter().sum::<f64>();
        Ok(LadderTables {
            route: LadderRoute::WienerHopf,
            u_ds,
            v_as,
            ascending_pmf,
            descending_pmf,
            mean_descending: self.mean_descending(),
            truncation_tail: tail_up.max(tail_down).max(0.0) + self.alias_bound,
        })
    }
}

/// Coefficients of `(1 - z)^c` up to degree `len - 1`.
fn binomial(c: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut v = 1.0;
    out.push(v);
    for k in 1..len {
        v *= (k as f64 - 1.0 - c) / k as f64;
        out.push(v);
    }
    out
}

/// Coefficients of `exp(sign * sum_k s_k z^k)`, with `s_0` included.
fn series_exp(s: &[f64], sign: f64, len: usize) -> Vec<f64> {
    let mut e = vec![0.0; len];
    e[0] = (sign * s[0]).exp();
    for k in 1..len {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += j as f64 * s[j] * e[k - j];
        }
        e[k] = sign * acc / k as f64;
    }
    e
}

fn convolve(x: &[f64], y: &[f64]) -> Vec<f64> {
    let len = x.len().min(y.len());
    (0..len)
        .map(|k| (0..=k).map(|j| x[j] * y[k - j]).sum())
        .collect()
}

/// Renewal function `sum_{j <= x} sum_k P[H_1 + ... + H_k = j]` from a pmf on
/// `0..len`, where `pmf[0] < 1` may be positive.
fn renewal(pmf: &[f64]) -> Vec<f64> {
    let len = pmf.len();
    let mut mass = vec![0.0; len];
    for x in 0..len {
        let mut acc = if x == 0 { 1.0 } else { 0.0 };
        for j in 1..=x {
            acc += pmf[j] * mass[x - j];
        }
        mass[x] = acc / (1.0 - pmf[0]);
    }
    let mut total = 0.0;
    mass.iter()
        .map(|m| {
            total += m;
            total
        })
        .collect()
}

/// Ladder tables by the Wiener-Hopf route with [`DEFAULT_MODES`] modes.
pub fn ladder_renewals(law: &WalkLaw, x_max: usize) -> Result<LadderTables> {
    let modes = DEFAULT_MODES.max(8 * (x_max + 1)).next_power_of_two();
    WienerHopf::new(law, modes)?.tables(x_max)
}

/// Ladder tables from the entrance laws of `[0, inf)` and `(-inf, 0)` from 0,
/// truncated at `n_truncate` steps. Mass not arrived by then is the tail.
pub fn ladder_renewals_dp(
    law: &WalkLaw,
    x_max: usize,
    n_truncate: usize,
    half_width: i64,
    tail_budget: f64,
) -> Result<LadderTables> {
    let w = half_width.max(x_max as i64 + 1);
    let prop = Propagator::new(law, w)?;
    let height_law = |killing: KillingSet, sign: i64| -> Result<(Vec<f64>, f64)> {
        let mut walk = KilledWalk::new(&prop, killing, 0)?;
        let mut pmf = vec![0.0; x_max + 1];
        for _ in 0..n_truncate {
            walk.step();
            for (j, p) in pmf.iter_mut().enumerate() {
                *p += walk.entered_at(sign * j as i64);
            }
        }
        let tail = 1.0 - pmf.iter().sum::<f64>();
        Ok((pmf, tail.max(0.0)))
    };
    let (ascending_pmf, tail_up) = height_law(KillingSet::AtOrAbove(0), 1)?;
    let (descending_pmf, tail_down) = height_law(KillingSet::AtOrBelow(-1), -1)?;
    let truncation_tail = tail_up.max(tail_down);
    if truncation_tail > tail_budget {
        return Err(Error::TruncationTooCoarse(format!(
            "ladder mass {truncation_tail:.3e} not arrived after {n_truncate} steps"
        )));
    }
    let v_as = renewal(&ascending_pmf);
    let u_ds = renewal(&descending_pmf);
    let mean_descending = descending_pmf
        .iter()
        .enumerate()
        .map(|(j, p)| j as f64 * p)
        .sum();
    Ok(LadderTables {
        route: LadderRoute::TruncatedEntrance,
        u_ds,
        v_as,
        ascending_pmf,
        descending_pmf,
        mean_descending,
        truncation_tail,
    })
}
