//! Limit densities of the killed stable process, estimated from scaled
//! dynamic-programme kernels.

use crate::error::{Error, Result};
use crate::killed::{default_half_width, killed_kernel, ladder_renewals, KillingSet, DEFAULT_ESCAPE_BUDGET};
use crate::law::WalkLaw;
use crate::stable::Estimate;
use serde::{Deserialize, Serialize};

/// `K_{c0}(eta)` at one `eta`, from two small starts.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EntranceEstimate {
    pub eta: f64,
    pub n: usize,
    /// `(x, estimate from start x)`
    pub per_start: Vec<(i64, f64)>,
    /// mean over the starts
    pub value: f64,
    /// spread between the starts
    pub discrepancy: f64,
}

/// Smallest target height accepted, relative to the largest start.
const MIN_HEIGHT_OVER_START: i64 = 2;

/// `K_{c0}(eta) ~ n^{2/alpha} p^n_{(-inf,0]}(x, floor(eta n^{1/alpha})) / V(x)`
/// for small `x_n`, for every `eta` in `etas`, averaged over `starts`.
///
/// `V(x) = E|Zh| U_ds(x - 1)` is the renewal function of the strict
/// descending ladder heights; it tends to `x`, but at a fixed start the
/// killed kernel is proportional to `V(x)` rather than `x`, so dividing by
/// `x_n` leaves a bias that does not vanish as `n` grows.
pub fn entrance_density_estimates(
    law: &WalkLaw,
    etas: &[f64],
    n: usize,
    starts: &[i64],
) -> Result<Vec<EntranceEstimate>> {
    let p = law.stable_params();
    if !p.is_spectrally_positive() {
        return Err(Error::NotSpectrallyPositive(format!("gamma = {}", p.gamma)));
    }
    if starts.is_empty() || starts.iter().any(|&x| x < 1) {
        return Err(Error::Config("starts must be positive".into()));
    }
    let s = (n as f64).powf(1.0 / p.alpha);
    let top = starts.iter().copied().max().unwrap_or(1);
    for &eta in etas {
        let y = (eta * s).floor() as i64;
        if y < MIN_HEIGHT_OVER_START * top {
            return Err(Error::ResolutionTooCoarse(format!(
                "eta={eta} gives height {y} at n={n}, below {MIN_HEIGHT_OVER_START} x start {top}"
            )));
        }
    }
    let ladder = ladder_renewals(law, top as usize)?;
    if !ladder.mean_descending.is_finite() {
        return Err(Error::Config("entrance density needs E|Zh| finite".into()));
    }
    let w = default_half_width(p.alpha, n);
    let mut columns = Vec::new();
    for &x in starts {
        let t = killed_kernel(law, KillingSet::AtOrBelow(0), x, n, w, &[n], DEFAULT_ESCAPE_BUDGET)?;
        let xn = ladder.mean_descending * ladder.u_ds[x as usize - 1] / s;
        let col: Vec<f64> = etas
            .iter()
            .map(|&eta| {
                let y = (eta * s).floor() as i64;
                s * t.value(n, y).unwrap_or(0.0) / xn
            })
            .collect();
        columns.push((x, col));
    }
    Ok(etas
        .iter()
        .enumerate()
        .map(|(i, &eta)| {
            let per_start: Vec<(i64, f64)> = columns.iter().map(|(x, c)| (*x, c[i])).collect();
            let value = per_start.iter().map(|v| v.1).sum::<f64>() / per_start.len() as f64;
            let (lo, hi) = per_start
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v.1), h.max(v.1)));
            EntranceEstimate {
                eta,
                n,
                per_start,
                value,
                discrepancy: hi - lo,
            }
        })
        .collect())
}

/// Default starts for the entrance-density estimate.
pub const ENTRANCE_STARTS: [i64; 2] = [1, 2];

/// `K_{c0}(eta)` from the default starts at horizon `n`.
pub fn k_estimate(eta: f64, law: &WalkLaw, n: usize) -> Result<EntranceEstimate> {
    Ok(entrance_density_estimates(law, &[eta], n, &ENTRANCE_STARTS)?.remove(0))
}

/// `p^{0}_{c0}(xi, eta) ~ N^{1/alpha} p^N_{0}(xi N^{1/alpha}, eta N^{1/alpha})`
/// at `N = n_ref`; the error is the gap to the same estimate at `N/4`.
pub fn stable_killed_density(law: &WalkLaw, xi: f64, eta: f64, n_ref: usize) -> Result<Estimate> {
    let a = law.alpha();
    let at = |n: usize| -> Result<f64> {
        let s = (n as f64).powf(1.0 / a);
        let x = (xi * s).round() as i64;
        let y = (eta * s).round() as i64;
        if x == 0 || y == 0 {
            return Err(Error::ResolutionTooCoarse(format!(
                "({xi}, {eta}) rounds onto the origin at n={n}"
            )));
        }
        let w = default_half_width(a, n) + x.abs().max(y.abs());
        let t = killed_kernel(law, KillingSet::Finite(vec![0]), x, n, w, &[n], DEFAULT_ESCAPE_BUDGET)?;
        Ok(s * t.value(n, y).unwrap_or(0.0))
    };
    let fine = at(n_ref)?;
    let coarse = at((n_ref / 4).max(1))?;
    Ok(Estimate {
        value: fine,
        abs_error: (fine - coarse).abs(),
    })
}
