//! Bounded-ness diagnostics, the crossover scan, the tunnelling
//! probability and the half-line comparison.

use super::rhs::{Asymptotics, FirstReturn};
use super::{Check, DiagnosticReport, ReportRow, Series};
use crate::error::{Error, Result};
use crate::killed::{
    default_half_width, first_passage, first_passage_profile, killed_kernel, marginal_kernel, KilledWalk, KillingSet,
    Propagator, TargetProfile, DEFAULT_ESCAPE_BUDGET,
};
use crate::law::WalkLaw;
use crate::stable::constants::{density_at_zero, kappa};
use serde::{Deserialize, Serialize};

/// Relative change allowed between the suprema at two resolutions.
const SUPREMUM_STABILITY: f64 = 0.2;

/// Where the two terms of the extremal first-passage form trade places.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CrossoverPoint {
    pub n: usize,
    /// first `x > 0` at which `a(x) f^0(n)` is less than half of `f^x(n)`
    pub exact_switch: i64,
    /// first `x > 0` with `a(x)/x < p_{c0}(0) n^{1-2/alpha} / (kappa c0^{1/alpha})`
    pub predicted_switch: i64,
    /// `exact / predicted`
    pub factor: f64,
}

/// Locate the switch in `f^x(n) ~ a(x) f^0(n) + x_n p_{c0}(-x_n)/n` along
/// `x = 1, 2, ...`, using exact `f^x(n)` and exact `f^0(n)`.
pub fn crossover_scan(asy: &Asymptotics, law: &WalkLaw, n: usize) -> Result<CrossoverPoint> {
    let p = &asy.params;
    if !p.is_spectrally_positive() {
        return Err(Error::NotSpectrallyPositive(format!("gamma = {}", p.gamma)));
    }
    let x_limit = asy.potential.x_max().min((asy.bound * asy.scale(n)) as i64);
    let w = default_half_width(p.alpha, n) + x_limit;
    let profile = first_passage_profile(law, n, w, &[n])?;
    let f0 = profile.value(n, 0).unwrap_or(0.0);
    let mut exact = None;
    for x in 1..=x_limit {
        let fx = profile.value(n, x).unwrap_or(0.0);
        if asy.potential.a(x) * f0 < 0.5 * fx {
            exact = Some(x);
            break;
        }
    }
    let level = density_at_zero(p) * p.c0.powf(-1.0 / p.alpha) / (kappa(p) * p.c0.powf(1.0 / p.alpha))
        * (n as f64).powf(1.0 - 2.0 / p.alpha);
    let predicted = (1..=x_limit).find(|&x| asy.potential.a(x) / (x as f64) < level);
    match (exact, predicted) {
        (Some(e), Some(q)) => Ok(CrossoverPoint {
            n,
            exact_switch: e,
            predicted_switch: q,
            factor: e as f64 / q as f64,
        }),
        _ => Err(Error::WindowTooSmall(format!(
            "no switch below x = {x_limit} at n = {n} (exact {exact:?}, predicted {predicted:?})"
        ))),
    }
}

fn sampled_points(s: f64, reach: f64) -> Vec<i64> {
    let mut v = Vec::new();
    let mut xi = 1.0 / 64.0;
    while xi <= reach + 1e-12 {
        let x = (xi * s).round() as i64;
        if x != 0 {
            v.push(x);
            v.push(-x);
        }
        xi *= 2.0;
    }
    v.sort_unstable();
    v.dedup();
    v
}

fn stability_check(label: &str, sups: &[(usize, f64)]) -> Vec<Check> {
    sups.windows(2)
        .map(|w| {
            let change = w[1].1 / w[0].1 - 1.0;
            Check::new(
                format!("{label}: supremum n={} vs n={}", w[0].0, w[1].0),
                change.abs(),
                w[0].1.is_finite() && w[1].1.is_finite() && w[0].1 > 0.0 && change.abs() <= SUPREMUM_STABILITY,
                format!("{:.4} -> {:.4}", w[0].1, w[1].1),
            )
        })
        .collect()
}

/// Scaled ratios of the upper bounds for `f^x(n)` and `p^n_{0}(x, y)`.
///
/// * `n f^x(n) / (|x_n|^{alpha-1} ^ |x_n|^{-alpha})` over `0 < |x| <= 4 n^{1/alpha}`;
/// * `n p^n_{0}(x,y) / ([(|x_n| v 1)^{alpha-1} ^ |x_n|^{-alpha}] |y|^{alpha-1})`
///   over the same `x` and `y` in `{+-1, +-3, +-n^{1/alpha}/4, +-n^{1/alpha}/2}`;
/// * for extremal laws, `p^n_{0}(x,y)` over the two-term bound with `a`.
///
/// The factor `n` makes each ratio scale-free, so its supremum can be
/// compared across the horizons in `ns`.
pub fn diagnostics_prop21_23(asy: &Asymptotics, law: &WalkLaw, ns: &[usize], label: &str) -> Result<DiagnosticReport> {
    let a = asy.alpha();
    let mut report = DiagnosticReport::new("diagnostics", label);
    let n_top = *ns.iter().max().ok_or_else(|| Error::Config("empty horizon list".into()))?;
    let reach = 4.0;
    let w = default_half_width(a, n_top) + (reach * asy.scale(n_top)) as i64;
    let profile = first_passage_profile(law, n_top, w, ns)?;
    let mut sups21 = Vec::new();
    let mut sups23 = Vec::new();
    let mut sups23b = Vec::new();
    let extremal = asy.params.is_spectrally_positive();
    for &n in ns {
        let s = asy.scale(n);
        let nf = n as f64;
        let x_reach = (reach * s) as i64;
        // first passage
        let mut rows = Vec::new();
        let mut best = (0.0f64, 0i64);
        let samples = sampled_points(s, reach);
        for x in -x_reach..=x_reach {
            if x == 0 {
                continue;
            }
            let xn = (x as f64 / s).abs();
            let shape = xn.powf(a - 1.0).min(xn.powf(-a));
            let f = profile.value(n, x).unwrap_or(0.0);
            let r = nf * f / shape;
            if r > best.0 {
                best = (r, x);
            }
            if samples.contains(&x) {
                let regime = if xn <= 1.0 { "inner" } else { "outer" };
                rows.push(ReportRow::new(n, x, None, nf * f, shape, regime));
            }
        }
        sups21.push((n, best.0));
        report.series.push(Series::info(format!("first passage n={n}"), rows));
        // killed kernel
        let ys: Vec<i64> = {
            let mut v = vec![1i64, 3, (s / 4.0).round() as i64, (s / 2.0).round() as i64];
            v.sort_unstable();
            v.dedup();
            v.iter().flat_map(|&y| [y, -y]).collect()
        };
        let wk = default_half_width(a, n) + x_reach;
        let mut best = 0.0f64;
        let mut best_b = 0.0f64;
        let mut rows = Vec::new();
        let mut rows_b = Vec::new();
        for &y in &ys {
            let prof = TargetProfile::new(law, y, n, wk, &[n], DEFAULT_ESCAPE_BUDGET)?;
            for x in -x_reach..=x_reach {
                if x == 0 {
                    continue;
                }
                let xn = (x as f64 / s).abs();
                let shape = xn.max(1.0).powf(a - 1.0).min(xn.powf(-a)) * (y.abs() as f64).powf(a - 1.0);
                let v = prof.value(n, x).unwrap_or(0.0);
                let r = nf * v / shape;
                best = best.max(r);
                if samples.contains(&x) {
                    let regime = if xn <= 1.0 { "inner" } else { "outer" };
                    rows.push(ReportRow::new(n, x, Some(y), nf * v, shape, regime));
                }
                if extremal && asy.potential.contains(x) && asy.potential.contains(y) {
                    let (xs, ys_) = (x as f64 / s, y as f64 / s);
                    let ad = asy.potential.a_dagger(x);
                    let am = asy.potential.a(-y);
                    let bound = ad * am / nf.powf(2.0 - 1.0 / a)
                        + (ad * (-ys_).max(0.0).min(1.0) + am * xs.max(0.0).min(1.0)) / nf;
                    if bound > 0.0 {
                        let rb = v / bound;
                        best_b = best_b.max(rb);
                        if samples.contains(&x) {
                            rows_b.push(ReportRow::new(n, x, Some(y), v, bound, "extremal"));
                        }
                    }
                }
            }
        }
        sups23.push((n, best));
        report.series.push(Series::info(format!("killed kernel n={n}"), rows));
        if extremal {
            sups23b.push((n, best_b));
            report.series.push(Series::info(format!("killed kernel, extremal bound n={n}"), rows_b));
        }
    }
    report.checks.extend(stability_check("first passage", &sups21));
    report.checks.extend(stability_check("killed kernel", &sups23));
    if extremal {
        report.checks.extend(stability_check("killed kernel, extremal bound", &sups23b));
    }
    Ok(report)
}

/// `n^{1/alpha} p^n(x) / (1 ^ |x_n|^{-alpha})` over `|x_n| <= 6`, with the
/// supremum compared across `ns`.
pub fn lemma_kernel_bound(law: &WalkLaw, ns: &[usize], label: &str) -> Result<DiagnosticReport> {
    let a = law.alpha();
    let n_top = *ns.iter().max().ok_or_else(|| Error::Config("empty horizon list".into()))?;
    let w = default_half_width(a, n_top);
    let t = marginal_kernel(law, n_top, w, ns, DEFAULT_ESCAPE_BUDGET)?;
    let mut report = DiagnosticReport::new("kernel_bound", label);
    let mut sups = Vec::new();
    for &n in ns {
        let s = (n as f64).powf(1.0 / a);
        let reach = ((6.0 * s) as i64).min(w);
        let samples = sampled_points(s, 6.0);
        let mut best = 0.0f64;
        let mut rows = Vec::new();
        for x in -reach..=reach {
            let xn = (x as f64 / s).abs();
            let shape = if xn <= 1.0 { 1.0 } else { xn.powf(-a) };
            let v = t.value(n, x).unwrap_or(0.0);
            best = best.max(s * v / shape);
            if samples.contains(&x) || x == 0 {
                rows.push(ReportRow::new(n, x, None, s * v, shape, if xn <= 1.0 { "inner" } else { "outer" }));
            }
        }
        sups.push((n, best));
        report.series.push(Series::info(format!("free kernel n={n}"), rows));
    }
    report.checks.extend(stability_check("free kernel", &sups));
    Ok(report)
}

/// Conditional probability that the first entrance into `(-inf, 0]` lands
/// below `-R`, given `sigma_{0} > n` and `S_n = y`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TunnelingRow {
    pub r: i64,
    pub probability: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TunnelingResult {
    pub x: i64,
    pub y: i64,
    pub n: usize,
    /// `p^n_{0}(x, y)`
    pub kernel: f64,
    /// the same quantity rebuilt from the entrance decomposition
    pub decomposition: f64,
    pub rows: Vec<TunnelingRow>,
}

/// Largest `n * W` for which the entrance table is kept in memory.
const TUNNEL_TABLE_LIMIT: usize = 60_000_000;

/// Decompose at the first entrance into `(-inf, 0]` at time `m` and place `-w`:
/// `p^n_{0}(x,y) = sum_m sum_{w >= 1} P[entry at (m, -w)] p^{n-m}_{0}(-w, y)`,
/// where the last factor is read from one run started at `-y` through
/// `p^k_{0}(-w, y) = p^k_{0}(-y, w)`.
pub fn tunneling_check(
    law: &WalkLaw,
    r_values: &[i64],
    n: usize,
    x: i64,
    y: i64,
    half_width: i64,
) -> Result<TunnelingResult> {
    if !(x > 0 && y < 0) {
        return Err(Error::OutOfRegime(format!("needs x > 0 > y, got x={x}, y={y}")));
    }
    let w = half_width;
    if n * w as usize > TUNNEL_TABLE_LIMIT {
        return Err(Error::BudgetExceeded(format!("n * W = {} too large", n * w as usize)));
    }
    let prop = Propagator::new(law, w)?;
    // entrance law from x: entry[m][w'] for depth w' = 1..=W
    let mut fwd = KilledWalk::new(&prop, KillingSet::AtOrBelow(0), x)?;
    let mut entry = vec![vec![0.0; w as usize + 1]; n + 1];
    for row in entry.iter_mut().skip(1) {
        fwd.step();
        for (d, v) in row.iter_mut().enumerate().skip(1) {
            *v = fwd.entered_at(-(d as i64));
        }
    }
    // run from -y, killed at 0; at step k combine with entries at m = n - k
    let mut back = KilledWalk::new(&prop, KillingSet::Finite(vec![0]), -y)?;
    let mut above = vec![0.0; r_values.len()];
    let mut total = 0.0;
    for k in 0..n {
        let m = n - k;
        for d in 1..=w {
            let e = entry[m][d as usize];
            if e == 0.0 {
                continue;
            }
            let c = e * back.value(d);
            total += c;
            for (i, &r) in r_values.iter().enumerate() {
                if d > r {
                    above[i] += c;
                }
            }
        }
        back.step();
    }
    let kernel = back.value(-x);
    if !(kernel > 1e-300) || total <= 0.0 {
        return Err(Error::ConditioningMassZero(format!(
            "p^n_0(x, y) = {kernel:.3e} at x={x}, y={y}, n={n}"
        )));
    }
    Ok(TunnelingResult {
        x,
        y,
        n,
        kernel,
        decomposition: total,
        rows: r_values
            .iter()
            .zip(&above)
            .map(|(&r, &v)| TunnelingRow {
                r,
                probability: v / total,
            })
            .collect(),
    })
}

/// `p^n_{0}(x,y) / (p^n_{(-inf,0)}(x,y) + a^dagger(x) f^0(n) a(-y))` at `x, y > 0`.
pub fn comparison_identity(asy: &Asymptotics, law: &WalkLaw, x: i64, y: i64, ns: &[usize]) -> Result<Vec<ReportRow>> {
    if !asy.params.is_spectrally_positive() {
        return Err(Error::NotSpectrallyPositive(format!("gamma = {}", asy.params.gamma)));
    }
    if x < 0 || y <= 0 {
        return Err(Error::OutOfRegime(format!("needs x >= 0, y > 0; got ({x}, {y})")));
    }
    let n_top = *ns.iter().max().ok_or_else(|| Error::Config("empty horizon list".into()))?;
    let w = default_half_width(asy.alpha(), n_top) + x.max(y);
    let point = killed_kernel(law, KillingSet::Finite(vec![0]), x, n_top, w, ns, DEFAULT_ESCAPE_BUDGET)?;
    let half = killed_kernel(law, KillingSet::AtOrBelow(-1), x, n_top, w, ns, DEFAULT_ESCAPE_BUDGET)?;
    let ret = first_passage(law, KillingSet::Finite(vec![0]), 0, n_top, w, DEFAULT_ESCAPE_BUDGET)?;
    let ad = asy.potential.try_a(x)? + if x == 0 { 1.0 } else { 0.0 };
    let am = asy.potential.try_a(-y)?;
    Ok(ns
        .iter()
        .map(|&n| {
            let exact = point.value(n, y).unwrap_or(0.0);
            let rhs = half.value(n, y).unwrap_or(0.0) + ad * asy.f0(n, FirstReturn::Exact(ret.f[n])) * am;
            ReportRow::new(n, x, Some(y), exact, rhs, "comparison")
        })
        .collect())
}
