//! Per-theorem convergence reports on fixed grids.

use super::diagnostics::{
    comparison_identity, crossover_scan, diagnostics_prop21_23, lemma_kernel_bound, tunneling_check,
};
use super::estimates::{entrance_density_estimates, stable_killed_density, ENTRANCE_STARTS};
use super::rhs::{
    rhs_theorem1, Asymptotics, Corollary2Regime, FiniteSetForms, FirstReturn, KernelRegime, KernelTerms,
    PassageRegime, SplitRegime,
};
use super::{Check, ReportRow, Series, VerificationReport, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::killed::{
    default_half_width, first_passage, first_passage_profile, killed_kernel, ladder_renewals, KernelTable, KillingSet,
    StartProfile, TargetProfile, DEFAULT_ESCAPE_BUDGET,
};
use crate::law::{TailSpec, WalkLaw};
use crate::potential::{c_plus, CPlus};
use crate::presets;
use crate::special::gamma;
use crate::stable::constants::{density_at_zero, kappa_hitting, one_sided_constants};
use crate::stable::{hitting_density_by, hitting_density_tabulated, HittingRoute, StableParams, StableTable};
use rayon::prelude::*;

/// Grid and law choices for a report.
#[derive(Clone, Debug, Default)]
pub struct ReportOptions {
    /// horizons; each report has its own default
    pub ns: Option<Vec<usize>>,
    /// cap on the final deviation; each report has its own default
    pub cap: Option<f64>,
    /// law to use instead of the report's reference law(s)
    pub law: Option<(String, TailSpec)>,
    /// smaller horizons for a fast pass
    pub quick: bool,
}

impl ReportOptions {
    fn horizons(&self, full: &[usize], quick: &[usize]) -> Vec<usize> {
        match &self.ns {
            Some(v) => v.clone(),
            None if self.quick => quick.to_vec(),
            None => full.to_vec(),
        }
    }

    fn cap_or(&self, default: f64) -> f64 {
        self.cap.unwrap_or(default)
    }

    fn laws(&self, defaults: &[&str]) -> Result<Vec<(String, TailSpec)>> {
        match &self.law {
            Some(l) => Ok(vec![l.clone()]),
            None => defaults
                .iter()
                .map(|name| Ok((name.to_string(), presets::by_name(name)?)))
                .collect(),
        }
    }
}

const STANDARD: [usize; 3] = [256, 1024, 4096];
const QUICK: [usize; 3] = [64, 256, 1024];
/// Cap for the theorem reports on `p^n` and `f^x(n)`.
const THEOREM_CAP: f64 = 0.2;
/// Horizon at which limit densities are estimated.
const REFERENCE_HORIZON: usize = 16384;
const QUICK_REFERENCE_HORIZON: usize = 4096;

/// Report identifiers accepted by [`report`].
pub fn report_ids() -> &'static [&'static str] {
    &[
        "thm1",
        "thm2",
        "thm3",
        "cor1",
        "crossover",
        "thm4",
        "thm5",
        "cor2",
        "killed_density",
        "thm6",
        "prop22",
        "finite",
        "cor3",
        "ladder",
        "diagnostics",
        "comp",
    ]
}

pub fn report(id: &str, opts: &ReportOptions) -> Result<VerificationReport> {
    match id {
        "thm1" => theorem1(opts),
        "thm2" => theorem2(opts),
        "thm3" => theorem3(opts),
        "cor1" => corollary1(opts),
        "crossover" => crossover(opts),
        "thm4" => theorem4(opts),
        "thm5" => theorem5(opts),
        "cor2" => corollary2(opts),
        "killed_density" => killed_density(opts),
        "thm6" => theorem6(opts),
        "prop22" => tunneling(opts),
        "finite" => finite_set(opts),
        "cor3" => corollary3(opts),
        "ladder" => ladder(opts),
        "diagnostics" => diagnostics(opts),
        "comp" => comparison(opts),
        other => Err(Error::Config(format!(
            "unknown report {other:?}; known: {}",
            report_ids().join(", ")
        ))),
    }
}

fn build(spec: &TailSpec) -> Result<WalkLaw> {
    WalkLaw::build(spec)
}

fn n_max(ns: &[usize]) -> Result<usize> {
    ns.iter()
        .copied()
        .max()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config("empty horizon list".into()))
}

/// `f^x(n)` for all `|x| <= default window + reach`.
fn passage_profile(law: &WalkLaw, ns: &[usize], reach: i64) -> Result<StartProfile> {
    let top = n_max(ns)?;
    first_passage_profile(law, top, default_half_width(law.alpha(), top) + reach, ns)
}

/// `p^n_{0}(x, .)` from a fixed start.
fn kernel_from(law: &WalkLaw, x: i64, ns: &[usize], reach: i64) -> Result<KernelTable> {
    let top = n_max(ns)?;
    let w = default_half_width(law.alpha(), top) + reach + x.abs();
    killed_kernel(law, KillingSet::Finite(vec![0]), x, top, w, ns, DEFAULT_ESCAPE_BUDGET)
}

fn target_profile(law: &WalkLaw, y: i64, ns: &[usize], reach: i64) -> Result<TargetProfile> {
    let top = n_max(ns)?;
    let w = default_half_width(law.alpha(), top) + reach + y.abs();
    TargetProfile::new(law, y, top, w, ns, DEFAULT_ESCAPE_BUDGET)
}

fn lookup(v: Option<f64>, what: &str) -> Result<f64> {
    v.ok_or_else(|| Error::WindowTooSmall(format!("{what} not recorded")))
}

fn ensure_extremal(p: &StableParams, id: &str) -> Result<()> {
    if p.is_spectrally_positive() {
        Ok(())
    } else {
        Err(Error::OutOfRegime(format!("{id} needs gamma = 2 - alpha, got gamma = {}", p.gamma)))
    }
}

fn ensure_interior(p: &StableParams, id: &str) -> Result<()> {
    if p.gamma.abs() < 2.0 - p.alpha - 1e-12 {
        Ok(())
    } else {
        Err(Error::OutOfRegime(format!("{id} needs |gamma| < 2 - alpha, got gamma = {}", p.gamma)))
    }
}

fn theorem1(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&STANDARD, &QUICK);
    let cap = opts.cap_or(DEFAULT_CAP);
    let laws = opts.laws(&[
        "symmetric-1.2",
        "symmetric-1.5",
        "symmetric-1.8",
        "spectrally-positive-1.2",
        "spectrally-positive-1.5",
        "spectrally-positive-1.8",
    ])?;
    let top = n_max(&ns)?;
    let series: Vec<Result<Series>> = laws
        .par_iter()
        .map(|(name, spec)| {
            let law = build(spec)?;
            let p = law.stable_params();
            let w = default_half_width(p.alpha, top);
            let fp = first_passage(&law, KillingSet::Finite(vec![0]), 0, top, w, DEFAULT_ESCAPE_BUDGET)?;
            let rows = ns
                .iter()
                .map(|&n| ReportRow::new(n, 0, None, fp.f[n], rhs_theorem1(n, &p), "return"))
                .collect();
            Ok(Series::checked(name.clone(), rows, cap))
        })
        .collect();
    let mut report = VerificationReport::new("thm1", &laws.iter().map(|l| l.0.as_str()).collect::<Vec<_>>().join(","));
    for s in series {
        report.series.push(s?);
    }
    Ok(report)
}

/// One `f^x(n)` series along `x = x_of(n)`, dispatched per point.
fn passage_series(
    asy: &Asymptotics,
    profile: &StartProfile,
    ns: &[usize],
    label: &str,
    x_of: &dyn Fn(usize) -> i64,
    f0: &dyn Fn(usize) -> FirstReturn,
    cap: Option<f64>,
) -> Result<Series> {
    let mut rows = Vec::new();
    for &n in ns {
        let x = x_of(n);
        let regime = asy.passage_regime(x, n)?;
        let exact = lookup(profile.value(n, x), "f^x(n)")?;
        let rhs = asy.rhs_theorem2_3(x, n, regime, f0(n))?;
        rows.push(ReportRow::new(n, x, None, exact, rhs, regime.tag()));
    }
    Ok(match cap {
        Some(c) => Series::checked(label, rows, c),
        None => Series::info(label, rows),
    })
}

fn first_passage_report(id: &str, name: &str, law: &WalkLaw, ns: &[usize], cap: f64, points: &[PassagePoint]) -> Result<VerificationReport> {
    let asy = Asymptotics::new(law, 256)?;
    let top = n_max(ns)?;
    let reach = (2.0 * asy.scale(top)) as i64;
    let profile = passage_profile(law, ns, reach)?;
    let exact_f0 = |n: usize| FirstReturn::Exact(profile.value(n, 0).unwrap_or(0.0));
    let asymptote = |_: usize| FirstReturn::Asymptote;
    let mut report = VerificationReport::new(id, name);
    for pt in points {
        let x_of: Box<dyn Fn(usize) -> i64> = match *pt {
            PassagePoint::Fixed(x) => Box::new(move |_| x),
            PassagePoint::Scaled(xi) => {
                let asy = &asy;
                Box::new(move |n| asy.lattice(xi, n))
            }
        };
        let label = pt.label();
        report
            .series
            .push(passage_series(&asy, &profile, ns, &label, &*x_of, &asymptote, Some(cap))?);
        if let PassagePoint::Fixed(_) = pt {
            report.series.push(passage_series(
                &asy,
                &profile,
                ns,
                &format!("{label}, exact f0"),
                &*x_of,
                &exact_f0,
                None,
            )?);
        }
    }
    Ok(report)
}

#[derive(Clone, Copy)]
enum PassagePoint {
    Fixed(i64),
    Scaled(f64),
}

impl PassagePoint {
    fn label(&self) -> String {
        match self {
            PassagePoint::Fixed(x) => format!("x={x}"),
            PassagePoint::Scaled(xi) => format!("x=round({xi} n^(1/alpha))"),
        }
    }
}

fn theorem2(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&STANDARD, &QUICK);
    let cap = opts.cap_or(THEOREM_CAP);
    let points = [
        PassagePoint::Fixed(4),
        PassagePoint::Fixed(-4),
        PassagePoint::Scaled(0.5),
        PassagePoint::Scaled(1.0),
        PassagePoint::Scaled(-1.0),
    ];
    let mut out = VerificationReport::new("thm2", "");
    let mut names = Vec::new();
    for (name, spec) in opts.laws(&["symmetric-1.5", "skewed-1.6"])? {
        let law = build(&spec)?;
        ensure_interior(&law.stable_params(), "thm2")?;
        let mut r = first_passage_report("thm2", &name, &law, &ns, cap, &points)?;
        for s in r.series.iter_mut() {
            s.label = format!("{name}: {}", s.label);
        }
        out.merge(r);
        names.push(name);
    }
    out.law = names.join(",");
    Ok(out)
}

fn theorem3(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&STANDARD, &QUICK);
    let cap = opts.cap_or(THEOREM_CAP);
    let (name, spec) = opts.laws(&["spectrally-positive-1.5"])?.remove(0);
    let law = build(&spec)?;
    let p = law.stable_params();
    ensure_extremal(&p, "thm3")?;
    let points = [
        PassagePoint::Fixed(4),
        PassagePoint::Fixed(16),
        PassagePoint::Scaled(0.5),
        PassagePoint::Scaled(1.0),
        PassagePoint::Fixed(-4),
        PassagePoint::Scaled(-1.0),
    ];
    let mut report = first_passage_report("thm3", &name, &law, &ns, cap, &points)?;
    // in the bulk the two-term form and the hitting density coincide
    let mut worst = 0.0f64;
    for xi in [0.5, 1.0, 2.0] {
        let creeping = xi * p.c0.powf(-1.0 / p.alpha) / p.c0;
        let by_density = creeping * crate::stable::stable_density(&p, p.c0, -xi)?.value * p.c0.powf(1.0 / p.alpha);
        let by_integral = hitting_density_by(&p, xi, p.c0, HittingRoute::Integral)?.value;
        worst = worst.max((by_density / by_integral - 1.0).abs());
    }
    report.checks.push(Check::new(
        "bulk forms: x p(-x)/t against the hitting density",
        worst,
        worst < 1e-8,
        "relative difference at xi = 0.5, 1, 2",
    ));
    Ok(report)
}

fn corollary1(opts: &ReportOptions) -> Result<VerificationReport> {
    let cap = opts.cap_or(THEOREM_CAP);
    let times = [64.0f64, 1024.0, 16384.0];
    let mut report = VerificationReport::new("cor1", "");
    let mut names = Vec::new();
    for (name, spec) in opts.laws(&["spectrally-positive-1.5", "symmetric-1.5", "skewed-1.6"])? {
        let p = StableParams::from_tails(spec.alpha, spec.b_scale, spec.q_plus, spec.q_minus)?;
        let table = StableTable::build(&p)?;
        let mut rows = Vec::new();
        let mut printed = Vec::new();
        for &t in &times {
            let f = hitting_density_tabulated(&table, 1.0, t)?.value;
            if p.is_spectrally_positive() {
                let c = one_sided_constants(&p)?.hitting_tail;
                rows.push(ReportRow::new(t as usize, 1, None, f, c / t.powf(1.0 + 1.0 / p.alpha), "extremal"));
                printed.push(ReportRow::new(t as usize, 1, None, f, c / t, "extremal, exponent 1"));
            } else {
                rows.push(ReportRow::new(
                    t as usize,
                    1,
                    None,
                    f,
                    kappa_hitting(&p) / t.powf(2.0 - 1.0 / p.alpha),
                    "interior",
                ));
            }
        }
        report.series.push(Series::checked(format!("{name}: t^(...) f^1(t)"), rows, cap));
        if !printed.is_empty() {
            report.series.push(Series::info(format!("{name}: t f^1(t)"), printed));
        }
        names.push(name);
    }
    report.law = names.join(",");
    Ok(report)
}

fn crossover(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&[256, 1024, 4096, 16384], &QUICK);
    let (name, spec) = opts.laws(&["spectrally-positive-1.5"])?.remove(0);
    let law = build(&spec)?;
    ensure_extremal(&law.stable_params(), "crossover")?;
    let asy = Asymptotics::new(&law, 1024)?;
    let mut report = VerificationReport::new("crossover", &name);
    for &n in &ns {
        let c = crossover_scan(&asy, &law, n)?;
        report.checks.push(Check::new(
            format!("switch location n={n}"),
            c.factor,
            c.factor >= 0.25 && c.factor <= 4.0,
            format!("exact x={} predicted x={}", c.exact_switch, c.predicted_switch),
        ));
    }
    Ok(report)
}

/// Estimate of `p^{0}_{c0}` at the reference horizon, memoised per point.
fn bulk_density(law: &WalkLaw, xi: f64, eta: f64, quick: bool) -> Result<f64> {
    let n_ref = if quick { QUICK_REFERENCE_HORIZON } else { REFERENCE_HORIZON };
    Ok(stable_killed_density(law, xi, eta, n_ref)?.value)
}

struct KernelCase {
    label: String,
    /// `(x, y)` at horizon `n`
    point: Box<dyn Fn(usize) -> (i64, i64) + Sync>,
}

fn fixed(x: i64, y: i64) -> KernelCase {
    KernelCase {
        label: format!("x={x}, y={y}"),
        point: Box::new(move |_| (x, y)),
    }
}

fn exact_kernel(law: &WalkLaw, ns: &[usize], case: &KernelCase, reach: i64) -> Result<Vec<f64>> {
    let pts: Vec<(i64, i64)> = ns.iter().map(|&n| (case.point)(n)).collect();
    let same_x = pts.iter().all(|p| p.0 == pts[0].0);
    let same_y = pts.iter().all(|p| p.1 == pts[0].1);
    if same_x {
        let t = kernel_from(law, pts[0].0, ns, reach)?;
        ns.iter()
            .zip(&pts)
            .map(|(&n, &(_, y))| lookup(t.value(n, y), "p^n(x,y)"))
            .collect()
    } else if same_y {
        let t = target_profile(law, pts[0].1, ns, reach)?;
        ns.iter()
            .zip(&pts)
            .map(|(&n, &(x, _))| lookup(t.value(n, x), "p^n(x,y)"))
            .collect()
    } else {
        ns.iter()
            .zip(&pts)
            .map(|(&n, &(x, y))| {
                let t = kernel_from(law, x, &[n], reach)?;
                lookup(t.value(n, y), "p^n(x,y)")
            })
            .collect()
    }
}

fn kernel_report(id: &str, opts: &ReportOptions, default_law: &str, extremal: bool) -> Result<VerificationReport> {
    let ns = opts.horizons(&STANDARD, &QUICK);
    let cap = opts.cap_or(THEOREM_CAP);
    let (name, spec) = opts.laws(&[default_law])?.remove(0);
    let law = build(&spec)?;
    let p = law.stable_params();
    if extremal {
        ensure_extremal(&p, id)?;
    } else {
        ensure_interior(&p, id)?;
    }
    let asy = Asymptotics::new(&law, 256)?;
    let top = n_max(&ns)?;
    let reach = (2.0 * asy.scale(top)) as i64;
    let profile = passage_profile(&law, &ns, reach)?;
    let a = p.alpha;
    let bulk_eta = 1.0;
    let cases = vec![
        KernelCase {
            label: "x=round(n^(1/alpha)), y=3".into(),
            point: Box::new(move |n| (((n as f64).powf(1.0 / a)).round() as i64, 3)),
        },
        KernelCase {
            label: "x=3, y=round(n^(1/alpha))".into(),
            point: Box::new(move |n| (3, ((n as f64).powf(1.0 / a)).round() as i64)),
        },
        fixed(3, 5),
        KernelCase {
            label: format!("x=round(n^(1/alpha)), y=round({bulk_eta} n^(1/alpha))"),
            point: Box::new(move |n| {
                let s = (n as f64).powf(1.0 / a);
                (s.round() as i64, (bulk_eta * s).round() as i64)
            }),
        },
    ];
    // entrance density at every height met in the start-near-origin branch
    let k_values: Vec<(f64, f64)> = if extremal {
        let mut etas: Vec<f64> = Vec::new();
        for case in &cases {
            for &n in &ns {
                let (x, y) = (case.point)(n);
                if asy.kernel_regime(x, y, n)? == KernelRegime::StartNearOrigin {
                    let eta = y as f64 / asy.scale(n);
                    if !etas.iter().any(|e| (e - eta).abs() < 1e-12) {
                        etas.push(eta);
                    }
                }
            }
        }
        let n_ref = if opts.quick { QUICK_REFERENCE_HORIZON } else { REFERENCE_HORIZON };
        entrance_density_estimates(&law, &etas, n_ref, &ENTRANCE_STARTS)?
            .into_iter()
            .map(|e| (e.eta, e.value))
            .collect()
    } else {
        Vec::new()
    };
    let entrance = |eta: f64| -> f64 {
        k_values
            .iter()
            .find(|(e, _)| (e - eta).abs() < 1e-12)
            .map(|v| v.1)
            .unwrap_or(f64::NAN)
    };
    let bulk_value = bulk_density(&law, 1.0, bulk_eta, opts.quick)?;
    let bulk = |_: f64, _: f64| bulk_value;
    let mut report = VerificationReport::new(id, &name);
    let mut order = Vec::new();
    for case in &cases {
        let exact = exact_kernel(&law, &ns, case, reach)?;
        let mut rows = Vec::new();
        for (i, &n) in ns.iter().enumerate() {
            let (x, y) = (case.point)(n);
            let fp = |z: i64| profile.value(n, z).unwrap_or(f64::NAN);
            let terms = KernelTerms {
                first_passage: &fp,
                entrance: if extremal { Some(&entrance) } else { None },
                bulk: Some(&bulk),
            };
            let regime = asy.kernel_regime(x, y, n)?;
            let rhs = asy.rhs_theorem4_5(x, y, n, regime, &terms)?;
            rows.push(ReportRow::new(n, x, Some(y), exact[i], rhs, regime.tag()));
            if !extremal && regime != KernelRegime::Bulk {
                let s = asy.scale(n);
                let shape = ((x as f64 / s) * (y as f64 / s)).abs().powf(a - 1.0) / s;
                order.push(exact[i] / shape);
            }
        }
        report.series.push(Series::checked(case.label.clone(), rows, cap));
    }
    if !extremal {
        // the first two forms against each other where both apply
        let mut rows = Vec::new();
        for &n in &ns {
            let (x, y) = (3i64, 5i64);
            let f_start = lookup(profile.value(n, x), "f^x(n)")?;
            let f_target = lookup(profile.value(n, -y), "f^-y(n)")?;
            let first = f_start * asy.potential.a(-y);
            let second = asy.potential.a_dagger(x) * f_target;
            rows.push(ReportRow::new(n, x, Some(y), first, second, "forms"));
        }
        report.series.push(Series::checked("x=3, y=5: f^x(n) a(-y) over a(x) f^-y(n)", rows, cap));
        let lo = order.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = order.iter().cloned().fold(0.0, f64::max);
        report.checks.push(Check::new(
            "order p n^(1/alpha) / |x_n y_n|^(alpha-1)",
            hi / lo,
            lo > 0.0 && hi.is_finite(),
            format!("range [{lo:.4}, {hi:.4}] over the near-origin rows"),
        ));
    }
    Ok(report)
}

fn theorem4(opts: &ReportOptions) -> Result<VerificationReport> {
    kernel_report("thm4", opts, "symmetric-1.5", false)
}

fn theorem5(opts: &ReportOptions) -> Result<VerificationReport> {
    kernel_report("thm5", opts, "spectrally-positive-1.5", true)
}

fn corollary2(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&STANDARD, &QUICK);
    let cap = opts.cap_or(THEOREM_CAP);
    let (name, spec) = opts.laws(&["spectrally-positive-1.5"])?.remove(0);
    let law = build(&spec)?;
    let p = law.stable_params();
    ensure_extremal(&p, "cor2")?;
    let asy = Asymptotics::new(&law, 256)?;
    let top = n_max(&ns)?;
    let reach = (2.0 * asy.scale(top)) as i64;
    let profile = passage_profile(&law, &ns, reach)?;
    let a = p.alpha;
    let round_s = move |n: usize| ((n as f64).powf(1.0 / a)).round() as i64;
    let cases = [
        (
            Corollary2Regime::StartNearOriginTargetAbove,
            KernelCase {
                label: "x=-3, y=round(n^(1/alpha))".into(),
                point: Box::new(move |n| (-3, round_s(n))),
            },
        ),
        (Corollary2Regime::StartNearOriginTargetBelow, fixed(-3, -3)),
        (
            Corollary2Regime::TargetNearOrigin,
            KernelCase {
                label: "x=-round(n^(1/alpha)), y=-3".into(),
                point: Box::new(move |n| (-round_s(n), -3)),
            },
        ),
        (Corollary2Regime::TargetNearOrigin, fixed(-3, 3)),
    ];
    let etas: Vec<f64> = ns.iter().map(|&n| round_s(n) as f64 / asy.scale(n)).collect();
    let n_ref = if opts.quick { QUICK_REFERENCE_HORIZON } else { REFERENCE_HORIZON };
    let k_values: Vec<(f64, f64)> = entrance_density_estimates(&law, &etas, n_ref, &ENTRANCE_STARTS)?
        .into_iter()
        .map(|e| (e.eta, e.value))
        .collect();
    let entrance = |eta: f64| -> f64 {
        k_values
            .iter()
            .find(|(e, _)| (e - eta).abs() < 1e-12)
            .map(|v| v.1)
            .unwrap_or(f64::NAN)
    };
    let mut report = VerificationReport::new("cor2", &name);
    for (regime, case) in &cases {
        let exact = exact_kernel(&law, &ns, case, reach)?;
        for (variant, exact_f0) in [("", false), (", exact f0", true)] {
            if exact_f0 && *regime != Corollary2Regime::StartNearOriginTargetBelow {
                continue;
            }
            let mut rows = Vec::new();
            for (i, &n) in ns.iter().enumerate() {
                let (x, y) = (case.point)(n);
                let fp = |z: i64| profile.value(n, z).unwrap_or(f64::NAN);
                let terms = KernelTerms {
                    first_passage: &fp,
                    entrance: Some(&entrance),
                    bulk: None,
                };
                let f0 = if exact_f0 {
                    FirstReturn::Exact(lookup(profile.value(n, 0), "f^0(n)")?)
                } else {
                    FirstReturn::Asymptote
                };
                let rhs = asy.rhs_corollary2(x, y, n, *regime, f0, &terms)?;
                rows.push(ReportRow::new(n, x, Some(y), exact[i], rhs, regime.tag()));
            }
            let label = format!("{}{variant}", case.label);
            report.series.push(if exact_f0 {
                Series::info(label, rows)
            } else {
                Series::checked(label, rows, cap)
            });
        }
    }
    Ok(report)
}

/// Small-argument form of the killed stable density under extremal skewness.
fn killed_density(opts: &ReportOptions) -> Result<VerificationReport> {
    let cap = opts.cap_or(DEFAULT_CAP);
    let (name, spec) = opts.laws(&["spectrally-positive-1.5"])?.remove(0);
    let law = build(&spec)?;
    let p = law.stable_params();
    ensure_extremal(&p, "killed_density")?;
    let n_ref = if opts.quick { QUICK_REFERENCE_HORIZON } else { REFERENCE_HORIZON };
    let p0 = density_at_zero(&p) * p.c0.powf(-1.0 / p.alpha);
    let mut rows = Vec::new();
    let mut gaps = Vec::new();
    for xi in [0.4, 0.2, 0.1] {
        let e = stable_killed_density(&law, xi, xi, n_ref)?;
        let limit = p0 * xi * xi.powf(p.alpha - 1.0) / (p.c0 * gamma(p.alpha));
        rows.push(ReportRow::new(n_ref, (xi * 1000.0).round() as i64, None, e.value, limit, "xi=eta"));
        gaps.push(e.abs_error / e.value);
    }
    let mut report = VerificationReport::new("killed_density", &name);
    report.series.push(Series::checked("p^{0}_{c0}(xi, xi) at xi = 0.4, 0.2, 0.1 (x in thousandths)", rows, cap));
    report.notes.push(format!(
        "relative gap to the estimate at n/4: {}",
        gaps.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>().join(", ")
    ));
    Ok(report)
}

fn theorem6(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&STANDARD, &QUICK);
    let cap = opts.cap_or(THEOREM_CAP);
    let (name, spec) = opts.laws(&["bounded-potential-1.5"])?.remove(0);
    let law = build(&spec)?;
    let cp = c_plus(&law)?;
    let cp_value = match cp {
        CPlus::Infinite => {
            return Err(Error::InfiniteCPlus(format!("law {name} has an unbounded potential on the positive side")))
        }
        CPlus::Finite { value, .. } => value,
    };
    let asy = Asymptotics::new(&law, 1024)?;
    let top = n_max(&ns)?;
    let reach = (asy.scale(top)) as i64;
    let a = law.alpha();
    let half = move |n: usize| (0.5 * (n as f64).powf(1.0 / a)).round() as i64;
    let cases = [
        (
            SplitRegime::Separated,
            KernelCase {
                label: "x=-y=round(n^(1/alpha)/2)".into(),
                point: Box::new(move |n| (half(n), -half(n))),
            },
        ),
        (
            SplitRegime::Mixed,
            KernelCase {
                label: "x=3, y=-round(n^(1/alpha)/2)".into(),
                point: Box::new(move |n| (3, -half(n))),
            },
        ),
    ];
    let ret = first_passage(&law, KillingSet::Finite(vec![0]), 0, top, default_half_width(law.alpha(), top), DEFAULT_ESCAPE_BUDGET)?;
    let mut report = VerificationReport::new("thm6", &name);
    report.notes.push(format!("C+ = {cp_value:.6}"));
    let mut worst = 0.0f64;
    for (regime, case) in &cases {
        let exact = exact_kernel(&law, &ns, case, reach)?;
        let mut rows = Vec::new();
        let mut rows_exact = Vec::new();
        for (i, &n) in ns.iter().enumerate() {
            let (x, y) = (case.point)(n);
            let rhs = asy.rhs_theorem6(x, y, n, *regime, cp, FirstReturn::Asymptote)?;
            rows.push(ReportRow::new(n, x, Some(y), exact[i], rhs, regime.tag()));
            if *regime == SplitRegime::Mixed {
                let rhs_e = asy.rhs_theorem6(x, y, n, *regime, cp, FirstReturn::Exact(ret.f[n]))?;
                rows_exact.push(ReportRow::new(n, x, Some(y), exact[i], rhs_e, regime.tag()));
            } else {
                let p = &asy.params;
                let d = (x - y) as f64 / asy.scale(n);
                let by_integral = cp_value * p.c0 * hitting_density_by(p, d, p.c0, HittingRoute::Integral)?.value / n as f64;
                worst = worst.max((rhs / by_integral - 1.0).abs());
            }
        }
        report.series.push(Series::checked(case.label.clone(), rows, cap));
        if !rows_exact.is_empty() {
            report.series.push(Series::info(format!("{}, exact f0", case.label), rows_exact));
        }
    }
    report.checks.push(Check::new(
        "separated form against C+ c0 f^(x-y)(c0 n)",
        worst,
        worst < 1e-8,
        "relative difference, hitting density by the integral route",
    ));
    Ok(report)
}

fn tunneling(opts: &ReportOptions) -> Result<VerificationReport> {
    let (n, w) = if opts.quick { (256, 512) } else { (1024, 1024) };
    let heights = [8i64, 32, 64];
    let radii = [4i64, 16, 64];
    let mut report = VerificationReport::new("prop22", "");
    let (bp_name, bp_spec) = match &opts.law {
        Some(l) => l.clone(),
        None => ("bounded-potential-1.5".to_string(), presets::bounded_potential()),
    };
    let bp = build(&bp_spec)?;
    let finite = matches!(c_plus(&bp)?, CPlus::Finite { .. });
    for &h in &heights {
        let t = tunneling_check(&bp, &radii, n, h, -h, w)?;
        let probs: Vec<f64> = t.rows.iter().map(|r| r.probability).collect();
        let ok = probs.windows(2).all(|p| p[1] < p[0]);
        report.checks.push(Check::new(
            format!("{bp_name}: x=-y={h}, decreasing in R = 4, 16, 64"),
            *probs.last().unwrap_or(&f64::NAN),
            ok || !finite,
            format!(
                "{} (decomposition/kernel - 1 = {:.2e})",
                probs.iter().map(|p| format!("{p:.4e}")).collect::<Vec<_>>().join(", "),
                t.decomposition / t.kernel - 1.0
            ),
        ));
    }
    if opts.law.is_none() {
        let two = build(&presets::symmetric(1.5))?;
        let mut probs = Vec::new();
        for &h in &heights {
            let t = tunneling_check(&two, &[10], n, h, -h, w)?;
            probs.push(t.rows[0].probability);
        }
        report.checks.push(Check::new(
            "symmetric-1.5: R=10, increasing in x=-y = 8, 32, 64",
            *probs.last().unwrap_or(&f64::NAN),
            probs.windows(2).all(|p| p[1] > p[0]),
            probs.iter().map(|p| format!("{p:.4}")).collect::<Vec<_>>().join(", "),
        ));
        report.law = format!("{bp_name},symmetric-1.5");
    } else {
        report.law = bp_name;
    }
    Ok(report)
}

const FINITE_SET: [i64; 3] = [-1, 0, 2];

fn finite_set(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&STANDARD, &QUICK);
    let cap = opts.cap_or(0.1);
    let (name, spec) = opts.laws(&["skewed-1.6"])?.remove(0);
    let law = build(&spec)?;
    let asy = Asymptotics::new(&law, 256)?;
    let forms = FiniteSetForms::new(&asy, &FINITE_SET)?;
    let top = n_max(&ns)?;
    let w = default_half_width(law.alpha(), top);
    let ret = first_passage(&law, KillingSet::Finite(vec![0]), 0, top, w, DEFAULT_ESCAPE_BUDGET)?;
    let set = KillingSet::finite(&FINITE_SET);
    let mut sums = vec![0.0; ns.len()];
    for &z in &FINITE_SET {
        let fz = first_passage(&law, set.clone(), z, top, w, DEFAULT_ESCAPE_BUDGET)?;
        for (i, &n) in ns.iter().enumerate() {
            sums[i] += fz.f[n];
        }
    }
    let rows = ns
        .iter()
        .zip(&sums)
        .map(|(&n, &s)| ReportRow::new(n, 0, None, s, ret.f[n], "sum over the set"))
        .collect();
    let mut report = VerificationReport::new("finite", &name);
    report.series.push(Series::checked("sum_z f_A^z(n) / f^0(n), A = {-1,0,2}", rows, cap));
    let x = 5;
    let fx = first_passage(&law, set, x, top, w, DEFAULT_ESCAPE_BUDGET)?;
    // informational only: horizons where x = 5 is not yet near the origin are skipped
    let mut rows = Vec::new();
    for &n in &ns {
        match asy.rhs_finite_first_passage(&forms, x, n, FirstReturn::Exact(ret.f[n])) {
            Ok(rhs) => rows.push(ReportRow::new(n, x, None, fx.f[n], rhs, "small_start")),
            Err(Error::OutOfRegime(_)) => {}
            Err(e) => return Err(e),
        }
    }
    report.series.push(Series::info("f_A^5(n) / (u_A(5) f^0(n))", rows));
    // a one-point set reproduces the single-point forms
    let single = FiniteSetForms::new(&asy, &[0])?;
    let mut worst = 0.0f64;
    for &n in &ns {
        for x in [-4i64, -1, 0, 1, 4] {
            let regime = asy.passage_regime(x, n)?;
            if regime == PassageRegime::Bulk {
                continue;
            }
            let a = asy.rhs_finite_first_passage(&single, x, n, FirstReturn::Asymptote)?;
            let b = asy.rhs_theorem2_3(x, n, regime, FirstReturn::Asymptote)?;
            worst = worst.max((a - b).abs() / b.abs().max(1e-300));
        }
        for (x, y) in [(3i64, 2i64), (-2, 5), (1, -3)] {
            let fp = |z: i64| 1.0 + z as f64 * 1e-3;
            let terms = KernelTerms {
                first_passage: &fp,
                entrance: None,
                bulk: None,
            };
            for regime in [KernelRegime::TargetNearOrigin, KernelRegime::StartNearOrigin] {
                let a = asy.rhs_finite_kernel(&single, x, y, n, regime, &fp, &fp, None);
                let b = asy.rhs_theorem4_5(x, y, n, regime, &terms);
                if let (Ok(a), Ok(b)) = (a, b) {
                    worst = worst.max((a - b).abs() / b.abs().max(1e-300));
                }
            }
        }
    }
    report.checks.push(Check::new(
        "A = {0} reproduces the single-point forms",
        worst,
        worst <= 1e-10,
        "largest relative difference",
    ));
    Ok(report)
}

fn corollary3(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&[1024, 4096, 16384], &[256, 1024, 4096]);
    let cap = opts.cap_or(DEFAULT_CAP);
    let (name, spec) = opts.laws(&["symmetric-1.5"])?.remove(0);
    let law = build(&spec)?;
    let asy = Asymptotics::new(&law, 64)?;
    let forms = FiniteSetForms::new(&asy, &FINITE_SET)?;
    let top = n_max(&ns)?;
    let w = default_half_width(law.alpha(), top);
    let set = KillingSet::finite(&FINITE_SET);
    let mut report = VerificationReport::new("cor3", &name);
    for x in [0i64, 5] {
        let fx = first_passage(&law, set.clone(), x, top, w, DEFAULT_ESCAPE_BUDGET)?;
        for (j, &y) in fx.entry_points.iter().enumerate() {
            let mut rows = Vec::new();
            let mut printed = Vec::new();
            for &n in &ns {
                let exact = fx.entry[n][j];
                let rhs = asy.rhs_corollary3(&forms, x, y, n, fx.f[n])?;
                rows.push(ReportRow::new(n, x, Some(y), exact, rhs, "u_-A(-y)"));
                printed.push(ReportRow::new(
                    n,
                    x,
                    Some(y),
                    exact,
                    asy.corollary3_printed_form(&forms, y, fx.f[n]),
                    "u_A(-y)",
                ));
            }
            report.series.push(Series::checked(format!("x={x}, y={y}: f_A^x(n) u_-A(-y)"), rows, cap));
            report.series.push(Series::info(format!("x={x}, y={y}: f_A^x(n) u_A(-y)"), printed));
        }
    }
    Ok(report)
}

fn ladder(opts: &ReportOptions) -> Result<VerificationReport> {
    let cap = opts.cap_or(THEOREM_CAP);
    let (name, spec) = opts.laws(&["spectrally-positive-1.5"])?.remove(0);
    let law = build(&spec)?;
    let p = law.stable_params();
    ensure_extremal(&p, "ladder")?;
    let mut report = VerificationReport::new("ladder", &name);
    let tables = ladder_renewals(&law, 1024)?;
    let mean = tables.mean_descending;
    report.notes.push(format!("E|Z| = {mean:.6}"));
    let mut u_rows = Vec::new();
    let mut v_rows = Vec::new();
    let mut v_plain = Vec::new();
    for k in 4..=10 {
        let x = 1usize << k;
        let xf = x as f64;
        u_rows.push(ReportRow::new(0, x as i64, None, tables.u_ds[x] * mean, xf, "ladder"));
        let v_limit = xf.powf(p.alpha - 1.0) / (p.c0 * gamma(p.alpha));
        v_rows.push(ReportRow::new(0, x as i64, None, tables.v_as[x], mean * v_limit, "ladder"));
        v_plain.push(ReportRow::new(0, x as i64, None, tables.v_as[x], v_limit, "ladder"));
    }
    report.series.push(Series::checked("U_ds(x) E|Z| / x", u_rows, cap));
    report.series.push(Series::checked("V_as(x) c0 Gamma(alpha) / (E|Z| x^(alpha-1))", v_rows, cap));
    report.series.push(Series::info("V_as(x) c0 Gamma(alpha) / x^(alpha-1)", v_plain));
    // entrance density against its small-eta form
    let (n_fine, n_coarse) = if opts.quick { (4096, 1024) } else { (REFERENCE_HORIZON, REFERENCE_HORIZON / 4) };
    let starts = ENTRANCE_STARTS;
    let etas = if opts.quick { vec![0.8, 0.4, 0.2, 0.1] } else { vec![0.8, 0.4, 0.2, 0.1, 0.05] };
    let fine = entrance_density_estimates(&law, &etas, n_fine, &starts)?;
    let p0 = density_at_zero(&p) * p.c0.powf(-1.0 / p.alpha);
    let small = |eta: f64| p0 * eta.powf(p.alpha - 1.0) / (p.c0 * gamma(p.alpha));
    let s_fine = (n_fine as f64).powf(1.0 / p.alpha);
    let rows = fine
        .iter()
        .map(|e| ReportRow::new(n_fine, starts[0], Some((e.eta * s_fine).floor() as i64), e.value, small(e.eta), "small_eta"))
        .collect();
    report.series.push(Series::checked("K_c0(eta) against its small-eta form, eta = 0.8 ... ", rows, cap));
    let coarse_etas: Vec<f64> = etas.iter().copied().filter(|&e| e >= 0.1).collect();
    let coarse = entrance_density_estimates(&law, &coarse_etas, n_coarse, &starts)?;
    for c in &coarse {
        let f = fine.iter().find(|f| f.eta == c.eta).map(|f| f.value).unwrap_or(f64::NAN);
        let gap = (f / c.value - 1.0).abs();
        report.checks.push(Check::new(
            format!("K estimate at eta={} stable from n={n_coarse} to n={n_fine}", c.eta),
            gap,
            gap <= 0.05,
            format!("{:.5} vs {:.5}", c.value, f),
        ));
    }
    // the meander law Q'(eta) = K(eta) / (alpha p_{c0}(0)) integrates to one
    for &x in &starts {
        let w = default_half_width(p.alpha, n_fine);
        let fp = first_passage(&law, KillingSet::AtOrBelow(0), x, n_fine, w, DEFAULT_ESCAPE_BUDGET)?;
        let survival = 1.0 - fp.cumulative[n_fine];
        let renewal = mean * tables.u_ds[x as usize - 1];
        let mass = survival * s_fine / (renewal * p.alpha * p0);
        report.checks.push(Check::new(
            format!("meander mass from start {x} at n={n_fine}"),
            mass,
            (mass - 1.0).abs() <= 0.02,
            "survival n^(1/alpha) / (V(x) alpha p_c0(0)), V the descending renewal function".to_string(),
        ));
    }
    Ok(report)
}

fn diagnostics(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&[1024, 4096], &[256, 1024]);
    let mut report = VerificationReport::new("diagnostics", "");
    let mut names = Vec::new();
    for (name, spec) in opts.laws(&["symmetric-1.5", "spectrally-positive-1.5"])? {
        let law = build(&spec)?;
        let asy = Asymptotics::new(&law, 4 * (n_max(&ns)? as f64).powf(1.0 / law.alpha()) as i64 + 16)?;
        let mut r = diagnostics_prop21_23(&asy, &law, &ns, &name)?;
        r.merge(lemma_kernel_bound(&law, &ns, &name)?);
        for s in r.series.iter_mut() {
            s.label = format!("{name}: {}", s.label);
        }
        for c in r.checks.iter_mut() {
            c.label = format!("{name}: {}", c.label);
        }
        report.merge(r);
        names.push(name);
    }
    report.law = names.join(",");
    Ok(report)
}

fn comparison(opts: &ReportOptions) -> Result<VerificationReport> {
    let ns = opts.horizons(&STANDARD, &QUICK);
    let cap = opts.cap_or(DEFAULT_CAP);
    let (name, spec) = opts.laws(&["spectrally-positive-1.5"])?.remove(0);
    let law = build(&spec)?;
    ensure_extremal(&law.stable_params(), "comp")?;
    let asy = Asymptotics::new(&law, 64)?;
    let mut report = VerificationReport::new("comp", &name);
    for (x, y) in [(4i64, 4i64), (16, 16)] {
        let rows = comparison_identity(&asy, &law, x, y, &ns)?;
        report.series.push(Series::checked(format!("x={x}, y={y}"), rows, cap));
    }
    Ok(report)
}
