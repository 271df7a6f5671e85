//! Monte Carlo oracle: exact increment sampling and indicator estimators.
//!
//! Every trial draws from a ChaCha8 stream keyed by `(seed, stream)`, and
//! trials are split over streams in a fixed way, so results do not depend
//! on how many threads run them.

use crate::asymptotics::{Check, ReportRow, Series, VerificationReport};
use crate::error::{Error, Result};
use crate::killed::{default_half_width, first_passage, KillingSet, DEFAULT_ESCAPE_BUDGET};
use crate::law::WalkLaw;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Jumps with `|k| < ALIAS_RADIUS` come from the alias table (the radius
/// grows if a tail starts beyond it).
pub const ALIAS_RADIUS: i64 = 1024;
/// Smallest number of conditioned paths for a conditional estimate.
pub const CONDITIONING_FLOOR: u64 = 50;
const Z95: f64 = 1.959963984540054;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SimConfig {
    pub law_id: String,
    pub trials: u64,
    pub n_horizon: usize,
    pub seed: u64,
    pub stream_count: usize,
}

impl SimConfig {
    pub fn new(law_id: impl Into<String>, trials: u64, n_horizon: usize, seed: u64) -> Self {
        SimConfig {
            law_id: law_id.into(),
            trials,
            n_horizon,
            seed,
            stream_count: 64,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.stream_count == 0 {
            return Err(Error::Config("stream_count must be at least 1".into()));
        }
        Ok(())
    }

    /// Trials handled by stream `i`.
    fn share(&self, i: usize) -> u64 {
        let s = self.stream_count as u64;
        self.trials / s + u64::from((i as u64) < self.trials % s)
    }
}

/// Random stream `stream` of the run seeded by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub struct EstimateCI {
    pub point: f64,
    pub half_width_95: f64,
    pub trials_effective: u64,
}

impl EstimateCI {
    /// Proportion `hits / trials` with the normal-approximation interval.
    pub fn proportion(hits: u64, trials: u64) -> Self {
        let p = hits as f64 / trials as f64;
        EstimateCI {
            point: p,
            half_width_95: Z95 * (p * (1.0 - p) / trials as f64).sqrt(),
            trials_effective: trials,
        }
    }

    pub fn covers(&self, value: f64) -> bool {
        (value - self.point).abs() <= self.half_width_95
    }
}

/// Walker alias table over a finite list of weights.
#[derive(Clone, Debug)]
struct Alias {
    prob: Vec<f64>,
    alias: Vec<u32>,
}

impl Alias {
    fn new(weights: &[f64]) -> Self {
        let m = weights.len();
        let total: f64 = weights.iter().sum();
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * m as f64 / total).collect();
        let mut prob = vec![1.0; m];
        let mut alias: Vec<u32> = (0..m as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..m).partition(|&i| scaled[i] < 1.0);
        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            prob[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // leftovers are 1 up to rounding
        Alias { prob, alias }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let i = rng.gen_range(0..self.prob.len());
        if rng.gen::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i] as usize
        }
    }
}

/// Exact sampler for a step law.
#[derive(Clone, Debug)]
pub struct IncrementSampler {
    alias: Alias,
    radius: i64,
    /// exponents of `p(k) ~ k^{-exponent}` beyond the radius, `None` if empty
    pos_exponent: f64,
    neg_exponent: Option<f64>,
}

impl IncrementSampler {
    pub fn new(law: &WalkLaw) -> Self {
        let starts = law.positive_tail().start.max(law.negative_tail().map_or(0, |t| t.start));
        let r = ALIAS_RADIUS.max(starts + 1);
        let mut weights = law.pmf_range(-(r - 1), r - 1);
        // two extra outcomes: a jump >= r or <= -r
        weights.push(law.mass_above(r - 1));
        weights.push(law.mass_below(-(r - 1)));
        IncrementSampler {
            alias: Alias::new(&weights),
            radius: r,
            pos_exponent: law.positive_tail().exponent,
            neg_exponent: law.negative_tail().map(|t| t.exponent),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> i64 {
        let r = self.radius;
        let i = self.alias.sample(rng) as i64;
        let window = 2 * r - 1;
        if i < window {
            i - (r - 1)
        } else if i == window {
            zipf_tail(rng, self.pos_exponent, r)
        } else {
            -zipf_tail(rng, self.neg_exponent.expect("no mass below -1"), r)
        }
    }
}

/// `k >= start` with `P[k] ∝ k^{-s}`, `s > 1`.
///
/// Proposal: the integer part of a continuous Pareto variable on
/// `[start, inf)` with density `∝ u^{-s}`, inverted in closed form; the
/// acceptance step corrects the proposal to the lattice law exactly.
fn zipf_tail<R: Rng>(rng: &mut R, s: f64, start: i64) -> i64 {
    let r = start as f64;
    let bound = (1.0 + 1.0 / r).powf(s);
    loop {
        let v: f64 = 1.0 - rng.gen::<f64>();
        let u = r * v.powf(-1.0 / (s - 1.0));
        if !u.is_finite() || u >= 9.0e18 {
            continue;
        }
        let k = u.floor();
        // proposal mass of k relative to the target, both up to the same constant
        let cell = (k.powf(1.0 - s) - (k + 1.0).powf(1.0 - s)) / (s - 1.0);
        let accept = k.powf(-s) / (bound * cell);
        if rng.gen::<f64>() < accept {
            return k as i64;
        }
    }
}

/// Per-horizon estimates of `f^x(n)` and `P[sigma > n]`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FirstPassageEstimate {
    pub x: i64,
    pub config: SimConfig,
    pub rows: Vec<FirstPassageRow>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FirstPassageRow {
    pub n: usize,
    pub first_passage: EstimateCI,
    pub survival: EstimateCI,
}

/// Indicator estimates of `f^x(n) = P[sigma^x_{0} = n]` and of survival
/// past `n`, for every `n` in `n_grid` (all at most `config.n_horizon`).
pub fn estimate_first_passage(
    law: &WalkLaw,
    x: i64,
    n_grid: &[usize],
    config: &SimConfig,
) -> Result<FirstPassageEstimate> {
    config.validate()?;
    let horizon = config.n_horizon;
    if let Some(&bad) = n_grid.iter().find(|&&n| n == 0 || n > horizon) {
        return Err(Error::Config(format!("horizon {bad} outside 1..={horizon}")));
    }
    let sampler = IncrementSampler::new(law);
    let counts = (0..config.stream_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(config.seed, i as u64);
            let mut hist = vec![0u64; horizon + 1];
            for _ in 0..config.share(i) {
                let mut pos = x;
                for step in 1..=horizon {
                    pos += sampler.sample(&mut rng);
                    if pos == 0 {
                        hist[step] += 1;
                        break;
                    }
                }
            }
            hist
        })
        .reduce(
            || vec![0u64; horizon + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(u, v)| *u += v);
                a
            },
        );
    let mut cumulative = vec![0u64; horizon + 1];
    for n in 1..=horizon {
        cumulative[n] = cumulative[n - 1] + counts[n];
    }
    let rows = n_grid
        .iter()
        .map(|&n| FirstPassageRow {
            n,
            first_passage: EstimateCI::proportion(counts[n], config.trials),
            survival: EstimateCI::proportion(config.trials - cumulative[n], config.trials),
        })
        .collect();
    Ok(FirstPassageEstimate {
        x,
        config: config.clone(),
        rows,
    })
}

/// `P[first entry of (-inf, 0] lands below -R | sigma^x_{0} > n, S_n = y]`
/// by rejection on the conditioning event.
pub fn estimate_conditional_escape(
    law: &WalkLaw,
    x: i64,
    y: i64,
    n: usize,
    r: i64,
    config: &SimConfig,
) -> Result<EstimateCI> {
    config.validate()?;
    if !(x > 0 && y < 0) {
        return Err(Error::OutOfRegime(format!("need x > 0 > y, got x={x}, y={y}")));
    }
    let sampler = IncrementSampler::new(law);
    let (conditioned, escaped) = (0..config.stream_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(config.seed, i as u64);
            let (mut hits, mut esc) = (0u64, 0u64);
            'trial: for _ in 0..config.share(i) {
                let mut pos = x;
                let mut entry = None;
                for _ in 0..n {
                    pos += sampler.sample(&mut rng);
                    if pos == 0 {
                        continue 'trial;
                    }
                    if pos < 0 && entry.is_none() {
                        entry = Some(pos);
                    }
                }
                if pos == y {
                    hits += 1;
                    if entry.is_some_and(|e| e < -r) {
                        esc += 1;
                    }
                }
            }
            (hits, esc)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if conditioned < CONDITIONING_FLOOR {
        return Err(Error::ConditioningTooRare(format!(
            "{conditioned} of {} paths met the conditioning event, floor {CONDITIONING_FLOOR}",
            config.trials
        )));
    }
    Ok(EstimateCI::proportion(escaped, conditioned))
}

/// Monte Carlo estimates of `f^x(n)` and survival set against the dynamic
/// programme, in the report layout; each check asks the 95% interval to
/// cover the exact value.
pub fn first_passage_report(
    law: &WalkLaw,
    law_name: &str,
    x: i64,
    n_grid: &[usize],
    config: &SimConfig,
) -> Result<VerificationReport> {
    let est = estimate_first_passage(law, x, n_grid, config)?;
    let w = default_half_width(law.alpha(), config.n_horizon) + x.abs();
    let dp = first_passage(law, KillingSet::Finite(vec![0]), x, config.n_horizon, w, DEFAULT_ESCAPE_BUDGET)?;
    let mut report = VerificationReport::new("mc_first_passage", law_name);
    let mut passage = Vec::new();
    let mut survival = Vec::new();
    for row in &est.rows {
        let n = row.n;
        let exact_survival = 1.0 - dp.cumulative[n];
        passage.push(ReportRow::new(n, x, None, dp.f[n], row.first_passage.point, "montecarlo"));
        survival.push(ReportRow::new(n, x, None, exact_survival, row.survival.point, "montecarlo"));
        for (what, ci, exact) in [
            ("f^x(n)", row.first_passage, dp.f[n]),
            ("P[sigma > n]", row.survival, exact_survival),
        ] {
            report.checks.push(Check::new(
                format!("{what} at n={n}: interval covers the exact value"),
                (exact - ci.point).abs() / ci.half_width_95.max(f64::MIN_POSITIVE),
                ci.covers(exact),
                format!("{:.6e} +- {:.2e} vs {exact:.6e}", ci.point, ci.half_width_95),
            ));
        }
    }
    report.series.push(Series::info("f^x(n): exact over estimate", passage));
    report.series.push(Series::info("P[sigma > n]: exact over estimate", survival));
    report.notes.push(format!(
        "seed {}, {} trials over {} streams",
        config.seed, config.trials, config.stream_count
    ));
    Ok(report)
}
