//! Right-hand sides of the limit theorems and exact-versus-asymptotic
//! convergence reports.
//!
//! Exact values always come from the killed-walk dynamic programme; the
//! right-hand sides only use the stable-law numerics and the potential
//! kernel, plus exact `f^x(n)` where a formula contains the discrete
//! first-passage law itself.

mod diagnostics;
mod estimates;
mod reports;
mod rhs;

pub use diagnostics::{
    comparison_identity, crossover_scan, diagnostics_prop21_23, lemma_kernel_bound, tunneling_check,
    CrossoverPoint, TunnelingResult, TunnelingRow,
};
pub use estimates::{
    entrance_density_estimates, k_estimate, stable_killed_density, EntranceEstimate, ENTRANCE_STARTS,
};
pub use reports::{report, report_ids, ReportOptions};
pub use rhs::{
    rhs_theorem1, Asymptotics, Corollary2Regime, FiniteSetForms, FirstReturn, KernelRegime, KernelTerms,
    PassageRegime, SplitRegime,
};

use serde::{Deserialize, Serialize};

/// Cap on the final `|ratio - 1|` when none is configured.
pub const DEFAULT_CAP: f64 = 0.15;

/// One grid point of a report.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub x: i64,
    /// absent for quantities that depend on a single space variable
    pub y: Option<i64>,
    pub exact: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub regime: String,
}

impl ReportRow {
    pub fn new(n: usize, x: i64, y: Option<i64>, exact: f64, rhs: f64, regime: &str) -> Self {
        ReportRow {
            n,
            x,
            y,
            exact,
            rhs,
            ratio: exact / rhs,
            regime: regime.to_string(),
        }
    }
}

/// Outcome of the trend criterion on one series.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TrendStats {
    /// `|ratio - 1|` over the whole series
    pub deviations: Vec<f64>,
    /// deviation non-increasing over the last three points
    pub non_increasing: bool,
    pub final_deviation: f64,
    pub cap: f64,
    pub passed: bool,
}

/// Trend criterion: `|ratio - 1|` does not increase over the last three
/// points and ends below `cap`.
pub fn trend(ratios: &[f64], cap: f64) -> TrendStats {
    let deviations: Vec<f64> = ratios.iter().map(|r| (r - 1.0).abs()).collect();
    let tail = &deviations[deviations.len().saturating_sub(3)..];
    let non_increasing = tail.windows(2).all(|w| w[1] <= w[0]) && deviations.iter().all(|d| d.is_finite());
    let final_deviation = deviations.last().copied().unwrap_or(f64::NAN);
    TrendStats {
        passed: non_increasing && final_deviation < cap,
        deviations,
        non_increasing,
        final_deviation,
        cap,
    }
}

/// Rows along one refinement path, with or without a trend verdict.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Series {
    pub label: String,
    pub rows: Vec<ReportRow>,
    /// `None` for series reported for information only
    pub trend: Option<TrendStats>,
}

impl Series {
    pub fn checked(label: impl Into<String>, rows: Vec<ReportRow>, cap: f64) -> Self {
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        Series {
            label: label.into(),
            trend: Some(trend(&ratios, cap)),
            rows,
        }
    }

    pub fn info(label: impl Into<String>, rows: Vec<ReportRow>) -> Self {
        Series {
            label: label.into(),
            rows,
            trend: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.trend.as_ref().map_or(true, |t| t.passed)
    }
}

/// A pass/fail check that is not a trend (orderings, stability, locations).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(label: impl Into<String>, value: f64, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            label: label.into(),
            value,
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub law: String,
    pub series: Vec<Series>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

/// Reports of bounded-ness diagnostics share the same layout.
pub type DiagnosticReport = VerificationReport;

impl VerificationReport {
    pub fn new(theorem_id: &str, law: &str) -> Self {
        VerificationReport {
            theorem_id: theorem_id.to_string(),
            law: law.to_string(),
            series: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.series.iter().all(Series::passed) && self.checks.iter().all(|c| c.passed)
    }

    /// Largest final deviation over the checked series.
    pub fn final_deviation(&self) -> f64 {
        self.series
            .iter()
            .filter_map(|s| s.trend.as_ref())
            .fold(0.0, |m, t| m.max(t.final_deviation))
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.series.extend(other.series);
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    /// Human-readable summary, one line per series and check.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "{} [{}]: {}\n",
            self.theorem_id,
            self.law,
            if self.passed() { "PASS" } else { "FAIL" }
        );
        for s in &self.series {
            let ratios: Vec<String> = s.rows.iter().map(|r| format!("{:.4}", r.ratio)).collect();
            let verdict = match &s.trend {
                Some(t) if t.passed => "pass",
                Some(_) => "FAIL",
                None => "info",
            };
            out.push_str(&format!("  {verdict:4} {}: {}\n", s.label, ratios.join(" ")));
        }
        for c in &self.checks {
            out.push_str(&format!(
                "  {:4} {}: {:.4} ({})\n",
                if c.passed { "pass" } else { "FAIL" },
                c.label,
                c.value,
                c.detail
            ));
        }
        out
    }
}
