//! Exact finite-time kernels of the free and killed walk.

mod engine;
mod fourier;
mod ladder;

pub use engine::{default_half_width, KilledWalk, KillingSet, Ledger, Propagator};
pub use fourier::{fourier_first_passage, fourier_first_passage_grid, FourierOracle};
pub use ladder::{ladder_renewals, ladder_renewals_dp, LadderRoute, LadderTables, WienerHopf, DEFAULT_MODES};

use crate::error::{Error, Result};
use crate::law::WalkLaw;
use serde::{Deserialize, Serialize};

/// Escape budget used when callers do not supply one.
pub const DEFAULT_ESCAPE_BUDGET: f64 = 5e-2;

/// Snapshots `n -> p^n_B(x, .)` of one run plus the per-step ledgers.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelTable {
    pub killing: KillingSet,
    pub start: i64,
    pub half_width: i64,
    pub n_max: usize,
    /// `(n, values indexed by y + W)`
    pub snapshots: Vec<(usize, Vec<f64>)>,
    /// ledger after each step, index `n` (entry 0 is the initial state)
    pub ledgers: Vec<Ledger>,
}

impl KernelTable {
    pub fn at(&self, n: usize) -> Option<&[f64]> {
        self.snapshots
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, v)| v.as_slice())
    }

    /// `p^n_B(x, y)`; zero outside the window.
    pub fn value(&self, n: usize, y: i64) -> Option<f64> {
        let row = self.at(n)?;
        if y.abs() > self.half_width {
            Some(0.0)
        } else {
            Some(row[(y + self.half_width) as usize])
        }
    }

    pub fn max_defect(&self) -> f64 {
        self.ledgers.iter().fold(0.0, |m, l| m.max(l.defect()))
    }
}

fn check_budget(ledger: &Ledger, budget: f64) -> Result<()> {
    if ledger.escaped > budget {
        return Err(Error::WindowTooSmall(format!(
            "escaped mass {:.3e} exceeds budget {budget:.3e}; enlarge the window",
            ledger.escaped
        )));
    }
    Ok(())
}

/// Run a killed walk, keeping the listed snapshots.
pub fn kernel_run(
    prop: &Propagator,
    killing: KillingSet,
    start: i64,
    n_max: usize,
    snapshots: &[usize],
) -> Result<KernelTable> {
    let mut walk = KilledWalk::new(prop, killing.clone(), start)?;
    let mut table = KernelTable {
        killing,
        start,
        half_width: prop.half_width(),
        n_max,
        snapshots: Vec::new(),
        ledgers: vec![walk.ledger()],
    };
    if snapshots.contains(&0) {
        table.snapshots.push((0, walk.values().to_vec()));
    }
    for n in 1..=n_max {
        walk.step();
        table.ledgers.push(walk.ledger());
        if snapshots.contains(&n) {
            table.snapshots.push((n, walk.values().to_vec()));
        }
    }
    Ok(table)
}

/// Free kernel `p^n(x)` from the origin.
pub fn marginal_kernel(
    law: &WalkLaw,
    n_max: usize,
    half_width: i64,
    snapshots: &[usize],
    budget: f64,
) -> Result<KernelTable> {
    let prop = Propagator::new(law, half_width)?;
    let t = kernel_run(&prop, KillingSet::Empty, 0, n_max, snapshots)?;
    check_budget(t.ledgers.last().unwrap(), budget)?;
    Ok(t)
}

/// Killed kernel `p^n_B(x, .)`.
pub fn killed_kernel(
    law: &WalkLaw,
    killing: KillingSet,
    start: i64,
    n_max: usize,
    half_width: i64,
    snapshots: &[usize],
    budget: f64,
) -> Result<KernelTable> {
    let prop = Propagator::new(law, half_width)?;
    let t = kernel_run(&prop, killing, start, n_max, snapshots)?;
    check_budget(t.ledgers.last().unwrap(), budget)?;
    Ok(t)
}

/// Law of the first entrance time `sigma^x_B`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FirstPassageLaw {
    pub start: i64,
    pub killing: KillingSet,
    /// `f[n] = P[sigma_B = n]`, `f[0] = 0`
    pub f: Vec<f64>,
    /// `cumulative[n] = sum_{m <= n} f[m]`
    pub cumulative: Vec<f64>,
    /// For a finite set: `entry[n][j] = P[sigma_B = n, S_n = set[j]]`.
    pub entry: Vec<Vec<f64>>,
    pub entry_points: Vec<i64>,
    /// Mass neither killed nor alive at `n_max`, an upper bound on the
    /// missing probability of every `f[n]` and of the tail.
    pub truncation_tail: f64,
    pub ledger: Ledger,
}

/// `f^x_B(n)` for `n <= n_max` from a walk run in `prop`.
pub fn first_passage_with(
    prop: &Propagator,
    killing: KillingSet,
    start: i64,
    n_max: usize,
) -> Result<FirstPassageLaw> {
    let points = match &killing {
        KillingSet::Finite(v) => v.clone(),
        _ => Vec::new(),
    };
    let mut walk = KilledWalk::new(prop, killing.clone(), start)?;
    let mut f = vec![0.0];
    let mut cumulative = vec![0.0];
    let mut entry = vec![vec![0.0; points.len()]];
    for _ in 1..=n_max {
        walk.step();
        f.push(walk.entered_total());
        cumulative.push(cumulative.last().unwrap() + walk.entered_total());
        entry.push(points.iter().map(|&z| walk.entered_at(z)).collect());
    }
    let ledger = walk.ledger();
    Ok(FirstPassageLaw {
        start,
        killing,
        f,
        cumulative,
        entry,
        entry_points: points,
        truncation_tail: ledger.escaped,
        ledger,
    })
}

pub fn first_passage(
    law: &WalkLaw,
    killing: KillingSet,
    start: i64,
    n_max: usize,
    half_width: i64,
    budget: f64,
) -> Result<FirstPassageLaw> {
    let prop = Propagator::new(law, half_width)?;
    let fp = first_passage_with(&prop, killing, start, n_max)?;
    check_budget(&fp.ledger, budget)?;
    Ok(fp)
}

/// Entrance law `h^x(n, y) = P[sigma_{(-inf,0]} = n, S_n = y]` for `x >= 1`
/// and `y` in `[-depth, 0]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HalfLineEntrance {
    pub start: i64,
    pub depth: i64,
    /// `rows[n][k] = h^x(n, -k)`, `rows[0]` is zero
    pub rows: Vec<Vec<f64>>,
    /// `P[sigma = n]` including entries below `-depth` and below the window
    pub totals: Vec<f64>,
    pub survival: f64,
    pub ledger: Ledger,
}

pub fn halfline_entrance(
    law: &WalkLaw,
    start: i64,
    n_max: usize,
    half_width: i64,
    depth: i64,
    budget: f64,
) -> Result<HalfLineEntrance> {
    if start < 1 {
        return Err(Error::OutOfRegime(format!("entrance law needs x >= 1, got {start}")));
    }
    let depth = depth.min(half_width);
    let prop = Propagator::new(law, half_width)?;
    let mut walk = KilledWalk::new(&prop, KillingSet::AtOrBelow(0), start)?;
    let mut rows = vec![vec![0.0; (depth + 1) as usize]];
    let mut totals = vec![0.0];
    for _ in 1..=n_max {
        walk.step();
        rows.push((0..=depth).map(|k| walk.entered_at(-k)).collect());
        totals.push(walk.entered_total());
    }
    let ledger = walk.ledger();
    check_budget(&ledger, budget)?;
    Ok(HalfLineEntrance {
        start,
        depth,
        rows,
        totals,
        survival: ledger.alive,
        ledger,
    })
}

/// `f^x(n)` for every start `x` in the window at the listed times.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StartProfile {
    pub half_width: i64,
    /// `(n, values indexed by x + W)`
    pub snapshots: Vec<(usize, Vec<f64>)>,
    /// weight lost through the window edges (not a probability)
    pub escaped: f64,
}

impl StartProfile {
    pub fn at(&self, n: usize) -> Option<&[f64]> {
        self.snapshots
            .iter()
            .find(|(m, _)| *m == n)
            .map(|(_, v)| v.as_slice())
    }

    /// `f^x(n)`; `None` for an unrecorded time or a start outside the window.
    pub fn value(&self, n: usize, x: i64) -> Option<f64> {
        if x.abs() > self.half_width {
            return None;
        }
        self.at(n).map(|row| row[(x + self.half_width) as usize])
    }
}

/// First-passage probabilities to the origin from every start at once.
///
/// `v_n(x) = f^x(n)` obeys `v_{n+1}(x) = sum_{z != 0} p(z - x) v_n(z)` with
/// `v_1(x) = p(-x)`, which is the reversed walk started at 0 and killed at 0;
/// the mass it kills at step `n` is `f^0(n)`.
pub fn first_passage_profile(
    law: &WalkLaw,
    n_max: usize,
    half_width: i64,
    snapshots: &[usize],
) -> Result<StartProfile> {
    let prop = Propagator::reversed(law, half_width)?;
    let mut walk = KilledWalk::new(&prop, KillingSet::Finite(vec![0]), 0)?;
    let w = half_width;
    let mut out = StartProfile {
        half_width: w,
        snapshots: Vec::new(),
        escaped: 0.0,
    };
    for n in 1..=n_max {
        walk.step();
        if snapshots.contains(&n) {
            let mut row = walk.values().to_vec();
            row[w as usize] = walk.entered_at(0);
            out.snapshots.push((n, row));
        }
    }
    out.escaped = walk.ledger().escaped;
    Ok(out)
}

/// `p^n_{0}(x, y)` for every `x` in the window and fixed `y != 0`, read off
/// one run from `-y` through `p^n_{0}(x, y) = p^n_{0}(-y, -x)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetProfile {
    pub target: i64,
    pub table: KernelTable,
}

impl TargetProfile {
    pub fn new(law: &WalkLaw, target: i64, n_max: usize, half_width: i64, snapshots: &[usize], budget: f64) -> Result<Self> {
        if target == 0 {
            return Err(Error::OutOfRegime("target profile needs y != 0".into()));
        }
        let table = killed_kernel(law, KillingSet::Finite(vec![0]), -target, n_max, half_width, snapshots, budget)?;
        Ok(TargetProfile { target, table })
    }

    /// `p^n_{0}(x, y)`.
    pub fn value(&self, n: usize, x: i64) -> Option<f64> {
        self.table.value(n, -x)
    }
}
