//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use stablewalk::asymptotics::{report, ReportOptions, VerificationReport};
use stablewalk::killed::*;
use stablewalk::montecarlo::{estimate_first_passage, SimConfig};
use stablewalk::potential::{FiniteSetPotential, PotentialTable};
use stablewalk::stable::constants::{abs_moment, density_at_zero};
use stablewalk::stable::{
    abs_moment_quadrature, hitting_density_by, stable_density, total_mass, HittingRoute, StableParams,
};
use stablewalk::{presets, WalkLaw};
use std::time::Instant;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

/// Largest value seen and where.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn see(&mut self, v: f64, at: impl FnOnce() -> String) {
        if !(v <= self.value) {
            self.value = v;
            self.at = at();
        }
    }
}

fn law(name: &str) -> WalkLaw {
    presets::build(name).unwrap()
}

const IDENTITY_TOL: f64 = 1e-10;
const GRID: i64 = 20;

fn exact_identities() -> Outcome {
    let mut worst = Worst::default();
    for name in ["skewed-1.6", "spectrally-positive-1.5", "symmetric-1.2"] {
        let law = law(name);
        let w = default_half_width(law.alpha(), 128) + GRID;
        let forward = Propagator::new(&law, w).unwrap();
        let reversed = Propagator::reversed(&law, w).unwrap();
        let origin = KillingSet::finite(&[0]);
        let ns = [1usize, 7, 32, 128];
        // duality: p^n(x, y) = q^n(y, x) for the reversed law q(k) = p(-k), and = p^n(-y, -x)
        let runs: Vec<(i64, KernelTable, KernelTable)> = (-GRID..=GRID)
            .map(|z| {
                (
                    z,
                    kernel_run(&forward, origin.clone(), z, 128, &ns).unwrap(),
                    kernel_run(&reversed, origin.clone(), z, 128, &ns).unwrap(),
                )
            })
            .collect();
        let row = |z: i64| &runs[(z + GRID) as usize];
        for x in -GRID..=GRID {
            worst.see(row(x).1.max_defect(), || format!("{name}: ledger from x={x}"));
            worst.see(row(x).2.max_defect(), || format!("{name}: reversed ledger from x={x}"));
            // a start on the set survives step 0 while a target there is killed,
            // so duality is stated off the set
            for y in (-GRID..=GRID).filter(|&y| x != 0 && y != 0) {
                for &n in &ns {
                    let p = row(x).1.value(n, y).unwrap();
                    let q = row(y).2.value(n, x).unwrap();
                    let r = row(-y).1.value(n, -x).unwrap();
                    worst.see((p - q).abs().max((p - r).abs()), || format!("{name}: duality n={n} x={x} y={y}"));
                }
            }
        }
        // Chapman-Kolmogorov through the whole window: p^64 = p^32 p^32
        let cw = 80;
        let prop = Propagator::new(&law, cw).unwrap();
        let half: Vec<KernelTable> = (-cw..=cw)
            .map(|z| kernel_run(&prop, origin.clone(), z, 64, &[32, 64]).unwrap())
            .collect();
        for x in -GRID..=GRID {
            let from_x = &half[(x + cw) as usize];
            for y in -GRID..=GRID {
                let composed: f64 = (-cw..=cw)
                    .map(|z| from_x.value(32, z).unwrap() * half[(z + cw) as usize].value(32, y).unwrap())
                    .sum();
                let direct = from_x.value(64, y).unwrap();
                worst.see((composed - direct).abs(), || format!("{name}: Chapman-Kolmogorov x={x} y={y}"));
            }
        }
        // ledgers for a finite set and a half-line
        for b in [KillingSet::finite(&[-1, 0, 2]), KillingSet::AtOrBelow(0)] {
            let t = killed_kernel(&law, b.clone(), 5, 128, w, &[128], 1.0).unwrap();
            worst.see(t.max_defect(), || format!("{name}: ledger {b:?}"));
        }
        // g_{0} and u_{0} through the finite-set linear algebra against the a-values
        let table = PotentialTable::build(&law, 2 * GRID + 1).unwrap();
        let single = FiniteSetPotential::new(&table, &[0]).unwrap();
        for x in -GRID..=GRID {
            let u = single.u(&table, x);
            worst.see((u - table.a_dagger(x)).abs(), || format!("{name}: u_0({x})"));
            for y in -GRID..=GRID {
                let closed = table.a_dagger(x) + table.a(-y) - table.a(x - y);
                let g = single.green(&table, x, y);
                worst.see((g - closed).abs(), || format!("{name}: g_0({x},{y})"));
            }
        }
    }
    Outcome::new(
        worst.value <= IDENTITY_TOL,
        format!("largest residual {:.2e} ({}), tolerance {IDENTITY_TOL:.0e}", worst.value, worst.at),
    )
}

const MC_TRIALS: u64 = 1_000_000;
const MC_SEED: u64 = 20_240_601;

fn oracle_triangle() -> Outcome {
    let xs = [0i64, 3, -3, 8, -8];
    let ns = [8usize, 32, 128, 512];
    let mut worst = Worst::default();
    for name in ["symmetric-1.5", "skewed-1.6", "spectrally-positive-1.5"] {
        let law = law(name);
        let grid = fourier_first_passage_grid(&law, &xs, &ns).unwrap();
        let w = default_half_width(law.alpha(), 512) + 8;
        let prop = Propagator::new(&law, w).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let fp = first_passage_with(&prop, KillingSet::finite(&[0]), x, 512).unwrap();
            for (j, &n) in ns.iter().enumerate() {
                worst.see((grid[i][j].value - fp.f[n]).abs(), || format!("{name} x={x} n={n}"));
            }
        }
    }
    let fourier_ok = worst.value <= 1e-4;
    // (law, start, horizon, first passage at n or survival past n)
    let cases: [(&str, i64, usize, bool); 6] = [
        ("symmetric-1.5", 3, 32, true),
        ("symmetric-1.5", -8, 128, false),
        ("skewed-1.6", 3, 8, true),
        ("skewed-1.6", -3, 128, false),
        ("spectrally-positive-1.5", 8, 32, true),
        ("spectrally-positive-1.5", -3, 128, false),
    ];
    let mut misses = Vec::new();
    for (name, x, n, at_n) in cases {
        let law = law(name);
        let fp = first_passage(
            &law,
            KillingSet::finite(&[0]),
            x,
            n,
            default_half_width(law.alpha(), n) + x.abs(),
            DEFAULT_ESCAPE_BUDGET,
        )
        .unwrap();
        let exact = if at_n { fp.f[n] } else { 1.0 - fp.cumulative[n] };
        let est = estimate_first_passage(&law, x, &[n], &SimConfig::new(name, MC_TRIALS, n, MC_SEED)).unwrap();
        let ci = if at_n { &est.rows[0].first_passage } else { &est.rows[0].survival };
        if !ci.covers(exact) {
            misses.push(format!("{name} x={x} n={n}: {:.5} +- {:.5} vs {exact:.5}", ci.point, ci.half_width_95));
        }
    }
    Outcome::new(
        fourier_ok && misses.is_empty(),
        format!(
            "DP vs Fourier largest gap {:.2e} ({}); Monte Carlo {}/6 intervals cover{}",
            worst.value,
            worst.at,
            6 - misses.len(),
            if misses.is_empty() { String::new() } else { format!(" [{}]", misses.join("; ")) }
        ),
    )
}

fn stable_numerics() -> Outcome {
    let mut failures = Vec::new();
    let mut cases = 0;
    for a in [1.2, 1.5, 1.8] {
        let m = 2.0 - a;
        for g in [0.0, 0.5 * m, -0.5 * m, m, -m] {
            let p = StableParams::new(a, g, 1.0).unwrap();
            cases += 1;
            let mass = total_mass(&p).unwrap().value;
            if (mass - 1.0).abs() > 1e-6 {
                failures.push(format!("({a},{g:.2}) mass {mass}"));
            }
            let zero = stable_density(&p, 1.0, 0.0).unwrap().value;
            if (zero - density_at_zero(&p)).abs() > 1e-8 {
                failures.push(format!("({a},{g:.2}) p_1(0) {zero} vs {}", density_at_zero(&p)));
            }
            let moment = abs_moment_quadrature(&p, 1.0).unwrap().value;
            if (moment - abs_moment(&p, 1.0)).abs() > 1e-5 {
                failures.push(format!("({a},{g:.2}) abs moment {moment} vs {}", abs_moment(&p, 1.0)));
            }
            if g == m {
                for (x, t) in [(1.0, 1.0), (0.5, 2.0), (2.0, 0.7), (3.0, 10.0)] {
                    let c = hitting_density_by(&p, x, t, HittingRoute::Creeping).unwrap().value;
                    let i = hitting_density_by(&p, x, t, HittingRoute::Integral).unwrap().value;
                    if (c - i).abs() > 1e-8 {
                        failures.push(format!("({a},{g:.2}) f^{x}({t}) {c} vs {i}"));
                    }
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{cases} parameter pairs; {}", if failures.is_empty() { "all within tolerance".into() } else { failures.join("; ") }),
    )
}

fn reports(ids: &[&str]) -> Outcome {
    let opts = ReportOptions::default();
    let mut lines = Vec::new();
    let mut passed = true;
    for id in ids {
        match report(id, &opts) {
            Ok(r) => {
                passed &= r.passed();
                lines.push(describe(&r));
            }
            Err(e) => {
                passed = false;
                lines.push(format!("{id}: error {e}"));
            }
        }
    }
    Outcome::new(passed, lines.join("; "))
}

fn describe(r: &VerificationReport) -> String {
    let failed: Vec<&str> = r
        .series
        .iter()
        .filter(|s| !s.passed())
        .map(|s| s.label.as_str())
        .chain(r.checks.iter().filter(|c| !c.passed).map(|c| c.label.as_str()))
        .collect();
    if failed.is_empty() {
        format!("{} pass (final deviation {:.3})", r.theorem_id, r.final_deviation())
    } else {
        format!("{} FAIL [{}]", r.theorem_id, failed.join(", "))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("exact identities", exact_identities),
        ("oracle triangle", oracle_triangle),
        ("stable numerics", stable_numerics),
        ("first return", || reports(&["thm1"])),
        ("first passage and kernel regimes", || {
            reports(&["thm2", "thm3", "cor1", "crossover", "thm4", "thm5", "cor2"])
        }),
        ("crossing below the origin", || reports(&["thm6", "prop22"])),
        ("finite killing sets", || reports(&["finite", "cor3"])),
        ("ladder constants", || reports(&["ladder"])),
        ("diagnostics", || reports(&["diagnostics"])),
    ];
    let mut all = true;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.passed;
        println!(
            "criterion {} {name}: {} ({:.1}s) {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if !all {
        std::process::exit(1);
    }
}
