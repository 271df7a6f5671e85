use stablewalk::killed::*;
use stablewalk::potential::{FiniteSetPotential, PotentialTable};
use stablewalk::special::gamma;
use stablewalk::{Family, TailSpec, WalkLaw};

fn symmetric() -> WalkLaw {
    WalkLaw::build(&TailSpec::new(1.5, Family::TwoSidedPareto, 0.2)).unwrap()
}

fn skewed() -> WalkLaw {
    WalkLaw::build(&TailSpec::new(1.6, Family::TwoSidedPareto, 0.3).with_weights(0.75, 0.25)).unwrap()
}

fn one_sided() -> WalkLaw {
    WalkLaw::build(&TailSpec::new(1.5, Family::SpectrallyPositive, 0.15)).unwrap()
}

#[test]
fn free_kernel_conserves_mass() {
    let law = skewed();
    let w = default_half_width(law.alpha(), 512);
    let t = marginal_kernel(&law, 512, w, &[1, 512], 1.0).unwrap();
    assert!(t.max_defect() < 1e-12, "defect {}", t.max_defect());
    for y in -5..=5 {
        assert!((t.value(1, y).unwrap() - law.pmf(y)).abs() < 1e-15);
    }
    assert!(t.at(512).unwrap().iter().all(|&v| v >= 0.0));
}

#[test]
fn killed_kernel_vanishes_on_the_set() {
    let law = symmetric();
    let set = [-1i64, 0, 2];
    let t = killed_kernel(&law, KillingSet::finite(&set), 5, 40, 200, &[1, 10, 40], 1.0).unwrap();
    for n in [1, 10, 40] {
        for &z in &set {
            assert_eq!(t.value(n, z).unwrap(), 0.0);
        }
    }
    assert!(t.max_defect() < 1e-12);
}

#[test]
fn chapman_kolmogorov_in_the_window() {
    let law = skewed();
    let w = 40;
    let prop = Propagator::new(&law, w).unwrap();
    let b = KillingSet::finite(&[0]);
    let (x, y) = (3i64, -5i64);
    let whole = kernel_run(&prop, b.clone(), x, 32, &[16, 32]).unwrap();
    let mut composed = 0.0;
    for z in -w..=w {
        let mid = whole.value(16, z).unwrap();
        if mid == 0.0 {
            continue;
        }
        let from_z = kernel_run(&prop, b.clone(), z, 16, &[16]).unwrap();
        composed += mid * from_z.value(16, y).unwrap();
    }
    let direct = whole.value(32, y).unwrap();
    assert!((composed - direct).abs() < 1e-10 * (1.0 + direct), "{composed} {direct}");
}

#[test]
fn duality_with_the_reversed_walk() {
    let law = skewed();
    let w = default_half_width(law.alpha(), 64);
    let forward = Propagator::new(&law, w).unwrap();
    let reversed = Propagator::reversed(&law, w).unwrap();
    let b = KillingSet::finite(&[0]);
    let p = kernel_run(&forward, b.clone(), 3, 64, &[64]).unwrap();
    // time reversal: p^n_B(x, y) = q^n_B(y, x) for the reversed law q
    let q = kernel_run(&reversed, b.clone(), -5, 64, &[64]).unwrap();
    // reflection of space on top of it: p^n_{0}(x, y) = p^n_{0}(-y, -x)
    let r = kernel_run(&forward, b, 5, 64, &[64]).unwrap();
    let lhs = p.value(64, -5).unwrap();
    assert!(lhs > 0.0);
    for rhs in [q.value(64, 3).unwrap(), r.value(64, -3).unwrap()] {
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} {rhs}");
    }
}

#[test]
fn first_step_of_first_passage() {
    let law = skewed();
    for x in [-4i64, 0, 3, 7] {
        let fp = first_passage(&law, KillingSet::finite(&[0]), x, 3, 64, 1.0).unwrap();
        assert!((fp.f[1] - law.pmf(-x)).abs() < 1e-15, "x={x}");
    }
}

#[test]
fn cumulative_first_passage_matches_survival() {
    let law = symmetric();
    for b in [KillingSet::finite(&[0]), KillingSet::finite(&[-1, 0, 2]), KillingSet::AtOrBelow(0)] {
        let fp = first_passage(&law, b.clone(), 4, 300, 400, 1.0).unwrap();
        let total = fp.cumulative[300];
        let expected = 1.0 - fp.ledger.alive - fp.ledger.escaped;
        assert!((total - expected).abs() < 1e-12, "{b:?}: {total} {expected}");
        assert!(fp.f.iter().all(|&v| v >= 0.0));
        assert!(total + fp.truncation_tail <= 1.0 + 1e-12);
    }
}

#[test]
fn larger_killing_set_dominates() {
    let law = one_sided();
    let w = 300;
    let point = killed_kernel(&law, KillingSet::finite(&[0]), 6, 80, w, &[10, 80], 1.0).unwrap();
    let half = killed_kernel(&law, KillingSet::AtOrBelow(0), 6, 80, w, &[10, 80], 1.0).unwrap();
    for n in [10, 80] {
        for y in 1..=w {
            assert!(half.value(n, y).unwrap() <= point.value(n, y).unwrap() + 1e-15);
        }
    }
}

#[test]
fn halfline_entrance_accounts_for_all_mass() {
    let law = skewed();
    let h = halfline_entrance(&law, 3, 200, 400, 50, 1.0).unwrap();
    for k in 0..=50i64 {
        assert!((h.rows[1][k as usize] - law.pmf(-k - 3)).abs() < 1e-15);
    }
    let entered: f64 = h.totals.iter().sum();
    let total = entered + h.survival + h.ledger.escaped;
    assert!((total - 1.0).abs() < 1e-12, "{total}");
}

#[test]
fn green_partial_sums_increase_to_the_potential_formula() {
    let law = symmetric();
    let table = PotentialTable::build(&law, 64).unwrap();
    let w = 1024;
    let prop = Propagator::new(&law, w).unwrap();
    for (x, y) in [(3i64, 5i64), (-2, 4), (1, -1)] {
        let mut walk = KilledWalk::new(&prop, KillingSet::finite(&[0]), x).unwrap();
        let mut partial = if x == y { 1.0 } else { 0.0 };
        let limit = table.green_origin(x, y);
        let mut early = 0.0;
        for n in 1..=2048 {
            walk.step();
            let next = partial + walk.value(y);
            assert!(next >= partial);
            partial = next;
            if n == 256 {
                early = partial;
            }
        }
        assert!(partial <= limit + 1e-10, "({x},{y}) {partial} {limit}");
        // the remaining sum decays like N^{1/alpha - 1}, i.e. halves over 8x
        let ratio = (limit - partial) / (limit - early);
        assert!((0.35..0.65).contains(&ratio), "({x},{y}) {early} {partial} {limit}: {ratio}");
    }
}

#[test]
fn hit_before_matches_killed_walk() {
    // P[visit y before 0] = P[first entrance into {0, y} is at y]
    let law = skewed();
    let table = PotentialTable::build(&law, 64).unwrap();
    let prop = Propagator::new(&law, 2048).unwrap();
    for (x, y) in [(3i64, 5i64), (-4, 2), (7, -3)] {
        let fp = first_passage_with(&prop, KillingSet::finite(&[0, y]), x, 6000).unwrap();
        let j = fp.entry_points.iter().position(|&z| z == y).unwrap();
        let at_y: f64 = fp.entry.iter().map(|row| row[j]).sum();
        let remaining = 1.0 - fp.cumulative[6000];
        let exact = table.hit_before(x, y).unwrap();
        assert!(at_y <= exact + 1e-9 && exact <= at_y + remaining + 1e-9, "({x},{y}) dp {at_y} +{remaining} exact {exact}");
    }
}

#[test]
fn finite_set_hitting_law_and_green_match_killed_walk() {
    let law = symmetric();
    let set = [-1i64, 0, 2];
    let table = PotentialTable::build(&law, 64).unwrap();
    let fsp = FiniteSetPotential::new(&table, &set).unwrap();
    let prop = Propagator::new(&law, 2048).unwrap();
    for x in [5i64, -3, 0] {
        let mut walk = KilledWalk::new(&prop, KillingSet::finite(&set), x).unwrap();
        let mut hits = [0.0; 3];
        let mut green = vec![0.0; 9];
        let mut green_early = vec![0.0; 9];
        if x.abs() <= 4 {
            green[(x + 4) as usize] += 1.0;
        }
        for n in 1..=6000 {
            walk.step();
            if n == 750 {
                green_early.clone_from(&green);
            }
            for (j, &z) in set.iter().enumerate() {
                hits[j] += walk.entered_at(z);
            }
            for y in -4..=4 {
                green[(y + 4) as usize] += walk.value(y);
            }
        }
        let remaining = walk.ledger().alive + walk.ledger().escaped;
        for (j, &z) in set.iter().enumerate() {
            let exact = fsp.hit_dist(&table, x, z);
            assert!(hits[j] <= exact + 1e-9 && exact <= hits[j] + remaining + 1e-9, "x={x} z={z}: {} {exact}", hits[j]);
        }
        for y in -4..=4i64 {
            if set.contains(&y) && y != x {
                continue;
            }
            let exact = fsp.green(&table, x, y);
            let dp = green[(y + 4) as usize];
            assert!(dp <= exact + 1e-9, "x={x} y={y}: {dp} {exact}");
            if exact - dp < 1e-9 {
                continue;
            }
            // the missing sum decays like N^{1/alpha - 1}, i.e. halves over 8x
            let ratio = (exact - dp) / (exact - green_early[(y + 4) as usize]);
            assert!((0.35..0.65).contains(&ratio), "x={x} y={y}: {dp} {exact} {ratio}");
        }
    }
}

#[test]
fn potential_as_limit_of_kernel_differences() {
    // a(x) + a(-x) = sum_n [2 p^n(0) - p^n(x) - p^n(-x)]; the tail is O(N^{1 - 3/alpha})
    let n_max = 3000;
    for law in [symmetric(), skewed()] {
        let table = PotentialTable::build(&law, 16).unwrap();
        let prop = Propagator::new(&law, 4096).unwrap();
        let mut walk = KilledWalk::new(&prop, KillingSet::Empty, 0).unwrap();
        let xs = [3i64, 5];
        // the n = 0 term is 2
        let mut partial = [2.0f64; 2];
        let mut history = Vec::new();
        for n in 1..=n_max {
            walk.step();
            for (k, &x) in xs.iter().enumerate() {
                partial[k] += 2.0 * walk.value(0) - walk.value(x) - walk.value(-x);
            }
            if n == n_max / 8 || n == n_max {
                history.push(partial);
            }
        }
        for (k, &x) in xs.iter().enumerate() {
            let exact = table.a(x) + table.a(-x);
            let early = exact - history[0][k];
            let late = exact - history[1][k];
            assert!(late > 0.0 && late < early, "x={x}");
            // the remainder falls like 1/N for these two laws
            let ratio = late / early;
            assert!((0.06..0.25).contains(&ratio), "x={x}: {} {exact} {ratio}", history[1][k]);
            assert!(late < 2e-3 * exact, "x={x}: {} {exact}", history[1][k]);
        }
    }
}

#[test]
fn dynamic_programme_matches_fourier_inversion() {
    for law in [symmetric(), one_sided()] {
        let xs = [0i64, 3, -3];
        let ns = [8usize, 32, 128];
        let grid = fourier_first_passage_grid(&law, &xs, &ns).unwrap();
        let w = default_half_width(law.alpha(), 128);
        let prop = Propagator::new(&law, w).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let fp = first_passage_with(&prop, KillingSet::finite(&[0]), x, 128).unwrap();
            for (j, &n) in ns.iter().enumerate() {
                let e = grid[i][j];
                assert!(e.abs_error <= 1e-5);
                assert!((e.value - fp.f[n]).abs() < 1e-4, "x={x} n={n}: {} {}", e.value, fp.f[n]);
            }
        }
        let single = fourier_first_passage(&law, 0, 1).unwrap();
        assert!((single.value - law.pmf(0)).abs() < 1e-6);
    }
}

#[test]
fn ladder_routes_agree() {
    for law in [symmetric(), one_sided()] {
        let wh = ladder_renewals(&law, 256).unwrap();
        let dp = ladder_renewals_dp(&law, 64, 1500, 1024, 0.1).unwrap();
        for j in 0..=64 {
            for (a, b) in [(wh.ascending_pmf[j], dp.ascending_pmf[j]), (wh.descending_pmf[j], dp.descending_pmf[j])] {
                assert!(b <= a + 1e-9, "j={j}: wh {a} dp {b}");
                assert!(a <= b + dp.truncation_tail, "j={j}: wh {a} dp {b}");
            }
        }
        assert!(wh.v_as[0] >= 1.0 && wh.u_ds[0] == 1.0);
        assert!(wh.v_as.windows(2).all(|p| p[1] >= p[0]));
        assert!(wh.u_ds.windows(2).all(|p| p[1] >= p[0]));
    }
}

#[test]
fn one_sided_ladder_renewals_grow_at_the_stable_rates() {
    let law = one_sided();
    let p = law.stable_params();
    let wh = ladder_renewals(&law, 1024).unwrap();
    let mean = wh.mean_descending;
    assert!(mean.is_finite());
    assert!((wh.mean_descending_partial() - mean).abs() < 1e-3 * mean);
    let mut last = [f64::INFINITY; 2];
    for k in 4..=10 {
        let x = 1usize << k;
        let xf = x as f64;
        let u_ratio = wh.u_ds[x] * mean / xf;
        let v_ratio = wh.v_as[x] * p.c0 * gamma(p.alpha) / (mean * xf.powf(p.alpha - 1.0));
        let dev = [(u_ratio - 1.0).abs(), (v_ratio - 1.0).abs()];
        if k >= 6 {
            assert!(dev[0] <= last[0] && dev[1] <= last[1], "x={x} {dev:?} {last:?}");
        }
        last = dev;
    }
    assert!(last[0] < 0.01 && last[1] < 0.02, "{last:?}");
}
