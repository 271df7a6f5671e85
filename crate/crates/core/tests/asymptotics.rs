use proptest::prelude::*;
use stablewalk::asymptotics::*;
use stablewalk::law::{Family, TailSpec};
use stablewalk::{presets, Error, WalkLaw};
use std::sync::OnceLock;

fn fixture(name: &str) -> &'static (WalkLaw, Asymptotics) {
    static SYM: OnceLock<(WalkLaw, Asymptotics)> = OnceLock::new();
    static SP: OnceLock<(WalkLaw, Asymptotics)> = OnceLock::new();
    let cell = match name {
        "symmetric-1.5" => &SYM,
        "spectrally-positive-1.5" => &SP,
        _ => unreachable!(),
    };
    cell.get_or_init(|| {
        let law = presets::build(name).unwrap();
        // the two-term branch reads a(x) out to x_n = M at the largest horizon
        let asy = Asymptotics::new(&law, 1100).unwrap();
        (law, asy)
    })
}

fn quick() -> ReportOptions {
    ReportOptions {
        quick: true,
        ..ReportOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn every_start_inside_the_bound_has_a_passage_form(
        sp in any::<bool>(),
        log_n in 4u32..13,
        frac in -0.999f64..0.999,
    ) {
        let (_, asy) = fixture(if sp { "spectrally-positive-1.5" } else { "symmetric-1.5" });
        let n = 1usize << log_n;
        let x = (frac * asy.bound * asy.scale(n)).trunc() as i64;
        let regime = asy.passage_regime(x, n).unwrap();
        let v = asy.rhs_theorem2_3(x, n, regime, FirstReturn::Asymptote).unwrap();
        prop_assert!(v.is_finite() && v >= 0.0, "x={x} n={n} {regime:?}: {v}");
        if regime != PassageRegime::SmallStart {
            prop_assert!(asy.rhs_theorem2_3(x, n, PassageRegime::SmallStart, FirstReturn::Asymptote).is_err());
        }
    }

    #[test]
    fn every_pair_inside_the_bound_has_a_kernel_form(
        log_n in 4u32..13,
        fx in -0.99f64..0.99,
        fy in -0.99f64..0.99,
    ) {
        let (_, asy) = fixture("symmetric-1.5");
        let n = 1usize << log_n;
        let s = asy.scale(n);
        let (x, y) = ((fx * asy.bound * s).trunc() as i64, (fy * asy.bound * s).trunc() as i64);
        let fp = |z: i64| 1.0 / (1.0 + z.abs() as f64);
        let bulk = |_: f64, _: f64| 0.5;
        let terms = KernelTerms { first_passage: &fp, entrance: None, bulk: Some(&bulk) };
        let regime = asy.kernel_regime(x, y, n).unwrap();
        let v = asy.rhs_theorem4_5(x, y, n, regime, &terms).unwrap();
        prop_assert!(v.is_finite() && v >= 0.0, "x={x} y={y} n={n} {regime:?}: {v}");
    }

    #[test]
    fn points_beyond_the_bound_are_refused(log_n in 4u32..13, over in 1.01f64..3.0, sign in any::<bool>()) {
        let (_, asy) = fixture("symmetric-1.5");
        let n = 1usize << log_n;
        let x = (over * asy.bound * asy.scale(n)).ceil() as i64 * if sign { 1 } else { -1 };
        prop_assert!(matches!(asy.passage_regime(x, n), Err(Error::OutOfRegime(_))));
        prop_assert!(matches!(asy.kernel_regime(1, x, n), Err(Error::OutOfRegime(_))));
    }

    #[test]
    fn decreasing_deviations_below_the_cap_pass(
        start in 0.01f64..1.0,
        shrink in prop::collection::vec(0.05f64..1.0, 2..6),
        above in any::<bool>(),
    ) {
        let mut devs = vec![start];
        for f in &shrink {
            devs.push(devs.last().unwrap() * f);
        }
        let ratios: Vec<f64> = devs.iter().map(|d| if above { 1.0 + d } else { 1.0 - d }).collect();
        let cap = devs.last().unwrap() * 1.01;
        prop_assert!(trend(&ratios, cap).passed);
        prop_assert!(!trend(&ratios, devs.last().unwrap() * 0.99).passed);
    }

    #[test]
    fn growth_over_the_last_three_points_fails(base in 0.001f64..0.05, step in 1.001f64..2.0, lead in 0usize..3) {
        let mut ratios = vec![1.5; lead];
        ratios.extend([1.0 + base, 1.0 - base * step]);
        ratios.push(1.0 - base * step * 0.5);
        let t = trend(&ratios, 1.0);
        prop_assert!(!t.non_increasing && !t.passed);
    }

    #[test]
    fn a_non_finite_ratio_fails(pos in 0usize..4) {
        let mut ratios = vec![1.1, 1.05, 1.02, 1.01];
        ratios[pos] = f64::NAN;
        prop_assert!(!trend(&ratios, 0.5).passed);
    }
}

#[test]
fn every_report_runs_on_the_quick_grid() {
    for id in report_ids() {
        let r = report(id, &quick()).unwrap_or_else(|e| panic!("{id}: {e}"));
        assert_eq!(r.theorem_id, *id);
        assert!(!r.series.is_empty() || !r.checks.is_empty(), "{id} is empty");
        for s in &r.series {
            for row in &s.rows {
                assert!(row.exact.is_finite() && row.rhs.is_finite(), "{id} {}: {row:?}", s.label);
            }
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let opts = quick();
    for id in ["thm1", "thm2", "prop22"] {
        let a = serde_json::to_string(&report(id, &opts).unwrap()).unwrap();
        let b = serde_json::to_string(&report(id, &opts).unwrap()).unwrap();
        assert_eq!(a, b, "{id}");
    }
}

#[test]
fn unknown_report_is_a_configuration_error() {
    let e = report("thm9", &quick()).unwrap_err();
    assert!(e.is_config(), "{e}");
}

#[test]
fn split_report_needs_a_finite_c_plus() {
    let opts = ReportOptions {
        law: Some(("two-sided-1.5".into(), presets::by_name("two-sided-1.5").unwrap())),
        ..quick()
    };
    assert!(matches!(report("thm6", &opts), Err(Error::InfiniteCPlus(_))));
}

#[test]
fn two_term_form_reduces_to_the_small_start_form() {
    // at a fixed start the jump term is smaller by a factor of order n^{1 - 2/alpha}
    let (_, asy) = fixture("spectrally-positive-1.5");
    let x = 2;
    let scaled: Vec<f64> = [256usize, 4096, 65536]
        .iter()
        .map(|&n| {
            let two = asy.rhs_theorem2_3(x, n, PassageRegime::TwoTerm, FirstReturn::Asymptote).unwrap();
            let small = asy.potential.a_dagger(x) * rhs_theorem1(n, &asy.params);
            (two / small - 1.0) * (n as f64).powf(2.0 / asy.alpha() - 1.0)
        })
        .collect();
    for w in scaled.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() < 0.1, "{scaled:?}");
    }
}

#[test]
fn single_point_set_reproduces_the_first_passage_forms() {
    let (_, asy) = fixture("symmetric-1.5");
    let single = FiniteSetForms::new(asy, &[0]).unwrap();
    for n in [256, 1024] {
        for x in [-5i64, -1, 0, 2, 7] {
            let a = asy.rhs_finite_first_passage(&single, x, n, FirstReturn::Asymptote).unwrap();
            let b = asy.rhs_theorem2_3(x, n, PassageRegime::SmallStart, FirstReturn::Asymptote).unwrap();
            assert!((a / b - 1.0).abs() < 1e-12, "x={x} n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn entrance_density_does_not_depend_on_the_start() {
    let (law, _) = fixture("spectrally-positive-1.5");
    for est in entrance_density_estimates(law, &[0.5, 1.0], 4096, &[1, 2, 4]).unwrap() {
        assert!(est.discrepancy / est.value < 0.02, "{est:?}");
    }
}

#[test]
fn coarse_heights_are_refused() {
    let (law, _) = fixture("spectrally-positive-1.5");
    assert!(matches!(
        entrance_density_estimates(law, &[0.01], 64, &ENTRANCE_STARTS),
        Err(Error::ResolutionTooCoarse(_))
    ));
    assert!(matches!(
        stable_killed_density(law, 0.01, 1.0, 256),
        Err(Error::ResolutionTooCoarse(_))
    ));
}

#[test]
fn crossing_zero_without_touching_it_needs_downward_jumps() {
    // a left-continuous walk steps down by at most one, so it cannot pass 0 unseen
    let law = WalkLaw::build(&TailSpec::new(1.5, Family::LeftContinuous, 0.15)).unwrap();
    assert!(matches!(
        tunneling_check(&law, &[2], 32, 3, -3, 128),
        Err(Error::ConditioningMassZero(_))
    ));
}

#[test]
fn tunneling_decomposition_rebuilds_the_kernel() {
    let law = presets::build("bounded-potential-1.5").unwrap();
    let t = tunneling_check(&law, &[1, 4, 16], 128, 8, -8, 256).unwrap();
    assert!((t.decomposition / t.kernel - 1.0).abs() < 1e-10);
    let p: Vec<f64> = t.rows.iter().map(|r| r.probability).collect();
    assert!(p.windows(2).all(|w| w[1] <= w[0]) && p.iter().all(|v| (0.0..=1.0).contains(v)), "{p:?}");
}
