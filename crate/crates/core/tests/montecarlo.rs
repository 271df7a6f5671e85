use rand::Rng;
use stablewalk::asymptotics::tunneling_check;
use stablewalk::killed::{default_half_width, first_passage, KillingSet, DEFAULT_ESCAPE_BUDGET};
use stablewalk::montecarlo::*;
use stablewalk::{presets, Error, WalkLaw};

fn law(name: &str) -> WalkLaw {
    presets::build(name).unwrap()
}

fn exact_first_passage(law: &WalkLaw, x: i64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let w = default_half_width(law.alpha(), n);
    let fp = first_passage(law, KillingSet::Finite(vec![0]), x, n, w, DEFAULT_ESCAPE_BUDGET).unwrap();
    (fp.f, fp.cumulative)
}

#[test]
fn sampled_frequencies_match_the_pmf() {
    for name in ["skewed-1.6", "spectrally-positive-1.5"] {
        let law = law(name);
        let sampler = IncrementSampler::new(&law);
        let mut rng = stream_rng(11, 0);
        let draws = 1_000_000u64;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            *counts.entry(sampler.sample(&mut rng).clamp(-20, 20)).or_insert(0u64) += 1;
        }
        for k in -20..=20 {
            let p = match k {
                -20 => law.mass_below(-19),
                20 => law.mass_above(19),
                k => law.pmf(k),
            };
            let hat = *counts.get(&k).unwrap_or(&0) as f64 / draws as f64;
            let sd = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((hat - p).abs() <= 5.0 * sd + 1e-12, "{name} k={k}: {hat} vs {p}");
        }
    }
}

#[test]
fn mean_and_far_tail_of_ten_million_draws() {
    let law = law("symmetric-1.5");
    let sampler = IncrementSampler::new(&law);
    let mut rng = stream_rng(12, 0);
    let draws = 10_000_000u64;
    let (mut sum, mut sq, mut above) = (0.0f64, 0.0f64, 0u64);
    let x = 64;
    for _ in 0..draws {
        let k = sampler.sample(&mut rng);
        sum += k as f64;
        sq += (k as f64) * (k as f64);
        above += u64::from(k > x);
    }
    // self-normalised: finite-variance-free form of "within 4 sigma"
    assert!(sum.abs() <= 4.0 * sq.sqrt(), "mean statistic {}", sum / sq.sqrt());
    let scale = (x as f64).powf(law.alpha());
    let tail = EstimateCI::proportion(above, draws);
    let exact = law.mass_above(x);
    let sigma = tail.half_width_95 / 1.96;
    assert!((tail.point - exact).abs() <= 4.0 * sigma, "{} +- {sigma} vs {exact}", tail.point);
    let b = law.spec().b_scale * law.spec().q_plus;
    assert!((scale * exact / b - 1.0).abs() < 0.05);
}

#[test]
fn draws_beyond_the_alias_window_follow_the_zipf_tail() {
    let law = law("spectrally-positive-1.5");
    let sampler = IncrementSampler::new(&law);
    let mut rng = stream_rng(13, 0);
    let draws = 4_000_000u64;
    let (lo, hi) = (ALIAS_RADIUS, 4 * ALIAS_RADIUS);
    let (mut beyond, mut far) = (0u64, 0u64);
    for _ in 0..draws {
        let k = sampler.sample(&mut rng);
        beyond += u64::from(k >= lo);
        far += u64::from(k >= hi);
    }
    let cond = EstimateCI::proportion(far, beyond);
    let exact = law.mass_above(hi - 1) / law.mass_above(lo - 1);
    assert!((cond.point - exact).abs() <= 1.5 * cond.half_width_95, "{} vs {exact}", cond.point);
}

#[test]
fn fixed_seed_reproduces_the_draws() {
    let law = law("skewed-1.6");
    let sampler = IncrementSampler::new(&law);
    let run = |seed, stream| -> Vec<i64> {
        let mut rng = stream_rng(seed, stream);
        (0..1000).map(|_| sampler.sample(&mut rng)).collect()
    };
    assert_eq!(run(5, 1), run(5, 1));
    assert_ne!(run(5, 1), run(5, 2));
    assert_ne!(run(5, 1), run(6, 1));
}

#[test]
fn first_passage_estimates_cover_the_dynamic_programme() {
    let law = law("symmetric-1.5");
    let (f, cumulative) = exact_first_passage(&law, 3, 256);
    let cfg = SimConfig::new("symmetric-1.5", 200_000, 256, 21);
    let est = estimate_first_passage(&law, 3, &[32, 256], &cfg).unwrap();
    let at32 = &est.rows[0];
    assert!(at32.first_passage.covers(f[32]), "{:?} vs {}", at32.first_passage, f[32]);
    let at256 = &est.rows[1];
    assert!(at256.survival.covers(1.0 - cumulative[256]), "{:?} vs {}", at256.survival, 1.0 - cumulative[256]);
}

#[test]
fn estimates_do_not_depend_on_the_thread_count() {
    let law = law("skewed-1.6");
    let cfg = SimConfig::new("skewed-1.6", 20_000, 64, 3);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| estimate_first_passage(&law, 2, &[8, 64], &cfg).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&four).unwrap());
}

#[test]
fn conditional_escape_agrees_with_the_path_decomposition() {
    let law = law("bounded-potential-1.5");
    let (x, y, n) = (6, -6, 64);
    let dp = tunneling_check(&law, &[2, 4], n, x, y, 256).unwrap();
    let cfg = SimConfig::new("bounded-potential-1.5", 1_000_000, n, 31);
    let mut points = Vec::new();
    for (row, r) in dp.rows.iter().zip([2, 4]) {
        let est = estimate_conditional_escape(&law, x, y, n, r, &cfg).unwrap();
        assert!(est.trials_effective >= 1000, "{} conditioned paths", est.trials_effective);
        assert!(est.covers(row.probability), "R={r}: {est:?} vs {}", row.probability);
        points.push(est.point);
    }
    assert!(points[1] <= points[0]);
}

#[test]
fn rare_conditioning_is_reported() {
    let law = law("bounded-potential-1.5");
    let cfg = SimConfig::new("bounded-potential-1.5", 500, 64, 1);
    match estimate_conditional_escape(&law, 6, -6, 64, 4, &cfg) {
        Err(Error::ConditioningTooRare(_)) => {}
        other => panic!("expected ConditioningTooRare, got {other:?}"),
    }
}

#[test]
fn interval_coverage_is_calibrated() {
    let law = law("symmetric-1.5");
    let (f, _) = exact_first_passage(&law, 3, 8);
    let truth = f[8];
    let reps = 200u64;
    let covered = (0..reps)
        .filter(|&rep| {
            let mut cfg = SimConfig::new("symmetric-1.5", 4000, 8, 1000 + rep);
            cfg.stream_count = 4;
            let e = estimate_first_passage(&law, 3, &[8], &cfg).unwrap();
            e.rows[0].first_passage.covers(truth)
        })
        .count();
    let coverage = covered as f64 / reps as f64;
    assert!((0.90..=0.99).contains(&coverage), "coverage {coverage}");
}

#[test]
fn disjoint_streams_are_uncorrelated() {
    // permutation test on the correlation of estimates from paired streams
    let law = law("skewed-1.6");
    let sampler = IncrementSampler::new(&law);
    let pairs = 60u64;
    let estimate = |stream: u64| -> f64 {
        let mut rng = stream_rng(77, stream);
        let mut hits = 0u32;
        for _ in 0..2000 {
            let mut pos = 1i64;
            for _ in 0..16 {
                pos += sampler.sample(&mut rng);
                if pos == 0 {
                    hits += 1;
                    break;
                }
            }
        }
        hits as f64 / 2000.0
    };
    let left: Vec<f64> = (0..pairs).map(|i| estimate(2 * i)).collect();
    let right: Vec<f64> = (0..pairs).map(|i| estimate(2 * i + 1)).collect();
    let corr = |a: &[f64], b: &[f64]| -> f64 {
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    };
    let observed = corr(&left, &right).abs();
    let mut rng = stream_rng(78, 0);
    let mut shuffled = right.clone();
    let permutations = 999;
    let mut as_extreme = 0;
    for _ in 0..permutations {
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        if corr(&left, &shuffled).abs() >= observed {
            as_extreme += 1;
        }
    }
    let p_value = (as_extreme + 1) as f64 / (permutations + 1) as f64;
    assert!(p_value > 0.01, "p = {p_value}, correlation {observed}");
}
