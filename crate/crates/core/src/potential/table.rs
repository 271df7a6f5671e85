//! The potential kernel `a(x) = sum_n [p^n(0) - p^n(-x)]` evaluated through
//! `a(x) = (1/pi) int_0^pi Re[(1 - e^{i x theta}) / (1 - phi(theta))] d theta`.

use crate::error::{Error, Result};
use crate::law::WalkLaw;
use crate::quad::{GaussLegendre, GL15, GL20};
use crate::special::sin_pi;
use crate::stable::Estimate;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Number of halvings below the first panel; the rest of `(0, eps)` is
/// integrated from the leading behaviour of `1 - phi`.
const GEOMETRIC_LEVELS: i32 = 160;
/// Nodes with `theta * x_max` below this are folded into Taylor moments.
const TINY: f64 = 1e-3;
const MOMENTS: usize = 5;
const RESEED: i64 = 64;

/// Quadrature nodes in `theta` carrying `w / (pi (1 - phi))`, where `w` is
/// the quadrature weight.
struct ThetaNodes {
    tiny_cos: [f64; MOMENTS],
    tiny_sin: [f64; MOMENTS],
    small: Vec<(f64, Complex64)>,
    bulk: Vec<(f64, Complex64)>,
    /// coefficient of `x` in the analytic piece
    origin_slope: f64,
}

fn panel_width(x_max: i64) -> f64 {
    (2.0 * PI / x_max.max(1) as f64).min(0.25)
}

impl ThetaNodes {
    fn new(law: &WalkLaw, x_max: i64, rule: &GaussLegendre, refine: bool) -> Self {
        let mut h0 = panel_width(x_max);
        if refine {
            h0 *= 0.5;
        }
        let inv_pi = 1.0 / PI;
        let weight_of = |theta: f64, w: f64| -> Complex64 { (law.one_minus_char(theta)).inv() * (w * inv_pi) };
        let tiny_edge = TINY / x_max.max(1) as f64;
        let mut tiny_cos = [0.0; MOMENTS];
        let mut tiny_sin = [0.0; MOMENTS];
        let mut small = Vec::new();
        // geometric panels below h0, smallest first
        let mut geometric: Vec<(f64, f64)> = Vec::new();
        for k in (0..GEOMETRIC_LEVELS).rev() {
            let hi = h0 * 0.5f64.powi(k);
            geometric.push((0.5 * hi, hi));
        }
        for &(lo, hi) in &geometric {
            for (t, w) in rule.mapped(lo, hi) {
                let z = weight_of(t, w);
                if t < tiny_edge {
                    // sum over moments of theta: 1-cos(x t) and sin(x t) by Taylor
                    let mut tp = t;
                    for m in 0..MOMENTS {
                        tiny_sin[m] += z.im * tp;
                        tp *= t;
                        tiny_cos[m] += z.re * tp;
                        tp *= t;
                    }
                } else {
                    small.push((t, z));
                }
            }
        }
        let count = ((PI - h0) / h0).ceil() as usize;
        let width = (PI - h0) / count as f64;
        let bulk: Vec<(f64, Complex64)> = (0..count)
            .into_par_iter()
            .flat_map_iter(|i| {
                let lo = h0 + i as f64 * width;
                rule.mapped(lo, lo + width)
                    .map(|(t, w)| (t, weight_of(t, w)))
                    .collect::<Vec<_>>()
            })
            .collect();
        let p = law.stable_params();
        let eps = h0 * 0.5f64.powi(GEOMETRIC_LEVELS);
        let origin_slope =
            -sin_pi(0.5 * p.gamma) * eps.powf(2.0 - p.alpha) / ((2.0 - p.alpha) * p.c0) / PI;
        ThetaNodes {
            tiny_cos,
            tiny_sin,
            small,
            bulk,
            origin_slope,
        }
    }

    /// Even part `C(x)` and odd part `S(x)` of `a`, so `a(+-x) = C(x) +- S(x)`,
    /// evaluated directly at one `x > 0`.
    fn parts_at(&self, x: i64) -> (f64, f64) {
        let xf = x as f64;
        let (mut c, mut s) = self.tiny_parts(xf);
        for &(t, z) in self.small.iter().chain(self.bulk.iter()) {
            let h = (0.5 * xf * t).sin();
            c += z.re * 2.0 * h * h;
            s += z.im * (xf * t).sin();
        }
        (c, s)
    }

    fn tiny_parts(&self, xf: f64) -> (f64, f64) {
        // 1 - cos y = y^2/2 - y^4/24 + ..., sin y = y - y^3/6 + ...
        let mut c = 0.0;
        let mut s = 0.0;
        let mut xp = xf;
        let mut fact = 1.0;
        for m in 0..MOMENTS {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * self.tiny_sin[m] * xp / fact;
            xp *= xf;
            fact *= (2 * m + 2) as f64;
            c += sign * self.tiny_cos[m] * xp / fact;
            xp *= xf;
            fact *= (2 * m + 3) as f64;
        }
        s += self.origin_slope * xf;
        (c, s)
    }

    /// Even and odd parts for every `x` in `1..=x_max`.
    fn parts_table(&self, x_max: i64) -> (Vec<f64>, Vec<f64>) {
        let n = x_max as usize;
        let mut c = vec![0.0; n + 1];
        let mut s = vec![0.0; n + 1];
        for x in 1..=x_max {
            let (tc, ts) = self.tiny_parts(x as f64);
            c[x as usize] = tc;
            s[x as usize] = ts;
        }
        for &(t, z) in &self.small {
            for x in 1..=x_max {
                let xf = x as f64;
                let h = (0.5 * xf * t).sin();
                c[x as usize] += z.re * 2.0 * h * h;
                s[x as usize] += z.im * (xf * t).sin();
            }
        }
        // bulk nodes: rotate e^{i x t} and reseed periodically
        let chunk = 256;
        let partial: Vec<(Vec<f64>, Vec<f64>)> = self
            .bulk
            .par_chunks(chunk)
            .map(|nodes| {
                let mut cc = vec![0.0; n + 1];
                let mut ss = vec![0.0; n + 1];
                for &(t, z) in nodes {
                    let step = Complex64::from_polar(1.0, t);
                    let mut e = Complex64::new(1.0, 0.0);
                    for x in 1..=x_max {
                        if x % RESEED == 0 {
                            e = Complex64::from_polar(1.0, x as f64 * t);
                        } else {
                            e *= step;
                        }
                        cc[x as usize] += z.re * (1.0 - e.re);
                        ss[x as usize] += z.im * e.im;
                    }
                }
                (cc, ss)
            })
            .collect();
        for (cc, ss) in partial {
            for i in 0..=n {
                c[i] += cc[i];
                s[i] += ss[i];
            }
        }
        (c, s)
    }
}

/// `a(x)` at a single point, with an error estimate from a second, finer
/// node set.
pub fn potential_a(law: &WalkLaw, x: i64) -> Result<Estimate> {
    if x == 0 {
        return Ok(Estimate::exact(0.0));
    }
    let m = x.abs();
    let coarse = ThetaNodes::new(law, m, &GL15, false);
    let fine = ThetaNodes::new(law, m, &GL20, true);
    let sign = x.signum() as f64;
    let (c1, s1) = coarse.parts_at(m);
    let (c2, s2) = fine.parts_at(m);
    let v1 = c1 + sign * s1;
    let v2 = c2 + sign * s2;
    let err = (v1 - v2).abs() + 1e-15 * v2.abs();
    if err > 1e-8 * (1.0 + v2.abs()) {
        return Err(Error::QuadratureNonConvergence(format!(
            "a({x}): grids disagree by {err:.3e}"
        )));
    }
    Ok(Estimate {
        value: v2,
        abs_error: err,
    })
}

/// `a(x)` for all `|x| <= x_max`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PotentialTable {
    x_max: i64,
    /// `a(x)` at index `x + x_max`
    values: Vec<f64>,
    /// largest discrepancy against the refined nodes at the check points
    pub abs_error: f64,
}

impl PotentialTable {
    pub fn build(law: &WalkLaw, x_max: i64) -> Result<Self> {
        if x_max < 1 {
            return Err(Error::Config(format!("x_max={x_max} must be positive")));
        }
        let nodes = ThetaNodes::new(law, x_max, &GL15, false);
        let (c, s) = nodes.parts_table(x_max);
        let mut values = vec![0.0; (2 * x_max + 1) as usize];
        for x in 1..=x_max {
            values[(x_max + x) as usize] = c[x as usize] + s[x as usize];
            values[(x_max - x) as usize] = c[x as usize] - s[x as usize];
        }
        let mut table = PotentialTable {
            x_max,
            values,
            abs_error: 0.0,
        };
        // compare with a finer node set at a handful of points
        let fine = ThetaNodes::new(law, x_max, &GL20, true);
        let mut checks = vec![1i64, 2, 3, x_max];
        let mut k = 8;
        while k < x_max {
            checks.push(k);
            k *= 4;
        }
        let mut worst: f64 = 0.0;
        for &x in &checks {
            let (cf, sf) = fine.parts_at(x);
            worst = worst.max((table.a(x) - (cf + sf)).abs());
            worst = worst.max((table.a(-x) - (cf - sf)).abs());
        }
        table.abs_error = worst + 1e-15 * table.a(x_max).abs().max(table.a(-x_max).abs());
        let scale = 1.0 + table.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if table.abs_error > 1e-8 * scale {
            return Err(Error::QuadratureNonConvergence(format!(
                "potential table error {:.3e}",
                table.abs_error
            )));
        }
        Ok(table)
    }

    pub fn x_max(&self) -> i64 {
        self.x_max
    }

    pub fn contains(&self, x: i64) -> bool {
        x.abs() <= self.x_max
    }

    /// `a(x)`; panics outside the table.
    pub fn a(&self, x: i64) -> f64 {
        assert!(self.contains(x), "a({x}) outside table of radius {}", self.x_max);
        self.values[(x + self.x_max) as usize]
    }

    pub fn try_a(&self, x: i64) -> Result<f64> {
        if self.contains(x) {
            Ok(self.a(x))
        } else {
            Err(Error::WindowTooSmall(format!(
                "a({x}) requested from a table of radius {}",
                self.x_max
            )))
        }
    }

    /// `a^dagger(x) = a(x) + 1(x = 0)`.
    pub fn a_dagger(&self, x: i64) -> f64 {
        self.a(x) + if x == 0 { 1.0 } else { 0.0 }
    }

    /// `g_{0}(x,y) = a^dagger(x) + a(-y) - a(x-y)`.
    pub fn green_origin(&self, x: i64, y: i64) -> f64 {
        self.a_dagger(x) + self.a(-y) - self.a(x - y)
    }

    /// `P[walk from x visits y before 0]`.
    pub fn hit_before(&self, x: i64, y: i64) -> Result<f64> {
        if y == 0 {
            return Err(Error::OutOfRegime("hit_before needs y != 0".into()));
        }
        let den = self.a(y) + self.a(-y);
        if den <= 1e-12 {
            return Err(Error::SingularSystem(format!(
                "a({y}) + a({}) vanishes",
                -y
            )));
        }
        Ok(self.green_origin(x, y) / den)
    }

    /// Rows `(x, a(x))` for `|x| <= x_max`.
    pub fn rows(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        (-self.x_max..=self.x_max).map(move |x| (x, self.a(x)))
    }
}

/// Outcome of extrapolating `C+ = lim_{x -> +inf} a(x)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
pub enum CPlus {
    Finite { value: f64, abs_error: f64 },
    Infinite,
}

/// Extrapolated `C+`. Infinite unless the negative tail is light enough
/// (`sum_t P[X < -t] t^{2 alpha - 2} < inf`); zero for left-continuous laws.
pub fn c_plus(law: &WalkLaw) -> Result<CPlus> {
    use crate::law::Family;
    match law.family() {
        Family::LeftContinuous => return Ok(CPlus::Finite { value: 0.0, abs_error: 0.0 }),
        Family::TwoSidedPareto => return Ok(CPlus::Infinite),
        _ => {}
    }
    let levels: Vec<i64> = (2..=13).map(|k| 1i64 << k).collect();
    let values: Vec<f64> = levels
        .par_iter()
        .map(|&x| potential_a(law, x).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    let aitken = |i: usize| -> Option<f64> {
        let (a0, a1, a2) = (values[i], values[i + 1], values[i + 2]);
        let d1 = a1 - a0;
        let d2 = a2 - a1;
        let den = d2 - d1;
        if den.abs() < 1e-300 {
            None
        } else {
            Some(a2 - d2 * d2 / den)
        }
    };
    let n = values.len();
    let deep = aitken(n - 3);
    let shallow = aitken(n - 4);
    match (deep, shallow) {
        (Some(d), Some(s)) if (d - s).abs() <= 0.01 * d.abs() => Ok(CPlus::Finite {
            value: d,
            abs_error: (d - s).abs(),
        }),
        _ => Err(Error::ExtrapolationUnstable(format!(
            "C+ estimates {deep:?} and {shallow:?} disagree"
        ))),
    }
}
