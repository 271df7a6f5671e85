//! First-passage probabilities `f^x(n) = P[sigma^x_{0} = n]` by Fourier
//! inversion, independent of the dynamic programme.
//!
//! With `pi_x(tau) = (1/2pi) int e^{-i x theta} / (1 - e^{i tau} phi(theta)) d theta`
//! the generating function is `f^_x = -1(x=0)/pi_0 + pi_{-x}/pi_0` and
//! `f^x(n) = (2/pi) int_0^pi Re f^_x(tau) cos(n tau) d tau`.

use crate::error::{Error, Result};
use crate::law::{one_minus_expi, WalkLaw};
use crate::quad::{GaussLegendre, GL15, GL20};
use crate::stable::Estimate;
use num_complex::Complex64;
use std::f64::consts::PI;

const THETA_FLOOR_LEVELS: i32 = 55;
const THETA_BULK_WIDTH: f64 = 0.05;
const TAU_FLOOR: f64 = 1e-13;

/// Precomputed `1 - phi` on a fixed theta grid.
pub struct FourierOracle {
    /// `(theta, weight / 2 pi, 1 - phi(theta))`, theta > 0
    nodes: Vec<(f64, f64, Complex64)>,
    /// length of the piece `(0, eps)` left out of the grid
    eps: f64,
}

fn theta_nodes(law: &WalkLaw, rule: &GaussLegendre, bulk_width: f64) -> (Vec<(f64, f64, Complex64)>, f64) {
    let mut panels = Vec::new();
    let start = bulk_width;
    for k in (0..THETA_FLOOR_LEVELS).rev() {
        let hi = start * 0.5f64.powi(k);
        panels.push((0.5 * hi, hi));
    }
    let count = ((PI - start) / bulk_width).ceil() as usize;
    let width = (PI - start) / count as f64;
    for i in 0..count {
        let lo = start + i as f64 * width;
        panels.push((lo, lo + width));
    }
    let eps = panels[0].0;
    let mut nodes = Vec::new();
    for (lo, hi) in panels {
        for (t, w) in rule.mapped(lo, hi) {
            nodes.push((t, w / (2.0 * PI), law.one_minus_char(t)));
        }
    }
    (nodes, eps)
}

impl FourierOracle {
    pub fn new(law: &WalkLaw) -> Self {
        let (nodes, eps) = theta_nodes(law, &GL15, THETA_BULK_WIDTH);
        FourierOracle { nodes, eps }
    }

    /// A second oracle on a finer grid, used to estimate the inner error.
    pub fn refined(law: &WalkLaw) -> Self {
        let (nodes, eps) = theta_nodes(law, &GL20, 0.5 * THETA_BULK_WIDTH);
        FourierOracle { nodes, eps }
    }

    /// `pi_x(tau)` for a list of `x`, sharing the denominators.
    pub fn pi_values(&self, tau: f64, xs: &[i64]) -> Vec<Complex64> {
        self.pi_values_rotated(tau, &self.rotations(xs), xs.len())
    }

    /// `e^{-i x theta}` for every node and every `x`, node-major.
    fn rotations(&self, xs: &[i64]) -> Vec<Complex64> {
        let mut rot = Vec::with_capacity(self.nodes.len() * xs.len());
        for &(t, _, _) in &self.nodes {
            rot.extend(xs.iter().map(|&x| Complex64::from_polar(1.0, -(x as f64) * t)));
        }
        rot
    }

    fn pi_values_rotated(&self, tau: f64, rot: &[Complex64], count: usize) -> Vec<Complex64> {
        let e = Complex64::from_polar(1.0, tau);
        // 1 - e^{i tau} phi = (1 - e^{i tau}) + e^{i tau} (1 - phi)
        let base = one_minus_expi(tau);
        let mut out = vec![Complex64::new(0.0, 0.0); count];
        for (k, &(_, w, d)) in self.nodes.iter().enumerate() {
            let inv_pos = (base + e * d).inv() * w;
            let inv_neg = (base + e * d.conj()).inv() * w;
            for (o, r) in out.iter_mut().zip(&rot[k * count..(k + 1) * count]) {
                *o += r * inv_pos + r.conj() * inv_neg;
            }
        }
        // (0, eps) on both sides: the integrand is 1/(1 - e^{i tau}) there
        let tiny = base.inv() * (2.0 * self.eps / (2.0 * PI));
        for o in out.iter_mut() {
            *o += tiny;
        }
        out
    }

    /// `Re f^_x(tau)`.
    pub fn generating_re(&self, tau: f64, x: i64) -> f64 {
        let v = self.pi_values(tau, &[0, -x]);
        let mut g = v[1] / v[0];
        if x == 0 {
            g -= v[0].inv();
        }
        g.re
    }

    /// `f^x(n)` by the cosine inversion, using the given rule on every panel.
    fn invert(&self, x: i64, n: usize, rule: &GaussLegendre) -> f64 {
        let nf = n.max(1) as f64;
        let h = (PI / nf).min(0.25);
        let mut panels = Vec::new();
        let mut lo = h;
        while lo > TAU_FLOOR {
            panels.push((0.5 * lo, lo));
            lo *= 0.5;
        }
        let count = ((PI - h) / h).ceil() as usize;
        let width = (PI - h) / count as f64;
        for i in 0..count {
            let a = h + i as f64 * width;
            panels.push((a, a + width));
        }
        let mut total = 0.0;
        for (a, b) in panels {
            for (t, w) in rule.mapped(a, b) {
                total += w * self.generating_re(t, x) * (nf * t).cos();
            }
        }
        // (0, floor): the generating function is close to its value at 0, i.e. 1
        total += TAU_FLOOR;
        2.0 / PI * total
    }
}

/// `f^x(n)` with an error estimate from a second, finer evaluation.
pub fn fourier_first_passage(law: &WalkLaw, x: i64, n: usize) -> Result<Estimate> {
    if n == 0 {
        return Ok(Estimate::exact(0.0));
    }
    if x.abs() > 64 || n > 4096 {
        return Err(Error::OutOfRegime(format!(
            "Fourier oracle limited to |x| <= 64, n <= 4096 (got x={x}, n={n})"
        )));
    }
    let coarse = FourierOracle::new(law);
    let fine = FourierOracle::refined(law);
    let v1 = coarse.invert(x, n, &GL15);
    let v2 = fine.invert(x, n, &GL20);
    let err = (v1 - v2).abs();
    if err > 1e-5 {
        return Err(Error::QuadratureNonConvergence(format!(
            "Fourier first passage x={x} n={n}: evaluations differ by {err:.3e}"
        )));
    }
    Ok(Estimate {
        value: v2,
        abs_error: err,
    })
}

impl FourierOracle {
    /// `f^x(n)` on this oracle's grid (no error estimate).
    pub fn first_passage(&self, x: i64, n: usize) -> f64 {
        self.invert(x, n, &GL15)
    }

    /// `f^x(n)` for every pair in `xs` x `ns`, sharing one tau grid fine
    /// enough for the largest `n`. Result indexed `[i_x][i_n]`.
    fn grid(&self, xs: &[i64], ns: &[usize], rule: &GaussLegendre) -> Vec<Vec<f64>> {
        let n_top = ns.iter().copied().max().unwrap_or(1).max(1) as f64;
        let h = (PI / n_top).min(0.25);
        let mut panels = Vec::new();
        let mut lo = h;
        while lo > TAU_FLOOR {
            panels.push((0.5 * lo, lo));
            lo *= 0.5;
        }
        let count = ((PI - h) / h).ceil() as usize;
        let width = (PI - h) / count as f64;
        for i in 0..count {
            let a = h + i as f64 * width;
            panels.push((a, a + width));
        }
        let mut query = vec![0i64];
        query.extend(xs.iter().map(|x| -x));
        let rot = self.rotations(&query);
        let mut out = vec![vec![TAU_FLOOR; ns.len()]; xs.len()];
        for (a, b) in panels {
            for (t, w) in rule.mapped(a, b) {
                let v = self.pi_values_rotated(t, &rot, query.len());
                let inv0 = v[0].inv();
                for (i, &x) in xs.iter().enumerate() {
                    let mut g = v[i + 1] * inv0;
                    if x == 0 {
                        g -= inv0;
                    }
                    for (j, &n) in ns.iter().enumerate() {
                        out[i][j] += w * g.re * (n as f64 * t).cos();
                    }
                }
            }
        }
        for row in out.iter_mut() {
            for v in row.iter_mut() {
                *v *= 2.0 / PI;
            }
        }
        out
    }
}

/// `f^x(n)` over a grid of starts and times, each with an error estimate
/// from the finer evaluation. Result indexed `[i_x][i_n]`.
pub fn fourier_first_passage_grid(law: &WalkLaw, xs: &[i64], ns: &[usize]) -> Result<Vec<Vec<Estimate>>> {
    if let Some(&x) = xs.iter().find(|x| x.abs() > 64) {
        return Err(Error::OutOfRegime(format!("Fourier oracle limited to |x| <= 64, got {x}")));
    }
    if ns.iter().any(|&n| n == 0 || n > 4096) {
        return Err(Error::OutOfRegime("Fourier oracle needs 1 <= n <= 4096".into()));
    }
    let coarse = FourierOracle::new(law).grid(xs, ns, &GL15);
    let fine = FourierOracle::refined(law).grid(xs, ns, &GL20);
    let mut out = Vec::with_capacity(xs.len());
    for (i, &x) in xs.iter().enumerate() {
        let mut row = Vec::with_capacity(ns.len());
        for (j, &n) in ns.iter().enumerate() {
            let err = (coarse[i][j] - fine[i][j]).abs();
            if err > 1e-5 {
                return Err(Error::QuadratureNonConvergence(format!(
                    "Fourier first passage x={x} n={n}: evaluations differ by {err:.3e}"
                )));
            }
            row.push(Estimate {
                value: fine[i][j],
                abs_error: err,
            });
        }
        out.push(row);
    }
    Ok(out)
}
