//! Piecewise Chebyshev interpolant of `p_1` and `p_1'` on the central range,
//! falling back to the asymptotic series outside it. Built once per law, it
//! makes repeated evaluations (hitting densities, scans over `x`) cheap.

use super::density::{stable_density, stable_density_derivative, Estimate, SERIES_THRESHOLD};
use super::StableParams;
use crate::error::{Error, Result};
use rayon::prelude::*;

const DEGREE: usize = 24;
const PANEL_WIDTH: f64 = 0.5;

#[derive(Clone, Debug)]
struct Panel {
    density: Vec<f64>,
    derivative: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct StableTable {
    params: StableParams,
    panels: Vec<Panel>,
    /// largest interpolation residual seen at the check points
    pub interpolation_error: f64,
}

fn chebyshev_nodes() -> Vec<f64> {
    (0..DEGREE)
        .map(|j| (std::f64::consts::PI * (j as f64 + 0.5) / DEGREE as f64).cos())
        .collect()
}

fn coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|k| {
            let s: f64 = values
                .iter()
                .enumerate()
                .map(|(j, v)| v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                .sum();
            if k == 0 {
                s / n as f64
            } else {
                2.0 * s / n as f64
            }
        })
        .collect()
}

fn clenshaw(c: &[f64], s: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * s * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    s * b1 - b2 + c[0]
}

impl StableTable {
    pub fn build(p: &StableParams) -> Result<Self> {
        let unit = p.with_c0(1.0);
        let count = (2.0 * SERIES_THRESHOLD / PANEL_WIDTH).round() as usize;
        let nodes = chebyshev_nodes();
        let panels: Result<Vec<Panel>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let lo = -SERIES_THRESHOLD + i as f64 * PANEL_WIDTH;
                let mid = lo + 0.5 * PANEL_WIDTH;
                let mut dens = Vec::with_capacity(DEGREE);
                let mut der = Vec::with_capacity(DEGREE);
                for &s in &nodes {
                    let x = mid + 0.5 * PANEL_WIDTH * s;
                    dens.push(stable_density(&unit, 1.0, x)?.value);
                    der.push(stable_density_derivative(&unit, 1.0, x)?.value);
                }
                Ok(Panel {
                    density: coefficients(&dens),
                    derivative: coefficients(&der),
                })
            })
            .collect();
        let mut table = StableTable {
            params: unit,
            panels: panels?,
            interpolation_error: 0.0,
        };
        // spot-check midway between nodes in a few panels
        let mut worst: f64 = 0.0;
        for &x in &[-31.3, -7.77, -1.01, -0.13, 0.0, 0.37, 2.9, 13.13, 38.8] {
            let d = stable_density(&unit, 1.0, x)?.value;
            worst = worst.max((table.unit_density(x) - d).abs());
        }
        table.interpolation_error = worst;
        if worst > 1e-10 {
            return Err(Error::QuadratureNonConvergence(format!(
                "density table residual {worst:.3e}"
            )));
        }
        Ok(table)
    }

    pub fn params(&self) -> &StableParams {
        &self.params
    }

    fn locate(&self, x: f64) -> Option<(&Panel, f64)> {
        if x.abs() >= SERIES_THRESHOLD {
            return None;
        }
        let pos = (x + SERIES_THRESHOLD) / PANEL_WIDTH;
        let i = (pos.floor() as usize).min(self.panels.len() - 1);
        let s = 2.0 * (pos - i as f64) - 1.0;
        Some((&self.panels[i], s))
    }

    /// `p_1(x)`.
    pub fn unit_density(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some((panel, s)) => clenshaw(&panel.density, s),
            None => stable_density(&self.params, 1.0, x).map(|e| e.value).unwrap_or(0.0),
        }
    }

    /// `p_1'(x)`.
    pub fn unit_derivative(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some((panel, s)) => clenshaw(&panel.derivative, s),
            None => stable_density_derivative(&self.params, 1.0, x)
                .map(|e| e.value)
                .unwrap_or(0.0),
        }
    }

    /// `p_t(x) = t^{-1/alpha} p_1(x t^{-1/alpha})`.
    pub fn density(&self, t: f64, x: f64) -> f64 {
        let s = t.powf(-1.0 / self.params.alpha);
        s * self.unit_density(x * s)
    }

    pub fn derivative(&self, t: f64, x: f64) -> f64 {
        let s = t.powf(-1.0 / self.params.alpha);
        s * s * self.unit_derivative(x * s)
    }

    pub fn density_estimate(&self, t: f64, x: f64) -> Estimate {
        let s = t.powf(-1.0 / self.params.alpha);
        Estimate {
            value: self.density(t, x),
            abs_error: s * self.interpolation_error.max(1e-14),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_direct_quadrature() {
        for &(a, g) in &[(1.2, 0.8), (1.5, 0.0), (1.8, -0.1)] {
            let p = StableParams::new(a, g, 1.0).unwrap();
            let t = StableTable::build(&p).unwrap();
            for &x in &[-39.9, -20.25, -3.3, -0.55, 0.01, 1.7, 9.99, 25.0] {
                let d = stable_density(&p, 1.0, x).unwrap().value;
                let dd = stable_density_derivative(&p, 1.0, x).unwrap().value;
                assert!((t.unit_density(x) - d).abs() < 1e-12, "a={a} x={x}");
                assert!((t.unit_derivative(x) - dd).abs() < 1e-11, "a={a} x={x}");
            }
            let d = stable_density(&p, 2.5, 1.1).unwrap().value;
            assert!((t.density(2.5, 1.1) - d).abs() < 1e-12);
        }
    }
}
