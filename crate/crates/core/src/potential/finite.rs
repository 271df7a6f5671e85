//! Hitting distributions, Green function and the harmonic function `u_A`
//! of a finite killing set, all expressed through `a`.
//!
//! For `z` in `A`, `x -> H_A^x(z)` is the bounded function harmonic off `A`
//! equal to `1(x = z)` on `A`. Bounded functions harmonic off `A` have the
//! form `c + sum_t mu(t) a(x - t)` with `sum_t mu(t) = 0`, which gives an
//! `(|A|+1)`-dimensional linear system per target `z`. At `x` in `A` the
//! same representation, pushed through one step, yields the return law
//! `1(x = z) + mu(x)`.

use super::table::{CPlus, PotentialTable};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteSetPotential {
    set: Vec<i64>,
    /// `constant[j]` and `weights[j][i]` represent `H_A^.(set[j])` with
    /// `mu(set[i]) = weights[j][i]`.
    constant: Vec<f64>,
    weights: Vec<Vec<f64>>,
}

/// Solve `m v = rhs` by Gaussian elimination with partial pivoting.
fn solve_dense(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            if f != 0.0 {
                for c in col..n {
                    m[r][c] -= f * m[col][c];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut v = vec![0.0; n];
    for r in (0..n).rev() {
        let mut acc = rhs[r];
        for c in r + 1..n {
            acc -= m[r][c] * v[c];
        }
        v[r] = acc / m[r][r];
    }
    Some(v)
}

impl FiniteSetPotential {
    pub fn new(table: &PotentialTable, set: &[i64]) -> Result<Self> {
        let mut set = set.to_vec();
        set.sort_unstable();
        set.dedup();
        if set.is_empty() {
            return Err(Error::Config("killing set must be non-empty".into()));
        }
        let k = set.len();
        for &s in &set {
            for &t in &set {
                table.try_a(s - t)?;
            }
        }
        let mut m = vec![vec![0.0; k + 1]; k + 1];
        for (i, &s) in set.iter().enumerate() {
            for (j, &t) in set.iter().enumerate() {
                m[i][j] = table.a(s - t);
            }
            m[i][k] = 1.0;
            m[k][i] = 1.0;
        }
        let mut constant = Vec::with_capacity(k);
        let mut weights = Vec::with_capacity(k);
        for j in 0..k {
            let mut rhs = vec![0.0; k + 1];
            rhs[j] = 1.0;
            let v = solve_dense(m.clone(), rhs).ok_or_else(|| {
                Error::SingularSystem(format!("potential matrix of {set:?} is singular"))
            })?;
            constant.push(v[k]);
            weights.push(v[..k].to_vec());
        }
        Ok(FiniteSetPotential {
            set,
            constant,
            weights,
        })
    }

    pub fn set(&self) -> &[i64] {
        &self.set
    }

    pub fn contains(&self, x: i64) -> bool {
        self.set.binary_search(&x).is_ok()
    }

    /// `H_A^x(z) = P[S^x at the first entrance (n >= 1) into A equals z]`.
    pub fn hit_dist(&self, table: &PotentialTable, x: i64, z: i64) -> f64 {
        let j = self.set.binary_search(&z).expect("target must lie in the set");
        match self.set.binary_search(&x) {
            Ok(i) => (if i == j { 1.0 } else { 0.0 }) + self.weights[j][i],
            Err(_) => {
                let mut v = self.constant[j];
                for (i, &t) in self.set.iter().enumerate() {
                    v += self.weights[j][i] * table.a(x - t);
                }
                v
            }
        }
    }

    /// The limit `H_A^{+inf}(z)` (also the limit at `-inf`).
    pub fn hit_dist_at_infinity(&self, z: i64) -> f64 {
        let j = self.set.binary_search(&z).expect("target must lie in the set");
        self.constant[j]
    }

    /// `u_A(x) = a^dagger(x - w0) - E a(S^x_{sigma_A} - w0)` for a chosen `w0` in `A`.
    pub fn u_with(&self, table: &PotentialTable, x: i64, w0: i64) -> f64 {
        let mut v = table.a_dagger(x - w0);
        for &z in &self.set {
            v -= self.hit_dist(table, x, z) * table.a(z - w0);
        }
        v
    }

    pub fn u(&self, table: &PotentialTable, x: i64) -> f64 {
        self.u_with(table, x, self.set[0])
    }

    /// `g_A(x,y) = u_A(x) - a(x-y) + E a(S^x_{sigma_A} - y)`, including the
    /// `n = 0` term `1(x = y)`.
    pub fn green(&self, table: &PotentialTable, x: i64, y: i64) -> f64 {
        let mut v = self.u(table, x) - table.a(x - y);
        for &z in &self.set {
            v += self.hit_dist(table, x, z) * table.a(z - y);
        }
        v
    }

    /// `C_A^+ = lim_{x -> +inf} u_A(x) = C+ - sum_z H_A^{+inf}(z) a(z - w0)`.
    pub fn c_plus(&self, table: &PotentialTable, c_plus: CPlus) -> CPlus {
        match c_plus {
            CPlus::Infinite => CPlus::Infinite,
            CPlus::Finite { value, abs_error } => {
                let w0 = self.set[0];
                let mut v = value;
                for &z in &self.set {
                    v -= self.hit_dist_at_infinity(z) * table.a(z - w0);
                }
                CPlus::Finite {
                    value: v,
                    abs_error,
                }
            }
        }
    }
}
