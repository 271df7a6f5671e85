//! Asymptotic forms with their regime dispatch.
//!
//! Regimes are decided on the scaled variables `x_n = x / n^{1/alpha}` with
//! a bound `M`: "near the origin" means `|x_n| < 1/M`, "bulk" means
//! `1/M <= |x_n| <= M`.

use crate::error::{Error, Result};
use crate::law::WalkLaw;
use crate::potential::{CPlus, FiniteSetPotential, PotentialTable};
use crate::stable::constants::kappa;
use crate::stable::{hitting_density_tabulated, StableParams, StableTable};

/// `f^0(n) ~ kappa c0^{1/alpha} n^{1/alpha - 2}`.
pub fn rhs_theorem1(n: usize, params: &StableParams) -> f64 {
    let a = params.alpha;
    kappa(params) * params.c0.powf(1.0 / a) * (n as f64).powf(1.0 / a - 2.0)
}

/// Which value stands in for `f^0(n)` inside a right-hand side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FirstReturn {
    /// the first-return asymptote
    Asymptote,
    /// a value supplied by the caller, normally the exact one
    Exact(f64),
}

/// Branches for `f^x(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PassageRegime {
    /// `a^dagger(x) f^0(n)`
    SmallStart,
    /// `a^dagger(x) f^0(n) + |x_n| p_{c0}(-x_n)/n`, extremal skewness with `gamma x > 0`
    TwoTerm,
    /// `c0 f^{x_n}(c0)/n`
    Bulk,
}

impl PassageRegime {
    pub fn tag(&self) -> &'static str {
        match self {
            PassageRegime::SmallStart => "small_start",
            PassageRegime::TwoTerm => "two_term",
            PassageRegime::Bulk => "bulk",
        }
    }
}

/// Branches for `p^n_{0}(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelRegime {
    /// `f^x(n) a(-y)`
    TargetNearOrigin,
    /// `a^dagger(x) f^{-y}(n)`, plus `(x_n)_+ K_{c0}(y_n)/n^{1/alpha}` for extremal skewness
    StartNearOrigin,
    /// `n^{-1/alpha} p^{0}_{c0}(x_n, y_n)`
    Bulk,
}

impl KernelRegime {
    pub fn tag(&self) -> &'static str {
        match self {
            KernelRegime::TargetNearOrigin => "target_near_origin",
            KernelRegime::StartNearOrigin => "start_near_origin",
            KernelRegime::Bulk => "bulk",
        }
    }
}

/// Branches for `x <= 0` under extremal skewness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corollary2Regime {
    /// `x_n -> 0`, `y_n > 1/M`: `a^dagger(x) c0 f^{-y_n}(c0)/n`
    StartNearOriginTargetAbove,
    /// `x_n -> 0`, `y < 0`: `a^dagger(x)[f^0(n) a(-y) + |y_n| p_{c0}(y_n)/n]`
    StartNearOriginTargetBelow,
    /// `y_n -> 0`: `a(-y) f^x(n) + (y_n)_- K_{c0}(-x_n)/n^{1/alpha}`
    TargetNearOrigin,
}

impl Corollary2Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Corollary2Regime::StartNearOriginTargetAbove => "start_near_origin_target_above",
            Corollary2Regime::StartNearOriginTargetBelow => "start_near_origin_target_below",
            Corollary2Regime::TargetNearOrigin => "target_near_origin",
        }
    }
}

/// Branches for `x > 0 > y` when `C+` is finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitRegime {
    /// `x_n` or `-y_n` near the origin
    Mixed,
    /// both away from the origin
    Separated,
}

impl SplitRegime {
    pub fn tag(&self) -> &'static str {
        match self {
            SplitRegime::Mixed => "mixed",
            SplitRegime::Separated => "separated",
        }
    }
}

/// Discrete and limit quantities that enter the kernel forms.
pub struct KernelTerms<'f> {
    /// `z -> f^z(n)`
    pub first_passage: &'f dyn Fn(i64) -> f64,
    /// `eta -> K_{c0}(eta)`, needed under extremal skewness
    pub entrance: Option<&'f dyn Fn(f64) -> f64>,
    /// `(xi, eta) -> p^{0}_{c0}(xi, eta)`, needed in the bulk
    pub bulk: Option<&'f dyn Fn(f64, f64) -> f64>,
}

/// Evaluator bound to one law.
pub struct Asymptotics {
    pub params: StableParams,
    pub stable: StableTable,
    pub potential: PotentialTable,
    /// regime bound `M`
    pub bound: f64,
}

fn violation(msg: String) -> Error {
    Error::OutOfRegime(msg)
}

impl Asymptotics {
    /// Potential kernel tabulated on `|x| <= x_max`.
    pub fn new(law: &WalkLaw, x_max: i64) -> Result<Self> {
        let params = law.stable_params();
        Ok(Asymptotics {
            params,
            stable: StableTable::build(&params)?,
            potential: PotentialTable::build(law, x_max)?,
            bound: 4.0,
        })
    }

    pub fn with_bound(mut self, m: f64) -> Self {
        self.bound = m;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn c0(&self) -> f64 {
        self.params.c0
    }

    /// `n^{1/alpha}`.
    pub fn scale(&self, n: usize) -> f64 {
        (n as f64).powf(1.0 / self.params.alpha)
    }

    /// `round(xi n^{1/alpha})`.
    pub fn lattice(&self, xi: f64, n: usize) -> i64 {
        (xi * self.scale(n)).round() as i64
    }

    fn extremal(&self) -> bool {
        (self.params.gamma.abs() - (2.0 - self.params.alpha)).abs() < 1e-12
    }

    fn small(&self, v: f64) -> bool {
        v.abs() < 1.0 / self.bound
    }

    /// `p_{c0}(xi)`.
    pub fn density(&self, xi: f64) -> f64 {
        self.stable.density(self.params.c0, xi)
    }

    /// `f^{xi}(c0)`, hitting density of the limit process.
    pub fn hitting(&self, xi: f64) -> Result<f64> {
        Ok(hitting_density_tabulated(&self.stable, xi, self.params.c0)?.value)
    }

    pub fn f0(&self, n: usize, source: FirstReturn) -> f64 {
        match source {
            FirstReturn::Asymptote => rhs_theorem1(n, &self.params),
            FirstReturn::Exact(v) => v,
        }
    }

    fn a(&self, x: i64) -> Result<f64> {
        self.potential.try_a(x)
    }

    fn a_dagger(&self, x: i64) -> Result<f64> {
        Ok(self.a(x)? + if x == 0 { 1.0 } else { 0.0 })
    }

    /// The branch of the `f^x(n)` forms that covers `(x, n)`.
    pub fn passage_regime(&self, x: i64, n: usize) -> Result<PassageRegime> {
        let xn = x as f64 / self.scale(n);
        if xn.abs() > self.bound {
            return Err(violation(format!("|x_n| = {:.3} exceeds M = {}", xn.abs(), self.bound)));
        }
        if self.extremal() && self.params.gamma * xn > 0.0 {
            Ok(PassageRegime::TwoTerm)
        } else if self.small(xn) {
            Ok(PassageRegime::SmallStart)
        } else {
            Ok(PassageRegime::Bulk)
        }
    }

    /// Asymptotic form of `f^x(n)` in the given branch.
    pub fn rhs_theorem2_3(&self, x: i64, n: usize, regime: PassageRegime, f0: FirstReturn) -> Result<f64> {
        let s = self.scale(n);
        let xn = x as f64 / s;
        let nf = n as f64;
        let two_term_side = self.extremal() && self.params.gamma * xn > 0.0;
        match regime {
            PassageRegime::SmallStart => {
                if !self.small(xn) || two_term_side {
                    return Err(violation(format!("x={x}, n={n} is not in the small-start branch")));
                }
                Ok(self.a_dagger(x)? * self.f0(n, f0))
            }
            PassageRegime::TwoTerm => {
                if !two_term_side || xn.abs() > self.bound {
                    return Err(violation(format!("x={x}, n={n} is not in the two-term branch")));
                }
                Ok(self.a_dagger(x)? * self.f0(n, f0) + xn.abs() * self.density(-xn) / nf)
            }
            PassageRegime::Bulk => {
                if self.small(xn) || xn.abs() > self.bound {
                    return Err(violation(format!("x_n = {xn:.3} is outside the bulk")));
                }
                Ok(self.params.c0 * self.hitting(xn)? / nf)
            }
        }
    }

    /// The branch of the kernel forms that covers `(x, y, n)`.
    pub fn kernel_regime(&self, x: i64, y: i64, n: usize) -> Result<KernelRegime> {
        let s = self.scale(n);
        let (xn, yn) = (x as f64 / s, y as f64 / s);
        self.kernel_preconditions(xn, y, yn)?;
        Ok(if self.small(yn) {
            KernelRegime::TargetNearOrigin
        } else if self.small(xn) {
            KernelRegime::StartNearOrigin
        } else {
            KernelRegime::Bulk
        })
    }

    fn kernel_preconditions(&self, xn: f64, y: i64, yn: f64) -> Result<()> {
        if xn.abs().max(yn.abs()) >= self.bound {
            return Err(violation(format!("|x_n| v |y_n| must stay below M = {}", self.bound)));
        }
        if self.extremal() {
            if self.params.gamma < 0.0 {
                return Err(violation("negative extremal skewness: use the reflected law".into()));
            }
            if y <= 0 {
                return Err(violation(format!("y={y}: extremal skewness needs y > 0 here")));
            }
        }
        Ok(())
    }

    /// Asymptotic form of `p^n_{0}(x, y)` for `|gamma| < 2 - alpha`, or for
    /// `gamma = 2 - alpha` with `y > 0`.
    pub fn rhs_theorem4_5(&self, x: i64, y: i64, n: usize, regime: KernelRegime, terms: &KernelTerms) -> Result<f64> {
        let s = self.scale(n);
        let (xn, yn) = (x as f64 / s, y as f64 / s);
        self.kernel_preconditions(xn, y, yn)?;
        match regime {
            KernelRegime::TargetNearOrigin => {
                if !self.small(yn) {
                    return Err(violation(format!("y_n = {yn:.3} is not near the origin")));
                }
                Ok((terms.first_passage)(x) * self.a(-y)?)
            }
            KernelRegime::StartNearOrigin => {
                if !self.small(xn) || y == 0 {
                    return Err(violation(format!("x_n = {xn:.3}, y = {y}: not the start-near-origin branch")));
                }
                let mut v = self.a_dagger(x)? * (terms.first_passage)(-y);
                if self.extremal() && xn > 0.0 {
                    let k = terms
                        .entrance
                        .ok_or_else(|| Error::Config("entrance density K needed for extremal skewness".into()))?;
                    v += xn * k(yn) / s;
                }
                Ok(v)
            }
            KernelRegime::Bulk => {
                if self.small(xn) || self.small(yn) {
                    return Err(violation(format!("(x_n, y_n) = ({xn:.3}, {yn:.3}) is outside the bulk")));
                }
                let bulk = terms
                    .bulk
                    .ok_or_else(|| Error::Config("bulk killed density needed".into()))?;
                Ok(bulk(xn, yn) / s)
            }
        }
    }

    /// Asymptotic form of `p^n_{0}(x, y)` for `x <= 0` under `gamma = 2 - alpha`.
    pub fn rhs_corollary2(
        &self,
        x: i64,
        y: i64,
        n: usize,
        regime: Corollary2Regime,
        f0: FirstReturn,
        terms: &KernelTerms,
    ) -> Result<f64> {
        if !self.extremal() || self.params.gamma < 0.0 {
            return Err(violation("needs gamma = 2 - alpha".into()));
        }
        let s = self.scale(n);
        let nf = n as f64;
        let (xn, yn) = (x as f64 / s, y as f64 / s);
        if x > 0 || xn < -self.bound || yn.abs() >= self.bound {
            return Err(violation(format!("(x, y) = ({x}, {y}) outside -M n^(1/alpha) <= x <= 0, |y_n| < M")));
        }
        match regime {
            Corollary2Regime::StartNearOriginTargetAbove => {
                if !self.small(xn) || yn < 1.0 / self.bound {
                    return Err(violation(format!("x_n = {xn:.3}, y_n = {yn:.3}: not this branch")));
                }
                Ok(self.a_dagger(x)? * self.params.c0 * self.hitting(-yn)? / nf)
            }
            Corollary2Regime::StartNearOriginTargetBelow => {
                if !self.small(xn) || y >= 0 {
                    return Err(violation(format!("x_n = {xn:.3}, y = {y}: not this branch")));
                }
                Ok(self.a_dagger(x)? * (self.f0(n, f0) * self.a(-y)? + yn.abs() * self.density(yn) / nf))
            }
            Corollary2Regime::TargetNearOrigin => {
                if !self.small(yn) {
                    return Err(violation(format!("y_n = {yn:.3} is not near the origin")));
                }
                let mut v = self.a(-y)? * (terms.first_passage)(x);
                if y < 0 && x < 0 {
                    let k = terms
                        .entrance
                        .ok_or_else(|| Error::Config("entrance density K needed".into()))?;
                    v += (-yn) * k(-xn) / s;
                }
                Ok(v)
            }
        }
    }

    /// Asymptotic form of `p^n_{0}(x, y)` for `x > 0 > y` when `C+` is finite.
    pub fn rhs_theorem6(
        &self,
        x: i64,
        y: i64,
        n: usize,
        regime: SplitRegime,
        c_plus: CPlus,
        f0: FirstReturn,
    ) -> Result<f64> {
        let c_plus = match c_plus {
            CPlus::Infinite => {
                return Err(Error::InfiniteCPlus(
                    "the crossing asymptotics need a bounded potential on the positive side".into(),
                ))
            }
            CPlus::Finite { value, .. } => value,
        };
        let s = self.scale(n);
        let nf = n as f64;
        let (xn, yn) = (x as f64 / s, y as f64 / s);
        if !(x > 0 && y < 0 && xn < self.bound && yn > -self.bound) {
            return Err(violation(format!("(x, y) = ({x}, {y}) outside -M < y_n < 0 < x_n < M")));
        }
        let near = self.small(xn.min(-yn));
        match regime {
            SplitRegime::Mixed => {
                if !near {
                    return Err(violation("neither x_n nor -y_n is near the origin".into()));
                }
                let ad = self.a_dagger(x)?;
                let am = self.a(-y)?;
                Ok(ad * am * self.f0(n, f0)
                    + (ad * yn.abs() * self.density(yn) + am * xn * self.density(-xn)) / nf)
            }
            SplitRegime::Separated => {
                if near {
                    return Err(violation("x_n or -y_n is near the origin".into()));
                }
                Ok(c_plus * (xn - yn) * self.density(yn - xn) / nf)
            }
        }
    }

    /// Regime (ii) written through the hitting density, `C+ c0 f^{x-y}(c0 n)`.
    pub fn rhs_theorem6_hitting_form(&self, x: i64, y: i64, n: usize, c_plus: f64) -> Result<f64> {
        let s = self.scale(n);
        let d = (x - y) as f64 / s;
        // f^{x}(c0 t) = f^{x/t^{1/alpha}}(c0)/t
        Ok(c_plus * self.params.c0 * self.hitting(d)? / n as f64)
    }
}

/// Potentials `u_A` and `u_{-A}` of a finite killing set.
pub struct FiniteSetForms {
    pub set: FiniteSetPotential,
    pub mirror: FiniteSetPotential,
}

impl FiniteSetForms {
    pub fn new(asy: &Asymptotics, set: &[i64]) -> Result<Self> {
        let neg: Vec<i64> = set.iter().map(|v| -v).collect();
        Ok(FiniteSetForms {
            set: FiniteSetPotential::new(&asy.potential, set)?,
            mirror: FiniteSetPotential::new(&asy.potential, &neg)?,
        })
    }

    pub fn u(&self, asy: &Asymptotics, x: i64) -> f64 {
        self.set.u(&asy.potential, x)
    }

    /// `u_{-A}(x)`.
    pub fn u_mirror(&self, asy: &Asymptotics, x: i64) -> f64 {
        self.mirror.u(&asy.potential, x)
    }
}

impl Asymptotics {
    /// `f_A^x(n) ~ u_A(x) f^0(n)`, plus `(x_n)_+ p_{c0}(-x_n)/n` on the
    /// side towards which an extremal law jumps.
    pub fn rhs_finite_first_passage(&self, forms: &FiniteSetForms, x: i64, n: usize, f0: FirstReturn) -> Result<f64> {
        let s = self.scale(n);
        let xn = x as f64 / s;
        let nf = n as f64;
        let two_term_side = self.extremal() && self.params.gamma * xn > 0.0;
        if !self.small(xn) && !two_term_side {
            return Err(violation(format!("x_n = {xn:.3} is not near the origin")));
        }
        if xn.abs() >= self.bound {
            return Err(violation(format!("|x_n| = {:.3} exceeds M", xn.abs())));
        }
        let mut v = forms.u(self, x) * self.f0(n, f0);
        if two_term_side {
            v += xn.abs() * self.density(-xn) / nf;
        }
        Ok(v)
    }

    /// `p^n_A(x, y)` with `f_A`, `u_A`, `u_{-A}` in place of `f`, `a^dagger`, `a(-.)`.
    /// `first_passage(z)` is `f_A^z(n)` and `mirror_passage(z)` is `f_{-A}^z(n)`.
    pub fn rhs_finite_kernel(
        &self,
        forms: &FiniteSetForms,
        x: i64,
        y: i64,
        n: usize,
        regime: KernelRegime,
        first_passage: &dyn Fn(i64) -> f64,
        mirror_passage: &dyn Fn(i64) -> f64,
        entrance: Option<&dyn Fn(f64) -> f64>,
    ) -> Result<f64> {
        let s = self.scale(n);
        let (xn, yn) = (x as f64 / s, y as f64 / s);
        if xn.abs() >= self.bound || yn.abs() >= self.bound {
            return Err(violation("|x_n| v |y_n| must stay below M".into()));
        }
        if forms.set.contains(y) {
            return Ok(0.0);
        }
        match regime {
            KernelRegime::TargetNearOrigin => {
                if !self.small(yn) {
                    return Err(violation(format!("y_n = {yn:.3} is not near the origin")));
                }
                Ok(first_passage(x) * forms.u_mirror(self, -y))
            }
            KernelRegime::StartNearOrigin => {
                if !self.small(xn) {
                    return Err(violation(format!("x_n = {xn:.3} is not near the origin")));
                }
                let mut v = forms.u(self, x) * mirror_passage(-y);
                if self.extremal() && self.params.gamma > 0.0 && xn > 0.0 && y > 0 {
                    let k = entrance.ok_or_else(|| Error::Config("entrance density K needed".into()))?;
                    v += xn * k(yn) / s;
                }
                Ok(v)
            }
            KernelRegime::Bulk => Err(violation("the bulk form does not depend on A; use the single-point form".into())),
        }
    }

    /// Space-time hitting law `P[sigma_A^x = n, S_n = y] ~ f_A^x(n) u_{-A}(-y)`, `y` in `A`.
    pub fn rhs_corollary3(&self, forms: &FiniteSetForms, x: i64, y: i64, n: usize, f_a: f64) -> Result<f64> {
        if !forms.set.contains(y) {
            return Err(violation(format!("y={y} is not in the set")));
        }
        let xn = x as f64 / self.scale(n);
        if xn.abs() >= self.bound {
            return Err(violation(format!("|x_n| = {:.3} exceeds M", xn.abs())));
        }
        Ok(f_a * forms.u_mirror(self, -y))
    }

    /// The same product with `u_A(-y)`, the literal printed form, kept for comparison.
    pub fn corollary3_printed_form(&self, forms: &FiniteSetForms, y: i64, f_a: f64) -> f64 {
        f_a * forms.u(self, -y)
    }
}
