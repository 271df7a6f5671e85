//! Lattice step laws with regularly varying tails of index `alpha in (1,2)`,
//! zero mean and a strongly aperiodic support.
//!
//! Jumps of size `|x| >= 2` follow Zipf shapes whose tail sums are expressed
//! through the Hurwitz zeta function, so the pmf, both tail functions and the
//! characteristic function are available in closed form at every point. The
//! three atoms at `-1, 0, 1` absorb the remaining mass and cancel the mean.

use crate::error::{Error, Result};
use crate::special::{hurwitz_zeta, reduce_angle, UnitPolylog};
use crate::stable::StableParams;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const LAW_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Heavy tails on both sides weighted by `q_plus`, `q_minus`.
    TwoSidedPareto,
    /// Heavy positive tail and a lighter negative tail of index `beta_neg`.
    SpectrallyPositive,
    /// Like `SpectrallyPositive`; the negative tail is light enough that the
    /// potential kernel stays bounded on the positive half-line.
    BoundedPotential,
    /// Heavy positive tail, no jumps below `-1`.
    LeftContinuous,
}

impl Family {
    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "two_sided_pareto" => Ok(Family::TwoSidedPareto),
            "spectrally_positive" => Ok(Family::SpectrallyPositive),
            "bounded_potential" => Ok(Family::BoundedPotential),
            "left_continuous" => Ok(Family::LeftContinuous),
            other => Err(Error::InvalidTailSpec(format!("unknown family {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::TwoSidedPareto => "two_sided_pareto",
            Family::SpectrallyPositive => "spectrally_positive",
            Family::BoundedPotential => "bounded_potential",
            Family::LeftContinuous => "left_continuous",
        }
    }

    fn one_sided(&self) -> bool {
        !matches!(self, Family::TwoSidedPareto)
    }
}

/// How the mass at `0` is fixed once normalisation and zero mean pin down the
/// other two atoms.
#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq, Hash)]
#[serde(rename_all = "snake_case")]
pub enum AtomRule {
    /// `p(0)` is one third of the mass left after the tails.
    Balanced,
    /// `p(0)` is chosen so that `1 - phi(theta)` has no `theta^2` term, which
    /// removes the slowest correction to the stable scaling.
    SecondOrder,
}

impl AtomRule {
    pub fn parse(s: &str) -> Result<AtomRule> {
        match s {
            "balanced" => Ok(AtomRule::Balanced),
            "second_order" => Ok(AtomRule::SecondOrder),
            other => Err(Error::InvalidTailSpec(format!("unknown atom rule {other:?}"))),
        }
    }
}

/// User-facing description of a step law.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TailSpec {
    pub alpha: f64,
    pub family: Family,
    pub b_scale: f64,
    pub q_plus: f64,
    pub q_minus: f64,
    /// Half-width of the explicitly tabulated support used for sampling and
    /// direct-summation checks.
    pub support_radius: u64,
    /// Decay exponent of the light negative tail.
    #[serde(default)]
    pub beta_neg: Option<f64>,
    #[serde(default = "default_atom_rule")]
    pub atom_rule: AtomRule,
    /// First jump size carried by the heavy tails; chosen automatically when
    /// absent.
    #[serde(default)]
    pub tail_start: Option<i64>,
}

fn default_atom_rule() -> AtomRule {
    AtomRule::Balanced
}

pub const DEFAULT_SUPPORT_RADIUS: u64 = 1 << 20;

impl TailSpec {
    pub fn new(alpha: f64, family: Family, b_scale: f64) -> Self {
        let (q_plus, q_minus) = if family.one_sided() { (1.0, 0.0) } else { (0.5, 0.5) };
        TailSpec {
            alpha,
            family,
            b_scale,
            q_plus,
            q_minus,
            support_radius: DEFAULT_SUPPORT_RADIUS,
            beta_neg: None,
            atom_rule: AtomRule::Balanced,
            tail_start: None,
        }
    }

    pub fn with_weights(mut self, q_plus: f64, q_minus: f64) -> Self {
        self.q_plus = q_plus;
        self.q_minus = q_minus;
        self
    }

    pub fn with_beta_neg(mut self, beta: f64) -> Self {
        self.beta_neg = Some(beta);
        self
    }

    pub fn with_atom_rule(mut self, rule: AtomRule) -> Self {
        self.atom_rule = rule;
        self
    }

    pub fn with_tail_start(mut self, start: i64) -> Self {
        self.tail_start = Some(start);
        self
    }

    pub fn with_support_radius(mut self, r: u64) -> Self {
        self.support_radius = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidTailSpec(m));
        if !(self.alpha > 1.0 && self.alpha < 2.0) {
            return bad(format!("alpha out of range: alpha={} must lie in (1,2)", self.alpha));
        }
        if near_integer(self.alpha + 1.0) {
            return bad(format!("alpha={} too close to an integer", self.alpha));
        }
        if !(self.b_scale > 0.0 && self.b_scale.is_finite()) {
            return bad(format!("b_scale={} must be positive", self.b_scale));
        }
        if self.q_plus < 0.0 || self.q_minus < 0.0 || (self.q_plus + self.q_minus - 1.0).abs() > 1e-12 {
            return bad(format!(
                "q_plus={} q_minus={} must be nonnegative and sum to 1",
                self.q_plus, self.q_minus
            ));
        }
        if self.family.one_sided() && (self.q_plus != 1.0 || self.q_minus != 0.0) {
            return bad(format!("family {} needs q_plus=1, q_minus=0", self.family.name()));
        }
        match (self.family, self.beta_neg) {
            (Family::SpectrallyPositive | Family::BoundedPotential, Some(b)) => {
                if !(b > 2.0 * self.alpha - 1.0) || !b.is_finite() {
                    return bad(format!("beta_neg={b} must exceed 2 alpha - 1"));
                }
                if near_integer(b + 1.0) {
                    return bad(format!("beta_neg={b} too close to an integer"));
                }
            }
            (Family::TwoSidedPareto | Family::LeftContinuous, Some(_)) => {
                return bad(format!("beta_neg is not used by family {}", self.family.name()));
            }
            _ => {}
        }
        if self.support_radius < 16 {
            return bad(format!("support_radius={} too small", self.support_radius));
        }
        if let Some(s) = self.tail_start {
            if s < 2 || s as u64 > self.support_radius {
                return bad(format!("tail_start={s} must lie in [2, support_radius]"));
            }
        }
        Ok(())
    }

    fn beta(&self) -> Option<f64> {
        match self.family {
            Family::SpectrallyPositive | Family::BoundedPotential => {
                Some(self.beta_neg.unwrap_or(2.0 * self.alpha))
            }
            _ => None,
        }
    }
}

fn near_integer(s: f64) -> bool {
    let d = (s - s.round()).abs();
    d > 0.0 && d < 1e-6
}

/// `p(k) = weight k^{-exponent}` for `k >= start` on one side of the origin.
#[derive(Clone, Debug)]
pub struct ZipfTail {
    pub weight: f64,
    pub exponent: f64,
    pub start: i64,
    polylog: UnitPolylog,
}

impl ZipfTail {
    fn new(weight: f64, exponent: f64, start: i64) -> Self {
        ZipfTail {
            weight,
            exponent,
            start,
            polylog: UnitPolylog::new(exponent),
        }
    }

    pub fn pmf(&self, k: i64) -> f64 {
        if k >= self.start {
            self.weight * (k as f64).powf(-self.exponent)
        } else {
            0.0
        }
    }

    /// Mass carried by jumps `>= k`.
    pub fn mass_from(&self, k: i64) -> f64 {
        self.weight * hurwitz_zeta(self.exponent, k.max(self.start) as f64)
    }

    pub fn mass(&self) -> f64 {
        self.mass_from(self.start)
    }

    pub fn first_moment(&self) -> f64 {
        self.weight * hurwitz_zeta(self.exponent - 1.0, self.start as f64)
    }

    /// Second moment continued analytically in the exponent; it is the
    /// `theta^2` coefficient (times 2) of `sum p(k)(1 - cos k theta)`.
    pub fn regularised_second_moment(&self) -> f64 {
        self.weight * hurwitz_zeta(self.exponent - 2.0, self.start as f64)
    }

    /// `sum_k p(k) (1 - e^{i theta k})`.
    pub fn deficit(&self, theta: f64) -> Complex64 {
        let mut d = self.polylog.deficit(theta);
        for k in 1..self.start {
            let kf = k as f64;
            d -= one_minus_expi(theta * kf) * kf.powf(-self.exponent);
        }
        d * self.weight
    }

    /// `sum_k p(k) (1 - e^{i theta k} + i theta k)`.
    pub fn deficit_centered(&self, theta: f64) -> Complex64 {
        let mut d = self.polylog.deficit_centered(theta);
        for k in 1..self.start {
            let kf = k as f64;
            d -= one_minus_expi_centered(theta * kf) * kf.powf(-self.exponent);
        }
        d * self.weight
    }
}

/// `1 - e^{i x} + i x`, accurate for small `x`.
pub fn one_minus_expi_centered(x: f64) -> Complex64 {
    let h = 0.5 * x;
    let s = h.sin();
    let im = if x.abs() < 0.5 {
        // x - sin x
        let x2 = x * x;
        let mut term = x * x2 / 6.0;
        let mut sum: f64 = 0.0;
        let mut k = 3.0;
        while term.abs() > 1e-18 * sum.abs() {
            sum += term;
            term *= -x2 / ((k + 1.0) * (k + 2.0));
            k += 2.0;
        }
        sum
    } else {
        x - x.sin()
    };
    Complex64::new(2.0 * s * s, im)
}

/// `1 - e^{i x}` without cancellation for small `x`.
pub fn one_minus_expi(x: f64) -> Complex64 {
    let h = 0.5 * x;
    let s = h.sin();
    // -2i sin(h) e^{ih}
    Complex64::new(2.0 * s * s, -2.0 * s * h.cos())
}

/// A fully constructed step law.
#[derive(Clone, Debug)]
pub struct WalkLaw {
    spec: TailSpec,
    params: StableParams,
    /// `p(-1), p(0), p(1)`.
    atoms: [f64; 3],
    pos: ZipfTail,
    neg: Option<ZipfTail>,
}

/// Closed-form tail and atom totals for a candidate tail start.
struct Budget {
    tail_mass: f64,
    tail_mean: f64,
    tail_m2: f64,
}

fn tails_for(spec: &TailSpec, start: i64) -> (ZipfTail, Option<ZipfTail>) {
    let a = spec.alpha;
    let b = spec.b_scale;
    let pos = ZipfTail::new(spec.q_plus * a * b, a + 1.0, start);
    let neg = match spec.family {
        Family::TwoSidedPareto if spec.q_minus > 0.0 => {
            Some(ZipfTail::new(spec.q_minus * a * b, a + 1.0, start))
        }
        Family::SpectrallyPositive | Family::BoundedPotential => {
            let beta = spec.beta().expect("beta for one-sided family");
            Some(ZipfTail::new(beta * b, beta + 1.0, 2))
        }
        _ => None,
    };
    (pos, neg)
}

fn budget(pos: &ZipfTail, neg: &Option<ZipfTail>) -> Budget {
    let mut tail_mass = pos.mass();
    let mut tail_mean = pos.first_moment();
    let mut tail_m2 = pos.regularised_second_moment();
    if let Some(n) = neg {
        tail_mass += n.mass();
        tail_mean -= n.first_moment();
        tail_m2 += n.regularised_second_moment();
    }
    Budget {
        tail_mass,
        tail_mean,
        tail_m2,
    }
}

fn solve_atoms(spec: &TailSpec, b: &Budget) -> std::result::Result<[f64; 3], String> {
    let free = 1.0 - b.tail_mass;
    if free <= 0.0 {
        return Err(format!("tails carry mass {} >= 1", b.tail_mass));
    }
    let (p0, s) = match spec.atom_rule {
        AtomRule::Balanced => (free / 3.0, free * 2.0 / 3.0),
        AtomRule::SecondOrder => {
            let s = -b.tail_m2;
            (free - s, s)
        }
    };
    let p1 = 0.5 * (s - b.tail_mean);
    let pm1 = 0.5 * (s + b.tail_mean);
    if !(p0 > 0.0) || p1 < 0.0 || pm1 < 0.0 {
        return Err(format!("atoms p(-1)={pm1:.6e} p(0)={p0:.6e} p(1)={p1:.6e}"));
    }
    if spec.family == Family::LeftContinuous && !(pm1 > 0.0) {
        return Err("left-continuous law needs p(-1) > 0".into());
    }
    Ok([pm1, p0, p1])
}

fn candidate_starts(limit: u64) -> Vec<i64> {
    let mut v = vec![2i64];
    let mut k = 3i64;
    while (k as u64) <= limit.min(1 << 16) {
        v.push(k);
        k = if k.count_ones() == 1 { k + k / 2 } else { (k / 3) * 4 };
    }
    v
}

impl WalkLaw {
    pub fn build(spec: &TailSpec) -> Result<WalkLaw> {
        spec.validate()?;
        let params = StableParams::from_tails(spec.alpha, spec.b_scale, spec.q_plus, spec.q_minus)?;
        let starts = match spec.tail_start {
            Some(s) => vec![s],
            None => candidate_starts(spec.support_radius),
        };
        let mut last_reason = String::new();
        for start in starts {
            let (pos, neg) = tails_for(spec, start);
            match solve_atoms(spec, &budget(&pos, &neg)) {
                Ok(atoms) => {
                    let law = WalkLaw {
                        spec: spec.clone(),
                        params,
                        atoms,
                        pos,
                        neg,
                    };
                    law.check_aperiodic()?;
                    return Ok(law);
                }
                Err(reason) => last_reason = format!("tail_start={start}: {reason}"),
            }
        }
        Err(Error::InfeasibleMeanAdjustment(last_reason))
    }

    fn check_aperiodic(&self) -> Result<()> {
        // support contains 0, so strong aperiodicity reduces to gcd(support) = 1
        if !(self.atoms[1] > 0.0) {
            return Err(Error::AperiodicityFailure("p(0) = 0".into()));
        }
        let mut g = 0i64;
        for (x, p) in [(-1i64, self.atoms[0]), (1, self.atoms[2])] {
            if p > 0.0 {
                g = gcd(g, x.abs());
            }
        }
        g = gcd(g, self.pos.start);
        g = gcd(g, self.pos.start + 1);
        if g != 1 {
            return Err(Error::AperiodicityFailure(format!("support gcd {g}")));
        }
        Ok(())
    }

    pub fn spec(&self) -> &TailSpec {
        &self.spec
    }

    pub fn stable_params(&self) -> StableParams {
        self.params
    }

    pub fn alpha(&self) -> f64 {
        self.spec.alpha
    }

    /// `[p(-1), p(0), p(1)]`.
    pub fn atoms(&self) -> [f64; 3] {
        self.atoms
    }

    pub fn tail_start(&self) -> i64 {
        self.pos.start
    }

    pub fn positive_tail(&self) -> &ZipfTail {
        &self.pos
    }

    pub fn negative_tail(&self) -> Option<&ZipfTail> {
        self.neg.as_ref()
    }

    pub fn family(&self) -> Family {
        self.spec.family
    }

    /// True when the law puts mass on `(-inf, -2]`.
    pub fn has_mass_below_minus_one(&self) -> bool {
        self.neg.is_some()
    }

    pub fn pmf(&self, x: i64) -> f64 {
        match x {
            -1 => self.atoms[0],
            0 => self.atoms[1],
            1 => self.atoms[2],
            x if x >= 2 => self.pos.pmf(x),
            x => self.neg.as_ref().map_or(0.0, |n| n.pmf(-x)),
        }
    }

    /// `p(lo), ..., p(hi)`.
    pub fn pmf_range(&self, lo: i64, hi: i64) -> Vec<f64> {
        (lo..=hi).map(|x| self.pmf(x)).collect()
    }

    /// `P[X > x]`.
    pub fn mass_above(&self, x: i64) -> f64 {
        if x >= 1 {
            self.pos.mass_from(x + 1)
        } else if x >= -1 {
            let mut m = self.pos.mass();
            for k in (x + 1)..=1 {
                m += self.pmf(k);
            }
            m
        } else {
            1.0 - self.mass_below(x + 1)
        }
    }

    /// `P[X < x]`.
    pub fn mass_below(&self, x: i64) -> f64 {
        if x <= -1 {
            self.neg.as_ref().map_or(0.0, |n| n.mass_from(-x + 1))
        } else if x <= 1 {
            let mut m = self.neg.as_ref().map_or(0.0, |n| n.mass());
            for k in -1..x {
                m += self.pmf(k);
            }
            m
        } else {
            1.0 - self.mass_above(x - 1)
        }
    }

    /// `1 - E e^{i theta X}` computed without cancellation near the origin.
    ///
    /// Each piece has its linear term removed; these sum to `i theta E X = 0`,
    /// so the result keeps full relative accuracy as `theta -> 0`.
    pub fn one_minus_char(&self, theta: f64) -> Complex64 {
        let theta = reduce_angle(theta);
        let mut d = one_minus_expi_centered(theta) * self.atoms[2]
            + one_minus_expi_centered(-theta) * self.atoms[0];
        d += self.pos.deficit_centered(theta);
        if let Some(n) = &self.neg {
            d += n.deficit_centered(-theta);
        }
        d
    }

    /// `E e^{i theta X}`.
    pub fn char_fn(&self, theta: f64) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.one_minus_char(theta)
    }

    /// Half the `theta^2` coefficient of `1 - phi(theta)` (zero under
    /// [`AtomRule::SecondOrder`]).
    pub fn second_order_coefficient(&self) -> f64 {
        let mut m2 = self.atoms[0] + self.atoms[2] + self.pos.regularised_second_moment();
        if let Some(n) = &self.neg {
            m2 += n.regularised_second_moment();
        }
        0.5 * m2
    }

    /// Total mass and mean from closed-form tail sums.
    pub fn closed_form_moments(&self) -> (f64, f64) {
        let b = budget(&self.pos, &self.neg);
        let mass = self.atoms.iter().sum::<f64>() + b.tail_mass;
        let mean = self.atoms[2] - self.atoms[0] + b.tail_mean;
        (mass, mean)
    }

    /// Mass and mean by direct summation over `|x| <= support_radius`, with the
    /// closed-form remainder beyond.
    pub fn summed_moments(&self) -> MomentReport {
        let r = self.spec.support_radius as i64;
        let mut mass = Neumaier::default();
        let mut mean = Neumaier::default();
        // small terms first
        for k in (1..=r).rev() {
            let pp = self.pmf(k);
            let pn = self.pmf(-k);
            mass.add(pp);
            mass.add(pn);
            mean.add(k as f64 * pp);
            mean.add(-(k as f64) * pn);
        }
        mass.add(self.pmf(0));
        let above = self.mass_above(r);
        let below = self.mass_below(-r);
        let mean_above = self.pos.weight * hurwitz_zeta(self.pos.exponent - 1.0, (r + 1) as f64);
        let mean_below = self.neg.as_ref().map_or(0.0, |n| {
            n.weight * hurwitz_zeta(n.exponent - 1.0, (r + 1) as f64)
        });
        MomentReport {
            window_mass: mass.sum(),
            beyond_mass: above + below,
            total_mass: mass.sum() + above + below,
            mean: mean.sum() + mean_above - mean_below,
        }
    }

    /// `x^alpha P[X > x]` and `x^alpha P[X < -x]` along `x = 2^k`.
    pub fn validate_tails(&self) -> TailReport {
        let a = self.spec.alpha;
        let b = self.spec.b_scale;
        let mut rows = Vec::new();
        let mut x = 2i64;
        while x <= (self.spec.support_radius as i64) * 64 {
            let xf = x as f64;
            let up = xf.powf(a) * self.mass_above(x);
            let down = xf.powf(a) * self.mass_below(-x);
            rows.push(TailRow {
                x,
                scaled_upper: up,
                scaled_lower: down,
                upper_deviation: up - self.spec.q_plus * b,
                lower_deviation: if self.spec.family == Family::TwoSidedPareto {
                    down - self.spec.q_minus * b
                } else {
                    down
                },
            });
            x *= 2;
        }
        TailReport { rows }
    }

    pub fn record(&self) -> LawRecord {
        let (mass, mean) = self.closed_form_moments();
        LawRecord {
            schema_version: LAW_SCHEMA_VERSION,
            spec: self.spec.clone(),
            tail_start: self.pos.start,
            atoms: self.atoms,
            params: self.params,
            total_mass: mass,
            mean,
            second_order_coefficient: self.second_order_coefficient(),
        }
    }

    /// Rebuild from a serialised record; the stored atoms must be reproduced
    /// exactly.
    pub fn from_record(rec: &LawRecord) -> Result<WalkLaw> {
        if rec.schema_version != LAW_SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "law schema version {} unsupported",
                rec.schema_version
            )));
        }
        let spec = rec.spec.clone().with_tail_start(rec.tail_start);
        let mut law = WalkLaw::build(&spec)?;
        if law.atoms != rec.atoms {
            return Err(Error::Config("stored atoms do not match the rebuilt law".into()));
        }
        law.spec.tail_start = rec.spec.tail_start;
        Ok(law)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.record()).expect("law record serialises")
    }

    pub fn from_json(s: &str) -> Result<WalkLaw> {
        let rec: LawRecord =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("law json: {e}")))?;
        WalkLaw::from_record(&rec)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Compensated summation.
#[derive(Default, Clone, Copy, Debug)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LawRecord {
    pub schema_version: u32,
    pub spec: TailSpec,
    pub tail_start: i64,
    pub atoms: [f64; 3],
    pub params: StableParams,
    pub total_mass: f64,
    pub mean: f64,
    pub second_order_coefficient: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentReport {
    pub window_mass: f64,
    pub beyond_mass: f64,
    pub total_mass: f64,
    pub mean: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailRow {
    pub x: i64,
    pub scaled_upper: f64,
    pub scaled_lower: f64,
    pub upper_deviation: f64,
    pub lower_deviation: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailReport {
    pub rows: Vec<TailRow>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sym(alpha: f64, b: f64) -> WalkLaw {
        WalkLaw::build(&TailSpec::new(alpha, Family::TwoSidedPareto, b)).unwrap()
    }

    #[test]
    fn symmetric_example_has_expected_params() {
        let law = sym(1.5, 1.0);
        let p = law.stable_params();
        assert_eq!(p.gamma, 0.0);
        assert!((p.c0 - 2.506_628_274_631).abs() < 1e-11);
        assert_eq!(law.tail_start(), 2);
    }

    #[test]
    fn spectrally_positive_example_builds() {
        let spec = TailSpec::new(1.5, Family::SpectrallyPositive, 1.0).with_beta_neg(2.5);
        let law = WalkLaw::build(&spec).unwrap();
        assert_eq!(law.stable_params().gamma, 0.5);
        let (mass, mean) = law.closed_form_moments();
        assert!((mass - 1.0).abs() < 1e-14 && mean.abs() < 1e-14);
    }

    #[test]
    fn rejects_invalid_specs() {
        let e = WalkLaw::build(&TailSpec::new(2.0, Family::TwoSidedPareto, 1.0)).unwrap_err();
        assert!(matches!(e, Error::InvalidTailSpec(_)));
        let e = WalkLaw::build(&TailSpec::new(1.5, Family::TwoSidedPareto, 1.0).with_weights(0.7, 0.7))
            .unwrap_err();
        assert!(matches!(e, Error::InvalidTailSpec(_)));
        let e = WalkLaw::build(&TailSpec::new(1.5, Family::SpectrallyPositive, 1.0).with_beta_neg(1.5))
            .unwrap_err();
        assert!(matches!(e, Error::InvalidTailSpec(_)));
    }

    #[test]
    fn fixed_start_can_be_infeasible() {
        let spec = TailSpec::new(1.5, Family::SpectrallyPositive, 1.0).with_tail_start(2);
        let e = WalkLaw::build(&spec).unwrap_err();
        assert!(matches!(e, Error::InfeasibleMeanAdjustment(_)));
    }

    #[test]
    fn second_order_rule_cancels_quadratic_term() {
        let spec = TailSpec::new(1.8, Family::TwoSidedPareto, 0.08).with_atom_rule(AtomRule::SecondOrder);
        let law = WalkLaw::build(&spec).unwrap();
        assert!(law.second_order_coefficient().abs() < 1e-15);
        // (1-phi)/(c0 psi) - 1 should then be o(theta^{2-alpha})
        let p = law.stable_params();
        let th = 1e-3;
        let r = law.one_minus_char(th).re / (p.c0 * th.powf(1.8) * (0.5 * PI * p.gamma).cos());
        assert!((r - 1.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn tail_functions_agree_with_pmf_sums() {
        for law in [
            sym(1.3, 0.5),
            WalkLaw::build(&TailSpec::new(1.5, Family::BoundedPotential, 0.15)).unwrap(),
            WalkLaw::build(&TailSpec::new(1.7, Family::LeftContinuous, 0.1)).unwrap(),
        ] {
            for x in -6..=6i64 {
                let above: f64 = (x + 1..=x + 200_000).map(|k| law.pmf(k)).sum::<f64>()
                    + law.mass_above(x + 200_000);
                assert!((above - law.mass_above(x)).abs() < 1e-13, "x={x}");
                let below: f64 = (x - 200_000..x).map(|k| law.pmf(k)).sum::<f64>()
                    + law.mass_below(x - 200_000);
                assert!((below - law.mass_below(x)).abs() < 1e-13, "x={x}");
            }
        }
    }

    #[test]
    fn summed_moments_match_closed_forms() {
        let spec = TailSpec::new(1.2, Family::TwoSidedPareto, 1.0).with_weights(0.7, 0.3);
        let law = WalkLaw::build(&spec).unwrap();
        let m = law.summed_moments();
        assert!((m.total_mass - 1.0).abs() < 1e-12);
        assert!(m.mean.abs() < 1e-12);
    }

    #[test]
    fn char_fn_matches_direct_sum() {
        let spec = TailSpec::new(1.5, Family::SpectrallyPositive, 0.15).with_beta_neg(2.5);
        let law = WalkLaw::build(&spec).unwrap();
        for &th in &[0.01, 0.4, 2.0, -1.3, PI] {
            let mut direct = Complex64::new(0.0, 0.0);
            let r = 3_000_000i64;
            for k in (-r..=r).rev() {
                let p = law.pmf(k);
                if p > 0.0 {
                    direct += Complex64::from_polar(p, th * k as f64);
                }
            }
            // remainder beyond r bounded by its mass
            let rem = law.mass_above(r) + law.mass_below(-r);
            assert!((direct - law.char_fn(th)).norm() < rem + 1e-13, "theta={th}");
        }
    }

    #[test]
    fn char_deficit_has_stable_leading_term_near_zero() {
        let laws = [
            sym(1.5, 1.0),
            WalkLaw::build(&TailSpec::new(1.8, Family::TwoSidedPareto, 0.1).with_weights(0.7, 0.3)).unwrap(),
            WalkLaw::build(&TailSpec::new(1.2, Family::SpectrallyPositive, 0.05)).unwrap(),
        ];
        for law in &laws {
            let p = law.stable_params();
            let mut prev = f64::INFINITY;
            for &th in &[1e-4f64, 1e-8, 1e-16, 1e-40] {
                let lead = Complex64::from_polar(p.c0 * th.powf(p.alpha), 0.5 * PI * p.gamma);
                let err = (law.one_minus_char(th) / lead - 1.0).norm();
                assert!(err <= prev, "theta={th}: {err}");
                prev = err;
            }
            // next-order term is relatively of size theta^{2-alpha}
            assert!(prev < 1e-40f64.powf(2.0 - p.alpha).max(1e-12), "{prev}");
            let w = law.one_minus_char(-0.3);
            assert!((w - law.one_minus_char(0.3).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let spec = TailSpec::new(1.37, Family::TwoSidedPareto, 0.3).with_weights(0.61, 0.39);
        let law = WalkLaw::build(&spec).unwrap();
        let back = WalkLaw::from_json(&law.to_json()).unwrap();
        assert_eq!(back.atoms(), law.atoms());
        assert_eq!(back.stable_params(), law.stable_params());
        assert_eq!(back.record(), law.record());
        for &th in &[0.1, 1.0, 3.0] {
            assert_eq!(back.char_fn(th), law.char_fn(th));
        }
    }

    #[test]
    fn tail_report_converges_to_scale() {
        let law = sym(1.5, 1.0);
        let rep = law.validate_tails();
        let last = rep.rows.last().unwrap();
        assert!(last.upper_deviation.abs() < 1e-6);
        assert!(last.lower_deviation.abs() < 1e-6);
    }
}
