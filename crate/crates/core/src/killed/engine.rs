//! Windowed dynamic programme for the walk killed on a set.
//!
//! The state after `n` steps is `p^n_B(x, y)` for `y` in `[-W, W]`. Each step
//! convolves with the jump law, moves the mass that lands in `B` to the
//! killed ledger and the mass that leaves the window to the escaped ledger.
//! Jumps past the window are accounted for exactly through the tail
//! functions of the law, so the ledgers bound the truncation error.

use crate::error::{Error, Result};
use crate::law::WalkLaw;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Where the walk is killed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KillingSet {
    /// Free walk.
    Empty,
    /// A finite set of sites.
    Finite(Vec<i64>),
    /// `(-inf, c]`.
    AtOrBelow(i64),
    /// `[c, +inf)`.
    AtOrAbove(i64),
}

impl KillingSet {
    pub fn finite(points: &[i64]) -> Self {
        let mut v = points.to_vec();
        v.sort_unstable();
        v.dedup();
        KillingSet::Finite(v)
    }

    pub fn contains(&self, y: i64) -> bool {
        match self {
            KillingSet::Empty => false,
            KillingSet::Finite(v) => v.binary_search(&y).is_ok(),
            KillingSet::AtOrBelow(c) => y <= *c,
            KillingSet::AtOrAbove(c) => y >= *c,
        }
    }

    /// Mirror image `-B`.
    pub fn reflected(&self) -> Self {
        match self {
            KillingSet::Empty => KillingSet::Empty,
            KillingSet::Finite(v) => KillingSet::finite(&v.iter().map(|x| -x).collect::<Vec<_>>()),
            KillingSet::AtOrBelow(c) => KillingSet::AtOrAbove(-c),
            KillingSet::AtOrAbove(c) => KillingSet::AtOrBelow(-c),
        }
    }
}

/// Totals of where the initial unit mass has gone.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Ledger {
    /// Mass currently inside the window and outside `B`.
    pub alive: f64,
    /// Mass that has entered `B` (including beyond the window when `B` is a half-line).
    pub killed: f64,
    /// Mass that has left the window without entering `B`.
    pub escaped: f64,
    /// Magnitude of negative rounding residue set to zero.
    pub clamped: f64,
}

impl Ledger {
    /// `|alive + killed + escaped - 1|`.
    pub fn defect(&self) -> f64 {
        (self.alive + self.killed + self.escaped - 1.0).abs()
    }
}

/// Convolution with the windowed jump law, shared between runs.
pub struct Propagator {
    half_width: i64,
    /// `p(j)` for `j` in `[-2W, 2W]`
    pmf: Vec<f64>,
    /// `P[X > d]` and `P[X < -d]` for `d` in `[0, 2W+1]`
    tail_up: Vec<f64>,
    tail_down: Vec<f64>,
    fft: Option<FftParts>,
}

struct FftParts {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex64>,
}

/// Below this width the convolution is done directly.
const DIRECT_LIMIT: i64 = 48;

impl Propagator {
    pub fn new(law: &WalkLaw, half_width: i64) -> Result<Self> {
        Self::with_orientation(law, half_width, false)
    }

    /// Propagator of the reversed walk `-S`, with jump law `p(-x)`.
    pub fn reversed(law: &WalkLaw, half_width: i64) -> Result<Self> {
        Self::with_orientation(law, half_width, true)
    }

    fn with_orientation(law: &WalkLaw, half_width: i64, reverse: bool) -> Result<Self> {
        if half_width < 1 {
            return Err(Error::Config(format!("window half-width {half_width} must be positive")));
        }
        let w = half_width;
        let mut pmf = law.pmf_range(-2 * w, 2 * w);
        let mut tail_up: Vec<f64> = (0..=2 * w + 1).map(|d| law.mass_above(d)).collect();
        let mut tail_down: Vec<f64> = (0..=2 * w + 1).map(|d| law.mass_below(-d)).collect();
        if reverse {
            pmf.reverse();
            std::mem::swap(&mut tail_up, &mut tail_down);
        }
        let fft = if w > DIRECT_LIMIT {
            let len = fft_length(4 * w as usize + 1);
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(len);
            let inverse = planner.plan_fft_inverse(len);
            let mut spectrum = vec![Complex64::new(0.0, 0.0); len];
            for (j, &p) in pmf.iter().enumerate() {
                spectrum[j] = Complex64::new(p, 0.0);
            }
            forward.process(&mut spectrum);
            let scale = 1.0 / len as f64;
            for s in spectrum.iter_mut() {
                *s *= scale;
            }
            Some(FftParts {
                len,
                forward,
                inverse,
                spectrum,
            })
        } else {
            None
        };
        Ok(Propagator {
            half_width,
            pmf,
            tail_up,
            tail_down,
            fft,
        })
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        (2 * self.half_width + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `out[y] = sum_z state[z] p(y - z)` over the window.
    fn convolve(&self, state: &[f64], out: &mut [f64], scratch: &mut Vec<Complex64>) {
        let w = self.half_width as usize;
        let n = 2 * w + 1;
        match &self.fft {
            None => {
                for (yi, o) in out.iter_mut().enumerate().take(n) {
                    let mut acc = 0.0;
                    for (zi, &s) in state.iter().enumerate() {
                        if s != 0.0 {
                            // jump y - z, stored at index (y - z) + 2W
                            acc += s * self.pmf[yi + 2 * w - zi];
                        }
                    }
                    *o = acc;
                }
            }
            Some(f) => {
                scratch.clear();
                scratch.resize(f.len, Complex64::new(0.0, 0.0));
                for (i, &s) in state.iter().enumerate() {
                    scratch[i] = Complex64::new(s, 0.0);
                }
                f.forward.process(scratch);
                for (s, p) in scratch.iter_mut().zip(f.spectrum.iter()) {
                    *s *= p;
                }
                f.inverse.process(scratch);
                // output index y + 3W holds the value at y
                for (yi, o) in out.iter_mut().enumerate().take(n) {
                    *o = scratch[yi + 2 * w].re;
                }
            }
        }
    }

    /// Mass that jumps from the window to above `W` and to below `-W`.
    fn outflow(&self, state: &[f64]) -> (f64, f64) {
        let w = self.half_width;
        let mut up = 0.0;
        let mut down = 0.0;
        for (i, &s) in state.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let z = i as i64 - w;
            up += s * self.tail_up[(w - z) as usize];
            down += s * self.tail_down[(w + z) as usize];
        }
        (up, down)
    }
}

fn fft_length(min: usize) -> usize {
    // smallest 2^a 3^b >= min
    let mut best = min.next_power_of_two();
    let mut p3 = 1usize;
    while p3 < best {
        let mut v = p3;
        while v < min {
            v *= 2;
        }
        best = best.min(v);
        p3 *= 3;
    }
    best
}

/// One run of the killed walk from a fixed start.
pub struct KilledWalk<'a> {
    prop: &'a Propagator,
    killing: KillingSet,
    start: i64,
    n: usize,
    state: Vec<f64>,
    next: Vec<f64>,
    scratch: Vec<Complex64>,
    /// mass entering `B` inside the window at the last step, indexed like the state
    entered: Vec<f64>,
    entered_total: f64,
    escaped_step: f64,
    ledger: Ledger,
}

impl<'a> KilledWalk<'a> {
    pub fn new(prop: &'a Propagator, killing: KillingSet, start: i64) -> Result<Self> {
        let w = prop.half_width;
        if start.abs() > w {
            return Err(Error::WindowTooSmall(format!(
                "start {start} outside window [-{w}, {w}]"
            )));
        }
        let len = prop.len();
        let mut state = vec![0.0; len];
        state[(start + w) as usize] = 1.0;
        Ok(KilledWalk {
            prop,
            killing,
            start,
            n: 0,
            state,
            next: vec![0.0; len],
            scratch: Vec::new(),
            entered: vec![0.0; len],
            entered_total: 0.0,
            escaped_step: 0.0,
            ledger: Ledger {
                alive: 1.0,
                ..Ledger::default()
            },
        })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn steps(&self) -> usize {
        self.n
    }

    pub fn half_width(&self) -> i64 {
        self.prop.half_width
    }

    /// `p^n_B(x, y)` for `y` in the window, indexed by `y + W`. At `n = 0` this
    /// is the indicator of the start even if it lies in `B`.
    pub fn values(&self) -> &[f64] {
        &self.state
    }

    pub fn value(&self, y: i64) -> f64 {
        let w = self.prop.half_width;
        if y.abs() > w {
            0.0
        } else {
            self.state[(y + w) as usize]
        }
    }

    /// `P[sigma_B = n, S_n = y]` for `y` in the window at the last step.
    pub fn entered(&self) -> &[f64] {
        &self.entered
    }

    pub fn entered_at(&self, y: i64) -> f64 {
        let w = self.prop.half_width;
        if y.abs() > w {
            0.0
        } else {
            self.entered[(y + w) as usize]
        }
    }

    /// `P[sigma_B = n]` at the last step, including entries beyond the window.
    pub fn entered_total(&self) -> f64 {
        self.entered_total
    }

    pub fn escaped_step(&self) -> f64 {
        self.escaped_step
    }

    pub fn ledger(&self) -> Ledger {
        self.ledger
    }

    /// Advance one step.
    pub fn step(&mut self) {
        let w = self.prop.half_width;
        // the state at n = 0 may sit in B; it moves like any other mass
        let (up, down) = self.prop.outflow(&self.state);
        self.prop.convolve(&self.state, &mut self.next, &mut self.scratch);
        let mut entered_total = 0.0;
        let mut alive = 0.0;
        let mut clamped = 0.0;
        for (i, v) in self.next.iter_mut().enumerate() {
            if *v < 0.0 {
                clamped += -*v;
                *v = 0.0;
            }
            let y = i as i64 - w;
            if self.killing.contains(y) {
                self.entered[i] = *v;
                entered_total += *v;
                *v = 0.0;
            } else {
                self.entered[i] = 0.0;
                alive += *v;
            }
        }
        let (killed_out, escaped_out) = match self.killing {
            KillingSet::AtOrBelow(c) if c >= -w => (down, up),
            KillingSet::AtOrAbove(c) if c <= w => (up, down),
            _ => (0.0, up + down),
        };
        entered_total += killed_out;
        std::mem::swap(&mut self.state, &mut self.next);
        self.n += 1;
        self.entered_total = entered_total;
        self.escaped_step = escaped_out;
        self.ledger = Ledger {
            alive,
            killed: self.ledger.killed + entered_total,
            escaped: self.ledger.escaped + escaped_out,
            clamped: self.ledger.clamped + clamped,
        };
    }

    /// Advance to step `n`.
    pub fn advance_to(&mut self, n: usize) {
        while self.n < n {
            self.step();
        }
    }
}

/// Default window half-width for horizon `n_max`.
pub fn default_half_width(alpha: f64, n_max: usize) -> i64 {
    ((8.0 * (n_max.max(1) as f64).powf(1.0 / alpha)).ceil() as i64).max(512)
}
