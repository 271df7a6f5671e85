//! Special functions: Gamma, Riemann and Hurwitz zeta, and the polylogarithm
//! on the unit circle.
//!
//! Every Gamma value used anywhere in the crate goes through [`gamma`] so that
//! all constants share a single source.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if x == x.trunc() {
        return 0.0;
    }
    let r = x.rem_euclid(2.0);
    // r in [0, 2)
    let (y, sign) = if r > 1.0 { (r - 1.0, -1.0) } else { (r, 1.0) };
    let y = if y > 0.5 { 1.0 - y } else { y };
    sign * (PI * y).sin()
}

/// `cos(pi x)` with exact zeros at the half integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// Gamma function (Lanczos approximation with reflection).
pub fn gamma(x: f64) -> f64 {
    if x == x.trunc() && x <= 0.0 {
        return f64::NAN;
    }
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma(1.0 - x));
    }
    if x == x.trunc() && x < 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let a = lanczos_sum(z);
    if x > 140.0 {
        return ln_gamma(x).exp();
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// `ln |Gamma(x)|`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / sin_pi(x).abs()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// `B_{2j}/(2j)!` for j = 1..=13.
const BERNOULLI_OVER_FACT: [f64; 13] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
    -174_611.0 / 330.0 / 2_432_902_008_176_640_000.0,
    854_513.0 / 138.0 / 1.124_000_727_777_607_7e21,
    -236_364_091.0 / 2730.0 / 6.204_484_017_332_394e23,
    8_553_103.0 / 6.0 / 4.032_914_611_266_056_3e26,
];

/// Hurwitz zeta `sum_{k>=0} (k+a)^{-s}`, analytically continued in `s`.
///
/// Valid for real `s != 1`, `s > -4` and `a > 0` (Euler-Maclaurin).
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(a > 0.0, "hurwitz_zeta needs a > 0");
    assert!(s != 1.0, "hurwitz_zeta has a pole at s = 1");
    let target = if s < 0.0 { 12.0 - s } else { 24.0 + s };
    let n = if a >= target { 0 } else { (target - a).ceil() as usize };
    let mut head = 0.0;
    // sum small terms first
    for k in (0..n).rev() {
        head += (a + k as f64).powf(-s);
    }
    let b = a + n as f64;
    let bs = b.powf(-s);
    let mut tail = b * bs / (s - 1.0) + 0.5 * bs;
    // rising factorial s (s+1) ... (s+2j-2) times b^{-s-2j+1}
    let mut rising = s;
    let mut pw = bs / b;
    let b2 = b * b;
    for (j, c) in BERNOULLI_OVER_FACT.iter().enumerate() {
        let term = c * rising * pw;
        tail += term;
        if term.abs() < 1e-18 * tail.abs() {
            break;
        }
        let m = 2.0 * j as f64 + 1.0;
        rising *= (s + m) * (s + m + 1.0);
        pw /= b2;
    }
    head + tail
}

/// Riemann zeta for real `s != 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    if s == 0.0 {
        return -0.5;
    }
    if s >= -1.0 {
        return hurwitz_zeta(s, 1.0);
    }
    // functional equation
    let t = 1.0 - s;
    let sn = sin_pi(s / 2.0);
    if sn == 0.0 {
        return 0.0;
    }
    let log_mag = s * 2f64.ln() + (s - 1.0) * PI.ln() + ln_gamma(t);
    sn * log_mag.exp() * hurwitz_zeta(t, 1.0)
}

/// Harmonic number `H_m`.
pub fn harmonic(m: u32) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

/// Reduce an angle to `[-pi, pi]`.
pub fn reduce_angle(theta: f64) -> f64 {
    if (-PI..=PI).contains(&theta) {
        return theta;
    }
    let r = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if r < -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

const POLYLOG_TERMS: usize = 72;

/// `Li_s(e^{i theta})` for a fixed real order `s > 1`, evaluated through the
/// expansion around `theta = 0`, valid on `|theta| <= pi`.
#[derive(Clone, Debug)]
pub struct UnitPolylog {
    s: f64,
    zeta_s: f64,
    /// Integer order `m` when `s == m`.
    integer: Option<u32>,
    gamma_one_minus_s: f64,
    /// `zeta(s-k)/k!`, with the pole term set to zero for integer orders.
    coef: Vec<f64>,
}

impl UnitPolylog {
    pub fn new(s: f64) -> Self {
        assert!(s > 1.0, "polylog order must exceed 1");
        let integer = if s == s.trunc() { Some(s as u32) } else { None };
        let mut coef = Vec::with_capacity(POLYLOG_TERMS);
        let mut fact = 1.0;
        for k in 0..POLYLOG_TERMS {
            if k > 0 {
                fact *= k as f64;
            }
            let sk = s - k as f64;
            if integer.is_some() && sk == 1.0 {
                coef.push(0.0);
            } else {
                coef.push(riemann_zeta(sk) / fact);
            }
        }
        let gamma_one_minus_s = if integer.is_some() { 0.0 } else { gamma(1.0 - s) };
        UnitPolylog {
            s,
            zeta_s: riemann_zeta(s),
            integer,
            gamma_one_minus_s,
            coef,
        }
    }

    pub fn order(&self) -> f64 {
        self.s
    }

    /// `Li_s(1) = zeta(s)`.
    pub fn at_one(&self) -> f64 {
        self.zeta_s
    }

    /// `Li_s(e^{i theta})`.
    pub fn value(&self, theta: f64) -> Complex64 {
        Complex64::new(self.zeta_s, 0.0) - self.deficit(theta)
    }

    /// `Li_s(1) - Li_s(e^{i theta})`, free of cancellation near zero.
    pub fn deficit(&self, theta: f64) -> Complex64 {
        self.deficit_from(theta, 1)
    }

    /// The deficit with its linear term `-zeta(s-1) i theta` removed.
    pub fn deficit_centered(&self, theta: f64) -> Complex64 {
        self.deficit_from(theta, 3)
    }

    fn deficit_from(&self, theta: f64, first_odd: usize) -> Complex64 {
        let th = reduce_angle(theta);
        if th == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        // analytic part: sum_{k>=1} c_k (i th)^k, split into even / odd k
        let t2 = th * th;
        let mut even = 0.0;
        let mut odd = 0.0;
        let last = POLYLOG_TERMS - 1;
        let mut k = if last % 2 == 0 { last } else { last - 1 };
        while k >= 2 {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            even = even * t2 + sign * self.coef[k];
            k -= 2;
        }
        even *= t2;
        let mut k = if last % 2 == 1 { last } else { last - 1 };
        loop {
            let sign = if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
            odd = odd * t2 + sign * self.coef[k];
            if k == first_odd {
                break;
            }
            k -= 2;
        }
        odd *= th.powi(first_odd as i32);
        let analytic = Complex64::new(even, odd);
        let singular = match self.integer {
            None => {
                // Gamma(1-s) (-i th)^{s-1}
                let mag = self.gamma_one_minus_s * th.abs().powf(self.s - 1.0);
                let ph = -0.5 * PI * (self.s - 1.0) * th.signum();
                Complex64::from_polar(mag, ph)
            }
            Some(m) => {
                // (i th)^{m-1}/(m-1)! (H_{m-1} - ln(-i th))
                let mu = Complex64::new(0.0, th);
                let mut pw = Complex64::new(1.0, 0.0);
                let mut fact = 1.0;
                for j in 1..m {
                    pw *= mu;
                    fact *= j as f64;
                }
                let ln_neg_mu = Complex64::new(th.abs().ln(), -0.5 * PI * th.signum());
                pw / fact * (Complex64::new(harmonic(m - 1), 0.0) - ln_neg_mu)
            }
        };
        -(singular + analytic)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn gamma_known_values() {
        let sqrt_pi = PI.sqrt();
        assert!(close(gamma(0.5), sqrt_pi, 1e-14));
        assert!(close(gamma(1.5), sqrt_pi / 2.0, 1e-14));
        assert!(close(gamma(-0.5), -2.0 * sqrt_pi, 1e-14));
        assert!(close(gamma(1.0 / 3.0), 2.678_938_534_707_747_6, 1e-14));
        assert!(close(gamma(10.0), 362_880.0, 1e-15));
        assert!(close(gamma(0.1), 9.513_507_698_668_731_8, 1e-14));
        assert!(close(gamma(-1.5), 4.0 * sqrt_pi / 3.0, 1e-14));
        assert!(close(ln_gamma(50.5), gamma(50.5).ln(), 1e-14));
        assert!(gamma(-2.0).is_nan());
    }

    #[test]
    fn gamma_recurrence_holds() {
        for i in 1..200 {
            let x = -3.7 + 0.053 * i as f64;
            if (x - x.round()).abs() < 1e-9 {
                continue;
            }
            let lhs = gamma(x + 1.0);
            let rhs = x * gamma(x);
            assert!((lhs - rhs).abs() <= 3e-14 * lhs.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn zeta_known_values() {
        assert!(close(riemann_zeta(2.0), PI * PI / 6.0, 1e-15));
        assert!(close(riemann_zeta(3.0), 1.202_056_903_159_594_3, 1e-15));
        assert!(close(riemann_zeta(0.5), -1.460_354_508_809_586_8, 1e-14));
        assert!(close(riemann_zeta(-0.5), -0.207_886_224_977_354_57, 1e-13));
        assert!(close(riemann_zeta(-1.0), -1.0 / 12.0, 1e-14));
        assert!(close(riemann_zeta(-3.0), 1.0 / 120.0, 1e-13));
        assert_eq!(riemann_zeta(-4.0), 0.0);
        assert!(close(riemann_zeta(-7.5), 0.003_269_039_572_600_22, 1e-12));
        assert!(close(hurwitz_zeta(2.0, 0.5), PI * PI / 2.0, 1e-14));
    }

    #[test]
    fn hurwitz_matches_direct_sums() {
        for &s in &[1.3, 2.2, 2.5, 3.7] {
            for &a in &[1.0, 2.0, 3.5, 1000.0] {
                let direct: f64 = (0..200).map(|k| (a + k as f64).powf(-s)).sum::<f64>()
                    + hurwitz_zeta(s, a + 200.0);
                assert!(close(hurwitz_zeta(s, a), direct, 1e-14));
            }
        }
        // shift identity zeta(s, a) = a^{-s} + zeta(s, a + 1) in the continued range
        for &s in &[0.3, 0.5, 0.8, -0.5] {
            let lhs = hurwitz_zeta(s, 2.0);
            let rhs = 2f64.powf(-s) + hurwitz_zeta(s, 3.0);
            assert!(close(lhs, rhs, 1e-13), "s={s}");
        }
    }

    #[test]
    fn zeta_functional_equation_is_continuous_at_switch() {
        let a = riemann_zeta(-1.0 - 1e-9);
        let b = riemann_zeta(-1.0 + 1e-9);
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn dilog_real_part_closed_form() {
        let li = UnitPolylog::new(2.0);
        for i in 1..40 {
            let th = 0.08 * i as f64;
            let z = li.value(th);
            let expect = PI * PI / 6.0 - th * (2.0 * PI - th) / 4.0;
            assert!((z.re - expect).abs() < 1e-13, "theta={th}");
        }
    }

    #[test]
    fn trilog_imag_part_closed_form() {
        let li = UnitPolylog::new(3.0);
        for i in 1..40 {
            let th = 0.078 * i as f64;
            let z = li.value(th);
            let expect = PI * PI * th / 6.0 - PI * th * th / 4.0 + th.powi(3) / 12.0;
            assert!((z.im - expect).abs() < 1e-13, "theta={th}");
            let zm = li.value(-th);
            assert!((zm.im + expect).abs() < 1e-13);
        }
    }

    #[test]
    fn fractional_order_matches_direct_series() {
        let s = 2.5;
        let li = UnitPolylog::new(s);
        for &th in &[0.3, 1.1, 2.9, -0.7] {
            let n = 400_000;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in (1..=n).rev() {
                let kf = k as f64;
                acc += Complex64::from_polar(kf.powf(-s), th * kf);
            }
            let z = li.value(th);
            assert!((z - acc).norm() < 1e-7, "theta={th} {z} {acc}");
        }
    }

    #[test]
    fn centered_deficit_drops_linear_term() {
        for &s in &[2.5, 3.0, 4.2] {
            let li = UnitPolylog::new(s);
            for &th in &[1e-3f64, 0.4, 2.0, -1.1] {
                let lin = Complex64::new(0.0, riemann_zeta(s - 1.0) * th);
                let d = li.deficit(th) + lin - li.deficit_centered(th);
                assert!(d.norm() < 1e-14, "s={s} th={th}: {d}");
            }
        }
    }

    #[test]
    fn deficit_is_small_near_zero() {
        let s = 2.4;
        let li = UnitPolylog::new(s);
        let th = 1e-6;
        let d = li.deficit(th);
        // -Gamma(1-s)(-i theta)^{s-1} - zeta(s-1) i theta
        let sing = Complex64::from_polar(gamma(1.0 - s) * th.powf(s - 1.0), -0.5 * PI * (s - 1.0));
        let lead = -sing - Complex64::new(0.0, riemann_zeta(s - 1.0) * th);
        assert!((d - lead).norm() < 1e-11);
    }
}
