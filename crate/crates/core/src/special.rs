//! Special-function kernels: Fresnel integrals and the regularized
//! incomplete gamma function.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::{Error, Result};

/// Beyond this |x| the Fresnel integrals are returned as their ±1/2 limits.
pub const FRESNEL_CLAMP: f64 = 50.0;

/// Series/continued-fraction switch point for the Fresnel integrals.
const FRESNEL_SERIES_MAX: f64 = 1.5;

const MAX_ITER: usize = 300;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Fresnel integrals `(C(x), S(x))` with `C(x) = ∫₀ˣ cos(πt²/2) dt` and
/// `S(x) = ∫₀ˣ sin(πt²/2) dt`.
///
/// Power series for `|x| ≤ 1.5`, a continued fraction for the complementary
/// complex error function above that. Odd in `x`. NaN propagates.
pub fn fresnel(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    let ax = x.abs();
    let (c, s) = if ax > FRESNEL_CLAMP {
        (0.5, 0.5)
    } else if ax <= FRESNEL_SERIES_MAX {
        fresnel_series(ax)
    } else {
        fresnel_continued_fraction(ax)
    };
    if x < 0.0 {
        (-c, -s)
    } else {
        (c, s)
    }
}

// With t = πx²/2 and p_k = t^k / k!:
//   C = x Σ_{k even} (-1)^{k/2} p_k / (2k+1)
//   S = x Σ_{k odd}  (-1)^{(k-1)/2} p_k / (2k+1)
fn fresnel_series(x: f64) -> (f64, f64) {
    let t = FRAC_PI_2 * x * x;
    let mut p = 1.0;
    let (mut c, mut s) = (0.0, 0.0);
    for k in 0..MAX_ITER {
        if k > 0 {
            p *= t / k as f64;
        }
        let term = p / (2 * k + 1) as f64;
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            c += sign * term;
        } else {
            s += sign * term;
        }
        if term < EPS * (c.abs() + s.abs()).max(EPS) && k > 2 {
            break;
        }
    }
    (x * c, x * s)
}

// Modified Lentz evaluation of the continued fraction for erfc of the
// complex argument (1-i)·√(π/4)·x, from which C and S follow directly.
fn fresnel_continued_fraction(x: f64) -> (f64, f64) {
    let pix2 = PI * x * x;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    let mut n = -1.0;
    for _ in 1..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = (a * d + b).inv();
        cc = b + a / cc;
        let del = cc * d;
        h *= del;
        if (del - 1.0).norm_sqr() < EPS * EPS {
            break;
        }
    }
    h *= Complex64::new(x, -x);
    let phase = Complex64::from_polar(1.0, 0.5 * pix2);
    let cs = Complex64::new(0.5, 0.5) * (1.0 - phase * h);
    (cs.re, cs.im)
}

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEF[0];
    let t = x + G + 0.5;
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> Result<f64> {
    gamma_pq(a, x).map(|(p, _)| p)
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    gamma_pq(a, x).map(|(_, q)| q)
}

/// Both `P(a, x)` and `Q(a, x)`. The series is used below `x = a + 1` and
/// the continued fraction for `Q` above, so the complement is never formed
/// from a value close to one.
pub fn gamma_pq(a: f64, x: f64) -> Result<(f64, f64)> {
    if !(a.is_finite() && a > 0.0) || !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "incomplete gamma needs a > 0 and x >= 0, got a={a}, x={x}"
        )));
    }
    if x == 0.0 {
        return Ok((0.0, 1.0));
    }
    if x.is_infinite() {
        return Ok((1.0, 0.0));
    }
    let prefactor = (-x + a * x.ln() - ln_gamma(a)).exp();
    if x < a + 1.0 {
        let p = (prefactor * lower_series(a, x)?).min(1.0);
        Ok((p, 1.0 - p))
    } else {
        let q = (prefactor * upper_continued_fraction(a, x)?).min(1.0);
        Ok((1.0 - q, q))
    }
}

// Σ xⁿ / (a (a+1) ... (a+n))
fn lower_series(a: f64, x: f64) -> Result<f64> {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            return Ok(sum);
        }
    }
    Err(Error::Domain(format!(
        "incomplete gamma series did not converge for a={a}, x={x}"
    )))
}

// 1 / (x+1-a - 1(1-a)/(x+3-a - 2(2-a)/(x+5-a - ...))), modified Lentz.
fn upper_continued_fraction(a: f64, x: f64) -> Result<f64> {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Domain(format!(
        "incomplete gamma continued fraction did not converge for a={a}, x={x}"
    )))
}
