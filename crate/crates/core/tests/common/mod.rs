//! Independent reference computations shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, gamma_ur};

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `(C(x), S(x))` at every point of `xs` (ascending, starting at or above
/// zero), accumulated panel by panel from zero.
pub fn fresnel_quadrature(xs: &[f64]) -> Vec<(f64, f64)> {
    let cos = |t: f64| (FRAC_PI_2 * t * t).cos();
    let sin = |t: f64| (FRAC_PI_2 * t * t).sin();
    let (mut c, mut s, mut prev) = (0.0, 0.0, 0.0);
    xs.iter()
        .map(|&x| {
            c += integrate(&cos, prev, x, 1e-14);
            s += integrate(&sin, prev, x, 1e-14);
            prev = x;
            (c, s)
        })
        .collect()
}

/// Knife-edge excess loss in dB from the Fresnel–Kirchhoff integral
/// `F(v) = ∫_v^∞ exp(-iπt²/2) dt` computed by quadrature, with `v`
/// positive into the shadow.
pub fn ked_loss_quadrature(v_obstruction: f64) -> f64 {
    // ∫_v^∞ = (1/2 - C(v)) - i(1/2 - S(v)), with C, S from 0 to v.
    let c = integrate(&|t: f64| (FRAC_PI_2 * t * t).cos(), 0.0, v_obstruction, 1e-14);
    let s = integrate(&|t: f64| (FRAC_PI_2 * t * t).sin(), 0.0, v_obstruction, 1e-14);
    let re = 0.5 - c;
    let im = 0.5 - s;
    // |E/E0| = |(1+i)/2 · F(v)|
    let magnitude = ((re + im).powi(2) + (re - im).powi(2)).sqrt() / 2.0;
    -20.0 * magnitude.log10()
}

/// `Q(a, x)` in closed form for integer and half-integer `a`.
pub fn gamma_q_closed_form(a: f64, x: f64) -> Option<f64> {
    let twice = 2.0 * a;
    if twice.fract() != 0.0 || a <= 0.0 {
        return None;
    }
    // Upward recurrence Q(a+1, x) = Q(a, x) + xᵃe⁻ˣ/Γ(a+1), from Q(1, x) = e⁻ˣ
    // or Q(1/2, x) = erfc(√x).
    let (mut shape, mut q) = if a.fract() == 0.0 {
        (1.0, (-x).exp())
    } else {
        (0.5, erfc(x.sqrt()))
    };
    // term = xᵃe⁻ˣ/Γ(a+1) for the current shape.
    let mut term = if shape == 1.0 {
        x * (-x).exp()
    } else {
        (x / std::f64::consts::PI).sqrt() * (-x).exp() * 2.0
    };
    while shape < a {
        q += term;
        shape += 1.0;
        term *= x / shape;
    }
    Some(q)
}

/// Regularized `(P, Q)` from an independent implementation.
pub fn gamma_pq_reference(a: f64, x: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 1.0);
    }
    (gamma_lr(a, x), gamma_ur(a, x))
}

pub type Polygon = Vec<(f64, f64)>;

/// Clips `subject` against the convex, counter-clockwise polygon `clip`.
pub fn clip_polygon(subject: &Polygon, clip: &Polygon) -> Polygon {
    let mut output = subject.clone();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let inside = |p: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0;
        let intersect = |p: (f64, f64), q: (f64, f64)| {
            let (dx, dy) = (q.0 - p.0, q.1 - p.1);
            let (ex, ey) = (b.0 - a.0, b.1 - a.1);
            let t = (ex * (a.1 - p.1) - ey * (a.0 - p.0)) / (ex * dy - ey * dx);
            (p.0 + t * dx, p.1 + t * dy)
        };
        let input = std::mem::take(&mut output);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            match (inside(prev), inside(cur)) {
                (true, true) => output.push(cur),
                (true, false) => output.push(intersect(prev, cur)),
                (false, true) => {
                    output.push(intersect(prev, cur));
                    output.push(cur);
                }
                (false, false) => {}
            }
        }
    }
    output
}

/// Shoelace area, positive for counter-clockwise vertex order.
pub fn polygon_area(poly: &Polygon) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (x0, y0) = poly[i];
            let (x1, y1) = poly[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum::<f64>()
        / 2.0
}

/// Fraction of the room seen through the window by straight rays from the
/// BS, ignoring Fresnel clearance.
pub fn visible_fraction(room: f64, window: f64, bs_distance: f64, theta: f64) -> f64 {
    let bs = (-bs_distance, -bs_distance * theta.tan());
    let far = 10.0 * room;
    let extend = |edge: (f64, f64)| {
        let t = far / (edge.0 - bs.0);
        (bs.0 + t * (edge.0 - bs.0), bs.1 + t * (edge.1 - bs.1))
    };
    let lower = (0.0, -window / 2.0);
    let upper = (0.0, window / 2.0);
    let cone = vec![lower, extend(lower), extend(upper), upper];
    let half = room / 2.0;
    let square = vec![(0.0, -half), (room, -half), (room, half), (0.0, half)];
    polygon_area(&clip_polygon(&cone, &square)) / (room * room)
}
