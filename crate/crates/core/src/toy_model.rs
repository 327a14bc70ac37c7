//! A two-dimensional indefinite-metric model: `⟨v, w⟩_A = v†Aw` with
//! `A = diag(1, -1)` and evolution generated by `B = [[0, i], [-i, 0]]`.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::Serialize;

pub type C2 = Vector2<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn metric_a() -> Matrix2<Complex64> {
    Matrix2::new(ONE, ZERO, ZERO, -ONE)
}

pub fn generator_b() -> Matrix2<Complex64> {
    Matrix2::new(ZERO, I, -I, ZERO)
}

/// `v†Aw`
pub fn a_product(v: &C2, w: &C2) -> Complex64 {
    v.dotc(&(metric_a() * w))
}

/// `v = 0` or `⟨v, v⟩_A > 0`.
pub fn in_h_pos(v: &C2) -> bool {
    v.iter().all(|z| *z == ZERO) || a_product(v, v).re > 0.0
}

/// `u(t) = cos t u₀ - i sin t B u₀`
pub fn evolve(u0: &C2, t: f64) -> C2 {
    u0 * Complex64::new(t.cos(), 0.0) - generator_b() * u0 * (I * t.sin())
}

/// `(|a|² - |b|²)(cos²t - sin²t) + 4 Re(a*b) cos t sin t`
pub fn evolved_norm(a: Complex64, b: Complex64, t: f64) -> f64 {
    let (c, s) = (t.cos(), t.sin());
    (a.norm_sqr() - b.norm_sqr()) * (c * c - s * s) + 4.0 * (a.conj() * b).re * c * s
}

/// `B†A - AB`; nonzero means `B` is not symmetric for `⟨·,·⟩_A`.
pub fn a_symmetry_defect() -> f64 {
    let a = metric_a();
    let b = generator_b();
    (b.adjoint() * a - a * b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BreakdownSample {
    pub a: Complex64,
    pub b: Complex64,
    pub at_quarter: f64,
    pub at_three_quarters: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BreakdownReport {
    pub samples: usize,
    pub skipped: usize,
    pub survivors: Vec<BreakdownSample>,
    pub max_closed_form_error: f64,
}

/// Evaluates `u(t)†Au(t)` at `t = π/4` and `t = 3π/4` for each `u₀ = (a, b)`
/// with `|a| > |b|` and collects those positive at both times.
pub fn positivity_breakdown_search(samples: &[(Complex64, Complex64)]) -> BreakdownReport {
    use std::f64::consts::FRAC_PI_4;
    let mut survivors = Vec::new();
    let mut skipped = 0;
    let mut max_err: f64 = 0.0;
    for &(a, b) in samples {
        if a.norm() <= b.norm() {
            skipped += 1;
            continue;
        }
        let u0 = C2::new(a, b);
        let at = |t: f64| {
            let closed = evolved_norm(a, b, t);
            let direct = a_product(&evolve(&u0, t), &evolve(&u0, t)).re;
            (closed, (closed - direct).abs())
        };
        let (q, e1) = at(FRAC_PI_4);
        let (tq, e2) = at(3.0 * FRAC_PI_4);
        max_err = max_err.max(e1).max(e2);
        if q > 0.0 && tq > 0.0 {
            survivors.push(BreakdownSample {
                a,
                b,
                at_quarter: q,
                at_three_quarters: tq,
            });
        }
    }
    BreakdownReport {
        samples: samples.len(),
        skipped,
        survivors,
        max_closed_form_error: max_err,
    }
}

/// `side²` samples `(1, ρe^{iφ})` with `ρ` spread over `(0, 1)` and `φ` over
/// `[0, 2π)`. The sign of the evolved norm is unchanged by rescaling `u₀` or
/// multiplying it by a phase, so this covers every ratio `b/a` with `|b| < |a|`.
pub fn sample_grid(side: usize) -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::with_capacity(side * side);
    for i in 0..side {
        let rho = (i as f64 + 0.5) / side as f64;
        for j in 0..side {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / side as f64;
            out.push((Complex64::new(1.0, 0.0), Complex64::from_polar(rho, phi)));
        }
    }
    out
}
