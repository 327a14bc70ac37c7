//! Positivity of the norm kernels: full eigenvalue scans, the `h(y)`
//! analysis of the Yukawa kernel, and the analytic violation radius.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::grid::Grid3;
use crate::kinematics::FourVector;
use crate::potentials::{Potential, ScalarProfile, YukawaTanh};
use crate::scalar_product::{build_kernel, min_eigenvalue, KernelFlavor};
use crate::spinor::GammaSet;

/// Eigenvalues above `-POSITIVITY_TOLERANCE` count as non-negative.
pub const POSITIVITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    pub x: [f64; 3],
    pub r: f64,
    pub p_sq: f64,
    pub min_eigenvalue: f64,
}

/// Radial extent of the violation region at one `P²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialBoundary {
    pub p_sq: f64,
    pub max_violating_r: Option<f64>,
    pub min_clear_r: Option<f64>,
    pub analytic_radius: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub flavor: &'static str,
    pub potential: Value,
    pub p_sq_set: Vec<f64>,
    pub min_eigenvalue: f64,
    pub argmin: ScanPoint,
    pub violation_set: Vec<ScanPoint>,
    /// Largest analytic radius over the scanned `P²`, when one is defined.
    pub analytic_radius: Option<f64>,
    pub boundaries: Vec<RadialBoundary>,
    pub passed: bool,
}

/// Analytic violation radius of the potential at `P²`, when it has one.
fn analytic_radius_of(potential: &dyn Potential, p_sq: f64) -> Option<f64> {
    if potential.name() != "yukawa_tanh" {
        return None;
    }
    let params = potential.record();
    let get = |k: &str| params.get(k).and_then(Value::as_f64);
    let (g1, g2, mu) = (get("g1")?, get("g2")?, get("mu")?);
    violation_radius(g1, g2, mu, p_sq.sqrt()).ok()
}

/// Smallest eigenvalue of the kernel's quadratic form at every grid point.
pub fn eigenvalue_map(
    flavor: &dyn KernelFlavor,
    potential: &dyn Potential,
    p_sq: f64,
    grid: &Grid3,
    gammas: &GammaSet,
) -> Result<Vec<ScanPoint>> {
    if !(p_sq > 0.0) {
        return Err(Error::Domain(format!("P^2 must be positive, got {p_sq}")));
    }
    let total = FourVector::at_rest(p_sq.sqrt());
    let kernel = build_kernel(flavor, potential, &total, grid, gammas)?;
    Ok((0..grid.points())
        .into_par_iter()
        .map(|idx| ScanPoint {
            x: grid.position(idx),
            r: grid.radius_sq(idx).sqrt(),
            p_sq,
            min_eigenvalue: kernel.min_form_eigenvalue_at(idx),
        })
        .collect())
}

/// Writes scan points as `x,y,z,r,p_sq,min_eigenvalue` rows.
pub fn write_csv<W: std::io::Write>(points: &[ScanPoint], mut out: W) -> std::io::Result<()> {
    writeln!(out, "x,y,z,r,p_sq,min_eigenvalue")?;
    for p in points {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            p.x[0], p.x[1], p.x[2], p.r, p.p_sq, p.min_eigenvalue
        )?;
    }
    Ok(())
}

/// Dense eigensolve of the kernel's quadratic form at every grid point and
/// every `P²`, reduced in a fixed order.
pub fn scan(
    flavor: &dyn KernelFlavor,
    potential: &dyn Potential,
    p_sq_set: &[f64],
    grid: &Grid3,
    gammas: &GammaSet,
) -> Result<PositivityReport> {
    if p_sq_set.is_empty() {
        return Err(Error::params("positivity scan", "empty P^2 set"));
    }
    let mut points = Vec::new();
    let mut boundaries = Vec::new();
    for &p_sq in p_sq_set {
        let values = eigenvalue_map(flavor, potential, p_sq, grid, gammas)?;
        let violating = |p: &&ScanPoint| p.min_eigenvalue < -POSITIVITY_TOLERANCE;
        boundaries.push(RadialBoundary {
            p_sq,
            max_violating_r: values.iter().filter(violating).map(|p| p.r).reduce(f64::max),
            min_clear_r: values.iter().filter(|p| !violating(p)).map(|p| p.r).reduce(f64::min),
            analytic_radius: analytic_radius_of(potential, p_sq),
        });
        points.extend(values);
    }
    let argmin = *points
        .iter()
        .reduce(|best, p| {
            if p.min_eigenvalue < best.min_eigenvalue {
                p
            } else {
                best
            }
        })
        .expect("grid has points");
    let violation_set: Vec<ScanPoint> = points
        .iter()
        .filter(|p| p.min_eigenvalue < -POSITIVITY_TOLERANCE)
        .copied()
        .collect();
    let analytic_radius = boundaries.iter().filter_map(|b| b.analytic_radius).reduce(f64::max);
    Ok(PositivityReport {
        flavor: flavor.name(),
        potential: potential.record(),
        p_sq_set: p_sq_set.to_vec(),
        min_eigenvalue: argmin.min_eigenvalue,
        argmin,
        passed: violation_set.is_empty(),
        violation_set,
        analytic_radius,
        boundaries,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Plus,
    Minus,
}

/// `1 - tanh²(-y) ± 2y / cosh²(-y)`, the two eigenvalue branches of the
/// Sazdjian form for the Yukawa kernel.
pub fn h_function(y: f64, branch: Branch) -> f64 {
    let t = (-y).tanh();
    let c = (-y).cosh();
    let s = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    1.0 - t * t + s * 2.0 * y / (c * c)
}

/// `(1 ± 2y) / cosh² y`
pub fn h_function_simplified(y: f64, branch: Branch) -> f64 {
    let c = y.cosh();
    let s = match branch {
        Branch::Plus => 1.0,
        Branch::Minus => -1.0,
    };
    (1.0 + s * 2.0 * y) / (c * c)
}

/// Root of `r e^{μr} = g₁g₂/(4π|P⁰|)`; zero for non-positive coupling.
pub fn violation_radius(g1: f64, g2: f64, mu: f64, p0: f64) -> Result<f64> {
    if p0 == 0.0 || !p0.is_finite() {
        return Err(Error::Domain(format!("P0 must be nonzero, got {p0}")));
    }
    if !(mu >= 0.0) {
        return Err(Error::Domain(format!("mu must be non-negative, got {mu}")));
    }
    let rhs = g1 * g2 / (4.0 * PI * p0.abs());
    if !(rhs > 0.0) {
        return Ok(0.0);
    }
    let f = |r: f64| r * (mu * r).exp() - rhs;
    // r e^{μr} ≥ r, so the root lies in (0, rhs]
    let (mut lo, mut hi) = (0.0, rhs);
    while hi - lo > 1e-12 * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Root in `r` of the smallest eigenvalue of a kernel's form, found by
/// bisection between a violating inner radius and a clear outer one.
pub fn kernel_boundary_radius(
    flavor: &dyn KernelFlavor,
    potential: &dyn Potential,
    total: &FourVector,
    gammas: &GammaSet,
    r_inner: f64,
    r_outer: f64,
) -> Result<f64> {
    let min_at = |r: f64| -> Result<f64> {
        let q = flavor.form_coefficients(potential, -r * r, total)?;
        Ok(min_eigenvalue(&q.matrix(gammas)))
    };
    let (mut lo, mut hi) = (r_inner, r_outer);
    if !(min_at(lo)? < 0.0 && min_at(hi)? > 0.0) {
        return Err(Error::Domain(format!(
            "no sign change of the kernel's smallest eigenvalue on [{r_inner}, {r_outer}]"
        )));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if min_at(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Yukawa radius as seen from the potential record.
pub fn yukawa_radius(potential: &YukawaTanh, p0: f64) -> Result<f64> {
    violation_radius(potential.g1, potential.g2, potential.mu, p0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScalarBound {
    pub samples: usize,
    pub s_max: f64,
    pub sup_abs: f64,
    /// `sup |f| ≤ 1`
    pub within_closed_bound: bool,
    /// `sup |f| < 1`
    pub within_open_bound: bool,
}

impl ScalarBound {
    pub fn passed(&self) -> bool {
        self.within_closed_bound
    }
}

/// Samples `|f(s)|` for `s = -x⊥²` uniformly on `[0, s_max]`.
pub fn scalar_bound_check(profile: &dyn ScalarProfile, s_max: f64, samples: usize) -> Result<ScalarBound> {
    if !(s_max > 0.0) || samples < 2 {
        return Err(Error::params(
            "scalar bound",
            "needs s_max > 0 and at least two samples",
        ));
    }
    let sup = (0..samples)
        .map(|i| profile.profile(s_max * i as f64 / (samples - 1) as f64).abs())
        .fold(0.0, f64::max);
    Ok(ScalarBound {
        samples,
        s_max,
        sup_abs: sup,
        within_closed_bound: sup <= 1.0,
        within_open_bound: sup < 1.0,
    })
}
