//! Equal-time inner products on the c.m. hypersurface `x⁰ = 0`.
//!
//! Every kernel implemented here is pointwise of the form `α·1 + β·γ₁⁰γ₂⁰`
//! with real `α`, `β`, so it is stored as two coefficients per grid point.
//! A flavor also fixes the conjugation of its bilinear form: with the Dirac
//! adjoint `φ̄ = φ†γ₁⁰γ₂⁰` the quadratic form is `φ†(γ₁⁰γ₂⁰K)φ`, otherwise
//! it is `φ†Kφ`.

use std::fmt;
use std::sync::OnceLock;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid3;
use crate::kinematics::FourVector;
use crate::operators::InternalField;
use crate::potentials::Potential;
use crate::registry::{parse_params, Registry};
use crate::spinor::{act1, act2, GammaSet, Spinor16, TwoBodySpinOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjugation {
    /// `φ̄ K φ` with `φ̄ = φ†γ₁⁰γ₂⁰`
    DiracAdjoint,
    /// `φ† K φ`
    Hermitian,
}

/// Coefficients `(α, β)` of `α·1 + β·γ₁⁰γ₂⁰`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BetaPair {
    pub identity: f64,
    pub beta: f64,
}

impl BetaPair {
    pub fn matrix(&self, gammas: &GammaSet) -> TwoBodySpinOp {
        TwoBodySpinOp::identity() * self.identity + gammas.beta_product() * self.beta
    }

    /// `γ₁⁰γ₂⁰ (α + βγ₁⁰γ₂⁰) = β + αγ₁⁰γ₂⁰`.
    pub fn premultiplied_by_beta(&self) -> Self {
        Self {
            identity: self.beta,
            beta: self.identity,
        }
    }

    /// `γ₁⁰γ₂⁰` squares to one with eigenvalues `±1` (eight each).
    pub fn min_eigenvalue(&self) -> f64 {
        self.identity - self.beta.abs()
    }
}

pub trait KernelFlavor: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn conjugation(&self) -> Conjugation;

    /// Kernel coefficients at one point in the c.m. frame.
    fn coefficients(&self, potential: &dyn Potential, x_perp_sq: f64, total: &FourVector) -> Result<BetaPair>;

    /// Coefficients of the Hermitian matrix `Q` with form `φ†Qφ`.
    fn form_coefficients(&self, potential: &dyn Potential, x_perp_sq: f64, total: &FourVector) -> Result<BetaPair> {
        let k = self.coefficients(potential, x_perp_sq, total)?;
        Ok(match self.conjugation() {
            Conjugation::DiracAdjoint => k.premultiplied_by_beta(),
            Conjugation::Hermitian => k,
        })
    }
}

/// `K = γ₁⁰γ₂⁰`, the free Dirac density.
#[derive(Clone, Copy, Debug, Default)]
pub struct FreeKernel;

impl KernelFlavor for FreeKernel {
    fn name(&self) -> &'static str {
        "free"
    }
    fn conjugation(&self) -> Conjugation {
        Conjugation::DiracAdjoint
    }
    fn coefficients(&self, _: &dyn Potential, _: f64, _: &FourVector) -> Result<BetaPair> {
        Ok(BetaPair {
            identity: 0.0,
            beta: 1.0,
        })
    }
}

/// `K = γ₁⁰γ₂⁰ - V γ₁⁰γ₂⁰ V + 4(P⁰)² ∂V/∂(P²)` for scalar `V`.
#[derive(Clone, Copy, Debug, Default)]
pub struct SazdjianKernel;

impl KernelFlavor for SazdjianKernel {
    fn name(&self) -> &'static str {
        "sazdjian"
    }
    fn conjugation(&self) -> Conjugation {
        Conjugation::DiracAdjoint
    }
    fn coefficients(&self, potential: &dyn Potential, x_perp_sq: f64, total: &FourVector) -> Result<BetaPair> {
        let p_sq = total.square();
        let v = potential.value(x_perp_sq, p_sq)?;
        let dv = potential.d_value_d_p_sq(x_perp_sq, p_sq)?;
        Ok(BetaPair {
            identity: 4.0 * total.t * total.t * dv,
            beta: 1.0 - v * v,
        })
    }
}

/// `K̃ = 1 - 4P² γ₁⁰γ₂⁰ ∂Δ/∂(P²)` with `Δ = artanh V`, used with `φ̃†`.
#[derive(Clone, Copy, Debug, Default)]
pub struct CraterKernel;

impl KernelFlavor for CraterKernel {
    fn name(&self) -> &'static str {
        "crater"
    }
    fn conjugation(&self) -> Conjugation {
        Conjugation::Hermitian
    }
    fn coefficients(&self, potential: &dyn Potential, x_perp_sq: f64, total: &FourVector) -> Result<BetaPair> {
        let p_sq = total.square();
        let dd = potential.d_delta_d_p_sq(x_perp_sq, p_sq)?;
        Ok(BetaPair {
            identity: 1.0,
            beta: -4.0 * p_sq * dd,
        })
    }
}

pub fn flavors() -> &'static Registry<dyn KernelFlavor> {
    static REG: OnceLock<Registry<dyn KernelFlavor>> = OnceLock::new();
    REG.get_or_init(|| {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Empty {}
        let mut reg: Registry<dyn KernelFlavor> = Registry::new("kernel flavor");
        reg.register("free", |p| {
            parse_params::<Empty>("free", p)?;
            Ok(Box::new(FreeKernel))
        });
        reg.register("sazdjian", |p| {
            parse_params::<Empty>("sazdjian", p)?;
            Ok(Box::new(SazdjianKernel))
        });
        reg.register("crater", |p| {
            parse_params::<Empty>("crater", p)?;
            Ok(Box::new(CraterKernel))
        });
        reg
    })
}

pub fn flavor(name: &str) -> Result<Box<dyn KernelFlavor>> {
    flavors().build(name, &serde_json::Value::Null)
}

/// A norm kernel sampled on a grid at fixed c.m. total momentum.
#[derive(Clone, Debug)]
pub struct NormKernel {
    flavor: &'static str,
    conjugation: Conjugation,
    total: FourVector,
    grid: Grid3,
    gammas: GammaSet,
    coefficients: Vec<BetaPair>,
}

pub fn build_kernel(
    flavor: &dyn KernelFlavor,
    potential: &dyn Potential,
    total: &FourVector,
    grid: &Grid3,
    gammas: &GammaSet,
) -> Result<NormKernel> {
    if !total.is_at_rest() {
        return Err(Error::NotCenterOfMass(total.spatial()));
    }
    if !total.is_timelike() {
        return Err(Error::Domain(format!("total momentum {total:?} is not timelike")));
    }
    let coefficients = (0..grid.points())
        .map(|idx| flavor.coefficients(potential, -grid.radius_sq(idx), total))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormKernel {
        flavor: flavor.name(),
        conjugation: flavor.conjugation(),
        total: *total,
        grid: *grid,
        gammas: gammas.clone(),
        coefficients,
    })
}

impl NormKernel {
    pub fn flavor(&self) -> &'static str {
        self.flavor
    }

    pub fn total(&self) -> FourVector {
        self.total
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn conjugation(&self) -> Conjugation {
        self.conjugation
    }

    pub fn coefficients(&self) -> &[BetaPair] {
        &self.coefficients
    }

    /// `K(𝐱)` at grid point `idx`.
    pub fn matrix_at(&self, idx: usize) -> TwoBodySpinOp {
        self.coefficients[idx].matrix(&self.gammas)
    }

    /// The Hermitian form matrix `Q(𝐱)` at grid point `idx`.
    pub fn form_matrix_at(&self, idx: usize) -> TwoBodySpinOp {
        self.form_pair(idx).matrix(&self.gammas)
    }

    fn form_pair(&self, idx: usize) -> BetaPair {
        let k = self.coefficients[idx];
        match self.conjugation {
            Conjugation::DiracAdjoint => k.premultiplied_by_beta(),
            Conjugation::Hermitian => k,
        }
    }

    /// Smallest eigenvalue of `Q(𝐱)` from a dense Hermitian eigensolve.
    pub fn min_form_eigenvalue_at(&self, idx: usize) -> f64 {
        min_eigenvalue(&self.form_matrix_at(idx))
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        (0..self.grid.points())
            .map(|idx| self.matrix_at(idx).hermiticity_defect())
            .fold(0.0, f64::max)
    }

    /// `(x, y, z, r, min eigenvalue of Q)` per grid point.
    pub fn eigenvalue_rows(&self) -> Vec<[f64; 5]> {
        (0..self.grid.points())
            .map(|idx| {
                let x = self.grid.position(idx);
                let r = self.grid.radius_sq(idx).sqrt();
                [x[0], x[1], x[2], r, self.min_form_eigenvalue_at(idx)]
            })
            .collect()
    }
}

/// Smallest eigenvalue of a Hermitian 16x16 operator.
pub fn min_eigenvalue(op: &TwoBodySpinOp) -> f64 {
    let h = (op.0 + op.0.adjoint()) * Complex64::new(0.5, 0.0);
    SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// The field on the `x⁰ = 0` slice: the sum of its relative-energy modes.
fn equal_time_points(field: &InternalField) -> Vec<Spinor16> {
    let mut points = field.modes()[0].chi.to_points();
    for mode in &field.modes()[1..] {
        for (acc, v) in points.iter_mut().zip(mode.chi.to_points()) {
            *acc += v;
        }
    }
    points
}

fn same_setting(a: &InternalField, b: &InternalField) -> Result<()> {
    a.grid().ensure_same(b.grid())?;
    if a.total() != b.total() {
        return Err(Error::MomentumMismatch(format!("{:?} vs {:?}", a.total(), b.total())));
    }
    Ok(())
}

/// `Σ φ_a†φ_b h³` on the equal-time slice.
pub fn free_inner_product(a: &InternalField, b: &InternalField) -> Result<Complex64> {
    same_setting(a, b)?;
    let pa = equal_time_points(a);
    let pb = equal_time_points(b);
    let sum: Complex64 = pa.iter().zip(&pb).map(|(x, y)| x.dotc(y)).sum();
    Ok(sum * a.grid().cell_volume())
}

/// `Σ φ_a† Q φ_b h³` with the kernel's conjugation convention.
pub fn interacting_inner_product(kernel: &NormKernel, a: &InternalField, b: &InternalField) -> Result<Complex64> {
    same_setting(a, b)?;
    kernel.grid.ensure_same(a.grid())?;
    if kernel.total != a.total() {
        return Err(Error::MomentumMismatch(format!(
            "kernel built at {:?}, fields at {:?}; cross-momentum products need the regulated path",
            kernel.total,
            a.total()
        )));
    }
    let g0 = kernel.gammas.gamma(0)?;
    let pa = equal_time_points(a);
    let pb = equal_time_points(b);
    let mut sum = Complex64::new(0.0, 0.0);
    for (idx, (x, y)) in pa.iter().zip(&pb).enumerate() {
        let q = kernel.form_pair(idx);
        let beta_y = act1(g0, &act2(g0, y));
        sum += x.dotc(y) * q.identity + x.dotc(&beta_y) * q.beta;
    }
    Ok(sum * a.grid().cell_volume())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceCondition {
    /// `Tr(γ₁.n γ₂.n V)` over all 16 components, `n = P/√P²`.
    pub raw_trace: Complex64,
    /// `raw_trace / 4`
    pub literal: f64,
    /// `(1/4)` times the trace normalized to `Tr 1 = 4`, i.e. `raw_trace / 16`.
    pub value: f64,
    /// `value < 1`
    pub satisfied: bool,
    /// `literal < 1`
    pub literal_satisfied: bool,
}

pub fn trace_condition(v: &TwoBodySpinOp, total: &FourVector, gammas: &GammaSet) -> Result<TraceCondition> {
    let p_sq = total.square();
    if !(p_sq > 0.0) {
        return Err(Error::Domain(format!(
            "trace condition needs timelike P, got P^2 = {p_sq}"
        )));
    }
    let n = *total / p_sq.sqrt();
    let product = gammas.slash1(&n) * gammas.slash2(&n) * *v;
    let raw = product.trace();
    let literal = raw.re / 4.0;
    let value = raw.re / 16.0;
    Ok(TraceCondition {
        raw_trace: raw,
        literal,
        value,
        satisfied: value < 1.0,
        literal_satisfied: literal < 1.0,
    })
}

/// `(P⁰_b + P⁰_a) [V(P_b + iε) - V(P_a - iε)] / (P⁰_b - P⁰_a + 2iε)` at one
/// point, with both momenta at rest so that `P² = (P⁰ ± iε)²`.
pub fn regulated_energy_term(
    potential: &dyn Potential,
    x_perp_sq: f64,
    p0_a: f64,
    p0_b: f64,
    eps: f64,
) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let zb = Complex64::new(p0_b, eps);
    let za = Complex64::new(p0_a, -eps);
    let vb = potential.value_complex(x_perp_sq, zb * zb)?;
    let va = potential.value_complex(x_perp_sq, za * za)?;
    let denominator = Complex64::new(p0_b - p0_a, 0.0) + i * (2.0 * eps);
    if denominator.norm() == 0.0 {
        return Err(Error::Domain(
            "regulated energy term needs eps > 0 when P_a = P_b".into(),
        ));
    }
    Ok((vb - va) * (p0_a + p0_b) / denominator)
}

/// Polynomial extrapolation of samples `(x_i, y_i)` to `x = 0` (Neville).
pub fn extrapolate_to_zero(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    let mut table = ys.to_vec();
    let n = xs.len();
    for level in 1..n {
        for i in 0..n - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            table[i] = (table[i + 1] * xi - table[i] * xj) / (xi - xj);
        }
    }
    table[0]
}

/// The `P_a = P_b` limit of [`regulated_energy_term`], extrapolated over `eps`.
pub fn energy_term_limit(potential: &dyn Potential, x_perp_sq: f64, p0: f64, eps: &[f64]) -> Result<Complex64> {
    let ys = eps
        .iter()
        .map(|&e| regulated_energy_term(potential, x_perp_sq, p0, p0, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(extrapolate_to_zero(eps, &ys))
}
