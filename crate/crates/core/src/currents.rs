//! Tensor currents `ψ̄_a γ₁^μ γ₂^ν ψ_b` between two-particle states, their
//! divergences, and the Green's-function completion that restores
//! conservation.
//!
//! For plane waves the current is `c^{μν} e^{-iq₁.x₁ - iq₂.x₂}` with
//! `q_k = p_k(b) - p_k(a)`, so every derivative is a multiplication and
//! every Green's function a division in momentum space.

use std::fmt;
use std::io::Write;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{gradient, Grid3};
use crate::kinematics::FourVector;
use crate::operators::{InternalField, PlaneWaveState, TwoBodyDiracSystem};
use crate::potentials::Potential;
use crate::registry::{parse_params, Registry};
use crate::scalar_product::{build_kernel, interacting_inner_product, KernelFlavor};
use crate::spinor::{act1, act2, GammaSet, Mat4, Spinor16};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Residual above which a state is not accepted as a solution.
pub const SOLUTION_TOLERANCE: f64 = 1e-8;

pub type Tensor = [[Complex64; 4]; 4];

fn lower(q: &FourVector) -> [f64; 4] {
    q.lower()
}

fn upper(q: &FourVector) -> [f64; 4] {
    q.to_array()
}

/// `c^{μν} e^{-iq₁.x₁ - iq₂.x₂}`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneWaveCurrent {
    pub coeff: Tensor,
    pub q1: FourVector,
    pub q2: FourVector,
}

/// `c^λ e^{-iq₁.x₁ - iq₂.x₂}` for a single free Lorentz index.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneWaveVector {
    pub coeff: [Complex64; 4],
    pub q1: FourVector,
    pub q2: FourVector,
}

/// `c e^{-iq₁.x₁ - iq₂.x₂}`
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlaneWaveScalar {
    pub coeff: Complex64,
    pub q1: FourVector,
    pub q2: FourVector,
}

fn phase(q1: &FourVector, q2: &FourVector, x1: &FourVector, x2: &FourVector) -> Complex64 {
    Complex64::from_polar(1.0, -(q1.dot(x1) + q2.dot(x2)))
}

impl PlaneWaveCurrent {
    pub fn zero(q1: FourVector, q2: FourVector) -> Self {
        Self {
            coeff: [[ZERO; 4]; 4],
            q1,
            q2,
        }
    }

    pub fn at(&self, x1: &FourVector, x2: &FourVector) -> Tensor {
        let ph = phase(&self.q1, &self.q2, x1, x2);
        self.coeff.map(|row| row.map(|c| c * ph))
    }

    /// `∂_{1,μ} j^{μν}`
    pub fn divergence1(&self) -> PlaneWaveVector {
        let q = lower(&self.q1);
        let mut out = [ZERO; 4];
        for (nu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|mu| -I * q[mu] * self.coeff[mu][nu]).sum();
        }
        PlaneWaveVector {
            coeff: out,
            q1: self.q1,
            q2: self.q2,
        }
    }

    /// `∂_{2,ν} j^{μν}`
    pub fn divergence2(&self) -> PlaneWaveVector {
        let q = lower(&self.q2);
        let mut out = [ZERO; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|nu| -I * q[nu] * self.coeff[mu][nu]).sum();
        }
        PlaneWaveVector {
            coeff: out,
            q1: self.q1,
            q2: self.q2,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.q1 != other.q1 || self.q2 != other.q2 {
            return Err(Error::MomentumMismatch(
                "plane-wave currents carry different momenta".into(),
            ));
        }
        let mut coeff = self.coeff;
        for mu in 0..4 {
            for nu in 0..4 {
                coeff[mu][nu] += other.coeff[mu][nu];
            }
        }
        Ok(Self {
            coeff,
            q1: self.q1,
            q2: self.q2,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Serializes coefficients (as `[re, im]` pairs) and momenta.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plane-wave current serializes")
    }
}

impl PlaneWaveVector {
    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeff
            .iter()
            .zip(&other.coeff)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `∂_{2,λ}` contracted with the free index.
    pub fn divergence2(&self) -> PlaneWaveScalar {
        let q = lower(&self.q2);
        let coeff = (0..4).map(|l| -I * q[l] * self.coeff[l]).sum();
        PlaneWaveScalar {
            coeff,
            q1: self.q1,
            q2: self.q2,
        }
    }

    /// `∂_{1,λ}` contracted with the free index.
    pub fn divergence1(&self) -> PlaneWaveScalar {
        let q = lower(&self.q1);
        let coeff = (0..4).map(|l| -I * q[l] * self.coeff[l]).sum();
        PlaneWaveScalar {
            coeff,
            q1: self.q1,
            q2: self.q2,
        }
    }
}

/// `γ₁⁰γ₂⁰ a`, so that `ū_a Γ u_b = (γ₁⁰γ₂⁰ a)† Γ u_b`.
fn dirac_bar(gammas: &GammaSet, a: &Spinor16) -> Spinor16 {
    let g0 = gammas.gamma(0).expect("index 0 exists");
    act1(g0, &act2(g0, a))
}

/// `ū_a γ₁^μ γ₂^ν u_b` for all `μ, ν`.
pub fn bilinear(gammas: &GammaSet, a: &Spinor16, b: &Spinor16) -> Tensor {
    let bar_a = dirac_bar(gammas, a);
    let mut coeff = [[ZERO; 4]; 4];
    for (mu, row) in coeff.iter_mut().enumerate() {
        let g1 = gammas.gamma(mu).expect("mu < 4");
        for (nu, c) in row.iter_mut().enumerate() {
            let g2 = gammas.gamma(nu).expect("nu < 4");
            *c = bar_a.dotc(&act1(g1, &act2(g2, b)));
        }
    }
    coeff
}

/// `j_free^{μν}[a, b] = ψ̄_a γ₁^μ γ₂^ν ψ_b` for plane-wave states.
pub fn j_free(gammas: &GammaSet, a: &PlaneWaveState, b: &PlaneWaveState) -> PlaneWaveCurrent {
    PlaneWaveCurrent {
        coeff: bilinear(gammas, &a.u, &b.u),
        q1: b.p1 - a.p1,
        q2: b.p2 - a.p2,
    }
}

/// Single-particle Dirac current `ū_a γ^μ u_b` of 4-spinors.
pub fn single_particle_current(
    gammas: &GammaSet,
    a: &nalgebra::Vector4<Complex64>,
    b: &nalgebra::Vector4<Complex64>,
) -> [Complex64; 4] {
    let g0 = gammas.gamma(0).expect("index 0 exists");
    let bar = g0 * a;
    let mut out = [ZERO; 4];
    for (mu, o) in out.iter_mut().enumerate() {
        *o = bar.dotc(&(gammas.gamma(mu).expect("mu < 4") * b));
    }
    out
}

/// `F₁^ν`, `F₂^μ` and `F` for a pair of states, with `F` obtained both ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DefectFields {
    pub f1: PlaneWaveVector,
    pub f2: PlaneWaveVector,
    /// `∂₂.F₁`
    pub f: PlaneWaveScalar,
    /// `∂₁.F₂`, equal to `f` by symmetry of mixed partials.
    pub f_alt: PlaneWaveScalar,
}

impl DefectFields {
    pub fn mixed_consistency(&self) -> f64 {
        (self.f.coeff - self.f_alt.coeff).norm()
    }

    pub fn max_abs(&self) -> f64 {
        self.f1.max_abs().max(self.f2.max_abs()).max(self.f.coeff.norm())
    }
}

/// Defects of the free current between two solutions of the system.
pub fn defects(system: &TwoBodyDiracSystem, a: &PlaneWaveState, b: &PlaneWaveState) -> Result<DefectFields> {
    for state in [a, b] {
        let residual = system.plane_wave_residual(state)?;
        if residual > SOLUTION_TOLERANCE {
            return Err(Error::NotASolution {
                residual,
                tolerance: SOLUTION_TOLERANCE,
            });
        }
    }
    Ok(defects_of(&j_free(&system.gammas, a, b)))
}

/// Divergences of an arbitrary plane-wave current, without requiring its
/// sources to solve anything.
pub fn defects_of(j: &PlaneWaveCurrent) -> DefectFields {
    let f1 = j.divergence1();
    let f2 = j.divergence2();
    DefectFields {
        f1,
        f2,
        f: f1.divergence2(),
        f_alt: f2.divergence1(),
    }
}

/// Surviving divergence terms of the free current for constant `v`:
/// `∂₁.j = -iv ū_a[γ₂.p₂(a) γ₂^ν - γ₂^ν γ₂.p₂(b)]u_b` and
/// `∂₂.j = -iv ū_a[γ₁.p₁(a) γ₁^μ - γ₁^μ γ₁.p₁(b)]u_b`.
pub fn closed_form_divergences(
    gammas: &GammaSet,
    v: f64,
    a: &PlaneWaveState,
    b: &PlaneWaveState,
) -> (PlaneWaveVector, PlaneWaveVector) {
    let bar_a = dirac_bar(gammas, &a.u);
    let s1a = gammas.slash(&a.p1);
    let s1b = gammas.slash(&b.p1);
    let s2a = gammas.slash(&a.p2);
    let s2b = gammas.slash(&b.p2);
    let factor = -I * v;
    let term = |g: &Mat4, sa: &Mat4, sb: &Mat4, particle: fn(&Mat4, &Spinor16) -> Spinor16| {
        let left = particle(sa, &particle(g, &b.u));
        let right = particle(g, &particle(sb, &b.u));
        factor * bar_a.dotc(&(left - right))
    };
    let mut d1 = [ZERO; 4];
    let mut d2 = [ZERO; 4];
    for l in 0..4 {
        let g = gammas.gamma(l).expect("l < 4");
        d1[l] = term(g, &s2a, &s2b, act2);
        d2[l] = term(g, &s1a, &s1b, act1);
    }
    let (q1, q2) = (b.p1 - a.p1, b.p2 - a.p2);
    (
        PlaneWaveVector { coeff: d1, q1, q2 },
        PlaneWaveVector { coeff: d2, q1, q2 },
    )
}

/// Inverse d'Alembertian in momentum space, normalized to `□G = δ`, so it
/// multiplies `e^{-iq.x}` by `-1/(q² ∓ 2iq⁰ε)`.
pub trait GreenFunction: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn multiplier(&self, q: &FourVector, eps: f64) -> Result<Complex64>;
}

fn propagator(q: &FourVector, shift: f64, eps: f64) -> Result<Complex64> {
    let q_sq = q.square();
    let denominator = Complex64::new(q_sq, shift);
    let scale = q.euclidean_norm_sq().max(1.0);
    if denominator.norm() <= 1e-14 * scale {
        return Err(Error::SingularPropagator { eps });
    }
    Ok(-1.0 / denominator)
}

/// `-1 / (q² - 2iq⁰ε)`
#[derive(Clone, Copy, Debug, Default)]
pub struct Advanced;

impl GreenFunction for Advanced {
    fn name(&self) -> &'static str {
        "advanced"
    }
    fn multiplier(&self, q: &FourVector, eps: f64) -> Result<Complex64> {
        propagator(q, -2.0 * q.t * eps, eps)
    }
}

/// `-1 / (q² + 2iq⁰ε)`
#[derive(Clone, Copy, Debug, Default)]
pub struct Retarded;

impl GreenFunction for Retarded {
    fn name(&self) -> &'static str {
        "retarded"
    }
    fn multiplier(&self, q: &FourVector, eps: f64) -> Result<Complex64> {
        propagator(q, 2.0 * q.t * eps, eps)
    }
}

pub fn green_functions() -> &'static Registry<dyn GreenFunction> {
    static REG: OnceLock<Registry<dyn GreenFunction>> = OnceLock::new();
    REG.get_or_init(|| {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Empty {}
        let mut reg: Registry<dyn GreenFunction> = Registry::new("Green's function");
        reg.register("advanced", |p| {
            parse_params::<Empty>("advanced", p)?;
            Ok(Box::new(Advanced))
        });
        reg.register("retarded", |p| {
            parse_params::<Empty>("retarded", p)?;
            Ok(Box::new(Retarded))
        });
        reg
    })
}

pub fn green_function(name: &str) -> Result<Box<dyn GreenFunction>> {
    green_functions().build(name, &serde_json::Value::Null)
}

/// `j_add = -∂₁^μ G₁F₁^ν - ∂₂^ν G₂F₂^μ + ∂₁^μ∂₂^ν G₁G₂F` at regulator `eps`.
///
/// Terms whose defect vanishes identically are skipped, so a zero momentum
/// transfer never touches the propagator pole.
pub fn j_add(
    defects: &DefectFields,
    green1: &dyn GreenFunction,
    green2: &dyn GreenFunction,
    eps: f64,
) -> Result<PlaneWaveCurrent> {
    let (q1, q2) = (defects.f1.q1, defects.f1.q2);
    let mut out = PlaneWaveCurrent::zero(q1, q2);
    let f1_live = defects.f1.max_abs() > 0.0;
    let f2_live = defects.f2.max_abs() > 0.0;
    let f_live = defects.f.coeff.norm() > 0.0;
    let g1 = if f1_live || f_live {
        Some(green1.multiplier(&q1, eps)?)
    } else {
        None
    };
    let g2 = if f2_live || f_live {
        Some(green2.multiplier(&q2, eps)?)
    } else {
        None
    };
    let (u1, u2) = (upper(&q1), upper(&q2));
    for mu in 0..4 {
        for nu in 0..4 {
            let mut c = ZERO;
            if let (true, Some(g1)) = (f1_live, g1) {
                c += I * u1[mu] * g1 * defects.f1.coeff[nu];
            }
            if let (true, Some(g2)) = (f2_live, g2) {
                c += I * u2[nu] * g2 * defects.f2.coeff[mu];
            }
            if let (true, Some(g1), Some(g2)) = (f_live, g1, g2) {
                c -= u1[mu] * u2[nu] * g1 * g2 * defects.f.coeff;
            }
            out.coeff[mu][nu] = c;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    pub divergence1: f64,
    pub divergence2: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn verify_conservation(j: &PlaneWaveCurrent, tolerance: f64) -> ConservationReport {
    let d1 = j.divergence1().max_abs();
    let d2 = j.divergence2().max_abs();
    ConservationReport {
        divergence1: d1,
        divergence2: d2,
        tolerance,
        passed: d1 <= tolerance && d2 <= tolerance,
    }
}

/// Divergences of `j_free + j_add(ε)` along a regulator sequence and their
/// polynomial extrapolation to `ε = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegulatorSweep {
    pub green: [&'static str; 2],
    pub eps: Vec<f64>,
    pub divergence1: Vec<f64>,
    pub divergence2: Vec<f64>,
    pub free_divergence: f64,
    pub extrapolated1: f64,
    pub extrapolated2: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn conservation_sweep(
    system: &TwoBodyDiracSystem,
    a: &PlaneWaveState,
    b: &PlaneWaveState,
    green1: &dyn GreenFunction,
    green2: &dyn GreenFunction,
    eps: &[f64],
    tolerance: f64,
) -> Result<RegulatorSweep> {
    defects(system, a, b)?;
    completion_sweep(&j_free(&system.gammas, a, b), green1, green2, eps, tolerance)
}

/// [`conservation_sweep`] for any plane-wave current: `j + j_add(ε)` built
/// from the current's own divergences.
pub fn completion_sweep(
    free: &PlaneWaveCurrent,
    green1: &dyn GreenFunction,
    green2: &dyn GreenFunction,
    eps: &[f64],
    tolerance: f64,
) -> Result<RegulatorSweep> {
    if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::params("regulator sequence", "needs positive values"));
    }
    let defects = defects_of(free);
    let mut div1 = Vec::new();
    let mut div2 = Vec::new();
    for &e in eps {
        let j = free.add(&j_add(&defects, green1, green2, e)?)?;
        div1.push(j.divergence1().coeff);
        div2.push(j.divergence2().coeff);
    }
    let extrapolate = |samples: &[[Complex64; 4]]| {
        (0..4)
            .map(|l| {
                let ys: Vec<Complex64> = samples.iter().map(|s| s[l]).collect();
                crate::scalar_product::extrapolate_to_zero(eps, &ys).norm()
            })
            .fold(0.0, f64::max)
    };
    let norm = |s: &[Complex64; 4]| s.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let extrapolated1 = extrapolate(&div1);
    let extrapolated2 = extrapolate(&div2);
    Ok(RegulatorSweep {
        green: [green1.name(), green2.name()],
        eps: eps.to_vec(),
        divergence1: div1.iter().map(norm).collect(),
        divergence2: div2.iter().map(norm).collect(),
        free_divergence: free.divergence1().max_abs().max(free.divergence2().max_abs()),
        extrapolated1,
        extrapolated2,
        tolerance,
        passed: extrapolated1 <= tolerance && extrapolated2 <= tolerance,
    })
}

/// A tensor current between two grid fields, on the slice `X = 0`, `x⁰ = 0`.
#[derive(Clone, Debug)]
pub struct GridCurrent {
    grid: Grid3,
    /// `P_a - P_b`
    total_difference: FourVector,
    /// `(p⁰_a - p⁰_b, j^{μν}(𝐱))` per pair of energy modes.
    terms: Vec<(f64, Vec<Tensor>)>,
}

impl GridCurrent {
    pub fn new(gammas: &GammaSet, a: &InternalField, b: &InternalField) -> Result<Self> {
        a.grid().ensure_same(b.grid())?;
        let grid = *a.grid();
        let mut terms = Vec::new();
        for ma in a.modes() {
            for mb in b.modes() {
                let values = (0..grid.points())
                    .map(|idx| bilinear(gammas, &ma.chi.point(idx), &mb.chi.point(idx)))
                    .collect();
                terms.push((ma.p0 - mb.p0, values));
            }
        }
        Ok(Self {
            grid,
            total_difference: a.total() - b.total(),
            terms,
        })
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn at(&self, idx: usize) -> Tensor {
        let mut out = [[ZERO; 4]; 4];
        for (_, values) in &self.terms {
            for mu in 0..4 {
                for nu in 0..4 {
                    out[mu][nu] += values[idx][mu][nu];
                }
            }
        }
        out
    }

    /// `∂_{1,μ} j^{μν}` (`particle = 1`) or `∂_{2,ν} j^{μν}` (`particle = 2`)
    /// with `∂₁ = ½∂_X + ∂_x` and `∂₂ = ½∂_X - ∂_x`.
    pub fn divergence(&self, particle: u8) -> Result<[Vec<Complex64>; 4]> {
        let sign = match particle {
            1 => 1.0,
            2 => -1.0,
            _ => return Err(Error::params("grid divergence", "particle must be 1 or 2")),
        };
        let dp = lower(&self.total_difference);
        let npts = self.grid.points();
        let mut out: [Vec<Complex64>; 4] = std::array::from_fn(|_| vec![ZERO; npts]);
        for (dp0, values) in &self.terms {
            for free in 0..4 {
                let comp = |summed: usize, idx: usize| {
                    let t = &values[idx];
                    if particle == 1 {
                        t[summed][free]
                    } else {
                        t[free][summed]
                    }
                };
                for summed in 0..4 {
                    let mut factor = I * 0.5 * dp[summed];
                    if summed == 0 {
                        factor += I * dp0 * sign;
                    }
                    let column: Vec<Complex64> = (0..npts).map(|idx| comp(summed, idx)).collect();
                    for (o, c) in out[free].iter_mut().zip(&column) {
                        *o += factor * c;
                    }
                    if summed > 0 {
                        let d = &gradient(&self.grid, &column)[summed - 1];
                        for (o, c) in out[free].iter_mut().zip(d) {
                            *o += sign * c;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// CSV with columns `x,y,z` then `re,im` for every `j^{μν}`.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        let mut header = vec!["x".to_string(), "y".to_string(), "z".to_string()];
        for mu in 0..4 {
            for nu in 0..4 {
                header.push(format!("j{mu}{nu}_re"));
                header.push(format!("j{mu}{nu}_im"));
            }
        }
        writeln!(w, "{}", header.join(","))?;
        for idx in 0..self.grid.points() {
            let x = self.grid.position(idx);
            let t = self.at(idx);
            let mut row: Vec<String> = x.iter().map(|v| format!("{v:.16e}")).collect();
            for r in t.iter().flatten() {
                row.push(format!("{:.16e}", r.re));
                row.push(format!("{:.16e}", r.im));
            }
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Phase transformations `ψ → e^{iθ}ψ` of a fixed-momentum state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GaugePhase {
    /// `θ = θ₀ + c⁰x⁰ - 𝐜.𝐱`: depends on the relative coordinate only.
    RelativeOnly { constant: f64, c: [f64; 4] },
    /// `θ = -a.X`: multiplies by `e^{-ia.X}`, which moves `P` to `P + a`.
    TotalDependent { a: [f64; 4] },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeReport {
    pub phase: GaugePhase,
    pub total_before: FourVector,
    pub total_after: FourVector,
    pub kernel_before: f64,
    pub kernel_after: f64,
    pub kernel_change: f64,
}

/// Applies a gauge phase to a state and re-evaluates its norm kernel.
pub fn gauge_check(
    flavor: &dyn KernelFlavor,
    potential: &dyn Potential,
    gammas: &GammaSet,
    field: &InternalField,
    phase: GaugePhase,
) -> Result<GaugeReport> {
    let grid = *field.grid();
    let before = build_kernel(flavor, potential, &field.total(), &grid, gammas)?;
    let kernel_before = interacting_inner_product(&before, field, field)?.re;
    let (transformed, total_after) = match phase {
        GaugePhase::RelativeOnly { constant, c } => {
            let modes = field
                .modes()
                .iter()
                .map(|m| {
                    // e^{ic⁰x⁰} lowers each relative energy by c⁰
                    let chi = m.chi.map_points(|_, x, v| {
                        let theta = constant - (c[1] * x[0] + c[2] * x[1] + c[3] * x[2]);
                        v * Complex64::from_polar(1.0, theta)
                    });
                    crate::operators::EnergyMode { p0: m.p0 - c[0], chi }
                })
                .collect();
            (InternalField::new(field.total(), modes)?, field.total())
        }
        GaugePhase::TotalDependent { a } => {
            let total = field.total() + FourVector::from(a);
            let modes = field.modes().to_vec();
            (InternalField::new(total, modes)?, total)
        }
    };
    let after = build_kernel(flavor, potential, &total_after, &grid, gammas)?;
    let kernel_after = interacting_inner_product(&after, &transformed, &transformed)?.re;
    Ok(GaugeReport {
        phase,
        total_before: field.total(),
        total_after,
        kernel_before,
        kernel_after,
        kernel_change: kernel_after - kernel_before,
    })
}
