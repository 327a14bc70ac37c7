//! The constraint operators `D₁`, `D₂` at fixed total momentum.
//!
//! A state with total momentum `P` is `ψ = e^{-iP.X} φ(x)`, and in the c.m.
//! frame the internal part is stored as a finite sum of relative-energy
//! modes `φ = Σ e^{-ip⁰x⁰} χ(𝐱)`. Time derivatives act on the modes
//! analytically and spatial ones spectrally, so `p̂₁ = P/2 + p̂` becomes
//! `(P⁰/2 + p⁰, 𝐤)` and `p̂₂ = (P⁰/2 - p⁰, -𝐤)` on each Fourier coefficient.

use std::sync::Arc;

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid3, SpinorGrid, ALIASING_THRESHOLD};
use crate::kinematics::{x_perp_sq, FourVector, MassPair};
use crate::potentials::Potential;
use crate::spinor::{act1, act2, GammaSet, Mat4, Spinor16, TwoBodySpinOp};

/// One relative-energy component `e^{-ip⁰x⁰} χ(𝐱)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyMode {
    pub p0: f64,
    pub chi: SpinorGrid,
}

/// Internal wave function at a fixed c.m. total momentum.
#[derive(Clone, Debug, PartialEq)]
pub struct InternalField {
    total: FourVector,
    modes: Vec<EnergyMode>,
}

fn require_center_of_mass(total: &FourVector) -> Result<()> {
    if !total.is_at_rest() {
        return Err(Error::NotCenterOfMass(total.spatial()));
    }
    if !total.is_timelike() {
        return Err(Error::Domain(format!("total momentum {total:?} is not timelike")));
    }
    Ok(())
}

impl InternalField {
    pub fn new(total: FourVector, modes: Vec<EnergyMode>) -> Result<Self> {
        require_center_of_mass(&total)?;
        let first = modes
            .first()
            .ok_or_else(|| Error::params("internal field", "needs at least one energy mode"))?;
        let grid = *first.chi.grid();
        for m in &modes {
            grid.ensure_same(m.chi.grid())?;
        }
        Ok(Self { total, modes })
    }

    pub fn single(total: FourVector, p0: f64, chi: SpinorGrid) -> Result<Self> {
        Self::new(total, vec![EnergyMode { p0, chi }])
    }

    /// Samples a plane-wave state; its momenta must be c.m. and grid-resolved.
    pub fn from_plane_wave(grid: Grid3, state: &PlaneWaveState) -> Result<Self> {
        let total = state.total();
        require_center_of_mass(&total)?;
        let rel = state.relative();
        let chi = SpinorGrid::plane_wave(grid, &state.u, rel.spatial())?;
        Self::single(total, rel.t, chi)
    }

    pub fn total(&self) -> FourVector {
        self.total
    }

    pub fn modes(&self) -> &[EnergyMode] {
        &self.modes
    }

    pub fn grid(&self) -> &Grid3 {
        self.modes[0].chi.grid()
    }

    pub fn norm_sq(&self) -> f64 {
        self.modes.iter().map(|m| m.chi.norm_sq()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn aliasing_fraction(&self) -> f64 {
        self.modes.iter().map(|m| m.chi.aliasing_fraction()).fold(0.0, f64::max)
    }

    pub fn map_modes(&self, f: impl Fn(f64, &SpinorGrid) -> Result<SpinorGrid>) -> Result<Self> {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                Ok(EnergyMode {
                    p0: m.p0,
                    chi: f(m.p0, &m.chi)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            total: self.total,
            modes,
        })
    }

    fn zip_modes(&self, other: &Self, f: impl Fn(&SpinorGrid, &SpinorGrid) -> Result<SpinorGrid>) -> Result<Self> {
        if self.total != other.total {
            return Err(Error::MomentumMismatch(format!(
                "{:?} vs {:?}",
                self.total, other.total
            )));
        }
        if self.modes.len() != other.modes.len() || self.modes.iter().zip(&other.modes).any(|(a, b)| a.p0 != b.p0) {
            return Err(Error::GridMismatch("relative-energy modes differ".into()));
        }
        let modes = self
            .modes
            .iter()
            .zip(&other.modes)
            .map(|(a, b)| {
                Ok(EnergyMode {
                    p0: a.p0,
                    chi: f(&a.chi, &b.chi)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            total: self.total,
            modes,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_modes(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_modes(other, |a, b| a.sub(b))
    }
}

/// Two-particle plane wave `u e^{-ip₁.x₁ - ip₂.x₂}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveState {
    pub u: Spinor16,
    pub p1: FourVector,
    pub p2: FourVector,
    pub normalized: bool,
}

impl PlaneWaveState {
    /// Normalizes `u` to unit Euclidean norm.
    pub fn new(u: Spinor16, p1: FourVector, p2: FourVector) -> Result<Self> {
        let norm = u.norm();
        if norm == 0.0 {
            return Err(Error::params("plane wave", "spinor amplitude is zero"));
        }
        Ok(Self {
            u: u / Complex64::new(norm, 0.0),
            p1,
            p2,
            normalized: true,
        })
    }

    pub fn unnormalized(u: Spinor16, p1: FourVector, p2: FourVector) -> Self {
        Self {
            u,
            p1,
            p2,
            normalized: false,
        }
    }

    pub fn from_total_relative(total: FourVector, relative: FourVector, u: Spinor16) -> Result<Self> {
        Self::new(u, total * 0.5 + relative, total * 0.5 - relative)
    }

    pub fn total(&self) -> FourVector {
        self.p1 + self.p2
    }

    pub fn relative(&self) -> FourVector {
        (self.p1 - self.p2) * 0.5
    }

    pub fn at(&self, x1: &FourVector, x2: &FourVector) -> Spinor16 {
        let phase = Complex64::from_polar(1.0, -(self.p1.dot(x1) + self.p2.dot(x2)));
        self.u * phase
    }
}

/// Masses, interaction and gamma representation of one 2BD system.
#[derive(Clone, Debug)]
pub struct TwoBodyDiracSystem {
    pub masses: MassPair,
    pub potential: Arc<dyn Potential>,
    pub gammas: GammaSet,
}

/// Result of [`TwoBodyDiracSystem::compatibility_residual`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CompatibilityReport {
    /// `‖[D₁,D₂]φ + [γ₁.p̂₁,V]D₁φ - [γ₂.p̂₂,V]D₂φ‖ / ‖φ‖`
    pub residual: f64,
    /// `‖[D₁,D₂]φ‖ / ‖φ‖`
    pub commutator: f64,
    pub aliasing_fraction: f64,
    pub aliasing_warning: bool,
}

/// Discretization error of `‖[D₁,D₂]φ‖` for one smooth field family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub resolutions: Vec<usize>,
    pub reference_resolution: usize,
    pub commutator_norms: Vec<f64>,
    pub reference_norm: f64,
    pub errors: Vec<f64>,
    pub identity_residuals: Vec<f64>,
    /// Negative least-squares slope of `ln error` against `ln n`.
    pub observed_order: f64,
}

/// Relative energy window for the plane-wave root scan.
#[derive(Clone, Copy, Debug, PartialEq, serde::Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScanWindow {
    pub p0_min: f64,
    pub p0_max: f64,
    pub steps: usize,
}

impl ScanWindow {
    fn validate(&self) -> Result<()> {
        if !(self.p0_min < self.p0_max) || self.steps < 3 {
            return Err(Error::params("scan window", format!("{self:?}")));
        }
        Ok(())
    }

    fn point(&self, i: usize) -> f64 {
        self.p0_min + (self.p0_max - self.p0_min) * i as f64 / (self.steps - 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveSolution {
    pub p0: f64,
    pub sigma_min: f64,
    pub basis: Vec<Spinor16>,
}

pub const ROOT_TOLERANCE: f64 = 1e-8;
const ROOT_WIDTH: f64 = 1e-12;

type Stacked = SMatrix<Complex64, 32, 16>;

impl TwoBodyDiracSystem {
    pub fn new(masses: MassPair, potential: Arc<dyn Potential>, gammas: GammaSet) -> Self {
        Self {
            masses,
            potential,
            gammas,
        }
    }

    /// `V(-|𝐱|², P²)` at every grid point.
    pub fn potential_on_grid(&self, grid: &Grid3, total: &FourVector) -> Result<Vec<f64>> {
        let p_sq = total.square();
        (0..grid.points())
            .map(|idx| self.potential.value(-grid.radius_sq(idx), p_sq))
            .collect()
    }

    fn momenta(total: &FourVector, p0: f64, k: [f64; 3]) -> (FourVector, FourVector) {
        let p1 = FourVector::new(0.5 * total.t + p0, k[0], k[1], k[2]);
        let p2 = FourVector::new(0.5 * total.t - p0, -k[0], -k[1], -k[2]);
        (p1, p2)
    }

    fn shifted(&self, q: &FourVector, mass: f64) -> Mat4 {
        self.gammas.slash(q) + Mat4::identity() * Complex64::new(mass, 0.0)
    }

    /// Applies `f(k)`, given as a particle-1 and a particle-2 factor that are summed.
    fn spectral(
        &self,
        chi: &SpinorGrid,
        total: &FourVector,
        p0: f64,
        shift1: Option<f64>,
        shift2: Option<f64>,
    ) -> SpinorGrid {
        chi.fourier_multiply(|k, v| {
            let (p1, p2) = Self::momenta(total, p0, k);
            let mut out = Spinor16::zeros();
            if let Some(m) = shift1 {
                out += act1(&self.shifted(&p1, m), v);
            }
            if let Some(m) = shift2 {
                out += act2(&self.shifted(&p2, m), v);
            }
            out
        })
    }

    fn prepare(&self, field: &InternalField) -> Result<Vec<f64>> {
        require_center_of_mass(&field.total)?;
        if field.grid().contains_origin() && self.potential.depends_on_energy() {
            return Err(Error::SingularOrigin);
        }
        self.potential_on_grid(field.grid(), &field.total)
    }

    fn d1_mode(&self, v: &[f64], total: &FourVector, p0: f64, chi: &SpinorGrid) -> Result<SpinorGrid> {
        let (m1, m2) = (self.masses.m1, self.masses.m2);
        let free = self.spectral(chi, total, p0, Some(-m1), None);
        let vchi = chi.multiply_scalar_field(v)?;
        let coupled = self.spectral(&vchi, total, p0, None, Some(-m2));
        free.add(&coupled)
    }

    fn d2_mode(&self, v: &[f64], total: &FourVector, p0: f64, chi: &SpinorGrid) -> Result<SpinorGrid> {
        let (m1, m2) = (self.masses.m1, self.masses.m2);
        let free = self.spectral(chi, total, p0, None, Some(m2));
        let vchi = chi.multiply_scalar_field(v)?;
        let coupled = self.spectral(&vchi, total, p0, Some(m1), None);
        free.add(&coupled)
    }

    /// `D₁φ = (γ₁.p̂₁ - m₁)φ - (-γ₂.p̂₂ + m₂)(Vφ)`
    pub fn apply_d1(&self, field: &InternalField) -> Result<InternalField> {
        let v = self.prepare(field)?;
        field.map_modes(|p0, chi| self.d1_mode(&v, &field.total, p0, chi))
    }

    /// `D₂φ = (γ₂.p̂₂ + m₂)φ + (γ₁.p̂₁ + m₁)(Vφ)`
    pub fn apply_d2(&self, field: &InternalField) -> Result<InternalField> {
        let v = self.prepare(field)?;
        field.map_modes(|p0, chi| self.d2_mode(&v, &field.total, p0, chi))
    }

    /// Checks `[D₁,D₂] = -[γ₁.p̂₁, V]D₁ + [γ₂.p̂₂, V]D₂` on one field.
    pub fn compatibility_residual(&self, field: &InternalField) -> Result<CompatibilityReport> {
        let v = self.prepare(field)?;
        let total = field.total;
        let mut residual_sq = 0.0;
        let mut commutator_sq = 0.0;
        for mode in &field.modes {
            let p0 = mode.p0;
            let chi = &mode.chi;
            let d1 = self.d1_mode(&v, &total, p0, chi)?;
            let d2 = self.d2_mode(&v, &total, p0, chi)?;
            let d1d2 = self.d1_mode(&v, &total, p0, &d2)?;
            let d2d1 = self.d2_mode(&v, &total, p0, &d1)?;
            let commutator = d1d2.sub(&d2d1)?;
            // [a, V]ψ = a(Vψ) - V(aψ), with a = γ₁.p̂₁ and b = γ₂.p̂₂
            let comm_a = {
                let vd = d1.multiply_scalar_field(&v)?;
                let a_vd = self.spectral(&vd, &total, p0, Some(0.0), None);
                let a_d = self.spectral(&d1, &total, p0, Some(0.0), None);
                a_vd.sub(&a_d.multiply_scalar_field(&v)?)?
            };
            let comm_b = {
                let vd = d2.multiply_scalar_field(&v)?;
                let b_vd = self.spectral(&vd, &total, p0, None, Some(0.0));
                let b_d = self.spectral(&d2, &total, p0, None, Some(0.0));
                b_vd.sub(&b_d.multiply_scalar_field(&v)?)?
            };
            let r = commutator.add(&comm_a)?.sub(&comm_b)?;
            residual_sq += r.norm_sq();
            commutator_sq += commutator.norm_sq();
        }
        let norm = field.norm();
        if norm == 0.0 {
            return Err(Error::Domain("compatibility residual of the zero field".into()));
        }
        let aliasing = field.aliasing_fraction();
        Ok(CompatibilityReport {
            residual: residual_sq.sqrt() / norm,
            commutator: commutator_sq.sqrt() / norm,
            aliasing_fraction: aliasing,
            aliasing_warning: aliasing > ALIASING_THRESHOLD,
        })
    }

    /// Refines the grid for a fixed smooth field and measures how fast
    /// `‖[D₁,D₂]φ‖` settles onto its value at `reference` points per axis.
    pub fn compatibility_convergence(
        &self,
        length: f64,
        resolutions: &[usize],
        reference: usize,
        make_field: impl Fn(Grid3) -> Result<InternalField>,
    ) -> Result<ConvergenceStudy> {
        if resolutions.len() < 2 {
            return Err(Error::params("convergence study", "needs at least two resolutions"));
        }
        let reference_field = make_field(Grid3::centered(reference, length)?)?;
        let reference_norm = self.compatibility_residual(&reference_field)?.commutator;
        let mut commutator_norms = Vec::new();
        let mut identity_residuals = Vec::new();
        let mut errors = Vec::new();
        for &n in resolutions {
            let report = self.compatibility_residual(&make_field(Grid3::centered(n, length)?)?)?;
            commutator_norms.push(report.commutator);
            identity_residuals.push(report.residual);
            errors.push((report.commutator - reference_norm).abs() / reference_norm);
        }
        let observed_order = -log_log_slope(resolutions, &errors);
        Ok(ConvergenceStudy {
            resolutions: resolutions.to_vec(),
            reference_resolution: reference,
            commutator_norms,
            reference_norm,
            errors,
            identity_residuals,
            observed_order,
        })
    }

    /// The constant-`v` plane-wave matrices `(M₁, M₂)` for `p₁ = P/2 + p`, `p₂ = P/2 - p`.
    pub fn plane_wave_matrices(
        &self,
        v: f64,
        total: &FourVector,
        relative: &FourVector,
    ) -> (TwoBodySpinOp, TwoBodySpinOp) {
        let g = &self.gammas;
        let p1 = *total * 0.5 + *relative;
        let p2 = *total * 0.5 - *relative;
        let (m1, m2) = (self.masses.m1, self.masses.m2);
        let id = TwoBodySpinOp::identity();
        let a = g.slash1(&p1);
        let b = g.slash2(&p2);
        let m_one = (a - id * m1) + (b - id * m2) * v;
        let m_two = (b + id * m2) + (a + id * m1) * v;
        (m_one, m_two)
    }

    fn constant_v(&self) -> Result<f64> {
        let v = self
            .potential
            .constant_value()
            .ok_or_else(|| Error::Domain(format!("{} is not a constant potential", self.potential.name())))?;
        if v.abs() >= 1.0 {
            return Err(Error::Domain(format!("constant potential needs |v| < 1, got {v}")));
        }
        Ok(v)
    }

    /// `max(‖M₁u‖, ‖M₂u‖) / ‖u‖` for a constant potential.
    pub fn plane_wave_residual(&self, state: &PlaneWaveState) -> Result<f64> {
        let v = self.constant_v()?;
        let (m1, m2) = self.plane_wave_matrices(v, &state.total(), &state.relative());
        let norm = state.u.norm();
        Ok(m1.apply(&state.u).norm().max(m2.apply(&state.u).norm()) / norm)
    }

    fn stacked(&self, v: f64, total: &FourVector, p: [f64; 3], p0: f64) -> Stacked {
        let rel = FourVector::from_parts(p0, p);
        let (m1, m2) = self.plane_wave_matrices(v, total, &rel);
        let mut s = Stacked::zeros();
        s.fixed_view_mut::<16, 16>(0, 0).copy_from(&m1.0);
        s.fixed_view_mut::<16, 16>(16, 0).copy_from(&m2.0);
        s
    }

    /// Smallest singular value of the stacked `[M₁; M₂]` at relative energy `p0`.
    pub fn stacked_sigma_min(&self, total: &FourVector, p: [f64; 3], p0: f64) -> Result<f64> {
        let v = self.constant_v()?;
        Ok(sigma_min(&self.stacked(v, total, p, p0)))
    }

    /// Relative energies in `window` at which both constant-`v` equations
    /// share a null space, with an orthonormal basis of that space.
    pub fn plane_wave_solutions(
        &self,
        total: &FourVector,
        p: [f64; 3],
        window: &ScanWindow,
    ) -> Result<Vec<PlaneWaveSolution>> {
        let v = self.constant_v()?;
        window.validate()?;
        if !total.is_timelike() {
            return Err(Error::Domain(format!("total momentum {total:?} is not timelike")));
        }
        let f = |p0: f64| sigma_min(&self.stacked(v, total, p, p0));
        let xs: Vec<f64> = (0..window.steps).map(|i| window.point(i)).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let mut roots: Vec<PlaneWaveSolution> = Vec::new();
        for i in 0..xs.len() {
            let left = if i == 0 { f64::INFINITY } else { ys[i - 1] };
            let right = if i + 1 == xs.len() { f64::INFINITY } else { ys[i + 1] };
            if !(ys[i] <= left && ys[i] <= right) {
                continue;
            }
            let lo = xs[i.saturating_sub(1)];
            let hi = xs[(i + 1).min(xs.len() - 1)];
            let (p0, sigma) = golden_section(&f, lo, hi);
            if sigma >= ROOT_TOLERANCE || roots.iter().any(|r| (r.p0 - p0).abs() < 1e-9) {
                continue;
            }
            let basis = null_basis(&self.stacked(v, total, p, p0), ROOT_TOLERANCE);
            roots.push(PlaneWaveSolution {
                p0,
                sigma_min: sigma,
                basis,
            });
        }
        Ok(roots)
    }
}

impl TwoBodyDiracSystem {
    /// `(α, β)` such that every solution of the constant-`v` system obeys
    /// `γ₁.p₁ u = αu` and `γ₂.p₂ u = -βu`.
    pub fn effective_masses(&self) -> Result<(f64, f64)> {
        let v = self.constant_v()?;
        let (m1, m2) = (self.masses.m1, self.masses.m2);
        let d = 1.0 - v * v;
        Ok((
            (m1 * (1.0 + v * v) + 2.0 * v * m2) / d,
            (m2 * (1.0 + v * v) + 2.0 * v * m1) / d,
        ))
    }

    /// The c.m. plane-wave solution with relative spatial momentum `p`,
    /// located by the root scan, with amplitude `Σ weights[k] basis[k]`.
    pub fn solution_with_momentum(&self, p: [f64; 3], weights: &[Complex64]) -> Result<PlaneWaveState> {
        let (alpha, beta) = self.effective_masses()?;
        let k2: f64 = p.iter().map(|x| x * x).sum();
        let (e1, e2) = ((alpha * alpha + k2).sqrt(), (beta * beta + k2).sqrt());
        let total = FourVector::at_rest(e1 + e2);
        let target = 0.5 * (e1 - e2);
        let window = ScanWindow {
            p0_min: target - 0.31,
            p0_max: target + 0.29,
            steps: 61,
        };
        let root = self
            .plane_wave_solutions(&total, p, &window)?
            .into_iter()
            .find(|r| (r.p0 - target).abs() < 1e-8)
            .ok_or_else(|| Error::Domain(format!("no plane-wave root near p0 = {target}")))?;
        if weights.len() > root.basis.len() {
            return Err(Error::params(
                "plane-wave weights",
                format!(
                    "{} weights for a {}-dimensional solution space",
                    weights.len(),
                    root.basis.len()
                ),
            ));
        }
        let mut u = Spinor16::zeros();
        for (b, w) in root.basis.iter().zip(weights) {
            u += b * *w;
        }
        PlaneWaveState::from_total_relative(total, FourVector::from_parts(root.p0, p), u)
    }
}

fn sigma_min(m: &Stacked) -> f64 {
    m.singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}

fn null_basis(m: &Stacked, tol: f64) -> Vec<Spinor16> {
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < tol)
        .map(|(i, _)| Spinor16::from_fn(|c, _| v_t[(i, c)].conj()))
        .collect()
}

fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > ROOT_WIDTH {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let candidates = [(x, f(x)), (c, fc), (d, fd)];
    candidates.into_iter().fold(
        (x, f64::INFINITY),
        |best, cand| if cand.1 < best.1 { cand } else { best },
    )
}

fn log_log_slope(ns: &[usize], errors: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.max(f64::MIN_POSITIVE).ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// A scalar function of a relative coordinate at fixed total momentum.
pub trait CoordinateScalar: Sync {
    fn value_at(&self, x: &FourVector, total: &FourVector) -> Result<f64>;
}

/// A potential seen through `x⊥²(x, P)`, the form every registered potential takes.
pub struct TransverseScalar<'a>(pub &'a dyn Potential);

impl CoordinateScalar for TransverseScalar<'_> {
    fn value_at(&self, x: &FourVector, total: &FourVector) -> Result<f64> {
        self.0.value(x_perp_sq(x, total)?, total.square())
    }
}

/// Diagnostic scalar `s (x.P)/√P²`, which deliberately depends on the
/// longitudinal coordinate and so must fail the compatibility condition.
pub struct LongitudinalProbe {
    pub strength: f64,
}

impl CoordinateScalar for LongitudinalProbe {
    fn value_at(&self, x: &FourVector, total: &FourVector) -> Result<f64> {
        Ok(self.strength * x.dot(total) / total.square().sqrt())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DirectionalCheck {
    pub samples: usize,
    pub max_abs_derivative: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub const DIRECTIONAL_TOLERANCE: f64 = 1e-9;

/// Tests `P^μ ∂V/∂x^μ = 0` by central differences along `P` at each sample.
pub fn general_compatibility_check(
    scalar: &dyn CoordinateScalar,
    samples: &[(FourVector, FourVector)],
) -> Result<DirectionalCheck> {
    let mut worst: f64 = 0.0;
    for (x, total) in samples {
        let h = 1e-4 * x.euclidean_norm_sq().sqrt().max(1.0) / total.euclidean_norm_sq().sqrt();
        let plus = scalar.value_at(&(*x + *total * h), total)?;
        let minus = scalar.value_at(&(*x - *total * h), total)?;
        worst = worst.max(((plus - minus) / (2.0 * h)).abs());
    }
    Ok(DirectionalCheck {
        samples: samples.len(),
        max_abs_derivative: worst,
        tolerance: DIRECTIONAL_TOLERANCE,
        passed: worst <= DIRECTIONAL_TOLERANCE,
    })
}

/// A two-particle spinor `u₁ ⊗ u₂`.
pub fn product_spinor(u1: &nalgebra::Vector4<Complex64>, u2: &nalgebra::Vector4<Complex64>) -> Spinor16 {
    Spinor16::from_fn(|i, _| u1[i / 4] * u2[i % 4])
}

/// Orthonormal null space of a single-particle `γ.q - m` (or `+ m`).
pub fn dirac_null_space(gammas: &GammaSet, q: &FourVector, mass: f64) -> Vec<nalgebra::Vector4<Complex64>> {
    let m = gammas.slash(q) - Mat4::identity() * Complex64::new(mass, 0.0);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s < 1e-10 * scale)
        .map(|(i, _)| nalgebra::Vector4::from_fn(|c, _| v_t[(i, c)].conj()))
        .collect()
}
