//! Periodic cubic grids and 16-component spinor fields on them.
//!
//! Points sit at `x_j = -L/2 + (j + offset) h` with `h = L/n`; the default
//! half-cell offset keeps `r = 0` off the grid for even `n`. Fields store
//! each spinor component contiguously (`data[c * n³ + idx]`, with
//! `idx = (i n + j) n + k`), which lets the 3D FFT run per component.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spinor::Spinor16;

pub const COMPONENTS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Spectral energy fraction above which a field counts as under-resolved.
pub const ALIASING_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid3 {
    pub n: usize,
    pub length: f64,
    #[serde(default = "half")]
    pub offset: f64,
}

fn half() -> f64 {
    0.5
}

impl Grid3 {
    pub fn new(n: usize, length: f64, offset: f64) -> Result<Self> {
        let g = Self { n, length, offset };
        g.validate()?;
        Ok(g)
    }

    /// Half-cell offset grid, which never samples the origin for even `n`.
    pub fn centered(n: usize, length: f64) -> Result<Self> {
        Self::new(n, length, 0.5)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::params(
                "grid",
                format!("n must be even and >= 4, got {}", self.n),
            ));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::params(
                "grid",
                format!("length must be positive, got {}", self.length),
            ));
        }
        if !(0.0..1.0).contains(&self.offset) {
            return Err(Error::params(
                "grid",
                format!("offset must lie in [0, 1), got {}", self.offset),
            ));
        }
        Ok(())
    }

    pub fn points(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn coord(&self, j: usize) -> f64 {
        -0.5 * self.length + (j as f64 + self.offset) * self.spacing()
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n + j) * self.n + k
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    pub fn radius_sq(&self, idx: usize) -> f64 {
        let x = self.position(idx);
        x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
    }

    pub fn contains_origin(&self) -> bool {
        (0..self.n).any(|j| self.coord(j).abs() <= 1e-14 * self.length)
    }

    /// Signed DFT mode number for array index `j`; the Nyquist index maps to `-n/2`.
    pub fn mode_number(&self, j: usize) -> i64 {
        let n = self.n as i64;
        let j = j as i64;
        if j < n / 2 {
            j
        } else {
            j - n
        }
    }

    /// Wavenumber used for first derivatives; the unpaired Nyquist mode gets zero.
    pub fn derivative_wavenumber(&self, j: usize) -> f64 {
        if j == self.n / 2 {
            0.0
        } else {
            2.0 * PI * self.mode_number(j) as f64 / self.length
        }
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.unravel(idx);
        [
            self.derivative_wavenumber(i),
            self.derivative_wavenumber(j),
            self.derivative_wavenumber(k),
        ]
    }

    /// Mode numbers of a momentum that fits the periodic box below Nyquist.
    pub fn resolve_momentum(&self, k: [f64; 3]) -> Result<[i64; 3]> {
        let mut m = [0i64; 3];
        for a in 0..3 {
            let x = k[a] * self.length / (2.0 * PI);
            let r = x.round();
            if (x - r).abs() > 1e-9 || r.abs() >= (self.n / 2) as f64 {
                return Err(Error::UnresolvedMomentum(k));
            }
            m[a] = r as i64;
        }
        Ok(m)
    }

    /// Smallest nonzero grid momentum, `2π/L`.
    pub fn momentum_quantum(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn ensure_same(&self, other: &Grid3) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

struct FftPair {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }
}

/// In-place 3D transform of one `n³` block; the inverse is normalized.
fn fft3(data: &mut [Complex64], n: usize, fft: &Arc<dyn Fft<f64>>, normalize: bool) {
    let mut scratch = vec![ZERO; fft.get_inplace_scratch_len()];
    fft.process_with_scratch(data, &mut scratch);
    let mut line = vec![ZERO; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                line[j] = data[(i * n + j) * n + k];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for j in 0..n {
                data[(i * n + j) * n + k] = line[j];
            }
        }
    }
    for j in 0..n {
        for k in 0..n {
            for i in 0..n {
                line[i] = data[(i * n + j) * n + k];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for i in 0..n {
                data[(i * n + j) * n + k] = line[i];
            }
        }
    }
    if normalize {
        let s = 1.0 / (n * n * n) as f64;
        data.iter_mut().for_each(|z| *z *= s);
    }
}

/// Forward 3D DFT of a scalar grid function.
pub fn forward_transform(grid: &Grid3, values: &[Complex64]) -> Vec<Complex64> {
    let mut out = values.to_vec();
    fft3(&mut out, grid.n, &FftPair::new(grid.n).forward, false);
    out
}

/// Inverse of [`forward_transform`].
pub fn inverse_transform(grid: &Grid3, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut out = spectrum.to_vec();
    fft3(&mut out, grid.n, &FftPair::new(grid.n).inverse, true);
    out
}

/// Spectral `∂/∂x^a` of a scalar grid function, for `a = 0, 1, 2`.
pub fn gradient(grid: &Grid3, values: &[Complex64]) -> [Vec<Complex64>; 3] {
    let spectrum = forward_transform(grid, values);
    let i = Complex64::new(0.0, 1.0);
    let axis = |a: usize| {
        let s: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(idx, z)| z * i * grid.wavevector(idx)[a])
            .collect();
        inverse_transform(grid, &s)
    };
    [axis(0), axis(1), axis(2)]
}

/// Fraction of spectral energy in modes with `|m| > n/3` along any axis.
fn aliasing_fraction_of(grid: &Grid3, spectrum: &[Complex64], total: &mut f64, high: &mut f64) {
    let cut = grid.n as i64 / 3;
    for (idx, z) in spectrum.iter().enumerate() {
        let e = z.norm_sqr();
        *total += e;
        let [i, j, k] = grid.unravel(idx);
        if [i, j, k].iter().any(|&m| grid.mode_number(m).abs() > cut) {
            *high += e;
        }
    }
}

/// A `C^16`-valued function sampled on a [`Grid3`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorGrid {
    grid: Grid3,
    data: Vec<Complex64>,
}

impl SpinorGrid {
    pub fn zeros(grid: Grid3) -> Self {
        Self {
            grid,
            data: vec![ZERO; COMPONENTS * grid.points()],
        }
    }

    pub fn from_fn(grid: Grid3, f: impl Fn([f64; 3]) -> Spinor16 + Sync) -> Self {
        let values: Vec<Spinor16> = (0..grid.points())
            .into_par_iter()
            .map(|idx| f(grid.position(idx)))
            .collect();
        Self::from_points(grid, &values)
    }

    fn from_points(grid: Grid3, values: &[Spinor16]) -> Self {
        let npts = grid.points();
        let mut data = vec![ZERO; COMPONENTS * npts];
        for (idx, v) in values.iter().enumerate() {
            for c in 0..COMPONENTS {
                data[c * npts + idx] = v[c];
            }
        }
        Self { grid, data }
    }

    /// A plane wave `u e^{i k.x}`; `k` must be a resolved grid momentum.
    pub fn plane_wave(grid: Grid3, u: &Spinor16, k: [f64; 3]) -> Result<Self> {
        grid.resolve_momentum(k)?;
        Ok(Self::from_fn(grid, |x| {
            let phase = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] + k[2] * x[2]);
            u * phase
        }))
    }

    /// Random field whose Fourier support is limited to `|m| <= max_mode` on every axis.
    pub fn random_band_limited(grid: Grid3, max_mode: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let npts = grid.points();
        let mut data = vec![ZERO; COMPONENTS * npts];
        let fft = FftPair::new(grid.n);
        let limit = max_mode as i64;
        for c in 0..COMPONENTS {
            let block = &mut data[c * npts..(c + 1) * npts];
            for (idx, z) in block.iter_mut().enumerate() {
                let [i, j, k] = grid.unravel(idx);
                if [i, j, k].iter().all(|&m| grid.mode_number(m).abs() <= limit) {
                    *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
            fft3(block, grid.n, &fft.inverse, true);
        }
        let mut field = Self { grid, data };
        let norm = field.norm();
        if norm > 0.0 {
            field.scale_in_place(Complex64::new(1.0 / norm, 0.0));
        }
        field
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let npts = self.grid.points();
        &self.data[c * npts..(c + 1) * npts]
    }

    pub fn point(&self, idx: usize) -> Spinor16 {
        let npts = self.grid.points();
        Spinor16::from_fn(|c, _| self.data[c * npts + idx])
    }

    pub fn to_points(&self) -> Vec<Spinor16> {
        (0..self.grid.points()).map(|idx| self.point(idx)).collect()
    }

    /// Applies a pointwise map `f(idx, x, v)`.
    pub fn map_points(&self, f: impl Fn(usize, [f64; 3], &Spinor16) -> Spinor16 + Sync) -> Self {
        let grid = self.grid;
        let values: Vec<Spinor16> = (0..grid.points())
            .into_par_iter()
            .map(|idx| f(idx, grid.position(idx), &self.point(idx)))
            .collect();
        Self::from_points(grid, &values)
    }

    /// Pointwise multiplication by a real scalar field.
    pub fn multiply_scalar_field(&self, field: &[f64]) -> Result<Self> {
        if field.len() != self.grid.points() {
            return Err(Error::GridMismatch(format!(
                "scalar field has {} points, grid has {}",
                field.len(),
                self.grid.points()
            )));
        }
        let npts = self.grid.points();
        let mut out = self.clone();
        out.data
            .par_chunks_mut(npts)
            .for_each(|block| block.iter_mut().zip(field).for_each(|(z, v)| *z *= v));
        Ok(out)
    }

    /// Applies `f(k, v̂)` to every Fourier coefficient, where `k` is the
    /// derivative wavevector (so `-i∇` acts as multiplication by `k`).
    pub fn fourier_multiply(&self, f: impl Fn([f64; 3], &Spinor16) -> Spinor16 + Sync) -> Self {
        let grid = self.grid;
        let npts = grid.points();
        let fft = FftPair::new(grid.n);
        let mut spec = self.data.clone();
        spec.par_chunks_mut(npts)
            .for_each(|block| fft3(block, grid.n, &fft.forward, false));
        let spectral = Self { grid, data: spec };
        let mapped: Vec<Spinor16> = (0..npts)
            .into_par_iter()
            .map(|idx| f(grid.wavevector(idx), &spectral.point(idx)))
            .collect();
        let mut out = Self::from_points(grid, &mapped);
        out.data
            .par_chunks_mut(npts)
            .for_each(|block| fft3(block, grid.n, &fft.inverse, true));
        out
    }

    /// Spectral energy fraction in modes with `|m| > n/3` on any axis.
    pub fn aliasing_fraction(&self) -> f64 {
        let grid = self.grid;
        let npts = grid.points();
        let fft = FftPair::new(grid.n);
        let parts: Vec<(f64, f64)> = self
            .data
            .par_chunks(npts)
            .map(|block| {
                let mut b = block.to_vec();
                fft3(&mut b, grid.n, &fft.forward, false);
                let (mut total, mut high) = (0.0, 0.0);
                aliasing_fraction_of(&grid, &b, &mut total, &mut high);
                (total, high)
            })
            .collect();
        let (total, high) = parts.iter().fold((0.0, 0.0), |(t, h), (a, b)| (t + a, h + b));
        if total == 0.0 {
            0.0
        } else {
            high / total
        }
    }

    /// `Σ_grid a† b · h³`, summed per component in a fixed order.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.grid.ensure_same(&other.grid)?;
        let npts = self.grid.points();
        let parts: Vec<Complex64> = self
            .data
            .par_chunks(npts)
            .zip(other.data.par_chunks(npts))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
            .collect();
        let sum: Complex64 = parts.iter().sum();
        Ok(sum * self.grid.cell_volume())
    }

    pub fn norm_sq(&self) -> f64 {
        let npts = self.grid.points();
        let parts: Vec<f64> = self
            .data
            .par_chunks(npts)
            .map(|a| a.iter().map(|z| z.norm_sqr()).sum())
            .collect();
        parts.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale_in_place(&mut self, s: Complex64) {
        self.data.par_iter_mut().for_each(|z| *z *= s);
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        let mut out = self.clone();
        out.scale_in_place(s);
        out
    }

    /// `self + s * other`
    pub fn axpy(&self, s: Complex64, other: &Self) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut out = self.clone();
        out.data
            .par_iter_mut()
            .zip(other.data.par_iter())
            .for_each(|(a, b)| *a += s * b);
        Ok(out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(Complex64::new(-1.0, 0.0), other)
    }
}
