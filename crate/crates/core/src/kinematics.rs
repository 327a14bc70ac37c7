//! Minkowski four-vectors with metric diag(1, -1, -1, -1), the two-body
//! total/relative variables, the projector transverse to the total
//! momentum, and Lorentz boosts.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metric signature entries g^{μμ}.
pub const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

/// Relative threshold below which `|P.P| / |P|_E^2` counts as lightlike.
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-10;

/// Contravariant components `(t, x, y, z)` in natural units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct FourVector {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 4]> for FourVector {
    fn from(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl From<FourVector> for [f64; 4] {
    fn from(v: FourVector) -> Self {
        v.to_array()
    }
}

impl FourVector {
    pub const ZERO: FourVector = FourVector {
        t: 0.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    /// Rest-frame vector `(t, 0, 0, 0)`.
    pub const fn at_rest(t: f64) -> Self {
        Self::new(t, 0.0, 0.0, 0.0)
    }

    pub fn from_parts(t: f64, spatial: [f64; 3]) -> Self {
        Self::new(t, spatial[0], spatial[1], spatial[2])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.t, self.x, self.y, self.z]
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn component(&self, mu: usize) -> f64 {
        self.to_array()[mu]
    }

    /// Covariant components `q_μ = g_{μν} q^ν`.
    pub fn lower(&self) -> [f64; 4] {
        [self.t, -self.x, -self.y, -self.z]
    }

    pub fn dot(&self, other: &FourVector) -> f64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    pub fn square(&self) -> f64 {
        self.dot(self)
    }

    pub fn euclidean_norm_sq(&self) -> f64 {
        self.t * self.t + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn spatial_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_timelike(&self) -> bool {
        self.square() > LIGHTLIKE_TOLERANCE * self.euclidean_norm_sq()
    }

    /// True when the spatial part vanishes (c.m. frame for a total momentum).
    pub fn is_at_rest(&self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn max_abs_diff(&self, other: &FourVector) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        (0..4).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
    }
}

impl Add for FourVector {
    type Output = FourVector;
    fn add(self, o: FourVector) -> FourVector {
        FourVector::new(self.t + o.t, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for FourVector {
    type Output = FourVector;
    fn sub(self, o: FourVector) -> FourVector {
        FourVector::new(self.t - o.t, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for FourVector {
    type Output = FourVector;
    fn neg(self) -> FourVector {
        FourVector::new(-self.t, -self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for FourVector {
    type Output = FourVector;
    fn mul(self, s: f64) -> FourVector {
        FourVector::new(self.t * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for FourVector {
    type Output = FourVector;
    fn div(self, s: f64) -> FourVector {
        self * (1.0 / s)
    }
}

/// Mixed tensor `π^ν_μ = δ^ν_μ - P^ν P_μ / (P.P)`, stored so that
/// `matrix[ν][μ]` acts on contravariant components.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Projector {
    matrix: [[f64; 4]; 4],
}

impl Projector {
    pub fn matrix(&self) -> [[f64; 4]; 4] {
        self.matrix
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        let c = v.to_array();
        let mut out = [0.0; 4];
        for (nu, row) in self.matrix.iter().enumerate() {
            out[nu] = row.iter().zip(c.iter()).map(|(m, x)| m * x).sum();
        }
        out.into()
    }

    pub fn compose(&self, other: &Projector) -> Projector {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..4).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum();
            }
        }
        Projector { matrix: m }
    }

    pub fn max_abs_diff(&self, other: &Projector) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.matrix[i][j] - other.matrix[i][j]).abs());
            }
        }
        d
    }
}

/// Projector onto the Minkowski complement of `total`.
pub fn projector(total: &FourVector) -> Result<Projector> {
    let p_sq = total.square();
    if p_sq.abs() < LIGHTLIKE_TOLERANCE * total.euclidean_norm_sq() || p_sq == 0.0 {
        return Err(Error::SingularProjector { p_sq });
    }
    let up = total.to_array();
    let low = total.lower();
    let mut m = [[0.0; 4]; 4];
    for (nu, row) in m.iter_mut().enumerate() {
        for (mu, entry) in row.iter_mut().enumerate() {
            let delta = if nu == mu { 1.0 } else { 0.0 };
            *entry = delta - up[nu] * low[mu] / p_sq;
        }
    }
    Ok(Projector { matrix: m })
}

/// Transverse relative coordinate `x⊥ = π x`.
pub fn x_perp(x: &FourVector, total: &FourVector) -> Result<FourVector> {
    Ok(projector(total)?.apply(x))
}

/// `x⊥.x⊥ = x.x - (x.P)^2 / (P.P)`, without forming the projector.
pub fn x_perp_sq(x: &FourVector, total: &FourVector) -> Result<f64> {
    let p_sq = total.square();
    if p_sq.abs() < LIGHTLIKE_TOLERANCE * total.euclidean_norm_sq() || p_sq == 0.0 {
        return Err(Error::SingularProjector { p_sq });
    }
    let xp = x.dot(total);
    Ok(x.square() - xp * xp / p_sq)
}

/// Strictly spacelike separation of two events.
pub fn is_spacelike_configuration(x1: &FourVector, x2: &FourVector) -> bool {
    (*x1 - *x2).square() < 0.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassPair {
    pub m1: f64,
    pub m2: f64,
}

impl MassPair {
    pub fn new(m1: f64, m2: f64) -> Result<Self> {
        if !(m1 > 0.0 && m2 > 0.0 && m1.is_finite() && m2.is_finite()) {
            return Err(Error::params(
                "masses",
                format!("masses must be positive and finite, got ({m1}, {m2})"),
            ));
        }
        Ok(Self { m1, m2 })
    }

    pub fn equal(m: f64) -> Result<Self> {
        Self::new(m, m)
    }
}

/// Positions and momenta of both particles with the derived
/// centre/relative combinations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoBodyKinematics {
    pub x1: FourVector,
    pub x2: FourVector,
    pub p1: FourVector,
    pub p2: FourVector,
}

impl TwoBodyKinematics {
    /// Rebuilds particle momenta from `P` and `p`: `p1 = P/2 + p`, `p2 = P/2 - p`.
    pub fn from_total_relative(
        center: FourVector,
        relative: FourVector,
        total: FourVector,
        relative_momentum: FourVector,
    ) -> Self {
        Self {
            x1: center + relative * 0.5,
            x2: center - relative * 0.5,
            p1: total * 0.5 + relative_momentum,
            p2: total * 0.5 - relative_momentum,
        }
    }

    pub fn relative(&self) -> FourVector {
        self.x1 - self.x2
    }

    pub fn center(&self) -> FourVector {
        (self.x1 + self.x2) * 0.5
    }

    pub fn relative_momentum(&self) -> FourVector {
        (self.p1 - self.p2) * 0.5
    }

    pub fn total_momentum(&self) -> FourVector {
        self.p1 + self.p2
    }

    pub fn is_spacelike(&self) -> bool {
        is_spacelike_configuration(&self.x1, &self.x2)
    }
}

/// A proper orthochronous boost, stored as `Λ^μ_ν`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzBoost {
    matrix: [[f64; 4]; 4],
}

impl LorentzBoost {
    pub fn identity() -> Self {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self { matrix: m }
    }

    /// Boost along spatial axis `axis` (0 = x, 1 = y, 2 = z).
    pub fn along_axis(axis: usize, rapidity: f64) -> Result<Self> {
        if axis > 2 {
            return Err(Error::IndexOutOfRange(axis + 1));
        }
        let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
        let k = axis + 1;
        let mut b = Self::identity();
        b.matrix[0][0] = ch;
        b.matrix[k][k] = ch;
        b.matrix[0][k] = -sh;
        b.matrix[k][0] = -sh;
        Ok(b)
    }

    /// Boost taking a timelike, future-pointing `total` to `(sqrt(P.P), 0, 0, 0)`.
    pub fn to_rest_frame(total: &FourVector) -> Result<Self> {
        if !total.is_timelike() || total.t <= 0.0 {
            return Err(Error::Domain(format!(
                "rest frame needs a future timelike vector, got {:?}",
                total.to_array()
            )));
        }
        let mass = total.square().sqrt();
        let gamma = total.t / mass;
        let beta = [total.x / total.t, total.y / total.t, total.z / total.t];
        let beta_sq: f64 = beta.iter().map(|b| b * b).sum();
        let mut m = [[0.0; 4]; 4];
        m[0][0] = gamma;
        for i in 0..3 {
            m[0][i + 1] = -gamma * beta[i];
            m[i + 1][0] = -gamma * beta[i];
            for j in 0..3 {
                let delta = if i == j { 1.0 } else { 0.0 };
                let extra = if beta_sq > 0.0 {
                    (gamma - 1.0) * beta[i] * beta[j] / beta_sq
                } else {
                    0.0
                };
                m[i + 1][j + 1] = delta + extra;
            }
        }
        Ok(Self { matrix: m })
    }

    pub fn apply(&self, v: &FourVector) -> FourVector {
        let c = v.to_array();
        let mut out = [0.0; 4];
        for (mu, row) in self.matrix.iter().enumerate() {
            out[mu] = row.iter().zip(c.iter()).map(|(m, x)| m * x).sum();
        }
        out.into()
    }

    pub fn compose(&self, other: &LorentzBoost) -> LorentzBoost {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..4).map(|k| self.matrix[i][k] * other.matrix[k][j]).sum();
            }
        }
        LorentzBoost { matrix: m }
    }

    /// Inverse via `Λ^{-1} = g Λ^T g`.
    pub fn inverse(&self) -> LorentzBoost {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = METRIC[i] * self.matrix[j][i] * METRIC[j];
            }
        }
        LorentzBoost { matrix: m }
    }
}
