//! Dirac gamma matrices and their lifts to the 16-dimensional two-particle
//! spinor space `C^4 ⊗ C^4`.
//!
//! Component ordering on the product space is `4 * a + b`, where `a`
//! indexes particle 1 and `b` particle 2.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::{Matrix4, SMatrix, SVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kinematics::{FourVector, METRIC};
use crate::registry::Registry;

pub type Mat4 = Matrix4<Complex64>;
pub type Mat16 = SMatrix<Complex64, 16, 16>;
pub type Spinor16 = SVector<Complex64, 16>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Source of the four 4x4 matrices for one gamma representation.
pub trait GammaRepresentation: Send + Sync {
    fn name(&self) -> &'static str;
    fn matrices(&self) -> [Mat4; 4];
}

fn pauli() -> [[[Complex64; 2]; 2]; 3] {
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -I], [I, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

fn block(tl: [[Complex64; 2]; 2], tr: [[Complex64; 2]; 2], bl: [[Complex64; 2]; 2], br: [[Complex64; 2]; 2]) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            m[(i, j)] = tl[i][j];
            m[(i, j + 2)] = tr[i][j];
            m[(i + 2, j)] = bl[i][j];
            m[(i + 2, j + 2)] = br[i][j];
        }
    }
    m
}

fn scaled(s: Complex64, m: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]]
}

const ID2: [[Complex64; 2]; 2] = [[ONE, ZERO], [ZERO, ONE]];
const Z2: [[Complex64; 2]; 2] = [[ZERO, ZERO], [ZERO, ZERO]];

fn spatial_gammas() -> [Mat4; 3] {
    let s = pauli();
    [0, 1, 2].map(|k| block(Z2, s[k], scaled(-ONE, s[k]), Z2))
}

/// Standard (Dirac-Pauli) representation, `γ⁰ = diag(1, 1, -1, -1)`.
pub struct DiracRepresentation;

impl GammaRepresentation for DiracRepresentation {
    fn name(&self) -> &'static str {
        "dirac"
    }

    fn matrices(&self) -> [Mat4; 4] {
        let [g1, g2, g3] = spatial_gammas();
        [block(ID2, Z2, Z2, scaled(-ONE, ID2)), g1, g2, g3]
    }
}

/// Chiral representation, `γ⁰` off-diagonal.
pub struct WeylRepresentation;

impl GammaRepresentation for WeylRepresentation {
    fn name(&self) -> &'static str {
        "weyl"
    }

    fn matrices(&self) -> [Mat4; 4] {
        let [g1, g2, g3] = spatial_gammas();
        [block(Z2, ID2, ID2, Z2), g1, g2, g3]
    }
}

pub fn representations() -> &'static Registry<dyn GammaRepresentation> {
    static REG: OnceLock<Registry<dyn GammaRepresentation>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn GammaRepresentation> = Registry::new("gamma representation");
        reg.register("dirac", |_| Ok(Box::new(DiracRepresentation)));
        reg.register("weyl", |_| Ok(Box::new(WeylRepresentation)));
        reg
    })
}

/// The four gamma matrices of one representation.
#[derive(Clone, PartialEq)]
pub struct GammaSet {
    representation: &'static str,
    gamma: [Mat4; 4],
}

impl fmt::Debug for GammaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GammaSet")
            .field("representation", &self.representation)
            .finish()
    }
}

impl Default for GammaSet {
    fn default() -> Self {
        Self::from_representation(&DiracRepresentation)
    }
}

impl GammaSet {
    /// Looks up a representation by tag (`"dirac"`, `"weyl"`).
    pub fn build(tag: &str) -> Result<Self> {
        let rep = representations().build(tag, &serde_json::Value::Null)?;
        Ok(Self::from_representation(rep.as_ref()))
    }

    pub fn from_representation(rep: &dyn GammaRepresentation) -> Self {
        Self {
            representation: rep.name(),
            gamma: rep.matrices(),
        }
    }

    pub fn representation(&self) -> &'static str {
        self.representation
    }

    pub fn gamma(&self, mu: usize) -> Result<&Mat4> {
        self.gamma.get(mu).ok_or(Error::IndexOutOfRange(mu))
    }

    /// Largest entrywise violation of `{γ^μ, γ^ν} = 2 g^{μν}`.
    pub fn clifford_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = self.gamma[mu] * self.gamma[nu] + self.gamma[nu] * self.gamma[mu];
                let g = if mu == nu { 2.0 * METRIC[mu] } else { 0.0 };
                let target = Mat4::identity() * Complex64::new(g, 0.0);
                worst = worst.max(max_abs(&(anti - target)));
            }
        }
        worst
    }

    /// Largest violation of `(γ^μ)† = γ⁰ γ^μ γ⁰`.
    pub fn hermiticity_defect(&self) -> f64 {
        let g0 = self.gamma[0];
        self.gamma
            .iter()
            .map(|g| max_abs(&(g.adjoint() - g0 * g * g0)))
            .fold(0.0, f64::max)
    }

    /// `γ^μ ⊗ 1₄`
    pub fn lift1(&self, mu: usize) -> Result<TwoBodySpinOp> {
        Ok(TwoBodySpinOp(kron(self.gamma(mu)?, &Mat4::identity())))
    }

    /// `1₄ ⊗ γ^ν`
    pub fn lift2(&self, nu: usize) -> Result<TwoBodySpinOp> {
        Ok(TwoBodySpinOp(kron(&Mat4::identity(), self.gamma(nu)?)))
    }

    /// `q.γ₁ = q⁰γ₁⁰ - q^k γ₁^k`.
    pub fn slash1(&self, q: &FourVector) -> TwoBodySpinOp {
        TwoBodySpinOp(kron(&self.slash(q), &Mat4::identity()))
    }

    /// `q.γ₂`, acting on particle 2.
    pub fn slash2(&self, q: &FourVector) -> TwoBodySpinOp {
        TwoBodySpinOp(kron(&Mat4::identity(), &self.slash(q)))
    }

    /// Single-particle `q.γ` as a 4x4 matrix.
    pub fn slash(&self, q: &FourVector) -> Mat4 {
        let low = q.lower();
        let mut m = Mat4::zeros();
        for (mu, g) in self.gamma.iter().enumerate() {
            m += g * Complex64::new(low[mu], 0.0);
        }
        m
    }

    /// `γ₁⁰ γ₂⁰`, the two-particle Dirac adjoint factor.
    pub fn beta_product(&self) -> TwoBodySpinOp {
        TwoBodySpinOp(kron(&self.gamma[0], &self.gamma[0]))
    }
}

fn max_abs<const R: usize, const C: usize>(m: &SMatrix<Complex64, R, C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Applies a single-particle matrix to particle 1 of a two-particle spinor.
pub fn act1(m: &Mat4, v: &Spinor16) -> Spinor16 {
    let mut out = Spinor16::zeros();
    for a in 0..4 {
        for ap in 0..4 {
            let c = m[(a, ap)];
            if c == ZERO {
                continue;
            }
            for b in 0..4 {
                out[4 * a + b] += c * v[4 * ap + b];
            }
        }
    }
    out
}

/// Applies a single-particle matrix to particle 2 of a two-particle spinor.
pub fn act2(m: &Mat4, v: &Spinor16) -> Spinor16 {
    let mut out = Spinor16::zeros();
    for b in 0..4 {
        for bp in 0..4 {
            let c = m[(b, bp)];
            if c == ZERO {
                continue;
            }
            for a in 0..4 {
                out[4 * a + b] += c * v[4 * a + bp];
            }
        }
    }
    out
}

/// Kronecker product with row index `4 * a + b`.
pub fn kron(a: &Mat4, b: &Mat4) -> Mat16 {
    let mut m = Mat16::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..4 {
                for l in 0..4 {
                    m[(4 * i + k, 4 * j + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    m
}

/// A 16x16 complex matrix on the two-particle spinor space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoBodySpinOp(pub Mat16);

impl TwoBodySpinOp {
    pub fn identity() -> Self {
        Self(Mat16::identity())
    }

    pub fn zero() -> Self {
        Self(Mat16::zeros())
    }

    pub fn scalar(s: f64) -> Self {
        Self(Mat16::identity() * Complex64::new(s, 0.0))
    }

    pub fn matrix(&self) -> &Mat16 {
        &self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `(1/4) Tr`, so that the identity maps to 4.
    pub fn trace16_normalized(&self) -> Complex64 {
        self.trace() * 0.25
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0 * s)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        Self(self.0 * other.0 - other.0 * self.0)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        Self(self.0 * other.0 + other.0 * self.0)
    }

    pub fn apply(&self, v: &Spinor16) -> Spinor16 {
        self.0 * v
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.0)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(self.0 - other.0))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(self.0 - self.0.adjoint()))
    }

    /// Nonzero entries as `(row, col, value)`, for applying to grid fields.
    pub fn sparse(&self) -> SparseSpinOp {
        let mut entries = Vec::new();
        for r in 0..16 {
            for c in 0..16 {
                let v = self.0[(r, c)];
                if v != ZERO {
                    entries.push((r, c, v));
                }
            }
        }
        SparseSpinOp { entries }
    }
}

impl Add for TwoBodySpinOp {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(self.0 + o.0)
    }
}

impl Sub for TwoBodySpinOp {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(self.0 - o.0)
    }
}

impl Neg for TwoBodySpinOp {
    type Output = Self;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

impl Mul for TwoBodySpinOp {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self(self.0 * o.0)
    }
}

impl Mul<f64> for TwoBodySpinOp {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self(self.0 * Complex64::new(s, 0.0))
    }
}

/// Sparse view of a [`TwoBodySpinOp`]; gamma lifts have one entry per row.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSpinOp {
    pub entries: Vec<(usize, usize, Complex64)>,
}
