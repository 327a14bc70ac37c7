//! Scalar interaction family `V(x⊥², P²)`.
//!
//! Every implementation is a real scalar times the 16x16 identity and
//! depends on position only through `x⊥²` and on momentum only through `P²`,
//! so the hermiticity and particle-antiparticle exchange conditions on the
//! interaction hold by construction.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::registry::{parse_params, Registry};

pub trait Potential: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Tagged parameter record, the inverse of [`build_potential`].
    fn record(&self) -> Value;

    /// `V(x⊥², P²)`
    fn value(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64>;

    /// Analytic `∂V/∂(P²)` at fixed `x⊥²`.
    fn d_value_d_p_sq(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64>;

    /// Continuation to complex `P²`, used by the regulated cross-energy terms.
    fn value_complex(&self, x_perp_sq: f64, p_sq: Complex64) -> Result<Complex64>;

    fn depends_on_energy(&self) -> bool;

    /// The value when the potential is constant in both arguments.
    fn constant_value(&self) -> Option<f64> {
        None
    }

    /// Hyperbolic parameter `Δ = artanh V`.
    fn delta(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        let v = self.value(x_perp_sq, p_sq)?;
        if v.abs() >= 1.0 {
            return Err(Error::Domain(format!("artanh needs |V| < 1, got {v}")));
        }
        Ok(v.atanh())
    }

    /// `∂Δ/∂(P²) = (∂V/∂(P²)) / (1 - V²)`.
    fn d_delta_d_p_sq(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        let v = self.value(x_perp_sq, p_sq)?;
        if v.abs() >= 1.0 {
            return Err(Error::Domain(format!("artanh needs |V| < 1, got {v}")));
        }
        Ok(self.d_value_d_p_sq(x_perp_sq, p_sq)? / (1.0 - v * v))
    }
}

fn check_args(x_perp_sq: f64, p_sq: f64) -> Result<()> {
    if !(p_sq > 0.0) {
        return Err(Error::Domain(format!("P^2 must be positive, got {p_sq}")));
    }
    if !(x_perp_sq <= 0.0) {
        return Err(Error::Domain(format!(
            "x_perp^2 must be non-positive (spacelike), got {x_perp_sq}"
        )));
    }
    Ok(())
}

fn check_complex(x_perp_sq: f64, p_sq: Complex64) -> Result<()> {
    if p_sq.norm() == 0.0 || !p_sq.re.is_finite() || !p_sq.im.is_finite() {
        return Err(Error::Domain(format!(
            "complex P^2 must be finite and nonzero, got {p_sq}"
        )));
    }
    if !(x_perp_sq <= 0.0) {
        return Err(Error::Domain(format!(
            "x_perp^2 must be non-positive (spacelike), got {x_perp_sq}"
        )));
    }
    Ok(())
}

/// Smooth real profiles `g(s)` of `s = -x⊥² ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GFunction {
    /// `Σ c_k s^k`
    Polynomial {
        coeffs: Vec<f64>,
    },
    /// `a exp(-s / (2 w²))`
    Gaussian {
        amplitude: f64,
        width: f64,
    },
    Constant {
        value: f64,
    },
}

impl GFunction {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            GFunction::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
            GFunction::Gaussian { amplitude, width } => amplitude * (-s / (2.0 * width * width)).exp(),
            GFunction::Constant { value } => *value,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            GFunction::Polynomial { coeffs } => coeffs.iter().all(|c| c.is_finite()),
            GFunction::Gaussian { amplitude, width } => amplitude.is_finite() && *width > 0.0,
            GFunction::Constant { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::params("g function", format!("{self:?}")))
        }
    }
}

/// A real function of `s = -x⊥² ≥ 0`, the argument of the scalar bound check.
pub trait ScalarProfile {
    fn profile(&self, s: f64) -> f64;
}

impl ScalarProfile for GFunction {
    fn profile(&self, s: f64) -> f64 {
        self.eval(s)
    }
}

/// Views an energy-independent potential as a profile in `s`.
pub struct EnergyIndependent<'a>(pub &'a dyn Potential);

impl<'a> EnergyIndependent<'a> {
    pub fn new(potential: &'a dyn Potential) -> Result<Self> {
        if potential.depends_on_energy() {
            return Err(Error::Domain(format!(
                "{} depends on P^2; the scalar bound applies to energy-independent potentials only",
                potential.name()
            )));
        }
        Ok(Self(potential))
    }
}

impl ScalarProfile for EnergyIndependent<'_> {
    fn profile(&self, s: f64) -> f64 {
        self.0.value(-s, 1.0).unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Zero;

impl Potential for Zero {
    fn name(&self) -> &'static str {
        "zero"
    }
    fn constant_value(&self) -> Option<f64> {
        Some(0.0)
    }
    fn record(&self) -> Value {
        json!({"kind": "zero"})
    }
    fn value(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        Ok(0.0)
    }
    fn d_value_d_p_sq(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        Ok(0.0)
    }
    fn value_complex(&self, x_perp_sq: f64, p_sq: Complex64) -> Result<Complex64> {
        check_complex(x_perp_sq, p_sq)?;
        Ok(Complex64::new(0.0, 0.0))
    }
    fn depends_on_energy(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constant {
    pub value: f64,
}

impl Potential for Constant {
    fn name(&self) -> &'static str {
        "constant"
    }
    fn constant_value(&self) -> Option<f64> {
        Some(self.value)
    }
    fn record(&self) -> Value {
        json!({"kind": "constant", "value": self.value})
    }
    fn value(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        Ok(self.value)
    }
    fn d_value_d_p_sq(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        Ok(0.0)
    }
    fn value_complex(&self, x_perp_sq: f64, p_sq: Complex64) -> Result<Complex64> {
        check_complex(x_perp_sq, p_sq)?;
        Ok(Complex64::new(self.value, 0.0))
    }
    fn depends_on_energy(&self) -> bool {
        false
    }
}

/// `tanh g(-x⊥²)`: bounded by one for every real `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TanhOfG {
    pub g: GFunction,
}

impl Potential for TanhOfG {
    fn name(&self) -> &'static str {
        "tanh_of_g"
    }
    fn record(&self) -> Value {
        json!({"kind": "tanh_of_g", "g": self.g})
    }
    fn value(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        Ok(self.g.eval(-x_perp_sq).tanh())
    }
    fn d_value_d_p_sq(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        Ok(0.0)
    }
    fn value_complex(&self, x_perp_sq: f64, p_sq: Complex64) -> Result<Complex64> {
        check_complex(x_perp_sq, p_sq)?;
        Ok(Complex64::new(self.g.eval(-x_perp_sq).tanh(), 0.0))
    }
    fn depends_on_energy(&self) -> bool {
        false
    }
    fn delta(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        Ok(self.g.eval(-x_perp_sq))
    }
    fn d_delta_d_p_sq(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        Ok(0.0)
    }
}

/// Lowest-order scalar exchange in hyperbolic form,
/// `tanh[-(g₁g₂/4π) e^{-μr} / (2 r sqrt(P²))]` with `r = sqrt(-x⊥²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YukawaTanh {
    pub g1: f64,
    pub g2: f64,
    pub mu: f64,
}

impl YukawaTanh {
    pub fn new(g1: f64, g2: f64, mu: f64) -> Result<Self> {
        let p = Self { g1, g2, mu };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !(self.g1.is_finite() && self.g2.is_finite() && self.mu >= 0.0 && self.mu.is_finite()) {
            return Err(Error::params("yukawa_tanh", format!("{self:?}")));
        }
        Ok(())
    }

    /// `g₁g₂ / 4π`
    pub fn coupling(&self) -> f64 {
        self.g1 * self.g2 / (4.0 * PI)
    }

    fn radius(x_perp_sq: f64) -> Result<f64> {
        let r = (-x_perp_sq).sqrt();
        if r == 0.0 {
            return Err(Error::SingularOrigin);
        }
        Ok(r)
    }

    /// `(g₁g₂/4π) e^{-μr} / r`
    fn yukawa(&self, r: f64) -> f64 {
        self.coupling() * (-self.mu * r).exp() / r
    }

    /// The tanh argument, which is exactly `Δ₁`.
    pub fn argument(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        let r = Self::radius(x_perp_sq)?;
        Ok(-self.yukawa(r) / (2.0 * p_sq.sqrt()))
    }
}

impl Potential for YukawaTanh {
    fn name(&self) -> &'static str {
        "yukawa_tanh"
    }
    fn record(&self) -> Value {
        json!({"kind": "yukawa_tanh", "g1": self.g1, "g2": self.g2, "mu": self.mu})
    }
    fn value(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        Ok(self.argument(x_perp_sq, p_sq)?.tanh())
    }
    fn d_value_d_p_sq(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        let arg = self.argument(x_perp_sq, p_sq)?;
        let r = Self::radius(x_perp_sq)?;
        let cosh = arg.cosh();
        Ok(0.25 * self.yukawa(r) * p_sq.powf(-1.5) / (cosh * cosh))
    }
    fn value_complex(&self, x_perp_sq: f64, p_sq: Complex64) -> Result<Complex64> {
        check_complex(x_perp_sq, p_sq)?;
        let r = Self::radius(x_perp_sq)?;
        let arg = -self.yukawa(r) / (p_sq.sqrt() * 2.0);
        Ok(arg.tanh())
    }
    fn depends_on_energy(&self) -> bool {
        self.coupling() != 0.0
    }
    fn delta(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        self.argument(x_perp_sq, p_sq)
    }
    fn d_delta_d_p_sq(&self, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
        check_args(x_perp_sq, p_sq)?;
        let r = Self::radius(x_perp_sq)?;
        Ok(0.25 * self.yukawa(r) * p_sq.powf(-1.5))
    }
}

pub fn registry() -> &'static Registry<dyn Potential> {
    static REG: OnceLock<Registry<dyn Potential>> = OnceLock::new();
    REG.get_or_init(|| {
        let mut reg: Registry<dyn Potential> = Registry::new("potential");
        reg.register("zero", |p| {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Empty {}
            parse_params::<Empty>("zero", p)?;
            Ok(Box::new(Zero))
        });
        reg.register("constant", |p| {
            let c: Constant = parse_params("constant", p)?;
            if !c.value.is_finite() {
                return Err(Error::params("constant", "value must be finite"));
            }
            Ok(Box::new(c))
        });
        reg.register("tanh_of_g", |p| {
            let t: TanhOfG = parse_params("tanh_of_g", p)?;
            t.g.validate()?;
            Ok(Box::new(t))
        });
        reg.register("yukawa_tanh", |p| {
            let y: YukawaTanh = parse_params("yukawa_tanh", p)?;
            y.validate()?;
            Ok(Box::new(y))
        });
        reg
    })
}

/// Builds a potential from a record tagged with `"kind"`.
pub fn build_potential(record: &Value) -> Result<Box<dyn Potential>> {
    registry().build_tagged(record, "kind")
}

pub fn eval_v(potential: &dyn Potential, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
    potential.value(x_perp_sq, p_sq)
}

pub fn eval_dv_dp2(potential: &dyn Potential, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
    potential.d_value_d_p_sq(x_perp_sq, p_sq)
}

pub fn delta_of(potential: &dyn Potential, x_perp_sq: f64, p_sq: f64) -> Result<f64> {
    potential.delta(x_perp_sq, p_sq)
}

/// `y = (g₁g₂/4π) e^{-μr} / (2 |P⁰| r)`, positive for attractive coupling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YVariable(f64);

impl YVariable {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn y_of(g1: f64, g2: f64, mu: f64, p0: f64, r: f64) -> Result<YVariable> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    if p0 == 0.0 || !p0.is_finite() {
        return Err(Error::Domain(format!("P0 must be nonzero, got {p0}")));
    }
    if !(g1 * g2 > 0.0) {
        return Err(Error::Domain(format!("y needs g1*g2 > 0, got {}", g1 * g2)));
    }
    let c = g1 * g2 / (4.0 * PI);
    Ok(YVariable(c * (-mu * r).exp() / (2.0 * p0.abs() * r)))
}
