//! Experiment configuration: one JSON document with a schema header.
//! Every field other than `schema` is optional and falls back to the
//! defaults of the subcommand being run.

use std::path::Path;

use serde::Deserialize;
use serde_json::Value;
use tbdkit::currents::GaugePhase;
use tbdkit::grid::Grid3;
use tbdkit::kinematics::MassPair;
use tbdkit::potentials::{build_potential, Potential};
use tbdkit::spinor::GammaSet;

use crate::UsageError;

pub const SCHEMA: &str = "tbdkit-config/1";

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    /// When present, must name the subcommand being run.
    pub command: Option<String>,
    pub potential: Option<Value>,
    /// Potential probed by the equal-momentum limit in `conserve`.
    pub limit_potential: Option<Value>,
    pub masses: Option<Masses>,
    /// `P⁰` in the c.m. frame.
    pub total_energy: Option<f64>,
    pub p_sq: Option<Vec<f64>>,
    pub grid: Option<Grid3>,
    pub epsilon: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub flavor: Option<String>,
    pub green: Option<[String; 2]>,
    pub representation: Option<String>,
    pub certify: Option<bool>,
    pub gauge: Option<Vec<GaugePhase>>,
    /// Number of random fields in `compat`.
    pub fields: Option<usize>,
    /// Run the resolution study in `compat`.
    pub convergence: Option<bool>,
    /// Side of the square `(|b/a|, arg b)` grid in `toy`.
    pub samples_side: Option<usize>,
    pub outputs: Option<Outputs>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Masses {
    pub m1: f64,
    pub m2: f64,
}

/// File names written under `--out`.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub json: Option<String>,
    pub csv: Option<String>,
}

impl ExperimentConfig {
    pub fn empty() -> Self {
        Self {
            schema: SCHEMA.to_string(),
            ..Self::default()
        }
    }

    pub fn parse(text: &str) -> Result<Self, UsageError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| UsageError(format!("config: {e}")))?;
        if cfg.schema != SCHEMA {
            return Err(UsageError(format!(
                "config schema must be \"{SCHEMA}\", got \"{}\"",
                cfg.schema
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks every present field before anything is computed.
    pub fn validate(&self, command: &str) -> Result<(), UsageError> {
        if let Some(c) = &self.command {
            if c != command {
                return Err(UsageError(format!("config is for `{c}`, not `{command}`")));
            }
        }
        for record in [&self.potential, &self.limit_potential].into_iter().flatten() {
            build_potential(record)?;
        }
        if let Some(m) = self.masses {
            MassPair::new(m.m1, m.m2)?;
        }
        if let Some(e) = self.total_energy {
            if !(e > 0.0 && e.is_finite()) {
                return Err(UsageError(format!("total_energy must be positive, got {e}")));
            }
        }
        if let Some(list) = &self.p_sq {
            if list.is_empty() || list.iter().any(|p| !(*p > 0.0 && p.is_finite())) {
                return Err(UsageError("p_sq must be a nonempty list of positive values".into()));
            }
        }
        if let Some(g) = self.grid {
            g.validate()?;
        }
        if let Some(eps) = &self.epsilon {
            if eps.len() < 2 || eps.iter().any(|e| !(*e > 0.0)) {
                return Err(UsageError("epsilon needs at least two positive values".into()));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(UsageError(format!("tolerance must be positive, got {t}")));
            }
        }
        if let Some(f) = &self.flavor {
            tbdkit::scalar_product::flavor(f)?;
        }
        if let Some(pair) = &self.green {
            for name in pair {
                tbdkit::currents::green_function(name)?;
            }
        }
        if let Some(r) = &self.representation {
            GammaSet::build(r)?;
        }
        if self.fields == Some(0) {
            return Err(UsageError("fields must be at least 1".into()));
        }
        if let Some(side) = self.samples_side {
            if side < 2 {
                return Err(UsageError("samples_side must be at least 2".into()));
            }
        }
        Ok(())
    }

    pub fn gammas(&self) -> Result<GammaSet, UsageError> {
        Ok(GammaSet::build(self.representation.as_deref().unwrap_or("dirac"))?)
    }

    pub fn potential_or(&self, default: Value) -> Result<Box<dyn Potential>, UsageError> {
        Ok(build_potential(self.potential.as_ref().unwrap_or(&default))?)
    }

    pub fn grid_or(&self, n: usize, length: f64) -> Result<Grid3, UsageError> {
        match self.grid {
            Some(g) => Ok(Grid3::new(g.n, g.length, g.offset)?),
            None => Ok(Grid3::centered(n, length)?),
        }
    }

    pub fn masses_or(&self, m1: f64, m2: f64) -> Result<MassPair, UsageError> {
        let m = self.masses.unwrap_or(Masses { m1, m2 });
        Ok(MassPair::new(m.m1, m.m2)?)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }
}
