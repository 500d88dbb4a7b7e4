//! TOML run configuration for the `bls` binary.
//!
//! ```toml
//! schema_version = 1
//! dimension = 3          # n ∈ {2, 3}
//! amplitude = 1.0
//!
//! [bump]
//! height = 2.0
//!
//! [profile]
//! family = "B"           # A, B, C, D, zero, linear, square, sine
//! params = [1.5, 0.005, 0.03]
//! ```
//!
//! Every other table is optional; see [`RunConfig::default`] for the values
//! used when a key is absent. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::kernels::{KernelContext, RieszTable, DEFAULT_EVAL_MARGIN};
use crate::profiles::{make_profile, BoundaryData, ProfileFamily, SpatialBump};
use crate::separation::{SeparationKind, SeparationSpec};
use crate::singular_quadrature::{QuadratureSpec, Substitution};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub dimension: usize,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default)]
    pub bump: BumpConfig,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub kernel: KernelConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub separation: SeparationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BumpConfig {
    pub height: f64,
}

impl Default for BumpConfig {
    fn default() -> Self {
        Self { height: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub family: String,
    /// Family defaults when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    pub panels: usize,
    pub order: usize,
    pub substitution: String,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub cheb_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        let spec = QuadratureSpec::default();
        Self {
            panels: spec.panels,
            order: spec.order,
            substitution: "sqrt-endpoint".into(),
            rel_tol: spec.rel_tol,
            abs_tol: spec.abs_tol,
            cheb_nodes: spec.cheb_nodes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    /// Radial Gauss nodes over the bump support (a multiple of 16).
    pub radial_nodes: usize,
    /// Angular nodes for `n = 3`.
    pub angular_nodes: usize,
    /// Direct evaluation needs `|x'| ≥ 1 + eval_margin`.
    pub eval_margin: f64,
    /// Optional precomputed radial table of `R'ψ` (CSV, relative to the config file).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub riesz_table: Option<PathBuf>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { radial_nodes: 64, angular_nodes: 64, eval_margin: DEFAULT_EVAL_MARGIN, riesz_table: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub radii: Vec<f64>,
    pub times: Vec<f64>,
    /// 1-based axes `i` of the sweep points `r·eᵢ`.
    pub axes: Vec<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            radii: vec![8.0, 16.0, 32.0],
            times: (0..20).map(|k| 0.05 + 0.1 * k as f64).collect(),
            axes: vec![1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeparationConfig {
    pub kind: String,
    pub c_min: f64,
    pub cone_ratio: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub step: f64,
    pub bracket_tol: f64,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        let s = SeparationSpec::default();
        Self {
            kind: "tangential".into(),
            c_min: s.c_min,
            cone_ratio: s.cone_ratio,
            t_start: s.t_start,
            t_end: s.t_end,
            step: s.step,
            bracket_tol: s.bracket_tol,
        }
    }
}

/// File names written inside the `--out` directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub m_curve: String,
    pub shear_field: String,
    pub separation_csv: String,
    pub separation_json: String,
    pub check: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            m_curve: "m_curve.csv".into(),
            shear_field: "shear_field.csv".into(),
            separation_csv: "separation.csv".into(),
            separation_json: "separation.json".into(),
            check: "check.json".into(),
        }
    }
}

impl RunConfig {
    /// Minimal valid configuration for a family with its default parameters.
    pub fn for_family(dimension: usize, family: ProfileFamily) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            dimension,
            amplitude: 1.0,
            bump: BumpConfig::default(),
            profile: ProfileConfig { family: family.name().into(), params: None },
            quadrature: QuadratureConfig::default(),
            kernel: KernelConfig::default(),
            sweep: SweepConfig::default(),
            separation: SeparationConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates; a relative `kernel.riesz_table` is resolved
    /// against the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config = Self::parse(&text)?;
        if let Some(table) = &config.kernel.riesz_table {
            if table.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                config.kernel.riesz_table = Some(base.join(table));
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} unsupported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.dimension != 2 && self.dimension != 3 {
            return bad(format!("dimension {} not in {{2, 3}}", self.dimension));
        }
        if self.sweep.axes.iter().any(|&a| a == 0 || a >= self.dimension) {
            return bad(format!("sweep.axes must lie in 1..={}", self.dimension - 1));
        }
        if self.sweep.radii.iter().any(|r| !r.is_finite()) || self.sweep.times.iter().any(|t| !(*t > 0.0 && *t <= 2.0)) {
            return bad("sweep.times must lie in (0, 2] and radii must be finite".into());
        }
        if self.kernel.radial_nodes < 16 || self.kernel.angular_nodes < 4 || !(self.kernel.eval_margin > 0.0) {
            return bad("kernel grid too coarse or eval_margin not positive".into());
        }
        self.family()?;
        self.data()?;
        self.quadrature_spec()?;
        self.separation_spec()?;
        self.separation_kind()?;
        Ok(())
    }

    pub fn family(&self) -> Result<ProfileFamily> {
        self.profile.family.parse().map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn data(&self) -> Result<BoundaryData> {
        let family = self.family()?;
        let params = self.profile.params.clone().unwrap_or_else(|| family.default_params());
        let as_config = |e: Error| Error::Config(e.to_string());
        let profile = make_profile(family, &params).map_err(as_config)?;
        let bump = SpatialBump::new(self.dimension, self.bump.height).map_err(as_config)?;
        BoundaryData::new(self.amplitude, bump, profile).map_err(as_config)
    }

    pub fn quadrature_spec(&self) -> Result<QuadratureSpec> {
        let q = &self.quadrature;
        let substitution = match q.substitution.as_str() {
            "sqrt-endpoint" => Substitution::SqrtEndpoint,
            "none" => Substitution::None,
            other => return Err(Error::Config(format!("unknown substitution '{other}'"))),
        };
        let spec = QuadratureSpec {
            panels: q.panels,
            order: q.order,
            substitution,
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            cheb_nodes: q.cheb_nodes,
        };
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }

    pub fn separation_spec(&self) -> Result<SeparationSpec> {
        let s = &self.separation;
        let spec = SeparationSpec {
            c_min: s.c_min,
            cone_ratio: s.cone_ratio,
            t_start: s.t_start,
            t_end: s.t_end,
            step: s.step,
            bracket_tol: s.bracket_tol,
            ..SeparationSpec::default()
        };
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }

    pub fn separation_kind(&self) -> Result<SeparationKind> {
        self.separation.kind.parse()
    }

    /// Kernel context with the configured grid and, if given, the Riesz table.
    pub fn kernel_context(&self) -> Result<KernelContext> {
        let bump = self.data()?.bump;
        let mut ctx = KernelContext::with_resolution(bump, self.kernel.radial_nodes, self.kernel.angular_nodes)
            .with_eval_margin(self.kernel.eval_margin);
        if let Some(path) = &self.kernel.riesz_table {
            let table = RieszTable::load(path).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("cannot read {}: {io}", path.display())),
                other => other,
            })?;
            ctx.set_riesz_table(table)?;
        }
        Ok(ctx)
    }

    /// Zero-based axes.
    pub fn axes(&self) -> Vec<usize> {
        self.sweep.axes.iter().map(|a| a - 1).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1
dimension = 3

[profile]
family = "B"
"#;

    #[test]
    fn minimal_config_uses_defaults() {
        let c = RunConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.amplitude, 1.0);
        assert_eq!(c.sweep.radii, vec![8.0, 16.0, 32.0]);
        assert_eq!(c.sweep.times.len(), 20);
        assert_eq!(c.data().unwrap().profile.params(), &[1.5, 0.005, 0.03]);
        assert_eq!(c.quadrature_spec().unwrap(), QuadratureSpec::default());
        assert_eq!(c, RunConfig::for_family(3, ProfileFamily::B));
    }

    #[test]
    fn round_trip_is_stable() {
        let mut c = RunConfig::parse(MINIMAL).unwrap();
        c.profile.params = Some(vec![1.55, 0.004, 0.02]);
        c.kernel.riesz_table = Some("table.csv".into());
        let text = c.to_toml();
        let again = RunConfig::parse(&text).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_toml(), text);
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            MINIMAL.replace("dimension = 3", "dimension = 4"),
            MINIMAL.replace("schema_version = 1", "schema_version = 2"),
            MINIMAL.replace("\"B\"", "\"Q\""),
            format!("{MINIMAL}\n[sweep]\naxes = [2]\n").replace("dimension = 3", "dimension = 2"),
            format!("{MINIMAL}\nbogus = 1\n"),
            format!("{MINIMAL}\n[quadrature]\nsubstitution = \"weird\"\n"),
            format!("{MINIMAL}\n[bump]\nheight = 1.0\n"),
            "dimension = 3".to_string(),
        ];
        for text in cases {
            match RunConfig::parse(&text) {
                Err(e @ Error::Config(_)) => assert_eq!(e.exit_code(), 2),
                other => panic!("accepted {text}: {other:?}"),
            }
        }
    }
}
