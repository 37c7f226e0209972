//! Run configuration: TOML with dotted sections, or JSON by file extension.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::energy::EnergyContext;
use crate::error::{Error, Result};
use crate::grid::{DomainSpec, Grid};
use crate::model::{GrowthBound, GrowthParams, KirchhoffCoefficient, Nonlinearity, SamplingSpec};
use crate::solver::{InitialGuess, SolverOptions, DEFAULT_MOSER_NS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec<f64>,
    pub mesh: MeshConfig,
    pub kirchhoff: KirchhoffConfig,
    pub nonlinearity: NonlinearityConfig,
    pub solver: SolverOptions,
    pub validation: SamplingSpec,
    pub probe: ProbeConfig,
    pub bound: BoundConfig,
    pub fiber: FiberConfig,
    pub output: OutputConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            domain: DomainSpec::unit_disk(),
            mesh: MeshConfig::default(),
            kirchhoff: KirchhoffConfig::default(),
            nonlinearity: NonlinearityConfig::default(),
            solver: SolverOptions::default(),
            validation: SamplingSpec::default(),
            probe: ProbeConfig::default(),
            bound: BoundConfig::default(),
            fiber: FiberConfig::default(),
            output: OutputConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshConfig {
    pub h: f64,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self { h: 1.0 / 64.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KirchhoffKind {
    Constant,
    Affine,
    Logarithmic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KirchhoffConfig {
    pub kind: KirchhoffKind,
    pub m0: f64,
    pub a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
}

impl Default for KirchhoffConfig {
    fn default() -> Self {
        Self {
            kind: KirchhoffKind::Affine,
            m0: 1.0,
            a: 1.0,
            a1: None,
            a2: None,
            sigma: None,
            t0: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityConfigKind {
    PaperExample,
    Power,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NonlinearityConfig {
    pub kind: NonlinearityConfigKind,
    pub alpha0: f64,
    pub p: f64,
    pub s0: f64,
    #[serde(rename = "K0")]
    pub k0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta0: Option<f64>,
}

impl Default for NonlinearityConfig {
    fn default() -> Self {
        Self {
            kind: NonlinearityConfigKind::PaperExample,
            alpha0: 1.0,
            p: 3.0,
            s0: 1.0,
            k0: 1.0,
            beta0: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub rho: Vec<f64>,
    pub directions: usize,
    pub seed: u64,
    pub ray: InitialGuess,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            rho: vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0],
            directions: 16,
            seed: 0,
            ray: InitialGuess::Bump,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundConfig {
    pub moser_n: Vec<u64>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        Self {
            moser_n: DEFAULT_MOSER_NS.to_vec(),
        }
    }
}

/// Ray `t·u0/‖u0‖`, `t ∈ [t_min, t_max]` in units of the Dirichlet norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiberConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
    pub ray: InitialGuess,
}

impl Default for FiberConfig {
    fn default() -> Self {
        Self {
            t_min: 0.05,
            t_max: 10.0,
            count: 200,
            ray: InitialGuess::Bump,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for report and field files; nothing is written when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

fn parse_err(path: &str, msg: impl std::fmt::Display) -> Error {
    Error::Configuration(format!("at `{path}`: {msg}"))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| parse_err(".", e.message()))?;
        let cfg: Self =
            serde_path_to_error::deserialize(de).map_err(|e| parse_err(&e.path().to_string(), e.inner().message()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg: Self =
            serde_path_to_error::deserialize(&mut de).map_err(|e| parse_err(&e.path().to_string(), e.inner()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Load from `path`; `.json` files are JSON, everything else TOML.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Configuration(e.to_string()))
    }

    /// Range checks that the type system does not express.
    pub fn check(&self) -> Result<()> {
        let fail = |path: &str, msg: &str| Err(parse_err(path, msg));
        if !(self.mesh.h > 0.0 && self.mesh.h.is_finite()) {
            return fail("mesh.h", "must be positive");
        }
        let k = &self.kirchhoff;
        if !(k.m0 > 0.0) {
            return fail("kirchhoff.m0", "must be positive");
        }
        if !(k.a >= 0.0) {
            return fail("kirchhoff.a", "must be nonnegative");
        }
        for (name, v) in [("a1", k.a1), ("a2", k.a2), ("sigma", k.sigma), ("t0", k.t0)] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return fail(&format!("kirchhoff.{name}"), "must be finite and nonnegative");
                }
            }
        }
        let n = &self.nonlinearity;
        if !(n.alpha0 > 0.0 && n.alpha0.is_finite()) {
            return fail("nonlinearity.alpha0", "must be positive");
        }
        if !(n.p > 0.0) {
            return fail("nonlinearity.p", "must be positive");
        }
        if !(n.s0 >= 0.0) || !(n.k0 > 0.0) {
            return fail("nonlinearity.s0", "s0 must be nonnegative and K0 positive");
        }
        if let Some(b) = n.beta0 {
            if !(b > 0.0) {
                return fail("nonlinearity.beta0", "must be positive");
            }
        }
        self.solver.check().map_err(|e| parse_err("solver", e))?;
        self.validation.check().map_err(|e| parse_err("validation", e))?;
        if self.probe.rho.is_empty() || self.probe.rho.iter().any(|&r| !(r > 0.0)) {
            return fail("probe.rho", "needs at least one positive radius");
        }
        if self.probe.directions == 0 {
            return fail("probe.directions", "must be at least 1");
        }
        if self.bound.moser_n.iter().any(|&n| n < 2) {
            return fail("bound.moser_n", "indices must be at least 2");
        }
        let f = &self.fiber;
        if !(f.t_min > 0.0 && f.t_max > f.t_min) || f.count < 2 {
            return fail("fiber", "needs 0 < t_min < t_max and count ≥ 2");
        }
        Ok(())
    }

    pub fn coefficient(&self) -> Result<KirchhoffCoefficient<f64>> {
        let k = &self.kirchhoff;
        let coef = match k.kind {
            KirchhoffKind::Constant => KirchhoffCoefficient::constant(k.m0)?,
            KirchhoffKind::Affine => KirchhoffCoefficient::affine(k.m0, k.a)?,
            KirchhoffKind::Logarithmic => KirchhoffCoefficient::logarithmic(),
        };
        let g = coef.growth();
        Ok(coef.with_growth(GrowthBound {
            a1: k.a1.unwrap_or(g.a1),
            a2: k.a2.unwrap_or(g.a2),
            sigma: k.sigma.unwrap_or(g.sigma),
            t0: k.t0.unwrap_or(g.t0),
        }))
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity<f64>> {
        let n = &self.nonlinearity;
        let nl = match n.kind {
            NonlinearityConfigKind::PaperExample => Nonlinearity::paper_example(n.alpha0)?,
            NonlinearityConfigKind::Power => Nonlinearity::power(n.p)?,
        };
        Ok(nl.with_params(GrowthParams {
            s0: n.s0,
            k0: n.k0,
            beta0: n.beta0,
        }))
    }

    pub fn grid(&self) -> Result<Arc<Grid<f64>>> {
        Grid::new(self.domain, self.mesh.h)
    }

    /// Energy context without hypothesis checks.
    pub fn context(&self) -> Result<EnergyContext<f64>> {
        Ok(EnergyContext::new(
            self.coefficient()?,
            self.nonlinearity()?,
            self.grid()?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_example_instance() {
        let c = RunConfig::default();
        assert_eq!(c.kirchhoff.kind, KirchhoffKind::Affine);
        assert_eq!((c.kirchhoff.m0, c.kirchhoff.a), (1.0, 1.0));
        assert_eq!(c.nonlinearity.kind, NonlinearityConfigKind::PaperExample);
        assert_eq!(c.nonlinearity.alpha0, 1.0);
        assert_eq!(c.domain, DomainSpec::unit_disk());
    }

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig::default();
        c.kirchhoff.sigma = Some(2.0);
        c.nonlinearity.beta0 = Some(40.0);
        c.solver.initial_guess = InitialGuess::Moser { n: 8 };
        c.output.dir = Some("out".into());
        let text = c.to_toml_string().unwrap();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(c, back);
        assert_eq!(back.to_toml_string().unwrap(), text);
    }

    #[test]
    fn dotted_keys_and_partial_sections() {
        let text = "mesh.h = 0.125\nkirchhoff.kind = \"constant\"\nnonlinearity.kind = \"power\"\nnonlinearity.p = 3\ndomain = { shape = \"rectangle\", width = 1.0, height = 2.0 }\n";
        let c = RunConfig::from_toml_str(text).unwrap();
        assert_eq!(c.mesh.h, 0.125);
        assert_eq!(c.kirchhoff.kind, KirchhoffKind::Constant);
        assert_eq!(c.nonlinearity.p, 3.0);
        assert_eq!(
            c.domain,
            DomainSpec::Rectangle {
                width: 1.0,
                height: 2.0
            }
        );
        assert_eq!(c.solver, SolverOptions::default());
    }

    #[test]
    fn unknown_key_reports_its_path() {
        let err = RunConfig::from_toml_str("[kirchhoff]\nslope = 2\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("kirchhoff"), "{msg}");
        assert!(msg.contains("slope"), "{msg}");
    }

    #[test]
    fn range_errors_name_the_key() {
        let err = RunConfig::from_toml_str("mesh.h = -1\n").unwrap_err();
        assert!(err.to_string().contains("mesh.h"), "{err}");
        let err = RunConfig::from_json_str(r#"{"kirchhoff": {"kind": "cubic"}}"#).unwrap_err();
        assert!(err.to_string().contains("kirchhoff.kind"), "{err}");
    }

    #[test]
    fn json_is_accepted() {
        let c = RunConfig::from_json_str(r#"{"mesh": {"h": 0.05}}"#).unwrap();
        assert_eq!(c.mesh.h, 0.05);
    }
}
