//! JSON run configuration.
//!
//! ```json
//! {
//!   "model": { "kind": "conjugation", "polynomial": "x + y + x*y*x + y*x*y",
//!              "alphas": [5, 2, 1], "betas": [4, 3, -1], "n": 400 },
//!   "experiments": [
//!     { "name": "near2", "target": { "limit": 2 }, "kappa": 2, "samples": 400, "seed": 7 }
//!   ],
//!   "output": { "dir": "out/fig2", "bins": { "count": 30 } }
//! }
//! ```
//!
//! Complex numbers may be written as `3`, `[re, im]` or `{"re": .., "im": ..}`.
//! `target` is `{"index": i}` (limit slot) or `{"limit": v, "rank": k}` (k-th largest
//! eigenvalue near `v`, default 1). `kappa` is a number or `"auto"`; when omitted it is
//! taken from the derived law, falling back to `"auto"`.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelKind, ModelSpec};
use crate::montecarlo::{Bins, Target};
use crate::ncpoly::NCPolynomial;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CNum {
    Real(f64),
    Pair([f64; 2]),
    Parts { re: f64, im: f64 },
}

impl CNum {
    pub fn value(self) -> Complex64 {
        match self {
            CNum::Real(x) => Complex64::new(x, 0.0),
            CNum::Pair([re, im]) | CNum::Parts { re, im } => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for CNum {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            CNum::Real(z.re)
        } else {
            CNum::Pair([z.re, z.im])
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<String>,
    pub alphas: Vec<CNum>,
    #[serde(default)]
    pub betas: Vec<CNum>,
    pub n: usize,
}

impl ModelBlock {
    pub fn to_spec(&self) -> Result<ModelSpec> {
        let poly = self.polynomial.as_deref().map(NCPolynomial::parse).transpose()?;
        ModelSpec::new(
            self.kind,
            poly,
            self.alphas.iter().map(|z| z.value()).collect(),
            self.betas.iter().map(|z| z.value()).collect(),
            self.n,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum TargetBlock {
    Index { index: usize },
    Limit {
        limit: CNum,
        #[serde(default = "one")]
        rank: usize,
    },
}

fn one() -> usize {
    1
}

impl TargetBlock {
    pub fn to_target(&self) -> Target {
        match *self {
            TargetBlock::Index { index } => Target::Index(index),
            TargetBlock::Limit { limit, rank } => Target::Limit {
                value: limit.value(),
                rank,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Kappa {
    Value(f64),
    Named(KappaName),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaName {
    Auto,
}

fn default_samples() -> usize {
    400
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub target: TargetBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Kappa>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalizer: Option<CNum>,
    /// Overrides the default KS threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl ExperimentBlock {
    pub fn label(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("exp{index}"))
    }
}

fn default_density_points() -> usize {
    401
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<Bins>,
    #[serde(default = "default_density_points")]
    pub density_points: usize,
    /// Range of the density table; defaults to the sample range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_range: Option<[f64; 2]>,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            dir: None,
            bins: None,
            density_points: default_density_points(),
            density_range: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelBlock,
    #[serde(default)]
    pub experiments: Vec<ExperimentBlock>,
    #[serde(default)]
    pub output: OutputBlock,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let spec = self.model.to_spec()?;
        let limits = crate::perturb::limiting_eigenvalues(&spec)?;
        let mut names = std::collections::BTreeSet::new();
        for (i, e) in self.experiments.iter().enumerate() {
            if e.samples == 0 {
                return Err(Error::Config(format!("experiment {}: samples must be positive", e.label(i))));
            }
            if let Some(Kappa::Value(k)) = e.kappa {
                if !k.is_finite() || k < 0.0 {
                    return Err(Error::Config(format!("experiment {}: bad kappa {k}", e.label(i))));
                }
            }
            e.target
                .to_target()
                .resolve(&limits)
                .map_err(|err| Error::Config(format!("experiment {}: {err}", e.label(i))))?;
            if !names.insert(e.label(i)) {
                return Err(Error::Config(format!("duplicate experiment name {}", e.label(i))));
            }
        }
        if self.output.density_points == 0 {
            return Err(Error::Config("density_points must be positive".into()));
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<ModelSpec> {
        self.model.to_spec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_number_forms() {
        let v: Vec<CNum> = serde_json::from_str(r#"[2, [1, -0.5], {"re": 0, "im": 3}]"#).unwrap();
        let z: Vec<Complex64> = v.into_iter().map(CNum::value).collect();
        assert_eq!(
            z,
            vec![Complex64::new(2.0, 0.0), Complex64::new(1.0, -0.5), Complex64::new(0.0, 3.0)]
        );
    }

    #[test]
    fn parses_and_round_trips() {
        let text = r#"{
            "model": {"kind": "sum_conjugation", "alphas": [1, 1], "betas": [1, 2], "n": 400},
            "experiments": [
                {"name": "a", "target": {"limit": 2}, "kappa": 2, "samples": 100, "seed": 3},
                {"name": "b", "target": {"limit": 1, "rank": 2}, "kappa": "auto"},
                {"name": "c", "target": {"index": 0}, "normalizer": [4, 0]}
            ],
            "output": {"bins": {"width": 0.25}}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_eq!(cfg.experiments[1].kappa, Some(Kappa::Named(KappaName::Auto)));
        assert_eq!(cfg.experiments[1].samples, 400);
        assert_eq!(
            cfg.experiments[1].target.to_target(),
            Target::Limit {
                value: Complex64::new(1.0, 0.0),
                rank: 2
            }
        );
        let back = RunConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            r#"{"model": {"kind": "rotation", "alphas": [1], "n": 2}}"#,
            r#"{"model": {"kind": "conjugation", "alphas": [1], "betas": [1], "n": 10}}"#,
            r#"{"model": {"kind": "rotation", "alphas": [1], "n": 10}, "experiments": [{"target": {"index": 0}, "samples": 0}]}"#,
            r#"{"model": {"kind": "rotation", "alphas": [1], "n": 10, "extra": 1}}"#,
            r#"{"model": {"kind": "general_two_var", "polynomial": "x + 3", "alphas": [1], "betas": [1], "n": 10}}"#,
            r#"{"model": {"kind": "rotation", "alphas": [1], "n": 10}, "experiments": [{"target": {"index": 2}}]}"#,
            r#"{"model": {"kind": "rotation", "alphas": [1], "n": 10}, "experiments": [{"target": {"limit": 1, "rank": 2}}]}"#,
        ];
        for text in bad {
            assert!(RunConfig::from_json(text).is_err(), "{text}");
        }
    }
}
