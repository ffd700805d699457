//! TOML run configuration: the variety, generator counts and run flags.
//!
//! ```toml
//! field = "Q(sqrt 2)"
//! cap = 6
//! identities = ["x1*x2*x3*x4*x5*x6"]
//! n1 = 2
//! n2 = 1
//! seed = 24301
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldDescriptor;
use crate::freealg::NCPoly;
use crate::geometry::{Target, DEFAULT_DRAWS, DEFAULT_SEED};
use crate::representation::{RepError, Representation, VarietyDescriptor};
use crate::term::{parse_module, parse_term, Term, TermContext, TermError};
use crate::verbal::WordSystem;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("malformed configuration: {0}")]
    Toml(String),
    #[error("in identity {index}: {source}")]
    Identity { index: usize, source: TermError },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("{0}")]
    Invalid(String),
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_draws() -> usize {
    DEFAULT_DRAWS
}

fn default_n1() -> usize {
    2
}

fn default_n2() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub field: FieldDescriptor,
    pub cap: usize,
    /// Identities `f * v = 0`, written either as `f` or as `f*v1`.
    pub identities: Vec<String>,
    #[serde(default = "default_n1")]
    pub n1: usize,
    #[serde(default = "default_n2")]
    pub n2: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunConfig {
    /// The variety `x1 x2 x3 x4 x5 x6 v = 0` over `field`.
    pub fn degree_six(field: FieldDescriptor) -> Self {
        RunConfig {
            field,
            cap: 6,
            identities: vec!["x1*x2*x3*x4*x5*x6".into()],
            n1: 2,
            n2: 1,
            seed: DEFAULT_SEED,
            draws: DEFAULT_DRAWS,
            degree_bound: None,
            output: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Toml(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn variety(&self) -> Result<VarietyDescriptor, ConfigError> {
        let mut ids = Vec::new();
        for (index, src) in self.identities.iter().enumerate() {
            let f = parse_identity(src).map_err(|source| ConfigError::Identity { index: index + 1, source })?;
            ids.push(f);
        }
        let v = VarietyDescriptor::new(self.field, ids, self.cap)?;
        v.check()?;
        Ok(v)
    }

    pub fn free(&self) -> Result<Arc<Representation>, ConfigError> {
        Ok(Arc::new(Representation::free(&self.variety()?, self.n1, self.n2)?))
    }
}

fn parse_identity(src: &str) -> Result<NCPoly, TermError> {
    match parse_term(src, TermContext::default())? {
        Term::Poly(p) => Ok(p),
        Term::Lie(l) => Ok(l.pbw),
        Term::Module(m) if m.keys().all(|k| k.gen == 0) => Ok(m.component_poly(0)),
        _ => Err(TermError::SortError {
            line: 1,
            col: 1,
            msg: "an identity is a polynomial f (meaning f*v = 0) or f*v1".into(),
        }),
    }
}

/// A target representation `F(n1, n2) / V`, optionally twisted; `V` is the
/// submodule generated by `relations`.
///
/// ```toml
/// n1 = 2
/// n2 = 1
/// relations = ["x1*x2*v1 - x2*x1*v1"]
/// [twist]
/// a = "1"
/// phi = "conj"
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetConfig {
    pub n1: usize,
    pub n2: usize,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<WordSystem>,
}

impl TargetConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Toml(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plain data serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn build(&self, v: &VarietyDescriptor) -> Result<Target, ConfigError> {
        let free = Arc::new(Representation::free(v, self.n1, self.n2)?);
        let ctx = TermContext::new(self.n1, self.n2);
        let rels = self
            .relations
            .iter()
            .map(|s| parse_module(s, ctx))
            .collect::<Result<Vec<_>, _>>()?;
        let rep = if rels.is_empty() {
            free
        } else {
            // relations generate the submodule V
            let v = free.generated_submodule(&rels).basis();
            free.quotient(&v)?.0
        };
        let w = self.twist.clone().unwrap_or_default();
        Target::twisted(rep, w).map_err(|e| ConfigError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = RunConfig::degree_six(FieldDescriptor::quadratic(2).unwrap());
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        c.degree_bound = Some(18);
        c.output = Some("out.json".into());
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
        let v = c.variety().unwrap();
        assert_eq!(v, VarietyDescriptor::degree_six(c.field));
    }

    #[test]
    fn identity_forms() {
        let mut c = RunConfig::degree_six(FieldDescriptor::Rationals);
        c.identities = vec!["x1*x2*x3*x4*x5*x6*v1".into()];
        assert_eq!(c.variety().unwrap(), VarietyDescriptor::degree_six(FieldDescriptor::Rationals));
        c.identities = vec!["x1 +".into()];
        assert!(matches!(c.variety(), Err(ConfigError::Identity { index: 1, .. })));
        assert!(matches!(RunConfig::from_toml("cap = \"six\""), Err(ConfigError::Toml(_))));
    }

    #[test]
    fn targets() {
        let t = TargetConfig {
            n1: 2,
            n2: 1,
            relations: vec!["[x1,x2]*v1".into()],
            twist: Some(WordSystem::new(crate::field::Scalar::one(), crate::field::FieldAutomorphism::Conjugation).unwrap()),
        };
        assert_eq!(TargetConfig::from_toml(&t.to_toml()).unwrap(), t);
        let v = VarietyDescriptor::degree_six(FieldDescriptor::quadratic(2).unwrap());
        let h = t.build(&v).unwrap();
        assert_eq!(h.rep.module_dim(), 63 - h.rep.submodule().rank());
        assert!(!h.twist.is_identity());
    }
}
