//! The JSON configuration document consumed by the CLI and the C API.
//!
//! Complex numbers travel as two-element `[re, im]` arrays, exponent vectors
//! as arrays of reals, and the mapping family as a tagged object, so
//! documents are trivial to generate from any language without locale
//! pitfalls.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::DomainSpec;
use crate::mappings::{MappingSpec, Monomial};
use crate::numerics::ComplexVector;
use crate::{Error, Result};

fn c64(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Converts a `[re, im]` pair list into a vector.
pub fn vector_from_pairs(pairs: &[[f64; 2]]) -> ComplexVector {
    pairs.iter().map(|&p| c64(p)).collect()
}

/// Converts a vector into a `[re, im]` pair list.
pub fn pairs_from_vector(v: &ComplexVector) -> Vec<[f64; 2]> {
    v.iter().map(|&z| pair(z)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainConfig {
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonomialConfig {
    pub coeff: [f64; 2],
    pub exponents: Vec<u32>,
}

/// Wire form of a mapping family. Coefficient lists for `example3` and
/// `example4` carry `a_2..a_n` (length n - 1); the other families carry one
/// coefficient per coordinate.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MappingConfig {
    Identity,
    Example1 {
        a: Vec<[f64; 2]>,
        lambda: [f64; 2],
        k: u32,
    },
    Example2 {
        a: Vec<[f64; 2]>,
        k: u32,
    },
    Example3 {
        a: Vec<[f64; 2]>,
        lambda: [f64; 2],
        k: u32,
    },
    Example4 {
        a: Vec<[f64; 2]>,
        k: u32,
    },
    Theorem4Quadratic {
        a1: [f64; 2],
        a2: [f64; 2],
        a1_prime: [f64; 2],
        a2_prime: [f64; 2],
    },
    CustomTriangular {
        components: Vec<Vec<MonomialConfig>>,
    },
}

impl MappingConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(format!("mapping: {e}")))
    }

    /// Instantiates the family at dimension `n`.
    pub fn to_spec(&self, n: usize) -> Result<MappingSpec> {
        match self {
            Self::Identity => MappingSpec::identity(n),
            Self::Example1 { a, lambda, k } => {
                MappingSpec::example1(n, a.iter().map(|&p| c64(p)).collect(), c64(*lambda), *k)
            }
            Self::Example2 { a, k } => {
                MappingSpec::example2(n, a.iter().map(|&p| c64(p)).collect(), *k)
            }
            Self::Example3 { a, lambda, k } => {
                MappingSpec::example3(n, a.iter().map(|&p| c64(p)).collect(), c64(*lambda), *k)
            }
            Self::Example4 { a, k } => {
                MappingSpec::example4(n, a.iter().map(|&p| c64(p)).collect(), *k)
            }
            Self::Theorem4Quadratic {
                a1,
                a2,
                a1_prime,
                a2_prime,
            } => {
                if n != 2 {
                    return Err(Error::InvalidConfig(
                        "theorem4_quadratic requires a two-dimensional domain".into(),
                    ));
                }
                MappingSpec::theorem4_quadratic(c64(*a1), c64(*a2), c64(*a1_prime), c64(*a2_prime))
            }
            Self::CustomTriangular { components } => MappingSpec::custom_triangular(
                components
                    .iter()
                    .map(|comp| {
                        comp.iter()
                            .map(|m| Monomial {
                                coeff: c64(m.coeff),
                                exponents: m.exponents.clone(),
                            })
                            .collect()
                    })
                    .collect(),
            ),
        }
    }
}

/// A full run configuration: domain, optional mapping, optional anchor point,
/// and optional command-specific overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub domain: DomainConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mapping: Option<MappingConfig>,
    /// Evaluation point for the `rho` command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<[f64; 2]>>,
    /// Upper edge of the search shell (falsify); defaults to 0.95.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_ceiling: Option<f64>,
    /// Simplex iterations per restart (falsify); defaults to 500.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn domain(&self) -> Result<DomainSpec> {
        DomainSpec::new(self.domain.p.clone())
    }

    pub fn mapping(&self) -> Result<MappingSpec> {
        let Some(mapping) = &self.mapping else {
            return Err(Error::InvalidConfig(
                "this command needs a \"mapping\" entry in the configuration".into(),
            ));
        };
        mapping.to_spec(self.domain.p.len())
    }

    pub fn point(&self) -> Result<ComplexVector> {
        let Some(point) = &self.point else {
            return Err(Error::InvalidConfig(
                "this command needs a \"point\" entry in the configuration".into(),
            ));
        };
        if point.len() != self.domain.p.len() {
            return Err(Error::InvalidConfig(format!(
                "point has {} coordinates but the domain has {}",
                point.len(),
                self.domain.p.len()
            )));
        }
        Ok(vector_from_pairs(point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_document() {
        let text = r#"{
            "domain": { "p": [2.0, 3.0, 3.0] },
            "mapping": {
                "family": "example1",
                "a": [[0.03, 0.0], [0.03, 0.0], [0.03, 0.0]],
                "lambda": [0.5, 0.0],
                "k": 2
            },
            "point": [[0.1, 0.0], [0.0, 0.2], [0.0, 0.0]]
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        let dom = cfg.domain().unwrap();
        assert_eq!(dom.n(), 3);
        let spec = cfg.mapping().unwrap();
        assert_eq!(spec.family_name(), "example1");
        assert_eq!(cfg.point().unwrap().len(), 3);
    }

    #[test]
    fn rejects_malformed_documents() {
        assert!(RunConfig::from_json("{").is_err());
        assert!(RunConfig::from_json(r#"{"domain": {"p": []}}"#)
            .unwrap()
            .domain()
            .is_err());
        let cfg = RunConfig::from_json(r#"{"domain": {"p": [2.0, 2.0]}}"#).unwrap();
        assert!(matches!(cfg.mapping(), Err(Error::InvalidConfig(_))));
        assert!(matches!(cfg.point(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn mapping_config_round_trips() {
        let cfg = MappingConfig::Theorem4Quadratic {
            a1: [0.05, 0.0],
            a2: [0.05, 0.0],
            a1_prime: [0.05, 0.0],
            a2_prime: [0.05, 0.0],
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back = MappingConfig::from_json(&text).unwrap();
        let spec = back.to_spec(2).unwrap();
        assert_eq!(spec.family_name(), "theorem4_quadratic");
    }

    #[test]
    fn example3_tail_length_is_validated() {
        let cfg = MappingConfig::Example3 {
            a: vec![[0.01, 0.0]; 3],
            lambda: [0.5, 0.0],
            k: 2,
        };
        // n = 3 needs two tail coefficients, not three
        assert!(cfg.to_spec(3).is_err());
        assert!(cfg.to_spec(4).is_ok());
    }
}
