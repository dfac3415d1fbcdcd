//! Experiment configuration.
//!
//! A config is one JSON document; unknown keys anywhere are errors.
//!
//! ```json
//! {
//!   "field": { "p": 7, "k": 1 },
//!   "map": "z^2",
//!   "command": "equidistribute",
//!   "params": { "start": "z-1", "n": 10, "targets": ["1", "6"] },
//!   "out": "runs/z2"
//! }
//! ```
//!
//! | key                  | meaning                                              |
//! |----------------------|------------------------------------------------------|
//! | `field.p`, `field.k` | base field `F_{p^k}` (`k` defaults to 1)             |
//! | `map`                | map expression `P(z)/Q(z)`                            |
//! | `maps`               | further maps, composed after `map` by `multiplicity` |
//! | `command`            | optional; must match the command on the command line |
//! | `params.start`       | start point, classical or Berkovich                  |
//! | `params.n`           | number of iterations                                 |
//! | `params.targets`     | target points (`P^1`, `P^2` or rational)             |
//! | `params.points`      | sample points                                        |
//! | `params.exceptional` | the finite set `E` for test functionals              |
//! | `params.phi`         | rational function `φ`                                |
//! | `params.prime`       | prime for reduction checks                           |
//! | `params.samples`     | number of random sample points                       |
//! | `params.seed`        | seed, overridden by `--seed`                         |
//! | `params.cap`         | support cap in geometric points                      |
//! | `params.germ`        | `{ "u": .., "w": .., "degree": d }`                  |
//! | `params.max_iter`    | iterates tried by the superattraction test           |
//! | `params.fixtures`    | fixture file for `suite`                             |
//! | `out`                | output directory, overridden by `--out`              |

use serde::{Deserialize, Serialize};

use eqdist_core::algebra::FqField;

use crate::error::{LabError, LabResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub k: usize,
}

fn one() -> usize {
    1
}

impl FieldSpec {
    pub fn build(&self) -> LabResult<FqField> {
        FqField::new(self.p, self.k).map_err(LabError::config)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermSpec {
    pub u: String,
    pub w: String,
    pub degree: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub start: Option<String>,
    pub n: Option<usize>,
    #[serde(default)]
    pub targets: Vec<String>,
    #[serde(default)]
    pub points: Vec<String>,
    #[serde(default)]
    pub exceptional: Vec<String>,
    pub phi: Option<String>,
    pub prime: Option<u64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub cap: Option<usize>,
    pub germ: Option<GermSpec>,
    pub max_iter: Option<usize>,
    pub fixtures: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub field: Option<FieldSpec>,
    pub map: Option<String>,
    #[serde(default)]
    pub maps: Vec<String>,
    pub command: Option<String>,
    #[serde(default)]
    pub params: Params,
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Config(format!("invalid config: {e}")))
    }

    pub fn field(&self) -> LabResult<FqField> {
        self.field.as_ref().ok_or_else(|| LabError::config("missing 'field'"))?.build()
    }

    pub fn map_expr(&self) -> LabResult<&str> {
        self.map.as_deref().ok_or_else(|| LabError::config("missing 'map'"))
    }

    pub fn n(&self) -> LabResult<usize> {
        self.params.n.ok_or_else(|| LabError::config("missing 'params.n'"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and_full_configs() {
        let c = ExperimentConfig::from_json(r#"{"field": {"p": 7}, "map": "z^2"}"#).unwrap();
        assert_eq!(c.field, Some(FieldSpec { p: 7, k: 1 }));
        let c = ExperimentConfig::from_json(
            r#"{"field": {"p": 3, "k": 2}, "map": "z^2", "command": "fiber",
                "params": {"targets": ["2"], "germ": {"u": "u", "w": "w^2", "degree": 2}}, "out": "x"}"#,
        )
        .unwrap();
        assert_eq!(c.params.targets, vec!["2".to_string()]);
        assert_eq!(c.field().unwrap().q(), 9);
    }

    #[test]
    fn unknown_keys_are_errors() {
        for bad in [
            r#"{"field": {"p": 7}, "mapp": "z^2"}"#,
            r#"{"field": {"p": 7, "q": 2}}"#,
            r#"{"params": {"iterations": 3}}"#,
            r#"{"field": {"p": 7}"#,
        ] {
            let e = ExperimentConfig::from_json(bad).unwrap_err();
            assert_eq!(e.exit_code(), 1);
        }
    }
}
