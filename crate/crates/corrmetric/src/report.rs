//! JSON documents written by the CLI. Field names are a stable contract,
//! frozen per [`SCHEMA_VERSION`](crate::SCHEMA_VERSION).

use corrmetric_core::{AngleTriple, Counterexample, QueryResult, RatioReport, SweepParams};
use serde::{Deserialize, Serialize};

use crate::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleJson {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl From<AngleTriple> for TripleJson {
    fn from(t: AngleTriple) -> Self {
        TripleJson {
            alpha: t.alpha,
            beta: t.beta,
            gamma: t.gamma,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametersJson {
    /// `"grid"` or `"random"`.
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
}

/// Output of `corrmetric verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReportJson {
    pub schema_version: u32,
    pub k: f64,
    pub max_ratio: Option<f64>,
    pub argmax: Option<TripleJson>,
    pub evaluated: u64,
    pub skipped: u64,
    pub parameters: ParametersJson,
    pub generator_name: Option<String>,
}

impl From<&RatioReport> for RatioReportJson {
    fn from(r: &RatioReport) -> Self {
        let parameters = match r.params {
            SweepParams::Grid { step } => ParametersJson {
                mode: "grid".into(),
                step: Some(step),
                trials: None,
                seed: None,
                dimension: None,
            },
            SweepParams::Random {
                trials,
                seed,
                dimension,
            } => ParametersJson {
                mode: "random".into(),
                step: None,
                trials: Some(trials),
                seed: Some(seed),
                dimension: Some(dimension),
            },
        };
        RatioReportJson {
            schema_version: SCHEMA_VERSION,
            k: r.k,
            max_ratio: r.max_ratio,
            argmax: r.argmax.map(Into::into),
            evaluated: r.evaluated,
            skipped: r.skipped,
            parameters,
            generator_name: r.generator_name().map(Into::into),
        }
    }
}

/// Output of `corrmetric counterexample`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub schema_version: u32,
    pub k: f64,
    pub triple: TripleJson,
    /// `[X, Y, Z]`, centered and unit norm.
    pub vectors: Vec<Vec<f64>>,
    /// `d(X, Z) / (d(X, Y) + d(Y, Z))`, greater than `k`.
    pub ratio: f64,
}

impl From<&Counterexample> for WitnessJson {
    fn from(c: &Counterexample) -> Self {
        WitnessJson {
            schema_version: SCHEMA_VERSION,
            k: c.k,
            triple: c.triple.into(),
            vectors: c.vectors.iter().map(|v| v.values().to_vec()).collect(),
            ratio: c.ratio,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborJson {
    pub id: String,
    pub distance: f64,
}

/// One line of `corrmetric knn` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnLineJson {
    pub query_id: String,
    pub neighbors: Vec<NeighborJson>,
    pub distance_evaluations: u64,
}

impl KnnLineJson {
    pub fn new(query_id: &str, result: &QueryResult, ids: &[impl AsRef<str>]) -> Self {
        KnnLineJson {
            query_id: query_id.into(),
            neighbors: result
                .neighbors
                .iter()
                .map(|n| NeighborJson {
                    id: ids[n.id].as_ref().into(),
                    distance: n.distance.get(),
                })
                .collect(),
            distance_evaluations: result.distance_evaluations,
        }
    }
}
