//! Versioned JSON form of a [`QmIndex`].
//!
//! ```text
//! { schema_version, config: {strategy, k_constant, leaf_size, seed},
//!   points: [{id, values}],
//!   nodes: [{vantage, mu, near, far, near_envelope, far_envelope} | {leaf: [point offsets]}] }
//! ```
//!
//! `vantage` and leaf entries are offsets into `points`; `near` and `far` are
//! offsets into `nodes`, whose first entry is the root. Floats round-trip
//! exactly, so a reloaded index answers queries identically.

use std::path::Path;

use corrmetric_core::index::Envelope;
use corrmetric_core::{CenteredUnit, IndexConfig, Node, QmIndex, Strategy};
use serde::{Deserialize, Serialize};

use crate::{CliError, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub strategy: String,
    pub k_constant: f64,
    pub leaf_size: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub id: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeJson {
    pub min_distance: f64,
    pub max_distance: f64,
    pub min_angle: f64,
    pub max_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeJson {
    Internal {
        vantage: usize,
        mu: f64,
        near: usize,
        far: usize,
        near_envelope: EnvelopeJson,
        far_envelope: EnvelopeJson,
    },
    Leaf {
        leaf: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexJson {
    pub schema_version: u32,
    pub config: ConfigJson,
    pub points: Vec<PointJson>,
    pub nodes: Vec<NodeJson>,
}

impl From<Envelope> for EnvelopeJson {
    fn from(e: Envelope) -> Self {
        EnvelopeJson {
            min_distance: e.min_distance,
            max_distance: e.max_distance,
            min_angle: e.min_angle,
            max_angle: e.max_angle,
        }
    }
}

impl From<EnvelopeJson> for Envelope {
    fn from(e: EnvelopeJson) -> Self {
        Envelope {
            min_distance: e.min_distance,
            max_distance: e.max_distance,
            min_angle: e.min_angle,
            max_angle: e.max_angle,
        }
    }
}

impl From<&QmIndex> for IndexJson {
    fn from(index: &QmIndex) -> Self {
        let cfg = index.config();
        IndexJson {
            schema_version: SCHEMA_VERSION,
            config: ConfigJson {
                strategy: cfg.strategy.to_string(),
                k_constant: cfg.k_constant,
                leaf_size: cfg.leaf_size,
                seed: cfg.seed,
            },
            points: index
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| PointJson {
                    id: p.source_id().map_or_else(|| i.to_string(), Into::into),
                    values: p.values().to_vec(),
                })
                .collect(),
            nodes: index
                .nodes()
                .iter()
                .map(|n| match n {
                    Node::Leaf { points } => NodeJson::Leaf {
                        leaf: points.clone(),
                    },
                    Node::Internal {
                        vantage,
                        mu,
                        near,
                        far,
                        near_envelope,
                        far_envelope,
                    } => NodeJson::Internal {
                        vantage: *vantage,
                        mu: *mu,
                        near: *near,
                        far: *far,
                        near_envelope: (*near_envelope).into(),
                        far_envelope: (*far_envelope).into(),
                    },
                })
                .collect(),
        }
    }
}

impl TryFrom<IndexJson> for QmIndex {
    type Error = CliError;

    fn try_from(doc: IndexJson) -> Result<Self, CliError> {
        if doc.schema_version != SCHEMA_VERSION {
            return Err(CliError::Parse(format!(
                "unsupported index schema_version {}",
                doc.schema_version
            )));
        }
        let strategy: Strategy = doc
            .config
            .strategy
            .parse()
            .map_err(|e| CliError::Parse(format!("index config: {e}")))?;
        let config = IndexConfig {
            strategy,
            k_constant: doc.config.k_constant,
            leaf_size: doc.config.leaf_size,
            seed: doc.config.seed,
        };
        let points = doc
            .points
            .into_iter()
            .map(|p| {
                CenteredUnit::from_values(p.values)
                    .map(|u| u.with_source_id(p.id.clone()))
                    .map_err(|e| CliError::Parse(format!("index point {}: {e}", p.id)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let nodes = doc
            .nodes
            .into_iter()
            .map(|n| match n {
                NodeJson::Leaf { leaf } => Node::Leaf { points: leaf },
                NodeJson::Internal {
                    vantage,
                    mu,
                    near,
                    far,
                    near_envelope,
                    far_envelope,
                } => Node::Internal {
                    vantage,
                    mu,
                    near,
                    far,
                    near_envelope: near_envelope.into(),
                    far_envelope: far_envelope.into(),
                },
            })
            .collect();
        QmIndex::from_parts(points, nodes, config).map_err(|e| CliError::Parse(e.to_string()))
    }
}

pub fn to_json(index: &QmIndex) -> String {
    serde_json::to_string(&IndexJson::from(index)).expect("index serializes")
}

pub fn from_json(text: &str) -> Result<QmIndex, CliError> {
    let doc: IndexJson =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("index: {e}")))?;
    doc.try_into()
}

pub fn load(path: &Path) -> Result<QmIndex, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    from_json(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}
