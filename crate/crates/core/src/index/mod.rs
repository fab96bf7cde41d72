//! Exact similarity search under absolute correlation distance.
//!
//! A vantage-point tree over centered unit representatives. Subtrees are
//! skipped only when a lower bound on the distance from the query to every
//! point inside exceeds the current search radius:
//!
//! * [`Strategy::RelaxedK`] derives the bound from the relaxed triangle
//!   inequality with constant `k_constant` (sound for `k_constant >= 2`);
//! * [`Strategy::ProjectiveAngle`] also uses the triangle inequality of
//!   folded angles, which is never looser;
//! * [`Strategy::Brute`] scans every point.
//!
//! Distance 0 between distinct ids is legal: affine images and sign flips of
//! a sample are indistinguishable.

mod bounds;
mod search;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use bounds::{lower_bound_angle, lower_bound_relaxed};
pub use search::{brute_force_knn, Neighbor, QueryResult, RangeResult};

use crate::distance::{center_and_normalize, folded_angle, unit_distance};
use crate::error::{Error, Result};
use crate::sample::{CenteredUnit, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    RelaxedK,
    ProjectiveAngle,
    Brute,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::RelaxedK => "relaxed-k",
            Strategy::ProjectiveAngle => "projective-angle",
            Strategy::Brute => "brute",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relaxed-k" => Ok(Strategy::RelaxedK),
            "projective-angle" => Ok(Strategy::ProjectiveAngle),
            "brute" => Ok(Strategy::Brute),
            _ => Err(Error::InvalidConfig("unknown strategy")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexConfig {
    pub strategy: Strategy,
    /// Relaxation constant used by [`Strategy::RelaxedK`].
    pub k_constant: f64,
    pub leaf_size: usize,
    /// Seeds vantage selection.
    pub seed: u64,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            strategy: Strategy::RelaxedK,
            k_constant: 2.0,
            leaf_size: 16,
            seed: 0,
        }
    }
}

impl IndexConfig {
    pub fn with_strategy(strategy: Strategy) -> Self {
        IndexConfig {
            strategy,
            ..Default::default()
        }
    }

    /// `k_constant < 2` voids the no-false-dismissal guarantee and is rejected
    /// for the relaxed strategy.
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        if self.strategy == Strategy::RelaxedK && self.k_constant < 2.0 {
            return Err(Error::InvalidConfig(
                "k_constant below 2 allows false dismissals",
            ));
        }
        Ok(())
    }

    fn validate_shape(&self) -> Result<()> {
        if self.leaf_size == 0 {
            return Err(Error::InvalidConfig("leaf_size must be at least 1"));
        }
        if !(self.k_constant > 0.0 && self.k_constant.is_finite()) {
            return Err(Error::InvalidConfig(
                "k_constant must be positive and finite",
            ));
        }
        Ok(())
    }
}

/// Range of distances and folded angles from a vantage point to the points
/// of one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub min_distance: f64,
    pub max_distance: f64,
    pub min_angle: f64,
    pub max_angle: f64,
}

impl Envelope {
    fn empty() -> Self {
        Envelope {
            min_distance: f64::INFINITY,
            max_distance: f64::NEG_INFINITY,
            min_angle: f64::INFINITY,
            max_angle: f64::NEG_INFINITY,
        }
    }

    fn include(&mut self, d: f64, theta: f64) {
        self.min_distance = self.min_distance.min(d);
        self.max_distance = self.max_distance.max(d);
        self.min_angle = self.min_angle.min(theta);
        self.max_angle = self.max_angle.max(theta);
    }

    fn contains(&self, d: f64, theta: f64) -> bool {
        self.min_distance <= d
            && d <= self.max_distance
            && self.min_angle <= theta
            && theta <= self.max_angle
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Points with `d(vantage, p) <= mu` live under `near`, those with
    /// `d(vantage, p) >= mu` under `far`. `near` and `far` are node offsets;
    /// `vantage` is a point offset.
    Internal {
        vantage: usize,
        mu: f64,
        near: usize,
        far: usize,
        near_envelope: Envelope,
        far_envelope: Envelope,
    },
    Leaf {
        points: Vec<usize>,
    },
}

/// Vantage-point tree. The root is node 0 and nodes are stored in pre-order.
#[derive(Debug, Clone, PartialEq)]
pub struct QmIndex {
    points: Vec<CenteredUnit>,
    nodes: Vec<Node>,
    config: IndexConfig,
}

impl QmIndex {
    /// Centers the samples and builds the tree. Deterministic for a fixed
    /// point order and seed.
    pub fn build(points: &[Sample], config: IndexConfig) -> Result<Self> {
        config.validate()?;
        Self::build_inner(points, config)
    }

    /// Builds without rejecting `k_constant < 2`. Only useful to demonstrate
    /// that smaller constants dismiss true neighbours.
    pub fn build_unsound(points: &[Sample], config: IndexConfig) -> Result<Self> {
        config.validate_shape()?;
        Self::build_inner(points, config)
    }

    fn build_inner(points: &[Sample], config: IndexConfig) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyCorpus)?;
        let mut units = Vec::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != first.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    found: p.len(),
                    index: Some(i),
                });
            }
            let u = center_and_normalize(p).map_err(|_| Error::ZeroVariance { index: Some(i) })?;
            units.push(u);
        }
        Ok(Self::from_units_inner(units, config))
    }

    /// Builds over representatives that are already centered.
    pub fn from_units(points: Vec<CenteredUnit>, config: IndexConfig) -> Result<Self> {
        config.validate()?;
        let first = points.first().ok_or(Error::EmptyCorpus)?;
        if let Some(i) = points.iter().position(|p| p.len() != first.len()) {
            return Err(Error::DimensionMismatch {
                expected: first.len(),
                found: points[i].len(),
                index: Some(i),
            });
        }
        Ok(Self::from_units_inner(points, config))
    }

    fn from_units_inner(points: Vec<CenteredUnit>, config: IndexConfig) -> Self {
        let mut builder = Builder {
            points: &points,
            nodes: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            leaf_size: config.leaf_size,
        };
        builder.node((0..points.len()).collect());
        let nodes = builder.nodes;
        QmIndex {
            points,
            nodes,
            config,
        }
    }

    /// Reassembles a stored index, checking every structural invariant.
    pub fn from_parts(
        points: Vec<CenteredUnit>,
        nodes: Vec<Node>,
        config: IndexConfig,
    ) -> Result<Self> {
        config.validate()?;
        let index = QmIndex {
            points,
            nodes,
            config,
        };
        index.validate()?;
        Ok(index)
    }

    pub fn points(&self) -> &[CenteredUnit] {
        &self.points
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn config(&self) -> &IndexConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.points.first().map_or(0, CenteredUnit::len)
    }

    /// Switches the pruning strategy. The tree does not depend on it.
    pub fn set_strategy(&mut self, strategy: Strategy) -> Result<()> {
        let config = IndexConfig {
            strategy,
            ..self.config
        };
        config.validate()?;
        self.config = config;
        Ok(())
    }

    /// Checks the tree invariants: every point sits in exactly one leaf,
    /// sides respect the split radius, and envelopes cover the true
    /// distances and angles.
    pub fn validate(&self) -> Result<()> {
        let n = self.points.len();
        if n == 0 {
            return Err(Error::EmptyCorpus);
        }
        let dim = self.points[0].len();
        if let Some(i) = self.points.iter().position(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.points[i].len(),
                index: Some(i),
            });
        }
        if self.nodes.is_empty() {
            return Err(invalid("no nodes"));
        }
        let mut seen_node = alloc::vec![false; self.nodes.len()];
        let mut seen_point = alloc::vec![false; n];
        self.check_node(0, &mut seen_node, &mut seen_point)?;
        if let Some(i) = seen_point.iter().position(|s| !s) {
            return Err(invalid(alloc::format!("point {i} is in no leaf")));
        }
        if let Some(i) = seen_node.iter().position(|s| !s) {
            return Err(invalid(alloc::format!("node {i} is unreachable")));
        }
        Ok(())
    }

    fn check_node(
        &self,
        at: usize,
        seen_node: &mut [bool],
        seen_point: &mut [bool],
    ) -> Result<Vec<usize>> {
        match seen_node.get(at) {
            None => return Err(invalid(alloc::format!("node offset {at} out of range"))),
            Some(true) => return Err(invalid(alloc::format!("node {at} reached twice"))),
            Some(false) => seen_node[at] = true,
        }
        match &self.nodes[at] {
            Node::Leaf { points } => {
                for &p in points {
                    match seen_point.get(p) {
                        None => {
                            return Err(invalid(alloc::format!("point offset {p} out of range")))
                        }
                        Some(true) => {
                            return Err(invalid(alloc::format!("point {p} in two leaves")))
                        }
                        Some(false) => seen_point[p] = true,
                    }
                }
                Ok(points.clone())
            }
            Node::Internal {
                vantage,
                mu,
                near,
                far,
                near_envelope,
                far_envelope,
            } => {
                let v = self
                    .points
                    .get(*vantage)
                    .ok_or_else(|| invalid(alloc::format!("vantage {vantage} out of range")))?;
                let near_ids = self.check_node(*near, seen_node, seen_point)?;
                let far_ids = self.check_node(*far, seen_node, seen_point)?;
                for (ids, env, is_near) in [
                    (&near_ids, near_envelope, true),
                    (&far_ids, far_envelope, false),
                ] {
                    for &p in ids {
                        let u = self.points[p].values();
                        let d = unit_distance(v.values(), u).get();
                        let theta = folded_angle(v.values(), u);
                        let side_ok = if is_near { d <= *mu } else { d >= *mu };
                        if !side_ok || !env.contains(d, theta) {
                            return Err(invalid(alloc::format!("point {p} violates node {at}")));
                        }
                    }
                }
                let mut all = near_ids;
                all.extend(far_ids);
                Ok(all)
            }
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidIndex(msg.into())
}

struct Builder<'a> {
    points: &'a [CenteredUnit],
    nodes: Vec<Node>,
    rng: ChaCha8Rng,
    leaf_size: usize,
}

impl Builder<'_> {
    fn node(&mut self, mut ids: Vec<usize>) -> usize {
        let slot = self.nodes.len();
        if ids.len() <= self.leaf_size {
            ids.sort_unstable();
            self.nodes.push(Node::Leaf { points: ids });
            return slot;
        }
        self.nodes.push(Node::Leaf { points: Vec::new() });

        let vantage = ids[self.rng.random_range(0..ids.len())];
        let v = self.points[vantage].values();
        let mut scored: Vec<(f64, usize)> = ids
            .iter()
            .map(|&p| (unit_distance(v, self.points[p].values()).get(), p))
            .collect();
        scored.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        // lower median; ties at mu stay near unless that leaves the far side empty
        let mid = (scored.len() - 1) / 2;
        let mu = scored[mid].0;
        let mut split = scored.partition_point(|&(d, _)| d <= mu);
        if split == scored.len() {
            split = mid + 1;
        }

        let mut near_envelope = Envelope::empty();
        let mut far_envelope = Envelope::empty();
        for (i, &(d, p)) in scored.iter().enumerate() {
            let theta = folded_angle(v, self.points[p].values());
            if i < split {
                near_envelope.include(d, theta);
            } else {
                far_envelope.include(d, theta);
            }
        }
        let far_ids: Vec<usize> = scored[split..].iter().map(|&(_, p)| p).collect();
        scored.truncate(split);
        let near_ids: Vec<usize> = scored.into_iter().map(|(_, p)| p).collect();

        let near = self.node(near_ids);
        let far = self.node(far_ids);
        self.nodes[slot] = Node::Internal {
            vantage,
            mu,
            near,
            far,
            near_envelope,
            far_envelope,
        };
        slot
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(n: usize, dim: usize, seed: u64) -> Vec<Sample> {
        use rand_distr::StandardNormal;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Sample::new((0..dim).map(|_| rng.sample(StandardNormal)).collect()).unwrap())
            .collect()
    }

    fn leaf_sizes(index: &QmIndex) -> Vec<usize> {
        index
            .nodes()
            .iter()
            .filter_map(|n| match n {
                Node::Leaf { points } => Some(points.len()),
                _ => None,
            })
            .collect()
    }

    #[test]
    fn single_point_is_single_leaf() {
        let idx = QmIndex::build(&corpus(1, 4, 0), IndexConfig::default()).unwrap();
        assert_eq!(idx.nodes(), &[Node::Leaf { points: vec![0] }]);
        idx.validate().unwrap();
    }

    #[test]
    fn hundred_points_respect_leaf_size() {
        let idx = QmIndex::build(&corpus(100, 8, 1), IndexConfig::default()).unwrap();
        idx.validate().unwrap();
        let sizes = leaf_sizes(&idx);
        assert!(sizes.iter().all(|&s| s <= 16 && s > 0));
        assert_eq!(sizes.iter().sum::<usize>(), 100);
    }

    #[test]
    fn build_is_deterministic() {
        let pts = corpus(200, 6, 2);
        let cfg = IndexConfig {
            seed: 11,
            leaf_size: 4,
            ..Default::default()
        };
        assert_eq!(
            QmIndex::build(&pts, cfg).unwrap(),
            QmIndex::build(&pts, cfg).unwrap()
        );
        let other = QmIndex::build(&pts, IndexConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(other.nodes(), QmIndex::build(&pts, cfg).unwrap().nodes());
    }

    #[test]
    fn duplicate_points_still_terminate() {
        let base = Sample::new(vec![1.0, 3.0, 2.0, 0.0]).unwrap();
        let pts: Vec<Sample> = (0..40)
            .map(|i| {
                let a = if i % 2 == 0 { 1.0 + i as f64 } else { -2.0 };
                Sample::new(base.values().iter().map(|v| a * v + i as f64).collect()).unwrap()
            })
            .collect();
        let idx = QmIndex::build(
            &pts,
            IndexConfig {
                leaf_size: 3,
                ..Default::default()
            },
        )
        .unwrap();
        idx.validate().unwrap();
        assert!(leaf_sizes(&idx).iter().all(|&s| s <= 3));
    }

    #[test]
    fn build_errors() {
        assert_eq!(
            QmIndex::build(&[], IndexConfig::default()),
            Err(Error::EmptyCorpus)
        );
        let mut pts = corpus(5, 4, 3);
        pts.push(Sample::new(vec![2.0; 4]).unwrap());
        assert_eq!(
            QmIndex::build(&pts, IndexConfig::default()),
            Err(Error::ZeroVariance { index: Some(5) })
        );
        let mut pts = corpus(5, 4, 3);
        pts.push(Sample::new(vec![2.0, 1.0]).unwrap());
        assert!(matches!(
            QmIndex::build(&pts, IndexConfig::default()),
            Err(Error::DimensionMismatch { index: Some(5), .. })
        ));
        let cfg = IndexConfig {
            k_constant: 1.0,
            ..Default::default()
        };
        assert!(QmIndex::build(&corpus(5, 4, 3), cfg).is_err());
        assert!(QmIndex::build_unsound(&corpus(5, 4, 3), cfg).is_ok());
        let cfg = IndexConfig {
            leaf_size: 0,
            ..Default::default()
        };
        assert!(QmIndex::build(&corpus(5, 4, 3), cfg).is_err());
    }

    #[test]
    fn from_parts_rejects_tampering() {
        let idx = QmIndex::build(
            &corpus(50, 5, 4),
            IndexConfig {
                leaf_size: 4,
                ..Default::default()
            },
        )
        .unwrap();
        let ok = QmIndex::from_parts(idx.points().to_vec(), idx.nodes().to_vec(), *idx.config());
        assert_eq!(ok.as_ref(), Ok(&idx));

        let mut nodes = idx.nodes().to_vec();
        if let Node::Internal { mu, .. } = &mut nodes[0] {
            *mu = -1.0;
        }
        assert!(QmIndex::from_parts(idx.points().to_vec(), nodes, *idx.config()).is_err());

        let mut nodes = idx.nodes().to_vec();
        let leaf = nodes
            .iter()
            .position(|n| matches!(n, Node::Leaf { .. }))
            .unwrap();
        nodes[leaf] = Node::Leaf { points: vec![] };
        assert!(QmIndex::from_parts(idx.points().to_vec(), nodes, *idx.config()).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in [
            Strategy::RelaxedK,
            Strategy::ProjectiveAngle,
            Strategy::Brute,
        ] {
            assert_eq!(s.as_str().parse::<Strategy>().unwrap(), s);
        }
        assert!("fast".parse::<Strategy>().is_err());
    }
}
