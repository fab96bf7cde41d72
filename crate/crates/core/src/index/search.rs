use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use super::bounds::{angle_over, relaxed_over};
use super::{Node, QmIndex, Strategy};
use crate::distance::{center_and_normalize, folded_angle, unit_distance};
use crate::error::{Error, Result};
use crate::sample::{CenteredUnit, Distance, Sample};

/// A subtree is skipped only when its bound exceeds the search radius by
/// more than this, so rounding in the bounds cannot cause a dismissal.
const PRUNE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    /// Offset of the point in the corpus.
    pub id: usize,
    pub distance: Distance,
}

/// Nearest neighbours ordered by ascending distance, ties by ascending id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QueryResult {
    pub neighbors: Vec<Neighbor>,
    pub nodes_visited: u64,
    pub distance_evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RangeResult {
    /// Ascending.
    pub ids: Vec<usize>,
    pub nodes_visited: u64,
    pub distance_evaluations: u64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    distance: f64,
    id: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.id.cmp(&other.id))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidConfig("k must be at least 1"))
    } else {
        Ok(())
    }
}

fn check_query(points: &[CenteredUnit], query: &CenteredUnit) -> Result<()> {
    let dim = points.first().ok_or(Error::EmptyCorpus)?.len();
    if query.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: query.len(),
            index: None,
        });
    }
    Ok(())
}

fn sorted_neighbors(mut all: Vec<Candidate>) -> Vec<Neighbor> {
    all.sort_unstable();
    all.into_iter()
        .map(|c| Neighbor {
            id: c.id,
            distance: Distance::clamped(c.distance),
        })
        .collect()
}

/// Linear scan; the reference answer for every index query.
pub fn brute_force_knn(
    points: &[CenteredUnit],
    query: &CenteredUnit,
    k: usize,
) -> Result<QueryResult> {
    check_k(k)?;
    check_query(points, query)?;
    let mut all: Vec<Candidate> = points
        .iter()
        .enumerate()
        .map(|(id, p)| Candidate {
            distance: unit_distance(query.values(), p.values()).get(),
            id,
        })
        .collect();
    all.sort_unstable();
    all.truncate(k);
    Ok(QueryResult {
        neighbors: sorted_neighbors(all),
        nodes_visited: 0,
        distance_evaluations: points.len() as u64,
    })
}

struct Search<'a> {
    index: &'a QmIndex,
    query: &'a [f64],
    distances: Vec<f64>,
    angles: Vec<f64>,
    nodes_visited: u64,
    distance_evaluations: u64,
}

impl<'a> Search<'a> {
    fn new(index: &'a QmIndex, query: &'a [f64]) -> Self {
        let n = index.points.len();
        Search {
            index,
            query,
            distances: alloc::vec![f64::NAN; n],
            angles: alloc::vec![f64::NAN; n],
            nodes_visited: 0,
            distance_evaluations: 0,
        }
    }

    /// Distance to point `id`, and whether this is its first evaluation.
    fn distance(&mut self, id: usize) -> (f64, bool) {
        let cached = self.distances[id];
        if !cached.is_nan() {
            return (cached, false);
        }
        let p = self.index.points[id].values();
        let d = unit_distance(self.query, p).get();
        if self.index.config.strategy == Strategy::ProjectiveAngle {
            self.angles[id] = folded_angle(self.query, p);
        }
        self.distances[id] = d;
        self.distance_evaluations += 1;
        (d, true)
    }

    fn child_bound(&self, vantage: usize, env: &super::Envelope) -> f64 {
        let d = self.distances[vantage];
        let cfg = &self.index.config;
        match cfg.strategy {
            Strategy::RelaxedK => {
                relaxed_over(d, env.min_distance, env.max_distance, cfg.k_constant)
            }
            // also taking the K = 2 bound keeps this never looser than relaxed-k
            Strategy::ProjectiveAngle => angle_over(
                self.angles[vantage],
                env.min_angle,
                env.max_angle,
            )
            .max(relaxed_over(d, env.min_distance, env.max_distance, 2.0)),
            Strategy::Brute => 0.0,
        }
    }

    /// Depth-first walk. `radius` is re-read after each child, `visit` sees
    /// every freshly evaluated point.
    fn walk(
        &mut self,
        at: usize,
        radius: &mut dyn FnMut() -> f64,
        visit: &mut dyn FnMut(f64, usize),
    ) {
        self.nodes_visited += 1;
        let index = self.index;
        match &index.nodes[at] {
            Node::Leaf { points } => {
                for &p in points {
                    let (d, fresh) = self.distance(p);
                    if fresh {
                        visit(d, p);
                    }
                }
            }
            Node::Internal {
                vantage,
                mu,
                near,
                far,
                near_envelope,
                far_envelope,
            } => {
                let (d, fresh) = self.distance(*vantage);
                if fresh {
                    visit(d, *vantage);
                }
                let order = if d <= *mu {
                    [(*near, near_envelope), (*far, far_envelope)]
                } else {
                    [(*far, far_envelope), (*near, near_envelope)]
                };
                for (child, env) in order {
                    if self.child_bound(*vantage, env) > radius() + PRUNE_SLACK {
                        continue;
                    }
                    self.walk(child, radius, visit);
                }
            }
        }
    }
}

impl QmIndex {
    fn center_query(&self, query: &Sample) -> Result<CenteredUnit> {
        let q = center_and_normalize(query)?;
        check_query(&self.points, &q)?;
        Ok(q)
    }

    /// The `k` nearest points to `query`; identical to [`brute_force_knn`].
    pub fn knn(&self, query: &Sample, k: usize) -> Result<QueryResult> {
        let q = self.center_query(query)?;
        self.knn_unit(&q, k)
    }

    pub fn knn_unit(&self, query: &CenteredUnit, k: usize) -> Result<QueryResult> {
        check_k(k)?;
        check_query(&self.points, query)?;
        if self.config.strategy == Strategy::Brute {
            return brute_force_knn(&self.points, query, k);
        }
        let heap = core::cell::RefCell::new(BinaryHeap::<Candidate>::with_capacity(k + 1));
        let mut search = Search::new(self, query.values());
        search.walk(
            0,
            &mut || {
                let heap = heap.borrow();
                if heap.len() < k {
                    f64::INFINITY
                } else {
                    heap.peek().map_or(f64::INFINITY, |c| c.distance)
                }
            },
            &mut |distance, id| {
                let mut heap = heap.borrow_mut();
                let c = Candidate { distance, id };
                if heap.len() < k {
                    heap.push(c);
                } else if heap.peek().is_some_and(|top| c < *top) {
                    heap.pop();
                    heap.push(c);
                }
            },
        );
        Ok(QueryResult {
            neighbors: sorted_neighbors(heap.into_inner().into_vec()),
            nodes_visited: search.nodes_visited,
            distance_evaluations: search.distance_evaluations,
        })
    }

    /// All ids with `d(query, p) <= r`, ascending.
    pub fn range_query(&self, query: &Sample, r: f64) -> Result<RangeResult> {
        let q = self.center_query(query)?;
        self.range_query_unit(&q, r)
    }

    pub fn range_query_unit(&self, query: &CenteredUnit, r: f64) -> Result<RangeResult> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Domain {
                what: "radius",
                value: r,
            });
        }
        check_query(&self.points, query)?;
        if self.config.strategy == Strategy::Brute {
            let ids = self
                .points
                .iter()
                .enumerate()
                .filter(|(_, p)| unit_distance(query.values(), p.values()).get() <= r)
                .map(|(i, _)| i)
                .collect();
            return Ok(RangeResult {
                ids,
                nodes_visited: 0,
                distance_evaluations: self.points.len() as u64,
            });
        }
        let mut ids = Vec::new();
        let mut search = Search::new(self, query.values());
        search.walk(0, &mut || r, &mut |d, id| {
            if d <= r {
                ids.push(id);
            }
        });
        ids.sort_unstable();
        Ok(RangeResult {
            ids,
            nodes_visited: search.nodes_visited,
            distance_evaluations: search.distance_evaluations,
        })
    }
}
