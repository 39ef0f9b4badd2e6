//! The temporal passenger contact network.
//!
//! Two passengers are in contact on a trip when their on-board intervals on
//! that trip overlap for a positive number of minutes. Intervals are treated
//! as half-open, `[board, alight)`, so a passenger alighting at the minute
//! another boards never meets them.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::ingest::{Dataset, Minutes, PassengerId, TripId};

/// A contact between `u < v` on one trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ContactEdge {
    pub trip: TripId,
    pub u: PassengerId,
    pub v: PassengerId,
    pub contact_start: Minutes,
    pub duration: Minutes,
}

impl ContactEdge {
    pub fn pair(&self) -> (PassengerId, PassengerId) {
        (self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactGraph {
    /// Passengers with at least one contact, ascending.
    nodes: Vec<PassengerId>,
    /// Sorted by `(trip, u, v)`.
    edges: Vec<ContactEdge>,
    threshold_tau: Minutes,
}

impl ContactGraph {
    /// Builds a graph from arbitrary edges; the node set is the set of endpoints.
    pub fn from_edges(mut edges: Vec<ContactEdge>, threshold_tau: Minutes) -> ContactGraph {
        for e in &mut edges {
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
        }
        edges.sort_unstable_by_key(|e| (e.trip, e.u, e.v));
        edges.dedup_by_key(|e| (e.trip, e.u, e.v));
        let nodes = endpoints(&edges);
        ContactGraph {
            nodes,
            edges,
            threshold_tau,
        }
    }

    pub fn nodes(&self) -> &[PassengerId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[ContactEdge] {
        &self.edges
    }

    pub fn threshold_tau(&self) -> Minutes {
        self.threshold_tau
    }

    pub fn contains_node(&self, p: PassengerId) -> bool {
        self.nodes.binary_search(&p).is_ok()
    }

    /// The edges of one trip.
    pub fn trip_edges(&self, trip: TripId) -> &[ContactEdge] {
        let lo = self.edges.partition_point(|e| e.trip < trip);
        let hi = self.edges.partition_point(|e| e.trip <= trip);
        &self.edges[lo..hi]
    }

    /// Trips carrying at least one edge, ascending.
    pub fn trips(&self) -> Vec<TripId> {
        let mut trips: Vec<TripId> = self.edges.iter().map(|e| e.trip).collect();
        trips.dedup();
        trips
    }

    /// Distinct unordered passenger pairs, i.e. the graph with parallel
    /// per-trip edges collapsed.
    pub fn simple_pairs(&self) -> Vec<(PassengerId, PassengerId)> {
        let mut pairs: Vec<_> = self.edges.iter().map(ContactEdge::pair).collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }
}

fn endpoints(edges: &[ContactEdge]) -> Vec<PassengerId> {
    let mut nodes: Vec<PassengerId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Contact start and duration of two on-board intervals, if they overlap.
pub fn overlap(a: (Minutes, Minutes), b: (Minutes, Minutes)) -> Option<(Minutes, Minutes)> {
    let start = a.0.max(b.0);
    let end = a.1.min(b.1);
    (end > start).then(|| (start, end - start))
}

/// Builds the unpruned contact network.
pub fn build_contact_graph(ds: &Dataset) -> ContactGraph {
    let per_trip: Vec<Vec<ContactEdge>> = ds
        .trip_ids()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|trip| trip_contacts(ds, trip))
        .collect();
    let edges: Vec<ContactEdge> = per_trip.into_iter().flatten().collect();
    ContactGraph::from_edges(edges, 0)
}

fn trip_contacts(ds: &Dataset, trip: TripId) -> Vec<ContactEdge> {
    // Legs come ordered by board time, so the inner scan can stop at the
    // first leg boarding after `a` alights.
    let legs: Vec<_> = ds.legs_of_trip(trip).collect();
    let mut out = Vec::new();
    for (i, a) in legs.iter().enumerate() {
        for b in &legs[i + 1..] {
            if b.board_time >= a.alight_time {
                break;
            }
            if let Some((contact_start, duration)) =
                overlap((a.board_time, a.alight_time), (b.board_time, b.alight_time))
            {
                let (u, v) = if a.passenger < b.passenger {
                    (a.passenger, b.passenger)
                } else {
                    (b.passenger, a.passenger)
                };
                out.push(ContactEdge {
                    trip,
                    u,
                    v,
                    contact_start,
                    duration,
                });
            }
        }
    }
    out
}

/// Keeps edges lasting at least `tau` minutes and drops passengers left
/// without contacts.
pub fn prune(graph: &ContactGraph, tau: Minutes) -> ContactGraph {
    let edges: Vec<ContactEdge> = graph.edges.iter().filter(|e| e.duration >= tau).copied().collect();
    let nodes = endpoints(&edges);
    ContactGraph {
        nodes,
        edges,
        threshold_tau: tau,
    }
}

/// Degree histogram where degree counts distinct neighbouring passengers.
pub fn degree_distribution(graph: &ContactGraph) -> BTreeMap<usize, usize> {
    let mut neighbours: BTreeMap<PassengerId, BTreeSet<PassengerId>> = BTreeMap::new();
    for (u, v) in graph.simple_pairs() {
        neighbours.entry(u).or_default().insert(v);
        neighbours.entry(v).or_default().insert(u);
    }
    let mut hist = BTreeMap::new();
    for n in neighbours.values() {
        *hist.entry(n.len()).or_insert(0) += 1;
    }
    hist
}
