//! Atomic passenger groups: maximal cliques of each trip's contact subgraph.

mod bron_kerbosch;
mod interval;

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::contact::{ContactEdge, ContactGraph};
use crate::ingest::{Dataset, PassengerId, TripId};

use self::bron_kerbosch::{maximal_cliques, LocalGraph};

pub use self::interval::interval_cliques;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupId(pub u32);

impl GroupId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A maximal clique of one trip's contact subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicGroup {
    pub id: GroupId,
    pub trip: TripId,
    /// Sorted ascending, never empty.
    pub members: Vec<PassengerId>,
}

impl AtomicGroup {
    pub fn weight(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, p: PassengerId) -> bool {
        self.members.binary_search(&p).is_ok()
    }
}

/// The part of a contact graph belonging to one trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripSubgraph {
    pub trip: TripId,
    /// Every passenger with a leg on the trip, ascending, whether or not any
    /// of their contacts survived thresholding.
    pub nodes: Vec<PassengerId>,
    pub edges: Vec<ContactEdge>,
}

/// Splits a contact graph along trips. A passenger riding several trips
/// appears in each of their subgraphs.
pub fn partition(graph: &ContactGraph, ds: &Dataset) -> Vec<TripSubgraph> {
    ds.trip_ids()
        .filter_map(|trip| {
            let mut nodes: Vec<PassengerId> = ds.legs_of_trip(trip).map(|l| l.passenger).collect();
            let edges = graph.trip_edges(trip).to_vec();
            if nodes.is_empty() && edges.is_empty() {
                return None;
            }
            nodes.extend(edges.iter().flat_map(|e| [e.u, e.v]));
            nodes.sort_unstable();
            nodes.dedup();
            Some(TripSubgraph { trip, nodes, edges })
        })
        .collect()
}

/// Maximal cliques of one trip subgraph (Bron–Kerbosch with Tomita pivoting
/// inside a degeneracy-ordered outer loop). Passengers without contacts come
/// out as singletons. Each clique is sorted; the list is sorted.
pub fn bron_kerbosch(sub: &TripSubgraph) -> Vec<Vec<PassengerId>> {
    cliques_of(&sub.nodes, sub.edges.iter().map(ContactEdge::pair))
}

/// Maximal cliques of the whole contact graph with per-trip edges collapsed,
/// ignoring trips altogether.
pub fn raw_cliques(graph: &ContactGraph) -> Vec<Vec<PassengerId>> {
    cliques_of(graph.nodes(), graph.simple_pairs())
}

fn cliques_of(
    nodes: &[PassengerId],
    pairs: impl IntoIterator<Item = (PassengerId, PassengerId)>,
) -> Vec<Vec<PassengerId>> {
    let local = |p: PassengerId| nodes.binary_search(&p).expect("edge endpoint is a node") as u32;
    let g = LocalGraph::new(nodes.len(), pairs.into_iter().map(|(u, v)| (local(u), local(v))));
    maximal_cliques(&g)
        .into_iter()
        .map(|c| c.into_iter().map(|i| nodes[i as usize]).collect())
        .collect()
}

/// Wall-clock comparison of whole-graph and per-trip enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport {
    pub trips: usize,
    pub partitioned: Duration,
    pub raw: Option<Duration>,
    pub raw_clique_count: Option<usize>,
}

impl TimingReport {
    /// raw / partitioned, when the raw run was requested.
    pub fn speedup(&self) -> Option<f64> {
        self.raw
            .map(|r| r.as_secs_f64() / self.partitioned.as_secs_f64().max(1e-9))
    }
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    /// Ids are dense, in trip order then clique order.
    pub groups: Vec<AtomicGroup>,
    pub timing: TimingReport,
}

/// Enumerates the atomic groups of every trip. With `with_raw`, also times an
/// enumeration over the unpartitioned graph for comparison.
pub fn enumerate_all(graph: &ContactGraph, ds: &Dataset, with_raw: bool) -> Enumeration {
    let started = Instant::now();
    let subs = partition(graph, ds);
    let per_trip: Vec<(TripId, Vec<Vec<PassengerId>>)> = subs.par_iter().map(|s| (s.trip, bron_kerbosch(s))).collect();
    let partitioned = started.elapsed();

    let groups = number_groups(per_trip);

    let (raw, raw_clique_count) = if with_raw {
        let started = Instant::now();
        let cliques = raw_cliques(graph);
        (Some(started.elapsed()), Some(cliques.len()))
    } else {
        (None, None)
    };

    Enumeration {
        groups,
        timing: TimingReport {
            trips: subs.len(),
            partitioned,
            raw,
            raw_clique_count,
        },
    }
}

/// Assigns dense group ids in the given order.
pub fn number_groups(per_trip: Vec<(TripId, Vec<Vec<PassengerId>>)>) -> Vec<AtomicGroup> {
    per_trip
        .into_iter()
        .flat_map(|(trip, cliques)| cliques.into_iter().map(move |members| (trip, members)))
        .enumerate()
        .map(|(i, (trip, members))| AtomicGroup {
            id: GroupId(i as u32),
            trip,
            members,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{build_contact_graph, prune};
    use crate::ingest::{LegRecord, TripRecord};

    fn ds(legs: &[(&str, &str, i64, i64)]) -> Dataset {
        let trips = vec![
            TripRecord::new("t1", "r1", 400),
            TripRecord::new("t2", "r2", 400),
            TripRecord::new("t3", "r3", 400),
        ];
        Dataset::from_records(
            trips,
            legs.iter().map(|&(p, t, b, a)| LegRecord::new(p, t, b, a)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn partition_per_trip() {
        let d = ds(&[
            ("a", "t1", 0, 10),
            ("b", "t1", 5, 15),
            ("a", "t2", 20, 30),
            ("c", "t2", 25, 35),
        ]);
        let g = build_contact_graph(&d);
        let subs = partition(&g, &d);
        assert_eq!(subs.len(), 2);
        let a = d.passenger_id("a").unwrap();
        assert!(subs.iter().all(|s| s.nodes.contains(&a)));
        assert_eq!(subs.iter().map(|s| s.edges.len()).sum::<usize>(), g.edges().len());
    }

    #[test]
    fn lone_rider_is_a_singleton_group() {
        let d = ds(&[("a", "t1", 0, 10), ("b", "t1", 5, 15), ("z", "t3", 0, 10)]);
        let e = enumerate_all(&build_contact_graph(&d), &d, false);
        let sizes: Vec<_> = e.groups.iter().map(|g| (g.trip, g.weight())).collect();
        assert_eq!(sizes, vec![(TripId(0), 2), (TripId(2), 1)]);
        assert_eq!(e.groups[1].id, GroupId(1));
    }

    #[test]
    fn pruned_contacts_leave_singletons() {
        let d = ds(&[("a", "t1", 0, 10), ("b", "t1", 8, 15)]);
        let g = prune(&build_contact_graph(&d), 5);
        let e = enumerate_all(&g, &d, false);
        assert_eq!(e.groups.len(), 2);
        assert!(e.groups.iter().all(|g| g.weight() == 1));
    }

    #[test]
    fn raw_mode_can_merge_across_trips() {
        // a-b meet on t1, b-c on t2, a-c on t3: no trip has a triangle but the
        // collapsed graph does.
        let d = ds(&[
            ("a", "t1", 0, 10),
            ("b", "t1", 0, 10),
            ("b", "t2", 20, 30),
            ("c", "t2", 20, 30),
            ("a", "t3", 40, 50),
            ("c", "t3", 40, 50),
        ]);
        let g = build_contact_graph(&d);
        let e = enumerate_all(&g, &d, true);
        assert_eq!(e.groups.len(), 3);
        assert_eq!(raw_cliques(&g).len(), 1);
        assert_eq!(e.timing.raw_clique_count, Some(1));
        assert!(e.timing.speedup().is_some());
    }
}
