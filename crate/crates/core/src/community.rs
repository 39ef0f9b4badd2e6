//! The community network: passengers linked by how often they travel
//! together across different trips.
//!
//! For a pair `u, v` let `g_t` be the number of atomic groups on trip `t`
//! containing both, and `g = Σ g_t`. Their connection strength is
//!
//! ```text
//! s = g(g - 1)/2 - Σ_t g_t(g_t - 1)/2
//! ```
//!
//! i.e. the number of group pairs holding both passengers that lie on
//! different trips. Pairs only ever seen together on one trip get `s = 0` and
//! are not part of the network.

use std::collections::{BTreeMap, HashMap};

use crate::cliques::AtomicGroup;
use crate::ingest::{PassengerId, TripId};
use crate::transfer::TransferGraph;

/// How often a passenger pair shares an atomic group, per trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoMembership {
    pub u: PassengerId,
    pub v: PassengerId,
    /// Every value is at least 1.
    pub per_trip: BTreeMap<TripId, u64>,
}

impl CoMembership {
    pub fn new(u: PassengerId, v: PassengerId, per_trip: impl IntoIterator<Item = (TripId, u64)>) -> Self {
        let (u, v) = if u <= v { (u, v) } else { (v, u) };
        CoMembership {
            u,
            v,
            per_trip: per_trip.into_iter().filter(|&(_, c)| c > 0).collect(),
        }
    }

    /// Number of groups containing both passengers.
    pub fn g_total(&self) -> u64 {
        self.per_trip.values().sum()
    }

    /// Trips on which the pair shares at least one group.
    pub fn trips(&self) -> impl Iterator<Item = TripId> + '_ {
        self.per_trip.keys().copied()
    }
}

fn pairs_of(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Connection strength of a pair from its co-membership tallies.
pub fn connection_strength(cm: &CoMembership) -> u64 {
    pairs_of(cm.g_total()) - cm.per_trip.values().map(|&g| pairs_of(g)).sum::<u64>()
}

/// Tallies co-membership for every passenger pair sharing a group, ordered by
/// `(u, v)`.
pub fn co_memberships(groups: &[AtomicGroup]) -> Vec<CoMembership> {
    let mut tallies: HashMap<(PassengerId, PassengerId), BTreeMap<TripId, u64>> = HashMap::new();
    for g in groups {
        for (i, &u) in g.members.iter().enumerate() {
            for &v in &g.members[i + 1..] {
                *tallies.entry((u, v)).or_default().entry(g.trip).or_insert(0) += 1;
            }
        }
    }
    let mut out: Vec<CoMembership> = tallies
        .into_iter()
        .map(|((u, v), per_trip)| CoMembership { u, v, per_trip })
        .collect();
    out.sort_unstable_by_key(|c| (c.u, c.v));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CommunityEdge {
    pub u: PassengerId,
    pub v: PassengerId,
    pub strength: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommunityGraph {
    nodes: Vec<PassengerId>,
    /// Sorted by `(u, v)`, `u < v`, strength at least 1.
    edges: Vec<CommunityEdge>,
}

impl CommunityGraph {
    /// Builds a graph from weighted pairs, dropping zero-strength pairs. Nodes
    /// are the endpoints of the remaining edges.
    pub fn from_edges(edges: impl IntoIterator<Item = CommunityEdge>) -> CommunityGraph {
        let mut edges: Vec<CommunityEdge> = edges
            .into_iter()
            .filter(|e| e.strength > 0 && e.u != e.v)
            .map(|e| {
                if e.u < e.v {
                    e
                } else {
                    CommunityEdge { u: e.v, v: e.u, ..e }
                }
            })
            .collect();
        edges.sort_unstable();
        edges.dedup_by_key(|e| (e.u, e.v));
        let mut nodes: Vec<PassengerId> = edges.iter().flat_map(|e| [e.u, e.v]).collect();
        nodes.sort_unstable();
        nodes.dedup();
        CommunityGraph { nodes, edges }
    }

    pub fn nodes(&self) -> &[PassengerId] {
        &self.nodes
    }

    pub fn edges(&self) -> &[CommunityEdge] {
        &self.edges
    }

    pub fn strength(&self, a: PassengerId, b: PassengerId) -> Option<u64> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.edges
            .binary_search_by(|e| (e.u, e.v).cmp(&(u, v)))
            .ok()
            .map(|i| self.edges[i].strength)
    }
}

/// Builds the community network from atomic groups using the closed form.
pub fn build_community_graph(groups: &[AtomicGroup]) -> CommunityGraph {
    CommunityGraph::from_edges(co_memberships(groups).iter().map(|cm| CommunityEdge {
        u: cm.u,
        v: cm.v,
        strength: connection_strength(cm),
    }))
}

/// Builds the community network incrementally from transfer edges: every
/// transfer edge adds one to the strength of each passenger pair it carries.
/// Agrees with [`build_community_graph`] when `f` was built from the same
/// groups.
pub fn community_graph_from_transfers(f: &TransferGraph) -> CommunityGraph {
    let mut strength: HashMap<(PassengerId, PassengerId), u64> = HashMap::new();
    for e in f.edges() {
        for (i, &u) in e.shared.iter().enumerate() {
            for &v in &e.shared[i + 1..] {
                *strength.entry((u, v)).or_insert(0) += 1;
            }
        }
    }
    CommunityGraph::from_edges(
        strength
            .into_iter()
            .map(|((u, v), strength)| CommunityEdge { u, v, strength }),
    )
}

/// A connected set of passengers left after filtering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    /// Ascending.
    pub members: Vec<PassengerId>,
}

impl Community {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Drops edges weaker than `min_strength`, then repeatedly drops nodes with
/// fewer than `min_degree` neighbours until none remain, and returns the
/// connected components, largest first (ties by smallest member).
pub fn extract_communities(h: &CommunityGraph, min_strength: u64, min_degree: usize) -> Vec<Community> {
    let n = h.nodes.len();
    let local = |p: PassengerId| h.nodes.binary_search(&p).expect("edge endpoint is a node");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in h.edges.iter().filter(|e| e.strength >= min_strength) {
        let (a, b) = (local(e.u), local(e.v));
        adj[a].push(b);
        adj[b].push(a);
    }

    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut queue: Vec<usize> = (0..n).filter(|&i| degree[i] < min_degree).collect();
    while let Some(i) = queue.pop() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for &j in &adj[i] {
            if alive[j] {
                degree[j] -= 1;
                if degree[j] < min_degree {
                    queue.push(j);
                }
            }
        }
    }

    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if !alive[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(h.nodes[i]);
            for &j in &adj[i] {
                if alive[j] && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        out.push(Community { members });
    }
    out.sort_by(|a, b| b.size().cmp(&a.size()).then(a.members[0].cmp(&b.members[0])));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(per_trip: &[(u32, u64)]) -> CoMembership {
        CoMembership::new(
            PassengerId(0),
            PassengerId(1),
            per_trip.iter().map(|&(t, g)| (TripId(t), g)),
        )
    }

    fn group(id: u32, trip: u32, members: &[u32]) -> AtomicGroup {
        AtomicGroup {
            id: crate::GroupId(id),
            trip: TripId(trip),
            members: members.iter().map(|&m| PassengerId(m)).collect(),
        }
    }

    fn edge(u: u32, v: u32, strength: u64) -> CommunityEdge {
        CommunityEdge {
            u: PassengerId(u),
            v: PassengerId(v),
            strength,
        }
    }

    #[test]
    fn strength_examples() {
        assert_eq!(connection_strength(&cm(&[(1, 2), (2, 1)])), 2);
        assert_eq!(connection_strength(&cm(&[(3, 3), (4, 2)])), 6);
        assert_eq!(connection_strength(&cm(&[(1, 4)])), 0);
        assert_eq!(connection_strength(&cm(&[])), 0);
    }

    #[test]
    fn two_shared_trips_give_strength_one() {
        let h = build_community_graph(&[group(0, 0, &[0, 1]), group(1, 1, &[0, 1])]);
        assert_eq!(h.edges(), &[edge(0, 1, 1)]);
        assert_eq!(h.nodes(), &[PassengerId(0), PassengerId(1)]);
    }

    #[test]
    fn single_trip_pairs_are_absent() {
        let h = build_community_graph(&[group(0, 0, &[0, 1, 2]), group(1, 0, &[0, 1, 3])]);
        assert!(h.edges().is_empty());
        assert!(h.nodes().is_empty());
    }

    #[test]
    fn strength_lookup_is_symmetric() {
        let h = CommunityGraph::from_edges([edge(3, 1, 4), edge(1, 2, 0)]);
        assert_eq!(h.strength(PassengerId(1), PassengerId(3)), Some(4));
        assert_eq!(h.strength(PassengerId(3), PassengerId(1)), Some(4));
        assert_eq!(h.strength(PassengerId(1), PassengerId(2)), None);
        assert_eq!(h.nodes().len(), 2);
    }

    #[test]
    fn identity_filter_returns_components() {
        let h = CommunityGraph::from_edges([edge(0, 1, 1), edge(1, 2, 1), edge(5, 6, 3)]);
        let c = extract_communities(&h, 0, 0);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].members, vec![PassengerId(0), PassengerId(1), PassengerId(2)]);
        assert_eq!(c[1].size(), 2);
    }

    #[test]
    fn star_collapses_under_degree_two() {
        let h = CommunityGraph::from_edges((1..=5).map(|leaf| edge(0, leaf, 9)));
        assert!(extract_communities(&h, 0, 2).is_empty());
    }

    #[test]
    fn cascade_is_iterated_to_fixed_point() {
        // Triangle 0-1-2 with a tail 2-3-4: the tail peels off, the triangle stays.
        let h = CommunityGraph::from_edges([
            edge(0, 1, 1),
            edge(1, 2, 1),
            edge(0, 2, 1),
            edge(2, 3, 1),
            edge(3, 4, 1),
        ]);
        let c = extract_communities(&h, 0, 2);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].members, vec![PassengerId(0), PassengerId(1), PassengerId(2)]);
    }

    #[test]
    fn strength_threshold_splits() {
        let h = CommunityGraph::from_edges([edge(0, 1, 10), edge(1, 2, 4), edge(2, 3, 10)]);
        let c = extract_communities(&h, 5, 0);
        assert_eq!(c.len(), 2);
        assert!(c.iter().all(|c| c.size() == 2));
    }
}
