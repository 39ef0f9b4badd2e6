#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use proptest::prelude::*;
use transitmesh::{Dataset, LegRecord, PassengerId, TripId, TripRecord};

/// Builds a dataset from `(trip, start)` and `(passenger, trip, board, alight)` tuples.
pub fn dataset(trips: &[(&str, i64)], legs: &[(&str, &str, i64, i64)]) -> Dataset {
    Dataset::from_records(
        trips.iter().map(|&(t, s)| TripRecord::new(t, "r", s)).collect(),
        legs.iter().map(|&(p, t, b, a)| LegRecord::new(p, t, b, a)).collect(),
    )
    .unwrap()
}

pub fn pid(ds: &Dataset, name: &str) -> PassengerId {
    ds.passenger_id(name).unwrap()
}

pub fn tid(ds: &Dataset, name: &str) -> TripId {
    ds.trip_id(name).unwrap()
}

/// Half-open overlap of positive length.
pub fn overlaps(a: (u32, u32), b: (u32, u32)) -> bool {
    a.0.max(b.0) < a.1.min(b.1)
}

pub fn overlap_len(a: (u32, u32), b: (u32, u32)) -> u32 {
    a.1.min(b.1).saturating_sub(a.0.max(b.0))
}

/// All maximal cliques of an `n`-vertex graph by checking every vertex subset.
pub fn brute_force_cliques(n: usize, adj: impl Fn(usize, usize) -> bool) -> BTreeSet<BTreeSet<usize>> {
    assert!(n <= 20);
    let mut nbr = vec![0u32; n];
    for (i, m) in nbr.iter_mut().enumerate() {
        for j in 0..n {
            if i != j && adj(i, j) {
                *m |= 1 << j;
            }
        }
    }
    let total = 1usize << n;
    let mut is_clique = vec![false; total];
    is_clique[0] = true;
    let mut out = BTreeSet::new();
    for mask in 1..total {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        is_clique[mask] = is_clique[rest] && (nbr[low] as usize & rest) == rest;
        if !is_clique[mask] {
            continue;
        }
        let maximal = (0..n).all(|v| mask & (1 << v) != 0 || (nbr[v] as usize & mask) != mask);
        if maximal {
            out.insert((0..n).filter(|v| mask & (1 << v) != 0).collect());
        }
    }
    out
}

pub fn as_sets(cliques: &[Vec<PassengerId>]) -> BTreeSet<BTreeSet<PassengerId>> {
    cliques.iter().map(|c| c.iter().copied().collect()).collect()
}

/// Σ over unordered trip pairs of the product of per-trip counts.
pub fn cross_trip_products(per_trip: &[u64]) -> u64 {
    let mut s = 0;
    for a in 0..per_trip.len() {
        for b in a + 1..per_trip.len() {
            s += per_trip[a] * per_trip[b];
        }
    }
    s
}

/// For every unordered trip pair, Σ |A ∩ B| over groups A on one trip and B on the other.
pub fn m_oracle(groups_by_trip: &BTreeMap<TripId, Vec<BTreeSet<PassengerId>>>) -> BTreeMap<(TripId, TripId), u64> {
    let trips: Vec<&TripId> = groups_by_trip.keys().collect();
    let mut out = BTreeMap::new();
    for (i, &a) in trips.iter().enumerate() {
        for &b in &trips[i + 1..] {
            let mut m = 0u64;
            for ga in &groups_by_trip[a] {
                for gb in &groups_by_trip[b] {
                    m += ga.intersection(gb).count() as u64;
                }
            }
            if m > 0 {
                out.insert((*a, *b), m);
            }
        }
    }
    out
}

/// Vertices within `hops` of any seed in an undirected adjacency list.
pub fn bfs_within(adj: &[Vec<usize>], seeds: &[usize], hops: usize) -> BTreeSet<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::new();
    for &s in seeds {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(u) = queue.pop_front() {
        if dist[u] == hops {
            continue;
        }
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    (0..adj.len()).filter(|&v| dist[v] != usize::MAX).collect()
}

/// Legs of one trip as `(board, alight)` pairs, passenger `i` named `p{i:02}`.
pub fn single_trip(intervals: &[(u32, u32)]) -> Dataset {
    let legs: Vec<(String, u32, u32)> = intervals
        .iter()
        .enumerate()
        .map(|(i, &(b, a))| (format!("p{i:02}"), b, a))
        .collect();
    Dataset::from_records(
        vec![TripRecord::new("t0", "r0", 0)],
        legs.iter()
            .map(|(p, b, a)| LegRecord::new(p, "t0", i64::from(*b), i64::from(*a)))
            .collect(),
    )
    .unwrap()
}

/// Up to `max` on-board intervals within a two-hour trip.
pub fn intervals(max: usize) -> impl Strategy<Value = Vec<(u32, u32)>> {
    prop::collection::vec((0u32..90, 1u32..45).prop_map(|(b, len)| (b, b + len)), 1..=max)
}

/// A small multi-trip dataset. Trips start at `10 * index`; each passenger
/// rides up to three distinct trips.
pub fn multi_trip_dataset(max_trips: usize, max_passengers: usize) -> impl Strategy<Value = Dataset> {
    (2..=max_trips, 2..=max_passengers).prop_flat_map(|(trips, passengers)| {
        let leg = (0..trips, 0u32..40, 1u32..30);
        prop::collection::vec(prop::collection::vec(leg, 1..=3), passengers).prop_map(move |riders| {
            let trip_records: Vec<TripRecord> = (0..trips)
                .map(|t| TripRecord::new(&format!("t{t:02}"), "r", 10 * t as i64))
                .collect();
            let mut legs = Vec::new();
            for (p, rides) in riders.iter().enumerate() {
                let mut seen = BTreeSet::new();
                for &(t, off, len) in rides {
                    if seen.insert(t) {
                        let b = 10 * t as i64 + i64::from(off);
                        legs.push(LegRecord::new(
                            &format!("p{p:02}"),
                            &format!("t{t:02}"),
                            b,
                            b + i64::from(len),
                        ));
                    }
                }
            }
            Dataset::from_records(trip_records, legs).unwrap()
        })
    })
}
