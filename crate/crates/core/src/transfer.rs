//! The directed transfer network over atomic groups, and trip-pair traffic.
//!
//! Two groups on different trips are linked when they share a passenger. The
//! edge weight is the number of shared passengers and the edge points along
//! the transfer, decided from contact start times:
//!
//! * with two or more shared passengers, compare the earliest contact among
//!   the shared passengers on each trip;
//! * with a single shared passenger `p`, compare the earliest contact of `p`
//!   with any other member of each group;
//! * equal minima go from the trip that starts first, then from the
//!   lexicographically smaller trip id;
//! * if a side has no contact at all (a singleton group), `p`'s boarding times
//!   on the two trips decide, with the same tie-breaks.

use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::cliques::{AtomicGroup, GroupId};
use crate::contact::ContactGraph;
use crate::error::{Error, Result};
use crate::ingest::{Dataset, Minutes, PassengerId, TripId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferEdge {
    pub from: GroupId,
    pub to: GroupId,
    /// Passengers in both groups, ascending.
    pub shared: Vec<PassengerId>,
}

impl TransferEdge {
    pub fn weight(&self) -> usize {
        self.shared.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferGraph {
    groups: Vec<AtomicGroup>,
    /// Sorted by `(from, to)`.
    edges: Vec<TransferEdge>,
}

impl TransferGraph {
    pub fn groups(&self) -> &[AtomicGroup] {
        &self.groups
    }

    pub fn group(&self, id: GroupId) -> &AtomicGroup {
        &self.groups[id.index()]
    }

    pub fn edges(&self) -> &[TransferEdge] {
        &self.edges
    }

    /// Node weight: the number of passengers in the group.
    pub fn node_weight(&self, id: GroupId) -> usize {
        self.group(id).weight()
    }
}

fn sorted_intersection(a: &[PassengerId], b: &[PassengerId]) -> Vec<PassengerId> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

struct Orienter<'a> {
    ds: &'a Dataset,
    contact_start: HashMap<(TripId, PassengerId, PassengerId), Minutes>,
}

impl Orienter<'_> {
    fn alpha(&self, trip: TripId, p: PassengerId, q: PassengerId) -> Result<Minutes> {
        let key = if p < q { (trip, p, q) } else { (trip, q, p) };
        self.contact_start.get(&key).copied().ok_or_else(|| {
            Error::Structure(format!(
                "group members {} and {} have no contact on trip {}",
                self.ds.passenger_name(p),
                self.ds.passenger_name(q),
                self.ds.trip_name(trip)
            ))
        })
    }

    /// Earliest contact start that decides the direction on `g`'s side.
    fn key(&self, g: &AtomicGroup, shared: &[PassengerId]) -> Result<Option<Minutes>> {
        let mut best: Option<Minutes> = None;
        if let [p0] = shared {
            for &q in &g.members {
                if q != *p0 {
                    let a = self.alpha(g.trip, *p0, q)?;
                    best = Some(best.map_or(a, |b| b.min(a)));
                }
            }
        } else {
            for (i, &p) in shared.iter().enumerate() {
                for &q in &shared[i + 1..] {
                    let a = self.alpha(g.trip, p, q)?;
                    best = Some(best.map_or(a, |b| b.min(a)));
                }
            }
        }
        Ok(best)
    }

    fn trip_order(&self, a: TripId, b: TripId) -> Ordering {
        self.ds
            .trip(a)
            .start_time
            .cmp(&self.ds.trip(b).start_time)
            .then(a.cmp(&b))
    }

    /// True when the transfer goes from `a` to `b`.
    fn a_to_b(&self, a: &AtomicGroup, b: &AtomicGroup, shared: &[PassengerId]) -> Result<bool> {
        let primary = match (self.key(a, shared)?, self.key(b, shared)?) {
            (Some(ka), Some(kb)) => ka.cmp(&kb),
            _ => {
                let p0 = shared[0];
                let board = |t: TripId| {
                    self.ds.leg(p0, t).map(|l| l.board_time).ok_or_else(|| {
                        Error::Structure(format!(
                            "passenger {} has no leg on trip {}",
                            self.ds.passenger_name(p0),
                            self.ds.trip_name(t)
                        ))
                    })
                };
                board(a.trip)?.cmp(&board(b.trip)?)
            }
        };
        Ok(primary.then_with(|| self.trip_order(a.trip, b.trip)) == Ordering::Less)
    }
}

/// Builds the transfer network. `groups` must be the atomic groups of
/// `contacts` over `ds`, with `groups[i].id == i`.
pub fn build_transfer_graph(groups: &[AtomicGroup], contacts: &ContactGraph, ds: &Dataset) -> Result<TransferGraph> {
    if let Some((i, g)) = groups.iter().enumerate().find(|(i, g)| g.id.index() != *i) {
        return Err(Error::Structure(format!("group at position {i} has id {}", g.id.0)));
    }

    let mut by_passenger: Vec<Vec<GroupId>> = vec![Vec::new(); ds.passenger_count()];
    for g in groups {
        for &p in &g.members {
            by_passenger
                .get_mut(p.index())
                .ok_or_else(|| Error::Structure(format!("group {} names an unknown passenger", g.id.0)))?
                .push(g.id);
        }
    }

    let orienter = Orienter {
        ds,
        contact_start: contacts
            .edges()
            .iter()
            .map(|e| ((e.trip, e.u, e.v), e.contact_start))
            .collect(),
    };

    // Each linked pair is emitted once, by its smallest shared passenger.
    let edges: Result<Vec<Vec<TransferEdge>>> = by_passenger
        .par_iter()
        .enumerate()
        .map(|(p, gids)| {
            let p = PassengerId(p as u32);
            let mut out = Vec::new();
            for (i, &ga) in gids.iter().enumerate() {
                for &gb in &gids[i + 1..] {
                    let (a, b) = (&groups[ga.index()], &groups[gb.index()]);
                    if a.trip == b.trip {
                        continue;
                    }
                    let shared = sorted_intersection(&a.members, &b.members);
                    if shared[0] != p {
                        continue;
                    }
                    let (from, to) = if orienter.a_to_b(a, b, &shared)? {
                        (ga, gb)
                    } else {
                        (gb, ga)
                    };
                    out.push(TransferEdge { from, to, shared });
                }
            }
            Ok(out)
        })
        .collect();

    let mut edges: Vec<TransferEdge> = edges?.into_iter().flatten().collect();
    edges.sort_unstable_by_key(|e| (e.from, e.to));
    Ok(TransferGraph {
        groups: groups.to_vec(),
        edges,
    })
}

/// Group traffic between two trips; `trip_i < trip_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TripPairScore {
    pub trip_i: TripId,
    pub trip_j: TripId,
    pub m: u64,
}

/// Sums edge weights between the groups of every pair of trips. Sorted by
/// descending `m`, ties by trip pair.
///
/// A passenger who sits in several overlapping groups on both trips is
/// counted once per group pair, so `m` measures group movements rather than
/// distinct passengers.
pub fn score_trip_pairs(f: &TransferGraph) -> Vec<TripPairScore> {
    let mut totals: HashMap<(TripId, TripId), u64> = HashMap::new();
    for e in f.edges() {
        let (a, b) = (f.group(e.from).trip, f.group(e.to).trip);
        let key = if a < b { (a, b) } else { (b, a) };
        *totals.entry(key).or_insert(0) += e.weight() as u64;
    }
    let mut scores: Vec<TripPairScore> = totals
        .into_iter()
        .map(|((trip_i, trip_j), m)| TripPairScore { trip_i, trip_j, m })
        .collect();
    scores.sort_unstable_by(|x, y| y.m.cmp(&x.m).then((x.trip_i, x.trip_j).cmp(&(y.trip_i, y.trip_j))));
    scores
}

/// The `k` busiest trip pairs (all of them if there are fewer).
pub fn top_k_pairs(scores: &[TripPairScore], k: usize) -> Result<Vec<TripPairScore>> {
    if k == 0 {
        return Err(Error::Config("top-k must be at least 1".into()));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|x, y| y.m.cmp(&x.m).then((x.trip_i, x.trip_j).cmp(&(y.trip_i, y.trip_j))));
    sorted.truncate(k);
    Ok(sorted)
}
