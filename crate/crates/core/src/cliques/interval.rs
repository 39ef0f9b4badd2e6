//! Maximal cliques of one trip by sweeping interval endpoints.
//!
//! Contacts on a trip are overlaps of on-board intervals, so each trip's
//! subgraph is an interval graph and its maximal cliques are exactly the
//! active sets seen right before an interval closes, provided some interval
//! opened since the last emission.
//!
//! Thresholded contacts keep the same structure: two legs overlap for at
//! least `tau > 0` minutes iff the closed intervals obtained by trimming
//! `tau / 2` off both ends of each leg intersect. Coordinates are doubled to
//! stay in integers.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ingest::{Minutes, PassengerId, TrajectoryLeg};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    Open,
    Close,
}

/// Maximal cliques of the `tau`-thresholded contact subgraph of one trip,
/// sorted like [`super::bron_kerbosch`]'s output. Legs too short to reach
/// `tau` with anyone come out as singletons.
pub fn interval_cliques(legs: &[TrajectoryLeg], tau: Minutes) -> Result<Vec<Vec<PassengerId>>> {
    if let Some(first) = legs.first() {
        if let Some(other) = legs.iter().find(|l| l.trip != first.trip) {
            return Err(Error::Structure(format!(
                "interval_cliques needs legs of one trip, got {} and {}",
                first.trip, other.trip
            )));
        }
    }

    let tau = u64::from(tau);
    let mut out = Vec::new();
    // (time, tie rank, edge, passenger)
    let mut events: Vec<(u64, u8, Edge, PassengerId)> = Vec::with_capacity(2 * legs.len());
    for l in legs {
        let lo = 2 * u64::from(l.board_time) + tau;
        let hi = (2 * u64::from(l.alight_time)).checked_sub(tau);
        match hi {
            Some(hi) if tau == 0 || hi >= lo => {
                // Half-open at tau = 0: a close at t precedes an open at t.
                // Closed for tau > 0: an open at t precedes a close at t.
                let (open_rank, close_rank) = if tau == 0 { (1, 0) } else { (0, 1) };
                events.push((lo, open_rank, Edge::Open, l.passenger));
                events.push((hi, close_rank, Edge::Close, l.passenger));
            }
            _ => out.push(vec![l.passenger]),
        }
    }
    events.sort_unstable();

    let mut active = BTreeSet::new();
    let mut opened_since_emit = false;
    for (_, _, edge, p) in events {
        match edge {
            Edge::Open => {
                active.insert(p);
                opened_since_emit = true;
            }
            Edge::Close => {
                if opened_since_emit {
                    out.push(active.iter().copied().collect());
                    opened_since_emit = false;
                }
                active.remove(&p);
            }
        }
    }

    out.sort_unstable();
    Ok(out)
}
