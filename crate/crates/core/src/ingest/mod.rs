//! Trajectory data: loading, validation, and synthetic generation.
//!
//! Passenger and trip identifiers are opaque strings on disk. Inside a
//! [`Dataset`] they are interned to dense indices assigned in lexicographic
//! order of the original strings, so comparing two [`PassengerId`]s (or two
//! [`TripId`]s) gives the same answer as comparing their names.

mod csv;
mod synth;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use self::csv::read_records;
pub use self::csv::{load_trajectories, read_legs, read_trips, write_legs, write_trajectories, write_trips};
pub use self::synth::{generate_synthetic, GroupSizeDistribution, SyntheticConfig};

/// Minutes since the start of the service day. Values past 1440 belong to the
/// same service day (a 0:30 departure after midnight is 1470).
pub type Minutes = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PassengerId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TripId(pub u32);

impl PassengerId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl TripId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PassengerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P#{}", self.0)
    }
}

impl fmt::Display for TripId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T#{}", self.0)
    }
}

/// One passenger's presence on one vehicle trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrajectoryLeg {
    pub passenger: PassengerId,
    pub trip: TripId,
    pub board_time: Minutes,
    pub alight_time: Minutes,
}

impl TrajectoryLeg {
    pub fn duration(&self) -> Minutes {
        self.alight_time - self.board_time
    }
}

/// A single vehicle running a route from a given start time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripMeta {
    pub trip_id: String,
    pub route_id: String,
    pub start_time: Minutes,
}

/// A trajectory row as it appears on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegRecord {
    pub passenger_id: String,
    pub trip_id: String,
    pub board_time: i64,
    pub alight_time: i64,
}

/// A trip row as it appears on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripRecord {
    pub trip_id: String,
    pub route_id: String,
    pub start_time: i64,
}

impl LegRecord {
    pub fn new(passenger_id: &str, trip_id: &str, board_time: i64, alight_time: i64) -> Self {
        LegRecord {
            passenger_id: passenger_id.to_owned(),
            trip_id: trip_id.to_owned(),
            board_time,
            alight_time,
        }
    }
}

impl TripRecord {
    pub fn new(trip_id: &str, route_id: &str, start_time: i64) -> Self {
        TripRecord {
            trip_id: trip_id.to_owned(),
            route_id: route_id.to_owned(),
            start_time,
        }
    }
}

/// Identifiers must match `[A-Za-z0-9_./:-]+`.
pub fn is_valid_id(s: &str) -> bool {
    !s.is_empty()
        && s.bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'/' | b':' | b'-'))
}

/// A validated set of trips and on-vehicle legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    passengers: Vec<String>,
    trips: Vec<TripMeta>,
    /// Sorted by `(passenger, board_time)`.
    legs: Vec<TrajectoryLeg>,
    /// `legs[passenger_offsets[p]..passenger_offsets[p + 1]]` are the legs of passenger `p`.
    passenger_offsets: Vec<usize>,
    /// Leg indices per trip, ordered by board time then passenger.
    trip_legs: Vec<Vec<usize>>,
}

pub(crate) const LEGS_FILE: &str = "trajectories";
pub(crate) const TRIPS_FILE: &str = "trips";

impl Dataset {
    /// Validates raw records and builds a dataset. Reported line numbers assume
    /// one header line followed by the records in order.
    pub fn from_records(trips: Vec<TripRecord>, legs: Vec<LegRecord>) -> Result<Dataset> {
        let trips = trips.into_iter().zip(2u64..).map(|(r, l)| (l, r)).collect();
        let legs = legs.into_iter().zip(2u64..).map(|(r, l)| (l, r)).collect();
        Self::from_located_records(trips, legs)
    }

    /// Like [`Dataset::from_records`], with each record's source line given
    /// explicitly, as returned by [`read_legs`] and [`read_trips`].
    pub fn from_located_records(trips: Vec<(u64, TripRecord)>, legs: Vec<(u64, LegRecord)>) -> Result<Dataset> {
        let invalid = |file: &str, line: u64, message: String| Error::Invalid {
            file: file.to_owned(),
            line,
            message,
        };

        let mut trip_index: HashMap<&str, u64> = HashMap::with_capacity(trips.len());
        for (line, t) in &trips {
            if !is_valid_id(&t.trip_id) {
                return Err(invalid(TRIPS_FILE, *line, format!("invalid trip_id {:?}", t.trip_id)));
            }
            if !is_valid_id(&t.route_id) {
                return Err(invalid(TRIPS_FILE, *line, format!("invalid route_id {:?}", t.route_id)));
            }
            if t.start_time < 0 || t.start_time > i64::from(u32::MAX) {
                return Err(invalid(
                    TRIPS_FILE,
                    *line,
                    format!("start_time {} out of range", t.start_time),
                ));
            }
            if let Some(first) = trip_index.insert(&t.trip_id, *line) {
                return Err(invalid(
                    TRIPS_FILE,
                    *line,
                    format!("duplicate trip_id {:?} (first seen on line {first})", t.trip_id),
                ));
            }
        }

        let mut seen_pairs: HashMap<(&str, &str), u64> = HashMap::with_capacity(legs.len());
        for (line, l) in &legs {
            if !is_valid_id(&l.passenger_id) {
                return Err(invalid(
                    LEGS_FILE,
                    *line,
                    format!("invalid passenger_id {:?}", l.passenger_id),
                ));
            }
            if !trip_index.contains_key(l.trip_id.as_str()) {
                return Err(invalid(LEGS_FILE, *line, format!("unknown trip_id {:?}", l.trip_id)));
            }
            if l.board_time < 0 || l.alight_time > i64::from(u32::MAX) {
                return Err(invalid(
                    LEGS_FILE,
                    *line,
                    format!("times {}..{} out of range", l.board_time, l.alight_time),
                ));
            }
            if l.alight_time <= l.board_time {
                return Err(invalid(
                    LEGS_FILE,
                    *line,
                    format!("alight_time {} is not after board_time {}", l.alight_time, l.board_time),
                ));
            }
            if let Some(first) = seen_pairs.insert((&l.passenger_id, &l.trip_id), *line) {
                return Err(invalid(
                    LEGS_FILE,
                    *line,
                    format!(
                        "passenger {:?} rides trip {:?} twice (first on line {first})",
                        l.passenger_id, l.trip_id
                    ),
                ));
            }
        }
        drop(seen_pairs);
        drop(trip_index);

        let mut trips: Vec<TripMeta> = trips
            .into_iter()
            .map(|(_, t)| TripMeta {
                trip_id: t.trip_id,
                route_id: t.route_id,
                start_time: t.start_time as Minutes,
            })
            .collect();
        trips.sort_by(|a, b| a.trip_id.cmp(&b.trip_id));

        let mut passengers: Vec<String> = legs.iter().map(|(_, l)| l.passenger_id.clone()).collect();
        passengers.sort_unstable();
        passengers.dedup();

        let passenger_of: HashMap<&str, PassengerId> = passengers
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), PassengerId(i as u32)))
            .collect();
        let trip_of: HashMap<&str, TripId> = trips
            .iter()
            .enumerate()
            .map(|(i, t)| (t.trip_id.as_str(), TripId(i as u32)))
            .collect();

        let legs: Vec<TrajectoryLeg> = legs
            .iter()
            .map(|(_, l)| TrajectoryLeg {
                passenger: passenger_of[l.passenger_id.as_str()],
                trip: trip_of[l.trip_id.as_str()],
                board_time: l.board_time as Minutes,
                alight_time: l.alight_time as Minutes,
            })
            .collect();

        Ok(Self::assemble(passengers, trips, legs))
    }

    fn assemble(passengers: Vec<String>, trips: Vec<TripMeta>, mut legs: Vec<TrajectoryLeg>) -> Dataset {
        legs.sort_by_key(|l| (l.passenger, l.board_time, l.trip));

        let mut passenger_offsets = vec![0usize; passengers.len() + 1];
        for l in &legs {
            passenger_offsets[l.passenger.index() + 1] += 1;
        }
        for i in 1..passenger_offsets.len() {
            passenger_offsets[i] += passenger_offsets[i - 1];
        }

        let mut trip_legs = vec![Vec::new(); trips.len()];
        for (i, l) in legs.iter().enumerate() {
            trip_legs[l.trip.index()].push(i);
        }
        for idx in &mut trip_legs {
            idx.sort_by_key(|&i| (legs[i].board_time, legs[i].passenger));
        }

        Dataset {
            passengers,
            trips,
            legs,
            passenger_offsets,
            trip_legs,
        }
    }

    /// All legs, sorted by `(passenger, board_time)`.
    pub fn legs(&self) -> &[TrajectoryLeg] {
        &self.legs
    }

    pub fn trips(&self) -> &[TripMeta] {
        &self.trips
    }

    pub fn trip(&self, id: TripId) -> &TripMeta {
        &self.trips[id.index()]
    }

    pub fn trip_ids(&self) -> impl Iterator<Item = TripId> + '_ {
        (0..self.trips.len() as u32).map(TripId)
    }

    pub fn passenger_count(&self) -> usize {
        self.passengers.len()
    }

    pub fn passenger_name(&self, id: PassengerId) -> &str {
        &self.passengers[id.index()]
    }

    pub fn trip_name(&self, id: TripId) -> &str {
        &self.trips[id.index()].trip_id
    }

    pub fn passenger_id(&self, name: &str) -> Option<PassengerId> {
        self.passengers
            .binary_search_by(|p| p.as_str().cmp(name))
            .ok()
            .map(|i| PassengerId(i as u32))
    }

    pub fn trip_id(&self, name: &str) -> Option<TripId> {
        self.trips
            .binary_search_by(|t| t.trip_id.as_str().cmp(name))
            .ok()
            .map(|i| TripId(i as u32))
    }

    /// Legs of one passenger in boarding order.
    pub fn legs_of_passenger(&self, p: PassengerId) -> &[TrajectoryLeg] {
        &self.legs[self.passenger_offsets[p.index()]..self.passenger_offsets[p.index() + 1]]
    }

    /// Legs on one trip ordered by board time.
    pub fn legs_of_trip(&self, t: TripId) -> impl ExactSizeIterator<Item = &TrajectoryLeg> + '_ {
        self.trip_legs[t.index()].iter().map(move |&i| &self.legs[i])
    }

    pub fn leg(&self, p: PassengerId, t: TripId) -> Option<&TrajectoryLeg> {
        self.legs_of_passenger(p).iter().find(|l| l.trip == t)
    }

    /// Converts back to on-disk records, legs in `(passenger, board_time)` order.
    pub fn to_records(&self) -> (Vec<TripRecord>, Vec<LegRecord>) {
        let trips = self
            .trips
            .iter()
            .map(|t| TripRecord {
                trip_id: t.trip_id.clone(),
                route_id: t.route_id.clone(),
                start_time: i64::from(t.start_time),
            })
            .collect();
        let legs = self
            .legs
            .iter()
            .map(|l| LegRecord {
                passenger_id: self.passenger_name(l.passenger).to_owned(),
                trip_id: self.trip_name(l.trip).to_owned(),
                board_time: i64::from(l.board_time),
                alight_time: i64::from(l.alight_time),
            })
            .collect();
        (trips, legs)
    }

    /// Checks every invariant the loader enforces. Generated and loaded data
    /// both go through [`Dataset::from_records`], so this only fails if a
    /// dataset was corrupted after construction.
    pub fn validate(&self) -> Result<()> {
        let (trips, legs) = self.to_records();
        Dataset::from_records(trips, legs).map(|_| ())
    }
}
