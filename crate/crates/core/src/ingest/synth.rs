//! Desk-scale synthetic trajectories.
//!
//! Passengers travel in commuter groups: every member of a group boards and
//! alights the same trip within a couple of minutes of each other, and the
//! group as a whole transfers to a later trip with probability
//! `transfer_probability` (repeatedly, up to [`MAX_LEGS`] legs).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Dataset, LegRecord, Minutes, TripRecord};
use crate::error::{Error, Result};

pub const MAX_LEGS: usize = 3;

const SERVICE_START: Minutes = 5 * 60;
const SERVICE_END: Minutes = 22 * 60;
const MIN_TRIP_LENGTH: Minutes = 30;
const MAX_TRIP_LENGTH: Minutes = 90;
const MIN_RIDE: Minutes = 6;

/// Group sizes are drawn uniformly from `min..=max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupSizeDistribution {
    pub min: usize,
    pub max: usize,
}

impl Default for GroupSizeDistribution {
    fn default() -> Self {
        GroupSizeDistribution { min: 1, max: 6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub passenger_count: usize,
    pub trip_count: usize,
    pub transfer_probability: f64,
    pub group_size: GroupSizeDistribution,
    pub rng_seed: u64,
}

impl SyntheticConfig {
    pub fn new(passenger_count: usize, trip_count: usize, transfer_probability: f64, rng_seed: u64) -> Self {
        SyntheticConfig {
            passenger_count,
            trip_count,
            transfer_probability,
            group_size: GroupSizeDistribution::default(),
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.passenger_count == 0 {
            return Err(Error::Config("passenger_count must be positive".into()));
        }
        if self.trip_count == 0 {
            return Err(Error::Config("trip_count must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.transfer_probability) {
            return Err(Error::Config(format!(
                "transfer_probability must be in [0, 1], got {}",
                self.transfer_probability
            )));
        }
        let g = self.group_size;
        if g.min == 0 || g.max < g.min {
            return Err(Error::Config(format!(
                "group size range {}..={} must be non-empty and start at 1 or more",
                g.min, g.max
            )));
        }
        Ok(())
    }
}

struct SynthTrip {
    start: Minutes,
    end: Minutes,
}

/// Generates a dataset; identical configs give identical datasets.
pub fn generate_synthetic(config: &SyntheticConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);

    let trip_width = digits(config.trip_count - 1);
    let passenger_width = digits(config.passenger_count - 1);
    let route_count = (config.trip_count / 5).max(1);
    let route_width = digits(route_count - 1);

    let mut trips = Vec::with_capacity(config.trip_count);
    let mut trip_records = Vec::with_capacity(config.trip_count);
    for i in 0..config.trip_count {
        let start = rng.random_range(SERVICE_START..=SERVICE_END);
        let length = rng.random_range(MIN_TRIP_LENGTH..=MAX_TRIP_LENGTH);
        trips.push(SynthTrip {
            start,
            end: start + length,
        });
        trip_records.push(TripRecord::new(
            &format!("t{i:0trip_width$}"),
            &format!("r{:0route_width$}", i % route_count),
            i64::from(start),
        ));
    }

    let mut legs = Vec::new();
    let mut next_passenger = 0usize;
    let mut visited = Vec::with_capacity(MAX_LEGS);
    while next_passenger < config.passenger_count {
        let size = rng
            .random_range(config.group_size.min..=config.group_size.max)
            .min(config.passenger_count - next_passenger);
        let members: Vec<String> = (next_passenger..next_passenger + size)
            .map(|p| format!("p{p:0passenger_width$}"))
            .collect();
        next_passenger += size;

        visited.clear();
        let mut trip = rng.random_range(0..trips.len());
        let t = &trips[trip];
        let mut board = t.start + rng.random_range(0..=(t.end - t.start) / 2);
        loop {
            visited.push(trip);
            let end = trips[trip].end;
            let ride = rng.random_range(MIN_RIDE..=end - board);
            let alight = board + ride;

            let mut last_alight = 0;
            for m in &members {
                // Stagger each member by up to two minutes at both ends.
                let b = board + rng.random_range(0..=2);
                let a = (alight - rng.random_range(0..=2)).max(b + 1);
                last_alight = last_alight.max(a);
                legs.push(LegRecord::new(
                    m,
                    &trip_records[trip].trip_id,
                    i64::from(b),
                    i64::from(a),
                ));
            }

            if visited.len() >= MAX_LEGS || !rng.random_bool(config.transfer_probability) {
                break;
            }
            let wait = rng.random_range(1..=10);
            let ready = last_alight + wait;
            let candidates: Vec<usize> = trips
                .iter()
                .enumerate()
                .filter(|(i, t)| {
                    !visited.contains(i) && t.start <= ready + 60 && t.end >= ready.max(t.start) + 2 * MIN_RIDE
                })
                .map(|(i, _)| i)
                .collect();
            if candidates.is_empty() {
                break;
            }
            trip = candidates[rng.random_range(0..candidates.len())];
            board = ready.max(trips[trip].start);
        }
    }

    Dataset::from_records(trip_records, legs)
}

fn digits(mut n: usize) -> usize {
    let mut d = 1;
    while n >= 10 {
        n /= 10;
        d += 1;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::csv::write_legs;

    fn bytes(ds: &Dataset) -> Vec<u8> {
        let mut out = Vec::new();
        write_legs(ds, &mut out).unwrap();
        out
    }

    #[test]
    fn deterministic_for_seed() {
        let cfg = SyntheticConfig::new(300, 40, 0.5, 7);
        let a = generate_synthetic(&cfg).unwrap();
        let b = generate_synthetic(&cfg).unwrap();
        assert_eq!(bytes(&a), bytes(&b));
        let c = generate_synthetic(&SyntheticConfig { rng_seed: 8, ..cfg }).unwrap();
        assert_ne!(bytes(&a), bytes(&c));
    }

    #[test]
    fn no_transfers_means_one_trip_each() {
        let ds = generate_synthetic(&SyntheticConfig::new(400, 30, 0.0, 3)).unwrap();
        assert_eq!(ds.passenger_count(), 400);
        for p in 0..ds.passenger_count() {
            assert_eq!(ds.legs_of_passenger(crate::PassengerId(p as u32)).len(), 1);
        }
    }

    #[test]
    fn output_passes_validation() {
        let ds = generate_synthetic(&SyntheticConfig::new(50, 10, 0.5, 1)).unwrap();
        ds.validate().unwrap();
        assert!(ds
            .legs()
            .iter()
            .all(|l| l.alight_time > l.board_time && ds.trip(l.trip).start_time <= l.board_time));
    }

    #[test]
    fn transfers_happen_and_move_forward_in_time() {
        let ds = generate_synthetic(&SyntheticConfig::new(500, 50, 0.8, 11)).unwrap();
        let mut transfers = 0;
        for p in 0..ds.passenger_count() {
            let legs = ds.legs_of_passenger(crate::PassengerId(p as u32));
            for w in legs.windows(2) {
                assert!(w[1].board_time > w[0].alight_time);
                transfers += 1;
            }
        }
        assert!(transfers > 100, "only {transfers} transfers");
    }

    #[test]
    fn rejects_bad_config() {
        assert!(SyntheticConfig::new(0, 1, 0.1, 0).validate().is_err());
        assert!(SyntheticConfig::new(1, 0, 0.1, 0).validate().is_err());
        assert!(SyntheticConfig::new(1, 1, 1.5, 0).validate().is_err());
        assert!(SyntheticConfig::new(1, 1, f64::NAN, 0).validate().is_err());
        let mut cfg = SyntheticConfig::new(1, 1, 0.1, 0);
        cfg.group_size = GroupSizeDistribution { min: 3, max: 2 };
        assert!(cfg.validate().is_err());
    }
}
