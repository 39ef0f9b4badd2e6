//! SI spreading over the contact network and vehicle-trip risk ranking.
//!
//! Each passenger pair in contact gets one transmission probability. Pairs
//! linked in the community network get their connection strength, capped and
//! min-max scaled into `[lo, hi]`; every other pair gets `base_prob`.
//!
//! A replicate seeds some passengers and runs synchronous rounds: every
//! infected passenger tries each susceptible neighbour once per round, and
//! successful attempts take effect from the next round on. Replicates use
//! independent ChaCha streams keyed by replicate index, so results do not
//! depend on how rayon schedules them.

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::community::CommunityGraph;
use crate::contact::ContactGraph;
use crate::error::{Error, Result};
use crate::ingest::{Dataset, PassengerId, TripId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightParams {
    /// Strengths above this are treated as equal to it.
    pub cap: u64,
    pub lo: f64,
    pub hi: f64,
    /// Probability for contact pairs without a community link.
    pub base_prob: f64,
    /// Scale from 0 instead of from the smallest observed strength.
    pub scale_from_zero: bool,
}

impl Default for WeightParams {
    fn default() -> Self {
        WeightParams {
            cap: 100,
            lo: 0.1,
            hi: 0.8,
            base_prob: 0.05,
            scale_from_zero: false,
        }
    }
}

impl WeightParams {
    pub fn validate(&self) -> Result<()> {
        let unit = 0.0..=1.0;
        if self.cap == 0 {
            return Err(Error::Config("strength cap must be positive".into()));
        }
        if !unit.contains(&self.lo) || !unit.contains(&self.hi) || self.lo > self.hi {
            return Err(Error::Config(format!(
                "scaled range [{}, {}] must be an interval within [0, 1]",
                self.lo, self.hi
            )));
        }
        if !unit.contains(&self.base_prob) {
            return Err(Error::Config(format!(
                "base probability {} outside [0, 1]",
                self.base_prob
            )));
        }
        Ok(())
    }
}

/// One transmission probability per unordered contact pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionWeights {
    pub params: WeightParams,
    /// Sorted by `(u, v)` with `u < v`.
    pairs: Vec<(PassengerId, PassengerId, f64)>,
}

impl TransmissionWeights {
    pub fn pairs(&self) -> &[(PassengerId, PassengerId, f64)] {
        &self.pairs
    }

    pub fn get(&self, a: PassengerId, b: PassengerId) -> Option<f64> {
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        self.pairs
            .binary_search_by(|&(x, y, _)| (x, y).cmp(&(u, v)))
            .ok()
            .map(|i| self.pairs[i].2)
    }

    /// Same pairs with every probability replaced by `f(u, v, w)`.
    pub fn map(&self, mut f: impl FnMut(PassengerId, PassengerId, f64) -> f64) -> TransmissionWeights {
        TransmissionWeights {
            params: self.params,
            pairs: self.pairs.iter().map(|&(u, v, w)| (u, v, f(u, v, w))).collect(),
        }
    }

    /// Every contact pair with the same probability.
    pub fn uniform(contacts: &ContactGraph, w: f64) -> TransmissionWeights {
        TransmissionWeights {
            params: WeightParams::default(),
            pairs: contacts.simple_pairs().into_iter().map(|(u, v)| (u, v, w)).collect(),
        }
    }
}

/// Assigns transmission probabilities to the contact pairs of `contacts`.
pub fn assign_weights(
    contacts: &ContactGraph,
    h: &CommunityGraph,
    params: WeightParams,
) -> Result<TransmissionWeights> {
    params.validate()?;
    let pairs = contacts.simple_pairs();
    let in_contacts: HashSet<(PassengerId, PassengerId)> = pairs.iter().copied().collect();
    if let Some(e) = h.edges().iter().find(|e| !in_contacts.contains(&(e.u, e.v))) {
        return Err(Error::Structure(format!(
            "community pair ({}, {}) has no contact edge",
            e.u, e.v
        )));
    }

    let capped = |s: u64| s.min(params.cap);
    let s_max = h.edges().iter().map(|e| capped(e.strength)).max().unwrap_or(0);
    let s_min = if params.scale_from_zero {
        0
    } else {
        h.edges().iter().map(|e| capped(e.strength)).min().unwrap_or(0)
    };
    let scale = |s: u64| {
        if s_max == s_min {
            params.lo
        } else {
            params.lo + (capped(s) - s_min) as f64 * (params.hi - params.lo) / (s_max - s_min) as f64
        }
    };

    let pairs = pairs
        .into_iter()
        .map(|(u, v)| {
            let w = h.strength(u, v).map_or(params.base_prob, scale);
            (u, v, w)
        })
        .collect();
    Ok(TransmissionWeights { params, pairs })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiConfig {
    pub iterations: usize,
    pub replicates: usize,
    pub seed_count: usize,
    pub rng_seed: u64,
    /// Use these initial infected in every replicate instead of sampling
    /// `seed_count` passengers.
    pub fixed_seeds: Option<Vec<PassengerId>>,
}

impl Default for SiConfig {
    fn default() -> Self {
        SiConfig {
            iterations: 5,
            replicates: 10_000,
            seed_count: 100,
            rng_seed: 0,
            fixed_seeds: None,
        }
    }
}

/// The contact network as a simple weighted graph in CSR form.
#[derive(Debug, Clone)]
pub struct SiNetwork {
    nodes: Vec<PassengerId>,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    probs: Vec<f64>,
}

impl SiNetwork {
    pub fn new(contacts: &ContactGraph, weights: &TransmissionWeights) -> Result<SiNetwork> {
        let nodes = contacts.nodes().to_vec();
        let local = |p: PassengerId| nodes.binary_search(&p).map(|i| i as u32);

        let mut half_edges: Vec<(u32, u32, f64)> = Vec::new();
        for (u, v) in contacts.simple_pairs() {
            let w = weights
                .get(u, v)
                .ok_or_else(|| Error::Structure(format!("no transmission probability for contact pair ({u}, {v})")))?;
            let (a, b) = (local(u).expect("endpoint"), local(v).expect("endpoint"));
            half_edges.push((a, b, w));
            half_edges.push((b, a, w));
        }
        half_edges.sort_unstable_by_key(|&(a, b, _)| (a, b));

        let mut offsets = vec![0usize; nodes.len() + 1];
        for &(a, _, _) in &half_edges {
            offsets[a as usize + 1] += 1;
        }
        for i in 1..offsets.len() {
            offsets[i] += offsets[i - 1];
        }
        Ok(SiNetwork {
            nodes,
            offsets,
            targets: half_edges.iter().map(|&(_, b, _)| b).collect(),
            probs: half_edges.iter().map(|&(_, _, w)| w).collect(),
        })
    }

    pub fn nodes(&self) -> &[PassengerId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn index_of(&self, p: PassengerId) -> Option<usize> {
        self.nodes.binary_search(&p).ok()
    }

    /// Runs one replicate from the given node indices. `observe` sees the
    /// infected set after seeding (round 0) and after every round.
    pub fn run_replicate<R: Rng>(
        &self,
        seeds: &[usize],
        iterations: usize,
        rng: &mut R,
        mut observe: impl FnMut(usize, &FixedBitSet),
    ) -> FixedBitSet {
        let mut infected = FixedBitSet::with_capacity(self.len());
        let mut infected_list = Vec::with_capacity(seeds.len());
        for &s in seeds {
            if !infected.put(s) {
                infected_list.push(s);
            }
        }
        observe(0, &infected);

        let mut pending = FixedBitSet::with_capacity(self.len());
        let mut newly = Vec::new();
        for round in 1..=iterations {
            for &u in &infected_list {
                for k in self.offsets[u]..self.offsets[u + 1] {
                    let v = self.targets[k] as usize;
                    if infected.contains(v) || pending.contains(v) {
                        continue;
                    }
                    if rng.random::<f64>() < self.probs[k] {
                        pending.insert(v);
                        newly.push(v);
                    }
                }
            }
            for &v in &newly {
                infected.insert(v);
                pending.set(v, false);
            }
            infected_list.append(&mut newly);
            observe(round, &infected);
        }
        infected
    }
}

/// Deterministic RNG for one replicate.
pub fn replicate_rng(rng_seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(replicate);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiskReport {
    pub config: SiConfig,
    nodes: Vec<PassengerId>,
    infected_counts: Vec<u64>,
}

impl RiskReport {
    /// Fraction of replicates ending with `p` infected; 0 for passengers
    /// outside the contact network.
    pub fn likelihood(&self, p: PassengerId) -> f64 {
        match self.nodes.binary_search(&p) {
            Ok(i) => self.infected_counts[i] as f64 / self.config.replicates as f64,
            Err(_) => 0.0,
        }
    }

    /// `(passenger, likelihood)` for every contact-network node, ascending.
    pub fn likelihoods(&self) -> impl Iterator<Item = (PassengerId, f64)> + '_ {
        self.nodes.iter().map(move |&p| (p, self.likelihood(p)))
    }

    pub fn infected_counts(&self) -> &[u64] {
        &self.infected_counts
    }
}

/// Runs `config.replicates` SI replicates and records how often each
/// passenger ends up infected.
pub fn run_si(contacts: &ContactGraph, weights: &TransmissionWeights, config: &SiConfig) -> Result<RiskReport> {
    let net = SiNetwork::new(contacts, weights)?;
    run_si_on(&net, config)
}

pub fn run_si_on(net: &SiNetwork, config: &SiConfig) -> Result<RiskReport> {
    if config.iterations == 0 || config.replicates == 0 {
        return Err(Error::Config("iterations and replicates must be positive".into()));
    }
    let fixed: Option<Vec<usize>> = match &config.fixed_seeds {
        Some(seeds) => Some(
            seeds
                .iter()
                .map(|&p| {
                    net.index_of(p)
                        .ok_or_else(|| Error::Config(format!("seed passenger {p} is not in the contact network")))
                })
                .collect::<Result<_>>()?,
        ),
        None => {
            if config.seed_count == 0 {
                return Err(Error::Config("seed count must be positive".into()));
            }
            if config.seed_count > net.len() {
                return Err(Error::Config(format!(
                    "cannot seed {} passengers in a contact network of {}",
                    config.seed_count,
                    net.len()
                )));
            }
            None
        }
    };

    let n = net.len();
    let infected_counts = (0..config.replicates as u64)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, r| {
                let mut rng = replicate_rng(config.rng_seed, r);
                let seeds = match &fixed {
                    Some(s) => s.clone(),
                    None => sample(&mut rng, n, config.seed_count).into_vec(),
                };
                let infected = net.run_replicate(&seeds, config.iterations, &mut rng, |_, _| {});
                for i in infected.ones() {
                    acc[i] += 1;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );

    Ok(RiskReport {
        config: config.clone(),
        nodes: net.nodes.clone(),
        infected_counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripRisk {
    pub trip: TripId,
    pub score: f64,
}

/// Scores every trip by the summed infection likelihood of its riders;
/// highest first, ties by trip id.
pub fn rank_trips(report: &RiskReport, ds: &Dataset) -> Vec<TripRisk> {
    let mut ranked: Vec<TripRisk> = ds
        .trip_ids()
        .map(|trip| TripRisk {
            trip,
            score: ds.legs_of_trip(trip).map(|l| report.likelihood(l.passenger)).sum(),
        })
        .collect();
    ranked.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.trip.cmp(&b.trip)));
    ranked
}
