//! End-to-end run: contact graphs for every threshold, then groups, transfer
//! network, community network and risk ranking for one of them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cliques::enumerate_all;
use crate::community::{build_community_graph, extract_communities};
use crate::contact::{build_contact_graph, prune};
use crate::epidemic::{assign_weights, rank_trips, run_si, SiConfig, WeightParams};
use crate::error::{Error, Result};
use crate::ingest::{load_trajectories, Minutes};
use crate::output::{
    community_records, risk_report_record, write_atomic, write_community_edges, write_contacts, write_groups,
    write_json, write_pair_scores, write_transfer_edges,
};
use crate::transfer::{build_transfer_graph, score_trip_pairs, top_k_pairs};

pub const GROUPS_FILE: &str = "groups.csv";
pub const TRANSFER_EDGES_FILE: &str = "transfer_edges.csv";
pub const PAIR_SCORES_FILE: &str = "pair_scores.csv";
pub const COMMUNITY_EDGES_FILE: &str = "community_edges.csv";
pub const COMMUNITIES_FILE: &str = "communities.json";
pub const RISK_REPORT_FILE: &str = "risk_report.json";
pub const MANIFEST_FILE: &str = "manifest.json";

pub fn contacts_file(tau: Minutes) -> String {
    format!("contacts_tau{tau}.csv")
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub trajectories: PathBuf,
    pub trips: PathBuf,
    pub out_dir: PathBuf,
    /// Contact-duration thresholds, strictly increasing.
    pub taus: Vec<Minutes>,
    /// Threshold whose graph feeds the downstream stages; the first of `taus`
    /// when unset.
    pub analysis_tau: Option<Minutes>,
    pub top_k: usize,
    pub min_strength: u64,
    pub min_degree: usize,
    pub si: SiConfig,
    pub weights: WeightParams,
    pub raw_clique_benchmark: bool,
    pub per_passenger: bool,
}

impl PipelineConfig {
    pub fn new(trajectories: impl Into<PathBuf>, trips: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            trajectories: trajectories.into(),
            trips: trips.into(),
            out_dir: out_dir.into(),
            taus: vec![0, 5, 15, 30],
            analysis_tau: None,
            top_k: 5,
            min_strength: 5,
            min_degree: 2,
            si: SiConfig::default(),
            weights: WeightParams::default(),
            raw_clique_benchmark: false,
            per_passenger: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.taus.is_empty() {
            return Err(Error::Config("at least one --tau is required".into()));
        }
        if self.taus.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "--tau values must be strictly increasing, got {:?}",
                self.taus
            )));
        }
        if let Some(t) = self.analysis_tau {
            if !self.taus.contains(&t) {
                return Err(Error::Config(format!(
                    "--analysis-tau {t} is not one of --tau {:?}",
                    self.taus
                )));
            }
        }
        if self.top_k == 0 {
            return Err(Error::Config("--top-k must be at least 1".into()));
        }
        if self.si.iterations == 0 {
            return Err(Error::Config("--iterations must be positive".into()));
        }
        if self.si.replicates == 0 {
            return Err(Error::Config("--replicates must be positive".into()));
        }
        if self.si.seed_count == 0 && self.si.fixed_seeds.is_none() {
            return Err(Error::Config("--seeds must be positive".into()));
        }
        self.weights.validate()
    }

    fn analysis_tau(&self) -> Minutes {
        self.analysis_tau.unwrap_or(self.taus[0])
    }
}

/// One row per threshold. The leading fields are passengers, edges, trips,
/// raw time and partitioned time, in that order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub tau: Minutes,
    pub passengers: usize,
    pub edges: usize,
    pub trips: usize,
    pub time_raw_s: Option<f64>,
    pub time_partitioned_s: f64,
    pub groups: usize,
    pub raw_cliques: Option<usize>,
    /// Contact edges per trip; sums to `edges`.
    pub trip_edges: BTreeMap<String, usize>,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSummary {
    pub trajectories: String,
    pub trips: String,
    pub passengers: usize,
    pub legs: usize,
    pub trip_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopPair {
    pub trip_i: String,
    pub trip_j: String,
    pub m: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub tau: Minutes,
    pub groups: usize,
    pub transfer_edges: usize,
    pub trip_pairs: usize,
    pub top_pairs: Vec<TopPair>,
    pub community_nodes: usize,
    pub community_edges: usize,
    pub communities: usize,
    pub min_strength: u64,
    pub min_degree: usize,
    pub si_nodes: usize,
    pub ranked_trips: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub load_s: f64,
    pub contact_s: f64,
    pub cliques_s: f64,
    pub transfer_s: f64,
    pub community_s: f64,
    pub epidemic_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub input: InputSummary,
    pub contact_graphs: Vec<GraphSummary>,
    pub analysis: AnalysisSummary,
    pub artifacts: Vec<String>,
    pub timings: StageTimings,
}

fn write_csv_artifact(
    dir: &Path,
    name: &str,
    artifacts: &mut Vec<String>,
    write: impl FnOnce(&mut dyn std::io::Write) -> std::io::Result<()>,
) -> Result<()> {
    write_atomic(&dir.join(name), write)?;
    artifacts.push(name.to_owned());
    Ok(())
}

/// Runs every stage and writes all artifacts plus `manifest.json` into
/// `config.out_dir`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Manifest> {
    config.validate()?;
    let total = Instant::now();
    let dir = config.out_dir.as_path();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut artifacts = Vec::new();

    let t = Instant::now();
    let ds = load_trajectories(&config.trajectories, &config.trips)?;
    let load_s = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let full = build_contact_graph(&ds);
    let mut contact_s = t.elapsed().as_secs_f64();

    let analysis_tau = config.analysis_tau();
    let mut summaries = Vec::with_capacity(config.taus.len());
    let mut analysis = None;
    let mut cliques_s = 0.0;
    for &tau in &config.taus {
        let t = Instant::now();
        let graph = prune(&full, tau);
        contact_s += t.elapsed().as_secs_f64();

        let file = contacts_file(tau);
        write_csv_artifact(dir, &file, &mut artifacts, |w| write_contacts(&ds, &graph, w))?;

        let t = Instant::now();
        let enumeration = enumerate_all(&graph, &ds, config.raw_clique_benchmark);
        cliques_s += t.elapsed().as_secs_f64();

        summaries.push(GraphSummary {
            tau,
            passengers: graph.nodes().len(),
            edges: graph.edges().len(),
            trips: graph.trips().len(),
            time_raw_s: enumeration.timing.raw.map(|d| d.as_secs_f64()),
            time_partitioned_s: enumeration.timing.partitioned.as_secs_f64(),
            groups: enumeration.groups.len(),
            raw_cliques: enumeration.timing.raw_clique_count,
            trip_edges: graph
                .trips()
                .into_iter()
                .map(|t| (ds.trip_name(t).to_owned(), graph.trip_edges(t).len()))
                .collect(),
            file,
        });
        if tau == analysis_tau {
            analysis = Some((graph, enumeration.groups));
        }
    }
    let (contacts, groups) = analysis.expect("analysis tau is validated to be in the list");

    write_csv_artifact(dir, GROUPS_FILE, &mut artifacts, |w| write_groups(&ds, &groups, w))?;

    let t = Instant::now();
    let transfer = build_transfer_graph(&groups, &contacts, &ds)?;
    let scores = score_trip_pairs(&transfer);
    let top = top_k_pairs(&scores, config.top_k)?;
    let transfer_s = t.elapsed().as_secs_f64();
    write_csv_artifact(dir, TRANSFER_EDGES_FILE, &mut artifacts, |w| {
        write_transfer_edges(&ds, &transfer, w)
    })?;
    write_csv_artifact(dir, PAIR_SCORES_FILE, &mut artifacts, |w| {
        write_pair_scores(&ds, &scores, w)
    })?;

    let t = Instant::now();
    let h = build_community_graph(&groups);
    let communities = extract_communities(&h, config.min_strength, config.min_degree);
    let community_s = t.elapsed().as_secs_f64();
    write_csv_artifact(dir, COMMUNITY_EDGES_FILE, &mut artifacts, |w| {
        write_community_edges(&ds, &h, w)
    })?;
    write_json(&dir.join(COMMUNITIES_FILE), &community_records(&ds, &communities))?;
    artifacts.push(COMMUNITIES_FILE.to_owned());

    let t = Instant::now();
    let weights = assign_weights(&contacts, &h, config.weights)?;
    let report = run_si(&contacts, &weights, &config.si)?;
    let ranked = rank_trips(&report, &ds);
    let epidemic_s = t.elapsed().as_secs_f64();
    write_json(
        &dir.join(RISK_REPORT_FILE),
        &risk_report_record(&ds, &report, &config.weights, &ranked, config.per_passenger),
    )?;
    artifacts.push(RISK_REPORT_FILE.to_owned());

    let manifest = Manifest {
        input: InputSummary {
            trajectories: config.trajectories.display().to_string(),
            trips: config.trips.display().to_string(),
            passengers: ds.passenger_count(),
            legs: ds.legs().len(),
            trip_count: ds.trips().len(),
        },
        contact_graphs: summaries,
        analysis: AnalysisSummary {
            tau: analysis_tau,
            groups: groups.len(),
            transfer_edges: transfer.edges().len(),
            trip_pairs: scores.len(),
            top_pairs: top
                .iter()
                .map(|s| TopPair {
                    trip_i: ds.trip_name(s.trip_i).to_owned(),
                    trip_j: ds.trip_name(s.trip_j).to_owned(),
                    m: s.m,
                })
                .collect(),
            community_nodes: h.nodes().len(),
            community_edges: h.edges().len(),
            communities: communities.len(),
            min_strength: config.min_strength,
            min_degree: config.min_degree,
            si_nodes: contacts.nodes().len(),
            ranked_trips: ranked.len(),
        },
        artifacts,
        timings: StageTimings {
            load_s,
            contact_s,
            cliques_s,
            transfer_s,
            community_s,
            epidemic_s,
            total_s: total.elapsed().as_secs_f64(),
        },
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}
