//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cliques::enumerate_all;
use crate::community::{build_community_graph, extract_communities};
use crate::contact::{build_contact_graph, prune};
use crate::epidemic::{assign_weights, rank_trips, run_si, SiConfig, WeightParams};
use crate::error::{Error, Result};
use crate::ingest::{
    generate_synthetic, load_trajectories, write_trajectories, Dataset, GroupSizeDistribution, Minutes, SyntheticConfig,
};
use crate::output::{
    community_records, load_community_edges, load_contacts, load_groups, risk_report_record, write_atomic,
    write_community_edges, write_contacts, write_groups, write_json, write_pair_scores, write_transfer_edges,
};
use crate::pipeline::{
    contacts_file, run_pipeline, PipelineConfig, COMMUNITIES_FILE, COMMUNITY_EDGES_FILE, GROUPS_FILE, PAIR_SCORES_FILE,
    RISK_REPORT_FILE, TRANSFER_EDGES_FILE,
};
use crate::transfer::{build_transfer_graph, score_trip_pairs, top_k_pairs};

pub const THREADS_ENV: &str = "TRANSITMESH_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "transitmesh",
    version,
    about = "Contact, transfer and community graphs from transit trajectories"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic trajectories.csv and trips.csv.
    Generate(GenerateArgs),
    /// Run every stage and write all artifacts plus manifest.json.
    Pipeline(PipelineArgs),
    /// Build contact edge lists, one per threshold.
    Contact(ContactArgs),
    /// Enumerate atomic groups from a contact edge list.
    Cliques(CliquesArgs),
    /// Build the transfer network and trip-pair scores.
    Transfer(TransferArgs),
    /// Build the community network and extract communities.
    Community(CommunityArgs),
    /// Simulate spreading and rank trips by risk.
    Epidemic(EpidemicArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    pub passengers: usize,
    /// Number of vehicle trips.
    #[arg(long, default_value_t = 100)]
    pub trips: usize,
    #[arg(long, default_value_t = 0.3)]
    pub transfer_prob: f64,
    #[arg(long, default_value_t = 1)]
    pub group_min: usize,
    #[arg(long, default_value_t = 6)]
    pub group_max: usize,
    #[arg(long, alias = "rng-seed", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Trajectories CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Trips CSV.
    #[arg(long)]
    pub trips: PathBuf,
    /// Output directory; stage commands also read earlier artifacts from here.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset> {
        load_trajectories(&self.input, &self.trips)
    }

    fn prepare_out(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out).map_err(|e| Error::io(&self.out, e))
    }
}

#[derive(Debug, Args)]
pub struct SiArgs {
    #[arg(long, default_value_t = 5)]
    pub iterations: usize,
    #[arg(long, default_value_t = 10_000)]
    pub replicates: usize,
    /// Initial infected per replicate.
    #[arg(long, default_value_t = 100)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    /// Scale strengths from 0 rather than from the smallest one.
    #[arg(long)]
    pub scale_from_zero: bool,
    /// Include per-passenger likelihoods in the risk report.
    #[arg(long)]
    pub per_passenger: bool,
}

impl SiArgs {
    fn si_config(&self) -> SiConfig {
        SiConfig {
            iterations: self.iterations,
            replicates: self.replicates,
            seed_count: self.seeds,
            rng_seed: self.rng_seed,
            fixed_seeds: None,
        }
    }

    fn weight_params(&self) -> WeightParams {
        WeightParams {
            scale_from_zero: self.scale_from_zero,
            ..WeightParams::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Contact-duration thresholds in minutes, strictly increasing.
    #[arg(long, value_delimiter = ',', default_value = "0,5,15,30")]
    pub tau: Vec<Minutes>,
    /// Threshold used for groups and later stages; defaults to the first --tau.
    #[arg(long)]
    pub analysis_tau: Option<Minutes>,
    #[arg(long, default_value_t = 5)]
    pub top_k: usize,
    #[arg(long, default_value_t = 5)]
    pub min_strength: u64,
    #[arg(long, default_value_t = 2)]
    pub min_degree: usize,
    #[command(flatten)]
    pub si: SiArgs,
    /// Also time clique enumeration on the unpartitioned graph.
    #[arg(long)]
    pub raw_clique_benchmark: bool,
}

#[derive(Debug, Args)]
pub struct ContactArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long, value_delimiter = ',', default_value = "0,5,15,30")]
    pub tau: Vec<Minutes>,
}

#[derive(Debug, Args)]
pub struct CliquesArgs {
    #[command(flatten)]
    pub io: InputArgs,
    /// Threshold of the contact list to read.
    #[arg(long, default_value_t = 0)]
    pub tau: Minutes,
    /// Contact edge list; defaults to contacts_tau<TAU>.csv in --out.
    #[arg(long)]
    pub contacts: Option<PathBuf>,
    #[arg(long)]
    pub raw_clique_benchmark: bool,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long, default_value_t = 0)]
    pub tau: Minutes,
    #[arg(long)]
    pub contacts: Option<PathBuf>,
    /// Group list; defaults to groups.csv in --out.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub top_k: usize,
}

#[derive(Debug, Args)]
pub struct CommunityArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long)]
    pub groups: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    pub min_strength: u64,
    #[arg(long, default_value_t = 2)]
    pub min_degree: usize,
}

#[derive(Debug, Args)]
pub struct EpidemicArgs {
    #[command(flatten)]
    pub io: InputArgs,
    #[arg(long, default_value_t = 0)]
    pub tau: Minutes,
    #[arg(long)]
    pub contacts: Option<PathBuf>,
    /// Community edge list; defaults to community_edges.csv in --out.
    #[arg(long)]
    pub community_edges: Option<PathBuf>,
    #[command(flatten)]
    pub si: SiArgs,
}

fn or_default(path: &Option<PathBuf>, out: &Path, name: &str) -> PathBuf {
    path.clone().unwrap_or_else(|| out.join(name))
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    // A pool may already exist when called more than once in one process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Contact(a) => contact(a),
        Command::Cliques(a) => cliques(a),
        Command::Transfer(a) => transfer(a),
        Command::Community(a) => community(a),
        Command::Epidemic(a) => epidemic(a),
    }
}

fn generate(a: GenerateArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&a.transfer_prob) {
        return Err(Error::Config(format!(
            "--transfer-prob must be in [0, 1], got {}",
            a.transfer_prob
        )));
    }
    if a.passengers == 0 {
        return Err(Error::Config("--passengers must be positive".into()));
    }
    if a.trips == 0 {
        return Err(Error::Config("--trips must be positive".into()));
    }
    if a.group_min == 0 || a.group_max < a.group_min {
        return Err(Error::Config(format!(
            "--group-min {} and --group-max {} must satisfy 1 <= min <= max",
            a.group_min, a.group_max
        )));
    }
    let config = SyntheticConfig {
        group_size: GroupSizeDistribution {
            min: a.group_min,
            max: a.group_max,
        },
        ..SyntheticConfig::new(a.passengers, a.trips, a.transfer_prob, a.seed)
    };
    let ds = generate_synthetic(&config)?;
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let legs = a.out.join("trajectories.csv");
    let trips = a.out.join("trips.csv");
    write_trajectories(&ds, &legs, &trips)?;
    println!(
        "wrote {} legs for {} passengers to {} and {} trips to {}",
        ds.legs().len(),
        ds.passenger_count(),
        legs.display(),
        ds.trips().len(),
        trips.display()
    );
    Ok(())
}

fn pipeline(a: PipelineArgs) -> Result<()> {
    let config = PipelineConfig {
        taus: a.tau,
        analysis_tau: a.analysis_tau,
        top_k: a.top_k,
        min_strength: a.min_strength,
        min_degree: a.min_degree,
        si: a.si.si_config(),
        weights: a.si.weight_params(),
        raw_clique_benchmark: a.raw_clique_benchmark,
        per_passenger: a.si.per_passenger,
        ..PipelineConfig::new(a.io.input, a.io.trips, a.io.out)
    };
    let m = run_pipeline(&config)?;
    println!(
        "{:>6} {:>10} {:>10} {:>6} {:>12} {:>20}",
        "tau", "passengers", "edges", "trips", "time raw (s)", "time partitioned (s)"
    );
    for g in &m.contact_graphs {
        let raw = g.time_raw_s.map_or_else(|| "-".to_owned(), |t| format!("{t:.4}"));
        println!(
            "{:>6} {:>10} {:>10} {:>6} {:>12} {:>20.4}",
            g.tau, g.passengers, g.edges, g.trips, raw, g.time_partitioned_s
        );
    }
    println!(
        "tau={}: {} groups, {} transfer edges, {} communities, {} trips ranked",
        m.analysis.tau, m.analysis.groups, m.analysis.transfer_edges, m.analysis.communities, m.analysis.ranked_trips
    );
    println!("artifacts written to {}", config.out_dir.display());
    Ok(())
}

fn check_taus(taus: &[Minutes]) -> Result<()> {
    if taus.is_empty() || taus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "--tau values must be strictly increasing, got {taus:?}"
        )));
    }
    Ok(())
}

fn contact(a: ContactArgs) -> Result<()> {
    check_taus(&a.tau)?;
    let ds = a.io.load()?;
    a.io.prepare_out()?;
    let full = build_contact_graph(&ds);
    for &tau in &a.tau {
        let g = prune(&full, tau);
        let path = a.io.out.join(contacts_file(tau));
        write_atomic(&path, |w| write_contacts(&ds, &g, w))?;
        println!(
            "tau={tau}: {} passengers, {} edges, {} trips -> {}",
            g.nodes().len(),
            g.edges().len(),
            g.trips().len(),
            path.display()
        );
    }
    Ok(())
}

fn cliques(a: CliquesArgs) -> Result<()> {
    let ds = a.io.load()?;
    let contacts = load_contacts(&ds, &or_default(&a.contacts, &a.io.out, &contacts_file(a.tau)), a.tau)?;
    a.io.prepare_out()?;
    let e = enumerate_all(&contacts, &ds, a.raw_clique_benchmark);
    let path = a.io.out.join(GROUPS_FILE);
    write_atomic(&path, |w| write_groups(&ds, &e.groups, w))?;
    println!(
        "{} groups over {} trips in {:.4}s -> {}",
        e.groups.len(),
        e.timing.trips,
        e.timing.partitioned.as_secs_f64(),
        path.display()
    );
    if let (Some(raw), Some(count)) = (e.timing.raw, e.timing.raw_clique_count) {
        println!("raw: {count} cliques in {:.4}s", raw.as_secs_f64());
    }
    Ok(())
}

fn transfer(a: TransferArgs) -> Result<()> {
    if a.top_k == 0 {
        return Err(Error::Config("--top-k must be at least 1".into()));
    }
    let ds = a.io.load()?;
    let contacts = load_contacts(&ds, &or_default(&a.contacts, &a.io.out, &contacts_file(a.tau)), a.tau)?;
    let groups = load_groups(&ds, &or_default(&a.groups, &a.io.out, GROUPS_FILE))?;
    a.io.prepare_out()?;
    let f = build_transfer_graph(&groups, &contacts, &ds)?;
    let scores = score_trip_pairs(&f);
    write_atomic(&a.io.out.join(TRANSFER_EDGES_FILE), |w| {
        write_transfer_edges(&ds, &f, w)
    })?;
    write_atomic(&a.io.out.join(PAIR_SCORES_FILE), |w| write_pair_scores(&ds, &scores, w))?;
    println!("{} transfer edges, {} trip pairs", f.edges().len(), scores.len());
    for s in top_k_pairs(&scores, a.top_k)? {
        println!("{} {} {}", ds.trip_name(s.trip_i), ds.trip_name(s.trip_j), s.m);
    }
    Ok(())
}

fn community(a: CommunityArgs) -> Result<()> {
    let ds = a.io.load()?;
    let groups = load_groups(&ds, &or_default(&a.groups, &a.io.out, GROUPS_FILE))?;
    a.io.prepare_out()?;
    let h = build_community_graph(&groups);
    let communities = extract_communities(&h, a.min_strength, a.min_degree);
    write_atomic(&a.io.out.join(COMMUNITY_EDGES_FILE), |w| {
        write_community_edges(&ds, &h, w)
    })?;
    write_json(&a.io.out.join(COMMUNITIES_FILE), &community_records(&ds, &communities))?;
    println!(
        "{} passengers, {} edges, {} communities",
        h.nodes().len(),
        h.edges().len(),
        communities.len()
    );
    Ok(())
}

fn epidemic(a: EpidemicArgs) -> Result<()> {
    let ds = a.io.load()?;
    let contacts = load_contacts(&ds, &or_default(&a.contacts, &a.io.out, &contacts_file(a.tau)), a.tau)?;
    let h = load_community_edges(&ds, &or_default(&a.community_edges, &a.io.out, COMMUNITY_EDGES_FILE))?;
    let params = a.si.weight_params();
    params.validate()?;
    a.io.prepare_out()?;
    let weights = assign_weights(&contacts, &h, params)?;
    let report = run_si(&contacts, &weights, &a.si.si_config())?;
    let ranked = rank_trips(&report, &ds);
    let path = a.io.out.join(RISK_REPORT_FILE);
    write_json(
        &path,
        &risk_report_record(&ds, &report, &params, &ranked, a.si.per_passenger),
    )?;
    for r in ranked.iter().take(5) {
        let t = ds.trip(r.trip);
        println!("{} {} {} {:.4}", t.trip_id, t.route_id, t.start_time, r.score);
    }
    println!("risk report -> {}", path.display());
    Ok(())
}
