//! File-based command line driver.
//!
//! A *store* is a directory holding the two canonical CSV files produced by
//! `ingest`: `ratings.csv` (rows sorted by user then item, full header) and
//! `edges.csv` (sorted, friendships in both directions). Every other
//! subcommand reads a store.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for data errors.

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::clustering::{cluster, ClusterSet, ClusteringConfig, ClusteringMode};
use crate::dataset::{ingest_edges, ingest_ratings, Dataset, Dimension, ItemId, SocialGraph, UserId};
use crate::error::Error;
use crate::evaluation::{evaluate, SplitConfig, DEFAULT_N, DEFAULT_RELEVANCE_THRESHOLD};
use crate::recommender::{context_prefilter, popular_items, recommend_top_n, ContextQuery};

pub const RATINGS_FILE: &str = "ratings.csv";
pub const EDGES_FILE: &str = "edges.csv";

#[derive(Debug, Parser)]
#[command(
    name = "socialrec",
    version,
    about = "Cluster-restricted collaborative filtering with social cold start"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate ratings and edges files and write them to a canonical store
    Ingest(IngestArgs),
    /// Partition the rated users of a store into k clusters
    Cluster(ClusterArgs),
    /// Produce a ranked top-N list for one user
    Recommend(RecommendArgs),
    /// Run a seeded holdout evaluation and write a precision/recall report
    Eval(EvalArgs),
    /// Print summaries of a store and, optionally, a cluster file
    Inspect(InspectArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Ratings CSV (header `user_id,item_id,rating[,location,time,weather,emotion]`)
    #[arg(long, value_name = "FILE")]
    pub ratings: PathBuf,
    /// Edges CSV (header `source,target,relation`)
    #[arg(long, value_name = "FILE")]
    pub edges: Option<PathBuf>,
    /// Directory to write the canonical store into
    #[arg(long, value_name = "DIR")]
    pub store: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    SinglePass,
    Iterative,
}

impl From<ModeArg> for ClusteringMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::SinglePass => ClusteringMode::SinglePass,
            ModeArg::Iterative => ClusteringMode::Iterative,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusteringArgs {
    /// Number of clusters
    #[arg(long)]
    pub k: usize,
    /// single-pass assigns once against the seed users; iterative refines
    /// with mean updates
    #[arg(long, value_enum, default_value = "single-pass")]
    pub mode: ModeArg,
    /// Maximum assignment passes (iterative mode)
    #[arg(long = "max-iter", default_value_t = 100)]
    pub max_iter: usize,
    /// Stop once total centroid movement is at most this (iterative mode)
    #[arg(long, default_value_t = 1e-9)]
    pub epsilon: f64,
}

impl ClusteringArgs {
    pub fn config(&self) -> ClusteringConfig {
        ClusteringConfig {
            k: self.k,
            mode: self.mode.into(),
            max_iterations: self.max_iter,
            epsilon: self.epsilon,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Store directory written by `ingest`
    #[arg(long, value_name = "DIR")]
    pub store: PathBuf,
    #[command(flatten)]
    pub clustering: ClusteringArgs,
    /// Cluster file to write
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RecommendArgs {
    /// Store directory written by `ingest`
    #[arg(long, value_name = "DIR")]
    pub store: PathBuf,
    /// Cluster file written by `cluster`
    #[arg(long, value_name = "FILE")]
    pub clusters: PathBuf,
    /// User to recommend for
    #[arg(long)]
    pub user: String,
    /// Length of the list
    #[arg(long, value_parser = parse_positive)]
    pub n: usize,
    /// Context query, e.g. "location=athens,time=evening"
    /// (dimensions: location, time, weather, emotion)
    #[arg(long, value_parser = parse_context)]
    pub context: Option<ContextQuery>,
    /// Relax the context query until at least this many ratings match
    #[arg(long = "min-support", default_value_t = 0)]
    pub min_support: usize,
    /// Write the JSON here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Store directory written by `ingest`
    #[arg(long, value_name = "DIR")]
    pub store: PathBuf,
    #[command(flatten)]
    pub clustering: ClusteringArgs,
    /// Fraction of ratings to hold out, in (0, 1)
    #[arg(long, default_value_t = 0.2, value_parser = parse_fraction)]
    pub holdout: f64,
    /// Seed for the holdout split
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Sample the holdout over all ratings instead of per user
    #[arg(long = "global-split")]
    pub global_split: bool,
    /// Length of each recommendation list
    #[arg(long, default_value_t = DEFAULT_N, value_parser = parse_positive)]
    pub n: usize,
    /// Held-out ratings at or above this value count as relevant
    #[arg(long = "relevance-threshold", default_value_t = DEFAULT_RELEVANCE_THRESHOLD)]
    pub relevance_threshold: f64,
    /// Report file to write (JSON)
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    /// Store directory written by `ingest`
    #[arg(long, value_name = "DIR")]
    pub store: PathBuf,
    /// Optional cluster file to summarize against the store
    #[arg(long, value_name = "FILE")]
    pub clusters: Option<PathBuf>,
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let value: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(format!("{value} is outside (0, 1)"))
    }
}

fn parse_positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(_) => Err(format!("`{s}` is not a positive integer")),
    }
}

fn parse_context(s: &str) -> Result<ContextQuery, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Data {
        context: String,
        #[source]
        source: Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data { .. } => 2,
        }
    }
}

trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T, E: Into<Error>> Context<T> for Result<T, E> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|e| CliError::Data {
            context: what(),
            source: e.into(),
        })
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .context(|| format!("cannot open {}", path.display()))
}

/// Loads the dataset held in a store directory.
pub fn load_store(dir: &Path) -> Result<Dataset, CliError> {
    let ratings_path = dir.join(RATINGS_FILE);
    let ratings = ingest_ratings(open(&ratings_path)?)
        .context(|| format!("reading {}", ratings_path.display()))?;
    let edges_path = dir.join(EDGES_FILE);
    let graph = if edges_path.exists() {
        ingest_edges(open(&edges_path)?).context(|| format!("reading {}", edges_path.display()))?
    } else {
        SocialGraph::new()
    };
    Ok(Dataset::new(ratings, graph))
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&args, stdout),
        Command::Cluster(args) => cmd_cluster(&args, stdout),
        Command::Recommend(args) => cmd_recommend(&args, stdout),
        Command::Eval(args) => cmd_eval(&args, stdout),
        Command::Inspect(args) => cmd_inspect(&args, stdout),
    }
}

fn say(stdout: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<(), CliError> {
    stdout
        .write_fmt(text)
        .and_then(|_| stdout.write_all(b"\n"))
        .context(|| "writing to stdout".into())
}

pub fn cmd_ingest(args: &IngestArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ratings = ingest_ratings(open(&args.ratings)?)
        .context(|| format!("reading {}", args.ratings.display()))?;
    let graph = match &args.edges {
        Some(path) => ingest_edges(open(path)?).context(|| format!("reading {}", path.display()))?,
        None => SocialGraph::new(),
    };

    let mut ratings_csv = Vec::new();
    ratings.write_csv(&mut ratings_csv).context(|| "encoding ratings".into())?;
    let mut edges_csv = Vec::new();
    graph.write_csv(&mut edges_csv).context(|| "encoding edges".into())?;

    fs::create_dir_all(&args.store).context(|| format!("creating {}", args.store.display()))?;
    for (name, bytes) in [(RATINGS_FILE, &ratings_csv), (EDGES_FILE, &edges_csv)] {
        let path = args.store.join(name);
        write_atomic(&path, bytes).context(|| format!("writing {}", path.display()))?;
    }

    let dataset = Dataset::new(ratings, graph);
    say(
        stdout,
        format_args!(
            "ratings: {} from {} users over {} items",
            dataset.ratings.num_ratings(),
            dataset.ratings.num_users(),
            dataset.ratings.items().len()
        ),
    )?;
    say(
        stdout,
        format_args!(
            "edges: {} directed over {} users",
            dataset.graph.num_edges(),
            dataset.graph.users().len()
        ),
    )?;
    say(stdout, format_args!("users: {}", dataset.all_users().len()))?;
    say(stdout, format_args!("store: {}", args.store.display()))
}

pub fn cmd_cluster(args: &ClusterArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load_store(&args.store)?;
    let cs = cluster(&dataset.ratings, &args.clustering.config()).context(|| "clustering".into())?;
    let mut text = Vec::new();
    cs.write_text(&mut text).context(|| "encoding clusters".into())?;
    write_atomic(&args.out, &text).context(|| format!("writing {}", args.out.display()))?;
    say(
        stdout,
        format_args!(
            "k={} mode={} iterations={}",
            cs.k, cs.mode, cs.iterations_run
        ),
    )?;
    for (index, size) in cs.sizes().into_iter().enumerate() {
        say(stdout, format_args!("cluster {index}: {size} users"))?;
    }
    Ok(())
}

fn load_clusters(path: &Path, dataset: &Dataset) -> Result<ClusterSet, CliError> {
    ClusterSet::read_text(open(path)?, &dataset.ratings)
        .context(|| format!("reading {}", path.display()))
}

/// Output of `recommend` when the user cannot be placed in any cluster.
#[derive(Debug, Serialize)]
pub struct PopularityList {
    pub user: UserId,
    pub n: usize,
    pub fallback: &'static str,
    pub query: ContextQuery,
    pub surviving: Vec<Dimension>,
    pub entries: Vec<PopularEntry>,
}

#[derive(Debug, Serialize)]
pub struct PopularEntry {
    pub item: ItemId,
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report types serialize");
    bytes.push(b'\n');
    bytes
}

pub fn cmd_recommend(args: &RecommendArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load_store(&args.store)?;
    let cs = load_clusters(&args.clusters, &dataset)?;
    let user = UserId::new(&args.user).map_err(|e| CliError::Usage(e.to_string()))?;
    let query = args.context.clone().unwrap_or_default();

    let json = match recommend_top_n(&dataset, &cs, &user, args.n, &query, args.min_support) {
        Ok(list) => to_json(&list),
        Err(Error::ColdStartUnresolvable(_)) => {
            let filtered = context_prefilter(&dataset.ratings, &query, args.min_support);
            to_json(&PopularityList {
                user: user.clone(),
                n: args.n,
                fallback: "popularity",
                query: query.clone(),
                surviving: filtered.applied.dimensions(),
                entries: popular_items(&filtered.ratings, args.n)
                    .into_iter()
                    .map(|item| PopularEntry { item })
                    .collect(),
            })
        }
        Err(other) => {
            return Err(CliError::Data {
                context: format!("recommending for `{user}`"),
                source: other,
            })
        }
    };
    match &args.out {
        Some(path) => write_atomic(path, &json).context(|| format!("writing {}", path.display())),
        None => stdout.write_all(&json).context(|| "writing to stdout".into()),
    }
}

pub fn cmd_eval(args: &EvalArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load_store(&args.store)?;
    let split = SplitConfig {
        holdout_fraction: args.holdout,
        seed: args.seed,
        per_user: !args.global_split,
    };
    let report = evaluate(
        &dataset,
        &args.clustering.config(),
        args.n,
        args.relevance_threshold,
        &split,
    )
    .context(|| "evaluating".into())?;
    write_atomic(&args.out, &to_json(&report)).context(|| format!("writing {}", args.out.display()))?;
    if report.no_evaluable_users {
        say(stdout, format_args!("no evaluable users (no held-out rating reaches the threshold)"))?;
    }
    say(stdout, format_args!("precision@{}: {:.4}", report.n, report.macro_precision))?;
    say(stdout, format_args!("recall@{}: {:.4}", report.n, report.macro_recall))?;
    say(stdout, format_args!("evaluable users: {}", report.evaluable_users))
}

pub fn cmd_inspect(args: &InspectArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let dataset = load_store(&args.store)?;
    let ratings = &dataset.ratings;
    say(stdout, format_args!("rated users: {}", ratings.num_users()))?;
    say(stdout, format_args!("items: {}", ratings.items().len()))?;
    say(stdout, format_args!("ratings: {}", ratings.num_ratings()))?;
    if let Some((lo, hi)) = ratings.value_range() {
        say(stdout, format_args!("rating range: {lo}..={hi}"))?;
    }
    say(stdout, format_args!("edges: {}", dataset.graph.num_edges()))?;
    let graph_only = dataset
        .all_users()
        .iter()
        .filter(|u| !ratings.contains_user(u))
        .count();
    say(stdout, format_args!("graph-only users: {graph_only}"))?;

    if let Some(path) = &args.clusters {
        let cs = load_clusters(path, &dataset)?;
        say(
            stdout,
            format_args!("clusters: k={} mode={} iterations={}", cs.k, cs.mode, cs.iterations_run),
        )?;
        for (index, c) in cs.clusters.iter().enumerate() {
            let members: Vec<&str> = c.members.iter().map(UserId::as_str).collect();
            say(stdout, format_args!("{index}: {}", members.join(",")))?;
        }
    }
    Ok(())
}
