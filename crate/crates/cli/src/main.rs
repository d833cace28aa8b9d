//! `agsgr` command line front end.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use agsgr_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}", path = .0.display(), source = .1)]
    Io(PathBuf, std::io::Error),
    #[error("{0} oracle suite(s) reported mismatches")]
    OracleMismatch(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(..) => 3,
            CliError::OracleMismatch(_) => 7,
            CliError::Core(e) => match e {
                Error::Format(_) | Error::InvalidQuery(_) => 2,
                Error::Io { .. } => 3,
                Error::NoTrainingData | Error::NoTopic => 4,
                Error::EmptyResult | Error::EmptyGroup => 5,
                Error::UnknownUser(_) => 6,
                Error::UnknownTopic(_) => 1,
            },
        }
    }
}

#[derive(Parser)]
#[command(name = "agsgr", version, about = "Geo-social group and activity location recommendation")]
#[command(after_help = config::keys_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Parse raw CSVs, extract group events, write the binary dataset and stats
    Ingest,
    /// Fit the attention ranking model on the training events
    Train,
    /// Recommend a group, a topic, and locations for one target user
    Recommend,
    /// Run the metric grid over sampled test users
    Evaluate,
    /// Compare the fast algorithms against brute-force references
    OracleCheck,
}

#[derive(Args)]
struct Opts {
    /// Config file of `key = value` lines
    #[arg(long, global = true, env = "AGSGR_CONFIG")]
    config: Option<PathBuf>,
    /// Set any config key, e.g. --set eval.k_range=1-3 (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Check-in CSV (key: checkins)
    #[arg(long, global = true)]
    checkins: Option<String>,
    /// Friendship CSV (key: edges)
    #[arg(long, global = true)]
    edges: Option<String>,
    /// Venue link CSV (key: poi_links)
    #[arg(long, global = true)]
    poi_links: Option<String>,
    /// Explicit group CSV (key: groups)
    #[arg(long, global = true)]
    groups: Option<String>,
    /// Output directory (key: data_dir)
    #[arg(long, global = true)]
    data_dir: Option<String>,
    /// Binary dataset (key: dataset)
    #[arg(long, global = true)]
    dataset: Option<String>,
    /// Model checkpoint (key: model)
    #[arg(long, global = true)]
    model: Option<String>,
    /// Target user id (key: target_user)
    #[arg(long, global = true)]
    target_user: Option<String>,
    /// Group size h (key: group_size)
    #[arg(long, global = true)]
    group_size: Option<String>,
    /// Core constraint k (key: core)
    #[arg(long, global = true)]
    core: Option<String>,
    /// Number of locations K (key: top_k)
    #[arg(long, global = true)]
    top_k: Option<String>,
    /// Training epochs (key: epochs)
    #[arg(long, global = true)]
    epochs: Option<String>,
    /// Learning rate (key: lr)
    #[arg(long, global = true)]
    lr: Option<String>,
    /// Latent dimension (key: dim)
    #[arg(long, global = true)]
    dim: Option<String>,
    /// Root seed (key: seed)
    #[arg(long, global = true)]
    seed: Option<String>,
    /// L2 weight (key: l2)
    #[arg(long, global = true)]
    l2: Option<String>,
    /// Evaluation threads (key: threads)
    #[arg(long, global = true)]
    threads: Option<String>,
    /// Sampled evaluation targets (key: eval.n_targets)
    #[arg(long, global = true)]
    n_targets: Option<String>,
    /// Instances per oracle suite (key: oracle.trials)
    #[arg(long, global = true)]
    trials: Option<String>,
    /// Use the unsafe pruning rule (key: oracle.inject_fault)
    #[arg(long, global = true)]
    inject_fault: bool,
    /// Replay a failing instance file (key: oracle.replay)
    #[arg(long, global = true)]
    replay: Option<String>,
}

impl Opts {
    fn overrides(&self) -> Result<BTreeMap<String, String>, CliError> {
        let mut m = BTreeMap::new();
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv}")))?;
            let k = k.trim();
            if !config::KEYS.iter().any(|(name, _, _)| *name == k) {
                return Err(CliError::Config(format!("unknown key {k}")));
            }
            m.insert(k.to_string(), v.trim().to_string());
        }
        let flags = [
            ("checkins", &self.checkins),
            ("edges", &self.edges),
            ("poi_links", &self.poi_links),
            ("groups", &self.groups),
            ("data_dir", &self.data_dir),
            ("dataset", &self.dataset),
            ("model", &self.model),
            ("target_user", &self.target_user),
            ("group_size", &self.group_size),
            ("core", &self.core),
            ("top_k", &self.top_k),
            ("epochs", &self.epochs),
            ("lr", &self.lr),
            ("dim", &self.dim),
            ("seed", &self.seed),
            ("l2", &self.l2),
            ("threads", &self.threads),
            ("eval.n_targets", &self.n_targets),
            ("oracle.trials", &self.trials),
            ("oracle.replay", &self.replay),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                m.insert(k.to_string(), v.clone());
            }
        }
        if self.inject_fault {
            m.insert("oracle.inject_fault".into(), "true".into());
        }
        Ok(m)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let settings = config::Settings::load(cli.opts.config.as_deref(), cli.opts.overrides()?)?;
    match cli.command {
        Command::Ingest => commands::ingest(&settings),
        Command::Train => commands::train(&settings),
        Command::Recommend => commands::recommend(&settings),
        Command::Evaluate => commands::evaluate(&settings),
        Command::OracleCheck => commands::oracle_check(&settings),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("agsgr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
