use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use agsgr_core::abpr::{train_with, AdamConfig, ModelConfig};
use agsgr_core::eval::{run_experiment, ExperimentConfig};
use agsgr_core::ingest::{
    dataset_stats, extract_implicit_groups, parse_checkins, parse_edges, parse_explicit_groups, parse_poi_links,
    split, write_group_events,
};
use agsgr_core::oracle::{run_suite, Instance, OracleConfig, Suite};
use agsgr_core::persist::{load_model, save_model, Dataset};
use agsgr_core::pipeline::{new_model, training_set, Recommender};
use agsgr_core::{GeoSocialNetwork, Query, SearchOptions, UserId};

use crate::config::Settings;
use crate::CliError;

// Per-module seed namespaces derived from the root seed.
const PAIR_SALT: u64 = 0x7061_6972;
const EVAL_SALT: u64 = 0x6576_616c;

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn ingest(s: &Settings) -> Result<(), CliError> {
    let checkins_path: String = s.require("checkins")?;
    let edges_path: String = s.require("edges")?;
    let window: i64 = s.get("window")?;
    if window <= 0 {
        return Err(CliError::Config("window must be positive".into()));
    }
    let parsed = parse_checkins(&checkins_path)?;
    let edges = parse_edges(&edges_path)?;
    eprintln!(
        "check-ins: {} rows, {} malformed; edges: {} rows, {} malformed",
        parsed.stats.rows, parsed.stats.malformed, edges.stats.rows, edges.stats.malformed
    );
    let n_pois = parsed.pois.len();
    let mut network = GeoSocialNetwork::new(&edges.edges, parsed.pois, parsed.checkins, parsed.vocabulary)?;
    if let Some(p) = s.path("poi_links") {
        network = network.with_poi_links(parse_poi_links(p)?.edges);
    }
    let events = match s.path("groups") {
        Some(p) => parse_explicit_groups(p)?.0,
        None => extract_implicit_groups(network.checkins(), network.graph(), window),
    };
    let stats = dataset_stats(network.graph(), &events, n_pois);
    let data_dir = Path::new(s.raw("data_dir"));
    let dataset = Dataset { network, split: split(events.clone()) };
    eprintln!("events: {} train, {} test", dataset.split.train.len(), dataset.split.test.len());
    dataset.save(s.dataset_path())?;
    fs::create_dir_all(data_dir).map_err(|e| CliError::Io(data_dir.to_path_buf(), e))?;
    write_group_events(data_dir.join("groups.csv"), &events)?;
    write(&data_dir.join("stats.txt"), &format!("{stats}\n"))?;
    println!("{stats}");
    Ok(())
}

fn model_config(s: &Settings) -> Result<ModelConfig, CliError> {
    let cfg = ModelConfig { dim: s.get("dim")?, init_std: s.get("init_std")?, l2: s.get("l2")?, seed: s.get("seed")? };
    if cfg.dim == 0 || !(cfg.init_std > 0.0) || !(cfg.l2 >= 0.0) {
        return Err(CliError::Config("dim and init_std must be positive, l2 non-negative".into()));
    }
    Ok(cfg)
}

pub fn train(s: &Settings) -> Result<(), CliError> {
    let ds = Dataset::load(s.dataset_path())?;
    let mcfg = model_config(s)?;
    let adam = AdamConfig { lr: s.get("lr")?, epochs: s.get("epochs")?, ..AdamConfig::default() };
    if !(adam.lr > 0.0) {
        return Err(CliError::Config("lr must be positive".into()));
    }
    let set = training_set(&ds.network, &ds.split.train, ds.split.cutoff(), s.get("neg_ratio")?, mcfg.seed ^ PAIR_SALT);
    let mut model = new_model(&ds.network, &mcfg);
    let mut csv = String::from("epoch,loss\n");
    let report = train_with(&mut model, &set, &adam, |epoch, loss| {
        eprintln!("epoch {epoch} loss {loss:.6}");
        let _ = writeln!(csv, "{epoch},{loss}");
    })?;
    let _ = writeln!(csv, "{},{}", adam.epochs, report.final_loss);
    eprintln!("final loss {:.6} over {} pairs", report.final_loss, set.pairs.len());
    write(&s.loss_path(), &csv)?;
    save_model(s.model_path(), &model)?;
    Ok(())
}

fn search_options(s: &Settings) -> Result<SearchOptions, CliError> {
    Ok(SearchOptions { cap: s.get("cap")?, ..SearchOptions::default() })
}

pub fn recommend(s: &Settings) -> Result<(), CliError> {
    let target: u64 = s.require("target_user")?;
    let q = Query::new(UserId(target), s.get("group_size")?, s.get("core")?, s.get("top_k")?)?;
    let ds = Dataset::load(s.dataset_path())?;
    let model = load_model(s.model_path())?;
    let rec = Recommender::new(&ds.network, model, None).with_options(search_options(s)?);
    let r = rec.recommend(&q)?;
    let members: Vec<String> = r.group.iter().map(|u| u.to_string()).collect();
    println!("group: {}", members.join(" "));
    println!("topic: {} {}", r.topic, ds.network.vocabulary().name(r.topic).unwrap_or("?"));
    print!("{}", r.locations.to_csv());
    Ok(())
}

pub fn evaluate(s: &Settings) -> Result<(), CliError> {
    let seed: u64 = s.get("seed")?;
    let cfg = ExperimentConfig {
        n_targets: s.get("eval.n_targets")?,
        seed: s.opt("eval.seed")?.unwrap_or(seed ^ EVAL_SALT),
        k_range: s.range("eval.k_range")?,
        h_range: s.range("eval.h_range")?,
        top_k_range: s.range("eval.K_range")?,
    };
    cfg.validate()?;
    let ds = Dataset::load(s.dataset_path())?;
    let model = load_model(s.model_path())?;
    let rec = Recommender::new(&ds.network, model, ds.split.cutoff()).with_options(search_options(s)?);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.get("threads")?)
        .build()
        .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    let report = pool.install(|| run_experiment(&rec, &ds.split.test, &cfg))?;
    let failed: usize = report.cells.iter().map(|c| c.failed).sum();
    if failed > 0 {
        eprintln!("{failed} target evaluations failed and were excluded");
    }
    write(&s.report_dir().join("report.csv"), &report.to_csv())?;
    print!("{report}");
    Ok(())
}

pub fn oracle_check(s: &Settings) -> Result<(), CliError> {
    let inject_fault: bool = s.get("oracle.inject_fault")?;
    if let Some(path) = s.path("oracle.replay") {
        let text = fs::read_to_string(&path).map_err(|e| CliError::Io(path.clone(), e))?;
        let inst: Instance =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let ok = inst.check(inject_fault);
        println!("{}: replay {}", inst.suite(), if ok { "PASS" } else { "FAIL" });
        return if ok { Ok(()) } else { Err(CliError::OracleMismatch(1)) };
    }
    let cfg = OracleConfig { trials: s.get("oracle.trials")?, seed: s.get("seed")?, inject_fault };
    let mut failed = 0;
    for suite in Suite::ALL {
        let r = run_suite(suite, &cfg);
        println!(
            "{suite}: {} trials, {} mismatches, {}",
            r.trials,
            r.mismatches,
            if r.passed() { "PASS" } else { "FAIL" }
        );
        if let Some(inst) = r.first_failure {
            failed += 1;
            let path = s.report_dir().join(format!("oracle-{suite}.json"));
            let json = serde_json::to_string_pretty(&inst).expect("instances serialize");
            write(&path, &json)?;
            println!("  failing instance written to {}", path.display());
        }
    }
    if failed > 0 {
        return Err(CliError::OracleMismatch(failed));
    }
    Ok(())
}
