//! Flat `key = value` configuration with flag > file > default precedence.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::CliError;

/// Every recognized key, its default, and a one-line description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("checkins", "", "check-in CSV: user_id,poi_id,timestamp,lat,lon,category"),
    ("edges", "", "friendship CSV: u,v"),
    ("poi_links", "", "optional venue link CSV: a,b"),
    ("groups", "", "optional explicit group CSV: event_id,user_id,poi_id,timestamp"),
    ("window", "1800", "co-check-in window in seconds for implicit groups"),
    ("data_dir", "agsgr-data", "directory for every generated file"),
    ("dataset", "", "binary dataset path [data_dir/dataset.bin]"),
    ("model", "", "model checkpoint path [data_dir/model.bin]"),
    ("loss_csv", "", "per-epoch loss CSV [data_dir/loss.csv]"),
    ("report_dir", "", "evaluation and oracle output directory [data_dir/reports]"),
    ("target_user", "", "query target user id"),
    ("group_size", "5", "query group size h"),
    ("core", "3", "query core constraint k"),
    ("top_k", "5", "number of locations K"),
    ("cap", "10000", "maximum candidate groups per query"),
    ("seed", "0", "root random seed"),
    ("dim", "32", "latent dimension"),
    ("epochs", "200", "training epochs (one full-batch Adam step each)"),
    ("lr", "0.01", "Adam learning rate"),
    ("l2", "0.0001", "L2 regularization weight"),
    ("init_std", "0.1", "std of the Gaussian initialization"),
    ("neg_ratio", "4", "negatives per positive topic (0 = all)"),
    ("threads", "0", "evaluation worker threads (0 = all cores)"),
    ("eval.n_targets", "100", "number of sampled target users"),
    ("eval.seed", "", "target sampling seed [seed]"),
    ("eval.k_range", "1-5", "core values, e.g. 1-5 or 1,3"),
    ("eval.h_range", "2-10", "group sizes"),
    ("eval.K_range", "5,10", "location list lengths"),
    ("oracle.trials", "200", "random instances per oracle suite"),
    ("oracle.inject_fault", "false", "use the unsafe pruning rule in the ANN suite"),
    ("oracle.replay", "", "replay a saved failing instance (JSON)"),
];

/// Help text listing every key.
pub fn keys_help() -> String {
    let mut s = String::from("Configuration keys (flag > config file > default):\n");
    for (k, d, desc) in KEYS {
        let d = if d.is_empty() { String::new() } else { format!(" [default: {d}]") };
        s.push_str(&format!("  {k:<22} {desc}{d}\n"));
    }
    s.push_str("\nThe config file is given by --config or the AGSGR_CONFIG environment variable.");
    s
}

pub fn parse_file(text: &str, origin: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("{}:{}: expected key = value", origin.display(), i + 1)))?;
        let k = k.trim();
        if !KEYS.iter().any(|(name, _, _)| *name == k) {
            return Err(CliError::Config(format!("{}:{}: unknown key {k}", origin.display(), i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Parses `1-5`, `5,10`, or a mix such as `1-3,7`.
pub fn parse_range(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let a: usize = a.trim().parse().map_err(|_| format!("bad range {part}"))?;
                let b: usize = b.trim().parse().map_err(|_| format!("bad range {part}"))?;
                if a > b {
                    return Err(format!("empty range {part}"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| format!("bad value {part}"))?),
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Resolved key/value view.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn resolve(file: BTreeMap<String, String>, flags: BTreeMap<String, String>) -> Self {
        let mut values: BTreeMap<String, String> =
            KEYS.iter().map(|(k, d, _)| (k.to_string(), d.to_string())).collect();
        values.extend(file);
        values.extend(flags);
        Self { values }
    }

    pub fn load(config: Option<&Path>, flags: BTreeMap<String, String>) -> Result<Self, CliError> {
        let file = match config {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|e| CliError::Io(p.to_path_buf(), e))?;
                parse_file(&text, p)?
            }
            None => BTreeMap::new(),
        };
        Ok(Self::resolve(file, flags))
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map_or("", String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        let v = self.raw(key);
        v.parse().map_err(|_| CliError::Config(format!("{key}: cannot parse {v:?}")))
    }

    pub fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        if self.raw(key).is_empty() {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.opt(key)?.ok_or_else(|| CliError::Config(format!("{key} is required")))
    }

    pub fn range(&self, key: &str) -> Result<Vec<usize>, CliError> {
        parse_range(self.raw(key)).map_err(|e| CliError::Config(format!("{key}: {e}")))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.raw(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    fn data_path(&self, key: &str, file: &str) -> PathBuf {
        self.path(key).unwrap_or_else(|| Path::new(self.raw("data_dir")).join(file))
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.data_path("dataset", "dataset.bin")
    }

    pub fn model_path(&self) -> PathBuf {
        self.data_path("model", "model.bin")
    }

    pub fn loss_path(&self) -> PathBuf {
        self.data_path("loss_csv", "loss.csv")
    }

    pub fn report_dir(&self) -> PathBuf {
        self.data_path("report_dir", "reports")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1-5").unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(parse_range("10, 5").unwrap(), vec![5, 10]);
        assert_eq!(parse_range("1-2,7").unwrap(), vec![1, 2, 7]);
        assert!(parse_range("3-1").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn precedence() {
        let file = parse_file("core = 2\n# comment\ngroup_size=6 # trailing\n", Path::new("c")).unwrap();
        let flags = BTreeMap::from([("core".to_string(), "4".to_string())]);
        let s = Settings::resolve(file, flags);
        assert_eq!(s.get::<usize>("core").unwrap(), 4);
        assert_eq!(s.get::<usize>("group_size").unwrap(), 6);
        assert_eq!(s.get::<usize>("top_k").unwrap(), 5);
        assert_eq!(s.model_path(), Path::new("agsgr-data/model.bin"));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(parse_file("nope = 1\n", Path::new("c")).is_err());
        assert!(parse_file("just text\n", Path::new("c")).is_err());
    }
}
