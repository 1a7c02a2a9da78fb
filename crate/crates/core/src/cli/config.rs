//! `key = value` config files merged under command-line flags.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::CliError;

const KNOWN_KEYS: &[&str] = &[
    "theta", "eta", "extra_loss", "tail_tol", "format", "output", "seed", "g", "n_mean",
    "g_list", "n_min", "n_max", "n_count", "trials", "level", "verify",
];

/// Values from a config file, looked up after the corresponding flag.
#[derive(Debug, Clone, Default)]
pub struct Resolver {
    file: HashMap<String, String>,
    source: Option<PathBuf>,
}

impl Resolver {
    pub fn from_file(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut resolver = Self::parse(&text)?;
        resolver.source = Some(path.to_path_buf());
        Ok(resolver)
    }

    /// Parses `key = value` lines; `#` starts a comment, `-` and `_` are
    /// interchangeable in keys.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut file = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let key = key.trim().replace('-', "_");
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", lineno + 1)));
            }
            file.insert(key, value.trim().to_string());
        }
        Ok(Self { file, source: None })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.file.get(key).map(String::as_str)
    }

    fn bad(&self, key: &str, value: &str) -> CliError {
        let origin = self.source.as_ref().map_or("config".to_string(), |p| p.display().to_string());
        CliError::Usage(format!("{origin}: invalid value {value:?} for {key}"))
    }

    /// The flag if given, else the config value, else `None`.
    pub fn get<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key).map(|v| v.parse().map_err(|_| self.bad(key, v))).transpose()
    }

    /// Comma-separated list variant of [`Self::get`].
    pub fn get_list<T: FromStr>(&self, key: &str, flag: Option<Vec<T>>) -> Result<Option<Vec<T>>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|item| item.trim().parse().map_err(|_| self.bad(key, v)))
                    .collect()
            })
            .transpose()
    }
}
