use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use thiserror::Error;

use crate::attack::AttackError;
use crate::eval::EvalError;
use crate::graph::GraphError;
use crate::ingest::IngestError;
use crate::rank::RankError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Seeding(String),
    #[error("{0}")]
    TheoryFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Validation(_) => 2,
            CliError::Seeding(_) => 3,
            CliError::TheoryFailed(_) => 4,
        }
    }

    pub(crate) fn io(context: impl Display, source: std::io::Error) -> Self {
        CliError::Io { context: context.to_string(), source }
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::Io(source) => CliError::io("graph i/o", source),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(source) => CliError::io("input i/o", source),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<RankError> for CliError {
    fn from(e: RankError) -> Self {
        match e {
            RankError::NotEnoughVerified { .. } | RankError::ZeroSeeds => CliError::Seeding(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        match e {
            AttackError::Graph(g) => g.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Rank(r) => r.into(),
            EvalError::Attack(a) => a.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

/// Flat key-value TOML whose keys mirror the long flag names. Both
/// `rng-seed` and `rng_seed` spellings are accepted.
#[derive(Clone, Debug, Default)]
pub struct Config {
    table: toml::Table,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e| CliError::Validation(format!("config: {e}")))?;
        Ok(Self { table })
    }

    fn raw(&self, key: &str) -> Option<&toml::Value> {
        self.table.get(key).or_else(|| self.table.get(&key.replace('-', "_")))
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>, CliError> {
        let Some(value) = self.raw(key) else {
            return Ok(None);
        };
        let parsed = value.clone().try_into::<T>().or_else(|e| match value {
            // `epsilon = 0` should still read as a float
            toml::Value::Integer(i) => toml::Value::Float(*i as f64).try_into::<T>(),
            _ => Err(e),
        });
        parsed.map(Some).map_err(|e| CliError::Validation(format!("config key `{key}`: {e}")))
    }

    /// Flag, else config, else `default`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    /// Flag, else config, else nothing.
    pub fn opt<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// Like [`Config::pick`] for values the config spells as strings.
    pub fn pick_parsed<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.get::<String>(key)? {
            Some(s) => s.parse().map_err(|e| CliError::Validation(format!("config key `{key}`: {e}"))),
            None => Ok(default),
        }
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Result<Option<PathBuf>, CliError> {
        match flag {
            Some(p) => Ok(Some(p)),
            None => Ok(self.get::<String>(key)?.map(PathBuf::from)),
        }
    }

    pub fn required_path(&self, flag: Option<PathBuf>, key: &str) -> Result<PathBuf, CliError> {
        self.path(flag, key)?
            .ok_or_else(|| CliError::Validation(format!("missing --{key} (flag or config key)")))
    }
}
