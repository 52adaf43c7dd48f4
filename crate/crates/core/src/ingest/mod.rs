//! Interaction logs, user attributes and synthetic log generation.

mod log;
mod synthetic;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use self::log::{
    parse_interaction_log, parse_user_attributes, write_interaction_log, write_user_attributes,
    ParsedLog,
};
pub use self::synthetic::{generate_powerlaw_graph, InteractionsPerEdge, SyntheticLog, SyntheticSpec};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid target period: {0}")]
    InvalidPeriod(String),
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("attribute file line {line}: {reason}")]
    InvalidAttributes { line: usize, reason: String },
}

/// The kind of a user-to-user interaction. All kinds weigh the same.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InteractionKind {
    Retweet,
    Reply,
    Mention,
}

impl InteractionKind {
    pub const ALL: [InteractionKind; 3] = [Self::Retweet, Self::Reply, Self::Mention];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Retweet => "retweet",
            Self::Reply => "reply",
            Self::Mention => "mention",
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InteractionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "retweet" => Ok(Self::Retweet),
            "reply" => Ok(Self::Reply),
            "mention" => Ok(Self::Mention),
            other => Err(format!("unknown interaction kind `{other}`")),
        }
    }
}

/// One interaction from `source` to `target` at `timestamp` (seconds since
/// the epoch).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InteractionRecord {
    pub source: String,
    pub target: String,
    pub kind: InteractionKind,
    pub timestamp: i64,
}

impl InteractionRecord {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        kind: InteractionKind,
        timestamp: i64,
    ) -> Self {
        Self { source: source.into(), target: target.into(), kind, timestamp }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserAttributes {
    pub user_id: String,
    pub verified: bool,
}

/// The half-open window `[start, end)` split into `epochs` equal intervals.
/// The last epoch absorbs the remainder when the length is not divisible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TargetPeriod {
    start: i64,
    end: i64,
    epochs: u32,
}

impl TargetPeriod {
    pub fn new(start: i64, end: i64, epochs: u32) -> Result<Self, IngestError> {
        if start >= end {
            return Err(IngestError::InvalidPeriod(format!("start {start} must precede end {end}")));
        }
        if epochs == 0 {
            return Err(IngestError::InvalidPeriod("epoch count must be at least 1".into()));
        }
        if (end - start) < i64::from(epochs) {
            return Err(IngestError::InvalidPeriod(format!(
                "period of {} seconds cannot hold {epochs} epochs",
                end - start
            )));
        }
        Ok(Self { start, end, epochs })
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn end(&self) -> i64 {
        self.end
    }

    pub fn epochs(&self) -> u32 {
        self.epochs
    }

    pub fn contains(&self, timestamp: i64) -> bool {
        (self.start..self.end).contains(&timestamp)
    }

    /// Zero-based epoch index of `timestamp`, or `None` outside the period.
    pub fn epoch_of(&self, timestamp: i64) -> Option<usize> {
        if !self.contains(timestamp) {
            return None;
        }
        let len = (self.end - self.start) / i64::from(self.epochs);
        let idx = ((timestamp - self.start) / len).min(i64::from(self.epochs) - 1);
        Some(idx as usize)
    }

    /// Same window with a different epoch count.
    pub fn with_epochs(&self, epochs: u32) -> Result<Self, IngestError> {
        Self::new(self.start, self.end, epochs)
    }
}
