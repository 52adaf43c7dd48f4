use std::collections::HashSet;
use std::io::{BufRead, Write};

use super::{IngestError, InteractionKind, InteractionRecord, TargetPeriod, UserAttributes};

/// Records accepted from a log plus counts of every dropped line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedLog {
    pub records: Vec<InteractionRecord>,
    pub malformed: usize,
    pub out_of_period: usize,
    pub self_interactions: usize,
}

impl ParsedLog {
    pub fn dropped(&self) -> usize {
        self.malformed + self.out_of_period + self.self_interactions
    }
}

fn parse_line(line: &str) -> Result<InteractionRecord, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    let [source, target, kind, timestamp] = fields.as_slice() else {
        return Err(format!("expected 4 fields, found {}", fields.len()));
    };
    if source.is_empty() || target.is_empty() {
        return Err("empty user id".into());
    }
    let kind: InteractionKind = kind.parse()?;
    let timestamp: i64 = timestamp.parse().map_err(|e| format!("bad timestamp `{timestamp}`: {e}"))?;
    Ok(InteractionRecord::new(*source, *target, kind, timestamp))
}

/// Reads `source_id,target_id,kind,timestamp` lines.
///
/// Blank lines and `#` comments are ignored. Malformed lines, interactions
/// outside `period` and self-interactions are skipped and counted; only a
/// failing reader aborts the parse.
pub fn parse_interaction_log<R: BufRead>(
    mut reader: R,
    period: &TargetPeriod,
) -> Result<ParsedLog, IngestError> {
    let mut parsed = ParsedLog::default();
    let mut buf = Vec::new();
    let mut line_no = 0usize;
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let Ok(line) = std::str::from_utf8(&buf) else {
            log::warn!("line {line_no}: not valid UTF-8, skipped");
            parsed.malformed += 1;
            continue;
        };
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_line(line) {
            Err(reason) => {
                log::warn!("line {line_no}: {reason}, skipped");
                parsed.malformed += 1;
            }
            Ok(record) if record.source == record.target => parsed.self_interactions += 1,
            Ok(record) if !period.contains(record.timestamp) => parsed.out_of_period += 1,
            Ok(record) => parsed.records.push(record),
        }
    }
    Ok(parsed)
}

pub fn write_interaction_log<'a, W, I>(mut writer: W, records: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a InteractionRecord>,
{
    for r in records {
        writeln!(writer, "{},{},{},{}", r.source, r.target, r.kind, r.timestamp)?;
    }
    writer.flush()
}

/// Reads `user_id,verified` lines with `verified` in `{0,1}`.
///
/// Unlike interaction logs, attribute files are small and hand-maintained, so
/// any malformed or duplicate line is an error.
pub fn parse_user_attributes<R: BufRead>(reader: R) -> Result<Vec<UserAttributes>, IngestError> {
    let mut seen = HashSet::new();
    let mut attrs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let invalid = |reason: String| IngestError::InvalidAttributes { line: idx + 1, reason };
        let (id, flag) = line
            .split_once(',')
            .ok_or_else(|| invalid("expected `user_id,verified`".into()))?;
        let (id, flag) = (id.trim(), flag.trim());
        if id.is_empty() {
            return Err(invalid("empty user id".into()));
        }
        let verified = match flag {
            "1" => true,
            "0" => false,
            other => return Err(invalid(format!("verified flag must be 0 or 1, got `{other}`"))),
        };
        if !seen.insert(id.to_owned()) {
            return Err(invalid(format!("duplicate user id `{id}`")));
        }
        attrs.push(UserAttributes { user_id: id.to_owned(), verified });
    }
    Ok(attrs)
}

pub fn write_user_attributes<'a, W, I>(mut writer: W, attrs: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a UserAttributes>,
{
    for a in attrs {
        writeln!(writer, "{},{}", a.user_id, u8::from(a.verified))?;
    }
    writer.flush()
}
