//! Text snapshot of an interaction graph.
//!
//! ```text
//! #truetop-graph v1 model=entropy:3
//! 0,1,3.386294361119891,1|1|0
//! #users
//! alice,1
//! bob,0
//! ```
//!
//! Edge endpoints index into the `#users` section. Weights use the shortest
//! decimal that parses back to the same `f64`, so a snapshot round-trips
//! bit-exactly.

use std::io::{BufRead, Write};

use super::{GraphBuilder, GraphError, InteractionGraph, WeightModel};

const MAGIC: &str = "#truetop-graph v1 model=";
const USERS: &str = "#users";

pub fn write_snapshot<W: Write>(g: &InteractionGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{MAGIC}{}", g.model())?;
    for e in g.edges() {
        write!(out, "{},{},{},", e.source, e.target, e.weight)?;
        for (x, d) in e.counts.iter().enumerate() {
            if x > 0 {
                out.write_all(b"|")?;
            }
            write!(out, "{d}")?;
        }
        out.write_all(b"\n")?;
    }
    writeln!(out, "{USERS}")?;
    for (id, &verified) in g.users().iter().zip(g.verified_flags()) {
        writeln!(out, "{id},{}", u8::from(verified))?;
    }
    out.flush()
}

pub fn read_snapshot<R: BufRead>(input: R) -> Result<InteractionGraph, GraphError> {
    let mut lines = input.lines().enumerate();
    let bad = |line: usize, reason: &str| GraphError::Snapshot { line: line + 1, reason: reason.into() };

    let (_, header) = lines.next().ok_or_else(|| bad(0, "empty snapshot"))?;
    let header = header?;
    let model: WeightModel = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| bad(0, "missing `#truetop-graph v1` header"))?
        .trim()
        .parse()?;

    let mut edges: Vec<(usize, usize, f64, Vec<u32>)> = Vec::new();
    let mut epochs: Option<usize> = None;
    let mut saw_users = false;
    for (no, line) in lines.by_ref() {
        let line = line?;
        if line == USERS {
            saw_users = true;
            break;
        }
        let mut fields = line.splitn(4, ',');
        let mut field = |name: &str| fields.next().ok_or_else(|| bad(no, &format!("missing {name}")));
        let source: usize = field("source")?.parse().map_err(|_| bad(no, "bad source index"))?;
        let target: usize = field("target")?.parse().map_err(|_| bad(no, "bad target index"))?;
        let weight: f64 = field("weight")?.parse().map_err(|_| bad(no, "bad weight"))?;
        let counts = field("counts")?
            .split('|')
            .map(|d| d.parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad(no, "bad epoch counts"))?;
        if *epochs.get_or_insert(counts.len()) != counts.len() {
            return Err(bad(no, "inconsistent epoch count"));
        }
        edges.push((source, target, weight, counts));
    }
    if !saw_users {
        return Err(bad(0, "missing `#users` section"));
    }

    let mut users: Vec<(String, bool)> = Vec::new();
    for (no, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (id, flag) = line.rsplit_once(',').ok_or_else(|| bad(no, "expected `user_id,verified`"))?;
        let verified = match flag {
            "1" => true,
            "0" => false,
            _ => return Err(bad(no, "verified flag must be 0 or 1")),
        };
        users.push((id.to_owned(), verified));
    }

    let epochs = epochs.unwrap_or(match model {
        WeightModel::Sum => 1,
        WeightModel::Entropy { epochs } => epochs as usize,
    });
    let mut builder = GraphBuilder::new(model, epochs);
    for (id, verified) in &users {
        builder.add_user(id, *verified);
    }
    if builder_user_count(&users) != users.len() {
        return Err(bad(0, "duplicate user in `#users` section"));
    }
    for (source, target, weight, counts) in edges {
        let (Some(s), Some(t)) = (users.get(source), users.get(target)) else {
            return Err(bad(0, &format!("edge {source},{target} references an unknown user")));
        };
        builder.add_edge(&s.0, &t.0, weight, counts);
    }
    builder.build()
}

fn builder_user_count(users: &[(String, bool)]) -> usize {
    let mut ids: Vec<&str> = users.iter().map(|(id, _)| id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.len()
}
