//! Build sum and entropy weighted graphs from the same log, extract the
//! giant component and round-trip it through a snapshot.

use truetop::graph::{build_graph, extract_gscc, read_snapshot, write_snapshot, WeightModel};
use truetop::ingest::{InteractionKind, InteractionRecord, TargetPeriod, UserAttributes};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let period = TargetPeriod::new(0, 300, 3)?;
    let rec = |s: &str, t: &str, ts| InteractionRecord::new(s, t, InteractionKind::Retweet, ts);
    let records = vec![
        // steady: one interaction per epoch
        rec("alice", "bob", 10),
        rec("alice", "bob", 110),
        rec("alice", "bob", 210),
        // bursty: three interactions in one epoch
        rec("bob", "carol", 5),
        rec("bob", "carol", 6),
        rec("bob", "carol", 7),
        rec("carol", "alice", 150),
        rec("dave", "alice", 20),
    ];
    let attrs = vec![UserAttributes { user_id: "alice".into(), verified: true }];

    for model in [WeightModel::Sum, WeightModel::Entropy { epochs: 3 }] {
        let g = build_graph(&records, &attrs, model, &period)?;
        println!("model {model}:");
        for e in g.edges() {
            println!("  {} -> {}  w = {:.4}  counts {:?}", g.user_id(e.source), g.user_id(e.target), e.weight, e.counts);
        }
    }

    let g = build_graph(&records, &attrs, WeightModel::Entropy { epochs: 3 }, &period)?;
    let gscc = extract_gscc(&g);
    println!("giant component: {} of {} users ({:?})", gscc.largest, g.user_count(), gscc.graph.users());

    let mut buf = Vec::new();
    write_snapshot(&gscc.graph, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));
    assert_eq!(read_snapshot(buf.as_slice())?, gscc.graph);
    Ok(())
}
