//! Edge weights from per-epoch interaction counts.

/// `|I|`, the total interaction count.
pub fn edge_weight_sum(counts: &[u32]) -> f64 {
    counts.iter().map(|&d| f64::from(d)).sum()
}

/// `(1 - sum_x p_x ln p_x) * |I|` with `p_x = d_x / |I|` and `0 ln 0 = 0`.
///
/// Interactions spread evenly over many epochs weigh more than the same
/// number concentrated in one epoch; a single busy epoch gives exactly `|I|`.
/// Returns `None` when every count is zero.
pub fn edge_weight_entropy(counts: &[u32]) -> Option<f64> {
    let total = edge_weight_sum(counts);
    if total == 0.0 {
        return None;
    }
    let entropy: f64 = counts
        .iter()
        .filter(|&&d| d > 0)
        .map(|&d| {
            let p = f64::from(d) / total;
            -p * p.ln()
        })
        .sum();
    Some((1.0 + entropy) * total)
}
