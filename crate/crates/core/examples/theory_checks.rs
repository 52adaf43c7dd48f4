//! The closed-form credit leak into a sybil region, the leak estimate from
//! interaction ratios, and top-K stability on a graph with known influence.

use truetop::attack::{estimate_alpha_star, prop1_closed_form, theorem2_bound, two_region_graph};
use truetop::eval::theorem1_check;
use truetop::graph::{balanced_power_law, NormalizedMatrix};
use truetop::rank::Seeds;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (alpha, beta) = (0.01, 0.1);
    let g = two_region_graph(10, 5, alpha, beta)?;
    let w = NormalizedMatrix::from_graph(&g);
    let mut x: Vec<f64> = (0..15).map(|i| if i < 10 { 0.1 } else { 0.0 }).collect();
    let mut next = vec![0.0; 15];
    println!(" t  simulated C_S   closed form");
    for t in 1..=40u32 {
        w.apply(&x, &mut next);
        std::mem::swap(&mut x, &mut next);
        if t % 8 == 1 {
            let sim: f64 = x[10..].iter().sum();
            println!("{t:>2}  {sim:.10}  {:.10}", prop1_closed_form(alpha, beta, t)?);
        }
    }
    println!("limit alpha / (alpha + beta) = {:.10}", alpha / (alpha + beta));

    let a = estimate_alpha_star(1000.0, 0.88, 0.08);
    println!("leak estimate for 1000 honest users per sybil: {a:.3e}");
    for t in [5, 10, 20] {
        println!("  sybil bound for K = 100 after {t} iterations: {:.4}", theorem2_bound(a, t, 100));
    }

    let g = balanced_power_law(200, 8.0, 2.0 / 3.0, 9)?;
    let w = NormalizedMatrix::from_graph(&g);
    let v0 = Seeds::uniform(200, &[3, 50, 120, 199]).initial;
    for k in [5, 10, 20] {
        let r = theorem1_check(&w, &v0, k, 1e-12, 100_000);
        println!(
            "K = {k:>2}: lambda {:.3}, gap {:.4}, predicted stable from t = {}, observed {}, violations {}",
            r.lambda.lambda,
            r.gap_k,
            r.predicted,
            r.first_stable,
            r.violations.len()
        );
    }
    Ok(())
}
