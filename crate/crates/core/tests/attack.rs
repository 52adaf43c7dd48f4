mod common;

use common::*;
use proptest::prelude::*;
use truetop::attack::*;
use truetop::graph::NormalizedMatrix;

fn scenario(strategy: AttackStrategy, w_g: usize, n2: usize) -> AttackScenario {
    let mut s = AttackScenario::new(strategy, w_g, 3);
    s.n2 = n2;
    s
}

#[test]
fn minimal_attack_adds_one_cross_edge() {
    let honest = graph(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], &[0]);
    let scen = scenario(AttackStrategy::Random, 1, 2);
    let aug = attach_sybil_region(&honest, &scen.region(), &scen, 0).unwrap();
    assert_eq!((aug.honest_count(), aug.sybil_count()), (3, 2));
    let cross: Vec<_> = aug.graph.edges().filter(|e| !aug.is_sybil[e.source] && aug.is_sybil[e.target]).collect();
    assert_eq!(cross.len(), 1);
    assert_eq!(cross[0].weight, 1.0);
    assert!(aug.graph.edges().all(|e| !(aug.is_sybil[e.source] && !aug.is_sybil[e.target])));
    assert!((aug.alpha - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn complete_region_has_all_internal_edges() {
    let honest = random_strong(30, 30, 1);
    let scen = scenario(AttackStrategy::Random, 4, 5);
    let aug = attach_sybil_region(&honest, &scen.region(), &scen, 0).unwrap();
    let internal = aug.graph.edges().filter(|e| aug.is_sybil[e.source] && aug.is_sybil[e.target]).count();
    assert_eq!(internal, 20);
    assert_eq!(SybilRegion::complete(5).internal_edges().len(), 20);
}

#[test]
fn alpha_is_attack_weight_over_honest_weight() {
    // scale a synthetic graph to total weight 1e6
    let base = random_strong(200, 600, 2);
    let scale = 1e6 / base.total_weight();
    let edges: Vec<_> = base.edges().map(|e| (e.source, e.target, e.weight * scale)).collect();
    let honest = graph(200, &edges, &[0]);
    assert!((honest.total_weight() - 1e6).abs() < 1e-6);
    let scen = scenario(AttackStrategy::Random, 100, 50);
    let aug = attach_sybil_region(&honest, &scen.region(), &scen, 0).unwrap();
    assert!((aug.alpha - 1e-4).abs() < 1e-15);
    let attack_weight: f64 =
        aug.graph.edges().filter(|e| !aug.is_sybil[e.source] && aug.is_sybil[e.target]).map(|e| e.weight).sum();
    assert_eq!(attack_weight, 100.0);
}

#[test]
fn honest_part_is_unchanged() {
    let honest = random_strong(40, 80, 3);
    let scen = scenario(AttackStrategy::Community, 10, 8);
    let aug = attach_sybil_region(&honest, &scen.region(), &scen, 2).unwrap();
    for e in honest.edges() {
        let a = aug.graph.edge(aug.honest_index[e.source], aug.honest_index[e.target]).unwrap();
        assert_eq!(a.weight, e.weight);
    }
    for (h, &a) in aug.honest_index.iter().enumerate() {
        assert_eq!(aug.graph.user_id(a), honest.user_id(h));
        assert_eq!(aug.graph.is_verified(a), honest.is_verified(h));
    }
    assert!(aug.sybil_index.iter().all(|&s| !aug.graph.is_verified(s)));
}

#[test]
fn community_targets_are_a_connected_neighbourhood() {
    let honest = random_strong(60, 60, 4);
    let scen = scenario(AttackStrategy::Community, 12, 4);
    let aug = attach_sybil_region(&honest, &scen.region(), &scen, 0).unwrap();
    let mut targets = aug.attacked.clone();
    targets.sort_unstable();
    targets.dedup();
    assert_eq!(targets.len(), 12);
    // every target after the first touches an earlier one (undirected)
    for (i, &t) in aug.attacked.iter().enumerate().skip(1) {
        let near = aug.attacked[..i].iter().any(|&p| honest.edge(p, t).is_some() || honest.edge(t, p).is_some());
        assert!(near, "target {t} is not adjacent to the earlier targets");
    }
}

#[test]
fn seed_attack_targets_sit_downstream_of_the_seeds() {
    let honest = random_strong(80, 120, 5);
    let mut scen = scenario(AttackStrategy::SeedAttack, 5, 4);
    scen.known_seeds = vec![id(0)];
    scen.d = 3;
    // pool: the first 3 non-seed users in breadth-first order along out-edges
    let mut frontier = vec![0usize];
    let mut seen = vec![false; 80];
    seen[0] = true;
    let mut pool = Vec::new();
    while pool.len() < 3 {
        let mut next = Vec::new();
        for &u in &frontier {
            for e in honest.out_edges(u) {
                if !seen[e.target] {
                    seen[e.target] = true;
                    pool.push(e.target);
                    next.push(e.target);
                }
            }
        }
        frontier = next;
    }
    pool.truncate(3);
    assert!(matches!(
        attach_sybil_region(&honest, &scen.region(), &scen, 0),
        Err(AttackError::NotEnoughTargets { requested: 5, available: 3 })
    ));
    scen.w_g = 3;
    let aug2 = attach_sybil_region(&honest, &scen.region(), &scen, 0).unwrap();
    let mut got = aug2.attacked.clone();
    got.sort_unstable();
    pool.sort_unstable();
    assert_eq!(got, pool);
}

#[test]
fn scenario_validation() {
    assert!(AttackScenario::from_toml("strategy = \"seed_attack\"\nw_g = 10\n").is_err());
    assert!(AttackScenario::from_toml("strategy = \"random\"\nw_g = 0\n").is_err());
    assert!(AttackScenario::from_toml("strategy = \"random\"\nw_g = 5\nbogus = 1\n").is_err());
    let s = AttackScenario::from_toml("strategy = \"community\"\nw_g = 50\nrng_seed = 4\n").unwrap();
    assert_eq!((s.n2, s.d, s.trials, s.beta), (500, 3000, 50, 0.0));
    assert_eq!(AttackScenario::from_toml(&s.to_toml()).unwrap(), s);
    let honest = complete(4);
    let mut bad = scenario(AttackStrategy::SeedAttack, 1, 2);
    bad.known_seeds = vec!["nobody".into()];
    assert!(matches!(attach_sybil_region(&honest, &bad.region(), &bad, 0), Err(AttackError::UnknownSeed(_))));
}

#[test]
fn alpha_star_examples() {
    let io_honest: f64 = (0.89 + 1.04 + 0.70) / 3.0;
    assert!((io_honest - 0.8767).abs() < 1e-3);
    let a = estimate_alpha_star(1000.0, 0.88, 0.08);
    assert!((a - 4.2553e-5).abs() < 1e-8);
    assert_eq!(estimate_alpha_star(1000.0, 0.88, 0.0), 0.0);
}

#[test]
fn closed_form_examples() {
    for (a, b) in [(0.01, 0.2), (0.3, 0.05), (1e-3, 1e-3)] {
        assert!((prop1_closed_form(a, b, 1).unwrap() - a).abs() < 1e-15);
    }
    assert!((prop1_closed_form(0.05, 0.05, 5000).unwrap() - 0.5).abs() < 1e-12);
    // two-state recurrence oracle
    let (alpha, beta) = (0.01, 0.001);
    let (mut h, mut s) = (1.0f64, 0.0f64);
    for _ in 0..50 {
        let nh = (1.0 - alpha) * h + beta * s;
        s = alpha * h + (1.0 - beta) * s;
        h = nh;
    }
    assert!((prop1_closed_form(alpha, beta, 50).unwrap() - s).abs() < 1e-12);
    assert!(prop1_closed_form(0.6, 0.5, 3).is_err());
}

#[test]
fn closed_form_matches_two_region_graph() {
    let grid = [1e-3, 1e-2, 1e-1];
    for &alpha in &grid {
        for &beta in &grid {
            let g = two_region_graph(6, 4, alpha, beta).unwrap();
            let w = NormalizedMatrix::from_graph(&g);
            let mut x = vec![0.0; 10];
            x[0] = 1.0;
            let mut next = vec![0.0; 10];
            for t in 1..=200u32 {
                w.apply(&x, &mut next);
                std::mem::swap(&mut x, &mut next);
                let c_s: f64 = x[6..].iter().sum();
                assert!((c_s - prop1_closed_form(alpha, beta, t).unwrap()).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn hoarding_region_stays_under_leak_bound() {
    for alpha in [1e-3, 1e-2, 5e-2] {
        let g = two_region_graph(8, 5, alpha, 0.0).unwrap();
        let w = NormalizedMatrix::from_graph(&g);
        let mut x: Vec<f64> = (0..13).map(|i| if i < 8 { 0.125 } else { 0.0 }).collect();
        let mut next = vec![0.0; 13];
        let mut prev = 0.0;
        for t in 1..=300 {
            w.apply(&x, &mut next);
            std::mem::swap(&mut x, &mut next);
            let c_s: f64 = x[8..].iter().sum();
            assert!(c_s >= prev - 1e-15);
            assert!(c_s <= 1.0 - (1.0 - alpha).powi(t) + 1e-6);
            prev = c_s;
        }
    }
}

#[test]
fn sybil_count_examples() {
    assert_eq!(sybil_count_metric(0.0, &[0.5, 0.3, 0.2]), 0);
    assert_eq!(sybil_count_metric(0.45, &[0.5, 0.3, 0.2]), 1);
    assert_eq!(sybil_count_metric(1.5, &[0.5, 0.3, 0.2]), 3);
}

#[test]
fn bound_examples() {
    assert_eq!(theorem2_bound(0.0, 50, 100), 0.0);
    assert_eq!(theorem2_bound(1e-3, 0, 100), 0.0);
    let b = theorem2_bound(4.2e-5, 1000, 100);
    assert!((b - 100.0 * (1.0 / (1.0 - 4.2e-5f64).powi(1000) - 1.0)).abs() < 1e-9);
    assert!((b - 4.29).abs() < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn attack_is_deterministic(seed in any::<u64>(), trial in 0u64..5, w_g in 1usize..20, strategy in 0usize..2) {
        let honest = random_strong(40, 60, 11);
        let strategy = [AttackStrategy::Random, AttackStrategy::Community][strategy];
        let mut scen = AttackScenario::new(strategy, w_g, seed);
        scen.n2 = 6;
        scen.beta = 0.2;
        let a = attach_sybil_region(&honest, &scen.region(), &scen, trial).unwrap();
        let b = attach_sybil_region(&honest, &scen.region(), &scen, trial).unwrap();
        prop_assert_eq!(&a.graph, &b.graph);
        prop_assert_eq!(&a.attacked, &b.attacked);
    }

    #[test]
    fn augmented_credits_are_conserved(seed in any::<u64>(), w_g in 1usize..30, beta in 0.0f64..0.5, steps in 1usize..80) {
        let honest = random_strong(50, 80, seed);
        let mut scen = AttackScenario::new(AttackStrategy::Random, w_g, seed);
        scen.n2 = 7;
        scen.beta = beta;
        let aug = attach_sybil_region(&honest, &scen.region(), &scen, 0).unwrap();
        let w = NormalizedMatrix::from_graph(&aug.graph);
        let n = aug.graph.user_count();
        let mut x = vec![0.0; n];
        x[aug.honest_index[0]] = 1.0;
        let mut next = vec![0.0; n];
        for _ in 0..steps {
            w.apply(&x, &mut next);
            std::mem::swap(&mut x, &mut next);
            prop_assert!((x.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn sybil_count_is_the_largest_feasible_x(c in 0.0f64..2.0, mut top in proptest::collection::vec(0.001f64..1.0, 1..12)) {
        top.sort_by(|a, b| b.total_cmp(a));
        let k = top.len();
        let brute = (1..=k).filter(|&x| c >= x as f64 * top[k - x]).max().unwrap_or(0);
        prop_assert_eq!(sybil_count_metric(c, &top), brute);
    }
}
