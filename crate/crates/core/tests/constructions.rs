use std::collections::BTreeSet;

use gallai_core::constructions::{
    gallai_lower_bound, odd_cycle_two_color_extremal, random_gallai, OddCycleParam, SamplerProfile,
};
use gallai_core::gallai::{
    find_gallai_partition, reduced_graph, substitute, validate_partition, ConstructionRecipe, GallaiPartition,
};
use gallai_core::{find_rainbow_triangle, is_bad, ColoredCompleteGraph, VerdictKind};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn m(v: usize) -> OddCycleParam {
    OddCycleParam::new(v).unwrap()
}

#[test]
fn lower_bound_sizes() {
    for mv in 2..=5 {
        for k in 1..=7 {
            assert_eq!(gallai_lower_bound(m(mv), k).unwrap().n(), mv << k);
        }
    }
}

#[test]
fn lower_bounds_are_bad() {
    for mv in [2, 3, 4] {
        for k in 1..=6 {
            let g = gallai_lower_bound(m(mv), k).unwrap();
            let v = is_bad(&g, 2 * mv + 1).unwrap();
            assert_eq!(v.verdict, VerdictKind::Bad, "m = {mv}, k = {k}");
        }
    }
}

#[test]
fn halves_are_the_previous_level() {
    for mv in [2, 4] {
        for k in 2..=5 {
            let g = gallai_lower_bound(m(mv), k).unwrap();
            let prev = gallai_lower_bound(m(mv), k - 1).unwrap();
            let half = g.n() / 2;
            let lower: Vec<usize> = (0..half).collect();
            let upper: Vec<usize> = (half..g.n()).collect();
            for side in [lower, upper] {
                let h = g.induced_subgraph(&side).unwrap().with_palette(k - 1).unwrap();
                assert_eq!(h, prev);
            }
        }
    }
}

#[test]
fn lower_bound_is_a_doubling_substitution() {
    for k in 2..=5 {
        let prev = gallai_lower_bound(m(4), k - 1).unwrap();
        let recipe = ConstructionRecipe::join_two(
            k as u8,
            ConstructionRecipe::Leaf(prev.clone()),
            ConstructionRecipe::Leaf(prev),
        )
        .unwrap();
        assert_eq!(substitute(&recipe).unwrap(), gallai_lower_bound(m(4), k).unwrap());
    }
}

#[test]
fn lower_bound_colors_and_rainbow_freeness() {
    let g = gallai_lower_bound(m(4), 3).unwrap();
    assert_eq!(g.colors_used(), BTreeSet::from([1, 2, 3]));
    assert!(find_rainbow_triangle(&g).is_none());
    assert_eq!(
        gallai_lower_bound(m(4), 1).unwrap(),
        ColoredCompleteGraph::monochromatic(8, 1, 1).unwrap()
    );
}

#[test]
fn lower_bound_partitions() {
    let g = gallai_lower_bound(m(4), 3).unwrap();
    let p = find_gallai_partition(&g).unwrap();
    assert!(validate_partition(&g, &p).unwrap().valid);

    let g2 = gallai_lower_bound(m(4), 2).unwrap();
    let canonical = GallaiPartition {
        parts: vec![(0..8).collect(), (8..16).collect()],
        reduced: ColoredCompleteGraph::monochromatic(2, 2, 2).unwrap(),
    };
    assert_eq!(
        reduced_graph(&g2, &canonical).unwrap(),
        ColoredCompleteGraph::monochromatic(2, 2, 2).unwrap()
    );
}

#[test]
fn small_cases_from_known_values() {
    // two colors, C5: 8 vertices
    let g = gallai_lower_bound(m(2), 2).unwrap();
    assert_eq!(g.n(), 8);
    assert!(is_bad(&g, 5).unwrap().is_bad());
    let g = odd_cycle_two_color_extremal(m(2));
    assert_eq!(g.n(), 8);
    assert!(is_bad(&g, 5).unwrap().is_bad());
}

#[test]
fn two_color_extremal_structure() {
    for mv in 2..=6 {
        let g = odd_cycle_two_color_extremal(m(mv));
        assert_eq!(g.n(), 4 * mv);
        // color 2: complete bipartite between halves
        let blue = g.color_class(2);
        assert_eq!(blue.edge_count(), (2 * mv) * (2 * mv));
        assert!(blue.edges().all(|(u, v)| (u < 2 * mv) != (v < 2 * mv)));
        // color 1: two cliques on 2m vertices
        let red = g.color_class(1);
        for v in 0..g.n() {
            assert_eq!(red.degree(v), 2 * mv - 1);
            assert!(red.neighbors(v).all(|w| (w < 2 * mv) == (v < 2 * mv)));
        }
        assert!(is_bad(&g, 2 * mv + 1).unwrap().is_bad());
    }
}

#[test]
fn deletions_from_the_four_color_construction_stay_bad() {
    let g = gallai_lower_bound(m(4), 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    for _ in 0..30 {
        let drop = 1 + (rand::Rng::random_range(&mut rng, 0..20usize));
        let removed: BTreeSet<usize> = sample(&mut rng, g.n(), drop).into_iter().collect();
        let keep: Vec<usize> = (0..g.n()).filter(|v| !removed.contains(v)).collect();
        let h = g.induced_subgraph(&keep).unwrap();
        assert!(is_bad(&h, 9).unwrap().is_bad());
    }
}

#[test]
fn lower_bound_file_roundtrip() {
    let g = gallai_lower_bound(m(4), 3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lb.gcol");
    g.save(&path).unwrap();
    assert_eq!(ColoredCompleteGraph::load(&path).unwrap(), g);
}

#[test]
fn sampler_outputs_are_rainbow_free() {
    let profile = SamplerProfile::default();
    for seed in 0..1000u64 {
        let n = 1 + (seed as usize * 7) % 40;
        let k = 1 + (seed as usize) % 5;
        let g = random_gallai(n, k, seed, &profile).unwrap();
        assert_eq!(g.n(), n);
        assert!(find_rainbow_triangle(&g).is_none(), "seed {seed}");
    }
}

#[test]
fn sampler_profile_changes_shape() {
    let flat = SamplerProfile {
        mean_parts: 2.0,
        max_parts: 2,
        shuffle_labels: false,
    };
    let g = random_gallai(30, 3, 1, &flat).unwrap();
    assert!(find_rainbow_triangle(&g).is_none());
    let p = find_gallai_partition(&g).unwrap();
    assert!(validate_partition(&g, &p).unwrap().valid);
}
