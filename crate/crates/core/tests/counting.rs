use std::collections::HashMap;

use gslearn::bounds::count_regular_exact;
use gslearn::graph::{random_regular, Graph};
use gslearn::rng::{stream, Purpose};
use gslearn::stats::chi_square_uniform;

/// Counts d-regular graphs by choosing edges of K_n in lexicographic order.
fn count_by_edge_subsets(n: usize, d: usize) -> u64 {
    let edges: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    fn go(i: usize, edges: &[(usize, usize)], deg: &mut [usize], d: usize, left: usize) -> u64 {
        if left == 0 {
            return deg.iter().all(|&x| x == d) as u64;
        }
        if i == edges.len() || edges.len() - i < left {
            return 0;
        }
        let (u, v) = edges[i];
        // Once every edge at vertex u has been considered, its degree is final.
        if edges.get(i.wrapping_sub(1)).is_some_and(|&(pu, _)| pu != u) && u > 0 && deg[u - 1] != d {
            return 0;
        }
        let mut total = go(i + 1, edges, deg, d, left);
        if deg[u] < d && deg[v] < d {
            deg[u] += 1;
            deg[v] += 1;
            total += go(i + 1, edges, deg, d, left - 1);
            deg[u] -= 1;
            deg[v] -= 1;
        }
        total
    }
    if (n * d) % 2 == 1 {
        return 0;
    }
    go(0, &edges, &mut vec![0; n], d, n * d / 2)
}

#[test]
fn enumeration_matches_edge_subset_count() {
    for n in 2..=8 {
        for d in 1..n {
            assert_eq!(count_regular_exact(n, d).unwrap(), count_by_edge_subsets(n, d), "n={n} d={d}");
        }
    }
}

#[test]
fn known_counts() {
    let two: Vec<u64> = (3..=10).map(|n| count_regular_exact(n, 2).unwrap()).collect();
    assert_eq!(two, [1, 3, 12, 70, 465, 3507, 30016, 286884]);
    let three: Vec<u64> = [4, 6, 8, 10].iter().map(|&n| count_regular_exact(n, 3).unwrap()).collect();
    assert_eq!(three, [1, 70, 19355, 11180820]);
}

#[test]
fn generator_covers_all_cubic_graphs_on_six_vertices() {
    let mut rng = stream(2024, Purpose::Graph, &[0]);
    let mut counts: HashMap<Vec<(usize, usize)>, u64> = HashMap::new();
    for _ in 0..10_000 {
        let g: Graph = random_regular(6, 3, &mut rng).unwrap();
        *counts.entry(g.edges().collect()).or_default() += 1;
    }
    assert_eq!(counts.len(), 70);
    let cells: Vec<u64> = counts.into_values().collect();
    let (_, p) = chi_square_uniform(&cells).unwrap();
    assert!(p > 1e-4, "p = {p}");
}
