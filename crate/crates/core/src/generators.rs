//! Deterministic test fixtures and seeded random graphs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// The five-node example graph, original ids 1..=5.
///
/// Edges 1-2, 1-3, 1-4, 1-5, 2-4, 3-4, 3-5; degrees (4, 2, 3, 3, 2).
pub fn fig1() -> Graph {
    Graph::from_edges([(1, 2), (1, 3), (1, 4), (1, 5), (2, 4), (3, 4), (3, 5)]).expect("fixture is valid")
}

/// Star with one center (id 0) and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    assert!(leaves >= 1);
    Graph::from_edges((1..=leaves as u64).map(|l| (0, l))).expect("fixture is valid")
}

pub fn path(nodes: usize) -> Graph {
    assert!(nodes >= 2);
    Graph::from_edges((1..nodes as u64).map(|i| (i - 1, i))).expect("fixture is valid")
}

pub fn cycle(nodes: usize) -> Graph {
    assert!(nodes >= 3);
    let n = nodes as u64;
    Graph::from_edges((0..n).map(|i| (i, (i + 1) % n))).expect("fixture is valid")
}

pub fn complete(nodes: usize) -> Graph {
    assert!(nodes >= 2);
    let n = nodes as u64;
    Graph::from_edges((0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("fixture is valid")
}

/// Random recursive tree on `nodes` nodes plus `extra_edges` uniformly drawn
/// chords (self-loops and repeats are discarded, so the final count may be
/// lower). Always connected.
pub fn random_connected(nodes: usize, extra_edges: usize, seed: u64) -> Graph {
    assert!(nodes >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<u64> = (0..nodes as u64).collect();
    order.shuffle(&mut rng);
    let mut pairs = Vec::with_capacity(nodes - 1 + extra_edges);
    for k in 1..nodes {
        let parent = order[rng.gen_range(0..k)];
        pairs.push((parent, order[k]));
    }
    for _ in 0..extra_edges {
        let u = rng.gen_range(0..nodes as u64);
        let v = rng.gen_range(0..nodes as u64);
        pairs.push((u, v));
    }
    Graph::from_edges(pairs).expect("tree edges survive")
}

/// Barabási–Albert preferential attachment: each new node links to
/// `m` distinct existing nodes chosen proportionally to degree, starting
/// from a clique on `m + 1` nodes. Degree tail follows a power law.
pub fn barabasi_albert(nodes: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || nodes <= m {
        return Err(Error::Config(format!(
            "barabasi_albert needs 0 < m < nodes (got m={m}, nodes={nodes})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(nodes * m);
    // Each edge endpoint appears once here, so uniform draws are degree-biased.
    let mut endpoints: Vec<u64> = Vec::with_capacity(2 * nodes * m);
    for i in 0..=m as u64 {
        for j in 0..i {
            pairs.push((j, i));
            endpoints.extend([j, i]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in (m as u64 + 1)..nodes as u64 {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            pairs.push((t, v));
            endpoints.extend([t, v]);
        }
    }
    Graph::from_edges(pairs)
}

/// Chung–Lu graph with expected degrees drawn from a Pareto law of the
/// given tail exponent, reduced to its largest connected component. Unlike
/// [`barabasi_albert`] this produces degree-1 nodes.
pub fn chung_lu_power_law(nodes: usize, exponent: f64, min_weight: f64, seed: u64) -> Result<Graph> {
    if nodes < 2 || exponent <= 1.0 || min_weight <= 0.0 {
        return Err(Error::Config(
            "chung_lu_power_law needs nodes >= 2, exponent > 1, min_weight > 0".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = (nodes as f64).sqrt() * min_weight * 4.0;
    let weights: Vec<f64> = (0..nodes)
        .map(|_| {
            let u: f64 = rng.gen();
            (min_weight * (1.0 - u).powf(-1.0 / (exponent - 1.0))).min(cap)
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut pairs = Vec::new();
    for i in 0..nodes {
        for j in (i + 1)..nodes {
            let p = (weights[i] * weights[j] / total).min(1.0);
            if rng.gen::<f64>() < p {
                pairs.push((i as u64, j as u64));
            }
        }
    }
    Ok(Graph::from_edges(pairs)?.largest_connected_component())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_expected_shape() {
        assert_eq!(star(4).degree_stats().max_degree, 4);
        assert_eq!(path(3).edge_count(), 2);
        assert_eq!(cycle(5).degree_stats().min_degree, 2);
        assert_eq!(complete(4).edge_count(), 6);
        assert_eq!(complete(4).degree_stats().average_degree, 3.0);
    }

    #[test]
    fn random_connected_is_connected_and_seeded() {
        for seed in 0..10 {
            let g = random_connected(60, 40, seed);
            assert_eq!(g.node_count(), 60);
            assert!(g.is_connected());
            assert_eq!(g, random_connected(60, 40, seed));
        }
    }

    #[test]
    fn barabasi_albert_edge_count() {
        let g = barabasi_albert(500, 3, 9).unwrap();
        assert_eq!(g.node_count(), 500);
        assert_eq!(g.edge_count(), 6 + 3 * (500 - 4));
        assert!(g.is_connected());
        assert!(g.degree_stats().max_degree > 30);
        assert!(barabasi_albert(3, 3, 0).is_err());
    }

    #[test]
    fn chung_lu_is_connected_with_leaves() {
        let g = chung_lu_power_law(400, 2.5, 1.5, 4).unwrap();
        assert!(g.is_connected());
        assert_eq!(g.degree_stats().min_degree, 1);
    }
}
