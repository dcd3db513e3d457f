//! Shared randomized-graph generators and reference evaluators.
#![allow(dead_code)]

use mgraph::graph::MetrizedGraph;
use mgraph::{Graph64, Polarization};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_length(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.1..=10.0)
}

/// Connected random multigraph with at most `max_edges` edges (loops and
/// parallel edges allowed) and lengths in `[0.1, 10]`.
pub fn random_graph(rng: &mut ChaCha8Rng, max_edges: usize) -> Graph64 {
    let max_vertices = max_edges.clamp(1, 6);
    let n = rng.gen_range(1..=max_vertices);
    let mut b = MetrizedGraph::<f64>::builder();
    let vs: Vec<_> = (0..n).map(|_| b.vertex()).collect();
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        b.edge(vs[parent], vs[i], random_length(rng));
    }
    let extra_budget = max_edges.saturating_sub(n.saturating_sub(1));
    let extras = if extra_budget == 0 {
        // Keep a single vertex from being edgeless.
        usize::from(n == 1)
    } else {
        rng.gen_range(usize::from(n == 1)..=extra_budget)
    };
    for _ in 0..extras {
        let a = rng.gen_range(0..n);
        let z = rng.gen_range(0..n);
        b.edge(vs[a], vs[z], random_length(rng));
    }
    b.build().expect("generated graph is connected")
}

/// Random graph with first Betti number at least one.
pub fn random_cyclic_graph(rng: &mut ChaCha8Rng, max_edges: usize) -> Graph64 {
    loop {
        let g = random_graph(rng, max_edges);
        if g.genus() >= 1 {
            return g;
        }
    }
}

/// Random stable polarization: the minimum weight demanded by the valence,
/// plus an occasional extra unit.
pub fn random_stable_polarization(rng: &mut ChaCha8Rng, g: &Graph64) -> Polarization {
    let weights = g
        .vertex_ids()
        .map(|v| {
            let valence = g.valence(v) as i64;
            let minimum = ((2 - valence).max(0) as u32).div_ceil(2);
            minimum + rng.gen_range(0..=1)
        })
        .collect();
    Polarization::new(weights)
}

/// Random metric tree with a stable polarization of total weight in
/// `[2, max_genus]`.
pub fn random_polarized_tree(rng: &mut ChaCha8Rng, max_genus: u32) -> (Graph64, Polarization) {
    let n = rng.gen_range(2..=5);
    let mut b = MetrizedGraph::<f64>::builder();
    let vs: Vec<_> = (0..n).map(|_| b.vertex()).collect();
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        b.edge(vs[parent], vs[i], random_length(rng));
    }
    let g = b.build().unwrap();
    let mut weights: Vec<u32> = g
        .vertex_ids()
        .map(|v| u32::from(g.valence(v) < 2))
        .collect();
    let mut total: u32 = weights.iter().sum();
    let target = rng.gen_range(total.max(2)..=max_genus.max(total.max(2)));
    while total < target {
        let i = rng.gen_range(0..weights.len());
        weights[i] += 1;
        total += 1;
    }
    (g, Polarization::new(weights))
}

/// Direct barycentric evaluation of the PL interpolant on the Kuhn
/// triangulation: reference oracle for the skeletal approximation.
///
/// `samples` are values at the unit-simplex grid points in lexicographic
/// order; `m` is any point of the nonnegative orthant.
pub fn kuhn_interpolate(arity: usize, mesh: usize, samples: &[f64], m: &[f64]) -> f64 {
    assert_eq!(m.len(), arity);
    let total: f64 = m.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    // Project to the scale-`mesh` simplex; the PL value there transfers
    // to `m` by homogeneity.
    let scaled: Vec<f64> = m.iter().map(|&x| x * mesh as f64 / total).collect();
    let d = arity - 1;
    let grid = mgraph::simplex::SimplexGrid::new(arity, mesh).unwrap();
    let sample_at = |point: &[usize]| -> f64 { samples[grid.index_of(point).expect("grid point")] };
    if d == 0 {
        return total * sample_at(&[mesh]);
    }
    let mut y = vec![0.0; d];
    let mut acc = 0.0;
    for i in 0..d {
        acc += scaled[i];
        y[i] = acc;
    }
    let mut base = vec![0usize; d];
    let mut frac = vec![0.0; d];
    for i in 0..d {
        let k = (y[i].floor() as usize).min(mesh - 1);
        base[i] = k;
        frac[i] = y[i] - k as f64;
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| frac[b].partial_cmp(&frac[a]).unwrap().then(a.cmp(&b)));
    // Freudenthal cell vertices along the sorted coordinate walk.
    let mut vertices = vec![base.clone()];
    for &axis in &order {
        let mut next = vertices.last().unwrap().clone();
        next[axis] += 1;
        vertices.push(next);
    }
    let mut weights = Vec::with_capacity(d + 1);
    weights.push(1.0 - frac[order[0]]);
    for w in 0..d - 1 {
        weights.push(frac[order[w]] - frac[order[w + 1]]);
    }
    weights.push(frac[order[d - 1]]);
    let mut value = 0.0;
    for (vertex, w) in vertices.iter().zip(&weights) {
        let point = y_to_multi_index(vertex, mesh);
        value += w * sample_at(&point);
    }
    total * value
}

fn y_to_multi_index(y: &[usize], mesh: usize) -> Vec<usize> {
    let d = y.len();
    let mut m = Vec::with_capacity(d + 1);
    m.push(y[0]);
    for i in 1..d {
        m.push(y[i] - y[i - 1]);
    }
    m.push(mesh - y[d - 1]);
    m
}
