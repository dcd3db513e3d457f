//! Canned graphs shared by the unit tests.

use crate::graph::MetrizedGraph;

/// Two vertices joined by a single edge.
pub fn segment(length: f64) -> MetrizedGraph<f64> {
    let mut b = MetrizedGraph::builder();
    let a = b.vertex();
    let c = b.vertex();
    b.edge(a, c, length);
    b.build().unwrap()
}

/// One vertex with a loop.
pub fn circle(length: f64) -> MetrizedGraph<f64> {
    let mut b = MetrizedGraph::builder();
    let v = b.vertex();
    b.edge(v, v, length);
    b.build().unwrap()
}

/// Two vertices joined by three parallel edges.
pub fn theta(l1: f64, l2: f64, l3: f64) -> MetrizedGraph<f64> {
    let mut b = MetrizedGraph::builder();
    let a = b.vertex();
    let c = b.vertex();
    b.edge(a, c, l1);
    b.edge(a, c, l2);
    b.edge(a, c, l3);
    b.build().unwrap()
}

/// Circle realized with two vertices at arc distances `d` and `len - d`.
pub fn two_arc_circle(len: f64, d: f64) -> MetrizedGraph<f64> {
    let mut b = MetrizedGraph::builder();
    let a = b.vertex();
    let c = b.vertex();
    b.edge(a, c, d);
    b.edge(a, c, len - d);
    b.build().unwrap()
}
