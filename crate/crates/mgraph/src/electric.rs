//! Voltage and resistance functions of a metrized graph.
//!
//! The voltage `j_z(x, y)` is the potential at `x` when a unit current
//! enters at `y` and exits at `z`, grounded so that the value at `z` is
//! zero. It is piecewise linear in `x`, symmetric in `x` and `y`, and
//! satisfies `0 <= j_z(x, y) <= r(y, z)`. The resistance function is
//! `r(x, y) = j_y(x, x)`.
//!
//! The primary solver is the weighted vertex Laplacian with conductances
//! `1/L(e)`, grounded by deleting the row and column of `z`. Loop edges
//! carry no net current and are excluded from the Laplacian; interior
//! points are always reached by temporary subdivision, never by
//! special-cased formulas. The flow-equation solver over a cycle basis is
//! kept as an independent oracle.

use crate::error::Result;
use crate::graph::{cycle_basis, GraphPoint, MetrizedGraph, VertexId};
use crate::linalg;
use crate::scalar::Scalar;

/// Grounded vertex potential: the solution of the Laplacian equation with
/// unit current from `source` to `ground` and `value(ground) = 0`.
#[derive(Debug, Clone)]
pub struct VertexPotential<R> {
    source: VertexId,
    ground: VertexId,
    values: Vec<R>,
}

impl<R: Scalar> VertexPotential<R> {
    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn ground(&self) -> VertexId {
        self.ground
    }

    pub fn value(&self, v: VertexId) -> R {
        self.values[v.index()]
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }
}

// Weighted Laplacian with row/column `ground` deleted. Unknown i maps to
// vertex i shifted past the ground.
fn reduced_laplacian<R: Scalar>(g: &MetrizedGraph<R>, ground: VertexId) -> Vec<Vec<R>> {
    let n = g.vertex_count();
    let mut m = vec![vec![R::zero(); n - 1]; n - 1];
    let reduce = |v: VertexId| -> Option<usize> {
        use std::cmp::Ordering::*;
        match v.index().cmp(&ground.index()) {
            Less => Some(v.index()),
            Equal => None,
            Greater => Some(v.index() - 1),
        }
    };
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let c = R::one() / e.length();
        let (s, t) = (reduce(e.source()), reduce(e.target()));
        if let Some(i) = s {
            m[i][i] = m[i][i] + c;
        }
        if let Some(j) = t {
            m[j][j] = m[j][j] + c;
        }
        if let (Some(i), Some(j)) = (s, t) {
            m[i][j] = m[i][j] - c;
            m[j][i] = m[j][i] - c;
        }
    }
    m
}

/// Potential of the unit current flow from `y` to `z` at the vertices of
/// `g`. If `y == z` the potential vanishes identically.
pub fn vertex_voltages<R: Scalar>(
    g: &MetrizedGraph<R>,
    y: VertexId,
    z: VertexId,
) -> Result<VertexPotential<R>> {
    g.check_vertex(y)?;
    g.check_vertex(z)?;
    let n = g.vertex_count();
    let mut values = vec![R::zero(); n];
    if y != z {
        let m = reduced_laplacian(g, z);
        let mut rhs = vec![R::zero(); n - 1];
        let yi = if y.index() < z.index() {
            y.index()
        } else {
            y.index() - 1
        };
        rhs[yi] = R::one();
        let sol = linalg::solve_one(m, &rhs)?;
        let mut sol = sol.into_iter();
        for (v, value) in values.iter_mut().enumerate() {
            if v != z.index() {
                *value = sol.next().expect("one unknown per non-ground vertex");
            }
        }
    }
    Ok(VertexPotential {
        source: y,
        ground: z,
        values,
    })
}

/// Voltage `j_z(x, y)` at arbitrary points: interior `y`, `z` are made
/// vertices by subdivision, then the potential is interpolated affinely
/// along the edge containing `x`.
pub fn voltage<R: Scalar>(
    g: &MetrizedGraph<R>,
    x: GraphPoint<R>,
    y: GraphPoint<R>,
    z: GraphPoint<R>,
) -> Result<R> {
    let x = g.normalize_point(x)?;
    let (h, vs, refinement) = g.subdivide_all(&[y, z])?;
    let potential = vertex_voltages(&h, vs[0], vs[1])?;
    match refinement.map_point(x) {
        GraphPoint::Vertex(v) => Ok(potential.value(v)),
        GraphPoint::Interior(e, t) => {
            let edge = h.edge_data(e);
            let a = potential.value(edge.source());
            let b = potential.value(edge.target());
            Ok(a + (b - a) * (t / edge.length()))
        }
    }
}

/// Effective resistance `r(x, y) = j_y(x, x)` between two points.
pub fn resistance<R: Scalar>(
    g: &MetrizedGraph<R>,
    x: GraphPoint<R>,
    y: GraphPoint<R>,
) -> Result<R> {
    let (h, vs, _) = g.subdivide_all(&[x, y])?;
    let potential = vertex_voltages(&h, vs[0], vs[1])?;
    Ok(potential.value(vs[0]))
}

/// Moore-Penrose pseudoinverse of the weighted vertex Laplacian, computed
/// as `(L + J/n)^{-1} - J/n`.
pub(crate) fn laplacian_pseudoinverse<R: Scalar>(g: &MetrizedGraph<R>) -> Result<Vec<Vec<R>>> {
    let n = g.vertex_count();
    let inv_n = R::one() / R::of_usize(n);
    let mut m = vec![vec![inv_n; n]; n];
    for e in g.edges() {
        if e.is_loop() {
            continue;
        }
        let c = R::one() / e.length();
        let (i, j) = (e.source().index(), e.target().index());
        m[i][i] = m[i][i] + c;
        m[j][j] = m[j][j] + c;
        m[i][j] = m[i][j] - c;
        m[j][i] = m[j][i] - c;
    }
    let factors = linalg::factor(m)?;
    let mut pinv = vec![vec![R::zero(); n]; n];
    let mut rhs = vec![R::zero(); n];
    for col in 0..n {
        rhs[col] = R::one();
        let x = factors.solve(&rhs);
        rhs[col] = R::zero();
        for row in 0..n {
            pinv[row][col] = x[row] - inv_n;
        }
    }
    Ok(pinv)
}

/// All vertex-pair resistances from a single factorization.
pub fn resistance_matrix<R: Scalar>(g: &MetrizedGraph<R>) -> Result<Vec<Vec<R>>> {
    let p = laplacian_pseudoinverse(g)?;
    let n = g.vertex_count();
    let mut r = vec![vec![R::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            r[i][j] = p[i][i] + p[j][j] - p[i][j] - p[j][i];
        }
    }
    Ok(r)
}

/// Solves the flow equations over a cycle basis: current conservation at
/// every vertex other than `z`, plus vanishing signed length-weighted sums
/// around each basis cycle. The edge currents are then integrated to a
/// potential grounded at `z`.
///
/// This is an independent oracle for [`vertex_voltages`]; a singular
/// system signals a bug, since the solution is unique.
pub fn flow_voltages<R: Scalar>(
    g: &MetrizedGraph<R>,
    y: VertexId,
    z: VertexId,
) -> Result<VertexPotential<R>> {
    g.check_vertex(y)?;
    g.check_vertex(z)?;
    let n = g.vertex_count();
    let m = g.edge_count();
    let mut values = vec![R::zero(); n];
    if y == z || m == 0 {
        return Ok(VertexPotential {
            source: y,
            ground: z,
            values,
        });
    }
    let cycles = cycle_basis(g);
    debug_assert_eq!(cycles.len(), g.genus());
    let mut a = vec![vec![R::zero(); m]; m];
    let mut b = vec![R::zero(); m];
    let mut row = 0;
    for v in g.vertex_ids() {
        if v == z {
            continue;
        }
        for (k, e) in g.edges().iter().enumerate() {
            if e.target() == v {
                a[row][k] = a[row][k] + R::one();
            }
            if e.source() == v {
                a[row][k] = a[row][k] - R::one();
            }
        }
        if v == y {
            b[row] = R::one();
        }
        row += 1;
    }
    for cycle in &cycles {
        for (e, sign) in cycle {
            let signed = if *sign > 0 { R::one() } else { -R::one() };
            a[row][e.index()] = a[row][e.index()] + signed * g.edge_data(*e).length();
        }
        row += 1;
    }
    debug_assert_eq!(row, m);
    let currents = linalg::solve_one(a, &b)?;

    // Integrate currents along a spanning tree from the ground:
    // x_e = (j(t(e)) - j(s(e))) / L(e).
    let mut known = vec![false; n];
    known[z.index()] = true;
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(z);
    while let Some(v) = queue.pop_front() {
        for (k, e) in g.edges().iter().enumerate() {
            if e.source() == v && !known[e.target().index()] {
                values[e.target().index()] = values[v.index()] + e.length() * currents[k];
                known[e.target().index()] = true;
                queue.push_back(e.target());
            } else if e.target() == v && !known[e.source().index()] {
                values[e.source().index()] = values[v.index()] - e.length() * currents[k];
                known[e.source().index()] = true;
                queue.push_back(e.source());
            }
        }
    }
    Ok(VertexPotential {
        source: y,
        ground: z,
        values,
    })
}

/// Maximum absolute slope of `x -> j_z(x, y)` over the edges. Bounded by 1.
pub fn max_voltage_slope<R: Scalar>(
    g: &MetrizedGraph<R>,
    y: GraphPoint<R>,
    z: GraphPoint<R>,
) -> Result<R> {
    let (h, vs, _) = g.subdivide_all(&[y, z])?;
    let potential = vertex_voltages(&h, vs[0], vs[1])?;
    let mut max = R::zero();
    for e in h.edges() {
        let drop = (potential.value(e.target()) - potential.value(e.source())).abs();
        max = max.max(drop / e.length());
    }
    Ok(max)
}
