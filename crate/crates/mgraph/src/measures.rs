//! Canonical and admissible measures on a polarized metrized graph.
//!
//! Measures are restricted to the class of vertex atoms plus uniform
//! per-edge densities; every measure appearing in the invariant formulas
//! lies in this class, which makes total masses and integrals exactly
//! computable from the representation.

use crate::electric::vertex_voltages;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, MetrizedGraph, Polarization, UnionFind, VertexId};
use crate::scalar::Scalar;

/// A finite signed measure: atoms indexed by vertex plus a constant
/// density per unit arc length on each edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure<R> {
    atoms: Vec<R>,
    densities: Vec<R>,
}

impl<R: Scalar> Measure<R> {
    pub fn new(atoms: Vec<R>, densities: Vec<R>) -> Self {
        Measure { atoms, densities }
    }

    pub fn zero(g: &MetrizedGraph<R>) -> Self {
        Measure {
            atoms: vec![R::zero(); g.vertex_count()],
            densities: vec![R::zero(); g.edge_count()],
        }
    }

    pub fn atom(&self, v: VertexId) -> R {
        self.atoms[v.index()]
    }

    pub fn density(&self, e: EdgeId) -> R {
        self.densities[e.index()]
    }

    pub fn atoms(&self) -> &[R] {
        &self.atoms
    }

    pub fn densities(&self) -> &[R] {
        &self.densities
    }

    pub fn is_atomic(&self) -> bool {
        self.densities.iter().all(|d| *d == R::zero())
    }

    pub fn scaled(&self, c: R) -> Self {
        Measure {
            atoms: self.atoms.iter().map(|&a| a * c).collect(),
            densities: self.densities.iter().map(|&d| d * c).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Measure {
            atoms: self
                .atoms
                .iter()
                .zip(&other.atoms)
                .map(|(&a, &b)| a + b)
                .collect(),
            densities: self
                .densities
                .iter()
                .zip(&other.densities)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-R::one()))
    }

    pub(crate) fn check_dims(&self, g: &MetrizedGraph<R>) -> Result<()> {
        if self.atoms.len() != g.vertex_count() || self.densities.len() != g.edge_count() {
            return Err(Error::DomainMismatch(format!(
                "measure on {} vertices / {} edges, graph has {} / {}",
                self.atoms.len(),
                self.densities.len(),
                g.vertex_count(),
                g.edge_count()
            )));
        }
        Ok(())
    }

    /// Total mass: sum of atoms plus density times length over the edges.
    pub fn total_mass(&self, g: &MetrizedGraph<R>) -> R {
        let atoms = self.atoms.iter().fold(R::zero(), |a, &b| a + b);
        let edges = g.edge_ids().fold(R::zero(), |a, e| {
            a + self.density(e) * g.edge_data(e).length()
        });
        atoms + edges
    }
}

/// Resistance `R(e)` between the endpoints of `e` in the graph with the
/// open edge removed: zero for a loop, infinite for a bridge.
pub fn complement_resistance<R: Scalar>(g: &MetrizedGraph<R>, e: EdgeId) -> Result<R> {
    g.check_edge(e)?;
    let edge = g.edge_data(e);
    if edge.is_loop() {
        return Ok(R::zero());
    }
    resistance_without_edges(g, &[e], edge.source(), edge.target())
}

/// Resistance between `p` and `q` in the graph with the listed edges
/// removed; infinite if the removal disconnects them. The solve is
/// restricted to the component containing the endpoints.
pub(crate) fn resistance_without_edges<R: Scalar>(
    g: &MetrizedGraph<R>,
    skip: &[EdgeId],
    p: VertexId,
    q: VertexId,
) -> Result<R> {
    let skipped = |f: EdgeId| skip.contains(&f);
    let mut dsu = UnionFind::new(g.vertex_count());
    for f in g.edge_ids() {
        if skipped(f) {
            continue;
        }
        let data = g.edge_data(f);
        dsu.union(data.source().index(), data.target().index());
    }
    if dsu.find(p.index()) != dsu.find(q.index()) {
        return Ok(R::infinity());
    }
    let root = dsu.find(p.index());
    let mut local = vec![None; g.vertex_count()];
    let mut builder = MetrizedGraph::<R>::builder();
    for v in g.vertex_ids() {
        if dsu.find(v.index()) == root {
            local[v.index()] = Some(builder.labeled_vertex(g.vertex_label(v)));
        }
    }
    for f in g.edge_ids() {
        if skipped(f) {
            continue;
        }
        let data = g.edge_data(f);
        if let (Some(s), Some(t)) = (local[data.source().index()], local[data.target().index()]) {
            builder.labeled_edge(data.label(), s, t, data.length());
        }
    }
    let sub = builder.build()?;
    let (lp, lq) = (local[p.index()].unwrap(), local[q.index()].unwrap());
    let potential = vertex_voltages(&sub, lp, lq)?;
    Ok(potential.value(lp))
}

/// The canonical measure: atoms `1 - v(p)/2` and edge densities
/// `1/(L(e) + R(e))` (zero on bridges). Its total mass is 1 and the edge
/// masses sum to the genus.
pub fn canonical_measure<R: Scalar>(g: &MetrizedGraph<R>) -> Result<Measure<R>> {
    g.validate()?;
    let atoms = g
        .vertex_ids()
        .map(|v| R::one() - R::of_usize(g.valence(v)) / R::of(2.0))
        .collect();
    let densities = g
        .edge_ids()
        .map(|e| {
            let r = complement_resistance(g, e)?;
            Ok(R::one() / (g.edge_data(e).length() + r))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Measure { atoms, densities })
}

/// The canonical-divisor measure `δ_K`: a nonnegative atom
/// `v(p) - 2 + 2 q(p)` at every vertex. Total mass `2 g(Γ, q) - 2`.
pub fn canonical_divisor_measure<R: Scalar>(
    g: &MetrizedGraph<R>,
    q: &Polarization,
) -> Result<Measure<R>> {
    q.validate(g)?;
    let atoms = g
        .vertex_ids()
        .map(|v| {
            R::of_usize(g.valence(v)) - R::of(2.0) + R::of(2.0) * R::from_u32(q.weight(v)).unwrap()
        })
        .collect();
    Ok(Measure {
        atoms,
        densities: vec![R::zero(); g.edge_count()],
    })
}

/// Zhang's admissible measure `(2 μ_can + δ_K) / (2g)`, a probability
/// measure for polarized genus `g >= 1`.
pub fn admissible_measure<R: Scalar>(g: &MetrizedGraph<R>, q: &Polarization) -> Result<Measure<R>> {
    let genus = crate::graph::polarized_genus(g, q)?;
    if genus == 0 {
        return Err(Error::GenusTooSmall(
            "admissible measure needs polarized genus >= 1".into(),
        ));
    }
    let mu = canonical_measure(g)?;
    let dk = canonical_divisor_measure(g, q)?;
    let scale = R::one() / (R::of(2.0) * R::of_usize(genus));
    Ok(mu.scaled(R::of(2.0)).plus(&dk).scaled(scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeId, MetrizedGraph};
    use crate::testgraphs::{circle, segment, theta};

    const TOL: f64 = 1e-9;

    #[test]
    fn bridge_has_infinite_complement_resistance() {
        let g = segment(1.0);
        assert!(complement_resistance(&g, EdgeId(0)).unwrap().is_infinite());
    }

    #[test]
    fn loop_has_zero_complement_resistance() {
        let g = circle(1.0);
        assert_eq!(complement_resistance(&g, EdgeId(0)).unwrap(), 0.0);
    }

    #[test]
    fn theta_complement_resistance_is_parallel_law() {
        let g = theta(1.0, 2.0, 3.0);
        let r = complement_resistance(&g, EdgeId(0)).unwrap();
        assert!((r - 1.2).abs() < TOL);
    }

    #[test]
    fn canonical_measure_of_segment() {
        let g = segment(2.0);
        let mu = canonical_measure(&g).unwrap();
        assert_eq!(mu.atoms(), &[0.5, 0.5]);
        assert_eq!(mu.density(EdgeId(0)), 0.0);
        assert!((mu.total_mass(&g) - 1.0).abs() < TOL);
    }

    #[test]
    fn canonical_measure_of_circle_is_uniform() {
        let g = circle(4.0);
        let mu = canonical_measure(&g).unwrap();
        assert_eq!(mu.atoms(), &[0.0]);
        assert!((mu.density(EdgeId(0)) - 0.25).abs() < TOL);
        assert!((mu.total_mass(&g) - 1.0).abs() < TOL);
    }

    #[test]
    fn canonical_measure_of_symmetric_theta() {
        let g = theta(1.0, 1.0, 1.0);
        let mu = canonical_measure(&g).unwrap();
        assert_eq!(mu.atoms(), &[-0.5, -0.5]);
        for e in g.edge_ids() {
            assert!((mu.density(e) - 2.0 / 3.0).abs() < TOL);
        }
        assert!((mu.total_mass(&g) - 1.0).abs() < TOL);
    }

    #[test]
    fn edge_mass_identity_equals_genus() {
        for g in [segment(2.0), circle(3.0), theta(1.0, 2.0, 3.0)] {
            let mut sum = 0.0;
            for e in g.edge_ids() {
                let r = complement_resistance(&g, e).unwrap();
                sum += g.edge_data(e).length() / (g.edge_data(e).length() + r);
            }
            assert!((sum - g.genus() as f64).abs() < TOL);
        }
    }

    #[test]
    fn divisor_measure_examples() {
        let c = circle(1.0);
        let dk = canonical_divisor_measure(&c, &Polarization::zero(1)).unwrap();
        assert_eq!(dk.total_mass(&c), 0.0);

        let s = segment(1.0);
        let dk = canonical_divisor_measure(&s, &Polarization::new(vec![1, 1])).unwrap();
        assert_eq!(dk.atoms(), &[1.0, 1.0]);

        let t = theta(1.0, 1.0, 1.0);
        let dk = canonical_divisor_measure(&t, &Polarization::zero(2)).unwrap();
        assert_eq!(dk.atoms(), &[1.0, 1.0]);
        assert_eq!(dk.total_mass(&t), 2.0);
    }

    #[test]
    fn admissible_measure_of_circle_is_canonical() {
        let g = circle(2.0);
        let mu = admissible_measure(&g, &Polarization::zero(1)).unwrap();
        let can = canonical_measure(&g).unwrap();
        assert_eq!(mu, can);
        assert!((mu.total_mass(&g) - 1.0).abs() < TOL);
    }

    #[test]
    fn admissible_measure_of_polarized_segment() {
        let g = segment(1.0);
        let mu = admissible_measure(&g, &Polarization::new(vec![1, 1])).unwrap();
        assert_eq!(mu.atoms(), &[0.5, 0.5]);
        assert!(mu.is_atomic());
    }

    #[test]
    fn admissible_measure_on_trees_is_atomic() {
        let mut b = MetrizedGraph::<f64>::builder();
        let a = b.vertex();
        let c = b.vertex();
        let d = b.vertex();
        b.edge(a, c, 1.0);
        b.edge(c, d, 2.0);
        let g = b.build().unwrap();
        let q = Polarization::new(vec![1, 0, 2]);
        let mu = admissible_measure(&g, &q).unwrap();
        assert!(mu.is_atomic());
        assert!((mu.total_mass(&g) - 1.0).abs() < TOL);
    }

    #[test]
    fn admissible_combination_holds_componentwise() {
        let g = theta(1.0, 2.0, 3.0);
        let q = Polarization::new(vec![1, 0]);
        let genus = crate::graph::polarized_genus(&g, &q).unwrap() as f64;
        let mu = admissible_measure(&g, &q).unwrap();
        let combo = canonical_measure(&g)
            .unwrap()
            .scaled(2.0)
            .plus(&canonical_divisor_measure(&g, &q).unwrap())
            .scaled(1.0 / (2.0 * genus));
        assert_eq!(mu, combo);
    }

    #[test]
    fn total_mass_examples() {
        let g = theta(1.0, 1.0, 1.0);
        assert_eq!(Measure::zero(&g).total_mass(&g), 0.0);
        let mu = canonical_measure(&g).unwrap();
        assert!((mu.total_mass(&g) - 1.0).abs() < TOL);
    }
}
