//! Skeletal-calculus properties: homogeneity, min-closure, density of the
//! PL approximation, and the tree estimator chain.

mod common;

use common::{kuhn_interpolate, random_polarized_tree, rng};
use mgraph::graph::{dual_graph, CurveComponent, CurveNode, StableCurveDescription};
use mgraph::simplex::SimplexGrid;
use mgraph::skeletal::{
    approximate, phi_asymptotic, phi_skeletal, phi_tree_closed_form, tree_edge_types,
    SkeletalFunction,
};
use num_complex::Complex;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;

type Skeletal = SkeletalFunction<f64>;

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn exponent_rows() -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(0u64..6, 3), 1..5)
        .prop_filter("rows must be nonzero", |rows| {
            rows.iter().all(|r| r.iter().any(|&x| x > 0))
        })
}

proptest! {
    #[test]
    fn monomial_oracle_matches_expression(rows in exponent_rows(), m in prop::collection::vec(0u64..20, 3)) {
        let f = Skeletal::from_monomials(&rows).unwrap();
        let oracle = mgraph::skeletal::monomial_multiplicity(&rows, &m).unwrap();
        let exact = f
            .eval_exact(&m.iter().map(|&x| rational(x as i64, 1)).collect::<Vec<_>>())
            .unwrap();
        prop_assert_eq!(exact, rational(oracle as i64, 1));
        let float = f.eval(&m.iter().map(|&x| x as f64).collect::<Vec<_>>()).unwrap();
        prop_assert!((float - oracle as f64).abs() <= 1e-12 * (1.0 + oracle as f64));
    }

    #[test]
    fn rational_trees_are_homogeneous(rows in exponent_rows(), m in prop::collection::vec(0u64..9, 3), num in 0i64..40, den in 1i64..7) {
        let f = Skeletal::from_monomials(&rows).unwrap();
        let lambda = rational(num, den);
        let point: Vec<BigRational> = m.iter().map(|&x| rational(x as i64, 1)).collect();
        let scaled: Vec<BigRational> = point.iter().map(|x| x * &lambda).collect();
        let direct = f.eval_exact(&scaled).unwrap();
        let expected = lambda * f.eval_exact(&point).unwrap();
        prop_assert_eq!(direct, expected);
    }

    #[test]
    fn min_closure_rewriting_identity(
        a in exponent_rows(), b in exponent_rows(), c in exponent_rows(), d in exponent_rows(),
        m in prop::collection::vec(0u64..15, 3),
    ) {
        // min{f1 - f2, g1 - g2} = min{f1 + g2, g1 + f2} - f2 - g2
        let one = BigRational::from_integer(1.into());
        let f1 = Skeletal::from_monomials(&a).unwrap();
        let f2 = Skeletal::from_monomials(&b).unwrap();
        let g1 = Skeletal::from_monomials(&c).unwrap();
        let g2 = Skeletal::from_monomials(&d).unwrap();
        let lhs = Skeletal::min_of(
            Skeletal::lin_comb(one.clone(), f1.clone(), -one.clone(), f2.clone()).unwrap(),
            Skeletal::lin_comb(one.clone(), g1.clone(), -one.clone(), g2.clone()).unwrap(),
        )
        .unwrap();
        let rhs = Skeletal::lin_comb(
            one.clone(),
            Skeletal::min_of(
                Skeletal::lin_comb(one.clone(), f1, one.clone(), g2.clone()).unwrap(),
                Skeletal::lin_comb(one.clone(), g1, one.clone(), f2.clone()).unwrap(),
            )
            .unwrap(),
            -one.clone(),
            Skeletal::lin_comb(one.clone(), f2, one, g2).unwrap(),
        )
        .unwrap();
        let point: Vec<BigRational> = m.iter().map(|&x| rational(x as i64, 1)).collect();
        prop_assert_eq!(lhs.eval_exact(&point), rhs.eval_exact(&point));
    }
}

#[test]
fn graph_phi_trees_are_homogeneous() {
    let mut rng = rng(61);
    for _ in 0..8 {
        let (g, q) = random_polarized_tree(&mut rng, 5);
        let (f, _) = phi_skeletal(&g, &q).unwrap();
        let m: Vec<f64> = (0..g.edge_count())
            .map(|_| rng.gen_range(0.0..4.0))
            .collect();
        let lambda: f64 = rng.gen_range(0.0..10.0);
        let scaled: Vec<f64> = m.iter().map(|x| x * lambda).collect();
        let base = f.eval(&m).unwrap();
        let value = f.eval(&scaled).unwrap();
        assert!(
            (value - lambda * base).abs() < 1e-9 * (1.0 + base.abs()) * lambda.max(1.0),
            "homogeneity of phi tree: {} vs {}",
            value,
            lambda * base
        );
    }
}

#[test]
fn estimator_matches_tree_closed_form() {
    let mut rng = rng(62);
    for _ in 0..12 {
        // Random stable tree curve with no non-separating nodes.
        let (g, q) = random_polarized_tree(&mut rng, 6);
        let genus: usize = q.total() as usize;
        let u: Vec<Complex<f64>> = (0..g.edge_count())
            .map(|_| Complex::new(rng.gen_range(1e-6..0.5), 0.0))
            .collect();
        let estimate = phi_asymptotic(&g, &q, &u).unwrap();
        let types = tree_edge_types(&g, &q).unwrap();
        let expected: f64 = types
            .iter()
            .zip(&u)
            .map(|(&(j, _), z)| {
                2.0 * j as f64 * (genus - j) as f64 / genus as f64 * (-z.norm().ln())
            })
            .sum();
        assert!(
            (estimate - expected).abs() < 1e-9 * (1.0 + expected.abs()),
            "estimate {} vs closed form {}",
            estimate,
            expected
        );
        // And through the closed-form helper with aggregated lengths.
        let aggregated: Vec<(usize, f64)> = types
            .iter()
            .zip(&u)
            .map(|(&(j, _), z)| (j, -z.norm().ln()))
            .collect();
        let closed = phi_tree_closed_form(&aggregated, genus).unwrap();
        assert!((estimate - closed).abs() < 1e-9 * (1.0 + closed.abs()));
    }
}

#[test]
fn skeletal_boundary_continuity() {
    // Fix the theta template; send one coordinate to the boundary
    // |u| -> 1, matching the contracted quotient value.
    let curve = StableCurveDescription::<f64> {
        components: vec![
            CurveComponent {
                id: "A".into(),
                genus: 0,
            },
            CurveComponent {
                id: "B".into(),
                genus: 0,
            },
        ],
        nodes: (0..3)
            .map(|_| CurveNode {
                a: "A".into(),
                b: "B".into(),
                length: None,
            })
            .collect(),
    };
    let (g, q) = dual_graph(&curve).unwrap();
    let (f, _) = phi_skeletal(&g, &q).unwrap();
    // -log|u| = 1e-4 on the shrinking coordinate, 1 elsewhere.
    let small = (-1e-4f64).exp();
    let e1 = (-1.0f64).exp();
    let near = f
        .green_value(&[
            Complex::new(e1, 0.0),
            Complex::new(e1, 0.0),
            Complex::new(small, 0.0),
        ])
        .unwrap();
    let at_boundary = mgraph::degeneration::phi_function(&g, &q, &[1.0, 1.0, 0.0]).unwrap();
    assert!(
        (near - at_boundary).abs() < 1e-3,
        "boundary continuity: {} vs {}",
        near,
        at_boundary
    );
}

#[test]
fn approximation_agrees_with_direct_interpolation() {
    let mut rng = rng(63);
    for &(arity, mesh) in &[(2usize, 5usize), (3, 3)] {
        let grid = SimplexGrid::new(arity, mesh).unwrap();
        let samples: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = approximate(&grid, &samples, 0.5).unwrap();
        for _ in 0..40 {
            let m: Vec<f64> = (0..arity).map(|_| rng.gen_range(0.0..2.0)).collect();
            let direct = kuhn_interpolate(arity, mesh, &samples, &m);
            let tree = f.eval(&m).unwrap();
            assert!(
                (tree - direct).abs() < 1e-9 * (1.0 + direct.abs()),
                "PL tree {} vs direct {} at {:?}",
                tree,
                direct,
                m
            );
        }
    }
}

#[test]
fn approximation_error_decreases_with_mesh() {
    // Smooth target on the 2-simplex; the PL error at mesh 1/N stays
    // within the Lipschitz modulus and decreases as N doubles.
    let target =
        |m: &[f64]| -> f64 { (m[0] * m[0] + m[1] * m[1] + m[2] * m[2] + m[0] * m[1]).sqrt() };
    let mut errors = Vec::new();
    for mesh in [4usize, 8, 16] {
        let grid = SimplexGrid::new(3, mesh).unwrap();
        let samples: Vec<f64> = grid
            .points()
            .iter()
            .map(|p| {
                let m: Vec<f64> = p.iter().map(|&x| x as f64 / mesh as f64).collect();
                target(&m)
            })
            .collect();
        let f = approximate(&grid, &samples, 1.0 / mesh as f64).unwrap();
        let mut sup = 0.0f64;
        let steps = 40;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let m = [
                    i as f64 / steps as f64,
                    j as f64 / steps as f64,
                    (steps - i - j) as f64 / steps as f64,
                ];
                let err = (f.eval(&m).unwrap() - target(&m)).abs();
                sup = sup.max(err);
            }
        }
        // Lipschitz constant of the target on the simplex is below 2.
        assert!(sup < 2.0 * std::f64::consts::SQRT_2 / mesh as f64);
        errors.push(sup);
    }
    assert!(
        errors[1] < errors[0] && errors[2] < errors[1],
        "sup errors not decreasing: {:?}",
        errors
    );
}
