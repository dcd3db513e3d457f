//! Barycentric grids on the standard simplex and the Kuhn triangulation
//! machinery behind piecewise-linear approximation.
//!
//! Points of the standard `(r-1)`-simplex at mesh `1/N` are multi-indices
//! in `Z^r_{>=0}` summing to `N`. The Kuhn (staircase) triangulation is
//! obtained in partial-sum coordinates `y_j = m_1 + ... + m_j`, where the
//! simplex becomes the order polytope `0 <= y_1 <= ... <= y_{r-1} <= N`
//! and the cells are the Freudenthal simplices of the unit grid that fit
//! inside it. All geometry here is exact rational arithmetic.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// The barycentric grid of the standard `(arity-1)`-simplex at mesh
/// `1/mesh`: multi-indices summing to `mesh`, enumerated lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexGrid {
    arity: usize,
    mesh: usize,
}

impl SimplexGrid {
    pub fn new(arity: usize, mesh: usize) -> Result<Self> {
        if arity < 1 {
            return Err(Error::BadMesh("arity must be at least 1".into()));
        }
        if mesh < 1 {
            return Err(Error::BadMesh("mesh must be at least 1".into()));
        }
        Ok(SimplexGrid { arity, mesh })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn mesh(&self) -> usize {
        self.mesh
    }

    /// All grid points in lexicographic order.
    pub fn points(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = vec![0usize; self.arity];
        enumerate_points(self.arity, self.mesh, 0, &mut current, &mut out);
        out
    }

    pub fn len(&self) -> usize {
        binomial(self.mesh + self.arity - 1, self.arity - 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index_of(&self, point: &[usize]) -> Option<usize> {
        if point.len() != self.arity || point.iter().sum::<usize>() != self.mesh {
            return None;
        }
        // Lexicographic rank: count points with a smaller prefix.
        let mut rank = 0usize;
        let mut remaining = self.mesh;
        for (i, &p) in point.iter().enumerate().take(self.arity - 1) {
            let free = self.arity - 1 - i;
            for smaller in 0..p {
                rank += binomial(remaining - smaller + free - 1, free - 1);
            }
            remaining -= p;
        }
        Some(rank)
    }
}

fn enumerate_points(
    arity: usize,
    remaining: usize,
    coord: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if coord + 1 == arity {
        current[coord] = remaining;
        out.push(current.clone());
        return;
    }
    for value in 0..=remaining {
        current[coord] = value;
        enumerate_points(arity, remaining - value, coord + 1, current, out);
    }
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// A top-dimensional Kuhn cell: `arity` grid points spanning a simplex.
#[derive(Debug, Clone)]
pub(crate) struct KuhnCell {
    pub vertices: Vec<Vec<usize>>,
}

/// All top-dimensional cells of the Kuhn triangulation at the grid mesh.
pub(crate) fn kuhn_cells(grid: &SimplexGrid) -> Vec<KuhnCell> {
    let r = grid.arity();
    let n = grid.mesh();
    let d = r - 1;
    if d == 0 {
        return vec![KuhnCell {
            vertices: vec![vec![n]],
        }];
    }
    let mut cells = Vec::new();
    let mut base = vec![0usize; d];
    loop {
        for perm in permutations(d) {
            // Walk the cube diagonal in the permutation order.
            let mut ys = vec![base.clone()];
            for &axis in &perm {
                let mut next = ys.last().unwrap().clone();
                next[axis] += 1;
                ys.push(next);
            }
            let ordered = ys
                .iter()
                .all(|y| y.windows(2).all(|w| w[0] <= w[1]) && y.last().copied().unwrap_or(0) <= n);
            if ordered {
                cells.push(KuhnCell {
                    vertices: ys.iter().map(|y| y_to_m(y, n)).collect(),
                });
            }
        }
        // Odometer over bases in [0, n-1]^d.
        let mut i = 0;
        loop {
            if i == d {
                return cells;
            }
            base[i] += 1;
            if base[i] < n {
                break;
            }
            base[i] = 0;
            i += 1;
        }
    }
}

fn y_to_m(y: &[usize], n: usize) -> Vec<usize> {
    let d = y.len();
    let mut m = Vec::with_capacity(d + 1);
    m.push(y[0]);
    for i in 1..d {
        m.push(y[i] - y[i - 1]);
    }
    m.push(n - y[d - 1]);
    m
}

fn permutations(d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..d).collect();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute(items, start + 1, out);
        items.swap(start, i);
    }
}

/// Exact difference-of-concave data for the homogeneous extension of a
/// piecewise-linear interpolant: the interpolant equals
/// `max_c <cell_functionals[c], m>  -  penalty * Σ_w |<wall_normals[w], m>|`
/// on the cone over the simplex.
#[derive(Debug, Clone)]
pub(crate) struct PlDecomposition {
    pub cell_functionals: Vec<Vec<BigRational>>,
    pub wall_normals: Vec<Vec<BigRational>>,
    pub penalty: BigRational,
}

pub(crate) fn pl_decomposition(
    grid: &SimplexGrid,
    samples: &[BigRational],
) -> Result<PlDecomposition> {
    let r = grid.arity();
    let cells = kuhn_cells(grid);
    // Samples are values at the unit-simplex points p / mesh; at the
    // integer vertices the homogeneous interpolant takes mesh * sample.
    let mesh = int_ratio(grid.mesh() as i64);
    let sample_at = |point: &[usize]| -> Result<BigRational> {
        grid.index_of(point)
            .map(|i| &samples[i] * &mesh)
            .ok_or_else(|| Error::BadMesh("cell vertex outside the grid".into()))
    };

    // Per-cell linear functional matching the samples at the cone
    // vertices; the vertices are linearly independent since they span a
    // full-dimensional simplex off the origin.
    let mut raw_functionals = Vec::with_capacity(cells.len());
    for cell in &cells {
        let matrix: Vec<Vec<BigRational>> = cell
            .vertices
            .iter()
            .map(|v| v.iter().map(|&x| int_ratio(x as i64)).collect())
            .collect();
        let rhs: Vec<BigRational> = cell
            .vertices
            .iter()
            .map(|v| sample_at(v))
            .collect::<Result<_>>()?;
        let functional =
            solve_exact(matrix, rhs).ok_or(Error::BadMesh("degenerate Kuhn cell".into()))?;
        raw_functionals.push(functional);
    }

    // Interior walls: facets shared by exactly two cells.
    use std::collections::BTreeMap;
    let mut facets: BTreeMap<Vec<Vec<usize>>, Vec<(usize, usize)>> = BTreeMap::new();
    for (ci, cell) in cells.iter().enumerate() {
        for drop in 0..cell.vertices.len() {
            let mut key: Vec<Vec<usize>> = cell
                .vertices
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != drop)
                .map(|(_, v)| v.clone())
                .collect();
            key.sort();
            facets.entry(key).or_default().push((ci, drop));
        }
    }

    let mut wall_normals = Vec::new();
    let mut kinks: Vec<BigRational> = Vec::new();
    let mut wall_of_cells: Vec<(usize, usize)> = Vec::new();
    for (key, owners) in &facets {
        debug_assert!(owners.len() <= 2, "facet shared by more than two cells");
        if owners.len() != 2 {
            continue;
        }
        let matrix: Vec<Vec<BigRational>> = key
            .iter()
            .map(|v| v.iter().map(|&x| int_ratio(x as i64)).collect())
            .collect();
        let mut normal = kernel_vector(matrix).ok_or(Error::BadMesh("degenerate wall".into()))?;
        let (ca, da) = owners[0];
        let (cb, _) = owners[1];
        // Orient the normal toward the first cell.
        let opposite = &cells[ca].vertices[da];
        let at_opposite = dot_int(&normal, opposite);
        debug_assert!(!at_opposite.is_zero());
        if at_opposite.is_negative() {
            for x in &mut normal {
                *x = -x.clone();
            }
        }
        let at_opposite = dot_int(&normal, opposite);
        // Kink coefficient: l_a - l_b = kink * normal.
        let diff_at =
            dot_int(&raw_functionals[ca], opposite) - dot_int(&raw_functionals[cb], opposite);
        kinks.push(diff_at / at_opposite);
        wall_normals.push(normal);
        wall_of_cells.push((ca, cb));
    }

    // Penalty making f + M Σ|h_w| convex across every wall.
    let mut penalty = BigRational::one();
    for kink in &kinks {
        let need = kink.abs() / int_ratio(2) + BigRational::one();
        if need > penalty {
            penalty = need;
        }
    }

    // Convexified cell functionals: p_c = l_c + M Σ_w sign_c(h_w) h_w,
    // with the sign taken at the cell centroid (never on a wall).
    let mut cell_functionals = Vec::with_capacity(cells.len());
    for (ci, cell) in cells.iter().enumerate() {
        let mut functional = raw_functionals[ci].clone();
        let centroid: Vec<BigRational> = (0..r)
            .map(|k| {
                cell.vertices
                    .iter()
                    .map(|v| int_ratio(v[k] as i64))
                    .fold(BigRational::zero(), |a, b| a + b)
            })
            .collect();
        for normal in &wall_normals {
            let side = dot(normal, &centroid);
            debug_assert!(!side.is_zero(), "wall hyperplane cuts a cell");
            let signed = if side.is_negative() {
                -penalty.clone()
            } else {
                penalty.clone()
            };
            for (f, h) in functional.iter_mut().zip(normal) {
                *f += signed.clone() * h;
            }
        }
        cell_functionals.push(functional);
    }

    Ok(PlDecomposition {
        cell_functionals,
        wall_normals,
        penalty,
    })
}

pub(crate) fn int_ratio(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .fold(BigRational::zero(), |acc, t| acc + t)
}

fn dot_int(a: &[BigRational], b: &[usize]) -> BigRational {
    a.iter()
        .zip(b)
        .map(|(x, &y)| x * int_ratio(y as i64))
        .fold(BigRational::zero(), |acc, t| acc + t)
}

/// Exact Gaussian elimination; `None` when the matrix is singular.
#[allow(clippy::needless_range_loop)]
pub(crate) fn solve_exact(
    mut a: Vec<Vec<BigRational>>,
    mut b: Vec<BigRational>,
) -> Option<Vec<BigRational>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&row| !a[row][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let scale = a[col][col].clone();
        for row in col + 1..n {
            if a[row][col].is_zero() {
                continue;
            }
            let factor = &a[row][col] / &scale;
            for k in col..n {
                let delta = &factor * &a[col][k];
                a[row][k] -= delta;
            }
            let delta = &factor * &b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![BigRational::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc -= &a[row][k] * &x[k];
        }
        x[row] = acc / &a[row][row];
    }
    Some(x)
}

/// One nonzero kernel vector of a full-row-rank `(n-1) x n` matrix.
#[allow(clippy::needless_range_loop)]
pub(crate) fn kernel_vector(mut a: Vec<Vec<BigRational>>) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = rows + 1;
    let mut pivot_col = vec![usize::MAX; rows];
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let pivot = (row..rows).find(|&i| !a[i][col].is_zero());
        let Some(p) = pivot else { continue };
        a.swap(row, p);
        let scale = a[row][col].clone();
        for i in 0..rows {
            if i == row || a[i][col].is_zero() {
                continue;
            }
            let factor = &a[i][col] / &scale;
            for k in col..cols {
                let delta = &factor * &a[row][k];
                a[i][k] -= delta;
            }
        }
        pivot_col[row] = col;
        row += 1;
    }
    if row < rows {
        return None; // rank deficient
    }
    let free = (0..cols).find(|c| !pivot_col.contains(c))?;
    let mut x = vec![BigRational::zero(); cols];
    x[free] = BigRational::one();
    for r in (0..rows).rev() {
        let pc = pivot_col[r];
        let mut acc = BigRational::zero();
        for c in pc + 1..cols {
            acc += &a[r][c] * &x[c];
        }
        x[pc] = -acc / &a[r][pc];
    }
    Some(x)
}
