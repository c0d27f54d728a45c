//! Exact linear algebra over the rationals.
//!
//! Dense Gaussian elimination with deterministic (first nonzero) pivoting.
//! The dimensions that show up here are small: total-complex degrees of the
//! corpus objects stay well under a few hundred.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rat;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Rat>], dim: usize) -> Self {
        let mut m = Mat::zero(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim, "column length mismatch");
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::from_integer(1.into());
        }
        m
    }

    pub fn apply(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc += &self[(i, j)] * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    if !other[(k, j)].is_zero() {
                        let prod = &self[(i, k)] * &other[(k, j)];
                        out[(i, j)] += prod;
                    }
                }
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        let mut e = Eliminator::new(self.cols);
        for i in 0..self.rows {
            let row: Vec<Rat> = (0..self.cols).map(|j| self[(i, j)].clone()).collect();
            e.insert(row);
        }
        e.len()
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

/// Incremental row-echelon eliminator. Rows are kept reduced against each
/// other; insertion order never affects the resulting span.
#[derive(Debug, Clone)]
pub struct Eliminator {
    dim: usize,
    /// Sorted by pivot column; each row is scaled to a unit pivot.
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Eliminator {
    pub fn new(dim: usize) -> Self {
        Eliminator { dim, rows: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduces `v` against the stored rows.
    pub fn reduce(&self, mut v: Vec<Rat>) -> Vec<Rat> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let c = v[*p].clone();
                for j in *p..self.dim {
                    if !row[j].is_zero() {
                        let sub = &c * &row[j];
                        v[j] -= sub;
                    }
                }
            }
        }
        v
    }

    /// Inserts `v` if independent of the current span. Returns whether the
    /// span grew.
    pub fn insert(&mut self, v: Vec<Rat>) -> bool {
        let mut v = self.reduce(v);
        let Some(p) = v.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = v[p].clone();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x / &inv;
            }
        }
        // Back-substitute into earlier rows so reduction stays canonical.
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for j in 0..self.dim {
                    if !v[j].is_zero() {
                        let sub = &c * &v[j];
                        row[j] -= sub;
                    }
                }
            }
        }
        let pos = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(pos, (p, v));
        true
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.reduce(v.to_vec()).iter().all(Rat::is_zero)
    }
}

/// Solves `a x = b`, free variables set to zero. Returns `None` when the
/// system is inconsistent.
pub fn solve(a: &Mat, b: &[Rat]) -> Option<Vec<Rat>> {
    assert_eq!(b.len(), a.rows, "rhs length mismatch");
    // Eliminate on the augmented matrix [a | b].
    let mut e = Eliminator::new(a.cols + 1);
    for i in 0..a.rows {
        let mut row: Vec<Rat> = (0..a.cols).map(|j| a[(i, j)].clone()).collect();
        row.push(b[i].clone());
        e.insert(row);
    }
    // Inconsistent iff some echelon row pivots in the augmented column.
    if e.rows.iter().any(|(p, _)| *p == a.cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); a.cols];
    // Rows are mutually reduced, so each pivot variable reads off directly.
    for (p, row) in e.rows.iter().rev() {
        let mut acc = row[a.cols].clone();
        for j in (*p + 1)..a.cols {
            if !row[j].is_zero() && !x[j].is_zero() {
                acc -= &row[j] * &x[j];
            }
        }
        x[*p] = acc;
    }
    Some(x)
}

/// Basis of the kernel of `a` (as column vectors of length `a.cols`).
pub fn nullspace(a: &Mat) -> Vec<Vec<Rat>> {
    let mut e = Eliminator::new(a.cols);
    for i in 0..a.rows {
        e.insert((0..a.cols).map(|j| a[(i, j)].clone()).collect());
    }
    let pivots: Vec<usize> = e.rows.iter().map(|(p, _)| *p).collect();
    let mut basis = Vec::new();
    for free in 0..a.cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); a.cols];
        v[free] = Rat::from_integer(1.into());
        for (p, row) in &e.rows {
            v[*p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Cohomology of `C^{k-1} --d_in--> C^k --d_out--> C^{k+1}` at `C^k`, with a
/// deterministic choice of representatives and exact class coordinates.
#[derive(Debug, Clone)]
pub struct Cohomology {
    dim: usize,
    /// Columns spanning the image of `d_in`.
    im_basis: Vec<Vec<Rat>>,
    /// Kernel vectors completing the image to a basis of the kernel; their
    /// classes form the chosen basis of the cohomology.
    reps: Vec<Vec<Rat>>,
    /// `[im_basis | reps]` as a matrix, reused for class coordinates.
    span_mat: Mat,
    d_out: Mat,
}

impl Cohomology {
    pub fn new(d_in: &Mat, d_out: &Mat) -> Self {
        let dim = d_out.cols;
        assert_eq!(d_in.rows, dim, "chain complex dimension mismatch");
        let mut e = Eliminator::new(dim);
        let mut im_basis = Vec::new();
        for j in 0..d_in.cols {
            let col = d_in.column(j);
            if e.insert(col.clone()) {
                im_basis.push(col);
            }
        }
        let mut reps = Vec::new();
        for v in nullspace(d_out) {
            if e.insert(v.clone()) {
                reps.push(v);
            }
        }
        let all: Vec<Vec<Rat>> = im_basis.iter().chain(reps.iter()).cloned().collect();
        let span_mat = Mat::from_cols(&all, dim);
        Cohomology { dim, im_basis, reps, span_mat, d_out: d_out.clone() }
    }

    pub fn dim_h(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[Vec<Rat>] {
        &self.reps
    }

    pub fn is_cocycle(&self, v: &[Rat]) -> bool {
        self.d_out.apply(v).iter().all(Rat::is_zero)
    }

    /// Coordinates of the class of `v` in the chosen cohomology basis.
    /// Errors when `v` is not a cocycle.
    pub fn class_of(&self, v: &[Rat]) -> Result<Vec<Rat>> {
        if v.len() != self.dim {
            return Err(Error::Degree("cocycle has wrong length".into()));
        }
        if !self.is_cocycle(v) {
            return Err(Error::Degree("class_of called on a non-cocycle".into()));
        }
        let x = solve(&self.span_mat, v).ok_or_else(|| {
            Error::Inconsistent("kernel vector outside computed kernel span".into())
        })?;
        Ok(x[self.im_basis.len()..].to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    #[test]
    fn solve_simple() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = vec![rat(5), rat(11)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.apply(&x), b);
    }

    #[test]
    fn solve_inconsistent() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&a, &[rat(1), rat(3)]).is_none());
    }

    #[test]
    fn solve_underdetermined() {
        let a = m(&[&[1, 1, 1]]);
        let b = vec![rat(6)];
        let x = solve(&a, &b).unwrap();
        assert_eq!(a.apply(&x), b);
    }

    #[test]
    fn nullspace_rank_sum() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        let ns = nullspace(&a);
        assert_eq!(a.rank() + ns.len(), a.cols);
        for v in ns {
            assert!(a.apply(&v).iter().all(Rat::is_zero));
        }
    }

    #[test]
    fn cohomology_of_circle_complex() {
        // Simplicial circle: 3 vertices, 3 edges; H^0 = H^1 = Q.
        // d: C^0 -> C^1 with rows (edges) v_j - v_i.
        let d0 = m(&[&[-1, 1, 0], &[0, -1, 1], &[1, 0, -1]]);
        let d_minus = Mat::zero(3, 0);
        let h0 = Cohomology::new(&d_minus, &d0);
        assert_eq!(h0.dim_h(), 1);
        let d1 = Mat::zero(0, 3);
        let h1 = Cohomology::new(&d0, &d1);
        assert_eq!(h1.dim_h(), 1);
        // An exact vector has class zero.
        let b = d0.apply(&[rat(1), rat(2), rat(3)]);
        let cls = h1.class_of(&b).unwrap();
        assert!(cls.iter().all(Rat::is_zero));
        // A generator of H^1 has a nonzero class.
        let cls = h1.class_of(&[rat(1), rat(1), rat(1)]).unwrap();
        assert!(cls.iter().any(|c| !c.is_zero()));
    }

    #[test]
    fn eliminator_detects_dependence() {
        let mut e = Eliminator::new(3);
        assert!(e.insert(vec![rat(1), rat(0), rat(1)]));
        assert!(e.insert(vec![rat(0), rat(1), rat(1)]));
        assert!(!e.insert(vec![rat(2), rat(3), rat(5)]));
        assert!(e.contains(&[rat(1), rat(1), rat(2)]));
        assert!(!e.contains(&[rat(0), rat(0), rat(1)]));
    }
}
