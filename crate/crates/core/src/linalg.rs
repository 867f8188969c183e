//! Dense linear algebra for kernel matrices.
//!
//! Everything here is small, dense and single-threaded: symmetric
//! eigendecomposition (Householder tridiagonalization followed by implicit
//! QL), best low-rank approximation, row-echelon LUP with a numeric rank, and
//! Cholesky solves.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Relative pivot tolerance used by [`lup`].
pub const PIVOT_TOL: f64 = 1e-10;
/// An eigenvalue counts toward the rank iff it exceeds this times the largest.
pub const EIGEN_RANK_TOL: f64 = 1e-10;

const QL_MAX_ITER: usize = 60;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest elementwise absolute difference. Panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// Rows picked (and reordered) by `perm`: row `i` of the result is row
    /// `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Matrix {
        Matrix::from_fn(perm.len(), self.cols, |i, j| self[(perm[i], j)])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Square matrix whose entries agree with their transposes to within
/// `1e-12 * max|entry|`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if m.rows != m.cols {
            return Err(Error::Contract(format!(
                "symmetric matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        if m.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::Contract("matrix has non-finite entries".into()));
        }
        let tol = 1e-12 * m.max_abs();
        for i in 0..m.rows {
            for j in i + 1..m.cols {
                let gap = (m[(i, j)] - m[(j, i)]).abs();
                if gap > tol {
                    return Err(Error::Contract(format!(
                        "matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {gap:e}"
                    )));
                }
            }
        }
        Ok(SymMatrix(m))
    }

    /// Build from the upper triangle of `f`; the lower triangle is mirrored.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        SymMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        SymMatrix::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.0.rows
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.order()).map(|i| self.0[(i, i)]).sum()
    }

    /// Principal submatrix on `indices`.
    pub fn principal(&self, indices: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(indices.len(), |a, b| self.0[(indices[a], indices[b])])
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;
    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

#[derive(Clone, Debug)]
pub struct EigenDecomp {
    /// Sorted descending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: Matrix,
}

impl EigenDecomp {
    pub fn order(&self) -> usize {
        self.values.len()
    }

    /// Number of eigenvalues above `EIGEN_RANK_TOL * values[0]`.
    pub fn numeric_rank(&self) -> usize {
        let Some(&top) = self.values.first() else {
            return 0;
        };
        if top <= 0.0 {
            return 0;
        }
        self.values.iter().filter(|&&v| v > EIGEN_RANK_TOL * top).count()
    }

    /// `sum_{k < r} values[k] v_k v_k^T`.
    pub fn low_rank(&self, r: usize) -> Result<SymMatrix> {
        let n = self.order();
        if r > n {
            return Err(Error::parameter(format!("rank {r} exceeds order {n}")));
        }
        // scaled copies of the leading eigenvectors, stored by row for locality
        let lead: Vec<Vec<f64>> = (0..r).map(|k| self.vectors.column(k)).collect();
        Ok(SymMatrix::from_fn(n, |i, j| {
            let mut s = 0.0;
            for (k, v) in lead.iter().enumerate() {
                s += self.values[k] * v[i] * v[j];
            }
            s
        }))
    }

    pub fn reconstruct(&self) -> SymMatrix {
        self.low_rank(self.order()).expect("full rank is in range")
    }
}

/// Symmetric eigendecomposition with eigenvalues sorted descending. Equal
/// eigenvalues keep the order in which the QL sweep produced them.
pub fn eigh(q: &SymMatrix) -> Result<EigenDecomp> {
    let n = q.order();
    if n == 0 {
        return Ok(EigenDecomp {
            values: Vec::new(),
            vectors: Matrix::zeros(0, 0),
        });
    }
    let mut v = q.as_matrix().clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tridiagonalize(&mut v, &mut d, &mut e);
    tridiagonal_ql(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].total_cmp(&d[a]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomp { values, vectors })
}

/// Best rank-`r` approximation in Frobenius norm.
pub fn low_rank(q: &SymMatrix, r: usize) -> Result<SymMatrix> {
    if r > q.order() {
        return Err(Error::parameter(format!(
            "rank {r} exceeds order {}",
            q.order()
        )));
    }
    eigh(q)?.low_rank(r)
}

// Householder reduction to tridiagonal form (after the EISPACK tred2 routine).
// On exit `v` holds the accumulated orthogonal transform, `d` the diagonal and
// `e[1..]` the subdiagonal.
fn tridiagonalize(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    v[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

// Implicit QL iterations on the tridiagonal form (after EISPACK tql2).
fn tridiagonal_ql(v: &mut Matrix, d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > QL_MAX_ITER {
                    return Err(Error::numerical(format!(
                        "eigh: QL iteration did not converge for eigenvalue {l} of {n} \
                         after {QL_MAX_ITER} sweeps (|offdiag| = {:e}, threshold {:e})",
                        e[l].abs(),
                        eps * tst1
                    )));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let row = v.row_mut(k);
                        let hk = row[i + 1];
                        row[i + 1] = s * row[i] + c * hk;
                        row[i] = c * row[i] - s * hk;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// `P A = L U` in row-echelon form.
#[derive(Clone, Debug)]
pub struct LupDecomp {
    /// Row `i` of `P A` is row `permutation[i]` of `A`.
    pub permutation: Vec<usize>,
    pub l: Matrix,
    pub u: Matrix,
    /// Number of pivots that cleared the tolerance. The first
    /// `numeric_rank` rows of `P A` are linearly independent.
    pub numeric_rank: usize,
}

impl LupDecomp {
    /// Original row indices of the independent rows, in pivot order.
    pub fn pivot_rows(&self) -> &[usize] {
        &self.permutation[..self.numeric_rank]
    }
}

/// Row-echelon LUP with partial pivoting and [`PIVOT_TOL`].
pub fn lup(a: &Matrix) -> Result<LupDecomp> {
    lup_with_tol(a, PIVOT_TOL)
}

/// Row-echelon LUP with partial pivoting.
///
/// A column whose largest remaining entry is at most `rel_tol` times the
/// largest initial column 2-norm is skipped without consuming a pivot row,
/// so pivots never land on numerically dependent rows.
pub fn lup_with_tol(a: &Matrix, rel_tol: f64) -> Result<LupDecomp> {
    let n = a.rows;
    if a.cols != n {
        return Err(Error::Contract(format!(
            "lup expects a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let col_norm = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)] * a[(i, j)]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let tol = rel_tol * col_norm;

    let mut w = a.clone();
    let mut l = Matrix::identity(n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivot_cols = Vec::new();
    let mut p = 0;
    for c in 0..n {
        if p == n {
            break;
        }
        let (best, best_abs) = (p..n)
            .map(|i| (i, w[(i, c)].abs()))
            .fold((p, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best_abs <= tol {
            continue;
        }
        if best != p {
            w.swap_rows(best, p);
            perm.swap(best, p);
            for j in 0..p {
                let tmp = l[(best, j)];
                l[(best, j)] = l[(p, j)];
                l[(p, j)] = tmp;
            }
        }
        let pivot = w[(p, c)];
        for i in p + 1..n {
            let factor = w[(i, c)] / pivot;
            if factor == 0.0 {
                continue;
            }
            l[(i, p)] = factor;
            for j in c..n {
                let delta = factor * w[(p, j)];
                w[(i, j)] -= delta;
            }
            w[(i, c)] = 0.0;
        }
        pivot_cols.push(c);
        p += 1;
    }
    // Entries left of each pivot, and every row past the last pivot, hold
    // only sub-tolerance residue from skipped columns.
    for i in 0..n {
        let first_kept = pivot_cols.get(i).copied().unwrap_or(n);
        for j in 0..first_kept {
            w[(i, j)] = 0.0;
        }
    }
    Ok(LupDecomp {
        permutation: perm,
        l,
        u: w,
        numeric_rank: p,
    })
}

/// Cholesky factor `K = L L^T`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Matrix,
    k: SymMatrix,
}

impl Cholesky {
    pub fn factor(k: &SymMatrix) -> Result<Self> {
        let n = k.order();
        let max_diag = (0..n).map(|i| k[(i, i)].abs()).fold(0.0, f64::max);
        let floor = f64::EPSILON * max_diag * n as f64;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = k[(j, j)];
            for t in 0..j {
                d -= l[(j, t)] * l[(j, t)];
            }
            if d <= floor || !d.is_finite() {
                return Err(Error::numerical(format!(
                    "matrix is not positive definite: pivot {j} of {n} is {d:e}"
                )));
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in j + 1..n {
                let mut s = k[(i, j)];
                let (ri, rj) = (l.row(i), l.row(j));
                s -= dot(&ri[..j], &rj[..j]);
                l[(i, j)] = s / djj;
            }
        }
        Ok(Cholesky { l, k: k.clone() })
    }

    fn substitute(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut y = b.to_vec();
        for i in 0..n {
            let s = dot(&self.l.row(i)[..i], &y[..i]);
            y[i] = (y[i] - s) / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for t in i + 1..n {
                s -= self.l[(t, i)] * y[t];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// Solve `K x = b` with one step of iterative refinement.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.k.order(), "dimension mismatch");
        let mut x = self.substitute(b);
        let kx = self.k.as_matrix().mul_vec(&x);
        let residual: Vec<f64> = b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect();
        let correction = self.substitute(&residual);
        for (xi, ci) in x.iter_mut().zip(correction) {
            *xi += ci;
        }
        x
    }
}

/// Solve a symmetric positive definite system.
pub fn solve_spd(k: &SymMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != k.order() {
        return Err(Error::Contract(format!(
            "right-hand side has length {}, matrix order is {}",
            b.len(),
            k.order()
        )));
    }
    Ok(Cholesky::factor(k)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[Vec<f64>]) -> SymMatrix {
        SymMatrix::new(Matrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn rejects_asymmetric() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.5, 1.0]]);
        assert!(matches!(SymMatrix::new(m), Err(Error::Contract(_))));
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]);
        assert!(SymMatrix::new(m).is_err());
    }

    #[test]
    fn eigh_identity() {
        let ed = eigh(&SymMatrix::identity(3)).unwrap();
        for v in &ed.values {
            assert!((v - 1.0).abs() < 1e-14);
        }
        let vtv = ed.vectors.transpose().matmul(&ed.vectors);
        assert!(vtv.max_abs_diff(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn eigh_diagonal_sorted() {
        let ed = eigh(&SymMatrix::diagonal(&[1.0, 3.0])).unwrap();
        assert!((ed.values[0] - 3.0).abs() < 1e-14);
        assert!((ed.values[1] - 1.0).abs() < 1e-14);
        assert!((ed.vectors[(1, 0)].abs() - 1.0).abs() < 1e-14);
        assert!((ed.vectors[(0, 1)].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_two_by_two() {
        let ed = eigh(&sym(&[vec![2.0, 1.0], vec![1.0, 2.0]])).unwrap();
        assert!((ed.values[0] - 3.0).abs() < 1e-13);
        assert!((ed.values[1] - 1.0).abs() < 1e-13);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v1 = ed.vectors.column(0);
        let v2 = ed.vectors.column(1);
        assert!((dot(&v1, &[h, h]).abs() - 1.0).abs() < 1e-12);
        assert!((dot(&v2, &[h, -h]).abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn low_rank_examples() {
        let q = SymMatrix::diagonal(&[3.0, 1.0]);
        let q1 = low_rank(&q, 1).unwrap();
        assert!(q1.as_matrix().max_abs_diff(SymMatrix::diagonal(&[3.0, 0.0]).as_matrix()) < 1e-14);
        let q0 = low_rank(&q, 0).unwrap();
        assert_eq!(q0.as_matrix().max_abs(), 0.0);
        let q2 = low_rank(&q, 2).unwrap();
        assert!(q2.as_matrix().max_abs_diff(q.as_matrix()) < 1e-10);
        assert!(matches!(low_rank(&q, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn lup_identity_and_swap() {
        let d = lup(&Matrix::identity(2)).unwrap();
        assert_eq!(d.permutation, vec![0, 1]);
        assert_eq!(d.numeric_rank, 2);
        assert_eq!(d.l, Matrix::identity(2));
        assert_eq!(d.u, Matrix::identity(2));

        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let d = lup(&a).unwrap();
        assert_eq!(d.permutation, vec![1, 0]);
        assert_eq!(d.numeric_rank, 2);
    }

    #[test]
    fn lup_skips_zero_leading_column() {
        // rank one; the first column is empty so plain partial pivoting
        // would leave the zero row on top
        let a = Matrix::from_rows(&[vec![0.0, 0.0], vec![0.0, 1.0]]);
        let d = lup(&a).unwrap();
        assert_eq!(d.numeric_rank, 1);
        assert_eq!(d.pivot_rows(), &[1]);
        let pa = a.permute_rows(&d.permutation);
        assert!(pa.max_abs_diff(&d.l.matmul(&d.u)) < 1e-15);
    }

    #[test]
    fn solve_examples() {
        let x = solve_spd(&SymMatrix::identity(3), &[1.0, -2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, -2.0, 3.0]);
        let x = solve_spd(&SymMatrix::diagonal(&[2.0, 4.0]), &[2.0, 8.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn solve_rejects_indefinite() {
        let k = sym(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        let err = solve_spd(&k, &[1.0, 1.0]).unwrap_err();
        assert!(err.to_string().contains("pivot 1"), "{err}");
    }
}
