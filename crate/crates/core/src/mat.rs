//! Dense integer matrices and the exact normal-form algorithms the rest of
//! the crate is built on: row Hermite normal form with transform, integer
//! kernels, Bareiss determinants and rational Gauss elimination.

use num_traits::{One, Zero};

use crate::num::{LatInt, RatOf};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: LatInt> Mat<T> {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend(r);
        }
        Mat {
            rows: n,
            cols,
            data,
        }
    }

    pub fn from_i32(cols: usize, rows: &[&[i32]]) -> Self {
        Mat::from_rows(
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Mat<T> {
        let mut t = Mat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, other.rows);
        let mut out: Mat<T> = Mat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)].clone();
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)].clone() + a.clone() * other[(k, j)].clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| crate::num::dot(self.row(i), v))
            .collect()
    }

    /// v * self for a row vector v.
    pub fn vec_mul(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len());
        let mut out = vec![T::zero(); self.cols];
        for i in 0..self.rows {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..self.cols {
                out[j] = out[j].clone() + v[i].clone() * self[(i, j)].clone();
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            self[(r, j)] = -self[(r, j)].clone();
        }
    }

    /// row a += q * row b
    fn add_multiple(&mut self, a: usize, b: usize, q: &T) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self[(b, j)].clone();
            self[(a, j)] = self[(a, j)].clone() + q.clone() * v;
        }
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Signed determinant of a square matrix, by fraction-free elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return T::one();
        }
        let mut m = self.clone();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !m[(i, k)].is_zero()) {
                    Some(i) => {
                        m.swap_rows(k, i);
                        sign = -sign;
                    }
                    None => return T::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m[(k, k)].clone() * m[(i, j)].clone()
                        - m[(i, k)].clone() * m[(k, j)].clone();
                    m[(i, j)] = v / prev.clone();
                }
                m[(i, k)] = T::zero();
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        let c = self.cols;
        &mut self.data[i * c + j]
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

/// Result of the row Hermite normal form `u * input = h`.
pub struct Hnf<T> {
    pub h: Mat<T>,
    pub u: Mat<T>,
    /// pivots[i] = column of the pivot in row i; rank = pivots.len()
    pub pivots: Vec<usize>,
}

/// Row-style Hermite normal form: pivots positive, entries above a pivot
/// reduced into `[0, pivot)`, zero rows trailing, pivot columns strictly
/// increasing. `u` is unimodular with `u * mat = h`.
pub fn hnf<T: LatInt>(mat: &Mat<T>) -> Hnf<T> {
    let mut h = mat.clone();
    let mut u = Mat::identity(mat.rows());
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for col in 0..mat.cols() {
        if r == h.rows() {
            break;
        }
        // Euclid on the entries of this column at rows r.., mirrored on u.
        loop {
            let mut best: Option<usize> = None;
            for i in r..h.rows() {
                if h[(i, col)].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some(i),
                    Some(b) => {
                        if h[(i, col)].abs() < h[(b, col)].abs() {
                            Some(i)
                        } else {
                            Some(b)
                        }
                    }
                };
            }
            let Some(b) = best else { break };
            h.swap_rows(r, b);
            u.swap_rows(r, b);
            if h[(r, col)].is_negative() {
                h.negate_row(r);
                u.negate_row(r);
            }
            let mut done = true;
            for i in r + 1..h.rows() {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let q = -(h[(i, col)].div_floor(&h[(r, col)]));
                h.add_multiple(i, r, &q);
                u.add_multiple(i, r, &q);
                if !h[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(r, col)].is_zero() {
            continue;
        }
        // reduce entries above the pivot into [0, pivot)
        for i in 0..r {
            let q = -(h[(i, col)].div_floor(&h[(r, col)]));
            h.add_multiple(i, r, &q);
            u.add_multiple(i, r, &q);
        }
        pivots.push(col);
        r += 1;
    }
    Hnf { h, u, pivots }
}

/// The nonzero rows of the HNF, i.e. a canonical basis of the row lattice.
pub fn hnf_basis<T: LatInt>(mat: &Mat<T>) -> Mat<T> {
    let res = hnf(mat);
    let rank = res.pivots.len();
    Mat::from_rows(
        mat.cols(),
        (0..rank).map(|i| res.h.row(i).to_vec()).collect(),
    )
}

/// Basis of the left kernel lattice `{x : x * mat = 0}`. The result is a
/// saturated lattice since it is spanned by rows of a unimodular transform.
pub fn left_kernel<T: LatInt>(mat: &Mat<T>) -> Mat<T> {
    let res = hnf(mat);
    let rank = res.pivots.len();
    Mat::from_rows(
        mat.rows(),
        (rank..mat.rows()).map(|i| res.u.row(i).to_vec()).collect(),
    )
}

/// Basis of the right kernel lattice `{x : mat * x = 0}` (saturated).
pub fn right_kernel<T: LatInt>(mat: &Mat<T>) -> Mat<T> {
    left_kernel(&mat.transpose())
}

/// Solves `z * h = c` for integer `z` given `h` in row HNF with the stated
/// pivots. Returns None when no integer solution exists.
pub fn solve_against_hnf<T: LatInt>(h: &Mat<T>, pivots: &[usize], c: &[T]) -> Option<Vec<T>> {
    assert_eq!(h.cols(), c.len());
    let mut z = vec![T::zero(); h.rows()];
    let mut residual = c.to_vec();
    for (i, &col) in pivots.iter().enumerate() {
        let p = &h[(i, col)];
        let (q, rem) = residual[col].div_rem(p);
        if !rem.is_zero() {
            return None;
        }
        if !q.is_zero() {
            for j in 0..h.cols() {
                residual[j] = residual[j].clone() - q.clone() * h[(i, j)].clone();
            }
        }
        z[i] = q;
    }
    if residual.iter().all(|x| x.is_zero()) {
        Some(z)
    } else {
        None
    }
}

/// Rational coordinates solving `x * basis = v`, if `v` lies in the row span.
pub fn solve_in_row_span<T: LatInt>(basis: &Mat<T>, v: &[RatOf<T>]) -> Option<Vec<RatOf<T>>> {
    let n = basis.rows();
    if n == 0 {
        return if v.iter().all(|x| x.is_zero()) {
            Some(vec![])
        } else {
            None
        };
    }
    // Gaussian elimination on the transposed system basis^T x^T = v^T.
    let mut a: Vec<Vec<RatOf<T>>> = (0..basis.cols())
        .map(|j| {
            (0..n)
                .map(|i| RatOf::from_integer(basis[(i, j)].clone()))
                .collect()
        })
        .collect();
    let mut b: Vec<RatOf<T>> = v.to_vec();
    let rows = basis.cols();
    let mut x = vec![RatOf::<T>::zero(); n];
    let mut pivot_rows: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for col in 0..n {
        let Some(p) = (r..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        b.swap(r, p);
        let inv = a[r][col].clone();
        for i in 0..rows {
            if i == r || a[i][col].is_zero() {
                continue;
            }
            let f = a[i][col].clone() / inv.clone();
            for j in col..n {
                let v = a[r][j].clone();
                a[i][j] = a[i][j].clone() - f.clone() * v;
            }
            let v = b[r].clone();
            b[i] = b[i].clone() - f * v;
        }
        pivot_rows.push((r, col));
        r += 1;
    }
    for &(row, col) in &pivot_rows {
        x[col] = b[row].clone() / a[row][col].clone();
    }
    // consistency on the remaining rows
    for i in r..rows {
        if !b[i].is_zero() {
            return None;
        }
    }
    Some(x)
}

/// Outcome of solving a rational linear system `a * x = rhs`.
pub enum LinSolve<T: LatInt> {
    /// A particular solution (free variables set to zero in the reduced
    /// echelon form) together with a basis of the solution space of the
    /// homogeneous system.
    Solvable {
        particular: Vec<RatOf<T>>,
        nullspace: Vec<Vec<RatOf<T>>>,
    },
    /// Certificate: coefficients `c` with `c * a = 0` but `c * rhs != 0`.
    Inconsistent { combination: Vec<RatOf<T>> },
}

/// Exact Gauss elimination over the rationals with a tracked transform, so
/// an inconsistency can be certified by the row combination producing it.
pub fn solve_rational<T: LatInt>(a: &[Vec<RatOf<T>>], rhs: &[RatOf<T>]) -> LinSolve<T> {
    let m = a.len();
    assert_eq!(m, rhs.len());
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut mat: Vec<Vec<RatOf<T>>> = a.to_vec();
    let mut b: Vec<RatOf<T>> = rhs.to_vec();
    // transform[i] tracks the combination of input rows giving current row i
    let mut transform: Vec<Vec<RatOf<T>>> = (0..m)
        .map(|i| {
            let mut row = vec![RatOf::<T>::zero(); m];
            row[i] = RatOf::one();
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for col in 0..n {
        let Some(p) = (r..m).find(|&i| !mat[i][col].is_zero()) else {
            continue;
        };
        mat.swap(r, p);
        b.swap(r, p);
        transform.swap(r, p);
        let piv = mat[r][col].clone();
        for j in 0..n {
            mat[r][j] = mat[r][j].clone() / piv.clone();
        }
        b[r] = b[r].clone() / piv.clone();
        for j in 0..m {
            transform[r][j] = transform[r][j].clone() / piv.clone();
        }
        for i in 0..m {
            if i == r || mat[i][col].is_zero() {
                continue;
            }
            let f = mat[i][col].clone();
            for j in 0..n {
                let v = mat[r][j].clone();
                mat[i][j] = mat[i][j].clone() - f.clone() * v;
            }
            let v = b[r].clone();
            b[i] = b[i].clone() - f.clone() * v;
            for j in 0..m {
                let v = transform[r][j].clone();
                transform[i][j] = transform[i][j].clone() - f.clone() * v;
            }
        }
        pivots.push((r, col));
        r += 1;
    }
    for i in r..m {
        if !b[i].is_zero() {
            return LinSolve::Inconsistent {
                combination: transform[i].clone(),
            };
        }
    }
    let mut particular = vec![RatOf::<T>::zero(); n];
    for &(row, col) in &pivots {
        particular[col] = b[row].clone();
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut nullspace = Vec::new();
    for free in 0..n {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![RatOf::<T>::zero(); n];
        v[free] = RatOf::one();
        for &(row, col) in &pivots {
            v[col] = -mat[row][free].clone();
        }
        nullspace.push(v);
    }
    LinSolve::Solvable {
        particular,
        nullspace,
    }
}
