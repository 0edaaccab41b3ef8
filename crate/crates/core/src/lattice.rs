//! Sublattices of the ambient lattice Z^d in canonical Hermite normal form:
//! membership, indices, intersections, saturation, orientation signs and
//! constrained integral solving.

use thiserror::Error;

use crate::mat::{hnf, hnf_basis, left_kernel, solve_against_hnf, solve_in_row_span, Mat};
use crate::num::{LatInt, RatOf};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("inner lattice is not contained in the outer lattice")]
    ContainmentViolation,
    #[error("ordered bases span different sublattices")]
    SpanMismatch,
    #[error("ambient ranks differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
}

/// A finite-rank subgroup of Z^d. The basis is kept in row Hermite normal
/// form, so two values represent the same subgroup iff they are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Sublattice<T> {
    ambient_rank: usize,
    basis: Mat<T>,
}

impl<T: LatInt> Sublattice<T> {
    pub fn from_rows(ambient_rank: usize, rows: Vec<Vec<T>>) -> Self {
        let m = Mat::from_rows(ambient_rank, rows);
        Sublattice {
            ambient_rank,
            basis: hnf_basis(&m),
        }
    }

    pub fn from_i32(ambient_rank: usize, rows: &[&[i32]]) -> Self {
        Sublattice::from_rows(
            ambient_rank,
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from(x)).collect())
                .collect(),
        )
    }

    pub fn full(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            basis: Mat::identity(ambient_rank),
        }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            basis: Mat::zero(0, ambient_rank),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    /// Canonical HNF basis, rows = basis vectors.
    pub fn basis(&self) -> &Mat<T> {
        &self.basis
    }

    pub fn basis_rows(&self) -> Vec<Vec<T>> {
        self.basis.row_vecs()
    }

    pub fn is_full(&self) -> bool {
        self.basis == Mat::identity(self.ambient_rank)
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.coords_of(v).is_some()
    }

    /// Integer coordinates of `v` in the canonical basis, if `v` lies in the
    /// lattice. Back-substitution against the HNF basis.
    pub fn coords_of(&self, v: &[T]) -> Option<Vec<T>> {
        assert_eq!(v.len(), self.ambient_rank);
        let pivots: Vec<usize> = (0..self.basis.rows())
            .map(|i| {
                (0..self.ambient_rank)
                    .find(|&j| !self.basis[(i, j)].is_zero())
                    .unwrap()
            })
            .collect();
        solve_against_hnf(&self.basis, &pivots, v)
    }

    /// Rational coordinates of `v` in the basis when `v` lies in the span.
    pub fn rational_coords_of(&self, v: &[RatOf<T>]) -> Option<Vec<RatOf<T>>> {
        solve_in_row_span(&self.basis, v)
    }

    pub fn contains_lattice(&self, other: &Sublattice<T>) -> bool {
        (0..other.basis.rows()).all(|i| self.contains(other.basis.row(i)))
    }

    pub fn in_span(&self, v: &[RatOf<T>]) -> bool {
        self.rational_coords_of(v).is_some()
    }

    /// Sum (join) of two sublattices.
    pub fn sum(&self, other: &Sublattice<T>) -> Sublattice<T> {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        let mut rows = self.basis.row_vecs();
        rows.extend(other.basis.row_vecs());
        Sublattice::from_rows(self.ambient_rank, rows)
    }

    /// Saturation: all integer points of the rational span. Computed by a
    /// double integer kernel, both of which are saturated by construction.
    pub fn saturate(&self) -> Sublattice<T> {
        let orth = left_kernel(&self.basis.transpose());
        let sat = left_kernel(&orth.transpose());
        Sublattice {
            ambient_rank: self.ambient_rank,
            basis: hnf_basis(&sat),
        }
    }

}

impl<T: std::fmt::Debug> std::fmt::Debug for Sublattice<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Sublattice(d={}, basis={:?})",
            self.ambient_rank, self.basis
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Index<T> {
    Finite(T),
    Infinite,
}

/// Index `[outer : inner]`, infinite exactly when the ranks differ.
pub fn sublattice_index<T: LatInt>(
    inner: &Sublattice<T>,
    outer: &Sublattice<T>,
) -> Result<Index<T>, LatticeError> {
    if inner.ambient_rank() != outer.ambient_rank() {
        return Err(LatticeError::AmbientMismatch(
            inner.ambient_rank(),
            outer.ambient_rank(),
        ));
    }
    let mut coords = Vec::new();
    for row in inner.basis_rows() {
        match outer.coords_of(&row) {
            Some(c) => coords.push(c),
            None => return Err(LatticeError::ContainmentViolation),
        }
    }
    if inner.rank() < outer.rank() {
        return Ok(Index::Infinite);
    }
    let c = Mat::from_rows(outer.rank(), coords);
    Ok(Index::Finite(c.det().abs()))
}

/// Set-theoretic intersection of two sublattices, in canonical form.
///
/// A vector lies in both lattices iff it is `x * A` for an integer row
/// vector `(x, -y)` in the left kernel of the stacked matrix `[A; B]`.
pub fn lattice_intersect<T: LatInt>(a: &Sublattice<T>, b: &Sublattice<T>) -> Sublattice<T> {
    assert_eq!(a.ambient_rank(), b.ambient_rank());
    let d = a.ambient_rank();
    let mut rows = a.basis_rows();
    rows.extend(b.basis_rows());
    if rows.is_empty() {
        return Sublattice::zero(d);
    }
    let stacked = Mat::from_rows(d, rows);
    let kernel = left_kernel(&stacked);
    let na = a.rank();
    let gens: Vec<Vec<T>> = (0..kernel.rows())
        .map(|i| {
            let x = &kernel.row(i)[..na];
            a.basis().vec_mul(x)
        })
        .collect();
    Sublattice::from_rows(d, gens)
}

/// An ordered basis of a sublattice; the order fixes an orientation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrientedBasis<T> {
    rows: Mat<T>,
}

impl<T: LatInt> OrientedBasis<T> {
    pub fn new(ambient_rank: usize, rows: Vec<Vec<T>>) -> Self {
        let m = Mat::from_rows(ambient_rank, rows);
        let h = hnf(&m);
        assert_eq!(
            h.pivots.len(),
            m.rows(),
            "ordered basis rows must be independent"
        );
        OrientedBasis { rows: m }
    }

    /// The canonical orientation of a sublattice: its HNF basis in row order.
    pub fn canonical(lat: &Sublattice<T>) -> Self {
        OrientedBasis {
            rows: lat.basis().clone(),
        }
    }

    pub fn sublattice(&self) -> Sublattice<T> {
        Sublattice::from_rows(self.rows.cols(), self.rows.row_vecs())
    }

    pub fn rows(&self) -> &Mat<T> {
        &self.rows
    }

    /// Orientation with two basis vectors swapped.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut rows = self.rows.row_vecs();
        rows.swap(i, j);
        OrientedBasis {
            rows: Mat::from_rows(self.rows.cols(), rows),
        }
    }
}

/// Sign of the determinant of the change of basis `b1 = C * b2`.
pub fn orientation_sign<T: LatInt>(
    b1: &OrientedBasis<T>,
    b2: &OrientedBasis<T>,
) -> Result<i8, LatticeError> {
    let l1 = b1.sublattice();
    let l2 = b2.sublattice();
    if l1 != l2 {
        return Err(LatticeError::SpanMismatch);
    }
    let mut coords = Vec::new();
    for row in b1.rows().row_vecs() {
        coords.push(l2_coords(&l2, b2, &row));
    }
    let c = Mat::from_rows(b2.rows().rows(), coords);
    let det = c.det();
    debug_assert!(det.abs().is_one(), "change of basis must be unimodular");
    Ok(if det.is_negative() { -1 } else { 1 })
}

fn l2_coords<T: LatInt>(lat: &Sublattice<T>, basis: &OrientedBasis<T>, v: &[T]) -> Vec<T> {
    // coords of v against the (not necessarily HNF) ordered basis: go through
    // the canonical basis first.
    let in_canon = lat.coords_of(v).expect("vector must lie in the lattice");
    // canonical = M * ordered, so v = in_canon * canonical = in_canon * M * ordered
    let mut m_rows = Vec::new();
    for row in lat.basis().row_vecs() {
        // solve row = x * ordered over the integers
        let h = hnf(basis.rows());
        let z = solve_against_hnf(&h.h, &h.pivots, &row).expect("same lattice");
        let x = h.u.transpose().mul_vec(&z);
        m_rows.push(x);
    }
    let m = Mat::from_rows(basis.rows().rows(), m_rows);
    m.vec_mul(&in_canon)
}

/// Finds some `m` in the sublattice `l` with `a * m = c`, or certifies none
/// exists, by solving `y * (basis * a^T) = c` over the integers via HNF.
pub fn solve_integral<T: LatInt>(a: &Mat<T>, c: &[T], l: &Sublattice<T>) -> Option<Vec<T>> {
    assert_eq!(a.cols(), l.ambient_rank());
    assert_eq!(a.rows(), c.len());
    let m = l.basis().mul(&a.transpose());
    let res = hnf(&m);
    let z = solve_against_hnf(&res.h, &res.pivots, c)?;
    // y = z * u, padded with zeros past the rank
    let y = res.u.transpose().mul_vec(&z);
    Some(l.basis().vec_mul(&y))
}

impl<T: LatInt> Sublattice<T> {
    /// Lattice index in the saturation, i.e. the degree of the normalization
    /// map it encodes. One exactly when the lattice is saturated.
    pub fn index_in_saturation(&self) -> T {
        match sublattice_index(self, &self.saturate()) {
            Ok(Index::Finite(n)) => n,
            _ => unreachable!("a lattice has full rank in its saturation"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};

    type L = Sublattice<BigInt>;

    #[test]
    fn index_identity_and_scaling() {
        let z = L::full(1);
        assert_eq!(sublattice_index(&z, &z), Ok(Index::Finite(BigInt::one())));
        let two = L::from_i32(1, &[&[2]]);
        assert_eq!(
            sublattice_index(&two, &z),
            Ok(Index::Finite(BigInt::from(2)))
        );
    }

    // Oracle: count cosets by enumerating residues in a fundamental box.
    fn coset_count(inner: &[[i64; 2]; 2], bound: i64) -> usize {
        let inl = Sublattice::<i64>::from_rows(2, inner.iter().map(|r| r.to_vec()).collect());
        let mut reps: Vec<Vec<i64>> = Vec::new();
        for x in 0..bound {
            for y in 0..bound {
                let p = vec![x, y];
                if !reps.iter().any(|r| {
                    let diff = vec![p[0] - r[0], p[1] - r[1]];
                    inl.contains(&diff)
                }) {
                    reps.push(p);
                }
            }
        }
        reps.len()
    }

    #[test]
    fn index_checkerboard() {
        let inner = L::from_i32(2, &[&[1, 1], &[1, -1]]);
        let outer = L::full(2);
        assert_eq!(
            sublattice_index(&inner, &outer),
            Ok(Index::Finite(BigInt::from(2)))
        );
        assert_eq!(coset_count(&[[1, 1], [1, -1]], 4), 2);
    }

    #[test]
    fn index_infinite_and_violation() {
        let ray = L::from_i32(2, &[&[1, 0]]);
        let outer = L::full(2);
        assert_eq!(sublattice_index(&ray, &outer), Ok(Index::Infinite));
        let odd = L::from_i32(2, &[&[1, 0], &[0, 3]]);
        let shifted = L::from_i32(2, &[&[2, 1]]);
        assert_eq!(
            sublattice_index(&shifted, &odd),
            Err(LatticeError::ContainmentViolation)
        );
    }

    #[test]
    fn intersect_examples() {
        let z2 = L::full(2);
        assert_eq!(lattice_intersect(&z2, &z2), z2);

        let a = L::from_i32(2, &[&[2, 0], &[0, 1]]);
        let b = L::from_i32(2, &[&[1, 0], &[0, 2]]);
        let c = lattice_intersect(&a, &b);
        assert_eq!(c, L::from_i32(2, &[&[2, 0], &[0, 2]]));
        // oracle: enumerate lattice points of both in a box
        let al = Sublattice::<i64>::from_rows(2, vec![vec![2, 0], vec![0, 1]]);
        let bl = Sublattice::<i64>::from_rows(2, vec![vec![1, 0], vec![0, 2]]);
        let cl = Sublattice::<i64>::from_rows(2, vec![vec![2, 0], vec![0, 2]]);
        for x in -4..=4i64 {
            for y in -4..=4i64 {
                let p = vec![x, y];
                assert_eq!(al.contains(&p) && bl.contains(&p), cl.contains(&p));
            }
        }

        let d1 = L::from_i32(2, &[&[1, 1]]);
        let d2 = L::from_i32(2, &[&[1, -1]]);
        assert_eq!(lattice_intersect(&d1, &d2), L::zero(2));
    }

    #[test]
    fn orientation_examples() {
        let z2 = L::full(2);
        let std = OrientedBasis::canonical(&z2);
        assert_eq!(orientation_sign(&std, &std), Ok(1));
        assert_eq!(orientation_sign(&std.swapped(0, 1), &std), Ok(-1));
        let sheared = OrientedBasis::new(
            2,
            vec![
                vec![BigInt::one(), BigInt::zero()],
                vec![BigInt::one(), BigInt::one()],
            ],
        );
        assert_eq!(orientation_sign(&sheared, &std), Ok(1));
    }

    #[test]
    fn orientation_cocycle() {
        let l = L::from_i32(2, &[&[2, 1], &[0, 3]]);
        let b1 = OrientedBasis::canonical(&l);
        let b2 = b1.swapped(0, 1);
        let b3 = OrientedBasis::new(
            2,
            vec![
                {
                    let r = b1.rows().row(0);
                    vec![
                        r[0].clone() + BigInt::from(3) * b1.rows()[(1, 0)].clone(),
                        r[1].clone() + BigInt::from(3) * b1.rows()[(1, 1)].clone(),
                    ]
                },
                b1.rows().row(1).to_vec(),
            ],
        );
        let s12 = orientation_sign(&b1, &b2).unwrap();
        let s23 = orientation_sign(&b2, &b3).unwrap();
        let s13 = orientation_sign(&b1, &b3).unwrap();
        assert_eq!(s12 * s23, s13);
    }

    #[test]
    fn solve_integral_examples() {
        let a = Mat::<BigInt>::identity(2);
        let c = vec![BigInt::zero(), BigInt::zero()];
        assert_eq!(
            solve_integral(&a, &c, &L::full(2)),
            Some(vec![BigInt::zero(), BigInt::zero()])
        );

        let a = Mat::<BigInt>::from_i32(2, &[&[0, 1], &[2, -1]]);
        let c = vec![BigInt::one(), BigInt::one()];
        let m = solve_integral(&a, &c, &L::full(2)).expect("solvable");
        assert_eq!(a.mul_vec(&m), c);
        assert_eq!(m, vec![BigInt::one(), BigInt::one()]);

        let a = Mat::<BigInt>::from_i32(1, &[&[2]]);
        let c = vec![BigInt::one()];
        assert_eq!(solve_integral(&a, &c, &L::full(1)), None);
    }

    #[test]
    fn saturation() {
        let l = L::from_i32(2, &[&[2, 4]]);
        assert_eq!(l.saturate(), L::from_i32(2, &[&[1, 2]]));
        assert_eq!(l.index_in_saturation(), BigInt::from(2));
    }
}
