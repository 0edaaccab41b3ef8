//! Rational polyhedral cones with exact dual-cone computation via the double
//! description method, face enumeration, facet normals and relative-interior
//! tests. Cones containing lines are fully supported; the minimal face is
//! the lineality space.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lattice::Sublattice;
use crate::num::{dot, dot_rat, is_zero_vec, neg_vec, primitive, LatInt, RatOf};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConeError {
    #[error("the given cone is not a codimension-one face")]
    NotAFacet,
    #[error("ambient ranks differ")]
    AmbientMismatch,
}

/// A rational polyhedral cone, stored in canonical two-sided form:
/// primitive sorted extremal rays plus a saturated lineality lattice on the
/// generator side, primitive sorted facet normals plus the saturated
/// span-complement lattice on the inequality side.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalCone<T> {
    ambient_rank: usize,
    rays: Vec<Vec<T>>,
    lineality: Sublattice<T>,
    normals: Vec<Vec<T>>,
    span_complement: Sublattice<T>,
    dim: usize,
}

struct DdRay<T> {
    v: Vec<T>,
    tight: BTreeSet<usize>,
}

/// Double description: extremal rays and lineality basis of
/// `{x : <a, x> >= 0 for all a}`.
fn double_description<T: LatInt>(d: usize, halfspaces: &[Vec<T>]) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
    let mut lin: Vec<Vec<T>> = (0..d)
        .map(|i| {
            let mut e = vec![T::zero(); d];
            e[i] = T::one();
            e
        })
        .collect();
    let mut rays: Vec<DdRay<T>> = Vec::new();

    for (idx, a) in halfspaces.iter().enumerate() {
        if is_zero_vec(a) {
            for r in rays.iter_mut() {
                r.tight.insert(idx);
            }
            continue;
        }
        // Reduce the lineality against the new halfspace: one lineality
        // vector becomes a ray, the rest are projected into the hyperplane.
        if let Some(k) = lin.iter().position(|l| !dot(a, l).is_zero()) {
            let mut b = lin.remove(k);
            if dot(a, &b).is_negative() {
                b = neg_vec(&b);
            }
            let ab = dot(a, &b);
            for l in lin.iter_mut() {
                let al = dot(a, l);
                let proj: Vec<T> = (0..d)
                    .map(|j| ab.clone() * l[j].clone() - al.clone() * b[j].clone())
                    .collect();
                *l = primitive(&proj, true);
            }
            for r in rays.iter_mut() {
                let ar = dot(a, &r.v);
                let proj: Vec<T> = (0..d)
                    .map(|j| ab.clone() * r.v[j].clone() - ar.clone() * b[j].clone())
                    .collect();
                r.v = primitive(&proj, false);
            }
            rays.push(DdRay {
                v: primitive(&b, false),
                tight: (0..idx).collect(),
            });
        }

        let pairings: Vec<T> = rays.iter().map(|r| dot(a, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len())
            .filter(|&i| pairings[i].is_positive())
            .collect();
        let neg: Vec<usize> = (0..rays.len())
            .filter(|&i| pairings[i].is_negative())
            .collect();

        let mut new_rays: Vec<DdRay<T>> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common: BTreeSet<usize> = rays[p]
                    .tight
                    .intersection(&rays[n].tight)
                    .cloned()
                    .collect();
                // combinatorial adjacency: no third ray is tight on the
                // common set of the pair
                let adjacent =
                    (0..rays.len()).all(|i| i == p || i == n || !common.is_subset(&rays[i].tight));
                if !adjacent {
                    continue;
                }
                let ap = pairings[p].clone();
                let an = pairings[n].clone();
                let v: Vec<T> = (0..d)
                    .map(|j| ap.clone() * rays[n].v[j].clone() - an.clone() * rays[p].v[j].clone())
                    .collect();
                if is_zero_vec(&v) {
                    continue;
                }
                let mut tight = common;
                tight.insert(idx);
                new_rays.push(DdRay {
                    v: primitive(&v, false),
                    tight,
                });
            }
        }

        let mut kept: Vec<DdRay<T>> = Vec::new();
        for (i, r) in rays.into_iter().enumerate() {
            if pairings[i].is_negative() {
                continue;
            }
            let mut r = r;
            if pairings[i].is_zero() {
                r.tight.insert(idx);
            }
            kept.push(r);
        }
        for nr in new_rays {
            if !kept.iter().any(|r| r.v == nr.v) {
                kept.push(nr);
            }
        }
        rays = kept;
    }

    let mut out: Vec<Vec<T>> = rays
        .into_iter()
        .map(|r| r.v)
        .filter(|v| !is_zero_vec(v))
        .collect();
    out.sort();
    out.dedup();
    (out, lin)
}

impl<T: LatInt> RationalCone<T> {
    pub fn from_generators(ambient_rank: usize, rays: &[Vec<T>], lines: &[Vec<T>]) -> Self {
        let mut hs: Vec<Vec<T>> = rays.iter().filter(|v| !is_zero_vec(v)).cloned().collect();
        for l in lines.iter().filter(|v| !is_zero_vec(v)) {
            hs.push(l.clone());
            hs.push(neg_vec(l));
        }
        let (normals, span_comp_rows) = double_description(ambient_rank, &hs);
        let span_complement = Sublattice::from_rows(ambient_rank, span_comp_rows).saturate();
        Self::from_sides(ambient_rank, normals, span_complement)
    }

    pub fn from_inequalities(
        ambient_rank: usize,
        normals: &[Vec<T>],
        equations: &[Vec<T>],
    ) -> Self {
        let mut hs: Vec<Vec<T>> = normals
            .iter()
            .filter(|v| !is_zero_vec(v))
            .cloned()
            .collect();
        for e in equations.iter().filter(|v| !is_zero_vec(v)) {
            hs.push(e.clone());
            hs.push(neg_vec(e));
        }
        let (rays, lin_rows) = double_description(ambient_rank, &hs);
        let lineality = Sublattice::from_rows(ambient_rank, lin_rows).saturate();
        // recompute the inequality side canonically from the generator side
        let mut dual_hs: Vec<Vec<T>> = rays.clone();
        for l in lineality.basis_rows() {
            dual_hs.push(l.clone());
            dual_hs.push(neg_vec(&l));
        }
        let (normals, span_comp_rows) = double_description(ambient_rank, &dual_hs);
        let span_complement = Sublattice::from_rows(ambient_rank, span_comp_rows).saturate();
        let dim = ambient_rank - span_complement.rank();
        RationalCone {
            ambient_rank,
            rays,
            lineality,
            normals: sorted(normals),
            span_complement,
            dim,
        }
    }

    fn from_sides(
        ambient_rank: usize,
        normals: Vec<Vec<T>>,
        span_complement: Sublattice<T>,
    ) -> Self {
        let mut hs: Vec<Vec<T>> = normals.clone();
        for row in span_complement.basis_rows() {
            hs.push(row.clone());
            hs.push(neg_vec(&row));
        }
        let (rays, lin_rows) = double_description(ambient_rank, &hs);
        let lineality = Sublattice::from_rows(ambient_rank, lin_rows).saturate();
        let dim = ambient_rank - span_complement.rank();
        RationalCone {
            ambient_rank,
            rays: sorted(rays),
            lineality,
            normals: sorted(normals),
            span_complement,
            dim,
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Primitive extremal ray generators, sorted.
    pub fn rays(&self) -> &[Vec<T>] {
        &self.rays
    }

    /// The largest vector subspace contained in the cone, as a saturated
    /// lattice.
    pub fn lineality(&self) -> &Sublattice<T> {
        &self.lineality
    }

    /// Primitive supporting normals, sorted; the cone is the set they cut
    /// out of its linear span.
    pub fn normals(&self) -> &[Vec<T>] {
        &self.normals
    }

    /// Saturated lattice of integer functionals vanishing on the span.
    pub fn span_complement(&self) -> &Sublattice<T> {
        &self.span_complement
    }

    /// All generator rows: rays plus a basis of the lineality.
    pub fn generator_rows(&self) -> Vec<Vec<T>> {
        let mut out = self.rays.clone();
        out.extend(self.lineality.basis_rows());
        out
    }

    pub fn dual(&self) -> RationalCone<T> {
        RationalCone {
            ambient_rank: self.ambient_rank,
            rays: self.normals.clone(),
            lineality: self.span_complement.clone(),
            normals: self.rays.clone(),
            span_complement: self.lineality.clone(),
            dim: self.ambient_rank - self.lineality.rank(),
        }
    }

    pub fn is_zero_cone(&self) -> bool {
        self.dim == 0
    }

    pub fn contains_point(&self, p: &[T]) -> bool {
        self.span_complement
            .basis_rows()
            .iter()
            .all(|e| dot(e, p).is_zero())
            && self.normals.iter().all(|n| !dot(n, p).is_negative())
    }

    pub fn contains_rat(&self, p: &[RatOf<T>]) -> bool {
        self.span_complement
            .basis_rows()
            .iter()
            .all(|e| dot_rat(e, p).is_zero())
            && self.normals.iter().all(|n| !dot_rat(n, p).is_negative())
    }

    /// Relative interior: in the span, and strictly inside every facet.
    pub fn relint_contains_rat(&self, p: &[RatOf<T>]) -> bool {
        self.span_complement
            .basis_rows()
            .iter()
            .all(|e| dot_rat(e, p).is_zero())
            && self.normals.iter().all(|n| dot_rat(n, p).is_positive())
    }

    pub fn relint_contains_point(&self, p: &[T]) -> bool {
        self.span_complement
            .basis_rows()
            .iter()
            .all(|e| dot(e, p).is_zero())
            && self.normals.iter().all(|n| dot(n, p).is_positive())
    }

    pub fn contains_cone(&self, other: &RationalCone<T>) -> bool {
        other.rays.iter().all(|r| self.contains_point(r))
            && other
                .lineality
                .basis_rows()
                .iter()
                .all(|l| self.contains_point(&l) && self.contains_point(&neg_vec(&l)))
    }

    pub fn intersect(&self, other: &RationalCone<T>) -> RationalCone<T> {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        let mut normals = self.normals.clone();
        normals.extend(other.normals.clone());
        let mut eqs = self.span_complement.basis_rows();
        eqs.extend(other.span_complement.basis_rows());
        RationalCone::from_inequalities(self.ambient_rank, &normals, &eqs)
    }

    /// Identity key: sorted primitive extremal rays plus the HNF lineality
    /// basis.
    pub fn canonical_key(&self) -> (Vec<Vec<T>>, Vec<Vec<T>>) {
        (self.rays.clone(), self.lineality.basis_rows())
    }

    /// Enumerates all faces, as the closure of the extremal-ray subsets
    /// under intersection with facet hyperplanes.
    pub fn faces(&self) -> FacePoset<T> {
        let all: BTreeSet<usize> = (0..self.rays.len()).collect();
        let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        sets.insert(all.clone());
        let mut queue: Vec<BTreeSet<usize>> = vec![all];
        while let Some(s) = queue.pop() {
            for n in &self.normals {
                let cut: BTreeSet<usize> = s
                    .iter()
                    .cloned()
                    .filter(|&i| dot(n, &self.rays[i]).is_zero())
                    .collect();
                if sets.insert(cut.clone()) {
                    queue.push(cut);
                }
            }
        }
        let lin_rows = self.lineality.basis_rows();
        let mut faces: Vec<(BTreeSet<usize>, RationalCone<T>)> = sets
            .into_iter()
            .map(|s| {
                let rays: Vec<Vec<T>> = s.iter().map(|&i| self.rays[i].clone()).collect();
                let cone = RationalCone::from_generators(self.ambient_rank, &rays, &lin_rows);
                (s, cone)
            })
            .collect();
        faces.sort_by(|a, b| (a.1.dim, a.1.canonical_key()).cmp(&(b.1.dim, b.1.canonical_key())));
        FacePoset {
            parent_dim: self.dim,
            faces,
        }
    }

    /// The unique primitive normal (among this cone's facet normals) cutting
    /// out the given codimension-one face.
    pub fn facet_normal(&self, face: &RationalCone<T>) -> Result<Vec<T>, ConeError> {
        if face.ambient_rank != self.ambient_rank {
            return Err(ConeError::AmbientMismatch);
        }
        if face.dim + 1 != self.dim || !self.contains_cone(face) {
            return Err(ConeError::NotAFacet);
        }
        let gens = face.generator_rows();
        let mut found = None;
        for n in &self.normals {
            if gens.iter().all(|g| dot(n, g).is_zero()) {
                if found.is_some() {
                    return Err(ConeError::NotAFacet);
                }
                found = Some(n.clone());
            }
        }
        found.ok_or(ConeError::NotAFacet)
    }
}

fn sorted<T: Ord>(mut v: Vec<T>) -> Vec<T> {
    v.sort();
    v
}

impl<T: LatInt> std::fmt::Debug for RationalCone<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Cone(d={}, dim={}, rays={:?}, lin_rank={})",
            self.ambient_rank,
            self.dim,
            self.rays,
            self.lineality.rank()
        )
    }
}

/// All faces of a cone, sorted by dimension then canonical key.
pub struct FacePoset<T> {
    parent_dim: usize,
    faces: Vec<(BTreeSet<usize>, RationalCone<T>)>,
}

impl<T: LatInt> FacePoset<T> {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn face(&self, i: usize) -> &RationalCone<T> {
        &self.faces[i].1
    }

    pub fn iter(&self) -> impl Iterator<Item = &RationalCone<T>> {
        self.faces.iter().map(|(_, c)| c)
    }

    pub fn codim(&self, i: usize) -> usize {
        self.parent_dim - self.faces[i].1.dim()
    }

    /// Containment as faces: ray-set inclusion.
    pub fn face_contains(&self, i: usize, j: usize) -> bool {
        self.faces[j].0.is_subset(&self.faces[i].0)
    }

    pub fn relation(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.faces.len() {
            for j in 0..self.faces.len() {
                if i != j && self.face_contains(i, j) {
                    out.push((j, i)); // (smaller, larger)
                }
            }
        }
        out
    }

    /// The unique face containing `p` in its relative interior, or None when
    /// `p` is outside the parent cone.
    pub fn face_of_relint(&self, p: &[RatOf<T>]) -> Option<&RationalCone<T>> {
        self.faces
            .iter()
            .map(|(_, c)| c)
            .find(|c| c.relint_contains_rat(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use num_bigint::BigInt;

    type C = RationalCone<BigInt>;

    fn v2(x: i32, y: i32) -> Vec<BigInt> {
        vec![x.into(), y.into()]
    }

    fn orthant(d: usize) -> C {
        let rays: Vec<Vec<BigInt>> = (0..d)
            .map(|i| {
                let mut e = vec![BigInt::zero(); d];
                e[i] = 1.into();
                e
            })
            .collect();
        C::from_generators(d, &rays, &[])
    }

    #[test]
    fn orthant_self_dual() {
        let c = orthant(2);
        assert_eq!(c.dual(), c);
    }

    #[test]
    fn cusp_dual_hand_check() {
        let c = C::from_generators(2, &[v2(1, 0), v2(1, 2)], &[]);
        let d = c.dual();
        assert_eq!(d.rays(), &[v2(0, 1), v2(2, -1)]);
        // oracle straight from the definition: a grid point is in the dual
        // iff it pairs nonnegatively with both generators
        for x in -5..=5 {
            for y in -5..=5 {
                let p = v2(x, y);
                let by_def =
                    dot(&p, &v2(1, 0)) >= BigInt::zero() && dot(&p, &v2(1, 2)) >= BigInt::zero();
                assert_eq!(d.contains_point(&p), by_def, "at ({x},{y})");
            }
        }
        assert_eq!(d.dual(), c);
    }

    #[test]
    fn full_plane_dual_is_zero() {
        let c = C::from_generators(2, &[], &[v2(1, 0), v2(0, 1)]);
        let d = c.dual();
        assert!(d.is_zero_cone());
        assert_eq!(d.rays().len(), 0);
    }

    #[test]
    fn orthant_face_counts() {
        for d in 1..=5usize {
            let poset = orthant(d).faces();
            assert_eq!(poset.len(), 1usize << d, "2^d faces in dim {d}");
            for k in 0..=d {
                let count = (0..poset.len()).filter(|&i| poset.codim(i) == k).count();
                assert_eq!(
                    count,
                    binomial(d, k),
                    "C(d,k) faces of codim {k} in dim {d}"
                );
            }
        }
    }

    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn cusp_faces_and_normals() {
        let c = C::from_generators(2, &[v2(1, 0), v2(1, 2)], &[]);
        let poset = c.faces();
        assert_eq!(poset.len(), 4);
        let ray1 = C::from_generators(2, &[v2(1, 0)], &[]);
        let ray2 = C::from_generators(2, &[v2(1, 2)], &[]);
        assert_eq!(c.facet_normal(&ray1).unwrap(), v2(0, 1));
        assert_eq!(c.facet_normal(&ray2).unwrap(), v2(2, -1));
        let origin = C::from_generators(2, &[], &[]);
        assert_eq!(c.facet_normal(&origin), Err(ConeError::NotAFacet));
    }

    #[test]
    fn half_plane_lineality() {
        // {x >= 0} in Q^2
        let c = C::from_inequalities(2, &[v2(1, 0)], &[]);
        assert_eq!(c.dim(), 2);
        assert_eq!(c.lineality().rank(), 1);
        assert!(c.lineality().contains(&v2(0, 1)));
        let poset = c.faces();
        assert_eq!(poset.len(), 2); // the half-plane and the y-axis line
        let y_axis = C::from_generators(2, &[], &[v2(0, 1)]);
        assert_eq!(c.facet_normal(&y_axis).unwrap(), v2(1, 0));
    }

    #[test]
    fn relint_tests() {
        let c = orthant(2);
        assert!(c.relint_contains_rat(&[rat::<BigInt>(1, 1), rat(1, 1)]));
        assert!(!c.relint_contains_rat(&[rat::<BigInt>(1, 1), rat(0, 1)]));
        let cusp = C::from_generators(2, &[v2(1, 0), v2(1, 2)], &[]);
        assert!(cusp.relint_contains_rat(&[rat::<BigInt>(1, 1), rat(1, 1)]));
    }

    #[test]
    fn face_of_relint_examples() {
        let c = orthant(2);
        let poset = c.faces();
        let zero = [rat::<BigInt>(0, 1), rat(0, 1)];
        let f = poset.face_of_relint(&zero).unwrap();
        assert_eq!(f.dim(), 0);
        let x3 = [rat::<BigInt>(3, 1), rat(0, 1)];
        let f = poset.face_of_relint(&x3).unwrap();
        assert_eq!(f.rays(), &[v2(1, 0)]);
        let outside = [rat::<BigInt>(-1, 1), rat(0, 1)];
        assert!(poset.face_of_relint(&outside).is_none());
        let cusp = C::from_generators(2, &[v2(1, 0), v2(1, 2)], &[]);
        let inside = [rat::<BigInt>(1, 1), rat(1, 1)];
        let f = cusp.faces();
        assert_eq!(f.face_of_relint(&inside).unwrap().dim(), 2);
    }

    #[test]
    fn facet_normal_pairs_positive_somewhere() {
        let c = C::from_generators(3, &[v2_3(1, 0, 0), v2_3(0, 1, 0), v2_3(1, 1, 2)], &[]);
        let poset = c.faces();
        for i in 0..poset.len() {
            if poset.codim(i) != 1 {
                continue;
            }
            let f = poset.face(i);
            let n = c.facet_normal(f).unwrap();
            assert!(f.generator_rows().iter().all(|g| dot(&n, g).is_zero()));
            assert!(c.rays().iter().any(|r| dot(&n, r).is_positive()));
        }
    }

    fn v2_3(x: i32, y: i32, z: i32) -> Vec<BigInt> {
        vec![x.into(), y.into(), z.into()]
    }
}
