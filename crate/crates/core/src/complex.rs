//! Monoidal complexes: an ambient lattice, a fan of rational cones closed
//! under faces and intersections, and compatible semigroup data per cone.
//! Two encodings are supported: generator lists per maximal cone, and the
//! lattice-family encoding (one finite-index sublattice per cone), which
//! describes exactly the seminormal complexes.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::lattice::lattice_intersect;
use crate::num::{dot, is_zero_vec};
use crate::{Cone, Int, Lattice, Rat};

/// Canonical identity of a fan cone: its sorted primitive extremal rays and
/// the HNF basis of its lineality space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConeId {
    rays: Vec<Vec<Int>>,
    lin: Vec<Vec<Int>>,
}

impl ConeId {
    pub fn of(cone: &Cone) -> ConeId {
        let (rays, lin) = cone.canonical_key();
        ConeId { rays, lin }
    }
}

impl fmt::Display for ConeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn fmt_vec(v: &[Int]) -> String {
            let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("({})", inner.join(","))
        }
        if self.rays.is_empty() && self.lin.is_empty() {
            return write!(f, "0");
        }
        let rays: Vec<String> = self.rays.iter().map(|r| fmt_vec(r)).collect();
        write!(f, "{}", rays.join(""))?;
        if !self.lin.is_empty() {
            let lin: Vec<String> = self.lin.iter().map(|r| fmt_vec(r)).collect();
            write!(f, "+lin{}", lin.join(""))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ConeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A fan: all cones keyed by canonical id, with the maximal ones marked and
/// per-cone facet membership derived.
#[derive(Clone)]
pub struct Fan {
    ambient_rank: usize,
    cones: BTreeMap<ConeId, Cone>,
    maximal: Vec<ConeId>,
    in_facets: BTreeMap<ConeId, Vec<ConeId>>,
}

impl Fan {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn cone(&self, id: &ConeId) -> &Cone {
        &self.cones[id]
    }

    pub fn get(&self, id: &ConeId) -> Option<&Cone> {
        self.cones.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &ConeId> {
        self.cones.keys()
    }

    pub fn len(&self) -> usize {
        self.cones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }

    pub fn maximal(&self) -> &[ConeId] {
        &self.maximal
    }

    pub fn is_maximal(&self, id: &ConeId) -> bool {
        self.maximal.contains(id)
    }

    /// Facets (maximal cones) containing the given cone.
    pub fn facets_containing(&self, id: &ConeId) -> &[ConeId] {
        &self.in_facets[id]
    }

    /// All fan cones contained in the given cone (its faces).
    pub fn faces_of(&self, id: &ConeId) -> Vec<ConeId> {
        let c = self.cone(id);
        self.cones
            .iter()
            .filter(|(_, k)| c.contains_cone(k))
            .map(|(i, _)| i.clone())
            .collect()
    }

    /// Faces of `outer` of dimension one less.
    pub fn covered_faces(&self, outer: &ConeId) -> Vec<ConeId> {
        let dim = self.cone(outer).dim();
        self.faces_of(outer)
            .into_iter()
            .filter(|id| self.cone(id).dim() + 1 == dim)
            .collect()
    }

    /// Minimal fan cones strictly containing the given cone.
    pub fn covers(&self, id: &ConeId) -> Vec<ConeId> {
        let c = self.cone(id);
        let strict: Vec<ConeId> = self
            .cones
            .iter()
            .filter(|(i, k)| *i != id && k.contains_cone(c))
            .map(|(i, _)| i.clone())
            .collect();
        strict
            .iter()
            .filter(|i| {
                !strict
                    .iter()
                    .any(|j| *j != **i && self.cone(i).contains_cone(self.cone(j)))
            })
            .cloned()
            .collect()
    }

    /// Cones of codimension one: non-maximal, of dimension one less than
    /// every facet containing them.
    pub fn codim_one_cones(&self) -> Vec<ConeId> {
        self.cones
            .keys()
            .filter(|id| {
                !self.is_maximal(id) && {
                    let d = self.cone(id).dim();
                    let fs = self.facets_containing(id);
                    !fs.is_empty() && fs.iter().all(|f| self.cone(f).dim() == d + 1)
                }
            })
            .cloned()
            .collect()
    }

    /// Pairs (tau, facet) with tau a face of the facet of codimension one.
    pub fn codim1_pairs(&self) -> Vec<(ConeId, ConeId)> {
        let mut out = Vec::new();
        for f in &self.maximal {
            let dim = self.cone(f).dim();
            for id in self.faces_of(f) {
                if self.cone(&id).dim() + 1 == dim {
                    out.push((id, f.clone()));
                }
            }
        }
        out.sort();
        out
    }

    /// The unique fan cone containing the rational point in its relative
    /// interior, if the point lies in the support of the fan.
    pub fn cone_of_relint(&self, p: &[Rat]) -> Option<ConeId> {
        self.cones
            .iter()
            .find(|(_, c)| c.relint_contains_rat(p))
            .map(|(id, _)| id.clone())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Violation {
    #[error("characteristic {0} is neither zero nor prime")]
    BadCharacteristic(u64),
    #[error("the fan has no maximal cones")]
    EmptyFan,
    #[error("generator has wrong ambient rank")]
    RankMismatch,
    #[error("maximal cone {0} is contained in maximal cone {1}")]
    MaximalContained(ConeId, ConeId),
    #[error("cones {0} and {1} intersect in {2}, which is not a common face")]
    FanIntersectionViolation(ConeId, ConeId, ConeId),
    #[error("semigroup generator {1:?} lies outside its cone {0}")]
    GeneratorOutsideCone(ConeId, Vec<Int>),
    #[error("semigroup generators of {0} do not generate it as a cone")]
    GeneratorsDontSpan(ConeId),
    #[error("semigroups of facets {1} and {2} restrict differently to {0}: witness {3:?}")]
    SemigroupMismatch(ConeId, ConeId, ConeId, Vec<Int>),
    #[error("lattice entry references {0}, which is not a fan cone")]
    UnknownCone(String),
    #[error("lattice of {0} does not lie in the span of the cone")]
    LatticeNotInSpan(ConeId),
    #[error("lattice of {0} does not have full rank in the span of the cone")]
    LatticeRankMismatch(ConeId),
    #[error("lattice of face {0} is not contained in the lattice of {1}")]
    CompatibilityViolation(ConeId, ConeId),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimplicialError {
    #[error("facet {0:?} repeats a vertex")]
    NotSimplicial(Vec<usize>),
    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
}

/// Raw description of a complex, before validation.
pub struct ComplexSpec {
    pub ambient_rank: usize,
    pub characteristic: u64,
    /// (rays, lines) per maximal cone
    pub maximal_cones: Vec<(Vec<Vec<Int>>, Vec<Vec<Int>>)>,
    pub data: SpecData,
}

pub enum SpecData {
    /// Generator lists, parallel to `maximal_cones`.
    Generators(Vec<Vec<Vec<Int>>>),
    /// Lattice-family entries: (cone rays, cone lines, basis rows). Cones of
    /// the fan without an entry default to the intersection of the lattices
    /// of their covers (facets default to the saturated span lattice).
    LatticeFamily(Vec<(Vec<Vec<Int>>, Vec<Vec<Int>>, Vec<Vec<Int>>)>),
}

#[derive(Clone)]
pub enum SemigroupData {
    /// Generators per maximal cone.
    Generators(BTreeMap<ConeId, Vec<Vec<Int>>>),
    /// One finite-index sublattice per fan cone.
    LatticeFamily(BTreeMap<ConeId, Lattice>),
}

impl fmt::Debug for MonoidalComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "MonoidalComplex(d={}, char={}, cones={}, facets={})",
            self.ambient_rank,
            self.characteristic,
            self.fan.len(),
            self.fan.maximal().len()
        )
    }
}

#[derive(Clone)]
pub struct MonoidalComplex {
    ambient_rank: usize,
    characteristic: u64,
    fan: Fan,
    data: SemigroupData,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn validate(spec: ComplexSpec) -> Result<MonoidalComplex, Vec<Violation>> {
    let mut violations = Vec::new();
    let d = spec.ambient_rank;
    if spec.characteristic != 0 && !is_prime(spec.characteristic) {
        violations.push(Violation::BadCharacteristic(spec.characteristic));
    }
    if spec.maximal_cones.is_empty() {
        violations.push(Violation::EmptyFan);
        return Err(violations);
    }
    for (rays, lines) in &spec.maximal_cones {
        if rays.iter().chain(lines).any(|v| v.len() != d) {
            violations.push(Violation::RankMismatch);
            return Err(violations);
        }
    }

    let max_cones: Vec<Cone> = spec
        .maximal_cones
        .iter()
        .map(|(rays, lines)| Cone::from_generators(d, rays, lines))
        .collect();
    let mut maximal: Vec<ConeId> = Vec::new();
    for c in &max_cones {
        let id = ConeId::of(c);
        if !maximal.contains(&id) {
            maximal.push(id);
        }
    }
    maximal.sort();
    let max_by_id: BTreeMap<ConeId, Cone> = max_cones
        .iter()
        .map(|c| (ConeId::of(c), c.clone()))
        .collect();

    for i in &maximal {
        for j in &maximal {
            if i != j && max_by_id[j].contains_cone(&max_by_id[i]) {
                violations.push(Violation::MaximalContained(i.clone(), j.clone()));
            }
        }
    }

    // face closure
    let mut cones: BTreeMap<ConeId, Cone> = BTreeMap::new();
    let mut face_ids: BTreeMap<ConeId, BTreeSet<ConeId>> = BTreeMap::new();
    for id in &maximal {
        let poset = max_by_id[id].faces();
        let mut ids = BTreeSet::new();
        for f in poset.iter() {
            let fid = ConeId::of(f);
            ids.insert(fid.clone());
            cones.entry(fid).or_insert_with(|| f.clone());
        }
        face_ids.insert(id.clone(), ids);
    }

    // pairwise intersections must be common faces
    for (a, ia) in maximal.iter().enumerate() {
        for ib in maximal.iter().skip(a + 1) {
            let inter = max_by_id[ia].intersect(&max_by_id[ib]);
            let iid = ConeId::of(&inter);
            if !face_ids[ia].contains(&iid) || !face_ids[ib].contains(&iid) {
                violations.push(Violation::FanIntersectionViolation(
                    ia.clone(),
                    ib.clone(),
                    iid,
                ));
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }

    let mut in_facets: BTreeMap<ConeId, Vec<ConeId>> = BTreeMap::new();
    for id in cones.keys() {
        let c = &cones[id];
        let fs: Vec<ConeId> = maximal
            .iter()
            .filter(|f| max_by_id[*f].contains_cone(c))
            .cloned()
            .collect();
        in_facets.insert(id.clone(), fs);
    }

    let fan = Fan {
        ambient_rank: d,
        cones,
        maximal,
        in_facets,
    };

    let data = match spec.data {
        SpecData::Generators(lists) => {
            let mut map: BTreeMap<ConeId, Vec<Vec<Int>>> = BTreeMap::new();
            for ((rays, lines), gens) in spec.maximal_cones.iter().zip(lists) {
                let cone = Cone::from_generators(d, rays, lines);
                let id = ConeId::of(&cone);
                for g in &gens {
                    if g.len() != d {
                        violations.push(Violation::RankMismatch);
                        continue;
                    }
                    if !cone.contains_point(g) {
                        violations.push(Violation::GeneratorOutsideCone(id.clone(), g.clone()));
                    }
                }
                if violations.is_empty() && Cone::from_generators(d, &gens, &[]) != cone {
                    violations.push(Violation::GeneratorsDontSpan(id.clone()));
                }
                map.insert(id, gens);
            }
            if violations.is_empty() {
                // restrictions to shared faces must agree
                for id in fan.ids() {
                    let facets = fan.facets_containing(id);
                    if facets.len() < 2 {
                        continue;
                    }
                    let cone = fan.cone(id);
                    for pair in facets.windows(2) {
                        let g1 = restrict_gens(&map[&pair[0]], cone);
                        let g2 = restrict_gens(&map[&pair[1]], cone);
                        let mismatch = g1
                            .iter()
                            .find(|g| !semigroup_member(&g2, g))
                            .or_else(|| g2.iter().find(|g| !semigroup_member(&g1, g)));
                        if let Some(w) = mismatch {
                            violations.push(Violation::SemigroupMismatch(
                                id.clone(),
                                pair[0].clone(),
                                pair[1].clone(),
                                w.clone(),
                            ));
                        }
                    }
                }
            }
            SemigroupData::Generators(map)
        }
        SpecData::LatticeFamily(entries) => {
            let mut map: BTreeMap<ConeId, Lattice> = BTreeMap::new();
            for (rays, lines, basis) in entries {
                let cone = Cone::from_generators(d, &rays, &lines);
                let id = ConeId::of(&cone);
                if fan.get(&id).is_none() {
                    violations.push(Violation::UnknownCone(id.to_string()));
                    continue;
                }
                map.insert(id, Lattice::from_rows(d, basis));
            }
            // fill defaults top-down by dimension
            let mut by_dim: Vec<ConeId> = fan.ids().cloned().collect();
            by_dim.sort_by_key(|id| std::cmp::Reverse(fan.cone(id).dim()));
            for id in by_dim {
                if map.contains_key(&id) {
                    continue;
                }
                let sat = saturated_span(fan.cone(&id));
                let covers = fan.covers(&id);
                let lat = if covers.is_empty() {
                    sat
                } else {
                    covers
                        .iter()
                        .fold(sat.clone(), |acc, c| lattice_intersect(&acc, &map[c]))
                };
                map.insert(id, lat);
            }
            // structural checks
            for id in fan.ids() {
                let lat = &map[id];
                let cone = fan.cone(id);
                let sat = saturated_span(cone);
                if !sat.contains_lattice(lat) {
                    violations.push(Violation::LatticeNotInSpan(id.clone()));
                    continue;
                }
                if lat.rank() != cone.dim() {
                    violations.push(Violation::LatticeRankMismatch(id.clone()));
                }
            }
            if violations.is_empty() {
                for small in fan.ids() {
                    for big in fan.ids() {
                        if small != big
                            && fan.cone(big).contains_cone(fan.cone(small))
                            && !map[big].contains_lattice(&map[small])
                        {
                            violations.push(Violation::CompatibilityViolation(
                                small.clone(),
                                big.clone(),
                            ));
                        }
                    }
                }
            }
            SemigroupData::LatticeFamily(map)
        }
    };

    if violations.is_empty() {
        Ok(MonoidalComplex {
            ambient_rank: d,
            characteristic: spec.characteristic,
            fan,
            data,
        })
    } else {
        Err(violations)
    }
}

/// Saturated lattice of all integer points in the span of a cone.
pub fn saturated_span(cone: &Cone) -> Lattice {
    Lattice::from_rows(cone.ambient_rank(), cone.generator_rows()).saturate()
}

fn restrict_gens(gens: &[Vec<Int>], cone: &Cone) -> Vec<Vec<Int>> {
    gens.iter()
        .filter(|g| cone.contains_point(g))
        .cloned()
        .collect()
}

/// Exact membership of `m` in the semigroup generated by `gens`.
///
/// Coefficients of generators outside the minimal face are bounded through
/// a functional strictly positive off the lineality (the sum of the facet
/// normals of the generated cone); the leftover lineality part is a lattice
/// membership test, since the unit generators span their space as a cone.
pub fn semigroup_member(gens: &[Vec<Int>], m: &[Int]) -> bool {
    if is_zero_vec(m) {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let d = m.len();
    let cone = Cone::from_generators(d, gens, &[]);
    if !cone.contains_point(m) {
        return false;
    }
    let mut phi = vec![Int::zero(); d];
    for n in cone.normals() {
        for j in 0..d {
            phi[j] = phi[j].clone() + n[j].clone();
        }
    }
    let mut units: Vec<Vec<Int>> = Vec::new();
    let mut pos: Vec<(Vec<Int>, Int)> = Vec::new();
    for g in gens {
        let w = dot(&phi, g);
        if w.is_zero() {
            units.push(g.clone());
        } else {
            pos.push((g.clone(), w));
        }
    }
    let unit_lattice = Lattice::from_rows(d, units);
    let target = dot(&phi, m);
    debug_assert!(!target.is_negative());
    pos.sort_by(|a, b| b.1.cmp(&a.1));
    // gcd of the remaining weights, for pruning
    let mut suffix_gcd = vec![Int::zero(); pos.len() + 1];
    for i in (0..pos.len()).rev() {
        suffix_gcd[i] = num_integer::Integer::gcd(&suffix_gcd[i + 1], &pos[i].1);
    }
    fn search(
        pos: &[(Vec<Int>, Int)],
        suffix_gcd: &[Int],
        idx: usize,
        rem: Int,
        residual: &mut Vec<Int>,
        unit_lattice: &Lattice,
    ) -> bool {
        if rem.is_zero() {
            // remaining generators cannot be used; decide the unit part
            return unit_lattice.contains(residual);
        }
        if idx == pos.len() {
            return false;
        }
        if suffix_gcd[idx].is_zero() || !rem.clone().mod_floor(&suffix_gcd[idx]).is_zero() {
            return false;
        }
        let (g, w) = &pos[idx];
        let max_c = rem.clone().div_floor(w);
        let mut c = Int::zero();
        while c <= max_c {
            if semigroup_search_step(pos, suffix_gcd, idx, &rem, &c, w, g, residual, unit_lattice) {
                return true;
            }
            c = c + Int::from(1);
        }
        false
    }
    #[allow(clippy::too_many_arguments)]
    fn semigroup_search_step(
        pos: &[(Vec<Int>, Int)],
        suffix_gcd: &[Int],
        idx: usize,
        rem: &Int,
        c: &Int,
        w: &Int,
        g: &[Int],
        residual: &mut Vec<Int>,
        unit_lattice: &Lattice,
    ) -> bool {
        let mut next = residual.clone();
        for j in 0..next.len() {
            next[j] = next[j].clone() - c.clone() * g[j].clone();
        }
        search(
            pos,
            suffix_gcd,
            idx + 1,
            rem.clone() - c.clone() * w.clone(),
            &mut next,
            unit_lattice,
        )
    }
    let mut residual = m.to_vec();
    search(&pos, &suffix_gcd, 0, target, &mut residual, &unit_lattice)
}

impl MonoidalComplex {
    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn with_characteristic(mut self, characteristic: u64) -> Result<Self, Violation> {
        if characteristic != 0 && !is_prime(characteristic) {
            return Err(Violation::BadCharacteristic(characteristic));
        }
        self.characteristic = characteristic;
        Ok(self)
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn data(&self) -> &SemigroupData {
        &self.data
    }

    pub fn is_lattice_family(&self) -> bool {
        matches!(self.data, SemigroupData::LatticeFamily(_))
    }

    pub fn is_irreducible(&self) -> bool {
        self.fan.maximal().len() == 1
    }

    /// Generators of the semigroup at a cone (generator mode only):
    /// the generators of any containing facet that lie in the cone.
    pub fn generators_at(&self, id: &ConeId) -> Option<Vec<Vec<Int>>> {
        match &self.data {
            SemigroupData::Generators(map) => {
                let cone = self.fan.cone(id);
                let f = if self.fan.is_maximal(id) {
                    id
                } else {
                    self.fan.facets_containing(id).first()?
                };
                Some(restrict_gens(&map[f], cone))
            }
            SemigroupData::LatticeFamily(_) => None,
        }
    }

    /// The difference lattice S_sigma - S_sigma of the semigroup at a cone.
    pub fn lattice_at(&self, id: &ConeId) -> Lattice {
        match &self.data {
            SemigroupData::LatticeFamily(map) => map[id].clone(),
            SemigroupData::Generators(_) => {
                let gens = self.generators_at(id).expect("generator mode");
                Lattice::from_rows(self.ambient_rank, gens)
            }
        }
    }

    /// Saturated lattice M cap span(sigma).
    pub fn saturated_at(&self, id: &ConeId) -> Lattice {
        saturated_span(self.fan.cone(id))
    }

    /// The lattice (S_F - S_F) cap span(tau): the trace of a facet lattice
    /// on the span of a face.
    pub fn trace_in_facet(&self, tau: &ConeId, facet: &ConeId) -> Lattice {
        lattice_intersect(&self.lattice_at(facet), &self.saturated_at(tau))
    }

    /// Exact semigroup membership at a fan cone.
    pub fn semigroup_contains(&self, id: &ConeId, m: &[Int]) -> bool {
        let cone = self.fan.cone(id);
        if !cone.contains_point(m) {
            return false;
        }
        match &self.data {
            SemigroupData::Generators(_) => {
                let gens = self.generators_at(id).expect("generator mode");
                semigroup_member(&gens, m)
            }
            SemigroupData::LatticeFamily(map) => {
                let p: Vec<Rat> = m.iter().map(|x| Rat::from_integer(x.clone())).collect();
                let face = self
                    .fan
                    .faces_of(id)
                    .into_iter()
                    .find(|f| self.fan.cone(f).relint_contains_rat(&p))
                    .expect("point in the cone lies in the relint of some face");
                map[&face].contains(m)
            }
        }
    }

    /// Restriction to a downward-closed set of cones, as a new complex.
    /// The maximal cones of the sub-complex are the maximal elements of the
    /// set; lattice data is restricted (lattice-family mode only).
    pub fn restrict_to(&self, ids: &BTreeSet<ConeId>) -> Result<MonoidalComplex, Vec<Violation>> {
        let SemigroupData::LatticeFamily(map) = &self.data else {
            panic!("restrict_to requires lattice-family mode");
        };
        let maximal: Vec<ConeId> = ids
            .iter()
            .filter(|i| {
                !ids.iter()
                    .any(|j| *j != **i && self.fan.cone(j).contains_cone(self.fan.cone(i)))
            })
            .cloned()
            .collect();
        let spec = ComplexSpec {
            ambient_rank: self.ambient_rank,
            characteristic: self.characteristic,
            maximal_cones: maximal
                .iter()
                .map(|id| {
                    let c = self.fan.cone(id);
                    (c.rays().to_vec(), c.lineality().basis_rows())
                })
                .collect(),
            data: SpecData::LatticeFamily(
                ids.iter()
                    .map(|id| {
                        let c = self.fan.cone(id);
                        (
                            c.rays().to_vec(),
                            c.lineality().basis_rows(),
                            map[id].basis_rows(),
                        )
                    })
                    .collect(),
            ),
        };
        validate(spec)
    }
}

/// The facet graph: vertices are facets, edges join facets whose
/// intersection has codimension one in both; the label is the shared cone.
pub struct FacetGraph {
    pub vertices: Vec<ConeId>,
    pub edges: Vec<(usize, usize, ConeId)>,
}

impl FacetGraph {
    pub fn vertex_index(&self, id: &ConeId) -> Option<usize> {
        self.vertices.iter().position(|v| v == id)
    }

    pub fn neighbors(&self, v: usize) -> Vec<(usize, &ConeId)> {
        let mut out = Vec::new();
        for (a, b, label) in &self.edges {
            if *a == v {
                out.push((*b, label));
            } else if *b == v {
                out.push((*a, label));
            }
        }
        out
    }
}

pub fn facet_graph(mc: &MonoidalComplex) -> FacetGraph {
    let fan = mc.fan();
    let vertices: Vec<ConeId> = fan.maximal().to_vec();
    let mut edges = Vec::new();
    for i in 0..vertices.len() {
        for j in i + 1..vertices.len() {
            let a = fan.cone(&vertices[i]);
            let b = fan.cone(&vertices[j]);
            let inter = a.intersect(b);
            if inter.dim() + 1 == a.dim() && inter.dim() + 1 == b.dim() {
                edges.push((i, j, ConeId::of(&inter)));
            }
        }
    }
    FacetGraph { vertices, edges }
}

/// Outcome of the 1-connectedness test, with a witness pair on failure or
/// the connecting chains on success.
pub struct OneConnected {
    pub connected: bool,
    pub witness: Option<(ConeId, ConeId)>,
    pub chains: Vec<(ConeId, ConeId, Vec<ConeId>)>,
}

/// For every two facets, the facets containing their intersection must be
/// chained through codimension-one intersections.
pub fn is_1_connected(mc: &MonoidalComplex) -> OneConnected {
    let fan = mc.fan();
    let graph = facet_graph(mc);
    let mut chains = Vec::new();
    for i in 0..graph.vertices.len() {
        for j in i + 1..graph.vertices.len() {
            let fi = &graph.vertices[i];
            let fj = &graph.vertices[j];
            let inter = fan.cone(fi).intersect(fan.cone(fj));
            let allowed: BTreeSet<usize> = (0..graph.vertices.len())
                .filter(|&v| fan.cone(&graph.vertices[v]).contains_cone(&inter))
                .collect();
            // BFS from i to j within `allowed`
            let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(i);
            let mut seen = BTreeSet::new();
            seen.insert(i);
            while let Some(v) = queue.pop_front() {
                for (w, _) in graph.neighbors(v) {
                    if allowed.contains(&w) && seen.insert(w) {
                        prev.insert(w, v);
                        queue.push_back(w);
                    }
                }
            }
            if !seen.contains(&j) {
                return OneConnected {
                    connected: false,
                    witness: Some((fi.clone(), fj.clone())),
                    chains: Vec::new(),
                };
            }
            let mut chain = vec![graph.vertices[j].clone()];
            let mut cur = j;
            while cur != i {
                cur = prev[&cur];
                chain.push(graph.vertices[cur].clone());
            }
            chain.reverse();
            chains.push((fi.clone(), fj.clone(), chain));
        }
    }
    OneConnected {
        connected: true,
        witness: None,
        chains,
    }
}

fn unit_vector(d: usize, i: usize) -> Vec<Int> {
    let mut e = vec![Int::zero(); d];
    e[i] = Int::from(1);
    e
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// The complex of all faces of the first orthant of Z^n of codimension at
/// least p, with saturated semigroups. For p = 0 this is the orthant itself;
/// for p = n the single zero cone.
pub fn coordinate_arrangement(n: usize, p: usize) -> MonoidalComplex {
    assert!(p <= n, "codimension bound must be at most the rank");
    let k = n - p;
    let maximal: Vec<(Vec<Vec<Int>>, Vec<Vec<Int>>)> = k_subsets(n, k)
        .into_iter()
        .map(|s| (s.into_iter().map(|i| unit_vector(n, i)).collect(), vec![]))
        .collect();
    let spec = ComplexSpec {
        ambient_rank: n,
        characteristic: 0,
        maximal_cones: maximal,
        data: SpecData::LatticeFamily(vec![]),
    };
    validate(spec).expect("coordinate arrangements are valid complexes")
}

/// Complex of coordinate cones spanned by the facets of an abstract
/// simplicial complex on vertices 1..=n, with saturated semigroups.
pub fn stanley_reisner(
    n: usize,
    facets: &[Vec<usize>],
) -> Result<MonoidalComplex, SimplicialError> {
    let mut cleaned: Vec<BTreeSet<usize>> = Vec::new();
    for f in facets {
        let set: BTreeSet<usize> = f.iter().cloned().collect();
        if set.len() != f.len() {
            return Err(SimplicialError::NotSimplicial(f.clone()));
        }
        if let Some(&v) = set.iter().find(|&&v| v == 0 || v > n) {
            return Err(SimplicialError::VertexOutOfRange(v, n));
        }
        cleaned.push(set);
    }
    // keep only maximal faces
    let maximal_sets: Vec<&BTreeSet<usize>> = cleaned
        .iter()
        .filter(|s| !cleaned.iter().any(|t| *s != t && s.is_subset(t)))
        .collect();
    let mut seen = BTreeSet::new();
    let mut maximal = Vec::new();
    for s in maximal_sets {
        if seen.insert(s.clone()) {
            maximal.push((
                s.iter().map(|&v| unit_vector(n, v - 1)).collect::<Vec<_>>(),
                vec![],
            ));
        }
    }
    let spec = ComplexSpec {
        ambient_rank: n,
        characteristic: 0,
        maximal_cones: maximal,
        data: SpecData::LatticeFamily(vec![]),
    };
    Ok(validate(spec).expect("simplicial coordinate complexes are valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cone;

    fn i(v: &[i32]) -> Vec<Int> {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    #[test]
    fn validate_single_orthant() {
        let spec = ComplexSpec {
            ambient_rank: 2,
            characteristic: 0,
            maximal_cones: vec![(vec![i(&[1, 0]), i(&[0, 1])], vec![])],
            data: SpecData::LatticeFamily(vec![]),
        };
        let mc = validate(spec).unwrap();
        assert_eq!(mc.fan().len(), 4);
    }

    #[test]
    fn validate_rejects_overlapping_cones() {
        // two 2-cones overlapping in a 2-dimensional region
        let spec = ComplexSpec {
            ambient_rank: 2,
            characteristic: 0,
            maximal_cones: vec![
                (vec![i(&[1, 0]), i(&[0, 1])], vec![]),
                (vec![i(&[1, 1]), i(&[-1, 1])], vec![]),
            ],
            data: SpecData::LatticeFamily(vec![]),
        };
        let err = validate(spec).unwrap_err();
        assert!(matches!(err[0], Violation::FanIntersectionViolation(..)));
    }

    #[test]
    fn validate_rejects_incompatible_lattice() {
        // lattice of the ray not contained in the facet lattice
        let spec = ComplexSpec {
            ambient_rank: 2,
            characteristic: 0,
            maximal_cones: vec![(vec![i(&[1, 0]), i(&[0, 1])], vec![])],
            data: SpecData::LatticeFamily(vec![
                (
                    vec![i(&[1, 0]), i(&[0, 1])],
                    vec![],
                    vec![i(&[2, 0]), i(&[0, 1])],
                ),
                (vec![i(&[1, 0])], vec![], vec![i(&[1, 0])]),
            ]),
        };
        let err = validate(spec).unwrap_err();
        assert!(err
            .iter()
            .any(|v| matches!(v, Violation::CompatibilityViolation(..))));
    }

    #[test]
    fn coordinate_arrangement_shapes() {
        let mc = coordinate_arrangement(3, 0);
        assert_eq!(mc.fan().maximal().len(), 1);
        assert_eq!(mc.fan().len(), 8);

        let mc = coordinate_arrangement(3, 1);
        assert_eq!(mc.fan().maximal().len(), 3);
        assert_eq!(mc.fan().len(), 7); // 3 planes, 3 rays, origin

        let mc = coordinate_arrangement(3, 3);
        assert_eq!(mc.fan().maximal().len(), 1);
        assert_eq!(mc.fan().len(), 1);
        assert_eq!(mc.fan().cone(&mc.fan().maximal()[0]).dim(), 0);
    }

    #[test]
    fn coordinate_arrangements_validate_up_to_rank_five() {
        for n in 1..=5 {
            for p in 1..=n {
                let mc = coordinate_arrangement(n, p);
                assert!(mc.fan().len() > 0, "({n},{p})");
            }
        }
    }

    #[test]
    fn facet_graph_examples() {
        let mc = coordinate_arrangement(3, 1);
        let g = facet_graph(&mc);
        assert_eq!(g.vertices.len(), 3);
        assert_eq!(g.edges.len(), 3); // triangle

        let mc = stanley_reisner(5, &[vec![1, 2, 3], vec![3, 4, 5]]).unwrap();
        let g = facet_graph(&mc);
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.edges.len(), 0); // shared face is a ray, codim 2

        let mc = coordinate_arrangement(2, 0);
        let g = facet_graph(&mc);
        assert_eq!(g.vertices.len(), 1);
        assert_eq!(g.edges.len(), 0);
    }

    #[test]
    fn one_connectedness() {
        assert!(is_1_connected(&coordinate_arrangement(3, 1)).connected);
        let two_triangles = stanley_reisner(5, &[vec![1, 2, 3], vec![3, 4, 5]]).unwrap();
        let res = is_1_connected(&two_triangles);
        assert!(!res.connected);
        assert!(res.witness.is_some());
        assert!(is_1_connected(&coordinate_arrangement(2, 0)).connected);
    }

    #[test]
    fn mixed_dimension_facets_are_not_1_connected() {
        let mc = stanley_reisner(5, &[vec![1, 2, 3], vec![4, 5]]).unwrap();
        let dims: BTreeSet<usize> = mc
            .fan()
            .maximal()
            .iter()
            .map(|f| mc.fan().cone(f).dim())
            .collect();
        assert!(dims.len() > 1);
        assert!(!is_1_connected(&mc).connected);
    }

    #[test]
    fn semigroup_member_numerical() {
        let gens = vec![i(&[2]), i(&[3])];
        assert!(!semigroup_member(&gens, &i(&[1])));
        assert!(semigroup_member(&gens, &i(&[7])));
        assert!(semigroup_member(&gens, &i(&[0])));
        // brute force agreement on 0..=20
        let mut reachable = vec![false; 41];
        reachable[0] = true;
        for v in 0..=40usize {
            if reachable[v] {
                if v + 2 <= 40 {
                    reachable[v + 2] = true;
                }
                if v + 3 <= 40 {
                    reachable[v + 3] = true;
                }
            }
        }
        for v in 0..=20i32 {
            assert_eq!(
                semigroup_member(&gens, &i(&[v])),
                reachable[v as usize],
                "at {v}"
            );
        }
    }

    #[test]
    fn semigroup_member_with_units() {
        // generators spanning a line plus a strictly positive one
        let gens = vec![i(&[2, 0]), i(&[-2, 0]), i(&[0, 1])];
        assert!(semigroup_member(&gens, &i(&[4, 2])));
        assert!(semigroup_member(&gens, &i(&[-6, 1])));
        assert!(!semigroup_member(&gens, &i(&[1, 1])));
        assert!(!semigroup_member(&gens, &i(&[0, -1])));
    }

    #[test]
    fn lattice_family_membership() {
        // ray with lattice 2Z, origin lattice {0}
        let spec = ComplexSpec {
            ambient_rank: 1,
            characteristic: 0,
            maximal_cones: vec![(vec![i(&[1])], vec![])],
            data: SpecData::LatticeFamily(vec![(vec![i(&[1])], vec![], vec![i(&[2])])]),
        };
        let mc = validate(spec).unwrap();
        let ray = mc.fan().maximal()[0].clone();
        assert!(mc.semigroup_contains(&ray, &i(&[2])));
        assert!(!mc.semigroup_contains(&ray, &i(&[1])));
        assert!(mc.semigroup_contains(&ray, &i(&[0])));
    }

    #[test]
    fn stanley_reisner_examples() {
        let t = stanley_reisner(3, &[vec![1, 2, 3]]).unwrap();
        assert_eq!(t.fan().maximal().len(), 1);
        assert_eq!(t.fan().cone(&t.fan().maximal()[0]).dim(), 3);

        let hollow = stanley_reisner(3, &[vec![1, 2], vec![2, 3], vec![1, 3]]).unwrap();
        assert_eq!(hollow.fan().maximal().len(), 3);
        assert!(is_1_connected(&hollow).connected);

        assert!(matches!(
            stanley_reisner(3, &[vec![1, 1, 2]]),
            Err(SimplicialError::NotSimplicial(_))
        ));
    }

    #[test]
    fn lattice_family_membership_is_monotone_under_faces() {
        let spec = ComplexSpec {
            ambient_rank: 2,
            characteristic: 0,
            maximal_cones: vec![(vec![i(&[1, 0]), i(&[0, 1])], vec![])],
            data: SpecData::LatticeFamily(vec![(vec![i(&[1, 0])], vec![], vec![i(&[2, 0])])]),
        };
        let mc = validate(spec).unwrap();
        let facet = mc.fan().maximal()[0].clone();
        let x_ray = ConeId::of(&Cone::from_generators(2, &[i(&[1, 0])], &[]));
        for x in 0..=6i32 {
            let m = i(&[x, 0]); // lies in the ray, a face of the facet
            assert_eq!(
                mc.semigroup_contains(&facet, &m),
                mc.semigroup_contains(&x_ray, &m),
                "at {x}"
            );
        }
    }

    #[test]
    fn generator_mode_validation() {
        let spec = ComplexSpec {
            ambient_rank: 2,
            characteristic: 0,
            maximal_cones: vec![(vec![i(&[1, 0]), i(&[1, 3])], vec![])],
            data: SpecData::Generators(vec![vec![i(&[1, 0]), i(&[1, 1]), i(&[1, 3])]]),
        };
        let mc = validate(spec).unwrap();
        let f = mc.fan().maximal()[0].clone();
        assert!(mc.semigroup_contains(&f, &i(&[2, 1])));
        assert!(!mc.semigroup_contains(&f, &i(&[1, 2])));
    }
}
