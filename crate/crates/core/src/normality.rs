//! Ring-theoretic properties of the toric variety of a monoidal complex:
//! seminormality, weak normality, Serre's S2, the S2-closure of an
//! irreducible semigroup, the conductor fan, incidence numbers and the core.
//!
//! In lattice-family mode every verdict is exact. In generator mode the
//! positive seminormality/S2 verdicts are verified on a box of lattice
//! points and labelled as such; negative verdicts always carry an exact
//! witness.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::complex::{is_1_connected, semigroup_member, ConeId, MonoidalComplex, SemigroupData};
use crate::lattice::{lattice_intersect, sublattice_index, Index};
use crate::{Int, Lattice, Rat};

#[derive(Debug, Error)]
pub enum NormalityError {
    #[error("operation requires an irreducible complex (a single facet)")]
    NotIrreducible,
    #[error("operation requires generator mode")]
    RequiresGeneratorMode,
    #[error("operation requires lattice-family mode")]
    RequiresLatticeFamily,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("internal certificate failed: {0}")]
    CertificateFailed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    BoxBounded(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    NotOneConnected(ConeId, ConeId),
    /// The lattice at `cone` differs from the intersection of the lattices
    /// of the codimension-one cones containing it.
    LatticeIntersection {
        cone: ConeId,
        lattice: Lattice,
        intersection: Lattice,
    },
    /// A lattice point that should belong to the semigroup but does not.
    MissingPoint {
        cone: ConeId,
        point: Vec<Int>,
    },
    /// The characteristic divides this incidence number.
    CharDividesIncidence {
        tau: ConeId,
        facet: ConeId,
        incidence: Int,
    },
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub provenance: Provenance,
}

impl Verdict {
    fn exact(holds: bool, witness: Option<Witness>) -> Self {
        Verdict {
            holds,
            witness,
            provenance: Provenance::Exact,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NormalityReport {
    pub seminormal: Verdict,
    pub weakly_normal: Verdict,
    pub s2: Verdict,
    pub has_normal_components: bool,
}

/// Incidence numbers d_{tau < F}: the index of the lattice of a
/// codimension-one face inside the trace of the facet lattice on its span;
/// the degree of the normalization of the facet over the invariant prime.
#[derive(Clone, Debug)]
pub struct IncidenceTable {
    pub entries: std::collections::BTreeMap<(ConeId, ConeId), Int>,
}

impl IncidenceTable {
    pub fn get(&self, tau: &ConeId, facet: &ConeId) -> &Int {
        &self.entries[&(tau.clone(), facet.clone())]
    }
}

pub fn incidence_table(mc: &MonoidalComplex) -> IncidenceTable {
    let mut entries = std::collections::BTreeMap::new();
    for (tau, facet) in mc.fan().codim1_pairs() {
        let inner = mc.lattice_at(&tau);
        let outer = mc.trace_in_facet(&tau, &facet);
        let d = match sublattice_index(&inner, &outer) {
            Ok(Index::Finite(d)) => d,
            _ => unreachable!("face lattice has finite index in the facet trace"),
        };
        entries.insert((tau, facet), d);
    }
    IncidenceTable { entries }
}

/// Default verification box for generator-mode checks:
/// (number of generators) x (max generator coordinate) x 2.
pub fn default_box(mc: &MonoidalComplex) -> u64 {
    let SemigroupData::Generators(map) = mc.data() else {
        return 8;
    };
    let count: usize = map.values().map(|g| g.len()).sum();
    let max_coord = map
        .values()
        .flatten()
        .flatten()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(|| Int::from(1));
    let m = (count as u64) * max_coord.to_u64().unwrap_or(1) * 2;
    m.max(4)
}

fn box_points(d: usize, lo: i64, hi: i64) -> Vec<Vec<Int>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        let mut next = Vec::new();
        for p in &out {
            for v in lo..=hi {
                let mut q = p.clone();
                q.push(Int::from(v as i32));
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Membership oracle for the S2-closure S' of an irreducible generator-mode
/// semigroup: m lies in S' iff for every codimension-one face tau there are
/// s in S and t in S cap tau with m = s - t; equivalently m belongs to the
/// semigroup generated by the generators of S together with the negated
/// generators of S cap tau.
pub struct S2Closure {
    pub facet: ConeId,
    gens: Vec<Vec<Int>>,
    extended: Vec<(ConeId, Vec<Vec<Int>>)>,
}

impl S2Closure {
    pub fn contains(&self, m: &[Int]) -> bool {
        if self.extended.is_empty() {
            return semigroup_member(&self.gens, m);
        }
        self.extended
            .iter()
            .all(|(_, gens)| semigroup_member(gens, m))
    }

    pub fn semigroup_contains(&self, m: &[Int]) -> bool {
        semigroup_member(&self.gens, m)
    }

    pub fn enumerate_box(&self, lo: i64, hi: i64) -> Vec<Vec<Int>> {
        box_points(self.gens.first().map_or(0, |g| g.len()), lo, hi)
            .into_iter()
            .filter(|p| self.contains(p))
            .collect()
    }
}

pub fn s2_closure_irreducible(mc: &MonoidalComplex) -> Result<S2Closure, NormalityError> {
    if !mc.is_irreducible() {
        return Err(NormalityError::NotIrreducible);
    }
    let SemigroupData::Generators(_) = mc.data() else {
        return Err(NormalityError::RequiresGeneratorMode);
    };
    let facet = mc.fan().maximal()[0].clone();
    let gens = mc.generators_at(&facet).expect("generator mode");
    let mut extended = Vec::new();
    for tau in mc.fan().covered_faces(&facet) {
        let face_cone = mc.fan().cone(&tau);
        let mut ext = gens.clone();
        for g in &gens {
            if face_cone.contains_point(g) {
                ext.push(crate::num::neg_vec(g));
            }
        }
        extended.push((tau, ext));
    }
    Ok(S2Closure {
        facet,
        gens,
        extended,
    })
}

/// Seminormality. Lattice-family complexes are seminormal by construction;
/// generator-mode complexes are checked on a box: for each cone, every
/// lattice point of (S - S) cap relint inside the box must lie in S.
pub fn is_seminormal(mc: &MonoidalComplex, box_bound: Option<u64>) -> Verdict {
    match mc.data() {
        SemigroupData::LatticeFamily(_) => Verdict::exact(true, None),
        SemigroupData::Generators(_) => {
            let n = box_bound.unwrap_or_else(|| default_box(mc)) as i64;
            let d = mc.ambient_rank();
            for id in mc.fan().ids() {
                let lat = mc.lattice_at(id);
                let cone = mc.fan().cone(id);
                for p in box_points(d, -n, n) {
                    if !cone.relint_contains_point(&p) || !lat.contains(&p) {
                        continue;
                    }
                    if !mc.semigroup_contains(id, &p) {
                        return Verdict::exact(
                            false,
                            Some(Witness::MissingPoint {
                                cone: id.clone(),
                                point: p,
                            }),
                        );
                    }
                }
            }
            Verdict {
                holds: true,
                witness: None,
                provenance: Provenance::BoxBounded(n as u64),
            }
        }
    }
}

/// Serre's S2. Exact for lattice families (1-connectedness plus the lattice
/// intersection identity at every positive-codimension cone); box-bounded
/// in generator mode (the semigroup condition against the facet S2-closures
/// is verified on the lattice points of a box).
pub fn is_s2(mc: &MonoidalComplex, box_bound: Option<u64>) -> Verdict {
    let oc = is_1_connected(mc);
    if !oc.connected {
        let (a, b) = oc.witness.expect("failing pair");
        return Verdict::exact(false, Some(Witness::NotOneConnected(a, b)));
    }
    match mc.data() {
        SemigroupData::LatticeFamily(_) => {
            for id in mc.fan().ids() {
                if mc.fan().is_maximal(id) {
                    continue;
                }
                let codim1: Vec<ConeId> = mc
                    .fan()
                    .codim_one_cones()
                    .into_iter()
                    .filter(|tau| mc.fan().cone(tau).contains_cone(mc.fan().cone(id)))
                    .collect();
                if codim1.is_empty() {
                    continue;
                }
                let mut inter = mc.lattice_at(&codim1[0]);
                for tau in &codim1[1..] {
                    inter = lattice_intersect(&inter, &mc.lattice_at(tau));
                }
                let lat = mc.lattice_at(id);
                if lat != inter {
                    return Verdict::exact(
                        false,
                        Some(Witness::LatticeIntersection {
                            cone: id.clone(),
                            lattice: lat,
                            intersection: inter,
                        }),
                    );
                }
            }
            Verdict::exact(true, None)
        }
        SemigroupData::Generators(_) => {
            let n = box_bound.unwrap_or_else(|| default_box(mc)) as i64;
            let d = mc.ambient_rank();
            // per-facet S2-closure oracles of the irreducible components
            let closures: Vec<(ConeId, S2Closure)> = mc
                .fan()
                .maximal()
                .iter()
                .map(|f| (f.clone(), facet_closure(mc, f)))
                .collect();
            for p in box_points(d, -n, n) {
                let holding: Vec<&ConeId> = mc
                    .fan()
                    .ids()
                    .filter(|id| mc.fan().cone(id).contains_point(&p))
                    .collect();
                if holding.is_empty() {
                    continue;
                }
                // smallest cone containing p gives the semigroup answer
                let min = holding
                    .iter()
                    .min_by_key(|id| mc.fan().cone(id).dim())
                    .unwrap();
                let in_s = mc.semigroup_contains(min, &p);
                let in_closure = closures
                    .iter()
                    .filter(|(f, _)| mc.fan().cone(f).contains_point(&p))
                    .all(|(_, cl)| cl.contains(&p));
                if in_closure && !in_s {
                    return Verdict::exact(
                        false,
                        Some(Witness::MissingPoint {
                            cone: (*min).clone(),
                            point: p,
                        }),
                    );
                }
            }
            Verdict {
                holds: true,
                witness: None,
                provenance: Provenance::BoxBounded(n as u64),
            }
        }
    }
}

fn facet_closure(mc: &MonoidalComplex, facet: &ConeId) -> S2Closure {
    let gens = mc.generators_at(facet).expect("generator mode");
    let mut extended = Vec::new();
    for tau in mc.fan().covered_faces(facet) {
        let face_cone = mc.fan().cone(&tau);
        let mut ext = gens.clone();
        for g in &gens {
            if face_cone.contains_point(g) {
                ext.push(crate::num::neg_vec(g));
            }
        }
        extended.push((tau, ext));
    }
    S2Closure {
        facet: facet.clone(),
        gens,
        extended,
    }
}

/// Weak normality: seminormal, and the characteristic divides no incidence
/// number.
pub fn is_weakly_normal(mc: &MonoidalComplex, box_bound: Option<u64>) -> Verdict {
    let sn = is_seminormal(mc, box_bound);
    if !sn.holds {
        return sn;
    }
    let p = mc.characteristic();
    if p != 0 {
        let table = incidence_table(mc);
        for ((tau, facet), d) in &table.entries {
            if d.mod_floor(&Int::from(p)).is_zero() {
                return Verdict::exact(
                    false,
                    Some(Witness::CharDividesIncidence {
                        tau: tau.clone(),
                        facet: facet.clone(),
                        incidence: d.clone(),
                    }),
                );
            }
        }
    }
    sn
}

/// X has normal components iff every cone's lattice is the trace of the
/// lattice of each facet containing it.
pub fn has_normal_components(mc: &MonoidalComplex) -> bool {
    for id in mc.fan().ids() {
        for facet in mc.fan().facets_containing(id) {
            if mc.lattice_at(id) != mc.trace_in_facet(id, facet) {
                return false;
            }
        }
    }
    true
}

pub fn normality_report(mc: &MonoidalComplex, box_bound: Option<u64>) -> NormalityReport {
    NormalityReport {
        seminormal: is_seminormal(mc, box_bound),
        weakly_normal: is_weakly_normal(mc, box_bound),
        s2: is_s2(mc, box_bound),
        has_normal_components: has_normal_components(mc),
    }
}

/// The conductor fan: cones lying in at least two facets, or in a unique
/// facet with a lattice strictly smaller than the facet trace, together
/// with all their faces. The subvarieties of its maximal cones are the
/// irreducible components of the non-normal locus.
#[derive(Clone, Debug)]
pub struct ConductorFan {
    pub cones: BTreeSet<ConeId>,
    /// Maximal cones of the conductor fan (components of the non-normal
    /// locus); of codimension one whenever the complex is S2.
    pub components: Vec<ConeId>,
}

impl ConductorFan {
    pub fn contains(&self, id: &ConeId) -> bool {
        self.cones.contains(id)
    }

    pub fn is_empty(&self) -> bool {
        self.cones.is_empty()
    }
}

pub fn conductor_fan(mc: &MonoidalComplex) -> Result<ConductorFan, NormalityError> {
    let SemigroupData::LatticeFamily(_) = mc.data() else {
        return Err(NormalityError::RequiresLatticeFamily);
    };
    let mut qualifying: BTreeSet<ConeId> = BTreeSet::new();
    for id in mc.fan().ids() {
        let facets = mc.fan().facets_containing(id);
        if mc.fan().is_maximal(id) {
            continue;
        }
        if facets.len() >= 2 {
            qualifying.insert(id.clone());
        } else if facets.len() == 1 {
            let trace = mc.trace_in_facet(id, &facets[0]);
            if mc.lattice_at(id) != trace {
                qualifying.insert(id.clone());
            }
        }
    }
    // downward closure: the conductor is a union of closed subvarieties
    let mut cones: BTreeSet<ConeId> = BTreeSet::new();
    for id in &qualifying {
        for face in mc.fan().faces_of(id) {
            cones.insert(face);
        }
    }
    let components: Vec<ConeId> = cones
        .iter()
        .filter(|i| {
            !cones
                .iter()
                .any(|j| *j != **i && mc.fan().cone(j).contains_cone(mc.fan().cone(i)))
        })
        .cloned()
        .collect();
    Ok(ConductorFan { cones, components })
}

#[derive(Clone, Debug)]
pub struct CoreData {
    pub cone: ConeId,
    /// Faces of the core whose lattices are traces of the core lattice,
    /// i.e. the witness that the core is normal.
    pub normal: bool,
    /// The core lattice equals the intersection of all facet lattices and
    /// all conductor-component lattices.
    pub lattice_identity: bool,
}

/// The core: the intersection of all facets and of all codimension-one
/// conductor components. Requires a seminormal S2 complex; the certificate
/// that the core is normal is re-verified and surfaced.
pub fn core(mc: &MonoidalComplex) -> Result<CoreData, NormalityError> {
    let SemigroupData::LatticeFamily(_) = mc.data() else {
        return Err(NormalityError::RequiresLatticeFamily);
    };
    let s2 = is_s2(mc, None);
    if !s2.holds {
        return Err(NormalityError::PreconditionFailed(format!(
            "complex is not S2: {:?}",
            s2.witness
        )));
    }
    let conductor = conductor_fan(mc)?;
    let fan = mc.fan();
    let mut cone = fan.cone(&fan.maximal()[0]).clone();
    for f in &fan.maximal()[1..] {
        cone = cone.intersect(fan.cone(f));
    }
    for tau in &conductor.components {
        let c = fan.cone(tau);
        if c.dim() + 1 == fan.cone(&fan.facets_containing(tau)[0]).dim() {
            cone = cone.intersect(c);
        }
    }
    let id = ConeId::of(&cone);
    if fan.get(&id).is_none() {
        return Err(NormalityError::CertificateFailed(
            "core cone is not a fan cone".into(),
        ));
    }
    let core_lat = mc.lattice_at(&id);
    let normal = fan
        .faces_of(&id)
        .iter()
        .all(|gamma| mc.lattice_at(gamma) == lattice_intersect(&core_lat, &mc.saturated_at(gamma)));
    let mut expected = mc.lattice_at(&fan.maximal()[0]);
    for f in &fan.maximal()[1..] {
        expected = lattice_intersect(&expected, &mc.lattice_at(f));
    }
    for tau in &conductor.components {
        expected = lattice_intersect(&expected, &mc.lattice_at(tau));
    }
    let lattice_identity = {
        // restrict the intersection to the span of the core
        let restricted = lattice_intersect(&expected, &mc.saturated_at(&id));
        restricted == core_lat
    };
    if !normal {
        return Err(NormalityError::CertificateFailed(
            "core is not normal".into(),
        ));
    }
    Ok(CoreData {
        cone: id,
        normal,
        lattice_identity,
    })
}

/// Convenience: checked seminormal + S2 precondition used by the log-pair
/// pipeline.
pub fn require_seminormal_s2(mc: &MonoidalComplex) -> Result<(), NormalityError> {
    let SemigroupData::LatticeFamily(_) = mc.data() else {
        return Err(NormalityError::RequiresLatticeFamily);
    };
    let s2 = is_s2(mc, None);
    if !s2.holds {
        return Err(NormalityError::PreconditionFailed(format!(
            "complex is not S2: {:?}",
            s2.witness
        )));
    }
    Ok(())
}

/// Used by the classification pipeline: the rational point must lie in the
/// relative interior of exactly one fan cone.
pub fn relint_decomposition_holds(mc: &MonoidalComplex, p: &[Rat]) -> bool {
    mc.fan()
        .ids()
        .filter(|id| mc.fan().cone(id).relint_contains_rat(p))
        .count()
        <= 1
}
