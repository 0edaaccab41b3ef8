//! Invariant log structures on the toric variety of a monoidal complex:
//! boundaries, the log discrepancy function, n- and Q-orientability, the
//! weakly-normal-log-pair / weakly-log-canonical / semi-log-canonical
//! classification, lc centers and the LCS locus.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::complex::{facet_graph, is_1_connected, ConeId, MonoidalComplex, SemigroupData};
use crate::field::KScalar;
use crate::lattice::lattice_intersect;
use crate::mat::{solve_rational, LinSolve, Mat};
use crate::normality::{
    conductor_fan, core, incidence_table, is_s2, is_weakly_normal, ConductorFan, IncidenceTable,
    NormalityError, Verdict,
};
use crate::num::{clear_denominators, dot, primitive};
use crate::residue::residue_sign;
use crate::{Cone, Int, Lattice, Rat};

#[derive(Debug, Error)]
pub enum LogPairError {
    #[error(transparent)]
    Normality(#[from] NormalityError),
    #[error("boundary entry on {tau}: {reason}")]
    BoundaryUnsupported { tau: ConeId, reason: String },
    #[error("the pair is not weakly log canonical")]
    NotWlc,
    #[error("the pair is not a weakly normal log pair: {0}")]
    NotLogPair(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// A formal rational combination of invariant primes at which the variety
/// is smooth. Absent entries are zero.
#[derive(Clone, Debug, Default)]
pub struct Boundary {
    coeffs: BTreeMap<ConeId, Rat>,
}

impl Boundary {
    pub fn zero() -> Self {
        Boundary {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(coeffs: BTreeMap<ConeId, Rat>) -> Self {
        Boundary {
            coeffs: coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn coeff(&self, tau: &ConeId) -> Rat {
        self.coeffs
            .get(tau)
            .cloned()
            .unwrap_or_else(|| Rat::from_integer(Int::zero()))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&ConeId, &Rat)> {
        self.coeffs.iter()
    }

    pub fn is_effective(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Support must consist of codimension-one cones lying in a unique
    /// facet with incidence number one (the primes at which the variety is
    /// smooth).
    pub fn validate_support(&self, mc: &MonoidalComplex) -> Result<(), LogPairError> {
        let table = incidence_table(mc);
        for (tau, _) in self.entries() {
            let Some(cone) = mc.fan().get(tau) else {
                return Err(LogPairError::BoundaryUnsupported {
                    tau: tau.clone(),
                    reason: "not a fan cone".into(),
                });
            };
            let facets = mc.fan().facets_containing(tau);
            if facets.len() != 1 {
                return Err(LogPairError::BoundaryUnsupported {
                    tau: tau.clone(),
                    reason: format!("lies in {} facets", facets.len()),
                });
            }
            if mc.fan().cone(&facets[0]).dim() != cone.dim() + 1 {
                return Err(LogPairError::BoundaryUnsupported {
                    tau: tau.clone(),
                    reason: "not of codimension one".into(),
                });
            }
            let d = table.get(tau, &facets[0]);
            if *d != Int::from(1) {
                return Err(LogPairError::BoundaryUnsupported {
                    tau: tau.clone(),
                    reason: format!("incidence number {d}"),
                });
            }
        }
        Ok(())
    }
}

/// The primitive functionals cutting out the covered faces of a cone,
/// expressed in coordinates of the given lattice (which must span the cone).
pub(crate) fn cone_functionals(
    mc: &MonoidalComplex,
    ambient: &ConeId,
) -> BTreeMap<ConeId, Vec<Int>> {
    let lat = mc.lattice_at(ambient);
    let cone = mc.fan().cone(ambient);
    let to_coords = |v: &[Int]| -> Vec<Int> {
        let p: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let c = lat
            .rational_coords_of(&p)
            .expect("generator lies in the span of the lattice");
        primitive(&clear_denominators(&c), false)
    };
    let coord_rays: Vec<Vec<Int>> = cone.rays().iter().map(|r| to_coords(r)).collect();
    let coord_lines: Vec<Vec<Int>> = cone
        .lineality()
        .basis_rows()
        .iter()
        .map(|r| to_coords(r))
        .collect();
    let cc = Cone::from_generators(lat.rank(), &coord_rays, &coord_lines);
    let mut out = BTreeMap::new();
    for tau in mc.fan().covered_faces(ambient) {
        let gens: Vec<Vec<Int>> = mc
            .fan()
            .cone(&tau)
            .generator_rows()
            .iter()
            .map(|g| to_coords(g))
            .collect();
        let matching: Vec<&Vec<Int>> = cc
            .normals()
            .iter()
            .filter(|n| gens.iter().all(|g| dot(n, g).is_zero()))
            .collect();
        assert_eq!(
            matching.len(),
            1,
            "covered face must match exactly one facet normal"
        );
        out.insert(tau, matching[0].clone());
    }
    out
}

/// Pairing of a functional (in lattice coordinates) with an ambient
/// rational vector lying in the span of the lattice.
pub(crate) fn pair_in_lattice(lat: &Lattice, functional: &[Int], v: &[Rat]) -> Rat {
    let coords = lat
        .rational_coords_of(v)
        .expect("vector must lie in the span");
    crate::num::dot_rat(functional, &coords)
}

/// One linear condition on the log discrepancy function, in coordinates of
/// the residue lattice.
#[derive(Clone, Debug)]
pub struct PsiEquation {
    pub facet: ConeId,
    pub tau: ConeId,
    /// Row of the linear system against the residue-lattice coordinates.
    pub covector: Vec<Rat>,
    pub rhs: Rat,
}

#[derive(Clone, Debug)]
pub struct LogDiscrepancy {
    /// Canonical representative in ambient coordinates: the reduced-echelon
    /// solution with all free variables set to zero.
    pub psi: Vec<Rat>,
    /// The lattice S_core - S_core in which integral multiples of psi must
    /// land for pluri-forms to trivialize.
    pub residue_lattice: Lattice,
    /// Ambient directions along which psi is only defined up to translation.
    pub nullspace: Vec<Vec<Rat>>,
}

impl LogDiscrepancy {
    /// Log discrepancy of the toric valuation of an ambient covector:
    /// the pairing <e, psi>.
    pub fn pair_with(&self, e: &[Int]) -> Rat {
        crate::num::dot_rat(e, &self.psi)
    }

    /// Smallest positive integer r with r*psi in the residue lattice, if
    /// any (searched up to the given bound).
    pub fn integrality_order(&self, bound: u64) -> Option<u64> {
        for r in 1..=bound {
            let scaled: Vec<Rat> = self
                .psi
                .iter()
                .map(|x| x.clone() * Rat::from_integer(Int::from(r)))
                .collect();
            if scaled.iter().all(|x| x.denom() == &Int::from(1)) {
                let v: Vec<Int> = scaled.iter().map(|x| x.numer().clone()).collect();
                if self.residue_lattice.contains(&v) {
                    return Some(r);
                }
            }
        }
        None
    }
}

#[derive(Debug)]
pub enum PsiOutcome {
    Solved(LogDiscrepancy),
    /// No solution: the equations together with the row combination that
    /// certifies inconsistency.
    Infeasible {
        equations: Vec<PsiEquation>,
        combination: Vec<Rat>,
    },
}

/// Shared context of a classified pair: the conductor, the core and the
/// boundary. Built after the normality preconditions are enforced.
pub struct PairContext<'a> {
    pub mc: &'a MonoidalComplex,
    pub boundary: Boundary,
    pub conductor: ConductorFan,
    pub core: ConeId,
    pub incidences: IncidenceTable,
}

impl<'a> PairContext<'a> {
    pub fn new(mc: &'a MonoidalComplex, boundary: Boundary) -> Result<Self, LogPairError> {
        let SemigroupData::LatticeFamily(_) = mc.data() else {
            return Err(LogPairError::Normality(
                NormalityError::RequiresLatticeFamily,
            ));
        };
        let s2 = is_s2(mc, None);
        if !s2.holds {
            return Err(LogPairError::PreconditionFailed(format!(
                "complex is not S2: {:?}",
                s2.witness
            )));
        }
        let wn = is_weakly_normal(mc, None);
        if !wn.holds {
            return Err(LogPairError::PreconditionFailed(format!(
                "complex is not weakly normal: {:?}",
                wn.witness
            )));
        }
        boundary.validate_support(mc)?;
        let conductor = conductor_fan(mc)?;
        let core = core(mc)?.cone;
        let incidences = incidence_table(mc);
        Ok(PairContext {
            mc,
            boundary,
            conductor,
            core,
            incidences,
        })
    }

    /// Coefficient of the codimension-one cone in C-bar + B-bar: one on
    /// conductor components, the boundary coefficient otherwise.
    pub fn cbar_coeff(&self, tau: &ConeId) -> Rat {
        if self.conductor.contains(tau) {
            Rat::from_integer(Int::from(1))
        } else {
            self.boundary.coeff(tau)
        }
    }

    /// The residue lattice S_core - S_core.
    pub fn residue_lattice(&self) -> Lattice {
        self.mc.lattice_at(&self.core)
    }

    /// All (facet, covered face, functional) equations rows, in the order
    /// used by the psi system.
    fn equation_sites(&self) -> Vec<(ConeId, ConeId, Vec<Int>)> {
        let mut out = Vec::new();
        for f in self.mc.fan().maximal() {
            let functionals = cone_functionals(self.mc, f);
            for (tau, a) in functionals {
                out.push((f.clone(), tau, a));
            }
        }
        out
    }

    pub fn solve_psi(&self) -> PsiOutcome {
        let lat = self.residue_lattice();
        let k_rows = lat.basis_rows();
        let mut equations = Vec::new();
        let mut rows: Vec<Vec<Rat>> = Vec::new();
        let mut rhs: Vec<Rat> = Vec::new();
        for (facet, tau, a) in self.equation_sites() {
            let flat = self.mc.lattice_at(&facet);
            let covector: Vec<Rat> = k_rows
                .iter()
                .map(|k| {
                    let coords = flat
                        .coords_of(k)
                        .expect("residue lattice lies in facet lattice");
                    Rat::from_integer(dot(&a, &coords))
                })
                .collect();
            let r = Rat::from_integer(Int::from(1)) - self.cbar_coeff(&tau);
            rows.push(covector.clone());
            rhs.push(r.clone());
            equations.push(PsiEquation {
                facet,
                tau,
                covector,
                rhs: r,
            });
        }
        match solve_rational(&rows, &rhs) {
            LinSolve::Inconsistent { combination } => PsiOutcome::Infeasible {
                equations,
                combination,
            },
            LinSolve::Solvable {
                particular,
                nullspace,
            } => {
                let to_ambient = |y: &[Rat]| -> Vec<Rat> {
                    let d = self.mc.ambient_rank();
                    let mut out = vec![Rat::from_integer(Int::zero()); d];
                    for (i, row) in k_rows.iter().enumerate() {
                        for j in 0..d {
                            out[j] =
                                out[j].clone() + y[i].clone() * Rat::from_integer(row[j].clone());
                        }
                    }
                    out
                };
                PsiOutcome::Solved(LogDiscrepancy {
                    psi: to_ambient(&particular),
                    residue_lattice: lat,
                    nullspace: nullspace.iter().map(|v| to_ambient(v)).collect(),
                })
            }
        }
    }
}

/// Solves the facet-normal equations for the log discrepancy function,
/// constrained to the span of the residue lattice.
pub fn solve_psi(mc: &MonoidalComplex, boundary: &Boundary) -> Result<PsiOutcome, LogPairError> {
    let ctx = PairContext::new(mc, boundary.clone())?;
    Ok(ctx.solve_psi())
}

#[derive(Clone, Debug)]
pub struct CycleCheck {
    pub cycle: Vec<ConeId>,
    pub value: KScalar,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct Orientability {
    pub n: u64,
    pub orientable: bool,
    pub failing_cycle: Option<CycleCheck>,
    /// In characteristic zero an odd-n verdict depends on the canonical
    /// orientation choices; even-n verdicts do not.
    pub odd_n_caveat: bool,
}

struct CycleData {
    /// Facets of the cycle, for reporting.
    facets: Vec<ConeId>,
    /// Signed cycle value: the product of the ratios e_{tau<F'}/e_{tau<F}.
    value: KScalar,
}

/// Fundamental cycles of the facet graph with respect to a BFS spanning
/// forest, each with its signed incidence-ratio product.
fn fundamental_cycles(mc: &MonoidalComplex) -> Vec<CycleData> {
    let graph = facet_graph(mc);
    let table = incidence_table(mc);
    let p = mc.characteristic();
    let edge_factor = |from: usize, to: usize, tau: &ConeId| -> KScalar {
        let f_from = &graph.vertices[from];
        let f_to = &graph.vertices[to];
        let e = |f: &ConeId| -> KScalar {
            let d = table.get(tau, f);
            let eps = residue_sign(mc, f, tau);
            KScalar::from_int(p, &(Int::from(eps as i32) * d.clone()))
        };
        e(f_to).div(&e(f_from))
    };
    let n = graph.vertices.len();
    let mut potential: Vec<Option<KScalar>> = vec![None; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut tree_edges: BTreeSet<usize> = BTreeSet::new();
    for root in 0..n {
        if potential[root].is_some() {
            continue;
        }
        potential[root] = Some(KScalar::one(p));
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for (ei, (a, b, tau)) in graph.edges.iter().enumerate() {
                let (u, w) = if *a == v {
                    (*a, *b)
                } else if *b == v {
                    (*b, *a)
                } else {
                    continue;
                };
                if potential[w].is_some() {
                    continue;
                }
                potential[w] = Some(potential[u].clone().unwrap().mul(&edge_factor(u, w, tau)));
                parent[w] = Some(u);
                tree_edges.insert(ei);
                queue.push_back(w);
            }
        }
    }
    let mut cycles = Vec::new();
    for (ei, (a, b, tau)) in graph.edges.iter().enumerate() {
        if tree_edges.contains(&ei) {
            continue;
        }
        let value = potential[*a]
            .clone()
            .unwrap()
            .mul(&edge_factor(*a, *b, tau))
            .div(potential[*b].as_ref().unwrap());
        // facet path for the witness: b -> root, then root -> a, then the edge
        let path = |mut v: usize| -> Vec<usize> {
            let mut p = vec![v];
            while let Some(u) = parent[v] {
                p.push(u);
                v = u;
            }
            p
        };
        let mut facets: Vec<ConeId> = path(*a)
            .into_iter()
            .rev()
            .chain(path(*b))
            .map(|v| graph.vertices[v].clone())
            .collect();
        facets.dedup();
        cycles.push(CycleData { facets, value });
    }
    cycles
}

/// n-orientability: every fundamental cycle's signed product of incidence
/// ratios is an n-th root of unity in the base field.
pub fn is_n_orientable(mc: &MonoidalComplex, n: u64) -> Result<Orientability, LogPairError> {
    let oc = is_1_connected(mc);
    if !oc.connected {
        return Err(LogPairError::PreconditionFailed(
            "fan is not 1-connected".into(),
        ));
    }
    require_unit_incidences(mc)?;
    let odd_n_caveat = mc.characteristic() == 0 && n % 2 == 1;
    for c in fundamental_cycles(mc) {
        if !c.value.pow(n).is_one() {
            return Ok(Orientability {
                n,
                orientable: false,
                failing_cycle: Some(CycleCheck {
                    cycle: c.facets,
                    value: c.value,
                    ok: false,
                }),
                odd_n_caveat,
            });
        }
    }
    Ok(Orientability {
        n,
        orientable: true,
        failing_cycle: None,
        odd_n_caveat,
    })
}

/// Q-orientability: some positive power works. In characteristic zero this
/// means every cycle value is +-1 (equivalently the unsigned products are
/// 1); in characteristic p the values have finite order, so it always
/// holds.
pub fn q_orientable(mc: &MonoidalComplex) -> Result<(bool, Option<CycleCheck>), LogPairError> {
    let oc = is_1_connected(mc);
    if !oc.connected {
        return Err(LogPairError::PreconditionFailed(
            "fan is not 1-connected".into(),
        ));
    }
    require_unit_incidences(mc)?;
    for c in fundamental_cycles(mc) {
        if c.value.order().is_none() {
            return Ok((
                false,
                Some(CycleCheck {
                    cycle: c.facets,
                    value: c.value,
                    ok: false,
                }),
            ));
        }
    }
    Ok((true, None))
}

/// In positive characteristic the incidence ratios must be units, which is
/// exactly weak normality.
fn require_unit_incidences(mc: &MonoidalComplex) -> Result<(), LogPairError> {
    if mc.characteristic() != 0 {
        let wn = is_weakly_normal(mc, None);
        if !wn.holds {
            return Err(LogPairError::PreconditionFailed(
                "incidence numbers are not units in the base field".into(),
            ));
        }
    }
    Ok(())
}

#[derive(Debug)]
pub struct ClassificationReport {
    pub is_weakly_normal_log_pair: bool,
    pub psi: Option<LogDiscrepancy>,
    pub psi_infeasible: Option<(Vec<PsiEquation>, Vec<Rat>)>,
    pub q_orientable: bool,
    pub orientability_witness: Option<CycleCheck>,
    pub is_wlc: bool,
    pub is_slc: bool,
    /// First codimension-one cone violating the nodal condition, when slc
    /// fails for combinatorial reasons.
    pub nodal_witness: Option<ConeId>,
    pub non_wlc_locus: Vec<ConeId>,
    pub invertibility_orders: Vec<u64>,
    /// Odd entries of `invertibility_orders` depend on canonical
    /// orientations in characteristic zero.
    pub odd_order_caveat: bool,
}

/// Integral feasibility of a trivializing monomial at level n: some m in
/// the residue lattice with <e_{tau,F}, m> = ceil(n (1 - coeff(tau))) at
/// every site.
pub(crate) fn level_feasible(ctx: &PairContext, n: u64) -> bool {
    let lat = ctx.residue_lattice();
    let k_rows = lat.basis_rows();
    let mut rows: Vec<Vec<Int>> = Vec::new();
    let mut rhs: Vec<Int> = Vec::new();
    for (facet, tau, a) in ctx.equation_sites() {
        let flat = ctx.mc.lattice_at(&facet);
        let row: Vec<Int> = k_rows
            .iter()
            .map(|k| {
                let coords = flat
                    .coords_of(k)
                    .expect("residue lattice lies in facet lattice");
                dot(&a, &coords)
            })
            .collect();
        let target = (Rat::from_integer(Int::from(n))
            * (Rat::from_integer(Int::from(1)) - ctx.cbar_coeff(&tau)))
        .ceil()
        .to_integer();
        rows.push(row);
        rhs.push(target);
    }
    if rows.is_empty() {
        return true;
    }
    let cols = k_rows.len();
    let a = Mat::from_rows(cols, rows);
    crate::lattice::solve_integral(&a, &rhs, &crate::lattice::Sublattice::full(cols)).is_some()
}

/// Levels n in 1..=n_max at which the pluricanonical sheaf trivializes:
/// n-orientability plus integral feasibility of the monomial.
pub fn invertibility_orders(ctx: &PairContext, n_max: u64) -> Result<Vec<u64>, LogPairError> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        if is_n_orientable(ctx.mc, n)?.orientable && level_feasible(ctx, n) {
            out.push(n);
        }
    }
    Ok(out)
}

pub fn classify(
    mc: &MonoidalComplex,
    boundary: &Boundary,
    n_max: u64,
) -> Result<ClassificationReport, LogPairError> {
    let ctx = PairContext::new(mc, boundary.clone())?;
    let (q_ok, q_witness) = q_orientable(mc)?;
    let psi_outcome = ctx.solve_psi();
    let (psi, psi_infeasible) = match psi_outcome {
        PsiOutcome::Solved(l) => (Some(l), None),
        PsiOutcome::Infeasible {
            equations,
            combination,
        } => (None, Some((equations, combination))),
    };
    let is_wnlp = psi.is_some() && q_ok;
    let all_at_most_one = ctx
        .boundary
        .entries()
        .all(|(_, c)| *c <= Rat::from_integer(Int::from(1)));
    let is_wlc = is_wnlp && all_at_most_one;
    if let Some(l) = &psi {
        // cross-check: wlc iff psi lies in the core cone
        let in_core = mc.fan().cone(&ctx.core).contains_rat(&l.psi);
        if is_wnlp && in_core != all_at_most_one {
            return Err(LogPairError::Internal(
                "psi membership in the core disagrees with the coefficient bound".into(),
            ));
        }
    }
    // nodal in codimension one
    let mut nodal_witness = None;
    for tau in mc.fan().codim_one_cones() {
        let facets = mc.fan().facets_containing(&tau).to_vec();
        let ok = match facets.len() {
            1 => {
                let d = ctx.incidences.get(&tau, &facets[0]);
                *d == Int::from(1) || *d == Int::from(2)
            }
            2 => facets
                .iter()
                .all(|f| *ctx.incidences.get(&tau, f) == Int::from(1)),
            _ => false,
        };
        if !ok {
            nodal_witness = Some(tau);
            break;
        }
    }
    let is_slc = is_wlc && nodal_witness.is_none();
    let non_wlc_locus: Vec<ConeId> = ctx
        .boundary
        .entries()
        .filter(|(_, c)| **c > Rat::from_integer(Int::from(1)))
        .map(|(t, _)| t.clone())
        .collect();
    let orders = if is_wnlp {
        invertibility_orders(&ctx, n_max)?
    } else {
        Vec::new()
    };
    Ok(ClassificationReport {
        is_weakly_normal_log_pair: is_wnlp,
        psi,
        psi_infeasible,
        q_orientable: q_ok,
        orientability_witness: q_witness,
        is_wlc,
        is_slc,
        nodal_witness,
        non_wlc_locus,
        invertibility_orders: orders,
        odd_order_caveat: mc.characteristic() == 0,
    })
}

/// The lc centers: fan cones containing psi and not contained in any prime
/// with boundary coefficient above one. Sorted by codimension, then id.
pub fn lc_centers(mc: &MonoidalComplex, boundary: &Boundary, psi: &LogDiscrepancy) -> Vec<ConeId> {
    let over_one: Vec<&ConeId> = boundary
        .entries()
        .filter(|(_, c)| **c > Rat::from_integer(Int::from(1)))
        .map(|(t, _)| t)
        .collect();
    let mut centers: Vec<ConeId> = mc
        .fan()
        .ids()
        .filter(|id| {
            let c = mc.fan().cone(id);
            c.contains_rat(&psi.psi) && !over_one.iter().any(|t| mc.fan().cone(t).contains_cone(c))
        })
        .cloned()
        .collect();
    let max_dim = mc
        .fan()
        .maximal()
        .iter()
        .map(|f| mc.fan().cone(f).dim())
        .max()
        .unwrap_or(0);
    centers.sort_by_key(|id| (max_dim - mc.fan().cone(id).dim().min(max_dim), id.clone()));
    centers
}

/// The unique minimal lc center: the fan cone containing psi in its
/// relative interior. The certificate re-verifies that it is normal (all
/// face lattices are traces of its lattice).
pub fn minimal_lc_center(
    mc: &MonoidalComplex,
    boundary: &Boundary,
    psi: &LogDiscrepancy,
) -> Result<(ConeId, bool), LogPairError> {
    if !boundary
        .entries()
        .all(|(_, c)| *c <= Rat::from_integer(Int::from(1)))
    {
        return Err(LogPairError::NotWlc);
    }
    let Some(id) = mc.fan().cone_of_relint(&psi.psi) else {
        return Err(LogPairError::NotWlc);
    };
    let lat = mc.lattice_at(&id);
    let normal = mc
        .fan()
        .faces_of(&id)
        .iter()
        .all(|gamma| mc.lattice_at(gamma) == lattice_intersect(&lat, &mc.saturated_at(gamma)));
    Ok((id, normal))
}

#[derive(Debug)]
pub struct LcsData {
    /// None when the pair is klt (no positive-codimension lc centers).
    pub complex: Option<MonoidalComplex>,
    /// All cones of the LCS sub-complex (downward closed).
    pub cones: BTreeSet<ConeId>,
    /// Its maximal cones: the codimension-one lc centers.
    pub maximal: Vec<ConeId>,
    pub pure_codim_one: bool,
    pub s2: Option<Verdict>,
    pub weakly_normal: Option<Verdict>,
}

/// The LCS locus: the union of the lc centers of positive codimension,
/// as a monoidal complex with the restricted lattice family.
pub fn lcs_locus(
    mc: &MonoidalComplex,
    boundary: &Boundary,
    psi: &LogDiscrepancy,
) -> Result<LcsData, LogPairError> {
    if !boundary
        .entries()
        .all(|(_, c)| *c <= Rat::from_integer(Int::from(1)))
    {
        return Err(LogPairError::NotWlc);
    }
    let centers = lc_centers(mc, boundary, psi);
    let positive: Vec<ConeId> = centers
        .into_iter()
        .filter(|id| !mc.fan().is_maximal(id))
        .collect();
    if positive.is_empty() {
        return Ok(LcsData {
            complex: None,
            cones: BTreeSet::new(),
            maximal: Vec::new(),
            pure_codim_one: true,
            s2: None,
            weakly_normal: None,
        });
    }
    let mut cones: BTreeSet<ConeId> = BTreeSet::new();
    for id in &positive {
        for f in mc.fan().faces_of(id) {
            cones.insert(f);
        }
    }
    let maximal: Vec<ConeId> = cones
        .iter()
        .filter(|i| {
            !cones
                .iter()
                .any(|j| *j != **i && mc.fan().cone(j).contains_cone(mc.fan().cone(i)))
        })
        .cloned()
        .collect();
    let facet_dim = mc.fan().cone(&mc.fan().maximal()[0]).dim();
    let pure = maximal
        .iter()
        .all(|id| mc.fan().cone(id).dim() + 1 == facet_dim);
    let y = mc
        .restrict_to(&cones)
        .map_err(|v| LogPairError::Internal(format!("LCS restriction invalid: {v:?}")))?;
    let s2 = is_s2(&y, None);
    let wn = is_weakly_normal(&y, None);
    Ok(LcsData {
        complex: Some(y),
        cones,
        maximal,
        pure_codim_one: pure,
        s2: Some(s2),
        weakly_normal: Some(wn),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::coordinate_arrangement;
    use crate::fixtures;
    use crate::num::rat;

    fn r(n: i32, d: i32) -> Rat {
        rat::<Int>(n, d)
    }

    fn rvec(v: &[(i32, i32)]) -> Vec<Rat> {
        v.iter().map(|&(n, d)| r(n, d)).collect()
    }

    #[test]
    fn psi_for_cusp_without_boundary() {
        let mc = fixtures::cusp_cone();
        let out = solve_psi(&mc, &Boundary::zero()).unwrap();
        match out {
            PsiOutcome::Solved(l) => {
                assert_eq!(l.psi, rvec(&[(1, 1), (1, 1)]));
                assert!(l.nullspace.is_empty());
                assert_eq!(l.integrality_order(10), Some(1));
            }
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn psi_for_cusp_with_boundary() {
        let mc = fixtures::cusp_cone();
        let tau1 = fixtures::cusp_ray1(&mc);
        let b = Boundary::from_coeffs([(tau1.clone(), r(1, 1))].into());
        match solve_psi(&mc, &b).unwrap() {
            PsiOutcome::Solved(l) => {
                assert_eq!(l.psi, rvec(&[(1, 2), (0, 1)]));
                assert_eq!(l.integrality_order(10), Some(2));
            }
            _ => panic!("expected a solution"),
        }
        let b = Boundary::from_coeffs([(tau1, r(3, 2))].into());
        match solve_psi(&mc, &b).unwrap() {
            PsiOutcome::Solved(l) => assert_eq!(l.psi, rvec(&[(1, 4), (-1, 2)])),
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn psi_zero_for_coordinate_arrangements() {
        for (n, p) in [(3usize, 1usize), (4, 2), (4, 1)] {
            let mc = coordinate_arrangement(n, p);
            match solve_psi(&mc, &Boundary::zero()).unwrap() {
                PsiOutcome::Solved(l) => {
                    assert!(l.psi.iter().all(|x| x.is_zero()), "({n},{p})");
                }
                _ => panic!("expected a solution for ({n},{p})"),
            }
        }
    }

    #[test]
    fn orientability_of_three_fan_fixture() {
        let mc = fixtures::three_fan_half_ratio(0);
        let o = is_n_orientable(&mc, 2).unwrap();
        assert!(!o.orientable);
        let w = o.failing_cycle.unwrap();
        // the unsigned cycle product is 1/2 or 2 depending on direction
        match &w.value {
            KScalar::Rat(v) => {
                let half = r(1, 2);
                let two = r(2, 1);
                assert!(*v == half || *v == two || *v == -half || *v == -two);
            }
            _ => panic!("characteristic zero expected"),
        }

        let mc3 = fixtures::three_fan_half_ratio(3);
        let o = is_n_orientable(&mc3, 2).unwrap();
        assert!(o.orientable, "(1/2)^2 = 1 in F_3");
    }

    #[test]
    fn constant_incidences_are_even_orientable() {
        for mc in [coordinate_arrangement(3, 1), coordinate_arrangement(4, 2)] {
            for n in [2u64, 4, 6] {
                assert!(is_n_orientable(&mc, n).unwrap().orientable);
            }
        }
    }

    #[test]
    fn classify_cusp_examples() {
        let mc = fixtures::cusp_cone();
        let report = classify(&mc, &Boundary::zero(), 6).unwrap();
        assert!(report.is_weakly_normal_log_pair);
        assert!(report.is_wlc);
        assert!(report.is_slc);
        assert_eq!(report.invertibility_orders, vec![1, 2, 3, 4, 5, 6]);

        let tau1 = fixtures::cusp_ray1(&mc);
        let b = Boundary::from_coeffs([(tau1.clone(), r(1, 1))].into());
        let report = classify(&mc, &b, 6).unwrap();
        assert!(report.is_wlc);
        assert_eq!(report.invertibility_orders, vec![2, 4, 6]);

        let b = Boundary::from_coeffs([(tau1.clone(), r(3, 2))].into());
        let report = classify(&mc, &b, 6).unwrap();
        assert!(report.is_weakly_normal_log_pair);
        assert!(!report.is_wlc);
        assert_eq!(report.non_wlc_locus, vec![tau1]);
    }

    #[test]
    fn classify_rejects_non_orientable_in_char_zero() {
        let mc = fixtures::three_fan_half_ratio(0);
        let report = classify(&mc, &Boundary::zero(), 4).unwrap();
        assert!(!report.q_orientable);
        assert!(!report.is_weakly_normal_log_pair);
        assert!(report.orientability_witness.is_some());
    }

    #[test]
    fn classify_coordinate_arrangement() {
        let mc = coordinate_arrangement(4, 2);
        let report = classify(&mc, &Boundary::zero(), 4).unwrap();
        assert!(report.is_wlc);
        assert!(!report.is_slc); // codimension-one cones lie in three facets
        assert!(report.invertibility_orders.contains(&2));
    }

    #[test]
    fn centers_for_cusp() {
        let mc = fixtures::cusp_cone();
        let b = Boundary::zero();
        let report = classify(&mc, &b, 2).unwrap();
        let psi = report.psi.unwrap();
        let centers = lc_centers(&mc, &b, &psi);
        assert_eq!(centers.len(), 1); // klt: the facet only
        let (min, normal) = minimal_lc_center(&mc, &b, &psi).unwrap();
        assert!(mc.fan().is_maximal(&min));
        assert!(normal);
        let lcs = lcs_locus(&mc, &b, &psi).unwrap();
        assert!(lcs.complex.is_none());

        let tau1 = fixtures::cusp_ray1(&mc);
        let b = Boundary::from_coeffs([(tau1.clone(), r(1, 1))].into());
        let report = classify(&mc, &b, 2).unwrap();
        let psi = report.psi.unwrap();
        let centers = lc_centers(&mc, &b, &psi);
        assert_eq!(centers.len(), 2); // the facet and tau1
        let (min, _) = minimal_lc_center(&mc, &b, &psi).unwrap();
        assert_eq!(min, tau1);
        let lcs = lcs_locus(&mc, &b, &psi).unwrap();
        assert_eq!(lcs.maximal, vec![tau1]);
        assert!(lcs.pure_codim_one);
    }

    #[test]
    fn centers_for_coordinate_arrangement() {
        let mc = coordinate_arrangement(3, 1);
        let b = Boundary::zero();
        let report = classify(&mc, &b, 2).unwrap();
        let psi = report.psi.unwrap();
        let centers = lc_centers(&mc, &b, &psi);
        assert_eq!(centers.len(), 7); // psi = 0 lies in every cone
        let (min, normal) = minimal_lc_center(&mc, &b, &psi).unwrap();
        assert_eq!(mc.fan().cone(&min).dim(), 0);
        assert!(normal);
        // the LCS locus is the next coordinate arrangement
        let lcs = lcs_locus(&mc, &b, &psi).unwrap();
        let y = lcs.complex.unwrap();
        let expected = coordinate_arrangement(3, 2);
        let y_ids: Vec<_> = y.fan().ids().cloned().collect();
        let e_ids: Vec<_> = expected.fan().ids().cloned().collect();
        assert_eq!(y_ids, e_ids);
        assert!(lcs.s2.unwrap().holds);
        assert!(lcs.weakly_normal.unwrap().holds);
    }

    #[test]
    fn psi_infeasibility_certificate_reverifies() {
        // on the 1-3 two-facet fixture the zero boundary demands pairings
        // 1 and 3 of psi against the shared direction: inconsistent
        let mc = crate::fixtures::two_facets_d13(0);
        match solve_psi(&mc, &Boundary::zero()).unwrap() {
            PsiOutcome::Infeasible {
                equations,
                combination,
            } => {
                assert_eq!(combination.len(), equations.len());
                let n = equations[0].covector.len();
                let mut lhs = vec![Rat::from_integer(Int::zero()); n];
                let mut rhs = Rat::from_integer(Int::zero());
                for (c, eq) in combination.iter().zip(&equations) {
                    for j in 0..n {
                        lhs[j] = lhs[j].clone() + c.clone() * eq.covector[j].clone();
                    }
                    rhs = rhs + c.clone() * eq.rhs.clone();
                }
                assert!(
                    lhs.iter().all(|x| x.is_zero()),
                    "combination annihilates the rows"
                );
                assert!(!rhs.is_zero(), "but not the right-hand side");
            }
            _ => panic!("expected infeasibility"),
        }
    }

    #[test]
    fn log_discrepancy_evaluator() {
        let mc = fixtures::cusp_cone();
        match solve_psi(&mc, &Boundary::zero()).unwrap() {
            PsiOutcome::Solved(l) => {
                // a non-facet covector of the dual cone
                assert_eq!(l.pair_with(&[Int::from(1), Int::from(0)]), r(1, 1));
                assert_eq!(l.pair_with(&[Int::from(2), Int::from(-1)]), r(1, 1));
            }
            _ => panic!("expected a solution"),
        }
    }

    #[test]
    fn boundary_support_validation() {
        let mc = coordinate_arrangement(3, 1);
        // every codimension-one cone lies in two facets: no smooth primes
        let some_ray = mc.fan().codim_one_cones()[0].clone();
        let b = Boundary::from_coeffs([(some_ray, r(1, 2))].into());
        assert!(matches!(
            solve_psi(&mc, &b),
            Err(LogPairError::BoundaryUnsupported { .. })
        ));
    }
}
