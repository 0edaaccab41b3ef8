//! Residue data of classified pairs: orientation signs of codimension-one
//! restrictions, residue constants glued along the facet graph, differents
//! on codimension-one lc centers, the gluing criterion for the LCS locus
//! and higher-codimension residue chains for complexes with normal
//! components.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::complex::{facet_graph, ConeId, MonoidalComplex};
use crate::field::KScalar;
use crate::lattice::{lattice_intersect, orientation_sign, sublattice_index, Index, OrientedBasis};
use crate::logpair::{
    cone_functionals, lcs_locus, level_feasible, pair_in_lattice, Boundary, LogDiscrepancy,
    LogPairError, PairContext, PsiOutcome,
};
use crate::mat::{hnf, solve_against_hnf, Mat};
use crate::normality::{conductor_fan, has_normal_components, is_s2, is_weakly_normal};
use crate::num::{clear_denominators, content, dot, primitive};
use crate::{Int, Rat};

#[derive(Debug, Error)]
pub enum ResidueError {
    #[error(transparent)]
    LogPair(#[from] LogPairError),
    #[error("r = {0} must be even")]
    OddExponent(u64),
    #[error("the pluricanonical sheaf of level {0} is not invertible")]
    NotInvertible(u64),
    #[error("orientability cycle check failed on {0:?}")]
    NotOrientable(Vec<ConeId>),
    #[error("{0} is not a codimension-one lc center")]
    NotACodimOneCenter(ConeId),
    #[error("{0} is not an lc center")]
    NotAnLcCenter(ConeId),
    #[error("the complex does not have normal components")]
    NotNormalComponents,
    #[error("facets induce different differents on {center}: {detail}")]
    InconsistentDifferent { center: ConeId, detail: String },
    #[error("LCS gluing fails at ({0}, {1}, {2}, {3})")]
    GlueCheckFailed(ConeId, ConeId, ConeId, ConeId),
    #[error("the LCS locus is empty")]
    LcsEmpty,
}

/// Orientation sign of the codimension-one residue from an ambient fan cone
/// to a face, with both lattices carrying their canonical (HNF row order)
/// orientations. The sign is the product of
///   - the orientation of (u, basis of the trace lattice) against the
///     canonical basis of the ambient lattice, where u pairs to one with
///     the facet functional, and
///   - the orientation of the face lattice inside the trace lattice.
/// It does not depend on the choice of u (asserted by trying two).
pub fn residue_sign(mc: &MonoidalComplex, ambient: &ConeId, face: &ConeId) -> i8 {
    let lat = mc.lattice_at(ambient);
    let face_lat = mc.lattice_at(face);
    let trace = lattice_intersect(&lat, &mc.saturated_at(face));
    let functional = cone_functionals(mc, ambient)
        .remove(face)
        .expect("face must be covered by the ambient cone");
    // u in the ambient lattice with <e, u> = 1 (coordinates of u solve a
    // single integral equation against the primitive functional)
    let col = Mat::from_rows(1, functional.iter().map(|x| vec![x.clone()]).collect());
    let res = hnf(&col);
    let z = solve_against_hnf(&res.h, &res.pivots, &[Int::from(1)])
        .expect("primitive functional attains one");
    let y = res.u.transpose().mul_vec(&z);
    let u_ambient = lat.basis().vec_mul(&y);
    let sign_for = |u: &[Int]| -> i8 {
        let mut rows = vec![u.to_vec()];
        rows.extend(trace.basis_rows());
        let ob = OrientedBasis::new(mc.ambient_rank(), rows);
        orientation_sign(&OrientedBasis::canonical(&lat), &ob)
            .expect("(u, trace basis) is a basis of the ambient lattice")
    };
    let eps1 = sign_for(&u_ambient);
    if trace.rank() > 0 {
        // independence of the choice of u
        let shift = trace.basis_rows()[0].clone();
        let u2: Vec<Int> = u_ambient
            .iter()
            .zip(&shift)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        debug_assert_eq!(eps1, sign_for(&u2), "residue sign must not depend on u");
    }
    // orientation of the face lattice inside the trace lattice
    let coords: Vec<Vec<Int>> = face_lat
        .basis_rows()
        .iter()
        .map(|r| trace.coords_of(r).expect("face lattice lies in the trace"))
        .collect();
    let det = Mat::from_rows(trace.rank(), coords).det();
    let eps2: i8 = if det.is_negative() { -1 } else { 1 };
    eps1 * eps2
}

/// The boundary induced on the normalization of a codimension-one lc
/// center: coefficients at the covered faces of the center, against the
/// center's difference lattice.
#[derive(Clone, Debug)]
pub struct Different {
    pub center: ConeId,
    pub coefficients: BTreeMap<ConeId, Rat>,
}

/// Adjunction inside one ambient cone: given coefficients on the covered
/// faces of `ambient`, computes the induced multiplicities on the covered
/// faces of the center `tau`, measured against the trace lattice
/// (lattice of ambient) cap span(tau).
///
/// For each covered face q of tau, the unique facet functional of the
/// ambient cone projecting onto the ray of q's functional gives the
/// multiplier: mult_q = 1 - (1 - coeff(tau_j)) / q_mult.
fn trace_level_different(
    mc: &MonoidalComplex,
    ambient: &ConeId,
    coeffs: &BTreeMap<ConeId, Rat>,
    tau: &ConeId,
) -> Result<BTreeMap<ConeId, (Rat, Vec<Int>)>, ResidueError> {
    let lat = mc.lattice_at(ambient);
    let functionals = cone_functionals(mc, ambient);
    let trace = lattice_intersect(&lat, &mc.saturated_at(tau));
    // trace basis in ambient-lattice coordinates
    let c_rows: Vec<Vec<Int>> = trace
        .basis_rows()
        .iter()
        .map(|r| lat.coords_of(r).expect("trace lies in the ambient lattice"))
        .collect();
    let project = |a: &[Int]| -> Vec<Int> { c_rows.iter().map(|c| dot(c, a)).collect() };
    // the center's facets, as functionals on the trace lattice
    let tau_cone = mc.fan().cone(tau);
    let to_trace_coords = |v: &[Int]| -> Vec<Int> {
        let p: Vec<Rat> = v.iter().map(|x| Rat::from_integer(x.clone())).collect();
        let c = trace
            .rational_coords_of(&p)
            .expect("generator lies in the span of the trace");
        primitive(&clear_denominators(&c), false)
    };
    let coord_rays: Vec<Vec<Int>> = tau_cone.rays().iter().map(|r| to_trace_coords(r)).collect();
    let coord_lines: Vec<Vec<Int>> = tau_cone
        .lineality()
        .basis_rows()
        .iter()
        .map(|r| to_trace_coords(r))
        .collect();
    let cc = crate::Cone::from_generators(trace.rank(), &coord_rays, &coord_lines);
    let mut out = BTreeMap::new();
    for q in mc.fan().covered_faces(tau) {
        let q_gens: Vec<Vec<Int>> = mc
            .fan()
            .cone(&q)
            .generator_rows()
            .iter()
            .map(|g| to_trace_coords(g))
            .collect();
        let e_q: Vec<Int> = {
            let matching: Vec<&Vec<Int>> = cc
                .normals()
                .iter()
                .filter(|n| q_gens.iter().all(|g| dot(n, g).is_zero()))
                .collect();
            assert_eq!(matching.len(), 1, "covered face matches one functional");
            matching[0].clone()
        };
        // the unique ambient facet functional projecting onto R+ e_q
        let mut hit: Option<(ConeId, Int)> = None;
        for (tau_j, e_j) in &functionals {
            if tau_j == tau {
                continue;
            }
            let p = project(e_j);
            let c = content(&p);
            if c.is_zero() {
                continue;
            }
            let scaled: Vec<Int> = e_q.iter().map(|x| x.clone() * c.clone()).collect();
            if scaled == p {
                if let Some((prev, _)) = &hit {
                    return Err(ResidueError::InconsistentDifferent {
                        center: tau.clone(),
                        detail: format!(
                            "both {prev} and {tau_j} project onto the functional of {q}"
                        ),
                    });
                }
                hit = Some((tau_j.clone(), c));
            }
        }
        let Some((tau_j, q_mult)) = hit else {
            return Err(ResidueError::InconsistentDifferent {
                center: tau.clone(),
                detail: format!("no ambient functional projects onto the functional of {q}"),
            });
        };
        let coeff = coeffs
            .get(&tau_j)
            .cloned()
            .unwrap_or_else(|| Rat::from_integer(Int::zero()));
        let mult = Rat::from_integer(Int::from(1))
            - (Rat::from_integer(Int::from(1)) - coeff) / Rat::from_integer(q_mult);
        out.insert(q, (mult, e_q));
    }
    Ok(out)
}

/// The different of the pair on a codimension-one lc center, computed by
/// the dual-cone projection inside every facet containing the center and
/// descended to the center's difference lattice; all facets must agree,
/// and the result is cross-checked against the pairing of the center's
/// facet functionals with psi.
pub fn different(
    ctx: &PairContext,
    psi: &LogDiscrepancy,
    tau: &ConeId,
) -> Result<Different, ResidueError> {
    let mc = ctx.mc;
    let facets = mc.fan().facets_containing(tau).to_vec();
    let is_codim1 = !facets.is_empty()
        && facets
            .iter()
            .all(|f| mc.fan().cone(f).dim() == mc.fan().cone(tau).dim() + 1);
    if !is_codim1 || ctx.cbar_coeff(tau) != Rat::from_integer(Int::from(1)) {
        return Err(ResidueError::NotACodimOneCenter(tau.clone()));
    }
    let tau_lat = mc.lattice_at(tau);
    let mut agreed: Option<BTreeMap<ConeId, Rat>> = None;
    for facet in &facets {
        let coeffs: BTreeMap<ConeId, Rat> = mc
            .fan()
            .covered_faces(facet)
            .into_iter()
            .map(|t| {
                let c = ctx.cbar_coeff(&t);
                (t, c)
            })
            .collect();
        let on_trace = trace_level_different(mc, facet, &coeffs, tau)?;
        // descend from the trace lattice to the center's difference
        // lattice: the trace functional restricts to q' times the
        // primitive functional of the center lattice
        let trace = lattice_intersect(&mc.lattice_at(facet), &mc.saturated_at(tau));
        let d_rows: Vec<Vec<Int>> = tau_lat
            .basis_rows()
            .iter()
            .map(|r| {
                trace
                    .coords_of(r)
                    .expect("center lattice lies in the trace")
            })
            .collect();
        let tau_functionals = cone_functionals(mc, tau);
        let mut descended = BTreeMap::new();
        for (q, (mult_bar, e_q_trace)) in on_trace {
            let restricted: Vec<Int> = d_rows.iter().map(|r| dot(r, &e_q_trace)).collect();
            let qp = content(&restricted);
            if qp.is_zero() {
                return Err(ResidueError::InconsistentDifferent {
                    center: tau.clone(),
                    detail: "degenerate restriction of a facet functional".into(),
                });
            }
            let mult = Rat::from_integer(Int::from(1))
                - (Rat::from_integer(Int::from(1)) - mult_bar) / Rat::from_integer(qp);
            // cross-check: 1 - <e_q, psi> against the center's own functional
            let e_q = &tau_functionals[&q];
            let pairing = pair_in_lattice(&tau_lat, e_q, &psi.psi);
            if Rat::from_integer(Int::from(1)) - pairing.clone() != mult {
                return Err(ResidueError::InconsistentDifferent {
                    center: tau.clone(),
                    detail: format!(
                        "projection formula gives {mult} at {q} but <e,psi> gives {}",
                        Rat::from_integer(Int::from(1)) - pairing
                    ),
                });
            }
            descended.insert(q, mult);
        }
        match &agreed {
            None => agreed = Some(descended),
            Some(prev) => {
                if *prev != descended {
                    return Err(ResidueError::InconsistentDifferent {
                        center: tau.clone(),
                        detail: format!("facet {facet} disagrees with an earlier facet"),
                    });
                }
            }
        }
    }
    Ok(Different {
        center: tau.clone(),
        coefficients: agreed.unwrap_or_default(),
    })
}

/// Residue constants c_F (per facet) and c_i (per codimension-one lc
/// center) satisfying c_F = c_i (eps d)^r at every incidence, built by
/// propagation along a spanning tree of the facet graph.
#[derive(Clone, Debug)]
pub struct ResidueDatum {
    pub r: u64,
    pub constants_facets: BTreeMap<ConeId, KScalar>,
    pub constants_primes: BTreeMap<ConeId, KScalar>,
    pub psi: Vec<Rat>,
    pub signs: BTreeMap<(ConeId, ConeId), i8>,
}

impl ResidueDatum {
    /// Re-checks the defining identity on every incidence.
    pub fn verify(&self, ctx: &PairContext) -> bool {
        for (tau, c_i) in &self.constants_primes {
            for facet in ctx.mc.fan().facets_containing(tau) {
                let d = ctx.incidences.get(tau, facet);
                let eps = self.signs[&(tau.clone(), facet.clone())];
                let e = KScalar::from_int(
                    ctx.mc.characteristic(),
                    &(Int::from(eps as i32) * d.clone()),
                )
                .pow(self.r);
                if self.constants_facets[facet] != c_i.mul(&e) {
                    return false;
                }
            }
        }
        true
    }
}

/// An explicit spanning tree edge of the facet graph.
pub type TreeEdge = (ConeId, ConeId, ConeId); // (from facet, to facet, shared face)

fn edge_scalar(ctx: &PairContext, r: u64, tau: &ConeId, facet: &ConeId) -> KScalar {
    let d = ctx.incidences.get(tau, facet);
    let eps = residue_sign(ctx.mc, facet, tau);
    KScalar::from_int(
        ctx.mc.characteristic(),
        &(Int::from(eps as i32) * d.clone()),
    )
    .pow(r)
}

pub fn residue_constants(
    ctx: &PairContext,
    psi: &LogDiscrepancy,
    r: u64,
) -> Result<ResidueDatum, ResidueError> {
    let graph = facet_graph(ctx.mc);
    // BFS spanning tree in canonical vertex order
    let mut edges = Vec::new();
    let mut seen = vec![false; graph.vertices.len()];
    for root in 0..graph.vertices.len() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for (a, b, tau) in &graph.edges {
                let (u, w) = if *a == v {
                    (*a, *b)
                } else if *b == v {
                    (*b, *a)
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    edges.push((
                        graph.vertices[u].clone(),
                        graph.vertices[w].clone(),
                        tau.clone(),
                    ));
                    queue.push_back(w);
                }
            }
        }
    }
    residue_constants_with_tree(ctx, psi, r, &edges)
}

/// Tree-explicit variant used to verify that the constants are independent
/// of the spanning tree.
pub fn residue_constants_with_tree(
    ctx: &PairContext,
    psi: &LogDiscrepancy,
    r: u64,
    tree: &[TreeEdge],
) -> Result<ResidueDatum, ResidueError> {
    if r % 2 != 0 {
        return Err(ResidueError::OddExponent(r));
    }
    if !crate::logpair::is_n_orientable(ctx.mc, r)?.orientable || !level_feasible(ctx, r) {
        return Err(ResidueError::NotInvertible(r));
    }
    let graph = facet_graph(ctx.mc);
    let mut constants_facets: BTreeMap<ConeId, KScalar> = BTreeMap::new();
    let p = ctx.mc.characteristic();
    // roots: any facet not appearing as a tree target
    for f in &graph.vertices {
        if !tree.iter().any(|(_, to, _)| to == f) {
            constants_facets.insert(f.clone(), KScalar::one(p));
        }
    }
    let mut remaining: Vec<&TreeEdge> = tree.iter().collect();
    while !remaining.is_empty() {
        let before = remaining.len();
        remaining.retain(|(from, to, tau)| {
            if let Some(cf) = constants_facets.get(from).cloned() {
                let val = cf
                    .mul(&edge_scalar(ctx, r, tau, to))
                    .div(&edge_scalar(ctx, r, tau, from));
                constants_facets.insert(to.clone(), val);
                false
            } else {
                true
            }
        });
        assert!(
            remaining.len() < before,
            "spanning tree must be connected to roots"
        );
    }
    // every facet must have received a constant
    for f in &graph.vertices {
        if !constants_facets.contains_key(f) {
            return Err(ResidueError::NotOrientable(vec![f.clone()]));
        }
    }
    // cycle consistency across all graph edges
    for (a, b, tau) in &graph.edges {
        let fa = &graph.vertices[*a];
        let fb = &graph.vertices[*b];
        let lhs = constants_facets[fa]
            .mul(&edge_scalar(ctx, r, tau, fb))
            .div(&edge_scalar(ctx, r, tau, fa));
        if lhs != constants_facets[fb] {
            return Err(ResidueError::NotOrientable(vec![fa.clone(), fb.clone()]));
        }
    }
    let mut constants_primes = BTreeMap::new();
    let mut signs = BTreeMap::new();
    for (tau, facet) in ctx.mc.fan().codim1_pairs() {
        signs.insert(
            (tau.clone(), facet.clone()),
            residue_sign(ctx.mc, &facet, &tau),
        );
        if ctx.cbar_coeff(&tau) != Rat::from_integer(Int::from(1)) {
            continue;
        }
        let c = constants_facets[&facet].div(&edge_scalar(ctx, r, &tau, &facet));
        if let Some(prev) = constants_primes.get(&tau) {
            if *prev != c {
                return Err(ResidueError::NotOrientable(vec![
                    tau.clone(),
                    facet.clone(),
                ]));
            }
        } else {
            constants_primes.insert(tau.clone(), c);
        }
    }
    let datum = ResidueDatum {
        r,
        constants_facets,
        constants_primes,
        psi: psi.psi.clone(),
        signs,
    };
    debug_assert!(datum.verify(ctx));
    Ok(datum)
}

#[derive(Clone, Debug)]
pub struct GlueCheck {
    pub ok: bool,
    pub witness: Option<(ConeId, ConeId, ConeId, ConeId)>,
}

/// The gluing criterion for codimension-one residues onto the LCS locus:
/// at every component Q of the non-normal locus of Y = LCS and every facet
/// F containing it, the two codimension-one faces E1, E2 of F over Q must
/// satisfy (d_{Q in E1} d_{E1 in F})^r = (d_{Q in E2} d_{E2 in F})^r.
pub fn lcs_glue_check(
    ctx: &PairContext,
    psi: &LogDiscrepancy,
    r: u64,
) -> Result<GlueCheck, ResidueError> {
    if r % 2 != 0 {
        return Err(ResidueError::OddExponent(r));
    }
    let lcs = lcs_locus(ctx.mc, &ctx.boundary, psi)?;
    let Some(y) = &lcs.complex else {
        return Err(ResidueError::LcsEmpty);
    };
    let y_conductor = conductor_fan(y).map_err(LogPairError::Normality)?;
    let p = ctx.mc.characteristic();
    let d_of = |inner: &ConeId, outer: &ConeId| -> Int {
        let trace = lattice_intersect(&ctx.mc.lattice_at(outer), &ctx.mc.saturated_at(inner));
        match sublattice_index(&ctx.mc.lattice_at(inner), &trace) {
            Ok(Index::Finite(n)) => n,
            _ => unreachable!("incidence indices are finite"),
        }
    };
    for q in &y_conductor.components {
        for facet in ctx.mc.fan().facets_containing(q) {
            let between: Vec<ConeId> = ctx
                .mc
                .fan()
                .covered_faces(facet)
                .into_iter()
                .filter(|e| ctx.mc.fan().cone(e).contains_cone(ctx.mc.fan().cone(q)))
                .collect();
            if between.len() != 2 {
                continue;
            }
            let val = |e: &ConeId| -> KScalar {
                KScalar::from_int(p, &(d_of(q, e) * d_of(e, facet))).pow(r)
            };
            if val(&between[0]) != val(&between[1]) {
                return Ok(GlueCheck {
                    ok: false,
                    witness: Some((
                        q.clone(),
                        facet.clone(),
                        between[0].clone(),
                        between[1].clone(),
                    )),
                });
            }
        }
    }
    Ok(GlueCheck {
        ok: true,
        witness: None,
    })
}

/// The LCS locus with its induced boundary: per-component differents glued
/// into a boundary on Y, verified to reproduce the same log discrepancy
/// function.
pub struct LcsStep {
    pub complex: MonoidalComplex,
    pub boundary: Boundary,
    pub differents: Vec<Different>,
}

pub fn lcs_different(
    ctx: &PairContext,
    psi: &LogDiscrepancy,
    r: u64,
) -> Result<LcsStep, ResidueError> {
    let glue = lcs_glue_check(ctx, psi, r)?;
    if !glue.ok {
        let (a, b, c, d) = glue.witness.unwrap();
        return Err(ResidueError::GlueCheckFailed(a, b, c, d));
    }
    let lcs = lcs_locus(ctx.mc, &ctx.boundary, psi)?;
    let y = lcs.complex.expect("glue check passed on a nonempty LCS");
    let y_conductor = conductor_fan(&y).map_err(LogPairError::Normality)?;
    let mut differents = Vec::new();
    let mut coeffs: BTreeMap<ConeId, Rat> = BTreeMap::new();
    for e in &lcs.maximal {
        let diff = different(ctx, psi, e)?;
        for (q, mult) in &diff.coefficients {
            if y_conductor.contains(q) {
                continue; // non-smooth prime of Y: part of its conductor
            }
            if let Some(prev) = coeffs.get(q) {
                if prev != mult {
                    return Err(ResidueError::InconsistentDifferent {
                        center: q.clone(),
                        detail: "components of the LCS induce different coefficients".into(),
                    });
                }
            } else {
                coeffs.insert(q.clone(), mult.clone());
            }
        }
        differents.push(diff);
    }
    let boundary = Boundary::from_coeffs(coeffs);
    // rB_Y must be integral, effective when B is
    for (_, c) in boundary.entries() {
        let scaled = c.clone() * Rat::from_integer(Int::from(r));
        if *scaled.denom() != Int::from(1) {
            return Err(ResidueError::InconsistentDifferent {
                center: lcs.maximal[0].clone(),
                detail: format!("rB_Y not integral: coefficient {c}"),
            });
        }
    }
    if ctx.boundary.is_effective() && !boundary.is_effective() {
        return Err(ResidueError::InconsistentDifferent {
            center: lcs.maximal[0].clone(),
            detail: "induced boundary not effective".into(),
        });
    }
    // the induced pair must have the same log discrepancy function
    let y_ctx = PairContext::new(&y, boundary.clone())?;
    if !verify_psi(&y_ctx, &psi.psi) {
        return Err(ResidueError::InconsistentDifferent {
            center: lcs.maximal[0].clone(),
            detail: "induced boundary does not reproduce the log discrepancy function".into(),
        });
    }
    Ok(LcsStep {
        complex: y,
        boundary,
        differents,
    })
}

/// Checks that the given ambient vector solves every facet equation of the
/// pair and lies in the span of the residue lattice.
pub fn verify_psi(ctx: &PairContext, psi: &[Rat]) -> bool {
    if ctx.residue_lattice().rational_coords_of(psi).is_none() {
        return false;
    }
    for f in ctx.mc.fan().maximal() {
        let lat = ctx.mc.lattice_at(f);
        for (tau, functional) in cone_functionals(ctx.mc, f) {
            let lhs = pair_in_lattice(&lat, &functional, psi);
            if lhs != Rat::from_integer(Int::from(1)) - ctx.cbar_coeff(&tau) {
                return false;
            }
        }
    }
    true
}

/// Residue to an lc center of arbitrary codimension, for complexes with
/// normal components: composes codimension-one residues along maximal
/// chains of invariant subvarieties from a facet down to the center. All
/// chains are computed (up to a cap) and must agree.
pub struct HigherResidue {
    pub constant: KScalar,
    pub different: Different,
    pub chains_checked: usize,
}

pub fn higher_residue(
    ctx: &PairContext,
    psi: &LogDiscrepancy,
    r: u64,
    z: &ConeId,
) -> Result<HigherResidue, ResidueError> {
    if r % 2 != 0 {
        return Err(ResidueError::OddExponent(r));
    }
    if !has_normal_components(ctx.mc) {
        return Err(ResidueError::NotNormalComponents);
    }
    let centers = crate::logpair::lc_centers(ctx.mc, &ctx.boundary, psi);
    if !centers.contains(z) {
        return Err(ResidueError::NotAnLcCenter(z.clone()));
    }
    if !crate::logpair::is_n_orientable(ctx.mc, r)?.orientable || !level_feasible(ctx, r) {
        return Err(ResidueError::NotInvertible(r));
    }
    // enumerate descending chains facet = s_0 > s_1 > ... > s_c = z
    const CHAIN_CAP: usize = 128;
    let fan = ctx.mc.fan();
    let mut chains: Vec<Vec<ConeId>> = Vec::new();
    let mut stack: Vec<Vec<ConeId>> = fan
        .facets_containing(z)
        .iter()
        .map(|f| vec![f.clone()])
        .collect();
    while let Some(chain) = stack.pop() {
        let last = chain.last().unwrap();
        if last == z {
            chains.push(chain);
            if chains.len() >= CHAIN_CAP {
                break;
            }
            continue;
        }
        for next in fan.covered_faces(last) {
            if fan.cone(&next).contains_cone(fan.cone(z)) {
                let mut c = chain.clone();
                c.push(next);
                stack.push(c);
            }
        }
    }
    assert!(!chains.is_empty(), "an lc center is reachable from a facet");
    let p = ctx.mc.characteristic();
    let mut agreed: Option<(KScalar, BTreeMap<ConeId, Rat>)> = None;
    for chain in &chains {
        let mut constant = KScalar::one(p);
        let mut coeffs: BTreeMap<ConeId, Rat> = fan
            .covered_faces(&chain[0])
            .into_iter()
            .map(|t| {
                let c = ctx.cbar_coeff(&t);
                (t, c)
            })
            .collect();
        for step in chain.windows(2) {
            let (amb, next) = (&step[0], &step[1]);
            let d = {
                let trace = lattice_intersect(&ctx.mc.lattice_at(amb), &ctx.mc.saturated_at(next));
                match sublattice_index(&ctx.mc.lattice_at(next), &trace) {
                    Ok(Index::Finite(n)) => n,
                    _ => unreachable!("finite incidence"),
                }
            };
            let eps = residue_sign(ctx.mc, amb, next);
            constant = constant.mul(&KScalar::from_int(p, &(Int::from(eps as i32) * d)).pow(r));
            coeffs = trace_level_different(ctx.mc, amb, &coeffs, next)?
                .into_iter()
                .map(|(q, (m, _))| (q, m))
                .collect();
        }
        match &agreed {
            None => agreed = Some((constant, coeffs)),
            Some((c0, m0)) => {
                if *c0 != constant || *m0 != coeffs {
                    return Err(ResidueError::InconsistentDifferent {
                        center: z.clone(),
                        detail: "two chains yield different residues".into(),
                    });
                }
            }
        }
    }
    let (constant, coefficients) = agreed.unwrap();
    // cross-check against the pairing on the center
    let z_lat = ctx.mc.lattice_at(z);
    for (q, functional) in cone_functionals(ctx.mc, z) {
        let expected =
            Rat::from_integer(Int::from(1)) - pair_in_lattice(&z_lat, &functional, &psi.psi);
        if coefficients.get(&q) != Some(&expected) {
            return Err(ResidueError::InconsistentDifferent {
                center: z.clone(),
                detail: format!("chain residue disagrees with <e,psi> at {q}"),
            });
        }
    }
    Ok(HigherResidue {
        constant,
        different: Different {
            center: z.clone(),
            coefficients,
        },
        chains_checked: chains.len(),
    })
}

/// One step of the LCS chain.
pub struct ChainStep {
    pub complex: MonoidalComplex,
    pub boundary: Boundary,
    /// Residue constants of the step (all facets), at level r.
    pub constants: BTreeMap<ConeId, KScalar>,
}

/// Iterates restriction to the LCS locus until it is empty: the chain
/// X = X_0 > X_1 > ... > W where each X_{i+1} is the LCS locus of X_i with
/// its induced boundary, ending in a normal W with coefficients below one.
/// Every step is re-validated (S2, weak normality, same psi).
pub fn lcs_chain(
    mc: &MonoidalComplex,
    boundary: &Boundary,
    r: u64,
) -> Result<Vec<ChainStep>, ResidueError> {
    if r % 2 != 0 {
        return Err(ResidueError::OddExponent(r));
    }
    if !has_normal_components(mc) {
        return Err(ResidueError::NotNormalComponents);
    }
    let mut steps: Vec<ChainStep> = Vec::new();
    let mut current = mc.clone();
    let mut b = boundary.clone();
    let mut psi0: Option<Vec<Rat>> = None;
    loop {
        let ctx = PairContext::new(&current, b.clone())?;
        let psi = match ctx.solve_psi() {
            PsiOutcome::Solved(l) => l,
            PsiOutcome::Infeasible { .. } => {
                return Err(ResidueError::LogPair(LogPairError::NotLogPair(
                    "no log discrepancy function at a chain step".into(),
                )))
            }
        };
        if !b
            .entries()
            .all(|(_, c)| *c <= Rat::from_integer(Int::from(1)))
        {
            return Err(ResidueError::LogPair(LogPairError::NotWlc));
        }
        match &psi0 {
            None => psi0 = Some(psi.psi.clone()),
            Some(v) => {
                if !verify_psi(&ctx, v) {
                    return Err(ResidueError::InconsistentDifferent {
                        center: ctx.core.clone(),
                        detail: "log discrepancy function changed along the chain".into(),
                    });
                }
            }
        }
        let s2 = is_s2(&current, None);
        let wn = is_weakly_normal(&current, None);
        if !s2.holds || !wn.holds {
            return Err(ResidueError::LogPair(LogPairError::PreconditionFailed(
                "chain step lost S2 or weak normality".into(),
            )));
        }
        let datum = residue_constants(&ctx, &psi, r)?;
        let lcs = lcs_locus(&current, &b, &psi)?;
        let done = lcs.complex.is_none();
        let next = if done {
            None
        } else {
            let step = lcs_different(&ctx, &psi, r)?;
            Some((step.complex, step.boundary))
        };
        steps.push(ChainStep {
            complex: current,
            boundary: b.clone(),
            constants: datum.constants_facets,
        });
        match next {
            None => break,
            Some((c, nb)) => {
                current = c;
                b = nb;
            }
        }
    }
    // terminal step: irreducible and normal, coefficients strictly below one
    let last = steps.last().unwrap();
    let terminal_ok = last.complex.is_irreducible()
        && has_normal_components(&last.complex)
        && last
            .boundary
            .entries()
            .all(|(_, c)| *c < Rat::from_integer(Int::from(1)));
    if !terminal_ok {
        return Err(ResidueError::InconsistentDifferent {
            center: last.complex.fan().maximal()[0].clone(),
            detail: "chain did not terminate in a klt normal step".into(),
        });
    }
    Ok(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::coordinate_arrangement;
    use crate::fixtures;
    use crate::logpair::classify;
    use crate::num::rat;

    fn r1() -> Rat {
        rat::<Int>(1, 1)
    }

    fn psi_of(ctx: &PairContext) -> LogDiscrepancy {
        match ctx.solve_psi() {
            PsiOutcome::Solved(l) => l,
            _ => panic!("expected a log discrepancy function"),
        }
    }

    #[test]
    fn residue_sign_determinism_and_antisymmetry() {
        let mc = coordinate_arrangement(2, 0);
        let facet = mc.fan().maximal()[0].clone();
        let x_axis = fixtures::fan_cone(&mc, &[&[1, 0]]);
        let s1 = residue_sign(&mc, &facet, &x_axis);
        let s2 = residue_sign(&mc, &facet, &x_axis);
        assert_eq!(s1, s2);
        assert!(s1 == 1 || s1 == -1);
    }

    #[test]
    fn residue_sign_cusp_example() {
        let mc = fixtures::cusp_cone();
        let facet = mc.fan().maximal()[0].clone();
        let tau1 = fixtures::cusp_ray1(&mc);
        assert_eq!(residue_sign(&mc, &facet, &tau1), -1);
    }

    #[test]
    fn different_on_cusp_boundary_case() {
        let mc = fixtures::cusp_cone();
        let tau1 = fixtures::cusp_ray1(&mc);
        let b = Boundary::from_coeffs([(tau1.clone(), r1())].into());
        let ctx = PairContext::new(&mc, b).unwrap();
        let psi = psi_of(&ctx);
        let diff = different(&ctx, &psi, &tau1).unwrap();
        assert_eq!(diff.coefficients.len(), 1);
        let origin = fixtures::fan_cone(&mc, &[]);
        assert_eq!(diff.coefficients[&origin], rat::<Int>(1, 2));
    }

    #[test]
    fn different_on_coordinate_arrangement_rays() {
        let mc = coordinate_arrangement(3, 1);
        let ctx = PairContext::new(&mc, Boundary::zero()).unwrap();
        let psi = psi_of(&ctx);
        for tau in mc.fan().codim_one_cones() {
            let diff = different(&ctx, &psi, &tau).unwrap();
            let origin = fixtures::fan_cone(&mc, &[]);
            assert_eq!(diff.coefficients[&origin], r1());
        }
    }

    #[test]
    fn different_log_smooth_adjunction() {
        // orthant in Z^2 with B = 1*E1 + 0*E2: the different at the origin
        // of E1 is zero
        let mc = coordinate_arrangement(2, 0);
        let x_axis = fixtures::fan_cone(&mc, &[&[1, 0]]);
        let b = Boundary::from_coeffs([(x_axis.clone(), r1())].into());
        let ctx = PairContext::new(&mc, b).unwrap();
        let psi = psi_of(&ctx);
        let diff = different(&ctx, &psi, &x_axis).unwrap();
        let origin = fixtures::fan_cone(&mc, &[]);
        assert!(diff.coefficients[&origin].is_zero());
    }

    fn two_facets_boundary(mc: &MonoidalComplex) -> Boundary {
        // coefficient one on both outer rays: psi = 0, every even level
        // trivializes
        let ra = fixtures::fan_cone(mc, &[&[1, 0]]);
        let rb = fixtures::fan_cone(mc, &[&[-1, 0]]);
        Boundary::from_coeffs([(ra, r1()), (rb, r1())].into())
    }

    #[test]
    fn residue_constants_two_facets() {
        let mc = fixtures::two_facets_d13(0);
        let ctx = PairContext::new(&mc, two_facets_boundary(&mc)).unwrap();
        let psi = psi_of(&ctx);
        assert!(psi.psi.iter().all(|x| x.is_zero()));
        let datum = residue_constants(&ctx, &psi, 2).unwrap();
        assert!(datum.verify(&ctx));
        // canonical root is the d = 1 facet: constants are 1 and 9, and the
        // shared prime gets constant 1
        let fa = fixtures::fan_cone(&mc, &[&[1, 0], &[0, 1]]);
        let fb = fixtures::fan_cone(&mc, &[&[-1, 0], &[0, 1]]);
        assert!(datum.constants_facets[&fb].is_one());
        assert_eq!(
            datum.constants_facets[&fa],
            KScalar::from_int(0, &Int::from(9))
        );
        let tau = fixtures::fan_cone(&mc, &[&[0, 1]]);
        assert!(datum.constants_primes[&tau].is_one());
    }

    #[test]
    fn residue_constants_two_facets_char7() {
        let mc = fixtures::two_facets_d13(7);
        let ctx = PairContext::new(&mc, two_facets_boundary(&mc)).unwrap();
        let psi = psi_of(&ctx);
        let datum = residue_constants(&ctx, &psi, 2).unwrap();
        assert!(datum.verify(&ctx));
        let fa = fixtures::fan_cone(&mc, &[&[1, 0], &[0, 1]]);
        assert_eq!(datum.constants_facets[&fa], KScalar::Fp { p: 7, value: 2 });
        // 9 mod 7
    }

    #[test]
    fn residue_constants_normal_components_are_one() {
        let mc = coordinate_arrangement(3, 1);
        let ctx = PairContext::new(&mc, Boundary::zero()).unwrap();
        let psi = psi_of(&ctx);
        let datum = residue_constants(&ctx, &psi, 2).unwrap();
        assert!(datum.constants_facets.values().all(|c| c.is_one()));
        assert!(datum.constants_primes.values().all(|c| c.is_one()));
    }

    #[test]
    fn glue_check_passes_on_normal_components() {
        let mc = coordinate_arrangement(3, 1);
        let ctx = PairContext::new(&mc, Boundary::zero()).unwrap();
        let psi = psi_of(&ctx);
        let check = lcs_glue_check(&ctx, &psi, 2).unwrap();
        assert!(check.ok);
    }

    #[test]
    fn glue_check_fails_on_engineered_fixture() {
        let mc = fixtures::glue_failure();
        let report = classify(&mc, &Boundary::zero(), 4).unwrap();
        assert!(report.is_wlc);
        let ctx = PairContext::new(&mc, Boundary::zero()).unwrap();
        let psi = psi_of(&ctx);
        let check = lcs_glue_check(&ctx, &psi, 2).unwrap();
        assert!(!check.ok);
        let (q, _f, e1, e2) = check.witness.unwrap();
        assert_eq!(q, fixtures::fan_cone(&mc, &[&[0, 0, 1]]));
        let tau1 = fixtures::fan_cone(&mc, &[&[0, 1, 0], &[0, 0, 1]]);
        let tau2 = fixtures::fan_cone(&mc, &[&[1, 0, 0], &[0, 0, 1]]);
        assert_eq!(
            std::collections::BTreeSet::from([e1, e2]),
            std::collections::BTreeSet::from([tau1, tau2])
        );
    }

    #[test]
    fn lcs_boundary_of_coordinate_arrangement_is_zero() {
        let mc = coordinate_arrangement(3, 1);
        let ctx = PairContext::new(&mc, Boundary::zero()).unwrap();
        let psi = psi_of(&ctx);
        let step = lcs_different(&ctx, &psi, 2).unwrap();
        assert_eq!(step.boundary.entries().count(), 0);
        let expected = coordinate_arrangement(3, 2);
        let got: Vec<_> = step.complex.fan().ids().cloned().collect();
        let want: Vec<_> = expected.fan().ids().cloned().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn lcs_boundary_of_cusp_with_prime() {
        let mc = fixtures::cusp_cone();
        let tau1 = fixtures::cusp_ray1(&mc);
        let b = Boundary::from_coeffs([(tau1.clone(), r1())].into());
        let ctx = PairContext::new(&mc, b).unwrap();
        let psi = psi_of(&ctx);
        let step = lcs_different(&ctx, &psi, 2).unwrap();
        let origin = fixtures::fan_cone(&mc, &[]);
        assert_eq!(step.boundary.coeff(&origin), rat::<Int>(1, 2));
        assert_eq!(step.complex.fan().maximal().len(), 1);
    }

    #[test]
    fn higher_residue_chain_independence() {
        let mc = coordinate_arrangement(3, 1);
        let ctx = PairContext::new(&mc, Boundary::zero()).unwrap();
        let psi = psi_of(&ctx);
        let origin = fixtures::fan_cone(&mc, &[]);
        let res = higher_residue(&ctx, &psi, 2, &origin).unwrap();
        assert!(res.constant.is_one());
        assert!(res.chains_checked >= 2);
        assert!(res.different.coefficients.is_empty());
    }

    #[test]
    fn higher_residue_toric_boundary() {
        // orthant in Z^3 with B = all three planes: the residue on a ray is
        // its toric boundary (the origin with coefficient one)
        let mc = coordinate_arrangement(3, 0);
        let planes: Vec<ConeId> = mc.fan().codim_one_cones();
        let coeffs: BTreeMap<ConeId, Rat> = planes.iter().map(|t| (t.clone(), r1())).collect();
        let b = Boundary::from_coeffs(coeffs);
        let ctx = PairContext::new(&mc, b).unwrap();
        let psi = psi_of(&ctx);
        let z = fixtures::fan_cone(&mc, &[&[1, 0, 0]]);
        let res = higher_residue(&ctx, &psi, 2, &z).unwrap();
        assert!(res.constant.is_one());
        let origin = fixtures::fan_cone(&mc, &[]);
        assert_eq!(res.different.coefficients[&origin], r1());
    }

    #[test]
    fn chain_on_coordinate_arrangement() {
        let mc = coordinate_arrangement(3, 1);
        let steps = lcs_chain(&mc, &Boundary::zero(), 2).unwrap();
        assert_eq!(steps.len(), 3); // X_1 > X_2 > X_3 = origin
        for s in &steps {
            assert_eq!(s.boundary.entries().count(), 0);
            assert!(s.constants.values().all(|c| c.is_one()));
        }
        let last = steps.last().unwrap();
        assert_eq!(
            last.complex
                .fan()
                .cone(&last.complex.fan().maximal()[0])
                .dim(),
            0
        );
    }

    #[test]
    fn chain_on_klt_input_has_length_one() {
        let mc = coordinate_arrangement(3, 0);
        let steps = lcs_chain(&mc, &Boundary::zero(), 2).unwrap();
        assert_eq!(steps.len(), 1);
    }

    #[test]
    fn chain_on_orthant_with_full_boundary() {
        let mc = coordinate_arrangement(3, 0);
        let planes: Vec<ConeId> = mc.fan().codim_one_cones();
        let coeffs: BTreeMap<ConeId, Rat> = planes.iter().map(|t| (t.clone(), r1())).collect();
        let steps = lcs_chain(&mc, &Boundary::from_coeffs(coeffs), 2).unwrap();
        assert_eq!(steps.len(), 4); // orthant > planes > rays > origin
    }
}
