//! JSON report assembly. Everything is keyed by canonical cone ids with an
//! alias table; rationals are "p/q" strings; map ordering is deterministic.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use facering::complex::{ConeId, MonoidalComplex};
use facering::field::KScalar;
use facering::logpair::{Boundary, ClassificationReport, LogDiscrepancy};
use facering::normality::{NormalityReport, Provenance, Verdict, Witness};
use facering::residue::Different;
use facering::{Int, Rat};

pub fn rational(r: &Rat) -> String {
    if r.denom() == &Int::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn scalar(k: &KScalar) -> String {
    match k {
        KScalar::Rat(r) => rational(r),
        KScalar::Fp { value, .. } => value.to_string(),
    }
}

pub fn cone_ref(aliases: &BTreeMap<ConeId, String>, id: &ConeId) -> Value {
    match aliases.get(id) {
        Some(a) => json!({ "id": id.to_string(), "alias": a }),
        None => json!({ "id": id.to_string() }),
    }
}

fn provenance(p: &Provenance) -> Value {
    match p {
        Provenance::Exact => json!("exact"),
        Provenance::BoxBounded(n) => json!(format!("box:{n}")),
    }
}

fn witness(aliases: &BTreeMap<ConeId, String>, w: &Witness) -> Value {
    match w {
        Witness::NotOneConnected(a, b) => json!({
            "kind": "not_1_connected",
            "facets": [cone_ref(aliases, a), cone_ref(aliases, b)],
        }),
        Witness::LatticeIntersection { cone, .. } => json!({
            "kind": "lattice_intersection",
            "cone": cone_ref(aliases, cone),
        }),
        Witness::MissingPoint { cone, point } => json!({
            "kind": "missing_point",
            "cone": cone_ref(aliases, cone),
            "point": point.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        }),
        Witness::CharDividesIncidence {
            tau,
            facet,
            incidence,
        } => json!({
            "kind": "characteristic_divides_incidence",
            "cone": cone_ref(aliases, tau),
            "facet": cone_ref(aliases, facet),
            "incidence": incidence.to_string(),
        }),
    }
}

pub fn verdict(aliases: &BTreeMap<ConeId, String>, v: &Verdict) -> Value {
    let mut m = Map::new();
    m.insert("holds".into(), json!(v.holds));
    m.insert("provenance".into(), provenance(&v.provenance));
    if let Some(w) = &v.witness {
        m.insert("witness".into(), witness(aliases, w));
    }
    Value::Object(m)
}

pub fn normality(aliases: &BTreeMap<ConeId, String>, r: &NormalityReport) -> Value {
    json!({
        "seminormal": verdict(aliases, &r.seminormal),
        "weakly_normal": verdict(aliases, &r.weakly_normal),
        "s2": verdict(aliases, &r.s2),
        "normal_components": r.has_normal_components,
    })
}

pub fn psi(l: &LogDiscrepancy) -> Value {
    json!({
        "vector": l.psi.iter().map(rational).collect::<Vec<_>>(),
        "representative": "reduced echelon form with free variables zero",
        "ambiguity_dimension": l.nullspace.len(),
        "residue_lattice_rank": l.residue_lattice.rank(),
    })
}

pub fn classification(aliases: &BTreeMap<ConeId, String>, r: &ClassificationReport) -> Value {
    let mut m = Map::new();
    m.insert(
        "weakly_normal_log_pair".into(),
        json!(r.is_weakly_normal_log_pair),
    );
    m.insert("wlc".into(), json!(r.is_wlc));
    m.insert("slc".into(), json!(r.is_slc));
    m.insert("q_orientable".into(), json!(r.q_orientable));
    if let Some(l) = &r.psi {
        m.insert("psi".into(), psi(l));
    }
    if let Some((equations, _)) = &r.psi_infeasible {
        m.insert(
            "psi_infeasible".into(),
            json!({
                "equations": equations.len(),
                "sites": equations
                    .iter()
                    .map(|e| json!({
                        "facet": cone_ref(aliases, &e.facet),
                        "prime": cone_ref(aliases, &e.tau),
                        "rhs": rational(&e.rhs),
                    }))
                    .collect::<Vec<_>>(),
            }),
        );
    }
    if let Some(c) = &r.orientability_witness {
        m.insert(
            "orientability_witness".into(),
            json!({
                "cycle": c.cycle.iter().map(|f| cone_ref(aliases, f)).collect::<Vec<_>>(),
                "value": scalar(&c.value),
            }),
        );
    }
    if let Some(t) = &r.nodal_witness {
        m.insert("nodal_witness".into(), cone_ref(aliases, t));
    }
    m.insert("invertibility_orders".into(), json!(r.invertibility_orders));
    m.insert("odd_order_caveat".into(), json!(r.odd_order_caveat));
    m.insert(
        "non_wlc_locus".into(),
        json!(r
            .non_wlc_locus
            .iter()
            .map(|t| cone_ref(aliases, t))
            .collect::<Vec<_>>()),
    );
    Value::Object(m)
}

pub fn boundary(aliases: &BTreeMap<ConeId, String>, b: &Boundary) -> Value {
    let mut m = Map::new();
    for (id, c) in b.entries() {
        let key = aliases.get(id).cloned().unwrap_or_else(|| id.to_string());
        m.insert(key, json!(rational(c)));
    }
    Value::Object(m)
}

pub fn different(aliases: &BTreeMap<ConeId, String>, d: &Different) -> Value {
    let mut coeffs = Map::new();
    for (q, c) in &d.coefficients {
        let key = aliases.get(q).cloned().unwrap_or_else(|| q.to_string());
        coeffs.insert(key, json!(rational(c)));
    }
    json!({
        "center": cone_ref(aliases, &d.center),
        "coefficients": coeffs,
    })
}

pub fn complex_summary(mc: &MonoidalComplex) -> Value {
    let dims: Vec<usize> = mc
        .fan()
        .maximal()
        .iter()
        .map(|f| mc.fan().cone(f).dim())
        .collect();
    json!({
        "cones": mc.fan().len(),
        "facets": mc.fan().maximal().len(),
        "facet_dims": dims,
        "characteristic": mc.characteristic(),
    })
}

pub fn alias_table(aliases: &BTreeMap<ConeId, String>) -> Value {
    let mut m = Map::new();
    for (id, a) in aliases {
        m.insert(id.to_string(), json!(a));
    }
    Value::Object(m)
}
