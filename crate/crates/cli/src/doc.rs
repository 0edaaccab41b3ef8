//! The JSON document format for complexes, and its translation to the
//! library types. All rationals are exact "p/q" strings; coordinates are
//! JSON integers.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Deserialize;

use facering::complex::{validate, ComplexSpec, ConeId, MonoidalComplex, SpecData};
use facering::logpair::Boundary;
use facering::{Cone, Int, Rat};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema_version: u32,
    pub lattice_rank: usize,
    #[serde(default)]
    pub characteristic: u64,
    pub mode: String,
    pub cones: BTreeMap<String, ConeDef>,
    pub maximal: Vec<String>,
    #[serde(default)]
    pub lattices: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default)]
    pub generators: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default)]
    pub boundary: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDef {
    pub rays: Vec<Vec<i64>>,
    #[serde(default)]
    pub lines: Vec<Vec<i64>>,
}

pub struct Loaded {
    pub mc: MonoidalComplex,
    pub boundary: Boundary,
    /// canonical id -> user alias
    pub aliases: BTreeMap<ConeId, String>,
}

#[derive(Debug)]
pub enum LoadError {
    Parse(String),
    Validation(Vec<facering::complex::Violation>),
}

fn ivec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Parses an exact rational "p/q" or "p". Decimal notation is rejected.
pub fn parse_rational(field: &str, s: &str) -> Result<Rat, LoadError> {
    let bad = || {
        LoadError::Parse(format!(
            "{field}: invalid rational '{s}' (expected an integer or p/q)"
        ))
    };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.trim().parse().map_err(|_| bad())?;
    let d: BigInt = den.trim().parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(bad());
    }
    Ok(Rat::new(n, d))
}

pub fn load(text: &str, char_override: Option<u64>) -> Result<Loaded, LoadError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| LoadError::Parse(e.to_string()))?;
    if doc.schema_version != 1 {
        return Err(LoadError::Parse(format!(
            "schema_version: unsupported version {}",
            doc.schema_version
        )));
    }
    let d = doc.lattice_rank;
    let mut alias_to_id: BTreeMap<String, ConeId> = BTreeMap::new();
    let mut aliases: BTreeMap<ConeId, String> = BTreeMap::new();
    for (alias, def) in &doc.cones {
        for v in def.rays.iter().chain(&def.lines) {
            if v.len() != d {
                return Err(LoadError::Parse(format!(
                    "cones.{alias}: vector of length {} in rank {d}",
                    v.len()
                )));
            }
        }
        let rays: Vec<Vec<Int>> = def.rays.iter().map(|v| ivec(v)).collect();
        let lines: Vec<Vec<Int>> = def.lines.iter().map(|v| ivec(v)).collect();
        let id = ConeId::of(&Cone::from_generators(d, &rays, &lines));
        alias_to_id.insert(alias.clone(), id.clone());
        aliases.insert(id, alias.clone());
    }
    let resolve = |field: &str, alias: &str| -> Result<ConeId, LoadError> {
        alias_to_id
            .get(alias)
            .cloned()
            .ok_or_else(|| LoadError::Parse(format!("{field}: unknown cone alias '{alias}'")))
    };
    let mut maximal_cones = Vec::new();
    for alias in &doc.maximal {
        let def = doc
            .cones
            .get(alias)
            .ok_or_else(|| LoadError::Parse(format!("maximal: unknown cone alias '{alias}'")))?;
        maximal_cones.push((
            def.rays.iter().map(|v| ivec(v)).collect(),
            def.lines.iter().map(|v| ivec(v)).collect(),
        ));
    }
    let data = match doc.mode.as_str() {
        "lattice_family" => {
            let mut entries = Vec::new();
            for (alias, basis) in &doc.lattices {
                let def = doc.cones.get(alias).ok_or_else(|| {
                    LoadError::Parse(format!("lattices: unknown cone alias '{alias}'"))
                })?;
                entries.push((
                    def.rays.iter().map(|v| ivec(v)).collect(),
                    def.lines.iter().map(|v| ivec(v)).collect(),
                    basis.iter().map(|v| ivec(v)).collect(),
                ));
            }
            SpecData::LatticeFamily(entries)
        }
        "generators" => {
            let mut lists = Vec::new();
            for alias in &doc.maximal {
                let gens = doc.generators.get(alias).ok_or_else(|| {
                    LoadError::Parse(format!("generators: missing entry for facet '{alias}'"))
                })?;
                lists.push(gens.iter().map(|v| ivec(v)).collect());
            }
            SpecData::Generators(lists)
        }
        other => {
            return Err(LoadError::Parse(format!(
                "mode: expected 'lattice_family' or 'generators', got '{other}'"
            )))
        }
    };
    let spec = ComplexSpec {
        ambient_rank: d,
        characteristic: char_override.unwrap_or(doc.characteristic),
        maximal_cones,
        data,
    };
    let mc = validate(spec).map_err(LoadError::Validation)?;
    let mut coeffs = BTreeMap::new();
    for (alias, value) in &doc.boundary {
        let id = resolve("boundary", alias)?;
        if mc.fan().get(&id).is_none() {
            return Err(LoadError::Parse(format!(
                "boundary.{alias}: cone is not in the fan"
            )));
        }
        coeffs.insert(id, parse_rational(&format!("boundary.{alias}"), value)?);
    }
    Ok(Loaded {
        mc,
        boundary: Boundary::from_coeffs(coeffs),
        aliases,
    })
}

/// Exports a lattice-family complex as a document, with facets aliased
/// F0, F1, ... and the remaining cones c0, c1, ... in canonical order.
pub fn export(mc: &MonoidalComplex) -> serde_json::Value {
    use serde_json::{json, Map, Value};
    let fan = mc.fan();
    let mut names: BTreeMap<ConeId, String> = BTreeMap::new();
    for (i, f) in fan.maximal().iter().enumerate() {
        names.insert(f.clone(), format!("F{i}"));
    }
    let mut i = 0usize;
    for id in fan.ids() {
        if !names.contains_key(id) {
            names.insert(id.clone(), format!("c{i}"));
            i += 1;
        }
    }
    let to_i64 = |v: &[Int]| -> Vec<i64> {
        use num_traits::ToPrimitive;
        v.iter()
            .map(|x| x.to_i64().expect("coordinate fits in i64"))
            .collect()
    };
    let mut cones = Map::new();
    let mut lattices = Map::new();
    for id in fan.ids() {
        let cone = fan.cone(id);
        let mut def = Map::new();
        def.insert(
            "rays".into(),
            json!(cone.rays().iter().map(|r| to_i64(r)).collect::<Vec<_>>()),
        );
        let lines = cone.lineality().basis_rows();
        if !lines.is_empty() {
            def.insert(
                "lines".into(),
                json!(lines.iter().map(|r| to_i64(r)).collect::<Vec<_>>()),
            );
        }
        cones.insert(names[id].clone(), Value::Object(def));
        let basis = mc.lattice_at(id);
        lattices.insert(
            names[id].clone(),
            json!(basis
                .basis_rows()
                .iter()
                .map(|r| to_i64(r))
                .collect::<Vec<_>>()),
        );
    }
    json!({
        "schema_version": 1,
        "lattice_rank": mc.ambient_rank(),
        "characteristic": mc.characteristic(),
        "mode": "lattice_family",
        "cones": cones,
        "maximal": fan.maximal().iter().map(|f| names[f].clone()).collect::<Vec<_>>(),
        "lattices": lattices,
    })
}
