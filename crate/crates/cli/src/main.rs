//! Command-line interface: validate complex documents, classify invariant
//! log structures, and compute centers, residue data and LCS chains.
//!
//! Exit codes: 0 success, 2 parse/validation failure, 3 classification
//! precondition failure, 4 internal consistency error.

mod doc;
mod report;

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use facering::complex::{coordinate_arrangement, stanley_reisner, ConeId};
use facering::logpair::{
    classify, lc_centers, minimal_lc_center, LogPairError, PairContext, PsiOutcome,
};
use facering::normality::normality_report;
use facering::residue::{
    different, higher_residue, lcs_chain, lcs_different, lcs_glue_check, residue_constants,
    ResidueError,
};

#[derive(Parser)]
#[command(
    name = "facering",
    version,
    about = "Exact toolkit for monoidal complexes and their toric log structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a complex document
    Validate {
        path: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Full normality and log-structure classification
    Classify {
        path: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Lc centers, the minimal center and differents on codimension-one centers
    Centers {
        path: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Residue constants, the LCS gluing check and induced boundary
    Residues {
        path: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Iterated restriction to the LCS locus
    Chain {
        path: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Emit a built-in complex document on standard output
    Generate {
        /// coordinate-arrangement | stanley-reisner | cusp-cone
        kind: String,
        /// parameters: "n p" for coordinate-arrangement, "1,2,3;3,4,5" for
        /// stanley-reisner
        params: Vec<String>,
    },
}

#[derive(clap::Args, Clone)]
struct Flags {
    /// Even residue exponent
    #[arg(long, default_value_t = 2)]
    r: u64,
    /// Largest level checked for invertibility
    #[arg(long, default_value_t = 8)]
    nmax: u64,
    /// Verification box for generator-mode verdicts
    #[arg(long)]
    r#box: Option<u64>,
    /// Select an lc center by cone id or alias (residues command)
    #[arg(long)]
    center: Option<String>,
    /// Override the document characteristic (0 or a prime)
    #[arg(long)]
    r#char: Option<u64>,
}

enum Failure {
    Input(String),
    Precondition(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Internal(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Precondition(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<LogPairError> for Failure {
    fn from(e: LogPairError) -> Self {
        match e {
            LogPairError::Internal(m) => Failure::Internal(m),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

impl From<ResidueError> for Failure {
    fn from(e: ResidueError) -> Self {
        match e {
            ResidueError::InconsistentDifferent { .. } => Failure::Internal(e.to_string()),
            ResidueError::LogPair(inner) => inner.into(),
            other => Failure::Precondition(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { path, flags } => run_report(path, flags, Section::Validate),
        Command::Classify { path, flags } => run_report(path, flags, Section::Classify),
        Command::Centers { path, flags } => run_report(path, flags, Section::Centers),
        Command::Residues { path, flags } => run_report(path, flags, Section::Residues),
        Command::Chain { path, flags } => run_report(path, flags, Section::Chain),
        Command::Generate { kind, params } => generate(kind, params),
    };
    match result {
        Ok(value) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("serializable")
            );
            ExitCode::SUCCESS
        }
        Err((partial, failure)) => {
            let mut value = partial.unwrap_or_else(|| json!({}));
            if let Value::Object(m) = &mut value {
                m.insert("error".into(), json!(failure.message()));
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("serializable")
            );
            ExitCode::from(failure.code())
        }
    }
}

#[derive(PartialEq)]
enum Section {
    Validate,
    Classify,
    Centers,
    Residues,
    Chain,
}

type RunResult = Result<Value, (Option<Value>, Failure)>;

fn run_report(path: &str, flags: &Flags, section: Section) -> RunResult {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (None, Failure::Input(format!("cannot read {path}: {e}"))))?;
    let digest = hex(&Sha256::digest(text.as_bytes()));
    let mut out = Map::new();
    out.insert("schema_version".into(), json!(1));
    out.insert("input".into(), json!({ "digest": digest }));
    let loaded = match doc::load(&text, flags.r#char) {
        Ok(l) => l,
        Err(doc::LoadError::Parse(m)) => return Err((Some(Value::Object(out)), Failure::Input(m))),
        Err(doc::LoadError::Validation(violations)) => {
            out.insert(
                "validation".into(),
                json!({
                    "valid": false,
                    "violations": violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                }),
            );
            return Err((
                Some(Value::Object(out)),
                Failure::Input("validation failed".into()),
            ));
        }
    };
    let mc = &loaded.mc;
    let aliases = &loaded.aliases;
    out.insert("aliases".into(), report::alias_table(aliases));
    let mut validation = Map::new();
    validation.insert("valid".into(), json!(true));
    validation.insert("complex".into(), report::complex_summary(mc));
    validation.insert(
        "mode".into(),
        json!(if mc.is_lattice_family() {
            "lattice_family"
        } else {
            "generators"
        }),
    );
    out.insert("validation".into(), Value::Object(validation));
    if section == Section::Validate {
        return Ok(Value::Object(out));
    }

    out.insert(
        "normality".into(),
        report::normality(aliases, &normality_report(mc, flags.r#box)),
    );
    let classification = classify(mc, &loaded.boundary, flags.nmax)
        .map_err(|e| (Some(Value::Object(out.clone())), Failure::from(e)))?;
    out.insert(
        "classification".into(),
        report::classification(aliases, &classification),
    );
    out.insert(
        "boundary".into(),
        report::boundary(aliases, &loaded.boundary),
    );
    if section == Section::Classify {
        return Ok(Value::Object(out));
    }

    let fail = |out: &Map<String, Value>, f: Failure| (Some(Value::Object(out.clone())), f);
    let ctx = PairContext::new(mc, loaded.boundary.clone()).map_err(|e| fail(&out, e.into()))?;
    let psi = match ctx.solve_psi() {
        PsiOutcome::Solved(l) => l,
        PsiOutcome::Infeasible { .. } => {
            return Err(fail(
                &out,
                Failure::Precondition("no log discrepancy function".into()),
            ))
        }
    };

    match section {
        Section::Centers => {
            let centers = lc_centers(mc, &loaded.boundary, &psi);
            let (min, normal) =
                minimal_lc_center(mc, &loaded.boundary, &psi).map_err(|e| fail(&out, e.into()))?;
            let mut list = Vec::new();
            for c in &centers {
                let facet_dim = mc.fan().cone(&mc.fan().facets_containing(c)[0]).dim();
                list.push(json!({
                    "cone": report::cone_ref(aliases, c),
                    "dim": mc.fan().cone(c).dim(),
                    "codim": facet_dim - mc.fan().cone(c).dim(),
                }));
            }
            let mut differents = Vec::new();
            for c in &centers {
                if mc.fan().is_maximal(c) {
                    continue;
                }
                let facet_dim = mc.fan().cone(&mc.fan().facets_containing(c)[0]).dim();
                if facet_dim == mc.fan().cone(c).dim() + 1 {
                    let d = different(&ctx, &psi, c).map_err(|e| fail(&out, e.into()))?;
                    differents.push(report::different(aliases, &d));
                }
            }
            out.insert(
                "centers".into(),
                json!({
                    "list": list,
                    "minimal": {
                        "cone": report::cone_ref(aliases, &min),
                        "normal": normal,
                    },
                    "differents": differents,
                }),
            );
        }
        Section::Residues => {
            if flags.r % 2 != 0 {
                return Err(fail(
                    &out,
                    Failure::Precondition(format!("--r {} must be even", flags.r)),
                ));
            }
            let datum = residue_constants(&ctx, &psi, flags.r).map_err(|e| fail(&out, e.into()))?;
            let mut facets = Map::new();
            for (f, c) in &datum.constants_facets {
                let key = aliases.get(f).cloned().unwrap_or_else(|| f.to_string());
                facets.insert(key, json!(report::scalar(c)));
            }
            let mut primes = Map::new();
            for (t, c) in &datum.constants_primes {
                let key = aliases.get(t).cloned().unwrap_or_else(|| t.to_string());
                primes.insert(key, json!(report::scalar(c)));
            }
            let mut residues = Map::new();
            residues.insert("r".into(), json!(flags.r));
            residues.insert("constants_facets".into(), Value::Object(facets));
            residues.insert("constants_primes".into(), Value::Object(primes));
            match lcs_glue_check(&ctx, &psi, flags.r) {
                Ok(check) => {
                    let mut glue = Map::new();
                    glue.insert("ok".into(), json!(check.ok));
                    if let Some((q, f, e1, e2)) = &check.witness {
                        glue.insert(
                            "witness".into(),
                            json!({
                                "q": report::cone_ref(aliases, q),
                                "facet": report::cone_ref(aliases, f),
                                "e1": report::cone_ref(aliases, e1),
                                "e2": report::cone_ref(aliases, e2),
                            }),
                        );
                    }
                    residues.insert("lcs_glue".into(), Value::Object(glue));
                    if check.ok {
                        let step =
                            lcs_different(&ctx, &psi, flags.r).map_err(|e| fail(&out, e.into()))?;
                        residues.insert(
                            "lcs_boundary".into(),
                            report::boundary(aliases, &step.boundary),
                        );
                        residues
                            .insert("lcs_complex".into(), report::complex_summary(&step.complex));
                    }
                }
                Err(ResidueError::LcsEmpty) => {
                    residues.insert(
                        "lcs_glue".into(),
                        json!({ "ok": true, "note": "LCS empty" }),
                    );
                }
                Err(e) => return Err(fail(&out, e.into())),
            }
            if let Some(center) = &flags.center {
                let id = resolve_center(mc, aliases, center).ok_or_else(|| {
                    fail(&out, Failure::Input(format!("unknown center '{center}'")))
                })?;
                let res =
                    higher_residue(&ctx, &psi, flags.r, &id).map_err(|e| fail(&out, e.into()))?;
                residues.insert(
                    "higher".into(),
                    json!({
                        "center": report::cone_ref(aliases, &id),
                        "constant": report::scalar(&res.constant),
                        "different": report::different(aliases, &res.different),
                        "chains_checked": res.chains_checked,
                    }),
                );
            }
            out.insert("residues".into(), Value::Object(residues));
        }
        Section::Chain => {
            if flags.r % 2 != 0 {
                return Err(fail(
                    &out,
                    Failure::Precondition(format!("--r {} must be even", flags.r)),
                ));
            }
            let steps =
                lcs_chain(mc, &loaded.boundary, flags.r).map_err(|e| fail(&out, e.into()))?;
            let mut list = Vec::new();
            for (i, s) in steps.iter().enumerate() {
                let mut constants = Map::new();
                for (f, c) in &s.constants {
                    let key = aliases.get(f).cloned().unwrap_or_else(|| f.to_string());
                    constants.insert(key, json!(report::scalar(c)));
                }
                list.push(json!({
                    "step": i,
                    "complex": report::complex_summary(&s.complex),
                    "boundary": report::boundary(aliases, &s.boundary),
                    "constants": constants,
                }));
            }
            out.insert("chain".into(), json!(list));
        }
        _ => unreachable!(),
    }
    Ok(Value::Object(out))
}

fn resolve_center(
    mc: &facering::complex::MonoidalComplex,
    aliases: &BTreeMap<ConeId, String>,
    name: &str,
) -> Option<ConeId> {
    for (id, alias) in aliases {
        if alias == name {
            return Some(id.clone());
        }
    }
    mc.fan().ids().find(|id| id.to_string() == name).cloned()
}

fn generate(kind: &str, params: &[String]) -> RunResult {
    let bad = |m: String| -> (Option<Value>, Failure) { (None, Failure::Input(m)) };
    let value = match kind {
        "coordinate-arrangement" => {
            if params.len() != 2 {
                return Err(bad("expected: coordinate-arrangement <n> <p>".into()));
            }
            let n: usize = params[0]
                .parse()
                .map_err(|_| bad("n must be an integer".into()))?;
            let p: usize = params[1]
                .parse()
                .map_err(|_| bad("p must be an integer".into()))?;
            if p > n || n == 0 || n > 8 {
                return Err(bad(format!("parameters out of range: n={n}, p={p}")));
            }
            doc::export(&coordinate_arrangement(n, p))
        }
        "stanley-reisner" => {
            if params.len() != 1 {
                return Err(bad("expected: stanley-reisner \"1,2,3;3,4,5\"".into()));
            }
            let mut facets = Vec::new();
            let mut max_v = 0usize;
            for part in params[0].split(';') {
                let mut facet = Vec::new();
                for v in part.split(',') {
                    let v: usize = v
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("bad vertex '{v}'")))?;
                    max_v = max_v.max(v);
                    facet.push(v);
                }
                facets.push(facet);
            }
            let mc = stanley_reisner(max_v, &facets).map_err(|e| bad(e.to_string()))?;
            doc::export(&mc)
        }
        "cusp-cone" => doc::export(&facering::fixtures::cusp_cone()),
        other => return Err(bad(format!("unknown kind '{other}'"))),
    };
    Ok(value)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
