//! Command implementations: each builds a JSON report with a stable layout
//! (sorted keys, big integers as decimal strings) plus an exit code.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use galmon_core::fano::{fano_report, FanoProblem};
use galmon_core::frobenius::{
    chebotarev_distance, sample_splittings, symmetric_distribution, ClassDistribution, IntPoly,
    MAX_SYMMETRIC_DEGREE,
};
use galmon_core::homotopy::{
    monodromy_generators, populate_fiber, TrackerConfig,
};
use galmon_core::permgroup::{generate_group, GeneratedGroup, Permutation};
use galmon_core::sparse::{decomposition_tree, galois_bound, SupportSystem};

use crate::CommonArgs;

#[derive(Debug)]
pub enum CliError {
    Io(String, String),
    Parse(String),
    Invalid(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(path, e) => write!(f, "{path}: {e}"),
            CliError::Parse(e) => write!(f, "invalid input: {e}"),
            CliError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

pub struct RunReport {
    pub body: Value,
    pub exit_code: u8,
    pub out: Option<PathBuf>,
}

fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
}

fn setup_threads(common: &CommonArgs) -> Vec<String> {
    let mut warnings = Vec::new();
    if let Some(n) = common.threads {
        if n == 0 {
            warnings.push("--threads 0 ignored".into());
        } else if rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .is_err()
        {
            warnings.push("thread pool already initialized; --threads ignored".into());
        }
    }
    warnings
}

fn wrap(
    subcommand: &str,
    digest: String,
    common: &CommonArgs,
    warnings: Vec<String>,
    result: Value,
    exit_code: u8,
) -> RunReport {
    RunReport {
        body: json!({
            "subcommand": subcommand,
            "input_digest": digest,
            "config": { "seed": common.seed, "threads": common.threads },
            "warnings": warnings,
            "result": result,
        }),
        exit_code,
        out: common.out.clone(),
    }
}

fn load_support(path: &Path) -> Result<(SupportSystem, String), CliError> {
    let bytes = read_file(path)?;
    let system: SupportSystem =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok((system, digest_bytes(&bytes)))
}

pub fn classify(path: &Path, common: &CommonArgs) -> Result<RunReport, CliError> {
    let warnings = setup_threads(common);
    let (system, digest) = load_support(path)?;
    let c = galmon_core::sparse::classify(&system).map_err(|e| CliError::Invalid(e.to_string()))?;
    let result = json!({
        "n": system.dim(),
        "mv": c.mv,
        "lattice": c.lattice,
        "lacunary": c.lacunary,
        "strictly_lacunary": c.strictly_lacunary,
        "triangular_witnesses": c.triangular_witnesses,
        "strict_witnesses": c.strict_witnesses,
        "strictly_triangular": c.strictly_triangular,
        "verdict": c.verdict,
    });
    Ok(wrap("classify", digest, common, warnings, result, 0))
}

pub fn decompose(path: &Path, common: &CommonArgs) -> Result<RunReport, CliError> {
    let warnings = setup_threads(common);
    let (system, digest) = load_support(path)?;
    let tree =
        decomposition_tree(&system).map_err(|e| CliError::Invalid(e.to_string()))?;
    let bound = galois_bound(&tree);
    let result = json!({
        "mv": system.mixed_volume().map_err(|e| CliError::Invalid(e.to_string()))?,
        "tree": tree,
        "tree_degree": tree.degree().to_string(),
        "galois_bound": {
            "expression": bound.expr.to_string(),
            "order": bound.order.to_string(),
            "degree": bound.degree,
        },
    });
    Ok(wrap("decompose", digest, common, warnings, result, 0))
}

pub fn fano(r: usize, n: usize, d: Vec<u32>, common: &CommonArgs) -> Result<RunReport, CliError> {
    let warnings = setup_threads(common);
    let digest = digest_bytes(format!("fano r={r} n={n} d={d:?}").as_bytes());
    let problem = FanoProblem::new(r, n, d).map_err(|e| CliError::Invalid(e.to_string()))?;
    let report = fano_report(&problem);
    let result = serde_json::to_value(report).expect("fano report serializes");
    Ok(wrap("fano", digest, common, warnings, result, 0))
}

pub fn frobenius(
    poly: &str,
    count: u64,
    start: u64,
    reference: Option<&Path>,
    common: &CommonArgs,
) -> Result<RunReport, CliError> {
    let mut warnings = setup_threads(common);
    let digest = digest_bytes(format!("frobenius {poly} count={count} start={start}").as_bytes());
    let f = IntPoly::parse(poly).map_err(|e| CliError::Parse(e.to_string()))?;
    if count == 0 {
        return Err(CliError::Invalid("--count must be at least 1".into()));
    }
    let hist = sample_splittings(&f, count, start).map_err(|e| CliError::Invalid(e.to_string()))?;

    let reference_dist: Option<(String, ClassDistribution)> = match reference {
        Some(path) => {
            let bytes = read_file(path)?;
            let dist: ClassDistribution =
                serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(e.to_string()))?;
            Some(("file".into(), dist))
        }
        None if f.degree() <= MAX_SYMMETRIC_DEGREE => Some((
            format!("S{}", f.degree()),
            symmetric_distribution(f.degree()).expect("degree bounded"),
        )),
        None => {
            warnings.push(format!(
                "degree {} exceeds the tabulated symmetric range; no reference comparison",
                f.degree()
            ));
            None
        }
    };

    let counts: serde_json::Map<String, Value> = if f.degree() <= MAX_SYMMETRIC_DEGREE {
        hist.counts_in_partition_order()
            .into_iter()
            .map(|(t, c)| (t.to_string(), json!(c)))
            .collect()
    } else {
        hist.counts
            .iter()
            .map(|(t, c)| (t.to_string(), json!(c)))
            .collect()
    };
    let skipped: Vec<Value> = hist
        .primes_skipped
        .iter()
        .map(|(p, reason)| json!({ "prime": p, "reason": reason }))
        .collect();

    let comparison = match &reference_dist {
        Some((name, dist)) => {
            let tv = chebotarev_distance(&hist, dist)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            let decimal =
                approx_ratio(&tv);
            json!({ "reference": name, "tv_distance": tv.to_string(), "tv_decimal": decimal })
        }
        None => Value::Null,
    };

    let result = json!({
        "poly": f.to_string(),
        "degree": f.degree(),
        "count": count,
        "start": start,
        "primes_used": hist.primes_used,
        "prime_range": [hist.prime_range.0, hist.prime_range.1],
        "counts": counts,
        "skipped": skipped,
        "chebotarev": comparison,
    });
    Ok(wrap("frobenius", digest, common, warnings, result, 0))
}

fn approx_ratio(r: &num_rational::BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn monodromy(path: &Path, loops: usize, common: &CommonArgs) -> Result<RunReport, CliError> {
    let mut warnings = setup_threads(common);
    let (system, digest) = load_support(path)?;
    let cfg = TrackerConfig::with_seed(common.seed);
    let outcome = populate_fiber(&system, &cfg).map_err(|e| CliError::Invalid(e.to_string()))?;

    let base = json!({
        "mv": outcome.mv,
        "fiber_size": outcome.fiber.points.len(),
        "population_loops": outcome.loops_run,
        "tracker": cfg,
    });

    if outcome.stagnated {
        warnings.push(format!(
            "fiber stagnated at {} of {} points; monodromy skipped",
            outcome.fiber.points.len(),
            outcome.mv
        ));
        let mut result = base;
        result["stagnated"] = json!(true);
        return Ok(wrap("monodromy", digest, common, warnings, result, 3));
    }

    match monodromy_generators(&system, &outcome.fiber, loops, &cfg) {
        Ok(mono) => {
            let degree = outcome.fiber.points.len();
            let group = generate_group(degree, mono.generators.clone())
                .expect("monodromy permutations share the fiber degree");
            let mut result = base;
            result["stagnated"] = json!(false);
            result["loops_requested"] = json!(mono.loops_requested);
            result["discarded_loops"] = json!(mono.discarded_loops);
            result["generators"] = json!(mono.generators);
            result["group_report"] = group_report(&group, &mut warnings);
            Ok(wrap("monodromy", digest, common, warnings, result, 0))
        }
        Err(e) => {
            warnings.push(e.to_string());
            let mut result = base;
            result["stagnated"] = json!(false);
            result["generators"] = json!([]);
            Ok(wrap("monodromy", digest, common, warnings, result, 3))
        }
    }
}

pub fn analyze_group(path: &Path, common: &CommonArgs) -> Result<RunReport, CliError> {
    let mut warnings = setup_threads(common);
    let bytes = read_file(path)?;
    let perms: Vec<Permutation> =
        serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(e.to_string()))?;
    let Some(first) = perms.first() else {
        return Err(CliError::Invalid(
            "need at least one permutation to fix the degree".into(),
        ));
    };
    let degree = first.degree();
    let group =
        generate_group(degree, perms.clone()).map_err(|e| CliError::Invalid(e.to_string()))?;
    let result = json!({
        "degree": degree,
        "num_generators": perms.len(),
        "group_report": group_report(&group, &mut warnings),
    });
    Ok(wrap(
        "analyze-group",
        digest_bytes(&bytes),
        common,
        warnings,
        result,
        0,
    ))
}

/// Order, transitivity, minimal block systems with their wreath bounds, and
/// the Jordan verdict. Block and Jordan analysis need transitivity; for an
/// intransitive group they are skipped with a warning.
fn group_report(group: &GeneratedGroup, warnings: &mut Vec<String>) -> Value {
    let degree = group.degree();
    let transitive = group.is_transitive();
    let s_max = degree.min(6);
    let level = group.transitivity_level(s_max);
    if !transitive {
        warnings.push("group is not transitive; block and Jordan analysis skipped".into());
        return json!({
            "order": group.order().to_string(),
            "transitive": false,
            "transitivity_level": level,
            "blocks": [],
            "jordan_verdict": Value::Null,
            "wreath_check": false,
        });
    }
    let systems = group.block_systems().expect("transitive group");
    let blocks: Vec<Value> = systems
        .iter()
        .map(|system| {
            let a = system.block_size() as u64;
            let b = system.num_blocks() as u64;
            let wreath_order = factorial_big(a).pow(b as u32) * factorial_big(b);
            let contained = group
                .wreath_containment(system)
                .expect("blocks come from the group itself");
            json!({
                "blocks": system.blocks(),
                "wreath": format!("S{a} wr S{b}"),
                "wreath_order": wreath_order.to_string(),
                "generators_respect_blocks": contained,
            })
        })
        .collect();
    let verdict = group.jordan_verdict().expect("transitive group");
    json!({
        "order": group.order().to_string(),
        "transitive": true,
        "transitivity_level": level,
        "primitive": systems.is_empty(),
        "blocks": blocks,
        "jordan_verdict": verdict,
        "wreath_check": !systems.is_empty(),
    })
}

fn factorial_big(n: u64) -> num_bigint::BigUint {
    galmon_core::permgroup::factorial(n as usize)
}
