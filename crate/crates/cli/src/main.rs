//! Command-line frontend: enumeration, predicate checks, bounds,
//! construction, classification, exhaustive search, the complement
//! bijection, and the lemma-audit runner, each emitting a self-validating
//! machine-readable certificate on standard output.
//!
//! Exit codes: 0 success, 2 search stopped by resource caps, 64 usage,
//! 65 malformed input data, 69 infeasible at desk scale, 70 internal
//! inconsistency (a result that would falsify a theorem).

use std::path::PathBuf;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use qcover::audit::{run_registry, AuditReport, Outcome};
use qcover::error::Error;
use qcover::family::{
    classify_extremal, construct_pencil, psi_matching, ExtremalClassification, Family,
};
use qcover::format::{FamilyRepr, SubspaceRepr};
use qcover::qbinom::{cf_bound, qbinom_int, rational_string};
use qcover::search::{
    enumerate_maximum_with, max_cover_free, SearchConfig, SearchPredicate, SearchResult,
};
use qcover::subspace::{enumerate_k, Ambient, Subspace};

const SCHEMA_VERSION: u32 = 1;

const EXIT_OK: i32 = 0;
const EXIT_CAPPED: i32 = 2;
const EXIT_USAGE: i32 = 64;
const EXIT_DATA: i32 = 65;
const EXIT_INFEASIBLE: i32 = 69;
const EXIT_INCONSISTENT: i32 = 70;

#[derive(Parser)]
#[command(
    name = "qcover",
    version,
    about = "Exact cover-free family computation over GF(q)^n"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Pred {
    #[value(name = "cover-free")]
    CoverFree,
    #[value(name = "intersecting")]
    Intersecting,
}

#[derive(Subcommand)]
enum Cmd {
    /// Enumerate the k-dimensional subspaces of GF(q)^n in canonical order.
    Enumerate {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Emit only the count.
        #[arg(long)]
        count_only: bool,
    },
    /// The cover-free size bound for [V, k] as an exact rational with floor.
    Bound {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Check a predicate on a family file.
    Check {
        #[arg(long, value_enum)]
        pred: Pred,
        #[arg(long)]
        family: PathBuf,
        /// Reject non-canonical input instead of re-canonicalizing.
        #[arg(long)]
        strict: bool,
    },
    /// Check that a family file is a q-Steiner system S_q(t, k, n).
    Steiner {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Build the extremal family for (q, n, k) from a Steiner system.
    Construct {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Steiner system file; omitted for t = 1, where the trivial system
        /// (all 1-subspaces) is used.
        #[arg(long)]
        steiner: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
    },
    /// Classify a family against the extremal structures.
    Classify {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Exact maximum cover-free family by exhaustive branch and bound.
    Search {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Stop as soon as a family of this size is found.
        #[arg(long)]
        target: Option<usize>,
        /// Enumerate every maximum family (disables symmetry fixing).
        #[arg(long)]
        all: bool,
        /// Root the search at the lexicographically least candidate.
        #[arg(long = "fix-first")]
        fix_first: bool,
        #[arg(long = "node-limit")]
        node_limit: Option<u64>,
        /// Seconds.
        #[arg(long = "time-limit")]
        time_limit: Option<u64>,
    },
    /// Run lemma audits against a family (from a file or from search).
    Audit {
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Registry entry id, or "all".
        #[arg(long, default_value = "all")]
        lemma: String,
        /// Path to a family file, or "search:max" to audit every maximum
        /// family found by exhaustive search at (q, n, k).
        #[arg(long)]
        family: String,
        #[arg(long)]
        strict: bool,
    },
    /// A perfect matching [V, a] -> [V, n-a] by direct complements.
    Psi {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        a: usize,
    },
    /// Bound / floor / maximum table over a range of n.
    Table {
        #[arg(long)]
        q: u64,
        /// Range of ambient dimensions: "4", "3..5", or "3,4,5".
        #[arg(long)]
        n: String,
        #[arg(long)]
        k: usize,
        /// Also run the exhaustive search per feasible cell.
        #[arg(long)]
        max: bool,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return EXIT_OK;
            }
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    match run(cli.cmd) {
        Ok((certificate, code)) => {
            println!(
                "{}",
                serde_json::to_string(&certificate).expect("serializable")
            );
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Infeasible { .. } => EXIT_INFEASIBLE,
        Error::Parse(_) | Error::NonCanonical(_) | Error::NotSteiner(_) | Error::NotInFamily => {
            EXIT_DATA
        }
        Error::Inconsistency(_) => EXIT_INCONSISTENT,
        _ => EXIT_USAGE,
    }
}

fn certificate(command: &str, params: Value, result: Value, checks: &[(String, bool)]) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "params": params,
        "result": result,
        "checks": checks
            .iter()
            .map(|(name, pass)| json!({"name": name, "pass": pass}))
            .collect::<Vec<_>>(),
    })
}

fn load_family(path: &PathBuf, strict: bool) -> Result<Family, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let repr: FamilyRepr = serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("malformed family file: {e}")))?;
    repr.to_family(strict)
}

fn family_value(f: &Family) -> Value {
    serde_json::to_value(FamilyRepr::of(f)).expect("serializable")
}

fn subspace_value(s: &Subspace) -> Value {
    serde_json::to_value(SubspaceRepr::of(s)).expect("serializable")
}

fn report_value(r: &AuditReport) -> Value {
    let (outcome, reason) = match &r.outcome {
        Outcome::Pass => ("pass", Value::Null),
        Outcome::Fail => ("fail", Value::Null),
        Outcome::Inapplicable(why) => ("inapplicable", json!(why)),
    };
    json!({
        "lemma_id": r.lemma_id,
        "instance": r.instance,
        "lhs": r.lhs_string(),
        "rhs": r.rhs_string(),
        "relation": r.relation,
        "outcome": outcome,
        "reason": reason,
        "witness": r.witness,
        "real_bound": r.real_bound.map(|(v, tol)| json!({"value": v, "tolerance": tol})),
    })
}

fn search_result_value(r: &SearchResult, floor: &str) -> Value {
    json!({
        "max": r.max_size,
        "optimal": r.optimal,
        "nodes": r.nodes,
        "bound_floor": floor,
        "witness": family_value(&r.witness),
        "maximum_count": r.all_maximum.as_ref().map(|v| v.len()),
        "maximum_families": r.all_maximum.as_ref().map(|v| {
            v.iter().map(family_value).collect::<Vec<_>>()
        }),
    })
}

type CmdOutput = Result<(Value, i32), Error>;

fn run(cmd: Cmd) -> CmdOutput {
    match cmd {
        Cmd::Enumerate {
            q,
            n,
            k,
            count_only,
        } => cmd_enumerate(q, n, k, count_only),
        Cmd::Bound { q, n, k } => cmd_bound(q, n, k),
        Cmd::Check {
            pred,
            family,
            strict,
        } => cmd_check(pred, &family, strict),
        Cmd::Steiner { t, family, strict } => cmd_steiner(t, &family, strict),
        Cmd::Construct {
            q,
            n,
            k,
            steiner,
            strict,
        } => cmd_construct(q, n, k, steiner, strict),
        Cmd::Classify { family, strict } => cmd_classify(&family, strict),
        Cmd::Search {
            q,
            n,
            k,
            target,
            all,
            fix_first,
            node_limit,
            time_limit,
        } => cmd_search(q, n, k, target, all, fix_first, node_limit, time_limit),
        Cmd::Audit {
            q,
            n,
            k,
            lemma,
            family,
            strict,
        } => cmd_audit(q, n, k, &lemma, &family, strict),
        Cmd::Psi { q, n, a } => cmd_psi(q, n, a),
        Cmd::Table { q, n, k, max } => cmd_table(q, &n, k, max),
    }
}

fn cmd_enumerate(q: u64, n: usize, k: usize, count_only: bool) -> CmdOutput {
    let amb = Ambient::new(n, q)?;
    let subs: Vec<Subspace> = enumerate_k(&amb, k)?.collect();
    let expected = qbinom_int(n as i64, k as i64, q)?;
    let count_ok = expected == subs.len().into();
    let result = if count_only {
        json!({"count": subs.len()})
    } else {
        json!({
            "count": subs.len(),
            "subspaces": subs.iter().map(subspace_value).collect::<Vec<_>>(),
        })
    };
    let checks = vec![("count_matches_formula".to_string(), count_ok)];
    let cert = certificate(
        "enumerate",
        json!({"q": q, "n": n, "k": k, "count_only": count_only}),
        result,
        &checks,
    );
    Ok((cert, if count_ok { EXIT_OK } else { EXIT_INCONSISTENT }))
}

fn cmd_bound(q: u64, n: usize, k: usize) -> CmdOutput {
    qcover::make_field(q)?; // prime-power validation
    let b = cf_bound(n as i64, k as i64, q)?;
    let bracketing = qcover::qbinom::floor_consistent(&b);
    // the odd bound at (n, 2t-1) coincides with the even bound at (n+1, 2t)
    let partner = if k.is_multiple_of(2) {
        cf_bound(n as i64 - 1, k as i64 - 1, q)
    } else {
        cf_bound(n as i64 + 1, k as i64 + 1, q)
    };
    let parity_ok = partner.map(|p| p.bound == b.bound).unwrap_or(false);
    let result = json!({
        "n": n,
        "k": k,
        "q": q,
        "t": b.t,
        "bound": rational_string(&b.bound),
        "bound_num": b.bound.numer().to_string(),
        "bound_den": b.bound.denom().to_string(),
        "floor": b.floor.to_string(),
    });
    let checks = vec![
        ("floor_bracketing".to_string(), bracketing),
        ("parity_reduction".to_string(), parity_ok),
    ];
    let ok = bracketing && parity_ok;
    Ok((
        certificate("bound", json!({"q": q, "n": n, "k": k}), result, &checks),
        if ok { EXIT_OK } else { EXIT_INCONSISTENT },
    ))
}

fn cmd_check(pred: Pred, path: &PathBuf, strict: bool) -> CmdOutput {
    let fam = load_family(path, strict)?;
    let (pass, witness, recheck) = match pred {
        Pred::CoverFree => {
            let v = fam.cover_violation();
            let again = fam.cover_violation();
            let recheck = v == again;
            (
                v.is_none(),
                v.map(|w| {
                    json!({
                        "f0": subspace_value(&w.f0),
                        "f1": subspace_value(&w.f1),
                        "f2": subspace_value(&w.f2),
                    })
                }),
                recheck,
            )
        }
        Pred::Intersecting => {
            let pass = fam.is_intersecting();
            (pass, None, fam.is_intersecting() == pass)
        }
    };
    let pred_name = match pred {
        Pred::CoverFree => "cover-free",
        Pred::Intersecting => "intersecting",
    };
    let result = json!({
        "predicate": pred_name,
        "pass": pass,
        "witness": witness,
        "family_size": fam.len(),
    });
    let checks = vec![("predicate_recheck".to_string(), recheck)];
    Ok((
        certificate(
            "check",
            json!({"pred": pred_name, "family": path.display().to_string(), "strict": strict}),
            result,
            &checks,
        ),
        EXIT_OK,
    ))
}

fn cmd_steiner(t: usize, path: &PathBuf, strict: bool) -> CmdOutput {
    let fam = load_family(path, strict)?;
    let is = fam.is_steiner(t)?;
    let blocks = qbinom_int(fam.k() as i64, t as i64, fam.ambient().q())?;
    let total = qbinom_int(fam.ambient().n() as i64, t as i64, fam.ambient().q())?;
    let count_ok = blocks * fam.len() == total;
    let result = json!({
        "t": t,
        "k": fam.k(),
        "n": fam.ambient().n(),
        "q": fam.ambient().q(),
        "is_steiner": is,
        "count_identity": count_ok,
        "family_size": fam.len(),
    });
    let checks = vec![("coverage_recheck".to_string(), fam.is_steiner(t)? == is)];
    Ok((
        certificate(
            "steiner",
            json!({"t": t, "family": path.display().to_string(), "strict": strict}),
            result,
            &checks,
        ),
        EXIT_OK,
    ))
}

fn cmd_construct(
    q: u64,
    n: usize,
    k: usize,
    steiner_path: Option<PathBuf>,
    strict: bool,
) -> CmdOutput {
    if k < 1 || n < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "construction needs 1 <= k <= n-1 (got k={k}, n={n})"
        )));
    }
    let t = k.div_ceil(2);
    let bound = cf_bound(n as i64, k as i64, q)?;
    let fam = if k.is_multiple_of(2) {
        // pencil over an S_q(t, 2t-1, n-1)
        let steiner = match &steiner_path {
            Some(p) => {
                let s = load_family(p, strict)?;
                if s.ambient().n() != n - 1 || s.ambient().q() != q || s.k() != k - 1 {
                    return Err(Error::NotSteiner(format!(
                        "expected blocks of dimension {} in GF({q})^{}",
                        k - 1,
                        n - 1
                    )));
                }
                s
            }
            None => {
                if t != 1 {
                    return Err(Error::InvalidArgument(
                        "only t = 1 has a built-in Steiner system; pass --steiner".into(),
                    ));
                }
                let w = Ambient::new(n - 1, q)?;
                Family::new(&w, 1, enumerate_k(&w, 1)?.collect())?
            }
        };
        construct_pencil(&steiner)?
    } else {
        // the extremal family is itself an S_q(t, 2t-1, n)
        let fam = match &steiner_path {
            Some(p) => {
                let s = load_family(p, strict)?;
                if s.ambient().n() != n || s.ambient().q() != q || s.k() != k {
                    return Err(Error::NotSteiner(format!(
                        "expected blocks of dimension {k} in GF({q})^{n}"
                    )));
                }
                s
            }
            None => {
                if t != 1 {
                    return Err(Error::InvalidArgument(
                        "only t = 1 has a built-in Steiner system; pass --steiner".into(),
                    ));
                }
                let amb = Ambient::new(n, q)?;
                Family::new(&amb, 1, enumerate_k(&amb, 1)?.collect())?
            }
        };
        if !fam.is_steiner(t)? {
            return Err(Error::NotSteiner(format!(
                "input is not an S_q({t}, {k}, {n})"
            )));
        }
        fam
    };
    let cover_free = fam.is_cover_free();
    let size_ok = bound.floor == fam.len().into();
    let result = json!({
        "q": q, "n": n, "k": k, "t": t,
        "size": fam.len(),
        "bound_floor": bound.floor.to_string(),
        "family": family_value(&fam),
    });
    let checks = vec![
        ("result_cover_free".to_string(), cover_free),
        ("size_equals_bound_floor".to_string(), size_ok),
    ];
    let ok = cover_free && size_ok;
    Ok((
        certificate(
            "construct",
            json!({
                "q": q, "n": n, "k": k,
                "steiner": steiner_path.map(|p| p.display().to_string()),
                "strict": strict,
            }),
            result,
            &checks,
        ),
        if ok { EXIT_OK } else { EXIT_INCONSISTENT },
    ))
}

fn cmd_classify(path: &PathBuf, strict: bool) -> CmdOutput {
    let fam = load_family(path, strict)?;
    let class = classify_extremal(&fam)?;
    let (result, verified) = match &class {
        ExtremalClassification::PencilSteiner { e, w, residue } => {
            let t = fam.k() / 2;
            let all_contain = fam
                .members()
                .iter()
                .all(|m| m.contains(e).expect("same ambient"));
            let verified = all_contain && residue.is_steiner(t)?;
            (
                json!({
                    "kind": "pencil_steiner",
                    "e": subspace_value(e),
                    "w": subspace_value(w),
                    "residue": family_value(residue),
                }),
                verified,
            )
        }
        ExtremalClassification::Steiner { t } => {
            (json!({"kind": "steiner", "t": t}), fam.is_steiner(*t)?)
        }
        ExtremalClassification::None => (json!({"kind": "none"}), true),
    };
    let checks = vec![("classification_reverified".to_string(), verified)];
    Ok((
        certificate(
            "classify",
            json!({"family": path.display().to_string(), "strict": strict}),
            result,
            &checks,
        ),
        if verified { EXIT_OK } else { EXIT_INCONSISTENT },
    ))
}

#[allow(clippy::too_many_arguments)]
fn cmd_search(
    q: u64,
    n: usize,
    k: usize,
    target: Option<usize>,
    all: bool,
    fix_first: bool,
    node_limit: Option<u64>,
    time_limit: Option<u64>,
) -> CmdOutput {
    if all && fix_first {
        return Err(Error::InvalidArgument(
            "--all enumerates every maximum family and cannot use --fix-first".into(),
        ));
    }
    let mut cfg = SearchConfig {
        target,
        fix_first,
        ..SearchConfig::default()
    };
    if let Some(nl) = node_limit {
        cfg.node_limit = nl;
    }
    if let Some(tl) = time_limit {
        cfg.time_limit = Duration::from_secs(tl);
    }
    let floor = cf_bound(n as i64, k as i64, q)
        .map(|b| b.floor.to_string())
        .unwrap_or_else(|_| "1".to_string());
    let result = if all {
        enumerate_maximum_with(q, n, k, SearchPredicate::CoverFree)?
    } else {
        max_cover_free(q, n, k, &cfg)?
    };
    let witness_ok = result.witness.is_cover_free();
    let floor_ok = cf_bound(n as i64, k as i64, q)
        .map(|b| b.floor >= result.max_size.into())
        .unwrap_or(true);
    let checks = vec![
        ("witness_verified".to_string(), witness_ok),
        ("max_le_bound_floor".to_string(), floor_ok),
    ];
    let code = if !(witness_ok && floor_ok) {
        EXIT_INCONSISTENT
    } else if result.optimal {
        EXIT_OK
    } else {
        EXIT_CAPPED
    };
    Ok((
        certificate(
            "search",
            json!({
                "q": q, "n": n, "k": k,
                "target": target, "all": all, "fix_first": fix_first,
                "node_limit": node_limit, "time_limit": time_limit,
            }),
            search_result_value(&result, &floor),
            &checks,
        ),
        code,
    ))
}

fn cmd_audit(
    q: Option<u64>,
    n: Option<usize>,
    k: Option<usize>,
    lemma: &str,
    family_arg: &str,
    strict: bool,
) -> CmdOutput {
    let lemma_filter = if lemma == "all" { None } else { Some(lemma) };
    let families: Vec<Family> = if family_arg == "search:max" {
        let (Some(q), Some(n), Some(k)) = (q, n, k) else {
            return Err(Error::InvalidArgument(
                "audit with --family search:max needs --q, --n and --k".into(),
            ));
        };
        qcover::search::enumerate_maximum(q, n, k)?
    } else {
        let fam = load_family(&PathBuf::from(family_arg), strict)?;
        if let Some(q) = q {
            if q != fam.ambient().q() {
                return Err(Error::InvalidArgument(
                    "--q disagrees with the family file".into(),
                ));
            }
        }
        if let Some(n) = n {
            if n != fam.ambient().n() {
                return Err(Error::InvalidArgument(
                    "--n disagrees with the family file".into(),
                ));
            }
        }
        if let Some(k) = k {
            if k != fam.k() {
                return Err(Error::InvalidArgument(
                    "--k disagrees with the family file".into(),
                ));
            }
        }
        vec![fam]
    };

    let mut reports = Vec::new();
    let mut deterministic = true;
    for (idx, fam) in families.iter().enumerate() {
        let batch = run_registry(fam, lemma_filter)?;
        deterministic &= batch == run_registry(fam, lemma_filter)?;
        for r in &batch {
            let mut v = report_value(r);
            v["family_index"] = json!(idx);
            reports.push(v);
        }
    }
    let any_failed = reports.iter().any(|r| r["outcome"] == "fail");
    let checks = vec![
        ("reports_deterministic".to_string(), deterministic),
        ("no_failures".to_string(), !any_failed),
    ];
    let result = json!({
        "family_count": families.len(),
        "reports": reports,
    });
    let code = if any_failed || !deterministic {
        EXIT_INCONSISTENT
    } else {
        EXIT_OK
    };
    Ok((
        certificate(
            "audit",
            json!({"q": q, "n": n, "k": k, "lemma": lemma, "family": family_arg}),
            result,
            &checks,
        ),
        code,
    ))
}

fn cmd_psi(q: u64, n: usize, a: usize) -> CmdOutput {
    let amb = Ambient::new(n, q)?;
    let pairs = psi_matching(&amb, a)?;
    let all_complementary = pairs
        .iter()
        .all(|(l, r)| l.is_direct_complement(r).expect("same ambient"));
    let expected = qbinom_int(n as i64, a as i64, q)?;
    let perfect = expected == pairs.len().into();
    let result = json!({
        "q": q, "n": n, "a": a,
        "count": pairs.len(),
        "pairs": pairs
            .iter()
            .map(|(l, r)| json!([subspace_value(l), subspace_value(r)]))
            .collect::<Vec<_>>(),
    });
    let checks = vec![
        ("all_pairs_complementary".to_string(), all_complementary),
        ("perfect_matching".to_string(), perfect),
    ];
    let ok = all_complementary && perfect;
    Ok((
        certificate("psi", json!({"q": q, "n": n, "a": a}), result, &checks),
        if ok { EXIT_OK } else { EXIT_INCONSISTENT },
    ))
}

fn parse_range(spec: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::InvalidArgument(format!("cannot parse range '{spec}'"));
    if let Some((lo, hi)) = spec.split_once("..").or_else(|| spec.split_once('-')) {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    if spec.contains(',') {
        return spec
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect();
    }
    Ok(vec![spec.trim().parse().map_err(|_| bad())?])
}

fn cmd_table(q: u64, n_spec: &str, k: usize, run_max: bool) -> CmdOutput {
    qcover::make_field(q)?; // prime-power validation
    let ns = parse_range(n_spec)?;
    let mut rows = Vec::new();
    let mut consistent = true;
    for n in &ns {
        let n = *n;
        let bound = match cf_bound(n as i64, k as i64, q) {
            Ok(b) => b,
            Err(e) => {
                rows.push(json!({"q": q, "n": n, "k": k, "status": format!("no bound: {e}")}));
                continue;
            }
        };
        let mut row = json!({
            "q": q, "n": n, "k": k, "t": bound.t,
            "bound": rational_string(&bound.bound),
            "floor": bound.floor.to_string(),
            "status": "ok",
        });
        if run_max {
            match qcover::search::verify_theorem(q, n, k) {
                Ok(rep) => {
                    row["max"] = json!(rep.max);
                    row["optimal"] = json!(rep.optimal);
                    row["attained"] = json!(rep.attained);
                    row["gap"] = json!(rational_string(&rep.gap));
                    if let Some(c) = rep.maximum_count {
                        row["maximum_count"] = json!(c);
                    }
                    if let Some(ok) = rep.classification_ok {
                        row["classification_ok"] = json!(ok);
                        consistent &= ok;
                    }
                    consistent &= bound.floor.to_usize().map(|f| rep.max <= f).unwrap_or(true);
                }
                Err(Error::Infeasible { estimate, .. }) => {
                    row["status"] = json!("infeasible");
                    row["estimate"] = json!(estimate);
                }
                Err(e) => return Err(e),
            }
        }
        rows.push(row);
    }
    let checks = vec![(
        "bounds_and_classifications_consistent".to_string(),
        consistent,
    )];
    Ok((
        certificate(
            "table",
            json!({"q": q, "n": n_spec, "k": k, "max": run_max}),
            json!({"rows": rows}),
            &checks,
        ),
        if consistent {
            EXIT_OK
        } else {
            EXIT_INCONSISTENT
        },
    ))
}
