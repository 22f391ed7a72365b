//! Command-line surface: building the named examples, validating and
//! inspecting fans, intersection tables, extremal-ray reports, contractions,
//! adjoint-divisor reports, nef thresholds, section counts, and the batch
//! verification harness.
//!
//! Subcommands compose through fan documents on disk or stdin/stdout. Exit
//! codes: 0 success, 1 verification failure, 2 input error.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num::{One, Signed, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::arith::{format_rat, int, parse_rat, to_rat, Int};
use crate::constructions::{build, ExampleSpec};
use crate::divisor::{canonical_divisor, principal_divisor, q_cartier_data, sections_count};
use crate::document::FanDocument;
use crate::error::Error;
use crate::fan::Fan;
use crate::intersect::{fake_wps_audit, wall_degree};
use crate::mori::{
    adjoint_report, contract_ray, mori_cone, nef_threshold, ray_length, reid_profile,
    some_ample_cartier, theorem_suite, Contraction,
};

#[derive(Parser)]
#[command(name = "toric", version, about = "Exact computations on toric varieties given as fans")]
pub struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteKind {
    All,
    Lengths,
    Adjoint,
    Fakewps,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build a named example fan (see the constructions module for names)
    Build {
        name: String,
        /// Integer parameters as key=value, repeatable
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, i64)>,
        /// Output path; stdout when omitted
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validation report of a fan document
    Validate { fan: Option<PathBuf> },
    /// List the walls (codimension-one cones) with adjacency
    Walls { fan: Option<PathBuf> },
    /// Table of wall degrees of a named divisor
    Intersect {
        fan: Option<PathBuf>,
        #[arg(long)]
        divisor: String,
    },
    /// Extremal rays with lengths and contraction profiles
    Rays { fan: Option<PathBuf> },
    /// Contract an extremal ray (index into the `rays` listing)
    Contract {
        fan: Option<PathBuf>,
        #[arg(long)]
        ray: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Positivity report for K + c D
    Adjoint {
        fan: Option<PathBuf>,
        #[arg(long)]
        divisor: String,
        #[arg(long)]
        coeff: String,
    },
    /// Nef threshold of an ample Cartier divisor
    Threshold {
        fan: Option<PathBuf>,
        #[arg(long)]
        divisor: String,
    },
    /// Number of lattice points of the divisor polytope
    Sections {
        fan: Option<PathBuf>,
        #[arg(long)]
        divisor: String,
    },
    /// Run the verification suites; nonzero exit on violation
    Verify {
        fan: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SuiteKind::All)]
        suite: SuiteKind,
    },
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let value: i64 = v.trim().parse().map_err(|_| format!("`{v}` is not an integer"))?;
    Ok((k.trim().to_string(), value))
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(Outcome { text, failed }) => {
            print!("{text}");
            if failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

struct Outcome {
    text: String,
    failed: bool,
}

fn read_document(path: &Option<PathBuf>) -> Result<FanDocument, Error> {
    let content = match path {
        Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)?,
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    FanDocument::parse(&content)
}

fn load(path: &Option<PathBuf>) -> Result<(FanDocument, Fan), Error> {
    let doc = read_document(path)?;
    let fan = doc.to_fan()?;
    Ok((doc, fan))
}

fn write_output(doc: &FanDocument, output: &Option<PathBuf>) -> Result<String, Error> {
    let json = doc.to_json();
    match output {
        Some(p) => {
            std::fs::write(p, &json)?;
            Ok(format!("wrote {}\n", p.display()))
        }
        None => Ok(json),
    }
}

fn fan_summary(doc: &FanDocument, fan: &Fan) -> Value {
    let rep = fan.validate();
    json!({
        "name": doc.metadata.get("name").cloned().unwrap_or_default(),
        "rank": fan.rank(),
        "rays": fan.rays().len(),
        "max_cones": fan.max_cones().len(),
        "is_fan": rep.is_fan,
        "is_complete": rep.is_complete,
        "is_convex_support": rep.is_convex_support,
        "is_simplicial": rep.is_simplicial,
        "is_smooth": rep.is_smooth,
    })
}

fn execute(cli: Cli) -> Result<Outcome, Error> {
    let format = cli.format;
    match cli.command {
        Command::Build { name, params, output } => {
            let mut spec = ExampleSpec::new(&name);
            for (k, v) in params {
                spec = spec.with(&k, v);
            }
            let example = build(&spec)?;
            let doc = FanDocument::from_example(&example)?;
            Ok(Outcome { text: write_output(&doc, &output)?, failed: false })
        }
        Command::Validate { fan } => {
            let (doc, fan) = load(&fan)?;
            let rep = fan.validate();
            let text = match format {
                Format::Json => {
                    let mut v = fan_summary(&doc, &fan);
                    v["errors"] = json!(rep.errors);
                    format!("{}\n", serde_json::to_string_pretty(&v)?)
                }
                Format::Text => {
                    let mut s = format!(
                        "is_fan: {}\nis_complete: {}\nis_convex_support: {}\nis_simplicial: {}\nis_smooth: {}\n",
                        rep.is_fan, rep.is_complete, rep.is_convex_support, rep.is_simplicial,
                        rep.is_smooth
                    );
                    for e in &rep.errors {
                        s.push_str(&format!("error: {e}\n"));
                    }
                    s
                }
            };
            Ok(Outcome { text, failed: false })
        }
        Command::Walls { fan } => {
            let (doc, fan) = load(&fan)?;
            let walls = fan.walls()?;
            let text = match format {
                Format::Json => {
                    let rows: Vec<Value> = walls
                        .iter()
                        .map(|w| {
                            json!({
                                "rays": w.rays,
                                "left": w.left,
                                "right": w.right,
                                "interior": w.is_interior(),
                            })
                        })
                        .collect();
                    let v = json!({ "fan_summary": fan_summary(&doc, &fan), "per_wall": rows });
                    format!("{}\n", serde_json::to_string_pretty(&v)?)
                }
                Format::Text => {
                    let mut s = String::new();
                    for w in walls {
                        let side = match w.right {
                            Some(r) => format!("cones {} | {}", w.left, r),
                            None => format!("cone {} | boundary", w.left),
                        };
                        s.push_str(&format!("wall {:?}: {side}\n", w.rays));
                    }
                    s
                }
            };
            Ok(Outcome { text, failed: false })
        }
        Command::Intersect { fan, divisor } => {
            let (doc, fan) = load(&fan)?;
            let d = doc.divisor(&fan, &divisor)?;
            let mut rows = Vec::new();
            for w in fan.walls()? {
                if !w.is_interior() {
                    continue;
                }
                rows.push((w.rays.clone(), wall_degree(&fan, &d, w)?));
            }
            let text = match format {
                Format::Json => {
                    let table: Vec<Value> = rows
                        .iter()
                        .map(|(rays, deg)| json!({ "wall": rays, "degree": format_rat(deg) }))
                        .collect();
                    let v = json!({ "fan_summary": fan_summary(&doc, &fan), "divisor": divisor, "per_wall": table });
                    format!("{}\n", serde_json::to_string_pretty(&v)?)
                }
                Format::Text => {
                    let mut s = format!("{divisor} degrees on interior walls:\n");
                    for (rays, deg) in &rows {
                        s.push_str(&format!("  wall {rays:?}: {}\n", format_rat(deg)));
                    }
                    s
                }
            };
            Ok(Outcome { text, failed: false })
        }
        Command::Rays { fan } => {
            let (doc, fan) = load(&fan)?;
            let rays = mori_cone(&fan)?;
            let mut rows = Vec::new();
            for (i, ray) in rays.iter().enumerate() {
                let length = ray_length(&fan, ray, None)?;
                let profile = reid_profile(&fan, ray)?;
                rows.push((i, ray, length, profile));
            }
            let text = match format {
                Format::Json => {
                    let table: Vec<Value> = rows
                        .iter()
                        .map(|(i, ray, length, profile)| {
                            json!({
                                "index": i,
                                "generator": ray.generator.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                                "member_walls": ray.member_walls,
                                "length": format_rat(length),
                                "profile": {
                                    "alpha": profile.alpha,
                                    "beta": profile.beta,
                                    "dim_a": profile.dim_a,
                                    "dim_b": profile.dim_b,
                                    "dim_f": profile.dim_f,
                                    "d": profile.d,
                                    "kind": profile.kind.to_string(),
                                },
                            })
                        })
                        .collect();
                    let v = json!({ "fan_summary": fan_summary(&doc, &fan), "per_ray": table });
                    format!("{}\n", serde_json::to_string_pretty(&v)?)
                }
                Format::Text => {
                    let mut s = format!("{} extremal ray(s)\n", rows.len());
                    for (i, ray, length, profile) in &rows {
                        s.push_str(&format!(
                            "ray {i}: length {} ({}), alpha={} beta={} dimA={} dimB={} d={}, walls {:?}\n",
                            format_rat(length),
                            profile.kind,
                            profile.alpha,
                            profile.beta,
                            profile.dim_a,
                            profile.dim_b,
                            profile.d,
                            ray.member_walls,
                        ));
                    }
                    s
                }
            };
            Ok(Outcome { text, failed: false })
        }
        Command::Contract { fan, ray, output } => {
            let (_, fan) = load(&fan)?;
            let rays = mori_cone(&fan)?;
            let extremal = rays.get(ray).ok_or_else(|| {
                Error::BadParameters(format!("ray index {ray} out of range (have {})", rays.len()))
            })?;
            let (target, kind) = match contract_ray(&fan, extremal)? {
                Contraction::Birational { fan, .. } => (fan, "birational"),
                Contraction::Fibration { base, .. } => (base, "fibration"),
            };
            let mut doc = FanDocument::from_fan(&target)?;
            doc.metadata.insert("contraction".to_string(), kind.to_string());
            doc.metadata.insert("contracted_ray".to_string(), ray.to_string());
            Ok(Outcome { text: write_output(&doc, &output)?, failed: false })
        }
        Command::Adjoint { fan, divisor, coeff } => {
            let (doc, fan) = load(&fan)?;
            let d = doc.divisor(&fan, &divisor)?;
            let c = parse_rat(&coeff)?;
            let report = adjoint_report(&fan, &d, &c)?;
            let text = match format {
                Format::Json => {
                    let v = json!({
                        "fan_summary": fan_summary(&doc, &fan),
                        "divisor": divisor,
                        "coeff": format_rat(&report.coeff),
                        "pe": report.pseudo_effective,
                        "nef": report.nef,
                        "sections": report.sections,
                        "consistent": report.consistent_with_adjoint_theorem,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v)?)
                }
                Format::Text => format!(
                    "K + {} {divisor}: pe={} nef={} sections={} consistent={}\n",
                    format_rat(&report.coeff),
                    report.pseudo_effective,
                    report.nef,
                    report.sections,
                    report.consistent_with_adjoint_theorem,
                ),
            };
            Ok(Outcome { text, failed: false })
        }
        Command::Threshold { fan, divisor } => {
            let (doc, fan) = load(&fan)?;
            let d = doc.divisor(&fan, &divisor)?;
            let tau = nef_threshold(&fan, &d)?;
            let text = match format {
                Format::Json => {
                    let v = json!({
                        "fan_summary": fan_summary(&doc, &fan),
                        "divisor": divisor,
                        "threshold": format_rat(&tau),
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v)?)
                }
                Format::Text => format!("{}\n", format_rat(&tau)),
            };
            Ok(Outcome { text, failed: false })
        }
        Command::Sections { fan, divisor } => {
            let (doc, fan) = load(&fan)?;
            let d = doc.divisor(&fan, &divisor)?;
            let count = sections_count(&fan, &d)?;
            let text = match format {
                Format::Json => {
                    let v = json!({
                        "fan_summary": fan_summary(&doc, &fan),
                        "divisor": divisor,
                        "sections": count,
                    });
                    format!("{}\n", serde_json::to_string_pretty(&v)?)
                }
                Format::Text => format!("{count}\n"),
            };
            Ok(Outcome { text, failed: false })
        }
        Command::Verify { fan, suite } => {
            let (doc, fan) = load(&fan)?;
            let verdicts = run_suites(&doc, &fan, suite)?;
            let failed = verdicts.iter().any(|v| v.1 == VerdictState::Fail);
            let text = match format {
                Format::Json => {
                    let list: Vec<Value> = verdicts
                        .iter()
                        .map(|(name, state, detail)| {
                            json!({ "check": name, "result": state.to_string(), "detail": detail })
                        })
                        .collect();
                    let v = json!({ "fan_summary": fan_summary(&doc, &fan), "verdicts": list, "pass": !failed });
                    format!("{}\n", serde_json::to_string_pretty(&v)?)
                }
                Format::Text => {
                    let mut s = String::new();
                    for (name, state, detail) in &verdicts {
                        if detail.is_empty() {
                            s.push_str(&format!("[{state}] {name}\n"));
                        } else {
                            s.push_str(&format!("[{state}] {name}: {detail}\n"));
                        }
                    }
                    s.push_str(if failed { "FAIL\n" } else { "OK\n" });
                    s
                }
            };
            Ok(Outcome { text, failed })
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VerdictState {
    Pass,
    Fail,
    Skip,
}

impl std::fmt::Display for VerdictState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VerdictState::Pass => write!(f, "pass"),
            VerdictState::Fail => write!(f, "FAIL"),
            VerdictState::Skip => write!(f, "skip"),
        }
    }
}

type Verdicts = Vec<(String, VerdictState, String)>;

fn run_suites(doc: &FanDocument, fan: &Fan, suite: SuiteKind) -> Result<Verdicts, Error> {
    let mut out = Verdicts::new();
    let lengths = matches!(suite, SuiteKind::All | SuiteKind::Lengths);
    let adjoint = matches!(suite, SuiteKind::All | SuiteKind::Adjoint);
    let fakewps = matches!(suite, SuiteKind::All | SuiteKind::Fakewps);

    if lengths {
        if fan.has_curve_support() && fan.is_simplicial() {
            let report = theorem_suite(fan, None)?;
            for (ri, ray) in report.rays.iter().enumerate() {
                for check in &ray.checks {
                    let state = if check.pass { VerdictState::Pass } else { VerdictState::Fail };
                    out.push((format!("ray {ri}: {}", check.name), state, check.detail.clone()));
                }
            }
            if report.rays.is_empty() {
                out.push(("no extremal rays (affine base)".to_string(), VerdictState::Skip, String::new()));
            }
        } else {
            out.push((
                "length suite".to_string(),
                VerdictState::Skip,
                "needs a simplicial fan with complete or convex support".to_string(),
            ));
        }
    }

    if adjoint {
        if fan.is_complete() {
            let marked = doc.divisor(fan, "D").ok();
            let d = match marked {
                Some(d)
                    if crate::divisor::is_cartier(fan, &d).unwrap_or(false)
                        && crate::mori::is_ample(fan, &d).unwrap_or(false) =>
                {
                    Some(d)
                }
                _ => some_ample_cartier(fan)?,
            };
            match d {
                Some(d) => {
                    let n_minus_one = to_rat(&int(fan.rank() as i64 - 1));
                    let report = adjoint_report(fan, &d, &n_minus_one)?;
                    let state = if report.consistent_with_adjoint_theorem {
                        VerdictState::Pass
                    } else {
                        VerdictState::Fail
                    };
                    out.push((
                        "K+(n-1)D pseudo-effective iff nef".to_string(),
                        state,
                        format!("pe={} nef={}", report.pseudo_effective, report.nef),
                    ));
                }
                None => out.push((
                    "adjoint suite".to_string(),
                    VerdictState::Skip,
                    "no ample Cartier divisor found".to_string(),
                )),
            }
        } else {
            out.push((
                "adjoint suite".to_string(),
                VerdictState::Skip,
                "fan is not complete".to_string(),
            ));
        }
    }

    if fakewps {
        match fake_wps_audit(fan) {
            Ok(report) => {
                let state = |b: bool| if b { VerdictState::Pass } else { VerdictState::Fail };
                out.push((
                    "fake wps: min wall degree of -K <= n+1".to_string(),
                    state(report.bound_holds),
                    format!("min = {}", format_rat(&report.min_degree)),
                ));
                out.push((
                    "fake wps: support-function degrees match the multiplicity-ratio form"
                        .to_string(),
                    state(report.oracle_agrees),
                    String::new(),
                ));
                let n_plus_one = to_rat(&int(fan.rank() as i64 + 1));
                if report.min_degree == n_plus_one {
                    out.push((
                        "fake wps: degree n+1 forces unit weights and equal multiplicities"
                            .to_string(),
                        state(report.equality_case),
                        String::new(),
                    ));
                }
            }
            Err(Error::NotFakeWPS(why)) => {
                out.push(("fake wps suite".to_string(), VerdictState::Skip, why));
            }
            Err(e) => return Err(e),
        }
    }

    if suite == SuiteKind::All {
        out.extend(invariant_suite(doc, fan)?);
    }
    Ok(out)
}

/// Cross-cutting invariants: chart symmetry of wall degrees, vanishing of
/// principal-divisor degrees, and document round-tripping.
fn invariant_suite(doc: &FanDocument, fan: &Fan) -> Result<Verdicts, Error> {
    let mut out = Verdicts::new();
    if fan.has_curve_support() {
        let k = canonical_divisor(fan);
        let mut symmetric = true;
        for w in fan.walls()? {
            if !w.is_interior() {
                continue;
            }
            let flipped = crate::fan::Wall {
                rays: w.rays.clone(),
                left: w.right.unwrap(),
                right: Some(w.left),
            };
            if wall_degree(fan, &k, w)? != wall_degree(fan, &k, &flipped)? {
                symmetric = false;
            }
        }
        out.push((
            "chart symmetry of wall degrees".to_string(),
            if symmetric { VerdictState::Pass } else { VerdictState::Fail },
            String::new(),
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(0x7031C);
        let mut principal_ok = true;
        for _ in 0..10 {
            let u: Vec<Int> = (0..fan.rank())
                .map(|_| int((rng.next_u64() % 9) as i64 - 4))
                .collect();
            let d = principal_divisor(fan, &u);
            for w in fan.walls()? {
                if w.is_interior() && !wall_degree(fan, &d, w)?.is_zero() {
                    principal_ok = false;
                }
            }
        }
        out.push((
            "principal divisors have degree zero on all interior walls".to_string(),
            if principal_ok { VerdictState::Pass } else { VerdictState::Fail },
            String::new(),
        ));
    }
    if fan.is_complete() {
        // the canonical divisor is Q-Cartier on every shipped fan; report its
        // index for the record
        match q_cartier_data(fan, &canonical_divisor(fan)) {
            Ok(data) => {
                let gorenstein = data.cartier_index.is_one();
                out.push((
                    "canonical divisor Q-Cartier".to_string(),
                    VerdictState::Pass,
                    format!(
                        "index {}{}",
                        data.cartier_index,
                        if gorenstein { " (Gorenstein)" } else { "" }
                    ),
                ));
            }
            Err(_) => out.push((
                "canonical divisor Q-Cartier".to_string(),
                VerdictState::Skip,
                "K is not Q-Cartier".to_string(),
            )),
        }
    }
    let round = FanDocument::parse(&doc.to_json())?;
    out.push((
        "document round-trip is byte-identical".to_string(),
        if round.to_json() == doc.to_json() { VerdictState::Pass } else { VerdictState::Fail },
        String::new(),
    ));
    let _ = Signed::is_negative(&int(0));
    Ok(out)
}
