//! Command-line front end: check individual criteria, reproduce the
//! experimental classification table, enumerate extremal rays, and emit
//! boundary certificates.
//!
//! Exit codes: 0 pass, 1 fail, 2 inconclusive or partial, 64 usage error.

use clap::{Args, Parser, Subcommand};
use semiample::budget::Budget;
use semiample::criteria::{self, CriterionReport, RayClass, Verdict};
use semiample::divisors::SymmetricDivisor;
use semiample::fcone;
use semiample::groupfn::SymmetricFunction;
use semiample::quadforms::{self, BalanceStatus, CyclicQuadraticForm};
use semiample::rat;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_PASS: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "semiample",
    about = "Combinatorial semiampleness and nefness criteria for symmetric divisors \
             on the moduli of stable pointed rational curves",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct BudgetArgs {
    /// Box bound for the l-balanced fallback.
    #[arg(long = "level")]
    level: Option<u32>,
    /// Maximum number of lattice/box points visited by exhaustive searches.
    #[arg(long = "max-visits")]
    max_visits: Option<u64>,
    /// JSON config file supplying budget defaults; explicit flags override.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(serde::Deserialize, Default)]
struct ConfigFile {
    level: Option<u32>,
    max_visits: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> Result<Budget, String> {
        let file: ConfigFile = match &self.config {
            None => ConfigFile::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
                serde_json::from_str(&text).map_err(|e| format!("bad config: {e}"))?
            }
        };
        let defaults = Budget::default();
        Ok(Budget {
            max_visits: self
                .max_visits
                .or(file.max_visits)
                .unwrap_or(defaults.max_visits),
            fallback_level: self
                .level
                .or(file.level)
                .unwrap_or(defaults.fallback_level),
            ..defaults
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one criterion against a literal and print a JSON report.
    Check {
        /// Criterion: fnef | weakly-balanced | balanced | cyclic-semiample |
        /// second | democratic | new-nef.
        kind: String,
        /// Input literal: `m:v0,v1,...` (functions and forms) or
        /// `n:a2,a3,...` (symmetric divisors).
        input: String,
        /// Z_m tuple for new-nef, e.g. `1,1,1,1,1,1,1,1,1`.
        #[arg(long)]
        tuple: Option<String>,
        /// Extra lambda values for the second criterion (`p/q`, repeatable).
        #[arg(long = "lambda")]
        lambdas: Vec<String>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Classify the extremal rays of the symmetric F-cone for one n and
    /// print the four counts of the experimental table.
    Table {
        n: usize,
        /// Omit the per-ray verdict list.
        #[arg(long = "skip-rays")]
        skip_rays: bool,
        /// Emit the full audit record as JSON.
        #[arg(long)]
        json: bool,
        /// Bound worker parallelism.
        #[arg(long)]
        jobs: Option<usize>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Enumerate the extremal rays of the symmetric F-cone.
    Rays {
        n: usize,
        /// Write the rays as CSV to this path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stream intermediate ray sets to this snapshot file (resumable).
        #[arg(long)]
        snapshot: Option<PathBuf>,
    },
    /// Emit one boundary representative of |2D| per unrooted binary tree.
    Certificates {
        /// Symmetric divisor literal `n:a2,a3,...`.
        input: String,
        /// Directory for the per-tree JSON files.
        #[arg(long, default_value = "certificates")]
        out: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Check {
            kind,
            input,
            tuple,
            lambdas,
            budget,
        } => cmd_check(&kind, &input, tuple.as_deref(), &lambdas, &budget.budget()?),
        Command::Table {
            n,
            skip_rays,
            json,
            jobs,
            budget,
        } => cmd_table(n, skip_rays, json, jobs, &budget.budget()?),
        Command::Rays { n, out, snapshot } => cmd_rays(n, out, snapshot),
        Command::Certificates { input, out, budget } => {
            cmd_certificates(&input, &out, &budget.budget()?)
        }
    }
}

fn report_json(report: &CriterionReport) -> Value {
    serde_json::to_value(report).expect("report serializes")
}

fn verdict_exit(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn parse_tuple(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|e| e.to_string()))
        .collect()
}

fn cmd_check(
    kind: &str,
    input: &str,
    tuple: Option<&str>,
    lambdas: &[String],
    budget: &Budget,
) -> Result<u8, String> {
    let report: CriterionReport = match kind {
        "fnef" => {
            let f = SymmetricFunction::parse(input)?;
            match semiample::groupfn::is_fnef(&f) {
                semiample::groupfn::FnefVerdict::Pass => CriterionReport {
                    criterion: "fnef".into(),
                    verdict: Verdict::Pass,
                    witness: None,
                    certificate: None,
                },
                semiample::groupfn::FnefVerdict::Fail { witness } => CriterionReport {
                    criterion: "fnef".into(),
                    verdict: Verdict::Fail,
                    witness: Some(criteria::Witness::Subset {
                        subset: vec![witness.0, witness.1, witness.2],
                    }),
                    certificate: None,
                },
            }
        }
        "weakly-balanced" => {
            let q = CyclicQuadraticForm::parse(input)?;
            match quadforms::is_weakly_balanced(&q) {
                quadforms::WeakBalanceVerdict::Pass => CriterionReport {
                    criterion: "weakly-balanced".into(),
                    verdict: Verdict::Pass,
                    witness: None,
                    certificate: None,
                },
                quadforms::WeakBalanceVerdict::Fail { witness } => CriterionReport {
                    criterion: "weakly-balanced".into(),
                    verdict: Verdict::Fail,
                    witness: Some(criteria::Witness::Subset { subset: witness }),
                    certificate: None,
                },
            }
        }
        "balanced" => {
            let q = CyclicQuadraticForm::parse(input)?;
            let verdict = quadforms::is_balanced(&q, budget).map_err(|e| e.to_string())?;
            CriterionReport {
                criterion: "balanced".into(),
                verdict: match verdict.status {
                    BalanceStatus::Balanced => Verdict::Pass,
                    BalanceStatus::NotBalanced => Verdict::Fail,
                    BalanceStatus::Inconclusive => Verdict::Inconclusive,
                },
                witness: verdict.witness.map(|w| criteria::Witness::Balance {
                    vector: w.vector,
                    sum: w.sum,
                    value: rat::format_rat(&w.q_value),
                    reference: rat::format_rat(&w.reference_value),
                }),
                certificate: None,
            }
        }
        "cyclic-semiample" => {
            let d = SymmetricDivisor::parse(input)?;
            criteria::cyclic_semiample_test(&d, budget).map_err(|e| e.to_string())?
        }
        "second" => {
            let d = SymmetricDivisor::parse(input)?;
            let parsed: Result<Vec<rat::Rat>, _> =
                lambdas.iter().map(|s| rat::parse_rat(s)).collect();
            let parsed = parsed.map_err(|e| e.to_string())?;
            let list = if parsed.is_empty() {
                None
            } else {
                Some(parsed.as_slice())
            };
            criteria::second_criterion_test(&d, list).map_err(|e| e.to_string())?
        }
        "democratic" => {
            let d = SymmetricDivisor::parse(input)?;
            criteria::democratic_test(&d).map_err(|e| e.to_string())?
        }
        "new-nef" => {
            let f = SymmetricFunction::parse(input)?;
            let tuple = parse_tuple(tuple.ok_or("new-nef requires --tuple")?)?;
            let (expr, report) = criteria::new_nef_divisor(&f, &tuple, false, budget)
                .map_err(|e| e.to_string())?;
            let mut value = report_json(&report);
            value["divisor"] = serde_json::to_value(&expr).map_err(|e| e.to_string())?;
            println!("{}", canonical_json(&value));
            return Ok(verdict_exit(report.verdict));
        }
        other => return Err(format!("unknown check kind `{other}`")),
    };
    println!("{}", canonical_json(&report_json(&report)));
    Ok(verdict_exit(report.verdict))
}

/// Serializes with sorted keys for byte-identical reports.
fn canonical_json(value: &Value) -> String {
    fn sort(value: &Value) -> Value {
        match value {
            Value::Object(map) => {
                let mut sorted = serde_json::Map::new();
                let mut keys: Vec<&String> = map.keys().collect();
                keys.sort();
                for k in keys {
                    sorted.insert(k.clone(), sort(&map[k]));
                }
                Value::Object(sorted)
            }
            Value::Array(items) => Value::Array(items.iter().map(sort).collect()),
            other => other.clone(),
        }
    }
    sort(value).to_string()
}

fn cmd_table(
    n: usize,
    skip_rays: bool,
    as_json: bool,
    jobs: Option<usize>,
    budget: &Budget,
) -> Result<u8, String> {
    if n < 8 {
        return Err("table requires n >= 8".into());
    }
    let row = match criteria::semiample_test(n, jobs, budget) {
        Ok(row) => row,
        Err(criteria::CriteriaError::ResourceLimit(msg)) => {
            eprintln!("resource limit: {msg}");
            return Ok(EXIT_INCONCLUSIVE);
        }
        Err(e) => return Err(e.to_string()),
    };
    let (rays, cyc, sec, dem) = row.counts();
    if as_json {
        let per_ray: Vec<Value> = row
            .rays
            .iter()
            .map(|(d, class)| {
                json!({
                    "ray": d.to_string(),
                    "class": class_name(*class),
                })
            })
            .collect();
        let mut value = json!({
            "n": n,
            "counts": {
                "rays": rays,
                "cyclic_semiample": cyc,
                "second_criterion": sec,
                "democratic": dem,
            },
        });
        if !skip_rays {
            value["rays"] = Value::Array(per_ray);
        }
        println!("{}", canonical_json(&value));
    } else {
        println!("{rays} {cyc} {sec} {dem}");
        if !skip_rays {
            for (d, class) in &row.rays {
                println!("{d}\t{}", class_name(*class));
            }
        }
    }
    Ok(EXIT_PASS)
}

fn class_name(class: RayClass) -> &'static str {
    match class {
        RayClass::CyclicSemiample => "cyclic-semiample",
        RayClass::SecondCriterion => "second-criterion",
        RayClass::Democratic => "democratic",
        RayClass::Unclassified => "unclassified",
    }
}

fn cmd_rays(n: usize, out: Option<PathBuf>, snapshot: Option<PathBuf>) -> Result<u8, String> {
    if n < 5 {
        return Err("rays requires n >= 5".into());
    }
    let rows = fcone::fcone_inequalities(n);
    let options = fcone::DdOptions {
        snapshot_path: snapshot,
    };
    let rays = match fcone::extreme_rays_with(&rows, &options) {
        Ok(rays) => rays,
        Err(fcone::FconeError::NotPointed { lineality }) => {
            eprintln!("cone is not pointed; lineality basis:");
            for v in lineality {
                eprintln!("  {v:?}");
            }
            return Ok(EXIT_INCONCLUSIVE);
        }
        Err(e) => return Err(e.to_string()),
    };
    if let Some(path) = out {
        let mut file = std::fs::File::create(&path).map_err(|e| e.to_string())?;
        for ray in &rays {
            let line: Vec<String> = ray.iter().map(|c| c.to_string()).collect();
            writeln!(file, "{}", line.join(",")).map_err(|e| e.to_string())?;
        }
    }
    println!("{}", rays.len());
    Ok(EXIT_PASS)
}

fn cmd_certificates(input: &str, out: &PathBuf, budget: &Budget) -> Result<u8, String> {
    let d = SymmetricDivisor::parse(input)?;
    let certs = match criteria::emit_certificates(&d, budget) {
        Ok(certs) => certs,
        Err(criteria::CriteriaError::NotCyclicSemiample) => {
            eprintln!("divisor is not cyclic semiample");
            return Ok(EXIT_FAIL);
        }
        Err(criteria::CriteriaError::ResourceLimit(msg)) => {
            eprintln!("resource limit: {msg}");
            return Ok(EXIT_INCONCLUSIVE);
        }
        Err(e) => return Err(e.to_string()),
    };
    std::fs::create_dir_all(out).map_err(|e| e.to_string())?;
    for (i, entry) in certs.iter().enumerate() {
        let path = out.join(format!("tree-{i:04}.json"));
        let value = serde_json::to_value(entry).map_err(|e| e.to_string())?;
        std::fs::write(&path, canonical_json(&value)).map_err(|e| e.to_string())?;
    }
    println!("{}", certs.len());
    Ok(EXIT_PASS)
}
