//! Command line driver: configuration parsing, dispatch, deterministic
//! JSON reports on stdout, human summaries on stderr.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num::rational::BigRational;
use num::Zero;
use serde::{Deserialize, Serialize};

use oridt::config::{ConfigError, RunConfig, ValidatedConfig, SCHEMA_VERSION};
use oridt::engine::{primitive_wcf, EngineError, SeriesCache};
use oridt::identities::{check_identity, DilogIdentity};
use oridt::oracle::{OracleCtx, OracleError};
use oridt::quiver::{DimVector, Part, QuiverWithDuality, Stability};
use oridt::report::*;
use oridt::scalar::ScalarV;

#[derive(Parser)]
#[command(name = "oridt", version, about = "Orientifold DT series of quivers with involution")]
struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory of golden reports; fail on any byte difference.
    #[arg(long, global = true)]
    golden: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the quiver with involution and report the partitions.
    Validate,
    /// Print a coefficient series (total, semistable or orientifold).
    Series {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Compare the wall-crossing product across two stabilities.
    Wallcross {
        #[arg(long = "theta", action = clap::ArgAction::Append)]
        theta: Vec<String>,
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Extract (orientifold) DT invariants by dilogarithm factorization.
    Factorize {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long)]
        orientifold: bool,
    },
    /// Compare engine coefficients against finite-field stack counts.
    Oracle {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        prime: u64,
        #[arg(long)]
        dim: String,
    },
    /// Check a named quantum dilogarithm identity.
    Dilog {
        #[arg(long)]
        identity: String,
        #[arg(long)]
        bound: Option<u32>,
    },
    /// Primitive wall-crossing change for one (d, e) pair.
    Delta {
        #[arg(long)]
        d: String,
        #[arg(long)]
        e: String,
        #[arg(long)]
        theta: String,
    },
}

fn main() {
    let cli = Cli::parse();
    let command_name = command_name(&cli.command);
    match run(&cli) {
        Ok((json, summary, exit)) => {
            println!("{json}");
            eprintln!("{summary}");
            if let Some(dir) = &cli.golden {
                match compare_golden(dir, command_name, &json) {
                    Ok(true) => {}
                    Ok(false) => {
                        eprintln!("golden mismatch: {}", dir.join(format!("{command_name}.json")).display());
                        std::process::exit(Exit::IdentityFailed as i32);
                    }
                    Err(e) => {
                        eprintln!("golden comparison failed: {e}");
                        std::process::exit(Exit::ConfigError as i32);
                    }
                }
            }
            std::process::exit(exit as i32);
        }
        Err(err) => {
            let report = ErrorReport {
                schema_version: SCHEMA_VERSION,
                command: command_name.to_string(),
                error: ErrorBody {
                    kind: err.kind().to_string(),
                    message: err.to_string(),
                },
            };
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
            eprintln!("error: {err}");
            std::process::exit(err.exit() as i32);
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Series { .. } => "series",
        Command::Wallcross { .. } => "wallcross",
        Command::Factorize { .. } => "factorize",
        Command::Oracle { .. } => "oracle",
        Command::Dilog { .. } => "dilog",
        Command::Delta { .. } => "delta",
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Engine(EngineError::NonIntegralInvariant { .. }) => "non-integral-invariant",
            CliError::Engine(_) => "engine",
            CliError::Oracle(OracleError::CapExceeded { .. }) => "cap-exceeded",
            CliError::Oracle(_) => "oracle",
            CliError::Usage(_) => "usage",
        }
    }

    fn exit(&self) -> Exit {
        match self {
            CliError::Engine(EngineError::NonIntegralInvariant { .. }) => Exit::IdentityFailed,
            CliError::Oracle(OracleError::CapExceeded { .. }) => Exit::CapExceeded,
            _ => Exit::ConfigError,
        }
    }
}

fn load_config(cli: &Cli) -> Result<ValidatedConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config is required for this command".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    Ok(RunConfig::parse(&text)?.validate()?)
}

fn parse_dim(q: &QuiverWithDuality, text: &str) -> Result<DimVector, CliError> {
    let parts: Result<Vec<u32>, _> = text.split(',').map(|t| t.trim().parse::<u32>()).collect();
    let parts = parts.map_err(|e| CliError::Usage(format!("bad dimension vector {text}: {e}")))?;
    if parts.len() != q.node_count() {
        return Err(CliError::Usage(format!(
            "dimension vector {text} has {} components, quiver has {} nodes",
            parts.len(),
            q.node_count()
        )));
    }
    Ok(DimVector::new(parts))
}

fn run(cli: &Cli) -> Result<(String, String, Exit), CliError> {
    match &cli.command {
        Command::Validate => {
            let cfg = load_config(cli)?;
            let q = &cfg.quiver;
            let part_names = |want: Part, arrows: bool| -> Vec<String> {
                if arrows {
                    q.arrows()
                        .iter()
                        .enumerate()
                        .filter(|(a, _)| q.arrow_part(*a) == want)
                        .map(|(_, arr)| arr.id.clone())
                        .collect()
                } else {
                    (0..q.node_count())
                        .filter(|&i| q.node_part(i) == want)
                        .map(|i| q.node_ids()[i].clone())
                        .collect()
                }
            };
            let report = ValidateReport {
                schema_version: SCHEMA_VERSION,
                command: "validate",
                valid: true,
                nodes: q.node_ids().to_vec(),
                partitions: Partitions {
                    q0_plus: part_names(Part::Plus, false),
                    q0_sigma: part_names(Part::Fixed, false),
                    q0_minus: part_names(Part::Minus, false),
                    q1_plus: part_names(Part::Plus, true),
                    q1_sigma: part_names(Part::Fixed, true),
                    q1_minus: part_names(Part::Minus, true),
                },
                finite_type: q.finite_type(),
            };
            Ok((
                pretty(&report),
                "quiver is valid".to_string(),
                Exit::Success,
            ))
        }
        Command::Series { kind, theta, bound } => {
            let cfg = load_config(cli)?;
            let bound = bound.unwrap_or(cfg.bound);
            let q = &cfg.quiver;
            let terms = match kind.as_str() {
                "total" => {
                    let cache = SeriesCache::new(q, Stability::new(vec![0; q.node_count()]));
                    let mut terms = vec![SeriesTerm {
                        dim: DimVector::zero(q.node_count()),
                        coeff: ScalarV::one().to_string(),
                    }];
                    for d in q.enumerate_dimvectors(bound) {
                        terms.push(SeriesTerm {
                            coeff: cache.a_total(&d).to_string(),
                            dim: d,
                        });
                    }
                    terms
                }
                "semistable" => {
                    let name = theta
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("--theta required".into()))?;
                    let cache = with_cache(cli, &cfg, cfg.stability(name)?)?;
                    let mut terms = Vec::new();
                    for d in q.enumerate_dimvectors(bound) {
                        let c = cache.a_semistable(&d)?;
                        if !c.is_zero() {
                            terms.push(SeriesTerm {
                                coeff: c.to_string(),
                                dim: d,
                            });
                        }
                    }
                    save_cache(cli, &cfg, &cache);
                    terms
                }
                "orientifold" => {
                    let name = theta
                        .as_ref()
                        .ok_or_else(|| CliError::Usage("--theta required".into()))?;
                    let cache = with_cache(cli, &cfg, cfg.stability(name)?)?;
                    let series = cache.orientifold_series(bound)?;
                    save_cache(cli, &cfg, &cache);
                    series
                        .terms()
                        .map(|(e, c)| SeriesTerm {
                            dim: e.clone(),
                            coeff: c.to_string(),
                        })
                        .collect()
                }
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown series kind {other} (total|semistable|orientifold)"
                    )))
                }
            };
            let n = terms.len();
            let report = SeriesReport {
                schema_version: SCHEMA_VERSION,
                command: "series",
                kind: kind.clone(),
                theta: theta.clone(),
                bound,
                note: SCALAR_NOTE,
                terms,
            };
            Ok((
                pretty(&report),
                format!("{kind} series with {n} terms through total dimension {bound}"),
                Exit::Success,
            ))
        }
        Command::Wallcross { theta, bound } => {
            let cfg = load_config(cli)?;
            if theta.len() != 2 {
                return Err(CliError::Usage(
                    "wallcross needs exactly two --theta arguments".into(),
                ));
            }
            let bound = bound.unwrap_or(cfg.bound);
            let report = oridt::engine::wallcross_check(
                &cfg.quiver,
                cfg.stability(&theta[0])?,
                cfg.stability(&theta[1])?,
                bound,
            )?;
            let out = WallcrossOut {
                schema_version: SCHEMA_VERSION,
                command: "wallcross",
                theta_a: theta[0].clone(),
                theta_b: theta[1].clone(),
                bound,
                note: SCALAR_NOTE,
                equal: report.equal,
                first_difference: report.first_difference.map(|(d, a, b)| Difference {
                    dim: d,
                    lhs: a,
                    rhs: b,
                }),
            };
            let (summary, exit) = if out.equal {
                (
                    format!("wall-crossing products equal through total dimension {bound}"),
                    Exit::Success,
                )
            } else {
                (
                    "wall-crossing products differ".to_string(),
                    Exit::IdentityFailed,
                )
            };
            Ok((pretty(&out), summary, exit))
        }
        Command::Factorize {
            theta,
            bound,
            orientifold,
        } => {
            let cfg = load_config(cli)?;
            let bound = bound.unwrap_or(cfg.bound);
            let cache = with_cache(cli, &cfg, cfg.stability(theta)?)?;
            let table = if *orientifold {
                cache.oridt_factorize(bound)?
            } else {
                cache.dt_factorize(bound)?
            };
            save_cache(cli, &cfg, &cache);
            let report = FactorizeReport::from_table(&table, theta.clone(), bound, *orientifold);
            let exit = if table.residual_ok {
                Exit::Success
            } else {
                Exit::IdentityFailed
            };
            let summary = format!(
                "{} invariants extracted, residual_ok = {}",
                report.omega.len() + report.omega_sigma.len(),
                table.residual_ok
            );
            Ok((pretty(&report), summary, exit))
        }
        Command::Oracle { theta, prime, dim } => {
            let cfg = load_config(cli)?;
            let q = &cfg.quiver;
            let d = parse_dim(q, dim)?;
            let th = cfg.stability(theta)?;
            let oracle = OracleCtx::new(q, *prime, cfg.oracle.caps())?;
            let cache = with_cache(cli, &cfg, th.clone())?;

            // ordinary side
            let coeff = if d.is_zero() {
                ScalarV::one()
            } else {
                cache.a_semistable(&d)?
            };
            let normalized = &ScalarV::v_pow(-q.euler_form(&d, &d)) * &coeff;
            let ordinary = compare(&normalized, *prime, oracle.stack_count(&th, &d, true)?)?;

            // self-dual side, when the class exists
            let selfdual = if q.is_admissible_selfdual(&d) {
                let coeff = cache.a_sigma_semistable_rec(&d)?;
                let normalized = &ScalarV::v_pow(-q.sd_euler(&d)) * &coeff;
                let counts = oracle.stack_count_selfdual(&th, &d)?;
                let comparison = compare(&normalized, *prime, counts.total.clone())?;
                let census = match oracle.census_selfdual(Some(&th), &d) {
                    Ok(entries) => {
                        let ss: Vec<&oridt::oracle::CensusEntry> = entries
                            .iter()
                            .filter(|e| e.semistable == Some(true))
                            .collect();
                        let mut orders: Vec<u64> = ss.iter().map(|e| e.aut_order).collect();
                        orders.sort_unstable();
                        Some(CensusSummary {
                            classes: entries.len(),
                            semistable_classes: ss.len(),
                            isometry_orders: orders,
                        })
                    }
                    Err(OracleError::CapExceeded { .. }) => None,
                    Err(e) => return Err(e.into()),
                };
                Some(SelfDualOracle {
                    comparison,
                    sectors: counts.sectors,
                    census,
                })
            } else {
                None
            };
            save_cache(cli, &cfg, &cache);

            let all_match = ordinary.matches
                && selfdual.as_ref().is_none_or(|s| s.comparison.matches);
            let report = OracleReport {
                schema_version: SCHEMA_VERSION,
                command: "oracle",
                theta: theta.clone(),
                prime: *prime,
                dim: d,
                note: SCALAR_NOTE,
                ordinary,
                selfdual,
            };
            let (summary, exit) = if all_match {
                ("oracle and formula agree".to_string(), Exit::Success)
            } else {
                ("oracle and formula DISAGREE".to_string(), Exit::IdentityFailed)
            };
            Ok((pretty(&report), summary, exit))
        }
        Command::Dilog { identity, bound } => {
            let which: DilogIdentity = identity
                .parse()
                .map_err(CliError::Usage)?;
            let bound = bound.unwrap_or(6);
            let outcome = check_identity(which, bound).map_err(EngineError::from)?;
            let summary = if outcome.equal {
                format!("equal through total dimension {bound}")
            } else {
                "identity FAILS".to_string()
            };
            let report = DilogReport {
                schema_version: SCHEMA_VERSION,
                command: "dilog",
                identity: identity.clone(),
                bound,
                note: SCALAR_NOTE,
                equal: outcome.equal,
                first_difference: outcome.first_difference.map(|(d, a, b)| Difference {
                    dim: d,
                    lhs: a,
                    rhs: b,
                }),
                summary: summary.clone(),
            };
            let exit = if report.equal {
                Exit::Success
            } else {
                Exit::IdentityFailed
            };
            Ok((pretty(&report), summary, exit))
        }
        Command::Delta { d, e, theta } => {
            let cfg = load_config(cli)?;
            let q = &cfg.quiver;
            let dv = parse_dim(q, d)?;
            let ev = parse_dim(q, e)?;
            let cache = with_cache(cli, &cfg, cfg.stability(theta)?)?;
            let table = cache.oridt_factorize(cfg.bound)?;
            save_cache(cli, &cfg, &cache);
            let omega_d = table.omega(&dv);
            let omega_sigma_e = table.omega_sigma(&ev);
            let wcf = primitive_wcf(q, &dv, &ev, omega_d, omega_sigma_e);
            let report = DeltaReport {
                schema_version: SCHEMA_VERSION,
                command: "delta",
                theta: theta.clone(),
                d: dv,
                e: ev,
                omega_d,
                omega_sigma_e,
                i_value: wcf.i_value,
                delta: wcf.delta,
                warnings: wcf.warnings,
            };
            let summary = format!("I = {}, delta = {}", report.i_value, report.delta);
            Ok((pretty(&report), summary, Exit::Success))
        }
    }
}

fn compare(
    normalized: &ScalarV,
    prime: u64,
    oracle_value: BigRational,
) -> Result<OracleComparison, CliError> {
    let (a, b) = normalized
        .specialize(prime)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let matches = b.is_zero() && a == oracle_value;
    Ok(OracleComparison {
        coefficient: normalized.to_string(),
        formula: if b.is_zero() {
            a.to_string()
        } else {
            format!("{a} + {b}*sqrt({prime})")
        },
        oracle: oracle_value.to_string(),
        matches,
    })
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn compare_golden(dir: &Path, command: &str, json: &str) -> std::io::Result<bool> {
    let path = dir.join(format!("{command}.json"));
    let stored = std::fs::read(&path)?;
    Ok(stored == format!("{json}\n").into_bytes())
}

// ---------------- optional on-disk memo cache ----------------

#[derive(Serialize, Deserialize)]
struct MemoFile {
    key: String,
    ss: Vec<(DimVector, ScalarV)>,
    sd_ss: Vec<(DimVector, ScalarV)>,
}

fn cache_file(cfg: &ValidatedConfig, theta: &Stability) -> Option<(PathBuf, String)> {
    let dir = std::env::var_os("ORIDT_CACHE")?;
    let key = serde_json::to_string(&(&cfg.raw.quiver, theta.weights())).ok()?;
    let mut hasher = DefaultHasher::new();
    key.hash(&mut hasher);
    let name = format!("{:016x}.json", hasher.finish());
    Some((PathBuf::from(dir).join(name), key))
}

fn with_cache<'q>(
    cli: &Cli,
    cfg: &'q ValidatedConfig,
    theta: Stability,
) -> Result<SeriesCache<'q>, CliError> {
    let _ = cli;
    let cache = SeriesCache::new(&cfg.quiver, theta);
    if let Some((path, key)) = cache_file(cfg, cache.theta()) {
        if let Ok(text) = std::fs::read_to_string(&path) {
            if let Ok(memo) = serde_json::from_str::<MemoFile>(&text) {
                if memo.key == key {
                    cache.import_memo(memo.ss, memo.sd_ss);
                }
            }
        }
    }
    Ok(cache)
}

fn save_cache(cli: &Cli, cfg: &ValidatedConfig, cache: &SeriesCache<'_>) {
    let _ = cli;
    if let Some((path, key)) = cache_file(cfg, cache.theta()) {
        let (ss, sd_ss) = cache.export_memo();
        let memo = MemoFile { key, ss, sd_ss };
        if let Some(parent) = path.parent() {
            let _ = std::fs::create_dir_all(parent);
        }
        if let Ok(text) = serde_json::to_string(&memo) {
            let _ = std::fs::write(path, text);
        }
    }
}
