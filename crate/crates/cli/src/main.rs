mod cache;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dedekind_core::arith::is_prime;
use dedekind_core::formulas::{self, Family};
use dedekind_core::invariants::{
    d_prime_of, d_star_with, invariant_report, sections, InvariantReport, SectionMode,
    DSTAR_SLOW_ORDER,
};
use dedekind_core::lattice::all_subgroups;
use dedekind_core::spec::parse_spec;
use dedekind_core::verify::{build_corpus, suite_names, CorpusConfig, Verifier};
use dedekind_core::{Error, GroupSpec, Limits, Rational};
use serde::Serialize;
use serde_json::json;

use cache::Cache;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("cache: {0}")]
    Cache(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0} check(s) failed")]
    Failed(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::Parse { .. } => 2,
                Error::InvalidParameter(_)
                | Error::NotAnAutomorphism(_)
                | Error::NotAnAction
                | Error::NotNormal => 3,
                Error::OrderCapExceeded { .. }
                | Error::IsoCapExceeded { .. }
                | Error::LatticeBudgetExceeded { .. }
                | Error::BudgetExhausted { .. }
                | Error::SlowOptInRequired { .. } => 4,
                Error::StructureViolation(_) => 5,
            },
            CliError::Usage(_) => 3,
            CliError::Failed(_) => 5,
            CliError::Io(_) | CliError::Cache(_) => 1,
        }
    }
}

type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Parser)]
#[command(
    name = "dedekind",
    version,
    about = "Subgroup lattices and Dedekind-closeness ratios of finite groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    /// Refuse groups larger than this.
    #[arg(long, global = true, default_value_t = 512)]
    max_order: usize,

    /// Permit d* on groups of order above 256.
    #[arg(long, global = true)]
    allow_slow: bool,

    /// Neither read nor write the report cache.
    #[arg(long, global = true)]
    no_cache: bool,

    #[arg(long, global = true, default_value = ".dedekind-cache.json")]
    cache_path: PathBuf,

    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Full invariant report for a group.
    Info { spec: String },
    /// k'/|L|.
    Dprime { spec: String },
    /// Minimum of d' over all sections.
    Dstar {
        spec: String,
        /// Evaluate every section instead of pruning.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Subgroup lattice as a table or Graphviz digraph.
    Lattice {
        spec: String,
        #[arg(long)]
        dot: bool,
    },
    /// Every section H/K with its order and d'.
    Sections { spec: String },
    /// Run consistency suites over the built-in corpus.
    Verify {
        /// Suite name, or "all".
        #[arg(default_value = "all")]
        suite: String,
        /// List suite names and exit.
        #[arg(long)]
        list: bool,
        /// Compute d* for corpus groups up to this order.
        #[arg(long, default_value_t = 128)]
        d_star_max_order: usize,
    },
    /// Products of modular-group ratios approaching a/b.
    Density {
        a: u64,
        b: u64,
        /// Target gap, as a fraction or decimal.
        epsilon: String,
        #[arg(long, default_value_t = 500)]
        prime_budget: usize,
    },
    /// Evaluate a closed form: modular P N | schmidt P Q N | dihedral N |
    /// heisenberg P | section P Q | gaussian R I P | ea-subgroups P R |
    /// ratio-witness A.
    Formula { family: String, params: Vec<u64> },
    /// Compare enumeration with the closed form along a family.
    Sweep {
        family: SweepFamily,
        /// First parameter (n, or the smallest prime for heisenberg).
        from: u64,
        /// Last parameter, inclusive.
        to: u64,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SweepFamily {
    Modular,
    Schmidt,
    Dihedral,
    Heisenberg,
}

struct Ctx {
    json: bool,
    limits: Limits,
    cache: Option<Cache>,
}

impl Ctx {
    fn d_star_allowed(&self, order: usize) -> bool {
        order <= DSTAR_SLOW_ORDER || self.limits.allow_slow
    }

    /// The cached report when present and sufficient, else a fresh one.
    fn report(&self, spec: &GroupSpec, need_d_star: bool) -> Result<InvariantReport> {
        let name = spec.to_string();
        if let Some(cache) = &self.cache {
            if let Some(r) = cache.lookup(&name)? {
                if r.d_star.is_some() || !need_d_star {
                    return Ok(r);
                }
            }
        }
        let g = spec.build(&self.limits)?;
        let with_d_star = need_d_star || self.d_star_allowed(g.order());
        let report = invariant_report(&name, &g, &self.limits, with_d_star)?;
        if let Some(cache) = &self.cache {
            cache.store(&report)?;
        }
        Ok(report)
    }

    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("serializable")
            );
        } else {
            print!("{}", text());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if cli.max_order > dedekind_core::group::HARD_MAX_ORDER {
        return Err(CliError::Usage(format!(
            "--max-order {} exceeds the hard limit {}",
            cli.max_order,
            dedekind_core::group::HARD_MAX_ORDER
        )));
    }
    let limits = Limits {
        max_order: cli.max_order,
        allow_slow: cli.allow_slow,
        ..Limits::default()
    };
    let ctx = Ctx {
        json: cli.json,
        limits,
        cache: (!cli.no_cache).then(|| Cache::new(&cli.cache_path)),
    };

    match cli.command {
        Command::Info { spec } => {
            let report = ctx.report(&parse_spec(&spec)?, false)?;
            ctx.emit(&report, || render::report(&report));
        }
        Command::Dprime { spec } => {
            let report = ctx.report(&parse_spec(&spec)?, false)?;
            let value = json!({ "spec": report.spec, "d_prime": report.d_prime });
            ctx.emit(&value, || format!("{}\n", report.d_prime));
        }
        Command::Dstar { spec, exhaustive } => {
            let spec = parse_spec(&spec)?;
            let d_star = if exhaustive {
                let g = spec.build(&ctx.limits)?;
                let l = all_subgroups(&g, &ctx.limits)?;
                d_star_with(&g, &l, &ctx.limits, SectionMode::Exhaustive)?
            } else {
                let order = spec.order().unwrap_or(u64::MAX) as usize;
                if !ctx.d_star_allowed(order) {
                    return Err(Error::SlowOptInRequired {
                        order,
                        limit: DSTAR_SLOW_ORDER,
                    }
                    .into());
                }
                ctx.report(&spec, true)?.d_star.expect("requested")
            };
            let value = json!({ "spec": spec.to_string(), "d_star": d_star });
            ctx.emit(&value, || format!("{d_star}\n"));
        }
        Command::Lattice { spec, dot } => {
            let spec = parse_spec(&spec)?;
            let g = spec.build(&ctx.limits)?;
            let l = all_subgroups(&g, &ctx.limits)?;
            if dot {
                print!("{}", render::lattice_dot(&spec.to_string(), &l));
            } else {
                let subgroups: Vec<_> = l
                    .subgroups()
                    .iter()
                    .enumerate()
                    .map(|(i, h)| {
                        json!({
                            "index": i,
                            "order": h.order(),
                            "class": l.class_of(i),
                            "normal": l.is_normal(i),
                            "members": h.elements(),
                        })
                    })
                    .collect();
                let value = json!({
                    "spec": spec.to_string(),
                    "subgroups": subgroups,
                    "hasse_edges": l.hasse_edges(),
                });
                ctx.emit(&value, || render::lattice_table(&g, &l));
            }
        }
        Command::Sections { spec } => {
            let spec = parse_spec(&spec)?;
            let g = spec.build(&ctx.limits)?;
            let l = all_subgroups(&g, &ctx.limits)?;
            let mut rows = Vec::new();
            for s in sections(&g, &l) {
                let s = s?;
                let d = d_prime_of(&all_subgroups(&s.quotient, &ctx.limits)?);
                rows.push(json!({
                    "h": l.index_of(s.h.members()),
                    "k": l.index_of(s.k.members()),
                    "order": s.quotient.order(),
                    "abelian": s.quotient.is_abelian(),
                    "d_prime": d,
                }));
            }
            ctx.emit(&rows, || {
                let mut out = String::from("H     K     |H/K|  abelian  d'\n");
                for r in &rows {
                    let d: Rational =
                        serde_json::from_value(r["d_prime"].clone()).expect("rational");
                    out.push_str(&format!(
                        "{:<5} {:<5} {:<6} {:<8} {}\n",
                        r["h"].to_string(),
                        r["k"].to_string(),
                        r["order"].to_string(),
                        r["abelian"].to_string(),
                        d
                    ));
                }
                out
            });
        }
        Command::Verify {
            suite,
            list,
            d_star_max_order,
        } => {
            if list {
                for name in suite_names() {
                    println!("{name}");
                }
                return Ok(());
            }
            if suite != "all" && !suite_names().any(|n| n == suite) {
                return Err(CliError::Usage(format!(
                    "unknown suite {suite:?}; known: all, {}",
                    suite_names().collect::<Vec<_>>().join(", ")
                )));
            }
            let config = CorpusConfig {
                max_order: ctx.limits.max_order,
                product_max_order: ctx.limits.max_order,
                d_star_max_order,
                ..CorpusConfig::default()
            };
            let verifier = Verifier::new(build_corpus(&config), ctx.limits)?;
            let results = if suite == "all" {
                verifier.run_all()
            } else {
                vec![verifier.run(&suite)?]
            };
            let failed: usize = results.iter().map(|r| r.failed).sum();
            let value = json!({
                "corpus_size": verifier.corpus.entries.len(),
                "suites": results,
                "failed": failed,
            });
            ctx.emit(&value, || {
                let mut out = format!("corpus: {} groups\n", verifier.corpus.entries.len());
                for r in &results {
                    out.push_str(&render::suite(r));
                }
                out
            });
            if failed > 0 {
                return Err(CliError::Failed(failed));
            }
        }
        Command::Density {
            a,
            b,
            epsilon,
            prime_budget,
        } => {
            let eps: Rational = epsilon.parse()?;
            let steps = formulas::density_sequence(a, b, &eps, prime_budget)?;
            ctx.emit(&steps, || {
                let mut out =
                    String::from("step  primes                value                 gap\n");
                for s in &steps {
                    let primes = s
                        .primes
                        .iter()
                        .map(u64::to_string)
                        .collect::<Vec<_>>()
                        .join(",");
                    out.push_str(&format!(
                        "{:<5} {:<21} {:<21} {} (~{:.6})\n",
                        s.index,
                        primes,
                        s.value,
                        s.gap,
                        s.gap.to_f64()
                    ));
                }
                out
            });
        }
        Command::Formula { family, params } => {
            let value = formula(&family, &params)?;
            ctx.emit(
                &json!({ "family": family, "params": params, "value": value }),
                || format!("{}\n", value.as_str().unwrap_or_default()),
            );
        }
        Command::Sweep {
            family,
            from,
            to,
            p,
            q,
        } => {
            let rows = sweep(&ctx, family, from, to, p, q)?;
            let mismatches = rows.iter().filter(|r| r["match"] == false).count();
            ctx.emit(&rows, || {
                let mut out =
                    String::from("spec            order  enumerated  closed form  match\n");
                for r in &rows {
                    out.push_str(&format!(
                        "{:<15} {:<6} {:<11} {:<12} {}\n",
                        r["spec"].as_str().unwrap_or(""),
                        r["order"].to_string(),
                        r["enumerated"].as_str().unwrap_or("-"),
                        r["closed_form"].as_str().unwrap_or("-"),
                        r["match"]
                    ));
                }
                out
            });
            if mismatches > 0 {
                return Err(CliError::Failed(mismatches));
            }
        }
    }
    Ok(())
}

fn formula(family: &str, params: &[u64]) -> Result<serde_json::Value> {
    let arity = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "{family} takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    let value = match family {
        "modular" => {
            arity(2)?;
            formulas::d_prime_modular_formula(params[0], params[1])?.to_string()
        }
        "schmidt" => {
            arity(3)?;
            Family::Schmidt {
                p: params[0],
                q: params[1],
            }
            .value(params[2])?
            .to_string()
        }
        "dihedral" => {
            arity(1)?;
            formulas::d_prime_dihedral_formula(params[0])?.to_string()
        }
        "heisenberg" => {
            arity(1)?;
            formulas::d_prime_heisenberg_formula(params[0])?.to_string()
        }
        "section" => {
            arity(2)?;
            let (p, q) = (params[0], params[1]);
            let r = dedekind_core::families::SchmidtSectionParams::new(p, q)?.r;
            formulas::d_prime_schmidt_section_formula(p, q, r)?.to_string()
        }
        "gaussian" => {
            arity(3)?;
            formulas::gaussian_binomial(params[0], params[1], params[2])?.to_string()
        }
        "ea-subgroups" => {
            arity(2)?;
            formulas::num_subgroups_elem_abelian(params[0], params[1])?.to_string()
        }
        "ratio-witness" => {
            arity(1)?;
            let (spec, value) = formulas::ratio_witness(params[0])?;
            return Ok(json!(format!("{value} ({spec})")));
        }
        other => return Err(CliError::Usage(format!("unknown family {other:?}"))),
    };
    Ok(json!(value))
}

fn sweep(
    ctx: &Ctx,
    family: SweepFamily,
    from: u64,
    to: u64,
    p: Option<u64>,
    q: Option<u64>,
) -> Result<Vec<serde_json::Value>> {
    use dedekind_core::spec::Atom;
    let need = |v: Option<u64>, name: &str| {
        v.ok_or_else(|| CliError::Usage(format!("--{name} is required")))
    };
    let atoms: Vec<Atom> = match family {
        SweepFamily::Modular => {
            let p = need(p, "p")?;
            (from..=to).map(|n| Atom::Modular(p, n)).collect()
        }
        SweepFamily::Schmidt => {
            let (p, q) = (need(p, "p")?, need(q, "q")?);
            (from..=to).map(|n| Atom::Schmidt(p, q, n)).collect()
        }
        SweepFamily::Dihedral => (from..=to)
            .map(|n| Atom::Dihedral(1u64 << n.min(63)))
            .collect(),
        SweepFamily::Heisenberg => (from..=to)
            .filter(|&p| p > 2 && is_prime(p))
            .map(Atom::Heisenberg)
            .collect(),
    };
    let mut rows = Vec::new();
    for atom in atoms {
        let spec = GroupSpec::atom(atom);
        let closed = atom.closed_form_d_prime();
        let row = match spec
            .build(&ctx.limits)
            .and_then(|g| Ok((g.order(), d_prime_of(&all_subgroups(&g, &ctx.limits)?))))
        {
            Ok((order, d)) => json!({
                "spec": spec.to_string(),
                "order": order,
                "enumerated": d.to_string(),
                "closed_form": closed.as_ref().map(|c| c.to_string()),
                "match": closed.as_ref() == Some(&d),
            }),
            Err(e @ (Error::OrderCapExceeded { .. } | Error::LatticeBudgetExceeded { .. })) => {
                json!({
                    "spec": spec.to_string(),
                    "order": atom.order(),
                    "enumerated": null,
                    "closed_form": closed.as_ref().map(|c| c.to_string()),
                    "match": null,
                    "skipped": e.to_string(),
                })
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(row);
    }
    Ok(rows)
}
