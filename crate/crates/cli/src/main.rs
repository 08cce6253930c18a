use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use cscx_core::cohomology::{les_check, rs_cohomology, short_exact_splice, write_atomic, CohomologyOptions};
use cscx_core::contact::{contactify, levi_form, ContactChart};
use cscx_core::descent::{crosscheck, rs_complex};
use cscx_core::grading::{modes_with_entries, sample_modes, Truncation};
use cscx_core::lefschetz::{gram_matrix, lefschetz_table, CsChart, SymplecticFiber};
use cscx_core::operator::{configure_threads, RankMethod};
use cscx_core::rumin::verify_rumin;
use cscx_core::{DifferentialForm, Error, Ring};

#[derive(Parser)]
#[command(name = "cscx", version, about = "Rumin and Rumin–Seshadri complexes in exact arithmetic")]
struct Cli {
    /// Progress messages on stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Chart configuration files.
    #[command(subcommand)]
    Chart(ChartCmd),
    /// Lefschetz decomposition tables.
    #[command(subcommand)]
    Lefschetz(LefschetzCmd),
    /// Rumin complex on the standard contact chart.
    #[command(subcommand)]
    Rumin(RuminCmd),
    /// Rumin–Seshadri operators.
    #[command(subcommand)]
    Rs(RsCmd),
    /// Cohomology report with all consistency checks.
    Cohomology(RunArgs),
    /// Long exact sequence and the short exact sequence of complexes.
    Les(RunArgs),
}

#[derive(Subcommand)]
enum ChartCmd {
    Validate { file: PathBuf },
}

#[derive(Subcommand)]
enum LefschetzCmd {
    Table {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum RuminCmd {
    Verify {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        max_weight: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        modular_rank: bool,
    },
}

#[derive(Subcommand)]
enum RsCmd {
    /// Matrices of D_0 … D_2n.
    Build(RunArgs),
    /// descend = rs = spectral-sequence fallback, degree by degree.
    Crosscheck {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        max_weight: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum Model {
    #[value(alias = "cs-affine")]
    #[serde(alias = "cs-affine")]
    Affine,
    Torus,
}

#[derive(Args, Clone, Debug, Default)]
struct RunArgs {
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    model: Option<Model>,
    #[arg(long)]
    n: Option<usize>,
    /// Weight bound (affine model).
    #[arg(long)]
    max_weight: Option<u32>,
    /// Mode entries (torus model): every frequency vector with entries in the list.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    modes: Option<Vec<i64>>,
    /// Additional nonzero modes drawn reproducibly with entries in [-2, 2].
    #[arg(long)]
    sample_modes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dimension table as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    modular_rank: bool,
    /// Skip the W versus W+2 comparison on the affine model.
    #[arg(long)]
    no_stability: bool,
}

/// Run configuration, from flags or a JSON file.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    model: Option<Model>,
    n: Option<usize>,
    ring: Option<Ring>,
    max_weight: Option<u32>,
    modes: Option<Vec<i64>>,
    sample_modes: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    #[serde(default)]
    modular_rank: bool,
    #[serde(default)]
    no_stability: bool,
}

struct Resolved {
    model: Model,
    cs: CsChart,
    truncation: Truncation,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    rank: RankMethod,
    stability: bool,
}

const DEFAULT_SEED: u64 = 0x5eed;

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::NotAComplex { .. } => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn resolve(args: &RunArgs) -> Result<Resolved, Failure> {
    let mut cfg: RunConfig = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => RunConfig::default(),
    };
    cfg.model = args.model.or(cfg.model);
    cfg.n = args.n.or(cfg.n);
    cfg.max_weight = args.max_weight.or(cfg.max_weight);
    cfg.modes = args.modes.clone().or(cfg.modes);
    cfg.sample_modes = args.sample_modes.or(cfg.sample_modes);
    cfg.seed = args.seed.or(cfg.seed);
    cfg.out = args.out.clone().or(cfg.out);
    cfg.csv = args.csv.clone().or(cfg.csv);
    cfg.modular_rank |= args.modular_rank;
    cfg.no_stability |= args.no_stability;

    let model = cfg.model.ok_or_else(|| usage("--model is required"))?;
    let n = cfg.n.unwrap_or(2);
    if n < 2 {
        return Err(usage("n must be at least 2"));
    }
    let want_ring = match model {
        Model::Affine => Ring::Poly,
        Model::Torus => Ring::Trig,
    };
    if cfg.ring.is_some_and(|r| r != want_ring) {
        return Err(usage(format!("the {model:?} model needs the {want_ring} ring").to_lowercase()));
    }
    let (cs, truncation) = match model {
        Model::Affine => {
            if cfg.modes.is_some() || cfg.sample_modes.is_some() {
                return Err(usage("mode options apply to the torus model only"));
            }
            let w = cfg.max_weight.unwrap_or(8);
            if w == 0 {
                return Err(usage("--max-weight must be positive"));
            }
            (CsChart::affine(n)?, Truncation::weight(w))
        }
        Model::Torus => {
            if cfg.max_weight.is_some() {
                return Err(usage("--max-weight applies to the affine model only"));
            }
            let entries = cfg.modes.clone().unwrap_or_else(|| vec![0]);
            let mut modes = modes_with_entries(2 * n, &entries);
            if let Some(count) = cfg.sample_modes {
                modes.extend(sample_modes(2 * n, count, cfg.seed.unwrap_or(DEFAULT_SEED))?);
            }
            (CsChart::torus(n)?, Truncation::modes(modes))
        }
    };
    Ok(Resolved {
        model,
        cs,
        truncation,
        out: cfg.out,
        csv: cfg.csv,
        rank: if cfg.modular_rank { RankMethod::Modular } else { RankMethod::FractionFree },
        stability: !cfg.no_stability,
    })
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Check(e.to_string()))? + "\n";
    match out {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn csv_bytes<R: AsRef<[u8]>>(header: &[&str], rows: impl IntoIterator<Item = Vec<R>>) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Failure::Check(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Failure::Check(e.to_string()))
}

fn verdict(ok: bool, what: &str, detail: Option<String>) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(match detail {
            Some(d) => format!("{what}: {d}"),
            None => what.to_string(),
        }))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartFile {
    model: String,
    n: usize,
    #[serde(default)]
    ring: Option<Ring>,
    #[serde(default)]
    beta: Option<DifferentialForm>,
    #[serde(default)]
    omega: Option<DifferentialForm>,
}

fn chart_validate(file: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(file).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let cfg: ChartFile = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let n = cfg.n;
    let summary = match cfg.model.as_str() {
        "contact" | "contact-affine" => {
            let beta = cfg.beta.ok_or_else(|| usage("a contact chart needs \"beta\""))?;
            let ring = cfg.ring.unwrap_or(beta.ring());
            let chart = contactify(n, &beta, ring)?;
            let levi = levi_form(&chart)?;
            json!({
                "valid": true,
                "model": "contact",
                "n": n,
                "ring": ring,
                "alpha": chart.alpha(),
                "levi_constant": levi.constant().is_some(),
                "levi_antisymmetric": levi.is_antisymmetric(),
            })
        }
        "cs" | "cs-affine" | "affine" => {
            let beta = cfg.beta.ok_or_else(|| usage("an affine cs chart needs \"beta\""))?;
            let cs = CsChart::affine_with_beta(n, beta)?;
            json!({ "valid": true, "model": "affine", "n": n, "ring": cs.ring(), "omega": cs.omega() })
        }
        "torus" => {
            let cs = match cfg.omega {
                Some(w) => CsChart::torus_with_omega(n, &gram_matrix(&w, 2 * n)?)?,
                None => CsChart::torus(n)?,
            };
            json!({ "valid": true, "model": "torus", "n": n, "ring": cs.ring(), "omega": cs.omega() })
        }
        other => return Err(usage(format!("unknown chart model {other:?}"))),
    };
    emit(&summary, None)
}

fn lefschetz(n: usize, format: Format) -> Result<(), Failure> {
    if n < 2 {
        return Err(usage("n must be at least 2"));
    }
    let rows = lefschetz_table(&SymplecticFiber::standard(n));
    match format {
        Format::Json => emit(&json!({ "n": n, "rows": rows }), None),
        Format::Csv => {
            let body = csv_bytes(
                &["k", "dim", "primitive", "rank_l", "rank_lambda", "l_injective", "l_surjective", "commutator"],
                rows.iter().map(|r| {
                    vec![
                        r.k.to_string(),
                        r.dim.to_string(),
                        r.primitive.to_string(),
                        r.rank_l.to_string(),
                        r.rank_lambda.to_string(),
                        r.l_injective.to_string(),
                        r.l_surjective.to_string(),
                        r.commutator.as_ref().map(ToString::to_string).unwrap_or_default(),
                    ]
                }),
            )?;
            print!("{}", String::from_utf8_lossy(&body));
            Ok(())
        }
    }
}

fn rumin_verify(n: usize, max_weight: u32, out: Option<&Path>, modular: bool, verbose: bool) -> Result<(), Failure> {
    if n < 2 {
        return Err(usage("n must be at least 2"));
    }
    let chart = ContactChart::standard(n)?;
    if verbose {
        eprintln!("building the Rumin complex, n = {n}, weight <= {max_weight}");
    }
    let method = if modular { RankMethod::Modular } else { RankMethod::FractionFree };
    let v = verify_rumin(&chart, &Truncation::weight(max_weight), method)?;
    let mut value = serde_json::to_value(&v).map_err(|e| Failure::Check(e.to_string()))?;
    value["passed"] = Value::Bool(v.passed());
    if let Some(f) = v.first_failure() {
        value["first_failure"] = Value::String(f);
    }
    emit(&value, out)?;
    verdict(v.passed(), "Rumin verification failed", v.first_failure())
}

fn rs_build(args: &RunArgs, verbose: bool) -> Result<(), Failure> {
    let r = resolve(args)?;
    if verbose {
        eprintln!("building D_0 … D_{} on {}", 2 * r.cs.n(), r.truncation);
    }
    let ops = rs_complex(&r.cs, &r.truncation)?;
    let value = json!({
        "model": r.model,
        "n": r.cs.n(),
        "truncation": r.truncation,
        "operators": ops.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
    });
    emit(&value, r.out.as_deref())
}

fn rs_crosscheck(n: usize, max_weight: u32, out: Option<&Path>) -> Result<(), Failure> {
    if n < 2 {
        return Err(usage("n must be at least 2"));
    }
    let c = crosscheck(&ContactChart::standard(n)?, &CsChart::affine(n)?, &Truncation::weight(max_weight))?;
    let mut value = serde_json::to_value(&c).map_err(|e| Failure::Check(e.to_string()))?;
    value["passed"] = Value::Bool(c.passed());
    emit(&value, out)?;
    let first = c.rows.iter().find(|r| !(r.descend_equals_rs && r.fallback_equals_rs));
    verdict(c.passed(), "oracles disagree", first.map(|r| format!("degree {}: {:?}", r.degree, r.counterexample)))
}

fn cohomology(args: &RunArgs, verbose: bool) -> Result<(), Failure> {
    let r = resolve(args)?;
    if verbose {
        eprintln!("cohomology of the {:?} model, n = {}, {}", r.model, r.cs.n(), r.truncation);
    }
    let opts = CohomologyOptions { rank: r.rank, check_stability: r.stability };
    let report = rs_cohomology(&r.cs, &r.truncation, opts)?;
    emit(&report, r.out.as_deref())?;
    if let Some(p) = &r.csv {
        let body = csv_bytes(&["degree", "deRham", "twisted", "rs"], report.dims_table().into_iter().map(Vec::from))?;
        write_atomic(p, &body).map_err(|e| usage(format!("{}: {e}", p.display())))?;
    }
    let first = report.les.nodes.iter().find(|n| !n.exact).map(|n| format!("{} {:?}", n.label, n.counterexample));
    verdict(report.passed(), "cohomology checks failed", first)
}

fn les(args: &RunArgs, verbose: bool) -> Result<(), Failure> {
    let r = resolve(args)?;
    if verbose {
        eprintln!("long exact sequence of the {:?} model on {}", r.model, r.truncation);
    }
    let l = les_check(&r.cs, &r.truncation)?;
    let s = short_exact_splice(&r.cs, &r.truncation)?;
    let value = json!({
        "model": r.model,
        "n": r.cs.n(),
        "truncation": r.truncation,
        "les": l,
        "splice": {
            "exact": s.is_exact(),
            "inclusion_is_chain_map": s.inclusion_is_chain_map,
            "projection_is_chain_map": s.projection_is_chain_map,
            "degrees": s.degrees,
        },
    });
    emit(&value, r.out.as_deref())?;
    let first = l.nodes.iter().find(|n| !n.exact).map(|n| format!("{} {:?}", n.label, n.counterexample));
    verdict(l.exact && l.snake_equals_wedge && s.is_exact(), "sequence checks failed", first)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let threads = configure_threads()?;
    if cli.verbose {
        eprintln!("{threads} worker threads");
    }
    let v = cli.verbose;
    match cli.command {
        Command::Chart(ChartCmd::Validate { file }) => chart_validate(&file),
        Command::Lefschetz(LefschetzCmd::Table { n, format }) => lefschetz(n, format),
        Command::Rumin(RuminCmd::Verify { n, max_weight, out, modular_rank }) => {
            rumin_verify(n, max_weight, out.as_deref(), modular_rank, v)
        }
        Command::Rs(RsCmd::Build(args)) => rs_build(&args, v),
        Command::Rs(RsCmd::Crosscheck { n, max_weight, out }) => rs_crosscheck(n, max_weight, out.as_deref()),
        Command::Cohomology(args) => cohomology(&args, v),
        Command::Les(args) => les(&args, v),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
