//! `kedge`: k-edge statistics, bound tables, constructions and audits.

mod input;
mod selftest;
mod tables;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kedge::bounds::{cr_lower_bound, halving_upper_bound, BoundTable, Pipeline};
use kedge::central::{classify, verify_central};
use kedge::constructions::{
    audit_sr, build_cluster_polygon, build_polygon_center, build_sr, check_3decomposable,
    EqualityConstruction, SrConfig,
};
use kedge::geom::parse_rational;
use kedge::pointfile::write_points;
use kedge::sequence::{halfperiod_from_points, TieBreak};
use kedge::stats::{edge_vector_from_halfperiod, summarize_points};
use kedge::Point;
use serde_json::{json, Value};

use input::{load_input, load_points, Input};

#[derive(Parser)]
#[command(
    name = "kedge",
    version,
    about = "Exact k-edge, halving-line and crossing-number toolkit"
)]
struct Cli {
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for parallel loops (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Table1,
    Table2,
    Section5,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    Bounds,
    Central,
    Constructions,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Edge vector, halving lines and crossing number of a point file.
    Analyze { file: PathBuf },
    /// Classify the k-critical transpositions of a halfperiod or point file.
    Classify {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        /// Order parallel directions by pair index instead of failing.
        #[arg(long)]
        lexicographic_ties: bool,
    },
    /// Per-k lower bounds on E_<=k(n).
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Upper bound on the number of halving lines.
    HalvingBound {
        #[arg(long)]
        n: usize,
    },
    /// Lower bound on the rectilinear crossing number.
    CrBound {
        #[arg(long)]
        n: usize,
        /// table1 or section5.
        #[arg(long, default_value = "section5")]
        pipeline: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Crossing-number lower bounds for a range of n.
    CrTable {
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Recompute a published table.
    Tables {
        #[arg(value_enum)]
        which: TableKind,
        /// Compare against the embedded reference values.
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Generate a point set.
    Construct {
        #[command(subcommand)]
        what: Construct,
    },
    /// Rebuild a construction and audit every claimed count.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Search for a 3-decomposition witness.
    Decompose3 {
        file: PathBuf,
        /// `thirds` or a comma-separated part list (a/b/c or 0/1/2).
        #[arg(long, default_value = "thirds")]
        partition: String,
    },
    /// Run the acceptance checks for a scope.
    Selftest {
        #[arg(value_enum)]
        scope: Scope,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 12)]
        nmax: usize,
        #[arg(long, default_value_t = 4)]
        rmax: usize,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// The 3-symmetric family on 9r points.
    Sr {
        #[arg(long)]
        r: usize,
        /// Decimal digits of the rotation.
        #[arg(long)]
        precision: Option<u32>,
        /// Initial perturbation size, e.g. 1/1000.
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
        /// Write the unperturbed (collinear) set.
        #[arg(long, conflicts_with = "perturbed")]
        raw: bool,
        /// Write the perturbed set (default).
        #[arg(long)]
        perturbed: bool,
    },
    /// Regular (2k+1)-gon with n-2k-1 points near its center.
    PolygonCenter {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        precision: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Regular (2t+1)-gon with every vertex replaced by m points.
    ClusterPolygon {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long, default_value_t = 12)]
        precision: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum Verify {
    Sr {
        #[arg(long)]
        r: usize,
    },
}

/// Exit 2 for bad input, 1 for a failed check.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Check(String),
}

impl From<kedge::Error> for Failure {
    fn from(e: kedge::Error) -> Self {
        match e {
            kedge::Error::Verification(m) => Failure::Check(m),
            kedge::Error::NotInGeneralPosition(t) => {
                let listed: Vec<String> = t
                    .iter()
                    .map(|(a, b, c)| format!("({}, {}, {})", a + 1, b + 1, c + 1))
                    .collect();
                Failure::Input(format!("collinear triples (1-based): {}", listed.join(" ")))
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn parse_epsilon(s: &Option<String>) -> CliResult<Option<kedge::Rational>> {
    s.as_deref()
        .map(|e| {
            parse_rational(e).ok_or_else(|| Failure::Input(format!("cannot parse epsilon {e:?}")))
        })
        .transpose()
}

fn write_file(path: &Path, points: &[Point], header: &[String]) -> CliResult<()> {
    fs::write(path, write_points(points, header))
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn analyze(file: &Path) -> CliResult<()> {
    let set = load_points(file)?;
    let report = summarize_points(&set)?;
    let h = halfperiod_from_points(&set, TieBreak::Lexicographic)?;
    let swept = edge_vector_from_halfperiod(&h)?;
    let ok = report.identity_holds() && swept == report.edge_vector;
    let v = &report.edge_vector;
    print_json(&json!({
        "n": report.n,
        "edge_vector": v.counts(),
        "E_leq": v.cumulative(),
        "halving_lines": v.halving_lines(),
        "crossings": report.cr_bruteforce,
        "crossings_from_identity": [report.cr_identity_form1.to_string(), report.cr_identity_form2.to_string()],
        "identity_check": ok,
    }));
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("identity cross-check failed".into()))
    }
}

fn run_classify(file: &Path, k: usize, lexicographic: bool) -> CliResult<()> {
    let tie = if lexicographic {
        TieBreak::Lexicographic
    } else {
        TieBreak::Error
    };
    let h = match load_input(file)? {
        Input::Halfperiod(h) => h,
        Input::Points(set) => halfperiod_from_points(&set, tie)?,
    };
    let report = verify_central(&h, k)?;
    let c = classify(&h, k)?;
    print_json(&json!({
        "n": h.n(),
        "k": k,
        "s": c.s,
        "nonessential_in_input": c.nonessential_in_input,
        "records": to_json(&c.records),
        "report": to_json(&report),
    }));
    if report.all_hold() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().iter().map(|c| c.name).collect();
        Err(Failure::Check(format!(
            "failed checks: {names:?}, main inequality holds: {}",
            report.holds
        )))
    }
}

fn run_bounds(n: usize, k: Option<usize>, format: Format) -> CliResult<()> {
    let mut table = BoundTable::new(n)?;
    if let Some(k) = k {
        table.rows.retain(|r| r.k == k);
        if table.rows.is_empty() {
            return Err(Failure::Input(format!("k = {k} out of range for n = {n}")));
        }
    }
    match format {
        Format::Json => print_json(&to_json(&table)),
        Format::Csv | Format::Text => print!("{}", tables::bound_table(&table, format)),
    }
    Ok(())
}

fn run_cr_bound(n: usize, pipeline: &str, format: Format) -> CliResult<()> {
    let pipeline: Pipeline = pipeline.parse()?;
    let r = cr_lower_bound(n, pipeline)?;
    match format {
        Format::Json => print_json(&to_json(&r)),
        _ => println!("{}", r.value),
    }
    Ok(())
}

fn report_equality(c: &EqualityConstruction, output: &Path, header: Vec<String>) -> CliResult<()> {
    write_file(output, c.set.points(), &header)?;
    print_json(&json!({
        "output": output.display().to_string(),
        "report": to_json(&c.report),
        "equality": c.report.matches(),
    }));
    Ok(())
}

fn run_construct(what: Construct) -> CliResult<()> {
    match what {
        Construct::Sr {
            r,
            precision,
            epsilon,
            output,
            raw,
            perturbed: _,
        } => {
            let mut cfg = SrConfig::new(r);
            if let Some(p) = precision {
                cfg.precision = p;
            }
            if let Some(e) = parse_epsilon(&epsilon)? {
                cfg.perturbation_epsilon = e;
            }
            let c = build_sr(&cfg)?;
            let set = if raw { &c.raw } else { &c.perturbed };
            let header = vec![
                format!(
                    "S_{r}, {} points, {}",
                    9 * r,
                    if raw { "raw" } else { "perturbed" }
                ),
                format!("classes in order a a' a'' b b' b'' c c' c'', {r} points each"),
            ];
            write_file(&output, &set.points, &header)?;
            print_json(&json!({
                "output": output.display().to_string(),
                "r": r,
                "n": set.len(),
                "kind": if raw { "raw" } else { "perturbed" },
                "precision": c.precision,
                "far_factor": c.far_factor.to_string(),
                "epsilon": c.epsilon.to_string(),
                "properties": to_json(&c.properties),
                "E_leq": c.leq,
            }));
            Ok(())
        }
        Construct::PolygonCenter {
            k,
            n,
            precision,
            output,
        } => {
            let c = build_polygon_center(k, n, precision)?;
            report_equality(
                &c,
                &output,
                vec![format!(
                    "regular {}-gon plus {} central points",
                    2 * k + 1,
                    n - 2 * k - 1
                )],
            )
        }
        Construct::ClusterPolygon {
            t,
            m,
            epsilon,
            precision,
            output,
        } => {
            let c = build_cluster_polygon(t, m, parse_epsilon(&epsilon)?, precision)?;
            report_equality(
                &c,
                &output,
                vec![format!("regular {}-gon, {m} points per vertex", 2 * t + 1)],
            )
        }
    }
}

fn run_verify_sr(r: usize) -> CliResult<()> {
    let c = build_sr(&SrConfig::new(r))?;
    let audit = audit_sr(&c)?;
    print_json(&json!({ "audit": to_json(&audit), "passes": audit.passes() }));
    if audit.passes() {
        Ok(())
    } else {
        Err(Failure::Check(format!("S_{r} audit failed")))
    }
}

fn parse_partition(spec: &str, n: usize) -> CliResult<Vec<usize>> {
    if spec == "thirds" {
        if !n.is_multiple_of(3) {
            return Err(Failure::Input(format!(
                "{n} points cannot be split into thirds"
            )));
        }
        return Ok((0..n).map(|i| 3 * i / n).collect());
    }
    let parts: Vec<usize> = spec
        .split(',')
        .map(|t| match t.trim() {
            "a" | "A" | "0" => Ok(0),
            "b" | "B" | "1" => Ok(1),
            "c" | "C" | "2" => Ok(2),
            other => Err(Failure::Input(format!("bad part {other:?} in partition"))),
        })
        .collect::<CliResult<_>>()?;
    if parts.len() != n {
        return Err(Failure::Input(format!(
            "partition lists {} parts for {n} points",
            parts.len()
        )));
    }
    Ok(parts)
}

fn run_decompose(file: &Path, spec: &str) -> CliResult<()> {
    let set = load_points(file)?;
    let partition = parse_partition(spec, set.len())?;
    let witness = check_3decomposable(&set, &partition)?;
    print_json(&json!({
        "n": set.len(),
        "decomposable": witness.is_some(),
        "witnesses": to_json(&witness),
    }));
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Failure::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Input(e.to_string()))?;
    }
    match cli.command {
        Command::Analyze { file } => analyze(&file),
        Command::Classify {
            file,
            k,
            lexicographic_ties,
        } => run_classify(&file, k, lexicographic_ties),
        Command::Bounds { n, k, format } => run_bounds(n, k, format),
        Command::HalvingBound { n } => {
            println!("{}", halving_upper_bound(n)?);
            Ok(())
        }
        Command::CrBound {
            n,
            pipeline,
            format,
        } => run_cr_bound(n, &pipeline, format),
        Command::CrTable { from, to, format } => tables::cr_table(from, to, format),
        Command::Tables {
            which,
            check,
            format,
        } => tables::published(which, check, format),
        Command::Construct { what } => run_construct(what),
        Command::Verify {
            what: Verify::Sr { r },
        } => run_verify_sr(r),
        Command::Decompose3 { file, partition } => run_decompose(&file, &partition),
        Command::Selftest {
            scope,
            trials,
            nmax,
            rmax,
        } => selftest::run(scope, cli.seed, trials, nmax, rmax),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Check(m)) => {
            eprintln!("check failed: {m}");
            ExitCode::from(1)
        }
    }
}
