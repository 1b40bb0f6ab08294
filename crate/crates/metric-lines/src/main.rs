//! Command-line driver: validate matrices, enumerate lines, inspect the
//! structure of a line's generating pairs, extract witness families, run
//! sweeps, and generate instance matrices.

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use metric_lines::catalog::{build_catalog, check_chen_chvatal};
use metric_lines::ingest::{self, IngestError};
use metric_lines::instances::{builtin, graph_metric, random_metric, GraphSpec};
use metric_lines::levels::{audit_structure, build_levels, AuditViolation, LevelError};
use metric_lines::metric::{MetricError, Pair, PointId};
use metric_lines::ordering::order_component;
use metric_lines::sweep::{sweep, SweepChecks, SweepSource};
use metric_lines::witness::{extract_witness, WitnessError, WitnessMode};
use metric_lines::Space;

const EXIT_IO: u8 = 3;
const EXIT_PARSE: u8 = 4;
const EXIT_METRIC: u8 = 5;
const EXIT_UNKNOWN_LINE: u8 = 6;
const EXIT_LEVEL_RANGE: u8 = 7;
const EXIT_UNIVERSAL: u8 = 8;
const EXIT_INSTANCE: u8 = 9;
const EXIT_INTERNAL: u8 = 10;

const EXIT_CODE_HELP: &str = "\
Exit codes:
  0   success
  2   usage error
  3   file I/O error
  4   input parse error (CSV/JSON matrix or edge list)
  5   metric axiom violation (reported with offending indices)
  6   unknown line selector
  7   level k out of range
  8   space has a universal line (witness commands refuse it)
  9   instance generator error (disconnected graph, bad parameters)
  10  internal verification failure";

#[derive(Parser)]
#[command(
    name = "metric-lines",
    about = "Lines, generating-pair structure, and lower-bound witnesses in finite metric spaces",
    after_help = EXIT_CODE_HELP,
    version
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Distance-matrix file (CSV, or JSON {"n":…,"dist":[[…]]}).
    #[arg(long)]
    input: Option<String>,
    /// Builtin instance name: P<n>, C<n>, or K<n>.
    #[arg(long)]
    builtin: Option<String>,
    /// Edge-list file: first line "n m", then m lines "i j [w]".
    #[arg(long)]
    edges: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the metric axioms of an input matrix.
    Validate(Input),
    /// Enumerate all lines and their generating pairs.
    Lines(Input),
    /// Level decomposition, green components, orderings, and audits of one line.
    Structure {
        #[command(flatten)]
        input: Input,
        /// Line selector: comma-separated sorted point ids, or "pair:a,b".
        #[arg(long)]
        line: String,
        /// Restrict green-component output to level k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Extract a certified family of pairwise-distinct lines.
    Witness {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Mode::Best)]
        mode: Mode,
    },
    /// Run checks over a family of generated instances, one JSON record per line.
    Sweep {
        /// All labeled connected graphs on this many vertices (2-7).
        #[arg(long, conflicts_with_all = ["random", "n", "seed", "max_entry"])]
        graphs: Option<usize>,
        /// Deduplicate graphs up to isomorphism (required for --graphs 7).
        #[arg(long)]
        dedup: bool,
        /// Number of random metrics to generate.
        #[arg(long, requires_all = ["n", "seed"])]
        random: Option<usize>,
        /// Point count for random metrics.
        #[arg(long)]
        n: Option<usize>,
        /// Starting seed for random metrics (consecutive seeds are used).
        #[arg(long)]
        seed: Option<u64>,
        /// Largest raw matrix entry before shortest-path closure.
        #[arg(long, default_value_t = 10)]
        max_entry: i64,
        /// Checks to run (comma-separated: conjecture, audit, witness).
        #[arg(long, default_value = "conjecture", value_delimiter = ',')]
        check: Vec<String>,
        /// Append records to this file instead of stdout.
        #[arg(long)]
        sink: Option<String>,
    },
    /// Emit the distance matrix of a generated instance (CSV or JSON).
    Generate {
        /// Builtin instance name: P<n>, C<n>, or K<n>.
        #[arg(long, conflicts_with_all = ["edges", "random", "seed"])]
        builtin: Option<String>,
        /// Edge-list file to convert to a shortest-path matrix.
        #[arg(long, conflicts_with_all = ["random", "seed"])]
        edges: Option<String>,
        /// Generate a random metric on this many points (requires --seed).
        #[arg(long, requires = "seed")]
        random: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10)]
        max_entry: i64,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Mode {
    Paper,
    Best,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        let code = match &e {
            IngestError::Parse(_) | IngestError::Overflow => EXIT_PARSE,
            IngestError::Metric(_) => EXIT_METRIC,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<MetricError> for Failure {
    fn from(e: MetricError) -> Self {
        Failure::new(EXIT_METRIC, e.to_string())
    }
}

impl From<LevelError> for Failure {
    fn from(e: LevelError) -> Self {
        let code = match &e {
            LevelError::LevelOutOfRange { .. } => EXIT_LEVEL_RANGE,
            _ => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<WitnessError> for Failure {
    fn from(e: WitnessError) -> Self {
        let code = match &e {
            WitnessError::UniversalLinePresent => EXIT_UNIVERSAL,
            _ => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

fn read_file(path: &str) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_IO, format!("{path}: {e}")))
}

fn load_space(input: &Input) -> Result<Space, Failure> {
    if let Some(path) = &input.input {
        return Ok(ingest::space_from_text(&read_file(path)?)?);
    }
    if let Some(name) = &input.builtin {
        return builtin(name)
            .ok_or_else(|| Failure::new(EXIT_INSTANCE, format!("unknown builtin {name:?}")));
    }
    let path = input.edges.as_ref().expect("clap guarantees one source");
    let spec = GraphSpec::from_edge_list(&read_file(path)?)
        .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    graph_metric(&spec).map_err(|e| Failure::new(EXIT_INSTANCE, e.to_string()))
}

fn pts(ids: &[PointId]) -> String {
    ids.iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn emit<T: Serialize>(format: Format, report: &T, human: impl FnOnce(&T) -> String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(report).expect("reports are plain data")
        ),
        Format::Human => println!("{}", human(report)),
    }
}

fn cmd_validate(format: Format, input: &Input) -> Result<(), Failure> {
    let space = load_space(input)?;
    #[derive(Serialize)]
    struct Report {
        n: usize,
        valid: bool,
    }
    emit(
        format,
        &Report {
            n: space.n(),
            valid: true,
        },
        |r| format!("valid metric on {} points", r.n),
    );
    Ok(())
}

fn cmd_lines(format: Format, input: &Input) -> Result<(), Failure> {
    let space = load_space(input)?;
    let catalog = build_catalog(&space);
    let check = check_chen_chvatal(&space);
    emit(format, &catalog.to_export(), |_| {
        let mut out = format!(
            "n = {}, m = {} lines, universal = {}, conjecture holds = {}\n",
            check.n, check.line_count, check.universal, check.holds
        );
        for (line, gens) in catalog.entries() {
            out += &format!(
                "  [{}]  K(L) = {}\n",
                pts(line),
                gens.iter()
                    .map(|e| format!("{{{},{}}}", e.lo(), e.hi()))
                    .collect::<Vec<_>>()
                    .join(" ")
            );
        }
        out.trim_end().to_string()
    });
    Ok(())
}

fn resolve_line(space: &Space, selector: &str) -> Result<Vec<PointId>, Failure> {
    let unknown = || Failure::new(EXIT_UNKNOWN_LINE, format!("unknown line {selector:?}"));
    if let Some(rest) = selector.strip_prefix("pair:") {
        let ids: Vec<u32> = rest
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| unknown())?;
        if ids.len() != 2 {
            return Err(unknown());
        }
        let (a, b) = (PointId(ids[0]), PointId(ids[1]));
        return space.line_of(a, b).map_err(|e| {
            Failure::new(EXIT_UNKNOWN_LINE, format!("bad pair selector: {e}"))
        });
    }
    let mut ids: Vec<PointId> = selector
        .split(',')
        .map(|t| t.trim().parse::<u32>().map(PointId))
        .collect::<Result<_, _>>()
        .map_err(|_| unknown())?;
    ids.sort();
    ids.dedup();
    Ok(ids)
}

#[derive(Serialize)]
struct OrderingReport {
    k: usize,
    component: Vec<Pair>,
    sequence: Vec<PointId>,
    openings: Vec<PointId>,
}

#[derive(Serialize)]
struct StructureReport {
    decomposition: metric_lines::levels::DecompositionExport,
    orderings: Vec<OrderingReport>,
    audit_violations: Vec<AuditViolation>,
}

fn cmd_structure(
    format: Format,
    input: &Input,
    selector: &str,
    k: Option<usize>,
) -> Result<(), Failure> {
    let space = load_space(input)?;
    let catalog = build_catalog(&space);
    let line = resolve_line(&space, selector)?;
    let members = catalog.generators_of(&line).ok_or_else(|| {
        Failure::new(
            EXIT_UNKNOWN_LINE,
            format!("no line has point set [{}]", pts(&line)),
        )
    })?;
    let decomp = build_levels(&space, &line, members)?;
    let mut orderings = Vec::new();
    let green: Vec<_> = match k {
        Some(k) => vec![decomp.green_components(k)?],
        None => decomp.green_levels().collect(),
    };
    for gl in green {
        for comp in &gl.components {
            let ordering = order_component(&space, &line, comp)
                .map_err(|e| Failure::new(EXIT_INTERNAL, e.to_string()))?;
            orderings.push(OrderingReport {
                k: gl.k,
                component: comp.clone(),
                sequence: ordering.sequence.points().to_vec(),
                openings: ordering.openings.clone(),
            });
        }
    }
    let report = StructureReport {
        decomposition: decomp.to_export(),
        orderings,
        audit_violations: audit_structure(&space, &decomp),
    };
    emit(format, &report, |r| {
        let mut out = format!(
            "line [{}]: height {}\n",
            pts(&r.decomposition.line),
            r.decomposition.height
        );
        for level in &r.decomposition.levels {
            out += &format!(
                "  level {}: {} pairs",
                level.k,
                level.pairs.len()
            );
            if let Some(g) = &level.green {
                out += &format!(
                    ", {} green components, |Q| = {}",
                    g.components.len(),
                    g.isolated.len()
                );
            }
            out.push('\n');
        }
        out += &format!(
            "  purple: {} pairs, red: {} pairs\n",
            r.decomposition.purple.len(),
            r.decomposition.red.len()
        );
        for o in &r.orderings {
            out += &format!(
                "  ordering (k={}): ({})  openings ({})\n",
                o.k,
                pts(&o.sequence),
                pts(&o.openings)
            );
        }
        if r.audit_violations.is_empty() {
            out += "  audits: all pass";
        } else {
            for v in &r.audit_violations {
                out += &format!("  AUDIT FAILURE {:?}: {}\n", v.claim, v.detail);
            }
        }
        out.trim_end().to_string()
    });
    if report.audit_violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(EXIT_INTERNAL, "structural audit failed"))
    }
}

fn cmd_witness(format: Format, input: &Input, mode: Mode) -> Result<(), Failure> {
    let space = load_space(input)?;
    let mode = match mode {
        Mode::Paper => WitnessMode::Paper,
        Mode::Best => WitnessMode::Best,
    };
    let report = extract_witness(&space, mode)?;
    emit(format, &report, |r| {
        let mut out = format!(
            "n = {}, m = {}, branch = {:?}, certified lower bound = {}\n",
            r.n, r.m, r.branch, r.certified_lower_bound
        );
        for family in &r.families {
            out += &format!("  {:?} family of {} lines\n", family.kind, family.size());
        }
        for note in &r.notes {
            out += &format!("  note: {note}\n");
        }
        out.trim_end().to_string()
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    format: Format,
    graphs: Option<usize>,
    dedup: bool,
    random: Option<usize>,
    n: Option<usize>,
    seed: Option<u64>,
    max_entry: i64,
    check: &[String],
    sink: Option<&str>,
) -> Result<(), Failure> {
    let source = match (graphs, random) {
        (Some(n), None) => SweepSource::Graphs { n, dedup },
        (None, Some(count)) => SweepSource::Random {
            count,
            n: n.expect("clap requires --n"),
            seed: seed.expect("clap requires --seed"),
            max_entry,
        },
        _ => {
            return Err(Failure::new(
                EXIT_INSTANCE,
                "exactly one of --graphs or --random is required",
            ))
        }
    };
    if source == (SweepSource::Graphs { n: 7, dedup: false }) {
        return Err(Failure::new(
            EXIT_INSTANCE,
            "--graphs 7 requires --dedup (over 800k labeled graphs otherwise)",
        ));
    }
    let mut checks = SweepChecks {
        conjecture: false,
        audit: false,
        witness: false,
    };
    for c in check {
        match c.as_str() {
            "conjecture" => checks.conjecture = true,
            "audit" => checks.audit = true,
            "witness" => checks.witness = true,
            other => {
                return Err(Failure::new(
                    EXIT_INSTANCE,
                    format!("unknown check {other:?}"),
                ))
            }
        }
    }
    let summary = match sink {
        Some(path) => {
            let mut file = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|e| Failure::new(EXIT_IO, format!("{path}: {e}")))?;
            sweep(&source, checks, &mut file)
        }
        None => sweep(&source, checks, &mut std::io::stdout().lock()),
    }
    .map_err(|e| Failure::new(EXIT_INSTANCE, e.to_string()))?;
    let text = |s: &metric_lines::sweep::SweepSummary| {
        format!(
            "instances = {}, conjecture failures = {}, audit failures = {}, \
             witness failures = {}, universal = {}, lines in [{}, {}]",
            s.instances,
            s.conjecture_failures,
            s.audit_failures,
            s.witness_failures,
            s.universal_count,
            s.min_lines,
            s.max_lines
        )
    };
    match sink {
        // Records went to stdout; keep the summary on stderr so the record
        // stream stays machine-readable.
        None => {
            let mut err = std::io::stderr().lock();
            match format {
                Format::Json => writeln!(
                    err,
                    "{}",
                    serde_json::to_string(&summary).expect("plain data")
                ),
                Format::Human => writeln!(err, "{}", text(&summary)),
            }
            .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        }
        Some(_) => emit(format, &summary, text),
    }
    let failed = summary.conjecture_failures + summary.audit_failures + summary.witness_failures;
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::new(EXIT_INTERNAL, format!("{failed} instances failed")))
    }
}

fn cmd_generate(
    format: Format,
    builtin_name: Option<&str>,
    edges: Option<&str>,
    random: Option<usize>,
    seed: Option<u64>,
    max_entry: i64,
) -> Result<(), Failure> {
    let space = if let Some(name) = builtin_name {
        builtin(name)
            .ok_or_else(|| Failure::new(EXIT_INSTANCE, format!("unknown builtin {name:?}")))?
    } else if let Some(path) = edges {
        let spec = GraphSpec::from_edge_list(&read_file(path)?)
            .map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
        graph_metric(&spec).map_err(|e| Failure::new(EXIT_INSTANCE, e.to_string()))?
    } else if let Some(n) = random {
        random_metric(n, seed.expect("clap requires --seed"), max_entry)
    } else {
        return Err(Failure::new(
            EXIT_INSTANCE,
            "one of --builtin, --edges, or --random is required",
        ));
    };
    match format {
        Format::Json => println!("{}", ingest::to_json(&space)),
        Format::Human => print!("{}", ingest::to_csv(&space)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(input) => cmd_validate(cli.format, input),
        Command::Lines(input) => cmd_lines(cli.format, input),
        Command::Structure { input, line, k } => cmd_structure(cli.format, input, line, *k),
        Command::Witness { input, mode } => cmd_witness(cli.format, input, *mode),
        Command::Sweep {
            graphs,
            dedup,
            random,
            n,
            seed,
            max_entry,
            check,
            sink,
        } => cmd_sweep(
            cli.format,
            *graphs,
            *dedup,
            *random,
            *n,
            *seed,
            *max_entry,
            check,
            sink.as_deref(),
        ),
        Command::Generate {
            builtin,
            edges,
            random,
            seed,
            max_entry,
        } => cmd_generate(
            cli.format,
            builtin.as_deref(),
            edges.as_deref(),
            *random,
            *seed,
            *max_entry,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
