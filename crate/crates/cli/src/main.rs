use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use equipoincare::format::{render_invariants, FormatError, GraphDocument, SeriesDocument};
use equipoincare::graph::ValidationOptions;
use equipoincare::linalg::determinant;
use equipoincare::oracle::{self, ade_family, AdeType, CyclicQuotientSpec, OracleError, OracleVerdict};
use equipoincare::poincare::EngineError;
use equipoincare::{FiltrationSpec, Mode, PoincareEngine, ResolutionGraph};

#[derive(Parser)]
#[command(name = "equipoincare", version, about = "Exact Poincaré series of rational surface singularities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a graph document describes a rational resolution graph.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        skip_rationality: bool,
    },
    /// Print det, the inverse form, the discriminant group and the characters.
    Invariants {
        file: PathBuf,
        #[arg(long)]
        skip_rationality: bool,
    },
    /// Print a truncated series.
    Series {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        degree: u64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
        #[arg(long)]
        skip_rationality: bool,
    },
    /// Run the order, integrality and reduction checks.
    Check {
        file: PathBuf,
        #[arg(long)]
        degree: u64,
        #[arg(long)]
        skip_rationality: bool,
    },
    /// Compare P against a monomial count on a cyclic quotient.
    Oracle {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
        /// 0-based chain vertex.
        #[arg(long, conflicts_with = "all")]
        vertex: Option<usize>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        degree: u64,
    },
    /// Print the graph document of an ADE configuration, all vertices marked.
    Family { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Divisorial,
    Curve,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Divisorial => Mode::Divisorial,
            ModeArg::Curve => Mode::Curve,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Q,
    P,
    Pg,
    Curve,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

enum Failure {
    /// Bad input: unreadable file, malformed document, bad parameters.
    Usage(String),
    /// The input was understood but failed validation or a check.
    Check(String),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Check(e.to_string())
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::InvalidParameters { .. } | OracleError::InvalidVertex { .. } | OracleError::InvalidFamilyIndex(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

/// Output plus whether every check passed.
type Outcome = Result<(String, bool), Failure>;

fn load(path: &Path) -> Result<ResolutionGraph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(GraphDocument::parse(&text)?.to_graph()?)
}

fn validate(file: &Path, mode: Option<ModeArg>, skip_rationality: bool) -> Outcome {
    let graph = load(file)?;
    let opts = ValidationOptions {
        check_rationality: !skip_rationality,
        mode: mode.map(Mode::from),
    };
    match graph.validate(&opts) {
        Ok(v) => {
            let d = determinant(&graph.neg_intersection_matrix());
            let line = match v.arithmetic_genus() {
                Some(pa) => format!("valid, rational (p_a = {pa}), d = {d}\n"),
                None => format!("valid (rationality not checked), d = {d}\n"),
            };
            Ok((line, true))
        }
        Err(report) => Ok((format!("invalid graph:\n{report}\n"), false)),
    }
}

fn engine(graph: &ResolutionGraph, mode: Mode, degree: u64, skip_rationality: bool) -> Result<PoincareEngine, Failure> {
    Ok(PoincareEngine::new(FiltrationSpec::with_options(graph, mode, degree, !skip_rationality)?)?)
}

fn invariants(file: &Path, skip_rationality: bool) -> Outcome {
    let graph = load(file)?;
    let opts = ValidationOptions {
        check_rationality: !skip_rationality,
        mode: None,
    };
    let validated = graph.validate(&opts).map_err(|r| Failure::Check(format!("invalid graph:\n{r}")))?;
    let inv = equipoincare::GraphInvariants::compute(&validated)?;
    Ok((render_invariants(&graph, &inv), true))
}

fn series(file: &Path, kind: Kind, degree: u64, format: OutputFormat, skip_rationality: bool) -> Outcome {
    let graph = load(file)?;
    let mode = match kind {
        Kind::Curve => Mode::Curve,
        _ => Mode::Divisorial,
    };
    let engine = engine(&graph, mode, degree, skip_rationality)?;
    let factors = engine.invariants().group.invariant_factors().to_vec();
    let (text, doc) = match kind {
        Kind::Q => {
            let s = engine.q_series()?;
            (s.render(), SeriesDocument::from_series("q", &s, None))
        }
        Kind::P => {
            let s = engine.p_series()?;
            (s.render(), SeriesDocument::from_series("p", &s, None))
        }
        Kind::Pg => {
            let s = engine.pg_series()?;
            (s.render(), SeriesDocument::from_series("pg", &s, Some(factors)))
        }
        Kind::Curve => {
            let s = engine.pg_curve_series()?;
            (s.render(), SeriesDocument::from_series("curve", &s, Some(factors)))
        }
    };
    let out = match format {
        OutputFormat::Text => text,
        OutputFormat::Json => doc.to_json(),
    };
    Ok((out + "\n", true))
}

fn check(file: &Path, degree: u64, skip_rationality: bool) -> Outcome {
    let graph = load(file)?;
    let engine = engine(&graph, Mode::Divisorial, degree, skip_rationality)?;
    let mut out = String::new();
    let mut ok = true;

    let orders = engine.check_orders()?;
    for c in &orders.checks {
        let pass = c.from_m == c.from_cokernel && c.divides_det;
        ok &= pass;
        let _ = writeln!(
            out,
            "order {}: {} (from m: {}, in cokernel: {}, divides d: {})",
            graph.vertices[c.vertex].id,
            if pass { "ok" } else { "FAIL" },
            c.from_m,
            c.from_cokernel,
            c.divides_det
        );
    }

    match engine.invariants().check_equivariant_integrality() {
        Ok(()) => {
            let _ = writeln!(out, "integrality: ok");
        }
        Err(e) => {
            ok = false;
            let _ = writeln!(out, "integrality: FAIL ({e})");
        }
    }

    let reduction = engine.check_reduction()?;
    match &reduction.discrepancy {
        None => {
            let _ = writeln!(out, "reduction: ok ({} terms up to degree {degree})", reduction.lhs.len());
        }
        Some(d) => {
            ok = false;
            let _ = writeln!(
                out,
                "reduction: FAIL at exponent {:?}: red P^G has {}, Q(t^d) has {}",
                d.exponent, d.lhs, d.rhs
            );
        }
    }
    Ok((out, ok))
}

fn verdict_row(v: &OracleVerdict) -> String {
    let s = &v.spec;
    let verdict = match &v.discrepancy {
        None => "equal".to_string(),
        Some(d) => format!("differ at {:?}: monomials {}, formula {}", d.exponent, d.lhs, d.rhs),
    };
    format!("{}\t{}\t{}\t{}\t{}\n", s.n, s.q, s.vertex, s.degree_bound, verdict)
}

fn run_oracle(n: u64, q: u64, vertex: Option<usize>, all: bool, degree: u64) -> Outcome {
    let verdicts = match (vertex, all) {
        (Some(vertex), _) => vec![oracle::compare_with_formula(&CyclicQuotientSpec {
            n,
            q,
            vertex,
            degree_bound: degree,
        })?],
        (None, true) => oracle::compare_all_vertices(n, q, degree)?,
        (None, false) => return Err(Failure::Usage("pass --vertex <i> or --all".into())),
    };
    let mut out = String::from("n\tq\tvertex\tbound\tverdict\n");
    for v in &verdicts {
        out.push_str(&verdict_row(v));
    }
    let ok = verdicts.iter().all(OracleVerdict::equal);
    Ok((out, ok))
}

fn family(name: &str) -> Outcome {
    let t: AdeType = name.parse()?;
    let graph = ade_family(t)?.with_all_marked();
    Ok((GraphDocument::from_graph(&graph).to_json() + "\n", true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate {
            file,
            mode,
            skip_rationality,
        } => validate(&file, mode, skip_rationality),
        Command::Invariants { file, skip_rationality } => invariants(&file, skip_rationality),
        Command::Series {
            file,
            kind,
            degree,
            format,
            skip_rationality,
        } => series(&file, kind, degree, format, skip_rationality),
        Command::Check {
            file,
            degree,
            skip_rationality,
        } => check(&file, degree, skip_rationality),
        Command::Oracle {
            n,
            q,
            vertex,
            all,
            degree,
        } => run_oracle(n, q, vertex, all, degree),
        Command::Family { name } => family(&name),
    };
    match result {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
