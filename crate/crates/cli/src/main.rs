//! Command-line front end. Results go to stdout as JSON with exact
//! rationals written `"p/q"`. Exit status: 0 on success, 1 on a domain error
//! (or a negative verdict such as a non-PSD matrix), 2 on a usage error.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bratteli", version, about = "Bratteli diagrams, full groups and their characters")]
struct Cli {
    /// Also print floating-point approximations with error bounds.
    #[arg(long, global = true)]
    float: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Diagram files: validation, paths, telescoping, DOT export.
    #[command(subcommand)]
    Diagram(DiagramCmd),
    /// Invariant measures.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Elements of the full group and the explicit constructions.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Characters and their axioms.
    #[command(subcommand)]
    Char(CharCmd),
    /// Rational permutations of [0, 1).
    #[command(subcommand)]
    Rperm(RpermCmd),
}

#[derive(Subcommand)]
pub enum DiagramCmd {
    /// Parse and validate; prints vertex and path counts.
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Path counts at a level, or the edges of one path, or the index of an
    /// edge list.
    Paths {
        file: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long, requires = "index")]
        vertex: Option<usize>,
        #[arg(long, requires = "vertex")]
        index: Option<usize>,
        /// JSON list of [source, target, edge] triples.
        #[arg(long, conflicts_with_all = ["vertex", "index"])]
        edges: Option<String>,
    },
    /// Telescope and write the result as an explicit diagram file.
    Telescope {
        file: PathBuf,
        /// Comma-separated cut levels starting at 0.
        #[arg(long, value_delimiter = ',', required_unless_present = "every")]
        cuts: Vec<usize>,
        /// Cut at every k-th level.
        #[arg(long, conflicts_with = "cuts")]
        every: Option<usize>,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Search for products of incidence matrices that are strictly positive.
    Simple {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
    /// Search for a telescoping with even multiplicities >= 2.
    EvenTelescope {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        bound: usize,
    },
    /// Graphviz DOT rendering of the first levels.
    Dot {
        file: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// One labelled edge per bundle instead of one edge per multiplicity.
        #[arg(long)]
        collapse_multiedges: bool,
    },
}

#[derive(Args)]
pub struct DiagramArg {
    #[arg(long)]
    diagram: PathBuf,
}

#[derive(Subcommand)]
pub enum MeasureCmd {
    /// Check a measure file against a diagram.
    Validate {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        measure: PathBuf,
    },
    /// Weights of the built-in measure.
    Builtin {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Measure of a clopen set.
    Of {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        set: PathBuf,
        /// Measure file; the built-in measure when absent.
        #[arg(long)]
        measure: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum GroupCmd {
    /// g ∘ h (apply h first).
    Compose {
        #[command(flatten)]
        d: DiagramArg,
        g: PathBuf,
        h: PathBuf,
    },
    /// Fixed-point set.
    Fix {
        #[command(flatten)]
        d: DiagramArg,
        g: PathBuf,
    },
    /// Support (complement of the fixed-point set).
    Support {
        #[command(flatten)]
        d: DiagramArg,
        g: PathBuf,
    },
    /// Cycle types and periods per vertex.
    Cycles {
        #[command(flatten)]
        d: DiagramArg,
        g: PathBuf,
    },
    /// Conjugator q with q g q⁻¹ = h at a level.
    Conjugate {
        #[command(flatten)]
        d: DiagramArg,
        g: PathBuf,
        h: PathBuf,
        #[arg(long)]
        level: Option<usize>,
    },
    /// The involution swapping edge n+1 inside each bundle below a set.
    Hn {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        level: usize,
    },
    /// Two p-cycles whose quotient has only even cycles.
    Claim1 {
        #[arg(long)]
        p: usize,
    },
    /// The 2^r conjugates s_a of an element.
    SiFamily {
        #[command(flatten)]
        d: DiagramArg,
        s: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value = "1/2")]
        eps: String,
        /// Check the three properties against the built-in measure.
        #[arg(long)]
        verify: bool,
    },
    /// d(g, h) = max over measures of μ(supp(g⁻¹h)).
    Metric {
        #[command(flatten)]
        d: DiagramArg,
        g: PathBuf,
        h: PathBuf,
        /// Measure files; the built-in measure when absent.
        #[arg(long)]
        measure: Vec<PathBuf>,
    },
}

#[derive(Args)]
pub struct CharArgs {
    #[arg(long)]
    diagram: PathBuf,
    #[arg(long)]
    character: PathBuf,
}

#[derive(Subcommand)]
pub enum CharCmd {
    /// χ(g).
    Eval {
        #[command(flatten)]
        c: CharArgs,
        #[arg(long)]
        element: PathBuf,
    },
    /// tr(P^A) for a clopen set A.
    Trace {
        #[command(flatten)]
        c: CharArgs,
        #[arg(long)]
        set: PathBuf,
    },
    /// Gram matrix χ(g_i g_j⁻¹).
    Gram {
        #[command(flatten)]
        c: CharArgs,
        #[arg(long = "element", required = true)]
        elements: Vec<PathBuf>,
    },
    /// Positive-semidefiniteness of a matrix file; exit 1 with a witness
    /// when it fails.
    Psd {
        matrix: PathBuf,
        /// Tolerance of the floating-point check (used with --float).
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// χ(gh) = χ(hg) on all pairs.
    Central {
        #[command(flatten)]
        c: CharArgs,
        #[arg(long = "element", required = true)]
        elements: Vec<PathBuf>,
    },
    /// Asymptotic multiplicativity χ(g h_n) against χ(g) ∏ c_i^{α_i}.
    Mult {
        #[command(flatten)]
        c: CharArgs,
        #[arg(long)]
        element: PathBuf,
        /// One target fraction per character term.
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<String>,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
        #[arg(long, default_value = "0")]
        tolerance: String,
    },
    /// χ(h_n) against tr(P^A).
    ProjLimit {
        #[command(flatten)]
        c: CharArgs,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        from: usize,
        #[arg(long)]
        to: usize,
    },
}

#[derive(Subcommand)]
pub enum RpermCmd {
    /// Periodic embedding into n·m blocks.
    Refine {
        /// Images of 0..n-1, comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
        #[arg(long)]
        m: usize,
    },
    /// g ∘ h at the lcm of the denominators.
    Compose {
        #[arg(long, value_delimiter = ',', required = true)]
        g: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<usize>,
    },
    /// Lebesgue measure of the fixed set.
    Fix {
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
    },
    /// χ_k(g) = λ(Fix g)^k; k may be "inf".
    Char {
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
        #[arg(long)]
        k: String,
    },
    /// Rational permutation of an element of the B_R diagram.
    FromBr {
        #[command(flatten)]
        d: DiagramArg,
        #[arg(long)]
        element: PathBuf,
        /// Level at which to read the element (default: its own level).
        #[arg(long)]
        level: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = commands::run(cli.command, cli.float);
    match out {
        Ok(commands::Output::Json(value)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            ExitCode::SUCCESS
        }
        Ok(commands::Output::Text(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(commands::Failure::Verdict(value)) => {
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
            ExitCode::from(1)
        }
        Err(commands::Failure::Domain(e)) => {
            eprintln!("error[{}]: {e}", e.name());
            ExitCode::from(1)
        }
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
