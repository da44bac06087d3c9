//! Command-line interface for building frames, representing states and
//! measurements, and running the no-go audits.
//!
//! Exit codes: 0 success, 2 unsupported input, 3 validation error,
//! 4 assertion failure.

mod demo;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use qframe_core::frames::{
    canonical_dual, diagonal_frame, sic_qubit_frame, verify_duality, wootters_frame, Frame,
};
use qframe_core::io::{
    self, load_frame_file, load_povm, read_json, save_dual, save_frame, save_search_result,
    to_json_string, DistributionJson, LoadedFrame, OperatorJson, PovmJson, ResponsesJson,
};
use qframe_core::nogo::{
    negativity_minimizer, positivity_audit, trichotomy_audit, two_basis_contradiction,
    OptimizerConfig, TrichotomyAudit, TwoBasisOutcome, WitnessConfig,
};
use qframe_core::opalg::{DensityOperator, Povm};
use qframe_core::repr::{negativity, represent_povm, represent_state, NegativityReport};
use qframe_core::{tol, Error};

#[derive(Parser)]
#[command(
    name = "qframe",
    version,
    about = "Operator frames, quasiprobability representations, and no-go audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a built-in frame with its dual and write both to JSON files.
    Frame {
        #[command(subcommand)]
        command: FrameCommand,
    },
    /// Represent a state or POVM file in a frame or dual file.
    Repr(ReprArgs),
    /// No-go operations: contradiction witness, negativity search, audit.
    Nogo {
        #[command(subcommand)]
        command: NogoCommand,
    },
    /// Run the end-to-end demonstration.
    Demo(DemoArgs),
}

#[derive(Subcommand)]
enum FrameCommand {
    /// Construct a named frame family at a given dimension.
    Build(FrameBuildArgs),
}

#[derive(Args)]
struct FrameBuildArgs {
    /// Frame family to construct.
    #[arg(long, value_enum)]
    kind: FrameKind,
    /// Hilbert space dimension.
    #[arg(long)]
    dim: usize,
    /// Output path for the frame file (default <kind>_d<dim>_frame.json).
    #[arg(long)]
    frame_out: Option<PathBuf>,
    /// Output path for the dual file (default <kind>_d<dim>_dual.json).
    #[arg(long)]
    dual_out: Option<PathBuf>,
}

#[derive(Debug, Copy, Clone, ValueEnum)]
enum FrameKind {
    /// Phase-point frame (dimension 2 or an odd prime).
    Wootters,
    /// Tetrahedral positive frame (dimension 2).
    Sic,
    /// Computational-basis projector frame (any dimension).
    Diagonal,
}

#[derive(Args)]
struct ReprArgs {
    /// State (operator JSON) or POVM (outcomes list) file.
    #[arg(long)]
    input: PathBuf,
    /// Frame file: kind "frame" represents states, kind "dual" POVMs.
    #[arg(long)]
    frame: PathBuf,
    /// Write the distribution or response table here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format for the distribution or response table.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

#[derive(Debug, Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum NogoCommand {
    /// Audit the premises of the two-measurement argument and exhibit a
    /// proportionality witness if they all pass.
    Witness(WitnessArgs),
    /// Search for a simultaneously positive exact-dual pair.
    Search(SearchArgs),
    /// Audit one frame/dual pair against the three clauses.
    Audit(AuditArgs),
}

#[derive(Args)]
struct WitnessArgs {
    /// Frame file (kind "frame").
    #[arg(long)]
    frame: PathBuf,
    /// Dual file (kind "dual").
    #[arg(long)]
    dual: PathBuf,
    /// Rank-1 PVM file; defaults to the computational basis.
    #[arg(long)]
    pvm_a: Option<PathBuf>,
    /// Rank-1 PVM file; defaults to the Fourier basis.
    #[arg(long)]
    pvm_b: Option<PathBuf>,
    /// Response value above which an ontic state counts as supported.
    #[arg(long, default_value_t = tol::SUPPORT)]
    support_tol: f64,
    /// Proportionality residual above which a witness is accepted.
    #[arg(long, default_value_t = tol::WITNESS)]
    witness_tol: f64,
    /// Maximum duality residual accepted by the premise audit.
    #[arg(long, default_value_t = tol::DUAL)]
    duality_tol: f64,
    /// Most negative eigenvalue accepted by the premise audit.
    #[arg(long, default_value_t = tol::POS)]
    positivity_tol: f64,
}

#[derive(Args)]
struct SearchArgs {
    /// Hilbert space dimension.
    #[arg(long)]
    dim: usize,
    /// Number of ontic states (at least dim squared).
    #[arg(long)]
    ontic: usize,
    /// Optimizer configuration JSON; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long = "iters")]
    iterations: Option<usize>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long, env = "QFRAME_SEED")]
    seed: Option<u64>,
    /// Output path for the search result JSON.
    #[arg(long, default_value = "search_result.json")]
    output: PathBuf,
}

#[derive(Args)]
struct AuditArgs {
    /// Frame file (kind "frame").
    #[arg(long)]
    frame: PathBuf,
    /// Dual file (kind "dual").
    #[arg(long)]
    dual: PathBuf,
}

#[derive(Args)]
struct DemoArgs {
    /// Tolerance for the demo's fixture and recovery assertions.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for the randomized demo stages.
    #[arg(long, env = "QFRAME_SEED", default_value_t = 0)]
    seed: u64,
}

/// Failure carrying the process exit code.
pub(crate) struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    pub(crate) fn validation(message: String) -> Self {
        Self { code: 3, message }
    }

    pub(crate) fn assertion(message: String) -> Self {
        Self { code: 4, message }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnsupportedDimension { .. } => 2,
            Error::NoWitnessFound => 4,
            _ => 3,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Frame {
            command: FrameCommand::Build(args),
        } => cmd_frame_build(args),
        Command::Repr(args) => cmd_repr(args),
        Command::Nogo { command } => match command {
            NogoCommand::Witness(args) => cmd_nogo_witness(args),
            NogoCommand::Search(args) => cmd_nogo_search(args),
            NogoCommand::Audit(args) => cmd_nogo_audit(args),
        },
        Command::Demo(args) => demo::run(args.tol, args.seed),
    };
    match outcome {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn require_frame(loaded: LoadedFrame, path: &Path) -> Result<Frame, CliError> {
    match loaded {
        LoadedFrame::Frame(f) => Ok(f),
        LoadedFrame::Dual(_) => Err(CliError::validation(format!(
            "{} has kind \"dual\" but this position requires kind \"frame\"",
            path.display()
        ))),
    }
}

fn require_dual(
    loaded: LoadedFrame,
    path: &Path,
) -> Result<qframe_core::frames::DualFrame, CliError> {
    match loaded {
        LoadedFrame::Dual(g) => Ok(g),
        LoadedFrame::Frame(_) => Err(CliError::validation(format!(
            "{} has kind \"frame\" but this position requires kind \"dual\"",
            path.display()
        ))),
    }
}

fn cmd_frame_build(args: FrameBuildArgs) -> Result<(), CliError> {
    let (frame, dual, stem) = match args.kind {
        FrameKind::Wootters => {
            let (f, g) = wootters_frame(args.dim)?;
            (f, g, "wootters")
        }
        FrameKind::Sic => {
            if args.dim != 2 {
                return Err(Error::UnsupportedDimension {
                    dim: args.dim,
                    reason: "the tetrahedral frame is defined for dimension 2 only".into(),
                }
                .into());
            }
            let f = sic_qubit_frame()?;
            let g = canonical_dual(&f)?;
            (f, g, "sic")
        }
        FrameKind::Diagonal => {
            let (f, g) = diagonal_frame(args.dim)?;
            (f, g, "diagonal")
        }
    };
    let frame_path = args
        .frame_out
        .unwrap_or_else(|| PathBuf::from(format!("{stem}_d{}_frame.json", args.dim)));
    let dual_path = args
        .dual_out
        .unwrap_or_else(|| PathBuf::from(format!("{stem}_d{}_dual.json", args.dim)));
    save_frame(&frame_path, &frame)?;
    save_dual(&dual_path, &dual)?;
    println!(
        "wrote {} and {}",
        frame_path.display(),
        dual_path.display()
    );

    let audit = positivity_audit(&frame, &dual)?;
    println!("min frame eigenvalue: {:.6}", audit.min_frame_eigenvalue);
    println!("min dual eigenvalue: {:.6}", audit.min_dual_eigenvalue);
    if !audit.offending_frame_labels.is_empty() {
        println!(
            "frame elements below -{:.0e}: {}",
            tol::POS,
            audit.offending_frame_labels.join(", ")
        );
    }
    if !audit.offending_dual_labels.is_empty() {
        println!(
            "dual elements below -{:.0e}: {}",
            tol::POS,
            audit.offending_dual_labels.join(", ")
        );
    }
    let residual = verify_duality(&frame, &dual)?;
    if residual > tol::DUAL {
        println!(
            "warning: the pair is not exactly dual (duality residual {residual:.6})"
        );
    } else {
        println!("duality residual: {residual:.3e}");
    }
    Ok(())
}

fn emit_data(output: &Option<PathBuf>, data: &str) -> Result<(), CliError> {
    match output {
        Some(path) => {
            io::write_text(path, data)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn cmd_repr(args: ReprArgs) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.input).map_err(|e| Error::Io {
        path: args.input.display().to_string(),
        message: e.to_string(),
    })?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        message: e.to_string(),
    })?;
    let loaded = load_frame_file(&args.frame)?;

    if value.get("outcomes").is_some() {
        let povm_json: PovmJson = serde_json::from_value(value).map_err(|e| Error::Parse {
            message: e.to_string(),
        })?;
        let povm = povm_json.to_povm()?;
        let dual = require_dual(loaded, &args.frame)?;
        let resp = represent_povm(&povm, &dual)?;
        let data = match args.format {
            OutputFormat::Csv => io::responses_csv(&resp)?,
            OutputFormat::Json => to_json_string(&ResponsesJson::from_responses(&resp))?,
        };
        emit_data(&args.output, &data)?;
        let reports: Vec<NegativityReport> = resp
            .rows()
            .iter()
            .map(|row| negativity(row, resp.space()))
            .collect::<qframe_core::Result<_>>()?;
        print!("{}", to_json_string(&reports)?);
    } else if value.get("re").is_some() {
        let op_json: OperatorJson = serde_json::from_value(value).map_err(|e| Error::Parse {
            message: e.to_string(),
        })?;
        let rho = DensityOperator::new(op_json.to_operator()?)?;
        let frame = require_frame(loaded, &args.frame)?;
        let mu = represent_state(&rho, &frame)?;
        let data = match args.format {
            OutputFormat::Csv => io::distribution_csv(&mu)?,
            OutputFormat::Json => to_json_string(&DistributionJson::from_distribution(&mu))?,
        };
        emit_data(&args.output, &data)?;
        let report = negativity(mu.values(), mu.space())?;
        print!("{}", to_json_string(&report)?);
    } else {
        return Err(CliError::validation(format!(
            "{} is neither an operator file (key \"re\") nor a POVM file (key \"outcomes\")",
            args.input.display()
        )));
    }
    Ok(())
}

fn cmd_nogo_witness(args: WitnessArgs) -> Result<(), CliError> {
    let frame = require_frame(load_frame_file(&args.frame)?, &args.frame)?;
    let dual = require_dual(load_frame_file(&args.dual)?, &args.dual)?;
    let pvm_a = match &args.pvm_a {
        Some(path) => load_povm(path)?,
        None => Povm::computational(frame.dim())?,
    };
    let pvm_b = match &args.pvm_b {
        Some(path) => load_povm(path)?,
        None => Povm::fourier(frame.dim())?,
    };
    let config = WitnessConfig {
        support_tol: args.support_tol,
        witness_tol: args.witness_tol,
        duality_tol: args.duality_tol,
        positivity_tol: args.positivity_tol,
    };
    match two_basis_contradiction(&frame, &dual, &pvm_a, &pvm_b, &config)? {
        TwoBasisOutcome::PremiseFailure(p) => {
            println!("premise failure: {p}");
        }
        TwoBasisOutcome::Witness(w) => {
            println!("contradiction witness at ontic label {:?}", w.label);
            println!(
                "  outcome {} of measurement A: proportionality residual {:.6}",
                w.effect_a_index, w.proportionality_residual_a
            );
            println!(
                "  outcome {} of measurement B: proportionality residual {:.6}",
                w.effect_b_index, w.proportionality_residual_b
            );
        }
    }
    Ok(())
}

fn cmd_nogo_search(args: SearchArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => read_json::<OptimizerConfig, _>(path)?,
        None => OptimizerConfig::default(),
    };
    if let Some(v) = args.restarts {
        config.restarts = v;
    }
    if let Some(v) = args.iterations {
        config.iterations = v;
    }
    if let Some(v) = args.step {
        config.step = v;
    }
    if let Some(v) = args.penalty {
        config.penalty = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    let result = negativity_minimizer(args.dim, args.ontic, &config)?;
    let mut all_hold = true;
    for (i, point) in result.restart_trace.iter().enumerate() {
        let holds = point.total_negativity > tol::POS || point.duality_residual > tol::DUAL;
        all_hold &= holds;
        println!(
            "restart {i}: negativity={:.6} residual={:.3e} trichotomy {}",
            point.total_negativity,
            point.duality_residual,
            if holds { "holds" } else { "COUNTEREXAMPLE" }
        );
    }
    println!(
        "best pair: negativity={:.6} residual={:.3e}",
        result.best_total_negativity, result.duality_residual
    );
    save_search_result(&args.output, &result)?;
    println!("wrote {}", args.output.display());
    if !all_hold {
        return Err(CliError::assertion(
            "a restart reported a simultaneously positive exact-dual pair".into(),
        ));
    }
    Ok(())
}

fn clause_summary(audit: &TrichotomyAudit) -> String {
    let mut letters = String::new();
    let mut details = Vec::new();
    if !audit.frame_positive {
        letters.push_str("(a)");
        details.push(format!(
            "frame eigenvalue {:.6}",
            audit.min_frame_eigenvalue
        ));
    }
    if !audit.dual_positive {
        letters.push_str("(b)");
        details.push(format!("dual eigenvalue {:.6}", audit.min_dual_eigenvalue));
    }
    if !audit.duality_holds {
        letters.push_str("(c)");
        details.push(format!("duality residual {:.6}", audit.duality_residual));
    }
    format!("verdict {letters}: {}", details.join(", "))
}

fn cmd_nogo_audit(args: AuditArgs) -> Result<(), CliError> {
    let frame = require_frame(load_frame_file(&args.frame)?, &args.frame)?;
    let dual = require_dual(load_frame_file(&args.dual)?, &args.dual)?;
    let audit = trichotomy_audit(frame.ops(), dual.ops())?;
    println!(
        "(a) frame positivity: min eigenvalue {:.6} -> {}",
        audit.min_frame_eigenvalue,
        if audit.frame_positive { "ok" } else { "violated" }
    );
    println!(
        "(b) dual positivity: min eigenvalue {:.6} -> {}",
        audit.min_dual_eigenvalue,
        if audit.dual_positive { "ok" } else { "violated" }
    );
    println!(
        "(c) duality: residual {:.6} -> {}",
        audit.duality_residual,
        if audit.duality_holds { "ok" } else { "violated" }
    );
    if audit.holds() {
        println!("{}", clause_summary(&audit));
        Ok(())
    } else {
        println!("counterexample: all three clauses hold simultaneously");
        Err(CliError::assertion(
            "pair is simultaneously positive and exactly dual".into(),
        ))
    }
}
