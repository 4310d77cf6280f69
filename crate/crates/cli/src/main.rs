//! `stcode`: validate, construct and simulate storage codes, evaluate
//! bounds and play the kill/rebuild game.

mod codefile;
mod params;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use storage_codes::bounds::{BoundReport, Theorem1Case};
use storage_codes::code::{CodeParams, StorageCode};
use storage_codes::constructions::{
    example1, example3_initial, example3_spec, parity_code, rbt_mbr, repetition_code,
    RepetitionVariant,
};
use storage_codes::flowgame::{verify_theorem, GameCase, DEFAULT_MEMO_CAP};
use storage_codes::record::Record;
use storage_codes::sim::{
    encode, encode_functional, random_message, random_script, run_scenario, ScenarioSummary,
    SimError, TraceEvent,
};
use storage_codes::Error;

use codefile::{check_declared, CodeFile, Declared, LoadError, Loaded};
use params::Params;

#[derive(Debug, Parser)]
#[command(
    name = "stcode",
    version,
    about = "Linear storage codes over GF(2): repair, simulation, bounds, games"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Where to write the main artifact (code file, trace or report).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Game rounds to search; defaults to 2n.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Failure rounds to simulate.
    #[arg(long, global = true, default_value_t = 100)]
    rounds: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Overrides search caps (subspace enumeration, game memo).
    #[arg(long, global = true, env = "STORAGECODE_CAP")]
    cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    RecordStream,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a code file and print its parameter profile.
    Validate { path: PathBuf },
    /// Write a bundled construction as a code file.
    Construct {
        #[arg(value_enum)]
        name: Construction,
        /// `key=value` parameters, e.g. `n=4`.
        params: Vec<String>,
    },
    /// Run a seeded random failure/repair/collect scenario.
    Simulate { path: PathBuf },
    /// Evaluate a closed-form bound.
    Bound {
        #[arg(value_enum)]
        name: BoundName,
        params: Vec<String>,
    },
    /// Search the kill/rebuild game and compare with a bound.
    Game {
        #[arg(long)]
        case: String,
        params: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    Example1,
    RbtMbr,
    Repetition,
    Parity,
    Example3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundName {
    Cutset,
    Msr,
    Mbr,
    LrcLinear,
    InfoDistance,
    Theorem1,
    Theorem2,
}

/// A failed command and the exit status it maps to.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    Invalid(Vec<String>),
    Simulation(String),
    Cap(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 3,
            Failure::Invalid(_) => 4,
            Failure::Simulation(_) => 5,
            Failure::Cap(_) => 6,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            Error::InvalidCode(v) | Error::InvalidPlan(v) => Failure::Invalid(v),
            Error::DeclaredMismatch(m) => Failure::Invalid(vec![m]),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Parse(m) => Failure::Parse(m),
            LoadError::Invalid(v) => Failure::Invalid(v),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Code(inner) => inner.into(),
            other => Failure::Simulation(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(v) => {
                    for line in v {
                        eprintln!("violation: {line}");
                    }
                }
                Failure::Usage(m)
                | Failure::Parse(m)
                | Failure::Simulation(m)
                | Failure::Cap(m) => {
                    eprintln!("error: {m}")
                }
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Validate { path } => cmd_validate(cli, path),
        Command::Construct { name, params } => cmd_construct(cli, *name, &Params::parse(params)?),
        Command::Simulate { path } => cmd_simulate(cli, path),
        Command::Bound { name, params } => cmd_bound(cli, *name, &Params::parse(params)?),
        Command::Game { case, params } => cmd_game(cli, case, &Params::parse(params)?),
    }
}

fn render(cli: &Cli, rec: &Record) -> String {
    match cli.format {
        Format::Text => rec.to_string(),
        Format::RecordStream => rec.to_json_line(),
    }
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Prints to stdout, or to `--output` when given.
fn emit(cli: &Cli, text: &str) -> CmdResult {
    match &cli.output {
        Some(p) => write_file(p, &format!("{text}\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load(path: &Path) -> Result<(CodeFile, Loaded), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file = CodeFile::parse(&text).map_err(|e| match e {
        LoadError::Parse(m) => Failure::Parse(format!("{}: {m}", path.display())),
        other => other.into(),
    })?;
    let loaded = file.load()?;
    Ok((file, loaded))
}

fn with_cap(cli: &Cli, code: StorageCode) -> StorageCode {
    match cli.cap {
        Some(c) => code.with_search_cap(c as u128),
        None => code,
    }
}

fn profile(file: &CodeFile, loaded: &Loaded, cli: &Cli) -> Result<CodeParams, Failure> {
    let beta = file.declared.map_or(1, |d| d.beta);
    let params = match loaded {
        Loaded::Exact { code, .. } => {
            with_cap(cli, code.clone()).params(beta)?.ok_or_else(|| {
                Failure::Invalid(vec![format!(
                    "some node cannot be repaired with beta = {beta}"
                )])
            })?
        }
        Loaded::Functional { spec, bases } => {
            let initial = StorageCode::unchecked(spec.ambient_dim, spec.node_dim, bases.clone())?;
            // every survivor sends one block of beta symbols
            CodeParams {
                m: spec.ambient_dim,
                n: spec.node_count,
                k: initial.recovery_dimension(),
                r: spec.node_count - 1,
                alpha: spec.node_dim,
                beta: spec.beta,
            }
        }
    };
    let mismatch = check_declared(file.declared, &params);
    if !mismatch.is_empty() {
        return Err(Failure::Invalid(mismatch));
    }
    Ok(params)
}

fn cmd_validate(cli: &Cli, path: &Path) -> CmdResult {
    let (file, loaded) = load(path)?;
    let p = profile(&file, &loaded, cli)?;
    let rate = p.rate();
    let overhead = (rate.recip() - 1).to_string();
    let text = match cli.format {
        Format::Text => format!("{}: {p}, rate {rate}, overhead {overhead}", file.name),
        Format::RecordStream => Record::new()
            .with("name", file.name.as_str())
            .with(
                "mode",
                if matches!(loaded, Loaded::Functional { .. }) {
                    "functional"
                } else {
                    "exact"
                },
            )
            .with("m", p.m)
            .with("n", p.n)
            .with("k", p.k)
            .with("r", p.r)
            .with("alpha", p.alpha)
            .with("beta", p.beta)
            .with("rate", rate.to_string())
            .with("overhead", overhead)
            .to_json_line(),
    };
    emit(cli, &text)
}

fn cmd_construct(cli: &Cli, name: Construction, params: &Params) -> CmdResult {
    let file = match name {
        Construction::Example1 => {
            params.only(&[])?;
            CodeFile::from_named(&example1())
        }
        Construction::RbtMbr => {
            params.only(&["n"])?;
            CodeFile::from_named(&rbt_mbr(params.required("n")?)?)
        }
        Construction::Parity => {
            params.only(&["r"])?;
            CodeFile::from_named(&parity_code(params.required("r")?)?)
        }
        Construction::Repetition => {
            params.only(&["n", "r", "alpha", "variant"])?;
            let variant = match params.text("variant").unwrap_or("split") {
                "split" => RepetitionVariant::Split,
                "copy" => RepetitionVariant::Copy,
                other => return Err(Failure::Usage(format!("unknown variant {other:?}"))),
            };
            let r: usize = params.required("r")?;
            let alpha = params.optional("alpha")?.unwrap_or(r);
            CodeFile::from_named(&repetition_code(params.required("n")?, r, alpha, variant)?)
        }
        Construction::Example3 => {
            params.only(&[])?;
            let declared = Declared {
                k: 3,
                r: 3,
                beta: 1,
            };
            CodeFile::from_functional(&example3_spec(), &example3_initial(), declared)
        }
    };
    let text = file.to_toml();
    match &cli.output {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_simulate(cli: &Cli, path: &Path) -> CmdResult {
    let (file, loaded) = load(path)?;
    let p = profile(&file, &loaded, cli)?;
    let x = random_message(p.m, cli.seed);
    let mut state = match loaded {
        Loaded::Exact { code, plans } => {
            let code = with_cap(cli, code);
            let plans = match plans {
                Some(p) => p,
                None => code.canonical_repair_plans(p.beta)?.ok_or_else(|| {
                    Failure::Invalid(vec!["code has no repair plans".to_string()])
                })?,
            };
            encode(&code, &x)?.with_repair_plans(plans)?
        }
        Loaded::Functional { spec, bases } => encode_functional(&spec, bases, &x)?,
    };
    let script = random_script(p.n, cli.rounds, cli.seed);
    let result = run_scenario(&mut state, &script, cli.seed);
    // the trace up to the failure is still written
    let trace: Vec<TraceEvent> = state.trace().to_vec();
    if let Some(out) = &cli.output {
        let lines: String = trace
            .iter()
            .map(|ev| render(cli, &ev.to_record()) + "\n")
            .collect();
        write_file(out, &lines)?;
    }
    result?;
    let summary = ScenarioSummary::of(&trace);
    let mut rec = Record::new()
        .with("name", file.name.as_str())
        .with("seed", cli.seed)
        .with("rounds", cli.rounds);
    for (k, v) in summary.to_record().fields() {
        rec.push(k, v.clone());
    }
    rec.push("final_epoch", state.epoch());
    println!("{}", render(cli, &rec));
    Ok(())
}

fn cmd_bound(cli: &Cli, name: BoundName, params: &Params) -> CmdResult {
    let report = match name {
        BoundName::Cutset => {
            params.only(&["k", "r", "alpha", "beta"])?;
            BoundReport::cutset(
                params.required("k")?,
                params.required("r")?,
                params.required("alpha")?,
                params.required("beta")?,
            )?
        }
        BoundName::Msr => {
            params.only(&["k", "r", "beta"])?;
            BoundReport::msr(
                params.required("k")?,
                params.required("r")?,
                params.required("beta")?,
            )?
        }
        BoundName::Mbr => {
            params.only(&["k", "r", "beta"])?;
            BoundReport::mbr(
                params.required("k")?,
                params.required("r")?,
                params.required("beta")?,
            )?
        }
        BoundName::LrcLinear => {
            params.only(&["k", "r", "d"])?;
            BoundReport::lrc_linear(
                params.required("k")?,
                params.required("r")?,
                params.required("d")?,
            )?
        }
        BoundName::InfoDistance => {
            params.only(&["n", "m", "r", "alpha"])?;
            BoundReport::info_distance(
                params.required("n")?,
                params.required("m")?,
                params.required("r")?,
                params.required("alpha")?,
            )?
        }
        BoundName::Theorem1 => {
            params.only(&["case", "n", "r", "alpha"])?;
            let case = match params.text("case") {
                Some("alpha-eq-beta") => Theorem1Case::AlphaEqBeta,
                Some("alpha-eq-r-beta") => Theorem1Case::AlphaEqRBeta,
                other => {
                    return Err(Failure::Usage(format!(
                        "theorem1 needs case=alpha-eq-beta|alpha-eq-r-beta, got {other:?}"
                    )))
                }
            };
            BoundReport::theorem1(
                case,
                params.required("n")?,
                params.required("r")?,
                params.required("alpha")?,
            )?
        }
        BoundName::Theorem2 => {
            params.only(&["n", "alpha", "beta"])?;
            BoundReport::theorem2(
                params.required("n")?,
                params.required("alpha")?,
                params.required("beta")?,
            )?
        }
    };
    emit(cli, &render(cli, &report.to_record()))
}

fn cmd_game(cli: &Cli, case: &str, params: &Params) -> CmdResult {
    let case: GameCase = case.parse()?;
    params.only(&["n", "r", "alpha", "beta"])?;
    let n: usize = params.required("n")?;
    let r: usize = match case {
        GameCase::LocalityTwo => params.optional("r")?.unwrap_or(2),
        _ => params.required("r")?,
    };
    let alpha: u64 = params.required("alpha")?;
    let beta: u64 = match (case, params.optional("beta")?) {
        (_, Some(b)) => b,
        (GameCase::AlphaEqBeta, None) => alpha,
        (GameCase::AlphaEqRBeta, None) if r > 0 && alpha.is_multiple_of(r as u64) => {
            alpha / r as u64
        }
        _ => return Err(Failure::Usage("beta is required".to_string())),
    };
    let horizon = cli.horizon.unwrap_or(2 * n);
    let cap = cli.cap.map_or(DEFAULT_MEMO_CAP, |c| c as usize);
    let report = verify_theorem(case, n, r, alpha, beta, horizon, cap)?;
    emit(cli, &render(cli, &report.to_record()))?;
    if report.game.capped {
        return Err(Failure::Cap(format!(
            "memo cap reached after {} of {} rounds; value {} is still an upper bound",
            report.game.horizon, horizon, report.game.value
        )));
    }
    if report.verdict() == "violated" {
        return Err(Failure::Simulation(format!(
            "game value {} exceeds the bound {}",
            report.game.value, report.formula
        )));
    }
    Ok(())
}
