//! Command-line front end.
//!
//! Exit codes: 0 success, 1 compile error, 2 I/O, configuration or usage
//! error, 3 run timed out. `run` otherwise mirrors the program's own exit
//! status (128 + signal number when it was killed by a signal).

use std::fs;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::time::Duration;

use apl_core::SourceFile;
use clap::{Parser, Subcommand, ValueEnum};

use crate::facade::{CompileResponse, CompilerHandle, ErrorStage};
use crate::llm::LlmConfig;
use crate::runner::{Attachment, RunPolicy, RunResult};
use crate::service::{self, BackendChoice, ServiceConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPILE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Deterministic,
    Llm,
}

#[derive(Debug, Parser)]
#[command(name = "apl", version, about = "Compile and run Arabic-keyword programs via Python")]
pub struct Cli {
    /// Translation backend
    #[arg(long, value_enum, default_value = "deterministic", global = true)]
    pub backend: BackendArg,
    /// Wall-clock limit for program runs, in seconds
    #[arg(long, default_value_t = 10.0, global = true)]
    pub timeout: f64,
    /// Cache LLM replies in this directory
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate a source file to Python
    Compile {
        file: PathBuf,
        /// Output path (default: the input with a .py extension; "-" for stdout)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile and run a source file
    Run {
        file: PathBuf,
        /// Copy a .txt file into the program's working directory (repeatable)
        #[arg(long = "input-file", visible_alias = "attach", value_name = "FILE")]
        attachments: Vec<PathBuf>,
        /// Keep the run directory afterwards
        #[arg(long)]
        keep: bool,
    },
    /// Run a program through both backends and compare the results
    Diff {
        file: PathBuf,
        #[arg(long = "input-file", visible_alias = "attach", value_name = "FILE")]
        attachments: Vec<PathBuf>,
    },
    /// Serve the HTTP API used by the playground
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        #[arg(long, default_value_t = service::DEFAULT_MAX_CONCURRENCY)]
        max_concurrency: usize,
    },
    /// List the keyword table
    Keywords,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

type CliResult = Result<i32, Failure>;

pub fn run(cli: Cli) -> i32 {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .try_init();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("apl: {}", f.message);
            }
            f.code
        }
    }
}

fn dispatch(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Keywords => keywords(),
        Command::Compile { file, output } => compile(cli, file, output.as_deref()),
        Command::Run { file, attachments, keep } => run_file(cli, file, attachments, *keep),
        Command::Diff { file, attachments } => diff(cli, file, attachments),
        Command::Serve { bind, max_concurrency } => serve(cli, *bind, *max_concurrency),
    }
}

fn policy(cli: &Cli) -> Result<RunPolicy, Failure> {
    if !(cli.timeout.is_finite() && cli.timeout > 0.0) {
        return Err(Failure::usage("--timeout must be a positive number of seconds"));
    }
    let policy = RunPolicy::new()
        .map_err(|e| Failure::usage(e.to_string()))?
        .with_timeout(Duration::from_secs_f64(cli.timeout));
    Ok(policy)
}

fn llm_config(cli: &Cli) -> Result<LlmConfig, Failure> {
    let mut cfg = LlmConfig::from_env().map_err(|e| Failure::usage(e.to_string()))?;
    cfg.cache_dir = cli.cache_dir.clone();
    Ok(cfg)
}

fn handle(cli: &Cli, backend: BackendArg) -> Result<CompilerHandle, Failure> {
    let policy = policy(cli)?;
    match backend {
        BackendArg::Deterministic => Ok(CompilerHandle::deterministic(policy)),
        BackendArg::Llm => CompilerHandle::llm(llm_config(cli)?, policy).map_err(|e| Failure::usage(e.to_string())),
    }
}

fn read_source(path: &Path) -> Result<SourceFile, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    SourceFile::from_bytes(&bytes, path.display().to_string())
        .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_attachments(paths: &[PathBuf]) -> Result<Vec<Attachment>, Failure> {
    paths
        .iter()
        .map(|p| {
            let name = p
                .file_name()
                .and_then(|n| n.to_str())
                .ok_or_else(|| Failure::usage(format!("bad attachment path {}", p.display())))?;
            let content = fs::read(p).map_err(|e| Failure::usage(format!("cannot read {}: {e}", p.display())))?;
            let a = Attachment::new(name, content);
            a.validate().map_err(|e| Failure::usage(e.to_string()))?;
            Ok(a)
        })
        .collect()
}

fn report(origin: &str, resp: &CompileResponse) {
    for w in &resp.warnings {
        match &w.span {
            Some(s) => eprintln!("{origin}:{}:{}: warning: {}", s.line, s.col, w.message_en),
            None => eprintln!("{origin}: warning: {}", w.message_en),
        }
        eprintln!("    {}", w.message_ar);
    }
    if let Some(e) = &resp.error {
        let stage = stage_name(e.stage);
        match &e.span {
            Some(s) => eprintln!("{origin}:{}:{}: error[{stage}]: {}", s.line, s.col, e.message_en),
            None => eprintln!("{origin}: error[{stage}]: {}", e.message_en),
        }
        eprintln!("    {}", e.message_ar);
    }
}

fn keywords() -> CliResult {
    let table = apl_core::KeywordTable::standard();
    let width = table.entries().iter().map(|e| e.arabic.chars().count()).max().unwrap_or(0).max("arabic".len());
    let mut out = io::stdout().lock();
    let mut lines = vec![format!("{:<width$}  {}", "arabic", "python")];
    for e in table.entries() {
        let pad = width - e.arabic.chars().count();
        lines.push(format!("{}{}  {}", e.arabic, " ".repeat(pad), e.target));
    }
    for line in lines {
        writeln!(out, "{line}").map_err(|e| Failure::usage(e.to_string()))?;
    }
    Ok(EXIT_OK)
}

fn compile(cli: &Cli, file: &Path, output: Option<&Path>) -> CliResult {
    let source = read_source(file)?;
    let resp = handle(cli, cli.backend)?.compile(&source);
    report(&source.origin, &resp);
    let Some(text) = resp.target_text else {
        return Ok(EXIT_COMPILE);
    };
    let path = output.map(Path::to_path_buf).unwrap_or_else(|| file.with_extension("py"));
    if path == Path::new("-") {
        let mut out = io::stdout().lock();
        out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Failure::usage(e.to_string()))?;
    } else {
        fs::write(&path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

fn exit_status(result: &RunResult) -> i32 {
    if result.timed_out {
        return EXIT_TIMEOUT;
    }
    match (result.exit_code, result.signal) {
        (Some(code), _) => code,
        (None, Some(sig)) => 128 + sig,
        (None, None) => EXIT_USAGE,
    }
}

fn run_file(cli: &Cli, file: &Path, attachments: &[PathBuf], keep: bool) -> CliResult {
    let source = read_source(file)?;
    let attachments = read_attachments(attachments)?;
    let handle = handle(cli, cli.backend)?;
    let mut policy = handle.run_policy().clone();
    policy.keep = keep;
    let (resp, result) =
        handle.compile_and_run_with(&source, &attachments, &policy).map_err(|e| Failure::usage(e.to_string()))?;
    report(&source.origin, &resp);
    let Some(result) = result else {
        return Ok(EXIT_COMPILE);
    };
    io::stdout().write_all(result.stdout.as_bytes()).and_then(|_| io::stdout().flush()).ok();
    io::stderr().write_all(result.stderr.as_bytes()).ok();
    if result.stdout_truncated || result.stderr_truncated {
        eprintln!("apl: program output was truncated");
    }
    if let Some(dir) = &result.kept_dir {
        eprintln!("apl: run directory kept at {}", dir.display());
    }
    if result.timed_out {
        eprintln!("apl: program timed out after {}s", cli.timeout);
    }
    Ok(exit_status(&result))
}

/// Compiles and runs `source` with both backends. Each side either ran or
/// failed to compile; a compile failure on one side does not stop the other.
fn diff(cli: &Cli, file: &Path, attachments: &[PathBuf]) -> CliResult {
    let source = read_source(file)?;
    let attachments = read_attachments(attachments)?;
    let mut sides = Vec::new();
    for (name, backend) in [("deterministic", BackendArg::Deterministic), ("llm", BackendArg::Llm)] {
        let handle = handle(cli, backend)?;
        let (resp, result) =
            handle.compile_and_run(&source, &attachments).map_err(|e| Failure::usage(e.to_string()))?;
        report(&source.origin, &resp);
        sides.push((name, resp, result));
    }
    let mut text = String::new();
    for (name, resp, result) in &sides {
        let status = match (result, &resp.error) {
            (Some(r), _) => format!("exit {}", describe_exit(r)),
            (None, Some(e)) => format!("compile failed [{}]: {}", stage_name(e.stage), e.message_en),
            (None, None) => "compile failed".into(),
        };
        text.push_str(&format!("{:<15}{status}\n", format!("{name}:")));
    }
    let same = match (&sides[0].2, &sides[1].2) {
        (Some(det), Some(llm)) => {
            let same = det.stdout == llm.stdout && exit_status(det) == exit_status(llm);
            if det.stdout != llm.stdout {
                let d = similar::TextDiff::from_lines(&det.stdout, &llm.stdout);
                text.push_str(&d.unified_diff().header("deterministic", "llm").to_string());
            }
            same
        }
        _ => false,
    };
    text.push_str(if same { "outputs identical\n" } else { "outputs differ\n" });
    io::stdout().lock().write_all(text.as_bytes()).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(if same { EXIT_OK } else { EXIT_COMPILE })
}

fn stage_name(stage: ErrorStage) -> String {
    serde_json::to_value(stage).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn describe_exit(r: &RunResult) -> String {
    if r.timed_out {
        "timeout".into()
    } else {
        exit_status(r).to_string()
    }
}

fn serve(cli: &Cli, bind: SocketAddr, max_concurrency: usize) -> CliResult {
    let policy = policy(cli)?;
    let llm = match LlmConfig::from_env() {
        Ok(mut cfg) => {
            cfg.cache_dir = cli.cache_dir.clone();
            Some(CompilerHandle::llm(cfg, policy.clone()).map_err(|e| Failure::usage(e.to_string()))?)
        }
        Err(_) if cli.backend == BackendArg::Deterministic => None,
        Err(e) => return Err(Failure::usage(e.to_string())),
    };
    let config = ServiceConfig {
        deterministic: CompilerHandle::deterministic(policy),
        llm,
        default_backend: match cli.backend {
            BackendArg::Deterministic => BackendChoice::Deterministic,
            BackendArg::Llm => BackendChoice::Llm,
        },
        max_concurrency,
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::usage(e.to_string()))?;
    rt.block_on(service::serve(config, bind)).map_err(|e| Failure::usage(format!("serve {bind}: {e}")))?;
    Ok(EXIT_OK)
}
