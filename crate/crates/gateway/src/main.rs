//! `lmui`: serve the HTTP API, parse one utterance, validate a manifest or
//! score a corpus.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lmui_core::engine::BuildError;
use lmui_core::eval::{parse_corpus, run_pipeline_eval, score, EvalReport};
use lmui_core::tree::DEFAULT_AMBIGUITY_THRESHOLD;
use lmui_core::{Engine, EngineBuilder, EngineError};
use tracing_subscriber::EnvFilter;

/// Usage error (sysexits `EX_USAGE`).
const EXIT_USAGE: u8 = 64;
/// Input data malformed (`EX_DATAERR`).
const EXIT_DATA: u8 = 65;
/// Input file missing or unreadable (`EX_NOINPUT`).
const EXIT_NO_INPUT: u8 = 66;
/// Remote backend down (`EX_UNAVAILABLE`).
const EXIT_UNAVAILABLE: u8 = 69;
/// Every parameter came back empty.
const EXIT_CLARIFY: u8 = 2;

#[derive(Parser)]
#[command(name = "lmui", version, about = "Natural-language UI control engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct EngineArgs {
    /// Manifest JSON; the bundled three-app manifest when omitted.
    #[arg(long, env = "LMUI_MANIFEST")]
    manifest: Option<PathBuf>,
    /// WordPiece vocabulary, one token per line.
    #[arg(long, env = "LMUI_VOCAB")]
    vocab: Option<PathBuf>,
    /// Pattern lexicon JSON for the rule extractors.
    #[arg(long, env = "LMUI_LEXICON")]
    lexicon: Option<PathBuf>,
    /// Base URL of a sentence-encoder service (`/info`, `/encode`).
    #[arg(long, env = "LMUI_REMOTE_ENCODER")]
    remote_encoder: Option<String>,
    /// Base URL of an extraction model service (`/extract`).
    #[arg(long, env = "LMUI_REMOTE_EXTRACTOR")]
    remote_extractor: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long, env = "LMUI_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "LMUI_HOST", default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Append every dispatched action to this NDJSON file, replaying it first.
        #[arg(long, env = "LMUI_LOG")]
        log: Option<PathBuf>,
    },
    /// Interpret one utterance and print the state patch.
    Parse {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        text: String,
    },
    /// Check a manifest and report sibling descriptions that are too similar.
    Validate {
        #[arg(long, env = "LMUI_MANIFEST")]
        manifest: PathBuf,
        #[arg(long, default_value_t = DEFAULT_AMBIGUITY_THRESHOLD)]
        threshold: f64,
    },
    /// Score a corpus, by running the pipeline or from a predictions file.
    Eval {
        #[command(flatten)]
        engine: EngineArgs,
        #[arg(long)]
        corpus: PathBuf,
        /// One produced answer per line, aligned with the corpus examples.
        #[arg(long)]
        predictions: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(EXIT_NO_INPUT, format!("{}: {e}", path.display())))
}

fn builder(args: &EngineArgs) -> Result<EngineBuilder, Failure> {
    let mut b = Engine::builder();
    if let Some(p) = &args.manifest {
        b = b.manifest(read(p)?);
    }
    if let Some(p) = &args.vocab {
        b = b.vocab(read(p)?);
    }
    if let Some(p) = &args.lexicon {
        b = b.lexicon(read(p)?);
    }
    if let Some(u) = &args.remote_encoder {
        b = b.remote_encoder(u.clone());
    }
    if let Some(u) = &args.remote_extractor {
        b = b.remote_extractor(u.clone());
    }
    Ok(b)
}

fn build(b: EngineBuilder) -> Result<Engine, Failure> {
    b.build().map_err(|e| match e {
        BuildError::Encoder(_) => fail(EXIT_UNAVAILABLE, e.to_string()),
        BuildError::Log { .. } => fail(EXIT_NO_INPUT, e.to_string()),
        _ => fail(EXIT_DATA, e.to_string()),
    })
}

fn serve(args: &EngineArgs, host: std::net::IpAddr, port: u16, log: Option<&Path>) -> Result<(), Failure> {
    let mut b = builder(args)?;
    let existing = match log {
        Some(path) if path.exists() => Some(read(path)?),
        _ => None,
    };
    if let Some(path) = log {
        b = b.action_log(path);
    }
    let engine = build(b)?;
    if let Some(text) = existing {
        // Replay before new appends land after the old entries.
        let n = engine
            .store()
            .replay(std::io::Cursor::new(text))
            .map_err(|e| fail(EXIT_DATA, e.to_string()))?;
        tracing::info!(entries = n, "replayed action log");
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| fail(1, e.to_string()))?;
    runtime.block_on(async move {
        let addr = SocketAddr::new(host, port);
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| fail(1, format!("bind {addr}: {e}")))?;
        tracing::info!(%addr, "listening");
        axum::serve(listener, lmui_gateway::router(Arc::new(engine)))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| fail(1, e.to_string()))
    })
}

fn parse(args: &EngineArgs, text: &str) -> Result<(), Failure> {
    if text.trim().is_empty() {
        return Err(fail(EXIT_USAGE, "--text is empty"));
    }
    let engine = build(builder(args)?)?;
    match engine.interpret(text) {
        Ok((_, patch)) => {
            println!("{}", patch.to_json());
            Ok(())
        }
        Err(EngineError::ClarificationNeeded { classification }) => Err(fail(
            EXIT_CLARIFY,
            format!(
                "clarification needed: nothing extracted for {} (score {:.3})",
                classification.app, classification.score
            ),
        )),
        Err(e @ (EngineError::EmptyUtterance | EngineError::NoContent)) => Err(fail(EXIT_USAGE, e.to_string())),
        Err(e @ EngineError::BackendUnavailable(_)) => Err(fail(EXIT_UNAVAILABLE, e.to_string())),
        Err(e) => Err(fail(1, e.to_string())),
    }
}

fn validate(manifest: &Path, threshold: f64) -> Result<(), Failure> {
    let bytes = read(manifest)?;
    let engine = Engine::builder()
        .manifest(bytes)
        .build()
        .map_err(|e| fail(1, format!("{}: {e}", manifest.display())))?;
    let tree = engine.tree();
    let pairs = tree
        .ambiguity_report(threshold)
        .map_err(|e| fail(1, e.to_string()))?;
    if pairs.is_empty() {
        let params: usize = tree.applications().iter().map(|a| a.children.len()).sum();
        println!(
            "ok: {} applications, {} parameters",
            tree.applications().len(),
            params
        );
        return Ok(());
    }
    for p in &pairs {
        eprintln!("ambiguous: {} and {} (similarity {:.3})", p.first, p.second, p.similarity);
    }
    Err(fail(1, format!("{} ambiguous sibling pair(s) above {threshold}", pairs.len())))
}

fn eval(args: &EngineArgs, corpus: &Path, predictions: Option<&Path>, format: Format) -> Result<(), Failure> {
    let examples = parse_corpus(&read(corpus)?).map_err(|e| fail(EXIT_DATA, format!("{}: {e}", corpus.display())))?;
    let report: EvalReport = match predictions {
        Some(path) => {
            let produced: Vec<String> = read(path)?.lines().map(str::to_string).collect();
            score(&examples, &produced).map_err(|e| fail(EXIT_DATA, e.to_string()))?
        }
        None => {
            let engine = build(builder(args)?)?;
            run_pipeline_eval(&engine, &examples).map_err(|e| fail(EXIT_UNAVAILABLE, e.to_string()))?
        }
    };
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("report serializes")
        ),
        Format::Table => print!("{}", report.render_table()),
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_env("LMUI_LOG_LEVEL").unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Serve { engine, port, host, log } => serve(engine, *host, *port, log.as_deref()),
        Command::Parse { engine, text } => parse(engine, text),
        Command::Validate { manifest, threshold } => validate(manifest, *threshold),
        Command::Eval {
            engine,
            corpus,
            predictions,
            format,
        } => eval(engine, corpus, predictions.as_deref(), *format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("lmui: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
