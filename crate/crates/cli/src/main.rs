use std::net::SocketAddr;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use trustrep::sim::{emit_report, run_with_engine, ReportFormat, ScenarioConfig};
use trustrep::{Engine, EngineConfig, KnowledgeBase, Lexicon};
use trustrep_service::AppState;

#[derive(Parser)]
#[command(
    name = "trustrep",
    version,
    about = "Trust-weighted product review engine"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Run an attack scenario and write its report.
    Simulate(SimulateArgs),
}

#[derive(clap::Args)]
struct ServeArgs {
    #[arg(long, env = "TRUSTREP_LISTEN", default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Journal file; replayed on start and appended to. In memory when absent.
    #[arg(long, env = "TRUSTREP_JOURNAL")]
    journal: Option<PathBuf>,
    /// Sentiment lexicon; the bundled English lexicon when absent.
    #[arg(long, env = "TRUSTREP_LEXICON")]
    lexicon: Option<PathBuf>,
    #[arg(long, env = "TRUSTREP_BLACKLIST_TTL", default_value_t = 86_400)]
    blacklist_ttl: i64,
    #[arg(long, env = "TRUSTREP_DEFAULT_K", default_value_t = 6)]
    default_k: usize,
    /// Honor the x-trustrep-now request header as the clock.
    #[arg(long, env = "TRUSTREP_TEST_MODE")]
    test_mode: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
            Format::Table => ReportFormat::Table,
        }
    }
}

#[derive(clap::Args)]
struct SimulateArgs {
    /// Scenario file, TOML or JSON (by extension).
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

fn lexicon(path: Option<&PathBuf>) -> Result<Lexicon> {
    match path {
        Some(p) => {
            Lexicon::from_path(p).with_context(|| format!("loading lexicon {}", p.display()))
        }
        None => Ok(Lexicon::default_english()),
    }
}

async fn serve(args: ServeArgs) -> Result<()> {
    if args.blacklist_ttl <= 0 {
        bail!("--blacklist-ttl must be positive");
    }
    if !(trustrep::domain::MIN_SELECTION..=trustrep::domain::MAX_SELECTION)
        .contains(&args.default_k)
    {
        bail!(
            "--default-k must be within {}..={}",
            trustrep::domain::MIN_SELECTION,
            trustrep::domain::MAX_SELECTION
        );
    }
    let kb = match &args.journal {
        Some(p) => {
            KnowledgeBase::open(p).with_context(|| format!("opening journal {}", p.display()))?
        }
        None => KnowledgeBase::in_memory(),
    };
    let engine = Engine::new(
        kb,
        lexicon(args.lexicon.as_ref())?,
        EngineConfig {
            blacklist_ttl: args.blacklist_ttl,
            default_k: args.default_k,
        },
    );
    let listener = tokio::net::TcpListener::bind(args.listen)
        .await
        .with_context(|| format!("binding {}", args.listen))?;
    eprintln!("listening on {}", listener.local_addr()?);
    trustrep_service::serve(listener, AppState::new(engine, args.test_mode)).await?;
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let config = ScenarioConfig::from_path(&args.config)
        .with_context(|| format!("reading scenario {}", args.config.display()))?;
    let (report, _) = run_with_engine(&config, lexicon(args.lexicon.as_ref())?)?;
    let text = emit_report(&report, args.format.into())?;
    match args.out {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Serve(args) => tokio::runtime::Runtime::new()?.block_on(serve(args)),
        Command::Simulate(args) => simulate(args),
    }
}
