//! `criteria` command line. Exit codes: 0 success, 1 usage error, 2 runtime
//! failure.

use std::ffi::OsString;
use std::fs;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use criteria_core::export::{CriteriaExport, ExportFormat};
use criteria_core::generation::ExternalProvider;
use criteria_core::history;
use criteria_core::session::{ProviderKind, SessionConfig};
use criteria_core::simulation::{run_simulation, OracleStyle, PreferenceProfile};
use criteria_core::store::{self, SessionStore};

use crate::state::AppState;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "criteria", version, about = "Prototype decision criteria iteratively")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProviderArg {
    Stub,
    External,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Json,
    Markdown,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value = "sessions")]
        store_dir: PathBuf,
        #[arg(long, value_enum, default_value_t = ProviderArg::Stub)]
        provider: ProviderArg,
        /// Default seed for new sessions.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Drive the loop with a scripted person holding a hidden profile.
    Simulate {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 3)]
        rounds: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also add one criterion per round from the profile.
        #[arg(long)]
        assertive: bool,
    },
    /// Print the criteria document of a session file.
    Export {
        #[arg(long)]
        session_file: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
        format: FormatArg,
    },
    /// Validate a session file's log and print its process summary.
    Replay {
        #[arg(long)]
        session_file: PathBuf,
    },
}

/// Parse `args` and run. Returns the process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(message) => {
            eprintln!("error: {message}");
            EXIT_RUNTIME
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Serve {
            port,
            host,
            store_dir,
            provider,
            seed,
        } => serve(&host, port, store_dir, provider, seed),
        Command::Simulate {
            profile,
            rounds,
            seed,
            out,
            assertive,
        } => {
            let text = fs::read_to_string(&profile).map_err(|e| format!("{}: {e}", profile.display()))?;
            let mut profile: PreferenceProfile =
                serde_json::from_str(&text).map_err(|e| format!("{}: {e}", profile.display()))?;
            profile.sort();
            let style = if assertive {
                OracleStyle::Assertive
            } else {
                OracleStyle::Passive
            };
            let report = run_simulation(&profile, &SessionConfig::default(), rounds, seed, style)
                .map_err(|e| e.to_string())?;
            fs::write(&out, store::to_canonical_json(&report)).map_err(|e| format!("{}: {e}", out.display()))?;
            println!(
                "recovery {:.3} after {} rounds (trajectory {:?}) -> {}",
                report.recovery,
                report.rounds_run,
                report.trajectory,
                out.display()
            );
            Ok(())
        }
        Command::Export { session_file, format } => {
            let recorded = store::load_file(&session_file).map_err(|e| e.to_string())?;
            let format = match format {
                FormatArg::Json => ExportFormat::Json,
                FormatArg::Markdown => ExportFormat::Markdown,
            };
            print!("{}", CriteriaExport::from_session(recorded.session()).render(format));
            Ok(())
        }
        Command::Replay { session_file } => {
            let recorded = store::load_file(&session_file).map_err(|e| e.to_string())?;
            let summary = history::summarize(recorded.log()).map_err(|e| e.to_string())?;
            print!("{}", store::to_canonical_json(&summary));
            Ok(())
        }
    }
}

fn serve(host: &str, port: u16, store_dir: PathBuf, provider: ProviderArg, seed: u64) -> Result<(), String> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();
    let store = SessionStore::open(&store_dir).map_err(|e| e.to_string())?;
    let (kind, external) = match provider {
        ProviderArg::Stub => (ProviderKind::Stub, None),
        ProviderArg::External => (
            ProviderKind::External,
            Some(ExternalProvider::from_env().map_err(|e| e.to_string())?),
        ),
    };
    let addr: SocketAddr = format!("{host}:{port}").parse().map_err(|e| format!("bad address: {e}"))?;
    let state = Arc::new(AppState::new(store, kind, seed, external));
    let runtime = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| format!("bind {addr}: {e}"))?;
        tracing::info!(%addr, store = %store_dir.display(), "serving /api/v1");
        crate::serve(listener, state).await.map_err(|e| e.to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_1() {
        assert_eq!(main(["criteria", "bogus"]), EXIT_USAGE);
        assert_eq!(main(["criteria", "simulate", "--rounds", "x"]), EXIT_USAGE);
        assert_eq!(main(["criteria", "--help"]), EXIT_OK);
    }

    #[test]
    fn runtime_errors_exit_2() {
        assert_eq!(
            main(["criteria", "replay", "--session-file", "/definitely/missing.json"]),
            EXIT_RUNTIME
        );
    }

    #[test]
    fn simulate_writes_report() {
        let dir = tempfile::tempdir().unwrap();
        let profile = dir.path().join("p.json");
        fs::write(
            &profile,
            r#"{"hidden_keywords":[{"keyword":"research","weight":0.9}],"tier_thresholds":[0.3,0.6]}"#,
        )
        .unwrap();
        let out = dir.path().join("r.json");
        let args = [
            "criteria".into(),
            "simulate".into(),
            "--profile".into(),
            profile.clone().into_os_string(),
            "--rounds".into(),
            "2".into(),
            "--seed".into(),
            "3".into(),
            "--out".into(),
            out.clone().into_os_string(),
        ];
        assert_eq!(main::<_, OsString>(args), EXIT_OK);
        let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
        assert_eq!(report["rounds_run"], 2);
    }
}
