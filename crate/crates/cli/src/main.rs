use clap::{Parser, Subcommand};
use histories_cli::{catalog, config, execute, output_dir, with_threads, write_outputs, OUT_DIR_ENV};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "histories", version, about = "Run decoherent-histories experiments from TOML configs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSVs and report.
    Run {
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; falls back to the config, then $HISTORIES_OUT_DIR.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for the engines.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List experiment kinds with their parameters and defaults.
    List {
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Check a config and print it with defaults filled in.
    Validate {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn load(path: &PathBuf, seed: Option<u64>) -> Result<config::ResolvedConfig, ExitCode> {
    config::load(path).and_then(|c| config::resolve(&c, seed)).map_err(|e| {
        eprintln!("config error: {e}");
        ExitCode::from(EXIT_CONFIG)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List { json } => {
            let entries = catalog::catalog();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("catalog serializes"));
            } else {
                print!("{}", catalog::render_text(&entries));
            }
            ExitCode::SUCCESS
        }
        Command::Validate { config, seed } => match load(&config, seed) {
            Ok(cfg) => {
                print!("{}", cfg.echo());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Run { config, seed, out, threads } => {
            let cfg = match load(&config, seed) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if threads == Some(0) {
                eprintln!("config error: --threads must be at least 1");
                return ExitCode::from(EXIT_CONFIG);
            }
            let env = std::env::var(OUT_DIR_ENV).ok();
            let dir = output_dir(out.as_deref(), &cfg, env.as_deref());
            let result = match with_threads(threads, || execute(&cfg)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("cannot start thread pool: {e}");
                    return ExitCode::from(EXIT_FAIL);
                }
            };
            let out = match result {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_FAIL);
                }
            };
            if let Err(e) = write_outputs(&dir, &out) {
                eprintln!("cannot write to {}: {e}", dir.display());
                return ExitCode::from(EXIT_FAIL);
            }
            for row in &out.report.rows {
                println!(
                    "{} [{}] {}: measured {:e}, expected {:e}, tolerance {:e}{}",
                    if row.pass { "PASS" } else { "FAIL" },
                    row.criterion,
                    row.name,
                    row.measured,
                    row.expected,
                    row.tolerance,
                    if row.relative { " (relative)" } else { "" }
                );
            }
            for note in &out.report.notes {
                println!("note: {note}");
            }
            println!("{} -> {}", if out.report.pass { "PASS" } else { "FAIL" }, dir.display());
            if out.report.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
    }
}
