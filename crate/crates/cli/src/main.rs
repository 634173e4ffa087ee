use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};

use semwork_cli::api::{router, AppState, DEFAULT_IDLE};
use semwork_cli::commands::{self, DeriveOptions, DeriveOut, ReadingsChoice, RenderOut};
use semwork_core::engine::{Engine, ParamSet};
use semwork_core::params::{FormalismId, MappingKind, ParserKind, ReducerKind, StorageMode};

#[derive(Parser)]
#[command(name = "semwork", version, about = "Build semantic representations step by step")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the meaning of a sentence.
    Derive {
        sentence: String,
        #[arg(long, default_value = "il")]
        formalism: FormalismId,
        #[arg(long, default_value = "substitution")]
        reducer: ReducerKind,
        #[arg(long, default_value = "none")]
        storage: StorageMode,
        #[arg(long, default_value = "simple-psg")]
        grammar: String,
        #[arg(long)]
        parser: Option<ParserKind>,
        #[arg(long, default_value = "rule-to-rule")]
        mapping: MappingKind,
        #[arg(long, value_enum, default_value = "all")]
        readings: ReadingsChoice,
        #[arg(long, value_enum, default_value = "text")]
        out: DeriveOut,
        /// Show reduction steps.
        #[arg(long)]
        trace: bool,
        /// Which parse to use when the sentence is ambiguous.
        #[arg(long, default_value_t = 0)]
        tree: usize,
        /// Node ids to draw with a frame (desc and svg output).
        #[arg(long, value_delimiter = ',')]
        box_nodes: Vec<usize>,
    },
    /// Lay out a description string file.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "svg")]
        out: RenderOut,
    },
    /// Translate a DRS to first-order logic.
    Translate {
        #[arg(long, default_value = "fol")]
        to: String,
        file: PathBuf,
        /// Also evaluate both in this model file.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Parameter combinations.
    Params {
        #[command(subcommand)]
        what: ParamsCommand,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, env = "SEMWORK_PORT", default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Subcommand)]
enum ParamsCommand {
    /// Every valid combination of the core dimensions.
    List,
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(1)
    })
}

fn finish(r: Result<String, String>) -> ExitCode {
    match r {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let engine = Engine::default();
    match cli.command {
        Command::Derive {
            sentence,
            formalism,
            reducer,
            storage,
            grammar,
            parser,
            mapping,
            readings,
            out,
            trace,
            tree,
            box_nodes,
        } => {
            // the categorial grammar comes with its own parser
            let parser = parser.unwrap_or(if grammar == "cg" {
                ParserKind::Incremental
            } else {
                ParserKind::Chart
            });
            let mut params = ParamSet {
                formalism,
                reducer,
                storage,
                grammar,
                parser,
                mapping,
                ..ParamSet::default()
            };
            params.display.box_nodes = box_nodes;
            let opts = DeriveOptions {
                params,
                readings,
                out,
                trace,
                tree,
            };
            match commands::derive(&engine, &sentence, &opts) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error[{}]: {e}", e.code());
                    ExitCode::from(commands::exit_code(&e))
                }
            }
        }
        Command::Render { file, out } => match read(&file) {
            Ok(src) => finish(commands::render(&src, out)),
            Err(code) => code,
        },
        Command::Translate { to, file, model } => {
            if to != "fol" {
                eprintln!("error: unknown target `{to}`, only fol is supported");
                return ExitCode::from(2);
            }
            let src = match read(&file) {
                Ok(s) => s,
                Err(code) => return code,
            };
            let model = match model.as_ref().map(read).transpose() {
                Ok(m) => m,
                Err(code) => return code,
            };
            finish(commands::translate(&src, model.as_deref()))
        }
        Command::Params {
            what: ParamsCommand::List,
        } => {
            print!("{}", commands::params_list(&engine));
            ExitCode::SUCCESS
        }
        Command::Serve { port } => {
            let state = Arc::new(AppState::new(engine, DEFAULT_IDLE));
            let rt = tokio::runtime::Runtime::new().expect("tokio runtime");
            rt.block_on(async move {
                let listener = match tokio::net::TcpListener::bind(("0.0.0.0", port)).await {
                    Ok(l) => l,
                    Err(e) => {
                        eprintln!("error: cannot listen on port {port}: {e}");
                        return ExitCode::from(1);
                    }
                };
                eprintln!("listening on port {port}");
                match axum::serve(listener, router(state)).await {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => {
                        eprintln!("error: {e}");
                        ExitCode::from(1)
                    }
                }
            })
        }
    }
}
