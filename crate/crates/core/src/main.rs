use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use mflef::cli::{render_json, render_text, run_command};
use mflef::document::parse_document;
use mflef::lefschetz::Engine;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EngineArg {
    Groebner,
    Graded,
    Both,
}

/// Exact matrix-factorization calculus and Lefschetz-type identity checks.
#[derive(Parser, Debug)]
#[command(name = "mflef", version)]
struct Cli {
    /// milnor, bb, pair, hlf-verify, isolated-verify, lunts, zero-check,
    /// trace-identity, divisibility, stabilize, hilbert or corpus
    command: String,
    /// Entity names from the workspace, or a single case name
    entities: Vec<String>,
    /// Workspace document
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Write a structured report here instead of printing text ("-" for stdout)
    #[arg(long)]
    json: Option<PathBuf>,
    /// Cohomology engine for left-hand sides
    #[arg(long, value_enum, default_value = "groebner")]
    engine: EngineArg,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let text = match std::fs::read_to_string(&cli.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", cli.input.display());
            return ExitCode::from(2);
        }
    };
    let ws = match parse_document(&text) {
        Ok(ws) => ws,
        Err(e) => {
            eprintln!("error: {}: {e}", cli.input.display());
            return ExitCode::from(2);
        }
    };
    let engine = match cli.engine {
        EngineArg::Groebner => Engine::Groebner,
        EngineArg::Graded => Engine::Graded,
        EngineArg::Both => Engine::Both,
    };
    let out = run_command(&cli.command, &cli.entities, &ws, engine);
    match &cli.json {
        Some(p) if p.as_os_str() == "-" => print!("{}", render_json(&out)),
        Some(p) => {
            if let Err(e) = std::fs::write(p, render_json(&out)) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{}", render_text(&out)),
    }
    ExitCode::from(out.exit_code as u8)
}
