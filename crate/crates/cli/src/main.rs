use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use spanforge::catdsl::{parse_with_budget, Workspace, DEFAULT_BUDGET};
use spanforge_cli::{fixtures, run_all, Report};

#[derive(Parser)]
#[command(
    name = "spanforge",
    version,
    about = "Checks finite fibrations, span categories and unfurlings"
)]
struct Cli {
    /// Morphism budget for closing generated categories.
    #[arg(long, global = true, env = "SPANFORGE_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Only run tasks with these names or kinds.
    #[arg(long, global = true, value_delimiter = ',')]
    select: Vec<String>,
    /// Write the bundled fixture catalog as .cat files into this directory.
    #[arg(long, value_name = "DIR")]
    fixtures: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate .cat files.
    Validate { paths: Vec<PathBuf> },
    /// Run the tasks declared in .cat files.
    Check { paths: Vec<PathBuf> },
    /// Run the tasks and write report.json and summary.txt.
    Report {
        paths: Vec<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// Parsed workspaces, or false after printing every diagnostic.
fn load(paths: &[PathBuf], budget: usize) -> Result<Option<Vec<(String, Workspace)>>> {
    let mut out = Vec::new();
    let mut ok = true;
    for p in paths {
        let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        match parse_with_budget(&text, budget) {
            Ok(ws) => out.push((p.display().to_string(), ws)),
            Err(d) => {
                ok = false;
                for e in d.0 {
                    eprintln!("{}:{e}", p.display());
                }
            }
        }
    }
    Ok(ok.then_some(out))
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_structured(),
    }
}

fn write_fixtures(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, text) in fixtures::catalog_files() {
        std::fs::write(dir.join(&name), text).with_context(|| format!("writing {name}"))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(dir) = &cli.fixtures {
        write_fixtures(dir)?;
    }
    let Some(command) = cli.command else {
        return Ok(true);
    };
    match command {
        Command::Validate { paths } => {
            let Some(ws) = load(&paths, cli.budget)? else {
                return Ok(false);
            };
            for (file, w) in &ws {
                match cli.format {
                    Format::Text => println!("{file}: ok ({} declarations)", w.decls.len()),
                    Format::Structured => println!("{}", spanforge::catdsl::export_json(w)),
                }
            }
            Ok(true)
        }
        Command::Check { paths } => {
            let Some(ws) = load(&paths, cli.budget)? else {
                return Ok(false);
            };
            let report = run_all(&ws, &cli.select, cli.jobs);
            print!("{}", render(&report, cli.format));
            Ok(report.passed)
        }
        Command::Report { paths, out } => {
            let Some(ws) = load(&paths, cli.budget)? else {
                return Ok(false);
            };
            let report = run_all(&ws, &cli.select, cli.jobs);
            std::fs::create_dir_all(&out)?;
            std::fs::write(out.join("report.json"), report.to_structured())?;
            std::fs::write(out.join("summary.txt"), report.to_text())?;
            print!("{}", render(&report, cli.format));
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
