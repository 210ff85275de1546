use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use twistee::entropy::EntropyReport;
use twistee::experiment::{run_config, ConfigFile, RunOptions};
use twistee::oracle::DEFAULT_CAP;
use twistee::report::{bundled, claim_table, render_claims, reproduce, write_csv, write_json, BUNDLED};
use twistee::{Error, Result};

#[derive(Parser)]
#[command(name = "twistee", version, about = "Entanglement entropies of twisted Wen-plaquette codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Both,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// Directory for report files; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Largest qubit count handed to the dense oracle.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    oracle_cap: usize,
    /// Skip the canonical-form and dense-oracle cross-checks.
    #[arg(long)]
    no_cross_check: bool,
}

impl OutputArgs {
    fn options(&self) -> RunOptions {
        RunOptions { oracle_cap: self.oracle_cap, cross_check: !self.no_cross_check }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file (or the name of a bundled config).
    Run {
        config: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every bundled config and print the claim table.
    ReproducePaper {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the qubits, generators and logicals of each experiment.
    ExportLattice {
        config: String,
        /// Only this experiment.
        #[arg(long)]
        experiment: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the bundled configs.
    Configs,
}

fn load(config: &str) -> Result<(String, ConfigFile)> {
    let path = Path::new(config);
    if path.exists() {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
        return Ok((stem, ConfigFile::load(path)?));
    }
    match bundled(config) {
        Some(text) => Ok((config.trim_end_matches(".toml").to_string(), ConfigFile::parse(text, config)?)),
        None => Err(Error::Config { path: config.to_string(), message: "no such file or bundled config".into() }),
    }
}

fn emit(reports: &[EntropyReport], stem: &str, output: &OutputArgs) -> Result<()> {
    match &output.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            if output.format != Format::Csv {
                let path = dir.join(format!("{stem}.json"));
                write_json(reports, BufWriter::new(File::create(&path)?))?;
                eprintln!("wrote {}", path.display());
            }
            if output.format != Format::Json {
                let path = dir.join(format!("{stem}.csv"));
                write_csv(reports, BufWriter::new(File::create(&path)?))?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            let stdout = io::stdout().lock();
            match output.format {
                Format::Json => write_json(reports, stdout)?,
                Format::Csv => write_csv(reports, stdout)?,
                Format::Both => {
                    write_json(reports, io::stdout().lock())?;
                    write_csv(reports, io::stdout().lock())?;
                }
            }
        }
    }
    Ok(())
}

fn summarise(reports: &[EntropyReport]) {
    for r in reports {
        let failed = r.checks.iter().filter(|c| !c.passed).count();
        eprintln!(
            "{:<28} {:>5} qubits  {:>3} checks  {}",
            r.experiment,
            r.qubits,
            r.checks.len(),
            if failed == 0 { "ok".to_string() } else { format!("{failed} FAILED") }
        );
        for c in r.checks.iter().filter(|c| !c.passed) {
            eprintln!("    {}: {}", c.name, c.detail);
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, output } => {
            let (stem, file) = load(&config)?;
            let reports = run_config(&file, &output.options())?;
            emit(&reports, &stem, &output)?;
            summarise(&reports);
            Ok(reports.iter().all(EntropyReport::passed))
        }
        Command::ReproducePaper { output } => {
            let reports = reproduce(&output.options())?;
            if output.out.is_some() {
                emit(&reports, "reproduction", &output)?;
            }
            summarise(&reports);
            let rows = claim_table(&reports);
            print!("{}", render_claims(&rows));
            if let Some(dir) = &output.out {
                let path = dir.join("claims.json");
                serde_json::to_writer_pretty(BufWriter::new(File::create(&path)?), &rows)?;
            }
            let ok = rows.iter().all(|r| r.passed()) && reports.iter().all(EntropyReport::passed);
            println!("{}", if ok { "all claims reproduced" } else { "some claims FAILED" });
            Ok(ok)
        }
        Command::ExportLattice { config, experiment, out } => {
            let (_, file) = load(&config)?;
            let mut text = String::new();
            let mut found = false;
            for e in &file.experiments {
                if experiment.as_ref().is_some_and(|n| n != &e.name) {
                    continue;
                }
                found = true;
                let (lattice, _, state) = e.prepare()?;
                text.push_str(&format!("# experiment {}\n", e.name));
                text.push_str(&lattice.export_text(Some(&state)));
            }
            if !found {
                return Err(Error::Spec(format!("no experiment named `{}`", experiment.unwrap_or_default())));
            }
            match out {
                Some(p) => std::fs::write(p, text)?,
                None => io::stdout().lock().write_all(text.as_bytes())?,
            }
            Ok(true)
        }
        Command::Configs => {
            for (name, text) in BUNDLED {
                let file = ConfigFile::parse(text, name)?;
                let names: Vec<&str> = file.experiments.iter().map(|e| e.name.as_str()).collect();
                println!("{name}: {}", names.join(", "));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
