//! Command-line front end for the geophase experiment runner.
//!
//! Exit codes: 0 on success, 2 for config problems (unreadable file, schema
//! violation, failed validation), 3 for runtime failures (output not
//! writable).

use clap::{Parser, Subcommand};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use geophase::runner::{self, ExperimentConfig, RunnerError};

#[derive(Parser)]
#[command(name = "geophase", version, about = "Geometric-phase experiment simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a config; print the table or write it to the output path.
    Run {
        /// TOML config file.
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's output path.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Force analytic mode (exact means, no sampling).
        #[arg(long)]
        analytic: bool,
    },
    /// Check a config against the schema and print diagnostics.
    Validate {
        /// TOML config file.
        config: PathBuf,
    },
    /// Re-run a config once per value substituted at a dotted key path.
    Sweep {
        /// TOML config file.
        config: PathBuf,
        /// Dotted key path, e.g. `chsh_azimuthal.gamma_grid.points`.
        #[arg(long)]
        param: String,
        /// Comma-separated values substituted at the key path.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Base output path; each run writes `<stem>_<index><ext>`.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Force analytic mode (exact means, no sampling).
        #[arg(long)]
        analytic: bool,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self { code: EXIT_RUNTIME, message: message.into() }
    }

    fn from_runner(e: RunnerError) -> Self {
        match e {
            RunnerError::ConfigInvalid(_) => Failure::config(e.to_string()),
            RunnerError::IoFailure { .. } => Failure::runtime(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Run { config, seed, output, analytic } => {
            let mut cfg = load(&config)?;
            apply_overrides(&mut cfg, seed, output, analytic);
            let table = runner::run(&cfg).map_err(Failure::from_runner)?;
            match &cfg.output {
                Some(path) => println!("wrote {}", path.display()),
                None => print!("{}", table.render()),
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            let diags = runner::validate(&cfg);
            if diags.is_empty() {
                println!("ok");
                Ok(())
            } else {
                for d in &diags {
                    println!("{d}");
                }
                Err(Failure::config(format!("{} diagnostic(s)", diags.len())))
            }
        }
        Command::Sweep { config, param, values, seed, output, analytic } => {
            sweep(&config, &param, &values, seed, output, analytic)
        }
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_toml_str(&text).map_err(|e| Failure::config(e.to_string()))
}

fn apply_overrides(
    cfg: &mut ExperimentConfig,
    seed: Option<u64>,
    output: Option<PathBuf>,
    analytic: bool,
) {
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(o) = output {
        cfg.output = Some(o);
    }
    if analytic {
        cfg.analytic = true;
    }
}

fn sweep(
    config: &Path,
    param: &str,
    values: &[String],
    seed: Option<u64>,
    output: Option<PathBuf>,
    analytic: bool,
) -> Result<(), Failure> {
    let text = fs::read_to_string(config)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", config.display())))?;
    let base: toml::Value = text
        .parse()
        .map_err(|e| Failure::config(format!("cannot parse {}: {e}", config.display())))?;

    for (index, raw) in values.iter().enumerate() {
        let mut doc = base.clone();
        set_key_path(&mut doc, param, parse_sweep_value(raw))
            .map_err(Failure::config)?;
        let mut cfg: ExperimentConfig = doc
            .try_into()
            .map_err(|e| Failure::config(format!("{param} = {raw}: {e}")))?;
        apply_overrides(&mut cfg, seed, output.clone(), analytic);
        let base_out = cfg
            .output
            .clone()
            .unwrap_or_else(|| config.with_extension("tsv"));
        cfg.output = Some(indexed_path(&base_out, index));
        runner::run(&cfg).map_err(Failure::from_runner)?;
        println!(
            "wrote {} ({param} = {raw})",
            cfg.output.as_ref().expect("output set above").display()
        );
    }
    Ok(())
}

/// Interpret a sweep value: integer, then float, then boolean, else string
/// (strings cover suffixed angles like "45 deg").
fn parse_sweep_value(raw: &str) -> toml::Value {
    let t = raw.trim();
    if let Ok(i) = t.parse::<i64>() {
        return toml::Value::Integer(i);
    }
    if let Ok(f) = t.parse::<f64>() {
        return toml::Value::Float(f);
    }
    if let Ok(b) = t.parse::<bool>() {
        return toml::Value::Boolean(b);
    }
    toml::Value::String(t.to_string())
}

/// Set `root[a][b]...[z] = value` for a dotted path `a.b...z`, creating
/// intermediate tables as needed. The strict re-deserialization afterwards
/// rejects paths the schema does not know.
fn set_key_path(root: &mut toml::Value, path: &str, value: toml::Value) -> Result<(), String> {
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(format!("invalid key path {path:?}"));
    }
    let mut cur = root;
    for seg in &segments[..segments.len() - 1] {
        let table = cur
            .as_table_mut()
            .ok_or_else(|| format!("{seg} in {path:?} is not a table"))?;
        cur = table
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(toml::map::Map::new()));
    }
    let leaf = segments[segments.len() - 1];
    let table = cur
        .as_table_mut()
        .ok_or_else(|| format!("parent of {leaf} in {path:?} is not a table"))?;
    table.insert(leaf.to_string(), value);
    Ok(())
}

fn indexed_path(base: &Path, index: usize) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".to_string());
    let ext = base
        .extension()
        .map(|s| format!(".{}", s.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}_{index}{ext}"))
}
