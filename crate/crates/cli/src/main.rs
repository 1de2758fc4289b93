use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spreadfft::commands;
use spreadfft::config::{parse_config, parse_override, RunConfig, BENCHMARK_CONFIG};

/// Spread option pricing by two-dimensional FFT, with a Monte Carlo check.
#[derive(Debug, Parser)]
#[command(name = "spreadfft", version, about)]
struct Cli {
    /// Configuration file; `-` reads standard input. Defaults to the
    /// built-in benchmark configuration.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<String>,

    /// Override a configuration key, e.g. `--set contract.K=3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = parse_override)]
    overrides: Vec<(String, String)>,

    /// Write output here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Monte Carlo seed (overrides `mc.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps, grid assembly and simulation.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Price the configured contract by FFT and print one JSON record.
    Price,
    /// Price the configured contract by Monte Carlo and print one JSON record.
    Mc,
    /// CSV of Monte Carlo against FFT prices over several strikes.
    Compare {
        /// Comma-separated strikes; defaults to `contract.K`.
        #[arg(long, value_delimiter = ',')]
        strikes: Vec<f64>,
    },
    /// CSV table of FFT prices over the `[sweep]` axes.
    Sweep,
    /// Run quick internal consistency checks.
    Selftest,
}

fn load_config(cli: &Cli) -> Result<RunConfig, String> {
    let text = match cli.config.as_deref() {
        None => BENCHMARK_CONFIG.to_string(),
        Some("-") => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| format!("reading stdin: {e}"))?;
            s
        }
        Some(path) => std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?,
    };
    let mut cfg = parse_config(&text, &cli.overrides).map_err(|e| e.to_string())?;
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    Ok(cfg)
}

/// Returns `Ok(true)` when every result is clean.
fn run(cli: &Cli, out: &mut dyn Write) -> Result<bool, String> {
    let io_err = |e: io::Error| e.to_string();
    if let Command::Selftest = cli.command {
        let checks = commands::selftest();
        commands::write_checks(&checks, &mut &mut *out).map_err(io_err)?;
        return Ok(checks.iter().all(|c| c.passed));
    }
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Price => {
            let rec = commands::price(&cfg).map_err(|e| format!("ERR:{}: {e}", e.code()))?;
            commands::write_json_line(&rec, &mut &mut *out).map_err(io_err)?;
            Ok(true)
        }
        Command::Mc => {
            if cfg.mc.n_paths == 0 {
                return Err("mc.n_paths is 0; nothing to simulate".into());
            }
            let rec = commands::mc(&cfg).map_err(|e| format!("ERR:{}: {e}", e.code()))?;
            commands::write_json_line(&rec, &mut &mut *out).map_err(io_err)?;
            Ok(true)
        }
        Command::Compare { strikes } => {
            let strikes = if strikes.is_empty() {
                vec![cfg.contract.strike]
            } else {
                strikes.clone()
            };
            let rows = commands::compare(&cfg, &strikes).map_err(|e| format!("ERR:{}: {e}", e.code()))?;
            commands::write_compare_csv(&rows, &mut *out).map_err(io_err)?;
            Ok(rows.iter().all(|r| r.fft.is_ok()))
        }
        Command::Sweep => {
            let table = commands::sweep(&cfg)?;
            commands::write_sweep_csv(&table, &mut *out).map_err(io_err)?;
            Ok(table.error_count() == 0)
        }
        Command::Selftest => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("spreadfft: {e}");
            return ExitCode::from(2);
        }
    }
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => match File::create(path) {
            Ok(f) => Box::new(BufWriter::new(f)),
            Err(e) => {
                eprintln!("spreadfft: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        },
        None => Box::new(io::stdout().lock()),
    };
    let result = run(&cli, &mut *out);
    if let Err(e) = out.flush() {
        eprintln!("spreadfft: {e}");
        return ExitCode::from(2);
    }
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("spreadfft: {e}");
            ExitCode::from(2)
        }
    }
}
