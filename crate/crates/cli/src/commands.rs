//! The `price`, `mc`, `compare`, `sweep` and `selftest` commands.
//!
//! Each command returns plain records; the `write_*` functions turn them
//! into single-line JSON or CSV.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use spreadfft_core::fft_pricer::{inverse_dft2, price_spread_fft, ComplexMatrix, TransformSign};
use spreadfft_core::mc_engine::{simulate_terminal, McConfig};
use spreadfft_core::model::{SpreadContract, SpreadModel};
use spreadfft_core::payoff_transform::{spread_payoff_hat, DampedArgument};
use spreadfft_core::{Complex64, Error};

use crate::config::{set_param, RunConfig};

fn model_tag(model: &SpreadModel) -> &'static str {
    match model {
        SpreadModel::Proportional(_) => "proportional",
        SpreadModel::Independent(_) => "independent",
    }
}

fn sign_tag(sign: TransformSign) -> &'static str {
    match sign {
        TransformSign::Positive => "positive",
        TransformSign::Negative => "negative",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceRecord {
    pub command: &'static str,
    pub model: &'static str,
    pub price: f64,
    pub strike: f64,
    pub maturity: f64,
    pub s0: [f64; 2],
    pub n: usize,
    pub u_min: f64,
    pub eps: [f64; 2],
    pub sign_convention: &'static str,
    pub du: [f64; 2],
    pub dx: [f64; 2],
    pub u_bar: [f64; 2],
    pub target_index: [usize; 2],
    pub cf_evals: usize,
    pub warnings: Vec<String>,
    pub elapsed_secs: f64,
}

pub fn price(cfg: &RunConfig) -> Result<PriceRecord, Error> {
    let start = Instant::now();
    let r = price_spread_fft(&cfg.model, &cfg.market, &cfg.contract, &cfg.fft)?;
    Ok(PriceRecord {
        command: "price",
        model: model_tag(&cfg.model),
        price: r.price,
        strike: cfg.contract.strike,
        maturity: cfg.contract.maturity,
        s0: cfg.market.s0,
        n: r.grid.n,
        u_min: cfg.fft.u_min,
        eps: cfg.fft.eps,
        sign_convention: sign_tag(cfg.fft.sign),
        du: r.grid.du,
        dx: r.grid.dx,
        u_bar: r.grid.u_bar,
        target_index: r.grid.target_index,
        cf_evals: r.cf_evals,
        warnings: r.warnings.iter().map(ToString::to_string).collect(),
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McRecord {
    pub command: &'static str,
    pub model: &'static str,
    pub estimate: f64,
    pub std_error: f64,
    pub strike: f64,
    pub maturity: f64,
    pub n_paths: usize,
    pub steps: usize,
    pub seed: u64,
    pub antithetic: bool,
    pub floored_fraction: f64,
    pub elapsed_secs: f64,
}

pub fn mc(cfg: &RunConfig) -> Result<McRecord, Error> {
    let start = Instant::now();
    let sim = simulate_terminal(&cfg.model, &cfg.market, cfg.contract.maturity, &cfg.mc)?;
    let r = sim.price(&cfg.contract, cfg.market.r);
    Ok(McRecord {
        command: "mc",
        model: model_tag(&cfg.model),
        estimate: r.estimate,
        std_error: r.std_error,
        strike: cfg.contract.strike,
        maturity: cfg.contract.maturity,
        n_paths: r.n_paths,
        steps: sim.steps,
        seed: cfg.mc.seed,
        antithetic: cfg.mc.antithetic,
        floored_fraction: r.floored_fraction,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

pub fn write_json_line<T: Serialize>(record: &T, out: &mut impl Write) -> io::Result<()> {
    serde_json::to_writer(&mut *out, record)?;
    out.write_all(b"\n")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub strike: f64,
    /// `(estimate, std_error)`; `None` in FFT-only mode.
    pub mc: Option<(f64, f64)>,
    pub fft: Result<f64, Error>,
}

impl CompareRow {
    pub fn rel_err_percent(&self) -> Option<f64> {
        match (&self.mc, &self.fft) {
            (Some((m, _)), Ok(f)) => Some(100.0 * (f - m) / m),
            _ => None,
        }
    }
}

/// FFT and Monte Carlo prices per strike, ascending in strike. All strikes
/// share one set of simulated paths. `mc.n_paths = 0` skips the simulation.
pub fn compare(cfg: &RunConfig, strikes: &[f64]) -> Result<Vec<CompareRow>, Error> {
    let mut strikes = strikes.to_vec();
    strikes.sort_by(f64::total_cmp);
    let sim = if cfg.mc.n_paths == 0 {
        None
    } else {
        Some(simulate_terminal(
            &cfg.model,
            &cfg.market,
            cfg.contract.maturity,
            &cfg.mc,
        )?)
    };
    strikes
        .iter()
        .map(|&k| {
            let contract = SpreadContract::new(k, cfg.contract.maturity)?;
            let mc = sim.as_ref().map(|s| {
                let r = s.price(&contract, cfg.market.r);
                (r.estimate, r.std_error)
            });
            let fft = price_spread_fft(&cfg.model, &cfg.market, &contract, &cfg.fft).map(|r| r.price);
            Ok(CompareRow { strike: k, mc, fft })
        })
        .collect()
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

fn error_cell(e: &Error) -> String {
    format!("ERR:{}", e.code())
}

pub fn write_compare_csv(rows: &[CompareRow], out: impl Write) -> io::Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["K", "mc_price", "mc_stderr", "fft_price", "rel_err_percent"])?;
    for row in rows {
        let (mc, se) = match row.mc {
            Some((m, s)) => (fixed(m), fixed(s)),
            None => (String::new(), String::new()),
        };
        let fft = match &row.fft {
            Ok(p) => fixed(*p),
            Err(e) => error_cell(e),
        };
        let rel = row.rel_err_percent().map(fixed).unwrap_or_default();
        w.write_record([row.strike.to_string(), mc, se, fft, rel])?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub row_value: f64,
    pub col_value: Option<f64>,
    pub price: Result<f64, Error>,
    pub method: &'static str,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub row_param: String,
    pub col_param: Option<String>,
    pub row_values: Vec<f64>,
    pub col_values: Vec<f64>,
    /// Row-major over `row_values × col_values`.
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, row: usize, col: usize) -> &SweepCell {
        &self.cells[row * self.col_values.len().max(1) + col]
    }

    pub fn error_count(&self) -> usize {
        self.cells.iter().filter(|c| c.price.is_err()).count()
    }
}

/// Prices every cell of the configured sweep by FFT. Cells are computed in
/// parallel; a failing cell records its error and the sweep continues.
pub fn sweep(cfg: &RunConfig) -> Result<SweepTable, String> {
    let spec = cfg.sweep.as_ref().ok_or("no [sweep] section in the configuration")?;
    let cols: Vec<Option<f64>> = match &spec.cols {
        Some(axis) => axis.values.iter().copied().map(Some).collect(),
        None => vec![None],
    };
    let jobs: Vec<(f64, Option<f64>)> = spec
        .rows
        .values
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(rv, cv)| {
            let mut local = cfg.clone();
            set_param(&mut local, &spec.rows.param, rv)?;
            if let (Some(axis), Some(v)) = (&spec.cols, cv) {
                set_param(&mut local, &axis.param, v)?;
            }
            let result = price_spread_fft(&local.model, &local.market, &local.contract, &local.fft);
            let (price, warnings) = match result {
                Ok(r) => (Ok(r.price), r.warnings.iter().map(ToString::to_string).collect()),
                Err(e) => (Err(e), Vec::new()),
            };
            Ok(SweepCell {
                row_value: rv,
                col_value: cv,
                price,
                method: "fft",
                warnings,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(SweepTable {
        row_param: spec.rows.param.clone(),
        col_param: spec.cols.as_ref().map(|a| a.param.clone()),
        row_values: spec.rows.values.clone(),
        col_values: spec.cols.as_ref().map(|a| a.values.clone()).unwrap_or_default(),
        cells,
    })
}

/// Header of column values, then one line per row value.
pub fn write_sweep_csv(table: &SweepTable, out: impl Write) -> io::Result<()> {
    let mut w = csv_writer(out);
    let mut header = vec![match &table.col_param {
        Some(c) => format!("{}\\{}", table.row_param, c),
        None => table.row_param.clone(),
    }];
    if table.col_param.is_some() {
        header.extend(table.col_values.iter().map(f64::to_string));
    } else {
        header.push("price".into());
    }
    w.write_record(&header)?;
    let width = table.col_values.len().max(1);
    for (i, rv) in table.row_values.iter().enumerate() {
        let mut line = vec![rv.to_string()];
        for cell in &table.cells[i * width..(i + 1) * width] {
            line.push(match &cell.price {
                Ok(p) => fixed(*p),
                Err(e) => error_cell(e),
            });
        }
        w.write_record(&line)?;
    }
    w.flush()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Fast internal consistency checks of the installed build.
pub fn selftest() -> Vec<Check> {
    let mut checks = Vec::new();

    let n = 8;
    let m = ComplexMatrix::from_fn(n, |i, j| {
        Complex64::new((i * 3 + j) as f64 * 0.1, (i as f64 - j as f64).sin())
    });
    let fast = inverse_dft2(&m, TransformSign::Positive);
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for l1 in 0..n {
        for l2 in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k1 in 0..n {
                for k2 in 0..n {
                    let a = 2.0 * PI * ((k1 * l1 + k2 * l2) % n) as f64 / n as f64;
                    acc += m[(k1, k2)] * Complex64::new(a.cos(), a.sin());
                }
            }
            acc /= (n * n) as f64;
            worst = worst.max((fast[(l1, l2)] - acc).norm());
            scale = scale.max(acc.norm());
        }
    }
    let worst = worst / scale;
    checks.push(Check {
        name: "inverse_dft2 vs direct sum",
        passed: worst < 1e-10,
        detail: format!("max rel err {worst:.2e}"),
    });

    let hat = spread_payoff_hat(DampedArgument::new([0.0, 0.0], [-3.0, 1.0]));
    let ok = matches!(hat, Ok(v) if (v - Complex64::new(1.0 / 6.0, 0.0)).norm() < 1e-14);
    checks.push(Check {
        name: "payoff transform at u = 0",
        passed: ok,
        detail: format!("{hat:?}"),
    });

    let cfg = RunConfig::benchmark();
    let cf = cfg.model.cf([Complex64::new(0.0, 0.0); 2], 1.0, &cfg.market);
    checks.push(Check {
        name: "characteristic function at u = 0",
        passed: matches!(&cf, Ok(v) if v.value == Complex64::new(1.0, 0.0)),
        detail: format!("{:?}", cf.map(|v| v.value)),
    });

    let prices: Vec<Result<f64, Error>> = [256, 512]
        .iter()
        .map(|&n| {
            let mut c = cfg.clone();
            c.fft.n = n;
            price_spread_fft(&c.model, &c.market, &c.contract, &c.fft).map(|r| r.price)
        })
        .collect();
    let (passed, detail) = match (&prices[0], &prices[1]) {
        (Ok(a), Ok(b)) => ((a - b).abs() < 2e-4, format!("N=256 {a:.6}, N=512 {b:.6}")),
        _ => (false, format!("{prices:?}")),
    };
    checks.push(Check {
        name: "benchmark price stable in N",
        passed,
        detail,
    });

    let mc_cfg = McConfig {
        n_paths: 20_000,
        n_steps: 100,
        seed: 1,
        antithetic: true,
    };
    let fft = prices[1].clone();
    let mc = simulate_terminal(&cfg.model, &cfg.market, 1.0, &mc_cfg).map(|s| s.price(&cfg.contract, cfg.market.r));
    let (passed, detail) = match (&fft, &mc) {
        (Ok(f), Ok(m)) => (
            (f - m.estimate).abs() <= (4.0 * m.std_error).max(0.01 * f),
            format!("fft {f:.6}, mc {:.6} ± {:.6}", m.estimate, m.std_error),
        ),
        _ => (false, format!("{fft:?} {mc:?}")),
    };
    checks.push(Check {
        name: "FFT vs Monte Carlo at the benchmark",
        passed,
        detail,
    });
    checks
}

pub fn write_checks(checks: &[Check], out: &mut impl Write) -> io::Result<()> {
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{tag} {}: {}", c.name, c.detail)?;
    }
    Ok(())
}
