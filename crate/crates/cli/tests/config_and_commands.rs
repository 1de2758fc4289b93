use spreadfft::commands::{self, write_compare_csv, write_sweep_csv};
use spreadfft::config::{parse_config, ConfigError, RunConfig, BENCHMARK_CONFIG};
use spreadfft_core::model::{benchmark_proportional, SpreadModel};

fn set(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn without_line(text: &str, prefix: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with(prefix))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn shipped_benchmark_matches_the_library_parameters() {
    let cfg = RunConfig::benchmark();
    let (model, state) = benchmark_proportional();
    assert_eq!(cfg.model, SpreadModel::Proportional(model));
    assert_eq!(cfg.market, state);
    assert_eq!(cfg.contract.strike, 2.0);
    assert_eq!(cfg.contract.maturity, 1.0);
    assert_eq!(cfg.fft.n, 512);
    assert_eq!(cfg.fft.u_min, 40.0);
    assert_eq!(cfg.fft.eps, [-3.0, 1.0]);
    assert!(cfg.sweep.is_none());
}

#[test]
fn missing_strike_is_named() {
    let err = parse_config(&without_line(BENCHMARK_CONFIG, "K ="), &[]).unwrap_err();
    assert!(err.fields().iter().any(|f| f.contains("contract.K")), "{err}");
}

#[test]
fn every_problem_is_reported_at_once() {
    let err = parse_config(
        BENCHMARK_CONFIG,
        &set(&[("contract.K", "-1"), ("contract.T", "0"), ("fft.n", "100")]),
    )
    .unwrap_err();
    let fields = err.fields();
    assert!(fields.len() >= 3, "{fields:?}");
    for key in ["contract.K", "contract.T", "fft.n"] {
        assert!(fields.iter().any(|f| f.contains(key)), "{key} missing from {fields:?}");
    }
}

#[test]
fn zero_damping_is_rejected_with_its_region() {
    let err = parse_config(BENCHMARK_CONFIG, &set(&[("fft.eps", "0, 0")])).unwrap_err();
    assert!(err.to_string().contains("damping region"), "{err}");
}

#[test]
fn unknown_keys_and_sections_are_errors() {
    let text = format!("{BENCHMARK_CONFIG}\n[extra]\nfoo = 1\n");
    let err = parse_config(&text, &set(&[("model.sigmaa", "1")])).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("[extra]"), "{msg}");
    assert!(msg.contains("model.sigmaa"), "{msg}");
}

#[test]
fn syntax_errors_carry_a_line_number() {
    let err = parse_config("[model]\nvariant = proportional\nthis line has no equals\n", &[]).unwrap_err();
    match err {
        ConfigError::Parse { line, .. } => assert!(line >= 3, "line {line}"),
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn invalid_model_is_reported_per_field() {
    let err = parse_config(BENCHMARK_CONFIG, &set(&[("model.rho_ss", "1.5")])).unwrap_err();
    assert!(err.fields().iter().any(|f| f.starts_with("model.")), "{err}");
}

#[test]
fn independent_variant_parses() {
    let text = "[model]\nvariant = independent\nsigma = 1, 0.5\nkappa = 1, 2\nv_bar = 0.04\n\
                vol_of_vol = 0.05\nv0 = 0.04\nrho_sv = -0.5, 0.25\nlambda = 1\nk_bar = 0.05, 0.05\n\
                jump_std = 0.05, 0.05\njump_corr = 0\n[market]\ns0 = 100, 96\nr = 0.1\n\
                [contract]\nK = 2\nT = 1\n";
    let cfg = parse_config(text, &[]).unwrap();
    match cfg.model {
        SpreadModel::Independent(m) => {
            assert_eq!(m.cir[0].kappa, 1.0);
            assert_eq!(m.cir[1].kappa, 2.0);
            assert_eq!(m.cir[1].v_bar, 0.04);
        }
        _ => panic!("wrong variant"),
    }
    let rejected = format!("{text}[model]\nrho_ss = 0.5\n");
    assert!(parse_config(&rejected, &[]).is_err());
}

#[test]
fn fft_only_compare_leaves_mc_columns_empty() {
    let cfg = parse_config(BENCHMARK_CONFIG, &set(&[("mc.n_paths", "0")])).unwrap();
    let rows = commands::compare(&cfg, &[4.0, 2.0]).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].strike, 2.0);
    let mut buf = Vec::new();
    write_compare_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "K,mc_price,mc_stderr,fft_price,rel_err_percent");
    assert!(lines[1].starts_with("2,,,8.5458"), "{}", lines[1]);
    assert!(lines[2].ends_with(','), "{}", lines[2]);
}

#[test]
fn compare_is_reproducible_for_a_seed() {
    let cfg = parse_config(
        BENCHMARK_CONFIG,
        &set(&[
            ("mc.n_paths", "4000"),
            ("mc.n_steps", "50"),
            ("fft.n", "128"),
            ("fft.u_min", "20"),
        ]),
    )
    .unwrap();
    let run = || {
        let rows = commands::compare(&cfg, &[2.0, 3.0]).unwrap();
        let mut buf = Vec::new();
        write_compare_csv(&rows, &mut buf).unwrap();
        buf
    };
    let a = run();
    assert_eq!(a, run());
    let text = String::from_utf8(a).unwrap();
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields.len(), 5);
    assert!(fields.iter().all(|f| !f.is_empty()), "{fields:?}");
}

#[test]
fn one_cell_sweep_equals_price() {
    let text = format!("{BENCHMARK_CONFIG}\n[sweep]\nrows = contract.K\nrows_values = 3\n");
    let cfg = parse_config(&text, &[]).unwrap();
    let table = commands::sweep(&cfg).unwrap();
    assert_eq!(table.cells.len(), 1);
    let priced = parse_config(BENCHMARK_CONFIG, &set(&[("contract.K", "3")])).unwrap();
    let direct = commands::price(&priced).unwrap().price;
    assert_eq!(*table.cell(0, 0).price.as_ref().unwrap(), direct);
}

#[test]
fn failed_cells_become_error_markers() {
    let text =
        format!("{BENCHMARK_CONFIG}\n[sweep]\nrows = fft.eps[1]\nrows_values = 1, 3\ncols = fft.n\ncols_values = 64\n");
    let cfg = parse_config(&text, &set(&[("fft.u_min", "10")])).unwrap();
    let table = commands::sweep(&cfg).unwrap();
    assert_eq!(table.error_count(), 1);
    let mut buf = Vec::new();
    write_sweep_csv(&table, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "fft.eps[1]\\fft.n,64");
    assert!(!lines[1].contains("ERR"), "{}", lines[1]);
    assert_eq!(lines[2], "3,ERR:DampingViolation");
}

#[test]
fn sweep_rows_follow_the_configured_order() {
    let text = format!("{BENCHMARK_CONFIG}\n[sweep]\nrows = market.spread\nrows_range = 2, -2, 3\n");
    let cfg = parse_config(&text, &set(&[("fft.n", "128"), ("fft.u_min", "20")])).unwrap();
    let table = commands::sweep(&cfg).unwrap();
    assert_eq!(table.row_values, vec![2.0, 0.0, -2.0]);
    let p: Vec<f64> = table.cells.iter().map(|c| *c.price.as_ref().unwrap()).collect();
    assert!(p[0] > p[1] && p[1] > p[2], "{p:?}");
}

#[test]
fn selftest_passes() {
    let checks = commands::selftest();
    for c in &checks {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
}
