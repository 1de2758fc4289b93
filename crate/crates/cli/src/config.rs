//! Run configuration: a flat INI-style file with `[section]` headers,
//! `key = value` lines and `#` comments.
//!
//! Vector parameters are comma-separated (`s0 = 100, 96`). Under the
//! independent model the CIR keys take one value per asset, or a single
//! value shared by both.

use std::collections::BTreeMap;
use std::fmt;

use ini::{Ini, ParseOption};
use spreadfft_core::fft_pricer::{FftGridConfig, TransformSign};
use spreadfft_core::mc_engine::McConfig;
use spreadfft_core::model::{
    validate, CirParams, IndependentVolModel, JumpParams, MarketState, ProportionalVolModel, SpreadContract,
    SpreadModel, ZetaForm,
};

/// The shipped benchmark configuration, used when no file is given.
pub const BENCHMARK_CONFIG: &str = include_str!("../configs/benchmark.cfg");

const SECTIONS: [&str; 6] = ["model", "market", "contract", "fft", "mc", "sweep"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),
}

impl ConfigError {
    /// Field-level messages of a validation failure.
    pub fn fields(&self) -> &[String] {
        match self {
            ConfigError::Validation(v) => v,
            ConfigError::Parse { .. } => &[],
        }
    }
}

/// One sweep axis: a parameter path and the values it takes.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub param: String,
    pub values: Vec<f64>,
}

impl Axis {
    /// `count` evenly spaced values from `start` to `stop` inclusive.
    pub fn linspace(param: impl Into<String>, start: f64, stop: f64, count: usize) -> Self {
        let values = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| {
                    let v = start + (stop - start) * i as f64 / (count - 1) as f64;
                    (v * 1e12).round() / 1e12
                })
                .collect(),
        };
        Self {
            param: param.into(),
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub rows: Axis,
    pub cols: Option<Axis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: SpreadModel,
    pub market: MarketState,
    pub contract: SpreadContract,
    pub fft: FftGridConfig,
    /// `n_paths = 0` disables the Monte Carlo leg of `compare`.
    pub mc: McConfig,
    pub sweep: Option<SweepSpec>,
}

impl RunConfig {
    pub fn benchmark() -> Self {
        parse_config(BENCHMARK_CONFIG, &[]).expect("shipped benchmark config is valid")
    }
}

/// Parses, applies `overrides` (`section.key`, raw value) on top of the
/// file, fills defaults and validates.
pub fn parse_config(text: &str, overrides: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let opt = ParseOption {
        enabled_escape: false,
        ..ParseOption::default()
    };
    let ini = Ini::load_from_str_opt(text, opt).map_err(|e| ConfigError::Parse {
        line: e.line,
        msg: e.msg.into_owned(),
    })?;

    let mut errors = Vec::new();
    let mut raw = BTreeMap::new();
    for (section, props) in &ini {
        for (key, value) in props.iter() {
            match section {
                Some(s) if SECTIONS.contains(&s) => {
                    raw.insert(format!("{s}.{key}"), value.trim().to_string());
                }
                Some(s) => errors.push(format!("[{s}]: unknown section")),
                None => errors.push(format!("{key}: outside any section")),
            }
        }
    }
    for (key, value) in overrides {
        raw.insert(key.clone(), value.clone());
    }
    let mut reader = Reader { raw, errors };
    let cfg = reader.build();
    reader.finish(cfg)
}

/// Splits `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    Ok((k.trim().to_string(), v.trim().to_string()))
}

struct Reader {
    raw: BTreeMap<String, String>,
    errors: Vec<String>,
}

impl Reader {
    fn take(&mut self, key: &str) -> Option<String> {
        self.raw.remove(key)
    }

    fn list(&mut self, key: &str) -> Option<Vec<f64>> {
        let s = self.take(key)?;
        let parsed: Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
        match parsed {
            Ok(v) => Some(v),
            Err(_) => {
                self.errors.push(format!("{key}: expected numbers, got `{s}`"));
                None
            }
        }
    }

    fn scalar(&mut self, key: &str) -> Option<f64> {
        let v = self.list(key)?;
        if v.len() == 1 {
            Some(v[0])
        } else {
            self.errors.push(format!("{key}: expected one value, got {}", v.len()));
            None
        }
    }

    fn pair(&mut self, key: &str) -> Option<[f64; 2]> {
        let v = self.list(key)?;
        if v.len() == 2 {
            Some([v[0], v[1]])
        } else {
            self.errors.push(format!("{key}: expected two values, got {}", v.len()));
            None
        }
    }

    /// One value broadcast to both assets, or one per asset.
    fn per_asset(&mut self, key: &str) -> Option<[f64; 2]> {
        let v = self.list(key)?;
        match v[..] {
            [a] => Some([a, a]),
            [a, b] => Some([a, b]),
            _ => {
                self.errors
                    .push(format!("{key}: expected one or two values, got {}", v.len()));
                None
            }
        }
    }

    fn required<T>(&mut self, key: &str, v: Option<T>) -> Option<T> {
        if v.is_none() && !self.errors.iter().any(|e| e.starts_with(key)) {
            self.errors.push(format!("{key}: missing"));
        }
        v
    }

    fn req_scalar(&mut self, key: &str) -> Option<f64> {
        let v = self.scalar(key);
        self.required(key, v)
    }

    fn req_pair(&mut self, key: &str) -> Option<[f64; 2]> {
        let v = self.pair(key);
        self.required(key, v)
    }

    fn req_per_asset(&mut self, key: &str) -> Option<[f64; 2]> {
        let v = self.per_asset(key);
        self.required(key, v)
    }

    fn count(&mut self, key: &str, default: usize) -> usize {
        match self.take(key) {
            None => default,
            Some(s) => s.parse().unwrap_or_else(|_| {
                self.errors
                    .push(format!("{key}: expected a non-negative integer, got `{s}`"));
                default
            }),
        }
    }

    fn flag(&mut self, key: &str) -> bool {
        match self.take(key).as_deref() {
            None | Some("false") | Some("no") | Some("0") => false,
            Some("true") | Some("yes") | Some("1") => true,
            Some(s) => {
                self.errors.push(format!("{key}: expected true or false, got `{s}`"));
                false
            }
        }
    }

    fn jumps(&mut self) -> JumpParams {
        let lambda = self.scalar("model.lambda").unwrap_or(0.0);
        let k_bar = self.pair("model.k_bar").unwrap_or([0.0; 2]);
        let std = self.pair("model.jump_std").unwrap_or([0.0; 2]);
        let corr = self.scalar("model.jump_corr").unwrap_or(0.0);
        JumpParams::from_std(lambda, k_bar, std, corr)
    }

    fn model(&mut self) -> Option<SpreadModel> {
        let variant = self.take("model.variant");
        let variant = self.required("model.variant", variant)?;
        match variant.as_str() {
            "proportional" => {
                let sigma = self.req_pair("model.sigma");
                let kappa = self.req_scalar("model.kappa");
                let v_bar = self.req_scalar("model.v_bar");
                let theta = self.req_scalar("model.vol_of_vol");
                let v0 = self.req_scalar("model.v0");
                let rho_ss = self.req_scalar("model.rho_ss");
                let rho_sv = self.req_pair("model.rho_sv");
                let jumps = self.jumps();
                if self.raw.remove("model.zeta_form").is_some() {
                    self.errors
                        .push("model.zeta_form: only used by the independent model".into());
                }
                Some(SpreadModel::Proportional(ProportionalVolModel {
                    sigma: sigma?,
                    cir: CirParams::new(kappa?, v_bar?, theta?, v0?),
                    rho_ss: rho_ss?,
                    rho_sv: rho_sv?,
                    jumps,
                }))
            }
            "independent" => {
                let sigma = self.req_pair("model.sigma");
                let kappa = self.req_per_asset("model.kappa");
                let v_bar = self.req_per_asset("model.v_bar");
                let theta = self.req_per_asset("model.vol_of_vol");
                let v0 = self.req_per_asset("model.v0");
                let rho_sv = self.req_pair("model.rho_sv");
                let jumps = self.jumps();
                if self.raw.remove("model.rho_ss").is_some() {
                    self.errors
                        .push("model.rho_ss: the independent model has no asset-asset correlation".into());
                }
                let zeta_form = match self.take("model.zeta_form").as_deref() {
                    None | Some("ode") => ZetaForm::Ode,
                    Some("as_printed") => ZetaForm::AsPrinted,
                    Some(s) => {
                        self.errors
                            .push(format!("model.zeta_form: expected ode or as_printed, got `{s}`"));
                        ZetaForm::Ode
                    }
                };
                let (kappa, v_bar, theta, v0) = (kappa?, v_bar?, theta?, v0?);
                let cir = [0, 1].map(|m| CirParams::new(kappa[m], v_bar[m], theta[m], v0[m]));
                Some(SpreadModel::Independent(IndependentVolModel {
                    sigma: sigma?,
                    cir,
                    rho_sv: rho_sv?,
                    jumps,
                    zeta_form,
                }))
            }
            other => {
                self.errors.push(format!(
                    "model.variant: expected proportional or independent, got `{other}`"
                ));
                None
            }
        }
    }

    fn axis(&mut self, name: &str) -> Option<Axis> {
        let param = self.take(&format!("sweep.{name}"));
        let values = self.list(&format!("sweep.{name}_values"));
        let range = self.list(&format!("sweep.{name}_range"));
        let param = match param {
            Some(p) => p,
            None => {
                if values.is_some() || range.is_some() {
                    self.errors.push(format!("sweep.{name}: missing parameter name"));
                }
                return None;
            }
        };
        match (values, range) {
            (Some(v), None) => Some(Axis { param, values: v }),
            (None, Some(r)) if r.len() == 3 && r[2] >= 1.0 && r[2].fract() == 0.0 => {
                Some(Axis::linspace(param, r[0], r[1], r[2] as usize))
            }
            (None, Some(_)) => {
                self.errors
                    .push(format!("sweep.{name}_range: expected start, stop, count"));
                None
            }
            _ => {
                self.errors.push(format!(
                    "sweep.{name}: give exactly one of {name}_values and {name}_range"
                ));
                None
            }
        }
    }

    fn build(&mut self) -> Option<RunConfig> {
        let model = self.model();
        let s0 = self.req_pair("market.s0");
        let r = self.req_scalar("market.r");
        let strike = self.req_scalar("contract.K");
        let maturity = self.req_scalar("contract.T");

        let defaults = FftGridConfig::default();
        let n = self.count("fft.n", defaults.n);
        let u_min = self.scalar("fft.u_min").unwrap_or(defaults.u_min);
        let eps = self.pair("fft.eps").unwrap_or(defaults.eps);
        let sign = match self.take("fft.sign_convention").as_deref() {
            None | Some("positive") => TransformSign::Positive,
            Some("negative") => TransformSign::Negative,
            Some(s) => {
                self.errors
                    .push(format!("fft.sign_convention: expected positive or negative, got `{s}`"));
                TransformSign::Positive
            }
        };

        let mc = McConfig {
            n_paths: self.count("mc.n_paths", 100_000),
            n_steps: self.count("mc.n_steps", 500),
            seed: self.count("mc.seed", 1) as u64,
            antithetic: self.flag("mc.antithetic"),
        };

        let rows = self.axis("rows");
        let cols = self.axis("cols");
        let sweep = match (rows, cols) {
            (Some(rows), cols) => Some(SweepSpec { rows, cols }),
            (None, Some(_)) => {
                self.errors.push("sweep.rows: required when sweep.cols is set".into());
                None
            }
            (None, None) => None,
        };

        Some(RunConfig {
            model: model?,
            market: MarketState { s0: s0?, r: r? },
            contract: SpreadContract {
                strike: strike?,
                maturity: maturity?,
            },
            fft: FftGridConfig { n, u_min, eps, sign },
            mc,
            sweep,
        })
    }

    fn finish(mut self, cfg: Option<RunConfig>) -> Result<RunConfig, ConfigError> {
        for key in self.raw.keys() {
            self.errors.push(format!("{key}: unknown key"));
        }
        if let Some(cfg) = &cfg {
            semantic_checks(cfg, &mut self.errors);
        }
        match cfg {
            Some(cfg) if self.errors.is_empty() => Ok(cfg),
            _ => Err(ConfigError::Validation(self.errors)),
        }
    }
}

fn semantic_checks(cfg: &RunConfig, errors: &mut Vec<String>) {
    let report = validate(&cfg.model);
    errors.extend(report.violations.iter().map(|v| format!("model.{v}")));
    if !(cfg.contract.strike > 0.0 && cfg.contract.strike.is_finite()) {
        errors.push(format!("contract.K: must be positive (got {})", cfg.contract.strike));
    }
    if !(cfg.contract.maturity > 0.0 && cfg.contract.maturity.is_finite()) {
        errors.push(format!("contract.T: must be positive (got {})", cfg.contract.maturity));
    }
    if cfg.market.check().is_err() {
        errors.push("market.s0: spots must be positive".into());
    }
    let fft = &cfg.fft;
    if !fft.n.is_power_of_two() || !(64..=4096).contains(&fft.n) {
        errors.push(format!("fft.n: must be a power of two in [64, 4096] (got {})", fft.n));
    }
    if !(fft.u_min > 0.0 && fft.u_min.is_finite()) {
        errors.push(format!("fft.u_min: must be positive (got {})", fft.u_min));
    }
    if spreadfft_core::payoff_transform::check_damping(fft.eps).is_err() {
        errors.push(format!(
            "fft.eps: ({}, {}) is outside the damping region (eps2 > 0, eps1 + eps2 < -1)",
            fft.eps[0], fft.eps[1]
        ));
    }
    if cfg.mc.n_paths == 1 {
        errors.push("mc.n_paths: must be 0 (disabled) or at least 2".into());
    }
    if cfg.mc.n_steps == 0 {
        errors.push("mc.n_steps: must be at least 1".into());
    }
    if let Some(sweep) = &cfg.sweep {
        for (name, axis) in [("rows", Some(&sweep.rows)), ("cols", sweep.cols.as_ref())] {
            let Some(axis) = axis else { continue };
            if axis.values.is_empty() {
                errors.push(format!("sweep.{name}: no values"));
            }
            let mut probe = cfg.clone();
            if let Err(e) = set_param(&mut probe, &axis.param, axis.values.first().copied().unwrap_or(0.0)) {
                errors.push(format!("sweep.{name}: {e}"));
            }
        }
    }
}

/// A parameter path such as `model.lambda`, `model.sigma[1]` or
/// `market.spread`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ParamPath<'a> {
    section: &'a str,
    name: &'a str,
    index: Option<usize>,
}

impl<'a> ParamPath<'a> {
    fn parse(path: &'a str) -> Result<Self, String> {
        let (section, rest) = path
            .split_once('.')
            .ok_or_else(|| format!("`{path}` is not a section.key path"))?;
        let (name, index) = match rest.split_once('[') {
            None => (rest, None),
            Some((name, idx)) => {
                let i = idx
                    .strip_suffix(']')
                    .and_then(|i| i.parse::<usize>().ok())
                    .filter(|&i| i < 2)
                    .ok_or_else(|| format!("`{path}`: index must be [0] or [1]"))?;
                (name, Some(i))
            }
        };
        Ok(Self { section, name, index })
    }
}

impl fmt::Display for ParamPath<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.section, self.name)?;
        if let Some(i) = self.index {
            write!(f, "[{i}]")?;
        }
        Ok(())
    }
}

fn set_vec(target: &mut [f64; 2], index: Option<usize>, value: f64) {
    match index {
        Some(i) => target[i] = value,
        None => *target = [value; 2],
    }
}

fn scalar_only(p: &ParamPath, target: &mut f64, value: f64) -> Result<(), String> {
    if p.index.is_some() {
        return Err(format!("`{p}` is a scalar"));
    }
    *target = value;
    Ok(())
}

fn cir_field<'c>(c: &'c mut CirParams, name: &str) -> Option<&'c mut f64> {
    match name {
        "kappa" => Some(&mut c.kappa),
        "v_bar" => Some(&mut c.v_bar),
        "vol_of_vol" => Some(&mut c.vol_of_vol),
        "v0" => Some(&mut c.v0),
        _ => None,
    }
}

fn set_cir(cir: &mut [&mut CirParams], p: &ParamPath, value: f64) -> Result<(), String> {
    let targets: Vec<usize> = match (p.index, cir.len()) {
        (None, n) => (0..n).collect(),
        (Some(i), 2) => vec![i],
        (Some(_), _) => return Err(format!("`{p}` has a single value under the proportional model")),
    };
    for i in targets {
        *cir_field(cir[i], p.name).ok_or_else(|| format!("unknown parameter `{p}`"))? = value;
    }
    Ok(())
}

fn set_jumps(j: &mut JumpParams, p: &ParamPath, value: f64) -> Result<(), String> {
    match p.name {
        "lambda" => scalar_only(p, &mut j.lambda, value),
        "k_bar" => {
            set_vec(&mut j.k_bar, p.index, value);
            Ok(())
        }
        "jump_std" => {
            let mut std = j.jump_std();
            set_vec(&mut std, p.index, value);
            *j = JumpParams::from_std(j.lambda, j.k_bar, std, j.jump_corr());
            Ok(())
        }
        "jump_corr" => {
            let mut corr = j.jump_corr();
            scalar_only(p, &mut corr, value)?;
            *j = JumpParams::from_std(j.lambda, j.k_bar, j.jump_std(), corr);
            Ok(())
        }
        _ => Err(format!("unknown parameter `{p}`")),
    }
}

/// Sets one numeric parameter in place. Vector parameters without an index
/// set both entries. `market.spread` moves `s0[0]` to `s0[1] + value`.
pub fn set_param(cfg: &mut RunConfig, path: &str, value: f64) -> Result<(), String> {
    let p = ParamPath::parse(path)?;
    match p.section {
        "model" => set_model_param(&mut cfg.model, &p, value),
        "market" => match p.name {
            "s0" => {
                set_vec(&mut cfg.market.s0, p.index, value);
                Ok(())
            }
            "r" => scalar_only(&p, &mut cfg.market.r, value),
            "spread" => {
                let mut s1 = 0.0;
                scalar_only(&p, &mut s1, value)?;
                cfg.market.s0[0] = cfg.market.s0[1] + s1;
                Ok(())
            }
            _ => Err(format!("unknown parameter `{p}`")),
        },
        "contract" => match p.name {
            "K" => scalar_only(&p, &mut cfg.contract.strike, value),
            "T" => scalar_only(&p, &mut cfg.contract.maturity, value),
            _ => Err(format!("unknown parameter `{p}`")),
        },
        "fft" => match p.name {
            "n" if p.index.is_none() && value >= 0.0 && value.fract() == 0.0 => {
                cfg.fft.n = value as usize;
                Ok(())
            }
            "n" => Err(format!("`{p}` must be a non-negative integer")),
            "u_min" => scalar_only(&p, &mut cfg.fft.u_min, value),
            "eps" => {
                set_vec(&mut cfg.fft.eps, p.index, value);
                Ok(())
            }
            _ => Err(format!("unknown parameter `{p}`")),
        },
        _ => Err(format!("`{p}` cannot be swept")),
    }
}

fn set_model_param(model: &mut SpreadModel, p: &ParamPath, value: f64) -> Result<(), String> {
    match model {
        SpreadModel::Proportional(m) => match p.name {
            "sigma" => {
                set_vec(&mut m.sigma, p.index, value);
                Ok(())
            }
            "rho_ss" => scalar_only(p, &mut m.rho_ss, value),
            "rho_sv" => {
                set_vec(&mut m.rho_sv, p.index, value);
                Ok(())
            }
            "kappa" | "v_bar" | "vol_of_vol" | "v0" => set_cir(&mut [&mut m.cir], p, value),
            _ => set_jumps(&mut m.jumps, p, value),
        },
        SpreadModel::Independent(m) => match p.name {
            "sigma" => {
                set_vec(&mut m.sigma, p.index, value);
                Ok(())
            }
            "rho_sv" => {
                set_vec(&mut m.rho_sv, p.index, value);
                Ok(())
            }
            "kappa" | "v_bar" | "vol_of_vol" | "v0" => {
                let [a, b] = &mut m.cir;
                set_cir(&mut [a, b], p, value)
            }
            "rho_ss" => Err("the independent model has no `model.rho_ss`".into()),
            _ => set_jumps(&mut m.jumps, p, value),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_paths() {
        let p = ParamPath::parse("model.sigma[1]").unwrap();
        assert_eq!((p.section, p.name, p.index), ("model", "sigma", Some(1)));
        assert!(ParamPath::parse("model.sigma[2]").is_err());
        assert!(ParamPath::parse("lambda").is_err());
        assert_eq!(ParamPath::parse("fft.eps[0]").unwrap().to_string(), "fft.eps[0]");
    }

    #[test]
    fn linspace_hits_both_ends() {
        let a = Axis::linspace("x", -1.0, 0.8, 10);
        assert_eq!(a.values.len(), 10);
        assert_eq!(a.values[0], -1.0);
        assert_eq!(a.values[9], 0.8);
        assert_eq!(a.values[5], 0.0);
        assert_eq!(Axis::linspace("x", 3.0, 9.0, 1).values, vec![3.0]);
    }

    #[test]
    fn overrides_split_on_first_equals() {
        assert_eq!(
            parse_override("fft.eps = -2, 1").unwrap(),
            ("fft.eps".into(), "-2, 1".into())
        );
        assert!(parse_override("fft.eps").is_err());
    }
}
