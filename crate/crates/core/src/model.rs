//! Parameter sets for the two market models and their validation.
//!
//! Both models share the log-price dynamics
//!
//! ```text
//! dX(m) = (r - λ k̄(m) - ½ σ(m)² V) dt + σ(m) √V dW_S(m) + dZ(m)
//! dV    = κ (v̄ - V) dt + θ √V dW_V
//! ```
//!
//! and differ in the variance: the proportional model drives both assets
//! with one CIR variance, the independent model gives each asset its own.
//! Jumps arrive on a common Poisson clock with jointly normal log-sizes.

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Cox–Ingersoll–Ross variance parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirParams {
    /// Mean-reversion speed, per year.
    pub kappa: f64,
    /// Long-run variance level.
    pub v_bar: f64,
    /// Volatility of variance, per √year.
    pub vol_of_vol: f64,
    /// Initial variance.
    pub v0: f64,
}

impl CirParams {
    pub const fn new(kappa: f64, v_bar: f64, vol_of_vol: f64, v0: f64) -> Self {
        Self {
            kappa,
            v_bar,
            vol_of_vol,
            v0,
        }
    }

    /// `2 κ v̄ / θ²`; the variance stays strictly positive when this is ≥ 1.
    pub fn feller_ratio(&self) -> f64 {
        2.0 * self.kappa * self.v_bar / (self.vol_of_vol * self.vol_of_vol)
    }

    /// Closed-form `E[V_t]`.
    pub fn mean_variance(&self, t: f64) -> f64 {
        self.v_bar + (self.v0 - self.v_bar) * (-self.kappa * t).exp()
    }

    fn check(&self, names: [&'static str; 4], report: &mut ValidationReport) {
        report.positive(names[0], self.kappa);
        report.positive(names[1], self.v_bar);
        report.positive(names[2], self.vol_of_vol);
        report.non_negative(names[3], self.v0);
        let ratio = self.feller_ratio();
        if ratio.is_finite() && ratio < 1.0 {
            report
                .warnings
                .push(ValidationWarning::FellerViolated { field: names[2], ratio });
        }
    }
}

/// Compound Poisson jumps on a common clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpParams {
    /// Jump intensity, per year.
    pub lambda: f64,
    /// Mean log-jump size per asset.
    pub k_bar: [f64; 2],
    /// Covariance of the log-jump sizes.
    pub jump_cov: [[f64; 2]; 2],
}

impl JumpParams {
    /// Builds the covariance from per-asset standard deviations and a
    /// correlation.
    pub fn from_std(lambda: f64, k_bar: [f64; 2], std: [f64; 2], corr: f64) -> Self {
        let off = corr * std[0] * std[1];
        Self {
            lambda,
            k_bar,
            jump_cov: [[std[0] * std[0], off], [off, std[1] * std[1]]],
        }
    }

    pub fn jump_std(&self) -> [f64; 2] {
        [self.jump_cov[0][0].max(0.0).sqrt(), self.jump_cov[1][1].max(0.0).sqrt()]
    }

    /// Correlation of the two log-jump sizes; zero when either variance is.
    pub fn jump_corr(&self) -> f64 {
        let [s1, s2] = self.jump_std();
        if s1 > 0.0 && s2 > 0.0 {
            self.jump_cov[0][1] / (s1 * s2)
        } else {
            0.0
        }
    }

    fn check(&self, report: &mut ValidationReport) {
        report.non_negative("lambda", self.lambda);
        report.finite("k_bar[0]", self.k_bar[0]);
        report.finite("k_bar[1]", self.k_bar[1]);
        let c = &self.jump_cov;
        if c.iter().flatten().any(|v| !v.is_finite()) {
            report.violations.push(Violation::NonFinite { field: "jump_cov" });
            return;
        }
        if (c[0][1] - c[1][0]).abs() > 1e-12 * (1.0 + c[0][1].abs()) {
            report.violations.push(Violation::JumpCovAsymmetric);
        }
        if Cholesky::factor(c).is_err() {
            report.violations.push(Violation::JumpCovNotPsd);
        }
    }
}

/// Which expression for the per-asset Riccati coefficient ζ the
/// independent model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZetaForm {
    /// `ζ = -½ σ² (iu + u²)`, the coefficient of the Riccati ODE that `C`
    /// and `D` actually solve.
    #[default]
    Ode,
    /// `ζ = -½ θ² (iuσ + u²σ²)`, kept for comparison only. It does not match
    /// simulated dynamics.
    AsPrinted,
}

/// Each asset has its own CIR variance, correlated only with its own asset.
/// Cross-asset dependence comes from the jumps alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependentVolModel {
    pub sigma: [f64; 2],
    pub cir: [CirParams; 2],
    /// Correlation between asset m and its own variance driver.
    pub rho_sv: [f64; 2],
    pub jumps: JumpParams,
    pub zeta_form: ZetaForm,
}

impl IndependentVolModel {
    /// 4×4 driver correlation in the order `(W_S1, W_S2, W_V1, W_V2)`.
    pub fn driver_correlation(&self) -> [[f64; 4]; 4] {
        let [a, b] = self.rho_sv;
        [
            [1.0, 0.0, a, 0.0],
            [0.0, 1.0, 0.0, b],
            [a, 0.0, 1.0, 0.0],
            [0.0, b, 0.0, 1.0],
        ]
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        report.non_negative("sigma[0]", self.sigma[0]);
        report.non_negative("sigma[1]", self.sigma[1]);
        self.cir[0].check(["kappa[0]", "v_bar[0]", "vol_of_vol[0]", "v0[0]"], &mut report);
        self.cir[1].check(["kappa[1]", "v_bar[1]", "vol_of_vol[1]", "v0[1]"], &mut report);
        report.correlation("rho_sv[0]", self.rho_sv[0]);
        report.correlation("rho_sv[1]", self.rho_sv[1]);
        self.jumps.check(&mut report);
        if report.violations.is_empty() {
            report.check_correlation_matrix(&self.driver_correlation());
        }
        report
    }
}

/// Both assets share one CIR variance, scaled per asset by `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionalVolModel {
    pub sigma: [f64; 2],
    pub cir: CirParams,
    /// Correlation between the two asset drivers.
    pub rho_ss: f64,
    /// Correlation between each asset driver and the variance driver.
    pub rho_sv: [f64; 2],
    pub jumps: JumpParams,
}

impl ProportionalVolModel {
    /// 3×3 driver correlation in the order `(W_S1, W_S2, W_V)`.
    pub fn driver_correlation(&self) -> [[f64; 3]; 3] {
        let [a, b] = self.rho_sv;
        let r = self.rho_ss;
        [[1.0, r, a], [r, 1.0, b], [a, b, 1.0]]
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        report.non_negative("sigma[0]", self.sigma[0]);
        report.non_negative("sigma[1]", self.sigma[1]);
        self.cir.check(["kappa", "v_bar", "vol_of_vol", "v0"], &mut report);
        report.correlation("rho_ss", self.rho_ss);
        report.correlation("rho_sv[0]", self.rho_sv[0]);
        report.correlation("rho_sv[1]", self.rho_sv[1]);
        self.jumps.check(&mut report);
        if report.violations.is_empty() {
            report.check_correlation_matrix(&self.driver_correlation());
        }
        report
    }
}

/// Either of the two market models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpreadModel {
    Proportional(ProportionalVolModel),
    Independent(IndependentVolModel),
}

impl SpreadModel {
    pub fn jumps(&self) -> &JumpParams {
        match self {
            SpreadModel::Proportional(m) => &m.jumps,
            SpreadModel::Independent(m) => &m.jumps,
        }
    }

    pub fn sigma(&self) -> [f64; 2] {
        match self {
            SpreadModel::Proportional(m) => m.sigma,
            SpreadModel::Independent(m) => m.sigma,
        }
    }
}

impl From<ProportionalVolModel> for SpreadModel {
    fn from(m: ProportionalVolModel) -> Self {
        SpreadModel::Proportional(m)
    }
}

impl From<IndependentVolModel> for SpreadModel {
    fn from(m: IndependentVolModel) -> Self {
        SpreadModel::Independent(m)
    }
}

/// Checks every model invariant. Never fails; callers decide what to do
/// with the report.
pub fn validate(model: &SpreadModel) -> ValidationReport {
    match model {
        SpreadModel::Proportional(m) => m.validate(),
        SpreadModel::Independent(m) => m.validate(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState {
    /// Initial spot prices.
    pub s0: [f64; 2],
    /// Continuously compounded risk-free rate, per year.
    pub r: f64,
}

impl MarketState {
    pub fn check(&self) -> Result<()> {
        if !(self.s0[0] > 0.0 && self.s0[1] > 0.0) {
            return Err(Error::InvalidMarket("spot prices must be strictly positive"));
        }
        if !self.r.is_finite() {
            return Err(Error::InvalidMarket("rate must be finite"));
        }
        Ok(())
    }

    pub fn log_spot(&self) -> [f64; 2] {
        [self.s0[0].ln(), self.s0[1].ln()]
    }
}

/// European call on `S1 - S2` with strike `K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadContract {
    pub strike: f64,
    /// Years.
    pub maturity: f64,
}

impl SpreadContract {
    pub fn new(strike: f64, maturity: f64) -> Result<Self> {
        let c = Self { strike, maturity };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.strike > 0.0 && self.strike.is_finite()) {
            return Err(Error::InvalidContract("strike must be positive"));
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(Error::InvalidContract("maturity must be positive"));
        }
        Ok(())
    }

    pub fn payoff(&self, s1: f64, s2: f64) -> f64 {
        (s1 - s2 - self.strike).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Violation {
    NonPositive { field: &'static str, value: f64 },
    Negative { field: &'static str, value: f64 },
    NonFinite { field: &'static str },
    CorrelationOutOfRange { field: &'static str, value: f64 },
    CorrelationNotPsd,
    JumpCovAsymmetric,
    JumpCovNotPsd,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPositive { field, value } => write!(f, "{field} must be positive (got {value})"),
            Violation::Negative { field, value } => write!(f, "{field} must be non-negative (got {value})"),
            Violation::NonFinite { field } => write!(f, "{field} is not finite"),
            Violation::CorrelationOutOfRange { field, value } => {
                write!(f, "correlation out of range: {field} = {value}")
            }
            Violation::CorrelationNotPsd => f.write_str("correlation matrix not PSD"),
            Violation::JumpCovAsymmetric => f.write_str("jump covariance not symmetric"),
            Violation::JumpCovNotPsd => f.write_str("jump covariance not PSD"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValidationWarning {
    /// `2 κ v̄ / θ² < 1`.
    FellerViolated { field: &'static str, ratio: f64 },
    /// Smallest Cholesky pivot of the driver correlation is below 1e-8.
    NearSingularCorrelation { min_pivot: f64 },
}

impl fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationWarning::FellerViolated { field, ratio } => {
                write!(f, "Feller condition violated ({field}: ratio {ratio:.4})")
            }
            ValidationWarning::NearSingularCorrelation { min_pivot } => {
                write!(f, "near-singular correlation matrix (min pivot {min_pivot:e})")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<ValidationWarning>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// Turns a report with violations into [`Error::InvalidModel`].
    pub fn into_result(self) -> Result<Vec<ValidationWarning>> {
        if self.is_valid() {
            Ok(self.warnings)
        } else {
            Err(Error::InvalidModel(self))
        }
    }

    fn finite(&mut self, field: &'static str, value: f64) -> bool {
        if value.is_finite() {
            true
        } else {
            self.violations.push(Violation::NonFinite { field });
            false
        }
    }

    fn positive(&mut self, field: &'static str, value: f64) {
        if self.finite(field, value) && value <= 0.0 {
            self.violations.push(Violation::NonPositive { field, value });
        }
    }

    fn non_negative(&mut self, field: &'static str, value: f64) {
        if self.finite(field, value) && value < 0.0 {
            self.violations.push(Violation::Negative { field, value });
        }
    }

    fn correlation(&mut self, field: &'static str, value: f64) {
        if self.finite(field, value) && !(-1.0..=1.0).contains(&value) {
            self.violations.push(Violation::CorrelationOutOfRange { field, value });
        }
    }

    fn check_correlation_matrix<const N: usize>(&mut self, corr: &[[f64; N]; N]) {
        match Cholesky::factor(corr) {
            Ok(f) if f.min_pivot < 1e-8 => self
                .warnings
                .push(ValidationWarning::NearSingularCorrelation { min_pivot: f.min_pivot }),
            Ok(_) => {}
            Err(_) => self.violations.push(Violation::CorrelationNotPsd),
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The benchmark parameter set used throughout the numerical study.
pub fn benchmark_proportional() -> (ProportionalVolModel, MarketState) {
    let model = ProportionalVolModel {
        sigma: [1.0, 0.5],
        cir: CirParams::new(1.0, 0.04, 0.05, 0.04),
        rho_ss: 0.5,
        rho_sv: [-0.5, 0.25],
        jumps: JumpParams::from_std(1.0, [0.05, 0.05], [0.05, 0.05], 0.0),
    };
    let state = MarketState {
        s0: [100.0, 96.0],
        r: 0.1,
    };
    (model, state)
}

/// The benchmark parameters carried over to the independent model: both
/// assets get the benchmark CIR process and their own asset–variance
/// correlation.
pub fn benchmark_independent() -> (IndependentVolModel, MarketState) {
    let (p, state) = benchmark_proportional();
    let model = IndependentVolModel {
        sigma: p.sigma,
        cir: [p.cir, p.cir],
        rho_sv: p.rho_sv,
        jumps: p.jumps,
        zeta_form: ZetaForm::Ode,
    };
    (model, state)
}
