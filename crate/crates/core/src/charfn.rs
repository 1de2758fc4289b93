//! Closed-form characteristic functions of the log-price increment
//! `X_T - X_0` for both models.
//!
//! The continuous part is affine: `E[e^{iu·(X_T - X_0)}] = exp(C(s) + V0·D(s))`
//! with `s = T - t` and `D` solving the Riccati equation
//!
//! ```text
//! dD/ds = ζ - ω D + ½ θ² D²,     D(0) = 0
//! dC/ds = Σ i u(m) (r - λ k̄(m)) + κ v̄ D,   C(0) = 0
//! ```
//!
//! solved in closed form with `γ = √(ω² - 2θ²ζ)`. The jump part multiplies
//! in the compound Poisson factor `exp(τλ(exp(i u·k̄ - ½ uᵀΔu) - 1))`.
//!
//! The `e^{iu·X_0}` factor is left out everywhere: the FFT pricer places
//! `X_0` on its spatial lattice instead.

use core::f64::consts::PI;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::cmath;
use crate::error::{Error, Result};
use crate::model::{
    CirParams, IndependentVolModel, JumpParams, MarketState, ProportionalVolModel, SpreadModel, ZetaForm,
};

type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);

/// Coefficients of one Riccati equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiCoeffs {
    pub zeta: C64,
    pub omega: C64,
    /// Principal square root of `ω² - 2θ²ζ`.
    pub gamma: C64,
    /// `γ - ω`, computed as `-2θ²ζ / (γ + ω)` to stay accurate when the
    /// volatility of variance is tiny.
    pub gamma_minus_omega: C64,
}

impl RiccatiCoeffs {
    pub fn new(zeta: C64, omega: C64, vol_of_vol: f64) -> Self {
        let two_theta_sq = 2.0 * vol_of_vol * vol_of_vol;
        let gamma = (omega * omega - two_theta_sq * zeta).sqrt();
        // Re ω = κ > 0 and Re γ ≥ 0, so γ + ω never vanishes
        let gamma_minus_omega = -two_theta_sq * zeta / (gamma + omega);
        Self {
            zeta,
            omega,
            gamma,
            gamma_minus_omega,
        }
    }
}

/// The variance loading `D`: one value for the common variance, or one per
/// asset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VarianceLoading {
    Common(C64),
    PerAsset([C64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfValue {
    /// `φ(u)` without the `e^{iu·X_0}` factor.
    pub value: C64,
    pub log_c: C64,
    pub log_d: VarianceLoading,
    pub jump_factor: C64,
}

/// Compound Poisson characteristic function over `tau` years, at complex
/// `u`. The quadratic form is the bilinear `uᵀΔu`, not a Hermitian one.
pub fn jump_cf(u: [C64; 2], tau: f64, jumps: &JumpParams) -> C64 {
    if jumps.lambda == 0.0 || tau == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let d = &jumps.jump_cov;
    let quad = u[0] * u[0] * d[0][0] + u[0] * u[1] * (d[0][1] + d[1][0]) + u[1] * u[1] * d[1][1];
    let mean = u[0] * jumps.k_bar[0] + u[1] * jumps.k_bar[1];
    let inner = (I * mean - 0.5 * quad).exp() - 1.0;
    (tau * jumps.lambda * inner).exp()
}

/// `ζ`, `ω`, `γ` for the common-variance model:
/// `ζ = -½ [Σ σ(m)² (iu(m) + u(m)²) + 2 σ(1)σ(2) u(1)u(2) ρ_ss]`,
/// `ω = κ - iθ Σ ρ_sv(m) σ(m) u(m)`.
pub fn riccati_coeffs_proportional(u: [C64; 2], model: &ProportionalVolModel) -> RiccatiCoeffs {
    let [s1, s2] = model.sigma;
    let theta = model.cir.vol_of_vol;
    let diag = s1 * s1 * (I * u[0] + u[0] * u[0]) + s2 * s2 * (I * u[1] + u[1] * u[1]);
    let cross = 2.0 * s1 * s2 * model.rho_ss * u[0] * u[1];
    let zeta = -0.5 * (diag + cross);
    let loading = model.rho_sv[0] * s1 * u[0] + model.rho_sv[1] * s2 * u[1];
    let omega = model.cir.kappa - I * theta * loading;
    RiccatiCoeffs::new(zeta, omega, theta)
}

/// `ζ`, `ω`, `γ` for asset `asset` of the independent-variance model.
pub fn riccati_coeffs_independent(u_m: C64, asset: usize, model: &IndependentVolModel) -> RiccatiCoeffs {
    let sigma = model.sigma[asset];
    let cir = &model.cir[asset];
    let theta = cir.vol_of_vol;
    let zeta = match model.zeta_form {
        ZetaForm::Ode => -0.5 * sigma * sigma * (I * u_m + u_m * u_m),
        ZetaForm::AsPrinted => -0.5 * theta * theta * (I * u_m * sigma + u_m * u_m * sigma * sigma),
    };
    let omega = cir.kappa - I * theta * sigma * model.rho_sv[asset] * u_m;
    RiccatiCoeffs::new(zeta, omega, theta)
}

/// Closed-form `C(s)` and `D(s)`:
///
/// ```text
/// D(s) = 2ζ (1 - e^{-γs}) / (2γ - (γ - ω)(1 - e^{-γs}))
/// C(s) = drift·s - (κ v̄ / θ²) [2 ln((2γ - (γ - ω)(1 - e^{-γs})) / 2γ) + (γ - ω) s]
/// ```
///
/// `drift_term` is `Σ i u(m) (r - λ k̄(m))` over the assets this variance
/// factor covers. The logarithm is tracked continuously in `s` once
/// `|s Im γ| > π`.
pub fn cd_functions(coeffs: &RiccatiCoeffs, cir: &CirParams, drift_term: C64, s: f64) -> Result<(C64, C64)> {
    if s == 0.0 {
        return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
    }
    let RiccatiCoeffs {
        zeta,
        gamma,
        gamma_minus_omega: gm,
        ..
    } = *coeffs;
    let one_minus_e = |t: f64| -cmath::expm1(-gamma * t);
    let decay = one_minus_e(s);
    let den = 2.0 * gamma - gm * decay;
    let magnitude = den.norm();
    if magnitude < 1e-300 {
        return Err(Error::DegenerateDenominator { magnitude });
    }
    let d = 2.0 * zeta * decay / den;

    // ln(den / 2γ) = ln(1 + w(s)),  w(s) = -(γ - ω)(1 - e^{-γs}) / 2γ
    let w = |t: f64| -gm * one_minus_e(t) / (2.0 * gamma);
    let winding = (s * gamma.im).abs();
    let log_ratio = if winding <= PI {
        cmath::log1p(w(s))
    } else {
        let pieces = (winding / (0.5 * PI)).ceil() as usize;
        let h = s / pieces as f64;
        let mut acc = C64::new(0.0, 0.0);
        let mut w_prev = C64::new(0.0, 0.0);
        for k in 1..=pieces {
            let w_next = if k == pieces { w(s) } else { w(h * k as f64) };
            acc += cmath::log1p((w_next - w_prev) / (1.0 + w_prev));
            w_prev = w_next;
        }
        acc
    };
    let theta = cir.vol_of_vol;
    let scale = cir.kappa * cir.v_bar / (theta * theta);
    let c = drift_term * s - scale * (2.0 * log_ratio + gm * s);
    Ok((c, d))
}

fn drift(state: &MarketState, jumps: &JumpParams, asset: usize) -> f64 {
    state.r - jumps.lambda * jumps.k_bar[asset]
}

fn finish(u: [C64; 2], log_c: C64, log_v: C64, jump_factor: C64, log_d: VarianceLoading) -> Result<CfValue> {
    let value = (log_c + log_v).exp() * jump_factor;
    if !cmath::is_finite(value) || !cmath::is_finite(log_c) {
        return Err(Error::NonFinite { u });
    }
    Ok(CfValue {
        value,
        log_c,
        log_d,
        jump_factor,
    })
}

/// Characteristic function of `X_T - X_0` for the common-variance model.
pub fn cf_proportional(u: [C64; 2], tau: f64, model: &ProportionalVolModel, state: &MarketState) -> Result<CfValue> {
    let coeffs = riccati_coeffs_proportional(u, model);
    let drift_term = I * (u[0] * drift(state, &model.jumps, 0) + u[1] * drift(state, &model.jumps, 1));
    let (c, d) = cd_functions(&coeffs, &model.cir, drift_term, tau)?;
    let jump_factor = jump_cf(u, tau, &model.jumps);
    finish(u, c, model.cir.v0 * d, jump_factor, VarianceLoading::Common(d))
}

/// Characteristic function of `X_T - X_0` for the independent-variance
/// model: the product of the two per-asset Heston-type factors and the joint
/// jump factor.
pub fn cf_independent(u: [C64; 2], tau: f64, model: &IndependentVolModel, state: &MarketState) -> Result<CfValue> {
    let mut log_c = C64::new(0.0, 0.0);
    let mut log_v = C64::new(0.0, 0.0);
    let mut loading = [C64::new(0.0, 0.0); 2];
    for m in 0..2 {
        let coeffs = riccati_coeffs_independent(u[m], m, model);
        let drift_term = I * u[m] * drift(state, &model.jumps, m);
        let (c, d) = cd_functions(&coeffs, &model.cir[m], drift_term, tau)?;
        log_c += c;
        log_v += model.cir[m].v0 * d;
        loading[m] = d;
    }
    let jump_factor = jump_cf(u, tau, &model.jumps);
    finish(u, log_c, log_v, jump_factor, VarianceLoading::PerAsset(loading))
}

impl SpreadModel {
    /// Characteristic function of the log-price increment over `tau` years.
    pub fn cf(&self, u: [C64; 2], tau: f64, state: &MarketState) -> Result<CfValue> {
        match self {
            SpreadModel::Proportional(m) => cf_proportional(u, tau, m, state),
            SpreadModel::Independent(m) => cf_independent(u, tau, m, state),
        }
    }
}
