//! Damped two-dimensional FFT pricing of the spread call.
//!
//! With `x = log(S/K)` and the unit-strike payoff transform `Ĥ`, the price is
//!
//! ```text
//! V = K e^{-rT} (2π)^{-2} ∫_{ℝ² + iε} e^{iu·x0} φ(u) Ĥ(u) d²u
//! ```
//!
//! Sampling `u(k) = -ū + k·du` and `x(l) = -x̄ + l·dx` per axis with
//! `du·dx = 2π/N` turns the integral into a single 2D inverse DFT:
//!
//! ```text
//! V(x(l)) ≈ K (-1)^{l1+l2} e^{-rT} du1 du2 N² / (4π²) e^{-ε·x(l)} ifft2(G)(l)
//! G(k)     = (-1)^{k1+k2} φ(u(k) + iε) Ĥ(u(k) + iε)
//! ```
//!
//! The per-axis steps are chosen so that `x0` lands exactly on a lattice
//! node, which removes any interpolation.

pub mod dft;

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub use dft::{inverse_dft2, ComplexMatrix, Radix2Plan, TransformSign};

use crate::error::{Error, Result};
use crate::model::{validate, MarketState, SpreadContract, SpreadModel, ValidationWarning};
use crate::payoff_transform::{check_damping, damping_warnings, payoff_hat_unchecked, DampedArgument, DampingWarning};

/// Grid sizes accepted by [`FftGridConfig::check`].
pub const MIN_POINTS: usize = 64;
pub const MAX_POINTS: usize = 4096;

/// `|x0|` below this is treated as at-the-money on that axis.
const ATM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FftGridConfig {
    /// Points per axis; a power of two in `[64, 4096]`.
    pub n: usize,
    /// Lower bound on the frequency half-width `ū` of each axis.
    pub u_min: f64,
    /// Damping vector `ε`.
    pub eps: [f64; 2],
    pub sign: TransformSign,
}

impl Default for FftGridConfig {
    fn default() -> Self {
        Self {
            n: 512,
            u_min: 40.0,
            eps: [-3.0, 1.0],
            sign: TransformSign::Positive,
        }
    }
}

impl FftGridConfig {
    pub fn check(&self) -> Result<()> {
        if !self.n.is_power_of_two() || !(MIN_POINTS..=MAX_POINTS).contains(&self.n) {
            return Err(Error::InvalidGrid("n must be a power of two in [64, 4096]"));
        }
        if !(self.u_min > 0.0 && self.u_min.is_finite()) {
            return Err(Error::InvalidGrid("u_min must be positive"));
        }
        check_damping(self.eps)
    }
}

/// The frequency and log-price lattices of one pricing run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FftGrid {
    pub n: usize,
    /// Frequency steps per axis.
    pub du: [f64; 2],
    /// Log-price steps per axis, `2π / (N du)`.
    pub dx: [f64; 2],
    /// Frequency half-widths, `N du / 2`.
    pub u_bar: [f64; 2],
    /// Log-price half-widths, `N dx / 2`.
    pub x_bar: [f64; 2],
    /// Lattice index of the initial log-moneyness on each axis.
    pub target_index: [usize; 2],
    /// Initial log-moneyness `log(S0 / K)`.
    pub x0: [f64; 2],
    pub eps: [f64; 2],
}

impl FftGrid {
    /// `u(k) = -ū + k du` on `axis`.
    #[inline]
    pub fn u(&self, axis: usize, k: usize) -> f64 {
        -self.u_bar[axis] + k as f64 * self.du[axis]
    }

    /// `x(l) = -x̄ + l dx` on `axis`.
    #[inline]
    pub fn x(&self, axis: usize, l: usize) -> f64 {
        -self.x_bar[axis] + l as f64 * self.dx[axis]
    }
}

/// Chooses the frequency step of one axis so that `x0` falls on the
/// log-price lattice.
///
/// Node `j` sits at `x(j) = (j - N/2) dx` and `dx = π / ū`, so `x(j) = x0`
/// exactly when `ū = π (j - N/2) / x0`. The search walks `j` away from `N/2`
/// and returns the first (smallest) `ū ≥ u_min`, as `(du, j)` with
/// `du = 2ū / N`. At `x0 = 0` every step works and `du = 2 u_min / N`.
pub fn select_step(n: usize, x0: f64, u_min: f64) -> Result<(f64, usize)> {
    let half = n / 2;
    if x0.abs() < ATM_TOLERANCE {
        return Ok((2.0 * u_min / n as f64, half));
    }
    let candidates: &mut dyn Iterator<Item = usize> = if x0 > 0.0 {
        &mut ((half + 1)..n)
    } else {
        &mut (0..half).rev()
    };
    for j in candidates {
        let u_bar = PI * (j as f64 - half as f64) / x0;
        if u_bar >= u_min {
            return Ok((2.0 * u_bar / n as f64, j));
        }
    }
    Err(Error::NoFeasibleStep { n, x0, u_min })
}

/// Builds both axes on the K-scaled log-moneyness `log(S0(m) / K)`.
pub fn build_grid(cfg: &FftGridConfig, state: &MarketState, contract: &SpreadContract) -> Result<FftGrid> {
    cfg.check()?;
    state.check()?;
    contract.check()?;
    let n = cfg.n;
    let x0 = [
        (state.s0[0] / contract.strike).ln(),
        (state.s0[1] / contract.strike).ln(),
    ];
    let (du1, j1) = select_step(n, x0[0], cfg.u_min)?;
    let (du2, j2) = select_step(n, x0[1], cfg.u_min)?;
    let du = [du1, du2];
    let dx = du.map(|d| 2.0 * PI / (n as f64 * d));
    Ok(FftGrid {
        n,
        du,
        dx,
        u_bar: du.map(|d| n as f64 * d / 2.0),
        x_bar: dx.map(|d| n as f64 * d / 2.0),
        target_index: [j1, j2],
        x0,
        eps: cfg.eps,
    })
}

#[inline]
fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `G(k) = (-1)^{k1+k2} φ(u(k) + iε) Ĥ(u(k) + iε)` on the whole lattice.
///
/// `cf` must return the characteristic function without the `e^{iu·x0}`
/// factor. A non-finite value anywhere is reported with its grid index; when
/// several nodes fail, the first in row-major order is reported.
pub fn assemble_g<F, P>(grid: &FftGrid, cf: F, payoff: P) -> Result<ComplexMatrix>
where
    F: Fn([Complex64; 2]) -> Result<Complex64> + Sync,
    P: Fn(DampedArgument) -> Result<Complex64> + Sync,
{
    let n = grid.n;
    let row = |k1: usize| -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(n);
        for k2 in 0..n {
            let arg = DampedArgument::new([grid.u(0, k1), grid.u(1, k2)], grid.eps);
            let u = arg.complex();
            let non_finite = |_| Error::GridNonFinite { k: [k1, k2], u };
            let phi = cf(u).map_err(non_finite)?;
            let g = parity(k1 + k2) * phi * payoff(arg)?;
            if !(g.re.is_finite() && g.im.is_finite()) {
                return Err(Error::GridNonFinite { k: [k1, k2], u });
            }
            out.push(g);
        }
        Ok(out)
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Result<Vec<Complex64>>> = (0..n).into_par_iter().map(row).collect();
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Result<Vec<Complex64>>> = (0..n).map(row).collect();

    let mut data = Vec::with_capacity(n * n);
    for r in rows {
        data.extend(r?);
    }
    Ok(ComplexMatrix::from_rows(n, data))
}

/// Zeroes row and column `k = 0`.
///
/// `u(0) = -ū` has no mirror node at `+ū`, while every other node pairs
/// with `u(N - k) = -u(k)`. Since `φ(-a + iε) Ĥ(-a + iε)` is the conjugate of
/// the value at `a + iε`, the truncated sum is then real at every lattice
/// point, and any imaginary residue points at a broken transform rather
/// than at the boundary.
fn drop_unpaired_frequencies(g: &mut ComplexMatrix) {
    let n = g.n();
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..n {
        g[(0, k)] = zero;
        g[(k, 0)] = zero;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriceWarning {
    Damping(DampingWarning),
    Model(ValidationWarning),
}

impl fmt::Display for PriceWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PriceWarning::Damping(w) => w.fmt(f),
            PriceWarning::Model(w) => w.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    pub price: f64,
    pub grid: FftGrid,
    /// Number of characteristic-function evaluations (`N²`).
    pub cf_evals: usize,
    pub warnings: Vec<PriceWarning>,
}

/// Prices the spread call `(S1 - S2 - K)+` by the damped 2D FFT.
///
/// The model must validate. The real part of the lattice value at `x0` is
/// returned; an imaginary residue above `1e-6 · max(|price|, 1)` or a price
/// below `-1e-6` is reported as an error since either means the transform
/// went wrong.
pub fn price_spread_fft(
    model: &SpreadModel,
    state: &MarketState,
    contract: &SpreadContract,
    cfg: &FftGridConfig,
) -> Result<PriceResult> {
    let mut warnings: Vec<PriceWarning> = validate(model)
        .into_result()?
        .into_iter()
        .map(PriceWarning::Model)
        .collect();
    warnings.extend(damping_warnings(cfg.eps).into_iter().map(PriceWarning::Damping));

    let grid = build_grid(cfg, state, contract)?;
    let maturity = contract.maturity;
    let mut g = assemble_g(
        &grid,
        |u| model.cf(u, maturity, state).map(|v| v.value),
        |arg| payoff_hat_unchecked(arg.complex()),
    )?;
    drop_unpaired_frequencies(&mut g);
    dft::inverse_dft2_in_place(&mut g, cfg.sign);

    let [l1, l2] = grid.target_index;
    let n = grid.n as f64;
    let x = [grid.x(0, l1), grid.x(1, l2)];
    let damping = (-(grid.eps[0] * x[0] + grid.eps[1] * x[1])).exp();
    let scale = parity(l1 + l2) * (-state.r * maturity).exp() * grid.du[0] * grid.du[1] * n * n / (4.0 * PI * PI)
        * damping
        * contract.strike;
    let value = scale * g[(l1, l2)];

    let price = value.re;
    if value.im.abs() > 1e-6 * price.abs().max(1.0) {
        return Err(Error::ImaginaryResidue { price, imag: value.im });
    }
    if price < -1e-6 {
        return Err(Error::NegativePrice { price });
    }
    Ok(PriceResult {
        price,
        grid,
        cf_evals: grid.n * grid.n,
        warnings,
    })
}
