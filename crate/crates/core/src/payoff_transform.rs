//! Fourier transform of the unit-strike spread payoff.
//!
//! For `x = (log S1, log S2)` the payoff `(e^{x1} - e^{x2} - 1)+` has the
//! transform
//!
//! ```text
//! Ĥ(u) = Γ(i(u1 + u2) - 1) Γ(-i u2) / Γ(i u1 + 1),    u = u_real + iε
//! ```
//!
//! which exists when every gamma argument has a positive real part, i.e.
//! `ε2 > 0` and `ε1 + ε2 < -1`. The inverse transform is
//! `H(x) e^{ε·x} = (2π)^{-2} ∫ e^{i u_real·x} Ĥ(u_real + iε) du_real`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::cmath;
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
/// `½ ln(2π)`.
const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(z)` for complex `z`.
///
/// Lanczos approximation (g = 7, nine terms) in log form for `Re z ≥ ½`,
/// reflection below. On the right half-plane the result is the analytic
/// continuation of the real log-gamma; to the left it is correct modulo
/// `2πi`, which is all `exp` needs.
pub fn complex_log_gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        return Err(Error::Pole { z });
    }
    if z.re < 0.5 {
        // Γ(z) Γ(1 - z) = π / sin(πz)
        let one_minus = Complex64::new(1.0, 0.0) - z;
        let reflected = lanczos_ln_gamma(one_minus);
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - reflected);
    }
    Ok(lanczos_ln_gamma(z))
}

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    HALF_LN_TWO_PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// `ln sin(πz)` modulo `2πi`, without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let pz = z * PI;
    if z.im > 1.0 {
        // sin(πz) = e^{-iπz} (1 - e^{2iπz}) i / 2
        -i * pz + cmath::log1p(-(2.0 * i * pz).exp()) - 2f64.ln() + i * (PI / 2.0)
    } else if z.im < -1.0 {
        // sin(πz) = e^{iπz} (1 - e^{-2iπz}) / (2i)
        i * pz + cmath::log1p(-(-2.0 * i * pz).exp()) - 2f64.ln() - i * (PI / 2.0)
    } else {
        pz.sin().ln()
    }
}

/// A grid frequency shifted into the complex plane by the damping vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampedArgument {
    pub u_real: [f64; 2],
    pub eps: [f64; 2],
}

impl DampedArgument {
    pub fn new(u_real: [f64; 2], eps: [f64; 2]) -> Self {
        Self { u_real, eps }
    }

    /// `u_real + iε`.
    pub fn complex(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.u_real[0], self.eps[0]),
            Complex64::new(self.u_real[1], self.eps[1]),
        ]
    }
}

/// Checks `ε2 > 0` and `ε1 + ε2 < -1`.
pub fn check_damping(eps: [f64; 2]) -> Result<()> {
    let ok = eps[1] > 0.0 && eps[0] + eps[1] < -1.0 && eps.iter().all(|e| e.is_finite());
    if ok {
        Ok(())
    } else {
        Err(Error::DampingViolation { eps })
    }
}

/// Soft warnings for damping choices that are admissible but numerically
/// poor on a finite grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DampingWarning {
    /// `ε2 < 0.2`: the `Γ(-iu2)` factor is sharply peaked.
    SmallEps2 { eps2: f64 },
    /// `-ε1 - ε2 - 1 < 0.2`: the `Γ(i(u1+u2) - 1)` factor sits close to
    /// its pole and the lattice under-resolves it.
    NearPole { margin: f64 },
}

impl fmt::Display for DampingWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DampingWarning::SmallEps2 { eps2 } => write!(f, "eps2 = {eps2} is below 0.2"),
            DampingWarning::NearPole { margin } => {
                write!(f, "-eps1 - eps2 - 1 = {margin:.3} is below 0.2 (payoff pole)")
            }
        }
    }
}

pub fn damping_warnings(eps: [f64; 2]) -> Vec<DampingWarning> {
    let mut out = Vec::new();
    if eps[1] < 0.2 {
        out.push(DampingWarning::SmallEps2 { eps2: eps[1] });
    }
    let margin = -eps[0] - eps[1] - 1.0;
    if margin < 0.2 {
        out.push(DampingWarning::NearPole { margin });
    }
    out
}

/// `Ĥ(u_real + iε)` for the unit-strike spread call, evaluated as
/// `exp(ln Γ(a) + ln Γ(b) - ln Γ(c))` so that large frequencies do not
/// overflow.
pub fn spread_payoff_hat(arg: DampedArgument) -> Result<Complex64> {
    check_damping(arg.eps)?;
    payoff_hat_unchecked(arg.complex())
}

/// Same as [`spread_payoff_hat`] without the damping check, for hot loops
/// that validated `ε` once.
pub(crate) fn payoff_hat_unchecked(u: [Complex64; 2]) -> Result<Complex64> {
    let i = Complex64::i();
    let a = i * (u[0] + u[1]) - 1.0;
    let b = -i * u[1];
    let c = i * u[0] + 1.0;
    let log = complex_log_gamma(a)? + complex_log_gamma(b)? - complex_log_gamma(c)?;
    Ok(log.exp())
}
