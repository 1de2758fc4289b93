//! Complex helpers missing from num-complex that the Riccati solution needs
//! near the origin.

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// `ln(1 + w)` on the principal branch, accurate for small `|w|`.
pub(crate) fn log1p(w: Complex64) -> Complex64 {
    if w.norm_sqr() < 0.25 {
        let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
        let im = w.im.atan2(1.0 + w.re);
        Complex64::new(re, im)
    } else {
        (Complex64::new(1.0, 0.0) + w).ln()
    }
}

/// `exp(z) - 1`, accurate for small `|z|`.
pub(crate) fn expm1(z: Complex64) -> Complex64 {
    let half_sin = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * z.im.cos() - 2.0 * half_sin * half_sin;
    let im = z.re.exp() * z.im.sin();
    Complex64::new(re, im)
}

pub(crate) fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log1p_matches_ln_for_moderate_arguments() {
        for w in [
            Complex64::new(0.3, -0.2),
            Complex64::new(-0.4, 0.1),
            Complex64::new(2.0, 3.0),
        ] {
            let direct = (Complex64::new(1.0, 0.0) + w).ln();
            assert!((log1p(w) - direct).norm() < 1e-15);
        }
    }

    #[test]
    fn log1p_keeps_relative_precision_for_tiny_arguments() {
        let w = Complex64::new(1e-18, -3e-18);
        let got = log1p(w);
        assert!((got - w).norm() / w.norm() < 1e-12);
    }

    #[test]
    fn expm1_keeps_relative_precision_for_tiny_arguments() {
        let z = Complex64::new(-2e-17, 5e-17);
        assert!((expm1(z) - z).norm() / z.norm() < 1e-12);
        let big = Complex64::new(0.7, -1.9);
        assert!((expm1(big) - (big.exp() - 1.0)).norm() < 1e-15);
    }
}
