//! Radix-2 two-dimensional discrete Fourier transform.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Exponent sign of the transform kernel `e^{±2πi k·l/N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransformSign {
    /// `e^{+2πi k·l/N}`: what expanding `e^{iu(k)·x(l)}` on the lattice
    /// gives. Reproduces the Gaussian quadrature oracle.
    #[default]
    Positive,
    /// `e^{-2πi k·l/N}`. Evaluates the lattice function at `-x` instead.
    Negative,
}

impl TransformSign {
    fn value(self) -> f64 {
        match self {
            TransformSign::Positive => 1.0,
            TransformSign::Negative => -1.0,
        }
    }
}

/// Dense square complex matrix, row-major; `m[(k1, k2)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub(crate) fn from_rows(n: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.data.chunks_exact(self.n)
    }

    fn transpose_in_place(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                self.data.swap(i * n + j, j * n + i);
            }
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Precomputed twiddles and bit-reversal table for one transform length.
#[derive(Debug, Clone)]
pub struct Radix2Plan {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Radix2Plan {
    /// Panics unless `n` is a power of two.
    pub fn new(n: usize, sign: TransformSign) -> Self {
        assert!(n.is_power_of_two(), "transform length {n} is not a power of two");
        let s = sign.value();
        // each twiddle evaluated directly, no recurrence drift
        let twiddles = (0..n / 2)
            .map(|k| {
                let angle = s * 2.0 * PI * k as f64 / n as f64;
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                }
            })
            .collect();
        Self { n, twiddles, bitrev }
    }

    /// Unscaled in-place transform `a[l] <- Σ_k e^{±2πi k l/n} a[k]`.
    pub fn process(&self, a: &mut [Complex64]) {
        let n = self.n;
        assert_eq!(a.len(), n);
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let t = w * a[start + k + half];
                    let u = a[start + k];
                    a[start + k] = u + t;
                    a[start + k + half] = u - t;
                }
            }
            len <<= 1;
        }
    }

    fn process_rows(&self, data: &mut [Complex64]) {
        #[cfg(feature = "parallel")]
        data.par_chunks_exact_mut(self.n).for_each(|row| self.process(row));
        #[cfg(not(feature = "parallel"))]
        data.chunks_exact_mut(self.n).for_each(|row| self.process(row));
    }
}

/// `(1/N²) Σ_k e^{sign·2πi k·l/N} m(k)` for every `l`.
///
/// Panics unless `N` is a power of two.
pub fn inverse_dft2(matrix: &ComplexMatrix, sign: TransformSign) -> ComplexMatrix {
    let mut out = matrix.clone();
    inverse_dft2_in_place(&mut out, sign);
    out
}

pub(crate) fn inverse_dft2_in_place(m: &mut ComplexMatrix, sign: TransformSign) {
    let n = m.n;
    let plan = Radix2Plan::new(n, sign);
    plan.process_rows(&mut m.data);
    m.transpose_in_place();
    plan.process_rows(&mut m.data);
    m.transpose_in_place();
    let scale = 1.0 / (n as f64 * n as f64);
    m.data.iter_mut().for_each(|z| *z *= scale);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_input_gives_delta() {
        let m = ComplexMatrix::from_fn(8, |_, _| c(1.0, 0.0));
        let out = inverse_dft2(&m, TransformSign::Negative);
        for i in 0..8 {
            for j in 0..8 {
                let want = if (i, j) == (0, 0) { 1.0 } else { 0.0 };
                assert!((out[(i, j)] - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn delta_input_gives_constant() {
        let mut m = ComplexMatrix::zeros(8);
        m[(0, 0)] = c(1.0, 0.0);
        let out = inverse_dft2(&m, TransformSign::Positive);
        assert!(out.as_slice().iter().all(|z| (z - c(1.0 / 64.0, 0.0)).norm() < 1e-17));
    }

    #[test]
    fn one_dimensional_plan_matches_direct_sum() {
        let n = 16;
        let x: Vec<_> = (0..n).map(|k| c((k as f64).sin(), (k * k) as f64 * 0.01)).collect();
        for sign in [TransformSign::Positive, TransformSign::Negative] {
            let mut y = x.clone();
            Radix2Plan::new(n, sign).process(&mut y);
            for l in 0..n {
                let direct: Complex64 = (0..n)
                    .map(|k| {
                        let a = sign.value() * 2.0 * PI * (k * l) as f64 / n as f64;
                        x[k] * c(a.cos(), a.sin())
                    })
                    .sum();
                assert!((direct - y[l]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn length_one_and_two() {
        let mut a = [c(3.0, 1.0)];
        Radix2Plan::new(1, TransformSign::Positive).process(&mut a);
        assert_eq!(a, [c(3.0, 1.0)]);
        let mut b = [c(1.0, 0.0), c(2.0, 0.0)];
        Radix2Plan::new(2, TransformSign::Negative).process(&mut b);
        assert_eq!(b, [c(3.0, 0.0), c(-1.0, 0.0)]);
    }
}
