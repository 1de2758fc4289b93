use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use spreadfft_core::fft_pricer::{inverse_dft2, price_spread_fft, ComplexMatrix, FftGridConfig, TransformSign};
use spreadfft_core::model::{benchmark_proportional, MarketState, SpreadContract, SpreadModel};
use spreadfft_core::payoff_transform::{spread_payoff_hat, DampedArgument};
use spreadfft_core::Complex64;

type C = Complex64;

#[test]
fn inverse_dft2_equals_the_double_sum() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    let n = 8;
    let m = ComplexMatrix::from_fn(n, |_, _| {
        C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    for sign in [TransformSign::Positive, TransformSign::Negative] {
        let s = if sign == TransformSign::Positive { 1.0 } else { -1.0 };
        let fast = inverse_dft2(&m, sign);
        for l1 in 0..n {
            for l2 in 0..n {
                let mut acc = C::new(0.0, 0.0);
                for k1 in 0..n {
                    for k2 in 0..n {
                        let a = s * 2.0 * PI * ((k1 * l1 + k2 * l2) % n) as f64 / n as f64;
                        acc += m[(k1, k2)] * C::new(a.cos(), a.sin());
                    }
                }
                acc /= (n * n) as f64;
                let rel = (fast[(l1, l2)] - acc).norm() / acc.norm().max(1e-300);
                assert!(rel < 1e-10, "({l1},{l2}): {rel:e}");
            }
        }
    }
}

#[test]
fn payoff_transform_inverts_to_the_damped_payoff() {
    let eps = [-3.0, 1.0];
    let (step, half) = (0.1, 800usize);
    let grid: Vec<f64> = (0..2 * half)
        .map(|k| -(half as f64) * step + (k as f64 + 0.5) * step)
        .collect();
    let n = grid.len();
    let mut hat = vec![C::new(0.0, 0.0); n * n];
    for (a, &u1) in grid.iter().enumerate() {
        for (b, &u2) in grid.iter().enumerate() {
            hat[a * n + b] = spread_payoff_hat(DampedArgument::new([u1, u2], eps)).unwrap();
        }
    }
    let points = [
        [0.5, -0.8],
        [1.0, 0.2],
        [0.3, -1.5],
        [-0.4, -2.0],
        [1.5, 1.0],
        [0.9, 0.5],
        [0.0, -0.4],
        [-0.2, 0.3],
        [0.7, -0.1],
        [1.2, -1.0],
        [2.0, 1.5],
        [-1.0, -1.0],
        [0.2, -0.2],
        [0.6, 0.6],
        [1.8, 0.4],
        [0.4, -0.9],
        [-0.5, 0.5],
        [1.1, 0.9],
        [0.8, 0.0],
        [0.25, -0.3],
    ];
    for x in points {
        let e1: Vec<C> = grid.iter().map(|u| C::new(0.0, u * x[0]).exp()).collect();
        let e2: Vec<C> = grid.iter().map(|u| C::new(0.0, u * x[1]).exp()).collect();
        let mut total = C::new(0.0, 0.0);
        for a in 0..n {
            let row: C = (0..n).map(|b| e2[b] * hat[a * n + b]).sum();
            total += e1[a] * row;
        }
        let approx = total.re * step * step / (4.0 * PI * PI);
        let exact = (x[0].exp() - x[1].exp() - 1.0).max(0.0) * (eps[0] * x[0] + eps[1] * x[1]).exp();
        assert!((approx - exact).abs() < 1e-3, "x = {x:?}: {approx} vs {exact}");
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    return (x, w);
                }
            }
        })
        .collect()
}

/// Discounted `E[(S1 - S2 - K)+]` for correlated lognormals by composite
/// Gauss–Legendre on the standard-normal plane.
fn lognormal_spread(s0: [f64; 2], vol: [f64; 2], rho: f64, r: f64, t: f64, k: f64) -> f64 {
    let nodes = gauss_legendre(8);
    let (lo, hi, panels) = (-8.5, 8.5, 96);
    let h = (hi - lo) / panels as f64;
    let mut pts = Vec::new();
    for p in 0..panels {
        let a = lo + p as f64 * h;
        for &(x, w) in &nodes {
            let z = a + 0.5 * h * (x + 1.0);
            pts.push((z, 0.5 * h * w * (-0.5 * z * z).exp() / (2.0 * PI).sqrt()));
        }
    }
    let rt = t.sqrt();
    let mut sum = 0.0;
    for &(z1, w1) in &pts {
        for &(z2, w2) in &pts {
            let y2 = rho * z1 + (1.0 - rho * rho).sqrt() * z2;
            let s1 = s0[0] * ((r - 0.5 * vol[0] * vol[0]) * t + vol[0] * rt * z1).exp();
            let s2 = s0[1] * ((r - 0.5 * vol[1] * vol[1]) * t + vol[1] * rt * y2).exp();
            sum += w1 * w2 * (s1 - s2 - k).max(0.0);
        }
    }
    (-r * t).exp() * sum
}

#[test]
fn gauss_legendre_rule_is_exact_for_polynomials() {
    let rule = gauss_legendre(8);
    let moment = |p: i32| rule.iter().map(|(x, w)| w * x.powi(p)).sum::<f64>();
    assert!((moment(0) - 2.0).abs() < 1e-14);
    assert!((moment(14) - 2.0 / 15.0).abs() < 1e-14);
}

#[test]
fn fft_matches_lognormal_quadrature() {
    let (mut m, state) = benchmark_proportional();
    m.jumps.lambda = 0.0;
    m.cir.vol_of_vol = 1e-8;
    m.cir.v0 = m.cir.v_bar;
    let vol = [m.sigma[0] * m.cir.v0.sqrt(), m.sigma[1] * m.cir.v0.sqrt()];
    let model = SpreadModel::from(m);
    for k in [1.0, 2.0, 4.0] {
        let contract = SpreadContract::new(k, 1.0).unwrap();
        let fft = price_spread_fft(&model, &state, &contract, &FftGridConfig::default())
            .unwrap()
            .price;
        let quad = lognormal_spread(state.s0, vol, m.rho_ss, state.r, 1.0, k);
        assert!((fft / quad - 1.0).abs() < 2e-3, "K = {k}: fft {fft} quad {quad}");
    }
}

#[test]
fn wrong_transform_sign_misses_the_quadrature() {
    let (mut m, state) = benchmark_proportional();
    m.jumps.lambda = 0.0;
    m.cir.vol_of_vol = 1e-8;
    let vol = [m.sigma[0] * 0.2, m.sigma[1] * 0.2];
    let model = SpreadModel::from(m);
    let contract = SpreadContract::new(2.0, 1.0).unwrap();
    let cfg = FftGridConfig {
        sign: TransformSign::Negative,
        ..Default::default()
    };
    let quad = lognormal_spread(state.s0, vol, m.rho_ss, state.r, 1.0, 2.0);
    if let Ok(r) = price_spread_fft(&model, &state, &contract, &cfg) {
        assert!((r.price / quad - 1.0).abs() > 1e-2);
    }
}

#[test]
fn moneyness_and_maturity_are_monotone() {
    let (m, s) = benchmark_proportional();
    let model = SpreadModel::from(m);
    let cfg = FftGridConfig::default();
    let price = |state: &MarketState, k: f64, t: f64| {
        price_spread_fft(&model, state, &SpreadContract::new(k, t).unwrap(), &cfg)
            .unwrap()
            .price
    };
    let mut prev = f64::INFINITY;
    for k in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0] {
        let p = price(&s, k, 1.0);
        assert!(p <= prev + 1e-9, "K = {k}");
        prev = p;
    }
    let mut prev = 0.0;
    for t in [0.1, 0.25, 0.5, 1.0, 2.0] {
        let p = price(&s, 4.0, t);
        assert!(p >= prev - 1e-9, "T = {t}");
        prev = p;
    }
}
