use spreadfft_core::fft_pricer::{price_spread_fft, FftGridConfig};
use spreadfft_core::mc_engine::{empirical_cf_many, price_spread_mc, McConfig};
use spreadfft_core::model::{benchmark_independent, benchmark_proportional, SpreadContract, SpreadModel};
use spreadfft_core::Complex64;

const POINTS: [[f64; 2]; 5] = [[0.7, -1.3], [1.0, -1.0], [2.0, 0.5], [-0.3, 3.0], [4.0, -2.5]];

fn check_cf(model: SpreadModel) {
    let (_, state) = benchmark_proportional();
    let cfg = McConfig {
        n_paths: 200_000,
        n_steps: 250,
        seed: 99,
        antithetic: false,
    };
    let emp = empirical_cf_many(&model, &state, 1.0, &POINTS, &cfg).unwrap();
    for (u, e) in POINTS.iter().zip(&emp) {
        let want = model
            .cf([Complex64::new(u[0], 0.0), Complex64::new(u[1], 0.0)], 1.0, &state)
            .unwrap()
            .value;
        let z = [
            (e.value.re - want.re) / e.std_error[0],
            (e.value.im - want.im) / e.std_error[1],
        ];
        assert!(
            z[0].abs() < 3.5 && z[1].abs() < 3.5,
            "u = {u:?}: mc {} cf {want} z {z:?}",
            e.value
        );
    }
}

#[test]
fn proportional_cf_matches_simulation() {
    check_cf(benchmark_proportional().0.into());
}

#[test]
fn independent_cf_matches_simulation() {
    check_cf(benchmark_independent().0.into());
}

#[test]
fn simulated_price_agrees_with_transform_price() {
    let (m, state) = benchmark_proportional();
    let model = SpreadModel::from(m);
    let cfg = McConfig {
        n_paths: 100_000,
        n_steps: 250,
        seed: 5,
        antithetic: true,
    };
    for k in [2.0, 4.0] {
        let contract = SpreadContract::new(k, 1.0).unwrap();
        let mc = price_spread_mc(&model, &state, &contract, &cfg).unwrap();
        let fft = price_spread_fft(&model, &state, &contract, &FftGridConfig::default())
            .unwrap()
            .price;
        let tol = (3.0 * mc.std_error).max(5e-3 * fft);
        assert!(
            (fft - mc.estimate).abs() < tol,
            "K = {k}: fft {fft} mc {} ± {}",
            mc.estimate,
            mc.std_error
        );
        assert!(mc.floored_fraction < 1e-6);
    }
}
