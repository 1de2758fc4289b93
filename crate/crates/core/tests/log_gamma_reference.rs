use spreadfft_core::payoff_transform::complex_log_gamma;
use spreadfft_core::Complex64;

// ln Γ(z) to 20 digits from an arbitrary-precision reference implementation.
#[allow(clippy::excessive_precision)]
const REFERENCE: [((f64, f64), (f64, f64)); 8] = [
    ((3.0, 4.0), (-1.7566267846037841105, 4.7426644380346579282)),
    ((0.1, 0.0), (2.252712651734205902, 0.0)),
    ((0.1, 200.0), (-315.35965362239338949, 859.03496311195986098)),
    ((50.0, -200.0), (-50.477327126888966184, -931.35351768572047729)),
    ((1.0, -80.0), (-122.55375429305011599, -271.34648726521572117)),
    ((4.0, 37.5), (-45.295765020175272548, 103.7485766698414757)),
    ((0.7, -3.3), (-4.0265577747082367678, -0.96069472375226080756)),
    ((17.0, 0.25), (30.669966817987315269, 0.70088788801078264194)),
];

#[test]
fn matches_reference_values() {
    for ((zr, zi), (lr, li)) in REFERENCE {
        let z = Complex64::new(zr, zi);
        let got = complex_log_gamma(z).unwrap();
        // compare Γ itself: ln Γ is only defined modulo 2πi off the real axis
        let rel = ((got - Complex64::new(lr, li)).exp() - 1.0).norm();
        assert!(rel < 1e-12, "z = {z}: got {got}, rel err {rel:e}");
    }
}

#[test]
fn real_part_matches_on_the_right_half_plane() {
    for ((zr, zi), (lr, _)) in REFERENCE {
        if zr >= 0.5 {
            let got = complex_log_gamma(Complex64::new(zr, zi)).unwrap();
            assert!((got.re - lr).abs() < 1e-11 * lr.abs().max(1.0), "z = {zr}+{zi}i");
        }
    }
}

#[test]
fn conjugate_symmetry() {
    for ((zr, zi), _) in REFERENCE {
        let z = Complex64::new(zr, zi);
        let a = complex_log_gamma(z).unwrap();
        let b = complex_log_gamma(z.conj()).unwrap();
        assert!(((a - b.conj()).exp() - 1.0).norm() < 1e-12);
    }
}
