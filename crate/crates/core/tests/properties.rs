use fresnel_tomo::analytic::{gcf_tomogram_analytic, gcf_wavefunction, GcfParams};
use fresnel_tomo::grid::trapezoid_integrate_real;
use fresnel_tomo::tomography::{fresnel_tomogram_value, optical_tomogram, symplectic_tomogram};
use fresnel_tomo::{SampledWavefunction, UniformGrid1D};
use num_complex::Complex64;
use proptest::prelude::*;

/// Normalised sum of two displaced, chirped Gaussians.
fn superposition(a: f64, b: f64, chirp: f64, weight: f64) -> SampledWavefunction {
    let g = UniformGrid1D::from_range(-10.0, 10.0, 1601).unwrap();
    SampledWavefunction::from_fn(g, |x| {
        let one = (-(x - a).powi(2)).exp() * Complex64::from_polar(1.0, chirp * x * x);
        let two = (-(x - b).powi(2) / 0.5).exp() * Complex64::from_polar(weight, 0.7 * x);
        one + two
    })
    .normalized()
}

fn state() -> impl Strategy<Value = SampledWavefunction> {
    (-1.5..1.5f64, -1.5..1.5f64, -1.0..1.0f64, 0.1..1.0f64).prop_map(|(a, b, c, w)| superposition(a, b, c, w))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn homogeneity(psi in state(), x in -2.0..2.0f64, mu in -2.0..2.0f64, nu in 0.1..2.0f64,
                   lambda in prop_oneof![-3.0..-0.3f64, 0.3..3.0f64]) {
        let w = symplectic_tomogram(&psi, x, mu, nu).unwrap();
        let ws = symplectic_tomogram(&psi, lambda * x, lambda * mu, lambda * nu).unwrap();
        prop_assert!((ws - w / lambda.abs()).abs() <= 1e-8 * w.max(1.0));
    }

    #[test]
    fn normalised_and_nonnegative(psi in state(), mu in -2.0..2.0f64, nu in 0.2..1.5f64) {
        let gx = UniformGrid1D::from_range(-25.0, 25.0, 1001).unwrap();
        let row: Vec<f64> = gx.points().map(|x| symplectic_tomogram(&psi, x, mu, nu).unwrap()).collect();
        prop_assert!(row.iter().all(|&v| v >= -1e-10));
        let total = trapezoid_integrate_real(&row, gx.step()).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-4, "total {}", total);
    }

    #[test]
    fn fresnel_is_unit_mu_slice(psi in state(), x in -2.0..2.0f64, nu in -2.0..2.0f64) {
        prop_assume!(nu.abs() > 1e-3);
        let f = fresnel_tomogram_value(&psi, x, nu);
        let s = symplectic_tomogram(&psi, x, 1.0, nu).unwrap();
        prop_assert!((f - s).abs() <= 1e-10);
    }

    #[test]
    fn optical_matches_fresnel_tan_form(psi in state(), x in -2.0..2.0f64, theta in -1.2..1.2f64) {
        prop_assume!(theta.abs() > 1e-3);
        let (c, s) = (theta.cos(), theta.sin());
        let lhs = optical_tomogram(&psi, x, theta);
        let rhs = fresnel_tomogram_value(&psi, x / c, s / c) / c.abs();
        prop_assert!((lhs - rhs).abs() <= 1e-9);
    }

    #[test]
    fn gcf_closed_form_and_chirp_shift(sigma in 0.5..1.5f64, alpha in -3.0..3.0f64,
                                       x in -2.0..2.0f64, mu in -2.0..2.0f64, nu in 0.1..2.0f64) {
        let p = GcfParams::new(sigma, alpha).unwrap();
        let psi = gcf_wavefunction(p, p.default_grid(1601).unwrap());
        let num = symplectic_tomogram(&psi, x, mu, nu).unwrap();
        prop_assert!((num - gcf_tomogram_analytic(p, x, mu, nu).unwrap()).abs() <= 1e-6);
        let plain = GcfParams::new(sigma, 0.0).unwrap();
        let shifted = gcf_tomogram_analytic(plain, x, mu + 2.0 * alpha * nu, nu).unwrap();
        prop_assert!((gcf_tomogram_analytic(p, x, mu, nu).unwrap() - shifted).abs() <= 1e-12);
    }
}
