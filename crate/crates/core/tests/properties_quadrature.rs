//! Randomized and exhaustive invariants of the quadrature rules:
//! exactness degrees (including sharpness), node interlacing, blending
//! linearity, and weight-sum conservation.

use iga_spectral::quadrature::{blend, gauss_legendre, gauss_lobatto};
use proptest::prelude::*;

/// ∫_{-1}^{1} x^k dx.
fn monomial_integral(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        2.0 / (k as f64 + 1.0)
    }
}

fn poly(coeffs: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |x| {
        let mut acc = 0.0;
        for &c in coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

fn exact_poly_integral(coeffs: &[f64]) -> f64 {
    coeffs.iter().enumerate().map(|(k, c)| c * monomial_integral(k)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// G_m integrates any polynomial of degree <= 2m-1 exactly; L_m any
    /// of degree <= 2m-3.
    #[test]
    fn exactness_on_random_polynomials(
        m in 2usize..=10,
        raw in prop::collection::vec(-3.0f64..3.0, 1..=19),
    ) {
        let scale: f64 = 1.0 + raw.iter().map(|c| c.abs()).sum::<f64>();
        let g = gauss_legendre(m).unwrap();
        prop_assert_eq!(g.exactness_degree(), 2 * m - 1);
        let gc = &raw[..raw.len().min(2 * m)]; // degree <= 2m-1
        let got = g.integrate(poly(gc), -1.0, 1.0);
        prop_assert!(
            (got - exact_poly_integral(gc)).abs() <= 1e-12 * scale,
            "G_{m}: {got} vs {}",
            exact_poly_integral(gc)
        );

        let l = gauss_lobatto(m).unwrap();
        prop_assert_eq!(l.exactness_degree(), 2 * m - 3);
        let lc = &raw[..raw.len().min(2 * m - 2)]; // degree <= 2m-3
        let got = l.integrate(poly(lc), -1.0, 1.0);
        prop_assert!(
            (got - exact_poly_integral(lc)).abs() <= 1e-12 * scale,
            "L_{m}: {got} vs {}",
            exact_poly_integral(lc)
        );
    }

    /// Blending is affine in the integrand for any tau, including
    /// extrapolating values outside [0, 1].
    #[test]
    fn blending_linearity(
        m in 2usize..=8,
        tau in -3.0f64..3.0,
        coeffs in prop::collection::vec(-3.0f64..3.0, 1..=8),
    ) {
        let g = gauss_legendre(m).unwrap();
        let l = gauss_lobatto(m).unwrap();
        let b = blend(g.clone(), l.clone(), tau);
        let whole = b.integrate(poly(&coeffs), -1.0, 1.0);
        let parts = tau * g.integrate(poly(&coeffs), -1.0, 1.0)
            + (1.0 - tau) * l.integrate(poly(&coeffs), -1.0, 1.0);
        let scale: f64 = 1.0 + coeffs.iter().map(|c| c.abs()).sum::<f64>();
        prop_assert!(
            (whole - parts).abs() <= 1e-13 * scale * (1.0 + tau.abs()),
            "{whole} vs {parts} at tau = {tau}"
        );
    }

    /// Every blend preserves the reference-interval measure: the weights
    /// of tau*A + (1-tau)*B sum to 2 for any tau.
    #[test]
    fn blended_weights_sum_to_two(m in 2usize..=10, tau in -3.0f64..3.0) {
        let b = blend(gauss_legendre(m).unwrap(), gauss_lobatto(m).unwrap(), tau);
        let sum: f64 = b.merged().weights().iter().sum();
        prop_assert!((sum - 2.0).abs() <= 1e-13 * (1.0 + tau.abs()), "sum = {sum}");
    }
}

/// The stated exactness degrees are sharp: one degree higher integrates
/// with O(1) error.
#[test]
fn exactness_degrees_are_sharp() {
    for m in 2..=10 {
        let g = gauss_legendre(m).unwrap();
        let k = 2 * m;
        let err = (g.integrate(|x| x.powi(k as i32), -1.0, 1.0) - monomial_integral(k)).abs();
        assert!(err > 1e-6, "G_{m} unexpectedly integrates x^{k} (err {err:.2e})");

        let l = gauss_lobatto(m).unwrap();
        let k = 2 * m - 2;
        let err = (l.integrate(|x| x.powi(k as i32), -1.0, 1.0) - monomial_integral(k)).abs();
        assert!(err > 1e-6, "L_{m} unexpectedly integrates x^{k} (err {err:.2e})");
    }
}

/// The m−2 interior Lobatto-m nodes are the roots of P'_{m−1} and the
/// m−1 Gauss-(m−1) nodes are the roots of P_{m−1}, so by Rolle's theorem
/// each interior Lobatto node falls strictly between consecutive
/// Gauss-(m−1) nodes. (Same-count rules can share the node 0 for odd m,
/// so no strict statement holds there.)
#[test]
fn lobatto_interior_nodes_interlace_coarser_gauss_nodes() {
    for m in 3..=10 {
        let g = gauss_legendre(m - 1).unwrap();
        let l = gauss_lobatto(m).unwrap();
        let gn = g.nodes();
        let interior: Vec<f64> =
            l.nodes().iter().copied().filter(|x| x.abs() < 1.0 - 1e-12).collect();
        assert_eq!(interior.len(), m - 2);
        for (i, &li) in interior.iter().enumerate() {
            assert!(
                gn[i] < li && li < gn[i + 1],
                "m = {m}: Lobatto interior node {li} not in ({}, {})",
                gn[i],
                gn[i + 1]
            );
        }
    }
}
