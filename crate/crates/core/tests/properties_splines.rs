//! Randomized invariants of the B-spline basis: partition of unity,
//! nonnegativity, local support, derivative consistency, and continuity
//! across element breakpoints.

use iga_spectral::splines::{eval_basis, eval_basis_deriv, BasisSpec};
use proptest::prelude::*;

/// Random spline-space parameters: interval start, width, element count,
/// and degree.
fn params() -> impl Strategy<Value = (f64, f64, usize, usize)> {
    (-5.0f64..5.0, 0.5f64..10.0, 1usize..=12, 1usize..=4)
}

/// Dense basis evaluation (length = num_basis) so values at nearby points
/// can be compared index-by-index even when the active set changes.
fn dense_eval(spec: &BasisSpec, x: f64, deriv: bool) -> Vec<f64> {
    let pairs = if deriv { eval_basis_deriv(spec, x) } else { eval_basis(spec, x) }.unwrap();
    let mut out = vec![0.0; spec.num_basis()];
    for (i, v) in pairs {
        out[i] = v;
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn partition_of_unity((a, w, n, p) in params(), t in 0.0f64..=1.0) {
        let spec = BasisSpec::uniform_open(a, a + w, n, p).unwrap();
        let x = a + t * w;
        let sum: f64 = eval_basis(&spec, x).unwrap().iter().map(|&(_, v)| v).sum();
        prop_assert!((sum - 1.0).abs() < 1e-12, "sum = {sum} at x = {x}");
    }

    #[test]
    fn nonnegative_with_local_support((a, w, n, p) in params(), t in 0.0f64..=1.0) {
        let spec = BasisSpec::uniform_open(a, a + w, n, p).unwrap();
        let x = a + t * w;
        let vals = eval_basis(&spec, x).unwrap();
        prop_assert!(vals.len() <= p + 1, "{} active functions, degree {p}", vals.len());
        for &(i, v) in &vals {
            prop_assert!(i < spec.num_basis());
            prop_assert!(v >= 0.0, "basis {i} negative at x = {x}: {v}");
        }
    }

    #[test]
    fn derivative_matches_central_difference(
        (a, w, n, p) in params(),
        elem in 0.0f64..1.0,
        frac in 0.1f64..0.9,
    ) {
        let spec = BasisSpec::uniform_open(a, a + w, n, p).unwrap();
        let h = w / n as f64;
        // A point inside one element, far enough from its breakpoints that
        // the difference stencil stays within the same polynomial piece.
        let e = ((elem * n as f64) as usize).min(n - 1);
        let x = a + (e as f64 + frac) * h;
        let delta = 1e-6 * h;
        let up = dense_eval(&spec, x + delta, false);
        let dn = dense_eval(&spec, x - delta, false);
        let an = dense_eval(&spec, x, true);
        for i in 0..spec.num_basis() {
            let fd = (up[i] - dn[i]) / (2.0 * delta);
            prop_assert!(
                (fd - an[i]).abs() < 1e-6 * (1.0 + an[i].abs()),
                "basis {i}: fd {fd} vs analytic {}",
                an[i]
            );
        }
    }
}

proptest! {
    // Fewer cases: each case checks every interior breakpoint.
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn continuity_across_breakpoints((a, w, n, p) in params()) {
        prop_assume!(n >= 2);
        let spec = BasisSpec::uniform_open(a, a + w, n, p).unwrap();
        let h = w / n as f64;
        let delta = 1e-8 * h;
        for k in 1..n {
            let xb = a + k as f64 * h;
            // One-sided limits by linear extrapolation from two sample
            // points; the O(delta^2) extrapolation error is far below the
            // tolerance, while sampling straight at xb would only test one
            // side's convention.
            let limit = |sign: f64, deriv: bool| -> Vec<f64> {
                let near = dense_eval(&spec, xb + sign * delta, deriv);
                let far = dense_eval(&spec, xb + sign * 2.0 * delta, deriv);
                near.iter().zip(&far).map(|(n1, n2)| 2.0 * n1 - n2).collect()
            };
            let left = limit(-1.0, false);
            let right = limit(1.0, false);
            for i in 0..spec.num_basis() {
                prop_assert!(
                    (left[i] - right[i]).abs() < 1e-12,
                    "C0 jump of basis {i} at breakpoint {k}: {} vs {}",
                    left[i],
                    right[i]
                );
            }
            if p >= 2 {
                let left = limit(-1.0, true);
                let right = limit(1.0, true);
                for i in 0..spec.num_basis() {
                    prop_assert!(
                        (left[i] - right[i]).abs() < 1e-8 * (1.0 + left[i].abs()),
                        "C1 jump of basis {i} at breakpoint {k}: {} vs {}",
                        left[i],
                        right[i]
                    );
                }
            }
        }
    }
}
