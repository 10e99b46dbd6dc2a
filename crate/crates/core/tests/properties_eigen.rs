//! Randomized invariants of the generalized eigensolver: completeness,
//! finiteness, M-orthonormality, residual bounds, the trace identity,
//! the constant-shift equivalence, and tensor/materialized agreement.

use iga_spectral::assembly::{
    assemble_1d, assemble_tensor, BoundaryCondition, QuadratureTriple, DEFAULT_MATERIALIZE_CAP,
};
use iga_spectral::eigen::{
    shift_spectrum, solve_generalized, solve_generalized_dense, solve_tensor,
};
use iga_spectral::linalg::compensated_dot;
use iga_spectral::quadrature::gauss_legendre;
use iga_spectral::splines::BasisSpec;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = (usize, usize, bool, f64)> {
    (2usize..=8, 1usize..=3, any::<bool>(), 0.0f64..20.0)
}

fn bc_of(neumann: bool) -> BoundaryCondition {
    if neumann {
        BoundaryCondition::Neumann
    } else {
        BoundaryCondition::Dirichlet
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Every solve returns dimension-many finite ascending eigenvalues
    /// with M-orthonormal eigenvectors and small residuals, and the
    /// eigenvalue sum reproduces trace(M^{-1}K).
    #[test]
    fn solve_invariants((n, p, neumann, gamma) in params()) {
        let spec = BasisSpec::uniform_open(0.0, 1.0, n, p).unwrap();
        let rules = QuadratureTriple::uniform(gauss_legendre(p + 1).unwrap());
        let ops = assemble_1d(&spec, |_| gamma, &rules, bc_of(neumann)).unwrap();
        let s = solve_generalized(&ops).unwrap();
        let dim = ops.dimension;
        prop_assert_eq!(s.len(), dim);
        prop_assert!(s.eigenvalues.iter().all(|l| l.is_finite()));
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]), "not ascending");

        let u = s.eigenvectors.as_ref().unwrap();
        let k_scale = ops.k.max_abs();
        let m_scale = ops.m.max_abs();
        for i in 0..dim {
            let ui = u.column(i);
            let mui = ops.m.mul_vec(&ui);
            // M-orthonormality.
            for j in 0..dim {
                let uj = u.column(j);
                let want = if i == j { 1.0 } else { 0.0 };
                let got = compensated_dot(&uj, &mui);
                prop_assert!((got - want).abs() <= 1e-8, "u{i}' M u{j} = {got}");
            }
            // Residual bound relative to the operator scales.
            let kui = ops.k.mul_vec(&ui);
            let lambda = s.eigenvalues[i];
            let unorm = ui.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
            for r in 0..dim {
                let res = kui[r] - lambda * mui[r];
                prop_assert!(
                    res.abs() <= 1e-8 * (k_scale + lambda.abs() * m_scale) * unorm,
                    "mode {i} residual row {r}: {res:.3e}"
                );
            }
        }

        // trace(M^{-1}K) via the Cholesky factorization of M.
        let chol = ops.m.cholesky().unwrap();
        let mut trace = 0.0;
        for j in 0..dim {
            let mut col = vec![0.0; dim];
            col[j] = 1.0;
            chol.solve_lower_transpose(&mut col);
            let mut kx = ops.k.mul_vec(&col);
            chol.solve_lower(&mut kx);
            trace += kx[j];
        }
        let sum: f64 = s.eigenvalues.iter().sum();
        prop_assert!(
            (sum - trace).abs() <= 1e-8 * trace.abs().max(1.0),
            "eigenvalue sum {sum} vs trace {trace}"
        );
    }

    /// Adding a constant reaction coefficient shifts every eigenvalue by
    /// that constant and changes nothing else.
    #[test]
    fn constant_shift_equivalence((n, p, neumann, _g) in params(), c in 0.1f64..50.0) {
        let spec = BasisSpec::uniform_open(0.0, 1.0, n, p).unwrap();
        let rules = QuadratureTriple::uniform(gauss_legendre(p + 1).unwrap());
        let bc = bc_of(neumann);
        let base = assemble_1d(&spec, |_| 0.0, &rules, bc).unwrap();
        let with_gamma = assemble_1d(&spec, |_| c, &rules, bc).unwrap();
        let shifted = shift_spectrum(&solve_generalized(&base).unwrap(), c);
        let direct = solve_generalized(&with_gamma).unwrap();
        for (a, b) in shifted.eigenvalues.iter().zip(&direct.eigenvalues) {
            prop_assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                "shifted {a} vs direct {b}"
            );
        }
    }
}

proptest! {
    // Materialized tensor solves are cubic in the 1D dimension; keep the
    // case count low.
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// The separable tensor solve agrees with a dense solve of the
    /// materialized Kronecker operators.
    #[test]
    fn tensor_solve_matches_materialized(
        n in 2usize..=3,
        p in 1usize..=2,
        dims in 2usize..=3,
        gamma in 0.0f64..10.0,
    ) {
        let spec = BasisSpec::uniform_open(0.0, 1.0, n, p).unwrap();
        let rules = QuadratureTriple::uniform(gauss_legendre(p + 1).unwrap());
        let kron =
            assemble_tensor(&spec, gamma, dims, &rules, BoundaryCondition::Dirichlet).unwrap();
        let fast = solve_tensor(&kron).unwrap();
        let (km, mm) = kron.materialize(DEFAULT_MATERIALIZE_CAP).unwrap();
        let dense = solve_generalized_dense(&km, &mm).unwrap();
        prop_assert_eq!(fast.len(), dense.len());
        for (a, b) in fast.eigenvalues.iter().zip(&dense.eigenvalues) {
            prop_assert!(
                (a - b).abs() <= 1e-10 * a.abs().max(1.0),
                "tensor {a} vs materialized {b}"
            );
        }
    }
}
