//! Spectral approximation of the 1D/3D reaction-diffusion eigenproblem
//! −Δu + γu = λu with maximum-continuity B-spline bases and blended
//! Gauss/Lobatto quadrature.
//!
//! The crate is organized bottom-up:
//! - [`linalg`]: banded/dense symmetric storage, Cholesky, a dense
//!   symmetric eigensolver, and compensated summation.
//! - [`splines`]: uniform open knot vectors and B-spline basis/derivative
//!   evaluation.
//! - [`quadrature`]: Gauss-Legendre and Gauss-Lobatto rules plus affine
//!   blends Q_τ = τ·A + (1−τ)·B of two rules.
//! - [`assembly`]: stiffness/mass assembly with independent rules per
//!   term, boundary-condition handling, and Kronecker tensor operators.
//! - [`eigen`]: the generalized symmetric-definite eigensolver and the
//!   separable tensor-spectrum solve.
//! - [`analysis`]: model problems with exact spectra, error metrics,
//!   convergence fits, dispersion-coefficient extraction, and τ-sweeps.
//! - [`checks`]: self-contained pass/fail reproductions of the headline
//!   numerical results, shared by the CLI and the acceptance tests.
//!
//! Blended rules super-converge: the τ that cancels the leading Λ^{2p}
//! term of the eigenvalue error (Λ = ωh) upgrades convergence from order
//! 2p to 2p+2 on constant-coefficient problems. See
//! [`quadrature::optimal_blend`] and [`analysis::tau_sweep`].

// The band/factorization kernels index several arrays with offset ranges;
// the equivalent iterator chains (enumerate().take(..).skip(..)) obscure
// the index arithmetic that defines them.
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod assembly;
pub mod checks;
pub mod eigen;
pub mod linalg;
pub mod quadrature;
pub mod splines;
