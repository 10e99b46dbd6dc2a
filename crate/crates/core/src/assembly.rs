//! Assembly of the 1D stiffness/mass pair under a three-rule quadrature
//! split (gradient, reaction, and L² terms may use different rules),
//! strong Dirichlet or natural Neumann boundary handling, and Kronecker
//! composition of tensor-product 2D/3D operators.

use crate::linalg::{BandedSymMatrix, DenseMatrix};
use crate::quadrature::QuadratureRule;
use crate::splines::{elements_of, eval_basis, eval_basis_deriv, BasisSpec, SplineError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("coefficient is not finite at quadrature node x = {x} (element {element}): gamma(x) = {value}; interior-node rules avoid boundary singularities")]
    SingularCoefficient { x: f64, element: usize, value: f64 },
    #[error(
        "reaction and L2 rules must coincide (got {reaction_len}- and {mass_len}-point rules)"
    )]
    RuleMismatch { reaction_len: usize, mass_len: usize },
    #[error("Dirichlet space is empty: {n} elements of degree {p} leave no interior functions")]
    EmptyDirichletSpace { n: usize, p: usize },
    #[error("tensor dimension {dims} unsupported (expected 2 or 3)")]
    UnsupportedDimension { dims: usize },
    #[error("materialization of {dof} DOF exceeds the cap of {cap}")]
    MaterializationTooLarge { dof: usize, cap: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Default DOF cap for dense materialization of tensor operators.
pub const DEFAULT_MATERIALIZE_CAP: usize = 20_000;

/// The three quadrature slots of the assembled forms: one rule for the
/// gradient term, one for the reaction term, and one for the L² products.
/// The reaction and L² rules are required to coincide, which keeps the
/// assembled eigenproblem equivalent to the shifted zero-reaction problem
/// for constant coefficients.
#[derive(Debug, Clone)]
pub struct QuadratureTriple {
    grad_rule: QuadratureRule,
    reaction_rule: QuadratureRule,
    mass_rule: QuadratureRule,
}

impl QuadratureTriple {
    /// Same rule in all three slots (the default usage everywhere in the
    /// spectral experiments).
    pub fn uniform(rule: QuadratureRule) -> Self {
        Self { grad_rule: rule.clone(), reaction_rule: rule.clone(), mass_rule: rule }
    }

    /// Distinct gradient rule; the reaction/L² slots share `l2_rule`.
    pub fn split(grad_rule: QuadratureRule, l2_rule: QuadratureRule) -> Self {
        Self { grad_rule, reaction_rule: l2_rule.clone(), mass_rule: l2_rule }
    }

    /// Fully explicit construction; rejects reaction/L² mismatches.
    pub fn try_new(
        grad_rule: QuadratureRule,
        reaction_rule: QuadratureRule,
        mass_rule: QuadratureRule,
    ) -> Result<Self, AssemblyError> {
        if reaction_rule != mass_rule {
            return Err(AssemblyError::RuleMismatch {
                reaction_len: reaction_rule.len(),
                mass_len: mass_rule.len(),
            });
        }
        Ok(Self { grad_rule, reaction_rule, mass_rule })
    }

    pub fn grad_rule(&self) -> &QuadratureRule {
        &self.grad_rule
    }

    pub fn reaction_rule(&self) -> &QuadratureRule {
        &self.reaction_rule
    }

    pub fn mass_rule(&self) -> &QuadratureRule {
        &self.mass_rule
    }
}

/// Assembled symmetric banded stiffness/mass pair for one spatial
/// dimension, after boundary-condition reduction.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    pub k: BandedSymMatrix,
    pub m: BandedSymMatrix,
    pub dimension: usize,
    pub bc: BoundaryCondition,
}

/// Tensor-product operator: one 1D factor per spatial dimension (all
/// identical) with the reaction coefficient split evenly across
/// dimensions, so the d-dimensional operator is
/// K_d = Σ_i M ⊗ ... ⊗ K ⊗ ... ⊗ M and M_d = M ⊗ ... ⊗ M.
#[derive(Debug, Clone)]
pub struct KroneckerOperator {
    factor: OperatorPair,
    dims: usize,
    gamma_total: f64,
}

impl KroneckerOperator {
    /// Wraps an arbitrary factor; exposed for tests that need synthetic
    /// tensor operators without going through assembly.
    #[doc(hidden)]
    pub fn from_factor_for_tests(factor: OperatorPair, dims: usize, gamma_total: f64) -> Self {
        assert!((2..=3).contains(&dims));
        KroneckerOperator { factor, dims, gamma_total }
    }

    pub fn factor(&self) -> &OperatorPair {
        &self.factor
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn gamma_total(&self) -> f64 {
        self.gamma_total
    }

    pub fn gamma_per_dimension(&self) -> f64 {
        self.gamma_total / self.dims as f64
    }

    pub fn dof(&self) -> usize {
        self.factor.dimension.pow(self.dims as u32)
    }

    /// Explicit dense (K, M). Guarded by a DOF cap because the result is
    /// quadratic in the tensor DOF count.
    pub fn materialize(&self, cap: usize) -> Result<(DenseMatrix, DenseMatrix), AssemblyError> {
        let dof = self.dof();
        if dof > cap {
            return Err(AssemblyError::MaterializationTooLarge { dof, cap });
        }
        let n = self.factor.dimension;
        let k1 = &self.factor.k;
        let m1 = &self.factor.m;
        let mut k = DenseMatrix::zeros(dof, dof);
        let mut m = DenseMatrix::zeros(dof, dof);
        let idx: Vec<Vec<usize>> = (0..dof).map(|g| unflatten(g, n, self.dims)).collect();
        for g in 0..dof {
            for h in 0..dof {
                let mut mass = 1.0;
                for d in 0..self.dims {
                    mass *= m1.get(idx[g][d], idx[h][d]);
                }
                m.set(g, h, mass);
                let mut stiff = 0.0;
                for kd in 0..self.dims {
                    let mut term = 1.0;
                    for d in 0..self.dims {
                        let (i, j) = (idx[g][d], idx[h][d]);
                        term *= if d == kd { k1.get(i, j) } else { m1.get(i, j) };
                    }
                    stiff += term;
                }
                k.set(g, h, stiff);
            }
        }
        Ok((k, m))
    }
}

/// Global index layout for tensor grids: the first dimension varies
/// slowest, i.e. g = ((i₀·n) + i₁)·n + i₂ in 3D.
pub fn flatten(indices: &[usize], n: usize) -> usize {
    indices.iter().fold(0, |acc, &i| acc * n + i)
}

fn unflatten(mut g: usize, n: usize, dims: usize) -> Vec<usize> {
    let mut out = vec![0; dims];
    for d in (0..dims).rev() {
        out[d] = g % n;
        g /= n;
    }
    out
}

/// Assembles the 1D generalized eigenproblem matrices
///   K_ab = Σ_elements [ Σ_grad ϖ φ'_a φ'_b + Σ_reaction ϖ γ φ_a φ_b ]
///   M_ab = Σ_elements Σ_mass ϖ φ_a φ_b
/// with each rule's nodes mapped affinely into the element. Dirichlet
/// removes the first and last basis functions (clamped splines are
/// interpolatory at the endpoints); Neumann keeps the full space.
pub fn assemble_1d(
    spec: &BasisSpec,
    gamma: impl Fn(f64) -> f64,
    rules: &QuadratureTriple,
    bc: BoundaryCondition,
) -> Result<OperatorPair, AssemblyError> {
    let p = spec.degree();
    let n_basis = spec.num_basis();
    if bc == BoundaryCondition::Dirichlet && n_basis < 3 {
        return Err(AssemblyError::EmptyDirichletSpace { n: spec.num_elements(), p });
    }
    let mut k = BandedSymMatrix::zeros(n_basis, p);
    let mut m = BandedSymMatrix::zeros(n_basis, p);

    for el in elements_of(spec, 2.0) {
        let jac = el.jacobian;
        // Gradient term of K.
        for (&t, &w) in rules.grad_rule.nodes().iter().zip(rules.grad_rule.weights()) {
            let x = map_to_element(t, el.x_left, el.x_right);
            let ders = eval_basis_deriv(spec, x)?;
            for (a, (ia, da)) in ders.iter().enumerate() {
                for (ib, db) in ders.iter().skip(a) {
                    k.add(*ia, *ib, w * jac * da * db);
                }
            }
        }
        // Reaction term of K.
        for (&t, &w) in rules.reaction_rule.nodes().iter().zip(rules.reaction_rule.weights()) {
            let x = map_to_element(t, el.x_left, el.x_right);
            let g = gamma(x);
            if !g.is_finite() {
                return Err(AssemblyError::SingularCoefficient { x, element: el.index, value: g });
            }
            if g == 0.0 {
                continue;
            }
            let vals = eval_basis(spec, x)?;
            for (a, (ia, va)) in vals.iter().enumerate() {
                for (ib, vb) in vals.iter().skip(a) {
                    k.add(*ia, *ib, w * jac * g * va * vb);
                }
            }
        }
        // L² term of M.
        for (&t, &w) in rules.mass_rule.nodes().iter().zip(rules.mass_rule.weights()) {
            let x = map_to_element(t, el.x_left, el.x_right);
            let vals = eval_basis(spec, x)?;
            for (a, (ia, va)) in vals.iter().enumerate() {
                for (ib, vb) in vals.iter().skip(a) {
                    m.add(*ia, *ib, w * jac * va * vb);
                }
            }
        }
    }

    let (k, m, dim) = match bc {
        BoundaryCondition::Neumann => (k, m, n_basis),
        BoundaryCondition::Dirichlet => (k.strip_first_last(), m.strip_first_last(), n_basis - 2),
    };
    Ok(OperatorPair { k, m, dimension: dim, bc })
}

/// Affine map from the reference interval [-1, 1] into [xl, xr], exact at
/// the endpoints (t = ±1 maps to xl, xr with no rounding drift).
#[inline]
fn map_to_element(t: f64, xl: f64, xr: f64) -> f64 {
    0.5 * ((1.0 - t) * xl + (1.0 + t) * xr)
}

/// Builds the 1D factor of a tensor-product operator on the given spline
/// space with the constant reaction coefficient `gamma_total` split
/// evenly across `dims` dimensions (γ_1D = γ_total / dims, so the
/// Kronecker sum reproduces the full reaction term exactly once).
pub fn assemble_tensor(
    spec: &BasisSpec,
    gamma_total: f64,
    dims: usize,
    rules: &QuadratureTriple,
    bc: BoundaryCondition,
) -> Result<KroneckerOperator, AssemblyError> {
    if !(2..=3).contains(&dims) {
        return Err(AssemblyError::UnsupportedDimension { dims });
    }
    let gamma_1d = gamma_total / dims as f64;
    let factor = assemble_1d(spec, |_| gamma_1d, rules, bc)?;
    Ok(KroneckerOperator { factor, dims, gamma_total })
}
