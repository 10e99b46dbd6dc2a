//! Gauss-Legendre and Gauss-Lobatto rules on [-1, 1] of arbitrary point
//! count, and affine blends Q_τ = τ·A + (1-τ)·B stored as merged node
//! lists so downstream assembly has a single rule representation.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error("Gauss-Legendre rule needs at least 1 point (got {m})")]
    TooFewGaussPoints { m: usize },
    #[error("Gauss-Lobatto rule needs at least 2 points (got {m})")]
    TooFewLobattoPoints { m: usize },
    #[error("Newton iteration for node {index} of a {m}-point rule did not converge")]
    NodeSolveFailed { m: usize, index: usize },
    #[error("no built-in optimal blend for degree {p}; use blend() with an explicit tau")]
    NoBuiltinOptimum { p: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    Gauss,
    Lobatto,
    Blended,
    Custom,
}

/// Quadrature rule on the reference interval [-1, 1]. Nodes are strictly
/// increasing; weights may be negative for blends with τ outside [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exactness_degree: usize,
    family: RuleFamily,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Largest polynomial degree integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        self.exactness_degree
    }

    pub fn family(&self) -> RuleFamily {
        self.family
    }

    /// Integrates f over [c, d] by affinely mapping the reference nodes.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64, c: f64, d: f64) -> f64 {
        assert!(c < d, "integration interval [{c}, {d}] is empty");
        let jac = 0.5 * (d - c);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| {
                // Convex-combination map so t = ±1 lands exactly on c, d.
                let x = 0.5 * ((1.0 - t) * c + (1.0 + t) * d);
                w * jac * f(x)
            })
            .sum()
    }
}

/// Evaluates the Legendre polynomial P_m and its derivative P'_m at x by
/// the three-term recurrence.
fn legendre_and_deriv(m: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    if m == 0 {
        return (1.0, 0.0);
    }
    let mut p = x;
    for k in 2..=m {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    // (1 - x²) P'_m = m (P_{m-1} - x P_m)
    let deriv = if (1.0 - x * x).abs() > f64::EPSILON {
        m as f64 * (p_prev - x * p) / (1.0 - x * x)
    } else {
        // At x = ±1: P'_m(±1) = (±1)^{m-1} m (m+1) / 2.
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(m as i32 - 1) };
        sign * (m * (m + 1)) as f64 / 2.0
    };
    (p, deriv)
}

/// m-point Gauss-Legendre rule: nodes at the roots of P_m, weights
/// 2 / ((1 - x²) P'_m(x)²); exact for degree 2m - 1.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule, QuadratureError> {
    if m < 1 {
        return Err(QuadratureError::TooFewGaussPoints { m });
    }
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Chebyshev-type initial guess for the i-th root (descending x).
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QuadratureError::NodeSolveFailed { m, index: i });
        }
        let (_, dp) = legendre_and_deriv(m, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if m % 2 == 1 {
        // Enforce the exact central node for odd counts.
        nodes[m / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights, exactness_degree: 2 * m - 1, family: RuleFamily::Gauss })
}

/// m-point Gauss-Lobatto rule: nodes ±1 plus the roots of P'_{m-1},
/// weights 2 / (m (m-1) P_{m-1}(x)²); exact for degree 2m - 3.
pub fn gauss_lobatto(m: usize) -> Result<QuadratureRule, QuadratureError> {
    if m < 2 {
        return Err(QuadratureError::TooFewLobattoPoints { m });
    }
    let n = m - 1;
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let end_weight = 2.0 / (m * n) as f64;
    nodes[0] = -1.0;
    nodes[m - 1] = 1.0;
    weights[0] = end_weight;
    weights[m - 1] = end_weight;
    for i in 1..=(m - 2).div_ceil(2) {
        // Interior nodes: roots of P'_n, seeded between the Chebyshev
        // extrema, refined by Newton with
        // P''_n = (2x P'_n - n(n+1) P_n) / (1 - x²).
        let mut x = (std::f64::consts::PI * i as f64 / n as f64).cos();
        let mut converged = false;
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let ddp = (2.0 * x * dp - (n * (n + 1)) as f64 * p) / (1.0 - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(QuadratureError::NodeSolveFailed { m, index: i });
        }
        let (p, _) = legendre_and_deriv(n, x);
        let w = 2.0 / ((m * n) as f64 * p * p);
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
        let (p, _) = legendre_and_deriv(n, 0.0);
        weights[m / 2] = 2.0 / ((m * n) as f64 * p * p);
    }
    Ok(QuadratureRule { nodes, weights, exactness_degree: 2 * m - 3, family: RuleFamily::Lobatto })
}

/// Affine blend Q_τ = τ·A + (1-τ)·B of two rules with τ unconstrained
/// (negative-weight blends are legitimate; the cubic optimum needs
/// τ = -3/2). Stores the merged union node list alongside the parents.
#[derive(Debug, Clone, PartialEq)]
pub struct BlendedRule {
    rule_a: QuadratureRule,
    rule_b: QuadratureRule,
    tau: f64,
    merged: QuadratureRule,
}

impl BlendedRule {
    pub fn rule_a(&self) -> &QuadratureRule {
        &self.rule_a
    }

    pub fn rule_b(&self) -> &QuadratureRule {
        &self.rule_b
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// The blend as a single rule over the union of the parent node sets.
    pub fn merged(&self) -> &QuadratureRule {
        &self.merged
    }

    pub fn integrate(&self, f: impl FnMut(f64) -> f64, c: f64, d: f64) -> f64 {
        self.merged.integrate(f, c, d)
    }
}

/// Tolerance for identifying coincident nodes when merging two rules;
/// Gauss/Lobatto generators are converged to ~1e-15, so 1e-12 separates
/// "same node" from distinct roots at any practical point count.
const NODE_MERGE_TOL: f64 = 1e-12;

pub fn blend(rule_a: QuadratureRule, rule_b: QuadratureRule, tau: f64) -> BlendedRule {
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(rule_a.len() + rule_b.len());
    pairs.extend(rule_a.nodes.iter().zip(&rule_a.weights).map(|(&x, &w)| (x, tau * w)));
    pairs.extend(rule_b.nodes.iter().zip(&rule_b.weights).map(|(&x, &w)| (x, (1.0 - tau) * w)));
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (x, w) in pairs {
        match nodes.last() {
            Some(&last) if (x - last) <= NODE_MERGE_TOL => {
                *weights.last_mut().unwrap() += w;
            }
            _ => {
                nodes.push(x);
                weights.push(w);
            }
        }
    }
    // Nodes whose blended weight is exactly zero (τ = 0 or 1) drop out.
    let kept: Vec<(f64, f64)> = nodes.into_iter().zip(weights).filter(|&(_, w)| w != 0.0).collect();
    let merged = QuadratureRule {
        nodes: kept.iter().map(|&(x, _)| x).collect(),
        weights: kept.iter().map(|&(_, w)| w).collect(),
        exactness_degree: rule_a.exactness_degree.min(rule_b.exactness_degree),
        family: RuleFamily::Blended,
    };
    BlendedRule { rule_a, rule_b, tau, merged }
}

/// Default blending parameter for the linear (p = 1) Lobatto/Gauss pair.
/// Not given in closed form by the dispersion expansions used for p = 2
/// and p = 3; recovered by the τ-sweep in `analysis` (lumped/consistent
/// mass blend that cancels the Λ² error term).
pub const DEFAULT_TAU_P1: f64 = 0.5;

/// Convention blend τ·L_m + (1-τ)·G_m: τ weights the Lobatto rule, 1-τ
/// the Gauss rule of the same point count. This is the parameterization
/// in which the quadratic-element eigenvalue-error coefficient reads
/// (2-3τ)/1440, with the optimum τ = 2/3 (Lobatto:Gauss weights 2:1).
pub fn blend_lobatto_gauss(m: usize, tau: f64) -> Result<BlendedRule, QuadratureError> {
    Ok(blend(gauss_lobatto(m)?, gauss_legendre(m)?, tau))
}

/// Mirror-image parameterization τ·G_m + (1-τ)·L_m: τ weights the Gauss
/// rule. Identical rule set to `blend_lobatto_gauss(m, 1 - tau)`; only the
/// parameter labeling differs. This is the parameterization in which the
/// cubic-element eigenvalue-error coefficient reads (2τ+3)/151200, with
/// the optimum τ = -3/2; the cubic optimum is conventionally quoted in
/// this orientation, the quadratic one (τ = 2/3) in the other.
pub fn blend_gauss_lobatto(m: usize, tau: f64) -> Result<BlendedRule, QuadratureError> {
    Ok(blend(gauss_legendre(m)?, gauss_lobatto(m)?, tau))
}

/// All-interior-node blend τ·G_{p+1} + (1-τ)·G_p for integrands that are
/// singular at element endpoints, where Lobatto rules cannot be used.
pub fn blend_gauss_pair(p: usize, tau: f64) -> Result<BlendedRule, QuadratureError> {
    Ok(blend(gauss_legendre(p + 1)?, gauss_legendre(p)?, tau))
}

/// Lobatto/Gauss blends that cancel the leading Λ^{2p} eigenvalue-error
/// term for maximum-continuity elements of degree p, each in the
/// orientation its optimum is conventionally quoted in:
/// p=1 → τ·L₂ + (1-τ)·G₂ with τ=1/2 (orientation-symmetric),
/// p=2 → τ·L₃ + (1-τ)·G₃ with τ=2/3 (zero of (2-3τ)/1440),
/// p=3 → τ·G₄ + (1-τ)·L₄ with τ=-3/2 (zero of (2τ+3)/151200).
pub fn optimal_blend(p: usize) -> Result<BlendedRule, QuadratureError> {
    match p {
        1 => blend_lobatto_gauss(2, DEFAULT_TAU_P1),
        2 => blend_lobatto_gauss(3, 2.0 / 3.0),
        3 => blend_gauss_lobatto(4, -1.5),
        _ => Err(QuadratureError::NoBuiltinOptimum { p }),
    }
}
