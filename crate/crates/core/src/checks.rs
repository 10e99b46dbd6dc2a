//! Self-contained pass/fail reproductions of the headline numerical
//! results: dispersion coefficients, optimal blending parameters,
//! super-convergence rates, the tensor-operator oracle, the
//! trapping-potential benchmark tables, and the whole-spectrum accuracy
//! comparison. Shared by the CLI `--check` mode and the acceptance test
//! suite so both report identical verdicts.

use crate::analysis::{
    convergence_study, default_tau_grid, dispersion_coefficient, schrodinger_blended_table,
    schrodinger_gauss_table, spectrum_rows, tau_sweep, BlendPair, ModelProblem,
    SCHRODINGER_TABLE_MODES,
};
use crate::assembly::{
    assemble_1d, assemble_tensor, BoundaryCondition, OperatorPair, QuadratureTriple,
    DEFAULT_MATERIALIZE_CAP,
};
use crate::eigen::{shift_spectrum, solve_generalized, solve_generalized_dense, solve_tensor};
use crate::linalg::{compensated_dot, DenseMatrix};
use crate::quadrature::{
    blend, blend_lobatto_gauss, gauss_legendre, gauss_lobatto, optimal_blend, QuadratureRule,
};
use crate::splines::{elements_of, eval_basis, eval_basis_deriv, BasisSpec};
use std::time::Instant;

/// Outcome of one named check, with human-readable evidence lines.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub id: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
}

struct CheckBuilder {
    passed: bool,
    lines: Vec<String>,
}

impl CheckBuilder {
    fn new() -> Self {
        CheckBuilder { passed: true, lines: Vec::new() }
    }

    fn require(&mut self, cond: bool, msg: String) {
        if cond {
            self.lines.push(format!("ok: {msg}"));
        } else {
            self.passed = false;
            self.lines.push(format!("FAIL: {msg}"));
        }
    }

    fn note(&mut self, msg: String) {
        self.lines.push(format!("note: {msg}"));
    }
}

fn run_check(
    id: &'static str,
    body: impl FnOnce(&mut CheckBuilder) -> Result<(), Box<dyn std::error::Error>>,
) -> CheckResult {
    let start = Instant::now();
    let mut b = CheckBuilder::new();
    if let Err(e) = body(&mut b) {
        b.passed = false;
        b.lines.push(format!("FAIL: aborted with error: {e}"));
    }
    CheckResult {
        id,
        passed: b.passed,
        details: b.lines.join("\n  "),
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn within_rel(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol * want.abs()
}

fn dev_pct(got: f64, want: f64) -> f64 {
    100.0 * (got - want) / want
}

/// Leading dispersion coefficients of the quadratic scheme on the 1D
/// Neumann problem: Gauss +1/720, Lobatto −1/1440, blends (2−3τ)/1440,
/// and the τ = 2/3 optimum where the Λ⁴ term vanishes and the Λ⁶
/// coefficient is 11/60480.
pub fn check_dispersion_coefficients() -> CheckResult {
    run_check("dispersion-coefficients", |b| {
        let problem = ModelProblem::LaplaceNeumann1d;
        let base = 32;

        let g3 = QuadratureTriple::uniform(gauss_legendre(3)?);
        let c = dispersion_coefficient(problem, 2, &g3, 4, base)?.coefficient;
        let want = 1.0 / 720.0;
        b.require(
            within_rel(c, want, 0.05),
            format!("G3 L^4 coefficient {c:.4e} vs 1/720 ({:+.2}%)", dev_pct(c, want)),
        );

        let l3 = QuadratureTriple::uniform(gauss_lobatto(3)?);
        let c = dispersion_coefficient(problem, 2, &l3, 4, base)?.coefficient;
        let want = -1.0 / 1440.0;
        b.require(
            within_rel(c, want, 0.05),
            format!("L3 L^4 coefficient {c:.4e} vs -1/1440 ({:+.2}%)", dev_pct(c, want)),
        );

        for tau in [0.2, 0.5, 0.9] {
            let rule = QuadratureTriple::uniform(blend_lobatto_gauss(3, tau)?.merged().clone());
            let c = dispersion_coefficient(problem, 2, &rule, 4, base)?.coefficient;
            let want = (2.0 - 3.0 * tau) / 1440.0;
            b.require(
                within_rel(c, want, 0.05),
                format!(
                    "tau={tau} L^4 coefficient {c:.4e} vs (2-3tau)/1440 = {want:.4e} ({:+.2}%)",
                    dev_pct(c, want)
                ),
            );
        }

        let opt = QuadratureTriple::uniform(blend_lobatto_gauss(3, 2.0 / 3.0)?.merged().clone());
        let c4 = dispersion_coefficient(problem, 2, &opt, 4, base)?.coefficient;
        b.require(
            c4.abs() < 1.0 / 14400.0,
            format!("tau=2/3 residual L^4 coefficient |{c4:.2e}| < 1/14400"),
        );
        let c6 = dispersion_coefficient(problem, 2, &opt, 6, base)?.coefficient;
        let want = 11.0 / 60480.0;
        b.require(
            within_rel(c6, want, 0.10),
            format!("tau=2/3 L^6 coefficient {c6:.4e} vs 11/60480 ({:+.2}%)", dev_pct(c6, want)),
        );
        Ok(())
    })
}

/// The τ-sweep recovers the known optimal blending parameters: τ* = 2/3
/// for p = 2 and τ* = −3/2 for p = 3.
pub fn check_tau_sweep_optima() -> CheckResult {
    run_check("tau-sweep-optima", |b| {
        let rep2 = tau_sweep(2, &default_tau_grid(2, BlendPair::LobattoGauss))?;
        b.require(
            (0.665..=0.668).contains(&rep2.tau_star),
            format!("p=2 tau* = {:.5} in [0.665, 0.668]", rep2.tau_star),
        );
        let rep3 = tau_sweep(3, &default_tau_grid(3, BlendPair::LobattoGauss))?;
        b.require(
            (-1.52..=-1.48).contains(&rep3.tau_star),
            format!("p=3 tau* = {:.5} in [-1.52, -1.48]", rep3.tau_star),
        );
        Ok(())
    })
}

/// 1D eigenvalue convergence, p = 2, Neumann, modes {2, 4, 8}: order 4
/// under Gauss, order 6 under the optimal blend, with the blend beating
/// Gauss on every mesh.
pub fn check_convergence_1d() -> CheckResult {
    run_check("convergence-1d", |b| {
        let modes = [2usize, 4, 8];
        let meshes = [16usize, 32, 64, 128];
        let gauss = QuadratureTriple::uniform(gauss_legendre(3)?);
        let opt = QuadratureTriple::uniform(optimal_blend(2)?.merged().clone());
        let problem = ModelProblem::LaplaceNeumann1d;
        let gs = convergence_study(problem, 2, &gauss, &modes, &meshes)?;
        let os = convergence_study(problem, 2, &opt, &modes, &meshes)?;
        // Every mode is measured on the same meshes, so the least-squares
        // slope of the pooled (ln h, ln|e|) cloud equals the mean of the
        // per-mode slopes. The pooled slope is what the rate claim is
        // about; per-mode slopes are reported for transparency (the
        // highest mode starts at Lambda = omega*h = pi/2 on the coarsest
        // mesh, where the next-order term still steepens its fit).
        let pooled = |studies: &[crate::analysis::ConvergenceStudy]| -> f64 {
            studies.iter().map(|s| s.report.fitted_slope).sum::<f64>() / studies.len() as f64
        };
        let g_slope = pooled(&gs);
        let o_slope = pooled(&os);
        let per_mode = |studies: &[crate::analysis::ConvergenceStudy]| -> String {
            studies
                .iter()
                .map(|s| format!("mode {} {:.3}", s.mode, s.report.fitted_slope))
                .collect::<Vec<_>>()
                .join(", ")
        };
        b.require(
            (g_slope - 4.0).abs() <= 0.15,
            format!("Gauss fitted slope {g_slope:.3} = 4.0 +/- 0.15"),
        );
        b.note(format!("Gauss per-mode slopes: {}", per_mode(&gs)));
        b.require(
            (o_slope - 6.0).abs() <= 0.25,
            format!("blended fitted slope {o_slope:.3} = 6.0 +/- 0.25"),
        );
        b.note(format!("blended per-mode slopes: {}", per_mode(&os)));
        for (g, o) in gs.iter().zip(&os) {
            for (&(n, ge), &(_, oe)) in g.signed_errors.iter().zip(&o.signed_errors) {
                b.require(
                    oe.abs() < ge.abs(),
                    format!(
                        "mode {} n={n}: blended |{:.3e}| < Gauss |{:.3e}|",
                        g.mode,
                        oe.abs(),
                        ge.abs()
                    ),
                );
            }
        }
        Ok(())
    })
}

/// 3D eigenvalue convergence through the tensor route, p = 2, Dirichlet,
/// modes {2, 10, 16}: order 4 under Gauss, order 6 under the blend.
pub fn check_convergence_3d() -> CheckResult {
    run_check("convergence-3d", |b| {
        let modes = [2usize, 10, 16];
        let meshes = [8usize, 16, 32, 64];
        let gauss = QuadratureTriple::uniform(gauss_legendre(3)?);
        let opt = QuadratureTriple::uniform(optimal_blend(2)?.merged().clone());
        let problem = ModelProblem::LaplaceDirichlet3d;
        let gs = convergence_study(problem, 2, &gauss, &modes, &meshes)?;
        let os = convergence_study(problem, 2, &opt, &modes, &meshes)?;
        for (g, o) in gs.iter().zip(&os) {
            b.require(
                (g.report.fitted_slope - 4.0).abs() <= 0.2,
                format!("mode {} Gauss slope {:.3} = 4.0 +/- 0.2", g.mode, g.report.fitted_slope),
            );
            b.require(
                (o.report.fitted_slope - 6.0).abs() <= 0.3,
                format!("mode {} blended slope {:.3} = 6.0 +/- 0.3", o.mode, o.report.fitted_slope),
            );
        }
        Ok(())
    })
}

/// Direct 3D tensor-product assembly: loops over 3D elements and 3D
/// quadrature nodes, evaluating trivariate basis products explicitly.
/// Independent of the Kronecker-product construction it cross-checks.
fn direct_tensor_3d(
    spec: &BasisSpec,
    gamma_total: f64,
    rules: &QuadratureTriple,
    bc: BoundaryCondition,
) -> Result<(DenseMatrix, DenseMatrix), Box<dyn std::error::Error>> {
    let nb = spec.num_basis();
    let active: Vec<usize> = match bc {
        BoundaryCondition::Dirichlet => (1..nb - 1).collect(),
        BoundaryCondition::Neumann => (0..nb).collect(),
    };
    let mut pos = vec![usize::MAX; nb];
    for (slot, &i) in active.iter().enumerate() {
        pos[i] = slot;
    }
    let d = active.len();
    let dof = d * d * d;
    let mut k = DenseMatrix::zeros(dof, dof);
    let mut m = DenseMatrix::zeros(dof, dof);
    let elements = elements_of(spec, 2.0);

    // One line of per-node basis data along a single dimension.
    struct LineNode {
        w_jac: f64,
        vals: Vec<(usize, f64)>,
        ders: Vec<(usize, f64)>,
    }
    let line_nodes = |rule: &QuadratureRule,
                      el: &crate::splines::Element|
     -> Result<Vec<LineNode>, crate::splines::SplineError> {
        rule.nodes()
            .iter()
            .zip(rule.weights())
            .map(|(&t, &w)| {
                let x = 0.5 * ((1.0 - t) * el.x_left + (1.0 + t) * el.x_right);
                Ok(LineNode {
                    w_jac: w * el.jacobian,
                    vals: eval_basis(spec, x)?,
                    ders: eval_basis_deriv(spec, x)?,
                })
            })
            .collect()
    };

    // Local trivariate functions at one 3D node: flat active index, value,
    // and the three gradient components.
    let locals_at = |n1: &LineNode, n2: &LineNode, n3: &LineNode| -> Vec<(usize, f64, [f64; 3])> {
        let mut out = Vec::with_capacity(n1.vals.len() * n2.vals.len() * n3.vals.len());
        for (a, &(i1, v1)) in n1.vals.iter().enumerate() {
            if pos[i1] == usize::MAX {
                continue;
            }
            let d1 = n1.ders[a].1;
            for (bidx, &(i2, v2)) in n2.vals.iter().enumerate() {
                if pos[i2] == usize::MAX {
                    continue;
                }
                let d2 = n2.ders[bidx].1;
                for (c, &(i3, v3)) in n3.vals.iter().enumerate() {
                    if pos[i3] == usize::MAX {
                        continue;
                    }
                    let d3 = n3.ders[c].1;
                    let g = (pos[i1] * d + pos[i2]) * d + pos[i3];
                    out.push((g, v1 * v2 * v3, [d1 * v2 * v3, v1 * d2 * v3, v1 * v2 * d3]));
                }
            }
        }
        out
    };

    enum Term {
        Grad,
        Value { coeff: f64, into_mass: bool },
    }
    let mut passes: Vec<(&QuadratureRule, Term)> = vec![
        (rules.grad_rule(), Term::Grad),
        (rules.mass_rule(), Term::Value { coeff: 1.0, into_mass: true }),
    ];
    if gamma_total != 0.0 {
        passes.push((rules.reaction_rule(), Term::Value { coeff: gamma_total, into_mass: false }));
    }

    for (rule, term) in &mut passes {
        for e1 in &elements {
            let l1 = line_nodes(rule, e1)?;
            for e2 in &elements {
                let l2 = line_nodes(rule, e2)?;
                for e3 in &elements {
                    let l3 = line_nodes(rule, e3)?;
                    for n1 in &l1 {
                        for n2 in &l2 {
                            for n3 in &l3 {
                                let w3 = n1.w_jac * n2.w_jac * n3.w_jac;
                                let locals = locals_at(n1, n2, n3);
                                for &(ga, va, da) in &locals {
                                    for &(gb, vb, db) in &locals {
                                        match term {
                                            Term::Grad => {
                                                let dot =
                                                    da[0] * db[0] + da[1] * db[1] + da[2] * db[2];
                                                k.add(ga, gb, w3 * dot);
                                            }
                                            Term::Value { coeff, into_mass } => {
                                                let v = w3 * *coeff * va * vb;
                                                if *into_mass {
                                                    m.add(ga, gb, v);
                                                } else {
                                                    k.add(ga, gb, v);
                                                }
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok((k, m))
}

/// Kronecker-operator oracle: materialized tensor matrices agree
/// entrywise with direct 3D assembly, and tensor-route eigenvalues agree
/// with a dense generalized solve of the materialized pair.
pub fn check_kronecker_oracle() -> CheckResult {
    run_check("kronecker-oracle", |b| {
        for p in [1usize, 2] {
            for n in [3usize, 4] {
                for gamma in [0.0, 3.0] {
                    let spec = BasisSpec::uniform_open(0.0, 1.0, n, p)?;
                    let rules = QuadratureTriple::uniform(gauss_legendre(p + 1)?);
                    let bc = BoundaryCondition::Dirichlet;
                    let kron = assemble_tensor(&spec, gamma, 3, &rules, bc)?;
                    let (km, mm) = kron.materialize(DEFAULT_MATERIALIZE_CAP)?;
                    let (kd, md) = direct_tensor_3d(&spec, gamma, &rules, bc)?;
                    let mut max_dev: f64 = 0.0;
                    for i in 0..km.rows() {
                        for j in 0..km.rows() {
                            max_dev = max_dev.max((km.get(i, j) - kd.get(i, j)).abs());
                            max_dev = max_dev.max((mm.get(i, j) - md.get(i, j)).abs());
                        }
                    }
                    b.require(
                        max_dev <= 1e-12,
                        format!(
                            "p={p} n={n}^3 gamma={gamma}: max |Kronecker - direct| = {max_dev:.2e} <= 1e-12"
                        ),
                    );
                    let st = solve_tensor(&kron)?;
                    let sd = solve_generalized_dense(&kd, &md)?;
                    let mut max_eig_dev: f64 = 0.0;
                    for (a, e) in st.eigenvalues.iter().zip(&sd.eigenvalues) {
                        let scale = a.abs().max(1.0);
                        max_eig_dev = max_eig_dev.max((a - e).abs() / scale);
                    }
                    b.require(
                        max_eig_dev <= 1e-10,
                        format!(
                            "p={p} n={n}^3 gamma={gamma}: max eigenvalue deviation {max_eig_dev:.2e} <= 1e-10 (tensor vs dense)"
                        ),
                    );
                }
            }
        }
        Ok(())
    })
}

/// Reference relative eigenvalue errors for the trapping-potential
/// benchmark under the (p+1)-point Gauss rule, modes (1, 2, 4). Rows are
/// (element count, errors); the conventional row label N equals twice the
/// element count.
pub const SCHRODINGER_GAUSS_REF_P1: [(usize, [f64; 3]); 3] = [
    (20, [3.19e-3, 1.06e-2, 3.95e-2]),
    (40, [7.41e-4, 2.49e-3, 9.33e-3]),
    (80, [1.78e-4, 6.04e-4, 2.27e-3]),
];
pub const SCHRODINGER_GAUSS_RHO_P1: [f64; 3] = [2.08, 2.07, 2.06];
pub const SCHRODINGER_GAUSS_REF_P2: [(usize, [f64; 3]); 3] = [
    (5, [1.63e-3, 1.68e-2, 1.02]),
    (10, [7.94e-5, 6.68e-4, 9.07e-3]),
    (20, [4.62e-6, 3.61e-5, 4.07e-4]),
];
pub const SCHRODINGER_GAUSS_RHO_P2: [f64; 3] = [4.23, 4.43, 5.64];

/// Gauss columns of the trapping-potential benchmark: every tabulated
/// entry within 2% and every fitted slope within ±0.1 of the reference.
pub fn check_schrodinger_gauss_table() -> CheckResult {
    run_check("schrodinger-gauss-table", |b| {
        for (p, refs, rhos) in [
            (1usize, &SCHRODINGER_GAUSS_REF_P1, &SCHRODINGER_GAUSS_RHO_P1),
            (2, &SCHRODINGER_GAUSS_REF_P2, &SCHRODINGER_GAUSS_RHO_P2),
        ] {
            let elements: Vec<usize> = refs.iter().map(|&(n, _)| n).collect();
            let table = schrodinger_gauss_table(p, &elements)?;
            for (row, &(n, want_row)) in table.rows.iter().zip(refs.iter()) {
                for (mi, &mode) in SCHRODINGER_TABLE_MODES.iter().enumerate() {
                    let got = row.errors[mi].abs();
                    let want = want_row[mi];
                    b.require(
                        within_rel(got, want, 0.02),
                        format!(
                            "p={p} N={} mode {mode}: |error| {got:.3e} vs {want:.3e} ({:+.2}%)",
                            2 * n,
                            dev_pct(got, want)
                        ),
                    );
                }
            }
            for (mi, (&got, &want)) in table.fitted_rho.iter().zip(rhos.iter()).enumerate() {
                b.require(
                    (got - want).abs() <= 0.1,
                    format!(
                        "p={p} mode {} slope {got:.3} vs {want} (+/- 0.1)",
                        SCHRODINGER_TABLE_MODES[mi]
                    ),
                );
            }
        }
        Ok(())
    })
}

/// Blended (interior-node Gauss-pair) columns of the trapping-potential
/// benchmark: super-convergent slopes and strictly smaller errors than
/// the Gauss columns at every tabulated entry.
pub fn check_schrodinger_blended_table() -> CheckResult {
    run_check("schrodinger-blended-table", |b| {
        for (p, refs, rho_floor) in
            [(1usize, &SCHRODINGER_GAUSS_REF_P1, 2.7), (2, &SCHRODINGER_GAUSS_REF_P2, 5.5)]
        {
            let elements: Vec<usize> = refs.iter().map(|&(n, _)| n).collect();
            let gauss = schrodinger_gauss_table(p, &elements)?;
            let blended = schrodinger_blended_table(p, &elements)?;
            if let Some(tau) = blended.tau {
                b.note(format!("p={p}: swept Gauss-pair tau* = {tau:.6}"));
            }
            for (mi, &mode) in SCHRODINGER_TABLE_MODES.iter().enumerate() {
                let rho = blended.fitted_rho[mi];
                b.require(
                    rho >= rho_floor,
                    format!("p={p} mode {mode} blended slope {rho:.3} >= {rho_floor}"),
                );
            }
            for (grow, brow) in gauss.rows.iter().zip(&blended.rows) {
                for (mi, &mode) in SCHRODINGER_TABLE_MODES.iter().enumerate() {
                    let ge = grow.errors[mi].abs();
                    let be = brow.errors[mi].abs();
                    b.require(
                        be < ge,
                        format!(
                            "p={p} N={} mode {mode}: blended |{be:.3e}| < Gauss |{ge:.3e}|",
                            2 * grow.elements
                        ),
                    );
                }
            }
        }
        Ok(())
    })
}

/// Whole-spectrum comparison at 1000 DOF, p = 2, Neumann: in the lower
/// 30% of the spectrum the optimally blended rule is at least as accurate
/// as Gauss for every mode, up to the floating-point noise floor of the
/// assembled operators.
pub fn check_spectrum_branch() -> CheckResult {
    run_check("spectrum-branch", |b| {
        let p = 2usize;
        let dof = 1000usize;
        let n = dof - p;
        let problem = ModelProblem::LaplaceNeumann1d;
        let (x0, x1) = problem.domain();
        let spec = BasisSpec::uniform_open(x0, x1, n, p)?;
        let gauss = QuadratureTriple::uniform(gauss_legendre(3)?);
        let opt = QuadratureTriple::uniform(optimal_blend(2)?.merged().clone());
        let og = assemble_1d(&spec, |x| problem.gamma(x), &gauss, problem.bc())?;
        let oo = assemble_1d(&spec, |x| problem.gamma(x), &opt, problem.bc())?;
        let sg = solve_generalized(&og)?;
        let so = solve_generalized(&oo)?;
        assert_eq!(sg.len(), dof);
        let rg = spectrum_rows(&sg, problem)?;
        let ro = spectrum_rows(&so, problem)?;
        let ug = sg.eigenvectors.as_ref().expect("banded solver returns eigenvectors");
        let uo = so.eigenvectors.as_ref().expect("banded solver returns eigenvectors");
        // Rounding the assembled entries of K and M to f64 already perturbs
        // a Rayleigh quotient λ = uᵀKu / uᵀMu by roughly
        // eps·(|u|ᵀ|K||u| + λ·|u|ᵀ|M||u|) / uᵀMu, so relative eigenvalue
        // errors below that floor have noise for a sign. On the lowest few
        // modes of this mesh the true errors (∝ λ³h⁶ and smaller) sit far
        // beneath the floor; a comparison decided within a small multiple
        // of the combined floors of both rules is a tie, not a violation.
        // The factor 8 covers accumulation across the handful of quadrature
        // contributions that form each entry.
        let eps = f64::EPSILON;
        let floor_of = |ops: &OperatorPair, u: &[f64], lambda_hat: f64, exact: f64| -> f64 {
            eps * (ops.k.abs_quad_form(u) + lambda_hat * ops.m.abs_quad_form(u)) / exact
        };
        let offset = problem.zero_mode_offset();
        let mut checked = 0usize;
        let mut gated = 0usize;
        let mut violations: Vec<String> = Vec::new();
        for (g, o) in rg.iter().zip(&ro) {
            if g.mode_fraction > 0.3 {
                break;
            }
            checked += 1;
            let eg = g.relative_error.abs();
            let eo = o.relative_error.abs();
            if eo <= eg {
                continue;
            }
            let col = g.mode - 1 + offset;
            let allowance = 8.0
                * (floor_of(&og, &ug.column(col), g.discrete, g.exact)
                    + floor_of(&oo, &uo.column(col), o.discrete, o.exact));
            if eo <= eg + allowance {
                gated += 1;
            } else {
                violations.push(format!(
                    "mode {} (j/N = {:.3}): blended |{:.3e}| > Gauss |{:.3e}| + floor {:.1e}",
                    g.mode, g.mode_fraction, eo, eg, allowance
                ));
            }
        }
        b.require(
            violations.is_empty() && checked >= 300,
            format!(
                "blended |error| <= Gauss |error| on all {checked} modes with j/N <= 0.3 \
                 ({} violations{})",
                violations.len(),
                violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
            ),
        );
        b.note(format!(
            "{gated} of {checked} comparisons fell within the operator rounding floor \
             and were treated as ties"
        ));
        Ok(())
    })
}

/// Condensed property sweep: quadrature exactness, partition of unity,
/// derivative consistency, operator definiteness, orthonormal residuals,
/// blending linearity, and the constant-shift identity.
pub fn check_property_smoke() -> CheckResult {
    run_check("property-smoke", |b| {
        // Quadrature exactness m = 2..10.
        let exact_monomial = |k: usize| if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
        let mut worst: f64 = 0.0;
        for m in 2..=10 {
            let g = gauss_legendre(m)?;
            for k in 0..=g.exactness_degree() {
                worst = worst
                    .max((g.integrate(|x| x.powi(k as i32), -1.0, 1.0) - exact_monomial(k)).abs());
            }
            let l = gauss_lobatto(m)?;
            for k in 0..=l.exactness_degree() {
                worst = worst
                    .max((l.integrate(|x| x.powi(k as i32), -1.0, 1.0) - exact_monomial(k)).abs());
            }
        }
        b.require(worst <= 1e-12, format!("exactness sweep m=2..10, worst residual {worst:.2e}"));

        // Partition of unity and derivative-sum-zero across degrees.
        let mut pu_worst: f64 = 0.0;
        let mut ds_worst: f64 = 0.0;
        for p in 1..=4 {
            let spec = BasisSpec::uniform_open(0.0, 1.0, 7, p)?;
            for i in 0..=140 {
                let x = i as f64 / 140.0;
                let s: f64 = eval_basis(&spec, x)?.iter().map(|&(_, v)| v).sum();
                pu_worst = pu_worst.max((s - 1.0).abs());
                let ds: f64 = eval_basis_deriv(&spec, x)?.iter().map(|&(_, v)| v).sum();
                ds_worst = ds_worst.max(ds.abs());
            }
        }
        b.require(pu_worst <= 1e-12, format!("partition of unity, worst |sum-1| = {pu_worst:.2e}"));
        b.require(ds_worst <= 1e-10, format!("derivative sums, worst |sum| = {ds_worst:.2e}"));

        // Derivative vs central finite difference.
        let mut fd_worst: f64 = 0.0;
        for p in [2usize, 3] {
            let spec = BasisSpec::uniform_open(0.0, 1.0, 9, p)?;
            let eps = 1e-6;
            for &x in &[0.137, 0.5, 0.803] {
                let der = eval_basis_deriv(&spec, x)?;
                let up = eval_basis(&spec, x + eps)?;
                let dn = eval_basis(&spec, x - eps)?;
                for ((i, d), ((iu, vu), (_, vd))) in der.iter().zip(up.iter().zip(dn.iter())) {
                    assert_eq!(i, iu);
                    fd_worst = fd_worst.max((d - (vu - vd) / (2.0 * eps)).abs());
                }
            }
        }
        b.require(fd_worst <= 1e-5, format!("derivative FD check, worst dev {fd_worst:.2e}"));

        // Mass definiteness and stiffness semidefiniteness.
        for p in 1..=3 {
            let spec = BasisSpec::uniform_open(0.0, 1.0, 10, p)?;
            let rules = QuadratureTriple::uniform(gauss_legendre(p + 1)?);
            for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
                let ops = assemble_1d(&spec, |_| 0.0, &rules, bc)?;
                b.require(ops.m.cholesky().is_ok(), format!("p={p} {bc:?}: mass is SPD"));
                let nd = ops.dimension;
                let mut state = 0x9e3779b97f4a7c15u64;
                let mut rand = || {
                    state =
                        state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
                };
                let mut min_q: f64 = f64::INFINITY;
                for _ in 0..5 {
                    let v: Vec<f64> = (0..nd).map(|_| rand()).collect();
                    min_q = min_q.min(ops.k.quad_form(&v));
                }
                b.require(
                    min_q >= -1e-10 * ops.k.max_abs(),
                    format!("p={p} {bc:?}: stiffness PSD (min quad form {min_q:.2e})"),
                );
            }
        }

        // M-orthonormality and eigenresiduals on a variable-coefficient solve.
        let spec = BasisSpec::uniform_open(0.0, 1.0, 12, 2)?;
        let rules = QuadratureTriple::uniform(gauss_legendre(3)?);
        let ops = assemble_1d(&spec, |x| 1.0 + x, &rules, BoundaryCondition::Neumann)?;
        let s = solve_generalized(&ops)?;
        let u = s.eigenvectors.as_ref().unwrap();
        let nd = ops.dimension;
        let mut ortho_worst: f64 = 0.0;
        let mut res_worst: f64 = 0.0;
        let knorm = ops.k.max_abs();
        for i in 0..nd {
            let ui = u.column(i);
            for j in i..nd {
                let muj = ops.m.mul_vec(&u.column(j));
                let want = if i == j { 1.0 } else { 0.0 };
                ortho_worst = ortho_worst.max((compensated_dot(&ui, &muj) - want).abs());
            }
            let ku = ops.k.mul_vec(&ui);
            let mu = ops.m.mul_vec(&ui);
            let mut r2 = 0.0;
            let mut n2 = 0.0;
            for t in 0..nd {
                r2 += (ku[t] - s.eigenvalues[i] * mu[t]).powi(2);
                n2 += ui[t] * ui[t];
            }
            res_worst = res_worst.max(r2.sqrt() / (knorm * n2.sqrt()));
        }
        b.require(ortho_worst <= 1e-8, format!("M-orthonormality, worst dev {ortho_worst:.2e}"));
        b.require(res_worst <= 1e-8, format!("eigenresiduals, worst {res_worst:.2e}"));

        // Blending linearity on a non-polynomial integrand.
        let g3 = gauss_legendre(3)?;
        let l3 = gauss_lobatto(3)?;
        let mut lin_worst: f64 = 0.0;
        for &tau in &[0.3, 2.0 / 3.0, -1.5] {
            let bl = blend(g3.clone(), l3.clone(), tau);
            let f = |x: f64| (1.3 * x).cos() + x.powi(4);
            let whole = bl.integrate(f, -1.0, 1.0);
            let parts = tau * g3.integrate(f, -1.0, 1.0) + (1.0 - tau) * l3.integrate(f, -1.0, 1.0);
            lin_worst = lin_worst.max((whole - parts).abs());
        }
        b.require(lin_worst <= 1e-13, format!("blending linearity, worst dev {lin_worst:.2e}"));

        // Constant-shift identity: assembling with gamma = c equals
        // shifting the gamma = 0 spectrum by c.
        let spec = BasisSpec::uniform_open(0.0, 1.0, 16, 2)?;
        let base = assemble_1d(&spec, |_| 0.0, &rules, BoundaryCondition::Dirichlet)?;
        let with_gamma = assemble_1d(&spec, |_| 5.0, &rules, BoundaryCondition::Dirichlet)?;
        let s0 = shift_spectrum(&solve_generalized(&base)?, 5.0);
        let s1 = solve_generalized(&with_gamma)?;
        let mut shift_worst: f64 = 0.0;
        for (a, c) in s0.eigenvalues.iter().zip(&s1.eigenvalues) {
            shift_worst = shift_worst.max((a - c).abs() / a.abs().max(1.0));
        }
        b.require(shift_worst <= 1e-10, format!("shift identity, worst dev {shift_worst:.2e}"));
        Ok(())
    })
}

/// All check ids in presentation order.
pub const CHECK_IDS: [&str; 9] = [
    "dispersion-coefficients",
    "tau-sweep-optima",
    "convergence-1d",
    "convergence-3d",
    "kronecker-oracle",
    "schrodinger-gauss-table",
    "schrodinger-blended-table",
    "spectrum-branch",
    "property-smoke",
];

pub fn run_check_by_id(id: &str) -> Option<CheckResult> {
    match id {
        "dispersion-coefficients" => Some(check_dispersion_coefficients()),
        "tau-sweep-optima" => Some(check_tau_sweep_optima()),
        "convergence-1d" => Some(check_convergence_1d()),
        "convergence-3d" => Some(check_convergence_3d()),
        "kronecker-oracle" => Some(check_kronecker_oracle()),
        "schrodinger-gauss-table" => Some(check_schrodinger_gauss_table()),
        "schrodinger-blended-table" => Some(check_schrodinger_blended_table()),
        "spectrum-branch" => Some(check_spectrum_branch()),
        "property-smoke" => Some(check_property_smoke()),
        _ => None,
    }
}

/// Runs every check in order. The heavyweight whole-spectrum comparison
/// runs last so quick failures surface early.
pub fn run_all_checks() -> Vec<CheckResult> {
    CHECK_IDS.iter().map(|id| run_check_by_id(id).unwrap()).collect()
}
