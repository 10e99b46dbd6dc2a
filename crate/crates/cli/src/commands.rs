//! The five experiment subcommands and the check runner. Each command
//! resolves its configuration (config file fields overridden by flags,
//! with per-command defaults), runs the library, and writes CSV/JSON
//! artifacts into the output directory.

use crate::config::{has_endpoint_node, ExperimentConfig, RuleSpec};
use crate::errors::CliError;
use crate::output::{ensure_dir, finite, fmt_float, json_num, write_csv, write_json};
use iga_spectral::analysis::{
    convergence_study, default_dispersion_elements, default_tau_grid, dispersion_coefficient,
    exact_spectrum, fit_convergence, relative_errors, schrodinger_blended_table,
    schrodinger_gauss_table, solve_problem, tau_sweep_pair, BlendPair, ModelProblem,
    SchrodingerRow, SchrodingerTable, SCHRODINGER_TABLE_MODES,
};
use iga_spectral::assembly::{assemble_1d, BoundaryCondition, QuadratureTriple};
use iga_spectral::checks::{run_all_checks, run_check_by_id, CHECK_IDS};
use iga_spectral::eigen::solve_generalized;
use iga_spectral::quadrature::QuadratureRule;
use iga_spectral::splines::BasisSpec;
use serde_json::json;
use std::f64::consts::PI;
use std::path::Path;

/// The trapping potential diverges at the domain boundary, so any rule
/// with a node on an element endpoint produces singular boundary-element
/// integrals there. Refuse up front with a remediation hint.
fn guard_singularity(
    problem: ModelProblem,
    raw: &str,
    rule: &QuadratureRule,
) -> Result<(), CliError> {
    if problem == ModelProblem::SchrodingerPoschlTeller && has_endpoint_node(rule) {
        return Err(CliError::Numerical(format!(
            "rule '{raw}' places quadrature nodes on element endpoints, and the trapping \
             potential diverges at the domain boundary, making the boundary-element \
             integrals singular; use the all-interior Gauss pair instead (e.g. \
             'gauss-pair:2') or plain 'gauss'"
        )));
    }
    Ok(())
}

/// Whole-spectrum comparison: every discrete eigenvalue paired with its
/// exact partner, one CSV per rule. The Neumann file includes the
/// constant mode as mode_index 0 (its error column is absolute, since
/// the exact eigenvalue is 0 and no relative scale exists).
pub fn cmd_spectrum(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let problem = cfg.resolve_problem("laplace_neumann_1d")?;
    if problem.dims() != 1 {
        return Err(CliError::config(
            "spectrum handles the 1D problems; use grid3d for the 3D box",
        ));
    }
    let p = cfg.degree(2)?;
    // DOF target takes precedence over an explicit mesh; default is the
    // headline 1000-DOF run.
    let elements = if cfg.dof.is_some() || cfg.meshes.is_none() {
        let dof = cfg.dof.unwrap_or(1000);
        // Dirichlet removes the two boundary basis functions.
        let stripped = match problem.bc() {
            BoundaryCondition::Dirichlet => 2usize,
            BoundaryCondition::Neumann => 0usize,
        };
        (dof + stripped).checked_sub(p).filter(|&n| n >= 1).ok_or_else(|| {
            CliError::config(format!("dof = {dof} is too small for degree p = {p}"))
        })?
    } else {
        let meshes = cfg.mesh_list(&[])?;
        if meshes.len() != 1 {
            return Err(CliError::config(
                "spectrum takes exactly one mesh (a single --n), or a dof target",
            ));
        }
        meshes[0]
    };
    let rules = cfg.rule_list(&["gauss", "optimal"]);
    let out = Path::new(cfg.out_dir());
    ensure_dir(out)?;
    for raw in &rules {
        let rule = RuleSpec::parse(raw)?.resolve(p, cfg.tau)?;
        guard_singularity(problem, raw, &rule)?;
        let triple = QuadratureTriple::uniform(rule);
        let s = solve_problem(problem, elements, p, &triple).map_err(CliError::numerical)?;
        let total = s.len();
        let exact = exact_spectrum(problem, total).map_err(CliError::numerical)?;
        let offset = problem.zero_mode_offset();
        let file = format!("spectrum_{}.csv", RuleSpec::slug(raw));
        let mut rows = Vec::with_capacity(total);
        for (idx, (&lam, &lam_h)) in exact.iter().zip(&s.eigenvalues).enumerate() {
            // Physical wavenumber index: the Neumann constant mode is 0.
            let j = idx + 1 - offset;
            let err = if lam == 0.0 { lam_h - lam } else { (lam_h - lam) / lam };
            rows.push(vec![
                j.to_string(),
                fmt_float(finite(j as f64 / total as f64, &file, "j_over_N")?),
                fmt_float(finite(lam, &file, "lambda_exact")?),
                fmt_float(finite(lam_h, &file, "lambda_h")?),
                fmt_float(finite(err, &file, "relative_error")?),
            ]);
        }
        let path = write_csv(
            out,
            &file,
            &["mode_index", "j_over_N", "lambda_exact", "lambda_h", "relative_error"],
            &rows,
        )?;
        println!("wrote {} ({} rows)", path.display(), rows.len());
    }
    Ok(())
}

/// Mesh-refinement error sweeps with fitted convergence orders. With a
/// single mesh the errors are still emitted but the slope fit is omitted
/// with a warning (a one-point log-log fit is meaningless).
pub fn cmd_convergence(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let problem = cfg.resolve_problem("laplace_neumann_1d")?;
    let p = cfg.degree(2)?;
    let (def_modes, def_meshes): (&[usize], &[usize]) = if problem.dims() == 3 {
        (&[2, 10, 16], &[8, 16, 32, 64])
    } else {
        (&[2, 4, 8], &[16, 32, 64, 128])
    };
    let modes = cfg.mode_list(def_modes)?;
    let meshes = cfg.mesh_list(def_meshes)?;
    let rules = cfg.rule_list(&["gauss", "optimal"]);
    let out = Path::new(cfg.out_dir());
    ensure_dir(out)?;
    let (a, b) = problem.domain();
    let file = "convergence.csv";
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut slopes: Vec<serde_json::Value> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    for raw in &rules {
        let rule = RuleSpec::parse(raw)?.resolve(p, cfg.tau)?;
        guard_singularity(problem, raw, &rule)?;
        let triple = QuadratureTriple::uniform(rule);
        let slug = RuleSpec::slug(raw);
        if meshes.len() == 1 {
            let n = meshes[0];
            let s = solve_problem(problem, n, p, &triple).map_err(CliError::numerical)?;
            let errs = relative_errors(&s, problem, &modes).map_err(CliError::numerical)?;
            let h = (b - a) / n as f64;
            for (mode, e) in modes.iter().zip(&errs) {
                rows.push(vec![
                    fmt_float(finite(h, file, "h")?),
                    mode.to_string(),
                    slug.clone(),
                    fmt_float(finite(*e, file, "relative_error")?),
                ]);
            }
            warnings
                .push(format!("rule {slug}: single mesh; slope fit omitted (need >= 2 meshes)"));
        } else {
            let studies = convergence_study(problem, p, &triple, &modes, &meshes)
                .map_err(CliError::numerical)?;
            for st in &studies {
                for &(n, e) in &st.signed_errors {
                    let h = (b - a) / n as f64;
                    rows.push(vec![
                        fmt_float(finite(h, file, "h")?),
                        st.mode.to_string(),
                        slug.clone(),
                        fmt_float(finite(e, file, "relative_error")?),
                    ]);
                }
                let pairwise = st
                    .report
                    .pairwise_slopes
                    .iter()
                    .map(|&s| json_num(s, "pairwise slope"))
                    .collect::<Result<Vec<_>, _>>()?;
                slopes.push(json!({
                    "rule": slug,
                    "mode": st.mode,
                    "rho": json_num(st.report.fitted_slope, "rho")?,
                    "pairwise": pairwise,
                    "leading_coefficient":
                        json_num(st.report.leading_coefficient, "leading_coefficient")?,
                    "warnings": st.report.warnings,
                }));
            }
        }
    }
    let csv_path = write_csv(out, file, &["h", "mode", "rule", "relative_error"], &rows)?;
    let json_path = write_json(
        out,
        "convergence_slopes.json",
        &json!({ "slopes": slopes, "warnings": warnings }),
    )?;
    println!("wrote {} ({} rows)", csv_path.display(), rows.len());
    println!("wrote {}", json_path.display());
    Ok(())
}

/// Table builder for an explicitly chosen rule (the library provides
/// ready-made Gauss and swept-Gauss-pair tables).
fn schrodinger_table_custom(
    p: usize,
    meshes: &[usize],
    rule: QuadratureRule,
) -> Result<SchrodingerTable, CliError> {
    let problem = ModelProblem::SchrodingerPoschlTeller;
    let (a, b) = problem.domain();
    let triple = QuadratureTriple::uniform(rule);
    let mut rows = Vec::with_capacity(meshes.len());
    for &n in meshes {
        let s = solve_problem(problem, n, p, &triple).map_err(CliError::numerical)?;
        rows.push(SchrodingerRow {
            elements: n,
            errors: relative_errors(&s, problem, &SCHRODINGER_TABLE_MODES)
                .map_err(CliError::numerical)?,
        });
    }
    let mut fitted_rho = Vec::with_capacity(SCHRODINGER_TABLE_MODES.len());
    for mi in 0..SCHRODINGER_TABLE_MODES.len() {
        let pts: Vec<(f64, f64)> =
            rows.iter().map(|r| ((b - a) / r.elements as f64, r.errors[mi])).collect();
        fitted_rho.push(fit_convergence(&pts).map_err(CliError::numerical)?.fitted_slope);
    }
    Ok(SchrodingerTable { degree: p, rows, fitted_rho, tau: None })
}

/// Trapping-potential benchmark: relative eigenvalue errors for bound
/// states {1, 2, 4} over the tabulated mesh sequence, with fitted
/// convergence orders appended as rows whose N column reads "rho".
/// The N column is the DOF count (twice the element count).
pub fn cmd_schrodinger(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if let Some(name) = cfg.problem.as_deref() {
        if name != ModelProblem::SchrodingerPoschlTeller.name() {
            return Err(CliError::config(format!(
                "the schrodinger command runs problem '{}' only",
                ModelProblem::SchrodingerPoschlTeller.name()
            )));
        }
    }
    if let Some(bc) = cfg.bc.as_deref() {
        if bc != "dirichlet" {
            return Err(CliError::config("the trapping-potential benchmark is Dirichlet-only"));
        }
    }
    let problem = ModelProblem::SchrodingerPoschlTeller;
    let p_list = match cfg.p {
        None => vec![1usize, 2],
        Some(p @ (1 | 2)) => vec![p],
        Some(p) => {
            return Err(CliError::config(format!(
                "the benchmark tabulates p in {{1, 2}}; got p = {p}"
            )))
        }
    };
    let rules = cfg.rule_list(&["gauss", "gauss-pair"]);
    let out = Path::new(cfg.out_dir());
    ensure_dir(out)?;
    let file = "schrodinger.csv";
    let mut rows: Vec<Vec<String>> = Vec::new();
    for &p in &p_list {
        // Benchmark mesh sequences: tabulated DOF counts 40/80/160 (p=1)
        // and 10/20/40 (p=2) at two DOF per element.
        let default_elems: &[usize] = if p == 1 { &[20, 40, 80] } else { &[5, 10, 20] };
        let meshes = cfg.mesh_list(default_elems)?;
        if meshes.len() < 2 {
            return Err(CliError::config(
                "schrodinger needs at least 2 meshes to fit the convergence order rho",
            ));
        }
        for raw in &rules {
            let slug = RuleSpec::slug(raw);
            let spec = RuleSpec::parse(raw)?;
            let table = match spec {
                RuleSpec::Gauss => {
                    schrodinger_gauss_table(p, &meshes).map_err(CliError::numerical)?
                }
                // Bare gauss-pair with no tau anywhere: recover tau from
                // the constant-coefficient sweep.
                RuleSpec::GaussPair(None) if cfg.tau.is_none() => {
                    schrodinger_blended_table(p, &meshes).map_err(CliError::numerical)?
                }
                other => {
                    let rule = other.resolve(p, cfg.tau)?;
                    guard_singularity(problem, raw, &rule)?;
                    schrodinger_table_custom(p, &meshes, rule)?
                }
            };
            if let Some(tau) = table.tau {
                println!("p={p} rule {slug}: swept tau* = {tau:.6}");
            }
            for row in &table.rows {
                for (mi, &mode) in SCHRODINGER_TABLE_MODES.iter().enumerate() {
                    rows.push(vec![
                        p.to_string(),
                        (2 * row.elements).to_string(),
                        slug.clone(),
                        mode.to_string(),
                        fmt_float(finite(row.errors[mi], file, "relative_error")?),
                    ]);
                }
            }
            for (mi, &mode) in SCHRODINGER_TABLE_MODES.iter().enumerate() {
                rows.push(vec![
                    p.to_string(),
                    "rho".to_string(),
                    slug.clone(),
                    mode.to_string(),
                    fmt_float(finite(table.fitted_rho[mi], file, "rho")?),
                ]);
            }
        }
    }
    let path = write_csv(out, file, &["p", "N", "rule", "mode", "relative_error"], &rows)?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

/// Leading eigenvalue-error coefficient per rule, via Richardson
/// extrapolation over the (n, 2n) mesh pair, with an optional tau sweep
/// locating the blend that cancels the leading term.
pub fn cmd_dispersion(cfg: &ExperimentConfig) -> Result<(), CliError> {
    let problem = cfg.resolve_problem("laplace_neumann_1d")?;
    if problem.dims() != 1 {
        return Err(CliError::config("dispersion estimation runs on the 1D problems"));
    }
    let p = cfg.degree(2)?;
    let power = cfg.power.unwrap_or(2 * p as u32);
    let meshes = cfg.mesh_list(&[default_dispersion_elements(p)])?;
    if meshes.len() != 1 {
        return Err(CliError::config(
            "dispersion takes a single base mesh; the extrapolation pair is (n, 2n)",
        ));
    }
    let base = meshes[0];
    let rules = cfg.rule_list(&["gauss", "optimal"]);
    let out = Path::new(cfg.out_dir());
    ensure_dir(out)?;
    let mut estimates: Vec<serde_json::Value> = Vec::new();
    for raw in &rules {
        let rule = RuleSpec::parse(raw)?.resolve(p, cfg.tau)?;
        guard_singularity(problem, raw, &rule)?;
        let triple = QuadratureTriple::uniform(rule);
        let est = dispersion_coefficient(problem, p, &triple, power, base)
            .map_err(CliError::numerical)?;
        let samples = est
            .samples
            .iter()
            .map(|&(n, c)| -> Result<serde_json::Value, CliError> {
                Ok(json!({ "elements": n, "scaled_error": json_num(c, "scaled_error")? }))
            })
            .collect::<Result<Vec<_>, _>>()?;
        estimates.push(json!({
            "rule": RuleSpec::slug(raw),
            "exponent": est.exponent,
            "coefficient": json_num(est.coefficient, "coefficient")?,
            "converged": est.converged,
            "samples": samples,
        }));
    }
    let mut doc = json!({
        "problem": problem.name(),
        "p": p,
        "power": power,
        "base_elements": base,
        "estimates": estimates,
    });
    if cfg.sweep.unwrap_or(false) {
        let grid = default_tau_grid(p, BlendPair::LobattoGauss);
        let rep = tau_sweep_pair(p, BlendPair::LobattoGauss, &grid).map_err(CliError::numerical)?;
        let samples = rep
            .samples
            .iter()
            .map(|&(t, c)| -> Result<serde_json::Value, CliError> {
                Ok(json!([json_num(t, "tau")?, json_num(c, "coefficient")?]))
            })
            .collect::<Result<Vec<_>, _>>()?;
        doc["tau_sweep"] = json!({
            "pair": "lobatto_gauss",
            "degree": rep.degree,
            "tau_star": json_num(rep.tau_star, "tau_star")?,
            "samples": samples,
        });
    }
    let path = write_json(out, "dispersion.json", &doc)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// 3D eigenvalue error grid on the unit box: the separable discrete
/// spectrum λ_h(k,l,m) = μ_k + μ_l + μ_m from the 1D Dirichlet factors,
/// against (k² + l² + m²)π². One CSV per rule, suitable for external
/// isosurface plotting.
pub fn cmd_grid3d(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if let Some(name) = cfg.problem.as_deref() {
        if name != ModelProblem::LaplaceDirichlet3d.name() {
            return Err(CliError::config(format!(
                "the grid3d command runs problem '{}' only",
                ModelProblem::LaplaceDirichlet3d.name()
            )));
        }
    }
    if let Some(bc) = cfg.bc.as_deref() {
        if bc != "dirichlet" {
            return Err(CliError::config("the 3D box problem is Dirichlet-only"));
        }
    }
    let p = cfg.degree(2)?;
    let meshes = cfg.mesh_list(&[8])?;
    if meshes.len() != 1 {
        return Err(CliError::config("grid3d takes a single mesh (elements per dimension)"));
    }
    let n = meshes[0];
    let rules = cfg.rule_list(&["gauss", "optimal"]);
    let out = Path::new(cfg.out_dir());
    ensure_dir(out)?;
    for raw in &rules {
        let rule = RuleSpec::parse(raw)?.resolve(p, cfg.tau)?;
        let triple = QuadratureTriple::uniform(rule);
        let spec = BasisSpec::uniform_open(0.0, 1.0, n, p).map_err(CliError::numerical)?;
        let ops = assemble_1d(&spec, |_| 0.0, &triple, BoundaryCondition::Dirichlet)
            .map_err(CliError::numerical)?;
        let s = solve_generalized(&ops).map_err(CliError::numerical)?;
        let mu = &s.eigenvalues;
        let kmax = mu.len();
        let file = format!("grid3d_{}.csv", RuleSpec::slug(raw));
        let mut rows = Vec::with_capacity(kmax * kmax * kmax);
        for k in 1..=kmax {
            for l in 1..=kmax {
                for m in 1..=kmax {
                    let lam = ((k * k + l * l + m * m) as f64) * PI * PI;
                    let lam_h = mu[k - 1] + mu[l - 1] + mu[m - 1];
                    let err = (lam_h - lam) / lam;
                    rows.push(vec![
                        k.to_string(),
                        l.to_string(),
                        m.to_string(),
                        fmt_float(finite(lam, &file, "lambda_exact")?),
                        fmt_float(finite(lam_h, &file, "lambda_h")?),
                        fmt_float(finite(err, &file, "relative_error")?),
                    ]);
                }
            }
        }
        let path = write_csv(
            out,
            &file,
            &["k", "l", "m", "lambda_exact", "lambda_h", "relative_error"],
            &rows,
        )?;
        println!("wrote {} ({} rows)", path.display(), rows.len());
    }
    Ok(())
}

/// Runs the built-in result checks (all of them, or the ids in `only`),
/// printing one PASS/FAIL line per check plus its evidence, and returns
/// an error carrying exit code 4 when any check fails.
pub fn run_checks(only: &[String]) -> Result<(), CliError> {
    let results = if only.is_empty() {
        run_all_checks()
    } else {
        let mut rs = Vec::with_capacity(only.len());
        for id in only {
            rs.push(run_check_by_id(id).ok_or_else(|| {
                CliError::config(format!(
                    "unknown check id '{id}'; known ids: {}",
                    CHECK_IDS.join(", ")
                ))
            })?);
        }
        rs
    };
    let mut failed = 0usize;
    for r in &results {
        println!("{} {} ({:.2}s)", if r.passed { "PASS" } else { "FAIL" }, r.id, r.seconds);
        println!("  {}", r.details);
        if !r.passed {
            failed += 1;
        }
    }
    println!("{}/{} checks passed", results.len() - failed, results.len());
    if failed > 0 {
        Err(CliError::ChecksFailed(failed))
    } else {
        Ok(())
    }
}
