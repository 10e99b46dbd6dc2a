//! JSON experiment configuration plus command-line overrides. Every
//! field is optional; each subcommand fills in its own defaults, so a
//! minimal config (or none at all) runs the headline experiment of that
//! subcommand. Unknown fields and malformed values fail fast with the
//! offending line/field named.

use crate::errors::CliError;
use iga_spectral::analysis::ModelProblem;
use iga_spectral::quadrature::{
    blend_gauss_lobatto, blend_gauss_pair, blend_lobatto_gauss, gauss_legendre, gauss_lobatto,
    optimal_blend, QuadratureRule,
};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// laplace_dirichlet_1d | laplace_neumann_1d | laplace_dirichlet_3d
    /// | schrodinger_poschl_teller.
    pub problem: Option<String>,
    /// B-spline degree.
    pub p: Option<usize>,
    /// Element counts, one entry per mesh (per dimension in 3D).
    pub meshes: Option<Vec<usize>>,
    /// Total degree-of-freedom target; spectrum runs size the mesh from
    /// this instead of `meshes` when set.
    pub dof: Option<usize>,
    /// Quadrature selections: gauss | lobatto | optimal | blend[:tau]
    /// | gauss-pair[:tau].
    pub rules: Option<Vec<String>>,
    /// Blending parameter for rules written without an embedded value.
    pub tau: Option<f64>,
    /// dirichlet | neumann; overrides the problem's natural boundary
    /// condition where both are meaningful (the 1D Laplace problems).
    pub bc: Option<String>,
    /// Comparison mode indices (lowest nonzero mode = 1).
    pub modes: Option<Vec<usize>>,
    /// Output directory for CSV/JSON artifacts.
    pub out: Option<String>,
    /// dispersion: also sweep τ and report the zero crossing.
    pub sweep: Option<bool>,
    /// dispersion: error-expansion exponent (defaults to 2p).
    pub power: Option<u32>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::io(&format!("reading {}", path.display()), e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Resolves the model problem, honoring a `bc` override where the
    /// problem family supports both boundary conditions.
    pub fn resolve_problem(&self, default_name: &str) -> Result<ModelProblem, CliError> {
        let name = self.problem.as_deref().unwrap_or(default_name);
        let base = ModelProblem::from_name(name).map_err(|_| {
            CliError::config(format!(
                "unknown problem '{name}'; expected one of {}",
                ModelProblem::ALL.map(|p| p.name()).join(", ")
            ))
        })?;
        match self.bc.as_deref() {
            None => Ok(base),
            Some("dirichlet") => Ok(match base {
                ModelProblem::LaplaceNeumann1d => ModelProblem::LaplaceDirichlet1d,
                other => other,
            }),
            Some("neumann") => match base {
                ModelProblem::LaplaceDirichlet1d | ModelProblem::LaplaceNeumann1d => {
                    Ok(ModelProblem::LaplaceNeumann1d)
                }
                other => Err(CliError::config(format!(
                    "bc 'neumann' is not supported for problem '{}'",
                    other.name()
                ))),
            },
            Some(other) => {
                Err(CliError::config(format!("unknown bc '{other}'; expected dirichlet|neumann")))
            }
        }
    }

    pub fn degree(&self, default_p: usize) -> Result<usize, CliError> {
        let p = self.p.unwrap_or(default_p);
        if p < 1 {
            return Err(CliError::config("p must be >= 1"));
        }
        Ok(p)
    }

    pub fn mesh_list(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let meshes = self.meshes.clone().unwrap_or_else(|| default.to_vec());
        if meshes.is_empty() {
            return Err(CliError::config("meshes must not be empty"));
        }
        if meshes.contains(&0) {
            return Err(CliError::config("meshes entries must be >= 1"));
        }
        Ok(meshes)
    }

    pub fn mode_list(&self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        let modes = self.modes.clone().unwrap_or_else(|| default.to_vec());
        if modes.is_empty() {
            return Err(CliError::config("modes must not be empty"));
        }
        if modes.contains(&0) {
            return Err(CliError::config("modes are 1-based; 0 is not a valid mode"));
        }
        Ok(modes)
    }

    pub fn rule_list(&self, default: &[&str]) -> Vec<String> {
        self.rules.clone().unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect())
    }

    pub fn out_dir(&self) -> &str {
        self.out.as_deref().unwrap_or("out")
    }
}

/// One parsed quadrature selection. `blend` is the same-point-count
/// Lobatto/Gauss family (parameterized per degree the way each optimum
/// is conventionally quoted); `gauss-pair` blends G_{p+1} with G_p and
/// keeps every node strictly inside the element.
#[derive(Debug, Clone, PartialEq)]
pub enum RuleSpec {
    Gauss,
    Lobatto,
    Optimal,
    Blend(Option<f64>),
    GaussPair(Option<f64>),
}

impl RuleSpec {
    pub fn parse(s: &str) -> Result<RuleSpec, CliError> {
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h, Some(t)),
            None => (s, None),
        };
        let tau = match tail {
            None => None,
            Some(t) => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| CliError::config(format!("rule '{s}': '{t}' is not a number")))?;
                if !v.is_finite() {
                    return Err(CliError::config(format!("rule '{s}': tau must be finite")));
                }
                Some(v)
            }
        };
        match (head, tau) {
            ("gauss", None) => Ok(RuleSpec::Gauss),
            ("lobatto", None) => Ok(RuleSpec::Lobatto),
            ("optimal", None) => Ok(RuleSpec::Optimal),
            ("gauss" | "lobatto" | "optimal", Some(_)) => {
                Err(CliError::config(format!("rule '{head}' does not take a tau value")))
            }
            ("blend", t) => Ok(RuleSpec::Blend(t)),
            ("gauss-pair", t) => Ok(RuleSpec::GaussPair(t)),
            _ => Err(CliError::config(format!(
                "unknown rule '{s}'; expected gauss | lobatto | optimal | blend[:tau] | gauss-pair[:tau]"
            ))),
        }
    }

    /// Filesystem-safe tag used in output file names.
    pub fn slug(raw: &str) -> String {
        raw.replace(':', "_")
    }

    /// Builds the merged quadrature rule for degree `p`. `tau_fallback`
    /// supplies τ for blend rules written without an embedded value.
    pub fn resolve(&self, p: usize, tau_fallback: Option<f64>) -> Result<QuadratureRule, CliError> {
        let need_tau = |embedded: Option<f64>, what: &str| {
            embedded.or(tau_fallback).ok_or_else(|| {
                CliError::config(format!(
                    "rule '{what}' needs a tau: write {what}:<tau> or pass --tau"
                ))
            })
        };
        match self {
            RuleSpec::Gauss => Ok(gauss_legendre(p + 1).map_err(CliError::numerical)?),
            RuleSpec::Lobatto => Ok(gauss_lobatto(p + 1).map_err(CliError::numerical)?),
            RuleSpec::Optimal => Ok(optimal_blend(p)
                .map_err(|_| {
                    CliError::config(format!(
                        "no built-in optimal blend for p = {p}; supply blend:<tau> explicitly"
                    ))
                })?
                .merged()
                .clone()),
            RuleSpec::Blend(t) => {
                let tau = need_tau(*t, "blend")?;
                let blended = if p >= 3 {
                    blend_gauss_lobatto(p + 1, tau)
                } else {
                    blend_lobatto_gauss(p + 1, tau)
                }
                .map_err(CliError::numerical)?;
                Ok(blended.merged().clone())
            }
            RuleSpec::GaussPair(t) => {
                let tau = need_tau(*t, "gauss-pair")?;
                Ok(blend_gauss_pair(p, tau).map_err(CliError::numerical)?.merged().clone())
            }
        }
    }
}

/// True when the rule integrates using a node on an element endpoint
/// (reference coordinates ±1). Such rules sample the domain boundary,
/// where the trapping potential is singular.
pub fn has_endpoint_node(rule: &QuadratureRule) -> bool {
    rule.nodes().iter().any(|x| (x.abs() - 1.0).abs() < 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let cfg = ExperimentConfig {
            problem: Some("laplace_neumann_1d".into()),
            p: Some(2),
            meshes: Some(vec![16, 32, 64]),
            dof: Some(1000),
            rules: Some(vec!["gauss".into(), "blend:0.5".into()]),
            tau: Some(0.25),
            bc: Some("neumann".into()),
            modes: Some(vec![2, 4, 8]),
            out: Some("artifacts".into()),
            sweep: Some(true),
            power: Some(6),
        };
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);

        // Sparse configs round-trip too (missing fields stay None).
        let sparse: ExperimentConfig = serde_json::from_str(r#"{"p": 3}"#).unwrap();
        let text = serde_json::to_string(&sparse).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sparse);
        assert_eq!(sparse.p, Some(3));
        assert_eq!(sparse.problem, None);
    }

    #[test]
    fn unknown_fields_rejected() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"degree": 2}"#).unwrap_err();
        assert!(err.to_string().contains("degree"));
    }

    #[test]
    fn rule_specs_parse() {
        assert_eq!(RuleSpec::parse("gauss").unwrap(), RuleSpec::Gauss);
        assert_eq!(RuleSpec::parse("lobatto").unwrap(), RuleSpec::Lobatto);
        assert_eq!(RuleSpec::parse("optimal").unwrap(), RuleSpec::Optimal);
        assert_eq!(RuleSpec::parse("blend:0.5").unwrap(), RuleSpec::Blend(Some(0.5)));
        assert_eq!(RuleSpec::parse("gauss-pair").unwrap(), RuleSpec::GaussPair(None));
        assert!(RuleSpec::parse("gauss:1.0").is_err());
        assert!(RuleSpec::parse("blend:nan").is_err());
        assert!(RuleSpec::parse("simpson").is_err());
    }

    #[test]
    fn blend_resolution_orientation_tracks_degree() {
        // For p <= 2 the tau weights the Lobatto rule; tau = 1 must
        // reproduce pure Lobatto (endpoint nodes present).
        let r2 = RuleSpec::Blend(Some(1.0)).resolve(2, None).unwrap();
        assert!(has_endpoint_node(&r2));
        // For p >= 3 the tau weights the Gauss rule; tau = 1 must
        // reproduce pure Gauss (no endpoint nodes).
        let r3 = RuleSpec::Blend(Some(1.0)).resolve(3, None).unwrap();
        assert!(!has_endpoint_node(&r3));
        // Gauss-pair rules never touch the endpoints.
        let gp = RuleSpec::GaussPair(Some(2.0)).resolve(2, None).unwrap();
        assert!(!has_endpoint_node(&gp));
    }

    #[test]
    fn missing_tau_is_a_config_error() {
        let err = RuleSpec::Blend(None).resolve(2, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        // A --tau fallback fills it in.
        assert!(RuleSpec::Blend(None).resolve(2, Some(0.5)).is_ok());
    }

    #[test]
    fn bc_override_switches_1d_variant() {
        let mut cfg =
            ExperimentConfig { bc: Some("dirichlet".into()), ..ExperimentConfig::default() };
        let p = cfg.resolve_problem("laplace_neumann_1d").unwrap();
        assert_eq!(p, ModelProblem::LaplaceDirichlet1d);
        cfg.bc = Some("neumann".into());
        cfg.problem = Some("laplace_dirichlet_3d".into());
        assert_eq!(cfg.resolve_problem("laplace_neumann_1d").unwrap_err().exit_code(), 2);
    }
}
