//! Randomized property suites of the scheme at a fixed seed.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{typed, Outcome};
use crate::report::{Check, Table};
use pucci_lab::grid::checks::{comparison_trials, duality_trials, homogeneity_trials, monotonicity_trials};
use pucci_lab::grid::{
    build_domain, comparison_check, small_domain_check, BoundaryData, PropertyOutcome, SchemeKind, Shape,
    SmallDomainOptions,
};
use pucci_lab::radial::SourceSpec;
use pucci_lab::PucciParams;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropertiesConfig {
    pub seed: u64,
    pub trials: usize,
    /// Trials of the comparison suite; each solves two Dirichlet problems.
    pub comparison_trials: usize,
    /// Zeroth-order coefficient of the small-domain problem.
    pub small_domain_l: f64,
    pub small_domain: SmallDomainOptions,
    /// Replace the monotone stencil by the central Hessian in the main suite.
    pub inject_nonmonotone: bool,
}

impl Default for PropertiesConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            trials: 200,
            comparison_trials: 200,
            small_domain_l: 10.0,
            small_domain: SmallDomainOptions::default(),
            inject_nonmonotone: false,
        }
    }
}

fn failures_check(o: &PropertyOutcome) -> Check {
    Check::new(format!("{} failures", o.name), o.failures as f64, "<=", 0.0)
}

pub fn run(raw: &Value) -> Result<(Value, Outcome)> {
    let (cfg, effective): (PropertiesConfig, Value) = typed(raw)?;
    if cfg.trials == 0 {
        bail!("trials must be positive");
    }
    if !(cfg.small_domain_l >= 0.0) {
        bail!("small_domain_l must be nonnegative");
    }
    let mut out = Outcome::default();
    let kind = if cfg.inject_nonmonotone {
        SchemeKind::CentralHessian
    } else {
        SchemeKind::WideStencil
    };

    let suites = vec![
        monotonicity_trials(cfg.seed, cfg.trials, kind)?,
        duality_trials(cfg.seed, cfg.trials)?,
        homogeneity_trials(cfg.seed, cfg.trials)?,
        comparison_trials(cfg.seed, cfg.comparison_trials)?,
    ];
    for s in &suites {
        out.checks.push(failures_check(s));
    }
    // The central Hessian is not monotone; the suite has to notice.
    let control = monotonicity_trials(cfg.seed, cfg.trials, SchemeKind::CentralHessian)?;
    out.checks
        .push(Check::new("negative control failures detected", control.failures as f64, ">", 0.0));

    // One fixed instance of each comparison hypothesis.
    let dom = build_domain(&Shape::Disk { radius: 1.0 }, 0.05)?;
    let plus = PucciParams::new(1.0, 1.5, pucci_lab::Variant::Plus, 0.0)?;
    let cases = [
        ("nonincreasing", SourceSpec::Affine { k: 1.0, slope: 2.0 }),
        ("power split", SourceSpec::PowerPair { lambda: 0.5, mu: 1.0, beta: 3.0 }),
    ];
    let mut fixed = Vec::new();
    for (name, spec) in cases {
        let r = comparison_check(
            &plus,
            &spec,
            &dom,
            &BoundaryData::zero(),
            &BoundaryData::Constant { value: 0.1 },
        )?;
        out.checks
            .push(Check::new(format!("comparison {name} source"), r.max_gap, "<=", r.tolerance));
        fixed.push(json!({"case": name, "source": spec, "report": r}));
    }

    let small = small_domain_check(&plus, cfg.small_domain_l, &cfg.small_domain)?;
    out.checks
        .push(Check::flag("small-domain threshold exists", small.threshold_side.is_some()));
    let mut levels = Table::new("small_domain.csv", &["side", "area", "max_w", "pass"]);
    for lv in &small.levels {
        levels.push_numbers(&[lv.side, lv.area, lv.max_w, if lv.pass { 1.0 } else { 0.0 }]);
    }

    let mut summary = Table::new("properties.csv", &["suite", "trials", "failures", "worst", "pass"]);
    for s in suites.iter().chain(std::iter::once(&control)) {
        summary.push(vec![
            s.name.clone(),
            s.trials.to_string(),
            s.failures.to_string(),
            s.worst.to_string(),
            s.pass.to_string(),
        ]);
    }
    out.results = json!({
        "suites": suites,
        "negative_control": control,
        "comparison_cases": fixed,
        "small_domain": small,
    });
    out.tables.push(summary);
    out.tables.push(levels);
    Ok((effective, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Value {
        json!({"trials": 200, "comparison_trials": 5, "small_domain": {"initial_side": 4.0, "levels": 5,
            "cells_per_side": 16, "rho": 1.0, "boundary_value": 0.0}})
    }

    #[test]
    fn green_at_small_size() {
        let (_, out) = run(&small()).unwrap();
        assert!(out.checks.iter().all(|c| c.pass), "{:?}", out.checks);
    }

    #[test]
    fn injected_stencil_fails() {
        let mut cfg = small();
        cfg["inject_nonmonotone"] = json!(true);
        let (_, out) = run(&cfg).unwrap();
        assert!(!out.checks[0].pass);
    }
}
