use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use super::scenario::{Kind, Scenario};
use crate::collar_formula::{
    verify_ball_boundary_degree, verify_boundary_neighborhood, verify_exit_everywhere,
    verify_homotopic_to_inclusion, verify_morse_formula, verify_no_exit, verify_theorem, Outcome,
};
use crate::error::{Error, Result};
use crate::fpindex::axioms::run_axiom_suite;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub name: String,
    pub kind: Kind,
    pub outcome: Outcome,
    /// One line for the text report.
    pub summary: String,
    /// The full verification report, or `null` when none was produced.
    pub details: Value,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Totals {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenarios: Vec<ScenarioResult>,
    pub totals: Totals,
}

impl RunReport {
    pub fn new(scenarios: Vec<ScenarioResult>) -> Self {
        let mut totals = Totals::default();
        for s in &scenarios {
            match s.outcome {
                Outcome::Pass => totals.pass += 1,
                Outcome::Fail => totals.fail += 1,
                Outcome::Inconclusive => totals.inconclusive += 1,
            }
        }
        RunReport { scenarios, totals }
    }

    pub fn to_text(&self, elapsed: Option<Duration>) -> String {
        let mut out = String::new();
        for s in &self.scenarios {
            out.push_str(&format!(
                "{:12} {:32} {:24} {}\n",
                s.outcome.label(),
                s.name,
                s.kind.name(),
                s.summary
            ));
        }
        let t = &self.totals;
        out.push_str(&format!(
            "{} scenarios: {} passed, {} failed, {} inconclusive",
            self.scenarios.len(),
            t.pass,
            t.fail,
            t.inconclusive
        ));
        if let Some(e) = elapsed {
            out.push_str(&format!(" in {:.2}s", e.as_secs_f64()));
        }
        out.push('\n');
        out
    }

    /// Pretty JSON; identical across runs of the same file.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }
}

fn details<T: Serialize>(r: &T) -> Value {
    serde_json::to_value(r).unwrap_or(Value::Null)
}

fn evaluate(s: &Scenario) -> Result<(Outcome, String, Value)> {
    let cfg = s.config();
    if s.kind == Kind::AxiomSuite {
        let r = run_axiom_suite(s.seed.unwrap_or(0), &cfg.index)?;
        let cases: usize = r.tallies.iter().map(|t| t.cases()).sum();
        let certified: usize = r.tallies.iter().map(|t| t.certified).sum();
        let violations = r.violations();
        let outcome = if violations > 0 {
            Outcome::Fail
        } else if certified == 0 {
            Outcome::Inconclusive
        } else {
            Outcome::Pass
        };
        let summary = format!("{certified}/{cases} cases certified, {violations} violations");
        return Ok((outcome, summary, details(&r)));
    }
    let (d, f) = s.parsed_map()?;
    Ok(match s.kind {
        Kind::Theorem => {
            let mut r = verify_theorem(&f, &d, &cfg)?;
            if let Some(p) = s.lefschetz_patch {
                r.l_rf += p;
                r.residual = r.i_f + r.i_boundary - r.l_rf;
            }
            let v = r.violations();
            let mut summary = format!(
                "I(f)={} I(rf|exit)={} L(rf)={}",
                r.i_f, r.i_boundary, r.l_rf
            );
            if !v.is_empty() {
                summary.push_str(&format!(": {}", v.join("; ")));
            }
            let outcome = Outcome::from_holds(v.is_empty());
            let mut value = details(&r);
            if let Value::Object(m) = &mut value {
                m.insert("violations".into(), json!(v));
            }
            (outcome, summary, value)
        }
        Kind::ExitEverywhere => {
            let r = verify_exit_everywhere(&f, &d, &cfg)?;
            let summary = format!(
                "I(f)={} L(rf)={} L(rf|boundary)={}",
                r.i_f, r.l_rf, r.l_boundary.value
            );
            (r.outcome, summary, details(&r))
        }
        Kind::NoExit => {
            let r = verify_no_exit(&f, &d, &cfg)?;
            (
                r.outcome,
                format!("I(f)={} L(rf)={}", r.i_f, r.l_rf),
                details(&r),
            )
        }
        Kind::HomotopicToInclusion => {
            let r = verify_homotopic_to_inclusion(&f, &d, &cfg)?;
            let summary = format!(
                "I(f)={} I(rf|exit)={} chi={} gap={:.3e}",
                r.i_f, r.i_boundary, r.euler_characteristic, r.homotopy_gap
            );
            (r.outcome, summary, details(&r))
        }
        Kind::BallBoundaryDegree => {
            let r = verify_ball_boundary_degree(&f, &d, &cfg)?;
            let summary = match (r.sphere_degree, r.predicted) {
                (Some(k), Some(p)) => format!("I(f)={} deg={k} predicted={p}", r.i_f),
                _ => format!(
                    "boundary maps inside, {} fixed points located",
                    r.fixed_points_found
                ),
            };
            (r.outcome, summary, details(&r))
        }
        Kind::BoundaryNeighborhood => {
            let r = verify_boundary_neighborhood(&f, &d, &cfg)?;
            let summary = format!(
                "thin index={} boundary index={} depth={:.3}",
                r.thin_index, r.boundary_index, r.depth
            );
            (r.outcome, summary, details(&r))
        }
        Kind::Morse => {
            let r = verify_morse_formula(&f, &d, &cfg)?;
            let summary = format!(
                "Ind(V)={} Ind(inward tangential)={} chi={}",
                r.ind_v, r.ind_boundary, r.euler_characteristic
            );
            (r.outcome, summary, details(&r))
        }
        Kind::AxiomSuite => unreachable!(),
    })
}

pub(super) fn run_one(s: &Scenario) -> ScenarioResult {
    let (outcome, summary, details) = match evaluate(s) {
        Ok(r) => r,
        // two certified computations disagree
        Err(e @ Error::Internal(_)) => (Outcome::Fail, e.to_string(), Value::Null),
        Err(e) => (Outcome::Inconclusive, e.to_string(), Value::Null),
    };
    ScenarioResult {
        name: s.name.clone(),
        kind: s.kind,
        outcome,
        summary,
        details,
    }
}
