use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::collar_formula::CollarConfig;
use crate::domains::{Domain, Shape};
use crate::error::{Error, Result};
use crate::mapexpr::MapExpr;

/// What a scenario verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    /// `I(f) + I(rf|∂₋M) = L(rf)` with all cross-checks.
    Theorem,
    /// `I(f) = L(rf) - L(rf|∂M)` when `f` pushes all of `∂M` out.
    ExitEverywhere,
    /// `I(f) = L(rf)` when `f` maps `∂M` into `M`.
    NoExit,
    /// `I(f) + I(rf|∂₋M) = χ(M)` for `rf` homotopic to the identity.
    HomotopicToInclusion,
    /// `I(f) = (-1)^n deg(rf|S^(n-1))` on balls, or a located fixed point.
    BallBoundaryDegree,
    /// Thin-neighbourhood index of `rf` against the boundary index.
    BoundaryNeighborhood,
    /// `Ind(V) + Ind(∂₋V) = χ(M)` for a planar vector field.
    Morse,
    /// The index axioms on random instances.
    AxiomSuite,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Theorem => "theorem",
            Kind::ExitEverywhere => "exit_everywhere",
            Kind::NoExit => "no_exit",
            Kind::HomotopicToInclusion => "homotopic_to_inclusion",
            Kind::BallBoundaryDegree => "ball_boundary_degree",
            Kind::BoundaryNeighborhood => "boundary_neighborhood",
            Kind::Morse => "morse",
            Kind::AxiomSuite => "axiom_suite",
        }
    }
}

/// Optional overrides of the numeric budgets; all must be positive.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Initial PL grid resolution per axis.
    pub grid_resolution: Option<usize>,
    /// Subdivision depth when certifying that no fixed point was missed.
    pub refinement_depth: Option<u32>,
    /// Frontier margin relative to the region diameter.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub kind: Kind,
    #[serde(default)]
    pub description: String,
    /// Required for every kind except `axiom_suite`.
    #[serde(default)]
    pub domain: Option<Domain>,
    /// The map `f`, or the vector field for `morse`, in the expression
    /// grammar with one component per coordinate separated by `;`.
    #[serde(default)]
    pub map: Option<String>,
    #[serde(default)]
    pub budgets: Budgets,
    /// Marks a negative-path fixture; only fixtures may patch results.
    #[serde(default)]
    pub fixture: bool,
    /// Added to `L(rf)` before the identity is checked (fixtures only).
    #[serde(default)]
    pub lefschetz_patch: Option<i64>,
    /// Seed of the random instances for `axiom_suite`.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenarios: Vec<Scenario>,
}

impl Scenario {
    pub fn config(&self) -> CollarConfig {
        let mut cfg = CollarConfig::default();
        if let Some(n) = self.budgets.grid_resolution {
            cfg.index.degree.initial_resolution = Some(n);
        }
        if let Some(d) = self.budgets.refinement_depth {
            cfg.index.complement_depth = d;
        }
        if let Some(m) = self.budgets.margin {
            cfg.index.relative_margin = m;
        }
        cfg
    }

    /// The parsed map, checked against the domain dimension.
    pub fn parsed_map(&self) -> Result<(Domain, MapExpr)> {
        let d = self
            .domain
            .clone()
            .ok_or_else(|| Error::Invalid(format!("scenario {} needs a domain", self.name)))?;
        let src = self
            .map
            .as_deref()
            .ok_or_else(|| Error::Invalid(format!("scenario {} needs a map", self.name)))?;
        let f = MapExpr::parse_for_dim(src, d.dim())?;
        if f.output_dim() != d.dim() {
            return Err(Error::Invalid(format!(
                "scenario {}: map has {} components for a domain in R^{}",
                self.name,
                f.output_dim(),
                d.dim()
            )));
        }
        Ok((d, f))
    }

    fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Invalid("scenario with an empty name".into()));
        }
        let b = &self.budgets;
        if b.grid_resolution == Some(0) || b.refinement_depth == Some(0) {
            return Err(Error::Invalid(format!(
                "scenario {}: budgets must be positive",
                self.name
            )));
        }
        if let Some(m) = b.margin {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::Invalid(format!(
                    "scenario {}: margin must be positive",
                    self.name
                )));
            }
        }
        if self.lefschetz_patch.is_some() && !(self.fixture && self.kind == Kind::Theorem) {
            return Err(Error::Invalid(format!(
                "scenario {}: lefschetz_patch is only allowed on theorem fixtures",
                self.name
            )));
        }
        match self.kind {
            Kind::AxiomSuite => {
                if self.domain.is_some() || self.map.is_some() {
                    return Err(Error::Invalid(format!(
                        "scenario {}: the axiom suite takes no domain or map",
                        self.name
                    )));
                }
            }
            _ => {
                if self.seed.is_some() {
                    return Err(Error::Invalid(format!(
                        "scenario {}: only the axiom suite takes a seed",
                        self.name
                    )));
                }
                let (d, _) = self.parsed_map()?;
                if self.kind == Kind::BallBoundaryDegree && !matches!(d.shape(), Shape::Ball { .. })
                {
                    return Err(Error::Invalid(format!(
                        "scenario {}: needs a ball domain",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a scenario file; names must be unique.
pub fn parse_scenarios(src: &str) -> Result<Vec<Scenario>> {
    let file: ScenarioFile =
        serde_json::from_str(src).map_err(|e| Error::Invalid(format!("scenario file: {e}")))?;
    let mut names = BTreeSet::new();
    for s in &file.scenarios {
        s.validate()?;
        if !names.insert(s.name.as_str()) {
            return Err(Error::Invalid(format!(
                "duplicate scenario name {}",
                s.name
            )));
        }
    }
    Ok(file.scenarios)
}

pub fn load_scenarios(path: &Path) -> Result<Vec<Scenario>> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))?;
    parse_scenarios(&src)
}
