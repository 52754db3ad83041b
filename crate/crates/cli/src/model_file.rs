//! TOML model files.
//!
//! ```toml
//! [model]
//! variables = ["x1", "x2", "p"]
//! gauge_weights = [[1, 1, -2]]
//! r_weights = [0, 0, 1]
//! r_degree = 1
//! superpotential = "p*(x1^2 + x2^2)"
//! theta = [-1]              # integers or "a/b" strings
//! epsilon = "infinity"      # or "0+"
//!
//! [graph]                   # only for the qmap commands
//! spin = 2
//! vertices = [{ genus = 1, marks = ["x1"] }]
//! edges = []
//! ```

use std::path::Path;

use glsm_lab::analyzer::{Epsilon, ModelInput};
use glsm_lab::poly::Polynomial;
use glsm_lab::qmap::{DualGraph, QmapNumericalData, Vertex, VertexData};
use glsm_lab::rational::{fmt_rat, parse_rat, to_i64};
use glsm_lab::{IntMatrix, Rat, RatVector};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A rational written as an integer or an `"a/b"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatLit {
    Int(i64),
    Text(String),
}

impl RatLit {
    pub fn value(&self) -> Result<Rat, String> {
        match self {
            RatLit::Int(n) => Ok(Rat::from_integer((*n).into())),
            RatLit::Text(s) => parse_rat(s).map_err(|e| format!("{s:?}: {}", e.message)),
        }
    }

    pub fn from_rat(x: &Rat) -> Self {
        match to_i64(x) {
            Some(n) if x.is_integer() => RatLit::Int(n),
            _ => RatLit::Text(fmt_rat(x)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub variables: Vec<String>,
    pub gauge_weights: Vec<Vec<i64>>,
    pub r_weights: Vec<i64>,
    pub r_degree: i64,
    pub superpotential: String,
    pub theta: Vec<RatLit>,
    pub epsilon: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift_r_level: Option<RatLit>,
    #[serde(default)]
    pub transversality: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_fields: Option<Vec<String>>,
    /// Weights of an auxiliary `C*` for `fixed-loci`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra_action: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexDataLit {
    pub deg_a: RatLit,
    #[serde(default)]
    pub base_d: u32,
    pub lift_deg: RatLit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSection {
    /// `b` in `A^b = omega_log(-D)`; enables the degree relation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<i64>,
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<Vec<VertexDataLit>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub model: ModelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSection>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    (line, col)
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            match e.span() {
                Some(span) => {
                    let (line, col) = line_col(text, span.start);
                    CliError::Parse(format!("line {line}, column {col}: {msg}"))
                }
                None => CliError::Parse(msg),
            }
        })
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Parse(format!("{}: not valid UTF-8", path.display())))?;
        Ok((Self::parse(&text)?, bytes))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("model file serializes")
    }

    pub fn to_model(&self) -> Result<ModelInput, CliError> {
        let s = &self.model;
        let sem = CliError::Semantic;
        let variables = s.variables.clone();
        let mut seen = std::collections::BTreeSet::new();
        for v in &variables {
            if !seen.insert(v) {
                return Err(sem(format!("variable {v} is declared twice")));
            }
        }
        let gauge = IntMatrix::new(s.gauge_weights.clone()).map_err(|e| sem(format!("gauge_weights: {e}")))?;
        let superpotential = Polynomial::parse(&s.superpotential, &variables)
            .map_err(|e| sem(format!("superpotential, column {}: {}", e.offset + 1, e.message)))?;
        let theta = RatVector(
            s.theta.iter().map(RatLit::value).collect::<Result<_, _>>().map_err(|e| sem(format!("theta: {e}")))?,
        );
        let epsilon: Epsilon = s.epsilon.parse().map_err(|e| sem(format!("epsilon: {e}")))?;
        let lift_r_level = s
            .lift_r_level
            .as_ref()
            .map(RatLit::value)
            .transpose()
            .map_err(|e| sem(format!("lift_r_level: {e}")))?;
        let p_fields = s
            .p_fields
            .as_ref()
            .map(|names| {
                names
                    .iter()
                    .map(|n| {
                        variables.iter().position(|v| v == n).ok_or_else(|| sem(format!("p_fields: unknown variable {n}")))
                    })
                    .collect::<Result<Vec<usize>, _>>()
            })
            .transpose()?;
        Ok(ModelInput {
            variables,
            gauge,
            r_weights: s.r_weights.clone(),
            r_degree: s.r_degree,
            superpotential,
            theta,
            epsilon,
            lift_r_level,
            transversality: s.transversality,
            p_fields,
        })
    }

    /// Writes a model back out, keeping the extra sections of `template`.
    pub fn from_model(m: &ModelInput, template: &ModelFile) -> ModelFile {
        let model = ModelSection {
            name: template.model.name.clone(),
            variables: m.variables.clone(),
            gauge_weights: m.gauge.to_rows(),
            r_weights: m.r_weights.clone(),
            r_degree: m.r_degree,
            superpotential: m.superpotential.to_string(),
            theta: m.theta.0.iter().map(RatLit::from_rat).collect(),
            epsilon: m.epsilon.to_string(),
            lift_r_level: m.lift_r_level.as_ref().map(RatLit::from_rat),
            transversality: m.transversality,
            p_fields: m.p_fields.as_ref().map(|p| p.iter().map(|&i| m.variables[i].clone()).collect()),
            extra_action: template.model.extra_action.clone(),
        };
        ModelFile { model, graph: template.graph.clone() }
    }

    pub fn graph(&self) -> Result<Option<(DualGraph, Option<QmapNumericalData>, Option<i64>)>, CliError> {
        let Some(g) = &self.graph else { return Ok(None) };
        let edges = g.edges.iter().map(|&[a, b]| (a, b)).collect();
        let graph = DualGraph::new(g.vertices.clone(), edges).map_err(|e| CliError::Semantic(format!("graph: {e}")))?;
        let data = g
            .data
            .as_ref()
            .map(|rows| {
                rows.iter()
                    .map(|r| {
                        Ok(VertexData { deg_a: r.deg_a.value()?, base_d: r.base_d, lift_deg: r.lift_deg.value()? })
                    })
                    .collect::<Result<Vec<_>, String>>()
                    .map(|vertices| QmapNumericalData { vertices })
            })
            .transpose()
            .map_err(|e| CliError::Semantic(format!("graph data: {e}")))?;
        Ok(Some((graph, data, g.spin)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUINTIC: &str = r#"
[model]
variables = ["x1", "x2", "x3", "x4", "x5", "p"]
gauge_weights = [[1, 1, 1, 1, 1, -5]]
r_weights = [0, 0, 0, 0, 0, 1]
r_degree = 1
superpotential = "p*(x1^5 + x2^5 + x3^5 + x4^5 + x5^5)"
theta = ["-1"]
epsilon = "infinity"
transversality = true
"#;

    #[test]
    fn parses_and_round_trips() {
        let f = ModelFile::parse(QUINTIC).unwrap();
        let m = f.to_model().unwrap();
        assert_eq!(m.theta, RatVector::from_ints(&[-1]));
        let again = ModelFile::parse(&ModelFile::from_model(&m, &f).to_toml()).unwrap();
        assert_eq!(again.to_model().unwrap(), m);
    }

    #[test]
    fn parse_errors_have_positions() {
        let bad = QUINTIC.replace("r_degree = 1", "r_degree = \"one\"");
        match ModelFile::parse(&bad) {
            Err(CliError::Parse(msg)) => assert!(msg.starts_with("line 6, column"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = QUINTIC.replace("theta = [\"-1\"]", "theta = [\"0.5\"]");
        assert!(matches!(ModelFile::parse(&bad).unwrap().to_model(), Err(CliError::Semantic(_))));
        let bad = QUINTIC.replace("p*(", "p*((");
        match ModelFile::parse(&bad).unwrap().to_model() {
            Err(CliError::Semantic(msg)) => assert!(msg.contains("superpotential, column")),
            other => panic!("unexpected {other:?}"),
        }
    }
}
