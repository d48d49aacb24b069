//! JSON problem instances.
//!
//! ```json
//! {
//!   "dims": [2, 2, 2, 2],
//!   "state": { "kind": "psi_t" },
//!   "neighborhoods": [[0, 1, 2], [1, 2, 3]],
//!   "tolerance": 1e-10,
//!   "gains_policy": "uniform"
//! }
//! ```
//!
//! `state.kind` is one of `ghz`, `w`, `psi_t`, `graph` (with `"edges": [[0, 1], ...]`)
//! or `amplitudes` (with `"amplitudes": [[re, im], ...]` in big-endian order).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DqlsError, Result};
use crate::linalg::{c, CVector};
use crate::synthesis::GainsPolicy;
use crate::tensor::{self, LocalityPattern, PureState, TensorSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Ghz,
    W,
    PsiT,
    Graph { edges: Vec<[usize; 2]> },
    Amplitudes { amplitudes: Vec<[f64; 2]> },
}

impl StateSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            StateSpec::Ghz => "ghz",
            StateSpec::W => "w",
            StateSpec::PsiT => "psi_t",
            StateSpec::Graph { .. } => "graph",
            StateSpec::Amplitudes { .. } => "amplitudes",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemInstance {
    pub dims: Vec<usize>,
    pub state: StateSpec,
    pub neighborhoods: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains_policy: Option<String>,
}

/// A validated instance.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub state: PureState,
    pub pattern: LocalityPattern,
    pub tolerance: Option<f64>,
    pub gains_policy: GainsPolicy,
    pub warnings: Vec<String>,
}

impl ProblemInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| DqlsError::Parse(format!("malformed instance: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DqlsError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| DqlsError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let space = TensorSpace::new(self.dims.clone())?;
        let n = space.num_subsystems();
        let mut warnings = Vec::new();
        let named_qubits = |name: &str| -> Result<()> {
            if space.is_qubits() {
                Ok(())
            } else {
                Err(DqlsError::DimensionMismatch(format!("{name} state needs qubit dims, got {:?}", self.dims)))
            }
        };
        let state = match &self.state {
            StateSpec::Ghz => {
                named_qubits("ghz")?;
                tensor::make_ghz(n)?
            }
            StateSpec::W => {
                named_qubits("w")?;
                tensor::make_w(n)?
            }
            StateSpec::PsiT => {
                if self.dims != [2, 2, 2, 2] {
                    return Err(DqlsError::DimensionMismatch(format!(
                        "psi_t lives on four qubits, got dims {:?}",
                        self.dims
                    )));
                }
                tensor::make_psi_t()?
            }
            StateSpec::Graph { edges } => {
                named_qubits("graph")?;
                let edges: Vec<(usize, usize)> = edges.iter().map(|e| (e[0], e[1])).collect();
                tensor::make_graph_state(n, &edges)?
            }
            StateSpec::Amplitudes { amplitudes } => {
                if amplitudes.len() != space.total_dim() {
                    return Err(DqlsError::DimensionMismatch(format!(
                        "{} amplitudes for total dimension {}",
                        amplitudes.len(),
                        space.total_dim()
                    )));
                }
                if amplitudes.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(DqlsError::Parse("amplitudes must be finite".into()));
                }
                let v = CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|a| c(a[0], a[1])));
                let norm = v.norm();
                if (norm - 1.0).abs() > crate::tol::NORM {
                    warnings.push(format!("amplitudes renormalized (norm was {norm:.12e})"));
                }
                PureState::normalized(space.clone(), v)?
            }
        };
        let pattern = LocalityPattern::from_indices(space, &self.neighborhoods)?;
        if let Some(t) = self.tolerance {
            if !(t > 0.0 && t < 1.0) {
                return Err(DqlsError::Parse(format!("tolerance {t} must lie in (0, 1)")));
            }
        }
        let gains_policy = match &self.gains_policy {
            Some(name) => name.parse().map_err(|e: DqlsError| DqlsError::Parse(e.to_string()))?,
            None => GainsPolicy::default(),
        };
        Ok(Resolved { state, pattern, tolerance: self.tolerance, gains_policy, warnings })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_t_instance() {
        let inst = ProblemInstance::from_json(
            r#"{"dims":[2,2,2,2],"state":{"kind":"psi_t"},"neighborhoods":[[0,1,2],[1,2,3]],"tolerance":1e-10}"#,
        )
        .unwrap();
        let r = inst.resolve().unwrap();
        assert_eq!(r.pattern.len(), 2);
        assert_eq!(r.state, tensor::make_psi_t().unwrap());
        assert_eq!(r.tolerance, Some(1e-10));
    }

    #[test]
    fn graph_and_amplitudes() {
        let g = ProblemInstance::from_json(
            r#"{"dims":[2,2,2],"state":{"kind":"graph","edges":[[0,1],[1,2]]},"neighborhoods":[[0,1],[0,1,2],[1,2]]}"#,
        )
        .unwrap();
        assert_eq!(g.resolve().unwrap().state, tensor::make_graph_state(3, &[(0, 1), (1, 2)]).unwrap());

        let a = ProblemInstance::from_json(
            r#"{"dims":[2,3],"state":{"kind":"amplitudes","amplitudes":[[0,0],[2,0],[0,0],[0,0],[0,0],[0,0]]},"neighborhoods":[[0],[1]]}"#,
        )
        .unwrap();
        let r = a.resolve().unwrap();
        assert_eq!(r.state.amplitudes()[1], c(1.0, 0.0));
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = ProblemInstance::from_json("{\"dims\": [2,2],\n \"state\": }").unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = ProblemInstance::from_json(r#"{"dims":[2],"state":{"kind":"bogus"},"neighborhoods":[]}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn dimension_errors() {
        let cases = [
            r#"{"dims":[2,2],"state":{"kind":"amplitudes","amplitudes":[[1,0]]},"neighborhoods":[[0]]}"#,
            r#"{"dims":[2,2],"state":{"kind":"ghz"},"neighborhoods":[[0,2]]}"#,
            r#"{"dims":[2,3],"state":{"kind":"ghz"},"neighborhoods":[[0,1]]}"#,
            r#"{"dims":[2,2,2],"state":{"kind":"psi_t"},"neighborhoods":[[0,1]]}"#,
        ];
        for text in cases {
            let err = ProblemInstance::from_json(text).unwrap().resolve().unwrap_err();
            assert_eq!(err.exit_code(), 3, "{text}: {err}");
        }
    }

    #[test]
    fn round_trip() {
        let inst = ProblemInstance {
            dims: vec![2, 2, 2],
            state: StateSpec::Ghz,
            neighborhoods: vec![vec![0, 1], vec![1, 2]],
            tolerance: None,
            gains_policy: Some("graded".into()),
        };
        let text = serde_json::to_string(&inst).unwrap();
        assert_eq!(ProblemInstance::from_json(&text).unwrap(), inst);
        assert_eq!(inst.resolve().unwrap().gains_policy, GainsPolicy::Graded);
    }
}
