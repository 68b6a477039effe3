use std::fmt;

use crate::encoder::ParamPointSet;
use crate::error::{Error, ExprError, Result};
use crate::model::{check_distribution, Mdp, ParamExpr, Row};

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl Param {
    /// A parameter over the closed unit interval.
    pub fn unit(name: impl Into<String>) -> Self {
        Param {
            name: name.into(),
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

pub type SymbolicRow = Vec<(usize, ParamExpr)>;

/// A parametric MDP: transition probabilities are expressions over `params`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmdp {
    pub name: String,
    pub states: Vec<String>,
    pub actions: Vec<String>,
    pub params: Vec<Param>,
    /// State-major symbolic rows, `s * num_actions + a`.
    pub rows: Vec<SymbolicRow>,
    pub init: Vec<f64>,
}

/// A single reason a model fails at a parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub state: Option<String>,
    pub action: Option<String>,
    pub point: Vec<f64>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.state, &self.action) {
            (Some(s), Some(a)) => write!(f, "row ({s}, {a}) at {:?}: {}", self.point, self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl Pmdp {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn row(&self, state: usize, action: usize) -> &SymbolicRow {
        &self.rows[state * self.actions.len() + action]
    }

    pub fn state_index(&self, name: &str) -> Result<usize> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    fn eval_row(&self, row: &SymbolicRow, point: &[f64]) -> Result<Row, ExprError> {
        let lookup = |name: &str| {
            self.params
                .iter()
                .position(|p| p.name == name)
                .and_then(|i| point.get(i).copied())
        };
        row.iter()
            .map(|(t, e)| e.eval_with(&lookup).map(|v| (*t, v)))
            .collect()
    }

    fn point_violation(&self, point: &[f64]) -> Option<Violation> {
        let message = if point.len() != self.params.len() {
            format!("point has {} coordinates, model has {} parameters", point.len(), self.params.len())
        } else if let Some(p) = self.params.iter().zip(point).find(|(p, v)| !p.contains(**v)) {
            format!("{} = {} outside [{}, {}]", p.0.name, p.1, p.0.lower, p.0.upper)
        } else {
            return None;
        };
        Some(Violation {
            state: None,
            action: None,
            point: point.to_vec(),
            message,
        })
    }

    fn row_violations(&self, point: &[f64], out: &mut Vec<Violation>) -> Vec<Row> {
        let na = self.actions.len();
        let mut rows = Vec::with_capacity(self.rows.len());
        for (idx, row) in self.rows.iter().enumerate() {
            let violation = |message: String| Violation {
                state: Some(self.states[idx / na].clone()),
                action: Some(self.actions[idx % na].clone()),
                point: point.to_vec(),
                message,
            };
            match self.eval_row(row, point) {
                Ok(r) => {
                    if let Err(msg) = check_distribution(r.iter().map(|(_, p)| *p)) {
                        out.push(violation(msg));
                    }
                    rows.push(r);
                }
                Err(e) => {
                    out.push(violation(e.to_string()));
                    rows.push(Vec::new());
                }
            }
        }
        rows
    }

    /// Evaluates the model at `point` (one value per declared parameter).
    pub fn instantiate(&self, point: &[f64]) -> Result<Mdp> {
        let mut violations: Vec<Violation> = self.point_violation(point).into_iter().collect();
        if !violations.is_empty() {
            return Err(Error::Violations(violations));
        }
        let rows = self.row_violations(point, &mut violations);
        if !violations.is_empty() {
            return Err(Error::Violations(violations));
        }
        Ok(Mdp {
            states: self.states.clone(),
            actions: self.actions.clone(),
            rows,
            init: self.init.clone(),
        })
    }

    /// Collects every problem with the model at every point of `points`.
    pub fn validate(&self, points: &ParamPointSet) -> Vec<Violation> {
        let mut out = Vec::new();
        if let Err(message) = check_distribution(self.init.iter().copied()) {
            out.push(Violation {
                state: None,
                action: None,
                point: Vec::new(),
                message: format!("initial distribution: {message}"),
            });
        }
        for point in points.points() {
            if let Some(v) = self.point_violation(point) {
                out.push(v);
                continue;
            }
            self.row_violations(point, &mut out);
        }
        out
    }
}
