use std::collections::HashMap;
use std::fmt::Write as _;

use crate::encoder::EncodingMap;
use crate::error::{Error, Location, Result};
use crate::solver::StageValueFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct PolicyNode {
    pub action: usize,
    /// Successor node for every observation.
    pub edges: Vec<usize>,
    /// Expected return of following this node from each POMDP state.
    pub values: Vec<f64>,
}

/// Finite-state controller: action-labelled nodes with exactly one
/// outgoing edge per observation.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGraph {
    pub nodes: Vec<PolicyNode>,
    pub initial: usize,
}

impl PolicyGraph {
    pub fn new(nodes: Vec<PolicyNode>, initial: usize) -> Result<Self> {
        let g = PolicyGraph { nodes, initial };
        g.check()?;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_observations(&self) -> usize {
        self.nodes.first().map_or(0, |n| n.edges.len())
    }

    /// Every node has one in-range edge per observation and all value
    /// vectors have the same length.
    pub fn check(&self) -> Result<()> {
        if self.initial >= self.nodes.len() {
            return Err(Error::Validation("initial node out of range".into()));
        }
        let no = self.num_observations();
        let nv = self.nodes[0].values.len();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.edges.len() != no {
                return Err(Error::Validation(format!("node {i} has {} edges, expected {no}", n.edges.len())));
            }
            if n.edges.iter().any(|&e| e >= self.nodes.len()) {
                return Err(Error::Validation(format!("node {i} has a dangling edge")));
            }
            if n.values.len() != nv {
                return Err(Error::Validation(format!("node {i} has a value vector of a different length")));
            }
        }
        Ok(())
    }

    /// Unrolls stage value functions into a graph rooted at vector `root`
    /// of the last stage. Only nodes reachable from the root are created.
    /// Last-step nodes loop to themselves; their successors never act.
    pub fn from_stages(stages: &[StageValueFunction], root: usize) -> Self {
        let top = stages.len() - 1;
        assert!(top >= 1, "need at least one backed-up stage");
        let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut order: Vec<(usize, usize)> = vec![(top, root)];
        ids.insert((top, root), 0);
        let mut nodes = Vec::new();
        let mut cursor = 0;
        while cursor < order.len() {
            let (stage, idx) = order[cursor];
            let alpha = &stages[stage].alphas[idx];
            let edges = if stage == 1 {
                vec![cursor; alpha.successors.len()]
            } else {
                alpha
                    .successors
                    .iter()
                    .map(|&j| {
                        *ids.entry((stage - 1, j)).or_insert_with(|| {
                            order.push((stage - 1, j));
                            order.len() - 1
                        })
                    })
                    .collect()
            };
            nodes.push(PolicyNode {
                action: alpha.action,
                edges,
                values: alpha.values.clone(),
            });
            cursor += 1;
        }
        PolicyGraph { nodes, initial: 0 }
    }

    /// Structured-text export with 17 significant digits.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "policy-graph");
        let _ = writeln!(out, "observations {}", self.num_observations());
        let _ = writeln!(out, "states {}", self.nodes.first().map_or(0, |n| n.values.len()));
        let _ = writeln!(out, "nodes {}", self.nodes.len());
        let _ = writeln!(out, "initial {}", self.initial);
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(out, "node {i} action {}", n.action);
            let edges: Vec<String> = n.edges.iter().map(|e| e.to_string()).collect();
            let _ = writeln!(out, "edges {}", edges.join(" "));
            let values: Vec<String> = n.values.iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "values {}", values.join(" "));
        }
        out
    }

    pub fn from_document(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            origin: "<policy-graph>".into(),
            location: Location { line, column: 1 },
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |key: &str| -> Result<(usize, Vec<&str>)> {
            let (ln, l) = lines.next().ok_or_else(|| err(0, format!("missing `{key}`")))?;
            let mut toks = l.split_whitespace();
            if toks.next() != Some(key) {
                return Err(err(ln, format!("expected `{key}`")));
            }
            Ok((ln, toks.collect()))
        };
        let num = |ln: usize, t: Option<&&str>| -> Result<usize> {
            t.and_then(|t| t.parse().ok()).ok_or_else(|| err(ln, "expected integer".into()))
        };
        next("policy-graph")?;
        let (ln, t) = next("observations")?;
        let no = num(ln, t.first())?;
        let (ln, t) = next("states")?;
        let ns = num(ln, t.first())?;
        let (ln, t) = next("nodes")?;
        let nn = num(ln, t.first())?;
        let (ln, t) = next("initial")?;
        let initial = num(ln, t.first())?;
        let mut nodes = Vec::with_capacity(nn);
        for i in 0..nn {
            let (ln, t) = next("node")?;
            if num(ln, t.first())? != i || t.get(1) != Some(&"action") {
                return Err(err(ln, format!("expected `node {i} action <a>`")));
            }
            let action = num(ln, t.get(2))?;
            let (ln, t) = next("edges")?;
            let edges: Vec<usize> = t.iter().map(|x| num(ln, Some(x))).collect::<Result<_>>()?;
            if edges.len() != no {
                return Err(err(ln, format!("expected {no} edges")));
            }
            let (ln, t) = next("values")?;
            let values: Vec<f64> = t
                .iter()
                .map(|x| x.parse().map_err(|_| err(ln, format!("bad number `{x}`"))))
                .collect::<Result<_>>()?;
            if values.len() != ns {
                return Err(err(ln, format!("expected {ns} values")));
            }
            nodes.push(PolicyNode { action, edges, values });
        }
        PolicyGraph::new(nodes, initial)
    }
}

/// A policy graph on an induced POMDP read as a pMDP policy: its
/// observations are the pMDP states, so it acts identically at every
/// parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct PmdpPolicyView {
    pub graph: PolicyGraph,
    pub encoding: EncodingMap,
}

impl PmdpPolicyView {
    pub fn new(graph: PolicyGraph, encoding: EncodingMap) -> Result<Self> {
        if graph.num_observations() != encoding.num_model_states {
            return Err(Error::AlphabetMismatch {
                expected: encoding.num_model_states,
                found: graph.num_observations(),
            });
        }
        Ok(PmdpPolicyView { graph, encoding })
    }

    /// Action chosen after the observed model-state history `history`
    /// (excluding the initial observation, which the graph does not use).
    pub fn action_after(&self, history: &[usize]) -> usize {
        let mut node = self.graph.initial;
        for &s in history {
            node = self.graph.nodes[node].edges[s];
        }
        self.graph.nodes[node].action
    }
}
