//! Finite propositional Kripke models and the IPC / CPC decision procedures.

mod cpc;
mod ipc;
pub mod oracle;
mod trees;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Lang};

pub use cpc::{decide_cpc, eval_classical_prop, CpcVerdict};
pub use ipc::{
    decide_ipc, decide_ipc_with, ipc_entails, ipc_provable, node_budget, search_countermodel,
    CompiledFormula, IpcOptions, MAX_NODE_CAP,
};
pub use trees::{enumerate_finite_trees, Tree};

/// A finite partial order given by its covering pairs, with a monotone valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropKripkeModel {
    names: Vec<String>,
    cover: Vec<(usize, usize)>,
    leq: Vec<Vec<bool>>,
    valuation: Vec<BTreeSet<String>>,
}

/// Reflexive-transitive closure of `edges` on `n` points, or an error naming a cycle.
pub(crate) fn closure(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<bool>>> {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in edges {
        leq[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && leq[i][j] && leq[j][i] {
                return Err(Error::InvalidModel(format!(
                    "order is not antisymmetric: points {i} and {j} lie on a cycle"
                )));
            }
        }
    }
    Ok(leq)
}

impl PropKripkeModel {
    /// Builds a model from node names, covering pairs and per-node atom sets.
    /// Checks that the order is a partial order and the valuation monotone.
    pub fn new(
        names: Vec<String>,
        cover: Vec<(usize, usize)>,
        valuation: Vec<BTreeSet<String>>,
    ) -> Result<PropKripkeModel> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidModel("no nodes".into()));
        }
        let distinct: BTreeSet<&String> = names.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidModel("duplicate node names".into()));
        }
        if valuation.len() != n {
            return Err(Error::InvalidModel(
                "valuation length differs from node count".into(),
            ));
        }
        if let Some(&(a, b)) = cover.iter().find(|(a, b)| *a >= n || *b >= n) {
            return Err(Error::InvalidModel(format!(
                "cover edge ({a},{b}) out of range"
            )));
        }
        let leq = closure(n, &cover)?;
        for v in 0..n {
            for w in 0..n {
                if leq[v][w] && !valuation[v].is_subset(&valuation[w]) {
                    return Err(Error::InvalidModel(format!(
                        "valuation not monotone from `{}` to `{}`",
                        names[v], names[w]
                    )));
                }
            }
        }
        Ok(PropKripkeModel {
            names,
            cover,
            leq,
            valuation,
        })
    }

    /// Model on the frame of `tree` with the given atom sets.
    pub fn on_tree(tree: &Tree, valuation: Vec<BTreeSet<String>>) -> Result<PropKripkeModel> {
        let names = (0..tree.len()).map(|i| format!("w{i}")).collect();
        PropKripkeModel::new(names, tree.cover(), valuation)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cover(&self) -> &[(usize, usize)] {
        &self.cover
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn leq(&self, v: usize, w: usize) -> bool {
        self.leq[v][w]
    }

    pub fn atoms_at(&self, v: usize) -> &BTreeSet<String> {
        &self.valuation[v]
    }

    /// Nodes w with v ≤ w, including v.
    pub fn above(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&w| self.leq[v][w])
    }

    /// The least node, if there is one.
    pub fn root(&self) -> Option<usize> {
        (0..self.len()).find(|&r| (0..self.len()).all(|w| self.leq[r][w]))
    }

    pub fn to_json(&self) -> PropModelJson {
        PropModelJson {
            nodes: self.names.clone(),
            cover: self
                .cover
                .iter()
                .map(|&(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
            valuation: (0..self.len())
                .filter(|&v| !self.valuation[v].is_empty())
                .map(|v| {
                    (
                        self.names[v].clone(),
                        self.valuation[v].iter().cloned().collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PropModelJson) -> Result<PropKripkeModel> {
        let idx = |s: &str| {
            j.nodes
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::UnknownNode(s.to_string()))
        };
        let cover = j
            .cover
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut valuation = vec![BTreeSet::new(); j.nodes.len()];
        for (node, atoms) in &j.valuation {
            valuation[idx(node)?].extend(atoms.iter().cloned());
        }
        PropKripkeModel::new(j.nodes.clone(), cover, valuation)
    }
}

/// JSON shape of a propositional model: `valuation` maps nodes to the atoms true there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropModelJson {
    pub nodes: Vec<String>,
    pub cover: Vec<(String, String)>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
}

/// Intuitionistic forcing at node `v`.
pub fn force_prop(m: &PropKripkeModel, v: usize, f: &Formula) -> Result<bool> {
    if v >= m.len() {
        return Err(Error::UnknownNode(v.to_string()));
    }
    f.check_lang(Lang::Propositional)?;
    Ok(force_at(m, v, f))
}

fn force_at(m: &PropKripkeModel, v: usize, f: &Formula) -> bool {
    match f {
        Formula::Atom(p, _) => m.valuation[v].contains(p),
        Formula::Top => true,
        Formula::Bot => false,
        Formula::And(a, b) => force_at(m, v, a) && force_at(m, v, b),
        Formula::Or(a, b) => force_at(m, v, a) || force_at(m, v, b),
        Formula::Not(a) => m.above(v).all(|w| !force_at(m, w, a)),
        Formula::Implies(a, b) => m.above(v).all(|w| !force_at(m, w, a) || force_at(m, w, b)),
        Formula::Forall(..) | Formula::Exists(..) => unreachable!("checked propositional"),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PersistenceViolation {
    pub formula: String,
    pub lower: String,
    pub upper: String,
}

/// Every triple (f, v ≤ w) with v ⊩ f but w ⊮ f. Empty on every valid model.
pub fn check_persistence(m: &PropKripkeModel, fs: &[Formula]) -> Result<Vec<PersistenceViolation>> {
    let mut out = Vec::new();
    for f in fs {
        let forced = (0..m.len())
            .map(|v| force_prop(m, v, f))
            .collect::<Result<Vec<_>>>()?;
        for v in 0..m.len() {
            for w in m.above(v) {
                if forced[v] && !forced[w] {
                    out.push(PersistenceViolation {
                        formula: f.to_string(),
                        lower: m.name(v).to_string(),
                        upper: m.name(w).to_string(),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of [`decide_ipc`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid,
    Countermodel { model: PropKripkeModel, root: usize },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }
}
