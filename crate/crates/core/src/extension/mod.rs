//! Adding a new root below a set-theoretic Kripke model.

mod demos;
mod witness;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::kripke_set::{
    check_axiom, check_coherence, force_set, Axiom, AxiomReport, Env, SetKripkeModel, SetModelJson,
};

pub use demos::{dp_demo, visser_semantic_demo, DpReport, VisserDemoReport};

/// An element of the new root's domain: its members at the root and its value
/// at every old node (indexed like the old model's nodes).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootElement {
    pub root_members: Vec<usize>,
    pub upper: Vec<usize>,
    pub rank: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMode {
    /// All elements up to the rank cap.
    Enumerate,
    /// Only rank 1; further elements are added by the witness builders.
    Lazy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootExtensionConfig {
    pub alpha_max: usize,
    pub width_cap: usize,
    pub mode: WitnessMode,
}

impl Default for RootExtensionConfig {
    fn default() -> Self {
        RootExtensionConfig {
            alpha_max: 2,
            width_cap: 4096,
            mode: WitnessMode::Enumerate,
        }
    }
}

/// The old model with a new root whose domain is an enumerated fragment.
#[derive(Clone, Debug)]
pub struct Extension {
    base: SetKripkeModel,
    elements: Vec<RootElement>,
    index: BTreeMap<(Vec<usize>, Vec<usize>), usize>,
    model: SetKripkeModel,
    root_name: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootElementJson {
    pub root_members: Vec<String>,
    pub upper: BTreeMap<String, String>,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionJson {
    #[serde(flatten)]
    pub model: SetModelJson,
    pub root: String,
    pub root_elements: BTreeMap<String, RootElementJson>,
}

/// Coherent choices of one element per old node.
fn sections(m: &SetKripkeModel) -> Vec<Vec<usize>> {
    let minimal = m.roots();
    let mut out = Vec::new();
    let mut choice = vec![0usize; minimal.len()];
    loop {
        let mut x = vec![usize::MAX; m.len()];
        let mut ok = true;
        'fill: for (i, &v) in minimal.iter().enumerate() {
            for &w in m.above(v) {
                let val = m.transition(v, w)[choice[i]];
                if x[w] != usize::MAX && x[w] != val {
                    ok = false;
                    break 'fill;
                }
                x[w] = val;
            }
        }
        if ok {
            out.push(x);
        }
        let mut i = 0;
        loop {
            if i == minimal.len() {
                out.sort();
                return out;
            }
            choice[i] += 1;
            if choice[i] < m.domain(minimal[i]).len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn root_name(m: &SetKripkeModel) -> String {
    let mut name = "r".to_string();
    while m.nodes().contains(&name) {
        name.push('\'');
    }
    name
}

/// Builds the new root. Fails on incoherent input or when a rank holds more
/// than `width_cap` new elements.
pub fn extend(m: &SetKripkeModel, cfg: RootExtensionConfig) -> Result<Extension> {
    if cfg.alpha_max == 0 || cfg.width_cap == 0 {
        return Err(Error::Precondition(
            "alpha_max and width_cap must be at least 1".into(),
        ));
    }
    let problems = check_coherence(m);
    if let Some(p) = problems.first() {
        return Err(Error::InvalidModel(format!("incoherent input: {p}")));
    }
    let secs = sections(m);
    let top = match cfg.mode {
        WitnessMode::Enumerate => cfg.alpha_max,
        WitnessMode::Lazy => 1,
    };
    let mut elements: Vec<RootElement> = Vec::new();
    for alpha in 1..=top {
        let mut fresh = Vec::new();
        for s in &secs {
            if alpha == 1 {
                fresh.push(RootElement {
                    root_members: vec![],
                    upper: s.clone(),
                    rank: 1,
                });
                continue;
            }
            let cands: Vec<usize> = (0..elements.len())
                .filter(|&y| (0..m.len()).all(|v| m.is_member(v, elements[y].upper[v], s[v])))
                .collect();
            if cands.iter().all(|&y| elements[y].rank != alpha - 1) {
                continue;
            }
            if cands.len() > 24 {
                return Err(Error::Overflow(format!(
                    "rank {alpha}: {} candidate members for one element",
                    cands.len()
                )));
            }
            for mask in 1u32..(1 << cands.len()) {
                let members: Vec<usize> = cands
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &y)| y)
                    .collect();
                if members.iter().all(|&y| elements[y].rank != alpha - 1) {
                    continue;
                }
                fresh.push(RootElement {
                    root_members: members,
                    upper: s.clone(),
                    rank: alpha,
                });
                if fresh.len() > cfg.width_cap {
                    return Err(Error::Overflow(format!(
                        "more than {} elements of rank {alpha}",
                        cfg.width_cap
                    )));
                }
            }
        }
        if fresh.len() > cfg.width_cap {
            return Err(Error::Overflow(format!(
                "more than {} elements of rank {alpha}",
                cfg.width_cap
            )));
        }
        elements.extend(fresh);
    }
    let index = elements
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.root_members.clone(), e.upper.clone()), i))
        .collect();
    let model = assemble(m, &elements, &root_name(m))?;
    Ok(Extension {
        base: m.clone(),
        elements,
        index,
        model,
        root_name: root_name(m),
    })
}

fn assemble(base: &SetKripkeModel, elements: &[RootElement], root: &str) -> Result<SetKripkeModel> {
    let n = base.len();
    let r = n;
    let mut nodes = base.nodes().to_vec();
    nodes.push(root.to_string());
    let mut cover = base.cover().to_vec();
    cover.extend(base.roots().into_iter().map(|v| (r, v)));
    let mut domains: Vec<Vec<String>> = (0..n).map(|v| base.domain(v).to_vec()).collect();
    domains.push((0..elements.len()).map(|i| format!("e{i}")).collect());
    let mut transitions = base.transitions();
    for v in 0..n {
        transitions.insert((r, v), elements.iter().map(|e| e.upper[v]).collect());
    }
    let mut membership: Vec<Vec<(usize, usize)>> = (0..n).map(|v| base.membership(v)).collect();
    membership.push(
        elements
            .iter()
            .enumerate()
            .flat_map(|(x, e)| e.root_members.iter().map(move |&y| (y, x)))
            .collect(),
    );
    SetKripkeModel::new(nodes, cover, domains, transitions, membership)
}

impl Extension {
    pub fn model(&self) -> &SetKripkeModel {
        &self.model
    }

    pub fn base(&self) -> &SetKripkeModel {
        &self.base
    }

    /// Index of the new root in [`Extension::model`].
    pub fn root(&self) -> usize {
        self.base.len()
    }

    pub fn elements(&self) -> &[RootElement] {
        &self.elements
    }

    pub fn find(&self, root_members: &[usize], upper: &[usize]) -> Option<usize> {
        let mut key = root_members.to_vec();
        key.sort_unstable();
        key.dedup();
        self.index.get(&(key, upper.to_vec())).copied()
    }

    /// Adds an element unless an identical one exists; checks the four
    /// construction clauses first. Returns its index at the root.
    pub fn insert(&mut self, mut root_members: Vec<usize>, upper: Vec<usize>) -> Result<usize> {
        root_members.sort_unstable();
        root_members.dedup();
        if let Some(i) = self.find(&root_members, &upper) {
            return Ok(i);
        }
        let n = self.base.len();
        if upper.len() != n {
            return Err(Error::InvalidModel(
                "root element needs one value per node".into(),
            ));
        }
        for v in 0..n {
            if upper[v] >= self.base.domain(v).len() {
                return Err(Error::InvalidModel(format!(
                    "value at `{}` out of range",
                    self.base.nodes()[v]
                )));
            }
            for &w in self.base.above(v) {
                if self.base.transition(v, w)[upper[v]] != upper[w] {
                    return Err(Error::Precondition(format!(
                        "node values are not carried along `{}->{}`",
                        self.base.nodes()[v],
                        self.base.nodes()[w]
                    )));
                }
            }
        }
        let mut rank = 1;
        for &y in &root_members {
            let e = self
                .elements
                .get(y)
                .ok_or_else(|| Error::InvalidModel(format!("no root element {y}")))?;
            for v in 0..n {
                if !self.base.is_member(v, e.upper[v], upper[v]) {
                    return Err(Error::Precondition(format!(
                        "member e{y} is not a member at `{}`",
                        self.base.nodes()[v]
                    )));
                }
            }
            rank = rank.max(e.rank + 1);
        }
        let i = self.elements.len();
        self.index.insert((root_members.clone(), upper.clone()), i);
        self.elements.push(RootElement {
            root_members,
            upper,
            rank,
        });
        self.model = assemble(&self.base, &self.elements, &self.root_name)?;
        Ok(i)
    }

    /// Forcing at the new root over the current fragment.
    pub fn forces(&self, f: &Formula, env: &[(&str, usize)]) -> Result<bool> {
        let env: Env = env.iter().map(|&(x, d)| (x.to_string(), d)).collect();
        force_set(&self.model, self.root(), f, &env)
    }

    /// The model with the root removed equals the input model exactly.
    pub fn restriction_is_identity(&self) -> bool {
        let m = &self.model;
        let n = self.base.len();
        let cover: Vec<(usize, usize)> = m
            .cover()
            .iter()
            .cloned()
            .filter(|&(a, b)| a < n && b < n)
            .collect();
        let transitions = m
            .transitions()
            .into_iter()
            .filter(|&((v, w), _)| v < n && w < n)
            .collect();
        let restricted = SetKripkeModel::new(
            m.nodes()[..n].to_vec(),
            cover,
            (0..n).map(|v| m.domain(v).to_vec()).collect(),
            transitions,
            (0..n).map(|v| m.membership(v)).collect(),
        );
        restricted.is_ok_and(|r| r == self.base)
    }

    /// Re-derives the construction clauses from the finished model alone.
    pub fn validate(&self) -> Vec<String> {
        let m = &self.model;
        let r = self.root();
        let n = self.base.len();
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for x in 0..m.domain(r).len() {
            let name = &m.domain(r)[x];
            let members = m.members(r, x).to_vec();
            let upper: Vec<usize> = (0..n).map(|v| m.transition(r, v)[x]).collect();
            if !seen.insert((members.clone(), upper.clone())) {
                out.push(format!("{name} duplicates another element"));
            }
            match m.rank(r, x) {
                Some(rx) => {
                    if members
                        .iter()
                        .any(|&y| m.rank(r, y).is_none_or(|ry| ry >= rx))
                    {
                        out.push(format!("{name} has a member of rank not below its own"));
                    }
                }
                None => out.push(format!("{name} sits on a membership cycle at the root")),
            }
            for &y in &members {
                for v in 0..n {
                    if !m.is_member(v, m.transition(r, v)[y], upper[v]) {
                        out.push(format!(
                            "{name}: member {} is lost at `{}`",
                            m.domain(r)[y],
                            m.nodes()[v]
                        ));
                    }
                }
            }
            for v in 0..n {
                for &w in m.above(v) {
                    if m.transition(v, w)[upper[v]] != upper[w] {
                        out.push(format!(
                            "{name}: values at `{}` and `{}` disagree",
                            m.nodes()[v],
                            m.nodes()[w]
                        ));
                    }
                }
            }
        }
        out
    }

    /// Well-founded root membership with strictly decreasing ranks.
    pub fn root_well_founded(&self) -> bool {
        let r = self.root();
        let m = &self.model;
        (0..m.domain(r).len()).all(|x| {
            self.elements[x]
                .root_members
                .iter()
                .all(|&y| self.elements[y].rank < self.elements[x].rank)
                && m.rank(r, x).is_some()
        })
    }

    /// [`check_axiom`] at the root, marked as relative to the fragment.
    pub fn check_axiom(&self, axiom: &Axiom, rank_bound: usize) -> Result<AxiomReport> {
        let mut report = check_axiom(&self.model, axiom, self.root(), rank_bound)?;
        report.fragment_relative = true;
        Ok(report)
    }

    pub fn to_json(&self) -> ExtensionJson {
        let m = &self.model;
        let r = self.root();
        let names = m.domain(r);
        ExtensionJson {
            model: m.to_json(),
            root: m.nodes()[r].clone(),
            root_elements: self
                .elements
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    let j = RootElementJson {
                        root_members: e.root_members.iter().map(|&y| names[y].clone()).collect(),
                        upper: (0..self.base.len())
                            .map(|v| (m.nodes()[v].clone(), m.domain(v)[e.upper[v]].clone()))
                            .collect(),
                        rank: e.rank,
                    };
                    (names[i].clone(), j)
                })
                .collect(),
        }
    }
}

/// Report for an ∈-induction instance at the root.
#[derive(Clone, Debug, Serialize)]
pub struct InductionReport {
    pub well_founded: bool,
    pub instance: AxiomReport,
}

impl InductionReport {
    pub fn passed(&self) -> bool {
        self.well_founded && self.instance.passed()
    }
}

pub fn check_ein_induction(
    ext: &Extension,
    phi: &Formula,
    rank_bound: usize,
) -> Result<InductionReport> {
    Ok(InductionReport {
        well_founded: ext.root_well_founded(),
        instance: ext.check_axiom(&Axiom::EpsInduction(phi.clone()), rank_bound)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke_set::{disjoint_union, vrank_model};

    pub(crate) fn leaf(n: usize) -> SetKripkeModel {
        SetKripkeModel::from_classical(&vrank_model(n).unwrap(), "v").unwrap()
    }

    #[test]
    fn v1_gains_nothing_at_rank_two() {
        let ext = extend(&leaf(1), RootExtensionConfig::default()).unwrap();
        assert_eq!(ext.elements().len(), 1);
        assert_eq!(
            ext.elements()[0],
            RootElement {
                root_members: vec![],
                upper: vec![0],
                rank: 1
            }
        );
        let one = extend(
            &leaf(1),
            RootExtensionConfig {
                alpha_max: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(one.elements(), ext.elements());
    }

    #[test]
    fn v2_rank_two_adds_one_element() {
        let ext = extend(&leaf(2), RootExtensionConfig::default()).unwrap();
        let ranks: Vec<usize> = ext.elements().iter().map(|e| e.rank).collect();
        assert_eq!(ranks, vec![1, 1, 2]);
        // e0 maps to ∅, e1 to {∅}; the new element holds e0 and sits over {∅}.
        assert_eq!(
            ext.elements()[2],
            RootElement {
                root_members: vec![0],
                upper: vec![1],
                rank: 2
            }
        );
        assert!(ext.validate().is_empty());
        assert!(ext.restriction_is_identity());
        assert!(ext.root_well_founded());
        assert!(check_coherence(ext.model()).is_empty());
    }

    #[test]
    fn brute_force_clause_enumeration_matches() {
        // Stage by stage: every (set of earlier elements, node value) pair whose
        // members sit below the value. Indices into `all` stay stable.
        for n in 1..=3 {
            let base = leaf(n);
            let ext = extend(
                &base,
                RootExtensionConfig {
                    alpha_max: 3,
                    ..Default::default()
                },
            )
            .unwrap();
            let mut all: Vec<(BTreeSet<usize>, usize)> = Vec::new();
            for _ in 0..3 {
                let prev = all.clone();
                for val in 0..base.domain(0).len() {
                    for mask in 0u64..(1 << prev.len()) {
                        let set: BTreeSet<usize> =
                            (0..prev.len()).filter(|i| mask >> i & 1 == 1).collect();
                        let k = (set, val);
                        if k.0.iter().all(|&i| base.is_member(0, prev[i].1, val))
                            && !all.contains(&k)
                        {
                            all.push(k);
                        }
                    }
                }
            }
            assert_eq!(all.len(), ext.elements().len(), "V_{n}");
        }
    }

    #[test]
    fn width_cap_overflow() {
        let err = extend(
            &leaf(3),
            RootExtensionConfig {
                alpha_max: 2,
                width_cap: 2,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Overflow(_)));
    }

    #[test]
    fn union_of_leaves_and_json() {
        let u = disjoint_union(&[leaf(1), leaf(2)]).unwrap();
        let ext = extend(&u, RootExtensionConfig::default()).unwrap();
        assert_eq!(ext.elements().iter().filter(|e| e.rank == 1).count(), 2);
        assert!(ext.validate().is_empty());
        assert!(ext.restriction_is_identity());
        let j = serde_json::to_value(ext.to_json()).unwrap();
        assert_eq!(j["root"], "r");
        assert!(j["root_elements"]["e0"]["upper"]["0.v"].is_string());
        assert!(j["transitions"]["r->1.v"].is_object());
    }

    #[test]
    fn incoherent_input_rejected() {
        let j: SetModelJson = serde_json::from_str(
            r#"{"nodes":["u","w"],"cover":[["u","w"]],"domains":{"u":["a","b"],"w":["c","d"]},
                "transitions":{"u->w":{"a":"c","b":"d"}},"membership":{"u":[["a","b"]]}}"#,
        )
        .unwrap();
        let m = SetKripkeModel::from_json(&j).unwrap();
        assert!(matches!(
            extend(&m, RootExtensionConfig::default()),
            Err(Error::InvalidModel(_))
        ));
    }
}
