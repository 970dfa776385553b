//! Translating propositional formulas into set-theoretic sentences along a
//! finite splitting tree whose leaves carry distinguishable finite set models.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::{extend, RootExtensionConfig};
use crate::formula::{self, Formula, Lang};
use crate::kripke_prop::{decide_ipc, force_prop, PropKripkeModel, Verdict};
use crate::kripke_set::{
    cardinality_sentence, disjoint_union, eval_classical, force_set, vrank_model,
    ClassicalSetModel, Env, SetKripkeModel,
};
use crate::subst::Assignment;

/// Largest stage usable as a leaf model.
const MAX_LEAF_RANK: usize = 4;

/// A rooted tree in which every inner node has at least two children, with a
/// monotone valuation and a cumulative stage V_n at each leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingTree {
    names: Vec<String>,
    children: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    valuation: BTreeMap<String, BTreeSet<usize>>,
    leaf_rank: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeafJson {
    pub vrank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeJson {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub cover: Vec<(String, String)>,
    #[serde(default)]
    pub valuation: BTreeMap<String, Vec<String>>,
    pub leaves: BTreeMap<String, LeafJson>,
}

impl SplittingTree {
    /// `cover` lists (parent, child) pairs; `leaf_rank` maps each leaf to n for V_n.
    pub fn new(
        names: Vec<String>,
        cover: &[(usize, usize)],
        valuation: BTreeMap<String, BTreeSet<usize>>,
        leaf_rank: BTreeMap<usize, usize>,
    ) -> Result<SplittingTree> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidModel("empty tree".into()));
        }
        if names.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::InvalidModel("duplicate node names".into()));
        }
        let mut children = vec![Vec::new(); n];
        let mut parent = vec![None; n];
        for &(a, b) in cover {
            if a >= n || b >= n {
                return Err(Error::InvalidModel(format!("edge ({a},{b}) out of range")));
            }
            if parent[b].replace(a).is_some() {
                return Err(Error::InvalidModel(format!(
                    "`{}` has two parents",
                    names[b]
                )));
            }
            children[a].push(b);
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::InvalidModel(format!(
                "expected one root, found {}",
                roots.len()
            )));
        }
        // Every node must reach the root without repeating.
        for v in 0..n {
            let (mut u, mut steps) = (v, 0);
            while let Some(p) = parent[u] {
                u = p;
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidModel("cycle in the tree".into()));
                }
            }
        }
        for v in 0..n {
            if children[v].len() == 1 {
                return Err(Error::Precondition(format!(
                    "`{}` has a single immediate successor",
                    names[v]
                )));
            }
        }
        let t = SplittingTree {
            names,
            children,
            parent,
            valuation,
            leaf_rank,
        };
        for (p, set) in &t.valuation {
            for &v in set {
                if v >= n {
                    return Err(Error::InvalidModel(format!(
                        "valuation of `{p}` names node {v}"
                    )));
                }
                for w in t.up(v) {
                    if !set.contains(&w) {
                        return Err(Error::InvalidModel(format!(
                            "valuation of `{p}` is not upward closed at `{}`",
                            t.names[w]
                        )));
                    }
                }
            }
        }
        let leaves = t.leaves();
        let mut sizes = BTreeSet::new();
        for &l in &leaves {
            let k = *t.leaf_rank.get(&l).ok_or_else(|| {
                Error::InvalidModel(format!("leaf `{}` has no model", t.names[l]))
            })?;
            if k == 0 || k > MAX_LEAF_RANK {
                return Err(Error::Precondition(format!(
                    "leaf stage V_{k} outside 1..={MAX_LEAF_RANK}"
                )));
            }
            if !sizes.insert(k) {
                return Err(Error::Precondition(format!("two leaves carry V_{k}")));
            }
        }
        if t.leaf_rank.keys().any(|l| !leaves.contains(l)) {
            return Err(Error::InvalidModel(
                "a model is attached to an inner node".into(),
            ));
        }
        let sets = t.leaf_sets();
        if sets.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(Error::Inconsistency(
                "two nodes share their leaf set".into(),
            ));
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn root(&self) -> usize {
        (0..self.len())
            .find(|&v| self.parent[v].is_none())
            .expect("validated")
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| self.children[v].is_empty())
            .collect()
    }

    /// v and its descendants.
    pub fn up(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend(self.children[out[i]].iter().copied());
            i += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn leq(&self, v: usize, w: usize) -> bool {
        let mut u = w;
        loop {
            if u == v {
                return true;
            }
            match self.parent[u] {
                Some(p) => u = p,
                None => return false,
            }
        }
    }

    /// Leaves above each node.
    pub fn leaf_sets(&self) -> Vec<BTreeSet<usize>> {
        (0..self.len())
            .map(|v| {
                self.up(v)
                    .into_iter()
                    .filter(|&w| self.children[w].is_empty())
                    .collect()
            })
            .collect()
    }

    pub fn leaf_model(&self, l: usize) -> Result<ClassicalSetModel> {
        vrank_model(self.leaf_rank[&l])
    }

    pub fn valuation(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.valuation
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        self.valuation.keys().cloned().collect()
    }

    pub fn to_prop_model(&self) -> Result<PropKripkeModel> {
        let mut val = vec![BTreeSet::new(); self.len()];
        for (p, set) in &self.valuation {
            for &v in set {
                val[v].insert(p.clone());
            }
        }
        let cover = (0..self.len())
            .flat_map(|v| self.children[v].iter().map(move |&c| (v, c)))
            .collect();
        PropKripkeModel::new(self.names.clone(), cover, val)
    }

    pub fn to_json(&self) -> TreeJson {
        TreeJson {
            nodes: self.names.clone(),
            cover: (0..self.len())
                .flat_map(|v| self.children[v].iter().map(move |&c| (v, c)))
                .map(|(a, b)| (self.names[a].clone(), self.names[b].clone()))
                .collect(),
            valuation: self
                .valuation
                .iter()
                .map(|(p, s)| {
                    (
                        p.clone(),
                        s.iter().map(|&v| self.names[v].clone()).collect(),
                    )
                })
                .collect(),
            leaves: self
                .leaf_rank
                .iter()
                .map(|(&l, &k)| (self.names[l].clone(), LeafJson { vrank: k }))
                .collect(),
        }
    }

    pub fn from_json(j: &TreeJson) -> Result<SplittingTree> {
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
        let mut valuation = BTreeMap::new();
        for (p, ns) in &j.valuation {
            let set = ns.iter().map(|s| idx(s)).collect::<Result<BTreeSet<_>>>()?;
            valuation.insert(p.clone(), set);
        }
        let leaf_rank = j
            .leaves
            .iter()
            .map(|(l, lj)| Ok((idx(l)?, lj.vrank)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        SplittingTree::new(j.nodes.clone(), &cover, valuation, leaf_rank)
    }
}

/// φ_l for every leaf: exactly as many elements as the leaf model has. The
/// matrix of classical truth values is checked to be the identity.
pub fn distinguishing_sentences(t: &SplittingTree) -> Result<BTreeMap<usize, Formula>> {
    let leaves = t.leaves();
    let mut models = BTreeMap::new();
    let mut out = BTreeMap::new();
    for &l in &leaves {
        let m = t.leaf_model(l)?;
        out.insert(l, cardinality_sentence(m.len(), true)?);
        models.insert(l, m);
    }
    for &l in &leaves {
        for &k in &leaves {
            if eval_classical(&models[&l], &out[&k], &Env::new())? != (l == k) {
                return Err(Error::Precondition(format!(
                    "leaves `{}` and `{}` are not distinguished",
                    t.names[l], t.names[k]
                )));
            }
        }
    }
    Ok(out)
}

/// ¬¬ of the disjunction of φ_l over the leaves above v.
pub fn gamma(t: &SplittingTree, phis: &BTreeMap<usize, Formula>, v: usize) -> Formula {
    let parts: Vec<Formula> = t.leaf_sets()[v].iter().map(|l| phis[l].clone()).collect();
    formula::not(formula::not(formula::disj(parts)))
}

/// τ(p) is the disjunction of γ_v over the nodes v where p holds.
pub fn tau(t: &SplittingTree, phis: &BTreeMap<usize, Formula>) -> Assignment {
    Assignment::propositional(t.valuation.iter().map(|(p, set)| {
        (
            p.clone(),
            formula::disj(set.iter().map(|&v| gamma(t, phis, v))),
        )
    }))
}

/// Leaves become one-node models of their stages; every inner node is a new
/// root below the disjoint union of its children's models. Model nodes carry
/// the tree's node names; the second value maps tree nodes to model nodes.
pub fn build_tree_model(
    t: &SplittingTree,
    cfg: RootExtensionConfig,
) -> Result<(SetKripkeModel, Vec<usize>)> {
    let (m, tree_of) = build_at(t, t.root(), cfg)?;
    let mut model_of = vec![usize::MAX; t.len()];
    for (i, &v) in tree_of.iter().enumerate() {
        model_of[v] = i;
    }
    Ok((m, model_of))
}

fn build_at(
    t: &SplittingTree,
    v: usize,
    cfg: RootExtensionConfig,
) -> Result<(SetKripkeModel, Vec<usize>)> {
    if t.children[v].is_empty() {
        return Ok((
            SetKripkeModel::from_classical(&t.leaf_model(v)?, &t.names[v])?,
            vec![v],
        ));
    }
    let mut parts = Vec::new();
    let mut tree_of = Vec::new();
    for &c in &t.children[v] {
        let (m, map) = build_at(t, c, cfg)?;
        parts.push(m);
        tree_of.extend(map);
    }
    let ext = extend(&disjoint_union(&parts)?, cfg)?;
    tree_of.push(v);
    let names = tree_of.iter().map(|&u| t.names[u].clone()).collect();
    Ok((ext.model().renamed(names)?, tree_of))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixEntry {
    pub atom: String,
    pub node: String,
    pub forced: bool,
    pub expected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaCheck {
    pub formula: String,
    pub node: String,
    pub set_model: bool,
    pub tree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TranslationReport {
    pub matrix: Vec<MatrixEntry>,
    /// (γ_v, w) pairs where forcing differs from w ≥ v.
    pub gamma_mismatches: Vec<(String, String)>,
    pub formula_mismatches: Vec<FormulaCheck>,
    pub formulas_checked: usize,
}

impl TranslationReport {
    pub fn passed(&self) -> bool {
        self.matrix.iter().all(|e| e.forced == e.expected)
            && self.gamma_mismatches.is_empty()
            && self.formula_mismatches.is_empty()
    }
}

/// Checks τ(p) against the valuation, γ_v against the order, and each given
/// propositional formula A node by node against the tree's own forcing.
pub fn verify_translation(
    m: &SetKripkeModel,
    model_of: &[usize],
    t: &SplittingTree,
    phis: &BTreeMap<usize, Formula>,
    formulas: &[Formula],
) -> Result<TranslationReport> {
    let tr = tau(t, phis);
    let env = Env::new();
    let mut matrix = Vec::new();
    for (p, set) in &t.valuation {
        let f = tr.apply(&formula::atom(p))?;
        for w in 0..t.len() {
            matrix.push(MatrixEntry {
                atom: p.clone(),
                node: t.names[w].clone(),
                forced: force_set(m, model_of[w], &f, &env)?,
                expected: set.contains(&w),
            });
        }
    }
    let mut gamma_mismatches = Vec::new();
    for v in 0..t.len() {
        let g = gamma(t, phis, v);
        for w in 0..t.len() {
            if force_set(m, model_of[w], &g, &env)? != t.leq(v, w) {
                gamma_mismatches.push((t.names[v].clone(), t.names[w].clone()));
            }
        }
    }
    let pm = t.to_prop_model()?;
    let mut formula_mismatches = Vec::new();
    for a in formulas {
        a.check_lang(Lang::Propositional)?;
        let tra = translate(&tr, t, a)?;
        for w in 0..t.len() {
            let set_model = force_set(m, model_of[w], &tra, &env)?;
            let tree = force_prop(&pm, w, a)?;
            if set_model != tree {
                formula_mismatches.push(FormulaCheck {
                    formula: a.to_string(),
                    node: t.names[w].clone(),
                    set_model,
                    tree,
                });
            }
        }
    }
    Ok(TranslationReport {
        matrix,
        gamma_mismatches,
        formula_mismatches,
        formulas_checked: formulas.len(),
    })
}

/// A^τ; atoms the valuation never mentions are false everywhere and map to ⊥.
pub fn translate(tr: &Assignment, t: &SplittingTree, a: &Formula) -> Result<Formula> {
    let mut full = tr.clone();
    for p in a.letters() {
        if !t.valuation.contains_key(&p) {
            full.insert(&p, 0, Formula::Bot)?;
        }
    }
    full.apply(a)
}

/// Turns the part of a propositional countermodel above `root` into a
/// splitting tree: unravel into a tree, then give every node with a single
/// successor a second copy of that successor's subtree. Leaves get V_1, V_2, ...
pub fn splitting_tree_from(model: &PropKripkeModel, root: usize) -> Result<SplittingTree> {
    // Unravel along immediate successors.
    let cover = model.cover();
    let succ = |v: usize| -> Vec<usize> {
        cover
            .iter()
            .filter(|&&(a, _)| a == v)
            .map(|&(_, b)| b)
            .collect()
    };
    let mut orig = vec![root];
    let mut children: Vec<Vec<usize>> = vec![vec![]];
    let mut i = 0;
    while i < orig.len() {
        for s in succ(orig[i]) {
            let j = orig.len();
            orig.push(s);
            children.push(vec![]);
            children[i].push(j);
        }
        i += 1;
        if orig.len() > 64 {
            return Err(Error::Overflow(
                "unravelled countermodel exceeds 64 nodes".into(),
            ));
        }
    }
    // Duplicate lone successors, innermost first so copies are already split.
    fn copy(orig: &mut Vec<usize>, children: &mut Vec<Vec<usize>>, v: usize) -> usize {
        let j = orig.len();
        orig.push(orig[v]);
        children.push(vec![]);
        let kids = children[v].clone();
        for c in kids {
            let cc = copy(orig, children, c);
            children[j].push(cc);
        }
        j
    }
    let mut order: Vec<usize> = (0..orig.len()).collect();
    order.reverse();
    for v in order {
        if children[v].len() == 1 {
            let c = children[v][0];
            let dup = copy(&mut orig, &mut children, c);
            children[v].push(dup);
        }
    }
    let n = orig.len();
    let leaves: Vec<usize> = (0..n).filter(|&v| children[v].is_empty()).collect();
    if leaves.len() > MAX_LEAF_RANK {
        return Err(Error::Overflow(format!(
            "the countermodel needs {} leaves, at most {MAX_LEAF_RANK} distinguishable stages exist",
            leaves.len()
        )));
    }
    let names: Vec<String> = (0..n).map(|v| format!("t{v}")).collect();
    let cover: Vec<(usize, usize)> = (0..n)
        .flat_map(|v| children[v].iter().map(move |&c| (v, c)))
        .collect();
    let mut valuation: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for v in 0..n {
        for p in model.atoms_at(orig[v]) {
            valuation.entry(p.clone()).or_default().insert(v);
        }
    }
    let leaf_rank = leaves
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i + 1))
        .collect();
    SplittingTree::new(names, &cover, valuation, leaf_rank)
}

#[derive(Clone, Debug, Serialize)]
pub struct DeJonghReport {
    pub formula: String,
    pub tree: TreeJson,
    /// τ(p) for each atom, rendered.
    pub translation: BTreeMap<String, String>,
    pub translated: String,
    pub translation_check: TranslationReport,
    pub tree_refutes: bool,
    pub root_forces_translation: bool,
    pub model_nodes: usize,
}

impl DeJonghReport {
    pub fn passed(&self) -> bool {
        self.tree_refutes && !self.root_forces_translation && self.translation_check.passed()
    }
}

/// Builds a set-theoretic Kripke model and a translation τ with A^τ not
/// forced at the root. Without a tree, one is derived from the IPC countermodel.
pub fn dejongh_counterexample(
    a: &Formula,
    tree: Option<SplittingTree>,
    cfg: RootExtensionConfig,
) -> Result<DeJonghReport> {
    a.check_lang(Lang::Propositional)?;
    let t = match tree {
        Some(t) => t,
        None => match decide_ipc(a)? {
            Verdict::Valid => {
                return Err(Error::Precondition(format!(
                    "`{a}` is IPC-valid; no countermodel exists"
                )))
            }
            Verdict::Countermodel { model, root } => splitting_tree_from(&model, root)?,
        },
    };
    let phis = distinguishing_sentences(&t)?;
    let tr = tau(&t, &phis);
    let (m, model_of) = build_tree_model(&t, cfg)?;
    let check = verify_translation(&m, &model_of, &t, &phis, std::slice::from_ref(a))?;
    let translated = translate(&tr, &t, a)?;
    let root = model_of[t.root()];
    Ok(DeJonghReport {
        formula: a.to_string(),
        tree: t.to_json(),
        translation: tr
            .iter()
            .map(|(p, (_, f))| (p.clone(), f.to_string()))
            .collect(),
        translated: translated.to_string(),
        tree_refutes: !force_prop(&t.to_prop_model()?, t.root(), a)?,
        root_forces_translation: force_set(&m, root, &translated, &Env::new())?,
        translation_check: check,
        model_nodes: m.len(),
    })
}
