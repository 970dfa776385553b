use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::classical::{membership_ranks, ClassicalSetModel};
use crate::error::{Error, Result};
use crate::formula::{Formula, Lang, EQ, IN};
use crate::kripke_prop::closure;

/// Variable assignment into the domain of one node.
pub type Env = BTreeMap<String, usize>;

/// First-order Kripke model for the membership language with finite domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetKripkeModel {
    nodes: Vec<String>,
    cover: Vec<(usize, usize)>,
    leq: Vec<Vec<bool>>,
    /// Nodes above each node, maximal ones first.
    up: Vec<Vec<usize>>,
    domains: Vec<Vec<String>>,
    /// `trans[v][w]` is f_vw for v ≤ w.
    trans: Vec<Vec<Option<Vec<usize>>>>,
    members: Vec<Vec<Vec<usize>>>,
    ranks: Vec<Option<Vec<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetModelJson {
    pub nodes: Vec<String>,
    #[serde(default)]
    pub cover: Vec<(String, String)>,
    pub domains: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub transitions: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub membership: BTreeMap<String, Vec<(String, String)>>,
}

impl SetKripkeModel {
    /// `transitions` may omit pairs; missing maps are composed along cover
    /// edges and f_vv defaults to the identity. Given maps are kept verbatim so
    /// that [`check_coherence`] can report on them.
    pub fn new(
        nodes: Vec<String>,
        cover: Vec<(usize, usize)>,
        domains: Vec<Vec<String>>,
        transitions: BTreeMap<(usize, usize), Vec<usize>>,
        membership: Vec<Vec<(usize, usize)>>,
    ) -> Result<SetKripkeModel> {
        let n = nodes.len();
        if n == 0 {
            return Err(Error::InvalidModel("no nodes".into()));
        }
        let distinct: BTreeSet<&String> = nodes.iter().collect();
        if distinct.len() != n {
            return Err(Error::InvalidModel("duplicate node names".into()));
        }
        if domains.len() != n || membership.len() != n {
            return Err(Error::InvalidModel(
                "one domain and membership list per node expected".into(),
            ));
        }
        if let Some(&(a, b)) = cover.iter().find(|(a, b)| *a >= n || *b >= n) {
            return Err(Error::InvalidModel(format!(
                "cover edge ({a},{b}) out of range"
            )));
        }
        let leq = closure(n, &cover)?;
        for (v, d) in domains.iter().enumerate() {
            if d.is_empty() {
                return Err(Error::InvalidModel(format!(
                    "domain of `{}` is empty",
                    nodes[v]
                )));
            }
            if d.iter().collect::<BTreeSet<_>>().len() != d.len() {
                return Err(Error::InvalidModel(format!(
                    "duplicate element names at `{}`",
                    nodes[v]
                )));
            }
        }
        let mut trans: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
        for (&(v, w), f) in &transitions {
            if v >= n || w >= n || !leq[v][w] {
                return Err(Error::InvalidModel(format!(
                    "transition ({v},{w}) is not along the order"
                )));
            }
            if f.len() != domains[v].len() || f.iter().any(|&b| b >= domains[w].len()) {
                return Err(Error::InvalidModel(format!(
                    "transition `{}->{}` is not a total map between the domains",
                    nodes[v], nodes[w]
                )));
            }
            trans[v][w] = Some(f.clone());
        }
        for v in 0..n {
            if trans[v][v].is_none() {
                trans[v][v] = Some((0..domains[v].len()).collect());
            }
        }
        let mut progress = true;
        while progress {
            progress = false;
            for v in 0..n {
                for w in 0..n {
                    if !leq[v][w] || trans[v][w].is_some() {
                        continue;
                    }
                    let via = cover.iter().find_map(|&(a, x)| {
                        if a != v || !leq[x][w] {
                            return None;
                        }
                        match (&trans[v][x], &trans[x][w]) {
                            (Some(f), Some(g)) => Some(f.iter().map(|&d| g[d]).collect::<Vec<_>>()),
                            _ => None,
                        }
                    });
                    if let Some(f) = via {
                        trans[v][w] = Some(f);
                        progress = true;
                    }
                }
            }
        }
        for v in 0..n {
            for w in 0..n {
                if leq[v][w] && trans[v][w].is_none() {
                    return Err(Error::InvalidModel(format!(
                        "no transition from `{}` to `{}`",
                        nodes[v], nodes[w]
                    )));
                }
            }
        }
        let mut members = Vec::with_capacity(n);
        for (v, pairs) in membership.iter().enumerate() {
            let size = domains[v].len();
            let mut ms = vec![Vec::new(); size];
            for &(a, b) in pairs {
                if a >= size || b >= size {
                    return Err(Error::InvalidModel(format!(
                        "membership pair out of range at `{}`",
                        nodes[v]
                    )));
                }
                ms[b].push(a);
            }
            for m in &mut ms {
                m.sort_unstable();
                m.dedup();
            }
            members.push(ms);
        }
        let ranks = members
            .iter()
            .map(|ms| {
                membership_ranks(ms)
                    .ok()
                    .map(|r| r.into_iter().map(|x| x + 1).collect())
            })
            .collect();
        let height = heights(n, &leq);
        let up = (0..n)
            .map(|v| {
                let mut ws: Vec<usize> = (0..n).filter(|&w| leq[v][w]).collect();
                ws.sort_by_key(|&w| (height[w], w));
                ws
            })
            .collect();
        Ok(SetKripkeModel {
            nodes,
            cover,
            leq,
            up,
            domains,
            trans,
            members,
            ranks,
        })
    }

    /// The same model with its nodes renamed.
    pub fn renamed(&self, names: Vec<String>) -> Result<SetKripkeModel> {
        if names.len() != self.len() {
            return Err(Error::InvalidModel("one name per node expected".into()));
        }
        SetKripkeModel::new(
            names,
            self.cover.clone(),
            self.domains.clone(),
            self.transitions(),
            (0..self.len()).map(|v| self.membership(v)).collect(),
        )
    }

    /// A one-node model named `node` holding a classical model.
    pub fn from_classical(m: &ClassicalSetModel, node: &str) -> Result<SetKripkeModel> {
        SetKripkeModel::new(
            vec![node.to_string()],
            vec![],
            vec![m.names().to_vec()],
            BTreeMap::new(),
            vec![m.edges()],
        )
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn cover(&self) -> &[(usize, usize)] {
        &self.cover
    }

    pub fn node(&self, name: &str) -> Result<usize> {
        self.nodes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn leq(&self, v: usize, w: usize) -> bool {
        self.leq[v][w]
    }

    /// Nodes w ≥ v, maximal ones first.
    pub fn above(&self, v: usize) -> &[usize] {
        &self.up[v]
    }

    /// Nodes with nothing below them.
    pub fn roots(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&v| (0..self.len()).all(|u| u == v || !self.leq[u][v]))
            .collect()
    }

    pub fn root(&self) -> Option<usize> {
        (0..self.len()).find(|&v| self.up[v].len() == self.len())
    }

    pub fn domain(&self, v: usize) -> &[String] {
        &self.domains[v]
    }

    pub fn element(&self, v: usize, name: &str) -> Option<usize> {
        self.domains[v].iter().position(|n| n == name)
    }

    /// f_vw; panics unless v ≤ w.
    pub fn transition(&self, v: usize, w: usize) -> &[usize] {
        self.trans[v][w]
            .as_deref()
            .expect("transition along the order")
    }

    pub fn members(&self, v: usize, b: usize) -> &[usize] {
        &self.members[v][b]
    }

    pub fn is_member(&self, v: usize, a: usize, b: usize) -> bool {
        self.members[v][b].binary_search(&a).is_ok()
    }

    pub fn membership(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (b, ms) in self.members[v].iter().enumerate() {
            out.extend(ms.iter().map(|&a| (a, b)));
        }
        out.sort_unstable();
        out
    }

    /// Stratification rank at a node: 1 for elements without members, else one
    /// more than the largest member rank. `None` if E_v has a cycle.
    pub fn rank(&self, v: usize, a: usize) -> Option<usize> {
        self.ranks[v].as_ref().map(|r| r[a])
    }

    pub fn well_founded(&self, v: usize) -> bool {
        self.ranks[v].is_some()
    }

    /// All f_vw for v ≤ w in node order.
    pub fn transitions(&self) -> BTreeMap<(usize, usize), Vec<usize>> {
        let mut out = BTreeMap::new();
        for v in 0..self.len() {
            for w in 0..self.len() {
                if let Some(f) = &self.trans[v][w] {
                    out.insert((v, w), f.clone());
                }
            }
        }
        out
    }

    /// Transitions for v < w are all listed; f_vv only when it is not the identity.
    pub fn to_json(&self) -> SetModelJson {
        let mut transitions = BTreeMap::new();
        for ((v, w), f) in self.transitions() {
            if v == w && f.iter().enumerate().all(|(i, &j)| i == j) {
                continue;
            }
            let map = f
                .iter()
                .enumerate()
                .map(|(a, &b)| (self.domains[v][a].clone(), self.domains[w][b].clone()))
                .collect();
            transitions.insert(format!("{}->{}", self.nodes[v], self.nodes[w]), map);
        }
        SetModelJson {
            nodes: self.nodes.clone(),
            cover: self
                .cover
                .iter()
                .map(|&(a, b)| (self.nodes[a].clone(), self.nodes[b].clone()))
                .collect(),
            domains: (0..self.len())
                .map(|v| (self.nodes[v].clone(), self.domains[v].clone()))
                .collect(),
            transitions,
            membership: (0..self.len())
                .map(|v| {
                    let pairs = self
                        .membership(v)
                        .into_iter()
                        .map(|(a, b)| (self.domains[v][a].clone(), self.domains[v][b].clone()))
                        .collect();
                    (self.nodes[v].clone(), pairs)
                })
                .collect(),
        }
    }

    pub fn from_json(j: &SetModelJson) -> Result<SetKripkeModel> {
        let index: BTreeMap<&str, usize> = j
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let node = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownNode(name.to_string()))
        };
        let cover = j
            .cover
            .iter()
            .map(|(a, b)| Ok((node(a)?, node(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut domains = Vec::new();
        for n in &j.nodes {
            domains.push(
                j.domains
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Error::InvalidModel(format!("no domain for `{n}`")))?,
            );
        }
        for k in j.domains.keys().chain(j.membership.keys()) {
            node(k)?;
        }
        let elem = |v: usize, a: &str| {
            domains[v].iter().position(|x| x == a).ok_or_else(|| {
                Error::InvalidModel(format!("`{a}` is not in the domain of `{}`", j.nodes[v]))
            })
        };
        let mut transitions = BTreeMap::new();
        for (key, map) in &j.transitions {
            let (a, b) = key.split_once("->").ok_or_else(|| {
                Error::InvalidModel(format!("transition key `{key}` is not `v->w`"))
            })?;
            let (v, w) = (node(a.trim())?, node(b.trim())?);
            let mut f = vec![usize::MAX; domains[v].len()];
            for (x, y) in map {
                f[elem(v, x)?] = elem(w, y)?;
            }
            if let Some(i) = f.iter().position(|&t| t == usize::MAX) {
                return Err(Error::InvalidModel(format!(
                    "transition `{key}` does not map `{}`",
                    domains[v][i]
                )));
            }
            transitions.insert((v, w), f);
        }
        let mut membership = vec![Vec::new(); j.nodes.len()];
        for (n, pairs) in &j.membership {
            let v = node(n)?;
            for (a, b) in pairs {
                membership[v].push((elem(v, a)?, elem(v, b)?));
            }
        }
        SetKripkeModel::new(j.nodes.clone(), cover, domains, transitions, membership)
    }
}

fn heights(n: usize, leq: &[Vec<bool>]) -> Vec<usize> {
    // Height counted downward from maximal nodes.
    let mut h = vec![0usize; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse((0..n).filter(|&w| leq[w][v]).count()));
    for &v in &order {
        for w in 0..n {
            if w != v && leq[v][w] {
                h[v] = h[v].max(h[w] + 1);
            }
        }
    }
    h
}

fn check_env(m: &SetKripkeModel, v: usize, env: &Env) -> Result<()> {
    if v >= m.len() {
        return Err(Error::UnknownNode(v.to_string()));
    }
    for (x, &d) in env {
        if d >= m.domains[v].len() {
            return Err(Error::InvalidModel(format!(
                "`{x}` bound to element {d} outside the domain of `{}`",
                m.nodes[v]
            )));
        }
    }
    Ok(())
}

/// Intuitionistic forcing at node v.
pub fn force_set(m: &SetKripkeModel, v: usize, f: &Formula, env: &Env) -> Result<bool> {
    f.check_lang(Lang::SetTheoretic)?;
    check_env(m, v, env)?;
    let mut stack: Vec<(&str, usize)> = env.iter().map(|(k, d)| (k.as_str(), *d)).collect();
    force_in(m, v, f, &mut stack)
}

pub(super) fn force_at<'a>(
    m: &SetKripkeModel,
    v: usize,
    f: &'a Formula,
    stack: &mut Vec<(&'a str, usize)>,
) -> Result<bool> {
    force_in(m, v, f, stack)
}

fn lookup(stack: &[(&str, usize)], x: &str) -> Result<usize> {
    stack
        .iter()
        .rev()
        .find(|(n, _)| *n == x)
        .map(|(_, d)| *d)
        .ok_or_else(|| Error::Unbound(x.to_string()))
}

fn transport<'a>(
    m: &SetKripkeModel,
    v: usize,
    w: usize,
    stack: &[(&'a str, usize)],
) -> Vec<(&'a str, usize)> {
    let f = m.transition(v, w);
    stack.iter().map(|&(x, d)| (x, f[d])).collect()
}

/// `x ∈ t` with t a variable other than x.
fn bound_of<'a>(x: &str, guard: &'a Formula) -> Option<&'a str> {
    match guard {
        Formula::Atom(p, args) if p == IN && args[0] == x && args[1] != x => Some(&args[1]),
        _ => None,
    }
}

fn force_in<'a>(
    m: &SetKripkeModel,
    v: usize,
    f: &'a Formula,
    stack: &mut Vec<(&'a str, usize)>,
) -> Result<bool> {
    Ok(match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Atom(p, args) => {
            let a = lookup(stack, &args[0])?;
            let b = lookup(stack, &args[1])?;
            if p == IN {
                m.is_member(v, a, b)
            } else {
                debug_assert_eq!(p, EQ);
                a == b
            }
        }
        Formula::And(a, b) => force_in(m, v, a, stack)? && force_in(m, v, b, stack)?,
        Formula::Or(a, b) => force_in(m, v, a, stack)? || force_in(m, v, b, stack)?,
        Formula::Not(a) => {
            for &w in m.above(v) {
                let mut s = transport(m, v, w, stack);
                if force_in(m, w, a, &mut s)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Implies(a, b) => {
            for &w in m.above(v) {
                let mut s = transport(m, v, w, stack);
                if force_in(m, w, a, &mut s)? && !force_in(m, w, b, &mut s)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Forall(x, body) => {
            if let Formula::Implies(g, rest) = body.as_ref() {
                if let Some(t) = bound_of(x, g) {
                    // Only members of t can satisfy the guard at any later node.
                    let t0 = lookup(stack, t)?;
                    for &w in m.above(v) {
                        let mut s = transport(m, v, w, stack);
                        let tw = m.transition(v, w)[t0];
                        for &d in m.members(w, tw) {
                            s.push((x, d));
                            let r = force_in(m, w, rest, &mut s);
                            s.pop();
                            if !r? {
                                return Ok(false);
                            }
                        }
                    }
                    return Ok(true);
                }
            }
            for &w in m.above(v) {
                let mut s = transport(m, v, w, stack);
                for d in 0..m.domains[w].len() {
                    s.push((x, d));
                    let r = force_in(m, w, body, &mut s);
                    s.pop();
                    if !r? {
                        return Ok(false);
                    }
                }
            }
            true
        }
        Formula::Exists(x, body) => {
            if let Formula::And(g, rest) = body.as_ref() {
                if let Some(t) = bound_of(x, g) {
                    let t0 = lookup(stack, t)?;
                    for &d in m.members(v, t0) {
                        stack.push((x, d));
                        let r = force_in(m, v, rest, stack);
                        stack.pop();
                        if r? {
                            return Ok(true);
                        }
                    }
                    return Ok(false);
                }
            }
            for d in 0..m.domains[v].len() {
                stack.push((x, d));
                let r = force_in(m, v, body, stack);
                stack.pop();
                if r? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

/// Functoriality and atomic persistence violations.
pub fn check_coherence(m: &SetKripkeModel) -> Vec<String> {
    let mut out = Vec::new();
    let n = m.len();
    for v in 0..n {
        let f = m.transition(v, v);
        if f.iter().enumerate().any(|(i, &j)| i != j) {
            out.push(format!(
                "functoriality: f_{0}{0} is not the identity",
                m.nodes[v]
            ));
        }
    }
    for u in 0..n {
        for v in 0..n {
            if u == v || !m.leq[u][v] {
                continue;
            }
            for w in 0..n {
                if w == v || !m.leq[v][w] {
                    continue;
                }
                let (fuv, fvw, fuw) = (m.transition(u, v), m.transition(v, w), m.transition(u, w));
                if let Some(a) = (0..fuv.len()).find(|&a| fvw[fuv[a]] != fuw[a]) {
                    out.push(format!(
                        "functoriality: f_{v1}{w1} after f_{u1}{v1} differs from f_{u1}{w1} at `{e}`",
                        u1 = m.nodes[u],
                        v1 = m.nodes[v],
                        w1 = m.nodes[w],
                        e = m.domains[u][a]
                    ));
                }
            }
        }
    }
    for v in 0..n {
        for w in 0..n {
            if v == w || !m.leq[v][w] {
                continue;
            }
            let f = m.transition(v, w);
            for (a, b) in m.membership(v) {
                if !m.is_member(w, f[a], f[b]) {
                    out.push(format!(
                        "persistence: `{}` E `{}` at `{}` but not their images at `{}`",
                        m.domains[v][a], m.domains[v][b], m.nodes[v], m.nodes[w]
                    ));
                }
            }
        }
    }
    out
}

/// Side-by-side copy of the given models; node `v` of model i becomes `i.v`.
pub fn disjoint_union(ms: &[SetKripkeModel]) -> Result<SetKripkeModel> {
    if ms.is_empty() {
        return Err(Error::Precondition("disjoint union of no models".into()));
    }
    let mut nodes = Vec::new();
    let mut cover = Vec::new();
    let mut domains = Vec::new();
    let mut transitions = BTreeMap::new();
    let mut membership = Vec::new();
    for (i, m) in ms.iter().enumerate() {
        let off = nodes.len();
        nodes.extend(m.nodes.iter().map(|v| format!("{i}.{v}")));
        cover.extend(m.cover.iter().map(|&(a, b)| (a + off, b + off)));
        domains.extend(m.domains.iter().cloned());
        for ((v, w), f) in m.transitions() {
            transitions.insert((v + off, w + off), f);
        }
        membership.extend((0..m.len()).map(|v| m.membership(v)));
    }
    SetKripkeModel::new(nodes, cover, domains, transitions, membership)
}
