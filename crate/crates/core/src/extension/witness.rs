//! Witnesses at the new root for the extensible axioms.

use std::collections::BTreeSet;

use super::Extension;
use crate::error::{Error, Result};
use crate::formula::{Formula, Lang};
use crate::kripke_set::axioms::{function, subset, successor};
use crate::kripke_set::{force_set, Axiom, Env};

impl Extension {
    /// The element at old node v whose members are exactly `members`.
    fn node_set(&self, v: usize, members: &BTreeSet<usize>, what: &str) -> Result<usize> {
        let m = self.model();
        (0..m.domain(v).len())
            .find(|&d| m.members(v, d).iter().copied().eq(members.iter().copied()))
            .ok_or_else(|| {
                Error::Precondition(format!("{what} does not exist at `{}`", m.nodes()[v]))
            })
    }

    fn value(&self, x: usize, v: usize) -> usize {
        self.elements()[x].upper[v]
    }

    /// Node-level values computed from a member set per node.
    fn node_values<F>(&self, what: &str, mut members_at: F) -> Result<Vec<usize>>
    where
        F: FnMut(usize) -> Result<BTreeSet<usize>>,
    {
        (0..self.base().len())
            .map(|v| {
                let ms = members_at(v)?;
                self.node_set(v, &ms, what)
            })
            .collect()
    }

    fn check_root(&self, x: usize) -> Result<()> {
        if x >= self.elements().len() {
            return Err(Error::InvalidModel(format!("no root element {x}")));
        }
        Ok(())
    }

    fn root_filter(
        &self,
        f: &Formula,
        var: &str,
        env: &[(&str, usize)],
        pool: &[usize],
    ) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for &d in pool {
            let mut e: Vec<(&str, usize)> = env.to_vec();
            e.push((var, d));
            if self.forces(f, &e)? {
                out.push(d);
            }
        }
        Ok(out)
    }

    fn node_filter(
        &self,
        v: usize,
        f: &Formula,
        var: &str,
        env: &[(&str, usize)],
        pool: &[usize],
    ) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for &d in pool {
            let mut e: Env = env
                .iter()
                .map(|&(x, a)| (x.to_string(), self.value(a, v)))
                .collect();
            e.insert(var.to_string(), d);
            if force_set(self.model(), v, f, &e)? {
                out.insert(d);
            }
        }
        Ok(out)
    }

    /// The root set with the given root members whose node values are the
    /// sets of the members' node values.
    pub fn collect(&mut self, members: &[usize]) -> Result<usize> {
        for &y in members {
            self.check_root(y)?;
        }
        let upper = self.node_values("the set of images", |v| {
            Ok(members.iter().map(|&y| self.value(y, v)).collect())
        })?;
        self.insert(members.to_vec(), upper)
    }

    pub fn witness_empty(&mut self) -> Result<usize> {
        let upper = self.node_values("an empty set", |_| Ok(BTreeSet::new()))?;
        self.insert(vec![], upper)
    }

    pub fn witness_pair(&mut self, x: usize, y: usize) -> Result<usize> {
        self.check_root(x)?;
        self.check_root(y)?;
        let upper = self.node_values("the pair", |v| {
            Ok([self.value(x, v), self.value(y, v)].into())
        })?;
        self.insert(vec![x, y], upper)
    }

    pub fn witness_union(&mut self, x: usize) -> Result<usize> {
        self.check_root(x)?;
        let root: Vec<usize> = self.elements()[x]
            .root_members
            .iter()
            .flat_map(|&y| self.elements()[y].root_members.clone())
            .collect();
        let m = self.model().clone();
        let upper = self.node_values("the union", |v| {
            Ok(m.members(v, self.value(x, v))
                .iter()
                .flat_map(|&y| m.members(v, y).iter().copied())
                .collect())
        })?;
        self.insert(root, upper)
    }

    /// Separates from x with φ, whose free variable `z` is the candidate and
    /// whose other free variables are bound by `params` (root elements).
    pub fn witness_separation(
        &mut self,
        x: usize,
        phi: &Formula,
        params: &[(&str, usize)],
    ) -> Result<usize> {
        self.check_root(x)?;
        phi.check_lang(Lang::SetTheoretic)?;
        for v in phi.free_vars() {
            if v != "z" && !params.iter().any(|(p, _)| *p == v) {
                return Err(Error::Unbound(v));
            }
        }
        let pool = self.elements()[x].root_members.clone();
        let root = self.root_filter(phi, "z", params, &pool)?;
        let m = self.model().clone();
        let upper = self.node_values("the separated set", |v| {
            self.node_filter(v, phi, "z", params, m.members(v, self.value(x, v)))
        })?;
        self.insert(root, upper)
    }

    pub fn witness_power(&mut self, x: usize) -> Result<usize> {
        self.check_root(x)?;
        let sub = subset("w", "x", "u");
        let all: Vec<usize> = (0..self.elements().len()).collect();
        let root = self.root_filter(&sub, "w", &[("x", x)], &all)?;
        let m = self.model().clone();
        let upper = self.node_values("the power set", |v| {
            let pool: Vec<usize> = (0..m.domain(v).len()).collect();
            self.node_filter(v, &sub, "w", &[("x", x)], &pool)
        })?;
        self.insert(root, upper)
    }

    /// Replacement along φ(y, z), which must be functional on x at the root.
    pub fn witness_replacement(&mut self, x: usize, phi: &Formula) -> Result<usize> {
        self.check_root(x)?;
        phi.check_lang(Lang::SetTheoretic)?;
        if let Some(v) = phi.free_vars().into_iter().find(|v| v != "y" && v != "z") {
            return Err(Error::Unbound(v));
        }
        let shape = Axiom::Replacement(phi.clone()).shape();
        let xvar = shape.params[0].clone();
        let guard = shape.guard.expect("replacement has a guard");
        if !self.forces(&guard, &[(&xvar, x)])? {
            let unique = match &guard {
                Formula::Forall(_, b) => match b.as_ref() {
                    Formula::Implies(_, u) => u.as_ref().clone(),
                    _ => unreachable!(),
                },
                _ => unreachable!(),
            };
            let bad = self.elements()[x]
                .root_members
                .iter()
                .find(|&&y| !self.forces(&unique, &[("y", y)]).unwrap_or(false))
                .map(|&y| self.model().domain(self.root())[y].clone())
                .unwrap_or_else(|| "a later node".into());
            return Err(Error::Precondition(format!(
                "`{phi}` is not functional on the set at {bad}"
            )));
        }
        let all: Vec<usize> = (0..self.elements().len()).collect();
        let mut root = Vec::new();
        for &y in &self.elements()[x].root_members {
            root.extend(self.root_filter(phi, "z", &[("y", y)], &all)?);
        }
        let m = self.model().clone();
        let upper = self.node_values("the image set", |v| {
            let pool: Vec<usize> = (0..m.domain(v).len()).collect();
            let mut out = BTreeSet::new();
            for &y in m.members(v, self.value(x, v)) {
                for &z in &pool {
                    let e = Env::from([("y".to_string(), y), ("z".to_string(), z)]);
                    if force_set(&m, v, phi, &e)? {
                        out.insert(z);
                    }
                }
            }
            Ok(out)
        })?;
        self.insert(root, upper)
    }

    /// The ordered pair {{a},{a,b}} at the root.
    pub fn witness_ordered_pair(&mut self, a: usize, b: usize) -> Result<usize> {
        let s1 = self.witness_pair(a, a)?;
        let s2 = self.witness_pair(a, b)?;
        self.witness_pair(s1, s2)
    }

    /// Builds the graph of every map from the root members of a to those of b,
    /// then collects all root elements that are functions from a to b.
    pub fn witness_exponentiation(&mut self, a: usize, b: usize) -> Result<usize> {
        self.check_root(a)?;
        self.check_root(b)?;
        let dom = self.elements()[a].root_members.clone();
        let cod = self.elements()[b].root_members.clone();
        if !dom.is_empty() && cod.is_empty() {
            // No maps; only the empty set can be the graph of none.
        } else {
            let total = (cod.len().max(1) as u64)
                .checked_pow(dom.len() as u32)
                .unwrap_or(u64::MAX);
            if total > 64 {
                return Err(Error::Overflow(format!("{total} functions to build")));
            }
            for code in 0..total {
                let mut c = code;
                let mut pairs = Vec::new();
                for &y in &dom {
                    let img = cod[(c % cod.len() as u64) as usize];
                    c /= cod.len() as u64;
                    pairs.push(self.witness_ordered_pair(y, img)?);
                }
                self.collect(&pairs)?;
            }
        }
        let fun = function("w", "x", "y");
        let all: Vec<usize> = (0..self.elements().len()).collect();
        let root = self.root_filter(&fun, "w", &[("x", a), ("y", b)], &all)?;
        let m = self.model().clone();
        let upper = self.node_values("the function set", |v| {
            let pool: Vec<usize> = (0..m.domain(v).len()).collect();
            self.node_filter(v, &fun, "w", &[("x", a), ("y", b)], &pool)
        })?;
        self.insert(root, upper)
    }

    /// The von Neumann naturals 0 .. n_max at the root. Only a finite initial
    /// part of the least inductive set can exist in a finite model.
    pub fn witness_strong_infinity(&mut self, n_max: usize) -> Result<Vec<usize>> {
        let mut chain = vec![self.witness_empty()?];
        for _ in 0..n_max {
            let k = *chain.last().unwrap();
            let mut root = self.elements()[k].root_members.clone();
            root.push(k);
            let m = self.model().clone();
            let upper = self.node_values("the successor", |v| {
                let kv = self.value(k, v);
                let mut s: BTreeSet<usize> = m.members(v, kv).iter().copied().collect();
                s.insert(kv);
                Ok(s)
            })?;
            let next = self.insert(root, upper)?;
            if !self.forces(&successor("a", "b"), &[("a", k), ("b", next)])? {
                return Err(Error::Inconsistency(
                    "successor witness not forced at the root".into(),
                ));
            }
            chain.push(next);
        }
        Ok(chain)
    }

    /// Whether the root forces the body of `axiom` with its outer variables
    /// bound to `params` and its witness variable bound to `witness`.
    pub fn verify_witness(&self, axiom: &Axiom, params: &[usize], witness: usize) -> Result<bool> {
        let shape = axiom.shape();
        let w = shape
            .witness
            .as_deref()
            .ok_or_else(|| Error::Unsupported(format!("{axiom} has no witness")))?;
        if params.len() != shape.params.len() {
            return Err(Error::Precondition(format!(
                "{axiom} takes {} parameters, got {}",
                shape.params.len(),
                params.len()
            )));
        }
        let mut env: Vec<(&str, usize)> = shape
            .params
            .iter()
            .map(String::as_str)
            .zip(params.iter().copied())
            .collect();
        env.push((w, witness));
        self.forces(&shape.body, &env)
    }
}
