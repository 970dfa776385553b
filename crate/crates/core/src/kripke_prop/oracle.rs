//! Exhaustive finite-tree validity oracle.
//!
//! Instead of listing trees and valuations, it tabulates which sets of
//! subformulas can be forced at the root of some tree with exactly n nodes.
//! The root's set depends only on the atoms true at the root and on the
//! intersection, over its children, of the atoms and implications they force.
//! Covering every n up to a bound is equivalent to checking every tree of at
//! most that many nodes under every monotone valuation.

use std::collections::BTreeMap;
use std::rc::Rc;

use rustc_hash::FxHashMap as HashMap;

use super::PropKripkeModel;
use crate::error::{Error, Result};
use crate::formula::{Formula, Lang};

#[derive(Clone, Copy)]
enum Sub {
    Atom,
    Top,
    Bot,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
}

struct Witness {
    atoms: u64,
    children: Vec<Rc<Witness>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    /// Forced at the root of every tree with at most this many nodes.
    ValidUpTo(usize),
    Refuted(PropKripkeModel),
}

/// Decides whether `f` holds at the root of every tree model with at most `max_nodes` nodes.
pub fn tree_oracle(f: &Formula, max_nodes: usize) -> Result<OracleVerdict> {
    f.check_lang(Lang::Propositional)?;
    let mut subs: Vec<Formula> = Vec::new();
    f.walk(&mut |g| subs.push(g.clone()));
    subs.sort_by_key(|g| g.size());
    subs.dedup();
    let mut index: BTreeMap<Formula, usize> = BTreeMap::new();
    let mut unique = Vec::new();
    for g in subs {
        if !index.contains_key(&g) {
            index.insert(g.clone(), unique.len());
            unique.push(g);
        }
    }
    if unique.len() > 64 {
        return Err(Error::Overflow(format!(
            "{} subformulas exceed the oracle's 64-bit types",
            unique.len()
        )));
    }
    let shape: Vec<Sub> = unique
        .iter()
        .map(|g| match g {
            Formula::Atom(..) => Sub::Atom,
            Formula::Top => Sub::Top,
            Formula::Bot => Sub::Bot,
            Formula::Not(a) => Sub::Not(index[&**a]),
            Formula::And(a, b) => Sub::And(index[&**a], index[&**b]),
            Formula::Or(a, b) => Sub::Or(index[&**a], index[&**b]),
            Formula::Implies(a, b) => Sub::Imp(index[&**a], index[&**b]),
            Formula::Forall(..) | Formula::Exists(..) => unreachable!(),
        })
        .collect();
    let bit = |i: usize| 1u64 << i;
    let atom_mask = shape
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, Sub::Atom))
        .fold(0, |m, (i, _)| m | bit(i));
    let heritable = shape
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s, Sub::Atom | Sub::Not(_) | Sub::Imp(..)))
        .fold(0, |m, (i, _)| m | bit(i));
    let target = bit(index[f]);

    let root_type = |atoms: u64, inter: u64| -> u64 {
        let mut t = 0u64;
        for (i, s) in shape.iter().enumerate() {
            let has = |j: usize| t & bit(j) != 0;
            let on = match *s {
                Sub::Atom => atoms & bit(i) != 0,
                Sub::Top => true,
                Sub::Bot => false,
                Sub::Not(a) => !has(a) && inter & bit(i) != 0,
                Sub::And(a, b) => has(a) && has(b),
                Sub::Or(a, b) => has(a) || has(b),
                Sub::Imp(a, b) => (!has(a) || has(b)) && inter & bit(i) != 0,
            };
            if on {
                t |= bit(i);
            }
        }
        t
    };

    // roots[n]: type -> witness tree; forests[m]: intersection -> witness children.
    let mut roots: Vec<HashMap<u64, Rc<Witness>>> = vec![HashMap::default()];
    let mut forests: Vec<HashMap<u64, Vec<Rc<Witness>>>> =
        vec![std::iter::once((heritable, Vec::new())).collect()];
    for n in 1..=max_nodes {
        let mut level: HashMap<u64, Rc<Witness>> = HashMap::default();
        let mut keys: Vec<&u64> = forests[n - 1].keys().collect();
        keys.sort();
        for &inter in keys {
            let allowed = inter & atom_mask;
            let mut sub = allowed;
            loop {
                let t = root_type(sub, inter);
                level.entry(t).or_insert_with(|| {
                    Rc::new(Witness {
                        atoms: sub,
                        children: forests[n - 1][&inter].clone(),
                    })
                });
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & allowed;
            }
        }
        let mut bad: Vec<(&u64, &Rc<Witness>)> =
            level.iter().filter(|(t, _)| **t & target == 0).collect();
        bad.sort_by_key(|(t, _)| **t);
        if let Some((_, w)) = bad.first() {
            return Ok(OracleVerdict::Refuted(to_model(w, &unique, atom_mask)?));
        }
        roots.push(level);
        if n == max_nodes {
            break;
        }
        let mut forest: HashMap<u64, Vec<Rc<Witness>>> = HashMap::default();
        for k in 1..=n {
            for (t, w) in &roots[k] {
                for (i, ws) in &forests[n - k] {
                    let key = t & heritable & i;
                    forest.entry(key).or_insert_with(|| {
                        let mut v = ws.clone();
                        v.push(w.clone());
                        v
                    });
                }
            }
        }
        forests.push(forest);
    }
    Ok(OracleVerdict::ValidUpTo(max_nodes))
}

fn to_model(w: &Witness, subs: &[Formula], atom_mask: u64) -> Result<PropKripkeModel> {
    let mut valuation = Vec::new();
    let mut cover = Vec::new();
    fn walk(
        w: &Witness,
        parent: Option<usize>,
        subs: &[Formula],
        atom_mask: u64,
        valuation: &mut Vec<std::collections::BTreeSet<String>>,
        cover: &mut Vec<(usize, usize)>,
    ) {
        let me = valuation.len();
        valuation.push(
            (0..subs.len())
                .filter(|&i| atom_mask & w.atoms & (1 << i) != 0)
                .map(|i| match &subs[i] {
                    Formula::Atom(p, _) => p.clone(),
                    _ => unreachable!(),
                })
                .collect(),
        );
        if let Some(p) = parent {
            cover.push((p, me));
        }
        for c in &w.children {
            walk(c, Some(me), subs, atom_mask, valuation, cover);
        }
    }
    walk(w, None, subs, atom_mask, &mut valuation, &mut cover);
    let names = (0..valuation.len()).map(|i| format!("w{i}")).collect();
    PropKripkeModel::new(names, cover, valuation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kripke_prop::{force_prop, search_countermodel};
    use crate::parser::prop;

    #[test]
    fn agrees_with_direct_search_on_samples() {
        for s in [
            "p | ~p",
            "~~p -> p",
            "~p | ~~p",
            "(p -> q) | (q -> p)",
            "((p -> q) -> p) -> p",
            "~~(p | ~p)",
            "(~p -> q | r) -> (~p -> q) | (~p -> r)",
            "p -> p",
            "(p -> q | r) -> (p -> q) | (p -> r)",
        ] {
            let f = prop(s).unwrap();
            for n in 1..=5 {
                let direct = search_countermodel(&f, n).unwrap();
                match tree_oracle(&f, n).unwrap() {
                    OracleVerdict::ValidUpTo(_) => assert!(direct.is_none(), "{s} at {n}"),
                    OracleVerdict::Refuted(m) => {
                        assert!(direct.is_some(), "{s} at {n}");
                        assert!(m.len() <= n);
                        assert!(!force_prop(&m, 0, &f).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn weak_excluded_middle_needs_three_nodes() {
        let f = prop("~p | ~~p").unwrap();
        assert_eq!(tree_oracle(&f, 2).unwrap(), OracleVerdict::ValidUpTo(2));
        assert!(matches!(
            tree_oracle(&f, 3).unwrap(),
            OracleVerdict::Refuted(_)
        ));
    }

    #[test]
    fn linearity_needs_branching() {
        let f = prop("(p -> q) | (q -> p)").unwrap();
        assert_eq!(tree_oracle(&f, 2).unwrap(), OracleVerdict::ValidUpTo(2));
        match tree_oracle(&f, 3).unwrap() {
            OracleVerdict::Refuted(m) => assert_eq!(m.len(), 3),
            other => panic!("{other:?}"),
        }
    }
}
