//! Formula corpora: exhaustive enumeration by size and seeded random generation.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{self, Formula};
use crate::kripke_prop::PropKripkeModel;
use crate::kripke_set::SetKripkeModel;

/// Every propositional formula over `letters`, `true` and `false` built with
/// `~ & | ->`, grouped by size: `out[s]` holds the formulas with s nodes.
pub fn formulas_by_size(letters: &[&str], max_size: usize) -> Vec<Vec<Formula>> {
    let mut out: Vec<Vec<Formula>> = vec![Vec::new(); max_size + 1];
    if max_size == 0 {
        return out;
    }
    out[1] = letters
        .iter()
        .map(|p| formula::atom(p))
        .chain([Formula::Top, Formula::Bot])
        .collect();
    for s in 2..=max_size {
        let mut level: Vec<Formula> = out[s - 1].iter().cloned().map(formula::not).collect();
        for l in 1..s - 1 {
            let r = s - 1 - l;
            for a in &out[l] {
                for b in &out[r] {
                    level.push(formula::and(a.clone(), b.clone()));
                    level.push(formula::or(a.clone(), b.clone()));
                    level.push(formula::implies(a.clone(), b.clone()));
                }
            }
        }
        out[s] = level;
    }
    out
}

/// Calls `visit` on every formula of exactly `size` nodes, building from the
/// smaller levels in `smaller` without storing the result.
pub fn for_each_of_size(smaller: &[Vec<Formula>], size: usize, mut visit: impl FnMut(Formula)) {
    for a in &smaller[size - 1] {
        visit(formula::not(a.clone()));
    }
    for l in 1..size - 1 {
        let r = size - 1 - l;
        for a in &smaller[l] {
            for b in &smaller[r] {
                visit(formula::and(a.clone(), b.clone()));
                visit(formula::or(a.clone(), b.clone()));
                visit(formula::implies(a.clone(), b.clone()));
            }
        }
    }
}

/// Random propositional formula with at most `max_size` nodes.
pub fn random_prop<R: Rng>(rng: &mut R, letters: &[&str], max_size: usize) -> Formula {
    let size = rng.gen_range(1..=max_size.max(1));
    random_prop_exact(rng, letters, size)
}

fn random_prop_exact<R: Rng>(rng: &mut R, letters: &[&str], size: usize) -> Formula {
    if size <= 1 {
        return match rng.gen_range(0..letters.len() + 2) {
            i if i < letters.len() => formula::atom(letters[i]),
            i if i == letters.len() => Formula::Top,
            _ => Formula::Bot,
        };
    }
    if size == 2 || rng.gen_bool(0.2) {
        return formula::not(random_prop_exact(rng, letters, size - 1));
    }
    let l = rng.gen_range(1..size - 1);
    let a = random_prop_exact(rng, letters, l);
    let b = random_prop_exact(rng, letters, size - 1 - l);
    match rng.gen_range(0..3) {
        0 => formula::and(a, b),
        1 => formula::or(a, b),
        _ => formula::implies(a, b),
    }
}

/// Random finite poset on `n` nodes (edges only from lower to higher index)
/// with a random monotone valuation.
pub fn random_prop_model<R: Rng>(rng: &mut R, n: usize, letters: &[&str]) -> PropKripkeModel {
    let mut cover = Vec::new();
    for w in 1..n {
        for v in 0..w {
            if rng.gen_bool(0.35) {
                cover.push((v, w));
            }
        }
    }
    let names: Vec<String> = (0..n).map(|i| format!("w{i}")).collect();
    let skeleton = PropKripkeModel::new(names.clone(), cover.clone(), vec![BTreeSet::new(); n])
        .expect("acyclic");
    let mut valuation = vec![BTreeSet::new(); n];
    for p in letters {
        // pick generators and close upwards
        for v in 0..n {
            if rng.gen_bool(0.3) {
                for w in skeleton.above(v) {
                    valuation[w].insert(p.to_string());
                }
            }
        }
    }
    PropKripkeModel::new(names, cover, valuation).expect("monotone by construction")
}

/// Random formula of the membership language with at most `max_size` nodes.
/// Free variables come from `free`; quantifiers bind `u0`, `u1`, ...
pub fn random_set_formula<R: Rng>(rng: &mut R, free: &[&str], max_size: usize) -> Formula {
    let size = rng.gen_range(1..=max_size.max(1));
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    random_set_exact(rng, &mut scope, size)
}

fn random_set_exact<R: Rng>(rng: &mut R, scope: &mut Vec<String>, size: usize) -> Formula {
    if size <= 1 || (size == 2 && scope.is_empty()) {
        if scope.is_empty() {
            return if rng.gen_bool(0.5) {
                Formula::Top
            } else {
                Formula::Bot
            };
        }
        let x = pick(rng, scope).clone();
        let y = pick(rng, scope).clone();
        return if rng.gen_bool(0.7) {
            formula::mem(&x, &y)
        } else {
            formula::eq(&x, &y)
        };
    }
    let quantify = rng.gen_bool(0.35) || scope.is_empty();
    if quantify {
        let v = format!("u{}", scope.iter().filter(|s| s.starts_with('u')).count());
        scope.push(v.clone());
        let body = random_set_exact(rng, scope, size - 1);
        scope.pop();
        return if rng.gen_bool(0.5) {
            formula::forall(&v, body)
        } else {
            formula::exists(&v, body)
        };
    }
    if size == 2 || rng.gen_bool(0.2) {
        return formula::not(random_set_exact(rng, scope, size - 1));
    }
    let l = rng.gen_range(1..size - 1);
    let a = random_set_exact(rng, scope, l);
    let b = random_set_exact(rng, scope, size - 1 - l);
    match rng.gen_range(0..3) {
        0 => formula::and(a, b),
        1 => formula::or(a, b),
        _ => formula::implies(a, b),
    }
}

/// Random tree-shaped set Kripke model, coherent by construction: each child
/// gets a random image of its parent's domain, the images of the parent's
/// membership pairs, and some extra pairs of its own.
pub fn random_set_model<R: Rng>(
    rng: &mut R,
    max_nodes: usize,
    max_domain: usize,
) -> SetKripkeModel {
    let n = rng.gen_range(1..=max_nodes.max(1));
    let mut cover = Vec::new();
    let mut domains: Vec<Vec<String>> = Vec::new();
    let mut transitions = BTreeMap::new();
    let mut membership: Vec<Vec<(usize, usize)>> = Vec::new();
    for w in 0..n {
        let size = rng.gen_range(1..=max_domain.max(1));
        domains.push((0..size).map(|i| format!("d{i}")).collect());
        let mut pairs = Vec::new();
        if w > 0 {
            let parent = rng.gen_range(0..w);
            cover.push((parent, w));
            let f: Vec<usize> = (0..domains[parent].len())
                .map(|_| rng.gen_range(0..size))
                .collect();
            pairs.extend(
                membership[parent]
                    .iter()
                    .map(|&(a, b): &(usize, usize)| (f[a], f[b])),
            );
            transitions.insert((parent, w), f);
        }
        for a in 0..size {
            for b in 0..size {
                if rng.gen_bool(0.25) {
                    pairs.push((a, b));
                }
            }
        }
        membership.push(pairs);
    }
    let names = (0..n).map(|i| format!("k{i}")).collect();
    SetKripkeModel::new(names, cover, domains, transitions, membership).expect("tree-shaped model")
}

pub fn pick<'a, R: Rng, T>(rng: &mut R, xs: &'a [T]) -> &'a T {
    xs.choose(rng).expect("nonempty choice")
}
