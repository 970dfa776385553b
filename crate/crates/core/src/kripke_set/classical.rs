use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{self, Formula, Lang, EQ, IN};

/// A finite extensional, well-founded membership digraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalSetModel {
    names: Vec<String>,
    /// `members[b]`: the sorted list of a with a E b.
    members: Vec<Vec<usize>>,
}

/// Names and membership pairs are validated for range only; use
/// [`validate_classical`] for extensionality and well-foundedness.
impl ClassicalSetModel {
    pub fn new(names: Vec<String>, edges: &[(usize, usize)]) -> Result<ClassicalSetModel> {
        let n = names.len();
        if let Some(&(a, b)) = edges.iter().find(|(a, b)| *a >= n || *b >= n) {
            return Err(Error::InvalidModel(format!(
                "membership pair ({a},{b}) out of range"
            )));
        }
        let mut members = vec![Vec::new(); n];
        for &(a, b) in edges {
            members[b].push(a);
        }
        for m in &mut members {
            m.sort_unstable();
            m.dedup();
        }
        Ok(ClassicalSetModel { names, members })
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

    pub fn members(&self, b: usize) -> &[usize] {
        &self.members[b]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (b, ms) in self.members.iter().enumerate() {
            for &a in ms {
                out.push((a, b));
            }
        }
        out.sort_unstable();
        out
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Number of elements of the cumulative stage V_n.
pub fn vrank_size(n: usize) -> usize {
    (0..n).fold(0usize, |acc, _| 1usize << acc)
}

/// The stage V_n of the hereditarily finite sets, n ≤ 4. Element k is the set
/// whose members are the elements j with bit j of k set, and is named `k`.
pub fn vrank_model(n: usize) -> Result<ClassicalSetModel> {
    if n > 4 {
        return Err(Error::Overflow(format!("V_{n} has too many elements")));
    }
    hf_prefix(vrank_size(n))
}

/// The first `size` hereditarily finite sets in the same bit coding. Every
/// prefix is transitive, so this gives a well-founded extensional model of
/// any cardinality up to 16.
pub fn hf_prefix(size: usize) -> Result<ClassicalSetModel> {
    if size > 16 {
        return Err(Error::Overflow(format!(
            "{size} elements requested; at most 16 are supported"
        )));
    }
    let mut edges = Vec::new();
    for b in 0..size {
        for a in 0..size {
            if (b >> a) & 1 == 1 {
                edges.push((a, b));
            }
        }
    }
    ClassicalSetModel::new((0..size).map(|k| k.to_string()).collect(), &edges)
}

/// Lists extensionality and well-foundedness violations.
pub fn validate_classical(m: &ClassicalSetModel) -> Vec<String> {
    let mut out = Vec::new();
    for a in 0..m.len() {
        for b in a + 1..m.len() {
            if m.members[a] == m.members[b] {
                out.push(format!(
                    "extensionality: `{}` and `{}` have the same members",
                    m.names[a], m.names[b]
                ));
            }
        }
    }
    if let Err(cyclic) = membership_ranks(&m.members) {
        for c in cyclic {
            out.push(format!(
                "well-foundedness: `{}` lies on a membership cycle",
                m.names[c]
            ));
        }
    }
    out
}

/// Ranks along a membership relation (empty sets have rank 0), or the
/// elements that never get one because they sit on or above a cycle.
pub(crate) fn membership_ranks(
    members: &[Vec<usize>],
) -> std::result::Result<Vec<usize>, Vec<usize>> {
    let n = members.len();
    let mut rank: Vec<Option<usize>> = vec![None; n];
    let mut changed = true;
    while changed {
        changed = false;
        for b in 0..n {
            if rank[b].is_some() {
                continue;
            }
            let mut r = 0;
            let mut ready = true;
            for &a in &members[b] {
                match rank[a] {
                    Some(ra) => r = r.max(ra + 1),
                    None => {
                        ready = false;
                        break;
                    }
                }
            }
            if ready {
                rank[b] = Some(r);
                changed = true;
            }
        }
    }
    let stuck: Vec<usize> = (0..n).filter(|&b| rank[b].is_none()).collect();
    if stuck.is_empty() {
        Ok(rank.into_iter().map(|r| r.unwrap()).collect())
    } else {
        Err(stuck)
    }
}

/// Tarskian satisfaction with quantifiers over the whole domain.
pub fn eval_classical(
    m: &ClassicalSetModel,
    f: &Formula,
    env: &BTreeMap<String, usize>,
) -> Result<bool> {
    f.check_lang(Lang::SetTheoretic)?;
    for (x, &d) in env {
        if d >= m.len() {
            return Err(Error::InvalidModel(format!(
                "`{x}` bound to missing element {d}"
            )));
        }
    }
    let mut stack: Vec<(&str, usize)> = env.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    eval_in(m, f, &mut stack)
}

fn lookup(stack: &[(&str, usize)], x: &str) -> Result<usize> {
    stack
        .iter()
        .rev()
        .find(|(n, _)| *n == x)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Unbound(x.to_string()))
}

fn eval_in<'a>(
    m: &ClassicalSetModel,
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
                m.members[b].binary_search(&a).is_ok()
            } else {
                debug_assert_eq!(p, EQ);
                a == b
            }
        }
        Formula::Not(a) => !eval_in(m, a, stack)?,
        Formula::And(a, b) => eval_in(m, a, stack)? && eval_in(m, b, stack)?,
        Formula::Or(a, b) => eval_in(m, a, stack)? || eval_in(m, b, stack)?,
        Formula::Implies(a, b) => !eval_in(m, a, stack)? || eval_in(m, b, stack)?,
        Formula::Forall(x, a) => {
            for d in 0..m.len() {
                stack.push((x, d));
                let r = eval_in(m, a, stack);
                stack.pop();
                if !r? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Exists(x, a) => {
            for d in 0..m.len() {
                stack.push((x, d));
                let r = eval_in(m, a, stack);
                stack.pop();
                if r? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

/// "There are at least n distinct elements", with each inequality placed
/// directly under the quantifier that introduces its later variable:
/// ∃x1 ∃x2 (¬x1=x2 ∧ ∃x3 (¬x1=x3 ∧ ¬x2=x3 ∧ ...)). The exact variant adds
/// the negation of the sentence for n+1.
pub fn cardinality_sentence(n: usize, exact: bool) -> Result<Formula> {
    if n == 0 {
        return Err(Error::Precondition(
            "cardinality sentences start at 1".into(),
        ));
    }
    let at_least = |n: usize| {
        let var = |i: usize| format!("x{i}");
        let mut body: Option<Formula> = None;
        for k in (1..=n).rev() {
            let mut parts: Vec<Formula> = (1..k)
                .map(|i| formula::not(formula::eq(&var(i), &var(k))))
                .collect();
            if let Some(b) = body.take() {
                parts.push(b);
            }
            let inner = if parts.is_empty() {
                Formula::Top
            } else {
                formula::conj(parts)
            };
            body = Some(formula::exists(&var(k), inner));
        }
        body.expect("n >= 1")
    };
    Ok(if exact {
        formula::and(at_least(n), formula::not(at_least(n + 1)))
    } else {
        at_least(n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn set(s: &str) -> Formula {
        parse_formula(s, Lang::SetTheoretic).unwrap()
    }

    fn brute_force_stage(n: usize) -> (usize, usize) {
        // Build V_n as explicit sets of earlier sets.
        let mut stage: Vec<Vec<usize>> = Vec::new(); // each set: sorted ids into `all`
        let mut all: Vec<Vec<usize>> = Vec::new();
        for _ in 0..n {
            let prev: Vec<usize> = (0..all.len()).collect();
            let mut next = Vec::new();
            for mask in 0u32..(1 << prev.len()) {
                let s: Vec<usize> = prev
                    .iter()
                    .filter(|&&i| mask >> i & 1 == 1)
                    .cloned()
                    .collect();
                next.push(s);
            }
            all = next.clone();
            stage = next;
        }
        let edges = stage.iter().map(|s| s.len()).sum();
        (stage.len(), edges)
    }

    #[test]
    fn stage_sizes() {
        let sizes: Vec<usize> = (0..=4).map(|n| vrank_model(n).unwrap().len()).collect();
        assert_eq!(sizes, vec![0, 1, 2, 4, 16]);
        assert!(vrank_model(5).is_err());
        assert!(vrank_model(1).unwrap().edges().is_empty());
        assert_eq!(vrank_model(2).unwrap().edges(), vec![(0, 1)]);
        for n in 1..=4 {
            let m = vrank_model(n).unwrap();
            assert_eq!((m.len(), m.edges().len()), brute_force_stage(n));
            assert!(validate_classical(&m).is_empty());
        }
        assert_eq!(vrank_model(3).unwrap().edges().len(), 4);
    }

    #[test]
    fn prefixes_are_valid() {
        for k in 0..=16 {
            let m = hf_prefix(k).unwrap();
            assert_eq!(m.len(), k);
            assert!(validate_classical(&m).is_empty());
        }
        assert_eq!(hf_prefix(4).unwrap(), vrank_model(3).unwrap());
        assert!(hf_prefix(17).is_err());
    }

    #[test]
    fn validation_catches_problems() {
        let twins = ClassicalSetModel::new(vec!["a".into(), "b".into()], &[]).unwrap();
        assert_eq!(validate_classical(&twins).len(), 1);
        let loop_ = ClassicalSetModel::new(vec!["a".into()], &[(0, 0)]).unwrap();
        assert!(validate_classical(&loop_)
            .iter()
            .any(|v| v.contains("well-foundedness")));
    }

    #[test]
    fn evaluation_examples() {
        let env = BTreeMap::new();
        let v1 = vrank_model(1).unwrap();
        let v2 = vrank_model(2).unwrap();
        let v3 = vrank_model(3).unwrap();
        assert!(eval_classical(&v2, &set("exists x. forall y. ~y in x"), &env).unwrap());
        assert!(!eval_classical(&v1, &cardinality_sentence(2, false).unwrap(), &env).unwrap());
        let pair = set("exists z. forall w. (w in z <-> w = a | w = b)");
        let env3 = BTreeMap::from([("a".to_string(), 0), ("b".to_string(), 1)]);
        assert!(eval_classical(&v3, &pair, &env3).unwrap());
        assert!(eval_classical(&v3, &set("a in b"), &BTreeMap::from([("a".into(), 9)])).is_err());
        assert!(matches!(
            eval_classical(&v3, &set("a in b"), &env),
            Err(Error::Unbound(_))
        ));
    }

    #[test]
    fn cardinality_examples() {
        let env = BTreeMap::new();
        assert_eq!(
            cardinality_sentence(2, false).unwrap(),
            set("exists x1. exists x2. ~x1 = x2")
        );
        let e2 = cardinality_sentence(2, true).unwrap();
        assert!(eval_classical(&vrank_model(2).unwrap(), &e2, &env).unwrap());
        assert!(!eval_classical(&vrank_model(3).unwrap(), &e2, &env).unwrap());
        assert!(eval_classical(
            &vrank_model(1).unwrap(),
            &cardinality_sentence(1, true).unwrap(),
            &env
        )
        .unwrap());
    }
}
