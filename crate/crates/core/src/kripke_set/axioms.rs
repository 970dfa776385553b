use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::model::{force_at, SetKripkeModel};
use crate::error::{Error, Result};
use crate::formula::{and, conj, eq, exists, forall, iff, implies, mem, not, or, Formula, Lang};

/// Set-theoretic axioms and schemes checked instance by instance.
///
/// Scheme formulas use fixed variable conventions: the separated element is
/// `z`; replacement relates input `y` to output `z`; induction runs over `x`.
/// Any other free variable is a parameter, quantified like the outer variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axiom {
    Extensionality,
    Pair,
    Union,
    EmptySet,
    Separation(Formula),
    BoundedSeparation(Formula),
    Replacement(Formula),
    PowerSet,
    EpsInduction(Formula),
    Exponentiation,
    /// Inductive up to the given natural number only.
    StrongInfinity(usize),
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Extensionality => f.write_str("Extensionality"),
            Axiom::Pair => f.write_str("Pair"),
            Axiom::Union => f.write_str("Union"),
            Axiom::EmptySet => f.write_str("EmptySet"),
            Axiom::Separation(p) => write!(f, "Separation({p})"),
            Axiom::BoundedSeparation(p) => write!(f, "BoundedSeparation({p})"),
            Axiom::Replacement(p) => write!(f, "Replacement({p})"),
            Axiom::PowerSet => f.write_str("PowerSet"),
            Axiom::EpsInduction(p) => write!(f, "EpsInduction({p})"),
            Axiom::Exponentiation => f.write_str("Exponentiation"),
            Axiom::StrongInfinity(n) => write!(f, "StrongInfinity({n})"),
        }
    }
}

/// Graded form: ∀params (guard → ∃witness body).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub params: Vec<String>,
    pub guard: Option<Formula>,
    pub witness: Option<String>,
    pub body: Formula,
}

fn fresh(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = base.to_string();
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

pub(crate) fn subset(a: &str, b: &str, t: &str) -> Formula {
    forall(t, implies(mem(t, a), mem(t, b)))
}

fn singleton(s: &str, a: &str) -> Formula {
    and(mem(a, s), forall("t", implies(mem("t", s), eq("t", a))))
}

fn doubleton(s: &str, a: &str, b: &str) -> Formula {
    conj([
        mem(a, s),
        mem(b, s),
        forall("t", implies(mem("t", s), or(eq("t", a), eq("t", b)))),
    ])
}

/// p is the ordered pair {{a},{a,b}}.
fn ordered_pair(p: &str, a: &str, b: &str) -> Formula {
    conj([
        forall(
            "s",
            implies(mem("s", p), or(singleton("s", a), doubleton("s", a, b))),
        ),
        exists("s", and(mem("s", p), singleton("s", a))),
        exists("s", and(mem("s", p), doubleton("s", a, b))),
    ])
}

fn pair_in(a: &str, b: &str, w: &str) -> Formula {
    exists("p", and(mem("p", w), ordered_pair("p", a, b)))
}

/// w is (the graph of) a function from x to y.
pub(crate) fn function(w: &str, x: &str, y: &str) -> Formula {
    conj([
        forall(
            "p",
            implies(
                mem("p", w),
                exists(
                    "a",
                    and(
                        mem("a", x),
                        exists("b", and(mem("b", y), ordered_pair("p", "a", "b"))),
                    ),
                ),
            ),
        ),
        forall(
            "a",
            implies(
                mem("a", x),
                exists("b", and(mem("b", y), pair_in("a", "b", w))),
            ),
        ),
        forall(
            "a",
            implies(
                mem("a", x),
                forall(
                    "b",
                    implies(
                        mem("b", y),
                        forall(
                            "c",
                            implies(
                                mem("c", y),
                                implies(
                                    and(pair_in("a", "b", w), pair_in("a", "c", w)),
                                    eq("b", "c"),
                                ),
                            ),
                        ),
                    ),
                ),
            ),
        ),
    ])
}

/// x is empty.
pub(crate) fn empty(x: &str) -> Formula {
    forall("t", not(mem("t", x)))
}

/// b = a ∪ {a}.
pub(crate) fn successor(a: &str, b: &str) -> Formula {
    forall("t", iff(mem("t", b), or(mem("t", a), eq("t", a))))
}

/// Every quantifier has the form ∀x(x ∈ t → ..) or ∃x(x ∈ t ∧ ..) with t ≠ x.
pub fn is_bounded(f: &Formula) -> bool {
    let guarded = |x: &str, g: &Formula| matches!(g, Formula::Atom(p, a) if p == crate::formula::IN && a[0] == x && a[1] != x);
    match f {
        Formula::Atom(..) | Formula::Top | Formula::Bot => true,
        Formula::Not(a) => is_bounded(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            is_bounded(a) && is_bounded(b)
        }
        Formula::Forall(x, body) => {
            matches!(body.as_ref(), Formula::Implies(g, r) if guarded(x, g) && is_bounded(r))
        }
        Formula::Exists(x, body) => {
            matches!(body.as_ref(), Formula::And(g, r) if guarded(x, g) && is_bounded(r))
        }
    }
}

impl Axiom {
    /// Reads `Name` or `Name(n)`; schemes need `phi`.
    pub fn parse(spec: &str, phi: Option<Formula>) -> Result<Axiom> {
        let spec = spec.trim();
        let (name, arg) = match spec.split_once('(') {
            Some((n, rest)) => (n.trim(), Some(rest.trim_end_matches(')').trim())),
            None => (spec, None),
        };
        let key: String = name
            .chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase();
        let need = |phi: Option<Formula>| {
            let f = phi.ok_or_else(|| {
                Error::Unsupported(format!("axiom scheme `{name}` needs a formula"))
            })?;
            f.check_lang(Lang::SetTheoretic)?;
            Ok::<Formula, Error>(f)
        };
        Ok(match key.as_str() {
            "extensionality" => Axiom::Extensionality,
            "pair" | "pairing" => Axiom::Pair,
            "union" => Axiom::Union,
            "emptyset" | "empty" => Axiom::EmptySet,
            "separation" => Axiom::Separation(need(phi)?),
            "boundedseparation" => {
                let f = need(phi)?;
                if !is_bounded(&f) {
                    return Err(Error::Precondition(format!(
                        "`{f}` has an unbounded quantifier"
                    )));
                }
                Axiom::BoundedSeparation(f)
            }
            "replacement" => Axiom::Replacement(need(phi)?),
            "powerset" | "power" => Axiom::PowerSet,
            "epsinduction" | "induction" | "ininduction" => Axiom::EpsInduction(need(phi)?),
            "exponentiation" => Axiom::Exponentiation,
            "stronginfinity" => {
                let n = match arg {
                    Some(a) if !a.is_empty() => a.parse().map_err(|_| {
                        Error::Unsupported(format!("bad bound `{a}` for StrongInfinity"))
                    })?,
                    _ => 2,
                };
                Axiom::StrongInfinity(n)
            }
            _ => return Err(Error::Unsupported(format!("unknown axiom `{spec}`"))),
        })
    }

    /// The axioms without a scheme formula.
    pub fn basic() -> Vec<Axiom> {
        vec![
            Axiom::Extensionality,
            Axiom::Pair,
            Axiom::Union,
            Axiom::EmptySet,
            Axiom::PowerSet,
            Axiom::Exponentiation,
            Axiom::StrongInfinity(2),
        ]
    }

    pub fn shape(&self) -> Shape {
        let simple = |params: &[&str], witness: Option<&str>, body: Formula| Shape {
            params: params.iter().map(|s| s.to_string()).collect(),
            guard: None,
            witness: witness.map(str::to_string),
            body,
        };
        match self {
            Axiom::Extensionality => simple(
                &["x", "y"],
                None,
                implies(forall("z", iff(mem("z", "x"), mem("z", "y"))), eq("x", "y")),
            ),
            Axiom::Pair => simple(
                &["x", "y"],
                Some("z"),
                forall("w", iff(mem("w", "z"), or(eq("w", "x"), eq("w", "y")))),
            ),
            Axiom::Union => simple(
                &["x"],
                Some("y"),
                forall(
                    "z",
                    iff(
                        mem("z", "y"),
                        exists("w", and(mem("w", "x"), mem("z", "w"))),
                    ),
                ),
            ),
            Axiom::EmptySet => simple(&[], Some("x"), forall("y", not(mem("y", "x")))),
            Axiom::PowerSet => simple(
                &["x"],
                Some("y"),
                forall("w", iff(mem("w", "y"), subset("w", "x", "u"))),
            ),
            Axiom::Exponentiation => simple(
                &["x", "y"],
                Some("z"),
                forall("w", iff(mem("w", "z"), function("w", "x", "y"))),
            ),
            Axiom::StrongInfinity(n) => {
                let v = |i: usize| format!("n{i}");
                let mut body = Formula::Top;
                for i in (1..=*n).rev() {
                    body = exists(&v(i), and(successor(&v(i - 1), &v(i)), body));
                }
                simple(&[], None, exists(&v(0), and(empty(&v(0)), body)))
            }
            Axiom::Separation(phi) | Axiom::BoundedSeparation(phi) => {
                let avoid = phi.all_vars();
                let x = fresh("x", &avoid);
                let y = fresh("y", &avoid);
                let mut params = vec![x.clone()];
                params.extend(phi.free_vars().into_iter().filter(|v| v != "z"));
                Shape {
                    params,
                    guard: None,
                    body: forall("z", iff(mem("z", &y), and(mem("z", &x), phi.clone()))),
                    witness: Some(y),
                }
            }
            Axiom::Replacement(phi) => {
                let avoid = phi.all_vars();
                let x = fresh("x", &avoid);
                let w = fresh("w", &avoid);
                let z2 = fresh("z'", &avoid);
                let mut params = vec![x.clone()];
                params.extend(phi.free_vars().into_iter().filter(|v| v != "y" && v != "z"));
                let phi2 = phi.rename_free(&[("z".to_string(), z2.clone())].into());
                let unique = exists(
                    "z",
                    and(phi.clone(), forall(&z2, implies(phi2, eq(&z2, "z")))),
                );
                Shape {
                    params,
                    guard: Some(forall("y", implies(mem("y", &x), unique))),
                    body: forall(
                        "y",
                        implies(mem("y", &x), exists("z", and(mem("z", &w), phi.clone()))),
                    ),
                    witness: Some(w),
                }
            }
            Axiom::EpsInduction(phi) => {
                let avoid = phi.all_vars();
                let y = fresh("y", &avoid);
                let phi_y = phi.rename_free(&[("x".to_string(), y.clone())].into());
                let step = forall(
                    "x",
                    implies(forall(&y, implies(mem(&y, "x"), phi_y)), phi.clone()),
                );
                Shape {
                    params: phi.free_vars().into_iter().filter(|v| v != "x").collect(),
                    guard: None,
                    witness: None,
                    body: implies(step, forall("x", phi.clone())),
                }
            }
        }
    }

    /// The unrestricted sentence (a formula if the scheme has parameters).
    pub fn sentence(&self) -> Formula {
        let s = self.shape();
        let mut body = match s.witness {
            Some(w) => exists(&w, s.body),
            None => s.body,
        };
        if let Some(g) = s.guard {
            body = implies(g, body);
        }
        for p in s.params.iter().rev() {
            body = forall(p, body);
        }
        body
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub node: String,
    /// Outer variables with the element names they were bound to.
    pub params: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub axiom: String,
    pub sentence: String,
    pub node: String,
    pub rank_bound: usize,
    pub instances: usize,
    pub failures: Vec<AxiomFailure>,
    /// Set for StrongInfinity, which is only checked up to a finite bound.
    pub bounded_approximation: bool,
    /// Set when quantifiers range over an enumerated fragment of a domain.
    pub fragment_relative: bool,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the axiom at v with outer variables ranging over elements of rank
/// ≤ `rank_bound` and the existential witness over rank ≤ `rank_bound + 1`.
/// Inner quantifiers are unrestricted. Ranks start at 1 for memberless sets.
pub fn check_axiom(
    m: &SetKripkeModel,
    axiom: &Axiom,
    v: usize,
    rank_bound: usize,
) -> Result<AxiomReport> {
    if v >= m.len() {
        return Err(Error::UnknownNode(v.to_string()));
    }
    for &u in m.above(v) {
        if !m.well_founded(u) {
            return Err(Error::Precondition(format!(
                "membership at `{}` is not well-founded",
                m.nodes()[u]
            )));
        }
    }
    let shape = axiom.shape();
    let mut ups: Vec<usize> = m.above(v).to_vec();
    ups.sort_unstable();
    let mut instances = 0;
    let mut failures = Vec::new();
    for u in ups {
        let pool: Vec<usize> = (0..m.domain(u).len())
            .filter(|&a| m.rank(u, a).unwrap() <= rank_bound)
            .collect();
        let k = shape.params.len();
        if k > 0 && pool.is_empty() {
            continue;
        }
        let mut idx = vec![0usize; k];
        loop {
            instances += 1;
            let mut stack: Vec<(&str, usize)> = shape
                .params
                .iter()
                .zip(&idx)
                .map(|(p, &i)| (p.as_str(), pool[i]))
                .collect();
            if !instance_holds(m, u, &shape, rank_bound, &mut stack)? {
                failures.push(AxiomFailure {
                    node: m.nodes()[u].clone(),
                    params: stack
                        .iter()
                        .map(|&(p, a)| (p.to_string(), m.domain(u)[a].clone()))
                        .collect(),
                });
            }
            // Odometer over the parameter pool, last position fastest.
            let mut pos = k;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < pool.len() {
                    break;
                }
                idx[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if k == 0 || pos == usize::MAX {
                break;
            }
        }
    }
    Ok(AxiomReport {
        axiom: axiom.to_string(),
        sentence: axiom.sentence().to_string(),
        node: m.nodes()[v].clone(),
        rank_bound,
        instances,
        failures,
        bounded_approximation: matches!(axiom, Axiom::StrongInfinity(_)),
        fragment_relative: false,
    })
}

fn instance_holds<'a>(
    m: &SetKripkeModel,
    u: usize,
    shape: &'a Shape,
    rank_bound: usize,
    stack: &mut Vec<(&'a str, usize)>,
) -> Result<bool> {
    match &shape.guard {
        None => witnessed(m, u, shape, rank_bound, stack),
        Some(g) => {
            for &w in m.above(u) {
                let f = m.transition(u, w);
                let mut s: Vec<(&str, usize)> = stack.iter().map(|&(x, d)| (x, f[d])).collect();
                if force_at(m, w, g, &mut s)? && !witnessed(m, w, shape, rank_bound, &mut s)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

fn witnessed<'a>(
    m: &SetKripkeModel,
    u: usize,
    shape: &'a Shape,
    rank_bound: usize,
    stack: &mut Vec<(&'a str, usize)>,
) -> Result<bool> {
    let Some(w) = &shape.witness else {
        return force_at(m, u, &shape.body, stack);
    };
    for d in 0..m.domain(u).len() {
        if m.rank(u, d).unwrap() > rank_bound + 1 {
            continue;
        }
        stack.push((w, d));
        let r = force_at(m, u, &shape.body, stack);
        stack.pop();
        if r? {
            return Ok(true);
        }
    }
    Ok(false)
}
