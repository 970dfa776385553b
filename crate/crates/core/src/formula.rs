//! Formula syntax shared by the propositional, first-order and set-theoretic languages.
//!
//! Terms are variables only: constants and function symbols are expressed through
//! predicates. The set-theoretic language uses exactly the two binary predicates
//! [`IN`] and [`EQ`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Predicate symbol of set membership, rendered infix as `x in y`.
pub const IN: &str = "in";
/// Predicate symbol of equality, rendered infix as `x = y`.
pub const EQ: &str = "eq";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// Predicate symbol applied to variables; nullary atoms are propositional letters.
    Atom(String, Vec<String>),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lang {
    Propositional,
    FirstOrder,
    SetTheoretic,
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lang::Propositional => "propositional",
            Lang::FirstOrder => "first-order",
            Lang::SetTheoretic => "set-theoretic",
        })
    }
}

/// A finite list of predicate symbols with their arities, kept sorted by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Signature>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut map = BTreeMap::new();
        for (name, arity) in symbols {
            let name = name.into();
            if map.insert(name.clone(), arity).is_some() {
                return Err(Error::Signature(format!("duplicate symbol `{name}`")));
            }
        }
        Ok(Signature {
            symbols: map.into_iter().collect(),
        })
    }

    /// Propositional signature: every letter is nullary.
    pub fn propositional<I, S>(letters: I) -> Signature
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = letters.into_iter().map(Into::into).collect();
        Signature {
            symbols: set.into_iter().map(|s| (s, 0)).collect(),
        }
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.symbols
            .binary_search_by(|(n, _)| n.as_str().cmp(name))
            .ok()
            .map(|i| self.symbols[i].1)
    }

    /// Union of two signatures; fails on an arity clash.
    pub fn merge(&self, other: &Signature) -> Result<Signature> {
        let mut map: BTreeMap<String, usize> = self.symbols.iter().cloned().collect();
        for (name, arity) in &other.symbols {
            match map.get(name) {
                Some(a) if a != arity => {
                    return Err(Error::Arity {
                        symbol: name.clone(),
                        expected: *a,
                        found: *arity,
                    })
                }
                _ => {
                    map.insert(name.clone(), *arity);
                }
            }
        }
        Ok(Signature {
            symbols: map.into_iter().collect(),
        })
    }
}

pub fn atom(name: &str) -> Formula {
    Formula::Atom(name.to_string(), Vec::new())
}

pub fn pred(name: &str, args: &[&str]) -> Formula {
    Formula::Atom(
        name.to_string(),
        args.iter().map(|s| s.to_string()).collect(),
    )
}

pub fn mem(x: &str, y: &str) -> Formula {
    pred(IN, &[x, y])
}

pub fn eq(x: &str, y: &str) -> Formula {
    pred(EQ, &[x, y])
}

pub fn not(f: Formula) -> Formula {
    Formula::Not(Box::new(f))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Formula::Implies(Box::new(a), Box::new(b))
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    and(implies(a.clone(), b.clone()), implies(b, a))
}

pub fn forall(x: &str, body: Formula) -> Formula {
    Formula::Forall(x.to_string(), Box::new(body))
}

pub fn exists(x: &str, body: Formula) -> Formula {
    Formula::Exists(x.to_string(), Box::new(body))
}

/// Right-nested conjunction; the empty conjunction is `true`.
pub fn conj<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
    let mut parts: Vec<Formula> = parts.into_iter().collect();
    match parts.pop() {
        None => Formula::Top,
        Some(last) => parts.into_iter().rev().fold(last, |acc, f| and(f, acc)),
    }
}

/// Right-nested disjunction; the empty disjunction is `false`.
pub fn disj<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
    let mut parts: Vec<Formula> = parts.into_iter().collect();
    match parts.pop() {
        None => Formula::Bot,
        Some(last) => parts.into_iter().rev().fold(last, |acc, f| or(f, acc)),
    }
}

/// `forall x1 ... xn. body`, outermost variable first.
pub fn forall_all(vars: &[String], body: Formula) -> Formula {
    vars.iter()
        .rev()
        .fold(body, |acc, v| Formula::Forall(v.clone(), Box::new(acc)))
}

impl Formula {
    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(..))
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Top | Formula::Bot => 1,
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(_, args) => {
                for a in args {
                    if !bound.contains(&a.as_str()) {
                        out.insert(a.clone());
                    }
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x);
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring in the formula, free or bound.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Atom(_, args) => out.extend(args.iter().cloned()),
            Formula::Forall(x, _) | Formula::Exists(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// Predicate symbols with their arities; fails if a symbol is used with two arities.
    pub fn signature(&self) -> Result<Signature> {
        let mut map: BTreeMap<String, usize> = BTreeMap::new();
        let mut clash = None;
        self.walk(&mut |f| {
            if let Formula::Atom(p, args) = f {
                match map.get(p) {
                    Some(&a) if a != args.len() && clash.is_none() => {
                        clash = Some(Error::Arity {
                            symbol: p.clone(),
                            expected: a,
                            found: args.len(),
                        })
                    }
                    Some(_) => {}
                    None => {
                        map.insert(p.clone(), args.len());
                    }
                }
            }
        });
        match clash {
            Some(e) => Err(e),
            None => Ok(Signature {
                symbols: map.into_iter().collect(),
            }),
        }
    }

    /// Names of the nullary atoms (propositional letters), sorted.
    pub fn letters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Atom(p, args) = f {
                if args.is_empty() {
                    out.insert(p.clone());
                }
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk<'a, F: FnMut(&'a Formula)>(&'a self, visit: &mut F) {
        visit(self);
        match self {
            Formula::Atom(..) | Formula::Top | Formula::Bot => {}
            Formula::Not(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => a.walk(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Checks the invariants of a language tag.
    pub fn check_lang(&self, lang: Lang) -> Result<()> {
        self.signature()?;
        let mut err = None;
        self.walk(&mut |f| {
            if err.is_some() {
                return;
            }
            match (lang, f) {
                (Lang::Propositional, Formula::Atom(p, args)) if !args.is_empty() => {
                    err = Some(Error::Language {
                        lang,
                        detail: format!("atom `{p}` has arguments"),
                    })
                }
                (Lang::Propositional, Formula::Forall(..) | Formula::Exists(..)) => {
                    err = Some(Error::Language {
                        lang,
                        detail: "quantifier".into(),
                    })
                }
                (Lang::SetTheoretic, Formula::Atom(p, args)) => {
                    if p != IN && p != EQ {
                        err = Some(Error::Language {
                            lang,
                            detail: format!("unknown symbol `{p}` (only `in` and `=` are allowed)"),
                        })
                    } else if args.len() != 2 {
                        err = Some(Error::Arity {
                            symbol: p.clone(),
                            expected: 2,
                            found: args.len(),
                        })
                    }
                }
                _ => {}
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Simultaneous capture-avoiding renaming of free variables.
    ///
    /// Bound variables that would capture a substituted name are renamed to the
    /// first unused name of the form `v0, v1, ...`.
    pub fn rename_free(&self, map: &BTreeMap<String, String>) -> Formula {
        let mut avoid = self.all_vars();
        avoid.extend(map.values().cloned());
        let mut fresh = Fresh::new(avoid);
        self.rename_in(map, &mut fresh)
    }

    fn rename_in(&self, map: &BTreeMap<String, String>, fresh: &mut Fresh) -> Formula {
        match self {
            Formula::Atom(p, args) => Formula::Atom(
                p.clone(),
                args.iter()
                    .map(|a| map.get(a).cloned().unwrap_or_else(|| a.clone()))
                    .collect(),
            ),
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::Not(a) => not(a.rename_in(map, fresh)),
            Formula::And(a, b) => and(a.rename_in(map, fresh), b.rename_in(map, fresh)),
            Formula::Or(a, b) => or(a.rename_in(map, fresh), b.rename_in(map, fresh)),
            Formula::Implies(a, b) => implies(a.rename_in(map, fresh), b.rename_in(map, fresh)),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let mut inner = map.clone();
                inner.remove(x);
                let free = a.free_vars();
                let captures = inner
                    .iter()
                    .any(|(from, to)| to == x && free.contains(from));
                let (var, body) = if captures {
                    let y = fresh.next();
                    inner.insert(x.clone(), y.clone());
                    (y, a.rename_in(&inner, fresh))
                } else {
                    (x.clone(), a.rename_in(&inner, fresh))
                };
                if matches!(self, Formula::Forall(..)) {
                    Formula::Forall(var, Box::new(body))
                } else {
                    Formula::Exists(var, Box::new(body))
                }
            }
        }
    }

    /// Structural map over the atoms, leaving connectives and quantifiers untouched.
    pub fn map_atoms<F>(&self, f: &mut F) -> Result<Formula>
    where
        F: FnMut(&str, &[String]) -> Result<Formula>,
    {
        Ok(match self {
            Formula::Atom(p, args) => f(p, args)?,
            Formula::Top => Formula::Top,
            Formula::Bot => Formula::Bot,
            Formula::Not(a) => not(a.map_atoms(f)?),
            Formula::And(a, b) => and(a.map_atoms(f)?, b.map_atoms(f)?),
            Formula::Or(a, b) => or(a.map_atoms(f)?, b.map_atoms(f)?),
            Formula::Implies(a, b) => implies(a.map_atoms(f)?, b.map_atoms(f)?),
            Formula::Forall(x, a) => Formula::Forall(x.clone(), Box::new(a.map_atoms(f)?)),
            Formula::Exists(x, a) => Formula::Exists(x.clone(), Box::new(a.map_atoms(f)?)),
        })
    }
}

/// Deterministic supply of fresh variable names.
pub(crate) struct Fresh {
    avoid: BTreeSet<String>,
    counter: usize,
}

impl Fresh {
    pub(crate) fn new(avoid: BTreeSet<String>) -> Fresh {
        Fresh { avoid, counter: 0 }
    }

    pub(crate) fn next(&mut self) -> String {
        loop {
            let name = format!("v{}", self.counter);
            self.counter += 1;
            if self.avoid.insert(name.clone()) {
                return name;
            }
        }
    }
}

// Precedence levels used by the printer: higher binds tighter.
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => PREC_IMP,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        _ => PREC_UNARY,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        out.write_str("(")?;
        write_formula(f, out)?;
        out.write_str(")")
    } else {
        write_formula(f, out)
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::Atom(p, args) if (p == IN || p == EQ) && args.len() == 2 => {
            let op = if p == IN { "in" } else { "=" };
            write!(out, "{} {} {}", args[0], op, args[1])
        }
        Formula::Atom(p, args) if args.is_empty() => out.write_str(p),
        Formula::Atom(p, args) => write!(out, "{}({})", p, args.join(",")),
        Formula::Top => out.write_str("true"),
        Formula::Bot => out.write_str("false"),
        Formula::Not(a) => {
            out.write_str("~")?;
            write_at(a, PREC_UNARY, out)
        }
        // `&` and `|` associate to the left, `->` to the right.
        Formula::And(a, b) => {
            write_at(a, PREC_AND, out)?;
            out.write_str(" & ")?;
            write_at(b, PREC_AND + 1, out)
        }
        Formula::Or(a, b) => {
            write_at(a, PREC_OR, out)?;
            out.write_str(" | ")?;
            write_at(b, PREC_OR + 1, out)
        }
        Formula::Implies(a, b) => {
            write_at(a, PREC_IMP + 1, out)?;
            out.write_str(" -> ")?;
            write_at(b, PREC_IMP, out)
        }
        Formula::Forall(x, a) => {
            write!(out, "forall {x}. ")?;
            write_at(a, PREC_UNARY, out)
        }
        Formula::Exists(x, a) => {
            write!(out, "exists {x}. ")?;
            write_at(a, PREC_UNARY, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

/// Renders a formula in the ASCII grammar accepted by [`crate::parser::parse_formula`].
pub fn render_formula(f: &Formula) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_examples() {
        assert_eq!(render_formula(&Formula::Top), "true");
        assert_eq!(render_formula(&and(atom("p"), atom("q"))), "p & q");
        let f = forall("x", implies(mem("x", "a"), Formula::Bot));
        assert_eq!(render_formula(&f), "forall x. (x in a -> false)");
        assert_eq!(
            render_formula(&implies(implies(atom("p"), atom("q")), atom("p"))),
            "(p -> q) -> p"
        );
        assert_eq!(render_formula(&not(not(atom("p")))), "~~p");
    }

    #[test]
    fn free_vars_examples() {
        assert!(forall("x", pred("P", &["x"])).free_vars().is_empty());
        let fv: Vec<_> = pred("P", &["x", "y"]).free_vars().into_iter().collect();
        assert_eq!(fv, vec!["x", "y"]);
        let fv: Vec<_> = exists("x", mem("x", "a")).free_vars().into_iter().collect();
        assert_eq!(fv, vec!["a"]);
    }

    #[test]
    fn arity_clash_detected() {
        let f = and(pred("P", &["x"]), pred("P", &["x", "y"]));
        assert!(matches!(f.signature(), Err(Error::Arity { .. })));
    }

    #[test]
    fn language_checks() {
        assert!(forall("x", pred("P", &["x"]))
            .check_lang(Lang::Propositional)
            .is_err());
        assert!(and(mem("x", "y"), atom("phi"))
            .check_lang(Lang::SetTheoretic)
            .is_err());
        assert!(mem("x", "y").check_lang(Lang::SetTheoretic).is_ok());
    }

    #[test]
    fn renaming_avoids_capture() {
        // exists w. x0 in w  with x0 := w must rename the bound w
        let f = exists("w", mem("x0", "w"));
        let map = BTreeMap::from([("x0".to_string(), "w".to_string())]);
        let g = f.rename_free(&map);
        match &g {
            Formula::Exists(v, body) => {
                assert_ne!(v, "w");
                assert_eq!(**body, mem("w", v));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn empty_junctions() {
        assert_eq!(conj(vec![]), Formula::Top);
        assert_eq!(disj(vec![]), Formula::Bot);
        assert_eq!(disj(vec![atom("p")]), atom("p"));
    }
}
