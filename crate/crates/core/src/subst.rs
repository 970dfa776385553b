//! Assignments of formulas to predicate symbols and their {true,false}-valued special case.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, Signature};

/// Name of the i-th canonical parameter of an assigned formula.
pub fn param(i: usize) -> String {
    format!("x{i}")
}

/// Maps each predicate symbol to a formula whose free variables are among the
/// canonical parameters `x0 .. x(n-1)`, n being the arity of the symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<String, (usize, Formula)>,
}

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    /// Adds `symbol/arity ↦ f`, rejecting free variables outside the canonical parameters.
    pub fn insert(&mut self, symbol: &str, arity: usize, f: Formula) -> Result<()> {
        for v in f.free_vars() {
            let ok = v
                .strip_prefix('x')
                .and_then(|d| d.parse::<usize>().ok())
                .is_some_and(|i| i < arity && param(i) == v);
            if !ok {
                return Err(Error::ExtraParameter {
                    symbol: symbol.to_string(),
                    var: v,
                });
            }
        }
        self.map.insert(symbol.to_string(), (arity, f));
        Ok(())
    }

    pub fn with(mut self, symbol: &str, arity: usize, f: Formula) -> Result<Assignment> {
        self.insert(symbol, arity, f)?;
        Ok(self)
    }

    /// Propositional convenience: every symbol nullary.
    pub fn propositional<I, S>(pairs: I) -> Assignment
    where
        I: IntoIterator<Item = (S, Formula)>,
        S: AsRef<str>,
    {
        let mut a = Assignment::new();
        for (s, f) in pairs {
            a.insert(s.as_ref(), 0, f)
                .expect("closed formula assigned to a nullary symbol");
        }
        a
    }

    pub fn get(&self, symbol: &str) -> Option<&(usize, Formula)> {
        self.map.get(symbol)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &(usize, Formula))> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, f: &Formula) -> Result<Formula> {
        apply_assignment(self, f)
    }
}

/// Substitutes assigned formulas for atoms. Bound variables of the assigned
/// formulas are renamed when they would capture an actual argument.
pub fn apply_assignment(a: &Assignment, f: &Formula) -> Result<Formula> {
    f.map_atoms(&mut |p, args| {
        let (arity, body) = a.get(p).ok_or_else(|| Error::Uncovered(p.to_string()))?;
        if *arity != args.len() {
            return Err(Error::Arity {
                symbol: p.to_string(),
                expected: *arity,
                found: args.len(),
            });
        }
        if args.is_empty() {
            return Ok(body.clone());
        }
        let map: BTreeMap<String, String> = args
            .iter()
            .enumerate()
            .map(|(i, y)| (param(i), y.clone()))
            .collect();
        Ok(body.rename_free(&map))
    })
}

/// Total map from a signature to {true, false}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundSubstitution {
    values: BTreeMap<String, bool>,
}

impl GroundSubstitution {
    pub fn new() -> GroundSubstitution {
        GroundSubstitution::default()
    }

    pub fn from_pairs<I, S>(pairs: I) -> GroundSubstitution
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        GroundSubstitution {
            values: pairs.into_iter().map(|(s, b)| (s.into(), b)).collect(),
        }
    }

    pub fn get(&self, symbol: &str) -> Option<bool> {
        self.values.get(symbol).copied()
    }

    pub fn set(&mut self, symbol: &str, value: bool) {
        self.values.insert(symbol.to_string(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, bool)> {
        self.values.iter().map(|(k, v)| (k, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Replaces every atom by `true` or `false`, ignoring its arguments.
    pub fn apply(&self, f: &Formula) -> Result<Formula> {
        f.map_atoms(&mut |p, _| match self.get(p) {
            Some(true) => Ok(Formula::Top),
            Some(false) => Ok(Formula::Bot),
            None => Err(Error::Uncovered(p.to_string())),
        })
    }

    pub fn to_assignment(&self, sig: &Signature) -> Result<Assignment> {
        let mut a = Assignment::new();
        for (name, arity) in sig.symbols() {
            let v = self
                .get(name)
                .ok_or_else(|| Error::Uncovered(name.clone()))?;
            a.insert(name, *arity, if v { Formula::Top } else { Formula::Bot })?;
        }
        Ok(a)
    }
}

impl std::fmt::Display for GroundSubstitution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("[")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k} := {}", if *v { "true" } else { "false" })?;
        }
        f.write_str("]")
    }
}

/// All ground substitutions over `sig`, in binary counting order: symbols are
/// sorted by name, the first symbol is the most significant digit, and
/// `false` counts as 0. So `{P, Q}` yields `[F,F], [F,T], [T,F], [T,T]`.
pub fn ground_substitutions(sig: &Signature) -> impl Iterator<Item = GroundSubstitution> + '_ {
    let n = sig.len();
    assert!(n < 64, "signature too large to enumerate");
    (0u64..(1u64 << n)).map(move |i| GroundSubstitution {
        values: sig
            .symbols()
            .iter()
            .enumerate()
            .map(|(k, (name, _))| (name.clone(), (i >> (n - 1 - k)) & 1 == 1))
            .collect(),
    })
}

/// Classical value of a formula whose atoms are all `true`/`false`.
/// Quantifiers fold to their body, domains being nonempty.
pub fn constant_fold(f: &Formula) -> Result<bool> {
    Ok(match f {
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Atom(p, _) => return Err(Error::NonConstant(p.clone())),
        Formula::Not(a) => !constant_fold(a)?,
        Formula::And(a, b) => constant_fold(a)? & constant_fold(b)?,
        Formula::Or(a, b) => constant_fold(a)? | constant_fold(b)?,
        Formula::Implies(a, b) => !constant_fold(a)? | constant_fold(b)?,
        Formula::Forall(_, a) | Formula::Exists(_, a) => constant_fold(a)?,
    })
}
