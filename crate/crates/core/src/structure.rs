//! Finite classical first-order structures over a predicate-only signature.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, Signature};

/// Domain `{0, .., size-1}`; each symbol of arity k is interpreted by a table
/// of `size^k` truth values indexed in base `size`, first argument most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Structure {
    pub size: usize,
    pub interp: BTreeMap<String, (usize, Vec<bool>)>,
}

impl Structure {
    /// Every structure of the given domain size over `sig`.
    pub fn enumerate(sig: &Signature, size: usize) -> impl Iterator<Item = Structure> {
        assert!(size >= 1, "domains are nonempty");
        let shapes: Vec<(String, usize, usize)> = sig
            .symbols()
            .iter()
            .map(|(name, arity)| (name.clone(), *arity, size.pow(*arity as u32)))
            .collect();
        let total_bits: usize = shapes.iter().map(|s| s.2).sum();
        assert!(total_bits < 40, "too many structures to enumerate");
        (0u64..(1u64 << total_bits)).map(move |code| {
            let mut offset = 0;
            let interp = shapes
                .iter()
                .map(|(name, arity, cells)| {
                    let table = (0..*cells)
                        .map(|c| (code >> (offset + c)) & 1 == 1)
                        .collect();
                    offset += cells;
                    (name.clone(), (*arity, table))
                })
                .collect();
            Structure { size, interp }
        })
    }

    /// Structure in which every symbol is constantly true or false.
    pub fn constant(sig: &Signature, size: usize, value: impl Fn(&str) -> bool) -> Structure {
        let interp = sig
            .symbols()
            .iter()
            .map(|(name, arity)| {
                (
                    name.clone(),
                    (*arity, vec![value(name); size.pow(*arity as u32)]),
                )
            })
            .collect();
        Structure { size, interp }
    }

    pub fn holds(&self, symbol: &str, args: &[usize]) -> Result<bool> {
        let (arity, table) = self
            .interp
            .get(symbol)
            .ok_or_else(|| Error::Uncovered(symbol.to_string()))?;
        if *arity != args.len() {
            return Err(Error::Arity {
                symbol: symbol.to_string(),
                expected: *arity,
                found: args.len(),
            });
        }
        let idx = args.iter().fold(0, |acc, a| acc * self.size + a);
        Ok(table[idx])
    }

    pub fn eval(&self, f: &Formula, env: &[(String, usize)]) -> Result<bool> {
        let mut stack: Vec<(String, usize)> = env.to_vec();
        self.eval_in(f, &mut stack)
    }

    pub fn eval_sentence(&self, f: &Formula) -> Result<bool> {
        self.eval(f, &[])
    }

    fn lookup(stack: &[(String, usize)], x: &str) -> Result<usize> {
        stack
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::Unbound(x.to_string()))
    }

    fn eval_in(&self, f: &Formula, stack: &mut Vec<(String, usize)>) -> Result<bool> {
        Ok(match f {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(p, args) => {
                let vals = args
                    .iter()
                    .map(|a| Self::lookup(stack, a))
                    .collect::<Result<Vec<_>>>()?;
                self.holds(p, &vals)?
            }
            Formula::Not(a) => !self.eval_in(a, stack)?,
            Formula::And(a, b) => self.eval_in(a, stack)? && self.eval_in(b, stack)?,
            Formula::Or(a, b) => self.eval_in(a, stack)? || self.eval_in(b, stack)?,
            Formula::Implies(a, b) => !self.eval_in(a, stack)? || self.eval_in(b, stack)?,
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                let universal = matches!(f, Formula::Forall(..));
                let mut result = universal;
                for d in 0..self.size {
                    stack.push((x.clone(), d));
                    let r = self.eval_in(a, stack);
                    stack.pop();
                    if r? != universal {
                        result = !universal;
                        break;
                    }
                }
                result
            }
        })
    }
}

impl std::fmt::Display for Structure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "domain {{0..{}}}", self.size.saturating_sub(1))?;
        for (name, (arity, table)) in &self.interp {
            let tuples: Vec<String> = table
                .iter()
                .enumerate()
                .filter(|(_, b)| **b)
                .map(|(i, _)| {
                    let mut digits = vec![0; *arity];
                    let mut rest = i;
                    for d in digits.iter_mut().rev() {
                        *d = rest % self.size;
                        rest /= self.size;
                    }
                    format!(
                        "({})",
                        digits
                            .iter()
                            .map(|d| d.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    )
                })
                .collect();
            if *arity == 0 {
                write!(f, "; {name} = {}", table[0])?;
            } else {
                write!(f, "; {name} = {{{}}}", tuples.join(" "))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Lang;
    use crate::parser::parse_formula;

    #[test]
    fn counts() {
        let sig = Signature::new([("P", 1), ("q", 0)]).unwrap();
        assert_eq!(Structure::enumerate(&sig, 2).count(), 8);
        assert_eq!(Structure::enumerate(&sig, 3).count(), 16);
    }

    #[test]
    fn exists_and_not_all() {
        let f = parse_formula("exists x. P(x) & exists x. ~P(x)", Lang::FirstOrder).unwrap();
        let sig = f.signature().unwrap();
        let n1 = Structure::enumerate(&sig, 1)
            .filter(|s| s.eval_sentence(&f).unwrap())
            .count();
        let n2 = Structure::enumerate(&sig, 2)
            .filter(|s| s.eval_sentence(&f).unwrap())
            .count();
        assert_eq!((n1, n2), (0, 2));
    }
}
