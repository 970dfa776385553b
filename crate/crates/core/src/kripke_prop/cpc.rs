use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, Lang};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CpcVerdict {
    Valid,
    Falsifying(BTreeMap<String, bool>),
}

impl CpcVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, CpcVerdict::Valid)
    }
}

/// Classical value under a total assignment of the letters.
pub fn eval_classical_prop(f: &Formula, val: &BTreeMap<String, bool>) -> Result<bool> {
    Ok(match f {
        Formula::Atom(p, _) => *val.get(p).ok_or_else(|| Error::Uncovered(p.clone()))?,
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Not(a) => !eval_classical_prop(a, val)?,
        Formula::And(a, b) => eval_classical_prop(a, val)? && eval_classical_prop(b, val)?,
        Formula::Or(a, b) => eval_classical_prop(a, val)? || eval_classical_prop(b, val)?,
        Formula::Implies(a, b) => !eval_classical_prop(a, val)? || eval_classical_prop(b, val)?,
        Formula::Forall(..) | Formula::Exists(..) => {
            return Err(Error::Language {
                lang: Lang::Propositional,
                detail: "quantifier".into(),
            })
        }
    })
}

/// Truth-table decision. Rows are visited in binary counting order over the
/// sorted letters, false before true, so the first falsifying row is returned.
pub fn decide_cpc(f: &Formula) -> Result<CpcVerdict> {
    f.check_lang(Lang::Propositional)?;
    let letters: Vec<String> = f.letters().into_iter().collect();
    let n = letters.len();
    if n >= 32 {
        return Err(Error::Overflow(format!("{n} letters in a truth table")));
    }
    for row in 0u64..(1u64 << n) {
        let val: BTreeMap<String, bool> = letters
            .iter()
            .enumerate()
            .map(|(k, p)| (p.clone(), (row >> (n - 1 - k)) & 1 == 1))
            .collect();
        if !eval_classical_prop(f, &val)? {
            return Ok(CpcVerdict::Falsifying(val));
        }
    }
    Ok(CpcVerdict::Valid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::prop;

    #[test]
    fn examples() {
        assert!(decide_cpc(&prop("((p -> q) -> p) -> p").unwrap())
            .unwrap()
            .is_valid());
        assert!(decide_cpc(&prop("p | ~p").unwrap()).unwrap().is_valid());
        assert_eq!(
            decide_cpc(&prop("p -> q").unwrap()).unwrap(),
            CpcVerdict::Falsifying(BTreeMap::from([("p".into(), true), ("q".into(), false)]))
        );
    }
}
