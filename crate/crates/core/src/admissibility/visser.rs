use serde::Serialize;

use super::Rule;
use crate::error::{Error, Result};
use crate::formula::{self, Formula};

/// Instance of V_n (with a side formula C) or V'_n (without).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VisserInstance {
    pub n: usize,
    /// A_1 .. A_(n+2), rendered.
    #[serde(serialize_with = "render_all")]
    pub a: Vec<Formula>,
    /// B_1 .. B_n, rendered.
    #[serde(serialize_with = "render_all")]
    pub b: Vec<Formula>,
    #[serde(serialize_with = "render_opt")]
    pub c: Option<Formula>,
}

fn render_all<S: serde::Serializer>(fs: &[Formula], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(fs.iter().map(|f| f.to_string()))
}

fn render_opt<S: serde::Serializer>(
    f: &Option<Formula>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match f {
        Some(f) => s.serialize_some(&f.to_string()),
        None => s.serialize_none(),
    }
}

fn left_fold(parts: Vec<Formula>, op: fn(Formula, Formula) -> Formula) -> Formula {
    let mut it = parts.into_iter();
    let first = it.next().expect("nonempty");
    it.fold(first, op)
}

impl VisserInstance {
    pub fn new(n: usize, a: Vec<Formula>, b: Vec<Formula>, c: Option<Formula>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidRule("Visser rules start at n = 1".into()));
        }
        if a.len() != n + 2 || b.len() != n {
            return Err(Error::InvalidRule(format!(
                "V_{n} takes {} A-components and {n} B-components, got {} and {}",
                n + 2,
                a.len(),
                b.len()
            )));
        }
        Ok(VisserInstance { n, a, b, c })
    }

    /// The conjunction of A_i -> B_i for i ≤ n.
    pub fn antecedent(&self) -> Formula {
        left_fold(
            (0..self.n)
                .map(|i| formula::implies(self.a[i].clone(), self.b[i].clone()))
                .collect(),
            formula::and,
        )
    }

    fn with_c(&self, f: Formula) -> Formula {
        match &self.c {
            Some(c) => formula::or(f, c.clone()),
            None => f,
        }
    }

    pub fn premise(&self) -> Formula {
        let tail = formula::or(self.a[self.n].clone(), self.a[self.n + 1].clone());
        self.with_c(formula::implies(self.antecedent(), tail))
    }

    pub fn conclusion(&self) -> Formula {
        let x = self.antecedent();
        let disjuncts = self
            .a
            .iter()
            .map(|aj| formula::implies(x.clone(), aj.clone()))
            .collect();
        self.with_c(left_fold(disjuncts, formula::or))
    }

    pub fn rule(&self) -> Rule {
        Rule::new(vec![self.premise()], vec![self.conclusion()]).expect("nonempty conclusion")
    }
}

/// Instantiator for V_n (`with_c`) or V'_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VisserSchema {
    pub n: usize,
    pub with_c: bool,
}

pub fn visser_rule(n: usize, with_c: bool) -> Result<VisserSchema> {
    if n == 0 {
        return Err(Error::InvalidRule("Visser rules start at n = 1".into()));
    }
    Ok(VisserSchema { n, with_c })
}

impl VisserSchema {
    pub fn instantiate(
        &self,
        a: Vec<Formula>,
        b: Vec<Formula>,
        c: Option<Formula>,
    ) -> Result<VisserInstance> {
        if c.is_some() != self.with_c {
            return Err(Error::InvalidRule(if self.with_c {
                "V_n needs a side formula C".into()
            } else {
                "V'_n takes no side formula".into()
            }));
        }
        VisserInstance::new(self.n, a, b, c)
    }
}
