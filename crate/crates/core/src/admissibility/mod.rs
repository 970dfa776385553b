//! Rules and admissibility: IPC by bounded Visser saturation and refutation,
//! CPC exactly, and the ground-substitution layer for classical predicate logic.

mod classical;
mod ipc;
mod visser;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{self, Formula, Lang};
use crate::kripke_prop::{decide_cpc, ipc_provable};
use crate::parser::parse_formula;
use crate::structure::Structure;
use crate::subst::{Assignment, GroundSubstitution};

pub use classical::{
    admissible_cpc, admissible_cqc_ground, ground_oracle_cpc, sigma_construction_cqc,
    unifiable_cpc, unifiable_cqc, verify_claim_cqc, ClaimFailure, ClaimReport,
};
pub use ipc::{
    admissible_ipc, ground_bound_check_ipc, refute_admissibility, IpcAdmissibilityOptions,
    RefutationBudget,
};
pub use visser::{visser_rule, VisserInstance, VisserSchema};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Logic {
    Ipc,
    Cpc,
}

/// A rule Γ / Δ with both sides sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    premises: Vec<Formula>,
    conclusions: Vec<Formula>,
}

impl Rule {
    pub fn new(mut premises: Vec<Formula>, mut conclusions: Vec<Formula>) -> Result<Rule> {
        if conclusions.is_empty() {
            return Err(Error::InvalidRule(
                "a rule needs at least one conclusion".into(),
            ));
        }
        premises.sort();
        premises.dedup();
        conclusions.sort();
        conclusions.dedup();
        Ok(Rule {
            premises,
            conclusions,
        })
    }

    pub fn parse(premises: &[&str], conclusions: &[&str], lang: Lang) -> Result<Rule> {
        let p = premises
            .iter()
            .map(|s| parse_formula(s, lang))
            .collect::<Result<Vec<_>>>()?;
        let c = conclusions
            .iter()
            .map(|s| parse_formula(s, lang))
            .collect::<Result<Vec<_>>>()?;
        Rule::new(p, c)
    }

    pub fn premises(&self) -> &[Formula] {
        &self.premises
    }

    pub fn conclusions(&self) -> &[Formula] {
        &self.conclusions
    }

    /// Conjunction of the premises (`true` when there are none).
    pub fn premise(&self) -> Formula {
        formula::conj(self.premises.clone())
    }

    /// Disjunction of the conclusions.
    pub fn conclusion(&self) -> Formula {
        formula::disj(self.conclusions.clone())
    }

    pub fn check_lang(&self, lang: Lang) -> Result<()> {
        for f in self.premises.iter().chain(&self.conclusions) {
            f.check_lang(lang)?;
        }
        formula::and(self.premise(), self.conclusion()).signature()?;
        Ok(())
    }

    pub fn to_json(&self) -> RuleJson {
        RuleJson {
            premises: self.premises.iter().map(|f| f.to_string()).collect(),
            conclusions: self.conclusions.iter().map(|f| f.to_string()).collect(),
        }
    }

    pub fn from_json(j: &RuleJson, lang: Lang) -> Result<Rule> {
        let p: Vec<&str> = j.premises.iter().map(String::as_str).collect();
        let c: Vec<&str> = j.conclusions.iter().map(String::as_str).collect();
        Rule::parse(&p, &c, lang)
    }
}

impl std::fmt::Display for Rule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let side = |fs: &[Formula]| {
            fs.iter()
                .map(|g| g.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "{} / {}", side(&self.premises), side(&self.conclusions))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleJson {
    #[serde(default)]
    pub premises: Vec<String>,
    pub conclusions: Vec<String>,
}

/// Is ⋀Γ → ⋁Δ a theorem?
pub fn derivable(rule: &Rule, logic: Logic) -> Result<bool> {
    rule.check_lang(Lang::Propositional)?;
    let f = formula::implies(rule.premise(), rule.conclusion());
    match logic {
        Logic::Ipc => ipc_provable(&f),
        Logic::Cpc => Ok(decide_cpc(&f)?.is_valid()),
    }
}

/// Which unifiability test decides passivity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnifierOracle {
    Cpc,
    CqcGround,
}

/// True iff the conjunction of the premises has no unifier.
pub fn passive(rule: &Rule, oracle: UnifierOracle) -> Result<bool> {
    let a = rule.premise();
    Ok(match oracle {
        UnifierOracle::Cpc => unifiable_cpc(&a)?.is_none(),
        UnifierOracle::CqcGround => unifiable_cqc(&a)?.is_none(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    /// No substitution makes the premises provable.
    Passive,
    /// The rule's implication is a theorem.
    Derivable,
    /// The conclusion follows after Visser-rule steps.
    Saturation,
}

/// One application of a Visser rule during saturation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub instance: VisserInstance,
    #[serde(serialize_with = "render")]
    pub premise: Formula,
    #[serde(serialize_with = "render")]
    pub conclusion: Formula,
    /// Facts available before the step; they entail `premise` in IPC.
    #[serde(serialize_with = "render_all")]
    pub facts: Vec<Formula>,
}

fn render<S: serde::Serializer>(f: &Formula, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_string())
}

fn render_all<S: serde::Serializer>(fs: &[Formula], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(fs.iter().map(|f| f.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub reason: Reason,
    pub steps: Vec<Step>,
    /// Facts after the last step; they entail the goal in the relevant logic.
    #[serde(serialize_with = "render_all")]
    pub facts: Vec<Formula>,
    #[serde(serialize_with = "render")]
    pub goal: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub assignment: Assignment,
    /// Set when the witness is a ground substitution.
    pub ground: Option<GroundSubstitution>,
    /// Images of the premises (all provable).
    pub premises: Vec<Formula>,
    /// Images of the conclusions (none provable).
    pub conclusions: Vec<Formula>,
    /// Classical structure refuting the conclusion image, for predicate rules.
    pub structure: Option<Structure>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub saturation_bound: usize,
    pub depth: usize,
    pub candidates_tried: usize,
    pub model_bound: usize,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmissibilityVerdict {
    Admissible(Trace),
    NotAdmissible(Box<Witness>),
    Unknown(Bounds),
}

impl AdmissibilityVerdict {
    pub fn is_admissible(&self) -> bool {
        matches!(self, AdmissibilityVerdict::Admissible(_))
    }

    pub fn is_not_admissible(&self) -> bool {
        matches!(self, AdmissibilityVerdict::NotAdmissible(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            AdmissibilityVerdict::Admissible(_) => "ADMISSIBLE",
            AdmissibilityVerdict::NotAdmissible(_) => "NOT_ADMISSIBLE",
            AdmissibilityVerdict::Unknown(_) => "UNKNOWN",
        }
    }
}

pub(crate) fn trivial_trace(reason: Reason, rule: &Rule) -> Trace {
    Trace {
        reason,
        steps: Vec::new(),
        facts: rule.premises().to_vec(),
        goal: rule.conclusion(),
    }
}
