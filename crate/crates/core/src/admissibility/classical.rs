use serde::Serialize;

use super::{trivial_trace, AdmissibilityVerdict, Bounds, Reason, Rule, Witness};
use crate::error::{Error, Result};
use crate::formula::{self, Formula, Lang, Signature};
use crate::kripke_prop::decide_cpc;
use crate::structure::Structure;
use crate::subst::{constant_fold, ground_substitutions, Assignment, GroundSubstitution};

fn first_ground_unifier(f: &Formula, sig: &Signature) -> Result<Option<GroundSubstitution>> {
    for tau in ground_substitutions(sig) {
        if constant_fold(&tau.apply(f)?)? {
            return Ok(Some(tau));
        }
    }
    Ok(None)
}

/// First ground substitution (in enumeration order) making `f` classically true.
pub fn unifiable_cpc(f: &Formula) -> Result<Option<GroundSubstitution>> {
    f.check_lang(Lang::Propositional)?;
    first_ground_unifier(f, &Signature::propositional(f.letters()))
}

/// First ground unifier of a function-free first-order formula. A formula is
/// unifiable exactly when it has a ground unifier.
pub fn unifiable_cqc(f: &Formula) -> Result<Option<GroundSubstitution>> {
    f.check_lang(Lang::FirstOrder)?;
    first_ground_unifier(f, &f.signature()?)
}

fn cpc_valid(f: &Formula) -> Result<bool> {
    Ok(decide_cpc(f)?.is_valid())
}

fn rule_letters(rule: &Rule) -> Signature {
    Signature::propositional(formula::and(rule.premise(), rule.conclusion()).letters())
}

/// Brute-force admissibility over ground substitutions: the first σ making
/// every premise true and every conclusion false, if any.
pub fn ground_oracle_cpc(rule: &Rule) -> Result<Option<GroundSubstitution>> {
    rule.check_lang(Lang::Propositional)?;
    'outer: for tau in ground_substitutions(&rule_letters(rule)) {
        for p in rule.premises() {
            if !constant_fold(&tau.apply(p)?)? {
                continue 'outer;
            }
        }
        for c in rule.conclusions() {
            if constant_fold(&tau.apply(c)?)? {
                continue 'outer;
            }
        }
        return Ok(Some(tau));
    }
    Ok(None)
}

/// Exact CPC admissibility. Passive rules are admissible; otherwise the rule
/// is admissible iff the premises derive one of the conclusions. Refutations
/// use a ground substitution when one exists, and otherwise the substitution
/// p ↦ (A ∧ p) ∨ (¬A ∧ τ(p)) built from a ground unifier τ of the premises A.
pub fn admissible_cpc(rule: &Rule) -> Result<AdmissibilityVerdict> {
    rule.check_lang(Lang::Propositional)?;
    let a = rule.premise();
    let Some(tau) = unifiable_cpc(&a)? else {
        return Ok(AdmissibilityVerdict::Admissible(trivial_trace(
            Reason::Passive,
            rule,
        )));
    };
    for b in rule.conclusions() {
        if cpc_valid(&formula::implies(a.clone(), b.clone()))? {
            return Ok(AdmissibilityVerdict::Admissible(trivial_trace(
                Reason::Derivable,
                rule,
            )));
        }
    }
    let letters = rule_letters(rule);
    let (assignment, ground) = match ground_oracle_cpc(rule)? {
        Some(g) => (g.to_assignment(&letters)?, Some(g)),
        None => {
            let pairs = letters.symbols().iter().map(|(p, _)| {
                let t = if tau.get(p).unwrap_or(false) {
                    Formula::Top
                } else {
                    Formula::Bot
                };
                let img = formula::or(
                    formula::and(a.clone(), formula::atom(p)),
                    formula::and(formula::not(a.clone()), t),
                );
                (p.clone(), img)
            });
            (Assignment::propositional(pairs), None)
        }
    };
    let premises = rule
        .premises()
        .iter()
        .map(|f| assignment.apply(f))
        .collect::<Result<Vec<_>>>()?;
    let conclusions = rule
        .conclusions()
        .iter()
        .map(|f| assignment.apply(f))
        .collect::<Result<Vec<_>>>()?;
    for p in &premises {
        if !cpc_valid(p)? {
            return Err(Error::Inconsistency(format!(
                "witness premise `{p}` is not a tautology"
            )));
        }
    }
    for c in &conclusions {
        if cpc_valid(c)? {
            return Err(Error::Inconsistency(format!(
                "witness conclusion `{c}` is a tautology"
            )));
        }
    }
    Ok(AdmissibilityVerdict::NotAdmissible(Box::new(Witness {
        assignment,
        ground,
        premises,
        conclusions,
        structure: None,
    })))
}

fn closure(a: &Formula) -> Formula {
    let vars: Vec<String> = a.free_vars().into_iter().collect();
    formula::forall_all(&vars, a.clone())
}

/// σ(P) = ∀x̄A → P(x̄) when τ(P) is true and ∀x̄A ∧ P(x̄) when it is false,
/// for every symbol P of `sig`.
pub fn sigma_construction_cqc(
    a: &Formula,
    tau: &GroundSubstitution,
    sig: &Signature,
) -> Result<Assignment> {
    let sig = sig.merge(&a.signature()?)?;
    if !constant_fold(&tau.apply(a)?)? {
        return Err(Error::Precondition(format!("{tau} does not unify `{a}`")));
    }
    let ca = closure(a);
    let mut sigma = Assignment::new();
    for (p, arity) in sig.symbols() {
        let value = tau.get(p).ok_or_else(|| Error::Uncovered(p.clone()))?;
        let args: Vec<String> = (0..*arity).map(crate::subst::param).collect();
        let body = Formula::Atom(p.clone(), args);
        let img = if value {
            formula::implies(ca.clone(), body)
        } else {
            formula::and(ca.clone(), body)
        };
        sigma.insert(p, *arity, img)?;
    }
    Ok(sigma)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimFailure {
    pub structure: String,
    pub env: Vec<(String, usize)>,
}

/// Outcome of checking σ(B) against its predicted classical equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClaimReport {
    pub sigma_b: String,
    pub tau_b: bool,
    pub predicted: String,
    pub structures_checked: usize,
    pub environments_checked: usize,
    pub failures: Vec<ClaimFailure>,
}

fn environments(vars: &[String], size: usize) -> Vec<Vec<(String, usize)>> {
    let mut out = vec![Vec::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                (0..size).map(move |d| {
                    let mut e = env.clone();
                    e.push((v.clone(), d));
                    e
                })
            })
            .collect();
    }
    out
}

/// Checks σ(B) ↔ (∀x̄A → B) when τ(B) folds to true, and σ(B) ↔ (∀x̄A ∧ B)
/// otherwise, in every structure with at most `max_domain` elements.
pub fn verify_claim_cqc(
    a: &Formula,
    tau: &GroundSubstitution,
    b: &Formula,
    max_domain: usize,
) -> Result<ClaimReport> {
    let sig = a.signature()?.merge(&b.signature()?)?;
    let sigma = sigma_construction_cqc(a, tau, &sig)?;
    let sb = sigma.apply(b)?;
    let tau_b = constant_fold(&tau.apply(b)?)?;
    let ca = closure(a);
    let predicted = if tau_b {
        formula::implies(ca, b.clone())
    } else {
        formula::and(ca, b.clone())
    };
    let mut vars: Vec<String> = sb
        .free_vars()
        .union(&predicted.free_vars())
        .cloned()
        .collect();
    vars.sort();
    let mut report = ClaimReport {
        sigma_b: sb.to_string(),
        tau_b,
        predicted: predicted.to_string(),
        structures_checked: 0,
        environments_checked: 0,
        failures: Vec::new(),
    };
    for size in 1..=max_domain {
        let envs = environments(&vars, size);
        for s in Structure::enumerate(&sig, size) {
            report.structures_checked += 1;
            for env in &envs {
                report.environments_checked += 1;
                if s.eval(&sb, env)? != s.eval(&predicted, env)? {
                    report.failures.push(ClaimFailure {
                        structure: s.to_string(),
                        env: env.clone(),
                    });
                }
            }
        }
    }
    Ok(report)
}

fn holds_everywhere(f: &Formula, sig: &Signature, bound: usize) -> Result<bool> {
    let cf = closure(f);
    for size in 1..=bound {
        for s in Structure::enumerate(sig, size) {
            if !s.eval_sentence(&cf)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Ground-substitution layer for classical predicate logic on a rule A / B.
/// Passive rules are admissible. For unifiable A a structure of size at most
/// `model_bound` satisfying ∀A and refuting ∀B gives a witness σ from the
/// σ-construction; anything else is reported as unknown.
pub fn admissible_cqc_ground(rule: &Rule, model_bound: usize) -> Result<AdmissibilityVerdict> {
    rule.check_lang(Lang::FirstOrder)?;
    if rule.conclusions().len() != 1 {
        return Err(Error::InvalidRule(
            "the predicate layer takes exactly one conclusion".into(),
        ));
    }
    let a = rule.premise();
    let b = rule.conclusion();
    let Some(mut tau) = unifiable_cqc(&a)? else {
        return Ok(AdmissibilityVerdict::Admissible(trivial_trace(
            Reason::Passive,
            rule,
        )));
    };
    let sig = a.signature()?.merge(&b.signature()?)?;
    for (p, _) in sig.symbols() {
        if tau.get(p).is_none() {
            tau.set(p, false);
        }
    }
    let (ca, cb) = (closure(&a), closure(&b));
    for size in 1..=model_bound {
        for s in Structure::enumerate(&sig, size) {
            if !(s.eval_sentence(&ca)? && !s.eval_sentence(&cb)?) {
                continue;
            }
            let sigma = sigma_construction_cqc(&a, &tau, &sig)?;
            let sa = sigma.apply(&a)?;
            let sb = sigma.apply(&b)?;
            if !holds_everywhere(&sa, &sig, model_bound)? {
                return Err(Error::Inconsistency(format!(
                    "σ(A) = `{sa}` fails in a small structure"
                )));
            }
            if s.eval_sentence(&closure(&sb))? {
                return Err(Error::Inconsistency(format!(
                    "σ(B) = `{sb}` holds in the refuting structure"
                )));
            }
            return Ok(AdmissibilityVerdict::NotAdmissible(Box::new(Witness {
                assignment: sigma,
                ground: None,
                premises: vec![sa],
                conclusions: vec![sb],
                structure: Some(s),
            })));
        }
    }
    Ok(AdmissibilityVerdict::Unknown(Bounds {
        saturation_bound: 0,
        depth: 0,
        candidates_tried: 0,
        model_bound,
        note: format!(
            "no structure with at most {model_bound} elements separates premise and conclusion; \
             derivability in predicate logic is not decided here"
        ),
    }))
}
