use std::collections::BTreeSet;

use super::classical::unifiable_cpc;
use super::{
    trivial_trace, AdmissibilityVerdict, Bounds, Logic, Reason, Rule, Step, Trace, VisserInstance,
    Witness,
};
use crate::error::Result;
use crate::formula::{self, Formula, Lang};
use crate::gen::formulas_by_size;
use crate::kripke_prop::{decide_cpc, ipc_entails, ipc_provable};
use crate::subst::{constant_fold, ground_substitutions, Assignment, GroundSubstitution};
use crate::Signature;

/// Limits of the refutation search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefutationBudget {
    /// Largest formula size in the substitution pool.
    pub pool_size: usize,
    /// Number of rule letters the pool formulas may mention.
    pub pool_atoms: usize,
    /// Maximum number of candidate substitutions examined.
    pub max_candidates: usize,
}

impl Default for RefutationBudget {
    fn default() -> Self {
        RefutationBudget {
            pool_size: 3,
            pool_atoms: 2,
            max_candidates: 5000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IpcAdmissibilityOptions {
    /// Largest n of a Visser rule V_n tried during saturation.
    pub saturation_bound: usize,
    /// Rounds of saturation.
    pub depth: usize,
    /// Cap on Visser steps over all rounds.
    pub max_steps: usize,
    pub refutation: RefutationBudget,
}

impl Default for IpcAdmissibilityOptions {
    fn default() -> Self {
        IpcAdmissibilityOptions {
            saturation_bound: 2,
            depth: 3,
            max_steps: 48,
            refutation: RefutationBudget::default(),
        }
    }
}

fn provable(f: &Formula, logic: Logic) -> Result<bool> {
    match logic {
        Logic::Ipc => ipc_provable(f),
        Logic::Cpc => Ok(decide_cpc(f)?.is_valid()),
    }
}

fn flatten_and(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        Formula::Top => {}
        other => out.push(other.clone()),
    }
}

fn flatten_or(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Or(a, b) => {
            flatten_or(a, out);
            flatten_or(b, out);
        }
        other => out.push(other.clone()),
    }
}

fn left_or(parts: &[Formula]) -> Formula {
    let mut it = parts.iter().cloned();
    let first = it.next().unwrap_or(Formula::Bot);
    it.fold(first, formula::or)
}

/// Visser instances whose premise is read off `fact`: one disjunct X -> Y of
/// the fact is the main implication and the remaining disjuncts form C.
fn candidates(fact: &Formula, bound: usize) -> Vec<VisserInstance> {
    let mut disjuncts = Vec::new();
    flatten_or(fact, &mut disjuncts);
    let mut out = Vec::new();
    for i in 0..disjuncts.len() {
        let (x, y) = match &disjuncts[i] {
            Formula::Implies(x, y) => ((**x).clone(), (**y).clone()),
            Formula::Not(x) => ((**x).clone(), Formula::Bot),
            _ => continue,
        };
        let rest: Vec<Formula> = disjuncts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, d)| d.clone())
            .collect();
        let c = if rest.is_empty() {
            None
        } else {
            Some(left_or(&rest))
        };
        let mut conj = Vec::new();
        flatten_and(&x, &mut conj);
        if conj.is_empty() || conj.len() > bound {
            continue;
        }
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for part in conj {
            match part {
                Formula::Implies(l, r) => {
                    a.push(*l);
                    b.push(*r);
                }
                Formula::Not(l) => {
                    a.push(*l);
                    b.push(Formula::Bot);
                }
                other => {
                    a.push(Formula::Top);
                    b.push(other);
                }
            }
        }
        let mut ys = Vec::new();
        flatten_or(&y, &mut ys);
        let splits: Vec<(Formula, Formula)> = if ys.len() == 1 {
            vec![(ys[0].clone(), Formula::Bot)]
        } else {
            (1..ys.len())
                .map(|k| (left_or(&ys[..k]), left_or(&ys[k..])))
                .collect()
        };
        for (l, r) in splits {
            let mut comps = a.clone();
            comps.push(l);
            comps.push(r);
            if let Ok(inst) = VisserInstance::new(b.len(), comps, b.clone(), c.clone()) {
                out.push(inst);
            }
        }
    }
    out
}

fn saturate(a: &Formula, goal: &Formula, opts: &IpcAdmissibilityOptions) -> Result<Option<Trace>> {
    let mut facts = Vec::new();
    flatten_and(a, &mut facts);
    let mut steps = Vec::new();
    let mut tried: BTreeSet<Formula> = BTreeSet::new();
    for _ in 0..opts.depth {
        let snapshot = facts.clone();
        let mut progressed = false;
        for fact in &snapshot {
            for inst in candidates(fact, opts.saturation_bound) {
                if steps.len() >= opts.max_steps {
                    return Ok(None);
                }
                let premise = inst.premise();
                let conclusion = inst.conclusion();
                if facts.contains(&conclusion) || !tried.insert(premise.clone()) {
                    continue;
                }
                if !ipc_entails(&facts, &premise)? {
                    continue;
                }
                steps.push(Step {
                    instance: inst,
                    premise,
                    conclusion: conclusion.clone(),
                    facts: facts.clone(),
                });
                facts.push(conclusion);
                progressed = true;
                if ipc_entails(&facts, goal)? {
                    return Ok(Some(Trace {
                        reason: Reason::Saturation,
                        steps,
                        facts,
                        goal: goal.clone(),
                    }));
                }
            }
        }
        if !progressed {
            break;
        }
    }
    Ok(None)
}

fn letters_of(rule: &Rule) -> Vec<String> {
    formula::and(rule.premise(), rule.conclusion())
        .letters()
        .into_iter()
        .collect()
}

/// Formulas over the first `atoms` letters with at most `size` nodes, one per
/// equivalence class of the logic, smallest first.
fn pool(letters: &[String], budget: &RefutationBudget, logic: Logic) -> Result<Vec<Formula>> {
    let names: Vec<&str> = letters
        .iter()
        .take(budget.pool_atoms)
        .map(String::as_str)
        .collect();
    let mut reps: Vec<Formula> = Vec::new();
    for level in formulas_by_size(&names, budget.pool_size) {
        for f in level {
            let mut fresh = true;
            for r in &reps {
                if provable(&formula::iff(f.clone(), r.clone()), logic)? {
                    fresh = false;
                    break;
                }
            }
            if fresh {
                reps.push(f);
            }
        }
    }
    Ok(reps)
}

fn try_candidate(
    rule: &Rule,
    sigma: &Assignment,
    logic: Logic,
) -> Result<Option<(Vec<Formula>, Vec<Formula>)>> {
    let mut premises = Vec::new();
    for p in rule.premises() {
        let img = sigma.apply(p)?;
        if !provable(&img, logic)? {
            return Ok(None);
        }
        premises.push(img);
    }
    let mut conclusions = Vec::new();
    for c in rule.conclusions() {
        let img = sigma.apply(c)?;
        if provable(&img, logic)? {
            return Ok(None);
        }
        conclusions.push(img);
    }
    Ok(Some((premises, conclusions)))
}

/// Searches for σ making every premise provable and no conclusion provable.
/// Candidates in order: the identity, every ground substitution, then every
/// map from the rule letters into the pool (first letter most significant).
pub fn refute_admissibility(
    rule: &Rule,
    logic: Logic,
    budget: &RefutationBudget,
) -> Result<(Option<Witness>, usize)> {
    rule.check_lang(Lang::Propositional)?;
    let letters = letters_of(rule);
    let mut tried = 0usize;

    let identity = Assignment::propositional(letters.iter().map(|p| (p.clone(), formula::atom(p))));
    tried += 1;
    if let Some((premises, conclusions)) = try_candidate(rule, &identity, logic)? {
        return Ok((
            Some(Witness {
                assignment: identity,
                ground: None,
                premises,
                conclusions,
                structure: None,
            }),
            tried,
        ));
    }

    let sig = Signature::propositional(letters.clone());
    for g in ground_substitutions(&sig) {
        if tried >= budget.max_candidates {
            return Ok((None, tried));
        }
        tried += 1;
        let sigma = g.to_assignment(&sig)?;
        if let Some((premises, conclusions)) = try_candidate(rule, &sigma, logic)? {
            return Ok((
                Some(Witness {
                    assignment: sigma,
                    ground: Some(g),
                    premises,
                    conclusions,
                    structure: None,
                }),
                tried,
            ));
        }
    }

    let reps = pool(&letters, budget, logic)?;
    let k = letters.len();
    if k == 0 || reps.is_empty() {
        return Ok((None, tried));
    }
    let mut digits = vec![0usize; k];
    loop {
        if tried >= budget.max_candidates {
            return Ok((None, tried));
        }
        tried += 1;
        let sigma = Assignment::propositional(
            letters
                .iter()
                .zip(&digits)
                .map(|(p, &d)| (p.clone(), reps[d].clone())),
        );
        if let Some((premises, conclusions)) = try_candidate(rule, &sigma, logic)? {
            return Ok((
                Some(Witness {
                    assignment: sigma,
                    ground: None,
                    premises,
                    conclusions,
                    structure: None,
                }),
                tried,
            ));
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Ok((None, tried));
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < reps.len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

/// Semi-decision of IPC admissibility. Positive answers come from
/// derivability, passivity, or Visser saturation (the premise conjunction may
/// be used as an assumption); negative answers come with a verified witness.
/// Several conclusions are read as their disjunction, which IPC's disjunction
/// property makes equivalent.
pub fn admissible_ipc(rule: &Rule, opts: &IpcAdmissibilityOptions) -> Result<AdmissibilityVerdict> {
    rule.check_lang(Lang::Propositional)?;
    let a = rule.premise();
    let b = rule.conclusion();
    if ipc_entails(&[a.clone()], &b)? {
        return Ok(AdmissibilityVerdict::Admissible(trivial_trace(
            Reason::Derivable,
            rule,
        )));
    }
    if unifiable_cpc(&a)?.is_none() {
        return Ok(AdmissibilityVerdict::Admissible(trivial_trace(
            Reason::Passive,
            rule,
        )));
    }
    if let Some(trace) = saturate(&a, &b, opts)? {
        return Ok(AdmissibilityVerdict::Admissible(trace));
    }
    let (witness, tried) = refute_admissibility(rule, Logic::Ipc, &opts.refutation)?;
    Ok(match witness {
        Some(w) => AdmissibilityVerdict::NotAdmissible(Box::new(w)),
        None => AdmissibilityVerdict::Unknown(Bounds {
            saturation_bound: opts.saturation_bound,
            depth: opts.depth,
            candidates_tried: tried,
            model_bound: 0,
            note: "no Visser derivation and no refuting substitution within the bounds".into(),
        }),
    })
}

/// Necessary condition for IPC admissibility: every ground substitution that
/// makes all premises provable makes some conclusion provable. Returns the
/// first ground substitution violating it.
pub fn ground_bound_check_ipc(rule: &Rule) -> Result<Option<GroundSubstitution>> {
    rule.check_lang(Lang::Propositional)?;
    let sig = Signature::propositional(letters_of(rule));
    'outer: for g in ground_substitutions(&sig) {
        for p in rule.premises() {
            if !ipc_provable(&g.apply(p)?)? {
                continue 'outer;
            }
        }
        for c in rule.conclusions() {
            if ipc_provable(&g.apply(c)?)? {
                continue 'outer;
            }
        }
        debug_assert!(rule
            .premises()
            .iter()
            .all(|p| constant_fold(&g.apply(p).unwrap()).unwrap()));
        return Ok(Some(g));
    }
    Ok(None)
}
