//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints its PASS/FAIL line even when it passes.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cstwb::admissibility::{
    admissible_cpc, admissible_ipc, derivable, sigma_construction_cqc, unifiable_cqc,
    verify_claim_cqc, visser_rule, AdmissibilityVerdict, IpcAdmissibilityOptions, Logic, Reason,
    Rule,
};
use cstwb::checks::property_suite;
use cstwb::cli::run;
use cstwb::dejongh::{build_tree_model, dejongh_counterexample, SplittingTree};
use cstwb::extension::{dp_demo, extend, Extension, RootExtensionConfig};
use cstwb::formula::{self, Formula};
use cstwb::gen::{for_each_of_size, formulas_by_size, random_prop};
use cstwb::kripke_prop::oracle::{tree_oracle, OracleVerdict};
use cstwb::kripke_prop::{decide_cpc, decide_ipc, force_prop, node_budget, CpcVerdict, Verdict};
use cstwb::kripke_set::{
    cardinality_sentence, check_coherence, force_set, vrank_model, Axiom, Env, SetKripkeModel,
};
use cstwb::subst::{constant_fold, ground_substitutions};
use cstwb::{parse_formula, Lang};

struct Outcome {
    passed: bool,
    detail: String,
    /// Failures backed by an independent impossibility argument.
    confirmed_impossible: bool,
}

fn ok(passed: bool, detail: String) -> Outcome {
    Outcome {
        passed,
        detail,
        confirmed_impossible: false,
    }
}

fn within(t: Instant, limit: u64) -> (bool, String) {
    let e = t.elapsed();
    (
        e <= Duration::from_secs(limit),
        format!("{:.2}s of {limit}s", e.as_secs_f64()),
    )
}

fn prop(s: &str) -> Formula {
    parse_formula(s, Lang::Propositional).unwrap()
}

fn set(s: &str) -> Formula {
    parse_formula(s, Lang::SetTheoretic).unwrap()
}

// Truth tables written out here rather than reusing the library's evaluator.
fn truth(f: &Formula, val: &BTreeMap<String, bool>) -> bool {
    match f {
        Formula::Atom(p, _) => val[p],
        Formula::Top => true,
        Formula::Bot => false,
        Formula::Not(a) => !truth(a, val),
        Formula::And(a, b) => truth(a, val) && truth(b, val),
        Formula::Or(a, b) => truth(a, val) || truth(b, val),
        Formula::Implies(a, b) => !truth(a, val) || truth(b, val),
        _ => unreachable!("propositional only"),
    }
}

fn valuations(letters: &BTreeSet<String>) -> Vec<BTreeMap<String, bool>> {
    let ls: Vec<&String> = letters.iter().collect();
    (0..1u32 << ls.len())
        .map(|bits| {
            ls.iter()
                .enumerate()
                .map(|(i, p)| ((*p).clone(), bits >> i & 1 == 1))
                .collect()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let levels = formulas_by_size(&["p", "q", "r"], 7);
    let mut count = 0usize;
    let mut bad: Vec<String> = Vec::new();
    let mut check = |f: Formula| {
        count += 1;
        let ipc = decide_ipc(&f).unwrap();
        let oracle = tree_oracle(&f, node_budget(&f, 9).unwrap()).unwrap();
        if ipc.is_valid() != matches!(oracle, OracleVerdict::ValidUpTo(_)) {
            bad.push(format!("oracle disagrees on {f}"));
        }
        if let Verdict::Countermodel { model, root } = &ipc {
            if force_prop(model, *root, &f).unwrap() {
                bad.push(format!("countermodel forces {f}"));
            }
        }
        match decide_cpc(&f).unwrap() {
            CpcVerdict::Valid => {}
            CpcVerdict::Falsifying(val) => {
                if ipc.is_valid() {
                    bad.push(format!("IPC-valid but not CPC-valid: {f}"));
                }
                if truth(&f, &val) {
                    bad.push(format!("valuation does not falsify {f}"));
                }
            }
        }
    };
    for level in &levels[1..] {
        for f in level {
            check(f.clone());
        }
    }
    for_each_of_size(&levels, 8, &mut check);
    let (fast, time) = within(t, 60);
    ok(
        bad.is_empty() && fast,
        format!("{count} formulas, {} disagreements, {time}", bad.len()),
    )
}

fn random_rule(rng: &mut ChaCha8Rng) -> Rule {
    let letters = ["p", "q", "r"];
    let np = rng.gen_range(0..=2);
    let nc = rng.gen_range(1..=2);
    let p = (0..np).map(|_| random_prop(rng, &letters, 6)).collect();
    let c = (0..nc).map(|_| random_prop(rng, &letters, 6)).collect();
    Rule::new(p, c).unwrap()
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = Vec::new();
    let (mut admissible, mut unifiable, mut single) = (0, 0, 0);
    let cases = 1200;
    for _ in 0..cases {
        let rule = random_rule(&mut rng);
        let mut letters = BTreeSet::new();
        for f in rule.premises().iter().chain(rule.conclusions()) {
            letters.extend(f.letters());
        }
        let vals = valuations(&letters);
        let unif = vals
            .iter()
            .any(|v| rule.premises().iter().all(|f| truth(f, v)));
        let sat = |v: &BTreeMap<String, bool>| rule.premises().iter().all(|f| truth(f, v));
        let oracle = if rule.conclusions().len() == 1 {
            // Ground substitutions are exactly valuations of the rule's letters.
            vals.iter()
                .all(|v| !sat(v) || truth(&rule.conclusions()[0], v))
        } else {
            // Ground substitutions say nothing about several conclusions (p / q, ~q
            // holds under each of them); unifiable premises have a projective
            // unifier, so some single conclusion must follow.
            !unif
                || rule
                    .conclusions()
                    .iter()
                    .any(|c| vals.iter().all(|v| !sat(v) || truth(c, v)))
        };
        let verdict = admissible_cpc(&rule).unwrap();
        if verdict.is_admissible() != oracle {
            bad.push(format!("{rule}: got {}", verdict.label()));
        }
        if let AdmissibilityVerdict::NotAdmissible(w) = &verdict {
            // Images of premises must be tautologies, images of conclusions not.
            let image = |f: &Formula| w.assignment.apply(f).unwrap();
            let taut = |f: Formula| valuations(&f.letters()).iter().all(|v| truth(&f, v));
            if !rule.premises().iter().all(|f| taut(image(f)))
                || rule.conclusions().iter().any(|f| taut(image(f)))
            {
                bad.push(format!("{rule}: witness does not refute"));
            }
        }
        single += (rule.conclusions().len() == 1) as usize;
        if unif && rule.conclusions().len() == 1 {
            unifiable += 1;
            if oracle != derivable(&rule, Logic::Cpc).unwrap() {
                bad.push(format!("{rule}: admissible and derivable differ"));
            }
        }
        admissible += oracle as usize;
    }
    for b in bad.iter().take(10) {
        eprintln!("  {b}");
    }
    let (fast, time) = within(t, 30);
    ok(
        bad.is_empty() && single >= 500 && fast,
        format!(
            "{cases} rules ({single} single-conclusion, {admissible} admissible, {unifiable} unifiable single-conclusion), {} mismatches, {time}",
            bad.len()
        ),
    )
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let text = "exists x. P(x) & exists x. ~P(x)";
    let f = parse_formula(text, Lang::FirstOrder).unwrap();
    let sig = f.signature().unwrap();
    let folds: Vec<bool> = ground_substitutions(&sig)
        .map(|g| constant_fold(&g.apply(&f).unwrap()).unwrap())
        .collect();
    let cli = run(&["unify", "--logic", "cqc", text]);
    let dir = std::env::temp_dir().join(format!("wb-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rule.json");
    std::fs::write(
        &path,
        format!(r#"{{"premises": ["{text}"], "conclusions": ["false"]}}"#),
    )
    .unwrap();
    let adm = run(&[
        "--json",
        "admissible",
        "--logic",
        "cqc-ground",
        path.to_str().unwrap(),
    ]);
    let j: serde_json::Value = serde_json::from_str(&adm.stdout).unwrap_or_default();
    let passed = folds == [false, false]
        && unifiable_cqc(&f).unwrap().is_none()
        && cli.code == 1
        && cli.stdout.starts_with("NOT_UNIFIABLE")
        && adm.code == 0
        && j["verdict"] == "ADMISSIBLE"
        && j["trace"]["reason"] == "passive";
    let (fast, time) = within(t, 1);
    ok(
        passed && fast,
        format!(
            "ground folds {folds:?}, unify exit {}, rule {} ({}), {time}",
            cli.code, j["verdict"], j["trace"]["reason"]
        ),
    )
}

fn random_fo(rng: &mut ChaCha8Rng, scope: &mut Vec<String>, size: usize) -> Formula {
    if size <= 1 {
        return match rng.gen_range(0..4) {
            0 => formula::atom("r"),
            1 if !scope.is_empty() => formula::pred("Q", &[&scope[rng.gen_range(0..scope.len())]]),
            _ if !scope.is_empty() => formula::pred("P", &[&scope[rng.gen_range(0..scope.len())]]),
            _ => formula::atom("s"),
        };
    }
    if rng.gen_bool(0.3) {
        let v = format!("x{}", scope.len());
        scope.push(v.clone());
        let body = random_fo(rng, scope, size - 1);
        scope.pop();
        return if rng.gen_bool(0.5) {
            formula::forall(&v, body)
        } else {
            formula::exists(&v, body)
        };
    }
    if size == 2 || rng.gen_bool(0.2) {
        return formula::not(random_fo(rng, scope, size - 1));
    }
    let l = rng.gen_range(1..size - 1);
    let a = random_fo(rng, scope, l);
    let b = random_fo(rng, scope, size - 1 - l);
    match rng.gen_range(0..3) {
        0 => formula::and(a, b),
        1 => formula::or(a, b),
        _ => formula::implies(a, b),
    }
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut triples = 0;
    let mut failures = 0;
    let mut structures = 0;
    let mut not_unifier = 0;
    while triples < 24 {
        let free = vec!["y".to_string()];
        let (sa, sb) = (rng.gen_range(3..=7), rng.gen_range(2..=6));
        let a = random_fo(&mut rng, &mut free.clone(), sa);
        let b = random_fo(&mut rng, &mut free.clone(), sb);
        let Some(mut tau) = unifiable_cqc(&a).unwrap() else {
            continue;
        };
        let sig = a
            .signature()
            .unwrap()
            .merge(&b.signature().unwrap())
            .unwrap();
        for (p, _) in sig.symbols() {
            if tau.get(p).is_none() {
                tau.set(p, false);
            }
        }
        triples += 1;
        let r = verify_claim_cqc(&a, &tau, &b, 3).unwrap();
        failures += r.failures.len();
        structures += r.structures_checked;
        // σ must unify A: its image holds in every small structure.
        let sigma = sigma_construction_cqc(&a, &tau, &sig).unwrap();
        let sa = formula::forall_all(
            &sigma
                .apply(&a)
                .unwrap()
                .free_vars()
                .into_iter()
                .collect::<Vec<_>>(),
            sigma.apply(&a).unwrap(),
        );
        for size in 1..=3 {
            for s in cstwb::structure::Structure::enumerate(&sig, size) {
                if !s.eval_sentence(&sa).unwrap() {
                    not_unifier += 1;
                }
            }
        }
    }
    let (fast, time) = within(t, 60);
    ok(
        failures == 0 && not_unifier == 0 && fast,
        format!("{triples} triples, {structures} structures, {failures} claim failures, {not_unifier} non-unifier cases, {time}"),
    )
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = IpcAdmissibilityOptions::default();
    let mut sampled = 0;
    let mut refuted = Vec::new();
    for n in 1..=3 {
        for _ in 0..20 {
            let a = (0..n + 2)
                .map(|_| random_prop(&mut rng, &["p", "q"], 3))
                .collect();
            let b = (0..n)
                .map(|_| random_prop(&mut rng, &["p", "q"], 3))
                .collect();
            let inst = visser_rule(n, false)
                .unwrap()
                .instantiate(a, b, None)
                .unwrap();
            sampled += 1;
            if admissible_ipc(&inst.rule(), &opts)
                .unwrap()
                .is_not_admissible()
            {
                refuted.push(inst.rule().to_string());
            }
        }
    }
    let harrop = Rule::parse(
        &["~p -> q | r"],
        &["(~p -> q) | (~p -> r)"],
        Lang::Propositional,
    )
    .unwrap();
    let mut trace_ok = false;
    let mut steps = 0;
    if let AdmissibilityVerdict::Admissible(tr) = admissible_ipc(&harrop, &opts).unwrap() {
        steps = tr.steps.len();
        let entails = |facts: &[Formula], g: &Formula| {
            decide_ipc(&formula::implies(formula::conj(facts.to_vec()), g.clone()))
                .unwrap()
                .is_valid()
        };
        trace_ok = tr.reason == Reason::Saturation
            && tr.steps.iter().all(|s| {
                s.premise == s.instance.premise()
                    && s.conclusion == s.instance.conclusion()
                    && entails(&s.facts, &s.premise)
            })
            && entails(&tr.facts, &tr.goal)
            && tr.steps.iter().all(|s| tr.facts.contains(&s.conclusion));
    }
    let (fast, time) = within(t, 30);
    ok(
        refuted.is_empty() && trace_ok && fast,
        format!(
            "{sampled} Visser instances, {} refuted; Harrop trace with {steps} steps {}, {time}",
            refuted.len(),
            if trace_ok {
                "re-verified"
            } else {
                "not verified"
            }
        ),
    )
}

/// Hereditarily finite sets, coded independently of the library.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Hf(BTreeSet<Hf>);

impl Hf {
    /// Element k of V_n: members are the set bits of k.
    fn decode(k: usize) -> Hf {
        Hf((0..usize::BITS as usize)
            .filter(|i| k >> i & 1 == 1)
            .map(Hf::decode)
            .collect())
    }

    fn rank(&self) -> usize {
        1 + self.0.iter().map(Hf::rank).max().unwrap_or(0)
    }

    fn pair(a: &Hf, b: &Hf) -> Hf {
        Hf([a.clone(), b.clone()].into())
    }

    fn union(&self) -> Hf {
        Hf(self.0.iter().flat_map(|y| y.0.iter().cloned()).collect())
    }

    fn power(&self) -> Hf {
        let xs: Vec<&Hf> = self.0.iter().collect();
        Hf((0..1usize << xs.len())
            .map(|bits| {
                Hf((0..xs.len())
                    .filter(|i| bits >> i & 1 == 1)
                    .map(|i| xs[i].clone())
                    .collect())
            })
            .collect())
    }

    fn functions(a: &Hf, b: &Hf) -> Hf {
        let dom: Vec<&Hf> = a.0.iter().collect();
        let cod: Vec<&Hf> = b.0.iter().collect();
        if cod.is_empty() {
            return Hf(if dom.is_empty() {
                [Hf(BTreeSet::new())].into()
            } else {
                BTreeSet::new()
            });
        }
        let mut out = BTreeSet::new();
        for code in 0..cod.len().pow(dom.len() as u32) {
            let mut c = code;
            let mut graph = BTreeSet::new();
            for y in &dom {
                let img = cod[c % cod.len()];
                c /= cod.len();
                graph.insert(Hf::pair(&Hf::pair(y, y), &Hf::pair(y, img)));
            }
            out.insert(Hf(graph));
        }
        Hf(out)
    }
}

struct WitnessCheck {
    name: &'static str,
    verified: bool,
    /// Set when the builder refused; true if the required set is too high in rank for the leaf.
    impossible: Option<bool>,
}

fn witness_checks(n: usize) -> (Extension, Vec<WitnessCheck>) {
    let leaf = SetKripkeModel::from_classical(&vrank_model(n).unwrap(), "v").unwrap();
    let mut ext = extend(
        &leaf,
        RootExtensionConfig {
            alpha_max: 2,
            ..Default::default()
        },
    )
    .unwrap();
    let leaf_node = 0;
    let hf = |ext: &Extension, x: usize| Hf::decode(ext.elements()[x].upper[leaf_node]);
    let too_high = |h: Hf| h.rank() > n;
    let mut out = Vec::new();
    let mut record = |name,
                      ext: &Extension,
                      res: cstwb::Result<usize>,
                      axiom: Axiom,
                      params: Vec<usize>,
                      needed: Hf| {
        let check = match res {
            Ok(w) => WitnessCheck {
                name,
                verified: ext.verify_witness(&axiom, &params, w).unwrap(),
                impossible: None,
            },
            Err(_) => WitnessCheck {
                name,
                verified: false,
                impossible: Some(too_high(needed)),
            },
        };
        out.push(check);
    };
    let e = ext.witness_empty();
    record(
        "empty set",
        &ext,
        e.clone(),
        Axiom::EmptySet,
        vec![],
        Hf(BTreeSet::new()),
    );
    let empty = e.unwrap();
    // The parameter: the first root element of the highest rank reached.
    let top = (0..ext.elements().len())
        .max_by_key(|&x| (ext.elements()[x].rank, std::cmp::Reverse(x)))
        .unwrap();
    // Pairing and power set on the least instance, so a failure is about the leaf and not the parameter.
    let r = ext.witness_pair(empty, empty);
    let needed = Hf::pair(&hf(&ext, empty), &hf(&ext, empty));
    record("pairing", &ext, r, Axiom::Pair, vec![empty, empty], needed);
    let r = ext.witness_union(top);
    let needed = hf(&ext, top).union();
    record("union", &ext, r, Axiom::Union, vec![top], needed);
    for (name, phi) in [
        ("separation z in z", "z in z"),
        ("separation nonempty", "exists u. (u in z & u = u)"),
        ("separation empty members", "forall u. (u in z -> false)"),
    ] {
        let phi = set(phi);
        assert!(cstwb::kripke_set::is_bounded(&phi), "{phi} is not bounded");
        let r = ext.witness_separation(top, &phi, &[]);
        // Separation never leaves the leaf: the result is a subset of an existing set.
        record(
            name,
            &ext,
            r,
            Axiom::Separation(phi),
            vec![top],
            Hf(BTreeSet::new()),
        );
    }
    let r = ext.witness_power(empty);
    let needed = hf(&ext, empty).power();
    record("power set", &ext, r, Axiom::PowerSet, vec![empty], needed);
    let ident = set("z = y");
    let r = ext.witness_replacement(top, &ident);
    let needed = hf(&ext, top);
    record(
        "replacement identity",
        &ext,
        r,
        Axiom::Replacement(ident),
        vec![top],
        needed,
    );
    let single = ext.witness_pair(empty, empty);
    let needed_single = Hf::pair(&Hf(BTreeSet::new()), &Hf(BTreeSet::new()));
    match single {
        Ok(s) => {
            let needed = Hf::functions(&hf(&ext, s), &hf(&ext, s));
            let r = ext.witness_exponentiation(s, s);
            record(
                "exponentiation singleton",
                &ext,
                r,
                Axiom::Exponentiation,
                vec![s, s],
                needed,
            );
        }
        Err(_) => out.push(WitnessCheck {
            name: "exponentiation singleton",
            verified: false,
            impossible: Some(too_high(needed_single)),
        }),
    }
    (ext, out)
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let mut lines = Vec::new();
    let mut all = true;
    let mut all_confirmed = true;
    for n in 1..=3 {
        let (ext, checks) = witness_checks(n);
        let coherent = check_coherence(ext.model()).is_empty() && ext.validate().is_empty();
        let restriction = ext.restriction_is_identity();
        let wf = ext.root_well_founded();
        let base_ok = coherent && restriction && wf;
        all &= base_ok;
        all_confirmed &= base_ok;
        let mut failed = Vec::new();
        for c in &checks {
            if !c.verified {
                all = false;
                match c.impossible {
                    Some(true) => failed.push(format!("{} (needs rank > {n})", c.name)),
                    _ => {
                        all_confirmed = false;
                        failed.push(format!("{} (unexplained)", c.name));
                    }
                }
            }
        }
        lines.push(format!(
            "V_{n}: {} root elements, coherent {coherent}, restriction {restriction}, well-founded {wf}, {}/{} witnesses{}",
            ext.elements().len(),
            checks.iter().filter(|c| c.verified).count(),
            checks.len(),
            if failed.is_empty() { String::new() } else { format!(", missing: {}", failed.join(", ")) }
        ));
    }
    let (fast, time) = within(t, 120);
    Outcome {
        passed: all && fast,
        detail: format!("{}; {time}", lines.join("; ")),
        confirmed_impossible: all_confirmed && fast,
    }
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let stage = |n| SetKripkeModel::from_classical(&vrank_model(n).unwrap(), "v").unwrap();
    let (m1, m2) = (stage(2), stage(3));
    let e3 = cardinality_sentence(3, false).unwrap();
    let (phi, psi) = (e3.clone(), formula::not(e3));
    let (r, ext) = dp_demo(&m1, &m2, &phi, &psi, RootExtensionConfig::default()).unwrap();
    // Re-check directly on the returned model.
    let m = ext.model();
    let env = Env::new();
    let root = ext.root();
    let comp1 = m.node("0.v").unwrap();
    let comp2 = m.node("1.v").unwrap();
    let direct = !force_set(m, comp1, &phi, &env).unwrap()
        && !force_set(m, comp2, &psi, &env).unwrap()
        && !force_set(m, root, &formula::or(phi.clone(), psi.clone()), &env).unwrap();
    let (fast, time) = within(t, 10);
    ok(
        r.passed() && direct && fast,
        format!(
            "root forces phi|psi: {}, components refute: {}, {} root elements, {time}",
            r.root_forces_disjunction,
            !r.first_forces_phi && !r.second_forces_psi,
            r.root_elements
        ),
    )
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let mut parts = Vec::new();
    let mut all = true;
    for a in ["p | ~p", "~p | ~~p"] {
        let af = prop(a);
        let cfg = RootExtensionConfig::default();
        let r = dejongh_counterexample(&af, None, cfg).unwrap();
        let tree = SplittingTree::from_json(&r.tree).unwrap();
        let (m, model_of) = build_tree_model(&tree, cfg).unwrap();
        let mut exact = true;
        for (p, tp) in &r.translation {
            let tp = set(tp);
            let valued = tree.valuation().get(p).cloned().unwrap_or_default();
            for w in 0..tree.len() {
                exact &=
                    force_set(&m, model_of[w], &tp, &Env::new()).unwrap() == valued.contains(&w);
            }
        }
        let translated = set(&r.translated);
        let root_refutes = !force_set(&m, model_of[tree.root()], &translated, &Env::new()).unwrap();
        let tree_refutes = !force_prop(&tree.to_prop_model().unwrap(), tree.root(), &af).unwrap();
        let good = r.passed() && exact && root_refutes && tree_refutes;
        all &= good;
        parts.push(format!(
            "{a}: {} tree nodes, {} model nodes, matrix exact {exact}, root refutes {root_refutes}",
            tree.len(),
            m.len()
        ));
    }
    let (fast, time) = within(t, 60);
    ok(all && fast, format!("{}; {time}", parts.join("; ")))
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let r = property_suite(9, 1000).unwrap();
    let again = property_suite(9, 1000).unwrap();
    let (fast, time) = within(t, 60);
    ok(
        r.passed() && r.cases >= 1000 && r == again && fast,
        format!(
            "{} cases, {} propositional / {} set / {} extension checks, {} violations, {time} for two runs",
            r.cases,
            r.prop_checks,
            r.set_checks,
            r.extension_checks,
            r.violations.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("IPC/CPC engines against the tree oracle", criterion_1),
        (
            "CPC admissibility against ground substitutions",
            criterion_2,
        ),
        ("CQC unification counterexample", criterion_3),
        ("sigma-construction claim", criterion_4),
        ("Visser rules and the Harrop trace", criterion_5),
        ("root extension over V_1, V_2, V_3", criterion_6),
        ("disjunction-property demo", criterion_7),
        ("translation certificates", criterion_8),
        ("persistence and coherence suites", criterion_9),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut unexplained = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty()
            && !filter
                .iter()
                .any(|p| label.contains(p.as_str()) || name.contains(p.as_str()))
        {
            continue;
        }
        let o = f();
        println!(
            "{} {label}: {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.passed && !o.confirmed_impossible {
            unexplained += 1;
        }
    }
    if unexplained > 0 {
        eprintln!("{unexplained} criteria failed without an impossibility argument");
        std::process::exit(1);
    }
}
