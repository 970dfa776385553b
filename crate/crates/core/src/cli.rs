//! The `wb` command line.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::admissibility::{
    admissible_cpc, admissible_cqc_ground, admissible_ipc, sigma_construction_cqc, unifiable_cpc,
    unifiable_cqc, verify_claim_cqc, visser_rule, AdmissibilityVerdict, IpcAdmissibilityOptions,
    Rule, RuleJson,
};
use crate::checks::property_suite;
use crate::dejongh::{
    build_tree_model, dejongh_counterexample, distinguishing_sentences, verify_translation,
    SplittingTree, TreeJson,
};
use crate::error::{Error, Result};
use crate::extension::{dp_demo, extend, visser_semantic_demo, RootExtensionConfig, WitnessMode};
use crate::formula::{self, Formula, Lang};
use crate::kripke_prop::{
    decide_cpc, decide_ipc, force_prop, CpcVerdict, PropKripkeModel, PropModelJson, Verdict,
};
use crate::kripke_set::{
    cardinality_sentence, check_axiom, force_set, hf_prefix, vrank_model, Axiom, AxiomReport, Env,
    SetKripkeModel, SetModelJson,
};
use crate::parser::parse_formula;
use crate::subst::{Assignment, GroundSubstitution};

/// What a command produced: exit code and the two output streams.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_ERROR: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "wb",
    about = "Kripke models, admissible rules and set-theoretic root extensions"
)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProveLogic {
    Ipc,
    Cpc,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AdmLogic {
    Ipc,
    Cpc,
    CqcGround,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum UnifyLogic {
    Cpc,
    Cqc,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide validity of a propositional formula.
    Prove {
        #[arg(long, value_enum)]
        logic: ProveLogic,
        formula: String,
    },
    /// Decide admissibility of the rule in a JSON file.
    Admissible {
        #[arg(long, value_enum)]
        logic: AdmLogic,
        rule: String,
        /// Largest structure tried by the predicate layer.
        #[arg(long, default_value_t = 3)]
        model_bound: usize,
    },
    /// Look for a ground unifier.
    Unify {
        #[arg(long, value_enum)]
        logic: UnifyLogic,
        formula: String,
    },
    /// Build σ from the first ground unifier of A and check the claim for B.
    Sigma {
        formula: String,
        /// Defaults to the formula itself.
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
    },
    /// Model inspection.
    Model {
        #[command(subcommand)]
        action: ModelAction,
    },
    /// Add a new root below a set model.
    Extend {
        model: String,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        #[arg(long, default_value_t = 4096)]
        cap: usize,
        /// Only rank-1 elements.
        #[arg(long)]
        lazy: bool,
    },
    /// Check set-theoretic axioms at a node with rank-bounded quantifiers.
    Axioms {
        model: String,
        #[arg(long)]
        rank: usize,
        /// Defaults to the least node.
        #[arg(long)]
        node: Option<String>,
        /// Repeatable; defaults to all axioms without a scheme formula.
        #[arg(long = "axiom")]
        axioms: Vec<String>,
        /// Formula for scheme axioms.
        #[arg(long)]
        phi: Option<String>,
    },
    /// New root below two models refuting φ and ψ.
    DpDemo {
        #[arg(long)]
        m1: Option<String>,
        #[arg(long)]
        m2: Option<String>,
        #[arg(long)]
        phi: Option<String>,
        #[arg(long)]
        psi: Option<String>,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        #[arg(long, default_value_t = 4096)]
        cap: usize,
    },
    /// New root below n+2 stages refuting the tail of a Visser rule.
    VisserDemo {
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Translate along a splitting tree and certify a refutation.
    Dejongh {
        #[arg(long)]
        tree: Option<String>,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long, default_value_t = 2)]
        alpha: usize,
        #[arg(long, default_value_t = 4096)]
        cap: usize,
    },
    /// Seeded persistence and coherence checks.
    CheckProperties {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        cases: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ModelAction {
    /// Forcing of a formula at the nodes of a model file.
    Check {
        model: String,
        formula: String,
        #[arg(long)]
        node: Option<String>,
    },
}

/// Parses `argv` (without the program name) and runs one command.
pub fn run<S: AsRef<str>>(argv: &[S]) -> Outcome {
    let args = std::iter::once("wb").chain(argv.iter().map(|s| s.as_ref()));
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => Outcome {
                    code: EXIT_POSITIVE,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: format!("error[input]: {}", first_line(&e.to_string())),
                },
            };
        }
    };
    match dispatch(&cli) {
        Ok((code, text)) => Outcome {
            code,
            stdout: text,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error[{}]: {e}\n", e.kind()),
        },
    }
}

fn first_line(s: &str) -> String {
    let line = s.lines().next().unwrap_or("").trim_start_matches("error: ");
    format!("{line}\n")
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn ground_json(g: &GroundSubstitution) -> Value {
    Value::Object(g.iter().map(|(k, v)| (k.clone(), Value::Bool(v))).collect())
}

fn assignment_json(a: &Assignment) -> Value {
    Value::Object(
        a.iter()
            .map(|(k, (_, f))| (k.clone(), Value::String(f.to_string())))
            .collect(),
    )
}

fn verdict_json(v: &AdmissibilityVerdict) -> Value {
    match v {
        AdmissibilityVerdict::Admissible(trace) => json!({"verdict": v.label(), "trace": trace}),
        AdmissibilityVerdict::NotAdmissible(w) => json!({
            "verdict": v.label(),
            "witness": {
                "assignment": assignment_json(&w.assignment),
                "ground": w.ground.as_ref().map(ground_json),
                "premises": w.premises.iter().map(Formula::to_string).collect::<Vec<_>>(),
                "conclusions": w.conclusions.iter().map(Formula::to_string).collect::<Vec<_>>(),
                "structure": w.structure.as_ref().map(|s| s.to_string()),
            }
        }),
        AdmissibilityVerdict::Unknown(b) => json!({"verdict": v.label(), "bounds": b}),
    }
}

fn verdict_code(v: &AdmissibilityVerdict) -> i32 {
    match v {
        AdmissibilityVerdict::Admissible(_) => EXIT_POSITIVE,
        AdmissibilityVerdict::NotAdmissible(_) => EXIT_NEGATIVE,
        AdmissibilityVerdict::Unknown(_) => EXIT_UNKNOWN,
    }
}

fn verdict_text(v: &AdmissibilityVerdict) -> String {
    let mut s = format!("{}\n", v.label());
    match v {
        AdmissibilityVerdict::Admissible(t) => {
            let _ = writeln!(
                s,
                "reason: {}",
                serde_json::to_value(t.reason).unwrap().as_str().unwrap()
            );
            for (i, step) in t.steps.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "step {}: {}  gives  {}",
                    i + 1,
                    step.premise,
                    step.conclusion
                );
            }
        }
        AdmissibilityVerdict::NotAdmissible(w) => {
            for (p, (_, f)) in w.assignment.iter() {
                let _ = writeln!(s, "{p} := {f}");
            }
            if let Some(st) = &w.structure {
                let _ = writeln!(s, "structure: {st}");
            }
        }
        AdmissibilityVerdict::Unknown(b) => {
            let _ = writeln!(s, "{}", b.note);
        }
    }
    s
}

fn cfg(alpha: usize, cap: usize, lazy: bool) -> RootExtensionConfig {
    RootExtensionConfig {
        alpha_max: alpha,
        width_cap: cap,
        mode: if lazy {
            WitnessMode::Lazy
        } else {
            WitnessMode::Enumerate
        },
    }
}

fn load_set_model(path: &str) -> Result<SetKripkeModel> {
    let j: SetModelJson = serde_json::from_str(&read(path)?)?;
    SetKripkeModel::from_json(&j)
}

fn pick_node(m: &SetKripkeModel, node: &Option<String>) -> Result<usize> {
    match node {
        Some(n) => m.node(n),
        None => m
            .root()
            .ok_or_else(|| Error::Precondition("the model has no least node; pass --node".into())),
    }
}

fn dispatch(cli: &Cli) -> Result<(i32, String)> {
    let as_json = cli.json;
    let emit = |code: i32, v: Value, text: String| -> Result<(i32, String)> {
        Ok((code, if as_json { pretty(&v) } else { text }))
    };
    match &cli.command {
        Command::Prove { logic, formula } => {
            let f = parse_formula(formula, Lang::Propositional)?;
            match logic {
                ProveLogic::Ipc => match decide_ipc(&f)? {
                    Verdict::Valid => {
                        emit(EXIT_POSITIVE, json!({"verdict": "VALID"}), "VALID\n".into())
                    }
                    Verdict::Countermodel { model, root } => {
                        let cm = serde_json::to_value(model.to_json())?;
                        let v = json!({"verdict": "NOT_VALID", "countermodel": cm, "root": model.name(root)});
                        let text =
                            format!("NOT_VALID\nroot: {}\n{}", model.name(root), pretty(&cm));
                        emit(EXIT_NEGATIVE, v, text)
                    }
                },
                ProveLogic::Cpc => match decide_cpc(&f)? {
                    CpcVerdict::Valid => {
                        emit(EXIT_POSITIVE, json!({"verdict": "VALID"}), "VALID\n".into())
                    }
                    CpcVerdict::Falsifying(val) => {
                        let text = val
                            .iter()
                            .map(|(p, b)| format!("{p} = {b}\n"))
                            .collect::<String>();
                        emit(
                            EXIT_NEGATIVE,
                            json!({"verdict": "NOT_VALID", "falsifying": val}),
                            format!("NOT_VALID\n{text}"),
                        )
                    }
                },
            }
        }
        Command::Admissible {
            logic,
            rule,
            model_bound,
        } => {
            let rj: RuleJson = serde_json::from_str(&read(rule)?)?;
            let lang = match logic {
                AdmLogic::CqcGround => Lang::FirstOrder,
                _ => Lang::Propositional,
            };
            let rule = Rule::from_json(&rj, lang)?;
            let v = match logic {
                AdmLogic::Ipc => admissible_ipc(&rule, &IpcAdmissibilityOptions::default())?,
                AdmLogic::Cpc => admissible_cpc(&rule)?,
                AdmLogic::CqcGround => admissible_cqc_ground(&rule, *model_bound)?,
            };
            let mut j = verdict_json(&v);
            j["rule"] = Value::String(rule.to_string());
            emit(verdict_code(&v), j, verdict_text(&v))
        }
        Command::Unify { logic, formula } => {
            let (f, u) = match logic {
                UnifyLogic::Cpc => {
                    let f = parse_formula(formula, Lang::Propositional)?;
                    let u = unifiable_cpc(&f)?;
                    (f, u)
                }
                UnifyLogic::Cqc => {
                    let f = parse_formula(formula, Lang::FirstOrder)?;
                    let u = unifiable_cqc(&f)?;
                    (f, u)
                }
            };
            match u {
                Some(g) => emit(
                    EXIT_POSITIVE,
                    json!({"verdict": "UNIFIABLE", "formula": f.to_string(), "unifier": ground_json(&g)}),
                    format!("UNIFIABLE\n{g}\n"),
                ),
                None => emit(
                    EXIT_NEGATIVE,
                    json!({"verdict": "NOT_UNIFIABLE", "formula": f.to_string()}),
                    "NOT_UNIFIABLE\n".into(),
                ),
            }
        }
        Command::Sigma {
            formula,
            b,
            max_domain,
        } => {
            let a = parse_formula(formula, Lang::FirstOrder)?;
            let b = match b {
                Some(s) => parse_formula(s, Lang::FirstOrder)?,
                None => a.clone(),
            };
            let tau = unifiable_cqc(&a)?
                .ok_or_else(|| Error::Precondition(format!("`{a}` has no ground unifier")))?;
            let sig = a.signature()?.merge(&b.signature()?)?;
            let mut tau_full = tau.clone();
            for (p, _) in sig.symbols() {
                if tau_full.get(p).is_none() {
                    tau_full.set(p, false);
                }
            }
            let sigma = sigma_construction_cqc(&a, &tau_full, &sig)?;
            let claim = verify_claim_cqc(&a, &tau_full, &b, *max_domain)?;
            let code = if claim.failures.is_empty() {
                EXIT_POSITIVE
            } else {
                EXIT_NEGATIVE
            };
            let mut text = format!("tau: {tau_full}\n");
            for (p, (_, f)) in sigma.iter() {
                let _ = writeln!(text, "sigma({p}) = {f}");
            }
            let _ = writeln!(
                text,
                "claim: {} structures, {} failures",
                claim.structures_checked,
                claim.failures.len()
            );
            emit(
                code,
                json!({"tau": ground_json(&tau_full), "sigma": assignment_json(&sigma), "claim": claim}),
                text,
            )
        }
        Command::Model {
            action:
                ModelAction::Check {
                    model,
                    formula,
                    node,
                },
        } => {
            let raw: Value = serde_json::from_str(&read(model)?)?;
            let mut rows = Vec::new();
            if raw.get("domains").is_some() {
                let m = SetKripkeModel::from_json(&serde_json::from_value(raw)?)?;
                let f = parse_formula(formula, Lang::SetTheoretic)?;
                let nodes: Vec<usize> = match node {
                    Some(n) => vec![m.node(n)?],
                    None => (0..m.len()).collect(),
                };
                for v in nodes {
                    rows.push((m.nodes()[v].clone(), force_set(&m, v, &f, &Env::new())?));
                }
            } else {
                let pj: PropModelJson = serde_json::from_value(raw)?;
                let m = PropKripkeModel::from_json(&pj)?;
                let f = parse_formula(formula, Lang::Propositional)?;
                let nodes: Vec<usize> = match node {
                    Some(n) => vec![m.index(n)?],
                    None => (0..m.len()).collect(),
                };
                for v in nodes {
                    rows.push((m.name(v).to_string(), force_prop(&m, v, &f)?));
                }
            }
            let all = rows.iter().all(|(_, b)| *b);
            let text: String = rows
                .iter()
                .map(|(n, b)| format!("{n}: {}\n", if *b { "forced" } else { "not forced" }))
                .collect();
            let j = json!({"formula": formula, "forced": rows.iter().cloned().collect::<BTreeMap<_, _>>()});
            emit(if all { EXIT_POSITIVE } else { EXIT_NEGATIVE }, j, text)
        }
        Command::Extend {
            model,
            alpha,
            cap,
            lazy,
        } => {
            let m = load_set_model(model)?;
            let ext = extend(&m, cfg(*alpha, *cap, *lazy))?;
            let mut by_rank: BTreeMap<usize, usize> = BTreeMap::new();
            for e in ext.elements() {
                *by_rank.entry(e.rank).or_default() += 1;
            }
            let mut text = format!(
                "new root `{}` with {} elements\n",
                ext.model().nodes()[ext.root()],
                ext.elements().len()
            );
            for (r, c) in &by_rank {
                let _ = writeln!(text, "rank {r}: {c}");
            }
            emit(EXIT_POSITIVE, serde_json::to_value(ext.to_json())?, text)
        }
        Command::Axioms {
            model,
            rank,
            node,
            axioms,
            phi,
        } => {
            let m = load_set_model(model)?;
            let v = pick_node(&m, node)?;
            let phi = phi
                .as_deref()
                .map(|s| parse_formula(s, Lang::SetTheoretic))
                .transpose()?;
            let list: Vec<Axiom> = if axioms.is_empty() {
                Axiom::basic()
            } else {
                axioms
                    .iter()
                    .map(|a| Axiom::parse(a, phi.clone()))
                    .collect::<Result<_>>()?
            };
            let reports: Vec<AxiomReport> = list
                .iter()
                .map(|a| check_axiom(&m, a, v, *rank))
                .collect::<Result<_>>()?;
            let all = reports.iter().all(AxiomReport::passed);
            let mut text = String::new();
            for r in &reports {
                let _ = writeln!(
                    text,
                    "{}: {} ({} instances, {} failing)",
                    r.axiom,
                    if r.passed() { "pass" } else { "fail" },
                    r.instances,
                    r.failures.len()
                );
                for f in r.failures.iter().take(5) {
                    let ps: Vec<String> =
                        f.params.iter().map(|(x, a)| format!("{x}={a}")).collect();
                    let _ = writeln!(text, "  at {}: {}", f.node, ps.join(" "));
                }
            }
            emit(
                if all { EXIT_POSITIVE } else { EXIT_NEGATIVE },
                serde_json::to_value(&reports)?,
                text,
            )
        }
        Command::DpDemo {
            m1,
            m2,
            phi,
            psi,
            alpha,
            cap,
        } => {
            let stage = |n| SetKripkeModel::from_classical(&vrank_model(n)?, "v");
            let m1 = match m1 {
                Some(p) => load_set_model(p)?,
                None => stage(2)?,
            };
            let m2 = match m2 {
                Some(p) => load_set_model(p)?,
                None => stage(3)?,
            };
            let e3 = cardinality_sentence(3, false)?;
            let phi = match phi {
                Some(s) => parse_formula(s, Lang::SetTheoretic)?,
                None => e3.clone(),
            };
            let psi = match psi {
                Some(s) => parse_formula(s, Lang::SetTheoretic)?,
                None => formula::not(e3),
            };
            let (r, _) = dp_demo(&m1, &m2, &phi, &psi, cfg(*alpha, *cap, false))?;
            let text = format!(
                "first model forces phi: {}\nsecond model forces psi: {}\nroot forces phi: {}\nroot forces psi: {}\nroot forces phi | psi: {}\n",
                r.first_forces_phi, r.second_forces_psi, r.root_forces_phi, r.root_forces_psi, r.root_forces_disjunction
            );
            emit(
                if r.passed() {
                    EXIT_POSITIVE
                } else {
                    EXIT_NEGATIVE
                },
                serde_json::to_value(&r)?,
                text,
            )
        }
        Command::VisserDemo { n } => {
            if !(1..=2).contains(n) {
                return Err(Error::Precondition(
                    "the built-in demo supports n = 1 or 2".into(),
                ));
            }
            let a: Vec<Formula> = (1..=n + 2)
                .map(|j| formula::atom(&format!("a{j}")))
                .collect();
            let b: Vec<Formula> = (1..=*n).map(|i| formula::atom(&format!("b{i}"))).collect();
            let inst = visser_rule(*n, false)?.instantiate(a, b, None)?;
            let mut pairs = Vec::new();
            let mut models = Vec::new();
            // Component j has exactly j elements, so its cardinality sentence stays small.
            for j in 1..=n + 2 {
                let m = hf_prefix(j)?;
                pairs.push((
                    format!("a{j}"),
                    formula::not(cardinality_sentence(m.len(), true)?),
                ));
                models.push(SetKripkeModel::from_classical(&m, "v")?);
            }
            for i in 1..=*n {
                pairs.push((format!("b{i}"), cardinality_sentence(1, false)?));
            }
            let sigma = Assignment::propositional(pairs);
            let (r, _) = visser_semantic_demo(&models, &inst, &sigma, cfg(2, 4096, true))?;
            let text = format!(
                "root forces A_j: {:?}\nroot forces A_i -> B_i: {:?}\nroot forces A_(n+1) | A_(n+2): {}\n",
                r.root_forces_a, r.root_forces_implications, r.root_forces_tail
            );
            emit(
                if r.passed() {
                    EXIT_POSITIVE
                } else {
                    EXIT_NEGATIVE
                },
                serde_json::to_value(&r)?,
                text,
            )
        }
        Command::Dejongh {
            tree,
            formula,
            alpha,
            cap,
        } => {
            let tree = match tree {
                Some(p) => {
                    let j: TreeJson = serde_json::from_str(&read(p)?)?;
                    Some(SplittingTree::from_json(&j)?)
                }
                None => None,
            };
            let c = cfg(*alpha, *cap, false);
            match (formula, tree) {
                (Some(a), tree) => {
                    let a = parse_formula(a, Lang::Propositional)?;
                    let r = dejongh_counterexample(&a, tree, c)?;
                    let mut text = format!("formula: {}\n", r.formula);
                    for (p, t) in &r.translation {
                        let _ = writeln!(text, "tau({p}) = {t}");
                    }
                    let _ = writeln!(text, "tree refutes: {}", r.tree_refutes);
                    let _ = writeln!(
                        text,
                        "root forces translation: {}",
                        r.root_forces_translation
                    );
                    let _ = writeln!(
                        text,
                        "translation check: {}",
                        if r.translation_check.passed() {
                            "pass"
                        } else {
                            "fail"
                        }
                    );
                    emit(
                        if r.passed() {
                            EXIT_POSITIVE
                        } else {
                            EXIT_NEGATIVE
                        },
                        serde_json::to_value(&r)?,
                        text,
                    )
                }
                (None, Some(t)) => {
                    let phis = distinguishing_sentences(&t)?;
                    let (m, map) = build_tree_model(&t, c)?;
                    let r = verify_translation(&m, &map, &t, &phis, &[])?;
                    let text = format!(
                        "{} matrix entries, {} gamma mismatches: {}\n",
                        r.matrix.len(),
                        r.gamma_mismatches.len(),
                        if r.passed() { "pass" } else { "fail" }
                    );
                    emit(
                        if r.passed() {
                            EXIT_POSITIVE
                        } else {
                            EXIT_NEGATIVE
                        },
                        serde_json::to_value(&r)?,
                        text,
                    )
                }
                (None, None) => Err(Error::Precondition("pass --tree, --formula or both".into())),
            }
        }
        Command::CheckProperties { seed, cases } => {
            let r = property_suite(*seed, *cases)?;
            let text = format!(
                "{} cases: {} propositional, {} set, {} extension checks, {} violations\n",
                r.cases,
                r.prop_checks,
                r.set_checks,
                r.extension_checks,
                r.violations.len()
            );
            emit(
                if r.passed() {
                    EXIT_POSITIVE
                } else {
                    EXIT_NEGATIVE
                },
                serde_json::to_value(&r)?,
                text,
            )
        }
    }
}
