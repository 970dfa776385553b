//! Seeded persistence and coherence checks over random models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::extension::{extend, RootExtensionConfig, WitnessMode};
use crate::gen::{random_prop, random_prop_model, random_set_formula, random_set_model};
use crate::kripke_prop::check_persistence;
use crate::kripke_set::{check_coherence, force_set, Env, SetKripkeModel};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub seed: u64,
    pub cases: usize,
    pub prop_checks: usize,
    pub set_checks: usize,
    pub extension_checks: usize,
    pub violations: Vec<String>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every node v, a random environment at v, and every w ≥ v: v ⊩ f implies
/// w ⊩ f with the environment carried along. Returns the number of checks.
fn set_persistence<R: Rng>(
    rng: &mut R,
    m: &SetKripkeModel,
    f: &crate::Formula,
    vars: &[&str],
    out: &mut Vec<String>,
    tag: &str,
) -> Result<usize> {
    let mut checks = 0;
    for v in 0..m.len() {
        let env: Env = vars
            .iter()
            .map(|x| (x.to_string(), rng.gen_range(0..m.domain(v).len())))
            .collect();
        if !force_set(m, v, f, &env)? {
            continue;
        }
        for &w in m.above(v) {
            checks += 1;
            let t = m.transition(v, w);
            let moved: Env = env.iter().map(|(x, &d)| (x.clone(), t[d])).collect();
            if !force_set(m, w, f, &moved)? {
                out.push(format!(
                    "{tag}: `{f}` forced at `{}` but not at `{}`",
                    m.nodes()[v],
                    m.nodes()[w]
                ));
            }
        }
    }
    Ok(checks)
}

/// Runs `cases` rounds. Each round checks persistence in a random
/// propositional model and a random set model, coherence of the set model,
/// and every fifth round also a lazily extended copy of it.
pub fn property_suite(seed: u64, cases: usize) -> Result<PropertyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PropertyReport {
        seed,
        cases,
        ..Default::default()
    };
    let letters = ["p", "q"];
    let vars = ["x", "y"];
    for case in 0..cases {
        let n = rng.gen_range(1..=4);
        let pm = random_prop_model(&mut rng, n, &letters);
        let fs: Vec<_> = (0..3).map(|_| random_prop(&mut rng, &letters, 8)).collect();
        report.prop_checks += fs.len();
        for v in check_persistence(&pm, &fs)? {
            report
                .violations
                .push(format!("case {case}: propositional persistence: {v:?}"));
        }
        let m = random_set_model(&mut rng, 4, 3);
        for c in check_coherence(&m) {
            report
                .violations
                .push(format!("case {case}: coherence: {c}"));
        }
        let f = random_set_formula(&mut rng, &vars, 8);
        report.set_checks += set_persistence(
            &mut rng,
            &m,
            &f,
            &vars,
            &mut report.violations,
            &format!("case {case}"),
        )?;
        if case % 5 == 0 {
            let cfg = RootExtensionConfig {
                alpha_max: 2,
                width_cap: 512,
                mode: WitnessMode::Lazy,
            };
            let ext = extend(&m, cfg)?;
            report.extension_checks += 1;
            let tag = format!("case {case} extended");
            for c in check_coherence(ext.model()) {
                report.violations.push(format!("{tag}: coherence: {c}"));
            }
            for c in ext.validate() {
                report.violations.push(format!("{tag}: clause: {c}"));
            }
            if !ext.restriction_is_identity() {
                report
                    .violations
                    .push(format!("{tag}: restriction differs from the input"));
            }
            let g = random_set_formula(&mut rng, &vars, 6);
            report.set_checks += set_persistence(
                &mut rng,
                ext.model(),
                &g,
                &vars,
                &mut report.violations,
                &tag,
            )?;
        }
    }
    Ok(report)
}
