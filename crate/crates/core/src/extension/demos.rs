use serde::Serialize;

use super::{extend, Extension, RootExtensionConfig};
use crate::admissibility::VisserInstance;
use crate::error::{Error, Result};
use crate::formula::{self, Formula, Lang};
use crate::kripke_set::{disjoint_union, force_set, Env, SetKripkeModel};
use crate::subst::Assignment;

fn least_node(m: &SetKripkeModel, which: &str) -> Result<usize> {
    m.root()
        .ok_or_else(|| Error::Precondition(format!("{which} has no least node")))
}

fn sentence(f: &Formula) -> Result<()> {
    f.check_lang(Lang::SetTheoretic)?;
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::Precondition(format!(
            "`{f}` has the free variable `{v}`"
        )));
    }
    Ok(())
}

fn forces_at_least(m: &SetKripkeModel, f: &Formula) -> Result<bool> {
    force_set(m, m.root().expect("checked rooted"), f, &Env::new())
}

#[derive(Clone, Debug, Serialize)]
pub struct DpReport {
    pub phi: String,
    pub psi: String,
    pub first_forces_phi: bool,
    pub second_forces_psi: bool,
    pub root_forces_phi: bool,
    pub root_forces_psi: bool,
    pub root_forces_disjunction: bool,
    pub root_elements: usize,
    pub fragment_relative: bool,
}

impl DpReport {
    pub fn passed(&self) -> bool {
        !self.root_forces_phi && !self.root_forces_psi && !self.root_forces_disjunction
    }
}

/// Two rooted models refuting φ and ψ; a new root below their disjoint union
/// refutes φ ∨ ψ.
pub fn dp_demo(
    m1: &SetKripkeModel,
    m2: &SetKripkeModel,
    phi: &Formula,
    psi: &Formula,
    cfg: RootExtensionConfig,
) -> Result<(DpReport, Extension)> {
    sentence(phi)?;
    sentence(psi)?;
    least_node(m1, "the first model")?;
    least_node(m2, "the second model")?;
    let first_forces_phi = forces_at_least(m1, phi)?;
    let second_forces_psi = forces_at_least(m2, psi)?;
    if first_forces_phi {
        return Err(Error::Precondition(format!(
            "the first model forces `{phi}`"
        )));
    }
    if second_forces_psi {
        return Err(Error::Precondition(format!(
            "the second model forces `{psi}`"
        )));
    }
    let ext = extend(&disjoint_union(&[m1.clone(), m2.clone()])?, cfg)?;
    let report = DpReport {
        phi: phi.to_string(),
        psi: psi.to_string(),
        first_forces_phi,
        second_forces_psi,
        root_forces_phi: ext.forces(phi, &[])?,
        root_forces_psi: ext.forces(psi, &[])?,
        root_forces_disjunction: ext.forces(&formula::or(phi.clone(), psi.clone()), &[])?,
        root_elements: ext.elements().len(),
        fragment_relative: true,
    };
    Ok((report, ext))
}

#[derive(Clone, Debug, Serialize)]
pub struct VisserDemoReport {
    pub n: usize,
    /// σA_1 .. σA_(n+2), rendered.
    pub a: Vec<String>,
    pub b: Vec<String>,
    /// Root forcing of each σA_j; all expected false.
    pub root_forces_a: Vec<bool>,
    /// Root forcing of each σA_i → σB_i; all expected true.
    pub root_forces_implications: Vec<bool>,
    /// Root forcing of σA_(n+1) ∨ σA_(n+2); expected false.
    pub root_forces_tail: bool,
    pub root_elements: usize,
    pub fragment_relative: bool,
}

impl VisserDemoReport {
    pub fn passed(&self) -> bool {
        self.root_forces_a.iter().all(|b| !b)
            && self.root_forces_implications.iter().all(|b| *b)
            && !self.root_forces_tail
    }
}

/// Component j forces every σA_i → σB_i but not σA_j; below their disjoint
/// union a new root refutes σA_(n+1) ∨ σA_(n+2) while forcing the implications.
pub fn visser_semantic_demo(
    ms: &[SetKripkeModel],
    inst: &VisserInstance,
    sigma: &Assignment,
    cfg: RootExtensionConfig,
) -> Result<(VisserDemoReport, Extension)> {
    let n = inst.n;
    if ms.len() != n + 2 {
        return Err(Error::Precondition(format!(
            "{} models needed, got {}",
            n + 2,
            ms.len()
        )));
    }
    let a: Vec<Formula> = inst
        .a
        .iter()
        .map(|f| sigma.apply(f))
        .collect::<Result<_>>()?;
    let b: Vec<Formula> = inst
        .b
        .iter()
        .map(|f| sigma.apply(f))
        .collect::<Result<_>>()?;
    for f in a.iter().chain(&b) {
        sentence(f)?;
    }
    let imps: Vec<Formula> = (0..n)
        .map(|i| formula::implies(a[i].clone(), b[i].clone()))
        .collect();
    for (j, m) in ms.iter().enumerate() {
        least_node(m, &format!("model {}", j + 1))?;
        for (i, imp) in imps.iter().enumerate() {
            if !forces_at_least(m, imp)? {
                return Err(Error::Precondition(format!(
                    "model {} does not force implication {}",
                    j + 1,
                    i + 1
                )));
            }
        }
        if forces_at_least(m, &a[j])? {
            return Err(Error::Precondition(format!(
                "model {} forces A_{}",
                j + 1,
                j + 1
            )));
        }
    }
    let ext = extend(&disjoint_union(ms)?, cfg)?;
    let report = VisserDemoReport {
        n,
        a: a.iter().map(Formula::to_string).collect(),
        b: b.iter().map(Formula::to_string).collect(),
        root_forces_a: a
            .iter()
            .map(|f| ext.forces(f, &[]))
            .collect::<Result<_>>()?,
        root_forces_implications: imps
            .iter()
            .map(|f| ext.forces(f, &[]))
            .collect::<Result<_>>()?,
        root_forces_tail: ext.forces(&formula::or(a[n].clone(), a[n + 1].clone()), &[])?,
        root_elements: ext.elements().len(),
        fragment_relative: true,
    };
    Ok((report, ext))
}
