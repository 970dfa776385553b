//! Contraction-free sequent prover for IPC plus finite-tree countermodel search.

use std::collections::BTreeSet;

use rustc_hash::FxHashMap as HashMap;
use std::sync::OnceLock;

use super::trees::{enumerate_finite_trees, Tree};
use super::{force_prop, PropKripkeModel, Verdict};
use crate::error::{Error, Result};
use crate::formula::{Formula, Lang};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    Atom(u32),
    Bot,
    Top,
    And(u32, u32),
    Or(u32, u32),
    Imp(u32, u32),
}

/// Hash-consed formulas: structurally equal formulas share an id.
#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    ids: HashMap<Node, u32>,
    atoms: HashMap<String, u32>,
}

impl Arena {
    fn intern(&mut self, n: Node) -> u32 {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.ids.insert(n, id);
        id
    }

    fn add(&mut self, f: &Formula) -> Result<u32> {
        let n = match f {
            Formula::Atom(p, args) => {
                if !args.is_empty() {
                    return Err(Error::Language {
                        lang: Lang::Propositional,
                        detail: format!("atom `{p}` has arguments"),
                    });
                }
                let next = self.atoms.len() as u32;
                Node::Atom(*self.atoms.entry(p.clone()).or_insert(next))
            }
            Formula::Top => Node::Top,
            Formula::Bot => Node::Bot,
            Formula::Not(a) => {
                let a = self.add(a)?;
                let bot = self.intern(Node::Bot);
                Node::Imp(a, bot)
            }
            Formula::And(a, b) => Node::And(self.add(a)?, self.add(b)?),
            Formula::Or(a, b) => Node::Or(self.add(a)?, self.add(b)?),
            Formula::Implies(a, b) => Node::Imp(self.add(a)?, self.add(b)?),
            Formula::Forall(..) | Formula::Exists(..) => {
                return Err(Error::Language {
                    lang: Lang::Propositional,
                    detail: "quantifier".into(),
                })
            }
        };
        Ok(self.intern(n))
    }
}

/// G4ip prover with memoisation of normalised sequents.
#[derive(Default)]
struct Prover {
    arena: Arena,
    memo: HashMap<(Vec<u32>, u32), bool>,
}

impl Prover {
    fn node(&self, id: u32) -> Node {
        self.arena.nodes[id as usize]
    }

    fn prove(&mut self, gamma: Vec<u32>, goal: u32) -> bool {
        let mut todo = gamma;
        let mut ctx: Vec<u32> = Vec::new();
        while let Some(f) = todo.pop() {
            match self.node(f) {
                Node::Bot => return true,
                Node::Top => {}
                Node::Atom(_) => {
                    if !ctx.contains(&f) {
                        ctx.push(f);
                        let mut i = 0;
                        while i < ctx.len() {
                            match self.node(ctx[i]) {
                                Node::Imp(a, b) if a == f => {
                                    todo.push(b);
                                    ctx.swap_remove(i);
                                }
                                _ => i += 1,
                            }
                        }
                    }
                }
                Node::And(a, b) => {
                    todo.push(a);
                    todo.push(b);
                }
                Node::Or(a, b) => {
                    todo.extend_from_slice(&ctx);
                    let mut left = todo.clone();
                    left.push(a);
                    todo.push(b);
                    return self.prove(left, goal) && self.prove(todo, goal);
                }
                Node::Imp(a, b) => match self.node(a) {
                    Node::Atom(_) => {
                        if ctx.contains(&a) {
                            todo.push(b);
                        } else {
                            ctx.push(f);
                        }
                    }
                    Node::Bot => {}
                    Node::Top => todo.push(b),
                    Node::And(c, d) => {
                        let inner = self.arena.intern(Node::Imp(d, b));
                        todo.push(self.arena.intern(Node::Imp(c, inner)));
                    }
                    Node::Or(c, d) => {
                        todo.push(self.arena.intern(Node::Imp(c, b)));
                        todo.push(self.arena.intern(Node::Imp(d, b)));
                    }
                    Node::Imp(..) => ctx.push(f),
                },
            }
        }
        ctx.sort_unstable();
        ctx.dedup();
        let key = (ctx, goal);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = self.right(&key.0, goal);
        self.memo.insert(key, r);
        r
    }

    fn right(&mut self, ctx: &[u32], goal: u32) -> bool {
        match self.node(goal) {
            Node::Top => true,
            Node::Atom(_) if ctx.contains(&goal) => true,
            Node::And(a, b) => self.prove(ctx.to_vec(), a) && self.prove(ctx.to_vec(), b),
            Node::Imp(a, b) => {
                let mut g = ctx.to_vec();
                g.push(a);
                self.prove(g, b)
            }
            _ => self.search(ctx, goal),
        }
    }

    fn search(&mut self, ctx: &[u32], goal: u32) -> bool {
        if let Node::Or(a, b) = self.node(goal) {
            if self.prove(ctx.to_vec(), a) || self.prove(ctx.to_vec(), b) {
                return true;
            }
        }
        for (i, &f) in ctx.iter().enumerate() {
            let Node::Imp(cd, b) = self.node(f) else {
                continue;
            };
            let Node::Imp(_, d) = self.node(cd) else {
                continue;
            };
            let mut rest: Vec<u32> = ctx.to_vec();
            rest.remove(i);
            let db = self.arena.intern(Node::Imp(d, b));
            let mut first = rest.clone();
            first.push(db);
            if !self.prove(first, cd) {
                continue;
            }
            rest.push(b);
            if self.prove(rest, goal) {
                return true;
            }
        }
        false
    }
}

/// Is `f` a theorem of IPC? Only the sequent prover runs.
pub fn ipc_provable(f: &Formula) -> Result<bool> {
    let mut p = Prover::default();
    let g = p.arena.add(f)?;
    Ok(p.prove(Vec::new(), g))
}

/// Does `premises ⊢ goal` hold in IPC?
pub fn ipc_entails(premises: &[Formula], goal: &Formula) -> Result<bool> {
    let mut p = Prover::default();
    let gamma = premises
        .iter()
        .map(|f| p.arena.add(f))
        .collect::<Result<Vec<_>>>()?;
    let g = p.arena.add(goal)?;
    Ok(p.prove(gamma, g))
}

/// Node cap for the countermodel search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IpcOptions {
    pub node_cap: usize,
}

impl Default for IpcOptions {
    fn default() -> Self {
        IpcOptions { node_cap: 9 }
    }
}

/// Largest node cap accepted by [`decide_ipc_with`].
pub const MAX_NODE_CAP: usize = CACHED_NODES;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Atom(usize),
    Top,
    Bot,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
}

/// A propositional formula flattened into its distinct subformulas, children
/// first, for evaluation on bitmask-encoded models of at most 64 nodes.
#[derive(Clone, Debug)]
pub struct CompiledFormula {
    atoms: Vec<String>,
    ops: Vec<Op>,
}

impl CompiledFormula {
    pub fn new(f: &Formula) -> Result<CompiledFormula> {
        f.check_lang(Lang::Propositional)?;
        let atoms: Vec<String> = f.letters().into_iter().collect();
        let mut ops = Vec::new();
        let mut seen: HashMap<Formula, usize> = HashMap::default();
        fn go(
            f: &Formula,
            atoms: &[String],
            ops: &mut Vec<Op>,
            seen: &mut HashMap<Formula, usize>,
        ) -> usize {
            if let Some(&i) = seen.get(f) {
                return i;
            }
            let op = match f {
                Formula::Atom(p, _) => Op::Atom(atoms.binary_search(p).expect("collected atom")),
                Formula::Top => Op::Top,
                Formula::Bot => Op::Bot,
                Formula::Not(a) => Op::Not(go(a, atoms, ops, seen)),
                Formula::And(a, b) => {
                    let (x, y) = (go(a, atoms, ops, seen), go(b, atoms, ops, seen));
                    Op::And(x, y)
                }
                Formula::Or(a, b) => {
                    let (x, y) = (go(a, atoms, ops, seen), go(b, atoms, ops, seen));
                    Op::Or(x, y)
                }
                Formula::Implies(a, b) => {
                    let (x, y) = (go(a, atoms, ops, seen), go(b, atoms, ops, seen));
                    Op::Imp(x, y)
                }
                Formula::Forall(..) | Formula::Exists(..) => unreachable!("checked propositional"),
            };
            ops.push(op);
            seen.insert(f.clone(), ops.len() - 1);
            ops.len() - 1
        }
        go(f, &atoms, &mut ops, &mut seen);
        Ok(CompiledFormula { atoms, ops })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    /// Number of distinct implication and negation subformulas.
    pub fn implication_count(&self) -> usize {
        self.ops
            .iter()
            .filter(|o| matches!(o, Op::Imp(..) | Op::Not(_)))
            .count()
    }

    /// Set of nodes forcing the formula. `up[v]` is the up-set of node v and
    /// `val[i]` the set of nodes where atom i holds.
    pub fn eval(&self, up: &[u64], val: &[u64]) -> u64 {
        let n = up.len();
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut m = vec![0u64; self.ops.len()];
        for (i, op) in self.ops.iter().enumerate() {
            m[i] = match *op {
                Op::Atom(a) => val[a],
                Op::Top => full,
                Op::Bot => 0,
                Op::And(a, b) => m[a] & m[b],
                Op::Or(a, b) => m[a] | m[b],
                Op::Not(a) => mask_where(up, |u| u & m[a] == 0),
                Op::Imp(a, b) => mask_where(up, |u| u & m[a] & !m[b] == 0),
            };
        }
        m[self.ops.len() - 1]
    }
}

fn mask_where(up: &[u64], pred: impl Fn(u64) -> bool) -> u64 {
    let mut out = 0;
    for (v, &u) in up.iter().enumerate() {
        if pred(u) {
            out |= 1 << v;
        }
    }
    out
}

pub(crate) fn up_masks(t: &Tree) -> Vec<u64> {
    (0..t.len())
        .map(|v| {
            (0..t.len())
                .filter(|&w| t.leq(v, w))
                .fold(0u64, |m, w| m | 1 << w)
        })
        .collect()
}

/// All up-closed node sets of a tree, as bitmasks.
pub(crate) fn up_sets(t: &Tree) -> Vec<u64> {
    let up = up_masks(t);
    (0u64..(1u64 << t.len()))
        .filter(|&s| (0..t.len()).all(|v| s & (1 << v) == 0 || up[v] & !s == 0))
        .collect()
}

struct FrameData {
    tree: Tree,
    up: Vec<u64>,
    sets: Vec<u64>,
}

const CACHED_NODES: usize = 10;

fn frames(max_nodes: usize) -> Vec<&'static FrameData> {
    static CACHE: OnceLock<Vec<FrameData>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        enumerate_finite_trees(CACHED_NODES)
            .into_iter()
            .map(|tree| FrameData {
                up: up_masks(&tree),
                sets: up_sets(&tree),
                tree,
            })
            .collect()
    });
    cache.iter().filter(|d| d.tree.len() <= max_nodes).collect()
}

/// First countermodel, in tree enumeration order and then valuation order,
/// among trees with at most `max_nodes` nodes (at most 10).
pub fn search_countermodel(f: &Formula, max_nodes: usize) -> Result<Option<PropKripkeModel>> {
    if max_nodes > CACHED_NODES {
        return Err(Error::Overflow(format!(
            "countermodel search is limited to {CACHED_NODES} nodes"
        )));
    }
    let c = CompiledFormula::new(f)?;
    let k = c.atoms.len();
    for frame in frames(max_nodes) {
        let (t, up, sets) = (&frame.tree, &frame.up, &frame.sets);
        let mut choice = vec![0usize; k];
        let mut val = vec![sets[0]; k];
        loop {
            if c.eval(up, &val) & 1 == 0 {
                let valuation = (0..t.len())
                    .map(|v| {
                        (0..k)
                            .filter(|&i| val[i] & (1 << v) != 0)
                            .map(|i| c.atoms[i].clone())
                            .collect::<BTreeSet<_>>()
                    })
                    .collect();
                return Ok(Some(PropKripkeModel::on_tree(t, valuation)?));
            }
            let mut i = 0;
            while i < k {
                choice[i] += 1;
                if choice[i] < sets.len() {
                    val[i] = sets[choice[i]];
                    break;
                }
                choice[i] = 0;
                val[i] = sets[0];
                i += 1;
            }
            if i == k {
                break;
            }
        }
    }
    Ok(None)
}

/// Node budget for a formula: 2^(implication subformulas), capped.
pub fn node_budget(f: &Formula, cap: usize) -> Result<usize> {
    let k = CompiledFormula::new(f)?.implication_count();
    Ok(if k >= 16 { cap } else { (1usize << k).min(cap) }.max(1))
}

pub fn decide_ipc(f: &Formula) -> Result<Verdict> {
    decide_ipc_with(f, IpcOptions::default())
}

/// Sequent search decides; on failure a tree countermodel is searched for and
/// re-checked with [`force_prop`].
pub fn decide_ipc_with(f: &Formula, opts: IpcOptions) -> Result<Verdict> {
    f.check_lang(Lang::Propositional)?;
    if ipc_provable(f)? {
        return Ok(Verdict::Valid);
    }
    let budget = node_budget(f, opts.node_cap)?;
    match search_countermodel(f, budget)? {
        Some(model) => {
            if force_prop(&model, 0, f)? {
                return Err(Error::Inconsistency(format!(
                    "countermodel candidate forces `{f}`"
                )));
            }
            Ok(Verdict::Countermodel { model, root: 0 })
        }
        None => Err(Error::Inconsistency(format!(
            "sequent search rejects `{f}` but no countermodel has at most {budget} nodes"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::prop;

    fn valid(s: &str) -> bool {
        decide_ipc(&prop(s).unwrap()).unwrap().is_valid()
    }

    #[test]
    fn examples() {
        assert!(valid("p -> p"));
        assert!(!valid("p | ~p"));
        assert!(valid("~~(p | ~p)"));
        assert!(!valid("((p -> q) -> p) -> p"));
        assert!(!valid("~~p -> p"));
        assert!(valid("~~~p -> ~p"));
        assert!(valid("(p -> q) -> (~q -> ~p)"));
        assert!(!valid("(~q -> ~p) -> (p -> q)"));
        assert!(valid("(p | q -> r) -> (p -> r) & (q -> r)"));
        assert!(!valid("(p -> q | r) -> (p -> q) | (p -> r)"));
        assert!(valid("true"));
        assert!(!valid("false"));
        assert!(valid("false -> p"));
    }

    #[test]
    fn excluded_middle_countermodel_is_two_chain() {
        match decide_ipc(&prop("p | ~p").unwrap()).unwrap() {
            Verdict::Countermodel { model, root } => {
                assert_eq!(model.len(), 2);
                assert!(!force_prop(&model, root, &prop("p | ~p").unwrap()).unwrap());
            }
            Verdict::Valid => panic!(),
        }
    }

    #[test]
    fn entailment() {
        assert!(ipc_entails(&[prop("p & q").unwrap()], &prop("p").unwrap()).unwrap());
        assert!(!ipc_entails(
            &[prop("~p -> q | r").unwrap()],
            &prop("(~p -> q) | (~p -> r)").unwrap()
        )
        .unwrap());
    }

    #[test]
    fn up_set_counts() {
        let trees = enumerate_finite_trees(3);
        // single node: {}, {0}; chain of 2: 3; root with two leaves: 5; chain of 3: 4
        let counts: Vec<usize> = trees.iter().map(|t| up_sets(t).len()).collect();
        let mut sorted = counts.clone();
        sorted.sort();
        assert_eq!(sorted, vec![2, 3, 4, 5]);
    }
}
