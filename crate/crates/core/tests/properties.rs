use std::collections::BTreeMap;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cstwb::dejongh::{build_tree_model, distinguishing_sentences, tau, translate, SplittingTree};
use cstwb::extension::{extend, RootExtensionConfig, WitnessMode};
use cstwb::formula::Signature;
use cstwb::gen::{random_prop, random_prop_model, random_set_formula, random_set_model};
use cstwb::kripke_prop::{decide_cpc, decide_ipc, force_prop, Verdict};
use cstwb::kripke_set::{
    check_coherence, disjoint_union, eval_classical, force_set, vrank_model, ClassicalSetModel,
    Env, SetKripkeModel,
};
use cstwb::parser::parse_formula;
use cstwb::subst::ground_substitutions;
use cstwb::Lang;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_classical(r: &mut ChaCha8Rng) -> ClassicalSetModel {
    let n = r.gen_range(1..=4);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if r.gen_bool(0.3) {
                edges.push((a, b));
            }
        }
    }
    ClassicalSetModel::new((0..n).map(|i| format!("c{i}")).collect(), &edges).unwrap()
}

/// The three-node tree refuting ~p | ~~p, its set model and the translation.
fn tree_fixture() -> &'static (
    SplittingTree,
    SetKripkeModel,
    Vec<usize>,
    cstwb::subst::Assignment,
) {
    static F: OnceLock<(
        SplittingTree,
        SetKripkeModel,
        Vec<usize>,
        cstwb::subst::Assignment,
    )> = OnceLock::new();
    F.get_or_init(|| {
        let t = SplittingTree::new(
            vec!["r".into(), "a".into(), "b".into()],
            &[(0, 1), (0, 2)],
            [("p".to_string(), [1].into())].into(),
            [(1, 1), (2, 2)].into(),
        )
        .unwrap();
        let (m, model_of) = build_tree_model(&t, RootExtensionConfig::default()).unwrap();
        let tr = tau(&t, &distinguishing_sentences(&t).unwrap());
        (t, m, model_of, tr)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn one_node_forcing_is_classical(seed in any::<u64>()) {
        let mut r = rng(seed);
        let c = random_classical(&mut r);
        let f = random_set_formula(&mut r, &[], 7);
        let k = SetKripkeModel::from_classical(&c, "v").unwrap();
        prop_assert_eq!(force_set(&k, 0, &f, &Env::new()).unwrap(), eval_classical(&c, &f, &BTreeMap::new()).unwrap());
    }

    #[test]
    fn set_forcing_persists(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_set_model(&mut r, 4, 3);
        prop_assert!(check_coherence(&m).is_empty());
        let f = random_set_formula(&mut r, &[], 6);
        for v in 0..m.len() {
            if force_set(&m, v, &f, &Env::new()).unwrap() {
                for &w in m.above(v) {
                    prop_assert!(force_set(&m, w, &f, &Env::new()).unwrap(), "{} lost between {} and {}", f, v, w);
                }
            }
        }
    }

    #[test]
    fn disjoint_union_keeps_forcing(seed in any::<u64>()) {
        let mut r = rng(seed);
        let parts = [random_set_model(&mut r, 3, 3), random_set_model(&mut r, 3, 3)];
        let u = disjoint_union(&parts).unwrap();
        let f = random_set_formula(&mut r, &[], 6);
        for (i, m) in parts.iter().enumerate() {
            for v in 0..m.len() {
                let uv = u.node(&format!("{i}.{}", m.nodes()[v])).unwrap();
                prop_assert_eq!(force_set(&u, uv, &f, &Env::new()).unwrap(), force_set(m, v, &f, &Env::new()).unwrap());
            }
        }
    }

    #[test]
    fn set_model_json_round_trip(seed in any::<u64>()) {
        let m = random_set_model(&mut rng(seed), 4, 3);
        let back = SetKripkeModel::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn extension_invariants(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_set_model(&mut r, 3, 2);
        prop_assume!((0..m.len()).all(|v| m.well_founded(v)));
        let mode = if r.gen_bool(0.5) { WitnessMode::Lazy } else { WitnessMode::Enumerate };
        let ext = match extend(&m, RootExtensionConfig { alpha_max: 2, width_cap: 512, mode }) {
            Ok(e) => e,
            Err(cstwb::Error::Overflow(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert!(ext.validate().is_empty());
        prop_assert!(check_coherence(ext.model()).is_empty());
        prop_assert!(ext.restriction_is_identity());
        prop_assert!(ext.root_well_founded());
        // Old nodes force exactly what they forced before.
        let f = random_set_formula(&mut r, &[], 5);
        for v in 0..m.len() {
            prop_assert_eq!(force_set(ext.model(), v, &f, &Env::new()).unwrap(), force_set(&m, v, &f, &Env::new()).unwrap());
        }
        for e in ext.elements() {
            prop_assert!(e.rank >= 1);
            prop_assert!(e.root_members.iter().all(|&y| ext.elements()[y].rank < e.rank));
        }
    }

    #[test]
    fn translation_is_sound(seed in any::<u64>()) {
        let (t, m, model_of, tr) = tree_fixture();
        let a = random_prop(&mut rng(seed), &["p", "q"], 6);
        let pm = t.to_prop_model().unwrap();
        let ta = translate(tr, t, &a).unwrap();
        for w in 0..t.len() {
            prop_assert_eq!(force_set(m, model_of[w], &ta, &Env::new()).unwrap(), force_prop(&pm, w, &a).unwrap(), "{}", a);
        }
    }

    #[test]
    fn prop_forcing_persists(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=5);
        let m = random_prop_model(&mut r, n, &["p", "q"]);
        let f = random_prop(&mut r, &["p", "q"], 9);
        for v in 0..m.len() {
            if force_prop(&m, v, &f).unwrap() {
                prop_assert!(m.above(v).all(|w| force_prop(&m, w, &f).unwrap()));
            }
        }
    }

    #[test]
    fn ipc_inside_cpc(seed in any::<u64>()) {
        let f = random_prop(&mut rng(seed), &["p", "q", "r"], 10);
        match decide_ipc(&f).unwrap() {
            Verdict::Valid => prop_assert!(decide_cpc(&f).unwrap().is_valid()),
            Verdict::Countermodel { model, root } => prop_assert!(!force_prop(&model, root, &f).unwrap()),
        }
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = random_prop(&mut r, &["p", "q"], 10);
        prop_assert_eq!(parse_formula(&f.to_string(), Lang::Propositional).unwrap(), f);
        let g = random_set_formula(&mut r, &["a"], 10);
        prop_assert_eq!(parse_formula(&g.to_string(), Lang::SetTheoretic).unwrap(), g);
    }

    #[test]
    fn ground_order_starts_at_bottom(k in 1usize..5) {
        let names: Vec<String> = (0..k).map(|i| format!("s{i}")).collect();
        let sig = Signature::propositional(names.iter().map(String::as_str));
        let all: Vec<_> = ground_substitutions(&sig).collect();
        prop_assert_eq!(all.len(), 1 << k);
        prop_assert!(all[0].iter().all(|(_, b)| !b));
        prop_assert!(all[all.len() - 1].iter().all(|(_, b)| b));
        // Binary counting with the first symbol most significant.
        for (i, g) in all.iter().enumerate() {
            for (j, (_, b)) in g.iter().enumerate() {
                prop_assert_eq!(b, (i >> (k - 1 - j)) & 1 == 1);
            }
        }
    }
}

#[test]
fn stage_ranks_are_bounded() {
    for n in 1..=4 {
        let m = SetKripkeModel::from_classical(&vrank_model(n).unwrap(), "v").unwrap();
        let top = (0..m.domain(0).len())
            .map(|a| m.rank(0, a).unwrap())
            .max()
            .unwrap();
        assert_eq!(top, n);
    }
}
