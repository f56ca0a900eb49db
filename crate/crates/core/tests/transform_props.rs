mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use catlift_core::category::{enumerate_functors, PresentedCategory};
use catlift_core::instance::{Elem, InstanceFunctor};
use catlift_core::transform::{
    check_kan_lift, check_naturality, check_transformation, KanCaps, NatTransformDef,
    Transformation, Verdict,
};
use common::{all_paths, random_category, random_valid_instance, relabel, rng, Rng8};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

type Components = Vec<BTreeMap<Elem, Elem>>;

fn random_components(r: &mut Rng8, from: &InstanceFunctor, to: &InstanceFunctor) -> Option<Components> {
    from.carriers()
        .iter()
        .zip(to.carriers())
        .map(|(a, b)| {
            if b.is_empty() && !a.is_empty() {
                return None;
            }
            Some(a.iter().map(|x| (x.clone(), b.get(r.gen_range(0..b.len())).clone())).collect())
        })
        .collect()
}

fn tag(suffix: &'static str) -> impl Fn(&Elem) -> Elem {
    move |x| Elem::atom(format!("{x}{suffix}"))
}

/// A natural transformation `I2 ∘ F ⇒ I1` for a random full `F`: `I1` is a
/// relabelled copy of the pulled-back instance, or a random valid instance
/// when a random ε happens to be natural.
fn random_transformation(r: &mut Rng8) -> Option<Transformation> {
    let c1: Arc<PresentedCategory> = random_category(r, 2, 2, 1, true);
    let c2 = random_category(r, 2, 2, 1, true);
    let full: Vec<_> = enumerate_functors(&c1, &c2, 1000)
        .ok()?
        .into_iter()
        .filter(|f| f.is_full().unwrap().full)
        .collect();
    let f = full.choose(r)?.clone();
    let i2 = random_valid_instance(r, &c2, 2, 30)?;
    let pulled = i2.pull_back(&f).unwrap();
    if r.gen_bool(0.5) {
        if let Some(i1) = random_valid_instance(r, &c1, 2, 30) {
            for _ in 0..20 {
                let Some(eps) = random_components(r, &pulled, &i1) else { break };
                let t = Transformation::new(f.clone(), i1.clone(), i2.clone(), eps).unwrap();
                if check_transformation(&t).is_valid() {
                    return Some(t);
                }
            }
        }
    }
    let rename = tag("'");
    let i1 = relabel(&pulled, &rename);
    let eps = pulled
        .carriers()
        .iter()
        .map(|c| c.iter().map(|x| (x.clone(), rename(x))).collect())
        .collect();
    Some(Transformation::new(f, i1, i2, eps).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generator_squares_imply_all_path_squares(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cat = random_category(&mut r, 3, 3, 1, false);
        prop_assume!(cat.check_rewriting().is_ok());
        let Some(a) = random_valid_instance(&mut r, &cat, 2, 30) else { return Ok(()) };
        let (b, alpha) = if r.gen_bool(0.5) {
            let rename = tag("#");
            let b = relabel(&a, &rename);
            let alpha: Components = a.carriers().iter()
                .map(|c| c.iter().map(|x| (x.clone(), rename(x))).collect())
                .collect();
            (b, alpha)
        } else {
            let Some(b) = random_valid_instance(&mut r, &cat, 2, 30) else { return Ok(()) };
            let Some(alpha) = random_components(&mut r, &a, &b) else { return Ok(()) };
            (b, alpha)
        };
        let def = NatTransformDef::new(a.clone(), b.clone(), alpha).unwrap();
        let report = check_naturality(&def);
        for p in all_paths(cat.graph(), 3) {
            let left = def.component(p.start()).then(&b.eval_path(&p).unwrap()).unwrap();
            let right = a.eval_path(&p).unwrap().then(def.component(p.end())).unwrap();
            if report.is_natural() {
                prop_assert_eq!(left, right, "{}", cat.path_string(&p));
            }
        }
        for sq in &report.broken {
            let e = cat.graph().edge(&sq.generator).unwrap();
            let d = cat.graph().edge_decl(e);
            let (ae, be) = (a.action(e).unwrap(), b.action(e).unwrap());
            let via_source = def.component(d.tgt).apply(ae.apply(&sq.element).unwrap()).unwrap();
            let via_target = be.apply(def.component(d.src).apply(&sq.element).unwrap()).unwrap();
            prop_assert_ne!(via_source, via_target);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kan_verdict_is_invariant_under_renaming(seed in any::<u64>()) {
        let mut r = rng(seed);
        let Some(t) = random_transformation(&mut r) else { return Ok(()) };
        let report = check_kan_lift(&t, KanCaps::default()).unwrap();

        let (s1, s2) = (tag("~a"), tag("~b"));
        let eps = t.epsilon_components().iter()
            .map(|m| m.iter().map(|(x, y)| (s2(x), s1(y))).collect())
            .collect();
        let renamed = Transformation::new(
            t.functor().clone(),
            relabel(t.source_instance(), &s1),
            relabel(t.target_instance(), &s2),
            eps,
        ).unwrap();
        let again = check_kan_lift(&renamed, KanCaps::default()).unwrap();
        prop_assert_eq!(report.verdict, again.verdict);
        prop_assert_eq!(report.functors_checked, again.functors_checked);
        prop_assert_eq!(report.self_factorization, again.self_factorization);
        prop_assert_eq!(
            report.failure.as_ref().map(|f| (f.functor_index, f.kind.clone())),
            again.failure.as_ref().map(|f| (f.functor_index, f.kind.clone()))
        );
        if report.verdict == Verdict::Holds {
            prop_assert_eq!(report.self_factorization, Some(true));
        }
    }
}

