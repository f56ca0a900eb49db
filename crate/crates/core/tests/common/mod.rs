//! Random small categories, instances and paths for the property tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use catlift_core::category::{build_category, Bounds, EdgeId, ObId, Path, PathEquation, PresentedCategory, SchemaGraph};
use catlift_core::instance::{Elem, InstanceFunctor};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Every path of length at most `max_len`, identities included.
pub fn all_paths(g: &SchemaGraph, max_len: usize) -> Vec<Path> {
    let mut out = Vec::new();
    let mut frontier: Vec<(ObId, Vec<EdgeId>)> = g.objects().map(|o| (o, Vec::new())).collect();
    for len in 0..=max_len {
        let mut next = Vec::new();
        for (start, edges) in &frontier {
            let p = g.path(*start, edges.clone()).unwrap();
            if len < max_len {
                for &e in g.outgoing(p.end()) {
                    let mut w = edges.clone();
                    w.push(e);
                    next.push((*start, w));
                }
            }
            out.push(p);
        }
        frontier = next;
    }
    out
}

fn random_walk(g: &SchemaGraph, rng: &mut Rng8, start: ObId, len: usize) -> Path {
    let mut edges = Vec::new();
    let mut at = start;
    for _ in 0..len {
        let Some(&e) = g.outgoing(at).choose(rng) else {
            break;
        };
        edges.push(e);
        at = g.edge_decl(e).tgt;
    }
    g.path(start, edges).unwrap()
}

/// Random presentation. With `acyclic`, arrows only go from lower to higher
/// objects, so every hom-set is finite.
pub fn random_category(
    rng: &mut Rng8,
    max_objects: usize,
    max_edges: usize,
    max_equations: usize,
    acyclic: bool,
) -> Arc<PresentedCategory> {
    let n = rng.gen_range(1..=max_objects);
    let mut g = SchemaGraph::new();
    for i in 0..n {
        g.add_object(format!("o{i}")).unwrap();
    }
    let m = rng.gen_range(0..=max_edges);
    for j in 0..m {
        let (s, t) = if acyclic {
            if n < 2 {
                break;
            }
            let s = rng.gen_range(0..n - 1);
            (s, rng.gen_range(s + 1..n))
        } else {
            (rng.gen_range(0..n), rng.gen_range(0..n))
        };
        g.add_edge(format!("e{j}"), &format!("o{s}"), &format!("o{t}"))
            .unwrap();
    }
    let mut equations = Vec::new();
    for _ in 0..rng.gen_range(0..=max_equations) {
        let start = ObId(rng.gen_range(0..n));
        let len = rng.gen_range(1..=3);
        let lhs = random_walk(&g, rng, start, len);
        for _ in 0..20 {
            let len = rng.gen_range(0..=3);
            let rhs = random_walk(&g, rng, start, len);
            if rhs.end() == lhs.end() && rhs != lhs {
                equations.push(PathEquation::new(lhs.clone(), rhs));
                break;
            }
        }
    }
    Arc::new(build_category(g, equations, Bounds::default()).unwrap())
}

pub fn elems(prefix: &str, n: usize) -> Vec<Elem> {
    (0..n).map(|i| Elem::atom(format!("{prefix}{i}"))).collect()
}

/// Random carriers and total actions; equations may fail.
pub fn random_instance(rng: &mut Rng8, cat: &Arc<PresentedCategory>, max_carrier: usize) -> InstanceFunctor {
    let g = cat.graph();
    let sizes: Vec<usize> = g
        .objects()
        .map(|_| rng.gen_range(0..=max_carrier))
        .collect();
    // An arrow into an empty set forces its source to be empty too.
    let mut sizes = sizes;
    loop {
        let mut changed = false;
        for e in g.edges() {
            let d = g.edge_decl(e);
            if sizes[d.tgt.0] == 0 && sizes[d.src.0] != 0 {
                sizes[d.src.0] = 0;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let mut inst = InstanceFunctor::empty(cat.clone());
    for o in g.objects() {
        let name = g.object_name(o).to_string();
        inst.set_carrier(&name, elems(&format!("{name}_"), sizes[o.0]))
            .unwrap();
    }
    for e in g.edges() {
        let d = g.edge_decl(e);
        let dom = inst.carrier(d.src).clone();
        let cod = inst.carrier(d.tgt).clone();
        let pairs: Vec<(Elem, Elem)> = dom
            .iter()
            .map(|x| (x.clone(), cod.get(rng.gen_range(0..cod.len())).clone()))
            .collect();
        inst.set_action(&d.name, pairs).unwrap();
    }
    inst
}

pub fn random_valid_instance(
    rng: &mut Rng8,
    cat: &Arc<PresentedCategory>,
    max_carrier: usize,
    tries: usize,
) -> Option<InstanceFunctor> {
    (0..tries)
        .map(|_| random_instance(rng, cat, max_carrier))
        .find(|i| i.validate().is_valid())
}

/// Renames every element through `rename`, keeping the shape.
pub fn relabel(inst: &InstanceFunctor, rename: &dyn Fn(&Elem) -> Elem) -> InstanceFunctor {
    let carriers = inst
        .carriers()
        .iter()
        .map(|c| c.iter().map(rename).collect())
        .collect();
    let actions = inst
        .raw_actions()
        .iter()
        .map(|m| m.iter().map(|(x, y)| (rename(x), rename(y))).collect::<BTreeMap<_, _>>())
        .collect();
    InstanceFunctor::new(inst.schema().clone(), carriers, actions).unwrap()
}
