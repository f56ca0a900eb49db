//! Rooted trees as instances on the loop category `T` (one object `0`, one
//! generator `p : 0 -> 0`). The action of `p` sends a node to its parent and
//! the root to itself.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::ModelError;
use crate::category::{build_category, Bounds, PresentedCategory, SchemaGraph};
use crate::instance::{Elem, InstanceFunctor};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NodePayload {
    /// Object key or array index under the parent; `None` at the root.
    pub key: Option<String>,
    /// Scalar value for leaves.
    pub value: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDoc {
    pub nodes: BTreeMap<String, NodePayload>,
    pub parent: BTreeMap<String, String>,
    pub root: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeDefect {
    UnknownRoot(String),
    RootNotSelfParent { root: String, parent: String },
    MissingParent(String),
    UnknownParent { node: String, parent: String },
    /// A second node that is its own parent.
    ExtraFixedPoint(String),
    /// A node whose parent chain loops without reaching the root.
    Cycle(String),
}

impl fmt::Display for TreeDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeDefect::UnknownRoot(r) => write!(f, "root `{r}` is not a node"),
            TreeDefect::RootNotSelfParent { root, parent } => {
                write!(f, "root `{root}` has parent `{parent}` instead of itself")
            }
            TreeDefect::MissingParent(n) => write!(f, "node `{n}` has no parent"),
            TreeDefect::UnknownParent { node, parent } => {
                write!(f, "node `{node}` has unknown parent `{parent}`")
            }
            TreeDefect::ExtraFixedPoint(n) => write!(f, "node `{n}` is a second root"),
            TreeDefect::Cycle(n) => write!(f, "node `{n}` never reaches the root"),
        }
    }
}

impl TreeDoc {
    /// Single root node.
    pub fn singleton(root: impl Into<String>) -> Self {
        let root = root.into();
        TreeDoc {
            nodes: BTreeMap::from([(root.clone(), NodePayload::default())]),
            parent: BTreeMap::from([(root.clone(), root.clone())]),
            root,
        }
    }

    /// Checks that the parent map is a rooted tree on `nodes`. The witness is
    /// the first offending node in sorted order.
    pub fn check(&self) -> Result<(), TreeDefect> {
        if !self.nodes.contains_key(&self.root) {
            return Err(TreeDefect::UnknownRoot(self.root.clone()));
        }
        for node in self.nodes.keys() {
            match self.parent.get(node) {
                None => return Err(TreeDefect::MissingParent(node.clone())),
                Some(p) if !self.nodes.contains_key(p) => {
                    return Err(TreeDefect::UnknownParent {
                        node: node.clone(),
                        parent: p.clone(),
                    })
                }
                Some(_) => {}
            }
        }
        if let Some(p) = self.parent.keys().find(|k| !self.nodes.contains_key(*k)) {
            return Err(TreeDefect::MissingParent(p.clone()));
        }
        let root_parent = &self.parent[&self.root];
        if *root_parent != self.root {
            return Err(TreeDefect::RootNotSelfParent {
                root: self.root.clone(),
                parent: root_parent.clone(),
            });
        }
        if let Some(n) = self
            .nodes
            .keys()
            .find(|n| **n != self.root && self.parent[*n] == **n)
        {
            return Err(TreeDefect::ExtraFixedPoint(n.clone()));
        }

        // Walk each unresolved node upward until reaching a node already known
        // to reach the root, or revisiting a node of the current walk.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Unseen,
            OnWalk,
            Rooted,
        }
        let mut mark: BTreeMap<&str, Mark> =
            self.nodes.keys().map(|n| (n.as_str(), Mark::Unseen)).collect();
        mark.insert(self.root.as_str(), Mark::Rooted);
        for start in self.nodes.keys() {
            let mut walk = Vec::new();
            let mut cur = start.as_str();
            loop {
                match mark[cur] {
                    Mark::Rooted => break,
                    Mark::OnWalk => return Err(TreeDefect::Cycle(start.clone())),
                    Mark::Unseen => {
                        mark.insert(cur, Mark::OnWalk);
                        walk.push(cur);
                        cur = self.parent[cur].as_str();
                    }
                }
            }
            for n in walk {
                mark.insert(n, Mark::Rooted);
            }
        }
        Ok(())
    }
}

/// One object `0` with the loop `p`.
pub fn loop_category() -> PresentedCategory {
    let mut g = SchemaGraph::new();
    g.add_object("0").expect("fresh graph");
    g.add_edge("p", "0", "0").expect("fresh graph");
    build_category(g, vec![], Bounds::default()).expect("no equations")
}

pub fn tree_to_functor(t: &TreeDoc) -> Result<InstanceFunctor, ModelError> {
    t.check().map_err(ModelError::NotATree)?;
    let mut inst = InstanceFunctor::empty(Arc::new(loop_category()));
    inst.set_carrier("0", t.nodes.keys().map(|n| Elem::atom(n.as_str())))?;
    inst.set_action(
        "p",
        t.parent
            .iter()
            .map(|(n, p)| (Elem::atom(n.as_str()), Elem::atom(p.as_str()))),
    )?;
    Ok(inst)
}

/// Inverse of [`tree_to_functor`]. The root is the unique fixed point of `p`.
pub fn functor_to_tree(
    inst: &InstanceFunctor,
    payloads: Option<&BTreeMap<String, NodePayload>>,
) -> Result<TreeDoc, ModelError> {
    let g = inst.schema().graph();
    if g.object_count() != 1 || g.edge_count() != 1 || !inst.schema().equations().is_empty() {
        return Err(ModelError::SchemaMismatch(
            "expected the loop category with one arrow p".into(),
        ));
    }
    let p = inst.action(g.require_edge("p")?)?;
    let parent: BTreeMap<String, String> =
        p.pairs().map(|(x, y)| (x.to_string(), y.to_string())).collect();
    let roots: Vec<&String> = parent.iter().filter(|(k, v)| k == v).map(|(k, _)| k).collect();
    let root = match roots.as_slice() {
        [r] => (*r).clone(),
        [] => {
            let first = parent.keys().next().cloned().unwrap_or_default();
            return Err(ModelError::NotATree(TreeDefect::Cycle(first)));
        }
        [_, second, ..] => return Err(ModelError::NotATree(TreeDefect::ExtraFixedPoint((*second).clone()))),
    };
    let nodes = parent
        .keys()
        .map(|k| {
            let payload = payloads.and_then(|m| m.get(k)).cloned().unwrap_or_default();
            (k.clone(), payload)
        })
        .collect();
    let doc = TreeDoc {
        nodes,
        parent,
        root,
    };
    doc.check().map_err(ModelError::NotATree)?;
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(parent: &[(&str, &str)], root: &str) -> TreeDoc {
        TreeDoc {
            nodes: parent
                .iter()
                .map(|(n, _)| (n.to_string(), NodePayload::default()))
                .collect(),
            parent: parent
                .iter()
                .map(|(n, p)| (n.to_string(), p.to_string()))
                .collect(),
            root: root.to_string(),
        }
    }

    #[test]
    fn single_node_tree_acts_as_identity() {
        let inst = tree_to_functor(&TreeDoc::singleton("r")).unwrap();
        let p = inst.action(crate::EdgeId(0)).unwrap();
        assert_eq!(p.apply(&Elem::atom("r")), Some(&Elem::atom("r")));
    }

    #[test]
    fn chain_maps_each_node_to_its_parent() {
        let t = doc(&[("a", "b"), ("b", "root"), ("root", "root")], "root");
        let inst = tree_to_functor(&t).unwrap();
        let p = inst.action(crate::EdgeId(0)).unwrap();
        assert_eq!(p.apply(&Elem::atom("a")), Some(&Elem::atom("b")));
        assert_eq!(p.apply(&Elem::atom("b")), Some(&Elem::atom("root")));
        assert_eq!(p.apply(&Elem::atom("root")), Some(&Elem::atom("root")));
        assert_eq!(functor_to_tree(&inst, Some(&t.nodes)).unwrap(), t);
    }

    #[test]
    fn two_roots_are_rejected() {
        let t = doc(&[("a", "a"), ("b", "b")], "a");
        assert_eq!(t.check(), Err(TreeDefect::ExtraFixedPoint("b".into())));
    }

    #[test]
    fn cycles_off_the_root_are_rejected() {
        let t = doc(&[("a", "b"), ("b", "a"), ("r", "r")], "r");
        assert_eq!(t.check(), Err(TreeDefect::Cycle("a".into())));
    }

    #[test]
    fn root_must_be_its_own_parent() {
        let t = doc(&[("a", "r"), ("r", "a")], "r");
        assert!(matches!(t.check(), Err(TreeDefect::RootNotSelfParent { .. })));
    }
}
