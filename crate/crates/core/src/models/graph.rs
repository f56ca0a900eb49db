//! Property graphs as instances on the graph schema `0 ⇉ 1`.
//!
//! Object `0` carries edge ids, object `1` vertex ids, `s` and `t` the source
//! and target maps. Labels and properties live in [`SideTables`] keyed by id;
//! they travel with the functor but play no part in categorical checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::ModelError;
use crate::category::{build_category, Bounds, PresentedCategory, SchemaGraph};
use crate::instance::{Elem, InstanceFunctor};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Annotations {
    pub label: String,
    pub properties: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEdge {
    pub src: String,
    pub tgt: String,
    pub annotations: Annotations,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropertyGraph {
    pub vertices: BTreeMap<String, Annotations>,
    pub edges: BTreeMap<String, GraphEdge>,
}

impl PropertyGraph {
    pub fn add_vertex(&mut self, id: impl Into<String>, label: impl Into<String>) {
        self.vertices.insert(
            id.into(),
            Annotations {
                label: label.into(),
                properties: BTreeMap::new(),
            },
        );
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        src: impl Into<String>,
        tgt: impl Into<String>,
        label: impl Into<String>,
    ) {
        self.edges.insert(
            id.into(),
            GraphEdge {
                src: src.into(),
                tgt: tgt.into(),
                annotations: Annotations {
                    label: label.into(),
                    properties: BTreeMap::new(),
                },
            },
        );
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (id, e) in &self.edges {
            for v in [&e.src, &e.tgt] {
                if !self.vertices.contains_key(v) {
                    return Err(ModelError::DanglingEdge {
                        edge: id.clone(),
                        vertex: v.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Labels and properties by element id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SideTables {
    pub vertices: BTreeMap<String, Annotations>,
    pub edges: BTreeMap<String, Annotations>,
}

/// `0 ⇉ 1` with arrows `s` and `t`.
pub fn graph_schema_category() -> PresentedCategory {
    let mut g = SchemaGraph::new();
    g.add_object("0").expect("fresh graph");
    g.add_object("1").expect("fresh graph");
    g.add_edge("s", "0", "1").expect("fresh graph");
    g.add_edge("t", "0", "1").expect("fresh graph");
    build_category(g, vec![], Bounds::default()).expect("no equations")
}

pub fn graph_to_functor(g: &PropertyGraph) -> Result<(InstanceFunctor, SideTables), ModelError> {
    g.validate()?;
    let mut inst = InstanceFunctor::empty(Arc::new(graph_schema_category()));
    inst.set_carrier("0", g.edges.keys().map(|k| Elem::atom(k.as_str())))?;
    inst.set_carrier("1", g.vertices.keys().map(|k| Elem::atom(k.as_str())))?;
    inst.set_action(
        "s",
        g.edges
            .iter()
            .map(|(k, e)| (Elem::atom(k.as_str()), Elem::atom(e.src.as_str()))),
    )?;
    inst.set_action(
        "t",
        g.edges
            .iter()
            .map(|(k, e)| (Elem::atom(k.as_str()), Elem::atom(e.tgt.as_str()))),
    )?;
    let side = SideTables {
        vertices: g.vertices.clone(),
        edges: g
            .edges
            .iter()
            .map(|(k, e)| (k.clone(), e.annotations.clone()))
            .collect(),
    };
    Ok((inst, side))
}

fn is_graph_schema(cat: &PresentedCategory) -> bool {
    let g = cat.graph();
    g.object_count() == 2
        && g.edge_count() == 2
        && cat.equations().is_empty()
        && [("s", "0", "1"), ("t", "0", "1")].iter().all(|(e, s, t)| {
            g.edge(e).is_some_and(|e| {
                let d = g.edge_decl(e);
                g.object_name(d.src) == *s && g.object_name(d.tgt) == *t
            })
        })
}

/// Inverse of [`graph_to_functor`]; annotations come from `side` when given.
pub fn functor_to_graph(
    inst: &InstanceFunctor,
    side: Option<&SideTables>,
) -> Result<PropertyGraph, ModelError> {
    let schema = inst.schema();
    if !is_graph_schema(schema) {
        return Err(ModelError::SchemaMismatch(
            "expected the graph schema 0 ⇉ 1 with arrows s, t".into(),
        ));
    }
    let g = schema.graph();
    let s = inst.action(g.require_edge("s")?)?;
    let t = inst.action(g.require_edge("t")?)?;
    let lookup = |table: Option<&BTreeMap<String, Annotations>>, id: &str| {
        table.and_then(|m| m.get(id)).cloned().unwrap_or_default()
    };
    let mut out = PropertyGraph::default();
    for v in inst.carrier(g.require_object("1")?) {
        let id = v.to_string();
        let ann = lookup(side.map(|s| &s.vertices), &id);
        out.vertices.insert(id, ann);
    }
    for (e, src) in s.pairs() {
        let id = e.to_string();
        let tgt = t.apply(e).expect("same domain");
        out.edges.insert(
            id.clone(),
            GraphEdge {
                src: src.to_string(),
                tgt: tgt.to_string(),
                annotations: lookup(side.map(|s| &s.edges), &id),
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn social() -> PropertyGraph {
        let mut g = PropertyGraph::default();
        g.add_vertex("alice", "person");
        g.add_vertex("bob", "person");
        g.vertices
            .get_mut("alice")
            .unwrap()
            .properties
            .insert("age".into(), "31".into());
        g.add_edge("k1", "alice", "bob", "knows");
        g.edges
            .get_mut("k1")
            .unwrap()
            .annotations
            .properties
            .insert("since".into(), "2019".into());
        g
    }

    #[test]
    fn endpoint_maps_become_s_and_t() {
        let (inst, _) = graph_to_functor(&social()).unwrap();
        assert!(inst.validate().is_valid());
        let g = inst.schema().graph();
        let s = inst.action(g.edge("s").unwrap()).unwrap();
        let t = inst.action(g.edge("t").unwrap()).unwrap();
        assert_eq!(s.apply(&Elem::atom("k1")), Some(&Elem::atom("alice")));
        assert_eq!(t.apply(&Elem::atom("k1")), Some(&Elem::atom("bob")));
    }

    #[test]
    fn round_trip_keeps_annotations() {
        let g = social();
        let (inst, side) = graph_to_functor(&g).unwrap();
        assert_eq!(functor_to_graph(&inst, Some(&side)).unwrap(), g);
        let bare = functor_to_graph(&inst, None).unwrap();
        assert_eq!(bare.edges["k1"].src, "alice");
        assert_eq!(bare.vertices["alice"], Annotations::default());
    }

    #[test]
    fn empty_graph_gives_empty_carriers() {
        let (inst, _) = graph_to_functor(&PropertyGraph::default()).unwrap();
        assert!(inst.carriers().iter().all(|c| c.is_empty()));
        assert_eq!(
            functor_to_graph(&inst, None).unwrap(),
            PropertyGraph::default()
        );
    }

    #[test]
    fn other_schemas_are_rejected() {
        let mut g = SchemaGraph::new();
        for o in ["a", "b", "c"] {
            g.add_object(o).unwrap();
        }
        let cat = Arc::new(build_category(g, vec![], Bounds::default()).unwrap());
        let inst = InstanceFunctor::empty(cat);
        assert!(matches!(
            functor_to_graph(&inst, None),
            Err(ModelError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn dangling_edges_are_rejected() {
        let mut g = social();
        g.add_edge("k2", "alice", "carol", "knows");
        assert!(matches!(
            graph_to_functor(&g),
            Err(ModelError::DanglingEdge { .. })
        ));
    }
}
