use super::NatTransformDef;
use crate::instance::Elem;

/// A generator `e : c -> d` whose square fails at `element` of `source(c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrokenSquare {
    pub generator: String,
    pub element: Elem,
    /// `α_d(source(e)(x))`
    pub via_source: Elem,
    /// `target(e)(α_c(x))`
    pub via_target: Elem,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NaturalityReport {
    /// At most one entry per generator, in declaration order.
    pub broken: Vec<BrokenSquare>,
}

impl NaturalityReport {
    /// Why checking generators suffices.
    pub const NOTE: &'static str = "squares are checked for generating arrows only; squares for \
        composites and identities follow by pasting";

    pub fn is_natural(&self) -> bool {
        self.broken.is_empty()
    }
}

/// For each generator `e : c -> d`, compares `target(e) ∘ α_c` with
/// `α_d ∘ source(e)` elementwise. The witness is the first differing element
/// of `source(c)`.
pub fn check_naturality(alpha: &NatTransformDef) -> NaturalityReport {
    let graph = alpha.schema().graph();
    let mut broken = Vec::new();
    for e in graph.edges() {
        let decl = graph.edge_decl(e);
        let src_e = alpha.source().action(e).expect("checked on construction");
        let tgt_e = alpha.target().action(e).expect("checked on construction");
        let (a_c, a_d) = (alpha.component(decl.src), alpha.component(decl.tgt));
        for (i, x) in src_e.domain().iter().enumerate() {
            let via_source = a_d.apply_index(src_e.apply_index(i));
            let via_target = tgt_e.apply_index(a_c.apply_index(i));
            if via_source != via_target {
                broken.push(BrokenSquare {
                    generator: decl.name.clone(),
                    element: x.clone(),
                    via_source: a_d.codomain().get(via_source).clone(),
                    via_target: tgt_e.codomain().get(via_target).clone(),
                });
                break;
            }
        }
    }
    NaturalityReport { broken }
}
