//! Data-and-schema transformations: a schema functor `F : C1 -> C2` together
//! with a natural transformation `ε : I2 ∘ F ⇒ I1`, where `I1` lives on `C1`
//! and `I2` on `C2`.
//!
//! [`check_transformation`] checks the data, [`check_kan_lift`] searches all
//! competitors for the universal property.

mod kan;
mod naturality;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::category::{
    classify_fullness, same_category, CatError, Fullness, FunctorDef, FunctorViolation,
    PresentedCategory,
};
use crate::instance::{
    Elem, FiniteFunction, FunctionDefect, InstanceError, InstanceFunctor, InstanceViolation,
};

pub use kan::{check_kan_lift, CapHit, FailureKind, KanCaps, KanFailure, UniversalityReport, Verdict};
pub use naturality::{check_naturality, BrokenSquare, NaturalityReport};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("component at `{object}` is not a function: {defect}")]
    ComponentTyping {
        object: String,
        defect: FunctionDefect,
    },
    #[error("component at `{object}` is not a bijection and cannot be inverted")]
    NotInvertible { object: String },
    #[error("not a valid transformation: {0}")]
    InvalidTransformation(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Category(#[from] CatError),
}

/// Components `α_c : source(c) -> target(c)` between two instances on the same
/// schema. Construction checks typing; naturality is checked separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTransformDef {
    source: InstanceFunctor,
    target: InstanceFunctor,
    components: Vec<FiniteFunction>,
}

impl NatTransformDef {
    pub fn new(
        source: InstanceFunctor,
        target: InstanceFunctor,
        components: Vec<BTreeMap<Elem, Elem>>,
    ) -> Result<Self, TransformError> {
        let schema = source.schema().clone();
        if !same_category(&schema, target.schema()) {
            return Err(TransformError::SchemaMismatch(
                "components join instances on different schemas".into(),
            ));
        }
        if components.len() != schema.object_count() {
            return Err(TransformError::SchemaMismatch(format!(
                "{} components for {} objects",
                components.len(),
                schema.object_count()
            )));
        }
        for inst in [&source, &target] {
            for e in schema.graph().edges() {
                inst.action(e)?;
            }
        }
        let components = schema
            .objects()
            .zip(&components)
            .map(|(c, map)| {
                FiniteFunction::from_map(source.carrier(c).clone(), target.carrier(c).clone(), map)
                    .map_err(|defect| TransformError::ComponentTyping {
                        object: schema.object_name(c).to_string(),
                        defect,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NatTransformDef {
            source,
            target,
            components,
        })
    }

    pub fn identity(inst: InstanceFunctor) -> Result<Self, TransformError> {
        let components = inst
            .carriers()
            .iter()
            .map(|c| c.iter().map(|x| (x.clone(), x.clone())).collect())
            .collect();
        NatTransformDef::new(inst.clone(), inst, components)
    }

    pub fn source(&self) -> &InstanceFunctor {
        &self.source
    }

    pub fn target(&self) -> &InstanceFunctor {
        &self.target
    }

    pub fn schema(&self) -> &Arc<PresentedCategory> {
        self.source.schema()
    }

    pub fn components(&self) -> &[FiniteFunction] {
        &self.components
    }

    pub fn component(&self, ob: crate::ObId) -> &FiniteFunction {
        &self.components[ob.0]
    }
}

/// A candidate lift: `F`, `I1` on `F`'s source, `I2` on `F`'s target and the
/// raw components of `ε : I2 ∘ F ⇒ I1`, one per object of the source.
#[derive(Clone, Debug)]
pub struct Transformation {
    functor: FunctorDef,
    source_instance: InstanceFunctor,
    target_instance: InstanceFunctor,
    epsilon: Vec<BTreeMap<Elem, Elem>>,
}

impl Transformation {
    pub fn new(
        functor: FunctorDef,
        source_instance: InstanceFunctor,
        target_instance: InstanceFunctor,
        epsilon: Vec<BTreeMap<Elem, Elem>>,
    ) -> Result<Self, TransformError> {
        if !same_category(functor.source(), source_instance.schema()) {
            return Err(TransformError::SchemaMismatch(
                "source instance does not live on the functor's source".into(),
            ));
        }
        if !same_category(functor.target(), target_instance.schema()) {
            return Err(TransformError::SchemaMismatch(
                "target instance does not live on the functor's target".into(),
            ));
        }
        if epsilon.len() != functor.source().object_count() {
            return Err(TransformError::SchemaMismatch(format!(
                "{} components for {} objects",
                epsilon.len(),
                functor.source().object_count()
            )));
        }
        Ok(Transformation {
            functor,
            source_instance,
            target_instance,
            epsilon,
        })
    }

    /// Builds ε from maps written source-data to target-data,
    /// `I1(c) -> I2(F c)`, inverting each one. Fails unless every component is
    /// a bijection.
    pub fn from_forward_components(
        functor: FunctorDef,
        source_instance: InstanceFunctor,
        target_instance: InstanceFunctor,
        forward: Vec<BTreeMap<Elem, Elem>>,
    ) -> Result<Self, TransformError> {
        let src = functor.source().clone();
        if forward.len() != src.object_count() {
            return Err(TransformError::SchemaMismatch(format!(
                "{} components for {} objects",
                forward.len(),
                src.object_count()
            )));
        }
        let mut epsilon = Vec::with_capacity(forward.len());
        for (c, map) in src.objects().zip(&forward) {
            let name = || src.object_name(c).to_string();
            let f = FiniteFunction::from_map(
                source_instance.carrier(c).clone(),
                target_instance.carrier(functor.map_object(c)).clone(),
                map,
            )
            .map_err(|defect| TransformError::ComponentTyping {
                object: name(),
                defect,
            })?;
            if !f.is_bijective() {
                return Err(TransformError::NotInvertible { object: name() });
            }
            epsilon.push(f.pairs().map(|(x, y)| (y.clone(), x.clone())).collect());
        }
        Transformation::new(functor, source_instance, target_instance, epsilon)
    }

    pub fn functor(&self) -> &FunctorDef {
        &self.functor
    }

    pub fn source_instance(&self) -> &InstanceFunctor {
        &self.source_instance
    }

    pub fn target_instance(&self) -> &InstanceFunctor {
        &self.target_instance
    }

    pub fn epsilon_components(&self) -> &[BTreeMap<Elem, Elem>] {
        &self.epsilon
    }

    /// ε as a typed transformation `I2 ∘ F ⇒ I1`.
    pub fn epsilon(&self) -> Result<NatTransformDef, TransformError> {
        let pulled = self.target_instance.pull_back(&self.functor)?;
        NatTransformDef::new(pulled, self.source_instance.clone(), self.epsilon.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransformReason {
    NotAFunctor(Vec<FunctorViolation>),
    NotFull { witness: String },
    FullnessUndecided(CatError),
    InvalidInstance {
        which: &'static str,
        violations: Vec<InstanceViolation>,
    },
    ComponentTyping(TransformError),
    NotNatural(Vec<BrokenSquare>),
}

impl fmt::Display for TransformReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformReason::NotAFunctor(v) => write!(f, "NotAFunctor ({} violations)", v.len()),
            TransformReason::NotFull { witness } => write!(f, "NotFull (witness {witness})"),
            TransformReason::FullnessUndecided(e) => write!(f, "FullnessUndecided ({e})"),
            TransformReason::InvalidInstance { which, violations } => {
                write!(f, "InvalidInstance ({which}, {} violations)", violations.len())
            }
            TransformReason::ComponentTyping(e) => write!(f, "ComponentTyping ({e})"),
            TransformReason::NotNatural(b) => write!(f, "NotNatural ({} broken squares)", b.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationReport {
    pub reasons: Vec<TransformReason>,
    /// Fullness result when the functor check passed.
    pub fullness: Option<Fullness>,
}

impl TransformationReport {
    pub fn is_valid(&self) -> bool {
        self.reasons.is_empty()
    }
}

/// Functoriality and fullness of `F`, validity of both instances, typing and
/// naturality of ε. Valid iff no reason is reported.
pub fn check_transformation(t: &Transformation) -> TransformationReport {
    let mut reasons = Vec::new();
    let mut fullness = None;
    let functor_report = t.functor.check();
    if functor_report.is_functor() {
        match t.functor.is_full() {
            Ok(full) => {
                if let Some(w) = &full.witness {
                    reasons.push(TransformReason::NotFull {
                        witness: t.functor.target().morphism_string(w),
                    });
                }
                fullness = Some(full);
            }
            Err(e) => reasons.push(TransformReason::FullnessUndecided(e)),
        }
    } else {
        reasons.push(TransformReason::NotAFunctor(functor_report.violations));
    }
    let mut instances_ok = true;
    for (which, inst) in [("source", &t.source_instance), ("target", &t.target_instance)] {
        let report = inst.validate();
        if !report.is_valid() {
            instances_ok = false;
            reasons.push(TransformReason::InvalidInstance {
                which,
                violations: report.violations,
            });
        }
    }
    if instances_ok {
        match t.epsilon() {
            Ok(eps) => {
                let report = check_naturality(&eps);
                if !report.is_natural() {
                    reasons.push(TransformReason::NotNatural(report.broken));
                }
            }
            Err(e) => reasons.push(TransformReason::ComponentTyping(e)),
        }
    }
    TransformationReport { reasons, fullness }
}

/// Every functor `c1 -> c2` with its fullness, in enumeration order.
pub fn classify_candidates(
    c1: &Arc<PresentedCategory>,
    c2: &Arc<PresentedCategory>,
    cap: usize,
) -> Result<Vec<(FunctorDef, bool)>, CatError> {
    Ok(classify_fullness(c1, c2, cap)?
        .into_iter()
        .map(|(f, full)| (f, full.full))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{build_category, Bounds, PathEquation, SchemaGraph};

    fn cat(objects: &[&str], arrows: &[(&str, &str, &str)]) -> Arc<PresentedCategory> {
        let mut g = SchemaGraph::new();
        for o in objects {
            g.add_object(*o).unwrap();
        }
        for (n, s, t) in arrows {
            g.add_edge(*n, s, t).unwrap();
        }
        Arc::new(build_category(g, vec![], Bounds::default()).unwrap())
    }

    fn functor(src: &Arc<PresentedCategory>, tgt: &Arc<PresentedCategory>, obs: &[&str], gens: &[&str]) -> FunctorDef {
        let object_map = obs.iter().map(|o| tgt.graph().object(o).unwrap()).collect();
        let generator_map = src
            .graph()
            .edges()
            .zip(gens)
            .map(|(e, g)| {
                let start = tgt.graph().object_name(
                    tgt.graph()
                        .object(obs[src.graph().edge_decl(e).src.0])
                        .unwrap(),
                ).to_string();
                let names: Vec<&str> = if g.is_empty() { vec![] } else { vec![*g] };
                tgt.graph().path_by_names(Some(&start), &names).unwrap()
            })
            .collect();
        FunctorDef::new(src.clone(), tgt.clone(), object_map, generator_map).unwrap()
    }

    fn atoms(xs: &[&str]) -> Vec<Elem> {
        xs.iter().map(|x| Elem::atom(*x)).collect()
    }

    fn map(xs: &[(Elem, Elem)]) -> BTreeMap<Elem, Elem> {
        xs.iter().cloned().collect()
    }

    /// knows/person pair with one edge v1 -> v2.
    fn fixture() -> (FunctorDef, InstanceFunctor, InstanceFunctor) {
        let kp = cat(&["k", "p"], &[("f1", "k", "p"), ("f2", "k", "p")]);
        let gs = cat(&["0", "1"], &[("s", "0", "1"), ("t", "0", "1")]);
        let f = functor(&kp, &gs, &["0", "1"], &["s", "t"]);
        let mut i2 = InstanceFunctor::empty(gs);
        i2.set_carrier("0", atoms(&["e1"])).unwrap();
        i2.set_carrier("1", atoms(&["v1", "v2"])).unwrap();
        i2.set_action("s", [(Elem::atom("e1"), Elem::atom("v1"))]).unwrap();
        i2.set_action("t", [(Elem::atom("e1"), Elem::atom("v2"))]).unwrap();
        let mut i1 = InstanceFunctor::empty(kp);
        let pair = Elem::tuple(["v1", "v2"]);
        i1.set_carrier("k", [pair.clone()]).unwrap();
        i1.set_carrier("p", atoms(&["v1", "v2"])).unwrap();
        i1.set_action("f1", [(pair.clone(), Elem::atom("v1"))]).unwrap();
        i1.set_action("f2", [(pair, Elem::atom("v2"))]).unwrap();
        (f, i1, i2)
    }

    fn eps() -> Vec<BTreeMap<Elem, Elem>> {
        vec![
            map(&[(Elem::atom("e1"), Elem::tuple(["v1", "v2"]))]),
            map(&[
                (Elem::atom("v1"), Elem::atom("v1")),
                (Elem::atom("v2"), Elem::atom("v2")),
            ]),
        ]
    }

    #[test]
    fn consistent_epsilon_is_valid() {
        let (f, i1, i2) = fixture();
        let t = Transformation::new(f, i1, i2, eps()).unwrap();
        let report = check_transformation(&t);
        assert!(report.is_valid(), "{:?}", report.reasons);
    }

    #[test]
    fn forward_components_are_inverted() {
        let (f, i1, i2) = fixture();
        let forward = eps()
            .into_iter()
            .map(|m| m.into_iter().map(|(a, b)| (b, a)).collect())
            .collect();
        let t = Transformation::from_forward_components(f, i1, i2, forward).unwrap();
        assert_eq!(t.epsilon_components(), eps().as_slice());
    }

    #[test]
    fn non_bijective_forward_component_is_refused() {
        let (f, mut i1, i2) = fixture();
        i1.set_carrier("p", atoms(&["v1", "v2", "v3"])).unwrap();
        let mut forward: Vec<BTreeMap<Elem, Elem>> = eps()
            .into_iter()
            .map(|m| m.into_iter().map(|(a, b)| (b, a)).collect())
            .collect();
        forward[1].insert(Elem::atom("v3"), Elem::atom("v2"));
        assert_eq!(
            Transformation::from_forward_components(f, i1, i2, forward).unwrap_err(),
            TransformError::NotInvertible { object: "p".into() }
        );
    }

    #[test]
    fn collapse_functor_is_not_full() {
        let (f, i1, i2) = fixture();
        let g = functor(f.source(), f.target(), &["0", "0"], &["", ""]);
        let mut e = eps();
        e[1] = map(&[]);
        let t = Transformation::new(g, i1, i2, e).unwrap();
        let report = check_transformation(&t);
        assert!(report
            .reasons
            .contains(&TransformReason::NotFull { witness: "s".into() }));
    }

    #[test]
    fn broken_equation_gives_not_a_functor() {
        let mut g = SchemaGraph::new();
        g.add_object("x").unwrap();
        g.add_object("y").unwrap();
        g.add_edge("a", "x", "y").unwrap();
        g.add_edge("b", "x", "y").unwrap();
        let a = g.path_by_names(None, &["a"]).unwrap();
        let b = g.path_by_names(None, &["b"]).unwrap();
        let src = Arc::new(build_category(g, vec![PathEquation::new(a, b)], Bounds::default()).unwrap());
        let gs = cat(&["0", "1"], &[("s", "0", "1"), ("t", "0", "1")]);
        let f = functor(&src, &gs, &["0", "1"], &["s", "t"]);
        let t = Transformation::new(
            f,
            InstanceFunctor::empty(src),
            InstanceFunctor::empty(gs),
            vec![map(&[]), map(&[])],
        )
        .unwrap();
        let report = check_transformation(&t);
        assert!(matches!(report.reasons[0], TransformReason::NotAFunctor(_)));
    }

    #[test]
    fn classify_candidates_matches_fullness() {
        let (f, _, _) = fixture();
        let list = classify_candidates(f.source(), f.target(), 100).unwrap();
        assert_eq!(list.len(), 6);
        assert_eq!(list.iter().filter(|(_, full)| *full).count(), 2);
    }
}
