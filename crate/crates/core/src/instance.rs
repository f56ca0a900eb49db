//! Finite Set-valued instances of presented categories.
//!
//! Carriers are sorted sets of [`Elem`]s and functions are stored as explicit
//! tables, so equality of functions is extensional and decidable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::category::{same_category, CatError, EdgeId, FunctorDef, ObId, Path, PresentedCategory};

/// An element of a carrier: a scalar atom or a positional tuple of atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Elem {
    Atom(String),
    Tuple(Vec<String>),
}

impl Elem {
    pub fn atom(s: impl Into<String>) -> Self {
        Elem::Atom(s.into())
    }

    pub fn tuple<S: Into<String>>(parts: impl IntoIterator<Item = S>) -> Self {
        Elem::Tuple(parts.into_iter().map(Into::into).collect())
    }
}

impl From<&str> for Elem {
    fn from(s: &str) -> Self {
        Elem::Atom(s.to_string())
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Atom(a) => f.write_str(a),
            Elem::Tuple(parts) => write!(f, "({})", parts.join(",")),
        }
    }
}

/// Sorted, duplicate-free set of elements.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FiniteSet(Vec<Elem>);

impl FiniteSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Elem> {
        self.0.iter()
    }

    pub fn elements(&self) -> &[Elem] {
        &self.0
    }

    pub fn contains(&self, x: &Elem) -> bool {
        self.index_of(x).is_some()
    }

    pub fn index_of(&self, x: &Elem) -> Option<usize> {
        self.0.binary_search(x).ok()
    }

    pub fn get(&self, i: usize) -> &Elem {
        &self.0[i]
    }
}

impl FromIterator<Elem> for FiniteSet {
    fn from_iter<I: IntoIterator<Item = Elem>>(iter: I) -> Self {
        let mut v: Vec<Elem> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        FiniteSet(v)
    }
}

impl IntoIterator for FiniteSet {
    type Item = Elem;
    type IntoIter = std::vec::IntoIter<Elem>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a FiniteSet {
    type Item = &'a Elem;
    type IntoIter = std::slice::Iter<'a, Elem>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Why a table fails to be a total function between two sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionDefect {
    /// A domain element has no image.
    Missing(Elem),
    /// An image is outside the codomain.
    Escapes { element: Elem, image: Elem },
    /// A mapped element is not in the domain.
    Stray(Elem),
}

impl fmt::Display for FunctionDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionDefect::Missing(x) => write!(f, "no image for {x}"),
            FunctionDefect::Escapes { element, image } => {
                write!(f, "{element} maps to {image}, outside the codomain")
            }
            FunctionDefect::Stray(x) => write!(f, "{x} is mapped but not in the domain"),
        }
    }
}

/// Total function between finite sets, stored as an index table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteFunction {
    domain: FiniteSet,
    codomain: FiniteSet,
    table: Vec<usize>,
}

impl FiniteFunction {
    pub fn from_map(
        domain: FiniteSet,
        codomain: FiniteSet,
        map: &BTreeMap<Elem, Elem>,
    ) -> Result<Self, FunctionDefect> {
        if let Some(x) = map.keys().find(|x| !domain.contains(x)) {
            return Err(FunctionDefect::Stray(x.clone()));
        }
        let mut table = Vec::with_capacity(domain.len());
        for x in &domain {
            let y = map.get(x).ok_or_else(|| FunctionDefect::Missing(x.clone()))?;
            let j = codomain.index_of(y).ok_or_else(|| FunctionDefect::Escapes {
                element: x.clone(),
                image: y.clone(),
            })?;
            table.push(j);
        }
        Ok(FiniteFunction {
            domain,
            codomain,
            table,
        })
    }

    /// Builds from an index table; `None` if the table is the wrong size or
    /// points outside the codomain.
    pub fn from_table(domain: FiniteSet, codomain: FiniteSet, table: Vec<usize>) -> Option<Self> {
        if table.len() != domain.len() || table.iter().any(|&j| j >= codomain.len()) {
            return None;
        }
        Some(FiniteFunction {
            domain,
            codomain,
            table,
        })
    }

    pub fn identity(set: FiniteSet) -> Self {
        let table = (0..set.len()).collect();
        FiniteFunction {
            domain: set.clone(),
            codomain: set,
            table,
        }
    }

    pub fn domain(&self) -> &FiniteSet {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteSet {
        &self.codomain
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn apply(&self, x: &Elem) -> Option<&Elem> {
        let i = self.domain.index_of(x)?;
        Some(self.codomain.get(self.table[i]))
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.table[i]
    }

    /// `self` followed by `next`; `None` unless `next.domain == self.codomain`.
    pub fn then(&self, next: &FiniteFunction) -> Option<FiniteFunction> {
        if self.codomain != next.domain {
            return None;
        }
        Some(FiniteFunction {
            domain: self.domain.clone(),
            codomain: next.codomain.clone(),
            table: self.table.iter().map(|&j| next.table[j]).collect(),
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Elem, &Elem)> + '_ {
        self.domain
            .iter()
            .zip(&self.table)
            .map(|(x, &j)| (x, self.codomain.get(j)))
    }

    pub fn to_map(&self) -> BTreeMap<Elem, Elem> {
        self.pairs().map(|(x, y)| (x.clone(), y.clone())).collect()
    }

    pub fn is_bijective(&self) -> bool {
        if self.domain.len() != self.codomain.len() {
            return false;
        }
        let mut hit = vec![false; self.codomain.len()];
        for &j in &self.table {
            if std::mem::replace(&mut hit[j], true) {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("action of `{arrow}` is not a function: {defect}")]
    InvalidAction { arrow: String, defect: FunctionDefect },
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error(transparent)]
    Category(#[from] CatError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceViolation {
    NonTotalAction { arrow: String, element: Elem },
    CodomainEscape { arrow: String, element: Elem, image: Elem },
    StrayMapping { arrow: String, element: Elem },
    EquationBroken {
        equation: usize,
        lhs: String,
        rhs: String,
        element: Elem,
        lhs_value: Elem,
        rhs_value: Elem,
    },
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceViolation::NonTotalAction { arrow, element } => {
                write!(f, "{arrow}: no image for {element}")
            }
            InstanceViolation::CodomainEscape {
                arrow,
                element,
                image,
            } => write!(f, "{arrow}: {element} maps to {image}, outside the target set"),
            InstanceViolation::StrayMapping { arrow, element } => {
                write!(f, "{arrow}: {element} is not in the source set")
            }
            InstanceViolation::EquationBroken {
                lhs,
                rhs,
                element,
                lhs_value,
                rhs_value,
                ..
            } => write!(
                f,
                "{lhs} = {rhs} fails at {element}: {lhs_value} vs {rhs_value}"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceReport {
    pub violations: Vec<InstanceViolation>,
}

impl InstanceReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Carrier set per object and action table per generating arrow.
///
/// Actions are kept as raw tables so that malformed input can be reported by
/// [`InstanceFunctor::validate`] instead of being rejected on construction.
#[derive(Clone, Debug)]
pub struct InstanceFunctor {
    schema: Arc<PresentedCategory>,
    carriers: Vec<FiniteSet>,
    actions: Vec<BTreeMap<Elem, Elem>>,
}

impl PartialEq for InstanceFunctor {
    fn eq(&self, other: &Self) -> bool {
        same_category(&self.schema, &other.schema)
            && self.carriers == other.carriers
            && self.actions == other.actions
    }
}

impl Eq for InstanceFunctor {}

impl InstanceFunctor {
    pub fn new(
        schema: Arc<PresentedCategory>,
        carriers: Vec<FiniteSet>,
        actions: Vec<BTreeMap<Elem, Elem>>,
    ) -> Result<Self, InstanceError> {
        if carriers.len() != schema.graph().object_count()
            || actions.len() != schema.graph().edge_count()
        {
            return Err(InstanceError::SchemaMismatch(format!(
                "{} carriers and {} actions for {} objects and {} arrows",
                carriers.len(),
                actions.len(),
                schema.graph().object_count(),
                schema.graph().edge_count()
            )));
        }
        Ok(InstanceFunctor {
            schema,
            carriers,
            actions,
        })
    }

    /// Empty carriers and actions everywhere.
    pub fn empty(schema: Arc<PresentedCategory>) -> Self {
        let carriers = vec![FiniteSet::new(); schema.graph().object_count()];
        let actions = vec![BTreeMap::new(); schema.graph().edge_count()];
        InstanceFunctor {
            schema,
            carriers,
            actions,
        }
    }

    pub fn set_carrier(&mut self, object: &str, elems: impl IntoIterator<Item = Elem>) -> Result<(), InstanceError> {
        let ob = self
            .schema
            .graph()
            .object(object)
            .ok_or_else(|| InstanceError::UnknownObject(object.to_string()))?;
        self.carriers[ob.0] = elems.into_iter().collect();
        Ok(())
    }

    pub fn set_action(
        &mut self,
        arrow: &str,
        pairs: impl IntoIterator<Item = (Elem, Elem)>,
    ) -> Result<(), InstanceError> {
        let e = self
            .schema
            .graph()
            .edge(arrow)
            .ok_or_else(|| InstanceError::UnknownArrow(arrow.to_string()))?;
        self.actions[e.0] = pairs.into_iter().collect();
        Ok(())
    }

    pub fn schema(&self) -> &Arc<PresentedCategory> {
        &self.schema
    }

    pub fn carrier(&self, ob: ObId) -> &FiniteSet {
        &self.carriers[ob.0]
    }

    pub fn carriers(&self) -> &[FiniteSet] {
        &self.carriers
    }

    pub fn raw_action(&self, e: EdgeId) -> &BTreeMap<Elem, Elem> {
        &self.actions[e.0]
    }

    pub fn raw_actions(&self) -> &[BTreeMap<Elem, Elem>] {
        &self.actions
    }

    pub fn action(&self, e: EdgeId) -> Result<FiniteFunction, InstanceError> {
        let decl = self.schema.graph().edge_decl(e);
        FiniteFunction::from_map(
            self.carriers[decl.src.0].clone(),
            self.carriers[decl.tgt.0].clone(),
            &self.actions[e.0],
        )
        .map_err(|defect| InstanceError::InvalidAction {
            arrow: decl.name.clone(),
            defect,
        })
    }

    pub fn validate(&self) -> InstanceReport {
        let graph = self.schema.graph();
        let mut violations = Vec::new();
        for e in graph.edges() {
            let decl = graph.edge_decl(e);
            let (dom, cod) = (&self.carriers[decl.src.0], &self.carriers[decl.tgt.0]);
            let table = &self.actions[e.0];
            for x in table.keys().filter(|x| !dom.contains(x)) {
                violations.push(InstanceViolation::StrayMapping {
                    arrow: decl.name.clone(),
                    element: x.clone(),
                });
            }
            for x in dom {
                match table.get(x) {
                    None => violations.push(InstanceViolation::NonTotalAction {
                        arrow: decl.name.clone(),
                        element: x.clone(),
                    }),
                    Some(y) if !cod.contains(y) => {
                        violations.push(InstanceViolation::CodomainEscape {
                            arrow: decl.name.clone(),
                            element: x.clone(),
                            image: y.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        if !violations.is_empty() {
            return InstanceReport { violations };
        }
        for (i, eq) in self.schema.equations().iter().enumerate() {
            let (Ok(l), Ok(r)) = (self.eval_path(&eq.lhs), self.eval_path(&eq.rhs)) else {
                continue;
            };
            let differing = l
                .pairs()
                .zip(r.pairs())
                .find(|((_, a), (_, b))| a != b)
                .map(|((x, a), (_, b))| (x.clone(), a.clone(), b.clone()));
            if let Some((element, lhs_value, rhs_value)) = differing {
                violations.push(InstanceViolation::EquationBroken {
                    equation: i,
                    lhs: self.schema.path_string(&eq.lhs),
                    rhs: self.schema.path_string(&eq.rhs),
                    element,
                    lhs_value,
                    rhs_value,
                });
            }
        }
        InstanceReport { violations }
    }

    /// The function a path denotes: composite of the generator actions; the
    /// identity on the start carrier for an empty path.
    pub fn eval_path(&self, p: &Path) -> Result<FiniteFunction, InstanceError> {
        self.schema
            .graph()
            .check_path(p)
            .map_err(|e| InstanceError::InvalidPath(e.to_string()))?;
        let mut f = FiniteFunction::identity(self.carriers[p.start().0].clone());
        for &e in p.edges() {
            let step = self.action(e)?;
            f = f.then(&step).expect("consecutive carriers agree");
        }
        Ok(f)
    }

    /// Restriction along `functor`: the composite `self ∘ functor` on the
    /// functor's source.
    pub fn pull_back(&self, functor: &FunctorDef) -> Result<InstanceFunctor, InstanceError> {
        if !same_category(functor.target(), &self.schema) {
            return Err(InstanceError::SchemaMismatch(
                "the instance does not live on the functor's target".into(),
            ));
        }
        let src = functor.source();
        let carriers = src
            .objects()
            .map(|c| self.carriers[functor.map_object(c).0].clone())
            .collect();
        let actions = src
            .graph()
            .edges()
            .map(|e| Ok(self.eval_path(functor.map_generator(e))?.to_map()))
            .collect::<Result<Vec<_>, InstanceError>>()?;
        InstanceFunctor::new(src.clone(), carriers, actions)
    }
}

/// [`InstanceFunctor::pull_back`] as a free function.
pub fn pull_back(functor: &FunctorDef, instance: &InstanceFunctor) -> Result<InstanceFunctor, InstanceError> {
    instance.pull_back(functor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::{build_category, Bounds, PathEquation, SchemaGraph};

    fn set(xs: &[&str]) -> FiniteSet {
        xs.iter().map(|x| Elem::atom(*x)).collect()
    }

    fn pairs(xs: &[(&str, &str)]) -> Vec<(Elem, Elem)> {
        xs.iter().map(|(a, b)| (Elem::atom(*a), Elem::atom(*b))).collect()
    }

    fn parallel_with_equation() -> Arc<PresentedCategory> {
        let mut g = SchemaGraph::new();
        g.add_object("x").unwrap();
        g.add_object("y").unwrap();
        g.add_edge("a", "x", "y").unwrap();
        g.add_edge("b", "x", "y").unwrap();
        let a = g.path_by_names(None, &["a"]).unwrap();
        let b = g.path_by_names(None, &["b"]).unwrap();
        Arc::new(build_category(g, vec![PathEquation::new(a, b)], Bounds::default()).unwrap())
    }

    #[test]
    fn empty_instance_is_valid() {
        let inst = InstanceFunctor::empty(parallel_with_equation());
        assert!(inst.validate().is_valid());
    }

    #[test]
    fn broken_equation_names_the_element() {
        let mut inst = InstanceFunctor::empty(parallel_with_equation());
        inst.set_carrier("x", set(&["1", "2"])).unwrap();
        inst.set_carrier("y", set(&["u", "v"])).unwrap();
        inst.set_action("a", pairs(&[("1", "u"), ("2", "u")])).unwrap();
        inst.set_action("b", pairs(&[("1", "u"), ("2", "v")])).unwrap();
        let report = inst.validate();
        assert_eq!(
            report.violations,
            vec![InstanceViolation::EquationBroken {
                equation: 0,
                lhs: "a".into(),
                rhs: "b".into(),
                element: Elem::atom("2"),
                lhs_value: Elem::atom("u"),
                rhs_value: Elem::atom("v"),
            }]
        );
    }

    #[test]
    fn non_total_and_escaping_actions_are_reported() {
        let mut inst = InstanceFunctor::empty(parallel_with_equation());
        inst.set_carrier("x", set(&["1", "2"])).unwrap();
        inst.set_carrier("y", set(&["u"])).unwrap();
        inst.set_action("a", pairs(&[("1", "u")])).unwrap();
        inst.set_action("b", pairs(&[("1", "u"), ("2", "w"), ("3", "u")])).unwrap();
        let v = inst.validate().violations;
        assert!(v.contains(&InstanceViolation::NonTotalAction {
            arrow: "a".into(),
            element: Elem::atom("2")
        }));
        assert!(v.contains(&InstanceViolation::CodomainEscape {
            arrow: "b".into(),
            element: Elem::atom("2"),
            image: Elem::atom("w")
        }));
        assert!(v.contains(&InstanceViolation::StrayMapping {
            arrow: "b".into(),
            element: Elem::atom("3")
        }));
    }

    #[test]
    fn empty_path_evaluates_to_identity() {
        let mut inst = InstanceFunctor::empty(parallel_with_equation());
        inst.set_carrier("y", set(&["u", "v"])).unwrap();
        let f = inst.eval_path(&Path::identity(ObId(1))).unwrap();
        assert_eq!(f, FiniteFunction::identity(set(&["u", "v"])));
    }

    #[test]
    fn function_composition_and_bijectivity() {
        let ab = FiniteFunction::from_map(
            set(&["1", "2"]),
            set(&["u", "v"]),
            &pairs(&[("1", "v"), ("2", "u")]).into_iter().collect(),
        )
        .unwrap();
        assert!(ab.is_bijective());
        let back = ab.then(&ab);
        assert!(back.is_none());
        let swap = FiniteFunction::from_map(
            set(&["u", "v"]),
            set(&["u", "v"]),
            &pairs(&[("u", "v"), ("v", "u")]).into_iter().collect(),
        )
        .unwrap();
        let twice = swap.then(&swap).unwrap();
        assert_eq!(twice, FiniteFunction::identity(set(&["u", "v"])));
        assert_eq!(ab.then(&swap).unwrap().apply(&Elem::atom("1")), Some(&Elem::atom("u")));
    }

    #[test]
    fn tuple_elements_display_positionally() {
        assert_eq!(Elem::tuple(["C1", "M1"]).to_string(), "(C1,M1)");
    }
}
