//! Finitely presented categories.
//!
//! A [`PresentedCategory`] is a [`SchemaGraph`] plus path equations. Its
//! morphisms are congruence classes of paths under the smallest congruence
//! containing the equations. Each class is named by its shortlex-least path
//! (the [`MorphismClass::path`]), computed through a completed rewriting
//! system. Identity morphisms are the empty paths.
//!
//! Hom-sets are found by breadth-first enumeration of irreducible paths. The
//! enumeration fails loudly with [`CatError::HomCapExceeded`] when a hom-set
//! has more than `hom_cap` classes or has not saturated by `path_bound`.

mod functor;
mod graph;
mod rewrite;

use std::collections::VecDeque;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

pub use functor::{
    classify_fullness, enumerate_functors, enumerate_functors_upto, Fullness, FunctorDef, FunctorReport, FunctorViolation,
};
pub use graph::{EdgeDecl, EdgeId, ObId, Path, PathDisplay, SchemaGraph};
pub(crate) use functor::advance;

use rewrite::RewriteSystem;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CatError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownEdge(String),
    #[error("object `{0}` declared twice")]
    DuplicateObject(String),
    #[error("arrow `{0}` declared twice")]
    DuplicateEdge(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("equation `{lhs} = {rhs}` relates paths with different endpoints")]
    NonParallelEquation { lhs: String, rhs: String },
    #[error("hom-set {from} -> {to} is not finite under the caps: {reason}")]
    HomCapExceeded {
        from: String,
        to: String,
        reason: HomCapReason,
    },
    #[error("path normalization diverged: completion gave up after {rules} rules (rewrite cap {cap})")]
    NormalizationDiverged { rules: usize, cap: usize },
    #[error("cannot compose `{first}` with `{second}`")]
    NonComposable { first: String, second: String },
    #[error("more than {cap} functors to enumerate")]
    EnumerationCapExceeded { cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HomCapReason {
    /// More than `cap` distinct classes.
    TooManyClasses { cap: usize },
    /// New irreducible paths still appear at the length bound.
    Unsaturated { path_bound: usize },
}

impl std::fmt::Display for HomCapReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HomCapReason::TooManyClasses { cap } => write!(f, "more than {cap} classes"),
            HomCapReason::Unsaturated { path_bound } => {
                write!(f, "not saturated at path length {path_bound}")
            }
        }
    }
}

/// Enumeration bounds for the word problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Largest number of classes accepted in one hom-set.
    pub hom_cap: usize,
    /// Longest irreducible path explored when enumerating a hom-set.
    pub path_bound: usize,
    /// Largest number of rewrite rules created during completion; queued
    /// critical pairs are limited to 64 per permitted rule.
    pub rewrite_cap: usize,
}

impl Bounds {
    pub const DEFAULT_HOM_CAP: usize = 64;
    pub const DEFAULT_PATH_BOUND: usize = 8;
    pub const DEFAULT_REWRITE_CAP: usize = 256;
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            hom_cap: Self::DEFAULT_HOM_CAP,
            path_bound: Self::DEFAULT_PATH_BOUND,
            rewrite_cap: Self::DEFAULT_REWRITE_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathEquation {
    pub lhs: Path,
    pub rhs: Path,
}

impl PathEquation {
    pub fn new(lhs: Path, rhs: Path) -> Self {
        PathEquation { lhs, rhs }
    }
}

/// A morphism of a presented category, named by its canonical path.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorphismClass {
    path: Path,
}

impl MorphismClass {
    pub fn domain(&self) -> ObId {
        self.path.start()
    }

    pub fn codomain(&self) -> ObId {
        self.path.end()
    }

    /// The shortlex-least representative.
    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn is_identity(&self) -> bool {
        self.path.is_identity()
    }
}

pub struct PresentedCategory {
    graph: SchemaGraph,
    equations: Vec<PathEquation>,
    bounds: Bounds,
    rewriting: OnceLock<Result<RewriteSystem, CatError>>,
    reach: Vec<Vec<bool>>,
}

impl Clone for PresentedCategory {
    fn clone(&self) -> Self {
        PresentedCategory {
            graph: self.graph.clone(),
            equations: self.equations.clone(),
            bounds: self.bounds,
            rewriting: self.rewriting.clone(),
            reach: self.reach.clone(),
        }
    }
}

impl std::fmt::Debug for PresentedCategory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PresentedCategory")
            .field("graph", &self.graph)
            .field("equations", &self.equations)
            .field("bounds", &self.bounds)
            .finish_non_exhaustive()
    }
}

/// Presentations are equal when their graphs and declared equations are.
impl PartialEq for PresentedCategory {
    fn eq(&self, other: &Self) -> bool {
        self.graph == other.graph && self.equations == other.equations
    }
}

impl Eq for PresentedCategory {}

/// Builds the category presented by `graph` and `equations`.
///
/// Only endpoint typing is checked here; the rewriting system is completed on
/// first use, so divergence surfaces from [`PresentedCategory::normalize`].
pub fn build_category(
    graph: SchemaGraph,
    equations: Vec<PathEquation>,
    bounds: Bounds,
) -> Result<PresentedCategory, CatError> {
    for eq in &equations {
        graph.check_path(&eq.lhs)?;
        graph.check_path(&eq.rhs)?;
        if eq.lhs.start() != eq.rhs.start() || eq.lhs.end() != eq.rhs.end() {
            return Err(CatError::NonParallelEquation {
                lhs: graph.display_path(&eq.lhs).to_string(),
                rhs: graph.display_path(&eq.rhs).to_string(),
            });
        }
    }
    let reach = graph.reachability();
    Ok(PresentedCategory {
        graph,
        equations,
        bounds,
        rewriting: OnceLock::new(),
        reach,
    })
}

impl PresentedCategory {
    pub fn graph(&self) -> &SchemaGraph {
        &self.graph
    }

    pub fn equations(&self) -> &[PathEquation] {
        &self.equations
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// Same presentation under different bounds.
    pub fn with_bounds(&self, bounds: Bounds) -> PresentedCategory {
        PresentedCategory {
            graph: self.graph.clone(),
            equations: self.equations.clone(),
            bounds,
            rewriting: OnceLock::new(),
            reach: self.reach.clone(),
        }
    }

    pub fn object_count(&self) -> usize {
        self.graph.object_count()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObId> + '_ {
        self.graph.objects()
    }

    pub fn object_name(&self, ob: ObId) -> &str {
        self.graph.object_name(ob)
    }

    pub fn path_string(&self, p: &Path) -> String {
        self.graph.display_path(p).to_string()
    }

    pub fn morphism_string(&self, m: &MorphismClass) -> String {
        self.path_string(&m.path)
    }

    fn rewriting(&self) -> Result<&RewriteSystem, CatError> {
        self.rewriting
            .get_or_init(|| {
                let cap = self.bounds.rewrite_cap;
                RewriteSystem::complete(
                    self.equations
                        .iter()
                        .map(|eq| (eq.lhs.edges().to_vec(), eq.rhs.edges().to_vec())),
                    cap,
                )
                .map_err(|d| CatError::NormalizationDiverged {
                    rules: d.rules,
                    cap,
                })
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Whether the rewriting system completes within `rewrite_cap`.
    pub fn check_rewriting(&self) -> Result<usize, CatError> {
        self.rewriting().map(|r| r.rules().len())
    }

    pub fn identity(&self, ob: ObId) -> MorphismClass {
        MorphismClass {
            path: Path::identity(ob),
        }
    }

    /// The class of `p`, named by its shortlex-least representative.
    pub fn normalize(&self, p: &Path) -> Result<MorphismClass, CatError> {
        self.graph.check_path(p)?;
        let sys = self.rewriting()?;
        let edges = sys.reduce(p.edges());
        Ok(MorphismClass {
            path: Path::from_parts(p.start(), p.end(), edges),
        })
    }

    pub fn congruent(&self, p: &Path, q: &Path) -> Result<bool, CatError> {
        Ok(self.normalize(p)? == self.normalize(q)?)
    }

    /// `f` followed by `g`, i.e. the composite usually written `g ∘ f`.
    pub fn compose(&self, f: &MorphismClass, g: &MorphismClass) -> Result<MorphismClass, CatError> {
        let p = f.path.then(&g.path).map_err(|_| CatError::NonComposable {
            first: self.morphism_string(f),
            second: self.morphism_string(g),
        })?;
        self.normalize(&p)
    }

    /// All classes `c -> d`, in shortlex order of their canonical paths.
    pub fn hom_set(&self, c: ObId, d: ObId) -> Result<Vec<MorphismClass>, CatError> {
        if !self.graph.contains_object(c) || !self.graph.contains_object(d) {
            return Err(CatError::InvalidPath("object out of range".into()));
        }
        let sys = self.rewriting()?;
        let Bounds {
            hom_cap,
            path_bound,
            ..
        } = self.bounds;
        let exceeded = |reason| CatError::HomCapExceeded {
            from: self.object_name(c).to_string(),
            to: self.object_name(d).to_string(),
            reason,
        };

        // Irreducible words are prefix-closed, so growing irreducible paths
        // one edge at a time reaches every normal form. Paths whose end cannot
        // reach `d` are dropped; once a level is empty no longer normal form
        // into `d` exists.
        let mut found = Vec::new();
        let mut level: VecDeque<(ObId, Vec<EdgeId>)> = VecDeque::new();
        level.push_back((c, Vec::new()));
        let mut length = 0usize;
        while !level.is_empty() {
            if length > path_bound {
                return Err(exceeded(HomCapReason::Unsaturated { path_bound }));
            }
            let mut next = VecDeque::new();
            for (end, word) in level {
                if end == d {
                    found.push(MorphismClass {
                        path: Path::from_parts(c, d, word.clone()),
                    });
                    if found.len() > hom_cap {
                        return Err(exceeded(HomCapReason::TooManyClasses { cap: hom_cap }));
                    }
                }
                for &e in self.graph.outgoing(end) {
                    let tgt = self.graph.edge_decl(e).tgt;
                    if !self.reach[tgt.0][d.0] {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(e);
                    if !sys.has_reducible_suffix(&w) {
                        next.push_back((tgt, w));
                    }
                }
            }
            level = next;
            length += 1;
        }
        found.sort();
        Ok(found)
    }

    /// Every morphism, ordered by (domain, codomain, canonical path).
    pub fn all_morphisms(&self) -> Result<Vec<MorphismClass>, CatError> {
        let mut out = Vec::new();
        for c in self.objects() {
            for d in self.objects() {
                out.extend(self.hom_set(c, d)?);
            }
        }
        Ok(out)
    }
}

/// Shared handle used by functors and instances.
pub type CategoryRef = Arc<PresentedCategory>;

pub(crate) fn same_category(a: &PresentedCategory, b: &PresentedCategory) -> bool {
    std::ptr::eq(a, b) || a == b
}
