//! Categorical representation of multi-model data.
//!
//! Schemas are finitely presented categories ([`category`]), data instances are
//! finite Set-valued functors on them ([`instance`]), concrete relational,
//! property-graph and tree data convert to and from that representation
//! ([`models`]), and data-and-schema transformations are checked as right Kan
//! lifts ([`transform`]).

pub mod category;
pub mod instance;
pub mod models;
pub mod transform;

pub use category::{
    build_category, Bounds, CatError, EdgeId, FunctorDef, MorphismClass, ObId, Path,
    PathEquation, PresentedCategory, SchemaGraph,
};
pub use instance::{Elem, FiniteFunction, FiniteSet, InstanceError, InstanceFunctor};
