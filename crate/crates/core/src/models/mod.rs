//! Concrete data models and their functorial encodings.
//!
//! - relational schemas become presented categories with one generator per
//!   foreign key; rows become carriers keyed by their primary key
//! - property graphs become instances on the two-object graph schema
//! - rooted trees become instances on the one-object loop category

pub mod graph;
pub mod relational;
pub mod tree;

use thiserror::Error;

use crate::category::CatError;
use crate::instance::InstanceError;

pub use graph::{
    functor_to_graph, graph_schema_category, graph_to_functor, Annotations, GraphEdge,
    PropertyGraph, SideTables,
};
pub use relational::{
    relational_instance, relational_to_category, FkChain, ForeignKey, RelationalInstance,
    RelationalSchema, Rows, Table,
};
pub use tree::{functor_to_tree, loop_category, tree_to_functor, NodePayload, TreeDefect, TreeDoc};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("table `{0}` declared twice")]
    DuplicateTable(String),
    #[error("unknown table `{0}`")]
    UnknownTable(String),
    #[error("unknown column `{table}.{column}`")]
    UnknownColumn { table: String, column: String },
    #[error("column `{table}.{column}` declared twice")]
    DuplicateColumn { table: String, column: String },
    #[error("foreign key `{fk}` is dangling: {reason}")]
    DanglingForeignKey { fk: String, reason: String },
    #[error("foreign key `{fk}` must target the single key column of `{table}`")]
    ForeignKeyTargetNotKey { fk: String, table: String },
    #[error("row {row} of `{table}` has {found} values, expected {expected}")]
    ArityMismatch {
        table: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("key {key} appears twice in `{table}`")]
    DuplicateKey { table: String, key: String },
    #[error("referential integrity: row {row} of `{table}` has {constraint} = {value}, which matches no row")]
    ReferentialIntegrityViolation {
        constraint: String,
        table: String,
        row: String,
        value: String,
    },
    #[error("graph edge `{edge}` refers to missing vertex `{vertex}`")]
    DanglingEdge { edge: String, vertex: String },
    #[error("not a tree: {0}")]
    NotATree(TreeDefect),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error(transparent)]
    Category(#[from] CatError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}
