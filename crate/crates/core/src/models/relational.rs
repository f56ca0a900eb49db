//! Relational schemas as presented categories.
//!
//! Every table is an object. A row is identified by its primary key value
//! (an atom for a one-column key, a tuple otherwise), so a table object also
//! stands for its key column. A foreign key `T.c -> U.k` must target the key of
//! `U` and becomes a generator `T.c : T -> U` sending a row of `T` to the row of
//! `U` it references. Non-key columns are kept beside the functor in
//! [`RelationalInstance::rows`].

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use super::ModelError;
use crate::category::{build_category, Bounds, PathEquation, PresentedCategory, SchemaGraph};
use crate::instance::{Elem, FiniteSet, InstanceFunctor};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    /// Key columns; empty means every column.
    pub key: Vec<String>,
}

impl Table {
    pub fn new<S: Into<String>>(name: impl Into<String>, columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            name: name.into(),
            columns: columns.into_iter().map(Into::into).collect(),
            key: Vec::new(),
        }
    }

    pub fn with_key<S: Into<String>>(mut self, key: impl IntoIterator<Item = S>) -> Self {
        self.key = key.into_iter().map(Into::into).collect();
        self
    }

    pub fn key_columns(&self) -> Vec<&str> {
        if self.key.is_empty() {
            self.columns.iter().map(String::as_str).collect()
        } else {
            self.key.iter().map(String::as_str).collect()
        }
    }

    pub fn column_index(&self, column: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == column)
    }

    fn key_of(&self, row: &[String]) -> Elem {
        let parts: Vec<String> = self
            .key_columns()
            .iter()
            .map(|c| row[self.column_index(c).expect("validated key")].clone())
            .collect();
        if parts.len() == 1 {
            Elem::Atom(parts.into_iter().next().unwrap())
        } else {
            Elem::Tuple(parts)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForeignKey {
    pub table: String,
    pub column: String,
    pub ref_table: String,
    pub ref_column: String,
}

impl ForeignKey {
    pub fn new(
        table: impl Into<String>,
        column: impl Into<String>,
        ref_table: impl Into<String>,
        ref_column: impl Into<String>,
    ) -> Self {
        ForeignKey {
            table: table.into(),
            column: column.into(),
            ref_table: ref_table.into(),
            ref_column: ref_column.into(),
        }
    }

    /// Generator name, `table.column`.
    pub fn name(&self) -> String {
        format!("{}.{}", self.table, self.column)
    }
}

/// A chain of foreign keys starting at a table; empty means the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FkChain {
    pub start: String,
    pub fks: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelationalSchema {
    pub tables: Vec<Table>,
    pub foreign_keys: Vec<ForeignKey>,
    pub path_equations: Vec<(FkChain, FkChain)>,
}

/// Rows per table, values in column order.
pub type Rows = BTreeMap<String, Vec<Vec<String>>>;

impl RelationalSchema {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    fn require_table(&self, name: &str) -> Result<&Table, ModelError> {
        self.table(name)
            .ok_or_else(|| ModelError::UnknownTable(name.to_string()))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let mut names = HashSet::new();
        for t in &self.tables {
            if !names.insert(&t.name) {
                return Err(ModelError::DuplicateTable(t.name.clone()));
            }
            let mut cols = HashSet::new();
            for c in &t.columns {
                if !cols.insert(c) {
                    return Err(ModelError::DuplicateColumn {
                        table: t.name.clone(),
                        column: c.clone(),
                    });
                }
            }
            for k in &t.key {
                if t.column_index(k).is_none() {
                    return Err(ModelError::UnknownColumn {
                        table: t.name.clone(),
                        column: k.clone(),
                    });
                }
            }
        }
        for fk in &self.foreign_keys {
            let dangling = |reason: String| ModelError::DanglingForeignKey {
                fk: fk.name(),
                reason,
            };
            let from = self
                .table(&fk.table)
                .ok_or_else(|| dangling(format!("no table `{}`", fk.table)))?;
            if from.column_index(&fk.column).is_none() {
                return Err(dangling(format!("no column `{}`", fk.name())));
            }
            let to = self
                .table(&fk.ref_table)
                .ok_or_else(|| dangling(format!("no table `{}`", fk.ref_table)))?;
            if to.column_index(&fk.ref_column).is_none() {
                return Err(dangling(format!(
                    "no column `{}.{}`",
                    fk.ref_table, fk.ref_column
                )));
            }
            if to.key_columns() != [fk.ref_column.as_str()] {
                return Err(ModelError::ForeignKeyTargetNotKey {
                    fk: fk.name(),
                    table: to.name.clone(),
                });
            }
        }
        Ok(())
    }
}

/// Objects are tables, generators are foreign keys, equations are the
/// declared foreign-key chain equalities.
pub fn relational_to_category(
    rs: &RelationalSchema,
    bounds: Bounds,
) -> Result<PresentedCategory, ModelError> {
    rs.validate()?;
    let mut g = SchemaGraph::new();
    for t in &rs.tables {
        g.add_object(t.name.clone())?;
    }
    for fk in &rs.foreign_keys {
        g.add_edge(fk.name(), &fk.table, &fk.ref_table)?;
    }
    let chain = |c: &FkChain, g: &SchemaGraph| {
        rs.require_table(&c.start)?;
        let names: Vec<&str> = c.fks.iter().map(String::as_str).collect();
        Ok::<_, ModelError>(g.path_by_names(Some(&c.start), &names)?)
    };
    let equations = rs
        .path_equations
        .iter()
        .map(|(l, r)| Ok(PathEquation::new(chain(l, &g)?, chain(r, &g)?)))
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(build_category(g, equations, bounds)?)
}

/// An instance built from rows, with the full rows kept beside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationalInstance {
    pub schema: RelationalSchema,
    pub instance: InstanceFunctor,
    /// Full row per key element, per table.
    pub rows: BTreeMap<String, BTreeMap<Elem, Vec<String>>>,
}

impl RelationalInstance {
    /// Key elements of `table` whose `column` holds `value`.
    pub fn select(&self, table: &str, column: &str, value: &str) -> Result<Vec<Elem>, ModelError> {
        let t = self.schema.require_table(table)?;
        let i = t
            .column_index(column)
            .ok_or_else(|| ModelError::UnknownColumn {
                table: table.to_string(),
                column: column.to_string(),
            })?;
        Ok(self.rows[table]
            .iter()
            .filter(|(_, row)| row[i] == value)
            .map(|(k, _)| k.clone())
            .collect())
    }
}

pub fn relational_instance(
    rs: &RelationalSchema,
    rows: &Rows,
    bounds: Bounds,
) -> Result<RelationalInstance, ModelError> {
    let cat = Arc::new(relational_to_category(rs, bounds)?);
    for name in rows.keys() {
        rs.require_table(name)?;
    }
    let mut keyed: BTreeMap<String, BTreeMap<Elem, Vec<String>>> = BTreeMap::new();
    for t in &rs.tables {
        let mut by_key = BTreeMap::new();
        for (i, row) in rows.get(&t.name).map(Vec::as_slice).unwrap_or(&[]).iter().enumerate() {
            if row.len() != t.columns.len() {
                return Err(ModelError::ArityMismatch {
                    table: t.name.clone(),
                    row: i,
                    expected: t.columns.len(),
                    found: row.len(),
                });
            }
            let key = t.key_of(row);
            if by_key.insert(key.clone(), row.clone()).is_some() {
                return Err(ModelError::DuplicateKey {
                    table: t.name.clone(),
                    key: key.to_string(),
                });
            }
        }
        keyed.insert(t.name.clone(), by_key);
    }

    let mut instance = InstanceFunctor::empty(cat);
    for t in &rs.tables {
        instance.set_carrier(&t.name, keyed[&t.name].keys().cloned())?;
    }
    for fk in &rs.foreign_keys {
        let t = rs.require_table(&fk.table)?;
        let col = t.column_index(&fk.column).expect("validated");
        let targets = &keyed[&fk.ref_table];
        let mut pairs = Vec::new();
        for (key, row) in &keyed[&fk.table] {
            let value = Elem::Atom(row[col].clone());
            if !targets.contains_key(&value) {
                return Err(ModelError::ReferentialIntegrityViolation {
                    constraint: format!("{} -> {}.{}", fk.name(), fk.ref_table, fk.ref_column),
                    table: fk.table.clone(),
                    row: key.to_string(),
                    value: row[col].clone(),
                });
            }
            pairs.push((key.clone(), value));
        }
        instance.set_action(&fk.name(), pairs)?;
    }
    Ok(RelationalInstance {
        schema: rs.clone(),
        instance,
        rows: keyed,
    })
}

impl RelationalInstance {
    pub fn carrier_of(&self, table: &str) -> Option<&FiniteSet> {
        let ob = self.instance.schema().graph().object(table)?;
        Some(self.instance.carrier(ob))
    }
}
