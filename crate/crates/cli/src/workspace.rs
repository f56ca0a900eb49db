use std::collections::BTreeMap;
use std::path::Path as FsPath;
use std::sync::Arc;

use catlift_core::models::{NodePayload, RelationalInstance, SideTables};
use catlift_core::transform::Transformation;
use catlift_core::{Bounds, FunctorDef, InstanceFunctor, PresentedCategory};

use crate::dsl::{self, DslError};

#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub schema: String,
    /// Not validated on load; commands validate what they use.
    pub instance: InstanceFunctor,
}

#[derive(Clone, Debug)]
pub struct NamedFunctor {
    pub source: String,
    pub target: String,
    pub functor: FunctorDef,
}

#[derive(Clone, Debug)]
pub struct NamedTransform {
    pub functor: String,
    pub source: String,
    pub target: String,
    pub transformation: Transformation,
}

/// Named schemas, instances, functors and transformations. Names are unique
/// per kind.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    bounds: Bounds,
    pub schemas: BTreeMap<String, Arc<PresentedCategory>>,
    pub instances: BTreeMap<String, NamedInstance>,
    pub functors: BTreeMap<String, NamedFunctor>,
    pub transforms: BTreeMap<String, NamedTransform>,
    /// Full rows of instances ingested from CSV, by instance name.
    pub relational: BTreeMap<String, RelationalInstance>,
    /// Labels and properties of instances ingested from edge lists.
    pub graphs: BTreeMap<String, SideTables>,
    /// Keys and scalar values of instances ingested from JSON.
    pub trees: BTreeMap<String, BTreeMap<String, NodePayload>>,
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Dsl { path: String, source: DslError },
}

impl Workspace {
    pub fn new(bounds: Bounds) -> Self {
        Workspace {
            bounds,
            ..Workspace::default()
        }
    }

    /// Bounds given to every schema parsed or ingested into this workspace.
    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn load_str(&mut self, text: &str) -> Result<(), DslError> {
        dsl::parse_into(text, self)
    }

    pub fn load_file(&mut self, path: &FsPath) -> Result<(), LoadError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: shown.clone(),
            source,
        })?;
        self.load_str(&text)
            .map_err(|source| LoadError::Dsl { path: shown, source })
    }

    pub fn to_text(&self) -> String {
        dsl::workspace_text(self)
    }

    /// Name under which `cat` is registered, if any.
    pub fn schema_name_of(&self, cat: &Arc<PresentedCategory>) -> Option<&str> {
        self.schemas
            .iter()
            .find(|(_, c)| Arc::ptr_eq(c, cat) || ***c == **cat)
            .map(|(n, _)| n.as_str())
    }
}
