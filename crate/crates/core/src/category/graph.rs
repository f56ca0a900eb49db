use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use super::CatError;

/// Index of an object in a [`SchemaGraph`], in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObId(pub usize);

/// Index of a generating edge in a [`SchemaGraph`], in declaration order.
///
/// Declaration order is the fixed total order on edges used for canonical
/// representatives and for every enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeDecl {
    pub name: String,
    pub src: ObId,
    pub tgt: ObId,
}

/// Vertices and generating edges of a schema.
#[derive(Clone, Debug, Default)]
pub struct SchemaGraph {
    objects: Vec<String>,
    edges: Vec<EdgeDecl>,
    object_index: HashMap<String, ObId>,
    edge_index: HashMap<String, EdgeId>,
    outgoing: Vec<Vec<EdgeId>>,
}

impl PartialEq for SchemaGraph {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects && self.edges == other.edges
    }
}

impl Eq for SchemaGraph {}

impl SchemaGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_object(&mut self, name: impl Into<String>) -> Result<ObId, CatError> {
        let name = name.into();
        if self.object_index.contains_key(&name) {
            return Err(CatError::DuplicateObject(name));
        }
        let id = ObId(self.objects.len());
        self.object_index.insert(name.clone(), id);
        self.objects.push(name);
        self.outgoing.push(Vec::new());
        Ok(id)
    }

    pub fn add_edge(
        &mut self,
        name: impl Into<String>,
        src: &str,
        tgt: &str,
    ) -> Result<EdgeId, CatError> {
        let name = name.into();
        if self.edge_index.contains_key(&name) {
            return Err(CatError::DuplicateEdge(name));
        }
        let src = self.require_object(src)?;
        let tgt = self.require_object(tgt)?;
        let id = EdgeId(self.edges.len());
        self.edge_index.insert(name.clone(), id);
        self.edges.push(EdgeDecl { name, src, tgt });
        self.outgoing[src.0].push(id);
        Ok(id)
    }

    pub fn object(&self, name: &str) -> Option<ObId> {
        self.object_index.get(name).copied()
    }

    pub fn edge(&self, name: &str) -> Option<EdgeId> {
        self.edge_index.get(name).copied()
    }

    pub fn require_object(&self, name: &str) -> Result<ObId, CatError> {
        self.object(name)
            .ok_or_else(|| CatError::UnknownObject(name.to_string()))
    }

    pub fn require_edge(&self, name: &str) -> Result<EdgeId, CatError> {
        self.edge(name)
            .ok_or_else(|| CatError::UnknownEdge(name.to_string()))
    }

    pub fn object_name(&self, ob: ObId) -> &str {
        &self.objects[ob.0]
    }

    pub fn edge_decl(&self, e: EdgeId) -> &EdgeDecl {
        &self.edges[e.0]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.0].name
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObId> + '_ {
        (0..self.objects.len()).map(ObId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn outgoing(&self, ob: ObId) -> &[EdgeId] {
        &self.outgoing[ob.0]
    }

    pub fn contains_object(&self, ob: ObId) -> bool {
        ob.0 < self.objects.len()
    }

    /// Builds a path, checking that consecutive edges connect.
    pub fn path(&self, start: ObId, edges: Vec<EdgeId>) -> Result<Path, CatError> {
        if !self.contains_object(start) {
            return Err(CatError::InvalidPath(format!("object #{} out of range", start.0)));
        }
        let mut end = start;
        for &e in &edges {
            if e.0 >= self.edges.len() {
                return Err(CatError::InvalidPath(format!("edge #{} out of range", e.0)));
            }
            let decl = &self.edges[e.0];
            if decl.src != end {
                return Err(CatError::InvalidPath(format!(
                    "edge {} starts at {}, but the path is at {}",
                    decl.name,
                    self.object_name(decl.src),
                    self.object_name(end)
                )));
            }
            end = decl.tgt;
        }
        Ok(Path { start, end, edges })
    }

    /// Builds a path from edge names. An empty list needs `start`.
    pub fn path_by_names(&self, start: Option<&str>, names: &[&str]) -> Result<Path, CatError> {
        let edges = names
            .iter()
            .map(|n| self.require_edge(n))
            .collect::<Result<Vec<_>, _>>()?;
        let start = match (start, edges.first()) {
            (Some(s), _) => self.require_object(s)?,
            (None, Some(&e)) => self.edges[e.0].src,
            (None, None) => {
                return Err(CatError::InvalidPath(
                    "an empty path needs a start object".into(),
                ))
            }
        };
        self.path(start, edges)
    }

    /// Re-validates a path that may have been built against another graph.
    pub fn check_path(&self, p: &Path) -> Result<(), CatError> {
        let rebuilt = self.path(p.start, p.edges.clone())?;
        if rebuilt.end != p.end {
            return Err(CatError::InvalidPath("recorded end object is wrong".into()));
        }
        Ok(())
    }

    /// `reach[c][d]` is true when some path runs from `c` to `d`.
    pub(crate) fn reachability(&self) -> Vec<Vec<bool>> {
        let n = self.objects.len();
        let mut reach = vec![vec![false; n]; n];
        for (c, row) in reach.iter_mut().enumerate() {
            let mut stack = vec![ObId(c)];
            row[c] = true;
            while let Some(x) = stack.pop() {
                for &e in &self.outgoing[x.0] {
                    let y = self.edges[e.0].tgt;
                    if !row[y.0] {
                        row[y.0] = true;
                        stack.push(y);
                    }
                }
            }
        }
        reach
    }

    pub fn display_path<'a>(&'a self, p: &'a Path) -> PathDisplay<'a> {
        PathDisplay { graph: self, path: p }
    }
}

/// A sequence of connected edges; the empty sequence is the identity at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    start: ObId,
    end: ObId,
    edges: Vec<EdgeId>,
}

impl Path {
    pub fn identity(ob: ObId) -> Self {
        Path {
            start: ob,
            end: ob,
            edges: Vec::new(),
        }
    }

    pub(crate) fn from_parts(start: ObId, end: ObId, edges: Vec<EdgeId>) -> Self {
        Path { start, end, edges }
    }

    pub fn start(&self) -> ObId {
        self.start
    }

    pub fn end(&self) -> ObId {
        self.end
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_identity(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Path) -> Result<Path, CatError> {
        if self.end != next.start {
            return Err(CatError::InvalidPath(format!(
                "cannot append a path starting at #{} to one ending at #{}",
                next.start.0, self.end.0
            )));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&next.edges);
        Ok(Path {
            start: self.start,
            end: next.end,
            edges,
        })
    }
}

/// Shortlex order: shorter paths first, then lexicographic on edge order.
pub(crate) fn shortlex(a: &[EdgeId], b: &[EdgeId]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex(&self.edges, &other.edges)
            .then_with(|| self.start.cmp(&other.start))
            .then_with(|| self.end.cmp(&other.end))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct PathDisplay<'a> {
    graph: &'a SchemaGraph,
    path: &'a Path,
}

impl fmt::Display for PathDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.edges.is_empty() {
            return write!(f, "id({})", self.graph.object_name(self.path.start));
        }
        for (i, e) in self.path.edges.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(self.graph.edge_name(*e))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph_schema() -> SchemaGraph {
        let mut g = SchemaGraph::new();
        g.add_object("0").unwrap();
        g.add_object("1").unwrap();
        g.add_edge("s", "0", "1").unwrap();
        g.add_edge("t", "0", "1").unwrap();
        g
    }

    #[test]
    fn duplicate_and_dangling_declarations_are_rejected() {
        let mut g = graph_schema();
        assert!(matches!(g.add_object("0"), Err(CatError::DuplicateObject(_))));
        assert!(matches!(g.add_edge("s", "0", "1"), Err(CatError::DuplicateEdge(_))));
        assert!(matches!(g.add_edge("u", "0", "2"), Err(CatError::UnknownObject(_))));
    }

    #[test]
    fn disconnected_paths_are_rejected() {
        let g = graph_schema();
        let s = g.edge("s").unwrap();
        let t = g.edge("t").unwrap();
        assert!(g.path(ObId(0), vec![s, t]).is_err());
        assert!(g.path(ObId(1), vec![s]).is_err());
        let p = g.path(ObId(0), vec![s]).unwrap();
        assert_eq!(p.end(), ObId(1));
        assert_eq!(g.display_path(&p).to_string(), "s");
        assert_eq!(g.display_path(&Path::identity(ObId(1))).to_string(), "id(1)");
    }

    #[test]
    fn shortlex_orders_by_length_first() {
        let (a, b) = (EdgeId(0), EdgeId(1));
        assert_eq!(shortlex(&[b], &[a, a]), Ordering::Less);
        assert_eq!(shortlex(&[a, b], &[b, a]), Ordering::Less);
        assert_eq!(shortlex(&[], &[a]), Ordering::Less);
    }
}
