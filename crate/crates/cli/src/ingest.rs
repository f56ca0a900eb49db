//! Loading CSV directories, JSON documents and edge lists.
//!
//! A CSV directory may contain a `manifest.txt`:
//!
//! ```text
//! table Follower followers.csv   # defaults to every *.csv, named by stem
//! key Follower.ID                # key Table.col1,col2 for a composite key
//! fk Follower.OwnChannel -> Channel.ID
//! equation Moderator.FollowerID;Follower.OwnChannel = Moderator.Chan
//! ```
//!
//! Chains in `equation` lines are `;`-joined foreign keys or `id(Table)`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use catlift_core::models::{
    FkChain, ForeignKey, ModelError, NodePayload, PropertyGraph, RelationalSchema, Rows, Table,
    TreeDoc,
};
use thiserror::Error;

pub const MANIFEST: &str = "manifest.txt";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn format_error(path: &Path, line: usize, message: impl Into<String>) -> IngestError {
    IngestError::Format {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Lines with `#` comments stripped, numbered from 1, blanks skipped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim_end_matches('\r');
        (!l.trim().is_empty()).then_some((i + 1, l))
    })
}

// ---------------------------------------------------------------------------
// CSV

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Manifest {
    tables: Vec<(String, String)>,
    keys: BTreeMap<String, Vec<String>>,
    fks: Vec<ForeignKey>,
    equations: Vec<(FkChain, FkChain)>,
}

fn split_qualified<'a>(path: &Path, line: usize, s: &'a str) -> Result<(&'a str, &'a str), IngestError> {
    s.split_once('.')
        .filter(|(t, c)| !t.is_empty() && !c.is_empty())
        .ok_or_else(|| format_error(path, line, format!("expected `table.column`, found `{s}`")))
}

fn parse_chain(
    path: &Path,
    line: usize,
    s: &str,
    fks: &[ForeignKey],
) -> Result<FkChain, IngestError> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix("id(").and_then(|r| r.strip_suffix(')')) {
        return Ok(FkChain {
            start: inner.trim().to_string(),
            fks: vec![],
        });
    }
    let names: Vec<String> = s.split(';').map(|n| n.trim().to_string()).collect();
    let first = fks
        .iter()
        .find(|fk| fk.name() == names[0])
        .ok_or_else(|| format_error(path, line, format!("unknown foreign key `{}`", names[0])))?;
    Ok(FkChain {
        start: first.table.clone(),
        fks: names,
    })
}

fn parse_manifest(path: &Path, text: &str) -> Result<Manifest, IngestError> {
    let mut m = Manifest::default();
    for (n, l) in content_lines(text) {
        let (head, rest) = l.trim().split_once(char::is_whitespace).unwrap_or((l.trim(), ""));
        let rest = rest.trim();
        match head {
            "table" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                match parts.as_slice() {
                    [name, file] => m.tables.push((name.to_string(), file.to_string())),
                    _ => return Err(format_error(path, n, "expected `table NAME FILE`")),
                }
            }
            "key" => {
                let (t, cols) = split_qualified(path, n, rest)?;
                let cols = cols.split(',').map(|c| c.trim().to_string()).collect();
                if m.keys.insert(t.to_string(), cols).is_some() {
                    return Err(format_error(path, n, format!("second key for `{t}`")));
                }
            }
            "fk" => {
                let (from, to) = rest
                    .split_once("->")
                    .ok_or_else(|| format_error(path, n, "expected `fk T.c -> U.k`"))?;
                let (t, c) = split_qualified(path, n, from.trim())?;
                let (u, k) = split_qualified(path, n, to.trim())?;
                m.fks.push(ForeignKey::new(t, c, u, k));
            }
            "equation" => {
                let (l, r) = rest
                    .split_once('=')
                    .ok_or_else(|| format_error(path, n, "expected `equation CHAIN = CHAIN`"))?;
                let lhs = parse_chain(path, n, l, &m.fks)?;
                let rhs = parse_chain(path, n, r, &m.fks)?;
                m.equations.push((lhs, rhs));
            }
            other => {
                return Err(format_error(
                    path,
                    n,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }
    Ok(m)
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), IngestError> {
    let located = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        format_error(path, line, e.to_string())
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(source) => IngestError::Io {
                path: path.display().to_string(),
                source,
            },
            other => format_error(path, 0, format!("{other:?}")),
        })?;
    let header: Vec<String> = reader
        .headers()
        .map_err(located)?
        .iter()
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record.map_err(located)?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Reads a directory of CSV files and its optional manifest.
pub fn read_csv_dir(dir: &Path) -> Result<(RelationalSchema, Rows), IngestError> {
    let manifest_path = dir.join(MANIFEST);
    let mut manifest = if manifest_path.exists() {
        parse_manifest(&manifest_path, &read(&manifest_path)?)?
    } else {
        Manifest::default()
    };
    if manifest.tables.is_empty() {
        let entries = fs::read_dir(dir).map_err(|source| IngestError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        let mut files: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "csv"))
            .collect();
        files.sort();
        for f in files {
            let stem = f.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let file = f.file_name().unwrap_or_default().to_string_lossy().into_owned();
            manifest.tables.push((stem, file));
        }
    }
    let mut schema = RelationalSchema::default();
    let mut rows = Rows::new();
    for (name, file) in &manifest.tables {
        let (columns, data) = read_csv(&dir.join(file))?;
        let mut table = Table::new(name.clone(), columns);
        if let Some(key) = manifest.keys.get(name) {
            table = table.with_key(key.clone());
        }
        schema.tables.push(table);
        rows.insert(name.clone(), data);
    }
    if let Some(t) = manifest.keys.keys().find(|t| schema.table(t).is_none()) {
        return Err(ModelError::UnknownTable(t.clone()).into());
    }
    schema.foreign_keys = manifest.fks;
    schema.path_equations = manifest.equations;
    Ok((schema, rows))
}

// ---------------------------------------------------------------------------
// JSON

fn escape_pointer(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

fn scalar(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::Null => Some("null".into()),
        serde_json::Value::Bool(b) => Some(b.to_string()),
        serde_json::Value::Number(n) => Some(n.to_string()),
        serde_json::Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// Node ids are JSON pointers under `$`: the root is `$`, member `k` of it is
/// `$/k`, element 0 of an array is `$/0`. Leaves carry their scalar value.
pub fn json_to_tree(value: &serde_json::Value) -> TreeDoc {
    let mut doc = TreeDoc::singleton("$");
    doc.nodes.insert(
        "$".into(),
        NodePayload {
            key: None,
            value: scalar(value),
        },
    );
    let mut stack = vec![("$".to_string(), value)];
    while let Some((id, v)) = stack.pop() {
        let children: Vec<(String, &serde_json::Value)> = match v {
            serde_json::Value::Object(m) => m.iter().map(|(k, c)| (k.clone(), c)).collect(),
            serde_json::Value::Array(a) => {
                a.iter().enumerate().map(|(i, c)| (i.to_string(), c)).collect()
            }
            _ => vec![],
        };
        for (key, child) in children {
            let child_id = format!("{id}/{}", escape_pointer(&key));
            doc.nodes.insert(
                child_id.clone(),
                NodePayload {
                    key: Some(key),
                    value: scalar(child),
                },
            );
            doc.parent.insert(child_id.clone(), id.clone());
            stack.push((child_id, child));
        }
    }
    doc
}

pub fn read_json(path: &Path) -> Result<TreeDoc, IngestError> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| format_error(path, e.line(), format!("column {}: {e}", e.column())))?;
    Ok(json_to_tree(&value))
}

// ---------------------------------------------------------------------------
// Edge lists

fn is_header(src: &str, tgt: &str) -> bool {
    let (s, t) = (src.trim().to_lowercase(), tgt.trim().to_lowercase());
    ["src", "source", "from"].contains(&s.as_str()) && ["tgt", "target", "to"].contains(&t.as_str())
}

/// One `src<TAB>tgt` edge per line, with an optional header line. Edges are
/// named `e1`, `e2`, ... in file order; vertices are every endpoint.
pub fn parse_edge_list(path: &Path, text: &str) -> Result<PropertyGraph, IngestError> {
    let mut g = PropertyGraph::default();
    let mut first = true;
    let mut count = 0;
    for (n, l) in content_lines(text) {
        let fields: Vec<&str> = l.split('\t').collect();
        let [src, tgt] = fields.as_slice() else {
            return Err(format_error(
                path,
                n,
                format!("expected `src<TAB>tgt`, found {} fields", fields.len()),
            ));
        };
        let (src, tgt) = (src.trim(), tgt.trim());
        if std::mem::take(&mut first) && is_header(src, tgt) {
            continue;
        }
        if src.is_empty() || tgt.is_empty() {
            return Err(format_error(path, n, "empty vertex id"));
        }
        count += 1;
        for v in [src, tgt] {
            if !g.vertices.contains_key(v) {
                g.add_vertex(v, "");
            }
        }
        g.add_edge(format!("e{count}"), src, tgt, "");
    }
    Ok(g)
}

pub fn read_edge_list(path: &Path) -> Result<PropertyGraph, IngestError> {
    parse_edge_list(path, &read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use catlift_core::models::{graph_to_functor, tree_to_functor};
    use catlift_core::{Elem, ObId};

    #[test]
    fn one_edge_two_vertices() {
        let g = parse_edge_list(Path::new("x"), "source\ttarget\nv1\tv2\n").unwrap();
        assert_eq!((g.vertices.len(), g.edges.len()), (2, 1));
        let (inst, _) = graph_to_functor(&g).unwrap();
        assert!(inst.validate().is_valid());
    }

    #[test]
    fn edge_list_errors_carry_the_line() {
        let err = parse_edge_list(Path::new("g.tsv"), "# c\na\tb\nab\n").unwrap_err();
        assert_eq!(err.to_string(), "g.tsv:3: expected `src<TAB>tgt`, found 1 fields");
    }

    #[test]
    fn scalar_document_is_a_single_self_parented_node() {
        let doc = json_to_tree(&serde_json::json!(42));
        assert_eq!(doc.nodes.len(), 1);
        assert_eq!(doc.parent["$"], "$");
        assert_eq!(doc.nodes["$"].value.as_deref(), Some("42"));
        assert!(tree_to_functor(&doc).is_ok());
    }

    #[test]
    fn nested_document_uses_pointer_ids() {
        let doc = json_to_tree(&serde_json::json!({"a/b": [1, {"c": null}]}));
        let ids: Vec<&str> = doc.nodes.keys().map(String::as_str).collect();
        assert_eq!(ids, ["$", "$/a~1b", "$/a~1b/0", "$/a~1b/1", "$/a~1b/1/c"]);
        assert_eq!(doc.parent["$/a~1b/1/c"], "$/a~1b/1");
        assert_eq!(doc.nodes["$/a~1b"].key.as_deref(), Some("a/b"));
        let inst = tree_to_functor(&doc).unwrap();
        assert_eq!(inst.carrier(ObId(0)).len(), 5);
        assert!(inst.carrier(ObId(0)).contains(&Elem::atom("$/a~1b/0")));
    }

    #[test]
    fn manifest_directives() {
        let m = parse_manifest(
            Path::new("m"),
            "table k knows.csv\nkey p.personID\nfk k.personID1 -> p.personID # c\n\
             equation k.personID1 = k.personID1\n",
        )
        .unwrap();
        assert_eq!(m.tables, vec![("k".to_string(), "knows.csv".to_string())]);
        assert_eq!(m.keys["p"], vec!["personID".to_string()]);
        assert_eq!(m.fks[0].name(), "k.personID1");
        assert_eq!(m.equations[0].0.start, "k");
        let err = parse_manifest(Path::new("m"), "\nfk a.b c.d\n").unwrap_err();
        assert!(err.to_string().starts_with("m:2:"), "{err}");
    }
}
