//! Text format for schemas, instances, functors and transformations.
//!
//! ```text
//! schema kp {
//!   object k
//!   object p
//!   arrow src : k -> p
//!   equation src = src
//! }
//! instance I : kp {
//!   set k { e1 }
//!   set p { (a, b) }
//!   map src { e1 -> (a, b) }
//! }
//! functor F : kp -> kp {
//!   object k -> k
//!   object p -> p
//!   arrow src -> src
//! }
//! transform T {
//!   functor F
//!   source I
//!   target I
//!   component k { e1 -> e1 }
//! }
//! ```
//!
//! Paths are `;`-joined arrow names or `id(X)`. `#` starts a comment. Any
//! word can be written as a double-quoted string.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::sync::Arc;

use catlift_core::category::CatError;
use catlift_core::instance::{InstanceError, InstanceReport};
use catlift_core::transform::{TransformError, Transformation};
use catlift_core::{
    build_category, Bounds, Elem, FiniteSet, FunctorDef, InstanceFunctor, Path, PathEquation,
    PresentedCategory, SchemaGraph,
};
use thiserror::Error;

use crate::workspace::{NamedFunctor, NamedInstance, NamedTransform, Workspace};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct DslError {
    pub line: usize,
    pub col: usize,
    pub kind: DslErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DslErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown {kind} `{name}`")]
    DanglingReference { kind: &'static str, name: String },
    #[error("{kind} `{name}` declared twice")]
    Duplicate { kind: &'static str, name: String },
    #[error("equation `{lhs} = {rhs}` relates paths with different endpoints")]
    NonParallelEquation { lhs: String, rhs: String },
    #[error("instance `{name}` is invalid: {}", first_violation(report))]
    InvalidInstance { name: String, report: InstanceReport },
    #[error(transparent)]
    Category(#[from] CatError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Transform(#[from] TransformError),
}

fn first_violation(report: &InstanceReport) -> String {
    match report.violations.first() {
        Some(v) if report.violations.len() > 1 => {
            format!("{v} (and {} more)", report.violations.len() - 1)
        }
        Some(v) => v.to_string(),
        None => "no violations".into(),
    }
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Arrow,
    Colon,
    Semi,
    Equals,
    LBrace,
    RBrace,
    Comma,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    quoted: bool,
    line: usize,
    col: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || "_.$/~@%+*!?^&'".contains(c)
}

fn lex(text: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| DslError {
        line,
        col,
        kind: DslErrorKind::Syntax(msg),
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok, quoted| {
            out.push(Token {
                tok,
                quoted,
                line: tl,
                col: tc,
            })
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            push(&mut out, Tok::Arrow, false);
            i += 2;
            col += 2;
            continue;
        }
        let single = match c {
            ':' => Some(Tok::Colon),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Equals),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            push(&mut out, tok, false);
            i += 1;
            col += 1;
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            i += 1;
            col += 1;
            loop {
                match chars.get(i) {
                    None => return Err(err(tl, tc, "unterminated string".into())),
                    Some('"') => {
                        i += 1;
                        col += 1;
                        break;
                    }
                    Some('\\') => {
                        let esc = match chars.get(i + 1) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            Some('t') => '\t',
                            other => {
                                return Err(err(
                                    line,
                                    col,
                                    format!("bad escape `\\{}`", other.copied().unwrap_or(' ')),
                                ))
                            }
                        };
                        s.push(esc);
                        i += 2;
                        col += 2;
                    }
                    Some('\n') => {
                        s.push('\n');
                        i += 1;
                        line += 1;
                        col = 1;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                        col += 1;
                    }
                }
            }
            push(&mut out, Tok::Word(s), true);
            continue;
        }
        if is_word_char(c) || c == '-' {
            let mut s = String::new();
            while let Some(&ch) = chars.get(i) {
                let dash = ch == '-' && chars.get(i + 1) != Some(&'>');
                if !(is_word_char(ch) || dash) {
                    break;
                }
                s.push(ch);
                i += 1;
                col += 1;
            }
            push(&mut out, Tok::Word(s), false);
            continue;
        }
        return Err(err(line, col, format!("unexpected character `{c}`")));
    }
    Ok(out)
}

/// Writes `s` bare when it lexes back as the same single word, quoted
/// otherwise.
pub fn word(s: &str) -> String {
    let bare = !s.is_empty()
        && s.chars().all(|c| is_word_char(c) || c == '-')
        && !s.ends_with('-')
        && !s.contains("->");
    if bare {
        return s.to_string();
    }
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Position reported for errors at end of input.
    end: (usize, usize),
}

enum PathSyntax {
    Identity(String),
    Arrows(Vec<String>),
}

impl Parser {
    fn new(text: &str) -> Result<Self, DslError> {
        let toks = lex(text)?;
        let lines = text.split('\n').count();
        let last_col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Ok(Parser {
            toks,
            pos: 0,
            end: (lines.max(1), last_col),
        })
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.col))
    }

    fn error_at(&self, at: (usize, usize), kind: DslErrorKind) -> DslError {
        DslError {
            line: at.0,
            col: at.1,
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> DslError {
        self.error_at(self.here(), DslErrorKind::Syntax(msg.into()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".to_string(), |t| t.to_string())
    }

    fn expect(&mut self, tok: Tok) -> Result<(), DslError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected {tok}, found {}", self.found())))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, (usize, usize)), DslError> {
        let at = self.here();
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok((w, at))
            }
            _ => Err(self.syntax(format!("expected {what}, found {}", self.found()))),
        }
    }

    /// An unquoted keyword at the current position.
    fn keyword(&self) -> Option<&str> {
        match self.toks.get(self.pos) {
            Some(Token {
                tok: Tok::Word(w),
                quoted: false,
                ..
            }) => Some(w),
            _ => None,
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.keyword() == Some(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn path_syntax(&mut self) -> Result<PathSyntax, DslError> {
        if self.keyword() == Some("id")
            && self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::LParen)
        {
            self.pos += 2;
            let (ob, _) = self.word("an object name")?;
            self.expect(Tok::RParen)?;
            return Ok(PathSyntax::Identity(ob));
        }
        let mut arrows = vec![self.word("an arrow name or `id(...)`")?.0];
        while self.eat(&Tok::Semi) {
            arrows.push(self.word("an arrow name")?.0);
        }
        Ok(PathSyntax::Arrows(arrows))
    }

    fn path(&mut self, graph: &SchemaGraph) -> Result<Path, DslError> {
        let at = self.here();
        let syntax = self.path_syntax()?;
        resolve_path(graph, &syntax).map_err(|kind| self.error_at(at, kind))
    }

    fn elem(&mut self) -> Result<Elem, DslError> {
        if self.eat(&Tok::LParen) {
            let mut parts = Vec::new();
            if !self.eat(&Tok::RParen) {
                loop {
                    parts.push(self.word("a tuple component")?.0);
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
            }
            return Ok(Elem::Tuple(parts));
        }
        Ok(Elem::Atom(self.word("an element")?.0))
    }

    /// `{ item, item, ... }` with an optional trailing comma.
    fn braced_list<T>(
        &mut self,
        mut item: impl FnMut(&mut Self) -> Result<T, DslError>,
    ) -> Result<Vec<T>, DslError> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        loop {
            if self.eat(&Tok::RBrace) {
                return Ok(out);
            }
            out.push(item(self)?);
            if !self.eat(&Tok::Comma) {
                self.expect(Tok::RBrace)?;
                return Ok(out);
            }
        }
    }

    /// `{ x -> y, ... }`; a repeated key is an error.
    fn mapping(&mut self, what: &str) -> Result<BTreeMap<Elem, Elem>, DslError> {
        let mut map = BTreeMap::new();
        let what = what.to_string();
        self.braced_list(|p| {
            let at = p.here();
            let x = p.elem()?;
            p.expect(Tok::Arrow)?;
            let y = p.elem()?;
            if map.insert(x.clone(), y).is_some() {
                return Err(p.error_at(
                    at,
                    DslErrorKind::Syntax(format!("`{x}` mapped twice in {what}")),
                ));
            }
            Ok(())
        })?;
        Ok(map)
    }

    // -- blocks -------------------------------------------------------------

    /// Statements up to `}` or end of input.
    fn schema_body(&mut self, bounds: Bounds) -> Result<PresentedCategory, DslError> {
        let mut graph = SchemaGraph::new();
        let mut equations = Vec::new();
        while !self.at_end() && self.peek() != Some(&Tok::RBrace) {
            if self.eat_keyword("object") {
                let (name, at) = self.word("an object name")?;
                if graph.object(&name).is_some() {
                    return Err(self.error_at(at, dup("object", &name)));
                }
                graph.add_object(name).map_err(|e| self.error_at(at, e.into()))?;
            } else if self.eat_keyword("arrow") {
                let (name, at) = self.word("an arrow name")?;
                if graph.edge(&name).is_some() {
                    return Err(self.error_at(at, dup("arrow", &name)));
                }
                self.expect(Tok::Colon)?;
                let (src, src_at) = self.word("a source object")?;
                self.expect(Tok::Arrow)?;
                let (tgt, tgt_at) = self.word("a target object")?;
                for (ob, ob_at) in [(&src, src_at), (&tgt, tgt_at)] {
                    if graph.object(ob).is_none() {
                        return Err(self.error_at(ob_at, dangling("object", ob)));
                    }
                }
                graph
                    .add_edge(name, &src, &tgt)
                    .map_err(|e| self.error_at(at, e.into()))?;
            } else if self.eat_keyword("equation") {
                let at = self.here();
                let lhs = self.path(&graph)?;
                self.expect(Tok::Equals)?;
                let rhs = self.path(&graph)?;
                if lhs.start() != rhs.start() || lhs.end() != rhs.end() {
                    return Err(self.error_at(
                        at,
                        DslErrorKind::NonParallelEquation {
                            lhs: graph.display_path(&lhs).to_string(),
                            rhs: graph.display_path(&rhs).to_string(),
                        },
                    ));
                }
                equations.push(PathEquation::new(lhs, rhs));
            } else {
                return Err(self.syntax(format!(
                    "expected `object`, `arrow` or `equation`, found {}",
                    self.found()
                )));
            }
        }
        let at = self.here();
        build_category(graph, equations, bounds).map_err(|e| self.error_at(at, e.into()))
    }

    /// Statements up to `}` or end of input. The result is not validated.
    fn instance_body(
        &mut self,
        schema: &Arc<PresentedCategory>,
    ) -> Result<InstanceFunctor, DslError> {
        let graph = schema.graph();
        let mut carriers: Vec<Option<FiniteSet>> = vec![None; graph.object_count()];
        let mut actions: Vec<Option<BTreeMap<Elem, Elem>>> = vec![None; graph.edge_count()];
        while !self.at_end() && self.peek() != Some(&Tok::RBrace) {
            if self.eat_keyword("set") {
                let (name, at) = self.word("an object name")?;
                let ob = graph
                    .object(&name)
                    .ok_or_else(|| self.error_at(at, dangling("object", &name)))?;
                if carriers[ob.0].is_some() {
                    return Err(self.error_at(at, dup("set", &name)));
                }
                let elems = self.braced_list(Self::elem)?;
                carriers[ob.0] = Some(elems.into_iter().collect());
            } else if self.eat_keyword("map") {
                let (name, at) = self.word("an arrow name")?;
                let e = graph
                    .edge(&name)
                    .ok_or_else(|| self.error_at(at, dangling("arrow", &name)))?;
                if actions[e.0].is_some() {
                    return Err(self.error_at(at, dup("map", &name)));
                }
                actions[e.0] = Some(self.mapping(&format!("map `{name}`"))?);
            } else {
                return Err(self.syntax(format!(
                    "expected `set` or `map`, found {}",
                    self.found()
                )));
            }
        }
        let at = self.here();
        InstanceFunctor::new(
            schema.clone(),
            carriers.into_iter().map(Option::unwrap_or_default).collect(),
            actions.into_iter().map(Option::unwrap_or_default).collect(),
        )
        .map_err(|e| self.error_at(at, e.into()))
    }

    fn functor_body(
        &mut self,
        source: &Arc<PresentedCategory>,
        target: &Arc<PresentedCategory>,
    ) -> Result<FunctorDef, DslError> {
        let (sg, tg) = (source.graph(), target.graph());
        let mut objects = vec![None; sg.object_count()];
        let mut arrows: Vec<Option<Path>> = vec![None; sg.edge_count()];
        while !self.at_end() && self.peek() != Some(&Tok::RBrace) {
            if self.eat_keyword("object") {
                let (name, at) = self.word("a source object")?;
                let ob = sg
                    .object(&name)
                    .ok_or_else(|| self.error_at(at, dangling("object", &name)))?;
                self.expect(Tok::Arrow)?;
                let (image, image_at) = self.word("a target object")?;
                let image = tg
                    .object(&image)
                    .ok_or_else(|| self.error_at(image_at, dangling("object", &image)))?;
                if objects[ob.0].replace(image).is_some() {
                    return Err(self.error_at(at, dup("object image for", &name)));
                }
            } else if self.eat_keyword("arrow") {
                let (name, at) = self.word("a source arrow")?;
                let e = sg
                    .edge(&name)
                    .ok_or_else(|| self.error_at(at, dangling("arrow", &name)))?;
                self.expect(Tok::Arrow)?;
                let image = self.path(tg)?;
                if arrows[e.0].replace(image).is_some() {
                    return Err(self.error_at(at, dup("arrow image for", &name)));
                }
            } else {
                return Err(self.syntax(format!(
                    "expected `object` or `arrow`, found {}",
                    self.found()
                )));
            }
        }
        let at = self.here();
        let object_map = objects
            .into_iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| missing("object", sg.object_name(catlift_core::ObId(i)))))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|k| self.error_at(at, k))?;
        let generator_map = arrows
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| missing("arrow", sg.edge_name(catlift_core::EdgeId(i)))))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|k| self.error_at(at, k))?;
        FunctorDef::new(source.clone(), target.clone(), object_map, generator_map)
            .map_err(|e| self.error_at(at, e.into()))
    }

    // -- workspace ----------------------------------------------------------

    fn workspace_item(&mut self, ws: &mut Workspace) -> Result<(), DslError> {
        let bounds = ws.bounds();
        if self.eat_keyword("schema") {
            let (name, at) = self.word("a schema name")?;
            if ws.schemas.contains_key(&name) {
                return Err(self.error_at(at, dup("schema", &name)));
            }
            self.expect(Tok::LBrace)?;
            let cat = self.schema_body(bounds)?;
            self.expect(Tok::RBrace)?;
            ws.schemas.insert(name, Arc::new(cat));
        } else if self.eat_keyword("instance") {
            let (name, at) = self.word("an instance name")?;
            if ws.instances.contains_key(&name) {
                return Err(self.error_at(at, dup("instance", &name)));
            }
            self.expect(Tok::Colon)?;
            let (schema, schema_at) = self.word("a schema name")?;
            let cat = ws
                .schemas
                .get(&schema)
                .cloned()
                .ok_or_else(|| self.error_at(schema_at, dangling("schema", &schema)))?;
            self.expect(Tok::LBrace)?;
            let instance = self.instance_body(&cat)?;
            self.expect(Tok::RBrace)?;
            ws.instances.insert(name, NamedInstance { schema, instance });
        } else if self.eat_keyword("functor") {
            let (name, at) = self.word("a functor name")?;
            if ws.functors.contains_key(&name) {
                return Err(self.error_at(at, dup("functor", &name)));
            }
            self.expect(Tok::Colon)?;
            let (source, source_at) = self.word("a schema name")?;
            self.expect(Tok::Arrow)?;
            let (target, target_at) = self.word("a schema name")?;
            let s = ws
                .schemas
                .get(&source)
                .cloned()
                .ok_or_else(|| self.error_at(source_at, dangling("schema", &source)))?;
            let t = ws
                .schemas
                .get(&target)
                .cloned()
                .ok_or_else(|| self.error_at(target_at, dangling("schema", &target)))?;
            self.expect(Tok::LBrace)?;
            let functor = self.functor_body(&s, &t)?;
            self.expect(Tok::RBrace)?;
            ws.functors.insert(
                name,
                NamedFunctor {
                    source,
                    target,
                    functor,
                },
            );
        } else if self.eat_keyword("transform") {
            let (name, at) = self.word("a transformation name")?;
            if ws.transforms.contains_key(&name) {
                return Err(self.error_at(at, dup("transform", &name)));
            }
            self.expect(Tok::LBrace)?;
            let t = self.transform_body(ws)?;
            self.expect(Tok::RBrace)?;
            ws.transforms.insert(name, t);
        } else {
            return Err(self.syntax(format!(
                "expected `schema`, `instance`, `functor` or `transform`, found {}",
                self.found()
            )));
        }
        Ok(())
    }

    fn transform_body(&mut self, ws: &Workspace) -> Result<NamedTransform, DslError> {
        let start = self.here();
        let mut functor: Option<String> = None;
        let mut source: Option<String> = None;
        let mut target: Option<String> = None;
        let mut forward = false;
        let mut components: Vec<(String, (usize, usize), BTreeMap<Elem, Elem>)> = Vec::new();
        while !self.at_end() && self.peek() != Some(&Tok::RBrace) {
            let slot = if self.eat_keyword("functor") {
                Some((&mut functor, "functor", ws.functors.contains_key(self.peek_word())))
            } else if self.eat_keyword("source") {
                Some((&mut source, "instance", ws.instances.contains_key(self.peek_word())))
            } else if self.eat_keyword("target") {
                Some((&mut target, "instance", ws.instances.contains_key(self.peek_word())))
            } else {
                None
            };
            if let Some((slot, kind, known)) = slot {
                let (name, at) = self.word("a name")?;
                if !known {
                    return Err(self.error_at(at, dangling(kind, &name)));
                }
                if slot.replace(name.clone()).is_some() {
                    return Err(self.error_at(at, DslErrorKind::Syntax("repeated field".into())));
                }
            } else if self.eat_keyword("forward") {
                forward = true;
            } else if self.eat_keyword("component") {
                let (ob, at) = self.word("an object name")?;
                let map = self.mapping(&format!("component `{ob}`"))?;
                components.push((ob, at, map));
            } else {
                return Err(self.syntax(format!(
                    "expected `functor`, `source`, `target`, `forward` or `component`, found {}",
                    self.found()
                )));
            }
        }
        let need = |v: Option<String>, what: &str| {
            v.ok_or_else(|| {
                self.error_at(start, DslErrorKind::Syntax(format!("transform needs `{what}`")))
            })
        };
        let (functor, source, target) = (
            need(functor, "functor")?,
            need(source, "source")?,
            need(target, "target")?,
        );
        let f = &ws.functors[&functor];
        let (i1, i2) = (&ws.instances[&source], &ws.instances[&target]);
        let src_cat = f.functor.source();
        let mut maps = vec![None; src_cat.object_count()];
        for (ob, at, map) in components {
            let id = src_cat
                .graph()
                .object(&ob)
                .ok_or_else(|| self.error_at(at, dangling("object", &ob)))?;
            if maps[id.0].replace(map).is_some() {
                return Err(self.error_at(at, dup("component", &ob)));
            }
        }
        let maps: Vec<BTreeMap<Elem, Elem>> =
            maps.into_iter().map(Option::unwrap_or_default).collect();
        let built = if forward {
            Transformation::from_forward_components(
                f.functor.clone(),
                i1.instance.clone(),
                i2.instance.clone(),
                maps,
            )
        } else {
            Transformation::new(f.functor.clone(), i1.instance.clone(), i2.instance.clone(), maps)
        };
        let transformation = built.map_err(|e| self.error_at(start, e.into()))?;
        Ok(NamedTransform {
            functor,
            source,
            target,
            transformation,
        })
    }

    fn peek_word(&self) -> &str {
        match self.peek() {
            Some(Tok::Word(w)) => w,
            _ => "",
        }
    }
}

fn dup(kind: &'static str, name: &str) -> DslErrorKind {
    DslErrorKind::Duplicate {
        kind,
        name: name.to_string(),
    }
}

fn dangling(kind: &'static str, name: &str) -> DslErrorKind {
    DslErrorKind::DanglingReference {
        kind,
        name: name.to_string(),
    }
}

fn missing(kind: &str, name: &str) -> DslErrorKind {
    DslErrorKind::Syntax(format!("no image given for {kind} `{name}`"))
}

fn resolve_path(graph: &SchemaGraph, p: &PathSyntax) -> Result<Path, DslErrorKind> {
    match p {
        PathSyntax::Identity(ob) => graph
            .object(ob)
            .map(Path::identity)
            .ok_or_else(|| dangling("object", ob)),
        PathSyntax::Arrows(names) => {
            let mut edges = Vec::with_capacity(names.len());
            for n in names {
                edges.push(graph.edge(n).ok_or_else(|| dangling("arrow", n))?);
            }
            let start = graph.edge_decl(edges[0]).src;
            graph.path(start, edges).map_err(DslErrorKind::Category)
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points

/// Parses a bare schema body (no `schema NAME { }` wrapper).
pub fn parse_schema(text: &str, bounds: Bounds) -> Result<PresentedCategory, DslError> {
    let mut p = Parser::new(text)?;
    let cat = p.schema_body(bounds)?;
    if !p.at_end() {
        return Err(p.syntax(format!("unexpected {}", p.found())));
    }
    Ok(cat)
}

/// Parses a bare instance body against `schema` and validates it.
pub fn parse_instance(
    text: &str,
    schema: &Arc<PresentedCategory>,
) -> Result<InstanceFunctor, DslError> {
    let inst = parse_instance_unchecked(text, schema)?;
    let report = inst.validate();
    if report.is_valid() {
        Ok(inst)
    } else {
        Err(DslError {
            line: 1,
            col: 1,
            kind: DslErrorKind::InvalidInstance {
                name: "<input>".into(),
                report,
            },
        })
    }
}

/// Like [`parse_instance`] without validation.
pub fn parse_instance_unchecked(
    text: &str,
    schema: &Arc<PresentedCategory>,
) -> Result<InstanceFunctor, DslError> {
    let mut p = Parser::new(text)?;
    let inst = p.instance_body(schema)?;
    if !p.at_end() {
        return Err(p.syntax(format!("unexpected {}", p.found())));
    }
    Ok(inst)
}

/// A single path over `cat`, written as in equations.
pub fn parse_path(text: &str, cat: &PresentedCategory) -> Result<Path, DslError> {
    let mut p = Parser::new(text)?;
    let path = p.path(cat.graph())?;
    if !p.at_end() {
        return Err(p.syntax(format!("unexpected {}", p.found())));
    }
    Ok(path)
}

/// A single element: a word or a parenthesised tuple.
pub fn parse_elem(text: &str) -> Result<Elem, DslError> {
    let mut p = Parser::new(text)?;
    let e = p.elem()?;
    if !p.at_end() {
        return Err(p.syntax(format!("unexpected {}", p.found())));
    }
    Ok(e)
}

/// Adds every block of `text` to `ws`. Names resolve against earlier blocks
/// and earlier files.
pub fn parse_into(text: &str, ws: &mut Workspace) -> Result<(), DslError> {
    let mut p = Parser::new(text)?;
    while !p.at_end() {
        p.workspace_item(ws)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Serialization

pub fn elem(e: &Elem) -> String {
    match e {
        Elem::Atom(a) => word(a),
        Elem::Tuple(parts) => {
            let parts: Vec<String> = parts.iter().map(|p| word(p)).collect();
            format!("({})", parts.join(", "))
        }
    }
}

pub fn path_text(cat: &PresentedCategory, p: &Path) -> String {
    let g = cat.graph();
    if p.is_identity() {
        return format!("id({})", word(g.object_name(p.start())));
    }
    let names: Vec<String> = p.edges().iter().map(|&e| word(g.edge_name(e))).collect();
    names.join(";")
}

fn write_map(out: &mut String, indent: &str, head: &str, pairs: &BTreeMap<Elem, Elem>) {
    let body: Vec<String> = pairs
        .iter()
        .map(|(x, y)| format!("{} -> {}", elem(x), elem(y)))
        .collect();
    let _ = writeln!(out, "{indent}{head} {{ {} }}", body.join(", "));
}

/// Schema statements, one per line, each prefixed by `indent`.
pub fn schema_body_text(cat: &PresentedCategory, indent: &str) -> String {
    let g = cat.graph();
    let mut out = String::new();
    for ob in g.objects() {
        let _ = writeln!(out, "{indent}object {}", word(g.object_name(ob)));
    }
    for e in g.edges() {
        let d = g.edge_decl(e);
        let _ = writeln!(
            out,
            "{indent}arrow {} : {} -> {}",
            word(&d.name),
            word(g.object_name(d.src)),
            word(g.object_name(d.tgt))
        );
    }
    for eq in cat.equations() {
        let _ = writeln!(
            out,
            "{indent}equation {} = {}",
            path_text(cat, &eq.lhs),
            path_text(cat, &eq.rhs)
        );
    }
    out
}

/// Every set and map, in declaration order, elements in their sorted order.
pub fn instance_body_text(inst: &InstanceFunctor, indent: &str) -> String {
    let g = inst.schema().graph();
    let mut out = String::new();
    for ob in g.objects() {
        let elems: Vec<String> = inst.carrier(ob).iter().map(elem).collect();
        let _ = writeln!(
            out,
            "{indent}set {} {{ {} }}",
            word(g.object_name(ob)),
            elems.join(", ")
        );
    }
    for e in g.edges() {
        write_map(
            &mut out,
            indent,
            &format!("map {}", word(g.edge_name(e))),
            inst.raw_action(e),
        );
    }
    out
}

pub fn functor_body_text(f: &FunctorDef, indent: &str) -> String {
    let (sg, tg) = (f.source().graph(), f.target().graph());
    let mut out = String::new();
    for ob in sg.objects() {
        let _ = writeln!(
            out,
            "{indent}object {} -> {}",
            word(sg.object_name(ob)),
            word(tg.object_name(f.map_object(ob)))
        );
    }
    for e in sg.edges() {
        let _ = writeln!(
            out,
            "{indent}arrow {} -> {}",
            word(sg.edge_name(e)),
            path_text(f.target(), f.map_generator(e))
        );
    }
    out
}

pub fn schema_text(name: &str, cat: &PresentedCategory) -> String {
    format!("schema {} {{\n{}}}\n", word(name), schema_body_text(cat, "  "))
}

pub fn instance_text(name: &str, schema: &str, inst: &InstanceFunctor) -> String {
    format!(
        "instance {} : {} {{\n{}}}\n",
        word(name),
        word(schema),
        instance_body_text(inst, "  ")
    )
}

pub fn functor_text(name: &str, source: &str, target: &str, f: &FunctorDef) -> String {
    format!(
        "functor {} : {} -> {} {{\n{}}}\n",
        word(name),
        word(source),
        word(target),
        functor_body_text(f, "  ")
    )
}

/// Always written in the `I2(F c) -> I1(c)` direction.
pub fn transform_text(name: &str, t: &NamedTransform) -> String {
    let cat = t.transformation.functor().source();
    let mut out = format!(
        "transform {} {{\n  functor {}\n  source {}\n  target {}\n",
        word(name),
        word(&t.functor),
        word(&t.source),
        word(&t.target)
    );
    for (ob, map) in cat.objects().zip(t.transformation.epsilon_components()) {
        write_map(
            &mut out,
            "  ",
            &format!("component {}", word(cat.object_name(ob))),
            map,
        );
    }
    out.push_str("}\n");
    out
}

/// All blocks, grouped by kind in dependency order and sorted by name.
pub fn workspace_text(ws: &Workspace) -> String {
    let mut blocks = Vec::new();
    for (name, cat) in &ws.schemas {
        blocks.push(schema_text(name, cat));
    }
    for (name, i) in &ws.instances {
        blocks.push(instance_text(name, &i.schema, &i.instance));
    }
    for (name, f) in &ws.functors {
        blocks.push(functor_text(name, &f.source, &f.target, &f.functor));
    }
    for (name, t) in &ws.transforms {
        blocks.push(transform_text(name, t));
    }
    blocks.join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use catlift_core::instance::InstanceViolation;

    fn kind(r: Result<impl fmt::Debug, DslError>) -> DslErrorKind {
        r.unwrap_err().kind
    }

    #[test]
    fn two_arrows_give_the_graph_schema() {
        let cat = parse_schema("object 0\nobject 1\narrow s : 0 -> 1\narrow t : 0 -> 1\n", Bounds::default())
            .unwrap();
        assert_eq!(cat, catlift_core::models::graph_schema_category());
    }

    #[test]
    fn empty_text_is_the_empty_category() {
        let cat = parse_schema("  # nothing\n", Bounds::default()).unwrap();
        assert_eq!(cat.object_count(), 0);
    }

    #[test]
    fn antiparallel_equation_is_rejected_with_position() {
        let err = parse_schema(
            "object a\nobject b\narrow f : a -> b\narrow g : b -> a\nequation f = g\n",
            Bounds::default(),
        )
        .unwrap_err();
        assert_eq!((err.line, err.col), (5, 10));
        assert!(matches!(err.kind, DslErrorKind::NonParallelEquation { .. }));
    }

    #[test]
    fn duplicates_and_dangling_names_report_their_position() {
        let err = parse_schema("object a\n  object a", Bounds::default()).unwrap_err();
        assert_eq!((err.line, err.col), (2, 10));
        assert_eq!(err.kind, dup("object", "a"));
        let err = parse_schema("object a\narrow f : a -> zz", Bounds::default()).unwrap_err();
        assert_eq!((err.line, err.col), (2, 16));
        assert_eq!(err.kind, dangling("object", "zz"));
        assert_eq!(
            kind(parse_schema("object a\nequation f = id(a)", Bounds::default())),
            dangling("arrow", "f")
        );
    }

    #[test]
    fn identity_paths_and_composites_parse() {
        let cat = parse_schema(
            "object a\narrow f : a -> a\nequation f;f = id(a)\n",
            Bounds::default(),
        )
        .unwrap();
        assert_eq!(cat.equations().len(), 1);
        assert!(cat.equations()[0].rhs.is_identity());
        assert_eq!(cat.hom_set(catlift_core::ObId(0), catlift_core::ObId(0)).unwrap().len(), 2);
    }

    #[test]
    fn missing_image_in_a_map_is_a_load_failure() {
        let cat = Arc::new(parse_schema("object a\nobject b\narrow f : a -> b", Bounds::default()).unwrap());
        let err = parse_instance("set a { 1, 2 }\nset b { x }\nmap f { 1 -> x }", &cat).unwrap_err();
        match err.kind {
            DslErrorKind::InvalidInstance { report, .. } => assert_eq!(
                report.violations,
                vec![InstanceViolation::NonTotalAction {
                    arrow: "f".into(),
                    element: Elem::atom("2")
                }]
            ),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_sets_and_maps_are_valid() {
        let cat = Arc::new(parse_schema("object a\nobject b\narrow f : a -> b", Bounds::default()).unwrap());
        let inst = parse_instance("set a { }\nmap f { }", &cat).unwrap();
        assert!(inst.carriers().iter().all(FiniteSet::is_empty));
    }

    #[test]
    fn unknown_object_in_instance() {
        let cat = Arc::new(parse_schema("object a", Bounds::default()).unwrap());
        let err = parse_instance("set a { 1 }\nset q { 2 }", &cat).unwrap_err();
        assert_eq!((err.line, err.col), (2, 5));
        assert_eq!(err.kind, dangling("object", "q"));
    }

    #[test]
    fn quoting_round_trips_awkward_words() {
        for w in ["a b", "x->y", "-", "a-", "", "q\"uote", "id", "-5", "a-b", "#x", "(", "é"] {
            let toks = lex(&word(w)).unwrap();
            assert_eq!(toks.len(), 1, "{w:?}");
            assert_eq!(toks[0].tok, Tok::Word(w.to_string()), "{w:?}");
        }
    }

    #[test]
    fn unterminated_string_is_a_syntax_error() {
        let err = parse_schema("object \"abc", Bounds::default()).unwrap_err();
        assert_eq!((err.line, err.col), (1, 8));
    }
}
