use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use catlift_core::category::{classify_fullness, enumerate_functors_upto, FunctorViolation};
use catlift_core::instance::InstanceViolation;
use catlift_core::models::{graph_to_functor, relational_instance, tree_to_functor, ModelError};
use catlift_core::transform::{
    check_kan_lift, check_transformation, FailureKind, KanCaps, TransformError, TransformReason,
    Verdict,
};
use catlift_core::{Bounds, CatError, Elem, FunctorDef, InstanceFunctor};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::dsl::{self, DslErrorKind};
use crate::ingest::{self, IngestError};
use crate::report::{Caps, Outcome, Report};
use crate::workspace::{LoadError, NamedInstance, Workspace};

#[derive(Debug, Parser)]
#[command(name = "catlift", version, about = "Check schemas, instances and transformations of finitely presented categories")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Print the machine report instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// Most classes accepted in one hom-set
    #[arg(long, global = true, env = "CATLIFT_HOM_CAP", value_name = "N")]
    pub hom_cap: Option<usize>,
    /// Longest irreducible path explored when enumerating a hom-set
    #[arg(long, global = true, value_name = "N")]
    pub path_bound: Option<usize>,
    /// Most rewrite rules created while completing equations
    #[arg(long, global = true, value_name = "N")]
    pub rewrite_cap: Option<usize>,
    /// Most candidate η tuples tried per competitor functor
    #[arg(long, global = true, value_name = "N")]
    pub eta_cap: Option<u64>,
    /// Most competitor functors enumerated
    #[arg(long, global = true, value_name = "N")]
    pub functor_cap: Option<usize>,
    /// Largest carrier the Kan-lift search accepts
    #[arg(long, global = true, value_name = "N")]
    pub carrier_cap: Option<usize>,
    /// Directory of CSV files with an optional manifest.txt
    #[arg(long = "csv", global = true, value_name = "[NAME=]DIR")]
    pub csv: Vec<String>,
    /// JSON document loaded as a tree
    #[arg(long = "json-doc", global = true, value_name = "[NAME=]FILE")]
    pub json_doc: Vec<String>,
    /// Tab-separated edge list loaded as a graph
    #[arg(long = "edgelist", global = true, value_name = "[NAME=]FILE")]
    pub edgelist: Vec<String>,
}

#[derive(Debug, Args)]
pub struct Files {
    /// Workspace files, loaded in order after ingested data
    #[arg(value_name = "FILE")]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check schemas and report their sizes
    ValidateSchema {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        schema: Option<String>,
    },
    /// Check that instances are functors
    ValidateInstance {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        instance: Option<String>,
    },
    /// List every functor between two schemas
    EnumerateFunctors {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// List every functor between two schemas with its fullness
    Classify {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// Check a transformation: functor, fullness, instances, naturality
    CheckTransform {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        transform: Option<String>,
    },
    /// Check the universal property of a transformation by enumeration
    CheckKanLift {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        transform: Option<String>,
    },
    /// Pull an instance back along a functor
    MigrateDelta {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        functor: String,
        #[arg(long)]
        instance: String,
        /// Name of the resulting instance
        #[arg(long)]
        name: Option<String>,
        /// Write the result here instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a composite path on an instance
    QueryPath {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        instance: Option<String>,
        /// `;`-joined arrows or `id(X)`
        #[arg(long)]
        path: String,
        /// Only this element of the start set
        #[arg(long, conflicts_with = "filter")]
        element: Option<String>,
        /// Only rows of the start table with COL equal to VAL
        #[arg(long = "where", id = "filter", value_name = "COL=VAL")]
        filter: Option<String>,
    },
    /// Load inputs and print them as one workspace file
    Ingest {
        #[command(flatten)]
        files: Files,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ValidateSchema { .. } => "validate-schema",
            Command::ValidateInstance { .. } => "validate-instance",
            Command::EnumerateFunctors { .. } => "enumerate-functors",
            Command::Classify { .. } => "classify",
            Command::CheckTransform { .. } => "check-transform",
            Command::CheckKanLift { .. } => "check-kan-lift",
            Command::MigrateDelta { .. } => "migrate-delta",
            Command::QueryPath { .. } => "query-path",
            Command::Ingest { .. } => "ingest",
        }
    }

    fn files(&self) -> &[PathBuf] {
        match self {
            Command::ValidateSchema { files, .. }
            | Command::ValidateInstance { files, .. }
            | Command::EnumerateFunctors { files, .. }
            | Command::Classify { files, .. }
            | Command::CheckTransform { files, .. }
            | Command::CheckKanLift { files, .. }
            | Command::MigrateDelta { files, .. }
            | Command::QueryPath { files, .. }
            | Command::Ingest { files, .. } => &files.files,
        }
    }
}

impl GlobalOpts {
    pub fn caps(&self) -> Caps {
        let d = Bounds::default();
        let k = KanCaps::default();
        Caps {
            bounds: Bounds {
                hom_cap: self.hom_cap.unwrap_or(d.hom_cap),
                path_bound: self.path_bound.unwrap_or(d.path_bound),
                rewrite_cap: self.rewrite_cap.unwrap_or(d.rewrite_cap),
            },
            kan: KanCaps {
                functor_cap: self.functor_cap.unwrap_or(k.functor_cap),
                carrier_cap: self.carrier_cap.unwrap_or(k.carrier_cap),
                eta_cap: self.eta_cap.unwrap_or(k.eta_cap),
            },
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its report. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    Outcome::Error.exit_code()
                }
            };
        }
    };
    let report = execute(&cli);
    if cli.global.json {
        let _ = out.write_all(report.render_json().as_bytes());
    } else if report.verdict == Outcome::Error {
        let _ = err.write_all(report.render_text().as_bytes());
    } else {
        let _ = out.write_all(report.render_text().as_bytes());
    }
    report.exit_code()
}

pub fn execute(cli: &Cli) -> Report {
    let caps = cli.global.caps();
    let name = cli.command.name();
    let ws = match load(&cli.global, cli.command.files(), caps.bounds) {
        Ok(ws) => ws,
        Err(e) => {
            let mut r = Report::error(name, caps, &e);
            let validating = matches!(
                cli.command,
                Command::ValidateSchema { .. } | Command::ValidateInstance { .. }
            );
            if validating && e.is_semantic() {
                r.verdict = Outcome::Invalid;
                r.witnesses.push(json!({ "kind": "loadError", "message": e.to_string() }));
                r.text = format!("{e}\n");
            }
            return r;
        }
    };
    let ctx = Ctx { ws: &ws, caps };
    let result = match &cli.command {
        Command::ValidateSchema { schema, .. } => ctx.validate_schema(schema.as_deref()),
        Command::ValidateInstance { instance, .. } => ctx.validate_instance(instance.as_deref()),
        Command::EnumerateFunctors { source, target, .. } => {
            ctx.enumerate(source, target, false)
        }
        Command::Classify { source, target, .. } => ctx.enumerate(source, target, true),
        Command::CheckTransform { transform, .. } => ctx.check_transform(transform.as_deref()),
        Command::CheckKanLift { transform, .. } => ctx.check_kan_lift(transform.as_deref()),
        Command::MigrateDelta {
            functor,
            instance,
            name,
            output,
            ..
        } => ctx.migrate_delta(functor, instance, name.as_deref(), output.as_deref()),
        Command::QueryPath {
            instance,
            path,
            element,
            filter,
            ..
        } => ctx.query_path(instance.as_deref(), path, element.as_deref(), filter.as_deref()),
        Command::Ingest { output, .. } => ctx.ingest(output.as_deref()),
    };
    let mut report = result.unwrap_or_else(|message| Report::error(name, caps, message));
    report.command = name.to_string();
    report
}

// ---------------------------------------------------------------------------
// Loading

#[derive(Debug, thiserror::Error)]
pub enum LoadFailure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Workspace(#[from] LoadError),
    #[error("{name}: {source}")]
    Model { name: String, source: ModelError },
}

impl LoadFailure {
    /// Whether the input parsed but describes something ill-formed.
    fn is_semantic(&self) -> bool {
        match self {
            LoadFailure::Model { .. } | LoadFailure::Ingest(IngestError::Model(_)) => true,
            LoadFailure::Workspace(LoadError::Dsl { source, .. }) => {
                !matches!(source.kind, DslErrorKind::Syntax(_))
            }
            _ => false,
        }
    }
}

/// `NAME=PATH`, or `PATH` named by its file stem.
fn named(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((n, p)) if !n.is_empty() => (n.to_string(), PathBuf::from(p)),
        _ => {
            let p = PathBuf::from(spec);
            let stem = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| spec.to_string());
            (stem, p)
        }
    }
}

/// The same instance on a copy of its schema that carries `bounds`.
fn rebind(inst: InstanceFunctor, bounds: Bounds) -> InstanceFunctor {
    let cat = Arc::new(inst.schema().with_bounds(bounds));
    InstanceFunctor::new(cat, inst.carriers().to_vec(), inst.raw_actions().to_vec())
        .expect("same shape")
}

fn register(ws: &mut Workspace, name: &str, inst: InstanceFunctor) -> Result<(), LoadFailure> {
    if ws.schemas.contains_key(name) || ws.instances.contains_key(name) {
        return Err(LoadFailure::Usage(format!("input name `{name}` used twice")));
    }
    ws.schemas.insert(name.to_string(), inst.schema().clone());
    ws.instances.insert(
        name.to_string(),
        NamedInstance {
            schema: name.to_string(),
            instance: inst,
        },
    );
    Ok(())
}

pub fn load(opts: &GlobalOpts, files: &[PathBuf], bounds: Bounds) -> Result<Workspace, LoadFailure> {
    let mut ws = Workspace::new(bounds);
    let model = |name: &str| {
        let name = name.to_string();
        move |source| LoadFailure::Model { name, source }
    };
    for spec in &opts.csv {
        let (name, dir) = named(spec);
        let (rs, rows) = ingest::read_csv_dir(&dir)?;
        let ri = relational_instance(&rs, &rows, bounds).map_err(model(&name))?;
        register(&mut ws, &name, ri.instance.clone())?;
        ws.relational.insert(name, ri);
    }
    for spec in &opts.edgelist {
        let (name, file) = named(spec);
        let g = ingest::read_edge_list(&file)?;
        let (inst, side) = graph_to_functor(&g).map_err(model(&name))?;
        register(&mut ws, &name, rebind(inst, bounds))?;
        ws.graphs.insert(name, side);
    }
    for spec in &opts.json_doc {
        let (name, file) = named(spec);
        let doc = ingest::read_json(&file)?;
        let inst = tree_to_functor(&doc).map_err(model(&name))?;
        register(&mut ws, &name, rebind(inst, bounds))?;
        ws.trees.insert(name, doc.nodes);
    }
    for f in files {
        ws.load_file(f)?;
    }
    Ok(ws)
}

// ---------------------------------------------------------------------------
// Rendering helpers

fn elem_json(e: &Elem) -> Value {
    match e {
        Elem::Atom(a) => json!(a),
        Elem::Tuple(parts) => json!(parts),
    }
}

fn map_json(m: &BTreeMap<Elem, Elem>) -> Value {
    Value::Array(
        m.iter()
            .map(|(x, y)| json!([elem_json(x), elem_json(y)]))
            .collect(),
    )
}

pub fn functor_json(f: &FunctorDef) -> Value {
    let (sg, tg) = (f.source().graph(), f.target().graph());
    let objects: Map<String, Value> = sg
        .objects()
        .map(|o| (sg.object_name(o).to_string(), json!(tg.object_name(f.map_object(o)))))
        .collect();
    let arrows: Map<String, Value> = sg
        .edges()
        .map(|e| (sg.edge_name(e).to_string(), json!(dsl::path_text(f.target(), f.map_generator(e)))))
        .collect();
    json!({ "objects": objects, "arrows": arrows })
}

pub fn functor_line(f: &FunctorDef) -> String {
    let (sg, tg) = (f.source().graph(), f.target().graph());
    let objects: Vec<String> = sg
        .objects()
        .map(|o| format!("{} -> {}", sg.object_name(o), tg.object_name(f.map_object(o))))
        .collect();
    let arrows: Vec<String> = sg
        .edges()
        .map(|e| format!("{} -> {}", sg.edge_name(e), dsl::path_text(f.target(), f.map_generator(e))))
        .collect();
    if arrows.is_empty() {
        objects.join(", ")
    } else {
        format!("{}; {}", objects.join(", "), arrows.join(", "))
    }
}

fn violation_json(v: &InstanceViolation) -> Value {
    let mut j = match v {
        InstanceViolation::NonTotalAction { arrow, element } => {
            json!({ "kind": "nonTotalAction", "arrow": arrow, "element": elem_json(element) })
        }
        InstanceViolation::CodomainEscape {
            arrow,
            element,
            image,
        } => json!({
            "kind": "codomainEscape", "arrow": arrow,
            "element": elem_json(element), "image": elem_json(image),
        }),
        InstanceViolation::StrayMapping { arrow, element } => {
            json!({ "kind": "strayMapping", "arrow": arrow, "element": elem_json(element) })
        }
        InstanceViolation::EquationBroken {
            equation,
            lhs,
            rhs,
            element,
            lhs_value,
            rhs_value,
        } => json!({
            "kind": "equationBroken", "equation": equation, "lhs": lhs, "rhs": rhs,
            "element": elem_json(element),
            "lhsValue": elem_json(lhs_value), "rhsValue": elem_json(rhs_value),
        }),
    };
    j["message"] = json!(v.to_string());
    j
}

fn functor_violation_text(v: &FunctorViolation) -> String {
    match v {
        FunctorViolation::EndpointMismatch {
            generator,
            expected,
            found,
        } => format!(
            "{generator}: image should run {} -> {}, runs {} -> {}",
            expected.0, expected.1, found.0, found.1
        ),
        FunctorViolation::EquationNotPreserved {
            equation,
            lhs_image,
            rhs_image,
        } => format!("equation #{equation}: images {lhs_image} and {rhs_image} differ"),
        FunctorViolation::Undecided { equation, error } => {
            format!("equation #{equation}: undecided ({error})")
        }
    }
}

fn is_cap_error(e: &CatError) -> bool {
    matches!(
        e,
        CatError::HomCapExceeded { .. }
            | CatError::NormalizationDiverged { .. }
            | CatError::EnumerationCapExceeded { .. }
    )
}

fn pick<'a, T>(
    map: &'a BTreeMap<String, T>,
    name: Option<&str>,
    kind: &str,
) -> Result<Vec<(&'a String, &'a T)>, String> {
    match name {
        Some(n) => map
            .get_key_value(n)
            .map(|kv| vec![kv])
            .ok_or_else(|| format!("no {kind} named `{n}`")),
        None => Ok(map.iter().collect()),
    }
}

fn pick_one<'a, T>(
    map: &'a BTreeMap<String, T>,
    name: Option<&str>,
    kind: &str,
) -> Result<(&'a String, &'a T), String> {
    let all = pick(map, name, kind)?;
    match all.as_slice() {
        [one] => Ok(*one),
        [] => Err(format!("no {kind} loaded")),
        _ => {
            let names: Vec<&str> = all.iter().map(|(n, _)| n.as_str()).collect();
            Err(format!("several {kind}s loaded ({}); choose one with --{kind}", names.join(", ")))
        }
    }
}

// ---------------------------------------------------------------------------
// Commands

struct Ctx<'a> {
    ws: &'a Workspace,
    caps: Caps,
}

type CmdResult = Result<Report, String>;

impl Ctx<'_> {
    fn report(&self, command: &str) -> Report {
        Report::new(command, self.caps)
    }

    fn validate_schema(&self, name: Option<&str>) -> CmdResult {
        let mut r = self.report("validate-schema");
        r.verdict = Outcome::Valid;
        let mut details = Map::new();
        for (name, cat) in pick(&self.ws.schemas, name, "schema")? {
            let g = cat.graph();
            let mut d = json!({
                "objects": g.object_count(),
                "arrows": g.edge_count(),
                "equations": cat.equations().len(),
            });
            let mut line = format!(
                "schema {name}: {} objects, {} arrows, {} equations",
                g.object_count(),
                g.edge_count(),
                cat.equations().len()
            );
            match cat.check_rewriting() {
                Ok(rules) => {
                    d["rewriteRules"] = json!(rules);
                    line += &format!(", {rules} rewrite rules");
                    match cat.all_morphisms() {
                        Ok(ms) => {
                            d["morphisms"] = json!(ms.len());
                            line += &format!(", {} morphisms", ms.len());
                        }
                        Err(e) => {
                            d["morphisms"] = Value::Null;
                            d["morphismsNote"] = json!(e.to_string());
                            line += &format!(", morphisms not enumerated ({e})");
                        }
                    }
                }
                Err(e) => {
                    r.verdict = Outcome::Inconclusive;
                    r.witnesses.push(json!({ "kind": "cap", "schema": name, "message": e.to_string() }));
                    line += &format!(", word problem undecided ({e})");
                }
            }
            r.line(line);
            details.insert(name.clone(), d);
        }
        r.details = json!({ "schemas": details });
        Ok(r)
    }

    fn validate_instance(&self, name: Option<&str>) -> CmdResult {
        let mut r = self.report("validate-instance");
        r.verdict = Outcome::Valid;
        let mut details = Map::new();
        for (name, ni) in pick(&self.ws.instances, name, "instance")? {
            let report = ni.instance.validate();
            let sizes: Map<String, Value> = ni
                .instance
                .schema()
                .objects()
                .map(|o| {
                    let n = ni.instance.schema().object_name(o).to_string();
                    (n, json!(ni.instance.carrier(o).len()))
                })
                .collect();
            details.insert(
                name.clone(),
                json!({ "schema": ni.schema, "valid": report.is_valid(), "carrierSizes": sizes }),
            );
            if report.is_valid() {
                r.line(format!("instance {name}: valid"));
            } else {
                r.verdict = Outcome::Invalid;
                r.line(format!("instance {name}: {} violations", report.violations.len()));
                for v in &report.violations {
                    r.line(format!("  {v}"));
                    let mut w = violation_json(v);
                    w["instance"] = json!(name);
                    r.witnesses.push(w);
                }
            }
        }
        r.details = json!({ "instances": details });
        Ok(r)
    }

    fn enumerate(&self, source: &str, target: &str, fullness: bool) -> CmdResult {
        let command = if fullness { "classify" } else { "enumerate-functors" };
        let mut r = self.report(command);
        let schema = |n: &str| {
            self.ws
                .schemas
                .get(n)
                .ok_or_else(|| format!("no schema named `{n}`"))
        };
        let (src, tgt) = (schema(source)?, schema(target)?);
        let cap = self.caps.kan.functor_cap;
        let (functors, truncated) = match enumerate_functors_upto(src, tgt, cap) {
            Ok(x) => x,
            Err(e) if is_cap_error(&e) => {
                r.verdict = Outcome::Inconclusive;
                r.witnesses.push(json!({ "kind": "cap", "message": e.to_string() }));
                r.line(format!("enumeration stopped: {e}"));
                return Ok(r);
            }
            Err(e) => return Err(e.to_string()),
        };
        if truncated {
            r.verdict = Outcome::Inconclusive;
            r.witnesses.push(json!({
                "kind": "cap",
                "message": CatError::EnumerationCapExceeded { cap }.to_string(),
            }));
        }
        let fulls = if fullness {
            // Recomputed through the library entry point when complete so the
            // two stay in step.
            let classified = if truncated {
                None
            } else {
                classify_fullness(src, tgt, cap).ok()
            };
            let mut out = Vec::new();
            for (i, f) in functors.iter().enumerate() {
                let full = match &classified {
                    Some(c) => Ok(c[i].1.clone()),
                    None => f.is_full(),
                };
                out.push(full);
            }
            Some(out)
        } else {
            None
        };
        let mut rows = Vec::new();
        let mut full_count = 0;
        for (i, f) in functors.iter().enumerate() {
            let mut row = functor_json(f);
            row["index"] = json!(i + 1);
            let mut line = format!("{:>3}. {}", i + 1, functor_line(f));
            if let Some(fulls) = &fulls {
                match &fulls[i] {
                    Ok(full) => {
                        row["full"] = json!(full.full);
                        if full.full {
                            full_count += 1;
                            line += "  [full]";
                        } else {
                            let w = full
                                .witness
                                .as_ref()
                                .map(|m| tgt.morphism_string(m))
                                .unwrap_or_default();
                            line += &format!("  [not full: nothing maps to {w}]");
                            row["witness"] = json!(w);
                        }
                    }
                    Err(e) => {
                        r.verdict = Outcome::Inconclusive;
                        row["full"] = Value::Null;
                        row["note"] = json!(e.to_string());
                        line += &format!("  [fullness undecided: {e}]");
                    }
                }
            }
            r.line(line);
            rows.push(row);
        }
        let summary = if fullness {
            format!("{} functors {source} -> {target}, {full_count} full", functors.len())
        } else {
            format!("{} functors {source} -> {target}", functors.len())
        };
        r.line(summary);
        r.details = json!({
            "source": source,
            "target": target,
            "count": functors.len(),
            "truncated": truncated,
            "functors": rows,
        });
        if fullness {
            r.details["fullCount"] = json!(full_count);
        }
        Ok(r)
    }

    fn check_transform(&self, name: Option<&str>) -> CmdResult {
        let mut r = self.report("check-transform");
        let (name, nt) = pick_one(&self.ws.transforms, name, "transform")?;
        let report = check_transformation(&nt.transformation);
        r.details = json!({
            "transform": name,
            "functor": nt.functor,
            "source": nt.source,
            "target": nt.target,
        });
        r.line(format!(
            "transform {name}: functor {}, source {}, target {}",
            nt.functor, nt.source, nt.target
        ));
        let only_undecided = report
            .reasons
            .iter()
            .all(|x| matches!(x, TransformReason::FullnessUndecided(_)));
        r.verdict = if report.is_valid() {
            Outcome::Valid
        } else if only_undecided {
            Outcome::Inconclusive
        } else {
            Outcome::Invalid
        };
        for reason in &report.reasons {
            r.line(format!("  {reason}"));
            let w = match reason {
                TransformReason::NotAFunctor(vs) => {
                    let vs: Vec<String> = vs.iter().map(functor_violation_text).collect();
                    for v in &vs {
                        r.line(format!("    {v}"));
                    }
                    json!({ "kind": "notAFunctor", "violations": vs })
                }
                TransformReason::NotFull { witness } => {
                    json!({ "kind": "notFull", "morphism": witness })
                }
                TransformReason::FullnessUndecided(e) => {
                    json!({ "kind": "fullnessUndecided", "message": e.to_string() })
                }
                TransformReason::InvalidInstance { which, violations } => {
                    for v in violations {
                        r.line(format!("    {v}"));
                    }
                    json!({
                        "kind": "invalidInstance",
                        "which": which,
                        "violations": violations.iter().map(violation_json).collect::<Vec<_>>(),
                    })
                }
                TransformReason::ComponentTyping(e) => {
                    json!({ "kind": "componentTyping", "message": e.to_string() })
                }
                TransformReason::NotNatural(squares) => {
                    let sq: Vec<Value> = squares
                        .iter()
                        .map(|s| {
                            r.text.push_str(&format!(
                                "    {} at {}: {} vs {}\n",
                                s.generator, s.element, s.via_source, s.via_target
                            ));
                            json!({
                                "generator": s.generator,
                                "element": elem_json(&s.element),
                                "viaSource": elem_json(&s.via_source),
                                "viaTarget": elem_json(&s.via_target),
                            })
                        })
                        .collect();
                    json!({ "kind": "notNatural", "squares": sq })
                }
            };
            r.witnesses.push(w);
        }
        Ok(r)
    }

    fn check_kan_lift(&self, name: Option<&str>) -> CmdResult {
        let mut r = self.report("check-kan-lift");
        let (name, nt) = pick_one(&self.ws.transforms, name, "transform")?;
        r.details = json!({ "transform": name });
        let u = match check_kan_lift(&nt.transformation, self.caps.kan) {
            Ok(u) => u,
            Err(TransformError::InvalidTransformation(why)) => {
                r.verdict = Outcome::Invalid;
                r.witnesses.push(json!({ "kind": "invalidTransformation", "message": why }));
                r.line(format!("transform {name} is not a valid transformation: {why}"));
                return Ok(r);
            }
            Err(e) => return Err(e.to_string()),
        };
        r.verdict = match u.verdict {
            Verdict::Holds => Outcome::Holds,
            Verdict::Fails => Outcome::Fails,
            Verdict::Inconclusive => Outcome::Inconclusive,
        };
        r.line(format!(
            "transform {name}: {} competitor functors, {} natural competitors examined",
            u.functors_checked, u.competitors_checked
        ));
        if let Some(fail) = &u.failure {
            let src = fail.functor.source();
            let eta: Map<String, Value> = src
                .objects()
                .zip(&fail.eta)
                .map(|(o, m)| (src.object_name(o).to_string(), map_json(m)))
                .collect();
            let (kind, count) = match fail.kind {
                FailureKind::NoFactorization => ("noFactorization", 0),
                FailureKind::MultipleFactorizations { count } => ("multipleFactorizations", count),
            };
            r.line(format!(
                "  competitor #{} ({}) factors {count} ways",
                fail.functor_index + 1,
                functor_line(&fail.functor)
            ));
            r.witnesses.push(json!({
                "kind": kind,
                "factorizations": count,
                "functorIndex": fail.functor_index + 1,
                "functor": functor_json(&fail.functor),
                "eta": eta,
            }));
        }
        for hit in &u.cap_hits {
            r.line(format!("  cap reached: {hit}"));
            r.witnesses.push(json!({ "kind": "cap", "message": hit.to_string() }));
        }
        r.details["functorsChecked"] = json!(u.functors_checked);
        r.details["competitorsChecked"] = json!(u.competitors_checked);
        r.details["selfFactorization"] = json!(u.self_factorization);
        Ok(r)
    }

    fn migrate_delta(
        &self,
        functor: &str,
        instance: &str,
        name: Option<&str>,
        output: Option<&FsPath>,
    ) -> CmdResult {
        let mut r = self.report("migrate-delta");
        let nf = self
            .ws
            .functors
            .get(functor)
            .ok_or_else(|| format!("no functor named `{functor}`"))?;
        let ni = self
            .ws
            .instances
            .get(instance)
            .ok_or_else(|| format!("no instance named `{instance}`"))?;
        let check = ni.instance.validate();
        if !check.is_valid() {
            r.verdict = Outcome::Invalid;
            r.witnesses.extend(check.violations.iter().map(violation_json));
            r.line(format!("instance {instance} is invalid"));
            return Ok(r);
        }
        let pulled = ni.instance.pull_back(&nf.functor).map_err(|e| e.to_string())?;
        let result_name = name.map_or_else(|| format!("{instance}_along_{functor}"), str::to_string);
        let text = dsl::instance_text(&result_name, &nf.source, &pulled);
        r.details = json!({
            "functor": functor,
            "instance": instance,
            "result": result_name,
            "schema": nf.source,
        });
        match output {
            Some(path) => {
                std::fs::write(path, &text)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                r.details["output"] = json!(path.display().to_string());
                r.line(format!("wrote instance {result_name} to {}", path.display()));
            }
            None => {
                r.details["text"] = json!(text);
                r.text.push_str(&text);
            }
        }
        Ok(r)
    }

    fn query_path(
        &self,
        instance: Option<&str>,
        path: &str,
        element: Option<&str>,
        filter: Option<&str>,
    ) -> CmdResult {
        let mut r = self.report("query-path");
        let (iname, ni) = pick_one(&self.ws.instances, instance, "instance")?;
        let inst = &ni.instance;
        let cat = inst.schema();
        let p = dsl::parse_path(path, cat).map_err(|e| format!("--path {e}"))?;
        let check = inst.validate();
        if !check.is_valid() {
            r.verdict = Outcome::Invalid;
            r.witnesses.extend(check.violations.iter().map(violation_json));
            r.line(format!("instance {iname} is invalid"));
            return Ok(r);
        }
        let f = inst.eval_path(&p).map_err(|e| e.to_string())?;
        let start = cat.object_name(p.start()).to_string();
        let selected: Vec<Elem> = match (element, filter) {
            (Some(e), _) => {
                let e = dsl::parse_elem(e).map_err(|e| format!("--element {e}"))?;
                if !f.domain().contains(&e) {
                    return Err(format!("`{e}` is not an element of {start}"));
                }
                vec![e]
            }
            (None, Some(cond)) => {
                let (col, val) = cond
                    .split_once('=')
                    .ok_or_else(|| format!("--where expects COL=VAL, found `{cond}`"))?;
                let ri = self
                    .ws
                    .relational
                    .get(iname)
                    .ok_or_else(|| format!("--where needs an instance ingested from CSV; `{iname}` is not"))?;
                ri.select(&start, col, val).map_err(|e| e.to_string())?
            }
            (None, None) => f.domain().iter().cloned().collect(),
        };
        let mut results = Vec::new();
        for x in &selected {
            let y = f.apply(x).expect("selected from the domain");
            r.line(format!("{x} -> {y}"));
            results.push(json!({ "element": elem_json(x), "image": elem_json(y) }));
        }
        if selected.is_empty() {
            r.line("no matching elements");
        }
        r.details = json!({
            "instance": iname,
            "path": dsl::path_text(cat, &p),
            "from": start,
            "to": cat.object_name(p.end()),
            "results": results,
        });
        Ok(r)
    }

    fn ingest(&self, output: Option<&FsPath>) -> CmdResult {
        let mut r = self.report("ingest");
        let text = self.ws.to_text();
        r.details = json!({
            "schemas": self.ws.schemas.keys().collect::<Vec<_>>(),
            "instances": self.ws.instances.keys().collect::<Vec<_>>(),
            "functors": self.ws.functors.keys().collect::<Vec<_>>(),
            "transforms": self.ws.transforms.keys().collect::<Vec<_>>(),
        });
        match output {
            Some(path) => {
                std::fs::write(path, &text)
                    .map_err(|e| format!("{}: {e}", path.display()))?;
                r.line(format!("wrote {}", path.display()));
            }
            None => r.text.push_str(&text),
        }
        Ok(r)
    }
}
