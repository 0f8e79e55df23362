//! The `inferxpath` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use inferxpath_core::dom::NodeKind;
use inferxpath_core::eval::{EvalOptions, Evaluator, NodeSet, Value};
use inferxpath_core::infer::{assemble_table, search, InferError, SearchOptions, StreamEnd};
use inferxpath_core::pretty_print;
use inferxpath_core::semantic::Registry;
use serde::Serialize;

use crate::fetcher::{FetchMode, FetchPolicy, Fetcher};
use crate::manifest::Manifest;
use crate::registry::load_registry;
use crate::request::{NamedSetSpec, Request, RequestError, Resolver};
use crate::table::{paths_metadata, write_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EVAL: i32 = 3;
pub const EXIT_NO_PATH: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "inferxpath", version, about = "Evaluate XPath-BE expressions and infer paths between node sets")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Corpus manifest.
    #[arg(long, global = true, env = "INFERXPATH_MANIFEST")]
    pub manifest: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FetchMode::CorpusOnly)]
    pub fetch_mode: FetchMode,
    /// Page loads allowed beyond the seed pages.
    #[arg(long, global = true, default_value_t = 100)]
    pub max_fetch: u32,
    /// Tolerance in CSS pixels for the directional visual axes.
    #[arg(long, global = true, default_value_t = 0.5)]
    pub epsilon: f64,
    /// Maximum location steps in inferred paths.
    #[arg(long, global = true, default_value_t = 6)]
    pub depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,
    /// Recognizer file layered over the built-ins.
    #[arg(long, global = true)]
    pub registry: Option<PathBuf>,
    /// Host HTTP may contact; repeatable. Any host when absent.
    #[arg(long = "allow-host", global = true)]
    pub allow_hosts: Vec<String>,
    /// Variable binding `name=value`; repeatable.
    #[arg(long = "var", global = true, value_parser = parse_binding)]
    pub vars: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
    Plain,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an expression from the seed pages.
    Eval { expr: String },
    /// List the members of a recognizer's semantic set.
    Recognize { name: String },
    /// Run an inference request file.
    Infer {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Assemble a key/value table and write it as CSV.
    Schema {
        /// `[name=]xpath:EXPR` or `[name=]recognizer:NAME`.
        #[arg(long)]
        key: NamedSetSpec,
        /// Same syntax as `--key`; repeatable.
        #[arg(long = "value")]
        values: Vec<NamedSetSpec>,
        /// CSV destination; the column paths go to `<out>.paths.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every node of every manifest page.
    DumpCorpus,
}

fn parse_binding(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    Ok((k.to_owned(), v.to_owned()))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct NodeRecord<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    recognizer: Option<&'a str>,
    page: &'a str,
    node_index: u32,
    tag: String,
    text: String,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct DumpRecord<'a> {
    page: &'a str,
    node_index: u32,
    kind: &'static str,
    name: &'a str,
    value: &'a str,
    parent: Option<u32>,
}

#[derive(Serialize)]
struct PathRecord {
    xpath: String,
    cost: [u32; 3],
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    dropped: Option<String>,
}

#[derive(Serialize)]
struct ScalarRecord {
    #[serde(rename = "type")]
    kind: &'static str,
    value: serde_json::Value,
}

/// A failure with its exit code; the message goes to standard error.
struct Failure(i32, String);

impl From<RequestError> for Failure {
    fn from(e: RequestError) -> Self {
        Failure(if e.is_evaluation() { EXIT_EVAL } else { EXIT_USAGE }, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(EXIT_IO, e.to_string())
    }
}

impl From<InferError> for Failure {
    fn from(e: InferError) -> Self {
        match e {
            InferError::Eval(e) => Failure(EXIT_EVAL, e.to_string()),
            other => Failure(EXIT_USAGE, other.to_string()),
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(Failure(code, message)) => {
            let _ = writeln!(stderr, "inferxpath: {message}");
            code
        }
    }
}

struct Session {
    fetcher: Fetcher,
    registry: Registry,
}

fn open(config: &Config) -> Result<Session, Failure> {
    let path =
        config.manifest.as_ref().ok_or_else(|| Failure(EXIT_USAGE, "no manifest: pass --manifest or set INFERXPATH_MANIFEST".into()))?;
    let manifest = Manifest::load(path).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    let policy = FetchPolicy {
        mode: config.fetch_mode,
        max_fetch: config.max_fetch,
        allow_hosts: (!config.allow_hosts.is_empty()).then(|| config.allow_hosts.clone()),
        ..FetchPolicy::default()
    };
    let fetcher = Fetcher::open(&manifest, policy).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
    let registry = load_registry(config.registry.as_deref()).map_err(|e| match e {
        crate::registry::RegistryError::Io { .. } => Failure(EXIT_IO, e.to_string()),
        _ => Failure(EXIT_USAGE, e.to_string()),
    })?;
    Ok(Session { fetcher, registry })
}

fn evaluator<'a>(session: &'a Session, config: &Config) -> Evaluator<'a> {
    let options = EvalOptions { epsilon: config.epsilon, max_fetch: config.max_fetch, ..EvalOptions::default() };
    let mut ev = Evaluator::with_options(&session.fetcher, options);
    for (k, v) in &config.vars {
        ev.set_variable(k, v);
    }
    ev
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let config = &cli.config;
    // Syntax errors are reported before the corpus is touched.
    let parsed = match &cli.command {
        Command::Eval { expr } => Some(crate::request::parse_expr(expr, "expression")?),
        _ => None,
    };
    let session = open(config)?;
    let ev = evaluator(&session, config);
    let resolver = Resolver {
        registry: &session.registry,
        evaluator: &ev,
        pages: session.fetcher.seed_pages().iter().map(|p| p.as_ref()).collect(),
        roots: session.fetcher.seed_roots(),
    };
    match &cli.command {
        Command::Eval { .. } => {
            let e = parsed.expect("parsed above");
            let value = ev.evaluate(&e, &resolver.roots).map_err(|e| Failure(EXIT_EVAL, e.to_string()))?;
            match value {
                Value::NodeSet(ns) => write_nodes(&ev, &ns, None, config.output, stdout)?,
                scalar => write_scalar(&scalar, config.output, stdout)?,
            }
            Ok(EXIT_OK)
        }
        Command::Recognize { name } => {
            let set = resolver.set(&crate::request::SetSpec::Recognizer(name.clone()))?;
            write_nodes(&ev, &set.members, Some(name), config.output, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Infer { spec } => {
            let bytes = std::fs::read(spec).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", spec.display())))?;
            let req = Request::from_json(&bytes)?;
            let query = resolver.query(&req, config.depth)?;
            let mut stream = search(&query, &ev)?;
            let mut emitted = 0;
            for item in stream.by_ref() {
                let p = item?;
                let line = PathRecord {
                    xpath: pretty_print(&p.expr),
                    cost: p.cost.as_array(),
                    verified: p.verified,
                    dropped: p.dropped.as_ref().map(pretty_print),
                };
                match config.output {
                    Output::Json => writeln!(stdout, "{}", serde_json::to_string(&line).expect("serializable"))?,
                    Output::Csv => writeln!(stdout, "{},{},{},{}", csv_field(&line.xpath), line.cost[0], line.cost[1], line.cost[2])?,
                    Output::Plain => writeln!(stdout, "{}", line.xpath)?,
                }
                stdout.flush()?;
                emitted += 1;
            }
            if emitted == 0 {
                let why = match stream.end() {
                    Some(StreamEnd::ExpansionBudget) => "search budget exhausted",
                    _ => "no path within the depth bound",
                };
                writeln!(stderr, "inferxpath: no path found ({why})")?;
            }
            Ok(EXIT_OK)
        }
        Command::Schema { key, values, out } => {
            let key_set = resolver.named(key)?;
            let value_sets = values.iter().map(|v| resolver.named(v)).collect::<Result<Vec<_>, _>>()?;
            let options = SearchOptions { depth: config.depth, ..SearchOptions::default() };
            let table = assemble_table(&key_set, &value_sets, &ev, options)?;
            match out {
                Some(path) => {
                    let file = std::fs::File::create(path).map_err(|e| Failure(EXIT_IO, format!("{}: {e}", path.display())))?;
                    write_csv(&table, std::io::BufWriter::new(file)).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
                    let meta = paths_metadata(&key_set, &value_sets, &table);
                    let mut meta_path = path.clone().into_os_string();
                    meta_path.push(".paths.json");
                    let mut json = serde_json::to_string_pretty(&meta).expect("serializable");
                    json.push('\n');
                    std::fs::write(&meta_path, json)?;
                }
                None => write_csv(&table, &mut *stdout).map_err(|e| Failure(EXIT_IO, e.to_string()))?,
            }
            let missing = table.missing();
            if missing.is_empty() {
                Ok(EXIT_OK)
            } else {
                for i in missing {
                    writeln!(stderr, "inferxpath: no path from {} to {}", key_set.name, value_sets[i].name)?;
                }
                Ok(EXIT_NO_PATH)
            }
        }
        Command::DumpCorpus => {
            let manifest_path = config.manifest.as_ref().expect("checked by open");
            let manifest = Manifest::load(manifest_path).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
            for entry in &manifest.pages {
                let page = session.fetcher.get(&entry.url).map_err(|e| Failure(EXIT_IO, e.to_string()))?;
                let url = page.url().as_str();
                for (i, n) in page.document.nodes() {
                    let rec =
                        DumpRecord { page: url, node_index: i, kind: kind_name(n.kind), name: &n.name, value: &n.value, parent: n.parent };
                    writeln!(stdout, "{}", serde_json::to_string(&rec).expect("serializable"))?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn kind_name(k: NodeKind) -> &'static str {
    match k {
        NodeKind::Element => "element",
        NodeKind::Text => "text",
        NodeKind::Attribute => "attribute",
        NodeKind::Comment => "comment",
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

fn write_nodes(ev: &Evaluator<'_>, ns: &NodeSet, recognizer: Option<&str>, output: Output, out: &mut dyn Write) -> Result<(), Failure> {
    if output == Output::Csv {
        writeln!(out, "page,nodeIndex,tag,text")?;
    }
    for id in ns {
        let page = ev.page(&id.page).map_err(|e| Failure(EXIT_EVAL, e.to_string()))?;
        let node = page.document.node(id.index);
        let tag = match node.kind {
            NodeKind::Element => node.name.clone(),
            NodeKind::Attribute => format!("@{}", node.name),
            NodeKind::Text => "#text".into(),
            NodeKind::Comment => "#comment".into(),
        };
        let text = ev.string_value(id).map_err(|e| Failure(EXIT_EVAL, e.to_string()))?;
        match output {
            Output::Json => {
                let rec = NodeRecord { recognizer, page: id.page.as_str(), node_index: id.index, tag, text };
                writeln!(out, "{}", serde_json::to_string(&rec).expect("serializable"))?;
            }
            Output::Csv => writeln!(out, "{},{},{},{}", csv_field(id.page.as_str()), id.index, csv_field(&tag), csv_field(&text))?,
            Output::Plain => writeln!(out, "{text}")?,
        }
    }
    Ok(())
}

fn write_scalar(v: &Value, output: Output, out: &mut dyn Write) -> Result<(), Failure> {
    let (value, plain) = match v {
        Value::String(s) => (serde_json::Value::from(s.as_str()), s.clone()),
        Value::Boolean(b) => (serde_json::Value::from(*b), b.to_string()),
        Value::Number(n) if n.fract() == 0.0 && n.abs() < 9.0e15 => (serde_json::Value::from(*n as i64), n.to_string()),
        Value::Number(n) => match serde_json::Number::from_f64(*n) {
            Some(num) => (serde_json::Value::Number(num), n.to_string()),
            None => (
                serde_json::Value::from(if n.is_nan() {
                    "NaN"
                } else if *n > 0.0 {
                    "Infinity"
                } else {
                    "-Infinity"
                }),
                n.to_string(),
            ),
        },
        Value::NodeSet(_) => unreachable!("node-sets are written as records"),
    };
    match output {
        Output::Json => writeln!(out, "{}", serde_json::to_string(&ScalarRecord { kind: v.kind(), value }).expect("serializable"))?,
        Output::Csv | Output::Plain => writeln!(out, "{plain}")?,
    }
    Ok(())
}
