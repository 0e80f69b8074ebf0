use std::path::{Path, PathBuf};

use globset::{Glob, GlobSet, GlobSetBuilder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tree_sitter::Node;

use super::builder::{cfg_from_method_node, java_parser, method_params};
use super::defuse::{named_children, text};
use super::{FrontendError, MethodCfg, MethodRef};

pub const DEFAULT_GLOB: &str = "**/*.java";

/// One method body as it appears in its file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodSource {
    pub method: MethodRef,
    pub source: String,
    /// Byte offset of `source` within the file.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestWarning {
    pub file_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<MethodRef>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub files_matched: usize,
    pub files_parsed: usize,
    pub methods: usize,
    pub warnings: Vec<IngestWarning>,
}

#[derive(Debug, Clone)]
pub struct Ingested {
    pub methods: Vec<MethodSource>,
    pub report: IngestReport,
}

#[derive(Debug, Clone)]
pub struct CorpusCfgs {
    pub cfgs: Vec<MethodCfg>,
    pub report: IngestReport,
}

/// Bodied method and constructor declarations in document order. Methods of
/// classes nested inside a method body belong to that body and are skipped.
pub(crate) fn method_nodes(root: Node<'_>) -> Vec<Node<'_>> {
    fn visit<'t>(node: Node<'t>, out: &mut Vec<Node<'t>>) {
        match node.kind() {
            "method_declaration" | "constructor_declaration" | "compact_constructor_declaration" => {
                if node.child_by_field_name("body").is_some() {
                    out.push(node);
                }
            }
            _ => {
                for c in named_children(node) {
                    visit(c, out);
                }
            }
        }
    }
    let mut out = Vec::new();
    visit(root, &mut out);
    out
}

fn signature(decl: Node<'_>, src: &str) -> String {
    let name = decl.child_by_field_name("name").map(|n| text(n, src)).unwrap_or("<anon>");
    let types: Vec<String> = method_params(decl, src)
        .into_iter()
        .map(|(ty, _)| ty.split_whitespace().collect::<Vec<_>>().join(" "))
        .collect();
    format!("{name}({})", types.join(","))
}

fn glob_set(include_globs: &[String]) -> Result<GlobSet, FrontendError> {
    let mut builder = GlobSetBuilder::new();
    let globs: Vec<&str> = if include_globs.is_empty() {
        vec![DEFAULT_GLOB]
    } else {
        include_globs.iter().map(String::as_str).collect()
    };
    for g in globs {
        builder.add(Glob::new(g).map_err(|_| FrontendError::Glob(g.to_string()))?);
    }
    builder.build().map_err(|e| FrontendError::Glob(e.to_string()))
}

/// (corpus-relative path with `/` separators, absolute path)
type Listed = Vec<(String, PathBuf)>;

/// Matching files sorted by relative path, plus unreadable directory entries.
fn list_files(root: &Path, include_globs: &[String]) -> Result<(Listed, Vec<IngestWarning>), FrontendError> {
    std::fs::read_dir(root).map_err(|source| FrontendError::Root { path: root.display().to_string(), source })?;
    let globs = glob_set(include_globs)?;
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                let path = e.path().map(|p| p.display().to_string()).unwrap_or_default();
                warnings.push(IngestWarning { file_path: path, method: None, message: e.to_string() });
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let Ok(rel) = entry.path().strip_prefix(root) else { continue };
        let rel = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        if globs.is_match(&rel) {
            files.push((rel, entry.path().to_path_buf()));
        }
    }
    files.sort();
    Ok((files, warnings))
}

enum FileOutcome<T> {
    Parsed(Vec<T>, Vec<IngestWarning>),
    Failed(IngestWarning),
}

fn process_file<T>(
    rel: &str,
    path: &Path,
    per_method: &(dyn Fn(Node<'_>, &str, MethodRef) -> Result<T, IngestWarning> + Sync),
) -> FileOutcome<T> {
    let warn = |message: String| IngestWarning { file_path: rel.to_string(), method: None, message };
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => return FileOutcome::Failed(warn(format!("unreadable: {e}"))),
    };
    let src = match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(_) => return FileOutcome::Failed(warn("not valid UTF-8".into())),
    };
    process_text(rel, &src, per_method)
}

fn process_text<T>(
    rel: &str,
    src: &str,
    per_method: &(dyn Fn(Node<'_>, &str, MethodRef) -> Result<T, IngestWarning> + Sync),
) -> FileOutcome<T> {
    let warn = |message: String| IngestWarning { file_path: rel.to_string(), method: None, message };
    let mut parser = java_parser();
    let Some(tree) = parser.parse(src, None) else {
        return FileOutcome::Failed(warn("parser gave up".into()));
    };
    if tree.root_node().has_error() {
        return FileOutcome::Failed(warn("syntax error".into()));
    }
    let mut items = Vec::new();
    let mut warnings = Vec::new();
    for (index, decl) in method_nodes(tree.root_node()).into_iter().enumerate() {
        let method = MethodRef { file_path: rel.to_string(), method_signature: signature(decl, src), method_index: index };
        match per_method(decl, src, method) {
            Ok(item) => items.push(item),
            Err(w) => warnings.push(w),
        }
    }
    FileOutcome::Parsed(items, warnings)
}

fn run<T: Send>(
    root: &Path,
    include_globs: &[String],
    per_method: &(dyn Fn(Node<'_>, &str, MethodRef) -> Result<T, IngestWarning> + Sync),
) -> Result<(Vec<T>, IngestReport), FrontendError> {
    let (files, mut warnings) = list_files(root, include_globs)?;
    let outcomes: Vec<FileOutcome<T>> = files.par_iter().map(|(rel, path)| process_file(rel, path, per_method)).collect();
    let mut report = IngestReport { files_matched: files.len(), ..Default::default() };
    let mut items = Vec::new();
    for outcome in outcomes {
        match outcome {
            FileOutcome::Parsed(mut xs, ws) => {
                report.files_parsed += 1;
                items.append(&mut xs);
                warnings.extend(ws);
            }
            FileOutcome::Failed(w) => warnings.push(w),
        }
    }
    report.methods = items.len();
    report.warnings = warnings;
    Ok((items, report))
}

/// Every method body of every parseable file under `root` matching the
/// globs (default `**/*.java`), ordered by path then method index. Files
/// that fail to parse become warnings.
pub fn ingest_corpus(root: &Path, include_globs: &[String]) -> Result<Ingested, FrontendError> {
    let (methods, report) = run(root, include_globs, &|decl, src, method| {
        Ok(MethodSource { method, source: src[decl.byte_range()].to_string(), offset: decl.start_byte() })
    })?;
    Ok(Ingested { methods, report })
}

fn cfg_or_warning(decl: Node<'_>, src: &str, method: MethodRef) -> Result<MethodCfg, IngestWarning> {
    let file_path = method.file_path.clone();
    cfg_from_method_node(decl, src, method, 0).map_err(|e| match e {
        FrontendError::Method { method, message } => IngestWarning { file_path, method: Some(method), message },
        other => IngestWarning { file_path, method: None, message: other.to_string() },
    })
}

/// Ingests and builds CFGs in one pass (each file is parsed once).
pub fn build_corpus(root: &Path, include_globs: &[String]) -> Result<CorpusCfgs, FrontendError> {
    let (cfgs, report) = run(root, include_globs, &cfg_or_warning)?;
    Ok(CorpusCfgs { cfgs, report })
}

/// CFGs of every method in one in-memory compilation unit, labeled with
/// `file_path`. Spans are offsets into `src`. A file that fails to parse
/// yields no CFGs and one warning.
pub fn build_file(file_path: &str, src: &str) -> (Vec<MethodCfg>, Vec<IngestWarning>) {
    match process_text(file_path, src, &cfg_or_warning) {
        FileOutcome::Parsed(cfgs, warnings) => (cfgs, warnings),
        FileOutcome::Failed(w) => (Vec::new(), vec![w]),
    }
}
