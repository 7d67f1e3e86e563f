//! Text file formats.
//!
//! * score file: `<trial_id>\t<score>` per line
//! * labels file: `<trial_id>\t<label token>`
//! * groups file: `<trial_id>\t<group_id>`
//! * metadata: comma-separated table with header `id,<attr>...,annotation,highlight`
//! * distance matrix: tab-separated, ids in the first row and column
//! * embedding: `# key=value ...` header then `<id>\t<x>\t<y>`
//! * metrics: `classifier_id\teer\tcllr\tmin_cllr`
//!
//! Lines starting with `#` and blank lines are ignored in the two-column
//! formats.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use adjviz_core::embedding::Embedding;
use adjviz_core::scores::ClassifierInfo;
use adjviz_core::{ClassifierMetadata, DistanceMatrix, Error, GroupMap, LabelMap, ScoreMatrix};
use rayon::prelude::*;

use crate::error::{AppError, Result};
use crate::number::format_sig;

pub const DISTANCE_DIGITS: usize = 12;
pub const EMBEDDING_DIGITS: usize = 9;
pub const METRIC_DIGITS: usize = 12;

/// A score file and the classifier id it is loaded under.
#[derive(Debug, Clone)]
pub struct ScoreSource {
    pub path: PathBuf,
    pub id: String,
}

impl ScoreSource {
    /// Uses the file name stem as classifier id.
    pub fn from_path(path: impl Into<PathBuf>) -> Self {
        let path = path.into();
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        Self { path, id }
    }

    pub fn with_id(path: impl Into<PathBuf>, id: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            id: id.into(),
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| AppError::io(path, e))
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| AppError::io(path, e))
}

/// Non-comment, non-blank lines split on TAB into exactly two fields, with
/// 1-based line numbers.
fn two_columns(path: &Path, text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                rows.push((i + 1, a.to_string(), b.to_string()))
            }
            _ => {
                return Err(AppError::parse(
                    path,
                    i + 1,
                    "expected two tab-separated fields",
                ));
            }
        }
    }
    Ok(rows)
}

/// One classifier's scores keyed by trial id.
fn load_score_file(source: &ScoreSource) -> Result<BTreeMap<String, f64>> {
    let path = &source.path;
    let mut scores = BTreeMap::new();
    for (line, trial, value) in two_columns(path, &read(path)?)? {
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| AppError::parse(path, line, format!("invalid score {value:?}")))?;
        if !v.is_finite() {
            return Err(AppError::data(
                path,
                Error::NonFiniteScore {
                    classifier: source.id.clone(),
                    trial,
                },
            ));
        }
        if scores.insert(trial.clone(), v).is_some() {
            return Err(AppError::data(
                path,
                Error::DuplicateTrial {
                    classifier: source.id.clone(),
                    trial,
                },
            ));
        }
    }
    Ok(scores)
}

/// Loads one score file per classifier into a matrix.
///
/// All files must cover the same trial set. Rows are ordered by trial id,
/// columns follow `sources`. Files are read in parallel.
pub fn load_scores(sources: &[ScoreSource]) -> Result<ScoreMatrix> {
    let mut ids = BTreeSet::new();
    for s in sources {
        if !ids.insert(s.id.as_str()) {
            return Err(AppError::data(
                &s.path,
                Error::DuplicateClassifierId {
                    classifier: s.id.clone(),
                },
            ));
        }
    }
    let maps: Vec<BTreeMap<String, f64>> = sources
        .par_iter()
        .map(load_score_file)
        .collect::<Result<_>>()?;
    let Some(first) = maps.first() else {
        return Err(AppError::Usage("no score files given".into()));
    };

    for (source, map) in sources.iter().zip(&maps).skip(1) {
        if let Some(t) = first.keys().find(|t| !map.contains_key(*t)) {
            return Err(AppError::data(
                &source.path,
                Error::MissingTrial {
                    classifier: source.id.clone(),
                    trial: t.clone(),
                },
            ));
        }
        if let Some(t) = map.keys().find(|t| !first.contains_key(*t)) {
            return Err(AppError::data(
                &sources[0].path,
                Error::MissingTrial {
                    classifier: sources[0].id.clone(),
                    trial: t.clone(),
                },
            ));
        }
    }

    let trial_ids: Vec<String> = first.keys().cloned().collect();
    let columns = maps
        .into_iter()
        .map(|m| m.into_values().collect())
        .collect();
    let classifier_ids = sources.iter().map(|s| s.id.clone()).collect();
    Ok(ScoreMatrix::new(trial_ids, classifier_ids, columns)?)
}

/// Score files of a directory in file-name order (hidden files skipped).
pub fn score_sources_in_dir(dir: &Path) -> Result<Vec<ScoreSource>> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| AppError::io(dir, e))? {
        let entry = entry.map_err(|e| AppError::io(dir, e))?;
        let path = entry.path();
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if path.is_file() && !hidden {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths.into_iter().map(ScoreSource::from_path).collect())
}

/// Expands a single directory argument into its files; other arguments
/// are taken as score files in the given order.
pub fn resolve_score_sources(args: &[PathBuf]) -> Result<Vec<ScoreSource>> {
    match args {
        [dir] if dir.is_dir() => score_sources_in_dir(dir),
        _ => Ok(args.iter().cloned().map(ScoreSource::from_path).collect()),
    }
}

/// Writes each classifier to `<dir>/<classifier_id>.tsv` with shortest
/// round-trip decimal representation.
pub fn write_scores(dir: &Path, scores: &ScoreMatrix) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    let mut paths = Vec::new();
    for (j, id) in scores.classifier_ids().iter().enumerate() {
        let mut out = String::new();
        for (t, v) in scores.trial_ids().iter().zip(scores.column(j)) {
            writeln!(out, "{t}\t{v}").unwrap();
        }
        let path = dir.join(format!("{id}.tsv"));
        write(&path, &out)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn load_labels(path: &Path, positive_token: &str) -> Result<LabelMap> {
    let mut labels = LabelMap::new();
    for (_, trial, token) in two_columns(path, &read(path)?)? {
        labels
            .insert(trial, token.trim() == positive_token)
            .map_err(|e| AppError::data(path, e))?;
    }
    Ok(labels)
}

pub fn load_groups(path: &Path) -> Result<GroupMap> {
    let mut groups = GroupMap::new();
    for (_, trial, group) in two_columns(path, &read(path)?)? {
        groups
            .insert(trial, group)
            .map_err(|e| AppError::data(path, e))?;
    }
    Ok(groups)
}

pub fn write_groups(path: &Path, groups: &GroupMap) -> Result<()> {
    let mut out = String::new();
    for (trial, group) in groups.iter() {
        writeln!(out, "{trial}\t{group}").unwrap();
    }
    write(path, &out)
}

/// Flag reading of a metadata cell: anything but empty, `0`, `false`,
/// `no` or `none`.
pub fn is_truthy(v: &str) -> bool {
    !matches!(
        v.trim().to_ascii_lowercase().as_str(),
        "" | "0" | "false" | "no" | "none"
    )
}

/// Loads the classifier metadata table.
///
/// The `annotation` column, when present, must be numeric or empty; the
/// `highlight` column is a flag (anything but empty, `0`, `false`, `no`,
/// `none`). Every column, these two included, is also kept as a string
/// attribute. Rows for classifiers outside `known` are dropped with a
/// warning.
pub fn load_metadata(path: &Path, known: Option<&[String]>) -> Result<ClassifierMetadata> {
    let text = read(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| AppError::parse(path, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.first().map(String::as_str) != Some("id") {
        return Err(AppError::parse(path, 1, "first column must be `id`"));
    }
    let keys: Vec<String> = headers[1..].to_vec();
    let mut meta = ClassifierMetadata::new(keys.clone());
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            AppError::parse(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let id = record.get(0).unwrap_or_default().to_string();
        if let Some(known) = known {
            if !known.contains(&id) {
                log::warn!("{}:{line}: unknown classifier {id} ignored", path.display());
                continue;
            }
        }
        let mut info = ClassifierInfo::default();
        for (key, value) in keys.iter().zip(record.iter().skip(1)) {
            info.attributes.insert(key.clone(), value.to_string());
        }
        if let Some(a) = info.attributes.get("annotation").filter(|a| !a.is_empty()) {
            info.annotation = Some(a.parse().map_err(|_| {
                AppError::parse(path, line, format!("annotation {a:?} is not a number"))
            })?);
        }
        info.highlight = info
            .attributes
            .get("highlight")
            .is_some_and(|h| is_truthy(h));
        meta.insert(id, info).map_err(|e| AppError::data(path, e))?;
    }
    Ok(meta)
}

pub fn format_distance_matrix(d: &DistanceMatrix) -> String {
    let mut out = String::from("id");
    for id in d.classifier_ids() {
        write!(out, "\t{id}").unwrap();
    }
    out.push('\n');
    for (i, id) in d.classifier_ids().iter().enumerate() {
        out.push_str(id);
        for v in d.row(i) {
            write!(out, "\t{}", format_sig(*v, DISTANCE_DIGITS)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_distance_matrix(path: &Path, d: &DistanceMatrix) -> Result<()> {
    write(path, &format_distance_matrix(d))
}

pub fn load_distance_matrix(path: &Path) -> Result<DistanceMatrix> {
    let text = read(path)?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| AppError::parse(path, 1, "empty file"))?;
    let ids: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
    if ids.is_empty() {
        return Err(AppError::parse(path, hline, "header lists no classifiers"));
    }
    let m = ids.len();
    let mut values = Vec::with_capacity(m * m);
    let mut rows = 0;
    for (line, text) in lines {
        let fields: Vec<&str> = text.split('\t').collect();
        if rows >= m {
            return Err(AppError::parse(path, line, "more rows than classifiers"));
        }
        if fields.len() != m + 1 {
            return Err(AppError::parse(
                path,
                line,
                format!("expected {} fields", m + 1),
            ));
        }
        if fields[0] != ids[rows] {
            return Err(AppError::parse(
                path,
                line,
                format!(
                    "row id {} does not match column id {}",
                    fields[0], ids[rows]
                ),
            ));
        }
        for f in &fields[1..] {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| AppError::parse(path, line, format!("invalid distance {f:?}")))?;
            values.push(v);
        }
        rows += 1;
    }
    if rows != m {
        return Err(AppError::parse(
            path,
            hline,
            format!("expected {m} rows, found {rows}"),
        ));
    }
    DistanceMatrix::new(ids.clone(), values).map_err(|e| match e {
        Error::InvalidDistance { row, col, reason } => AppError::Usage(format!(
            "{}: invalid distance at ({}, {}): {reason}",
            path.display(),
            ids[row],
            ids[col]
        )),
        other => AppError::data(path, other),
    })
}

pub fn format_embedding(e: &Embedding) -> String {
    let seed = e.seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    let mut out = format!(
        "# method={} dim={} stress={} iterations={} seed={}",
        e.method,
        e.dim,
        format_sig(e.stress, EMBEDDING_DIGITS),
        e.iterations,
        seed
    );
    if e.method == adjviz_core::MdsMethod::Classical {
        write!(
            out,
            " clamped_mass={}",
            format_sig(e.clamped_mass, EMBEDDING_DIGITS)
        )
        .unwrap();
    }
    out.push('\n');
    for (i, id) in e.classifier_ids.iter().enumerate() {
        out.push_str(id);
        for v in e.point(i) {
            write!(out, "\t{}", format_sig(*v, EMBEDDING_DIGITS)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_embedding(path: &Path, e: &Embedding) -> Result<()> {
    write(path, &format_embedding(e))
}

/// Embedding file contents: header `key=value` pairs and labelled points.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingFile {
    pub header: BTreeMap<String, String>,
    pub ids: Vec<String>,
    /// One coordinate vector per id.
    pub points: Vec<Vec<f64>>,
}

pub fn load_embedding(path: &Path) -> Result<EmbeddingFile> {
    let text = read(path)?;
    let mut file = EmbeddingFile {
        header: BTreeMap::new(),
        ids: Vec::new(),
        points: Vec::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if let Some(comment) = line.strip_prefix('#') {
            for kv in comment.split_whitespace() {
                if let Some((k, v)) = kv.split_once('=') {
                    file.header.insert(k.to_string(), v.to_string());
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let id = fields.next().unwrap_or_default().to_string();
        let coords = fields
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| AppError::parse(path, i + 1, "invalid coordinate"))?;
        if coords.is_empty() || coords.iter().any(|v| !v.is_finite()) {
            return Err(AppError::parse(path, i + 1, "expected finite coordinates"));
        }
        if let Some(first) = file.points.first() {
            if first.len() != coords.len() {
                return Err(AppError::parse(path, i + 1, "inconsistent dimension"));
            }
        }
        if file.ids.contains(&id) {
            return Err(AppError::data(path, Error::DuplicateKey { key: id }));
        }
        file.ids.push(id);
        file.points.push(coords);
    }
    if file.ids.is_empty() {
        return Err(AppError::parse(path, 1, "no points"));
    }
    Ok(file)
}

/// Detection metrics of one classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub classifier: String,
    pub eer: f64,
    pub cllr: f64,
    pub min_cllr: f64,
}

pub fn format_metrics(rows: &[MetricsRow]) -> String {
    let mut out = String::from("classifier_id\teer\tcllr\tmin_cllr\n");
    for r in rows {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            r.classifier,
            format_sig(r.eer, METRIC_DIGITS),
            format_sig(r.cllr, METRIC_DIGITS),
            format_sig(r.min_cllr, METRIC_DIGITS)
        )
        .unwrap();
    }
    out
}
