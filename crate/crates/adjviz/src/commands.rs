//! Subcommands: each reads documented files and writes one.

use std::path::PathBuf;

use adjviz_core::embedding::MdsInit;
use adjviz_core::{
    classical_mds, cllr, det_curve, eer, group_reduce, min_cllr, nonmetric_mds, pav_rank_groups,
    procrustes_normalize, MdsMethod, NonMetricConfig, ScoreMatrix,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{AppError, Result};
use crate::files::{self, MetricsRow, ScoreSource};
use crate::parallel::{distance_matrix_parallel, resolve_threads};
use crate::plot::{render_svg, PlotSpec};

#[derive(Debug, Parser)]
#[command(
    name = "adjviz",
    version,
    about = "Classifier adjacency maps from detection scores"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank-distance matrix between classifiers.
    Distances(DistancesArgs),
    /// 2D embedding of a distance matrix.
    Embed(EmbedArgs),
    /// SVG scatter plot of an embedding.
    Plot(PlotArgs),
    /// EER, Cllr and min-Cllr per classifier.
    Metrics(MetricsArgs),
    /// Trial groups of equal PAV-calibrated score.
    PavGroups(PavGroupsArgs),
}

#[derive(Debug, Args)]
pub struct DistancesArgs {
    /// Score files, or a single directory holding them.
    #[arg(required = true)]
    pub scores: Vec<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Replace trials by per-group mean scores before ranking.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, env = "ADJVIZ_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Classical,
    Nonmetric,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    pub distances: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "nonmetric")]
    pub method: Method,
    /// Start non-metric scaling from seeded random coordinates instead of
    /// the classical solution.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    pub embedding: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long)]
    pub metadata: Option<PathBuf>,
    #[arg(long)]
    pub color_by: Option<String>,
    #[arg(long, default_value = "highlight")]
    pub highlight: String,
    #[arg(long)]
    pub annotate: Option<String>,
    #[arg(long, default_value_t = 640)]
    pub width: u32,
    #[arg(long, default_value_t = 480)]
    pub height: u32,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(required = true)]
    pub scores: Vec<PathBuf>,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value = "target")]
    pub positive_label: String,
}

#[derive(Debug, Args)]
pub struct PavGroupsArgs {
    pub scores: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value = "target")]
    pub positive_label: String,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Distances(a) => cmd_distances(&a),
        Command::Embed(a) => cmd_embed(&a),
        Command::Plot(a) => cmd_plot(&a),
        Command::Metrics(a) => cmd_metrics(&a),
        Command::PavGroups(a) => cmd_pav_groups(&a),
    }
}

fn load_matrix(paths: &[PathBuf]) -> Result<ScoreMatrix> {
    files::load_scores(&files::resolve_score_sources(paths)?)
}

pub fn cmd_distances(a: &DistancesArgs) -> Result<()> {
    let mut scores = load_matrix(&a.scores)?;
    if let Some(path) = &a.groups {
        let groups = files::load_groups(path)?;
        scores = group_reduce(&scores, &groups).map_err(|e| AppError::data(path, e))?;
    }
    let d = distance_matrix_parallel(&scores, resolve_threads(a.threads))?;
    files::write_distance_matrix(&a.output, &d)
}

pub fn cmd_embed(a: &EmbedArgs) -> Result<()> {
    let d = files::load_distance_matrix(&a.distances)?;
    let e = match a.method {
        Method::Classical => {
            if a.seed.is_some() {
                log::warn!("--seed has no effect with classical scaling");
            }
            classical_mds(&d, 2)?
        }
        Method::Nonmetric => {
            let init = a
                .seed
                .map_or(MdsInit::Classical, |seed| MdsInit::Random { seed });
            nonmetric_mds(
                &d,
                2,
                &NonMetricConfig {
                    max_iter: a.max_iter,
                    eps: a.eps,
                    init,
                },
            )?
        }
    };
    if e.method == MdsMethod::Classical && e.clamped_mass > 0.0 {
        log::warn!(
            "distances are not Euclidean: {:.3}% of the spectrum was negative and clamped",
            100.0 * e.clamped_mass
        );
    }
    files::write_embedding(&a.output, &procrustes_normalize(&e))
}

pub fn cmd_plot(a: &PlotArgs) -> Result<()> {
    let emb = files::load_embedding(&a.embedding)?;
    let meta = a
        .metadata
        .as_deref()
        .map(|p| files::load_metadata(p, Some(&emb.ids)))
        .transpose()?;
    if meta.is_none() && a.color_by.is_some() {
        log::warn!("--color-by ignored without --metadata");
    }
    let spec = PlotSpec {
        color_by: a.color_by.clone(),
        highlight: a.highlight.clone(),
        annotate: a.annotate.clone(),
        width: a.width,
        height: a.height,
        ..PlotSpec::default()
    };
    files::write(&a.output, &render_svg(&emb, meta.as_ref(), &spec))
}

pub fn cmd_metrics(a: &MetricsArgs) -> Result<()> {
    let scores = load_matrix(&a.scores)?;
    let labels = files::load_labels(&a.labels, &a.positive_label)?;
    let truth = labels
        .binarize(scores.trial_ids())
        .map_err(|e| AppError::data(&a.labels, e))?;
    let rows = scores
        .classifier_ids()
        .iter()
        .enumerate()
        .map(|(j, id)| metrics_row(id, scores.column(j), &truth))
        .collect::<Result<Vec<_>>>()?;
    files::write(&a.output, &files::format_metrics(&rows))
}

fn metrics_row(id: &str, scores: &[f64], truth: &[bool]) -> Result<MetricsRow> {
    let wrap = |source| AppError::Classifier {
        classifier: id.to_string(),
        source,
    };
    Ok(MetricsRow {
        classifier: id.to_string(),
        eer: eer(&det_curve(scores, truth).map_err(wrap)?),
        cllr: cllr(scores, truth).map_err(wrap)?,
        min_cllr: min_cllr(scores, truth).map_err(wrap)?,
    })
}

pub fn cmd_pav_groups(a: &PavGroupsArgs) -> Result<()> {
    let source = ScoreSource::from_path(&a.scores);
    let scores = files::load_scores(std::slice::from_ref(&source))?;
    let labels = files::load_labels(&a.labels, &a.positive_label)?;
    let truth = labels
        .binarize(scores.trial_ids())
        .map_err(|e| AppError::data(&a.labels, e))?;
    let groups = pav_rank_groups(scores.trial_ids(), scores.column(0), &truth).map_err(|e| {
        AppError::Classifier {
            classifier: source.id.clone(),
            source: e,
        }
    })?;
    files::write_groups(&a.output, &groups)
}

/// Parses a full argument vector, program name first.
pub fn parse_args<I, T>(args: I) -> std::result::Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    Cli::try_parse_from(args)
}
