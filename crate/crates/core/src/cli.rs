//! Command-line front end. Every subcommand reads and writes plain files;
//! each output is re-read and parsed after writing, and a failed check is a
//! failed run.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::classify::{
    assign_labels, classify_with, polarization_summary, Category, ConstellationReport,
    PolarizationSummary, DEFAULT_N_MAX,
};
use crate::geometry::PointCloud;
use crate::io::{
    read_cloud_csv, read_edge_list_csv, read_tweets_jsonl, write_cloud_csv, write_edge_list_csv,
};
use crate::models::{sample, ConstellationSpec};
use crate::network::{
    build_graph, layout, top_retweeted, RetweetGraph, RetweetedProfile, DEFAULT_ITERATIONS,
};
use crate::plot::{barcode_svg, scatter_svg, validate_svg};
use crate::reduction::{reduce_euclidean, ReductionReport, DEFAULT_TARGET_SIZE};
use crate::tda::{knn_persistence, PersistenceDiagram, DEFAULT_K_MAX};

pub const DEFAULT_TOP: usize = 10;

/// Bad flag values discovered after parsing (for example `--k-max` too large
/// for the input). The binary exits with status 2 for these, like clap does.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "usage error: {}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Debug, Parser)]
#[command(
    name = "constellations",
    version,
    about = "Constellation analysis of planar point clouds and retweet networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a point cloud from a constellation spec file.
    Generate(GenerateArgs),
    /// Shrink a cloud by farthest-point sampling.
    Reduce(ReduceArgs),
    /// kNN persistence diagram and barcode.
    Ph(PhArgs),
    /// Retweet graph, force layout and most-retweeted profiles from a JSONL corpus.
    Layout(LayoutArgs),
    /// Classify a cloud as Nuclear, Bipolar or Multipolar.
    Classify(ClassifyArgs),
    /// layout, reduce, ph and classify in sequence, with a manifest.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct FormatArg {
    /// Only write outputs of these formats (repeatable or comma-separated).
    #[arg(long = "format", value_enum, value_delimiter = ',')]
    pub formats: Vec<Format>,
}

impl FormatArg {
    fn wants(&self, f: Format) -> bool {
        self.formats.is_empty() || self.formats.contains(&f)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Constellation spec (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; the resolved spec goes next to it as `<stem>.spec.json`.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TARGET_SIZE as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub target_size: u64,
    /// Output CSV; the report goes next to it as `<stem>.report.json`.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct PhArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_K_MAX as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_max: u64,
    /// Diagram JSON; the barcode goes next to it as `<stem>.svg`.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    #[arg(long)]
    pub tweets: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,
    /// Number of entries in top_retweeted.json.
    #[arg(long, default_value_t = DEFAULT_TOP)]
    pub top: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_K_MAX as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_max: u64,
    #[arg(long, default_value_t = DEFAULT_N_MAX as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_max: u64,
    /// Report JSON; the scatter plot goes next to it as `<stem>.svg`.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub tweets: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_TARGET_SIZE as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub target_size: u64,
    #[arg(long, default_value_t = DEFAULT_K_MAX as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_max: u64,
    #[arg(long, default_value_t = DEFAULT_N_MAX as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_max: u64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Reduce(a) => cmd_reduce(&a),
        Command::Ph(a) => cmd_ph(&a),
        Command::Layout(a) => cmd_layout(&a),
        Command::Classify(a) => cmd_classify(&a),
        Command::Pipeline(a) => cmd_pipeline(&a.config()).map(|_| ()),
    }
}

// ---- checked writers ----

fn write_checked(
    path: &Path,
    contents: &str,
    check: impl FnOnce(&str) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    let back =
        fs::read_to_string(path).with_context(|| format!("re-reading {}", path.display()))?;
    check(&back).with_context(|| format!("self-check of {} failed", path.display()))
}

fn emit_cloud(path: &Path, cloud: &PointCloud) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    write_cloud_csv(cloud, &mut buf)?;
    write_checked(path, &String::from_utf8(buf)?, |text| {
        let back = read_cloud_csv(text.as_bytes())?;
        if &back != cloud {
            bail!("cloud read back differs from the cloud written");
        }
        Ok(())
    })
}

fn emit_edges(path: &Path, graph: &RetweetGraph) -> anyhow::Result<()> {
    let mut buf = Vec::new();
    write_edge_list_csv(graph, &mut buf)?;
    write_checked(path, &String::from_utf8(buf)?, |text| {
        let back = read_edge_list_csv(text.as_bytes())?;
        if back.len() != graph.edges().len() {
            bail!(
                "{} edges read back, {} written",
                back.len(),
                graph.edges().len()
            );
        }
        Ok(())
    })
}

fn emit_json<T: Serialize + DeserializeOwned>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_checked(path, &text, |back| {
        serde_json::from_str::<T>(back)?;
        Ok(())
    })
}

fn emit_svg(path: &Path, svg: &str) -> anyhow::Result<()> {
    write_checked(path, svg, |back| {
        validate_svg(back).map_err(anyhow::Error::msg)
    })
}

fn load_cloud(path: &Path) -> anyhow::Result<PointCloud> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_cloud_csv(std::io::BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))
}

fn load_tweets(path: &Path) -> anyhow::Result<RetweetGraph> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let tweets = read_tweets_jsonl(std::io::BufReader::new(file))
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(build_graph(&tweets))
}

fn sibling(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}

fn check_k_max(cloud: &PointCloud, k_max: usize) -> anyhow::Result<()> {
    if cloud.len() < 2 {
        return Err(usage(format!(
            "cloud has {} points, persistence needs at least 2",
            cloud.len()
        )));
    }
    if k_max >= cloud.len() {
        return Err(usage(format!(
            "--k-max {k_max} must be smaller than the cloud size {}",
            cloud.len()
        )));
    }
    Ok(())
}

// ---- subcommands ----

pub fn cmd_generate(a: &GenerateArgs) -> anyhow::Result<()> {
    let text =
        fs::read_to_string(&a.spec).with_context(|| format!("reading {}", a.spec.display()))?;
    let spec = ConstellationSpec::from_json(&text)
        .with_context(|| format!("invalid spec {}", a.spec.display()))?;
    let cloud = sample(&spec, a.n as usize, a.seed)?;
    if a.format.wants(Format::Csv) {
        emit_cloud(&a.out, &cloud)?;
    }
    if a.format.wants(Format::Json) {
        emit_json(&sibling(&a.out, "spec.json"), &spec)?;
    }
    Ok(())
}

pub fn cmd_reduce(a: &ReduceArgs) -> anyhow::Result<()> {
    let cloud = load_cloud(&a.input)?;
    let (reduced, report) = reduce_euclidean(&cloud, a.target_size as usize);
    if a.format.wants(Format::Csv) {
        emit_cloud(&a.out, &reduced)?;
    }
    if a.format.wants(Format::Json) {
        emit_json::<ReductionReport>(&sibling(&a.out, "report.json"), &report)?;
    }
    Ok(())
}

pub fn cmd_ph(a: &PhArgs) -> anyhow::Result<()> {
    let cloud = load_cloud(&a.input)?;
    check_k_max(&cloud, a.k_max as usize)?;
    let diagram = knn_persistence(&cloud, a.k_max as usize)?;
    if a.format.wants(Format::Json) {
        emit_diagram(&a.out, &diagram)?;
    }
    if a.format.wants(Format::Svg) {
        emit_svg(&sibling(&a.out, "svg"), &barcode_svg(&diagram))?;
    }
    Ok(())
}

fn emit_diagram(path: &Path, diagram: &PersistenceDiagram) -> anyhow::Result<()> {
    let mut text = diagram.to_json()?;
    text.push('\n');
    write_checked(path, &text, |back| {
        if &PersistenceDiagram::from_json(back)? != diagram {
            bail!("diagram read back differs from the diagram written");
        }
        Ok(())
    })
}

pub fn cmd_layout(a: &LayoutArgs) -> anyhow::Result<()> {
    let graph = load_tweets(&a.tweets)?;
    write_layout(
        &graph,
        a.seed,
        a.iterations as usize,
        a.top,
        &a.out_dir,
        &a.format,
    )?;
    Ok(())
}

/// Writes layout.csv, edges.csv and top_retweeted.json; an empty graph gives
/// header-only CSVs and an empty list. Returns the files written.
fn write_layout(
    graph: &RetweetGraph,
    seed: u64,
    iterations: usize,
    top: usize,
    out_dir: &Path,
    format: &FormatArg,
) -> anyhow::Result<Vec<String>> {
    let cloud = if graph.is_empty() {
        PointCloud::with_labels(Vec::new(), Vec::new())?
    } else {
        layout(graph, seed, iterations)?
    };
    let mut written = Vec::new();
    if format.wants(Format::Csv) {
        emit_cloud(&out_dir.join(LAYOUT_CSV), &cloud)?;
        emit_edges(&out_dir.join(EDGES_CSV), graph)?;
        written.extend([LAYOUT_CSV.to_string(), EDGES_CSV.to_string()]);
    }
    if format.wants(Format::Json) {
        emit_json::<Vec<RetweetedProfile>>(&out_dir.join(TOP_JSON), &top_retweeted(graph, top))?;
        written.push(TOP_JSON.to_string());
    }
    Ok(written)
}

pub fn cmd_classify(a: &ClassifyArgs) -> anyhow::Result<()> {
    let cloud = load_cloud(&a.input)?;
    check_k_max(&cloud, a.k_max as usize)?;
    let diagram = knn_persistence(&cloud, a.k_max as usize)?;
    let report = classify_with(&cloud, &diagram, a.seed, a.n_max as usize)?;
    if a.format.wants(Format::Json) {
        emit_json::<ConstellationReport>(&a.out, &report)?;
    }
    if a.format.wants(Format::Svg) {
        emit_svg(&sibling(&a.out, "svg"), &scatter_svg(&cloud, &report))?;
    }
    Ok(())
}

// ---- pipeline ----

const LAYOUT_CSV: &str = "layout.csv";
const EDGES_CSV: &str = "edges.csv";
const TOP_JSON: &str = "top_retweeted.json";
const REDUCED_CSV: &str = "reduced.csv";
const REDUCTION_JSON: &str = "reduction.json";
const DIAGRAM_JSON: &str = "diagram.json";
const BARCODE_SVG: &str = "barcode.svg";
const REPORT_JSON: &str = "report.json";
const SCATTER_SVG: &str = "scatter.svg";
const POLARIZATION_JSON: &str = "polarization.json";
pub const MANIFEST_JSON: &str = "manifest.json";

pub const STAGES: [&str; 4] = ["layout", "reduce", "ph", "classify"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub tweets: PathBuf,
    pub seed: u64,
    pub target_size: usize,
    pub k_max: usize,
    pub n_max_components: usize,
    pub iterations: usize,
    pub output_dir: PathBuf,
}

impl PipelineConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        for (name, v) in [
            ("target_size", self.target_size),
            ("k_max", self.k_max),
            ("n_max_components", self.n_max_components),
            ("iterations", self.iterations),
        ] {
            if v == 0 {
                return Err(usage(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

impl PipelineArgs {
    pub fn config(&self) -> PipelineConfig {
        PipelineConfig {
            tweets: self.tweets.clone(),
            seed: self.seed,
            target_size: self.target_size as usize,
            k_max: self.k_max as usize,
            n_max_components: self.n_max as usize,
            iterations: self.iterations as usize,
            output_dir: self.out_dir.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Wall-clock times in milliseconds since the Unix epoch. Kept apart from the
/// rest of the manifest, which is otherwise a pure function of the inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_ms: u64,
    pub finished_ms: u64,
    pub stages_ms: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub stages: Vec<StageRecord>,
    pub category: Option<Category>,
    pub timestamps: Timestamps,
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

fn stage_layout(cfg: &PipelineConfig) -> anyhow::Result<Vec<String>> {
    let graph = load_tweets(&cfg.tweets)?;
    if graph.is_empty() {
        bail!(
            "{} contains no tweets; nothing to lay out",
            cfg.tweets.display()
        );
    }
    write_layout(
        &graph,
        cfg.seed,
        cfg.iterations,
        DEFAULT_TOP,
        &cfg.output_dir,
        &FormatArg {
            formats: Vec::new(),
        },
    )
}

fn stage_reduce(cfg: &PipelineConfig) -> anyhow::Result<Vec<String>> {
    let dir = &cfg.output_dir;
    let cloud = load_cloud(&dir.join(LAYOUT_CSV))?;
    let (reduced, report) = reduce_euclidean(&cloud, cfg.target_size);
    emit_cloud(&dir.join(REDUCED_CSV), &reduced)?;
    emit_json::<ReductionReport>(&dir.join(REDUCTION_JSON), &report)?;
    Ok(vec![REDUCED_CSV.into(), REDUCTION_JSON.into()])
}

fn stage_ph(cfg: &PipelineConfig) -> anyhow::Result<Vec<String>> {
    let dir = &cfg.output_dir;
    let cloud = load_cloud(&dir.join(REDUCED_CSV))?;
    check_k_max(&cloud, cfg.k_max)?;
    let diagram = knn_persistence(&cloud, cfg.k_max)?;
    emit_diagram(&dir.join(DIAGRAM_JSON), &diagram)?;
    emit_svg(&dir.join(BARCODE_SVG), &barcode_svg(&diagram))?;
    Ok(vec![DIAGRAM_JSON.into(), BARCODE_SVG.into()])
}

fn stage_classify(cfg: &PipelineConfig) -> anyhow::Result<(Vec<String>, Category)> {
    let dir = &cfg.output_dir;
    let reduced = load_cloud(&dir.join(REDUCED_CSV))?;
    let text = fs::read_to_string(dir.join(DIAGRAM_JSON))?;
    let diagram = PersistenceDiagram::from_json(&text)?;
    let report = classify_with(&reduced, &diagram, cfg.seed, cfg.n_max_components)?;
    emit_json::<ConstellationReport>(&dir.join(REPORT_JSON), &report)?;
    emit_svg(&dir.join(SCATTER_SVG), &scatter_svg(&reduced, &report))?;

    // Polarization is measured on every laid-out user, not only the
    // reduced sample, so that each graph edge has both endpoints assigned.
    let full = load_cloud(&dir.join(LAYOUT_CSV))?;
    let edges_file = fs::File::open(dir.join(EDGES_CSV))?;
    let mut graph = RetweetGraph::default();
    for label in full.labels().unwrap_or_default() {
        graph.add_node(label);
    }
    for (s, t, w) in read_edge_list_csv(edges_file)? {
        graph.add_edge(&s, &t, w);
    }
    let assignment = assign_labels(&report.fit, &full)?;
    let summary = polarization_summary(&report, Some(&graph), &assignment)?;
    emit_json::<PolarizationSummary>(&dir.join(POLARIZATION_JSON), &summary)?;
    Ok((
        vec![
            REPORT_JSON.into(),
            SCATTER_SVG.into(),
            POLARIZATION_JSON.into(),
        ],
        report.category,
    ))
}

/// Runs the four stages, writing the manifest whether or not they succeed.
/// Returns the manifest on success; on failure the error names the stage.
pub fn cmd_pipeline(cfg: &PipelineConfig) -> anyhow::Result<Manifest> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    let started_ms = now_ms();
    let mut stages_ms = BTreeMap::new();
    let mut stages = Vec::new();
    let mut category = None;
    let mut failure: Option<anyhow::Error> = None;

    for name in STAGES {
        if failure.is_some() {
            stages.push(StageRecord {
                name: name.into(),
                status: StageStatus::Skipped,
                outputs: Vec::new(),
                error: None,
            });
            continue;
        }
        let result = match name {
            "layout" => stage_layout(cfg),
            "reduce" => stage_reduce(cfg),
            "ph" => stage_ph(cfg),
            _ => stage_classify(cfg).map(|(outputs, c)| {
                category = Some(c);
                outputs
            }),
        };
        stages_ms.insert(name.to_string(), now_ms());
        match result {
            Ok(outputs) => stages.push(StageRecord {
                name: name.into(),
                status: StageStatus::Ok,
                outputs,
                error: None,
            }),
            Err(e) => {
                stages.push(StageRecord {
                    name: name.into(),
                    status: StageStatus::Failed,
                    outputs: Vec::new(),
                    error: Some(format!("{e:#}")),
                });
                failure = Some(e.context(format!("pipeline stage `{name}` failed")));
            }
        }
    }

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config: cfg.clone(),
        stages,
        category,
        timestamps: Timestamps {
            started_ms,
            finished_ms: now_ms(),
            stages_ms,
        },
    };
    emit_json(&cfg.output_dir.join(MANIFEST_JSON), &manifest)?;
    match failure {
        Some(e) => Err(e),
        None => Ok(manifest),
    }
}
