//! Command-line front end. The `zoomlens` binary is a thin wrapper over
//! [`main_with_args`].

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::Command;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate_matrix, crop_set_for, predictions_to_jsonl, AggregateMode, CropPolicy};
use crate::cover::{brute_force_min_cover, greedy_min_cover, CoverInstance, CoverResult};
use crate::error::{Error, Result};
use crate::eval::{
    center_zoom_sweep, per_anchor_upper_bound, random_baseline, reports_to_csv, top1_accuracy,
    upper_bound_accuracy, zoom_group_breakdown, EvalReport,
};
use crate::geometry::{apply_zoom, TransformGrid, CENTER_SWEEP_SCALES, DEFAULT_CROP_SIZE, DEFAULT_SCALES};
use crate::hardset::{
    build_manifest, load_annotations, load_exclusion_list, load_id_list, BuildOptions, SourceInput,
    DEFAULT_EXCLUDED_CLASSES,
};
use crate::image::{decode_file, encode_ppm, write_zib};
use crate::memo::{memo_adapt, MemoConfig, ToyLinearSoftmax};
use crate::mock::{image_ids, mock_center_matrix, mock_crop_matrix, mock_grid_matrix, MockScorerConfig};
use crate::pipeline::run_demo;
use crate::store::{correctness_from_logits, ColumnKind, CorrectnessMatrix, LabelSpace, LabelTable, LogitMatrix};

#[derive(Debug, Parser)]
#[command(name = "zoomlens", version, about = "Zoom-transform grid analysis")]
pub struct Cli {
    /// Worker threads for data-parallel stages.
    #[arg(long, global = true, env = "ZOOMLENS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Transform grid files.
    #[command(subcommand)]
    Grid(GridCmd),
    /// Materialize crops.
    #[command(subcommand)]
    Crops(CropsCmd),
    /// Produce logit or correctness matrices.
    #[command(subcommand)]
    Score(ScoreCmd),
    /// Accuracy reports.
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Minimum transform set cover.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// Fuse a crop set into one prediction per image.
    Aggregate(AggregateArgs),
    /// Test-time adaptation on one image with the toy scorer.
    Memo(MemoArgs),
    /// Hard-benchmark manifests.
    #[command(subcommand)]
    Hardset(HardsetCmd),
    /// Full mock pipeline into one directory.
    Demo(DemoArgs),
}

#[derive(Debug, Subcommand)]
pub enum GridCmd {
    Gen {
        /// Comma-separated scales; defaults to the 36-scale grid.
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<u32>>,
        #[arg(long, default_value_t = DEFAULT_CROP_SIZE)]
        crop_size: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CropFormat {
    Ppm,
    Zib,
}

#[derive(Debug, Subcommand)]
pub enum CropsCmd {
    Apply {
        #[arg(long)]
        image: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        /// Output directory; files are named `t<id>.<ext>`.
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "ppm")]
        format: CropFormat,
        /// Restrict to these transform ids.
        #[arg(long, value_delimiter = ',')]
        ids: Option<Vec<u32>>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MockColumns {
    Grid,
    CenterSweep,
    TenCrop,
}

#[derive(Debug, Subcommand)]
pub enum ScoreCmd {
    /// Seeded stand-in classifier.
    Mock {
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Scorer config JSON (seed, classes, planted rules).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        classes: usize,
        #[arg(long, default_value_t = 16)]
        n_images: usize,
        /// Image list; only the ids are used.
        #[arg(long)]
        images: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "grid")]
        columns: MockColumns,
        /// Also write the matching ground truth.
        #[arg(long)]
        labels_out: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// External scorer via a job file.
    Bridge {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        images: PathBuf,
        /// Executable invoked with the job file path.
        #[arg(long)]
        exe: PathBuf,
        /// Where to write the job file; defaults to `<out>.job.json`.
        #[arg(long)]
        job: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Logits plus labels to correctness bits.
    Correctness {
        #[arg(long)]
        logits: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Correctness matrix (ZPM1).
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value = "dataset")]
    pub dataset: String,
    #[arg(long, value_enum, default_value = "json")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct SubsetArgs {
    /// Comma-separated transform ids.
    #[arg(long, value_delimiter = ',', conflicts_with = "cover")]
    pub subset: Option<Vec<u32>>,
    /// Use the transforms chosen in a cover result.
    #[arg(long)]
    pub cover: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum EvalCmd {
    UpperBound {
        #[command(flatten)]
        m: MatrixArgs,
        #[command(flatten)]
        s: SubsetArgs,
    },
    Top1 {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        id: u32,
    },
    Anchors {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        grid: PathBuf,
        #[command(flatten)]
        s: SubsetArgs,
    },
    Groups {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long)]
        grid: PathBuf,
    },
    /// Top-1 per center-zoom scale.
    Sweep {
        #[command(flatten)]
        m: MatrixArgs,
        #[arg(long, value_delimiter = ',')]
        scales: Option<Vec<u32>>,
    },
    RandomBaseline {
        #[arg(long)]
        crops: usize,
        #[arg(long)]
        classes: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum CoverCmd {
    Greedy {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        stop_after: Option<usize>,
        /// Adds the zoom-group split of the chosen transforms.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive optimum size (small matrices only).
    Oracle {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    #[arg(long)]
    pub logits: PathBuf,
    #[arg(long)]
    pub policy: CropPolicy,
    #[arg(long, default_value = "mean")]
    pub mode: AggregateMode,
    /// Needed by the zoom-group policies.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Cover result restricting the zoom-group crops.
    #[arg(long)]
    pub cover: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MemoArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub k: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub classes: usize,
    /// Seed of the toy scorer's initial parameters.
    #[arg(long, default_value_t = 0)]
    pub init_seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub init_scale: f64,
}

#[derive(Debug, Subcommand)]
pub enum HardsetCmd {
    Build {
        /// `name=matrix.zpm,labels.jsonl`, repeatable.
        #[arg(long = "source", required = true)]
        sources: Vec<String>,
        /// Class names, one per line, in class-index order.
        #[arg(long)]
        label_names: PathBuf,
        #[arg(long)]
        annotations: Option<PathBuf>,
        /// Ids that must pass the annotation merge rule.
        #[arg(long)]
        flagged: Option<PathBuf>,
        /// Ids dropped before annotation.
        #[arg(long)]
        pre_exclude: Option<PathBuf>,
        /// Excluded class names; defaults to the built-in list.
        #[arg(long, conflicts_with = "no_exclusions")]
        exclude_classes: Option<PathBuf>,
        #[arg(long)]
        no_exclusions: bool,
        /// Require every matrix to cover this grid.
        #[arg(long)]
        grid: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out: PathBuf,
}

/// Job file handed to an external scorer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreJob {
    pub version: u32,
    pub grid: serde_json::Value,
    pub images: Vec<JobImage>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobImage {
    pub id: String,
    pub path: PathBuf,
}

pub const JOB_VERSION: u32 = 1;

/// Reads an image list: `id,path` per line, or a bare path whose file stem
/// becomes the id. Blank lines and `#` comments are skipped.
pub fn load_image_list(path: &Path) -> Result<Vec<JobImage>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for line in fs::read_to_string(path)?.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, p) = match line.split_once(',') {
            Some((id, p)) => (id.trim().to_string(), PathBuf::from(p.trim())),
            None => {
                let p = PathBuf::from(line);
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or(line).to_string();
                (stem, p)
            }
        };
        if !seen.insert(id.clone()) {
            return Err(Error::inconsistent(format!("duplicate image id `{id}` in {}", path.display())));
        }
        let path = if p.is_relative() { base.join(p) } else { p };
        out.push(JobImage { id, path });
    }
    Ok(out)
}

/// Writes the job file, runs `exe <job>`, and loads and checks the result.
pub fn run_bridge(grid: &TransformGrid, images: Vec<JobImage>, exe: &Path, job_path: &Path, output: &Path) -> Result<LogitMatrix> {
    let job = ScoreJob { version: JOB_VERSION, grid: serde_json::from_str(&grid.to_json())?, images, output: output.to_path_buf() };
    fs::write(job_path, serde_json::to_string_pretty(&job)?)?;
    let status = Command::new(exe).arg(job_path).status()?;
    if !status.success() {
        return Err(Error::inconsistent(format!("scorer {} exited with {status}", exe.display())));
    }
    let lm = LogitMatrix::load(output)?;
    let axes = lm.axes();
    let want_ids: Vec<String> = job.images.iter().map(|i| i.id.clone()).collect();
    let want_cols: Vec<u32> = (0..grid.len() as u32).collect();
    if axes.image_ids != want_ids || axes.transform_ids != want_cols || axes.column_kind != ColumnKind::Grid {
        return Err(Error::inconsistent(format!(
            "scorer output has {} images x {} transforms, job asked for {} x {}",
            axes.n_images(),
            axes.n_transforms(),
            want_ids.len(),
            want_cols.len()
        )));
    }
    if axes.grid_sha256.as_ref().is_some_and(|sha| *sha != grid.sha256()) {
        return Err(Error::inconsistent("scorer output was produced for a different grid"));
    }
    Ok(lm)
}

fn load_grid(path: &Path) -> Result<TransformGrid> {
    TransformGrid::from_json(&fs::read_to_string(path)?)
}

fn load_cover(path: &Path) -> Result<CoverResult> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

fn subset_ids(s: &SubsetArgs, cm: &CorrectnessMatrix) -> Result<Vec<u32>> {
    match (&s.subset, &s.cover) {
        (Some(ids), _) => Ok(ids.clone()),
        (None, Some(path)) => Ok(load_cover(path)?.chosen),
        (None, None) => Ok(cm.transform_ids().to_vec()),
    }
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => writeln!(stdout, "{}", text.trim_end())?,
    }
    Ok(())
}

fn emit_report(r: EvalReport, format: ReportFormat, stdout: &mut dyn Write) -> Result<()> {
    let text = match format {
        ReportFormat::Json => serde_json::to_string_pretty(&r)?,
        ReportFormat::Csv => reports_to_csv(&[r])?,
    };
    emit(None, &text, stdout)
}

fn run_eval(cmd: EvalCmd, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        EvalCmd::RandomBaseline { crops, classes } => {
            writeln!(stdout, "{:.2}", random_baseline(crops, classes)? * 100.0)?;
        }
        EvalCmd::UpperBound { m, s } => {
            let cm = CorrectnessMatrix::load(&m.matrix)?;
            let ids = subset_ids(&s, &cm)?;
            let value = upper_bound_accuracy(&cm, &ids)?;
            let subset = if s.subset.is_none() && s.cover.is_none() { "all".into() } else { format!("{} transforms", ids.len()) };
            let r = EvalReport { dataset: m.dataset, n_images: cm.n_images(), metric: "upper_bound".into(), value, subset };
            emit_report(r, m.format, stdout)?;
        }
        EvalCmd::Top1 { m, id } => {
            let cm = CorrectnessMatrix::load(&m.matrix)?;
            let value = top1_accuracy(&cm, id)?;
            let r = EvalReport { dataset: m.dataset, n_images: cm.n_images(), metric: "top1".into(), value, subset: format!("id={id}") };
            emit_report(r, m.format, stdout)?;
        }
        EvalCmd::Anchors { m, grid, s } => {
            let cm = CorrectnessMatrix::load(&m.matrix)?;
            let heat = per_anchor_upper_bound(&cm, &load_grid(&grid)?, &subset_ids(&s, &cm)?)?;
            let text = match m.format {
                ReportFormat::Json => serde_json::to_string_pretty(&heat)?,
                ReportFormat::Csv => heat.to_csv(),
            };
            emit(None, &text, stdout)?;
        }
        EvalCmd::Groups { m, grid } => {
            let cm = CorrectnessMatrix::load(&m.matrix)?;
            let b = zoom_group_breakdown(&cm, &load_grid(&grid)?)?;
            let text = match m.format {
                ReportFormat::Json => serde_json::to_string_pretty(&b)?,
                ReportFormat::Csv => {
                    let mut t = String::from("group,solves,only\n");
                    for (g, v) in &b.solves {
                        t.push_str(&format!("{g},{v},{}\n", b.only[g]));
                    }
                    t
                }
            };
            emit(None, &text, stdout)?;
        }
        EvalCmd::Sweep { m, scales } => {
            let cm = CorrectnessMatrix::load(&m.matrix)?;
            let scales = scales.unwrap_or_else(|| CENTER_SWEEP_SCALES.to_vec());
            let sweep = center_zoom_sweep(&cm, &scales)?;
            let text = match m.format {
                ReportFormat::Json => serde_json::to_string_pretty(
                    &sweep.iter().map(|&(scale, top1)| serde_json::json!({"scale": scale, "top1": top1})).collect::<Vec<_>>(),
                )?,
                ReportFormat::Csv => {
                    let mut t = String::from("scale,top1\n");
                    for (s, v) in sweep {
                        t.push_str(&format!("{s},{v}\n"));
                    }
                    t
                }
            };
            emit(None, &text, stdout)?;
        }
    }
    Ok(())
}

fn run_score(cmd: ScoreCmd, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        ScoreCmd::Mock { grid, config, seed, classes, n_images, images, columns, labels_out, out } => {
            let cfg = match config {
                Some(p) => serde_json::from_str(&fs::read_to_string(p)?)?,
                None => MockScorerConfig::new(seed, classes),
            };
            let ids = match images {
                Some(p) => load_image_list(&p)?.into_iter().map(|i| i.id).collect(),
                None => image_ids(n_images),
            };
            let lm = match columns {
                MockColumns::Grid => {
                    let grid = match grid {
                        Some(p) => load_grid(&p)?,
                        None => TransformGrid::default(),
                    };
                    mock_grid_matrix(&cfg, &ids, &grid)?
                }
                MockColumns::CenterSweep => mock_center_matrix(&cfg, &ids, &CENTER_SWEEP_SCALES)?,
                MockColumns::TenCrop => mock_crop_matrix(&cfg, &ids)?,
            };
            lm.save(&out)?;
            if let Some(p) = labels_out {
                cfg.label_table(&ids).save(&p)?;
            }
            writeln!(stdout, "wrote {} ({} x {} x {})", out.display(), ids.len(), lm.axes().n_transforms(), lm.n_classes())?;
        }
        ScoreCmd::Bridge { grid, images, exe, job, out } => {
            let grid = load_grid(&grid)?;
            let job = job.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".job.json");
                PathBuf::from(p)
            });
            let lm = run_bridge(&grid, load_image_list(&images)?, &exe, &job, &out)?;
            writeln!(stdout, "wrote {} ({} x {} x {})", out.display(), lm.axes().n_images(), lm.axes().n_transforms(), lm.n_classes())?;
        }
        ScoreCmd::Correctness { logits, labels, out } => {
            let cm = correctness_from_logits(&LogitMatrix::load(&logits)?, &LabelTable::load(&labels)?)?;
            cm.save(&out)?;
            writeln!(stdout, "wrote {} ({} x {})", out.display(), cm.n_images(), cm.n_transforms())?;
        }
    }
    Ok(())
}

fn parse_source(spec: &str) -> Result<SourceInput> {
    let bad = || Error::InvalidArgument(format!("--source expects name=matrix.zpm,labels.jsonl, got {spec:?}"));
    let (name, rest) = spec.split_once('=').ok_or_else(bad)?;
    let (matrix, labels) = rest.split_once(',').ok_or_else(bad)?;
    if name.is_empty() {
        return Err(bad());
    }
    Ok(SourceInput {
        name: name.to_string(),
        correctness: CorrectnessMatrix::load(Path::new(matrix))?,
        labels: LabelTable::load(Path::new(labels))?,
    })
}

fn run_hardset(cmd: HardsetCmd, stdout: &mut dyn Write) -> Result<()> {
    let HardsetCmd::Build { sources, label_names, annotations, flagged, pre_exclude, exclude_classes, no_exclusions, grid, out } =
        cmd;
    let sources = sources.iter().map(|s| parse_source(s)).collect::<Result<Vec<_>>>()?;
    let space = LabelSpace::load_names(&label_names)?;
    let excluded_classes = match (exclude_classes, no_exclusions) {
        (_, true) => Vec::new(),
        (Some(p), false) => load_exclusion_list(&p)?,
        (None, false) => DEFAULT_EXCLUDED_CLASSES.iter().map(|s| s.to_string()).collect(),
    };
    let opts = BuildOptions {
        flagged: flagged.map(|p| load_id_list(&p)).transpose()?.unwrap_or_default(),
        annotations: annotations.map(|p| load_annotations(&p)).transpose()?.unwrap_or_default(),
        pre_excluded: pre_exclude.map(|p| load_id_list(&p)).transpose()?.unwrap_or_default(),
        excluded_classes,
        grid: grid.map(|p| load_grid(&p)).transpose()?,
    };
    let manifest = build_manifest(&sources, &space, &opts)?;
    fs::write(&out, manifest.to_jsonl()?)?;
    writeln!(stdout, "{}", serde_json::to_string(&manifest.header)?)?;
    Ok(())
}

pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Cmd::Grid(GridCmd::Gen { scales, crop_size, out }) => {
            let grid = TransformGrid::new(scales.unwrap_or_else(|| DEFAULT_SCALES.to_vec()), crop_size)?;
            emit(out.as_deref(), &grid.to_json(), stdout)?;
        }
        Cmd::Crops(CropsCmd::Apply { image, grid, out, format, ids }) => {
            let img = decode_file(&image)?;
            let grid = load_grid(&grid)?;
            let ids = ids.unwrap_or_else(|| (0..grid.len() as u32).collect());
            fs::create_dir_all(&out)?;
            let width = grid.len().to_string().len();
            for &id in &ids {
                let crop = apply_zoom(&img, &grid.get(id)?)?;
                match format {
                    CropFormat::Ppm => fs::write(out.join(format!("t{id:0width$}.ppm")), encode_ppm(&crop))?,
                    CropFormat::Zib => write_zib(&crop, fs::File::create(out.join(format!("t{id:0width$}.zib")))?)?,
                }
            }
            writeln!(stdout, "wrote {} crops to {}", ids.len(), out.display())?;
        }
        Cmd::Score(cmd) => run_score(cmd, stdout)?,
        Cmd::Eval(cmd) => run_eval(cmd, stdout)?,
        Cmd::Cover(CoverCmd::Greedy { matrix, stop_after, grid, out }) => {
            let ci = CoverInstance::from_matrix(&CorrectnessMatrix::load(&matrix)?);
            let mut result = greedy_min_cover(&ci, stop_after);
            if let Some(g) = grid {
                result = result.with_group_split(&load_grid(&g)?)?;
            }
            emit(out.as_deref(), &serde_json::to_string_pretty(&result)?, stdout)?;
        }
        Cmd::Cover(CoverCmd::Oracle { matrix }) => {
            let ci = CoverInstance::from_matrix(&CorrectnessMatrix::load(&matrix)?);
            let size = brute_force_min_cover(&ci)?;
            writeln!(stdout, "{}", serde_json::json!({ "optimum": size, "n_transforms": ci.n_transforms() }))?;
        }
        Cmd::Aggregate(a) => {
            let lm = LogitMatrix::load(&a.logits)?;
            let specs = match a.policy {
                CropPolicy::FiveCrop | CropPolicy::TenCrop => crop_set_for(a.policy, &TransformGrid::default(), &[])?,
                _ => {
                    let grid = a.grid.as_deref().map(load_grid).transpose()?.unwrap_or_default();
                    let cover = match &a.cover {
                        Some(p) => load_cover(p)?.chosen,
                        None => lm.axes().transform_ids.clone(),
                    };
                    crop_set_for(a.policy, &grid, &cover)?
                }
            };
            let preds = aggregate_matrix(&lm, &specs, a.mode)?;
            emit(a.out.as_deref(), &predictions_to_jsonl(&preds)?, stdout)?;
        }
        Cmd::Memo(m) => {
            let img = decode_file(&m.image)?;
            let toy = ToyLinearSoftmax::new(m.classes)?;
            let params = toy.init_params(m.init_seed, m.init_scale);
            let cfg = MemoConfig { k: m.k, steps: m.steps, lr: m.lr, seed: m.seed, ..Default::default() };
            let outcome = memo_adapt(&toy, &params, &img, &cfg)?;
            writeln!(stdout, "{}", serde_json::to_string_pretty(&outcome.report())?)?;
        }
        Cmd::Hardset(cmd) => run_hardset(cmd, stdout)?,
        Cmd::Demo(d) => {
            let summary = run_demo(d.seed, &d.out)?;
            writeln!(stdout, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
    }
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        // the global pool can only be built once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let stdout = std::io::stdout();
    match run(cli, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
