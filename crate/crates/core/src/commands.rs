//! Command-line interface: argument definitions and command implementations.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::corpus::{load_document, load_manifest, Document, ReadingLevel};
use crate::error::{Error, Result};
use crate::features::lxsm::{normalized_forms, ttr_family};
use crate::features::trad::extract_trad;
use crate::features::{ExtractionMetadata, Extractor};
use crate::hybrid::{check_cv_allowed, fuse, load_soft_labels};
use crate::learn::{
    cross_validate, hyperparameter_search, mdi_importance, permutation_importance,
    spearman_correlation, ImportanceMethod, Model, ModelFile, ModelKind, ModelParams, Tuning,
};
use crate::matrix::{read_matrix, write_matrix, FeatureGroup, FeatureMatrix};

#[derive(Debug, Parser)]
#[command(
    name = "trread",
    version,
    about = "Readability level assessment for annotated Turkish text"
)]
pub struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Log progress (-v) or debug detail (-vv) to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-level document counts, word counts and formula means.
    CorpusStats(CorpusStatsArgs),
    /// Extract a feature matrix from an annotated corpus.
    Extract(ExtractArgs),
    /// Stratified k-fold cross-validation.
    Cv(CvArgs),
    /// Train a model on a whole matrix.
    Train(TrainArgs),
    /// Predict levels with a trained model.
    Predict(PredictArgs),
    /// Feature importance of a trained model.
    Importance(ImportanceArgs),
    /// Spearman correlation of each feature with the level.
    Correlate(CorrelateArgs),
    /// Append soft-label columns to a matrix.
    Fuse(FuseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelArg {
    Rf,
    Logreg,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Rf => ModelKind::Rf,
            ModelArg::Logreg => ModelKind::Logreg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Mdi,
    Permutation,
}

#[derive(Debug, Args, Serialize)]
pub struct CorpusStatsArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Extraction config (formula coefficients).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write corpus_stats.json and corpus_stats.txt here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ExtractArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated groups: TRAD,LXSM,SYNX,MORPH,DISCO or ALL.
    #[arg(long, default_value = "ALL")]
    pub groups: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides morph.seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelChoice {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Model parameters as inline JSON or a path to a JSON file.
    #[arg(long, conflicts_with = "search")]
    pub params: Option<String>,
    /// Random-then-grid search with this many random samples.
    #[arg(long)]
    pub search: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct CvArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[command(flatten)]
    pub model: ModelChoice,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[command(flatten)]
    pub model: ModelChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    /// model.json written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, required_unless_present = "conllu", conflicts_with = "conllu")]
    pub matrix: Option<PathBuf>,
    /// A single annotated document.
    #[arg(long)]
    pub conllu: Option<PathBuf>,
    #[arg(long, requires = "conllu")]
    pub trees: Option<PathBuf>,
    /// Extraction config for --conllu input.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ImportanceArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Evaluation rows (required for permutation importance).
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mdi")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct FuseArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// CSV `doc_id,p_ele,p_int,p_adv`, optionally headed by `# generated: out_of_fold|full_fit`.
    #[arg(long)]
    pub soft_labels: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Reproduction record written beside every output.
#[derive(Serialize)]
struct RunRecord<'a, A: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: Option<u64>,
    args: &'a A,
    config: Option<&'a Config>,
}

fn write_run<A: Serialize>(
    dir: &Path,
    command: &str,
    seed: Option<u64>,
    args: &A,
    config: Option<&Config>,
) -> Result<()> {
    write_json(
        &dir.join("run.json"),
        &RunRecord {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            args,
            config,
        },
    )
}

fn load_config(path: Option<&Path>) -> Result<Config> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

/// `<stem>.meta.json` beside a matrix CSV.
pub fn metadata_path(matrix: &Path) -> PathBuf {
    matrix.with_extension("meta.json")
}

fn read_matrix_file(path: &Path) -> Result<FeatureMatrix> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_matrix(std::io::BufReader::new(file), None)
}

fn read_metadata(matrix: &Path) -> Result<Option<ExtractionMetadata>> {
    let p = metadata_path(matrix);
    if !p.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    Ok(Some(serde_json::from_str(&text)?))
}

fn matrix_csv(matrix: &FeatureMatrix) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_matrix(matrix, &mut buf)?;
    Ok(buf)
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(Error::InvalidArgument("--jobs must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("cannot configure thread pool: {e}")))?;
    }
    match &cli.command {
        Command::CorpusStats(a) => corpus_stats_cmd(a),
        Command::Extract(a) => extract_cmd(a),
        Command::Cv(a) => cv_cmd(a),
        Command::Train(a) => train_cmd(a),
        Command::Predict(a) => predict_cmd(a),
        Command::Importance(a) => importance_cmd(a),
        Command::Correlate(a) => correlate_cmd(a),
        Command::Fuse(a) => fuse_cmd(a),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: ReadingLevel,
    pub documents: usize,
    pub mean_words: f64,
    /// Sample standard deviation (n - 1).
    pub std_words: f64,
    pub mean_atesman: f64,
    pub mean_cetinkaya_uzun: f64,
    pub mean_ttr: f64,
}

/// Per-level summary; levels without documents are omitted.
pub fn corpus_stats(documents: &[Document], config: &Config) -> Result<Vec<LevelStats>> {
    if documents.is_empty() {
        return Err(Error::InvalidArgument("corpus has no documents".into()));
    }
    let mut out = Vec::new();
    for level in ReadingLevel::ALL {
        let docs: Vec<&Document> = documents.iter().filter(|d| d.level == level).collect();
        if docs.is_empty() {
            continue;
        }
        let n = docs.len() as f64;
        let mut words = Vec::with_capacity(docs.len());
        let (mut ates, mut cet, mut ttr) = (0.0, 0.0, 0.0);
        for d in &docs {
            let t = extract_trad(d, &config.formulas)?;
            let forms = normalized_forms(d);
            let types = forms.iter().collect::<std::collections::HashSet<_>>().len();
            words.push(forms.len() as f64);
            ates += t.atesman_score;
            cet += t.cetinkaya_score;
            ttr += ttr_family(types, forms.len())
                .map_err(|e| e.in_doc(&d.doc_id))?
                .ttr;
        }
        let mean_words = words.iter().sum::<f64>() / n;
        let std_words = if docs.len() > 1 {
            (words.iter().map(|w| (w - mean_words).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        out.push(LevelStats {
            level,
            documents: docs.len(),
            mean_words,
            std_words,
            mean_atesman: ates / n,
            mean_cetinkaya_uzun: cet / n,
            mean_ttr: ttr / n,
        });
    }
    Ok(out)
}

pub fn corpus_stats_text(stats: &[LevelStats]) -> String {
    let mut s = format!(
        "{:<6} {:>9} {:>11} {:>10} {:>9} {:>10} {:>8}\n",
        "level", "documents", "mean_words", "std_words", "atesman", "cetinkaya", "ttr"
    );
    for r in stats {
        s.push_str(&format!(
            "{:<6} {:>9} {:>11.2} {:>10.2} {:>9.2} {:>10.2} {:>8.4}\n",
            r.level.code(),
            r.documents,
            r.mean_words,
            r.std_words,
            r.mean_atesman,
            r.mean_cetinkaya_uzun,
            r.mean_ttr
        ));
    }
    s
}

fn corpus_stats_cmd(a: &CorpusStatsArgs) -> Result<()> {
    let config = load_config(a.config.as_deref())?;
    let corpus = load_manifest(&a.manifest)?;
    let stats = corpus_stats(&corpus.documents, &config)?;
    let text = corpus_stats_text(&stats);
    print!("{text}");
    if let Some(out) = &a.out {
        ensure_dir(out)?;
        write_json(&out.join("corpus_stats.json"), &stats)?;
        write_atomic(&out.join("corpus_stats.txt"), text.as_bytes())?;
        write_run(out, "corpus-stats", None, a, Some(&config))?;
    }
    Ok(())
}

fn extract_cmd(a: &ExtractArgs) -> Result<()> {
    let mut config = load_config(a.config.as_deref())?;
    if let Some(seed) = a.seed {
        config.morph.seed = seed;
    }
    let groups = FeatureGroup::parse_list(&a.groups)?;
    let extractor = Extractor::new(config, &groups)?;
    let corpus = load_manifest(&a.manifest)?;
    log::info!("extracting {} documents", corpus.documents.len());
    let extraction = extractor.extract_all(&corpus.documents)?;
    ensure_dir(&a.out)?;
    let matrix_path = a.out.join("features.csv");
    write_atomic(&matrix_path, &matrix_csv(&extraction.matrix)?)?;
    write_json(&metadata_path(&matrix_path), &extraction.metadata)?;
    write_run(
        &a.out,
        "extract",
        Some(extractor.config.morph.seed),
        a,
        Some(&extractor.config),
    )?;
    log::info!(
        "wrote {} rows x {} features",
        extraction.matrix.rows.len(),
        extraction.matrix.n_features()
    );
    Ok(())
}

fn parse_params(kind: ModelKind, text: Option<&str>) -> Result<ModelParams> {
    let Some(text) = text else {
        return Ok(ModelParams::default_for(kind));
    };
    let json = if text.trim_start().starts_with('{') {
        text.to_string()
    } else {
        fs::read_to_string(text).map_err(|e| Error::io(text, e))?
    };
    let bad = |e: serde_json::Error| Error::InvalidArgument(format!("invalid --params: {e}"));
    Ok(match kind {
        ModelKind::Rf => ModelParams::Rf(serde_json::from_str(&json).map_err(bad)?),
        ModelKind::Logreg => ModelParams::Logreg(serde_json::from_str(&json).map_err(bad)?),
    })
}

fn load_checked_matrix(path: &Path) -> Result<FeatureMatrix> {
    let matrix = read_matrix_file(path)?;
    let meta = read_metadata(path)?;
    check_cv_allowed(&matrix.schema, meta.and_then(|m| m.soft_labels))?;
    Ok(matrix)
}

fn cv_cmd(a: &CvArgs) -> Result<()> {
    let matrix = load_checked_matrix(&a.matrix)?;
    let kind: ModelKind = a.model.model.into();
    let tuning = match a.model.search {
        Some(budget) => Tuning::Search { kind, budget },
        None => Tuning::Fixed(parse_params(kind, a.model.params.as_deref())?),
    };
    let report = cross_validate(&matrix, tuning, a.k, a.seed)?;
    ensure_dir(&a.out)?;
    write_json(&a.out.join("cv_report.json"), &report)?;
    write_atomic(&a.out.join("cv_report.txt"), report.to_text().as_bytes())?;
    write_run(&a.out, "cv", Some(a.seed), a, None)?;
    println!(
        "accuracy {:.4}  macro_F1 {:.4}",
        report.aggregate.accuracy, report.aggregate.macro_f1
    );
    Ok(())
}

fn train_cmd(a: &TrainArgs) -> Result<()> {
    let matrix = read_matrix_file(&a.matrix)?;
    let kind: ModelKind = a.model.model.into();
    ensure_dir(&a.out)?;
    let params = match a.model.search {
        Some(budget) => {
            let s = hyperparameter_search(&matrix, kind, budget, a.seed)?;
            write_json(&a.out.join("search_trace.json"), &s)?;
            s.best
        }
        None => parse_params(kind, a.model.params.as_deref())?,
    };
    let file = ModelFile::train(&matrix, &params, a.seed)?;
    write_atomic(
        &a.out.join("model.json"),
        (file.to_json()? + "\n").as_bytes(),
    )?;
    write_run(&a.out, "train", Some(a.seed), a, None)?;
    Ok(())
}

fn predict_cmd(a: &PredictArgs) -> Result<()> {
    let file = ModelFile::load(&a.model)?;
    let (matrix, known_levels) = match (&a.matrix, &a.conllu) {
        (Some(m), _) => (read_matrix_file(m)?, true),
        (None, Some(c)) => {
            let groups = file.schema.groups();
            if groups.contains(&FeatureGroup::Hybrid) {
                return Err(Error::InvalidArgument(
                    "this model uses HYBRID features; predict from a fused matrix instead".into(),
                ));
            }
            let config = load_config(a.config.as_deref())?;
            let extractor = Extractor::new(config, &groups)?;
            let doc_id = c
                .file_stem()
                .map_or("document".into(), |s| s.to_string_lossy().to_string());
            // the level is unknown; the placeholder is not reported
            let doc = load_document(&doc_id, ReadingLevel::Elementary, c, a.trees.as_deref())?;
            (extractor.extract_all(&[doc])?.matrix, false)
        }
        (None, None) => unreachable!("clap requires --matrix or --conllu"),
    };
    let predictions = file.predict(&matrix)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "doc_id",
        "true_level",
        "predicted_level",
        "p_ele",
        "p_int",
        "p_adv",
    ])?;
    for (p, row) in predictions.iter().zip(&matrix.rows) {
        let mut rec = vec![
            p.doc_id.clone(),
            if known_levels {
                row.level.code().to_string()
            } else {
                String::new()
            },
            p.level.code().to_string(),
        ];
        rec.extend(p.probabilities.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    ensure_dir(&a.out)?;
    write_atomic(&a.out.join("predictions.csv"), &bytes)?;
    write_run(&a.out, "predict", None, a, None)?;
    for p in &predictions {
        println!("{}\t{}", p.doc_id, p.level.code());
    }
    Ok(())
}

fn importance_cmd(a: &ImportanceArgs) -> Result<()> {
    let file = ModelFile::load(&a.model)?;
    let names: Vec<String> = file.schema.names().map(str::to_string).collect();
    let report = match a.method {
        MethodArg::Mdi => match &file.model {
            Model::Rf(f) => mdi_importance(f, &names),
            Model::Logreg(_) => {
                return Err(Error::InvalidArgument(
                    "MDI needs a random forest model; use --method permutation".into(),
                ))
            }
        },
        MethodArg::Permutation => {
            let path = a.matrix.as_ref().ok_or_else(|| {
                Error::InvalidArgument(
                    "permutation importance needs --matrix with held-out rows".into(),
                )
            })?;
            let matrix = read_matrix_file(path)?;
            let x = file.design(&matrix)?;
            let mut r = permutation_importance(
                &file.model,
                &x,
                &matrix.labels(),
                &names,
                a.repeats,
                a.seed,
            )?;
            let seen = matrix
                .rows
                .iter()
                .filter(|row| file.training_doc_ids.contains(&row.doc_id))
                .count();
            if seen > 0 {
                log::warn!("{seen} evaluation rows were also used for training");
            }
            r.rows_seen_in_training = Some(seen);
            r
        }
    };
    debug_assert!(matches!(
        (a.method, report.method),
        (MethodArg::Mdi, ImportanceMethod::Mdi)
            | (MethodArg::Permutation, ImportanceMethod::Permutation)
    ));
    ensure_dir(&a.out)?;
    write_json(&a.out.join("importance.json"), &report)?;
    write_atomic(&a.out.join("importance.csv"), report.to_csv()?.as_bytes())?;
    write_atomic(&a.out.join("importance.txt"), report.to_text().as_bytes())?;
    write_run(&a.out, "importance", Some(a.seed), a, None)?;
    Ok(())
}

fn correlate_cmd(a: &CorrelateArgs) -> Result<()> {
    let matrix = read_matrix_file(&a.matrix)?;
    let report = spearman_correlation(&matrix)?;
    let top = report.top(a.top);
    ensure_dir(&a.out)?;
    write_json(&a.out.join("correlation.json"), &report)?;
    write_atomic(&a.out.join("correlation.txt"), top.to_text().as_bytes())?;
    write_run(&a.out, "correlate", None, a, None)?;
    print!("{}", top.to_text());
    Ok(())
}

fn fuse_cmd(a: &FuseArgs) -> Result<()> {
    let matrix = read_matrix_file(&a.matrix)?;
    let labels = load_soft_labels(&a.soft_labels)?;
    let fused = fuse(&matrix, &labels)?;
    let mut meta = read_metadata(&a.matrix)?;
    if let Some(m) = &mut meta {
        m.schema = fused.schema.clone();
        m.groups.push(FeatureGroup::Hybrid);
        m.soft_labels = Some(labels.provenance);
    }
    ensure_dir(&a.out)?;
    let out = a.out.join("features.csv");
    write_atomic(&out, &matrix_csv(&fused)?)?;
    let meta_value = match meta {
        Some(m) => serde_json::to_value(m)?,
        None => serde_json::json!({
            "schema_version": fused.schema.schema_version,
            "schema": fused.schema,
            "soft_labels": labels.provenance,
        }),
    };
    write_json(&metadata_path(&out), &meta_value)?;
    write_run(&a.out, "fuse", None, a, None)?;
    Ok(())
}
