//! The stepwise pipeline: load, rank, select, evaluate. Each step has a
//! function returning in-memory results and a `cmd_*` wrapper that writes
//! the step's artifacts under the configured output directory.
//!
//! Output layout:
//!
//! ```text
//! config.json                resolved configuration
//! discretizer.txt            cut points per continuous feature
//! ranked_<method>.csv        full ranking per filter
//! top_features.csv           retained head of every ranking
//! selection.txt              vote counts and the selected set
//! eval/<tag>/report.json     config, per-fold matrices, pooled metrics, timings
//! eval/<tag>/summary.csv     one comparison-table row
//! eval/<tag>/confusion.csv   per-fold and pooled matrices
//! eval/<tag>/trees/fold_NN.txt
//! summary.csv                every evaluated row (pipeline only)
//! timings.json               stage timings (pipeline and rank)
//! ```
//!
//! Only `report.json`, `summary.csv` and `timings.json` contain timings;
//! every other file is byte-identical across runs with the same config.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use emffs_core::ensemble::{combine_counts, emffs_select, ensemble_select};
use emffs_core::evaluation::{Clock, CrossValidation};
use emffs_core::filters::{discrete_scores, rank_positional};
use emffs_core::{
    apply_discretizer, cross_validate, stratified_sample, top_fraction, Dataset, DiscretizationModel, FilterMethod,
    MetricsReport, RankedFeatureList, Schema, SelectedFeatureSet,
};

use crate::config::{DataFormat, Discretizer, RunConfig};
use crate::report::{write_confusion_csv, write_summary_csv, EvaluationReport, Timings};
use crate::{arff, formats, nslkdd, parallel};

/// Seconds since construction, from a monotonic clock.
#[derive(Debug, Clone, Copy)]
pub struct WallClock(Instant);

impl WallClock {
    pub fn start() -> Self {
        WallClock(Instant::now())
    }
}

impl Clock for WallClock {
    fn now_secs(&self) -> f64 {
        self.0.elapsed().as_secs_f64()
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, start.elapsed().as_secs_f64()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}

/// Parses the configured file, binarizes its labels and draws the
/// stratified subsample when one is requested.
pub fn load(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg.data_path()?;
    let format = cfg.format.unwrap_or_else(|| DataFormat::infer(path));
    let raw = match format {
        DataFormat::Csv => nslkdd::read_csv_path(path),
        DataFormat::Arff => arff::read_arff_path(path),
    }
    .with_context(|| format!("loading {}", path.display()))?;
    let d = raw.binarize_labels();
    let d = match cfg.sample_fraction {
        Some(fr) if fr < 1.0 => stratified_sample(&d, fr, cfg.seed)?,
        _ => d,
    };
    let counts = d.class_counts();
    log::info!("loaded {} instances ({} normal, {} anomaly)", d.len(), counts[0], counts[1]);
    Ok(d)
}

#[derive(Debug, Clone)]
pub struct Ranking {
    pub discretizer: DiscretizationModel,
    /// In the configured filter order.
    pub lists: Vec<RankedFeatureList>,
    pub discretize_secs: f64,
    pub rank_secs: Vec<(String, f64)>,
}

/// Scores and ranks every feature with each configured filter.
pub fn rank(d: &Dataset, cfg: &RunConfig) -> Result<Ranking> {
    let needs_bins = cfg.filters.iter().any(|m| m.needs_discretization());
    let ((discretizer, binned), discretize_secs) = timed(|| {
        let model = match cfg.discretizer {
            Discretizer::Mdl => parallel::fit_mdl_discretizer(d)?,
        };
        let binned = if needs_bins { Some(apply_discretizer(&model, d)?) } else { None };
        Ok((model, binned))
    })?;
    let mut lists = Vec::with_capacity(cfg.filters.len());
    let mut rank_secs = Vec::with_capacity(cfg.filters.len());
    for &method in &cfg.filters {
        let (list, secs) = timed(|| {
            let scores = match method {
                FilterMethod::ReliefF => parallel::relieff_weights(d, &cfg.relieff())?,
                _ => discrete_scores(method, binned.as_ref().expect("discretized data"))?,
            };
            Ok(rank_positional(method, &scores)?)
        })
        .with_context(|| format!("ranking with {method}"))?;
        log::info!("{method}: ranked {} features in {secs:.3} s", list.len());
        lists.push(list);
        rank_secs.push((method.name().to_string(), secs));
    }
    Ok(Ranking {
        discretizer,
        lists,
        discretize_secs,
        rank_secs,
    })
}

pub fn ranked_path(out: &Path, method: FilterMethod) -> PathBuf {
    out.join(format!("ranked_{}.csv", method.name()))
}

pub fn write_ranking(out: &Path, schema: &Schema, r: &Ranking, cfg: &RunConfig) -> Result<()> {
    let mut w = create(&out.join("discretizer.txt"))?;
    formats::write_discretizer(&r.discretizer, &mut w)?;
    for list in &r.lists {
        let mut w = create(&ranked_path(out, list.method))?;
        formats::write_ranked_csv(list, schema, &mut w)?;
    }
    let mut w = create(&out.join("top_features.csv"))?;
    formats::write_top_table(&r.lists, schema.len(), cfg.split_fraction, &mut w)?;
    Ok(())
}

pub fn write_config(out: &Path, cfg: &RunConfig) -> Result<()> {
    write_text(&out.join("config.json"), &cfg.to_json())
}

pub fn write_selection(out: &Path, schema: &Schema, sel: &SelectedFeatureSet) -> Result<()> {
    let mut w = create(&out.join("selection.txt"))?;
    formats::write_selection(sel, schema, &mut w)?;
    Ok(())
}

/// Cross-validates a tree on `features`, timing each fold's training with
/// the wall clock.
pub fn evaluate(d: &Dataset, features: &[usize], cfg: &RunConfig, tag: &str) -> Result<CrossValidation> {
    if features.is_empty() {
        bail!("empty feature set for `{tag}`");
    }
    let cv = cross_validate(d, features, cfg.folds, cfg.seed, &cfg.tree, tag, &WallClock::start())
        .with_context(|| format!("cross-validating `{tag}`"))?;
    let r = &cv.report;
    log::info!(
        "{tag}: {} features, accuracy {:?}, mean build {:.3} s",
        features.len(),
        r.accuracy.value(),
        r.build_time_secs
    );
    Ok(cv)
}

pub fn write_evaluation(
    out: &Path,
    cfg: &RunConfig,
    features: &[usize],
    cv: &CrossValidation,
    timings: Timings,
) -> Result<()> {
    let dir = out.join("eval").join(&cv.report.method);
    let report = EvaluationReport::new(cfg, features, cv, timings);
    write_text(&dir.join("report.json"), &report.to_json())?;
    let mut w = create(&dir.join("summary.csv"))?;
    write_summary_csv(std::slice::from_ref(&cv.report), &mut w)?;
    let mut w = create(&dir.join("confusion.csv"))?;
    write_confusion_csv(cv, &mut w)?;
    for f in &cv.folds {
        let mut w = create(&dir.join("trees").join(format!("fold_{:02}.txt", f.fold)))?;
        formats::write_tree(&f.tree, &mut w)?;
    }
    Ok(())
}

fn write_timings(out: &Path, t: &Timings) -> Result<()> {
    let mut s = serde_json::to_string_pretty(t)?;
    s.push('\n');
    write_text(&out.join("timings.json"), &s)
}

/// Loads, ranks and writes the rankings.
pub fn cmd_rank(cfg: &RunConfig) -> Result<Ranking> {
    let cfg = &cfg.clone().resolved();
    cfg.validate()?;
    write_config(&cfg.out, cfg)?;
    let (d, load_secs) = timed(|| load(cfg))?;
    let r = rank(&d, cfg)?;
    write_ranking(&cfg.out, d.schema(), &r, cfg)?;
    write_timings(
        &cfg.out,
        &Timings {
            load_secs: Some(load_secs),
            discretize_secs: Some(r.discretize_secs),
            rank_secs: r.rank_secs.clone(),
            ..Timings::default()
        },
    )?;
    Ok(r)
}

/// Votes over ranked-list files. Each list must rank the same features;
/// the filters are taken from the files and an unset threshold becomes
/// `min(3, number of files)`.
pub fn cmd_select(cfg: &RunConfig, ranked: &[PathBuf]) -> Result<SelectedFeatureSet> {
    if ranked.is_empty() {
        bail!("at least one ranked list is required");
    }
    let schema = Schema::nsl_kdd();
    let lists = ranked
        .iter()
        .map(|p| {
            let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
            formats::read_ranked_csv(BufReader::new(file), &schema).with_context(|| format!("reading {}", p.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reference: Vec<usize> = lists[0].features().collect();
    reference.sort_unstable();
    for (list, path) in lists.iter().zip(ranked).skip(1) {
        let mut f: Vec<usize> = list.features().collect();
        f.sort_unstable();
        if f != reference {
            bail!("{} ranks a different feature set than {}", path.display(), ranked[0].display());
        }
    }
    let mut cfg = cfg.clone();
    cfg.filters = lists.iter().map(|l| l.method).collect();
    let cfg = cfg.resolved();
    cfg.validate()?;
    let subsets = lists
        .iter()
        .map(|l| top_fraction(l, reference.len(), cfg.split_fraction))
        .collect::<emffs_core::Result<Vec<_>>>()?;
    let sel = ensemble_select(&combine_counts(&subsets), &cfg.ensemble())?;
    write_config(&cfg.out, &cfg)?;
    write_selection(&cfg.out, &schema, &sel)?;
    Ok(sel)
}

/// Where `evaluate` takes its features from.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureSource {
    Selection(PathBuf),
    List(Vec<usize>),
    All,
}

impl FeatureSource {
    pub fn resolve(&self, schema: &Schema) -> Result<Vec<usize>> {
        let mut f = match self {
            FeatureSource::Selection(p) => {
                let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
                formats::read_selection(BufReader::new(file), schema)
                    .with_context(|| format!("reading {}", p.display()))?
                    .features
            }
            FeatureSource::List(f) => f.clone(),
            FeatureSource::All => schema.indices().collect(),
        };
        for &i in &f {
            schema.get(i)?;
        }
        f.sort_unstable();
        f.dedup();
        Ok(f)
    }
}

/// Cross-validates one feature set and writes its report under
/// `eval/<tag>/`.
pub fn cmd_evaluate(cfg: &RunConfig, source: &FeatureSource, tag: &str) -> Result<CrossValidation> {
    let cfg = &cfg.clone().resolved();
    cfg.validate()?;
    let features = source.resolve(&Schema::nsl_kdd())?;
    if features.is_empty() {
        bail!("empty feature set");
    }
    write_config(&cfg.out, cfg)?;
    let (d, load_secs) = timed(|| load(cfg))?;
    let (cv, secs) = timed(|| evaluate(&d, &features, cfg, tag))?;
    write_evaluation(
        &cfg.out,
        cfg,
        &features,
        &cv,
        Timings {
            load_secs: Some(load_secs),
            evaluate_secs: Some(secs),
            ..Timings::default()
        },
    )?;
    Ok(cv)
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub ranking: Ranking,
    pub selection: SelectedFeatureSet,
    /// Optional full-set row, one row per filter, then the ensemble row.
    pub rows: Vec<MetricsReport>,
}

/// Rank, select and evaluate every row of the comparison table.
pub fn cmd_pipeline(cfg: &RunConfig) -> Result<PipelineOutcome> {
    let cfg = &cfg.clone().resolved();
    cfg.validate()?;
    write_config(&cfg.out, cfg)?;
    let (d, load_secs) = timed(|| load(cfg)).context("load stage")?;
    let schema = d.shared_schema();
    let n = schema.len();

    let ranking = rank(&d, cfg).context("rank stage")?;
    write_ranking(&cfg.out, &schema, &ranking, cfg)?;

    let (selection, select_secs) =
        timed(|| Ok(emffs_select(&ranking.lists, n, &cfg.ensemble())?)).context("select stage")?;
    write_selection(&cfg.out, &schema, &selection)?;
    if selection.is_empty() {
        bail!("select stage: no feature reached threshold {}", selection.threshold);
    }

    let mut jobs: Vec<(String, Vec<usize>)> = Vec::new();
    if cfg.full_set {
        jobs.push(("full_set".into(), schema.indices().collect()));
    }
    for list in &ranking.lists {
        let mut head: Vec<usize> = top_fraction(list, n, cfg.split_fraction)?.features.into_iter().collect();
        head.sort_unstable();
        jobs.push((list.method.name().to_string(), head));
    }
    jobs.push(("emffs".into(), selection.features.clone()));

    let mut rows = Vec::with_capacity(jobs.len());
    for (tag, features) in &jobs {
        let (cv, secs) = timed(|| evaluate(&d, features, cfg, tag)).context("evaluate stage")?;
        write_evaluation(
            &cfg.out,
            cfg,
            features,
            &cv,
            Timings {
                evaluate_secs: Some(secs),
                ..Timings::default()
            },
        )?;
        rows.push(cv.report);
    }
    let mut w = create(&cfg.out.join("summary.csv"))?;
    write_summary_csv(&rows, &mut w)?;
    write_timings(
        &cfg.out,
        &Timings {
            load_secs: Some(load_secs),
            discretize_secs: Some(ranking.discretize_secs),
            rank_secs: ranking.rank_secs.clone(),
            select_secs: Some(select_secs),
            evaluate_secs: None,
        },
    )?;
    Ok(PipelineOutcome {
        ranking,
        selection,
        rows,
    })
}
