use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use emffs::config::{DataFormat, RunConfig};
use emffs::pipeline::{self, FeatureSource};
use emffs_core::evaluation::Metric;
use emffs_core::{FilterMethod, MetricsReport, Schema, SplitCriterion};

/// Ensemble multi-filter feature selection for NSL-KDD anomaly detection.
#[derive(Parser)]
#[command(name = "emffs", version, about)]
struct Cli {
    /// Log more (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank features with each filter and write the ranked lists.
    Rank(ConfigArgs),
    /// Vote over ranked-list files and write the selected feature set.
    Select {
        /// Ranked-list CSV files written by `rank`.
        #[arg(long, num_args = 1.., required = true)]
        ranked: Vec<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Cross-validate a decision tree on one feature set.
    Evaluate {
        #[command(flatten)]
        features: FeatureArgs,
        /// Name used for the report directory and summary row.
        #[arg(long, default_value = "custom")]
        tag: String,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Rank, select and evaluate every comparison row.
    Pipeline(ConfigArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FeatureArgs {
    /// Selection file written by `select` or `pipeline`.
    #[arg(long)]
    selection: Option<PathBuf>,
    /// Comma-separated 1-based feature indices.
    #[arg(long, value_parser = parse_feature_list)]
    features: Option<FeatureList>,
    /// Every feature.
    #[arg(long)]
    all_features: bool,
}

#[derive(Args)]
struct ConfigArgs {
    /// Start from a config.json written by an earlier run; other flags
    /// override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<DataFormat>,
    /// Stratified subsample fraction in (0, 1].
    #[arg(long)]
    sample_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated filters: info_gain, gain_ratio, chi_squared, relieff.
    #[arg(long, value_delimiter = ',')]
    filters: Option<Vec<FilterMethod>>,
    /// Fraction of each ranking kept before voting.
    #[arg(long)]
    split_fraction: Option<f64>,
    /// Minimum votes for selection (default: min(3, number of filters)).
    #[arg(long)]
    threshold: Option<usize>,
    #[arg(long)]
    relieff_k: Option<usize>,
    /// ReliefF sample count (default: every instance).
    #[arg(long)]
    relieff_m: Option<usize>,
    #[arg(long)]
    criterion: Option<SplitCriterion>,
    /// Pruning confidence in (0, 0.5], or `none`.
    #[arg(long, value_parser = parse_confidence)]
    prune_confidence: Option<Confidence>,
    #[arg(long)]
    min_leaf: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    /// Also evaluate all 41 features in the pipeline summary.
    #[arg(long)]
    full_set: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// One comma-separated value; a bare `Vec` would make clap expect many.
#[derive(Debug, Clone)]
struct FeatureList(Vec<usize>);

fn parse_feature_list(s: &str) -> Result<FeatureList, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| format!("`{t}` is not a feature index")))
        .collect::<Result<_, _>>()
        .map(FeatureList)
}

/// Pruning confidence; `None` disables pruning.
#[derive(Debug, Clone, Copy)]
struct Confidence(Option<f64>);

fn parse_confidence(s: &str) -> Result<Confidence, String> {
    if s.eq_ignore_ascii_case("none") {
        return Ok(Confidence(None));
    }
    s.parse::<f64>()
        .map(|v| Confidence(Some(v)))
        .map_err(|_| format!("`{s}` is neither a number nor `none`"))
}

impl ConfigArgs {
    fn into_config(self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.data {
            c.data = Some(v);
            if self.format.is_none() {
                c.format = None;
            }
        }
        if let Some(v) = self.format {
            c.format = Some(v);
        }
        if let Some(v) = self.sample_fraction {
            c.sample_fraction = Some(v);
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = self.filters {
            c.filters = v;
            if self.threshold.is_none() {
                c.threshold = None;
            }
        }
        if let Some(v) = self.split_fraction {
            c.split_fraction = v;
        }
        if let Some(v) = self.threshold {
            c.threshold = Some(v);
        }
        if let Some(v) = self.relieff_k {
            c.relieff_k = v;
        }
        if let Some(v) = self.relieff_m {
            c.relieff_m = Some(v);
        }
        if let Some(v) = self.criterion {
            c.tree.criterion = v;
        }
        if let Some(Confidence(v)) = self.prune_confidence {
            c.tree.prune_confidence = v;
        }
        if let Some(v) = self.min_leaf {
            c.tree.min_leaf = v;
        }
        if let Some(v) = self.folds {
            c.folds = v;
        }
        if self.full_set {
            c.full_set = true;
        }
        if let Some(v) = self.out {
            c.out = v;
        }
        Ok(c)
    }
}

fn cell(m: &Metric) -> String {
    match m {
        Metric::Defined(v) => format!("{v:.2}%"),
        Metric::Undefined(_) => "n/a".into(),
    }
}

fn print_rows(rows: &[MetricsReport]) {
    println!(
        "{:<12} {:>8} {:>9} {:>9} {:>9} {:>10}",
        "method", "features", "accuracy", "detect", "false_al", "build_s"
    );
    for r in rows {
        println!(
            "{:<12} {:>8} {:>9} {:>9} {:>9} {:>10.3}",
            r.method,
            r.feature_count,
            cell(&r.accuracy),
            cell(&r.detection_rate),
            cell(&r.false_alarm_rate),
            r.build_time_secs
        );
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Rank(args) => {
            let cfg = args.into_config()?;
            let r = pipeline::cmd_rank(&cfg)?;
            let size = cfg.split_size(Schema::nsl_kdd().len());
            for list in &r.lists {
                let head: Vec<String> = list.features().take(size).map(|f| f.to_string()).collect();
                println!("{:<12} {}", list.method.name(), head.join(","));
            }
        }
        Command::Select { ranked, config } => {
            let cfg = config.into_config()?;
            let sel = pipeline::cmd_select(&cfg, &ranked)?;
            let f: Vec<String> = sel.features.iter().map(|f| f.to_string()).collect();
            println!("selected {} features (threshold {}): {}", sel.len(), sel.threshold, f.join(","));
        }
        Command::Evaluate { features, tag, config } => {
            let cfg = config.into_config()?;
            let source = match (features.selection, features.features) {
                (Some(p), _) => FeatureSource::Selection(p),
                (None, Some(FeatureList(list))) => FeatureSource::List(list),
                (None, None) => FeatureSource::All,
            };
            if source.resolve(&Schema::nsl_kdd())?.is_empty() {
                Cli::command()
                    .error(ErrorKind::ValueValidation, "the feature set is empty")
                    .exit();
            }
            let cv = pipeline::cmd_evaluate(&cfg, &source, &tag)?;
            print_rows(std::slice::from_ref(&cv.report));
        }
        Command::Pipeline(args) => {
            let cfg = args.into_config()?;
            let outcome = pipeline::cmd_pipeline(&cfg)?;
            let f: Vec<String> = outcome.selection.features.iter().map(|f| f.to_string()).collect();
            println!("selected: {}", f.join(","));
            print_rows(&outcome.rows);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
