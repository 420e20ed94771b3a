use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nntf_core::decomp::FitOptions;
use nntf_core::models::ModelSpec;

use nntf::config::{ExperimentConfig, InputSource, Reduction, SyntheticKind, SyntheticParams};
use nntf::data::{load_csv, matrix_to_sample, sample_to_matrix, write_csv};
use nntf::experiment::{fit_estimator, run_experiment, Cell, Estimator};
use nntf::formats::{read_histogram, read_model, write_histogram, write_model};
use nntf::reduce::{apply_unit_cube, fit_unit_cube, pca_reduce, random_reduce};
use nntf::report::{render_table, write_outputs};
use nntf::{Error, Result};

/// Tensor-factorized histogram density estimation.
#[derive(Parser)]
#[command(name = "nntf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw samples from a histogram mixture model.
    Synth(SynthArgs),
    /// Reduce the dimension of a CSV dataset.
    Reduce(ReduceArgs),
    /// Fit a histogram estimator to unit-cube data.
    Fit(FitArgs),
    /// Score a fitted histogram on data, or against a model's true density.
    Evaluate(EvaluateArgs),
    /// Run the repeated cross-validated comparison of estimators.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Existing model file; otherwise a model is drawn at random.
    #[arg(long, conflicts_with_all = ["kind", "dim", "components", "bins"])]
    spec: Option<PathBuf>,
    #[arg(long, default_value = "tucker")]
    kind: String,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    components: usize,
    /// Bins per axis of each marginal.
    #[arg(long, default_value_t = 8)]
    bins: usize,
    #[arg(short, long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample CSV to write.
    #[arg(short, long)]
    output: PathBuf,
    /// Where to save the model; defaults to the output path with `.model`.
    #[arg(long)]
    spec_out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value = "pca")]
    method: String,
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also scale every column into [0, 1].
    #[arg(long)]
    unit_cube: bool,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with every value in [0, 1].
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, default_value = "tucker")]
    estimator: String,
    #[arg(long)]
    bins: usize,
    /// Components per mode; ignored by the standard histogram.
    #[arg(long, short = 'k', default_value_t = 1)]
    components: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    histogram: PathBuf,
    /// CSV to compute the empirical L2 risk on.
    #[arg(short, long, required_unless_present = "model")]
    input: Option<PathBuf>,
    /// Model file to compute the exact L1 error against.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// CSV dataset (overrides the config's data source).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Draw data from a random model of this kind.
    #[arg(long, conflicts_with = "input")]
    synthetic: Option<String>,
    #[arg(long)]
    reduction: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long)]
    n_total: Option<usize>,
    #[arg(long)]
    b_max: Option<usize>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Comma-separated subset of standard, tucker, cp.
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<String>>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    rel_tol: Option<f64>,
    /// Directory for runs.tsv and report.tsv.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn synth(a: SynthArgs) -> Result<()> {
    if a.n == 0 {
        return Err(Error::Config("-n must be positive".into()));
    }
    let spec: ModelSpec = match &a.spec {
        Some(path) => read_model(path)?,
        None => SyntheticParams {
            kind: a.kind.parse()?,
            dim: a.dim,
            components: a.components,
            bins: a.bins,
            seed: a.seed,
        }
        .build()?,
    };
    let sample = spec.sample(a.n, a.seed);
    write_csv(&a.output, &sample_to_matrix(&sample), None)?;
    if a.spec.is_none() || a.spec_out.is_some() {
        let spec_path = a
            .spec_out
            .unwrap_or_else(|| a.output.with_extension("model"));
        write_model(&spec_path, &spec)?;
    }
    Ok(())
}

fn reduce(a: ReduceArgs) -> Result<()> {
    let x = load_csv(&a.input)?;
    let mut y = match a.method.parse::<Reduction>()? {
        Reduction::Pca => pca_reduce(&x, a.dim)?.0,
        Reduction::Random => random_reduce(&x, a.dim, a.seed)?.0,
        Reduction::None => x,
    };
    if a.unit_cube {
        y = apply_unit_cube(&y, &fit_unit_cube(&y)?)?;
    }
    write_csv(&a.output, &y, None)
}

fn fit(a: FitArgs) -> Result<()> {
    let sample = matrix_to_sample(&load_csv(&a.input)?)?;
    let estimator: Estimator = a.estimator.parse()?;
    let defaults = FitOptions::default();
    let opts = FitOptions {
        max_iters: a.max_iters.unwrap_or(defaults.max_iters),
        restarts: a.restarts.unwrap_or(defaults.restarts),
        rel_tol: a.rel_tol.unwrap_or(defaults.rel_tol),
        seed: a.seed,
        ..defaults
    };
    opts.validate().map_err(|e| Error::Config(e.to_string()))?;
    if a.bins == 0 {
        return Err(Error::Config("--bins must be positive".into()));
    }
    let cell = Cell {
        b: a.bins,
        k: (estimator != Estimator::Standard).then_some(a.components),
    };
    let h = fit_estimator(&sample, estimator, cell, &opts)?;
    write_histogram(&a.output, &h)
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    let h = read_histogram(&a.histogram)?;
    if let Some(path) = &a.input {
        let sample = matrix_to_sample(&load_csv(path)?)?;
        println!("empirical_l2_risk\t{}", h.empirical_l2_risk(&sample)?);
    }
    if let Some(path) = &a.model {
        let truth = read_model(path)?.true_histogram(h.bins())?;
        println!("l1_error\t{}", h.l1_distance(&truth)?);
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<()> {
    let mut c = match (&a.config, &a.input, &a.synthetic) {
        (Some(path), _, _) => ExperimentConfig::read(path)?,
        (None, Some(p), _) => ExperimentConfig::with_input(InputSource::Csv(p.clone())),
        (None, None, Some(_)) => {
            ExperimentConfig::with_input(InputSource::Synthetic(default_synthetic()))
        }
        (None, None, None) => {
            return Err(Error::Config(
                "give --config, --input or --synthetic".into(),
            ))
        }
    };
    if let Some(p) = a.input {
        c.input = InputSource::Csv(p);
    }
    if let Some(kind) = a.synthetic {
        let kind: SyntheticKind = kind.parse()?;
        c.input = InputSource::Synthetic(match c.input {
            InputSource::Synthetic(p) => SyntheticParams { kind, ..p },
            _ => SyntheticParams {
                kind,
                ..default_synthetic()
            },
        });
    }
    if let Some(r) = a.reduction {
        c.reduction = r.parse()?;
    }
    c.dim = a.dim.or(c.dim);
    c.seed = a.seed.unwrap_or(c.seed);
    c.repetitions = a.repetitions.unwrap_or(c.repetitions);
    c.cv.folds = a.folds.unwrap_or(c.cv.folds);
    c.n_train = a.n_train.unwrap_or(c.n_train);
    c.n_total = a.n_total.unwrap_or(c.n_total);
    c.b_max = a.b_max.or(c.b_max);
    c.k_max = a.k_max.or(c.k_max);
    c.fit.max_iters = a.max_iters.unwrap_or(c.fit.max_iters);
    c.fit.restarts = a.restarts.unwrap_or(c.fit.restarts);
    c.fit.rel_tol = a.rel_tol.unwrap_or(c.fit.rel_tol);
    if let Some(e) = a.estimators {
        c.estimators = e.iter().map(|s| s.trim().parse()).collect::<Result<_>>()?;
    }
    c.validate()?;

    let data = c.load_data()?;
    let outcome = run_experiment(&data, &c.plan(data.dim()))?;
    print!("{}", render_table(&outcome.report));
    if let Some(dir) = &a.out {
        write_outputs(dir, &outcome.runs, &outcome.report)?;
    }
    Ok(())
}

fn default_synthetic() -> SyntheticParams {
    SyntheticParams {
        kind: SyntheticKind::Tucker,
        dim: 3,
        components: 2,
        bins: 8,
        seed: 0,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => synth(a),
        Command::Reduce(a) => reduce(a),
        Command::Fit(a) => fit(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Experiment(a) => experiment(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
