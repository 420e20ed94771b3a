//! Repeated train/test experiments with random-subset cross-validation over
//! the `(b, k)` grid.
//!
//! Every random choice is drawn from a generator derived from the master seed
//! and the index of the unit of work (repetition, fold, grid cell), so the
//! outcome does not depend on how repetitions are scheduled across threads.

use std::fmt;
use std::str::FromStr;

use nntf_core::decomp::{fit_prob_tensor, FitOptions, Method};
use nntf_core::histogram::{histogram_from_data, u_map};
use nntf_core::rng::{derive_seed, derived_rng};
use nntf_core::stats::wilcoxon_signed_rank;
use nntf_core::{HistogramDensity, Sample};
use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Estimator {
    Standard,
    Tucker,
    Cp,
}

impl Estimator {
    pub fn method(self) -> Option<Method> {
        match self {
            Estimator::Standard => None,
            Estimator::Tucker => Some(Method::Tucker),
            Estimator::Cp => Some(Method::Cp),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Standard => "standard",
            Estimator::Tucker => "tucker",
            Estimator::Cp => "cp",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" | "hist" => Ok(Estimator::Standard),
            "tucker" => Ok(Estimator::Tucker),
            "cp" | "parafac" => Ok(Estimator::Cp),
            other => Err(Error::Config(format!(
                "unknown estimator `{other}` (expected standard, tucker or cp)"
            ))),
        }
    }
}

/// Bins per axis `1..=b_max`, components `1..=min(b, k_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub b_max: usize,
    pub k_max: usize,
}

impl Grid {
    /// Defaults by dimension: 15/10 up to d = 3, 12/8 at d = 4, 8/6 beyond.
    pub fn for_dim(d: usize) -> Self {
        match d {
            0..=3 => Grid {
                b_max: 15,
                k_max: 10,
            },
            4 => Grid {
                b_max: 12,
                k_max: 8,
            },
            _ => Grid { b_max: 8, k_max: 6 },
        }
    }

    /// Cells searched for `estimator`, in lexicographic `(b, k)` order.
    pub fn cells(&self, estimator: Estimator) -> Vec<Cell> {
        let mut cells = Vec::new();
        for b in 1..=self.b_max {
            match estimator {
                Estimator::Standard => cells.push(Cell { b, k: None }),
                _ => cells.extend((1..=b.min(self.k_max)).map(|k| Cell { b, k: Some(k) })),
            }
        }
        cells
    }
}

/// One grid point; `k` is `None` for the standard histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub b: usize,
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvParams {
    pub folds: usize,
    pub n_validation: usize,
}

impl Default for CvParams {
    fn default() -> Self {
        Self {
            folds: 80,
            n_validation: 40,
        }
    }
}

/// Fits `estimator` at `cell` to `sample`.
pub fn fit_estimator(
    sample: &Sample,
    estimator: Estimator,
    cell: Cell,
    opts: &FitOptions,
) -> Result<HistogramDensity> {
    let standard = histogram_from_data(sample, cell.b)?;
    fit_from_standard(&standard, estimator, cell, opts)
}

fn fit_from_standard(
    standard: &HistogramDensity,
    estimator: Estimator,
    cell: Cell,
    opts: &FitOptions,
) -> Result<HistogramDensity> {
    match (estimator.method(), cell.k) {
        (None, _) => Ok(standard.clone()),
        (Some(method), Some(k)) => {
            let t = fit_prob_tensor(standard.weights(), k, method, opts)?;
            Ok(u_map(t, standard.bins(), standard.dim())?)
        }
        (Some(_), None) => Err(Error::Config(format!(
            "estimator {estimator} needs a component count"
        ))),
    }
}

/// Seed for the fit at `cell` within the unit seeded by `seed`.
fn cell_seed(seed: u64, cell: Cell) -> u64 {
    derive_seed(seed, (cell.b as u64) << 32 | cell.k.unwrap_or(0) as u64)
}

/// Validation and fitting row indices of fold `fold`: the validation rows
/// are drawn without replacement, the fitting rows are the rest.
pub fn fold_split(
    n: usize,
    n_validation: usize,
    seed: u64,
    fold: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut rng = derived_rng(seed, fold as u64);
    let mut validation = index::sample(&mut rng, n, n_validation).into_vec();
    validation.sort_unstable();
    let mut is_validation = vec![false; n];
    validation.iter().for_each(|&i| is_validation[i] = true);
    let fit = (0..n).filter(|&i| !is_validation[i]).collect();
    (fit, validation)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub best: Cell,
    pub best_risk: f64,
    /// Mean validation risk of every cell, in grid order.
    pub scores: Vec<(Cell, f64)>,
}

/// Random-subset cross-validation: each fold holds out `n_validation`
/// points, fits every cell on the rest and scores it by empirical `L2` risk
/// on the held-out points. The cell with the lowest mean risk wins; ties go
/// to the smaller `b`, then the smaller `k`.
pub fn cross_validate(
    train: &Sample,
    estimator: Estimator,
    grid: &Grid,
    cv: &CvParams,
    opts: &FitOptions,
    seed: u64,
) -> Result<CvResult> {
    let cells = grid.cells(estimator);
    if cells.is_empty() {
        return Err(Error::Config("empty parameter grid".into()));
    }
    if cv.folds == 0 {
        return Err(Error::Config(
            "cross-validation needs at least one fold".into(),
        ));
    }
    if cv.n_validation == 0 || cv.n_validation >= train.len() {
        return Err(Error::Config(format!(
            "cannot hold out {} of {} training points",
            cv.n_validation,
            train.len()
        )));
    }
    let mut totals = vec![0.0; cells.len()];
    for fold in 0..cv.folds {
        let (fit_rows, val_rows) = fold_split(train.len(), cv.n_validation, seed, fold);
        let fit = train.select(&fit_rows);
        let val = train.select(&val_rows);
        let fold_seed = derive_seed(seed, fold as u64);
        let mut standard: Option<HistogramDensity> = None;
        for (total, &cell) in totals.iter_mut().zip(&cells) {
            if standard.as_ref().is_none_or(|h| h.bins() != cell.b) {
                standard = Some(histogram_from_data(&fit, cell.b)?);
            }
            let opts = opts.with_seed(cell_seed(fold_seed, cell));
            let h = fit_from_standard(
                standard.as_ref().expect("just built"),
                estimator,
                cell,
                &opts,
            )?;
            *total += h.empirical_l2_risk(&val)?;
        }
    }
    let folds = cv.folds as f64;
    let scores: Vec<(Cell, f64)> = cells
        .iter()
        .zip(&totals)
        .map(|(&c, &t)| (c, t / folds))
        .collect();
    let (best, best_risk) = scores
        .iter()
        .copied()
        .fold(None, |acc: Option<(Cell, f64)>, (c, r)| match acc {
            Some((_, br)) if br <= r => acc,
            _ => Some((c, r)),
        })
        .expect("non-empty grid");
    Ok(CvResult {
        best,
        best_risk,
        scores,
    })
}

/// Everything the experiment loop needs once the data is in the unit cube.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub n_train: usize,
    pub cv: CvParams,
    pub repetitions: usize,
    pub grid: Grid,
    pub estimators: Vec<Estimator>,
    pub fit: FitOptions,
    pub seed: u64,
}

/// Outcome of one estimator in one repetition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunResult {
    pub repetition: usize,
    pub estimator: Estimator,
    /// Empirical `L2` risk on the held-out rows.
    pub risk: f64,
    pub bins: usize,
    pub components: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary {
    pub estimator: Estimator,
    pub risk: MeanStd,
    pub bins: MeanStd,
    pub components: Option<MeanStd>,
    /// Two-sided Wilcoxon signed-rank p-value against the standard histogram.
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub repetitions: usize,
    pub summaries: Vec<EstimatorSummary>,
}

impl ExperimentReport {
    /// Aggregates per-run results; `runs` must hold every estimator for every
    /// repetition.
    pub fn from_runs(runs: &[RunResult], estimators: &[Estimator]) -> Result<Self> {
        let per = |e: Estimator| -> Vec<&RunResult> {
            let mut v: Vec<&RunResult> = runs.iter().filter(|r| r.estimator == e).collect();
            v.sort_by_key(|r| r.repetition);
            v
        };
        let repetitions = per(estimators[0]).len();
        if repetitions == 0 {
            return Err(Error::Data("no runs to aggregate".into()));
        }
        let standard: Option<Vec<f64>> = estimators
            .contains(&Estimator::Standard)
            .then(|| per(Estimator::Standard).iter().map(|r| r.risk).collect());
        let mut summaries = Vec::with_capacity(estimators.len());
        for &e in estimators {
            let rows = per(e);
            if rows.len() != repetitions {
                return Err(Error::Data(format!(
                    "estimator {e} has {} runs, expected {repetitions}",
                    rows.len()
                )));
            }
            let risks: Vec<f64> = rows.iter().map(|r| r.risk).collect();
            let bins: Vec<f64> = rows.iter().map(|r| r.bins as f64).collect();
            let components = (e != Estimator::Standard).then(|| {
                MeanStd::of(
                    &rows
                        .iter()
                        .map(|r| r.components.unwrap_or(0) as f64)
                        .collect::<Vec<_>>(),
                )
            });
            let p_value = match (&standard, e) {
                (Some(base), e) if e != Estimator::Standard => {
                    Some(wilcoxon_signed_rank(&risks, base)?.p_value)
                }
                _ => None,
            };
            summaries.push(EstimatorSummary {
                estimator: e,
                risk: MeanStd::of(&risks),
                bins: MeanStd::of(&bins),
                components,
                p_value,
            });
        }
        Ok(Self {
            repetitions,
            summaries,
        })
    }

    pub fn summary(&self, estimator: Estimator) -> Option<&EstimatorSummary> {
        self.summaries.iter().find(|s| s.estimator == estimator)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    /// Ordered by repetition, then by estimator as listed in the plan.
    pub runs: Vec<RunResult>,
    pub report: ExperimentReport,
}

fn run_repetition(data: &Sample, plan: &ExperimentPlan, r: usize) -> Result<Vec<RunResult>> {
    let rep_seed = derive_seed(plan.seed, r as u64);
    let mut rng = derived_rng(rep_seed, 0);
    let mut train_rows = index::sample(&mut rng, data.len(), plan.n_train).into_vec();
    train_rows.sort_unstable();
    let mut in_train = vec![false; data.len()];
    train_rows.iter().for_each(|&i| in_train[i] = true);
    let test_rows: Vec<usize> = (0..data.len()).filter(|&i| !in_train[i]).collect();
    let train = data.select(&train_rows);
    let test = data.select(&test_rows);

    let mut out = Vec::with_capacity(plan.estimators.len());
    for (e_idx, &estimator) in plan.estimators.iter().enumerate() {
        let cv_seed = derive_seed(rep_seed, 1 + e_idx as u64);
        let cv = cross_validate(&train, estimator, &plan.grid, &plan.cv, &plan.fit, cv_seed)?;
        let opts = plan
            .fit
            .with_seed(cell_seed(derive_seed(cv_seed, u64::MAX), cv.best));
        let model = fit_estimator(&train, estimator, cv.best, &opts)?;
        out.push(RunResult {
            repetition: r,
            estimator,
            risk: model.empirical_l2_risk(&test)?,
            bins: cv.best.b,
            components: cv.best.k,
        });
    }
    Ok(out)
}

/// Runs `plan.repetitions` independent train/test splits of `data`.
pub fn run_experiment(data: &Sample, plan: &ExperimentPlan) -> Result<ExperimentOutcome> {
    if plan.estimators.is_empty() {
        return Err(Error::Config("no estimators selected".into()));
    }
    if plan.repetitions == 0 {
        return Err(Error::Config("repetitions must be positive".into()));
    }
    if plan.n_train == 0 || plan.cv.n_validation >= plan.n_train {
        return Err(Error::Config(format!(
            "n_cv_validation ({}) must be below n_train ({})",
            plan.cv.n_validation, plan.n_train
        )));
    }
    if data.len() <= plan.n_train {
        return Err(Error::Data(format!(
            "dataset has {} rows; need more than n_train = {}",
            data.len(),
            plan.n_train
        )));
    }
    plan.fit.validate()?;
    let per_rep: Vec<Vec<RunResult>> = (0..plan.repetitions)
        .into_par_iter()
        .map(|r| run_repetition(data, plan, r))
        .collect::<Result<_>>()?;
    let runs: Vec<RunResult> = per_rep.into_iter().flatten().collect();
    let report = ExperimentReport::from_runs(&runs, &plan.estimators)?;
    Ok(ExperimentOutcome { runs, report })
}
