//! Experiment configuration: `key = value` files plus command-line overrides.
//!
//! ```text
//! # data: exactly one of `input`, `model`, `synthetic`
//! input = data/mnist.csv
//! reduction = pca          # none | pca | random
//! dim = 3
//! reduction_seed = 0
//!
//! # synthetic = tucker     # tucker | multiview, drawn at random
//! # synthetic_dim = 3
//! # synthetic_components = 2
//! # synthetic_bins = 8
//! # synthetic_seed = 0
//! # n_total = 2000
//!
//! n_train = 200
//! n_cv_validation = 40
//! cv_folds = 80
//! repetitions = 32
//! b_max = 15               # default depends on the data dimension
//! k_max = 10
//! estimators = standard, tucker
//! max_iters = 50
//! rel_tol = 1e-4
//! restarts = 1
//! seed = 0
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use nntf_core::decomp::FitOptions;
use nntf_core::models::{ModelSpec, MultiViewSpec, TuckerSpec};
use nntf_core::rng::derive_seed;
use nntf_core::Sample;

use crate::data::{load_csv, matrix_to_sample};
use crate::error::{Error, Result};
use crate::experiment::{CvParams, Estimator, ExperimentPlan, Grid};
use crate::formats::read_model;
use crate::keyvalue::KeyValues;
use crate::reduce::{apply_unit_cube, fit_unit_cube, pca_reduce, random_reduce};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    None,
    Pca,
    Random,
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Reduction::None),
            "pca" => Ok(Reduction::Pca),
            "random" => Ok(Reduction::Random),
            other => Err(Error::Config(format!(
                "unknown reduction `{other}` (expected none, pca or random)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    Tucker,
    MultiView,
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tucker" => Ok(SyntheticKind::Tucker),
            "multiview" | "cp" => Ok(SyntheticKind::MultiView),
            other => Err(Error::Config(format!(
                "unknown synthetic model `{other}` (expected tucker or multiview)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticParams {
    pub kind: SyntheticKind,
    pub dim: usize,
    pub components: usize,
    pub bins: usize,
    pub seed: u64,
}

impl SyntheticParams {
    pub fn build(&self) -> Result<ModelSpec> {
        let spec = match self.kind {
            SyntheticKind::Tucker => ModelSpec::Tucker(TuckerSpec::random(
                self.dim,
                self.components,
                self.bins,
                self.seed,
            )?),
            SyntheticKind::MultiView => ModelSpec::MultiView(MultiViewSpec::random(
                self.dim,
                self.components,
                self.bins,
                self.seed,
            )?),
        };
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    Csv(PathBuf),
    ModelFile(PathBuf),
    Synthetic(SyntheticParams),
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub input: InputSource,
    /// Rows drawn from a model source.
    pub n_total: usize,
    pub reduction: Reduction,
    pub dim: Option<usize>,
    pub reduction_seed: u64,
    pub n_train: usize,
    pub cv: CvParams,
    pub repetitions: usize,
    pub b_max: Option<usize>,
    pub k_max: Option<usize>,
    pub estimators: Vec<Estimator>,
    pub fit: FitOptions,
    pub seed: u64,
}

/// Solver settings used inside the experiment loop. Much looser than
/// [`FitOptions::default`]: a full run performs millions of fits, and
/// validation risk stops moving long before the objective does.
pub fn experiment_fit_options() -> FitOptions {
    FitOptions {
        max_iters: 50,
        rel_tol: 1e-4,
        restarts: 1,
        ..FitOptions::default()
    }
}

const KEYS: &[&str] = &[
    "input",
    "model",
    "synthetic",
    "synthetic_dim",
    "synthetic_components",
    "synthetic_bins",
    "synthetic_seed",
    "n_total",
    "reduction",
    "dim",
    "reduction_seed",
    "n_train",
    "n_cv_validation",
    "cv_folds",
    "repetitions",
    "b_max",
    "k_max",
    "estimators",
    "max_iters",
    "rel_tol",
    "restarts",
    "epsilon_guard",
    "seed",
];

impl ExperimentConfig {
    pub fn with_input(input: InputSource) -> Self {
        Self {
            input,
            n_total: 2000,
            reduction: Reduction::None,
            dim: None,
            reduction_seed: 0,
            n_train: 200,
            cv: CvParams::default(),
            repetitions: 32,
            b_max: None,
            k_max: None,
            estimators: vec![Estimator::Standard, Estimator::Tucker],
            fit: experiment_fit_options(),
            seed: 0,
        }
    }

    /// Any problem with the file itself is reported as a configuration error.
    pub fn read(path: &Path) -> Result<Self> {
        KeyValues::read(path)
            .and_then(|kv| Self::from_keyvalues(&kv))
            .map_err(|e| match e {
                Error::Config(_) => e,
                other => Error::Config(other.to_string()),
            })
    }

    pub fn from_keyvalues(kv: &KeyValues) -> Result<Self> {
        kv.reject_unknown(KEYS)?;
        let sources = ["input", "model", "synthetic"]
            .iter()
            .filter(|k| kv.raw(k).is_some())
            .count();
        if sources != 1 {
            return Err(Error::Config(
                "exactly one of `input`, `model` or `synthetic` must be set".into(),
            ));
        }
        let input = if let Some(p) = kv.raw("input") {
            InputSource::Csv(p.into())
        } else if let Some(p) = kv.raw("model") {
            InputSource::ModelFile(p.into())
        } else {
            InputSource::Synthetic(SyntheticParams {
                kind: kv.require("synthetic")?,
                dim: kv.get("synthetic_dim")?.unwrap_or(3),
                components: kv.get("synthetic_components")?.unwrap_or(2),
                bins: kv.get("synthetic_bins")?.unwrap_or(8),
                seed: kv.get("synthetic_seed")?.unwrap_or(0),
            })
        };
        let mut c = Self::with_input(input);
        macro_rules! set {
            ($field:expr, $key:literal) => {
                if let Some(v) = kv.get($key)? {
                    $field = v;
                }
            };
        }
        set!(c.n_total, "n_total");
        set!(c.reduction, "reduction");
        c.dim = kv.get("dim")?;
        set!(c.reduction_seed, "reduction_seed");
        set!(c.n_train, "n_train");
        set!(c.cv.n_validation, "n_cv_validation");
        set!(c.cv.folds, "cv_folds");
        set!(c.repetitions, "repetitions");
        c.b_max = kv.get("b_max")?;
        c.k_max = kv.get("k_max")?;
        if let Some(e) = kv.list("estimators")? {
            c.estimators = e;
        }
        set!(c.fit.max_iters, "max_iters");
        set!(c.fit.rel_tol, "rel_tol");
        set!(c.fit.restarts, "restarts");
        set!(c.fit.epsilon_guard, "epsilon_guard");
        set!(c.seed, "seed");
        Ok(c)
    }

    /// Checks everything that does not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n_train", self.n_train),
            ("n_cv_validation", self.cv.n_validation),
            ("cv_folds", self.cv.folds),
            ("repetitions", self.repetitions),
            ("n_total", self.n_total),
        ];
        if let Some((name, _)) = positive.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be positive")));
        }
        if self.cv.n_validation >= self.n_train {
            return Err(Error::Config(format!(
                "n_cv_validation ({}) must be below n_train ({})",
                self.cv.n_validation, self.n_train
            )));
        }
        if self.b_max == Some(0) || self.k_max == Some(0) {
            return Err(Error::Config("grid bounds must be positive".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected".into()));
        }
        let mut seen = self.estimators.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.estimators.len() {
            return Err(Error::Config("estimators listed twice".into()));
        }
        if self.reduction != Reduction::None && self.dim.is_none() {
            return Err(Error::Config("reduction needs `dim`".into()));
        }
        if matches!(
            self.input,
            InputSource::ModelFile(_) | InputSource::Synthetic(_)
        ) && self.reduction != Reduction::None
        {
            return Err(Error::Config(
                "model data already lives in the unit cube; use reduction = none".into(),
            ));
        }
        self.fit
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Loads or generates the data and maps it into the unit cube.
    ///
    /// CSV input is reduced, then scaled with parameters fit on every row.
    /// Model samples are used as drawn.
    pub fn load_data(&self) -> Result<Sample> {
        match &self.input {
            InputSource::Csv(path) => {
                let raw = load_csv(path)?;
                let reduced = match (self.reduction, self.dim) {
                    (Reduction::None, _) => raw,
                    (Reduction::Pca, Some(d)) => pca_reduce(&raw, d)?.0,
                    (Reduction::Random, Some(d)) => random_reduce(&raw, d, self.reduction_seed)?.0,
                    (_, None) => return Err(Error::Config("reduction needs `dim`".into())),
                };
                let params = fit_unit_cube(&reduced)?;
                matrix_to_sample(&apply_unit_cube(&reduced, &params)?)
            }
            InputSource::ModelFile(path) => {
                Ok(read_model(path)?.sample(self.n_total, self.data_seed()))
            }
            InputSource::Synthetic(p) => Ok(p.build()?.sample(self.n_total, self.data_seed())),
        }
    }

    fn data_seed(&self) -> u64 {
        derive_seed(self.seed, u64::MAX)
    }

    pub fn plan(&self, dim: usize) -> ExperimentPlan {
        let default = Grid::for_dim(dim);
        ExperimentPlan {
            n_train: self.n_train,
            cv: self.cv,
            repetitions: self.repetitions,
            grid: Grid {
                b_max: self.b_max.unwrap_or(default.b_max),
                k_max: self.k_max.unwrap_or(default.k_max),
            },
            estimators: self.estimators.clone(),
            fit: self.fit,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::from_keyvalues(&KeyValues::parse(text, Path::new("test.conf"))?)
    }

    #[test]
    fn defaults_follow_the_protocol() {
        let c = parse("synthetic = tucker\n").unwrap();
        assert_eq!(c.n_train, 200);
        assert_eq!(
            c.cv,
            CvParams {
                folds: 80,
                n_validation: 40
            }
        );
        assert_eq!(c.repetitions, 32);
        assert_eq!(c.estimators, vec![Estimator::Standard, Estimator::Tucker]);
        assert_eq!(
            c.plan(3).grid,
            Grid {
                b_max: 15,
                k_max: 10
            }
        );
        assert_eq!(c.plan(5).grid, Grid { b_max: 8, k_max: 6 });
        c.validate().unwrap();
    }

    #[test]
    fn overrides_and_lists() {
        let c = parse("input = x.csv\nreduction = pca\ndim = 4\nestimators = standard, cp\nb_max = 5\nrel_tol = 1e-3\n").unwrap();
        assert_eq!(c.input, InputSource::Csv("x.csv".into()));
        assert_eq!(c.estimators, vec![Estimator::Standard, Estimator::Cp]);
        assert_eq!(c.plan(4).grid, Grid { b_max: 5, k_max: 8 });
        assert_eq!(c.fit.rel_tol, 1e-3);
        c.validate().unwrap();
    }

    #[test]
    fn invalid_configs() {
        assert!(parse("synthetic = tucker\nbins = 3\n").is_err());
        assert!(parse("n_train = 5\n").is_err());
        assert!(parse("input = a.csv\nsynthetic = tucker\n").is_err());
        assert!(parse("synthetic = gaussian\n").is_err());
        let c = parse("synthetic = tucker\nn_train = 40\n").unwrap();
        assert!(c.validate().is_err());
        let c = parse("input = a.csv\nreduction = pca\n").unwrap();
        assert!(c.validate().is_err());
    }
}
