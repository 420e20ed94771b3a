//! Text formats for ground-truth models and fitted histograms.
//!
//! Both are `key = value` files (see [`crate::keyvalue`]); numbers are
//! written in shortest round-trip form so reading back is exact.
//!
//! Model file:
//!
//! ```text
//! model = tucker            # or `multiview`
//! d = 2
//! k = 2
//! mixing = 0.1,0.2,0.3,0.4  # k^d entries, row-major (tucker only)
//! weights = 0.5,0.5         # k entries (multiview only)
//! marginal.0.0 = 0.25,0.75  # bin weights of choice 0 on axis 0
//! marginal.0.1 = ...
//! ```
//!
//! Histogram file:
//!
//! ```text
//! d = 2
//! b = 4
//! weights = ...             # b^d entries, row-major
//! ```

use std::fmt::Write as _;
use std::path::Path;

use nntf_core::histogram::u_map;
use nntf_core::models::{MarginalBank, ModelSpec, MultiViewSpec, TuckerSpec};
use nntf_core::{DenseTensor, HistogramDensity, ProbTensor, ProbVector};

use crate::error::{Error, Result};
use crate::keyvalue::KeyValues;

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn model_to_string(spec: &ModelSpec) -> String {
    let bank = spec.bank();
    let (d, k) = (bank.dim(), bank.components());
    let mut out = String::from("# nntf ground-truth model\n");
    match spec {
        ModelSpec::Tucker(t) => {
            let _ = writeln!(out, "model = tucker\nd = {d}\nk = {k}");
            let _ = writeln!(out, "mixing = {}", join(t.mixing.as_slice()));
        }
        ModelSpec::MultiView(m) => {
            let _ = writeln!(out, "model = multiview\nd = {d}\nk = {k}");
            let _ = writeln!(out, "weights = {}", join(m.weights.as_slice()));
        }
    }
    for j in 0..d {
        for i in 0..k {
            let _ = writeln!(
                out,
                "marginal.{j}.{i} = {}",
                join(bank.marginal(j, i).weights().as_slice())
            );
        }
    }
    out
}

pub fn model_from_keyvalues(kv: &KeyValues) -> Result<ModelSpec> {
    let kind: String = kv.require("model")?;
    let d: usize = kv.require("d")?;
    let k: usize = kv.require("k")?;
    if d == 0 || k == 0 {
        return Err(Error::Config("model needs positive `d` and `k`".into()));
    }
    let mut allowed: Vec<String> = vec!["model".into(), "d".into(), "k".into()];
    let mut axes = Vec::with_capacity(d);
    for j in 0..d {
        let mut axis = Vec::with_capacity(k);
        for i in 0..k {
            let key = format!("marginal.{j}.{i}");
            axis.push(
                kv.list::<f64>(&key)?
                    .ok_or_else(|| Error::Config(format!("model file is missing `{key}`")))?,
            );
            allowed.push(key);
        }
        axes.push(axis);
    }
    let bank = MarginalBank::from_weights(axes)?;
    let spec = match kind.as_str() {
        "tucker" => {
            allowed.push("mixing".into());
            let mixing: Vec<f64> = kv
                .list("mixing")?
                .ok_or_else(|| Error::Config("tucker model needs `mixing`".into()))?;
            let t = DenseTensor::new(vec![k; d], mixing)?;
            ModelSpec::Tucker(TuckerSpec::new(ProbTensor::new(t)?, bank)?)
        }
        "multiview" => {
            allowed.push("weights".into());
            let w: Vec<f64> = kv
                .list("weights")?
                .ok_or_else(|| Error::Config("multiview model needs `weights`".into()))?;
            ModelSpec::MultiView(MultiViewSpec::new(ProbVector::new(w)?, bank)?)
        }
        other => return Err(Error::Config(format!("unknown model kind `{other}`"))),
    };
    let allowed: Vec<&str> = allowed.iter().map(String::as_str).collect();
    kv.reject_unknown(&allowed)?;
    Ok(spec)
}

pub fn read_model(path: &Path) -> Result<ModelSpec> {
    model_from_keyvalues(&KeyValues::read(path)?).map_err(|e| with_path(path, e))
}

/// Model and histogram files are inputs, so anything wrong inside one is a
/// data error.
fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Core(inner) => Error::Data(format!("{}: {inner}", path.display())),
        Error::Config(msg) => Error::Data(format!("{}: {msg}", path.display())),
        other => other,
    }
}

pub fn write_model(path: &Path, spec: &ModelSpec) -> Result<()> {
    std::fs::write(path, model_to_string(spec)).map_err(|e| Error::io(path, e))
}

pub fn histogram_to_string(h: &HistogramDensity) -> String {
    format!(
        "# nntf histogram\nd = {}\nb = {}\nweights = {}\n",
        h.dim(),
        h.bins(),
        join(h.weights().as_slice())
    )
}

pub fn histogram_from_keyvalues(kv: &KeyValues) -> Result<HistogramDensity> {
    kv.reject_unknown(&["d", "b", "weights"])?;
    let d: usize = kv.require("d")?;
    let b: usize = kv.require("b")?;
    let w: Vec<f64> = kv
        .list("weights")?
        .ok_or_else(|| Error::Config("histogram file needs `weights`".into()))?;
    let t = DenseTensor::new(vec![b; d], w)?;
    Ok(u_map(ProbTensor::new(t)?, b, d)?)
}

pub fn read_histogram(path: &Path) -> Result<HistogramDensity> {
    histogram_from_keyvalues(&KeyValues::read(path)?).map_err(|e| with_path(path, e))
}

pub fn write_histogram(path: &Path, h: &HistogramDensity) -> Result<()> {
    std::fs::write(path, histogram_to_string(h)).map_err(|e| Error::io(path, e))
}
