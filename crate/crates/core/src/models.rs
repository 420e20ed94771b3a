//! Ground-truth NNTF densities built from banks of one-dimensional histograms.
//!
//! A [`MultiViewSpec`] is a mixture of `k` product densities; a
//! [`TuckerSpec`] selects one marginal per axis jointly through a `k^d`
//! mixing tensor. Because every marginal is itself a histogram, the exact
//! bin-probability tensor of either model is available at any resolution that
//! refines the marginals' grids.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::histogram::{u_map, CategoricalSampler, HistogramDensity, Sample};
use crate::rng::{rng_from_seed, Rng};
use crate::tensor::{
    cp_reconstruct, tucker_reconstruct, DenseTensor, Matrix, ProbTensor, ProbVector,
};

/// `d` collections of `k` one-dimensional histogram densities.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalBank {
    /// `axes[j][i]` is choice `i` on axis `j`.
    axes: Vec<Vec<HistogramDensity>>,
}

impl MarginalBank {
    pub fn new(axes: Vec<Vec<HistogramDensity>>) -> Result<Self> {
        let k = axes.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(Error::Empty("marginal bank"));
        }
        for axis in &axes {
            if axis.len() != k {
                return Err(Error::InvalidArgument(
                    "every axis needs the same number of marginals".into(),
                ));
            }
            if axis.iter().any(|h| h.dim() != 1) {
                return Err(Error::InvalidArgument(
                    "marginals must be one-dimensional".into(),
                ));
            }
        }
        Ok(Self { axes })
    }

    /// Builds a bank from raw bin-weight vectors, `weights[j][i]`.
    pub fn from_weights(weights: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let axes = weights
            .into_iter()
            .map(|axis| {
                axis.into_iter()
                    .map(|w| {
                        let b = w.len();
                        let t = ProbTensor::new(DenseTensor::new(vec![b], w)?)?;
                        u_map(t, b, 1)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }

    /// Every marginal drawn from a symmetric Dirichlet(1) over `b_true` bins.
    pub fn random(d: usize, k: usize, b_true: usize, rng: &mut Rng) -> Result<Self> {
        let weights = (0..d)
            .map(|_| (0..k).map(|_| dirichlet_one(b_true, rng)).collect())
            .collect();
        Self::from_weights(weights)
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn components(&self) -> usize {
        self.axes[0].len()
    }

    pub fn marginal(&self, axis: usize, choice: usize) -> &HistogramDensity {
        &self.axes[axis][choice]
    }

    /// `b × k` matrix whose column `i` holds marginal `(axis, i)` refined to
    /// `b` bins.
    fn factor(&self, axis: usize, b: usize) -> Result<Matrix> {
        let columns = self.axes[axis]
            .iter()
            .map(|h| refine(h.weights().as_slice(), b))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_columns(&columns)
    }

    fn samplers(&self) -> Vec<Vec<CategoricalSampler>> {
        self.axes
            .iter()
            .map(|axis| {
                axis.iter()
                    .map(|h| CategoricalSampler::new(h.weights().as_slice()))
                    .collect()
            })
            .collect()
    }
}

/// Splits each of the `w.len()` bins evenly into `b / w.len()` sub-bins.
fn refine(w: &[f64], b: usize) -> Result<Vec<f64>> {
    let coarse = w.len();
    if b == 0 || b % coarse != 0 {
        return Err(Error::InvalidArgument(alloc::format!(
            "resolution {b} is not a multiple of the marginal resolution {coarse}"
        )));
    }
    let ratio = b / coarse;
    Ok(w.iter()
        .flat_map(|&v| core::iter::repeat_n(v / ratio as f64, ratio))
        .collect())
}

/// Symmetric Dirichlet(1) draw: normalized standard exponentials.
pub fn dirichlet_one(len: usize, rng: &mut Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len)
        .map(|_| -libm::log(1.0 - rng.random::<f64>()))
        .collect();
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    v
}

fn sample_marginal(h: &HistogramDensity, sampler: &CategoricalSampler, rng: &mut Rng) -> f64 {
    let i = sampler.draw(rng);
    let u: f64 = rng.random();
    ((i as f64 + u) / h.bins() as f64).min(1.0)
}

/// Mixture of `k` product densities.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewSpec {
    pub weights: ProbVector,
    pub bank: MarginalBank,
}

impl MultiViewSpec {
    pub fn new(weights: ProbVector, bank: MarginalBank) -> Result<Self> {
        if weights.len() != bank.components() {
            return Err(Error::ShapeMismatch {
                expected: vec![bank.components()],
                actual: vec![weights.len()],
            });
        }
        Ok(Self { weights, bank })
    }

    pub fn random(d: usize, k: usize, b_true: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let weights = ProbVector::new(dirichlet_one(k, &mut rng))?;
        let bank = MarginalBank::random(d, k, b_true, &mut rng)?;
        Self::new(weights, bank)
    }

    pub fn sample(&self, n: usize, seed: u64) -> Sample {
        let mut rng = rng_from_seed(seed);
        let component = CategoricalSampler::new(self.weights.as_slice());
        let samplers = self.bank.samplers();
        let d = self.bank.dim();
        let mut points = Vec::with_capacity(n * d);
        for _ in 0..n {
            let i = component.draw(&mut rng);
            for (j, axis) in samplers.iter().enumerate() {
                points.push(sample_marginal(
                    self.bank.marginal(j, i),
                    &axis[i],
                    &mut rng,
                ));
            }
        }
        Sample::new(d, points).expect("marginal draws lie in the unit cube")
    }

    pub fn true_weight_tensor(&self, b: usize) -> Result<ProbTensor> {
        let factors = (0..self.bank.dim())
            .map(|j| self.bank.factor(j, b))
            .collect::<Result<Vec<_>>>()?;
        ProbTensor::new(cp_reconstruct(self.weights.as_slice(), &factors)?)
    }
}

/// `d` marginals chosen jointly through a `k^d` mixing tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct TuckerSpec {
    pub mixing: ProbTensor,
    pub bank: MarginalBank,
}

impl TuckerSpec {
    pub fn new(mixing: ProbTensor, bank: MarginalBank) -> Result<Self> {
        let expected = vec![bank.components(); bank.dim()];
        if mixing.shape() != expected.as_slice() {
            return Err(Error::ShapeMismatch {
                expected,
                actual: mixing.shape().to_vec(),
            });
        }
        Ok(Self { mixing, bank })
    }

    pub fn random(d: usize, k: usize, b_true: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_from_seed(seed);
        let mixing = DenseTensor::new(vec![k; d], dirichlet_one(k.pow(d as u32), &mut rng))?;
        let bank = MarginalBank::random(d, k, b_true, &mut rng)?;
        Self::new(ProbTensor::new(mixing)?, bank)
    }

    /// The Tucker form of a multi-view model: mass `w_i` on `(i, …, i)`.
    pub fn diagonal(mv: &MultiViewSpec) -> Result<Self> {
        let d = mv.bank.dim();
        let k = mv.bank.components();
        let mut mixing = DenseTensor::zeros(vec![k; d])?;
        for (i, &w) in mv.weights.as_slice().iter().enumerate() {
            mixing.set(&vec![i; d], w);
        }
        Self::new(ProbTensor::new(mixing)?, mv.bank.clone())
    }

    pub fn sample(&self, n: usize, seed: u64) -> Sample {
        let mut rng = rng_from_seed(seed);
        let selector = CategoricalSampler::new(self.mixing.as_slice());
        let strides = self.mixing.tensor().strides().to_vec();
        let samplers = self.bank.samplers();
        let d = self.bank.dim();
        let mut points = Vec::with_capacity(n * d);
        for _ in 0..n {
            let mut flat = selector.draw(&mut rng);
            for (j, &s) in strides.iter().enumerate() {
                let i = flat / s;
                flat %= s;
                points.push(sample_marginal(
                    self.bank.marginal(j, i),
                    &samplers[j][i],
                    &mut rng,
                ));
            }
        }
        Sample::new(d, points).expect("marginal draws lie in the unit cube")
    }

    pub fn true_weight_tensor(&self, b: usize) -> Result<ProbTensor> {
        let factors = (0..self.bank.dim())
            .map(|j| self.bank.factor(j, b))
            .collect::<Result<Vec<_>>>()?;
        ProbTensor::new(tucker_reconstruct(self.mixing.tensor(), &factors)?)
    }
}

/// Either ground-truth model.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    MultiView(MultiViewSpec),
    Tucker(TuckerSpec),
}

impl ModelSpec {
    pub fn dim(&self) -> usize {
        self.bank().dim()
    }

    pub fn bank(&self) -> &MarginalBank {
        match self {
            ModelSpec::MultiView(s) => &s.bank,
            ModelSpec::Tucker(s) => &s.bank,
        }
    }

    pub fn sample(&self, n: usize, seed: u64) -> Sample {
        match self {
            ModelSpec::MultiView(s) => s.sample(n, seed),
            ModelSpec::Tucker(s) => s.sample(n, seed),
        }
    }

    pub fn true_weight_tensor(&self, b: usize) -> Result<ProbTensor> {
        match self {
            ModelSpec::MultiView(s) => s.true_weight_tensor(b),
            ModelSpec::Tucker(s) => s.true_weight_tensor(b),
        }
    }

    /// Exact model density as a histogram at resolution `b`.
    pub fn true_histogram(&self, b: usize) -> Result<HistogramDensity> {
        u_map(self.true_weight_tensor(b)?, b, self.dim())
    }
}
