//! Histogram densities on the unit cube.
//!
//! A histogram with `b` bins per axis on `[0,1)^d` is stored as its bin-weight
//! probability tensor; the density on bin `A` is `b^d · w_A`. The map between
//! the two representations is a linear isometry from `ℓ1` to `L1`, so all
//! distances here are computed on the weight tensors.
//!
//! Bin indices are zero-based. Bins are half-open, `[i/b, (i+1)/b)`, except
//! that a coordinate equal to `1.0` falls into the last bin.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::tensor::{DenseTensor, ProbTensor};

/// `n` points in `[0,1]^d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    d: usize,
    points: Vec<f64>,
}

impl Sample {
    pub fn new(d: usize, points: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument(
                "sample dimension must be positive".into(),
            ));
        }
        if points.len() % d != 0 {
            return Err(Error::ShapeMismatch {
                expected: vec![points.len() / d, d],
                actual: vec![points.len()],
            });
        }
        for (i, &v) in points.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfUnitCube {
                    point: i / d,
                    value: v,
                });
            }
        }
        Ok(Self { d, points })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidArgument("ragged sample rows".into()));
        }
        Self::new(d, rows.iter().flatten().copied().collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.d..(i + 1) * self.d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.points.chunks_exact(self.d)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.points
    }

    /// Subsample by row indices.
    pub fn select(&self, rows: &[usize]) -> Sample {
        let mut points = Vec::with_capacity(rows.len() * self.d);
        for &r in rows {
            points.extend_from_slice(self.point(r));
        }
        Sample { d: self.d, points }
    }
}

fn axis_bin(value: f64, b: usize) -> usize {
    let i = libm::floor(value * b as f64) as usize;
    i.min(b - 1)
}

/// Zero-based bin multi-index of `x` on a grid with `b` bins per axis.
pub fn bin_index(x: &[f64], b: usize) -> Result<Vec<usize>> {
    check_bins(b)?;
    x.iter()
        .map(|&v| {
            if (0.0..=1.0).contains(&v) {
                Ok(axis_bin(v, b))
            } else {
                Err(Error::OutOfUnitCube { point: 0, value: v })
            }
        })
        .collect()
}

/// Row-major flat offset of the bin containing `x`; `x` must lie in the cube.
fn flat_bin(x: &[f64], b: usize) -> usize {
    x.iter().fold(0, |acc, &v| acc * b + axis_bin(v, b))
}

fn check_bins(b: usize) -> Result<()> {
    if b == 0 {
        return Err(Error::InvalidArgument(
            "bins per axis must be positive".into(),
        ));
    }
    Ok(())
}

/// Piecewise-constant density on `[0,1)^d` with `b` bins per axis.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramDensity {
    d: usize,
    b: usize,
    weights: ProbTensor,
}

impl HistogramDensity {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bins(&self) -> usize {
        self.b
    }

    pub fn weights(&self) -> &ProbTensor {
        &self.weights
    }

    /// `b^d`, the density of a bin holding all the mass.
    pub fn volume_scale(&self) -> f64 {
        libm::pow(self.b as f64, self.d as f64)
    }

    pub fn uniform(d: usize, b: usize) -> Result<Self> {
        check_bins(b)?;
        u_map(ProbTensor::uniform(vec![b; d])?, b, d)
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.d {
            return Err(Error::ShapeMismatch {
                expected: vec![self.d],
                actual: vec![x.len()],
            });
        }
        let idx = bin_index(x, self.b)?;
        Ok(self.volume_scale() * self.weights.tensor().get(&idx))
    }

    fn check_compatible(&self, other: &HistogramDensity) -> Result<()> {
        if self.d != other.d || self.b != other.b {
            return Err(Error::ShapeMismatch {
                expected: vec![self.b; self.d],
                actual: vec![other.b; other.d],
            });
        }
        Ok(())
    }

    /// `∫ |h₁ − h₂|`, equal to the `ℓ1` distance of the weight tensors.
    pub fn l1_distance(&self, other: &HistogramDensity) -> Result<f64> {
        self.check_compatible(other)?;
        self.weights.tensor().l1_distance(other.weights.tensor())
    }

    /// `∫ h₁ h₂ = b^d Σ_A w₁_A w₂_A`.
    pub fn l2_inner(&self, other: &HistogramDensity) -> Result<f64> {
        self.check_compatible(other)?;
        let s: f64 = self
            .weights
            .as_slice()
            .iter()
            .zip(other.weights.as_slice())
            .map(|(a, b)| a * b)
            .sum();
        Ok(self.volume_scale() * s)
    }

    /// `⟨h, h⟩ − (2/n) Σᵢ h(Xᵢ)`, the squared `L2` distance to the sampling
    /// density up to a constant that does not depend on `h`.
    pub fn empirical_l2_risk(&self, sample: &Sample) -> Result<f64> {
        if sample.is_empty() {
            return Err(Error::Empty("evaluation sample"));
        }
        if sample.dim() != self.d {
            return Err(Error::ShapeMismatch {
                expected: vec![self.d],
                actual: vec![sample.dim()],
            });
        }
        let w = self.weights.as_slice();
        let hits: f64 = sample.iter().map(|x| w[flat_bin(x, self.b)]).sum();
        let mean = self.volume_scale() * hits / sample.len() as f64;
        Ok(self.l2_inner(self)? - 2.0 * mean)
    }

    /// Draws a bin with probability `w_A`, then a point uniformly inside it.
    pub fn sample(&self, n: usize, seed: u64) -> Sample {
        let mut rng = rng_from_seed(seed);
        let sampler = CategoricalSampler::new(self.weights.as_slice());
        let strides = self.weights.tensor().strides().to_vec();
        let mut points = Vec::with_capacity(n * self.d);
        let b = self.b as f64;
        for _ in 0..n {
            let mut flat = sampler.draw(&mut rng);
            for &s in &strides {
                let i = flat / s;
                flat %= s;
                let u: f64 = rng.random();
                points.push(((i as f64 + u) / b).min(1.0));
            }
        }
        Sample { d: self.d, points }
    }
}

/// Inverse-CDF sampling from a finite distribution.
pub(crate) struct CategoricalSampler {
    cumulative: Vec<f64>,
}

impl CategoricalSampler {
    pub(crate) fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub(crate) fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty distribution");
        let u: f64 = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        // zero-weight trailing entries can never be drawn
        let mut i = i.min(self.cumulative.len() - 1);
        while i > 0 && self.cumulative[i] == self.cumulative[i - 1] {
            i -= 1;
        }
        i
    }
}

/// Histogram with weight tensor `t`.
pub fn u_map(t: ProbTensor, b: usize, d: usize) -> Result<HistogramDensity> {
    check_bins(b)?;
    if t.shape().len() != d || t.shape().iter().any(|&e| e != b) {
        return Err(Error::ShapeMismatch {
            expected: vec![b; d],
            actual: t.shape().to_vec(),
        });
    }
    Ok(HistogramDensity { d, b, weights: t })
}

/// Weight tensor of `h`.
pub fn u_inverse(h: &HistogramDensity) -> ProbTensor {
    h.weights.clone()
}

/// Bin counts of `sample` on the `b^d` grid, flattened row-major.
pub fn bin_counts(sample: &Sample, b: usize) -> Result<Vec<usize>> {
    check_bins(b)?;
    let len = b
        .checked_pow(sample.dim() as u32)
        .ok_or_else(|| Error::InvalidArgument("histogram grid too large".into()))?;
    let mut counts = vec![0usize; len];
    for x in sample.iter() {
        counts[flat_bin(x, b)] += 1;
    }
    Ok(counts)
}

/// The standard histogram estimator: bin frequencies of the sample.
pub fn histogram_from_data(sample: &Sample, b: usize) -> Result<HistogramDensity> {
    if sample.is_empty() {
        return Err(Error::Empty("sample"));
    }
    let counts = bin_counts(sample, b)?;
    let n = sample.len() as f64;
    let t = DenseTensor::new(
        vec![b; sample.dim()],
        counts.into_iter().map(|c| c as f64 / n).collect(),
    )?;
    u_map(ProbTensor::new(t)?, b, sample.dim())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn random_prob(d: usize, b: usize, seed: u64) -> ProbTensor {
        let mut rng = rng_from_seed(seed);
        let len = b.pow(d as u32);
        let t =
            DenseTensor::new(vec![b; d], (0..len).map(|_| rng.random::<f64>()).collect()).unwrap();
        ProbTensor::normalize(t).unwrap()
    }

    #[test]
    fn bin_index_examples() {
        assert_eq!(bin_index(&[0.0, 0.0], 2).unwrap(), vec![0, 0]);
        assert_eq!(bin_index(&[1.0, 0.5], 2).unwrap(), vec![1, 1]);
        assert_eq!(bin_index(&[0.49, 0.51], 2).unwrap(), vec![0, 1]);
        assert!(matches!(
            bin_index(&[1.01, 0.5], 2),
            Err(Error::OutOfUnitCube { .. })
        ));
        assert!(bin_index(&[-0.1], 3).is_err());
    }

    #[test]
    fn standard_histogram_examples() {
        let s = Sample::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let h = histogram_from_data(&s, 2).unwrap();
        assert_eq!(h.weights().as_slice(), &[1.0, 0.0, 0.0, 0.0]);

        let s = Sample::from_rows(&[vec![0.7, 0.9], vec![0.6, 0.8], vec![0.99, 0.51]]).unwrap();
        let h = histogram_from_data(&s, 2).unwrap();
        assert_eq!(h.weights().as_slice(), &[0.0, 0.0, 0.0, 1.0]);

        let s = Sample::new(1, vec![0.1, 0.9, 0.2, 0.8]).unwrap();
        let h = histogram_from_data(&s, 2).unwrap();
        assert_eq!(h.weights().as_slice(), &[0.5, 0.5]);

        assert!(histogram_from_data(&Sample::new(2, vec![]).unwrap(), 2).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let u = HistogramDensity::uniform(3, 4).unwrap();
        assert!((u.evaluate(&[0.3, 0.9, 0.0]).unwrap() - 1.0).abs() < 1e-12);
        let e = u_map(ProbTensor::one_hot(vec![2, 2], &[1, 0]).unwrap(), 2, 2).unwrap();
        assert_eq!(e.evaluate(&[0.75, 0.25]).unwrap(), 4.0);
        assert_eq!(e.evaluate(&[0.25, 0.25]).unwrap(), 0.0);
        assert!(e.evaluate(&[0.25, 1.5]).is_err());
    }

    #[test]
    fn u_map_round_trip_and_shape_check() {
        let t = random_prob(3, 4, 1);
        let h = u_map(t.clone(), 4, 3).unwrap();
        assert_eq!(u_inverse(&h), t);
        assert!(u_map(t, 4, 2).is_err());
    }

    #[test]
    fn distances_and_inner_products() {
        let a = u_map(ProbTensor::one_hot(vec![3, 3], &[0, 0]).unwrap(), 3, 2).unwrap();
        let b = u_map(ProbTensor::one_hot(vec![3, 3], &[2, 1]).unwrap(), 3, 2).unwrap();
        assert_eq!(a.l1_distance(&a).unwrap(), 0.0);
        assert_eq!(a.l1_distance(&b).unwrap(), 2.0);
        assert!((a.l2_inner(&a).unwrap() - 9.0).abs() < 1e-12);
        let u = HistogramDensity::uniform(2, 3).unwrap();
        assert!((u.l2_inner(&u).unwrap() - 1.0).abs() < 1e-12);
        let c = HistogramDensity::uniform(2, 4).unwrap();
        assert!(a.l1_distance(&c).is_err());
        assert!(a.l2_inner(&c).is_err());
    }

    #[test]
    fn risk_examples() {
        let u = HistogramDensity::uniform(2, 5).unwrap();
        let s = Sample::from_rows(&[vec![0.1, 0.2], vec![0.9, 1.0]]).unwrap();
        assert!((u.empirical_l2_risk(&s).unwrap() + 1.0).abs() < 1e-12);

        let train = random_prob(2, 4, 9);
        let sample = u_map(train, 4, 2).unwrap().sample(300, 3);
        let h = histogram_from_data(&sample, 4).unwrap();
        let expect: f64 = -16.0 * h.weights().as_slice().iter().map(|w| w * w).sum::<f64>();
        assert!((h.empirical_l2_risk(&sample).unwrap() - expect).abs() < 1e-10);
        assert!(h
            .empirical_l2_risk(&Sample::new(2, vec![]).unwrap())
            .is_err());
    }

    #[test]
    fn one_hot_sampling_stays_in_its_bin() {
        let h = u_map(ProbTensor::one_hot(vec![4, 4], &[2, 3]).unwrap(), 4, 2).unwrap();
        let s = h.sample(500, 7);
        for x in s.iter() {
            assert_eq!(bin_index(x, 4).unwrap(), vec![2, 3]);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_order_invariant_counts() {
        let h = u_map(random_prob(2, 3, 4), 3, 2).unwrap();
        let a = h.sample(200, 5);
        assert_eq!(a, h.sample(200, 5));
        let mut rev: Vec<Vec<f64>> = a.iter().map(<[f64]>::to_vec).collect();
        rev.reverse();
        let b = Sample::from_rows(&rev).unwrap();
        assert_eq!(
            histogram_from_data(&a, 3).unwrap(),
            histogram_from_data(&b, 3).unwrap()
        );
    }

    #[test]
    fn categorical_sampler_skips_zero_weights() {
        let s = CategoricalSampler::new(&[0.0, 0.5, 0.0, 0.5, 0.0]);
        let mut rng = rng_from_seed(1);
        for _ in 0..1000 {
            let i = s.draw(&mut rng);
            assert!(i == 1 || i == 3);
        }
    }
}
