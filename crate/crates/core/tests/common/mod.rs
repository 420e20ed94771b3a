//! Independent reference implementations used as test oracles, plus random
//! instance generators. Nothing here calls the code it checks except through
//! its public evaluation functions.

#![allow(dead_code)]

use nntf_core::histogram::u_map;
use nntf_core::rng::{rng_from_seed, Rng};
use nntf_core::{DenseTensor, HistogramDensity, ProbTensor, Sample};
use rand::Rng as _;

pub fn rng(seed: u64) -> Rng {
    rng_from_seed(seed)
}

/// Euclidean projection onto `{w ≥ 0, Σw = radius}` by trying every support
/// set and keeping the one that satisfies the KKT conditions.
pub fn kkt_simplex(v: &[f64], radius: f64) -> Vec<f64> {
    let m = v.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u32..(1 << m) {
        let support: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let tau = (support.iter().map(|&i| v[i]).sum::<f64>() - radius) / support.len() as f64;
        let inside_ok = support.iter().all(|&i| v[i] - tau >= -1e-12);
        let outside_ok = (0..m)
            .filter(|i| mask >> i & 1 == 0)
            .all(|i| v[i] - tau <= 1e-12);
        if inside_ok && outside_ok {
            let w: Vec<f64> = (0..m)
                .map(|i| if mask >> i & 1 == 1 { (v[i] - tau).max(0.0) } else { 0.0 })
                .collect();
            let dist: f64 = w.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
            if best.as_ref().is_none_or(|(d, _)| dist < *d) {
                best = Some((dist, w));
            }
        }
    }
    best.expect("some support satisfies KKT").1
}

/// Two-sided Wilcoxon signed-rank p-value by listing all `2^n` sign
/// assignments. Midranks come from counting, not sorting.
pub fn wilcoxon_brute_force(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return 1.0;
    }
    // doubled midrank = 2·#smaller + #equal + 1
    let ranks2: Vec<i64> = d
        .iter()
        .map(|x| {
            let smaller = d.iter().filter(|y| y.abs() < x.abs()).count() as i64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as i64;
            2 * smaller + equal + 1
        })
        .collect();
    let total: i64 = ranks2.iter().sum();
    let observed: i64 = ranks2.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| r).sum();
    let dev = (2 * observed - total).abs();
    let mut extreme = 0u64;
    for signs in 0u64..(1 << n) {
        let w: i64 = (0..n).filter(|i| signs >> i & 1 == 1).map(|i| ranks2[i]).sum();
        if (2 * w - total).abs() >= dev {
            extreme += 1;
        }
    }
    extreme as f64 / (1u64 << n) as f64
}

/// Bin-center points of the `b^d` grid, in flat (row-major) order.
pub fn bin_centers(d: usize, b: usize) -> Vec<Vec<f64>> {
    (0..b.pow(d as u32))
        .map(|flat| {
            let mut rest = flat;
            let mut x = vec![0.0; d];
            for j in (0..d).rev() {
                x[j] = ((rest % b) as f64 + 0.5) / b as f64;
                rest /= b;
            }
            x
        })
        .collect()
}

/// Midpoint-rule integral of `f` over the unit cube, exact for functions
/// constant on each bin.
pub fn integrate<F: Fn(&[f64]) -> f64>(d: usize, b: usize, f: F) -> f64 {
    let cell = (b as f64).powi(-(d as i32));
    bin_centers(d, b).iter().map(|x| f(x) * cell).sum()
}

pub fn quadrature_l1(h1: &HistogramDensity, h2: &HistogramDensity) -> f64 {
    integrate(h1.dim(), h1.bins(), |x| {
        (h1.evaluate(x).unwrap() - h2.evaluate(x).unwrap()).abs()
    })
}

pub fn quadrature_inner(h1: &HistogramDensity, h2: &HistogramDensity) -> f64 {
    integrate(h1.dim(), h1.bins(), |x| {
        h1.evaluate(x).unwrap() * h2.evaluate(x).unwrap()
    })
}

/// `∫h² − (2/n) Σ h(Xᵢ)` term by term.
pub fn direct_risk(h: &HistogramDensity, sample: &Sample) -> f64 {
    let norm = quadrature_inner(h, h);
    let mean: f64 = sample.iter().map(|x| h.evaluate(x).unwrap()).sum::<f64>() / sample.len() as f64;
    norm - 2.0 * mean
}

pub fn random_prob_tensor(rng: &mut Rng, shape: Vec<usize>) -> ProbTensor {
    let len: usize = shape.iter().product();
    // sparse-ish: some exact zeros so ties and empty bins show up
    let raw: Vec<f64> = (0..len)
        .map(|_| if rng.random::<f64>() < 0.2 { 0.0 } else { rng.random::<f64>() })
        .collect();
    let raw = if raw.iter().all(|v| *v == 0.0) { vec![1.0; len] } else { raw };
    ProbTensor::normalize(DenseTensor::new(shape, raw).unwrap()).unwrap()
}

pub fn random_histogram(rng: &mut Rng, d: usize, b: usize) -> HistogramDensity {
    u_map(random_prob_tensor(rng, vec![b; d]), b, d).unwrap()
}

pub fn random_sample(rng: &mut Rng, d: usize, n: usize) -> Sample {
    let points: Vec<f64> = (0..n * d).map(|_| rng.random::<f64>()).collect();
    Sample::new(d, points).unwrap()
}

pub fn random_nonnegative(rng: &mut Rng, shape: Vec<usize>) -> DenseTensor {
    let len: usize = shape.iter().product();
    DenseTensor::new(shape, (0..len).map(|_| rng.random::<f64>()).collect()).unwrap()
}

/// Upper `1 − α` quantile of χ² with `df` degrees of freedom
/// (Wilson–Hilferty), given the matching standard-normal quantile `z`.
pub fn chi2_critical(df: usize, z: f64) -> f64 {
    let k = df as f64;
    let c = 2.0 / (9.0 * k);
    k * (1.0 - c + z * c.sqrt()).powi(3)
}

/// Standard-normal quantile for α = 0.001, upper tail.
pub const Z_999: f64 = 3.090_232;

/// Pearson χ² statistic of observed counts against expected probabilities;
/// cells with zero probability must be empty and are skipped.
pub fn chi2_statistic(counts: &[usize], probs: &[f64]) -> (f64, usize) {
    let n: usize = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&c, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            assert_eq!(c, 0, "count in a zero-probability cell");
            continue;
        }
        let e = p * n as f64;
        stat += (c as f64 - e).powi(2) / e;
        cells += 1;
    }
    (stat, cells.saturating_sub(1))
}

/// Counts of one coordinate over `b` equal bins.
pub fn axis_counts(sample: &Sample, axis: usize, b: usize) -> Vec<usize> {
    let mut counts = vec![0; b];
    for x in sample.iter() {
        counts[((x[axis] * b as f64) as usize).min(b - 1)] += 1;
    }
    counts
}

/// Counts over the full `b^d` grid, in flat order.
pub fn grid_counts(sample: &Sample, b: usize) -> Vec<usize> {
    let d = sample.dim();
    let mut counts = vec![0; b.pow(d as u32)];
    for x in sample.iter() {
        let flat = x
            .iter()
            .fold(0, |acc, &c| acc * b + ((c * b as f64) as usize).min(b - 1));
        counts[flat] += 1;
    }
    counts
}

/// `(1 − λ) h + λ g` for histograms on the same grid.
pub fn mix(h: &HistogramDensity, g: &HistogramDensity, lambda: f64) -> HistogramDensity {
    let w: Vec<f64> = h
        .weights()
        .as_slice()
        .iter()
        .zip(g.weights().as_slice())
        .map(|(a, b)| (1.0 - lambda) * a + lambda * b)
        .collect();
    let t = DenseTensor::new(h.weights().shape().to_vec(), w).unwrap();
    u_map(ProbTensor::normalize(t).unwrap(), h.bins(), h.dim()).unwrap()
}

/// Ten candidates around `truth`: the truth itself at a random position and
/// nine mixtures with random histograms at random strengths.
pub fn candidate_family(rng: &mut Rng, truth: &HistogramDensity) -> (Vec<HistogramDensity>, usize) {
    let at = rng.random_range(0..10);
    let candidates = (0..10)
        .map(|i| {
            if i == at {
                truth.clone()
            } else {
                let other = random_histogram(rng, truth.dim(), truth.bins());
                mix(truth, &other, rng.random_range(0.02..1.0))
            }
        })
        .collect();
    (candidates, at)
}
