//! Minimum-distance selection among candidate histograms.
//!
//! For candidates `p_i`, `p_j` on a common grid the Scheffé set
//! `A_ij = {p_i > p_j}` is a union of bins. Candidate `i` is scored by
//! `Δ_i = max_{j≠i} |P_i(A_ij) − μ_n(A_ij)|` where `μ_n` is the empirical
//! measure, and the minimizer is returned. The selected density satisfies
//! `‖p̂ − f‖₁ ≤ 3 min_i ‖p_i − f‖₁ + 4 sup_A |μ_n(A) − P_f(A)|`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::histogram::{bin_counts, HistogramDensity, Sample};

/// Non-empty list of histograms sharing `(b, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    candidates: Vec<HistogramDensity>,
}

impl CandidateSet {
    pub fn new(candidates: Vec<HistogramDensity>) -> Result<Self> {
        let first = candidates.first().ok_or(Error::Empty("candidate set"))?;
        let (b, d) = (first.bins(), first.dim());
        if let Some(bad) = candidates.iter().find(|c| c.bins() != b || c.dim() != d) {
            return Err(Error::ShapeMismatch {
                expected: vec![b; d],
                actual: vec![bad.bins(); bad.dim()],
            });
        }
        Ok(Self { candidates })
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn get(&self, i: usize) -> &HistogramDensity {
        &self.candidates[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &HistogramDensity> {
        self.candidates.iter()
    }
}

/// Bins where `p_i` has strictly more weight than `p_j`.
pub fn scheffe_set(p_i: &HistogramDensity, p_j: &HistogramDensity) -> Result<Vec<bool>> {
    if p_i.bins() != p_j.bins() || p_i.dim() != p_j.dim() {
        return Err(Error::ShapeMismatch {
            expected: vec![p_i.bins(); p_i.dim()],
            actual: vec![p_j.bins(); p_j.dim()],
        });
    }
    Ok(p_i
        .weights()
        .as_slice()
        .iter()
        .zip(p_j.weights().as_slice())
        .map(|(a, b)| a > b)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub index: usize,
    /// `Δ_i` per candidate; empty when there is a single candidate.
    pub deltas: Vec<f64>,
}

pub fn select_density(candidates: &CandidateSet, sample: &Sample) -> Result<Selection> {
    if sample.is_empty() {
        return Err(Error::Empty("sample"));
    }
    let m = candidates.len();
    if m == 1 {
        return Ok(Selection {
            index: 0,
            deltas: Vec::new(),
        });
    }
    let first = candidates.get(0);
    if sample.dim() != first.dim() {
        return Err(Error::ShapeMismatch {
            expected: vec![first.dim()],
            actual: vec![sample.dim()],
        });
    }
    let n = sample.len() as f64;
    let empirical: Vec<f64> = bin_counts(sample, first.bins())?
        .into_iter()
        .map(|c| c as f64 / n)
        .collect();

    let mut deltas = vec![0.0f64; m];
    for (i, delta) in deltas.iter_mut().enumerate() {
        let wi = candidates.get(i).weights().as_slice();
        for j in (0..m).filter(|&j| j != i) {
            let wj = candidates.get(j).weights().as_slice();
            let mut model_mass = 0.0;
            let mut data_mass = 0.0;
            for ((&a, &b), &e) in wi.iter().zip(wj).zip(&empirical) {
                if a > b {
                    model_mass += a;
                    data_mass += e;
                }
            }
            *delta = delta.max(libm::fabs(model_mass - data_mass));
        }
    }
    let mut index = 0;
    for (i, &d) in deltas.iter().enumerate() {
        if d < deltas[index] {
            index = i;
        }
    }
    Ok(Selection { index, deltas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::{histogram_from_data, u_map};
    use crate::tensor::{DenseTensor, ProbTensor};

    fn hist(w: &[f64], b: usize, d: usize) -> HistogramDensity {
        let t = DenseTensor::new(vec![b; d], w.to_vec()).unwrap();
        u_map(ProbTensor::new(t).unwrap(), b, d).unwrap()
    }

    #[test]
    fn scheffe_set_examples() {
        let a = hist(&[0.1, 0.2, 0.3, 0.4], 2, 2);
        assert_eq!(scheffe_set(&a, &a).unwrap(), vec![false; 4]);
        let e0 = hist(&[1.0, 0.0, 0.0, 0.0], 2, 2);
        let e3 = hist(&[0.0, 0.0, 0.0, 1.0], 2, 2);
        assert_eq!(
            scheffe_set(&e0, &e3).unwrap(),
            vec![true, false, false, false]
        );
        let other = hist(&[0.5, 0.5], 2, 1);
        assert!(scheffe_set(&a, &other).is_err());
    }

    #[test]
    fn single_candidate_and_empty_inputs() {
        let a = hist(&[0.5, 0.5], 2, 1);
        let set = CandidateSet::new(vec![a.clone()]).unwrap();
        let s = Sample::new(1, vec![0.1]).unwrap();
        assert_eq!(select_density(&set, &s).unwrap().index, 0);
        assert!(select_density(&set, &Sample::new(1, vec![]).unwrap()).is_err());
        assert!(CandidateSet::new(vec![]).is_err());
    }

    #[test]
    fn empirical_histogram_wins_against_far_candidates() {
        let truth = hist(&[0.7, 0.1, 0.1, 0.1], 2, 2);
        let far = hist(&[0.1, 0.1, 0.1, 0.7], 2, 2);
        let s = truth.sample(2000, 4);
        let emp = histogram_from_data(&s, 2).unwrap();
        let set = CandidateSet::new(vec![far, truth, emp]).unwrap();
        let sel = select_density(&set, &s).unwrap();
        assert_ne!(sel.index, 0);
        assert!(sel.deltas.iter().all(|&d| d >= sel.deltas[sel.index]));
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let a = hist(&[0.5, 0.5], 2, 1);
        let set = CandidateSet::new(vec![a.clone(), a.clone(), a]).unwrap();
        let s = Sample::new(1, vec![0.1, 0.2, 0.9]).unwrap();
        let sel = select_density(&set, &s).unwrap();
        assert_eq!(sel.index, 0);
        assert_eq!(sel.deltas, vec![0.0; 3]);
    }
}
