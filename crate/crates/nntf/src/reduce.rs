//! Dimensionality reduction ahead of histogram estimation: projection onto
//! the top principal components, projection onto a fixed random orthonormal
//! basis, and affine scaling into the unit cube.

use nalgebra::{DMatrix, DVector};
use nntf_core::rng::rng_from_seed;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PcaBasis {
    pub mean: DVector<f64>,
    /// `D × d`, one principal direction per column, by decreasing variance.
    pub components: DMatrix<f64>,
    pub singular_values: Vec<f64>,
}

/// Centers the columns and projects onto the top `d` right singular vectors.
/// Each component is signed so that its largest-magnitude entry is positive.
pub fn pca_reduce(x: &DMatrix<f64>, d: usize) -> Result<(DMatrix<f64>, PcaBasis)> {
    let (n, dim) = x.shape();
    if n < 2 {
        return Err(Error::Data("PCA needs at least two rows".into()));
    }
    if d == 0 || d > n.min(dim) {
        return Err(Error::Config(format!(
            "cannot keep {d} principal components of a {n} x {dim} matrix"
        )));
    }
    let mean = x.row_mean().transpose();
    let mut centered = x.clone();
    for mut row in centered.row_iter_mut() {
        row -= mean.transpose();
    }
    let svd = centered.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut components = DMatrix::zeros(dim, d);
    for (c, &i) in order.iter().take(d).enumerate() {
        let mut v = v_t.row(i).transpose();
        let pivot = v.iter().enumerate().fold(
            0,
            |best, (j, x)| if x.abs() > v[best].abs() { j } else { best },
        );
        if v[pivot] < 0.0 {
            v = -v;
        }
        components.set_column(c, &v);
    }
    let singular_values = order
        .iter()
        .take(d)
        .map(|&i| svd.singular_values[i])
        .collect();
    let reduced = centered * &components;
    Ok((
        reduced,
        PcaBasis {
            mean,
            components,
            singular_values,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionBasis {
    /// `D × D` orthonormal matrix; a reduction to `d` dimensions uses the
    /// first `d` columns.
    pub vectors: DMatrix<f64>,
    pub seed: u64,
}

impl ProjectionBasis {
    /// Gaussian `D × D` matrix from `seed`, orthonormalized column by column
    /// (Gram–Schmidt, two passes), so column `j` depends only on the first
    /// `j + 1` Gaussian columns.
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config(
                "random basis needs a positive dimension".into(),
            ));
        }
        let mut rng = rng_from_seed(seed);
        let mut vectors = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            loop {
                let mut v: DVector<f64> =
                    DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                for _ in 0..2 {
                    for i in 0..j {
                        let q = vectors.column(i);
                        let proj = q.dot(&v);
                        v -= proj * q;
                    }
                }
                let norm = v.norm();
                if norm > 1e-8 {
                    vectors.set_column(j, &(v / norm));
                    break;
                }
            }
        }
        Ok(Self { vectors, seed })
    }

    pub fn project(&self, x: &DMatrix<f64>, d: usize) -> Result<DMatrix<f64>> {
        let dim = self.vectors.nrows();
        if x.ncols() != dim {
            return Err(Error::Data(format!(
                "data has {} columns but the basis spans {dim}",
                x.ncols()
            )));
        }
        if d == 0 || d > dim {
            return Err(Error::Config(format!(
                "cannot reduce {dim}-dimensional data to {d} dimensions"
            )));
        }
        Ok(x * self.vectors.columns(0, d))
    }
}

/// `[v_1 ⋯ v_d]ᵀ x` for each row `x`, with the basis fixed by `seed`.
pub fn random_reduce(
    x: &DMatrix<f64>,
    d: usize,
    seed: u64,
) -> Result<(DMatrix<f64>, ProjectionBasis)> {
    if d == 0 || d > x.ncols() {
        return Err(Error::Config(format!(
            "cannot reduce {}-dimensional data to {d} dimensions",
            x.ncols()
        )));
    }
    let basis = ProjectionBasis::random(x.ncols(), seed)?;
    let reduced = basis.project(x, d)?;
    Ok((reduced, basis))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaleParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

pub fn fit_unit_cube(x: &DMatrix<f64>) -> Result<ScaleParams> {
    if x.is_empty() {
        return Err(Error::Data("cannot fit scaling to empty data".into()));
    }
    let min = x.column_iter().map(|c| c.min()).collect();
    let max = x.column_iter().map(|c| c.max()).collect();
    Ok(ScaleParams { min, max })
}

/// `(x − min) / (max − min)` per feature, clamped to `[0, 1]`; constant
/// features map to `0.5`.
pub fn apply_unit_cube(x: &DMatrix<f64>, params: &ScaleParams) -> Result<DMatrix<f64>> {
    if x.ncols() != params.min.len() {
        return Err(Error::Data(format!(
            "data has {} columns, scaling was fit on {}",
            x.ncols(),
            params.min.len()
        )));
    }
    Ok(DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| {
        let (lo, hi) = (params.min[j], params.max[j]);
        if hi > lo {
            ((x[(i, j)] - lo) / (hi - lo)).clamp(0.0, 1.0)
        } else {
            0.5
        }
    }))
}
