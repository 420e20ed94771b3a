//! Dense row-major tensors and the handful of multilinear operations the
//! estimators are built from.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Tolerance on the total mass of probability vectors and tensors.
pub const PROB_TOL: f64 = 1e-9;

/// Row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: vec![rows, cols],
                actual: vec![data.len()],
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::ShapeMismatch {
                    expected: vec![rows],
                    actual: vec![c.len()],
                });
            }
            for (i, &v) in c.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: vec![self.cols, other.cols],
                actual: vec![other.rows, other.cols],
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (p, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    axpy(a, other.row(p), dst);
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · self`.
    pub fn gram(&self) -> Matrix {
        let mut g = Matrix::zeros(self.cols, self.cols);
        for i in 0..self.rows {
            let r = self.row(i);
            for (p, &a) in r.iter().enumerate() {
                if a != 0.0 {
                    axpy(a, r, &mut g.data[p * self.cols..(p + 1) * self.cols]);
                }
            }
        }
        g
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense tensor with row-major (last index fastest) storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    strides: Vec<usize>,
    data: Vec<f64>,
}

fn row_major_strides(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() {
            return Err(Error::Empty("tensor shape"));
        }
        if shape.contains(&0) {
            return Err(Error::InvalidArgument(alloc::format!(
                "tensor extents must be positive, got {shape:?}"
            )));
        }
        let len: usize = shape.iter().product();
        if data.len() != len {
            return Err(Error::ShapeMismatch {
                expected: vec![len],
                actual: vec![data.len()],
            });
        }
        let strides = row_major_strides(&shape);
        Ok(Self {
            shape,
            strides,
            data,
        })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self> {
        let len = shape.iter().product();
        Self::new(shape, vec![0.0; len])
    }

    pub fn filled(shape: Vec<usize>, value: f64) -> Result<Self> {
        let len = shape.iter().product();
        Self::new(shape, vec![value; len])
    }

    /// `order` axes of extent `extent`.
    pub fn cube(order: usize, extent: usize, value: f64) -> Result<Self> {
        Self::filled(vec![extent; order], value)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        index.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    pub fn set(&mut self, index: &[usize], value: f64) {
        let o = self.offset(index);
        self.data[o] = value;
    }

    /// Multi-index of a flat offset.
    pub fn unravel(&self, mut offset: usize, out: &mut [usize]) {
        for (o, &s) in out.iter_mut().zip(&self.strides) {
            *o = offset / s;
            offset %= s;
        }
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    fn check_same_shape(&self, other: &DenseTensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch {
                expected: self.shape.clone(),
                actual: other.shape.clone(),
            });
        }
        Ok(())
    }

    /// `Σ (a_i − b_i)²`.
    pub fn distance_sq(&self, other: &DenseTensor) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    /// `Σ |a_i − b_i|`.
    pub fn l1_distance(&self, other: &DenseTensor) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .sum())
    }

    /// Unchecked reshape used when an operation is known to preserve length.
    fn with_data(shape: Vec<usize>, data: Vec<f64>) -> Self {
        let strides = row_major_strides(&shape);
        Self {
            shape,
            strides,
            data,
        }
    }
}

pub fn l1_norm(t: &DenseTensor) -> f64 {
    t.data.iter().map(|v| libm::fabs(*v)).sum()
}

pub fn inner(a: &DenseTensor, b: &DenseTensor) -> Result<f64> {
    a.check_same_shape(b)?;
    Ok(dot(&a.data, &b.data))
}

pub fn outer_product(vectors: &[Vec<f64>]) -> Result<DenseTensor> {
    if vectors.is_empty() {
        return Err(Error::Empty("outer product factor list"));
    }
    if vectors.iter().any(Vec::is_empty) {
        return Err(Error::Empty("outer product factor"));
    }
    let mut data = vec![1.0];
    for v in vectors {
        let mut next = Vec::with_capacity(data.len() * v.len());
        for &a in &data {
            next.extend(v.iter().map(|&x| a * x));
        }
        data = next;
    }
    let shape = vectors.iter().map(Vec::len).collect();
    Ok(DenseTensor::with_data(shape, data))
}

/// Mode-`n` product `t ×ₙ m` for `m` of shape `r × shape[n]`; the output has
/// extent `r` along axis `n`.
pub fn mode_n_product(t: &DenseTensor, m: &Matrix, n: usize) -> Result<DenseTensor> {
    if n >= t.order() {
        return Err(Error::ModeOutOfRange {
            mode: n,
            order: t.order(),
        });
    }
    if m.cols() != t.shape[n] {
        return Err(Error::ShapeMismatch {
            expected: vec![m.rows(), t.shape[n]],
            actual: vec![m.rows(), m.cols()],
        });
    }
    Ok(mode_product_unchecked(t, m, n))
}

pub(crate) fn mode_product_unchecked(t: &DenseTensor, m: &Matrix, n: usize) -> DenseTensor {
    let dim = t.shape[n];
    let r = m.rows();
    let left: usize = t.shape[..n].iter().product();
    let right: usize = t.shape[n + 1..].iter().product();
    let mut out = vec![0.0; left * r * right];
    if right == 1 {
        for l in 0..left {
            let src = &t.data[l * dim..(l + 1) * dim];
            for p in 0..r {
                out[l * r + p] = dot(m.row(p), src);
            }
        }
    } else {
        for l in 0..left {
            let block = &t.data[l * dim * right..(l + 1) * dim * right];
            for p in 0..r {
                let dst = &mut out[(l * r + p) * right..(l * r + p + 1) * right];
                for (i, &c) in m.row(p).iter().enumerate() {
                    if c != 0.0 {
                        axpy(c, &block[i * right..(i + 1) * right], dst);
                    }
                }
            }
        }
    }
    let mut shape = t.shape.clone();
    shape[n] = r;
    DenseTensor::with_data(shape, out)
}

/// Contraction of `a` and `b` over every axis except `n`:
/// `C[i, j] = Σ a[…, i, …] · b[…, j, …]`. All other extents must agree.
pub(crate) fn contract_all_but(a: &DenseTensor, b: &DenseTensor, n: usize) -> Matrix {
    let da = a.shape[n];
    let db = b.shape[n];
    let left: usize = a.shape[..n].iter().product();
    let right: usize = a.shape[n + 1..].iter().product();
    debug_assert_eq!(left * db * right, b.len());
    let mut c = Matrix::zeros(da, db);
    if right == 1 {
        for l in 0..left {
            let ra = &a.data[l * da..(l + 1) * da];
            let rb = &b.data[l * db..(l + 1) * db];
            for (i, &x) in ra.iter().enumerate() {
                if x != 0.0 {
                    axpy(x, rb, &mut c.data[i * db..(i + 1) * db]);
                }
            }
        }
    } else {
        for l in 0..left {
            let ba = &a.data[l * da * right..(l + 1) * da * right];
            let bb = &b.data[l * db * right..(l + 1) * db * right];
            for i in 0..da {
                let sa = &ba[i * right..(i + 1) * right];
                for j in 0..db {
                    c.data[i * db + j] += dot(sa, &bb[j * right..(j + 1) * right]);
                }
            }
        }
    }
    c
}

/// `Σ_S core_S · Π_j factors_j[:, S_j]`, computed by successive mode products.
pub fn tucker_reconstruct(core: &DenseTensor, factors: &[Matrix]) -> Result<DenseTensor> {
    if factors.len() != core.order() {
        return Err(Error::ShapeMismatch {
            expected: vec![core.order()],
            actual: vec![factors.len()],
        });
    }
    let mut t = core.clone();
    for (n, f) in factors.iter().enumerate() {
        t = mode_n_product(&t, f, n)?;
    }
    Ok(t)
}

/// `Σ_i w_i · factors_1[:, i] ∘ … ∘ factors_d[:, i]`.
pub fn cp_reconstruct(weights: &[f64], factors: &[Matrix]) -> Result<DenseTensor> {
    if factors.is_empty() {
        return Err(Error::Empty("CP factor list"));
    }
    if weights.is_empty() {
        return Err(Error::Empty("CP weights"));
    }
    let k = weights.len();
    for f in factors {
        if f.cols() != k {
            return Err(Error::ShapeMismatch {
                expected: vec![f.rows(), k],
                actual: vec![f.rows(), f.cols()],
            });
        }
    }
    let shape: Vec<usize> = factors.iter().map(Matrix::rows).collect();
    // Row-wise Khatri-Rao accumulation: prefix[flat, i] over leading modes.
    let mut prefix: Vec<f64> = weights.to_vec();
    let mut rows = 1usize;
    for f in factors {
        let b = f.rows();
        let mut next = vec![0.0; rows * b * k];
        for p in 0..rows {
            let src = &prefix[p * k..(p + 1) * k];
            for i in 0..b {
                let dst = &mut next[(p * b + i) * k..(p * b + i + 1) * k];
                for ((d, &s), &x) in dst.iter_mut().zip(src).zip(f.row(i)) {
                    *d = s * x;
                }
            }
        }
        prefix = next;
        rows *= b;
    }
    let data = prefix.chunks_exact(k).map(|c| c.iter().sum()).collect();
    Ok(DenseTensor::with_data(shape, data))
}

/// Euclidean projection of `v` onto `{w ≥ 0, Σ w = radius}`.
///
/// Sort-and-threshold: with `u` sorted descending, the support size is the
/// largest `ρ` with `u_ρ − (Σ_{j≤ρ} u_j − radius)/ρ > 0`.
pub fn project_simplex(v: &[f64], radius: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "simplex radius must be positive and finite, got {radius}"
        )));
    }
    if v.is_empty() {
        return Err(Error::Empty("vector to project"));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - radius) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    Ok(v.iter().map(|&x| (x - theta).max(0.0)).collect())
}

/// Nonnegative vector summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        check_probability(&entries)?;
        Ok(Self(entries))
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Empty("probability vector"));
        }
        Ok(Self(vec![1.0 / len as f64; len]))
    }

    pub fn one_hot(len: usize, at: usize) -> Result<Self> {
        if at >= len {
            return Err(Error::InvalidArgument(alloc::format!(
                "one-hot position {at} out of range {len}"
            )));
        }
        let mut e = vec![0.0; len];
        e[at] = 1.0;
        Ok(Self(e))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

fn check_probability(entries: &[f64]) -> Result<()> {
    if entries.is_empty() {
        return Err(Error::Empty("probability entries"));
    }
    if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if let Some((index, &value)) = entries.iter().enumerate().find(|(_, &x)| x < 0.0) {
        return Err(Error::Negative { index, value });
    }
    let total: f64 = entries.iter().sum();
    if libm::fabs(total - 1.0) > PROB_TOL {
        return Err(Error::NotProbability(alloc::format!(
            "entries sum to {total}"
        )));
    }
    Ok(())
}

/// Dense tensor whose entries are nonnegative and sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbTensor(DenseTensor);

impl ProbTensor {
    pub fn new(inner: DenseTensor) -> Result<Self> {
        check_probability(inner.as_slice())?;
        Ok(Self(inner))
    }

    pub fn uniform(shape: Vec<usize>) -> Result<Self> {
        let len: usize = shape.iter().product();
        Ok(Self(DenseTensor::filled(shape, 1.0 / len.max(1) as f64)?))
    }

    pub fn one_hot(shape: Vec<usize>, index: &[usize]) -> Result<Self> {
        let mut t = DenseTensor::zeros(shape)?;
        if index.len() != t.order() || index.iter().zip(t.shape()).any(|(i, s)| i >= s) {
            return Err(Error::InvalidArgument(alloc::format!(
                "index {index:?} out of range for shape {:?}",
                t.shape()
            )));
        }
        t.set(index, 1.0);
        Ok(Self(t))
    }

    /// Projects an arbitrary finite tensor onto the probability simplex.
    pub fn project(t: &DenseTensor) -> Result<Self> {
        let data = project_simplex(t.as_slice(), 1.0)?;
        Ok(Self(DenseTensor::with_data(t.shape.clone(), data)))
    }

    /// Rescales a nonnegative tensor with positive mass to unit mass.
    pub fn normalize(mut t: DenseTensor) -> Result<Self> {
        if let Some((index, &value)) = t.as_slice().iter().enumerate().find(|(_, &x)| x < 0.0) {
            return Err(Error::Negative { index, value });
        }
        let total = t.sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::NotProbability(alloc::format!(
                "cannot normalize tensor with total mass {total}"
            )));
        }
        t.scale(1.0 / total);
        Ok(Self(t))
    }

    pub fn tensor(&self) -> &DenseTensor {
        &self.0
    }

    pub fn into_tensor(self) -> DenseTensor {
        self.0
    }

    pub fn shape(&self) -> &[usize] {
        self.0.shape()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    fn t2(rows: &[[f64; 2]; 2]) -> DenseTensor {
        DenseTensor::new(vec![2, 2], rows.iter().flatten().copied().collect()).unwrap()
    }

    fn random_tensor(shape: Vec<usize>, rng: &mut crate::rng::Rng) -> DenseTensor {
        let len = shape.iter().product();
        DenseTensor::new(shape, (0..len).map(|_| rng.random::<f64>()).collect()).unwrap()
    }

    fn random_matrix(r: usize, c: usize, rng: &mut crate::rng::Rng) -> Matrix {
        Matrix::from_vec(r, c, (0..r * c).map(|_| rng.random::<f64>()).collect()).unwrap()
    }

    #[test]
    fn l1_norm_examples() {
        assert_eq!(l1_norm(&DenseTensor::zeros(vec![3, 2]).unwrap()), 0.0);
        assert_eq!(l1_norm(&t2(&[[1.0, -2.0], [3.0, -4.0]])), 10.0);
        let p = ProbTensor::uniform(vec![3, 3, 3]).unwrap();
        assert!((l1_norm(p.tensor()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inner_examples() {
        let e0 = ProbTensor::one_hot(vec![2, 2], &[0, 1]).unwrap();
        let e1 = ProbTensor::one_hot(vec![2, 2], &[1, 0]).unwrap();
        assert_eq!(inner(e0.tensor(), e0.tensor()).unwrap(), 1.0);
        assert_eq!(inner(e0.tensor(), e1.tensor()).unwrap(), 0.0);
        let a = t2(&[[1.0, 2.0], [3.0, 4.0]]);
        let b = t2(&[[1.0, 1.0], [1.0, 1.0]]);
        assert_eq!(inner(&a, &b).unwrap(), 10.0);
        let c = DenseTensor::zeros(vec![4]).unwrap();
        assert!(matches!(inner(&a, &c), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn outer_product_examples() {
        let s = outer_product(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(s.shape(), &[1, 1, 1]);
        assert_eq!(s.as_slice(), &[1.0]);
        let t = outer_product(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(t, t2(&[[0.0, 1.0], [0.0, 0.0]]));
        let t = outer_product(&[vec![0.5, 0.5], vec![0.25, 0.75]]).unwrap();
        assert_eq!(t, t2(&[[0.125, 0.375], [0.125, 0.375]]));
        assert!(outer_product(&[]).is_err());
        assert!(outer_product(&[vec![1.0], vec![]]).is_err());
    }

    #[test]
    fn mode_product_identity_and_vector_case() {
        let mut rng = crate::rng::rng_from_seed(1);
        let t = random_tensor(vec![2, 3, 4], &mut rng);
        for n in 0..3 {
            let id = Matrix::identity(t.shape()[n]);
            assert_eq!(mode_n_product(&t, &id, n).unwrap(), t);
        }
        let v = random_tensor(vec![3], &mut rng);
        let m = random_matrix(5, 3, &mut rng);
        let mv = mode_n_product(&v, &m, 0).unwrap();
        for p in 0..5 {
            let expect: f64 = (0..3).map(|i| m[(p, i)] * v.as_slice()[i]).sum();
            assert!((mv.as_slice()[p] - expect).abs() < 1e-15);
        }
        assert!(mode_n_product(&t, &m, 0).is_err());
        assert!(mode_n_product(&t, &m, 3).is_err());
    }

    #[test]
    fn mode_product_matches_triple_sum() {
        let mut rng = crate::rng::rng_from_seed(2);
        let t = random_tensor(vec![2, 3, 2], &mut rng);
        let m = random_matrix(4, 3, &mut rng);
        let out = mode_n_product(&t, &m, 1).unwrap();
        assert_eq!(out.shape(), &[2, 4, 2]);
        for i in 0..2 {
            for p in 0..4 {
                for l in 0..2 {
                    let mut s = 0.0;
                    for j in 0..3 {
                        s += t.get(&[i, j, l]) * m[(p, j)];
                    }
                    assert!((out.get(&[i, p, l]) - s).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn contract_all_but_matches_definition() {
        let mut rng = crate::rng::rng_from_seed(3);
        let a = random_tensor(vec![3, 4, 2], &mut rng);
        let b = random_tensor(vec![3, 5, 2], &mut rng);
        let c = contract_all_but(&a, &b, 1);
        for i in 0..4 {
            for j in 0..5 {
                let mut s = 0.0;
                for x in 0..3 {
                    for z in 0..2 {
                        s += a.get(&[x, i, z]) * b.get(&[x, j, z]);
                    }
                }
                assert!((c[(i, j)] - s).abs() < 1e-13);
            }
        }
        let a = random_tensor(vec![3, 4], &mut rng);
        let b = random_tensor(vec![3, 2], &mut rng);
        let c = contract_all_but(&a, &b, 1);
        let expect = Matrix::from_vec(3, 4, a.as_slice().to_vec())
            .unwrap()
            .transpose()
            .matmul(&Matrix::from_vec(3, 2, b.as_slice().to_vec()).unwrap())
            .unwrap();
        for (x, y) in c.as_slice().iter().zip(expect.as_slice()) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn tucker_reconstruct_rank_one_and_identity() {
        let p = [vec![0.2, 0.8], vec![0.5, 0.5], vec![0.1, 0.9]];
        let core = DenseTensor::cube(3, 1, 1.0).unwrap();
        let factors: Vec<Matrix> = p
            .iter()
            .map(|c| Matrix::from_columns(&[c.clone()]).unwrap())
            .collect();
        let t = tucker_reconstruct(&core, &factors).unwrap();
        assert_eq!(t, outer_product(&p).unwrap());

        let core = ProbTensor::one_hot(vec![3, 3], &[2, 0]).unwrap();
        let ids = [Matrix::identity(3), Matrix::identity(3)];
        let t = tucker_reconstruct(core.tensor(), &ids).unwrap();
        assert_eq!(&t, core.tensor());
    }

    #[test]
    fn tucker_reconstruct_matches_multi_index_sum() {
        let mut rng = crate::rng::rng_from_seed(4);
        let core = random_tensor(vec![2, 2, 2], &mut rng);
        let factors: Vec<Matrix> = (0..3).map(|_| random_matrix(4, 2, &mut rng)).collect();
        let t = tucker_reconstruct(&core, &factors).unwrap();
        let mut idx = [0usize; 3];
        for flat in 0..t.len() {
            t.unravel(flat, &mut idx);
            let mut s = 0.0;
            for s0 in 0..2 {
                for s1 in 0..2 {
                    for s2 in 0..2 {
                        s += core.get(&[s0, s1, s2])
                            * factors[0][(idx[0], s0)]
                            * factors[1][(idx[1], s1)]
                            * factors[2][(idx[2], s2)];
                    }
                }
            }
            assert!((t.as_slice()[flat] - s).abs() < 1e-12);
        }
    }

    #[test]
    fn cp_reconstruct_cases() {
        let mut rng = crate::rng::rng_from_seed(5);
        let cols = [vec![0.3, 0.7], vec![0.6, 0.4]];
        let f: Vec<Matrix> = cols
            .iter()
            .map(|c| Matrix::from_columns(&[c.clone()]).unwrap())
            .collect();
        let one = cp_reconstruct(&[1.0], &f).unwrap();
        assert_eq!(one, outer_product(&cols).unwrap());
        let f2: Vec<Matrix> = cols
            .iter()
            .map(|c| Matrix::from_columns(&[c.clone(), c.clone()]).unwrap())
            .collect();
        let two = cp_reconstruct(&[0.5, 0.5], &f2).unwrap();
        assert!(two.l1_distance(&one).unwrap() < 1e-15);

        let w: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let factors: Vec<Matrix> = (0..3).map(|_| random_matrix(4, 3, &mut rng)).collect();
        let t = cp_reconstruct(&w, &factors).unwrap();
        let mut idx = [0usize; 3];
        for flat in 0..t.len() {
            t.unravel(flat, &mut idx);
            let s: f64 = (0..3)
                .map(|i| {
                    w[i] * factors[0][(idx[0], i)]
                        * factors[1][(idx[1], i)]
                        * factors[2][(idx[2], i)]
                })
                .sum();
            assert!((t.as_slice()[flat] - s).abs() < 1e-12);
        }
        assert!(cp_reconstruct(&[1.0, 1.0], &f).is_err());
    }

    #[test]
    fn diagonal_core_tucker_equals_cp() {
        let mut rng = crate::rng::rng_from_seed(6);
        let w: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let factors: Vec<Matrix> = (0..3).map(|_| random_matrix(5, 3, &mut rng)).collect();
        let mut core = DenseTensor::cube(3, 3, 0.0).unwrap();
        for (i, &wi) in w.iter().enumerate() {
            core.set(&[i, i, i], wi);
        }
        let a = tucker_reconstruct(&core, &factors).unwrap();
        let b = cp_reconstruct(&w, &factors).unwrap();
        for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn simplex_examples() {
        let p = project_simplex(&[0.2, 0.3, 0.5], 1.0).unwrap();
        for (a, b) in p.iter().zip([0.2, 0.3, 0.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = project_simplex(&[0.5, 0.5, 0.5], 1.0).unwrap();
        for a in p {
            assert!((a - 1.0 / 3.0).abs() < 1e-15);
        }
        let p = project_simplex(&[1.2, 0.1], 1.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12 && p[1] == 0.0);
        assert!(matches!(
            project_simplex(&[0.1, f64::NAN], 1.0),
            Err(Error::NonFinite(1))
        ));
        assert!(project_simplex(&[0.1], 0.0).is_err());
    }

    #[test]
    fn prob_tensor_validation() {
        let bad = DenseTensor::new(vec![2], vec![0.7, 0.7]).unwrap();
        assert!(ProbTensor::new(bad).is_err());
        let neg = DenseTensor::new(vec![2], vec![1.5, -0.5]).unwrap();
        assert!(matches!(ProbTensor::new(neg), Err(Error::Negative { .. })));
        assert!(ProbVector::new(vec![0.25, 0.75]).is_ok());
        assert!(DenseTensor::new(vec![2, 2], vec![0.0; 3]).is_err());
    }
}
