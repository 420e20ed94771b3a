//! Nonnegative Tucker and CP decompositions by multiplicative updates.
//!
//! Both fitters minimize `‖X − X̂‖₂²` block by block with Lee–Seung style
//! updates `A ← A ⊙ (∇⁻) / (∇⁺ + ε)`, which never increase the objective and
//! keep every entry nonnegative. Each restart draws its initial entries from
//! `U(0.1, 1.0)` with a generator derived from `(seed, restart)` and then
//! rescales by the least-squares optimal scalar so the first update starts at
//! the right magnitude. A deterministic rank-one candidate, fitted by
//! alternating least squares and padded with unused components, competes with
//! the random restarts, and the candidate with the lowest final objective
//! wins. When `k` equals every extent the Tucker model can represent the data
//! exactly and the exact decomposition is returned without iterating.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::{derived_rng, Rng};
use crate::tensor::{
    contract_all_but, cp_reconstruct, dot, mode_product_unchecked, tucker_reconstruct, DenseTensor,
    Matrix, ProbTensor,
};

/// Below this fraction of `‖X‖²` the objective is recomputed from the
/// explicit residual instead of the expanded quadratic form.
const EXACT_OBJECTIVE_BELOW: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iters: usize,
    /// Stop once `(f_prev − f) / f_prev` drops below this.
    pub rel_tol: f64,
    pub restarts: usize,
    pub seed: u64,
    /// Added to every update denominator.
    pub epsilon_guard: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iters: 200,
            rel_tol: 1e-6,
            restarts: 5,
            seed: 0,
            epsilon_guard: 1e-12,
        }
    }
}

impl FitOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument(
                "max_iters and restarts must be positive".into(),
            ));
        }
        if !(self.rel_tol > 0.0 && self.epsilon_guard > 0.0) {
            return Err(Error::InvalidArgument(
                "rel_tol and epsilon_guard must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Tucker,
    Cp,
}

impl core::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tucker" => Ok(Method::Tucker),
            "cp" | "parafac" => Ok(Method::Cp),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown decomposition method `{other}`"
            ))),
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Method::Tucker => "tucker",
            Method::Cp => "cp",
        })
    }
}

/// Nonnegative core of shape `k^d` and `d` nonnegative `b × k` factors.
#[derive(Debug, Clone, PartialEq)]
pub struct TuckerFactors {
    core: DenseTensor,
    factors: Vec<Matrix>,
}

impl TuckerFactors {
    pub fn new(core: DenseTensor, factors: Vec<Matrix>) -> Result<Self> {
        if factors.len() != core.order() {
            return Err(Error::ShapeMismatch {
                expected: vec![core.order()],
                actual: vec![factors.len()],
            });
        }
        for (n, f) in factors.iter().enumerate() {
            if f.cols() != core.shape()[n] {
                return Err(Error::ShapeMismatch {
                    expected: vec![f.rows(), core.shape()[n]],
                    actual: vec![f.rows(), f.cols()],
                });
            }
        }
        check_nonnegative(core.as_slice())?;
        for f in &factors {
            check_nonnegative(f.as_slice())?;
        }
        Ok(Self { core, factors })
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn reconstruct(&self) -> DenseTensor {
        tucker_reconstruct(&self.core, &self.factors).expect("shapes validated at construction")
    }
}

/// Nonnegative component weights and `d` nonnegative `b × k` factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CpFactors {
    weights: Vec<f64>,
    factors: Vec<Matrix>,
}

impl CpFactors {
    pub fn new(weights: Vec<f64>, factors: Vec<Matrix>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Empty("CP factor list"));
        }
        for f in &factors {
            if f.cols() != weights.len() {
                return Err(Error::ShapeMismatch {
                    expected: vec![f.rows(), weights.len()],
                    actual: vec![f.rows(), f.cols()],
                });
            }
            check_nonnegative(f.as_slice())?;
        }
        check_nonnegative(&weights)?;
        Ok(Self { weights, factors })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn reconstruct(&self) -> DenseTensor {
        cp_reconstruct(&self.weights, &self.factors).expect("shapes validated at construction")
    }
}

/// Result of a fit together with the objective trajectory of every restart.
#[derive(Debug, Clone)]
pub struct FitTrace<M> {
    pub model: M,
    /// Final objective of the selected restart.
    pub objective: f64,
    /// Index of the selected restart.
    pub restart: usize,
    /// `histories[r][i]` is the objective of restart `r` after `i` sweeps;
    /// entry 0 is the rescaled initialization. The last entry belongs to the
    /// rank-one candidate.
    pub histories: Vec<Vec<f64>>,
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite(index));
        }
        if value < 0.0 {
            return Err(Error::Negative { index, value });
        }
    }
    Ok(())
}

fn check_fit_input(t: &DenseTensor, k: usize, opts: &FitOptions) -> Result<()> {
    opts.validate()?;
    if k == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let extent = t.shape().iter().copied().min().unwrap_or(0);
    if k > extent {
        return Err(Error::RankTooLarge { rank: k, extent });
    }
    check_nonnegative(t.as_slice())
}

fn uniform_init(rng: &mut Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(0.1..1.0)).collect()
}

/// `true` when the run should stop after recording `current`.
fn converged(previous: f64, current: f64, rel_tol: f64) -> bool {
    previous <= 0.0 || current <= 0.0 || (previous - current) / previous < rel_tol
}

fn pick_best<M>(runs: Vec<(M, Vec<f64>)>) -> FitTrace<M> {
    let mut best = 0;
    let mut best_obj = f64::INFINITY;
    let mut models = Vec::with_capacity(runs.len());
    let mut histories = Vec::with_capacity(runs.len());
    for (r, (model, history)) in runs.into_iter().enumerate() {
        let obj = *history.last().expect("history has the initial objective");
        // strict comparison keeps the lowest index on ties
        if obj < best_obj {
            best_obj = obj;
            best = r;
        }
        models.push(Some(model));
        histories.push(history);
    }
    FitTrace {
        model: models[best].take().expect("selected restart exists"),
        objective: best_obj,
        restart: best,
        histories,
    }
}

/// Nonzero entries of a tensor as (multi-index, value).
struct Nonzeros {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Nonzeros {
    fn of(t: &DenseTensor) -> Self {
        let d = t.order();
        let mut indices = Vec::new();
        let mut values = Vec::new();
        let mut idx = vec![0usize; d];
        for (flat, &v) in t.as_slice().iter().enumerate() {
            if v != 0.0 {
                t.unravel(flat, &mut idx);
                indices.extend_from_slice(&idx);
                values.push(v);
            }
        }
        Self { indices, values }
    }

    fn len(&self) -> usize {
        self.values.len()
    }
}

/// The data tensor together with what the updates repeatedly need from it.
struct Target<'a> {
    x: &'a DenseTensor,
    norm_sq: f64,
    nonzeros: Nonzeros,
}

impl<'a> Target<'a> {
    fn new(x: &'a DenseTensor) -> Self {
        Self {
            x,
            norm_sq: x.norm_sq(),
            nonzeros: Nonzeros::of(x),
        }
    }

    /// `X ×_{m≠n} A_mᵀ`, or `X ×_m A_mᵀ` over all modes when `skip` is `None`.
    fn project(&self, transposed: &[Matrix], skip: Option<usize>) -> DenseTensor {
        let d = self.x.order();
        let k = transposed[0].rows();
        let mut shape: Vec<usize> = vec![k; d];
        if let Some(n) = skip {
            shape[n] = self.x.shape()[n];
        }
        let out_len: usize = shape.iter().product();
        let dense_cost = {
            let mut cost = 0usize;
            let mut cur: Vec<usize> = self.x.shape().to_vec();
            for m in (0..d).filter(|&m| Some(m) != skip) {
                cost += cur.iter().product::<usize>() * k;
                cur[m] = k;
            }
            cost
        };
        let sparse_cost = self.nonzeros.len() * out_len / skip.map_or(1, |n| shape[n]);
        if sparse_cost < dense_cost {
            self.project_sparse(transposed, skip, shape)
        } else {
            let mut t = self.x.clone();
            for m in (0..d).filter(|&m| Some(m) != skip) {
                t = mode_product_unchecked(&t, &transposed[m], m);
            }
            t
        }
    }

    fn project_sparse(
        &self,
        transposed: &[Matrix],
        skip: Option<usize>,
        shape: Vec<usize>,
    ) -> DenseTensor {
        let d = self.x.order();
        let mut out = DenseTensor::zeros(shape).expect("positive extents");
        let strides = out.strides().to_vec();
        let data = out.as_mut_slice();
        // Outer product of the selected factor rows, built mode by mode.
        let mut buf: Vec<f64> = Vec::new();
        let mut next: Vec<f64> = Vec::new();
        for (e, &v) in self.nonzeros.values.iter().enumerate() {
            let idx = &self.nonzeros.indices[e * d..(e + 1) * d];
            buf.clear();
            buf.push(v);
            let mut base = 0usize;
            for m in 0..d {
                if Some(m) == skip {
                    base += idx[m] * strides[m];
                    continue;
                }
                let a = &transposed[m];
                next.clear();
                for &p in &buf {
                    for r in 0..a.rows() {
                        next.push(p * a[(r, idx[m])]);
                    }
                }
                core::mem::swap(&mut buf, &mut next);
            }
            // `buf` enumerates the non-skipped axes in row-major order; scatter
            // it with the skipped axis fixed at `base`.
            match skip {
                None => {
                    for (o, b) in data.iter_mut().zip(&buf) {
                        *o += b;
                    }
                }
                Some(n) => {
                    let inner: usize = strides[n];
                    let extent_n = self.x.shape()[n];
                    let outer = buf.len() / inner;
                    for q in 0..outer {
                        let dst = q * inner * extent_n + base;
                        for (o, b) in data[dst..dst + inner]
                            .iter_mut()
                            .zip(&buf[q * inner..(q + 1) * inner])
                        {
                            *o += b;
                        }
                    }
                }
            }
        }
        out
    }
}

/// `G ×_m S_m` over every mode except `skip`.
fn multiply_grams(core: &DenseTensor, grams: &[Matrix], skip: Option<usize>) -> DenseTensor {
    let mut t = core.clone();
    for (m, s) in grams.iter().enumerate() {
        if Some(m) != skip {
            t = mode_product_unchecked(&t, s, m);
        }
    }
    t
}

fn multiplicative_step(values: &mut [f64], numerator: &[f64], denominator: &[f64], eps: f64) {
    for ((v, &num), &den) in values.iter_mut().zip(numerator).zip(denominator) {
        *v *= num / (den + eps);
    }
}

fn tucker_restart(
    target: &Target<'_>,
    k: usize,
    opts: &FitOptions,
    rng: &mut Rng,
) -> (TuckerFactors, Vec<f64>) {
    let x = target.x;
    let d = x.order();
    let mut factors: Vec<Matrix> = x
        .shape()
        .iter()
        .map(|&b| Matrix::from_vec(b, k, uniform_init(rng, b * k)).expect("sized"))
        .collect();
    let mut core = DenseTensor::new(vec![k; d], uniform_init(rng, k.pow(d as u32))).expect("sized");
    let mut transposed: Vec<Matrix> = factors.iter().map(Matrix::transpose).collect();
    let mut grams: Vec<Matrix> = factors.iter().map(Matrix::gram).collect();

    let objective =
        |core: &DenseTensor, factors: &[Matrix], projected: &DenseTensor, grams: &[Matrix]| {
            let cross = dot(projected.as_slice(), core.as_slice());
            let model = dot(
                core.as_slice(),
                multiply_grams(core, grams, None).as_slice(),
            );
            let f = target.norm_sq - 2.0 * cross + model;
            if f < EXACT_OBJECTIVE_BELOW * target.norm_sq {
                x.distance_sq(&tucker_reconstruct(core, factors).expect("consistent shapes"))
                    .expect("same shape")
            } else {
                f
            }
        };

    let projected = target.project(&transposed, None);
    let cross = dot(projected.as_slice(), core.as_slice());
    let model = dot(
        core.as_slice(),
        multiply_grams(&core, &grams, None).as_slice(),
    );
    let alpha = if model > 0.0 {
        (cross / model).max(0.0)
    } else {
        0.0
    };
    core.scale(alpha);
    let mut history = vec![objective(&core, &factors, &projected, &grams)];

    for _ in 0..opts.max_iters {
        let previous = *history.last().expect("non-empty");
        if previous <= 0.0 {
            break;
        }
        let mut last_partial = None;
        for n in 0..d {
            let partial = target.project(&transposed, Some(n));
            let numerator = contract_all_but(&partial, &core, n);
            let weighted = multiply_grams(&core, &grams, Some(n));
            let w = contract_all_but(&weighted, &core, n);
            let denominator = factors[n].matmul(&w).expect("k × k");
            multiplicative_step(
                factors[n].as_mut_slice(),
                numerator.as_slice(),
                denominator.as_slice(),
                opts.epsilon_guard,
            );
            transposed[n] = factors[n].transpose();
            grams[n] = factors[n].gram();
            if n == d - 1 {
                last_partial = Some(partial);
            }
        }
        let projected =
            mode_product_unchecked(&last_partial.expect("d ≥ 1"), &transposed[d - 1], d - 1);
        let denominator = multiply_grams(&core, &grams, None);
        multiplicative_step(
            core.as_mut_slice(),
            projected.as_slice(),
            denominator.as_slice(),
            opts.epsilon_guard,
        );
        let current = objective(&core, &factors, &projected, &grams);
        history.push(current);
        if converged(previous, current, opts.rel_tol) {
            break;
        }
    }
    normalize_tucker(&mut core, &mut factors);
    (TuckerFactors { core, factors }, history)
}

/// Moves factor column sums into the core so every nonzero column sums to one.
fn normalize_tucker(core: &mut DenseTensor, factors: &mut [Matrix]) {
    for (n, f) in factors.iter_mut().enumerate() {
        let sums = column_sums(f);
        let mut scale = Matrix::zeros(sums.len(), sums.len());
        for (r, &s) in sums.iter().enumerate() {
            scale[(r, r)] = s;
            if s > 0.0 {
                for i in 0..f.rows() {
                    f[(i, r)] /= s;
                }
            }
        }
        *core = mode_product_unchecked(core, &scale, n);
    }
}

fn column_sums(m: &Matrix) -> Vec<f64> {
    let mut sums = vec![0.0; m.cols()];
    for i in 0..m.rows() {
        for (s, v) in sums.iter_mut().zip(m.row(i)) {
            *s += v;
        }
    }
    sums
}

/// Best rank-one approximation by alternating least squares. On nonnegative
/// data every update `a_n = (X ×_{m≠n} a_mᵀ) / Π_{m≠n} ‖a_m‖²` is already
/// nonnegative, so no projection is needed. Starts from all-ones vectors.
fn rank_one_als(target: &Target<'_>, opts: &FitOptions) -> (Vec<Vec<f64>>, Vec<f64>) {
    let x = target.x;
    let d = x.order();
    let mut vectors: Vec<Vec<f64>> = x.shape().iter().map(|&b| vec![1.0; b]).collect();
    let as_rows = |v: &[Vec<f64>]| -> Vec<Matrix> {
        v.iter()
            .map(|a| Matrix::from_vec(1, a.len(), a.clone()).expect("sized"))
            .collect()
    };
    let objective = |v: &[Vec<f64>], last_partial: &[f64]| {
        let cross = dot(last_partial, &v[d - 1]);
        let model: f64 = v.iter().map(|a| dot(a, a)).product();
        let f = target.norm_sq - 2.0 * cross + model;
        if f < EXACT_OBJECTIVE_BELOW * target.norm_sq {
            let t = crate::tensor::outer_product(v).expect("non-empty vectors");
            x.distance_sq(&t).expect("same shape")
        } else {
            f
        }
    };
    let sweep = |vectors: &mut Vec<Vec<f64>>| -> Vec<f64> {
        let mut partial = Vec::new();
        for n in 0..d {
            let y = target.project(&as_rows(vectors), Some(n)).into_vec();
            let scale: f64 = (0..d)
                .filter(|&m| m != n)
                .map(|m| dot(&vectors[m], &vectors[m]))
                .product();
            vectors[n] = if scale > 0.0 {
                y.iter().map(|v| v / scale).collect()
            } else {
                vec![0.0; y.len()]
            };
            partial = y;
        }
        partial
    };
    let partial = sweep(&mut vectors);
    let mut history = vec![objective(&vectors, &partial)];
    for _ in 0..opts.max_iters {
        let previous = *history.last().expect("non-empty");
        if previous <= 0.0 {
            break;
        }
        let partial = sweep(&mut vectors);
        let current = objective(&vectors, &partial);
        history.push(current);
        if converged(previous, current, opts.rel_tol) {
            break;
        }
    }
    (vectors, history)
}

/// Splits a rank-one term into its total mass and unit-sum columns, padding
/// the remaining `k − 1` columns with uniform vectors.
fn embed_rank_one(vectors: Vec<Vec<f64>>, k: usize) -> (f64, Vec<Matrix>) {
    let mut mass = 1.0;
    let factors = vectors
        .into_iter()
        .map(|v| {
            let b = v.len();
            let s: f64 = v.iter().sum();
            mass *= s;
            let mut f = Matrix::from_vec(b, k, vec![1.0 / b as f64; b * k]).expect("sized");
            for (i, &x) in v.iter().enumerate() {
                f[(i, 0)] = if s > 0.0 { x / s } else { 1.0 / b as f64 };
            }
            f
        })
        .collect();
    (mass, factors)
}

fn tucker_rank_one(target: &Target<'_>, k: usize, opts: &FitOptions) -> (TuckerFactors, Vec<f64>) {
    let (vectors, history) = rank_one_als(target, opts);
    let (mass, factors) = embed_rank_one(vectors, k);
    let mut core = DenseTensor::zeros(vec![k; factors.len()]).expect("positive extents");
    core.as_mut_slice()[0] = mass;
    (TuckerFactors { core, factors }, history)
}

/// With `k` equal to every extent the model is the data itself.
fn tucker_exact(x: &DenseTensor) -> FitTrace<TuckerFactors> {
    let factors = x.shape().iter().map(|&b| Matrix::identity(b)).collect();
    FitTrace {
        model: TuckerFactors {
            core: x.clone(),
            factors,
        },
        objective: 0.0,
        restart: 0,
        histories: vec![vec![0.0]],
    }
}

/// Nonnegative Tucker decomposition with rank `[k, …, k]`.
pub fn ntd_fit(t: &DenseTensor, k: usize, opts: &FitOptions) -> Result<TuckerFactors> {
    ntd_fit_traced(t, k, opts).map(|f| f.model)
}

pub fn ntd_fit_traced(
    t: &DenseTensor,
    k: usize,
    opts: &FitOptions,
) -> Result<FitTrace<TuckerFactors>> {
    check_fit_input(t, k, opts)?;
    if t.shape().iter().all(|&b| b == k) {
        return Ok(tucker_exact(t));
    }
    let target = Target::new(t);
    let mut runs: Vec<_> = (0..opts.restarts)
        .map(|r| tucker_restart(&target, k, opts, &mut derived_rng(opts.seed, r as u64)))
        .collect();
    runs.push(tucker_rank_one(&target, k, opts));
    Ok(pick_best(runs))
}

/// `M[i, r] = Σ_j X[…, i, …] Π_{m≠n} A_m[j_m, r]`, summed over nonzeros.
fn mttkrp(target: &Target<'_>, factors: &[Matrix], n: usize) -> Matrix {
    let d = factors.len();
    let k = factors[0].cols();
    let mut out = Matrix::zeros(factors[n].rows(), k);
    let mut prod = vec![0.0; k];
    let nz = &target.nonzeros;
    for (e, &v) in nz.values.iter().enumerate() {
        let idx = &nz.indices[e * d..(e + 1) * d];
        prod.iter_mut().for_each(|p| *p = v);
        for m in (0..d).filter(|&m| m != n) {
            for (p, a) in prod.iter_mut().zip(factors[m].row(idx[m])) {
                *p *= a;
            }
        }
        let row = &mut out.as_mut_slice()[idx[n] * k..(idx[n] + 1) * k];
        for (o, p) in row.iter_mut().zip(&prod) {
            *o += p;
        }
    }
    out
}

/// Elementwise product of every Gram matrix except `skip`.
fn hadamard_grams(grams: &[Matrix], skip: Option<usize>) -> Matrix {
    let k = grams[0].rows();
    let mut h = Matrix::from_vec(k, k, vec![1.0; k * k]).expect("sized");
    for (m, g) in grams.iter().enumerate() {
        if Some(m) != skip {
            for (a, b) in h.as_mut_slice().iter_mut().zip(g.as_slice()) {
                *a *= b;
            }
        }
    }
    h
}

fn cp_restart(
    target: &Target<'_>,
    k: usize,
    opts: &FitOptions,
    rng: &mut Rng,
) -> (CpFactors, Vec<f64>) {
    let x = target.x;
    let d = x.order();
    let mut factors: Vec<Matrix> = x
        .shape()
        .iter()
        .map(|&b| Matrix::from_vec(b, k, uniform_init(rng, b * k)).expect("sized"))
        .collect();
    let mut grams: Vec<Matrix> = factors.iter().map(Matrix::gram).collect();
    let ones = vec![1.0; k];

    let objective = |factors: &[Matrix], grams: &[Matrix], m_last: &Matrix| {
        let cross = dot(m_last.as_slice(), factors[d - 1].as_slice());
        let model: f64 = hadamard_grams(grams, None).as_slice().iter().sum();
        let f = target.norm_sq - 2.0 * cross + model;
        if f < EXACT_OBJECTIVE_BELOW * target.norm_sq {
            x.distance_sq(&cp_reconstruct(&ones, factors).expect("consistent shapes"))
                .expect("same shape")
        } else {
            f
        }
    };

    let m_last = mttkrp(target, &factors, d - 1);
    let cross = dot(m_last.as_slice(), factors[d - 1].as_slice());
    let model: f64 = hadamard_grams(&grams, None).as_slice().iter().sum();
    let alpha = if model > 0.0 {
        (cross / model).max(0.0)
    } else {
        0.0
    };
    factors[d - 1]
        .as_mut_slice()
        .iter_mut()
        .for_each(|v| *v *= alpha);
    grams[d - 1] = factors[d - 1].gram();
    let mut history = vec![objective(&factors, &grams, &m_last)];

    for _ in 0..opts.max_iters {
        let previous = *history.last().expect("non-empty");
        if previous <= 0.0 {
            break;
        }
        let mut m_last = None;
        for n in 0..d {
            let numerator = mttkrp(target, &factors, n);
            let h = hadamard_grams(&grams, Some(n));
            let denominator = factors[n].matmul(&h).expect("k × k");
            multiplicative_step(
                factors[n].as_mut_slice(),
                numerator.as_slice(),
                denominator.as_slice(),
                opts.epsilon_guard,
            );
            grams[n] = factors[n].gram();
            if n == d - 1 {
                m_last = Some(numerator);
            }
        }
        let current = objective(&factors, &grams, &m_last.expect("d ≥ 1"));
        history.push(current);
        if converged(previous, current, opts.rel_tol) {
            break;
        }
    }

    let mut weights = vec![1.0; k];
    for f in factors.iter_mut() {
        for (r, s) in column_sums(f).into_iter().enumerate() {
            weights[r] *= s;
            if s > 0.0 {
                for i in 0..f.rows() {
                    f[(i, r)] /= s;
                }
            }
        }
    }
    (CpFactors { weights, factors }, history)
}

/// Nonnegative CP (PARAFAC) decomposition with `k` components.
pub fn ncp_fit(t: &DenseTensor, k: usize, opts: &FitOptions) -> Result<CpFactors> {
    ncp_fit_traced(t, k, opts).map(|f| f.model)
}

pub fn ncp_fit_traced(t: &DenseTensor, k: usize, opts: &FitOptions) -> Result<FitTrace<CpFactors>> {
    check_fit_input(t, k, opts)?;
    let target = Target::new(t);
    let mut runs: Vec<_> = (0..opts.restarts)
        .map(|r| cp_restart(&target, k, opts, &mut derived_rng(opts.seed, r as u64)))
        .collect();
    let (vectors, history) = rank_one_als(&target, opts);
    let (mass, factors) = embed_rank_one(vectors, k);
    let mut weights = vec![0.0; k];
    weights[0] = mass;
    runs.push((CpFactors { weights, factors }, history));
    Ok(pick_best(runs))
}

/// Fits a rank-`k` model to a probability tensor and projects the
/// reconstruction back onto the probability simplex.
pub fn fit_prob_tensor(
    h: &ProbTensor,
    k: usize,
    method: Method,
    opts: &FitOptions,
) -> Result<ProbTensor> {
    let reconstruction = match method {
        Method::Tucker => ntd_fit(h.tensor(), k, opts)?.reconstruct(),
        Method::Cp => ncp_fit(h.tensor(), k, opts)?.reconstruct(),
    };
    ProbTensor::project(&reconstruction)
}
