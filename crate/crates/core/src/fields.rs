//! Discrete fractional Gaussian fields `X_s^m` and their statistics.
//!
//! A field is realized through its eigen-series
//! `X_s^m = Σ_i λ_i^{-s} Φ_i W_i`, with the `W_i` read from the counter-based
//! stream keyed by `(seed, m)`. The `W_i` do not depend on `s`, so fields with
//! the same seed at the same level are coupled across `s`.

use faer::Mat;
use serde::Serialize;

use crate::constants::CONSTANTS;
use crate::error::{Error, Result};
use crate::gasket::{build_graph, check_len, GasketGraph, Nesting, VoronoiCells};
use crate::rng::{member_seed, normals};
use crate::spectral::{ground_state, torsion_function, RieszKernelMatrix, SpectralDecomposition};

/// One realization of `X_s^m` on `V_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldSample {
    pub level: usize,
    pub s: f64,
    pub seed: u64,
    /// Values on all of `V_m`, zero on `V_0`.
    pub values: Vec<f64>,
}

/// The white-noise coefficients `W_1, …, W_N` behind a field.
pub fn white_noise(seed: u64, level: usize, count: usize) -> Vec<f64> {
    normals(seed, level as u64, count)
}

pub fn sample_dfgf(spec: &SpectralDecomposition, s: f64, seed: u64) -> Result<FieldSample> {
    if !(s >= 0.0) {
        return Err(Error::Parameter(format!("field parameter must be >= 0, got {s}")));
    }
    let w = white_noise(seed, spec.level(), spec.len());
    let coeffs: Vec<f64> = w.iter().zip(spec.eigenvalues()).map(|(w, l)| w * l.powf(-s)).collect();
    Ok(FieldSample { level: spec.level(), s, seed, values: spec.synthesize(&coeffs)? })
}

/// Interior values of `n` independent fields as the columns of an `N × n` matrix.
///
/// Column `k` is the field with seed `member_seed(seed, k)`.
pub fn sample_ensemble(spec: &SpectralDecomposition, s: f64, n: usize, seed: u64) -> Mat<f64> {
    let dim = spec.len();
    let weights: Vec<f64> = spec.eigenvalues().iter().map(|l| l.powf(-s)).collect();
    let mut coeffs = Mat::<f64>::zeros(dim, n);
    for k in 0..n {
        let w = white_noise(member_seed(seed, k as u64), spec.level(), dim);
        for i in 0..dim {
            coeffs[(i, k)] = w[i] * weights[i];
        }
    }
    spec.eigenvector_matrix() * &coeffs
}

/// `X(f) = (1/a_m) Σ_p f(p) X(p)`.
pub fn pair(field: &FieldSample, f: &[f64]) -> Result<f64> {
    check_len(field.level, field.values.len(), f.len())?;
    let a = crate::gasket::atom_scale(field.level);
    Ok(field.values.iter().zip(f).map(|(x, y)| x * y).sum::<f64>() / a)
}

/// A function on the gasket represented by its values on a reference level `V_M`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub reference: usize,
    pub values: Vec<f64>,
    pub vanishes_on_boundary: bool,
}

impl TestFunction {
    /// Wraps values on `V_M`; nonzero boundary values are zeroed and flagged.
    pub fn from_values(graph: &GasketGraph, mut values: Vec<f64>) -> Result<(Self, bool)> {
        check_len(graph.level(), graph.vertex_count(), values.len())?;
        let projected = graph.boundary_magnitude(&values) != 0.0;
        for (v, x) in values.iter_mut().enumerate() {
            if graph.is_boundary(v) {
                *x = 0.0;
            }
        }
        Ok((TestFunction { reference: graph.level(), values, vanishes_on_boundary: true }, projected))
    }

    /// The ground state `Φ_1^M` of the reference level, a surrogate for the
    /// continuum `Φ_1`.
    pub fn ground_state(reference: usize) -> Result<Self> {
        let g = build_graph(reference)?;
        let (_, values) = ground_state(&g)?;
        Ok(TestFunction { reference, values, vanishes_on_boundary: true })
    }

    /// The torsion function `(-Δ_M)^{-1} 1`.
    pub fn torsion(reference: usize) -> Result<Self> {
        let g = build_graph(reference)?;
        Ok(TestFunction { reference, values: torsion_function(&g)?, vanishes_on_boundary: true })
    }

    /// A finite eigenfunction combination `Σ c_i Φ_i^M`.
    pub fn eigen_combination(spec: &SpectralDecomposition, coeffs: &[f64]) -> Result<Self> {
        let mut full = vec![0.0; spec.len()];
        check_len(spec.level(), spec.len().max(coeffs.len()), spec.len())?;
        full[..coeffs.len()].copy_from_slice(coeffs);
        Ok(TestFunction { reference: spec.level(), values: spec.synthesize(&full)?, vanishes_on_boundary: true })
    }

    /// `f_m = f|_{V_m}`.
    pub fn restrict_to(&self, m: usize) -> Result<Vec<f64>> {
        if m == self.reference {
            return Ok(self.values.clone());
        }
        let fine = build_graph(self.reference)?;
        let coarse = build_graph(m)?;
        Nesting::new(&coarse, &fine)?.restrict(&self.values)
    }

    /// Cell averages `f̄_m` over the Voronoi cells (reference level must not
    /// exceed that of the function).
    pub fn cell_averages(&self, cells: &VoronoiCells) -> Result<Vec<f64>> {
        if cells.reference > self.reference {
            return Err(Error::ReferenceLevel { level: cells.reference, reference: self.reference });
        }
        let on_reference = self.restrict_to(cells.reference)?;
        cells.cell_averages(&on_reference)
    }
}

/// `X(f̄_m)`, the field paired with the Voronoi cell averages of `f`.
pub fn lift_pair(field: &FieldSample, f: &TestFunction, cells: &VoronoiCells) -> Result<f64> {
    if cells.level != field.level {
        return Err(Error::Precondition(format!(
            "cells are for level {}, field is at level {}",
            cells.level, field.level
        )));
    }
    let averages = f.cell_averages(cells)?;
    pair(field, &averages)
}

/// Empirical covariance versus `G_{2s}^m`, entrywise over interior vertices.
#[derive(Debug, Clone, Serialize)]
pub struct CovarianceReport {
    pub level: usize,
    pub s: f64,
    pub samples: usize,
    pub seed: u64,
    pub max_abs_deviation: f64,
    /// Largest `|Ĉ(p,q) - G(p,q)| / SE(p,q)` with `SE² = (G(p,p)G(q,q) + G(p,q)²)/n`.
    pub max_se_deviation: f64,
}

/// Second-moment matrix `(1/n) Σ_k X_k X_kᵀ` of a column ensemble.
pub fn second_moments(samples: &Mat<f64>) -> Mat<f64> {
    let n = samples.ncols() as f64;
    let c = samples * samples.transpose();
    Mat::from_fn(c.nrows(), c.ncols(), |i, j| c[(i, j)] / n)
}

pub fn empirical_covariance(spec: &SpectralDecomposition, s: f64, n: usize, seed: u64) -> Result<CovarianceReport> {
    if n < 2 {
        return Err(Error::Parameter(format!("need at least 2 samples, got {n}")));
    }
    let kernel = spec.riesz_kernel(2.0 * s)?;
    let ens = sample_ensemble(spec, s, n, seed);
    let c = second_moments(&ens);
    let (max_abs, max_se) = compare_to_kernel(&c, &kernel, n);
    Ok(CovarianceReport { level: spec.level(), s, samples: n, seed, max_abs_deviation: max_abs, max_se_deviation: max_se })
}

fn compare_to_kernel(c: &Mat<f64>, kernel: &RieszKernelMatrix, n: usize) -> (f64, f64) {
    let mut max_abs = 0.0f64;
    let mut max_se = 0.0f64;
    for i in 0..kernel.dim() {
        for j in 0..kernel.dim() {
            let g = kernel.get(i, j);
            let dev = (c[(i, j)] - g).abs();
            let se = ((kernel.get(i, i) * kernel.get(j, j) + g * g) / n as f64).sqrt();
            max_abs = max_abs.max(dev);
            max_se = max_se.max(dev / se);
        }
    }
    (max_abs, max_se)
}

/// Exact `E(X_s^m(f) X_s^m(g)) = (1/a_m) Σ_p (-Δ_m)^{-s} f (-Δ_m)^{-s} g`.
pub fn covariance_functional(spec: &SpectralDecomposition, s: f64, f: &[f64], g: &[f64]) -> Result<f64> {
    let cf = spec.coefficients(f)?;
    let cg = spec.coefficients(g)?;
    Ok(cf.iter().zip(&cg).zip(spec.eigenvalues()).map(|((a, b), l)| a * b * l.powf(-2.0 * s)).sum())
}

/// The same covariance through the kernel, `(1/a_m²) Σ_{p,q} f(p) g(q) G_{2s}(p,q)`.
pub fn covariance_via_kernel(kernel: &RieszKernelMatrix, f: &[f64], g: &[f64], a_m: f64) -> f64 {
    let idx = kernel.interior();
    let mut acc = 0.0;
    for (i, &p) in idx.iter().enumerate() {
        for (j, &q) in idx.iter().enumerate() {
            acc += f[p] * g[q] * kernel.get(i, j);
        }
    }
    acc / (a_m * a_m)
}

/// `‖ψ‖²_{-α} = Σ_j λ_j^{-α} ψ(Φ_j)²` over the available spectrum, for `ψ`
/// given by its values on `V_m` (paired through `μ_m`).
pub fn sobolev_norm(spec: &SpectralDecomposition, values: &[f64], alpha: f64) -> Result<f64> {
    Ok(*sobolev_partial_sums(spec, values, alpha)?.last().unwrap_or(&0.0))
}

/// Partial sums `Σ_{j ≤ J} λ_j^{-α} ψ(Φ_j)²` for `J = 1..N_m`.
pub fn sobolev_partial_sums(spec: &SpectralDecomposition, values: &[f64], alpha: f64) -> Result<Vec<f64>> {
    let coeffs = spec.coefficients(values)?;
    let mut acc = 0.0;
    Ok(coeffs
        .iter()
        .zip(spec.eigenvalues())
        .map(|(c, l)| {
            acc += l.powf(-alpha) * c * c;
            acc
        })
        .collect())
}

/// Interior vertex pairs grouped by dyadic distance `r_k = 2^{-k}`.
#[derive(Debug, Clone)]
pub struct DistanceBins {
    pub level: usize,
    /// `(k, r_k, pairs)` with pairs given as interior slots `(i, j)`, `i < j`.
    pub bins: Vec<(usize, f64, Vec<(usize, usize)>)>,
}

/// Relative half-width of a distance bin.
pub const BIN_TOLERANCE: f64 = 0.1;

impl DistanceBins {
    /// Bins `k = 1..=k_max`; a pair joins bin `k` when `|d - 2^{-k}| ≤ 0.1·2^{-k}`.
    pub fn new(graph: &GasketGraph, k_max: usize) -> Self {
        let idx = graph.interior();
        let mut bins: Vec<(usize, f64, Vec<(usize, usize)>)> =
            (1..=k_max).map(|k| (k, 0.5f64.powi(k as i32), Vec::new())).collect();
        for i in 0..idx.len() {
            for j in (i + 1)..idx.len() {
                let d = graph.distance(idx[i], idx[j]);
                // nearest dyadic exponent
                let k = (-d.log2()).round();
                if k < 1.0 || k > k_max as f64 {
                    continue;
                }
                let bin = &mut bins[k as usize - 1];
                if (d - bin.1).abs() <= BIN_TOLERANCE * bin.1 {
                    bin.2.push((i, j));
                }
            }
        }
        DistanceBins { level: graph.level(), bins }
    }

    /// Fails if any bin is empty.
    pub fn require_nonempty(&self) -> Result<()> {
        for (_, r, pairs) in &self.bins {
            if pairs.is_empty() {
                return Err(Error::InsufficientPairs { r: *r });
            }
        }
        Ok(())
    }
}

/// One bin of a structure function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureBin {
    pub k: usize,
    pub r: f64,
    pub pairs: usize,
    /// Mean of `(X(x) - X(y))²` over samples and pairs.
    pub mean: f64,
    /// Largest per-pair sample mean of `(X(x) - X(y))²`.
    pub sup: f64,
}

/// Bins of `(X(x) - X(y))²` computed from a second-moment (or covariance) matrix.
pub fn structure_from_moments(moments: &Mat<f64>, bins: &DistanceBins) -> Result<Vec<StructureBin>> {
    bins.require_nonempty()?;
    Ok(bins
        .bins
        .iter()
        .map(|(k, r, pairs)| {
            let mut sum = 0.0;
            let mut sup = 0.0f64;
            for &(i, j) in pairs {
                let v = moments[(i, i)] + moments[(j, j)] - 2.0 * moments[(i, j)];
                sum += v;
                sup = sup.max(v);
            }
            StructureBin { k: *k, r: *r, pairs: pairs.len(), mean: sum / pairs.len() as f64, sup }
        })
        .collect())
}

/// Monte Carlo structure function of `X_s^m` over `n` fields on dyadic bins `k = 1..=m`.
pub fn structure_function(
    graph: &GasketGraph,
    spec: &SpectralDecomposition,
    s: f64,
    n: usize,
    seed: u64,
) -> Result<Vec<StructureBin>> {
    if !(s > CONSTANTS.critical_s) {
        return Err(Error::Parameter(format!(
            "structure function needs s > {:.6} (pointwise regime), got {s}",
            CONSTANTS.critical_s
        )));
    }
    if n < 100 {
        return Err(Error::Parameter(format!("structure function needs n >= 100, got {n}")));
    }
    let bins = DistanceBins::new(graph, graph.level());
    let ens = sample_ensemble(spec, s, n, seed);
    structure_from_moments(&second_moments(&ens), &bins)
}
