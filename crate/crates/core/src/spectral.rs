//! Dirichlet Laplacians on `G_m`, their spectra, and spectral calculus.
//!
//! Eigenfunctions are normalized in `L²(V_m, μ_m)`:
//! `(1/a_m) Σ_p Φ_i(p) Φ_j(p) = δ_ij`. With this convention the Riesz kernel
//! `G_s^m = Σ_i λ_i^{-s} Φ_i ⊗ Φ_i` acts by `(1/a_m) Σ_q G_s^m(p, q) f(q)`.

use faer::{Mat, Side};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gasket::{build_graph, check_len, Address, DyadicPoint, GasketGraph};

/// Relative eigen-residual accepted by [`eigendecompose`].
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Orthonormality defect accepted by [`eigendecompose`].
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// `-Δ_m` restricted to interior vertices.
#[derive(Debug, Clone)]
pub struct DirichletOperator {
    level: usize,
    interior: Vec<usize>,
    vertex_count: usize,
    /// Interior-interior neighbour slots of every interior row.
    adjacency: Vec<Vec<usize>>,
    matrix: Mat<f64>,
}

pub fn laplacian_scale(m: usize) -> f64 {
    5f64.powi(m as i32)
}

pub fn assemble_dirichlet_laplacian(graph: &GasketGraph) -> Result<DirichletOperator> {
    let n = graph.interior_count();
    if n == 0 {
        return Err(Error::DegenerateLevel(graph.level()));
    }
    let scale = laplacian_scale(graph.level());
    let adjacency: Vec<Vec<usize>> = graph
        .interior()
        .iter()
        .map(|&v| graph.neighbors(v).iter().filter_map(|&q| graph.interior_slot(q)).collect())
        .collect();
    let mut matrix = Mat::<f64>::zeros(n, n);
    for (i, row) in adjacency.iter().enumerate() {
        matrix[(i, i)] = 4.0 * scale;
        for &j in row {
            matrix[(i, j)] = -scale;
        }
    }
    Ok(DirichletOperator {
        level: graph.level(),
        interior: graph.interior().to_vec(),
        vertex_count: graph.vertex_count(),
        adjacency,
        matrix,
    })
}

impl DirichletOperator {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.interior.len()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// `-Δ_m x` for `x` on interior vertices, without touching the dense matrix.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        apply_sparse(&self.adjacency, laplacian_scale(self.level), x)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }
}

fn apply_sparse(adjacency: &[Vec<usize>], scale: f64, x: &[f64]) -> Vec<f64> {
    adjacency
        .iter()
        .enumerate()
        .map(|(i, row)| scale * (4.0 * x[i] - row.iter().map(|&j| x[j]).sum::<f64>()))
        .collect()
}

/// Full spectrum of `-Δ_m` with `μ_m`-orthonormal eigenfunctions.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    level: usize,
    a_m: f64,
    interior: Vec<usize>,
    vertex_count: usize,
    eigenvalues: Vec<f64>,
    /// Column `i` holds `Φ_i` on the interior vertices.
    eigenvectors: Mat<f64>,
}

/// Diagnostics measured while decomposing.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecompositionQuality {
    pub max_relative_residual: f64,
    pub max_orthonormality_defect: f64,
}

pub fn eigendecompose(op: &DirichletOperator) -> Result<SpectralDecomposition> {
    eigendecompose_checked(op).map(|(s, _)| s)
}

/// Decomposes and reports the measured residual and orthonormality defect.
pub fn eigendecompose_checked(
    op: &DirichletOperator,
) -> Result<(SpectralDecomposition, DecompositionQuality)> {
    let n = op.dim();
    let a_m = crate::gasket::atom_scale(op.level);
    let evd = op
        .matrix
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let eigenvalues: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let u = evd.U();
    let norm = a_m.sqrt();
    let mut eigenvectors = Mat::<f64>::zeros(n, n);
    for j in 0..n {
        let col = u.col(j);
        let peak = (0..n).map(|i| col[i].abs()).fold(0.0, f64::max);
        let first = (0..n).find(|&i| col[i].abs() > 1e-10 * peak).unwrap_or(0);
        let sign = if col[first] < 0.0 { -norm } else { norm };
        for i in 0..n {
            eigenvectors[(i, j)] = sign * col[i];
        }
    }
    let spec = SpectralDecomposition {
        level: op.level,
        a_m,
        interior: op.interior.clone(),
        vertex_count: op.vertex_count,
        eigenvalues,
        eigenvectors,
    };

    let mut max_res = 0.0f64;
    for j in 0..n {
        let phi = spec.eigenvectors.col_as_slice(j);
        let lphi = op.apply(phi);
        let lam = spec.eigenvalues[j];
        let res: f64 = lphi.iter().zip(phi).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
        let scale = lam.abs() * phi.iter().map(|x| x * x).sum::<f64>().sqrt();
        max_res = max_res.max(res / scale);
    }
    if max_res > RESIDUAL_TOL || spec.eigenvalues[0] <= 0.0 {
        return Err(Error::Residual { what: "relative eigen-residual", value: max_res, tolerance: RESIDUAL_TOL });
    }
    let gram = spec.eigenvectors.transpose() * &spec.eigenvectors;
    let mut max_orth = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            max_orth = max_orth.max((gram[(i, j)] / a_m - target).abs());
        }
    }
    if max_orth > ORTHONORMALITY_TOL {
        return Err(Error::Residual {
            what: "orthonormality defect",
            value: max_orth,
            tolerance: ORTHONORMALITY_TOL,
        });
    }
    Ok((spec, DecompositionQuality { max_relative_residual: max_res, max_orthonormality_defect: max_orth }))
}

/// Builds `G_m`, assembles `-Δ_m` and decomposes it.
pub fn spectrum_at(m: usize) -> Result<(GasketGraph, SpectralDecomposition)> {
    let graph = build_graph(m)?;
    let op = assemble_dirichlet_laplacian(&graph)?;
    let spec = eigendecompose(&op)?;
    Ok((graph, spec))
}

/// Result of a spectral multiplier applied to a function on `V_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Applied {
    /// Values on all of `V_m`, zero on `V_0`.
    pub values: Vec<f64>,
    /// The input had nonzero boundary values, which were dropped.
    pub boundary_projected: bool,
}

impl SpectralDecomposition {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn a_m(&self) -> f64 {
        self.a_m
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// `λ_1 ≤ ⋯ ≤ λ_{N_m}`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `Φ_i` on the interior vertices, `i` zero-based.
    pub fn eigenvector_interior(&self, i: usize) -> &[f64] {
        self.eigenvectors.col_as_slice(i)
    }

    pub fn eigenvector_matrix(&self) -> &Mat<f64> {
        &self.eigenvectors
    }

    /// `Φ_i` on all of `V_m`.
    pub fn eigenfunction(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.vertex_count];
        for (&v, &x) in self.interior.iter().zip(self.eigenvector_interior(i)) {
            out[v] = x;
        }
        out
    }

    fn interior_of(&self, f: &[f64]) -> Result<(Vec<f64>, bool)> {
        check_len(self.level, self.vertex_count, f.len())?;
        let mut projected = false;
        let mut inside = vec![true; self.vertex_count];
        let mut vals = Vec::with_capacity(self.interior.len());
        for &v in &self.interior {
            inside[v] = false;
            vals.push(f[v]);
        }
        for (v, &b) in inside.iter().enumerate() {
            if b && f[v] != 0.0 {
                projected = true;
            }
        }
        Ok((vals, projected))
    }

    /// `⟨f, Φ_i⟩_{μ_m}` for every `i`; boundary values are ignored.
    pub fn coefficients(&self, f: &[f64]) -> Result<Vec<f64>> {
        let (vals, _) = self.interior_of(f)?;
        Ok(self.coefficients_interior(&vals))
    }

    pub(crate) fn coefficients_interior(&self, vals: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let col = self.eigenvector_interior(i);
                col.iter().zip(vals).map(|(a, b)| a * b).sum::<f64>() / self.a_m
            })
            .collect()
    }

    /// `Σ_i c_i Φ_i` on all of `V_m`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Result<Vec<f64>> {
        check_len(self.level, self.len(), coeffs.len())?;
        let interior = self.synthesize_interior(coeffs);
        let mut out = vec![0.0; self.vertex_count];
        for (&v, x) in self.interior.iter().zip(interior) {
            out[v] = x;
        }
        Ok(out)
    }

    pub(crate) fn synthesize_interior(&self, coeffs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for (j, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.eigenvector_interior(j)) {
                *o += c * p;
            }
        }
        out
    }

    /// Applies the multiplier `φ(λ_i)` to `f`.
    pub fn apply_multiplier<F: Fn(f64) -> f64>(&self, f: &[f64], multiplier: F) -> Result<Applied> {
        let (vals, boundary_projected) = self.interior_of(f)?;
        let coeffs: Vec<f64> = self
            .coefficients_interior(&vals)
            .into_iter()
            .zip(&self.eigenvalues)
            .map(|(c, &lam)| c * multiplier(lam))
            .collect();
        Ok(Applied { values: self.synthesize(&coeffs)?, boundary_projected })
    }

    /// `(-Δ_m)^{-s} f`; negative `s` gives positive powers.
    pub fn apply_fractional(&self, s: f64, f: &[f64]) -> Result<Applied> {
        self.apply_multiplier(f, |lam| lam.powf(-s))
    }

    /// `P_t^m f = e^{tΔ_m} f`.
    pub fn heat_apply(&self, t: f64, f: &[f64]) -> Result<Applied> {
        if !(t > 0.0) {
            return Err(Error::Parameter(format!("heat time must be positive, got {t}")));
        }
        self.apply_multiplier(f, |lam| (-lam * t).exp())
    }

    /// `G_s^m` on the interior vertices.
    pub fn riesz_kernel(&self, s: f64) -> Result<RieszKernelMatrix> {
        if !(s >= 0.0) {
            return Err(Error::Parameter(format!("Riesz parameter must be >= 0, got {s}")));
        }
        let n = self.len();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|l| l.powf(-s)).collect();
        let scaled = Mat::<f64>::from_fn(n, n, |i, j| self.eigenvectors[(i, j)] * weights[j]);
        let matrix = &scaled * self.eigenvectors.transpose();
        // symmetrize rounding noise
        let matrix = Mat::<f64>::from_fn(n, n, |i, j| 0.5 * (matrix[(i, j)] + matrix[(j, i)]));
        Ok(RieszKernelMatrix { level: self.level, s, a_m: self.a_m, interior: self.interior.clone(), matrix })
    }

    /// `max_p |Φ_i(p)|` for every `i`.
    pub fn sup_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.eigenvector_interior(i).iter().map(|x| x.abs()).fold(0.0, f64::max))
            .collect()
    }

    /// Eigenvalues divided by `5^m`.
    pub fn scaled_eigenvalues(&self) -> Vec<f64> {
        let s = laplacian_scale(self.level);
        self.eigenvalues.iter().map(|l| l / s).collect()
    }
}

/// `G_s^m(x, y) = Σ_i λ_i^{-s} Φ_i(x) Φ_i(y)` on interior vertices.
#[derive(Debug, Clone)]
pub struct RieszKernelMatrix {
    pub level: usize,
    pub s: f64,
    a_m: f64,
    interior: Vec<usize>,
    matrix: Mat<f64>,
}

impl RieszKernelMatrix {
    pub fn dim(&self) -> usize {
        self.interior.len()
    }

    /// Entry at interior slots `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// `(1/a_m) Σ_q G(p, q) f(q)` on all of `V_m` (boundary entries of `f` ignored).
    pub fn integrate_against(&self, f: &[f64], vertex_count: usize) -> Result<Vec<f64>> {
        check_len(self.level, vertex_count, f.len())?;
        let vals: Vec<f64> = self.interior.iter().map(|&v| f[v]).collect();
        let mut out = vec![0.0; vertex_count];
        for (i, &p) in self.interior.iter().enumerate() {
            let mut acc = 0.0;
            for (j, &x) in vals.iter().enumerate() {
                acc += self.matrix[(i, j)] * x;
            }
            out[p] = acc / self.a_m;
        }
        Ok(out)
    }

    /// Smallest eigenvalue, used to check positive semidefiniteness.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = self
            .matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
        Ok(vals[0])
    }
}

/// `-(1/a_m) Σ_{p ∉ V_0} Δ_m f(p) g(p)` for `f`, `g` vanishing on `V_0`.
pub fn dirichlet_energy(graph: &GasketGraph, f: &[f64], g: &[f64]) -> Result<f64> {
    let n = graph.vertex_count();
    check_len(graph.level(), n, f.len())?;
    check_len(graph.level(), n, g.len())?;
    let bad = graph.boundary_magnitude(f).max(graph.boundary_magnitude(g));
    if bad != 0.0 {
        return Err(Error::BoundaryViolation(bad));
    }
    let scale = laplacian_scale(graph.level());
    let mut acc = 0.0;
    for &p in graph.interior() {
        let lap: f64 = graph.neighbors(p).iter().map(|&q| f[q] - f[p]).sum::<f64>() * scale;
        acc -= lap * g[p];
    }
    Ok(acc / graph.a_m())
}

/// Level-to-level comparison of scaled spectra through `z ↦ z(5 - z)`.
#[derive(Debug, Clone, Serialize)]
pub struct DecimationReport {
    pub coarse_level: usize,
    pub fine_level: usize,
    /// Fine eigenvalues whose image lands on a coarse eigenvalue.
    pub matched: usize,
    /// Fine eigenvalues at the exceptional values 2, 5, 6 (not mapped).
    pub exceptional: usize,
    pub unmatched: usize,
}

/// Soft diagnostic: maps fine scaled eigenvalues through `z(5 - z)` and looks
/// them up in the coarse scaled spectrum.
pub fn decimation_check(coarse: &SpectralDecomposition, fine: &SpectralDecomposition, tol: f64) -> DecimationReport {
    let coarse_z = coarse.scaled_eigenvalues();
    let mut report = DecimationReport {
        coarse_level: coarse.level,
        fine_level: fine.level,
        matched: 0,
        exceptional: 0,
        unmatched: 0,
    };
    for z in fine.scaled_eigenvalues() {
        if [2.0, 5.0, 6.0].iter().any(|e| (z - e).abs() < tol) {
            report.exceptional += 1;
            continue;
        }
        let image = z * (5.0 - z);
        if coarse_z.iter().any(|c| (c - image).abs() < tol * c.max(1.0)) {
            report.matched += 1;
        } else {
            report.unmatched += 1;
        }
    }
    report
}

/// Conjugate gradients for `-Δ_M x = b` on interior vertices.
fn conjugate_gradient(
    adjacency: &[Vec<usize>],
    scale: f64,
    b: &[f64],
    x0: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut x = x0;
    let ax = apply_sparse(adjacency, scale, &x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let target = rel_tol * rel_tol * dot(b, b);
    for _ in 0..max_iter {
        if rr <= target {
            return Ok(x);
        }
        let ap = apply_sparse(adjacency, scale, &p);
        let alpha = rr / dot(&p, &ap);
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..p.len() {
            p[i] = r[i] + beta * p[i];
        }
    }
    if rr <= target {
        Ok(x)
    } else {
        Err(Error::NoConvergence { iterations: max_iter, residual: (rr / dot(b, b)).sqrt() })
    }
}

/// Ground state `(λ_1^M, Φ_1^M)` of a deep level without a dense eigensolve.
///
/// A dense solve at a coarse level is extended level by level with the
/// spectral-decimation rule and then polished by inverse iteration, so the
/// result is accurate even if the extension rule were only approximate.
/// `Φ_1^M` is normalized in `L²(μ_M)` and positive.
pub fn ground_state(graph: &GasketGraph) -> Result<(f64, Vec<f64>)> {
    let target = graph.level();
    if target == 0 {
        return Err(Error::DegenerateLevel(0));
    }
    let base = target.min(4);
    let (mut coarse, spec) = spectrum_at(base)?;
    let mut lambda = spec.eigenvalues()[0];
    let mut values = spec.eigenfunction(0);
    for k in base..target {
        let fine = if k + 1 == target { graph.clone() } else { build_graph(k + 1)? };
        let z = lambda / laplacian_scale(k);
        let z_fine = 0.5 * (5.0 - (25.0 - 4.0 * z).sqrt());
        let mut next = vec![0.0; fine.vertex_count()];
        for addr in cell_corner_words(k) {
            let corners: Vec<DyadicPoint> =
                (1..=3).map(|c| Address { word: addr.clone(), corner: c }.point()).collect();
            let u: Vec<f64> = corners.iter().map(|p| values[coarse.index_of(p).unwrap()]).collect();
            for (i, p) in corners.iter().enumerate() {
                next[fine.index_of(p).unwrap()] = u[i];
            }
            for (i, j, l) in [(0, 1, 2), (1, 2, 0), (0, 2, 1)] {
                let mid = midpoint(&corners[i], &corners[j]);
                let val = ((4.0 - z_fine) * (u[i] + u[j]) + 2.0 * u[l])
                    / ((2.0 - z_fine) * (5.0 - z_fine));
                next[fine.index_of(&mid).unwrap()] = val;
            }
        }
        lambda = z_fine * laplacian_scale(k + 1);
        values = next;
        coarse = fine;
    }

    let op_adj: Vec<Vec<usize>> = graph
        .interior()
        .iter()
        .map(|&v| graph.neighbors(v).iter().filter_map(|&q| graph.interior_slot(q)).collect())
        .collect();
    let scale = laplacian_scale(target);
    let mut u: Vec<f64> = graph.interior().iter().map(|&v| values[v]).collect();
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n0 = norm(&u);
    u.iter_mut().for_each(|x| *x /= n0);
    for _ in 0..60 {
        let lu = apply_sparse(&op_adj, scale, &u);
        lambda = lu.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>();
        let res = lu.iter().zip(&u).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt() / lambda;
        if res < 1e-11 {
            break;
        }
        let guess: Vec<f64> = u.iter().map(|x| x / lambda).collect();
        let y = conjugate_gradient(&op_adj, scale, &u, guess, 1e-13, 20 * u.len())?;
        let ny = norm(&y);
        u = y.into_iter().map(|x| x / ny).collect();
    }
    let a = graph.a_m();
    let sign = if u.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let full = graph.extend_by_zero(&u.iter().map(|x| sign * x * a.sqrt()).collect::<Vec<_>>())?;
    Ok((lambda, full))
}

fn midpoint(a: &DyadicPoint, b: &DyadicPoint) -> DyadicPoint {
    let (ax, adx) = a.x_fraction();
    let (at, adt) = a.t_fraction();
    let (bx, bdx) = b.x_fraction();
    let (bt, bdt) = b.t_fraction();
    let den = adx.max(adt).max(bdx).max(bdt) * 2;
    let exp = den.trailing_zeros();
    let lift = |n: i64, d: u64| n * (den / d) as i64;
    DyadicPoint::new((lift(ax, adx) + lift(bx, bdx)) / 2, (lift(at, adt) + lift(bt, bdt)) / 2, exp)
}

fn cell_corner_words(k: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..3usize.pow(k as u32)).map(move |mut c| {
        let mut w = vec![1u8; k];
        for d in (0..k).rev() {
            w[d] = (c % 3) as u8 + 1;
            c /= 3;
        }
        w
    })
}

/// Solves `-Δ_M u = 1` (the torsion function), zero on `V_0`.
pub fn torsion_function(graph: &GasketGraph) -> Result<Vec<f64>> {
    if graph.interior_count() == 0 {
        return Err(Error::DegenerateLevel(graph.level()));
    }
    let adj: Vec<Vec<usize>> = graph
        .interior()
        .iter()
        .map(|&v| graph.neighbors(v).iter().filter_map(|&q| graph.interior_slot(q)).collect())
        .collect();
    let n = adj.len();
    let u = conjugate_gradient(&adj, laplacian_scale(graph.level()), &vec![1.0; n], vec![0.0; n], 1e-13, 50 * n)?;
    graph.extend_by_zero(&u)
}
