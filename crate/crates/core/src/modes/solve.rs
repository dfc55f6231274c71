use faer::linalg::solvers::Solve;
use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::assemble::{assemble_reduced_operator, ModeProblem, ParityBlock};
use super::grid::Parity;

/// Closed rectangle in the complex `sigma` plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Window { re_min, re_max, im_min, im_max }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    pub fn grown(&self, by: f64) -> Self {
        Window::new(self.re_min - by, self.re_max + by, self.im_min - by, self.im_max + by)
    }

    pub fn is_bounded(&self) -> bool {
        [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite())
            && self.re_min <= self.re_max
            && self.im_min <= self.im_max
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Largest distance between the two resolutions' eigenvalues for a persistent mode.
    pub persistence_tol: f64,
    pub residual_tol: f64,
    pub max_polish_steps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { persistence_tol: 1e-6, residual_tol: 1e-8, max_polish_steps: 6 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QnmMode {
    pub sigma: Complex64,
    pub parity: Parity,
    /// Index into `ModeProblem::blocks`.
    pub block: usize,
    pub residual: f64,
    pub refined_sigma: Complex64,
    pub refined_residual: f64,
    /// `|sigma - refined_sigma|`.
    pub agreement: f64,
    /// Values of `w` on the block's grid, scaled so that the largest entry is `1`.
    pub eigenvector: Vec<Complex64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QnmResult {
    pub k: i32,
    pub window: Window,
    pub modes: Vec<QnmMode>,
    /// Eigenvalues of the base pencil inside the window, before filtering.
    pub candidates: usize,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn mode_residual(problem: &ModeProblem, block: usize, sigma: Complex64, v: &[Complex64]) -> Result<f64> {
    let blk = problem
        .blocks
        .get(block)
        .ok_or_else(|| Error::InvalidParams(format!("no parity block {block}")))?;
    if v.len() != blk.dim() {
        return Err(Error::InvalidParams(format!("vector length {} does not match block size {}", v.len(), blk.dim())));
    }
    let nv = norm(v);
    if nv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(norm(&blk.apply(sigma, v)) / nv)
}

/// Eigenvalues of the companion linearisation `[[0, I], [-P2^-1 P0, -P2^-1 P1]]`.
pub fn pencil_eigenvalues(block: &ParityBlock) -> Result<Vec<Complex64>> {
    let n = block.dim();
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        let d = block.p2[(i, i)];
        if d.norm() == 0.0 {
            return Err(Error::EigensolverFailure(format!("leading coefficient vanishes at row {i}")));
        }
        diag.push(d);
    }
    let mut c = Mat::<Complex64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        c[(i, n + i)] = Complex64::new(1.0, 0.0);
        let inv = 1.0 / diag[i];
        for j in 0..n {
            c[(n + i, j)] = -inv * block.p0[(i, j)];
            c[(n + i, n + j)] = -inv * block.p1[(i, j)];
        }
    }
    c.eigenvalues().map_err(|e| Error::EigensolverFailure(format!("{e:?}")))
}

fn mat_vec(m: &Mat<Complex64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum()).collect()
}

fn lu_solve(m: &Mat<Complex64>, rhs: &[Complex64]) -> Vec<Complex64> {
    let lu = m.partial_piv_lu();
    let b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    (0..rhs.len()).map(|i| x[(i, 0)]).collect()
}

fn finite(v: &[Complex64]) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Newton refinement of an approximate eigenvalue, normalised by `u^H v = 1` with `u` the first iterate.
pub fn polish(block: &ParityBlock, sigma0: Complex64, steps: usize) -> (Complex64, Vec<Complex64>) {
    let n = block.dim();
    let start: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.1 * ((i * 7919) % 97) as f64 / 97.0, 0.05 * ((i * 104729) % 89) as f64 / 89.0))
        .collect();
    let mut v = lu_solve(&block.pencil(sigma0), &start);
    if !finite(&v) || norm(&v) == 0.0 {
        v = start;
    }
    let s = norm(&v);
    v.iter_mut().for_each(|z| *z /= s);
    let u = v.clone();
    let mut sigma = sigma0;
    for _ in 0..steps {
        let y = lu_solve(&block.pencil(sigma), &mat_vec(&block.pencil_deriv(sigma), &v));
        let uy: Complex64 = u.iter().zip(&y).map(|(a, b)| a.conj() * b).sum();
        if !finite(&y) || uy.norm() == 0.0 {
            break;
        }
        let step = 1.0 / uy;
        sigma -= step;
        v = y.into_iter().map(|z| z * step).collect();
        if step.norm() <= 1e-15 * sigma.norm().max(1.0) {
            break;
        }
    }
    normalise(&mut v);
    (sigma, v)
}

/// Scales `v` so that its largest entry equals one.
fn normalise(v: &mut [Complex64]) {
    if let Some(&p) = v.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())) {
        if p.norm() > 0.0 {
            v.iter_mut().for_each(|z| *z /= p);
        }
    }
}

/// Quasinormal modes of `problem` inside `window`, confirmed on the refined grid.
pub fn qnm_solve(problem: &ModeProblem, window: &Window, opts: &SolveOptions) -> Result<QnmResult> {
    if !window.is_bounded() {
        return Err(Error::InvalidParams("search window must be bounded".into()));
    }
    let refined = assemble_reduced_operator(&problem.spacetime, &problem.op, &problem.grid.refined(), problem.frame)?;
    let search = window.grown(10.0 * opts.persistence_tol);
    let mut modes: Vec<QnmMode> = Vec::new();
    let mut candidates = 0;
    for (bi, (blk, rblk)) in problem.blocks.iter().zip(&refined.blocks).enumerate() {
        let base: Vec<Complex64> = pencil_eigenvalues(blk)?.into_iter().filter(|z| search.contains(*z)).collect();
        if base.is_empty() {
            continue;
        }
        candidates += base.iter().filter(|z| window.contains(**z)).count();
        let fine: Vec<Complex64> = pencil_eigenvalues(rblk)?.into_iter().filter(|z| search.grown(1e-3).contains(*z)).collect();
        let mut found: Vec<QnmMode> = Vec::new();
        for z0 in base {
            let (sigma, v) = polish(blk, z0, opts.max_polish_steps);
            if !window.contains(sigma) || found.iter().any(|m| (m.sigma - sigma).norm() < 1e-9) {
                continue;
            }
            let Some(&zr) = fine.iter().min_by(|a, b| (**a - sigma).norm().total_cmp(&(**b - sigma).norm())) else {
                continue;
            };
            if (zr - sigma).norm() > 1e3 * opts.persistence_tol {
                continue;
            }
            let (rsigma, rv) = polish(rblk, zr, opts.max_polish_steps);
            let residual = norm(&blk.apply(sigma, &v)) / norm(&v);
            let refined_residual = norm(&rblk.apply(rsigma, &rv)) / norm(&rv);
            let agreement = (rsigma - sigma).norm();
            if agreement < opts.persistence_tol && residual < opts.residual_tol && refined_residual < opts.residual_tol {
                found.push(QnmMode {
                    sigma,
                    parity: blk.parity(),
                    block: bi,
                    residual,
                    refined_sigma: rsigma,
                    refined_residual,
                    agreement,
                    eigenvector: v,
                });
            }
        }
        modes.extend(found);
    }
    modes.sort_by(|a, b| a.sigma.im.abs().total_cmp(&b.sigma.im.abs()).then(a.sigma.re.total_cmp(&b.sigma.re)));
    Ok(QnmResult { k: problem.grid.k, window: *window, modes, candidates })
}
