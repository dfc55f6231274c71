//! Tensor-product Chebyshev grids for matrix-free spectral differentiation.

use faer::Mat;
use num_complex::Complex64;

use super::cheb::{cgl_diff_on, cgl_nodes_on};
use crate::error::{Error, Result};

/// Minimum number of nodes per direction.
pub const MIN_NODES: usize = 3;
/// Guard on the growth `(n - 1)^4 / h^2` of the second-derivative matrix norm.
pub const MAX_CONDITION: f64 = 1e13;

#[derive(Debug, Clone)]
pub struct TensorGrid {
    pub intervals: Vec<(f64, f64)>,
    pub nodes: Vec<Vec<f64>>,
    diff: Vec<Mat<f64>>,
}

impl TensorGrid {
    pub fn new(intervals: &[(f64, f64)], sizes: &[usize]) -> Result<Self> {
        assert_eq!(intervals.len(), sizes.len());
        let mut nodes = Vec::new();
        let mut diff = Vec::new();
        for (&(lo, hi), &n) in intervals.iter().zip(sizes) {
            if n < MIN_NODES || !(hi > lo) {
                return Err(Error::GridTooCoarse(format!("{n} nodes on [{lo}, {hi}]")));
            }
            let half = 0.5 * (hi - lo);
            let estimate = ((n - 1) as f64).powi(4) / (half * half);
            if estimate > MAX_CONDITION {
                return Err(Error::IllConditioned { estimate });
            }
            nodes.push(cgl_nodes_on(n, lo, hi));
            diff.push(cgl_diff_on(n, lo, hi));
        }
        Ok(TensorGrid { intervals: intervals.to_vec(), nodes, diff })
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.nodes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.nodes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Multi-index of a flat index; the last direction varies fastest.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let sizes = self.sizes();
        let mut idx = vec![0; sizes.len()];
        for d in (0..sizes.len()).rev() {
            idx[d] = flat % sizes[d];
            flat /= sizes[d];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat).iter().enumerate().map(|(d, &i)| self.nodes[d][i]).collect()
    }

    /// Samples a function at every grid point.
    pub fn sample<F: FnMut(&[f64]) -> Complex64>(&self, mut f: F) -> Vec<Complex64> {
        (0..self.len()).map(|k| f(&self.point(k))).collect()
    }

    /// Spectral derivative along direction `d`.
    pub fn diff(&self, d: usize, v: &[Complex64]) -> Vec<Complex64> {
        let sizes = self.sizes();
        let n = sizes[d];
        let stride: usize = sizes[d + 1..].iter().product();
        let outer: usize = sizes[..d].iter().product();
        let dm = &self.diff[d];
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * n * stride + s;
                for i in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        acc += v[base + j * stride] * dm[(i, j)];
                    }
                    out[base + i * stride] = acc;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_polynomial_derivatives() {
        let g = TensorGrid::new(&[(-1.0, 0.5), (0.0, 2.0)], &[6, 5]).unwrap();
        let v = g.sample(|p| Complex64::new(p[0].powi(3) * p[1] * p[1], p[1]));
        let d0 = g.diff(0, &v);
        let d1 = g.diff(1, &v);
        for k in 0..g.len() {
            let p = g.point(k);
            assert!((d0[k] - Complex64::new(3.0 * p[0] * p[0] * p[1] * p[1], 0.0)).norm() < 1e-12);
            assert!((d1[k] - Complex64::new(2.0 * p[0].powi(3) * p[1], 1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(matches!(TensorGrid::new(&[(0.0, 1.0)], &[2]), Err(Error::GridTooCoarse(_))));
    }
}
