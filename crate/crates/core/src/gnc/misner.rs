//! Misner's flat model `2 dx1 dx0 + x1 dx0^2 + sum_j dxj^2`, whose horizon `x1 = 0`
//! has surface gravity `-1/2` for `nabla_W W = kappa W`, `W = d_x0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::tensor::TensorGrid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MisnerModel {
    /// Spacetime dimension; the quotient by `d_x0` has `dim - 1` coordinates `(x1, x2, ...)`.
    pub dim: usize,
    pub sigma: Complex64,
}

impl MisnerModel {
    pub fn new(dim: usize, sigma: Complex64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!("Misner model needs dimension >= 2, got {dim}")));
        }
        Ok(MisnerModel { dim, sigma })
    }

    fn check(&self, grid: &TensorGrid, v: &[Complex64]) -> Result<()> {
        if grid.dim() != self.dim - 1 || v.len() != grid.len() {
            return Err(Error::InvalidParams("grid does not match the quotient dimension".into()));
        }
        Ok(())
    }
}

fn transverse(model: &MisnerModel, grid: &TensorGrid, v: &[Complex64]) -> Vec<Complex64> {
    let d1 = grid.diff(0, v);
    let x1d1: Vec<Complex64> = (0..grid.len()).map(|k| d1[k] * grid.point(k)[0]).collect();
    let mut out = grid.diff(0, &x1d1);
    for j in 1..model.dim - 1 {
        let dj = grid.diff(j, &grid.diff(j, v));
        for (o, d) in out.iter_mut().zip(dj) {
            *o -= d;
        }
    }
    out
}

/// `d1(x1 d1 v) - sum_j dj^2 v + 2 i sigma v`, the reduced operator in its displayed form.
pub fn misner_reduced_operator(model: &MisnerModel, grid: &TensorGrid, v: &[Complex64]) -> Result<Vec<Complex64>> {
    model.check(grid, v)?;
    let mut out = transverse(model, grid, v);
    let c = Complex64::new(0.0, 2.0) * model.sigma;
    for (o, vi) in out.iter_mut().zip(v) {
        *o += c * vi;
    }
    Ok(out)
}

/// `d1(x1 d1 v) - sum_j dj^2 v + 2 i sigma d1 v`, obtained by substituting
/// `u = exp(-i sigma x0) v` into `-box u`.
pub fn misner_reduced_operator_derived(
    model: &MisnerModel,
    grid: &TensorGrid,
    v: &[Complex64],
) -> Result<Vec<Complex64>> {
    model.check(grid, v)?;
    let mut out = transverse(model, grid, v);
    let c = Complex64::new(0.0, 2.0) * model.sigma;
    for (o, d) in out.iter_mut().zip(grid.diff(0, v)) {
        *o += c * d;
    }
    Ok(out)
}
