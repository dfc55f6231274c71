//! Reduced operator of `-box` for an arbitrary metric with Killing coordinates,
//! evaluated pointwise from the jet of the reduced function.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Value, gradient and Hessian of a function of the free coordinates.
#[derive(Debug, Clone)]
pub struct Jet {
    pub value: Complex64,
    pub grad: Vec<Complex64>,
    pub hess: Vec<Vec<Complex64>>,
}

/// Inverse metric and `sqrt|det g|` at a point, in the full coordinate system.
pub type MetricFn<'a> = dyn Fn(&[f64]) -> Result<(DMatrix<f64>, f64)> + 'a;

/// `-box` applied to `exp(-i sum_a omega_a x_a) v` and divided by the exponential.
///
/// `killing` lists the coordinates `x_a` the metric does not depend on, with their
/// frequencies; the remaining coordinates, in increasing order, are the ones the jet
/// differentiates. Metric derivatives use five-point differences with step `h_rel max(1, |x|)`.
pub fn reduced_operator_at(
    metric: &MetricFn,
    killing: &[(usize, Complex64)],
    x: &[f64],
    jet: &Jet,
    h_rel: f64,
) -> Result<Complex64> {
    let dim = x.len();
    let free: Vec<usize> = (0..dim).filter(|i| killing.iter().all(|(a, _)| a != i)).collect();
    if jet.grad.len() != free.len() || jet.hess.len() != free.len() {
        return Err(Error::InvalidParams("jet size does not match the free coordinates".into()));
    }
    let (gi, sq) = metric(x)?;
    let i1 = Complex64::new(0.0, 1.0);

    // d_i (sqrt|g| g^{i nu}) / sqrt|g| for every nu, summed over free i.
    let mut div = vec![0.0; dim];
    for &i in &free {
        let h = h_rel * x[i].abs().max(1.0);
        let at = |d: f64| -> Result<Vec<f64>> {
            let mut y = x.to_vec();
            y[i] += d;
            let (g, s) = metric(&y)?;
            Ok((0..dim).map(|nu| s * g[(i, nu)]).collect())
        };
        let (m2, m1, p1, p2) = (at(-2.0 * h)?, at(-h)?, at(h)?, at(2.0 * h)?);
        for nu in 0..dim {
            div[nu] += (m2[nu] - 8.0 * m1[nu] + 8.0 * p1[nu] - p2[nu]) / (12.0 * h) / sq;
        }
    }

    let mut boxv = Complex64::new(0.0, 0.0);
    for (p, &i) in free.iter().enumerate() {
        for (q, &j) in free.iter().enumerate() {
            boxv += gi[(i, j)] * jet.hess[p][q];
        }
    }
    for (q, &j) in free.iter().enumerate() {
        boxv += div[j] * jet.grad[q];
    }
    for &(a, w) in killing {
        let d = -i1 * w;
        boxv += d * div[a] * jet.value;
        for (q, &j) in free.iter().enumerate() {
            boxv += 2.0 * d * gi[(a, j)] * jet.grad[q];
        }
        for &(b, w2) in killing {
            boxv += d * (-i1 * w2) * gi[(a, b)] * jet.value;
        }
    }
    Ok(-boxv)
}

/// Largest pointwise differences between the general reduction of `-box` on the
/// Misner metric and the two closed forms of the reduced Misner operator.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MisnerCheck {
    pub polynomials: usize,
    /// Against `d1(x1 d1 v) - sum_j dj^2 v + 2 i sigma v`.
    pub max_diff_displayed: f64,
    /// Against `d1(x1 d1 v) - sum_j dj^2 v + 2 i sigma d1 v`.
    pub max_diff_derived: f64,
}

/// Inverse Misner metric in dimension `dim` and `sqrt|det g| = 1`.
pub fn misner_inverse(dim: usize, x1: f64) -> DMatrix<f64> {
    let mut gi = DMatrix::<f64>::identity(dim, dim);
    gi[(0, 0)] = 0.0;
    gi[(0, 1)] = 1.0;
    gi[(1, 0)] = 1.0;
    gi[(1, 1)] = -x1;
    gi
}

/// Compares the general reduction with both closed forms on the nodes of `grid`.
pub fn misner_cross_check(
    model: &crate::gnc::MisnerModel,
    grid: &crate::numerics::tensor::TensorGrid,
    polys: &[crate::numerics::poly::MultiPoly],
) -> Result<MisnerCheck> {
    let dim = model.dim;
    let metric = |x: &[f64]| -> Result<(DMatrix<f64>, f64)> { Ok((misner_inverse(dim, x[1]), 1.0)) };
    let killing = [(0usize, model.sigma)];
    let (mut dd, mut dv) = (0.0f64, 0.0f64);
    for p in polys {
        if p.dim != dim - 1 {
            return Err(Error::InvalidParams("polynomial dimension does not match the quotient".into()));
        }
        let v = grid.sample(|x| p.eval(x));
        let displayed = crate::gnc::misner_reduced_operator(model, grid, &v)?;
        let derived = crate::gnc::misner_reduced_operator_derived(model, grid, &v)?;
        for k in 0..grid.len() {
            let q = grid.point(k);
            let mut x = vec![0.0; dim];
            x[1..].copy_from_slice(&q);
            let general = reduced_operator_at(&metric, &killing, &x, &p.jet(&q), 1e-3)?;
            dd = dd.max((general - displayed[k]).norm());
            dv = dv.max((general - derived[k]).norm());
        }
    }
    Ok(MisnerCheck { polynomials: polys.len(), max_diff_displayed: dd, max_diff_derived: dv })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gnc::MisnerModel;
    use crate::numerics::halton::Halton;
    use crate::numerics::poly::MultiPoly;
    use crate::numerics::tensor::TensorGrid;

    #[test]
    fn misner_general_reduction_matches_the_derived_form() {
        let grid = TensorGrid::new(&[(-0.5, 0.5), (-1.0, 1.0), (-1.0, 1.0)], &[7, 6, 6]).unwrap();
        let mut seq = Halton::new(2, 3);
        let polys: Vec<MultiPoly> = (0..3).map(|_| MultiPoly::quasi_random(3, 3, &mut seq)).collect();
        let zero = misner_cross_check(&MisnerModel::new(4, Complex64::new(0.0, 0.0)).unwrap(), &grid, &polys).unwrap();
        assert!(zero.max_diff_displayed < 1e-10 && zero.max_diff_derived < 1e-10);
        let m = MisnerModel::new(4, Complex64::new(0.7, 0.2)).unwrap();
        let chk = misner_cross_check(&m, &grid, &polys).unwrap();
        assert!(chk.max_diff_derived < 1e-10, "{chk:?}");
        assert!(chk.max_diff_displayed > 1e-3);
    }
}
