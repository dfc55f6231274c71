//! Radial problem for one spherical-harmonic degree at `a = 0`, built on nalgebra
//! with its own Chebyshev differentiation so that it shares no code with the 2-D solver.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::opspec::WaveOperatorSpec;
use crate::geometry::Spacetime;

use super::solve::Window;

/// Pencil `Q(sigma) = Q2 sigma^2 + Q1 sigma + Q0` of the separated radial operator.
#[derive(Debug, Clone)]
pub struct SeparatedProblem {
    pub r: Vec<f64>,
    pub q0: DMatrix<Complex64>,
    pub q1: DMatrix<Complex64>,
    pub q2: DMatrix<Complex64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OracleMode {
    pub sigma: Complex64,
    pub residual: f64,
    /// Distance to the matching eigenvalue with 16 more nodes.
    pub agreement: f64,
}

/// Chebyshev points `cos(pi j / (n - 1))` mapped to `[lo, hi]` and the matching derivative matrix.
fn cheb(n: usize, lo: f64, hi: f64) -> (Vec<f64>, DMatrix<f64>) {
    let big = n - 1;
    let t: Vec<f64> = (0..n).map(|j| (std::f64::consts::PI * j as f64 / big as f64).cos()).collect();
    let cw = |j: usize| (if j == 0 || j == big { 2.0 } else { 1.0 }) * if j % 2 == 0 { 1.0 } else { -1.0 };
    let mut d = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[(i, j)] = cw(i) / cw(j) / (t[i] - t[j]);
            }
        }
        let s: f64 = (0..n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    let half = 0.5 * (hi - lo);
    let r = t.iter().map(|x| lo + half * (x + 1.0)).collect();
    (r, d / half)
}

impl SeparatedProblem {
    pub fn new(st: &Spacetime, op: &WaveOperatorSpec, ell: u32, n: usize, c1: f64, c2: f64) -> Result<Self> {
        if st.params.a != 0.0 {
            return Err(Error::InvalidParams("the separated problem needs a = 0".into()));
        }
        if op.has_first_order() {
            return Err(Error::InvalidParams("the separated problem takes a potential only".into()));
        }
        let rc = st.r_c()?;
        let lo = st.r_e() - c1;
        if lo <= st.horizons.r_inner || c1 <= 0.0 || c2 <= 0.0 {
            return Err(Error::InvalidParams("margins out of range".into()));
        }
        let (r, d) = cheb(n, lo, rc + c2);
        let dd = &d * &d;
        let ll = (ell * (ell + 1)) as f64;
        let ds = st.star_slope_deriv();
        let i1 = Complex64::new(0.0, 1.0);
        let mut q0 = DMatrix::<Complex64>::zeros(n, n);
        let mut q1 = DMatrix::<Complex64>::zeros(n, n);
        let mut q2 = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let x = r[i];
            let (mu, dmu) = (st.params.mu(x), st.params.dmu(x));
            let s = st.star_slope(x);
            let z = s * x * x;
            let dz = ds * x * x + 2.0 * s * x;
            for j in 0..n {
                q0[(i, j)] = Complex64::from(-mu * dd[(i, j)] - dmu * d[(i, j)]);
                q1[(i, j)] = 2.0 * i1 * z * d[(i, j)];
            }
            let v = op.potential.eval(x, 0.5 * std::f64::consts::PI);
            q0[(i, i)] += ll + x * x * v;
            q1[(i, i)] += i1 * dz;
            q2[(i, i)] = Complex64::from(-st.star_f(x) * x.powi(4));
        }
        Ok(SeparatedProblem { r, q0, q1, q2 })
    }

    pub fn pencil(&self, sigma: Complex64) -> DMatrix<Complex64> {
        &self.q2 * (sigma * sigma) + &self.q1 * sigma + &self.q0
    }

    pub fn apply(&self, sigma: Complex64, v: &DVector<Complex64>) -> DVector<Complex64> {
        self.pencil(sigma) * v
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.r.len();
        let mut c = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            c[(i, n + i)] = Complex64::new(1.0, 0.0);
            let inv = 1.0 / self.q2[(i, i)];
            for j in 0..n {
                c[(n + i, j)] = -inv * self.q0[(i, j)];
                c[(n + i, n + j)] = -inv * self.q1[(i, j)];
            }
        }
        let schur = nalgebra::linalg::Schur::try_new(c, 1e-15, 10_000)
            .ok_or_else(|| Error::EigensolverFailure("Schur iteration did not converge".into()))?;
        let ev = schur
            .eigenvalues()
            .ok_or_else(|| Error::EigensolverFailure("Schur form is not triangular".into()))?;
        Ok(ev.iter().copied().collect())
    }

    /// Newton iteration on `(Q(sigma) v = 0, v_0^H v = 1)`; returns `(sigma, v, residual)`.
    pub fn polish(&self, sigma0: Complex64, steps: usize) -> (Complex64, DVector<Complex64>, f64) {
        let n = self.r.len();
        let rhs = DVector::from_fn(n, |i, _| Complex64::new(1.0, 0.01 * i as f64));
        let mut v = self.pencil(sigma0).lu().solve(&rhs).unwrap_or(rhs.clone());
        v /= Complex64::from(v.norm());
        let u = v.clone();
        let mut sigma = sigma0;
        for _ in 0..steps {
            let dq = &self.q2 * (2.0 * sigma) + &self.q1;
            let Some(y) = self.pencil(sigma).lu().solve(&(dq * &v)) else { break };
            let uy = u.dotc(&y);
            if uy.norm() == 0.0 || !uy.re.is_finite() {
                break;
            }
            let step = 1.0 / uy;
            sigma -= step;
            v = y * step;
            if step.norm() <= 1e-15 * sigma.norm().max(1.0) {
                break;
            }
        }
        let res = self.apply(sigma, &v).norm() / v.norm();
        (sigma, v, res)
    }
}

/// Eigenvalues of the separated problem inside `window` that persist when `n` grows by 16.
pub fn separated_oracle(
    st: &Spacetime,
    op: &WaveOperatorSpec,
    ell: u32,
    window: &Window,
    n: usize,
    c1: f64,
    c2: f64,
) -> Result<Vec<OracleMode>> {
    let coarse = SeparatedProblem::new(st, op, ell, n, c1, c2)?;
    let fine = SeparatedProblem::new(st, op, ell, n + 16, c1, c2)?;
    let fine_ev = fine.eigenvalues()?;
    let mut out: Vec<OracleMode> = Vec::new();
    for z in coarse.eigenvalues()?.into_iter().filter(|z| window.grown(1e-4).contains(*z)) {
        let (sigma, _, residual) = coarse.polish(z, 6);
        if !window.contains(sigma) || out.iter().any(|m| (m.sigma - sigma).norm() < 1e-9) {
            continue;
        }
        let Some(&zf) = fine_ev.iter().min_by(|a, b| (**a - sigma).norm().total_cmp(&(**b - sigma).norm())) else {
            continue;
        };
        let (fs, _, fres) = fine.polish(zf, 6);
        let agreement = (fs - sigma).norm();
        if agreement < 1e-8 && residual < 1e-10 && fres < 1e-10 {
            out.push(OracleMode { sigma, residual, agreement });
        }
    }
    out.sort_by(|a, b| a.sigma.im.abs().total_cmp(&b.sigma.im.abs()).then(a.sigma.re.total_cmp(&b.sigma.re)));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matrix_is_exact_on_cubics() {
        let (r, d) = cheb(9, 1.0, 3.0);
        let f = DVector::from_iterator(9, r.iter().map(|x| x * x * x - x));
        let df = &d * f;
        for (x, v) in r.iter().zip(df.iter()) {
            assert!((v - (3.0 * x * x - 1.0)).abs() < 1e-11);
        }
    }

    #[test]
    fn zero_mode_for_the_monopole() {
        let st = Spacetime::from_values(0.0, 1.0, 0.02).unwrap();
        let c = 0.1 * (st.r_c().unwrap() - st.r_e());
        let w = Window::new(-0.05, 0.05, -0.05, 0.05);
        let modes = separated_oracle(&st, &WaveOperatorSpec::wave(), 0, &w, 40, c, c).unwrap();
        assert_eq!(modes.len(), 1);
        assert!(modes[0].sigma.norm() < 1e-10);
        assert!(modes[0].residual < 1e-10);
    }

    #[test]
    fn rotating_backgrounds_are_rejected() {
        let st = Spacetime::from_values(0.1, 1.0, 0.02).unwrap();
        assert!(SeparatedProblem::new(&st, &WaveOperatorSpec::wave(), 0, 20, 0.5, 0.5).is_err());
    }
}
