use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::charts::Horizon;
use crate::geometry::opspec::{Coefficient, WaveOperatorSpec};
use crate::geometry::Spacetime;

use super::grid::{AngularBasis, Parity, RadialBasis, SpectralGrid};

/// Time–angle frame of the mode ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// `u = exp(-i (sigma t* + k phi*)) v`.
    Star,
    /// `u = exp(-i (sigma_W t* + k (phi* - Omega_h t*))) v`, so that `sigma_W = sigma + Omega_h k`.
    Horizon(Horizon),
}

/// Quadratic pencil of one parity sector.
#[derive(Debug, Clone)]
pub struct ParityBlock {
    pub angular: AngularBasis,
    pub p0: Mat<Complex64>,
    pub p1: Mat<Complex64>,
    pub p2: Mat<Complex64>,
}

impl ParityBlock {
    pub fn parity(&self) -> Parity {
        self.angular.parity
    }

    pub fn dim(&self) -> usize {
        self.p0.nrows()
    }

    /// `P(sigma) = P2 sigma^2 + P1 sigma + P0`.
    pub fn pencil(&self, sigma: Complex64) -> Mat<Complex64> {
        let s2 = sigma * sigma;
        Mat::from_fn(self.dim(), self.dim(), |i, j| s2 * self.p2[(i, j)] + sigma * self.p1[(i, j)] + self.p0[(i, j)])
    }

    /// `P'(sigma) = 2 P2 sigma + P1`.
    pub fn pencil_deriv(&self, sigma: Complex64) -> Mat<Complex64> {
        let two = 2.0 * sigma;
        Mat::from_fn(self.dim(), self.dim(), |i, j| two * self.p2[(i, j)] + self.p1[(i, j)])
    }

    pub fn apply(&self, sigma: Complex64, w: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let s2 = sigma * sigma;
        (0..n)
            .map(|i| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, wj) in w.iter().enumerate() {
                    acc += (s2 * self.p2[(i, j)] + sigma * self.p1[(i, j)] + self.p0[(i, j)]) * wj;
                }
                acc
            })
            .collect()
    }
}

/// Discretised reduced operator `rho^2 P` acting on `w`, `v = sin^|k|(theta) w`.
///
/// Unknowns are ordered radius-major: index `i * n_ang + a` holds `w(r_i, x_a)`.
#[derive(Debug, Clone)]
pub struct ModeProblem {
    pub spacetime: Spacetime,
    pub op: WaveOperatorSpec,
    pub grid: SpectralGrid,
    pub frame: Frame,
    /// Angular velocity subtracted in the mode ansatz; zero in the star frame.
    pub omega: f64,
    pub radial: RadialBasis,
    pub blocks: Vec<ParityBlock>,
}

impl ModeProblem {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(ParityBlock::dim).sum()
    }

    /// True when the reduced equation for `(sigma, k)` conjugates to the one for `(-conj sigma, -k)`.
    pub fn has_conjugation_symmetry(&self) -> bool {
        self.op.is_real()
    }
}

/// Constant coefficients and a vanishing `a^theta` keep `w -> w(-x)` a symmetry.
fn parity_preserving(op: &WaveOperatorSpec) -> bool {
    let simple = |c: &Coefficient| !matches!(c, Coefficient::Function(_));
    op.first_order.iter().all(simple) && simple(&op.potential) && op.first_order[3].is_zero()
}

pub fn assemble_reduced_operator(
    st: &Spacetime,
    op: &WaveOperatorSpec,
    grid: &SpectralGrid,
    frame: Frame,
) -> Result<ModeProblem> {
    if !st.has_cosmological_horizon() {
        return Err(Error::LambdaZeroUnsupported);
    }
    grid.validate(st)?;
    let (lo, hi) = grid.radial_interval(st)?;
    let radial = RadialBasis::new(grid.n_r, lo, hi);
    let omega = match frame {
        Frame::Star => 0.0,
        Frame::Horizon(h) => st.omega(h)?,
    };
    let parities: &[Parity] = if parity_preserving(op) { &[Parity::Even, Parity::Odd] } else { &[Parity::Full] };
    let blocks = parities
        .iter()
        .map(|&p| {
            let ang = AngularBasis::new(grid.n_theta, p);
            assemble_block(st, op, grid, &radial, ang, omega)
        })
        .collect();
    Ok(ModeProblem { spacetime: *st, op: op.clone(), grid: *grid, frame, omega, radial, blocks })
}

fn assemble_block(
    st: &Spacetime,
    op: &WaveOperatorSpec,
    grid: &SpectralGrid,
    radial: &RadialBasis,
    ang: AngularBasis,
    omega: f64,
) -> ParityBlock {
    let p = &st.params;
    let (a, b, alpha) = (p.a, p.b(), p.alpha());
    let b2 = b * b;
    let k = grid.k as f64;
    let m = grid.m() as f64;
    let nr = radial.r.len();
    let na = ang.len();
    let n = nr * na;
    let i1 = Complex64::new(0.0, 1.0);
    let z = Complex64::new(0.0, 0.0);
    let mut p0 = Mat::<Complex64>::zeros(n, n);
    let mut p1 = Mat::<Complex64>::zeros(n, n);
    let mut p2 = Mat::<Complex64>::zeros(n, n);
    let ds = st.star_slope_deriv();
    let [at, ar, aphi, ath] = &op.first_order;

    for i in 0..nr {
        let r = radial.r[i];
        let mu = p.mu(r);
        let dmu = p.dmu(r);
        let f = st.star_f(r);
        let s = st.star_slope(r);
        let r2a2 = r * r + a * a;
        let z1 = b * s * r2a2;
        let dz1 = b * (ds * r2a2 + 2.0 * s * r);
        let z0 = b * s * (a - omega * r2a2);
        let dz0 = b * (ds * (a - omega * r2a2) - 2.0 * omega * s * r);
        for ai in 0..na {
            let x = ang.x[ai];
            let sin2 = 1.0 - x * x;
            let sin = sin2.sqrt();
            let theta = x.acos();
            let c = p.c_of_x(x);
            let dc = 2.0 * alpha * x;
            let rho2 = r * r + a * a * x * x;
            let htt = -b2 * f * r2a2 * r2a2 + b2 * a * a * sin2 / c;
            let htp = -b2 * f * a * r2a2 + b2 * a / c;
            let row = i * na + ai;

            // Angular part with the singular k^2 term of H^{phi phi} absorbed.
            let v_ang = m * m * (1.0 + alpha * (x * x + x + 1.0)) * (1.0 + alpha * (x * x - x + 1.0)) / c
                + m * x * dc
                + m * c;
            let c_xx = c * sin2;
            let c_x = dc * sin2 - 2.0 * (m + 1.0) * x * c;
            for bi in 0..na {
                let col = i * na + bi;
                p0[(row, col)] -= Complex64::from(c_xx * ang.dxx[(ai, bi)] + c_x * ang.dx[(ai, bi)]);
            }
            for j in 0..nr {
                let col = j * na + ai;
                p0[(row, col)] += Complex64::from(-mu * radial.drr[(i, j)] - dmu * radial.dr[(i, j)])
                    + 2.0 * i1 * k * z0 * radial.dr[(i, j)];
                p1[(row, col)] += 2.0 * i1 * z1 * radial.dr[(i, j)];
            }
            let r_xx = -b2 * f * a * a - 2.0 * omega * htp + omega * omega * htt;
            p0[(row, row)] += Complex64::from(v_ang + k * k * r_xx) + i1 * k * dz0;
            p1[(row, row)] += Complex64::from(2.0 * k * (htp - omega * htt)) + i1 * dz1;
            p2[(row, row)] += Complex64::from(htt);

            let (ct, cr, cp, cth, pot) = (
                at.eval(r, theta),
                ar.eval(r, theta),
                aphi.eval(r, theta),
                ath.eval(r, theta),
                op.potential.eval(r, theta),
            );
            if ct != z {
                p1[(row, row)] -= i1 * rho2 * ct;
                p0[(row, row)] += i1 * omega * k * rho2 * ct;
            }
            if cr != z {
                for j in 0..nr {
                    p0[(row, j * na + ai)] += rho2 * cr * radial.dr[(i, j)];
                }
            }
            if cth != z {
                // d_theta (sin^m w) / sin^m = -sin d_x w + m x w / sin.
                for bi in 0..na {
                    p0[(row, i * na + bi)] -= rho2 * cth * sin * ang.dx[(ai, bi)];
                }
                p0[(row, row)] += rho2 * cth * m * x / sin;
            }
            p0[(row, row)] += rho2 * (pot - i1 * k * cp);
        }
    }
    ParityBlock { angular: ang, p0, p1, p2 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_annihilated_at_zero_frequency() {
        let st = Spacetime::from_values(0.1, 1.0, 0.02).unwrap();
        let grid = SpectralGrid::with_default_margins(&st, 20, 8, 0).unwrap();
        let prob = assemble_reduced_operator(&st, &WaveOperatorSpec::wave(), &grid, Frame::Star).unwrap();
        let even = &prob.blocks[0];
        assert_eq!(even.parity(), Parity::Even);
        let one = vec![Complex64::new(1.0, 0.0); even.dim()];
        let out = even.apply(Complex64::new(0.0, 0.0), &one);
        assert!(out.iter().all(|v| v.norm() < 1e-9), "{}", out.iter().map(|v| v.norm()).fold(0.0, f64::max));
    }

    #[test]
    fn horizon_frame_is_a_shift_of_the_star_frame() {
        let st = Spacetime::from_values(0.1, 1.0, 0.02).unwrap();
        let grid = SpectralGrid::with_default_margins(&st, 16, 8, 1).unwrap();
        let op = WaveOperatorSpec::klein_gordon(0.1);
        let star = assemble_reduced_operator(&st, &op, &grid, Frame::Star).unwrap();
        let hor = assemble_reduced_operator(&st, &op, &grid, Frame::Horizon(Horizon::Event)).unwrap();
        let sigma = Complex64::new(0.3, 0.05);
        let sw = sigma + hor.omega * grid.k as f64;
        let w: Vec<Complex64> = (0..star.blocks[1].dim()).map(|i| Complex64::new((i as f64).sin(), (0.3 * i as f64).cos())).collect();
        let a = star.blocks[1].apply(sigma, &w);
        let b = hor.blocks[1].apply(sw, &w);
        let scale = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12 * scale);
        }
    }

    #[test]
    fn lambda_zero_is_rejected() {
        let st = Spacetime::from_values(0.1, 1.0, 0.0).unwrap();
        let grid = SpectralGrid { n_r: 20, n_theta: 8, c1: 0.1, c2: 0.1, k: 0 };
        let err = assemble_reduced_operator(&st, &WaveOperatorSpec::wave(), &grid, Frame::Star).unwrap_err();
        assert!(matches!(err, Error::LambdaZeroUnsupported));
    }
}
