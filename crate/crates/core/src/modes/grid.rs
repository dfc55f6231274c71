use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Spacetime;
use crate::numerics::cheb::{bary_diff, cgl_diff_on, cgl_nodes_on};
use crate::numerics::legendre::gauss_legendre;

pub const MIN_RADIAL_NODES: usize = 16;
pub const MIN_ANGULAR_NODES: usize = 8;
/// Upper bound on `|D_rr| (L/2)^2`, the dimensionless size of the second radial derivative.
pub const MAX_RADIAL_CONDITION: f64 = 1e10;

/// Collocation grid for the reduced operator.
///
/// The unknown is `v = sin^|k|(theta) w(r, cos theta)`; `w` is sampled at the
/// Chebyshev–Gauss–Lobatto points of `[r_e - c1, r_c + c2]` and at the
/// Gauss–Legendre points in `x = cos theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub n_r: usize,
    pub n_theta: usize,
    pub c1: f64,
    pub c2: f64,
    pub k: i32,
}

impl SpectralGrid {
    pub fn new(st: &Spacetime, n_r: usize, n_theta: usize, c1: f64, c2: f64, k: i32) -> Result<Self> {
        let g = SpectralGrid { n_r, n_theta, c1, c2, k };
        g.validate(st)?;
        Ok(g)
    }

    /// Grid with margins `c2 = (r_c - r_e) / 10` and `c1` the smaller of that and half the gap to the inner root.
    pub fn with_default_margins(st: &Spacetime, n_r: usize, n_theta: usize, k: i32) -> Result<Self> {
        let c = 0.1 * (st.r_c()? - st.r_e());
        let c1 = c.min(0.5 * (st.r_e() - st.horizons.r_inner));
        Self::new(st, n_r, n_theta, c1, c, k)
    }

    pub fn validate(&self, st: &Spacetime) -> Result<()> {
        st.r_c()?;
        if self.n_r < MIN_RADIAL_NODES || self.n_theta < MIN_ANGULAR_NODES {
            return Err(Error::GridTooCoarse(format!(
                "need n_r >= {MIN_RADIAL_NODES} and n_theta >= {MIN_ANGULAR_NODES}, got {} x {}",
                self.n_r, self.n_theta
            )));
        }
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::InvalidParams(format!("margins must be positive, got {} and {}", self.c1, self.c2)));
        }
        let lo = st.r_e() - self.c1;
        if lo <= st.horizons.r_inner {
            return Err(Error::InvalidParams(format!(
                "r_e - c1 = {lo} does not exceed the inner root {}",
                st.horizons.r_inner
            )));
        }
        // |D_rr| (L/2)^2 grows like n^4 / 3 independently of the interval.
        let estimate = (self.n_r as f64).powi(4) / 3.0;
        if estimate > MAX_RADIAL_CONDITION {
            return Err(Error::GridTooCoarse(format!("radial differentiation too ill-conditioned ({estimate:e})")));
        }
        Ok(())
    }

    pub fn radial_interval(&self, st: &Spacetime) -> Result<(f64, f64)> {
        Ok((st.r_e() - self.c1, st.r_c()? + self.c2))
    }

    /// The grid used for the persistence check: `ceil(1.5 n_r)` radial and `n_theta + 4` angular nodes.
    pub fn refined(&self) -> Self {
        SpectralGrid { n_r: (3 * self.n_r).div_ceil(2), n_theta: self.n_theta + 4, ..*self }
    }

    pub fn m(&self) -> usize {
        self.k.unsigned_abs() as usize
    }
}

/// Parity of `w` under `x -> -x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    /// No parity reduction; all angular nodes are used.
    Full,
}

/// Angular collocation data for one parity sector.
#[derive(Debug, Clone)]
pub struct AngularBasis {
    pub parity: Parity,
    /// Nodes in `x = cos theta` carried by this sector.
    pub x: Vec<f64>,
    pub dx: Mat<f64>,
    pub dxx: Mat<f64>,
    /// All Gauss–Legendre nodes, for reconstruction.
    pub full_nodes: Vec<f64>,
}

impl AngularBasis {
    pub fn new(n_theta: usize, parity: Parity) -> Self {
        let (nodes, _) = gauss_legendre(n_theta);
        let d = bary_diff(&nodes);
        let d2 = &d * &d;
        let n = nodes.len();
        let idx: Vec<usize> = match parity {
            Parity::Full => (0..n).collect(),
            Parity::Even => (0..n).filter(|&j| nodes[j] >= 0.0).collect(),
            Parity::Odd => (0..n).filter(|&j| nodes[j] > 0.0).collect(),
        };
        let sign = match parity {
            Parity::Odd => -1.0,
            _ => 1.0,
        };
        let fold = |m: &Mat<f64>| -> Mat<f64> {
            Mat::from_fn(idx.len(), idx.len(), |a, b| {
                let (i, j) = (idx[a], idx[b]);
                let mirror = n - 1 - j;
                if parity == Parity::Full || mirror == j {
                    m[(i, j)]
                } else {
                    m[(i, j)] + sign * m[(i, mirror)]
                }
            })
        };
        AngularBasis {
            parity,
            x: idx.iter().map(|&j| nodes[j]).collect(),
            dx: fold(&d),
            dxx: fold(&d2),
            full_nodes: nodes,
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Values of `w` at all Gauss–Legendre nodes, ascending in `x`.
    pub fn unfold<T: Copy + std::ops::Neg<Output = T> + Default>(&self, w: &[T]) -> Vec<T> {
        let n = self.full_nodes.len();
        let mut out = vec![T::default(); n];
        match self.parity {
            Parity::Full => out.copy_from_slice(w),
            Parity::Even | Parity::Odd => {
                let start = n - self.x.len();
                for (a, &v) in w.iter().enumerate() {
                    let j = start + a;
                    out[j] = v;
                    let mirror = n - 1 - j;
                    if mirror != j {
                        out[mirror] = if self.parity == Parity::Odd { -v } else { v };
                    }
                }
            }
        }
        out
    }
}

/// Radial collocation data.
#[derive(Debug, Clone)]
pub struct RadialBasis {
    pub r: Vec<f64>,
    pub dr: Mat<f64>,
    pub drr: Mat<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl RadialBasis {
    pub fn new(n: usize, lo: f64, hi: f64) -> Self {
        let dr = cgl_diff_on(n, lo, hi);
        let drr = &dr * &dr;
        RadialBasis { r: cgl_nodes_on(n, lo, hi), dr, drr, lo, hi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folded_derivatives_are_exact_on_polynomials_of_each_parity() {
        for parity in [Parity::Even, Parity::Odd, Parity::Full] {
            let b = AngularBasis::new(9, parity);
            let f = |x: f64| match parity {
                Parity::Even => (x.powi(6) - 2.0 * x * x, 6.0 * x.powi(5) - 4.0 * x, 30.0 * x.powi(4) - 4.0),
                _ => (x.powi(5) + x, 5.0 * x.powi(4) + 1.0, 20.0 * x.powi(3)),
            };
            let v: Vec<f64> = b.x.iter().map(|&x| f(x).0).collect();
            for i in 0..b.len() {
                let d1: f64 = (0..b.len()).map(|j| b.dx[(i, j)] * v[j]).sum();
                let d2: f64 = (0..b.len()).map(|j| b.dxx[(i, j)] * v[j]).sum();
                assert!((d1 - f(b.x[i]).1).abs() < 1e-11, "{parity:?}");
                assert!((d2 - f(b.x[i]).2).abs() < 1e-10, "{parity:?}");
            }
        }
    }

    #[test]
    fn parity_blocks_partition_the_nodes() {
        for n in [8, 9, 12] {
            let e = AngularBasis::new(n, Parity::Even);
            let o = AngularBasis::new(n, Parity::Odd);
            assert_eq!(e.len(), n.div_ceil(2));
            assert_eq!(o.len(), n / 2);
            let w: Vec<f64> = o.x.iter().map(|x| x * x * x).collect();
            let full = o.unfold(&w);
            for (x, v) in e.full_nodes.iter().zip(full) {
                assert!((x.powi(3) - v).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn grid_validation() {
        let st = Spacetime::from_values(0.0, 1.0, 0.02).unwrap();
        assert!(SpectralGrid::with_default_margins(&st, 48, 12, 0).is_ok());
        assert!(matches!(SpectralGrid::with_default_margins(&st, 8, 12, 0), Err(Error::GridTooCoarse(_))));
        assert!(SpectralGrid::new(&st, 32, 8, 0.0, 0.1, 0).is_err());
        let g = SpectralGrid::with_default_margins(&st, 48, 12, 0).unwrap().refined();
        assert_eq!((g.n_r, g.n_theta), (72, 16));
        let flat = Spacetime::from_values(0.0, 1.0, 0.0).unwrap();
        assert!(matches!(SpectralGrid::new(&flat, 32, 8, 0.1, 0.1, 0), Err(Error::LambdaZeroUnsupported)));
    }
}
