use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::cheb::{bary_eval, bary_weights, cgl_bary_weights, cgl_coeffs, cgl_nodes_on};

use super::assemble::ModeProblem;
use super::solve::QnmMode;

pub const DEFAULT_SLOPE_MIN: f64 = 0.05;
pub const DEFAULT_N_CHEB: usize = 64;
/// Coefficients below this fraction of the largest one are treated as noise.
pub const RELATIVE_FLOOR: f64 = 1e-13;

/// An eigenfunction `v(r, theta) = sin^m(theta) w(r, cos theta)` with `w` on the full tensor grid.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    pub r: Vec<f64>,
    /// All Gauss–Legendre nodes in `x = cos theta`, ascending.
    pub x: Vec<f64>,
    /// `w[i * x.len() + j] = w(r_i, x_j)`.
    pub w: Vec<Complex64>,
    pub m: usize,
    r_weights: Vec<f64>,
    x_weights: Vec<f64>,
}

impl Eigenfunction {
    pub fn from_mode(problem: &ModeProblem, mode: &QnmMode) -> Result<Self> {
        let block = problem
            .blocks
            .get(mode.block)
            .ok_or_else(|| Error::InvalidParams(format!("no parity block {}", mode.block)))?;
        let na = block.angular.len();
        let nr = problem.radial.r.len();
        if mode.eigenvector.len() != nr * na {
            return Err(Error::InvalidParams("eigenvector does not match its block".into()));
        }
        let x = block.angular.full_nodes.clone();
        let mut w = Vec::with_capacity(nr * x.len());
        for i in 0..nr {
            w.extend(block.angular.unfold(&mode.eigenvector[i * na..(i + 1) * na]));
        }
        Ok(Eigenfunction {
            r: problem.radial.r.clone(),
            r_weights: cgl_bary_weights(nr),
            x_weights: bary_weights(&x),
            x,
            w,
            m: problem.grid.m(),
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        let lo = self.r.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Spectral interpolant of `v` at `(r, theta)`.
    pub fn eval(&self, r: f64, theta: f64) -> Complex64 {
        let nx = self.x.len();
        let xc = theta.cos();
        let col: Vec<Complex64> = (0..self.r.len())
            .map(|i| {
                let row = &self.w[i * nx..(i + 1) * nx];
                let re: Vec<f64> = row.iter().map(|z| z.re).collect();
                let im: Vec<f64> = row.iter().map(|z| z.im).collect();
                Complex64::new(
                    bary_eval(&self.x, &self.x_weights, &re, xc),
                    bary_eval(&self.x, &self.x_weights, &im, xc),
                )
            })
            .collect();
        let re: Vec<f64> = col.iter().map(|z| z.re).collect();
        let im: Vec<f64> = col.iter().map(|z| z.im).collect();
        let wv = Complex64::new(
            bary_eval(&self.r, &self.r_weights, &re, r),
            bary_eval(&self.r, &self.r_weights, &im, r),
        );
        wv * theta.sin().powi(self.m as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    AnalyticConsistent,
    Inconclusive,
    NonAnalyticFlagged,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFit {
    pub interval: (f64, f64),
    pub coefficients: Vec<f64>,
    pub noise_floor: f64,
    /// Number of leading coefficients whose tail envelope exceeds the noise floor.
    pub significant: usize,
    /// True when the envelope reaches the noise floor before the last coefficient.
    pub resolved: bool,
    /// Decades per coefficient.
    pub slope: f64,
    pub r_squared: f64,
    /// Residual sums of squares of the geometric and root-exponential models.
    pub rss_linear: f64,
    pub rss_root: f64,
    pub verdict: Verdict,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - rss / syy } else { 1.0 };
    (slope, r2, rss)
}

/// Classifies the decay of Chebyshev coefficient magnitudes.
///
/// The fit runs over the tail envelope `e_n = max_{j >= n} |c_j|`, which removes
/// parity zeros and keeps the fit monotone. A geometric rate needs the envelope to
/// reach the noise floor within the available coefficients; once it does, the floor
/// crossing joins the fit and a log-envelope that is better described by a line in
/// `n` than by one in `sqrt(n)` counts as geometric even when it is not straight.
pub fn classify_decay(interval: (f64, f64), coefficients: Vec<f64>, slope_min: f64) -> DecayFit {
    let n = coefficients.len();
    let top = coefficients.iter().cloned().fold(0.0, f64::max);
    let noise_floor = (RELATIVE_FLOOR * top).max(f64::MIN_POSITIVE / f64::EPSILON);
    let mut env = coefficients.clone();
    for i in (0..n.saturating_sub(1)).rev() {
        env[i] = env[i].max(env[i + 1]);
    }
    let significant = env.iter().take_while(|&&e| e > noise_floor).count();
    let resolved = significant < n;
    let mut fit = DecayFit {
        interval,
        coefficients,
        noise_floor,
        significant,
        resolved,
        slope: 0.0,
        r_squared: 0.0,
        rss_linear: 0.0,
        rss_root: 0.0,
        verdict: Verdict::Inconclusive,
    };
    if significant == 0 {
        return fit;
    }
    let mut ns: Vec<f64> = (0..significant).map(|i| i as f64).collect();
    let mut logs: Vec<f64> = env[..significant].iter().map(|e| e.log10()).collect();
    if resolved {
        // The envelope has reached the floor at index `significant`.
        ns.push(significant as f64);
        logs.push(noise_floor.log10());
    }
    if significant <= 3 {
        fit.slope = (noise_floor.log10() - logs[0]) / significant as f64;
        fit.r_squared = 1.0;
    } else {
        let (slope, r2, rss) = least_squares(&ns, &logs);
        let roots: Vec<f64> = ns.iter().map(|v| v.sqrt()).collect();
        let (_, _, rss_root) = least_squares(&roots, &logs);
        fit.slope = slope;
        fit.r_squared = r2;
        fit.rss_linear = rss;
        fit.rss_root = rss_root;
    }
    let steep = fit.slope <= -slope_min;
    let convex = fit.rss_linear <= fit.rss_root;
    fit.verdict = if resolved && steep && (fit.r_squared >= 0.9 || convex || significant <= 4) {
        Verdict::AnalyticConsistent
    } else if !steep || (!resolved && fit.rss_root < fit.rss_linear) {
        Verdict::NonAnalyticFlagged
    } else {
        Verdict::Inconclusive
    };
    fit
}

/// Chebyshev coefficient decay of `f` on `[lo, hi]` from `n` Lobatto samples.
pub fn chebyshev_decay(f: impl Fn(f64) -> Complex64, lo: f64, hi: f64, n: usize, slope_min: f64) -> DecayFit {
    let nodes = cgl_nodes_on(n, lo, hi);
    let vals: Vec<Complex64> = nodes.iter().map(|&r| f(r)).collect();
    let re = cgl_coeffs(&vals.iter().map(|z| z.re).collect::<Vec<_>>());
    let im = cgl_coeffs(&vals.iter().map(|z| z.im).collect::<Vec<_>>());
    let mags = re.iter().zip(&im).map(|(a, b)| a.hypot(*b)).collect();
    classify_decay((lo, hi), mags, slope_min)
}

/// Decay certificate for an eigenfunction on `[r_h - delta, r_h + delta]` along `theta`.
pub fn analyticity_fit(
    v: &Eigenfunction,
    r_h: f64,
    delta: f64,
    theta: f64,
    n_cheb: usize,
    slope_min: f64,
) -> Result<DecayFit> {
    let (dlo, dhi) = v.domain();
    let (lo, hi) = (r_h - delta, r_h + delta);
    if !(delta > 0.0 && lo >= dlo && hi <= dhi) {
        return Err(Error::IntervalOutOfDomain { lo, hi, dom_lo: dlo, dom_hi: dhi });
    }
    Ok(chebyshev_decay(|r| v.eval(r, theta), lo, hi, n_cheb, slope_min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_analytic_consistent() {
        let fit = chebyshev_decay(|r| Complex64::new(r.powi(3) - 2.0 * r, 0.5), 1.0, 3.0, 64, DEFAULT_SLOPE_MIN);
        assert_eq!(fit.verdict, Verdict::AnalyticConsistent);
        assert!(fit.significant <= 4);
    }

    #[test]
    fn runge_slope_matches_bernstein_parameter() {
        // Poles at r_h +- i; on [r_h - d, r_h + d] they sit at +-i/d in the reference variable.
        let (rh, d) = (2.0, 0.5);
        let fit = chebyshev_decay(|r| Complex64::from(1.0 / (1.0 + (r - rh).powi(2))), rh - d, rh + d, 64, DEFAULT_SLOPE_MIN);
        let z = 1.0 / d;
        let rho = z + (z * z + 1.0).sqrt();
        assert_eq!(fit.verdict, Verdict::AnalyticConsistent);
        assert!((fit.slope + rho.log10()).abs() < 0.02 * rho.log10(), "{} vs {}", fit.slope, -rho.log10());
    }

    #[test]
    fn smooth_non_analytic_bump_is_flagged() {
        let rh = 2.0;
        let bump = |r: f64| Complex64::from(if r > rh { (-1.0 / (r - rh)).exp() } else { 0.0 });
        let fit = chebyshev_decay(bump, rh - 0.4, rh + 0.4, 64, DEFAULT_SLOPE_MIN);
        assert_ne!(fit.verdict, Verdict::AnalyticConsistent);
        assert_eq!(fit.verdict, Verdict::NonAnalyticFlagged);
    }

    #[test]
    fn zero_function_is_inconclusive() {
        let fit = chebyshev_decay(|_| Complex64::new(0.0, 0.0), 0.0, 1.0, 16, DEFAULT_SLOPE_MIN);
        assert_eq!(fit.verdict, Verdict::Inconclusive);
        assert_eq!(fit.significant, 0);
    }
}
