//! Chebyshev–Gauss–Lobatto nodes, differentiation, coefficients and interpolation.

use faer::Mat;
use std::f64::consts::PI;

/// Nodes `cos(pi j / (n-1))`, ordered from `+1` down to `-1`.
pub fn cgl_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two Chebyshev nodes");
    (0..n)
        .map(|j| {
            // Symmetric evaluation keeps the nodes exactly antisymmetric.
            let k = (n - 1) as f64;
            (PI * (k - 2.0 * j as f64) / (2.0 * k)).sin()
        })
        .collect()
}

/// Nodes mapped affinely onto `[lo, hi]`; index 0 sits at `hi`.
pub fn cgl_nodes_on(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    cgl_nodes(n)
        .into_iter()
        .map(|x| 0.5 * (lo + hi) + 0.5 * (hi - lo) * x)
        .collect()
}

/// First-derivative collocation matrix on the reference nodes.
///
/// Off-diagonal entries use the trigonometric form of the node differences and
/// the diagonal is fixed by the negative-sum rule, so constants are
/// differentiated to zero to rounding.
pub fn cgl_diff(n: usize) -> Mat<f64> {
    let k = (n - 1) as f64;
    let c = |j: usize| -> f64 {
        let s = if j == 0 || j == n - 1 { 2.0 } else { 1.0 };
        if j % 2 == 0 {
            s
        } else {
            -s
        }
    };
    let mut d = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            if i == j {
                continue;
            }
            // x_i - x_j = -2 sin(pi (i+j)/(2k)) sin(pi (i-j)/(2k))
            let diff = -2.0
                * (PI * (i + j) as f64 / (2.0 * k)).sin()
                * (PI * (i as f64 - j as f64) / (2.0 * k)).sin();
            let v = c(i) / c(j) / diff;
            d[(i, j)] = v;
            row += v;
        }
        d[(i, i)] = -row;
    }
    d
}

/// First-derivative matrix on nodes mapped to `[lo, hi]`.
pub fn cgl_diff_on(n: usize, lo: f64, hi: f64) -> Mat<f64> {
    let s = 2.0 / (hi - lo);
    let mut d = cgl_diff(n);
    for i in 0..n {
        for j in 0..n {
            d[(i, j)] *= s;
        }
    }
    d
}

/// Chebyshev coefficients of the interpolant through values at the CGL nodes.
pub fn cgl_coeffs(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 2);
    let k = (n - 1) as f64;
    let mut c = vec![0.0; n];
    for (m, cm) in c.iter_mut().enumerate() {
        let mut s = 0.0;
        for (j, v) in values.iter().enumerate() {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            s += w * v * (PI * (m * j) as f64 / k).cos();
        }
        *cm = 2.0 * s / k;
    }
    c[0] *= 0.5;
    c[n - 1] *= 0.5;
    c
}

/// Evaluates `sum c_m T_m(x)` by Clenshaw recurrence.
pub fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &cm in c.iter().skip(1).rev() {
        let b0 = 2.0 * x * b1 - b2 + cm;
        b2 = b1;
        b1 = b0;
    }
    x * b1 - b2 + c.first().copied().unwrap_or(0.0)
}

/// Barycentric weights for arbitrary distinct nodes.
pub fn bary_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let scale = {
        let lo = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = nodes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        0.25 * (hi - lo).max(f64::MIN_POSITIVE) * 2.0
    };
    (0..n)
        .map(|j| {
            let mut p = 1.0;
            for k in 0..n {
                if k != j {
                    p *= (nodes[j] - nodes[k]) / scale;
                }
            }
            1.0 / p
        })
        .collect()
}

/// Barycentric weights of the CGL nodes (closed form).
pub fn cgl_bary_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * s
            } else {
                s
            }
        })
        .collect()
}

/// Second-form barycentric interpolation.
pub fn bary_eval(nodes: &[f64], weights: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xj, &wj), &fj) in nodes.iter().zip(weights).zip(values) {
        let d = x - xj;
        if d == 0.0 {
            return fj;
        }
        let t = wj / d;
        num += t * fj;
        den += t;
    }
    num / den
}

/// Differentiation matrix on arbitrary nodes from barycentric weights.
pub fn bary_diff(nodes: &[f64]) -> Mat<f64> {
    let n = nodes.len();
    let w = bary_weights(nodes);
    let mut d = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                row += v;
            }
        }
        d[(i, i)] = -row;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_antisymmetric_and_ordered() {
        let x = cgl_nodes(9);
        assert_eq!(x[0], 1.0);
        assert_eq!(x[8], -1.0);
        assert_eq!(x[4], 0.0);
        for j in 0..9 {
            assert_eq!(x[j], -x[8 - j]);
        }
    }

    #[test]
    fn differentiates_polynomials_exactly() {
        let n = 12;
        let (lo, hi) = (-0.7, 2.3);
        let x = cgl_nodes_on(n, lo, hi);
        let d = cgl_diff_on(n, lo, hi);
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += d[(i, j)] * (x[j].powi(5) - 2.0 * x[j]);
            }
            let exact = 5.0 * x[i].powi(4) - 2.0;
            assert!((s - exact).abs() < 1e-11 * (1.0 + exact.abs()), "{s} vs {exact}");
        }
    }

    #[test]
    fn coefficients_round_trip_through_clenshaw() {
        let c_true = [0.3, -1.2, 0.5, 0.0, 0.25, 0.125];
        let x = cgl_nodes(6);
        let v: Vec<f64> = x.iter().map(|&t| clenshaw(&c_true, t)).collect();
        let c = cgl_coeffs(&v);
        for (a, b) in c.iter().zip(c_true.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn barycentric_interpolation_is_exact_on_polynomials() {
        let x = cgl_nodes(7);
        let w = cgl_bary_weights(7);
        let v: Vec<f64> = x.iter().map(|t| t.powi(6) - t).collect();
        let y = 0.3141;
        assert!((bary_eval(&x, &w, &v, y) - (y.powi(6) - y)).abs() < 1e-14);
        let wg = bary_weights(&x);
        assert!((bary_eval(&x, &wg, &v, y) - (y.powi(6) - y)).abs() < 1e-13);
    }
}
