//! Fourth-order central finite differences.

/// `f'(x)` from the five-point stencil with step `h`.
pub fn d1<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Same stencil applied to array-valued functions.
pub fn d1_array<const N: usize, F: FnMut(f64) -> [f64; N]>(mut f: F, x: f64, h: f64) -> [f64; N] {
    let m2 = f(x - 2.0 * h);
    let m1 = f(x - h);
    let p1 = f(x + h);
    let p2 = f(x + 2.0 * h);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartics() {
        let f = |x: f64| 3.0 * x.powi(4) - x.powi(3) + 2.0;
        let x = 0.7f64;
        let exact = 12.0 * x.powi(3) - 3.0 * x * x;
        assert!((d1(f, x, 0.1) - exact).abs() < 1e-12);
    }

    #[test]
    fn error_scales_like_h4() {
        let e1 = (d1(f64::sin, 0.4, 0.1) - 0.4f64.cos()).abs();
        let e2 = (d1(f64::sin, 0.4, 0.05) - 0.4f64.cos()).abs();
        let ratio = e1 / e2;
        assert!((ratio - 16.0).abs() < 0.5, "ratio {ratio}");
    }
}
