//! Deterministic low-discrepancy sample points.

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in `base`, a point of `[0, 1)`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Halton sequence in up to eight dimensions. The seed offsets the start index.
#[derive(Debug, Clone)]
pub struct Halton {
    dim: usize,
    next: u64,
}

impl Halton {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!((1..=PRIMES.len()).contains(&dim));
        // Index 0 is the origin in every coordinate; skip it.
        Halton { dim, next: 1 + seed.wrapping_mul(7919) % 1_000_003 }
    }

    /// Next point of the unit cube.
    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.next;
        self.next += 1;
        PRIMES[..self.dim].iter().map(|&b| radical_inverse(i, b)).collect()
    }

    /// Next point with each coordinate mapped affinely onto the given box.
    pub fn next_in(&mut self, bounds: &[(f64, f64)]) -> Vec<f64> {
        assert_eq!(bounds.len(), self.dim);
        self.next_point()
            .into_iter()
            .zip(bounds)
            .map(|(u, &(lo, hi))| lo + (hi - lo) * u)
            .collect()
    }
}
