//! Multivariate complex polynomials with exact first and second derivatives.

use num_complex::Complex64;

use super::halton::Halton;
use crate::modes::Jet;

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    pub dim: usize,
    /// `(exponents, coefficient)` pairs.
    pub terms: Vec<(Vec<u32>, Complex64)>,
}

fn pow_d(x: f64, e: u32, d: u32) -> f64 {
    // d^d/dx^d x^e
    if d > e {
        return 0.0;
    }
    let mut c = 1.0;
    for j in 0..d {
        c *= (e - j) as f64;
    }
    c * x.powi((e - d) as i32)
}

impl MultiPoly {
    /// All monomials of total degree `<= degree`, with coefficients drawn from a Halton sequence in `[-1, 1]^2`.
    pub fn quasi_random(dim: usize, degree: u32, seq: &mut Halton) -> Self {
        let mut terms = Vec::new();
        let mut exps = vec![0u32; dim];
        loop {
            if exps.iter().sum::<u32>() <= degree {
                let p = seq.next_point();
                terms.push((exps.clone(), Complex64::new(2.0 * p[0] - 1.0, 2.0 * p[1] - 1.0)));
            }
            let mut i = 0;
            loop {
                if i == dim {
                    return MultiPoly { dim, terms };
                }
                exps[i] += 1;
                if exps[i] <= degree {
                    break;
                }
                exps[i] = 0;
                i += 1;
            }
        }
    }

    fn partial(&self, x: &[f64], orders: &[u32]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for k in 0..self.dim {
                    v *= pow_d(x[k], e[k], orders[k]);
                }
                v
            })
            .sum()
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        self.partial(x, &vec![0; self.dim])
    }

    pub fn jet(&self, x: &[f64]) -> Jet {
        let unit = |i: usize, j: Option<usize>| {
            let mut o = vec![0u32; self.dim];
            o[i] += 1;
            if let Some(j) = j {
                o[j] += 1;
            }
            o
        };
        Jet {
            value: self.eval(x),
            grad: (0..self.dim).map(|i| self.partial(x, &unit(i, None))).collect(),
            hess: (0..self.dim)
                .map(|i| (0..self.dim).map(|j| self.partial(x, &unit(i, Some(j)))).collect())
                .collect(),
        }
    }
}
