//! Lower-order terms of the wave-type operator `-box + a^mu d_mu + V`.

use num_complex::Complex64;
use std::sync::Arc;

/// A stationary, axisymmetric coefficient as a function of `(r, theta)`.
#[derive(Clone, Default)]
pub enum Coefficient {
    #[default]
    Zero,
    Constant(Complex64),
    Function(Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>),
}

impl Coefficient {
    pub fn eval(&self, r: f64, theta: f64) -> Complex64 {
        match self {
            Coefficient::Zero => Complex64::new(0.0, 0.0),
            Coefficient::Constant(c) => *c,
            Coefficient::Function(f) => f(r, theta),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Zero => true,
            Coefficient::Constant(c) => *c == Complex64::new(0.0, 0.0),
            Coefficient::Function(_) => false,
        }
    }

    /// True when the coefficient takes only real values (functions are assumed complex).
    pub fn is_real(&self) -> bool {
        match self {
            Coefficient::Zero => true,
            Coefficient::Constant(c) => c.im == 0.0,
            Coefficient::Function(_) => false,
        }
    }
}

impl std::fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficient::Zero => write!(f, "Zero"),
            Coefficient::Constant(c) => write!(f, "Constant({c})"),
            Coefficient::Function(_) => write!(f, "Function(..)"),
        }
    }
}

/// First-order coefficients `a^mu` are star-chart components in the order `(t, r, phi, theta)`.
#[derive(Debug, Clone, Default)]
pub struct WaveOperatorSpec {
    pub first_order: [Coefficient; 4],
    pub potential: Coefficient,
}

impl WaveOperatorSpec {
    /// The scalar wave operator `-box`.
    pub fn wave() -> Self {
        Self::default()
    }

    /// Klein–Gordon operator `-box + mass^2`.
    pub fn klein_gordon(mass: f64) -> Self {
        WaveOperatorSpec {
            first_order: Default::default(),
            potential: Coefficient::Constant(Complex64::new(mass * mass, 0.0)),
        }
    }

    pub fn has_first_order(&self) -> bool {
        self.first_order.iter().any(|c| !c.is_zero())
    }

    /// Real coefficients make the spectrum symmetric under `(sigma, k) -> (-conj sigma, -k)`.
    pub fn is_real(&self) -> bool {
        self.first_order.iter().all(Coefficient::is_real) && self.potential.is_real()
    }
}
