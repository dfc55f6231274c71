//! Run configuration. Every table rejects unknown keys; omitted keys take the defaults below.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use kdsqnm::geometry::charts::Horizon;
use kdsqnm::geometry::opspec::{Coefficient, WaveOperatorSpec};
use kdsqnm::geometry::Spacetime;
use kdsqnm::modes::{Frame, SolveOptions, SpectralGrid, Window};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub analyticity: AnalyticityConfig,
    #[serde(default)]
    pub op_spec: OpSpecConfig,
    /// Output directory; `--out` takes precedence.
    #[serde(default)]
    pub output_dir: Option<String>,
    /// Seed of the quasi-random sample points; `--seed` takes precedence.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub a: f64,
    pub m: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameConfig {
    Star,
    Event,
    Cosmological,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub k: Vec<i32>,
    pub window: WindowConfig,
    pub n_r: usize,
    pub n_theta: usize,
    /// Radial margins beyond `r_e` and `r_c`; defaults as in `SpectralGrid::with_default_margins`.
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub frame: FrameConfig,
    pub persistence_tol: f64,
    pub residual_tol: f64,
    pub max_polish_steps: usize,
    /// Largest `l` compared against the separated solver when `a = 0`.
    pub oracle_l_max: u32,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolveOptions::default();
        SolverConfig {
            k: vec![0],
            window: WindowConfig::default(),
            n_r: 48,
            n_theta: 12,
            c1: None,
            c2: None,
            frame: FrameConfig::Star,
            persistence_tol: o.persistence_tol,
            residual_tol: o.residual_tol,
            max_polish_steps: o.max_polish_steps,
            oracle_l_max: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { re_min: -0.5, re_max: 0.5, im_min: -0.01, im_max: 0.2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    /// Quasi-random points per chart in `geometry-check`.
    pub n_points: usize,
    /// Polar samples on each horizon.
    pub n_theta: usize,
    pub fd_step: f64,
    pub parallel_tol: f64,
    pub residual_tol: f64,
    pub normal_form_tol: f64,
    pub radial_samples: usize,
    pub radial_tol: f64,
    pub conormal_grid: usize,
    /// Largest `|p|` on the conormal bundle accepted as characteristic.
    pub conormal_tol: f64,
    /// Starting `x1` of the flow at a sink and at a source.
    pub flow_x1_sink: f64,
    pub flow_x1_source: f64,
    /// Starting angular fiber ratio `|xi_ang| / |xi1|` of the flows.
    pub flow_eta: f64,
    /// Affine window of the geodesic normalisation, as a fraction of the horizon gap.
    pub geodesic_window: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        GeometryConfig {
            n_points: 100,
            n_theta: 16,
            fd_step: 1e-3,
            parallel_tol: 1e-6,
            residual_tol: 1e-5,
            normal_form_tol: 1e-10,
            radial_samples: 32,
            radial_tol: 1e-6,
            conormal_grid: 32,
            conormal_tol: 1e-12,
            flow_x1_sink: 1e-4,
            flow_x1_source: 1e-8,
            flow_eta: 1e-3,
            geodesic_window: 0.1,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyticityConfig {
    /// Half-width of the interval around each horizon; defaults to half the grid margin.
    pub delta: Option<f64>,
    pub n_cheb: usize,
    pub slope_min: f64,
    /// Polar angle of the radial cut.
    pub theta: f64,
}

impl Default for AnalyticityConfig {
    fn default() -> Self {
        AnalyticityConfig { delta: None, n_cheb: 64, slope_min: 0.05, theta: 1.0 }
    }
}

/// Constant lower-order terms; a coefficient is `[re, im]`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OpSpecConfig {
    /// Adds `mass^2` to the potential.
    pub mass: f64,
    pub potential: Option<[f64; 2]>,
    pub first_order: FirstOrderConfig,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FirstOrderConfig {
    pub t: Option<[f64; 2]>,
    pub r: Option<[f64; 2]>,
    pub phi: Option<[f64; 2]>,
    pub theta: Option<[f64; 2]>,
}

fn coefficient(c: Option<[f64; 2]>) -> Coefficient {
    match c {
        Some([re, im]) if re != 0.0 || im != 0.0 => Coefficient::Constant(Complex64::new(re, im)),
        _ => Coefficient::Zero,
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("solver.persistence_tol", self.solver.persistence_tol),
            ("solver.residual_tol", self.solver.residual_tol),
            ("geometry.fd_step", self.geometry.fd_step),
            ("geometry.parallel_tol", self.geometry.parallel_tol),
            ("geometry.residual_tol", self.geometry.residual_tol),
            ("geometry.normal_form_tol", self.geometry.normal_form_tol),
            ("geometry.radial_tol", self.geometry.radial_tol),
            ("geometry.conormal_tol", self.geometry.conormal_tol),
            ("geometry.flow_x1_sink", self.geometry.flow_x1_sink),
            ("geometry.flow_x1_source", self.geometry.flow_x1_source),
            ("geometry.flow_eta", self.geometry.flow_eta),
            ("geometry.geodesic_window", self.geometry.geodesic_window),
            ("analyticity.slope_min", self.analyticity.slope_min),
            ("analyticity.delta", self.analyticity.delta.unwrap_or(1.0)),
            ("solver.c1", self.solver.c1.unwrap_or(1.0)),
            ("solver.c2", self.solver.c2.unwrap_or(1.0)),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let counts = [
            ("geometry.n_points", self.geometry.n_points),
            ("geometry.n_theta", self.geometry.n_theta),
            ("geometry.radial_samples", self.geometry.radial_samples),
            ("geometry.conormal_grid", self.geometry.conormal_grid),
            ("analyticity.n_cheb", self.analyticity.n_cheb),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(CliError::Config(format!("{name} must be at least 1")));
            }
        }
        let th = self.analyticity.theta;
        if !(th > 0.0 && th < std::f64::consts::PI) {
            return Err(CliError::Config(format!("analyticity.theta must lie in (0, pi), got {th}")));
        }
        let w = &self.solver.window;
        if !(w.re_min < w.re_max && w.im_min < w.im_max) {
            return Err(CliError::Config("solver.window must have re_min < re_max and im_min < im_max".into()));
        }
        if self.solver.k.is_empty() {
            return Err(CliError::Config("solver.k must list at least one azimuthal number".into()));
        }
        Ok(())
    }

    pub fn spacetime(&self) -> Result<Spacetime, CliError> {
        let p = self.params;
        Ok(Spacetime::from_values(p.a, p.m, p.lambda)?)
    }

    pub fn op(&self) -> WaveOperatorSpec {
        let o = &self.op_spec;
        let base = o.potential.unwrap_or([0.0, 0.0]);
        let f = &o.first_order;
        WaveOperatorSpec {
            first_order: [coefficient(f.t), coefficient(f.r), coefficient(f.phi), coefficient(f.theta)],
            potential: coefficient(Some([base[0] + o.mass * o.mass, base[1]])),
        }
    }

    pub fn window(&self) -> Window {
        let w = self.solver.window;
        Window::new(w.re_min, w.re_max, w.im_min, w.im_max)
    }

    pub fn frame(&self) -> Frame {
        match self.solver.frame {
            FrameConfig::Star => Frame::Star,
            FrameConfig::Event => Frame::Horizon(Horizon::Event),
            FrameConfig::Cosmological => Frame::Horizon(Horizon::Cosmological),
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            persistence_tol: self.solver.persistence_tol,
            residual_tol: self.solver.residual_tol,
            max_polish_steps: self.solver.max_polish_steps,
        }
    }

    pub fn grid(&self, st: &Spacetime, k: i32) -> Result<SpectralGrid, CliError> {
        let s = &self.solver;
        let d = SpectralGrid::with_default_margins(st, s.n_r, s.n_theta, k)?;
        Ok(SpectralGrid::new(st, s.n_r, s.n_theta, s.c1.unwrap_or(d.c1), s.c2.unwrap_or(d.c2), k)?)
    }
}
