//! Coordinate charts and transition maps.
//!
//! Every chart except Misner's model uses coordinates `(t, r, phi, theta)` or a
//! linear recombination of them. Transitions go through the star chart: a chart
//! `X` has `t_* = t_X + D_X(r)` and `phi_* = phi_X + E_X(r)`, with offsets
//! normalised to vanish at [`Spacetime::r_mid`].

use serde::{Deserialize, Serialize};

use super::Spacetime;
use crate::error::{Error, Result};
use crate::numerics::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Event,
    Cosmological,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chart {
    BoyerLindquist,
    /// Time function regular across both horizons.
    Star,
    /// Time function with constant slope, regular across one horizon.
    Intermediate(Horizon),
    /// Gaussian-null-type chart adapted to one horizon, built from the intermediate chart.
    Gnc(Horizon),
    /// Flat model `2 dx1 dx0 + x1 dx0^2 + sum dxj^2` in four dimensions.
    Misner,
}

impl std::fmt::Display for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Chart::BoyerLindquist => "boyer_lindquist",
            Chart::Star => "star",
            Chart::Intermediate(Horizon::Event) => "intermediate_event",
            Chart::Intermediate(Horizon::Cosmological) => "intermediate_cosmological",
            Chart::Gnc(Horizon::Event) => "gnc_event",
            Chart::Gnc(Horizon::Cosmological) => "gnc_cosmological",
            Chart::Misner => "misner",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: Chart,
    pub coords: [f64; 4],
}

impl ChartPoint {
    pub fn new(chart: Chart, coords: [f64; 4]) -> Self {
        ChartPoint { chart, coords }
    }
}

const QUAD_ABS: f64 = 1e-15;
const QUAD_REL: f64 = 1e-15;

fn out_of_chart(chart: Chart, reason: impl Into<String>) -> Error {
    Error::OutOfChart { chart: chart.to_string(), reason: reason.into() }
}

impl Spacetime {
    /// Open radial interval covered by a chart.
    pub fn chart_r_range(&self, chart: Chart) -> Result<(f64, f64)> {
        let h = &self.horizons;
        let rc = h.r_c.unwrap_or(f64::INFINITY);
        match chart {
            Chart::BoyerLindquist => Ok((h.r_e, rc)),
            Chart::Star => Ok((h.r_inner, f64::INFINITY)),
            Chart::Intermediate(Horizon::Event) | Chart::Gnc(Horizon::Event) => Ok((h.r_inner, rc)),
            Chart::Intermediate(Horizon::Cosmological) | Chart::Gnc(Horizon::Cosmological) => {
                if h.r_c.is_none() {
                    return Err(Error::LambdaZeroUnsupported);
                }
                Ok((h.r_e, f64::INFINITY))
            }
            Chart::Misner => Ok((f64::NEG_INFINITY, f64::INFINITY)),
        }
    }

    /// Radius of a point given in any Kerr(-de Sitter) chart.
    pub fn radius_of(&self, p: &ChartPoint) -> Result<f64> {
        match p.chart {
            Chart::Gnc(h) => Ok(self.horizon_radius(h)? - p.coords[1]),
            Chart::Misner => Err(out_of_chart(Chart::Misner, "the Misner model has no radius")),
            _ => Ok(p.coords[1]),
        }
    }

    pub fn check_in_chart(&self, p: &ChartPoint) -> Result<()> {
        if p.coords.iter().any(|c| !c.is_finite()) {
            return Err(out_of_chart(p.chart, "non-finite coordinate"));
        }
        if p.chart == Chart::Misner {
            return Ok(());
        }
        let r = self.radius_of(p)?;
        let (lo, hi) = self.chart_r_range(p.chart)?;
        if !(r > lo && r < hi) {
            return Err(out_of_chart(p.chart, format!("r = {r} not in ({lo}, {hi})")));
        }
        let th = p.coords[3];
        if !(th > 0.0 && th < std::f64::consts::PI) {
            return Err(out_of_chart(p.chart, format!("theta = {th} not in (0, pi)")));
        }
        Ok(())
    }

    /// `dD_X/dr` and `dE_X/dr` for the offsets of the base chart behind `chart`.
    pub fn offset_derivs(&self, chart: Chart, r: f64) -> (f64, f64) {
        let p = &self.params;
        let b = p.b();
        let (a, r2a2) = (p.a, r * r + p.a * p.a);
        let lam = p.lambda;
        let h = &self.horizons;
        // q stands for the slope difference divided by mu, written so that it is
        // analytic where the chart is regular.
        let q = match (chart, h.r0, h.r_c) {
            (Chart::Star | Chart::Misner, _, _) => 0.0,
            (Chart::BoyerLindquist, _, _) => self.star_slope(r) / p.mu(r),
            (Chart::Intermediate(Horizon::Event) | Chart::Gnc(Horizon::Event), Some(r0), Some(rc)) => {
                -6.0 / (lam * (rc - h.r_e) * (r - r0) * (r - h.r_inner) * (r - rc))
            }
            (Chart::Intermediate(Horizon::Cosmological) | Chart::Gnc(Horizon::Cosmological), Some(r0), Some(rc)) => {
                -6.0 / (lam * (rc - h.r_e) * (r - r0) * (r - h.r_inner) * (r - h.r_e))
            }
            // Without a cosmological horizon the star and event-intermediate charts coincide.
            _ => 0.0,
        };
        (b * r2a2 * q, b * a * q)
    }

    /// Offsets `(D_X(r), E_X(r))` of a chart relative to the star chart.
    pub fn offsets(&self, chart: Chart, r: f64) -> Result<(f64, f64)> {
        let r_mid = self.r_mid();
        if matches!(chart, Chart::Star | Chart::Misner) {
            return Ok((0.0, 0.0));
        }
        let d = quad::integrate(|s| self.offset_derivs(chart, s).0, r_mid, r, QUAD_ABS, QUAD_REL)?;
        let e = if self.params.a == 0.0 {
            0.0
        } else {
            quad::integrate(|s| self.offset_derivs(chart, s).1, r_mid, r, QUAD_ABS, QUAD_REL)?
        };
        Ok((d, e))
    }

    fn to_star(&self, p: &ChartPoint) -> Result<[f64; 4]> {
        let [c0, c1, c2, c3] = p.coords;
        match p.chart {
            Chart::Misner => Err(out_of_chart(Chart::Misner, "no transition to Kerr(-de Sitter) charts")),
            Chart::Gnc(h) => {
                let om = self.omega(h)?;
                let (t, r, ph) = (c0, self.horizon_radius(h)? - c1, c2 + om * c0);
                let (d, e) = self.offsets(Chart::Intermediate(h), r)?;
                Ok([t + d, r, ph + e, c3])
            }
            chart => {
                let (d, e) = self.offsets(chart, c1)?;
                Ok([c0 + d, c1, c2 + e, c3])
            }
        }
    }

    fn from_star(&self, s: [f64; 4], target: Chart) -> Result<[f64; 4]> {
        let [t, r, ph, th] = s;
        match target {
            Chart::Misner => Err(out_of_chart(Chart::Misner, "no transition to Kerr(-de Sitter) charts")),
            Chart::Gnc(h) => {
                let (d, e) = self.offsets(Chart::Intermediate(h), r)?;
                let (tt, pt) = (t - d, ph - e);
                Ok([tt, self.horizon_radius(h)? - r, pt - self.omega(h)? * tt, th])
            }
            chart => {
                let (d, e) = self.offsets(chart, r)?;
                Ok([t - d, r, ph - e, th])
            }
        }
    }
}

/// Expresses a point in another chart. Both charts must cover the point.
pub fn chart_map(st: &Spacetime, p: &ChartPoint, target: Chart) -> Result<ChartPoint> {
    st.check_in_chart(p)?;
    if p.chart == target {
        return Ok(*p);
    }
    if target != Chart::Misner {
        let r = st.radius_of(p)?;
        let (lo, hi) = st.chart_r_range(target)?;
        if !(r > lo && r < hi) {
            return Err(out_of_chart(target, format!("r = {r} not in ({lo}, {hi})")));
        }
    }
    let star = st.to_star(p)?;
    let out = ChartPoint::new(target, st.from_star(star, target)?);
    st.check_in_chart(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kds() -> Spacetime {
        Spacetime::from_values(0.3, 1.0, 0.05).unwrap()
    }

    /// Independent antiderivative by partial fractions over the four roots of `mu`.
    fn star_offset_partial_fractions(st: &Spacetime, r: f64) -> (f64, f64) {
        let p = &st.params;
        let roots = st.horizons.roots();
        let prim = |x: f64| -> (f64, f64) {
            let mut g = 0.0;
            let mut psi = 0.0;
            for &ri in &roots {
                let common = p.b() * st.star_slope(ri) / p.dmu(ri) * (x - ri).abs().ln();
                g += (ri * ri + p.a * p.a) * common;
                psi += p.a * common;
            }
            (g, psi)
        };
        let (g1, p1) = prim(r);
        let (g0, p0) = prim(st.r_mid());
        (g1 - g0, p1 - p0)
    }

    #[test]
    fn bl_offsets_match_partial_fractions() {
        let st = kds();
        let (re, rc) = (st.r_e(), st.r_c().unwrap());
        for k in 1..10 {
            let r = re + (rc - re) * k as f64 / 10.0;
            let (d, e) = st.offsets(Chart::BoyerLindquist, r).unwrap();
            let (go, po) = star_offset_partial_fractions(&st, r);
            assert!((d - go).abs() < 1e-11 * (1.0 + go.abs()), "r={r}: {d} vs {go}");
            assert!((e - po).abs() < 1e-11 * (1.0 + po.abs()));
        }
    }

    #[test]
    fn round_trip_through_all_charts() {
        let st = kds();
        let p = ChartPoint::new(Chart::BoyerLindquist, [0.4, 3.1, 1.2, 0.9]);
        for target in [
            Chart::Star,
            Chart::Intermediate(Horizon::Event),
            Chart::Intermediate(Horizon::Cosmological),
            Chart::Gnc(Horizon::Event),
            Chart::Gnc(Horizon::Cosmological),
        ] {
            let q = chart_map(&st, &p, target).unwrap();
            let back = chart_map(&st, &q, Chart::BoyerLindquist).unwrap();
            for i in 0..4 {
                assert!((back.coords[i] - p.coords[i]).abs() < 1e-12, "{target}: {:?}", back.coords);
            }
        }
    }

    #[test]
    fn star_chart_crosses_horizons_but_bl_does_not() {
        let st = kds();
        let inside = ChartPoint::new(Chart::Star, [0.0, st.r_e() - 0.1, 0.0, 1.0]);
        assert!(chart_map(&st, &inside, Chart::Intermediate(Horizon::Event)).is_ok());
        assert!(matches!(
            chart_map(&st, &inside, Chart::BoyerLindquist),
            Err(Error::OutOfChart { .. })
        ));
        let pole = ChartPoint::new(Chart::Star, [0.0, 3.0, 0.0, 0.0]);
        assert!(chart_map(&st, &pole, Chart::BoyerLindquist).is_err());
    }

    #[test]
    fn kerr_has_no_cosmological_charts() {
        let st = Spacetime::from_values(0.5, 1.0, 0.0).unwrap();
        let p = ChartPoint::new(Chart::BoyerLindquist, [0.0, 4.0, 0.0, 1.0]);
        assert_eq!(
            chart_map(&st, &p, Chart::Intermediate(Horizon::Cosmological)),
            Err(Error::LambdaZeroUnsupported)
        );
        let q = chart_map(&st, &p, Chart::Star).unwrap();
        let r = chart_map(&st, &p, Chart::Intermediate(Horizon::Event)).unwrap();
        assert_eq!(q.coords, r.coords);
    }
}
