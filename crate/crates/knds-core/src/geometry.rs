//! Intrinsic geometry of a horizon surface.
//!
//! At fixed time and radius a horizon carries the 2-metric
//!
//! ```text
//! dl^2 = eta^2 (1 - xi) [ dx^2 / f(x) + f(x) dphi^2 ],
//! f(x) = (1 - xi (1 - x^2)) / (1 - beta^2 (1 - x^2)) * (1 - x^2),
//! ```
//!
//! on x in [-1, 1], with scale parameter eta = sqrt(r0^2 + a^2) and
//! distortion parameter beta = a / eta. The profile satisfies
//! f(+-1) = 0 and f'(-1) = 2 = -f'(1), so the poles are smooth.

use crate::error::{Error, Result};
use crate::quadrature;
use crate::spacetime::SpacetimeParams;
use serde::Serialize;
use std::f64::consts::PI;

/// The normalized metric profile f, stored as (xi, beta^2) and evaluated
/// on demand so downstream quadrature and eigensolvers pick their own
/// grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricProfile {
    pub xi: f64,
    pub beta_sq: f64,
}

impl MetricProfile {
    pub fn new(xi: f64, beta_sq: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&xi) || !xi.is_finite() {
            return Err(Error::InvalidParams(format!("xi must lie in [0,1), got {xi}")));
        }
        if !(0.0..1.0).contains(&beta_sq) || !beta_sq.is_finite() {
            return Err(Error::InvalidParams(format!(
                "beta_sq must lie in [0,1), got {beta_sq}"
            )));
        }
        Ok(Self { xi, beta_sq })
    }

    /// The round sphere, f = 1 - x^2.
    pub fn round() -> Self {
        Self { xi: 0.0, beta_sq: 0.0 }
    }

    /// The smooth factor F with f(x) = (1 - x^2) F(x); F(+-1) = 1 exactly.
    pub fn smooth_factor(&self, x: f64) -> f64 {
        let s = 1.0 - x * x;
        (1.0 - self.xi * s) / (1.0 - self.beta_sq * s)
    }

    /// dF/dx = 2x (xi - beta^2) / (1 - beta^2 (1 - x^2))^2.
    pub fn smooth_factor_prime(&self, x: f64) -> f64 {
        let s = 1.0 - x * x;
        let den = 1.0 - self.beta_sq * s;
        2.0 * x * (self.xi - self.beta_sq) / (den * den)
    }

    /// Evaluate f. Exactly zero at x = +-1 (the 1 - x^2 factor is applied
    /// last), positive inside.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("profile argument {x} outside [-1, 1]")));
        }
        let s = 1.0 - x * x;
        Ok(s * (1.0 - self.xi * s) / (1.0 - self.beta_sq * s))
    }
}

/// Per-horizon geometric data. `xi` is shared by both horizons of one
/// spacetime; `radius`, `eta`, `beta`, `area` are horizon-specific.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HorizonGeometry {
    pub radius: f64,
    pub eta: f64,
    pub beta: f64,
    pub xi: f64,
    pub area: f64,
    /// Cosmological constant, kept for the stable curvature ratio
    /// xi / beta^2 = Lambda eta^2 (1 - xi) / 3 (exact identity), which
    /// keeps the a -> 0 limit regular.
    #[serde(skip)]
    lambda: f64,
}

/// Build the geometry of the horizon at radius r0.
///
/// r0 must actually be a horizon: |delta_r(r0)| is checked against a
/// scale-aware tolerance and `Error::NotAHorizon` is returned otherwise.
pub fn derive_geometry(params: &SpacetimeParams, r0: f64) -> Result<HorizonGeometry> {
    if !r0.is_finite() || r0 <= 0.0 {
        return Err(Error::InvalidParams(format!("horizon radius must be positive, got {r0}")));
    }
    let a2 = params.spin * params.spin;
    let lam = params.cosmological_constant;
    let term_scale = (r0 * r0 + a2) * (1.0 + lam * r0 * r0 / 3.0)
        + 2.0 * params.mass * r0
        + params.charge * params.charge;
    let tolerance = 1e-8 * term_scale.max(1.0);
    let residual = params.delta_r(r0).abs();
    if residual > tolerance {
        return Err(Error::NotAHorizon { r0, residual, tolerance });
    }

    let eta = (r0 * r0 + a2).sqrt();
    let xi = params.xi();
    Ok(HorizonGeometry {
        radius: r0,
        eta,
        beta: params.spin / eta,
        xi,
        area: 4.0 * PI * eta * eta * (1.0 - xi),
        lambda: lam,
    })
}

impl HorizonGeometry {
    /// Geometry from shape parameters alone, for synthetic profiles.
    /// beta = 0 forces xi = 0 (both vanish with the spin).
    pub fn from_shape(eta: f64, beta_sq: f64, xi: f64) -> Result<Self> {
        if !eta.is_finite() || eta <= 0.0 {
            return Err(Error::InvalidParams(format!("eta must be positive, got {eta}")));
        }
        MetricProfile::new(xi, beta_sq)?;
        if beta_sq == 0.0 && xi > 0.0 {
            return Err(Error::InvalidParams(
                "xi > 0 with beta = 0 is unphysical: both vanish with the spin".into(),
            ));
        }
        let lambda = if beta_sq > 0.0 {
            3.0 * xi / (beta_sq * eta * eta * (1.0 - xi))
        } else {
            0.0
        };
        Ok(Self {
            radius: eta * (1.0 - beta_sq).sqrt(),
            eta,
            beta: beta_sq.sqrt(),
            xi,
            area: 4.0 * PI * eta * eta * (1.0 - xi),
            lambda,
        })
    }

    pub fn profile(&self) -> MetricProfile {
        MetricProfile {
            xi: self.xi,
            beta_sq: self.beta * self.beta,
        }
    }

    /// Homothety factor eta^2 (1 - xi) relating the normalized metric to
    /// the physical one; physical eigenvalues are normalized ones divided
    /// by this factor.
    pub fn homothety(&self) -> f64 {
        self.eta * self.eta * (1.0 - self.xi)
    }

    /// A = 4 pi eta^2 (1 - xi).
    pub fn area(&self) -> f64 {
        self.area
    }

    /// Gauss curvature at x, in the form with the removable a -> 0
    /// singularity eliminated via rho = xi / beta^2 = Lambda eta^2 (1-xi)/3:
    ///
    /// ```text
    /// K(x) = [ rho + (1 - rho) (1 - beta^2 (1 + 3 x^2))
    ///                / (1 - beta^2 (1 - x^2))^3 ] / (eta^2 (1 - xi))
    /// ```
    ///
    /// For beta^2 = xi this is the constant 1 / (eta^2 (1 - xi)).
    pub fn gauss_curvature(&self, x: f64) -> Result<f64> {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("curvature argument {x} outside [-1, 1]")));
        }
        let b2 = self.beta * self.beta;
        let rho = self.lambda * self.eta * self.eta * (1.0 - self.xi) / 3.0;
        let den = 1.0 - b2 * (1.0 - x * x);
        let bump = (1.0 - b2 * (1.0 + 3.0 * x * x)) / (den * den * den);
        Ok((rho + (1.0 - rho) * bump) / (self.eta * self.eta * (1.0 - self.xi)))
    }

    /// Total curvature int K dA = 2 pi eta^2 (1-xi) int_{-1}^{1} K(x) dx,
    /// which must equal 4 pi for any smooth profile (Gauss-Bonnet).
    pub fn total_curvature(&self) -> Result<f64> {
        let (integral, _) = quadrature::integrate(
            |x| self.gauss_curvature(x).expect("x within [-1,1]"),
            -1.0,
            1.0,
            1e-12,
        )?;
        Ok(2.0 * PI * self.homothety() * integral)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::find_horizons;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn canonical() -> SpacetimeParams {
        SpacetimeParams::new(1.0, 0.1, 0.1, 0.05).unwrap()
    }

    #[test]
    fn profile_round_sphere_value() {
        let f = MetricProfile::round();
        assert_abs_diff_eq!(f.eval(0.5).unwrap(), 0.75, epsilon = 1e-16);
    }

    #[test]
    fn profile_factors_cancel_when_xi_equals_beta_sq() {
        let f = MetricProfile::new(0.2, 0.2).unwrap();
        for &x in &[-0.9, -0.3, 0.0, 0.4, 0.77] {
            assert_relative_eq!(f.eval(x).unwrap(), 1.0 - x * x, max_relative = 1e-15);
        }
    }

    #[test]
    fn profile_generic_value() {
        let f = MetricProfile::new(0.1, 0.3).unwrap();
        assert_relative_eq!(f.eval(0.0).unwrap(), 1.2857142857142858, max_relative = 1e-15);
    }

    #[test]
    fn profile_vanishes_exactly_at_poles() {
        let f = MetricProfile::new(0.3, 0.6).unwrap();
        assert_eq!(f.eval(1.0).unwrap(), 0.0);
        assert_eq!(f.eval(-1.0).unwrap(), 0.0);
        assert!(f.eval(1.0 + 1e-12).is_err());
        assert!(f.eval(-1.5).is_err());
    }

    #[test]
    fn profile_positive_and_even() {
        let f = MetricProfile::new(0.45, 0.8).unwrap();
        for i in 1..100 {
            let x = -1.0 + 2.0 * (i as f64) / 100.0;
            let v = f.eval(x).unwrap();
            assert!(v > 0.0);
            assert_relative_eq!(v, f.eval(-x).unwrap(), max_relative = 1e-14);
        }
    }

    #[test]
    fn profile_pole_slopes_are_two() {
        // f'(-1) = 2 = -f'(1), one-sided differences.
        let f = MetricProfile::new(0.25, 0.55).unwrap();
        let h = 1e-7;
        let left = f.eval(-1.0 + h).unwrap() / h;
        let right = -f.eval(1.0 - h).unwrap() / h;
        assert_abs_diff_eq!(left, 2.0, epsilon = 1e-6);
        assert_abs_diff_eq!(right, -2.0, epsilon = 1e-6);
    }

    #[test]
    fn canonical_event_geometry() {
        let p = canonical();
        let h = find_horizons(&p).unwrap();
        let g = derive_geometry(&p, h.event).unwrap();
        assert_relative_eq!(g.eta, 2.1610850092485734, max_relative = 1e-12);
        assert_relative_eq!(g.beta, 0.046273052458390244, max_relative = 1e-12);
        assert_relative_eq!(g.area, 58.67879532724915, max_relative = 1e-12);
        assert_relative_eq!(g.homothety(), 4.669510165504656, max_relative = 1e-12);
    }

    #[test]
    fn non_root_rejected() {
        let p = canonical();
        match derive_geometry(&p, 1.0) {
            Err(Error::NotAHorizon { .. }) => {}
            other => panic!("expected NotAHorizon, got {other:?}"),
        }
    }

    #[test]
    fn zero_spin_degenerates_to_round_sphere() {
        let p = SpacetimeParams::new(1.0, 0.0, 0.0, 0.01).unwrap();
        let h = find_horizons(&p).unwrap();
        let g = derive_geometry(&p, h.event).unwrap();
        assert_eq!(g.beta, 0.0);
        assert_eq!(g.xi, 0.0);
        assert_relative_eq!(g.eta, h.event, max_relative = 1e-15);
        assert_relative_eq!(g.area, 4.0 * PI * h.event * h.event, max_relative = 1e-15);
    }

    #[test]
    fn beta_larger_on_event_horizon() {
        let p = canonical();
        let h = find_horizons(&p).unwrap();
        let ge = derive_geometry(&p, h.event).unwrap();
        let gc = derive_geometry(&p, h.cosmological).unwrap();
        assert!(ge.beta > gc.beta);
        assert_eq!(ge.xi, gc.xi);
    }

    #[test]
    fn curvature_ratio_identity() {
        // xi / beta^2 = Lambda eta^2 (1 - xi) / 3 for geometry from params.
        let p = canonical();
        let h = find_horizons(&p).unwrap();
        for r0 in [h.event, h.cosmological] {
            let g = derive_geometry(&p, r0).unwrap();
            let direct = g.xi / (g.beta * g.beta);
            let stable = p.cosmological_constant * g.eta * g.eta * (1.0 - g.xi) / 3.0;
            assert_relative_eq!(direct, stable, max_relative = 1e-13);
        }
    }

    #[test]
    fn unit_sphere_curvature() {
        let g = HorizonGeometry::from_shape(1.0, 0.0, 0.0).unwrap();
        for &x in &[-1.0, -0.5, 0.0, 0.3, 1.0] {
            assert_relative_eq!(g.gauss_curvature(x).unwrap(), 1.0, max_relative = 1e-15);
        }
    }

    #[test]
    fn constant_curvature_when_beta_sq_equals_xi() {
        let g = HorizonGeometry::from_shape(1.3, 0.2, 0.2).unwrap();
        let expected = 1.0 / (1.3 * 1.3 * 0.8);
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let x = -1.0 + 2.0 * (i as f64) / 1000.0;
            let k = g.gauss_curvature(x).unwrap();
            min = min.min(k);
            max = max.max(k);
        }
        assert_relative_eq!(min, expected, max_relative = 1e-14);
        assert!(max - min < 1e-12 * expected.abs());
    }

    #[test]
    fn curvature_matches_profile_second_derivative() {
        // K = -f''(x) / (2 eta^2 (1 - xi)), central differences.
        let p = canonical();
        let hset = find_horizons(&p).unwrap();
        let g = derive_geometry(&p, hset.event).unwrap();
        let f = g.profile();
        let h = 1e-4;
        let mut worst: f64 = 0.0;
        for i in 0..=1000 {
            let x = -0.9995 + 1.999 * (i as f64) / 1000.0;
            let fdd = (f.eval(x + h).unwrap() - 2.0 * f.eval(x).unwrap() + f.eval(x - h).unwrap())
                / (h * h);
            let k_fd = -fdd / (2.0 * g.homothety());
            worst = worst.max((k_fd - g.gauss_curvature(x).unwrap()).abs());
        }
        assert!(worst < 1e-5, "max curvature mismatch {worst}");
    }

    #[test]
    fn gauss_bonnet_canonical() {
        let p = canonical();
        let h = find_horizons(&p).unwrap();
        for r0 in [h.event, h.cosmological] {
            let g = derive_geometry(&p, r0).unwrap();
            assert_relative_eq!(g.total_curvature().unwrap(), 4.0 * PI, max_relative = 1e-10);
        }
    }

    #[test]
    fn area_trivial_values() {
        let unit = HorizonGeometry::from_shape(1.0, 0.0, 0.0).unwrap();
        assert_relative_eq!(unit.area(), 4.0 * PI, max_relative = 1e-15);
        let g = HorizonGeometry::from_shape(2.0, 0.3, 0.5).unwrap();
        assert_relative_eq!(g.area(), 8.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn area_matches_induced_element_quadrature() {
        // dA = eta^2 (1 - xi) dx dphi regardless of the profile shape.
        let p = canonical();
        let h = find_horizons(&p).unwrap();
        let g = derive_geometry(&p, h.event).unwrap();
        let (ix, _) = quadrature::integrate(|_| g.homothety(), -1.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(2.0 * PI * ix, g.area(), max_relative = 1e-12);
    }

    #[test]
    fn from_shape_rejects_spinless_distortion() {
        assert!(HorizonGeometry::from_shape(1.0, 0.0, 0.2).is_err());
    }
}
