//! Closed-form Green's-operator traces.
//!
//! For the mode-k operator on a horizon the reciprocal-eigenvalue sums have
//! closed forms: gamma_k = eta^2 (1 - xi) / |k| for k != 0 and
//! gamma_0 = eta^2 [1 - beta^2 + (xi - beta^2) g(xi)], with g the function
//! defined below. Together with the area representation A = 4 pi k gamma_k
//! these drive the inverse problem.

use crate::error::{Error, Result};
use crate::geometry::{HorizonGeometry, MetricProfile};
use crate::quadrature;
use crate::spacetime::{find_horizons, SpacetimeParams};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Where a TraceSet came from. The inverse pipeline accepts all three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "closed-form")]
    ClosedForm,
    #[serde(rename = "numerical-spectrum")]
    NumericalSpectrum,
    #[serde(rename = "external-input")]
    ExternalInput,
}

/// Trace invariants of both physical horizons; the inverse problem's input.
///
/// Invariant: k * gamma_k is constant over k >= 1 (it is A / 4 pi), and
/// gamma_1 differs between the horizons whenever the spacetime is valid.
#[derive(Debug, Clone, Serialize)]
pub struct TraceSet {
    pub gamma0_event: f64,
    pub gammak_event: BTreeMap<i32, f64>,
    pub gamma0_cosmo: f64,
    pub gammak_cosmo: BTreeMap<i32, f64>,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl TraceSet {
    /// gamma_1 for the event horizon, normalized from k * gamma_k when only
    /// a higher mode is present.
    pub fn gamma1_event(&self) -> Result<f64> {
        Self::effective_gamma1(&self.gammak_event, "event")
    }

    pub fn gamma1_cosmo(&self) -> Result<f64> {
        Self::effective_gamma1(&self.gammak_cosmo, "cosmological")
    }

    fn effective_gamma1(map: &BTreeMap<i32, f64>, which: &str) -> Result<f64> {
        if let Some(&g1) = map.get(&1) {
            return Ok(g1);
        }
        map.iter()
            .filter(|(k, _)| **k != 0)
            .map(|(k, g)| (k.unsigned_abs() as f64) * g)
            .next()
            .ok_or_else(|| {
                Error::InvalidParams(format!("no k >= 1 trace available for the {which} horizon"))
            })
    }
}

/// g(xi) = [sqrt((1-xi)/xi) arctan(sqrt(xi/(1-xi))) - 1] / xi on [0, 1],
/// continuous with g(0) = -1/3 and g(1) = -1.
///
/// Below xi = 1e-3 the bracketed difference is O(xi) and the direct form
/// loses ~eps/xi, so the alternating series
/// sum_{n>=1} (-1)^n xi^(n-1) / ((2n+1)(1-xi)^n) is used there (10 terms;
/// truncation < 1e-18 at the switch point).
pub fn g_of_xi(xi: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("g is defined on [0, 1], got {xi}")));
    }
    if xi == 1.0 {
        return Ok(-1.0);
    }
    if xi < 1e-3 {
        let r = 1.0 / (1.0 - xi);
        let mut power = r;
        let mut sum = 0.0;
        let mut sign = -1.0;
        for n in 1..=10u32 {
            sum += sign * power / (2 * n + 1) as f64;
            power *= xi * r;
            sign = -sign;
        }
        return Ok(sum);
    }
    let u = (xi / (1.0 - xi)).sqrt();
    Ok((u.atan() / u - 1.0) / xi)
}

/// h(xi) = (1 + xi g(xi)) / (1 - xi) on [0, 1); strictly increasing from
/// h(0) = 1, diverging like (pi/2) / sqrt(1 - xi) at the right end.
pub fn h_of_xi(xi: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::Domain(format!("h is defined on [0, 1), got {xi}")));
    }
    Ok((1.0 + xi * g_of_xi(xi)?) / (1.0 - xi))
}

/// Invariant trace gamma_0 = eta^2 [1 - beta^2 + (xi - beta^2) g(xi)].
pub fn gamma0_closed(geometry: &HorizonGeometry) -> Result<f64> {
    let b2 = geometry.beta * geometry.beta;
    let g = g_of_xi(geometry.xi)?;
    Ok(geometry.eta * geometry.eta * (1.0 - b2 + (geometry.xi - b2) * g))
}

/// Equivariant trace gamma_k = eta^2 (1 - xi) / |k| = A / (4 pi |k|).
pub fn gammak_closed(geometry: &HorizonGeometry, k: i32) -> Result<f64> {
    if k == 0 {
        return Err(Error::ZeroMode);
    }
    Ok(geometry.homothety() / f64::from(k.unsigned_abs()))
}

/// gamma_0 of a normalized profile (area 4 pi) by direct quadrature of
/// (1/2) int (1 - x^2) / f dx. The (1 - x^2) factor cancels analytically,
/// leaving the smooth integrand (1 - beta^2 s) / (1 - xi s), s = 1 - x^2.
/// Multiply by the homothety factor eta^2 (1 - xi) to compare with
/// `gamma0_closed`.
pub fn gamma0_integral(profile: &MetricProfile) -> Result<f64> {
    let (integral, _) = quadrature::integrate(
        |x| {
            let s = 1.0 - x * x;
            0.5 * (1.0 - profile.beta_sq * s) / (1.0 - profile.xi * s)
        },
        -1.0,
        1.0,
        1e-10,
    )?;
    Ok(integral)
}

/// Closed-form TraceSet for both horizons, gamma_k for 1 <= k <= k_max.
pub fn forward_traces(params: &SpacetimeParams, k_max: u32) -> Result<TraceSet> {
    if k_max < 1 {
        return Err(Error::InvalidParams("k_max must be at least 1".into()));
    }
    let horizons = find_horizons(params)?;
    let event = crate::geometry::derive_geometry(params, horizons.event)?;
    let cosmo = crate::geometry::derive_geometry(params, horizons.cosmological)?;

    let fill = |geometry: &HorizonGeometry| -> Result<BTreeMap<i32, f64>> {
        let mut map = BTreeMap::new();
        for k in 1..=k_max as i32 {
            map.insert(k, gammak_closed(geometry, k)?);
        }
        Ok(map)
    };

    Ok(TraceSet {
        gamma0_event: gamma0_closed(&event)?,
        gammak_event: fill(&event)?,
        gamma0_cosmo: gamma0_closed(&cosmo)?,
        gammak_cosmo: fill(&cosmo)?,
        provenance: Provenance::ClosedForm,
        note: (params.spin == 0.0)
            .then(|| "inverse not applicable: spin is zero".to_string()),
    })
}
