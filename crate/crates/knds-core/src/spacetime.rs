//! Kerr-Newman-de Sitter parameter space and horizon radii.
//!
//! The horizon function
//!
//! ```text
//! delta_r = (r^2 + a^2)(1 - Lambda r^2 / 3) - 2 m r + Q^2
//! ```
//!
//! is a quartic in r with zero cubic coefficient, so its four roots sum to
//! zero. In the physical regime it has a negative root, an optional Cauchy
//! root, and the event and cosmological radii r_e < r_c.
//!
//! Geometric units throughout (G = c = 1): mass, spin and charge carry
//! length units, the cosmological constant inverse length squared.

use crate::error::{Error, Result};
use crate::quartic;
use serde::Serialize;

/// The four physical parameters (m, a, Q, Lambda).
///
/// Immutable after construction; `new` enforces m > 0, Lambda > 0,
/// a >= 0, Q >= 0 and finiteness. Zero spin or charge are admitted as
/// degenerate limits of the forward pipeline only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpacetimeParams {
    pub mass: f64,
    pub spin: f64,
    pub charge: f64,
    pub cosmological_constant: f64,
}

impl SpacetimeParams {
    pub fn new(mass: f64, spin: f64, charge: f64, cosmological_constant: f64) -> Result<Self> {
        for (name, v) in [
            ("mass", mass),
            ("spin", spin),
            ("charge", charge),
            ("cosmological_constant", cosmological_constant),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite, got {v}")));
            }
        }
        if mass <= 0.0 {
            return Err(Error::InvalidParams(format!("mass must be positive, got {mass}")));
        }
        if cosmological_constant <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "cosmological_constant must be positive, got {cosmological_constant}"
            )));
        }
        if spin < 0.0 {
            return Err(Error::InvalidParams(format!("spin must be nonnegative, got {spin}")));
        }
        if charge < 0.0 {
            return Err(Error::InvalidParams(format!(
                "charge must be nonnegative, got {charge}"
            )));
        }
        Ok(Self {
            mass,
            spin,
            charge,
            cosmological_constant,
        })
    }

    /// chi = 1 + Lambda a^2 / 3; always >= 1.
    pub fn chi(&self) -> f64 {
        1.0 + self.cosmological_constant * self.spin * self.spin / 3.0
    }

    /// xi = (Lambda a^2 / 3) / chi; in [0, 1), shared by every horizon of
    /// this spacetime.
    pub fn xi(&self) -> f64 {
        let t = self.cosmological_constant * self.spin * self.spin / 3.0;
        t / (1.0 + t)
    }

    /// The horizon function, evaluated exactly as written.
    pub fn delta_r(&self, r: f64) -> f64 {
        let a2 = self.spin * self.spin;
        (r * r + a2) * (1.0 - self.cosmological_constant * r * r / 3.0) - 2.0 * self.mass * r
            + self.charge * self.charge
    }

    /// d(delta_r)/dr, for Newton polishing of roots.
    pub fn delta_r_prime(&self, r: f64) -> f64 {
        let a2 = self.spin * self.spin;
        let lam = self.cosmological_constant;
        2.0 * r * (1.0 - lam * r * r / 3.0) - (r * r + a2) * (2.0 * lam * r / 3.0) - 2.0 * self.mass
    }

    /// Coefficients (c0, c1, c2) of the monic form r^4 + c2 r^2 + c1 r + c0
    /// obtained by scaling delta_r by -3/Lambda. The cubic coefficient is
    /// identically zero.
    fn monic_coefficients(&self) -> (f64, f64, f64) {
        let a2 = self.spin * self.spin;
        let lam = self.cosmological_constant;
        let c0 = -3.0 * (a2 + self.charge * self.charge) / lam;
        let c1 = 6.0 * self.mass / lam;
        let c2 = a2 - 3.0 / lam;
        (c0, c1, c2)
    }
}

/// Which physical horizon of a spacetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Horizon {
    Event,
    Cosmological,
}

/// Classified real roots of delta_r = 0.
#[derive(Debug, Clone, Serialize)]
pub struct HorizonSet {
    pub negative_root: f64,
    /// Present whenever a^2 + Q^2 > 0 puts a third positive root below the
    /// event radius; equal to `event` only in the extremal limit.
    pub cauchy: Option<f64>,
    pub event: f64,
    pub cosmological: f64,
    /// |delta_r| at each classified root, ordered
    /// [negative, cauchy (if present), event, cosmological].
    pub residuals: Vec<f64>,
    /// All real roots, ascending. The near-zero root of the a = Q = 0 limit
    /// appears here but is never classified as a horizon.
    pub real_roots: Vec<f64>,
    /// (re, |im|) of nonreal quartic roots; diagnostics only.
    pub complex_pairs: Vec<(f64, f64)>,
}

impl HorizonSet {
    pub fn radius(&self, horizon: Horizon) -> f64 {
        match horizon {
            Horizon::Event => self.event,
            Horizon::Cosmological => self.cosmological,
        }
    }
}

/// Newton-polish a quartic root against the unscaled delta_r.
fn polish_root(params: &SpacetimeParams, mut r: f64) -> f64 {
    for _ in 0..40 {
        let f = params.delta_r(r);
        let fp = params.delta_r_prime(r);
        if fp == 0.0 {
            break;
        }
        let step = f / fp;
        r -= step;
        if step.abs() <= 4.0 * f64::EPSILON * r.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    r
}

/// Locate and classify all real roots of delta_r = 0.
///
/// Roots come from a simultaneous iteration on the monic quartic, polished
/// by Newton iteration on delta_r. The two largest positive roots become the
/// event and cosmological radii; a third positive root, if present, is the
/// Cauchy radius. Fails with `Error::Regime` when no distinct
/// event/cosmological pair exists.
pub fn find_horizons(params: &SpacetimeParams) -> Result<HorizonSet> {
    let (c0, c1, c2) = params.monic_coefficients();
    let roots = quartic::quartic_roots(c0, c1, c2, 0.0);

    let mut real: Vec<f64> = quartic::real_roots(&roots)
        .into_iter()
        .map(|r| polish_root(params, r))
        .collect();
    real.sort_by(|a, b| a.total_cmp(b));

    let complex_pairs: Vec<(f64, f64)> = roots
        .iter()
        .filter(|z| z.im.abs() >= 1e-10 * (1.0 + z.re.abs()))
        .map(|z| (z.re, z.im.abs()))
        .collect();

    let scale = real.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let positive_floor = 1e-12 * scale.max(f64::MIN_POSITIVE);

    let positives: Vec<f64> = real.iter().copied().filter(|&r| r > positive_floor).collect();
    let negatives: Vec<f64> = real.iter().copied().filter(|&r| r < -positive_floor).collect();

    if positives.len() < 2 {
        return Err(Error::Regime(format!(
            "expected an event/cosmological horizon pair, found {} positive real root(s) of delta_r",
            positives.len()
        )));
    }
    if positives.len() > 3 {
        return Err(Error::Regime(
            "more than three positive real roots; roots failed to classify".into(),
        ));
    }

    let (cauchy, event, cosmological) = match positives.len() {
        2 => (None, positives[0], positives[1]),
        _ => (Some(positives[0]), positives[1], positives[2]),
    };

    if cosmological - event <= 1e-8 * cosmological {
        return Err(Error::Regime(format!(
            "event and cosmological horizons coincide within tolerance: r_e = {event}, r_c = {cosmological}"
        )));
    }

    let negative_root = match negatives.first() {
        Some(&r) => r,
        None => {
            return Err(Error::Regime(
                "no negative real root found; quartic root classification failed".into(),
            ))
        }
    };

    let mut classified = vec![negative_root];
    if let Some(rc) = cauchy {
        classified.push(rc);
    }
    classified.push(event);
    classified.push(cosmological);
    let residuals: Vec<f64> = classified.iter().map(|&r| params.delta_r(r).abs()).collect();

    Ok(HorizonSet {
        negative_root,
        cauchy,
        event,
        cosmological,
        residuals,
        real_roots: real,
        complex_pairs,
    })
}

/// Checkable standing assumptions of the reconstruction pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    pub spin_positive: bool,
    pub charge_positive: bool,
    pub horizons_found: bool,
    pub event_cosmo_distinct: bool,
    /// (r_c - r_e) / r_c when both horizons exist.
    pub degeneracy_margin: Option<f64>,
    /// Trace-based reconstruction requires spin > 0 and distinct horizons.
    pub inverse_applicable: bool,
    pub notes: Vec<String>,
}

impl RegimeReport {
    /// The forward pipeline only needs the horizon pair to exist.
    pub fn forward_ok(&self) -> bool {
        self.horizons_found && self.event_cosmo_distinct
    }
}

/// Report which standing assumptions hold; never errors.
pub fn validate_regime(params: &SpacetimeParams) -> RegimeReport {
    let mut notes = Vec::new();
    let spin_positive = params.spin > 0.0;
    let charge_positive = params.charge > 0.0;
    if !spin_positive {
        notes.push("spin = 0: horizons are round; trace-based reconstruction requires a > 0".into());
    }
    if !charge_positive {
        notes.push("charge = 0: uncharged limit".into());
    }

    let (horizons_found, event_cosmo_distinct, degeneracy_margin) = match find_horizons(params) {
        Ok(h) => {
            let margin = (h.cosmological - h.event) / h.cosmological;
            (true, true, Some(margin))
        }
        Err(Error::Regime(msg)) => {
            notes.push(format!("regime: {msg}"));
            let near_degenerate = msg.contains("coincide");
            (near_degenerate, false, None)
        }
        Err(e) => {
            notes.push(format!("horizon search failed: {e}"));
            (false, false, None)
        }
    };

    RegimeReport {
        spin_positive,
        charge_positive,
        horizons_found,
        event_cosmo_distinct,
        degeneracy_margin,
        inverse_applicable: spin_positive && horizons_found && event_cosmo_distinct,
        notes,
    }
}
