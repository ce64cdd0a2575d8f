//! Spectral determination of Kerr-Newman-de Sitter spacetimes.
//!
//! A nondegenerate KNdS spacetime (mass m, spin a, charge Q, cosmological
//! constant Lambda > 0) has an event and a cosmological horizon, each a
//! topological 2-sphere whose induced metric is encoded by one even profile
//! function on [-1, 1]. This crate computes, in both directions, the
//! dictionary between the physical parameters and the Laplace spectra of
//! those two surfaces:
//!
//! - **forward**: horizon radii from the quartic horizon condition, the
//!   induced geometries, and closed-form values of the trace invariants
//!   gamma_0 (regularized) and gamma_k = sum over the k-th axial mode of
//!   1/lambda;
//! - **spectral**: an independent finite-volume eigensolver for the mode
//!   operators, with Richardson extrapolation and Weyl-tail closure, used
//!   to verify every closed form numerically;
//! - **inverse**: exact reconstruction of (m, a, Q, Lambda) from the four
//!   numbers {gamma_0, gamma_1} of the two horizons, with staged error
//!   reporting. A rotating (a > 0) spacetime is determined uniquely; round
//!   horizons carry no spin information and are rejected as degenerate.
//!
//! Conventions: G = c = 1, the metric signature is (-, +, +, +), and
//! horizon metrics are normalized by the homothety factor eta^2 (1 - xi)
//! so that comparable surfaces have area-4pi representatives.

pub mod error;
pub mod geometry;
pub mod inverse;
pub mod quadrature;
pub mod quartic;
pub mod spacetime;
pub mod spectrum;
pub mod traces;

pub use error::{Error, Result};
pub use geometry::{derive_geometry, HorizonGeometry, MetricProfile};
pub use inverse::{reconstruct, ReconstructionDiagnostics, ReconstructionResult};
pub use spacetime::{find_horizons, validate_regime, Horizon, HorizonSet, RegimeReport, SpacetimeParams};
pub use spectrum::{
    assemble_full_spectrum, assemble_operator, eigenvalues, trace_estimate, traces_from_spectrum,
    DiscreteOperator, EigenEstimate, OperatorSpec, SpectralLine, SpectrumResult,
};
pub use traces::{forward_traces, gamma0_closed, gammak_closed, Provenance, TraceSet};
