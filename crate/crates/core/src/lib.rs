//! Degree counting for singular Liouville systems
//!
//! ```text
//! Δu_i + Σ_j a_ij ρ_j (h_j e^{u_j} / ∫ h_j e^{u_j} − 1) = Σ_l 4π γ_l (δ_{p_l} − 1)
//! ```
//!
//! on a compact surface (or a planar domain with Dirichlet data), together
//! with a spectral solver for the flat torus.
//!
//! * [`matrix`]: coupling matrix, inverse, hypotheses (H1)/(H2).
//! * [`spectrum`]: critical levels and region lookup.
//! * [`series`]: generating function with real exponents.
//! * [`degree`]: the degree, the torus closed form, existence certificates.
//! * [`pohozaev`]: blowup mass identities.
//! * [`torus`]: Green's function, weights, residual, functional and solver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod degree;
pub mod error;
pub mod matrix;
pub mod pohozaev;
pub mod series;
pub mod spectrum;
pub mod torus;

pub use degree::{
    existence_certificate, leray_schauder_degree, mass_normalization, normalized_energy, torus_special_degree,
    DegreeResult, ProblemInstance, SurfaceSpec,
};
pub use error::{Error, Result};
pub use matrix::{check_h1, check_h2, check_hypotheses, irreducible, ConditionReport, InteractionMatrix};
pub use series::{build_generating_function, coefficients_aligned, GeneralizedSeries};
pub use spectrum::{enumerate_spectrum, locate_region, CriticalSpectrum, SingularitySet};
