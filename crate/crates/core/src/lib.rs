//! Numerical laboratory for the Hopf bifurcation of the Kuramoto-Daido model
//!
//! The crate follows one pipeline from linear theory to direct simulation:
//!
//! 1. [`distributions`] — analytic frequency densities g(ω), their Hilbert
//!    transform and zeros, and frequency sampling.
//! 2. [`spectral`] — the dispersion function D(λ) on both Riemann sheets,
//!    eigenvalues and generalized eigenvalues of the linearized operators,
//!    branch tracking in the coupling K, the transition point (y_c, K_c) and
//!    the scalar pairings feeding the reduction.
//! 3. [`center_manifold`] — the reduced-system coefficients p₁..p₄ / q₁..q₃,
//!    averaged fixed points and the predicted Hopf orbit.
//! 4. [`reduced_ode`] — integrators for the center-manifold, polar and
//!    averaged systems.
//! 5. [`simulate`] — finite-N oscillators, the spectral Galerkin hierarchy,
//!    its linearization and the Ott-Antonsen oracle.
//! 6. [`analysis`] — amplitude/frequency/decay measurements and bifurcation
//!    sweeps comparing simulation against theory.
//! 7. [`acceptance`] — the end-to-end verification suite.

pub mod acceptance;
pub mod analysis;
pub mod center_manifold;
pub mod distributions;
pub mod error;
pub mod quad;
pub mod reduced_ode;
pub mod simulate;
pub mod spectral;

pub use analysis::{DecayFit, FrequencyEstimate, SweepResult, SweepRow};
pub use center_manifold::{CmCoefficients, CmTerms, OrbitPrediction, ScalingLaw};
pub use distributions::{AnalyticDistribution, CustomAnalytic, Family, SampleMode};
pub use error::{CoreError, Result};
pub use reduced_ode::{CenterState, ReducedTrajectory, SystemKind};
pub use simulate::{GalerkinOutput, ModelParams, OrderParameterSeries, SeriesSource};
pub use spectral::{
    EigenvalueBranch, PairingValue, Sheet, SpectralPoint, TransitionReport,
};

pub use num_complex::Complex64;
