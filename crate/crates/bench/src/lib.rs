//! Shared fixtures for the criterion benchmarks.

use kdlab_core::distributions::AnalyticDistribution;

pub fn reference_distribution() -> AnalyticDistribution {
    AnalyticDistribution::bimodal_lorentzian(2.0).expect("reference distribution")
}
