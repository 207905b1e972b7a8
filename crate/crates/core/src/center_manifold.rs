//! Center-manifold coefficients and the predicted Hopf orbit.
//!
//! Near onset the order parameter is governed by a two-complex-dimensional
//! system in the center coordinates (α₊, α₋). Its coefficients are rational
//! expressions in D' and D'' at iy_c:
//!
//! sine coupling (h = 0):
//!   p₁ = −2/(K_c² D'(iy_c))          p₂ = K_c² D''(iy_c)/(8 D'(iy_c))
//!   p₃ = −K_c² conj(D'(iy_c))/(8 i y_c D'(iy_c))   p₄ = K_c²/(4 i y_c)
//!
//! second-harmonic coupling (h ≠ 0):
//!   q₁ = p₁     q₂ = h K_c/(1−h)     q₃ = q₂ · conj(D'(iy_c))/D'(iy_c)
//!
//! Averaging the polar form over the fast phase leaves the radial systems
//! ṙ = ε Re(p₁) r + Re(p₂) r³ and ṙ = ε Re(q₁) r + q₂ r², whose nontrivial
//! fixed point r* yields the standing-wave orbit η₁ ≈ 2 r* cos(y_c t + β):
//! amplitude 2√(−ε Re p₁/Re p₂) (√ε scaling) for sine coupling and
//! −2ε(1−h) Re(p₁)/(h K_c) (linear scaling) for the second harmonic.

use num_complex::Complex64;

use crate::distributions::AnalyticDistribution;
use crate::error::{CoreError, Result};
use crate::spectral::{self, SpectralPoint, TransitionReport};

/// Smallest |h| accepted by the second-harmonic reduction: its ordering
/// ansatz needs the quadratic term to dominate the cubic, and the predicted
/// amplitude diverges like 1/h as h → 0.
pub const H_MIN: f64 = 0.05;

/// Coupling-specific coefficient set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CmTerms {
    /// Pure sine coupling (h = 0).
    Sine {
        p1: Complex64,
        p2: Complex64,
        p3: Complex64,
        p4: Complex64,
    },
    /// Mixed coupling with second-harmonic weight h.
    SecondHarmonic {
        h: f64,
        q1: Complex64,
        q2: Complex64,
        q3: Complex64,
    },
}

/// Center-manifold coefficients together with the onset data they refer to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmCoefficients {
    pub y_c: f64,
    pub k_c: f64,
    pub terms: CmTerms,
}

/// Stability class of an averaged fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Saddle,
    Unstable,
}

/// A fixed point (r₊, r₋) of the averaged radial system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub r_plus: f64,
    pub r_minus: f64,
    pub stability: Stability,
}

/// Amplitude scaling law of the bifurcating orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingLaw {
    SqrtEpsilon,
    LinearEpsilon,
}

impl std::fmt::Display for ScalingLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalingLaw::SqrtEpsilon => write!(f, "sqrt(epsilon)"),
            ScalingLaw::LinearEpsilon => write!(f, "linear(epsilon)"),
        }
    }
}

/// The predicted periodic orbit of the order parameter at ε = K − K_c.
///
/// The orbit phase β is an initial-condition freedom and is never predicted;
/// `frequency` is the onset frequency y_c and carries an O(ε) uncertainty
/// band because the frequency correction inside cos(y_c t + O(ε)) is not
/// computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitPrediction {
    pub epsilon: f64,
    pub exists: bool,
    pub stable: bool,
    pub r_star: f64,
    /// Peak |η₁| of the standing wave, 2·r*.
    pub amplitude: f64,
    pub frequency: f64,
    /// Half-width of the O(ε) uncertainty band on `frequency`.
    pub frequency_band: f64,
    pub scaling: ScalingLaw,
}

fn onset_derivatives(
    dist: &AnalyticDistribution,
    report: &TransitionReport,
) -> Result<(Complex64, Complex64)> {
    let point = SpectralPoint::principal(Complex64::new(0.0, report.y_c));
    let d1 = spectral::dispersion_derivative(dist, point, 1)?;
    let d2 = spectral::dispersion_derivative(dist, point, 2)?;
    Ok((d1, d2))
}

fn require_hopf_assumptions(report: &TransitionReport, need_a1: bool) -> Result<()> {
    let flags = report
        .assumptions
        .as_ref()
        .expect("verify_assumptions fills the flags");
    let mut failed = Vec::new();
    if need_a1 && !flags.a1.ok {
        failed.push(format!("A1 ({})", flags.a1.detail));
    }
    if !flags.a3.ok {
        failed.push(format!("A3 ({})", flags.a3.detail));
    }
    if !flags.a4.ok {
        failed.push(format!("A4 ({})", flags.a4.detail));
    }
    if !flags.a5.ok {
        failed.push(format!("A5 ({})", flags.a5.detail));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CoreError::AssumptionViolated(failed.join("; ")))
    }
}

/// Coefficients of the sine-coupling (h = 0) reduction.
pub fn coefficients_sine(dist: &AnalyticDistribution) -> Result<CmCoefficients> {
    let report = spectral::verify_assumptions(dist, 0.0)?;
    require_hopf_assumptions(&report, false)?;
    let (d1, d2) = onset_derivatives(dist, &report)?;
    let k_c = report.k_c;
    let y_c = report.y_c;
    let iy = Complex64::new(0.0, y_c);
    let k2 = k_c * k_c;
    Ok(CmCoefficients {
        y_c,
        k_c,
        terms: CmTerms::Sine {
            p1: -2.0 / (k2 * d1),
            p2: k2 * d2 / (8.0 * d1),
            p3: -k2 * d1.conj() / (8.0 * iy * d1),
            p4: k2 / (4.0 * iy),
        },
    })
}

/// Coefficients of the second-harmonic (h ≠ 0) reduction.
pub fn coefficients_second_harmonic(
    dist: &AnalyticDistribution,
    h: f64,
) -> Result<CmCoefficients> {
    if h.abs() < H_MIN {
        return Err(CoreError::InvalidInput(format!(
            "|h| = {} below h_min = {H_MIN}: the second-harmonic expansion \
             degenerates as h → 0 (use the sine reduction instead)",
            h.abs()
        )));
    }
    if h >= 1.0 {
        return Err(CoreError::AssumptionViolated(format!(
            "h = {h} violates h < 1"
        )));
    }
    let report = spectral::verify_assumptions(dist, h)?;
    require_hopf_assumptions(&report, true)?;
    let (d1, _) = onset_derivatives(dist, &report)?;
    let k_c = report.k_c;
    let q2 = Complex64::new(h * k_c / (1.0 - h), 0.0);
    Ok(CmCoefficients {
        y_c: report.y_c,
        k_c,
        terms: CmTerms::SecondHarmonic {
            h,
            q1: -2.0 / (k_c * k_c * d1),
            q2,
            q3: q2 * d1.conj() / d1,
        },
    })
}

impl CmCoefficients {
    /// Nontrivial averaged fixed-point radius for the given ε, if it exists.
    pub fn r_star(&self, epsilon: f64) -> Option<f64> {
        match self.terms {
            CmTerms::Sine { p1, p2, .. } => {
                let radicand = -epsilon * p1.re / p2.re;
                (radicand > 0.0).then(|| radicand.sqrt())
            }
            CmTerms::SecondHarmonic { q1, q2, .. } => {
                let value = -epsilon * q1.re / q2.re;
                (value > 0.0).then_some(value)
            }
        }
    }
}

/// Fixed points of the averaged radial system with their stability.
///
/// The candidates are (0,0), (r*,0), (0,r*), (r*,r*); the Jacobian at each
/// is diagonal, ε·Re(p₁)·diag(...) with factors {1,1}, {−2,1}, {1,−2},
/// {−2,−2} for sine coupling and {1,1}, {−1,1}, {1,−1}, {−1,−1} for the
/// second harmonic.
pub fn averaged_fixed_points(coeffs: &CmCoefficients, epsilon: f64) -> Vec<FixedPoint> {
    let growth = match coeffs.terms {
        CmTerms::Sine { p1, .. } => epsilon * p1.re,
        CmTerms::SecondHarmonic { q1, .. } => epsilon * q1.re,
    };
    let contraction = match coeffs.terms {
        CmTerms::Sine { .. } => -2.0,
        CmTerms::SecondHarmonic { .. } => -1.0,
    };
    let classify = |eigs: [f64; 2]| {
        if eigs[0] < 0.0 && eigs[1] < 0.0 {
            Stability::Stable
        } else if eigs[0] > 0.0 && eigs[1] > 0.0 {
            Stability::Unstable
        } else {
            Stability::Saddle
        }
    };

    let mut points = vec![FixedPoint {
        r_plus: 0.0,
        r_minus: 0.0,
        stability: classify([growth, growth]),
    }];
    if let Some(r) = coeffs.r_star(epsilon) {
        points.push(FixedPoint {
            r_plus: r,
            r_minus: 0.0,
            stability: classify([contraction * growth, growth]),
        });
        points.push(FixedPoint {
            r_plus: 0.0,
            r_minus: r,
            stability: classify([growth, contraction * growth]),
        });
        points.push(FixedPoint {
            r_plus: r,
            r_minus: r,
            stability: classify([contraction * growth, contraction * growth]),
        });
    }
    points
}

/// The Hopf-orbit prediction at ε = K − K_c.
///
/// Supercritical sign regimes give a stable orbit for ε > 0; in the
/// subcritical regimes (Re p₂ > 0, or 0 < h < 1) the same amplitude formula
/// describes an unstable family existing for ε < 0.
pub fn predict_orbit(coeffs: &CmCoefficients, epsilon: f64) -> OrbitPrediction {
    let r_star = coeffs.r_star(epsilon);
    let exists = r_star.is_some();
    let r = r_star.unwrap_or(0.0);
    let (stable, scaling) = match coeffs.terms {
        CmTerms::Sine { p2, .. } => (
            exists && epsilon > 0.0 && p2.re < 0.0,
            ScalingLaw::SqrtEpsilon,
        ),
        CmTerms::SecondHarmonic { q2, .. } => (
            exists && epsilon > 0.0 && q2.re < 0.0,
            ScalingLaw::LinearEpsilon,
        ),
    };
    OrbitPrediction {
        epsilon,
        exists,
        stable,
        r_star: r,
        amplitude: 2.0 * r,
        frequency: coeffs.y_c,
        frequency_band: epsilon.abs(),
        scaling,
    }
}

/// JSON record for the coefficient/prediction pipeline output.
pub fn report_record(
    coeffs: &CmCoefficients,
    prediction: &OrbitPrediction,
) -> serde_json::Value {
    let complex = |z: Complex64| serde_json::json!([z.re, z.im]);
    let mut record = serde_json::json!({
        "y_c": coeffs.y_c,
        "K_c": coeffs.k_c,
        "epsilon": prediction.epsilon,
        "r_star": prediction.r_star,
        "amplitude": prediction.amplitude,
        "frequency": prediction.frequency,
        "frequency_band": prediction.frequency_band,
        "exists": prediction.exists,
        "stable": prediction.stable,
        "scaling": prediction.scaling.to_string(),
        "beta": "free (set by the initial condition)",
    });
    match coeffs.terms {
        CmTerms::Sine { p1, p2, p3, p4 } => {
            record["kind"] = "sine".into();
            record["p1"] = complex(p1);
            record["p2"] = complex(p2);
            record["p3"] = complex(p3);
            record["p4"] = complex(p4);
        }
        CmTerms::SecondHarmonic { h, q1, q2, q3 } => {
            record["kind"] = "second_harmonic".into();
            record["h"] = h.into();
            record["q1"] = complex(q1);
            record["q2"] = complex(q2);
            record["q3"] = complex(q3);
        }
    }
    record
}
