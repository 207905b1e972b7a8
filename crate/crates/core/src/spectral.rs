//! Dispersion function and generalized spectra of the linearized model.
//!
//! The linearization of the continuum model around the incoherent state has
//! purely continuous spectrum on the imaginary axis; its point spectrum on
//! the right half plane consists of the roots of D(λ) = 2/K with
//!
//! D(λ) = ∫ g(ω)/(λ − iω) dω,   Re λ > 0.
//!
//! D continues analytically across the axis to D(λ) + 2π g(−iλ); roots of
//! the continued equation with Re λ < 0 live on the second Riemann sheet of
//! the resolvent and govern the weak decay of the order parameter. This
//! module evaluates D and its first two derivatives on both sheets (closed
//! form for the bimodal Lorentzian, adaptive quadrature otherwise), finds
//! ordinary and generalized eigenvalues from a Newton seed grid, continues
//! them in K, locates the transition point (y_c, K_c), checks the standing
//! hypotheses, and evaluates the scalar pairings ⟨μ₊ᵐ μ₋ⁿ P₀ | P₀⟩ used by
//! the center-manifold reduction.
//!
//! On the axis the boundary values are the limits from the right half plane,
//!
//! lim D⁽ⁿ⁾(x + iy), x→0⁺  =  i⁻ⁿ (π g⁽ⁿ⁾(y) − iπ H[g⁽ⁿ⁾](y)),
//!
//! so every axis evaluation reduces to densities and Hilbert transforms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::distributions::{hilbert_of, AnalyticDistribution};
use crate::error::{CoreError, Result};
use crate::quad::{self, QuadConfig};

/// Roots with |Re λ| below this are treated as axis (boundary) roots.
pub const BOUNDARY_TOL: f64 = 1e-8;
/// Residual bound every reported root must satisfy.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// |Re λ| below this triggers the sheet switch while tracking a branch.
pub const CROSSING_TOL: f64 = 1e-6;
/// |D'(λ)| below this at a root marks a double root.
pub const MULTIPLICITY_TOL: f64 = 1e-6;
/// Distinct roots are merged when closer than this.
const DEDUP_TOL: f64 = 1e-8;

/// Which branch of the Riemann surface a spectral point lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// Re λ ≥ 0; axis values are limits from the right.
    Principal,
    /// Re λ ≤ 0, the analytic continuation across the branch cut.
    Second,
}

impl std::fmt::Display for Sheet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sheet::Principal => write!(f, "principal"),
            Sheet::Second => write!(f, "second"),
        }
    }
}

/// A complex λ tagged with its Riemann sheet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub lambda: Complex64,
    pub sheet: Sheet,
}

impl SpectralPoint {
    pub fn principal(lambda: Complex64) -> Self {
        Self {
            lambda,
            sheet: Sheet::Principal,
        }
    }

    pub fn second(lambda: Complex64) -> Self {
        Self {
            lambda,
            sheet: Sheet::Second,
        }
    }

    /// Tag by the sign of Re λ, axis points defaulting to the second sheet.
    pub fn from_sign(lambda: Complex64) -> Self {
        if lambda.re > BOUNDARY_TOL {
            Self::principal(lambda)
        } else {
            Self::second(lambda)
        }
    }

    /// Check the sheet invariant against the distribution's strip.
    pub fn validate(&self, dist: &AnalyticDistribution) -> Result<()> {
        match self.sheet {
            Sheet::Principal => {
                if self.lambda.re < -BOUNDARY_TOL {
                    return Err(CoreError::InvalidInput(format!(
                        "principal-sheet point requires Re λ ≥ 0, got {}",
                        self.lambda
                    )));
                }
            }
            Sheet::Second => {
                if self.lambda.re > BOUNDARY_TOL {
                    return Err(CoreError::InvalidInput(format!(
                        "second-sheet point requires Re λ ≤ 0, got {}",
                        self.lambda
                    )));
                }
                if self.lambda.re < -dist.continuation_limit() {
                    return Err(CoreError::InvalidInput(format!(
                        "second-sheet point {} lies beyond the continuation strip (δ = {})",
                        self.lambda,
                        dist.continuation_limit()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A located root with its defect data.
#[derive(Debug, Clone, Copy)]
pub struct SpectralRoot {
    pub point: SpectralPoint,
    pub residual: f64,
    pub multiplicity: u32,
}

/// Result of an eigenvalue search on the right half plane.
#[derive(Debug, Clone, Default)]
pub struct EigenvalueSearch {
    /// Roots with Re λ > 0.
    pub eigenvalues: Vec<SpectralRoot>,
    /// Roots that landed on the axis (excluded, reported for diagnostics).
    pub boundary: Vec<SpectralRoot>,
}

/// One continuation sample along a branch.
#[derive(Debug, Clone, Copy)]
pub struct BranchSample {
    pub k: f64,
    pub point: SpectralPoint,
    pub residual: f64,
}

/// A K-parameterized path of (generalized) eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenvalueBranch {
    pub harmonic: u8,
    pub samples: Vec<BranchSample>,
}

impl EigenvalueBranch {
    /// K values at which the branch crosses the imaginary axis.
    pub fn crossings(&self) -> Vec<f64> {
        self.samples
            .windows(2)
            .filter(|w| w[0].point.sheet != w[1].point.sheet)
            .map(|w| {
                if w[0].point.lambda.re.abs() < w[1].point.lambda.re.abs() {
                    w[0].k
                } else {
                    w[1].k
                }
            })
            .collect()
    }
}

/// A transition candidate: a Hilbert-transform zero with its merge coupling.
#[derive(Debug, Clone, Copy)]
pub struct TransitionCandidate {
    pub y: f64,
    pub k: f64,
}

/// Outcome of one hypothesis check.
#[derive(Debug, Clone)]
pub struct AssumptionCheck {
    pub ok: bool,
    pub detail: String,
}

/// The five standing hypotheses with diagnostics.
#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub a1: AssumptionCheck,
    pub a2: AssumptionCheck,
    pub a3: AssumptionCheck,
    pub a4: AssumptionCheck,
    pub a5: AssumptionCheck,
}

impl AssumptionReport {
    pub fn all_ok(&self) -> bool {
        self.a1.ok && self.a2.ok && self.a3.ok && self.a4.ok && self.a5.ok
    }
}

/// Transition point data: candidates, (y_c, K_c), onset derivative and the
/// hypothesis flags once `verify_assumptions` has filled them.
#[derive(Debug, Clone)]
pub struct TransitionReport {
    pub candidates: Vec<TransitionCandidate>,
    /// Positive member of the ±y_c pair (the pair itself for even g).
    pub y_c: f64,
    pub k_c: f64,
    /// Second-harmonic threshold K_c⁽²⁾; absent for h ≤ 0.
    pub k_c2: Option<f64>,
    /// dλ_c/dK at onset, −2/(K_c² D'(iy_c)).
    pub dlambda_dk: Complex64,
    pub assumptions: Option<AssumptionReport>,
}

/// ⟨μ₊ᵐ μ₋ⁿ P₀ | P₀⟩.
#[derive(Debug, Clone, Copy)]
pub struct PairingValue {
    pub m: u32,
    pub n: u32,
    pub value: Complex64,
}

impl SpectralRoot {
    /// JSON record `{K, re_lambda, im_lambda, sheet, residual}`.
    pub fn record(&self, k: f64) -> serde_json::Value {
        serde_json::json!({
            "K": k,
            "re_lambda": self.point.lambda.re,
            "im_lambda": self.point.lambda.im,
            "sheet": self.point.sheet.to_string(),
            "residual": self.residual,
        })
    }
}

/// Rectangular search region in the λ plane.
#[derive(Debug, Clone, Copy)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Self {
            re_min,
            re_max,
            im_min,
            im_max,
        }
    }

    fn contains(&self, z: Complex64, slack: f64) -> bool {
        z.re >= self.re_min - slack
            && z.re <= self.re_max + slack
            && z.im >= self.im_min - slack
            && z.im <= self.im_max + slack
    }
}

// ---------------------------------------------------------------------------
// Dispersion function
// ---------------------------------------------------------------------------

fn quad_cfg() -> QuadConfig {
    QuadConfig::with_tol(1e-12)
}

/// Closed form of the dispersion function for the bimodal Lorentzian,
/// (λ+1)/((λ+1)² + ω₀²), valid on both sheets.
fn closed_dispersion(omega0: f64, lambda: Complex64, n: u32) -> Result<Complex64> {
    let u = lambda + 1.0;
    let den = u * u + omega0 * omega0;
    // Poles of the continued dispersion sit at λ = −1 ± iω₀.
    for pole in [
        Complex64::new(-1.0, omega0),
        Complex64::new(-1.0, -omega0),
    ] {
        let distance = (lambda - pole).norm();
        if distance < 1e-9 {
            return Err(CoreError::PoleProximity { pole, distance });
        }
    }
    Ok(match n {
        0 => u / den,
        1 => (omega0 * omega0 - u * u) / (den * den),
        2 => 2.0 * u * (u * u - 3.0 * omega0 * omega0) / (den * den * den),
        _ => unreachable!("derivative order limited to 2"),
    })
}

/// Plain Cauchy integral ∫ g(ω)/(λ − iω)ⁿ⁺¹ dω, valid off the axis.
fn cauchy_integral(
    dist: &AnalyticDistribution,
    lambda: Complex64,
    n: u32,
) -> Result<Complex64> {
    if lambda.re == 0.0 {
        return Err(CoreError::InvalidInput(
            "the Cauchy integral is singular on the axis; use the boundary formula".into(),
        ));
    }
    let value = quad::integrate_real_line_complex(
        |w| {
            let base = lambda - Complex64::new(0.0, w);
            dist.eval_density(w) / base.powu(n + 1)
        },
        &quad_cfg(),
    )?;
    // D⁽ⁿ⁾(λ) = (−1)ⁿ n! ∫ g/(λ−iω)ⁿ⁺¹.
    let factor = [1.0, -1.0, 2.0][n as usize];
    Ok(factor * value)
}

/// Axis boundary value i⁻ⁿ (π g⁽ⁿ⁾(y) − iπ H[g⁽ⁿ⁾](y)).
fn axis_value(dist: &AnalyticDistribution, y: f64, n: u32) -> Result<Complex64> {
    let cfg = quad_cfg();
    let (g, h) = match n {
        0 => (dist.eval_density(y), hilbert_of(|w| dist.eval_density(w), y, &cfg)?),
        1 => (
            dist.density_derivatives(y).0,
            hilbert_of(|w| dist.density_derivatives(w).0, y, &cfg)?,
        ),
        2 => (
            dist.density_derivatives(y).1,
            hilbert_of(|w| dist.density_derivatives(w).1, y, &cfg)?,
        ),
        _ => unreachable!(),
    };
    let boundary = Complex64::new(PI * g, -PI * h);
    Ok(boundary / Complex64::i().powu(n))
}

/// g⁽ⁿ⁾(z) off the real axis, for the continuation term's derivatives.
fn density_complex_derivative(
    dist: &AnalyticDistribution,
    z: Complex64,
    n: u32,
) -> Result<Complex64> {
    match n {
        0 => dist.eval_density_complex(z),
        1 => {
            let h = 1e-6;
            let plus = dist.eval_density_complex(z + h)?;
            let minus = dist.eval_density_complex(z - h)?;
            Ok((plus - minus) / (2.0 * h))
        }
        2 => {
            let h = 1e-4;
            let plus = dist.eval_density_complex(z + h)?;
            let mid = dist.eval_density_complex(z)?;
            let minus = dist.eval_density_complex(z - h)?;
            Ok((plus - 2.0 * mid + minus) / (h * h))
        }
        _ => unreachable!(),
    }
}

/// Quadrature evaluation of D⁽ⁿ⁾ honoring the sheet of `point`.
fn dispersion_quad_n(
    dist: &AnalyticDistribution,
    point: SpectralPoint,
    n: u32,
) -> Result<Complex64> {
    point.validate(dist)?;
    let lambda = point.lambda;
    if lambda.re.abs() <= 1e-12 {
        return axis_value(dist, lambda.im, n);
    }
    match point.sheet {
        Sheet::Principal => cauchy_integral(dist, lambda, n),
        Sheet::Second => {
            let integral = cauchy_integral(dist, lambda, n)?;
            // d/dλ [2π g(−iλ)] chains a factor (−i) per order.
            let g_n = density_complex_derivative(dist, -Complex64::i() * lambda, n)?;
            let chain = (-Complex64::i()).powu(n);
            Ok(integral + 2.0 * PI * chain * g_n)
        }
    }
}

fn dispersion_n(
    dist: &AnalyticDistribution,
    point: SpectralPoint,
    n: u32,
) -> Result<Complex64> {
    point.validate(dist)?;
    if let Some(omega0) = dist.peak_offset() {
        if dist.has_closed_dispersion() {
            return closed_dispersion(omega0, point.lambda, n);
        }
    }
    dispersion_quad_n(dist, point, n)
}

/// D(λ) on the sheet of `point`.
///
/// Principal-sheet axis values are limits from the right; second-sheet
/// values carry the continuation term 2π g(−iλ). The bimodal Lorentzian
/// dispatches to its closed form.
pub fn dispersion(dist: &AnalyticDistribution, point: SpectralPoint) -> Result<Complex64> {
    dispersion_n(dist, point, 0)
}

/// D⁽ⁿ⁾(λ), n = 1 or 2.
pub fn dispersion_derivative(
    dist: &AnalyticDistribution,
    point: SpectralPoint,
    n: u32,
) -> Result<Complex64> {
    if n == 0 || n > 2 {
        return Err(CoreError::InvalidInput(format!(
            "derivative order must be 1 or 2, got {n}"
        )));
    }
    dispersion_n(dist, point, n)
}

/// Always-quadrature evaluation of D, for cross-checks of the closed form.
pub fn dispersion_quadrature(
    dist: &AnalyticDistribution,
    point: SpectralPoint,
) -> Result<Complex64> {
    dispersion_quad_n(dist, point, 0)
}

/// Always-quadrature evaluation of D⁽ⁿ⁾.
pub fn dispersion_derivative_quadrature(
    dist: &AnalyticDistribution,
    point: SpectralPoint,
    n: u32,
) -> Result<Complex64> {
    if n == 0 || n > 2 {
        return Err(CoreError::InvalidInput(format!(
            "derivative order must be 1 or 2, got {n}"
        )));
    }
    dispersion_quad_n(dist, point, n)
}

/// Plain Cauchy integral (no continuation term), exposed for the sheet
/// consistency check dispersion(second) − integral = 2π g(−iλ).
pub fn dispersion_integral(dist: &AnalyticDistribution, lambda: Complex64) -> Result<Complex64> {
    cauchy_integral(dist, lambda, 0)
}

/// The continued dispersion D̂, chosen by the sign of Re λ.
fn continued_dispersion(
    dist: &AnalyticDistribution,
    lambda: Complex64,
    n: u32,
) -> Result<Complex64> {
    dispersion_n(dist, lambda_to_point(lambda), n)
}

fn lambda_to_point(lambda: Complex64) -> SpectralPoint {
    if lambda.re >= 0.0 {
        SpectralPoint::principal(lambda)
    } else {
        SpectralPoint::second(lambda)
    }
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

fn newton<F>(mut f: F, seed: Complex64, max_iter: usize) -> Option<Complex64>
where
    F: FnMut(Complex64) -> Result<(Complex64, Complex64)>,
{
    let mut z = seed;
    for _ in 0..max_iter {
        let (val, deriv) = f(z).ok()?;
        if !val.is_finite() || !deriv.is_finite() {
            return None;
        }
        if deriv.norm() < 1e-300 {
            return None;
        }
        let step = val / deriv;
        z -= step;
        if !z.is_finite() || z.norm() > 1e9 {
            return None;
        }
        if step.norm() < 1e-13 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    Some(z)
}

/// Residual of the eigenvalue equation Dⱼ(λ) = 1/(i j K fⱼ), with D₁ = D
/// and D₂(λ) = D(λ/2)/2, target 2/K for j = 1 and 1/(Kh) for j = 2.
fn harmonic_residual(
    dist: &AnalyticDistribution,
    k: f64,
    harmonic: u8,
    h: f64,
    lambda: Complex64,
) -> Result<Complex64> {
    match harmonic {
        1 => Ok(continued_dispersion(dist, lambda, 0)? - 2.0 / k),
        2 => Ok(continued_dispersion(dist, lambda / 2.0, 0)? / 2.0 - 1.0 / (k * h)),
        _ => Err(CoreError::InvalidInput(format!(
            "harmonic must be 1 or 2, got {harmonic}"
        ))),
    }
}

/// The same equation in reciprocal form, 1/Dⱼ(λ) − i j K fⱼ = 0.
///
/// Newton on D − 2/K diverges from distant seeds (D decays like 1/λ, so the
/// steps grow quadratically); the reciprocal turns the poles of the
/// continued dispersion into regular points and is asymptotically linear.
fn harmonic_reciprocal(
    dist: &AnalyticDistribution,
    k: f64,
    harmonic: u8,
    h: f64,
    lambda: Complex64,
) -> Result<(Complex64, Complex64)> {
    match harmonic {
        1 => {
            let d0 = continued_dispersion(dist, lambda, 0)?;
            let d1 = continued_dispersion(dist, lambda, 1)?;
            Ok((1.0 / d0 - k / 2.0, -d1 / (d0 * d0)))
        }
        2 => {
            let half = lambda / 2.0;
            let d0 = continued_dispersion(dist, half, 0)?;
            let d1 = continued_dispersion(dist, half, 1)?;
            Ok((2.0 / d0 - k * h, -d1 / (d0 * d0)))
        }
        _ => Err(CoreError::InvalidInput(format!(
            "harmonic must be 1 or 2, got {harmonic}"
        ))),
    }
}

/// All eigenvalues of T₁ (harmonic 1) or T₂ (harmonic 2) with Re λ > 0.
///
/// Roots are found by Newton iteration from a seed rectangle
/// 0 < Re λ ≤ 10 K, |Im λ| ≤ 6·(frequency scale) with 20 × 40 seeds; each
/// returned root has residual below [`RESIDUAL_TOL`]. Axis roots are
/// excluded from `eigenvalues` and reported in `boundary`. A root where
/// |D'| < [`MULTIPLICITY_TOL`] is polished onto the critical point and
/// reported once with multiplicity 2.
pub fn find_eigenvalues(
    dist: &AnalyticDistribution,
    k: f64,
    harmonic: u8,
    h: f64,
) -> Result<EigenvalueSearch> {
    if !(k > 0.0) {
        return Err(CoreError::InvalidInput("K must be positive".into()));
    }
    if harmonic == 2 && h == 0.0 {
        return Err(CoreError::InvalidInput(
            "harmonic 2 requires h ≠ 0 (f₂ vanishes otherwise)".into(),
        ));
    }
    if harmonic != 1 && harmonic != 2 {
        return Err(CoreError::InvalidInput(format!(
            "harmonic must be 1 or 2, got {harmonic}"
        )));
    }

    let im_bound = 6.0 * dist.frequency_scale() * harmonic as f64;
    // Re seeds log-spaced over (0, 10K]: roots about to be absorbed into the
    // continuous spectrum sit arbitrarily close to the axis.
    let re_min = 1e-3 * (1.0 + k);
    let re_max = 10.0 * k;
    let mut raw: Vec<Complex64> = Vec::new();
    for i in 0..20 {
        let re = re_min * (re_max / re_min).powf((i as f64 + 0.5) / 20.0);
        for jj in 0..40 {
            let im = -im_bound + 2.0 * im_bound * (jj as f64 + 0.5) / 40.0;
            let seed = Complex64::new(re, im);
            let Some(root) = newton(
                |z| harmonic_reciprocal(dist, k, harmonic, h, z),
                seed,
                60,
            ) else {
                continue;
            };
            let Ok(val) = harmonic_residual(dist, k, harmonic, h, root) else {
                continue;
            };
            if val.norm() < RESIDUAL_TOL && root.re > -DEDUP_TOL {
                raw.push(root);
            }
        }
    }

    raw.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    let mut merged: Vec<Complex64> = Vec::new();
    for root in raw {
        if !merged.iter().any(|m| (m - root).norm() < DEDUP_TOL) {
            merged.push(root);
        }
    }

    // Double roots: polish onto the critical point of the equation and merge
    // the nearby Newton limits.
    let mut polished: Vec<(Complex64, u32)> = Vec::new();
    for root in merged {
        let deriv =
            continued_dispersion(dist, scale_for(harmonic, root), 1)? / harmonic as f64;
        if deriv.norm() < MULTIPLICITY_TOL {
            let critical = newton(
                |z| {
                    let d1 = continued_dispersion(dist, scale_for(harmonic, z), 1)?;
                    let d2 = continued_dispersion(dist, scale_for(harmonic, z), 2)?;
                    let s = 1.0 / harmonic as f64;
                    Ok((d1 * s, d2 * s * s))
                },
                root,
                40,
            )
            .unwrap_or(root);
            let target = if (critical - root).norm() < 1e-3 {
                critical
            } else {
                root
            };
            if let Some(entry) = polished
                .iter_mut()
                .find(|(z, _)| (*z - target).norm() < 1e-4)
            {
                entry.0 = target;
                entry.1 = 2;
            } else {
                polished.push((target, 2));
            }
        } else if !polished
            .iter()
            .any(|(z, m)| *m == 2 && (*z - root).norm() < 1e-4)
        {
            polished.push((root, 1));
        }
    }

    let mut search = EigenvalueSearch::default();
    for (root, multiplicity) in polished {
        let val = harmonic_residual(dist, k, harmonic, h, root)?;
        let entry = SpectralRoot {
            point: SpectralPoint::principal(Complex64::new(root.re.max(0.0), root.im)),
            residual: val.norm(),
            multiplicity,
        };
        if root.re > BOUNDARY_TOL {
            search.eigenvalues.push(entry);
        } else if root.re.abs() <= BOUNDARY_TOL {
            search.boundary.push(entry);
        }
    }
    Ok(search)
}

fn scale_for(harmonic: u8, z: Complex64) -> Complex64 {
    if harmonic == 2 {
        z / 2.0
    } else {
        z
    }
}

/// Roots of 2/K = D(λ) + 2π g(−iλ) inside `region` on the second sheet.
pub fn find_generalized_eigenvalues(
    dist: &AnalyticDistribution,
    k: f64,
    region: Region,
) -> Result<Vec<SpectralRoot>> {
    if !(k > 0.0) {
        return Err(CoreError::InvalidInput("K must be positive".into()));
    }
    if region.re_min > region.re_max || region.im_min > region.im_max {
        return Err(CoreError::InvalidInput("empty search region".into()));
    }
    if region.re_max > BOUNDARY_TOL {
        return Err(CoreError::InvalidInput(
            "generalized eigenvalue region must satisfy Re λ ≤ 0".into(),
        ));
    }
    if region.re_min < -dist.continuation_limit() {
        return Err(CoreError::InvalidInput(format!(
            "region exceeds the continuation strip (δ = {})",
            dist.continuation_limit()
        )));
    }

    let reciprocal = |z: Complex64| harmonic_reciprocal(dist, k, 1, 0.0, z);
    let residual = |z: Complex64| harmonic_residual(dist, k, 1, 0.0, z);

    let mut roots: Vec<Complex64> = Vec::new();
    let n_re = 12;
    let n_im = 24;
    for i in 0..n_re {
        let re = region.re_min
            + (region.re_max - region.re_min) * (i as f64 + 0.5) / n_re as f64;
        for j in 0..n_im {
            let im = region.im_min
                + (region.im_max - region.im_min) * (j as f64 + 0.5) / n_im as f64;
            let Some(root) = newton(reciprocal, Complex64::new(re, im), 60) else {
                continue;
            };
            let Ok(val) = residual(root) else {
                continue;
            };
            if val.norm() < RESIDUAL_TOL
                && root.re <= BOUNDARY_TOL
                && region.contains(root, 1e-9)
                && !roots.iter().any(|m| (m - root).norm() < DEDUP_TOL)
            {
                roots.push(root);
            }
        }
    }
    roots.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
    roots
        .into_iter()
        .map(|root| {
            let val = residual(root)?;
            Ok(SpectralRoot {
                point: SpectralPoint::second(Complex64::new(root.re.min(0.0), root.im)),
                residual: val.norm(),
                multiplicity: 1,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Branch continuation
// ---------------------------------------------------------------------------

/// Continue a root of the dispersion equation from `k_start` to `k_end`.
///
/// Predictor-corrector in K: the predictor uses dλ/dK = −2/(K² D̂'(λ)), the
/// corrector is Newton on the continued equation. Crossings of the axis are
/// refined in K until |Re λ| < [`CROSSING_TOL`] and inserted as samples, so
/// the sheet tag changes exactly there.
pub fn track_branch(
    dist: &AnalyticDistribution,
    k_start: f64,
    k_end: f64,
    seed: SpectralPoint,
    steps: usize,
) -> Result<EigenvalueBranch> {
    if !(k_start > 0.0) || !(k_end > 0.0) {
        return Err(CoreError::InvalidInput("K range must be positive".into()));
    }
    let equation = |k: f64, z: Complex64| -> Result<(Complex64, Complex64)> {
        let val = continued_dispersion(dist, z, 0)? - 2.0 / k;
        let deriv = continued_dispersion(dist, z, 1)?;
        Ok((val, deriv))
    };
    let correct = |k: f64, guess: Complex64| -> Option<Complex64> {
        newton(|z| harmonic_reciprocal(dist, k, 1, 0.0, z), guess, 40)
    };

    let (seed_val, _) = equation(k_start, seed.lambda)?;
    if seed_val.norm() > 1e-8 {
        return Err(CoreError::InvalidInput(format!(
            "seed residual {:.3e} exceeds 1e-8 at K = {k_start}",
            seed_val.norm()
        )));
    }

    let mut samples = vec![BranchSample {
        k: k_start,
        point: SpectralPoint::from_sign(seed.lambda),
        residual: seed_val.norm(),
    }];
    if k_start == k_end || steps == 0 {
        return Ok(EigenvalueBranch {
            harmonic: 1,
            samples,
        });
    }

    let full_step = (k_end - k_start) / steps as f64;
    let min_step = full_step.abs() / 64.0;
    let mut k = k_start;
    let mut lambda = seed.lambda;

    while (k_end - k) * full_step.signum() > 1e-12 {
        let mut dk = if full_step > 0.0 {
            full_step.min(k_end - k)
        } else {
            full_step.max(k_end - k)
        };

        let mut advanced = false;
        while dk.abs() >= min_step {
            let k_next = k + dk;
            let (_, deriv) = equation(k, lambda)?;
            let slope = if deriv.norm() > 1e-12 {
                -2.0 / (k * k * deriv)
            } else {
                Complex64::new(0.0, 0.0)
            };
            let predictor = lambda + slope * dk;
            // Residual scale grows like 2/K near the K→0 poles of D̂, where
            // an absolute 1e-10 would demand sub-f64 relative precision.
            let residual_scale = 1.0 + 2.0 / k_next;
            let corrected = correct(k_next, predictor)
                .filter(|z| {
                    equation(k_next, *z)
                        .map(|(v, _)| v.norm() < RESIDUAL_TOL * residual_scale)
                        .unwrap_or(false)
                })
                // Reject corrector jumps that leave the branch.
                .filter(|z| (z - lambda).norm() < 10.0 * (slope.norm() * dk.abs() + 0.1));
            match corrected {
                Some(next_lambda) => {
                    // Axis crossing: refine K until the root sits on the cut.
                    if lambda.re.signum() != next_lambda.re.signum()
                        && lambda.re.abs() > CROSSING_TOL
                        && next_lambda.re.abs() > CROSSING_TOL
                    {
                        let crossing = refine_crossing(
                            &equation,
                            &correct,
                            k,
                            lambda,
                            k_next,
                            next_lambda,
                        )?;
                        samples.push(crossing);
                    }
                    k = k_next;
                    lambda = next_lambda;
                    let (val, _) = equation(k, lambda)?;
                    samples.push(BranchSample {
                        k,
                        point: SpectralPoint::from_sign(lambda),
                        residual: val.norm(),
                    });
                    advanced = true;
                    break;
                }
                None => dk *= 0.5,
            }
        }
        if !advanced {
            return Err(CoreError::BranchLost {
                k,
                detail: format!(
                    "Newton correction failed after halving the step to {min_step:.3e}"
                ),
            });
        }
    }

    Ok(EigenvalueBranch {
        harmonic: 1,
        samples,
    })
}

fn refine_crossing<E, C>(
    equation: &E,
    correct: &C,
    mut k_lo: f64,
    mut lambda_lo: Complex64,
    mut k_hi: f64,
    mut lambda_hi: Complex64,
) -> Result<BranchSample>
where
    E: Fn(f64, Complex64) -> Result<(Complex64, Complex64)>,
    C: Fn(f64, Complex64) -> Option<Complex64>,
{
    // Bisection on K with the sign of Re λ(K).
    for _ in 0..80 {
        if lambda_lo.re.abs() < CROSSING_TOL {
            let (val, _) = equation(k_lo, lambda_lo)?;
            return Ok(BranchSample {
                k: k_lo,
                point: SpectralPoint::from_sign(lambda_lo),
                residual: val.norm(),
            });
        }
        if lambda_hi.re.abs() < CROSSING_TOL {
            let (val, _) = equation(k_hi, lambda_hi)?;
            return Ok(BranchSample {
                k: k_hi,
                point: SpectralPoint::from_sign(lambda_hi),
                residual: val.norm(),
            });
        }
        let k_mid = 0.5 * (k_lo + k_hi);
        let guess = 0.5 * (lambda_lo + lambda_hi);
        let root = correct(k_mid, guess).ok_or_else(|| CoreError::BranchLost {
            k: k_mid,
            detail: "crossing refinement lost the root".into(),
        })?;
        if root.re.signum() == lambda_lo.re.signum() {
            k_lo = k_mid;
            lambda_lo = root;
        } else {
            k_hi = k_mid;
            lambda_hi = root;
        }
    }
    let (val, _) = equation(k_hi, lambda_hi)?;
    Ok(BranchSample {
        k: k_hi,
        point: SpectralPoint::from_sign(lambda_hi),
        residual: val.norm(),
    })
}

// ---------------------------------------------------------------------------
// Transition point and hypotheses
// ---------------------------------------------------------------------------

/// Locate the transition point: candidates (y_j, K_j = 2/(π g(y_j))) over
/// the Hilbert-transform zeros, y_c the density-maximizing zero, K_c the
/// infimum of the K_j, and dλ_c/dK = −2/(K_c² D'(iy_c)).
pub fn transition_point(dist: &AnalyticDistribution) -> Result<TransitionReport> {
    let bound = 3.0 * dist.frequency_scale();
    let zeros = dist.find_hilbert_zeros((-bound, bound), 1e-10)?;
    if zeros.is_empty() {
        return Err(CoreError::InvalidInput(
            "no Hilbert-transform zeros found; no transition candidates".into(),
        ));
    }

    let candidates: Vec<TransitionCandidate> = zeros
        .iter()
        .map(|&y| TransitionCandidate {
            y,
            k: 2.0 / (PI * dist.eval_density(y)),
        })
        .collect();

    let g_max = candidates
        .iter()
        .map(|c| dist.eval_density(c.y))
        .fold(f64::NEG_INFINITY, f64::max);
    let maximizers: Vec<&TransitionCandidate> = candidates
        .iter()
        .filter(|c| dist.eval_density(c.y) >= g_max * (1.0 - 1e-9))
        .collect();

    // Two distinct |y| at the same maximal density cannot be ordered.
    let mut distinct_abs: Vec<f64> = maximizers.iter().map(|c| c.y.abs()).collect();
    distinct_abs.sort_by(f64::total_cmp);
    distinct_abs.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    if distinct_abs.len() > 1 {
        return Err(CoreError::DegenerateTie(format!(
            "|y| candidates {distinct_abs:?} attain the maximal density"
        )));
    }

    let y_c = distinct_abs[0];
    let k_c = 2.0 / (PI * g_max);
    let d1 = dispersion_derivative(dist, axis_point(y_c), 1)?;
    let dlambda_dk = -2.0 / (k_c * k_c * d1);

    Ok(TransitionReport {
        candidates,
        y_c,
        k_c,
        k_c2: None,
        dlambda_dk,
        assumptions: None,
    })
}

fn axis_point(y: f64) -> SpectralPoint {
    SpectralPoint::principal(Complex64::new(0.0, y))
}

/// Check hypotheses (A1)-(A5) and fill the flags of the transition report.
///
/// (A1) compares K_c against the second-harmonic threshold
/// K_c⁽²⁾ = inf_j 2/(π h g(y_j)); for h ≤ 0 the harmonic-2 operator has no
/// eigenvalues and the condition holds vacuously. (A3) requires exactly the
/// two nonzero maximizers ±y_c with D'(iy_c) ≠ 0, (A4) the transversality
/// Re dλ/dK > 0, (A2) and (A5) the strip bound and evenness spot-checks.
pub fn verify_assumptions(dist: &AnalyticDistribution, h: f64) -> Result<TransitionReport> {
    let mut report = transition_point(dist)?;

    let a1 = if h >= 1.0 {
        AssumptionCheck {
            ok: false,
            detail: format!("h = {h} violates h < 1"),
        }
    } else if h <= 0.0 {
        AssumptionCheck {
            ok: true,
            detail: "h ≤ 0: T₂ has no eigenvalues, condition vacuous".into(),
        }
    } else {
        let k_c2 = report
            .candidates
            .iter()
            .map(|c| 2.0 / (PI * h * dist.eval_density(c.y)))
            .fold(f64::INFINITY, f64::min);
        report.k_c2 = Some(k_c2);
        AssumptionCheck {
            ok: report.k_c < k_c2,
            detail: format!("K_c = {:.6} vs K_c⁽²⁾ = {k_c2:.6}", report.k_c),
        }
    };

    let ratio = dist.strip_bound_ratio(dist.strip_width())?;
    let a2 = AssumptionCheck {
        ok: ratio <= 1.0,
        detail: format!(
            "worst |g(z)|(1+|z|²)/C = {ratio:.3} on S({})",
            dist.strip_width()
        ),
    };

    let g_max = report
        .candidates
        .iter()
        .map(|c| dist.eval_density(c.y))
        .fold(f64::NEG_INFINITY, f64::max);
    let maximizers: Vec<f64> = report
        .candidates
        .iter()
        .filter(|c| dist.eval_density(c.y) >= g_max * (1.0 - 1e-9))
        .map(|c| c.y)
        .collect();
    let nonzero_pair = maximizers.len() == 2
        && report.y_c > 1e-9
        && maximizers.iter().any(|&y| (y - report.y_c).abs() < 1e-6)
        && maximizers.iter().any(|&y| (y + report.y_c).abs() < 1e-6);
    let d1 = dispersion_derivative(dist, axis_point(report.y_c), 1)?;
    let simple = d1.norm() > 1e-9;
    let a3 = AssumptionCheck {
        ok: nonzero_pair && simple,
        detail: format!(
            "maximizers {maximizers:?}, |D'(iy_c)| = {:.3e}",
            d1.norm()
        ),
    };

    let a4 = AssumptionCheck {
        ok: report.dlambda_dk.re > 0.0,
        detail: format!("Re dλ/dK = {:.6}", report.dlambda_dk.re),
    };

    let scale = dist.frequency_scale();
    let mut worst_odd: f64 = 0.0;
    for i in 0..=100 {
        let w = 4.0 * scale * i as f64 / 100.0;
        worst_odd = worst_odd.max((dist.eval_density(w) - dist.eval_density(-w)).abs());
    }
    let a5 = AssumptionCheck {
        ok: dist.is_even() && worst_odd < 1e-12,
        detail: format!("max |g(ω) − g(−ω)| = {worst_odd:.3e}"),
    };

    report.assumptions = Some(AssumptionReport { a1, a2, a3, a4, a5 });
    Ok(report)
}

// ---------------------------------------------------------------------------
// Pairings
// ---------------------------------------------------------------------------

/// ⟨μ₊ᵐ μ₋ⁿ P₀ | P₀⟩ for m, n ≤ 3 with m + n ≤ 3.
///
/// Evaluated as the right-limit of the defining integral: partial fractions
/// reduce every pairing to D, D' and D'' at ±iy_c, which are computed from
/// the axis boundary formulas (densities and Hilbert transforms), not from
/// the closed dispersion form.
pub fn pairing(
    dist: &AnalyticDistribution,
    report: &TransitionReport,
    m: u32,
    n: u32,
) -> Result<PairingValue> {
    if m > 3 || n > 3 || m + n > 3 {
        return Err(CoreError::InvalidInput(format!(
            "pairing orders limited to m, n ≤ 3 with m + n ≤ 3, got ({m}, {n})"
        )));
    }
    let y_c = report.y_c;
    let d = |sign: f64, order: u32| -> Result<Complex64> {
        dispersion_quad_n(dist, axis_point(sign * y_c), order)
    };

    let value = match (m, n) {
        (0, 0) => Complex64::new(dist.normalization()?, 0.0),
        (1, 0) => d(1.0, 0)?,
        (0, 1) => d(-1.0, 0)?,
        (2, 0) => -d(1.0, 1)?,
        (0, 2) => -d(-1.0, 1)?,
        (3, 0) => d(1.0, 2)? / 2.0,
        (0, 3) => d(-1.0, 2)? / 2.0,
        (1, 1) => {
            let two_iy = Complex64::new(0.0, 2.0 * y_c);
            (d(-1.0, 0)? - d(1.0, 0)?) / two_iy
        }
        (2, 1) => {
            let two_iy = Complex64::new(0.0, 2.0 * y_c);
            d(1.0, 1)? / two_iy + (d(1.0, 0)? - d(-1.0, 0)?) / (4.0 * y_c * y_c)
        }
        (1, 2) => {
            let two_iy = Complex64::new(0.0, 2.0 * y_c);
            -d(-1.0, 1)? / two_iy + (d(-1.0, 0)? - d(1.0, 0)?) / (4.0 * y_c * y_c)
        }
        _ => unreachable!(),
    };
    Ok(PairingValue { m, n, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use rand::SeedableRng;

    fn reference() -> AnalyticDistribution {
        AnalyticDistribution::bimodal_lorentzian(2.0).unwrap()
    }

    fn sqrt3() -> f64 {
        3.0f64.sqrt()
    }

    /// Roots of 2(λ+1)² − K(λ+1) + 2ω₀² = 0, the closed-form eigenvalues.
    fn quadratic_roots(omega0: f64, k: f64) -> (Complex64, Complex64) {
        let disc = Complex64::new(k * k - 16.0 * omega0 * omega0, 0.0).sqrt();
        let u1 = (k + disc) / 4.0;
        let u2 = (k - disc) / 4.0;
        (u1 - 1.0, u2 - 1.0)
    }

    #[test]
    fn dispersion_closed_form_values() {
        let dist = reference();
        let at_one = dispersion(&dist, SpectralPoint::principal(Complex64::new(1.0, 0.0)))
            .unwrap();
        assert_relative_eq!(at_one.re, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(at_one.im, 0.0, epsilon = 1e-14);

        let on_axis = dispersion(&dist, axis_point(sqrt3())).unwrap();
        assert_relative_eq!(on_axis.re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(on_axis.im, 0.0, epsilon = 1e-12);

        let err = dispersion(
            &dist,
            SpectralPoint::second(Complex64::new(-1.0, 2.0)),
        )
        .unwrap_err();
        assert!(matches!(err, CoreError::PoleProximity { .. }));
    }

    #[test]
    fn dispersion_axis_formula_matches_closed_form() {
        let dist = reference();
        for y in [0.0, 0.7, sqrt3(), 2.4, -1.3] {
            let closed = dispersion(&dist, axis_point(y)).unwrap();
            let boundary = dispersion_quadrature(&dist, axis_point(y)).unwrap();
            assert!(
                (closed - boundary).norm() < 1e-8,
                "axis mismatch at y = {y}: {closed} vs {boundary}"
            );
        }
    }

    #[test]
    fn dispersion_quadrature_matches_closed_form_off_axis() {
        let dist = reference();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut max_err: f64 = 0.0;
        for _ in 0..100 {
            let lambda = Complex64::new(rng.gen_range(0.05..5.0), rng.gen_range(-5.0..5.0));
            let point = SpectralPoint::principal(lambda);
            let closed = dispersion(&dist, point).unwrap();
            let quadr = dispersion_quadrature(&dist, point).unwrap();
            max_err = max_err.max((closed - quadr).norm());
        }
        assert!(max_err < 1e-8, "max quadrature error {max_err:.3e}");
    }

    #[test]
    fn derivative_matches_hand_value_and_finite_difference() {
        let dist = reference();
        let iy = axis_point(sqrt3());
        let d1 = dispersion_derivative(&dist, iy, 1).unwrap();
        // D'(iy_c) = −iy_c/(2(1+iy_c)) = −(3+i√3)/8 for ω₀ = 2.
        let exact = -Complex64::new(3.0, sqrt3()) / 8.0;
        assert!((d1 - exact).norm() < 1e-12);

        // Central finite difference of D along the real direction.
        let step = 1e-5;
        let plus = dispersion(
            &dist,
            SpectralPoint::principal(Complex64::new(step, sqrt3())),
        )
        .unwrap();
        let minus = dispersion(
            &dist,
            SpectralPoint::second(Complex64::new(-step, sqrt3())),
        )
        .unwrap();
        let fd = (plus - minus) / (2.0 * step);
        assert!((fd - d1).norm() < 1e-7, "fd {fd} vs analytic {d1}");

        // Conjugate pair at −iy_c.
        let d1_minus = dispersion_derivative(&dist, axis_point(-sqrt3()), 1).unwrap();
        assert!((d1_minus - d1.conj()).norm() < 1e-12);
    }

    #[test]
    fn second_derivative_closed_value() {
        let dist = reference();
        let d2 = dispersion_derivative(&dist, axis_point(sqrt3()), 2).unwrap();
        let exact = Complex64::new(5.0, 3.0 * sqrt3()) / 8.0;
        assert!((d2 - exact).norm() < 1e-12);
    }

    #[test]
    fn axis_derivatives_via_quadrature_match_closed_form() {
        let dist = reference();
        for n in [1, 2] {
            for sign in [1.0, -1.0] {
                let point = axis_point(sign * sqrt3());
                let quadr = dispersion_derivative_quadrature(&dist, point, n).unwrap();
                let closed = dispersion_derivative(&dist, point, n).unwrap();
                assert!(
                    (quadr - closed).norm() < 1e-8,
                    "n = {n}, sign = {sign}: {quadr} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn sheet_consistency_second_minus_integral_is_continuation_term() {
        let dist = reference();
        for lambda in [Complex64::new(-0.2, 1.5), Complex64::new(-0.4, -0.8)] {
            let second = dispersion(&dist, SpectralPoint::second(lambda)).unwrap();
            let integral = dispersion_integral(&dist, lambda).unwrap();
            let g = dist
                .eval_density_complex(-Complex64::i() * lambda)
                .unwrap();
            assert!(
                (second - integral - 2.0 * PI * g).norm() < 1e-9,
                "sheet consistency failed at {lambda}"
            );
        }
    }

    #[test]
    fn no_eigenvalues_below_onset() {
        let dist = reference();
        let search = find_eigenvalues(&dist, 3.9, 1, 0.0).unwrap();
        assert!(search.eigenvalues.is_empty());
        // Lemma 3.2(iii): far below onset nothing is found either.
        let low = find_eigenvalues(&dist, 0.3, 1, 0.0).unwrap();
        assert!(low.eigenvalues.is_empty());
    }

    #[test]
    fn double_root_at_collision_coupling() {
        let dist = reference();
        let search = find_eigenvalues(&dist, 8.0, 1, 0.0).unwrap();
        let total: u32 = search.eigenvalues.iter().map(|r| r.multiplicity).sum();
        assert_eq!(total, 2, "expected algebraic multiplicity 2: {search:?}");
        for root in &search.eigenvalues {
            assert!((root.point.lambda - Complex64::new(1.0, 0.0)).norm() < 1e-6);
            assert!(root.residual < RESIDUAL_TOL);
        }
    }

    #[test]
    fn boundary_root_is_flagged_not_returned() {
        let dist = reference();
        let search = find_eigenvalues(&dist, 10.0, 1, 0.0).unwrap();
        assert_eq!(search.eigenvalues.len(), 1);
        assert!(
            (search.eigenvalues[0].point.lambda - Complex64::new(3.0, 0.0)).norm() < 1e-8
        );
        assert_eq!(search.boundary.len(), 1);
        assert!(search.boundary[0].point.lambda.norm() < 1e-6);
    }

    #[test]
    fn eigenvalue_lists_are_conjugate_closed() {
        let dist = reference();
        for k in [4.5, 5.5, 7.0] {
            let search = find_eigenvalues(&dist, k, 1, 0.0).unwrap();
            for root in &search.eigenvalues {
                let conj = root.point.lambda.conj();
                assert!(
                    search
                        .eigenvalues
                        .iter()
                        .any(|r| (r.point.lambda - conj).norm() < 1e-9),
                    "conjugate of {} missing at K = {k}",
                    root.point.lambda
                );
            }
            // Cross-check against the closed-form quadratic.
            let (r1, r2) = quadratic_roots(2.0, k);
            for expected in [r1, r2] {
                assert!(
                    search
                        .eigenvalues
                        .iter()
                        .any(|r| (r.point.lambda - expected).norm() < 1e-8),
                    "root {expected} missing at K = {k}"
                );
            }
        }
    }

    #[test]
    fn second_harmonic_eigenvalues_follow_rescaled_dispersion() {
        let dist = reference();
        // D(λ/2)/2 = 1/(Kh): at h = 0.5 the harmonic-2 threshold is
        // K_c⁽²⁾ = K_c/h = 8; at K = 9 > 8 eigenvalues exist.
        let search = find_eigenvalues(&dist, 9.0, 2, 0.5).unwrap();
        assert!(!search.eigenvalues.is_empty());
        for root in &search.eigenvalues {
            let half = root.point.lambda / 2.0;
            let d = dispersion(&dist, SpectralPoint::principal(half)).unwrap();
            assert!((d / 2.0 - 1.0 / (9.0 * 0.5)).norm() < 1e-9);
        }
        // Below the harmonic-2 threshold: none.
        let below = find_eigenvalues(&dist, 7.0, 2, 0.5).unwrap();
        assert!(below.eigenvalues.is_empty());
        // h = 0 is rejected.
        assert!(find_eigenvalues(&dist, 9.0, 2, 0.0).is_err());
    }

    #[test]
    fn generalized_eigenvalues_below_onset() {
        let dist = reference();
        let region = Region::new(-0.5, 0.0, -3.0, 3.0);
        let roots = find_generalized_eigenvalues(&dist, 3.5, region).unwrap();
        assert_eq!(roots.len(), 2);
        let expected_im = (3.5f64 * 3.5 - 64.0).abs().sqrt() / 4.0;
        for root in &roots {
            assert_eq!(root.point.sheet, Sheet::Second);
            assert!(root.residual < RESIDUAL_TOL);
            assert_abs_diff_eq!(root.point.lambda.re, -0.125, epsilon = 1e-9);
            assert_abs_diff_eq!(root.point.lambda.im.abs(), expected_im, epsilon = 1e-9);
        }
    }

    #[test]
    fn generalized_eigenvalues_on_axis_at_onset() {
        let dist = reference();
        let region = Region::new(-0.5, 0.0, -3.0, 3.0);
        let roots = find_generalized_eigenvalues(&dist, 4.0, region).unwrap();
        assert_eq!(roots.len(), 2);
        for root in &roots {
            assert!(root.point.lambda.re.abs() < 1e-8);
            assert_abs_diff_eq!(root.point.lambda.im.abs(), sqrt3(), epsilon = 1e-8);
        }
    }

    #[test]
    fn branch_crosses_axis_at_onset() {
        let dist = reference();
        // Seed: exact closed-form root at K = 0.1 near −1 + 2i.
        let (r1, _) = quadratic_roots(2.0, 0.1);
        let seed = SpectralPoint::second(r1);
        let branch = track_branch(&dist, 0.1, 6.0, seed, 240).unwrap();
        let crossings = branch.crossings();
        assert_eq!(crossings.len(), 1);
        assert_abs_diff_eq!(crossings[0], 4.0, epsilon = 1e-3);

        // The crossing sample sits on the axis at ±i√3.
        let cross_sample = branch
            .samples
            .iter()
            .find(|s| s.point.lambda.re.abs() < CROSSING_TOL)
            .expect("crossing sample present");
        assert_abs_diff_eq!(cross_sample.point.lambda.im.abs(), sqrt3(), epsilon = 1e-3);

        // Branch invariants: residuals and continuity.
        for pair in branch.samples.windows(2) {
            assert!(pair[0].residual < 1e-9);
            assert!((pair[1].point.lambda - pair[0].point.lambda).norm() < 0.3);
            if pair[0].point.sheet != pair[1].point.sheet {
                assert!(
                    pair[0].point.lambda.re.abs() < CROSSING_TOL
                        || pair[1].point.lambda.re.abs() < CROSSING_TOL
                );
            }
        }
    }

    #[test]
    fn branch_reenters_second_sheet_when_root_leaves_axis() {
        let dist = reference();
        // The smaller real eigenvalue at K = 8.5.
        let (_, r2) = quadratic_roots(2.0, 8.5);
        let seed = SpectralPoint::principal(r2);
        let branch = track_branch(&dist, 8.5, 10.5, seed, 200).unwrap();
        let crossings = branch.crossings();
        assert_eq!(crossings.len(), 1);
        assert_abs_diff_eq!(crossings[0], 10.0, epsilon = 1e-3);
        let last = branch.samples.last().unwrap();
        assert_eq!(last.point.sheet, Sheet::Second);
        assert!(last.point.lambda.re < 0.0);
    }

    #[test]
    fn branch_tracking_through_collision_is_reported_lost() {
        let dist = reference();
        let (r1, _) = quadratic_roots(2.0, 6.0);
        let seed = SpectralPoint::principal(r1);
        // The conjugate pair collides on the real axis at K = 4ω₀ = 8 where
        // the branch loses its identity; tracking across must fail loudly.
        let result = track_branch(&dist, 6.0, 10.5, seed, 200);
        match result {
            Err(CoreError::BranchLost { k, .. }) => {
                assert!((k - 8.0).abs() < 0.2, "lost at K = {k}");
            }
            Ok(branch) => {
                // If continuation survived the collision it must still be on
                // a valid root; verify the residuals to keep it honest.
                for s in &branch.samples {
                    assert!(s.residual < 1e-9);
                }
            }
            Err(other) => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn degenerate_interval_returns_seed() {
        let dist = reference();
        let (r1, _) = quadratic_roots(2.0, 5.0);
        let branch =
            track_branch(&dist, 5.0, 5.0, SpectralPoint::principal(r1), 50).unwrap();
        assert_eq!(branch.samples.len(), 1);
        assert!((branch.samples[0].point.lambda - r1).norm() < 1e-12);
    }

    #[test]
    fn transition_point_of_reference_family() {
        let dist = reference();
        let report = transition_point(&dist).unwrap();
        assert_abs_diff_eq!(report.y_c, sqrt3(), epsilon = 1e-7);
        assert_abs_diff_eq!(report.k_c, 4.0, epsilon = 1e-7);
        assert_eq!(report.candidates.len(), 3);
        for c in &report.candidates {
            assert_relative_eq!(
                c.k,
                2.0 / (PI * dist.eval_density(c.y)),
                epsilon = 1e-12
            );
        }
        // K_c is the infimum over candidates.
        let k_min = report.candidates.iter().map(|c| c.k).fold(f64::INFINITY, f64::min);
        assert_relative_eq!(report.k_c, k_min, epsilon = 1e-9);

        // dλ/dK = 1/4 − i/(4√3).
        assert_abs_diff_eq!(report.dlambda_dk.re, 0.25, epsilon = 1e-7);
        assert_abs_diff_eq!(
            report.dlambda_dk.im,
            -1.0 / (4.0 * sqrt3()),
            epsilon = 1e-7
        );
    }

    #[test]
    fn transition_formulas_hold_for_other_peak_offsets() {
        let dist = AnalyticDistribution::bimodal_lorentzian(1.05).unwrap();
        let report = transition_point(&dist).unwrap();
        assert_abs_diff_eq!(report.y_c, (1.05f64 * 1.05 - 1.0).sqrt(), epsilon = 1e-6);
        assert_abs_diff_eq!(report.k_c, 4.0, epsilon = 1e-6);
    }

    #[test]
    fn assumptions_hold_for_reference_family() {
        let dist = reference();
        let report = verify_assumptions(&dist, 0.0).unwrap();
        let flags = report.assumptions.as_ref().unwrap();
        assert!(flags.all_ok(), "{flags:?}");
        assert!(report.k_c2.is_none());
    }

    #[test]
    fn a3_fails_for_unimodal_regime() {
        let dist = AnalyticDistribution::bimodal_lorentzian(0.9).unwrap();
        let report = verify_assumptions(&dist, 0.0).unwrap();
        let flags = report.assumptions.as_ref().unwrap();
        assert!(!flags.a3.ok, "{:?}", flags.a3);
    }

    #[test]
    fn a1_fails_for_strong_second_harmonic() {
        let dist = reference();
        let report = verify_assumptions(&dist, 1.5).unwrap();
        let flags = report.assumptions.as_ref().unwrap();
        assert!(!flags.a1.ok);
    }

    #[test]
    fn a1_threshold_for_positive_h() {
        let dist = reference();
        let report = verify_assumptions(&dist, 0.5).unwrap();
        let flags = report.assumptions.as_ref().unwrap();
        // K_c⁽²⁾ = K_c/h = 8 > K_c = 4.
        assert!(flags.a1.ok);
        assert_abs_diff_eq!(report.k_c2.unwrap(), 8.0, epsilon = 1e-6);
    }

    #[test]
    fn pairing_values_match_reduction_formulas() {
        let dist = reference();
        let report = transition_point(&dist).unwrap();

        let p10 = pairing(&dist, &report, 1, 0).unwrap().value;
        assert!((p10 - Complex64::new(0.5, 0.0)).norm() < 1e-8);

        let p11 = pairing(&dist, &report, 1, 1).unwrap().value;
        assert!(p11.norm() < 1e-8);

        let d1 = -Complex64::new(3.0, sqrt3()) / 8.0;
        let p20 = pairing(&dist, &report, 2, 0).unwrap().value;
        assert!((p20 + d1).norm() < 1e-8, "⟨μ₊²⟩ = {p20}, −D' = {}", -d1);

        // ⟨μ₊²μ₋⟩ = D'(iy_c)/(2iy_c) = −(1 − i√3)/16.
        let p21 = pairing(&dist, &report, 2, 1).unwrap().value;
        let expected = -(Complex64::new(1.0, -sqrt3())) / 16.0;
        assert!((p21 - expected).norm() < 1e-8);

        // ⟨μ₊³⟩ = D''(iy_c)/2.
        let p30 = pairing(&dist, &report, 3, 0).unwrap().value;
        let d2 = Complex64::new(5.0, 3.0 * sqrt3()) / 8.0;
        assert!((p30 - d2 / 2.0).norm() < 1e-8);

        // Normalization pairing.
        let p00 = pairing(&dist, &report, 0, 0).unwrap().value;
        assert!((p00 - Complex64::new(1.0, 0.0)).norm() < 1e-8);

        // Out-of-range orders are rejected.
        assert!(pairing(&dist, &report, 2, 2).is_err());
    }

    #[test]
    fn eq30_symmetries_via_quadrature() {
        let dist = reference();
        let y = sqrt3();
        let d_plus = dispersion_quadrature(&dist, axis_point(y)).unwrap();
        let d_minus = dispersion_quadrature(&dist, axis_point(-y)).unwrap();
        assert!((d_plus - d_minus).norm() < 1e-9);
        assert!((d_plus - Complex64::new(0.5, 0.0)).norm() < 1e-9);
        for n in [1, 2] {
            let plus = dispersion_derivative_quadrature(&dist, axis_point(y), n).unwrap();
            let minus = dispersion_derivative_quadrature(&dist, axis_point(-y), n).unwrap();
            assert!((plus - minus.conj()).norm() < 1e-9);
        }
    }
}
