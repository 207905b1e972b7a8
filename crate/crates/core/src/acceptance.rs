//! End-to-end verification suite.
//!
//! Fourteen criteria check the whole pipeline against the reference bimodal
//! Lorentzian with peak offset ω₀ = 2: transition point, center-manifold
//! coefficients, quadrature fidelity, eigenvalue structure, branch
//! continuation, pairings, linear decay, Hopf amplitude and scaling laws,
//! oracle and finite-N consistency, and the reduced-model dynamics. Every
//! tolerance is pinned here; the integration test target `acceptance` and
//! the CLI `verify` subcommand both run these functions.

use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;

use crate::analysis::{self, SweepSettings, SweepSimulator};
use crate::center_manifold::{self, CmTerms};
use crate::distributions::{AnalyticDistribution, SampleMode};
use crate::reduced_ode::{self, CenterState, TrajectoryData};
use crate::simulate::{self, GalerkinConfig, ModelParams};
use crate::spectral::{self, Region, Sheet, SpectralPoint};

/// Outcome of one criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:02} {} ({:.1}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn reference() -> AnalyticDistribution {
    AnalyticDistribution::bimodal_lorentzian(2.0).expect("reference distribution")
}

fn sqrt3() -> f64 {
    3.0f64.sqrt()
}

struct Check {
    parts: Vec<(bool, String)>,
}

impl Check {
    fn new() -> Self {
        Self { parts: Vec::new() }
    }

    fn require(&mut self, ok: bool, detail: impl Into<String>) {
        self.parts.push((ok, detail.into()));
    }

    fn finish(self, id: u32, name: &'static str, start: Instant) -> CriterionResult {
        let passed = self.parts.iter().all(|p| p.0);
        let detail = self
            .parts
            .iter()
            .map(|(ok, d)| format!("{}{}", if *ok { "" } else { "FAILED: " }, d))
            .collect::<Vec<_>>()
            .join("; ");
        CriterionResult {
            id,
            name,
            passed,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    fn error(id: u32, name: &'static str, start: Instant, err: impl ToString) -> CriterionResult {
        CriterionResult {
            id,
            name,
            passed: false,
            detail: format!("error: {}", err.to_string()),
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// 1. Transition point (y_c, K_c) = (√3, 4) within 1e−6.
pub fn criterion_01_transition_point() -> CriterionResult {
    let start = Instant::now();
    let name = "transition point";
    let report = match spectral::transition_point(&reference()) {
        Ok(r) => r,
        Err(e) => return Check::error(1, name, start, e),
    };
    let mut check = Check::new();
    check.require(
        (report.y_c - sqrt3()).abs() < 1e-6,
        format!("y_c = {:.9} vs √3", report.y_c),
    );
    check.require(
        (report.k_c - 4.0).abs() < 1e-6,
        format!("K_c = {:.9} vs 4", report.k_c),
    );
    check.finish(1, name, start)
}

/// 2. Center-manifold coefficients p₁..p₄ within 1e−6 of the closed forms.
pub fn criterion_02_coefficients() -> CriterionResult {
    let start = Instant::now();
    let name = "coefficients";
    let coeffs = match center_manifold::coefficients_sine(&reference()) {
        Ok(c) => c,
        Err(e) => return Check::error(2, name, start, e),
    };
    let CmTerms::Sine { p1, p2, p3, p4 } = coeffs.terms else {
        return Check::error(2, name, start, "expected sine coefficients");
    };
    let s3 = sqrt3();
    let expected = [
        ("p1", p1, Complex64::new(0.25, -1.0 / (4.0 * s3))),
        ("p2", p2, Complex64::new(-4.0, -2.0 / s3)),
        ("p3", p3, Complex64::new(1.0, 1.0 / s3)),
        ("p4", p4, Complex64::new(0.0, -4.0 / s3)),
    ];
    let mut check = Check::new();
    check.require((p1.re - 0.25).abs() < 1e-6, format!("Re p1 = {:.9}", p1.re));
    check.require((p2.re + 4.0).abs() < 1e-6, format!("Re p2 = {:.9}", p2.re));
    for (label, got, want) in expected {
        check.require(
            (got - want).norm() < 1e-6,
            format!("{label} = {got:.9} vs {want:.9}"),
        );
    }
    check.finish(2, name, start)
}

/// 3. Dispersion quadrature vs closed form: 100 random λ, error < 1e−8.
pub fn criterion_03_quadrature_fidelity() -> CriterionResult {
    let start = Instant::now();
    let name = "quadrature fidelity";
    let dist = reference();
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20161011);
    let mut max_err: f64 = 0.0;
    for _ in 0..100 {
        let lambda = Complex64::new(rng.gen_range(0.05..5.0), rng.gen_range(-5.0..5.0));
        let point = SpectralPoint::principal(lambda);
        let closed = match spectral::dispersion(&dist, point) {
            Ok(v) => v,
            Err(e) => return Check::error(3, name, start, e),
        };
        let quadr = match spectral::dispersion_quadrature(&dist, point) {
            Ok(v) => v,
            Err(e) => return Check::error(3, name, start, e),
        };
        max_err = max_err.max((closed - quadr).norm());
    }
    let mut check = Check::new();
    check.require(max_err < 1e-8, format!("max |Δ| = {max_err:.3e}"));
    check.finish(3, name, start)
}

/// 4. Eigenvalue structure at K = 3.9, 4, 8, 10.
pub fn criterion_04_eigenvalue_structure() -> CriterionResult {
    let start = Instant::now();
    let name = "eigenvalue structure";
    let dist = reference();
    let mut check = Check::new();

    match spectral::find_eigenvalues(&dist, 3.9, 1, 0.0) {
        Ok(s) => check.require(
            s.eigenvalues.is_empty(),
            format!("K=3.9: {} eigenvalues", s.eigenvalues.len()),
        ),
        Err(e) => return Check::error(4, name, start, e),
    }

    match spectral::find_generalized_eigenvalues(&dist, 4.0, Region::new(-0.5, 0.0, -3.0, 3.0)) {
        Ok(roots) => {
            let on_axis_pair = roots.len() == 2
                && roots.iter().all(|r| {
                    r.point.lambda.re.abs() < 1e-6
                        && (r.point.lambda.im.abs() - sqrt3()).abs() < 1e-6
                });
            check.require(on_axis_pair, format!("K=4: pair ±i√3, got {roots:?}"));
        }
        Err(e) => return Check::error(4, name, start, e),
    }

    match spectral::find_eigenvalues(&dist, 8.0, 1, 0.0) {
        Ok(s) => {
            let total: u32 = s.eigenvalues.iter().map(|r| r.multiplicity).sum();
            let at_one = s
                .eigenvalues
                .iter()
                .all(|r| (r.point.lambda - Complex64::new(1.0, 0.0)).norm() < 1e-6);
            check.require(
                total == 2 && at_one,
                format!("K=8: double root at 1, got {:?}", s.eigenvalues),
            );
        }
        Err(e) => return Check::error(4, name, start, e),
    }

    match spectral::find_eigenvalues(&dist, 10.0, 1, 0.0) {
        Ok(s) => {
            let at_three = s.eigenvalues.len() == 1
                && (s.eigenvalues[0].point.lambda - Complex64::new(3.0, 0.0)).norm() < 1e-6;
            let boundary_zero =
                s.boundary.len() == 1 && s.boundary[0].point.lambda.norm() < 1e-6;
            check.require(
                at_three && boundary_zero,
                format!(
                    "K=10: eigenvalue 3 + boundary 0, got {:?} / {:?}",
                    s.eigenvalues, s.boundary
                ),
            );
        }
        Err(e) => return Check::error(4, name, start, e),
    }
    check.finish(4, name, start)
}

/// 5. Branch continuation: crossing at K = 4 ± 1e−3, K→0 endpoint −1+2i.
pub fn criterion_05_branch() -> CriterionResult {
    let start = Instant::now();
    let name = "generalized-eigenvalue branch";
    let dist = reference();
    let seed_region = Region::new(-1.2, 0.0, 1.0, 3.0);
    let seeds = match spectral::find_generalized_eigenvalues(&dist, 0.1, seed_region) {
        Ok(roots) => roots,
        Err(e) => return Check::error(5, name, start, e),
    };
    let Some(seed) = seeds
        .iter()
        .find(|r| (r.point.lambda - Complex64::new(-1.0, 2.0)).norm() < 0.2)
    else {
        return Check::error(5, name, start, format!("no seed near −1+2i: {seeds:?}"));
    };

    let mut check = Check::new();
    match spectral::track_branch(&dist, 0.1, 6.0, seed.point, 300) {
        Ok(branch) => {
            let crossings = branch.crossings();
            check.require(
                crossings.len() == 1 && (crossings[0] - 4.0).abs() < 1e-3,
                format!("crossing K = {crossings:?}"),
            );
        }
        Err(e) => return Check::error(5, name, start, e),
    }
    match spectral::track_branch(&dist, 0.1, 0.002, seed.point, 120) {
        Ok(branch) => {
            let last = branch.samples.last().unwrap().point.lambda;
            let distance = (last - Complex64::new(-1.0, 2.0)).norm();
            check.require(
                distance < 1e-3,
                format!("K→0 endpoint {last:.6} vs −1+2i (|Δ| = {distance:.2e})"),
            );
            check.require(
                branch
                    .samples
                    .iter()
                    .all(|s| s.point.sheet == Sheet::Second),
                "low-K branch stays on the second sheet".to_string(),
            );
        }
        Err(e) => return Check::error(5, name, start, e),
    }
    check.finish(5, name, start)
}

/// 6. Pairing identities at ±iy_c within 1e−8.
pub fn criterion_06_pairings() -> CriterionResult {
    let start = Instant::now();
    let name = "pairing identities";
    let dist = reference();
    let report = match spectral::transition_point(&dist) {
        Ok(r) => r,
        Err(e) => return Check::error(6, name, start, e),
    };
    let value = |m, n| spectral::pairing(&dist, &report, m, n).map(|p| p.value);
    let mut check = Check::new();
    match (value(1, 1), value(1, 0), value(2, 0)) {
        (Ok(p11), Ok(p10), Ok(p20)) => {
            check.require(p11.norm() < 1e-8, format!("⟨μ₊μ₋P₀|P₀⟩ = {p11:.2e}"));
            check.require(
                (p10 - Complex64::new(0.5, 0.0)).norm() < 1e-8,
                format!("⟨μ₊P₀|P₀⟩ = {p10:.9}"),
            );
            // −D'(i√3) from the closed form, independent of the pairing path.
            let d1 = -Complex64::new(3.0, sqrt3()) / 8.0;
            check.require(
                (p20 + d1).norm() < 1e-8,
                format!("⟨μ₊²P₀|P₀⟩ = {p20:.9} vs −D' = {:.9}", -d1),
            );
        }
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
            return Check::error(6, name, start, e)
        }
    }
    check.finish(6, name, start)
}

/// 7. Linearized decay at K = 3.5: rate −0.125 ± 10%, frequency 1.798 ± 2%.
pub fn criterion_07_linear_decay() -> CriterionResult {
    let start = Instant::now();
    let name = "linear weak stability";
    let params = ModelParams { k: 3.5, h: 0.0 };
    let series = match simulate::simulate_linearized(
        params,
        &reference(),
        800,
        Complex64::new(1.0, 0.0),
        45.0,
        None,
        0,
    ) {
        Ok(s) => s,
        Err(e) => return Check::error(7, name, start, e),
    };
    let fit = match analysis::fit_decay_rate(&series, (5.0, 40.0)) {
        Ok(f) => f,
        Err(e) => return Check::error(7, name, start, e),
    };
    let expected_freq = (64.0f64 - 3.5 * 3.5).sqrt() / 4.0;
    let mut check = Check::new();
    check.require(
        (fit.rate + 0.125).abs() < 0.0125,
        format!("rate = {:.5} vs −0.125 ± 10%", fit.rate),
    );
    check.require(
        (fit.frequency - expected_freq).abs() < 0.02 * expected_freq,
        format!("frequency = {:.5} vs {expected_freq:.5} ± 2%", fit.frequency),
    );
    check.finish(7, name, start)
}

/// Measured amplitude and frequency of the reference Hopf run
/// (Galerkin, M = 400, J = 8, K = 4.16, h = 0), shared by criteria 8, 11, 12.
pub fn hopf_reference_run() -> &'static std::result::Result<(f64, f64), String> {
    static RUN: OnceLock<std::result::Result<(f64, f64), String>> = OnceLock::new();
    RUN.get_or_init(|| {
        let params = ModelParams { k: 4.16, h: 0.0 };
        let cfg = GalerkinConfig {
            m: 400,
            j_max: 8,
            z1_init: Complex64::new(1e-3, 0.0),
            t_end: 400.0,
            dt: None,
            record_stride: 0,
        };
        let out = simulate::simulate_galerkin(params, &reference(), &cfg)
            .map_err(|e| e.to_string())?;
        let amp = analysis::steady_amplitude(&out.series, 0.5, sqrt3())
            .map_err(|e| e.to_string())?;
        let freq = analysis::dominant_frequency(&out.series, 0.5, sqrt3())
            .map_err(|e| e.to_string())?;
        Ok((amp, freq.frequency))
    })
}

/// 8. Hopf amplitude at K = 4.16: max|η₁| = 0.2 ± 15%, frequency √3 ± 5%.
pub fn criterion_08_hopf_amplitude() -> CriterionResult {
    let start = Instant::now();
    let name = "Hopf amplitude (h = 0)";
    let (amp, freq) = match hopf_reference_run() {
        Ok(v) => *v,
        Err(e) => return Check::error(8, name, start, e),
    };
    let mut check = Check::new();
    check.require(
        (amp - 0.2).abs() < 0.15 * 0.2,
        format!("max|η₁| = {amp:.4} vs 0.2 ± 15%"),
    );
    check.require(
        (freq - sqrt3()).abs() < 0.05 * sqrt3(),
        format!("frequency = {freq:.4} vs √3 ± 5%"),
    );
    check.finish(8, name, start)
}

/// 9. Scaling law at h = 0: amplitude exponent 0.5 ± 0.1.
pub fn criterion_09_scaling_sine() -> CriterionResult {
    let start = Instant::now();
    let name = "scaling law (h = 0)";
    let settings = SweepSettings {
        sim: SweepSimulator::Galerkin { m: 1024, j_max: 8 },
        t_end: 800.0,
        dt: Some(0.02),
        record_stride: 0,
        transient_fraction: 0.5,
        init_amplitude: 1e-3,
        seed: 1,
    };
    let result = match analysis::bifurcation_sweep(
        &reference(),
        0.0,
        &[4.04, 4.09, 4.16, 4.25],
        &settings,
    ) {
        Ok(r) => r,
        Err(e) => return Check::error(9, name, start, e),
    };
    let mut check = Check::new();
    match result.exponent {
        Some(exp) => check.require(
            (exp - 0.5).abs() < 0.1,
            format!("exponent = {exp:.3} vs 0.5 ± 0.1"),
        ),
        None => check.require(false, "no exponent fitted".to_string()),
    }
    check.finish(9, name, start)
}

/// 10. Scaling law at h = −0.5: exponent 1.0 ± 0.15, amplitude(4.2) = 0.075 ± 20%.
pub fn criterion_10_scaling_second_harmonic() -> CriterionResult {
    let start = Instant::now();
    let name = "scaling law (h = −0.5)";
    let settings = SweepSettings {
        sim: SweepSimulator::Galerkin { m: 1024, j_max: 8 },
        t_end: 600.0,
        dt: Some(0.02),
        record_stride: 0,
        transient_fraction: 0.5,
        init_amplitude: 1e-3,
        seed: 1,
    };
    let result = match analysis::bifurcation_sweep(
        &reference(),
        -0.5,
        &[4.1, 4.2, 4.3, 4.4],
        &settings,
    ) {
        Ok(r) => r,
        Err(e) => return Check::error(10, name, start, e),
    };
    let mut check = Check::new();
    match result.exponent {
        Some(exp) => check.require(
            (exp - 1.0).abs() < 0.15,
            format!("exponent = {exp:.3} vs 1.0 ± 0.15"),
        ),
        None => check.require(false, "no exponent fitted".to_string()),
    }
    match result.rows.iter().find(|r| (r.k - 4.2).abs() < 1e-9) {
        Some(row) => check.require(
            (row.measured_amplitude - 0.075).abs() < 0.2 * 0.075,
            format!("amplitude(K=4.2) = {:.4} vs 0.075 ± 20%", row.measured_amplitude),
        ),
        None => check.require(false, "K = 4.2 row missing".to_string()),
    }
    check.finish(10, name, start)
}

/// 11. Ott-Antonsen oracle vs Galerkin at K = 4.16: amplitude and frequency
/// agree within 1e−2.
pub fn criterion_11_oracle_equivalence() -> CriterionResult {
    let start = Instant::now();
    let name = "oracle equivalence";
    let (g_amp, g_freq) = match hopf_reference_run() {
        Ok(v) => *v,
        Err(e) => return Check::error(11, name, start, e),
    };
    let z0 = Complex64::new(1e-3, 0.0);
    let series = match simulate::ott_antonsen_oracle(2.0, 4.16, (z0, z0), 400.0, 0.01, 5) {
        Ok(s) => s,
        Err(e) => return Check::error(11, name, start, e),
    };
    let amp = match analysis::steady_amplitude(&series, 0.5, sqrt3()) {
        Ok(a) => a,
        Err(e) => return Check::error(11, name, start, e),
    };
    let freq = match analysis::dominant_frequency(&series, 0.5, sqrt3()) {
        Ok(f) => f.frequency,
        Err(e) => return Check::error(11, name, start, e),
    };
    let mut check = Check::new();
    check.require(
        (amp - g_amp).abs() < 1e-2,
        format!("amplitudes: oracle {amp:.4} vs galerkin {g_amp:.4}"),
    );
    check.require(
        (freq - g_freq).abs() < 1e-2,
        format!("frequencies: oracle {freq:.4} vs galerkin {g_freq:.4}"),
    );
    check.finish(11, name, start)
}

/// 12. Finite-N consistency at N = 10⁵: amplitude matches the Galerkin run
/// within max(0.02, 3N^{−1/2}).
pub fn criterion_12_finite_n() -> CriterionResult {
    let start = Instant::now();
    let name = "finite-N consistency";
    let (g_amp, _) = match hopf_reference_run() {
        Ok(v) => *v,
        Err(e) => return Check::error(12, name, start, e),
    };
    let n = 100_000;
    let dist = reference();
    let omega = dist.sample_frequencies(n, SampleMode::Quantile);
    let theta0 = simulate::perturbed_uniform_phases(n, 1e-3, 20160711);
    let params = ModelParams { k: 4.16, h: 0.0 };
    let series = match simulate::simulate_finite_n(params, &omega, &theta0, 500.0, 0.02, 5)
    {
        Ok(s) => s,
        Err(e) => return Check::error(12, name, start, e),
    };
    let amp = match analysis::steady_amplitude(&series, 0.5, sqrt3()) {
        Ok(a) => a,
        Err(e) => return Check::error(12, name, start, e),
    };
    let tol = 0.02f64.max(3.0 / (n as f64).sqrt());
    let mut check = Check::new();
    check.require(
        (amp - g_amp).abs() < tol,
        format!("|η̂₁| = {amp:.4} vs galerkin {g_amp:.4} (tol {tol:.3})"),
    );
    check.finish(12, name, start)
}

/// 13. Reduced-model consistency: late-time |α₊| = 0.1 ± 10% at ε = 0.16,
/// rotational equivariance to 1e−10.
pub fn criterion_13_reduced_model() -> CriterionResult {
    let start = Instant::now();
    let name = "reduced-model consistency";
    let coeffs = match center_manifold::coefficients_sine(&reference()) {
        Ok(c) => c,
        Err(e) => return Check::error(13, name, start, e),
    };
    let init = CenterState::new(Complex64::new(0.01, 0.0), Complex64::new(0.008, 0.004));
    let traj = match reduced_ode::integrate_center_manifold(&coeffs, 0.16, init, 800.0, 0.01)
    {
        Ok(t) => t,
        Err(e) => return Check::error(13, name, start, e),
    };
    let mean = traj.late_mean_radius(0.25);
    let mut check = Check::new();
    check.require(
        (mean - 0.1).abs() < 0.1 * 0.1,
        format!("late ⟨|α₊|⟩ = {mean:.4} vs 0.1 ± 10%"),
    );

    // Equivariance under the global rotation.
    let beta = 0.9;
    let rot = Complex64::from_polar(1.0, beta);
    let rotated_init = CenterState::new(init.alpha_plus * rot, init.alpha_minus * rot);
    let base = reduced_ode::integrate_center_manifold(&coeffs, 0.16, init, 200.0, 0.01);
    let rotated =
        reduced_ode::integrate_center_manifold(&coeffs, 0.16, rotated_init, 200.0, 0.01);
    match (base, rotated) {
        (Ok(a), Ok(b)) => {
            let (TrajectoryData::Complex(sa), TrajectoryData::Complex(sb)) =
                (&a.data, &b.data)
            else {
                return Check::error(13, name, start, "unexpected trajectory payload");
            };
            let mut worst: f64 = 0.0;
            for (x, y) in sa.iter().zip(sb) {
                worst = worst.max((y.alpha_plus - x.alpha_plus * rot).norm());
                worst = worst.max((y.alpha_minus - x.alpha_minus * rot).norm());
            }
            check.require(worst < 1e-10, format!("equivariance defect {worst:.2e}"));
        }
        (Err(e), _) | (_, Err(e)) => return Check::error(13, name, start, e),
    }
    check.finish(13, name, start)
}

/// 14. Below-onset decay: Galerkin at K = 3.9 has |η₁|(500) < 1e−4.
pub fn criterion_14_below_onset_decay() -> CriterionResult {
    let start = Instant::now();
    let name = "below-onset decay";
    let params = ModelParams { k: 3.9, h: 0.0 };
    let cfg = GalerkinConfig {
        m: 800,
        j_max: 4,
        z1_init: Complex64::new(1e-3, 0.0),
        t_end: 500.0,
        dt: None,
        record_stride: 0,
    };
    let out = match simulate::simulate_galerkin(params, &reference(), &cfg) {
        Ok(o) => o,
        Err(e) => return Check::error(14, name, start, e),
    };
    let final_eta = out.series.eta1.last().unwrap().norm();
    let mut check = Check::new();
    check.require(
        final_eta < 1e-4,
        format!("|η₁|(500) = {final_eta:.3e} vs 1e-4"),
    );
    check.finish(14, name, start)
}

/// Run the whole suite in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_01_transition_point(),
        criterion_02_coefficients(),
        criterion_03_quadrature_fidelity(),
        criterion_04_eigenvalue_structure(),
        criterion_05_branch(),
        criterion_06_pairings(),
        criterion_07_linear_decay(),
        criterion_08_hopf_amplitude(),
        criterion_09_scaling_sine(),
        criterion_10_scaling_second_harmonic(),
        criterion_11_oracle_equivalence(),
        criterion_12_finite_n(),
        criterion_13_reduced_model(),
        criterion_14_below_onset_decay(),
    ]
}
