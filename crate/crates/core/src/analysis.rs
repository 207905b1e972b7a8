//! Measurements on order-parameter series and bifurcation sweeps.
//!
//! The bifurcating state is a standing wave, η₁(t) ≈ 2r* e^{iβ} cos(y_c t),
//! so the steady amplitude is the windowed maximum of |η₁| (its RMS would
//! halve it), the dominant frequency is the largest DFT peak folded to
//! positive frequencies, and decay rates come from a line fit through the
//! logarithmic envelope peaks.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::center_manifold::{self, CmCoefficients};
use crate::distributions::AnalyticDistribution;
use crate::error::{CoreError, Result};
use crate::simulate::{
    self, GalerkinConfig, ModelParams, OrderParameterSeries, SeriesSource,
};

/// Minimum number of reference-frequency periods the measurement window
/// must cover.
pub const MIN_WINDOW_PERIODS: f64 = 10.0;

/// Dominant-frequency estimate; `no_peak` marks a flat spectrum (the
/// reported frequency is then 0).
#[derive(Debug, Clone, Copy)]
pub struct FrequencyEstimate {
    pub frequency: f64,
    pub peak_magnitude: f64,
    pub no_peak: bool,
}

/// Exponential fit of a decaying oscillation.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Envelope rate (negative for decay).
    pub rate: f64,
    /// Oscillation frequency from the envelope minima spacing.
    pub frequency: f64,
}

fn window_start(series: &OrderParameterSeries, transient_fraction: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&transient_fraction) {
        return Err(CoreError::InvalidInput(
            "transient_fraction must lie in [0, 1)".into(),
        ));
    }
    if series.len() < 4 {
        return Err(CoreError::WindowTooShort("fewer than 4 samples".into()));
    }
    let t0 = series.times[0];
    let span = series.times[series.len() - 1] - t0;
    let cut = t0 + transient_fraction * span;
    Ok(series.times.partition_point(|&t| t < cut))
}

fn check_window_length(
    series: &OrderParameterSeries,
    start: usize,
    reference_frequency: f64,
) -> Result<()> {
    let window = series.times[series.len() - 1] - series.times[start];
    if reference_frequency > 0.0 {
        let needed = MIN_WINDOW_PERIODS * 2.0 * std::f64::consts::PI / reference_frequency;
        if window < needed {
            return Err(CoreError::WindowTooShort(format!(
                "window {window:.1} shorter than {MIN_WINDOW_PERIODS} periods ({needed:.1})"
            )));
        }
    }
    Ok(())
}

/// Peak |η₁| over the post-transient window.
///
/// `reference_frequency` (the predicted y_c) guards the precondition that
/// the window covers at least [`MIN_WINDOW_PERIODS`] oscillations; pass the
/// frequency of interest or any positive value the window is known to cover.
pub fn steady_amplitude(
    series: &OrderParameterSeries,
    transient_fraction: f64,
    reference_frequency: f64,
) -> Result<f64> {
    let start = window_start(series, transient_fraction)?;
    check_window_length(series, start, reference_frequency)?;
    Ok(series.eta1[start..]
        .iter()
        .map(|e| e.norm())
        .fold(0.0, f64::max))
}

/// Location of the largest DFT peak of η₁ over the window, Hann-windowed,
/// refined by quadratic interpolation and folded to positive frequency.
pub fn dominant_frequency(
    series: &OrderParameterSeries,
    transient_fraction: f64,
    reference_frequency: f64,
) -> Result<FrequencyEstimate> {
    let start = window_start(series, transient_fraction)?;
    check_window_length(series, start, reference_frequency)?;
    let samples = &series.eta1[start..];
    let n = samples.len();
    if n < 8 {
        return Err(CoreError::WindowTooShort(
            "fewer than 8 samples in the window".into(),
        ));
    }
    let dt = (series.times[series.len() - 1] - series.times[start]) / (n - 1) as f64;

    let mean = samples.iter().sum::<Complex64>() / n as f64;
    let mut buf: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let hann = 0.5
                * (1.0
                    - (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos());
            (s - mean) * hann
        })
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let magnitudes: Vec<f64> = buf.iter().map(|c| c.norm()).collect();
    let (peak_bin, peak_mag) = magnitudes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &m)| (i, m))
        .unwrap();

    let scale: f64 = samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
    if peak_mag <= 1e-9 * (1.0 + scale) * n as f64 {
        return Ok(FrequencyEstimate {
            frequency: 0.0,
            peak_magnitude: peak_mag,
            no_peak: true,
        });
    }

    // Quadratic refinement in bin space (wrapping neighbors).
    let left = magnitudes[(peak_bin + n - 1) % n];
    let right = magnitudes[(peak_bin + 1) % n];
    let denom = left - 2.0 * peak_mag + right;
    let delta = if denom.abs() > 1e-300 {
        (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
    } else {
        0.0
    };
    let mut bin = peak_bin as f64 + delta;
    // Bins above n/2 are negative frequencies.
    if bin > n as f64 / 2.0 {
        bin -= n as f64;
    }
    let frequency = (2.0 * std::f64::consts::PI * bin / (n as f64 * dt)).abs();
    Ok(FrequencyEstimate {
        frequency,
        peak_magnitude: peak_mag,
        no_peak: false,
    })
}

/// Least-squares fit of the log-envelope of |η₁| over `t_window`.
///
/// The signal is projected onto its dominant phase; the zero crossings of
/// the projection mark the half-periods, their median spacing gives the
/// frequency, and the per-half-period envelope peaks carry the rate fit.
/// The log-fit is weighted by the squared peak values, which is the
/// maximum-likelihood weighting when the measurement noise has constant
/// absolute size (late, small peaks then count less).
pub fn fit_decay_rate(
    series: &OrderParameterSeries,
    t_window: (f64, f64),
) -> Result<DecayFit> {
    let (t_lo, t_hi) = t_window;
    let lo = series.times.partition_point(|&t| t < t_lo);
    let hi = series.times.partition_point(|&t| t <= t_hi);
    if hi.saturating_sub(lo) < 16 {
        return Err(CoreError::WindowTooShort(format!(
            "only {} samples in [{t_lo}, {t_hi}]",
            hi.saturating_sub(lo)
        )));
    }
    let times = &series.times[lo..hi];
    let eta = &series.eta1[lo..hi];
    let norms: Vec<f64> = eta.iter().map(|e| e.norm()).collect();

    // Decreasing on average: compare the first and last third.
    let third = norms.len() / 3;
    let head: f64 = norms[..third].iter().sum::<f64>() / third as f64;
    let tail: f64 = norms[norms.len() - third..].iter().sum::<f64>() / third as f64;
    if tail >= head {
        return Err(CoreError::NonDecaying(format!(
            "mean |η₁| grows over the window ({head:.3e} → {tail:.3e})"
        )));
    }

    // Project onto the dominant phase: a standing wave becomes a signed
    // real oscillation whose zero crossings are the envelope touches.
    let peak_idx = norms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    let phase = eta[peak_idx] / norms[peak_idx].max(1e-300);
    let signed: Vec<f64> = eta.iter().map(|e| (e * phase.conj()).re).collect();

    let mut crossings: Vec<f64> = Vec::new();
    for i in 0..signed.len() - 1 {
        if signed[i] == 0.0 || signed[i] * signed[i + 1] < 0.0 {
            let frac = signed[i] / (signed[i] - signed[i + 1]);
            crossings.push(times[i] + frac * (times[i + 1] - times[i]));
        }
    }
    if crossings.len() < 4 {
        return Err(CoreError::WindowTooShort(format!(
            "only {} zero crossings in the window",
            crossings.len()
        )));
    }
    let mut spacings: Vec<f64> =
        crossings.windows(2).map(|w| w[1] - w[0]).collect();
    spacings.sort_by(f64::total_cmp);
    let frequency = std::f64::consts::PI / spacings[spacings.len() / 2];

    // One envelope peak per half-period.
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for pair in crossings.windows(2) {
        let a = times.partition_point(|&t| t < pair[0]);
        let b = times.partition_point(|&t| t < pair[1]);
        if b.saturating_sub(a) < 3 {
            continue;
        }
        let (idx, value) = norms[a..b]
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, &v)| (a + i, v))
            .unwrap();
        peaks.push((times[idx], value));
    }
    if peaks.len() < 3 {
        return Err(CoreError::WindowTooShort(format!(
            "only {} envelope peaks in the window",
            peaks.len()
        )));
    }

    let weights: Vec<f64> = peaks.iter().map(|p| p.1 * p.1).collect();
    let total: f64 = weights.iter().sum();
    let mean_t: f64 =
        peaks.iter().zip(&weights).map(|(p, w)| w * p.0).sum::<f64>() / total;
    let mean_ln: f64 = peaks
        .iter()
        .zip(&weights)
        .map(|(p, w)| w * p.1.max(1e-300).ln())
        .sum::<f64>()
        / total;
    let mut cov = 0.0;
    let mut var = 0.0;
    for ((t, v), w) in peaks.iter().zip(&weights) {
        cov += w * (t - mean_t) * (v.max(1e-300).ln() - mean_ln);
        var += w * (t - mean_t) * (t - mean_t);
    }
    let rate = cov / var;

    Ok(DecayFit { rate, frequency })
}

// ---------------------------------------------------------------------------
// Bifurcation sweeps
// ---------------------------------------------------------------------------

/// Which simulator a sweep drives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepSimulator {
    Galerkin { m: usize, j_max: usize },
    FiniteN { n: usize },
    OaOracle,
}

/// Per-run settings of a sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepSettings {
    pub sim: SweepSimulator,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub record_stride: usize,
    pub transient_fraction: f64,
    /// Initial |η₁| perturbation.
    pub init_amplitude: f64,
    /// Seed for the finite-N phase shuffle.
    pub seed: u64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            sim: SweepSimulator::Galerkin { m: 1024, j_max: 8 },
            t_end: 800.0,
            dt: None,
            record_stride: 0,
            transient_fraction: 0.5,
            init_amplitude: 1e-3,
            seed: 1,
        }
    }
}

/// One measured-vs-predicted row of a bifurcation diagram.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub k: f64,
    pub epsilon: f64,
    pub measured_amplitude: f64,
    pub predicted_amplitude: f64,
    pub measured_frequency: f64,
    pub predicted_frequency: f64,
    pub source: SeriesSource,
}

/// Sweep rows plus the fitted amplitude-vs-ε exponent (over ε > 0 rows).
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub exponent: Option<f64>,
}

impl SweepResult {
    /// CSV with the fixed header
    /// `K,epsilon,amp_measured,amp_predicted,freq_measured,freq_predicted,source`.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(
            out,
            "K,epsilon,amp_measured,amp_predicted,freq_measured,freq_predicted,source"
        )?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                row.k,
                row.epsilon,
                row.measured_amplitude,
                row.predicted_amplitude,
                row.measured_frequency,
                row.predicted_frequency,
                row.source
            )?;
        }
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rows": self.rows.len(),
            "exponent": self.exponent,
            "k_values": self.rows.iter().map(|r| r.k).collect::<Vec<_>>(),
        })
    }
}

/// Run one simulation per K, measure amplitude and frequency, pair each row
/// with the center-manifold prediction, and fit the scaling exponent.
pub fn bifurcation_sweep(
    dist: &AnalyticDistribution,
    h: f64,
    k_list: &[f64],
    settings: &SweepSettings,
) -> Result<SweepResult> {
    if k_list.is_empty() {
        return Err(CoreError::InvalidInput("empty K list".into()));
    }
    let coeffs = sweep_coefficients(dist, h)?;

    let mut rows = Vec::with_capacity(k_list.len());
    for &k in k_list {
        rows.push(sweep_row(dist, h, k, &coeffs, settings)?);
    }
    rows.sort_by(|a, b| a.k.total_cmp(&b.k));
    let exponent = fit_scaling_exponent(&rows);
    Ok(SweepResult { rows, exponent })
}

/// log-log fit of measured amplitude against ε over the supercritical rows
/// with a measurable amplitude; None with fewer than two usable rows.
pub fn fit_scaling_exponent(rows: &[SweepRow]) -> Option<f64> {
    let fit_rows: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.epsilon > 0.0 && r.measured_amplitude > 1e-4)
        .map(|r| (r.epsilon.ln(), r.measured_amplitude.ln()))
        .collect();
    if fit_rows.len() < 2 {
        return None;
    }
    let n = fit_rows.len() as f64;
    let mx = fit_rows.iter().map(|p| p.0).sum::<f64>() / n;
    let my = fit_rows.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (x, y) in &fit_rows {
        cov += (x - mx) * (y - my);
        var += (x - mx) * (x - mx);
    }
    Some(cov / var)
}

fn sweep_coefficients(dist: &AnalyticDistribution, h: f64) -> Result<CmCoefficients> {
    if h == 0.0 {
        center_manifold::coefficients_sine(dist)
    } else {
        center_manifold::coefficients_second_harmonic(dist, h)
    }
}

fn sweep_row(
    dist: &AnalyticDistribution,
    h: f64,
    k: f64,
    coeffs: &CmCoefficients,
    settings: &SweepSettings,
) -> Result<SweepRow> {
    let params = ModelParams { k, h };
    let (series, source) = match settings.sim {
        SweepSimulator::Galerkin { m, j_max } => {
            let cfg = GalerkinConfig {
                m,
                j_max,
                z1_init: Complex64::new(settings.init_amplitude, 0.0),
                t_end: settings.t_end,
                dt: settings.dt,
                record_stride: settings.record_stride,
            };
            let out = simulate::simulate_galerkin(params, dist, &cfg)?;
            (out.series, SeriesSource::Galerkin)
        }
        SweepSimulator::FiniteN { n } => {
            let omega =
                dist.sample_frequencies(n, crate::distributions::SampleMode::Quantile);
            let theta0 = simulate::perturbed_uniform_phases(
                n,
                settings.init_amplitude,
                settings.seed,
            );
            let dt = settings.dt.unwrap_or(0.02);
            let stride = if settings.record_stride == 0 {
                ((0.05 / dt).round() as usize).max(1)
            } else {
                settings.record_stride
            };
            let series = simulate::simulate_finite_n(
                params,
                &omega,
                &theta0,
                settings.t_end,
                dt,
                stride,
            )?;
            (series, SeriesSource::FiniteN)
        }
        SweepSimulator::OaOracle => {
            if h != 0.0 {
                return Err(CoreError::InvalidInput(
                    "the Ott-Antonsen oracle applies only at h = 0".into(),
                ));
            }
            let omega0 = dist.peak_offset().ok_or_else(|| {
                CoreError::InvalidInput(
                    "the Ott-Antonsen oracle needs the bimodal Lorentzian family".into(),
                )
            })?;
            let z0 = Complex64::new(settings.init_amplitude, 0.0);
            let dt = settings.dt.unwrap_or(0.01);
            let stride = if settings.record_stride == 0 {
                ((0.05 / dt).round() as usize).max(1)
            } else {
                settings.record_stride
            };
            let series = simulate::ott_antonsen_oracle(
                omega0,
                k,
                (z0, z0),
                settings.t_end,
                dt,
                stride,
            )?;
            (series, SeriesSource::OaOracle)
        }
    };

    let prediction = center_manifold::predict_orbit(coeffs, k - coeffs.k_c);
    let measured_amplitude =
        steady_amplitude(&series, settings.transient_fraction, coeffs.y_c)?;
    let freq = dominant_frequency(&series, settings.transient_fraction, coeffs.y_c)?;
    Ok(SweepRow {
        k,
        epsilon: k - coeffs.k_c,
        measured_amplitude,
        predicted_amplitude: if prediction.stable {
            prediction.amplitude
        } else {
            0.0
        },
        measured_frequency: freq.frequency,
        predicted_frequency: prediction.frequency,
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn synthetic(
        f: impl Fn(f64) -> Complex64,
        t_end: f64,
        dt: f64,
    ) -> OrderParameterSeries {
        let n = (t_end / dt) as usize + 1;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let eta1: Vec<Complex64> = times.iter().map(|&t| f(t)).collect();
        let eta2 = vec![Complex64::new(0.0, 0.0); n];
        OrderParameterSeries {
            times,
            eta1,
            eta2,
            source: SeriesSource::Galerkin,
        }
    }

    #[test]
    fn amplitude_of_constant_series() {
        let series = synthetic(|_| Complex64::new(0.3, 0.0), 100.0, 0.05);
        let amp = steady_amplitude(&series, 0.5, 2.0).unwrap();
        assert_abs_diff_eq!(amp, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn amplitude_of_standing_wave_is_peak_value() {
        let s3 = 3.0f64.sqrt();
        for beta in [0.0, 0.4, 2.2] {
            let rot = Complex64::from_polar(1.0, beta);
            let series =
                synthetic(|t| 0.2 * rot * (s3 * t).cos(), 200.0, 0.02);
            let amp = steady_amplitude(&series, 0.5, s3).unwrap();
            assert_abs_diff_eq!(amp, 0.2, epsilon = 1e-3);
        }
    }

    #[test]
    fn amplitude_and_frequency_are_rotation_invariant() {
        let s3 = 3.0f64.sqrt();
        let base = synthetic(|t| Complex64::new(0.2 * (s3 * t).cos(), 0.0), 300.0, 0.05);
        let rot = Complex64::from_polar(1.0, 1.1);
        let rotated = OrderParameterSeries {
            times: base.times.clone(),
            eta1: base.eta1.iter().map(|e| e * rot).collect(),
            eta2: base.eta2.clone(),
            source: base.source,
        };
        let a0 = steady_amplitude(&base, 0.5, s3).unwrap();
        let a1 = steady_amplitude(&rotated, 0.5, s3).unwrap();
        assert_abs_diff_eq!(a0, a1, epsilon = 1e-12);
        let f0 = dominant_frequency(&base, 0.5, s3).unwrap().frequency;
        let f1 = dominant_frequency(&rotated, 0.5, s3).unwrap().frequency;
        assert_abs_diff_eq!(f0, f1, epsilon = 1e-12);
    }

    #[test]
    fn window_too_short_is_reported() {
        let series = synthetic(|t| Complex64::new(t.cos(), 0.0), 10.0, 0.05);
        let err = steady_amplitude(&series, 0.5, 1.0).unwrap_err();
        assert!(matches!(err, CoreError::WindowTooShort(_)));
    }

    #[test]
    fn dominant_frequency_of_cosine() {
        let s3 = 3.0f64.sqrt();
        let series = synthetic(|t| Complex64::new(0.2 * (s3 * t).cos(), 0.0), 400.0, 0.05);
        let est = dominant_frequency(&series, 0.5, s3).unwrap();
        assert!(!est.no_peak);
        assert_abs_diff_eq!(est.frequency, s3, epsilon = 0.02);
    }

    #[test]
    fn dominant_frequency_of_rotating_wave_keeps_sign_folded() {
        // A pure e^{−iωt} signal peaks at a negative bin; the fold reports ω.
        let series = synthetic(
            |t| 0.1 * Complex64::from_polar(1.0, -1.3 * t),
            400.0,
            0.05,
        );
        let est = dominant_frequency(&series, 0.5, 1.3).unwrap();
        assert_abs_diff_eq!(est.frequency, 1.3, epsilon = 0.02);
    }

    #[test]
    fn constant_series_has_no_peak() {
        let series = synthetic(|_| Complex64::new(0.3, 0.0), 200.0, 0.05);
        let est = dominant_frequency(&series, 0.5, 1.0).unwrap();
        assert!(est.no_peak);
        assert_eq!(est.frequency, 0.0);
    }

    #[test]
    fn decay_fit_recovers_synthetic_parameters() {
        let series = synthetic(
            |t| Complex64::new((-0.125 * t).exp() * (1.798 * t).cos(), 0.0),
            60.0,
            0.01,
        );
        let fit = fit_decay_rate(&series, (5.0, 40.0)).unwrap();
        assert_abs_diff_eq!(fit.rate, -0.125, epsilon = 0.005);
        assert_abs_diff_eq!(fit.frequency, 1.798, epsilon = 0.02);
    }

    #[test]
    fn growing_signal_is_rejected() {
        let series = synthetic(
            |t| Complex64::new((0.05 * t).exp() * (2.0 * t).cos(), 0.0),
            60.0,
            0.01,
        );
        let err = fit_decay_rate(&series, (5.0, 40.0)).unwrap_err();
        assert!(matches!(err, CoreError::NonDecaying(_)));
    }

    #[test]
    fn sweep_csv_header_is_fixed() {
        let result = SweepResult {
            rows: vec![SweepRow {
                k: 4.16,
                epsilon: 0.16,
                measured_amplitude: 0.2,
                predicted_amplitude: 0.2,
                measured_frequency: 1.73,
                predicted_frequency: 1.73,
                source: SeriesSource::Galerkin,
            }],
            exponent: Some(0.5),
        };
        let mut buf = Vec::new();
        result.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "K,epsilon,amp_measured,amp_predicted,freq_measured,freq_predicted,source\n"
        ));
        assert!(text.contains("galerkin"));
    }

    #[test]
    fn subcritical_sweep_measures_noise_floor() {
        // All K below onset: tiny amplitudes, no exponent fit, predictions 0.
        let dist = AnalyticDistribution::bimodal_lorentzian(2.0).unwrap();
        let settings = SweepSettings {
            sim: SweepSimulator::OaOracle,
            t_end: 400.0,
            dt: Some(0.01),
            record_stride: 5,
            transient_fraction: 0.5,
            init_amplitude: 1e-3,
            seed: 1,
        };
        let result = bifurcation_sweep(&dist, 0.0, &[3.6, 3.8], &settings).unwrap();
        assert!(result.exponent.is_none());
        for row in &result.rows {
            assert!(row.measured_amplitude < 0.01);
            assert_eq!(row.predicted_amplitude, 0.0);
        }
    }

    #[test]
    fn oa_sweep_recovers_sqrt_scaling() {
        // The OA oracle is cheap enough to sweep in a unit test.
        let dist = AnalyticDistribution::bimodal_lorentzian(2.0).unwrap();
        let settings = SweepSettings {
            sim: SweepSimulator::OaOracle,
            t_end: 1500.0,
            dt: Some(0.02),
            record_stride: 3,
            transient_fraction: 0.6,
            init_amplitude: 1e-3,
            seed: 1,
        };
        let ks = [4.04, 4.09, 4.16, 4.25];
        let result = bifurcation_sweep(&dist, 0.0, &ks, &settings).unwrap();
        let exponent = result.exponent.unwrap();
        assert!(
            (exponent - 0.5).abs() < 0.1,
            "fitted exponent {exponent}"
        );
        // Monotone amplitudes across the supercritical rows.
        for pair in result.rows.windows(2) {
            assert!(pair[1].measured_amplitude >= pair[0].measured_amplitude - 0.01);
        }
    }
}
