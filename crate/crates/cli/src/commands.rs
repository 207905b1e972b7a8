//! The five pipeline subcommands.

use std::fmt::Write as _;

use kdlab_core::analysis::{self, SweepSettings, SweepSimulator};
use kdlab_core::center_manifold::{self, CmTerms};
use kdlab_core::distributions::SampleMode;
use kdlab_core::simulate::{self, GalerkinConfig, ModelParams};
use kdlab_core::spectral::{self, Region, SpectralRoot};
use kdlab_core::{acceptance, AnalyticDistribution, Complex64};

use crate::config::RunConfig;
use crate::output::ArtifactWriter;

pub type CmdResult = Result<(), String>;

fn spectrum_rows(rows: &[(f64, SpectralRoot)]) -> String {
    let mut csv = String::from("K,re,im,sheet,residual\n");
    for (k, root) in rows {
        writeln!(
            csv,
            "{},{},{},{},{}",
            k, root.point.lambda.re, root.point.lambda.im, root.point.sheet, root.residual
        )
        .expect("string write");
    }
    csv
}

/// Root inventory over a K grid plus one tracked branch.
pub fn cmd_spectrum(
    config: &RunConfig,
    dist: &AnalyticDistribution,
    writer: &ArtifactWriter,
) -> CmdResult {
    let sc = &config.spectrum;
    if sc.k_count == 0 || !(sc.k_min > 0.0) || !(sc.k_max >= sc.k_min) {
        return Err("spectrum grid is empty or not positive".into());
    }
    let h = config.model.h;
    // Second-sheet search depth: the certified strip for custom families,
    // a few frequency scales for closed-form ones (whose continuation has
    // no strip limit, only isolated poles).
    let strip = dist
        .continuation_limit()
        .min(2.0 * dist.frequency_scale());
    let im_bound = 3.0 * dist.frequency_scale();
    let region = Region::new(-strip, 0.0, -im_bound, im_bound);

    let mut scan: Vec<(f64, SpectralRoot)> = Vec::new();
    for i in 0..sc.k_count {
        let k = if sc.k_count == 1 {
            sc.k_min
        } else {
            sc.k_min + (sc.k_max - sc.k_min) * i as f64 / (sc.k_count - 1) as f64
        };
        let search = spectral::find_eigenvalues(dist, k, 1, h).map_err(|e| e.to_string())?;
        let mut at_k: Vec<SpectralRoot> = Vec::new();
        for root in search.eigenvalues.into_iter().chain(search.boundary) {
            for _ in 0..root.multiplicity {
                at_k.push(root);
            }
        }
        let generalized =
            spectral::find_generalized_eigenvalues(dist, k, region).map_err(|e| e.to_string())?;
        for root in generalized {
            // Axis roots appear in both searches; list them once.
            if !at_k
                .iter()
                .any(|r| (r.point.lambda - root.point.lambda).norm() < 1e-7)
            {
                at_k.push(root);
            }
        }
        scan.extend(at_k.into_iter().map(|root| (k, root)));
    }
    if config.output.formats.iter().any(|f| f == "csv") {
        writer
            .write("spectrum_scan.csv", spectrum_rows(&scan).as_bytes())
            .map_err(|e| e.to_string())?;
    }
    if config.output.formats.iter().any(|f| f == "json") {
        let records: Vec<serde_json::Value> =
            scan.iter().map(|(k, root)| root.record(*k)).collect();
        writer
            .write(
                "spectrum_scan.json",
                serde_json::to_string_pretty(&records)
                    .expect("records serialize")
                    .as_bytes(),
            )
            .map_err(|e| e.to_string())?;
    }

    // Branch: continue the generalized eigenvalue with positive imaginary
    // part (or the least stable eigenvalue) from the start of the range.
    let seeds =
        spectral::find_generalized_eigenvalues(dist, sc.branch_k_start, region)
            .map_err(|e| e.to_string())?;
    let seed = seeds
        .iter()
        .filter(|r| r.point.lambda.im > 0.0)
        .max_by(|a, b| a.point.lambda.re.total_cmp(&b.point.lambda.re))
        .or_else(|| seeds.first());
    let branch_csv = match seed {
        None => {
            eprintln!(
                "no generalized eigenvalue found at K = {}; branch file left empty",
                sc.branch_k_start
            );
            String::from("K,re,im,sheet,residual\n")
        }
        Some(seed) => {
            match spectral::track_branch(
                dist,
                sc.branch_k_start,
                sc.branch_k_end,
                seed.point,
                sc.branch_steps,
            ) {
                Ok(branch) => {
                    let rows: Vec<(f64, SpectralRoot)> = branch
                        .samples
                        .iter()
                        .map(|s| {
                            (
                                s.k,
                                SpectralRoot {
                                    point: s.point,
                                    residual: s.residual,
                                    multiplicity: 1,
                                },
                            )
                        })
                        .collect();
                    spectrum_rows(&rows)
                }
                Err(e) => {
                    eprintln!("branch tracking stopped: {e}");
                    String::from("K,re,im,sheet,residual\n")
                }
            }
        }
    };
    writer
        .write("branch.csv", branch_csv.as_bytes())
        .map_err(|e| e.to_string())?;
    Ok(())
}

/// Transition report, hypothesis flags, coefficients and orbit prediction.
pub fn cmd_report(
    config: &RunConfig,
    dist: &AnalyticDistribution,
    writer: &ArtifactWriter,
) -> CmdResult {
    let h = config.model.h;
    let report = spectral::verify_assumptions(dist, h).map_err(|e| e.to_string())?;
    let flags = report.assumptions.as_ref().expect("flags filled");

    let mut body = serde_json::json!({
        "transition": {
            "y_c": report.y_c,
            "K_c": report.k_c,
            "K_c2": report.k_c2,
            "dlambda_dk": [report.dlambda_dk.re, report.dlambda_dk.im],
            "candidates": report.candidates.iter()
                .map(|c| serde_json::json!({"y": c.y, "K": c.k}))
                .collect::<Vec<_>>(),
        },
        "assumptions": {
            "a1": {"ok": flags.a1.ok, "detail": flags.a1.detail},
            "a2": {"ok": flags.a2.ok, "detail": flags.a2.detail},
            "a3": {"ok": flags.a3.ok, "detail": flags.a3.detail},
            "a4": {"ok": flags.a4.ok, "detail": flags.a4.detail},
            "a5": {"ok": flags.a5.ok, "detail": flags.a5.detail},
        },
    });

    let coefficients = if h == 0.0 {
        center_manifold::coefficients_sine(dist)
    } else {
        center_manifold::coefficients_second_harmonic(dist, h)
    };
    match coefficients {
        Ok(coeffs) => {
            let epsilon = config.model.k - coeffs.k_c;
            let prediction = center_manifold::predict_orbit(&coeffs, epsilon);
            let criticality = match coeffs.terms {
                CmTerms::Sine { p2, .. } => {
                    if p2.re < 0.0 {
                        "supercritical"
                    } else {
                        "subcritical"
                    }
                }
                CmTerms::SecondHarmonic { q2, .. } => {
                    if q2.re < 0.0 {
                        "supercritical"
                    } else {
                        "subcritical"
                    }
                }
            };
            body["coefficients"] = center_manifold::report_record(&coeffs, &prediction);
            body["coefficients"]["criticality"] = criticality.into();
        }
        Err(e) => {
            body["coefficients"] = serde_json::Value::Null;
            body["coefficient_error"] = e.to_string().into();
        }
    }

    writer
        .write(
            "report.json",
            serde_json::to_string_pretty(&body)
                .expect("report serializes")
                .as_bytes(),
        )
        .map_err(|e| e.to_string())?;
    Ok(())
}

/// One simulation run, written as the series CSV.
pub fn cmd_simulate(
    config: &RunConfig,
    dist: &AnalyticDistribution,
    writer: &ArtifactWriter,
) -> CmdResult {
    let sim = &config.simulation;
    let params = ModelParams {
        k: config.model.k,
        h: config.model.h,
    };
    let mut truncation_ratio = None;
    let series = match sim.kind.as_str() {
        "finite_n" => {
            let omega = dist.sample_frequencies(sim.n, SampleMode::Quantile);
            let theta0 =
                simulate::perturbed_uniform_phases(sim.n, sim.init_amplitude, sim.seed);
            let dt = sim.dt.unwrap_or(0.02);
            let stride = if sim.record_stride == 0 {
                ((0.05 / dt).round() as usize).max(1)
            } else {
                sim.record_stride
            };
            simulate::simulate_finite_n(params, &omega, &theta0, sim.t_end, dt, stride)
                .map_err(|e| e.to_string())?
        }
        "galerkin" => {
            let cfg = GalerkinConfig {
                m: sim.m,
                j_max: sim.j_max,
                z1_init: Complex64::new(sim.init_amplitude, 0.0),
                t_end: sim.t_end,
                dt: sim.dt,
                record_stride: sim.record_stride,
            };
            let out = simulate::simulate_galerkin(params, dist, &cfg)
                .map_err(|e| e.to_string())?;
            if out.truncation_warning() {
                eprintln!(
                    "truncation warning: weighted |Z_J|/|Z_1| = {:.3} at the final time",
                    out.truncation_ratio
                );
            }
            truncation_ratio = Some(out.truncation_ratio);
            out.series
        }
        "linearized" => simulate::simulate_linearized(
            params,
            dist,
            sim.m,
            Complex64::new(sim.init_amplitude, 0.0),
            sim.t_end,
            sim.dt,
            sim.record_stride,
        )
        .map_err(|e| e.to_string())?,
        "oa_oracle" => {
            let omega0 = dist
                .peak_offset()
                .ok_or("oa_oracle requires the bimodal_lorentzian family")?;
            if config.model.h != 0.0 {
                return Err("oa_oracle applies only at h = 0".into());
            }
            let z0 = Complex64::new(sim.init_amplitude, 0.0);
            let dt = sim.dt.unwrap_or(0.01);
            let stride = if sim.record_stride == 0 {
                ((0.05 / dt).round() as usize).max(1)
            } else {
                sim.record_stride
            };
            simulate::ott_antonsen_oracle(omega0, config.model.k, (z0, z0), sim.t_end, dt, stride)
                .map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown simulation kind '{other}'")),
    };

    let mut csv = Vec::new();
    series.write_csv(&mut csv).map_err(|e| e.to_string())?;
    writer.write("series.csv", &csv).map_err(|e| e.to_string())?;

    let mut summary = serde_json::json!({
        "kind": sim.kind,
        "samples": series.len(),
        "t_end": sim.t_end,
        "final_abs_eta1": series.eta1.last().map(|e| e.norm()),
    });
    if let Some(ratio) = truncation_ratio {
        summary["truncation_ratio"] = ratio.into();
        summary["truncation_warning"] = (ratio > 0.1).into();
    }
    writer
        .write(
            "series_summary.json",
            serde_json::to_string_pretty(&summary)
                .expect("summary serializes")
                .as_bytes(),
        )
        .map_err(|e| e.to_string())?;
    Ok(())
}

/// Bifurcation sweep over the configured K values.
pub fn cmd_sweep(
    config: &RunConfig,
    dist: &AnalyticDistribution,
    writer: &ArtifactWriter,
    threads: usize,
) -> CmdResult {
    let sim = &config.simulation;
    let settings = SweepSettings {
        sim: match sim.kind.as_str() {
            "galerkin" => SweepSimulator::Galerkin {
                m: sim.m,
                j_max: sim.j_max,
            },
            "finite_n" => SweepSimulator::FiniteN { n: sim.n },
            "oa_oracle" => SweepSimulator::OaOracle,
            other => return Err(format!("sweep cannot drive simulation kind '{other}'")),
        },
        t_end: sim.t_end,
        dt: sim.dt,
        record_stride: sim.record_stride,
        transient_fraction: config.analysis.transient_fraction,
        init_amplitude: sim.init_amplitude,
        seed: sim.seed,
    };
    let k_values = &config.sweep.k_values;
    if k_values.is_empty() {
        return Err("sweep.k_values is empty".into());
    }

    // Rows are independent; with --threads > 1 they run in a scoped pool.
    // Output order is by K either way, so the artifacts are identical.
    let result = if threads <= 1 || k_values.len() <= 1 {
        analysis::bifurcation_sweep(dist, config.model.h, k_values, &settings)
            .map_err(|e| e.to_string())?
    } else {
        let mut row_results: Vec<Option<_>> = vec![None; k_values.len()];
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (idx, &k) in k_values.iter().enumerate() {
                let settings = settings;
                let dist = dist.clone();
                handles.push((
                    idx,
                    scope.spawn(move || {
                        analysis::bifurcation_sweep(&dist, config.model.h, &[k], &settings)
                    }),
                ));
            }
            for (idx, handle) in handles {
                row_results[idx] = Some(handle.join().expect("sweep thread panicked"));
            }
        });
        let mut rows = Vec::new();
        for outcome in row_results.into_iter().flatten() {
            rows.extend(outcome.map_err(|e| e.to_string())?.rows);
        }
        rows.sort_by(|a, b| a.k.total_cmp(&b.k));
        let exponent = analysis::fit_scaling_exponent(&rows);
        analysis::SweepResult { rows, exponent }
    };

    let mut csv = Vec::new();
    result.write_csv(&mut csv).map_err(|e| e.to_string())?;
    writer.write("sweep.csv", &csv).map_err(|e| e.to_string())?;
    writer
        .write(
            "sweep_summary.json",
            serde_json::to_string_pretty(&result.summary_json())
                .expect("summary serializes")
                .as_bytes(),
        )
        .map_err(|e| e.to_string())?;
    Ok(())
}

/// Full verification suite; returns false when any criterion fails.
pub fn cmd_verify(writer: &ArtifactWriter) -> Result<bool, String> {
    let results = acceptance::run_all();
    let mut lines = String::new();
    for r in &results {
        println!("{}", r.line());
        lines.push_str(&r.line());
        lines.push('\n');
    }
    let passed = results.iter().filter(|r| r.passed).count();
    let all = results.len();
    println!("{passed}/{all} criteria passed");

    let body = serde_json::json!({
        "passed": passed,
        "total": all,
        "criteria": results.iter().map(|r| serde_json::json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed,
            "seconds": r.seconds,
            "detail": r.detail,
        })).collect::<Vec<_>>(),
    });
    writer
        .write(
            "verify.json",
            serde_json::to_string_pretty(&body)
                .expect("verify report serializes")
                .as_bytes(),
        )
        .map_err(|e| e.to_string())?;
    Ok(passed == all)
}
