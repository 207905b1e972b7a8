//! Integrators for the reduced systems on the center manifold.
//!
//! Three views of the same local dynamics, each truncated at the displayed
//! polynomial order:
//!
//! * the full complex system in (α₊, α₋) — cubic for sine coupling,
//!   quadratic with e^{−i·arg α±} factors for the second harmonic;
//! * its polar form (ψ, r₊, r₋) with the fast phase kept explicit;
//! * the ψ-averaged radial system (r₊, r₋).
//!
//! Fixed-step RK4 throughout. The full system is invariant under the global
//! rotation (α₊, α₋) ↦ (e^{iβ}α₊, e^{iβ}α₋); the gauge arg α₊ + arg α₋ = 0
//! is never imposed — the unreduced system is integrated and the symmetry is
//! checked instead.

use num_complex::Complex64;

use crate::center_manifold::{CmCoefficients, CmTerms};
use crate::error::{CoreError, Result};

/// Trajectories blowing past this |α| have left the asymptotic regime.
pub const ALPHA_LIMIT: f64 = 10.0;

/// Coordinates on the center subspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterState {
    pub alpha_plus: Complex64,
    pub alpha_minus: Complex64,
}

impl CenterState {
    pub fn new(alpha_plus: Complex64, alpha_minus: Complex64) -> Self {
        Self {
            alpha_plus,
            alpha_minus,
        }
    }

    pub fn radii(&self) -> (f64, f64) {
        (self.alpha_plus.norm(), self.alpha_minus.norm())
    }
}

/// Which truncated system produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SystemKind {
    FullSine,
    FullSecondHarmonic,
    Polar,
    AveragedSine,
    AveragedSecondHarmonic,
}

/// State samples of a reduced trajectory.
#[derive(Debug, Clone)]
pub enum TrajectoryData {
    /// (α₊, α₋) samples of the full system.
    Complex(Vec<CenterState>),
    /// (ψ, r₊, r₋) samples of the polar system.
    Polar(Vec<[f64; 3]>),
    /// (r₊, r₋) samples of the averaged system.
    Averaged(Vec<[f64; 2]>),
}

#[derive(Debug, Clone)]
pub struct ReducedTrajectory {
    pub times: Vec<f64>,
    pub data: TrajectoryData,
    pub kind: SystemKind,
}

impl ReducedTrajectory {
    /// Mean |α₊| over the trailing fraction of the trajectory.
    pub fn late_mean_radius(&self, fraction: f64) -> f64 {
        let radii: Vec<f64> = match &self.data {
            TrajectoryData::Complex(states) => {
                states.iter().map(|s| s.alpha_plus.norm()).collect()
            }
            TrajectoryData::Polar(states) => states.iter().map(|s| s[1]).collect(),
            TrajectoryData::Averaged(states) => states.iter().map(|s| s[0]).collect(),
        };
        let start = ((1.0 - fraction) * radii.len() as f64) as usize;
        let tail = &radii[start.min(radii.len() - 1)..];
        tail.iter().sum::<f64>() / tail.len() as f64
    }
}

/// Default step: resolves the rotation at y_c with margin.
pub fn default_dt(y_c: f64) -> f64 {
    (0.05 / y_c).min(0.01)
}

/// Default horizon: long enough to reach the averaged attractor.
pub fn default_t_end(coeffs: &CmCoefficients, epsilon: f64) -> f64 {
    let growth = match coeffs.terms {
        CmTerms::Sine { p1, .. } => epsilon * p1.re,
        CmTerms::SecondHarmonic { q1, .. } => epsilon * q1.re,
    };
    if growth.abs() < 1e-12 {
        1000.0
    } else {
        50.0 / growth.abs()
    }
}

fn arg_or_zero(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

fn full_field(coeffs: &CmCoefficients, epsilon: f64, s: CenterState) -> CenterState {
    let iy = Complex64::new(0.0, coeffs.y_c);
    let a_p = s.alpha_plus;
    let a_m = s.alpha_minus;
    match coeffs.terms {
        CmTerms::Sine { p1, p2, p3, p4 } => {
            let sum = a_p + a_m;
            let conj_sum = a_p.conj() + a_m.conj();
            CenterState {
                alpha_plus: iy * a_p
                    + p1 * epsilon * sum
                    + conj_sum * (p2 * a_p * a_p + p3 * a_m * a_m + p4 * a_p * a_m),
                alpha_minus: -iy * a_m
                    + p1.conj() * epsilon * sum
                    + conj_sum
                        * (p2.conj() * a_m * a_m
                            + p3.conj() * a_p * a_p
                            + p4.conj() * a_p * a_m),
            }
        }
        CmTerms::SecondHarmonic { q1, q2, q3, .. } => {
            let sum = a_p + a_m;
            // arg(0) := 0 keeps the vector field defined at the origin.
            let phase_p = Complex64::from_polar(1.0, -arg_or_zero(a_p));
            let phase_m = Complex64::from_polar(1.0, -arg_or_zero(a_m));
            CenterState {
                alpha_plus: iy * a_p
                    + q1 * epsilon * sum
                    + (q2 * a_p * a_p + q3 * a_m * a_m) * phase_p,
                alpha_minus: -iy * a_m
                    + q1.conj() * epsilon * sum
                    + (q2 * a_m * a_m + q3.conj() * a_p * a_p) * phase_m,
            }
        }
    }
}

/// Integrate the full complex system from `init` to `t_end`.
pub fn integrate_center_manifold(
    coeffs: &CmCoefficients,
    epsilon: f64,
    init: CenterState,
    t_end: f64,
    dt: f64,
) -> Result<ReducedTrajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(CoreError::InvalidInput(
            "integration requires dt > 0 and t_end ≥ 0".into(),
        ));
    }
    let kind = match coeffs.terms {
        CmTerms::Sine { .. } => SystemKind::FullSine,
        CmTerms::SecondHarmonic { .. } => SystemKind::FullSecondHarmonic,
    };
    let steps = (t_end / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut s = init;
    times.push(0.0);
    states.push(s);
    for step in 1..=steps {
        let t = step as f64 * dt;
        let k1 = full_field(coeffs, epsilon, s);
        let k2 = full_field(coeffs, epsilon, advance(s, k1, dt / 2.0));
        let k3 = full_field(coeffs, epsilon, advance(s, k2, dt / 2.0));
        let k4 = full_field(coeffs, epsilon, advance(s, k3, dt));
        s = CenterState {
            alpha_plus: s.alpha_plus
                + dt / 6.0
                    * (k1.alpha_plus
                        + 2.0 * k2.alpha_plus
                        + 2.0 * k3.alpha_plus
                        + k4.alpha_plus),
            alpha_minus: s.alpha_minus
                + dt / 6.0
                    * (k1.alpha_minus
                        + 2.0 * k2.alpha_minus
                        + 2.0 * k3.alpha_minus
                        + k4.alpha_minus),
        };
        if s.alpha_plus.norm() > ALPHA_LIMIT || s.alpha_minus.norm() > ALPHA_LIMIT {
            return Err(CoreError::Overflow {
                t,
                limit: ALPHA_LIMIT,
            });
        }
        times.push(t);
        states.push(s);
    }
    Ok(ReducedTrajectory {
        times,
        data: TrajectoryData::Complex(states),
        kind,
    })
}

fn advance(s: CenterState, k: CenterState, dt: f64) -> CenterState {
    CenterState {
        alpha_plus: s.alpha_plus + dt * k.alpha_plus,
        alpha_minus: s.alpha_minus + dt * k.alpha_minus,
    }
}

fn polar_field(coeffs: &CmCoefficients, epsilon: f64, s: [f64; 3]) -> [f64; 3] {
    let [psi, r_p, r_m] = s;
    let rot = |theta: f64| Complex64::from_polar(1.0, theta);
    match coeffs.terms {
        CmTerms::Sine { p1, p2, p3, p4 } => {
            let e2 = rot(-2.0 * psi);
            let e2p = rot(2.0 * psi);
            let e4 = rot(-4.0 * psi);
            let dr_p = epsilon * p1.re * r_p
                + epsilon * (p1 * e2).re * r_m
                + p2.re * r_p.powi(3)
                + (p2 * e2p).re * r_p * r_p * r_m
                + (p3 * e4).re * r_p * r_m * r_m
                + (p3 * e2).re * r_m.powi(3)
                + (p4 * e2).re * r_p * r_p * r_m;
            let dr_m = epsilon * p1.re * r_m
                + epsilon * (p1 * e2).re * r_p
                + p2.re * r_m.powi(3)
                + (p2 * e2p).re * r_p * r_m * r_m
                + (p3 * e4).re * r_p * r_p * r_m
                + (p3 * e2).re * r_p.powi(3)
                + (p4 * e2).re * r_p * r_m * r_m;
            [coeffs.y_c, dr_p, dr_m]
        }
        CmTerms::SecondHarmonic { q1, q2, q3, .. } => {
            let e2 = rot(-2.0 * psi);
            let e4 = rot(-4.0 * psi);
            let dr_p = epsilon * q1.re * r_p
                + epsilon * (q1 * e2).re * r_m
                + q2.re * r_p * r_p
                + (q3 * e4).re * r_m * r_m;
            let dr_m = epsilon * q1.re * r_m
                + epsilon * (q1 * e2).re * r_p
                + q2.re * r_m * r_m
                + (q3 * e4).re * r_p * r_p;
            [coeffs.y_c, dr_p, dr_m]
        }
    }
}

/// Integrate the polar (ψ, r₊, r₋) system, fast phase kept explicit.
pub fn integrate_polar(
    coeffs: &CmCoefficients,
    epsilon: f64,
    init: [f64; 3],
    t_end: f64,
    dt: f64,
) -> Result<ReducedTrajectory> {
    rk4_real(
        |s| polar_field(coeffs, epsilon, s),
        init,
        t_end,
        dt,
        SystemKind::Polar,
        |s| s[1].abs().max(s[2].abs()),
    )
    .map(|(times, states)| ReducedTrajectory {
        times,
        data: TrajectoryData::Polar(states),
        kind: SystemKind::Polar,
    })
}

/// Integrate the averaged radial system ṙ± = ε Re(p₁) r± + Re(p₂) r±³
/// (sine) or ṙ± = ε Re(q₁) r± + q₂ r±² (second harmonic).
pub fn integrate_averaged(
    coeffs: &CmCoefficients,
    epsilon: f64,
    init: [f64; 2],
    t_end: f64,
    dt: f64,
) -> Result<ReducedTrajectory> {
    if init[0] < 0.0 || init[1] < 0.0 {
        return Err(CoreError::InvalidInput(
            "averaged radii must be nonnegative".into(),
        ));
    }
    let kind = match coeffs.terms {
        CmTerms::Sine { .. } => SystemKind::AveragedSine,
        CmTerms::SecondHarmonic { .. } => SystemKind::AveragedSecondHarmonic,
    };
    let field = |s: [f64; 2]| -> [f64; 2] {
        match coeffs.terms {
            CmTerms::Sine { p1, p2, .. } => [
                epsilon * p1.re * s[0] + p2.re * s[0].powi(3),
                epsilon * p1.re * s[1] + p2.re * s[1].powi(3),
            ],
            CmTerms::SecondHarmonic { q1, q2, .. } => [
                epsilon * q1.re * s[0] + q2.re * s[0] * s[0],
                epsilon * q1.re * s[1] + q2.re * s[1] * s[1],
            ],
        }
    };
    rk4_real(field, init, t_end, dt, kind, |s| s[0].max(s[1])).map(|(times, states)| {
        ReducedTrajectory {
            times,
            data: TrajectoryData::Averaged(states),
            kind,
        }
    })
}

fn rk4_real<const N: usize, F, M>(
    field: F,
    init: [f64; N],
    t_end: f64,
    dt: f64,
    _kind: SystemKind,
    magnitude: M,
) -> Result<(Vec<f64>, Vec<[f64; N]>)>
where
    F: Fn([f64; N]) -> [f64; N],
    M: Fn(&[f64; N]) -> f64,
{
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(CoreError::InvalidInput(
            "integration requires dt > 0 and t_end ≥ 0".into(),
        ));
    }
    let steps = (t_end / dt).round() as usize;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut s = init;
    times.push(0.0);
    states.push(s);
    for step in 1..=steps {
        let t = step as f64 * dt;
        let k1 = field(s);
        let k2 = field(shift(s, k1, dt / 2.0));
        let k3 = field(shift(s, k2, dt / 2.0));
        let k4 = field(shift(s, k3, dt));
        for i in 0..N {
            s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if magnitude(&s) > ALPHA_LIMIT {
            return Err(CoreError::Overflow {
                t,
                limit: ALPHA_LIMIT,
            });
        }
        times.push(t);
        states.push(s);
    }
    Ok((times, states))
}

fn shift<const N: usize>(s: [f64; N], k: [f64; N], dt: f64) -> [f64; N] {
    let mut out = s;
    for i in 0..N {
        out[i] += dt * k[i];
    }
    out
}

/// Write a full-system trajectory as CSV with the fixed header
/// `t,re_alpha_plus,im_alpha_plus,re_alpha_minus,im_alpha_minus`.
pub fn write_trajectory_csv<W: std::io::Write>(
    trajectory: &ReducedTrajectory,
    out: &mut W,
) -> std::io::Result<()> {
    writeln!(out, "t,re_alpha_plus,im_alpha_plus,re_alpha_minus,im_alpha_minus")?;
    let TrajectoryData::Complex(states) = &trajectory.data else {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "trajectory CSV is defined for the full complex system",
        ));
    };
    for (t, s) in trajectory.times.iter().zip(states) {
        writeln!(
            out,
            "{t},{},{},{},{}",
            s.alpha_plus.re, s.alpha_plus.im, s.alpha_minus.re, s.alpha_minus.im
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::center_manifold::{coefficients_second_harmonic, coefficients_sine};
    use crate::distributions::AnalyticDistribution;
    use approx::assert_abs_diff_eq;

    fn sine_coeffs() -> CmCoefficients {
        let dist = AnalyticDistribution::bimodal_lorentzian(2.0).unwrap();
        coefficients_sine(&dist).unwrap()
    }

    #[test]
    fn neutral_rotation_at_onset() {
        let coeffs = sine_coeffs();
        let init = CenterState::new(
            Complex64::new(0.01, 0.0),
            Complex64::new(0.01, 0.0),
        );
        let traj = integrate_center_manifold(&coeffs, 0.0, init, 20.0, 0.005).unwrap();
        let TrajectoryData::Complex(states) = &traj.data else {
            unreachable!()
        };
        // At ε = 0 the linear part is a neutral rotation; |α±| drifts only
        // at the cubic order ~ |α|³ t.
        let last = states.last().unwrap();
        assert_abs_diff_eq!(last.alpha_plus.norm(), 0.01, epsilon = 1e-4);
        assert_abs_diff_eq!(last.alpha_minus.norm(), 0.01, epsilon = 1e-4);

        // The phase advances at the onset frequency: α₊(t) ≈ 0.01 e^{iy_c t}.
        let mid = &states[states.len() / 2];
        let t_mid = traj.times[states.len() / 2];
        let unit = mid.alpha_plus / mid.alpha_plus.norm();
        let expected = Complex64::from_polar(1.0, coeffs.y_c * t_mid);
        assert!((unit - expected).norm() < 0.05);
    }

    #[test]
    fn supercritical_trajectory_reaches_averaged_radius() {
        let coeffs = sine_coeffs();
        let init = CenterState::new(
            Complex64::new(0.01, 0.0),
            Complex64::new(0.008, 0.004),
        );
        let traj =
            integrate_center_manifold(&coeffs, 0.16, init, 800.0, 0.01).unwrap();
        let mean = traj.late_mean_radius(0.25);
        assert!(
            (mean - 0.1).abs() < 0.01,
            "late-time |α₊| = {mean} vs averaged fixed point 0.1"
        );
    }

    #[test]
    fn rotational_equivariance_of_the_full_system() {
        let coeffs = sine_coeffs();
        let beta = 0.7;
        let rot = Complex64::from_polar(1.0, beta);
        let init = CenterState::new(
            Complex64::new(0.012, -0.003),
            Complex64::new(0.009, 0.006),
        );
        let rotated_init = CenterState::new(init.alpha_plus * rot, init.alpha_minus * rot);
        let base = integrate_center_manifold(&coeffs, 0.16, init, 200.0, 0.01).unwrap();
        let rotated =
            integrate_center_manifold(&coeffs, 0.16, rotated_init, 200.0, 0.01).unwrap();
        let (TrajectoryData::Complex(a), TrajectoryData::Complex(b)) =
            (&base.data, &rotated.data)
        else {
            unreachable!()
        };
        let mut worst: f64 = 0.0;
        for (sa, sb) in a.iter().zip(b) {
            worst = worst.max((sb.alpha_plus - sa.alpha_plus * rot).norm());
            worst = worst.max((sb.alpha_minus - sa.alpha_minus * rot).norm());
        }
        assert!(worst < 1e-10, "equivariance defect {worst:.3e}");
    }

    #[test]
    fn averaged_sine_converges_to_fixed_point() {
        let coeffs = sine_coeffs();
        let traj =
            integrate_averaged(&coeffs, 0.16, [0.01, 0.01], 2000.0, 0.01).unwrap();
        let TrajectoryData::Averaged(states) = &traj.data else {
            unreachable!()
        };
        let last = states.last().unwrap();
        assert_abs_diff_eq!(last[0], 0.1, epsilon = 1e-4);
        assert_abs_diff_eq!(last[1], 0.1, epsilon = 1e-4);
        // Radii stay nonnegative along the way.
        assert!(states.iter().all(|s| s[0] >= 0.0 && s[1] >= 0.0));
    }

    #[test]
    fn averaged_sine_decays_below_onset() {
        let coeffs = sine_coeffs();
        let traj =
            integrate_averaged(&coeffs, -0.1, [0.05, 0.03], 1500.0, 0.01).unwrap();
        let TrajectoryData::Averaged(states) = &traj.data else {
            unreachable!()
        };
        let last = states.last().unwrap();
        assert!(last[0] < 1e-8 && last[1] < 1e-8);
    }

    #[test]
    fn subcritical_second_harmonic_separatrix() {
        let dist = AnalyticDistribution::bimodal_lorentzian(2.0).unwrap();
        let coeffs = coefficients_second_harmonic(&dist, 0.5).unwrap();
        // ε < 0, q₂ > 0: r* separates decay from blow-up.
        let r_star = coeffs.r_star(-0.1).unwrap();
        let below =
            integrate_averaged(&coeffs, -0.1, [0.5 * r_star, 0.5 * r_star], 3000.0, 0.01)
                .unwrap();
        let TrajectoryData::Averaged(states) = &below.data else {
            unreachable!()
        };
        assert!(states.last().unwrap()[0] < 1e-6);

        let above = integrate_averaged(
            &coeffs,
            -0.1,
            [1.5 * r_star, 1.5 * r_star],
            3000.0,
            0.01,
        );
        assert!(matches!(above, Err(CoreError::Overflow { .. })));
    }

    #[test]
    fn polar_system_averages_to_radial_dynamics() {
        let coeffs = sine_coeffs();
        let traj = integrate_polar(&coeffs, 0.16, [0.0, 0.01, 0.01], 900.0, 0.005).unwrap();
        let TrajectoryData::Polar(states) = &traj.data else {
            unreachable!()
        };
        let tail = &states[(states.len() * 3 / 4)..];
        let mean_r: f64 = tail.iter().map(|s| s[1]).sum::<f64>() / tail.len() as f64;
        assert!(
            (mean_r - 0.1).abs() < 0.1 * 0.16 * 4.0,
            "polar late-time r₊ = {mean_r}"
        );
    }

    #[test]
    fn step_halving_changes_little() {
        let coeffs = sine_coeffs();
        let init = CenterState::new(Complex64::new(0.01, 0.0), Complex64::new(0.01, 0.0));
        let coarse = integrate_center_manifold(&coeffs, 0.16, init, 50.0, 0.01).unwrap();
        let fine = integrate_center_manifold(&coeffs, 0.16, init, 50.0, 0.005).unwrap();
        let (TrajectoryData::Complex(a), TrajectoryData::Complex(b)) =
            (&coarse.data, &fine.data)
        else {
            unreachable!()
        };
        let diff = (a.last().unwrap().alpha_plus - b.last().unwrap().alpha_plus).norm();
        assert!(diff < 1e-6, "step-halving difference {diff:.3e}");
    }

    #[test]
    fn overflow_is_reported() {
        // Subcritical second harmonic above the separatrix: the quadratic
        // term drives finite-time blow-up of the full system.
        let dist = AnalyticDistribution::bimodal_lorentzian(2.0).unwrap();
        let coeffs = coefficients_second_harmonic(&dist, 0.5).unwrap();
        let init = CenterState::new(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0));
        let out = integrate_center_manifold(&coeffs, -0.1, init, 50.0, 0.01);
        assert!(matches!(out, Err(CoreError::Overflow { .. })));
    }

    #[test]
    fn trajectory_csv_header_is_fixed() {
        let coeffs = sine_coeffs();
        let init = CenterState::new(Complex64::new(0.01, 0.0), Complex64::new(0.01, 0.0));
        let traj = integrate_center_manifold(&coeffs, 0.0, init, 0.1, 0.01).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "t,re_alpha_plus,im_alpha_plus,re_alpha_minus,im_alpha_minus\n"
        ));
    }
}
