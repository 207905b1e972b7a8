//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 7/15-point Gauss-Kronrod pair drives worst-panel-first bisection on a
//! finite interval. Integrals over the whole real line are mapped through
//! ω = tan u, dω = (1 + ω²) du, which turns the quadratically decaying
//! integrands of this crate into π-periodic analytic functions of u; the
//! same map also generates the fixed Galerkin grids used by the simulators.

use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// 15-point Kronrod abscissae on [-1, 1] (non-negative half).
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
];

/// 15-point Kronrod weights, matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224,
    0.06309209262997855,
    0.10479001032225018,
    0.14065325971552592,
    0.1690047266392679,
    0.1903505780647854,
    0.20443294007529889,
    0.20948214108472782,
];

/// 7-point Gauss weights for the odd-indexed abscissae of `XGK`.
const WG: [f64; 4] = [
    0.1294849661688697,
    0.2797053914892766,
    0.3818300505051189,
    0.4179591836734694,
];

/// Accuracy and cost limits for one adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    /// Absolute tolerance on the summed panel error estimates.
    pub abs_tol: f64,
    /// Hard cap on the number of panels before giving up.
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_panels: 4000,
        }
    }
}

impl QuadConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

/// One Gauss-Kronrod evaluation on [a, b].
fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;

    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += wk * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }

    let value = half * kronrod;
    // |K15 - G7| is a conservative estimate of the Kronrod error.
    let error = (half.abs()) * (kronrod - gauss).norm();
    Panel { a, b, value, error }
}

/// Adaptive integration of a complex-valued integrand over [a, b].
pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(CoreError::InvalidInput(
            "integrate_complex requires finite endpoints".into(),
        ));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }

    let mut panels = vec![gk15(&mut f, a, b)];
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= cfg.abs_tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= cfg.max_panels {
            return Err(CoreError::QuadratureFailure(format!(
                "error estimate {total_err:.3e} above tolerance {:.3e} after {} panels",
                cfg.abs_tol,
                panels.len()
            )));
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("panel list is never empty");
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval no longer splittable in f64; accept what we have.
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        panels[worst] = gk15(&mut f, a, mid);
        panels.push(gk15(&mut f, mid, b));
    }
}

/// Adaptive integration of a real-valued integrand over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    integrate_complex(|x| Complex64::new(f(x), 0.0), a, b, cfg).map(|v| v.re)
}

/// ∫_{-∞}^{∞} f(ω) dω via the substitution ω = tan u.
pub fn integrate_real_line_complex<F: FnMut(f64) -> Complex64>(
    mut f: F,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    integrate_complex(
        |u| {
            let w = u.tan();
            f(w) * (1.0 + w * w)
        },
        -std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_2,
        cfg,
    )
}

/// Real-valued variant of [`integrate_real_line_complex`].
pub fn integrate_real_line<F: FnMut(f64) -> f64>(mut f: F, cfg: &QuadConfig) -> Result<f64> {
    integrate_real_line_complex(|w| Complex64::new(f(w), 0.0), cfg).map(|v| v.re)
}

/// ∫_0^{∞} f(ω) dω via ω = tan u on (0, π/2).
pub fn integrate_half_line<F: FnMut(f64) -> f64>(mut f: F, cfg: &QuadConfig) -> Result<f64> {
    integrate(
        |u| {
            let w = u.tan();
            f(w) * (1.0 + w * w)
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        cfg,
    )
}
