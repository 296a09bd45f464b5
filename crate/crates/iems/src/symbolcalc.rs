//! Stability indicators from semi-generating functions.
//!
//! A coefficient vector `(c_0, …, c_m)` induces the trigonometric symbol
//!
//! ```text
//! c(θ) = Σ_{j=0}^{m} c_j e^{ijθ},    θ ∈ [0, 2π),
//! ```
//!
//! and the three vectors of a scheme triad give `a(θ)`, `b(θ)`, `c(θ)`.
//! The stability of the implicit-explicit scheme is governed by three
//! scalar indicators extracted from these symbols:
//!
//! ```text
//! σ_F = max_θ 1/|a(θ)|,   σ_E = max_θ |c(θ)/a(θ)|,   λ_I = min_θ Re[b(θ)/a(θ)],
//! ```
//!
//! together with the intensity `𝔍 = λ_I/σ_E`, which is at most 1 for any
//! consistent scheme and equals 1 exactly for the one-step Euler scheme.
//! Since the coefficients are real, every symbol satisfies
//! `c(2π−θ) = conj(c(θ))`, so all three extremizations are carried out on
//! the half-domain `[0, π]`.
//!
//! Extrema are located by dense sampling (default 8192 points) followed by
//! golden-section refinement on the bracketing interval. The symbols are
//! trigonometric polynomials of degree at most `k+1 ≤ 9`, so the grid
//! over-resolves every oscillation and the bracket always contains the
//! local extremum.

use rayon::prelude::*;

use crate::schemes::{make_scheme, Family, SchemeError, SchemeTriad};
use num_complex::Complex64;
use thiserror::Error;

/// Default number of sampling intervals on `[0, π]`.
pub const DEFAULT_GRID: usize = 8192;
/// Golden-section refinement tolerance in θ.
pub const REFINE_TOL: f64 = 1e-13;
/// `|a(θ)|` below this is treated as a zero of the symbol on the circle.
pub const VANISH_TOL: f64 = 1e-12;
/// Reported indicator values are rounded to this granularity, consistent
/// with double precision on degree-≤9 trigonometric rationals.
pub const REPORT_GRANULARITY: f64 = 1e-12;

/// Errors from symbol extremization.
#[derive(Debug, Error)]
pub enum SymbolError {
    /// `|a(θ)|` dropped below [`VANISH_TOL`] at a grid point, so the
    /// indicators are unbounded.
    #[error("symbol vanishes on unit circle (|a({theta:.6})| = {modulus:.3e})")]
    VanishesOnCircle {
        /// Offending angle.
        theta: f64,
        /// Modulus observed there.
        modulus: f64,
    },
    /// Scheme construction failed during a parameter sweep.
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// A real-coefficient trigonometric symbol `Σ_j coeffs[j] e^{ijθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSymbol {
    /// Coefficients, index `j` multiplying `e^{ijθ}`.
    pub coeffs: Vec<f64>,
    /// When true, the coefficient sum is exactly 1 by construction and the
    /// symbol is evaluated in the anchored form `1 + Σ_j coeffs[j](e^{ijθ}−1)`.
    pub unit_sum: bool,
}

impl TrigSymbol {
    /// Builds a symbol from a coefficient slice.
    pub fn new(coeffs: &[f64]) -> TrigSymbol {
        TrigSymbol { coeffs: coeffs.to_vec(), unit_sum: false }
    }

    /// Builds a symbol whose coefficients sum to 1 in exact arithmetic.
    ///
    /// Scheme coefficient vectors are consistent (unit sum), but their
    /// individually rounded entries need not add to 1 in floating point; for
    /// sharply parameterized high-order schemes the entries reach ~1e7 and the
    /// plain Horner sum at θ = 0 drifts by ~1e-9. Anchoring the evaluation at
    /// the exact value 1 keeps the indicator inequalities (σ_F, σ_E ≥ 1,
    /// 𝔍 ≤ 1) intact at working precision, since their extremes are attained
    /// or bounded at θ = 0.
    pub fn new_unit_sum(coeffs: &[f64]) -> TrigSymbol {
        TrigSymbol { coeffs: coeffs.to_vec(), unit_sum: true }
    }

    /// Evaluates the symbol at angle θ.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let z = Complex64::new(theta.cos(), theta.sin());
        if self.unit_sum {
            let mut acc = Complex64::new(1.0, 0.0);
            let mut zp = Complex64::new(1.0, 0.0);
            for &cj in &self.coeffs {
                acc += cj * (zp - 1.0);
                zp *= z;
            }
            acc
        } else {
            let mut acc = Complex64::new(0.0, 0.0);
            for &cj in self.coeffs.iter().rev() {
                acc = acc * z + cj;
            }
            acc
        }
    }
}

/// Selects one of the three symbols of a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymbolKind {
    /// Implicit time-difference symbol `a(θ)` (length k).
    A,
    /// Implicit operator symbol `b(θ)` (length k+1).
    B,
    /// Explicit nonlinearity symbol `c(θ)` (length k).
    C,
}

/// Returns the requested symbol of a scheme triad.
pub fn symbol_of(scheme: &SchemeTriad, which: SymbolKind) -> TrigSymbol {
    match which {
        SymbolKind::A => TrigSymbol::new_unit_sum(&scheme.a),
        SymbolKind::B => TrigSymbol::new_unit_sum(&scheme.b),
        SymbolKind::C => TrigSymbol::new_unit_sum(&scheme.c),
    }
}

/// The four stability indicators with their extremizing angles.
#[derive(Debug, Clone)]
pub struct IndicatorReport {
    /// `max_θ 1/|a(θ)|`; at least 1 for consistent schemes.
    pub sigma_f: f64,
    /// `max_θ |c(θ)/a(θ)|`; at least 1 for consistent schemes.
    pub sigma_e: f64,
    /// `min_θ Re[b(θ)/a(θ)]`; at most 1, may be non-positive.
    pub lambda_i: f64,
    /// `lambda_i / sigma_e`; at most 1.
    pub intensity: f64,
    /// Angle attaining σ_F, in `[0, π]`.
    pub theta_f: f64,
    /// Angle attaining σ_E, in `[0, π]`.
    pub theta_e: f64,
    /// Angle attaining λ_I, in `[0, π]`.
    pub theta_i: f64,
    /// Number of sampling intervals used on `[0, π]`.
    pub grid_size: usize,
    /// Whether golden-section refinement was applied.
    pub refined: bool,
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

/// Maximizes `f` over `[0, π]`: dense grid, then refinement around the best
/// sample. Returns `(θ*, f(θ*))`.
fn maximize(f: impl Fn(f64) -> f64 + Copy, grid: usize) -> (f64, f64) {
    let h = std::f64::consts::PI / grid as f64;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=grid {
        let v = f(i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = best_i.saturating_sub(1) as f64 * h;
    let hi = ((best_i + 1).min(grid)) as f64 * h;
    let (theta, val) = golden_max(f, lo, hi, REFINE_TOL);
    if val >= best {
        (theta, val)
    } else {
        (best_i as f64 * h, best)
    }
}

fn round_report(v: f64) -> f64 {
    (v / REPORT_GRANULARITY).round() * REPORT_GRANULARITY
}

/// Computes σ_F, σ_E, λ_I and 𝔍 for a scheme by sampling `[0, π]` with
/// `grid_size` intervals and refining each extremum.
///
/// Fails if `|a(θ)|` vanishes (below [`VANISH_TOL`]) anywhere on the grid;
/// that happens exactly when the implicit difference polynomial has a root
/// on the unit circle, outside the zero-stable parameter range.
pub fn indicators(scheme: &SchemeTriad, grid_size: usize) -> Result<IndicatorReport, SymbolError> {
    let a = symbol_of(scheme, SymbolKind::A);
    let b = symbol_of(scheme, SymbolKind::B);
    let c = symbol_of(scheme, SymbolKind::C);

    let h = std::f64::consts::PI / grid_size as f64;
    for i in 0..=grid_size {
        let theta = i as f64 * h;
        let m = a.eval(theta).norm();
        if m < VANISH_TOL {
            return Err(SymbolError::VanishesOnCircle { theta, modulus: m });
        }
    }

    let inv_a = |theta: f64| 1.0 / a.eval(theta).norm();
    let c_over_a = |theta: f64| c.eval(theta).norm() / a.eval(theta).norm();
    let neg_re_b_over_a = |theta: f64| -(b.eval(theta) / a.eval(theta)).re;

    let (theta_f, sigma_f) = maximize(&inv_a, grid_size);
    let (theta_e, sigma_e) = maximize(&c_over_a, grid_size);
    let (theta_i, neg_lambda) = maximize(&neg_re_b_over_a, grid_size);

    let sigma_f = round_report(sigma_f);
    let sigma_e = round_report(sigma_e);
    let lambda_i = round_report(-neg_lambda);
    Ok(IndicatorReport {
        sigma_f,
        sigma_e,
        lambda_i,
        intensity: lambda_i / sigma_e,
        theta_f,
        theta_e,
        theta_i,
        grid_size,
        refined: true,
    })
}

/// Maximum of `Re[b(θ)/a(θ)]` over `[0, π]`; the counterpart of λ_I used
/// for upper spectral bounds on the composite Toeplitz operator.
pub fn max_re_b_over_a(scheme: &SchemeTriad, grid_size: usize) -> f64 {
    let a = symbol_of(scheme, SymbolKind::A);
    let b = symbol_of(scheme, SymbolKind::B);
    let f = |theta: f64| (b.eval(theta) / a.eval(theta)).re;
    maximize(&f, grid_size).1
}

/// Result of a parameter sweep over one family/order.
#[derive(Debug, Clone)]
pub struct SweepReport {
    /// `(parameter, report)` pairs in input order.
    pub entries: Vec<(f64, IndicatorReport)>,
    /// Parameter attaining the largest λ_I.
    pub argmax_lambda: f64,
    /// Largest λ_I over the grid.
    pub max_lambda: f64,
    /// Parameter attaining the largest intensity.
    pub argmax_intensity: f64,
    /// Largest intensity over the grid.
    pub max_intensity: f64,
}

/// Computes indicators for every parameter in `param_grid` (in parallel)
/// and reports the argmax of λ_I and of 𝔍 over the grid.
pub fn indicator_sweep(
    family: Family,
    k: usize,
    param_grid: &[f64],
) -> Result<SweepReport, SymbolError> {
    let entries: Vec<(f64, IndicatorReport)> = param_grid
        .par_iter()
        .map(|&p| {
            let scheme = make_scheme(family, k, p)?;
            Ok((p, indicators(&scheme, DEFAULT_GRID)?))
        })
        .collect::<Result<_, SymbolError>>()?;
    let (argmax_lambda, max_lambda) = entries
        .iter()
        .map(|(p, r)| (*p, r.lambda_i))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("sweep over a non-empty grid");
    let (argmax_intensity, max_intensity) = entries
        .iter()
        .map(|(p, r)| (*p, r.intensity))
        .max_by(|x, y| x.1.total_cmp(&y.1))
        .expect("sweep over a non-empty grid");
    Ok(SweepReport { entries, argmax_lambda, max_lambda, argmax_intensity, max_intensity })
}

/// Uniform samples of the three indicator integrands on `[0, π]`.
#[derive(Debug, Clone)]
pub struct ThetaCurves {
    /// Sample angles.
    pub theta: Vec<f64>,
    /// `1/|a(θ)|` samples.
    pub inv_abs_a: Vec<f64>,
    /// `|c(θ)/a(θ)|` samples.
    pub abs_c_over_a: Vec<f64>,
    /// `Re[b(θ)/a(θ)]` samples.
    pub re_b_over_a: Vec<f64>,
}

impl ThetaCurves {
    /// Renders the curves as CSV with 17-significant-digit decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,inv_abs_a,abs_c_over_a,re_b_over_a\n");
        for i in 0..self.theta.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.theta[i], self.inv_abs_a[i], self.abs_c_over_a[i], self.re_b_over_a[i]
            ));
        }
        out
    }
}

/// Samples the three indicator integrands at `n_points` uniform angles on
/// `[0, π]` (endpoints included). Fails where `|a(θ)|` vanishes.
pub fn theta_curves(scheme: &SchemeTriad, n_points: usize) -> Result<ThetaCurves, SymbolError> {
    assert!(n_points >= 2, "need at least the two endpoint samples");
    let a = symbol_of(scheme, SymbolKind::A);
    let b = symbol_of(scheme, SymbolKind::B);
    let c = symbol_of(scheme, SymbolKind::C);
    let mut curves = ThetaCurves {
        theta: Vec::with_capacity(n_points),
        inv_abs_a: Vec::with_capacity(n_points),
        abs_c_over_a: Vec::with_capacity(n_points),
        re_b_over_a: Vec::with_capacity(n_points),
    };
    for i in 0..n_points {
        let theta = std::f64::consts::PI * i as f64 / (n_points - 1) as f64;
        let av = a.eval(theta);
        let m = av.norm();
        if m < VANISH_TOL {
            return Err(SymbolError::VanishesOnCircle { theta, modulus: m });
        }
        curves.theta.push(theta);
        curves.inv_abs_a.push(1.0 / m);
        curves.abs_c_over_a.push(c.eval(theta).norm() / m);
        curves.re_b_over_a.push((b.eval(theta) / av).re);
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::{make_scheme, Family, SchemeTriad};

    /// Absolute tolerance for closed-form indicator matches.
    const CLOSED_FORM_TOL: f64 = 1e-9;

    #[test]
    fn euler_symbols_are_constant_one() {
        let euler = SchemeTriad::euler();
        for kind in [SymbolKind::A, SymbolKind::B, SymbolKind::C] {
            let s = symbol_of(&euler, kind);
            for theta in [0.0, 1.0, 2.5, std::f64::consts::PI] {
                let v = s.eval(theta);
                assert!((v.re - 1.0).abs() < 1e-15 && v.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn wbdf2_explicit_symbol_at_alpha_one() {
        // c(θ) = (1+α) − α e^{iθ} at α = 1 is 2 − e^{iθ}.
        let s = make_scheme(Family::Wbdf, 2, 1.0).unwrap();
        let c = symbol_of(&s, SymbolKind::C);
        for theta in [0.3f64, 1.7, 2.9] {
            let expect = Complex64::new(2.0 - theta.cos(), -theta.sin());
            assert!((c.eval(theta) - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn bdf2_implicit_symbol_alternating_sum() {
        let s = make_scheme(Family::Bdf, 2, 0.0).unwrap();
        let a = symbol_of(&s, SymbolKind::A);
        let v = a.eval(std::f64::consts::PI);
        assert!((v.re - 2.0).abs() < 1e-14 && v.im.abs() < 1e-14);
    }

    #[test]
    fn euler_indicators_all_one() {
        let r = indicators(&SchemeTriad::euler(), DEFAULT_GRID).unwrap();
        assert!((r.sigma_f - 1.0).abs() < 1e-12);
        assert!((r.sigma_e - 1.0).abs() < 1e-12);
        assert!((r.lambda_i - 1.0).abs() < 1e-12);
        assert!((r.intensity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wbdf2_closed_forms() {
        for alpha in [1.0, 2.0, 3.0, 5.0, 8.0] {
            let s = make_scheme(Family::Wbdf, 2, alpha).unwrap();
            let r = indicators(&s, DEFAULT_GRID).unwrap();
            assert!((r.sigma_f - 1.0).abs() < CLOSED_FORM_TOL, "sigma_f alpha={alpha}");
            assert!(
                (r.sigma_e - (2.0 * alpha + 1.0) / (2.0 * alpha)).abs() < CLOSED_FORM_TOL,
                "sigma_e alpha={alpha}"
            );
            assert!(
                (r.lambda_i - (2.0 * alpha - 1.0) / (2.0 * alpha)).abs() < CLOSED_FORM_TOL,
                "lambda_i alpha={alpha}"
            );
            assert!(
                (r.intensity - (2.0 * alpha - 1.0) / (2.0 * alpha + 1.0)).abs() < CLOSED_FORM_TOL,
                "intensity alpha={alpha}"
            );
        }
    }

    #[test]
    fn gbdf3_sigma_e_equality_and_lambda_bounds() {
        let beta = 2.0;
        let s = make_scheme(Family::Gbdf, 3, beta).unwrap();
        let r = indicators(&s, DEFAULT_GRID).unwrap();
        let den = 6.0 * beta * beta + 6.0 * beta - 2.0;
        assert!((r.sigma_e - (6.0 * beta * beta + 12.0 * beta + 3.0) / den).abs() < CLOSED_FORM_TOL);
        let lo = (6.0 * beta * beta - 4.0) / den;
        let hi = (6.0 * beta * beta - 3.0) / den;
        assert!(r.lambda_i >= lo - 1e-12 && r.lambda_i <= hi + 1e-12, "lambda_i = {}", r.lambda_i);
    }

    #[test]
    fn unstable_parameter_reports_vanishing_symbol() {
        // WBDF2 at α = 1/2 puts a root of the b-polynomial on the circle;
        // the a-symbol stays fine, so indicators still succeed — instead
        // drive a(θ) itself to a circle zero with a custom triad.
        let s = SchemeTriad::custom(vec![0.5, 0.5], vec![0.5, 0.25, 0.25], vec![1.5, -0.5]).unwrap();
        match indicators(&s, DEFAULT_GRID) {
            Err(SymbolError::VanishesOnCircle { .. }) => {}
            other => panic!("expected vanishing-symbol error, got {other:?}"),
        }
    }

    #[test]
    fn intensity_identity_and_bounds_across_catalog() {
        for (family, k) in crate::schemes::catalog() {
            let p = crate::schemes::representative_param(family, k);
            let s = make_scheme(family, k, p).unwrap();
            let r = indicators(&s, DEFAULT_GRID).unwrap();
            assert!(r.sigma_f >= 1.0 - 1e-10, "{family:?} k={k}");
            assert!(r.sigma_e >= 1.0 - 1e-10, "{family:?} k={k}");
            assert!(r.lambda_i <= 1.0 + 1e-10, "{family:?} k={k}");
            assert!(r.intensity <= 1.0 + 1e-10, "{family:?} k={k}");
            assert!((r.intensity * r.sigma_e - r.lambda_i).abs() < 1e-14, "{family:?} k={k}");
        }
    }

    #[test]
    fn wbdf2_intensity_monotone_in_alpha() {
        let mut prev = f64::NEG_INFINITY;
        for alpha in [1.0, 2.0, 4.0, 8.0, 16.0] {
            let r =
                indicators(&make_scheme(Family::Wbdf, 2, alpha).unwrap(), DEFAULT_GRID).unwrap();
            assert!(r.intensity > prev, "intensity not increasing at alpha={alpha}");
            prev = r.intensity;
        }
    }

    #[test]
    fn mbdf2_sweep_argmax_lambda() {
        let grid: Vec<f64> = (2..=10).map(|s| s as f64).collect();
        let sweep = indicator_sweep(Family::Mbdf, 2, &grid).unwrap();
        assert_eq!(sweep.argmax_lambda, 5.0);
        assert!((sweep.max_lambda - 2.0 / 3.0).abs() < CLOSED_FORM_TOL);
    }

    #[test]
    fn nimex2_sweep_max_intensity() {
        let grid: Vec<f64> = (0..=60).map(|i| 8.2 + 0.01 * i as f64).collect();
        let sweep = indicator_sweep(Family::Nimex, 2, &grid).unwrap();
        assert!((sweep.max_intensity - 0.795354).abs() < 1e-4, "got {}", sweep.max_intensity);
    }

    #[test]
    fn theta_curves_euler_and_csv_header() {
        let curves = theta_curves(&SchemeTriad::euler(), 33).unwrap();
        for i in 0..33 {
            assert!((curves.inv_abs_a[i] - 1.0).abs() < 1e-14);
            assert!((curves.abs_c_over_a[i] - 1.0).abs() < 1e-14);
            assert!((curves.re_b_over_a[i] - 1.0).abs() < 1e-14);
        }
        let csv = curves.to_csv();
        assert!(csv.starts_with("theta,inv_abs_a,abs_c_over_a,re_b_over_a\n"));
    }

    #[test]
    fn curve_endpoint_values_match_hand_computation() {
        // WBDF2 at α = 1: Re[b/a] at θ = π is b(−1)/a(−1) = 1/2.
        let s = make_scheme(Family::Wbdf, 2, 1.0).unwrap();
        let curves = theta_curves(&s, 5).unwrap();
        assert!((curves.re_b_over_a[4] - 0.5).abs() < 1e-12);
        // BDF3 at θ = π: (6α−3)/(12α−2) at α = 1 is 3/10.
        let s3 = make_scheme(Family::Wbdf, 3, 1.0).unwrap();
        let c3 = theta_curves(&s3, 5).unwrap();
        assert!((c3.re_b_over_a[4] - 0.3).abs() < 1e-12);
    }

    #[test]
    fn conjugate_symmetry_of_symbols() {
        let s = make_scheme(Family::Siems, 4, 2.0).unwrap();
        let a = symbol_of(&s, SymbolKind::A);
        for i in 0..16 {
            let theta = 0.2 + 0.17 * i as f64;
            let v1 = a.eval(theta);
            let v2 = a.eval(2.0 * std::f64::consts::PI - theta);
            assert!((v1 - v2.conj()).norm() < 1e-12);
        }
    }
}
