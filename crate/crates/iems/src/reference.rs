//! Closed-form indicator values and bounds for the scheme families.
//!
//! Analytical expressions exist for many of the stability indicators:
//! equalities for the low-order WBDF/GBDF/SIEMS schemes, two-sided or
//! one-sided bounds for the higher orders, and a handful of distinguished
//! optima of λ_I and 𝔍 over the family parameter. They are collected here
//! so the `tables` command and the verification suite can compare computed
//! indicators against them. All functions take the family parameter and
//! return plain `f64` values; `None`/absent entries mean no closed form is
//! known for that slot.

/// A closed-form value or a two-sided bound for one indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FormValue {
    /// Proven equality.
    Exact(f64),
    /// Proven or numerically supported containment interval.
    Bounds(f64, f64),
}

impl FormValue {
    /// Whether `v` matches the closed form within `tol` (equality) or lies
    /// inside the bounds widened by `tol`.
    pub fn check(&self, v: f64, tol: f64) -> bool {
        match *self {
            FormValue::Exact(x) => (v - x).abs() <= tol,
            FormValue::Bounds(lo, hi) => v >= lo - tol && v <= hi + tol,
        }
    }
}

/// Closed forms for one scheme at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForms {
    /// σ_F form, when known.
    pub sigma_f: Option<FormValue>,
    /// σ_E form, when known.
    pub sigma_e: Option<FormValue>,
    /// λ_I form, when known.
    pub lambda_i: Option<FormValue>,
    /// 𝔍 form, when known.
    pub intensity: Option<FormValue>,
}

impl ClosedForms {
    fn none() -> ClosedForms {
        ClosedForms { sigma_f: None, sigma_e: None, lambda_i: None, intensity: None }
    }
}

/// WBDF closed forms (equalities for k ≤ 4, two-sided bounds for k = 5).
pub fn wbdf_forms(k: usize, al: f64) -> ClosedForms {
    use FormValue::{Bounds, Exact};
    match k {
        2 => ClosedForms {
            sigma_f: Some(Exact(1.0)),
            sigma_e: Some(Exact((2.0 * al + 1.0) / (2.0 * al))),
            lambda_i: Some(Exact((2.0 * al - 1.0) / (2.0 * al))),
            intensity: Some(Exact((2.0 * al - 1.0) / (2.0 * al + 1.0))),
        },
        3 => ClosedForms {
            sigma_f: Some(Exact(1.0)),
            sigma_e: Some(Exact(3.0 * (6.0 * al + 1.0) / (2.0 * (6.0 * al - 1.0)))),
            lambda_i: Some(Exact(3.0 * (2.0 * al - 1.0) / (2.0 * (6.0 * al - 1.0)))),
            intensity: Some(Exact((2.0 * al - 1.0) / (6.0 * al + 1.0))),
        },
        4 => ClosedForms {
            sigma_f: Some(Exact(1.0)),
            sigma_e: Some(Exact(3.0 * (14.0 * al + 1.0) / (4.0 * (5.0 * al - 1.0)))),
            lambda_i: Some(Exact(3.0 * (2.0 * al - 1.0) / (4.0 * (5.0 * al - 1.0)))),
            intensity: Some(Exact(3.0 * (2.0 * al - 1.0) / (3.0 * (14.0 * al + 1.0)))),
        },
        5 => {
            let d = 5.0 * al - 1.0;
            ClosedForms {
                sigma_f: Some(Bounds(1.0, (24.0 * al - 1.0) / (20.0 * al))),
                sigma_e: Some(Bounds(
                    15.0 * (30.0 * al + 1.0) / (32.0 * d),
                    15.0 * (15.0 * al + 2.0) / (16.0 * d),
                )),
                lambda_i: Some(Bounds(
                    (15.0 * al - 13.0) / (16.0 * d),
                    15.0 * (2.0 * al - 1.0) / (32.0 * d),
                )),
                intensity: Some(Bounds(
                    (15.0 * al - 13.0) / (15.0 * (15.0 * al + 2.0)),
                    (2.0 * al - 1.0) / (30.0 * al + 1.0),
                )),
            }
        }
        _ => ClosedForms::none(),
    }
}

/// GBDF closed forms: equalities for k ∈ {2, 3} (λ_I and 𝔍 two-sided for
/// k = 3), bounds for k ∈ {4, 5}; k = 5 switches branch at β = 18.
pub fn gbdf_forms(k: usize, b: f64) -> ClosedForms {
    use FormValue::{Bounds, Exact};
    match k {
        2 => ClosedForms {
            sigma_f: Some(Exact(1.0)),
            sigma_e: Some(Exact((2.0 * b + 1.0) / (2.0 * b))),
            lambda_i: Some(Exact((2.0 * b - 1.0) / (2.0 * b))),
            intensity: Some(Exact((2.0 * b - 1.0) / (2.0 * b + 1.0))),
        },
        3 => {
            let den = 6.0 * b * b + 6.0 * b - 2.0;
            ClosedForms {
                sigma_f: Some(Exact(1.0)),
                sigma_e: Some(Exact((6.0 * b * b + 12.0 * b + 3.0) / den)),
                lambda_i: Some(Bounds((6.0 * b * b - 4.0) / den, (6.0 * b * b - 3.0) / den)),
                intensity: Some(Bounds(
                    (6.0 * b * b - 4.0) / (6.0 * b * b + 12.0 * b + 3.0),
                    (6.0 * b * b - 3.0) / (6.0 * b * b + 12.0 * b + 3.0),
                )),
            }
        }
        4 => {
            let den = 4.0 * (b * b * b + 3.0 * b * b + b - 1.0);
            let se = (4.0 * b.powi(3) + 19.0 * b * b + 20.0 * b + 3.0) / den;
            let li = (4.0 * b.powi(3) + 5.0 * b * b - 4.0 * b - 3.0) / den;
            ClosedForms {
                sigma_f: Some(Bounds(1.0, (11.0 * b - 1.0) / (10.0 * b))),
                sigma_e: Some(Bounds(1.0, se)),
                lambda_i: Some(Bounds(li, 1.0)),
                intensity: Some(Bounds(
                    (4.0 * b.powi(3) + 5.0 * b * b - 4.0 * b - 3.0)
                        / (4.0 * b.powi(3) + 19.0 * b * b + 20.0 * b + 3.0),
                    1.0,
                )),
            }
        }
        5 => {
            let den = 10.0 * b.powi(4) + 60.0 * b.powi(3) + 90.0 * b * b - 32.0;
            let (se_num, li_num) = if b < 18.0 {
                (
                    2.0 * b.powi(4) + 30.0 * b.powi(3) + 32.0 * b * b + 38.0 * b + 5.0,
                    2.0 * b.powi(4) + b.powi(3) + 4.0 * b * b - 4.0 * b - 2.0,
                )
            } else {
                (
                    2.0 * b.powi(4) + 21.0 * b.powi(3) + 29.0 * b * b + 38.0 * b + 5.0,
                    2.0 * b.powi(4) + 3.0 * b.powi(3) + 25.0 * b * b - 9.0 * b - 3.0,
                )
            };
            ClosedForms {
                sigma_f: Some(FormValue::Bounds(1.0, (20.0 * b - 1.0) / (10.0 * b))),
                sigma_e: Some(FormValue::Bounds(1.0, 5.0 * se_num / den)),
                lambda_i: Some(FormValue::Bounds(5.0 * li_num / den, 1.0)),
                intensity: Some(FormValue::Bounds(li_num / se_num, 1.0)),
            }
        }
        _ => ClosedForms::none(),
    }
}

/// SIEMS λ_I equalities for 2 ≤ k ≤ 8.
pub fn siems_lambda(k: usize, g: f64) -> Option<f64> {
    let p = 2.0 * g - 1.0;
    match k {
        2 => Some(p / (2.0 * g)),
        3 => Some(3.0 * p * p / (12.0 * g * g - 2.0)),
        4 => Some(3.0 * p.powi(3) / (4.0 * (6.0 * g.powi(3) - 3.0 * g + 1.0))),
        5 => Some(
            15.0 * p.powi(4)
                / (16.0 * (15.0 * g.powi(4) - 15.0 * g * g + 10.0 * g - 2.0)),
        ),
        6 => Some(
            15.0 * p.powi(5)
                / (16.0
                    * (30.0 * g.powi(5) - 50.0 * g.powi(3) + 50.0 * g * g - 20.0 * g + 3.0)),
        ),
        7 => Some(
            105.0 * p.powi(6)
                / (16.0
                    * (420.0 * g.powi(6) - 1050.0 * g.powi(4) + 1400.0 * g.powi(3)
                        - 840.0 * g * g
                        + 252.0 * g
                        - 31.0)),
        ),
        8 => Some(
            105.0 * p.powi(7)
                / (32.0
                    * (420.0 * g.powi(7) - 1470.0 * g.powi(5) + 2450.0 * g.powi(4)
                        - 1960.0 * g.powi(3)
                        + 882.0 * g * g
                        - 217.0 * g
                        + 23.0)),
        ),
        _ => None,
    }
}

/// SIEMS 𝔍 equalities for 2 ≤ k ≤ 8.
pub fn siems_intensity(k: usize, g: f64) -> Option<f64> {
    let p = 2.0 * g - 1.0;
    match k {
        2 => Some(p / (2.0 * g + 1.0)),
        3 => Some(p * p / (4.0 * g * g + 4.0 * g - 1.0)),
        4 => Some(p.powi(3) / (8.0 * g.powi(3) + 12.0 * g * g - 6.0 * g + 1.0)),
        5 => Some(
            p.powi(4) / (16.0 * g.powi(4) + 32.0 * g.powi(3) - 24.0 * g * g + 8.0 * g - 1.0),
        ),
        6 => Some(
            p.powi(5)
                / (32.0 * g.powi(5) + 80.0 * g.powi(4) - 80.0 * g.powi(3) + 40.0 * g * g
                    - 10.0 * g
                    + 1.0),
        ),
        7 => Some(
            p.powi(6)
                / (64.0 * g.powi(6) + 192.0 * g.powi(5) - 240.0 * g.powi(4)
                    + 160.0 * g.powi(3)
                    - 60.0 * g * g
                    + 12.0 * g
                    - 1.0),
        ),
        8 => Some(
            p.powi(7)
                / (128.0 * g.powi(7) + 448.0 * g.powi(6) - 672.0 * g.powi(5)
                    + 560.0 * g.powi(4)
                    - 280.0 * g.powi(3)
                    + 84.0 * g * g
                    - 14.0 * g
                    + 1.0),
        ),
        _ => None,
    }
}

/// SIEMS closed forms combining [`siems_lambda`] and [`siems_intensity`];
/// σ_F = 1 exactly for 2 ≤ k ≤ 5.
pub fn siems_forms(k: usize, g: f64) -> ClosedForms {
    let lambda = siems_lambda(k, g).map(FormValue::Exact);
    let intensity = siems_intensity(k, g).map(FormValue::Exact);
    let sigma_f = if (2..=5).contains(&k) { Some(FormValue::Exact(1.0)) } else { None };
    // σ_E follows from the two equalities.
    let sigma_e = match (siems_lambda(k, g), siems_intensity(k, g)) {
        (Some(l), Some(j)) if j != 0.0 => Some(FormValue::Exact(l / j)),
        _ => None,
    };
    ClosedForms { sigma_f, sigma_e, lambda_i: lambda, intensity }
}

/// Closed forms for any family/order/parameter; empty for MBDF/NIMEX k ≥ 3
/// and BDF beyond the WBDF overlap.
pub fn closed_forms(family: crate::schemes::Family, k: usize, param: f64) -> ClosedForms {
    use crate::schemes::Family;
    match family {
        Family::Wbdf => wbdf_forms(k, param),
        Family::Gbdf => gbdf_forms(k, param),
        Family::Siems => siems_forms(k, param),
        Family::Bdf => wbdf_forms(k, 1.0),
        Family::Mbdf if k == 2 => ClosedForms {
            sigma_f: None,
            sigma_e: Some(FormValue::Exact(1.5)),
            lambda_i: Some(FormValue::Exact(
                (param + 4.0 * (2.0 * param + 6.0).sqrt() - 13.0) / (3.0 * (param - 1.0)),
            )),
            intensity: None,
        },
        Family::Nimex if k == 2 => ClosedForms {
            sigma_f: Some(FormValue::Exact(1.0)),
            sigma_e: Some(FormValue::Exact((4.0 * param - 1.0) / (4.0 * param - 2.0))),
            lambda_i: None,
            intensity: None,
        },
        _ => ClosedForms::none(),
    }
}

/// Leading truncation coefficients `(coeff_u, coeff_f)` where a closed
/// form is known; normalization matches
/// [`truncation_leading`](crate::schemes::truncation_leading).
pub fn truncation_forms(family: crate::schemes::Family, k: usize, p: f64) -> Option<(f64, f64)> {
    use crate::schemes::Family;
    match (family, k) {
        (Family::Wbdf, 2) => Some(((1.0 - 3.0 * p) / 6.0, p)),
        (Family::Wbdf, 3) => Some(((1.0 - 4.0 * p) / 12.0, p)),
        (Family::Gbdf, 3) => Some(((1.0 - p - 3.0 * p * p) / 12.0, (p * p + p) / 2.0)),
        (Family::Siems, 3) => Some((-(6.0 * p * p - 4.0 * p + 1.0) / 12.0, p * p)),
        (Family::Siems, 4) => {
            Some((-(10.0 * p.powi(3) - 10.0 * p * p + 5.0 * p - 1.0) / 20.0, p.powi(3)))
        }
        (Family::Nimex, 2) => Some((-(3.0 * p * p - 3.0 * p + 1.0) / 3.0, p * p)),
        _ => None,
    }
}

/// Distinguished family optima of λ_I and 𝔍 (value, location) used by the
/// verification suite.
pub mod optima {
    /// `max_s λ_I(MBDF2) = 2/3` at `s = 5`.
    pub const MBDF2_LAMBDA: (f64, f64) = (2.0 / 3.0, 5.0);
    /// `max_δ λ_I(NIMEX2) = 27/32` at `δ = 11/4`.
    pub const NIMEX2_LAMBDA: (f64, f64) = (27.0 / 32.0, 2.75);
    /// `max_δ 𝔍(NIMEX2) ≈ 0.795354` at `δ ≈ 8.5176`.
    pub const NIMEX2_INTENSITY: (f64, f64) = (0.795354, 8.5176);
    /// `max_γ 𝔍(SIEMS6) ≈ 0.756452` at the upper range end `γ = 17`.
    pub const SIEMS6_INTENSITY: (f64, f64) = (0.756452, 17.0);
    /// `max_γ 𝔍(SIEMS7)` at the upper range end `γ = 9`; the value is the
    /// closed form `24137569/43886879 ≈ 0.549995` (a circulated decimal
    /// 0.421759 for this maximum actually equals the γ = 6 value of the
    /// same closed form and is inconsistent with it at γ = 9).
    pub const SIEMS7_INTENSITY: (f64, f64) = (24137569.0 / 43886879.0, 9.0);
    /// `𝔍(SIEMS7, 6) ≈ 0.421759`, the γ = 6 value of the closed form.
    pub const SIEMS7_INTENSITY_AT_6: f64 = 0.421759;
    /// `max_γ 𝔍(SIEMS8) ≈ 0.373486` at the upper range end `γ = 6`.
    pub const SIEMS8_INTENSITY: (f64, f64) = (0.373486, 6.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::Family;

    #[test]
    fn form_value_checks() {
        assert!(FormValue::Exact(1.5).check(1.5 + 5e-10, 1e-9));
        assert!(!FormValue::Exact(1.5).check(1.51, 1e-9));
        assert!(FormValue::Bounds(0.2, 0.3).check(0.25, 0.0));
        assert!(!FormValue::Bounds(0.2, 0.3).check(0.31, 1e-9));
    }

    #[test]
    fn siems_intensity_matches_lambda_over_sigma_e_samples() {
        // 𝔍 = λ_I/σ_E, so lambda/intensity gives σ_E ≥ 1.
        for k in 2..=8 {
            let g = 3.0;
            let l = siems_lambda(k, g).unwrap();
            let j = siems_intensity(k, g).unwrap();
            assert!(l / j >= 1.0, "k = {k}");
        }
    }

    #[test]
    fn bdf_forms_are_wbdf_at_alpha_one() {
        let f = closed_forms(Family::Bdf, 2, 0.0);
        match f.intensity {
            Some(FormValue::Exact(v)) => assert!((v - 1.0 / 3.0).abs() < 1e-15),
            other => panic!("expected exact form, got {other:?}"),
        }
    }

    #[test]
    fn siems7_quoted_decimal_is_the_gamma6_value() {
        let j6 = siems_intensity(7, 6.0).unwrap();
        assert!((j6 - optima::SIEMS7_INTENSITY_AT_6).abs() < 1e-6);
        let j9 = siems_intensity(7, 9.0).unwrap();
        assert!((j9 - optima::SIEMS7_INTENSITY.0).abs() < 1e-12);
    }
}
