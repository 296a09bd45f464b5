//! Polynomial arithmetic, unit-circle root analysis, and the logarithmic
//! series construction of multistep coefficient polynomials.
//!
//! Two polynomial representations live here:
//!
//! * [`Poly`] — real coefficients in `f64`, ascending degree; used for root
//!   finding and zero-stability (root-condition) checks.
//! * [`RatPoly`] — exact rational coefficients ([`num::BigRational`]),
//!   used for the Taylor construction of generator functions of the form
//!   `P(z)·ln z` about `z = 1`. Every `f64` parameter is a dyadic rational,
//!   so the construction is carried out exactly and rounded once at the end.
//!
//! Root finding goes through the balanced companion matrix and the complex
//! QR eigensolver in [`crate::numcore`] — robust at the degrees (≤ 9) that
//! arise from multistep characteristic polynomials.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num_complex::Complex64;
use thiserror::Error;

use crate::numcore::{self, ComplexMatrix};

/// Roots with modulus within `CIRCLE_TOL` of 1 count as lying on the unit
/// circle. Double precision with degree ≤ 9 and O(1) coefficients resolves
/// moduli far better than this.
pub const CIRCLE_TOL: f64 = 1e-9;

/// Two on-circle roots closer than `PAIRING_TOL` count as a repeated
/// boundary root (root condition violated).
pub const PAIRING_TOL: f64 = 1e-7;

/// Errors from polynomial analysis.
#[derive(Debug, Error)]
pub enum PolyError {
    /// Root finding on the identically zero polynomial.
    #[error("zero polynomial")]
    ZeroPolynomial,
    /// Root finding on a constant polynomial (no roots to report).
    #[error("constant polynomial has no roots")]
    ConstantPolynomial,
    /// Propagated eigensolver failure.
    #[error("eigensolver failure: {0}")]
    Eigen(#[from] numcore::NumError),
}

/// Real polynomial, coefficients ascending in degree (`coeffs[i]` multiplies
/// the i-th power). Trailing zeros are trimmed on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Build from ascending coefficients, trimming exact trailing zeros.
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut c = coeffs;
        while c.len() > 1 && *c.last().expect("nonempty") == 0.0 {
            c.pop();
        }
        if c.is_empty() {
            c.push(0.0);
        }
        Self { coeffs: c }
    }

    /// Ascending coefficient slice.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree after trailing-zero trimming; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// True when every coefficient is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Evaluate at a complex point by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Difference `self - other`.
    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.coeffs.get(i).copied().unwrap_or(0.0);
            let b = other.coeffs.get(i).copied().unwrap_or(0.0);
            *o = a - b;
        }
        Poly::new(out)
    }
}

/// Root analysis of a real polynomial on and around the unit circle.
#[derive(Debug, Clone)]
pub struct RootReport {
    /// All complex roots (count equals the degree).
    pub roots: Vec<Complex64>,
    /// Per-root flag: modulus within [`CIRCLE_TOL`] of 1.
    pub on_circle: Vec<bool>,
    /// True iff no two on-circle roots coincide within [`PAIRING_TOL`].
    pub simple_on_circle: bool,
    /// Largest root modulus.
    pub max_modulus: f64,
}

/// All complex roots via eigenvalues of the balanced companion matrix.
pub fn poly_roots(p: &Poly) -> Result<RootReport, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let d = p.degree();
    if d == 0 {
        return Err(PolyError::ConstantPolynomial);
    }
    let lead = p.coeffs[d];
    let mut comp = ComplexMatrix::zeros(d);
    for i in 1..d {
        comp.set(i, i - 1, Complex64::new(1.0, 0.0));
    }
    for i in 0..d {
        comp.set(i, d - 1, Complex64::new(-p.coeffs[i] / lead, 0.0));
    }
    let roots = numcore::complex_eig(&comp)?;
    let on_circle: Vec<bool> = roots.iter().map(|r| (r.norm() - 1.0).abs() <= CIRCLE_TOL).collect();
    let mut simple = true;
    for i in 0..roots.len() {
        if !on_circle[i] {
            continue;
        }
        for j in (i + 1)..roots.len() {
            if on_circle[j] && (roots[i] - roots[j]).norm() <= PAIRING_TOL {
                simple = false;
            }
        }
    }
    let max_modulus = roots.iter().map(|r| r.norm()).fold(0.0f64, f64::max);
    Ok(RootReport { roots, on_circle, simple_on_circle: simple, max_modulus })
}

/// Root condition: all roots in the closed unit disk, boundary roots simple.
///
/// Constant (nonzero) polynomials pass vacuously.
pub fn root_condition(p: &Poly) -> Result<bool, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if p.degree() == 0 {
        return Ok(true);
    }
    let report = poly_roots(p)?;
    Ok(report.max_modulus <= 1.0 + CIRCLE_TOL && report.simple_on_circle)
}

// ---------------------------------------------------------------------------
// Exact rational polynomials and the ln-series Taylor construction
// ---------------------------------------------------------------------------

/// Exact rational number.
pub type Rat = BigRational;

/// Exact conversion of a finite `f64` into a rational (every finite double
/// is a dyadic rational).
pub fn rat_from_f64(x: f64) -> Rat {
    BigRational::from_float(x).expect("finite f64 converts exactly")
}

/// Convenience constructor `n/d` from machine integers.
pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Round a rational to the nearest `f64`.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().expect("rational within f64 range")
}

/// Polynomial with exact rational coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    /// Build from ascending coefficients, trimming trailing zeros.
    pub fn new(coeffs: Vec<Rat>) -> Self {
        let mut c = coeffs;
        while c.len() > 1 && c.last().expect("nonempty").is_zero() {
            c.pop();
        }
        if c.is_empty() {
            c.push(Rat::zero());
        }
        Self { coeffs: c }
    }

    /// The constant 1.
    pub fn one() -> Self {
        Self { coeffs: vec![Rat::one()] }
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self { coeffs: vec![Rat::zero(), Rat::one()] }
    }

    /// Constant polynomial.
    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// Ascending coefficient slice.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// Degree after trimming.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of the i-th power (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    /// Sum of two polynomials.
    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        RatPoly::new(out)
    }

    /// Difference `self - other`.
    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        RatPoly::new(out)
    }

    /// Product of two polynomials.
    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: &Rat) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Integer power.
    pub fn pow(&self, e: usize) -> RatPoly {
        let mut acc = RatPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Composition `p(1 + w)`: re-expand about 1 (binomial shift).
    pub fn shift_to_one(&self) -> RatPoly {
        // p(1+w) = Σ_i c_i (1+w)^i, accumulated by Horner in (1+w).
        let one_plus_w = RatPoly::new(vec![Rat::one(), Rat::one()]);
        let mut acc = RatPoly::constant(Rat::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&one_plus_w).add(&RatPoly::constant(c.clone()));
        }
        acc
    }

    /// Truncate to degree ≤ `deg`.
    pub fn truncate(&self, deg: usize) -> RatPoly {
        RatPoly::new(self.coeffs.iter().take(deg + 1).cloned().collect())
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Rounded `f64` coefficient vector, ascending.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    /// Rounded real polynomial.
    pub fn to_poly(&self) -> Poly {
        Poly::new(self.to_f64_vec())
    }

    /// Sum of all coefficients (the value at 1).
    pub fn coeff_sum(&self) -> Rat {
        self.coeffs.iter().fold(Rat::zero(), |acc, c| acc + c)
    }

    /// Largest absolute coefficient, as `f64` (diagnostics only).
    pub fn max_abs_f64(&self) -> f64 {
        self.coeffs.iter().map(|c| rat_to_f64(&c.abs())).fold(0.0, f64::max)
    }
}

/// Taylor construction of the first coefficient polynomial from a generator
/// of the form `f(z) = prefactor(z) · ln z`.
///
/// Returns the degree-(k−1) polynomial in ζ (ascending coefficients)
///
/// ```text
/// Σ_{j=1}^{k}  f^{(j)}(1)/j! · (ζ−1)^{j−1},
/// ```
///
/// computed exactly: the prefactor is re-expanded about `z = 1` and
/// multiplied by the truncated series `ln(1+w) = Σ_{m≥1} (−1)^{m+1} w^m / m`.
pub fn log_series_expand(prefactor: &RatPoly, k: usize) -> Result<RatPoly, PolyError> {
    assert!(k >= 1, "step count must be at least 1");
    // q(w) = prefactor(1+w), exact binomial shift.
    let q = prefactor.shift_to_one();
    // ln(1+w) truncated at order k; higher terms cannot reach degree ≤ k in
    // the truncated product.
    let mut log_coeffs = vec![Rat::zero(); k + 1];
    for (m, c) in log_coeffs.iter_mut().enumerate().skip(1) {
        let sign = if m % 2 == 1 { 1 } else { -1 };
        *c = rat(sign, m as i64);
    }
    let series = q.mul(&RatPoly::new(log_coeffs)).truncate(k);
    // Re-assemble in powers of (ζ−1): coefficient j of the series multiplies
    // (ζ−1)^{j−1}.
    let zeta_minus_one = RatPoly::new(vec![-Rat::one(), Rat::one()]);
    let mut out = RatPoly::constant(Rat::zero());
    let mut basis = RatPoly::one();
    for j in 1..=k {
        out = out.add(&basis.scale(&series.coeff(j)));
        basis = basis.mul(&zeta_minus_one);
    }
    Ok(out)
}
