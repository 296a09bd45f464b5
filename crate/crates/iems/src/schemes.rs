//! Catalog of parameterized implicit-explicit multistep (IEMS) schemes.
//!
//! A k-step IEMS scheme advances `u' + ϖLu = F(u)` by
//!
//! ```text
//! Σ_{j=0}^{k-1} a_j ∂_τ u^{n-j}  +  ϖ Σ_{j=0}^{k} b_j L u^{n-j}
//!     = Σ_{j=0}^{k-1} c_j F(u^{n-j-1}),        ∂_τ u^m := (u^m − u^{m-1})/τ,
//! ```
//!
//! so a scheme is a coefficient triad `(a, b, c)` of lengths `(k, k+1, k)`
//! with `a₀, b₀, c₀ > 0`. Six families are provided:
//!
//! * `WBDF` — weighted BDF with implicit weight α on the newest level;
//! * `MBDF` — modified BDF with a three-level implicit tail controlled by s;
//! * `GBDF` — generalized BDF with shift parameter β (β = 1 recovers BDF);
//! * `NIMEX` — the k-fold weighted-factor family with parameter δ;
//! * `SIEMS` — the (k−1)-fold weighted-factor family with parameter γ;
//! * `BDF` — classic backward differentiation (explicit treatment of F).
//!
//! All construction is exact rational arithmetic: the `f64` parameter is a
//! dyadic rational, the generator expansions and the coefficient formulas
//! are evaluated in `BigRational`, and results are rounded once. The exact
//! vectors are retained for downstream consumers (truncation coefficients,
//! serialization) that benefit from them.

use num::traits::{One, Signed, Zero};
use serde_json::json;
use thiserror::Error;

use crate::polyring::{self, log_series_expand, rat, rat_from_f64, rat_to_f64, Poly, Rat, RatPoly};

/// Scheme family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Weighted BDF, parameter α, k ∈ [2,5].
    Wbdf,
    /// Modified BDF, parameter s, k ∈ [2,5].
    Mbdf,
    /// Generalized BDF, parameter β, k ∈ [2,5].
    Gbdf,
    /// k-fold weighted-factor family, parameter δ, k ∈ [2,8].
    Nimex,
    /// (k−1)-fold weighted-factor family, parameter γ, k ∈ [2,8].
    Siems,
    /// Classic BDF (parameter ignored), k ∈ [1,6].
    Bdf,
    /// User-supplied triad.
    Custom,
}

impl Family {
    /// Canonical lowercase name used by the CLI and serialization.
    pub fn name(self) -> &'static str {
        match self {
            Family::Wbdf => "wbdf",
            Family::Mbdf => "mbdf",
            Family::Gbdf => "gbdf",
            Family::Nimex => "nimex",
            Family::Siems => "siems",
            Family::Bdf => "bdf",
            Family::Custom => "custom",
        }
    }

    /// Parse a (case-insensitive) family name.
    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_lowercase().as_str() {
            "wbdf" => Some(Family::Wbdf),
            "mbdf" => Some(Family::Mbdf),
            "gbdf" => Some(Family::Gbdf),
            "nimex" => Some(Family::Nimex),
            "siems" => Some(Family::Siems),
            "bdf" => Some(Family::Bdf),
            "custom" => Some(Family::Custom),
            _ => None,
        }
    }

    /// Admissible step counts `(k_min, k_max)` for catalog construction.
    pub fn k_range(self) -> Option<(usize, usize)> {
        match self {
            Family::Wbdf | Family::Mbdf | Family::Gbdf => Some((2, 5)),
            Family::Nimex | Family::Siems => Some((2, 8)),
            Family::Bdf => Some((1, 6)),
            Family::Custom => None,
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Errors from scheme construction and the order-condition solver.
#[derive(Debug, Error)]
pub enum SchemeError {
    /// The (family, k) combination is outside the catalog.
    #[error("unsupported order: {family} does not provide k={k}")]
    UnsupportedOrder { family: Family, k: usize },
    /// Order-condition system has remaining degrees of freedom.
    #[error("underdetermined system: {dof} free parameter(s) remain (free columns: {cols:?})")]
    Underdetermined { dof: usize, cols: Vec<String> },
    /// Order-condition system admits no solution.
    #[error("inconsistent order-condition system (no solution)")]
    Inconsistent,
    /// Scheme handed to truncation analysis fails its own order conditions.
    #[error("inconsistent scheme: order-{q} residual {residual:.3e} exceeds 1e-8")]
    InconsistentScheme { q: usize, residual: f64 },
    /// Invalid custom triad.
    #[error("invalid triad: {0}")]
    InvalidTriad(String),
    /// Propagated polynomial error.
    #[error(transparent)]
    Poly(#[from] polyring::PolyError),
}

/// A k-step IEMS coefficient triad.
#[derive(Debug, Clone)]
pub struct SchemeTriad {
    /// Family tag.
    pub family: Family,
    /// Step count.
    pub k: usize,
    /// Family parameter (α, s, β, δ, or γ); 0 for BDF/Custom.
    pub param: f64,
    /// Implicit time-difference weights, length k.
    pub a: Vec<f64>,
    /// Implicit operator weights, length k+1.
    pub b: Vec<f64>,
    /// Explicit nonlinearity weights, length k.
    pub c: Vec<f64>,
    /// All three characteristic polynomials satisfy the root condition.
    /// False is a warning (parameter outside the zero-stability range), not
    /// an error: probing thresholds is legitimate use.
    pub zero_stable: bool,
    /// Exact rational triad when the scheme came from catalog construction
    /// or the exact solver.
    exact: Option<ExactTriad>,
}

#[derive(Debug, Clone)]
struct ExactTriad {
    a: Vec<Rat>,
    b: Vec<Rat>,
    c: Vec<Rat>,
}

impl SchemeTriad {
    /// The one-step implicit-explicit Euler scheme.
    pub fn euler() -> SchemeTriad {
        make_scheme(Family::Bdf, 1, 0.0).expect("Euler is always constructible")
    }

    /// Build a custom triad from raw coefficient vectors.
    pub fn custom(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>) -> Result<SchemeTriad, SchemeError> {
        let k = a.len();
        if k == 0 || b.len() != k + 1 || c.len() != k {
            return Err(SchemeError::InvalidTriad(format!(
                "need lengths (k, k+1, k); got ({}, {}, {})",
                a.len(),
                b.len(),
                c.len()
            )));
        }
        if !(a[0] > 0.0 && b[0] > 0.0 && c[0] > 0.0) {
            return Err(SchemeError::InvalidTriad(
                "leading coefficients a0, b0, c0 must be positive".into(),
            ));
        }
        let zero_stable = triad_zero_stable(&a, &b, &c)?;
        Ok(SchemeTriad { family: Family::Custom, k, param: 0.0, a, b, c, zero_stable, exact: None })
    }

    /// Exact rational coefficient vectors, when available.
    pub fn exact_vectors(&self) -> Option<(&[Rat], &[Rat], &[Rat])> {
        self.exact.as_ref().map(|e| (&e.a[..], &e.b[..], &e.c[..]))
    }

    /// First characteristic polynomial factor ϱ̃_a(ζ) = Σ_j a_j ζ^{k−1−j}.
    pub fn rho_a_tilde(&self) -> Poly {
        vector_to_poly(&self.a, self.k - 1)
    }

    /// Second characteristic polynomial ϱ_b(ζ) = Σ_j b_j ζ^{k−j}.
    pub fn rho_b(&self) -> Poly {
        vector_to_poly(&self.b, self.k)
    }

    /// Third characteristic polynomial ϱ_c(ζ) = Σ_j c_j ζ^{k−1−j}.
    pub fn rho_c(&self) -> Poly {
        vector_to_poly(&self.c, self.k - 1)
    }

    /// Serialize as JSON with 17-significant-digit decimal coefficient
    /// strings (lossless for `f64`).
    pub fn to_json(&self) -> serde_json::Value {
        let fmt = |v: &f64| format!("{v:.16e}");
        json!({
            "family": self.family.name(),
            "k": self.k,
            "param": self.param,
            "a": self.a.iter().map(fmt).collect::<Vec<_>>(),
            "b": self.b.iter().map(fmt).collect::<Vec<_>>(),
            "c": self.c.iter().map(fmt).collect::<Vec<_>>(),
            "zero_stable": self.zero_stable,
        })
    }
}

/// The three characteristic polynomials of a scheme.
#[derive(Debug, Clone)]
pub struct CharacteristicTriple {
    /// ϱ_a(ζ) = (ζ−1)·Σ_j a_j ζ^{k−1−j}.
    pub rho_a: Poly,
    /// ϱ_b(ζ) = Σ_j b_j ζ^{k−j}.
    pub rho_b: Poly,
    /// ϱ_c(ζ) = Σ_j c_j ζ^{k−1−j}.
    pub rho_c: Poly,
}

/// Characteristic polynomials (ϱ_a, ϱ_b, ϱ_c) of a triad.
pub fn characteristic_triple(scheme: &SchemeTriad) -> CharacteristicTriple {
    let zeta_minus_one = Poly::new(vec![-1.0, 1.0]);
    CharacteristicTriple {
        rho_a: scheme.rho_a_tilde().mul(&zeta_minus_one),
        rho_b: scheme.rho_b(),
        rho_c: scheme.rho_c(),
    }
}

/// Leading truncation-error coefficients of an order-k scheme.
#[derive(Debug, Clone, Copy)]
pub struct TruncationReport {
    /// Verified consistency order (equals k for catalog schemes).
    pub q: usize,
    /// Multiplier of `d^{q+1}u/dt^{q+1} · τ^q` in the local residual.
    pub coeff_u: f64,
    /// Multiplier of `d^q F(u)/dt^q · τ^q` in the local residual.
    pub coeff_f: f64,
}

// ---------------------------------------------------------------------------
// Family construction
// ---------------------------------------------------------------------------

/// Construct a catalog scheme.
///
/// The parameter is accepted even outside the family's zero-stability range;
/// the returned triad then carries `zero_stable = false` as a warning flag.
pub fn make_scheme(family: Family, k: usize, param: f64) -> Result<SchemeTriad, SchemeError> {
    let (kmin, kmax) =
        family.k_range().ok_or(SchemeError::UnsupportedOrder { family, k })?;
    if k < kmin || k > kmax {
        return Err(SchemeError::UnsupportedOrder { family, k });
    }
    let p = rat_from_f64(param);
    let (a, b, c) = match family {
        Family::Wbdf => wbdf_vectors(k, &p),
        Family::Mbdf => mbdf_vectors(k, &p),
        Family::Gbdf => gbdf_vectors(k, &p),
        Family::Nimex => nimex_vectors(k, &p),
        Family::Siems => siems_vectors(k, &p),
        Family::Bdf => bdf_vectors(k),
        Family::Custom => unreachable!("custom has no k range"),
    };
    let af: Vec<f64> = a.iter().map(rat_to_f64).collect();
    let bf: Vec<f64> = b.iter().map(rat_to_f64).collect();
    let cf: Vec<f64> = c.iter().map(rat_to_f64).collect();
    let zero_stable = triad_zero_stable(&af, &bf, &cf)?;
    Ok(SchemeTriad {
        family,
        k,
        param,
        a: af,
        b: bf,
        c: cf,
        zero_stable,
        exact: Some(ExactTriad { a, b, c }),
    })
}

/// ϱ̃_a from the generator `prefactor(z)·ln z`, as an a-vector (length k).
fn a_from_generator(prefactor: &RatPoly, k: usize) -> Vec<Rat> {
    let rho = log_series_expand(prefactor, k).expect("k >= 1 checked by caller");
    poly_to_vector(&rho, k - 1)
}

/// b-vector (length k+1) from ϱ_b.
fn b_from_rho(rho_b: &RatPoly, k: usize) -> Vec<Rat> {
    poly_to_vector(rho_b, k)
}

/// c-vector (length k) from ϱ_c = ϱ_b − b₀(ζ−1)^k (the consistency pairing
/// between implicit and explicit weights).
fn c_from_rho_b(rho_b: &RatPoly, k: usize) -> Vec<Rat> {
    let b0 = rho_b.coeff(k);
    let zeta_minus_one = RatPoly::new(vec![-Rat::one(), Rat::one()]);
    let rho_c = rho_b.sub(&zeta_minus_one.pow(k).scale(&b0));
    poly_to_vector(&rho_c, k - 1)
}

/// Linear factor `p·z − p + 1` used by the weighted families.
fn weighted_factor(p: &Rat) -> RatPoly {
    RatPoly::new(vec![Rat::one() - p, p.clone()])
}

fn wbdf_vectors(k: usize, alpha: &Rat) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    // Generator (αz − α + 1)·z^{k−1}·ln z; implicit weight only on the two
    // newest levels.
    let prefactor = weighted_factor(alpha).mul(&RatPoly::x().pow(k - 1));
    let a = a_from_generator(&prefactor, k);
    let rho_b = weighted_factor(alpha).mul(&RatPoly::x().pow(k - 1));
    (a, b_from_rho(&rho_b, k), c_from_rho_b(&rho_b, k))
}

fn mbdf_vectors(k: usize, s: &Rat) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    // ϱ̃_a = Σ_{j=1}^k (1/j) ζ^{k−j} (ζ−1)^{j−1}.
    let zeta_minus_one = RatPoly::new(vec![-Rat::one(), Rat::one()]);
    let mut rho_a_tilde = RatPoly::constant(Rat::zero());
    for j in 1..=k {
        let term = RatPoly::x().pow(k - j).mul(&zeta_minus_one.pow(j - 1)).scale(&rat(1, j as i64));
        rho_a_tilde = rho_a_tilde.add(&term);
    }
    // ϱ_b = ζ^k + (ζ−1)^k/(s−1).
    let s_minus_one = s - Rat::one();
    let rho_b = RatPoly::x()
        .pow(k)
        .add(&zeta_minus_one.pow(k).scale(&(Rat::one() / s_minus_one)));
    (poly_to_vector(&rho_a_tilde, k - 1), b_from_rho(&rho_b, k), c_from_rho_b(&rho_b, k))
}

fn nimex_vectors(k: usize, delta: &Rat) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    // Generator (δz − δ + 1)^k · ln z; ϱ_b is the same k-fold factor.
    let rho_b = weighted_factor(delta).pow(k);
    let a = a_from_generator(&rho_b, k);
    (a, b_from_rho(&rho_b, k), c_from_rho_b(&rho_b, k))
}

fn siems_vectors(k: usize, gamma: &Rat) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    // Generator (γz − γ + 1)^{k−1}·z·ln z; ϱ_b = ζ(γζ − γ + 1)^{k−1}.
    let rho_b = weighted_factor(gamma).pow(k - 1).mul(&RatPoly::x());
    let a = a_from_generator(&rho_b, k);
    (a, b_from_rho(&rho_b, k), c_from_rho_b(&rho_b, k))
}

fn bdf_vectors(k: usize) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    // Generator z^k·ln z; fully implicit operator weight on the newest level.
    let rho_b = RatPoly::x().pow(k);
    let a = a_from_generator(&rho_b, k);
    (a, b_from_rho(&rho_b, k), c_from_rho_b(&rho_b, k))
}

/// Evaluate Σ_i coeffs[i]·p^i / den exactly (ascending integer coefficients).
fn pe(p: &Rat, coeffs: &[i64], den: i64) -> Rat {
    let mut acc = Rat::zero();
    for &c in coeffs.iter().rev() {
        acc = acc * p + rat(c, 1);
    }
    acc / rat(den, 1)
}

/// Generalized BDF coefficient vectors as explicit β-polynomials.
///
/// These come from the family's published closed forms rather than a
/// generator expansion; the order-condition solver cross-checks them in the
/// test suite.
fn gbdf_vectors(k: usize, beta: &Rat) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    let p = beta;
    match k {
        2 => {
            let a = vec![pe(p, &[1, 2], 2), pe(p, &[1, -2], 2)];
            let b = vec![p.clone(), Rat::one() - p, Rat::zero()];
            let c = vec![pe(p, &[1, 1], 1), -p.clone()];
            (a, b, c)
        }
        3 => {
            let a = vec![pe(p, &[2, 6, 3], 6), pe(p, &[5, -6, -6], 6), pe(p, &[-1, 0, 3], 6)];
            let b = vec![
                pe(p, &[0, 1, 1], 2),
                pe(p, &[1, 0, -1], 1),
                pe(p, &[0, -1, 1], 2),
                Rat::zero(),
            ];
            let c = vec![pe(p, &[2, 3, 1], 2), pe(p, &[0, -2, -1], 1), pe(p, &[0, 1, 1], 2)];
            (a, b, c)
        }
        4 => {
            let a = vec![
                pe(p, &[3, 11, 9, 2], 12),
                pe(p, &[13, -9, -21, -6], 12),
                pe(p, &[-5, -3, 15, 6], 12),
                pe(p, &[1, 1, -3, -2], 12),
            ];
            let b = vec![
                pe(p, &[0, 2, 3, 1], 6),
                pe(p, &[2, 1, -2, -1], 2),
                pe(p, &[0, -2, 1, 1], 2),
                pe(p, &[0, 1, 0, -1], 6),
                Rat::zero(),
            ];
            let c = vec![
                pe(p, &[6, 11, 6, 1], 6),
                pe(p, &[0, -6, -5, -1], 2),
                pe(p, &[0, 3, 4, 1], 2),
                pe(p, &[0, -2, -3, -1], 6),
            ];
            (a, b, c)
        }
        5 => {
            let a = vec![
                pe(p, &[24, 100, 105, 40, 5], 120),
                pe(p, &[77, -25, -135, -70, -10], 60),
                pe(p, &[-43, -45, 120, 90, 15], 60),
                pe(p, &[17, 25, -45, -50, -10], 60),
                pe(p, &[-6, -10, 15, 20, 5], 120),
            ];
            let b = vec![
                pe(p, &[0, 6, 11, 6, 1], 24),
                pe(p, &[6, 5, -5, -5, -1], 6),
                pe(p, &[0, -6, 1, 4, 1], 4),
                pe(p, &[0, 3, 1, -3, -1], 6),
                pe(p, &[0, -2, -1, 2, 1], 24),
                Rat::zero(),
            ];
            let c = vec![
                pe(p, &[24, 50, 35, 10, 1], 24),
                pe(p, &[0, -24, -26, -9, -1], 6),
                pe(p, &[0, 12, 19, 8, 1], 4),
                pe(p, &[0, -8, -14, -7, -1], 6),
                pe(p, &[0, 6, 11, 6, 1], 24),
            ];
            (a, b, c)
        }
        _ => unreachable!("k range checked by caller"),
    }
}

/// Ascending RatPoly of degree ≤ `deg` → descending-index coefficient vector
/// of length `deg+1` (`v[j]` multiplies `ζ^{deg−j}`).
fn poly_to_vector(p: &RatPoly, deg: usize) -> Vec<Rat> {
    (0..=deg).map(|j| p.coeff(deg - j)).collect()
}

/// Coefficient vector → real polynomial, `v[j]` multiplying `ζ^{deg−j}`.
fn vector_to_poly(v: &[f64], deg: usize) -> Poly {
    let mut coeffs = vec![0.0; deg + 1];
    for (j, &val) in v.iter().enumerate() {
        if deg >= j {
            coeffs[deg - j] = val;
        }
    }
    Poly::new(coeffs)
}

/// Root-condition check of all three characteristic polynomials.
fn triad_zero_stable(a: &[f64], b: &[f64], c: &[f64]) -> Result<bool, SchemeError> {
    let k = a.len();
    let zeta_minus_one = Poly::new(vec![-1.0, 1.0]);
    let rho_a = vector_to_poly(a, k - 1).mul(&zeta_minus_one);
    let rho_b = vector_to_poly(b, k);
    let rho_c = vector_to_poly(c, k - 1);
    Ok(polyring::root_condition(&rho_a)?
        && polyring::root_condition(&rho_b)?
        && polyring::root_condition(&rho_c)?)
}

// ---------------------------------------------------------------------------
// Catalog metadata: parameter ranges and representatives
// ---------------------------------------------------------------------------

/// Recommended parameter interval `[lo, hi]` for a catalog family/order:
/// zero-stable throughout, with positive dissipation factor where the family
/// provides it. `None` for BDF (parameter-free).
pub fn param_range(family: Family, k: usize) -> Option<(f64, f64)> {
    match family {
        Family::Wbdf => Some((1.0, 10.0)),
        Family::Mbdf => match k {
            2 => Some((1.5, 10.0)),
            3 => Some((2.5, 10.0)),
            // Root-condition scans on the shifted characteristic polynomial show
            // zero stability only for s > 5 (k = 4) and s > 12.09 (k = 5).
            4 => Some((5.2, 20.0)),
            5 => Some((12.5, 30.0)),
            _ => None,
        },
        Family::Gbdf => match k {
            5 => Some((1.0, 20.0)),
            _ => Some((1.0, 10.0)),
        },
        Family::Nimex => match k {
            2..=5 => Some((1.0, 10.0)),
            6 => Some((1.1, 10.0)),
            7 => Some((1.4, 10.0)),
            8 => Some((1.8, 10.0)),
            _ => None,
        },
        Family::Siems => match k {
            2 | 3 => Some((1.0, 10.0)),
            4 => Some((1.2, 10.0)),
            5 => Some((1.4, 10.0)),
            6 => Some((2.0, 17.0)),
            7 => Some((2.2, 9.0)),
            8 => Some((2.5, 6.0)),
            _ => None,
        },
        Family::Bdf | Family::Custom => None,
    }
}

/// A representative in-range parameter for each catalog family/order.
pub fn representative_param(family: Family, k: usize) -> f64 {
    match family {
        Family::Wbdf => 2.0,
        // MBDF representatives keep s−1 a power of two so the b-vector is
        // exactly representable; k = 4, 5 need the larger zero-stable s.
        Family::Mbdf => match k {
            4 => 9.0,
            5 => 17.0,
            _ => 5.0,
        },
        Family::Gbdf => match k {
            4 => 9.0,
            5 => 20.0,
            _ => 2.0,
        },
        Family::Nimex => 2.0,
        Family::Siems => match k {
            7 => 3.0,
            8 => 3.0,
            _ => 2.0,
        },
        Family::Bdf | Family::Custom => 0.0,
    }
}

/// Every catalog (family, k) pair.
pub fn catalog() -> Vec<(Family, usize)> {
    let mut out = Vec::new();
    for family in [Family::Wbdf, Family::Mbdf, Family::Gbdf, Family::Nimex, Family::Siems, Family::Bdf]
    {
        let (lo, hi) = family.k_range().expect("catalog families have ranges");
        for k in lo..=hi {
            out.push((family, k));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Order conditions: exact solver, barrier, truncation coefficients
// ---------------------------------------------------------------------------

/// `base^e` as an exact rational, with the convention `0^0 = 1`.
fn ripow(base: i64, e: usize) -> Rat {
    if e == 0 {
        return Rat::one();
    }
    let mut acc = Rat::one();
    for _ in 0..e {
        acc *= rat(base, 1);
    }
    acc
}

/// Outcome of exact Gauss–Jordan elimination for one variable.
#[derive(Debug, Clone, PartialEq)]
enum VarStatus {
    /// Uniquely determined across the whole solution set.
    Determined(Rat),
    /// Free parameter.
    Free,
    /// Pivot variable whose value depends on free parameters.
    Dependent,
}

/// Exact reduced-row-echelon solve of `M x = rhs`.
///
/// Returns per-variable status, classifying each unknown as determined
/// (same value in every solution), free, or dependent on free variables.
/// Errors if the system is inconsistent.
fn rref_solve(mut m: Vec<Vec<Rat>>, mut rhs: Vec<Rat>) -> Result<Vec<VarStatus>, SchemeError> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; rows];
    let mut is_pivot_col = vec![false; cols];
    let mut r = 0usize;
    for col in 0..cols {
        if r >= rows {
            break;
        }
        // Largest-magnitude pivot keeps intermediate rationals small-ish.
        let mut best: Option<usize> = None;
        for row in r..rows {
            if !m[row][col].is_zero() {
                let better = match best {
                    None => true,
                    Some(b) => m[row][col].abs() > m[b][col].abs(),
                };
                if better {
                    best = Some(row);
                }
            }
        }
        let Some(prow) = best else { continue };
        m.swap(r, prow);
        rhs.swap(r, prow);
        let inv = Rat::one() / m[r][col].clone();
        for j in col..cols {
            m[r][j] = &m[r][j] * &inv;
        }
        rhs[r] = &rhs[r] * &inv;
        for row in 0..rows {
            if row != r && !m[row][col].is_zero() {
                let factor = m[row][col].clone();
                for j in col..cols {
                    let v = &m[row][j] - &factor * &m[r][j];
                    m[row][j] = v;
                }
                rhs[row] = &rhs[row] - &factor * &rhs[r];
            }
        }
        pivot_of_row[r] = Some(col);
        is_pivot_col[col] = true;
        r += 1;
    }
    // Inconsistency: zero row with nonzero right-hand side.
    for row in r..rows {
        if !rhs[row].is_zero() {
            return Err(SchemeError::Inconsistent);
        }
    }
    let mut status: Vec<VarStatus> = (0..cols)
        .map(|c| if is_pivot_col[c] { VarStatus::Dependent } else { VarStatus::Free })
        .collect();
    for row in 0..r {
        let Some(pcol) = pivot_of_row[row] else { continue };
        let coupled = (0..cols).any(|j| j != pcol && !is_pivot_col[j] && !m[row][j].is_zero());
        if !coupled {
            status[pcol] = VarStatus::Determined(rhs[row].clone());
        }
    }
    Ok(status)
}

/// Build the exact order-condition system for a k-step triad at order q, on
/// the normalized grid `t_{n−j} = −j`, `τ = 1` (the conditions are
/// translation- and scale-invariant at these orders):
///
/// ```text
/// Σ_j a_j = 1;
/// Σ_j a_j [(−j)^ℓ − (−j−1)^ℓ] = ℓ Σ_j b_j (−j)^{ℓ−1}
///                             = ℓ Σ_j c_j (−j−1)^{ℓ−1},   1 ≤ ℓ ≤ q.
/// ```
///
/// Variables are ordered `a_0..a_{k−1}, b_0..b_k, c_0..c_{k−1}`.
fn order_condition_rows(k: usize, q: usize) -> (Vec<Vec<Rat>>, Vec<Rat>) {
    let nvars = 3 * k + 1;
    let bcol = |j: usize| k + j;
    let ccol = |j: usize| 2 * k + 1 + j;
    let mut m = Vec::new();
    let mut rhs = Vec::new();
    // Consistency: Σ a_j = 1.
    let mut row = vec![Rat::zero(); nvars];
    for j in 0..k {
        row[j] = Rat::one();
    }
    m.push(row);
    rhs.push(Rat::one());
    for l in 1..=q {
        // Implicit matching: a-differences against b-weights.
        let mut row = vec![Rat::zero(); nvars];
        for j in 0..k {
            row[j] = ripow(-(j as i64), l) - ripow(-(j as i64) - 1, l);
        }
        for j in 0..=k {
            row[bcol(j)] = -rat(l as i64, 1) * ripow(-(j as i64), l - 1);
        }
        m.push(row);
        rhs.push(Rat::zero());
        // Explicit matching: b-weights against c-weights.
        let mut row = vec![Rat::zero(); nvars];
        for j in 0..=k {
            row[bcol(j)] = rat(l as i64, 1) * ripow(-(j as i64), l - 1);
        }
        for j in 0..k {
            row[ccol(j)] = -rat(l as i64, 1) * ripow(-(j as i64) - 1, l - 1);
        }
        m.push(row);
        rhs.push(Rat::zero());
    }
    (m, rhs)
}

/// Solve the order-q conditions for a k-step triad, with optional fixed
/// entries of the b-vector (`fixed_b[j] = Some(value)` pins `b_j`).
///
/// Returns the unique triad when the system (plus the pinned entries)
/// determines all coefficients; otherwise reports the remaining degrees of
/// freedom or inconsistency.
pub fn solve_order_conditions(
    k: usize,
    q: usize,
    fixed_b: Option<&[Option<f64>]>,
) -> Result<SchemeTriad, SchemeError> {
    assert!(k >= 1, "step count must be positive");
    assert!(q >= 1 && q <= k, "order conditions are solvable for 1 <= q <= k");
    let (mut m, mut rhs) = order_condition_rows(k, q);
    let bcol = |j: usize| k + j;
    if let Some(fixed) = fixed_b {
        assert!(fixed.len() <= k + 1, "fixed b-vector longer than k+1");
        for (j, entry) in fixed.iter().enumerate() {
            if let Some(v) = entry {
                // Pinning row: b_j = v.
                let mut row = vec![Rat::zero(); 3 * k + 1];
                row[bcol(j)] = Rat::one();
                m.push(row);
                rhs.push(rat_from_f64(*v));
            }
        }
    }
    let status = rref_solve(m, rhs)?;
    let var_name = |i: usize| -> String {
        if i < k {
            format!("a{}", i)
        } else if i <= 2 * k {
            format!("b{}", i - k)
        } else {
            format!("c{}", i - 2 * k - 1)
        }
    };
    let free: Vec<String> = status
        .iter()
        .enumerate()
        .filter(|(_, s)| !matches!(s, VarStatus::Determined(_)))
        .map(|(i, _)| var_name(i))
        .collect();
    if !free.is_empty() {
        return Err(SchemeError::Underdetermined { dof: free.len(), cols: free });
    }
    let value = |i: usize| -> Rat {
        match &status[i] {
            VarStatus::Determined(v) => v.clone(),
            _ => unreachable!("checked above"),
        }
    };
    let a: Vec<Rat> = (0..k).map(value).collect();
    let b: Vec<Rat> = (k..=2 * k).map(value).collect();
    let c: Vec<Rat> = (2 * k + 1..3 * k + 1).map(value).collect();
    let af: Vec<f64> = a.iter().map(rat_to_f64).collect();
    let bf: Vec<f64> = b.iter().map(rat_to_f64).collect();
    let cf: Vec<f64> = c.iter().map(rat_to_f64).collect();
    let zero_stable = triad_zero_stable(&af, &bf, &cf)?;
    Ok(SchemeTriad {
        family: Family::Custom,
        k,
        param: 0.0,
        a: af,
        b: bf,
        c: cf,
        zero_stable,
        exact: Some(ExactTriad { a, b, c }),
    })
}

/// Value forced upon `b₀` by the order-(k+1) conditions.
///
/// The implicit/explicit matching block of the order conditions at order
/// `q = k+1`,
///
/// ```text
/// Σ_{j=0}^{k} b_j (−j)^{ℓ−1} = Σ_{j=0}^{k−1} c_j (−j−1)^{ℓ−1},  1 ≤ ℓ ≤ k+1,
/// ```
///
/// is a homogeneous Vandermonde-type system in the 2k+1 weight unknowns.
/// Exact elimination shows `b₀` is pinned by it regardless of the remaining
/// freedom; the returned value (always 0) is the computed pin. This is the
/// k-step order barrier: no k-step scheme of this family shape reaches
/// order k+1 with a genuinely implicit operator weight.
pub fn order_barrier_b0(k: usize) -> Result<f64, SchemeError> {
    assert!(k >= 1);
    let nvars = 2 * k + 1; // b_0..b_k, c_0..c_{k−1}
    let mut m = Vec::new();
    let mut rhs = Vec::new();
    for l in 1..=(k + 1) {
        let mut row = vec![Rat::zero(); nvars];
        for j in 0..=k {
            row[j] = ripow(-(j as i64), l - 1);
        }
        for j in 0..k {
            row[k + 1 + j] = -ripow(-(j as i64) - 1, l - 1);
        }
        m.push(row);
        rhs.push(Rat::zero());
    }
    match rref_solve(m, rhs)?.first() {
        Some(VarStatus::Determined(v)) => Ok(rat_to_f64(v)),
        _ => Err(SchemeError::Inconsistent),
    }
}

/// Residual of the order-ℓ condition pair for a triad, in `f64`, on the
/// normalized grid shifted by `n` (the conditions are translation-invariant;
/// nonzero `n` exercises that).
pub fn order_residual(scheme: &SchemeTriad, l: usize, n: i64) -> (f64, f64) {
    let fpow = |base: i64, e: usize| -> f64 {
        if e == 0 {
            1.0
        } else {
            (base as f64).powi(e as i32)
        }
    };
    let t = |j: i64| n - j; // grid point index t_{n-j} = n − j
    let mut lhs_a = 0.0;
    for (j, &aj) in scheme.a.iter().enumerate() {
        lhs_a += aj * (fpow(t(j as i64), l) - fpow(t(j as i64 + 1), l));
    }
    let mut sum_b = 0.0;
    for (j, &bj) in scheme.b.iter().enumerate() {
        sum_b += bj * fpow(t(j as i64), l - 1);
    }
    let mut sum_c = 0.0;
    for (j, &cj) in scheme.c.iter().enumerate() {
        sum_c += cj * fpow(t(j as i64 + 1), l - 1);
    }
    let lf = l as f64;
    (lhs_a - lf * sum_b, lf * (sum_b - sum_c))
}

/// Leading truncation coefficients of an order-k triad.
///
/// The local residual of an order-q scheme is
/// `coeff_u · u^{(q+1)}(t_n) τ^q + coeff_f · (d^q/dt^q)F(u(t_n)) τ^q + O(τ^{q+1})`,
/// with both coefficients evaluated on the normalized grid. Catalog schemes
/// carry exact rational vectors and the coefficients are computed exactly;
/// custom triads fall back to `f64`.
pub fn truncation_leading(scheme: &SchemeTriad) -> Result<TruncationReport, SchemeError> {
    let k = scheme.k;
    let q = k;
    // Verify the scheme actually satisfies its order conditions.
    for l in 1..=q {
        let (r1, r2) = order_residual(scheme, l, 0);
        let residual = r1.abs().max(r2.abs());
        let scale = scheme
            .a
            .iter()
            .chain(&scheme.b)
            .chain(&scheme.c)
            .fold(1.0f64, |m, v| m.max(v.abs()))
            * (k as f64 + 1.0).powi(q as i32);
        if residual > 1e-8 * scale {
            return Err(SchemeError::InconsistentScheme { q: l, residual });
        }
    }
    let factorial = |n: usize| -> Rat {
        let mut acc = Rat::one();
        for i in 2..=n {
            acc *= rat(i as i64, 1);
        }
        acc
    };
    if let Some((a, b, c)) = scheme.exact_vectors() {
        let mut num_u = Rat::zero();
        for (j, aj) in a.iter().enumerate() {
            num_u += aj * (ripow(-(j as i64), q + 1) - ripow(-(j as i64) - 1, q + 1));
        }
        let mut sum_bq = Rat::zero();
        for (j, bj) in b.iter().enumerate() {
            sum_bq += bj * ripow(-(j as i64), q);
        }
        num_u -= rat((q + 1) as i64, 1) * &sum_bq;
        let mut num_f = sum_bq.clone();
        for (j, cj) in c.iter().enumerate() {
            num_f -= cj * ripow(-(j as i64) - 1, q);
        }
        let coeff_u = rat_to_f64(&(num_u / factorial(q + 1)));
        let coeff_f = rat_to_f64(&(num_f / factorial(q)));
        Ok(TruncationReport { q, coeff_u, coeff_f })
    } else {
        let fpow = |base: i64, e: usize| (base as f64).powi(e as i32);
        let mut num_u = 0.0;
        for (j, &aj) in scheme.a.iter().enumerate() {
            num_u += aj * (fpow(-(j as i64), q + 1) - fpow(-(j as i64) - 1, q + 1));
        }
        let mut sum_bq = 0.0;
        for (j, &bj) in scheme.b.iter().enumerate() {
            sum_bq += bj * if q == 0 { 1.0 } else { fpow(-(j as i64), q) };
        }
        num_u -= (q + 1) as f64 * sum_bq;
        let mut num_f = sum_bq;
        for (j, &cj) in scheme.c.iter().enumerate() {
            num_f -= cj * fpow(-(j as i64) - 1, q);
        }
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>().max(1.0);
        Ok(TruncationReport { q, coeff_u: num_u / fact(q + 1), coeff_f: num_f / fact(q) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(x: f64, y: f64, tol: f64) {
        assert!((x - y).abs() <= tol, "{x} vs {y} (tol {tol})");
    }

    #[test]
    fn euler_triad() {
        let s = SchemeTriad::euler();
        assert_eq!(s.k, 1);
        assert_eq!(s.a, vec![1.0]);
        assert_eq!(s.b, vec![1.0, 0.0]);
        assert_eq!(s.c, vec![1.0]);
        assert!(s.zero_stable);
    }

    #[test]
    fn wbdf2_alpha_one_is_bdf2() {
        let s = make_scheme(Family::Wbdf, 2, 1.0).unwrap();
        assert_eq!(s.a, vec![1.5, -0.5]);
        assert_eq!(s.b, vec![1.0, 0.0, 0.0]);
        assert_eq!(s.c, vec![2.0, -1.0]);
    }

    #[test]
    fn mbdf2_at_s_five() {
        let s = make_scheme(Family::Mbdf, 2, 5.0).unwrap();
        assert_eq!(s.a, vec![1.5, -0.5]);
        assert_eq!(s.b, vec![1.25, -0.5, 0.25]);
        assert_eq!(s.c, vec![2.0, -1.0]);
    }

    #[test]
    fn gbdf3_beta_one_is_bdf3() {
        let s = make_scheme(Family::Gbdf, 3, 1.0).unwrap();
        let bdf3 = make_scheme(Family::Bdf, 3, 0.0).unwrap();
        for (x, y) in s.a.iter().zip(bdf3.a.iter()) {
            assert_close(*x, *y, 1e-14);
        }
        assert_eq!(s.b, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.c, vec![3.0, -3.0, 1.0]);
    }

    #[test]
    fn nimex2_delta_one_is_bdf2() {
        let s = make_scheme(Family::Nimex, 2, 1.0).unwrap();
        assert_eq!(s.a, vec![1.5, -0.5]);
        assert_eq!(s.b, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn siems3_gamma_one_coefficients() {
        let s = make_scheme(Family::Siems, 3, 1.0).unwrap();
        let expect = [11.0 / 6.0, -7.0 / 6.0, 1.0 / 3.0];
        for (x, y) in s.a.iter().zip(expect.iter()) {
            assert_close(*x, *y, 1e-14);
        }
    }

    #[test]
    fn unsupported_orders_error() {
        assert!(matches!(
            make_scheme(Family::Wbdf, 6, 1.0),
            Err(SchemeError::UnsupportedOrder { .. })
        ));
        assert!(matches!(
            make_scheme(Family::Bdf, 7, 0.0),
            Err(SchemeError::UnsupportedOrder { .. })
        ));
    }

    #[test]
    fn consistency_sums_are_one() {
        for (family, k) in catalog() {
            let s = make_scheme(family, k, representative_param(family, k)).unwrap();
            let (a, b, c) = s.exact_vectors().unwrap();
            for v in [a, b, c] {
                let sum = v.iter().fold(Rat::zero(), |acc, x| acc + x);
                assert!(sum.is_one(), "{family} k={k}: coefficient sum {sum} != 1");
            }
            assert!(s.a[0] > 0.0 && s.b[0] > 0.0 && s.c[0] > 0.0, "{family} k={k} leading signs");
        }
    }

    #[test]
    fn pairing_identity_exact() {
        // ϱ_c = ϱ_b − b₀(ζ−1)^k coefficientwise, exactly, for the catalog.
        let zeta_minus_one = RatPoly::new(vec![-Rat::one(), Rat::one()]);
        for (family, k) in catalog() {
            let s = make_scheme(family, k, representative_param(family, k)).unwrap();
            let (_, b, c) = s.exact_vectors().unwrap();
            let mut rho_b_coeffs = vec![Rat::zero(); k + 1];
            for (j, bj) in b.iter().enumerate() {
                rho_b_coeffs[k - j] = bj.clone();
            }
            let rho_b = RatPoly::new(rho_b_coeffs);
            let expect = rho_b.sub(&zeta_minus_one.pow(k).scale(&b[0]));
            let mut rho_c_coeffs = vec![Rat::zero(); k];
            for (j, cj) in c.iter().enumerate() {
                rho_c_coeffs[k - 1 - j] = cj.clone();
            }
            let rho_c = RatPoly::new(rho_c_coeffs);
            assert_eq!(rho_c, expect, "{family} k={k}");
        }
    }

    #[test]
    fn catalog_representatives_zero_stable() {
        for (family, k) in catalog() {
            let s = make_scheme(family, k, representative_param(family, k)).unwrap();
            assert!(s.zero_stable, "{family} k={k} at representative parameter");
        }
    }

    #[test]
    fn order_conditions_hold_on_translated_grids() {
        for (family, k) in catalog() {
            let s = make_scheme(family, k, representative_param(family, k)).unwrap();
            for l in 1..=k {
                for n in [0i64, 3, -7, 20] {
                    let (r1, r2) = order_residual(&s, l, n);
                    let tol = 1e-10
                        * s.a.iter().chain(&s.b).chain(&s.c).fold(1.0f64, |m, v| m.max(v.abs()))
                        * ((k as f64 + n.unsigned_abs() as f64 + 1.0).powi(l as i32));
                    assert!(
                        r1.abs() <= tol && r2.abs() <= tol,
                        "{family} k={k} l={l} n={n}: residuals {r1:.2e}, {r2:.2e}"
                    );
                }
            }
        }
    }

    #[test]
    fn solver_euler() {
        let s = solve_order_conditions(1, 1, Some(&[Some(1.0), Some(0.0)])).unwrap();
        assert_eq!(s.a, vec![1.0]);
        assert_eq!(s.c, vec![1.0]);
    }

    #[test]
    fn solver_weighted_two_step() {
        // Fixing b = (α, 1−α, 0) at α = 3 pins the rest of the triad.
        let s = solve_order_conditions(2, 2, Some(&[Some(3.0), Some(-2.0), Some(0.0)])).unwrap();
        assert_eq!(s.a, vec![3.5, -2.5]);
        assert_eq!(s.c, vec![4.0, -3.0]);
    }

    #[test]
    fn solver_matches_catalog() {
        // With the catalog b-vector pinned, the solver reproduces a and c.
        for (family, k) in catalog() {
            let s = make_scheme(family, k, representative_param(family, k)).unwrap();
            let fixed: Vec<Option<f64>> = s.b.iter().map(|&v| Some(v)).collect();
            let solved = solve_order_conditions(k, k, Some(&fixed)).unwrap();
            for (x, y) in s.a.iter().zip(solved.a.iter()) {
                assert_close(*x, *y, 1e-10);
            }
            for (x, y) in s.c.iter().zip(solved.c.iter()) {
                assert_close(*x, *y, 1e-10);
            }
        }
    }

    #[test]
    fn solver_reports_freedom() {
        // k=2, q=1 leaves free parameters.
        match solve_order_conditions(2, 1, None) {
            Err(SchemeError::Underdetermined { dof, .. }) => assert!(dof > 0),
            other => panic!("expected underdetermined, got {other:?}"),
        }
    }

    #[test]
    fn order_barrier_pins_b0_to_zero() {
        for k in 1..=6 {
            let b0 = order_barrier_b0(k).unwrap();
            assert!(b0.abs() <= 1e-10, "k={k}: b0 = {b0}");
        }
    }

    #[test]
    fn truncation_examples() {
        let w = truncation_leading(&make_scheme(Family::Wbdf, 2, 1.0).unwrap()).unwrap();
        assert_close(w.coeff_u, -1.0 / 3.0, 1e-14);
        assert_close(w.coeff_f, 1.0, 1e-14);
        let s = truncation_leading(&make_scheme(Family::Siems, 3, 1.0).unwrap()).unwrap();
        assert_close(s.coeff_u, -0.25, 1e-14);
        assert_close(s.coeff_f, 1.0, 1e-14);
        let n = truncation_leading(&make_scheme(Family::Nimex, 2, 1.0).unwrap()).unwrap();
        assert_close(n.coeff_u, -1.0 / 3.0, 1e-14);
        assert_close(n.coeff_f, 1.0, 1e-14);
    }

    #[test]
    fn truncation_rejects_inconsistent() {
        let bad = SchemeTriad::custom(vec![0.9, 0.2], vec![1.0, 0.0, 0.0], vec![2.0, -1.0]).unwrap();
        assert!(matches!(truncation_leading(&bad), Err(SchemeError::InconsistentScheme { .. })));
    }

    #[test]
    fn json_roundtrip_digits() {
        let s = make_scheme(Family::Wbdf, 2, 1.0).unwrap();
        let v = s.to_json();
        assert_eq!(v["family"], "wbdf");
        let a0: f64 = v["a"][0].as_str().unwrap().parse().unwrap();
        assert_eq!(a0, 1.5);
    }
}
