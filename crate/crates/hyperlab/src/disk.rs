//! Closed-form invariant distances on the model domains: the unit disk, the
//! Euclidean unit ball, and the left half-plane.
//!
//! Every distance in this crate uses the normalization in which the distance
//! from the origin of the unit disk to a point at radius `t` equals
//! `arctanh(t)`. Conversions from other conventions (factors of 2, `log`
//! quotients) happen at call sites, never here.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cnorm, hermitian_inner, CVector};

/// Modulus beyond which a point is rejected as lying outside the open disk or
/// ball. Slightly above 1 so that boundary-adjacent samples produced by the
/// domain generators (which guarantee a strict interior margin) are never
/// rejected by rounding alone.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Numerically stable `arctanh` for `|x| < 1`.
///
/// Uses `ln_1p` on both tails so that values extremely close to ±1 (radius
/// `1 - 1/n` sequences with large `n`) keep full relative accuracy instead of
/// cancelling inside `ln((1+x)/(1-x))`.
pub fn arctanh(x: f64) -> f64 {
    0.5 * ((x).ln_1p() - (-x).ln_1p())
}

/// Poincaré distance between two points of the open unit disk,
/// `arctanh` of the Möbius-invariant pseudo-ratio `|(z - w)/(1 - conj(w) z)|`.
pub fn poincare_distance(z: Complex64, w: Complex64) -> Result<f64> {
    for point in [z, w] {
        let modulus = point.norm();
        if modulus >= 1.0 + UNIT_MODULUS_TOL || !point.is_finite() {
            return Err(Error::OutsideDisk { modulus });
        }
    }
    let numerator = z - w;
    let denominator = Complex64::new(1.0, 0.0) - w.conj() * z;
    let ratio = (numerator / denominator).norm().min(1.0 - f64::EPSILON);
    Ok(arctanh(ratio))
}

/// Invariant distance between two points of the open Euclidean unit ball in
/// `C^n`.
///
/// Computed through the automorphism-invariant quantity
/// `1 - rho^2 = (1 - |z|^2)(1 - |w|^2) / |1 - <z, w>|^2`,
/// which reduces to the Poincaré pseudo-ratio when `n = 1`. The distance is
/// `arctanh(rho)`.
pub fn ball_distance(z: &CVector, w: &CVector) -> Result<f64> {
    for point in [z, w] {
        let norm = cnorm(point);
        if norm >= 1.0 + UNIT_MODULUS_TOL || !norm.is_finite() {
            return Err(Error::OutsideBall { norm });
        }
    }
    let zz = 1.0 - cnorm(z).powi(2);
    let ww = 1.0 - cnorm(w).powi(2);
    let cross = (Complex64::new(1.0, 0.0) - hermitian_inner(z, w)).norm_sqr();
    // `cross` is bounded below by zz*ww by Cauchy-Schwarz, so the quotient is
    // in (0, 1]; clamp to absorb rounding at coincident points.
    let one_minus_rho_sq = (zz * ww / cross).clamp(0.0, 1.0);
    let rho = (1.0 - one_minus_rho_sq).max(0.0).sqrt();
    Ok(arctanh(rho.min(1.0 - f64::EPSILON)))
}

/// Invariant distance on the left half-plane `{ Re w < 0 }`, the biholomorphic
/// model used by the supporting-functional lower bound.
///
/// The Möbius map `w -> (w - w0)/(w + conj(w0))` sends the left half-plane
/// onto the unit disk with `w0 -> 0` (the denominator dominates the numerator
/// exactly when `Re(w) Re(w0) > 0`), so the distance is the `arctanh` of the
/// corresponding cross-ratio modulus.
pub fn left_halfplane_distance(w1: Complex64, w2: Complex64) -> Result<f64> {
    for point in [w1, w2] {
        if point.re >= 0.0 || !point.is_finite() {
            return Err(Error::InvalidInput(format!(
                "left half-plane distance requires Re < 0, got {point}"
            )));
        }
    }
    let ratio = ((w1 - w2) / (w1 + w2.conj())).norm().min(1.0 - f64::EPSILON);
    Ok(arctanh(ratio))
}

/// Lower bound, depending only on the dilatation bound `k`, for the radius of
/// a disk around the image of the origin that a normalized `k`-quasiconformal
/// self-map of the disk must cover: `(1/32)^{(1+k)/(1-k)}`.
///
/// The exponent equals 1 exactly when `k = 0`; that case is returned as the
/// literal `1/32` so the holomorphic baseline is exact rather than a `powf`
/// rounding of itself.
pub fn kiernan_threshold(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) || !k.is_finite() {
        return Err(Error::InvalidDilatation { value: k });
    }
    let exponent = (1.0 + k) / (1.0 - k);
    if exponent == 1.0 {
        return Ok(1.0 / 32.0);
    }
    Ok((1.0 / 32.0_f64).powf(exponent))
}
