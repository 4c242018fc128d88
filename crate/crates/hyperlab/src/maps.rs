//! The smooth map families under study: disk and ball automorphisms, real-
//! linear maps with an antiholomorphic part, the spiral boundary-twist map on
//! the disk, deformed automorphisms, custom polynomial maps in z and conj(z),
//! and numerically inverted maps.
//!
//! Every family carries closed-form Wirtinger derivative blocks; finite
//! differences exist as an independent cross-check (and as the only route for
//! maps ingested without derivatives).

use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// Default central-difference step for derivative checks.
pub const FD_STEP_DEFAULT: f64 = 1e-5;

/// Data backing a numerically inverted map: the forward map, a cache of
/// forward samples used to initialize Newton iterations, and the Newton
/// stopping tolerance. Built by the pushforward module; immutable afterwards.
#[derive(Clone, Debug)]
pub struct InverseData {
    pub forward: SmoothMapSpec,
    pub cache: Vec<(CVector, CVector)>,
    pub newton_tolerance: f64,
    pub bounding_radius: f64,
}

/// The built-in map families.
#[derive(Clone, Debug)]
pub enum MapKind {
    /// z ↦ z on ℂⁿ.
    Identity,
    /// Disk automorphism ζ ↦ e^{iθ}·(ζ − a)/(1 − conj(a)·ζ).
    MobiusDisk { a: Complex64, theta: f64 },
    /// Ball automorphism φ_a exchanging 0 and a (an involution).
    BallAutomorphism { a: CVector },
    /// Spiral twist ζ ↦ ζ·exp(i/(1 − |ζ|)) on the unit disk; the modulus is
    /// preserved while the argument winds unboundedly near the boundary.
    SpiralTwist,
    /// z ↦ A·z + B·conj(z).
    LinearAntiholo { a: CMatrix, b: CMatrix },
    /// Disk automorphism blended with its conjugate:
    /// ζ ↦ (φ(ζ) + ε·conj(φ(ζ)))/(1 + ε), a self-map of the disk with
    /// pointwise quasiconformality constant exactly ε.
    DeformedAutomorphism { epsilon: f64, a: Complex64 },
    /// Componentwise polynomials in (z, conj z).
    CustomPolynomial { components: Vec<Vec<PolyMapTerm>> },
    /// Numerical inverse of another map (Newton iteration, cached starts).
    NumericInverse(Arc<InverseData>),
}

/// One monomial coeff · Π zⱼ^powers[j] · Π conj(zⱼ)^powers[n+j] of a
/// polynomial map component.
#[derive(Clone, Debug)]
pub struct PolyMapTerm {
    pub coeff: Complex64,
    pub powers: Vec<u32>,
}

/// A smooth map together with its derivative strategy.
#[derive(Clone, Debug)]
pub struct SmoothMapSpec {
    pub source_dim: usize,
    pub target_dim: usize,
    pub kind: MapKind,
    /// Central-difference step used when closed-form derivatives are absent
    /// or suppressed.
    pub fd_step: f64,
    /// When false, derivative queries ignore the closed forms and use finite
    /// differences (cross-check plumbing; defaults to true).
    pub prefer_analytic: bool,
}

impl SmoothMapSpec {
    fn new(source_dim: usize, target_dim: usize, kind: MapKind) -> Self {
        Self {
            source_dim,
            target_dim,
            kind,
            fd_step: FD_STEP_DEFAULT,
            prefer_analytic: true,
        }
    }

    /// Identity on ℂⁿ.
    pub fn identity(dimension: usize) -> Self {
        Self::new(dimension, dimension, MapKind::Identity)
    }

    /// Disk automorphism ζ ↦ e^{iθ}(ζ − a)/(1 − conj(a)ζ); requires |a| < 1.
    pub fn mobius_disk(a: Complex64, theta: f64) -> Result<Self> {
        if a.norm() >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "Mobius parameter must satisfy |a| < 1, got |a| = {}",
                a.norm()
            )));
        }
        Ok(Self::new(1, 1, MapKind::MobiusDisk { a, theta }))
    }

    /// Ball automorphism φ_a with φ_a(0) = a, φ_a(a) = 0, φ_a ∘ φ_a = id.
    pub fn ball_automorphism(a: CVector) -> Result<Self> {
        let n = a.len();
        if a.norm() >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "ball automorphism parameter must satisfy |a| < 1, got {}",
                a.norm()
            )));
        }
        Ok(Self::new(n, n, MapKind::BallAutomorphism { a }))
    }

    /// The spiral boundary-twist self-map of the disk.
    pub fn spiral_twist() -> Self {
        Self::new(1, 1, MapKind::SpiralTwist)
    }

    /// z ↦ A·z + B·conj(z).
    pub fn linear_antiholo(a: CMatrix, b: CMatrix) -> Result<Self> {
        if a.shape() != b.shape() || a.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "linear map blocks must share a nonempty shape, got {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        let (m, n) = a.shape();
        Ok(Self::new(n, m, MapKind::LinearAntiholo { a, b }))
    }

    /// (φ_a + ε·conj ∘ φ_a)/(1 + ε) on the disk; ε ∈ [0, 1).
    pub fn deformed_automorphism(epsilon: f64, a: Complex64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidInput(format!(
                "deformation must satisfy 0 <= epsilon < 1, got {epsilon}"
            )));
        }
        if a.norm() >= 1.0 {
            return Err(Error::InvalidInput(format!(
                "automorphism parameter must satisfy |a| < 1, got {}",
                a.norm()
            )));
        }
        Ok(Self::new(1, 1, MapKind::DeformedAutomorphism { epsilon, a }))
    }

    /// Componentwise polynomial map in (z, conj z); `components[i]` lists the
    /// monomials of output coordinate i, each with 2·source_dim exponents.
    pub fn custom_polynomial(
        source_dim: usize,
        components: Vec<Vec<PolyMapTerm>>,
    ) -> Result<Self> {
        if source_dim == 0 || components.is_empty() {
            return Err(Error::InvalidInput(
                "polynomial map needs positive dimensions".into(),
            ));
        }
        for comp in &components {
            for term in comp {
                if term.powers.len() != 2 * source_dim {
                    return Err(Error::InvalidInput(format!(
                        "polynomial term has {} exponents, expected {}",
                        term.powers.len(),
                        2 * source_dim
                    )));
                }
            }
        }
        let target_dim = components.len();
        Ok(Self::new(
            source_dim,
            target_dim,
            MapKind::CustomPolynomial { components },
        ))
    }

    /// Evaluate the map. Non-finite results are reported as errors rather
    /// than propagated silently.
    pub fn evaluate(&self, z: &CVector) -> Result<CVector> {
        assert_eq!(z.len(), self.source_dim, "dimension mismatch");
        let value = match &self.kind {
            MapKind::Identity => z.clone(),
            MapKind::MobiusDisk { a, theta } => {
                let zeta = z[0];
                let w = Complex64::from_polar(1.0, *theta) * (zeta - a)
                    / (Complex64::new(1.0, 0.0) - a.conj() * zeta);
                CVector::from_element(1, w)
            }
            MapKind::BallAutomorphism { a } => {
                let (numerator, delta) = ball_automorphism_parts(a, z);
                numerator / delta
            }
            MapKind::SpiralTwist => {
                let zeta = z[0];
                let r = zeta.norm();
                if r == 0.0 {
                    // Removable point: the map extends continuously by 0.
                    CVector::from_element(1, Complex64::new(0.0, 0.0))
                } else {
                    let phase = (Complex64::i() / (1.0 - r)).exp();
                    CVector::from_element(1, zeta * phase)
                }
            }
            MapKind::LinearAntiholo { a, b } => a * z + b * z.map(|c| c.conj()),
            MapKind::DeformedAutomorphism { epsilon, a } => {
                let phi = mobius_involution(*a, z[0]);
                CVector::from_element(1, (phi + epsilon * phi.conj()) / (1.0 + epsilon))
            }
            MapKind::CustomPolynomial { components } => CVector::from_fn(
                self.target_dim,
                |i, _| {
                    components[i]
                        .iter()
                        .map(|t| t.coeff * monomial(z, &t.powers))
                        .sum()
                },
            ),
            MapKind::NumericInverse(data) => crate::pushforward::evaluate_inverse(data, z)?,
        };
        if value.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                point: format!("{z:.6}"),
            });
        }
        Ok(value)
    }

    /// Closed-form Wirtinger blocks (∂F, ∂̄F) when the family has them and
    /// `prefer_analytic` is set; `None` means callers must fall back to
    /// finite differences.
    pub fn analytic_blocks(&self, z: &CVector) -> Option<Result<(CMatrix, CMatrix)>> {
        if !self.prefer_analytic {
            return None;
        }
        let n = self.source_dim;
        Some(match &self.kind {
            MapKind::Identity => Ok((CMatrix::identity(n, n), CMatrix::zeros(n, n))),
            MapKind::MobiusDisk { a, theta } => {
                let zeta = z[0];
                let denom = Complex64::new(1.0, 0.0) - a.conj() * zeta;
                let holo = Complex64::from_polar(1.0, *theta) * (1.0 - a.norm_sqr())
                    / (denom * denom);
                Ok((
                    CMatrix::from_element(1, 1, holo),
                    CMatrix::zeros(1, 1),
                ))
            }
            MapKind::BallAutomorphism { a } => {
                let (numerator, delta) = ball_automorphism_parts(a, z);
                let m = contraction_matrix(a);
                // d/dz of N(z)/δ(z) with ∂δ/∂zⱼ = −conj(aⱼ):
                // ∂φ = N·conj(a)ᵀ/δ² − M/δ. The map is holomorphic, ∂̄φ = 0.
                let mut holo = CMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        holo[(i, j)] =
                            numerator[i] * a[j].conj() / (delta * delta) - m[(i, j)] / delta;
                    }
                }
                Ok((holo, CMatrix::zeros(n, n)))
            }
            MapKind::SpiralTwist => {
                let zeta = z[0];
                let r = zeta.norm();
                if r == 0.0 {
                    return Some(Err(Error::UndefinedDerivative {
                        point: format!("{z:.6}"),
                    }));
                }
                let phase = (Complex64::i() / (1.0 - r)).exp();
                let common = Complex64::i() / (2.0 * r * (1.0 - r) * (1.0 - r));
                let holo = (Complex64::new(1.0, 0.0) + common * zeta * zeta.conj()) * phase;
                let anti = common * zeta * zeta * phase;
                Ok((
                    CMatrix::from_element(1, 1, holo),
                    CMatrix::from_element(1, 1, anti),
                ))
            }
            MapKind::LinearAntiholo { a, b } => Ok((a.clone(), b.clone())),
            MapKind::DeformedAutomorphism { epsilon, a } => {
                let zeta = z[0];
                let denom = Complex64::new(1.0, 0.0) - a.conj() * zeta;
                let phi_prime = (a.norm_sqr() - 1.0) / (denom * denom);
                // ∂̄ of conj(φ(ζ)) is conj(∂φ/∂ζ) = conj(φ′).
                Ok((
                    CMatrix::from_element(1, 1, phi_prime / (1.0 + epsilon)),
                    CMatrix::from_element(1, 1, epsilon * phi_prime.conj() / (1.0 + epsilon)),
                ))
            }
            MapKind::CustomPolynomial { components } => {
                let mut holo = CMatrix::zeros(self.target_dim, n);
                let mut anti = CMatrix::zeros(self.target_dim, n);
                for (i, comp) in components.iter().enumerate() {
                    for term in comp {
                        for j in 0..n {
                            holo[(i, j)] += term.coeff * monomial_partial(z, &term.powers, j);
                            anti[(i, j)] += term.coeff * monomial_partial(z, &term.powers, n + j);
                        }
                    }
                }
                Ok((holo, anti))
            }
            MapKind::NumericInverse(data) => crate::pushforward::inverse_blocks(data, z),
        })
    }
}

/// Value of Π zⱼ^powers[j] · Π conj(zⱼ)^powers[n+j].
fn monomial(z: &CVector, powers: &[u32]) -> Complex64 {
    let n = z.len();
    let mut value = Complex64::new(1.0, 0.0);
    for j in 0..n {
        value *= z[j].powu(powers[j]);
        value *= z[j].conj().powu(powers[n + j]);
    }
    value
}

/// Partial derivative of the monomial with respect to variable `index`
/// (0..n = zⱼ, n..2n = conj(zⱼ)).
fn monomial_partial(z: &CVector, powers: &[u32], index: usize) -> Complex64 {
    let e = powers[index];
    if e == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let n = z.len();
    let mut value = Complex64::new(e as f64, 0.0);
    for j in 0..n {
        let (ez, ec) = (powers[j], powers[n + j]);
        let dz = if index == j { ez - 1 } else { ez };
        let dc = if index == n + j { ec - 1 } else { ec };
        value *= z[j].powu(dz);
        value *= z[j].conj().powu(dc);
    }
    value
}

/// The self-inverse disk automorphism ζ ↦ (a − ζ)/(1 − conj(a)ζ).
fn mobius_involution(a: Complex64, zeta: Complex64) -> Complex64 {
    (a - zeta) / (Complex64::new(1.0, 0.0) - a.conj() * zeta)
}

/// The linear contraction M = s·I + (1 − s)·P entering the ball automorphism,
/// where P projects onto the a-line and s = √(1 − |a|²).
fn contraction_matrix(a: &CVector) -> CMatrix {
    let n = a.len();
    let norm_sq = a.norm_squared();
    let s = (1.0 - norm_sq).max(0.0).sqrt();
    if norm_sq < 1e-300 {
        return CMatrix::identity(n, n);
    }
    let mut m = CMatrix::identity(n, n) * Complex64::new(s, 0.0);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += (1.0 - s) * a[i] * a[j].conj() / norm_sq;
        }
    }
    m
}

/// Numerator a − M·z and denominator 1 − ⟨z, a⟩ of the ball automorphism.
fn ball_automorphism_parts(a: &CVector, z: &CVector) -> (CVector, Complex64) {
    let m = contraction_matrix(a);
    let numerator = a - m * z;
    let delta = Complex64::new(1.0, 0.0)
        - z.iter().zip(a.iter()).map(|(zj, aj)| zj * aj.conj()).sum::<Complex64>();
    (numerator, delta)
}

/// Raw JSON shape of a map spec file.
#[derive(Deserialize)]
struct RawMapSpec {
    kind: String,
    #[serde(default)]
    params: serde_json::Value,
}

#[derive(Deserialize)]
struct RawMobiusParams {
    a: [f64; 2],
    #[serde(default)]
    theta: f64,
}

#[derive(Deserialize)]
struct RawDeformedParams {
    epsilon: f64,
    #[serde(default)]
    a: Option<[f64; 2]>,
}

#[derive(Deserialize)]
struct RawLinearParams {
    a: Vec<Vec<[f64; 2]>>,
    b: Vec<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
struct RawBallAutoParams {
    a: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct RawPolyMapParams {
    source_dim: usize,
    components: Vec<Vec<RawPolyMapTerm>>,
}

#[derive(Deserialize)]
struct RawPolyMapTerm {
    coeff: [f64; 2],
    powers: Vec<u32>,
}

#[derive(Deserialize)]
struct RawIdentityParams {
    dimension: usize,
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let m = rows.len();
    if m == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(Error::InvalidInput("matrix rows must be nonempty and rectangular".into()));
    }
    let n = rows[0].len();
    Ok(CMatrix::from_fn(m, n, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

impl SmoothMapSpec {
    /// Parse a map spec from its JSON text form.
    pub fn from_spec_str(text: &str) -> Result<Self> {
        let raw: RawMapSpec = serde_json::from_str(text).map_err(|e| Error::SpecFile {
            path: "<inline>".into(),
            message: e.to_string(),
        })?;
        let bad_params = |e: serde_json::Error| Error::SpecFile {
            path: "<params>".into(),
            message: e.to_string(),
        };
        match raw.kind.as_str() {
            "identity" => {
                let p: RawIdentityParams =
                    serde_json::from_value(raw.params).map_err(bad_params)?;
                Ok(Self::identity(p.dimension))
            }
            "mobius" => {
                let p: RawMobiusParams = serde_json::from_value(raw.params).map_err(bad_params)?;
                Self::mobius_disk(Complex64::new(p.a[0], p.a[1]), p.theta)
            }
            "example-2-2" | "spiral-twist" => Ok(Self::spiral_twist()),
            "linear-antiholo" => {
                let p: RawLinearParams = serde_json::from_value(raw.params).map_err(bad_params)?;
                Self::linear_antiholo(matrix_from_rows(&p.a)?, matrix_from_rows(&p.b)?)
            }
            "deformed-automorphism" => {
                let p: RawDeformedParams =
                    serde_json::from_value(raw.params).map_err(bad_params)?;
                let a = p.a.map_or(Complex64::new(0.0, 0.0), |v| Complex64::new(v[0], v[1]));
                Self::deformed_automorphism(p.epsilon, a)
            }
            "ball-automorphism" => {
                let p: RawBallAutoParams =
                    serde_json::from_value(raw.params).map_err(bad_params)?;
                let a = CVector::from_fn(p.a.len(), |j, _| Complex64::new(p.a[j][0], p.a[j][1]));
                Self::ball_automorphism(a)
            }
            "custom-polynomial" => {
                let p: RawPolyMapParams =
                    serde_json::from_value(raw.params).map_err(bad_params)?;
                let components = p
                    .components
                    .into_iter()
                    .map(|comp| {
                        comp.into_iter()
                            .map(|t| PolyMapTerm {
                                coeff: Complex64::new(t.coeff[0], t.coeff[1]),
                                powers: t.powers,
                            })
                            .collect()
                    })
                    .collect();
                Self::custom_polynomial(p.source_dim, components)
            }
            other => Err(Error::InvalidInput(format!("unknown map kind '{other}'"))),
        }
    }

    /// Parse a map spec from a JSON file.
    pub fn from_spec_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::SpecFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_spec_str(&text).map_err(|e| match e {
            Error::SpecFile { message, .. } => Error::SpecFile {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })
    }
}

/// The spiral boundary-twist map ζ ↦ ζ·exp(i/(1 − |ζ|)) with its closed-form
/// derivative blocks attached.
pub fn example_boundary_twist() -> SmoothMapSpec {
    SmoothMapSpec::spiral_twist()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cvec;
    use crate::sampling::seeded_rng;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_evaluates_and_differentiates() {
        let id = SmoothMapSpec::identity(2);
        let z = cvec(&[c(0.3, -0.1), c(0.2, 0.5)]);
        assert_eq!(id.evaluate(&z).unwrap(), z);
        let (holo, anti) = id.analytic_blocks(&z).unwrap().unwrap();
        assert_eq!(holo, CMatrix::identity(2, 2));
        assert_eq!(anti, CMatrix::zeros(2, 2));
    }

    #[test]
    fn spiral_twist_matches_displayed_values() {
        let f = SmoothMapSpec::spiral_twist();
        // f(1 − 1/2) = 0.5·exp(2i).
        let v = f.evaluate(&cvec(&[c(0.5, 0.0)])).unwrap()[0];
        let expected = 0.5 * c(0.0, 2.0).exp();
        assert!((v - expected).norm() < 1e-14);
        // f(1 − 1/(2+π)) = −(1 − 1/(2+π))·exp(2i).
        let r = 1.0 - 1.0 / (2.0 + std::f64::consts::PI);
        let v = f.evaluate(&cvec(&[c(r, 0.0)])).unwrap()[0];
        let expected = -r * c(0.0, 2.0).exp();
        assert!((v - expected).norm() < 1e-13, "got {v}, expected {expected}");
        // Modulus is preserved.
        let mut rng = seeded_rng(7);
        for _ in 0..1000 {
            let zeta = c(rng.random::<f64>() * 1.8 - 0.9, rng.random::<f64>() * 1.8 - 0.9);
            if zeta.norm() >= 0.999 {
                continue;
            }
            let image = f.evaluate(&cvec(&[zeta])).unwrap()[0];
            assert!((image.norm() - zeta.norm()).abs() < 1e-12);
        }
        // Center: value 0, derivative undefined.
        assert_eq!(f.evaluate(&cvec(&[c(0.0, 0.0)])).unwrap()[0], c(0.0, 0.0));
        let err = f.analytic_blocks(&cvec(&[c(0.0, 0.0)])).unwrap().unwrap_err();
        assert!(matches!(err, Error::UndefinedDerivative { .. }));
    }

    #[test]
    fn spiral_twist_block_moduli_at_half() {
        let f = SmoothMapSpec::spiral_twist();
        let (holo, anti) = f.analytic_blocks(&cvec(&[c(0.5, 0.0)])).unwrap().unwrap();
        assert!((anti[(0, 0)].norm() - 1.0).abs() < 1e-12);
        assert!((holo[(0, 0)].norm() - 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mobius_is_an_automorphism_with_closed_form_derivative() {
        let a = c(0.4, -0.2);
        let f = SmoothMapSpec::mobius_disk(a, 0.7).unwrap();
        // a ↦ 0 and the disk maps inside itself.
        assert!(f.evaluate(&cvec(&[a])).unwrap()[0].norm() < 1e-15);
        let mut rng = seeded_rng(11);
        for _ in 0..500 {
            let zeta = c(rng.random::<f64>() * 1.8 - 0.9, rng.random::<f64>() * 1.8 - 0.9);
            if zeta.norm() >= 0.999 {
                continue;
            }
            assert!(f.evaluate(&cvec(&[zeta])).unwrap()[0].norm() < 1.0);
        }
        // Derivative against a central difference.
        let z = cvec(&[c(0.3, 0.25)]);
        let (holo, anti) = f.analytic_blocks(&z).unwrap().unwrap();
        assert!(anti[(0, 0)].norm() == 0.0);
        let h = 1e-6;
        let fp = f.evaluate(&cvec(&[z[0] + h])).unwrap()[0];
        let fm = f.evaluate(&cvec(&[z[0] - h])).unwrap()[0];
        let fd = (fp - fm) / (2.0 * h);
        assert!((fd - holo[(0, 0)]).norm() < 1e-8);
    }

    #[test]
    fn ball_automorphism_is_an_involution() {
        let a = cvec(&[c(0.3, 0.1), c(-0.2, 0.4)]);
        let f = SmoothMapSpec::ball_automorphism(a.clone()).unwrap();
        assert!((f.evaluate(&CVector::zeros(2)).unwrap() - &a).norm() < 1e-14);
        assert!(f.evaluate(&a).unwrap().norm() < 1e-14);
        let mut rng = seeded_rng(13);
        for _ in 0..300 {
            let z = cvec(&[
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            ]);
            if z.norm() >= 0.99 {
                continue;
            }
            let w = f.evaluate(&z).unwrap();
            assert!(w.norm() < 1.0, "automorphism left the ball");
            let back = f.evaluate(&w).unwrap();
            assert!((back - &z).norm() < 1e-12, "involution failed");
        }
    }

    #[test]
    fn ball_automorphism_derivative_matches_finite_differences() {
        let a = cvec(&[c(0.3, 0.1), c(-0.2, 0.4)]);
        let f = SmoothMapSpec::ball_automorphism(a).unwrap();
        let z = cvec(&[c(0.2, -0.3), c(0.1, 0.15)]);
        let (holo, anti) = f.analytic_blocks(&z).unwrap().unwrap();
        assert_eq!(anti, CMatrix::zeros(2, 2));
        let h = 1e-6;
        for j in 0..2 {
            // Holomorphic: F_x = holo·eⱼ and F_y = i·holo·eⱼ.
            for (step, multiplier) in [(c(h, 0.0), c(1.0, 0.0)), (c(0.0, h), c(0.0, 1.0))] {
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[j] += step;
                zm[j] -= step;
                let fd = (f.evaluate(&zp).unwrap() - f.evaluate(&zm).unwrap()) / c(2.0 * h, 0.0);
                for i in 0..2 {
                    let expected = holo[(i, j)] * multiplier;
                    let got = fd[i];
                    assert!(
                        (expected - got).norm() < 1e-7,
                        "column {j}, row {i}: {expected} vs {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn deformed_automorphism_ratio_is_epsilon() {
        for epsilon in [0.0, 0.02, 0.1, 0.3] {
            let f = SmoothMapSpec::deformed_automorphism(epsilon, c(0.3, -0.2)).unwrap();
            let z = cvec(&[c(0.4, 0.1)]);
            let (holo, anti) = f.analytic_blocks(&z).unwrap().unwrap();
            let ratio = anti[(0, 0)].norm() / holo[(0, 0)].norm();
            assert!((ratio - epsilon).abs() < 1e-14, "ratio {ratio} != {epsilon}");
            // Still a self-map of the disk.
            let mut rng = seeded_rng(17);
            for _ in 0..200 {
                let zeta = c(rng.random::<f64>() * 1.6 - 0.8, rng.random::<f64>() * 1.6 - 0.8);
                if zeta.norm() >= 0.999 {
                    continue;
                }
                assert!(f.evaluate(&cvec(&[zeta])).unwrap()[0].norm() < 1.0);
            }
        }
    }

    #[test]
    fn polynomial_map_blocks_match_finite_differences() {
        // F(z₁, z₂) = (z₁² + 2·conj(z₂), z₁·conj(z₁)).
        let f = SmoothMapSpec::custom_polynomial(
            2,
            vec![
                vec![
                    PolyMapTerm { coeff: c(1.0, 0.0), powers: vec![2, 0, 0, 0] },
                    PolyMapTerm { coeff: c(2.0, 0.0), powers: vec![0, 0, 0, 1] },
                ],
                vec![PolyMapTerm { coeff: c(1.0, 0.0), powers: vec![1, 0, 1, 0] }],
            ],
        )
        .unwrap();
        let z = cvec(&[c(0.3, -0.2), c(0.1, 0.4)]);
        let (holo, anti) = f.analytic_blocks(&z).unwrap().unwrap();
        // Hand-computed blocks.
        assert!((holo[(0, 0)] - 2.0 * z[0]).norm() < 1e-14);
        assert!((holo[(1, 0)] - z[0].conj()).norm() < 1e-14);
        assert!((anti[(0, 1)] - c(2.0, 0.0)).norm() < 1e-14);
        assert!((anti[(1, 0)] - z[0]).norm() < 1e-14);
        assert!(holo[(0, 1)].norm() < 1e-14 && anti[(0, 0)].norm() < 1e-14);
    }

    #[test]
    fn map_spec_parsing() {
        let mobius =
            SmoothMapSpec::from_spec_str(r#"{"kind": "mobius", "params": {"a": [0.5, 0.0]}}"#)
                .unwrap();
        assert!(matches!(mobius.kind, MapKind::MobiusDisk { .. }));

        let twist = SmoothMapSpec::from_spec_str(r#"{"kind": "spiral-twist"}"#).unwrap();
        assert!(matches!(twist.kind, MapKind::SpiralTwist));

        let linear = SmoothMapSpec::from_spec_str(
            r#"{"kind": "linear-antiholo", "params": {
                "a": [[[1.0, 0.0]]],
                "b": [[[0.1, 0.0]]]
            }}"#,
        )
        .unwrap();
        assert_eq!((linear.source_dim, linear.target_dim), (1, 1));

        let deformed = SmoothMapSpec::from_spec_str(
            r#"{"kind": "deformed-automorphism", "params": {"epsilon": 0.05}}"#,
        )
        .unwrap();
        assert!(matches!(
            deformed.kind,
            MapKind::DeformedAutomorphism { epsilon, .. } if (epsilon - 0.05).abs() < 1e-15
        ));

        assert!(SmoothMapSpec::from_spec_str(r#"{"kind": "nope"}"#).is_err());
        assert!(
            SmoothMapSpec::from_spec_str(r#"{"kind": "mobius", "params": {"a": [2.0, 0.0]}}"#)
                .is_err()
        );
    }
}
