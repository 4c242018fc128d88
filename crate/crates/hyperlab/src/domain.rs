//! Smooth bounded convex domains in ℂⁿ represented by defining functions.
//!
//! A domain is `{ z : ρ(z) < 0 }` for a C² function ρ with exact real
//! gradient and Hessian (2n real coordinates `x₁, y₁, …, xₙ, yₙ`). The module
//! provides containment tests, ray/boundary intersection, numerical
//! strong-convexity certification, and supporting linear functionals at
//! boundary points — the geometric substrate for the distance solver and the
//! quasi-isometry analyzer.

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg::{complex_to_real, CVector, RMatrix, RVector};
use crate::sampling::{complex_sphere_point, volume_radius_fraction};

/// Relative floor for the gradient norm at boundary points; below
/// `GRADIENT_FLOOR * max(1, bounding_radius)` the outward normal is
/// numerically meaningless and geometric queries refuse to answer.
pub const GRADIENT_FLOOR: f64 = 1e-8;

/// A point is accepted as "on the boundary" when `|ρ|` does not exceed this.
pub const BOUNDARY_RHO_TOL: f64 = 1e-8;

/// Bisection width at which the boundary ray search stops (before a final
/// derivative polish).
pub const BOUNDARY_HIT_TOL: f64 = 1e-13;

/// One monomial `coeff · Π uⱼ^powers[j]` of a defining polynomial in the 2n
/// real coordinates `u = (x₁, y₁, …, xₙ, yₙ)`.
#[derive(Clone, Debug, Deserialize)]
pub struct PolyTerm {
    pub coeff: f64,
    pub powers: Vec<u32>,
}

/// The supported defining-function families.
#[derive(Clone, Debug)]
pub enum DomainKind {
    /// Unit disk in ℂ¹: ρ = |z|² − 1.
    Disk,
    /// Unit ball in ℂⁿ: ρ = |z|² − 1.
    Ball,
    /// Real ellipsoid { Σ xⱼ²/semiaxes[2j]² + yⱼ²/semiaxes[2j+1]² < 1 }.
    Ellipsoid { semiaxes: Vec<f64> },
    /// ρ given as a polynomial in the 2n real coordinates.
    CustomPolynomial { terms: Vec<PolyTerm> },
}

/// A smooth bounded convex domain together with the derived data the
/// geometric queries need. Immutable after construction; cheap to clone and
/// safe to share across threads.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    dimension: usize,
    kind: DomainKind,
    bounding_radius: f64,
    witness: CVector,
}

/// Result of the numerical strong-convexity certification.
#[derive(Clone, Debug)]
pub struct CurvatureReport {
    /// Minimum over sampled boundary points of the smallest normal curvature
    /// (tangent-restricted Hessian of ρ divided by the gradient norm).
    pub min_normal_curvature: f64,
    /// Boundary point at which the minimum was attained.
    pub witness_point: CVector,
    /// Whether the minimum exceeds the requested tolerance.
    pub passed: bool,
}

/// Affine functional ℓ(z) = Σ (zⱼ − ξⱼ)·νⱼ supporting the domain at a
/// boundary point ξ: ℓ(ξ) = 0 and Re ℓ < 0 on the interior.
///
/// The pairing is bilinear (no conjugation), so with νⱼ assembled as
/// `∂ρ/∂xⱼ − i·∂ρ/∂yⱼ` the real part of ℓ is exactly the real gradient
/// pairing ∇ρ(ξ)·(u − u_ξ), which convexity makes negative inside.
#[derive(Clone, Debug)]
pub struct SupportingFunctional {
    pub anchor: CVector,
    pub normal: CVector,
}

impl SupportingFunctional {
    /// Evaluate ℓ(z).
    pub fn evaluate(&self, z: &CVector) -> Complex64 {
        z.iter()
            .zip(self.anchor.iter())
            .zip(self.normal.iter())
            .map(|((zj, xij), nj)| (zj - xij) * nj)
            .sum()
    }
}

/// Raw JSON shape of a domain spec file.
#[derive(Deserialize)]
struct RawDomainSpec {
    kind: String,
    dimension: usize,
    #[serde(default)]
    params: serde_json::Value,
}

impl DomainSpec {
    /// The unit disk in ℂ¹.
    pub fn unit_disk() -> Self {
        Self {
            dimension: 1,
            kind: DomainKind::Disk,
            bounding_radius: 1.0,
            witness: CVector::zeros(1),
        }
    }

    /// The unit ball in ℂⁿ.
    pub fn unit_ball(dimension: usize) -> Self {
        assert!(dimension >= 1, "dimension must be positive");
        Self {
            dimension,
            kind: DomainKind::Ball,
            bounding_radius: 1.0,
            witness: CVector::zeros(dimension),
        }
    }

    /// Real ellipsoid with the given 2n positive semiaxes
    /// (x₁, y₁, …, xₙ, yₙ order).
    pub fn ellipsoid(semiaxes: &[f64]) -> Result<Self> {
        if semiaxes.is_empty() || !semiaxes.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "ellipsoid needs 2n semiaxes, got {}",
                semiaxes.len()
            )));
        }
        if semiaxes.iter().any(|s| *s <= 0.0 || !s.is_finite()) {
            return Err(Error::InvalidInput(
                "ellipsoid semiaxes must be positive and finite".into(),
            ));
        }
        let dimension = semiaxes.len() / 2;
        let bounding_radius = semiaxes.iter().cloned().fold(0.0, f64::max);
        Ok(Self {
            dimension,
            kind: DomainKind::Ellipsoid {
                semiaxes: semiaxes.to_vec(),
            },
            bounding_radius,
            witness: CVector::zeros(dimension),
        })
    }

    /// Domain { ρ < 0 } for a polynomial ρ in the 2n real coordinates. The
    /// origin must be interior; the bounding radius is probed along
    /// quasi-uniform rays at construction and the probe fails if any ray
    /// never leaves the domain (unbounded input).
    pub fn custom_polynomial(dimension: usize, terms: Vec<PolyTerm>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        for term in &terms {
            if term.powers.len() != 2 * dimension {
                return Err(Error::InvalidInput(format!(
                    "polynomial term has {} exponents, expected {}",
                    term.powers.len(),
                    2 * dimension
                )));
            }
            if !term.coeff.is_finite() {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
        }
        let mut spec = Self {
            dimension,
            kind: DomainKind::CustomPolynomial { terms },
            bounding_radius: f64::NAN,
            witness: CVector::zeros(dimension),
        };
        let at_witness = spec.rho(&spec.witness.clone());
        if at_witness >= 0.0 || at_witness.is_nan() {
            return Err(Error::InvalidInput(format!(
                "origin must be interior: rho(0) = {at_witness}"
            )));
        }
        spec.bounding_radius = spec.probe_bounding_radius()?;
        Ok(spec)
    }

    /// Parse a domain spec from its JSON text form.
    pub fn from_spec_str(text: &str) -> Result<Self> {
        let raw: RawDomainSpec = serde_json::from_str(text).map_err(|e| Error::SpecFile {
            path: "<inline>".into(),
            message: e.to_string(),
        })?;
        Self::from_raw(raw)
    }

    /// Parse a domain spec from a JSON file.
    pub fn from_spec_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::SpecFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let raw: RawDomainSpec = serde_json::from_str(&text).map_err(|e| Error::SpecFile {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawDomainSpec) -> Result<Self> {
        match raw.kind.as_str() {
            "disk" => {
                if raw.dimension != 1 {
                    return Err(Error::InvalidInput(format!(
                        "disk requires dimension 1, got {}",
                        raw.dimension
                    )));
                }
                Ok(Self::unit_disk())
            }
            "ball" => {
                if raw.dimension == 0 {
                    return Err(Error::InvalidInput("dimension must be positive".into()));
                }
                Ok(Self::unit_ball(raw.dimension))
            }
            "ellipsoid" => {
                let semiaxes: Vec<f64> =
                    serde_json::from_value(raw.params).map_err(|e| Error::SpecFile {
                        path: "<params>".into(),
                        message: format!("ellipsoid params must be 2n positive reals: {e}"),
                    })?;
                if semiaxes.len() != 2 * raw.dimension {
                    return Err(Error::InvalidInput(format!(
                        "ellipsoid dimension {} needs {} semiaxes, got {}",
                        raw.dimension,
                        2 * raw.dimension,
                        semiaxes.len()
                    )));
                }
                Self::ellipsoid(&semiaxes)
            }
            "custom-polynomial" => {
                let terms: Vec<PolyTerm> =
                    serde_json::from_value(raw.params).map_err(|e| Error::SpecFile {
                        path: "<params>".into(),
                        message: format!(
                            "custom-polynomial params must be a list of {{coeff, powers}}: {e}"
                        ),
                    })?;
                Self::custom_polynomial(raw.dimension, terms)
            }
            other => Err(Error::InvalidInput(format!("unknown domain kind '{other}'"))),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    pub fn witness(&self) -> &CVector {
        &self.witness
    }

    /// True when the domain is exactly the unit disk (closed-form distances
    /// apply).
    pub fn is_unit_disk(&self) -> bool {
        matches!(self.kind, DomainKind::Disk)
    }

    /// True when the domain is exactly the unit ball (closed-form distances
    /// apply).
    pub fn is_unit_ball(&self) -> bool {
        matches!(self.kind, DomainKind::Ball | DomainKind::Disk)
    }

    /// Defining function value; negative inside, zero on the boundary.
    pub fn rho(&self, z: &CVector) -> f64 {
        let u = complex_to_real(z);
        match &self.kind {
            DomainKind::Disk | DomainKind::Ball => u.norm_squared() - 1.0,
            DomainKind::Ellipsoid { semiaxes } => {
                u.iter()
                    .zip(semiaxes.iter())
                    .map(|(uj, s)| (uj / s).powi(2))
                    .sum::<f64>()
                    - 1.0
            }
            DomainKind::CustomPolynomial { terms } => terms
                .iter()
                .map(|t| {
                    t.coeff
                        * t.powers
                            .iter()
                            .zip(u.iter())
                            .map(|(&e, &uj)| uj.powi(e as i32))
                            .product::<f64>()
                })
                .sum(),
        }
    }

    /// Real gradient of ρ in the 2n coordinates (x₁, y₁, …).
    pub fn rho_gradient(&self, z: &CVector) -> RVector {
        let u = complex_to_real(z);
        let m = 2 * self.dimension;
        match &self.kind {
            DomainKind::Disk | DomainKind::Ball => 2.0 * u,
            DomainKind::Ellipsoid { semiaxes } => {
                RVector::from_fn(m, |j, _| 2.0 * u[j] / (semiaxes[j] * semiaxes[j]))
            }
            DomainKind::CustomPolynomial { terms } => {
                let mut grad = RVector::zeros(m);
                for t in terms {
                    for j in 0..m {
                        let ej = t.powers[j];
                        if ej == 0 {
                            continue;
                        }
                        let mut partial = t.coeff * ej as f64 * u[j].powi(ej as i32 - 1);
                        for (k, &ek) in t.powers.iter().enumerate() {
                            if k != j {
                                partial *= u[k].powi(ek as i32);
                            }
                        }
                        grad[j] += partial;
                    }
                }
                grad
            }
        }
    }

    /// Real symmetric Hessian of ρ in the 2n coordinates.
    pub fn rho_hessian(&self, z: &CVector) -> RMatrix {
        let u = complex_to_real(z);
        let m = 2 * self.dimension;
        match &self.kind {
            DomainKind::Disk | DomainKind::Ball => RMatrix::identity(m, m) * 2.0,
            DomainKind::Ellipsoid { semiaxes } => {
                RMatrix::from_fn(m, m, |i, j| {
                    if i == j {
                        2.0 / (semiaxes[i] * semiaxes[i])
                    } else {
                        0.0
                    }
                })
            }
            DomainKind::CustomPolynomial { terms } => {
                let mut hess = RMatrix::zeros(m, m);
                for t in terms {
                    for i in 0..m {
                        let ei = t.powers[i];
                        if ei == 0 {
                            continue;
                        }
                        // Diagonal second derivative.
                        if ei >= 2 {
                            let mut v = t.coeff * (ei * (ei - 1)) as f64 * u[i].powi(ei as i32 - 2);
                            for (k, &ek) in t.powers.iter().enumerate() {
                                if k != i {
                                    v *= u[k].powi(ek as i32);
                                }
                            }
                            hess[(i, i)] += v;
                        }
                        // Mixed partials (fill upper triangle, mirror below).
                        for j in (i + 1)..m {
                            let ej = t.powers[j];
                            if ej == 0 {
                                continue;
                            }
                            let mut v = t.coeff
                                * (ei * ej) as f64
                                * u[i].powi(ei as i32 - 1)
                                * u[j].powi(ej as i32 - 1);
                            for (k, &ek) in t.powers.iter().enumerate() {
                                if k != i && k != j {
                                    v *= u[k].powi(ek as i32);
                                }
                            }
                            hess[(i, j)] += v;
                            hess[(j, i)] += v;
                        }
                    }
                }
                hess
            }
        }
    }

    /// Containment test with margin: true iff ρ(point) < −margin, so
    /// boundary points are excluded even at margin 0 (the domain is open).
    pub fn contains(&self, point: &CVector, margin: f64) -> bool {
        debug_assert!(margin >= 0.0, "margin must be nonnegative");
        self.rho(point) < -margin
    }

    /// Intersection of the ray `interior_point + t·direction` (t > 0) with
    /// the boundary, located by doubling bracket + bisection and polished
    /// with the directional derivative of ρ. Unique by convexity.
    pub fn boundary_hit(&self, interior_point: &CVector, direction: &CVector) -> Result<CVector> {
        let rho_start = self.rho(interior_point);
        if rho_start >= 0.0 || rho_start.is_nan() {
            return Err(Error::InvalidInput(format!(
                "boundary_hit requires a strictly interior start, rho = {rho_start}"
            )));
        }
        let dir_norm = direction.norm();
        if dir_norm <= 0.0 || !dir_norm.is_finite() {
            return Err(Error::InvalidInput("direction must be nonzero".into()));
        }
        let dir = direction / Complex64::new(dir_norm, 0.0);
        let at = |t: f64| interior_point + &dir * Complex64::new(t, 0.0);

        // Bracket the crossing. Both endpoints lie in the closed bounding
        // ball, so the ray meets the boundary at arclength ≤ 2R.
        let limit = 2.0 * self.bounding_radius + 1.0;
        let mut lo = 0.0_f64;
        let mut hi = 0.125 * self.bounding_radius.max(1e-6);
        while self.rho(&at(hi)) < 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > limit {
                return Err(Error::NoCrossing {
                    from: format!("{interior_point:.6}"),
                    direction: format!("{dir:.6}"),
                });
            }
        }
        // Bisection.
        while hi - lo > BOUNDARY_HIT_TOL * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            if self.rho(&at(mid)) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Derivative polish: Newton steps on t ↦ ρ(p + t·d), clamped to the
        // bracket, pull |ρ| down to rounding level.
        let dir_real = complex_to_real(&dir);
        let mut t = 0.5 * (lo + hi);
        for _ in 0..3 {
            let point = at(t);
            let value = self.rho(&point);
            let slope = self.rho_gradient(&point).dot(&dir_real);
            if slope.abs() < 1e-300 {
                break;
            }
            t = (t - value / slope).clamp(lo, hi);
        }
        Ok(at(t))
    }

    /// Certify strong convexity by sampling `sample_count` quasi-uniform
    /// boundary points and minimizing the normal curvature (the Hessian of ρ
    /// restricted to the real tangent space, divided by the gradient norm).
    pub fn verify_strong_convexity(
        &self,
        sample_count: usize,
        tolerance: f64,
    ) -> Result<CurvatureReport> {
        assert!(sample_count >= 1, "sample_count must be positive");
        let floor = GRADIENT_FLOOR * self.bounding_radius.max(1.0);
        let mut min_curvature = f64::INFINITY;
        let mut witness_point = self.witness.clone();
        for i in 0..sample_count {
            let dir = complex_sphere_point(i, self.dimension);
            let b = self.boundary_hit(&self.witness, &dir)?;
            let grad = self.rho_gradient(&b);
            let grad_norm = grad.norm();
            if grad_norm < floor {
                return Err(Error::DegenerateGradient {
                    point: format!("{b:.6}"),
                    norm: grad_norm,
                });
            }
            let unit_normal = grad / grad_norm;
            let tangent = tangent_basis(&unit_normal);
            let restricted =
                tangent.transpose() * (self.rho_hessian(&b) / grad_norm) * &tangent;
            let eigen = nalgebra::SymmetricEigen::new(restricted);
            let local_min = eigen.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
            if local_min < min_curvature {
                min_curvature = local_min;
                witness_point = b;
            }
        }
        Ok(CurvatureReport {
            min_normal_curvature: min_curvature,
            witness_point,
            passed: min_curvature > tolerance,
        })
    }

    /// Supporting functional at a boundary point: ℓ(z) = Σ (zⱼ − ξⱼ)·νⱼ with
    /// νⱼ = (∂ρ/∂xⱼ − i·∂ρ/∂yⱼ)/‖∇ρ‖, so ℓ(ξ) = 0 and Re ℓ < 0 inside.
    pub fn supporting_functional_at(&self, boundary_point: &CVector) -> Result<SupportingFunctional> {
        let rho = self.rho(boundary_point);
        if rho.abs() > BOUNDARY_RHO_TOL {
            return Err(Error::NotOnBoundary {
                point: format!("{boundary_point:.6}"),
                rho,
            });
        }
        let grad = self.rho_gradient(boundary_point);
        let grad_norm = grad.norm();
        if grad_norm < GRADIENT_FLOOR * self.bounding_radius.max(1.0) {
            return Err(Error::DegenerateGradient {
                point: format!("{boundary_point:.6}"),
                norm: grad_norm,
            });
        }
        let normal = CVector::from_fn(self.dimension, |j, _| {
            Complex64::new(grad[2 * j], -grad[2 * j + 1]) / grad_norm
        });
        Ok(SupportingFunctional {
            anchor: boundary_point.clone(),
            normal,
        })
    }

    /// Deterministic quasi-uniform interior points: boundary rays from the
    /// witness scaled by volume-uniform radius fractions, pulled inward by a
    /// relative margin so every returned point is strictly interior.
    pub fn interior_points(&self, count: usize, relative_margin: f64) -> Result<Vec<CVector>> {
        assert!((0.0..1.0).contains(&relative_margin));
        let mut points = Vec::with_capacity(count);
        for i in 0..count {
            let dir = complex_sphere_point(i, self.dimension);
            let b = self.boundary_hit(&self.witness, &dir)?;
            let s = volume_radius_fraction(i, 2 * self.dimension) * (1.0 - relative_margin);
            points.push(&self.witness + (b - &self.witness) * Complex64::new(s, 0.0));
        }
        Ok(points)
    }

    /// Probe the bounding radius of a custom domain by doubling along
    /// quasi-uniform rays (plus every coordinate half-axis) until each leaves
    /// the domain. Best-effort unboundedness guard: a domain unbounded only
    /// along unprobed directions can still slip through.
    fn probe_bounding_radius(&self) -> Result<f64> {
        let mut directions: Vec<CVector> =
            (0..64).map(|i| complex_sphere_point(i, self.dimension)).collect();
        for j in 0..self.dimension {
            for unit in [
                Complex64::new(1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, -1.0),
            ] {
                let mut axis = CVector::zeros(self.dimension);
                axis[j] = unit;
                directions.push(axis);
            }
        }
        let mut worst: f64 = 0.0;
        for dir in &directions {
            let mut t = 1e-3;
            loop {
                let z = &self.witness + dir * Complex64::new(t, 0.0);
                if self.rho(&z) >= 0.0 {
                    break;
                }
                t *= 2.0;
                if t > 1e9 {
                    return Err(Error::InvalidInput(
                        "domain appears unbounded along a probed ray".into(),
                    ));
                }
            }
            worst = worst.max(t);
        }
        Ok(1.05 * worst)
    }
}

/// Orthonormal basis of the hyperplane orthogonal to `unit_normal` in ℝᵐ,
/// returned as the m×(m−1) matrix of basis columns. Built from the
/// Householder reflection exchanging e₁ and the normal.
fn tangent_basis(unit_normal: &RVector) -> RMatrix {
    let m = unit_normal.len();
    let mut e1_minus_n = -unit_normal.clone();
    e1_minus_n[0] += 1.0;
    let norm = e1_minus_n.norm();
    let mut basis = RMatrix::zeros(m, m - 1);
    if norm < 1e-12 {
        // Normal is (numerically) e₁; tangent space is spanned by e₂..eₘ.
        for j in 1..m {
            basis[(j, j - 1)] = 1.0;
        }
        return basis;
    }
    let v = e1_minus_n / norm;
    // Column j of the reflection I − 2vvᵀ for j = 2..m.
    for j in 1..m {
        for i in 0..m {
            basis[(i, j - 1)] = if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j];
        }
    }
    basis
}
