//! Two-sided brackets for the invariant (Kobayashi) distance on smooth
//! bounded convex domains.
//!
//! Upper bounds come from explicit polynomial analytic discs: a disc
//! f: Δ → D with f(σ) = p and f(τ) = q certifies
//! d_D(p, q) ≤ d_Δ(σ, τ), and on convex domains discs are distance-optimal,
//! so optimizing over polynomial discs converges to the true value from
//! above. Containment of the whole disc is enforced on the boundary circle
//! only: a holomorphic disc lies in the closed convex hull of its boundary
//! values (Poisson representation), so boundary containment in a convex
//! domain is sufficient.
//!
//! Lower bounds come from supporting half-plane functionals: an affine
//! complex-linear ℓ with Re ℓ < 0 on D maps D holomorphically into a
//! half-plane, distances contract under holomorphic maps, and the
//! half-plane distance of the images is explicit.

use num_complex::Complex64;

use crate::disk::{ball_distance, left_halfplane_distance, poincare_distance};
use crate::domain::{DomainSpec, SupportingFunctional};
use crate::error::{Error, Result};
use crate::linalg::{CVector, RVector};
use crate::optimize::{minimize, BfgsOptions};
use crate::sampling::{complex_sphere_point, seeded_rng};
use rand::Rng;

/// The two interpolation nodes may never collide; below this separation the
/// penalty objective short-circuits to a large value (never accepted by the
/// line search, since coefficient blow-up makes such states repelling).
const NODE_COLLISION_GUARD: f64 = 1e-13;
/// Large sentinel returned by the objective outside its valid region.
const OBJECTIVE_SENTINEL: f64 = 1e12;
/// Penalty escalation cap: beyond this weight the hinge term drops below
/// the floating-point resolution of the total objective and stops helping.
const MAX_PENALTY_WEIGHT: f64 = 1e9;
/// Planar directions probed when inscribing the initializer disc in the
/// complex-line slice of the domain.
const SLICE_PROBE_DIRECTIONS: usize = 32;
/// Fine angular resolution for the certified inscribed radius; the
/// certificate factor cos(π/K) must stay close to 1 so discs through
/// near-boundary points keep their parameter nodes inside the solver's
/// node-modulus cap.
const SLICE_CERTIFICATE_DIRECTIONS: usize = 256;
/// Skip supporting functionals whose values have real part above this
/// (numerically tangent anchors).
const FUNCTIONAL_REAL_PART_GUARD: f64 = -1e-14;

/// A polynomial analytic disc f(ζ) = Σ aₖ ζᵏ carrying the two interpolation
/// nodes: f(node_p) = p with node_p real (rotation gauge), f(node_q) = q.
#[derive(Clone, Debug)]
pub struct AnalyticDisc {
    pub degree: usize,
    /// a₀ .. a_m, each a complex n-vector.
    pub coefficients: Vec<CVector>,
    /// σ: the real preimage of the first point.
    pub node_p: f64,
    /// τ: the preimage of the second point.
    pub node_q: Complex64,
}

impl AnalyticDisc {
    /// Horner evaluation of the disc at ζ.
    pub fn evaluate(&self, zeta: Complex64) -> CVector {
        let n = self.coefficients[0].len();
        let mut acc = CVector::zeros(n);
        for a_k in self.coefficients.iter().rev() {
            acc = acc * zeta + a_k;
        }
        acc
    }

    /// The distance value certified by this disc: d_Δ(σ, τ).
    pub fn value(&self) -> Result<f64> {
        poincare_distance(Complex64::new(self.node_p, 0.0), self.node_q)
    }

    /// Largest defining-function value over equispaced boundary samples
    /// (≤ −margin means the disc is feasible at those samples).
    pub fn max_boundary_rho(&self, domain: &DomainSpec, samples: usize) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for j in 0..samples {
            let theta = std::f64::consts::TAU * j as f64 / samples as f64;
            let zeta = Complex64::from_polar(1.0, theta);
            worst = worst.max(domain.rho(&self.evaluate(zeta)));
        }
        worst
    }

    /// Precompose with ζ ↦ s·ζ: the image shrinks (ρ∘f is plurisubharmonic,
    /// so its circle maximum is monotone in the radius) while interpolation
    /// survives with the nodes moved to σ/s and τ/s.
    fn rescaled(&self, s: f64) -> AnalyticDisc {
        let mut coefficients = Vec::with_capacity(self.coefficients.len());
        let mut power = 1.0;
        for a_k in &self.coefficients {
            coefficients.push(a_k * Complex64::new(power, 0.0));
            power *= s;
        }
        AnalyticDisc {
            degree: self.degree,
            coefficients,
            node_p: self.node_p / s,
            node_q: self.node_q / s,
        }
    }
}

/// Configuration for bracket computations.
#[derive(Clone, Debug)]
pub struct BracketConfig {
    pub degree: usize,
    pub boundary_samples: usize,
    pub functional_count: usize,
    pub restarts: usize,
    /// Containment margin, relative to max(1, bounding radius), in
    /// defining-function units.
    pub containment_margin_rel: f64,
    /// Scheduled penalty stages (weights grow ×10 from `penalty_initial`).
    pub penalty_stages: usize,
    pub penalty_initial: f64,
    /// BFGS iteration cap per penalty stage.
    pub max_iterations: usize,
    /// Dispatch to exact formulas on the disk and the ball.
    pub use_closed_forms: bool,
    pub seed: u64,
}

impl Default for BracketConfig {
    fn default() -> Self {
        Self {
            degree: 8,
            boundary_samples: 256,
            functional_count: 16,
            restarts: 2,
            containment_margin_rel: 1e-6,
            penalty_stages: 5,
            penalty_initial: 1e2,
            max_iterations: 200,
            use_closed_forms: true,
            seed: 7,
        }
    }
}

/// An upper bound together with the certifying disc.
#[derive(Clone, Debug)]
pub struct UpperBound {
    pub value: f64,
    pub disc: AnalyticDisc,
    pub converged: bool,
    /// Total quasi-Newton iterations spent (provenance for reports).
    pub iterations: usize,
}

/// A lower bound together with the best supporting functional.
#[derive(Clone, Debug)]
pub struct LowerBound {
    pub value: f64,
    pub functional: SupportingFunctional,
}

/// A certified two-sided distance bracket.
#[derive(Clone, Debug)]
pub struct DistanceBracket {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: SupportingFunctional,
    pub upper_witness: AnalyticDisc,
    pub converged: bool,
    /// True when the bracket collapsed to an exact formula.
    pub closed_form: bool,
}

impl DistanceBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

// ---------------------------------------------------------------------------
// Penalty objective over polynomial discs with eliminated interpolation.
// ---------------------------------------------------------------------------

/// The search space at degree m: x = [u, w₁, w₂, Re/Im a_k^(i) for k=2..m].
/// σ = u/√(1+u²) ∈ (−1,1), τ = (w₁+iw₂)/√(1+|w|²) ∈ Δ; a₀ and a₁ are
/// eliminated through the interpolation constraints, leaving the search
/// unconstrained except for boundary containment (penalized).
struct DiscProblem<'a> {
    domain: &'a DomainSpec,
    p: &'a CVector,
    q: &'a CVector,
    degree: usize,
    n: usize,
    /// ζ_j^k for equispaced boundary nodes, [j][k], k = 0..=degree.
    node_powers: Vec<Vec<Complex64>>,
    margin: f64,
    weight: f64,
}

fn param_count(degree: usize, n: usize) -> usize {
    3 + 2 * n * degree.saturating_sub(1)
}

impl<'a> DiscProblem<'a> {
    fn new(
        domain: &'a DomainSpec,
        p: &'a CVector,
        q: &'a CVector,
        degree: usize,
        boundary_samples: usize,
        margin: f64,
    ) -> Self {
        let node_powers = (0..boundary_samples)
            .map(|j| {
                let theta = std::f64::consts::TAU * j as f64 / boundary_samples as f64;
                let zeta = Complex64::from_polar(1.0, theta);
                let mut pows = Vec::with_capacity(degree + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=degree {
                    pows.push(acc);
                    acc *= zeta;
                }
                pows
            })
            .collect();
        Self {
            domain,
            p,
            q,
            degree,
            n: p.len(),
            node_powers,
            margin,
            weight: 0.0,
        }
    }

    fn decode(&self, x: &RVector) -> (f64, Complex64, Vec<CVector>) {
        let u = x[0];
        let sigma = u / (1.0 + u * u).sqrt();
        let (w1, w2) = (x[1], x[2]);
        let sw = (1.0 + w1 * w1 + w2 * w2).sqrt();
        let tau = Complex64::new(w1 / sw, w2 / sw);
        let mut coeffs = Vec::with_capacity(self.degree.saturating_sub(1));
        for k in 2..=self.degree {
            let mut a_k = CVector::zeros(self.n);
            for i in 0..self.n {
                let base = 3 + 2 * (self.n * (k - 2) + i);
                a_k[i] = Complex64::new(x[base], x[base + 1]);
            }
            coeffs.push(a_k);
        }
        (sigma, tau, coeffs)
    }

    /// Powers σ^k and τ^k for k = 0..=degree.
    fn node_power_tables(&self, sigma: f64, tau: Complex64) -> (Vec<f64>, Vec<Complex64>) {
        let mut sig = Vec::with_capacity(self.degree + 1);
        let mut tap = Vec::with_capacity(self.degree + 1);
        let (mut s_acc, mut t_acc) = (1.0, Complex64::new(1.0, 0.0));
        for _ in 0..=self.degree {
            sig.push(s_acc);
            tap.push(t_acc);
            s_acc *= sigma;
            t_acc *= tau;
        }
        (sig, tap)
    }

    /// The disc value d_Δ(σ, τ) plus its partial derivatives with respect
    /// to (σ, Re τ, Im τ).
    fn node_distance(&self, sigma: f64, tau: Complex64) -> (f64, f64, f64, f64) {
        let delta = Complex64::new(sigma, 0.0) - tau;
        let e = Complex64::new(1.0, 0.0) - sigma * tau.conj();
        let n_sq = delta.norm_sqr();
        let d_sq = e.norm_sqr();
        let m = (n_sq / d_sq).sqrt().min(1.0 - 1e-12);
        let value = 0.5 * ((1.0 + m).ln() - (1.0 - m).ln());
        if m < 1e-150 {
            return (value, 0.0, 0.0, 0.0);
        }
        let dn_dsigma = 2.0 * delta.re;
        let dn_dre = -2.0 * delta.re;
        let dn_dim = -2.0 * delta.im;
        let dd_dsigma = 2.0 * (e.re * (-tau.re) + e.im * tau.im);
        let dd_dre = 2.0 * e.re * (-sigma);
        let dd_dim = 2.0 * e.im * sigma;
        let common = 1.0 / (2.0 * m * d_sq * d_sq);
        let dm_dsigma = (dn_dsigma * d_sq - n_sq * dd_dsigma) * common;
        let dm_dre = (dn_dre * d_sq - n_sq * dd_dre) * common;
        let dm_dim = (dn_dim * d_sq - n_sq * dd_dim) * common;
        let scale = 1.0 / (1.0 - m * m).max(1e-12);
        (value, dm_dsigma * scale, dm_dre * scale, dm_dim * scale)
    }

    /// Boundary values of the disc with eliminated a₀, a₁. For each node,
    /// F_j = p + (p−q)·w_j + Σ_{k≥2} a_k·B_{k,j} with w_j = (ζ_j−σ)/(σ−τ)
    /// and basis B_{k,j} = (ζ_j^k − σ^k) − (σ^k − τ^k)·w_j, which vanishes
    /// at both nodes so interpolation holds for any coefficients.
    fn boundary_values(
        &self,
        sigma: f64,
        tau: Complex64,
        coeffs: &[CVector],
    ) -> Option<Vec<CVector>> {
        let delta = Complex64::new(sigma, 0.0) - tau;
        if delta.norm() < NODE_COLLISION_GUARD {
            return None;
        }
        let (sig_pows, tau_pows) = self.node_power_tables(sigma, tau);
        let mut values = Vec::with_capacity(self.node_powers.len());
        for pows in &self.node_powers {
            let w_j = (pows[1] - sigma) / delta;
            let mut f_j = CVector::zeros(self.n);
            for i in 0..self.n {
                f_j[i] = self.p[i] + (self.p[i] - self.q[i]) * w_j;
            }
            for (idx, a_k) in coeffs.iter().enumerate() {
                let k = idx + 2;
                let b_kj = (pows[k] - sig_pows[k]) - (sig_pows[k] - tau_pows[k]) * w_j;
                for i in 0..self.n {
                    f_j[i] += a_k[i] * b_kj;
                }
            }
            values.push(f_j);
        }
        Some(values)
    }

    fn objective(&self, x: &RVector) -> f64 {
        let (sigma, tau, coeffs) = self.decode(x);
        let Some(values) = self.boundary_values(sigma, tau, &coeffs) else {
            return OBJECTIVE_SENTINEL;
        };
        let (value, _, _, _) = self.node_distance(sigma, tau);
        let samples = values.len() as f64;
        let mut penalty = 0.0;
        for f_j in &values {
            let h = (self.domain.rho(f_j) + self.margin).max(0.0);
            penalty += h * h;
        }
        value + self.weight * penalty / samples
    }

    fn objective_grad(&self, x: &RVector) -> (f64, RVector) {
        let dim = x.len();
        let (sigma, tau, coeffs) = self.decode(x);
        let delta = Complex64::new(sigma, 0.0) - tau;
        if delta.norm() < NODE_COLLISION_GUARD {
            return (OBJECTIVE_SENTINEL, RVector::zeros(dim));
        }
        let (sig_pows, tau_pows) = self.node_power_tables(sigma, tau);
        let (value, dv_dsigma, dv_dre, dv_dim) = self.node_distance(sigma, tau);

        let samples = self.node_powers.len() as f64;
        let mut penalty = 0.0;
        // Gradient accumulators in the (σ, Re τ, Im τ, coefficients) frame.
        let mut g_sigma = dv_dsigma;
        let mut g_tau = Complex64::new(dv_dre, dv_dim);
        let mut g_coeffs = vec![Complex64::new(0.0, 0.0); coeffs.len() * self.n];

        let delta_sq = delta * delta;
        for pows in &self.node_powers {
            let zeta = pows[1];
            let w_j = (zeta - sigma) / delta;
            let dw_dsigma = (tau - zeta) / delta_sq;
            let dw_dtau = (zeta - sigma) / delta_sq;

            let mut f_j = CVector::zeros(self.n);
            for i in 0..self.n {
                f_j[i] = self.p[i] + (self.p[i] - self.q[i]) * w_j;
            }
            let mut b_vals = Vec::with_capacity(coeffs.len());
            for (idx, a_k) in coeffs.iter().enumerate() {
                let k = idx + 2;
                let b_kj = (pows[k] - sig_pows[k]) - (sig_pows[k] - tau_pows[k]) * w_j;
                b_vals.push(b_kj);
                for i in 0..self.n {
                    f_j[i] += a_k[i] * b_kj;
                }
            }

            let rho = self.domain.rho(&f_j);
            let h = (rho + self.margin).max(0.0);
            if h == 0.0 {
                continue;
            }
            penalty += h * h;
            let omega = 2.0 * self.weight * h / samples;
            let gamma = self.domain.rho_gradient(&f_j);

            // dF_j/dσ and dF_j/dτ (the latter holomorphic in τ).
            let mut df_dsigma = CVector::zeros(self.n);
            let mut df_dtau = CVector::zeros(self.n);
            for i in 0..self.n {
                let pq = self.p[i] - self.q[i];
                df_dsigma[i] = pq * dw_dsigma;
                df_dtau[i] = pq * dw_dtau;
            }
            for (idx, a_k) in coeffs.iter().enumerate() {
                let k = idx + 2;
                let kf = k as f64;
                let sig_km1 = sig_pows[k - 1];
                let tau_km1 = tau_pows[k - 1];
                let gap = sig_pows[k] - tau_pows[k];
                let db_dsigma =
                    -kf * sig_km1 * (Complex64::new(1.0, 0.0) + w_j) - gap * dw_dsigma;
                let db_dtau = kf * tau_km1 * w_j - gap * dw_dtau;
                for i in 0..self.n {
                    df_dsigma[i] += a_k[i] * db_dsigma;
                    df_dtau[i] += a_k[i] * db_dtau;
                }
            }

            for i in 0..self.n {
                let g_i = Complex64::new(gamma[2 * i], gamma[2 * i + 1]);
                g_sigma += omega * (g_i * df_dsigma[i].conj()).re;
                g_tau += omega * (g_i * df_dtau[i].conj());
                for idx in 0..coeffs.len() {
                    g_coeffs[idx * self.n + i] += omega * g_i * b_vals[idx].conj();
                }
            }
        }

        // Chain through the squash reparametrizations.
        let u = x[0];
        let su = (1.0 + u * u).sqrt();
        let dsigma_du = 1.0 / (su * su * su);
        let (w1, w2) = (x[1], x[2]);
        let sw = (1.0 + w1 * w1 + w2 * w2).sqrt();
        let sw3 = sw * sw * sw;
        let j11 = 1.0 / sw - w1 * w1 / sw3;
        let j12 = -w1 * w2 / sw3;
        let j22 = 1.0 / sw - w2 * w2 / sw3;

        let mut grad = RVector::zeros(dim);
        grad[0] = g_sigma * dsigma_du;
        grad[1] = g_tau.re * j11 + g_tau.im * j12;
        grad[2] = g_tau.re * j12 + g_tau.im * j22;
        for k in 2..=self.degree {
            for i in 0..self.n {
                let packed = g_coeffs[(k - 2) * self.n + i];
                let base = 3 + 2 * (self.n * (k - 2) + i);
                grad[base] = packed.re;
                grad[base + 1] = packed.im;
            }
        }
        (value + self.weight * penalty / samples, grad)
    }

    /// Largest ρ + margin over the boundary samples (≤ 0 means feasible).
    fn max_violation(&self, x: &RVector) -> f64 {
        let (sigma, tau, coeffs) = self.decode(x);
        match self.boundary_values(sigma, tau, &coeffs) {
            None => f64::INFINITY,
            Some(values) => values
                .iter()
                .map(|f_j| self.domain.rho(f_j) + self.margin)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Reconstruct the full coefficient list (a₀, a₁ from elimination).
    fn reconstruct(&self, x: &RVector) -> AnalyticDisc {
        let (sigma, tau, coeffs) = self.decode(x);
        let delta = Complex64::new(sigma, 0.0) - tau;
        let (sig_pows, tau_pows) = self.node_power_tables(sigma, tau);
        // R(σ), R(τ) for the higher-order part R(ζ) = Σ_{k≥2} a_k ζ^k.
        let mut r_sigma = CVector::zeros(self.n);
        let mut r_tau = CVector::zeros(self.n);
        for (idx, a_k) in coeffs.iter().enumerate() {
            let k = idx + 2;
            for i in 0..self.n {
                r_sigma[i] += a_k[i] * sig_pows[k];
                r_tau[i] += a_k[i] * tau_pows[k];
            }
        }
        let mut a1 = CVector::zeros(self.n);
        let mut a0 = CVector::zeros(self.n);
        for i in 0..self.n {
            a1[i] = (self.p[i] - self.q[i] - (r_sigma[i] - r_tau[i])) / delta;
            a0[i] = self.p[i] - a1[i] * sigma - r_sigma[i];
        }
        let mut coefficients = vec![a0, a1];
        coefficients.extend(coeffs);
        AnalyticDisc {
            degree: self.degree,
            coefficients,
            node_p: sigma,
            node_q: tau,
        }
    }
}

// ---------------------------------------------------------------------------
// Feasible initializer: inscribed affine disc on the complex line through
// the two points.
// ---------------------------------------------------------------------------

/// Parameters (u, w₁, w₂) of a feasible affine slice disc through p and q,
/// in the squash coordinates used by `DiscProblem`.
fn slice_initializer(
    domain: &DomainSpec,
    p: &CVector,
    q: &CVector,
    margin: f64,
    boundary_samples: usize,
) -> Result<RVector> {
    let gap = q - p;
    let length = gap.norm();
    let direction = &gap / Complex64::new(length, 0.0);

    // Real extent of the planar slice Ω = {ζ : p + ζ·direction ∈ D}.
    let t_plus = (domain.boundary_hit(p, &direction)? - p).norm();
    let t_minus = (domain.boundary_hit(p, &(-&direction))? - p).norm();

    let mid_interval = 0.5 * (t_plus - t_minus);
    let mid_points = 0.5 * length;

    // Probe boundary extents from a planar center (complex slice
    // coordinate); returns the minimal extent and the centroid of the probe
    // hit points, all in slice coordinates.
    let probe = |center: Complex64, count: usize| -> Result<(f64, Complex64)> {
        let base = p + &direction * center;
        let mut min_extent = f64::INFINITY;
        let mut centroid = Complex64::new(0.0, 0.0);
        for l in 0..count {
            let phi = std::f64::consts::TAU * l as f64 / count as f64;
            let planar = &direction * Complex64::from_polar(1.0, phi);
            let hit = domain.boundary_hit(&base, &planar)?;
            let extent = (hit - &base).norm();
            min_extent = min_extent.min(extent);
            centroid += center + Complex64::from_polar(extent, phi);
        }
        Ok((min_extent, centroid / count as f64))
    };

    // Candidate centers: chord points between the two nodes, plus centroid
    // iterates that drift off the chord into the deep interior of the slice
    // (needed when both points sit near the boundary and the chord hugs it).
    let mut candidates: Vec<Complex64> = [
        mid_interval,
        mid_points,
        0.5 * (mid_interval + mid_points),
        0.25 * mid_interval + 0.75 * mid_points,
        0.75 * mid_interval + 0.25 * mid_points,
    ]
    .iter()
    .filter(|&&t| t > -t_minus && t < t_plus)
    .map(|&t| Complex64::new(t, 0.0))
    .collect();
    let mut drift = Complex64::new(mid_points.clamp(-t_minus, t_plus), 0.0);
    for _ in 0..4 {
        if !domain.contains(&(p + &direction * drift), 0.0) {
            break;
        }
        let (_, centroid) = probe(drift, SLICE_PROBE_DIRECTIONS)?;
        drift = centroid;
        candidates.push(drift);
    }

    // Certified inscribed radius from finely sampled planar directions: a
    // convex region reaching distance ≥ s in each of K equispaced directions
    // contains the disc of radius s·cos(π/K) about the center.
    let safety = (std::f64::consts::PI / SLICE_CERTIFICATE_DIRECTIONS as f64).cos();
    // Disc gauge: a disc with planar center c and radius r passes through the
    // slice positions 0 (point p) and `length` (point q) at parameter nodes
    // σ = |c|/r (real, by rotating the disc) and τ = (length − c)/(r·phase).
    let nodes_for = |center: Complex64, radius: f64| -> (f64, Complex64) {
        let target = Complex64::new(length, 0.0) - center;
        if center.norm() < 1e-14 {
            (0.0, target / radius)
        } else {
            let phase = -center / center.norm();
            (center.norm() / radius, target / (phase * radius))
        }
    };

    let mut best: Option<(f64, Complex64, f64)> = None; // (score, center, radius)
    for &center in &candidates {
        if !domain.contains(&(p + &direction * center), 0.0) {
            continue;
        }
        let (min_extent, _) = probe(center, SLICE_CERTIFICATE_DIRECTIONS)?;
        let radius = min_extent * safety;
        if radius <= 0.0 {
            continue;
        }
        let (sigma, tau) = nodes_for(center, radius);
        let score = sigma.max(tau.norm());
        if score < 0.999 && best.is_none_or(|(s, _, _)| score < s) {
            best = Some((score, center, radius));
        }
    }
    let (_, center, mut radius) = best.ok_or(Error::NoFeasibleDisc)?;

    // Shrink until the affine disc is feasible at the boundary samples.
    let problem = DiscProblem::new(domain, p, q, 1, boundary_samples, margin);
    for _ in 0..14 {
        let (sigma, tau) = nodes_for(center, radius);
        if sigma >= 0.999 || tau.norm() >= 0.999 {
            return Err(Error::NoFeasibleDisc);
        }
        let x = params_from_nodes(sigma, tau, 1, p.len());
        if problem.max_violation(&x) <= 0.0 {
            return Ok(x);
        }
        radius *= 0.97;
    }
    Err(Error::NoFeasibleDisc)
}

/// Inverse of the squash maps: parameter vector with zero higher
/// coefficients for the given nodes.
fn params_from_nodes(sigma: f64, tau: Complex64, degree: usize, n: usize) -> RVector {
    let mut x = RVector::zeros(param_count(degree, n));
    x[0] = sigma / (1.0 - sigma * sigma).sqrt();
    let t = tau.norm();
    let scale = if t > 0.0 { 1.0 / (1.0 - t * t).sqrt() } else { 1.0 };
    x[1] = tau.re * scale;
    x[2] = tau.im * scale;
    x
}

/// Zero-pad a parameter vector from a lower degree to a higher one.
fn extend_params(x: &RVector, n: usize, new_degree: usize) -> RVector {
    let mut out = RVector::zeros(param_count(new_degree, n));
    for i in 0..x.len() {
        out[i] = x[i];
    }
    out
}

fn degree_ladder(target: usize) -> Vec<usize> {
    let mut rungs = Vec::new();
    let mut d = 1;
    while d < target {
        rungs.push(d);
        d *= 2;
    }
    rungs.push(target);
    rungs
}

// ---------------------------------------------------------------------------
// Public operations.
// ---------------------------------------------------------------------------

fn check_pair(domain: &DomainSpec, p: &CVector, q: &CVector) -> Result<()> {
    if p.len() != domain.dimension() || q.len() != domain.dimension() {
        return Err(Error::InvalidInput(format!(
            "points have dimension {}/{}, domain has {}",
            p.len(),
            q.len(),
            domain.dimension()
        )));
    }
    if !domain.contains(p, 0.0) || !domain.contains(q, 0.0) {
        return Err(Error::InvalidInput(
            "distance endpoints must be strictly interior".into(),
        ));
    }
    Ok(())
}

/// Optimize a polynomial analytic disc through p and q and return the best
/// feasible distance upper bound found.
pub fn upper_bound_disc(
    domain: &DomainSpec,
    p: &CVector,
    q: &CVector,
    config: &BracketConfig,
) -> Result<UpperBound> {
    check_pair(domain, p, q)?;
    if p == q {
        return Err(Error::InvalidInput(
            "upper_bound_disc requires distinct points".into(),
        ));
    }
    if config.degree < 1 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    if config.boundary_samples < 8 * config.degree {
        return Err(Error::InvalidInput(format!(
            "need at least {} boundary samples for degree {}",
            8 * config.degree,
            config.degree
        )));
    }
    let n = p.len();
    let margin = config.containment_margin_rel * domain.bounding_radius().max(1.0);
    let x_init = slice_initializer(domain, p, q, margin, config.boundary_samples)?;
    let rungs = degree_ladder(config.degree);

    let mut best: Option<(f64, AnalyticDisc, bool)> = None;
    let mut total_iterations = 0usize;

    let record = |disc: AnalyticDisc, converged: bool,
                  best: &mut Option<(f64, AnalyticDisc, bool)>| {
        if disc.max_boundary_rho(domain, config.boundary_samples) + margin <= 0.0 {
            if let Ok(value) = disc.value() {
                if best.as_ref().is_none_or(|(v, _, _)| value < *v) {
                    *best = Some((value, disc, converged));
                }
            }
        }
    };

    // The initializer itself is a feasible disc; seed the incumbent so the
    // search can only improve on it.
    {
        let problem = DiscProblem::new(domain, p, q, 1, config.boundary_samples, margin);
        record(problem.reconstruct(&x_init), true, &mut best);
    }

    // Restart 0 runs unperturbed; later restarts jitter the nodes and, at
    // each rung, the freshly added coefficient block, so they can leave the
    // basin the deterministic path settles into.
    let coeff_scale = 0.1 * (q - p).norm();
    for restart in 0..config.restarts.max(1) {
        let mut rng = seeded_rng(
            config
                .seed
                .wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        );
        let mut x = x_init.clone();
        if restart > 0 {
            for i in 0..3 {
                x[i] += 0.2 * (rng.random::<f64>() - 0.5);
            }
        }
        for (rung_idx, &m) in rungs.iter().enumerate() {
            let is_final = rung_idx + 1 == rungs.len();
            let old_len = x.len();
            x = extend_params(&x, n, m);
            if restart > 0 {
                for i in old_len..x.len() {
                    x[i] = coeff_scale * (rng.random::<f64>() - 0.5);
                }
            }
            let mut problem =
                DiscProblem::new(domain, p, q, m, config.boundary_samples, margin);

            let stage_cap = if is_final {
                config.penalty_stages.max(1)
            } else {
                config.penalty_stages.clamp(1, 3)
            };
            let mut weight = config.penalty_initial;
            let mut stage = 0;
            loop {
                problem.weight = weight;
                let opts = BfgsOptions {
                    max_iterations: config.max_iterations,
                    ..BfgsOptions::default()
                };
                let result = minimize(
                    |y| problem.objective(y),
                    |y| problem.objective_grad(y),
                    x.clone(),
                    &opts,
                );
                total_iterations += result.iterations;
                x = result.x;
                record(problem.reconstruct(&x), result.converged, &mut best);
                stage += 1;
                if stage >= stage_cap {
                    // Keep escalating until feasible or the weight cap is
                    // reached: a rung left deep in violation would hand the
                    // next rung a useless warm start and contribute no
                    // certified candidate of its own.
                    if problem.max_violation(&x) <= 0.0 || weight >= MAX_PENALTY_WEIGHT {
                        break;
                    }
                }
                weight *= 10.0;
            }

            // Feasibility restoration: the penalty leaves the iterate a
            // hair outside; shrink the disc by precomposing with ζ ↦ s·ζ,
            // probing the smallest shrink first so the certified value
            // barely moves. Running this on every rung (not just the last)
            // lets a low-degree iterate stand in as the incumbent when a
            // higher-degree refinement wanders into a worse basin.
            if problem.max_violation(&x) > 0.0 {
                let disc = problem.reconstruct(&x);
                let node_extent = disc.node_p.abs().max(disc.node_q.norm());
                for k in (2..=10).rev() {
                    let s = 1.0 - 10f64.powi(-k);
                    if node_extent / s >= 0.9999 {
                        break;
                    }
                    let candidate = disc.rescaled(s);
                    if candidate.max_boundary_rho(domain, config.boundary_samples) + margin
                        <= 0.0
                    {
                        record(candidate, true, &mut best);
                        break;
                    }
                }
            }
        }
    }

    let (value, disc, converged) = best.ok_or(Error::NoFeasibleDisc)?;
    Ok(UpperBound {
        value,
        disc,
        converged,
        iterations: total_iterations,
    })
}

/// Best lower bound over supporting half-plane functionals anchored at the
/// two hits of the line through p and q plus quasi-uniform boundary anchors.
pub fn lower_bound_caratheodory(
    domain: &DomainSpec,
    p: &CVector,
    q: &CVector,
    functional_count: usize,
) -> Result<LowerBound> {
    check_pair(domain, p, q)?;
    if functional_count < 4 {
        return Err(Error::InvalidInput(
            "need at least 4 supporting functionals".into(),
        ));
    }
    if p == q {
        return Err(Error::InvalidInput(
            "lower_bound_caratheodory requires distinct points".into(),
        ));
    }
    let n = domain.dimension();
    let direction = q - p;
    let mut anchors = vec![
        domain.boundary_hit(p, &direction)?,
        domain.boundary_hit(p, &(-&direction))?,
    ];
    for i in 0..functional_count.saturating_sub(2) {
        let dir = complex_sphere_point(i, n);
        anchors.push(domain.boundary_hit(domain.witness(), &dir)?);
    }

    let mut best: Option<(f64, SupportingFunctional)> = None;
    for anchor in &anchors {
        let functional = domain.supporting_functional_at(anchor)?;
        let vp = functional.evaluate(p);
        let vq = functional.evaluate(q);
        if vp.re > FUNCTIONAL_REAL_PART_GUARD || vq.re > FUNCTIONAL_REAL_PART_GUARD {
            continue;
        }
        let value = left_halfplane_distance(vp, vq)?;
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, functional));
        }
    }
    let (value, functional) =
        best.ok_or_else(|| Error::InvalidInput("no valid supporting functional".into()))?;
    Ok(LowerBound { value, functional })
}

/// Run both bound procedures (or dispatch to the exact formula on the disk
/// and the ball) and assemble a certified bracket.
pub fn kobayashi_bracket(
    domain: &DomainSpec,
    p: &CVector,
    q: &CVector,
    config: &BracketConfig,
) -> Result<DistanceBracket> {
    check_pair(domain, p, q)?;
    let margin = config.containment_margin_rel * domain.bounding_radius().max(1.0);

    if p == q {
        // Exact zero: the constant disc and any supporting functional.
        let dir = complex_sphere_point(0, domain.dimension());
        let anchor = domain.boundary_hit(domain.witness(), &dir)?;
        let functional = domain.supporting_functional_at(&anchor)?;
        let disc = AnalyticDisc {
            degree: 1,
            coefficients: vec![p.clone(), CVector::zeros(p.len())],
            node_p: 0.0,
            node_q: Complex64::new(0.0, 0.0),
        };
        return Ok(DistanceBracket {
            lower: 0.0,
            upper: 0.0,
            lower_witness: functional,
            upper_witness: disc,
            converged: true,
            closed_form: true,
        });
    }

    // Canonical argument order makes the bracket symmetric by construction.
    let swap = {
        let mut ordering = std::cmp::Ordering::Equal;
        for i in 0..p.len() {
            ordering = p[i]
                .re
                .total_cmp(&q[i].re)
                .then(p[i].im.total_cmp(&q[i].im));
            if ordering != std::cmp::Ordering::Equal {
                break;
            }
        }
        ordering == std::cmp::Ordering::Greater
    };
    let (a, b) = if swap { (q, p) } else { (p, q) };

    if config.use_closed_forms && domain.is_unit_ball() {
        let value = ball_distance(a, b)?;
        let x_init = slice_initializer(domain, a, b, margin, config.boundary_samples)?;
        let problem = DiscProblem::new(domain, a, b, 1, config.boundary_samples, margin);
        let disc = problem.reconstruct(&x_init);
        let line_hit = domain.boundary_hit(a, &(b - a))?;
        let functional = domain.supporting_functional_at(&line_hit)?;
        return Ok(DistanceBracket {
            lower: value,
            upper: value,
            lower_witness: functional,
            upper_witness: disc,
            converged: true,
            closed_form: true,
        });
    }

    let upper = upper_bound_disc(domain, a, b, config)?;
    let lower = lower_bound_caratheodory(domain, a, b, config.functional_count)?;
    if lower.value > upper.value + 1e-9 {
        return Err(Error::BracketInverted {
            lower: lower.value,
            upper: upper.value,
        });
    }
    Ok(DistanceBracket {
        lower: lower.value.min(upper.value),
        upper: upper.value,
        lower_witness: lower.functional,
        upper_witness: upper.disc,
        converged: upper.converged,
        closed_form: false,
    })
}
