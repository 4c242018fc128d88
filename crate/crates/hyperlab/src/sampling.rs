//! Deterministic sampling utilities: Halton low-discrepancy sequences,
//! quasi-uniform points on spheres, and seeded RNG construction.
//!
//! Everything here is reproducible: Halton points depend only on the index,
//! and all pseudo-randomness flows through explicitly seeded ChaCha8 streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{real_to_complex, CVector, RVector};

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Deterministic RNG from an explicit seed; the only randomness source in the
/// crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Radical-inverse (van der Corput) value of `index` in the given base.
pub fn radical_inverse(mut index: u64, base: u32) -> f64 {
    let b = base as f64;
    let mut inv = 1.0 / b;
    let mut result = 0.0;
    while index > 0 {
        result += (index % base as u64) as f64 * inv;
        index /= base as u64;
        inv /= b;
    }
    result
}

/// Point `index` of the Halton sequence in `dim` dimensions, in (0,1)^dim.
/// Indexing starts at 1 internally so no coordinate is ever exactly 0.
pub fn halton_point(index: usize, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "Halton dimension limited to {}", PRIMES.len());
    (0..dim).map(|d| radical_inverse(index as u64 + 1, PRIMES[d])).collect()
}

/// Quasi-uniform point on the unit sphere of ℝ^dim: Box–Muller applied to
/// Halton coordinate pairs, then normalized. Deterministic in `index`.
pub fn sphere_point(index: usize, dim: usize) -> RVector {
    assert!(dim >= 1);
    let pairs = dim.div_ceil(2);
    let u = halton_point(index, 2 * pairs);
    let mut g = Vec::with_capacity(2 * pairs);
    for k in 0..pairs {
        let (u1, u2) = (u[2 * k], u[2 * k + 1]);
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * u2).sin_cos();
        g.push(r * c);
        g.push(r * s);
    }
    g.truncate(dim);
    let mut v = RVector::from_vec(g);
    let norm = v.norm();
    if norm < 1e-300 {
        // Essentially impossible for Halton input; fall back to a basis vector.
        v = RVector::zeros(dim);
        v[0] = 1.0;
        return v;
    }
    v / norm
}

/// Quasi-uniform complex direction on the unit sphere of ℂⁿ (≅ S^{2n−1}).
pub fn complex_sphere_point(index: usize, n: usize) -> CVector {
    real_to_complex(&sphere_point(index, 2 * n))
}

/// Quasi-uniform directions for boundary sampling: `count` points on the unit
/// sphere of ℝ²ⁿ interpreted as complex n-vectors.
pub fn complex_sphere_points(count: usize, n: usize) -> Vec<CVector> {
    (0..count).map(|i| complex_sphere_point(i, n)).collect()
}

/// Radius fractions quasi-uniform in volume for a ball in ℝ^real_dim:
/// Halton scalar transformed by the inverse of r ↦ r^real_dim.
pub fn volume_radius_fraction(index: usize, real_dim: usize) -> f64 {
    radical_inverse(index as u64 + 1, PRIMES[PRIMES.len() - 1]).powf(1.0 / real_dim as f64)
}
