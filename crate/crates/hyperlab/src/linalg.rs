//! Complex/real linear-algebra glue shared by the derivative and structure
//! modules: conversions between complex n-vectors and real 2n-vectors,
//! Wirtinger blocks vs. real Jacobians, and operator norms.
//!
//! Real coordinates are ordered (x₁, y₁, x₂, y₂, ...), i.e. the real and
//! imaginary parts of each complex coordinate stay adjacent.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Complex column vector.
pub type CVector = DVector<Complex64>;
/// Complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Real column vector.
pub type RVector = DVector<f64>;
/// Real matrix.
pub type RMatrix = DMatrix<f64>;

/// Complex n-vector -> real 2n-vector (x₁, y₁, ..., xₙ, yₙ).
pub fn complex_to_real(z: &CVector) -> RVector {
    let mut out = RVector::zeros(2 * z.len());
    for (j, c) in z.iter().enumerate() {
        out[2 * j] = c.re;
        out[2 * j + 1] = c.im;
    }
    out
}

/// Real 2n-vector -> complex n-vector.
pub fn real_to_complex(x: &RVector) -> CVector {
    assert!(x.len().is_multiple_of(2), "real vector length must be even");
    CVector::from_fn(x.len() / 2, |j, _| Complex64::new(x[2 * j], x[2 * j + 1]))
}

/// Convenience constructor for a complex vector from a slice.
pub fn cvec(entries: &[Complex64]) -> CVector {
    CVector::from_column_slice(entries)
}

/// Euclidean norm of a complex vector.
pub fn cnorm(z: &CVector) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian inner product ⟨a, b⟩ = Σ aⱼ·conj(bⱼ).
pub fn hermitian_inner(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

/// Entrywise conjugate of a complex matrix.
pub fn conj_matrix(m: &CMatrix) -> CMatrix {
    m.map(|c| c.conj())
}

/// Entrywise conjugate of a complex vector.
pub fn conj_vector(v: &CVector) -> CVector {
    v.map(|c| c.conj())
}

/// Real 2m×2n Jacobian of the map seen as ℝ²ⁿ → ℝ²ᵐ, assembled from Wirtinger
/// blocks: the differential acts as h ↦ holo·h + anti·conj(h).
pub fn blocks_to_real_jacobian(holo: &CMatrix, anti: &CMatrix) -> RMatrix {
    let (m, n) = holo.shape();
    assert_eq!(anti.shape(), (m, n), "block shapes must agree");
    let mut jac = RMatrix::zeros(2 * m, 2 * n);
    for col in 0..n {
        for row in 0..m {
            let h = holo[(row, col)];
            let a = anti[(row, col)];
            // Column pair for (x_col, y_col): dF = h·dz + a·conj(dz).
            let dx = h + a; // dz = 1
            let dy = (h - a) * Complex64::i(); // dz = i
            jac[(2 * row, 2 * col)] = dx.re;
            jac[(2 * row + 1, 2 * col)] = dx.im;
            jac[(2 * row, 2 * col + 1)] = dy.re;
            jac[(2 * row + 1, 2 * col + 1)] = dy.im;
        }
    }
    jac
}

/// Inverse of [`blocks_to_real_jacobian`]: split a real 2m×2n Jacobian into
/// Wirtinger blocks via ∂ = (F_x − i·F_y)/2 and ∂̄ = (F_x + i·F_y)/2.
pub fn real_jacobian_to_blocks(jac: &RMatrix) -> (CMatrix, CMatrix) {
    let (rm, rn) = jac.shape();
    assert!(rm % 2 == 0 && rn % 2 == 0, "real Jacobian must have even dims");
    let (m, n) = (rm / 2, rn / 2);
    let mut holo = CMatrix::zeros(m, n);
    let mut anti = CMatrix::zeros(m, n);
    for col in 0..n {
        for row in 0..m {
            let fx = Complex64::new(jac[(2 * row, 2 * col)], jac[(2 * row + 1, 2 * col)]);
            let fy = Complex64::new(jac[(2 * row, 2 * col + 1)], jac[(2 * row + 1, 2 * col + 1)]);
            holo[(row, col)] = (fx - Complex64::i() * fy) / 2.0;
            anti[(row, col)] = (fx + Complex64::i() * fy) / 2.0;
        }
    }
    (holo, anti)
}

/// Spectral (operator) norm of a complex matrix via the Hermitian
/// eigendecomposition of MᴴM.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().fold(0.0f64, |acc, &v| acc.max(v.max(0.0))).sqrt()
}

/// Smallest singular value of a complex matrix (0 for empty input).
pub fn min_singular_value(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().fold(f64::INFINITY, |acc, &v| acc.min(v.max(0.0))).sqrt()
}
