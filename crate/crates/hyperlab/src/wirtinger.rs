//! Complex-derivative (Wirtinger) blocks of smooth maps, pointwise
//! dilatations, and the generalized quasiconformality constant
//! c(z) = max over unit v of |∂̄F(z)·conj(v)| / |∂F(z)·v|.
//!
//! Closed-form blocks are used when a map family carries them; otherwise the
//! blocks are assembled from central differences in the 2n real coordinates,
//! ∂F = (F_x − i·F_y)/2 and ∂̄F = (F_x + i·F_y)/2 per complex coordinate.

use num_complex::Complex64;

use crate::domain::DomainSpec;
use crate::error::Result;
use crate::linalg::{blocks_to_real_jacobian, conj_vector, CMatrix, CVector, RMatrix};
use crate::maps::SmoothMapSpec;
use crate::sampling::sphere_point;

/// Denominators below this are treated as a vanishing holomorphic action; if
/// the antiholomorphic action does not vanish with them, the constant is
/// +infinity.
pub const SINGULAR_ACTION_TOL: f64 = 1e-12;

/// Relative interior margin of the deterministic grid used by field sweeps.
pub const FIELD_GRID_MARGIN: f64 = 1e-3;

/// Wirtinger blocks of a map at a point: the differential acts on a real
/// tangent vector h (complex form h_c) as dF·h = holo·h_c + anti·conj(h_c).
#[derive(Clone, Debug)]
pub struct DerivativePair {
    pub holo: CMatrix,
    pub anti: CMatrix,
    pub at: CVector,
}

impl DerivativePair {
    /// Action of the real differential on a tangent vector in complex form.
    pub fn apply(&self, h: &CVector) -> CVector {
        &self.holo * h + &self.anti * conj_vector(h)
    }

    /// The real 2m×2n Jacobian equivalent to the pair.
    pub fn real_jacobian(&self) -> RMatrix {
        blocks_to_real_jacobian(&self.holo, &self.anti)
    }
}

/// Pointwise dilatation |∂̄f| / |∂f| of a one-dimensional map. The 0/0 case
/// is reported as 0 with the degenerate flag set.
#[derive(Clone, Copy, Debug)]
pub struct Dilatation {
    pub value: f64,
    pub degenerate: bool,
}

/// Field sweep of the generalized quasiconformality constant over a domain.
#[derive(Clone, Debug)]
pub struct QcFieldReport {
    pub samples: Vec<(CVector, f64)>,
    pub sup: f64,
    pub sup_witness: CVector,
}

/// Derivative blocks at `z`: closed forms when the family has them, central
/// differences otherwise.
pub fn wirtinger_blocks(map: &SmoothMapSpec, z: &CVector) -> Result<DerivativePair> {
    if let Some(result) = map.analytic_blocks(z) {
        let (holo, anti) = result?;
        return Ok(DerivativePair {
            holo,
            anti,
            at: z.clone(),
        });
    }
    finite_difference_blocks(map, z)
}

/// Derivative blocks assembled from central differences regardless of
/// whether closed forms exist (the standing cross-check path).
pub fn finite_difference_blocks(map: &SmoothMapSpec, z: &CVector) -> Result<DerivativePair> {
    let n = map.source_dim;
    let m = map.target_dim;
    let h = map.fd_step;
    let mut holo = CMatrix::zeros(m, n);
    let mut anti = CMatrix::zeros(m, n);
    for j in 0..n {
        let stencil = |step: Complex64| -> Result<CVector> {
            let mut w = z.clone();
            w[j] += step;
            map.evaluate(&w)
        };
        let fx = (stencil(Complex64::new(h, 0.0))? - stencil(Complex64::new(-h, 0.0))?)
            / Complex64::new(2.0 * h, 0.0);
        let fy = (stencil(Complex64::new(0.0, h))? - stencil(Complex64::new(0.0, -h))?)
            / Complex64::new(2.0 * h, 0.0);
        for i in 0..m {
            holo[(i, j)] = (fx[i] - Complex64::i() * fy[i]) / 2.0;
            anti[(i, j)] = (fx[i] + Complex64::i() * fy[i]) / 2.0;
        }
    }
    Ok(DerivativePair {
        holo,
        anti,
        at: z.clone(),
    })
}

/// Dilatation of a one-dimensional map at a point: |∂̄f|/|∂f|, +infinity when
/// only the holomorphic part vanishes, 0 (flagged) when both do.
pub fn dilatation(map: &SmoothMapSpec, z: &CVector) -> Result<Dilatation> {
    assert!(
        map.source_dim == 1 && map.target_dim == 1,
        "dilatation is defined for one-dimensional maps"
    );
    let pair = wirtinger_blocks(map, z)?;
    let num = pair.anti[(0, 0)].norm();
    let den = pair.holo[(0, 0)].norm();
    if den == 0.0 {
        if num == 0.0 {
            return Ok(Dilatation {
                value: 0.0,
                degenerate: true,
            });
        }
        return Ok(Dilatation {
            value: f64::INFINITY,
            degenerate: false,
        });
    }
    Ok(Dilatation {
        value: num / den,
        degenerate: false,
    })
}

/// Smallest constant c with |∂̄F(z)·conj(v)| ≤ c·|∂F(z)·v| for all unit v,
/// i.e. the maximum of the ratio over the sphere.
///
/// Exact in one dimension. In higher dimensions the ratio is maximized by
/// quasi-uniform sphere sampling (2·sphere_samples directions) followed by
/// projected gradient ascent from the best 8 starts; a vanishing denominator
/// with non-vanishing numerator yields +infinity.
pub fn generalized_qc_constant(
    map: &SmoothMapSpec,
    z: &CVector,
    sphere_samples: usize,
    refine_iters: usize,
) -> Result<f64> {
    let pair = wirtinger_blocks(map, z)?;
    qc_constant_from_pair(&pair, sphere_samples, refine_iters)
}

/// The maximization backend, taking precomputed blocks.
pub fn qc_constant_from_pair(
    pair: &DerivativePair,
    sphere_samples: usize,
    refine_iters: usize,
) -> Result<f64> {
    let n = pair.holo.ncols();
    if n == 1 {
        let num = pair.anti[(0, 0)].norm();
        let den = pair.holo[(0, 0)].norm();
        if den < SINGULAR_ACTION_TOL {
            return Ok(if num < SINGULAR_ACTION_TOL { 0.0 } else { f64::INFINITY });
        }
        return Ok(num / den);
    }
    assert!(sphere_samples >= 16, "sphere_samples must be at least 16");

    // Both v ↦ ∂F·v and v ↦ ∂̄F·conj(v) are real-linear in v, so squared
    // norms are real quadratic forms; precompute their Gram matrices in the
    // 2n real coordinates for cheap evaluation and an exact gradient.
    let t_den = blocks_to_real_jacobian(&pair.holo, &CMatrix::zeros(n, n));
    let t_num = blocks_to_real_jacobian(&CMatrix::zeros(n, n), &pair.anti);
    let s_den = t_den.transpose() * &t_den;
    let s_num = t_num.transpose() * &t_num;

    let ratio = |u: &nalgebra::DVector<f64>| -> f64 {
        let den = (u.transpose() * &s_den * u)[(0, 0)].max(0.0).sqrt();
        let num = (u.transpose() * &s_num * u)[(0, 0)].max(0.0).sqrt();
        if den < SINGULAR_ACTION_TOL {
            if num < SINGULAR_ACTION_TOL {
                return 0.0;
            }
            return f64::INFINITY;
        }
        num / den
    };

    // A direction annihilated by the holomorphic action but not by the
    // antiholomorphic one makes the constant infinite; check the exact
    // minimal-singular-value direction rather than hoping a sample hits it.
    let svd = t_den.clone().svd(false, true);
    if let Some(v_t) = &svd.v_t {
        let (min_index, min_sigma) = svd
            .singular_values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, s)| (i, *s))
            .expect("svd yields singular values");
        if min_sigma < SINGULAR_ACTION_TOL {
            let null_dir = v_t.row(min_index).transpose();
            if ratio(&null_dir).is_infinite() {
                return Ok(f64::INFINITY);
            }
        }
    }

    // Quasi-uniform sweep.
    let mut scored: Vec<(f64, nalgebra::DVector<f64>)> = (0..2 * sphere_samples)
        .map(|i| {
            let u = sphere_point(i, 2 * n);
            (ratio(&u), u)
        })
        .collect();
    if scored.iter().any(|(v, _)| v.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = scored[0].0;

    // Projected gradient ascent on N(u)/D(u) from the strongest starts.
    for (_, start) in scored.into_iter().take(8) {
        let mut u = start;
        let mut value = ratio(&u);
        let mut step = 0.5;
        for _ in 0..refine_iters {
            let den = (u.transpose() * &s_den * &u)[(0, 0)];
            let num = (u.transpose() * &s_num * &u)[(0, 0)];
            if den < SINGULAR_ACTION_TOL * SINGULAR_ACTION_TOL {
                break;
            }
            let grad = (&s_num * &u * 2.0 * den - &s_den * &u * 2.0 * num) / (den * den);
            let grad_norm = grad.norm();
            if grad_norm < 1e-16 {
                break;
            }
            // Backtracking line search along the projected direction.
            let mut advanced = false;
            let mut trial_step = step;
            for _ in 0..30 {
                let mut candidate = &u + &grad * (trial_step / grad_norm);
                candidate /= candidate.norm();
                let candidate_value = ratio(&candidate);
                if candidate_value > value {
                    u = candidate;
                    value = candidate_value;
                    step = trial_step * 1.5;
                    advanced = true;
                    break;
                }
                trial_step *= 0.5;
            }
            if !advanced {
                break;
            }
        }
        best = best.max(value);
    }
    Ok(best)
}

/// Sweep of the generalized constant over a deterministic interior grid;
/// returns every sample and the supremum with its witness.
pub fn qc_field(
    map: &SmoothMapSpec,
    domain: &DomainSpec,
    grid_count: usize,
) -> Result<QcFieldReport> {
    assert!(grid_count >= 1);
    let points = domain.interior_points(grid_count, FIELD_GRID_MARGIN)?;
    let mut samples = Vec::with_capacity(points.len());
    let mut sup = f64::NEG_INFINITY;
    let mut sup_witness = points[0].clone();
    for point in points {
        let c = generalized_qc_constant(map, &point, 64, 40)?;
        if c > sup {
            sup = c;
            sup_witness = point.clone();
        }
        samples.push((point, c));
    }
    Ok(QcFieldReport {
        samples,
        sup,
        sup_witness,
    })
}

/// Closed-form dilatation of the spiral boundary-twist map at radius r:
/// with q = r/(2(1−r)²), the ratio |∂̄f|/|∂f| equals q/|1 + iq|.
pub fn spiral_dilatation_closed_form(r: f64) -> f64 {
    let q = r / (2.0 * (1.0 - r) * (1.0 - r));
    q / Complex64::new(1.0, q).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cvec;
    use crate::maps::PolyMapTerm;
    use crate::sampling::seeded_rng;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_disk_point(rng: &mut rand_chacha::ChaCha8Rng, max_radius: f64) -> Complex64 {
        loop {
            let z = c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
            if z.norm() < max_radius && z.norm() > 1e-3 {
                return z;
            }
        }
    }

    #[test]
    fn identity_and_linear_blocks() {
        let id = SmoothMapSpec::identity(2);
        let z = cvec(&[c(0.2, 0.1), c(-0.3, 0.4)]);
        let pair = wirtinger_blocks(&id, &z).unwrap();
        assert_eq!(pair.holo, CMatrix::identity(2, 2));
        assert_eq!(pair.anti, CMatrix::zeros(2, 2));

        let f = SmoothMapSpec::linear_antiholo(
            CMatrix::identity(1, 1),
            CMatrix::from_element(1, 1, c(0.3, 0.0)),
        )
        .unwrap();
        let pair = wirtinger_blocks(&f, &cvec(&[c(0.5, -0.2)])).unwrap();
        assert_eq!(pair.holo[(0, 0)], c(1.0, 0.0));
        assert_eq!(pair.anti[(0, 0)], c(0.3, 0.0));
        assert!((dilatation(&f, &cvec(&[c(0.5, -0.2)])).unwrap().value - 0.3).abs() < 1e-15);
    }

    #[test]
    fn finite_differences_agree_with_closed_forms() {
        // Entrywise relative deviation ≤ 1e−6 at the default step across the
        // built-in families, on seeded interior points.
        let mut rng = seeded_rng(23);
        let twist = SmoothMapSpec::spiral_twist();
        let mobius = SmoothMapSpec::mobius_disk(c(0.4, -0.2), 0.3).unwrap();
        let deformed = SmoothMapSpec::deformed_automorphism(0.1, c(0.2, 0.1)).unwrap();
        for _ in 0..1000 {
            let zeta = random_disk_point(&mut rng, 0.9);
            let z = cvec(&[zeta]);
            for map in [&twist, &mobius, &deformed] {
                let exact = wirtinger_blocks(map, &z).unwrap();
                let fd = finite_difference_blocks(map, &z).unwrap();
                for (a, b) in [(&exact.holo, &fd.holo), (&exact.anti, &fd.anti)] {
                    let deviation = (a[(0, 0)] - b[(0, 0)]).norm() / a[(0, 0)].norm().max(1.0);
                    assert!(
                        deviation <= 1e-6,
                        "relative FD deviation {deviation} at {zeta}"
                    );
                }
            }
        }
        // A two-dimensional family too.
        let auto = SmoothMapSpec::ball_automorphism(cvec(&[c(0.3, 0.1), c(-0.2, 0.4)])).unwrap();
        for _ in 0..200 {
            let z = cvec(&[
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            ]);
            if z.norm() >= 0.9 {
                continue;
            }
            let exact = wirtinger_blocks(&auto, &z).unwrap();
            let fd = finite_difference_blocks(&auto, &z).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let d_holo = (exact.holo[(i, j)] - fd.holo[(i, j)]).norm()
                        / exact.holo[(i, j)].norm().max(1.0);
                    let d_anti = (exact.anti[(i, j)] - fd.anti[(i, j)]).norm();
                    assert!(d_holo <= 1e-6 && d_anti <= 1e-6);
                }
            }
        }
    }

    #[test]
    fn real_differential_reconstruction() {
        // dF·h = holo·h_c + anti·conj(h_c) against direct directional
        // differences.
        let mut rng = seeded_rng(29);
        let auto = SmoothMapSpec::ball_automorphism(cvec(&[c(0.3, 0.1), c(-0.2, 0.4)])).unwrap();
        let twist = SmoothMapSpec::spiral_twist();
        let eps = 1e-6;
        for _ in 0..100 {
            let z = cvec(&[
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            ]);
            if z.norm() >= 0.9 {
                continue;
            }
            let h = cvec(&[
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            ]);
            let pair = wirtinger_blocks(&auto, &z).unwrap();
            let predicted = pair.apply(&h);
            let he = &h * c(eps, 0.0);
            let fd = (auto.evaluate(&(&z + &he)).unwrap() - auto.evaluate(&(&z - &he)).unwrap())
                / c(2.0 * eps, 0.0);
            assert!((predicted - fd).norm() < 1e-6);
        }
        for _ in 0..100 {
            let zeta = random_disk_point(&mut rng, 0.85);
            let h = cvec(&[c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)]);
            let z = cvec(&[zeta]);
            let pair = wirtinger_blocks(&twist, &z).unwrap();
            let predicted = pair.apply(&h);
            let he = &h * c(eps, 0.0);
            let fd = (twist.evaluate(&(&z + &he)).unwrap() - twist.evaluate(&(&z - &he)).unwrap())
                / c(2.0 * eps, 0.0);
            let gap = (predicted - fd).norm();
            assert!(gap < 5e-5, "{gap}");
        }
    }

    #[test]
    fn spiral_twist_dilatation_closed_form_and_bound() {
        let twist = SmoothMapSpec::spiral_twist();
        let mut rng = seeded_rng(31);
        for _ in 0..2000 {
            let zeta = random_disk_point(&mut rng, 0.999);
            let k = dilatation(&twist, &cvec(&[zeta])).unwrap();
            assert!(!k.degenerate);
            assert!(k.value < 1.0, "dilatation must stay below 1, got {}", k.value);
            let closed = spiral_dilatation_closed_form(zeta.norm());
            assert!(
                (k.value - closed).abs() < 1e-9,
                "closed form mismatch at r = {}: {} vs {closed}",
                zeta.norm(),
                k.value
            );
        }
        let at_half = dilatation(&twist, &cvec(&[c(0.5, 0.0)])).unwrap();
        assert!((at_half.value - 1.0 / 2.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dilatation_edge_cases() {
        // f(ζ) = ζ²: both blocks vanish at 0 → degenerate 0.
        let square = SmoothMapSpec::custom_polynomial(
            1,
            vec![vec![PolyMapTerm { coeff: c(1.0, 0.0), powers: vec![2, 0] }]],
        )
        .unwrap();
        let k = dilatation(&square, &cvec(&[c(0.0, 0.0)])).unwrap();
        assert_eq!(k.value, 0.0);
        assert!(k.degenerate);

        // f(ζ) = conj(ζ): holomorphic part vanishes identically → +infinity.
        let conj_map = SmoothMapSpec::custom_polynomial(
            1,
            vec![vec![PolyMapTerm { coeff: c(1.0, 0.0), powers: vec![0, 1] }]],
        )
        .unwrap();
        let k = dilatation(&conj_map, &cvec(&[c(0.3, 0.2)])).unwrap();
        assert!(k.value.is_infinite() && !k.degenerate);
    }

    /// Exact maximum of |anti·conj(v)|/|holo·v| via the real generalized
    /// eigenproblem (both actions are real-linear, so squared norms are
    /// quadratic forms); used as an independent oracle for the sampled
    /// estimator.
    fn qc_eigen_oracle(holo: &CMatrix, anti: &CMatrix) -> f64 {
        let n = holo.ncols();
        let t_den = blocks_to_real_jacobian(holo, &CMatrix::zeros(n, n));
        let t_num = blocks_to_real_jacobian(&CMatrix::zeros(n, n), anti);
        let s_den = t_den.transpose() * &t_den;
        let s_num = t_num.transpose() * &t_num;
        let inv = s_den.clone().try_inverse().expect("denominator form must be invertible");
        let m = inv * &s_num;
        // Largest eigenvalue of S_den⁻¹·S_num (similar to a symmetric matrix,
        // so eigenvalues are real); use the symmetrized form L⁻¹ S_num L⁻ᵀ.
        let chol = nalgebra::Cholesky::new(t_den.transpose() * &t_den)
            .expect("denominator form must be positive definite");
        let l_inv = chol.l().try_inverse().unwrap();
        let sym = &l_inv * s_num * l_inv.transpose();
        let eig = nalgebra::SymmetricEigen::new(sym);
        let _ = m;
        eig.eigenvalues.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(0.0).sqrt()
    }

    #[test]
    fn qc_constant_linear_two_dimensional() {
        // F(z) = z + 0.1·diag(1, 0.5)·conj(z): the maximum over the sphere of
        // 0.1·|diag(1,0.5)·conj(v)| with unit denominator is 0.1.
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(0.1, 0.0);
        m[(1, 1)] = c(0.05, 0.0);
        let f = SmoothMapSpec::linear_antiholo(CMatrix::identity(2, 2), m.clone()).unwrap();
        let z = cvec(&[c(0.1, 0.0), c(0.0, 0.1)]);
        let estimate = generalized_qc_constant(&f, &z, 64, 40).unwrap();
        assert!((estimate - 0.1).abs() < 1e-4, "estimate {estimate}");

        // Brute-force oracle over 10⁵ sphere directions.
        let pair = wirtinger_blocks(&f, &z).unwrap();
        let mut brute = 0.0_f64;
        for i in 0..100_000 {
            let u = sphere_point(i, 4);
            let v = crate::linalg::real_to_complex(&u);
            let num = (&pair.anti * conj_vector(&v)).norm();
            let den = (&pair.holo * &v).norm();
            brute = brute.max(num / den);
        }
        assert!((brute - 0.1).abs() < 1e-4, "brute force {brute}");
        assert!(estimate >= brute - 1e-6, "estimator must dominate the sweep");

        // Eigen oracle agrees to full precision.
        let exact = qc_eigen_oracle(&pair.holo, &pair.anti);
        assert!((exact - 0.1).abs() < 1e-12);
        assert!((estimate - exact).abs() < 1e-6);
    }

    #[test]
    fn qc_constant_matches_eigen_oracle_on_random_blocks() {
        let mut rng = seeded_rng(37);
        for _ in 0..25 {
            let holo = CMatrix::identity(2, 2)
                + CMatrix::from_fn(2, 2, |_, _| {
                    c(0.3 * (rng.random::<f64>() - 0.5), 0.3 * (rng.random::<f64>() - 0.5))
                });
            let anti = CMatrix::from_fn(2, 2, |_, _| {
                c(0.4 * (rng.random::<f64>() - 0.5), 0.4 * (rng.random::<f64>() - 0.5))
            });
            let pair = DerivativePair {
                holo: holo.clone(),
                anti: anti.clone(),
                at: CVector::zeros(2),
            };
            let estimate = qc_constant_from_pair(&pair, 128, 60).unwrap();
            let exact = qc_eigen_oracle(&holo, &anti);
            assert!(
                (estimate - exact).abs() < 1e-5 * exact.max(1.0),
                "estimate {estimate} vs exact {exact}"
            );
        }
    }

    #[test]
    fn qc_constant_unitary_invariance() {
        // Left-composition with a unitary map leaves c(z) unchanged.
        let mut rng = seeded_rng(41);
        let raw = CMatrix::from_fn(2, 2, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let u = raw.qr().q();
        let a = CMatrix::identity(2, 2);
        let mut b = CMatrix::zeros(2, 2);
        b[(0, 0)] = c(0.12, 0.03);
        b[(0, 1)] = c(-0.02, 0.05);
        b[(1, 1)] = c(0.07, -0.04);
        let f = SmoothMapSpec::linear_antiholo(a.clone(), b.clone()).unwrap();
        let uf = SmoothMapSpec::linear_antiholo(&u * &a, &u * &b).unwrap();
        let z = cvec(&[c(0.1, -0.2), c(0.05, 0.1)]);
        let c1 = generalized_qc_constant(&f, &z, 96, 60).unwrap();
        let c2 = generalized_qc_constant(&uf, &z, 96, 60).unwrap();
        assert!((c1 - c2).abs() < 1e-8, "unitary invariance broke: {c1} vs {c2}");
    }

    #[test]
    fn qc_constant_singular_denominator_is_infinite() {
        // holo annihilates e₂ while anti does not: c = +infinity.
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 0)] = c(1.0, 0.0);
        let b = CMatrix::identity(2, 2) * c(0.5, 0.0);
        let pair = DerivativePair {
            holo: a,
            anti: b,
            at: CVector::zeros(2),
        };
        let value = qc_constant_from_pair(&pair, 64, 10).unwrap();
        assert!(value.is_infinite());
    }

    #[test]
    fn qc_field_reports() {
        let disk = crate::domain::DomainSpec::unit_disk();
        // Holomorphic: identically zero field.
        let mobius = SmoothMapSpec::mobius_disk(c(0.3, 0.2), 1.1).unwrap();
        let report = qc_field(&mobius, &disk, 64).unwrap();
        assert_eq!(report.samples.len(), 64);
        assert!(report.sup == 0.0, "holomorphic sup must be exactly 0");

        // Constant-coefficient linear deformation on the ball: constant field.
        let ball = crate::domain::DomainSpec::unit_ball(2);
        let f = SmoothMapSpec::linear_antiholo(
            CMatrix::identity(2, 2),
            CMatrix::identity(2, 2) * c(0.05, 0.0),
        )
        .unwrap();
        let report = qc_field(&f, &ball, 32).unwrap();
        assert!((report.sup - 0.05).abs() < 1e-4);
        for (_, value) in &report.samples {
            assert!((value - 0.05).abs() < 1e-4);
        }

        // Spiral twist: everywhere below 1, approaching 1 near the boundary.
        let twist = SmoothMapSpec::spiral_twist();
        let report = qc_field(&twist, &disk, 512).unwrap();
        assert!(report.sup < 1.0);
        assert!(report.sup > 0.99, "sup {} should approach 1", report.sup);
        assert!(report.sup_witness.norm() > 0.99);
    }
}
