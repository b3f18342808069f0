//! Nearest points and all critical points on `O(n)`, `SO(n)` and `U(m)`.
//!
//! For `u^t u = y diag(lambda) y^t` every critical point has the form
//! `x = u s^{-1}` with `s = y diag(+-sqrt(lambda)) y^t`, one per sign vector.
//! All positive signs give the closest matrix.

use num_complex::Complex64;

use crate::critsearch::{
    lagrange_scalar, lie_projection_norm, membership_violation, orthonormal_lie_basis, GroupKind,
    GroupSpec,
};
use crate::error::{Error, Result};
use crate::matcore::{min_relative_gap, sym_eig, CMatrix, EigenDecomposition, Matrix};

/// Smallest relative gap between eigenvalues of `u^t u` accepted by enumeration.
pub const SPECTRAL_GAP: f64 = 1e-8;
/// Membership tolerance for [`gperp_decompose`] inputs and the `g^perp` flag.
pub const GPERP_TOL: f64 = 1e-7;

/// A critical point of `d_u` on a group.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint<M = Matrix> {
    pub x: M,
    /// `||u - x||^2` in the real Frobenius metric.
    pub distance_sq: f64,
    pub det_sign: i8,
    /// Norm of the projection of `x^t (u - x)` onto the Lie algebra.
    pub residual: f64,
    /// Lagrange multiplier, present for the `SL` groups.
    pub c: Option<f64>,
}

impl CriticalPoint {
    /// Measures a candidate `x` against `u` on the group `g`.
    pub fn evaluate(x: Matrix, u: &Matrix, g: &GroupSpec) -> Self {
        let basis = orthonormal_lie_basis(g);
        let diff = u - &x;
        let c = matches!(g.kind, GroupKind::Sl | GroupKind::SlPm).then(|| lagrange_scalar(&x, u));
        CriticalPoint {
            distance_sq: diff.norm().powi(2),
            det_sign: if x.det() < 0.0 { -1 } else { 1 },
            residual: lie_projection_norm(&x, u, &basis),
            c,
            x,
        }
    }
}

fn gram_spectrum(u: &Matrix) -> Result<EigenDecomposition> {
    let eig = sym_eig(&(&u.transpose() * u))?;
    let top = eig.values[0];
    let bottom = *eig.values.last().expect("nonempty");
    if !(bottom > 1e-24 * top.max(f64::MIN_POSITIVE)) || top == 0.0 {
        return Err(Error::Singular);
    }
    Ok(eig)
}

fn require_gap(values: &[f64]) -> Result<()> {
    let gap = min_relative_gap(values);
    if values.len() > 1 && gap < SPECTRAL_GAP {
        return Err(Error::Degenerate(format!(
            "eigenvalues of u^t u have relative gap {gap:.3e}"
        )));
    }
    Ok(())
}

/// `u s^{-1}` with `s = y diag(signs_i sqrt(lambda_i)) y^t`.
///
/// Formed as `w diag(signs_i / |w_i|) y^t` with `w = u y`: the columns of
/// `w` are orthogonal of length `sqrt(lambda_i)`, and normalizing them
/// directly keeps `x` orthogonal even when `u` is badly conditioned.
fn polar_branch(u: &Matrix, eig: &EigenDecomposition, signs: &[f64]) -> Matrix {
    let w = u * &eig.q;
    let n = u.n();
    let lengths: Vec<f64> = (0..n)
        .map(|j| w.column(j).iter().map(|a| a * a).sum::<f64>().sqrt())
        .collect();
    let scaled = Matrix::from_fn(n, |i, j| w[(i, j)] * signs[j] / lengths[j]);
    &scaled * &eig.q.transpose()
}

/// Sign vectors over `{+1, -1}^n` in lexicographic order, `+1` first.
pub fn sign_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|mask| {
            (0..n)
                .map(|i| if mask >> (n - 1 - i) & 1 == 1 { -1.0 } else { 1.0 })
                .collect()
        })
        .collect()
}

/// The orthogonal matrix closest to `u`: the orthogonal polar factor.
///
/// Repeated eigenvalues of `u^t u` are accepted here since the positive
/// square root is unique regardless; only enumeration needs a separated
/// spectrum.
pub fn nearest_orthogonal(u: &Matrix) -> Result<CriticalPoint> {
    let eig = gram_spectrum(u)?;
    let x = polar_branch(u, &eig, &vec![1.0; u.n()]);
    Ok(CriticalPoint::evaluate(x, u, &GroupSpec::orthogonal(u.n())))
}

/// All `2^n` critical points on `O(n)`, in sign-vector order.
pub fn enumerate_orthogonal_critical(u: &Matrix) -> Result<Vec<CriticalPoint>> {
    let eig = gram_spectrum(u)?;
    require_gap(&eig.values)?;
    let g = GroupSpec::orthogonal(u.n());
    Ok(sign_vectors(u.n())
        .iter()
        .map(|signs| CriticalPoint::evaluate(polar_branch(u, &eig, signs), u, &g))
        .collect())
}

/// The closest point of `SO(n)`. When `det u < 0` the square root belonging
/// to the smallest eigenvalue of `u^t u` changes sign.
pub fn nearest_special_orthogonal(u: &Matrix) -> Result<CriticalPoint> {
    let n = u.n();
    let eig = gram_spectrum(u)?;
    let mut signs = vec![1.0; n];
    if u.det() < 0.0 {
        signs[n - 1] = -1.0;
    }
    let x = polar_branch(u, &eig, &signs);
    Ok(CriticalPoint::evaluate(x, u, &GroupSpec::special_orthogonal(n)))
}

fn herm_branch(u: &CMatrix, y: &CMatrix, signs: &[f64]) -> CMatrix {
    let w = u * y;
    let m = u.n();
    let factors: Vec<Complex64> = (0..m)
        .map(|j| {
            let length = (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            Complex64::new(signs[j] / length, 0.0)
        })
        .collect();
    &w.scale_columns(&factors) * &y.adjoint()
}

fn unitary_point(x: CMatrix, u: &CMatrix) -> CriticalPoint<CMatrix> {
    let m = u.n();
    let g = GroupSpec::new(GroupKind::UnitaryEmbedded, 2 * m).expect("even size");
    let (xr, ur) = (x.embed(), u.embed());
    let basis = orthonormal_lie_basis(&g);
    CriticalPoint {
        // the embedding doubles the squared norm: tr_R = 2 tr_C
        distance_sq: 2.0 * (u - &x).norm_sqr(),
        det_sign: 1,
        residual: lie_projection_norm(&xr, &ur, &basis),
        c: None,
        x,
    }
}

fn herm_spectrum(u: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let (values, y) = (&u.adjoint() * u).herm_eig()?;
    let top = values[0];
    let bottom = *values.last().expect("nonempty");
    if !(bottom > 1e-24 * top.max(f64::MIN_POSITIVE)) || top == 0.0 {
        return Err(Error::Singular);
    }
    Ok((values, y))
}

/// The unitary matrix closest to `u`. Distances use the real Frobenius
/// metric of the `2m x 2m` embedding.
pub fn nearest_unitary(u: &CMatrix) -> Result<CriticalPoint<CMatrix>> {
    let (_, y) = herm_spectrum(u)?;
    let x = herm_branch(u, &y, &vec![1.0; u.n()]);
    Ok(unitary_point(x, u))
}

/// All `2^m` critical points on `U(m)`, in sign-vector order.
pub fn enumerate_unitary_critical(u: &CMatrix) -> Result<Vec<CriticalPoint<CMatrix>>> {
    let (values, y) = herm_spectrum(u)?;
    require_gap(&values)?;
    Ok(sign_vectors(u.n())
        .iter()
        .map(|signs| unitary_point(herm_branch(u, &y, signs), u))
        .collect())
}

/// `s = x^{-1} u` for a point `x` of a compact group, and whether `s` is
/// orthogonal to the Lie algebra.
#[derive(Clone, Debug)]
pub struct GperpDecomposition {
    pub s: Matrix,
    pub in_gperp: bool,
    /// Real trace of `s`; the largest value among critical points is the minimizer.
    pub trace: f64,
}

/// Splits `u = x s` with `x` in the group. Only groups preserving the inner
/// product are supported, so that `x^{-1} = x^t`.
pub fn gperp_decompose(u: &Matrix, x: &Matrix, g: &GroupSpec) -> Result<GperpDecomposition> {
    if !g.preserves_inner_product() {
        return Err(Error::Unsupported(format!("g-perp decomposition on {}", g.kind)));
    }
    if u.n() != g.n || x.n() != g.n {
        return Err(Error::Dimension {
            expected: g.n,
            found: if u.n() != g.n { u.n() } else { x.n() },
        });
    }
    let violation = membership_violation(x, g);
    if violation > GPERP_TOL {
        return Err(Error::Contract(format!(
            "x is not in {} (violation {violation:.3e})",
            g.kind
        )));
    }
    let s = &x.transpose() * u;
    let basis = orthonormal_lie_basis(g);
    // projection of s itself onto g: x^t(u - x) = s - I and I is orthogonal to g
    let proj = lie_projection_norm(&Matrix::identity(g.n), &s, &basis);
    Ok(GperpDecomposition {
        in_gperp: proj <= GPERP_TOL * (1.0 + s.norm()),
        trace: s.trace(),
        s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{random_general, random_general_complex};

    fn rotation(t: f64, reflect: bool) -> Matrix {
        let f = if reflect { -1.0 } else { 1.0 };
        Matrix::from_rows(&[vec![t.cos(), -f * t.sin()], vec![t.sin(), f * t.cos()]]).unwrap()
    }

    /// Minimum of `||u - x||^2` over a fine angle grid, refined by golden section.
    fn brute_force_o2(u: &Matrix, reflect: bool) -> (f64, Matrix) {
        let d = |t: f64| (u - &rotation(t, reflect)).norm().powi(2);
        let steps = 20_000;
        let h = std::f64::consts::TAU / steps as f64;
        let k = (0..steps)
            .min_by(|&a, &b| d(a as f64 * h).total_cmp(&d(b as f64 * h)))
            .unwrap();
        let (mut a, mut b) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - phi * (b - a);
            let e = a + phi * (b - a);
            if d(c) < d(e) {
                b = e;
            } else {
                a = c;
            }
        }
        let t = 0.5 * (a + b);
        (d(t), rotation(t, reflect))
    }

    #[test]
    fn identity_is_its_own_nearest() {
        let p = nearest_orthogonal(&Matrix::identity(3)).unwrap();
        assert!((&p.x - &Matrix::identity(3)).norm() < 1e-14);
        assert!(p.distance_sq < 1e-28);
        assert!(matches!(
            enumerate_orthogonal_critical(&Matrix::identity(3)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn antidiagonal_example() {
        let u = Matrix::from_rows(&[vec![0.0, 2.0], vec![1.0, 0.0]]).unwrap();
        let p = nearest_orthogonal(&u).unwrap();
        let want = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((&p.x - &want).norm() < 1e-12);
        assert!((p.distance_sq - 1.0).abs() < 1e-12);
        let best = brute_force_o2(&u, false).0.min(brute_force_o2(&u, true).0);
        assert!((p.distance_sq - best).abs() < 1e-9);
    }

    #[test]
    fn diagonal_positive_projects_to_identity() {
        let p = nearest_orthogonal(&Matrix::diag(&[3.0, 2.0, 0.5])).unwrap();
        assert!((&p.x - &Matrix::identity(3)).norm() < 1e-12);
        assert!((p.distance_sq - (4.0 + 1.0 + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn negative_determinant_so2() {
        let u = Matrix::diag(&[-2.0, 3.0]);
        let o = nearest_orthogonal(&u).unwrap();
        assert!((&o.x - &Matrix::diag(&[-1.0, 1.0])).norm() < 1e-12);
        let p = nearest_special_orthogonal(&u).unwrap();
        assert_eq!(p.det_sign, 1);
        let (best, x) = brute_force_o2(&u, false);
        assert!((p.distance_sq - best).abs() < 1e-9, "{} vs {best}", p.distance_sq);
        assert!((&p.x - &x).norm() < 1e-6);
        // flipping the smaller direction: x = I, distance 9 + 4
        assert!((&p.x - &Matrix::identity(2)).norm() < 1e-12);
        assert!((p.distance_sq - 13.0).abs() < 1e-12);
    }

    #[test]
    fn positive_determinant_so_matches_o() {
        let p = nearest_special_orthogonal(&Matrix::diag(&[2.0, 3.0])).unwrap();
        assert!((&p.x - &Matrix::identity(2)).norm() < 1e-12);
        for seed in 0..10 {
            let u = random_general(3, seed).unwrap();
            let all = enumerate_orthogonal_critical(&u).unwrap();
            let so = nearest_special_orthogonal(&u).unwrap();
            let best = all
                .iter()
                .filter(|p| p.det_sign == 1)
                .min_by(|a, b| a.distance_sq.total_cmp(&b.distance_sq))
                .unwrap();
            assert!((&best.x - &so.x).norm() < 1e-10);
            if u.det() > 0.0 {
                let o = nearest_orthogonal(&u).unwrap();
                assert!((&o.x - &so.x).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        for n in 2..=5 {
            let u = random_general(n, 11).unwrap();
            let pts = enumerate_orthogonal_critical(&u).unwrap();
            assert_eq!(pts.len(), 1 << n);
            assert_eq!(pts.iter().filter(|p| p.det_sign == 1).count(), 1 << (n - 1));
            let tol = 1e-7 * (1.0 + u.norm());
            assert!(pts.iter().all(|p| p.residual < tol));
            let nearest = nearest_orthogonal(&u).unwrap();
            assert!((&pts[0].x - &nearest.x).norm() < 1e-14);
            assert!(pts.iter().all(|p| nearest.distance_sq <= p.distance_sq + 1e-9));
        }
        assert_eq!(sign_vectors(2), vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]);
    }

    #[test]
    fn unitary_one_by_one() {
        let u = CMatrix::from_fn(1, |_, _| Complex64::new(0.0, 2.0));
        let p = nearest_unitary(&u).unwrap();
        assert!((p.x[(0, 0)] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((p.distance_sq - 2.0).abs() < 1e-12);
        let all = enumerate_unitary_critical(&u).unwrap();
        assert_eq!(all.len(), 2);
        assert!((all[1].x[(0, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        // embedded distance agrees with the real Frobenius norm of the embedding
        assert!((all[1].distance_sq - (&u.embed() - &all[1].x.embed()).norm().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn unitary_enumeration_passes_embedded_residual() {
        for m in 1..=3 {
            let u = random_general_complex(m, 5).unwrap();
            let pts = enumerate_unitary_critical(&u).unwrap();
            assert_eq!(pts.len(), 1 << m);
            for p in &pts {
                let g = GroupSpec::new(GroupKind::UnitaryEmbedded, 2 * m).unwrap();
                assert!(membership_violation(&p.x.embed(), &g) < 1e-10);
                assert!(p.residual < 1e-9 * (1.0 + u.embed().norm()));
            }
            let best = pts.iter().map(|p| p.distance_sq).fold(f64::INFINITY, f64::min);
            assert!((pts[0].distance_sq - best).abs() < 1e-12);
        }
    }

    #[test]
    fn gperp_trace_orders_distance() {
        let u = random_general(3, 21).unwrap();
        let g = GroupSpec::orthogonal(3);
        let eig = sym_eig(&(&u.transpose() * &u)).unwrap();
        let pts = enumerate_orthogonal_critical(&u).unwrap();
        let mut traces = Vec::new();
        for p in &pts {
            let d = gperp_decompose(&u, &p.x, &g).unwrap();
            assert!(d.in_gperp);
            assert!(d.s.is_symmetric(1e-9));
            assert!((&(&p.x * &d.s) - &u).norm() < 1e-10 * u.norm());
            // d_u = tr(u^t u) - 2 tr(s) + n
            let want = (&u.transpose() * &u).trace() - 2.0 * d.trace + 3.0;
            assert!((p.distance_sq - want).abs() < 1e-10);
            traces.push(d.trace);
        }
        let sum_roots: f64 = eig.values.iter().map(|v| v.sqrt()).sum();
        assert!((traces[0] - sum_roots).abs() < 1e-10);
        assert!(traces.iter().all(|&t| t <= traces[0] + 1e-12));
    }

    #[test]
    fn gperp_rejects_non_members_and_sl() {
        let u = random_general(2, 3).unwrap();
        assert!(matches!(
            gperp_decompose(&u, &Matrix::diag(&[2.0, 0.5]), &GroupSpec::orthogonal(2)),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            gperp_decompose(&u, &Matrix::identity(2), &GroupSpec::sl(2)),
            Err(Error::Unsupported(_))
        ));
        let q = nearest_orthogonal(&u).unwrap().x;
        let d = gperp_decompose(&q, &q, &GroupSpec::orthogonal(2)).unwrap();
        assert!((&d.s - &Matrix::identity(2)).norm() < 1e-12);
        assert!((d.trace - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_input_is_rejected() {
        let u = Matrix::diag(&[1.0, 0.0]);
        assert!(matches!(nearest_orthogonal(&u), Err(Error::Singular)));
    }
}
