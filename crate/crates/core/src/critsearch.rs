//! Group-generic critical equations and a multistart Newton census.
//!
//! A point `x` of a group `G` with Lie algebra `g` is critical for
//! `d_u(x) = ||u - x||^2` exactly when `x^t (u - x)` is orthogonal to `g`.
//! This module knows the Lie algebra and the defining equations of every
//! supported group, measures how far a candidate is from satisfying both,
//! and hunts for real critical points with Gauss-Newton from many seeded
//! starts. It is the oracle behind the exact solvers' tests and the only
//! solver for symplectic groups.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matcore::{frobenius_inner, orthonormalize_columns, CMatrix, Matrix};
use crate::orthonear::{self, CriticalPoint};

/// Census convergence threshold on [`critical_residual`].
pub const CONVERGED_RESIDUAL: f64 = 1e-9;
/// Clustering radius of census points, scaled by `1 + ||u||`.
pub const CLUSTER_RADIUS: f64 = 1e-5;
const MAX_ITER: usize = 200;
/// Largest scale of the symmetric generator behind symplectic starts.
const SYMPLECTIC_SPREAD: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Orthogonal,
    SpecialOrthogonal,
    /// `U(m)` acting on `R^{2m}` through `A + iB -> [[A, -B], [B, A]]`.
    UnitaryEmbedded,
    Sl,
    SlPm,
    Symplectic,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Orthogonal => "orthogonal",
            GroupKind::SpecialOrthogonal => "special-orthogonal",
            GroupKind::UnitaryEmbedded => "unitary",
            GroupKind::Sl => "sl",
            GroupKind::SlPm => "sl-pm",
            GroupKind::Symplectic => "symplectic",
        }
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "orthogonal" | "o" => Ok(GroupKind::Orthogonal),
            "special-orthogonal" | "so" => Ok(GroupKind::SpecialOrthogonal),
            "unitary" | "unitary-embedded" | "u" => Ok(GroupKind::UnitaryEmbedded),
            "sl" => Ok(GroupKind::Sl),
            "sl-pm" | "slpm" => Ok(GroupKind::SlPm),
            "symplectic" | "sp" => Ok(GroupKind::Symplectic),
            other => Err(Error::Parse(format!("unknown group '{other}'"))),
        }
    }
}

/// A concrete matrix group: kind, size, and for symplectic groups the form `J`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSpec {
    pub kind: GroupKind,
    pub n: usize,
    pub aux: Option<Matrix>,
}

impl GroupSpec {
    pub fn new(kind: GroupKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Contract("group size must be positive".into()));
        }
        let needs_even = matches!(kind, GroupKind::Symplectic | GroupKind::UnitaryEmbedded);
        if needs_even && n % 2 != 0 {
            return Err(Error::Contract(format!("{kind} needs an even matrix size, got {n}")));
        }
        let aux = (kind == GroupKind::Symplectic).then(|| symplectic_form(n));
        Ok(GroupSpec { kind, n, aux })
    }

    pub fn orthogonal(n: usize) -> Self {
        Self::new(GroupKind::Orthogonal, n).expect("valid size")
    }

    pub fn special_orthogonal(n: usize) -> Self {
        Self::new(GroupKind::SpecialOrthogonal, n).expect("valid size")
    }

    pub fn sl(n: usize) -> Self {
        Self::new(GroupKind::Sl, n).expect("valid size")
    }

    pub fn sl_pm(n: usize) -> Self {
        Self::new(GroupKind::SlPm, n).expect("valid size")
    }

    /// `x^t x = I` holds on the whole group.
    pub fn preserves_inner_product(&self) -> bool {
        matches!(
            self.kind,
            GroupKind::Orthogonal | GroupKind::SpecialOrthogonal | GroupKind::UnitaryEmbedded
        )
    }

    fn j(&self) -> &Matrix {
        self.aux.as_ref().expect("symplectic group carries J")
    }
}

/// `J = [[0, I], [-I, 0]]` in `m x m` blocks.
pub fn symplectic_form(n: usize) -> Matrix {
    let m = n / 2;
    Matrix::from_fn(n, |i, j| {
        if i < m && j == i + m {
            1.0
        } else if i >= m && j + m == i {
            -1.0
        } else {
            0.0
        }
    })
}

/// The embedding of multiplication by `i`: `[[0, -I], [I, 0]]`.
pub fn complex_structure(n: usize) -> Matrix {
    symplectic_form(n).scale(-1.0)
}

/// A spanning set of the Lie algebra, with simple integer entries.
pub fn lie_basis(g: &GroupSpec) -> Vec<Matrix> {
    let n = g.n;
    let unit = |i, j| Matrix::unit(n, i, j);
    match g.kind {
        GroupKind::Orthogonal | GroupKind::SpecialOrthogonal => (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| &unit(i, j) - &unit(j, i))
            .collect(),
        GroupKind::UnitaryEmbedded => {
            let m = n / 2;
            let mut out = Vec::with_capacity(m * m);
            let zero = Complex64::new(0.0, 0.0);
            for i in 0..m {
                for j in i..m {
                    if i != j {
                        // real skew part
                        let a = CMatrix::from_fn(m, |p, q| {
                            if (p, q) == (i, j) {
                                Complex64::new(1.0, 0.0)
                            } else if (p, q) == (j, i) {
                                Complex64::new(-1.0, 0.0)
                            } else {
                                zero
                            }
                        });
                        out.push(a.embed());
                    }
                    // imaginary symmetric part
                    let b = CMatrix::from_fn(m, |p, q| {
                        if (p, q) == (i, j) || (p, q) == (j, i) {
                            Complex64::new(0.0, 1.0)
                        } else {
                            zero
                        }
                    });
                    out.push(b.embed());
                }
            }
            out
        }
        GroupKind::Sl | GroupKind::SlPm => {
            let mut out: Vec<Matrix> = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| unit(i, j))
                .collect();
            out.extend((0..n.saturating_sub(1)).map(|i| &unit(i, i) - &unit(i + 1, i + 1)));
            out
        }
        GroupKind::Symplectic => {
            // a = J S with S symmetric satisfies a^t J + J a = 0
            let j = g.j();
            (0..n)
                .flat_map(|p| (p..n).map(move |q| (p, q)))
                .map(|(p, q)| {
                    let s = if p == q {
                        unit(p, p)
                    } else {
                        &unit(p, q) + &unit(q, p)
                    };
                    j * &s
                })
                .collect()
        }
    }
}

/// Dimension of the Lie algebra.
pub fn lie_dimension(g: &GroupSpec) -> usize {
    let n = g.n;
    match g.kind {
        GroupKind::Orthogonal | GroupKind::SpecialOrthogonal => n * (n - 1) / 2,
        GroupKind::UnitaryEmbedded => (n / 2) * (n / 2),
        GroupKind::Sl | GroupKind::SlPm => n * n - 1,
        GroupKind::Symplectic => n * (n + 1) / 2,
    }
}

/// Frobenius-orthonormal basis of the Lie algebra (Gram-Schmidt on [`lie_basis`]).
pub fn orthonormal_lie_basis(g: &GroupSpec) -> Vec<Matrix> {
    let mut out: Vec<Matrix> = Vec::new();
    for b in lie_basis(g) {
        let mut v = b;
        for _ in 0..2 {
            for q in &out {
                let p = frobenius_inner(q, &v).expect("same size");
                v = v.add_scaled(-p, q);
            }
        }
        let norm = v.norm();
        if norm > 1e-12 {
            out.push(v.scale(1.0 / norm));
        }
    }
    out
}

/// Norm of the projection of `x^t (u - x)` onto the Lie algebra.
pub fn lie_projection_norm(x: &Matrix, u: &Matrix, basis: &[Matrix]) -> f64 {
    let m = &x.transpose() * &(u - x);
    basis
        .iter()
        .map(|b| frobenius_inner(&m, b).expect("same size").powi(2))
        .sum::<f64>()
        .sqrt()
}

/// How far `x` is from satisfying the defining equations of the group.
pub fn membership_violation(x: &Matrix, g: &GroupSpec) -> f64 {
    let n = g.n;
    let gram_defect = || (&(&x.transpose() * x) - &Matrix::identity(n)).norm();
    match g.kind {
        GroupKind::Orthogonal => gram_defect(),
        GroupKind::SpecialOrthogonal => gram_defect() + (x.det() - 1.0).abs(),
        GroupKind::UnitaryEmbedded => {
            let jc = complex_structure(n);
            gram_defect() + (&(x * &jc) - &(&jc * x)).norm()
        }
        GroupKind::Sl => (x.det() - 1.0).abs(),
        GroupKind::SlPm => (x.det().abs() - 1.0).abs(),
        GroupKind::Symplectic => {
            let j = g.j();
            (&(&(&x.transpose() * j) * x) - j).norm()
        }
    }
}

/// Residual of the critical equations: Lie-algebra projection of
/// `x^t (u - x)` plus the defining-equation violation. Zero exactly at
/// critical points on the group.
pub fn critical_residual(x: &Matrix, u: &Matrix, g: &GroupSpec) -> f64 {
    let basis = orthonormal_lie_basis(g);
    lie_projection_norm(x, u, &basis) + membership_violation(x, g)
}

/// The Lagrange multiplier `tr(x^t (u - x)) / n`, which equals `c` when
/// `x^t (u - x) = cI`.
pub fn lagrange_scalar(x: &Matrix, u: &Matrix) -> f64 {
    (&x.transpose() * &(u - x)).trace() / x.n() as f64
}

fn cofactors(x: &Matrix) -> Matrix {
    let n = x.n();
    if n == 1 {
        return Matrix::identity(1);
    }
    Matrix::from_fn(n, |i, j| {
        let minor = Matrix::from_fn(n - 1, |p, q| {
            x[(if p < i { p } else { p + 1 }, if q < j { q } else { q + 1 })]
        });
        let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.det()
    })
}

/// The stacked equations `F(x) = 0` of one Newton run.
struct System<'a> {
    u: &'a Matrix,
    g: &'a GroupSpec,
    basis: Vec<Matrix>,
    /// target determinant for the `SL` kinds
    det_target: f64,
}

impl System<'_> {
    fn residual(&self, x: &Matrix) -> Vec<f64> {
        let n = self.g.n;
        let m = &x.transpose() * &(self.u - x);
        let mut out: Vec<f64> = self
            .basis
            .iter()
            .map(|b| frobenius_inner(&m, b).expect("same size"))
            .collect();
        let upper = |a: &Matrix, strict: bool, out: &mut Vec<f64>| {
            for p in 0..n {
                for q in (if strict { p + 1 } else { p })..n {
                    out.push(a[(p, q)]);
                }
            }
        };
        match self.g.kind {
            GroupKind::Orthogonal | GroupKind::SpecialOrthogonal => {
                upper(&(&(&x.transpose() * x) - &Matrix::identity(n)), false, &mut out);
            }
            GroupKind::UnitaryEmbedded => {
                upper(&(&(&x.transpose() * x) - &Matrix::identity(n)), false, &mut out);
                let jc = complex_structure(n);
                out.extend((&(x * &jc) - &(&jc * x)).into_vec());
            }
            GroupKind::Sl | GroupKind::SlPm => out.push(x.det() - self.det_target),
            GroupKind::Symplectic => {
                let j = self.g.j();
                upper(&(&(&(&x.transpose() * j) * x) - j), true, &mut out);
            }
        }
        out
    }

    /// Directional derivative of [`System::residual`] at `x` along `dx`.
    fn derivative(&self, x: &Matrix, dx: &Matrix, cof: Option<&Matrix>) -> Vec<f64> {
        let n = self.g.n;
        let dm = &(&dx.transpose() * &(self.u - x)) - &(&x.transpose() * dx);
        let mut out: Vec<f64> = self
            .basis
            .iter()
            .map(|b| frobenius_inner(&dm, b).expect("same size"))
            .collect();
        let upper = |a: &Matrix, strict: bool, out: &mut Vec<f64>| {
            for p in 0..n {
                for q in (if strict { p + 1 } else { p })..n {
                    out.push(a[(p, q)]);
                }
            }
        };
        match self.g.kind {
            GroupKind::Orthogonal | GroupKind::SpecialOrthogonal => {
                let d = &(&dx.transpose() * x) + &(&x.transpose() * dx);
                upper(&d, false, &mut out);
            }
            GroupKind::UnitaryEmbedded => {
                let d = &(&dx.transpose() * x) + &(&x.transpose() * dx);
                upper(&d, false, &mut out);
                let jc = complex_structure(n);
                out.extend((&(dx * &jc) - &(&jc * dx)).into_vec());
            }
            GroupKind::Sl | GroupKind::SlPm => {
                let cof = cof.expect("cofactors for det");
                out.push(frobenius_inner(cof, dx).expect("same size"));
            }
            GroupKind::Symplectic => {
                let j = self.g.j();
                let d = &(&(&dx.transpose() * j) * x) + &(&(&x.transpose() * j) * dx);
                upper(&d, true, &mut out);
            }
        }
        out
    }

    fn jacobian(&self, x: &Matrix) -> Vec<Vec<f64>> {
        let n = self.g.n;
        let cof = matches!(self.g.kind, GroupKind::Sl | GroupKind::SlPm).then(|| cofactors(x));
        (0..n * n)
            .map(|k| self.derivative(x, &Matrix::unit(n, k / n, k % n), cof.as_ref()))
            .collect()
    }
}

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum()
}

/// Gauss-Newton step: `J dx = -F` when square and solvable, damped normal
/// equations otherwise. `columns[k]` is the derivative along the `k`-th entry.
fn newton_step(columns: &[Vec<f64>], f: &[f64]) -> Option<Vec<f64>> {
    let vars = columns.len();
    let eqs = f.len();
    let neg: Vec<f64> = f.iter().map(|v| -v).collect();
    if eqs == vars {
        let jac = Matrix::from_fn(vars, |i, k| columns[k][i]);
        if let Ok(step) = jac.solve(&neg) {
            if step.iter().all(|v| v.is_finite()) {
                return Some(step);
            }
        }
    }
    let mut normal = Matrix::from_fn(vars, |a, b| {
        columns[a].iter().zip(&columns[b]).map(|(x, y)| x * y).sum()
    });
    let peak = (0..vars).fold(0.0f64, |m, i| m.max(normal[(i, i)]));
    let damping = 1e-12 * peak.max(1e-300);
    for i in 0..vars {
        normal[(i, i)] += damping;
    }
    let rhs: Vec<f64> = columns
        .iter()
        .map(|col| col.iter().zip(&neg).map(|(a, b)| a * b).sum())
        .collect();
    normal.solve(&rhs).ok().filter(|s| s.iter().all(|v| v.is_finite()))
}

/// Outcome of a single Gauss-Newton run.
#[derive(Clone, Debug)]
pub struct NewtonRun {
    pub x: Matrix,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Gauss-Newton with Armijo backtracking on `||F||^2`, stopping once
/// [`critical_residual`] drops below [`CONVERGED_RESIDUAL`].
pub fn newton_refine(x0: &Matrix, u: &Matrix, g: &GroupSpec) -> NewtonRun {
    let det_target = match g.kind {
        GroupKind::SlPm if x0.det() < 0.0 => -1.0,
        _ => 1.0,
    };
    let sys = System {
        u,
        g,
        basis: orthonormal_lie_basis(g),
        det_target,
    };
    let n = g.n;
    let check = |x: &Matrix| lie_projection_norm(x, u, &sys.basis) + membership_violation(x, g);
    let mut x = x0.clone();
    let mut f = sys.residual(&x);
    let mut merit = sq_norm(&f);
    for it in 0..MAX_ITER {
        let residual = check(&x);
        if residual < CONVERGED_RESIDUAL {
            return NewtonRun {
                x,
                residual,
                iterations: it,
                converged: true,
            };
        }
        let Some(step) = newton_step(&sys.jacobian(&x), &f) else {
            break;
        };
        let dx = Matrix::from_fn(n, |i, j| step[i * n + j]);
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-8 {
            let cand = x.add_scaled(t, &dx);
            let fc = sys.residual(&cand);
            let mc = sq_norm(&fc);
            if mc.is_finite() && mc <= (1.0 - 1e-4 * t) * merit {
                accepted = Some((cand, fc, mc));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, fc, mc)) = accepted else {
            break;
        };
        x = cand;
        f = fc;
        merit = mc;
        if x.max_abs() > 1e8 {
            break;
        }
    }
    let residual = check(&x);
    NewtonRun {
        converged: residual < CONVERGED_RESIDUAL,
        x,
        residual,
        iterations: MAX_ITER,
    }
}

fn uniform_matrix(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0))
}

fn flip_first_column(x: &Matrix) -> Matrix {
    Matrix::from_fn(x.n(), |i, j| if j == 0 { -x[(i, j)] } else { x[(i, j)] })
}

/// `exp(a)` by scaling and squaring a truncated Taylor series.
pub fn expm(a: &Matrix) -> Matrix {
    let n = a.n();
    let norm = a.norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale(0.5f64.powi(squarings as i32));
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for k in 1..=16 {
        term = (&term * &scaled).scale(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn complex_orthonormalize(a: &CMatrix) -> CMatrix {
    let m = a.n();
    let mut cols: Vec<Vec<Complex64>> = (0..m).map(|j| (0..m).map(|i| a[(i, j)]).collect()).collect();
    for j in 0..m {
        for _ in 0..2 {
            for k in 0..j {
                let proj: Complex64 = cols[k].iter().zip(&cols[j]).map(|(q, v)| q.conj() * v).sum();
                let qk = cols[k].clone();
                for (v, q) in cols[j].iter_mut().zip(&qk) {
                    *v -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|v| *v /= norm);
    }
    CMatrix::from_fn(m, |i, j| cols[j][i])
}

fn random_element_from(g: &GroupSpec, rng: &mut ChaCha8Rng) -> Matrix {
    let n = g.n;
    loop {
        let x = match g.kind {
            GroupKind::Orthogonal | GroupKind::SpecialOrthogonal => {
                let Ok(q) = orthonormalize_columns(&uniform_matrix(n, rng)) else {
                    continue;
                };
                if g.kind == GroupKind::SpecialOrthogonal && q.det() < 0.0 {
                    flip_first_column(&q)
                } else {
                    q
                }
            }
            GroupKind::UnitaryEmbedded => {
                let m = n / 2;
                let a = CMatrix::from_fn(m, |_, _| {
                    Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
                });
                if a.det().norm() < 1e-6 {
                    continue;
                }
                complex_orthonormalize(&a).embed()
            }
            GroupKind::Sl | GroupKind::SlPm => {
                let a = uniform_matrix(n, rng);
                let d = a.det();
                if d.abs() < 1e-6 {
                    continue;
                }
                let a = a.scale(d.abs().powf(-1.0 / n as f64));
                if g.kind == GroupKind::Sl && d < 0.0 {
                    flip_first_column(&a)
                } else {
                    a
                }
            }
            GroupKind::Symplectic => {
                let s = uniform_matrix(n, rng);
                let spread = rng.gen_range(0.0..=SYMPLECTIC_SPREAD);
                let sym = (&s + &s.transpose()).scale(0.5 * spread);
                expm(&(g.j() * &sym))
            }
        };
        return x;
    }
}

/// A seeded random element of the group (membership violation < 1e-9).
pub fn random_group_element(g: &GroupSpec, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_element_from(g, &mut rng)
}

/// A point of the group close to `u`, toward which starts are pulled.
fn anchor(u: &Matrix, g: &GroupSpec) -> Option<Matrix> {
    let n = g.n;
    match g.kind {
        GroupKind::Orthogonal => orthonear::nearest_orthogonal(u).ok().map(|p| p.x),
        GroupKind::SpecialOrthogonal => orthonear::nearest_special_orthogonal(u).ok().map(|p| p.x),
        GroupKind::UnitaryEmbedded => {
            let uc = CMatrix::project_embedded(u).ok()?;
            orthonear::nearest_unitary(&uc).ok().map(|p| p.x.embed())
        }
        GroupKind::Sl | GroupKind::SlPm => {
            let d = u.det();
            if d.abs() < 1e-12 {
                return None;
            }
            let a = u.scale(d.abs().powf(-1.0 / n as f64));
            Some(if g.kind == GroupKind::Sl && d < 0.0 {
                flip_first_column(&a)
            } else {
                a
            })
        }
        GroupKind::Symplectic => None,
    }
}

/// Real critical points found by [`multistart_census`], with diagnostics.
#[derive(Clone, Debug)]
pub struct Census {
    /// Distinct points, sorted by distance then entries.
    pub points: Vec<CriticalPoint>,
    pub starts: usize,
    pub converged: usize,
    /// Starts that did not reach [`CONVERGED_RESIDUAL`] within the iteration budget.
    pub dropped: usize,
    /// Converged starts that left the requested component (`SO`: `det = -1`).
    pub off_component: usize,
}

/// Runs Gauss-Newton from `starts` seeded starts and clusters the converged
/// points. The output depends only on `(u, g, starts, seed)`.
pub fn multistart_census(u: &Matrix, g: &GroupSpec, starts: usize, seed: u64) -> Result<Census> {
    if starts == 0 {
        return Err(Error::Contract("need at least one start".into()));
    }
    if u.n() != g.n {
        return Err(Error::Dimension {
            expected: g.n,
            found: u.n(),
        });
    }
    let anchor = anchor(u, g);
    let runs: Vec<NewtonRun> = (0..starts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64 + 1);
            let r = random_element_from(g, &mut rng);
            // a random blend keeps starts near u as well as far from it
            let w: f64 = rng.gen_range(0.0..=1.0);
            let x0 = match &anchor {
                Some(a) => &r.scale(w) + &a.scale(1.0 - w),
                None => r,
            };
            newton_refine(&x0, u, g)
        })
        .collect();

    let converged: Vec<&NewtonRun> = runs.iter().filter(|r| r.converged).collect();
    let dropped = starts - converged.len();
    let (kept, off): (Vec<&NewtonRun>, Vec<&NewtonRun>) = converged
        .iter()
        .partition(|r| g.kind != GroupKind::SpecialOrthogonal || r.x.det() > 0.0);

    let radius = CLUSTER_RADIUS * (1.0 + u.norm());
    let reps = cluster_points(kept.iter().map(|r| (&r.x, r.residual)), radius);
    let mut points: Vec<CriticalPoint> = reps
        .into_iter()
        .map(|x| CriticalPoint::evaluate(x, u, g))
        .collect();
    sort_points(&mut points);
    Ok(Census {
        points,
        starts,
        converged: converged.len(),
        dropped,
        off_component: off.len(),
    })
}

/// Single-linkage clusters at `radius`; each cluster is represented by its
/// member of smallest residual (earliest on ties).
pub fn cluster_points<'a>(
    items: impl Iterator<Item = (&'a Matrix, f64)>,
    radius: f64,
) -> Vec<Matrix> {
    let items: Vec<(&Matrix, f64)> = items.collect();
    let mut label: Vec<usize> = (0..items.len()).collect();
    for i in 0..items.len() {
        for j in 0..i {
            if (items[i].0 - items[j].0).norm() <= radius {
                let (a, b) = (label[i], label[j]);
                if a != b {
                    let (keep, gone) = (a.min(b), a.max(b));
                    label.iter_mut().filter(|l| **l == gone).for_each(|l| *l = keep);
                }
            }
        }
    }
    let mut best: Vec<Option<usize>> = vec![None; items.len()];
    for (i, &l) in label.iter().enumerate() {
        match best[l] {
            Some(b) if items[b].1 <= items[i].1 => {}
            _ => best[l] = Some(i),
        }
    }
    best.into_iter().flatten().map(|i| items[i].0.clone()).collect()
}

/// Canonical order: distance ascending, then entries lexicographically.
pub fn sort_points(points: &mut [CriticalPoint]) {
    points.sort_by(|a, b| {
        a.distance_sq.total_cmp(&b.distance_sq).then_with(|| {
            a.x.as_slice()
                .iter()
                .zip(b.x.as_slice())
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
}

/// True when every point of `a` lies within `radius` of some point of `b`.
pub fn is_subset(a: &[Matrix], b: &[Matrix], radius: f64) -> bool {
    a.iter().all(|x| b.iter().any(|y| (x - y).norm() <= radius))
}
