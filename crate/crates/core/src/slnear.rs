//! Nearest points and all real critical points on `SL^+-(V)` and `SL(V)`.
//!
//! After `u^t u = T diag(mu) T^t`, a critical point has `x^t (u - x) = cI`,
//! `s = x^t x = T diag(lambda) T^t` with `det s = 1`, and each pair
//! `(c, lambda_i)` solves `f_i = c^2 + (2c - mu_i) lambda_i + lambda_i^2 = 0`.
//! The real roots `c` of the resultant `R_1` are found first; each one is
//! lifted back to `lambda`, `s` and finally `x = u^{-t} (cI + s)`.

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{sym_eig, Lu, Matrix};
use crate::polyres::{
    chain_degree, chain_polynomials, distinct_root_count, poly_roots, resultant_chain_with,
    sylvester, ChainNodes, UniPoly,
};
use crate::matcore::random_general;

/// Roots with `|Im c|` below this (relative to `max(1, |c|)`) count as real.
pub const REAL_ROOT_TOL: f64 = 1e-8;
/// The selected branch must satisfy `|prod lambda - 1|` below this.
pub const BRANCH_TOL: f64 = 1e-5;
/// The runner-up branch must be worse by at least this factor.
pub const BRANCH_SEPARATION: f64 = 10.0;
/// Tolerance of [`distinct_root_count`] in [`sl_ed_degree`].
pub const ROOT_CLUSTER_TOL: f64 = 1e-7;
const POLISH_STEPS: usize = 8;

/// A real critical point on `SL^+-`.
#[derive(Clone, Debug, PartialEq)]
pub struct SLSolution {
    /// Lagrange multiplier: `x^t (u - x) = cI`.
    pub c: f64,
    /// Eigenvalues of `s`, paired with the eigenvalues of `u^t u` in descending order.
    pub lambdas: Vec<f64>,
    pub s: Matrix,
    pub x: Matrix,
    pub distance_sq: f64,
    /// Sign of `det x`, from its LU factorization.
    pub det_sign: i8,
}

/// Which part of `SL^+-` to minimize over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    /// All of `SL^+-`, `det x = +-1`.
    Pm,
    /// `SL`, `det x = 1`.
    Plus,
}

impl FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm" => Ok(Component::Pm),
            "plus" => Ok(Component::Plus),
            other => Err(Error::Parse(format!("unknown component '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SlConfig {
    /// Allows `n = 5`, where `R_1` has degree 160.
    pub experimental: bool,
    pub nodes: ChainNodes,
}

/// Everything the pipeline computed for one `u`.
#[derive(Clone, Debug)]
pub struct SlAnalysis {
    /// Eigenvalues of `u^t u`, descending.
    pub mu: Vec<f64>,
    pub r1: UniPoly,
    pub roots: Vec<Complex64>,
    pub real_roots: Vec<f64>,
    /// Real roots that did not lift to positive real `lambda`.
    pub discarded: Vec<f64>,
    /// Sorted by distance, then `c`.
    pub solutions: Vec<SLSolution>,
}

fn max_n(config: &SlConfig) -> usize {
    if config.experimental {
        5
    } else {
        4
    }
}

fn check_size(n: usize, config: &SlConfig) -> Result<()> {
    if n == 0 {
        return Err(Error::Contract("n must be positive".into()));
    }
    if n > max_n(config) {
        let hint = if n == 5 { " without the experimental flag" } else { "" };
        return Err(Error::Unsupported(format!("SL pipeline for n = {n}{hint}")));
    }
    Ok(())
}

/// Both roots of `f = lambda^2 + (2c - mu) lambda + c^2`, or `None` if complex.
fn lambda_pair(mu: f64, c: f64) -> Option<[f64; 2]> {
    // discriminant (2c - mu)^2 - 4c^2 = mu (mu - 4c)
    let disc = mu * (mu - 4.0 * c);
    let slack = 1e-9 * (mu * mu + c * c);
    if disc < -slack {
        return None;
    }
    let root = disc.max(0.0).sqrt();
    let b = mu - 2.0 * c;
    // the larger-magnitude root first, the other from the product c^2
    let big = 0.5 * (b + b.signum() * root);
    if big == 0.0 {
        return Some([0.0, 0.0]);
    }
    let small = c * c / big;
    Some(if big >= small { [big, small] } else { [small, big] })
}

/// Branch vector (index 0 or 1 per coordinate) minimizing `|prod lambda - 1|`.
fn select_branch(pairs: &[[f64; 2]]) -> Result<Vec<usize>> {
    let n = pairs.len();
    let mut scored: Vec<(f64, usize)> = (0..1usize << n)
        .map(|mask| {
            let prod: f64 = (0..n).map(|i| pairs[i][mask >> i & 1]).product();
            ((prod - 1.0).abs(), mask)
        })
        .collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (best, mask) = scored[0];
    if !(best < BRANCH_TOL) {
        return Err(Error::Invariant(format!(
            "no branch satisfies the product constraint (best {best:.3e})"
        )));
    }
    if let Some(&(runner_up, _)) = scored.get(1) {
        if runner_up <= BRANCH_SEPARATION * best.max(1e-12) {
            return Err(Error::Conditioning(format!(
                "ambiguous branch: {best:.3e} vs {runner_up:.3e}"
            )));
        }
    }
    Ok((0..n).map(|i| mask >> i & 1).collect())
}

/// `sum log lambda_i(c)` along fixed branches and its derivative in `c`.
fn log_product(mu: &[f64], c: f64, branch: &[usize]) -> Option<(f64, f64, Vec<f64>)> {
    let mut value = 0.0;
    let mut slope = 0.0;
    let mut lambdas = Vec::with_capacity(mu.len());
    for (&m, &b) in mu.iter().zip(branch) {
        let l = lambda_pair(m, c)?[b];
        if !(l > 0.0) {
            return None;
        }
        // implicit differentiation of f(c, lambda) = 0
        let dl = -(2.0 * c + 2.0 * l) / (2.0 * c - m + 2.0 * l);
        value += l.ln();
        slope += dl / l;
        lambdas.push(l);
    }
    Some((value, slope, lambdas))
}

/// Refines a root `c` by Newton on `sum log lambda_i(c) = 0` with the
/// branch fixed, keeping a step only if it reduces the defect.
fn polish(mu: &[f64], c: f64, branch: &[usize]) -> Option<(f64, Vec<f64>)> {
    let (mut value, mut slope, mut lambdas) = log_product(mu, c, branch)?;
    let mut c = c;
    for _ in 0..POLISH_STEPS {
        if value == 0.0 || !slope.is_finite() || slope == 0.0 {
            break;
        }
        let next = c - value / slope;
        match log_product(mu, next, branch) {
            Some((v, s, l)) if v.abs() < value.abs() => {
                c = next;
                value = v;
                slope = s;
                lambdas = l;
            }
            _ => break,
        }
    }
    Some((c, lambdas))
}

/// Lifts a real root of `R_1` to a solution. `Ok(None)` when the `lambda` are
/// not real and positive.
fn lift_root(u: &Matrix, t: &Matrix, mu: &[f64], c: f64) -> Result<Option<SLSolution>> {
    let Some(pairs) = mu.iter().map(|&m| lambda_pair(m, c)).collect::<Option<Vec<_>>>() else {
        return Ok(None);
    };
    let branch = select_branch(&pairs)?;
    let Some((c, lambdas)) = polish(mu, c, &branch) else {
        return Ok(None);
    };
    let s = &Matrix::from_fn(t.n(), |i, j| t[(i, j)] * lambdas[j]) * &t.transpose();
    let rhs = s.add_scaled(c, &Matrix::identity(u.n()));
    // x = u^{-t} (cI + s), column by column
    let lu = Lu::factor(&u.transpose())?;
    let n = u.n();
    let mut x = Matrix::zeros(n);
    for j in 0..n {
        let col = lu.solve(&rhs.column(j));
        for i in 0..n {
            x[(i, j)] = col[i];
        }
    }
    let det = Lu::factor(&x).map(|f| f.det()).unwrap_or(0.0);
    Ok(Some(SLSolution {
        distance_sq: (u - &x).norm().powi(2),
        det_sign: if det < 0.0 { -1 } else { 1 },
        c,
        lambdas,
        s,
        x,
    }))
}

fn sort_solutions(solutions: &mut [SLSolution]) {
    solutions.sort_by(|a, b| {
        a.distance_sq
            .total_cmp(&b.distance_sq)
            .then(a.c.total_cmp(&b.c))
    });
}

/// Runs the full pipeline on `u`.
pub fn analyze_sl(u: &Matrix, config: &SlConfig) -> Result<SlAnalysis> {
    let n = u.n();
    check_size(n, config)?;
    if u.det() == 0.0 || Lu::factor(u).is_err() {
        return Err(Error::Singular);
    }
    let eig = sym_eig(&(&u.transpose() * u))?;
    let mu = eig.values.clone();
    let r1 = resultant_chain_with(&mu, &config.nodes)?;
    let roots = poly_roots(&r1)?;
    let real_roots: Vec<f64> = roots
        .iter()
        .filter(|z| z.im.abs() < REAL_ROOT_TOL * z.norm().max(1.0))
        .map(|z| z.re)
        .collect();
    let mut solutions = Vec::new();
    let mut discarded = Vec::new();
    for &c in &real_roots {
        match lift_root(u, &eig.q, &mu, c)? {
            Some(sol) => solutions.push(sol),
            None => discarded.push(c),
        }
    }
    sort_solutions(&mut solutions);
    Ok(SlAnalysis {
        mu,
        r1,
        roots,
        real_roots,
        discarded,
        solutions,
    })
}

/// All real critical points on `SL^+-`, sorted by distance then `c`.
pub fn sl_critical_points(u: &Matrix) -> Result<Vec<SLSolution>> {
    sl_critical_points_with(u, &SlConfig::default())
}

pub fn sl_critical_points_with(u: &Matrix, config: &SlConfig) -> Result<Vec<SLSolution>> {
    Ok(analyze_sl(u, config)?.solutions)
}

fn pick_nearest(solutions: Vec<SLSolution>, component: Component) -> Result<SLSolution> {
    solutions
        .into_iter()
        .find(|s| component == Component::Pm || s.det_sign == 1)
        .ok_or_else(|| Error::Invariant("no real critical point on the requested component".into()))
}

/// The closest point of `SL^+-` (`Pm`) or of `SL` (`Plus`).
pub fn nearest_sl(u: &Matrix, component: Component) -> Result<SLSolution> {
    nearest_sl_with(u, component, &SlConfig::default())
}

pub fn nearest_sl_with(u: &Matrix, component: Component, config: &SlConfig) -> Result<SLSolution> {
    pick_nearest(sl_critical_points_with(u, config)?, component)
}

/// Number of distinct complex roots of `R_1` for the seeded general `u`.
pub fn sl_ed_degree(n: usize, seed: u64) -> Result<usize> {
    sl_ed_degree_with(n, seed, &SlConfig::default())
}

pub fn sl_ed_degree_with(n: usize, seed: u64, config: &SlConfig) -> Result<usize> {
    check_size(n, config)?;
    let u = random_general(n, seed)?;
    let mu = sym_eig(&(&u.transpose() * &u))?.values;
    let r1 = resultant_chain_with(&mu, &config.nodes)?;
    debug_assert_eq!(r1.degree(), Some(chain_degree(n)));
    Ok(distinct_root_count(&poly_roots(&r1)?, ROOT_CLUSTER_TOL))
}

/// Whether the real root of `R_1` of smallest `|c|` belongs to the minimizer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallestCReport {
    pub holds: bool,
    /// The real root of smallest absolute value (signed).
    pub c_min_abs: f64,
    pub c_of_minimizer: f64,
}

/// Records whether the smallest `|c|` selects the closest point of `SL^+-`.
pub fn smallest_c_check(u: &Matrix) -> Result<SmallestCReport> {
    let solutions = sl_critical_points(u)?;
    let smallest = solutions
        .iter()
        .map(|s| s.c)
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
        .ok_or_else(|| Error::Invariant("no real critical point".into()))?;
    let minimizer = solutions[0].c;
    Ok(SmallestCReport {
        holds: (smallest - minimizer).abs() <= 1e-6 * (1.0 + minimizer.abs()),
        c_min_abs: smallest,
        c_of_minimizer: minimizer,
    })
}

/// Null vector of a nearly singular real square matrix by two steps of
/// inverse iteration, falling back to the bottom eigenvector of `S^t S` when
/// the LU meets an exactly zero pivot.
fn null_vector(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = rows.len();
    let s = Matrix::from_fn(n, |i, j| rows[i][j]);
    let normalize = |v: Vec<f64>| {
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.into_iter().map(|a| a / norm).collect::<Vec<f64>>()
    };
    match Lu::factor(&s) {
        Ok(lu) => {
            let mut v = vec![1.0; n];
            for _ in 0..2 {
                v = normalize(lu.solve(&v));
            }
            if v.iter().all(|a| a.is_finite()) {
                return Ok(v);
            }
        }
        Err(Error::Singular) => {}
        Err(e) => return Err(e),
    }
    let eig = sym_eig(&(&s.transpose() * &s))?;
    Ok(eig.q.column(n - 1))
}

/// Recovers `lambda` at a root `c` by the kernel method: at a common root
/// `r`, the Sylvester matrix annihilates `(r^{N-1}, ..., r, 1)`. The
/// `lambda_i` are read off one at a time from the intermediate resultants,
/// and the last one from the product constraint.
pub fn kernel_lambdas(mu: &[f64], c: f64) -> Result<Vec<f64>> {
    let n = mu.len();
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let polys = chain_polynomials(mu, Complex64::new(c, 0.0))?;
    let mut lambdas: Vec<f64> = Vec::with_capacity(n);
    let mut prefix = 1.0;
    for i in 1..n {
        // R_{i+1} in L_i = prefix * lambda_i
        let r = &polys[n - 1 - i];
        let mut power = 1.0;
        let p: Vec<f64> = r
            .iter()
            .map(|a| {
                let v = a.re * power;
                power *= prefix;
                v
            })
            .collect();
        let f = [c * c, 2.0 * c - mu[i - 1], 1.0];
        let v = null_vector(&sylvester(&p, &f)?)?;
        let k = v.len();
        if v[k - 1].abs() < 1e-300 {
            return Err(Error::Conditioning("kernel vector has no constant term".into()));
        }
        let l = v[k - 2] / v[k - 1];
        lambdas.push(l);
        prefix *= l;
    }
    lambdas.push(1.0 / prefix);
    Ok(lambdas)
}
