//! Polynomials, Sylvester matrices and the resultant chain that eliminates the
//! eigenvalues of `x^t x` from the `SL` critical equations.
//!
//! For eigenvalues `mu_1..mu_n` of `u^t u` the system is
//!
//! ```text
//! f_i = c^2 + (2c - mu_i) lambda_i + lambda_i^2 = 0,   lambda_1 ... lambda_n = 1.
//! ```
//!
//! With `L_i = lambda_1 ... lambda_i` the chain starts from
//! `R_n = c^2 L_{n-1}^2 + (2c - mu_n) L_{n-1} + 1` and sets
//! `R_i = Res_{lambda_i}(R_{i+1}, f_i)`, substituting `L_i = L_{i-1} lambda_i`.
//! `R_1` is a polynomial in `c` alone of degree `n 2^n`.
//!
//! The chain is evaluated numerically: for a fixed `c`, each `R_i` is
//! recovered as a polynomial in `L_{i-1}` from Sylvester determinants taken
//! at roots of unity (its degree `2^{n-i+1}` is known), and `R_1` is
//! recovered in `c` from samples on several concentric circles, keeping for
//! every coefficient the circle on which it is best determined.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::matcore::det_in_place;

/// Minimum relative separation of the `mu_i` accepted by the chain.
pub const MU_GAP: f64 = 1e-6;
/// Relative residual of the recovered `R_1` at off-grid points above which
/// the interpolation is declared ill-conditioned.
pub const CONDITIONING_TOL: f64 = 1e-6;
const ABERTH_MAX_ITER: usize = 500;
const POLISH_STEPS: usize = 3;

/// Name of the indeterminate of a [`UniPoly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    C,
    Lambda,
    T,
}

/// Dense univariate polynomial, `coeffs[k]` multiplies `var^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<f64>,
    var: Var,
}

impl UniPoly {
    /// Strips trailing zero coefficients; the zero polynomial has no coefficients.
    pub fn new(mut coeffs: Vec<f64>, var: Var) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        UniPoly { coeffs, var }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> f64 {
        self.coeffs.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// `sum |a_k| r^k`, the scale against which evaluation residuals are judged.
    pub fn magnitude_bound(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * r + a.abs())
    }

    pub fn derivative(&self) -> UniPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &a)| k as f64 * a)
            .collect();
        UniPoly::new(coeffs, self.var)
    }

    /// Rescaled so that the largest coefficient magnitude is one.
    pub fn normalized(&self) -> UniPoly {
        let m = self.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if m == 0.0 {
            return self.clone();
        }
        UniPoly::new(self.coeffs.iter().map(|a| a / m).collect(), self.var)
    }
}

/// Dense polynomial in two variables: `coeffs[i][j]` multiplies `L^i c^j`,
/// where `L` is an aggregate product `lambda_1 ... lambda_k` (or a single
/// `lambda_i`) and `c` the Lagrange multiplier.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly {
    coeffs: Vec<Vec<f64>>,
}

impl BiPoly {
    pub fn new(coeffs: Vec<Vec<f64>>) -> Self {
        let mut p = BiPoly { coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        for row in &mut self.coeffs {
            while row.last() == Some(&0.0) {
                row.pop();
            }
        }
        while self.coeffs.last().is_some_and(|r| r.is_empty()) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        BiPoly { coeffs: vec![] }
    }

    pub fn constant(a: f64) -> Self {
        BiPoly::new(vec![vec![a]])
    }

    /// `a L^i c^j`.
    pub fn monomial(a: f64, i: usize, j: usize) -> Self {
        let mut coeffs = vec![vec![]; i + 1];
        coeffs[i] = vec![0.0; j + 1];
        coeffs[i][j] = a;
        BiPoly::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn degree_l(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn degree_c(&self) -> Option<usize> {
        self.coeffs.iter().map(|r| r.len()).max()?.checked_sub(1)
    }

    pub fn eval(&self, l: Complex64, c: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, row| {
            acc * l
                + row
                    .iter()
                    .rev()
                    .fold(Complex64::new(0.0, 0.0), |a, &x| a * c + x)
        })
    }

    /// The quadratic `f = c^2 + (2c - mu) lambda + lambda^2` in `(lambda, c)`.
    pub fn quadratic_factor(mu: f64) -> BiPoly {
        BiPoly::new(vec![vec![0.0, 0.0, 1.0], vec![-mu, 2.0], vec![1.0]])
    }

    /// The seed `R_n = c^2 L^2 + (2c - mu_n) L + 1` in `(L_{n-1}, c)`.
    pub fn seed_resultant(mu_n: f64) -> BiPoly {
        BiPoly::new(vec![vec![1.0], vec![-mu_n, 2.0], vec![0.0, 0.0, 1.0]])
    }

    /// Coefficients of `R(L lambda, c)` as a polynomial in `lambda`, each a
    /// polynomial in `(L, c)`: the `k`-th is `[L^k] R * L^k`.
    pub fn split_aggregate(&self) -> Vec<BiPoly> {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, row)| {
                let mut coeffs = vec![vec![]; k + 1];
                coeffs[k] = row.clone();
                BiPoly::new(coeffs)
            })
            .collect()
    }

    /// Coefficients of a polynomial in `(lambda, c)` viewed in `lambda`, each
    /// a polynomial in `c` alone (stored with `L`-degree zero).
    pub fn split_first(&self) -> Vec<BiPoly> {
        self.coeffs
            .iter()
            .map(|row| BiPoly::new(vec![row.clone()]))
            .collect()
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let rows = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..rows)
            .map(|i| {
                let a = self.coeffs.get(i).map(Vec::as_slice).unwrap_or(&[]);
                let b = rhs.coeffs.get(i).map(Vec::as_slice).unwrap_or(&[]);
                (0..a.len().max(b.len()))
                    .map(|j| a.get(j).unwrap_or(&0.0) + b.get(j).unwrap_or(&0.0))
                    .collect()
            })
            .collect();
        BiPoly::new(coeffs)
    }
}

impl Add for BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: BiPoly) -> BiPoly {
        &self + &rhs
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero();
        }
        let rows = self.coeffs.len() + rhs.coeffs.len() - 1;
        let cols = self.degree_c().unwrap_or(0) + rhs.degree_c().unwrap_or(0) + 1;
        let mut out = vec![vec![0.0; cols]; rows];
        for (i1, r1) in self.coeffs.iter().enumerate() {
            for (j1, &a) in r1.iter().enumerate() {
                for (i2, r2) in rhs.coeffs.iter().enumerate() {
                    for (j2, &b) in r2.iter().enumerate() {
                        out[i1 + i2][j1 + j2] += a * b;
                    }
                }
            }
        }
        BiPoly::new(out)
    }
}

impl Mul for BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: BiPoly) -> BiPoly {
        &self * &rhs
    }
}

impl Zero for BiPoly {
    fn zero() -> Self {
        BiPoly::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Sylvester matrix of `p` and `q` in the elimination variable.
///
/// Inputs are coefficient lists in ascending degree. The result has
/// `deg p + deg q` rows: `deg q` shifted copies of `p` followed by `deg p`
/// shifted copies of `q`, each written from the highest power down, so its
/// determinant is `Res(p, q)`.
pub fn sylvester<T: Clone + Zero>(p: &[T], q: &[T]) -> Result<Vec<Vec<T>>> {
    let deg = |v: &[T]| v.iter().rposition(|a| !a.is_zero());
    let (dp, dq) = match (deg(p), deg(q)) {
        (Some(dp), Some(dq)) if dp > 0 && dq > 0 => (dp, dq),
        _ => {
            return Err(Error::Contract(
                "sylvester needs two polynomials of positive degree".into(),
            ))
        }
    };
    let size = dp + dq;
    let mut rows = Vec::with_capacity(size);
    for (src, d, copies) in [(p, dp, dq), (q, dq, dp)] {
        for shift in 0..copies {
            let mut row = vec![T::zero(); size];
            for k in 0..=d {
                row[shift + k] = src[d - k].clone();
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

fn sylvester_det(p: &[Complex64], q: &[Complex64]) -> Result<Complex64> {
    let rows = sylvester(p, q)?;
    let n = rows.len();
    let mut flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    Ok(det_in_place(&mut flat, n))
}

fn fft_forward(values: &mut [Complex64]) {
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(values.len()).process(values);
}

fn check_mu(mu: &[f64]) -> Result<()> {
    if mu.is_empty() {
        return Err(Error::Contract("need at least one eigenvalue".into()));
    }
    if mu.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(Error::Degenerate("eigenvalues of u^t u must be positive".into()));
    }
    let scale = mu.iter().fold(0.0f64, |a, &b| a.max(b));
    for i in 0..mu.len() {
        for j in 0..i {
            if (mu[i] - mu[j]).abs() < MU_GAP * scale {
                return Err(Error::Degenerate(format!(
                    "eigenvalues {} and {} of u^t u are not separated",
                    mu[j], mu[i]
                )));
            }
        }
    }
    Ok(())
}

/// Coefficients (in `L_{i-1}`) of every intermediate resultant at a fixed `c`:
/// element 0 is `R_n`, element `k` is `R_{n-k}`, down to `R_2`.
///
/// Each `R_i` is recovered from `2^{n-i+1} + 1` Sylvester determinants taken
/// at roots of unity, which determines it exactly in exact arithmetic.
pub fn chain_polynomials(mu: &[f64], c: Complex64) -> Result<Vec<Vec<Complex64>>> {
    let n = mu.len();
    let one = Complex64::new(1.0, 0.0);
    let mut polys = vec![vec![one, 2.0 * c - mu[n - 1], c * c]];
    for i in (2..n).rev() {
        let prev = polys.last().expect("non-empty");
        let f = [c * c, 2.0 * c - mu[i - 1], one];
        let degree = 2 * (prev.len() - 1);
        let samples = degree + 1;
        let mut values = Vec::with_capacity(samples);
        for j in 0..samples {
            let l = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / samples as f64);
            let mut power = one;
            let p: Vec<Complex64> = prev
                .iter()
                .map(|&a| {
                    let v = a * power;
                    power *= l;
                    v
                })
                .collect();
            values.push(sylvester_det(&p, &f)?);
        }
        fft_forward(&mut values);
        let scale = 1.0 / samples as f64;
        polys.push(values.into_iter().map(|v| v * scale).collect());
    }
    Ok(polys)
}

/// `R_1(c)` for one (complex) value of `c`.
pub fn chain_value(mu: &[f64], c: Complex64) -> Result<Complex64> {
    check_mu(mu)?;
    collapse(mu, c)
}

fn collapse(mu: &[f64], c: Complex64) -> Result<Complex64> {
    let polys = chain_polynomials(mu, c)?;
    let last = polys.last().expect("non-empty");
    if mu.len() == 1 {
        // L_0 = 1
        return Ok(last.iter().sum());
    }
    let f = [c * c, 2.0 * c - mu[0], Complex64::new(1.0, 0.0)];
    sylvester_det(last, &f)
}

/// Placement of the sample points used to recover `R_1` in `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainNodes {
    /// Rotation of every sample circle, as a fraction of one node spacing.
    pub phase: f64,
    /// Multiplies the data-driven base radius `(1 + sqrt(max mu)) / 2`.
    pub scale: f64,
    /// Extra sample points beyond `n 2^n + 1`; the corresponding high
    /// coefficients come back numerically zero, which checks the degree bound.
    pub extra_degree: usize,
}

impl Default for ChainNodes {
    fn default() -> Self {
        ChainNodes {
            phase: 0.3819660112501051,
            scale: 1.0,
            extra_degree: 0,
        }
    }
}

impl ChainNodes {
    /// A randomly rotated and rescaled node set.
    pub fn seeded(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ChainNodes {
            phase: rng.gen_range(0.05..0.95),
            scale: rng.gen_range(0.8..1.25),
            extra_degree: 0,
        }
    }

    fn radii(&self, mu: &[f64]) -> Vec<f64> {
        let mu_max = mu.iter().fold(0.0f64, |a, &b| a.max(b));
        let base = self.scale * 0.5 * (1.0 + mu_max.sqrt());
        (-6..=2).map(|k| base * 2f64.powf(k as f64 / 2.0)).collect()
    }
}

/// The exact degree `n 2^n` of `R_1`.
pub fn chain_degree(n: usize) -> usize {
    n << n
}

/// `R_1(c)` for the eigenvalues `mu` of `u^t u`, with default sample nodes.
pub fn resultant_chain(mu: &[f64]) -> Result<UniPoly> {
    resultant_chain_with(mu, &ChainNodes::default())
}

/// `R_1(c)` recovered from samples placed according to `nodes`.
pub fn resultant_chain_with(mu: &[f64], nodes: &ChainNodes) -> Result<UniPoly> {
    check_mu(mu)?;
    let n = mu.len();
    let degree = chain_degree(n) + nodes.extra_degree;
    let samples = degree + 1;
    let spacing = 2.0 * PI / samples as f64;
    let theta = nodes.phase * spacing;

    let radii = nodes.radii(mu);
    let mut best = vec![Complex64::new(0.0, 0.0); samples];
    let mut best_err = vec![f64::INFINITY; samples];
    for &r in &radii {
        let points: Vec<Complex64> = (0..samples)
            .map(|j| Complex64::from_polar(r, theta + spacing * j as f64))
            .collect();
        let mut values = points
            .par_iter()
            .map(|&z| collapse(mu, z))
            .collect::<Result<Vec<_>>>()?;
        let peak = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        fft_forward(&mut values);
        for (k, v) in values.into_iter().enumerate() {
            let rk = r.powi(k as i32);
            let err = peak / rk;
            if err < best_err[k] {
                let rotation = Complex64::from_polar(1.0, -(k as f64) * theta);
                best[k] = v * rotation / (samples as f64 * rk);
                best_err[k] = err;
            }
        }
    }

    let size = best.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let imag = best.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    if imag > CONDITIONING_TOL * size {
        return Err(Error::Conditioning(format!(
            "recovered coefficients have imaginary part {imag:e} relative to {size:e}"
        )));
    }
    let poly = UniPoly::new(best.iter().map(|v| v.re).collect(), Var::C);

    // off-grid check on the middle circle
    let r = radii[radii.len() / 2];
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for j in 0..samples.min(32) {
        let z = Complex64::from_polar(r, theta + spacing * (j as f64 + 0.5));
        let direct = collapse(mu, z)?;
        worst = worst.max((poly.eval_complex(z) - direct).norm());
        peak = peak.max(direct.norm());
    }
    if worst > CONDITIONING_TOL * peak {
        return Err(Error::Conditioning(format!(
            "interpolation residual {:e} relative",
            worst / peak
        )));
    }
    Ok(poly)
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Starting points on circles read off the upper Newton polygon of
/// `(k, log |a_k|)`.
fn initial_guesses(coeffs: &[f64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a != 0.0)
        .map(|(k, a)| (k, a.abs().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let sigma = 0.7;
    let mut guesses = Vec::with_capacity(deg);
    for (e, w) in hull.windows(2).enumerate() {
        let count = w[1].0 - w[0].0;
        let radius = ((w[0].1 - w[1].1) / count as f64).exp();
        for j in 0..count {
            let angle = 2.0 * PI * j as f64 / count as f64 + 2.0 * PI * e as f64 / deg as f64 + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

/// All complex roots of `p` with multiplicity (Aberth-Ehrlich iteration,
/// followed by Newton polishing), sorted by real then imaginary part.
pub fn poly_roots(p: &UniPoly) -> Result<Vec<Complex64>> {
    let deg = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(Error::Contract("root finding needs degree >= 1".into())),
    };
    if p.leading().abs() < 1e-300 {
        return Err(Error::Contract("leading coefficient is too small".into()));
    }
    let q = p.normalized();
    let coeffs = q.coeffs();
    // exact zero roots
    let zeros = coeffs.iter().take_while(|a| **a == 0.0).count();
    let core = &coeffs[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    if core.len() > 1 {
        roots.extend(aberth(core)?);
    }
    debug_assert_eq!(roots.len(), deg);
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let abs_coeffs: Vec<f64> = coeffs.iter().map(|a| a.abs()).collect();
    let bound = |r: f64| abs_coeffs.iter().rev().fold(0.0, |acc, &a| acc * r + a);
    let stop = 4.0 * f64::EPSILON * (deg as f64 + 1.0);

    let mut z = initial_guesses(coeffs);
    let mut done = vec![false; deg];
    let mut converged = false;
    for _ in 0..ABERTH_MAX_ITER {
        for k in 0..deg {
            if done[k] {
                continue;
            }
            let (p, dp) = horner(coeffs, z[k]);
            if p.norm() <= stop * bound(z[k].norm()) {
                done[k] = true;
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| (z[k] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
            }
            if step.norm() <= f64::EPSILON * z[k].norm() {
                done[k] = true;
            }
        }
        if done.iter().all(|&d| d) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            iterations: ABERTH_MAX_ITER,
        });
    }
    for r in &mut z {
        for _ in 0..POLISH_STEPS {
            let (p, dp) = horner(coeffs, *r);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *r - p / dp;
            if horner(coeffs, cand).0.norm() < p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }
    Ok(z)
}

/// Number of clusters of `roots` under single linkage at radius
/// `tol * max(1, max |root|)`.
pub fn distinct_root_count(roots: &[Complex64], tol: f64) -> usize {
    cluster_labels(roots, tol).into_iter().max().map_or(0, |m| m + 1)
}

/// Cluster index for every root (single linkage, labels in order of first
/// appearance).
pub fn cluster_labels(roots: &[Complex64], tol: f64) -> Vec<usize> {
    let scale = roots.iter().fold(1.0f64, |m, r| m.max(r.norm()));
    let radius = tol * scale;
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    let mut by_root = std::collections::HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let l = *by_root.entry(r).or_insert_with(|| {
            next += 1;
            next - 1
        });
        labels[i] = l;
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `R_1(c) = prod over sign vectors of (1 - prod_i lambda_i^{sign}(c))`,
    /// using both roots of every `f_i`. Independent of Sylvester matrices.
    fn product_oracle(mu: &[f64], cv: Complex64) -> Complex64 {
        let roots: Vec<(Complex64, Complex64)> = mu
            .iter()
            .map(|&m| {
                let b = 2.0 * cv - m;
                let d = (b * b - 4.0 * cv * cv).sqrt();
                ((-b + d) / 2.0, (-b - d) / 2.0)
            })
            .collect();
        (0..1usize << mu.len())
            .map(|mask| {
                let prod: Complex64 = roots
                    .iter()
                    .enumerate()
                    .map(|(i, r)| if mask >> i & 1 == 0 { r.0 } else { r.1 })
                    .product();
                c(1.0, 0.0) - prod
            })
            .product()
    }

    #[test]
    fn unipoly_normal_form() {
        let p = UniPoly::new(vec![1.0, 2.0, 0.0, 0.0], Var::C);
        assert_eq!(p.degree(), Some(1));
        assert_eq!(UniPoly::new(vec![0.0], Var::T).degree(), None);
        assert_eq!(p.derivative().coeffs(), &[2.0]);
        assert_eq!(p.eval(3.0), 7.0);
    }

    #[test]
    fn sylvester_of_constant_quadratics() {
        // Res(l^2 + 1, l^2 - 1) = 4
        let m = sylvester(&[1.0, 0.0, 1.0], &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.len(), 4);
        let mut flat: Vec<f64> = m.into_iter().flatten().collect();
        assert!((det_in_place(&mut flat, 4) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn sylvester_of_linear_factors() {
        let (a, b) = (1.5, -0.25);
        let m = sylvester(&[-a, 1.0], &[-b, 1.0]).unwrap();
        assert_eq!(m, vec![vec![1.0, -a], vec![1.0, -b]]);
        let mut flat: Vec<f64> = m.into_iter().flatten().collect();
        assert!((det_in_place(&mut flat, 2) - (a - b)).abs() < 1e-15);
    }

    #[test]
    fn sylvester_rejects_constants() {
        assert!(sylvester(&[1.0], &[0.0, 1.0]).is_err());
        assert!(sylvester::<f64>(&[], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn symbolic_first_elimination_matches_displayed_matrix() {
        let (mu_n, mu_prev) = (2.5, 0.75);
        let lifted = BiPoly::seed_resultant(mu_n).split_aggregate();
        let f = BiPoly::quadratic_factor(mu_prev).split_first();
        let m = sylvester(&lifted, &f).unwrap();
        assert_eq!(m.len(), 4);
        let c2l2 = BiPoly::monomial(1.0, 2, 2);
        let mid = &BiPoly::new(vec![vec![], vec![-mu_n, 2.0]]) + &BiPoly::zero();
        let one = BiPoly::constant(1.0);
        let zero = BiPoly::zero();
        let fmid = BiPoly::new(vec![vec![-mu_prev, 2.0]]);
        let c2 = BiPoly::monomial(1.0, 0, 2);
        assert_eq!(m[0], vec![c2l2.clone(), mid.clone(), one.clone(), zero.clone()]);
        assert_eq!(m[1], vec![zero.clone(), c2l2, mid, one.clone()]);
        assert_eq!(m[2], vec![one.clone(), fmid.clone(), c2.clone(), zero.clone()]);
        assert_eq!(m[3], vec![zero, one, fmid, c2]);

        // its determinant, evaluated pointwise, is c^8 L^4 + ... + 1
        let mu = [mu_prev, mu_n];
        for &(l, cv) in &[(c(0.7, 0.2), c(-0.3, 0.5)), (c(1.3, -0.4), c(0.9, 0.1))] {
            let mut flat: Vec<Complex64> =
                m.iter().flatten().map(|e| e.eval(l, cv)).collect();
            let det = det_in_place(&mut flat, 4);
            let poly = &chain_polynomials(&mu, cv).unwrap();
            assert_eq!(poly.len(), 1);
            // R_2 over (L_0 = l): compare with resultant in lambda_1 of R_2(l lambda)
            let direct: Vec<Complex64> = poly[0]
                .iter()
                .enumerate()
                .map(|(k, &a)| a * l.powi(k as i32))
                .collect();
            let expect = sylvester_det(&direct, &[cv * cv, 2.0 * cv - mu_prev, c(1.0, 0.0)]).unwrap();
            assert!((det - expect).norm() < 1e-12 * expect.norm().max(1.0));
        }
    }

    #[test]
    fn chain_value_matches_product_oracle() {
        let mus: [&[f64]; 4] = [&[2.0], &[0.4, 1.7], &[0.1, 0.9, 2.2], &[0.05, 0.4, 0.8, 4.6]];
        for mu in mus {
            for z in [c(0.3, 0.4), c(-1.2, 0.05), c(1.7, -0.9), c(0.01, 0.02)] {
                let got = chain_value(mu, z).unwrap();
                let want = product_oracle(mu, z);
                assert!(
                    (got - want).norm() <= 1e-11 * want.norm().max(1e-3),
                    "mu={mu:?} z={z}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn n1_closed_form() {
        let mu = 3.7;
        let r = resultant_chain(&[mu]).unwrap();
        let want = [1.0 - mu, 2.0, 1.0];
        assert_eq!(r.degree(), Some(2));
        for (a, b) in r.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn chain_degree_formula() {
        assert_eq!(chain_degree(1), 2);
        assert_eq!(chain_degree(2), 8);
        assert_eq!(chain_degree(3), 24);
        assert_eq!(chain_degree(4), 64);
        let r = resultant_chain(&[0.3, 1.1]).unwrap();
        assert_eq!(r.degree(), Some(8));
        assert!((r.leading() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_degenerate_mu() {
        assert!(matches!(resultant_chain(&[1.0, 1.0]), Err(Error::Degenerate(_))));
        assert!(matches!(resultant_chain(&[-1.0, 2.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn roots_of_small_polynomials() {
        let r = poly_roots(&UniPoly::new(vec![-3.0, 2.0, 1.0], Var::C)).unwrap();
        assert!((r[0] - c(-3.0, 0.0)).norm() < 1e-14);
        assert!((r[1] - c(1.0, 0.0)).norm() < 1e-14);
        let r = poly_roots(&UniPoly::new(vec![1.0, 0.0, 1.0], Var::C)).unwrap();
        assert!((r[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn roots_with_zero_roots_and_errors() {
        let r = poly_roots(&UniPoly::new(vec![0.0, 0.0, -4.0, 1.0], Var::T)).unwrap();
        assert_eq!(r.len(), 3);
        assert_eq!(distinct_root_count(&r, 1e-9), 2);
        assert!(poly_roots(&UniPoly::new(vec![2.0], Var::C)).is_err());
    }

    #[test]
    fn n2_chain_roots_pass_residuals() {
        let mu = [0.388, 1.062];
        let r = resultant_chain(&mu).unwrap();
        let roots = poly_roots(&r).unwrap();
        assert_eq!(roots.len(), 8);
        for z in &roots {
            let res = r.eval_complex(*z).norm();
            assert!(res <= 1e-8 * r.magnitude_bound(z.norm()), "{z}: {res}");
        }
        assert_eq!(distinct_root_count(&roots, 1e-7), 8);
    }

    #[test]
    fn distinct_count_examples() {
        let roots = [c(1.0, 0.0), c(1.0 + 1e-12, 0.0), c(5.0, 0.0)];
        assert_eq!(distinct_root_count(&roots, 1e-9), 2);
        assert_eq!(distinct_root_count(&[], 1e-9), 0);
        // chaining merges through an intermediate point
        let chain = [c(0.0, 0.0), c(0.6e-9, 0.0), c(1.2e-9, 0.0)];
        assert_eq!(distinct_root_count(&chain, 1e-9), 1);
    }

    #[test]
    fn reseeded_nodes_agree() {
        let mu = [0.085, 0.713, 1.918];
        let a = resultant_chain(&mu).unwrap();
        let b = resultant_chain_with(&mu, &ChainNodes::seeded(5)).unwrap();
        let scale = a.coeffs().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x / a.leading() - y / b.leading()).abs() <= 1e-6 * scale);
        }
    }
}
