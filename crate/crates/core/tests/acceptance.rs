//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use edgroup::critsearch::{
    critical_residual, is_subset, lie_basis, multistart_census, GroupKind, GroupSpec,
};
use edgroup::matcore::{random_general, random_general_complex, sym_eig, CMatrix, Matrix};
use edgroup::orthonear::{
    enumerate_orthogonal_critical, enumerate_unitary_critical, gperp_decompose, nearest_orthogonal,
};
use edgroup::polyres::{chain_degree, resultant_chain};
use edgroup::slnear::{sl_critical_points, sl_ed_degree, smallest_c_check, SLSolution};
use edgroup::torused::{
    lattice_normalized_bound, seeded_coefficients, torus_critical_count_rank1, WeightSet,
};

const RESIDUAL_TOL: f64 = 1e-7;
const MINIMALITY_TOL: f64 = 1e-9;
const RECONSTRUCTION_TOL: f64 = 1e-10;
const MEMBERSHIP_TOL: f64 = 1e-7;
const SL_TOL: f64 = 1e-7;
const CENSUS_RADIUS: f64 = 1e-5;
const CENSUS_STARTS: usize = 2000;
const SYMPLECTIC_RESIDUAL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn orthogonal_counts() -> Outcome {
    for n in 2..=6usize {
        for seed in 0..20 {
            let u = random_general(n, seed).map_err(|e| e.to_string())?;
            let pts = enumerate_orthogonal_critical(&u).map_err(|e| e.to_string())?;
            ensure(pts.len() == 1 << n, || format!("n={n} seed={seed}: {} points", pts.len()))?;
            let plus = pts.iter().filter(|p| p.det_sign == 1).count();
            ensure(plus == 1 << (n - 1), || format!("n={n} seed={seed}: {plus} with det +1"))?;
            let worst = pts.iter().map(|p| p.residual).fold(0.0, f64::max);
            ensure(worst < RESIDUAL_TOL, || format!("n={n} seed={seed}: residual {worst:e}"))?;
        }
    }
    Ok("n = 2..6, 20 seeds each: 2^n points, 2^(n-1) with det +1".into())
}

fn orthogonal_minimizer() -> Outcome {
    let g = GroupSpec::orthogonal(4);
    for seed in 0..100 {
        let u = random_general(4, seed).map_err(|e| e.to_string())?;
        let best = nearest_orthogonal(&u).map_err(|e| e.to_string())?;
        for p in enumerate_orthogonal_critical(&u).map_err(|e| e.to_string())? {
            let same = (&p.x - &best.x).norm() < 1e-8;
            let ok = if same {
                (p.distance_sq - best.distance_sq).abs() <= MINIMALITY_TOL
            } else {
                best.distance_sq < p.distance_sq + MINIMALITY_TOL
                    && best.distance_sq < p.distance_sq
            };
            ensure(ok, || format!("seed {seed}: {} vs {}", best.distance_sq, p.distance_sq))?;
            let d = gperp_decompose(&u, &p.x, &g).map_err(|e| e.to_string())?;
            let err = (&(&p.x * &d.s) - &u).norm();
            ensure(err <= RECONSTRUCTION_TOL * u.norm(), || {
                format!("seed {seed}: polar reconstruction error {err:e}")
            })?;
        }
    }
    Ok("100 seeds at n = 4".into())
}

fn unitary_counts() -> Outcome {
    for m in 1..=3usize {
        for seed in 0..10 {
            let u = random_general_complex(m, seed).map_err(|e| e.to_string())?;
            let pts = enumerate_unitary_critical(&u).map_err(|e| e.to_string())?;
            ensure(pts.len() == 1 << m, || format!("m={m} seed={seed}: {} points", pts.len()))?;
            for p in &pts {
                let defect = (&(&p.x.adjoint() * &p.x) - &CMatrix::identity(m)).norm_sqr().sqrt();
                ensure(defect < MEMBERSHIP_TOL, || format!("m={m} seed={seed}: x*x - I = {defect:e}"))?;
            }
            let min = pts.iter().map(|p| p.distance_sq).fold(f64::INFINITY, f64::min);
            ensure(pts[0].distance_sq <= min, || format!("m={m} seed={seed}: positive root not minimal"))?;
        }
    }
    Ok("m = 1..3, 10 seeds each: 2^m unitary points".into())
}

fn sl_degree() -> Outcome {
    let mut summary = Vec::new();
    for n in 1..=3usize {
        let mut hits = 0;
        for seed in 0..20 {
            let u = random_general(n, seed).map_err(|e| e.to_string())?;
            let mu = sym_eig(&(&u.transpose() * &u)).map_err(|e| e.to_string())?.values;
            let r1 = resultant_chain(&mu).map_err(|e| e.to_string())?;
            ensure(r1.degree() == Some(chain_degree(n)), || {
                format!("n={n} seed={seed}: deg R_1 = {:?}", r1.degree())
            })?;
            if sl_ed_degree(n, seed).map_err(|e| e.to_string())? == n << n {
                hits += 1;
            }
        }
        ensure(hits >= 19, || format!("n={n}: {hits}/20 seeds with {} roots", n << n))?;
        summary.push(format!("n={n}: {hits}/20"));
    }
    let four = sl_ed_degree(4, 0).map_err(|e| e.to_string())?;
    ensure(four == 64, || format!("n=4: {four} roots"))?;
    summary.push("n=4: 64".into());
    Ok(summary.join(", "))
}

fn check_solution(u: &Matrix, mu: &[f64], sol: &SLSolution) -> Result<(), String> {
    for (&m, &l) in mu.iter().zip(&sol.lambdas) {
        let f = sol.c * sol.c + (2.0 * sol.c - m) * l + l * l;
        ensure(f.abs() < SL_TOL * (1.0 + m), || format!("f_i = {f:e}"))?;
        ensure(l > 0.0, || format!("lambda = {l}"))?;
    }
    let prod: f64 = sol.lambdas.iter().product();
    ensure((prod - 1.0).abs() < SL_TOL, || format!("prod lambda - 1 = {:e}", prod - 1.0))?;
    let det = sol.x.det().abs();
    ensure((det - 1.0).abs() < SL_TOL, || format!("|det x| - 1 = {:e}", det - 1.0))?;
    let n = u.n();
    let m = &sol.x.transpose() * &(u - &sol.x);
    let defect = (&m - &Matrix::identity(n).scale(sol.c)).norm();
    ensure(defect < SL_TOL * (1.0 + u.norm()), || format!("x^t(u-x) - cI = {defect:e}"))
}

fn sl_validity() -> Outcome {
    let mut checked = 0;
    let mut runs: Vec<(usize, u64)> = (1..=3).flat_map(|n| (0..20).map(move |s| (n, s))).collect();
    runs.push((4, 0));
    for (n, seed) in runs {
        let u = random_general(n, seed).map_err(|e| e.to_string())?;
        let mu = sym_eig(&(&u.transpose() * &u)).map_err(|e| e.to_string())?.values;
        for sol in sl_critical_points(&u).map_err(|e| e.to_string())? {
            check_solution(&u, &mu, &sol).map_err(|e| format!("n={n} seed={seed}: {e}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} real solutions checked"))
}

fn oracle_equivalence() -> Outcome {
    for n in [2usize, 3] {
        for seed in 0..10 {
            let u = random_general(n, seed).map_err(|e| e.to_string())?;
            let exact: Vec<Matrix> = sl_critical_points(&u)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(|s| s.x)
                .collect();
            let census = multistart_census(&u, &GroupSpec::sl_pm(n), CENSUS_STARTS, seed)
                .map_err(|e| e.to_string())?;
            let found: Vec<Matrix> = census.points.into_iter().map(|p| p.x).collect();
            let r = CENSUS_RADIUS * (1.0 + u.norm());
            ensure(is_subset(&exact, &found, r) && is_subset(&found, &exact, r), || {
                format!("SL n={n} seed={seed}: exact {} vs census {}", exact.len(), found.len())
            })?;
        }
    }
    for seed in 0..10 {
        let u = random_general(3, seed).map_err(|e| e.to_string())?;
        let exact: Vec<Matrix> = enumerate_orthogonal_critical(&u)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|p| p.x)
            .collect();
        let census = multistart_census(&u, &GroupSpec::orthogonal(3), CENSUS_STARTS, seed)
            .map_err(|e| e.to_string())?;
        let found: Vec<Matrix> = census.points.into_iter().map(|p| p.x).collect();
        let r = CENSUS_RADIUS * (1.0 + u.norm());
        ensure(is_subset(&exact, &found, r) && is_subset(&found, &exact, r), || {
            format!("O(3) seed={seed}: exact {} vs census {}", exact.len(), found.len())
        })?;
    }
    Ok("SL n = 2, 3 and O(3), 10 seeds each, 2000 starts".into())
}

fn torus_counts() -> Outcome {
    let mut summary = Vec::new();
    for d in [1u32, 3, 5, 7, 2, 4] {
        let w = WeightSet::tensor_power(d);
        let bound = lattice_normalized_bound(&w).map_err(|e| e.to_string())?;
        let want = if d % 2 == 1 { 2 * d } else { d } as usize;
        ensure(bound as usize == want, || format!("d={d}: bound {bound}, expected {want}"))?;
        for seed in 0..10 {
            let coeffs = seeded_coefficients(&w, seed).map_err(|e| e.to_string())?;
            let count = torus_critical_count_rank1(&w, &coeffs, w.lattice_index)
                .map_err(|e| e.to_string())?;
            ensure(count == want, || format!("d={d} seed={seed}: {count} solutions, expected {want}"))?;
        }
        summary.push(format!("d={d}:{want}"));
    }
    Ok(summary.join(" "))
}

fn symplectic() -> Outcome {
    let sp2 = GroupSpec::new(GroupKind::Symplectic, 2).map_err(|e| e.to_string())?;
    let j = sp2.aux.clone().expect("J");
    for b in lie_basis(&sp2) {
        ensure(b.trace().abs() < 1e-15, || "sp(2) basis element with nonzero trace".into())?;
        let defect = (&(&b.transpose() * &j) + &(&j * &b)).norm();
        ensure(defect < 1e-15, || "sp(2) basis element outside sp(2)".into())?;
    }
    for b in lie_basis(&GroupSpec::sl(2)) {
        let defect = (&(&b.transpose() * &j) + &(&j * &b)).norm();
        ensure(defect < 1e-15, || "sl(2) basis element outside sp(2)".into())?;
    }
    for seed in 0..5 {
        let u = random_general(2, seed).map_err(|e| e.to_string())?;
        let r = CENSUS_RADIUS * (1.0 + u.norm());
        let a: Vec<Matrix> = multistart_census(&u, &sp2, CENSUS_STARTS, seed)
            .map_err(|e| e.to_string())?
            .points
            .into_iter()
            .map(|p| p.x)
            .collect();
        let b: Vec<Matrix> = multistart_census(&u, &GroupSpec::sl(2), CENSUS_STARTS, seed)
            .map_err(|e| e.to_string())?
            .points
            .into_iter()
            .map(|p| p.x)
            .collect();
        ensure(is_subset(&a, &b, r) && is_subset(&b, &a, r), || {
            format!("seed {seed}: Sp_2 census {} vs SL_2 census {}", a.len(), b.len())
        })?;
    }
    let sp4 = GroupSpec::new(GroupKind::Symplectic, 4).map_err(|e| e.to_string())?;
    let mut counts = Vec::new();
    for seed in 0..3 {
        let u = random_general(4, seed).map_err(|e| e.to_string())?;
        let census = multistart_census(&u, &sp4, CENSUS_STARTS, seed).map_err(|e| e.to_string())?;
        let k = census.points.len();
        ensure((1..=24).contains(&k), || format!("Sp_4 seed {seed}: {k} points"))?;
        for p in &census.points {
            let res = critical_residual(&p.x, &u, &sp4);
            ensure(res < SYMPLECTIC_RESIDUAL, || format!("Sp_4 seed {seed}: residual {res:e}"))?;
        }
        counts.push(k.to_string());
    }
    Ok(format!("Sp_2 = SL_2 over 5 seeds; Sp_4 real points per seed: {}", counts.join(", ")))
}

fn smallest_c() -> Outcome {
    let mut parts = Vec::new();
    for n in [2usize, 3] {
        let mut holds = 0;
        for seed in 0..50 {
            let u = random_general(n, seed).map_err(|e| e.to_string())?;
            if smallest_c_check(&u).map_err(|e| format!("n={n} seed={seed}: {e}"))?.holds {
                holds += 1;
            }
        }
        parts.push(format!("n={n}: smallest |c| gives the minimizer in {holds}/50"));
    }
    Ok(parts.join("; "))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("orthogonal counts", orthogonal_counts),
        ("orthogonal minimizer", orthogonal_minimizer),
        ("unitary counts", unitary_counts),
        ("SL degree", sl_degree),
        ("SL solution validity", sl_validity),
        ("oracle equivalence", oracle_equivalence),
        ("torus counts", torus_counts),
        ("symplectic desk-scale", symplectic),
        ("smallest-c harness", smallest_c),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail} ({secs:.1}s)", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
