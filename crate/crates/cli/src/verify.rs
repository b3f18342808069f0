//! Reproducible count checks behind `edgroup verify`.

use edgroup::critsearch::{is_subset, multistart_census, GroupKind, GroupSpec, CLUSTER_RADIUS};
use edgroup::matcore::{random_general, random_general_complex, Matrix};
use edgroup::orthonear::{
    enumerate_orthogonal_critical, enumerate_unitary_critical, nearest_special_orthogonal,
};
use edgroup::slnear::{sl_critical_points, sl_ed_degree};
use edgroup::torused::{
    lattice_normalized_bound, seeded_coefficients, torus_critical_count_rank1, WeightSet,
};

use crate::commands::Settings;
use crate::error::CliError;
use crate::report::{Count, GroupDescriptor, RunReport};

pub const SUITES: [&str; 6] = [
    "orthogonal",
    "special-orthogonal",
    "unitary",
    "sl",
    "torus",
    "symplectic",
];

/// Sp_4 has 24 complex critical points; a census sees some real subset.
const SP4_COMPLEX: u64 = 24;
/// Census points must satisfy the critical equations this tightly.
const CENSUS_RESIDUAL: f64 = 1e-9;

pub fn run(suite: &str, settings: &Settings) -> Result<RunReport, CliError> {
    let suites: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => {
            return Err(CliError::Input(format!(
                "unknown suite '{other}' (expected one of {}, all)",
                SUITES.join(", ")
            )))
        }
    };
    let mut report = RunReport::new(
        "verify",
        GroupDescriptor::suite(suite),
        suite.as_bytes(),
        settings.seed,
    );
    for s in suites {
        let counts = match s {
            "orthogonal" => orthogonal(settings)?,
            "special-orthogonal" => special_orthogonal(settings)?,
            "unitary" => unitary(settings)?,
            "sl" => sl(settings)?,
            "torus" => torus(settings)?,
            _ => symplectic(settings)?,
        };
        report.counts.extend(counts);
    }
    Ok(report)
}

/// Human-readable table of a verification report.
pub fn table(report: &RunReport) -> String {
    let mut out = format!("{:<40} {:>9} {:>9}  result\n", "check", "expected", "observed");
    for c in &report.counts {
        let show = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        let verdict = match c.pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "-",
        };
        out.push_str(&format!(
            "{:<40} {:>9} {:>9}  {verdict}\n",
            c.label,
            show(c.expected),
            show(c.observed)
        ));
    }
    out
}

fn residuals_ok(residuals: impl IntoIterator<Item = f64>, norm: f64, tol: f64) -> bool {
    residuals.into_iter().all(|r| r <= tol * (1.0 + norm))
}

fn orthogonal(s: &Settings) -> Result<Vec<Count>, CliError> {
    let mut out = Vec::new();
    for n in 2..=6usize {
        let u = random_general(n, s.seed)?;
        let pts = enumerate_orthogonal_critical(&u)?;
        let expected = 1u64 << n;
        let ok = residuals_ok(pts.iter().map(|p| p.residual), u.norm(), s.tol);
        out.push(Count::check(
            format!("orthogonal n={n}"),
            expected,
            pts.len() as u64,
            ok && pts.len() as u64 == expected,
        ));
    }
    Ok(out)
}

fn special_orthogonal(s: &Settings) -> Result<Vec<Count>, CliError> {
    let mut out = Vec::new();
    for n in 2..=6usize {
        let u = random_general(n, s.seed)?;
        let plus: Vec<_> = enumerate_orthogonal_critical(&u)?
            .into_iter()
            .filter(|p| p.det_sign == 1)
            .collect();
        let best = nearest_special_orthogonal(&u)?;
        let minimal = plus
            .iter()
            .all(|p| best.distance_sq <= p.distance_sq + 1e-9 * (1.0 + p.distance_sq));
        let expected = 1u64 << (n - 1);
        out.push(Count::check(
            format!("special-orthogonal n={n}"),
            expected,
            plus.len() as u64,
            minimal && plus.len() as u64 == expected,
        ));
    }
    Ok(out)
}

fn unitary(s: &Settings) -> Result<Vec<Count>, CliError> {
    let mut out = Vec::new();
    for m in 1..=3usize {
        let u = random_general_complex(m, s.seed)?;
        let pts = enumerate_unitary_critical(&u)?;
        let expected = 1u64 << m;
        let ok = residuals_ok(pts.iter().map(|p| p.residual), u.norm_sqr().sqrt(), s.tol);
        out.push(Count::check(
            format!("unitary m={m}"),
            expected,
            pts.len() as u64,
            ok && pts.len() as u64 == expected,
        ));
    }
    Ok(out)
}

fn sl(s: &Settings) -> Result<Vec<Count>, CliError> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let expected = (n as u64) << n;
        let observed = sl_ed_degree(n, s.seed)? as u64;
        out.push(Count::check(
            format!("sl-pm n={n} complex"),
            expected,
            observed,
            observed == expected,
        ));
    }
    Ok(out)
}

fn torus(s: &Settings) -> Result<Vec<Count>, CliError> {
    let mut out = Vec::new();
    for d in [1u32, 3, 5, 7, 2, 4] {
        let w = WeightSet::tensor_power(d);
        let expected = if d % 2 == 1 { 2 * d as u64 } else { d as u64 };
        let bound = lattice_normalized_bound(&w)?;
        let coeffs = seeded_coefficients(&w, s.seed)?;
        let observed = torus_critical_count_rank1(&w, &coeffs, w.lattice_index)? as u64;
        out.push(Count::check(
            format!("torus d={d}"),
            expected,
            observed,
            observed == expected && bound == expected,
        ));
    }
    Ok(out)
}

fn symplectic(s: &Settings) -> Result<Vec<Count>, CliError> {
    let r = |u: &Matrix| CLUSTER_RADIUS * (1.0 + u.norm());

    // Sp_2 is SL_2, so the census must match the exact det +1 points.
    let u = random_general(2, s.seed)?;
    let exact: Vec<Matrix> = sl_critical_points(&u)?
        .into_iter()
        .filter(|p| p.det_sign == 1)
        .map(|p| p.x)
        .collect();
    let sp2 = GroupSpec::new(GroupKind::Symplectic, 2)?;
    let census = multistart_census(&u, &sp2, s.starts, s.seed)?;
    let found: Vec<Matrix> = census.points.into_iter().map(|p| p.x).collect();
    let agree = is_subset(&found, &exact, r(&u)) && is_subset(&exact, &found, r(&u));
    let sp2_count = Count::check(
        "symplectic n=2 census = sl n=2",
        exact.len() as u64,
        found.len() as u64,
        agree,
    );

    let u = random_general(4, s.seed)?;
    let sp4 = GroupSpec::new(GroupKind::Symplectic, 4)?;
    let census = multistart_census(&u, &sp4, s.starts, s.seed)?;
    let k = census.points.len() as u64;
    let ok = (1..=SP4_COMPLEX).contains(&k)
        && census.points.iter().all(|p| p.residual < CENSUS_RESIDUAL);
    let sp4_count = Count::check("symplectic n=4 real (at most)", SP4_COMPLEX, k, ok);
    Ok(vec![sp2_count, sp4_count])
}
