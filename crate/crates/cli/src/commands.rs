use std::path::Path;

use edgroup::critsearch::{multistart_census, GroupKind, GroupSpec};
use edgroup::matcore::MatrixFile;
use edgroup::orthonear::{
    enumerate_orthogonal_critical, enumerate_unitary_critical, nearest_orthogonal,
    nearest_special_orthogonal, nearest_unitary, CriticalPoint,
};
use edgroup::slnear::{analyze_sl, nearest_sl, Component, SlConfig};
use edgroup::torused::{
    bkk_bound, lattice_normalized_bound, seeded_coefficients, torus_critical_count_rank1,
    validate_weightset, WeightSet,
};
use edgroup::{CMatrix, Matrix};
use serde_json::json;

use crate::error::CliError;
use crate::report::{Count, GroupDescriptor, PointSummary, RunReport};

/// Flags shared by every subcommand.
#[derive(Clone, Copy, Debug)]
pub struct Settings {
    pub seed: u64,
    pub tol: f64,
    pub starts: usize,
}

/// Census sizes at which the complex symplectic counts are known.
fn symplectic_complex_count(n: usize) -> Option<u64> {
    match n {
        2 => Some(4),
        4 => Some(24),
        6 => Some(544),
        _ => None,
    }
}

fn parse_group(name: &str) -> Result<GroupKind, CliError> {
    if name.eq_ignore_ascii_case("torus") {
        return Err(CliError::Unsupported(
            "torus groups take a weight set; use the bkk command".into(),
        ));
    }
    name.parse::<GroupKind>().map_err(CliError::from)
}

fn read(path: &Path) -> Result<(Vec<u8>, String), CliError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
    Ok((bytes, text))
}

enum Input {
    Real(Matrix),
    Complex(CMatrix),
}

fn load_matrix(text: &str, kind: GroupKind) -> Result<Input, CliError> {
    let file = MatrixFile::parse(text)?;
    Ok(match kind {
        GroupKind::UnitaryEmbedded => Input::Complex(file.into_complex()?),
        _ => Input::Real(file.into_real()?),
    })
}

/// The dimension reported for a group: `m` for `U(m)`, `n` otherwise.
fn descriptor(kind: GroupKind, n: usize) -> GroupDescriptor {
    GroupDescriptor::matrix(kind.name(), n)
}

fn check_residual(residual: f64, norm: f64, tol: f64) -> Result<(), CliError> {
    if residual > tol * (1.0 + norm) {
        return Err(CliError::Numerical(format!(
            "critical residual {residual:e} exceeds tolerance {:e}",
            tol * (1.0 + norm)
        )));
    }
    Ok(())
}

fn sl_component(kind: GroupKind, component: Option<&str>) -> Result<Component, CliError> {
    match (kind, component) {
        (GroupKind::Sl | GroupKind::SlPm, Some(c)) => Ok(c.parse()?),
        (GroupKind::Sl, None) => Ok(Component::Plus),
        (GroupKind::SlPm, None) => Ok(Component::Pm),
        (_, Some(_)) => Err(CliError::Input(format!(
            "--component applies only to sl and sl-pm, not {}",
            kind.name()
        ))),
        (_, None) => Ok(Component::Pm),
    }
}

pub fn nearest(
    group: &str,
    input: &Path,
    component: Option<&str>,
    settings: &Settings,
) -> Result<RunReport, CliError> {
    let kind = parse_group(group)?;
    let component = sl_component(kind, component)?;
    if kind == GroupKind::Symplectic {
        return Err(CliError::Unsupported(
            "no closed-form nearest point on symplectic groups; use the critical command".into(),
        ));
    }
    let (bytes, text) = read(input)?;
    let summary = match load_matrix(&text, kind)? {
        Input::Complex(u) => {
            let p = nearest_unitary(&u)?;
            check_residual(p.residual, u.norm_sqr().sqrt(), settings.tol)?;
            (descriptor(kind, u.n()), PointSummary::complex(&p))
        }
        Input::Real(u) => {
            let g = GroupSpec::new(kind, u.n())?;
            let p = match kind {
                GroupKind::Orthogonal => nearest_orthogonal(&u)?,
                GroupKind::SpecialOrthogonal => nearest_special_orthogonal(&u)?,
                _ => {
                    let s = nearest_sl(&u, component)?;
                    CriticalPoint::evaluate(s.x, &u, &g)
                }
            };
            check_residual(p.residual, u.norm(), settings.tol)?;
            (descriptor(kind, u.n()), PointSummary::real(&p))
        }
    };
    let mut report = RunReport::new("nearest", summary.0, &bytes, settings.seed);
    report.results.push(summary.1);
    Ok(report)
}

pub fn critical(group: &str, input: &Path, settings: &Settings) -> Result<RunReport, CliError> {
    let kind = parse_group(group)?;
    let (bytes, text) = read(input)?;
    let u = match load_matrix(&text, kind)? {
        Input::Complex(u) => {
            let m = u.n();
            let points = enumerate_unitary_critical(&u)?;
            for p in &points {
                check_residual(p.residual, u.norm_sqr().sqrt(), settings.tol)?;
            }
            let mut report = RunReport::new("critical", descriptor(kind, m), &bytes, settings.seed);
            report.results = points.iter().map(PointSummary::complex).collect();
            report.counts.push(Count::expected("real critical points", 1 << m));
            return Ok(report);
        }
        Input::Real(u) => u,
    };
    let n = u.n();
    let g = GroupSpec::new(kind, n)?;
    let mut report = RunReport::new("critical", descriptor(kind, n), &bytes, settings.seed);
    let points: Vec<CriticalPoint> = match kind {
        GroupKind::Orthogonal | GroupKind::SpecialOrthogonal => {
            let all = enumerate_orthogonal_critical(&u)?;
            let keep_all = kind == GroupKind::Orthogonal;
            let expected = if keep_all { 1u64 << n } else { 1u64 << (n - 1) };
            report.counts.push(Count::expected("real critical points", expected));
            all.into_iter().filter(|p| keep_all || p.det_sign == 1).collect()
        }
        GroupKind::Sl | GroupKind::SlPm => {
            let analysis = analyze_sl(&u, &SlConfig::default())?;
            let plus_only = kind == GroupKind::Sl;
            let degree = (n as u64) << n;
            let expected = if plus_only { degree / 2 } else { degree };
            report.counts.push(Count::expected("complex critical points", expected));
            report.details = Some(json!({
                "complex_roots": analysis.roots.len(),
                "real_roots": analysis.real_roots.len(),
                "discarded_roots": analysis.discarded.len(),
            }));
            analysis
                .solutions
                .into_iter()
                .filter(|s| !plus_only || s.det_sign == 1)
                .map(|s| CriticalPoint::evaluate(s.x, &u, &g))
                .collect()
        }
        GroupKind::Symplectic => {
            let census = multistart_census(&u, &g, settings.starts, settings.seed)?;
            if let Some(c) = symplectic_complex_count(n) {
                report.counts.push(Count::expected("complex critical points", c));
            }
            report.details = Some(json!({
                "starts": census.starts,
                "converged": census.converged,
                "dropped": census.dropped,
            }));
            census.points
        }
        GroupKind::UnitaryEmbedded => unreachable!("complex input handled above"),
    };
    for p in &points {
        check_residual(p.residual, u.norm(), settings.tol)?;
    }
    report.results = points.iter().map(PointSummary::real).collect();
    Ok(report)
}

pub fn bkk(path: &Path, settings: &Settings) -> Result<RunReport, CliError> {
    let (bytes, text) = read(path)?;
    let w = WeightSet::parse(&text)?;
    if w.m > 3 {
        return Err(CliError::Unsupported(format!(
            "unsupported torus rank {} (at most 3)",
            w.m
        )));
    }
    if !validate_weightset(&w) {
        return Err(CliError::Input(
            "weight set must be symmetric under negation, nonzero, distinct and of full rank"
                .into(),
        ));
    }
    let bound = bkk_bound(&w)?;
    let lattice_bound = lattice_normalized_bound(&w)?;
    let mut report = RunReport::new("bkk", GroupDescriptor::torus(w.m), &bytes, settings.seed);
    let mut details = json!({ "bound": bound, "lattice_bound": lattice_bound });
    if w.m == 1 {
        let coeffs = seeded_coefficients(&w, settings.seed)?;
        let count = torus_critical_count_rank1(&w, &coeffs, w.lattice_index)?;
        details["count"] = json!(count);
    }
    report.counts.push(Count::expected("normalized volume", bound));
    report.details = Some(details);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn component_defaults() {
        assert_eq!(sl_component(GroupKind::Sl, None).unwrap(), Component::Plus);
        assert_eq!(sl_component(GroupKind::SlPm, None).unwrap(), Component::Pm);
        assert!(matches!(
            sl_component(GroupKind::Orthogonal, Some("plus")),
            Err(CliError::Input(_))
        ));
    }

    #[test]
    fn torus_is_rejected_as_unsupported() {
        assert!(matches!(parse_group("torus"), Err(CliError::Unsupported(_))));
        assert!(matches!(parse_group("nonsense"), Err(CliError::Input(_))));
    }
}
