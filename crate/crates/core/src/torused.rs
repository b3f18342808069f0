//! ED degree of compact tori: weight sets, the normalized-volume bound, and
//! exact counts in rank one.
//!
//! A torus `(S^1)^m` acting on `V` is described by the characters
//! `X_V` in `Z^m` that occur in `V_C` and their multiplicities. The ED degree
//! is at most the normalized volume of `conv(X_V)`; in rank one the critical
//! system is a single Laurent polynomial and can be solved outright.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyres::{distinct_root_count, poly_roots, UniPoly, Var};

/// Clustering tolerance for rank-one root counts.
pub const ROOT_TOL: f64 = 1e-7;

/// Characters of a torus representation with their multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSet {
    pub m: usize,
    pub weights: Vec<Vec<i64>>,
    pub multiplicities: Vec<u32>,
    /// Index of the character lattice of the image group in `Z^m` (1 or 2).
    pub lattice_index: u32,
}

#[derive(Deserialize, Serialize)]
#[serde(untagged)]
enum WeightJson {
    Scalar(i64),
    Vector(Vec<i64>),
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct WeightSetJson {
    m: usize,
    weights: Vec<WeightJson>,
    #[serde(default)]
    mults: Option<Vec<u32>>,
    #[serde(default)]
    lattice_index: Option<u32>,
}

impl WeightSet {
    /// Multiplicity one everywhere, lattice index one.
    pub fn new(m: usize, weights: Vec<Vec<i64>>) -> Self {
        let multiplicities = vec![1; weights.len()];
        WeightSet {
            m,
            weights,
            multiplicities,
            lattice_index: 1,
        }
    }

    pub fn rank1(weights: &[i64]) -> Self {
        Self::new(1, weights.iter().map(|&w| vec![w]).collect())
    }

    /// `{-d, -d + 2, ..., d}`, the characters of `SO_2` on `(R^2)^{tensor d}`.
    /// The lattice index is 2 for even `d`.
    pub fn tensor_power(d: u32) -> Self {
        let d = d as i64;
        let mut w = Self::rank1(&(0..=d).map(|k| -d + 2 * k).collect::<Vec<_>>());
        w.lattice_index = if d % 2 == 0 { 2 } else { 1 };
        w
    }

    /// Parses `{"m", "weights", "mults", "lattice_index"}`. In rank one the
    /// weights may be plain integers.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: WeightSetJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let weights: Vec<Vec<i64>> = raw
            .weights
            .into_iter()
            .map(|w| match w {
                WeightJson::Scalar(a) => vec![a],
                WeightJson::Vector(v) => v,
            })
            .collect();
        if let Some(bad) = weights.iter().find(|w| w.len() != raw.m) {
            return Err(Error::Parse(format!(
                "weight {bad:?} does not have {} coordinates",
                raw.m
            )));
        }
        let multiplicities = raw.mults.unwrap_or_else(|| vec![1; weights.len()]);
        if multiplicities.len() != weights.len() {
            return Err(Error::Parse(format!(
                "{} multiplicities for {} weights",
                multiplicities.len(),
                weights.len()
            )));
        }
        Ok(WeightSet {
            m: raw.m,
            weights,
            multiplicities,
            lattice_index: raw.lattice_index.unwrap_or(1),
        })
    }

    pub fn to_json(&self) -> String {
        let raw = WeightSetJson {
            m: self.m,
            weights: self.weights.iter().cloned().map(WeightJson::Vector).collect(),
            mults: Some(self.multiplicities.clone()),
            lattice_index: Some(self.lattice_index),
        };
        serde_json::to_string(&raw).expect("plain data")
    }
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            let (f, g) = (a[i][col], a[rank][col]);
            if f != 0 {
                for j in col..cols {
                    a[i][j] = a[i][j] * g - a[rank][j] * f;
                }
                let content = a[i].iter().fold(0i128, |acc, &v| gcd(acc, v));
                if content > 1 {
                    a[i].iter_mut().for_each(|v| *v /= content);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Central symmetry (with matching multiplicities), distinct weights,
/// positive multiplicities and full rank.
pub fn validate_weightset(w: &WeightSet) -> bool {
    if w.m == 0 || w.weights.is_empty() || w.weights.len() != w.multiplicities.len() {
        return false;
    }
    if w.weights.iter().any(|v| v.len() != w.m) || w.multiplicities.contains(&0) {
        return false;
    }
    let mut table: BTreeMap<&[i64], u32> = BTreeMap::new();
    for (v, &k) in w.weights.iter().zip(&w.multiplicities) {
        if table.insert(v, k).is_some() {
            return false;
        }
    }
    let symmetric = table.iter().all(|(v, &k)| {
        let neg: Vec<i64> = v.iter().map(|a| -a).collect();
        table.get(neg.as_slice()) == Some(&k)
    });
    symmetric && integer_rank(&w.weights) == w.m
}

fn cross(o: &[i64; 2], a: &[i64; 2], b: &[i64; 2]) -> i64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Vertices of the convex hull in counter-clockwise order (monotone chain).
pub fn hull_2d(points: &[[i64; 2]]) -> Vec<[i64; 2]> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<[i64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[i64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Twice the area of a polygon (shoelace), absolute value.
pub fn twice_area(polygon: &[[i64; 2]]) -> u64 {
    let k = polygon.len();
    let sum: i64 = (0..k)
        .map(|i| {
            let (a, b) = (polygon[i], polygon[(i + 1) % k]);
            a[0] * b[1] - a[1] * b[0]
        })
        .sum();
    sum.unsigned_abs()
}

fn sub3(a: &[i64; 3], b: &[i64; 3]) -> [i64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross3(a: &[i64; 3], b: &[i64; 3]) -> [i64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: &[i64; 3], b: &[i64; 3]) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Six times the volume of the convex hull of a 3-dimensional point set
/// containing the origin in its interior.
///
/// Facets are found by brute force over point triples whose plane supports
/// the set; each facet polygon is fan-triangulated and coned off to the origin.
pub fn six_volume_3d(points: &[[i64; 3]]) -> u64 {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let k = pts.len();
    let mut facets: Vec<[i64; 4]> = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                let mut normal = cross3(&sub3(&pts[j], &pts[i]), &sub3(&pts[l], &pts[i]));
                if normal == [0, 0, 0] {
                    continue;
                }
                let g = normal.iter().fold(0i128, |a, &v| gcd(a, v as i128)) as i64;
                normal.iter_mut().for_each(|v| *v /= g);
                let offset = dot3(&normal, &pts[i]);
                let side: Vec<i64> = pts.iter().map(|p| (dot3(&normal, p) - offset).signum()).collect();
                let (pos, neg) = (side.contains(&1), side.contains(&-1));
                if pos && neg {
                    continue;
                }
                // orient outward: every point on the non-positive side
                let key = if pos {
                    [-normal[0], -normal[1], -normal[2], -offset]
                } else {
                    [normal[0], normal[1], normal[2], offset]
                };
                if !facets.contains(&key) {
                    facets.push(key);
                }
            }
        }
    }
    let mut total = 0u64;
    for f in &facets {
        let normal = [f[0], f[1], f[2]];
        let on: Vec<[i64; 3]> = pts.iter().copied().filter(|p| dot3(&normal, p) == f[3]).collect();
        // project away the coordinate where the normal is largest
        let drop = (0..3).max_by_key(|&c| normal[c].abs()).expect("three coordinates");
        let keep: Vec<usize> = (0..3).filter(|&c| c != drop).collect();
        let flat: Vec<[i64; 2]> = on.iter().map(|p| [p[keep[0]], p[keep[1]]]).collect();
        let ring = hull_2d(&flat);
        let lift = |q: &[i64; 2]| -> [i64; 3] {
            *on.iter()
                .find(|p| p[keep[0]] == q[0] && p[keep[1]] == q[1])
                .expect("projection is injective on a facet")
        };
        let verts: Vec<[i64; 3]> = ring.iter().map(lift).collect();
        for t in 1..verts.len().saturating_sub(1) {
            let det = dot3(&verts[0], &cross3(&verts[t], &verts[t + 1]));
            total += det.unsigned_abs();
        }
    }
    total
}

/// Normalized volume of `conv(X_V)` with respect to `Z^m` (the standard
/// simplex has volume one). Independent of the multiplicities.
pub fn bkk_bound(w: &WeightSet) -> Result<u64> {
    if w.m > 3 {
        return Err(Error::UnsupportedRank(w.m));
    }
    if !validate_weightset(w) {
        return Err(Error::Contract(
            "weight set must be centrally symmetric with full rank".into(),
        ));
    }
    Ok(match w.m {
        1 => {
            let (lo, hi) = w
                .weights
                .iter()
                .fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v[0]), hi.max(v[0])));
            (hi - lo) as u64
        }
        2 => {
            let pts: Vec<[i64; 2]> = w.weights.iter().map(|v| [v[0], v[1]]).collect();
            twice_area(&hull_2d(&pts))
        }
        _ => {
            let pts: Vec<[i64; 3]> = w.weights.iter().map(|v| [v[0], v[1], v[2]]).collect();
            six_volume_3d(&pts)
        }
    })
}

/// The bound measured in the character lattice of the image group, a
/// sublattice of index `lattice_index` in `Z^m`: the `Z^m`-normalized volume
/// divided by the index.
pub fn lattice_normalized_bound(w: &WeightSet) -> Result<u64> {
    check_index(w)?;
    let bound = bkk_bound(w)?;
    let index = w.lattice_index as u64;
    if bound % index != 0 {
        return Err(Error::Invariant(format!(
            "normalized volume {bound} is not divisible by the lattice index {index}"
        )));
    }
    Ok(bound / index)
}

fn check_index(w: &WeightSet) -> Result<()> {
    match w.lattice_index {
        1 => Ok(()),
        2 if w.m == 1 => {
            if w.weights.iter().any(|v| v[0] % 2 != 0) {
                Err(Error::Contract("lattice index 2 needs even weights".into()))
            } else {
                Ok(())
            }
        }
        2 => Err(Error::Unsupported("lattice index 2 is handled in rank one only".into())),
        k => Err(Error::Contract(format!("lattice index must be 1 or 2, got {k}"))),
    }
}

/// Folds diagonal data entries into the coefficients of the reduced rank-one
/// equation: `u'_chi = chi * (sum of u_ii with character chi)`. The factor
/// `chi` comes from pairing with the Lie algebra, so the zero character
/// drops out.
pub fn reduced_coefficients(characters: &[i64], diagonal: &[f64]) -> Result<BTreeMap<i64, f64>> {
    if characters.len() != diagonal.len() {
        return Err(Error::Dimension {
            expected: characters.len(),
            found: diagonal.len(),
        });
    }
    let mut out = BTreeMap::new();
    for (&chi, &d) in characters.iter().zip(diagonal) {
        *out.entry(chi).or_insert(0.0) += chi as f64 * d;
    }
    out.remove(&0);
    Ok(out)
}

/// Number of solutions `t` in `C^*` of `sum_chi u'_chi t^chi = 0`, counted
/// in `s = t^2` when `lattice_index` is 2.
pub fn torus_critical_count_rank1(
    w: &WeightSet,
    coeffs: &BTreeMap<i64, f64>,
    lattice_index: u32,
) -> Result<usize> {
    if w.m != 1 {
        return Err(Error::Unsupported(format!("exact counting in rank {}", w.m)));
    }
    let w = WeightSet {
        lattice_index,
        ..w.clone()
    };
    check_index(&w)?;
    if let Some((&chi, _)) = coeffs.iter().find(|(chi, _)| !w.weights.contains(&vec![**chi])) {
        return Err(Error::Contract(format!("coefficient for {chi}, which is not a weight")));
    }
    let support: Vec<(i64, f64)> = coeffs
        .iter()
        .filter(|(_, &a)| a != 0.0)
        .map(|(&chi, &a)| (chi, a))
        .collect();
    let lo = w.weights.iter().map(|v| v[0]).min().expect("nonempty");
    let hi = w.weights.iter().map(|v| v[0]).max().expect("nonempty");
    let at = |chi: i64| support.iter().find(|(c, _)| *c == chi).map(|(_, a)| *a);
    if at(lo).is_none() || at(hi).is_none() {
        return Err(Error::Degenerate(
            "extreme characters need nonzero coefficients".into(),
        ));
    }
    let step = lattice_index as i64;
    let degree = ((hi - lo) / step) as usize;
    let mut poly = vec![0.0; degree + 1];
    for (chi, a) in support {
        poly[((chi - lo) / step) as usize] += a;
    }
    let roots = poly_roots(&UniPoly::new(poly, Var::T))?;
    Ok(distinct_root_count(&roots, ROOT_TOL))
}

/// Bound and exact counts over seeded draws of the diagonal data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Tightness {
    /// Normalized volume with respect to `Z`.
    pub bound: u64,
    /// The bound in the image lattice.
    pub lattice_bound: u64,
    pub counts: Vec<usize>,
}

/// Diagonal entries for every weight (with multiplicity), uniform on `[-1, 1]`.
pub fn seeded_coefficients(w: &WeightSet, seed: u64) -> Result<BTreeMap<i64, f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chars = Vec::new();
    let mut diag = Vec::new();
    for (v, &k) in w.weights.iter().zip(&w.multiplicities) {
        for _ in 0..k {
            chars.push(v[0]);
            diag.push(rng.gen_range(-1.0..=1.0));
        }
    }
    reduced_coefficients(&chars, &diag)
}

/// Runs [`torus_critical_count_rank1`] on `seeds` seeded draws.
pub fn bkk_tightness_experiment(w: &WeightSet, seeds: u64) -> Result<Tightness> {
    if w.m != 1 {
        return Err(Error::Unsupported(format!("exact counting in rank {}", w.m)));
    }
    let counts = (0..seeds)
        .map(|seed| {
            let coeffs = seeded_coefficients(w, seed)?;
            torus_critical_count_rank1(w, &coeffs, w.lattice_index)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Tightness {
        bound: bkk_bound(w)?,
        lattice_bound: lattice_normalized_bound(w)?,
        counts,
    })
}
