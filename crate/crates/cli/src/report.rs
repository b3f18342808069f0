//! The JSON report written to stdout.
//!
//! Fields are emitted in declaration order and every float is printed with 17
//! significant digits, so the same run always produces the same bytes.

use edgroup::orthonear::CriticalPoint;
use edgroup::{CMatrix, Matrix};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

/// A float serialized as `d.dddddddddddddddde±x`; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Float(pub f64);

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn rows(m: &Matrix) -> Vec<Vec<Float>> {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(Float).collect())
        .collect()
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum MatrixOut {
    Real {
        n: usize,
        data: Vec<Vec<Float>>,
    },
    Complex {
        n: usize,
        re: Vec<Vec<Float>>,
        im: Vec<Vec<Float>>,
    },
}

impl MatrixOut {
    pub fn real(m: &Matrix) -> Self {
        MatrixOut::Real {
            n: m.n(),
            data: rows(m),
        }
    }

    pub fn complex(m: &CMatrix) -> Self {
        MatrixOut::Complex {
            n: m.n(),
            re: rows(&m.re()),
            im: rows(&m.im()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupDescriptor {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl GroupDescriptor {
    pub fn matrix(kind: &str, n: usize) -> Self {
        GroupDescriptor {
            kind: kind.to_string(),
            n: Some(n),
            m: None,
        }
    }

    pub fn torus(m: usize) -> Self {
        GroupDescriptor {
            kind: "torus".into(),
            n: None,
            m: Some(m),
        }
    }

    pub fn suite(name: &str) -> Self {
        GroupDescriptor {
            kind: name.to_string(),
            n: None,
            m: None,
        }
    }
}

/// One critical point in a report.
#[derive(Clone, Debug, Serialize)]
pub struct PointSummary {
    pub x: MatrixOut,
    pub distance_sq: Float,
    pub det_sign: i8,
    pub residual: Float,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Float>,
}

impl PointSummary {
    pub fn real(p: &CriticalPoint) -> Self {
        PointSummary {
            x: MatrixOut::real(&p.x),
            distance_sq: Float(p.distance_sq),
            det_sign: p.det_sign,
            residual: Float(p.residual),
            c: p.c.map(Float),
        }
    }

    pub fn complex(p: &CriticalPoint<CMatrix>) -> Self {
        PointSummary {
            x: MatrixOut::complex(&p.x),
            distance_sq: Float(p.distance_sq),
            det_sign: p.det_sign,
            residual: Float(p.residual),
            c: None,
        }
    }
}

/// An expected count and, for verification runs, what was observed.
#[derive(Clone, Debug, Serialize)]
pub struct Count {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
}

impl Count {
    pub fn expected(label: impl Into<String>, expected: u64) -> Self {
        Count {
            label: label.into(),
            expected: Some(expected),
            observed: None,
            pass: None,
        }
    }

    pub fn check(label: impl Into<String>, expected: u64, observed: u64, pass: bool) -> Self {
        Count {
            label: label.into(),
            expected: Some(expected),
            observed: Some(observed),
            pass: Some(pass),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub group: GroupDescriptor,
    pub input_digest: String,
    pub results: Vec<PointSummary>,
    pub counts: Vec<Count>,
    /// Command-specific extras (bounds, census diagnostics).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    pub seed: u64,
    /// Wall time; zero unless timing was requested, to keep output reproducible.
    pub elapsed_ms: u64,
}

impl RunReport {
    pub fn new(command: &str, group: GroupDescriptor, input: &[u8], seed: u64) -> Self {
        RunReport {
            command: command.to_string(),
            group,
            input_digest: digest(input),
            results: Vec::new(),
            counts: Vec::new(),
            details: None,
            seed,
            elapsed_ms: 0,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.counts.iter().all(|c| c.pass != Some(false))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is plain data")
    }
}

/// Lowercase hex SHA-256.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = serde_json::to_string(&Float(0.1)).unwrap();
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(serde_json::to_string(&Float(-2.0)).unwrap(), "-2.0000000000000000e0");
        assert_eq!(serde_json::to_string(&Float(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn round_trip_through_json() {
        for x in [1.0 / 3.0, 1e-300, -123456.789, f64::MAX] {
            let s = serde_json::to_string(&Float(x)).unwrap();
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back, x);
        }
    }

    #[test]
    fn field_order_is_fixed() {
        let r = RunReport::new("nearest", GroupDescriptor::matrix("sl", 2), b"abc", 3);
        let s = serde_json::to_string(&r).unwrap();
        let keys = ["\"command\"", "\"group\"", "\"input_digest\"", "\"results\"", "\"counts\"", "\"seed\"", "\"elapsed_ms\""];
        let pos: Vec<usize> = keys.iter().map(|k| s.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]), "{s}");
        assert!(s.contains("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
    }
}
