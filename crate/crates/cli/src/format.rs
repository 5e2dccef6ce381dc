//! JSON frame files and check reports.
//!
//! A frame file lists, per atom, the spanning vectors of its subspace and the
//! rows of its local operator. Complex entries are `[re, im]` pairs; real
//! entries may be plain numbers. Spanning sets are orthonormalized on load
//! unless they already are orthonormal, and canonical local operators are kept
//! verbatim, so saving and reloading reproduces every matrix bit for bit.

use gfusion::model::FrameAtom;
use gfusion::{CMatrix, CheckSuiteResult, Complex64, GFusionFrame, MeasureAtom, ScalarKind, Subspace};
use serde::{Deserialize, Serialize};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported version {0}, expected 1")]
    Version(u32),
    #[error("atom `{id}`: {message}")]
    Atom { id: String, message: String },
    #[error(transparent)]
    Model(#[from] gfusion::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn from_complex(z: Complex64, scalar: ScalarKind) -> Self {
        match scalar {
            ScalarKind::Real => Entry::Real(z.re),
            ScalarKind::Complex => Entry::Complex([z.re, z.im]),
        }
    }

    fn value(self) -> Complex64 {
        match self {
            Entry::Real(re) => Complex64::new(re, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomSpec {
    pub id: String,
    pub mu: f64,
    pub omega: f64,
    /// Spanning vectors of the subspace, one per row.
    pub basis: Vec<Vec<Entry>>,
    /// Local operator, `m × dim`.
    pub lambda: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSpecFile {
    pub version: u32,
    pub scalar: ScalarKind,
    pub dim: usize,
    pub atoms: Vec<AtomSpec>,
}

impl FrameSpecFile {
    pub fn from_frame(frame: &GFusionFrame) -> Self {
        let scalar = frame.scalar();
        let row = |m: &CMatrix, r: usize| (0..m.ncols()).map(|j| Entry::from_complex(m[(r, j)], scalar)).collect();
        let col = |m: &CMatrix, j: usize| (0..m.nrows()).map(|r| Entry::from_complex(m[(r, j)], scalar)).collect();
        let atoms = frame
            .atoms()
            .iter()
            .map(|a| {
                let basis = a.subspace.basis();
                let local = a.local.matrix();
                AtomSpec {
                    id: a.id().to_owned(),
                    mu: a.measure.mu,
                    omega: a.measure.omega,
                    basis: (0..basis.ncols()).map(|j| col(basis, j)).collect(),
                    lambda: (0..local.nrows()).map(|r| row(local, r)).collect(),
                }
            })
            .collect();
        Self {
            version: FORMAT_VERSION,
            scalar,
            dim: frame.dim(),
            atoms,
        }
    }

    pub fn to_frame(&self) -> Result<GFusionFrame, FormatError> {
        if self.version != FORMAT_VERSION {
            return Err(FormatError::Version(self.version));
        }
        let atoms = self
            .atoms
            .iter()
            .map(|spec| {
                let bad = |message: String| FormatError::Atom {
                    id: spec.id.clone(),
                    message,
                };
                let check_entries = |rows: &[Vec<Entry>], what: &str| -> Result<(), FormatError> {
                    if rows.is_empty() {
                        return Err(bad(format!("{what} has no rows")));
                    }
                    for (i, r) in rows.iter().enumerate() {
                        if r.len() != self.dim {
                            return Err(bad(format!("{what} row {i} has length {}, expected {}", r.len(), self.dim)));
                        }
                        if self.scalar == ScalarKind::Real && r.iter().any(|e| e.value().im != 0.0) {
                            return Err(bad(format!("{what} row {i} has a non-zero imaginary part in a real frame")));
                        }
                    }
                    Ok(())
                };
                check_entries(&spec.basis, "basis")?;
                check_entries(&spec.lambda, "lambda")?;
                let spanning = CMatrix::from_fn(self.dim, spec.basis.len(), |r, j| spec.basis[j][r].value());
                let local = CMatrix::from_fn(spec.lambda.len(), self.dim, |r, j| spec.lambda[r][j].value());
                let measure = MeasureAtom::new(spec.id.clone(), spec.mu, spec.omega)?;
                Ok(FrameAtom::new(measure, Subspace::from_vectors(&spanning)?, local)?)
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(GFusionFrame::new(self.dim, self.scalar, atoms)?)
    }
}

/// Pretty JSON with a trailing newline; the bytes depend only on `value`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

pub fn frame_to_json(frame: &GFusionFrame) -> String {
    to_json(&FrameSpecFile::from_frame(frame))
}

pub fn frame_from_json(text: &str) -> Result<GFusionFrame, FormatError> {
    serde_json::from_str::<FrameSpecFile>(text)?.to_frame()
}

pub fn report_to_json(report: &CheckSuiteResult) -> String {
    to_json(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use gfusion::gen::{self, FrameKind, GenConfig};

    #[test]
    fn round_trip_is_bit_exact() {
        for cfg in [
            GenConfig::new(4, 6, 3),
            GenConfig::new(5, 9, 8).complex(),
            GenConfig::new(3, 4, 1).complex().kind(FrameKind::Parseval),
        ] {
            let frame = gen::random_frame(&cfg).unwrap();
            let back = frame_from_json(&frame_to_json(&frame)).unwrap();
            assert_eq!(back, frame);
            assert_eq!(back.digest(), frame.digest());
        }
    }

    #[test]
    fn real_entries_are_plain_numbers() {
        let text = frame_to_json(&gen::orthonormal_basis_frame(2));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["atoms"][0]["basis"], serde_json::json!([[1.0, 0.0]]));
        assert_eq!(v["scalar"], "real");
    }

    #[test]
    fn spanning_sets_are_orthonormalized() {
        let text = r#"{"version":1,"scalar":"real","dim":2,"atoms":[
            {"id":"a","mu":1,"omega":1,"basis":[[2,0],[3,3]],"lambda":[[1,0],[0,1]]}]}"#;
        let frame = frame_from_json(text).unwrap();
        assert_eq!(frame.atoms()[0].subspace.dim(), 2);
    }

    #[test]
    fn complex_pairs_parse() {
        let text = r#"{"version":1,"scalar":"complex","dim":1,"atoms":[
            {"id":"a","mu":1,"omega":1,"basis":[[[0,1]]],"lambda":[[[0.5,-0.5]]]}]}"#;
        let frame = frame_from_json(text).unwrap();
        assert_eq!(frame.atoms()[0].local.matrix()[(0, 0)], Complex64::new(0.5, -0.5));
    }

    #[test]
    fn rejects_bad_documents() {
        let cases = [
            r#"{"version":2,"scalar":"real","dim":1,"atoms":[{"id":"a","mu":1,"omega":1,"basis":[[1]],"lambda":[[1]]}]}"#,
            r#"{"version":1,"scalar":"real","dim":2,"atoms":[{"id":"a","mu":1,"omega":1,"basis":[[1]],"lambda":[[1,0]]}]}"#,
            r#"{"version":1,"scalar":"real","dim":1,"atoms":[{"id":"a","mu":1,"omega":1,"basis":[[NaN]],"lambda":[[1]]}]}"#,
            r#"{"version":1,"scalar":"real","dim":1,"atoms":[{"id":"a","mu":1,"omega":1,"basis":[[1e400]],"lambda":[[1]]}]}"#,
            r#"{"version":1,"scalar":"real","dim":1,"atoms":[{"id":"a","mu":1,"omega":1,"basis":[[[1,2]]],"lambda":[[1]]}]}"#,
            r#"{"version":1,"scalar":"real","dim":1,"atoms":[{"id":"a","mu":1,"omega":1,"basis":[[1,2,3]],"lambda":[[1]]}]}"#,
            r#"{"version":1,"scalar":"real","dim":1,"atoms":[{"id":"a","mu":1,"omega":1,"basis":[[1]],"lambda":[[1]],"extra":0}]}"#,
            r#"{"version":1,"scalar":"real","dim":1,"atoms":[{"id":"a","mu":-1,"omega":1,"basis":[[1]],"lambda":[[1]]}]}"#,
            r#"{"version":1,"scalar":"quaternion","dim":1,"atoms":[]}"#,
        ];
        for text in cases {
            assert!(frame_from_json(text).is_err(), "{text}");
        }
    }

    #[test]
    fn report_serializes_nan_as_null() {
        let b = gen::random_frame(&GenConfig::new(3, 5, 1).kind(FrameKind::BesselOnly)).unwrap();
        let r = gfusion::identities::run_suite(&b, &gfusion::SuiteConfig { trials: 2, ..Default::default() }).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report_to_json(&r)).unwrap();
        let g = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "general_identity").unwrap();
        assert!(g["residual"].is_null() && g["pass"] == false);
        assert_eq!(v["overall_pass"], false);
    }
}
