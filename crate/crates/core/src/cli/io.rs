//! JSON file format for matrix Laurent polynomials and certificates.
//!
//! Complex numbers are `[re, im]` pairs and powers are decimal string keys,
//! so negative powers fit in a JSON object. [`to_canonical_json`] sorts keys
//! and prints every float with 17 significant digits, which makes
//! write-read-write byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::matfact::{BlaschkeFactor, BlaschkeKind, FactorizationCertificate, SweepStep};
use crate::polycore::{CMatrix, Domain, MatrixLaurentPoly, C64};
use crate::scalarfact::EPS_HERM;
use crate::verify::VerificationReport;

pub const SCHEMA_VERSION: u32 = 1;

pub type Pair = [f64; 2];

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("invalid power key {0:?}")]
    PowerKey(String),
    #[error("power {power} lies below lo = {lo}")]
    BelowLo { power: i32, lo: i32 },
    #[error("coefficient of z^{power} is not {m}x{m}")]
    Shape { power: i32, m: usize },
    #[error("coefficient of z^{power} is not finite")]
    NonFinite { power: i32 },
    #[error("instance is not self-adjoint (deviation {0:.3e})")]
    NotSelfAdjoint(f64),
    #[error("domain mismatch: file is {file:?}, requested {requested:?}")]
    DomainMismatch { file: Domain, requested: Domain },
    #[error("{0}")]
    Certificate(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceFile {
    pub schema_version: u32,
    pub domain: Domain,
    pub m: usize,
    pub lo: i32,
    pub coeffs: BTreeMap<String, Vec<Vec<Pair>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateFile>,
}

impl InstanceFile {
    /// Serializes every power from `min(start, p.lo())` to `p.hi()`.
    pub fn from_poly(p: &MatrixLaurentPoly, d: Domain, start: Option<i32>) -> Self {
        let m = p.dim();
        let lo = match (p.is_zero(), start) {
            (true, s) => s.unwrap_or(0),
            (false, Some(s)) => s.min(p.lo()),
            (false, None) => p.lo(),
        };
        let hi = if p.is_zero() { lo } else { p.hi() };
        let coeffs = (lo..=hi).map(|n| (n.to_string(), matrix_to_pairs(&p.coeff(n)))).collect();
        InstanceFile {
            schema_version: SCHEMA_VERSION,
            domain: d,
            m,
            lo,
            coeffs,
            certificate: None,
        }
    }

    /// The matrix polynomial, with absent powers read as zero.
    pub fn to_poly(&self) -> Result<MatrixLaurentPoly, IoError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(IoError::Schema(self.schema_version));
        }
        let mut powers = BTreeMap::new();
        for (key, rows) in &self.coeffs {
            let n: i32 = key.parse().map_err(|_| IoError::PowerKey(key.clone()))?;
            if n.to_string() != *key {
                return Err(IoError::PowerKey(key.clone()));
            }
            if n < self.lo {
                return Err(IoError::BelowLo { power: n, lo: self.lo });
            }
            let c = pairs_to_matrix(rows, self.m).ok_or(IoError::Shape { power: n, m: self.m })?;
            if c.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(IoError::NonFinite { power: n });
            }
            powers.insert(n, c);
        }
        let Some(&hi) = powers.keys().next_back() else {
            return Ok(MatrixLaurentPoly::new(self.m, 0, Vec::new()).expect("no coefficients"));
        };
        let coeffs = (self.lo..=hi)
            .map(|n| powers.remove(&n).unwrap_or_else(|| CMatrix::zeros(self.m, self.m)))
            .collect();
        Ok(MatrixLaurentPoly::new(self.m, self.lo, coeffs).expect("shapes checked"))
    }

    /// Reads a spectrum and checks the self-adjoint coefficient symmetry.
    pub fn to_spectrum(&self) -> Result<MatrixLaurentPoly, IoError> {
        let s = self.to_poly()?;
        let deviation = s.self_adjoint_deviation(self.domain);
        if deviation > EPS_HERM {
            return Err(IoError::NotSelfAdjoint(deviation));
        }
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn load(path: &Path) -> Result<Self, IoError> {
        let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), IoError> {
        std::fs::write(path, self.to_json()).map_err(|source| IoError::Write {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Serialized form of a [`FactorizationCertificate`], plus the report of
/// the verification run that accepted or rejected the factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CertificateFile {
    pub recon_residual: Option<f64>,
    pub det_roots: Vec<Pair>,
    pub sweep_transcript: Vec<StepFile>,
    pub unitary_fix: Vec<Vec<Pair>>,
    pub degree_certified: bool,
    pub boundary_degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<ReportFile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StepFile {
    pub kind: BlaschkeKind,
    pub a: Pair,
    pub column: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<Vec<Vec<Pair>>>,
    pub product_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros_before: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros_after: Option<usize>,
}

/// [`VerificationReport`] with non-finite numbers mapped to `null`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReportFile {
    pub recon_residual: Option<f64>,
    pub max_root_violation: Option<f64>,
    pub paraunitary_residual: Option<f64>,
    pub unitary_quotient_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue: Option<f64>,
    /// Present together with `min_eigenvalue`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    pub pass: bool,
    pub failures: Vec<String>,
}

impl From<&VerificationReport> for ReportFile {
    fn from(r: &VerificationReport) -> Self {
        ReportFile {
            recon_residual: finite(r.recon_residual),
            max_root_violation: finite(r.max_root_violation),
            paraunitary_residual: finite(r.paraunitary_residual),
            unitary_quotient_residual: finite(r.unitary_quotient_residual),
            min_eigenvalue: r.min_eigenvalue.and_then(finite),
            scale: r.min_eigenvalue.and(finite(r.scale)),
            pass: r.pass,
            failures: r.failures.clone(),
        }
    }
}

impl CertificateFile {
    pub fn new(c: &FactorizationCertificate, report: Option<&VerificationReport>) -> Self {
        CertificateFile {
            recon_residual: finite(c.recon_residual),
            det_roots: c.det_roots.iter().map(|z| [z.re, z.im]).collect(),
            sweep_transcript: c.sweep_transcript.iter().map(StepFile::from).collect(),
            unitary_fix: matrix_to_pairs(&c.unitary_fix),
            degree_certified: c.degree_certified,
            boundary_degenerate: c.boundary_degenerate,
            verification: report.map(ReportFile::from),
        }
    }

    /// Rebuilds the certificate. The Cholesky factor is not serialized.
    pub fn to_certificate(&self, d: Domain, m: usize) -> Result<FactorizationCertificate, IoError> {
        let unitary_fix = pairs_to_matrix(&self.unitary_fix, m)
            .ok_or_else(|| IoError::Certificate(format!("unitaryFix is not {m}x{m}")))?;
        let mut steps = Vec::with_capacity(self.sweep_transcript.len());
        for (k, s) in self.sweep_transcript.iter().enumerate() {
            if s.column >= m {
                return Err(IoError::Certificate(format!("step {k}: column {} out of range", s.column)));
            }
            let unitary = match &s.unitary {
                Some(rows) => Some(
                    pairs_to_matrix(rows, m)
                        .ok_or_else(|| IoError::Certificate(format!("step {k}: unitary is not {m}x{m}")))?,
                ),
                None => None,
            };
            steps.push(SweepStep {
                factor: BlaschkeFactor::new(pair(s.a), d, s.kind, s.column),
                unitary,
                product_residual: s.product_residual.unwrap_or(f64::NAN),
                zeros_before: s.zeros_before,
                zeros_after: s.zeros_after,
            });
        }
        Ok(FactorizationCertificate {
            recon_residual: self.recon_residual.unwrap_or(f64::NAN),
            det_roots: self.det_roots.iter().copied().map(pair).collect(),
            sweep_transcript: steps,
            unitary_fix,
            degree_certified: self.degree_certified,
            boundary_degenerate: self.boundary_degenerate,
            cholesky: None,
        })
    }
}

impl From<&SweepStep> for StepFile {
    fn from(s: &SweepStep) -> Self {
        StepFile {
            kind: s.factor.kind,
            a: [s.factor.a.re, s.factor.a.im],
            column: s.factor.column,
            unitary: s.unitary.as_ref().map(matrix_to_pairs),
            product_residual: finite(s.product_residual),
            zeros_before: s.zeros_before,
            zeros_after: s.zeros_after,
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn pair(p: Pair) -> C64 {
    C64::new(p[0], p[1])
}

pub fn matrix_to_pairs(c: &CMatrix) -> Vec<Vec<Pair>> {
    (0..c.nrows())
        .map(|i| (0..c.ncols()).map(|j| [c[(i, j)].re, c[(i, j)].im]).collect())
        .collect()
}

pub fn pairs_to_matrix(rows: &[Vec<Pair>], m: usize) -> Option<CMatrix> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return None;
    }
    Some(CMatrix::from_fn(m, m, |i, j| pair(rows[i][j])))
}

/// Pretty JSON with sorted keys and floats printed as `{:.16e}`. Arrays of
/// numbers stay on one line.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("serializable");
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").unwrap(),
            (None, Some(i)) => write!(out, "{i}").unwrap(),
            _ => write_float(out, n.as_f64().expect("number")),
        },
        Value::Array(items) if items.iter().all(Value::is_number) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, indent);
            }
            out.push(']');
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                out.push_str(if k > 0 { ",\n" } else { "\n" });
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
            }
            out.push('\n');
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                out.push_str(if k > 0 { ",\n" } else { "\n" });
                pad(out, indent + 1);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[key], indent + 1);
            }
            out.push('\n');
            pad(out, indent);
            out.push('}');
        }
    }
}

fn write_float(out: &mut String, x: f64) {
    // -0.0 would print with a sign and read back as 0.0 in some parsers
    let x = if x == 0.0 { 0.0 } else { x };
    write!(out, "{x:.16e}").unwrap();
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}
