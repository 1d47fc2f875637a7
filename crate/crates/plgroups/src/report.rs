//! Verification report types and their deterministic JSON serialization
//! (floats carry 17 significant digits so reports are byte-stable
//! regression artifacts).

use serde::Serialize;
use std::io;

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Max residual observed (relative where the tolerance is relative).
    pub residual: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub pass: bool,
}

impl CheckResult {
    /// A check that passes when the residual is at most the tolerance.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64, samples: usize) -> Self {
        let pass = residual.is_finite() && residual <= tolerance;
        CheckResult {
            name: name.into(),
            residual: if residual.is_finite() { residual } else { f64::MAX },
            tolerance,
            samples,
            pass,
        }
    }

    /// A check that passes when the residual is at least the threshold
    /// (used by the non-coboundary falsification search).
    pub fn at_least(name: impl Into<String>, residual: f64, threshold: f64, samples: usize) -> Self {
        let pass = residual.is_finite() && residual >= threshold;
        CheckResult {
            name: name.into(),
            residual: if residual.is_finite() { residual } else { f64::MAX },
            tolerance: threshold,
            samples,
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub group: String,
    pub family: usize,
    pub coboundary: bool,
    pub seed: u64,
    pub notes: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn finalize(mut self) -> Self {
        self.pass = self.checks.iter().all(|c| c.pass);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub tool_version: String,
    pub seed: u64,
    pub group: Option<String>,
    pub entries: Vec<VerificationReport>,
    pub pass: bool,
}

/// serde_json formatter that prints every float with 17 significant digits.
struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if !value.is_finite() {
            // residual fields are clamped before serialization; belt and braces
            return write!(writer, "1e999");
        }
        write!(writer, "{:.16e}", value)
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Deterministic JSON with 17-significant-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value.serialize(&mut ser).expect("serialization cannot fail");
    String::from_utf8(out).expect("JSON is UTF-8")
}
