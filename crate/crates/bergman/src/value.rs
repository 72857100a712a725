//! Numerical results that carry their own convergence evidence.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Finite,
    Divergent,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Quadrature,
    Truncation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub grid: usize,
    pub degree: usize,
    pub last_increment: f64,
    /// Local boundary exponent backing a divergence verdict.
    pub exponent: Option<f64>,
    pub note: String,
}

impl Default for Diagnostics {
    fn default() -> Self {
        Diagnostics { grid: 0, degree: 0, last_increment: 0.0, exponent: None, note: String::new() }
    }
}

/// A computed norm or constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    /// Finite value; `f64::INFINITY` when divergent.
    pub value: f64,
    pub verdict: Verdict,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl NormValue {
    pub fn finite(value: f64, method: Method, diagnostics: Diagnostics) -> Self {
        NormValue { value, verdict: Verdict::Finite, method, diagnostics }
    }

    pub fn exact(value: f64) -> Self {
        NormValue::finite(value, Method::ClosedForm, Diagnostics::default())
    }

    pub fn divergent(exponent: f64, note: &str) -> Self {
        NormValue {
            value: f64::INFINITY,
            verdict: Verdict::Divergent,
            method: Method::Quadrature,
            diagnostics: Diagnostics { exponent: Some(exponent), note: note.to_string(), ..Diagnostics::default() },
        }
    }

    pub fn is_finite(&self) -> bool {
        self.verdict == Verdict::Finite
    }
}
