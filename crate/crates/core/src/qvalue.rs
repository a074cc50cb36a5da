use serde::Serialize;

/// Split of a Q-function into its closed-form and numerically summed parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parts {
    pub asymptotic: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    pub l_max_used: Option<usize>,
    pub evals: usize,
}

/// A dimensionless energy coefficient with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QValue {
    pub value: f64,
    pub abs_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parts: Option<Parts>,
    pub diagnostics: Diagnostics,
}

impl QValue {
    pub fn exact(value: f64) -> Self {
        QValue {
            value,
            abs_error: 0.0,
            parts: None,
            diagnostics: Diagnostics::default(),
        }
    }

    pub(crate) fn with_parts(asymptotic: f64, numeric: QValue) -> Self {
        QValue {
            value: asymptotic + numeric.value,
            abs_error: numeric.abs_error,
            parts: Some(Parts {
                asymptotic,
                numeric: numeric.value,
            }),
            diagnostics: numeric.diagnostics,
        }
    }

    /// Sum of two independent contributions; errors add.
    pub fn add(self, other: QValue) -> QValue {
        QValue {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
            parts: match (self.parts, other.parts) {
                (Some(a), Some(b)) => Some(Parts {
                    asymptotic: a.asymptotic + b.asymptotic,
                    numeric: a.numeric + b.numeric,
                }),
                _ => None,
            },
            diagnostics: Diagnostics {
                l_max_used: self.diagnostics.l_max_used.or(other.diagnostics.l_max_used),
                evals: self.diagnostics.evals + other.diagnostics.evals,
            },
        }
    }
}
