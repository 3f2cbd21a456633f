use serde::Serialize;

/// Three-valued outcome of a finite-precision check.
///
/// `Certified` and `Refuted` carry payloads whose inequalities were decided
/// by exact rational comparisons; `Inconclusive` means neither could be
/// established at the requested precision and grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict<W, V> {
    Certified { witness: W },
    Refuted { violation: V },
    Inconclusive { reason: String },
}

impl<W, V> Verdict<W, V> {
    pub fn inconclusive(reason: impl Into<String>) -> Self {
        Verdict::Inconclusive {
            reason: reason.into(),
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Certified { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn violation(&self) -> Option<&V> {
        match self {
            Verdict::Refuted { violation } => Some(violation),
            _ => None,
        }
    }

    /// Short status label, as used in reports.
    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Certified { .. } => "certified",
            Verdict::Refuted { .. } => "refuted",
            Verdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_with_status_tag() {
        let v: Verdict<u8, u8> = Verdict::Certified { witness: 3 };
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"status":"certified","witness":3}"#
        );
        let v: Verdict<u8, u8> = Verdict::inconclusive("grid too coarse");
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"status":"inconclusive","reason":"grid too coarse"}"#
        );
    }
}
