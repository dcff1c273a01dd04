use std::fmt;

/// Outcome of a decision procedure. A passing verdict says how it was
/// decided; a failing one carries a witness in the literal grammar.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds(String),
    Fails(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn detail(&self) -> &str {
        match self {
            Verdict::Holds(s) | Verdict::Fails(s) => s,
        }
    }

    /// The first failure in `checks`, or a pass with `summary`.
    pub fn all<I>(checks: I, summary: impl Into<String>) -> Verdict
    where
        I: IntoIterator<Item = Verdict>,
    {
        checks
            .into_iter()
            .find(|v| !v.holds())
            .unwrap_or_else(|| Verdict::Holds(summary.into()))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds(s) if s.is_empty() => write!(f, "holds"),
            Verdict::Holds(s) => write!(f, "holds ({s})"),
            Verdict::Fails(s) => write!(f, "fails: {s}"),
        }
    }
}
