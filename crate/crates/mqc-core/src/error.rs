use thiserror::Error;

/// Errors raised when an input falls outside the regime a formula is valid in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("Bloch vector has norm {0} > 1")]
    NotAState(f64),
    #[error("distribution sums to {0}, expected 1")]
    NotNormalized(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    range: &'static str,
    ok: bool,
) -> Result<f64> {
    if ok && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}

pub(crate) fn prob(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, "[0, 1]", (0.0..=1.0).contains(&value))
}

pub(crate) fn open_prob(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, "(0, 1)", value > 0.0 && value < 1.0)
}

pub(crate) fn dark(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, "[0, 1)", (0.0..1.0).contains(&value))
}
