use thiserror::Error;

/// A parameter failed validation. `field` names the offending quantity.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid {field}: {reason}")]
pub struct ParamError {
    pub field: String,
    pub reason: String,
}

impl ParamError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Prefix the field with a parent path, e.g. `vehicle` + `gamma` -> `vehicle.gamma`.
    pub fn within(mut self, parent: &str) -> Self {
        self.field = format!("{parent}.{}", self.field);
        self
    }
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("non-finite state for agent {agent} at tick {tick}")]
    NonFinite { tick: usize, agent: usize },
    #[error(transparent)]
    Param(#[from] ParamError),
}
