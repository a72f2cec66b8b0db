use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("totality error: {0}")]
    Totality(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    Capacity {
        what: String,
        needed: u128,
        cap: u128,
    },
    #[error("construction error: {0}")]
    Construction(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("choice undefined: {0}")]
    ChoiceUndefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn invariant<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invariant(msg.into()))
}

pub(crate) fn check_capacity(what: &str, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::Capacity {
            what: what.to_string(),
            needed,
            cap,
        })
    } else {
        Ok(())
    }
}
