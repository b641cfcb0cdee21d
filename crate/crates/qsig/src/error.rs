//! Error types shared across the crate.

use thiserror::Error;

/// Everything that can go wrong in the simulator or analysis layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Key material is shorter than the consumer requires.
    #[error("key material `{name}` too short: need {needed} bits, have {available}")]
    KeyLength {
        name: &'static str,
        needed: usize,
        available: usize,
    },

    /// A one-time segment was consumed a second time.
    #[error("key segment `{name}` already consumed")]
    KeyReuse { name: &'static str },

    /// A size parameter fell outside its supported range.
    #[error("{what} out of range: got {got}, allowed {min}..={max}")]
    Size {
        what: &'static str,
        got: usize,
        min: usize,
        max: usize,
    },

    /// An envelope did not match the expected label layout.
    #[error("envelope format: {0}")]
    Format(String),

    /// A QKD session was too small to yield any key bits.
    #[error("qkd underflow: {raw_len} raw qubits left no key bits after sifting and sampling")]
    Underflow { raw_len: usize },

    /// Key provisioning gave up after too many failed sessions.
    #[error("key provisioning failed after {attempts} failed sessions")]
    Provisioning { attempts: u32 },

    /// A configuration value violated its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A filesystem read or write failed.
    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
