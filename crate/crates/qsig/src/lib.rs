//! Simulator and analysis toolkit for an arbitrated quantum signature
//! protocol built on single photons.
//!
//! The library is layered bottom-up:
//!
//! * [`qubit`] — single-photon states, Pauli/Hadamard actions, seeded
//!   projective measurement, and density-matrix diagnostics.
//! * [`bits`] — compact classical bit strings.
//! * [`rng`] — the deterministic, stream-splittable random source every
//!   simulation draws from.
//! * [`keys`] — the shared key schedule, consume-once pad segments, the
//!   qubit one-time pad, and the wire envelope format.
//! * [`qkd`] — BB84 key establishment with eavesdropping and noise
//!   models, plus retry-based key provisioning.
//! * [`protocol`] — the three-party signing session (sign, wrap, verify,
//!   finalize), dispute resolution, and replayable transcripts.
//! * [`analysis`] — forgery attack simulations, exact detection oracles,
//!   pad-mixing diagnostics, and efficiency accounting.

pub mod analysis;
pub mod bits;
pub mod cli;
pub mod error;
pub mod keys;
pub mod protocol;
pub mod qkd;
pub mod qubit;
pub mod rng;

pub use analysis::{
    efficiency, efficiency_with_seed, exact_pass_probability,
    exact_pass_probability_correct_guess, forge_package, forge_trial, mixing_report, paper_bound,
    run_attack, uniform_schedule, wilson_interval, AttackConfig, AttackModel, AttackReport,
    EfficiencyReport, MixingEntry,
};
pub use bits::BitString;
pub use error::{Error, Result};
pub use keys::{
    derive_schedule, ka_len, kb_len, qotp_decrypt, qotp_decrypt_raw, qotp_encrypt,
    qotp_encrypt_raw, verify_mixing, xor_pad, xor_pad_raw, Envelope, FieldKind, FieldLabel,
    FieldPayload, KeyMaterial, KeySchedule, PauliKeyPair, Segment,
};
pub use protocol::{
    alice_sign, arbitrator_verify, bob_finalize, bob_wrap, resolve_dispute, run_session,
    seeded_session, MessageBits, ResultRecord, SignaturePackage, Transcript, TranscriptFile,
    TranscriptMessage, VerificationResult, Verdict, VerifyRequest, VerifyResponse,
    TRANSCRIPT_SCHEMA,
};
pub use qkd::{
    provision_keys, provision_keys_with, run_bb84, EveModel, QkdOutcome, QkdSessionConfig,
    PROVISIONING_RETRY_LIMIT, QBER_ABORT_THRESHOLD,
};
pub use qubit::{density_of, Basis, DensityMatrix, Qubit};
pub use rng::RandomStream;
