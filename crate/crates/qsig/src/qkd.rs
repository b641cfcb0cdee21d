//! BB84 key distribution for the initial phase.
//!
//! The signing protocol assumes each party pair already shares secret
//! bits. This module simulates how those bits are produced: the standard
//! prepare–measure–sift–estimate flow, with an optional intercept-resend
//! eavesdropper and an optional bit-flip channel.
//!
//! One session transmits `raw_len` photons. The sender encodes random bits
//! in random bases; the receiver measures in its own random bases.
//! Positions where the bases agree are *sifted* (about half), a random
//! sample of the sifted positions is sacrificed to estimate the error rate
//! (QBER), and the session aborts when that estimate exceeds the standard
//! 0.11 threshold. An intercept-resend attacker disturbs roughly a quarter
//! of the sifted sample, so attacked sessions abort essentially always.
//!
//! [`provision_keys`] turns accepted sessions into the four key strings a
//! signing session needs (`K_a`, `K_b`, `A`, `B`), each provisioned from
//! its own independent sessions. No error correction or privacy
//! amplification is simulated, so provisioning only accepts sessions whose
//! sampled QBER is exactly zero and whose keys agree bit for bit — which
//! noiseless, attacker-free sessions always satisfy.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::keys::{ka_len, kb_len, KeyMaterial};
use crate::qubit::{Basis, Qubit};
use crate::rng::RandomStream;

/// QBER above which a session aborts.
pub const QBER_ABORT_THRESHOLD: f64 = 0.11;

/// Failed sessions tolerated per provisioning target before giving up.
pub const PROVISIONING_RETRY_LIMIT: u32 = 16;

/// Channel attacker model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EveModel {
    /// No eavesdropper.
    #[default]
    None,
    /// Measure every photon in a uniformly random basis and forward the
    /// collapsed state.
    InterceptResend,
}

/// Parameters of one BB84 session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QkdSessionConfig {
    /// Number of photons transmitted.
    pub raw_len: usize,
    /// Eavesdropper model on the channel.
    pub eve: EveModel,
    /// Per-photon probability that the channel flips the encoded bit.
    pub noise_p: f64,
    /// Fraction of sifted bits sacrificed for error estimation.
    pub sample_fraction: f64,
}

impl QkdSessionConfig {
    /// Clean channel with the given length and a 25% estimation sample.
    pub fn clean(raw_len: usize) -> Self {
        Self {
            raw_len,
            eve: EveModel::None,
            noise_p: 0.0,
            sample_fraction: 0.25,
        }
    }

    /// Check the parameter ranges.
    ///
    /// # Errors
    /// [`Error::Config`] describing the violated constraint.
    pub fn validate(&self) -> Result<()> {
        if self.raw_len < 8 {
            return Err(Error::Config(format!(
                "raw_len must be at least 8, got {}",
                self.raw_len
            )));
        }
        if !(0.0..=1.0).contains(&self.noise_p) {
            return Err(Error::Config(format!(
                "noise_p must lie in [0, 1], got {}",
                self.noise_p
            )));
        }
        if !(self.sample_fraction > 0.0 && self.sample_fraction < 1.0) {
            return Err(Error::Config(format!(
                "sample_fraction must lie in (0, 1), got {}",
                self.sample_fraction
            )));
        }
        Ok(())
    }
}

/// Result of one BB84 session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QkdOutcome {
    /// Sender-side key after sifting and sample removal.
    pub key_sender: BitString,
    /// Receiver-side key after sifting and sample removal.
    pub key_receiver: BitString,
    /// Number of positions where the bases matched.
    pub sifted_len: usize,
    /// Estimated error rate on the sacrificed sample.
    pub qber: f64,
    /// Whether the session aborted (`qber` above the threshold).
    pub aborted: bool,
}

/// Execute one BB84 session.
///
/// Draw order, fixed for reproducibility: sender bits (`raw_len`), sender
/// bases (`raw_len`), receiver bases (`raw_len`), then per photon in index
/// order the channel events — noise decision (only when `noise_p > 0`),
/// eavesdropper basis and measurement (only under
/// [`EveModel::InterceptResend`]) — and the receiver measurement; finally
/// the sample selection.
///
/// # Errors
/// [`Error::Config`] for invalid parameters; [`Error::Underflow`] when no
/// key bits remain after sifting and sampling.
pub fn run_bb84(cfg: &QkdSessionConfig, rng: &mut RandomStream) -> Result<QkdOutcome> {
    cfg.validate()?;
    let sender_bits = BitString::random(cfg.raw_len, rng);
    let sender_bases = BitString::random(cfg.raw_len, rng);
    let receiver_bases = BitString::random(cfg.raw_len, rng);

    let mut receiver_bits = Vec::with_capacity(cfg.raw_len);
    for i in 0..cfg.raw_len {
        let send_basis = Basis::from_bit(sender_bases.bit(i));
        let mut photon = Qubit::prepare(sender_bits.bit(i), send_basis);

        // Channel noise: flip the encoded bit in its preparation basis
        // (X flips rectilinear encodings, Z flips diagonal ones).
        if cfg.noise_p > 0.0 && rng.next_unit() < cfg.noise_p {
            photon = match send_basis {
                Basis::Rectilinear => photon.x(),
                Basis::Diagonal => photon.z(),
            };
        }

        if cfg.eve == EveModel::InterceptResend {
            let eve_basis = Basis::from_bit(rng.next_bit());
            photon.measure(eve_basis, rng);
        }

        let recv_basis = Basis::from_bit(receiver_bases.bit(i));
        receiver_bits.push(photon.measure(recv_basis, rng));
    }

    // Sift: keep positions with matching bases.
    let sifted: Vec<(u8, u8)> = (0..cfg.raw_len)
        .filter(|&i| sender_bases.bit(i) == receiver_bases.bit(i))
        .map(|i| (sender_bits.bit(i), receiver_bits[i]))
        .collect();
    let sifted_len = sifted.len();
    if sifted_len == 0 {
        return Err(Error::Underflow {
            raw_len: cfg.raw_len,
        });
    }

    // Sacrifice a random sample for error estimation (partial
    // Fisher–Yates over the sifted indices).
    let sample_count = ((sifted_len as f64 * cfg.sample_fraction).round() as usize)
        .clamp(1, sifted_len);
    if sample_count == sifted_len {
        return Err(Error::Underflow {
            raw_len: cfg.raw_len,
        });
    }
    let mut order: Vec<usize> = (0..sifted_len).collect();
    for j in 0..sample_count {
        let pick = j + (rng.next_unit() * (sifted_len - j) as f64) as usize;
        let pick = pick.min(sifted_len - 1);
        order.swap(j, pick);
    }
    let mut sampled = vec![false; sifted_len];
    let mut errors = 0usize;
    for &idx in &order[..sample_count] {
        sampled[idx] = true;
        let (s, r) = sifted[idx];
        if s != r {
            errors += 1;
        }
    }
    let qber = errors as f64 / sample_count as f64;

    // Remaining sifted positions, in original order, become the keys.
    let mut key_sender = BitString::new();
    let mut key_receiver = BitString::new();
    for (idx, &(s, r)) in sifted.iter().enumerate() {
        if !sampled[idx] {
            key_sender.push(s);
            key_receiver.push(r);
        }
    }

    Ok(QkdOutcome {
        key_sender,
        key_receiver,
        sifted_len,
        qber,
        aborted: qber > QBER_ABORT_THRESHOLD,
    })
}

/// Provision the four key strings for a signing session over a clean
/// channel.
///
/// Each string (`K_a`: 5n bits, `K_b`: 13n+2, `A`: n, `B`: n) accumulates
/// from its own independent BB84 sessions; excess bits beyond the target
/// are kept (the schedule discards them).
///
/// # Errors
/// [`Error::Provisioning`] after [`PROVISIONING_RETRY_LIMIT`] failed
/// sessions for any one string.
pub fn provision_keys(n: usize, rng: &mut RandomStream) -> Result<KeyMaterial> {
    provision_keys_with(n, rng, &QkdSessionConfig::clean(512))
}

/// [`provision_keys`] with an explicit per-session configuration.
///
/// A session's keys are accepted only when it did not abort, its sampled
/// QBER is exactly zero, and the two key copies are identical — the
/// conditions a clean channel always meets. Useful with an adversarial
/// template to demonstrate that provisioning fails under attack.
pub fn provision_keys_with(
    n: usize,
    rng: &mut RandomStream,
    template: &QkdSessionConfig,
) -> Result<KeyMaterial> {
    template.validate()?;
    let ka = accumulate(ka_len(n), rng, template)?;
    let kb = accumulate(kb_len(n), rng, template)?;
    let a = accumulate(n, rng, template)?;
    let b = accumulate(n, rng, template)?;
    Ok(KeyMaterial { n, ka, kb, a, b })
}

fn accumulate(
    target: usize,
    rng: &mut RandomStream,
    template: &QkdSessionConfig,
) -> Result<BitString> {
    let mut bits = BitString::new();
    let mut failures = 0u32;
    while bits.len() < target {
        let outcome = run_bb84(template, rng)?;
        let accepted =
            !outcome.aborted && outcome.qber == 0.0 && outcome.key_sender == outcome.key_receiver;
        if accepted {
            bits = bits.concat(&outcome.key_sender);
        } else {
            failures += 1;
            if failures >= PROVISIONING_RETRY_LIMIT {
                return Err(Error::Provisioning { attempts: failures });
            }
        }
    }
    Ok(bits)
}
