//! The three-party signing protocol and its transcripts.
//!
//! Three parties run a session: Alice signs a classical message, Bob
//! verifies it, and a trusted arbitrator — who shares key material with
//! both — mediates. Three envelopes cross the wire, strictly in order:
//!
//! ```text
//!   Alice ── S ──▶ Bob ── N ──▶ Arbitrator ── V ──▶ Bob
//! ```
//!
//! * **S** ([`alice_sign`]): for each message bit `p_i`, Alice prepares
//!   `M_i = |A_i ⊕ p_i⟩` in the rectilinear basis and `R_i = |p_i⟩` in the
//!   basis selected by `ka_basis_i`, then pads all 2n qubits with `ka_otp`.
//! * **N** ([`bob_wrap`]): Bob cannot read S (he lacks `K_a`); he wraps
//!   its qubits under `kb_otp_n`, appends his authentication string B
//!   under `kb_pad_b`, and forwards everything.
//! * **V** ([`arbitrator_verify`]): the arbitrator peels both layers,
//!   reads the message candidate `p̂ = A ⊕ m` from M, checks the R qubits
//!   against `p̂` in the known bases (γ), checks B against its own copy
//!   (ξ), and answers with `R_b'` (a fresh encoding of `p̂` under Bob's
//!   basis key), `U = B ⊕ p̂`, the verdict bits, and S itself — all under
//!   Bob's keys.
//! * Finally [`bob_finalize`]: Bob unwraps V; if γ = ξ = 0 he recovers
//!   `p = B ⊕ U`, measures `R_b'` in his own bases, and accepts exactly
//!   when every outcome matches.
//!
//! A [`Transcript`] records each envelope with cumulative counters: an
//! honest session moves `q_t = 7n` qubits and `b_t = 2n + 2` classical
//! bits. [`resolve_dispute`] settles later disavowal claims from S alone.
//!
//! Randomness touches the session only through measurement, so the draw
//! counts are contracts: [`arbitrator_verify`] consumes exactly 2n draws
//! (M then R, index order) and [`bob_finalize`] consumes n, or none at all
//! when γ or ξ already failed.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::keys::{
    qotp_decrypt, qotp_encrypt, qotp_encrypt_raw, xor_pad, Envelope, FieldKind, FieldLabel,
    FieldPayload, KeySchedule,
};
use crate::qkd::provision_keys;
use crate::qubit::{Basis, Qubit};
use crate::rng::RandomStream;

/// Transcript file schema version.
pub const TRANSCRIPT_SCHEMA: u32 = 1;

/// Substream of the run seed used for key provisioning.
const STREAM_PROVISION: u64 = 0;
/// Substream of the run seed used to draw the message.
const STREAM_MESSAGE: u64 = 1;
/// Substream of the run seed used for session measurements.
const STREAM_SESSION: u64 = 2;

/// The classical message to be signed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageBits(BitString);

impl MessageBits {
    /// Wrap message bits; the message must be non-empty.
    ///
    /// # Errors
    /// [`Error::Size`] for an empty message.
    pub fn new(bits: BitString) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Size {
                what: "message length",
                got: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        Ok(Self(bits))
    }

    /// Uniformly random message of length `n`.
    ///
    /// # Errors
    /// [`Error::Size`] if `n = 0`.
    pub fn random(n: usize, rng: &mut RandomStream) -> Result<Self> {
        Self::new(BitString::random(n, rng))
    }

    /// The message bits.
    pub fn bits(&self) -> &BitString {
        &self.0
    }

    /// Message length in bits.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn expect_layout(envelope: &Envelope, expected: &[(&str, usize, FieldKind)]) -> Result<()> {
    envelope.validate_partition()?;
    let mut qubit_at = 0;
    let mut cbit_at = 0;
    let want: Vec<FieldLabel> = expected
        .iter()
        .map(|&(name, len, kind)| {
            let at = match kind {
                FieldKind::Qubit => &mut qubit_at,
                FieldKind::Classical => &mut cbit_at,
            };
            let offset = *at;
            *at += len;
            FieldLabel {
                name: name.to_string(),
                offset,
                len,
                kind,
            }
        })
        .collect();
    if envelope.labels() != want.as_slice() {
        return Err(Error::Format(format!(
            "envelope labels {:?} do not match the expected layout {:?}",
            envelope.labels(),
            want
        )));
    }
    Ok(())
}

/// Alice's signature over the message: envelope `S` with fields
/// M (n qubits) and R (n qubits), padded under `ka_otp`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignaturePackage {
    envelope: Envelope,
    n: usize,
}

impl SignaturePackage {
    /// Validate an envelope as an S message and infer n.
    ///
    /// # Errors
    /// [`Error::Format`] unless the envelope is exactly
    /// `[M: n qubits, R: n qubits]` with no classical payload.
    pub fn from_envelope(envelope: Envelope) -> Result<Self> {
        let total = envelope.qubit_count();
        if total == 0 || total % 2 != 0 || envelope.cbit_count() != 0 {
            return Err(Error::Format(format!(
                "S must hold 2n qubits and no classical bits, got {} and {}",
                total,
                envelope.cbit_count()
            )));
        }
        let n = total / 2;
        expect_layout(
            &envelope,
            &[("M", n, FieldKind::Qubit), ("R", n, FieldKind::Qubit)],
        )?;
        Ok(Self { envelope, n })
    }

    /// The underlying envelope.
    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    /// Message length the package was built for.
    pub fn n(&self) -> usize {
        self.n
    }
}

/// Bob's forwarded request: envelope `N` with fields S (2n qubits,
/// re-padded under `kb_otp_n`) and B (n classical bits under `kb_pad_b`).
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRequest {
    envelope: Envelope,
    n: usize,
}

impl VerifyRequest {
    /// Validate an envelope as an N message and infer n.
    ///
    /// # Errors
    /// [`Error::Format`] unless the layout is `[S: 2n qubits, B: n bits]`.
    pub fn from_envelope(envelope: Envelope) -> Result<Self> {
        let n = envelope.cbit_count();
        if n == 0 || envelope.qubit_count() != 2 * n {
            return Err(Error::Format(format!(
                "N must hold 2n qubits and n classical bits, got {} and {}",
                envelope.qubit_count(),
                n
            )));
        }
        expect_layout(
            &envelope,
            &[
                ("S", 2 * n, FieldKind::Qubit),
                ("B", n, FieldKind::Classical),
            ],
        )?;
        Ok(Self { envelope, n })
    }

    /// The underlying envelope.
    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    /// Message length the request was built for.
    pub fn n(&self) -> usize {
        self.n
    }
}

/// The arbitrator's answer: envelope `V` with classical fields gamma, xi,
/// U (n bits) under `kb_pad_v` and qubit fields R_b' (n) and S (2n) under
/// `kb_otp_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyResponse {
    envelope: Envelope,
    n: usize,
}

impl VerifyResponse {
    /// Validate an envelope as a V message and infer n.
    ///
    /// # Errors
    /// [`Error::Format`] unless the layout is
    /// `[gamma: 1, xi: 1, U: n bits, R_b': n qubits, S: 2n qubits]`.
    pub fn from_envelope(envelope: Envelope) -> Result<Self> {
        let total = envelope.qubit_count();
        if total == 0 || total % 3 != 0 {
            return Err(Error::Format(format!(
                "V must hold 3n qubits, got {total}"
            )));
        }
        let n = total / 3;
        if envelope.cbit_count() != n + 2 {
            return Err(Error::Format(format!(
                "V must hold n+2 classical bits, got {}",
                envelope.cbit_count()
            )));
        }
        expect_layout(
            &envelope,
            &[
                ("gamma", 1, FieldKind::Classical),
                ("xi", 1, FieldKind::Classical),
                ("U", n, FieldKind::Classical),
                ("R_b'", n, FieldKind::Qubit),
                ("S", 2 * n, FieldKind::Qubit),
            ],
        )?;
        Ok(Self { envelope, n })
    }

    /// The underlying envelope.
    pub fn envelope(&self) -> &Envelope {
        &self.envelope
    }

    /// Message length the response was built for.
    pub fn n(&self) -> usize {
        self.n
    }
}

/// Outcome of a full verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationResult {
    /// Arbitrator's signature check: 0 when every R qubit matched.
    pub gamma: u8,
    /// Arbitrator's authentication check: 0 when B' = B.
    pub xi: u8,
    /// Bob's own comparison of R_b' against the recovered message. False
    /// whenever the comparison was skipped because γ or ξ already failed.
    pub bob_match: bool,
    /// Final verdict: γ = 0 ∧ ξ = 0 ∧ bob_match.
    pub accepted: bool,
    /// The recovered message; present only when accepted.
    pub recovered: Option<BitString>,
}

/// Dispute verdict from [`resolve_dispute`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// The package checks out against Alice's keys: she signed it.
    SignedByAlice,
    /// The package is inconsistent with Alice's keys.
    Forged,
}

/// One recorded protocol message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptMessage {
    pub from: String,
    pub to: String,
    pub label: String,
    /// Number of qubits in the payload.
    pub qubits: usize,
    /// Number of classical bits in the payload.
    pub cbits: usize,
    pub payload: Envelope,
}

/// Append-only record of a session's traffic with cumulative counters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Transcript {
    messages: Vec<TranscriptMessage>,
    q_t: usize,
    b_t: usize,
}

impl Transcript {
    /// Empty transcript.
    pub fn new() -> Self {
        Self::default()
    }

    /// Record one transmitted envelope.
    pub fn record(&mut self, from: &str, to: &str, label: &str, payload: Envelope) {
        self.q_t += payload.qubit_count();
        self.b_t += payload.cbit_count();
        self.messages.push(TranscriptMessage {
            from: from.to_string(),
            to: to.to_string(),
            label: label.to_string(),
            qubits: payload.qubit_count(),
            cbits: payload.cbit_count(),
            payload,
        });
    }

    /// Recorded messages in transmission order.
    pub fn messages(&self) -> &[TranscriptMessage] {
        &self.messages
    }

    /// Total qubits transmitted.
    pub fn q_t(&self) -> usize {
        self.q_t
    }

    /// Total classical bits transmitted.
    pub fn b_t(&self) -> usize {
        self.b_t
    }
}

/// Sign the message: S = QOTP(M ∥ R) under `ka_otp`.
///
/// `M_i` encodes `A_i ⊕ p_i` rectilinearly; `R_i` encodes `p_i` in the
/// basis selected by `ka_basis_i`.
///
/// # Errors
/// [`Error::Config`] if the message length does not match the schedule;
/// [`Error::KeyReuse`] when called twice on one schedule.
pub fn alice_sign(p: &MessageBits, sched: &mut KeySchedule) -> Result<SignaturePackage> {
    check_n("alice_sign", p.len(), sched)?;
    let n = sched.n();
    let mut register = Vec::with_capacity(2 * n);
    for i in 0..n {
        register.push(Qubit::prepare(
            sched.a_auth.bit(i) ^ p.bits().bit(i),
            Basis::Rectilinear,
        ));
    }
    for i in 0..n {
        register.push(Qubit::prepare(
            p.bits().bit(i),
            Basis::from_bit(sched.ka_basis.bit(i)),
        ));
    }
    let cipher = qotp_encrypt(&register, sched.ka_otp())?;
    let (m_part, r_part) = cipher.split_at(n);
    SignaturePackage::from_envelope(Envelope::new(vec![
        ("M", FieldPayload::Qubits(m_part.to_vec())),
        ("R", FieldPayload::Qubits(r_part.to_vec())),
    ]))
}

/// Wrap the signature for the arbitrator: N = QOTP(S) ∥ (B ⊕ pad).
///
/// Bob forwards S without measuring anything.
///
/// # Errors
/// [`Error::Config`] on a length mismatch; [`Error::KeyReuse`] on repeat.
pub fn bob_wrap(s: &SignaturePackage, sched: &mut KeySchedule) -> Result<VerifyRequest> {
    check_n("bob_wrap", s.n(), sched)?;
    let cipher = qotp_encrypt(s.envelope().qubits(), sched.kb_otp_n())?;
    let b = sched.b_auth.clone();
    let b_masked = xor_pad(&b, sched.kb_pad_b())?;
    VerifyRequest::from_envelope(Envelope::new(vec![
        ("S", FieldPayload::Qubits(cipher)),
        ("B", FieldPayload::Bits(b_masked)),
    ]))
}

/// The arbitrator's verification step.
///
/// Unwraps both encryption layers, measures M rectilinearly (reading
/// `m`), recovers the candidate message `p̂ = A ⊕ m`, measures each `R_i`
/// in the basis named by `ka_basis_i` and sets γ = 0 only if every
/// outcome equals `p̂_i`; ξ = 0 only if the unpadded B' equals B. The
/// response carries `R_b'` (fresh encodings of `p̂` under `kb_basis`),
/// `U = B ⊕ p̂`, both verdict bits, and S re-padded for the return trip.
///
/// Consumes exactly 2n measurement draws: M first, then R, in index
/// order, regardless of intermediate outcomes.
///
/// # Errors
/// [`Error::Format`] for a malformed envelope; [`Error::Config`] on
/// length mismatch; key errors propagate.
pub fn arbitrator_verify(
    nreq: &VerifyRequest,
    sched: &mut KeySchedule,
    rng: &mut RandomStream,
) -> Result<VerifyResponse> {
    check_n("arbitrator_verify", nreq.n(), sched)?;
    let n = sched.n();

    // Peel Bob's layer.
    let s_cipher = qotp_decrypt(nreq.envelope().qubit_field("S")?, sched.kb_otp_n())?;
    let b_prime = xor_pad(&nreq.envelope().classical_field("B")?, sched.kb_pad_b())?;

    // Peel Alice's layer.
    let mut plain = qotp_decrypt(&s_cipher, sched.ka_otp())?;
    let (m_states, r_states) = plain.split_at_mut(n);

    // Read the message candidate from M.
    let mut p_hat = BitString::new();
    for (i, q) in m_states.iter_mut().enumerate() {
        let m_i = q.measure(Basis::Rectilinear, rng);
        p_hat.push(sched.a_auth.bit(i) ^ m_i);
    }

    // γ: every R qubit must reproduce p̂ in its keyed basis.
    let mut gamma = 0u8;
    for (i, q) in r_states.iter_mut().enumerate() {
        let outcome = q.measure(Basis::from_bit(sched.ka_basis.bit(i)), rng);
        if outcome != p_hat.bit(i) {
            gamma = 1;
        }
    }

    // ξ: Bob's authentication string must match.
    let xi = u8::from(b_prime != sched.b_auth);

    // Response payload for Bob.
    let r_b: Vec<Qubit> = (0..n)
        .map(|i| Qubit::prepare(p_hat.bit(i), Basis::from_bit(sched.kb_basis.bit(i))))
        .collect();
    let u = sched.b_auth.xor(&p_hat)?;

    // Return S inside V. This deliberately applies the ka_otp pad a
    // second time — the flow sends S back to Bob still under Alice's
    // key, and a repeated Pauli pad restores the original ciphertext up
    // to global phase — so it bypasses the one-time segment on purpose.
    let ka_pad = sched.ka_otp().peek().clone();
    let s_again = qotp_encrypt_raw(&plain, &ka_pad)?;

    let mut v_qubits = r_b;
    v_qubits.extend(s_again);
    let v_qubits = qotp_encrypt(&v_qubits, sched.kb_otp_v())?;

    let mut verdict_bits = BitString::new();
    verdict_bits.push(gamma);
    verdict_bits.push(xi);
    let v_clear = verdict_bits.concat(&u);
    let v_cbits = xor_pad(&v_clear, sched.kb_pad_v())?;

    VerifyResponse::from_envelope(Envelope::new(vec![
        ("gamma", FieldPayload::Bits(v_cbits.slice(0, 1))),
        ("xi", FieldPayload::Bits(v_cbits.slice(1, 2))),
        ("U", FieldPayload::Bits(v_cbits.slice(2, n + 2))),
        ("R_b'", FieldPayload::Qubits(v_qubits[..n].to_vec())),
        ("S", FieldPayload::Qubits(v_qubits[n..].to_vec())),
    ]))
}

/// Bob's final check.
///
/// Unwraps V; when γ = ξ = 0, recovers `p = B ⊕ U` and measures each
/// `R_b'_i` in the basis named by `kb_basis_i`, accepting when every
/// outcome matches `p_i` (n draws). When γ or ξ is already set, Bob
/// measures nothing and rejects immediately.
///
/// # Errors
/// [`Error::Format`] for a malformed envelope; [`Error::Config`] on
/// length mismatch; key errors propagate.
pub fn bob_finalize(
    v: &VerifyResponse,
    sched: &mut KeySchedule,
    rng: &mut RandomStream,
) -> Result<VerificationResult> {
    check_n("bob_finalize", v.n(), sched)?;
    let n = sched.n();

    let qubits = qotp_decrypt(v.envelope().qubits(), sched.kb_otp_v())?;
    let clear = xor_pad(v.envelope().cbits(), sched.kb_pad_v())?;
    let gamma = clear.bit(0);
    let xi = clear.bit(1);

    if gamma != 0 || xi != 0 {
        return Ok(VerificationResult {
            gamma,
            xi,
            bob_match: false,
            accepted: false,
            recovered: None,
        });
    }

    let u = clear.slice(2, n + 2);
    let p = sched.b_auth.xor(&u)?;
    let mut bob_match = true;
    let mut r_b = qubits[..n].to_vec();
    for (i, q) in r_b.iter_mut().enumerate() {
        let outcome = q.measure(Basis::from_bit(sched.kb_basis.bit(i)), rng);
        if outcome != p.bit(i) {
            bob_match = false;
        }
    }

    Ok(VerificationResult {
        gamma,
        xi,
        bob_match,
        accepted: bob_match,
        recovered: bob_match.then_some(p),
    })
}

/// Run one complete honest session.
///
/// Each party works on its own copy of the shared schedule, mirroring
/// independently held key material. Returns the verification result and
/// the transcript of all three envelopes (honest runs satisfy
/// `q_t = 7n`, `b_t = 2n + 2`).
///
/// # Errors
/// Propagated from the protocol steps.
pub fn run_session(
    p: &MessageBits,
    sched: &KeySchedule,
    rng: &mut RandomStream,
) -> Result<(VerificationResult, Transcript)> {
    let mut alice = sched.clone();
    let mut bob = sched.clone();
    let mut arbitrator = sched.clone();

    let mut transcript = Transcript::new();
    let s = alice_sign(p, &mut alice)?;
    transcript.record("alice", "bob", "S", s.envelope().clone());
    let nreq = bob_wrap(&s, &mut bob)?;
    transcript.record("bob", "arbitrator", "N", nreq.envelope().clone());
    let v = arbitrator_verify(&nreq, &mut arbitrator, rng)?;
    transcript.record("arbitrator", "bob", "V", v.envelope().clone());
    let result = bob_finalize(&v, &mut bob, rng)?;
    Ok((result, transcript))
}

/// Settle a disavowal dispute from the signature package alone.
///
/// The arbitrator decrypts S with `ka_otp`, reads `p = A ⊕ m` from M, and
/// checks every R qubit against `p` in the keyed basis. A package built
/// with Alice's keys always passes; one built with independent keys fails
/// with overwhelming probability for realistic n (short parameters can
/// collide — an all-zero package verifies against all-zero keys).
///
/// # Errors
/// [`Error::Format`] / [`Error::Config`] as in verification.
pub fn resolve_dispute(
    s: &SignaturePackage,
    sched: &mut KeySchedule,
    rng: &mut RandomStream,
) -> Result<Verdict> {
    check_n("resolve_dispute", s.n(), sched)?;
    let n = sched.n();
    let mut plain = qotp_decrypt(s.envelope().qubits(), sched.ka_otp())?;
    let (m_states, r_states) = plain.split_at_mut(n);
    let mut p = BitString::new();
    for (i, q) in m_states.iter_mut().enumerate() {
        let m_i = q.measure(Basis::Rectilinear, rng);
        p.push(sched.a_auth.bit(i) ^ m_i);
    }
    let mut all_match = true;
    for (i, q) in r_states.iter_mut().enumerate() {
        let outcome = q.measure(Basis::from_bit(sched.ka_basis.bit(i)), rng);
        if outcome != p.bit(i) {
            all_match = false;
        }
    }
    Ok(if all_match {
        Verdict::SignedByAlice
    } else {
        Verdict::Forged
    })
}

fn check_n(op: &str, got: usize, sched: &KeySchedule) -> Result<()> {
    if got != sched.n() {
        return Err(Error::Config(format!(
            "{op}: message length {got} does not match schedule length {}",
            sched.n()
        )));
    }
    Ok(())
}

/// Final verdict block of a transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub gamma: u8,
    pub xi: u8,
    pub accepted: bool,
    pub recovered: Option<BitString>,
}

impl ResultRecord {
    /// Project the serializable part of a verification result.
    pub fn of(result: &VerificationResult) -> Self {
        Self {
            gamma: result.gamma,
            xi: result.xi,
            accepted: result.accepted,
            recovered: result.recovered.clone(),
        }
    }
}

/// On-disk transcript: the full session record, replayable from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptFile {
    pub schema: u32,
    pub n: usize,
    pub seed: u64,
    pub messages: Vec<TranscriptMessage>,
    pub q_t: usize,
    pub b_t: usize,
    pub result: ResultRecord,
}

impl TranscriptFile {
    /// Assemble a file from a finished session.
    pub fn assemble(n: usize, seed: u64, transcript: Transcript, result: &VerificationResult) -> Self {
        Self {
            schema: TRANSCRIPT_SCHEMA,
            n,
            seed,
            q_t: transcript.q_t(),
            b_t: transcript.b_t(),
            messages: transcript.messages,
            result: ResultRecord::of(result),
        }
    }

    /// Canonical JSON form (compact, deterministic field order).
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Format(e.to_string()))
    }

    /// Parse and schema-check a transcript file.
    ///
    /// # Errors
    /// [`Error::Format`] on malformed JSON or an unsupported schema.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: TranscriptFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        if file.schema != TRANSCRIPT_SCHEMA {
            return Err(Error::Format(format!(
                "unsupported transcript schema {}, expected {}",
                file.schema, TRANSCRIPT_SCHEMA
            )));
        }
        Ok(file)
    }
}

/// Run the complete seeded pipeline: provision keys over BB84, draw a
/// random message, run the session, and assemble the transcript file.
///
/// The seed fans out into fixed substreams (provisioning, message,
/// session), so a transcript is a pure function of `(n, seed)` — which is
/// exactly what replay re-executes.
///
/// # Errors
/// Propagated from provisioning and the session.
pub fn seeded_session(n: usize, seed: u64) -> Result<TranscriptFile> {
    let material = provision_keys(n, &mut RandomStream::with_stream(seed, STREAM_PROVISION))?;
    let sched = material.schedule()?;
    let p = MessageBits::random(n, &mut RandomStream::with_stream(seed, STREAM_MESSAGE))?;
    let (result, transcript) =
        run_session(&p, &sched, &mut RandomStream::with_stream(seed, STREAM_SESSION))?;
    Ok(TranscriptFile::assemble(n, seed, transcript, &result))
}
