//! Key schedule and the two one-time encryption layers.
//!
//! Each signing session consumes four pieces of shared secret material:
//! the signer–arbitrator key `K_a`, the verifier–arbitrator key `K_b`, and
//! the two authentication strings `A` (signer) and `B` (verifier).
//! [`derive_schedule`] partitions the raw material into named segments
//! with a fixed, documented layout so that independently produced
//! transcripts interoperate:
//!
//! | segment    | length | purpose                                   |
//! |------------|--------|-------------------------------------------|
//! | `ka_basis` | n      | basis selectors for the R qubits          |
//! | `ka_otp`   | 4n     | Pauli pad for the 2n qubits of S          |
//! | `kb_basis` | n      | basis selectors for the R_b' qubits       |
//! | `kb_otp_n` | 4n     | Pauli pad for the 2n qubits of N          |
//! | `kb_pad_b` | n      | XOR pad for the B field of N              |
//! | `kb_otp_v` | 6n     | Pauli pad for the 3n qubits of V          |
//! | `kb_pad_v` | n+2    | XOR pad for the γ, ξ, U fields of V       |
//!
//! `K_a` therefore spans 5n bits and `K_b` spans 13n+2 bits. Pad segments
//! are one-time: consuming a [`Segment`] twice is a [`Error::KeyReuse`].
//! Basis selectors and the authentication strings are plain readable
//! fields — the protocol legitimately reads them at several steps.
//!
//! Qubits are protected by a quantum one-time pad: qubit `i` is
//! transformed by `X^x Z^z` with `(x, z)` taken from pad bits `(2i, 2i+1)`,
//! each of the four Pauli keys equally likely under uniform key material.
//! Averaging the ciphertext over all keys yields the maximally mixed state
//! — no information leaks without the key — and [`verify_mixing`] checks
//! exactly that by explicit enumeration. Classical fields use the plain
//! XOR one-time pad.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::qubit::{density_of, DensityMatrix, Qubit};

/// Total `K_a` bits required for message length `n`.
pub fn ka_len(n: usize) -> usize {
    5 * n
}

/// Total `K_b` bits required for message length `n`.
pub fn kb_len(n: usize) -> usize {
    13 * n + 2
}

/// A named, one-time span of key bits.
///
/// The first [`Segment::consume`] yields the bits; any later attempt is a
/// [`Error::KeyReuse`]. Deliberate re-reads (the arbitrator's second
/// application of `ka_otp` when it returns S inside V) must go through
/// [`Segment::peek`], which exists precisely so that such reuse is loud in
/// the code.
#[derive(Debug, Clone)]
pub struct Segment {
    name: &'static str,
    bits: BitString,
    consumed: bool,
}

impl Segment {
    fn new(name: &'static str, bits: BitString) -> Self {
        Self {
            name,
            bits,
            consumed: false,
        }
    }

    /// Segment name as used in error messages.
    pub fn name(&self) -> &'static str {
        self.name
    }

    /// Number of key bits in the segment.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Whether the segment holds zero bits.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Whether the segment has been consumed.
    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    /// Non-consuming view of the key bits.
    pub fn peek(&self) -> &BitString {
        &self.bits
    }

    /// Take the key bits, enforcing the one-time discipline.
    ///
    /// # Errors
    /// [`Error::KeyReuse`] if the segment was consumed before.
    pub fn consume(&mut self) -> Result<BitString> {
        if self.consumed {
            return Err(Error::KeyReuse { name: self.name });
        }
        self.consumed = true;
        Ok(self.bits.clone())
    }
}

/// The two Pauli key bits protecting one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PauliKeyPair {
    /// Exponent of X.
    pub x_bit: u8,
    /// Exponent of Z.
    pub z_bit: u8,
}

impl PauliKeyPair {
    /// Key pair for qubit `i` of a pad: bits `(2i, 2i+1)`.
    pub fn from_pad(pad: &BitString, i: usize) -> Self {
        Self {
            x_bit: pad.bit(2 * i),
            z_bit: pad.bit(2 * i + 1),
        }
    }

    /// Encrypt: apply Z^z then X^x.
    pub fn encrypt(&self, q: &Qubit) -> Qubit {
        let mut out = *q;
        if self.z_bit == 1 {
            out = out.z();
        }
        if self.x_bit == 1 {
            out = out.x();
        }
        out
    }

    /// Decrypt: apply X^x then Z^z (inverse of [`PauliKeyPair::encrypt`]
    /// up to global phase).
    pub fn decrypt(&self, q: &Qubit) -> Qubit {
        let mut out = *q;
        if self.x_bit == 1 {
            out = out.x();
        }
        if self.z_bit == 1 {
            out = out.z();
        }
        out
    }
}

/// Session key material partitioned into named segments.
///
/// Clone the schedule once per party before use: each holder owns an
/// independent copy of the shared secret, and the one-time flags track
/// that holder's consumption only.
#[derive(Debug, Clone)]
pub struct KeySchedule {
    n: usize,
    /// Basis selectors for Alice's R qubits (readable, not one-time).
    pub ka_basis: BitString,
    ka_otp: Segment,
    /// Basis selectors for the arbitrator's R_b' qubits.
    pub kb_basis: BitString,
    kb_otp_n: Segment,
    kb_pad_b: Segment,
    kb_otp_v: Segment,
    kb_pad_v: Segment,
    /// Alice's authentication string A.
    pub a_auth: BitString,
    /// Bob's authentication string B.
    pub b_auth: BitString,
}

impl KeySchedule {
    /// Message length the schedule was derived for.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Pauli pad for the 2n qubits of S.
    pub fn ka_otp(&mut self) -> &mut Segment {
        &mut self.ka_otp
    }

    /// Pauli pad for the 2n qubits of N.
    pub fn kb_otp_n(&mut self) -> &mut Segment {
        &mut self.kb_otp_n
    }

    /// XOR pad for the B field of N.
    pub fn kb_pad_b(&mut self) -> &mut Segment {
        &mut self.kb_pad_b
    }

    /// Pauli pad for the 3n qubits of V.
    pub fn kb_otp_v(&mut self) -> &mut Segment {
        &mut self.kb_otp_v
    }

    /// XOR pad for the γ, ξ, U fields of V.
    pub fn kb_pad_v(&mut self) -> &mut Segment {
        &mut self.kb_pad_v
    }
}

/// Partition raw key material into a [`KeySchedule`].
///
/// Segments are consecutive disjoint slices in the documented order
/// (`ka_basis`, `ka_otp` | `kb_basis`, `kb_otp_n`, `kb_pad_b`, `kb_otp_v`,
/// `kb_pad_v`); excess bits are discarded.
///
/// # Errors
/// [`Error::Size`] if `n = 0`; [`Error::KeyLength`] naming the first input
/// that is too short (`raw_ka` < 5n, `raw_kb` < 13n+2, `raw_a` < n,
/// `raw_b` < n).
pub fn derive_schedule(
    n: usize,
    raw_ka: &BitString,
    raw_kb: &BitString,
    raw_a: &BitString,
    raw_b: &BitString,
) -> Result<KeySchedule> {
    if n == 0 {
        return Err(Error::Size {
            what: "message length",
            got: 0,
            min: 1,
            max: usize::MAX,
        });
    }
    check_material("raw_ka", raw_ka, ka_len(n))?;
    check_material("raw_kb", raw_kb, kb_len(n))?;
    check_material("raw_a", raw_a, n)?;
    check_material("raw_b", raw_b, n)?;

    let ka_basis = raw_ka.slice(0, n);
    let ka_otp = raw_ka.slice(n, 5 * n);

    let mut at = 0;
    let mut next = |len: usize| {
        let s = raw_kb.slice(at, at + len);
        at += len;
        s
    };
    let kb_basis = next(n);
    let kb_otp_n = next(4 * n);
    let kb_pad_b = next(n);
    let kb_otp_v = next(6 * n);
    let kb_pad_v = next(n + 2);

    Ok(KeySchedule {
        n,
        ka_basis,
        ka_otp: Segment::new("ka_otp", ka_otp),
        kb_basis,
        kb_otp_n: Segment::new("kb_otp_n", kb_otp_n),
        kb_pad_b: Segment::new("kb_pad_b", kb_pad_b),
        kb_otp_v: Segment::new("kb_otp_v", kb_otp_v),
        kb_pad_v: Segment::new("kb_pad_v", kb_pad_v),
        a_auth: raw_a.slice(0, n),
        b_auth: raw_b.slice(0, n),
    })
}

fn check_material(name: &'static str, bits: &BitString, needed: usize) -> Result<()> {
    if bits.len() < needed {
        return Err(Error::KeyLength {
            name,
            needed,
            available: bits.len(),
        });
    }
    Ok(())
}

/// Quantum one-time pad encryption of a qubit register.
///
/// Qubit `i` is transformed by Z^z then X^x with `(x, z)` read from
/// segment bits `(2i, 2i+1)`. Consumes the segment.
///
/// # Errors
/// [`Error::KeyLength`] if the segment is not exactly twice the register
/// size; [`Error::KeyReuse`] if the segment was already consumed.
pub fn qotp_encrypt(qubits: &[Qubit], segment: &mut Segment) -> Result<Vec<Qubit>> {
    check_pad(segment.name(), segment.len(), qubits.len())?;
    let pad = segment.consume()?;
    qotp_encrypt_raw(qubits, &pad)
}

/// Quantum one-time pad decryption of a qubit register.
///
/// Inverse of [`qotp_encrypt`] up to a physically unobservable global
/// phase; applies X^x then Z^z per qubit. Consumes the segment — the
/// decrypting party holds a fresh copy of the same key material.
///
/// # Errors
/// As [`qotp_encrypt`].
pub fn qotp_decrypt(qubits: &[Qubit], segment: &mut Segment) -> Result<Vec<Qubit>> {
    check_pad(segment.name(), segment.len(), qubits.len())?;
    let pad = segment.consume()?;
    qotp_decrypt_raw(qubits, &pad)
}

/// [`qotp_encrypt`] against raw pad bits, without one-time tracking.
///
/// Used where the protocol deliberately reapplies a pad (the arbitrator
/// re-encrypting S into V) and by the mixing enumeration.
pub fn qotp_encrypt_raw(qubits: &[Qubit], pad: &BitString) -> Result<Vec<Qubit>> {
    check_pad("raw pad", pad.len(), qubits.len())?;
    Ok(qubits
        .iter()
        .enumerate()
        .map(|(i, q)| PauliKeyPair::from_pad(pad, i).encrypt(q))
        .collect())
}

/// [`qotp_decrypt`] against raw pad bits, without one-time tracking.
pub fn qotp_decrypt_raw(qubits: &[Qubit], pad: &BitString) -> Result<Vec<Qubit>> {
    check_pad("raw pad", pad.len(), qubits.len())?;
    Ok(qubits
        .iter()
        .enumerate()
        .map(|(i, q)| PauliKeyPair::from_pad(pad, i).decrypt(q))
        .collect())
}

fn check_pad(name: &'static str, pad_len: usize, qubit_count: usize) -> Result<()> {
    if pad_len != 2 * qubit_count {
        return Err(Error::KeyLength {
            name,
            needed: 2 * qubit_count,
            available: pad_len,
        });
    }
    Ok(())
}

/// Classical one-time pad: XOR `bits` with the segment, consuming it.
///
/// Self-inverse; the receiving party decrypts by calling the same
/// operation on its own copy of the segment.
///
/// # Errors
/// [`Error::KeyLength`] on length mismatch; [`Error::KeyReuse`] on a
/// consumed segment.
pub fn xor_pad(bits: &BitString, segment: &mut Segment) -> Result<BitString> {
    if segment.len() != bits.len() {
        return Err(Error::KeyLength {
            name: segment.name(),
            needed: bits.len(),
            available: segment.len(),
        });
    }
    let pad = segment.consume()?;
    bits.xor(&pad)
}

/// [`xor_pad`] against raw pad bits, without one-time tracking.
pub fn xor_pad_raw(bits: &BitString, pad: &BitString) -> Result<BitString> {
    if pad.len() != bits.len() {
        return Err(Error::KeyLength {
            name: "raw pad",
            needed: bits.len(),
            available: pad.len(),
        });
    }
    bits.xor(pad)
}

/// Verify the pad-averaged ciphertext is maximally mixed.
///
/// Enumerates all 4^m Pauli keys for the m-qubit register `plain` with
/// uniform weight, averages the ciphertext density matrices, and returns
/// the trace distance to I/2^m. A correct pad yields a distance at
/// floating-point noise level (< 1e-10) for every input state.
///
/// # Errors
/// [`Error::Size`] unless `1 <= m <= 3` and `plain` has exactly `m`
/// qubits.
pub fn verify_mixing(m: usize, plain: &[Qubit]) -> Result<f64> {
    if !(1..=3).contains(&m) || plain.len() != m {
        return Err(Error::Size {
            what: "mixing register",
            got: plain.len(),
            min: 1,
            max: 3,
        });
    }
    let mut ciphers = Vec::with_capacity(1 << (2 * m));
    for key in 0..(1u32 << (2 * m)) {
        let mut pad = BitString::new();
        for j in 0..m {
            pad.push(((key >> (2 * j)) & 1) as u8);
            pad.push(((key >> (2 * j + 1)) & 1) as u8);
        }
        let cipher = qotp_encrypt_raw(plain, &pad)?;
        ciphers.push(density_of(&cipher)?);
    }
    let averaged = DensityMatrix::average(&ciphers)?;
    averaged.trace_distance(&DensityMatrix::maximally_mixed(m)?)
}

/// Field kind inside an [`Envelope`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    /// Slice of the qubit payload.
    Qubit,
    /// Slice of the classical payload.
    Classical,
}

/// Name and extent of one field of an [`Envelope`].
///
/// `offset` and `len` index into the payload of the field's kind.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldLabel {
    pub name: String,
    pub offset: usize,
    pub len: usize,
    pub kind: FieldKind,
}

/// Payload of one envelope field, used when assembling envelopes.
#[derive(Debug, Clone)]
pub enum FieldPayload {
    Qubits(Vec<Qubit>),
    Bits(BitString),
}

/// One transmitted protocol message: an ordered qubit payload plus a
/// classical payload, with labels naming the fields of each.
///
/// Field labels are public metadata — qubit and classical bit counts are
/// readable without any key — while the payload contents are whatever the
/// sender encrypted.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    labels: Vec<FieldLabel>,
    qubits: Vec<Qubit>,
    cbits: BitString,
}

impl Envelope {
    /// Assemble an envelope from named fields, in order.
    ///
    /// Offsets are assigned cumulatively per payload kind.
    pub fn new(fields: Vec<(&str, FieldPayload)>) -> Self {
        let mut labels = Vec::with_capacity(fields.len());
        let mut qubits = Vec::new();
        let mut cbits = BitString::new();
        for (name, payload) in fields {
            match payload {
                FieldPayload::Qubits(qs) => {
                    labels.push(FieldLabel {
                        name: name.to_string(),
                        offset: qubits.len(),
                        len: qs.len(),
                        kind: FieldKind::Qubit,
                    });
                    qubits.extend(qs);
                }
                FieldPayload::Bits(bs) => {
                    labels.push(FieldLabel {
                        name: name.to_string(),
                        offset: cbits.len(),
                        len: bs.len(),
                        kind: FieldKind::Classical,
                    });
                    cbits = cbits.concat(&bs);
                }
            }
        }
        Self {
            labels,
            qubits,
            cbits,
        }
    }

    /// Field labels in transmission order.
    pub fn labels(&self) -> &[FieldLabel] {
        &self.labels
    }

    /// Full qubit payload.
    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    /// Full classical payload.
    pub fn cbits(&self) -> &BitString {
        &self.cbits
    }

    /// Number of qubits transmitted.
    pub fn qubit_count(&self) -> usize {
        self.qubits.len()
    }

    /// Number of classical bits transmitted.
    pub fn cbit_count(&self) -> usize {
        self.cbits.len()
    }

    /// The label with the given name.
    ///
    /// # Errors
    /// [`Error::Format`] if no field has that name.
    pub fn label(&self, name: &str) -> Result<&FieldLabel> {
        self.labels
            .iter()
            .find(|l| l.name == name)
            .ok_or_else(|| Error::Format(format!("envelope has no field named {name:?}")))
    }

    /// The qubits of a named qubit field.
    ///
    /// # Errors
    /// [`Error::Format`] if missing or not a qubit field.
    pub fn qubit_field(&self, name: &str) -> Result<&[Qubit]> {
        let label = self.label(name)?;
        if label.kind != FieldKind::Qubit {
            return Err(Error::Format(format!("field {name:?} is not a qubit field")));
        }
        Ok(&self.qubits[label.offset..label.offset + label.len])
    }

    /// The bits of a named classical field.
    ///
    /// # Errors
    /// [`Error::Format`] if missing or not a classical field.
    pub fn classical_field(&self, name: &str) -> Result<BitString> {
        let label = self.label(name)?;
        if label.kind != FieldKind::Classical {
            return Err(Error::Format(format!(
                "field {name:?} is not a classical field"
            )));
        }
        Ok(self.cbits.slice(label.offset, label.offset + label.len))
    }

    /// Check that the labels exactly partition both payloads: per kind,
    /// offsets are consecutive from 0 and the lengths sum to the payload
    /// size.
    ///
    /// # Errors
    /// [`Error::Format`] describing the first violation.
    pub fn validate_partition(&self) -> Result<()> {
        let mut qubit_at = 0;
        let mut cbit_at = 0;
        for label in &self.labels {
            let at = match label.kind {
                FieldKind::Qubit => &mut qubit_at,
                FieldKind::Classical => &mut cbit_at,
            };
            if label.offset != *at {
                return Err(Error::Format(format!(
                    "field {:?} at offset {}, expected {}",
                    label.name, label.offset, at
                )));
            }
            *at += label.len;
        }
        if qubit_at != self.qubits.len() {
            return Err(Error::Format(format!(
                "labels cover {} qubits but payload has {}",
                qubit_at,
                self.qubits.len()
            )));
        }
        if cbit_at != self.cbits.len() {
            return Err(Error::Format(format!(
                "labels cover {} classical bits but payload has {}",
                cbit_at,
                self.cbits.len()
            )));
        }
        Ok(())
    }
}

/// One amplitude component formatted with 17 significant digits — enough
/// to reproduce the exact f64 on parse.
fn amp_to_raw(v: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{v:.16e}")).expect("finite float formats as a JSON number")
}

#[derive(Serialize)]
struct EnvelopeWireOut<'a> {
    labels: &'a [FieldLabel],
    qubits: Vec<[Box<RawValue>; 4]>,
    cbits: &'a BitString,
}

#[derive(Deserialize)]
struct EnvelopeWireIn {
    labels: Vec<FieldLabel>,
    qubits: Vec<[f64; 4]>,
    cbits: BitString,
}

impl Serialize for Envelope {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let wire = EnvelopeWireOut {
            labels: &self.labels,
            qubits: self
                .qubits
                .iter()
                .map(|q| {
                    [
                        amp_to_raw(q.alpha().re),
                        amp_to_raw(q.alpha().im),
                        amp_to_raw(q.beta().re),
                        amp_to_raw(q.beta().im),
                    ]
                })
                .collect(),
            cbits: &self.cbits,
        };
        wire.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Envelope {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = EnvelopeWireIn::deserialize(deserializer)?;
        let qubits = wire
            .qubits
            .iter()
            .map(|[re0, im0, re1, im1]| {
                Qubit::from_amplitudes(
                    num_complex::Complex64::new(*re0, *im0),
                    num_complex::Complex64::new(*re1, *im1),
                )
            })
            .collect::<Result<Vec<Qubit>>>()
            .map_err(D::Error::custom)?;
        let envelope = Envelope {
            labels: wire.labels,
            qubits,
            cbits: wire.cbits,
        };
        envelope.validate_partition().map_err(D::Error::custom)?;
        Ok(envelope)
    }
}

/// Serializable bundle of the raw key material for one session.
///
/// The on-disk form is JSON `{n, ka, kb, a, b}` with each key as a
/// "0"/"1" character string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyMaterial {
    pub n: usize,
    pub ka: BitString,
    pub kb: BitString,
    pub a: BitString,
    pub b: BitString,
}

impl KeyMaterial {
    /// Derive the segmented schedule from this material.
    ///
    /// # Errors
    /// As [`derive_schedule`].
    pub fn schedule(&self) -> Result<KeySchedule> {
        derive_schedule(self.n, &self.ka, &self.kb, &self.a, &self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::Basis;
    use crate::rng::RandomStream;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn random_material(n: usize, seed: u64) -> KeyMaterial {
        let mut rng = RandomStream::new(seed);
        KeyMaterial {
            n,
            ka: BitString::random(ka_len(n), &mut rng),
            kb: BitString::random(kb_len(n), &mut rng),
            a: BitString::random(n, &mut rng),
            b: BitString::random(n, &mut rng),
        }
    }

    /// A random pure state, not restricted to the four protocol states.
    fn random_state(rng: &mut RandomStream) -> Qubit {
        let theta = rng.next_unit() * std::f64::consts::PI;
        let phi = rng.next_unit() * 2.0 * std::f64::consts::PI;
        Qubit::from_amplitudes(
            Complex64::new((theta / 2.0).cos(), 0.0),
            Complex64::from_polar((theta / 2.0).sin(), phi),
        )
        .unwrap()
    }

    #[test]
    fn schedule_slicing_order_n1() {
        let ka: BitString = "10110".parse().unwrap();
        let kb = BitString::zeros(kb_len(1));
        let a = BitString::zeros(1);
        let b = BitString::zeros(1);
        let mut sched = derive_schedule(1, &ka, &kb, &a, &b).unwrap();
        assert_eq!(sched.ka_basis, BitString::from_bits(&[1]));
        assert_eq!(
            sched.ka_otp().consume().unwrap(),
            BitString::from_bits(&[0, 1, 1, 0])
        );
    }

    #[test]
    fn schedule_rejects_short_kb() {
        // n=2 needs 13·2+2 = 28 bits of K_b; 25 is short.
        let mat = random_material(2, 1);
        let short_kb = mat.kb.slice(0, 25);
        let err = derive_schedule(2, &mat.ka, &short_kb, &mat.a, &mat.b).unwrap_err();
        match err {
            Error::KeyLength {
                name,
                needed,
                available,
            } => {
                assert_eq!(name, "raw_kb");
                assert_eq!(needed, 28);
                assert_eq!(available, 25);
            }
            other => panic!("expected KeyLength, got {other:?}"),
        }
    }

    #[test]
    fn schedule_exact_lengths_leave_no_residue() {
        let n = 4;
        let mat = random_material(n, 2);
        assert_eq!(mat.ka.len(), 20);
        assert_eq!(mat.kb.len(), 54);
        let mut sched = mat.schedule().unwrap();
        // Reassemble the K_a material from its segments.
        let ka_rebuilt = sched.ka_basis.clone().concat(sched.ka_otp().peek());
        assert_eq!(ka_rebuilt, mat.ka);
        // Reassemble K_b in layout order.
        let kb_rebuilt = sched
            .kb_basis
            .clone()
            .concat(sched.kb_otp_n().peek())
            .concat(sched.kb_pad_b().peek())
            .concat(sched.kb_otp_v().peek())
            .concat(sched.kb_pad_v().peek());
        assert_eq!(kb_rebuilt, mat.kb);
    }

    #[test]
    fn schedule_accounting_over_n_range() {
        for n in 1..=64 {
            let mat = random_material(n, n as u64);
            let mut sched = mat.schedule().unwrap();
            assert_eq!(sched.ka_basis.len(), n);
            assert_eq!(sched.ka_otp().len(), 4 * n);
            assert_eq!(sched.kb_basis.len(), n);
            assert_eq!(sched.kb_otp_n().len(), 4 * n);
            assert_eq!(sched.kb_pad_b().len(), n);
            assert_eq!(sched.kb_otp_v().len(), 6 * n);
            assert_eq!(sched.kb_pad_v().len(), n + 2);
            assert_eq!(sched.a_auth.len(), n);
            assert_eq!(sched.b_auth.len(), n);
            // One bit short on either key is an error naming the input.
            let short_ka = mat.ka.slice(0, ka_len(n) - 1);
            assert!(matches!(
                derive_schedule(n, &short_ka, &mat.kb, &mat.a, &mat.b),
                Err(Error::KeyLength { name: "raw_ka", .. })
            ));
            let short_kb = mat.kb.slice(0, kb_len(n) - 1);
            assert!(matches!(
                derive_schedule(n, &mat.ka, &short_kb, &mat.a, &mat.b),
                Err(Error::KeyLength { name: "raw_kb", .. })
            ));
        }
    }

    #[test]
    fn qotp_identity_key_is_identity() {
        let q = [Qubit::prepare(0, Basis::Rectilinear)];
        let out = qotp_encrypt_raw(&q, &BitString::from_bits(&[0, 0])).unwrap();
        assert!(out[0].max_amplitude_delta(&q[0]) < 1e-15);
    }

    #[test]
    fn qotp_x_key_flips() {
        let q = [Qubit::prepare(0, Basis::Rectilinear)];
        let out = qotp_encrypt_raw(&q, &BitString::from_bits(&[1, 0])).unwrap();
        assert!(out[0].max_amplitude_delta(&Qubit::prepare(1, Basis::Rectilinear)) < 1e-15);
    }

    #[test]
    fn qotp_xz_key_on_plus_gives_minus_with_phase() {
        // XZ|+⟩ = X|−⟩ = −|−⟩: amplitudes (−1/√2, 1/√2).
        let q = [Qubit::prepare(0, Basis::Diagonal)];
        let out = qotp_encrypt_raw(&q, &BitString::from_bits(&[1, 1])).unwrap();
        assert_abs_diff_eq!(out[0].alpha().re, -H, epsilon = 1e-12);
        assert_abs_diff_eq!(out[0].beta().re, H, epsilon = 1e-12);
        assert_abs_diff_eq!(out[0].fidelity(&Qubit::prepare(1, Basis::Diagonal)), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn qotp_round_trip_on_one() {
        let q = [Qubit::prepare(1, Basis::Rectilinear)];
        let pad = BitString::from_bits(&[1, 1]);
        let cipher = qotp_encrypt_raw(&q, &pad).unwrap();
        let back = qotp_decrypt_raw(&cipher, &pad).unwrap();
        assert_abs_diff_eq!(back[0].fidelity(&q[0]), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn qotp_decrypt_x_key() {
        let q = [Qubit::prepare(1, Basis::Rectilinear)];
        let out = qotp_decrypt_raw(&q, &BitString::from_bits(&[1, 0])).unwrap();
        assert!(out[0].max_amplitude_delta(&Qubit::prepare(0, Basis::Rectilinear)) < 1e-15);
    }

    #[test]
    fn qotp_round_trip_fidelity_on_random_states() {
        let mut rng = RandomStream::new(77);
        for _ in 0..1000 {
            let q = [random_state(&mut rng)];
            let pad = BitString::random(2, &mut rng);
            let cipher = qotp_encrypt_raw(&q, &pad).unwrap();
            let back = qotp_decrypt_raw(&cipher, &pad).unwrap();
            let fidelity = back[0].fidelity(&q[0]);
            assert!(
                (fidelity - 1.0).abs() < 1e-12,
                "fidelity {fidelity} for pad {pad}"
            );
        }
    }

    #[test]
    fn qotp_length_mismatch() {
        let q = [Qubit::prepare(0, Basis::Rectilinear)];
        let err = qotp_encrypt_raw(&q, &BitString::from_bits(&[1])).unwrap_err();
        assert!(matches!(err, Error::KeyLength { .. }));
    }

    #[test]
    fn segment_reuse_is_rejected() {
        let mat = random_material(2, 3);
        let mut sched = mat.schedule().unwrap();
        let qubits = vec![Qubit::prepare(0, Basis::Rectilinear); 4];
        qotp_encrypt(&qubits, sched.ka_otp()).unwrap();
        let err = qotp_encrypt(&qubits, sched.ka_otp()).unwrap_err();
        assert!(matches!(err, Error::KeyReuse { name: "ka_otp" }));
        // A fresh copy of the schedule has its own one-time flags.
        let mut fresh = mat.schedule().unwrap();
        qotp_decrypt(&qubits, fresh.ka_otp()).unwrap();
    }

    #[test]
    fn xor_pad_examples() {
        let bits: BitString = "1011".parse().unwrap();
        let mat = random_material(4, 4);
        let mut sched = mat.schedule().unwrap();
        let expected = bits.xor(sched.kb_pad_b().peek()).unwrap();
        assert_eq!(xor_pad(&bits, sched.kb_pad_b()).unwrap(), expected);
        // Raw form: zero pad is identity, self-XOR is zero.
        assert_eq!(
            xor_pad_raw(&bits, &BitString::zeros(4)).unwrap(),
            bits.clone()
        );
        assert_eq!(xor_pad_raw(&bits, &bits).unwrap(), BitString::zeros(4));
        // Reuse of the same segment is rejected.
        assert!(matches!(
            xor_pad(&bits, sched.kb_pad_b()),
            Err(Error::KeyReuse { name: "kb_pad_b" })
        ));
    }

    #[test]
    fn mixing_single_qubit_inputs() {
        for q in [
            Qubit::prepare(0, Basis::Rectilinear),
            Qubit::prepare(0, Basis::Diagonal),
        ] {
            let d = verify_mixing(1, &[q]).unwrap();
            assert!(d < 1e-10, "trace distance {d}");
        }
    }

    #[test]
    fn mixing_two_qubit_input() {
        let reg = [
            Qubit::prepare(0, Basis::Rectilinear),
            Qubit::prepare(1, Basis::Rectilinear),
        ];
        let d = verify_mixing(2, &reg).unwrap();
        assert!(d < 1e-10, "trace distance {d}");
    }

    #[test]
    fn mixing_register_size_checked() {
        let q = Qubit::prepare(0, Basis::Rectilinear);
        assert!(matches!(verify_mixing(0, &[]), Err(Error::Size { .. })));
        assert!(matches!(verify_mixing(2, &[q]), Err(Error::Size { .. })));
        assert!(matches!(
            verify_mixing(4, &[q; 4]),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn envelope_fields_and_partition() {
        let env = Envelope::new(vec![
            ("M", FieldPayload::Qubits(vec![Qubit::prepare(0, Basis::Rectilinear); 2])),
            ("B", FieldPayload::Bits("101".parse().unwrap())),
            ("R", FieldPayload::Qubits(vec![Qubit::prepare(1, Basis::Diagonal); 2])),
        ]);
        env.validate_partition().unwrap();
        assert_eq!(env.qubit_count(), 4);
        assert_eq!(env.cbit_count(), 3);
        assert_eq!(env.qubit_field("R").unwrap().len(), 2);
        assert_eq!(env.label("R").unwrap().offset, 2);
        assert_eq!(env.classical_field("B").unwrap(), "101".parse().unwrap());
        assert!(matches!(env.qubit_field("B"), Err(Error::Format(_))));
        assert!(matches!(env.label("missing"), Err(Error::Format(_))));
    }

    #[test]
    fn envelope_serde_round_trip_is_exact() {
        let mut rng = RandomStream::new(8);
        let qubits: Vec<Qubit> = (0..4).map(|_| random_state(&mut rng)).collect();
        let env = Envelope::new(vec![
            ("Q", FieldPayload::Qubits(qubits.clone())),
            ("C", FieldPayload::Bits("0110".parse().unwrap())),
        ]);
        let json = serde_json::to_string(&env).unwrap();
        let back: Envelope = serde_json::from_str(&json).unwrap();
        for (orig, parsed) in qubits.iter().zip(back.qubits()) {
            // Bit-exact amplitude recovery, not merely within tolerance.
            assert_eq!(orig.alpha().re.to_bits(), parsed.alpha().re.to_bits());
            assert_eq!(orig.alpha().im.to_bits(), parsed.alpha().im.to_bits());
            assert_eq!(orig.beta().re.to_bits(), parsed.beta().re.to_bits());
            assert_eq!(orig.beta().im.to_bits(), parsed.beta().im.to_bits());
        }
        assert_eq!(back.cbits(), env.cbits());
        assert_eq!(back.labels(), env.labels());
    }

    #[test]
    fn envelope_wire_format_shape() {
        let env = Envelope::new(vec![
            ("Q", FieldPayload::Qubits(vec![Qubit::prepare(0, Basis::Diagonal)])),
            ("C", FieldPayload::Bits("01".parse().unwrap())),
        ]);
        let value: serde_json::Value = serde_json::from_str(&serde_json::to_string(&env).unwrap()).unwrap();
        assert_eq!(value["cbits"], "01");
        assert_eq!(value["labels"][0]["name"], "Q");
        assert_eq!(value["labels"][0]["kind"], "qubit");
        assert_eq!(value["labels"][1]["kind"], "classical");
        let quad = value["qubits"][0].as_array().unwrap();
        assert_eq!(quad.len(), 4);
        assert_abs_diff_eq!(quad[0].as_f64().unwrap(), H, epsilon = 1e-15);
    }

    #[test]
    fn envelope_rejects_bad_partition() {
        // Labels claiming more qubits than the payload carries.
        let json = r#"{
            "labels": [{"name": "Q", "offset": 0, "len": 2, "kind": "qubit"}],
            "qubits": [[1.0, 0.0, 0.0, 0.0]],
            "cbits": ""
        }"#;
        assert!(serde_json::from_str::<Envelope>(json).is_err());
        // Unnormalized amplitudes.
        let json = r#"{
            "labels": [{"name": "Q", "offset": 0, "len": 1, "kind": "qubit"}],
            "qubits": [[0.9, 0.0, 0.0, 0.0]],
            "cbits": ""
        }"#;
        assert!(serde_json::from_str::<Envelope>(json).is_err());
    }

    #[test]
    fn key_material_file_round_trip() {
        let mat = random_material(3, 9);
        let json = serde_json::to_string(&mat).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["n"], 3);
        assert!(value["ka"].is_string());
        let back: KeyMaterial = serde_json::from_str(&json).unwrap();
        assert_eq!(back, mat);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn qotp_round_trip_via_segments(n in 1usize..12, seed in any::<u64>()) {
            let mut rng = RandomStream::new(seed);
            let mat = random_material(n, seed);
            let mut sender = mat.schedule().unwrap();
            let mut receiver = mat.schedule().unwrap();
            let qubits: Vec<Qubit> = (0..2 * n).map(|_| random_state(&mut rng)).collect();
            let cipher = qotp_encrypt(&qubits, sender.ka_otp()).unwrap();
            let back = qotp_decrypt(&cipher, receiver.ka_otp()).unwrap();
            for (orig, rec) in qubits.iter().zip(&back) {
                prop_assert!((rec.fidelity(orig) - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn double_consumption_always_fails(n in 1usize..10, seed in any::<u64>()) {
            let mat = random_material(n, seed);
            let mut sched = mat.schedule().unwrap();
            let bits = BitString::zeros(n);
            xor_pad(&bits, sched.kb_pad_b()).unwrap();
            let xor_reuse_refused = matches!(
                xor_pad(&bits, sched.kb_pad_b()),
                Err(Error::KeyReuse { .. })
            );
            prop_assert!(xor_reuse_refused);
            let qubits = vec![Qubit::prepare(0, Basis::Rectilinear); 2 * n];
            qotp_encrypt(&qubits, sched.kb_otp_n()).unwrap();
            let otp_reuse_refused = matches!(
                qotp_encrypt(&qubits, sched.kb_otp_n()),
                Err(Error::KeyReuse { .. })
            );
            prop_assert!(otp_reuse_refused);
        }

        #[test]
        fn xor_pad_raw_self_inverse(len in 1usize..128, seed in any::<u64>()) {
            let mut rng = RandomStream::new(seed);
            let bits = BitString::random(len, &mut rng);
            let pad = BitString::random(len, &mut rng);
            let once = xor_pad_raw(&bits, &pad).unwrap();
            prop_assert_eq!(xor_pad_raw(&once, &pad).unwrap(), bits);
        }
    }
}
