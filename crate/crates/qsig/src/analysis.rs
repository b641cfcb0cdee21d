//! Security and performance analysis of the signing protocol.
//!
//! Four instruments live here:
//!
//! * **Forgery experiments** ([`run_attack`]): Monte Carlo estimation of
//!   how often a forger who does not hold Alice's keys slips a package
//!   past the arbitrator. Two threat models are named — an outside
//!   attacker substituting the signature in transit, and a dishonest
//!   receiver forging one outright — but both reduce to the same trial,
//!   because the receiver's key material never enters the arbitrator's
//!   signature check and the receiver cannot improve the odds of passing
//!   it. Detection is reported with Wilson confidence intervals.
//! * **Exact oracle** ([`exact_pass_probability`]): a closed enumeration
//!   over every key combination for small n. States are tracked
//!   symbolically as (family, bit) pairs — Pauli X flips the bit of a
//!   rectilinear state only, Pauli Z flips the bit of a diagonal state
//!   only, and a measurement in the matching family is deterministic
//!   while a mismatched one is a fair coin. Every probability is a dyadic
//!   rational, so the result is exact in floating point.
//! * **Pad mixing** ([`mixing_report`]): trace-distance checks that the
//!   key-averaged one-time-pad ciphertext equals the maximally mixed
//!   state, over a battery of plaintext registers.
//! * **Efficiency accounting** ([`efficiency`]): the signed-bits per
//!   transmitted-bits ratio η = n / (9n + 2) measured from an actual
//!   session transcript.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::keys::{
    derive_schedule, ka_len, kb_len, qotp_encrypt_raw, verify_mixing, Envelope, FieldPayload,
    KeySchedule,
};
use crate::protocol::{
    arbitrator_verify, bob_finalize, bob_wrap, run_session, MessageBits, SignaturePackage,
    VerificationResult,
};
use crate::qubit::{Basis, Qubit};
use crate::rng::RandomStream;

/// Threat model for forgery experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackModel {
    /// An outside attacker replaces the signature package in transit;
    /// sender, receiver, and arbitrator are all honest.
    Outsider,
    /// The receiver forges a package himself and submits it for
    /// verification with his own (correct) wrapping keys.
    DishonestBob,
}

impl AttackModel {
    /// Stable lowercase name used in reports and CSV output.
    pub fn name(self) -> &'static str {
        match self {
            AttackModel::Outsider => "outsider",
            AttackModel::DishonestBob => "dishonest-bob",
        }
    }
}

/// Parameters of a forgery experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub model: AttackModel,
    /// Message length in bits.
    pub n: usize,
    /// Number of independent trials.
    pub trials: u64,
    /// Base seed; trial t runs on substream t of this seed.
    pub seed: u64,
}

impl AttackConfig {
    /// Check the parameters.
    ///
    /// # Errors
    /// [`Error::Size`] when `n` or `trials` is zero.
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Size {
                what: "attack message length",
                got: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        if self.trials == 0 {
            return Err(Error::Size {
                what: "attack trials",
                got: 0,
                min: 1,
                max: usize::MAX,
            });
        }
        Ok(())
    }
}

/// Result of a forgery experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub model: AttackModel,
    pub n: usize,
    pub trials: u64,
    /// Trials in which the forgery was rejected.
    pub detected: u64,
    /// `detected / trials`.
    pub empirical_rate: f64,
    /// Lower end of the 95% Wilson interval for the detection rate.
    pub wilson_lo: f64,
    /// Upper end of the 95% Wilson interval for the detection rate.
    pub wilson_hi: f64,
    /// Theoretical detection bound 1 − 2^(−6n) advertised for this
    /// scheme; reported as a reference line, not asserted.
    pub paper_bound: f64,
    /// Exact detection probability from the enumeration oracle, present
    /// when n is small enough for the oracle.
    pub exact_rate: Option<f64>,
}

/// Craft a signature package over the all-zero message from guessed key
/// material: `ka_guess` plays Alice's 5n-bit key, `a_guess` her n-bit
/// authentication string.
///
/// # Errors
/// [`Error::KeyLength`] when the guesses are shorter than the layout
/// requires.
pub fn forge_package(
    n: usize,
    ka_guess: &BitString,
    a_guess: &BitString,
) -> Result<SignaturePackage> {
    if ka_guess.len() < ka_len(n) || a_guess.len() < n {
        return Err(Error::KeyLength {
            name: "forged key guess",
            needed: ka_len(n),
            available: ka_guess.len().min(a_guess.len()),
        });
    }
    let mut register = Vec::with_capacity(2 * n);
    for i in 0..n {
        // Forged message bit is 0, so M_i encodes the guessed a bit.
        register.push(Qubit::prepare(a_guess.bit(i), Basis::Rectilinear));
    }
    for i in 0..n {
        register.push(Qubit::prepare(0, Basis::from_bit(ka_guess.bit(i))));
    }
    let pad = ka_guess.slice(n, 5 * n);
    let cipher = qotp_encrypt_raw(&register, &pad)?;
    let (m_part, r_part) = cipher.split_at(n);
    SignaturePackage::from_envelope(Envelope::new(vec![
        ("M", FieldPayload::Qubits(m_part.to_vec())),
        ("R", FieldPayload::Qubits(r_part.to_vec())),
    ]))
}

/// Key schedule drawn from uniformly random bits.
///
/// Statistically indistinguishable from freshly provisioned material and
/// cheap enough for large simulation batteries.
///
/// # Errors
/// [`Error::Size`] if `n = 0`.
pub fn uniform_schedule(n: usize, rng: &mut RandomStream) -> Result<KeySchedule> {
    let ka = BitString::random(ka_len(n), rng);
    let kb = BitString::random(kb_len(n), rng);
    let a = BitString::random(n, rng);
    let b = BitString::random(n, rng);
    derive_schedule(n, &ka, &kb, &a, &b)
}

/// Run one forgery trial: draw fresh shared keys, let the forger guess
/// Alice's material, and push the forged all-zero-message package through
/// wrap, verification, and finalization.
///
/// Trial `trial` of base seed `seed` runs on its own substream, so trials
/// are independent and individually reproducible.
///
/// # Errors
/// Propagated from schedule derivation and the protocol steps.
pub fn forge_trial(n: usize, seed: u64, trial: u64) -> Result<VerificationResult> {
    let mut rng = RandomStream::with_stream(seed, trial);
    let sched = uniform_schedule(n, &mut rng)?;
    let ka_guess = BitString::random(ka_len(n), &mut rng);
    let a_guess = BitString::random(n, &mut rng);
    let s = forge_package(n, &ka_guess, &a_guess)?;
    let mut bob = sched.clone();
    let mut trent = sched;
    let nreq = bob_wrap(&s, &mut bob)?;
    let v = arbitrator_verify(&nreq, &mut trent, &mut rng)?;
    bob_finalize(&v, &mut bob, &mut rng)
}

/// Run a full forgery experiment.
///
/// # Errors
/// [`Error::Size`] for invalid parameters; trial errors propagate.
pub fn run_attack(cfg: &AttackConfig) -> Result<AttackReport> {
    cfg.validate()?;
    let mut detected = 0u64;
    for trial in 0..cfg.trials {
        let result = forge_trial(cfg.n, cfg.seed, trial)?;
        if !result.accepted {
            detected += 1;
        }
    }
    let empirical_rate = detected as f64 / cfg.trials as f64;
    let (wilson_lo, wilson_hi) = wilson_interval(detected, cfg.trials, 1.96);
    Ok(AttackReport {
        model: cfg.model,
        n: cfg.n,
        trials: cfg.trials,
        detected,
        empirical_rate,
        wilson_lo,
        wilson_hi,
        paper_bound: paper_bound(cfg.n),
        exact_rate: exact_pass_probability(cfg.model, cfg.n)
            .ok()
            .map(|pass| 1.0 - pass),
    })
}

/// Wilson score interval for a binomial proportion.
///
/// Returns `(lo, hi)` clamped to [0, 1]; the degenerate zero-trial case
/// yields the vacuous interval (0, 1).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let t = trials as f64;
    let p = successes as f64 / t;
    let z2 = z * z;
    let denom = 1.0 + z2 / t;
    let center = (p + z2 / (2.0 * t)) / denom;
    let half = z * (p * (1.0 - p) / t + z2 / (4.0 * t * t)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Theoretical detection bound 1 − 2^(−6n) advertised for this scheme.
pub fn paper_bound(n: usize) -> f64 {
    1.0 - 0.5f64.powi((6 * n) as i32)
}

/// Symbolic single-photon state for the enumeration oracle: the basis
/// family it lives in and which of the two family states it is. Global
/// phases are irrelevant to measurement statistics and are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct SymbolicQubit {
    family: Basis,
    bit: u8,
}

impl SymbolicQubit {
    fn prepare(bit: u8, family: Basis) -> Self {
        Self { family, bit }
    }

    /// Pauli X: flips the bit of a rectilinear state, fixes (up to
    /// phase) a diagonal one.
    fn x(mut self) -> Self {
        if self.family == Basis::Rectilinear {
            self.bit ^= 1;
        }
        self
    }

    /// Pauli Z: flips the bit of a diagonal state, fixes (up to phase)
    /// a rectilinear one.
    fn z(mut self) -> Self {
        if self.family == Basis::Diagonal {
            self.bit ^= 1;
        }
        self
    }

    /// Pad application with key pair (x, z), encryption order Z then X.
    fn encrypt(self, x_bit: u8, z_bit: u8) -> Self {
        let mut q = self;
        if z_bit == 1 {
            q = q.z();
        }
        if x_bit == 1 {
            q = q.x();
        }
        q
    }

    /// Pad removal with key pair (x, z), decryption order X then Z.
    fn decrypt(self, x_bit: u8, z_bit: u8) -> Self {
        let mut q = self;
        if x_bit == 1 {
            q = q.x();
        }
        if z_bit == 1 {
            q = q.z();
        }
        q
    }

    /// Probability, in half-units (0, 1, or 2 halves), that measuring in
    /// `basis` yields `want`.
    fn outcome_halves(self, basis: Basis, want: u8) -> u64 {
        if self.family == basis {
            if self.bit == want {
                2
            } else {
                0
            }
        } else {
            1
        }
    }
}

const KEY_COMBOS: u64 = 64;

fn bit(word: u64, index: u32) -> u8 {
    ((word >> index) & 1) as u8
}

/// Pass probability of one forged index given 6 true key bits and 6
/// guessed key bits, in half-units.
fn index_pass_halves(truth: u64, guess: u64) -> u64 {
    // True bits: a, basis selector, (x, z) pad pair for M, (x, z) for R.
    let a = bit(truth, 0);
    let basis = Basis::from_bit(bit(truth, 1));
    let (xm, zm) = (bit(truth, 2), bit(truth, 3));
    let (xr, zr) = (bit(truth, 4), bit(truth, 5));
    // The forger's guesses for the same six bits.
    let a_g = bit(guess, 0);
    let basis_g = Basis::from_bit(bit(guess, 1));
    let (xm_g, zm_g) = (bit(guess, 2), bit(guess, 3));
    let (xr_g, zr_g) = (bit(guess, 4), bit(guess, 5));

    // Forger builds the index for message bit 0 and encrypts with the
    // guessed pads.
    let m_forged = SymbolicQubit::prepare(a_g, Basis::Rectilinear).encrypt(xm_g, zm_g);
    let r_forged = SymbolicQubit::prepare(0, basis_g).encrypt(xr_g, zr_g);

    // Arbitrator decrypts with the true pads.
    let m_plain = m_forged.decrypt(xm, zm);
    let r_plain = r_forged.decrypt(xr, zr);

    // M stays rectilinear under pads, so the readout is deterministic.
    debug_assert_eq!(m_plain.family, Basis::Rectilinear);
    let m_out = m_plain.bit;
    let p_hat = a ^ m_out;

    // The index passes when R reproduces the recovered message bit in
    // the true keyed basis.
    r_plain.outcome_halves(basis, p_hat)
}

/// Exact probability that a forged n-bit package passes the arbitrator,
/// by enumeration of every true and guessed key combination.
///
/// Both threat models share the enumeration: the receiver's keys never
/// enter the arbitrator's signature check, so an outsider and a
/// dishonest receiver face identical odds.
///
/// # Errors
/// [`Error::Size`] when n is outside the enumerable range 1..=2.
pub fn exact_pass_probability(model: AttackModel, n: usize) -> Result<f64> {
    if !(1..=2).contains(&n) {
        return Err(Error::Size {
            what: "exact oracle message length",
            got: n,
            min: 1,
            max: 2,
        });
    }
    let per_index = match model {
        AttackModel::Outsider | AttackModel::DishonestBob => {
            let mut halves = 0u64;
            for truth in 0..KEY_COMBOS {
                for guess in 0..KEY_COMBOS {
                    halves += index_pass_halves(truth, guess);
                }
            }
            // 64 × 64 combinations × 2 half-units each.
            halves as f64 / (KEY_COMBOS * KEY_COMBOS * 2) as f64
        }
    };
    Ok(per_index.powi(n as i32))
}

/// Exact pass probability when the forger's guess happens to equal the
/// true key material — the diagonal of the enumeration. Always 1: with
/// Alice's keys in hand, forging is just signing.
pub fn exact_pass_probability_correct_guess(n: usize) -> Result<f64> {
    if !(1..=2).contains(&n) {
        return Err(Error::Size {
            what: "exact oracle message length",
            got: n,
            min: 1,
            max: 2,
        });
    }
    let mut halves = 0u64;
    for truth in 0..KEY_COMBOS {
        halves += index_pass_halves(truth, truth);
    }
    let per_index = halves as f64 / (KEY_COMBOS * 2) as f64;
    Ok(per_index.powi(n as i32))
}

/// One trace-distance measurement from the mixing battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingEntry {
    /// Register size.
    pub m: usize,
    /// Name of the plaintext register under test.
    pub label: String,
    /// Trace distance between the key-averaged ciphertext and the
    /// maximally mixed state.
    pub trace_distance: f64,
}

/// Run the pad-mixing battery for every register size up to `max_m`.
///
/// Each register is encrypted under all 4^m pad keys; the average
/// ciphertext density matrix must sit at the maximally mixed state.
/// Batteries cover computational, conjugate, and mixed-family registers.
///
/// # Errors
/// [`Error::Size`] when `max_m` is outside 1..=3.
pub fn mixing_report(max_m: usize) -> Result<Vec<MixingEntry>> {
    if !(1..=3).contains(&max_m) {
        return Err(Error::Size {
            what: "mixing register size",
            got: max_m,
            min: 1,
            max: 3,
        });
    }
    let zero = Qubit::prepare(0, Basis::Rectilinear);
    let one = Qubit::prepare(1, Basis::Rectilinear);
    let plus = Qubit::prepare(0, Basis::Diagonal);
    let minus = Qubit::prepare(1, Basis::Diagonal);
    let batteries: [(&str, Vec<Qubit>); 4] = [
        ("uniform-zero", vec![zero; 3]),
        ("uniform-plus", vec![plus; 3]),
        ("alternating-computational", vec![zero, one, zero]),
        ("conjugate-cycle", vec![plus, minus, zero]),
    ];
    let mut entries = Vec::new();
    for m in 1..=max_m {
        for (label, states) in &batteries {
            let trace_distance = verify_mixing(m, &states[..m])?;
            entries.push(MixingEntry {
                m,
                label: (*label).to_string(),
                trace_distance,
            });
        }
    }
    Ok(entries)
}

/// Resource accounting for one signed message.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyReport {
    /// Message length.
    pub n: usize,
    /// Useful signed bits per session (the message itself).
    pub b_s: usize,
    /// Qubits transmitted.
    pub q_t: usize,
    /// Classical bits transmitted.
    pub b_t: usize,
    /// Efficiency η = b_s / (q_t + b_t).
    pub eta: f64,
}

/// Measure transmission efficiency from one honest session.
///
/// The counters are structural — every honest n-bit session moves 7n
/// qubits and 2n + 2 classical bits — so the seed only picks the key
/// material and message, never the shape of the report.
///
/// # Errors
/// Propagated from the session.
pub fn efficiency(n: usize) -> Result<EfficiencyReport> {
    efficiency_with_seed(n, 0)
}

/// [`efficiency`] with an explicit seed for the underlying session.
///
/// # Errors
/// Propagated from the session.
pub fn efficiency_with_seed(n: usize, seed: u64) -> Result<EfficiencyReport> {
    let mut rng = RandomStream::new(seed);
    let sched = uniform_schedule(n, &mut rng)?;
    let p = MessageBits::random(n, &mut rng)?;
    let (_, transcript) = run_session(&p, &sched, &mut rng)?;
    let b_s = n;
    let q_t = transcript.q_t();
    let b_t = transcript.b_t();
    Ok(EfficiencyReport {
        n,
        b_s,
        q_t,
        b_t,
        eta: b_s as f64 / (q_t + b_t) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_oracle_values() {
        for model in [AttackModel::Outsider, AttackModel::DishonestBob] {
            assert_eq!(exact_pass_probability(model, 1).unwrap(), 0.5);
            assert_eq!(exact_pass_probability(model, 2).unwrap(), 0.25);
        }
        assert!(matches!(
            exact_pass_probability(AttackModel::Outsider, 0),
            Err(Error::Size { .. })
        ));
        assert!(matches!(
            exact_pass_probability(AttackModel::Outsider, 3),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn correct_guess_always_passes_oracle() {
        assert_eq!(exact_pass_probability_correct_guess(1).unwrap(), 1.0);
        assert_eq!(exact_pass_probability_correct_guess(2).unwrap(), 1.0);
    }

    #[test]
    fn correct_guess_always_passes_simulation() {
        let mut rng = RandomStream::new(31);
        for _ in 0..50 {
            let n = 3;
            let ka = BitString::random(ka_len(n), &mut rng);
            let kb = BitString::random(kb_len(n), &mut rng);
            let a = BitString::random(n, &mut rng);
            let b = BitString::random(n, &mut rng);
            let sched = derive_schedule(n, &ka, &kb, &a, &b).unwrap();
            let s = forge_package(n, &ka, &a).unwrap();
            let mut bob = sched.clone();
            let mut trent = sched;
            let nreq = bob_wrap(&s, &mut bob).unwrap();
            let v = arbitrator_verify(&nreq, &mut trent, &mut rng).unwrap();
            let result = bob_finalize(&v, &mut bob, &mut rng).unwrap();
            assert!(result.accepted);
            assert_eq!(result.recovered, Some(BitString::zeros(n)));
        }
    }

    #[test]
    fn monte_carlo_matches_exact_oracle() {
        let cfg = AttackConfig {
            model: AttackModel::Outsider,
            n: 1,
            trials: 20_000,
            seed: 2024,
        };
        let report = run_attack(&cfg).unwrap();
        let exact = report.exact_rate.unwrap();
        assert_eq!(exact, 0.5);
        let se = (report.wilson_hi - report.wilson_lo) / (2.0 * 1.96);
        assert!(
            (report.empirical_rate - exact).abs() <= 3.0 * se,
            "empirical {} vs exact {exact} beyond 3 standard errors ({se})",
            report.empirical_rate
        );
        // The pass rate itself must clear the coarse 2^-6 floor.
        assert!(1.0 - report.empirical_rate >= 0.015_625);
    }

    #[test]
    fn detection_rate_grows_with_n() {
        let mut previous: Option<AttackReport> = None;
        for n in [1usize, 2, 4, 8] {
            let cfg = AttackConfig {
                model: AttackModel::DishonestBob,
                n,
                trials: 4_000,
                seed: 7,
            };
            let report = run_attack(&cfg).unwrap();
            if let Some(prev) = &previous {
                assert!(
                    report.empirical_rate >= prev.empirical_rate,
                    "detection fell from {} (n={}) to {} (n={})",
                    prev.empirical_rate,
                    prev.n,
                    report.empirical_rate,
                    report.n
                );
                assert!(
                    report.wilson_hi >= prev.wilson_lo,
                    "intervals out of order between n={} and n={}",
                    prev.n,
                    report.n
                );
            }
            previous = Some(report);
        }
    }

    #[test]
    fn dishonest_receiver_never_trips_xi() {
        // The forger wraps with correct receiver keys, so only the
        // signature check can fire.
        for trial in 0..300 {
            let result = forge_trial(2, 5, trial).unwrap();
            assert_eq!(result.xi, 0);
            assert_eq!(result.accepted, result.gamma == 0);
            if result.gamma == 0 {
                assert!(result.bob_match);
            }
        }
    }

    #[test]
    fn attack_reports_are_deterministic() {
        let cfg = AttackConfig {
            model: AttackModel::Outsider,
            n: 2,
            trials: 500,
            seed: 11,
        };
        let a = run_attack(&cfg).unwrap();
        let b = run_attack(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.paper_bound, 1.0 - 0.5f64.powi(12));
        assert_eq!(a.exact_rate, Some(0.75));
    }

    #[test]
    fn attack_config_validation() {
        let bad_n = AttackConfig {
            model: AttackModel::Outsider,
            n: 0,
            trials: 10,
            seed: 0,
        };
        assert!(matches!(run_attack(&bad_n), Err(Error::Size { .. })));
        let bad_trials = AttackConfig {
            model: AttackModel::Outsider,
            n: 1,
            trials: 0,
            seed: 0,
        };
        assert!(matches!(run_attack(&bad_trials), Err(Error::Size { .. })));
    }

    #[test]
    fn wilson_interval_reference_values() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.403_83).abs() < 5e-4, "lo = {lo}");
        assert!((hi - 0.596_17).abs() < 5e-4, "hi = {hi}");
        let (lo, hi) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.35);
        assert_eq!(wilson_interval(0, 0, 1.96), (0.0, 1.0));
    }

    #[test]
    fn mixing_battery_is_flat() {
        let entries = mixing_report(3).unwrap();
        assert_eq!(entries.len(), 12);
        for entry in &entries {
            assert!(
                entry.trace_distance < 1e-10,
                "{} at m={} sits {} from maximally mixed",
                entry.label,
                entry.m,
                entry.trace_distance
            );
        }
        assert!(matches!(mixing_report(0), Err(Error::Size { .. })));
        assert!(matches!(mixing_report(4), Err(Error::Size { .. })));
    }

    #[test]
    fn efficiency_formula_is_exact() {
        for n in [1usize, 10, 100, 1000] {
            let report = efficiency(n).unwrap();
            assert_eq!(report.b_s, n);
            assert_eq!(report.q_t, 7 * n);
            assert_eq!(report.b_t, 2 * n + 2);
            assert_eq!(report.eta, n as f64 / (9 * n + 2) as f64);
        }
        let eta_100 = efficiency(100).unwrap().eta;
        assert_eq!(eta_100, 100.0 / 902.0);
    }

    #[test]
    fn efficiency_approaches_asymptote_from_below() {
        let asymptote = 1.0 / 9.0;
        let mut last = 0.0;
        for n in [1usize, 10, 100, 1000] {
            let eta = efficiency(n).unwrap().eta;
            assert!(eta > last, "eta must grow with n");
            assert!(eta < asymptote, "eta must stay below 1/9");
            last = eta;
        }
        assert!((efficiency(1000).unwrap().eta - asymptote).abs() < 3e-4);
    }

    #[test]
    fn efficiency_seed_changes_nothing_structural() {
        let a = efficiency_with_seed(5, 1).unwrap();
        let b = efficiency_with_seed(5, 2).unwrap();
        assert_eq!(a, b);
    }
}
