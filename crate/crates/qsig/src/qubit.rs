//! Single-photon state simulation.
//!
//! A [`Qubit`] holds the two complex amplitudes of a polarization state in
//! the computational basis. The four protocol states are the rectilinear
//! pair {|0⟩, |1⟩} and the diagonal pair {|+⟩, |−⟩}. Preparation, the Pauli
//! X/Z gates used by the quantum one-time pad, and projective measurement
//! in either basis are exact up to f64 arithmetic.
//!
//! Measurement consumes exactly one draw from the supplied
//! [`RandomStream`], even when the outcome is deterministic, so the draw
//! count of a protocol phase is a stable, testable quantity. Probabilities
//! within `1e-12` of 0 or 1 are snapped so that measuring a basis
//! eigenstate in its own basis never branches on floating-point dust.
//!
//! [`DensityMatrix`] supports the small mixed-state computations the
//! security analysis needs: building the density operator of a register of
//! up to three qubits and computing trace distances via a Hermitian
//! eigendecomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Probabilities within this distance of 0 or 1 collapse deterministically.
const SNAP_TOLERANCE: f64 = 1e-12;

/// Measurement/preparation basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// {|0⟩, |1⟩} — horizontal/vertical polarization.
    Rectilinear,
    /// {|+⟩, |−⟩} — the ±45° superpositions.
    Diagonal,
}

impl Basis {
    /// Basis selected by a key bit: 0 picks rectilinear, 1 picks diagonal.
    pub fn from_bit(bit: u8) -> Self {
        match bit {
            0 => Basis::Rectilinear,
            1 => Basis::Diagonal,
            other => panic!("basis selector must be 0 or 1, got {other}"),
        }
    }

    /// Inverse of [`Basis::from_bit`].
    pub fn to_bit(self) -> u8 {
        match self {
            Basis::Rectilinear => 0,
            Basis::Diagonal => 1,
        }
    }
}

/// Pure single-qubit state α|0⟩ + β|1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit {
    alpha: Complex64,
    beta: Complex64,
}

impl Qubit {
    /// Encode a classical bit in the given basis.
    ///
    /// Rectilinear: 0 → |0⟩, 1 → |1⟩. Diagonal: 0 → |+⟩, 1 → |−⟩.
    pub fn prepare(bit: u8, basis: Basis) -> Self {
        assert!(bit <= 1, "encoded bit must be 0 or 1, got {bit}");
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match (basis, bit) {
            (Basis::Rectilinear, 0) => Self {
                alpha: Complex64::new(1.0, 0.0),
                beta: Complex64::new(0.0, 0.0),
            },
            (Basis::Rectilinear, _) => Self {
                alpha: Complex64::new(0.0, 0.0),
                beta: Complex64::new(1.0, 0.0),
            },
            (Basis::Diagonal, 0) => Self { alpha: h, beta: h },
            (Basis::Diagonal, _) => Self { alpha: h, beta: -h },
        }
    }

    /// Build a state from raw amplitudes, checking normalization.
    ///
    /// # Errors
    /// Returns [`Error::Format`] if |α|² + |β|² deviates from 1 by more
    /// than `1e-9` (serialized amplitudes are far more precise than that).
    pub fn from_amplitudes(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Format(format!(
                "qubit amplitudes not normalized: |alpha|^2 + |beta|^2 = {norm}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Amplitude of |0⟩.
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// Amplitude of |1⟩.
    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// √(|α|² + |β|²); 1 for every state this crate produces.
    pub fn norm(&self) -> f64 {
        (self.alpha.norm_sqr() + self.beta.norm_sqr()).sqrt()
    }

    /// Pauli X (bit flip): swaps the computational amplitudes.
    pub fn x(&self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }

    /// Pauli Z (phase flip): negates the |1⟩ amplitude.
    pub fn z(&self) -> Self {
        Self {
            alpha: self.alpha,
            beta: -self.beta,
        }
    }

    /// Hadamard: exchanges the rectilinear and diagonal families
    /// (|0⟩↔|+⟩, |1⟩↔|−⟩).
    pub fn h(&self) -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            alpha: (self.alpha + self.beta) * h,
            beta: (self.alpha - self.beta) * h,
        }
    }

    /// Probability of outcome 0 when measuring in `basis`.
    fn prob_zero(&self, basis: Basis) -> f64 {
        let p = match basis {
            Basis::Rectilinear => self.alpha.norm_sqr(),
            Basis::Diagonal => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                ((self.alpha + self.beta) * h).norm_sqr()
            }
        };
        p.clamp(0.0, 1.0)
    }

    /// Projective measurement in `basis`.
    ///
    /// Returns the outcome bit and collapses the state to the exact
    /// corresponding basis eigenstate (any global phase is discarded).
    /// Always consumes exactly one draw from `rng`.
    pub fn measure(&mut self, basis: Basis, rng: &mut RandomStream) -> u8 {
        let p0 = self.prob_zero(basis);
        let u = rng.next_unit();
        let outcome = if p0 >= 1.0 - SNAP_TOLERANCE {
            0
        } else if p0 <= SNAP_TOLERANCE {
            1
        } else if u < p0 {
            0
        } else {
            1
        };
        *self = Qubit::prepare(outcome, basis);
        outcome
    }

    /// Fidelity |⟨self|other⟩|² between two pure states.
    ///
    /// 1 means physically identical (global phase included), 0 means
    /// orthogonal.
    pub fn fidelity(&self, other: &Self) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta).norm_sqr()
    }

    /// Largest absolute difference between corresponding amplitude
    /// components of two states.
    pub fn max_amplitude_delta(&self, other: &Self) -> f64 {
        [
            (self.alpha.re - other.alpha.re).abs(),
            (self.alpha.im - other.alpha.im).abs(),
            (self.beta.re - other.beta.re).abs(),
            (self.beta.im - other.beta.im).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Hermitian, unit-trace operator on a register of 1–3 qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    mat: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Number of qubits in the register.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Dimension of the underlying matrix (2^qubits).
    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// Raw matrix entries.
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// The maximally mixed state I / 2^m.
    ///
    /// # Errors
    /// Returns [`Error::Size`] unless `1 <= m <= 3`.
    pub fn maximally_mixed(m: usize) -> Result<Self> {
        check_register_size(m)?;
        let dim = 1usize << m;
        let scale = Complex64::new(1.0 / dim as f64, 0.0);
        Ok(Self {
            qubits: m,
            mat: DMatrix::identity(dim, dim) * scale,
        })
    }

    /// Uniform mixture of equally sized density matrices.
    ///
    /// # Errors
    /// Returns [`Error::Size`] if the slice is empty or the register sizes
    /// disagree.
    pub fn average(states: &[DensityMatrix]) -> Result<Self> {
        let first = states.first().ok_or(Error::Size {
            what: "density matrix average",
            got: 0,
            min: 1,
            max: usize::MAX,
        })?;
        let m = first.qubits;
        let dim = first.dim();
        let mut sum = DMatrix::zeros(dim, dim);
        for state in states {
            if state.qubits != m {
                return Err(Error::Size {
                    what: "density matrix register size",
                    got: state.qubits,
                    min: m,
                    max: m,
                });
            }
            sum += &state.mat;
        }
        let scale = Complex64::new(1.0 / states.len() as f64, 0.0);
        Ok(Self {
            qubits: m,
            mat: sum * scale,
        })
    }

    /// Trace distance ½‖ρ − σ‖₁, computed from the eigenvalues of the
    /// Hermitian difference.
    ///
    /// # Errors
    /// Returns [`Error::Size`] if the register sizes differ.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.qubits != other.qubits {
            return Err(Error::Size {
                what: "density matrix register size",
                got: other.qubits,
                min: self.qubits,
                max: self.qubits,
            });
        }
        let diff = &self.mat - &other.mat;
        let eigenvalues = nalgebra::linalg::SymmetricEigen::new(diff).eigenvalues;
        Ok(0.5 * eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
    }
}

fn check_register_size(m: usize) -> Result<()> {
    if !(1..=3).contains(&m) {
        return Err(Error::Size {
            what: "density matrix register",
            got: m,
            min: 1,
            max: 3,
        });
    }
    Ok(())
}

/// Density operator |ψ⟩⟨ψ| of a register of 1–3 pure qubits.
///
/// # Errors
/// Returns [`Error::Size`] unless the register holds 1–3 qubits.
pub fn density_of(register: &[Qubit]) -> Result<DensityMatrix> {
    check_register_size(register.len())?;
    // Joint state vector via repeated Kronecker product.
    let mut state = vec![Complex64::new(1.0, 0.0)];
    for q in register {
        let mut next = Vec::with_capacity(state.len() * 2);
        for amp in &state {
            next.push(amp * q.alpha);
            next.push(amp * q.beta);
        }
        state = next;
    }
    let dim = state.len();
    let mat = DMatrix::from_fn(dim, dim, |i, j| state[i] * state[j].conj());
    Ok(DensityMatrix {
        qubits: register.len(),
        mat,
    })
}
