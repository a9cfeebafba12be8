//! Minimal pure-state simulation for small multipartite systems.
//!
//! States are dense complex amplitude vectors over `2^k` basis kets.
//! Qubit 0 is the *leftmost* position in a ket label, so for two qubits the
//! amplitude order is `|00⟩, |01⟩, |10⟩, |11⟩` and qubit 0 owns the most
//! significant index bit. All gates are 2x2 unitaries applied locally.
//!
//! Equality of states is physical: compare via [`fidelity`] (squared overlap),
//! which ignores global phase.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::Mul;

use crate::error::{Error, Result};

/// Tolerance for norm and unitarity checks at construction time.
pub const CONSTRUCTION_TOL: f64 = 1e-10;
/// Tolerance for runtime consistency checks (probability sums, norms after gates).
pub const RUNTIME_TOL: f64 = 1e-9;
/// Tolerance for orthonormality of a measurement basis.
pub const BASIS_TOL: f64 = 1e-8;

/// Deterministic pseudo-random stream; the same 64-bit seed yields the same
/// sequence on every platform.
pub type SimRng = ChaCha8Rng;

/// Build the root stream for a seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent sub-stream from a master seed by stream counter.
///
/// Stream `i` of seed `s` is statistically independent of every other stream
/// of `s`, so workers and trials can draw concurrently without coordination.
pub fn rng_stream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Pure state of `num_qubits` qubits as a normalized amplitude vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Build a state from raw amplitudes, checking length, finiteness and
    /// normalization (within [`CONSTRUCTION_TOL`]).
    pub fn new(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if amps.len() != dim {
            return Err(Error::BadDimension {
                expected: dim,
                got: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let state = StateVector { num_qubits, amps };
        let dev = (state.norm() - 1.0).abs();
        if dev > CONSTRUCTION_TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(state)
    }

    /// The computational basis ket `|index⟩`.
    pub fn computational(num_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::BasisIndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    /// L2 norm of the amplitude vector.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Index-bit mask owned by `qubit` (qubit 0 = most significant bit).
    fn qubit_mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(1usize << (self.num_qubits - 1 - qubit))
    }
}

/// Labels of the four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    /// All four labels in the fixed basis order used throughout.
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];
}

/// The named 2-qubit Bell state: `Φ± = (|00⟩ ± |11⟩)/√2`, `Ψ± = (|01⟩ ± |10⟩)/√2`.
pub fn bell_state(label: BellLabel) -> StateVector {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (i, j, sign) = match label {
        BellLabel::PhiPlus => (0, 3, 1.0),
        BellLabel::PhiMinus => (0, 3, -1.0),
        BellLabel::PsiPlus => (1, 2, 1.0),
        BellLabel::PsiMinus => (1, 2, -1.0),
    };
    let mut amps = vec![Complex64::new(0.0, 0.0); 4];
    amps[i] = Complex64::new(h, 0.0);
    amps[j] = Complex64::new(sign * h, 0.0);
    StateVector {
        num_qubits: 2,
        amps,
    }
}

/// The Bell basis in the order `[Φ+, Φ-, Ψ+, Ψ-]`.
pub fn bell_basis() -> [StateVector; 4] {
    BellLabel::ALL.map(bell_state)
}

/// The `index`-th member of the orthonormal 3-qubit basis
/// `(|ab0⟩ ± |āb̄1⟩)/√2`, where bits 2 and 1 of `index` select `a` and `b`
/// and bit 0 selects the sign (0 = `+`). Index 0 is `(|000⟩ + |111⟩)/√2`.
pub fn ghz_basis_state(index: usize) -> Result<StateVector> {
    if index > 7 {
        return Err(Error::BasisIndexOutOfRange { index, len: 8 });
    }
    let a = (index >> 2) & 1;
    let b = (index >> 1) & 1;
    let sign = if index & 1 == 0 { 1.0 } else { -1.0 };
    let first = (a << 2) | (b << 1); // |a b 0⟩
    let second = first ^ 0b111; // bitwise complement |ā b̄ 1⟩
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[first] = Complex64::new(h, 0.0);
    amps[second] = Complex64::new(sign * h, 0.0);
    Ok(StateVector {
        num_qubits: 3,
        amps,
    })
}

/// The full 8-state GHZ basis in index order.
pub fn ghz_basis() -> [StateVector; 8] {
    std::array::from_fn(|i| ghz_basis_state(i).expect("index in range"))
}

/// A 2x2 unitary gate. Construction checks unitarity, so a held `Gate2` is
/// always unitary within [`CONSTRUCTION_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2 {
    m: [[Complex64; 2]; 2],
}

impl Gate2 {
    /// Validate `G G† = I` within [`CONSTRUCTION_TOL`] and wrap the matrix.
    pub fn new(m: [[Complex64; 2]; 2]) -> Result<Self> {
        for row in &m {
            for e in row {
                if !e.re.is_finite() || !e.im.is_finite() {
                    return Err(Error::NonFinite);
                }
            }
        }
        let gate = Gate2 { m };
        let dev = gate.unitarity_deviation();
        if dev > CONSTRUCTION_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(gate)
    }

    fn from_rows_unchecked(m: [[Complex64; 2]; 2]) -> Self {
        Gate2 { m }
    }

    /// Max elementwise deviation of `G G†` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = *self * self.dagger();
        let mut dev = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                let target = if r == c {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                dev = dev.max((p.m[r][c] - target).norm());
            }
        }
        dev
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Gate2 {
        Gate2::from_rows_unchecked([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    pub fn identity() -> Gate2 {
        Gate2::from_rows_unchecked([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
    }

    pub fn sigma_x() -> Gate2 {
        Gate2::from_rows_unchecked([
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
    }

    pub fn sigma_y() -> Gate2 {
        Gate2::from_rows_unchecked([
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            [Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        ])
    }

    pub fn sigma_z() -> Gate2 {
        Gate2::from_rows_unchecked([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
        ])
    }

    /// `iσ_y`, the real bit-and-phase flip used by the superdense code map.
    pub fn i_sigma_y() -> Gate2 {
        Gate2::from_rows_unchecked([
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
    }

    pub fn hadamard() -> Gate2 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Gate2::from_rows_unchecked([
            [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        ])
    }

    /// The π/8 gate `T = diag(1, e^{iπ/4})`.
    pub fn t_gate() -> Gate2 {
        Gate2::from_rows_unchecked([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [
                Complex64::new(0.0, 0.0),
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
            ],
        ])
    }
}

impl Mul for Gate2 {
    type Output = Gate2;

    fn mul(self, rhs: Gate2) -> Gate2 {
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (row, lhs_row) in m.iter_mut().zip(&self.m) {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = lhs_row[0] * rhs.m[0][c] + lhs_row[1] * rhs.m[1][c];
            }
        }
        Gate2::from_rows_unchecked(m)
    }
}

/// Euler angles plus global phase, all in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl EulerParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, phi: f64) -> Result<Self> {
        let p = EulerParams {
            alpha,
            beta,
            gamma,
            phi,
        };
        if [alpha, beta, gamma, phi].iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(p)
    }

    /// Reduce every angle into the canonical range `[0, 2π)`.
    pub fn canonicalized(self) -> Self {
        let wrap = |v: f64| v.rem_euclid(TAU);
        EulerParams {
            alpha: wrap(self.alpha),
            beta: wrap(self.beta),
            gamma: wrap(self.gamma),
            phi: wrap(self.phi),
        }
    }

    /// Round each angle to `digits` decimal places. Models finite classical
    /// bandwidth when transmitting gate parameters.
    pub fn quantized(self, digits: u32) -> Self {
        let scale = 10f64.powi(digits as i32);
        let q = |v: f64| (v * scale).round() / scale;
        EulerParams {
            alpha: q(self.alpha),
            beta: q(self.beta),
            gamma: q(self.gamma),
            phi: q(self.phi),
        }
    }
}

fn rotation_y(theta: f64) -> Gate2 {
    let (s, c) = (theta / 2.0).sin_cos();
    Gate2::from_rows_unchecked([
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ])
}

fn rotation_z(theta: f64) -> Gate2 {
    Gate2::from_rows_unchecked([
        [Complex64::from_polar(1.0, -theta / 2.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
    ])
}

/// The single-qubit unitary `e^{iφ} R_z(α) R_y(β) R_z(γ)` with
/// `R_y(θ) = e^{-iθσ_y/2}` and `R_z(θ) = e^{-iθσ_z/2}`.
pub fn euler_unitary(p: &EulerParams) -> Gate2 {
    let u = rotation_z(p.alpha) * rotation_y(p.beta) * rotation_z(p.gamma);
    let phase = Complex64::from_polar(1.0, p.phi);
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (row, u_row) in m.iter_mut().zip(&u.m) {
        for (cell, &u_cell) in row.iter_mut().zip(u_row) {
            *cell = phase * u_cell;
        }
    }
    Gate2::from_rows_unchecked(m)
}

/// Apply `gate` to `qubit` of `state`: `(I ⊗ … ⊗ G ⊗ … ⊗ I)|state⟩`.
pub fn apply_local(gate: &Gate2, qubit: usize, state: &StateVector) -> Result<StateVector> {
    let mask = state.qubit_mask(qubit)?;
    let mut amps = state.amps.clone();
    for n in 0..amps.len() {
        if n & mask == 0 {
            let a0 = amps[n];
            let a1 = amps[n | mask];
            amps[n] = gate.m[0][0] * a0 + gate.m[0][1] * a1;
            amps[n | mask] = gate.m[1][0] * a0 + gate.m[1][1] * a1;
        }
    }
    Ok(StateVector {
        num_qubits: state.num_qubits,
        amps,
    })
}

/// Squared overlap `|⟨a|b⟩|²`: 1 for identical states (up to global phase),
/// 0 for orthogonal ones.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}

/// Projection probabilities of `state` onto each element of an orthonormal,
/// complete `basis`. The returned vector sums to 1 within [`RUNTIME_TOL`].
pub fn basis_probabilities(state: &StateVector, basis: &[StateVector]) -> Result<Vec<f64>> {
    check_basis(state.dim(), basis)?;
    basis
        .iter()
        .map(|b| Ok(b.inner(state)?.norm_sqr()))
        .collect()
}

/// Projective measurement of `state` in `basis`: returns the sampled outcome
/// index together with the full probability vector.
pub fn measure_in_basis(
    state: &StateVector,
    basis: &[StateVector],
    rng: &mut SimRng,
) -> Result<(usize, Vec<f64>)> {
    let probs = basis_probabilities(state, basis)?;
    Ok((sample_index(&probs, rng), probs))
}

/// Sample an index from a probability vector with a single uniform draw.
pub(crate) fn sample_index(probs: &[f64], rng: &mut SimRng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    probs.len() - 1
}

fn check_basis(dim: usize, basis: &[StateVector]) -> Result<()> {
    if basis.len() != dim {
        return Err(Error::BadBasis((basis.len() as f64 - dim as f64).abs()));
    }
    let mut dev = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate() {
            let g = a.inner(b)?;
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g - target).norm());
        }
    }
    if dev > BASIS_TOL {
        return Err(Error::BadBasis(dev));
    }
    Ok(())
}
