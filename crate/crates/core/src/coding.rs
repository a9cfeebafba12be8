//! Superdense encoding of classical messages onto entangled carriers and
//! decoding by projective measurement.
//!
//! Two-bit messages ride on Bell pairs, three-bit messages on 3-qubit
//! maximally entangled states. The public code map fixes `00→I`, `01→σ_x`,
//! `10→σ_z`, `11→iσ_y`, so the low bit selects the bit flip and the high bit
//! the phase flip. A full measurement recovers every message exactly; the
//! linear-optics variant resolves only `Ψ+` and `Ψ-`, collapsing `Φ±` into a
//! single ambiguous class and shrinking the alphabet to three symbols.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    apply_local, bell_basis, bell_state, ghz_basis, ghz_basis_state, measure_in_basis,
    sample_index, BellLabel, Gate2, SimRng, StateVector,
};

/// A 2-bit message, value range `0..=3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BellMessage(u8);

impl BellMessage {
    pub fn new(bits: u8) -> Result<Self> {
        if bits > 3 {
            return Err(Error::MessageOutOfRange {
                value: bits,
                bits: 2,
            });
        }
        Ok(BellMessage(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = BellMessage> {
        (0..4).map(BellMessage)
    }

    pub fn random(rng: &mut SimRng) -> Self {
        use rand::Rng;
        BellMessage(rng.gen_range(0..4))
    }
}

/// A 3-bit message, value range `0..=7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GhzMessage(u8);

impl GhzMessage {
    pub fn new(bits: u8) -> Result<Self> {
        if bits > 7 {
            return Err(Error::MessageOutOfRange {
                value: bits,
                bits: 3,
            });
        }
        Ok(GhzMessage(bits))
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = GhzMessage> {
        (0..8).map(GhzMessage)
    }

    pub fn random(rng: &mut SimRng) -> Self {
        use rand::Rng;
        GhzMessage(rng.gen_range(0..8))
    }
}

/// How the joint measurement discriminates the carrier basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BsmMode {
    /// All basis states distinguished deterministically.
    #[default]
    Full,
    /// Linear-optics Bell measurement: `Ψ+` and `Ψ-` resolved, `Φ±` merged.
    LinearOptics,
}

/// Pack a bit string into symbol values, `bits_per_symbol` bits each,
/// most significant bit first. The length must divide evenly.
pub fn bits_to_symbols(bits: &[u8], bits_per_symbol: usize) -> Vec<u8> {
    assert!(
        (1..=8).contains(&bits_per_symbol),
        "symbols hold 1..=8 bits"
    );
    assert_eq!(
        bits.len() % bits_per_symbol,
        0,
        "bit string length must be a multiple of the symbol width"
    );
    bits.chunks(bits_per_symbol)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
        .collect()
}

/// Outcome of [`decode`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecodeResult {
    Bell(BellMessage),
    Ghz(GhzMessage),
    /// Linear-optics outcome that landed in the unresolved `Φ±` subspace.
    AmbiguousPhi,
}

/// The encoding operator for a 2-bit message.
pub fn bell_encode_op(msg: BellMessage) -> Gate2 {
    match msg.bits() {
        0b00 => Gate2::identity(),
        0b01 => Gate2::sigma_x(),
        0b10 => Gate2::sigma_z(),
        _ => Gate2::i_sigma_y(),
    }
}

/// Bell state produced by encoding `msg` on the `|Φ+⟩` carrier.
pub fn bell_codeword(msg: BellMessage) -> BellLabel {
    match msg.bits() {
        0b00 => BellLabel::PhiPlus,
        0b01 => BellLabel::PsiPlus,
        0b10 => BellLabel::PhiMinus,
        _ => BellLabel::PsiMinus,
    }
}

/// Message recovered from a Bell basis outcome (inverse of [`bell_codeword`]).
pub fn bell_message_of(label: BellLabel) -> BellMessage {
    match label {
        BellLabel::PhiPlus => BellMessage(0b00),
        BellLabel::PhiMinus => BellMessage(0b10),
        BellLabel::PsiPlus => BellMessage(0b01),
        BellLabel::PsiMinus => BellMessage(0b11),
    }
}

/// Encode a 2-bit message on the default `|Φ+⟩` carrier.
pub fn encode_bell(msg: BellMessage) -> StateVector {
    encode_bell_with_carrier(msg, &bell_state(BellLabel::PhiPlus), 0)
        .expect("default carrier is a 2-qubit state")
}

/// Encode a 2-bit message by one local operator on `qubit` of `carrier`.
///
/// Either party may apply the operator: acting on qubit 0 or qubit 1 yields
/// the same codeword up to global phase for the four operators in the map.
pub fn encode_bell_with_carrier(
    msg: BellMessage,
    carrier: &StateVector,
    qubit: usize,
) -> Result<StateVector> {
    if carrier.num_qubits() != 2 {
        return Err(Error::DimensionMismatch(4, carrier.dim()));
    }
    apply_local(&bell_encode_op(msg), qubit, carrier)
}

/// The 3-bit transform table: pairs act on qubits 0 and 1 of the `(|000⟩+|111⟩)/√2` carrier.
pub fn ghz_encode_ops(msg: GhzMessage) -> (Gate2, Gate2) {
    match msg.bits() {
        0 => (Gate2::sigma_z(), Gate2::sigma_z()),
        1 => (Gate2::identity(), Gate2::sigma_z()),
        2 => (Gate2::i_sigma_y(), Gate2::sigma_z()),
        3 => (Gate2::sigma_x(), Gate2::sigma_z()),
        4 => (Gate2::identity(), Gate2::sigma_x()),
        5 => (Gate2::sigma_z(), Gate2::sigma_x()),
        6 => (Gate2::sigma_x(), Gate2::sigma_x()),
        _ => (Gate2::i_sigma_y(), Gate2::sigma_x()),
    }
}

/// GHZ basis index produced by each message; verified against the dense
/// transform oracle in tests.
const GHZ_BASIS_OF_MESSAGE: [usize; 8] = [0, 1, 4, 5, 2, 3, 6, 7];

/// Encode a 3-bit message onto the 3-qubit carrier.
pub fn encode_ghz(msg: GhzMessage) -> StateVector {
    let carrier = ghz_basis_state(0).expect("index 0 in range");
    let (op0, op1) = ghz_encode_ops(msg);
    let s = apply_local(&op0, 0, &carrier).expect("qubit 0 exists");
    apply_local(&op1, 1, &s).expect("qubit 1 exists")
}

/// Message recovered from a GHZ basis outcome.
pub fn ghz_message_of_basis(basis_index: usize) -> Result<GhzMessage> {
    let msg = GHZ_BASIS_OF_MESSAGE
        .iter()
        .position(|&b| b == basis_index)
        .ok_or(Error::BasisIndexOutOfRange {
            index: basis_index,
            len: 8,
        })?;
    Ok(GhzMessage(msg as u8))
}

/// Decode a 4- or 8-dimensional state by projective measurement.
///
/// `Full` mode measures in the complete carrier basis and inverts the code
/// map, so a basis-element input decodes deterministically. `LinearOptics`
/// (2-qubit states only) resolves `Ψ±` exactly and reports [`DecodeResult::AmbiguousPhi`]
/// for the merged `Φ±` subspace.
pub fn decode(state: &StateVector, mode: BsmMode, rng: &mut SimRng) -> Result<DecodeResult> {
    match (state.num_qubits(), mode) {
        (2, BsmMode::Full) => {
            let (idx, _) = measure_in_basis(state, &bell_basis(), rng)?;
            Ok(DecodeResult::Bell(bell_message_of(BellLabel::ALL[idx])))
        }
        (3, BsmMode::Full) => {
            let (idx, _) = measure_in_basis(state, &ghz_basis(), rng)?;
            Ok(DecodeResult::Ghz(ghz_message_of_basis(idx)?))
        }
        (2, BsmMode::LinearOptics) => {
            let probs = linear_optics_probabilities(state)?;
            match sample_index(&probs, rng) {
                0 => Ok(DecodeResult::Bell(bell_message_of(BellLabel::PsiPlus))),
                1 => Ok(DecodeResult::Bell(bell_message_of(BellLabel::PsiMinus))),
                _ => Ok(DecodeResult::AmbiguousPhi),
            }
        }
        (_, BsmMode::LinearOptics) => Err(Error::LinearOpticsUnsupported),
        (_, _) => Err(Error::DimensionMismatch(4, state.dim())),
    }
}

/// Outcome probabilities of the linear-optics measurement, in class order
/// `[Ψ+, Ψ-, Φ±]`. The third entry is a rank-2 projection.
pub fn linear_optics_probabilities(state: &StateVector) -> Result<Vec<f64>> {
    if state.num_qubits() != 2 {
        return Err(Error::LinearOpticsUnsupported);
    }
    let p = crate::qstate::basis_probabilities(state, &bell_basis())?;
    // basis order [Φ+, Φ-, Ψ+, Ψ-]
    Ok(vec![p[2], p[3], p[0] + p[1]])
}

/// Classical bits conveyed per entangled state.
pub fn channel_capacity(mode: BsmMode, k: u32) -> Result<f64> {
    match (mode, k) {
        (BsmMode::Full, 2) => Ok(2.0),
        (BsmMode::Full, 3) => Ok(3.0),
        (BsmMode::LinearOptics, 2) => Ok(3f64.log2()),
        (mode, k) => Err(Error::UnsupportedCapacity(format!("{mode:?} with k={k}"))),
    }
}
