//! Random unitary masking of encoded states.
//!
//! A mask is one single-qubit unitary per carrier qubit, drawn fresh for
//! every transmission. Until the masking parameters are revealed, the masked
//! state carries no usable message: averaged over masks, measurement
//! outcomes in the codeword basis are uniform. Because masks are unitary,
//! revealing the parameters lets the receiver invert them exactly.
//!
//! Two mask families are supported: continuously parameterized rotations
//! ([`MaskSpec::Euler`]) and finite words over the Hadamard/T gate set
//! ([`MaskSpec::HtWord`]), which generate a dense subgroup of SU(2) while
//! remaining cheap to transmit as classical symbols.

use serde::{Deserialize, Serialize};

use crate::coding::{encode_bell, encode_ghz, BellMessage, GhzMessage};
use crate::error::{Error, Result};
use crate::qstate::{apply_local, fidelity, EulerParams, Gate2, SimRng, StateVector};

/// Default word length for Hadamard/T masks.
pub const DEFAULT_HT_LENGTH: usize = 5;

/// One letter of a Hadamard/T mask word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HtSymbol {
    H,
    T,
}

impl HtSymbol {
    pub fn gate(self) -> Gate2 {
        match self {
            HtSymbol::H => Gate2::hadamard(),
            HtSymbol::T => Gate2::t_gate(),
        }
    }
}

/// The classical description of a single-qubit mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskSpec {
    /// Rotation-angle parameterization.
    Euler(EulerParams),
    /// Word over `{H, T}`; the written word is the operator product, so the
    /// leftmost letter acts last.
    HtWord(Vec<HtSymbol>),
}

impl MaskSpec {
    /// The unitary this description names.
    pub fn realize(&self) -> Result<Gate2> {
        match self {
            MaskSpec::Euler(p) => Ok(crate::qstate::euler_unitary(p)),
            MaskSpec::HtWord(word) => {
                if word.is_empty() {
                    return Err(Error::EmptyInput("HT mask word"));
                }
                let mut u = Gate2::identity();
                for sym in word {
                    u = u * sym.gate();
                }
                Ok(u)
            }
        }
    }

    /// Round continuous parameters to `digits` decimal places, modeling a
    /// finite-precision classical reveal. Discrete words are unchanged.
    pub fn quantized(&self, digits: u32) -> MaskSpec {
        match self {
            MaskSpec::Euler(p) => MaskSpec::Euler(p.quantized(digits)),
            MaskSpec::HtWord(w) => MaskSpec::HtWord(w.clone()),
        }
    }
}

/// Which family to draw masks from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MaskKind {
    #[default]
    Euler,
    Ht { length: usize },
}

/// Draw one mask. Euler angles are sampled independently and uniformly on
/// `[0, 2π)`; HT words are uniform over `{H, T}^length`.
pub fn random_mask(kind: MaskKind, rng: &mut SimRng) -> Result<MaskSpec> {
    use rand::Rng;
    match kind {
        MaskKind::Euler => {
            let mut angle = || rng.gen_range(0.0..std::f64::consts::TAU);
            let (alpha, beta, gamma, phi) = (angle(), angle(), angle(), angle());
            Ok(MaskSpec::Euler(EulerParams::new(alpha, beta, gamma, phi)?))
        }
        MaskKind::Ht { length } => {
            if length == 0 {
                return Err(Error::EmptyInput("HT mask word"));
            }
            let word = (0..length)
                .map(|_| if rng.gen::<bool>() { HtSymbol::H } else { HtSymbol::T })
                .collect();
            Ok(MaskSpec::HtWord(word))
        }
    }
}

/// One mask per qubit of a carrier state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskSet {
    masks: Vec<MaskSpec>,
}

impl MaskSet {
    pub fn new(masks: Vec<MaskSpec>) -> Result<Self> {
        if masks.is_empty() {
            return Err(Error::EmptyInput("mask set"));
        }
        Ok(MaskSet { masks })
    }

    /// Draw an independent mask for each of `num_qubits` qubits.
    pub fn random(num_qubits: usize, kind: MaskKind, rng: &mut SimRng) -> Result<Self> {
        let masks = (0..num_qubits)
            .map(|_| random_mask(kind, rng))
            .collect::<Result<Vec<_>>>()?;
        MaskSet::new(masks)
    }

    pub fn num_qubits(&self) -> usize {
        self.masks.len()
    }

    pub fn masks(&self) -> &[MaskSpec] {
        &self.masks
    }

    /// Round every continuous mask in the set (see [`MaskSpec::quantized`]).
    pub fn quantized(&self, digits: u32) -> MaskSet {
        MaskSet {
            masks: self.masks.iter().map(|m| m.quantized(digits)).collect(),
        }
    }

    fn gates(&self) -> Result<Vec<Gate2>> {
        self.masks.iter().map(MaskSpec::realize).collect()
    }
}

/// Apply each mask to its qubit.
pub fn mask(state: &StateVector, masks: &MaskSet) -> Result<StateVector> {
    if state.num_qubits() != masks.num_qubits() {
        return Err(Error::DimensionMismatch(
            1 << masks.num_qubits(),
            state.dim(),
        ));
    }
    let mut s = state.clone();
    for (qubit, gate) in masks.gates()?.into_iter().enumerate() {
        s = apply_local(&gate, qubit, &s)?;
    }
    Ok(s)
}

/// Invert every mask; `unmask(&mask(s, m)?, m)` recovers `s` exactly up to
/// floating-point error.
pub fn unmask(state: &StateVector, masks: &MaskSet) -> Result<StateVector> {
    if state.num_qubits() != masks.num_qubits() {
        return Err(Error::DimensionMismatch(
            1 << masks.num_qubits(),
            state.dim(),
        ));
    }
    let mut s = state.clone();
    for (qubit, gate) in masks.gates()?.into_iter().enumerate() {
        s = apply_local(&gate.dagger(), qubit, &s)?;
    }
    Ok(s)
}

/// Summary statistics of a sampled fidelity ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityStats {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation; `None` when fewer than two samples.
    pub stddev: Option<f64>,
    pub min: f64,
    pub max: f64,
}

impl FidelityStats {
    fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput("fidelity samples"));
        }
        let n = samples.len();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let stddev = if n >= 2 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Some(var.sqrt())
        } else {
            None
        };
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Ok(FidelityStats {
            n,
            mean,
            stddev,
            min,
            max,
        })
    }
}

fn random_codeword(num_qubits: usize, rng: &mut SimRng) -> Result<StateVector> {
    match num_qubits {
        2 => Ok(encode_bell(BellMessage::random(rng))),
        3 => Ok(encode_ghz(GhzMessage::random(rng))),
        _ => Err(Error::BadDimension {
            expected: 4,
            got: 1 << num_qubits,
        }),
    }
}

/// Fidelity between two independently drawn masked codewords, sampled
/// `pairs` times. Each draw picks a fresh random message and a fresh mask
/// set, so the statistic reflects what an interceptor sees: states from
/// different transmissions overlap substantially (mean well above zero) yet
/// far from perfectly (mean well below one).
pub fn ensemble_fidelity_stats(
    num_qubits: usize,
    kind: MaskKind,
    pairs: usize,
    rng: &mut SimRng,
) -> Result<FidelityStats> {
    let mut samples = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let a = mask(&random_codeword(num_qubits, rng)?, &MaskSet::random(num_qubits, kind, rng)?)?;
        let b = mask(&random_codeword(num_qubits, rng)?, &MaskSet::random(num_qubits, kind, rng)?)?;
        samples.push(fidelity(&a, &b)?);
    }
    FidelityStats::from_samples(&samples)
}

/// Mean outcome distribution of the codeword-basis measurement applied to
/// masked states, over `trials` random (message, mask) draws.
///
/// A mask-ignorant measurement learns nothing about the message when this
/// distribution is flat, i.e. every component is close to `1 / 2^k`.
pub fn mask_uniformity(
    num_qubits: usize,
    kind: MaskKind,
    trials: usize,
    rng: &mut SimRng,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::EmptyInput("uniformity trials"));
    }
    let basis: Vec<_> = match num_qubits {
        2 => crate::qstate::bell_basis().to_vec(),
        3 => crate::qstate::ghz_basis().to_vec(),
        _ => {
            return Err(Error::BadDimension {
                expected: 4,
                got: 1 << num_qubits,
            })
        }
    };
    let mut acc = vec![0.0; 1 << num_qubits];
    for _ in 0..trials {
        let masked = mask(&random_codeword(num_qubits, rng)?, &MaskSet::random(num_qubits, kind, rng)?)?;
        let probs = crate::qstate::basis_probabilities(&masked, &basis)?;
        for (a, p) in acc.iter_mut().zip(probs) {
            *a += p;
        }
    }
    for a in &mut acc {
        *a /= trials as f64;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{bell_basis, bell_state, rng_from_seed, BellLabel};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn ht_word_tt_is_the_phase_gate() {
        let spec = MaskSpec::HtWord(vec![HtSymbol::T, HtSymbol::T]);
        let u = spec.realize().unwrap();
        let want = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
        ];
        for (r, want_row) in want.iter().enumerate() {
            for (c, want_cell) in want_row.iter().enumerate() {
                assert_abs_diff_eq!(u.entry(r, c).re, want_cell.re, epsilon = 1e-12);
                assert_abs_diff_eq!(u.entry(r, c).im, want_cell.im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ht_word_hh_is_identity() {
        let spec = MaskSpec::HtWord(vec![HtSymbol::H, HtSymbol::H]);
        let u = spec.realize().unwrap();
        let id = Gate2::identity();
        for r in 0..2 {
            for c in 0..2 {
                assert_abs_diff_eq!(u.entry(r, c).re, id.entry(r, c).re, epsilon = 1e-12);
                assert_abs_diff_eq!(u.entry(r, c).im, id.entry(r, c).im, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn ht_word_order_leftmost_acts_last() {
        // [H, T] names H·T, which sends |0⟩ to H|0⟩ = (|0⟩+|1⟩)/√2.
        let u = MaskSpec::HtWord(vec![HtSymbol::H, HtSymbol::T])
            .realize()
            .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(u.entry(0, 0).re, h, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entry(1, 0).re, h, epsilon = 1e-12);
        // ...and |1⟩ to H·T|1⟩ = e^{iπ/4}(|0⟩-|1⟩)/√2.
        let e = Complex64::from_polar(h, std::f64::consts::FRAC_PI_4);
        assert_abs_diff_eq!(u.entry(0, 1).re, e.re, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entry(0, 1).im, e.im, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entry(1, 1).re, -e.re, epsilon = 1e-12);
        assert_abs_diff_eq!(u.entry(1, 1).im, -e.im, epsilon = 1e-12);
    }

    #[test]
    fn empty_ht_word_is_rejected() {
        assert!(MaskSpec::HtWord(vec![]).realize().is_err());
        let mut rng = rng_from_seed(0);
        assert!(random_mask(MaskKind::Ht { length: 0 }, &mut rng).is_err());
        assert!(MaskSet::new(vec![]).is_err());
    }

    #[test]
    fn unmask_inverts_mask_exactly() {
        let mut rng = rng_from_seed(11);
        for kind in [MaskKind::Euler, MaskKind::Ht { length: DEFAULT_HT_LENGTH }] {
            for _ in 0..200 {
                let state = random_codeword(2, &mut rng).unwrap();
                let masks = MaskSet::random(2, kind, &mut rng).unwrap();
                let recovered = unmask(&mask(&state, &masks).unwrap(), &masks).unwrap();
                assert!(fidelity(&recovered, &state).unwrap() > 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn unmask_inverts_mask_on_three_qubits() {
        let mut rng = rng_from_seed(12);
        for _ in 0..100 {
            let state = random_codeword(3, &mut rng).unwrap();
            let masks = MaskSet::random(3, MaskKind::Euler, &mut rng).unwrap();
            let recovered = unmask(&mask(&state, &masks).unwrap(), &masks).unwrap();
            assert!(fidelity(&recovered, &state).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn mask_requires_matching_qubit_count() {
        let mut rng = rng_from_seed(1);
        let masks = MaskSet::random(3, MaskKind::Euler, &mut rng).unwrap();
        let state = bell_state(BellLabel::PhiPlus);
        assert!(mask(&state, &masks).is_err());
        assert!(unmask(&state, &masks).is_err());
    }

    #[test]
    fn identity_mask_leaves_codeword_probabilities_one_hot() {
        let identity = MaskSpec::Euler(EulerParams::new(0.0, 0.0, 0.0, 0.0).unwrap());
        let masks = MaskSet::new(vec![identity.clone(), identity]).unwrap();
        let state = mask(&encode_bell(BellMessage::new(0b10).unwrap()), &masks).unwrap();
        let probs = crate::qstate::basis_probabilities(&state, &bell_basis()).unwrap();
        // Codeword for 10 is the second Bell basis element.
        assert_abs_diff_eq!(probs[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[0] + probs[2] + probs[3], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn masked_states_from_one_transmission_stay_orthogonal() {
        // The same mask set applied to two different codewords preserves
        // their inner product, so decoding with the reveal stays exact.
        let mut rng = rng_from_seed(21);
        let masks = MaskSet::random(2, MaskKind::Euler, &mut rng).unwrap();
        let a = mask(&encode_bell(BellMessage::new(0).unwrap()), &masks).unwrap();
        let b = mask(&encode_bell(BellMessage::new(3).unwrap()), &masks).unwrap();
        assert_abs_diff_eq!(fidelity(&a, &b).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn quantized_euler_mask_rounds_angles() {
        let p = EulerParams::new(1.23456789, 0.5, 2.0, 0.25).unwrap();
        let spec = MaskSpec::Euler(p).quantized(3);
        match spec {
            MaskSpec::Euler(q) => assert_abs_diff_eq!(q.alpha, 1.235, epsilon = 1e-12),
            MaskSpec::HtWord(_) => panic!("kind must be preserved"),
        }
        let word = MaskSpec::HtWord(vec![HtSymbol::H]);
        assert_eq!(word.quantized(2), word);
    }

    #[test]
    fn quantized_mask_still_inverts_its_own_realization() {
        // Both sides use the rounded parameters, so inversion is exact even
        // though the rounded unitary differs from the unrounded one.
        let mut rng = rng_from_seed(31);
        for _ in 0..50 {
            let masks = MaskSet::random(2, MaskKind::Euler, &mut rng)
                .unwrap()
                .quantized(4);
            let state = random_codeword(2, &mut rng).unwrap();
            let recovered = unmask(&mask(&state, &masks).unwrap(), &masks).unwrap();
            assert!(fidelity(&recovered, &state).unwrap() > 1.0 - 1e-12);
        }
    }

    #[test]
    fn ensemble_stats_have_sane_shape() {
        let mut rng = rng_from_seed(41);
        let stats = ensemble_fidelity_stats(2, MaskKind::Euler, 500, &mut rng).unwrap();
        assert_eq!(stats.n, 500);
        assert!(stats.min >= 0.0 && stats.max <= 1.0 + 1e-12);
        assert!(stats.min <= stats.mean && stats.mean <= stats.max);
        assert!(stats.stddev.unwrap() > 0.0);

        let one = ensemble_fidelity_stats(2, MaskKind::Euler, 1, &mut rng).unwrap();
        assert_eq!(one.stddev, None);
        assert!(ensemble_fidelity_stats(2, MaskKind::Euler, 0, &mut rng).is_err());
    }

    #[test]
    fn uniformity_rejects_degenerate_inputs() {
        let mut rng = rng_from_seed(1);
        assert!(mask_uniformity(2, MaskKind::Euler, 0, &mut rng).is_err());
        assert!(mask_uniformity(4, MaskKind::Euler, 10, &mut rng).is_err());
    }

    #[test]
    fn uniformity_components_sum_to_one() {
        let mut rng = rng_from_seed(2);
        for num_qubits in [2usize, 3] {
            let comps = mask_uniformity(num_qubits, MaskKind::Euler, 200, &mut rng).unwrap();
            assert_eq!(comps.len(), 1 << num_qubits);
            let total: f64 = comps.iter().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        }
    }
}
