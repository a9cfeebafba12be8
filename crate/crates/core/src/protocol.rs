//! End-to-end orchestration of one verification session.
//!
//! The stations and the device agree on a random symbol sequence; each
//! symbol is encoded on an entangled system, masked, and sent down the
//! quantum channel. The masking parameters follow on classical channels,
//! timed so that all reveals arrive at the claimed location together and
//! only after the qubits. The device unmasks, measures, and broadcasts each
//! decoded symbol; every station compares the decoded sequence against the
//! agreed one and times the round trip from its own reveal to the response.
//!
//! Time is a single simulated clock and every event is scheduled
//! analytically, so honest round trips equal `2 · light_time(station,
//! claimed_location)` exactly and the timing checks are meaningful at
//! picosecond tolerances. Only classical legs enter the round trip; the
//! quantum channel may run below `c` (fiber) without affecting the verdict,
//! because reveals are scheduled relative to actual qubit arrival.

use serde::{Deserialize, Serialize};

use crate::coding::{
    bits_to_symbols, decode, encode_bell_with_carrier, encode_ghz, BellMessage, BsmMode,
    DecodeResult, GhzMessage,
};
use crate::error::{Error, Result};
use crate::geomtime::{
    expected_rtt, light_time, placement_sound, verify_timing, Location, Station, TimingRecord,
    TimingVerdict,
};
use crate::masking::{mask, unmask, MaskKind, MaskSet};
use crate::qstate::{bell_state, rng_stream, BellLabel, SimRng, StateVector};

/// Seconds between successive entangled-system transmissions.
pub const SYSTEM_SLOT: f64 = 1e-3;

/// Seconds between a qubit's arrival at the claimed location and the
/// synchronized arrival of its masking reveal. Keeps the reveal strictly
/// after the qubit while staying far below the slot length.
pub const CLASSICAL_GUARD: f64 = 1e-6;

/// Optimal-cloning fidelity bound for two-qubit entangled carriers.
pub const CLONING_FIDELITY_BIPARTITE: f64 = 0.7;

/// Optimal-cloning fidelity bound for three-qubit entangled carriers.
pub const CLONING_FIDELITY_TRIPARTITE: f64 = 0.6;

/// Deterministic sub-stream assignments under one session seed.
pub const STREAM_SEQUENCE: u64 = 0;
pub const STREAM_ENCODER: u64 = 1;
pub const STREAM_MASKS: u64 = 2;
pub const STREAM_MEASUREMENT: u64 = 3;

/// Which entangled carrier family a session uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alphabet {
    /// Two-qubit carriers, 2 bits per symbol, 2 stations.
    Bell,
    /// Three-qubit carriers, 3 bits per symbol, 3 stations.
    Ghz,
}

impl Alphabet {
    pub fn num_qubits(self) -> usize {
        match self {
            Alphabet::Bell => 2,
            Alphabet::Ghz => 3,
        }
    }

    pub fn bits_per_symbol(self) -> usize {
        match self {
            Alphabet::Bell => 2,
            Alphabet::Ghz => 3,
        }
    }
}

fn default_channel_speed() -> f64 {
    1.0
}

fn default_timing_tol() -> f64 {
    1e-9
}

/// Parameters of one verification session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Verification stations; exactly 2 for [`Alphabet::Bell`], 3 for
    /// [`Alphabet::Ghz`].
    pub stations: Vec<Station>,
    /// Where the device claims to be.
    pub claimed_location: Location,
    /// Where the device actually is; omit for an honest device at the
    /// claimed location.
    #[serde(default)]
    pub device_location: Option<Location>,
    /// Number of entangled systems (symbols) per session.
    pub num_systems: usize,
    pub alphabet: Alphabet,
    #[serde(default)]
    pub bsm_mode: BsmMode,
    #[serde(default)]
    pub mask_kind: MaskKind,
    /// Allowed round-trip slack before a station flags a response, seconds.
    #[serde(default = "default_timing_tol")]
    pub timing_tol: f64,
    /// Quantum channel signalling speed as a fraction of c, in (0, 1].
    #[serde(default = "default_channel_speed")]
    pub quantum_channel_speed: f64,
    /// Device-side decode latency, seconds. Counts against the timing
    /// budget, exactly as real hardware latency would.
    #[serde(default)]
    pub processing_delay: f64,
    /// Session seed; all randomness derives from it deterministically.
    pub seed: u64,
}

fn finite_location(loc: &Location, what: &str) -> Result<()> {
    if [loc.x, loc.y, loc.z].iter().all(|c| c.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "{what} has non-finite coordinates"
        )))
    }
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        let k = self.alphabet.num_qubits();
        if self.stations.len() != k {
            return Err(Error::InvalidConfig(format!(
                "{:?} alphabet requires exactly {} stations, got {}",
                self.alphabet,
                k,
                self.stations.len()
            )));
        }
        if self.num_systems == 0 {
            return Err(Error::InvalidConfig(
                "num_systems must be at least 1".into(),
            ));
        }
        if !(self.quantum_channel_speed > 0.0 && self.quantum_channel_speed <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "quantum_channel_speed must be in (0, 1], got {}",
                self.quantum_channel_speed
            )));
        }
        if !self.timing_tol.is_finite() || self.timing_tol < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "timing_tol must be finite and non-negative, got {}",
                self.timing_tol
            )));
        }
        if !self.processing_delay.is_finite() || self.processing_delay < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "processing_delay must be finite and non-negative, got {}",
                self.processing_delay
            )));
        }
        if self.bsm_mode == BsmMode::LinearOptics && self.alphabet != Alphabet::Bell {
            return Err(Error::InvalidConfig(
                "linear-optics measurement supports the Bell alphabet only".into(),
            ));
        }
        for s in &self.stations {
            finite_location(&s.location, &format!("station {}", s.name))?;
        }
        finite_location(&self.claimed_location, "claimed_location")?;
        if let Some(dev) = &self.device_location {
            finite_location(dev, "device_location")?;
        }
        Ok(())
    }

    /// Where the responding device sits: `device_location`, or the claimed
    /// location for an honest run.
    pub fn device(&self) -> Location {
        self.device_location.unwrap_or(self.claimed_location)
    }
}

/// A state in flight on the quantum channel.
///
/// The wrapper deliberately implements neither `Clone` nor `Copy`: an
/// unknown quantum state cannot be duplicated, and the honest pipeline
/// moves each transmitted system to exactly one measurer. Imperfect copies
/// exist only through the bounded-fidelity cloner in the adversary module.
///
/// ```
/// use qloc_core::protocol::TransmittedState;
/// use qloc_core::qstate::{bell_state, BellLabel};
///
/// let flying = TransmittedState::new(bell_state(BellLabel::PhiPlus));
/// let at_device = flying.into_state(); // consumed: no copy stays behind
/// assert_eq!(at_device.num_qubits(), 2);
/// ```
///
/// Copying a state in flight does not compile:
///
/// ```compile_fail
/// use qloc_core::protocol::TransmittedState;
/// use qloc_core::qstate::{bell_state, BellLabel};
///
/// let flying = TransmittedState::new(bell_state(BellLabel::PhiPlus));
/// let copy = flying.clone();
/// ```
#[derive(Debug)]
pub struct TransmittedState {
    state: StateVector,
}

impl TransmittedState {
    pub fn new(state: StateVector) -> Self {
        TransmittedState { state }
    }

    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }

    /// Read-only view for simulator-level analysis (computing what an ideal
    /// copy would have been). No protocol party uses this.
    pub fn state(&self) -> &StateVector {
        &self.state
    }

    /// Hand the state to its one measurer.
    pub fn into_state(self) -> StateVector {
        self.state
    }
}

/// `n · bits_per_symbol` independent uniform bits.
pub fn generate_sequence(n: usize, bits_per_symbol: usize, rng: &mut SimRng) -> Vec<u8> {
    use rand::Rng;
    (0..n * bits_per_symbol)
        .map(|_| u8::from(rng.gen::<bool>()))
        .collect()
}

/// The three-symbol alphabet used with linear-optics measurement: the two
/// fully resolved codewords plus the representative of the merged class.
pub const LO_MESSAGES: [u8; 3] = [0b00, 0b01, 0b11];

/// `n` symbols drawn uniformly from [`LO_MESSAGES`].
pub fn lo_sequence(n: usize, rng: &mut SimRng) -> Vec<u8> {
    use rand::Rng;
    (0..n).map(|_| LO_MESSAGES[rng.gen_range(0..3)]).collect()
}

/// Per-station reveal send times such that every reveal reaches `v` at the
/// same instant, strictly after `qubit_arrival_time`.
pub fn schedule_classical_sends(
    stations: &[Station],
    v: &Location,
    qubit_arrival_time: f64,
) -> Vec<f64> {
    let arrival = qubit_arrival_time + CLASSICAL_GUARD;
    stations
        .iter()
        .map(|s| arrival - light_time(&s.location, v))
        .collect()
}

/// Everything observable about one entangled system's round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptRecord {
    pub index: usize,
    /// Symbol value taken from the agreed sequence.
    pub message_sent: u8,
    pub masks: MaskSet,
    /// When the complete entangled system is available at the claimed
    /// location, seconds.
    pub qubit_arrival: f64,
    /// When each station sent its masking reveal, seconds.
    pub mask_send_times: Vec<f64>,
    /// When each reveal reaches the claimed location, seconds. Synchronized
    /// by construction.
    pub classical_arrivals: Vec<f64>,
    /// When the device broadcast its decoded symbol, seconds.
    pub broadcast_time: f64,
    /// When each station received the broadcast, seconds.
    pub receipt_times: Vec<f64>,
    /// Symbol value the device announced.
    pub message_decoded: u8,
}

impl TranscriptRecord {
    pub fn is_correct(&self) -> bool {
        self.message_sent == self.message_decoded
    }
}

/// Final session verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Rejected {
        sequence_mismatch: bool,
        timing_failures: Vec<String>,
    },
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

/// Everything the stations conclude from one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<TranscriptRecord>,
    /// Per-record decode correctness, aligned with `records`.
    pub correct: Vec<bool>,
    /// Whether every decoded symbol matched the agreed sequence.
    pub sequence_match: bool,
    /// Worst-case observed round trip per station across the session.
    pub timing: Vec<TimingRecord>,
    pub verdict: Verdict,
    /// Probability that an optimal-cloning adversary would have produced a
    /// fully matching sequence of this length.
    pub confidence_against_cloner: f64,
}

/// The session's symbol sequence, as message values.
pub(crate) fn session_messages(config: &ProtocolConfig, rng: &mut SimRng) -> Vec<u8> {
    match config.bsm_mode {
        BsmMode::Full => {
            let bits = config.alphabet.bits_per_symbol();
            let raw = generate_sequence(config.num_systems, bits, rng);
            bits_to_symbols(&raw, bits)
        }
        BsmMode::LinearOptics => lo_sequence(config.num_systems, rng),
    }
}

/// Encode one symbol on a fresh carrier. Bell encoding may be applied by
/// either station — the codeword is the same up to global phase — so the
/// acting side is chosen by coin flip.
pub(crate) fn encode_symbol(
    alphabet: Alphabet,
    message: u8,
    coin_rng: &mut SimRng,
) -> Result<StateVector> {
    use rand::Rng;
    match alphabet {
        Alphabet::Bell => {
            let qubit = usize::from(coin_rng.gen::<bool>());
            encode_bell_with_carrier(
                BellMessage::new(message)?,
                &bell_state(BellLabel::PhiPlus),
                qubit,
            )
        }
        Alphabet::Ghz => Ok(encode_ghz(GhzMessage::new(message)?)),
    }
}

/// The symbol value a device announces for a measurement outcome. The
/// merged linear-optics class maps to its representative codeword.
pub(crate) fn broadcast_value(outcome: DecodeResult) -> u8 {
    match outcome {
        DecodeResult::Bell(m) => m.bits(),
        DecodeResult::Ghz(m) => m.bits(),
        DecodeResult::AmbiguousPhi => LO_MESSAGES[0],
    }
}

/// Probability that a cloning adversary with per-symbol fidelity `f_c`
/// decodes all `n` symbols correctly: `f_c^n`.
pub fn confidence_against_cloner(n: usize, f_c: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig(
            "confidence needs at least 1 symbol".into(),
        ));
    }
    if !(0.0..=1.0).contains(&f_c) {
        return Err(Error::InvalidConfig(format!(
            "cloning fidelity must be in [0, 1], got {f_c}"
        )));
    }
    Ok(f_c.powi(n as i32))
}

/// The cloning-fidelity bound matching a carrier family.
pub fn cloning_fidelity_bound(alphabet: Alphabet) -> f64 {
    match alphabet {
        Alphabet::Bell => CLONING_FIDELITY_BIPARTITE,
        Alphabet::Ghz => CLONING_FIDELITY_TRIPARTITE,
    }
}

/// Run one complete verification session.
///
/// An honest device at the claimed location is always `Verified` in full
/// measurement mode (and in linear-optics mode with the three-symbol
/// alphabet). A device elsewhere keeps decoding correctly but cannot beat
/// light: its worst-station round trip runs over by twice the extra
/// distance over c.
pub fn run_protocol(config: &ProtocolConfig) -> Result<VerificationReport> {
    config.validate()?;
    match placement_sound(&config.stations, &config.claimed_location) {
        Ok(true) => {}
        Ok(false) => log::warn!(
            "claimed location is not strictly inside the station hull; \
             timing cannot distinguish it from points outside"
        ),
        Err(e) => log::warn!("placement soundness could not be evaluated: {e}"),
    }

    let k = config.alphabet.num_qubits();
    let device = config.device();
    let qubit_speed = config.quantum_channel_speed * crate::geomtime::SPEED_OF_LIGHT;

    let mut seq_rng = rng_stream(config.seed, STREAM_SEQUENCE);
    let mut coin_rng = rng_stream(config.seed, STREAM_ENCODER);
    let mut mask_rng = rng_stream(config.seed, STREAM_MASKS);
    let mut meas_rng = rng_stream(config.seed, STREAM_MEASUREMENT);

    let messages = session_messages(config, &mut seq_rng);

    // Travel times that do not depend on the slot index.
    let qubit_time_to = |target: &Location| -> f64 {
        config
            .stations
            .iter()
            .map(|s| s.location.distance_to(target) / qubit_speed)
            .fold(0.0, f64::max)
    };
    let qubit_flight_claimed = qubit_time_to(&config.claimed_location);
    let qubit_flight_device = qubit_time_to(&device);

    let mut records = Vec::with_capacity(config.num_systems);
    for (i, &message) in messages.iter().enumerate() {
        // Step 1–2: encode the next symbol, mask it, and launch the qubits.
        let encoded = encode_symbol(config.alphabet, message, &mut coin_rng)?;
        let masks = MaskSet::random(k, config.mask_kind, &mut mask_rng)?;
        let flying = TransmittedState::new(mask(&encoded, &masks)?);

        let qubit_send = i as f64 * SYSTEM_SLOT;
        let qubit_arrival = qubit_send + qubit_flight_claimed;

        // Step 3: reveals are timed to arrive together at the claimed
        // location, after the qubits.
        let mask_send_times =
            schedule_classical_sends(&config.stations, &config.claimed_location, qubit_arrival);
        let classical_arrivals: Vec<f64> = config
            .stations
            .iter()
            .zip(&mask_send_times)
            .map(|(s, &t)| t + light_time(&s.location, &config.claimed_location))
            .collect();

        // Step 4: the device can decode once it holds the qubits and every
        // reveal — judged at its actual position.
        let qubit_at_device = qubit_send + qubit_flight_device;
        let reveals_at_device = config
            .stations
            .iter()
            .zip(&mask_send_times)
            .map(|(s, &t)| t + light_time(&s.location, &device))
            .fold(0.0, f64::max);
        let broadcast_time =
            qubit_at_device.max(reveals_at_device) + config.processing_delay;

        let unmasked = unmask(&flying.into_state(), &masks)?;
        let outcome = decode(&unmasked, config.bsm_mode, &mut meas_rng)?;
        let message_decoded = broadcast_value(outcome);

        // Step 5: the broadcast radiates back to every station.
        let receipt_times: Vec<f64> = config
            .stations
            .iter()
            .map(|s| broadcast_time + light_time(&s.location, &device))
            .collect();

        records.push(TranscriptRecord {
            index: i,
            message_sent: message,
            masks,
            qubit_arrival,
            mask_send_times,
            classical_arrivals,
            broadcast_time,
            receipt_times,
            message_decoded,
        });
    }

    let correct: Vec<bool> = records.iter().map(TranscriptRecord::is_correct).collect();
    let sequence_match = correct.iter().all(|&c| c);

    // Worst observed round trip per station across all records.
    let timing: Vec<TimingRecord> = config
        .stations
        .iter()
        .enumerate()
        .map(|(r, s)| {
            let observed = records
                .iter()
                .map(|rec| rec.receipt_times[r] - rec.mask_send_times[r])
                .fold(f64::NEG_INFINITY, f64::max);
            TimingRecord {
                station: s.name.clone(),
                expected_rtt: expected_rtt(&s.location, &config.claimed_location),
                observed_rtt: observed,
            }
        })
        .collect();

    let timing_verdict = verify_timing(&timing, config.timing_tol)?;
    let verdict = match (&timing_verdict, sequence_match) {
        (TimingVerdict::Pass, true) => Verdict::Verified,
        (TimingVerdict::Pass, false) => Verdict::Rejected {
            sequence_mismatch: true,
            timing_failures: Vec::new(),
        },
        (TimingVerdict::Fail(msgs), seq) => Verdict::Rejected {
            sequence_mismatch: !seq,
            timing_failures: msgs.clone(),
        },
    };

    let confidence = confidence_against_cloner(
        config.num_systems,
        cloning_fidelity_bound(config.alphabet),
    )?;

    Ok(VerificationReport {
        records,
        correct,
        sequence_match,
        timing,
        verdict,
        confidence_against_cloner: confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::rng_from_seed;
    use approx::assert_abs_diff_eq;

    fn honest_1d_config(seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            stations: vec![
                Station::new("A", Location::on_line(0.0)),
                Station::new("B", Location::on_line(300.0)),
            ],
            claimed_location: Location::on_line(150.0),
            device_location: None,
            num_systems: 20,
            alphabet: Alphabet::Bell,
            bsm_mode: BsmMode::Full,
            mask_kind: MaskKind::Euler,
            timing_tol: 1e-9,
            quantum_channel_speed: 1.0,
            processing_delay: 0.0,
            seed,
        }
    }

    fn honest_2d_ghz_config(seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            stations: vec![
                Station::new("A", Location::in_plane(0.0, 0.0)),
                Station::new("B", Location::in_plane(400.0, 0.0)),
                Station::new("C", Location::in_plane(200.0, 350.0)),
            ],
            claimed_location: Location::in_plane(200.0, 120.0),
            device_location: None,
            num_systems: 20,
            alphabet: Alphabet::Ghz,
            bsm_mode: BsmMode::Full,
            mask_kind: MaskKind::Euler,
            timing_tol: 1e-9,
            quantum_channel_speed: 1.0,
            processing_delay: 0.0,
            seed,
        }
    }

    #[test]
    fn sequence_has_requested_length_and_is_reproducible() {
        let mut rng = rng_from_seed(7);
        let s1 = generate_sequence(100, 2, &mut rng);
        assert_eq!(s1.len(), 200);
        assert!(s1.iter().all(|&b| b <= 1));
        let mut rng = rng_from_seed(7);
        let s2 = generate_sequence(100, 2, &mut rng);
        assert_eq!(s1, s2);
    }

    #[test]
    fn sequence_bits_are_roughly_unbiased() {
        let mut rng = rng_from_seed(8);
        let bits = generate_sequence(5_000, 2, &mut rng);
        let ones = bits.iter().filter(|&&b| b == 1).count() as f64;
        let frac = ones / bits.len() as f64;
        assert!((frac - 0.5).abs() < 0.02, "bit bias {frac}");
    }

    #[test]
    fn lo_sequence_draws_from_the_three_symbol_alphabet() {
        let mut rng = rng_from_seed(9);
        let seq = lo_sequence(300, &mut rng);
        assert!(seq.iter().all(|s| LO_MESSAGES.contains(s)));
        for want in LO_MESSAGES {
            assert!(seq.contains(&want), "symbol {want} never drawn");
        }
    }

    #[test]
    fn classical_sends_arrive_together_after_the_qubit() {
        let stations = vec![
            Station::new("A", Location::on_line(0.0)),
            Station::new("B", Location::on_line(300.0)),
            Station::new("C", Location::in_plane(100.0, 250.0)),
        ];
        let v = Location::in_plane(120.0, 40.0);
        let qubit_arrival = 4.2e-3;
        let sends = schedule_classical_sends(&stations, &v, qubit_arrival);
        let arrivals: Vec<f64> = stations
            .iter()
            .zip(&sends)
            .map(|(s, &t)| t + light_time(&s.location, &v))
            .collect();
        for &a in &arrivals {
            assert!(a > qubit_arrival);
            assert_abs_diff_eq!(a, arrivals[0], epsilon = 1e-15);
        }
        // The farther station sends earlier by the travel-time difference.
        let d_a = light_time(&stations[0].location, &v);
        let d_b = light_time(&stations[1].location, &v);
        assert_abs_diff_eq!(sends[0] - sends[1], d_b - d_a, epsilon = 1e-18);
    }

    #[test]
    fn equidistant_stations_send_simultaneously() {
        let stations = vec![
            Station::new("A", Location::on_line(0.0)),
            Station::new("B", Location::on_line(300.0)),
        ];
        let sends = schedule_classical_sends(&stations, &Location::on_line(150.0), 1e-3);
        assert_abs_diff_eq!(sends[0], sends[1], epsilon = 1e-18);
    }

    #[test]
    fn config_validation_catches_bad_setups() {
        let good = honest_1d_config(1);
        assert!(good.validate().is_ok());

        let mut c = good.clone();
        c.stations.push(Station::new("X", Location::on_line(500.0)));
        assert!(c.validate().is_err());

        let mut c = good.clone();
        c.alphabet = Alphabet::Ghz;
        assert!(c.validate().is_err());

        let mut c = good.clone();
        c.num_systems = 0;
        assert!(c.validate().is_err());

        let mut c = good.clone();
        c.quantum_channel_speed = 0.0;
        assert!(c.validate().is_err());
        c.quantum_channel_speed = 1.2;
        assert!(c.validate().is_err());

        let mut c = good.clone();
        c.timing_tol = -1.0;
        assert!(c.validate().is_err());

        let mut c = good.clone();
        c.processing_delay = f64::NAN;
        assert!(c.validate().is_err());

        let mut c = good.clone();
        c.claimed_location = Location::on_line(f64::INFINITY);
        assert!(c.validate().is_err());

        let mut c = honest_2d_ghz_config(1);
        c.bsm_mode = BsmMode::LinearOptics;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_rejects_unknown_json_fields() {
        let json = r#"{
            "stations": [
                {"name": "A", "location": {"x": 0.0}},
                {"name": "B", "location": {"x": 300.0}}
            ],
            "claimed_location": {"x": 150.0},
            "num_systems": 5,
            "alphabet": "bell",
            "seed": 1,
            "surprise": true
        }"#;
        assert!(serde_json::from_str::<ProtocolConfig>(json).is_err());
    }

    #[test]
    fn config_defaults_fill_optional_fields() {
        let json = r#"{
            "stations": [
                {"name": "A", "location": {"x": 0.0}},
                {"name": "B", "location": {"x": 300.0}}
            ],
            "claimed_location": {"x": 150.0},
            "num_systems": 5,
            "alphabet": "bell",
            "seed": 1
        }"#;
        let c: ProtocolConfig = serde_json::from_str(json).unwrap();
        assert_eq!(c.bsm_mode, BsmMode::Full);
        assert_eq!(c.mask_kind, MaskKind::Euler);
        assert_eq!(c.device_location, None);
        assert_abs_diff_eq!(c.quantum_channel_speed, 1.0);
        assert_abs_diff_eq!(c.timing_tol, 1e-9);
        assert_abs_diff_eq!(c.processing_delay, 0.0);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn honest_bell_session_verifies_with_exact_round_trips() {
        let config = honest_1d_config(42);
        let report = run_protocol(&config).unwrap();
        assert!(report.verdict.is_verified());
        assert!(report.sequence_match);
        assert!(report.correct.iter().all(|&c| c));
        for t in &report.timing {
            assert!((t.observed_rtt - t.expected_rtt).abs() < 1e-12);
        }
        assert_abs_diff_eq!(
            report.confidence_against_cloner,
            0.7f64.powi(20),
            epsilon = 1e-12
        );
    }

    #[test]
    fn honest_ghz_session_verifies() {
        let report = run_protocol(&honest_2d_ghz_config(43)).unwrap();
        assert!(report.verdict.is_verified());
        assert!(report.sequence_match);
        assert_abs_diff_eq!(
            report.confidence_against_cloner,
            0.6f64.powi(20),
            epsilon = 1e-12
        );
    }

    #[test]
    fn honest_linear_optics_session_verifies() {
        let mut config = honest_1d_config(44);
        config.bsm_mode = BsmMode::LinearOptics;
        config.num_systems = 50;
        let report = run_protocol(&config).unwrap();
        assert!(report.verdict.is_verified());
        assert!(report
            .records
            .iter()
            .all(|r| LO_MESSAGES.contains(&r.message_sent)));
    }

    #[test]
    fn reveals_follow_qubits_and_stay_synchronized() {
        let report = run_protocol(&honest_2d_ghz_config(45)).unwrap();
        for rec in &report.records {
            for &a in &rec.classical_arrivals {
                assert!(a > rec.qubit_arrival);
                assert!((a - rec.classical_arrivals[0]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn slower_quantum_channel_still_verifies() {
        let mut config = honest_1d_config(46);
        config.quantum_channel_speed = 0.65;
        let report = run_protocol(&config).unwrap();
        assert!(report.verdict.is_verified());
        for t in &report.timing {
            assert!((t.observed_rtt - t.expected_rtt).abs() < 1e-12);
        }
    }

    #[test]
    fn mislocated_device_is_rejected_on_timing_alone() {
        let mut config = honest_1d_config(47);
        // 30 m beyond the claimed location, toward station B.
        config.device_location = Some(Location::on_line(180.0));
        let report = run_protocol(&config).unwrap();
        assert!(report.sequence_match, "decode itself stays correct");
        match &report.verdict {
            Verdict::Rejected {
                sequence_mismatch,
                timing_failures,
            } => {
                assert!(!sequence_mismatch);
                assert!(!timing_failures.is_empty());
            }
            Verdict::Verified => panic!("mislocated device must be rejected"),
        }
        // Station A (at 0, now 30 m farther) sees twice the extra distance.
        let worst = report
            .timing
            .iter()
            .map(TimingRecord::excess)
            .fold(f64::NEG_INFINITY, f64::max);
        let want = 2.0 * 30.0 / crate::geomtime::SPEED_OF_LIGHT;
        assert_abs_diff_eq!(worst, want, epsilon = 1e-12);
    }

    #[test]
    fn processing_delay_counts_against_the_timing_budget() {
        let mut config = honest_1d_config(48);
        config.processing_delay = 5e-9;
        let report = run_protocol(&config).unwrap();
        assert!(!report.verdict.is_verified());

        config.timing_tol = 1e-8;
        let report = run_protocol(&config).unwrap();
        assert!(report.verdict.is_verified());
    }

    #[test]
    fn sessions_are_deterministic_in_the_seed() {
        let config = honest_1d_config(49);
        let a = run_protocol(&config).unwrap();
        let b = run_protocol(&config).unwrap();
        assert_eq!(a, b);
        let c = run_protocol(&honest_1d_config(50)).unwrap();
        assert_ne!(
            a.records.iter().map(|r| r.message_sent).collect::<Vec<_>>(),
            c.records.iter().map(|r| r.message_sent).collect::<Vec<_>>()
        );
    }

    #[test]
    fn confidence_matches_the_power_law() {
        assert_abs_diff_eq!(
            confidence_against_cloner(100, 0.7).unwrap(),
            0.7f64.powi(100),
            epsilon = 1e-30
        );
        assert_abs_diff_eq!(confidence_against_cloner(5, 1.0).unwrap(), 1.0);
        assert_abs_diff_eq!(confidence_against_cloner(5, 0.0).unwrap(), 0.0);
        assert!(confidence_against_cloner(0, 0.7).is_err());
        assert!(confidence_against_cloner(5, 1.1).is_err());
        assert!(confidence_against_cloner(5, -0.1).is_err());
    }

    #[test]
    fn confidence_is_strictly_decreasing_in_sequence_length() {
        let mut last = 1.0;
        for n in 1..200 {
            let c = confidence_against_cloner(n, 0.7).unwrap();
            assert!(c < last, "confidence must strictly decrease at n={n}");
            last = c;
        }
    }

    #[test]
    fn fidelity_bounds_per_alphabet() {
        assert_abs_diff_eq!(cloning_fidelity_bound(Alphabet::Bell), 0.7);
        assert_abs_diff_eq!(cloning_fidelity_bound(Alphabet::Ghz), 0.6);
    }

    #[test]
    fn reports_serialize_to_json() {
        let report = run_protocol(&honest_1d_config(51)).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        assert!(text.contains("\"verdict\""));
        assert!(text.contains("verified"));
    }
}
