//! Adversary models: bounded-fidelity cloning and multi-device relay.
//!
//! Cloning is capped by physics: an optimal cloning machine reproduces a
//! state drawn from the masked ensemble with fidelity at most `F_c` (≈ 0.7
//! for two-qubit carriers, ≈ 0.6 for three-qubit carriers), so an adversary
//! answering from pre-positioned clones decodes each symbol correctly with
//! probability `F_c` and a whole session with probability `F_c^N`. The
//! canonical model draws that Bernoulli coin per symbol; the state-level
//! model builds the imperfect clone explicitly and pushes it through the
//! honest decode pipeline as a cross-check.
//!
//! A relay adversary owns receivers away from the claimed location and
//! forwards everything at light speed, but a joint measurement needs all
//! qubits in one place: the detour through a decode point other than the
//! claimed location shows up as extra round-trip time at some station.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coding::decode;
use crate::error::{Error, Result};
use crate::geomtime::{expected_rtt, placement_sound, Location, Station, SPEED_OF_LIGHT};
use crate::masking::{mask, unmask, MaskSet};
use crate::protocol::{
    broadcast_value, confidence_against_cloner, encode_symbol, session_messages, ProtocolConfig,
    TransmittedState, STREAM_ENCODER, STREAM_MASKS, STREAM_MEASUREMENT, STREAM_SEQUENCE,
};
use crate::qstate::{rng_stream, SimRng, StateVector};

/// Sub-stream for the cloning machine's randomness.
pub const STREAM_CLONER: u64 = 4;

/// Monte Carlo trials split over this many deterministic sub-streams,
/// keeping estimates independent of thread scheduling.
const MC_CHUNKS: u64 = 8;
const MC_STREAM_BASE: u64 = 8;

/// How the cloning adversary is simulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClonerModel {
    /// Per-symbol correctness coin with success probability `F_c`. This is
    /// the canonical model: session pass probability is exactly `F_c^N`.
    #[default]
    Bernoulli,
    /// Explicit clone states: the true masked state with probability `F_c`,
    /// otherwise a uniformly random state orthogonal to it, decoded through
    /// the honest pipeline.
    StateLevel,
}

/// Adversary description, as carried in experiment configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AttackSpec {
    Cloner {
        fidelity: f64,
        #[serde(default)]
        model: ClonerModel,
    },
    Relay {
        /// Receiver positions; decoding happens at one of them.
        devices: Vec<Location>,
        /// Minimum distance of every device from the claimed location,
        /// meters.
        exclusion_radius: f64,
    },
}

impl AttackSpec {
    pub fn validate(&self, claimed: &Location) -> Result<()> {
        match self {
            AttackSpec::Cloner { fidelity, .. } => {
                if !(0.0..=1.0).contains(fidelity) {
                    return Err(Error::InvalidAttack(format!(
                        "cloning fidelity must be in [0, 1], got {fidelity}"
                    )));
                }
                Ok(())
            }
            AttackSpec::Relay {
                devices,
                exclusion_radius,
            } => {
                if devices.is_empty() {
                    return Err(Error::EmptyInput("relay devices"));
                }
                if !exclusion_radius.is_finite() || *exclusion_radius < 0.0 {
                    return Err(Error::InvalidAttack(format!(
                        "exclusion radius must be finite and non-negative, got {exclusion_radius}"
                    )));
                }
                for (i, d) in devices.iter().enumerate() {
                    if ![d.x, d.y, d.z].iter().all(|c| c.is_finite()) {
                        return Err(Error::InvalidAttack(format!(
                            "relay device {i} has non-finite coordinates"
                        )));
                    }
                    let dist = d.distance_to(claimed);
                    if dist == 0.0 {
                        return Err(Error::InvalidAttack(format!(
                            "relay device {i} sits at the claimed location; \
                             a relay adversary has no device there by definition"
                        )));
                    }
                    if dist < *exclusion_radius {
                        return Err(Error::InvalidAttack(format!(
                            "relay device {i} is {dist:.3} m from the claimed location, \
                             inside the {exclusion_radius:.3} m exclusion radius"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Outcome of one simulated attack session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    /// Whether the adversary would have been verified.
    pub passed: bool,
    /// Per-symbol decode correctness.
    pub record_correct: Vec<bool>,
    /// Unavoidable round-trip excess per station, seconds (≥ 0; the
    /// adversary pads early responses rather than reveal them).
    pub timing_excess: Vec<f64>,
    /// Pass probability of the canonical model with the same parameters.
    pub analytic_pass_probability: f64,
}

impl AttackReport {
    pub fn num_correct(&self) -> usize {
        self.record_correct.iter().filter(|&&c| c).count()
    }
}

/// A uniformly random state orthogonal to `state`: a Gaussian vector with
/// the component along `state` projected out, then normalized.
fn random_orthogonal_state(state: &StateVector, rng: &mut SimRng) -> StateVector {
    use rand::Rng;
    use rand_distr::StandardNormal;
    loop {
        let mut v: Vec<Complex64> = (0..state.dim())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let overlap: Complex64 = state
            .amps()
            .iter()
            .zip(&v)
            .map(|(s, g)| s.conj() * g)
            .sum();
        for (g, s) in v.iter_mut().zip(state.amps()) {
            *g -= overlap * s;
        }
        let norm = v.iter().map(|g| g.norm_sqr()).sum::<f64>().sqrt();
        // A Gaussian draw landing numerically inside the stripped-out
        // direction is astronomically unlikely; redraw if it happens.
        if norm > 1e-6 {
            for g in &mut v {
                *g /= norm;
            }
            return StateVector::new(state.num_qubits(), v)
                .expect("projected Gaussian vector is normalized by construction");
        }
    }
}

/// Simulate a cloning adversary against the session described by `config`.
///
/// The clones are pre-positioned at the claimed location, so timing is
/// clean and only sequence correctness decides the verdict. The adversary
/// passes only if every one of the `N` symbols decodes correctly.
pub fn run_cloner_attack(
    config: &ProtocolConfig,
    f_c: f64,
    model: ClonerModel,
) -> Result<AttackReport> {
    config.validate()?;
    if !(0.0..=1.0).contains(&f_c) {
        return Err(Error::InvalidAttack(format!(
            "cloning fidelity must be in [0, 1], got {f_c}"
        )));
    }

    let mut seq_rng = rng_stream(config.seed, STREAM_SEQUENCE);
    let messages = session_messages(config, &mut seq_rng);
    let mut cloner_rng = rng_stream(config.seed, STREAM_CLONER);

    let record_correct: Vec<bool> = match model {
        ClonerModel::Bernoulli => {
            use rand::Rng;
            messages.iter().map(|_| cloner_rng.gen_bool(f_c)).collect()
        }
        ClonerModel::StateLevel => {
            use rand::Rng;
            let k = config.alphabet.num_qubits();
            let mut coin_rng = rng_stream(config.seed, STREAM_ENCODER);
            let mut mask_rng = rng_stream(config.seed, STREAM_MASKS);
            let mut meas_rng = rng_stream(config.seed, STREAM_MEASUREMENT);
            let mut correct = Vec::with_capacity(messages.len());
            for &message in &messages {
                let encoded = encode_symbol(config.alphabet, message, &mut coin_rng)?;
                let masks = MaskSet::random(k, config.mask_kind, &mut mask_rng)?;
                let flying = TransmittedState::new(mask(&encoded, &masks)?);

                // The cloning machine consumes the intercepted state and
                // emits one imperfect copy.
                let original = flying.into_state();
                let clone = if cloner_rng.gen_bool(f_c) {
                    original
                } else {
                    random_orthogonal_state(&original, &mut cloner_rng)
                };

                let outcome = decode(&unmask(&clone, &masks)?, config.bsm_mode, &mut meas_rng)?;
                correct.push(broadcast_value(outcome) == message);
            }
            correct
        }
    };

    let passed = record_correct.iter().all(|&c| c);
    Ok(AttackReport {
        passed,
        record_correct,
        timing_excess: vec![0.0; config.stations.len()],
        analytic_pass_probability: confidence_against_cloner(config.num_systems, f_c)?,
    })
}

/// Empirical session pass rate of the canonical cloner: fraction of
/// `trials` independent sessions of `num_symbols` symbols in which every
/// symbol decodes correctly at fidelity `f_c`.
///
/// Trials are split across fixed sub-streams and run on worker threads; the
/// result depends only on the arguments, not on scheduling.
pub fn estimate_cloner_pass_rate(
    num_symbols: usize,
    f_c: f64,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if num_symbols == 0 {
        return Err(Error::InvalidAttack("sessions need at least 1 symbol".into()));
    }
    if trials == 0 {
        return Err(Error::EmptyInput("Monte Carlo trials"));
    }
    if !(0.0..=1.0).contains(&f_c) {
        return Err(Error::InvalidAttack(format!(
            "cloning fidelity must be in [0, 1], got {f_c}"
        )));
    }

    let base = trials / MC_CHUNKS as usize;
    let remainder = trials % MC_CHUNKS as usize;
    let chunk_trials: Vec<usize> = (0..MC_CHUNKS as usize)
        .map(|c| base + usize::from(c < remainder))
        .collect();

    let run_chunk = |chunk: usize, n_trials: usize| -> usize {
        use rand::Rng;
        let mut rng = rng_stream(seed, MC_STREAM_BASE + chunk as u64);
        let mut passes = 0;
        for _ in 0..n_trials {
            let mut all = true;
            for _ in 0..num_symbols {
                if !rng.gen_bool(f_c) {
                    all = false;
                    break;
                }
            }
            passes += usize::from(all);
        }
        passes
    };

    let total: usize = std::thread::scope(|scope| {
        let handles: Vec<_> = chunk_trials
            .iter()
            .enumerate()
            .map(|(c, &n)| scope.spawn(move || run_chunk(c, n)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).sum()
    });

    Ok(total as f64 / trials as f64)
}

/// The timing cost of relaying, per station and decode point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelayDelayReport {
    /// Index into `devices` of the decode point minimizing the worst
    /// per-station excess.
    pub best_device: usize,
    /// Fastest achievable round trip per station when decoding there,
    /// seconds.
    pub min_rtt: Vec<f64>,
    /// Unavoidable excess over the expected round trip, per station,
    /// seconds (early responses are padded, never negative).
    pub excess: Vec<f64>,
    /// Worst per-station excess at the best decode point.
    pub max_excess: f64,
}

/// Fastest round trips a relay adversary can achieve.
///
/// Each station's qubit is intercepted by the device nearest that station,
/// forwarded at light speed to the decode point `p`, and the response
/// travels straight back to the station, so the fastest round trip through
/// decode point `p` is
/// `[d(station, interceptor) + d(interceptor, p) + d(p, station)] / c`.
/// Masking reveals are public classical broadcasts and reach `p` directly;
/// they never lengthen this path. The adversary decodes wherever the worst
/// station excess is smallest.
pub fn relay_attack_delay(
    stations: &[Station],
    devices: &[Location],
    v: &Location,
) -> Result<RelayDelayReport> {
    if devices.is_empty() {
        return Err(Error::EmptyInput("relay devices"));
    }
    if stations.is_empty() {
        return Err(Error::EmptyInput("stations"));
    }

    let interceptor: Vec<&Location> = stations
        .iter()
        .map(|s| {
            devices
                .iter()
                .min_by(|a, b| {
                    s.location
                        .distance_to(a)
                        .total_cmp(&s.location.distance_to(b))
                })
                .expect("device list is non-empty")
        })
        .collect();
    let expected: Vec<f64> = stations
        .iter()
        .map(|s| expected_rtt(&s.location, v))
        .collect();

    let rtts_at = |p: &Location| -> Vec<f64> {
        stations
            .iter()
            .zip(&interceptor)
            .map(|(s, d)| {
                (s.location.distance_to(d) + d.distance_to(p) + p.distance_to(&s.location))
                    / SPEED_OF_LIGHT
            })
            .collect()
    };

    let mut best: Option<(usize, Vec<f64>, Vec<f64>, f64)> = None;
    for (p_idx, p) in devices.iter().enumerate() {
        let min_rtt = rtts_at(p);
        let excess: Vec<f64> = min_rtt
            .iter()
            .zip(&expected)
            .map(|(&rtt, &exp)| (rtt - exp).max(0.0))
            .collect();
        let worst = excess.iter().cloned().fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(_, _, _, b)| worst < *b) {
            best = Some((p_idx, min_rtt, excess, worst));
        }
    }
    let (best_device, min_rtt, excess, max_excess) = best.expect("device list is non-empty");
    Ok(RelayDelayReport {
        best_device,
        min_rtt,
        excess,
        max_excess,
    })
}

/// Simulate a relay adversary against the session described by `config`.
///
/// The adversary holds every qubit and every reveal after forwarding, so it
/// decodes perfectly — the session fails, when it fails, purely on timing.
pub fn run_relay_attack(config: &ProtocolConfig, spec: &AttackSpec) -> Result<AttackReport> {
    config.validate()?;
    spec.validate(&config.claimed_location)?;
    let devices = match spec {
        AttackSpec::Relay { devices, .. } => devices,
        AttackSpec::Cloner { .. } => {
            return Err(Error::InvalidAttack(
                "run_relay_attack needs a relay attack spec".into(),
            ))
        }
    };
    match placement_sound(&config.stations, &config.claimed_location) {
        Ok(true) => {}
        Ok(false) => log::warn!(
            "claimed location is not strictly inside the station hull; \
             a relay adversary may pass regardless of standoff"
        ),
        Err(e) => log::warn!("placement soundness could not be evaluated: {e}"),
    }

    let delay = relay_attack_delay(&config.stations, devices, &config.claimed_location)?;

    // The adversary runs the honest decode pipeline on the gathered qubits.
    let k = config.alphabet.num_qubits();
    let mut seq_rng = rng_stream(config.seed, STREAM_SEQUENCE);
    let mut coin_rng = rng_stream(config.seed, STREAM_ENCODER);
    let mut mask_rng = rng_stream(config.seed, STREAM_MASKS);
    let mut meas_rng = rng_stream(config.seed, STREAM_MEASUREMENT);
    let messages = session_messages(config, &mut seq_rng);
    let mut record_correct = Vec::with_capacity(messages.len());
    for &message in &messages {
        let encoded = encode_symbol(config.alphabet, message, &mut coin_rng)?;
        let masks = MaskSet::random(k, config.mask_kind, &mut mask_rng)?;
        let flying = TransmittedState::new(mask(&encoded, &masks)?);
        let outcome = decode(
            &unmask(&flying.into_state(), &masks)?,
            config.bsm_mode,
            &mut meas_rng,
        )?;
        record_correct.push(broadcast_value(outcome) == message);
    }

    let sequence_match = record_correct.iter().all(|&c| c);
    let timing_ok = delay.max_excess <= config.timing_tol;
    Ok(AttackReport {
        passed: sequence_match && timing_ok,
        record_correct,
        timing_excess: delay.excess,
        analytic_pass_probability: if timing_ok { 1.0 } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::BsmMode;
    use crate::masking::MaskKind;
    use crate::protocol::Alphabet;
    use approx::assert_abs_diff_eq;

    fn line_stations() -> Vec<Station> {
        vec![
            Station::new("A", Location::on_line(0.0)),
            Station::new("B", Location::on_line(300.0)),
        ]
    }

    fn bell_config(seed: u64) -> ProtocolConfig {
        ProtocolConfig {
            stations: line_stations(),
            claimed_location: Location::on_line(150.0),
            device_location: None,
            num_systems: 30,
            alphabet: Alphabet::Bell,
            bsm_mode: BsmMode::Full,
            mask_kind: MaskKind::Euler,
            timing_tol: 1e-9,
            quantum_channel_speed: 1.0,
            processing_delay: 0.0,
            seed,
        }
    }

    #[test]
    fn relay_delay_single_device_worked_example() {
        let report = relay_attack_delay(
            &line_stations(),
            &[Location::on_line(50.0)],
            &Location::on_line(150.0),
        )
        .unwrap();
        assert_eq!(report.best_device, 0);
        // Station A: qubit 0→50, response 50→0: round trip 100 m, faster
        // than the expected 300 m — padded to zero excess.
        assert_abs_diff_eq!(report.min_rtt[0], 100.0 / SPEED_OF_LIGHT, epsilon = 1e-18);
        assert_abs_diff_eq!(report.excess[0], 0.0, epsilon = 1e-18);
        // Station B: qubit 300→50, response 50→300: 500 m against 300 m.
        assert_abs_diff_eq!(report.min_rtt[1], 500.0 / SPEED_OF_LIGHT, epsilon = 1e-18);
        assert_abs_diff_eq!(report.excess[1], 200.0 / SPEED_OF_LIGHT, epsilon = 1e-15);
        assert_abs_diff_eq!(report.max_excess, 6.671281903963041e-7, epsilon = 1e-15);
    }

    #[test]
    fn relay_delay_vanishes_for_a_device_at_the_claimed_location() {
        let report = relay_attack_delay(
            &line_stations(),
            &[Location::on_line(150.0)],
            &Location::on_line(150.0),
        )
        .unwrap();
        for &e in &report.excess {
            assert_abs_diff_eq!(e, 0.0, epsilon = 1e-18);
        }
        assert_abs_diff_eq!(report.max_excess, 0.0, epsilon = 1e-18);
    }

    #[test]
    fn relay_delay_symmetric_pair_still_pays() {
        let report = relay_attack_delay(
            &line_stations(),
            &[Location::on_line(50.0), Location::on_line(250.0)],
            &Location::on_line(150.0),
        )
        .unwrap();
        // Either decode point leaves the far station 200 m over budget.
        assert_abs_diff_eq!(report.max_excess, 200.0 / SPEED_OF_LIGHT, epsilon = 1e-15);
        assert!(report.max_excess > 0.0);
    }

    #[test]
    fn relay_decodes_where_the_worst_station_suffers_least() {
        let report = relay_attack_delay(
            &line_stations(),
            &[Location::on_line(50.0), Location::on_line(140.0)],
            &Location::on_line(150.0),
        )
        .unwrap();
        // Decoding at 140 m: A's qubit detours through the device at 50
        // (280 m round trip, under budget); B pays 320 m against 300 m.
        assert_eq!(report.best_device, 1);
        assert_abs_diff_eq!(report.max_excess, 20.0 / SPEED_OF_LIGHT, epsilon = 1e-15);
    }

    #[test]
    fn relay_delay_rejects_empty_inputs() {
        assert!(relay_attack_delay(&line_stations(), &[], &Location::on_line(150.0)).is_err());
        assert!(relay_attack_delay(&[], &[Location::on_line(50.0)], &Location::on_line(150.0))
            .is_err());
    }

    #[test]
    fn attack_spec_validation() {
        let claimed = Location::on_line(150.0);
        assert!(AttackSpec::Cloner {
            fidelity: 0.7,
            model: ClonerModel::Bernoulli
        }
        .validate(&claimed)
        .is_ok());
        assert!(AttackSpec::Cloner {
            fidelity: 1.3,
            model: ClonerModel::Bernoulli
        }
        .validate(&claimed)
        .is_err());

        let ok = AttackSpec::Relay {
            devices: vec![Location::on_line(50.0)],
            exclusion_radius: 100.0,
        };
        assert!(ok.validate(&claimed).is_ok());

        let inside = AttackSpec::Relay {
            devices: vec![Location::on_line(120.0)],
            exclusion_radius: 100.0,
        };
        assert!(inside.validate(&claimed).is_err());

        let at_claimed = AttackSpec::Relay {
            devices: vec![claimed],
            exclusion_radius: 0.0,
        };
        assert!(at_claimed.validate(&claimed).is_err());

        let empty = AttackSpec::Relay {
            devices: vec![],
            exclusion_radius: 10.0,
        };
        assert!(empty.validate(&claimed).is_err());
    }

    #[test]
    fn relay_attack_fails_on_timing_with_perfect_decoding() {
        let config = bell_config(7);
        let spec = AttackSpec::Relay {
            devices: vec![Location::on_line(50.0)],
            exclusion_radius: 100.0,
        };
        let report = run_relay_attack(&config, &spec).unwrap();
        assert!(!report.passed);
        assert!(report.record_correct.iter().all(|&c| c));
        assert_abs_diff_eq!(
            report.timing_excess[1],
            200.0 / SPEED_OF_LIGHT,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(report.analytic_pass_probability, 0.0);
    }

    #[test]
    fn relay_attack_inside_light_slack_may_pass() {
        // 0.125 m standoff against a 1 ns tolerance (0.3 m of light
        // travel): the detour is too small for the stations to see.
        let config = bell_config(8);
        let spec = AttackSpec::Relay {
            devices: vec![Location::on_line(150.125)],
            exclusion_radius: 0.125,
        };
        let report = run_relay_attack(&config, &spec).unwrap();
        assert!(report.passed);
        assert!(report.timing_excess.iter().all(|&e| e < 1e-9));
    }

    #[test]
    fn relay_attack_requires_a_relay_spec() {
        let config = bell_config(9);
        let spec = AttackSpec::Cloner {
            fidelity: 0.7,
            model: ClonerModel::Bernoulli,
        };
        assert!(run_relay_attack(&config, &spec).is_err());
    }

    #[test]
    fn bernoulli_cloner_reports_match_the_power_law() {
        let config = bell_config(10);
        let report = run_cloner_attack(&config, 0.5, ClonerModel::Bernoulli).unwrap();
        assert_eq!(report.record_correct.len(), 30);
        assert!(!report.passed, "0.5^30 ≈ 9e-10 cannot pass by luck here");
        assert!(report.timing_excess.iter().all(|&e| e == 0.0));
        assert_abs_diff_eq!(
            report.analytic_pass_probability,
            0.5f64.powi(30),
            epsilon = 1e-18
        );

        let perfect = run_cloner_attack(&config, 1.0, ClonerModel::Bernoulli).unwrap();
        assert!(perfect.passed);
        assert_eq!(perfect.num_correct(), 30);
    }

    #[test]
    fn cloner_attack_rejects_bad_fidelity() {
        let config = bell_config(11);
        assert!(run_cloner_attack(&config, -0.1, ClonerModel::Bernoulli).is_err());
        assert!(run_cloner_attack(&config, 1.1, ClonerModel::StateLevel).is_err());
    }

    #[test]
    fn state_level_wrong_clones_never_decode_in_full_mode() {
        // An orthogonal clone stays orthogonal to the codeword after
        // unmasking, so the correct outcome has probability zero.
        let config = bell_config(12);
        let report = run_cloner_attack(&config, 0.0, ClonerModel::StateLevel).unwrap();
        assert_eq!(report.num_correct(), 0);
        assert!(!report.passed);
    }

    #[test]
    fn state_level_perfect_clones_always_decode() {
        let mut config = bell_config(13);
        config.alphabet = Alphabet::Ghz;
        config.stations = vec![
            Station::new("A", Location::in_plane(0.0, 0.0)),
            Station::new("B", Location::in_plane(400.0, 0.0)),
            Station::new("C", Location::in_plane(200.0, 350.0)),
        ];
        config.claimed_location = Location::in_plane(200.0, 120.0);
        let report = run_cloner_attack(&config, 1.0, ClonerModel::StateLevel).unwrap();
        assert!(report.passed);
        assert_eq!(report.num_correct(), 30);
    }

    #[test]
    fn state_level_clones_get_lucky_under_linear_optics() {
        // A wrong clone can still land in the merged Φ class, so symbols
        // encoding the Φ codeword are sometimes reported correctly.
        let mut config = bell_config(14);
        config.bsm_mode = BsmMode::LinearOptics;
        config.num_systems = 200;
        let report = run_cloner_attack(&config, 0.0, ClonerModel::StateLevel).unwrap();
        // Expected rate: 1/3 of symbols are Φ, each matched with
        // probability 1/3 — about 22 of 200, very unlikely below 4 or
        // above 45.
        let correct = report.num_correct();
        assert!(
            (4..=45).contains(&correct),
            "lucky-match count {correct} outside plausible band"
        );
        assert!(!report.passed);
    }

    #[test]
    fn cloner_attack_is_deterministic() {
        let config = bell_config(15);
        let a = run_cloner_attack(&config, 0.7, ClonerModel::StateLevel).unwrap();
        let b = run_cloner_attack(&config, 0.7, ClonerModel::StateLevel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pass_rate_estimate_matches_binomial_statistics() {
        let n = 5;
        let f_c: f64 = 0.7;
        let trials = 20_000;
        let rate = estimate_cloner_pass_rate(n, f_c, trials, 99).unwrap();
        let p = f_c.powi(n as i32);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!(
            (rate - p).abs() < 4.0 * sigma,
            "rate {rate} vs analytic {p} (σ = {sigma})"
        );
        // Deterministic in the seed regardless of scheduling.
        assert_eq!(rate, estimate_cloner_pass_rate(n, f_c, trials, 99).unwrap());
    }

    #[test]
    fn pass_rate_estimate_handles_edge_fidelities() {
        assert_abs_diff_eq!(estimate_cloner_pass_rate(10, 1.0, 1000, 1).unwrap(), 1.0);
        assert_abs_diff_eq!(estimate_cloner_pass_rate(10, 0.0, 1000, 1).unwrap(), 0.0);
        assert!(estimate_cloner_pass_rate(0, 0.5, 1000, 1).is_err());
        assert!(estimate_cloner_pass_rate(10, 0.5, 0, 1).is_err());
        assert!(estimate_cloner_pass_rate(10, 1.5, 1000, 1).is_err());
    }

    #[test]
    fn orthogonal_state_sampler_is_orthogonal_and_normalized() {
        let mut rng = rng_stream(3, STREAM_CLONER);
        let state = crate::qstate::bell_state(crate::qstate::BellLabel::PsiMinus);
        for _ in 0..50 {
            let ortho = random_orthogonal_state(&state, &mut rng);
            let overlap: Complex64 = state
                .amps()
                .iter()
                .zip(ortho.amps())
                .map(|(s, o)| s.conj() * o)
                .sum();
            assert!(overlap.norm() < 1e-10);
            assert_abs_diff_eq!(ortho.norm(), 1.0, epsilon = 1e-10);
        }
    }
}
